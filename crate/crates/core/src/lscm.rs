//! Linear RSRP forward model: discrete angular space, beam pattern matrix,
//! and unit conversions between mW and dBm.
//!
//! The model maps a nonnegative channel angular power spectrum (CAPS) of
//! dimension `N` to per-beam received power over `M` beams through a fixed
//! `M x N` power-gain matrix `A`, so `y_mw = A * x`.

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;

/// Default power floor (mW) applied before the dB conversion: -120 dBm.
pub const DEFAULT_FLOOR_MW: f64 = 1e-12;

const BEAM_MAGIC: &[u8; 5] = b"CSGA1";

/// Discretized angular space with elevation-major flattening:
/// `n = v * n_azimuths + h` for 0-based `(v, h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    elevations: Vec<f64>,
    azimuths: Vec<f64>,
}

impl AngularGrid {
    pub fn new(elevations: Vec<f64>, azimuths: Vec<f64>) -> Result<Self> {
        if elevations.is_empty() || azimuths.is_empty() {
            return Err(Error::InvalidConfig(
                "angular grid needs at least one elevation and one azimuth".into(),
            ));
        }
        if elevations.iter().chain(&azimuths).any(|a| !a.is_finite()) {
            return Err(Error::NumericInput("angular grid contains nonfinite angles".into()));
        }
        Ok(Self { elevations, azimuths })
    }

    /// Uniformly spaced grid over `[elev_lo, elev_hi] x [azim_lo, azim_hi]`
    /// (radians, endpoints included).
    pub fn uniform(
        n_elevations: usize,
        elev_lo: f64,
        elev_hi: f64,
        n_azimuths: usize,
        azim_lo: f64,
        azim_hi: f64,
    ) -> Result<Self> {
        let lin = |n: usize, lo: f64, hi: f64| -> Vec<f64> {
            if n == 1 {
                vec![(lo + hi) / 2.0]
            } else {
                (0..n)
                    .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        };
        Self::new(lin(n_elevations, elev_lo, elev_hi), lin(n_azimuths, azim_lo, azim_hi))
    }

    pub fn n_elevations(&self) -> usize {
        self.elevations.len()
    }

    pub fn n_azimuths(&self) -> usize {
        self.azimuths.len()
    }

    /// Total number of spatial angles `N`.
    pub fn n_angles(&self) -> usize {
        self.elevations.len() * self.azimuths.len()
    }

    /// Flattened index of the `(v, h)`-th angle (0-based, elevation-major).
    pub fn flat_index(&self, v: usize, h: usize) -> usize {
        debug_assert!(v < self.n_elevations() && h < self.n_azimuths());
        v * self.azimuths.len() + h
    }

    /// Inverse of [`flat_index`].
    pub fn angle_indices(&self, n: usize) -> (usize, usize) {
        debug_assert!(n < self.n_angles());
        (n / self.azimuths.len(), n % self.azimuths.len())
    }

    /// `(theta, phi)` for the flattened angle index `n`.
    pub fn angle(&self, n: usize) -> (f64, f64) {
        let (v, h) = self.angle_indices(n);
        (self.elevations[v], self.azimuths[h])
    }
}

/// Base-station antenna parameters: transmit power, precoding matrix,
/// uniform rectangular array geometry, and a per-angle gain table.
#[derive(Debug, Clone)]
pub struct AntennaConfig {
    /// Transmit power in mW.
    pub power_mw: f64,
    /// Precoding matrix, one column per beam (`n_elements x n_beams`).
    pub precoding: Array2<Complex64>,
    /// Panel dimension along y.
    pub n_y: usize,
    /// Panel dimension along z.
    pub n_z: usize,
    /// Element spacing along y (meters).
    pub d_y: f64,
    /// Element spacing along z (meters).
    pub d_z: f64,
    /// Carrier wavelength (meters).
    pub wavelength: f64,
    /// Per-angle antenna gain table of length `N` (dimensionless).
    pub gain: Vec<f64>,
}

impl AntennaConfig {
    /// Number of array elements `N_T = N_y * N_z`.
    pub fn n_elements(&self) -> usize {
        self.n_y * self.n_z
    }

    pub fn n_beams(&self) -> usize {
        self.precoding.ncols()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power_mw > 0.0) || !self.power_mw.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "transmit power must be positive and finite, got {}",
                self.power_mw
            )));
        }
        if self.wavelength == 0.0 || !self.wavelength.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "wavelength must be nonzero and finite, got {}",
                self.wavelength
            )));
        }
        if self.n_y == 0 || self.n_z == 0 {
            return Err(Error::InvalidConfig("panel dimensions must be at least 1x1".into()));
        }
        if !self.d_y.is_finite() || !self.d_z.is_finite() {
            return Err(Error::NumericInput("element spacings must be finite".into()));
        }
        if self.precoding.nrows() != self.n_elements() {
            return Err(Error::ShapeMismatch(format!(
                "precoding matrix has {} rows but the panel has {} elements",
                self.precoding.nrows(),
                self.n_elements()
            )));
        }
        if self.precoding.ncols() == 0 {
            return Err(Error::InvalidConfig("at least one beam is required".into()));
        }
        if self.precoding.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NumericInput("precoding matrix contains nonfinite entries".into()));
        }
        if self.gain.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::InvalidConfig("gain table entries must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Where a beam pattern matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamSource {
    Computed,
    Loaded,
}

/// `M x N` nonnegative power-gain matrix mapping CAPS to per-beam mW.
#[derive(Debug, Clone)]
pub struct BeamPatternMatrix {
    a: Array2<f64>,
    source: BeamSource,
}

impl BeamPatternMatrix {
    pub fn from_matrix(a: Array2<f64>, source: BeamSource) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::InvalidConfig("beam pattern matrix must be at least 1x1".into()));
        }
        if a.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NumericInput(
                "beam pattern matrix entries must be finite and >= 0".into(),
            ));
        }
        Ok(Self { a, source })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn source(&self) -> BeamSource {
        self.source
    }

    /// Number of beams `M`.
    pub fn n_beams(&self) -> usize {
        self.a.nrows()
    }

    /// Angular dimension `N`.
    pub fn n_angles(&self) -> usize {
        self.a.ncols()
    }

    /// Writes the binary beam file: magic `CSGA1`, `M` and `N` as u64 LE,
    /// then `M * N` f64 LE entries in row-major order.
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(BEAM_MAGIC)?;
        w.write_u64::<LittleEndian>(self.n_beams() as u64)?;
        w.write_u64::<LittleEndian>(self.n_angles() as u64)?;
        for v in self.a.iter() {
            w.write_f64::<LittleEndian>(*v)?;
        }
        Ok(())
    }

    pub fn save_to_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.save(std::io::BufWriter::new(file))
    }

    /// Reads the `CSGA1` format, rejecting nonfinite or negative entries.
    pub fn load<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)
            .map_err(|_| Error::Truncated("beam file shorter than its magic".into()))?;
        if &magic != BEAM_MAGIC {
            return Err(Error::BadMagic { found: String::from_utf8_lossy(&magic).into_owned() });
        }
        let m = r
            .read_u64::<LittleEndian>()
            .map_err(|_| Error::Truncated("beam file missing beam count".into()))? as usize;
        let n = r
            .read_u64::<LittleEndian>()
            .map_err(|_| Error::Truncated("beam file missing angle count".into()))? as usize;
        if m == 0 || n == 0 {
            return Err(Error::Corrupt(format!("beam file declares empty shape {m}x{n}")));
        }
        let total = m
            .checked_mul(n)
            .ok_or_else(|| Error::Corrupt("beam file shape overflows".into()))?;
        let mut data = Vec::with_capacity(total);
        for idx in 0..total {
            let v = r.read_f64::<LittleEndian>().map_err(|_| {
                Error::Truncated(format!("beam file ends after {idx} of {total} entries"))
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NumericInput(format!(
                    "beam entry {idx} is {v}, expected finite and >= 0"
                )));
            }
            data.push(v);
        }
        let a = Array2::from_shape_vec((m, n), data)
            .map_err(|e| Error::Corrupt(format!("beam file shape error: {e}")))?;
        Ok(Self { a, source: BeamSource::Loaded })
    }

    pub fn load_from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::load(std::io::BufReader::new(file))
    }
}

/// Array steering vector for the spatial angle `(theta, phi)`.
///
/// The entry for element `(y, z)` is
/// `exp(-j * 2*pi/lambda * (d_y * y * sin(theta) * sin(phi) + d_z * z * cos(theta)))`,
/// flattened as `t = y * n_z + z`. All entries have unit modulus.
pub fn steering_vector(config: &AntennaConfig, theta: f64, phi: f64) -> Result<Array1<Complex64>> {
    config.validate()?;
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::NumericInput(format!("steering angle ({theta}, {phi}) is nonfinite")));
    }
    let wave_number = 2.0 * std::f64::consts::PI / config.wavelength;
    let y_phase = config.d_y * theta.sin() * phi.sin();
    let z_phase = config.d_z * theta.cos();
    let mut out = Array1::zeros(config.n_elements());
    for y in 0..config.n_y {
        for z in 0..config.n_z {
            let phase = -wave_number * (y_phase * y as f64 + z_phase * z as f64);
            out[y * config.n_z + z] = Complex64::from_polar(1.0, phase);
        }
    }
    Ok(out)
}

/// Builds the beam pattern matrix entry-wise as
/// `A[m, n] = P * g_n^2 * |b_m^H s_n|^2`,
/// with `s_n` the steering vector of the `n`-th grid angle. Columns are
/// computed independently (optionally in parallel) into a fixed layout, so
/// the result is identical to sequential execution.
pub fn build_beam_pattern(config: &AntennaConfig, grid: &AngularGrid) -> Result<BeamPatternMatrix> {
    config.validate()?;
    let n = grid.n_angles();
    if config.gain.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "gain table has {} entries but the grid has {} angles",
            config.gain.len(),
            n
        )));
    }
    let m = config.n_beams();
    let columns: Vec<Vec<f64>> = par::map_range(n, |col| {
        let (theta, phi) = grid.angle(col);
        // validate() already ran; per-angle steering cannot fail past it
        let s = steering_vector(config, theta, phi).expect("validated config");
        let g2 = config.gain[col] * config.gain[col];
        (0..m)
            .map(|beam| {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..config.n_elements() {
                    acc += config.precoding[(t, beam)].conj() * s[t];
                }
                config.power_mw * g2 * acc.norm_sqr()
            })
            .collect()
    });
    let mut a = Array2::zeros((m, n));
    for (col, values) in columns.iter().enumerate() {
        for (row, v) in values.iter().enumerate() {
            a[(row, col)] = *v;
        }
    }
    BeamPatternMatrix::from_matrix(a, BeamSource::Computed)
}

/// Converts mW to dBm with the given floor: `10 * log10(max(mw, floor))`.
pub fn mw_to_dbm(mw: f64, floor_mw: f64) -> f64 {
    10.0 * mw.max(floor_mw).log10()
}

/// Converts dBm back to mW.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Evaluates the forward model `y_mw = A * x` and its floored dBm view.
pub fn forward_rsrp(
    a: &BeamPatternMatrix,
    x: &Array1<f64>,
    floor_mw: f64,
) -> Result<(Array1<f64>, Array1<f64>)> {
    if x.len() != a.n_angles() {
        return Err(Error::ShapeMismatch(format!(
            "CAPS has {} entries but the beam pattern has {} angles",
            x.len(),
            a.n_angles()
        )));
    }
    if !(floor_mw > 0.0) || !floor_mw.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "floor must be positive and finite, got {floor_mw}"
        )));
    }
    if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::NumericInput("CAPS entries must be finite and >= 0".into()));
    }
    let y_mw = a.matrix().dot(x);
    let y_dbm = y_mw.mapv(|v| mw_to_dbm(v, floor_mw));
    Ok((y_mw, y_dbm))
}
