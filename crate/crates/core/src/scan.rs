//! Grid scan over `(t, h)`: gap-ratio statistics, lowest mid-spectrum
//! entanglement, and a ground-state order parameter.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{check_len, z_value, SectorBasis, SymmetrySector, DEFAULT_MAX_LEN};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_ising, ModelParams};
use crate::scalar::Amplitude;
use crate::spectral::{diagonalize, gap_ratio, s_rmt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Ergodic level statistics with anomalously low-entropy states.
    QmbsPossible,
    /// Ergodic and no low-entropy states.
    ChaoticNoScars,
    /// Non-ergodic statistics with low-entropy states.
    Mixed,
    /// Non-ergodic statistics without low-entropy states.
    NonergodicHighEntropy,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::QmbsPossible => "QMBS-possible",
            Region::ChaoticNoScars => "chaotic-no-scars",
            Region::Mixed => "mixed",
            Region::NonergodicHighEntropy => "nonergodic-high-S",
        })
    }
}

/// Charge confinement (paramagnetic dual) or deconfinement
/// (antiferromagnetic dual).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Confinement {
    CC,
    CD,
}

impl fmt::Display for Confinement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Confinement::CC => "CC",
            Confinement::CD => "CD",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Mean gap ratio above which a point counts as ergodic.
    pub gap_ratio: f64,
    /// Relative entropy below which a state counts as low-entangled.
    pub entropy: f64,
    /// Staggered structure factor above which the ground state counts as ordered.
    pub structure_factor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            gap_ratio: 0.5,
            entropy: 0.5,
            structure_factor: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub len: usize,
    pub t_values: Vec<f64>,
    pub h_values: Vec<f64>,
    pub mu: f64,
    pub trim: f64,
    /// Central fraction of the spectrum searched for low-entropy states.
    pub mid_fraction: f64,
    pub thresholds: Thresholds,
}

impl ScanConfig {
    /// `t, h` in `(0, 1.5]` with step `0.05`.
    pub fn new(len: usize) -> Self {
        let axis = grid_axis(0.05, 1.5, 0.05);
        Self {
            len,
            t_values: axis.clone(),
            h_values: axis,
            mu: 1.0,
            trim: 0.1,
            mid_fraction: 0.5,
            thresholds: Thresholds::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_len(self.len, DEFAULT_MAX_LEN)?;
        if self
            .t_values
            .iter()
            .chain(&self.h_values)
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(Error::InvalidParams(
                "grid values must be finite and non-negative".into(),
            ));
        }
        if !(self.mid_fraction > 0.0 && self.mid_fraction <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "mid fraction {} outside (0, 1]",
                self.mid_fraction
            )));
        }
        Ok(())
    }
}

/// `start, start + step, ...` up to and including `stop`.
pub fn grid_axis(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub t: f64,
    pub h: f64,
    pub r_mean: f64,
    pub s_min_rel: f64,
    pub region: Region,
    pub confinement: Confinement,
    pub structure_factor: f64,
}

pub fn classify_point(r_mean: f64, s_min_rel: f64, thresholds: &Thresholds) -> Region {
    let ergodic = r_mean > thresholds.gap_ratio;
    let low = s_min_rel < thresholds.entropy;
    match (ergodic, low) {
        (true, true) => Region::QmbsPossible,
        (true, false) => Region::ChaoticNoScars,
        (false, true) => Region::Mixed,
        (false, false) => Region::NonergodicHighEntropy,
    }
}

/// `(1/L^2) sum_ij (-1)^(i-j) <Z_i Z_j>` of a full-basis state.
pub fn staggered_structure_factor<T: Amplitude>(state: &[T], len: usize) -> f64 {
    state
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(s, a)| {
            let m: f64 = (0..len)
                .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * z_value(s as u64, i))
                .sum();
            a.norm_sqr() * m * m
        })
        .sum::<f64>()
        / (len * len) as f64
}

pub fn confinement_label<T: Amplitude>(ground_state: &[T], len: usize, threshold: f64) -> (Confinement, f64) {
    let s = staggered_structure_factor(ground_state, len);
    (
        if s > threshold {
            Confinement::CD
        } else {
            Confinement::CC
        },
        s,
    )
}

fn scan_point_in(basis: &Arc<SectorBasis>, t: f64, h: f64, config: &ScanConfig) -> Result<ScanPoint> {
    let params = ModelParams::new(t, h).with_mu(config.mu);
    let sol = diagonalize(&build_ising::<f64>(&params, basis)?)?;
    let r_mean = gap_ratio(sol.energies(), config.trim)?;
    let n = sol.len();
    let skip = ((1.0 - config.mid_fraction) / 2.0 * n as f64).floor() as usize;
    let baseline = s_rmt(config.len);
    let s_min_rel = (skip..n - skip)
        .map(|i| sol.entropy(i) / baseline)
        .fold(f64::INFINITY, f64::min);
    let (confinement, structure_factor) =
        confinement_label(&sol.full_vector(0), config.len, config.thresholds.structure_factor);
    Ok(ScanPoint {
        t,
        h,
        r_mean,
        s_min_rel,
        region: classify_point(r_mean, s_min_rel, &config.thresholds),
        confinement,
        structure_factor,
    })
}

/// Evaluates a single grid point.
pub fn scan_point(t: f64, h: f64, config: &ScanConfig) -> Result<ScanPoint> {
    config.validate()?;
    let basis = Arc::new(SectorBasis::new(config.len, SymmetrySector::zero_even())?);
    scan_point_in(&basis, t, h, config)
}

/// Evaluates every `(t, h)` pair in parallel; output is ordered by `t`, then `h`.
pub fn scan_grid(config: &ScanConfig) -> Result<Vec<ScanPoint>> {
    config.validate()?;
    let basis = Arc::new(SectorBasis::new(config.len, SymmetrySector::zero_even())?);
    let pairs: Vec<(f64, f64)> = config
        .t_values
        .iter()
        .flat_map(|&t| config.h_values.iter().map(move |&h| (t, h)))
        .collect();
    pairs
        .par_iter()
        .map(|&(t, h)| scan_point_in(&basis, t, h, config))
        .collect()
}

/// Points labelled both QMBS-possible and confined.
pub fn confined_scar_points(points: &[ScanPoint]) -> Vec<ScanPoint> {
    points
        .iter()
        .filter(|p| p.region == Region::QmbsPossible && p.confinement == Confinement::CC)
        .copied()
        .collect()
}
