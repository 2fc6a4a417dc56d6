//! Quench fidelity `F(tau) = |<psi(0)|psi(tau)>|^2` from the spectral
//! decomposition of a sector block.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{SectorBasis, SymmetrySector};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_ising, ModelParams};
use crate::scalar::{normalize, Amplitude};
use crate::scars::{scar_state_real, ScarLabel, Tower};
use crate::spectral::{diagonalize, EigenSolution};

const UNITARITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub len: usize,
    pub params: Option<ModelParams>,
}

impl FidelityTrace {
    /// Mean fidelity over the second half of the time window.
    pub fn long_time_mean(&self) -> f64 {
        let tail = &self.fidelity[self.fidelity.len() / 2..];
        tail.iter().sum::<f64>() / tail.len().max(1) as f64
    }

    /// Local maxima at times `>= after`, as `(time, value)`.
    pub fn peaks_after(&self, after: f64) -> Vec<(f64, f64)> {
        let f = &self.fidelity;
        (1..f.len().saturating_sub(1))
            .filter(|&i| self.times[i] >= after && f[i] > f[i - 1] && f[i] >= f[i + 1])
            .map(|i| (self.times[i], f[i]))
            .collect()
    }

    /// Time at which the fidelity first drops below `level`.
    pub fn first_below(&self, level: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.fidelity)
            .find(|(_, &f)| f < level)
            .map(|(&t, _)| t)
    }
}

/// `tau = 0, dt, ..., t_max`.
pub fn time_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let n = (t_max / dt + 1e-9).floor() as usize;
    (0..=n).map(|i| i as f64 * dt).collect()
}

/// `tau in [0, 50]` with step `0.05`.
pub fn default_time_grid() -> Vec<f64> {
    time_grid(50.0, 0.05)
}

/// `(|S_0> + |S_2>)/sqrt 2` of the antimagnon tower, in the full basis.
pub fn prepare_initial(len: usize) -> Result<Vec<f64>> {
    if len < 4 {
        return Err(Error::InvalidLength(len));
    }
    let a = scar_state_real(
        ScarLabel {
            tower: Tower::Antimagnon,
            n: 0,
        },
        len,
    )?;
    let b = scar_state_real(
        ScarLabel {
            tower: Tower::Antimagnon,
            n: 2,
        },
        len,
    )?;
    let mut v: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    normalize(&mut v);
    Ok(v)
}

/// Exact fidelity of `state0` (sector coordinates) under the Hamiltonian
/// whose eigenpairs are `solution`.
pub fn evolve_fidelity<T: Amplitude>(
    state0: &[T],
    solution: &EigenSolution<T>,
    times: &[f64],
) -> Result<FidelityTrace> {
    let overlaps = solution.overlaps(state0)?;
    let weights: Vec<f64> = overlaps.iter().map(|o| o * o).collect();
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > UNITARITY_TOLERANCE {
        return Err(Error::NotNormalized(total.sqrt()));
    }
    let energies = solution.energies();
    let fidelity = times
        .iter()
        .map(|&tau| {
            let amp: Complex64 = weights
                .iter()
                .zip(energies)
                .filter(|(w, _)| **w > 0.0)
                .map(|(&w, &e)| Complex64::from_polar(w, -e * tau))
                .sum();
            amp.norm_sqr()
        })
        .collect();
    Ok(FidelityTrace {
        times: times.to_vec(),
        fidelity,
        len: solution.basis().len(),
        params: None,
    })
}

/// One fidelity trace of the prepared scar superposition per parameter set.
pub fn quench_experiment(params_list: &[ModelParams], len: usize, times: &[f64]) -> Result<Vec<FidelityTrace>> {
    let basis = Arc::new(SectorBasis::new(len, SymmetrySector::zero_even())?);
    let initial = basis.from_full(&prepare_initial(len)?)?;
    params_list
        .par_iter()
        .map(|params| {
            params.validate()?;
            let sol = diagonalize(&build_ising::<f64>(params, &basis)?)?;
            let mut trace = evolve_fidelity(&initial, &sol, times)?;
            trace.params = Some(*params);
            Ok(trace)
        })
        .collect()
}
