//! Dense diagonalization of sector blocks, mean gap ratio, and half-chain
//! entanglement entropy.

use std::sync::Arc;

use faer::{Mat, Side};
use rayon::prelude::*;

use crate::basis::SectorBasis;
use crate::error::{Error, Result};
use crate::hamiltonian::SectorMatrix;
use crate::scalar::{norm, Amplitude};

/// Singular values below this are dropped from the entropy sum.
const SCHMIDT_CUTOFF: f64 = 1e-12;
/// Relative gap size treated as an exact degeneracy.
const DEGENERATE_GAP: f64 = 1e-12;
const NORM_TOLERANCE: f64 = 1e-8;

/// Eigenpairs of a sector block, energies ascending.
#[derive(Clone, Debug)]
pub struct EigenSolution<T> {
    energies: Vec<f64>,
    vectors: Mat<T>,
    basis: Arc<SectorBasis>,
}

impl<T: Amplitude> EigenSolution<T> {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &Mat<T> {
        &self.vectors
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Eigenvector `i` in sector coordinates.
    pub fn vector(&self, i: usize) -> Vec<T> {
        self.vectors.col(i).iter().copied().collect()
    }

    /// Eigenvector `i` unfolded to the `2^L` computational basis.
    pub fn full_vector(&self, i: usize) -> Vec<T> {
        self.basis
            .to_full(&self.vector(i))
            .expect("eigenvector length matches its basis")
    }

    /// `|<v_i|state>|` for every eigenvector, with `state` in sector coordinates.
    pub fn overlaps(&self, state: &[T]) -> Result<Vec<f64>> {
        if state.len() != self.vectors.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.vectors.nrows(),
                found: state.len(),
            });
        }
        Ok((0..self.len())
            .map(|i| {
                let col = self.vectors.col(i);
                let mut acc = T::zero();
                for (&v, &s) in col.iter().zip(state) {
                    acc += v.conjugate() * s;
                }
                acc.norm_sqr().sqrt()
            })
            .collect())
    }

    /// Half-chain entropy of eigenstate `i`.
    pub fn entropy(&self, i: usize) -> f64 {
        entanglement_entropy(&self.full_vector(i), self.basis.len()).expect("eigenvectors are normalized")
    }

    /// Half-chain entropies of all eigenstates, evaluated in parallel.
    pub fn entropies(&self) -> Vec<f64> {
        (0..self.len()).into_par_iter().map(|i| self.entropy(i)).collect()
    }

    /// `max |V^dag V - 1|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.vectors.ncols();
        let gram = self.vectors.adjoint() * &self.vectors;
        let mut err: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let target = if i == j { T::from_real(1.0) } else { T::zero() };
                err = err.max((gram[(i, j)] - target).norm_sqr().sqrt());
            }
        }
        err
    }

    /// `max |H V - V Lambda| / max |H|`.
    pub fn residual(&self, matrix: &SectorMatrix<T>) -> f64 {
        let h = matrix.entries();
        let hv = h * &self.vectors;
        let mut err: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for j in 0..self.len() {
            for i in 0..h.nrows() {
                scale = scale.max(h[(i, j)].norm_sqr().sqrt());
                let d = hv[(i, j)] - self.vectors[(i, j)] * self.energies[j];
                err = err.max(d.norm_sqr().sqrt());
            }
        }
        if scale > 0.0 {
            err / scale
        } else {
            err
        }
    }
}

/// Full eigendecomposition of a Hermitian block.
pub fn diagonalize<T: Amplitude>(matrix: &SectorMatrix<T>) -> Result<EigenSolution<T>> {
    let (energies, vectors) = eigh(matrix.entries())?;
    Ok(EigenSolution {
        energies,
        vectors,
        basis: Arc::clone(matrix.basis()),
    })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues<T: Amplitude>(matrix: &SectorMatrix<T>) -> Result<Vec<f64>> {
    eigvalsh(matrix.entries())
}

/// Eigenpairs of a dense Hermitian matrix, ascending.
pub fn eigh<T: Amplitude>(m: &Mat<T>) -> Result<(Vec<f64>, Mat<T>)> {
    if m.nrows() == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let evd = m.self_adjoint_eigen(Side::Lower)?;
    let energies: Vec<f64> = evd.S().column_vector().iter().map(|x| x.to_complex().re).collect();
    Ok((energies, evd.U().to_owned()))
}

pub fn eigvalsh<T: Amplitude>(m: &Mat<T>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    Ok(m.self_adjoint_eigenvalues(Side::Lower)?)
}

/// Mean adjacent gap ratio after dropping `floor(trim_fraction * n)`
/// levels from each spectral edge. Exactly degenerate gap pairs count as `r = 0`.
pub fn gap_ratio(energies: &[f64], trim_fraction: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(Error::InvalidParams(format!(
            "trim fraction {trim_fraction} outside [0, 0.5)"
        )));
    }
    let n = energies.len();
    let cut = (trim_fraction * n as f64).floor() as usize;
    let kept = &energies[cut.min(n)..n.saturating_sub(cut).max(cut.min(n))];
    if kept.len() < 3 {
        return Err(Error::TooFewLevels(kept.len()));
    }
    let bandwidth = energies[n - 1] - energies[0];
    let tiny = DEGENERATE_GAP * bandwidth.abs().max(f64::MIN_POSITIVE);
    let gaps: Vec<f64> = kept.windows(2).map(|w| w[1] - w[0]).collect();
    let total: f64 = gaps
        .windows(2)
        .map(|g| {
            let (lo, hi) = if g[0] < g[1] { (g[0], g[1]) } else { (g[1], g[0]) };
            if lo <= tiny {
                0.0
            } else {
                lo / hi
            }
        })
        .sum();
    Ok(total / (gaps.len() - 1) as f64)
}

/// Von Neumann entropy of sites `0..L/2` for a normalized `2^L` state.
pub fn entanglement_entropy<T: Amplitude>(state: &[T], len: usize) -> Result<f64> {
    crate::basis::check_len(len, crate::basis::DEFAULT_MAX_LEN)?;
    if state.len() != 1usize << len {
        return Err(Error::DimensionMismatch {
            expected: 1 << len,
            found: state.len(),
        });
    }
    let nrm = norm(state);
    if (nrm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(nrm));
    }
    let half = len / 2;
    let side = 1usize << half;
    // row: sites 0..half (low bits), column: the remaining sites
    let psi = Mat::<T>::from_fn(side, side, |i, j| state[i | (j << half)]);
    let singular = psi.singular_values()?;
    Ok(singular
        .into_iter()
        .filter(|&s| s > SCHMIDT_CUTOFF)
        .map(|s| {
            let p = s * s;
            -p * p.ln()
        })
        .sum())
}

/// Random-matrix baseline `(L/2) ln 2 + (1/2 + ln(1/2))/2 - 1/2` for the
/// half-chain entropy of mid-spectrum states.
pub fn s_rmt(len: usize) -> f64 {
    0.5 * len as f64 * std::f64::consts::LN_2 + 0.5 * (0.5 + 0.5f64.ln()) - 0.5
}
