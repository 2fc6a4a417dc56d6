//! Mixed-field Ising chain, its leading-order Schrieffer-Wolff effective
//! model, and the diagnostic dimer operator.
//!
//! ```text
//! H     = sum_i (mu/2) Z_i Z_{i+1} - t X_i - h Z_i
//! H_eff = sum_i (mu/2) Z_i Z_{i+1} - h Z_i - (t/2)(X_i - Z_{i-1} X_i Z_{i+1})
//! ```
//!
//! Both are built as dense blocks of a [`SectorBasis`] or applied matrix-free
//! to full `2^L` vectors. Boundary conditions are periodic.

use std::sync::Arc;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::basis::{check_len, mask, z_value, SectorBasis, DEFAULT_MAX_LEN};
use crate::error::{Error, Result};
use crate::scalar::Amplitude;

/// Full-space dense matrices above this length are refused.
pub const MAX_FULL_LEN: usize = 14;

/// Largest chain for which the generator is materialized.
pub const MAX_GENERATOR_LEN: usize = 12;

/// Couplings in units where the Ising coupling is `mu` (1 by default).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Transverse field.
    pub t: f64,
    /// Longitudinal field.
    pub h: f64,
    pub mu: f64,
}

impl ModelParams {
    pub fn new(t: f64, h: f64) -> Self {
        Self { t, h, mu: 1.0 }
    }

    pub fn with_mu(self, mu: f64) -> Self {
        Self { mu, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParams(format!("mu must be positive, got {}", self.mu)));
        }
        for (name, v) in [("t", self.t), ("h", self.h)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::new(0.0, 0.0)
    }
}

/// Which Hamiltonian to assemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// Transverse plus longitudinal field Ising chain.
    Ising,
    /// Domain-wall conserving effective model.
    Effective,
}

/// `D = sum_i Z_i Z_{i+1}` on a configuration.
#[inline]
pub fn dimer_count(config: u64, len: usize) -> i32 {
    let walls = (config ^ crate::basis::translate(config, len, 1)) & mask(len);
    len as i32 - 2 * walls.count_ones() as i32
}

/// `sum_i Z_i` on a configuration.
#[inline]
pub fn magnetization(config: u64, len: usize) -> i32 {
    2 * (config & mask(len)).count_ones() as i32 - len as i32
}

impl Model {
    /// Diagonal matrix element `<s|H|s>`.
    #[inline]
    pub fn diagonal(self, params: &ModelParams, config: u64, len: usize) -> f64 {
        0.5 * params.mu * dimer_count(config, len) as f64 - params.h * magnetization(config, len) as f64
    }

    /// Calls `f(target, element)` for every off-diagonal `<target|H|config>`.
    #[inline]
    pub fn for_each_offdiag(self, params: &ModelParams, config: u64, len: usize, mut f: impl FnMut(u64, f64)) {
        if params.t == 0.0 {
            return;
        }
        for i in 0..len {
            let target = config ^ (1 << i);
            match self {
                Model::Ising => f(target, -params.t),
                Model::Effective => {
                    let left = z_value(config, (i + len - 1) % len);
                    let right = z_value(config, (i + 1) % len);
                    // -(t/2)(1 - z_{i-1} z_{i+1}): flips only between domain walls
                    if left != right {
                        f(target, -params.t);
                    }
                }
            }
        }
    }
}

/// Dense Hamiltonian block on a symmetry sector.
#[derive(Clone, Debug)]
pub struct SectorMatrix<T> {
    basis: Arc<SectorBasis>,
    entries: Mat<T>,
}

impl<T: Amplitude> SectorMatrix<T> {
    pub fn new(basis: Arc<SectorBasis>, entries: Mat<T>) -> Result<Self> {
        let d = basis.dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: entries.nrows(),
            });
        }
        Ok(Self { basis, entries })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn entries(&self) -> &Mat<T> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `max |A_ij - conj(A_ji)| / max |A_ij|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut scale: f64 = 0.0;
        let mut err: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let a = self.entries[(i, j)];
                scale = scale.max(a.norm_sqr().sqrt());
                err = err.max((a - self.entries[(j, i)].conjugate()).norm_sqr().sqrt());
            }
        }
        if scale > 0.0 {
            err / scale
        } else {
            0.0
        }
    }

    /// Applies the block to sector coefficients.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut out = vec![T::zero(); n];
        for (j, &vj) in v.iter().enumerate() {
            let col = self.entries.col(j);
            for (o, &a) in out.iter_mut().zip(col.iter()) {
                *o += a * vj;
            }
        }
        out
    }
}

/// Assembles `model` on `basis`.
///
/// Row `b` follows from `H` acting on the representative `r_b`:
/// `M[b, b'] = sum_{s in b'} <r_b|H|s> <s|b'> / <r_b|b>`.
pub fn build_sector<T: Amplitude>(
    model: Model,
    params: &ModelParams,
    basis: &Arc<SectorBasis>,
) -> Result<SectorMatrix<T>> {
    basis.check_scalar::<T>()?;
    let len = basis.len();
    let n = basis.dim();
    let mut entries = Mat::<T>::zeros(n, n);
    for (b, &rep) in basis.representatives().iter().enumerate() {
        entries[(b, b)] += T::from_real(model.diagonal(params, rep, len));
        let self_amp = 1.0 / basis.norms()[b].sqrt();
        model.for_each_offdiag(params, rep, len, |target, element| {
            if let Some((b2, amp)) = basis.locate_as::<T>(target) {
                entries[(b, b2)] += amp * (element / self_amp);
            }
        });
    }
    Ok(SectorMatrix {
        basis: Arc::clone(basis),
        entries,
    })
}

pub fn build_ising<T: Amplitude>(params: &ModelParams, basis: &Arc<SectorBasis>) -> Result<SectorMatrix<T>> {
    build_sector(Model::Ising, params, basis)
}

pub fn build_effective<T: Amplitude>(params: &ModelParams, basis: &Arc<SectorBasis>) -> Result<SectorMatrix<T>> {
    build_sector(Model::Effective, params, basis)
}

/// The dimer operator as a (diagonal) block.
pub fn build_dimer<T: Amplitude>(basis: &Arc<SectorBasis>) -> Result<SectorMatrix<T>> {
    basis.check_scalar::<T>()?;
    let n = basis.dim();
    let len = basis.len();
    let mut entries = Mat::<T>::zeros(n, n);
    for (b, &rep) in basis.representatives().iter().enumerate() {
        entries[(b, b)] = T::from_real(dimer_count(rep, len) as f64);
    }
    Ok(SectorMatrix {
        basis: Arc::clone(basis),
        entries,
    })
}

/// Dense `2^L x 2^L` matrix in the computational basis.
pub fn build_full(model: Model, params: &ModelParams, len: usize) -> Result<Mat<f64>> {
    check_len(len, MAX_FULL_LEN)?;
    let size = 1usize << len;
    let mut m = Mat::<f64>::zeros(size, size);
    for s in 0..size {
        m[(s, s)] = model.diagonal(params, s as u64, len);
        model.for_each_offdiag(params, s as u64, len, |target, element| {
            m[(target as usize, s)] += element;
        });
    }
    Ok(m)
}

/// Matrix-free `H |psi>` on a full-basis vector.
pub fn apply_full<T: Amplitude>(model: Model, params: &ModelParams, len: usize, state: &[T]) -> Result<Vec<T>> {
    check_len(len, DEFAULT_MAX_LEN)?;
    let size = 1usize << len;
    if state.len() != size {
        return Err(Error::DimensionMismatch {
            expected: size,
            found: state.len(),
        });
    }
    let mut out = vec![T::zero(); size];
    for (s, &a) in state.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        out[s] += a * model.diagonal(params, s as u64, len);
        model.for_each_offdiag(params, s as u64, len, |target, element| {
            out[target as usize] += a * element;
        });
    }
    Ok(out)
}

/// Full-space Schrieffer-Wolff generator
///
/// ```text
/// S = (-i t / 2 mu) sum_j [ P+_{j-1} Y_j P+_{j+1} - P-_{j-1} Y_j P-_{j+1} ],  P+- = (1 +- Z)/2
/// ```
///
/// With `Z|1> = |1>` the combination `-iY` is the real matrix mapping
/// `|0> -> -|1>` and `|1> -> |0>`, so `S` is real antisymmetric.
pub fn build_sw_generator(params: &ModelParams, len: usize) -> Result<Mat<f64>> {
    check_len(len, MAX_GENERATOR_LEN)?;
    let size = 1usize << len;
    let scale = params.t / (2.0 * params.mu);
    let mut s_mat = Mat::<f64>::zeros(size, size);
    if params.t == 0.0 {
        return Ok(s_mat);
    }
    for s in 0..size as u64 {
        for j in 0..len {
            let left = z_value(s, (j + len - 1) % len);
            let right = z_value(s, (j + 1) % len);
            if left != right {
                continue;
            }
            let projector_sign = left; // +1 for P+P+, -1 for P-P-
                                       // -iY: |1> -> |0> with +1, |0> -> |1> with -1
            let y = if s >> j & 1 == 1 { 1.0 } else { -1.0 };
            let target = s ^ (1 << j);
            s_mat[(target as usize, s as usize)] += scale * projector_sign * y;
        }
    }
    Ok(s_mat)
}

/// Projects a full-space matrix onto the blocks of fixed dimer number.
pub fn dimer_block_diagonal(m: &Mat<f64>, len: usize) -> Mat<f64> {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| {
        if dimer_count(i as u64, len) == dimer_count(j as u64, len) {
            m[(i, j)]
        } else {
            0.0
        }
    })
}
