//! Magnon and antimagnon scar towers.
//!
//! Each tower is generated from a fully polarized vacuum by the staggered
//! ladder operator
//!
//! ```text
//! Q^dag = sum_i (-1)^i P_{i-1} (X_i - s i Y_i) P_{i+1}
//! ```
//!
//! where `P` projects a site onto the vacuum's local spin and `s = -1` for
//! magnons over `|0...0>` (so the bracket is `2 sigma^+`) and `s = +1` for
//! antimagnons over `|1...1>` (`2 sigma^-`). The normalized states are
//! `|S_n> = (Q^dag)^n |vacuum> / (n! sqrt(N(L, n)))`.
//!
//! The staggering origin only flips the overall sign of `Q^dag`, which
//! leaves even-`n` states unchanged.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{check_len, mask, SectorBasis, DEFAULT_MAX_LEN};
use crate::error::{Error, Result};
use crate::hamiltonian::ModelParams;
use crate::scalar::{norm, strip_phase};

/// Squared norms below this mark a tower as exhausted.
const VANISHING_NORM: f64 = 1e-20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tower {
    /// Excitations over the all-down vacuum.
    Magnon,
    /// Excitations over the all-up vacuum.
    Antimagnon,
}

impl Tower {
    /// Spin value (bit) of the vacuum on every site.
    pub fn vacuum_bit(self) -> u64 {
        match self {
            Tower::Magnon => 0,
            Tower::Antimagnon => 1,
        }
    }

    /// Computational basis index of the vacuum.
    pub fn vacuum_config(self, len: usize) -> u64 {
        match self {
            Tower::Magnon => 0,
            Tower::Antimagnon => mask(len),
        }
    }

    /// The single-site bracket `X - s i Y` as a 2x2 matrix in the
    /// `(|0>, |1>)` basis, entries `[row][col]`.
    fn site_operator(self) -> [[Complex64; 2]; 2] {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        // |1> is Z = +1: X = [[0,1],[1,0]], Y = [[0, i],[-i, 0]] in (|0>, |1>)
        let x = [[zero, one], [one, zero]];
        let y = [[zero, i], [-i, zero]];
        let s = match self {
            Tower::Magnon => -1.0,
            Tower::Antimagnon => 1.0,
        };
        let mut out = [[zero; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = x[r][c] - i * y[r][c] * s;
            }
        }
        out
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tower::Magnon => "magnon",
            Tower::Antimagnon => "antimagnon",
        })
    }
}

impl FromStr for Tower {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "magnon" | "1" => Ok(Tower::Magnon),
            "antimagnon" | "2" => Ok(Tower::Antimagnon),
            other => Err(Error::InvalidLabel(format!("unknown tower {other:?}"))),
        }
    }
}

/// A member of a scar tower; `n` is the even excitation number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScarLabel {
    pub tower: Tower,
    pub n: usize,
}

impl ScarLabel {
    pub fn new(tower: Tower, n: usize) -> Result<Self> {
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidLabel(format!("excitation number {n} is odd")));
        }
        Ok(Self { tower, n })
    }

    /// Energy under the effective model, `mu L/2 -+ h L - n (2 mu +- 2 h)`.
    pub fn effective_energy(&self, params: &ModelParams, len: usize) -> f64 {
        tower_energy(self.tower, self.n, params, len)
    }
}

impl fmt::Display for ScarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tower, self.n)
    }
}

/// Largest excitation number with a nonvanishing state.
pub fn max_excitations(len: usize) -> usize {
    len / 2
}

/// All valid even labels of a tower on a chain of length `len`.
pub fn tower_labels(tower: Tower, len: usize) -> Vec<ScarLabel> {
    (0..=max_excitations(len))
        .step_by(2)
        .map(|n| ScarLabel { tower, n })
        .collect()
}

pub fn tower_energy(tower: Tower, n: usize, params: &ModelParams, len: usize) -> f64 {
    let (mu, h, l, n) = (params.mu, params.h, len as f64, n as f64);
    match tower {
        Tower::Magnon => 0.5 * mu * l + h * l - n * (2.0 * mu + 2.0 * h),
        Tower::Antimagnon => 0.5 * mu * l - h * l - n * (2.0 * mu - 2.0 * h),
    }
}

/// The vacuum as a full-basis vector.
pub fn build_vacuum(tower: Tower, len: usize) -> Result<Vec<Complex64>> {
    check_len(len, DEFAULT_MAX_LEN)?;
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << len];
    v[tower.vacuum_config(len) as usize] = Complex64::new(1.0, 0.0);
    Ok(v)
}

/// One application of the ladder operator (unnormalized).
pub fn apply_ladder(tower: Tower, state: &[Complex64], len: usize) -> Result<Vec<Complex64>> {
    check_len(len, DEFAULT_MAX_LEN)?;
    if state.len() != 1 << len {
        return Err(Error::DimensionMismatch {
            expected: 1 << len,
            found: state.len(),
        });
    }
    let op = tower.site_operator();
    let vac = tower.vacuum_bit();
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (s, &a) in state.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let s = s as u64;
        for i in 0..len {
            let left = (s >> ((i + len - 1) % len)) & 1;
            let right = (s >> ((i + 1) % len)) & 1;
            if left != vac || right != vac {
                continue;
            }
            let stagger = if i % 2 == 0 { 1.0 } else { -1.0 };
            let bit = ((s >> i) & 1) as usize;
            for (new_bit, row) in op.iter().enumerate() {
                let element = row[bit];
                if element.norm_sqr() == 0.0 {
                    continue;
                }
                let target = (s & !(1 << i)) | ((new_bit as u64) << i);
                out[target as usize] += a * element * stagger;
            }
        }
    }
    Ok(out)
}

/// Normalized `|S_n>` and the constant `N(L, n)`, the squared norm of
/// `(Q^dag)^n |vacuum> / n!`.
pub fn scar_state(label: ScarLabel, len: usize) -> Result<(Vec<Complex64>, f64)> {
    let label = ScarLabel::new(label.tower, label.n)?;
    let mut v = build_vacuum(label.tower, len)?;
    for step in 1..=label.n {
        v = apply_ladder(label.tower, &v, len)?;
        let inv = 1.0 / step as f64;
        for x in v.iter_mut() {
            *x *= inv;
        }
    }
    let nrm = norm(&v);
    let constant = nrm * nrm;
    if constant < VANISHING_NORM {
        return Err(Error::VanishingState { n: label.n, len });
    }
    for x in v.iter_mut() {
        *x /= nrm;
    }
    Ok((v, constant))
}

/// `|S_n>` as a real vector (global phase removed).
pub fn scar_state_real(label: ScarLabel, len: usize) -> Result<Vec<f64>> {
    let (v, _) = scar_state(label, len)?;
    Ok(strip_phase(&v).0)
}

/// `|S_n>` expressed in a real sector basis, plus the norm of that
/// projection (1 when the state lies inside the sector).
pub fn scar_in_sector(label: ScarLabel, basis: &SectorBasis) -> Result<(Vec<f64>, f64)> {
    let full = scar_state_real(label, basis.len())?;
    let coeffs = basis.from_full(&full)?;
    let weight = norm(&coeffs);
    Ok((coeffs, weight))
}

/// Closed form of `N(L, n) = 4^n L/(L-n) C(L-n, n)`: `n` non-adjacent
/// excitations on a ring, each carrying amplitude 2.
pub fn norm_constant_formula(len: usize, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if 2 * n > len {
        return 0.0;
    }
    let mut binom = 1.0;
    for j in 0..n {
        binom *= (len - n - j) as f64 / (j + 1) as f64;
    }
    4f64.powi(n as i32) * len as f64 / (len - n) as f64 * binom
}
