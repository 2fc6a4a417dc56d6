//! The Kitaev chain minimally coupled to a Z2 gauge field, its Gauss law,
//! and a numerical check of the duality to the mixed-field Ising chain.
//!
//! ```text
//! H = sum_j -t (c+_j - c_j) sz_{j+1/2} (c+_{j+1} + c_{j+1}) - mu (n_j - 1/2) - h sx_{j+1/2}
//! G_j = sx_{j-1/2} (-1)^{n_j} sx_{j+1/2}
//! ```
//!
//! A basis index packs the fermion occupations in bits `0..L` and the link
//! spins in bits `L..2L`; link `j` sits between sites `j` and `j+1`, and a
//! clear link bit is `sz = +1`. Fermions are periodic (`c_L = c_0`) and the
//! Jordan-Wigner string of mode `j` counts occupied modes that precede it in
//! the ordering starting at the string origin.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::basis::check_len;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_full, Model, ModelParams};
use crate::spectral::{eigh, eigvalsh};

pub const MAX_GAUGE_LEN: usize = 6;

/// Spectra agreeing to this accuracy count as dual.
pub const DUALITY_TOLERANCE: f64 = 1e-10;

/// A basis state of fermions plus link spins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GaugeConfiguration {
    pub occupations: u64,
    pub links: u64,
}

impl GaugeConfiguration {
    pub fn from_index(index: usize, len: usize) -> Self {
        let index = index as u64;
        let m = (1u64 << len) - 1;
        Self {
            occupations: index & m,
            links: (index >> len) & m,
        }
    }

    pub fn index(&self, len: usize) -> usize {
        (self.occupations | (self.links << len)) as usize
    }

    pub fn fermion_parity(&self) -> i32 {
        if self.occupations.count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Demanded eigenvalue of each `G_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussSector {
    signs: Vec<i8>,
}

impl GaussSector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidSector(format!("Gauss signs must be +-1, got {signs:?}")));
        }
        Ok(Self { signs })
    }

    /// No background charges.
    pub fn uniform(len: usize) -> Self {
        Self { signs: vec![1; len] }
    }

    /// A single background charge at site `site`.
    pub fn with_charge(len: usize, site: usize) -> Self {
        let mut signs = vec![1; len];
        signs[site % len] = -1;
        Self { signs }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Enumerates all `2^L` sign choices.
    pub fn all(len: usize) -> Vec<Self> {
        (0..1u32 << len)
            .map(|m| Self {
                signs: (0..len).map(|j| if m >> j & 1 == 1 { -1 } else { 1 }).collect(),
            })
            .collect()
    }

    /// Fermion parity forced by the sector, since `prod_j G_j = (-1)^N`.
    pub fn fermion_parity(&self) -> i32 {
        self.signs.iter().map(|&s| s as i32).product()
    }
}

impl std::fmt::Display for GaussSector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = self.signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
        write!(f, "[{s}]")
    }
}

/// Sign and bit flip of `c+_j +- c_j` on an occupation pattern, with the
/// Jordan-Wigner string measured from `origin`.
fn majorana(occ: u64, j: usize, len: usize, origin: usize, minus: bool) -> (u64, f64) {
    let mut string = 0u32;
    let mut k = origin;
    while k != j {
        string += ((occ >> k) & 1) as u32;
        k = (k + 1) % len;
    }
    let mut sign = if string.is_multiple_of(2) { 1.0 } else { -1.0 };
    if minus && (occ >> j) & 1 == 1 {
        sign = -sign;
    }
    (occ ^ (1 << j), sign)
}

/// Dense gauged Kitaev Hamiltonian on the full `4^L` space.
pub fn build_gauged_kitaev(params: &ModelParams, len: usize) -> Result<Mat<f64>> {
    build_gauged_kitaev_with_origin(params, len, 0)
}

/// As [`build_gauged_kitaev`] with the Jordan-Wigner ordering starting at
/// site `origin`.
pub fn build_gauged_kitaev_with_origin(params: &ModelParams, len: usize, origin: usize) -> Result<Mat<f64>> {
    check_len(len, MAX_GAUGE_LEN)?;
    let size = 1usize << (2 * len);
    let origin = origin % len;
    let mut h = Mat::<f64>::zeros(size, size);
    for index in 0..size {
        let cfg = GaugeConfiguration::from_index(index, len);
        let mut diag = 0.0;
        for j in 0..len {
            let n = ((cfg.occupations >> j) & 1) as f64;
            diag -= params.mu * (n - 0.5);
            let flipped = GaugeConfiguration {
                links: cfg.links ^ (1 << j),
                ..cfg
            };
            h[(flipped.index(len), index)] -= params.h;

            let next = (j + 1) % len;
            let (occ, s1) = majorana(cfg.occupations, next, len, origin, false);
            let sz = if (cfg.links >> j) & 1 == 0 { 1.0 } else { -1.0 };
            let (occ, s2) = majorana(occ, j, len, origin, true);
            let target = GaugeConfiguration {
                occupations: occ,
                links: cfg.links,
            };
            h[(target.index(len), index)] -= params.t * s1 * s2 * sz;
        }
        h[(index, index)] += diag;
    }
    Ok(h)
}

/// `G_j` as a signed permutation: target index and sign.
fn apply_gauss(index: usize, j: usize, len: usize) -> (usize, f64) {
    let cfg = GaugeConfiguration::from_index(index, len);
    let left = (j + len - 1) % len;
    let links = cfg.links ^ (1 << left) ^ (1 << j);
    let sign = if (cfg.occupations >> j) & 1 == 1 { -1.0 } else { 1.0 };
    (GaugeConfiguration { links, ..cfg }.index(len), sign)
}

/// Dense `G_j`.
pub fn gauss_operator(j: usize, len: usize) -> Result<Mat<f64>> {
    check_len(len, MAX_GAUGE_LEN)?;
    let size = 1usize << (2 * len);
    let mut g = Mat::<f64>::zeros(size, size);
    for index in 0..size {
        let (target, sign) = apply_gauss(index, j, len);
        g[(target, index)] = sign;
    }
    Ok(g)
}

/// Column `index` of the projector `prod_j (1 + s_j G_j)/2`, as a sparse
/// list of `(row, value)`.
fn projector_column(sector: &GaussSector, index: usize, len: usize) -> Vec<(usize, f64)> {
    let weight = 1.0 / (1u64 << len) as f64;
    let mut column: Vec<(usize, f64)> = Vec::with_capacity(1 << len);
    // expand the product over all subsets of generators
    for subset in 0..1u32 << len {
        let mut idx = index;
        let mut amp = weight;
        for j in 0..len {
            if subset >> j & 1 == 1 {
                let (t, s) = apply_gauss(idx, j, len);
                idx = t;
                amp *= s * sector.signs[j] as f64;
            }
        }
        match column.iter_mut().find(|(r, _)| *r == idx) {
            Some(entry) => entry.1 += amp,
            None => column.push((idx, amp)),
        }
    }
    column.retain(|&(_, v)| v.abs() > 1e-14);
    column
}

/// Dense projector onto the simultaneous `G_j = s_j` eigenspace.
pub fn gauss_projector(sector: &GaussSector, len: usize) -> Result<Mat<f64>> {
    check_len(len, MAX_GAUGE_LEN)?;
    if sector.signs.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: sector.signs.len(),
        });
    }
    let size = 1usize << (2 * len);
    let mut p = Mat::<f64>::zeros(size, size);
    for index in 0..size {
        for (row, v) in projector_column(sector, index, len) {
            p[(row, index)] = v;
        }
    }
    Ok(p)
}

/// Orthonormal basis of the Gauss sector: one normalized projected state per
/// gauge orbit, as columns.
pub fn gauss_sector_basis(sector: &GaussSector, len: usize) -> Result<Mat<f64>> {
    check_len(len, MAX_GAUGE_LEN)?;
    if sector.signs.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: sector.signs.len(),
        });
    }
    let size = 1usize << (2 * len);
    let mut seen = vec![false; size];
    let mut columns: Vec<Vec<(usize, f64)>> = Vec::new();
    for index in 0..size {
        if seen[index] {
            continue;
        }
        let col = projector_column(sector, index, len);
        for &(row, _) in &col {
            seen[row] = true;
        }
        seen[index] = true;
        let nrm: f64 = col.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        if nrm > 1e-12 {
            columns.push(col.into_iter().map(|(r, v)| (r, v / nrm)).collect());
        }
    }
    let mut v = Mat::<f64>::zeros(size, columns.len());
    for (c, col) in columns.iter().enumerate() {
        for &(r, x) in col {
            v[(r, c)] = x;
        }
    }
    Ok(v)
}

/// Sorted spectrum of the gauged model restricted to a Gauss sector.
pub fn gauss_sector_spectrum(params: &ModelParams, sector: &GaussSector, len: usize) -> Result<Vec<f64>> {
    let h = build_gauged_kitaev(params, len)?;
    let v = gauss_sector_basis(sector, len)?;
    let projected = v.transpose() * (&h * &v);
    eigvalsh(&projected)
}

/// Boundary condition of the candidate Ising partner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsingBoundary {
    Periodic,
    /// The `Z_{L-1} Z_0` coupling has its sign reversed.
    Twisted,
}

fn ising_spectrum(params: &ModelParams, len: usize, boundary: IsingBoundary) -> Result<Vec<f64>> {
    let mut h = build_full(Model::Ising, params, len)?;
    if boundary == IsingBoundary::Twisted {
        for s in 0..h.nrows() {
            let a = (s >> (len - 1)) & 1;
            let b = s & 1;
            let zz = if a == b { 1.0 } else { -1.0 };
            h[(s, s)] -= params.mu * zz;
        }
    }
    Ok(eigh(&h)?.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingAttempt {
    pub gauss_sector: String,
    pub fermion_parity: i32,
    pub ising_boundary: IsingBoundary,
    pub max_mismatch: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub matched: bool,
    pub max_gap_mismatch: f64,
    pub sector_bookkeeping: String,
    pub len: usize,
    pub params: ModelParams,
    pub attempts: Vec<PairingAttempt>,
}

fn max_mismatch(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Compares Gauss-sector spectra of the gauged model with the Ising chain,
/// trying the uniform sector and one background charge against periodic and
/// twisted Ising boundaries. The first matching pairing is reported; the
/// uniform sector with a periodic chain is tried first.
pub fn validate_duality(params: &ModelParams, len: usize) -> Result<DualityReport> {
    params.validate()?;
    check_len(len, MAX_GAUGE_LEN)?;
    let sectors = [GaussSector::uniform(len), GaussSector::with_charge(len, 0)];
    let boundaries = [IsingBoundary::Periodic, IsingBoundary::Twisted];
    let ising: Vec<Vec<f64>> = boundaries
        .iter()
        .map(|&b| ising_spectrum(params, len, b))
        .collect::<Result<_>>()?;

    let mut attempts = Vec::new();
    for sector in &sectors {
        let gauged = gauss_sector_spectrum(params, sector, len)?;
        for (&boundary, spectrum) in boundaries.iter().zip(&ising) {
            attempts.push(PairingAttempt {
                gauss_sector: sector.to_string(),
                fermion_parity: sector.fermion_parity(),
                ising_boundary: boundary,
                max_mismatch: max_mismatch(&gauged, spectrum),
            });
        }
    }
    let best = attempts.iter().find(|a| a.max_mismatch < DUALITY_TOLERANCE).cloned();
    match best {
        Some(hit) => Ok(DualityReport {
            matched: true,
            max_gap_mismatch: hit.max_mismatch,
            sector_bookkeeping: format!(
                "Gauss sector {} (fermion parity {:+}) <-> {:?} Ising chain of {len} sites",
                hit.gauss_sector, hit.fermion_parity, hit.ising_boundary
            ),
            len,
            params: *params,
            attempts,
        }),
        None => Err(Error::NoDualityMatch(
            attempts
                .iter()
                .map(|a| format!("{} vs {:?}: {:.3e}", a.gauss_sector, a.ising_boundary, a.max_mismatch))
                .collect::<Vec<_>>()
                .join("; "),
        )),
    }
}
