//! Spin configurations on a periodic chain and their symmetry sectors.
//!
//! A configuration is an `L`-bit integer; bit `i` is the spin on site `i`.
//! A set bit is spin up, `Z_i = +1`, and a cleared bit is spin down,
//! `Z_i = -1`. The chain is a ring, so site `L - 1` neighbours site `0`.
//!
//! Translation `T` moves the spin on site `i` to site `i + 1`. The parity
//! operation is the bond-centred reflection `i -> L - 1 - i`. On the
//! momentum-zero blocks it coincides with the site-centred reflection, and at
//! momentum `L/2` the two conventions only swap the parity labels.
//!
//! Sector basis states are
//!
//! ```text
//! |r, k>    = R^{-1/2} sum_{j < R} e^{-i theta j} T^j |r>,   theta = 2 pi k / L
//! |r, k, p> = (|r, k> + p P |r, k>) / sqrt(2)   (reflection pairs a new orbit)
//! |r, k, p> = |r, k>                            (orbit closed under reflection)
//! ```
//!
//! where `r` is the smallest integer of its orbit and `R` its translation
//! period, so `T |r, k> = e^{i theta} |r, k>`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Amplitude;

/// Largest chain handled by default; the lookup tables hold `2^L` entries.
pub const DEFAULT_MAX_LEN: usize = 20;

const NOT_IN_SECTOR: u32 = u32::MAX;

pub fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

pub fn check_len(len: usize, max: usize) -> Result<()> {
    if len < 2 || !len.is_multiple_of(2) {
        return Err(Error::InvalidLength(len));
    }
    if len > max {
        return Err(Error::TooLarge { len, max });
    }
    Ok(())
}

/// Eigenvalue of `Z_site` on `config`.
#[inline]
pub fn z_value(config: u64, site: usize) -> f64 {
    if config >> site & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Applies `T^by`: the spin on site `i` moves to site `i + by`.
#[inline]
pub fn translate(config: u64, len: usize, by: usize) -> u64 {
    let by = by % len;
    if by == 0 {
        return config;
    }
    ((config << by) | (config >> (len - by))) & mask(len)
}

/// Bond-centred reflection `i -> L - 1 - i`.
#[inline]
pub fn reflect(config: u64, len: usize) -> u64 {
    config.reverse_bits() >> (64 - len)
}

/// Smallest `R > 0` with `T^R config = config`.
pub fn period(config: u64, len: usize) -> usize {
    (1..=len)
        .find(|&j| len.is_multiple_of(j) && translate(config, len, j) == config)
        .unwrap_or(len)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// A translation-momentum block, optionally resolved by reflection parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetrySector {
    momentum: usize,
    parity: Option<Parity>,
}

impl SymmetrySector {
    pub fn new(len: usize, momentum: usize, parity: Option<Parity>) -> Result<Self> {
        if momentum >= len {
            return Err(Error::InvalidSector(format!(
                "momentum index {momentum} outside [0, {len})"
            )));
        }
        if parity.is_some() && momentum != 0 && 2 * momentum != len {
            return Err(Error::InvalidSector(format!(
                "reflection parity is only resolved at k = 0 or k = {}, got k = {momentum}",
                len / 2
            )));
        }
        Ok(Self { momentum, parity })
    }

    /// The momentum-zero, reflection-even block where the scar towers live.
    pub fn zero_even() -> Self {
        Self {
            momentum: 0,
            parity: Some(Parity::Even),
        }
    }

    pub fn momentum(self) -> usize {
        self.momentum
    }

    pub fn parity(self) -> Option<Parity> {
        self.parity
    }

    pub fn is_real(self, len: usize) -> bool {
        self.momentum == 0 || 2 * self.momentum == len
    }

    /// Every block of a fully resolved decomposition of the `2^L` space:
    /// both parities at `k = 0, L/2`, the bare momentum elsewhere.
    pub fn all(len: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(len + 2);
        for k in 0..len {
            if k == 0 || 2 * k == len {
                out.push(Self {
                    momentum: k,
                    parity: Some(Parity::Even),
                });
                out.push(Self {
                    momentum: k,
                    parity: Some(Parity::Odd),
                });
            } else {
                out.push(Self {
                    momentum: k,
                    parity: None,
                });
            }
        }
        out
    }
}

impl std::fmt::Display for SymmetrySector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.parity {
            Some(Parity::Even) => write!(f, "k={},p=+1", self.momentum),
            Some(Parity::Odd) => write!(f, "k={},p=-1", self.momentum),
            None => write!(f, "k={}", self.momentum),
        }
    }
}

impl std::str::FromStr for SymmetrySector {
    type Err = String;

    /// Parses `k=0,p=+1`, `k=3` or `0,+1`. The chain length is validated
    /// separately with [`SymmetrySector::new`].
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut momentum = None;
        let mut parity = None;
        for (i, part) in s.split(',').map(str::trim).enumerate() {
            let (key, value) = match part.split_once('=') {
                Some((k, v)) => (k.trim(), v.trim()),
                None if i == 0 => ("k", part),
                None => ("p", part),
            };
            match key {
                "k" => {
                    momentum = Some(
                        value
                            .parse::<usize>()
                            .map_err(|e| format!("bad momentum {value:?}: {e}"))?,
                    )
                }
                "p" | "parity" => {
                    parity = Some(match value {
                        "+1" | "1" | "+" | "even" => Parity::Even,
                        "-1" | "-" | "odd" => Parity::Odd,
                        other => return Err(format!("bad parity {other:?}")),
                    })
                }
                other => return Err(format!("unknown sector key {other:?}")),
            }
        }
        let momentum = momentum.ok_or_else(|| "sector needs a momentum index".to_string())?;
        Ok(Self { momentum, parity })
    }
}

/// Orbit representative of a configuration together with the group element
/// that maps it back: `config = T^shift P^reflected rep`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Representative {
    pub rep: u64,
    pub shift: usize,
    pub reflected: bool,
}

fn min_rotation(config: u64, len: usize) -> (u64, usize) {
    let mut best = config;
    let mut best_j = 0;
    let mut cur = config;
    for j in 1..len {
        cur = translate(cur, len, 1);
        if cur < best {
            best = cur;
            best_j = j;
        }
    }
    (best, best_j)
}

/// Finds the orbit minimum of `config` under translations, and reflections
/// when `use_reflection` is set. Translations are preferred when both reach
/// the minimum.
pub fn representative(config: u64, len: usize, use_reflection: bool) -> Representative {
    let (rep, j) = min_rotation(config, len);
    let r = period(rep, len);
    let plain = Representative {
        rep,
        shift: (r - j % r) % r,
        reflected: false,
    };
    if !use_reflection {
        return plain;
    }
    let (rep_p, j_p) = min_rotation(reflect(config, len), len);
    if rep_p < rep {
        let r = period(rep_p, len);
        Representative {
            rep: rep_p,
            shift: j_p % r,
            reflected: true,
        }
    } else {
        plain
    }
}

/// Orbit representatives and lookup tables of one symmetry block.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    len: usize,
    sector: SymmetrySector,
    representatives: Vec<u64>,
    norms: Vec<f64>,
    index: Vec<u32>,
    shift: Vec<u8>,
    reflected: Vec<bool>,
}

/// Builds the basis of one symmetry block with the default length cap.
pub fn enumerate_sector(len: usize, sector: SymmetrySector) -> Result<SectorBasis> {
    SectorBasis::with_max_len(len, sector, DEFAULT_MAX_LEN)
}

impl SectorBasis {
    pub fn new(len: usize, sector: SymmetrySector) -> Result<Self> {
        Self::with_max_len(len, sector, DEFAULT_MAX_LEN)
    }

    pub fn with_max_len(len: usize, sector: SymmetrySector, max_len: usize) -> Result<Self> {
        check_len(len, max_len)?;
        let sector = SymmetrySector::new(len, sector.momentum, sector.parity)?;
        let use_reflection = sector.parity.is_some();
        let k = sector.momentum;
        let size = 1usize << len;

        let mut rep_of = vec![0u64; size];
        let mut shift = vec![0u8; size];
        let mut reflected = vec![false; size];
        let mut rep_index = vec![NOT_IN_SECTOR; size];
        let mut representatives = Vec::new();
        let mut norms = Vec::new();

        for s in 0..size as u64 {
            let r = representative(s, len, use_reflection);
            rep_of[s as usize] = r.rep;
            shift[s as usize] = r.shift as u8;
            reflected[s as usize] = r.reflected;
            if r.rep != s {
                continue;
            }
            let orbit = period(s, len);
            if !(k * orbit).is_multiple_of(len) {
                continue;
            }
            let norm = match sector.parity {
                None => orbit as f64,
                Some(p) => {
                    let image = reflect(s, len);
                    match (0..orbit).find(|&m| translate(s, len, m) == image) {
                        Some(m) => {
                            let phase = if 2 * k == len && m % 2 == 1 { -1.0 } else { 1.0 };
                            if p.sign() * phase < 0.0 {
                                continue;
                            }
                            orbit as f64
                        }
                        None => 2.0 * orbit as f64,
                    }
                }
            };
            rep_index[s as usize] = representatives.len() as u32;
            representatives.push(s);
            norms.push(norm);
        }

        let index = rep_of.iter().map(|&r| rep_index[r as usize]).collect();
        Ok(Self {
            len,
            sector,
            representatives,
            norms,
            index,
            shift,
            reflected,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn sector(&self) -> SymmetrySector {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.sector.is_real(self.len)
    }

    pub fn representatives(&self) -> &[u64] {
        &self.representatives
    }

    /// Squared norms `N` of the unnormalized symmetrized states; amplitudes
    /// of the normalized basis states have modulus `N^{-1/2}`.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Basis index of `rep` if it is one of the representatives.
    pub fn index_of_representative(&self, rep: u64) -> Option<usize> {
        self.representatives.binary_search(&rep).ok()
    }

    /// Basis index and amplitude `<config|b>` of the basis state containing
    /// `config`, or `None` when its orbit is absent from the block.
    #[inline]
    pub fn locate(&self, config: u64) -> Option<(usize, Complex64)> {
        let s = config as usize;
        let idx = self.index[s];
        if idx == NOT_IN_SECTOR {
            return None;
        }
        let idx = idx as usize;
        let theta = 2.0 * PI * self.sector.momentum as f64 / self.len as f64;
        let shift = self.shift[s] as f64;
        let mut amp = Complex64::from_polar(1.0 / self.norms[idx].sqrt(), -theta * shift);
        if self.reflected[s] {
            amp *= self.sector.parity.map_or(1.0, Parity::sign);
        }
        Some((idx, amp))
    }

    /// Same as [`locate`](Self::locate) with the amplitude in the caller's
    /// scalar type. Real sectors have phases of exactly `+-1`.
    #[inline]
    pub fn locate_as<T: Amplitude>(&self, config: u64) -> Option<(usize, T)> {
        self.locate(config).map(|(i, a)| {
            if T::REAL {
                (i, T::from_real(a.re.signum() * a.norm()))
            } else {
                (i, T::from_complex(a))
            }
        })
    }

    pub(crate) fn check_scalar<T: Amplitude>(&self) -> Result<()> {
        if T::REAL && !self.is_real() {
            Err(Error::ComplexSector {
                momentum: self.sector.momentum,
            })
        } else {
            Ok(())
        }
    }

    /// Expands sector coefficients into the `2^L` computational basis.
    pub fn to_full<T: Amplitude>(&self, coeffs: &[T]) -> Result<Vec<T>> {
        self.check_scalar::<T>()?;
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: coeffs.len(),
            });
        }
        let size = 1usize << self.len;
        let mut out = vec![T::zero(); size];
        for (s, slot) in out.iter_mut().enumerate() {
            if let Some((idx, amp)) = self.locate_as::<T>(s as u64) {
                *slot = coeffs[idx] * amp;
            }
        }
        Ok(out)
    }

    /// Projects a full-basis vector onto the block: `c_b = <b|psi>`.
    pub fn from_full<T: Amplitude>(&self, full: &[T]) -> Result<Vec<T>> {
        self.check_scalar::<T>()?;
        let size = 1usize << self.len;
        if full.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: full.len(),
            });
        }
        let mut out = vec![T::zero(); self.dim()];
        for (s, &psi) in full.iter().enumerate() {
            if let Some((idx, amp)) = self.locate_as::<T>(s as u64) {
                out[idx] += amp.conjugate() * psi;
            }
        }
        Ok(out)
    }
}

/// Sector coefficients to full-basis amplitudes.
pub fn sector_to_full<T: Amplitude>(coeffs: &[T], basis: &SectorBasis) -> Result<Vec<T>> {
    basis.to_full(coeffs)
}

/// `T` applied to a full-basis state.
pub fn translate_state<T: Amplitude>(state: &[T], len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); state.len()];
    for (s, &a) in state.iter().enumerate() {
        out[translate(s as u64, len, 1) as usize] = a;
    }
    out
}

/// Bond-centred reflection applied to a full-basis state.
pub fn reflect_state<T: Amplitude>(state: &[T], len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); state.len()];
    for (s, &a) in state.iter().enumerate() {
        out[reflect(s as u64, len) as usize] = a;
    }
    out
}

/// Site-centred reflection `i -> -i mod L` applied to a full-basis state.
pub fn reflect_state_site_centred<T: Amplitude>(state: &[T], len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); state.len()];
    for (s, &a) in state.iter().enumerate() {
        let image = translate(reflect(s as u64, len), len, 1);
        out[image as usize] = a;
    }
    out
}
