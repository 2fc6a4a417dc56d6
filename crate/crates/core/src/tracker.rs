//! Following a scar candidate through the `(t, h)` plane.
//!
//! At every fine step the momentum-zero, reflection-even block is
//! diagonalized and the eigenstate of largest overlap with the current
//! reference vector is selected. If its eigenindex differs from the last
//! accepted one (or the overlap is weak), the candidate is checked against up
//! to `lookahead` further diagonalizations spaced by the coarse step: it is
//! accepted only if it keeps its eigenindex at all of them. A failed check
//! marks a crossing and the old reference vector is kept, which carries the
//! state diabatically through narrow avoided crossings.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::{SectorBasis, SymmetrySector};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_ising, ModelParams};
use crate::scalar::normalize;
use crate::scars::{scar_in_sector, ScarLabel};
use crate::spectral::{diagonalize, EigenSolution};

/// Tolerance used when comparing path coordinates.
const PATH_EPS: f64 = 1e-9;

/// Straight segment between two parameter points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSegment {
    pub start: (f64, f64),
    pub end: (f64, f64),
    /// `(dt, dh)` per fine step.
    pub fine_step: (f64, f64),
    /// `(dt, dh)` between look-ahead checks.
    pub coarse_step: (f64, f64),
}

impl PathSegment {
    /// Number of fine steps from start to end.
    fn steps(&self) -> Result<usize> {
        let mut count: Option<usize> = None;
        for (delta, step) in [
            (self.end.0 - self.start.0, self.fine_step.0),
            (self.end.1 - self.start.1, self.fine_step.1),
        ] {
            if step < 0.0 || !step.is_finite() {
                return Err(Error::InvalidPath(format!("negative or non-finite step {step}")));
            }
            if delta.abs() < PATH_EPS && step == 0.0 {
                continue;
            }
            if step == 0.0 || delta < -PATH_EPS {
                return Err(Error::InvalidPath(format!(
                    "segment {:?} -> {:?} cannot be stepped",
                    self.start, self.end
                )));
            }
            let n = delta / step;
            let rounded = n.round();
            if (n - rounded).abs() > 1e-6 {
                return Err(Error::InvalidPath(format!(
                    "step {step} does not divide the displacement {delta}"
                )));
            }
            let rounded = rounded as usize;
            match count {
                Some(c) if c != rounded => {
                    return Err(Error::InvalidPath("t and h step counts differ".into()));
                }
                _ => count = Some(rounded),
            }
        }
        Ok(count.unwrap_or(0))
    }

    /// Fine steps per coarse step.
    fn coarse_ratio(&self) -> usize {
        let ratio = |c: f64, f: f64| if f > 0.0 { (c / f).round() as usize } else { 0 };
        ratio(self.coarse_step.0, self.fine_step.0)
            .max(ratio(self.coarse_step.1, self.fine_step.1))
            .max(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterPath {
    pub name: String,
    pub segments: Vec<PathSegment>,
}

/// A fine grid point of a path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathPoint {
    pub t: f64,
    pub h: f64,
    /// Fine steps per look-ahead step at this point.
    pub coarse_ratio: usize,
}

impl ParameterPath {
    pub fn new(name: impl Into<String>, segments: Vec<PathSegment>) -> Result<Self> {
        let path = Self {
            name: name.into(),
            segments,
        };
        path.validate()?;
        Ok(path)
    }

    /// A path that never moves.
    pub fn fixed(t: f64, h: f64) -> Self {
        Self {
            name: "fixed".into(),
            segments: vec![PathSegment {
                start: (t, h),
                end: (t, h),
                fine_step: (0.0, 0.0),
                coarse_step: (0.0, 0.0),
            }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidPath("no segments".into()));
        }
        for seg in &self.segments {
            seg.steps()?;
        }
        for pair in self.segments.windows(2) {
            let (a, b) = (pair[0].end, pair[1].start);
            if (a.0 - b.0).abs() > PATH_EPS || (a.1 - b.1).abs() > PATH_EPS {
                return Err(Error::InvalidPath(format!("segments not contiguous at {a:?} / {b:?}")));
            }
        }
        Ok(())
    }

    /// All fine grid points, start to end, without duplicated joints.
    pub fn points(&self) -> Result<Vec<PathPoint>> {
        self.validate()?;
        let mut out = Vec::new();
        for (k, seg) in self.segments.iter().enumerate() {
            let n = seg.steps()?;
            let ratio = seg.coarse_ratio();
            for i in usize::from(k > 0)..=n {
                let (t, h) = if i == n {
                    seg.end
                } else {
                    (
                        seg.start.0 + i as f64 * seg.fine_step.0,
                        seg.start.1 + i as f64 * seg.fine_step.1,
                    )
                };
                out.push(PathPoint {
                    t,
                    h,
                    coarse_ratio: ratio,
                });
            }
        }
        Ok(out)
    }

    pub fn start(&self) -> (f64, f64) {
        self.segments[0].start
    }

    pub fn end(&self) -> (f64, f64) {
        self.segments[self.segments.len() - 1].end
    }

    /// Stops the path at the last fine point with `t <= t_max`.
    pub fn truncated(&self, t_max: f64) -> Result<Self> {
        let mut segments = Vec::new();
        for seg in &self.segments {
            if seg.start.0 > t_max + PATH_EPS {
                break;
            }
            let mut seg = *seg;
            if seg.end.0 > t_max + PATH_EPS {
                let k = ((t_max - seg.start.0) / seg.fine_step.0 + 1e-6).floor();
                seg.end = (seg.start.0 + k * seg.fine_step.0, seg.start.1 + k * seg.fine_step.1);
                segments.push(seg);
                break;
            }
            segments.push(seg);
        }
        Self::new(format!("{}(t<={t_max})", self.name), segments)
    }

    /// Coarsens the fine grid about `factor` times, rounding each segment to
    /// a whole number of equal steps. Coarse steps are kept no finer than the
    /// new fine step.
    pub fn with_fine_step_scale(&self, factor: usize) -> Result<Self> {
        let mut segments = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            let n = s.steps()?;
            if n == 0 {
                segments.push(*s);
                continue;
            }
            let m = ((n as f64 / factor.max(1) as f64).round() as usize).max(1);
            let fine = ((s.end.0 - s.start.0) / m as f64, (s.end.1 - s.start.1) / m as f64);
            segments.push(PathSegment {
                fine_step: fine,
                coarse_step: (s.coarse_step.0.max(fine.0), s.coarse_step.1.max(fine.1)),
                ..*s
            });
        }
        Self::new(format!("{}(x{factor})", self.name), segments)
    }
}

/// Named paths: `path0` runs along `t = 3h` from `(0.003, 0.001)` to
/// `(0.3, 0.1)`; `pathI` runs along `t = 0.2h` up to `(0.1, 0.5)` and then
/// along `h = 0.5` up to `t = 0.3`.
pub fn preset_path(name: &str) -> Result<ParameterPath> {
    match name.trim() {
        "path0" | "0" => ParameterPath::new(
            "path0",
            vec![PathSegment {
                start: (0.003, 0.001),
                end: (0.3, 0.1),
                fine_step: (0.003, 0.001),
                coarse_step: (0.03, 0.01),
            }],
        ),
        "pathI" | "I" | "pathi" | "i" => ParameterPath::new(
            "pathI",
            vec![
                PathSegment {
                    start: (0.0002, 0.001),
                    end: (0.1, 0.5),
                    fine_step: (0.0002, 0.001),
                    coarse_step: (0.002, 0.01),
                },
                PathSegment {
                    start: (0.1, 0.5),
                    end: (0.3, 0.5),
                    fine_step: (0.001, 0.0),
                    coarse_step: (0.01, 0.0),
                },
            ],
        ),
        other => Err(Error::UnknownPath(other.to_string())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrackingMode {
    /// Keep the old reference through unconfirmed index changes.
    Diabatic,
    /// Always continue with the best-overlap eigenstate.
    Adiabatic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackingPolicy {
    pub accept_threshold: f64,
    /// Consecutive weak-overlap steps tolerated before the state counts as lost.
    pub patience: usize,
    /// Number of coarse look-ahead diagonalizations.
    pub lookahead: usize,
    pub mode: TrackingMode,
    pub mu: f64,
    /// Solutions kept for reuse by look-ahead checks.
    pub cache_size: usize,
}

impl Default for TrackingPolicy {
    fn default() -> Self {
        Self {
            accept_threshold: 0.7,
            patience: 20,
            lookahead: 10,
            mode: TrackingMode::Diabatic,
            mu: 1.0,
            cache_size: 24,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackEntry {
    pub t: f64,
    pub h: f64,
    pub energy: f64,
    pub entropy: f64,
    pub overlap: f64,
    pub eigenindex: usize,
    pub accepted: bool,
    pub crossing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackRecord {
    pub label: ScarLabel,
    pub len: usize,
    pub path: String,
    /// Overlap of the exact tower state with the selected eigenstate at the
    /// start of the path.
    pub initial_overlap: f64,
    pub entries: Vec<TrackEntry>,
}

impl TrackRecord {
    pub fn last(&self) -> Option<&TrackEntry> {
        self.entries.last()
    }

    /// First entry whose entropy reaches `fraction * s_rmt(L)`.
    pub fn entropy_crossing(&self, fraction: f64) -> Option<&TrackEntry> {
        let limit = fraction * crate::spectral::s_rmt(self.len);
        self.entries.iter().find(|e| e.entropy >= limit)
    }

    /// Entropies after a running median over `window` entries (centred,
    /// shrinking at the ends), which removes isolated crossing spikes.
    pub fn smoothed_entropy(&self, window: usize) -> Vec<f64> {
        let half = window / 2;
        let n = self.entries.len();
        (0..n)
            .map(|i| {
                let mut w: Vec<f64> = self.entries[i.saturating_sub(half)..(i + half + 1).min(n)]
                    .iter()
                    .map(|e| e.entropy)
                    .collect();
                w.sort_by(f64::total_cmp);
                w[w.len() / 2]
            })
            .collect()
    }

    /// Parameter `t` at which the smoothed entropy first reaches
    /// `fraction * s_rmt(L)`, i.e. where the state stops being low-entangled
    /// for longer than a narrow crossing.
    pub fn low_entropy_loss(&self, fraction: f64, window: usize) -> Option<f64> {
        let limit = fraction * crate::spectral::s_rmt(self.len);
        self.smoothed_entropy(window)
            .iter()
            .zip(&self.entries)
            .find(|(s, _)| **s >= limit)
            .map(|(_, e)| e.t)
    }
}

/// Memoized diagonalizations along a path.
struct SolutionCache {
    basis: Arc<SectorBasis>,
    points: Vec<PathPoint>,
    mu: f64,
    capacity: usize,
    solved: BTreeMap<usize, Arc<EigenSolution<f64>>>,
}

impl SolutionCache {
    fn new(len: usize, points: Vec<PathPoint>, policy: &TrackingPolicy) -> Result<Self> {
        let basis = Arc::new(SectorBasis::new(len, SymmetrySector::zero_even())?);
        Ok(Self {
            basis,
            points,
            mu: policy.mu,
            capacity: policy.cache_size.max(2),
            solved: BTreeMap::new(),
        })
    }

    fn get(&mut self, index: usize) -> Result<Arc<EigenSolution<f64>>> {
        if let Some(sol) = self.solved.get(&index) {
            return Ok(Arc::clone(sol));
        }
        let p = self.points[index];
        let params = ModelParams::new(p.t, p.h).with_mu(self.mu);
        let sol = Arc::new(diagonalize(&build_ising::<f64>(&params, &self.basis)?)?);
        self.solved.insert(index, Arc::clone(&sol));
        while self.solved.len() > self.capacity {
            let last = *self.solved.keys().next_back().expect("cache is not empty");
            self.solved.remove(&last);
        }
        Ok(sol)
    }

    /// Drops solutions behind the current step.
    fn advance(&mut self, current: usize) {
        self.solved = self.solved.split_off(&current);
    }
}

fn best_overlap(sol: &EigenSolution<f64>, reference: &[f64]) -> (usize, f64) {
    let overlaps = sol
        .overlaps(reference)
        .expect("reference lives in the solution's basis");
    overlaps
        .iter()
        .copied()
        .enumerate()
        .fold((0, -1.0), |best, (i, o)| if o > best.1 { (i, o) } else { best })
}

/// Per-state continuation state.
struct Follower {
    record: TrackRecord,
    reference: Vec<f64>,
    last_index: usize,
    weak_steps: usize,
}

impl Follower {
    fn start(label: ScarLabel, len: usize, path: &str, cache: &mut SolutionCache) -> Result<Self> {
        let (mut exact, _) = scar_in_sector(label, &cache.basis)?;
        normalize(&mut exact);
        let sol = cache.get(0)?;
        let (index, overlap) = best_overlap(&sol, &exact);
        let p = cache.points[0];
        let entry = TrackEntry {
            t: p.t,
            h: p.h,
            energy: sol.energies()[index],
            entropy: sol.entropy(index),
            overlap: 1.0,
            eigenindex: index,
            accepted: true,
            crossing: false,
        };
        Ok(Self {
            record: TrackRecord {
                label,
                len,
                path: path.to_string(),
                initial_overlap: overlap,
                entries: vec![entry],
            },
            reference: sol.vector(index),
            last_index: index,
            weak_steps: 0,
        })
    }

    fn step(&mut self, j: usize, policy: &TrackingPolicy, cache: &mut SolutionCache) -> Result<()> {
        let sol = cache.get(j)?;
        let (index, overlap) = best_overlap(&sol, &self.reference);
        let strong = overlap >= policy.accept_threshold;
        let mut crossing = false;
        let accepted = if index == self.last_index && strong {
            true
        } else {
            let candidate = sol.vector(index);
            let ratio = cache.points[j].coarse_ratio;
            let mut stable = true;
            for m in 1..=policy.lookahead {
                let ahead = j + m * ratio;
                if ahead >= cache.points.len() {
                    break;
                }
                let (i_ahead, _) = best_overlap(&*cache.get(ahead)?, &candidate);
                if i_ahead != index {
                    stable = false;
                    break;
                }
            }
            crossing = !stable;
            stable && strong
        };

        if accepted || policy.mode == TrackingMode::Adiabatic {
            self.reference = sol.vector(index);
            self.last_index = index;
        }
        self.weak_steps = if strong { 0 } else { self.weak_steps + 1 };

        let p = cache.points[j];
        self.record.entries.push(TrackEntry {
            t: p.t,
            h: p.h,
            energy: sol.energies()[index],
            entropy: sol.entropy(index),
            overlap: overlap.clamp(0.0, 1.0),
            eigenindex: index,
            accepted,
            crossing,
        });
        if self.weak_steps > policy.patience {
            return Err(Error::LostState {
                step: j,
                t: p.t,
                h: p.h,
                record: Box::new(self.record.clone()),
            });
        }
        Ok(())
    }
}

/// Follows one tower state along `path` on a chain of length `len`.
pub fn track(path: &ParameterPath, initial: ScarLabel, len: usize, policy: &TrackingPolicy) -> Result<TrackRecord> {
    track_many(path, &[initial], len, policy)?
        .pop()
        .expect("one label in, one record out")
}

/// Follows several states along the same path, sharing diagonalizations.
/// Results are returned in label order; a lost state does not stop the others.
pub fn track_many(
    path: &ParameterPath,
    labels: &[ScarLabel],
    len: usize,
    policy: &TrackingPolicy,
) -> Result<Vec<Result<TrackRecord>>> {
    let points = path.points()?;
    let mut cache = SolutionCache::new(len, points, policy)?;
    let mut followers: Vec<Result<Follower>> = labels
        .iter()
        .map(|&l| Follower::start(l, len, &path.name, &mut cache))
        .collect();
    for j in 1..cache.points.len() {
        cache.advance(j);
        for f in followers.iter_mut() {
            if let Ok(active) = f {
                if let Err(e) = active.step(j, policy, &mut cache) {
                    *f = Err(e);
                }
            }
        }
        if followers.iter().all(|f| f.is_err()) {
            break;
        }
    }
    Ok(followers.into_iter().map(|f| f.map(|f| f.record)).collect())
}

/// A local entropy maximum standing out from its neighbourhood.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spike {
    pub index: usize,
    pub t: f64,
    pub h: f64,
    pub entropy: f64,
    /// Height above the mean of the surrounding window.
    pub excess: f64,
    /// Whether the overlap drops at the same step.
    pub overlap_dip: bool,
}

/// Local entropy maxima exceeding the mean of the `window` entries on each
/// side by more than `threshold`.
pub fn entropy_spike_report(record: &TrackRecord, threshold: f64, window: usize) -> Vec<Spike> {
    let e = &record.entries;
    if e.len() < 3 {
        return Vec::new();
    }
    let window = window.max(1);
    let mut spikes = Vec::new();
    for i in 1..e.len() - 1 {
        let s = e[i].entropy;
        if !(s > e[i - 1].entropy && s >= e[i + 1].entropy) {
            continue;
        }
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(e.len() - 1);
        let neighbours: Vec<f64> = (lo..=hi).filter(|&k| k != i).map(|k| e[k].entropy).collect();
        let baseline = neighbours.iter().sum::<f64>() / neighbours.len() as f64;
        let excess = s - baseline;
        if excess > threshold {
            spikes.push(Spike {
                index: i,
                t: e[i].t,
                h: e[i].h,
                entropy: s,
                excess,
                overlap_dip: e[i].overlap < e[i - 1].overlap.min(e[i + 1].overlap),
            });
        }
    }
    spikes
}
