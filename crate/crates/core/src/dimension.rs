//! Doubling-dimension estimates for finite metric instances.
//!
//! Covering balls are centered at points of the subset under study (the
//! finite-submetric convention). The upper estimate is `log2` of the worst
//! minimal halving cover over all centers and all critical radii; the lower
//! estimate inverts the classical packing bound `M(r) <= (2 diam / r)^ddim`.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{LocalMetric, MetricInstance, PointId, Subset, TOLERANCE};
use crate::packing::{packing_count, EXACT_CAP};

/// Largest ball the exact set-cover solver accepts.
pub const COVER_CAP: usize = 24;

/// Relative step below each pairwise distance where the lower estimate
/// samples `M(r)` (the supremum over an interval is approached from the left).
const LEFT_LIMIT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DimensionMode {
    #[default]
    Exact,
    Greedy,
}

impl fmt::Display for DimensionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DimensionMode::Exact => "exact",
            DimensionMode::Greedy => "greedy",
        })
    }
}

impl std::str::FromStr for DimensionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(DimensionMode::Exact),
            "greedy" => Ok(DimensionMode::Greedy),
            other => Err(Error::InvalidSpec(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstBall {
    pub center: PointId,
    pub radius: f64,
    pub cover_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub ddim_upper: f64,
    /// Zero (the trivial bound) when the subset exceeds the exact packing cap.
    pub ddim_lower: f64,
    pub worst_ball: WorstBall,
    pub mode: DimensionMode,
}

/// `B ∪ M`: every pairwise distance `d` and `2d`, plus the midpoints of
/// consecutive values. Minimal halving-cover size is piecewise constant in
/// `r` with breakpoints in `B`, so these radii see every value it takes.
pub fn critical_radii(inst: &MetricInstance, subset: &Subset) -> Result<Vec<f64>> {
    if subset.len() < 2 {
        return Err(Error::DegenerateSubset(subset.len()));
    }
    Ok(critical_radii_local(&inst.local(subset)?))
}

fn critical_radii_local(local: &LocalMetric) -> Vec<f64> {
    let ds = local.distinct_distances();
    let mut b: Vec<f64> = ds.iter().flat_map(|&d| [d, 2.0 * d]).collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    let mids: Vec<f64> = b.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    b.extend(mids);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// Covers `ball(center, r) ∩ subset` with `r/2`-balls centered at subset
/// points. Exact mode returns a minimum cover; greedy mode the largest-gain
/// greedy cover. Returns the cover size and its centers.
pub fn min_halving_cover(
    inst: &MetricInstance,
    subset: &Subset,
    center: PointId,
    r: f64,
    mode: DimensionMode,
) -> Result<(usize, Subset)> {
    let Some(c) = subset.position(center) else {
        inst.check_index(center)?;
        return Err(Error::InvalidSpec(format!(
            "center {center} is not in the subset"
        )));
    };
    if !(r > 0.0) {
        return Err(Error::NonPositiveParameter { name: "r", value: r });
    }
    let local = inst.local(subset)?;
    let problem = CoverProblem::new(&local, c, r);
    if mode == DimensionMode::Exact && problem.ball_len > COVER_CAP {
        return Err(Error::CapExceeded {
            size: problem.ball_len,
            cap: COVER_CAP,
        });
    }
    let picks = match mode {
        DimensionMode::Exact => exact_cover(&problem.sets, problem.ball_len),
        DimensionMode::Greedy => greedy_cover(&problem.sets, problem.ball_len),
    };
    let ids = local.ids();
    let centers: Subset = picks.iter().map(|&k| ids[problem.owners[k]]).collect();
    Ok((picks.len(), centers))
}

/// Upper estimate of the doubling dimension of `subset` (with its lower
/// companion when the subset fits the exact packing cap).
pub fn ddim_upper(
    inst: &MetricInstance,
    subset: &Subset,
    mode: DimensionMode,
) -> Result<DimensionEstimate> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let local = inst.local(subset)?;
    if local.len() == 1 {
        return Ok(DimensionEstimate {
            ddim_upper: 0.0,
            ddim_lower: 0.0,
            worst_ball: WorstBall {
                center: local.ids()[0],
                radius: 0.0,
                cover_size: 1,
            },
            mode,
        });
    }
    let worst = worst_ball(&local, mode)?;
    let ddim_lower = if local.len() <= EXACT_CAP {
        ddim_lower_local(&local)
    } else {
        0.0
    };
    Ok(DimensionEstimate {
        ddim_upper: (worst.cover_size as f64).log2(),
        ddim_lower,
        worst_ball: worst,
        mode,
    })
}

fn worst_ball(local: &LocalMetric, mode: DimensionMode) -> Result<WorstBall> {
    let radii = critical_radii_local(local);
    let mut memo: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut worst = WorstBall {
        center: local.ids()[0],
        radius: 0.0,
        cover_size: 1,
    };
    for c in 0..local.len() {
        for &r in &radii {
            let problem = CoverProblem::new(local, c, r);
            if problem.ball_len <= worst.cover_size {
                continue;
            }
            if mode == DimensionMode::Exact && problem.ball_len > COVER_CAP {
                return Err(Error::CapExceeded {
                    size: problem.ball_len,
                    cap: COVER_CAP,
                });
            }
            let size = *memo.entry(problem.key()).or_insert_with(|| match mode {
                DimensionMode::Exact => exact_cover(&problem.sets, problem.ball_len).len(),
                DimensionMode::Greedy => greedy_cover(&problem.sets, problem.ball_len).len(),
            });
            if size > worst.cover_size {
                worst = WorstBall {
                    center: local.ids()[c],
                    radius: r,
                    cover_size: size,
                };
            }
        }
    }
    Ok(worst)
}

/// `max_r log2 M(r) / log2(2 diam / r)` over critical radii below `2 diam`
/// and just below each pairwise distance. Exact packing numbers throughout.
pub fn ddim_lower(inst: &MetricInstance, subset: &Subset) -> Result<f64> {
    if subset.len() < 2 {
        return Err(Error::DegenerateSubset(subset.len()));
    }
    if subset.len() > EXACT_CAP {
        return Err(Error::CapExceeded {
            size: subset.len(),
            cap: EXACT_CAP,
        });
    }
    Ok(ddim_lower_local(&inst.local(subset)?))
}

fn ddim_lower_local(local: &LocalMetric) -> f64 {
    let diam = local.diameter();
    let mut probes = critical_radii_local(local);
    probes.extend(
        local
            .distinct_distances()
            .iter()
            .map(|d| d * (1.0 - LEFT_LIMIT)),
    );
    let mut best = 0.0f64;
    for r in probes {
        if r >= 2.0 * diam {
            continue;
        }
        let m = packing_count(local, r);
        if m > 1 {
            best = best.max((m as f64).log2() / (2.0 * diam / r).log2());
        }
    }
    best
}

/// One halving-cover instance: the ball around a center, and for each
/// candidate center the ball members it covers at half the radius.
struct CoverProblem {
    ball_len: usize,
    /// Coverage masks over ball members, one word per 64 members.
    sets: Vec<Vec<u64>>,
    /// Position (in the local metric) of the candidate behind each set.
    owners: Vec<usize>,
}

impl CoverProblem {
    fn new(local: &LocalMetric, center: usize, r: f64) -> Self {
        let ball: Vec<usize> = (0..local.len())
            .filter(|&p| local.get(center, p) <= r)
            .collect();
        let words = ball.len().div_ceil(64);
        let half = r / 2.0;
        let mut sets = Vec::new();
        let mut owners = Vec::new();
        for q in 0..local.len() {
            let mut mask = vec![0u64; words];
            let mut any = false;
            for (k, &p) in ball.iter().enumerate() {
                if local.get(q, p) <= half {
                    mask[k / 64] |= 1 << (k % 64);
                    any = true;
                }
            }
            if any {
                sets.push(mask);
                owners.push(q);
            }
        }
        CoverProblem {
            ball_len: ball.len(),
            sets,
            owners,
        }
    }

    /// Canonical form for memoization: distinct masks, sorted.
    fn key(&self) -> Vec<u64> {
        let mut flat: Vec<Vec<u64>> = self.sets.clone();
        flat.sort();
        flat.dedup();
        let mut key = vec![self.ball_len as u64];
        key.extend(flat.into_iter().flatten());
        key
    }
}

fn greedy_cover(sets: &[Vec<u64>], universe: usize) -> Vec<usize> {
    let words = universe.div_ceil(64);
    let mut uncovered: Vec<u64> = (0..words)
        .map(|w| {
            let bits = (universe - w * 64).min(64);
            if bits == 64 {
                u64::MAX
            } else {
                (1u64 << bits) - 1
            }
        })
        .collect();
    let gain = |s: &Vec<u64>, u: &[u64]| -> u32 {
        s.iter().zip(u).map(|(a, b)| (a & b).count_ones()).sum()
    };
    let mut picks = Vec::new();
    while uncovered.iter().any(|&w| w != 0) {
        let (best, g) = sets
            .iter()
            .enumerate()
            .map(|(k, s)| (k, gain(s, &uncovered)))
            .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        debug_assert!(g > 0, "every ball member covers itself");
        picks.push(best);
        for (u, s) in uncovered.iter_mut().zip(&sets[best]) {
            *u &= !s;
        }
    }
    picks
}

/// Minimum set cover by branch and bound. Callers guarantee
/// `universe <= COVER_CAP` so a single word holds every mask.
fn exact_cover(sets: &[Vec<u64>], universe: usize) -> Vec<usize> {
    debug_assert!(universe <= 64);
    let full = if universe == 64 {
        u64::MAX
    } else {
        (1u64 << universe) - 1
    };
    if full == 0 {
        return Vec::new();
    }
    let raw: Vec<u64> = sets.iter().map(|s| s[0]).collect();

    // drop sets contained in another (keeping the lowest index among equals)
    let kept: Vec<usize> = (0..raw.len())
        .filter(|&i| {
            !(0..raw.len()).any(|j| {
                j != i && raw[i] & raw[j] == raw[i] && (raw[i] != raw[j] || j < i)
            })
        })
        .collect();
    let masks: Vec<u64> = kept.iter().map(|&i| raw[i]).collect();
    let containing: Vec<Vec<usize>> = (0..universe)
        .map(|e| {
            let mut v: Vec<usize> = (0..masks.len())
                .filter(|&s| masks[s] >> e & 1 == 1)
                .collect();
            v.sort_by_key(|&s| std::cmp::Reverse(masks[s].count_ones()));
            v
        })
        .collect();
    let reach: Vec<u64> = containing
        .iter()
        .map(|ss| ss.iter().fold(0, |m, &s| m | masks[s]))
        .collect();
    let max_set = masks.iter().map(|m| m.count_ones()).max().unwrap_or(1);

    let greedy: Vec<usize> = greedy_cover(
        &masks.iter().map(|&m| vec![m]).collect::<Vec<_>>(),
        universe,
    );
    let mut search = CoverSearch {
        masks: &masks,
        containing: &containing,
        reach: &reach,
        max_set,
        best: greedy,
        current: Vec::new(),
    };
    search.run(full);
    let mut picks: Vec<usize> = search.best.iter().map(|&s| kept[s]).collect();
    picks.sort_unstable();
    picks
}

struct CoverSearch<'a> {
    masks: &'a [u64],
    containing: &'a [Vec<usize>],
    reach: &'a [u64],
    max_set: u32,
    best: Vec<usize>,
    current: Vec<usize>,
}

impl CoverSearch<'_> {
    fn run(&mut self, uncovered: u64) {
        if uncovered == 0 {
            if self.current.len() < self.best.len() {
                self.best = self.current.clone();
            }
            return;
        }
        if self.current.len() + self.lower_bound(uncovered) >= self.best.len() {
            return;
        }
        let mut pivot = usize::MAX;
        let mut fewest = usize::MAX;
        let mut rest = uncovered;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.containing[e].len() < fewest {
                fewest = self.containing[e].len();
                pivot = e;
            }
        }
        for &s in &self.containing[pivot] {
            self.current.push(s);
            self.run(uncovered & !self.masks[s]);
            self.current.pop();
        }
    }

    /// Max of (a) elements no two of which share a covering set and
    /// (b) `ceil(|uncovered| / largest set)`.
    fn lower_bound(&self, uncovered: u64) -> usize {
        let mut blocked = 0u64;
        let mut independent = 0;
        let mut rest = uncovered;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if blocked >> e & 1 == 0 {
                independent += 1;
                blocked |= self.reach[e];
            }
        }
        let by_size = uncovered.count_ones().div_ceil(self.max_set) as usize;
        independent.max(by_size)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioFinding {
    pub trial: usize,
    pub subset: Subset,
    pub ddim_subset: f64,
    pub ddim_ambient: f64,
    pub ratio: f64,
    pub worst_ball: WorstBall,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub trials: usize,
    pub ddim_ambient: f64,
    pub max_ratio: f64,
    pub all_within: bool,
    /// Trials whose ratio exceeded 2.
    pub findings: Vec<RatioFinding>,
}

/// Samples random subsets `A` (each point kept with probability 1/2, never
/// empty) and compares exact `ddim(A)` against `2 ddim(Ω)`.
pub fn subset_dimension_ratio_check(
    inst: &MetricInstance,
    trials: usize,
    seed: u64,
) -> Result<RatioReport> {
    let all = inst.all_points();
    if all.len() > EXACT_CAP {
        return Err(Error::CapExceeded {
            size: all.len(),
            cap: EXACT_CAP,
        });
    }
    let ambient = ddim_upper(inst, &all, DimensionMode::Exact)?.ddim_upper;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = RatioReport {
        trials,
        ddim_ambient: ambient,
        max_ratio: 0.0,
        all_within: true,
        findings: Vec::new(),
    };
    for trial in 0..trials {
        let mut picked: Vec<PointId> = all.iter().filter(|_| rng.gen_bool(0.5)).collect();
        if picked.is_empty() {
            picked.push(rng.gen_range(0..all.len()));
        }
        let a = Subset::new(picked);
        let est = ddim_upper(inst, &a, DimensionMode::Exact)?;
        let ratio = if ambient > 0.0 {
            est.ddim_upper / ambient
        } else {
            0.0
        };
        report.max_ratio = report.max_ratio.max(ratio);
        if ratio > 2.0 + TOLERANCE {
            report.all_within = false;
            report.findings.push(RatioFinding {
                trial,
                subset: a,
                ddim_subset: est.ddim_upper,
                ddim_ambient: ambient,
                ratio,
                worst_ball: est.worst_ball,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Norm;

    fn line(xs: &[f64]) -> MetricInstance {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        MetricInstance::from_coords(1, Norm::L2, &pts).unwrap()
    }

    fn equidistant(n: usize) -> MetricInstance {
        let m: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        MetricInstance::from_matrix(&m, TOLERANCE).unwrap()
    }

    #[test]
    fn critical_radii_examples() {
        let eq = equidistant(4);
        assert_eq!(critical_radii(&eq, &eq.all_points()).unwrap(), vec![1.0, 1.5, 2.0]);
        let two = line(&[0.0, 1.0]);
        assert_eq!(critical_radii(&two, &two.all_points()).unwrap(), vec![1.0, 1.5, 2.0]);
        let three = line(&[0.0, 1.0, 3.0]);
        assert_eq!(
            critical_radii(&three, &three.all_points()).unwrap(),
            vec![1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0]
        );
        assert!(critical_radii(&three, &Subset::new(vec![0])).is_err());
    }

    #[test]
    fn halving_cover_examples() {
        let eq = equidistant(4);
        for c in 0..4 {
            let (k, centers) =
                min_halving_cover(&eq, &eq.all_points(), c, 1.0, DimensionMode::Exact).unwrap();
            assert_eq!(k, 4);
            assert_eq!(centers, eq.all_points());
        }
        let three = line(&[0.0, 1.0, 3.0]);
        let all = three.all_points();
        let (k, _) = min_halving_cover(&three, &all, 0, 6.0, DimensionMode::Exact).unwrap();
        assert_eq!(k, 1);
        let (k, centers) = min_halving_cover(&three, &all, 0, 1.0, DimensionMode::Exact).unwrap();
        assert_eq!((k, centers), (2, Subset::new(vec![0, 1])));
        let (k, _) = min_halving_cover(&three, &all, 0, 1.0, DimensionMode::Greedy).unwrap();
        assert_eq!(k, 2);
    }

    #[test]
    fn halving_cover_errors() {
        let three = line(&[0.0, 1.0, 3.0]);
        let sub = Subset::new(vec![0, 1]);
        assert!(min_halving_cover(&three, &sub, 2, 1.0, DimensionMode::Exact).is_err());
        assert!(min_halving_cover(&three, &sub, 0, 0.0, DimensionMode::Exact).is_err());
        let xs: Vec<f64> = (0..30).map(f64::from).collect();
        let long = line(&xs);
        assert!(matches!(
            min_halving_cover(&long, &long.all_points(), 0, 100.0, DimensionMode::Exact),
            Err(Error::CapExceeded { size: 30, cap: 24 })
        ));
        assert!(
            min_halving_cover(&long, &long.all_points(), 0, 100.0, DimensionMode::Greedy).is_ok()
        );
    }

    #[test]
    fn greedy_is_not_always_optimal() {
        // classic greedy trap: one large set overlapping two disjoint halves
        let sets: Vec<Vec<u64>> = vec![vec![0b0111_0111], vec![0b0000_1111], vec![0b1111_0000]];
        assert_eq!(exact_cover(&sets, 8).len(), 2);
        assert_eq!(greedy_cover(&sets, 8).len(), 3);
    }

    #[test]
    fn ddim_upper_examples() {
        for (n, want) in [(2, 1.0), (4, 2.0), (8, 3.0)] {
            let eq = equidistant(n);
            let est = ddim_upper(&eq, &eq.all_points(), DimensionMode::Exact).unwrap();
            assert_eq!(est.ddim_upper, want);
            assert_eq!(est.worst_ball.cover_size, n);
        }
        let one = line(&[5.0]);
        assert_eq!(
            ddim_upper(&one, &one.all_points(), DimensionMode::Exact)
                .unwrap()
                .ddim_upper,
            0.0
        );
        let two = line(&[0.0, 1.0]);
        let est = ddim_upper(&two, &two.all_points(), DimensionMode::Exact).unwrap();
        assert_eq!(est.ddim_upper, 1.0);
        assert!(est.worst_ball.radius >= 1.0 && est.worst_ball.radius < 2.0);
    }

    #[test]
    fn ddim_lower_examples() {
        let two = line(&[0.0, 1.0]);
        let lo = ddim_lower(&two, &two.all_points()).unwrap();
        assert!(lo > 0.0 && lo <= 1.0);
        assert!(lo > 1.0 - 1e-6);

        for n in [2usize, 4, 8] {
            let eq = equidistant(n);
            let lo = ddim_lower(&eq, &eq.all_points()).unwrap();
            let log_n = (n as f64).log2();
            assert!(lo <= log_n && lo > log_n - 1e-6, "n={n} lo={lo}");
        }
        assert!(ddim_lower(&two, &Subset::new(vec![0])).is_err());
    }

    #[test]
    fn ratio_check_small() {
        let eq = equidistant(6);
        let rep = subset_dimension_ratio_check(&eq, 20, 3).unwrap();
        assert_eq!(rep.trials, 20);
        assert!(rep.all_within);
        assert!(rep.max_ratio <= 1.0 + 1e-12);
    }
}
