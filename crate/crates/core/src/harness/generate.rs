//! Seeded instance and radius generators.
//!
//! All randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, so a spec and seed reproduce the same instance on every
//! platform.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{MetricInstance, Norm, RadiusAssignment, Subset, TOLERANCE};

fn default_norm() -> Norm {
    Norm::L2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `n` i.i.d. uniform points in `[0,1]^d`.
    UniformCube {
        n: usize,
        d: usize,
        #[serde(default = "default_norm")]
        norm: Norm,
    },
    /// `n` uniform points in the closed unit ball of `norm`.
    UnitBall {
        n: usize,
        d: usize,
        #[serde(default = "default_norm")]
        norm: Norm,
    },
    /// `n` points at mutual distance 1.
    Equidistant { n: usize },
    /// The `k^d` integer lattice points of `{0..k-1}^d`.
    Grid {
        k: usize,
        d: usize,
        #[serde(default = "default_norm")]
        norm: Norm,
    },
    /// Random positive symmetric weights closed under shortest paths.
    RandomMetric { n: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::UniformCube { .. } => "uniform_cube",
            Family::UnitBall { .. } => "unit_ball",
            Family::Equidistant { .. } => "equidistant",
            Family::Grid { .. } => "grid",
            Family::RandomMetric { .. } => "random_metric",
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Family::UniformCube { d, .. } | Family::UnitBall { d, .. } | Family::Grid { d, .. } => {
                Some(*d)
            }
            Family::Equidistant { .. } | Family::RandomMetric { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        GeneratorSpec { family, seed }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        GeneratorSpec {
            family: self.family.clone(),
            seed,
        }
    }
}

pub fn gen_instance(spec: &GeneratorSpec) -> Result<MetricInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(what.to_string()))
        }
    };
    match spec.family {
        Family::UniformCube { n, d, norm } => {
            need(n >= 1 && d >= 1, "uniform_cube needs n >= 1 and d >= 1")?;
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
                .collect();
            MetricInstance::from_coords(d, norm, &pts)
        }
        Family::UnitBall { n, d, norm } => {
            need(n >= 1 && d >= 1, "unit_ball needs n >= 1 and d >= 1")?;
            let mut pts = Vec::with_capacity(n);
            while pts.len() < n {
                let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                if norm.length(p.iter().copied()) <= 1.0 {
                    pts.push(p);
                }
            }
            MetricInstance::from_coords(d, norm, &pts)
        }
        Family::Equidistant { n } => {
            need(n >= 1, "equidistant needs n >= 1")?;
            let m: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
                .collect();
            MetricInstance::from_matrix(&m, TOLERANCE)
        }
        Family::Grid { k, d, norm } => {
            need(k >= 1 && d >= 1, "grid needs k >= 1 and d >= 1")?;
            let total = k
                .checked_pow(d as u32)
                .ok_or_else(|| Error::InvalidSpec("grid too large".into()))?;
            let pts: Vec<Vec<f64>> = (0..total)
                .map(|mut idx| {
                    let mut p = vec![0.0; d];
                    for c in p.iter_mut().rev() {
                        *c = (idx % k) as f64;
                        idx /= k;
                    }
                    p
                })
                .collect();
            MetricInstance::from_coords(d, norm, &pts)
        }
        Family::RandomMetric { n } => {
            need(n >= 1, "random_metric needs n >= 1")?;
            let mut m = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    // in (0, 1]
                    let w = 1.0 - rng.gen::<f64>();
                    m[i][j] = w;
                    m[j][i] = w;
                }
            }
            shortest_path_closure(&mut m);
            MetricInstance::from_matrix(&m, TOLERANCE)
        }
    }
}

/// Floyd–Warshall in place. Symmetric input stays exactly symmetric because
/// `a + b == b + a` in IEEE arithmetic.
pub fn shortest_path_closure(m: &mut [Vec<f64>]) {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            let ik = m[i][k];
            for j in 0..n {
                let via = ik + m[k][j];
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RadiusMode {
    Constant { r: f64 },
    UniformRange { lo: f64, hi: f64 },
    /// `R(a) = beta * (distance from a to its nearest neighbor)`.
    NnFraction { beta: f64 },
    /// Pareto with minimum `scale` and shape `alpha`, truncated at `cap`.
    Pareto { alpha: f64, scale: f64, cap: f64 },
}

impl RadiusMode {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match *self {
            RadiusMode::Constant { r } if !(r > 0.0 && r.is_finite()) => {
                bad(format!("constant radius must be positive, got {r}"))
            }
            RadiusMode::UniformRange { lo, hi } if !(lo > 0.0 && hi >= lo && hi.is_finite()) => {
                bad(format!("uniform range needs 0 < lo <= hi, got [{lo}, {hi}]"))
            }
            RadiusMode::NnFraction { beta } if !(beta > 0.0 && beta < 1.0) => {
                bad(format!("nn_fraction needs 0 < beta < 1, got {beta}"))
            }
            RadiusMode::Pareto { alpha, scale, cap }
                if !(alpha > 0.0 && scale > 0.0 && cap >= scale && cap.is_finite()) =>
            {
                bad(format!(
                    "pareto needs alpha > 0 and 0 < scale <= cap, got ({alpha}, {scale}, {cap})"
                ))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for RadiusMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusMode::Constant { r } => write!(f, "constant:{r}"),
            RadiusMode::UniformRange { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            RadiusMode::NnFraction { beta } => write!(f, "nn:{beta}"),
            RadiusMode::Pareto { alpha, scale, cap } => write!(f, "pareto:{alpha},{scale},{cap}"),
        }
    }
}

/// Parses `constant:R`, `uniform:LO,HI`, `nn:BETA` or
/// `pareto:ALPHA,SCALE,CAP`.
impl FromStr for RadiusMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = args
            .split(',')
            .filter(|a| !a.is_empty())
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidSpec(format!("bad number `{a}` in `{s}`")))
            })
            .collect::<Result<_>>()?;
        let mode = match (head, nums.as_slice()) {
            ("constant", &[r]) => RadiusMode::Constant { r },
            ("uniform" | "uniform_range", &[lo, hi]) => RadiusMode::UniformRange { lo, hi },
            ("nn" | "nn_fraction", &[beta]) => RadiusMode::NnFraction { beta },
            ("pareto", &[alpha, scale, cap]) => RadiusMode::Pareto { alpha, scale, cap },
            _ => return Err(Error::InvalidSpec(format!("cannot parse radius spec `{s}`"))),
        };
        mode.validate()?;
        Ok(mode)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusSpec {
    #[serde(flatten)]
    pub mode: RadiusMode,
    #[serde(default)]
    pub seed: u64,
}

impl RadiusSpec {
    pub fn new(mode: RadiusMode, seed: u64) -> Self {
        RadiusSpec { mode, seed }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        RadiusSpec {
            mode: self.mode.clone(),
            seed,
        }
    }
}

pub fn gen_radii(
    inst: &MetricInstance,
    subset: &Subset,
    spec: &RadiusSpec,
) -> Result<RadiusAssignment> {
    spec.mode.validate()?;
    inst.check_subset(subset)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.mode {
        RadiusMode::Constant { r } => RadiusAssignment::uniform(subset, r),
        RadiusMode::UniformRange { lo, hi } => {
            RadiusAssignment::new(subset.iter().map(|p| (p, rng.gen_range(lo..=hi))))
        }
        RadiusMode::Pareto { alpha, scale, cap } => RadiusAssignment::new(subset.iter().map(|p| {
            let u: f64 = rng.gen();
            (p, (scale * (1.0 - u).powf(-1.0 / alpha)).min(cap))
        })),
        RadiusMode::NnFraction { beta } => {
            if subset.len() < 2 {
                return Err(Error::InvalidSpec(
                    "nn_fraction needs at least two points".into(),
                ));
            }
            RadiusAssignment::new(subset.iter().map(|a| {
                let nearest = subset
                    .iter()
                    .filter(|&b| b != a)
                    .map(|b| inst.dist(a, b))
                    .fold(f64::INFINITY, f64::min);
                (a, beta * nearest)
            }))
        }
    }
}
