//! Finite metric instances: coordinate point sets under L1/L2/Linf, or
//! explicit distance matrices.
//!
//! Instances are immutable after construction and validated on the way in,
//! so every function downstream may assume the metric axioms. Coordinate
//! instances are never lowered to a full matrix unless asked for
//! ([`MetricInstance::to_matrix`]); per-subset work goes through
//! [`LocalMetric`], a dense matrix over just the points in play.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a point inside one instance.
pub type PointId = usize;

/// Default comparison tolerance for verdicts and metric validation.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn length(self, v: impl IntoIterator<Item = f64>) -> f64 {
        let it = v.into_iter();
        match self {
            Norm::L1 => it.map(f64::abs).sum(),
            Norm::L2 => it.map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => it.map(f64::abs).fold(0.0, f64::max),
        }
    }

    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        self.length(a.iter().zip(b).map(|(x, y)| x - y))
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        })
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" | "l_inf" | "max" => Ok(Norm::Linf),
            other => Err(Error::InvalidSpec(format!("unknown norm `{other}`"))),
        }
    }
}

/// A finite metric space.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricInstance {
    Coords {
        dim: usize,
        norm: Norm,
        /// Row-major, `n * dim` values.
        coords: Vec<f64>,
    },
    Matrix {
        n: usize,
        /// Row-major, `n * n` values.
        dist: Vec<f64>,
    },
}

impl MetricInstance {
    /// Builds a coordinate instance. Points must share one dimension and be
    /// pairwise distinct.
    pub fn from_coords(dim: usize, norm: Norm, points: &[Vec<f64>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInstance("instance has no points".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidInstance("dimension must be positive".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInstance(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInstance(format!("point {i} is not finite")));
            }
            coords.extend_from_slice(p);
        }
        let inst = MetricInstance::Coords { dim, norm, coords };
        let n = inst.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if inst.dist(i, j) <= 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "points {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(inst)
    }

    /// Builds a matrix instance, rejecting anything `validate_metric` flags.
    pub fn from_matrix(rows: &[Vec<f64>], tolerance: f64) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInstance("instance has no points".into()));
        }
        let violations = validate_metric(rows, tolerance)?;
        if !violations.is_empty() {
            return Err(Error::InvalidMetric(violations));
        }
        let n = rows.len();
        let dist = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Ok(MetricInstance::Matrix { n, dist })
    }

    pub fn len(&self) -> usize {
        match self {
            MetricInstance::Coords { dim, coords, .. } => coords.len() / dim,
            MetricInstance::Matrix { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_coords(&self) -> bool {
        matches!(self, MetricInstance::Coords { .. })
    }

    /// Coordinates of point `i` (coords variant only).
    pub fn point(&self, i: PointId) -> Option<&[f64]> {
        match self {
            MetricInstance::Coords { dim, coords, .. } => coords.get(i * dim..(i + 1) * dim),
            MetricInstance::Matrix { .. } => None,
        }
    }

    /// Unchecked distance; panics on a bad index.
    pub(crate) fn dist(&self, i: PointId, j: PointId) -> f64 {
        if i == j {
            return 0.0;
        }
        match self {
            MetricInstance::Coords { dim, norm, coords } => {
                let a = &coords[i * dim..(i + 1) * dim];
                let b = &coords[j * dim..(j + 1) * dim];
                norm.dist(a, b)
            }
            MetricInstance::Matrix { n, dist } => dist[i * n + j],
        }
    }

    pub fn check_index(&self, i: PointId) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
        }
    }

    pub fn check_subset(&self, subset: &Subset) -> Result<()> {
        match subset.as_slice().last() {
            Some(&last) => self.check_index(last),
            None => Ok(()),
        }
    }

    /// ρ(i, j).
    pub fn distance(&self, i: PointId, j: PointId) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(self.dist(i, j))
    }

    pub fn all_points(&self) -> Subset {
        Subset::full(self.len())
    }

    /// Largest pairwise distance within `subset`; zero for a singleton.
    pub fn diameter(&self, subset: &Subset) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        self.check_subset(subset)?;
        let ids = subset.as_slice();
        let mut diam = 0.0f64;
        for (k, &i) in ids.iter().enumerate() {
            for &j in &ids[k + 1..] {
                diam = diam.max(self.dist(i, j));
            }
        }
        Ok(diam)
    }

    /// Every instance point within distance `r` of `center`, center included.
    pub fn closed_ball(&self, center: PointId, r: f64) -> Result<Subset> {
        self.closed_ball_within(&self.all_points(), center, r)
    }

    /// Closed ball intersected with `subset`.
    pub fn closed_ball_within(&self, subset: &Subset, center: PointId, r: f64) -> Result<Subset> {
        self.check_index(center)?;
        self.check_subset(subset)?;
        if r.is_nan() || r < 0.0 {
            return Err(Error::InvalidSpec(format!("ball radius must be >= 0, got {r}")));
        }
        Ok(Subset::from_sorted(
            subset
                .iter()
                .filter(|&p| self.dist(center, p) <= r)
                .collect(),
        ))
    }

    /// Restricts to `subset` and divides every distance by its diameter.
    /// Returns the rescaled instance (indices renumbered `0..|subset|` in
    /// subset order) and the scale that was divided out.
    pub fn normalize(&self, subset: &Subset) -> Result<(MetricInstance, f64)> {
        let diam = self.diameter(subset)?;
        if subset.len() < 2 || diam <= 0.0 {
            return Err(Error::DegenerateSubset(subset.len()));
        }
        let inst = match self {
            MetricInstance::Coords { dim, norm, .. } => {
                let mut coords = Vec::with_capacity(subset.len() * dim);
                for p in subset.iter() {
                    coords.extend(self.point(p).unwrap().iter().map(|x| x / diam));
                }
                MetricInstance::Coords {
                    dim: *dim,
                    norm: *norm,
                    coords,
                }
            }
            MetricInstance::Matrix { .. } => {
                let m = subset.len();
                let mut dist = vec![0.0; m * m];
                for (a, i) in subset.iter().enumerate() {
                    for (b, j) in subset.iter().enumerate() {
                        dist[a * m + b] = self.dist(i, j) / diam;
                    }
                }
                MetricInstance::Matrix { n: m, dist }
            }
        };
        Ok((inst, diam))
    }

    /// The full distance matrix.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.dist(i, j)).collect())
            .collect()
    }

    /// Dense distance table over the points of `subset`.
    pub fn local(&self, subset: &Subset) -> Result<LocalMetric> {
        self.check_subset(subset)?;
        Ok(LocalMetric::new(self, subset))
    }
}

/// Distances among the members of one subset, indexed by position in it.
#[derive(Clone, Debug)]
pub struct LocalMetric {
    ids: Vec<PointId>,
    dist: Vec<f64>,
}

impl LocalMetric {
    fn new(inst: &MetricInstance, subset: &Subset) -> Self {
        let ids = subset.as_slice().to_vec();
        let m = ids.len();
        let mut dist = vec![0.0; m * m];
        for a in 0..m {
            for b in (a + 1)..m {
                let d = inst.dist(ids[a], ids[b]);
                dist[a * m + b] = d;
                dist[b * m + a] = d;
            }
        }
        LocalMetric { ids, dist }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.ids.len() + b]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[PointId] {
        &self.ids
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Sorted distinct off-diagonal distances.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let m = self.len();
        let mut ds: Vec<f64> = (0..m)
            .flat_map(|a| ((a + 1)..m).map(move |b| (a, b)))
            .map(|(a, b)| self.get(a, b))
            .collect();
        ds.sort_by(f64::total_cmp);
        ds.dedup();
        ds
    }
}

/// A sorted set of point ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(Vec<PointId>);

impl Subset {
    /// Sorts and removes duplicates.
    pub fn new(mut ids: Vec<PointId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Subset(ids)
    }

    pub(crate) fn from_sorted(ids: Vec<PointId>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        Subset(ids)
    }

    pub fn full(n: usize) -> Self {
        Subset((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: PointId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn position(&self, id: PointId) -> Option<usize> {
        self.0.binary_search(&id).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[PointId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<PointId> {
        self.0
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.iter().all(|p| other.contains(p))
    }
}

impl FromIterator<PointId> for Subset {
    fn from_iter<I: IntoIterator<Item = PointId>>(iter: I) -> Self {
        Subset::new(iter.into_iter().collect())
    }
}

/// Per-point separation radii, R: A -> (0, inf).
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusAssignment(BTreeMap<PointId, f64>);

impl RadiusAssignment {
    pub fn new(pairs: impl IntoIterator<Item = (PointId, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (point, radius) in pairs {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::NonPositiveRadius { point, radius });
            }
            map.insert(point, radius);
        }
        Ok(RadiusAssignment(map))
    }

    /// Radii for points `0..radii.len()`.
    pub fn dense(radii: &[f64]) -> Result<Self> {
        Self::new(radii.iter().copied().enumerate())
    }

    pub fn uniform(subset: &Subset, r: f64) -> Result<Self> {
        Self::new(subset.iter().map(|p| (p, r)))
    }

    pub fn get(&self, id: PointId) -> Option<f64> {
        self.0.get(&id).copied()
    }

    pub fn radius(&self, id: PointId) -> Result<f64> {
        self.get(id).ok_or(Error::MissingRadius(id))
    }

    /// Radii of `subset`, in subset order; errors on the first missing one.
    pub fn radii_of(&self, subset: &Subset) -> Result<Vec<f64>> {
        subset.iter().map(|p| self.radius(p)).collect()
    }

    pub fn restrict(&self, subset: &Subset) -> Result<Self> {
        Ok(RadiusAssignment(
            subset
                .iter()
                .map(|p| self.radius(p).map(|r| (p, r)))
                .collect::<Result<_>>()?,
        ))
    }

    pub fn domain(&self) -> Subset {
        Subset::from_sorted(self.0.keys().copied().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (PointId, f64)> + '_ {
        self.0.iter().map(|(&p, &r)| (p, r))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    Symmetry { i: usize, j: usize },
    ZeroDiagonal { i: usize },
    Positivity { i: usize, j: usize },
    /// m[i][k] > m[i][j] + m[j][k].
    Triangle { i: usize, k: usize, j: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Symmetry { i, j } => write!(f, "symmetry fails at ({i},{j})"),
            Violation::ZeroDiagonal { i } => write!(f, "nonzero diagonal at {i}"),
            Violation::Positivity { i, j } => write!(f, "non-positive distance at ({i},{j})"),
            Violation::Triangle { i, k, j } => {
                write!(f, "triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")
            }
        }
    }
}

/// Checks the metric axioms on a square matrix. Triangle violations are
/// reported once per unordered pair `{i, k}` (with `i < k`) and witness `j`.
pub fn validate_metric(m: &[Vec<f64>], tolerance: f64) -> Result<Vec<Violation>> {
    let n = m.len();
    for (row, r) in m.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NonSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
    }
    let tol = |scale: f64| tolerance * scale.abs().max(1.0);
    let mut out = Vec::new();
    for i in 0..n {
        if !(m[i][i].abs() <= tolerance) {
            out.push(Violation::ZeroDiagonal { i });
        }
        for j in (i + 1)..n {
            if !((m[i][j] - m[j][i]).abs() <= tol(m[i][j])) {
                out.push(Violation::Symmetry { i, j });
            }
            if !(m[i][j] > 0.0 && m[j][i] > 0.0 && m[i][j].is_finite()) {
                out.push(Violation::Positivity { i, j });
            }
        }
    }
    for i in 0..n {
        for k in (i + 1)..n {
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let rhs = m[i][j] + m[j][k];
                if m[i][k] > rhs + tol(rhs) {
                    out.push(Violation::Triangle { i, k, j });
                }
            }
        }
    }
    Ok(out)
}
