//! R-separation, the conflict graph and maximum separated subsets.
//!
//! A pair `{a, b}` conflicts when `ρ(a, b) <= max(R(a), R(b))`; separation
//! is strict, so an exact tie is a conflict. Independent sets of the
//! conflict graph are exactly the R-separated subsets, which turns the
//! extremal question into maximum independent set.

use crate::error::{Error, Result};
use crate::metric::{LocalMetric, MetricInstance, PointId, RadiusAssignment, Subset};

/// Slack added to the conflict threshold so that round-off errs toward
/// "conflict".
pub const CONFLICT_SLACK: f64 = 1e-12;

/// Largest subset the exact solver accepts (one machine word of vertices).
pub const EXACT_CAP: usize = 64;

#[inline]
pub fn conflicts(d: f64, ra: f64, rb: f64) -> bool {
    d <= ra.max(rb) + CONFLICT_SLACK
}

/// True iff all distinct pairs of `subset` are more than `r` apart.
pub fn is_uniform_separated(inst: &MetricInstance, subset: &Subset, r: f64) -> Result<bool> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveParameter { name: "r", value: r });
    }
    inst.check_subset(subset)?;
    let ids = subset.as_slice();
    Ok(ids.iter().enumerate().all(|(k, &a)| {
        ids[k + 1..]
            .iter()
            .all(|&b| !conflicts(inst.dist(a, b), r, r))
    }))
}

/// True iff every `a` in `subset` has its nearest other member farther than
/// `R(a)`.
pub fn is_r_separated(
    inst: &MetricInstance,
    subset: &Subset,
    radii: &RadiusAssignment,
) -> Result<bool> {
    inst.check_subset(subset)?;
    let rs = radii.radii_of(subset)?;
    let ids = subset.as_slice();
    for (ka, &a) in ids.iter().enumerate() {
        let nearest = ids
            .iter()
            .enumerate()
            .filter(|&(kb, _)| kb != ka)
            .map(|(_, &b)| inst.dist(a, b))
            .fold(f64::INFINITY, f64::min);
        if nearest <= rs[ka] + CONFLICT_SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Undirected graph on a subset whose independent sets are the R-separated
/// subsets. Adjacency is stored by position in `vertices`.
#[derive(Clone, Debug)]
pub struct ConflictGraph {
    vertices: Subset,
    adj: Vec<Vec<usize>>,
}

impl ConflictGraph {
    pub fn vertices(&self) -> &Subset {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn degree(&self, pos: usize) -> usize {
        self.adj[pos].len()
    }

    /// Edges as point-id pairs `(lo, hi)`, sorted.
    pub fn edges(&self) -> Vec<(PointId, PointId)> {
        let ids = self.vertices.as_slice();
        let mut out = Vec::new();
        for (a, nbrs) in self.adj.iter().enumerate() {
            for &b in nbrs.iter().filter(|&&b| b > a) {
                out.push((ids[a], ids[b]));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: PointId, b: PointId) -> bool {
        match (self.vertices.position(a), self.vertices.position(b)) {
            (Some(pa), Some(pb)) => self.adj[pa].binary_search(&pb).is_ok(),
            _ => false,
        }
    }

    /// Whether no two members of `s` are adjacent. Members outside the
    /// vertex set make the answer false.
    pub fn is_independent(&self, s: &Subset) -> bool {
        let Some(pos) = s
            .iter()
            .map(|p| self.vertices.position(p))
            .collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        pos.iter().enumerate().all(|(k, &a)| {
            pos[k + 1..]
                .iter()
                .all(|b| self.adj[a].binary_search(b).is_err())
        })
    }

    fn masks(&self) -> Vec<u64> {
        debug_assert!(self.len() <= 64);
        self.adj
            .iter()
            .map(|nbrs| nbrs.iter().fold(0u64, |m, &b| m | (1 << b)))
            .collect()
    }
}

pub fn conflict_graph(
    inst: &MetricInstance,
    subset: &Subset,
    radii: &RadiusAssignment,
) -> Result<ConflictGraph> {
    let local = inst.local(subset)?;
    let rs = radii.radii_of(subset)?;
    Ok(build_graph(&local, &rs, subset.clone()))
}

fn build_graph(local: &LocalMetric, rs: &[f64], vertices: Subset) -> ConflictGraph {
    let m = local.len();
    let mut adj = vec![Vec::new(); m];
    for a in 0..m {
        for b in (a + 1)..m {
            if conflicts(local.get(a, b), rs[a], rs[b]) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    ConflictGraph { vertices, adj }
}

/// A maximum R-separated subset of `subset`. Among all maxima, returns the
/// lexicographically smallest sorted index sequence.
pub fn max_separated_subset_exact(
    inst: &MetricInstance,
    subset: &Subset,
    radii: &RadiusAssignment,
) -> Result<Subset> {
    if subset.len() > EXACT_CAP {
        return Err(Error::CapExceeded {
            size: subset.len(),
            cap: EXACT_CAP,
        });
    }
    let g = conflict_graph(inst, subset, radii)?;
    Ok(lex_min_maximum_independent(&g))
}

/// Size of a maximum independent set of `g` (no witness).
pub fn max_independent_size(g: &ConflictGraph) -> Result<usize> {
    if g.len() > EXACT_CAP {
        return Err(Error::CapExceeded {
            size: g.len(),
            cap: EXACT_CAP,
        });
    }
    let adj = g.masks();
    Ok(mis_size(&adj, full_mask(g.len()), usize::MAX))
}

pub fn lex_min_maximum_independent(g: &ConflictGraph) -> Subset {
    let adj = g.masks();
    let mut cand = full_mask(g.len());
    let mut need = mis_size(&adj, cand, usize::MAX);
    let mut chosen = Vec::with_capacity(need);
    for v in 0..g.len() {
        if need == 0 {
            break;
        }
        let bit = 1u64 << v;
        if cand & bit == 0 {
            continue;
        }
        let rest = cand & !adj[v] & !bit;
        if need == 1 || mis_size(&adj, rest, need - 1) >= need - 1 {
            chosen.push(g.vertices.as_slice()[v]);
            need -= 1;
            cand = rest;
        } else {
            cand &= !bit;
        }
    }
    Subset::from_sorted(chosen)
}

fn full_mask(m: usize) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// Maximum independent set size within `cand`, stopping early once `target`
/// is reached.
fn mis_size(adj: &[u64], cand: u64, target: usize) -> usize {
    let mut s = MisSearch {
        adj,
        best: 0,
        target,
    };
    s.search(cand, 0);
    s.best
}

struct MisSearch<'a> {
    adj: &'a [u64],
    best: usize,
    target: usize,
}

impl MisSearch<'_> {
    fn search(&mut self, mut cand: u64, mut size: usize) {
        if self.best >= self.target {
            return;
        }
        // isolated vertices always belong to some maximum set
        let mut isolated = 0u64;
        for v in bits(cand) {
            if self.adj[v] & cand == 0 {
                isolated |= 1 << v;
            }
        }
        size += isolated.count_ones() as usize;
        cand &= !isolated;
        if cand == 0 {
            self.best = self.best.max(size);
            return;
        }
        if size + self.clique_cover(cand) <= self.best {
            return;
        }
        let (v, _) = bits(cand)
            .map(|v| (v, (self.adj[v] & cand).count_ones()))
            .fold((64, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let bit = 1u64 << v;
        self.search(cand & !self.adj[v] & !bit, size + 1);
        self.search(cand & !bit, size);
    }

    /// Greedy partition of `cand` into cliques; an independent set takes at
    /// most one vertex from each.
    fn clique_cover(&self, cand: u64) -> usize {
        let mut rest = cand;
        let mut k = 0;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= !(1 << v);
            let mut grow = rest & self.adj[v];
            while grow != 0 {
                let u = grow.trailing_zeros() as usize;
                rest &= !(1 << u);
                grow = (grow & !(1 << u)) & self.adj[u];
            }
            k += 1;
        }
        k
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

/// Scans points by ascending radius (ties by index) and keeps each one that
/// conflicts with nothing kept so far.
pub fn max_separated_subset_greedy(
    inst: &MetricInstance,
    subset: &Subset,
    radii: &RadiusAssignment,
) -> Result<Subset> {
    inst.check_subset(subset)?;
    let rs = radii.radii_of(subset)?;
    let ids = subset.as_slice();
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| rs[a].total_cmp(&rs[b]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for a in order {
        if kept
            .iter()
            .all(|&b| !conflicts(inst.dist(ids[a], ids[b]), rs[a], rs[b]))
        {
            kept.push(a);
        }
    }
    Ok(kept.into_iter().map(|k| ids[k]).collect())
}

/// M(r): the largest r-separated subset, with a witness.
pub fn packing_number(inst: &MetricInstance, subset: &Subset, r: f64) -> Result<(usize, Subset)> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveParameter { name: "r", value: r });
    }
    let radii = RadiusAssignment::uniform(subset, r)?;
    let witness = max_separated_subset_exact(inst, subset, &radii)?;
    Ok((witness.len(), witness))
}

/// M(r) without a witness; cheaper when only the count matters.
pub(crate) fn packing_count(local: &LocalMetric, r: f64) -> usize {
    let rs = vec![r; local.len()];
    let g = build_graph(local, &rs, Subset::full(local.len()));
    mis_size(&g.masks(), full_mask(g.len()), usize::MAX)
}
