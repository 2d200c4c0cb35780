//! Minimum spanning trees and the rooted edge assignment.
//!
//! Edges are totally ordered by `(length, smaller id, larger id)`, which makes
//! the MST unique; Prim and Kruskal both honor that order and so return the
//! same tree. Rooting the tree at a point of minimal radius and handing each
//! edge to its child endpoint gives every non-root point exactly one edge.

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{MetricInstance, PointId, RadiusAssignment, Subset, TOLERANCE};

/// Round-off allowance on `R(a) <= l(e(a))`.
pub const EDGE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeEdge {
    /// Smaller endpoint.
    pub u: PointId,
    pub v: PointId,
    pub length: f64,
}

impl TreeEdge {
    fn new(a: PointId, b: PointId, length: f64) -> Self {
        TreeEdge {
            u: a.min(b),
            v: a.max(b),
            length,
        }
    }

    fn order(&self, other: &Self) -> Ordering {
        self.length
            .total_cmp(&other.length)
            .then(self.u.cmp(&other.u))
            .then(self.v.cmp(&other.v))
    }

    pub fn other(&self, end: PointId) -> PointId {
        if end == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanningTree {
    pub vertices: Subset,
    pub edges: Vec<TreeEdge>,
    pub total_length: f64,
}

impl SpanningTree {
    fn from_edges(vertices: Subset, mut edges: Vec<TreeEdge>) -> Self {
        edges.sort_by(TreeEdge::order);
        let total_length = edges.iter().map(|e| e.length).sum();
        SpanningTree {
            vertices,
            edges,
            total_length,
        }
    }

    /// Adjacency by vertex position: (neighbor position, edge index).
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (k, e) in self.edges.iter().enumerate() {
            let a = self.vertices.position(e.u).expect("edge endpoint in tree");
            let b = self.vertices.position(e.v).expect("edge endpoint in tree");
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        adj
    }
}

/// Prim's algorithm on the implicit complete graph, O(N²).
pub fn minimum_spanning_tree(inst: &MetricInstance, subset: &Subset) -> Result<SpanningTree> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let local = inst.local(subset)?;
    let ids = local.ids();
    let m = ids.len();
    let mut in_tree = vec![false; m];
    let mut link: Vec<Option<TreeEdge>> = vec![None; m];
    let mut edges = Vec::with_capacity(m.saturating_sub(1));
    let mut next = 0;
    for _ in 0..m {
        in_tree[next] = true;
        if let Some(e) = link[next] {
            edges.push(e);
        }
        for q in 0..m {
            if in_tree[q] {
                continue;
            }
            let cand = TreeEdge::new(ids[next], ids[q], local.get(next, q));
            if link[q].is_none_or(|cur| cand.order(&cur) == Ordering::Less) {
                link[q] = Some(cand);
            }
        }
        let mut pick: Option<usize> = None;
        for q in (0..m).filter(|&q| !in_tree[q]) {
            let better = match pick {
                None => true,
                Some(p) => link[q].unwrap().order(&link[p].unwrap()) == Ordering::Less,
            };
            if better {
                pick = Some(q);
            }
        }
        match pick {
            Some(p) => next = p,
            None => break,
        }
    }
    Ok(SpanningTree::from_edges(subset.clone(), edges))
}

/// Kruskal's algorithm over all pairs with a union-find; the independent
/// route used to cross-check [`minimum_spanning_tree`].
pub fn kruskal_spanning_tree(inst: &MetricInstance, subset: &Subset) -> Result<SpanningTree> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let local = inst.local(subset)?;
    let ids = local.ids();
    let m = ids.len();
    let mut all: Vec<(usize, usize, TreeEdge)> = Vec::with_capacity(m * (m - 1) / 2);
    for a in 0..m {
        for b in (a + 1)..m {
            all.push((a, b, TreeEdge::new(ids[a], ids[b], local.get(a, b))));
        }
    }
    all.sort_by(|x, y| x.2.order(&y.2));
    let mut dsu = DisjointSet::new(m);
    let mut edges = Vec::with_capacity(m.saturating_sub(1));
    for (a, b, e) in all {
        if dsu.union(a, b) {
            edges.push(e);
            if edges.len() + 1 == m {
                break;
            }
        }
    }
    Ok(SpanningTree::from_edges(subset.clone(), edges))
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Vertex of minimal radius, smallest id on ties.
pub fn root_min_radius(tree: &SpanningTree, radii: &RadiusAssignment) -> Result<PointId> {
    let rs = radii.radii_of(&tree.vertices)?;
    tree.vertices
        .iter()
        .zip(rs)
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(p, _)| p)
        .ok_or(Error::EmptySubset)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssignedEdge {
    /// Index into [`SpanningTree::edges`].
    pub edge: usize,
    pub parent: PointId,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeAssignment {
    pub root: PointId,
    /// Non-root vertex -> the tree edge to its parent.
    pub assigned: BTreeMap<PointId, AssignedEdge>,
}

impl EdgeAssignment {
    pub fn assigned_total(&self) -> f64 {
        self.assigned.values().map(|a| a.length).sum()
    }
}

/// Orients the tree away from `root` and gives each edge to its child.
pub fn assign_edges(tree: &SpanningTree, root: PointId) -> Result<EdgeAssignment> {
    let Some(r) = tree.vertices.position(root) else {
        return Err(Error::RootNotInTree(root));
    };
    let ids = tree.vertices.as_slice();
    let adj = tree.adjacency();
    let mut seen = vec![false; ids.len()];
    let mut assigned = BTreeMap::new();
    let mut queue = VecDeque::from([r]);
    seen[r] = true;
    while let Some(a) = queue.pop_front() {
        for &(b, k) in &adj[a] {
            if seen[b] {
                continue;
            }
            seen[b] = true;
            assigned.insert(
                ids[b],
                AssignedEdge {
                    edge: k,
                    parent: ids[a],
                    length: tree.edges[k].length,
                },
            );
            queue.push_back(b);
        }
    }
    Ok(EdgeAssignment { root, assigned })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEdgeViolation {
    pub point: PointId,
    pub radius: f64,
    pub edge_length: f64,
}

/// Checks `R(a) <= l(e(a))` for every non-root vertex.
pub fn radius_edge_check(
    assignment: &EdgeAssignment,
    radii: &RadiusAssignment,
) -> Result<(bool, Vec<RadiusEdgeViolation>)> {
    let mut violations = Vec::new();
    for (&point, a) in &assignment.assigned {
        let radius = radii.radius(point)?;
        if radius > a.length + EDGE_SLACK {
            violations.push(RadiusEdgeViolation {
                point,
                radius,
                edge_length: a.length,
            });
        }
    }
    Ok((violations.is_empty(), violations))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TalwarCheck {
    /// l(E).
    pub lhs: f64,
    /// 4 · diam · N^(1 - 1/ddim).
    pub rhs: f64,
    pub holds: bool,
}

/// MST length against `4 diam N^(1 - 1/ddim)`. Passing an upper estimate of
/// the dimension only loosens the right-hand side.
pub fn talwar_check(inst: &MetricInstance, subset: &Subset, ddim: f64) -> Result<TalwarCheck> {
    if subset.len() < 2 {
        return Err(Error::DegenerateSubset(subset.len()));
    }
    if !(ddim > 0.0) {
        return Err(Error::ZeroDimension);
    }
    let tree = minimum_spanning_tree(inst, subset)?;
    let diam = inst.diameter(subset)?;
    let n = subset.len() as f64;
    let rhs = talwar_rhs(diam, n, ddim);
    Ok(TalwarCheck {
        lhs: tree.total_length,
        rhs,
        holds: tree.total_length <= rhs + TOLERANCE,
    })
}

pub(crate) fn talwar_rhs(diam: f64, n: f64, ddim: f64) -> f64 {
    4.0 * diam * n.powf(1.0 - 1.0 / ddim)
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
    fn mst_path() {
        let inst = line(&[0.0, 1.0, 3.0]);
        let t = minimum_spanning_tree(&inst, &inst.all_points()).unwrap();
        assert_eq!(t.total_length, 3.0);
        assert_eq!(
            t.edges,
            vec![TreeEdge::new(0, 1, 1.0), TreeEdge::new(1, 2, 2.0)]
        );
        assert_eq!(kruskal_spanning_tree(&inst, &inst.all_points()).unwrap(), t);
    }

    #[test]
    fn mst_equidistant_ties() {
        let eq = equidistant(4);
        let prim = minimum_spanning_tree(&eq, &eq.all_points()).unwrap();
        let kru = kruskal_spanning_tree(&eq, &eq.all_points()).unwrap();
        assert_eq!(prim.total_length, 3.0);
        assert_eq!(prim.edges.len(), 3);
        // unique under the (length, u, v) order: the star at 0
        assert_eq!(prim, kru);
        assert!(prim.edges.iter().all(|e| e.u == 0));
    }

    #[test]
    fn mst_singleton_and_subset() {
        let inst = line(&[0.0, 1.0, 3.0, 10.0]);
        let t = minimum_spanning_tree(&inst, &Subset::new(vec![2])).unwrap();
        assert!(t.edges.is_empty() && t.total_length == 0.0);
        let t = minimum_spanning_tree(&inst, &Subset::new(vec![0, 3])).unwrap();
        assert_eq!(t.edges, vec![TreeEdge::new(0, 3, 10.0)]);
        assert!(minimum_spanning_tree(&inst, &Subset::default()).is_err());
    }

    #[test]
    fn root_examples() {
        let inst = line(&[0.0, 1.0, 3.0]);
        let t = minimum_spanning_tree(&inst, &inst.all_points()).unwrap();
        let r = |v: &[f64]| RadiusAssignment::dense(v).unwrap();
        assert_eq!(root_min_radius(&t, &r(&[0.2, 0.3, 0.4])).unwrap(), 0);
        assert_eq!(root_min_radius(&t, &r(&[0.5, 0.5, 0.5])).unwrap(), 0);
        assert_eq!(root_min_radius(&t, &r(&[0.9, 0.1, 0.5])).unwrap(), 1);
        assert!(root_min_radius(&t, &r(&[0.9])).is_err());
    }

    #[test]
    fn assignment_examples() {
        let inst = line(&[0.0, 1.0, 3.0]);
        let t = minimum_spanning_tree(&inst, &inst.all_points()).unwrap();
        let a = assign_edges(&t, 0).unwrap();
        assert_eq!(a.assigned.len(), 2);
        assert_eq!(a.assigned[&1].parent, 0);
        assert_eq!(a.assigned[&1].length, 1.0);
        assert_eq!(a.assigned[&2].parent, 1);
        assert_eq!(a.assigned[&2].length, 2.0);
        assert!(!a.assigned.contains_key(&0));

        let mid = assign_edges(&t, 1).unwrap();
        assert_eq!(mid.assigned[&0].parent, 1);
        assert_eq!(mid.assigned[&2].parent, 1);

        let eq = equidistant(5);
        let star = minimum_spanning_tree(&eq, &eq.all_points()).unwrap();
        let a = assign_edges(&star, 0).unwrap();
        let edges: Vec<usize> = a.assigned.values().map(|x| x.edge).collect();
        assert_eq!(edges, vec![0, 1, 2, 3]);
        assert_eq!(a.assigned_total(), star.total_length);

        assert!(matches!(assign_edges(&t, 7), Err(Error::RootNotInTree(7))));
    }

    #[test]
    fn radius_edge_examples() {
        let inst = line(&[0.0, 1.0, 3.0]);
        let t = minimum_spanning_tree(&inst, &inst.all_points()).unwrap();
        let a = assign_edges(&t, 0).unwrap();
        let r = RadiusAssignment::dense(&[0.2, 0.3, 0.4]).unwrap();
        assert_eq!(radius_edge_check(&a, &r).unwrap(), (true, vec![]));

        let huge = RadiusAssignment::dense(&[0.2, 5.0, 0.4]).unwrap();
        let (holds, v) = radius_edge_check(&a, &huge).unwrap();
        assert!(!holds);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].point, 1);
    }

    #[test]
    fn talwar_examples() {
        let eq = equidistant(4);
        let c = talwar_check(&eq, &eq.all_points(), 2.0).unwrap();
        assert_eq!(c.lhs, 3.0);
        assert!((c.rhs - 8.0).abs() < 1e-12);
        assert!(c.holds);

        let two = line(&[0.0, 2.5]);
        for d in [0.5, 1.0, 3.0] {
            let c = talwar_check(&two, &two.all_points(), d).unwrap();
            assert_eq!(c.lhs, 2.5);
            assert!(c.holds, "d={d}");
        }
        assert!(matches!(
            talwar_check(&two, &two.all_points(), 0.0),
            Err(Error::ZeroDimension)
        ));
        assert!(talwar_check(&two, &Subset::new(vec![0]), 1.0).is_err());
    }
}
