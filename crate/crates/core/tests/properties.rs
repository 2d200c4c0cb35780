use nupack::{
    assign_edges, critical_radii, conflict_graph, is_r_separated, max_separated_subset_exact,
    max_separated_subset_greedy, min_halving_cover, minimum_spanning_tree, packing_number,
    radius_edge_check, root_min_radius, theorem1_bound, DimensionMode, MetricInstance, Norm,
    RadiusAssignment, Subset,
};
use proptest::prelude::*;

fn norm() -> impl Strategy<Value = Norm> {
    prop_oneof![Just(Norm::L1), Just(Norm::L2), Just(Norm::Linf)]
}

/// A planar instance with distinct points and one radius per point.
fn instance(max_n: usize) -> impl Strategy<Value = (MetricInstance, Vec<f64>)> {
    (2..=max_n, norm()).prop_flat_map(|(n, norm)| {
        (
            prop::collection::vec(prop::collection::vec(0.0..1.0f64, 2), n),
            prop::collection::vec(0.01..0.6f64, n),
        )
            .prop_filter_map("coincident points", move |(pts, rs)| {
                MetricInstance::from_coords(2, norm, &pts).ok().map(|m| (m, rs))
            })
    })
}

fn subsets(n: usize) -> impl Iterator<Item = Subset> {
    (1u32..1 << n).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn independent_sets_are_exactly_the_separated_subsets((inst, rs) in instance(10)) {
        let radii = RadiusAssignment::dense(&rs).unwrap();
        let g = conflict_graph(&inst, &inst.all_points(), &radii).unwrap();
        for s in subsets(inst.len()) {
            prop_assert_eq!(g.is_independent(&s), is_r_separated(&inst, &s, &radii).unwrap());
        }
    }

    #[test]
    fn shrinking_radii_never_shrinks_the_optimum((inst, rs) in instance(12), f in 0.1..1.0f64) {
        let all = inst.all_points();
        let big = RadiusAssignment::dense(&rs).unwrap();
        let small = RadiusAssignment::dense(&rs.iter().map(|r| r * f).collect::<Vec<_>>()).unwrap();
        let a = max_separated_subset_exact(&inst, &all, &big).unwrap();
        let b = max_separated_subset_exact(&inst, &all, &small).unwrap();
        prop_assert!(b.len() >= a.len());
        // a separated set stays separated when radii shrink
        prop_assert!(is_r_separated(&inst, &a, &small).unwrap());
        let (m1, _) = packing_number(&inst, &all, rs[0]).unwrap();
        let (m2, _) = packing_number(&inst, &all, rs[0] * f).unwrap();
        prop_assert!(m2 >= m1);
    }

    #[test]
    fn greedy_is_feasible_and_no_larger((inst, rs) in instance(16)) {
        let all = inst.all_points();
        let radii = RadiusAssignment::dense(&rs).unwrap();
        let g = max_separated_subset_greedy(&inst, &all, &radii).unwrap();
        let e = max_separated_subset_exact(&inst, &all, &radii).unwrap();
        prop_assert!(is_r_separated(&inst, &g, &radii).unwrap());
        prop_assert!(!g.is_empty() && g.len() <= e.len());
    }

    #[test]
    fn normalized_diameter_is_one((inst, _) in instance(12)) {
        let (scaled, diam) = inst.normalize(&inst.all_points()).unwrap();
        prop_assert!((scaled.diameter(&scaled.all_points()).unwrap() - 1.0).abs() <= 1e-9);
        prop_assert!(diam > 0.0);
    }

    #[test]
    fn balls_grow_with_radius((inst, _) in instance(12), r in 0.0..1.5f64, dr in 0.0..1.0f64) {
        for c in 0..inst.len() {
            let small = inst.closed_ball(c, r).unwrap();
            let big = inst.closed_ball(c, r + dr).unwrap();
            prop_assert!(small.contains(c));
            prop_assert!(small.is_subset_of(&big));
        }
    }

    #[test]
    fn matrix_form_agrees_with_coords((inst, _) in instance(12)) {
        let m = MetricInstance::from_matrix(&inst.to_matrix(), 1e-9).unwrap();
        for i in 0..inst.len() {
            for j in 0..inst.len() {
                let d = (m.distance(i, j).unwrap() - inst.distance(i, j).unwrap()).abs();
                prop_assert!(d <= 1e-12);
            }
        }
    }

    #[test]
    fn assignment_covers_the_tree_and_respects_radii((inst, rs) in instance(16)) {
        let all = inst.all_points();
        let radii = RadiusAssignment::dense(&rs).unwrap();
        let sep = max_separated_subset_exact(&inst, &all, &radii).unwrap();
        prop_assume!(sep.len() >= 2);
        let tree = minimum_spanning_tree(&inst, &sep).unwrap();
        let root = root_min_radius(&tree, &radii).unwrap();
        let asg = assign_edges(&tree, root).unwrap();
        prop_assert_eq!(asg.assigned.len(), sep.len() - 1);
        prop_assert!((asg.assigned_total() - tree.total_length).abs() <= 1e-9);
        let (holds, _) = radius_edge_check(&asg, &radii).unwrap();
        prop_assert!(holds);
        // strict form: every non-root radius is below its edge
        for (p, e) in &asg.assigned {
            prop_assert!(radii.get(*p).unwrap() < e.length);
        }
    }

    #[test]
    fn bound_is_monotone(diam in 0.1..10.0f64, rbar in 0.01..5.0f64, dd in 0.0..6.0f64, k in 1.0..3.0f64) {
        let b = theorem1_bound(diam, rbar, dd).unwrap();
        prop_assert!(theorem1_bound(diam * k, rbar, dd).unwrap() >= b);
        prop_assert!(theorem1_bound(diam, rbar * k, dd).unwrap() <= b);
    }

    #[test]
    fn covers_are_constant_between_critical_radii((inst, _) in instance(8), t in 0.05..0.95f64) {
        let all = inst.all_points();
        let crit = critical_radii(&inst, &all).unwrap();
        for w in crit.windows(2) {
            let inside = w[0] + t * (w[1] - w[0]);
            for c in 0..inst.len() {
                let (mid, _) = min_halving_cover(&inst, &all, c, inside, DimensionMode::Exact).unwrap();
                let probe = w[0] + 0.5 * (w[1] - w[0]);
                let (p, _) = min_halving_cover(&inst, &all, c, probe, DimensionMode::Exact).unwrap();
                prop_assert_eq!(mid, p);
            }
        }
    }
}
