//! Bound evaluation and verdicts.
//!
//! Every checked inequality is recorded as a [`Check`] carrying both sides
//! and the slack `rhs - lhs` it was judged on. Verdicts use the full-precision
//! values; the serialized report rounds to 12 significant digits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dimension::{ddim_upper, DimensionEstimate, DimensionMode};
use crate::error::{Error, Result};
use crate::metric::{MetricInstance, PointId, RadiusAssignment, Subset, TOLERANCE};
use crate::packing::is_r_separated;
use crate::spanning::{assign_edges, minimum_spanning_tree, root_min_radius, talwar_rhs};

pub fn mean_radius(radii: &RadiusAssignment, subset: &Subset) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let rs = radii.radii_of(subset)?;
    Ok(rs.iter().sum::<f64>() / rs.len() as f64)
}

/// `(5 diam / rbar)^ddim`.
pub fn theorem1_bound(diam: f64, rbar: f64, ddim: f64) -> Result<f64> {
    positive("rbar", rbar)?;
    positive("diam", diam)?;
    Ok(power(5.0 * diam / rbar, ddim))
}

/// `(2 diam / r)^ddim`.
pub fn classical_bound(diam: f64, r: f64, ddim: f64) -> Result<f64> {
    positive("r", r)?;
    positive("diam", diam)?;
    Ok(power(2.0 * diam / r, ddim))
}

/// `(4 / rbar)^d`, for subsets of a d-dimensional normed unit ball.
pub fn volumetric_bound(rbar: f64, d: u32) -> Result<f64> {
    positive("rbar", rbar)?;
    if d == 0 {
        return Err(Error::NonPositiveParameter {
            name: "d",
            value: 0.0,
        });
    }
    Ok((4.0 / rbar).powi(d as i32))
}

fn power(base: f64, exp: f64) -> f64 {
    if exp == 0.0 {
        1.0
    } else {
        base.powf(exp)
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter { name, value })
    }
}

/// One evaluated inequality `lhs <= rhs` (or `<` when strict).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub link: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub strict: bool,
    /// Asserted checks decide the verdict; the rest are reported only.
    pub asserted: bool,
    pub holds: bool,
}

impl Check {
    fn new(link: &str, lhs: f64, rhs: f64, strict: bool, asserted: bool, tol: f64) -> Self {
        let holds = if strict {
            lhs < rhs + tol
        } else {
            lhs <= rhs + tol
        };
        Check {
            link: link.to_string(),
            lhs,
            rhs,
            slack: rhs - lhs,
            strict,
            asserted,
            holds,
        }
    }

    fn rounded(mut self) -> Self {
        self.lhs = sig12(self.lhs);
        self.rhs = sig12(self.rhs);
        self.slack = sig12(self.slack);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JensenCheck {
    /// `rbar^d`.
    pub lhs: f64,
    /// Mean of `R(a)^d`.
    pub rhs: f64,
    pub holds: bool,
}

pub fn jensen_check(radii: &RadiusAssignment, d: u32) -> Result<JensenCheck> {
    if radii.is_empty() {
        return Err(Error::EmptySubset);
    }
    let rbar = mean_radius(radii, &radii.domain())?;
    let lhs = rbar.powi(d as i32);
    let rhs = radii.iter().map(|(_, r)| r.powi(d as i32)).sum::<f64>() / radii.len() as f64;
    Ok(JensenCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + TOLERANCE * rhs.max(1.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BallViolation {
    /// `ρ(a, b) <= (R(a) + R(b)) / 2`: the half-radius balls touch.
    Overlap { a: PointId, b: PointId },
    /// `‖a‖ + R(a)/2 > 2`: the half-radius ball leaves `B(0, 2)`.
    Escapes { a: PointId },
}

/// For a subset of the unit ball: are the balls `B(a, R(a)/2)` pairwise
/// disjoint and inside `B(0, 2)`?
pub fn disjoint_balls_check(
    inst: &MetricInstance,
    subset: &Subset,
    radii: &RadiusAssignment,
) -> Result<(bool, Vec<BallViolation>)> {
    let MetricInstance::Coords { norm, .. } = inst else {
        return Err(Error::NotCoords);
    };
    inst.check_subset(subset)?;
    let rs = radii.radii_of(subset)?;
    let ids = subset.as_slice();
    let mut violations = Vec::new();
    for (k, &a) in ids.iter().enumerate() {
        let len = norm.length(inst.point(a).unwrap().iter().copied());
        if len > 1.0 + TOLERANCE {
            return Err(Error::OutsideUnitBall { point: a, norm: len });
        }
        if len + rs[k] / 2.0 > 2.0 + TOLERANCE {
            violations.push(BallViolation::Escapes { a });
        }
    }
    for (k, &a) in ids.iter().enumerate() {
        for (l, &b) in ids.iter().enumerate().skip(k + 1) {
            if inst.dist(a, b) <= (rs[k] + rs[l]) / 2.0 {
                violations.push(BallViolation::Overlap { a, b });
            }
        }
    }
    Ok((violations.is_empty(), violations))
}

/// Whether every point of `subset` lies in the closed unit ball of the
/// instance norm (coords instances only).
pub fn in_unit_ball(inst: &MetricInstance, subset: &Subset) -> bool {
    match inst {
        MetricInstance::Coords { norm, .. } => subset.iter().all(|p| {
            inst.point(p)
                .is_some_and(|x| norm.length(x.iter().copied()) <= 1.0 + TOLERANCE)
        }),
        MetricInstance::Matrix { .. } => false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub n: usize,
    /// The diameter divided out by normalization.
    pub scale: f64,
    pub root: PointId,
    /// Exponent `min(ddim(A), ddim(Ω))` the links were evaluated with.
    pub exponent: f64,
    pub rbar: f64,
    pub mst_length: f64,
    pub links: Vec<Check>,
}

impl ChainReport {
    pub fn link(&self, name: &str) -> Option<&Check> {
        self.links.iter().find(|c| c.link == name)
    }

    pub fn asserted_hold(&self) -> bool {
        self.links.iter().filter(|c| c.asserted).all(|c| c.holds)
    }
}

/// Walks the MST argument on `subset` after scaling it to unit diameter,
/// with the exponent taken from exact upper dimension estimates of the
/// subset and the whole instance.
pub fn proof_chain_check(
    inst: &MetricInstance,
    subset: &Subset,
    radii: &RadiusAssignment,
) -> Result<ChainReport> {
    let sub = ddim_upper(inst, subset, DimensionMode::Exact)?.ddim_upper;
    let amb = ddim_upper(inst, &inst.all_points(), DimensionMode::Exact)?.ddim_upper;
    proof_chain_with_exponent(inst, subset, radii, sub.min(amb), TOLERANCE)
}

/// [`proof_chain_check`] with a caller-supplied exponent.
///
/// Links: (a) `R(t) <= 1`; (b) `R(a) <= l(e(a))`, worst vertex;
/// (c) `N rbar <= l(E) + 1`; (talwar) `l(E) <= 4 N^(1-1/dd)`;
/// (d) `rbar <= 4 N^(-1/dd) + 1/N`; (e) `rbar < 5 N^(-1/dd)`;
/// (f) `N < (5/rbar)^dd`. Links (talwar), (d) and (e) depend on the external
/// MST length lemma and are reported, not asserted.
pub fn proof_chain_with_exponent(
    inst: &MetricInstance,
    subset: &Subset,
    radii: &RadiusAssignment,
    exponent: f64,
    tol: f64,
) -> Result<ChainReport> {
    if subset.len() < 2 {
        return Err(Error::DegenerateSubset(subset.len()));
    }
    if !is_r_separated(inst, subset, radii)? {
        return Err(Error::NotSeparated);
    }
    if !(exponent > 0.0) {
        return Err(Error::ZeroDimension);
    }
    let (unit, scale) = inst.normalize(subset)?;
    let rs = radii.radii_of(subset)?;
    let scaled = RadiusAssignment::new(rs.iter().enumerate().map(|(k, r)| (k, r / scale)))?;
    let all = unit.all_points();
    let tree = minimum_spanning_tree(&unit, &all)?;
    let root = root_min_radius(&tree, &scaled)?;
    let assignment = assign_edges(&tree, root)?;

    let n = subset.len() as f64;
    let rbar = mean_radius(&scaled, &all)?;
    let mst = tree.total_length;
    let dd = exponent;

    let mut links = Vec::with_capacity(7);
    links.push(Check::new("a", scaled.radius(root)?, 1.0, false, true, tol));
    let worst = assignment
        .assigned
        .iter()
        .map(|(&p, e)| (scaled.get(p).unwrap(), e.length))
        .min_by(|x, y| (x.1 - x.0).total_cmp(&(y.1 - y.0)))
        .expect("at least one non-root vertex");
    links.push(Check::new("b", worst.0, worst.1, false, true, tol));
    links.push(Check::new("c", n * rbar, mst + 1.0, false, true, tol));
    links.push(Check::new("talwar", mst, talwar_rhs(1.0, n, dd), false, false, tol));
    links.push(Check::new(
        "d",
        rbar,
        4.0 * n.powf(-1.0 / dd) + 1.0 / n,
        false,
        false,
        tol,
    ));
    links.push(Check::new("e", rbar, 5.0 * n.powf(-1.0 / dd), true, false, tol));
    links.push(Check::new("f", n, (5.0 / rbar).powf(dd), true, true, tol));

    Ok(ChainReport {
        n: subset.len(),
        scale,
        root: subset.as_slice()[root],
        exponent: dd,
        rbar,
        mst_length: mst,
        links,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Na,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub kind: String,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<String>,
}

impl InstanceDescriptor {
    pub fn of(inst: &MetricInstance) -> Self {
        match inst {
            MetricInstance::Coords { dim, norm, .. } => InstanceDescriptor {
                kind: "coords".into(),
                points: inst.len(),
                dim: Some(*dim),
                norm: Some(norm.to_string()),
            },
            MetricInstance::Matrix { n, .. } => InstanceDescriptor {
                kind: "matrix".into(),
                points: *n,
                dim: None,
                norm: None,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionSummary {
    pub subset_upper: f64,
    pub subset_lower: f64,
    pub ambient_upper: f64,
    pub ambient_lower: f64,
    /// `min(subset_upper, ambient_upper)`, the exponent the bound uses.
    pub exponent: f64,
    pub mode: DimensionMode,
    /// Set when greedy covers produced the estimates.
    pub weakened: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValues {
    pub theorem1: f64,
    /// Same bound with the lower dimension estimates; informational.
    pub theorem1_lower: f64,
    /// `(2 diam / min R)^exponent`; informational.
    pub classical: f64,
    pub volumetric: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumetricChecks {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub checks: Vec<Check>,
    pub ball_violations: Vec<BallViolation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MstSummary {
    pub total_length: f64,
    pub root: PointId,
    /// `[i, j, length]` triples.
    pub edges: Vec<(PointId, PointId, f64)>,
    /// Vertex -> index into `edges`.
    pub assignment: BTreeMap<PointId, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub instance: InstanceDescriptor,
    pub n: usize,
    pub diam: f64,
    pub rbar: f64,
    pub ddim: DimensionSummary,
    pub bounds: BoundValues,
    pub theorem1: Check,
    pub chain: Vec<Check>,
    pub volumetric: VolumetricChecks,
    pub mst: MstSummary,
    pub witness: Subset,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub mode: DimensionMode,
    pub tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: DimensionMode::Exact,
            tolerance: TOLERANCE,
        }
    }
}

pub fn verify_theorem1(
    inst: &MetricInstance,
    subset: &Subset,
    radii: &RadiusAssignment,
    mode: DimensionMode,
) -> Result<BoundReport> {
    verify_theorem1_with(
        inst,
        subset,
        radii,
        VerifyOptions {
            mode,
            ..Default::default()
        },
    )
}

/// Full check on one R-separated subset: dimension estimates for the subset
/// and the whole instance, the bound `|A| <= (5 diam / rbar)^dd`, the proof
/// chain, and (for subsets of a coordinate unit ball) the volumetric checks.
pub fn verify_theorem1_with(
    inst: &MetricInstance,
    subset: &Subset,
    radii: &RadiusAssignment,
    opts: VerifyOptions,
) -> Result<BoundReport> {
    let tol = opts.tolerance;
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if !is_r_separated(inst, subset, radii)? {
        return Err(Error::NotSeparated);
    }
    let n = subset.len();
    let diam = inst.diameter(subset)?;
    let rbar = mean_radius(radii, subset)?;
    let rmin = radii
        .radii_of(subset)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    let sub = ddim_upper(inst, subset, opts.mode)?;
    let amb = ddim_upper(inst, &inst.all_points(), opts.mode)?;
    let dims = summarize(&sub, &amb, opts.mode);
    let dd = dims.exponent;
    let dd_lower = sub.ddim_lower.min(amb.ddim_lower);

    let tree = minimum_spanning_tree(inst, subset)?;
    let root = root_min_radius(&tree, radii)?;
    let assignment = assign_edges(&tree, root)?;
    let mst = MstSummary {
        total_length: sig12(tree.total_length),
        root,
        edges: tree.edges.iter().map(|e| (e.u, e.v, sig12(e.length))).collect(),
        assignment: assignment
            .assigned
            .iter()
            .map(|(&p, a)| (p, a.edge))
            .collect(),
    };

    let (bounds, theorem, chain) = if n == 1 {
        // one point: dd = 0 and the bound is 1
        let bounds = BoundValues {
            theorem1: 1.0,
            theorem1_lower: 1.0,
            classical: 1.0,
            volumetric: None,
        };
        (bounds, Check::new("theorem1", 1.0, 1.0, false, true, tol), Vec::new())
    } else {
        let theorem1 = theorem1_bound(diam, rbar, dd)?;
        let bounds = BoundValues {
            theorem1,
            theorem1_lower: theorem1_bound(diam, rbar, dd_lower)?,
            classical: classical_bound(diam, rmin, dd)?,
            volumetric: None,
        };
        let theorem = Check::new("theorem1", n as f64, theorem1, false, true, tol);
        let chain = proof_chain_with_exponent(inst, subset, radii, dd, tol)?.links;
        (bounds, theorem, chain)
    };

    let volumetric = volumetric_checks(inst, subset, radii, rbar, tol)?;
    let mut bounds = bounds;
    if volumetric.verdict != Verdict::Na {
        if let MetricInstance::Coords { dim, .. } = inst {
            bounds.volumetric = Some(volumetric_bound(rbar, *dim as u32)?);
        }
    }

    let pass = theorem.holds
        && chain.iter().filter(|c| c.asserted).all(|c| c.holds)
        && volumetric.verdict != Verdict::Fail;

    Ok(BoundReport {
        instance: InstanceDescriptor::of(inst),
        n,
        diam: sig12(diam),
        rbar: sig12(rbar),
        ddim: DimensionSummary {
            subset_upper: sig12(dims.subset_upper),
            subset_lower: sig12(dims.subset_lower),
            ambient_upper: sig12(dims.ambient_upper),
            ambient_lower: sig12(dims.ambient_lower),
            exponent: sig12(dims.exponent),
            ..dims
        },
        bounds: BoundValues {
            theorem1: sig12(bounds.theorem1),
            theorem1_lower: sig12(bounds.theorem1_lower),
            classical: sig12(bounds.classical),
            volumetric: bounds.volumetric.map(sig12),
        },
        theorem1: theorem.rounded(),
        chain: chain.into_iter().map(Check::rounded).collect(),
        volumetric,
        mst,
        witness: subset.clone(),
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
    })
}

fn summarize(sub: &DimensionEstimate, amb: &DimensionEstimate, mode: DimensionMode) -> DimensionSummary {
    DimensionSummary {
        subset_upper: sub.ddim_upper,
        subset_lower: sub.ddim_lower,
        ambient_upper: amb.ddim_upper,
        ambient_lower: amb.ddim_lower,
        exponent: sub.ddim_upper.min(amb.ddim_upper),
        mode,
        weakened: mode == DimensionMode::Greedy,
    }
}

fn volumetric_checks(
    inst: &MetricInstance,
    subset: &Subset,
    radii: &RadiusAssignment,
    rbar: f64,
    tol: f64,
) -> Result<VolumetricChecks> {
    let na = |reason: &str| VolumetricChecks {
        verdict: Verdict::Na,
        reason: Some(reason.to_string()),
        checks: Vec::new(),
        ball_violations: Vec::new(),
    };
    let MetricInstance::Coords { dim, .. } = inst else {
        return Ok(na("matrix instance"));
    };
    if subset.len() < 2 {
        return Ok(na("fewer than two points"));
    }
    if !in_unit_ball(inst, subset) {
        return Ok(na("points outside the unit ball"));
    }
    let d = *dim as u32;
    let restricted = radii.restrict(subset)?;
    let power_sum: f64 = restricted.iter().map(|(_, r)| r.powi(d as i32)).sum();
    let jensen = jensen_check(&restricted, d)?;
    let (disjoint, ball_violations) = disjoint_balls_check(inst, subset, radii)?;
    let checks = vec![
        Check::new("power_sum", power_sum, 4f64.powi(d as i32), false, true, tol),
        Check::new("jensen", jensen.lhs, jensen.rhs, false, true, tol * jensen.rhs.max(1.0)),
        Check::new(
            "volumetric",
            subset.len() as f64,
            volumetric_bound(rbar, d)?,
            false,
            true,
            tol,
        ),
    ];
    let ok = disjoint && checks.iter().all(|c| c.holds);
    Ok(VolumetricChecks {
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        reason: None,
        checks: checks.into_iter().map(Check::rounded).collect(),
        ball_violations,
    })
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
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

    fn close(a: f64, b: f64, eps: f64) -> bool {
        (a - b).abs() <= eps
    }

    #[test]
    fn mean_radius_examples() {
        let r = RadiusAssignment::dense(&[0.2, 0.4, 0.6]).unwrap();
        assert!(close(mean_radius(&r, &Subset::full(3)).unwrap(), 0.4, 1e-15));
        let u = RadiusAssignment::uniform(&Subset::full(5), 0.25).unwrap();
        assert_eq!(mean_radius(&u, &Subset::full(5)).unwrap(), 0.25);
        let r = RadiusAssignment::dense(&[0.5, 1.5, 0.5, 0.5]).unwrap();
        assert_eq!(mean_radius(&r, &Subset::full(4)).unwrap(), 0.75);
        assert!(mean_radius(&r, &Subset::default()).is_err());
    }

    #[test]
    fn bound_formulas() {
        assert_eq!(theorem1_bound(1.0, 0.5, 1.0).unwrap(), 10.0);
        assert_eq!(theorem1_bound(1.0, 0.5, 0.0).unwrap(), 1.0);
        let b = theorem1_bound(1.0, 0.99, 2.0).unwrap();
        assert!(close(b, (5.0f64 / 0.99).powi(2), 1e-12));
        assert!(close(b, 25.507, 1e-3));
        assert!(theorem1_bound(1.0, 0.0, 1.0).is_err());
        assert!(theorem1_bound(1.0, -1.0, 1.0).is_err());

        assert_eq!(classical_bound(1.0, 1.0, 3.0).unwrap(), 8.0);
        let c = classical_bound(1.0, 0.99, 2.0).unwrap();
        assert!(c >= 4.0 && close(c, 4.081, 1e-3));
        assert_eq!(classical_bound(1.0, 0.5, 0.0).unwrap(), 1.0);
        assert!(classical_bound(1.0, 0.0, 1.0).is_err());

        assert_eq!(volumetric_bound(1.0, 3).unwrap(), 64.0);
        assert_eq!(volumetric_bound(2.0, 2).unwrap(), 4.0);
        assert_eq!(volumetric_bound(0.5, 2).unwrap(), 64.0);
        assert!(volumetric_bound(0.0, 2).is_err());
    }

    #[test]
    fn jensen_examples() {
        let u = RadiusAssignment::uniform(&Subset::full(4), 0.5).unwrap();
        for d in 1..=6 {
            let j = jensen_check(&u, d).unwrap();
            assert_eq!(j.lhs, j.rhs);
            assert!(j.holds);
        }
        let j = jensen_check(&RadiusAssignment::dense(&[1.0, 3.0]).unwrap(), 2).unwrap();
        assert_eq!((j.lhs, j.rhs, j.holds), (4.0, 5.0, true));
    }

    #[test]
    fn disjoint_ball_examples() {
        let inst = MetricInstance::from_coords(1, Norm::L2, &[vec![-0.5], vec![0.5]]).unwrap();
        let r = RadiusAssignment::dense(&[0.8, 0.8]).unwrap();
        assert_eq!(
            disjoint_balls_check(&inst, &inst.all_points(), &r).unwrap(),
            (true, vec![])
        );
        let near = MetricInstance::from_coords(1, Norm::L2, &[vec![0.0], vec![0.5]]).unwrap();
        let (ok, v) = disjoint_balls_check(&near, &near.all_points(), &r).unwrap();
        assert!(!ok);
        assert_eq!(v, vec![BallViolation::Overlap { a: 0, b: 1 }]);

        let far = line(&[0.0, 3.0]);
        assert!(matches!(
            disjoint_balls_check(&far, &far.all_points(), &r),
            Err(Error::OutsideUnitBall { point: 1, .. })
        ));
        let eq = equidistant(2);
        assert!(matches!(
            disjoint_balls_check(&eq, &eq.all_points(), &r),
            Err(Error::NotCoords)
        ));
    }

    #[test]
    fn chain_equidistant() {
        let eq = equidistant(4);
        let r = RadiusAssignment::uniform(&eq.all_points(), 0.99).unwrap();
        let c = proof_chain_check(&eq, &eq.all_points(), &r).unwrap();
        assert_eq!(c.exponent, 2.0);
        assert_eq!(c.mst_length, 3.0);
        let link_c = c.link("c").unwrap();
        assert!(close(link_c.lhs, 3.96, 1e-12));
        assert_eq!(link_c.rhs, 4.0);
        assert!(close(link_c.slack, 0.04, 1e-12));
        assert!(c.links.iter().all(|l| l.holds));
    }

    #[test]
    fn chain_two_points() {
        let two = line(&[0.0, 1.0]);
        let r = RadiusAssignment::dense(&[0.9, 0.9]).unwrap();
        let c = proof_chain_check(&two, &two.all_points(), &r).unwrap();
        assert_eq!(c.mst_length, 1.0);
        let link_c = c.link("c").unwrap();
        assert!(close(link_c.lhs, 1.8, 1e-12) && link_c.rhs == 2.0 && link_c.holds);
        assert!(c.asserted_hold());
    }

    #[test]
    fn chain_rejects_bad_input() {
        let inst = line(&[0.0, 1.0, 2.0]);
        let r = RadiusAssignment::uniform(&inst.all_points(), 1.5).unwrap();
        assert!(matches!(
            proof_chain_check(&inst, &inst.all_points(), &r),
            Err(Error::NotSeparated)
        ));
        assert!(matches!(
            proof_chain_check(&inst, &Subset::new(vec![1]), &r),
            Err(Error::DegenerateSubset(1))
        ));
    }

    #[test]
    fn verify_equidistant() {
        let eq = equidistant(4);
        let r = RadiusAssignment::uniform(&eq.all_points(), 0.99).unwrap();
        let rep = verify_theorem1(&eq, &eq.all_points(), &r, DimensionMode::Exact).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert_eq!(rep.n, 4);
        assert!(close(rep.bounds.theorem1, 25.507, 1e-3));
        // uniform radii: theorem1 / classical = (5/2)^dd
        assert!(close(
            rep.bounds.theorem1 / rep.bounds.classical,
            2.5f64.powi(2),
            1e-9
        ));
        assert_eq!(rep.volumetric.verdict, Verdict::Na);
        assert_eq!(rep.mst.edges.len(), 3);
    }

    #[test]
    fn verify_singleton_and_errors() {
        let inst = line(&[0.0, 1.0, 2.0]);
        let r = RadiusAssignment::uniform(&inst.all_points(), 1.5).unwrap();
        let rep = verify_theorem1(&inst, &Subset::new(vec![1]), &r, DimensionMode::Exact).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!(rep.chain.is_empty());
        assert!(matches!(
            verify_theorem1(&inst, &inst.all_points(), &r, DimensionMode::Exact),
            Err(Error::NotSeparated)
        ));
    }

    #[test]
    fn verify_unit_ball_runs_volumetric() {
        let inst =
            MetricInstance::from_coords(1, Norm::L2, &[vec![-1.0], vec![0.0], vec![0.6]]).unwrap();
        let r = RadiusAssignment::dense(&[0.9, 0.5, 0.5]).unwrap();
        let rep = verify_theorem1(&inst, &inst.all_points(), &r, DimensionMode::Exact).unwrap();
        assert_eq!(rep.volumetric.verdict, Verdict::Pass);
        assert_eq!(rep.volumetric.checks.len(), 3);
        assert!(rep.bounds.volumetric.is_some());
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn sig12_rounds() {
        assert_eq!(sig12(0.1 + 0.2), 0.3);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(123456789.123456789), 123456789.123);
    }
}
