use std::f64::consts::PI;

use approx::assert_relative_eq;
use chui_core::bounds::*;
use chui_core::geometry::{uniform_circle_config, weighted_arc_config, ChargeConfiguration};
use chui_core::quadrature::{chui_energy, defect_for_length, QuadratureSpec};
use chui_core::{Error, Execution};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn lower_bound_examples() {
    assert_relative_eq!(lower_bound_rhs(&[1.0; 5], 2, NEWMAN_C).unwrap(), PI / 18.0, max_relative = 1e-15);
    for d in 2..5 {
        let v = lower_bound_rhs(&[2.5; 4], d, 0.3).unwrap();
        assert_relative_eq!(v, 0.75, max_relative = 1e-14);
    }
    let v = lower_bound_rhs(&[1.0, 2.0], 2, PI / 128.0).unwrap();
    assert_relative_eq!(v, 5.0 * PI / 384.0, max_relative = 1e-15);
    assert!(lower_bound_rhs(&[1.0, -1.0], 2, 1.0).is_err());
    assert!(lower_bound_rhs(&[1.0], 2, 0.0).is_err());
}

#[test]
fn weight_stats_for_equal_weights() {
    let s = WeightStats::new(&[3.0; 7], 3).unwrap();
    assert_relative_eq!(s.ratio_lower, 3.0, max_relative = 1e-14);
    assert_relative_eq!(s.ratio_upper, 3.0, max_relative = 1e-14);
    assert_relative_eq!(s.A, 21.0);
    assert_relative_eq!(s.B, 63.0);
}

#[test]
fn proof_geometry_membership() {
    let config = ChargeConfiguration::from_angles(&[0.0, 2.0], &[1.0, 4.0]).unwrap();
    let g = ProofGeometry::new(&config).unwrap();
    // d = 2: r_k = α_k / (16 G) and G = A.
    assert_relative_eq!(g.radii[0], 1.0 / 80.0, max_relative = 1e-14);
    assert_relative_eq!(g.radii[1], 4.0 / 80.0, max_relative = 1e-14);
    let center = &g.centers[0];
    assert!(g.contains(0, center));
    // The membership criterion written as a quadratic form.
    let y = &g.points[0];
    let r = g.radii[0];
    for t in [0.0, 0.5, 1.5, 1.99, 2.01, 3.0] {
        let x: Vec<f64> = y.iter().map(|c| (1.0 - t * r) * c).collect();
        let q = x.iter().map(|c| c * c).sum::<f64>() - 2.0 * (1.0 - r) * (x[0] * y[0] + x[1] * y[1]) + 1.0 - 2.0 * r;
        if t > 0.0 && (t - 2.0).abs() > 1e-9 {
            assert_eq!(g.contains(0, &x), q < 0.0, "t = {t}");
        }
    }
    let interior = ChargeConfiguration::planar(&[(Complex64::new(0.5, 0.0), 1.0)]).unwrap();
    assert!(ProofGeometry::new(&interior).is_err());
}

#[test]
fn point_gap_examples() {
    for d in 2..5 {
        let mut y = vec![0.0; d];
        y[0] = 1.0;
        assert_relative_eq!(lemma1_gap(&y, &vec![0.0; d], d).unwrap(), 0.5, max_relative = 1e-15);
    }
    let y = [1.0, 0.0];
    for t in [0.1, 0.5, 0.9, 0.999] {
        let gap = lemma1_gap(&y, &[-t, 0.0], 2).unwrap();
        assert_relative_eq!(gap, 0.5 - t / (1.0 + t), max_relative = 1e-12);
        assert!(gap >= 0.0);
    }
    assert!(lemma1_gap(&y, &[1.0, 0.0], 2).is_err());
    assert!(lemma1_gap(&[0.5, 0.0], &[0.0, 0.0], 2).is_err());
}

#[test]
fn ball_gap_vanishes_at_deepest_point() {
    // The point (1 − 2r) y is on the tangent sphere, where the inequality is
    // an equality.
    let y = [0.0, 1.0];
    for r in [0.01, 0.1, 0.3, 0.49] {
        let x = [0.0, 1.0 - 2.0 * r];
        let gap = lemma2_gap(&y, r, &x, 2).unwrap();
        assert!(gap.abs() < 1e-12 * (1.0 / r), "r = {r}: {gap}");
        let l1 = lemma1_gap(&y, &x, 2).unwrap();
        assert_relative_eq!(l1, (1.0 - r) / (2.0 * r), max_relative = 1e-12);
    }
}

#[test]
fn ball_gap_axis_limit() {
    let r = 0.2;
    for d in [2, 3] {
        let mut y = vec![0.0; d];
        y[0] = 1.0;
        for j in 1..30 {
            let s = 2.0 * r * 0.5f64.powi(j);
            let mut x = y.clone();
            x[0] = 1.0 - s;
            assert!(lemma2_gap(&y, r, &x, d).unwrap() >= -1e-12);
        }
    }
    assert!(lemma2_gap(&[1.0, 0.0], 0.1, &[0.5, 0.0], 2).is_err());
    assert!(lemma2_gap(&[1.0, 0.0], 0.6, &[0.9, 0.0], 2).is_err());
}

#[test]
fn ratio_examples() {
    // Equal radii: x on the second sphere and inside the first.
    let r = 0.25;
    let y1 = [1.0, 0.0];
    let a = 0.4f64;
    let y2 = [a.cos(), a.sin()];
    let c2 = [(1.0 - r) * y2[0], (1.0 - r) * y2[1]];
    let mut hits = 0;
    for i in 0..3600 {
        let t = 2.0 * PI * i as f64 / 3600.0;
        let x = [c2[0] + r * t.cos(), c2[1] + r * t.sin()];
        if let Ok(v) = lemma3_ratio(&y1, r, &y2, r, &x) {
            hits += 1;
            assert!(v <= 1e-12);
        }
    }
    assert!(hits > 0);
    // Near the tangency point of the first ball the ratio vanishes.
    let x = [1.0 - 1e-9, 0.0];
    let v = lemma3_ratio(&y1, 0.1, &y2, 0.1, &x).unwrap();
    assert!((v + 1.0).abs() < 1e-6);
    assert!(lemma3_ratio(&y1, 0.1, &y2, 0.1, &[0.0, 0.0]).is_err());
}

#[test]
fn estar_examples() {
    let single = ChargeConfiguration::from_angles(&[0.3], &[2.0]).unwrap();
    let g = ProofGeometry::new(&single).unwrap();
    let out = estar_check(&g, &g.centers[0]).unwrap();
    assert_eq!(out.selected, 0);
    assert_eq!(out.verdict, Verdict::Holds);
    // One term: 2^d ≥ 1 gives margin 1 − 2^{−d}.
    assert_relative_eq!(out.estar_margin, 0.75, max_relative = 1e-12);
    assert!(estar_check(&g, &[0.0, 0.0]).is_err());

    // In the plane the summed inequality reads 2G·#E_x ≥ A/2 with G = A.
    let config = ChargeConfiguration::from_angles(&[0.0, 0.01], &[1.0, 3.0]).unwrap();
    let g = ProofGeometry::new(&config).unwrap();
    let x = [0.99, 0.002];
    let e = g.containing(&x);
    assert_eq!(e.len(), 2);
    let out = estar_check(&g, &x).unwrap();
    assert_relative_eq!(out.eb0_margin, 4.0 * e.len() as f64 - 1.0, max_relative = 1e-12);
}

#[test]
fn selection_minimizes_rule_with_lowest_index() {
    // Two identical balls: every point is a tie, resolved to index 0.
    let config = ChargeConfiguration::from_angles(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    let g = ProofGeometry::new(&config).unwrap();
    assert_eq!(g.select(&g.centers[1]), Some(0));
}

proptest! {
    #[test]
    fn selection_is_argmin(
        angles in prop::collection::vec(-0.05f64..0.05, 2..6),
        weights in prop::collection::vec(0.1f64..10.0, 6),
        px in 0.0f64..1.0, py in -0.05f64..0.05,
    ) {
        let n = angles.len();
        let config = ChargeConfiguration::from_angles(&angles, &weights[..n]).unwrap();
        let g = ProofGeometry::new(&config).unwrap();
        let x = [1.0 - 0.2 * px, py];
        let e = g.containing(&x);
        match g.select(&x) {
            None => prop_assert!(e.is_empty()),
            Some(k) => {
                prop_assert!(e.contains(&k));
                let key = |j: usize| {
                    let d = ((g.points[j][0] - x[0]).powi(2) + (g.points[j][1] - x[1]).powi(2)).sqrt();
                    d * d / g.radii[j]
                };
                for &j in &e {
                    prop_assert!(key(k) <= key(j));
                    if key(j) == key(k) {
                        prop_assert!(k <= j);
                    }
                }
            }
        }
    }
}

#[test]
fn disk_functional_examples() {
    let boundary = uniform_circle_config(3).unwrap();
    assert_eq!(lemma41_lhs(&boundary).unwrap(), 0.0);
    let center = ChargeConfiguration::planar(&[(Complex64::new(0.0, 0.0), 1.0)]).unwrap();
    assert_relative_eq!(lemma41_lhs(&center).unwrap(), 2.0 * PI, max_relative = 1e-15);
    let half = ChargeConfiguration::planar(&[(Complex64::new(0.5, 0.0), 1.0)]).unwrap();
    assert_relative_eq!(lemma41_lhs(&half).unwrap(), PI, max_relative = 1e-15);
    let weighted = ChargeConfiguration::planar(&[(Complex64::new(0.5, 0.0), 2.0)]).unwrap();
    assert!(matches!(lemma41_lhs(&weighted), Err(Error::NotApplicable(_))));
    let spatial = ChargeConfiguration::new(3, vec![(vec![0.0, 0.0, 0.5], 1.0)]).unwrap();
    assert!(matches!(lemma41_lhs(&spatial), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn disk_functional_pole_at_half() {
    let spec = QuadratureSpec::default();
    let half = ChargeConfiguration::planar(&[(Complex64::new(0.5, 0.0), 1.0)]).unwrap();
    let e = chui_energy(&half, &spec).unwrap();
    assert!(e.value + 3.0 * e.error >= PI);
    // Chord-integral oracle ∫_0^{2π} t_exit(φ) dφ.
    assert!((e.value - 5.869_848_837_357_708_6).abs() < 3e-3);
}

#[test]
fn verdict_thresholds() {
    assert_eq!(Verdict::at_least(1.0, 1.0, 0.0), Verdict::Holds);
    assert_eq!(Verdict::at_least(0.99, 1.0, 0.01), Verdict::Inconclusive);
    assert_eq!(Verdict::at_least(0.96, 1.0, 0.01), Verdict::Violated);
}

#[test]
fn single_charge_budget_is_tight() {
    let spec = QuadratureSpec::default();
    let (config, _) = weighted_arc_config(&[1.0]).unwrap();
    let (budget, err) = reduction_budget(&config, &spec).unwrap();
    assert!((budget - 4.0).abs() < 3.0 * err.max(4e-3));
    let energy = chui_energy(&config, &spec).unwrap();
    assert!((budget - energy.value).abs() < 3.0 * (err + energy.error));
}

#[test]
fn budget_dominates_energy_and_obeys_length_identity() {
    let spec = QuadratureSpec::default();
    let grid: Vec<f64> = (0..=10)
        .map(|j| {
            let l = 2.0 * PI * 0.5f64.powi(j);
            defect_for_length(l, &spec).unwrap().value / l
        })
        .collect();
    let cap = grid.iter().cloned().fold(0.0, f64::max);
    for weights in [vec![1.0, 1.0], vec![1.0, 2.0, 4.0], vec![0.5, 3.0, 0.5, 1.0]] {
        let (config, partition) = weighted_arc_config(&weights).unwrap();
        let (budget, berr) = reduction_budget(&config, &spec).unwrap();
        let energy = chui_energy(&config, &spec).unwrap();
        assert!(energy.value <= budget + 3.0 * (berr + energy.error));
        let stats = WeightStats::new(&weights, 2).unwrap();
        let sum_sq: f64 = partition.lengths().iter().map(|l| l * l).sum();
        assert_relative_eq!(sum_sq, 4.0 * PI * PI * stats.B / (stats.A * stats.A), max_relative = 1e-12);
        // Lengths here lie within the l-grid range, so a slack of one grid
        // spacing in defect/l is allowed.
        assert!(budget / stats.ratio_upper <= 2.0 * PI * cap * 1.05, "{weights:?}");
    }
    let plain = uniform_circle_config(3).unwrap();
    assert!(matches!(reduction_budget(&plain, &spec), Err(Error::NotApplicable(_))));
}

#[test]
fn report_examples() {
    let spec = QuadratureSpec::default();
    let r = make_bound_report(&uniform_circle_config(8).unwrap(), &spec).unwrap();
    assert_eq!(r.lower_newman, Some(PI / 18.0));
    assert_eq!(r.verdicts["newman"], Verdict::Holds);
    assert_eq!(r.lemma41_lhs, Some(0.0));
    assert!(!r.any_violated());

    let (config, _) = weighted_arc_config(&[1.0, 2.0, 4.0]).unwrap();
    let r = make_bound_report(&config, &spec).unwrap();
    assert!(r.upper_budget.is_some());
    assert_eq!(r.verdicts["reduction_budget"], Verdict::Holds);
    assert!(r.lower_newman.is_none());
    assert!(r.lemma41_lhs.is_none());

    let sphere = ChargeConfiguration::new(3, vec![(vec![0.0, 0.0, 1.0], 1.0)]).unwrap();
    let r = make_bound_report(&sphere, &spec).unwrap();
    assert_relative_eq!(r.lower_theorem11, 4.0 * PI / 3.0 / 256.0, max_relative = 1e-14);
    assert_eq!(r.verdicts["theorem11"], Verdict::Holds);
    assert!((r.energy - 2.0 * PI).abs() < 0.02 * 2.0 * PI);

    let json = serde_json::to_value(&r).unwrap();
    for key in [
        "energy", "err", "A", "B", "G", "ratio_lower", "ratio_upper", "lower_newman", "lower_theorem11",
        "upper_budget", "lemma41_lhs", "verdicts",
    ] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn property_suites_pass() {
    for d in [2, 3] {
        for p in Property::ALL {
            let out = property_suite(p, d, 100_000, 11, Execution::default()).unwrap();
            assert!(out.passed(), "{out:?}");
        }
    }
    let out = property_suite(Property::Lemma1, 4, 100_000, 11, Execution::default()).unwrap();
    assert!(out.passed(), "{out:?}");
}

#[test]
fn property_suites_ignore_execution_mode() {
    for p in Property::ALL {
        let a = property_suite(p, 3, 5_000, 2, Execution::Sequential).unwrap();
        let b = property_suite(p, 3, 5_000, 2, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
