//! The end-to-end check suite: ten numbered criteria plus bound reports for
//! the bundled corpus.
//!
//! Reports hold only values that are deterministic in the seed; timings are
//! returned separately so two runs can be compared byte for byte.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{
    lemma41_lhs, make_bound_report, property_suite, reduction_budget, require_converged, Property, Verdict, WeightStats,
    NEWMAN_C,
};
use crate::corpus::{bundled, log_uniform_weights, random_weighted_configs};
use crate::error::Result;
use crate::geometry::{random_config, uniform_circle_config, weighted_arc_config, ChargeConfiguration};
use crate::optimizer::{local_min_certificate, minimize_positions, Positions, SearchMethod, SearchSettings};
use crate::par::Execution;
use crate::quadrature::{chui_energy, defect_for_length, two_pole_l1, QuadratureSpec};
use crate::rng::{block_rng, purpose};

pub const CRITERIA: [u8; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

/// Criteria re-run under the other execution mode by criterion 10.
const DETERMINISM_SUBSET: [u8; 5] = [1, 2, 5, 6, 7];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub execution: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            execution: Execution::default(),
        }
    }
}

impl VerifyOptions {
    fn spec(&self) -> QuadratureSpec {
        let mut s = QuadratureSpec::default().with_seed(self.seed);
        s.execution = self.execution;
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub summary: String,
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusOutcome {
    pub name: String,
    pub energy: f64,
    pub err: f64,
    pub verdicts: Value,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionOutcome>,
    pub corpus: Vec<CorpusOutcome>,
}

fn outcome(id: u8, name: &str, passed: bool, summary: String, details: Value) -> CriterionOutcome {
    CriterionOutcome {
        id,
        name: name.into(),
        passed,
        summary,
        details,
    }
}

/// Run a single criterion.
pub fn run_criterion(id: u8, opts: &VerifyOptions) -> Result<CriterionOutcome> {
    match id {
        1 => single_charge(opts),
        2 => newman(opts),
        3 => weighted_lower_bound(opts),
        4 => arc_order(opts),
        5 => defect_sweep(opts),
        6 => two_pole_sweep(opts),
        7 => interior_poles(opts),
        8 => lemma_suites(opts),
        9 => optimizer(opts),
        10 => determinism(opts),
        _ => Err(crate::error::invalid(format!("no criterion {id}"))),
    }
}

/// Run every criterion and the corpus; also returns wall-clock time per
/// criterion (id 0 is the corpus).
pub fn run_all(opts: &VerifyOptions) -> Result<(VerifyReport, Vec<(u8, Duration)>)> {
    let mut criteria = Vec::new();
    let mut timings = Vec::new();
    for id in CRITERIA {
        let t = Instant::now();
        criteria.push(run_criterion(id, opts)?);
        timings.push((id, t.elapsed()));
    }
    let t = Instant::now();
    let corpus = corpus_reports(opts)?;
    timings.push((0, t.elapsed()));
    let passed = criteria.iter().all(|c| c.passed) && corpus.iter().all(|c| !c.violated);
    Ok((
        VerifyReport {
            seed: opts.seed,
            passed,
            criteria,
            corpus,
        },
        timings,
    ))
}

/// Bound reports for every bundled configuration.
pub fn corpus_reports(opts: &VerifyOptions) -> Result<Vec<CorpusOutcome>> {
    let spec = opts.spec();
    bundled()?
        .into_iter()
        .map(|entry| {
            let r = make_bound_report(&entry.config, &spec)?;
            Ok(CorpusOutcome {
                name: entry.name.into(),
                energy: r.energy,
                err: r.err,
                verdicts: serde_json::to_value(&r.verdicts)?,
                violated: r.any_violated(),
            })
        })
        .collect()
}

fn energy(config: &ChargeConfiguration, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let r = chui_energy(config, spec)?;
    require_converged(&r)?;
    Ok((r.value, r.error))
}

fn single_charge(opts: &VerifyOptions) -> Result<CriterionOutcome> {
    let spec = opts.spec();
    let planar = ChargeConfiguration::new(2, vec![(vec![1.0, 0.0], 1.0)])?;
    let spatial = ChargeConfiguration::new(3, vec![(vec![0.0, 0.0, 1.0], 1.0)])?;
    let (e2, r2) = energy(&planar, &spec)?;
    let (e3, r3) = energy(&spatial, &spec)?;
    let rel2 = (e2 - 4.0).abs() / 4.0;
    let rel3 = (e3 - 2.0 * PI).abs() / (2.0 * PI);
    let passed = rel2 <= 1e-2 && rel3 <= 1e-2;
    Ok(outcome(
        1,
        "single-charge oracles",
        passed,
        format!("d=2: {e2:.6} (rel {rel2:.1e}), d=3: {e3:.6} (rel {rel3:.1e})"),
        json!({"d2": {"energy": e2, "err": r2, "oracle": 4.0}, "d3": {"energy": e3, "err": r3, "oracle": 2.0 * PI}}),
    ))
}

fn newman(opts: &VerifyOptions) -> Result<CriterionOutcome> {
    let spec = opts.spec();
    let mut rows = Vec::new();
    let mut passed = true;
    let mut least = f64::INFINITY;
    for n in [1, 2, 4, 8, 16, 32] {
        let (e, err) = energy(&uniform_circle_config(n)?, &spec)?;
        let verdict = Verdict::at_least(e, NEWMAN_C, err);
        passed &= verdict != Verdict::Violated;
        least = least.min(e);
        rows.push(json!({"n": n, "energy": e, "err": err, "verdict": verdict}));
    }
    Ok(outcome(
        2,
        "newman bound",
        passed,
        format!("min energy {least:.6} vs pi/18 = {NEWMAN_C:.6}"),
        json!({"bound": NEWMAN_C, "rows": rows}),
    ))
}

fn weighted_lower_bound(opts: &VerifyOptions) -> Result<CriterionOutcome> {
    let spec = opts.spec();
    let configs = random_weighted_configs(opts.seed, 50, 16)?;
    let mut rows = Vec::new();
    let mut violations = 0;
    let mut min_ratio = f64::INFINITY;
    for config in &configs {
        let d = config.dimension();
        let (e, err) = energy(config, &spec)?;
        let bound = crate::bounds::lower_bound_rhs(&config.weights(), d, crate::bounds::proof_c(d))?;
        let verdict = Verdict::at_least(e, bound, err);
        if verdict == Verdict::Violated {
            violations += 1;
        }
        min_ratio = min_ratio.min(e / bound);
        rows.push(json!({"d": d, "n": config.len(), "energy": e, "err": err, "bound": bound, "verdict": verdict}));
    }
    Ok(outcome(
        3,
        "weighted lower bound",
        violations == 0,
        format!("{violations} violations over {} configurations; min energy/bound {min_ratio:.3}", configs.len()),
        json!({"rows": rows}),
    ))
}

/// Defect over the grid `l = 2π·2^{−j}`, `j = 0..=10`.
fn defect_grid(spec: &QuadratureSpec) -> Result<Vec<(f64, f64, f64)>> {
    (0..=10)
        .map(|j| {
            let l = 2.0 * PI * 0.5f64.powi(j);
            let r = defect_for_length(l, spec)?;
            require_converged(&r)?;
            Ok((l, r.value, r.error))
        })
        .collect()
}

fn arc_order(opts: &VerifyOptions) -> Result<CriterionOutcome> {
    let spec = opts.spec();
    let grid = defect_grid(&spec)?;
    let cap = grid.iter().map(|(l, v, _)| v / l).fold(0.0, f64::max);
    let mut weight_sets: Vec<Vec<f64>> = random_weighted_configs(opts.seed, 50, 16)?
        .iter()
        .map(ChargeConfiguration::weights)
        .filter(|w| w.len() >= 2)
        .collect();
    for (i, n) in [24, 32, 48, 64].into_iter().enumerate() {
        let mut rng = block_rng(opts.seed, purpose::CORPUS, 1000 + i as u32);
        weight_sets.push(log_uniform_weights(&mut rng, n));
    }
    let mut rows = Vec::new();
    let mut passed = true;
    let mut max_ratio: f64 = 0.0;
    for weights in &weight_sets {
        let (config, _) = weighted_arc_config(weights)?;
        let (e, err) = energy(&config, &spec)?;
        let (budget, budget_err) = reduction_budget(&config, &spec)?;
        let stats = WeightStats::new(weights, 2)?;
        let ratio = e / stats.ratio_upper;
        let ratio_err = err / stats.ratio_upper;
        let below_budget = Verdict::at_least(budget, e, err + budget_err);
        let below_cap = Verdict::at_least(2.0 * PI * cap, ratio, ratio_err);
        passed &= below_budget != Verdict::Violated && below_cap != Verdict::Violated;
        max_ratio = max_ratio.max(ratio);
        rows.push(json!({
            "n": weights.len(), "energy": e, "err": err, "budget": budget, "budget_err": budget_err,
            "energy_a_over_b": ratio, "budget_verdict": below_budget, "cap_verdict": below_cap,
        }));
    }
    Ok(outcome(
        4,
        "weighted-arc order",
        passed,
        format!(
            "max energy*A/B {max_ratio:.4} vs 2*pi*max defect/l {:.4} over {} weight sets",
            2.0 * PI * cap,
            weight_sets.len()
        ),
        json!({"defect_over_l_cap": cap, "rows": rows}),
    ))
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Largest allowed growth of `defect(l)/l` over its value at `l = 2π`.
const DEFECT_GROWTH_CAP: f64 = 10.0;

fn defect_sweep(opts: &VerifyOptions) -> Result<CriterionOutcome> {
    let grid = defect_grid(&opts.spec())?;
    let ratios: Vec<f64> = grid.iter().map(|(l, v, _)| v / l).collect();
    let anchor = ratios[0];
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let med = median(&ratios);
    let last = ratios[ratios.len() - 1];
    let anchor_ok = (anchor - 4.0 / (2.0 * PI)).abs() <= 1e-2 * anchor;
    let growth = max / anchor;
    let passed =
        ratios.iter().all(|r| r.is_finite()) && anchor_ok && growth <= DEFECT_GROWTH_CAP && last <= 10.0 * med;
    let rows: Vec<Value> = grid
        .iter()
        .map(|(l, v, e)| json!({"l": l, "defect": v, "err": e, "defect_over_l": v / l}))
        .collect();
    Ok(outcome(
        5,
        "single-fraction defect sweep",
        passed,
        format!("anchor {anchor:.4}, max/anchor {growth:.3}, last/median {:.3}", last / med),
        json!({"anchor": anchor, "growth": growth, "median": med, "rows": rows}),
    ))
}

fn two_pole_sweep(opts: &VerifyOptions) -> Result<CriterionOutcome> {
    let spec = opts.spec();
    let a = Complex64::new(1.0, 0.0);
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for j in 2..=10 {
        let delta = 0.5f64.powi(j);
        let r = two_pole_l1(a, Complex64::from_polar(1.0, delta), &spec)?;
        require_converged(&r)?;
        let ratio = r.value / (delta + delta * (1.0 / delta).ln());
        ratios.push(ratio);
        rows.push(json!({"delta": delta, "value": r.value, "err": r.error, "ratio": ratio}));
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(outcome(
        6,
        "two-pole sweep",
        max / min <= 10.0,
        format!("ratio range [{min:.4}, {max:.4}], max/min {:.3}", max / min),
        json!({"rows": rows}),
    ))
}

fn interior_poles(opts: &VerifyOptions) -> Result<CriterionOutcome> {
    let spec = opts.spec();
    let center = ChargeConfiguration::planar(&[(Complex64::new(0.0, 0.0), 1.0)])?;
    let (e0, r0) = energy(&center, &spec)?;
    let rel = (e0 - 2.0 * PI).abs() / (2.0 * PI);
    let mut passed = rel <= 1e-2;
    let mut rows = Vec::new();
    for i in 0..20u64 {
        let n = 1 + (i as usize % 6);
        let config = random_config(n, 2, opts.seed.wrapping_mul(1000).wrapping_add(i), true)?;
        let (e, err) = energy(&config, &spec)?;
        let lhs = lemma41_lhs(&config)?;
        let verdict = Verdict::at_least(e, lhs, err);
        passed &= verdict != Verdict::Violated;
        rows.push(json!({"n": n, "energy": e, "err": err, "lhs": lhs, "verdict": verdict}));
    }
    Ok(outcome(
        7,
        "interior-pole bound",
        passed,
        format!("pole at 0: {e0:.6} (rel {rel:.1e}); {} random configurations", rows.len()),
        json!({"center": {"energy": e0, "err": r0}, "rows": rows}),
    ))
}

fn lemma_suites(opts: &VerifyOptions) -> Result<CriterionOutcome> {
    let mut rows = Vec::new();
    let mut failures = 0;
    for d in [2, 3] {
        for p in Property::ALL {
            let s = property_suite(p, d, 100_000, opts.seed, opts.execution)?;
            failures += s.failures;
            rows.push(serde_json::to_value(&s)?);
        }
    }
    Ok(outcome(
        8,
        "proof-lemma property suites",
        failures == 0,
        format!("{failures} failures over {} suites of 100000 trials", rows.len()),
        json!({"suites": rows}),
    ))
}

fn gap_of(p: &Positions) -> f64 {
    match p {
        Positions::Angles(a) if a.len() == 2 => {
            let d = (a[1] - a[0]).rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d)
        }
        _ => f64::NAN,
    }
}

fn optimizer(opts: &VerifyOptions) -> Result<CriterionOutcome> {
    let mut settings = SearchSettings::new(SearchMethod::NelderMeadAngles, opts.seed, 300);
    settings.spec.execution = opts.execution;
    let trace = minimize_positions(&[1.0, 1.0], &settings)?;
    let gap = gap_of(&trace.best.angles_or_points);

    // Brute-force grid over the gap angle.
    let mut grid_best = (f64::INFINITY, 0.0);
    for i in 0..=80 {
        let g = PI / 2.0 + PI * i as f64 / 80.0;
        let (e, _) = energy(&ChargeConfiguration::from_angles(&[0.0, g], &[1.0, 1.0])?, &settings.spec)?;
        if e < grid_best.0 {
            grid_best = (e, g);
        }
    }
    let grid_gap = grid_best.1.min(2.0 * PI - grid_best.1);

    let cert_spec = {
        let mut s = QuadratureSpec::default().with_tolerance(1e-6).with_seed(opts.seed);
        s.execution = opts.execution;
        s
    };
    let mut certs = Vec::new();
    let mut certs_ok = true;
    for n in [2, 3, 4] {
        let c = local_min_certificate(&uniform_circle_config(n)?, 0.05, &cert_spec)?;
        certs_ok &= c.gradient_vanishes;
        certs.push(json!({
            "n": n, "max_abs_gradient": c.max_abs_gradient, "gradient_err": c.gradient_err,
            "min_second": c.min_second, "verdict": c.verdict,
        }));
    }
    let passed = (gap - PI).abs() <= 0.05 && (grid_gap - PI).abs() <= 0.05 && certs_ok;
    Ok(outcome(
        9,
        "optimizer",
        passed,
        format!("n=2 gap {gap:.4} (grid {grid_gap:.4}); certificates at n=2,3,4 gradient-free: {certs_ok}"),
        json!({"gap": gap, "grid_gap": grid_gap, "evals": trace.meta.evals, "certificates": certs}),
    ))
}

fn determinism(opts: &VerifyOptions) -> Result<CriterionOutcome> {
    let other = VerifyOptions {
        seed: opts.seed,
        execution: match opts.execution {
            Execution::Parallel => Execution::Sequential,
            Execution::Sequential => Execution::Parallel,
        },
    };
    let mut rows = Vec::new();
    let mut passed = true;
    for id in DETERMINISM_SUBSET {
        let a = serde_json::to_string(&run_criterion(id, opts)?)?;
        let b = serde_json::to_string(&run_criterion(id, &other)?)?;
        let again = serde_json::to_string(&run_criterion(id, opts)?)?;
        let same = a == b && a == again;
        passed &= same;
        rows.push(json!({"criterion": id, "identical": same}));
    }
    Ok(outcome(
        10,
        "determinism",
        passed,
        format!("criteria {DETERMINISM_SUBSET:?} identical across reruns and execution modes: {passed}"),
        json!({"rows": rows}),
    ))
}
