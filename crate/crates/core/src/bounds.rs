//! Lower and upper bounds for the energy, the pointwise inequalities used to
//! prove them, and verdicts comparing bounds against computed energies.
//!
//! # The lower-bound constant
//!
//! With `G = Σ α_j^{2/d}` and tangent balls `Q_k` of radius
//! `r_k = α_k^{2/d} / (2^{d+2} G)`, the localized lower bound is
//!
//! ```text
//! Σ_k m(Q_k) · 2^{d−1} G α_k^{1−2/d} r_k^{2−d}
//!   = Σ_k v_d r_k² · 2^{d−1} G α_k^{1−2/d}
//!   = Σ_k v_d α_k^{4/d} / (2^{2d+4} G²) · 2^{d−1} G α_k^{1−2/d}
//!   = v_d / 2^{d+5} · Σ α_k^{1+2/d} / Σ α_k^{2/d},
//! ```
//!
//! so the implemented constant is `proof_c(d) = v_d / 2^{d+5}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{
    distance, dot, norm, random_unit_vector, unit_ball_volume, weighted_arc_config, ChargeConfiguration,
};
use crate::par::Execution;
use crate::quadrature::{chui_energy, defect_for_length, QuadratureResult, QuadratureSpec};
use crate::rng::{block_rng, purpose};

/// Relative slack for ball membership tests.
const MEMBERSHIP_SLACK: f64 = 1e-12;

/// Weight sums entering the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct WeightStats {
    pub A: f64,
    pub B: f64,
    pub G: f64,
    /// `Σ α^{1+2/d} / Σ α^{2/d}`.
    pub ratio_lower: f64,
    /// `B / A`.
    pub ratio_upper: f64,
}

impl WeightStats {
    pub fn new(weights: &[f64], d: usize) -> Result<Self> {
        check_positive(weights)?;
        if d < 2 {
            return Err(invalid("dimension must be at least 2"));
        }
        let p = 2.0 / d as f64;
        let a: f64 = weights.iter().sum();
        let b: f64 = weights.iter().map(|w| w * w).sum();
        let g: f64 = weights.iter().map(|w| w.powf(p)).sum();
        let top: f64 = weights.iter().map(|w| w.powf(1.0 + p)).sum();
        Ok(Self {
            A: a,
            B: b,
            G: g,
            ratio_lower: top / g,
            ratio_upper: b / a,
        })
    }
}

fn check_positive(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(invalid("at least one weight is required"));
    }
    match weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        Some(w) => Err(invalid(format!("weights must be positive, got {w}"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub newman_c: f64,
    pub proof_c: f64,
    pub v_d: f64,
}

impl BoundConstants {
    pub fn new(d: usize) -> Self {
        Self {
            newman_c: NEWMAN_C,
            proof_c: proof_c(d),
            v_d: unit_ball_volume(d),
        }
    }
}

/// Newman's constant for unit charges on the circle.
pub const NEWMAN_C: f64 = PI / 18.0;

/// `v_d / 2^{d+5}`.
pub fn proof_c(d: usize) -> f64 {
    unit_ball_volume(d) / 2f64.powi(d as i32 + 5)
}

/// `constant · Σ α^{1+2/d} / Σ α^{2/d}`.
pub fn lower_bound_rhs(weights: &[f64], d: usize, constant: f64) -> Result<f64> {
    if !(constant > 0.0) {
        return Err(invalid("bound constant must be positive"));
    }
    Ok(constant * WeightStats::new(weights, d)?.ratio_lower)
}

/// Balls of radius `r` internally tangent to the unit sphere at each charge.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofGeometry {
    pub radii: Vec<f64>,
    pub centers: Vec<Vec<f64>>,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub dimension: usize,
    pub g: f64,
}

impl ProofGeometry {
    pub fn new(config: &ChargeConfiguration) -> Result<Self> {
        if !config.all_boundary() {
            return Err(invalid("tangent balls need every charge on the unit sphere"));
        }
        let d = config.dimension();
        let weights = config.weights();
        let g = WeightStats::new(&weights, d)?.G;
        let scale = 2f64.powi(d as i32 + 2) * g;
        let radii: Vec<f64> = weights.iter().map(|w| w.powf(2.0 / d as f64) / scale).collect();
        let points: Vec<Vec<f64>> = config.charges().iter().map(|c| c.position.clone()).collect();
        let centers = points
            .iter()
            .zip(&radii)
            .map(|(p, r)| p.iter().map(|c| (1.0 - r) * c).collect())
            .collect();
        Ok(Self {
            radii,
            centers,
            points,
            weights,
            dimension: d,
            g,
        })
    }

    /// Strict membership `|x − (1 − r_k) x_k| < r_k`.
    pub fn contains(&self, k: usize, x: &[f64]) -> bool {
        distance(x, &self.centers[k]) < self.radii[k]
    }

    /// `E_x`, the indices of the tangent balls containing `x`.
    pub fn containing(&self, x: &[f64]) -> Vec<usize> {
        (0..self.radii.len()).filter(|&k| self.contains(k, x)).collect()
    }

    /// The index chosen by the minimality rule: smallest `|x_k − x|² / r_k`
    /// over `E_x`, lowest index on ties. `None` when `x` is outside every ball.
    pub fn select(&self, x: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for k in self.containing(x) {
            let d = distance(&self.points[k], x);
            let key = d * d / self.radii[k];
            if best.map_or(true, |(_, b)| key < b) {
                best = Some((k, key));
            }
        }
        best.map(|(k, _)| k)
    }
}

/// `⟨(y − x)/|y − x|^d, x⟩ + 1/(2|y − x|^{d−2})`, nonnegative for `|y| = 1`,
/// `|x| < 1`.
pub fn lemma1_gap(y: &[f64], x: &[f64], d: usize) -> Result<f64> {
    check_unit(y, d)?;
    check_dim(x, d)?;
    if norm(x) >= 1.0 {
        return Err(Error::OutsideBall(x.to_vec()));
    }
    let diff: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let r = norm(&diff);
    if r == 0.0 {
        return Err(invalid("x coincides with y"));
    }
    Ok(dot(&diff, x) / r.powi(d as i32) + 0.5 / r.powi(d as i32 - 2))
}

/// `lemma1_gap(y, x) − (1 − r)/(2r) · |y − x|^{2−d}` for `x` in the closed
/// ball of radius `r` internally tangent at `y`.
pub fn lemma2_gap(y: &[f64], r: f64, x: &[f64], d: usize) -> Result<f64> {
    check_radius(r)?;
    check_unit(y, d)?;
    check_dim(x, d)?;
    if !in_tangent_ball(y, r, x) {
        return Err(invalid("x lies outside the tangent ball"));
    }
    let gap = lemma1_gap(y, x, d)?;
    let dist = distance(y, x);
    Ok(gap - (1.0 - r) / (2.0 * r) * dist.powi(2 - d as i32))
}

/// `|x − y₁|/|x − y₂| − sqrt((r₁/r₂)(1 − r₂)/(1 − r₁))` for `x` in the
/// tangent ball at `y₁` and outside the open tangent ball at `y₂`.
pub fn lemma3_ratio(y1: &[f64], r1: f64, y2: &[f64], r2: f64, x: &[f64]) -> Result<f64> {
    let d = y1.len();
    check_radius(r1)?;
    check_radius(r2)?;
    check_unit(y1, d)?;
    check_unit(y2, d)?;
    check_dim(x, d)?;
    if !in_tangent_ball(y1, r1, x) {
        return Err(invalid("x lies outside the first tangent ball"));
    }
    if tangent_distance(y2, r2, x) < r2 {
        return Err(invalid("x lies inside the second tangent ball"));
    }
    let bound = ((r1 / r2) * (1.0 - r2) / (1.0 - r1)).sqrt();
    Ok(distance(x, y1) / distance(x, y2) - bound)
}

fn tangent_distance(y: &[f64], r: f64, x: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - (1.0 - r) * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn in_tangent_ball(y: &[f64], r: f64, x: &[f64]) -> bool {
    tangent_distance(y, r, x) <= r * (1.0 + MEMBERSHIP_SLACK)
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < 0.5 {
        Ok(())
    } else {
        Err(invalid(format!("tangent radius must lie in (0, 1/2), got {r}")))
    }
}

fn check_dim(x: &[f64], d: usize) -> Result<()> {
    if x.len() == d {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: d,
            got: x.len(),
        })
    }
}

fn check_unit(y: &[f64], d: usize) -> Result<()> {
    check_dim(y, d)?;
    if (norm(y) - 1.0).abs() > 1e-12 {
        return Err(invalid("y must be a unit vector"));
    }
    Ok(())
}

/// Outcome of the pointwise domination check at one point of `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstarOutcome {
    /// Index picked by the minimality rule.
    pub selected: usize,
    /// Smallest `2^d α_k^{1−2/d}/|x_k − x|^{d−2} − α_j^{1−2/d}/|x_j − x|^{d−2}`
    /// over all `j`, divided by the left side.
    pub estar_margin: f64,
    /// `(Σ_k 2^{d−1} G α_k^{1−2/d} 1_{Q_k}/|x_k − x|^{d−2}) / (Σ_j α_j/(2|x_j − x|^{d−2})) − 1`.
    pub eb0_margin: f64,
    pub verdict: Verdict,
}

/// Check the term-wise domination at `x ∈ Q` and the summed inequality it
/// implies.
pub fn estar_check(geometry: &ProofGeometry, x: &[f64]) -> Result<EstarOutcome> {
    let d = geometry.dimension;
    check_dim(x, d)?;
    let k = geometry
        .select(x)
        .ok_or_else(|| invalid("x lies outside every tangent ball"))?;
    let p = 1.0 - 2.0 / d as f64;
    let e = d as i32 - 2;
    let term = |j: usize| geometry.weights[j].powf(p) / distance(&geometry.points[j], x).powi(e);
    let lead = 2f64.powi(d as i32) * term(k);
    let estar_margin = (0..geometry.weights.len())
        .map(|j| (lead - term(j)) / lead)
        .fold(f64::INFINITY, f64::min);
    let left: f64 = geometry
        .containing(x)
        .into_iter()
        .map(|j| 2f64.powi(d as i32 - 1) * geometry.g * term(j))
        .sum();
    let right: f64 = (0..geometry.weights.len())
        .map(|j| geometry.weights[j] / (2.0 * distance(&geometry.points[j], x).powi(e)))
        .sum();
    let eb0_margin = left / right - 1.0;
    let verdict = if estar_margin >= -1e-12 && eb0_margin >= -1e-12 {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    Ok(EstarOutcome {
        selected: k,
        estar_margin,
        eb0_margin,
        verdict,
    })
}

/// `2π Σ (1 − |z_k|)` for unit-weight planar configurations.
pub fn lemma41_lhs(config: &ChargeConfiguration) -> Result<f64> {
    if config.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: config.dimension(),
        });
    }
    if config.charges().iter().any(|c| c.weight != 1.0) {
        return Err(Error::NotApplicable("the interior-pole bound is stated for unit weights".into()));
    }
    Ok(2.0 * PI * config.charges().iter().map(|c| 1.0 - c.norm()).sum::<f64>())
}

/// Upper budget `(A/2π) Σ l_k · defect(l_k)` for a weighted-arc
/// configuration, with its propagated error.
pub fn reduction_budget(config: &ChargeConfiguration, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let weights = config.weights();
    let (expected, partition) = weighted_arc_config(&weights)?;
    let matches = config.dimension() == 2
        && config
            .charges()
            .iter()
            .zip(expected.charges())
            .all(|(a, b)| distance(&a.position, &b.position) < 1e-9);
    if !matches {
        return Err(Error::NotApplicable(
            "configuration is not the weighted-arc layout of its weights".into(),
        ));
    }
    let lengths = partition.lengths();
    let mut cache: Vec<(f64, QuadratureResult)> = Vec::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for &l in &lengths {
        let hit = cache.iter().find(|(c, _)| (c - l).abs() <= 1e-14 * l).map(|(_, r)| r.clone());
        let result = match hit {
            Some(r) => r,
            None => {
                let r = defect_for_length(l, spec)?;
                require_converged(&r)?;
                cache.push((l, r.clone()));
                r
            }
        };
        value += l * result.value;
        error += l * result.error;
    }
    let a: f64 = weights.iter().sum();
    Ok((a / (2.0 * PI) * value, a / (2.0 * PI) * error))
}

pub(crate) fn require_converged(r: &QuadratureResult) -> Result<()> {
    if r.converged {
        Ok(())
    } else {
        Err(Error::NonConvergence {
            evals: r.evals,
            value: r.value,
            error: r.error,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    /// The inequality fails by less than three combined error bars.
    Inconclusive,
}

impl Verdict {
    /// Verdict for `lhs ≥ rhs` with combined numerical error `err`.
    pub fn at_least(lhs: f64, rhs: f64, err: f64) -> Self {
        let diff = lhs - rhs;
        if diff >= 0.0 {
            Verdict::Holds
        } else if diff >= -3.0 * err {
            Verdict::Inconclusive
        } else {
            Verdict::Violated
        }
    }
}

/// Energy with every applicable bound and its verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct BoundReport {
    pub energy: f64,
    pub err: f64,
    pub evals: u64,
    pub converged: bool,
    pub A: f64,
    pub B: f64,
    pub G: f64,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
    pub lower_newman: Option<f64>,
    pub lower_theorem11: f64,
    pub upper_budget: Option<f64>,
    pub upper_budget_err: Option<f64>,
    pub lemma41_lhs: Option<f64>,
    /// `energy · ‖ν‖ / B`, the empirical constant of the Cauchy-transform bound.
    pub cauchy_ratio: f64,
    pub verdicts: BTreeMap<String, Verdict>,
}

impl BoundReport {
    pub fn stats(&self) -> WeightStats {
        WeightStats {
            A: self.A,
            B: self.B,
            G: self.G,
            ratio_lower: self.ratio_lower,
            ratio_upper: self.ratio_upper,
        }
    }

    pub fn any_violated(&self) -> bool {
        self.verdicts.values().any(|v| *v == Verdict::Violated)
    }
}

/// Evaluate the energy of a positive configuration and compare it with every
/// bound that applies to it.
pub fn make_bound_report(config: &ChargeConfiguration, spec: &QuadratureSpec) -> Result<BoundReport> {
    let d = config.dimension();
    let weights = config.weights();
    let stats = WeightStats::new(&weights, d)?;
    let energy = chui_energy(config, spec)?;
    require_converged(&energy)?;
    let (e, err) = (energy.value, energy.error);
    let mut verdicts = BTreeMap::new();

    let lower_theorem11 = proof_c(d) * stats.ratio_lower;
    verdicts.insert("theorem11".into(), Verdict::at_least(e, lower_theorem11, err));

    let unit = weights.iter().all(|w| *w == 1.0);
    let lower_newman = (d == 2 && unit && config.all_boundary()).then_some(NEWMAN_C);
    if let Some(b) = lower_newman {
        verdicts.insert("newman".into(), Verdict::at_least(e, b, err));
    }

    let (upper_budget, upper_budget_err) = match reduction_budget(config, spec) {
        Ok((b, be)) => {
            verdicts.insert("reduction_budget".into(), Verdict::at_least(b, e, err + be));
            (Some(b), Some(be))
        }
        Err(Error::NotApplicable(_)) | Err(Error::DimensionMismatch { .. }) => (None, None),
        Err(other) => return Err(other),
    };

    let lemma41 = match lemma41_lhs(config) {
        Ok(v) => {
            verdicts.insert("lemma41".into(), Verdict::at_least(e, v, err));
            Some(v)
        }
        Err(Error::NotApplicable(_)) | Err(Error::DimensionMismatch { .. }) => None,
        Err(other) => return Err(other),
    };

    Ok(BoundReport {
        energy: e,
        err,
        evals: energy.evals,
        converged: energy.converged,
        A: stats.A,
        B: stats.B,
        G: stats.G,
        ratio_lower: stats.ratio_lower,
        ratio_upper: stats.ratio_upper,
        lower_newman,
        lower_theorem11,
        upper_budget,
        upper_budget_err,
        lemma41_lhs: lemma41,
        cauchy_ratio: e * config.total_variation() / stats.B,
        verdicts,
    })
}

/// Summary of a randomized property suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub dimension: usize,
    pub trials: u64,
    pub failures: u64,
    /// Least favourable value seen (minimum gap or margin, maximum ratio).
    pub worst: f64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Which proof inequality a suite exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Lemma1,
    Lemma2,
    Lemma3,
    Estar,
}

impl Property {
    pub const ALL: [Property; 4] = [Property::Lemma1, Property::Lemma2, Property::Lemma3, Property::Estar];

    pub fn name(self) -> &'static str {
        match self {
            Property::Lemma1 => "lemma1_gap",
            Property::Lemma2 => "lemma2_gap",
            Property::Lemma3 => "lemma3_ratio",
            Property::Estar => "estar_check",
        }
    }
}

/// Trials drawn from one random block.
const SUITE_BLOCK: u64 = 1000;
/// Threshold applied to every gap and ratio.
pub const PROPERTY_TOL: f64 = 1e-12;

/// Run `trials` random instances of `property` in dimension `d`.
///
/// Each block of trials draws from its own counter-keyed stream, so the
/// outcome does not depend on the execution mode.
pub fn property_suite(property: Property, d: usize, trials: u64, seed: u64, execution: Execution) -> Result<SuiteOutcome> {
    if d < 2 {
        return Err(invalid("dimension must be at least 2"));
    }
    let blocks = trials.div_ceil(SUITE_BLOCK) as usize;
    let tag = (property as u32 + 1) << 24 | (d as u32) << 16;
    let per_block = execution.map_range(blocks, |b| {
        let count = SUITE_BLOCK.min(trials - b as u64 * SUITE_BLOCK);
        let mut rng = block_rng(seed, purpose::PROPERTY, tag | b as u32);
        let mut failures = 0u64;
        let mut worst = match property {
            Property::Lemma3 => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        };
        for _ in 0..count {
            let (value, ok) = property_trial(property, d, &mut rng);
            if !ok {
                failures += 1;
            }
            worst = match property {
                Property::Lemma3 => worst.max(value),
                _ => worst.min(value),
            };
        }
        (failures, worst)
    });
    let failures = per_block.iter().map(|b| b.0).sum();
    let worst = per_block.iter().map(|b| b.1).fold(
        if property == Property::Lemma3 { f64::NEG_INFINITY } else { f64::INFINITY },
        |w, v| if property == Property::Lemma3 { w.max(v) } else { w.min(v) },
    );
    Ok(SuiteOutcome {
        name: property.name().into(),
        dimension: d,
        trials,
        failures,
        worst,
    })
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, d: usize, center: &[f64], radius: f64) -> Vec<f64> {
    let dir = random_unit_vector(rng, d);
    let s = radius * rng.gen::<f64>().powf(1.0 / d as f64);
    center.iter().zip(dir).map(|(c, u)| c + s * u).collect()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn tangent_center(y: &[f64], r: f64) -> Vec<f64> {
    y.iter().map(|c| (1.0 - r) * c).collect()
}

fn property_trial(property: Property, d: usize, rng: &mut ChaCha8Rng) -> (f64, bool) {
    match property {
        Property::Lemma1 => {
            let y = random_unit_vector(rng, d);
            let x = loop {
                let x = uniform_in_ball(rng, d, &vec![0.0; d], 1.0);
                if norm(&x) < 1.0 && distance(&x, &y) > 0.0 {
                    break x;
                }
            };
            let g = lemma1_gap(&y, &x, d).expect("valid gap input");
            (g, g >= -PROPERTY_TOL)
        }
        Property::Lemma2 => {
            let y = random_unit_vector(rng, d);
            let r = log_uniform(rng, 1e-3, 0.499);
            let x = loop {
                let x = uniform_in_ball(rng, d, &tangent_center(&y, r), r);
                if norm(&x) < 1.0 && distance(&x, &y) > 0.0 && in_tangent_ball(&y, r, &x) {
                    break x;
                }
            };
            let g = lemma2_gap(&y, r, &x, d).expect("valid ball gap input");
            (g, g >= -PROPERTY_TOL)
        }
        Property::Lemma3 => loop {
            let y1 = random_unit_vector(rng, d);
            let y2 = random_unit_vector(rng, d);
            let r1 = log_uniform(rng, 1e-3, 0.499);
            let r2 = log_uniform(rng, 1e-3, 0.499);
            let x = uniform_in_ball(rng, d, &tangent_center(&y1, r1), r1);
            if !in_tangent_ball(&y1, r1, &x) || tangent_distance(&y2, r2, &x) < r2 {
                continue;
            }
            let v = lemma3_ratio(&y1, r1, &y2, r2, &x).expect("valid ratio input");
            return (v, v <= PROPERTY_TOL);
        },
        Property::Estar => {
            let n = rng.gen_range(1..=8);
            let charges: Vec<(Vec<f64>, f64)> = (0..n)
                .map(|_| (random_unit_vector(rng, d), log_uniform(rng, 0.1, 10.0)))
                .collect();
            let config = ChargeConfiguration::new(d, charges).expect("valid random configuration");
            let geometry = ProofGeometry::new(&config).expect("boundary configuration");
            loop {
                let k = rng.gen_range(0..n);
                let x = uniform_in_ball(rng, d, &geometry.centers[k], geometry.radii[k]);
                if geometry.contains(k, &x) {
                    let out = estar_check(&geometry, &x).expect("x lies in Q");
                    let worst = out.estar_margin.min(out.eb0_margin);
                    return (worst, out.verdict == Verdict::Holds);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((proof_c(2) - PI / 128.0).abs() < 1e-15);
        assert!((proof_c(3) - 4.0 * PI / 3.0 / 256.0).abs() < 1e-15);
        let c = BoundConstants::new(3);
        assert!((c.v_d - 4.0 * PI / 3.0).abs() < 1e-15);
        assert_eq!(c.newman_c, PI / 18.0);
    }

    #[test]
    fn tangent_radii_are_small() {
        let config = ChargeConfiguration::from_angles(&[0.0, 1.0, 2.0], &[0.1, 1.0, 10.0]).unwrap();
        let geo = ProofGeometry::new(&config).unwrap();
        for r in &geo.radii {
            assert!(*r > 0.0 && *r <= 2f64.powi(-4));
        }
    }
}
