//! Local search for low-energy charge positions at fixed weights.
//!
//! The objective is the quadrature estimate at a fixed spec and seed, so it
//! is a deterministic function of the positions. Rotations leave the energy
//! unchanged; they are removed by pinning the first angle (d = 2), or the
//! first point and the azimuth of the second (d = 3).

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::require_converged;
use crate::error::{invalid, Error, Result};
use crate::geometry::{weighted_arc_config, ChargeConfiguration};
use crate::quadrature::{chui_energy, QuadratureSpec};
use crate::rng::{block_rng, purpose};

/// Angular distance below which two charges are merged during a search.
pub const COLLISION_ANGLE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    /// Nelder–Mead on the free angles of planar charges.
    NelderMeadAngles,
    /// Compass search on spherical coordinates of charges on S².
    ProjectedPatternSearch,
}

impl SearchMethod {
    pub fn for_dimension(d: usize) -> Result<Self> {
        match d {
            2 => Ok(SearchMethod::NelderMeadAngles),
            3 => Ok(SearchMethod::ProjectedPatternSearch),
            _ => Err(invalid(format!("position search supports d = 2 or 3, got {d}"))),
        }
    }

    fn dimension(self) -> usize {
        match self {
            SearchMethod::NelderMeadAngles => 2,
            SearchMethod::ProjectedPatternSearch => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSettings {
    pub method: SearchMethod,
    pub seed: u64,
    /// Energy evaluations across all starts.
    pub budget: u64,
    /// Random restarts after the weighted-arc (or Fibonacci) start.
    pub restarts: usize,
    /// Initial simplex edge or pattern step, in radians.
    pub initial_step: f64,
    /// Stop once the simplex or pattern step is below this, in radians.
    pub step_tol: f64,
    pub spec: QuadratureSpec,
}

impl SearchSettings {
    pub fn new(method: SearchMethod, seed: u64, budget: u64) -> Self {
        Self {
            method,
            seed,
            budget,
            restarts: 2,
            initial_step: 0.2,
            step_tol: 2e-3,
            spec: QuadratureSpec::default().with_tolerance(1e-5).with_seed(seed),
        }
    }
}

/// Positions of one iterate: angles in the plane, points on S².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Positions {
    Angles(Vec<f64>),
    Points(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    pub iter: u64,
    /// Index of the start this iterate belongs to.
    pub start: usize,
    pub angles_or_points: Positions,
    pub weights: Vec<f64>,
    pub energy: f64,
    pub err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Converged,
    Budget,
    /// Nothing to optimize once rotations are removed.
    NoFreeParameters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub method: SearchMethod,
    pub seed: u64,
    pub evals: u64,
    pub stop_reason: StopReason,
    /// Restarts, merges and other notable events, in order.
    pub events: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    /// Accepted iterates of every start, in evaluation order.
    pub iterates: Vec<Iterate>,
    pub best: Iterate,
    pub meta: TraceMeta,
}

impl OptimizationTrace {
    /// One JSON object per iterate.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for it in &self.iterates {
            out.push_str(&serde_json::to_string(it)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn best_config(&self) -> Result<ChargeConfiguration> {
        positions_config(&self.best.angles_or_points, &self.best.weights)
    }
}

fn positions_config(p: &Positions, weights: &[f64]) -> Result<ChargeConfiguration> {
    match p {
        Positions::Angles(a) => ChargeConfiguration::from_angles(a, weights),
        Positions::Points(pts) => ChargeConfiguration::new(3, pts.iter().cloned().zip(weights.iter().copied()).collect()),
    }
}

/// Counts evaluations and records accepted iterates.
struct Recorder<'a> {
    settings: &'a SearchSettings,
    evals: u64,
    start: usize,
    iterates: Vec<Iterate>,
    events: Vec<String>,
}

impl Recorder<'_> {
    fn exhausted(&self) -> bool {
        self.evals >= self.settings.budget
    }

    fn energy(&mut self, positions: &Positions, weights: &[f64]) -> Result<(f64, f64)> {
        self.evals += 1;
        let r = chui_energy(&positions_config(positions, weights)?, &self.settings.spec)?;
        require_converged(&r)?;
        Ok((r.value, r.error))
    }

    fn accept(&mut self, positions: Positions, weights: &[f64], energy: f64, err: f64) {
        self.iterates.push(Iterate {
            iter: self.iterates.len() as u64,
            start: self.start,
            angles_or_points: positions,
            weights: weights.to_vec(),
            energy,
            err,
        });
    }
}

/// Minimize the energy over positions from the weighted-arc layout (d = 2)
/// or the Fibonacci layout (d = 3), then from seeded random restarts while
/// the budget lasts.
pub fn minimize_positions(weights: &[f64], settings: &SearchSettings) -> Result<OptimizationTrace> {
    let d = settings.method.dimension();
    if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(invalid("position search needs positive weights"));
    }
    let start = if d == 2 {
        Positions::Angles(weighted_arc_config(weights)?.0.angles()?)
    } else {
        Positions::Points(fibonacci_points(weights.len()))
    };
    let mut starts = vec![start];
    for r in 0..settings.restarts {
        let mut rng = block_rng(settings.seed, purpose::RESTART, r as u32);
        starts.push(if d == 2 {
            Positions::Angles((0..weights.len()).map(|_| rng.gen_range(-PI..PI)).collect())
        } else {
            Positions::Points(
                (0..weights.len())
                    .map(|_| crate::geometry::random_unit_vector(&mut rng, 3))
                    .collect(),
            )
        });
    }
    run_starts(starts, weights, settings)
}

/// Local search from a given configuration only.
pub fn minimize_from(config: &ChargeConfiguration, settings: &SearchSettings) -> Result<OptimizationTrace> {
    let d = settings.method.dimension();
    if config.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: config.dimension(),
        });
    }
    if !config.is_positive() || !config.all_boundary() {
        return Err(invalid("position search needs positive boundary charges"));
    }
    let start = if d == 2 {
        Positions::Angles(config.angles()?)
    } else {
        Positions::Points(config.charges().iter().map(|c| c.position.clone()).collect())
    };
    run_starts(vec![start], &config.weights(), settings)
}

fn run_starts(starts: Vec<Positions>, weights: &[f64], settings: &SearchSettings) -> Result<OptimizationTrace> {
    if settings.budget < 100 {
        return Err(invalid("position search needs a budget of at least 100 evaluations"));
    }
    let mut rec = Recorder {
        settings,
        evals: 0,
        start: 0,
        iterates: Vec::new(),
        events: Vec::new(),
    };
    let per_start = settings.budget / starts.len() as u64;
    let mut best: Option<Iterate> = None;
    let mut stop = StopReason::Converged;
    for (i, start) in starts.into_iter().enumerate() {
        if rec.exhausted() {
            stop = StopReason::Budget;
            break;
        }
        rec.start = i;
        rec.events.push(format!("start {i}"));
        let first = rec.iterates.len();
        let limit = if i == 0 { per_start.max(1) } else { per_start * (i as u64 + 1) };
        let limit = limit.min(settings.budget);
        let reason = match settings.method {
            SearchMethod::NelderMeadAngles => nelder_mead(start, weights.to_vec(), &mut rec, limit)?,
            SearchMethod::ProjectedPatternSearch => pattern_search(start, weights.to_vec(), &mut rec, limit)?,
        };
        if i == 0 || reason != StopReason::Converged {
            stop = reason;
        }
        for it in &rec.iterates[first..] {
            if best.as_ref().map_or(true, |b| it.energy < b.energy) {
                best = Some(it.clone());
            }
        }
        if reason == StopReason::NoFreeParameters {
            break;
        }
    }
    let best = best.ok_or_else(|| invalid("search produced no iterate"))?;
    Ok(OptimizationTrace {
        iterates: rec.iterates,
        best,
        meta: TraceMeta {
            method: settings.method,
            seed: settings.seed,
            evals: rec.evals,
            stop_reason: stop,
            events: rec.events,
        },
    })
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Merge the first pair of charges closer than [`COLLISION_ANGLE`].
fn merge_collision(angles: &[f64], weights: &[f64]) -> Option<(Vec<f64>, Vec<f64>, String)> {
    for i in 0..angles.len() {
        for j in i + 1..angles.len() {
            if angle_gap(angles[i], angles[j]) < COLLISION_ANGLE {
                let mut a = angles.to_vec();
                let mut w = weights.to_vec();
                w[i] += w[j];
                a.remove(j);
                w.remove(j);
                return Some((a, w, format!("merged charges {i} and {j}")));
            }
        }
    }
    None
}

/// Nelder–Mead over `θ_2, …, θ_n` with `θ_1` pinned.
fn nelder_mead(start: Positions, mut weights: Vec<f64>, rec: &mut Recorder, limit: u64) -> Result<StopReason> {
    let Positions::Angles(mut angles) = start else {
        return Err(invalid("planar search needs angles"));
    };
    loop {
        if let Some((a, w, event)) = merge_collision(&angles, &weights) {
            rec.events.push(event);
            angles = a;
            weights = w;
            continue;
        }
        let n = angles.len();
        let pinned = angles[0];
        let full = |x: &[f64]| -> Positions {
            let mut a = Vec::with_capacity(n);
            a.push(pinned);
            a.extend(x.iter().map(|t| wrap(*t)));
            Positions::Angles(a)
        };
        if n == 1 {
            let p = full(&[]);
            let (e, err) = rec.energy(&p, &weights)?;
            rec.accept(p, &weights, e, err);
            return Ok(StopReason::NoFreeParameters);
        }
        let m = n - 1;
        let x0: Vec<f64> = angles[1..].to_vec();
        let mut simplex: Vec<(Vec<f64>, f64, f64)> = Vec::with_capacity(m + 1);
        let (e0, err0) = rec.energy(&full(&x0), &weights)?;
        rec.accept(full(&x0), &weights, e0, err0);
        simplex.push((x0.clone(), e0, err0));
        for k in 0..m {
            let mut x = x0.clone();
            x[k] += rec.settings.initial_step;
            let (e, err) = rec.energy(&full(&x), &weights)?;
            simplex.push((x, e, err));
        }
        let mut best_e = e0;
        let reason = loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[0].1 < best_e {
                best_e = simplex[0].1;
                rec.accept(full(&simplex[0].0), &weights, simplex[0].1, simplex[0].2);
            }
            let size = simplex[1..]
                .iter()
                .flat_map(|v| v.0.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if size < rec.settings.step_tol {
                break StopReason::Converged;
            }
            if rec.evals >= limit {
                break StopReason::Budget;
            }
            let worst = simplex[m].clone();
            let centroid: Vec<f64> = (0..m)
                .map(|i| simplex[..m].iter().map(|v| v.0[i]).sum::<f64>() / m as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect()
            };
            let xr = along(1.0);
            let (er, rr) = rec.energy(&full(&xr), &weights)?;
            if er < simplex[0].1 {
                let xe = along(2.0);
                let (ee, re) = rec.energy(&full(&xe), &weights)?;
                simplex[m] = if ee < er { (xe, ee, re) } else { (xr, er, rr) };
                continue;
            }
            if er < simplex[m - 1].1 {
                simplex[m] = (xr, er, rr);
                continue;
            }
            let xc = if er < worst.1 { along(0.5) } else { along(-0.5) };
            let (ec, rc) = rec.energy(&full(&xc), &weights)?;
            if ec < worst.1.min(er) {
                simplex[m] = (xc, ec, rc);
                continue;
            }
            let best = simplex[0].0.clone();
            for v in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = best.iter().zip(&v.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                let (e, err) = rec.energy(&full(&x), &weights)?;
                *v = (x, e, err);
            }
        };
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let Positions::Angles(best) = full(&simplex[0].0) else {
            unreachable!()
        };
        if merge_collision(&best, &weights).is_none() || rec.evals >= limit {
            return Ok(reason);
        }
        angles = best;
    }
}

fn fibonacci_points(n: usize) -> Vec<Vec<f64>> {
    crate::geometry::fibonacci_sphere_config(n)
        .expect("n >= 1")
        .charges()
        .iter()
        .map(|c| c.position.clone())
        .collect()
}

/// Spherical coordinates relative to a frame whose pole is the first point
/// and whose zero azimuth passes through the second.
struct Frame {
    axes: [[f64; 3]; 3],
}

impl Frame {
    fn new(points: &[Vec<f64>]) -> Self {
        let e3 = [points[0][0], points[0][1], points[0][2]];
        let seed = if points.len() > 1 {
            [points[1][0], points[1][1], points[1][2]]
        } else {
            [1.0, 0.0, 0.0]
        };
        let mut e1 = sub(seed, scale(e3, dot3(seed, e3)));
        if norm3(e1) < 1e-8 {
            let alt = if e3[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            e1 = sub(alt, scale(e3, dot3(alt, e3)));
        }
        let e1 = scale(e1, 1.0 / norm3(e1));
        let e2 = cross(e3, e1);
        Self { axes: [e1, e2, e3] }
    }

    fn to_coords(&self, p: &[f64]) -> (f64, f64) {
        let v = [p[0], p[1], p[2]];
        let x = dot3(v, self.axes[0]);
        let y = dot3(v, self.axes[1]);
        let z = dot3(v, self.axes[2]).clamp(-1.0, 1.0);
        (z.acos(), y.atan2(x))
    }

    fn to_point(&self, theta: f64, phi: f64) -> Vec<f64> {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let v = [st * cp, st * sp, ct];
        (0..3)
            .map(|i| v[0] * self.axes[0][i] + v[1] * self.axes[1][i] + v[2] * self.axes[2][i])
            .collect()
    }
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}
fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}
fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Compass search over `θ_2` and `(θ_k, φ_k)` for `k ≥ 3`, with polar angles
/// projected onto `[0, π]`.
fn pattern_search(start: Positions, mut weights: Vec<f64>, rec: &mut Recorder, limit: u64) -> Result<StopReason> {
    let Positions::Points(mut points) = start else {
        return Err(invalid("spherical search needs points"));
    };
    loop {
        if let Some((i, j)) = point_collision(&points) {
            rec.events.push(format!("merged charges {i} and {j}"));
            weights[i] += weights[j];
            weights.remove(j);
            points.remove(j);
            continue;
        }
        let n = points.len();
        let frame = Frame::new(&points);
        let first = points[0].clone();
        let coords_of = |pts: &[Vec<f64>]| -> Vec<f64> {
            let mut x = Vec::new();
            for (k, p) in pts.iter().enumerate().skip(1) {
                let (t, ph) = frame.to_coords(p);
                x.push(t);
                if k >= 2 {
                    x.push(ph);
                }
            }
            x
        };
        let full = |x: &[f64]| -> Positions {
            let mut pts = vec![first.clone()];
            if n > 1 {
                pts.push(frame.to_point(x[0], 0.0));
            }
            for k in 2..n {
                pts.push(frame.to_point(x[2 * k - 3], x[2 * k - 2]));
            }
            Positions::Points(pts)
        };
        let mut x = coords_of(&points);
        let (mut e, mut err) = rec.energy(&full(&x), &weights)?;
        rec.accept(full(&x), &weights, e, err);
        if n == 1 {
            return Ok(StopReason::NoFreeParameters);
        }
        let mut step = rec.settings.initial_step;
        let reason = 'search: loop {
            if step < rec.settings.step_tol {
                break StopReason::Converged;
            }
            let mut improved = false;
            for i in 0..x.len() {
                for sign in [1.0, -1.0] {
                    if rec.evals >= limit {
                        break 'search StopReason::Budget;
                    }
                    let mut y = x.clone();
                    y[i] += sign * step;
                    // θ coordinates sit at even offsets after the first.
                    let polar = i == 0 || (i % 2 == 1);
                    if polar {
                        y[i] = y[i].clamp(0.0, PI);
                    } else {
                        y[i] = wrap(y[i]);
                    }
                    if y[i] == x[i] {
                        continue;
                    }
                    let (ey, ry) = rec.energy(&full(&y), &weights)?;
                    if ey < e {
                        x = y;
                        e = ey;
                        err = ry;
                        improved = true;
                        rec.accept(full(&x), &weights, e, err);
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        };
        let Positions::Points(best) = full(&x) else { unreachable!() };
        if point_collision(&best).is_none() || rec.evals >= limit {
            return Ok(reason);
        }
        points = best;
    }
}

fn point_collision(points: &[Vec<f64>]) -> Option<(usize, usize)> {
    let n = points.len();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| crate::geometry::distance(&points[i], &points[j]) < COLLISION_ANGLE)
}

/// Central first and second differences of the energy in each angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMinCertificate {
    pub h: f64,
    pub energy: f64,
    pub err: f64,
    pub gradient: Vec<f64>,
    pub gradient_err: Vec<f64>,
    pub second: Vec<f64>,
    pub second_err: Vec<f64>,
    pub max_abs_gradient: f64,
    pub min_second: f64,
    /// Every gradient component lies within its error bar of zero.
    pub gradient_vanishes: bool,
    pub verdict: CertificateVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateVerdict {
    LocalMin,
    NotMin,
    /// Quadrature error is comparable to the differences.
    Inconclusive,
}

/// Finite-difference check of local minimality in the angles of a planar
/// configuration.
pub fn local_min_certificate(config: &ChargeConfiguration, h: f64, spec: &QuadratureSpec) -> Result<LocalMinCertificate> {
    if config.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: config.dimension(),
        });
    }
    if !config.is_positive() || !config.all_boundary() {
        return Err(invalid("certificate needs positive boundary charges"));
    }
    if !(1e-3..=1e-1).contains(&h) {
        return Err(invalid(format!("step must lie in [1e-3, 1e-1], got {h}")));
    }
    let angles = config.angles()?;
    let weights = config.weights();
    let eval = |a: &[f64]| -> Result<(f64, f64)> {
        let r = chui_energy(&ChargeConfiguration::from_angles(a, &weights)?, spec)?;
        require_converged(&r)?;
        Ok((r.value, r.error))
    };
    let (e0, r0) = eval(&angles)?;
    let mut gradient = Vec::new();
    let mut gradient_err = Vec::new();
    let mut second = Vec::new();
    let mut second_err = Vec::new();
    for k in 0..angles.len() {
        let mut plus = angles.clone();
        plus[k] += h;
        let mut minus = angles.clone();
        minus[k] -= h;
        let (ep, rp) = eval(&plus)?;
        let (em, rm) = eval(&minus)?;
        gradient.push((ep - em) / (2.0 * h));
        gradient_err.push((rp + rm) / (2.0 * h));
        second.push((ep - 2.0 * e0 + em) / (h * h));
        second_err.push((rp + 2.0 * r0 + rm) / (h * h));
    }
    let max_abs_gradient = gradient.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let min_second = second.iter().cloned().fold(f64::INFINITY, f64::min);
    let gradient_vanishes = gradient.iter().zip(&gradient_err).all(|(g, e)| g.abs() <= *e);
    let curvature_positive = second.iter().zip(&second_err).all(|(s, e)| *s > *e);
    let clearly_not = gradient.iter().zip(&gradient_err).any(|(g, e)| g.abs() > 3.0 * e)
        || second.iter().zip(&second_err).any(|(s, e)| *s < -3.0 * e);
    // The single-charge case has no curvature to test.
    let verdict = if clearly_not {
        CertificateVerdict::NotMin
    } else if gradient_vanishes && (curvature_positive || angles.len() == 1) {
        CertificateVerdict::LocalMin
    } else {
        CertificateVerdict::Inconclusive
    };
    Ok(LocalMinCertificate {
        h,
        energy: e0,
        err: r0,
        gradient,
        gradient_err,
        second,
        second_err,
        max_abs_gradient,
        min_second,
        gradient_vanishes,
        verdict,
    })
}
