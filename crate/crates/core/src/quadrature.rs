//! Integrals over the unit ball of kernels with integrable point
//! singularities at the charges.
//!
//! The ball is split by a smooth partition of unity into pole zones and a
//! bulk. Each pole gets a cutoff `w_k(|x − x_k|)` equal to one on half its
//! zone radius and vanishing at the radius; zone radii never exceed half the
//! distance to the nearest other pole, so the cutoffs have disjoint supports.
//! A pole zone is integrated in pole-centred polar coordinates, where the
//! Jacobian `r^{d−1}` cancels the `r^{1−d}` growth of the field, leaving a
//! smooth integrand. The bulk `(1 − Σ w_k)|F|` vanishes near every pole and
//! is integrated by adaptive cubature in polar coordinates (d = 2),
//! randomized Halton points (d = 3) or importance-sampled Monte Carlo.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cubature::{self, CubatureSettings, Region};
use crate::error::{invalid, Result};
use crate::field::averaged_kernel_closed;
use crate::geometry::{distance, norm, random_unit_vector, unit_ball_volume, Arc, ChargeConfiguration};
use crate::par::Execution;
use crate::rng::{block_rng, purpose};

/// Poles closer than this are merged before integration.
pub const MERGE_DISTANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Pick from the dimension: adaptive for d = 2, QMC for d = 3, Monte Carlo above.
    Auto,
    PolePolarAdaptive,
    PolePolarQmc,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: Method,
    pub rel_tolerance: f64,
    pub seed: u64,
    pub max_evals: u64,
    /// Cap on pole-zone radii. `None` uses 0.1. Radii are always further
    /// limited to half the distance to the nearest other pole.
    pub pole_radius: Option<f64>,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            rel_tolerance: 1e-3,
            seed: 0,
            max_evals: 50_000_000,
            pole_radius: None,
            execution: Execution::default(),
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(mut self, rel: f64) -> Self {
        self.rel_tolerance = rel;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tolerance > 0.0 && self.rel_tolerance < 0.5) {
            return Err(invalid(format!(
                "rel_tolerance must lie in (0, 0.5), got {}",
                self.rel_tolerance
            )));
        }
        if self.max_evals < 1000 {
            return Err(invalid("max_evals must be at least 1000"));
        }
        if let Some(r) = self.pole_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(invalid("pole_radius must be positive"));
            }
        }
        Ok(())
    }

    fn radius_cap(&self) -> f64 {
        self.pole_radius.unwrap_or(0.1)
    }

    fn resolve(&self, d: usize) -> Result<Method> {
        let m = match self.method {
            Method::Auto => match d {
                2 => Method::PolePolarAdaptive,
                3 => Method::PolePolarQmc,
                _ => Method::MonteCarlo,
            },
            m => m,
        };
        match (m, d) {
            (Method::PolePolarAdaptive, 2) | (Method::PolePolarQmc, 3) | (Method::MonteCarlo, _) => Ok(m),
            _ => Err(invalid(format!("method {m:?} does not support dimension {d}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    /// Deterministic Gauss–Kronrod error estimate.
    Bound,
    /// One standard error of a randomized estimate.
    StdError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    #[serde(rename = "err")]
    pub error: f64,
    pub error_kind: ErrorKind,
    pub evals: u64,
    pub converged: bool,
    pub method: Method,
}

impl QuadratureResult {
    fn zero(method: Method) -> Self {
        Self {
            value: 0.0,
            error: 0.0,
            error_kind: ErrorKind::Bound,
            evals: 0,
            converged: true,
            method,
        }
    }
}

/// Smooth cutoff: 1 on `[0, ρ/2]`, 0 beyond `ρ`, C^∞ in between.
pub(crate) fn cutoff(r: f64, rho: f64) -> f64 {
    let t = 2.0 * r / rho - 1.0;
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        b / (a + b)
    }
}

/// Zone radius per pole: `min(cap, half the nearest-neighbour distance)`.
fn zone_radii(points: &[Vec<f64>], cap: f64) -> Vec<f64> {
    (0..points.len())
        .map(|i| {
            let nearest = (0..points.len())
                .filter(|&j| j != i)
                .map(|j| distance(&points[i], &points[j]))
                .fold(f64::INFINITY, f64::min);
            cap.min(0.5 * nearest)
        })
        .collect()
}

/// Distance from `c` (|c| ≤ 1) to the unit sphere along a ray making angle
/// `cos_g` with the outward radial direction of `c`.
fn exit_distance(c_norm: f64, boundary: bool, cos_g: f64) -> f64 {
    if boundary {
        (-2.0 * cos_g).max(0.0)
    } else {
        let b = c_norm * cos_g;
        -b + (b * b + (1.0 - c_norm * c_norm).max(0.0)).sqrt()
    }
}

/// Polar angle at which the exit distance equals `rho`, if any.
fn kink_angle(c_norm: f64, boundary: bool, rho: f64) -> Option<f64> {
    if boundary {
        return Some((-0.5 * rho).acos());
    }
    if c_norm == 0.0 {
        return None;
    }
    let cos_g = (1.0 - c_norm * c_norm - rho * rho) / (2.0 * rho * c_norm);
    (cos_g > -1.0 && cos_g < 1.0).then(|| cos_g.acos())
}

#[derive(Debug, Clone, Copy)]
struct Pole {
    weight: f64,
    rho: f64,
    norm: f64,
    boundary: bool,
}

fn poles_of(config: &ChargeConfiguration, cap: f64) -> Vec<Pole> {
    let positions: Vec<Vec<f64>> = config.charges().iter().map(|c| c.position.clone()).collect();
    let radii = zone_radii(&positions, cap);
    config
        .charges()
        .iter()
        .zip(radii)
        .map(|(c, rho)| Pole {
            weight: c.weight,
            rho,
            norm: c.norm(),
            boundary: c.boundary,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// d = 2: pooled adaptive cubature over pole zones and the polar bulk.

struct PlanarZone {
    center: Complex64,
    axis: Complex64,
    pole: Pole,
}

impl PlanarZone {
    /// Maps `(γ, u)` to the point and the area element (without the cutoff).
    #[inline]
    fn map(&self, gamma: f64, u: f64) -> (Complex64, f64, f64) {
        let (s, c) = gamma.sin_cos();
        let reach = self
            .pole
            .rho
            .min(exit_distance(self.pole.norm, self.pole.boundary, c));
        let r = u * reach;
        let z = self.center + self.axis * Complex64::new(c, s) * r;
        (z, r, r * reach)
    }

    fn initial_regions(&self, zone: usize) -> Vec<Region<2>> {
        let p = &self.pole;
        let breaks: Vec<f64> = if p.boundary {
            let k = kink_angle(p.norm, true, p.rho).expect("boundary kink");
            vec![0.5 * PI, k, 2.0 * PI - k, 1.5 * PI]
        } else {
            match kink_angle(p.norm, false, p.rho) {
                Some(k) => vec![-PI, -k, k, PI],
                None => vec![-PI, -0.5 * PI, 0.0, 0.5 * PI, PI],
            }
        };
        breaks
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| Region::new(zone, [w[0], 0.0], [w[1], 1.0]))
            .collect()
    }
}

/// Feature points that the bulk mesh is graded toward, with the scale
/// below which no further grading is useful.
struct Feature {
    at: Complex64,
    scale: f64,
}

fn planar_integrate<K>(
    zones: &[PlanarZone],
    features: &[Feature],
    kernel: K,
    spec: &QuadratureSpec,
    abs_tol: f64,
) -> QuadratureResult
where
    K: Fn(Complex64) -> f64 + Sync,
{
    let bulk_weight = |z: Complex64| -> f64 {
        let mut w = 1.0;
        for zone in zones {
            let r = (z - zone.center).norm();
            if r < zone.pole.rho {
                w -= cutoff(r, zone.pole.rho);
            }
        }
        w
    };
    let f = |zone: usize, x: &[f64; 2]| -> f64 {
        if zone == 0 {
            let (s, t) = (x[0], x[1]);
            let z = Complex64::from_polar(s, t);
            let w = bulk_weight(z);
            if w <= 0.0 {
                0.0
            } else {
                w * kernel(z) * s
            }
        } else {
            let pz = &zones[zone - 1];
            let (z, r, jac) = pz.map(x[0], x[1]);
            let w = cutoff(r, pz.pole.rho);
            if w == 0.0 || jac == 0.0 {
                0.0
            } else {
                w * kernel(z) * jac
            }
        }
    };

    let mut initial = Vec::new();
    let t_panels = 8;
    for i in 0..t_panels {
        let t0 = -PI + 2.0 * PI * i as f64 / t_panels as f64;
        let t1 = -PI + 2.0 * PI * (i + 1) as f64 / t_panels as f64;
        initial.push(Region::new(0, [0.0, t0], [0.5, t1]));
        initial.push(Region::new(0, [0.5, t0], [1.0, t1]));
    }
    for (k, z) in zones.iter().enumerate() {
        initial.extend(z.initial_regions(k + 1));
    }

    let presplit = |r: &Region<2>| -> Option<usize> {
        if r.zone != 0 {
            return None;
        }
        let ds = r.width(0);
        let dt = r.hi[0] * r.width(1);
        let diam = ds.hypot(dt);
        let center = Complex64::from_polar(0.5 * (r.lo[0] + r.hi[0]), 0.5 * (r.lo[1] + r.hi[1]));
        let needs = features.iter().any(|f| {
            let dist = ((center - f.at).norm() - 0.5 * diam).max(0.0);
            diam > dist.max(f.scale)
        });
        needs.then_some(if ds >= dt { 0 } else { 1 })
    };

    let settings = CubatureSettings {
        rel_tol: spec.rel_tolerance,
        abs_tol,
        max_evals: spec.max_evals,
        execution: spec.execution,
    };
    let out = cubature::integrate(initial, &f, &presplit, &settings);
    QuadratureResult {
        value: out.value,
        error: out.error,
        error_kind: ErrorKind::Bound,
        evals: out.evals,
        converged: out.converged,
        method: Method::PolePolarAdaptive,
    }
}

fn planar_zones(config: &ChargeConfiguration, cap: f64) -> Vec<PlanarZone> {
    poles_of(config, cap)
        .into_iter()
        .zip(config.charges())
        .map(|(pole, c)| {
            let center = Complex64::new(c.position[0], c.position[1]);
            let axis = if pole.norm > 0.0 {
                center / pole.norm
            } else {
                Complex64::new(1.0, 0.0)
            };
            PlanarZone { center, axis, pole }
        })
        .collect()
}

fn pole_features(zones: &[PlanarZone]) -> Vec<Feature> {
    zones
        .iter()
        .map(|z| Feature {
            at: z.center,
            scale: 0.5 * z.pole.rho,
        })
        .collect()
}

fn planar_energy(config: &ChargeConfiguration, spec: &QuadratureSpec) -> QuadratureResult {
    let zones = planar_zones(config, spec.radius_cap());
    let features = pole_features(&zones);
    let poles: Vec<(Complex64, f64)> = zones.iter().map(|z| (z.center, z.pole.weight)).collect();
    let kernel = |z: Complex64| -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(p, w) in &poles {
            acc += w / (p - z);
        }
        acc.norm()
    };
    let abs_tol = 1e-13 * config.total_variation();
    planar_integrate(&zones, &features, kernel, spec, abs_tol)
}

// ---------------------------------------------------------------------------
// d = 3: adaptive pole zones plus randomized Halton bulk.

struct SpatialZone {
    center: [f64; 3],
    frame: [[f64; 3]; 3],
    pole: Pole,
}

fn orthonormal_frame(axis: [f64; 3]) -> [[f64; 3]; 3] {
    let helper = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = axis[0] * helper[0] + axis[1] * helper[1] + axis[2] * helper[2];
    let mut e1 = [helper[0] - d * axis[0], helper[1] - d * axis[1], helper[2] - d * axis[2]];
    let n1 = norm(&e1);
    e1.iter_mut().for_each(|c| *c /= n1);
    let e2 = [
        axis[1] * e1[2] - axis[2] * e1[1],
        axis[2] * e1[0] - axis[0] * e1[2],
        axis[0] * e1[1] - axis[1] * e1[0],
    ];
    [axis, e1, e2]
}

impl SpatialZone {
    #[inline]
    fn map(&self, gamma: f64, psi: f64, u: f64) -> ([f64; 3], f64, f64) {
        let (sg, cg) = gamma.sin_cos();
        let (sp, cp) = psi.sin_cos();
        let reach = self
            .pole
            .rho
            .min(exit_distance(self.pole.norm, self.pole.boundary, cg));
        let r = u * reach;
        let [e0, e1, e2] = self.frame;
        let mut x = self.center;
        for i in 0..3 {
            x[i] += r * (cg * e0[i] + sg * (cp * e1[i] + sp * e2[i]));
        }
        (x, r, r * r * reach * sg)
    }

    fn initial_regions(&self, zone: usize) -> Vec<Region<3>> {
        let p = &self.pole;
        let breaks: Vec<f64> = match (p.boundary, kink_angle(p.norm, p.boundary, p.rho)) {
            (true, Some(k)) => vec![0.5 * PI, k, PI],
            (false, Some(k)) => vec![0.0, k, PI],
            _ => vec![0.0, 0.5 * PI, PI],
        };
        let mut out = Vec::new();
        for w in breaks.windows(2).filter(|w| w[1] > w[0]) {
            for (p0, p1) in [(0.0, PI), (PI, 2.0 * PI)] {
                out.push(Region::new(zone, [w[0], p0, 0.0], [w[1], p1, 1.0]));
            }
        }
        out
    }
}

fn field_magnitude(points: &[([f64; 3], f64)], x: &[f64; 3]) -> f64 {
    let mut f = [0.0; 3];
    for (p, w) in points {
        let d = [p[0] - x[0], p[1] - x[1], p[2] - x[2]];
        let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let s = w / (r2 * r2.sqrt());
        f[0] += s * d[0];
        f[1] += s * d[1];
        f[2] += s * d[2];
    }
    norm(&f)
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    out
}

const QMC_REPLICATES: usize = 16;
const QMC_CHUNK: u64 = 2048;

fn spatial_energy(config: &ChargeConfiguration, spec: &QuadratureSpec) -> QuadratureResult {
    let poles = poles_of(config, spec.radius_cap());
    let zones: Vec<SpatialZone> = poles
        .iter()
        .zip(config.charges())
        .map(|(pole, c)| {
            let center = [c.position[0], c.position[1], c.position[2]];
            let axis = if pole.norm > 0.0 {
                [center[0] / pole.norm, center[1] / pole.norm, center[2] / pole.norm]
            } else {
                [0.0, 0.0, 1.0]
            };
            SpatialZone {
                center,
                frame: orthonormal_frame(axis),
                pole: *pole,
            }
        })
        .collect();
    let points: Vec<([f64; 3], f64)> = zones.iter().map(|z| (z.center, z.pole.weight)).collect();

    let f = |zone: usize, x: &[f64; 3]| -> f64 {
        let z = &zones[zone];
        let (p, r, jac) = z.map(x[0], x[1], x[2]);
        let w = cutoff(r, z.pole.rho);
        if w == 0.0 || jac == 0.0 {
            0.0
        } else {
            w * field_magnitude(&points, &p) * jac
        }
    };
    let initial: Vec<Region<3>> = zones
        .iter()
        .enumerate()
        .flat_map(|(k, z)| z.initial_regions(k))
        .collect();
    let zone_settings = CubatureSettings {
        rel_tol: 0.2 * spec.rel_tolerance,
        abs_tol: 1e-13 * config.total_variation(),
        max_evals: spec.max_evals / 2,
        execution: spec.execution,
    };
    let zone_out = cubature::integrate(initial, &f, &|_: &Region<3>| None, &zone_settings);

    let bulk = |x: &[f64; 3]| -> f64 {
        let mut w = 1.0;
        for z in &zones {
            let r = distance(x, &z.center);
            if r < z.pole.rho {
                w -= cutoff(r, z.pole.rho);
            }
        }
        if w <= 0.0 {
            0.0
        } else {
            w * field_magnitude(&points, x)
        }
    };
    let shifts: Vec<[f64; 3]> = (0..QMC_REPLICATES)
        .map(|k| {
            let mut rng = block_rng(spec.seed, purpose::QMC_SHIFT, k as u32);
            [rng.gen(), rng.gen(), rng.gen()]
        })
        .collect();
    let chunk_sum = |(rep, chunk): (usize, u64)| -> f64 {
        let s = shifts[rep];
        let mut acc = 0.0;
        for i in chunk * QMC_CHUNK..(chunk + 1) * QMC_CHUNK {
            let a = (radical_inverse(i + 1, 2) + s[0]).fract();
            let b = (radical_inverse(i + 1, 3) + s[1]).fract();
            let c = (radical_inverse(i + 1, 5) + s[2]).fract();
            let r = a.cbrt();
            let ct = 1.0 - 2.0 * b;
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            let (sp, cp) = (2.0 * PI * c).sin_cos();
            acc += bulk(&[r * st * cp, r * st * sp, r * ct]);
        }
        acc
    };

    let volume = unit_ball_volume(3);
    let mut sums = [0.0; QMC_REPLICATES];
    let mut chunks_done = 0u64;
    let budget = spec.max_evals.saturating_sub(zone_out.evals);
    let round = QMC_CHUNK * QMC_REPLICATES as u64;
    if budget < round {
        return QuadratureResult {
            value: zone_out.value,
            error: f64::INFINITY,
            error_kind: ErrorKind::StdError,
            evals: zone_out.evals,
            converged: false,
            method: Method::PolePolarQmc,
        };
    }
    let mut chunks_target = (budget / round).min(4);
    let (value, std_err, converged) = loop {
        let jobs: Vec<(usize, u64)> = (0..QMC_REPLICATES)
            .flat_map(|rep| (chunks_done..chunks_target).map(move |c| (rep, c)))
            .collect();
        let partial = spec.execution.map(&jobs, |&job| chunk_sum(job));
        for (job, s) in jobs.iter().zip(partial) {
            sums[job.0] += s;
        }
        chunks_done = chunks_target;
        let n = (chunks_done * QMC_CHUNK) as f64;
        let means: Vec<f64> = sums.iter().map(|s| volume * s / n).collect();
        let mean = means.iter().sum::<f64>() / QMC_REPLICATES as f64;
        let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>()
            / (QMC_REPLICATES - 1) as f64;
        let std_err = (var / QMC_REPLICATES as f64).sqrt();
        let total = mean + zone_out.value;
        let used = chunks_done * QMC_CHUNK * QMC_REPLICATES as u64;
        if std_err <= 0.8 * spec.rel_tolerance * total.abs() {
            break (mean, std_err, true);
        }
        if 2 * used > budget {
            break (mean, std_err, false);
        }
        chunks_target *= 2;
    };
    let bulk_evals = chunks_done * QMC_CHUNK * QMC_REPLICATES as u64;
    QuadratureResult {
        value: zone_out.value + value,
        error: zone_out.error + std_err,
        error_kind: ErrorKind::StdError,
        evals: zone_out.evals + bulk_evals,
        converged: converged && zone_out.converged,
        method: Method::PolePolarQmc,
    }
}

// ---------------------------------------------------------------------------
// Any d: importance-sampled Monte Carlo.

const MC_CHUNK: u64 = 4096;
const MC_UNIFORM_SHARE: f64 = 0.25;
/// Radius of the per-pole `r^{1−d}` proposal; 2 covers the whole ball.
const MC_PROPOSAL_RADIUS: f64 = 2.0;

fn monte_carlo_energy(config: &ChargeConfiguration, spec: &QuadratureSpec) -> QuadratureResult {
    let d = config.dimension();
    let poles = poles_of(config, spec.radius_cap());
    let centers: Vec<Vec<f64>> = config.charges().iter().map(|c| c.position.clone()).collect();
    let tv = config.total_variation();
    let v_d = unit_ball_volume(d);
    let surface = d as f64 * v_d;
    let cumulative: Vec<f64> = poles
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p.weight.abs() / tv;
            Some(*acc)
        })
        .collect();

    let density = |x: &[f64]| -> f64 {
        let mut q = if norm(x) < 1.0 { MC_UNIFORM_SHARE / v_d } else { 0.0 };
        for (p, c) in poles.iter().zip(&centers) {
            let r = distance(x, c);
            if r < MC_PROPOSAL_RADIUS {
                q += (1.0 - MC_UNIFORM_SHARE) * (p.weight.abs() / tv)
                    / (MC_PROPOSAL_RADIUS * surface * r.powi(d as i32 - 1));
            }
        }
        q
    };
    let magnitude = |x: &[f64]| -> f64 {
        let mut f = vec![0.0; d];
        for (p, c) in poles.iter().zip(&centers) {
            let mut r2 = 0.0;
            for i in 0..d {
                r2 += (c[i] - x[i]) * (c[i] - x[i]);
            }
            let s = p.weight / r2.powf(0.5 * d as f64);
            for i in 0..d {
                f[i] += s * (c[i] - x[i]);
            }
        }
        norm(&f)
    };
    // Only budgets below one chunk shorten it.
    let chunk_len = MC_CHUNK.min(spec.max_evals);
    let chunk = |index: u64| -> (f64, f64) {
        let mut rng = block_rng(spec.seed, purpose::MONTE_CARLO, index as u32);
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for _ in 0..chunk_len {
            let x: Vec<f64> = if rng.gen::<f64>() < MC_UNIFORM_SHARE {
                let dir = random_unit_vector(&mut rng, d);
                let r = rng.gen::<f64>().powf(1.0 / d as f64);
                dir.into_iter().map(|c| c * r).collect()
            } else {
                let u: f64 = rng.gen();
                let k = cumulative.iter().position(|&c| u < c).unwrap_or(poles.len() - 1);
                let dir = random_unit_vector(&mut rng, d);
                let r = rng.gen::<f64>() * MC_PROPOSAL_RADIUS;
                centers[k].iter().zip(dir).map(|(c, e)| c + r * e).collect()
            };
            let v = if norm(&x) < 1.0 {
                magnitude(&x) / density(&x)
            } else {
                0.0
            };
            s1 += v;
            s2 += v * v;
        }
        (s1, s2)
    };

    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut done = 0u64;
    let mut target = (spec.max_evals / chunk_len).min(64);
    loop {
        let ids: Vec<u64> = (done..target).collect();
        for (a, b) in spec.execution.map(&ids, |&i| chunk(i)) {
            s1 += a;
            s2 += b;
        }
        done = target;
        let n = (done * chunk_len) as f64;
        let mean = s1 / n;
        let var = (s2 / n - mean * mean).max(0.0);
        let std_err = (var / n).sqrt();
        let evals = done * chunk_len;
        let converged = std_err <= spec.rel_tolerance * mean.abs();
        if converged || 2 * evals > spec.max_evals {
            return QuadratureResult {
                value: mean,
                error: std_err,
                error_kind: ErrorKind::StdError,
                evals,
                converged,
                method: Method::MonteCarlo,
            };
        }
        target *= 2;
    }
}

/// `∫_{B^d} |Σ α_k (x_k − x)/|x_k − x|^d| dm(x)`.
pub fn chui_energy(config: &ChargeConfiguration, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    spec.validate()?;
    let method = spec.resolve(config.dimension())?;
    let Some(merged) = config.merged(MERGE_DISTANCE) else {
        return Ok(QuadratureResult::zero(method));
    };
    Ok(match method {
        Method::PolePolarAdaptive => planar_energy(&merged, spec),
        Method::PolePolarQmc => spatial_energy(&merged, spec),
        _ => monte_carlo_energy(&merged, spec),
    })
}

/// `∫_𝔻 |1/(z − z₀) − (1/l)∫_I dθ/(z − e^{iθ})| dm(z)` for an arc `I` whose
/// midpoint is the angle of `z₀`.
pub fn l1_defect(z0: Complex64, arc: &Arc, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if ((z0.norm() - 1.0).abs()) > 1e-12 {
        return Err(invalid("defect pole must lie on the unit circle"));
    }
    let mismatch = (z0.arg() - arc.midpoint()).rem_euclid(2.0 * PI);
    if mismatch.min(2.0 * PI - mismatch) > 1e-9 {
        return Err(invalid("defect pole must sit at the arc midpoint"));
    }
    defect_for_length(arc.length(), spec)
}

/// The defect of an arc of length `l`; rotation invariance puts the pole at 1.
pub fn defect_for_length(l: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    spec.validate()?;
    if !(l > 0.0 && l <= 2.0 * PI + 1e-12) {
        return Err(invalid(format!("arc length must lie in (0, 2π], got {l}")));
    }
    let l = l.min(2.0 * PI);
    let rho = spec.radius_cap().min(0.25 * l);
    let pole = Pole {
        weight: 1.0,
        rho,
        norm: 1.0,
        boundary: true,
    };
    let zones = [PlanarZone {
        center: Complex64::new(1.0, 0.0),
        axis: Complex64::new(1.0, 0.0),
        pole,
    }];
    let mut features = pole_features(&zones);
    let full = l >= 2.0 * PI;
    if !full {
        for end in [0.5 * l, -0.5 * l] {
            features.push(Feature {
                at: Complex64::from_polar(1.0, end),
                scale: l / 16.0,
            });
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let kernel = |z: Complex64| -> f64 {
        let mean = if full {
            Complex64::new(0.0, 0.0)
        } else {
            averaged_kernel_closed(z, -0.5 * l, 0.5 * l)
        };
        (1.0 / (z - one) - mean).norm()
    };
    Ok(planar_integrate(&zones, &features, kernel, spec, 1e-14 * l))
}

/// `∫_𝔻 |1/(z − a) − 1/(z − b)| dm(z)` for `a ≠ b` in the closed disc with
/// `|a − b| ≤ 1`.
pub fn two_pole_l1(a: Complex64, b: Complex64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    spec.validate()?;
    let delta = (a - b).norm();
    if delta < MERGE_DISTANCE {
        return Err(invalid("two-pole integral needs distinct poles"));
    }
    if delta > 1.0 + 1e-12 {
        return Err(invalid(format!("pole separation {delta} exceeds 1")));
    }
    let config = ChargeConfiguration::planar(&[(a, 1.0), (b, -1.0)])?;
    let zones = planar_zones(&config, spec.radius_cap());
    let features = pole_features(&zones);
    let kernel = |z: Complex64| (1.0 / (z - a) - 1.0 / (z - b)).norm();
    Ok(planar_integrate(&zones, &features, kernel, spec, 1e-14 * delta))
}
