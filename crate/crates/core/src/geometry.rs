//! Charge configurations in the closed unit ball and the standard layouts
//! used by the experiments: roots of unity, weighted arcs, Fibonacci
//! spheres and seeded random samples.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{block_rng, purpose};

/// Distance from the unit sphere below which a charge is snapped onto it.
pub const BOUNDARY_SNAP: f64 = 1e-12;

/// A weighted point charge.
#[derive(Debug, Clone, PartialEq)]
pub struct Charge {
    pub position: Vec<f64>,
    pub weight: f64,
    /// Set when the position lies on the unit sphere.
    pub boundary: bool,
}

impl Charge {
    pub fn norm(&self) -> f64 {
        norm(&self.position)
    }
}

/// A finite set of weighted charges in the closed unit ball of R^d.
///
/// Positions within [`BOUNDARY_SNAP`] of the sphere are renormalized to unit
/// length on construction and flagged as boundary charges.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeConfiguration {
    dimension: usize,
    charges: Vec<Charge>,
}

#[derive(Serialize, Deserialize)]
struct RawCharge {
    position: Vec<f64>,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct RawConfiguration {
    dimension: usize,
    charges: Vec<RawCharge>,
}

impl ChargeConfiguration {
    pub fn new(dimension: usize, charges: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if dimension < 2 {
            return Err(invalid(format!("dimension must be at least 2, got {dimension}")));
        }
        if charges.is_empty() {
            return Err(invalid("a configuration needs at least one charge"));
        }
        let mut out = Vec::with_capacity(charges.len());
        for (i, (mut position, weight)) in charges.into_iter().enumerate() {
            if position.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: position.len(),
                });
            }
            if !weight.is_finite() || weight == 0.0 {
                return Err(invalid(format!("charge {i}: weight must be finite and nonzero")));
            }
            if position.iter().any(|c| !c.is_finite()) {
                return Err(invalid(format!("charge {i}: non-finite coordinate")));
            }
            let r = norm(&position);
            if r > 1.0 + BOUNDARY_SNAP {
                return Err(invalid(format!("charge {i}: |x| = {r} lies outside the unit ball")));
            }
            let boundary = (r - 1.0).abs() <= BOUNDARY_SNAP;
            if boundary {
                position.iter_mut().for_each(|c| *c /= r);
            }
            out.push(Charge {
                position,
                weight,
                boundary,
            });
        }
        Ok(Self {
            dimension,
            charges: out,
        })
    }

    /// Planar configuration from complex positions.
    pub fn planar(points: &[(Complex64, f64)]) -> Result<Self> {
        Self::new(
            2,
            points.iter().map(|(z, w)| (vec![z.re, z.im], *w)).collect(),
        )
    }

    /// Boundary configuration on the unit circle from angles (radians).
    pub fn from_angles(angles: &[f64], weights: &[f64]) -> Result<Self> {
        if angles.len() != weights.len() {
            return Err(invalid("angles and weights differ in length"));
        }
        Self::new(
            2,
            angles
                .iter()
                .zip(weights)
                .map(|(t, w)| (vec![t.cos(), t.sin()], *w))
                .collect(),
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn charges(&self) -> &[Charge] {
        &self.charges
    }

    pub fn len(&self) -> usize {
        self.charges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charges.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.charges.iter().map(|c| c.weight).collect()
    }

    /// All weights strictly positive.
    pub fn is_positive(&self) -> bool {
        self.charges.iter().all(|c| c.weight > 0.0)
    }

    pub fn all_boundary(&self) -> bool {
        self.charges.iter().all(|c| c.boundary)
    }

    /// Total variation of the discrete measure, Σ|α_k|.
    pub fn total_variation(&self) -> f64 {
        self.charges.iter().map(|c| c.weight.abs()).sum()
    }

    /// Complex positions; only meaningful for d = 2.
    pub fn complex_positions(&self) -> Result<Vec<Complex64>> {
        self.require_planar()?;
        Ok(self
            .charges
            .iter()
            .map(|c| Complex64::new(c.position[0], c.position[1]))
            .collect())
    }

    /// Polar angles of planar charges in (−π, π].
    pub fn angles(&self) -> Result<Vec<f64>> {
        Ok(self.complex_positions()?.iter().map(|z| z.arg()).collect())
    }

    pub(crate) fn require_planar(&self) -> Result<()> {
        if self.dimension != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.dimension,
            });
        }
        Ok(())
    }

    /// Same positions, all weights multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.dimension,
            self.charges
                .iter()
                .map(|c| (c.position.clone(), c.weight * factor))
                .collect(),
        )
    }

    /// Planar rotation by `angle` (acts on the first two coordinates).
    pub fn rotated(&self, angle: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        Self::new(
            self.dimension,
            self.charges
                .iter()
                .map(|ch| {
                    let mut p = ch.position.clone();
                    let (x, y) = (p[0], p[1]);
                    p[0] = c * x - s * y;
                    p[1] = s * x + c * y;
                    (p, ch.weight)
                })
                .collect(),
        )
    }

    /// Union of two configurations of the same dimension.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        Self::new(
            self.dimension,
            self.charges
                .iter()
                .chain(other.charges.iter())
                .map(|c| (c.position.clone(), c.weight))
                .collect(),
        )
    }

    /// Merge charges closer than `tol` by summing weights; charges whose
    /// merged weight cancels exactly are dropped. Returns `None` when every
    /// charge cancels.
    pub fn merged(&self, tol: f64) -> Option<Self> {
        let mut kept: Vec<(Vec<f64>, f64)> = Vec::new();
        for c in &self.charges {
            match kept.iter_mut().find(|(p, _)| distance(p, &c.position) < tol) {
                Some((_, w)) => *w += c.weight,
                None => kept.push((c.position.clone(), c.weight)),
            }
        }
        kept.retain(|(_, w)| *w != 0.0);
        if kept.is_empty() {
            None
        } else {
            Self::new(self.dimension, kept).ok()
        }
    }

    /// Smallest pairwise distance between charges (infinite for one charge).
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.charges.len() {
            for j in i + 1..self.charges.len() {
                best = best.min(distance(&self.charges[i].position, &self.charges[j].position));
            }
        }
        best
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = RawConfiguration {
            dimension: self.dimension,
            charges: self
                .charges
                .iter()
                .map(|c| RawCharge {
                    position: c.position.clone(),
                    weight: c.weight,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&raw)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfiguration = serde_json::from_str(text)?;
        Self::new(
            raw.dimension,
            raw.charges.into_iter().map(|c| (c.position, c.weight)).collect(),
        )
    }
}

impl Serialize for ChargeConfiguration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawConfiguration {
            dimension: self.dimension,
            charges: self
                .charges
                .iter()
                .map(|c| RawCharge {
                    position: c.position.clone(),
                    weight: c.weight,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChargeConfiguration {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawConfiguration::deserialize(d)?;
        Self::new(
            raw.dimension,
            raw.charges.into_iter().map(|c| (c.position, c.weight)).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// A semi-closed interval `[start, end)` of angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
}

impl Arc {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(invalid(format!("arc [{start}, {end}) has nonpositive length")));
        }
        Ok(Self { start, end })
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.start + self.end)
    }

    /// Arc of length `length` centred at angle `mid`.
    pub fn centered(mid: f64, length: f64) -> Result<Self> {
        Self::new(mid - 0.5 * length, mid + 0.5 * length)
    }
}

/// Consecutive arcs tiling `[−π, π)`, one per charge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcPartition {
    pub arcs: Vec<Arc>,
}

impl ArcPartition {
    pub fn lengths(&self) -> Vec<f64> {
        self.arcs.iter().map(Arc::length).collect()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.arcs.iter().map(Arc::midpoint).collect()
    }
}

/// `n` unit charges at the n-th roots of unity.
pub fn uniform_circle_config(n: usize) -> Result<ChargeConfiguration> {
    if n == 0 {
        return Err(invalid("uniform configuration needs n >= 1"));
    }
    let angles: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    ChargeConfiguration::from_angles(&angles, &vec![1.0; n])
}

/// Charges at the midpoints of consecutive arcs of length `2π α_k / Σα`,
/// laid out from −π in input order.
pub fn weighted_arc_config(weights: &[f64]) -> Result<(ChargeConfiguration, ArcPartition)> {
    if weights.is_empty() {
        return Err(invalid("weighted arc configuration needs at least one weight"));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(invalid(format!("weights must be positive, got {w}")));
    }
    let total: f64 = weights.iter().sum();
    let mut arcs = Vec::with_capacity(weights.len());
    let mut start = -PI;
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        let end = if k + 1 == weights.len() {
            PI
        } else {
            -PI + 2.0 * PI * acc / total
        };
        arcs.push(Arc::new(start, end)?);
        start = end;
    }
    let partition = ArcPartition { arcs };
    let config = ChargeConfiguration::from_angles(&partition.midpoints(), weights)?;
    Ok((config, partition))
}

/// `n` unit charges on S² from the Fibonacci lattice: equal-area latitude
/// bands with golden-angle azimuth steps.
pub fn fibonacci_sphere_config(n: usize) -> Result<ChargeConfiguration> {
    if n == 0 {
        return Err(invalid("fibonacci configuration needs n >= 1"));
    }
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    let charges = (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            (vec![rho * phi.cos(), rho * phi.sin(), z], 1.0)
        })
        .collect();
    ChargeConfiguration::new(3, charges)
}

/// `n` unit charges drawn uniformly on S^{d−1}, or uniformly in B^d when
/// `interior` is set. Deterministic in `seed`.
pub fn random_config(n: usize, d: usize, seed: u64, interior: bool) -> Result<ChargeConfiguration> {
    if n == 0 || d < 2 {
        return Err(invalid("random configuration needs n >= 1 and d >= 2"));
    }
    let mut rng = block_rng(seed, purpose::CONFIG, 0);
    let charges = (0..n)
        .map(|_| {
            let dir = random_unit_vector(&mut rng, d);
            let scale = if interior {
                let u: f64 = rng.gen();
                u.powf(1.0 / d as f64).min(1.0 - 1e-9)
            } else {
                1.0
            };
            (dir.into_iter().map(|c| c * scale).collect(), 1.0)
        })
        .collect();
    ChargeConfiguration::new(d, charges)
}

pub(crate) fn random_unit_vector<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let r = norm(&v);
        if r > 1e-8 {
            return v.into_iter().map(|c| c / r).collect();
        }
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Volume of the unit ball in R^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    // v_d = 2π/d · v_{d−2}, v_0 = 1, v_1 = 2
    let (mut v, start) = if d % 2 == 0 { (1.0, 2) } else { (2.0, 3) };
    let mut k = start;
    while k <= d {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}
