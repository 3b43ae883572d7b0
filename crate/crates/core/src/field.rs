//! Point evaluation of the field, potential and Cauchy transform of a
//! charge configuration, and of the arc-averaged Cauchy kernel.
//!
//! Sign convention: [`field_at`] returns `Σ α_k (x_k − x)/|x_k − x|^d`.
//! For d ≥ 3 this is `+∇U` of the potential returned by [`potential_at`];
//! for d = 2 it is `−∇u` with `u = Σ α_k ln|x − x_k|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubature::integrate_complex;
use crate::error::{invalid, Error, Result};
use crate::geometry::{distance, norm, Arc, ChargeConfiguration};

/// Poles closer than this to an evaluation point are rejected.
pub const SINGULAR_RADIUS: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub point: Vec<f64>,
    pub field: Vec<f64>,
    pub magnitude: f64,
}

fn check_point(config: &ChargeConfiguration, x: &[f64]) -> Result<()> {
    if x.len() != config.dimension() {
        return Err(Error::DimensionMismatch {
            expected: config.dimension(),
            got: x.len(),
        });
    }
    if !(norm(x) < 1.0) {
        return Err(Error::OutsideBall(x.to_vec()));
    }
    for (index, c) in config.charges().iter().enumerate() {
        let distance = distance(x, &c.position);
        if distance < SINGULAR_RADIUS {
            return Err(Error::SingularPoint {
                point: x.to_vec(),
                index,
                distance,
            });
        }
    }
    Ok(())
}

/// `Σ α_k (x_k − x)/|x_k − x|^d` at an interior point.
pub fn field_at(config: &ChargeConfiguration, x: &[f64]) -> Result<FieldSample> {
    check_point(config, x)?;
    let d = config.dimension();
    let mut field = vec![0.0; d];
    let mut diff = vec![0.0; d];
    for c in config.charges() {
        let mut r2 = 0.0;
        for i in 0..d {
            diff[i] = c.position[i] - x[i];
            r2 += diff[i] * diff[i];
        }
        let scale = c.weight / r2.powf(0.5 * d as f64);
        for i in 0..d {
            field[i] += scale * diff[i];
        }
    }
    let magnitude = norm(&field);
    Ok(FieldSample {
        point: x.to_vec(),
        field,
        magnitude,
    })
}

/// Cauchy transform `Σ α_k/(z_k − z)` of the planar discrete measure.
pub fn cauchy_transform(config: &ChargeConfiguration, z: Complex64) -> Result<Complex64> {
    config.require_planar()?;
    check_point(config, &[z.re, z.im])?;
    Ok(config
        .charges()
        .iter()
        .map(|c| c.weight / (Complex64::new(c.position[0], c.position[1]) - z))
        .sum())
}

/// Potential whose gradient is tied to [`field_at`] (see module docs).
pub fn potential_at(config: &ChargeConfiguration, x: &[f64]) -> Result<f64> {
    check_point(config, x)?;
    let d = config.dimension();
    Ok(config
        .charges()
        .iter()
        .map(|c| {
            let r = distance(x, &c.position);
            c.weight
                * match d {
                    2 => r.ln(),
                    3 => 1.0 / r,
                    _ => r.powi(2 - d as i32) / (d as f64 - 2.0),
                }
        })
        .sum())
}

/// Mean of the Cauchy kernel over an arc: `(1/l)∫_a^b dθ/(z − e^{iθ})`.
pub fn averaged_kernel(z: Complex64, arc: &Arc) -> Result<Complex64> {
    let l = arc.length();
    if !(l > 0.0) {
        return Err(invalid("averaged kernel needs an arc of positive length"));
    }
    if !(z.norm() < 1.0) {
        return Err(Error::OutsideBall(vec![z.re, z.im]));
    }
    Ok(averaged_kernel_unchecked(z, arc.start, arc.end))
}

pub(crate) fn averaged_kernel_unchecked(z: Complex64, a: f64, b: f64) -> Complex64 {
    let l = b - a;
    let kernel = |t: f64| 1.0 / (z - Complex64::from_polar(1.0, t));
    let abs_tol = 1e-13 * l;
    let (value, _, _) = integrate_complex(kernel, a, b, abs_tol, 1e-11, 4000);
    value / l
}

/// Averaged kernel in closed form: a power series in `z` for `|z| ≤ 1/2`,
/// otherwise `(1/(i z l))·(i l − Δ log(e^{iθ} − z))`, where the increment of
/// the argument along the arc is the angle the arc subtends at `z`, which
/// lies in `(0, 2π)` for interior `z` and arcs shorter than the circle.
pub(crate) fn averaged_kernel_closed(z: Complex64, a: f64, b: f64) -> Complex64 {
    let l = b - a;
    if l >= 2.0 * PI {
        return Complex64::new(0.0, 0.0);
    }
    let i = Complex64::i();
    if z.norm() <= 0.5 {
        // 1/(z − e^{iθ}) = −Σ_j z^j e^{−i(j+1)θ}
        let step_a = Complex64::from_polar(1.0, -a);
        let step_b = Complex64::from_polar(1.0, -b);
        let (mut ea, mut eb) = (step_a, step_b);
        let mut zj = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 1..=64 {
            acc += zj * i * (eb - ea) / m as f64;
            zj *= z;
            if zj.norm() < 1e-18 {
                break;
            }
            ea *= step_a;
            eb *= step_b;
        }
        return -acc / l;
    }
    let ratio = (Complex64::from_polar(1.0, b) - z) / (Complex64::from_polar(1.0, a) - z);
    let mut subtended = ratio.arg();
    if subtended <= 0.0 {
        subtended += 2.0 * PI;
    }
    let change = Complex64::new(ratio.norm().ln(), subtended);
    (i * l - change) / (i * z * l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{random_config, uniform_circle_config, ChargeConfiguration};
    use approx::assert_relative_eq;
    use rand::Rng;

    fn random_interior_point<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
        loop {
            let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if norm(&p) < 0.95 {
                return p;
            }
        }
    }

    #[test]
    fn single_and_antipodal() {
        let one = uniform_circle_config(1).unwrap();
        let s = field_at(&one, &[0.0, 0.0]).unwrap();
        assert_eq!(s.field, vec![1.0, 0.0]);
        assert_eq!(s.magnitude, 1.0);
        let two = uniform_circle_config(2).unwrap();
        let s = field_at(&two, &[0.0, 0.0]).unwrap();
        assert!(s.magnitude < 1e-15);
    }

    #[test]
    fn uniform_log_derivative_identity() {
        let mut rng = crate::rng::block_rng(11, 0, 0);
        for n in [1usize, 2, 3, 5, 8, 13] {
            let c = uniform_circle_config(n).unwrap();
            for _ in 0..50 {
                let p = random_interior_point(&mut rng, 2);
                let z = Complex64::new(p[0], p[1]);
                let want = (n as f64 * z.powu(n as u32 - 1) / (z.powu(n as u32) - 1.0)).norm();
                let got = field_at(&c, &p).unwrap().magnitude;
                // Near the zero of F at the origin the sum cancels; the floor covers
                // rounding relative to the individual terms.
                assert_relative_eq!(got, want, max_relative = 1e-10, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cauchy_examples_and_agreement() {
        let one = uniform_circle_config(1).unwrap();
        assert_eq!(cauchy_transform(&one, Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
        let two = uniform_circle_config(2).unwrap();
        assert!(cauchy_transform(&two, Complex64::new(0.0, 0.0)).unwrap().norm() < 1e-15);

        let mut rng = crate::rng::block_rng(5, 0, 0);
        let (c, _) = crate::geometry::weighted_arc_config(&[0.3, 1.0, 2.5, 0.7]).unwrap();
        for _ in 0..100 {
            let p = random_interior_point(&mut rng, 2);
            let ct = cauchy_transform(&c, Complex64::new(p[0], p[1])).unwrap();
            let f = field_at(&c, &p).unwrap();
            assert_relative_eq!(ct.norm(), f.magnitude, max_relative = 1e-12);
            // F is the complex conjugate of the transform.
            assert_relative_eq!(ct.re, f.field[0], max_relative = 1e-12, epsilon = 1e-12);
            assert_relative_eq!(-ct.im, f.field[1], max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn singular_and_outside_rejected() {
        let c = ChargeConfiguration::new(2, vec![(vec![0.5, 0.0], 1.0)]).unwrap();
        assert!(matches!(field_at(&c, &[0.5, 0.0]), Err(Error::SingularPoint { .. })));
        assert!(matches!(field_at(&c, &[1.0, 0.0]), Err(Error::OutsideBall(_))));
        assert!(potential_at(&c, &[0.5, 0.0]).is_err());
        assert!(cauchy_transform(&c, Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn potential_examples() {
        let c3 = ChargeConfiguration::new(3, vec![(vec![0.0, 0.0, 1.0], 1.0)]).unwrap();
        assert_eq!(potential_at(&c3, &[0.0, 0.0, 0.0]).unwrap(), 1.0);
        let c2 = uniform_circle_config(1).unwrap();
        assert_eq!(potential_at(&c2, &[0.0, 0.0]).unwrap(), 0.0);
    }

    /// Central differences of the potential against the field.
    #[test]
    fn finite_difference_gradient_sign() {
        let h = 1e-5;
        for (d, sign) in [(2usize, -1.0), (3, 1.0), (4, 1.0)] {
            let c = random_config(4, d, 17 + d as u64, false).unwrap();
            let mut rng = crate::rng::block_rng(d as u64, 0, 0);
            for _ in 0..50 {
                let x = random_interior_point(&mut rng, d);
                let f = field_at(&c, &x).unwrap();
                let mut grad = vec![0.0; d];
                for i in 0..d {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    grad[i] = (potential_at(&c, &xp).unwrap() - potential_at(&c, &xm).unwrap()) / (2.0 * h);
                }
                let diff: Vec<f64> = grad.iter().zip(&f.field).map(|(g, e)| g - sign * e).collect();
                assert!(norm(&diff) <= 1e-6 * f.magnitude.max(1e-3), "d={d}");
            }
        }
    }

    #[test]
    fn averaged_kernel_examples() {
        let full = Arc::new(-PI, PI).unwrap();
        for z in [Complex64::new(0.0, 0.0), Complex64::new(0.3, -0.4), Complex64::new(0.95, 0.1)] {
            assert!(averaged_kernel(z, &full).unwrap().norm() <= 1e-10);
        }
        let half = Arc::new(0.0, PI).unwrap();
        let v = averaged_kernel(Complex64::new(0.0, 0.0), &half).unwrap();
        assert_relative_eq!(v.re, 0.0, epsilon = 1e-12);
        assert_relative_eq!(v.im, 2.0 / PI, max_relative = 1e-10);

        let z = Complex64::new(0.2, 0.5);
        let t0: f64 = 0.7;
        let point = 1.0 / (z - Complex64::from_polar(1.0, t0));
        let tiny = averaged_kernel(z, &Arc::centered(t0, 1e-6).unwrap()).unwrap();
        assert!((tiny - point).norm() <= 1e-9 * point.norm());

        assert!(averaged_kernel(Complex64::new(1.0, 0.0), &half).is_err());
        assert!(Arc::new(0.3, 0.3).is_err());
    }

    /// Closed-form antiderivative `(1/(iz))[i·θ − log(z − e^{iθ})]`, with the
    /// logarithm tracked continuously by summing principal increments.
    fn averaged_kernel_closed_form(z: Complex64, a: f64, b: f64) -> Complex64 {
        let steps = 4096;
        let mut log_change = Complex64::new(0.0, 0.0);
        let mut prev = z - Complex64::from_polar(1.0, a);
        for k in 1..=steps {
            let t = a + (b - a) * k as f64 / steps as f64;
            let cur = z - Complex64::from_polar(1.0, t);
            log_change += (cur / prev).ln();
            prev = cur;
        }
        let i = Complex64::i();
        (i * (b - a) - log_change) / (i * z) / (b - a)
    }

    #[test]
    fn averaged_kernel_matches_antiderivative() {
        let mut rng = crate::rng::block_rng(3, 0, 0);
        for _ in 0..200 {
            let p = random_interior_point(&mut rng, 2);
            let z = Complex64::new(p[0], p[1]);
            if z.norm() < 0.05 {
                continue;
            }
            let a = rng.gen_range(-PI..PI);
            let b = rng.gen_range(a..PI).max(a + 1e-3);
            let q = averaged_kernel(z, &Arc::new(a, b).unwrap()).unwrap();
            let c = averaged_kernel_closed_form(z, a, b);
            assert!((q - c).norm() <= 1e-9 * c.norm().max(1.0), "{q} vs {c}");
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let mut rng = crate::rng::block_rng(9, 0, 0);
        for k in 0..2000 {
            let p = random_interior_point(&mut rng, 2);
            let scale = if k % 3 == 0 { 0.999 / 0.95 } else { 1.0 };
            let z = Complex64::new(p[0], p[1]) * scale;
            let a = rng.gen_range(-PI..PI - 0.2);
            let l = if k % 2 == 0 { rng.gen_range(1e-4..0.1) } else { rng.gen_range(0.1..(PI - a)) };
            let q = averaged_kernel_unchecked(z, a, a + l);
            let c = averaged_kernel_closed(z, a, a + l);
            assert!((q - c).norm() <= 1e-9 * q.norm().max(1.0), "z={z} a={a} l={l}: {q} vs {c}");
        }
        assert_eq!(averaged_kernel_closed(Complex64::new(0.3, 0.2), -PI, PI), Complex64::new(0.0, 0.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn planar_config(seed: u64, n: usize) -> ChargeConfiguration {
            let base = random_config(n, 2, seed, false).unwrap();
            let w: Vec<f64> = (0..n).map(|k| 0.5 + k as f64).collect();
            ChargeConfiguration::new(
                2,
                base.charges().iter().zip(w).map(|(c, w)| (c.position.clone(), w)).collect(),
            )
            .unwrap()
        }

        proptest! {
            #[test]
            fn rotation_equivariance(seed in 0u64..1000, n in 1usize..8, angle in -3.0f64..3.0,
                                     px in -0.6f64..0.6, py in -0.6f64..0.6) {
                let c = planar_config(seed, n);
                let rc = c.rotated(angle).unwrap();
                let (s, co) = angle.sin_cos();
                let x = [px, py];
                let rx = [co * px - s * py, s * px + co * py];
                let f = field_at(&c, &x).unwrap();
                let rf = field_at(&rc, &rx).unwrap();
                let want = [co * f.field[0] - s * f.field[1], s * f.field[0] + co * f.field[1]];
                let scale = f.magnitude.max(1.0);
                prop_assert!((rf.field[0] - want[0]).abs() <= 1e-12 * scale * n as f64);
                prop_assert!((rf.field[1] - want[1]).abs() <= 1e-12 * scale * n as f64);
            }

            #[test]
            fn homogeneity_and_superposition(seed in 0u64..1000, n in 1usize..8, lambda in 0.1f64..10.0,
                                              px in -0.6f64..0.6, py in -0.6f64..0.6) {
                let c = planar_config(seed, n);
                let other = planar_config(seed + 7, 3);
                let x = [px, py];
                let f = field_at(&c, &x).unwrap();
                let fs = field_at(&c.scaled(lambda).unwrap(), &x).unwrap();
                for i in 0..2 {
                    prop_assert!((fs.field[i] - lambda * f.field[i]).abs() <= 1e-13 * lambda * f.magnitude.max(1.0) * n as f64);
                }
                let g = field_at(&other, &x).unwrap();
                let u = field_at(&c.union(&other).unwrap(), &x).unwrap();
                for i in 0..2 {
                    prop_assert!((u.field[i] - f.field[i] - g.field[i]).abs()
                        <= 1e-13 * (f.magnitude + g.magnitude).max(1.0) * (n + 3) as f64);
                }
            }
        }
    }
}
