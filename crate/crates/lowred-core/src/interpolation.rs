//! Trigonometric interpolation from the 2d-1 circle nodes.
//!
//! A real trigonometric polynomial of degree at most d-1 (such as `|p|²`
//! for `p` of dimension d) is pinned down by its values at the nodes
//! `ω^l`, `l = 1..2d-1`, through the normalized Dirichlet kernel
//! `D_{d-1}(z) = (1/(2d-1)) Σ_{k=-(d-1)}^{d-1} z^k`:
//!
//! ```text
//! g(z) = Σ_{l=1}^{2d-1} g(ω^l) D_{d-1}(z ω^{-l})
//! ```
//!
//! Perturbing the samples by `γ` moves the interpolant by at most
//! `(2d-1)·‖γ‖_∞` uniformly on the circle.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::measurement::{MeasurementKind, MeasurementVector};
use crate::polyspace::UnitPoint;

/// Below this |angle| from a node the interpolant returns the sample
/// directly; keeps node reproduction exact and avoids the 0/0 of the
/// closed-form ratio.
const NODE_SNAP: f64 = 1e-12;
/// Below this |sin(t/2)| the kernel switches to the cosine-sum form.
const RATIO_GUARD: f64 = 1e-7;

/// The normalized Dirichlet kernel `D_{d-1}` at `z`; real on the circle.
///
/// Evaluated as `sin((2d-1)t/2) / ((2d-1) sin(t/2))` with a cosine-sum
/// fallback near the zeros of the denominator.
pub fn dirichlet(z: UnitPoint, d: usize) -> f64 {
    dirichlet_at_angle(z.angle(), d)
}

fn dirichlet_at_angle(t: f64, d: usize) -> f64 {
    let n = (2 * d - 1) as f64;
    let half = 0.5 * t;
    let den = half.sin();
    if den.abs() < RATIO_GUARD {
        // 1 + 2 sum cos(kt), stable and exact at t = 0
        let sum: f64 = (1..d).map(|k| (k as f64 * t).cos()).sum();
        (1.0 + 2.0 * sum) / n
    } else {
        (n * half).sin() / (n * den)
    }
}

/// A real trigonometric polynomial of degree at most d-1, stored by its
/// samples at the nodes `ω^l`, `l = 1..2d-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    samples: Vec<f64>,
    dim: usize,
}

impl TrigPolynomial {
    /// Interpolates from 2d-1 node samples; the length must be odd.
    pub fn interpolate(samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        if n == 0 || n % 2 == 0 {
            return Err(Error::WrongLength {
                expected: n + 1,
                got: n,
            });
        }
        Ok(TrigPolynomial {
            dim: (n + 1) / 2,
            samples,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sample at node `ω^l`, `l` 1-based.
    pub fn sample(&self, l: usize) -> Result<f64> {
        if l == 0 || l > self.samples.len() {
            return Err(Error::IndexOutOfRange {
                index: l,
                max: self.samples.len(),
            });
        }
        Ok(self.samples[l - 1])
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Evaluates the interpolant at `z` via the Dirichlet sum.
    ///
    /// Everything in the sum is real, so no imaginary residue can arise;
    /// exact node hits return the stored sample.
    pub fn eval(&self, z: UnitPoint) -> f64 {
        self.eval_at_angle(z.angle())
    }

    fn eval_at_angle(&self, theta: f64) -> f64 {
        let n = self.samples.len(); // 2d-1
        let nf = n as f64;
        let mut acc = 0.0;
        // sin((2d-1)t/2) with t = theta - 2pi l/(2d-1) equals
        // (-1)^l sin((2d-1)theta/2); only the denominator varies per node.
        let num = (nf * 0.5 * theta).sin();
        for (i, s) in self.samples.iter().enumerate() {
            let l = i + 1;
            let t = theta - TAU * l as f64 / nf; // in (-2pi, 2pi)
            if t.abs() < NODE_SNAP || (t.abs() - TAU).abs() < NODE_SNAP {
                return *s;
            }
            let den = (0.5 * t).sin();
            let dv = if den.abs() < RATIO_GUARD {
                let sum: f64 = (1..self.dim).map(|k| (k as f64 * t).cos()).sum();
                (1.0 + 2.0 * sum) / nf
            } else {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                sign * num / (nf * den)
            };
            acc += s * dv;
        }
        acc
    }
}

/// Splits a 6d-3 circle measurement into the three interpolated magnitude
/// families: `f₀ ≈ |p(z)|²`, `f₁ ≈ |p(z)-p(zν)|²`, `f₂ ≈ |p(z)-ip(zν)|²`.
///
/// Within band `b`, the sample attached to node `ω^l` is entry
/// `l + (b-1)(2d-1)`, because `ω^j` cycles with period 2d-1.
pub fn magnitude_families(
    m: &MeasurementVector,
) -> Result<(TrigPolynomial, TrigPolynomial, TrigPolynomial)> {
    if m.kind != MeasurementKind::Circle {
        return Err(Error::InvalidParameter(
            "magnitude families need a circle measurement".into(),
        ));
    }
    let d = m.dim;
    let expected = 6 * d - 3;
    if m.len() != expected {
        return Err(Error::WrongLength {
            expected,
            got: m.len(),
        });
    }
    let n = 2 * d - 1;
    let band = |b: usize| -> Vec<f64> { m.values[b * n..(b + 1) * n].to_vec() };
    Ok((
        TrigPolynomial::interpolate(band(0))?,
        TrigPolynomial::interpolate(band(1))?,
        TrigPolynomial::interpolate(band(2))?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::measure;
    use crate::polyspace::Polynomial;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_poly(rng: &mut StdRng, d: usize) -> Polynomial {
        Polynomial::new(
            (0..d)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    // ── dirichlet kernel ─────────────────────────────────────────────

    #[test]
    fn dirichlet_at_one() {
        for d in 1..=16 {
            assert_abs_diff_eq!(dirichlet(UnitPoint::one(), d), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn dirichlet_vanishes_at_other_nodes() {
        for d in 2..=10 {
            for l in 1..(2 * d - 1) {
                let z = UnitPoint::omega_pow(d, l as i64);
                assert!(
                    dirichlet(z, d).abs() < 1e-13,
                    "d={d} l={l}: {}",
                    dirichlet(z, d)
                );
            }
        }
    }

    #[test]
    fn dirichlet_matches_direct_complex_sum() {
        // independent oracle: the defining sum over z^k with complex arithmetic
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..200 {
            let d = rng.gen_range(1..=16);
            let z = UnitPoint::from_angle(rng.gen_range(0.0..TAU));
            let mut acc = Complex64::new(0.0, 0.0);
            for k in -(d as i64 - 1)..=(d as i64 - 1) {
                acc += z.pow(k).value();
            }
            acc /= (2 * d - 1) as f64;
            assert!(acc.im.abs() < 1e-12);
            assert!(
                (dirichlet(z, d) - acc.re).abs() < 1e-12,
                "d={d}: {} vs {}",
                dirichlet(z, d),
                acc.re
            );
        }
    }

    // ── interpolation ────────────────────────────────────────────────

    #[test]
    fn constants_interpolate_to_constants() {
        let g = TrigPolynomial::interpolate(vec![2.5; 9]).unwrap();
        let mut rng = StdRng::seed_from_u64(22);
        for _ in 0..50 {
            let z = UnitPoint::from_angle(rng.gen_range(0.0..TAU));
            assert_abs_diff_eq!(g.eval(z), 2.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn interpolation_reproduces_magnitude_squared() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..40 {
            let d = rng.gen_range(1..=16);
            let p = random_poly(&mut rng, d);
            let samples: Vec<f64> = (1..=(2 * d - 1) as i64)
                .map(|l| p.eval(UnitPoint::omega_pow(d, l)).norm_sqr())
                .collect();
            let g = TrigPolynomial::interpolate(samples).unwrap();
            for _ in 0..50 {
                let z = UnitPoint::from_angle(rng.gen_range(0.0..TAU));
                let want = p.eval(z).norm_sqr();
                assert!(
                    (g.eval(z) - want).abs() < 1e-10,
                    "d={d}: {} vs {want}",
                    g.eval(z)
                );
            }
        }
    }

    #[test]
    fn perturbation_obeys_uniform_bound() {
        let mut rng = StdRng::seed_from_u64(24);
        for _ in 0..100 {
            let d = rng.gen_range(2..=10);
            let p = random_poly(&mut rng, d);
            let samples: Vec<f64> = (1..=(2 * d - 1) as i64)
                .map(|l| p.eval(UnitPoint::omega_pow(d, l)).norm_sqr())
                .collect();
            let h = rng.gen_range(1e-6..1e-1);
            let noisy: Vec<f64> = samples
                .iter()
                .map(|s| s + if rng.gen::<bool>() { h } else { -h })
                .collect();
            let g = TrigPolynomial::interpolate(samples).unwrap();
            let gt = TrigPolynomial::interpolate(noisy).unwrap();
            let cap = (2 * d - 1) as f64 * h;
            for k in 0..2_000 {
                let z = UnitPoint::from_angle(TAU * k as f64 / 2_000.0);
                let dev = (gt.eval(z) - g.eval(z)).abs();
                assert!(dev <= cap * (1.0 + 1e-9), "d={d} dev={dev} cap={cap}");
            }
        }
    }

    #[test]
    fn wrong_sample_count_is_rejected() {
        assert!(TrigPolynomial::interpolate(vec![1.0, 2.0]).is_err());
        assert!(TrigPolynomial::interpolate(vec![]).is_err());
        assert!(TrigPolynomial::interpolate(vec![1.0, 2.0, 3.0]).is_ok());
    }

    // ── evaluation ───────────────────────────────────────────────────

    #[test]
    fn nodes_reproduce_samples_exactly() {
        let mut rng = StdRng::seed_from_u64(25);
        for &d in &[1usize, 2, 5, 13] {
            let samples: Vec<f64> = (0..2 * d - 1).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let g = TrigPolynomial::interpolate(samples.clone()).unwrap();
            for l in 1..=(2 * d - 1) {
                assert_eq!(g.eval(UnitPoint::omega_pow(d, l as i64)), samples[l - 1]);
            }
        }
    }

    #[test]
    fn vanishes_at_constructed_roots() {
        // p(z) = (z - a)(z - b) has |p|² interpolant vanishing at a and b
        let a = UnitPoint::from_angle(0.9);
        let b = UnitPoint::from_angle(4.1);
        let av = a.value();
        let bv = b.value();
        let p = Polynomial::new(vec![av * bv, -(av + bv), Complex64::new(1.0, 0.0)]).unwrap();
        let d = 3;
        let samples: Vec<f64> = (1..=(2 * d - 1) as i64)
            .map(|l| p.eval(UnitPoint::omega_pow(d, l)).norm_sqr())
            .collect();
        let g = TrigPolynomial::interpolate(samples).unwrap();
        assert!(g.eval(a).abs() < 1e-9, "{}", g.eval(a));
        assert!(g.eval(b).abs() < 1e-9, "{}", g.eval(b));
    }

    #[test]
    fn evaluation_is_linear_in_samples() {
        let mut rng = StdRng::seed_from_u64(26);
        let d = 5;
        let a: Vec<f64> = (0..2 * d - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..2 * d - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let ga = TrigPolynomial::interpolate(a).unwrap();
        let gb = TrigPolynomial::interpolate(b).unwrap();
        let gs = TrigPolynomial::interpolate(sum).unwrap();
        for _ in 0..30 {
            let z = UnitPoint::from_angle(rng.gen_range(0.0..TAU));
            assert_abs_diff_eq!(gs.eval(z), ga.eval(z) + gb.eval(z), epsilon = 1e-12);
        }
    }

    // ── magnitude families ───────────────────────────────────────────

    #[test]
    fn families_match_direct_formulas() {
        let mut rng = StdRng::seed_from_u64(27);
        for _ in 0..20 {
            let d = rng.gen_range(2..=10);
            let p = random_poly(&mut rng, d);
            let (f0, f1, f2) = magnitude_families(&measure(&p)).unwrap();
            let nu = UnitPoint::nu(d);
            for _ in 0..20 {
                let z = UnitPoint::from_angle(rng.gen_range(0.0..TAU));
                let pz = p.eval(z);
                let pzn = p.eval(z.rotate(nu));
                assert!((f0.eval(z) - pz.norm_sqr()).abs() < 1e-10);
                assert!((f1.eval(z) - (pz - pzn).norm_sqr()).abs() < 1e-10);
                assert!((f2.eval(z) - (pz - Complex64::i() * pzn).norm_sqr()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_polynomial_has_zero_difference_family() {
        let d = 5;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d];
        coeffs[0] = Complex64::new(1.3, 0.2);
        let (_, f1, _) = magnitude_families(&measure(&Polynomial::new(coeffs).unwrap())).unwrap();
        let mut rng = StdRng::seed_from_u64(28);
        for _ in 0..30 {
            let z = UnitPoint::from_angle(rng.gen_range(0.0..TAU));
            assert!(f1.eval(z).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_measurement_gives_zero_families() {
        let p = Polynomial::zero(4).unwrap();
        let (f0, f1, f2) = magnitude_families(&measure(&p)).unwrap();
        for g in [&f0, &f1, &f2] {
            for k in 0..100 {
                let z = UnitPoint::from_angle(TAU * k as f64 / 100.0);
                assert_eq!(g.eval(z), 0.0);
            }
        }
    }

    #[test]
    fn band_one_aligns_with_measurement_entries() {
        let mut rng = StdRng::seed_from_u64(29);
        let d = 6;
        let p = random_poly(&mut rng, d);
        let m = measure(&p);
        let (f0, _, _) = magnitude_families(&m).unwrap();
        for j in 1..=(2 * d - 1) {
            let z = UnitPoint::omega_pow(d, j as i64);
            assert_eq!(f0.eval(z), m.entry(j).unwrap());
        }
    }

    #[test]
    fn families_reject_basis_vectors() {
        let x = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        let m = crate::measurement::measure_basis(&x);
        assert!(magnitude_families(&m).is_err());
    }
}
