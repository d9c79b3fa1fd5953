//! The 6d-3 magnitude measurement map and its basis-map counterpart.
//!
//! For `p` of dimension `d` and `ω = e^{2πi/(2d-1)}`, `ν = e^{2πi/d}`, the
//! circle measurements are, by 1-based index band,
//!
//! ```text
//! A(p)_j = |p(ω^j)|²            1    ≤ j ≤ 2d-1
//!          |p(ω^j) - p(ω^j ν)|²  2d   ≤ j ≤ 4d-2
//!          |p(ω^j) - i p(ω^j ν)|² 4d-1 ≤ j ≤ 6d-3
//! ```
//!
//! The basis map takes a coordinate vector `x ∈ ℂ^d` to the 3d-2 values
//! `|x_k|²`, `|x_k - x_{k+1}|²`, `|x_k - i x_{k+1}|²`. Noise is an additive
//! signed vector; noisy magnitudes may be negative and are not clamped here.

use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyspace::{Polynomial, UnitPoint};

/// Which measurement map produced a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementKind {
    /// 6d-3 values sampled on powers of ω.
    Circle,
    /// 3d-2 values of the orthonormal-basis map.
    Basis,
}

/// A (possibly noise-perturbed) vector of magnitude measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementVector {
    pub kind: MeasurementKind,
    pub dim: usize,
    pub values: Vec<f64>,
}

impl MeasurementVector {
    /// Expected length for the kind/dimension.
    pub fn expected_len(kind: MeasurementKind, d: usize) -> usize {
        match kind {
            MeasurementKind::Circle => 6 * d - 3,
            MeasurementKind::Basis => 3 * d - 2,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based access, matching the index bands above.
    pub fn entry(&self, j: usize) -> Result<f64> {
        if j == 0 || j > self.values.len() {
            return Err(Error::IndexOutOfRange {
                index: j,
                max: self.values.len(),
            });
        }
        Ok(self.values[j - 1])
    }

    /// CSV rows `index,value` with 1-based indices and a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, v));
        }
        out
    }

    /// Parses the CSV form; kind and dimension are inferred from the row
    /// count (6d-3 ≡ 0 and 3d-2 ≡ 1 modulo 3, so the two never collide).
    pub fn from_csv(s: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line == "index,value") {
                continue;
            }
            let mut parts = line.split(',');
            let idx: usize = parts
                .next()
                .and_then(|t| t.trim().parse().ok())
                .ok_or(Error::CsvParse {
                    line: lineno + 1,
                    msg: "missing or invalid index".into(),
                })?;
            let val: f64 = parts
                .next()
                .and_then(|t| t.trim().parse().ok())
                .ok_or(Error::CsvParse {
                    line: lineno + 1,
                    msg: "missing or invalid value".into(),
                })?;
            if idx != values.len() + 1 {
                return Err(Error::CsvParse {
                    line: lineno + 1,
                    msg: format!("expected index {}, got {idx}", values.len() + 1),
                });
            }
            values.push(val);
        }
        let n = values.len();
        if n >= 3 && n % 3 == 0 {
            Ok(MeasurementVector {
                kind: MeasurementKind::Circle,
                dim: (n + 3) / 6,
                values,
            })
        } else if n % 3 == 1 {
            Ok(MeasurementVector {
                kind: MeasurementKind::Basis,
                dim: (n + 2) / 3,
                values,
            })
        } else {
            Err(Error::CsvParse {
                line: 0,
                msg: format!("{n} rows match neither 6d-3 nor 3d-2"),
            })
        }
    }
}

/// A signed noise vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseVector {
    pub values: Vec<f64>,
}

impl NoiseVector {
    pub fn zero(len: usize) -> Self {
        NoiseVector {
            values: vec![0.0; len],
        }
    }

    /// `‖ε‖_∞ = max_j |ε_j|`.
    pub fn inf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Noise distribution for [`sample_noise`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    /// i.i.d. Uniform[-level, level].
    Uniform,
    /// Every entry is ±level with an independent random sign.
    SignedExtreme,
}

/// The frame vector `η_j` for `1 ≤ j ≤ 6d-3`.
///
/// Band 3 is `K_{ω^j} + i K_{ω^j ν}`: because the inner product conjugates
/// its second slot, this is the vector with `⟨p, η_j⟩ = p(ω^j) - i p(ω^j ν)`,
/// matching the measurement map's third band.
pub fn frame_vector(j: usize, d: usize) -> Result<Polynomial> {
    let max = 6 * d - 3;
    if j < 1 || j > max {
        return Err(Error::IndexOutOfRange { index: j, max });
    }
    let w = UnitPoint::omega_pow(d, j as i64);
    let wn = w.rotate(UnitPoint::nu(d));
    let kw = Polynomial::kernel(w, d)?;
    if j <= 2 * d - 1 {
        return Ok(kw);
    }
    let kwn = Polynomial::kernel(wn, d)?;
    let factor = if j <= 4 * d - 2 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    let coeffs = kw
        .coeffs()
        .iter()
        .zip(kwn.coeffs())
        .map(|(a, b)| a - factor * b)
        .collect();
    Polynomial::new(coeffs)
}

/// The noiseless measurement map `A(p)`, 6d-3 values.
pub fn measure(p: &Polynomial) -> MeasurementVector {
    let d = p.dim();
    let n = 2 * d - 1;
    let nu = UnitPoint::nu(d);
    // p(omega^j) and p(omega^j nu) repeat with period 2d-1 across the bands
    let at_node: Vec<Complex64> = (1..=n as i64)
        .map(|l| p.eval(UnitPoint::omega_pow(d, l)))
        .collect();
    let at_shifted: Vec<Complex64> = (1..=n as i64)
        .map(|l| p.eval(UnitPoint::omega_pow(d, l).rotate(nu)))
        .collect();
    let mut values = Vec::with_capacity(6 * d - 3);
    for j in 1..=(6 * d - 3) {
        let l = (j - 1) % n; // node index, 0-based
        let a = at_node[l];
        let b = at_shifted[l];
        let v = if j <= 2 * d - 1 {
            a.norm_sqr()
        } else if j <= 4 * d - 2 {
            (a - b).norm_sqr()
        } else {
            (a - Complex64::i() * b).norm_sqr()
        };
        values.push(v);
    }
    MeasurementVector {
        kind: MeasurementKind::Circle,
        dim: d,
        values,
    }
}

/// The basis measurement map `A_{e_j}(x)`, 3d-2 values: `|x_k|²` for
/// `k ≤ d`, `|x_k - x_{k+1}|²` at `d+k`, `|x_k - i x_{k+1}|²` at `2d-1+k`.
pub fn measure_basis(x: &[Complex64]) -> MeasurementVector {
    let d = x.len();
    let mut values = Vec::with_capacity(3 * d - 2);
    for xk in x {
        values.push(xk.norm_sqr());
    }
    for k in 0..d.saturating_sub(1) {
        values.push((x[k] - x[k + 1]).norm_sqr());
    }
    for k in 0..d.saturating_sub(1) {
        values.push((x[k] - Complex64::i() * x[k + 1]).norm_sqr());
    }
    MeasurementVector {
        kind: MeasurementKind::Basis,
        dim: d,
        values,
    }
}

/// Componentwise sum `m + ε`; kind and dimension are preserved.
pub fn add_noise(m: &MeasurementVector, eps: &NoiseVector) -> Result<MeasurementVector> {
    if m.len() != eps.values.len() {
        return Err(Error::WrongLength {
            expected: m.len(),
            got: eps.values.len(),
        });
    }
    Ok(MeasurementVector {
        kind: m.kind,
        dim: m.dim,
        values: m
            .values
            .iter()
            .zip(&eps.values)
            .map(|(a, b)| a + b)
            .collect(),
    })
}

/// Draws a noise vector of the given length and model, deterministically
/// from the seed. RNG state is local to the call.
pub fn sample_noise(len: usize, level: f64, model: NoiseModel, seed: u64) -> Result<NoiseVector> {
    if !(level >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise level must be >= 0, got {level}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = match model {
        NoiseModel::Uniform => {
            if level == 0.0 {
                vec![0.0; len]
            } else {
                let dist = Uniform::new_inclusive(-level, level);
                (0..len).map(|_| dist.sample(&mut rng)).collect()
            }
        }
        NoiseModel::SignedExtreme => (0..len)
            .map(|_| if rng.gen::<bool>() { level } else { -level })
            .collect(),
    };
    Ok(NoiseVector { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::rngs::StdRng;

    fn random_unit(rng: &mut StdRng, d: usize) -> Polynomial {
        let coeffs: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let p = Polynomial::new(coeffs).unwrap();
        let n = p.norm();
        p.scale(Complex64::new(1.0 / n, 0.0))
    }

    // ── frame vectors ────────────────────────────────────────────────

    #[test]
    fn frame_band1_d2() {
        let eta = frame_vector(1, 2).unwrap();
        let omega = UnitPoint::omega(2);
        assert!((eta.coeffs()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((eta.coeffs()[1] - omega.conj().value()).norm() < 1e-15);
    }

    #[test]
    fn frame_band2_is_kernel_difference() {
        for d in 2..=5 {
            let j = 2 * d;
            let eta = frame_vector(j, d).unwrap();
            let w = UnitPoint::omega_pow(d, j as i64);
            let kw = Polynomial::kernel(w, d).unwrap();
            let kwn = Polynomial::kernel(w.rotate(UnitPoint::nu(d)), d).unwrap();
            for k in 0..d {
                let want = kw.coeffs()[k] - kwn.coeffs()[k];
                assert!((eta.coeffs()[k] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn frame_norms_are_d_or_2d() {
        // single kernels have norm² = d; bands 2 and 3 subtract orthogonal
        // kernels, so their norm² is 2d
        for d in 1..=8 {
            for j in 1..=(6 * d - 3) {
                let eta = frame_vector(j, d).unwrap();
                let want = if j <= 2 * d - 1 { d as f64 } else { 2.0 * d as f64 };
                assert!(
                    (eta.norm_sqr() - want).abs() < 1e-10,
                    "d={d} j={j}: {}",
                    eta.norm_sqr()
                );
            }
        }
    }

    #[test]
    fn frame_index_out_of_range() {
        assert!(frame_vector(0, 3).is_err());
        assert!(frame_vector(16, 3).is_err());
        assert!(frame_vector(15, 3).is_ok());
    }

    // ── circle measurements ──────────────────────────────────────────

    #[test]
    fn measure_constant_polynomial() {
        let c = Complex64::new(0.8, -0.3);
        let d = 4;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d];
        coeffs[0] = c;
        let m = measure(&Polynomial::new(coeffs).unwrap());
        for j in 1..=(2 * d - 1) {
            assert_abs_diff_eq!(m.entry(j).unwrap(), c.norm_sqr(), epsilon = 1e-14);
        }
        for j in (2 * d)..=(4 * d - 2) {
            assert_abs_diff_eq!(m.entry(j).unwrap(), 0.0, epsilon = 1e-14);
        }
        for j in (4 * d - 1)..=(6 * d - 3) {
            assert_abs_diff_eq!(m.entry(j).unwrap(), 2.0 * c.norm_sqr(), epsilon = 1e-13);
        }
    }

    #[test]
    fn measure_agrees_with_frame_inner_products() {
        let mut rng = StdRng::seed_from_u64(11);
        for &d in &[1usize, 2, 3, 5, 7] {
            let p = random_unit(&mut rng, d);
            let m = measure(&p);
            for j in 1..=(6 * d - 3) {
                let eta = frame_vector(j, d).unwrap();
                let want = p.inner(&eta).unwrap().norm_sqr();
                assert!(
                    (m.entry(j).unwrap() - want).abs() < 1e-12,
                    "d={d} j={j}"
                );
            }
        }
    }

    #[test]
    fn first_band_mean_is_norm_sqr() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..50 {
            let d = rng.gen_range(1..=12);
            let p = random_unit(&mut rng, d);
            let m = measure(&p);
            let mean: f64 =
                m.values[..2 * d - 1].iter().sum::<f64>() / (2 * d - 1) as f64;
            assert!((mean - p.norm_sqr()).abs() < 1e-11, "d={d}");
        }
    }

    #[test]
    fn measure_fixture_regression() {
        // all 39 entries of A(fixture), frozen from an independent
        // high-precision evaluation of the band formulas
        const EXPECTED: [f64; 39] = [
            3.6039853704755318,
            1.8763869303698628,
            1.3295889327283907,
            0.39026329411433186,
            0.52598965850215751,
            1.8111733732002191,
            0.79016334180462833,
            0.044586207991096548,
            1.8788767008114747e-05,
            3.6349997583315041e-05,
            0.0023809260211723909,
            0.32598823974968349,
            2.299438299698302,
            2.6283513493986068,
            1.2237271686397515,
            0.58347361199408843,
            0.59049395459744403,
            2.2543567573503394,
            2.3658417204381075,
            0.78641255115508502,
            0.046975468005535731,
            0.00044651978974029718,
            0.21282729936840913,
            1.985580417748023,
            5.1783696128987851,
            5.4346198273479551,
            8.7018493304372502,
            4.1272662765670809,
            0.89785334776648595,
            1.6092282823018538,
            2.7536834031372841,
            2.4908411430628465,
            0.79693755428592272,
            0.045819201991537183,
            0.00074303817098583889,
            0.20514646464299935,
            2.0565776310233934,
            5.8087313162661944,
            8.7235719794375814,
        ];
        let m = measure(&crate::harness::worst_case_fixture());
        assert_eq!(m.len(), 39);
        for (j, want) in EXPECTED.iter().enumerate() {
            assert!(
                (m.values[j] - want).abs() <= 1e-12 * want.max(1.0),
                "entry {}: {} vs {}",
                j + 1,
                m.values[j],
                want
            );
        }
    }

    proptest! {
        #[test]
        fn measure_is_phase_invariant(seed in 0u64..200) {
            let mut rng = StdRng::seed_from_u64(seed);
            let d = rng.gen_range(1..=10);
            let p = random_unit(&mut rng, d);
            let w = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            let m1 = measure(&p);
            let m2 = measure(&p.scale(w));
            let dev = m1.values.iter().zip(&m2.values)
                .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            prop_assert!(dev <= 1e-12, "dev={dev:e}");
        }
    }

    // ── basis measurements ───────────────────────────────────────────

    #[test]
    fn basis_map_examples() {
        let e1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(measure_basis(&e1).values, vec![1.0, 0.0, 1.0, 1.0]);

        let x = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let m = measure_basis(&x);
        assert_abs_diff_eq!(m.values[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.values[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.values[2], 2.0, epsilon = 1e-15); // |1-i|²
        assert_abs_diff_eq!(m.values[3], 4.0, epsilon = 1e-15); // |1-i·i|²
    }

    #[test]
    fn polarization_recovers_cross_terms() {
        // (1-i)|a|² + (1-i)|b|² - |a-b|² + i|a-ib|² = 2 conj(a) b
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..200 {
            let d = rng.gen_range(2..=8);
            let x: Vec<Complex64> = (0..d)
                .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let m = measure_basis(&x);
            for k in 0..d - 1 {
                let one_mi = Complex64::new(1.0, -1.0);
                let combined = (one_mi * m.values[k]
                    + one_mi * m.values[k + 1]
                    - m.values[d + k]
                    + Complex64::i() * m.values[2 * d - 1 + k])
                    / 2.0;
                let want = x[k].conj() * x[k + 1];
                assert!((combined - want).norm() < 1e-12);
            }
        }
    }

    // ── noise ────────────────────────────────────────────────────────

    #[test]
    fn add_zero_noise_is_identity() {
        let mut rng = StdRng::seed_from_u64(14);
        let m = measure(&random_unit(&mut rng, 3));
        let out = add_noise(&m, &NoiseVector::zero(m.len())).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn add_noise_componentwise() {
        let m = MeasurementVector {
            kind: MeasurementKind::Basis,
            dim: 1,
            values: vec![1.0],
        };
        let out = add_noise(&m, &NoiseVector { values: vec![-0.1] }).unwrap();
        assert_abs_diff_eq!(out.values[0], 0.9, epsilon = 1e-15);
        assert_eq!(out.kind, MeasurementKind::Basis);
    }

    #[test]
    fn add_noise_length_mismatch() {
        let m = MeasurementVector {
            kind: MeasurementKind::Basis,
            dim: 1,
            values: vec![1.0],
        };
        assert!(add_noise(&m, &NoiseVector::zero(2)).is_err());
    }

    #[test]
    fn noise_inf_norm_is_definition() {
        let eps = NoiseVector {
            values: vec![0.1, -0.7, 0.3],
        };
        assert_abs_diff_eq!(eps.inf_norm(), 0.7, epsilon = 1e-15);
    }

    #[test]
    fn sample_noise_zero_level() {
        let eps = sample_noise(10, 0.0, NoiseModel::Uniform, 42).unwrap();
        assert!(eps.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sample_noise_signed_extreme_magnitudes() {
        let h = 0.25;
        let eps = sample_noise(33, h, NoiseModel::SignedExtreme, 1).unwrap();
        assert!(eps.values.iter().all(|&v| v.abs() == h));
        assert!(eps.values.iter().any(|&v| v > 0.0));
        assert!(eps.values.iter().any(|&v| v < 0.0));
    }

    #[test]
    fn sample_noise_deterministic() {
        let a = sample_noise(50, 0.5, NoiseModel::Uniform, 777).unwrap();
        let b = sample_noise(50, 0.5, NoiseModel::Uniform, 777).unwrap();
        assert_eq!(a, b);
        let c = sample_noise(50, 0.5, NoiseModel::Uniform, 778).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sample_noise_rejects_negative_level() {
        assert!(sample_noise(5, -1.0, NoiseModel::Uniform, 0).is_err());
    }

    // ── serialization ────────────────────────────────────────────────

    #[test]
    fn csv_round_trip_circle_and_basis() {
        let mut rng = StdRng::seed_from_u64(15);
        let m = measure(&random_unit(&mut rng, 4));
        let back = MeasurementVector::from_csv(&m.to_csv()).unwrap();
        assert_eq!(back, m);

        let x: Vec<Complex64> = (0..3).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let mb = measure_basis(&x);
        let back = MeasurementVector::from_csv(&mb.to_csv()).unwrap();
        assert_eq!(back, mb);
    }

    #[test]
    fn csv_rejects_bad_lengths() {
        // 5 rows: 5 % 3 == 2, matches neither family
        let s = "index,value\n1,0\n2,0\n3,0\n4,0\n5,0\n";
        assert!(MeasurementVector::from_csv(s).is_err());
    }

    #[test]
    fn json_shape() {
        let m = MeasurementVector {
            kind: MeasurementKind::Circle,
            dim: 1,
            values: vec![1.0, 0.0, 2.0],
        };
        let v: serde_json::Value =
            serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(v["kind"], "circle");
        assert_eq!(v["dim"], 1);
        assert_eq!(v["values"][2], 2.0);
    }
}
