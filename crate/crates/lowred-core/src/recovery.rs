//! Steps 2-3 of the reconstruction: pick the sampling point by max-min,
//! read off the orthonormal-basis measurements, and recover the polynomial
//! by phase propagation or the kernel method.
//!
//! Both algorithms consume the same 3d-2 basis measurements. Phase
//! propagation builds the vector sequentially through the polarization
//! combination; the kernel method assembles the bidiagonal operator `T̃`
//! whose null space is spanned by the propagated vector and extracts the
//! smallest singular vector.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interpolation::{magnitude_families, TrigPolynomial};
use crate::measurement::{MeasurementKind, MeasurementVector};
use crate::polyspace::{Polynomial, UnitPoint};

/// Recovery algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PhasePropagation,
    Kernel,
}

/// The √d-scaled samples of the three magnitude families on the orbit
/// `{z₀ν^k}`, laid out like a basis measurement: `√d·f₀(z₀ν^k)` for
/// `k ≤ d`, `√d·f₁(z₀ν^k)` at `d+k`, `√d·f₂(z₀ν^k)` at `2d-1+k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMeasurements {
    values: Vec<f64>,
    z0: UnitPoint,
    dim: usize,
}

impl BasisMeasurements {
    /// Wraps a basis-kind measurement vector taken at `z0`.
    pub fn from_vector(m: &MeasurementVector, z0: UnitPoint) -> Result<Self> {
        if m.kind != MeasurementKind::Basis {
            return Err(Error::InvalidParameter(
                "basis measurements need a basis-kind vector".into(),
            ));
        }
        let expected = 3 * m.dim - 2;
        if m.len() != expected {
            return Err(Error::WrongLength {
                expected,
                got: m.len(),
            });
        }
        Ok(BasisMeasurements {
            values: m.values.clone(),
            z0,
            dim: m.dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn z0(&self) -> UnitPoint {
        self.z0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `|x_k|²`-type entry, `1 ≤ k ≤ d`.
    fn first(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    /// `|x_k - x_{k+1}|²`-type entry, `1 ≤ k ≤ d-1`.
    fn diff(&self, k: usize) -> f64 {
        self.values[self.dim + k - 1]
    }

    /// `|x_k - i x_{k+1}|²`-type entry, `1 ≤ k ≤ d-1`.
    fn idiff(&self, k: usize) -> f64 {
        self.values[2 * self.dim - 1 + k - 1]
    }

    fn check_first_band_positive(&self) -> Result<()> {
        for k in 1..=self.dim {
            let v = self.first(k);
            if !(v > 0.0) {
                return Err(Error::NonPositiveFirstBand { index: k, value: v });
            }
        }
        Ok(())
    }
}

/// Result of a full recovery run.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub p_tilde: Polynomial,
    pub z0: UnitPoint,
    pub method: Method,
    /// The achieved max-min floor `min_j f₀(ν^j z₀)`.
    pub min_sample: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

/// Grid density for the max-min search: twice the separation scale
/// `2π/((d-1)d²)`, so the grid cannot straddle the guaranteed good arc.
pub fn default_grid_size(d: usize) -> usize {
    (4 * (d - 1) * d * d).max(1)
}

/// Maximizes `min_{1≤j≤d} f₀(ν^j z)` over the grid `{e^{2πik/grid_size}}`.
/// Ties break toward the smallest grid index; the best point is returned
/// even when the achieved minimum is not positive.
pub fn select_z0(f0: &TrigPolynomial, grid_size: usize) -> Result<(UnitPoint, f64)> {
    if grid_size < 1 {
        return Err(Error::InvalidParameter("grid_size must be >= 1".into()));
    }
    let d = f0.dim();
    let mut best_k = 0usize;
    let mut best = f64::NEG_INFINITY;
    for k in 0..grid_size {
        let z = UnitPoint::from_angle(std::f64::consts::TAU * k as f64 / grid_size as f64);
        let v = orbit_min(f0, z, d);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    Ok((
        UnitPoint::from_angle(std::f64::consts::TAU * best_k as f64 / grid_size as f64),
        best,
    ))
}

fn orbit_min(f0: &TrigPolynomial, z: UnitPoint, d: usize) -> f64 {
    (1..=d)
        .map(|j| f0.eval(z.rotate(UnitPoint::nu_pow(d, j as i64))))
        .fold(f64::INFINITY, f64::min)
}

/// Reads the √d-scaled values of the three families on the orbit of `z0`.
pub fn extract_basis_measurements(
    f0: &TrigPolynomial,
    f1: &TrigPolynomial,
    f2: &TrigPolynomial,
    z0: UnitPoint,
) -> Result<BasisMeasurements> {
    let d = f0.dim();
    if f1.dim() != d || f2.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: f1.dim().min(f2.dim()),
        });
    }
    let sd = (d as f64).sqrt();
    let orbit: Vec<UnitPoint> = (1..=d)
        .map(|k| z0.rotate(UnitPoint::nu_pow(d, k as i64)))
        .collect();
    let mut values = Vec::with_capacity(3 * d - 2);
    for z in &orbit {
        values.push(sd * f0.eval(*z));
    }
    for z in &orbit[..d - 1] {
        values.push(sd * f1.eval(*z));
    }
    for z in &orbit[..d - 1] {
        values.push(sd * f2.eval(*z));
    }
    Ok(BasisMeasurements {
        values,
        z0,
        dim: d,
    })
}

/// `((1-i)a_k + (1-i)a_{k+1} - a_diff + i·a_idiff)/2`; equals
/// `conj(x_k)·x_{k+1}` when the inputs are exact magnitudes.
pub fn polarization_combine(a_k: f64, a_k1: f64, a_diff: f64, a_idiff: f64) -> Complex64 {
    let one_mi = Complex64::new(1.0, -1.0);
    (one_mi * a_k + one_mi * a_k1 - a_diff + Complex64::i() * a_idiff) / 2.0
}

/// Sequential phase propagation: `y₁ = √m₁`,
/// `y_{k+1} = combine_k · y_k / m_k`.
///
/// In the noiseless case `y = (conj(x₁)/|x₁|)·x` exactly. Requires every
/// first-band entry to be strictly positive.
pub fn phase_propagate(m: &BasisMeasurements) -> Result<Vec<Complex64>> {
    m.check_first_band_positive()?;
    let d = m.dim();
    let mut y = Vec::with_capacity(d);
    y.push(Complex64::new(m.first(1).sqrt(), 0.0));
    for k in 1..d {
        let c = polarization_combine(m.first(k), m.first(k + 1), m.diff(k), m.idiff(k));
        let prev = y[k - 1];
        y.push(c * prev / m.first(k));
    }
    Ok(y)
}

/// The bidiagonal operator `T̃ = M̃_{|x|²} S - M̃_{x̄Sx}`: row `j` carries
/// `-combine_j` on the diagonal and `m_j` on the superdiagonal, last row
/// zero (shift convention `x_{d+1} = 0`). Rank is exactly d-1 whenever the
/// first band is positive.
pub fn build_t(m: &BasisMeasurements) -> Result<DMatrix<Complex64>> {
    m.check_first_band_positive()?;
    let d = m.dim();
    let mut t = DMatrix::<Complex64>::zeros(d, d);
    for j in 1..d {
        t[(j - 1, j - 1)] = -polarization_combine(m.first(j), m.first(j + 1), m.diff(j), m.idiff(j));
        t[(j - 1, j)] = Complex64::new(m.first(j), 0.0);
    }
    Ok(t)
}

/// Singular values of interest plus the right singular vector of σ_min.
struct NullSpace {
    sigma_min: f64,
    sigma_second: f64,
    sigma_max: f64,
    vector: Vec<Complex64>,
}

fn null_space(t: &DMatrix<Complex64>) -> NullSpace {
    let d = t.ncols();
    if d == 1 {
        // 1x1 zero matrix: any unit vector spans the null space
        return NullSpace {
            sigma_min: 0.0,
            sigma_second: 0.0,
            sigma_max: 0.0,
            vector: vec![Complex64::new(1.0, 0.0)],
        };
    }
    let svd = t.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[a]
            .partial_cmp(&svd.singular_values[b])
            .unwrap()
    });
    let imin = order[0];
    let vector = (0..d).map(|j| v_t[(imin, j)].conj()).collect();
    NullSpace {
        sigma_min: svd.singular_values[order[0]],
        sigma_second: svd.singular_values[order[1]],
        sigma_max: svd.singular_values[*order.last().unwrap()],
        vector,
    }
}

/// Largest acceptable σ_min/σ_max before the null direction is considered
/// unreliable.
const NULL_SPACE_TOL: f64 = 1e-3;

/// Kernel-method recovery: the unit vector minimizing `‖T̃y‖₂`, rescaled to
/// `‖x̂‖² = Σ_{j≤d} m_j` and phase-normalized. Also returns
/// (σ_min, σ_second_smallest, σ_max) of `T̃`.
pub fn kernel_recover(m: &BasisMeasurements) -> Result<(Vec<Complex64>, [f64; 3])> {
    let t = build_t(m)?;
    let ns = null_space(&t);
    if ns.sigma_max > 0.0 && ns.sigma_min / ns.sigma_max > NULL_SPACE_TOL {
        return Err(Error::DegenerateNullSpace {
            ratio: ns.sigma_min / ns.sigma_max,
        });
    }
    let d = m.dim();
    let target: f64 = (1..=d).map(|k| m.first(k)).sum();
    let norm: f64 = ns.vector.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let scale = target.sqrt() / norm;
    let mut x = ns.vector;
    for c in &mut x {
        *c *= scale;
    }
    normalize_global_phase(&mut x);
    Ok((x, [ns.sigma_min, ns.sigma_second, ns.sigma_max]))
}

/// Rotates a vector so its first non-negligible component is real and
/// non-negative; the quotient metric does not care, diffs and logs do.
pub fn normalize_global_phase(x: &mut [Complex64]) {
    let max = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let lead = x.iter().find(|c| c.norm() > 1e-12 * max);
    if let Some(&c) = lead {
        let phase = c / c.norm();
        let w = phase.conj();
        for v in x.iter_mut() {
            *v *= w;
        }
    }
}

/// The full pipeline: interpolate the three families, select `z₀`, extract
/// the basis measurements, run the chosen method, and reassemble the
/// polynomial in the kernel basis of the orbit.
///
/// When the caller declares a noise level, the run aborts as inadmissible
/// if the achieved floor does not dominate `(2d-1)·level`.
pub fn recover(
    m: &MeasurementVector,
    method: Method,
    grid_size: usize,
    declared_noise: Option<f64>,
) -> Result<RecoveryResult> {
    let (f0, f1, f2) = magnitude_families(m)?;
    let d = m.dim;
    let (z0, min_sample) = select_z0(&f0, grid_size)?;
    if let Some(level) = declared_noise {
        let bump = (2 * d - 1) as f64 * level;
        if min_sample <= bump {
            return Err(Error::InadmissibleNoise {
                value: bump,
                threshold: min_sample,
            });
        }
    }
    let basis = extract_basis_measurements(&f0, &f1, &f2, z0)?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert(
        "first_band_min".into(),
        (1..=d).map(|k| basis.first(k)).fold(f64::INFINITY, f64::min),
    );
    let y = match method {
        Method::PhasePropagation => phase_propagate(&basis)?,
        Method::Kernel => {
            let (x, sigma) = kernel_recover(&basis)?;
            diagnostics.insert("sigma_min".into(), sigma[0]);
            diagnostics.insert("sigma_second_smallest".into(), sigma[1]);
            diagnostics.insert("sigma_max".into(), sigma[2]);
            x
        }
    };
    let p_tilde = assemble(&y, d, z0);
    Ok(RecoveryResult {
        p_tilde,
        z0,
        method,
        min_sample,
        diagnostics,
    })
}

/// Rebuilds the polynomial from the recovered orbit coordinates:
/// `p̃ = d^{-3/4} Σ_k y_k (1/√d) K_{z₀ν^k}`.
///
/// The d^{-3/4} undoes the √d scale that [`extract_basis_measurements`]
/// carries through both recovery methods (each scales the output by the
/// square root of the measurement scale).
fn assemble(y: &[Complex64], d: usize, z0: UnitPoint) -> Polynomial {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); d];
    for (k, yk) in y.iter().enumerate() {
        let w = z0.rotate(UnitPoint::nu_pow(d, (k + 1) as i64));
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c += yk * w.pow(j as i64).conj().value();
        }
    }
    let scale = (d as f64).powf(-1.25); // d^{-3/4} * (1/sqrt d)
    for c in &mut coeffs {
        *c *= scale;
    }
    normalize_global_phase(&mut coeffs);
    Polynomial::new(coeffs).expect("d >= 1")
}
