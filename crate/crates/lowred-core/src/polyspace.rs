//! Complex analytic polynomials on the unit circle.
//!
//! The space of polynomials of degree at most `d-1` carries the scaled L²
//! inner product on the circle, `⟨p,q⟩ = (1/2π)∫ p(e^{it}) conj(q(e^{it})) dt`,
//! which in coefficients is the plain Hermitian dot product. Point evaluation
//! is reproduced by the kernel polynomials `K_w`, and recovery quality is
//! measured in the quotient metric `ρ` that ignores a global phase.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point `e^{iθ}` on the unit circle, stored by its angle in `[0, 2π)`.
///
/// Keeping the angle rather than the complex value makes powers and products
/// of roots of unity exact up to one rounding of the angle arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPoint {
    angle: f64,
}

impl UnitPoint {
    /// The point `e^{iθ}`; the angle is reduced into `[0, 2π)`.
    pub fn from_angle(angle: f64) -> Self {
        let mut a = angle.rem_euclid(TAU);
        if a >= TAU {
            a = 0.0;
        }
        UnitPoint { angle: a }
    }

    /// The point 1.
    pub fn one() -> Self {
        UnitPoint { angle: 0.0 }
    }

    /// `e^{2πi k/order}`, the k-th power of the primitive root of unity of
    /// the given order. `k` is reduced modulo `order` before the division so
    /// large powers lose no precision.
    pub fn root_of_unity(order: usize, k: i64) -> Self {
        let n = order as i64;
        let k = k.rem_euclid(n);
        UnitPoint {
            angle: TAU * (k as f64) / (order as f64),
        }
    }

    /// `ω = e^{2πi/(2d-1)}`, the node generator for dimension `d`.
    pub fn omega(d: usize) -> Self {
        Self::root_of_unity(2 * d - 1, 1)
    }

    /// `ω^j` for dimension `d`.
    pub fn omega_pow(d: usize, j: i64) -> Self {
        Self::root_of_unity(2 * d - 1, j)
    }

    /// `ν = e^{2πi/d}`, the orbit generator for dimension `d`.
    pub fn nu(d: usize) -> Self {
        Self::root_of_unity(d, 1)
    }

    /// `ν^k` for dimension `d`.
    pub fn nu_pow(d: usize, k: i64) -> Self {
        Self::root_of_unity(d, k)
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// The complex value `e^{iθ}`, always of modulus 1 up to rounding.
    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// The product of two unit points (angles add modulo 2π).
    pub fn rotate(&self, other: UnitPoint) -> UnitPoint {
        UnitPoint::from_angle(self.angle + other.angle)
    }

    /// `z^n` by angle multiplication.
    pub fn pow(&self, n: i64) -> UnitPoint {
        UnitPoint::from_angle(self.angle * n as f64)
    }

    /// Complex conjugate, i.e. the inverse point.
    pub fn conj(&self) -> UnitPoint {
        UnitPoint::from_angle(-self.angle)
    }
}

/// A polynomial `p(z) = Σ_{j=0}^{d-1} c_j z^j` over ℂ, `d ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Wraps a coefficient vector `(c_0, …, c_{d-1})`. Must be nonempty.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        Ok(Polynomial { coeffs })
    }

    /// The zero polynomial of dimension `d`.
    pub fn zero(d: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); d])
    }

    /// The monomial `z^k` in dimension `d`.
    pub fn monomial(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::InvalidParameter(format!(
                "monomial degree {k} outside dimension {d}"
            )));
        }
        let mut c = vec![Complex64::new(0.0, 0.0); d];
        c[k] = Complex64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `‖p‖₂² = Σ |c_j|²` (Parseval).
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `‖p‖₂`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `‖p̂‖₁ = Σ |c_j|`, the coefficient 1-norm.
    pub fn coeff_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// True when every coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Evaluates `p(z)` for `|z| = 1` by Horner's rule.
    pub fn eval(&self, z: UnitPoint) -> Complex64 {
        let zv = z.value();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * zv + c;
        }
        acc
    }

    /// The reproducing kernel `K_w(z) = Σ_j conj(w^j) z^j`, so that
    /// `⟨p, K_w⟩ = p(w)` for every `p` of the same dimension.
    pub fn kernel(w: UnitPoint, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let coeffs = (0..d)
            .map(|j| w.pow(j as i64).conj().value())
            .collect();
        Self::new(coeffs)
    }

    /// `⟨p, q⟩ = Σ_j c_j conj(b_j)`; errors on a dimension mismatch.
    pub fn inner(&self, other: &Polynomial) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    /// The n-th truncation `p_n(z) = Σ_{j<n} c_j z^j`, `1 ≤ n ≤ d`.
    ///
    /// A truncation of a nonzero polynomial may itself be zero; that is a
    /// legitimate value, not an error.
    pub fn truncate(&self, n: usize) -> Result<Polynomial> {
        if n < 1 || n > self.dim() {
            return Err(Error::TruncationOutOfRange { n, dim: self.dim() });
        }
        Polynomial::new(self.coeffs[..n].to_vec())
    }

    /// Multiplies every coefficient by a scalar.
    pub fn scale(&self, s: Complex64) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

/// The quotient metric `ρ([x],[y]) = min_{|ω|=1} ‖x − ωy‖`.
///
/// The minimizing phase is analytic: `ω* = ⟨x,y⟩/|⟨x,y⟩|`. The minimum is
/// evaluated as `‖x − ω*y‖` directly rather than through the textbook
/// expression `√(‖x‖²+‖y‖²−2|⟨x,y⟩|)`, whose cancellation cannot resolve
/// distances below about `1e-8` for unit vectors.
pub fn rho(x: &Polynomial, y: &Polynomial) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let ip = x.inner(y)?;
    let modulus = ip.norm();
    if modulus == 0.0 {
        // Orthogonal classes: nothing cancels, the closed form is exact.
        return Ok((x.norm_sqr() + y.norm_sqr()).sqrt());
    }
    let w = ip / modulus;
    let sum: f64 = x
        .coeffs()
        .iter()
        .zip(y.coeffs())
        .map(|(a, b)| (a - w * b).norm_sqr())
        .sum();
    Ok(sum.sqrt())
}

// JSON shape: {"dim": d, "coeffs": [[re, im], ...]}, c_0 first.
#[derive(Serialize, Deserialize)]
struct PolynomialRepr {
    dim: usize,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialRepr {
            dim: self.dim(),
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolynomialRepr::deserialize(deserializer)?;
        if repr.dim == 0 {
            return Err(D::Error::custom("dim must be >= 1"));
        }
        if repr.coeffs.len() != repr.dim {
            return Err(D::Error::custom(format!(
                "dim is {} but {} coefficients given",
                repr.dim,
                repr.coeffs.len()
            )));
        }
        Ok(Polynomial {
            coeffs: repr
                .coeffs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        })
    }
}

impl Polynomial {
    /// Serializes to the canonical JSON form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polynomial serialization cannot fail")
    }

    /// Parses the canonical JSON form.
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
