//! Analytic constants and recovery-error bounds.
//!
//! The whole chain depends only on the dimension: the root-separation
//! radius `r = sin(2π/((d-1)d²))`, the sample-floor constant `β`, the
//! admissible-noise threshold `αβ²‖p‖²/(2d-1)`, and the final error bound.
//! `β` decays like `r^{(d-1)d/2}`, so every product here is carried in
//! log space; the bound itself overflows `f64` from d = 7 on and is
//! therefore also reported as log10 and as a decimal string.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyspace::Polynomial;

/// Which β the formulas use. The two differ only in the product range
/// `∏(r^k+1)`: the magnitude lemma's chain ends with k = 0..d-1, the main
/// theorem states k = 1..d-1. Since `r⁰+1 = 2`, lemma-β is exactly half
/// theorem-β, hence the weaker floor and the safer (larger) error bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BetaVariant {
    #[default]
    LemmaBeta,
    TheoremBeta,
}

/// `r = sin(2π/((d-1)d²))`, the guaranteed distance between the chosen
/// sample orbit and the roots of all nonzero truncations.
pub fn r_value(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "r is defined for d >= 2, got {d}"
        )));
    }
    let denom = ((d - 1) * d * d) as f64;
    Ok((std::f64::consts::TAU / denom).sin())
}

/// Natural log of β(d).
pub fn ln_beta(d: usize, variant: BetaVariant) -> Result<f64> {
    let r = r_value(d)?;
    let ln_r = r.ln();
    let df = d as f64;
    let mut lb = (df - 1.0) * df / 2.0 * ln_r + df * ((df - 1.0) / (2.0 * df)).ln()
        + 2f64.ln()
        - (df - 1.0).ln();
    let start = match variant {
        BetaVariant::LemmaBeta => 0,
        BetaVariant::TheoremBeta => 1,
    };
    for k in start..d {
        // ln(r^k + 1) via ln1p; r^k underflowing to 0 is harmless here
        lb -= (k as f64 * ln_r).exp().ln_1p();
    }
    Ok(lb)
}

/// `β(d)`, computed in log space. Underflows to 0 around d ≈ 40.
pub fn beta(d: usize, variant: BetaVariant) -> Result<f64> {
    Ok(ln_beta(d, variant)?.exp())
}

/// The smallest `n` in `0..d-1` with `|a_n| ≥ ‖a‖₁ t^{d-n} (t⁻¹ - 1)`.
/// Existence is guaranteed for `0 < t < 1`; if rounding spoils the boundary
/// case, the index maximizing `|a_n|` relative to its threshold is returned.
pub fn find_n0(coeffs_abs: &[f64], t: f64) -> Result<usize> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "t must be in (0,1), got {t}"
        )));
    }
    let d = coeffs_abs.len();
    let l1: f64 = coeffs_abs.iter().sum();
    if d == 0 || l1 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let threshold = |n: usize| l1 * t.powi((d - n) as i32) * (1.0 / t - 1.0);
    for (n, &a) in coeffs_abs.iter().enumerate() {
        if a >= threshold(n) {
            return Ok(n);
        }
    }
    let best = (0..d)
        .max_by(|&a, &b| {
            let ra = coeffs_abs[a] / threshold(a);
            let rb = coeffs_abs[b] / threshold(b);
            ra.partial_cmp(&rb).unwrap()
        })
        .unwrap();
    Ok(best)
}

/// The truncation floor chain `m(n₀, n)` for `n = n₀..d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationFloor {
    pub n0: usize,
    /// `m(n₀, n₀), …, m(n₀, d)`, non-increasing.
    pub values: Vec<f64>,
}

impl TruncationFloor {
    /// `m(n₀, d)`, the floor for the full polynomial.
    pub fn final_value(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

/// Runs the magnitude-lemma recursion: base
/// `m(n₀,n₀) = ‖p̂‖₁ ((d-1)/2d)^{d-n₀} · 2/(d-1)`, then
/// `m(n₀,n+1) = m(n₀,n) · rⁿ/(rⁿ+1)`.
pub fn truncation_floor(p: &Polynomial, r: f64) -> Result<TruncationFloor> {
    let d = p.dim();
    if d < 2 {
        return Err(Error::InvalidParameter(
            "truncation floor needs d >= 2".into(),
        ));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "r must be in (0,1], got {r}"
        )));
    }
    let l1 = p.coeff_l1();
    if l1 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let df = d as f64;
    let t = (df - 1.0) / (2.0 * df);
    let abs: Vec<f64> = p.coeffs().iter().map(|c| c.norm()).collect();
    let n0 = find_n0(&abs, t)?;
    let base = l1 * t.powi((d - n0) as i32) * 2.0 / (df - 1.0);
    let mut values = Vec::with_capacity(d - n0 + 1);
    values.push(base);
    let mut m = base;
    for n in n0..d {
        let rn = r.powi(n as i32);
        m *= rn / (rn + 1.0);
        values.push(m);
    }
    Ok(TruncationFloor { n0, values })
}

/// `αβ²‖p‖²/(2d-1)`, the universal admissible-noise threshold.
pub fn admissible_noise(d: usize, alpha: f64, norm_p: f64, variant: BetaVariant) -> Result<f64> {
    check_alpha(alpha)?;
    if !(norm_p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "norm_p must be > 0, got {norm_p}"
        )));
    }
    let ln = alpha.ln() + 2.0 * ln_beta(d, variant)? + 2.0 * norm_p.ln()
        - ((2 * d - 1) as f64).ln();
    Ok(ln.exp())
}

/// Per-instance admissible noise `α·s/(2d-1)` for an achieved sample floor
/// `s = min_j f₀(ν^j z₀)`: the largest `‖ε‖_∞` for which the fixed-floor
/// recovery theorem applies to this instance with slack `α`.
pub fn instance_admissible_noise(min_sample: f64, alpha: f64, d: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if !(min_sample >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "min_sample must be >= 0, got {min_sample}"
        )));
    }
    Ok(alpha * min_sample / (2 * d - 1) as f64)
}

/// Everything that goes into (and comes out of) the final error bound.
///
/// Quantities that overflow `f64` for moderate d carry log10 companions;
/// `error_bound_sci` is a decimal rendering built from the log that stays
/// meaningful far beyond the `f64` range. Non-finite `f64` fields serialize
/// to JSON null.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub d: usize,
    pub alpha: f64,
    pub variant: BetaVariant,
    pub eps_inf: f64,
    pub norm_p: f64,
    pub r: f64,
    pub beta: f64,
    pub beta_log10: f64,
    pub admissible_noise: f64,
    pub admissible_noise_log10: f64,
    /// `C̃` with the main theorem's `+d` numerator (the one used).
    pub c_tilde: f64,
    pub c_tilde_log10: f64,
    /// `C̃` with the final theorem's printed `+√d` numerator, for audit.
    pub c_tilde_alt_sqrt_d_log10: f64,
    /// Final-theorem bound on `ρ([p̃],[p])`.
    pub error_bound: f64,
    pub error_bound_log10: f64,
    pub error_bound_sci: String,
    /// The introduction's displayed expression for the same bound.
    pub error_bound_intro: f64,
    pub error_bound_intro_log10: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be in (0,1), got {alpha}"
        )));
    }
    Ok(())
}

/// log(Σ exp(terms)), stable.
fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// ln Σ_{k=0}^{n-1} C^k for ln C, valid for any C > 0.
fn ln_geometric_sum(ln_c: f64, n: usize) -> f64 {
    let terms: Vec<f64> = (0..n).map(|k| k as f64 * ln_c).collect();
    log_sum_exp(&terms)
}

/// ln Σ_{j=0}^{d-2} (d-1-j) C^j, the double geometric sum
/// `(d - dC - 1 + C^d)/(1-C)²` written without the removable pole.
fn ln_weighted_geometric_sum(ln_c: f64, d: usize) -> f64 {
    let terms: Vec<f64> = (0..d - 1)
        .map(|j| ((d - 1 - j) as f64).ln() + j as f64 * ln_c)
        .collect();
    log_sum_exp(&terms)
}

/// Renders `10^log10` as a decimal string, e.g. `3.81689240e429`.
pub fn sci_from_log10(log10: f64) -> String {
    if log10 == f64::NEG_INFINITY {
        return "0".into();
    }
    let mut e = log10.floor();
    let mut m = 10f64.powf(log10 - e);
    if m >= 9.999_999_995 {
        m = 1.0;
        e += 1.0;
    }
    format!("{m:.8}e{}", e as i64)
}

/// Evaluates the final recovery-error bound at `‖ε‖_∞ = eps_inf`, requiring
/// admissibility. See [`error_bound_unchecked`] for the raw formula value.
pub fn error_bound(
    d: usize,
    alpha: f64,
    eps_inf: f64,
    norm_p: f64,
    variant: BetaVariant,
) -> Result<BoundReport> {
    let threshold = admissible_noise(d, alpha, norm_p, variant)?;
    if eps_inf > threshold {
        return Err(Error::InadmissibleNoise {
            value: eps_inf,
            threshold,
        });
    }
    error_bound_unchecked(d, alpha, eps_inf, norm_p, variant)
}

/// The bound formula evaluated without the admissibility precondition.
/// Beyond the admissible range the value is reported but guarantees nothing.
pub fn error_bound_unchecked(
    d: usize,
    alpha: f64,
    eps_inf: f64,
    norm_p: f64,
    variant: BetaVariant,
) -> Result<BoundReport> {
    check_alpha(alpha)?;
    if !(norm_p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "norm_p must be > 0, got {norm_p}"
        )));
    }
    if !(eps_inf >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps_inf must be >= 0, got {eps_inf}"
        )));
    }
    let df = d as f64;
    let two_d1 = (2 * d - 1) as f64;
    let lb = ln_beta(d, variant)?;
    let r = r_value(d)?;
    let ln_adm =
        alpha.ln() + 2.0 * lb + 2.0 * norm_p.ln() - two_d1.ln();

    let sqrt2 = std::f64::consts::SQRT_2;
    // C with the "+d" numerator; the "+sqrt d" alternative is report-only
    let num = (1.0 + sqrt2) * two_d1 * eps_inf / (norm_p * norm_p) + df;
    let num_alt = (1.0 + sqrt2) * two_d1 * eps_inf / (norm_p * norm_p) + df.sqrt();
    let ln_c = num.ln() - 2.0 * lb - (1.0 - alpha).ln();
    let ln_c_alt = num_alt.ln() - 2.0 * lb - (1.0 - alpha).ln();

    let (ln_bound, ln_bound_intro) = if eps_inf == 0.0 {
        (f64::NEG_INFINITY, f64::NEG_INFINITY)
    } else {
        let ln_g1 = ln_geometric_sum(ln_c, d);
        let ln_g2 = ln_weighted_geometric_sum(ln_c, d);
        let ln_a = (2.0 + sqrt2).ln() - 2.0 * lb - (1.0 - alpha).ln();
        // final theorem: (A G2 + G1/(2 beta sqrt(sqrt d (1-alpha)))) sqrt(d)(2d-1) eps / ||p||
        let ln_b = -(2f64.ln()) - lb - 0.5 * (df.sqrt() * (1.0 - alpha)).ln();
        let ln_core = log_sum_exp(&[ln_a + ln_g2, ln_b + ln_g1]);
        let ln_bound = ln_core + 0.5 * df.ln() + two_d1.ln() + eps_inf.ln() - norm_p.ln();
        // introduction: (A G2 sqrt(d) + G1/(2 beta sqrt((1-alpha)/sqrt d))) d(2d-1) eps / ||p||
        let ln_b_intro = -(2f64.ln()) - lb - 0.5 * ((1.0 - alpha) / df.sqrt()).ln();
        let ln_core_intro = log_sum_exp(&[ln_a + ln_g2 + 0.5 * df.ln(), ln_b_intro + ln_g1]);
        let ln_bound_intro =
            ln_core_intro + df.ln() + two_d1.ln() + eps_inf.ln() - norm_p.ln();
        (ln_bound, ln_bound_intro)
    };

    let ln10 = std::f64::consts::LN_10;
    Ok(BoundReport {
        d,
        alpha,
        variant,
        eps_inf,
        norm_p,
        r,
        beta: lb.exp(),
        beta_log10: lb / ln10,
        admissible_noise: ln_adm.exp(),
        admissible_noise_log10: ln_adm / ln10,
        c_tilde: ln_c.exp(),
        c_tilde_log10: ln_c / ln10,
        c_tilde_alt_sqrt_d_log10: ln_c_alt / ln10,
        error_bound: ln_bound.exp(),
        error_bound_log10: ln_bound / ln10,
        error_bound_sci: sci_from_log10(ln_bound / ln10),
        error_bound_intro: ln_bound_intro.exp(),
        error_bound_intro_log10: ln_bound_intro / ln10,
    })
}

/// The per-component phase-propagation error cap from the noisy induction:
/// `((2+√2)/m · Σ_{j=0}^{k-2} C^j + C^{k-1}/(2√m)) · ‖ε‖_∞/‖x‖_∞`, with the
/// geometric sum kept explicit because `C ≥ 1`.
pub fn propagation_error_bound(k: usize, m: f64, c: f64, eps_inf: f64, x_inf: f64) -> f64 {
    let geo: f64 = (0..k.saturating_sub(1)).map(|j| c.powi(j as i32)).sum();
    let sqrt2 = std::f64::consts::SQRT_2;
    ((2.0 + sqrt2) / m * geo + c.powi(k as i32 - 1) / (2.0 * m.sqrt())) * eps_inf / x_inf
}
