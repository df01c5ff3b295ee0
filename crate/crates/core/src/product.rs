//! Truncated Weierstrass-Hadamard products and their shifted-center forms.
//!
//! Every product is accumulated as a compensated sum of per-factor logarithms,
//! grouped by the zero sequence's pairing, then exponentiated once. An exact
//! zero factor short-circuits to the value 0.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::primary::{log_scaled_factor, log_tail_series, SERIES_RADIUS};
use crate::summation::{sum_complex_by, ComplexNeumaier};
use crate::zeros::EntireFunctionSpec;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative distance under which a point counts as sitting on a retained zero.
pub const ZERO_PROXIMITY: f64 = 1e-12;

/// Absolute threshold factor for the `near_zero` flag: `1e-9 (1 + |s|)`.
pub const NEAR_ZERO_FACTOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedEvaluation {
    pub s: Complex64,
    pub value: Complex64,
    /// Accumulated logarithm (per-factor principal branches); `None` when the
    /// value is exactly zero.
    pub log_value: Option<Complex64>,
    pub terms_used: usize,
    /// Estimated relative modulus error of the truncation; `None` = indeterminate.
    pub tail_bound: Option<f64>,
    pub nearest_zero_distance: f64,
    pub near_zero: bool,
}

impl TruncatedEvaluation {
    /// `ln |value|`, finite even where `value` itself would overflow.
    pub fn log_modulus(&self) -> f64 {
        self.log_value.map_or(f64::NEG_INFINITY, |l| l.re)
    }
}

fn nearest_distance(zeros: &[Complex64], s: Complex64) -> f64 {
    zeros
        .iter()
        .map(|z| (z - s).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Sum of `f(i)` over retained zeros in pairing-group order. `None` when some
/// factor reports an exact zero.
fn sum_over_factors<F>(spec: &EntireFunctionSpec, n: usize, f: F) -> Option<Complex64>
where
    F: Fn(usize) -> Option<Complex64> + Sync,
{
    let groups = spec.zero_sequence().groups_within(n);
    let hit_zero = std::sync::atomic::AtomicBool::new(false);
    let total = sum_complex_by(groups, |g| {
        let mut acc = ComplexNeumaier::default();
        for i in g.retained(n) {
            match f(i) {
                Some(v) => acc.add(v),
                None => hit_zero.store(true, std::sync::atomic::Ordering::Relaxed),
            }
        }
        acc.value()
    });
    (!hit_zero.into_inner()).then_some(total)
}

fn finish(spec: &EntireFunctionSpec, s: Complex64, n: usize, log_value: Option<Complex64>) -> TruncatedEvaluation {
    let distance = nearest_distance(&spec.zeros()[..n], s);
    TruncatedEvaluation {
        s,
        value: log_value.map_or(ZERO, |l| l.exp()),
        log_value,
        terms_used: n,
        tail_bound: spec.tail_model().tail_bound(spec.zero_sequence(), s, n),
        nearest_zero_distance: distance,
        near_zero: distance < NEAR_ZERO_FACTOR * (1.0 + s.norm()),
    }
}

/// `S(0) prod (1 - s/sigma_k)` for genus 0, `S(0) e^{Qs} prod (1 - s/sigma_k) e^{s/sigma_k}`
/// for genus 1, over the first `n_terms` zeros.
pub fn eval_product(spec: &EntireFunctionSpec, s: Complex64, n_terms: usize) -> Result<TruncatedEvaluation> {
    spec.check_truncation(n_terms)?;
    let genus = spec.genus();
    let zeros = spec.zeros();
    let log_factors = sum_over_factors(spec, n_terms, |i| log_scaled_factor(s, zeros[i], genus));
    let prefactor = spec.value_at_zero().ln() + if genus == 1 { spec.q() * s } else { ZERO };
    Ok(finish(spec, s, n_terms, log_factors.map(|l| l + prefactor)))
}

fn check_shift_point(spec: &EntireFunctionSpec, alpha: Complex64, n: usize) -> Result<()> {
    if alpha == ZERO {
        return Err(Error::ZeroShift);
    }
    if spec.zeros()[..n]
        .iter()
        .any(|z| (z - alpha).norm() <= ZERO_PROXIMITY * z.norm())
    {
        return Err(Error::ShiftPointIsZero {
            alpha: alpha.to_string(),
        });
    }
    Ok(())
}

/// `log[(1 - (s-a)/(sigma-a)) e^{(s-a)/sigma}]` (genus 1) or without the
/// exponential (genus 0). The small-ratio branch rewrites the genus-1 factor as
/// `log H(w, 1) - (s-a) a / (sigma (sigma - a))` with `w = (s-a)/(sigma-a)`.
fn log_shifted_factor(s: Complex64, alpha: Complex64, sigma: Complex64, genus: u32) -> Option<Complex64> {
    let h = s - alpha;
    let d = sigma - alpha;
    let w = h / d;
    if w.norm() <= SERIES_RADIUS {
        return Some(match genus {
            0 => log_tail_series(w, 0),
            _ => log_tail_series(w, 1) - h * alpha / (sigma * d),
        });
    }
    let diff = sigma - s;
    if diff == ZERO {
        return None;
    }
    let direct = (diff / d).ln();
    Some(if genus == 0 { direct } else { direct + h / sigma })
}

/// Right-hand side of the shifted-center product: `S(a) e^{Q(s-a)} prod (1 - (s-a)/(sigma-a)) e^{(s-a)/sigma}`
/// for genus 1 and `S(a) prod (1 - (s-a)/(sigma-a))` for genus 0, with `S(a)`
/// taken from [`eval_product`] at the same truncation.
pub fn eval_shifted_product(
    spec: &EntireFunctionSpec,
    alpha: Complex64,
    s: Complex64,
    n_terms: usize,
) -> Result<TruncatedEvaluation> {
    spec.check_truncation(n_terms)?;
    check_shift_point(spec, alpha, n_terms)?;
    let anchor = eval_product(spec, alpha, n_terms)?;
    let anchor_log = anchor
        .log_value
        .expect("alpha is not a retained zero, so S(alpha) is nonzero");
    if s == alpha {
        return Ok(finish(spec, s, n_terms, Some(anchor_log)));
    }
    let genus = spec.genus();
    let zeros = spec.zeros();
    let log_factors = sum_over_factors(spec, n_terms, |i| log_shifted_factor(s, alpha, zeros[i], genus));
    let prefactor = anchor_log + if genus == 1 { spec.q() * (s - alpha) } else { ZERO };
    Ok(finish(spec, s, n_terms, log_factors.map(|l| l + prefactor)))
}

/// Critical-line form about the center `xi`: `S(xi) e^{Q(s-xi)} prod (1 - (s-xi)/(i tau_k)) e^{(s-xi)/sigma_k}`
/// (genus 1) or `S(xi) prod (1 - (s-xi)/(i tau_k))` (genus 0). Factors use
/// `i tau_k = i Im sigma_k` rather than `sigma_k - xi`.
pub fn eval_centered_product(spec: &EntireFunctionSpec, s: Complex64, n_terms: usize) -> Result<TruncatedEvaluation> {
    if !spec.class().is_symmetric() {
        return Err(Error::WrongClass);
    }
    spec.check_truncation(n_terms)?;
    let xi = Complex64::new(spec.center().ok_or(Error::InvalidCenter)?, 0.0);
    let anchor_log = eval_product(spec, xi, n_terms)?
        .log_value
        .expect("xi is never a zero of a symmetric-class spec");
    let genus = spec.genus();
    let zeros = spec.zeros();
    let u = s - xi;
    let log_factors = sum_over_factors(spec, n_terms, |i| {
        let it = Complex64::new(0.0, zeros[i].im);
        let w = u / it;
        if w.norm() <= SERIES_RADIUS {
            return Some(match genus {
                0 => log_tail_series(w, 0),
                _ => log_tail_series(w, 1) - u * xi / (zeros[i] * it),
            });
        }
        let diff = it - u;
        if diff == ZERO {
            return None;
        }
        let direct = (diff / it).ln();
        Some(if genus == 0 { direct } else { direct + u / zeros[i] })
    });
    let prefactor = anchor_log + if genus == 1 { spec.q() * u } else { ZERO };
    Ok(finish(spec, s, n_terms, log_factors.map(|l| l + prefactor)))
}

/// `sum_k -alpha/sigma_k` over the retained zeros in group order.
fn paired_inverse_sum(spec: &EntireFunctionSpec, alpha: Complex64, n: usize) -> Complex64 {
    let zeros = spec.zeros();
    sum_over_factors(spec, n, |i| Some(-alpha / zeros[i])).unwrap_or(ZERO)
}

/// Relative residual `|L - R| / (|L| + |R|)` of the constant-matching identity
/// `S(0) prod (1 - a/sigma_k) = S(a) e^{-Qa} prod e^{-a/sigma_k}`, with `S(a)`
/// from the same truncated data.
pub fn shift_constant_residual(spec: &EntireFunctionSpec, alpha: Complex64, n_terms: usize) -> Result<f64> {
    spec.check_truncation(n_terms)?;
    check_shift_point(spec, alpha, n_terms)?;
    let s_alpha = eval_product(spec, alpha, n_terms)?.value;
    shift_constant_residual_against(spec, alpha, n_terms, s_alpha)
}

/// As [`shift_constant_residual`] but with an externally supplied `S(a)`
/// (for instance a closed form), so the residual measures truncation error.
pub fn shift_constant_residual_against(
    spec: &EntireFunctionSpec,
    alpha: Complex64,
    n_terms: usize,
    s_alpha: Complex64,
) -> Result<f64> {
    spec.check_truncation(n_terms)?;
    check_shift_point(spec, alpha, n_terms)?;
    let zeros = spec.zeros();
    let log_lhs = sum_over_factors(spec, n_terms, |i| log_scaled_factor(alpha, zeros[i], 0))
        .expect("alpha is not a retained zero");
    let lhs = spec.value_at_zero() * log_lhs.exp();
    let exponent = if spec.genus() == 1 {
        -spec.q() * alpha + paired_inverse_sum(spec, alpha, n_terms)
    } else {
        ZERO
    };
    let rhs = s_alpha * exponent.exp();
    Ok((lhs - rhs).norm() / (lhs.norm() + rhs.norm()))
}

/// `|e^{Q(s-a)} prod e^{(s-a)/sigma_k} - 1|`: how far the exponential prefactor
/// is from 1 on the retained zeros (0 identically for genus 0).
pub fn exponential_prefactor_residual(
    spec: &EntireFunctionSpec,
    alpha: Complex64,
    s: Complex64,
    n_terms: usize,
) -> Result<f64> {
    spec.check_truncation(n_terms)?;
    if spec.genus() == 0 {
        return Ok(0.0);
    }
    let h = s - alpha;
    let exponent = spec.q() * h - paired_inverse_sum(spec, h, n_terms);
    Ok(exponent.exp_m1_norm())
}

trait ExpM1Norm {
    fn exp_m1_norm(self) -> f64;
}

impl ExpM1Norm for Complex64 {
    fn exp_m1_norm(self) -> f64 {
        // |e^z - 1| without cancellation for small z.
        let re = self.re.exp_m1();
        let (sin, cos) = self.im.sin_cos();
        let cos_m1 = -2.0 * (self.im / 2.0).sin().powi(2);
        Complex64::new(re * cos + cos_m1, (re + 1.0) * sin).norm()
    }
}

/// Truncated `S'(s)/S(s)`: `sum 1/(s - sigma_k)` (genus 0) or
/// `Q + sum [1/(s - sigma_k) + 1/sigma_k]` (genus 1).
pub fn log_derivative(spec: &EntireFunctionSpec, s: Complex64, n_terms: usize) -> Result<Complex64> {
    spec.check_truncation(n_terms)?;
    let zeros = spec.zeros();
    if zeros[..n_terms]
        .iter()
        .any(|z| (s - z).norm() <= ZERO_PROXIMITY * z.norm())
    {
        return Err(Error::PoleOfLogDerivative { s: s.to_string() });
    }
    let genus = spec.genus();
    let sum = sum_over_factors(spec, n_terms, |i| {
        let sigma = zeros[i];
        Some(match genus {
            0 => (s - sigma).inv(),
            // 1/(s - sigma) + 1/sigma, combined to avoid cancellation
            _ => s / (sigma * (s - sigma)),
        })
    })
    .unwrap_or(ZERO);
    Ok(sum + if genus == 1 { spec.q() } else { ZERO })
}
