//! Taylor coefficients from zero data.
//!
//! About a center `c`, `log S(c + u) - log S(c) = sum_m g_m u^m` with
//! `g_m = -p_m / m` for the power sums `p_m = sum_k (sigma_k - c)^(-m)`. The
//! genus-1 linear coefficient is `Q + sum_k [1/sigma_k - 1/(sigma_k - c)]`,
//! summed factor by factor so no conditionally convergent series is formed on
//! its own. Coefficients follow from the exponential recurrence
//! `n r_n = sum_{m=1..n} m g_m r_{n-m}`, `c_n = S(c) r_n`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::product::{eval_product, ZERO_PROXIMITY};
use crate::summation::sum_vec_by;
use crate::zeros::{is_sign_symmetric, EntireFunctionSpec, FunctionClass};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Odd coefficients about `xi` must stay below this fraction of the largest
/// even coefficient before they are forced to zero.
pub const ODD_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSums {
    pub center: Complex64,
    /// `values[m - 1] = p_m`.
    pub values: Vec<Complex64>,
    pub terms_used: usize,
    /// `p_1` of a genus-1 spec is only conditionally convergent; the reported
    /// value is the pairing-ordered sum.
    pub first_is_conditional: bool,
}

impl PowerSums {
    pub fn get(&self, m: usize) -> Complex64 {
        self.values[m - 1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorExpansion {
    pub center: Complex64,
    /// `coefficients[k] = S^(k)(center) / k!`.
    pub coefficients: Vec<Complex64>,
    pub terms_used: usize,
    pub genus: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvenSeries {
    /// Expansion about `xi` with odd coefficients set to exactly zero.
    pub expansion: TaylorExpansion,
    /// `(k, |c_k|)` for every odd `k` before forcing.
    pub odd_magnitudes: Vec<(usize, f64)>,
    pub max_even: f64,
}

impl EvenSeries {
    pub fn max_odd(&self) -> f64 {
        self.odd_magnitudes.iter().map(|&(_, m)| m).fold(0.0, f64::max)
    }
}

fn check_center(spec: &EntireFunctionSpec, center: Complex64, n: usize) -> Result<()> {
    if spec.zeros()[..n]
        .iter()
        .any(|z| (z - center).norm() <= ZERO_PROXIMITY * z.norm())
    {
        return Err(Error::TaylorCenterIsZero);
    }
    Ok(())
}

/// `p_1..p_M` plus, in the extra last slot, `sum [1/sigma - 1/(sigma - c)]`.
fn raw_sums(spec: &EntireFunctionSpec, center: Complex64, m_max: usize, n: usize) -> Vec<Complex64> {
    let zeros = spec.zeros();
    let groups = spec.zero_sequence().groups_within(n);
    sum_vec_by(groups, m_max + 1, |g, out| {
        for i in g.retained(n) {
            let d = zeros[i] - center;
            let w = d.inv();
            let mut power = w;
            for slot in out.iter_mut().take(m_max) {
                *slot += power;
                power *= w;
            }
            out[m_max] += -center / (zeros[i] * d);
        }
    })
}

pub fn power_sums(spec: &EntireFunctionSpec, center: Complex64, m_max: usize, n_terms: usize) -> Result<PowerSums> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be >= 1".into()));
    }
    spec.check_truncation(n_terms)?;
    check_center(spec, center, n_terms)?;
    let mut values = raw_sums(spec, center, m_max, n_terms);
    values.truncate(m_max);
    Ok(PowerSums {
        center,
        values,
        terms_used: n_terms,
        first_is_conditional: spec.genus() == 1,
    })
}

/// Coefficients `c_0..c_{k_max}` of the expansion about `center`.
pub fn taylor_coefficients(
    spec: &EntireFunctionSpec,
    center: Complex64,
    k_max: usize,
    n_terms: usize,
) -> Result<TaylorExpansion> {
    spec.check_truncation(n_terms)?;
    check_center(spec, center, n_terms)?;
    let c0 = eval_product(spec, center, n_terms)?.value;
    if c0 == ZERO {
        return Err(Error::TaylorCenterIsZero);
    }
    let mut coefficients = vec![c0];
    if k_max > 0 {
        let sums = raw_sums(spec, center, k_max, n_terms);
        // log-expansion coefficients g_1..g_K, stored as m * g_m
        let mut weighted: Vec<Complex64> = (1..=k_max).map(|m| -sums[m - 1]).collect();
        if spec.genus() == 1 {
            weighted[0] = spec.q() + sums[k_max];
        }
        let mut ratios = vec![Complex64::new(1.0, 0.0)];
        for n in 1..=k_max {
            let acc: Complex64 = (1..=n).map(|m| weighted[m - 1] * ratios[n - m]).sum();
            ratios.push(acc / n as f64);
        }
        coefficients.extend(ratios[1..].iter().map(|r| c0 * r));
    }
    Ok(TaylorExpansion {
        center,
        coefficients,
        terms_used: n_terms,
        genus: spec.genus(),
    })
}

/// Horner evaluation of `sum c_k (s - center)^k`.
pub fn eval_series(expansion: &TaylorExpansion, s: Complex64) -> Complex64 {
    let u = s - expansion.center;
    expansion
        .coefficients
        .iter()
        .rev()
        .fold(ZERO, |acc, &c| acc * u + c)
}

/// Even expansion about `xi` for a `Y_tilde` spec whose retained ordinates are
/// sign-symmetric. Odd coefficients are measured, checked against
/// [`ODD_TOLERANCE`] and then forced to zero.
pub fn even_series(spec: &EntireFunctionSpec, k_max: usize, n_terms: usize) -> Result<EvenSeries> {
    if spec.class() != FunctionClass::YTilde {
        return Err(Error::InvalidArgument(format!(
            "even series requires a Y_tilde spec, got {}",
            spec.class()
        )));
    }
    spec.check_truncation(n_terms)?;
    if !is_sign_symmetric(&spec.taus(n_terms)) {
        return Err(Error::SymmetryViolated);
    }
    let xi = spec.center().ok_or(Error::InvalidCenter)?;
    let mut expansion = taylor_coefficients(spec, Complex64::new(xi, 0.0), k_max, n_terms)?;
    let max_even = expansion
        .coefficients
        .iter()
        .step_by(2)
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let limit = ODD_TOLERANCE * max_even;
    let mut odd_magnitudes = Vec::with_capacity(k_max / 2);
    for k in (1..expansion.coefficients.len()).step_by(2) {
        let magnitude = expansion.coefficients[k].norm();
        if magnitude > limit {
            return Err(Error::OddResidual {
                index: k,
                magnitude,
                limit,
            });
        }
        odd_magnitudes.push((k, magnitude));
        expansion.coefficients[k] = ZERO;
    }
    Ok(EvenSeries {
        expansion,
        odd_magnitudes,
        max_even,
    })
}
