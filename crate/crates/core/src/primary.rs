//! Weierstrass primary factors `H(s, p) = (1 - s) exp(s + s^2/2 + ... + s^p/p)`.
//!
//! Inside the disk `|s| <= 1/2` the logarithm is taken from the tail series
//! `log H(s, p) = -sum_{m > p} s^m / m`, which avoids the cancellation in
//! `(1 - s) exp(poly)` for small `s`. Outside it the direct form is used with
//! the principal branch of `log(1 - s)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Radius below which the tail series replaces the direct formula.
pub const SERIES_RADIUS: f64 = 0.5;

const SERIES_MAX_TERMS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryFactorValue {
    pub value: Complex64,
    /// Absent exactly when `value == 0`, i.e. at `s = 1`.
    pub log_value: Option<Complex64>,
    pub genus_used: u32,
}

/// `sum_{m=1..p} s^m / m`
pub(crate) fn exponent_polynomial(s: Complex64, p: u32) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for m in 1..=p {
        power *= s;
        acc += power / m as f64;
    }
    acc
}

/// `-sum_{m > p} s^m / m`, summed until the terms drop below double precision.
/// Requires `|s| < 1`; callers keep `|s| <= SERIES_RADIUS`.
pub(crate) fn log_tail_series(s: Complex64, p: u32) -> Complex64 {
    if s == Complex64::new(0.0, 0.0) {
        return s;
    }
    let mut power = s.powu(p + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut m = (p + 1) as f64;
    for _ in 0..SERIES_MAX_TERMS {
        let term = power / m;
        acc += term;
        if term.norm() <= 1e-18 * acc.norm() {
            break;
        }
        power *= s;
        m += 1.0;
    }
    -acc
}

pub fn primary_factor(s: Complex64, p: u32) -> PrimaryFactorValue {
    if s.norm() <= SERIES_RADIUS {
        let log = log_tail_series(s, p);
        return PrimaryFactorValue {
            value: log.exp(),
            log_value: Some(log),
            genus_used: p,
        };
    }
    let one_minus = Complex64::new(1.0, 0.0) - s;
    if one_minus == Complex64::new(0.0, 0.0) {
        return PrimaryFactorValue {
            value: one_minus,
            log_value: None,
            genus_used: p,
        };
    }
    let poly = exponent_polynomial(s, p);
    PrimaryFactorValue {
        value: one_minus * poly.exp(),
        log_value: Some(one_minus.ln() + poly),
        genus_used: p,
    }
}

/// Partial tail `-sum_{m=p+1}^{p+terms} s^m / m` with caller-chosen length.
pub fn log_primary_factor_tail(s: Complex64, p: u32, terms: usize) -> Result<Complex64> {
    if s.norm() >= 1.0 || !s.norm().is_finite() {
        return Err(Error::SeriesDomain { modulus: s.norm() });
    }
    if terms == 0 {
        return Err(Error::InvalidArgument("terms must be >= 1".into()));
    }
    let mut power = s.powu(p + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..terms {
        acc += power / (p as f64 + 1.0 + j as f64);
        power *= s;
    }
    Ok(-acc)
}

/// `log H(s / sigma, p)`, with the direct branch written as `log((sigma - s) / sigma)`
/// so that evaluation next to `sigma` does not lose digits in `1 - s/sigma`.
/// `None` when `s == sigma` exactly.
pub(crate) fn log_scaled_factor(s: Complex64, sigma: Complex64, p: u32) -> Option<Complex64> {
    let z = s / sigma;
    if z.norm() <= SERIES_RADIUS {
        return Some(log_tail_series(z, p));
    }
    let diff = sigma - s;
    if diff == Complex64::new(0.0, 0.0) {
        return None;
    }
    Some((diff / sigma).ln() + exponent_polynomial(z, p))
}
