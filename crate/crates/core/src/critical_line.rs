//! Restriction of symmetric-class functions to the line `Re s = xi`.
//!
//! `V(x) = S(xi + ix)`. For sign-symmetric ordinates the finite product is real
//! on the line; the zero scan treats that reality as a checked precondition.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::product::eval_product;
use crate::series::taylor_coefficients;
use crate::summation::sum_real_by;
use crate::zeros::{is_sign_symmetric, EntireFunctionSpec, FunctionClass};

/// Grid density used when the caller gives only a range.
pub const DEFAULT_SAMPLES_PER_UNIT: usize = 64;

/// Reality gate of the zero scan, relative to `max |V|` on the grid.
pub const REALITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalLineProfile {
    pub xi: f64,
    /// Strictly ascending.
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub v0: Complex64,
    pub imag_max: f64,
    pub truncation: usize,
}

impl CriticalLineProfile {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `V^(k)(0) = i^k S^(k)(xi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatedDerivatives {
    pub orders: Vec<usize>,
    pub values: Vec<Complex64>,
    pub truncation: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMethod {
    SignChangeBisection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealZero {
    pub tau: f64,
    /// `|V(tau)|` at the returned estimate.
    pub residual: f64,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealZeroSet {
    /// Strictly ascending in `tau`.
    pub zeros: Vec<RealZero>,
    pub method: ScanMethod,
}

impl RealZeroSet {
    pub fn taus(&self) -> Vec<f64> {
        self.zeros.iter().map(|z| z.tau).collect()
    }
}

fn require_symmetric_class(spec: &EntireFunctionSpec) -> Result<f64> {
    if !spec.class().is_symmetric() {
        return Err(Error::WrongClass);
    }
    spec.center().ok_or(Error::InvalidCenter)
}

fn line_value(spec: &EntireFunctionSpec, xi: f64, x: f64, n: usize) -> Result<Complex64> {
    Ok(eval_product(spec, Complex64::new(xi, x), n)?.value)
}

/// Samples `V` at `samples` equally spaced points of `[x_min, x_max]`.
pub fn critical_line_profile(
    spec: &EntireFunctionSpec,
    x_min: f64,
    x_max: f64,
    samples: usize,
    n_terms: usize,
) -> Result<CriticalLineProfile> {
    let xi = require_symmetric_class(spec)?;
    if samples < 2 {
        return Err(Error::InvalidArgument("samples must be >= 2".into()));
    }
    if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "empty or non-finite range [{x_min}, {x_max}]"
        )));
    }
    spec.check_truncation(n_terms)?;
    let v0 = line_value(spec, xi, 0.0, n_terms)?;
    if v0 == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("V(0) = S(xi) vanishes".into()));
    }
    let step = (x_max - x_min) / (samples - 1) as f64;
    let grid: Vec<f64> = (0..samples)
        .map(|j| if j + 1 == samples { x_max } else { x_min + j as f64 * step })
        .collect();
    let values = grid
        .par_iter()
        .map(|&x| line_value(spec, xi, x, n_terms))
        .collect::<Result<Vec<_>>>()?;
    let imag_max = values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    Ok(CriticalLineProfile {
        xi,
        grid,
        values,
        v0,
        imag_max,
        truncation: n_terms,
    })
}

/// `V^(k)(0)` for `k = 0..=k_max` from the Taylor expansion about `xi`.
pub fn rotated_derivatives(spec: &EntireFunctionSpec, k_max: usize, n_terms: usize) -> Result<RotatedDerivatives> {
    let xi = require_symmetric_class(spec)?;
    let expansion = taylor_coefficients(spec, Complex64::new(xi, 0.0), k_max, n_terms)?;
    let mut factorial = 1.0;
    let mut rotation = Complex64::new(1.0, 0.0);
    let mut values = Vec::with_capacity(k_max + 1);
    for (k, c) in expansion.coefficients.iter().enumerate() {
        if k > 0 {
            factorial *= k as f64;
            rotation *= Complex64::i();
        }
        values.push(rotation * factorial * c);
    }
    Ok(RotatedDerivatives {
        orders: (0..=k_max).collect(),
        values,
        truncation: n_terms,
    })
}

/// Roots of `Re V` from grid sign changes refined by bisection to width
/// `1e-12 (1 + |x|)`. Tangential zeros produce no sign change and are missed.
pub fn scan_real_zeros(profile: &CriticalLineProfile, spec: &EntireFunctionSpec) -> Result<RealZeroSet> {
    let xi = require_symmetric_class(spec)?;
    let scale = profile.max_abs();
    if profile.imag_max > REALITY_TOLERANCE * scale {
        return Err(Error::NonRealProfile {
            imag_max: profile.imag_max,
        });
    }
    let n = profile.truncation;
    let re = |x: f64| line_value(spec, xi, x, n).map(|v| v.re);
    let mut zeros = Vec::new();
    let grid = &profile.grid;
    let vals: Vec<f64> = profile.values.iter().map(|v| v.re).collect();
    for j in 0..grid.len() {
        if vals[j] == 0.0 {
            zeros.push(RealZero {
                tau: grid[j],
                residual: profile.values[j].norm(),
                bracket: (grid[j], grid[j]),
            });
            continue;
        }
        if j + 1 == grid.len() || vals[j + 1] == 0.0 || (vals[j] > 0.0) == (vals[j + 1] > 0.0) {
            continue;
        }
        let (mut lo, mut hi) = (grid[j], grid[j + 1]);
        let lo_positive = vals[j] > 0.0;
        let mut exact = None;
        while hi - lo > 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = re(mid)?;
            if v == 0.0 {
                exact = Some(mid);
                break;
            }
            if (v > 0.0) == lo_positive {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tau = exact.unwrap_or(0.5 * (lo + hi));
        zeros.push(RealZero {
            tau,
            residual: line_value(spec, xi, tau, n)?.norm(),
            bracket: (lo, hi),
        });
    }
    Ok(RealZeroSet {
        zeros,
        method: ScanMethod::SignChangeBisection,
    })
}

/// `V(0) prod_{tau > 0} (1 - x^2/tau^2)` over the retained ordinates, each
/// positive ordinate taken with its multiplicity.
pub fn even_product_form(spec: &EntireFunctionSpec, x: f64, n_terms: usize) -> Result<Complex64> {
    if spec.class() != FunctionClass::YTilde {
        return Err(Error::InvalidArgument(format!(
            "even product form requires a Y_tilde spec, got {}",
            spec.class()
        )));
    }
    spec.check_truncation(n_terms)?;
    let taus = spec.taus(n_terms);
    if !is_sign_symmetric(&taus) {
        return Err(Error::SymmetryViolated);
    }
    let xi = spec.center().ok_or(Error::InvalidCenter)?;
    let v0 = line_value(spec, xi, 0.0, n_terms)?;
    let positive: Vec<f64> = taus.into_iter().filter(|&t| t > 0.0).collect();
    if positive.iter().any(|&t| t == x.abs()) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let log_abs = sum_real_by(&positive, |&t| {
        let r = x / t;
        let r2 = r * r;
        if r2 < 0.5 {
            (-r2).ln_1p()
        } else {
            ((t - x).abs() * (t + x).abs() / (t * t)).ln()
        }
    });
    let negative_factors = positive.iter().filter(|&&t| x.abs() > t).count();
    let sign = if negative_factors % 2 == 0 { 1.0 } else { -1.0 };
    Ok(v0 * (sign * log_abs.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::make_symmetric_spec;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sinh_tilde(k_max: usize) -> EntireFunctionSpec {
        let taus: Vec<f64> = (1..=k_max).flat_map(|k| [k as f64, -(k as f64)]).collect();
        make_symmetric_spec(1.0, &taus, c(1.0, 0.0), FunctionClass::YTilde, c(0.0, 0.0)).unwrap()
    }

    fn sinc(x: f64) -> f64 {
        if x == 0.0 {
            1.0
        } else {
            (PI * x).sin() / (PI * x)
        }
    }

    #[test]
    fn profile_matches_sinc() {
        let spec = sinh_tilde(200_000);
        let p = critical_line_profile(&spec, 0.25, 0.75, 3, 400_000).unwrap();
        assert_eq!(p.grid, vec![0.25, 0.5, 0.75]);
        // Truncation leaves about x^2 / K relative.
        assert!((p.values[1].re - 2.0 / PI).abs() < 2e-6);
        assert!((p.v0 - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn profile_is_real_for_symmetric_data() {
        let spec = sinh_tilde(2000);
        let p = critical_line_profile(&spec, -10.0, 10.0, 401, 4000).unwrap();
        assert!(p.imag_max <= 1e-9);
        for (x, v) in p.grid.iter().zip(&p.values) {
            assert!((v.re - sinc(*x)).abs() <= 1.5 * x * x / 2000.0 * sinc(*x).abs() + 1e-12);
        }
    }

    #[test]
    fn profile_requires_symmetric_class() {
        let seq = crate::zeros::ZeroSequence::constructed(vec![c(2.0, 0.0)], crate::zeros::Pairing::None).unwrap();
        let spec = EntireFunctionSpec::new(FunctionClass::Y, c(1.0, 0.0), c(0.0, 0.0), None, seq).unwrap();
        assert_eq!(critical_line_profile(&spec, 0.0, 1.0, 4, 1).unwrap_err(), Error::WrongClass);
        let sym = sinh_tilde(3);
        assert!(critical_line_profile(&sym, 0.0, 1.0, 1, 6).is_err());
        assert!(critical_line_profile(&sym, 1.0, 1.0, 4, 6).is_err());
    }

    #[test]
    fn even_symmetry_of_profile() {
        let spec = sinh_tilde(500);
        let p = critical_line_profile(&spec, -4.0, 4.0, 161, 1000).unwrap();
        let n = p.values.len();
        for j in 0..n {
            let (a, b) = (p.values[j], p.values[n - 1 - j]);
            assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn scan_recovers_integers() {
        let spec = sinh_tilde(1000);
        let p = critical_line_profile(&spec, 0.5, 3.5, 512, 2000).unwrap();
        let found = scan_real_zeros(&p, &spec).unwrap();
        let taus = found.taus();
        assert_eq!(taus.len(), 3);
        for (t, k) in taus.iter().zip([1.0, 2.0, 3.0]) {
            assert!((t - k).abs() < 1e-9, "{t}");
        }
        for z in &found.zeros {
            assert!(z.residual <= 1e-9);
            assert!(z.bracket.0 <= z.tau && z.tau <= z.bracket.1);
        }
        assert!(taus.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn scan_of_zero_free_range_is_empty() {
        let spec = sinh_tilde(100);
        let p = critical_line_profile(&spec, 0.1, 0.9, 64, 200).unwrap();
        assert!(scan_real_zeros(&p, &spec).unwrap().zeros.is_empty());
    }

    #[test]
    fn scan_quadratic_records_grid_hits() {
        let spec = make_symmetric_spec(1.0, &[1.0, -1.0], c(1.0, 0.0), FunctionClass::YTilde, c(0.0, 0.0)).unwrap();
        // Grid points land exactly on +-1.
        let p = critical_line_profile(&spec, -2.0, 2.0, 9, 2).unwrap();
        let taus = scan_real_zeros(&p, &spec).unwrap().taus();
        assert_eq!(taus.len(), 2);
        assert!((taus[0] + 1.0).abs() < 1e-12 && (taus[1] - 1.0).abs() < 1e-12);
        // Off-grid bracketing.
        let p = critical_line_profile(&spec, -1.7, 1.9, 10, 2).unwrap();
        let taus = scan_real_zeros(&p, &spec).unwrap().taus();
        assert!((taus[0] + 1.0).abs() < 1e-11 && (taus[1] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn scan_rejects_complex_profile() {
        // Genus-0 profiles are real multiples of V(0); a complex V(0) breaks reality.
        let spec = make_symmetric_spec(1.0, &[1.0, 2.5], c(1.0, 1.0), FunctionClass::YTilde, c(0.0, 0.0)).unwrap();
        let p = critical_line_profile(&spec, -3.0, 3.0, 64, 2).unwrap();
        assert!(matches!(scan_real_zeros(&p, &spec), Err(Error::NonRealProfile { .. })));
    }

    #[test]
    fn even_product_matches_profile() {
        let spec = sinh_tilde(3000);
        let p = critical_line_profile(&spec, -6.3, 6.3, 127, 6000).unwrap();
        for (&x, v) in p.grid.iter().zip(&p.values) {
            let e = even_product_form(&spec, x, 6000).unwrap();
            assert!((e - v).norm() <= 1e-10 * (1.0 + v.norm()), "x = {x}");
        }
        assert_eq!(even_product_form(&spec, 1.0, 6000).unwrap(), c(0.0, 0.0));
        assert_eq!(even_product_form(&spec, 0.0, 6000).unwrap(), p.v0);
    }

    #[test]
    fn even_product_rejects_asymmetry() {
        let spec = make_symmetric_spec(1.0, &[1.0, 2.0], c(1.0, 0.0), FunctionClass::YTilde, c(0.0, 0.0)).unwrap();
        assert_eq!(even_product_form(&spec, 0.3, 2).unwrap_err(), Error::SymmetryViolated);
    }

    #[test]
    fn rotated_derivatives_match_finite_differences() {
        let spec = sinh_tilde(1000);
        let n = 2000;
        let rd = rotated_derivatives(&spec, 3, n).unwrap();
        for (k, v) in rd.values.iter().enumerate() {
            let s = crate::series::taylor_coefficients(&spec, c(1.0, 0.0), 3, n).unwrap().coefficients[k];
            assert!((v.norm() - s.norm() * (1..=k).product::<usize>() as f64).abs() <= 1e-12 * (1.0 + v.norm()));
        }
        let h = 1e-3;
        let v = |x: f64| line_value(&spec, 1.0, x, n).unwrap();
        let d1 = (v(h) - v(-h)) / (2.0 * h);
        let d2 = (v(h) - 2.0 * v(0.0) + v(-h)) / (h * h);
        assert!(d1.norm() < 1e-9 && rd.values[1].norm() < 1e-9);
        assert!((d2 - rd.values[2]).norm() <= 1e-5 * rd.values[2].norm());
        assert!((rd.values[2].re + PI * PI / 3.0).abs() < 1e-2);
    }
}
