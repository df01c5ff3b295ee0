//! Growth order, exponent of convergence and zero multiplicity from finite data.
//!
//! The asymptotic quantities are replaced by least-squares fits over a finite
//! ladder of radii; each estimate carries its fit residual.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::product::{eval_product, log_derivative};
use crate::summation::sum_complex;
use crate::zeros::{linear_fit, EntireFunctionSpec, ZeroSequence};

/// Angles per circle used by [`estimate_order`]. Even, so that both real
/// half-axes are sampled.
pub const ORDER_ANGLES: usize = 64;

/// Radii per ladder used by [`estimate_exponent`].
pub const EXPONENT_RADII: usize = 24;

pub const MIN_ZEROS_FOR_EXPONENT: usize = 10;

pub const DEFAULT_NODES: usize = 512;

/// Acceptance window around the nearest integer for a winding number.
pub const WINDING_WINDOW: f64 = 0.1;

/// Minimum clearance between the contour and any retained zero.
pub const CONTOUR_CLEARANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    /// Fitted order (the same quantity whether called rho or beta).
    pub slope: f64,
    /// Ascending; only radii with `MV(v) > e` are kept.
    pub radii: Vec<f64>,
    /// `ln ln MV(v)` at each kept radius.
    pub loglog_values: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEstimate {
    pub gamma_hat: f64,
    /// `(r, N(r))`, with `N` non-decreasing.
    pub counting_pairs: Vec<(f64, usize)>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityResult {
    pub center: Complex64,
    pub radius: f64,
    pub winding: i64,
    /// Within [`WINDING_WINDOW`] of `winding`.
    pub raw_integral: Complex64,
    pub nodes: usize,
}

fn circle(center: Complex64, radius: f64, samples: usize) -> impl IndexedParallelIterator<Item = Complex64> {
    (0..samples)
        .into_par_iter()
        .map(move |j| center + Complex64::from_polar(radius, TAU * j as f64 / samples as f64))
}

fn check_circle_args(v: f64, samples: usize, min_samples: usize) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {v}")));
    }
    if samples < min_samples {
        return Err(Error::InvalidArgument(format!(
            "at least {min_samples} samples required, got {samples}"
        )));
    }
    Ok(())
}

/// `max_j ln |S(v e^{i theta_j})|`, finite where `|S|` itself would overflow.
fn max_log_modulus(spec: &EntireFunctionSpec, v: f64, samples: usize, n_terms: usize) -> Result<f64> {
    let logs = circle(Complex64::new(0.0, 0.0), v, samples)
        .map(|s| eval_product(spec, s, n_terms).map(|e| e.log_modulus()))
        .collect::<Result<Vec<_>>>()?;
    Ok(logs.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Maximum of `|S|` over `angular_samples` equally spaced points of `|s| = v`.
/// A lower bound for the true maximum modulus.
pub fn max_modulus(spec: &EntireFunctionSpec, v: f64, angular_samples: usize, n_terms: usize) -> Result<f64> {
    check_circle_args(v, angular_samples, 8)?;
    spec.check_truncation(n_terms)?;
    Ok(max_log_modulus(spec, v, angular_samples, n_terms)?.exp())
}

/// Slope of `ln ln MV(v)` against `ln v` on a geometric ladder in `[v_min, v_max]`.
pub fn estimate_order(
    spec: &EntireFunctionSpec,
    v_min: f64,
    v_max: f64,
    n_radii: usize,
    n_terms: usize,
) -> Result<OrderEstimate> {
    if !(v_min > 1.0) || !(v_max > v_min) || !v_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "radius ladder needs 1 < v_min < v_max, got [{v_min}, {v_max}]"
        )));
    }
    if n_radii < 3 {
        return Err(Error::InvalidArgument("at least 3 radii required".into()));
    }
    spec.check_truncation(n_terms)?;
    let ratio = (v_max / v_min).ln() / (n_radii - 1) as f64;
    let mut radii = Vec::new();
    let mut loglog_values = Vec::new();
    for j in 0..n_radii {
        let v = if j + 1 == n_radii { v_max } else { v_min * (ratio * j as f64).exp() };
        let log_mv = max_log_modulus(spec, v, ORDER_ANGLES, n_terms)?;
        if log_mv > 1.0 {
            radii.push(v);
            loglog_values.push(log_mv.ln());
        }
    }
    if radii.len() < 3 {
        return Err(Error::InsufficientGrowth { usable: radii.len() });
    }
    let log_v: Vec<f64> = radii.iter().map(|v| v.ln()).collect();
    let (slope, _, residual) = linear_fit(&log_v, &loglog_values);
    Ok(OrderEstimate {
        slope,
        radii,
        loglog_values,
        residual,
    })
}

/// Slope of `ln N(r)` against `ln r`, `N(r) = #{k : |sigma_k| <= r}`.
pub fn estimate_exponent(seq: &ZeroSequence, r_min: f64, r_max: f64) -> Result<ExponentEstimate> {
    if !(r_min > 0.0) || !(r_max > r_min) || !r_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "radius range needs 0 < r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    let mut moduli: Vec<f64> = seq.zeros().iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    let count = |r: f64| moduli.partition_point(|&m| m <= r);
    let found = count(r_max) - moduli.partition_point(|&m| m < r_min);
    if found < MIN_ZEROS_FOR_EXPONENT {
        return Err(Error::InsufficientZerosInRange {
            found,
            needed: MIN_ZEROS_FOR_EXPONENT,
        });
    }
    let step = (r_max / r_min).ln() / (EXPONENT_RADII - 1) as f64;
    let counting_pairs: Vec<(f64, usize)> = (0..EXPONENT_RADII)
        .map(|j| {
            let r = if j + 1 == EXPONENT_RADII { r_max } else { r_min * (step * j as f64).exp() };
            (r, count(r))
        })
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = counting_pairs
        .iter()
        .filter(|&&(_, n)| n > 0)
        .map(|&(r, n)| (r.ln(), (n as f64).ln()))
        .unzip();
    if x.len() < 2 {
        return Err(Error::InsufficientZerosInRange {
            found,
            needed: MIN_ZEROS_FOR_EXPONENT,
        });
    }
    let (gamma_hat, _, residual) = linear_fit(&x, &y);
    Ok(ExponentEstimate {
        gamma_hat,
        counting_pairs,
        residual,
    })
}

/// Winding number of `S` around `|s - center| = radius` by the trapezoidal
/// rule on `S'/S`: `(1/n) sum_j L(s_j) (s_j - center)`.
pub fn verify_multiplicity(
    spec: &EntireFunctionSpec,
    center: Complex64,
    radius: f64,
    nodes: usize,
    n_terms: usize,
) -> Result<MultiplicityResult> {
    check_circle_args(radius, nodes, 8)?;
    spec.check_truncation(n_terms)?;
    let clearance = spec.zeros()[..n_terms]
        .iter()
        .map(|z| ((z - center).norm() - radius).abs())
        .fold(f64::INFINITY, f64::min);
    if clearance < CONTOUR_CLEARANCE {
        return Err(Error::ContourThroughZero { distance: clearance });
    }
    let terms = circle(center, radius, nodes)
        .map(|s| log_derivative(spec, s, n_terms).map(|l| l * (s - center)))
        .collect::<Result<Vec<_>>>()?;
    let raw_integral = sum_complex(&terms) / nodes as f64;
    let winding = raw_integral.re.round();
    let offset = (raw_integral - Complex64::new(winding, 0.0)).norm();
    if offset > WINDING_WINDOW {
        return Err(Error::QuadratureUnresolved {
            raw: raw_integral.to_string(),
            offset,
        });
    }
    Ok(MultiplicityResult {
        center,
        radius,
        winding: winding as i64,
        raw_integral,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::{make_symmetric_spec, FunctionClass, Pairing};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sinh_tilde(k_max: usize) -> EntireFunctionSpec {
        let taus: Vec<f64> = (1..=k_max).flat_map(|k| [k as f64, -(k as f64)]).collect();
        make_symmetric_spec(1.0, &taus, c(1.0, 0.0), FunctionClass::YTilde, c(0.0, 0.0)).unwrap()
    }

    fn exponential(q: Complex64, s0: Complex64) -> EntireFunctionSpec {
        let seq = ZeroSequence::constructed(vec![], Pairing::None).unwrap();
        let class = if q == c(0.0, 0.0) { FunctionClass::Y } else { FunctionClass::L };
        EntireFunctionSpec::new(class, s0, q, None, seq).unwrap()
    }

    fn from_zeros(zeros: Vec<Complex64>) -> EntireFunctionSpec {
        let seq = ZeroSequence::constructed(zeros, Pairing::None).unwrap();
        EntireFunctionSpec::new(FunctionClass::Y, c(1.0, 0.0), c(0.0, 0.0), None, seq).unwrap()
    }

    #[test]
    fn exponential_max_modulus() {
        let spec = exponential(c(1.0, 0.0), c(1.0, 0.0));
        let mv = max_modulus(&spec, 2.0, 16, 0).unwrap();
        assert!((mv - 7.389_056_098_930_65).abs() < 1e-12);
        assert!((mv - 2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn max_modulus_near_origin() {
        let spec = sinh_tilde(100);
        let mv = max_modulus(&spec, 1e-8, 16, 200).unwrap();
        assert!((mv - spec.value_at_zero().norm()).abs() < 1e-6);
        assert!(max_modulus(&spec, 1.0, 4, 200).is_err());
        assert!(max_modulus(&spec, 0.0, 16, 200).is_err());
    }

    #[test]
    fn max_modulus_against_closed_form_on_same_grid() {
        let spec = sinh_tilde(50_000);
        let v = 3.0;
        let angles = 32;
        let oracle = (0..angles)
            .map(|j| {
                let u = Complex64::from_polar(v, TAU * j as f64 / angles as f64) - 1.0;
                ((PI * u).sinh() / (PI * u)).norm()
            })
            .fold(0.0, f64::max);
        let mv = max_modulus(&spec, v, angles, 100_000).unwrap();
        // Truncation leaves about |u|^2 / K relative.
        assert!((mv - oracle).abs() <= 4e-4 * oracle);
    }

    #[test]
    fn max_modulus_grows_with_nested_grids() {
        let spec = from_zeros(vec![c(2.0, 1.0), c(-1.0, 3.0), c(0.5, -2.0)]);
        let mut previous = 0.0;
        for samples in [8, 16, 32, 64, 128] {
            let mv = max_modulus(&spec, 2.7, samples, 3).unwrap();
            assert!(mv >= previous);
            previous = mv;
        }
    }

    #[test]
    fn sinh_order_is_one() {
        let spec = sinh_tilde(2000);
        let est = estimate_order(&spec, 10.0, 200.0, 12, 4000).unwrap();
        assert!((0.9..=1.1).contains(&est.slope), "{}", est.slope);
        assert!(est.radii.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn exponential_order_is_one() {
        let spec = exponential(c(0.5, 0.5), c(1.0, 0.0));
        let est = estimate_order(&spec, 10.0, 1000.0, 8, 0).unwrap();
        assert!((est.slope - 1.0).abs() < 1e-9);
        assert!(est.residual < 1e-9);
    }

    #[test]
    fn constant_has_no_growth() {
        let spec = exponential(c(0.0, 0.0), c(2.0, 0.0));
        assert_eq!(
            estimate_order(&spec, 2.0, 100.0, 6, 0).unwrap_err(),
            Error::InsufficientGrowth { usable: 0 }
        );
        assert!(estimate_order(&spec, 0.5, 100.0, 6, 0).is_err());
    }

    #[test]
    fn linear_counting_exponent() {
        let spec = sinh_tilde(1000);
        let est = estimate_exponent(spec.zero_sequence(), 5.0, 500.0).unwrap();
        assert!((0.9..=1.1).contains(&est.gamma_hat), "{}", est.gamma_hat);
        assert!(est.counting_pairs.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn logarithmic_counting_exponent() {
        let zeros: Vec<Complex64> = (1..=40).flat_map(|k| {
            let r = 2f64.powi(k);
            [c(r, 0.0), c(-r, 0.0)]
        }).collect();
        let seq = ZeroSequence::constructed(zeros, Pairing::None).unwrap();
        let est = estimate_exponent(&seq, 16.0, 2f64.powi(30)).unwrap();
        assert!(est.gamma_hat.abs() < 0.2, "{}", est.gamma_hat);
    }

    #[test]
    fn exponent_needs_ten_zeros() {
        let seq = ZeroSequence::constructed((1..=9).map(|k| c(k as f64, 0.0)).collect(), Pairing::None).unwrap();
        assert_eq!(
            estimate_exponent(&seq, 0.5, 100.0).unwrap_err(),
            Error::InsufficientZerosInRange { found: 9, needed: 10 }
        );
    }

    #[test]
    fn borel_consistency() {
        let spec = sinh_tilde(2000);
        let order = estimate_order(&spec, 10.0, 200.0, 12, 4000).unwrap().slope;
        let exponent = estimate_exponent(spec.zero_sequence(), 5.0, 500.0).unwrap().gamma_hat;
        assert!((order - exponent).abs() <= 0.2);
    }

    #[test]
    fn simple_zero_and_empty_disk() {
        let spec = sinh_tilde(2000);
        let one = verify_multiplicity(&spec, c(1.0, 1.0), 0.3, DEFAULT_NODES, 4000).unwrap();
        assert_eq!(one.winding, 1);
        assert!((one.raw_integral - c(1.0, 0.0)).norm() < 1e-10);
        let none = verify_multiplicity(&spec, c(1.0, 0.5), 0.2, DEFAULT_NODES, 4000).unwrap();
        assert_eq!(none.winding, 0);
    }

    #[test]
    fn duplicated_zero_winds_twice() {
        let spec = from_zeros(vec![c(1.0, 1.0), c(1.0, 1.0), c(1.0, -1.0)]);
        let r = verify_multiplicity(&spec, c(1.0, 1.0), 0.3, DEFAULT_NODES, 3).unwrap();
        assert_eq!(r.winding, 2);
    }

    #[test]
    fn winding_is_additive() {
        let zeros = vec![c(0.2, 0.1), c(-0.3, 0.4), c(0.5, -0.5), c(5.0, 5.0)];
        let spec = from_zeros(zeros.clone());
        for (m, radius) in [(0usize, 0.1), (1, 0.3), (2, 0.6), (3, 0.9)] {
            let centre = if m == 0 { c(-2.0, -2.0) } else { c(0.0, 0.0) };
            let inside = zeros.iter().filter(|z| (*z - centre).norm() < radius).count();
            let r = verify_multiplicity(&spec, centre, radius, DEFAULT_NODES, 4).unwrap();
            assert_eq!(r.winding as usize, inside);
            assert_eq!(inside, m);
        }
    }

    #[test]
    fn contour_through_zero_is_rejected() {
        let spec = from_zeros(vec![c(1.0, 0.0)]);
        assert!(matches!(
            verify_multiplicity(&spec, c(0.0, 0.0), 1.0, 64, 1),
            Err(Error::ContourThroughZero { .. })
        ));
    }

    #[test]
    fn coarse_quadrature_is_unresolved() {
        // Eight nodes give 1 / (1 - 0.87^8), about 1.49, for a zero at 0.87.
        let spec = from_zeros(vec![c(0.87, 0.0)]);
        assert!(matches!(
            verify_multiplicity(&spec, c(0.0, 0.0), 1.0, 8, 1),
            Err(Error::QuadratureUnresolved { .. })
        ));
    }
}
