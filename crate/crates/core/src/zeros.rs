//! Zero sequences, function specifications and class validation.
//!
//! A [`ZeroSequence`] is a finite list standing in for an infinite zero set.
//! Its pairing groups fix the order in which per-factor contributions are
//! summed everywhere else in the crate, so conditionally convergent genus-0
//! products over `xi + i tau` zeros are always accumulated pair by pair.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::primary::log_scaled_factor;
use crate::summation::{sum_complex_by, Neumaier};

/// Fewer pairing groups than this is treated as a finite (polynomial) zero set:
/// tail fits are skipped and asymptotic checks pass vacuously.
pub const MIN_FIT_GROUPS: usize = 8;

/// Slope threshold on the fitted tail exponent for the three-valued verdicts.
pub const SLOPE_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroOrdering {
    ByModulus,
    AsGiven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    None,
    ConjugatePairs,
    SymmetricAboutCenter,
}

/// The four classes: genus 0 (`Y`, `YTilde`) and genus 1 (`L`, `LBar`); the
/// tilde/bar classes carry all zeros on `Re s = xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionClass {
    Y,
    L,
    YTilde,
    LBar,
}

impl FunctionClass {
    pub fn genus(self) -> u32 {
        match self {
            FunctionClass::Y | FunctionClass::YTilde => 0,
            FunctionClass::L | FunctionClass::LBar => 1,
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, FunctionClass::YTilde | FunctionClass::LBar)
    }
}

macro_rules! keyword_enum {
    ($ty:ty { $($variant:path => $name:literal),+ $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($variant),)+
                    other => Err(Error::InvalidArgument(format!(
                        "unknown {} '{}'", stringify!($ty), other
                    ))),
                }
            }
        }
    };
}

keyword_enum!(ZeroOrdering { ZeroOrdering::ByModulus => "by_modulus", ZeroOrdering::AsGiven => "as_given" });
keyword_enum!(Pairing {
    Pairing::None => "none",
    Pairing::ConjugatePairs => "conjugate_pairs",
    Pairing::SymmetricAboutCenter => "symmetric_about_center",
});
keyword_enum!(FunctionClass {
    FunctionClass::Y => "Y",
    FunctionClass::L => "L",
    FunctionClass::YTilde => "Y_tilde",
    FunctionClass::LBar => "L_bar",
});

/// Indices of the zeros summed together; `second > first` when present.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorGroup {
    pub first: usize,
    pub second: Option<usize>,
}

impl FactorGroup {
    /// Members with index below the truncation `n`.
    pub fn retained(self, n: usize) -> impl Iterator<Item = usize> {
        std::iter::once(self.first)
            .chain(self.second)
            .filter(move |&i| i < n)
    }
}

/// Canonical sort key: modulus ascending, ties by `Im` descending then `Re` ascending.
pub fn modulus_order(a: &Complex64, b: &Complex64) -> Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then_with(|| b.im.total_cmp(&a.im))
        .then_with(|| a.re.total_cmp(&b.re))
}

#[derive(Debug, Clone)]
pub struct ZeroSequence {
    zeros: Vec<Complex64>,
    ordering: ZeroOrdering,
    pairing: Pairing,
    source: String,
    groups: Vec<FactorGroup>,
}

impl ZeroSequence {
    /// Builds a sequence, sorting it when `ordering` is `ByModulus` and
    /// resolving the pairing groups. Zero entries are accepted here so that
    /// [`validate_zero_sequence`] can report them; specs reject them.
    pub fn new(
        mut zeros: Vec<Complex64>,
        ordering: ZeroOrdering,
        pairing: Pairing,
        source: impl Into<String>,
    ) -> Result<Self> {
        if let Some(bad) = zeros.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidSpec(format!("non-finite zero {bad}")));
        }
        if ordering == ZeroOrdering::ByModulus {
            zeros.sort_by(modulus_order);
        }
        let groups = build_groups(&zeros, ordering, pairing)?;
        Ok(Self {
            zeros,
            ordering,
            pairing,
            source: source.into(),
            groups,
        })
    }

    pub fn constructed(zeros: Vec<Complex64>, pairing: Pairing) -> Result<Self> {
        Self::new(zeros, ZeroOrdering::ByModulus, pairing, "constructed")
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn ordering(&self) -> ZeroOrdering {
        self.ordering
    }

    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn groups(&self) -> &[FactorGroup] {
        &self.groups
    }

    /// Groups that have at least one member below the truncation `n`.
    pub fn groups_within(&self, n: usize) -> &[FactorGroup] {
        let end = self.groups.partition_point(|g| g.first < n);
        &self.groups[..end]
    }

    /// Groups lying entirely at or beyond `n`, plus a partially retained one
    /// if the truncation splits a pair.
    fn tail_groups(&self, n: usize) -> (usize, Vec<usize>) {
        let end = self.groups.partition_point(|g| g.first < n);
        let split = self.groups[..end]
            .iter()
            .filter_map(|g| g.second.filter(|&j| j >= n))
            .collect();
        (end, split)
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }
}

fn build_groups(zeros: &[Complex64], ordering: ZeroOrdering, pairing: Pairing) -> Result<Vec<FactorGroup>> {
    if pairing == Pairing::None {
        return Ok((0..zeros.len())
            .map(|first| FactorGroup { first, second: None })
            .collect());
    }
    let mut matched = vec![false; zeros.len()];
    let mut groups = Vec::with_capacity(zeros.len() / 2 + 1);
    for i in 0..zeros.len() {
        if matched[i] {
            continue;
        }
        matched[i] = true;
        let z = zeros[i];
        if z.im == 0.0 {
            if pairing == Pairing::SymmetricAboutCenter {
                return Err(Error::InvalidSpec(format!(
                    "zero {z} lies on the real axis and has no symmetric partner"
                )));
            }
            groups.push(FactorGroup { first: i, second: None });
            continue;
        }
        let partner = z.conj();
        let found = match ordering {
            ZeroOrdering::AsGiven => (i + 1 < zeros.len() && !matched[i + 1] && zeros[i + 1] == partner)
                .then_some(i + 1),
            // Conjugates share a modulus, so the partner sits in the same tie block.
            ZeroOrdering::ByModulus => {
                let modulus = z.norm();
                (i + 1..zeros.len())
                    .take_while(|&j| zeros[j].norm() == modulus)
                    .find(|&j| !matched[j] && zeros[j] == partner)
            }
        };
        match found {
            Some(j) => {
                matched[j] = true;
                groups.push(FactorGroup { first: i, second: Some(j) });
            }
            None => {
                return Err(Error::InvalidSpec(format!(
                    "zero {z} has no {} partner",
                    if pairing == Pairing::ConjugatePairs { "conjugate" } else { "symmetric" }
                )))
            }
        }
    }
    Ok(groups)
}

/// True when the multiset of `taus` equals the multiset of `-taus`.
pub fn is_sign_symmetric(taus: &[f64]) -> bool {
    let mut sorted = taus.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    (0..n).all(|i| sorted[i] == -sorted[n - 1 - i])
}

// ---------------------------------------------------------------------------
// Validation and tail modelling
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub verdict: Verdict,
    pub measured: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub overall: Verdict,
}

impl ValidationReport {
    fn from_checks(checks: Vec<Check>) -> Self {
        let overall = if checks.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if checks.iter().any(|c| c.verdict == Verdict::Indeterminate) {
            Verdict::Indeterminate
        } else {
            Verdict::Pass
        };
        Self { checks, overall }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Power-law fit `term_g ~ C g^q` over the last half of a group-term series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    /// Fitted exponent of the terms; the tail sum then scales like `g^(q + 1)`.
    pub term_exponent: f64,
    pub log_coefficient: f64,
    pub verdict: Verdict,
    /// Estimated sum of the terms beyond the available data (only for `Pass`).
    pub extrapolated: f64,
}

/// Least-squares slope and intercept of `y` against `x`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Fits the series of per-group terms. `None` for finite-like data
/// (fewer than [`MIN_FIT_GROUPS`] groups).
pub fn fit_tail(terms: &[f64]) -> Option<TailFit> {
    let count = terms.len();
    if count < MIN_FIT_GROUPS {
        return None;
    }
    let start = count / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (start..count)
        .filter(|&g| terms[g] > 0.0 && terms[g].is_finite())
        .map(|g| (((g + 1) as f64).ln(), terms[g].ln()))
        .unzip();
    if xs.is_empty() && terms[start..].iter().all(|&t| t == 0.0) {
        // Exact cancellation in every late group.
        return Some(TailFit {
            term_exponent: f64::NEG_INFINITY,
            log_coefficient: f64::NEG_INFINITY,
            verdict: Verdict::Pass,
            extrapolated: 0.0,
        });
    }
    if xs.len() < 4 {
        return Some(TailFit {
            term_exponent: f64::NAN,
            log_coefficient: f64::NAN,
            verdict: Verdict::Indeterminate,
            extrapolated: f64::NAN,
        });
    }
    let (q, log_c, _) = linear_fit(&xs, &ys);
    let tail_exponent = q + 1.0;
    let verdict = if tail_exponent < -SLOPE_THRESHOLD {
        Verdict::Pass
    } else if tail_exponent > SLOPE_THRESHOLD {
        Verdict::Fail
    } else {
        Verdict::Indeterminate
    };
    let extrapolated = if verdict == Verdict::Pass {
        // Integral of C x^q from the midpoint past the last group.
        log_c.exp() * (count as f64 + 0.5).powf(tail_exponent) / -tail_exponent
    } else {
        f64::NAN
    };
    Some(TailFit {
        term_exponent: q,
        log_coefficient: log_c,
        verdict,
        extrapolated,
    })
}

/// Per-group terms of `sum |sigma|^(-power)`. With `paired`, a two-member group
/// contributes `|sigma_1^(-power) + sigma_2^(-power)|` instead of the sum of moduli.
pub fn group_terms(seq: &ZeroSequence, power: i32, paired: bool) -> Vec<f64> {
    let z = seq.zeros();
    seq.groups()
        .iter()
        .map(|g| match (g.second, paired) {
            (Some(j), true) => (z[g.first].powi(-power) + z[j].powi(-power)).norm(),
            _ => g.retained(usize::MAX).map(|i| z[i].norm().powi(-power)).sum(),
        })
        .collect()
}

#[derive(Debug, Clone)]
struct SeriesTail {
    /// `suffix[g] = sum_{h >= g} terms[h]`; one extra trailing zero.
    suffix: Vec<f64>,
    fit: Option<TailFit>,
    power: i32,
}

impl SeriesTail {
    fn new(seq: &ZeroSequence, power: i32, paired: bool) -> Self {
        let terms = group_terms(seq, power, paired);
        let mut suffix = vec![0.0; terms.len() + 1];
        let mut acc = Neumaier::default();
        for g in (0..terms.len()).rev() {
            acc.add(terms[g]);
            suffix[g] = acc.value();
        }
        Self {
            suffix,
            fit: fit_tail(&terms),
            power,
        }
    }

    /// Measured tail beyond the truncation plus the extrapolated remainder.
    fn beyond(&self, seq: &ZeroSequence, n: usize) -> Option<f64> {
        let extrapolated = match self.fit {
            None => 0.0,
            Some(fit) if fit.verdict == Verdict::Pass => fit.extrapolated,
            Some(_) => return None,
        };
        let (end, split) = seq.tail_groups(n);
        let partial: f64 = split
            .iter()
            .map(|&j| seq.zeros()[j].norm().powi(-self.power))
            .sum();
        Some(self.suffix[end] + partial + extrapolated)
    }
}

/// Tail estimates for the truncated products of one spec.
#[derive(Debug, Clone)]
pub struct TailModel {
    genus: u32,
    first_order: Option<SeriesTail>,
    second_order: SeriesTail,
}

impl TailModel {
    fn new(seq: &ZeroSequence, genus: u32) -> Self {
        let paired = seq.pairing() != Pairing::None;
        Self {
            genus,
            first_order: (genus == 0).then(|| SeriesTail::new(seq, 1, paired)),
            second_order: SeriesTail::new(seq, 2, false),
        }
    }

    /// Relative modulus error estimate for dropping every factor at index
    /// `>= n`: `exp(|s|^2 T2) - 1` for genus 1 and `exp(|s| T1 + |s|^2 T2) - 1`
    /// for genus 0. `None` when a required tail fit is not convergent.
    pub fn tail_bound(&self, seq: &ZeroSequence, s: Complex64, n: usize) -> Option<f64> {
        let r = s.norm();
        let second = self.second_order.beyond(seq, n)?;
        let first = match (&self.first_order, self.genus) {
            (Some(tail), 0) => tail.beyond(seq, n)?,
            _ => 0.0,
        };
        Some((r * first + r * r * second).exp_m1())
    }
}

/// Checks the finite-data surrogates of the canonical-product conditions.
pub fn validate_zero_sequence(seq: &ZeroSequence, genus: u32) -> Result<ValidationReport> {
    if seq.is_empty() {
        return Err(Error::EmptyZeroSet);
    }
    if genus > 1 {
        return Err(Error::InvalidArgument(format!("genus must be 0 or 1, got {genus}")));
    }
    let zeros = seq.zeros();
    let mut checks = Vec::with_capacity(4);

    let zero_count = zeros.iter().filter(|z| z.norm() == 0.0).count();
    checks.push(Check {
        name: "nonzero",
        verdict: if zero_count == 0 { Verdict::Pass } else { Verdict::Fail },
        measured: zero_count as f64,
    });

    let descents = zeros.windows(2).filter(|w| w[1].norm() < w[0].norm()).count();
    checks.push(Check {
        name: "modulus_ordering",
        verdict: if descents == 0 { Verdict::Pass } else { Verdict::Fail },
        measured: descents as f64,
    });

    let paired = genus == 0 && seq.pairing() != Pairing::None;
    let terms = group_terms(seq, genus as i32 + 1, paired);
    let partial = crate::summation::sum_real(&terms);
    let verdict = if zero_count > 0 {
        Verdict::Fail
    } else {
        fit_tail(&terms).map_or(Verdict::Pass, |f| f.verdict)
    };
    checks.push(Check {
        name: "convergence_series",
        verdict,
        measured: partial,
    });

    let (verdict, slope) = if zeros.len() < MIN_FIT_GROUPS {
        (Verdict::Pass, f64::NAN)
    } else {
        let start = zeros.len() / 2;
        let (xs, ys): (Vec<f64>, Vec<f64>) = (start..zeros.len())
            .filter(|&k| zeros[k].norm() > 0.0)
            .map(|k| (((k + 1) as f64).ln(), zeros[k].norm().ln()))
            .unzip();
        if xs.len() < 4 {
            (Verdict::Indeterminate, f64::NAN)
        } else {
            let (slope, _, _) = linear_fit(&xs, &ys);
            let verdict = if slope > SLOPE_THRESHOLD {
                Verdict::Pass
            } else if slope < -SLOPE_THRESHOLD {
                Verdict::Fail
            } else {
                Verdict::Indeterminate
            };
            (verdict, slope)
        }
    };
    checks.push(Check {
        name: "divergence_to_infinity",
        verdict,
        measured: slope,
    });

    Ok(ValidationReport::from_checks(checks))
}

// ---------------------------------------------------------------------------
// Function specifications
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EntireFunctionSpec {
    class: FunctionClass,
    value_at_zero: Complex64,
    q: Complex64,
    center: Option<f64>,
    zeros: ZeroSequence,
    anchor_truncation: Option<usize>,
    tail: OnceLock<TailModel>,
}

impl EntireFunctionSpec {
    pub fn new(
        class: FunctionClass,
        value_at_zero: Complex64,
        q: Complex64,
        center: Option<f64>,
        zeros: ZeroSequence,
    ) -> Result<Self> {
        if value_at_zero == Complex64::new(0.0, 0.0) || !value_at_zero.norm().is_finite() {
            return Err(Error::InvalidSpec("S(0) must be finite and nonzero".into()));
        }
        if !q.norm().is_finite() {
            return Err(Error::InvalidSpec("Q must be finite".into()));
        }
        if class.genus() == 0 && q != Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidSpec(format!("class {class} has genus 0; Q must be 0")));
        }
        if zeros.zeros().iter().any(|z| z.norm() == 0.0) {
            return Err(Error::InvalidSpec("zero sequence contains sigma = 0".into()));
        }
        if let Some(xi) = center {
            if xi == 0.0 || !xi.is_finite() {
                return Err(Error::InvalidCenter);
            }
        }
        if class.is_symmetric() {
            let xi = center.ok_or(Error::InvalidCenter)?;
            for z in zeros.zeros() {
                if z.re != xi {
                    return Err(Error::InvalidSpec(format!(
                        "class {class} requires Re sigma = {xi}, found {z}"
                    )));
                }
                if z.im == 0.0 {
                    return Err(Error::ZeroImaginaryPart);
                }
            }
        }
        Ok(Self {
            class,
            value_at_zero,
            q,
            center,
            zeros,
            anchor_truncation: None,
            tail: OnceLock::new(),
        })
    }

    pub fn class(&self) -> FunctionClass {
        self.class
    }

    pub fn genus(&self) -> u32 {
        self.class.genus()
    }

    pub fn value_at_zero(&self) -> Complex64 {
        self.value_at_zero
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn center(&self) -> Option<f64> {
        self.center
    }

    pub fn zero_sequence(&self) -> &ZeroSequence {
        &self.zeros
    }

    pub fn zeros(&self) -> &[Complex64] {
        self.zeros.zeros()
    }

    pub fn available(&self) -> usize {
        self.zeros.len()
    }

    /// Truncation at which `value_at_zero` was derived from a value at the
    /// center, when the spec was built by [`make_symmetric_spec`].
    pub fn anchor_truncation(&self) -> Option<usize> {
        self.anchor_truncation
    }

    /// `Im sigma_k` of the first `n` zeros.
    pub fn taus(&self, n: usize) -> Vec<f64> {
        self.zeros()[..n.min(self.available())]
            .iter()
            .map(|z| z.im)
            .collect()
    }

    pub fn tail_model(&self) -> &TailModel {
        self.tail
            .get_or_init(|| TailModel::new(&self.zeros, self.genus()))
    }

    pub fn check_truncation(&self, n_terms: usize) -> Result<()> {
        if n_terms > self.available() {
            return Err(Error::InsufficientZeros {
                requested: n_terms,
                available: self.available(),
            });
        }
        Ok(())
    }
}

/// Builds a `Y_tilde` / `L_bar` spec from ordinates `taus` on `Re s = xi`,
/// fixing `S(0)` so that the product over all supplied zeros takes the value
/// `value_at_center` at `s = xi`.
pub fn make_symmetric_spec(
    xi: f64,
    taus: &[f64],
    value_at_center: Complex64,
    class: FunctionClass,
    q: Complex64,
) -> Result<EntireFunctionSpec> {
    if xi == 0.0 || !xi.is_finite() {
        return Err(Error::InvalidCenter);
    }
    if !class.is_symmetric() {
        return Err(Error::InvalidArgument(format!(
            "class {class} is not a critical-line class"
        )));
    }
    if taus.contains(&0.0) {
        return Err(Error::ZeroImaginaryPart);
    }
    if taus.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidSpec("non-finite tau".into()));
    }
    if value_at_center == Complex64::new(0.0, 0.0) || !value_at_center.norm().is_finite() {
        return Err(Error::InvalidSpec("S(xi) must be finite and nonzero".into()));
    }
    let pairing = if is_sign_symmetric(taus) {
        Pairing::SymmetricAboutCenter
    } else {
        Pairing::None
    };
    let zeros = taus.iter().map(|&t| Complex64::new(xi, t)).collect();
    let seq = ZeroSequence::constructed(zeros, pairing)?;
    let genus = class.genus();
    let s = Complex64::new(xi, 0.0);
    let z = seq.zeros();
    // tau != 0 keeps xi off every zero, so no factor vanishes.
    let log_product = sum_complex_by(seq.groups(), |g| {
        g.retained(usize::MAX)
            .map(|i| log_scaled_factor(s, z[i], genus).expect("xi is not a zero"))
            .sum()
    });
    let log_at_center = log_product + if genus == 1 { q * s } else { Complex64::new(0.0, 0.0) };
    let value_at_zero = value_at_center * (-log_at_center).exp();
    let n = seq.len();
    let mut spec = EntireFunctionSpec::new(class, value_at_zero, q, Some(xi), seq)?;
    spec.anchor_truncation = Some(n);
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus_minus(k_max: usize) -> Vec<f64> {
        (1..=k_max).flat_map(|k| [k as f64, -(k as f64)]).collect()
    }

    #[test]
    fn tie_break_orders_conjugates() {
        let seq = ZeroSequence::constructed(vec![c(1.0, -1.0), c(2.0, 0.0), c(1.0, 1.0)], Pairing::None).unwrap();
        assert_eq!(seq.zeros(), &[c(1.0, 1.0), c(1.0, -1.0), c(2.0, 0.0)]);
    }

    #[test]
    fn conjugate_pairs_resolved_inside_tie_blocks() {
        let zs = vec![c(3.0, 4.0), c(4.0, 3.0), c(3.0, -4.0), c(4.0, -3.0), c(-5.0, 0.0)];
        let seq = ZeroSequence::constructed(zs, Pairing::ConjugatePairs).unwrap();
        for g in seq.groups() {
            if let Some(j) = g.second {
                assert_eq!(seq.zeros()[j], seq.zeros()[g.first].conj());
            } else {
                assert_eq!(seq.zeros()[g.first].im, 0.0);
            }
        }
        assert_eq!(seq.groups().len(), 3);
    }

    #[test]
    fn as_given_pairs_must_be_consecutive() {
        let ok = ZeroSequence::new(vec![c(1.0, 1.0), c(1.0, -1.0)], ZeroOrdering::AsGiven, Pairing::ConjugatePairs, "t");
        assert!(ok.is_ok());
        let bad = ZeroSequence::new(
            vec![c(1.0, 1.0), c(2.0, 2.0), c(1.0, -1.0), c(2.0, -2.0)],
            ZeroOrdering::AsGiven,
            Pairing::ConjugatePairs,
            "t",
        );
        assert!(bad.is_err());
        let real_in_symmetric = ZeroSequence::constructed(vec![c(2.0, 0.0)], Pairing::SymmetricAboutCenter);
        assert!(real_in_symmetric.is_err());
    }

    #[test]
    fn basel_partial_sum_for_imaginary_integers() {
        let zs: Vec<Complex64> = (1..=1000).flat_map(|k| [c(0.0, k as f64), c(0.0, -(k as f64))]).collect();
        let seq = ZeroSequence::constructed(zs, Pairing::ConjugatePairs).unwrap();
        let report = validate_zero_sequence(&seq, 1).unwrap();
        // Brute-force oracle, summed from the small end of the tail upward.
        let oracle: f64 = 2.0 * (1..=1000).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum::<f64>();
        let conv = report.check("convergence_series").unwrap();
        assert!((conv.measured - oracle).abs() < 1e-12);
        assert!((conv.measured - 3.287_869_133_363_12).abs() < 1e-10);
        assert!(conv.measured < std::f64::consts::PI.powi(2) / 3.0);
        assert_eq!(conv.verdict, Verdict::Pass);
        assert_eq!(report.overall, Verdict::Pass);
    }

    #[test]
    fn single_zero_passes_everything() {
        let seq = ZeroSequence::constructed(vec![c(1.0, 1.0)], Pairing::None).unwrap();
        let report = validate_zero_sequence(&seq, 0).unwrap();
        assert_eq!(report.overall, Verdict::Pass);
        let conv = report.check("convergence_series").unwrap();
        assert!((conv.measured - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_entry_fails_nonzero_check() {
        let seq = ZeroSequence::constructed(vec![c(0.0, 0.0), c(1.0, 0.0)], Pairing::None).unwrap();
        let report = validate_zero_sequence(&seq, 0).unwrap();
        assert_eq!(report.check("nonzero").unwrap().verdict, Verdict::Fail);
        assert_eq!(report.overall, Verdict::Fail);
    }

    #[test]
    fn empty_sequence_is_an_error() {
        let seq = ZeroSequence::constructed(vec![], Pairing::None).unwrap();
        assert_eq!(validate_zero_sequence(&seq, 0), Err(Error::EmptyZeroSet));
        let one = ZeroSequence::constructed(vec![c(1.0, 0.0)], Pairing::None).unwrap();
        assert!(validate_zero_sequence(&one, 2).is_err());
    }

    #[test]
    fn as_given_descent_fails_ordering() {
        let seq = ZeroSequence::new(vec![c(3.0, 0.0), c(1.0, 0.0)], ZeroOrdering::AsGiven, Pairing::None, "t").unwrap();
        let report = validate_zero_sequence(&seq, 0).unwrap();
        assert_eq!(report.check("modulus_ordering").unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn symmetric_spec_verdicts_by_genus_and_pairing() {
        let taus = plus_minus(500);
        let spec = make_symmetric_spec(1.0, &taus, c(1.0, 0.0), FunctionClass::YTilde, c(0.0, 0.0)).unwrap();
        assert_eq!(spec.zero_sequence().pairing(), Pairing::SymmetricAboutCenter);
        let paired = validate_zero_sequence(spec.zero_sequence(), 0).unwrap();
        assert_eq!(paired.check("convergence_series").unwrap().verdict, Verdict::Pass);
        assert_eq!(validate_zero_sequence(spec.zero_sequence(), 1).unwrap().overall, Verdict::Pass);

        let unpaired = ZeroSequence::constructed(spec.zeros().to_vec(), Pairing::None).unwrap();
        let report = validate_zero_sequence(&unpaired, 0).unwrap();
        assert_ne!(report.check("convergence_series").unwrap().verdict, Verdict::Pass);
        assert_eq!(report.check("divergence_to_infinity").unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn symmetric_spec_single_factor_inversion() {
        let spec = make_symmetric_spec(1.0, &[1.0], c(1.0, 0.0), FunctionClass::YTilde, c(0.0, 0.0)).unwrap();
        assert_eq!(spec.zeros(), &[c(1.0, 1.0)]);
        // S(0) = 1 / (1 - 1/(1+i)) = 2/(1+i) = 1 - i.
        let oracle = c(1.0, 0.0) / (c(1.0, 0.0) - c(1.0, 0.0) / c(1.0, 1.0));
        assert!((spec.value_at_zero() - oracle).norm() < 1e-15);
        assert!((spec.value_at_zero() - c(1.0, -1.0)).norm() < 1e-15);
        assert_eq!(spec.anchor_truncation(), Some(1));
    }

    #[test]
    fn symmetric_spec_errors() {
        assert_eq!(
            make_symmetric_spec(0.0, &[1.0], c(1.0, 0.0), FunctionClass::YTilde, c(0.0, 0.0)).unwrap_err(),
            Error::InvalidCenter
        );
        assert_eq!(
            make_symmetric_spec(1.0, &[1.0, 0.0], c(1.0, 0.0), FunctionClass::YTilde, c(0.0, 0.0)).unwrap_err(),
            Error::ZeroImaginaryPart
        );
        assert!(make_symmetric_spec(1.0, &[1.0], c(1.0, 0.0), FunctionClass::YTilde, c(0.1, 0.0)).is_err());
        assert!(make_symmetric_spec(1.0, &[1.0], c(1.0, 0.0), FunctionClass::L, c(0.0, 0.0)).is_err());
        assert!(make_symmetric_spec(1.0, &[1.0], c(1.0, 0.0), FunctionClass::LBar, c(0.1, 0.0)).is_ok());
    }

    #[test]
    fn spec_invariants_enforced() {
        let seq = || ZeroSequence::constructed(vec![c(2.0, 1.0)], Pairing::None).unwrap();
        assert!(EntireFunctionSpec::new(FunctionClass::Y, c(0.0, 0.0), c(0.0, 0.0), None, seq()).is_err());
        assert!(EntireFunctionSpec::new(FunctionClass::Y, c(1.0, 0.0), c(1.0, 0.0), None, seq()).is_err());
        assert!(EntireFunctionSpec::new(FunctionClass::L, c(1.0, 0.0), c(1.0, 0.0), None, seq()).is_ok());
        assert!(EntireFunctionSpec::new(FunctionClass::YTilde, c(1.0, 0.0), c(0.0, 0.0), None, seq()).is_err());
        assert!(EntireFunctionSpec::new(FunctionClass::YTilde, c(1.0, 0.0), c(0.0, 0.0), Some(1.0), seq()).is_err());
        assert!(EntireFunctionSpec::new(FunctionClass::YTilde, c(1.0, 0.0), c(0.0, 0.0), Some(2.0), seq()).is_ok());
        let with_zero = ZeroSequence::constructed(vec![c(0.0, 0.0)], Pairing::None).unwrap();
        assert!(EntireFunctionSpec::new(FunctionClass::L, c(1.0, 0.0), c(0.0, 0.0), None, with_zero).is_err());
    }

    #[test]
    fn sign_symmetry_is_a_multiset_test() {
        assert!(is_sign_symmetric(&[1.0, -1.0, 2.0, -2.0]));
        assert!(is_sign_symmetric(&[]));
        assert!(!is_sign_symmetric(&[1.0, 2.0]));
        assert!(!is_sign_symmetric(&[1.0, 1.0, -1.0]));
    }

    #[test]
    fn keyword_round_trip() {
        for class in [FunctionClass::Y, FunctionClass::L, FunctionClass::YTilde, FunctionClass::LBar] {
            assert_eq!(class.to_string().parse::<FunctionClass>().unwrap(), class);
        }
        assert_eq!("symmetric_about_center".parse::<Pairing>().unwrap(), Pairing::SymmetricAboutCenter);
        assert!("sideways".parse::<ZeroOrdering>().is_err());
    }

    #[test]
    fn tail_bound_shrinks_with_truncation() {
        let spec = make_symmetric_spec(1.0, &plus_minus(2000), c(1.0, 0.0), FunctionClass::YTilde, c(0.0, 0.0)).unwrap();
        let tail = spec.tail_model();
        let s = c(1.5, 0.5);
        let b100 = tail.tail_bound(spec.zero_sequence(), s, 100).unwrap();
        let b1000 = tail.tail_bound(spec.zero_sequence(), s, 1000).unwrap();
        let b_all = tail.tail_bound(spec.zero_sequence(), s, 4000).unwrap();
        assert!(b100 > b1000 && b1000 > b_all && b_all > 0.0);

        let unpaired = ZeroSequence::constructed(spec.zeros().to_vec(), Pairing::None).unwrap();
        let spec = EntireFunctionSpec::new(FunctionClass::YTilde, c(1.0, 0.0), c(0.0, 0.0), Some(1.0), unpaired).unwrap();
        assert!(spec.tail_model().tail_bound(spec.zero_sequence(), s, 100).is_none());
    }

    #[test]
    fn fit_recovers_power_law() {
        let terms: Vec<f64> = (1..=400).map(|g| 3.0 * (g as f64).powf(-2.5)).collect();
        let fit = fit_tail(&terms).unwrap();
        assert!((fit.term_exponent + 2.5).abs() < 1e-12);
        assert!((fit.log_coefficient - 3f64.ln()).abs() < 1e-10);
        assert_eq!(fit.verdict, Verdict::Pass);
        let harmonic: Vec<f64> = (1..=400).map(|g| 1.0 / g as f64).collect();
        assert_eq!(fit_tail(&harmonic).unwrap().verdict, Verdict::Indeterminate);
        let flat = vec![1.0; 400];
        assert_eq!(fit_tail(&flat).unwrap().verdict, Verdict::Fail);
        assert!(fit_tail(&[1.0, 0.5]).is_none());
    }

    proptest::proptest! {
        #[test]
        fn normalization_yields_nondecreasing_moduli(raw in proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 0..200)) {
            let zs = raw.into_iter().map(|(a, b)| c(a, b)).collect();
            let seq = ZeroSequence::constructed(zs, Pairing::None).unwrap();
            proptest::prop_assert!(seq.zeros().windows(2).all(|w| w[0].norm() <= w[1].norm()));
        }

        #[test]
        fn symmetric_spec_keeps_center_exact(xi in -20.0f64..20.0, raw in proptest::collection::vec(0.01f64..100.0, 1..50)) {
            proptest::prop_assume!(xi != 0.0);
            let taus: Vec<f64> = raw.iter().flat_map(|&t| [t, -t]).collect();
            let spec = make_symmetric_spec(xi, &taus, c(1.0, 0.0), FunctionClass::LBar, c(0.0, 0.0)).unwrap();
            proptest::prop_assert!(spec.zeros().iter().all(|z| z.re == xi));
        }
    }
}
