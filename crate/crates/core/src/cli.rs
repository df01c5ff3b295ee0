//! Batch command line.
//!
//! Every run prints a command echo, one digest line per input file and then
//! numeric records of the form
//! `quantity=<name> value=<v> truncation=<N> tolerance=<t> [key=value ...]`.
//! Output is byte-identical for identical inputs; wall time is printed only
//! with `--timing`.

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::analysis::{estimate_exponent, estimate_order, verify_multiplicity, DEFAULT_NODES};
use crate::critical_line::{
    critical_line_profile, even_product_form, rotated_derivatives, scan_real_zeros, DEFAULT_SAMPLES_PER_UNIT,
};
use crate::error::{Error, Result};
use crate::io::{format_complex, format_real as fmt_real, load_spec, parse_complex, InputDigest};
use crate::product::{
    eval_centered_product, eval_product, eval_shifted_product, exponential_prefactor_residual, shift_constant_residual,
};
use crate::series::{eval_series, even_series, taylor_coefficients};
use crate::zeros::{is_sign_symmetric, EntireFunctionSpec, FunctionClass};

pub const DEFAULT_TERMS: usize = 10_000;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Taylor order used by the identity checks.
const IDENTITY_ORDER: usize = 30;

#[derive(Parser, Debug)]
#[command(name = "hadamard", version, about = "Truncated Hadamard products from zero data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Spec file (key = value, inline or referenced zero table).
    #[arg(long)]
    spec: PathBuf,
    /// Truncation N (number of zeros); default min(10000, available).
    #[arg(long)]
    terms: Option<usize>,
    /// Tolerance echoed in every record and used by verify-identity.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Append the wall time (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

fn complex_arg(text: &str) -> std::result::Result<Complex64, String> {
    parse_complex(text).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Truncated product S(s).
    Eval {
        #[command(flatten)]
        common: Common,
        /// Evaluation point, e.g. 1.3-0.4i.
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        s: Complex64,
    },
    /// Taylor coefficients about a center.
    Series {
        #[command(flatten)]
        common: Common,
        /// Expansion center; defaults to xi, or 0 without one.
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        center: Option<Complex64>,
        #[arg(long, default_value_t = 10)]
        order: usize,
        /// Also evaluate the series at this point.
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        at: Option<Complex64>,
        /// Even expansion about xi with odd coefficients forced to zero.
        #[arg(long)]
        even: bool,
    },
    /// Shifted-center product against the plain product.
    Shift {
        #[command(flatten)]
        common: Common,
        /// Shift point.
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        alpha: Complex64,
        /// Evaluation point, e.g. 1.3-0.4i.
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        s: Complex64,
    },
    /// Profile V(x) = S(xi + ix).
    Line {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        range: LineRange,
    },
    /// Real zeros of V by sign changes and bisection.
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        range: LineRange,
    },
    /// Growth order from the maximum modulus.
    Order {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10.0)]
        vmin: f64,
        #[arg(long, default_value_t = 200.0)]
        vmax: f64,
        #[arg(long, default_value_t = 12)]
        radii: usize,
    },
    /// Exponent of convergence from zero counting.
    Exponent {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5.0)]
        rmin: f64,
        #[arg(long, default_value_t = 500.0)]
        rmax: f64,
    },
    /// Winding number of S around a circle.
    Mult {
        #[command(flatten)]
        common: Common,
        /// Contour center.
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        center: Complex64,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
    },
    /// Residual report for one of the product, series and line identities.
    VerifyIdentity {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        theorem: Theorem,
    },
}

#[derive(Args, Debug)]
struct LineRange {
    #[arg(long, allow_hyphen_values = true)]
    xmin: f64,
    #[arg(long, allow_hyphen_values = true)]
    xmax: f64,
    /// Grid size; default 64 per unit length.
    #[arg(long)]
    samples: Option<usize>,
}

impl LineRange {
    fn samples(&self) -> usize {
        self.samples.unwrap_or_else(|| {
            let width = (self.xmax - self.xmin).abs();
            ((width * DEFAULT_SAMPLES_PER_UNIT as f64).ceil() as usize + 1).max(2)
        })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "UPPER")]
enum Theorem {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
}

/// Result of one invocation: exit code and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub quantity: String,
    pub value: String,
    pub extra: Vec<(String, String)>,
}

impl Record {
    fn new(quantity: impl Into<String>, value: impl Into<String>) -> Self {
        Self {
            quantity: quantity.into(),
            value: value.into(),
            extra: Vec::new(),
        }
    }

    fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.extra.push((key.to_string(), value.into()));
        self
    }
}

/// Every record is tagged with the truncation and tolerance of the run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub truncation: usize,
    pub tolerance: f64,
    pub records: Vec<Record>,
    pub wall_time: Option<f64>,
}

impl RunReport {
    pub fn render(&self) -> String {
        let mut out = format!("command=\"{}\"\n", self.command);
        for input in &self.inputs {
            out.push_str(&format!("input path={} sha256={}\n", input.path, input.sha256));
        }
        for r in &self.records {
            out.push_str(&format!(
                "quantity={} value={} truncation={} tolerance={}",
                r.quantity, r.value, self.truncation, fmt_real(self.tolerance)
            ));
            for (k, v) in &r.extra {
                out.push_str(&format!(" {k}={v}"));
            }
            out.push('\n');
        }
        if let Some(t) = self.wall_time {
            out.push_str(&format!("wall_time_s={t:.6}\n"));
        }
        out
    }
}

/// Runs the CLI on `args` (program name first) without touching the process
/// streams. Exit codes: 0 success, 1 validation or numerical failure, 2 usage.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let echo = std::iter::once("hadamard")
        .chain(args.iter().skip(1).map(String::as_str))
        .collect::<Vec<_>>()
        .join(" ");
    let start = Instant::now();
    match execute(cli.command, echo) {
        Ok((mut report, passed, timing)) => {
            if timing {
                report.wall_time = Some(start.elapsed().as_secs_f64());
            }
            Outcome {
                code: if passed { 0 } else { 1 },
                stdout: report.render(),
                stderr: String::new(),
            }
        }
        Err(e) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

struct Context {
    spec: EntireFunctionSpec,
    n: usize,
    report: RunReport,
}

impl Context {
    fn open(common: &Common, command: String) -> Result<Self> {
        if !(common.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", common.tol)));
        }
        let loaded = load_spec(&common.spec)?;
        let n = common.terms.unwrap_or(DEFAULT_TERMS.min(loaded.spec.available()));
        loaded.spec.check_truncation(n)?;
        Ok(Self {
            spec: loaded.spec,
            n,
            report: RunReport {
                command,
                inputs: loaded.inputs,
                truncation: n,
                tolerance: common.tol,
                records: Vec::new(),
                wall_time: None,
            },
        })
    }

    fn push(&mut self, record: Record) {
        self.report.records.push(record);
    }

    /// Records a residual against the tolerance and returns whether it passed.
    fn check(&mut self, quantity: &str, residual: f64) -> bool {
        let pass = residual <= self.report.tolerance;
        self.push(Record::new(quantity, fmt_real(residual)).with("status", if pass { "pass" } else { "fail" }));
        pass
    }
}

fn execute(command: Command, echo: String) -> Result<(RunReport, bool, bool)> {
    let common = match &command {
        Command::Eval { common, .. }
        | Command::Series { common, .. }
        | Command::Shift { common, .. }
        | Command::Line { common, .. }
        | Command::Scan { common, .. }
        | Command::Order { common, .. }
        | Command::Exponent { common, .. }
        | Command::Mult { common, .. }
        | Command::VerifyIdentity { common, .. } => common,
    };
    let timing = common.timing;
    let mut ctx = Context::open(common, echo)?;
    let mut passed = true;
    match &command {
        Command::Eval { s, .. } => {
            let e = eval_product(&ctx.spec, *s, ctx.n)?;
            ctx.push(Record::new("value", format_complex(e.value)).with("s", format_complex(*s)));
            if let Some(l) = e.log_value {
                ctx.push(Record::new("log_value", format_complex(l)));
            }
            let bound = e.tail_bound.map_or("indeterminate".to_string(), fmt_real);
            ctx.push(Record::new("tail_bound", bound));
            ctx.push(Record::new("nearest_zero_distance", fmt_real(e.nearest_zero_distance)).with("near_zero", e.near_zero.to_string()));
        }
        Command::Series { center, order, at, even, .. } => {
            let expansion = if *even {
                let es = even_series(&ctx.spec, *order, ctx.n)?;
                ctx.push(Record::new("max_odd_residual", fmt_real(es.max_odd())).with("max_even", fmt_real(es.max_even)));
                es.expansion
            } else {
                let c = center.unwrap_or(Complex64::new(ctx.spec.center().unwrap_or(0.0), 0.0));
                taylor_coefficients(&ctx.spec, c, *order, ctx.n)?
            };
            for (k, c) in expansion.coefficients.iter().enumerate() {
                ctx.push(Record::new("coefficient", format_complex(*c)).with("k", k.to_string()).with("center", format_complex(expansion.center)));
            }
            if let Some(s) = at {
                ctx.push(Record::new("series_value", format_complex(eval_series(&expansion, *s))).with("s", format_complex(*s)));
            }
        }
        Command::Shift { alpha, s, .. } => {
            let shifted = eval_shifted_product(&ctx.spec, *alpha, *s, ctx.n)?.value;
            let plain = eval_product(&ctx.spec, *s, ctx.n)?.value;
            ctx.push(Record::new("shifted_value", format_complex(shifted)).with("alpha", format_complex(*alpha)).with("s", format_complex(*s)));
            ctx.push(Record::new("value", format_complex(plain)));
            ctx.push(Record::new("relative_disagreement", fmt_real(relative(shifted, plain))));
            ctx.push(Record::new("constant_residual", fmt_real(shift_constant_residual(&ctx.spec, *alpha, ctx.n)?)));
        }
        Command::Line { range, .. } => {
            let p = critical_line_profile(&ctx.spec, range.xmin, range.xmax, range.samples(), ctx.n)?;
            ctx.push(Record::new("v0", format_complex(p.v0)));
            ctx.push(Record::new("imag_max", fmt_real(p.imag_max)));
            for (x, v) in p.grid.iter().zip(&p.values) {
                ctx.push(Record::new("v", format_complex(*v)).with("x", fmt_real(*x)));
            }
        }
        Command::Scan { range, .. } => {
            let p = critical_line_profile(&ctx.spec, range.xmin, range.xmax, range.samples(), ctx.n)?;
            let found = scan_real_zeros(&p, &ctx.spec)?;
            ctx.push(Record::new("zero_count", found.zeros.len().to_string()));
            for z in &found.zeros {
                ctx.push(
                    Record::new("tau", fmt_real(z.tau))
                        .with("residual", fmt_real(z.residual))
                        .with("bracket", format!("[{},{}]", fmt_real(z.bracket.0), fmt_real(z.bracket.1))),
                );
            }
        }
        Command::Order { vmin, vmax, radii, .. } => {
            let est = estimate_order(&ctx.spec, *vmin, *vmax, *radii, ctx.n)?;
            ctx.push(Record::new("order", fmt_real(est.slope)).with("fit_rms", fmt_real(est.residual)).with("radii_used", est.radii.len().to_string()));
        }
        Command::Exponent { rmin, rmax, .. } => {
            let est = estimate_exponent(ctx.spec.zero_sequence(), *rmin, *rmax)?;
            ctx.push(Record::new("exponent", fmt_real(est.gamma_hat)).with("fit_rms", fmt_real(est.residual)));
        }
        Command::Mult { center, radius, nodes, .. } => {
            let m = verify_multiplicity(&ctx.spec, *center, *radius, *nodes, ctx.n)?;
            ctx.push(
                Record::new("winding", m.winding.to_string())
                    .with("raw", format_complex(m.raw_integral))
                    .with("center", format_complex(m.center))
                    .with("radius", fmt_real(m.radius)),
            );
        }
        Command::VerifyIdentity { theorem, .. } => {
            passed = verify(&mut ctx, *theorem)?;
            ctx.push(Record::new(format!("{theorem:?}"), if passed { "pass" } else { "fail" }));
        }
    }
    Ok((ctx.report, passed, timing))
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn require_class(spec: &EntireFunctionSpec, theorem: Theorem, class: FunctionClass) -> Result<()> {
    if spec.class() != class {
        return Err(Error::InvalidArgument(format!(
            "{theorem:?} applies to class {class}, spec has {}",
            spec.class()
        )));
    }
    Ok(())
}

/// Base point of the checks: `xi` when the spec has one, else 0.
fn base_point(spec: &EntireFunctionSpec) -> Complex64 {
    Complex64::new(spec.center().unwrap_or(0.0), 0.0)
}

/// Eight points on `|s - base| = 0.75`, offset from the axes.
fn probe_points(base: Complex64) -> Vec<Complex64> {
    (0..8)
        .map(|j| base + Complex64::from_polar(0.75, TAU * (j as f64 + 0.5) / 8.0))
        .collect()
}

fn max_over<F>(points: &[Complex64], f: F) -> Result<f64>
where
    F: Fn(Complex64) -> Result<f64>,
{
    points.iter().try_fold(0.0f64, |acc, &s| Ok(acc.max(f(s)?)))
}

fn verify(ctx: &mut Context, theorem: Theorem) -> Result<bool> {
    let spec = ctx.spec.clone();
    let n = ctx.n;
    let base = base_point(&spec);
    let points = probe_points(base);
    let mut ok = true;
    match theorem {
        Theorem::T1 | Theorem::T2 => {
            let alpha = base + Complex64::new(0.3, 0.2);
            let center = base + Complex64::new(0.1, -0.15);
            let shift = max_over(&points, |s| {
                Ok(relative(eval_shifted_product(&spec, alpha, s, n)?.value, eval_product(&spec, s, n)?.value))
            })?;
            ok &= ctx.check("shift_identity", shift);
            ok &= ctx.check("constant_residual", shift_constant_residual(&spec, alpha, n)?);
            let expansion = taylor_coefficients(&spec, center, IDENTITY_ORDER, n)?;
            let series = max_over(&points, |s| {
                let product = eval_shifted_product(&spec, alpha, s, n)?.value;
                Ok((eval_series(&expansion, s) - product).norm() / (1.0 + product.norm()))
            })?;
            ok &= ctx.check("series_identity", series);
            if theorem == Theorem::T2 {
                let prefactor = max_over(&points, |s| exponential_prefactor_residual(&spec, alpha, s, n))?;
                ok &= ctx.check("exponential_prefactor_residual", prefactor);
            }
        }
        Theorem::T3 | Theorem::T4 => {
            let class = if theorem == Theorem::T3 { FunctionClass::LBar } else { FunctionClass::YTilde };
            require_class(&spec, theorem, class)?;
            let centered = max_over(&points, |s| {
                Ok(relative(eval_centered_product(&spec, s, n)?.value, eval_product(&spec, s, n)?.value))
            })?;
            ok &= ctx.check("centered_identity", centered);
            let expansion = taylor_coefficients(&spec, base, IDENTITY_ORDER, n)?;
            let series = max_over(&points, |s| {
                let product = eval_centered_product(&spec, s, n)?.value;
                Ok((eval_series(&expansion, s) - product).norm() / (1.0 + product.norm()))
            })?;
            ok &= ctx.check("series_identity", series);
        }
        Theorem::T5 => {
            require_class(&spec, theorem, FunctionClass::YTilde)?;
            let es = even_series(&spec, IDENTITY_ORDER, n)?;
            ok &= ctx.check("odd_coefficient_ratio", es.max_odd() / es.max_even);
            let series = max_over(&points, |s| {
                let product = eval_centered_product(&spec, s, n)?.value;
                Ok((eval_series(&es.expansion, s) - product).norm() / (1.0 + product.norm()))
            })?;
            ok &= ctx.check("even_series_identity", series);
        }
        Theorem::T6 | Theorem::T7 => {
            let class = if theorem == Theorem::T6 { FunctionClass::LBar } else { FunctionClass::YTilde };
            require_class(&spec, theorem, class)?;
            let profile = critical_line_profile(&spec, -1.0, 1.0, 17, n)?;
            let s_xi = eval_product(&spec, base, n)?.value;
            ok &= ctx.check("v0_identity", relative(profile.v0, s_xi));
            let mut line = 0.0f64;
            for (&x, &v) in profile.grid.iter().zip(&profile.values) {
                let centered = eval_centered_product(&spec, base + Complex64::new(0.0, x), n)?.value;
                line = line.max((v - centered).norm() / (1.0 + v.norm()));
            }
            ok &= ctx.check("line_product_identity", line);
            let rd = rotated_derivatives(&spec, IDENTITY_ORDER, n)?;
            let mut series = 0.0f64;
            for (&x, &v) in profile.grid.iter().zip(&profile.values) {
                let mut term = 1.0;
                let mut sum = Complex64::new(0.0, 0.0);
                for (k, d) in rd.values.iter().enumerate() {
                    if k > 0 {
                        term *= x / k as f64;
                    }
                    sum += d * term;
                }
                series = series.max((sum - v).norm() / (1.0 + v.norm()));
            }
            ok &= ctx.check("line_series_identity", series);
            if theorem == Theorem::T7 {
                let ratio_imag = profile
                    .values
                    .iter()
                    .map(|v| (v / profile.v0).im.abs())
                    .fold(0.0, f64::max);
                ok &= ctx.check("real_ratio_residual", ratio_imag);
                if is_sign_symmetric(&spec.taus(n)) {
                    let mut even = 0.0f64;
                    for (&x, &v) in profile.grid.iter().zip(&profile.values) {
                        even = even.max((even_product_form(&spec, x, n)? - v).norm() / (1.0 + v.norm()));
                    }
                    ok &= ctx.check("even_product_identity", even);
                } else {
                    ctx.push(Record::new("even_product_identity", "skipped").with("reason", "tau_list_not_sign_symmetric"));
                }
            }
        }
        Theorem::T8 | Theorem::T9 => {
            let class = if theorem == Theorem::T8 { FunctionClass::YTilde } else { FunctionClass::LBar };
            require_class(&spec, theorem, class)?;
            let zeros = &spec.zeros()[..n];
            for (i, &z) in zeros.iter().enumerate().take(10) {
                if zeros[..i].contains(&z) {
                    continue;
                }
                let gap = zeros
                    .iter()
                    .filter(|&&w| w != z)
                    .map(|w| (w - z).norm())
                    .fold(f64::INFINITY, f64::min);
                let radius = if gap.is_finite() { 0.4 * gap } else { 0.5 };
                let m = verify_multiplicity(&spec, z, radius, DEFAULT_NODES, n)?;
                let simple = m.winding == 1;
                ok &= simple;
                ctx.push(
                    Record::new("winding", m.winding.to_string())
                        .with("zero", format_complex(z))
                        .with("radius", fmt_real(radius))
                        .with("status", if simple { "pass" } else { "fail" }),
                );
            }
        }
    }
    Ok(ok)
}
