//! Zero tables, spec files and complex literals.
//!
//! Zero table lines are `<re> <im>` (complex_pairs) or a single `tau`
//! (tau_only, zeros `xi + i tau`); `#` starts a comment. Spec files are
//! `key = value` lines, optionally followed by an inline `[zeros]` section.
//! Floats are written with the shortest representation that parses back to
//! the same bits.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::zeros::{
    is_sign_symmetric, make_symmetric_spec, modulus_order, EntireFunctionSpec, FunctionClass, Pairing, ZeroOrdering,
    ZeroSequence,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroFormat {
    ComplexPairs,
    TauOnly,
}

impl fmt::Display for ZeroFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZeroFormat::ComplexPairs => "complex_pairs",
            ZeroFormat::TauOnly => "tau_only",
        })
    }
}

impl FromStr for ZeroFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex_pairs" => Ok(ZeroFormat::ComplexPairs),
            "tau_only" => Ok(ZeroFormat::TauOnly),
            other => Err(Error::InvalidArgument(format!("unknown zero format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTableFile {
    pub path: PathBuf,
    pub format: ZeroFormat,
    pub xi: Option<f64>,
    /// Number of data lines, equal to the number of parsed zeros.
    pub count: usize,
}

/// SHA-256 of an input file, recorded in run reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    fn of(path: &Path, bytes: &[u8]) -> Self {
        Self {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_error(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

fn data_part(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_real(text: &str) -> Option<f64> {
    text.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Parses one data line; `Ok(None)` for blank and comment-only lines.
fn parse_zero_line(line: &str, format: ZeroFormat, xi: Option<f64>) -> std::result::Result<Option<Complex64>, String> {
    let data = data_part(line);
    if data.is_empty() {
        return Ok(None);
    }
    let fields: Vec<&str> = data.split_whitespace().collect();
    let zero = match format {
        ZeroFormat::ComplexPairs => {
            let [re, im] = fields[..] else {
                return Err(format!("expected '<re> <im>', found {} field(s)", fields.len()));
            };
            let re = parse_real(re).ok_or_else(|| format!("invalid real part '{re}'"))?;
            let im = parse_real(im).ok_or_else(|| format!("invalid imaginary part '{im}'"))?;
            if re == 0.0 && im == 0.0 {
                return Err("sigma = 0 is not allowed".into());
            }
            Complex64::new(re, im)
        }
        ZeroFormat::TauOnly => {
            let [tau] = fields[..] else {
                return Err(format!("expected a single tau, found {} field(s)", fields.len()));
            };
            let tau = parse_real(tau).ok_or_else(|| format!("invalid tau '{tau}'"))?;
            if tau == 0.0 {
                return Err("tau = 0 violates the class constraint (zeros xi + i tau need tau != 0)".into());
            }
            Complex64::new(xi.expect("tau_only requires xi"), tau)
        }
    };
    Ok(Some(zero))
}

fn require_xi(format: ZeroFormat, xi: Option<f64>) -> Result<()> {
    if format == ZeroFormat::TauOnly && xi.is_none() {
        return Err(Error::InvalidArgument("tau_only zero tables require xi".into()));
    }
    Ok(())
}

/// Zeros of a table in file order. `path` only labels errors.
pub fn parse_zero_table(text: &str, path: &str, format: ZeroFormat, xi: Option<f64>) -> Result<Vec<Complex64>> {
    require_xi(format, xi)?;
    let mut zeros = Vec::new();
    for (index, line) in text.lines().enumerate() {
        match parse_zero_line(line, format, xi) {
            Ok(Some(z)) => zeros.push(z),
            Ok(None) => {}
            Err(message) => return Err(parse_error(path, index + 1, message)),
        }
    }
    Ok(zeros)
}

pub fn read_zero_table(path: &Path, format: ZeroFormat, xi: Option<f64>) -> Result<(ZeroTableFile, Vec<Complex64>)> {
    require_xi(format, xi)?;
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let zeros = parse_zero_table(&text, &path.display().to_string(), format, xi)?;
    let table = ZeroTableFile {
        path: path.to_path_buf(),
        format,
        xi,
        count: zeros.len(),
    };
    Ok((table, zeros))
}

/// Reads a zero table into a by-modulus sequence without pairing.
pub fn ingest_zero_table(path: &Path, format: ZeroFormat, xi: Option<f64>) -> Result<ZeroSequence> {
    let (_, zeros) = read_zero_table(path, format, xi)?;
    ZeroSequence::new(zeros, ZeroOrdering::ByModulus, Pairing::None, path.display().to_string())
}

/// One zero per line; `tau_only` writes `Im sigma` and drops the real part.
pub fn format_zero_table(zeros: &[Complex64], format: ZeroFormat) -> String {
    let mut out = String::new();
    for z in zeros {
        match format {
            ZeroFormat::ComplexPairs => out.push_str(&format!("{} {}\n", z.re, z.im)),
            ZeroFormat::TauOnly => out.push_str(&format!("{}\n", z.im)),
        }
    }
    out
}

pub fn write_zero_table(path: &Path, zeros: &[Complex64], format: ZeroFormat) -> Result<()> {
    fs::write(path, format_zero_table(zeros, format)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`, `a+i`, with exponents allowed
/// in either part.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidArgument(format!("invalid complex number '{text}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return parse_real(&t).map(|re| Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re_text, im_text) = match split {
        Some(j) => (&body[..j], &body[j..]),
        None => ("", body),
    };
    let re = if re_text.is_empty() { 0.0 } else { parse_real(re_text).ok_or_else(bad)? };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_real(other).ok_or_else(bad)?,
    };
    Ok(Complex64::new(re, im))
}

/// Shortest round-trip form; exponent notation outside `[1e-4, 1e15)`.
pub fn format_real(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// `a+bi` / `a-bi` with round-trip floats; the sign of a zero imaginary part
/// is kept.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", format_real(z.re), format_real(-z.im))
    } else {
        format!("{}+{}i", format_real(z.re), format_real(z.im))
    }
}

// ---------------------------------------------------------------------------
// Spec files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub spec: EntireFunctionSpec,
    /// Spec file first, then any referenced zero table.
    pub inputs: Vec<InputDigest>,
}

#[derive(Default)]
struct SpecFields {
    class: Option<FunctionClass>,
    xi: Option<f64>,
    value_at_zero: Option<Complex64>,
    value_at_center: Option<Complex64>,
    q: Option<Complex64>,
    ordering: Option<ZeroOrdering>,
    pairing: Option<Pairing>,
    zeros_file: Option<String>,
    zeros_format: Option<ZeroFormat>,
}

fn is_conjugate_closed(zeros: &[Complex64]) -> bool {
    let mut a = zeros.to_vec();
    let mut b: Vec<Complex64> = zeros.iter().map(|z| z.conj()).collect();
    a.sort_by(modulus_order);
    b.sort_by(modulus_order);
    a == b
}

fn auto_pairing(class: FunctionClass, zeros: &[Complex64]) -> Pairing {
    let taus: Vec<f64> = zeros.iter().map(|z| z.im).collect();
    if class.is_symmetric() && is_sign_symmetric(&taus) {
        Pairing::SymmetricAboutCenter
    } else if is_conjugate_closed(zeros) {
        Pairing::ConjugatePairs
    } else {
        Pairing::None
    }
}

/// Parses spec text. `path` labels errors and digests; `base_dir` resolves a
/// relative `zeros_file`.
pub fn parse_spec(text: &str, path: &Path, base_dir: &Path) -> Result<LoadedSpec> {
    let label = path.display().to_string();
    let mut fields = SpecFields::default();
    let mut inline: Option<(usize, Vec<&str>)> = None;
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        if let Some((_, rows)) = inline.as_mut() {
            rows.push(line);
            continue;
        }
        let data = data_part(line);
        if data.is_empty() {
            continue;
        }
        if data == "[zeros]" {
            inline = Some((line_no, Vec::new()));
            continue;
        }
        let Some((key, value)) = data.split_once('=') else {
            return Err(parse_error(&label, line_no, format!("expected 'key = value', found '{data}'")));
        };
        let (key, value) = (key.trim(), value.trim());
        let err = |m: String| parse_error(&label, line_no, m);
        let complex = |v: &str| parse_complex(v).map_err(|e| err(e.to_string()));
        match key {
            "class" => fields.class = Some(value.parse().map_err(|e: Error| err(e.to_string()))?),
            "xi" => fields.xi = Some(parse_real(value).ok_or_else(|| err(format!("invalid xi '{value}'")))?),
            "value_at_zero" => fields.value_at_zero = Some(complex(value)?),
            "value_at_center" => fields.value_at_center = Some(complex(value)?),
            "q" => fields.q = Some(complex(value)?),
            "ordering" => fields.ordering = Some(value.parse().map_err(|e: Error| err(e.to_string()))?),
            "pairing" if value == "auto" => fields.pairing = None,
            "pairing" => fields.pairing = Some(value.parse().map_err(|e: Error| err(e.to_string()))?),
            "zeros_file" => fields.zeros_file = Some(value.to_string()),
            "zeros_format" => fields.zeros_format = Some(value.parse().map_err(|e: Error| err(e.to_string()))?),
            other => return Err(err(format!("unknown key '{other}'"))),
        }
    }

    let mut inputs = vec![InputDigest::of(path, text.as_bytes())];
    let format = fields.zeros_format.unwrap_or(ZeroFormat::ComplexPairs);
    let invalid = |m: &str| Error::InvalidSpec(format!("{label}: {m}"));
    let class = fields.class.ok_or_else(|| invalid("missing 'class'"))?;
    let zeros = match (&fields.zeros_file, inline) {
        (Some(_), Some(_)) => return Err(invalid("both 'zeros_file' and an inline [zeros] section")),
        (None, None) => return Err(invalid("no zeros: give 'zeros_file' or a [zeros] section")),
        (Some(file), None) => {
            let zeros_path = base_dir.join(file);
            require_xi(format, fields.xi)?;
            let bytes = read_file(&zeros_path)?;
            inputs.push(InputDigest::of(&zeros_path, &bytes));
            let text = String::from_utf8(bytes).map_err(|e| Error::Io {
                path: zeros_path.display().to_string(),
                message: e.to_string(),
            })?;
            parse_zero_table(&text, &zeros_path.display().to_string(), format, fields.xi)?
        }
        (None, Some((start, rows))) => {
            require_xi(format, fields.xi)?;
            let mut zeros = Vec::new();
            for (offset, row) in rows.iter().enumerate() {
                match parse_zero_line(row, format, fields.xi) {
                    Ok(Some(z)) => zeros.push(z),
                    Ok(None) => {}
                    Err(message) => return Err(parse_error(&label, start + 1 + offset, message)),
                }
            }
            zeros
        }
    };
    let q = fields.q.unwrap_or(Complex64::new(0.0, 0.0));

    let spec = match (fields.value_at_zero, fields.value_at_center) {
        (Some(_), Some(_)) => return Err(invalid("give only one of 'value_at_zero' and 'value_at_center'")),
        (None, None) => return Err(invalid("missing 'value_at_zero' or 'value_at_center'")),
        (None, Some(vc)) => {
            let xi = fields.xi.ok_or(Error::InvalidCenter)?;
            if fields.pairing.is_some() || fields.ordering.is_some_and(|o| o != ZeroOrdering::ByModulus) {
                return Err(invalid("ordering and pairing are derived when 'value_at_center' is given"));
            }
            if let Some(z) = zeros.iter().find(|z| z.re != xi) {
                return Err(invalid(&format!("zero {z} is off the line Re s = {xi}")));
            }
            let taus: Vec<f64> = zeros.iter().map(|z| z.im).collect();
            make_symmetric_spec(xi, &taus, vc, class, q)?
        }
        (Some(s0), None) => {
            let pairing = fields.pairing.unwrap_or_else(|| auto_pairing(class, &zeros));
            let ordering = fields.ordering.unwrap_or(ZeroOrdering::ByModulus);
            let seq = ZeroSequence::new(zeros, ordering, pairing, label.clone())?;
            EntireFunctionSpec::new(class, s0, q, fields.xi, seq)?
        }
    };
    Ok(LoadedSpec { spec, inputs })
}

pub fn load_spec(path: &Path) -> Result<LoadedSpec> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_spec(&text, path, base)
}
