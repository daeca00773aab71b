//! CSV and JSON writers with a fixed, versioned layout.
//!
//! CSV files start with `# vacuum-cavity-forces vX.Y schema=<name>` followed
//! by the column header. Floats are written like C's `%.17g`, so every value
//! round-trips and repeated runs give identical bytes.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::mirror::ValidationReport;
use crate::susceptibility::ChiMethod;

pub const GENERATOR: &str = "vacuum-cavity-forces";

/// `vMAJOR.MINOR` of this build.
pub fn version_tag() -> String {
    let mut parts = env!("CARGO_PKG_VERSION").split('.');
    let major = parts.next().unwrap_or("0");
    let minor = parts.next().unwrap_or("0");
    format!("v{major}.{minor}")
}

/// `x` formatted as C's `printf("%.17g", x)`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A CSV table of numbers or short labels.
pub struct Table {
    pub schema: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(schema: &'static str, columns: &[&str]) -> Self {
        Self {
            schema,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&v| format_g17(v)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, out: &mut dyn Write) -> std::io::Result<()> {
        write!(out, "# {GENERATOR} {} schema={}\r\n", version_tag(), self.schema)?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, report: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    writeln!(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexOut {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Fields shared by every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub generator: &'static str,
    pub version: String,
    pub schema: &'static str,
    pub units: super::config::Units,
}

impl Header {
    pub fn new(schema: &'static str, units: super::config::Units) -> Self {
        Self {
            generator: GENERATOR,
            version: version_tag(),
            schema,
            units,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MirrorCheck {
    pub mirror: usize,
    #[serde(flatten)]
    pub report: ValidationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MirrorReport {
    #[serde(flatten)]
    pub header: Header,
    pub mirrors: Vec<MirrorCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientOut {
    pub df1_dq: f64,
    pub df2_dq: f64,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceReport {
    #[serde(flatten)]
    pub header: Header,
    pub f1: f64,
    pub f2: f64,
    pub error_bound: f64,
    pub gradient: Option<GradientOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentOut {
    pub i: usize,
    pub j: usize,
    pub values: Vec<ComplexOut>,
    /// Quadrature error bound per sample, when one is available.
    pub error: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    #[serde(flatten)]
    pub header: Header,
    pub method: Option<ChiMethod>,
    pub omega: Vec<f64>,
    pub components: Vec<ComponentOut>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EchoOut {
    pub k: usize,
    pub delay: f64,
    pub time: Option<f64>,
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoTableOut {
    pub mirror: usize,
    pub peaks: Vec<EchoOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseReport {
    #[serde(flatten)]
    pub header: Header,
    pub method: ChiMethod,
    pub padded_n: usize,
    pub reality_residual: f64,
    pub warning: Option<String>,
    pub t: Vec<f64>,
    pub dq1: Vec<f64>,
    pub dq2: Vec<f64>,
    pub df1: Vec<f64>,
    pub df2: Vec<f64>,
    pub echoes: Option<Vec<EchoTableOut>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceRow {
    pub k: u32,
    pub omega_star: f64,
    pub r1_sq: f64,
    pub r2_sq: f64,
    pub chi_full: ComplexOut,
    pub chi_full_error: f64,
    pub chi_resonance: ComplexOut,
    pub rel_dev: f64,
    /// `|χ₁₁|·6π/(ħω³)` from the full computation.
    pub enhancement_full: f64,
    /// `r₁²/(1 − r₁²r₂²)`.
    pub enhancement_closed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceReport {
    #[serde(flatten)]
    pub header: Header,
    pub resonances: Vec<ResonanceRow>,
}
