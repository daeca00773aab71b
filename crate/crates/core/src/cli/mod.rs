//! The `vcf` command line: read a scenario, run one computation, write CSV or
//! JSON and print a run summary on stderr.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
//! failures, 1 when output cannot be written.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::cavity::CavityConfig;
use crate::error::Error;
use crate::fluctuations::noise_spectrum;
use crate::mirror::{validate_mirror, MirrorModel};
use crate::numerics::{QuadratureConfig, UniformTimeGrid};
use crate::static_force::{mean_casimir_force_and_gradient, mean_casimir_force_with, ModelPolicy};
use crate::susceptibility::{
    chi_at, chi_matrix_spectrum, on_conjugate_grid, perfect_series, resonance_chi, resonance_series,
    single_mirror_series, ChiMethod, ConstantReflection, SusceptibilitySeries,
};
use crate::time_response::{extract_echoes, force_response, padded_grid, Trajectory, LINEAR_REGIME_FRACTION};

use config::{Scales, Scenario, ScenarioConfig, TrajectorySpec};
use output::{
    format_g17, write_json, ComplexOut, ComponentOut, EchoOut, EchoTableOut, ForceReport, GradientOut, Header,
    MirrorCheck, MirrorReport, ResonanceReport, ResonanceRow, ResponseReport, SpectrumReport, Table,
};

/// Environment variable that sets the number of worker threads.
pub const THREADS_VAR: &str = "VCF_THREADS";

#[derive(Debug, Parser)]
#[command(name = "vcf", version, about = "Casimir forces and motional susceptibilities of a two-mirror cavity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, clap::Args)]
pub struct IoArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reality, unitarity, transparency and causality checks of both mirrors.
    ValidateMirror(IoArgs),
    /// Mean Casimir force on both mirrors.
    StaticForce(IoArgs),
    /// Force noise spectra C_ij on the frequency grid.
    NoiseSpectrum(IoArgs),
    /// Motional susceptibilities chi_ij on the frequency grid.
    Susceptibility(IoArgs),
    /// Forces induced by a prescribed mirror trajectory.
    TimeResponse(IoArgs),
    /// Full chi_11 against the constant-reflection closed form on resonance.
    ResonanceCompare(IoArgs),
}

impl Command {
    fn io(&self) -> &IoArgs {
        match self {
            Command::ValidateMirror(a)
            | Command::StaticForce(a)
            | Command::NoiseSpectrum(a)
            | Command::Susceptibility(a)
            | Command::TimeResponse(a)
            | Command::ResonanceCompare(a) => a,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::ValidateMirror(_) => "validate-mirror",
            Command::StaticForce(_) => "static-force",
            Command::NoiseSpectrum(_) => "noise-spectrum",
            Command::Susceptibility(_) => "susceptibility",
            Command::TimeResponse(_) => "time-response",
            Command::ResonanceCompare(_) => "resonance-compare",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::ValidateMirror(_) | Command::ResonanceCompare(_) => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Output(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Output(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

/// Human-readable lines printed after a successful run.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub lines: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

impl Summary {
    fn add(&mut self, key: &str, value: impl Into<String>) {
        self.lines.push((key.to_string(), value.into()));
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(s, "  {k}: {v}");
        }
        for w in &self.warnings {
            let _ = writeln!(s, "  warning: {w}");
        }
        s
    }
}

/// Parse `args` (program name first), execute and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let started = Instant::now();
    let result = match thread_pool() {
        Ok(Some(pool)) => pool.install(|| execute(&cli.command)),
        Ok(None) => execute(&cli.command),
        Err(e) => Err(e),
    };
    match result {
        Ok(mut summary) => {
            summary.add("wall time", format!("{:.3} s", started.elapsed().as_secs_f64()));
            eprintln!("vcf {} ({} {})", cli.command.name(), output::GENERATOR, output::version_tag());
            eprint!("{}", summary.render());
            0
        }
        Err(e) => {
            eprintln!("vcf {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(None);
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| CliError::Config(format!("cannot start {n} worker threads: {e}")))
}

/// Load the scenario, run `command` and write its output.
pub fn execute(command: &Command) -> Result<Summary, CliError> {
    let io = command.io();
    let text = std::fs::read_to_string(&io.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", io.config.display())))?;
    let doc = ScenarioConfig::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", io.config.display())))?;
    let base = io.config.parent().unwrap_or(Path::new("."));
    let scenario = doc.scenario(base)?;
    let format = io.format.unwrap_or(command.default_format());

    let mut summary = Summary::default();
    describe(&mut summary, &doc, &scenario);
    let output = match command {
        Command::ValidateMirror(_) => validate(&doc, &scenario, &mut summary)?,
        Command::StaticForce(_) => static_force(&doc, &scenario, &mut summary)?,
        Command::NoiseSpectrum(_) => noise(&doc, &scenario, &mut summary)?,
        Command::Susceptibility(_) => susceptibility(&doc, &scenario, &mut summary)?,
        Command::TimeResponse(_) => time_response(&doc, &scenario, base, &mut summary)?,
        Command::ResonanceCompare(_) => resonance_compare(&doc, &scenario, &mut summary)?,
    };
    emit(&output, format, io.out.as_deref())?;
    if let Some(path) = &io.out {
        summary.add("output", path.display().to_string());
    }
    Ok(summary)
}

/// A finished computation in both output forms.
struct Output {
    table: Table,
    json: String,
}

fn output<T: serde::Serialize>(table: Table, report: &T) -> Result<Output, CliError> {
    let mut json = Vec::new();
    write_json(&mut json, report).map_err(|e| CliError::Output(e.to_string()))?;
    let json = String::from_utf8(json).map_err(|e| CliError::Output(e.to_string()))?;
    Ok(Output { table, json })
}

fn emit(out: &Output, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let fail = |e: io::Error| CliError::Output(e.to_string());
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Csv => out.table.write(&mut sink).map_err(fail)?,
        Format::Json => sink.write_all(out.json.as_bytes()).map_err(fail)?,
    }
    sink.flush().map_err(fail)
}

/// Compact number for the run summary.
fn short(x: f64) -> String {
    if x == 0.0 || (1e-3..1e6).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn mirror_text(m: &MirrorModel) -> String {
    match m {
        MirrorModel::Lorentzian { omega_c } => format!("lorentzian, omega_c*q = {}", short(*omega_c)),
        MirrorModel::IdealBand { cutoff } => format!("ideal_band, cutoff*q = {}", short(*cutoff)),
        MirrorModel::Transparent => "transparent".into(),
        MirrorModel::Tabulated(t) => {
            let (lo, hi) = t.range();
            format!("tabulated, {} nodes, omega*q in [{}, {}]", t.nodes().len(), short(lo), short(hi))
        }
    }
}

fn describe(summary: &mut Summary, doc: &ScenarioConfig, s: &Scenario) {
    let units = match doc.units {
        config::Units::Natural => "natural",
        config::Units::Si => "si",
    };
    summary.add("units", units);
    summary.add("q", format!("{} (as a time: {})", short(doc.cavity.q), short(s.scales.q)));
    summary.add("hbar", short(s.scales.hbar));
    summary.add("mirror1", mirror_text(&s.cavity.m1));
    summary.add("mirror2", mirror_text(&s.cavity.m2));
    let quad = doc.quadrature();
    summary.add(
        "quadrature",
        format!(
            "rel_tol {}, abs_tol {}, tail_cutoff {}/q",
            short(quad.rel_tol),
            short(quad.abs_tol),
            short(quad.tail_cutoff)
        ),
    );
}

fn require_causal(cfg: &CavityConfig) -> crate::Result<()> {
    for m in [&cfg.m1, &cfg.m2] {
        if !m.is_causal() {
            return Err(Error::NonCausalModel(m.name().into()));
        }
    }
    Ok(())
}

fn validate(doc: &ScenarioConfig, s: &Scenario, summary: &mut Summary) -> Result<Output, CliError> {
    let grid = doc.frequencies(&s.scales)?;
    let quad = doc.quadrature();
    let mut table = Table::new(
        "mirror-v1",
        &[
            "mirror",
            "model",
            "max_reality_residual",
            "max_unitarity_residual",
            "transparency_tail_norm",
            "causality_residual",
            "reality_pass",
            "unitarity_pass",
            "transparency_pass",
            "causality_pass",
            "diagnostic",
        ],
    );
    let mut mirrors = Vec::new();
    for i in [1usize, 2] {
        let report = validate_mirror(s.cavity.mirror(i), &grid, &quad)?;
        let flag = |b: bool| b.to_string();
        table.push(vec![
            i.to_string(),
            report.model.clone(),
            format_g17(report.max_reality_residual),
            format_g17(report.max_unitarity_residual),
            format_g17(report.transparency_tail_norm),
            format_g17(report.causality_residual),
            flag(report.reality_pass),
            flag(report.unitarity_pass),
            flag(report.transparency_pass),
            flag(report.causality_pass),
            flag(report.diagnostic),
        ]);
        let verdict = if report.all_pass() {
            "all checks pass".to_string()
        } else if report.diagnostic {
            "diagnostic model, causality not satisfied".to_string()
        } else {
            "FAILED".to_string()
        };
        summary.add(&format!("mirror{i} checks"), verdict);
        mirrors.push(MirrorCheck { mirror: i, report });
    }
    summary.add("frequencies", grid.len().to_string());
    output(
        table,
        &MirrorReport {
            header: Header::new("mirror-v1", doc.units),
            mirrors,
        },
    )
}

fn static_force(doc: &ScenarioConfig, s: &Scenario, summary: &mut Summary) -> Result<Output, CliError> {
    let opts = doc.static_force;
    let policy = if opts.allow_diagnostic {
        ModelPolicy::AllowDiagnostic
    } else {
        ModelPolicy::CausalOnly
    };
    let quad = doc.quadrature();
    let r = if opts.gradient {
        mean_casimir_force_and_gradient(&s.cavity, &quad, policy)?
    } else {
        mean_casimir_force_with(&s.cavity, &quad, policy)?
    };
    let sc = &s.scales;
    let (f1, f2, bound) = (sc.force_out(r.f1), sc.force_out(r.f2), sc.force_out(r.error_bound));
    let mut table = Table::new("force-v1", &["F1", "F2", "error_bound"]);
    table.push_numbers(&[f1, f2, bound]);
    summary.add("error bound", short(bound));
    let gradient = r.gradient.map(|g| GradientOut {
        df1_dq: sc.chi_out(g.df1_dq),
        df2_dq: sc.chi_out(g.df2_dq),
        error_bound: sc.chi_out(g.error_bound),
    });
    output(
        table,
        &ForceReport {
            header: Header::new("force-v1", doc.units),
            f1,
            f2,
            error_bound: bound,
            gradient,
        },
    )
}

const PAIRS: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

fn spectrum_output(
    schema: &'static str,
    prefix: &str,
    units: config::Units,
    method: Option<ChiMethod>,
    omega: Vec<f64>,
    components: Vec<ComponentOut>,
) -> Result<Output, CliError> {
    let mut columns = vec!["omega".to_string()];
    for c in &components {
        columns.push(format!("re_{prefix}{}{}", c.i, c.j));
        columns.push(format!("im_{prefix}{}{}", c.i, c.j));
    }
    let names: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(schema, &names);
    for (k, &w) in omega.iter().enumerate() {
        let mut row = vec![w];
        for c in &components {
            row.push(c.values[k].re);
            row.push(c.values[k].im);
        }
        table.push_numbers(&row);
    }
    output(
        table,
        &SpectrumReport {
            header: Header::new(schema, units),
            method,
            omega,
            components,
        },
    )
}

fn noise(doc: &ScenarioConfig, s: &Scenario, summary: &mut Summary) -> Result<Output, CliError> {
    let grid = doc.frequencies(&s.scales)?;
    let quad = doc.quadrature();
    let sc = &s.scales;
    let mut components = Vec::with_capacity(4);
    for (i, j) in PAIRS {
        let series = noise_spectrum(&s.cavity, i, j, &grid, &quad)?;
        components.push(ComponentOut {
            i,
            j,
            values: series
                .values
                .iter()
                .map(|z| ComplexOut::from(Complex64::new(sc.noise_out(z.re), sc.noise_out(z.im))))
                .collect(),
            error: None,
        });
    }
    summary.add("frequencies", grid.len().to_string());
    let omega = grid.iter().map(|&w| sc.frequency_out(w)).collect();
    spectrum_output("noise-v1", "c", doc.units, None, omega, components)
}

/// Dimensionless susceptibility series of `method` on `grid`.
fn chi_series(
    doc: &ScenarioConfig,
    cfg: &CavityConfig,
    method: ChiMethod,
    grid: &[f64],
    quad: &QuadratureConfig,
) -> crate::Result<SusceptibilitySeries> {
    match method {
        ChiMethod::Full => {
            require_causal(cfg)?;
            chi_matrix_spectrum(cfg, grid, quad)
        }
        ChiMethod::ResonanceApprox => {
            let r = doc.reflection.ok_or_else(|| {
                Error::InvalidParameter("the resonance approximation needs \"reflection\": {r1_sq, r2_sq}".into())
            })?;
            let p = ConstantReflection::new(r.r1_sq, r.r2_sq, cfg.q, cfg.hbar)?;
            resonance_series(&p, grid)
        }
        ChiMethod::SingleMirror => {
            if !cfg.m2.is_transparent() {
                return Err(Error::InvalidParameter("the single_mirror method needs a transparent mirror2".into()));
            }
            single_mirror_series(&cfg.m1, cfg.hbar, grid, quad)
        }
        ChiMethod::PerfectSeries => perfect_series(cfg.q, cfg.hbar, grid),
    }
}

fn susceptibility(doc: &ScenarioConfig, s: &Scenario, summary: &mut Summary) -> Result<Output, CliError> {
    let grid = doc.frequencies(&s.scales)?;
    let method = doc.susceptibility.method;
    let series = chi_series(doc, &s.cavity, method, &grid, &doc.quadrature())?;
    let sc = &s.scales;
    let mut worst: f64 = 0.0;
    let components = series
        .components
        .iter()
        .map(|c| {
            worst = c.error.iter().fold(worst, |m, &e| m.max(e));
            ComponentOut {
                i: c.i,
                j: c.j,
                values: c
                    .values
                    .iter()
                    .map(|z| ComplexOut::from(Complex64::new(sc.chi_out(z.re), sc.chi_out(z.im))))
                    .collect(),
                error: Some(c.error.iter().map(|&e| sc.chi_out(e)).collect()),
            }
        })
        .collect();
    summary.add("method", format!("{method:?}"));
    summary.add("frequencies", grid.len().to_string());
    summary.add("largest error bound", short(sc.chi_out(worst)));
    let omega = grid.iter().map(|&w| sc.frequency_out(w)).collect();
    spectrum_output("chi-v1", "chi", doc.units, Some(method), omega, components)
}

fn trajectory(spec: &TrajectorySpec, grid: UniformTimeGrid, sc: &Scales, base: &Path) -> Result<Trajectory, CliError> {
    match spec {
        TrajectorySpec::GaussianPulse {
            mirror,
            amplitude,
            center,
            fwhm,
        } => Ok(Trajectory::gaussian_pulse(
            grid,
            *mirror,
            sc.length_in(*amplitude),
            sc.time_in(*center),
            sc.time_in(*fwhm),
        )?),
        TrajectorySpec::Samples { path } => {
            let path = base.join(path);
            let bad = |m: String| CliError::Config(format!("{}: {m}", path.display()));
            let mut rdr = csv::ReaderBuilder::new()
                .comment(Some(b'#'))
                .trim(csv::Trim::All)
                .from_path(&path)
                .map_err(|e| bad(e.to_string()))?;
            let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
            if headers.iter().collect::<Vec<_>>() != ["t", "dq1", "dq2"] {
                return Err(bad("header must be t,dq1,dq2".into()));
            }
            let times = grid.times();
            let (mut dq1, mut dq2) = (Vec::new(), Vec::new());
            for (k, record) in rdr.records().enumerate() {
                let record = record.map_err(|e| bad(e.to_string()))?;
                let mut v = [0.0; 3];
                for (slot, field) in v.iter_mut().zip(record.iter()) {
                    *slot = field.parse().map_err(|_| bad(format!("row {}: cannot parse '{field}'", k + 1)))?;
                }
                let t = sc.time_in(v[0]);
                if k >= times.len() || (t - times[k]).abs() > 1e-6 * grid.dt {
                    return Err(bad(format!("row {} does not lie on the time grid", k + 1)));
                }
                dq1.push(sc.length_in(v[1]));
                dq2.push(sc.length_in(v[2]));
            }
            Ok(Trajectory::new(grid, dq1, dq2)?)
        }
    }
}

fn time_response(doc: &ScenarioConfig, s: &Scenario, base: &Path, summary: &mut Summary) -> Result<Output, CliError> {
    let opts = doc
        .time_response
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs a time_response section".into()))?;
    let sc = &s.scales;
    let grid = doc.time_grid(sc)?;
    let traj = trajectory(&opts.trajectory, grid, sc, base)?;
    let mut warning = None;
    let largest = traj.max_displacement();
    if largest > LINEAR_REGIME_FRACTION {
        let w = format!(
            "largest displacement {} exceeds {}% of the mirror separation {}",
            short(sc.length_out(largest)),
            LINEAR_REGIME_FRACTION * 100.0,
            short(sc.length_out(1.0))
        );
        summary.warnings.push(w.clone());
        warning = Some(w);
    }
    let padded = padded_grid(&grid, 1.0)?;
    let quad = doc.quadrature();
    let chi = on_conjugate_grid(&padded, |w| chi_series(doc, &s.cavity, opts.method, w, &quad))?;
    let rec = force_response(&traj, &chi, 1.0)?;
    summary.add("method", format!("{:?}", opts.method));
    summary.add("samples", format!("{} (padded to {})", grid.n, rec.padded_n));
    summary.add("reality residual", short(rec.reality_residual));

    let echoes = match opts.echoes {
        Some(e) => {
            let tables = extract_echoes(&rec, sc.time_in(e.source_center), 1.0, e.count)?;
            Some(
                tables
                    .iter()
                    .map(|t| EchoTableOut {
                        mirror: t.mirror,
                        peaks: t
                            .peaks
                            .iter()
                            .map(|p| EchoOut {
                                k: p.k,
                                delay: sc.time_out(p.delay),
                                time: p.time.map(|x| sc.time_out(x)),
                                amplitude: p.amplitude.map(|x| sc.force_out(x)),
                            })
                            .collect(),
                    })
                    .collect(),
            )
        }
        None => None,
    };

    let t: Vec<f64> = grid.times().iter().map(|&x| sc.time_out(x)).collect();
    let dq1: Vec<f64> = traj.dq1.iter().map(|&x| sc.length_out(x)).collect();
    let dq2: Vec<f64> = traj.dq2.iter().map(|&x| sc.length_out(x)).collect();
    let df1: Vec<f64> = rec.df1.iter().map(|&x| sc.force_out(x)).collect();
    let df2: Vec<f64> = rec.df2.iter().map(|&x| sc.force_out(x)).collect();
    let mut table = Table::new("response-v1", &["t", "dq1", "dq2", "dF1", "dF2"]);
    for k in 0..grid.n {
        table.push_numbers(&[t[k], dq1[k], dq2[k], df1[k], df2[k]]);
    }
    output(
        table,
        &ResponseReport {
            header: Header::new("response-v1", doc.units),
            method: opts.method,
            padded_n: rec.padded_n,
            reality_residual: rec.reality_residual,
            warning,
            t,
            dq1,
            dq2,
            df1,
            df2,
            echoes,
        },
    )
}

fn resonance_compare(doc: &ScenarioConfig, s: &Scenario, summary: &mut Summary) -> Result<Output, CliError> {
    require_causal(&s.cavity)?;
    let quad = doc.quadrature();
    let ks = &doc.resonance_compare.resonances;
    if ks.is_empty() || ks.contains(&0) {
        return Err(CliError::Config("resonance_compare.resonances must be positive indices".into()));
    }
    let sc = &s.scales;
    let rows: Vec<Result<ResonanceRow, CliError>> = ks
        .par_iter()
        .map(|&k| {
            let w = k as f64 * std::f64::consts::PI;
            let p = doc.reflection_at(&s.cavity, w)?;
            let (full, _) = chi_at(&s.cavity, 1, 1, w, &quad)?;
            let closed = resonance_chi(&p, 1, 1, w)?;
            let scale = |z: Complex64| ComplexOut::from(Complex64::new(sc.chi_out(z.re), sc.chi_out(z.im)));
            let cubic = w.powi(3) / (6.0 * std::f64::consts::PI);
            Ok(ResonanceRow {
                k,
                omega_star: sc.frequency_out(w),
                r1_sq: p.r1_sq,
                r2_sq: p.r2_sq,
                chi_full: scale(full.value),
                chi_full_error: sc.chi_out(full.error),
                chi_resonance: scale(closed),
                rel_dev: (full.value - closed).norm() / closed.norm(),
                enhancement_full: full.value.norm() / cubic,
                enhancement_closed: p.enhancement(),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(
        "resonance-v1",
        &[
            "k",
            "omega_star",
            "r1_sq",
            "r2_sq",
            "re_chi_full",
            "im_chi_full",
            "re_chi_resonance",
            "im_chi_resonance",
            "rel_dev",
            "enhancement_full",
            "enhancement_closed",
        ],
    );
    for r in &rows {
        table.push_numbers(&[
            r.k as f64,
            r.omega_star,
            r.r1_sq,
            r.r2_sq,
            r.chi_full.re,
            r.chi_full.im,
            r.chi_resonance.re,
            r.chi_resonance.im,
            r.rel_dev,
            r.enhancement_full,
            r.enhancement_closed,
        ]);
    }
    let worst = rows.iter().map(|r| r.rel_dev).fold(0.0, f64::max);
    summary.add("resonances", rows.len().to_string());
    summary.add("largest relative deviation", short(worst));
    output(
        table,
        &ResonanceReport {
            header: Header::new("resonance-v1", doc.units),
            resonances: rows,
        },
    )
}
