//! The `liebr` command line: `simulate`, `kernel` and `verify`.
//!
//! A run is described by one JSON document (`--config`); every block is
//! optional and unknown keys are rejected. Commands render their outputs to
//! strings first and write them afterwards, so `--seedless` can render a
//! second time on a single thread and compare the bytes.
//!
//! Numbers are written as `{:.16e}` (17 significant digits), rows end in
//! `\n`, and nothing that varies between runs (such as wall time) goes into
//! an output file.
//!
//! Exit codes: 0 success, 1 usage or configuration, 2 numerical blow-up,
//! 3 caustic or singularity, 4 a verification (or `--seedless`) check
//! failed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use nalgebra::{Vector3, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::models::{self, PhysicalConstants};
use crate::par::{self, Execution};
use crate::poisson::{evolve, Method, PhasePoint};
use crate::proper_time::{self as pt, build_field, Signature, SymmetricGauge};
use crate::semiclassical as sc;
use crate::verify::{self, VerifyOptions};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_BLOW_UP: u8 = 2;
pub const EXIT_CAUSTIC: u8 = 3;
pub const EXIT_CHECK_FAILED: u8 = 4;

/// Output directory used when neither `--out` nor the config names one.
pub const DEFAULT_OUT_DIR: &str = "liebr-out";

#[derive(Debug, Parser)]
#[command(name = "liebr", version, about = "Bracket dynamics, exact propagators and their verifiers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Render every output twice, the second time single-threaded, and fail
    /// unless the bytes agree.
    #[arg(long, global = true)]
    pub seedless: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Integrate a model's bracket flow.
    Simulate,
    /// Sample a propagator over a grid of end points.
    Kernel,
    /// Run verification suites.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Kernel => "kernel",
            Command::Verify => "verify",
        }
    }
}

// ------------------------------------------------------------------ config

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// If present, must name the subcommand being run.
    pub command: Option<String>,
    pub model: Option<String>,
    pub constants: PhysicalConstants,
    /// Initial phase point; each model has a default.
    pub initial: Option<Vec<f64>>,
    pub integrator: IntegratorConfig,
    pub kernel: Option<KernelConfig>,
    pub verify: VerifyOptions,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodId {
    Rk4,
    Midpoint,
}

impl From<MethodId> for Method {
    fn from(m: MethodId) -> Method {
        match m {
            MethodId::Rk4 => Method::Rk4,
            MethodId::Midpoint => Method::Midpoint,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub t_final: f64,
    pub dt: f64,
    pub method: MethodId,
    /// Write every n-th step to the trajectory file (the last step always).
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { t_final: 10.0, dt: 1e-3, method: MethodId::Rk4, record_every: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Free,
    Ho,
    Landau,
    Relativistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub kind: KernelKind,
    /// Propagation time, or proper time for the relativistic kernel.
    pub tau: f64,
    /// Oscillator frequency.
    #[serde(default = "one")]
    pub omega: f64,
    /// Source point; its length fixes the dimension (1 for `ho`, 3 for
    /// `landau`, 4 for `relativistic`, any for `free`).
    pub x_prime: Vec<f64>,
    pub grid: SampleGrid,
    /// Constant field of the relativistic kernel.
    #[serde(default)]
    pub field: FieldConfig,
    /// Centre of the symmetric gauge of the relativistic kernel.
    #[serde(default)]
    pub gauge_center: [f64; 4],
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub e: [f64; 3],
    pub b: [f64; 3],
    pub charge: f64,
    pub signature: Signature,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig { e: [0.0; 3], b: [0.0, 0.0, 1.0], charge: 1.0, signature: Signature::MostlyMinus }
    }
}

/// End points `lower + i (upper - lower) / (points - 1)` per axis; a single
/// point sits at `lower`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleGrid {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub points: Vec<usize>,
}

impl SampleGrid {
    fn validate(&self, dim: usize) -> Result<()> {
        if self.lower.len() != dim || self.upper.len() != dim || self.points.len() != dim {
            return Err(Error::Config(format!("kernel.grid needs {dim} entries in lower, upper and points")));
        }
        for a in 0..dim {
            if !(self.lower[a].is_finite() && self.upper[a].is_finite()) || self.lower[a] > self.upper[a] {
                return Err(Error::Config(format!("kernel.grid axis {a}: need finite lower <= upper")));
            }
            if self.points[a] == 0 {
                return Err(Error::Config(format!("kernel.grid axis {a}: at least one point required")));
            }
        }
        if self.points.iter().try_fold(1usize, |acc, &p| acc.checked_mul(p)).is_none_or(|n| n > 50_000_000) {
            return Err(Error::Config("kernel.grid has too many points".into()));
        }
        Ok(())
    }

    fn len(&self) -> usize {
        self.points.iter().product()
    }

    fn node(&self, mut flat: usize) -> Vec<f64> {
        let d = self.points.len();
        let mut x = vec![0.0; d];
        for a in (0..d).rev() {
            let i = flat % self.points[a];
            flat /= self.points[a];
            x[a] = if self.points[a] == 1 {
                self.lower[a]
            } else {
                self.lower[a] + i as f64 * (self.upper[a] - self.lower[a]) / (self.points[a] - 1) as f64
            };
        }
        x
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn check_command(&self, command: Command) -> Result<()> {
        match &self.command {
            Some(c) if c != command.name() => Err(Error::Config(format!(
                "config is for '{c}' but the '{}' command was run",
                command.name()
            ))),
            _ => Ok(()),
        }
    }
}

// -------------------------------------------------------------- formatting

/// A number written with 17 significant digits; non-finite values become
/// `NaN`, `inf` or `-inf` in CSV and `null` in JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = serde_json::value::RawValue::from_string(fmt_num(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

fn nums(v: &[f64]) -> Vec<Num> {
    v.iter().copied().map(Num).collect()
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_row(out: &mut String, cells: impl IntoIterator<Item = f64>) {
    let row: Vec<String> = cells.into_iter().map(fmt_num).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

// ---------------------------------------------------------------- commands

/// Files produced by a command, in write order, and whether its checks
/// passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub files: Vec<(String, String)>,
    pub passed: bool,
}

fn default_initial(model: &str, k: &PhysicalConstants) -> Vec<f64> {
    match model {
        "pendulum" => vec![0.5, 0.0],
        "pendulum_extended" => vec![k.l, 0.0, 0.5, 0.0],
        "charged_canonical" | "charged_noncanonical" => vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.25],
        "charged_transverse" => vec![0.0, 0.0, 1.0, 0.0],
        _ => vec![1.0, 0.5, 0.2],
    }
}

#[derive(Serialize)]
struct Drift {
    name: String,
    max_relative_drift: Num,
}

#[derive(Serialize)]
struct SimulateSummary {
    model: String,
    method: MethodId,
    dt: Num,
    t_final: Num,
    steps: usize,
    rows: usize,
    initial_state: Vec<Num>,
    final_state: Vec<Num>,
    hamiltonian_drift: Num,
    casimir_drifts: Vec<Drift>,
}

pub fn render_simulate(cfg: &RunConfig) -> Result<Rendered> {
    let model = cfg.model.as_deref().ok_or_else(|| Error::Config("simulate needs a 'model'".into()))?;
    cfg.constants.validate().map_err(|e| Error::Config(e.to_string()))?;
    let system = models::by_id(model, &cfg.constants)?;
    let it = &cfg.integrator;
    if it.record_every == 0 {
        return Err(Error::Config("integrator.record_every must be at least 1".into()));
    }
    let initial = cfg.initial.clone().unwrap_or_else(|| default_initial(model, &cfg.constants));
    if initial.len() != system.dim() {
        return Err(Error::Config(format!("model '{model}' needs {} initial values, got {}", system.dim(), initial.len())));
    }
    let z0 = PhasePoint::from_slice(&initial).map_err(|e| Error::Config(e.to_string()))?;
    let traj = evolve(&system, &z0, it.t_final, it.dt, it.method.into()).map_err(|e| match e {
        Error::InvalidParameter(m) => Error::Config(m),
        other => other,
    })?;

    let n = system.dim();
    let mut csv = String::new();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("z{i}")));
    header.push("H".into());
    header.extend(traj.casimir_names.iter().cloned());
    csv.push_str(&header.join(","));
    csv.push('\n');
    let last = traj.len() - 1;
    let mut rows = 0;
    for i in (0..traj.len()).filter(|&i| i % it.record_every == 0 || i == last) {
        let mut cells = vec![traj.times[i]];
        cells.extend(traj.points[i].iter().copied());
        cells.push(traj.hamiltonian[i]);
        cells.extend(traj.casimirs.iter().map(|c| c[i]));
        csv_row(&mut csv, cells);
        rows += 1;
    }
    let summary = SimulateSummary {
        model: model.to_string(),
        method: it.method,
        dt: Num(it.dt),
        t_final: Num(it.t_final),
        steps: last,
        rows,
        initial_state: nums(&initial),
        final_state: nums(traj.last().as_vector().as_slice()),
        hamiltonian_drift: Num(traj.hamiltonian_drift()),
        casimir_drifts: traj
            .casimir_names
            .iter()
            .zip(traj.casimir_drifts())
            .map(|(name, d)| Drift { name: name.clone(), max_relative_drift: Num(d) })
            .collect(),
    };
    Ok(Rendered {
        files: vec![("trajectory.csv".into(), csv), ("summary.json".into(), to_json(&summary)?)],
        passed: true,
    })
}

#[derive(Serialize)]
struct KernelSummary {
    kind: KernelKind,
    tau: Num,
    x_prime: Vec<Num>,
    samples: usize,
    max_modulus: Num,
    min_modulus: Num,
}

fn kernel_dim(kc: &KernelConfig) -> Result<usize> {
    let d = kc.x_prime.len();
    let expected = match kc.kind {
        KernelKind::Free => {
            if d == 0 {
                return Err(Error::Config("kernel.x_prime must not be empty".into()));
            }
            d
        }
        KernelKind::Ho => 1,
        KernelKind::Landau => 3,
        KernelKind::Relativistic => 4,
    };
    if d != expected {
        return Err(Error::Config(format!("kernel.x_prime must have {expected} entries for this kind, got {d}")));
    }
    Ok(d)
}

fn kernel_header(kind: KernelKind, d: usize) -> Vec<String> {
    let mut h: Vec<String> = match kind {
        KernelKind::Relativistic => (0..d).map(|i| format!("x{i}")).collect(),
        _ => (1..=d).map(|i| format!("x{i}")).collect(),
    };
    let extra: &[&str] = match kind {
        KernelKind::Free | KernelKind::Ho => &["re", "im", "prefactor_re", "prefactor_im", "phase_re", "phase_im"],
        KernelKind::Landau => &[
            "re",
            "im",
            "prefactor_re",
            "prefactor_im",
            "phase_re",
            "phase_im",
            "gauge_re",
            "gauge_im",
            "invariant_re",
            "invariant_im",
        ],
        KernelKind::Relativistic => &[
            "re",
            "im",
            "gauge_re",
            "gauge_im",
            "invariant_re",
            "invariant_im",
            "tr_log_term",
            "quadratic_exponent",
        ],
    };
    h.extend(extra.iter().map(|s| s.to_string()));
    h
}

/// One CSV row (without coordinates) and the kernel modulus.
fn kernel_cells(kc: &KernelConfig, k: &PhysicalConstants, x: &[f64]) -> Result<(Vec<f64>, f64)> {
    let xp = &kc.x_prime;
    let c = |z: Complex64| [z.re, z.im];
    let semi = |v: sc::KernelValue| {
        let mut cells = Vec::with_capacity(10);
        cells.extend(c(v.amplitude));
        cells.extend(c(v.prefactor));
        cells.extend(c(v.phase_exponent));
        if let (Some(d), Some(inv)) = (v.decomposition, v.invariant_part()) {
            cells.extend(c(d.gauge_phase));
            cells.extend(c(inv));
        }
        (cells, v.amplitude.norm())
    };
    match kc.kind {
        KernelKind::Free => Ok(semi(sc::free_kernel(x, xp, kc.tau, k.m, k.hbar)?)),
        KernelKind::Ho => Ok(semi(sc::ho_kernel(x[0], xp[0], kc.tau, k.m, kc.omega, k.hbar)?)),
        KernelKind::Landau => {
            let v = sc::landau_kernel([x[0], x[1]], [xp[0], xp[1]], x[2], xp[2], kc.tau, k)?;
            let (mut cells, m) = semi(v);
            if cells.len() < 10 {
                // No field: the gauge phase is trivial.
                let amp = Complex64::new(cells[0], cells[1]);
                cells.extend([1.0, 0.0, amp.re, amp.im]);
            }
            Ok((cells, m))
        }
        KernelKind::Relativistic => {
            let f = &kc.field;
            let field = build_field(Vector3::from(f.e), Vector3::from(f.b), f.charge, f.signature);
            let gauge = SymmetricGauge { center: Vector4::from(kc.gauge_center) };
            let kv = pt::proper_time_kernel(
                &Vector4::from_column_slice(x),
                &Vector4::from_column_slice(xp),
                kc.tau,
                &field,
                &gauge,
            )?;
            let mut cells = Vec::with_capacity(8);
            cells.extend(c(kv.scalar_amplitude));
            cells.extend(c(kv.gauge_phase));
            cells.extend(c(kv.invariant_part()));
            cells.push(kv.components.tr_log_term);
            cells.push(kv.components.quadratic_exponent);
            Ok((cells, kv.scalar_amplitude.norm()))
        }
    }
}

pub fn render_kernel(cfg: &RunConfig, exec: Execution) -> Result<Rendered> {
    let kc = cfg.kernel.as_ref().ok_or_else(|| Error::Config("kernel command needs a 'kernel' block".into()))?;
    let k = &cfg.constants;
    k.validate().map_err(|e| Error::Config(e.to_string()))?;
    let d = kernel_dim(kc)?;
    kc.grid.validate(d)?;
    if !kc.tau.is_finite() || kc.x_prime.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("kernel.tau and kernel.x_prime must be finite".into()));
    }
    let f = &kc.field;
    if f.e.iter().chain(&f.b).chain(&kc.gauge_center).chain([&f.charge, &kc.omega]).any(|v| !v.is_finite()) {
        return Err(Error::Config("kernel field, charge, omega and gauge centre must be finite".into()));
    }

    let n = kc.grid.len();
    let results = exec.map(n, |i| {
        let x = kc.grid.node(i);
        kernel_cells(kc, k, &x).map(|r| (x, r))
    });
    let mut csv = kernel_header(kc.kind, d).join(",");
    csv.push('\n');
    let (mut max_mod, mut min_mod) = (0.0_f64, f64::INFINITY);
    for r in results {
        let (x, (cells, modulus)) = r.map_err(|e| match e {
            Error::InvalidParameter(m) => Error::Config(m),
            other => other,
        })?;
        max_mod = max_mod.max(modulus);
        min_mod = min_mod.min(modulus);
        csv_row(&mut csv, x.into_iter().chain(cells));
    }
    let summary = KernelSummary {
        kind: kc.kind,
        tau: Num(kc.tau),
        x_prime: nums(&kc.x_prime),
        samples: n,
        max_modulus: Num(max_mod),
        min_modulus: Num(min_mod),
    };
    Ok(Rendered { files: vec![("kernel.csv".into(), csv), ("summary.json".into(), to_json(&summary)?)], passed: true })
}

#[derive(Serialize)]
struct CheckOut<'a> {
    suite: verify::Suite,
    name: &'a str,
    passed: bool,
    value: Num,
    tolerance: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<&'a str>,
}

#[derive(Serialize)]
struct ReportOut<'a> {
    suite: verify::Suite,
    seed: u64,
    samples: usize,
    passed: bool,
    total: usize,
    failed: usize,
    checks: Vec<CheckOut<'a>>,
}

pub fn render_verify(cfg: &RunConfig, exec: Execution) -> Result<Rendered> {
    let opts = &cfg.verify;
    let report = verify::run(opts, exec)?;
    let out = ReportOut {
        suite: report.suite,
        seed: opts.seed,
        samples: opts.samples,
        passed: report.passed,
        total: report.checks.len(),
        failed: report.failures().count(),
        checks: report
            .checks
            .iter()
            .map(|c| CheckOut {
                suite: c.suite,
                name: &c.name,
                passed: c.passed,
                value: Num(c.value),
                tolerance: Num(c.tolerance),
                detail: c.detail.as_deref(),
            })
            .collect(),
    };
    Ok(Rendered { files: vec![("report.json".into(), to_json(&out)?)], passed: report.passed })
}

pub fn render(command: Command, cfg: &RunConfig, exec: Execution) -> Result<Rendered> {
    cfg.check_command(command)?;
    match command {
        Command::Simulate => render_simulate(cfg),
        Command::Kernel => render_kernel(cfg, exec),
        Command::Verify => render_verify(cfg, exec),
    }
}

/// Exit code for a failed command.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::BlowUp { .. } | Error::NonFinite { .. } | Error::StepUnderflow { .. } | Error::SeriesDivergence { .. } => {
            EXIT_BLOW_UP
        }
        Error::Caustic { .. }
        | Error::Coincidence { .. }
        | Error::DegenerateStructure { .. }
        | Error::NonInvertibleJacobian => EXIT_CAUSTIC,
        Error::DimensionMismatch { .. }
        | Error::OutsideDomain { .. }
        | Error::InvalidParameter(_)
        | Error::Config(_)
        | Error::GridTooCoarse(_)
        | Error::Io(_) => EXIT_USAGE,
    }
}

fn write_outputs(dir: &Path, rendered: &Rendered) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
    for (name, body) in &rendered.files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn check_thread_env() -> Result<()> {
    match std::env::var("LIEBR_THREADS") {
        Ok(v) if v.trim().parse::<usize>().map_or(true, |n| n == 0) => {
            Err(Error::Config(format!("LIEBR_THREADS must be a positive integer, got '{v}'")))
        }
        _ => {
            par::configure_threads_from_env();
            Ok(())
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("liebr: error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<u8> {
    check_thread_env()?;
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let started = Instant::now();
    let rendered = render(cli.command, &cfg, Execution::default())?;
    let dir = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    write_outputs(&dir, &rendered)?;
    let mut status = String::new();
    let _ = write!(status, "liebr {}: wrote", cli.command.name());
    for (name, _) in &rendered.files {
        let _ = write!(status, " {}", dir.join(name).display());
    }
    eprintln!("{status} in {:.3} s", started.elapsed().as_secs_f64());

    if cli.seedless {
        let again = render(cli.command, &cfg, Execution::Sequential)?;
        if again != rendered {
            let differing: Vec<&str> = rendered
                .files
                .iter()
                .zip(&again.files)
                .filter(|(a, b)| a != b)
                .map(|(a, _)| a.0.as_str())
                .collect();
            eprintln!("liebr: determinism check failed: {} differ between runs", differing.join(", "));
            return Ok(EXIT_CHECK_FAILED);
        }
        eprintln!("liebr: determinism check passed");
    }
    if !rendered.passed {
        eprintln!("liebr: one or more checks failed; see {}", dir.display());
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}

/// Entry point of the `liebr` binary. Usage errors exit with 1.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => ExitCode::from(run(&cli)),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_OK)
            }
        }
    }
}
