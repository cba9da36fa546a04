//! Command-line front end.
//!
//! Six subcommands cover the library's capabilities end to end:
//!
//! - `simulate` — integrate one trajectory and tabulate it,
//! - `pullback` — run a pullback sweep toward the random attractor,
//! - `curves`   — detect the random periodic curve family,
//! - `lyapunov` — estimate contraction data and the asymptotic exponent,
//! - `verify`   — check invariance of the curve family under a time shift,
//! - `oracle`   — measure the integrator against the closed-form solution.
//!
//! Every run resolves a flat `key=value` configuration (file values
//! overridden by flags, flags overridden by nothing), echoes it — with its
//! hash — into a versioned JSON report on stdout, and exits 0 on success,
//! 1 on any library error (reported as JSON on stderr), 2 on usage errors.
//! Reruns with the same configuration are byte-identical; the only
//! timestamped artifact is the optional `run.log` sidecar.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::cocycle::{CylinderPoint, LiftedPoint, SystemHandle};
use crate::error::{Error, Result};
use crate::example::PitchforkCircle;
use crate::fixtures::{DoubleWell, HalfTwistBand, TrackedSinusoid};
use crate::lyapunov::{estimate_contraction, lyapunov_exponent};
use crate::noise::WienerPath;
use crate::pullback::pullback;
use crate::report::{
    config_hash, error_json, write_curves_csv, write_oracle_csv, write_trajectory_csv,
    ContractionSummary, Envelope, ExtractionSummary, LyapunovSummary, OracleRow, OracleSummary,
    PerSeedExponent, PullbackSummary, SimulateSummary, VerifySummary,
};
use crate::winding::{
    build_winding_system, extract_curves_detailed, verify_invariance, ExtractionConfig,
    WindingSystem,
};

/// Random periodic solutions of random dynamical systems on the cylinder:
/// simulate, pull back, detect curves, and verify them.
#[derive(Debug, Parser)]
#[command(name = "cylinder", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Integrate one trajectory and tabulate `t, s_lift, y`.
    Simulate(CommonOpts),
    /// Pull a fiber point back from a sweep of horizons and report the
    /// convergence toward the random attractor.
    Pullback(CommonOpts),
    /// Detect the random periodic curve family: count, winding numbers,
    /// periods, traced curve tables.
    Curves(CommonOpts),
    /// Estimate the fiber contraction over winding blocks and the
    /// asymptotic Lyapunov exponent, with an independent ergodic
    /// cross-check on the example system.
    Lyapunov(CommonOpts),
    /// Re-run detection on a time-shifted realization and verify the curve
    /// family is carried onto itself by the flow.
    Verify(VerifyOpts),
    /// Drive the integrator and the closed-form solution with the same
    /// noise and tabulate the difference.
    Oracle(CommonOpts),
}

#[derive(Debug, Args, Clone, Default)]
struct CommonOpts {
    /// Flat key=value configuration file; flags given here override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// System selector: `example`, a fixture name (`tracked-sinusoid`,
    /// `double-well`, `half-twist`), or a parameter file.
    #[arg(long)]
    system: Option<String>,
    /// Noise seed for the driving path.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated seed list for multi-realization estimates.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Requested grid spacing (the winding commands re-grid it so one
    /// revolution is a whole number of cells).
    #[arg(long)]
    dt: Option<f64>,
    /// Noise amplitude of the example system.
    #[arg(long)]
    noise_scale: Option<f64>,
    /// Time horizon.
    #[arg(long)]
    t_max: Option<f64>,
    /// Comma-separated pullback horizons, ascending.
    #[arg(long, value_delimiter = ',')]
    horizons: Option<Vec<f64>>,
    /// Starting angle.
    #[arg(long)]
    s0: Option<f64>,
    /// Comma-separated starting fiber point (defaults to a system-chosen
    /// representative).
    #[arg(long, value_delimiter = ',')]
    y0: Option<Vec<f64>>,
    /// Windings per contraction block.
    #[arg(long)]
    n0: Option<usize>,
    /// Pullback depth cap (blocks) during curve detection.
    #[arg(long)]
    m_max: Option<usize>,
    /// Smallest inter-component gap treated as resolved.
    #[arg(long)]
    gap_floor: Option<f64>,
    /// Curve grid points per unit angle.
    #[arg(long)]
    s_resolution: Option<usize>,
    /// Pullback seeds per fiber during detection.
    #[arg(long)]
    fiber_seeds: Option<usize>,
    /// Matching/closure tolerance for detection and verification.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Directory for CSV tables, the JSON report copy, and the run log.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// `json` (report on stdout, default) or `csv` (primary table on
    /// stdout, for commands that have one).
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
struct VerifyOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Time shift to verify invariance under (snapped to the
    /// revolution-aligned grid; the report carries both values).
    #[arg(long, allow_hyphen_values = true)]
    shift: f64,
}

/// Output format of the primary stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Json,
    Csv,
}

/// Fully resolved run configuration: defaults, then config file, then
/// flags. This is what reports echo and hash.
#[derive(Debug, Clone)]
struct RunConfig {
    command: &'static str,
    system: String,
    seed: u64,
    seeds: Vec<u64>,
    dt: f64,
    noise_scale: f64,
    t_max: f64,
    horizons: Vec<f64>,
    s0: f64,
    y0: Option<Vec<f64>>,
    shift: Option<f64>,
    n0: usize,
    extraction: ExtractionConfig,
    out: Option<PathBuf>,
    format: OutputFormat,
}

impl RunConfig {
    fn defaults(command: &'static str) -> Self {
        let t_max = match command {
            "simulate" => 10.0,
            "pullback" => 20.0,
            "lyapunov" => 1e3,
            "oracle" => 5.0,
            _ => 0.0,
        };
        RunConfig {
            command,
            system: "example".into(),
            seed: 7,
            seeds: Vec::new(),
            dt: 1e-3,
            noise_scale: 0.5,
            t_max,
            horizons: vec![1.0, 2.0, 5.0, 10.0, 20.0],
            s0: 0.0,
            y0: None,
            shift: None,
            n0: 1,
            extraction: ExtractionConfig::default(),
            out: None,
            format: OutputFormat::Json,
        }
    }

    /// Apply one key=value pair (config file line or equivalent).
    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("bad value for `{what}`: `{value}`"));
        match key {
            "system" => self.system = value.to_string(),
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "seeds" => self.seeds = parse_list(value).map_err(|_| bad("seeds"))?,
            "dt" => self.dt = value.parse().map_err(|_| bad("dt"))?,
            "noise_scale" => self.noise_scale = value.parse().map_err(|_| bad("noise_scale"))?,
            "t_max" => self.t_max = value.parse().map_err(|_| bad("t_max"))?,
            "horizons" => self.horizons = parse_list(value).map_err(|_| bad("horizons"))?,
            "s0" => self.s0 = value.parse().map_err(|_| bad("s0"))?,
            "y0" => self.y0 = Some(parse_list(value).map_err(|_| bad("y0"))?),
            "shift" => self.shift = Some(value.parse().map_err(|_| bad("shift"))?),
            "n0" => self.n0 = value.parse().map_err(|_| bad("n0"))?,
            "m_max" => self.extraction.m_max = value.parse().map_err(|_| bad("m_max"))?,
            "gap_floor" => {
                self.extraction.cluster_gap_floor = value.parse().map_err(|_| bad("gap_floor"))?
            }
            "s_resolution" => {
                self.extraction.s_resolution = value.parse().map_err(|_| bad("s_resolution"))?
            }
            "fiber_seeds" => {
                self.extraction.fiber_seed_count =
                    value.parse().map_err(|_| bad("fiber_seeds"))?
            }
            "tolerance" => self.extraction.tolerance = value.parse().map_err(|_| bad("tolerance"))?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => {
                self.format = match value {
                    "json" => OutputFormat::Json,
                    "csv" => OutputFormat::Csv,
                    _ => return Err(bad("format")),
                }
            }
            _ => {
                return Err(Error::Config(format!(
                    "unknown configuration key `{key}`"
                )))
            }
        }
        Ok(())
    }

    fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected `key = value`, found `{line}`",
                    path.display(),
                    lineno + 1
                )));
            };
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn resolve(command: &'static str, opts: &CommonOpts) -> Result<Self> {
        let mut cfg = RunConfig::defaults(command);
        if let Some(ref file) = opts.config {
            cfg.load_file(file)?;
        }
        if let Some(ref v) = opts.system {
            cfg.system = v.clone();
        }
        if let Some(v) = opts.seed {
            cfg.seed = v;
        }
        if let Some(ref v) = opts.seeds {
            cfg.seeds = v.clone();
        }
        if let Some(v) = opts.dt {
            cfg.dt = v;
        }
        if let Some(v) = opts.noise_scale {
            cfg.noise_scale = v;
        }
        if let Some(v) = opts.t_max {
            cfg.t_max = v;
        }
        if let Some(ref v) = opts.horizons {
            cfg.horizons = v.clone();
        }
        if let Some(v) = opts.s0 {
            cfg.s0 = v;
        }
        if let Some(ref v) = opts.y0 {
            cfg.y0 = Some(v.clone());
        }
        if let Some(v) = opts.n0 {
            cfg.n0 = v;
        }
        if let Some(v) = opts.m_max {
            cfg.extraction.m_max = v;
        }
        if let Some(v) = opts.gap_floor {
            cfg.extraction.cluster_gap_floor = v;
        }
        if let Some(v) = opts.s_resolution {
            cfg.extraction.s_resolution = v;
        }
        if let Some(v) = opts.fiber_seeds {
            cfg.extraction.fiber_seed_count = v;
        }
        if let Some(v) = opts.tolerance {
            cfg.extraction.tolerance = v;
        }
        if let Some(ref v) = opts.out {
            cfg.out = Some(v.clone());
        }
        if let Some(ref v) = opts.format {
            cfg.format = match v.as_str() {
                "json" => OutputFormat::Json,
                "csv" => OutputFormat::Csv,
                _ => return Err(Error::Config(format!("bad value for `format`: `{v}`"))),
            };
        }
        if !(cfg.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", cfg.dt)));
        }
        Ok(cfg)
    }

    /// Seed list for multi-realization estimates: the explicit list, or
    /// `count` consecutive seeds starting at `seed`.
    fn seed_set(&self, count: usize) -> Vec<u64> {
        if self.seeds.is_empty() {
            (0..count as u64).map(|k| self.seed + k).collect()
        } else {
            self.seeds.clone()
        }
    }

    /// The flat echo embedded in every report.
    fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let fmt_list_f = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let fmt_list_u = |v: &[u64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        m.insert("command".into(), self.command.into());
        m.insert("system".into(), self.system.clone());
        m.insert("seed".into(), self.seed.to_string());
        if !self.seeds.is_empty() {
            m.insert("seeds".into(), fmt_list_u(&self.seeds));
        }
        m.insert("dt".into(), self.dt.to_string());
        m.insert("noise_scale".into(), self.noise_scale.to_string());
        m.insert("t_max".into(), self.t_max.to_string());
        m.insert("horizons".into(), fmt_list_f(&self.horizons));
        m.insert("s0".into(), self.s0.to_string());
        if let Some(ref y0) = self.y0 {
            m.insert("y0".into(), fmt_list_f(y0));
        }
        if let Some(shift) = self.shift {
            m.insert("shift".into(), shift.to_string());
        }
        m.insert("n0".into(), self.n0.to_string());
        m.insert("m_max".into(), self.extraction.m_max.to_string());
        m.insert(
            "gap_floor".into(),
            self.extraction.cluster_gap_floor.to_string(),
        );
        m.insert(
            "s_resolution".into(),
            self.extraction.s_resolution.to_string(),
        );
        m.insert(
            "fiber_seeds".into(),
            self.extraction.fiber_seed_count.to_string(),
        );
        m.insert("tolerance".into(), self.extraction.tolerance.to_string());
        if let Some(ref out) = self.out {
            m.insert("out".into(), out.display().to_string());
        }
        m.insert(
            "format".into(),
            match self.format {
                OutputFormat::Json => "json".into(),
                OutputFormat::Csv => "csv".into(),
            },
        );
        m
    }
}

fn parse_list<T: std::str::FromStr>(value: &str) -> std::result::Result<Vec<T>, ()> {
    value
        .split(',')
        .map(|c| c.trim())
        .filter(|c| !c.is_empty())
        .map(|c| c.parse().map_err(|_| ()))
        .collect()
}

/// Instantiate the selected system family.
///
/// Names select built-in families at their defaults (`noise_scale` applies
/// to the example family). A path selects a parameter file: the same flat
/// `key = value` format with a mandatory `family` key and the family's
/// parameters (`nu`; `kappa`, `a`, `b`).
fn make_system(selector: &str, noise_scale: f64) -> Result<SystemHandle> {
    match selector {
        "example" | "pitchfork-circle" => Ok(Arc::new(PitchforkCircle::new(noise_scale))),
        "tracked-sinusoid" => Ok(Arc::new(TrackedSinusoid::default())),
        "double-well" => Ok(Arc::new(DoubleWell::default())),
        "half-twist" => Ok(Arc::new(HalfTwistBand::default())),
        other => {
            let path = Path::new(other);
            if !path.exists() {
                return Err(Error::Config(format!(
                    "unknown system `{other}` (expected `example`, `tracked-sinusoid`, \
                     `double-well`, `half-twist`, or a parameter file)"
                )));
            }
            system_from_file(path, noise_scale)
        }
    }
}

fn system_from_file(path: &Path, noise_scale: f64) -> Result<SystemHandle> {
    let text = fs::read_to_string(path)?;
    let mut family = None;
    let mut params: BTreeMap<String, f64> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "{}:{}: expected `key = value`, found `{line}`",
                path.display(),
                lineno + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        if key == "family" {
            family = Some(value.to_string());
        } else {
            let parsed: f64 = value.parse().map_err(|_| {
                Error::Config(format!(
                    "{}:{}: bad numeric value for `{key}`: `{value}`",
                    path.display(),
                    lineno + 1
                ))
            })?;
            params.insert(key.to_string(), parsed);
        }
    }
    let family = family.ok_or_else(|| {
        Error::Config(format!("{}: missing `family` key", path.display()))
    })?;
    let get = |params: &BTreeMap<String, f64>, key: &str, default: f64| {
        params.get(key).copied().unwrap_or(default)
    };
    let check_keys = |params: &BTreeMap<String, f64>, allowed: &[&str]| -> Result<()> {
        for key in params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "{}: unknown parameter `{key}` for family `{family}`",
                    path.display()
                )));
            }
        }
        Ok(())
    };
    match family.as_str() {
        "example" | "pitchfork-circle" => {
            check_keys(&params, &["nu"])?;
            Ok(Arc::new(PitchforkCircle::new(get(
                &params,
                "nu",
                noise_scale,
            ))))
        }
        "tracked-sinusoid" => {
            check_keys(&params, &["kappa", "a", "b"])?;
            let d = TrackedSinusoid::default();
            Ok(Arc::new(TrackedSinusoid {
                kappa: get(&params, "kappa", d.kappa),
                a: get(&params, "a", d.a),
                b: get(&params, "b", d.b),
            }))
        }
        "double-well" => {
            check_keys(&params, &["kappa"])?;
            let d = DoubleWell::default();
            Ok(Arc::new(DoubleWell {
                kappa: get(&params, "kappa", d.kappa),
            }))
        }
        "half-twist" => {
            check_keys(&params, &["kappa"])?;
            let d = HalfTwistBand::default();
            Ok(Arc::new(HalfTwistBand {
                kappa: get(&params, "kappa", d.kappa),
            }))
        }
        other => Err(Error::Config(format!(
            "{}: unknown family `{other}`",
            path.display()
        ))),
    }
}

/// Entry point: parse, run, map errors to exit codes. Usage problems exit
/// 2; configuration mistakes exit 2 with a JSON error; library failures
/// exit 1 with a JSON error.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders its own message (also for --help/--version, which
            // exit 0 by convention).
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Simulate(ref opts) => RunConfig::resolve("simulate", opts).and_then(run_simulate),
        Cmd::Pullback(ref opts) => RunConfig::resolve("pullback", opts).and_then(run_pullback),
        Cmd::Curves(ref opts) => RunConfig::resolve("curves", opts).and_then(run_curves),
        Cmd::Lyapunov(ref opts) => RunConfig::resolve("lyapunov", opts).and_then(run_lyapunov),
        Cmd::Verify(ref opts) => RunConfig::resolve("verify", &opts.common).and_then(|mut cfg| {
            cfg.shift = Some(opts.shift);
            run_verify(cfg)
        }),
        Cmd::Oracle(ref opts) => RunConfig::resolve("oracle", opts).and_then(run_oracle),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            eprint!("{}", error_json(&err));
            if matches!(err, Error::Config(_)) {
                2
            } else {
                1
            }
        }
    }
}

// ---------------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------------

/// Emit one finished report: JSON on stdout (unless the caller already
/// streamed CSV there), plus `report.json` and a timestamped `run.log` in
/// the output directory when one was requested.
fn finish<T: serde::Serialize>(
    cfg: &RunConfig,
    envelope: &Envelope<T>,
    csv_stdout: Option<String>,
) -> Result<()> {
    match csv_stdout {
        Some(table) => print!("{table}"),
        None => print!("{}", envelope.render()),
    }
    if let Some(ref dir) = cfg.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), envelope.render())?;
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut log = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(dir.join("run.log"))?;
        writeln!(
            log,
            "{stamp} {} config_hash={}",
            cfg.command,
            config_hash(&cfg.echo())
        )?;
    }
    Ok(())
}

fn write_out_file(cfg: &RunConfig, name: &str, contents: &[u8]) -> Result<()> {
    if let Some(ref dir) = cfg.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

/// The starting fiber point: explicit, or the system's first default seed.
fn resolve_y0(cfg: &mut RunConfig, system: &SystemHandle) -> Result<Vec<f64>> {
    let d = system.fiber_dim();
    match cfg.y0 {
        Some(ref y0) => {
            if y0.len() != d {
                return Err(Error::Config(format!(
                    "y0 has dimension {}, system `{}` has fiber dimension {d}",
                    y0.len(),
                    cfg.system
                )));
            }
            Ok(y0.clone())
        }
        None => {
            let y0 = system
                .default_fiber_seeds(1)
                .into_iter()
                .next()
                .unwrap_or_else(|| vec![0.0; d]);
            cfg.y0 = Some(y0.clone());
            Ok(y0)
        }
    }
}

/// Driving path over `[lo, hi]` on the requested grid.
fn seeded_path(cfg: &RunConfig, lo: f64, hi: f64) -> Result<WienerPath> {
    let dt = cfg.dt;
    let lo = (lo / dt).floor() * dt - dt;
    let hi = (hi / dt).ceil() * dt + dt;
    WienerPath::generate(cfg.seed, lo.min(-dt), hi.max(dt), dt)
}

/// Build the winding view of the configured system over a seeded path.
fn winding_view(cfg: &RunConfig, system: &SystemHandle) -> Result<WindingSystem> {
    let hist = system.history_needed();
    let path = seeded_path(cfg, -hist - 1.0, 2.0)?;
    Ok(build_winding_system(system.clone(), &path, &[])?.with_n0(cfg.n0))
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn run_simulate(mut cfg: RunConfig) -> Result<()> {
    let system = make_system(&cfg.system, cfg.noise_scale)?;
    let y0 = resolve_y0(&mut cfg, &system)?;
    if !(cfg.t_max > 0.0) {
        return Err(Error::Config(format!(
            "t_max must be positive, got {}",
            cfg.t_max
        )));
    }
    let hist = system.history_needed();
    let path = seeded_path(&cfg, -hist - 1.0, cfg.t_max)?;
    let cells = (cfg.t_max / cfg.dt).round().max(1.0) as usize;
    let stride = cells.div_ceil(1000).max(1);
    let mut rows = Vec::with_capacity(cells / stride + 2);
    let mut z = LiftedPoint::new(cfg.s0, y0);
    let mut i = 0usize;
    rows.push((0.0, z.clone()));
    while i < cells {
        let next = (i + stride).min(cells);
        let (t0, t1) = (i as f64 * cfg.dt, next as f64 * cfg.dt);
        z = system.flow(&path, t0, t1, &z)?;
        rows.push((t1, z.clone()));
        i = next;
    }
    let d = system.fiber_dim();
    let summary = SimulateSummary {
        rows: rows.len(),
        t_final: rows.last().unwrap().0,
        s_lift_final: z.s_lift,
        y_final: z.y.clone(),
        windings: z.s_lift - cfg.s0,
    };
    let mut table = Vec::new();
    write_trajectory_csv(&mut table, d, &rows)?;
    write_out_file(&cfg, "trajectory.csv", &table)?;
    let envelope = Envelope::new("simulate", cfg.echo(), summary);
    let csv = (cfg.format == OutputFormat::Csv).then(|| String::from_utf8(table).unwrap());
    finish(&cfg, &envelope, csv)
}

fn run_pullback(mut cfg: RunConfig) -> Result<()> {
    let system = make_system(&cfg.system, cfg.noise_scale)?;
    let y0 = resolve_y0(&mut cfg, &system)?;
    // The winding view pins the full-circle time and the aligned grid.
    let ws = winding_view(&cfg, &system)?;
    let dt = ws.path.dt();
    let horizons: Vec<f64> = cfg
        .horizons
        .iter()
        .map(|&t| (t / dt).round() * dt)
        .collect();
    let run = pullback(
        ws.base.as_ref(),
        &ws.path,
        0.0,
        cfg.s0,
        &y0,
        &horizons,
        cfg.extraction.tolerance,
        1.0 / ws.t1,
    )?;
    let summary = PullbackSummary::from_run(&run);
    let envelope = Envelope::new("pullback", cfg.echo(), summary);
    finish(&cfg, &envelope, None)
}

fn run_curves(cfg: RunConfig) -> Result<()> {
    let system = make_system(&cfg.system, cfg.noise_scale)?;
    let ws = winding_view(&cfg, &system)?;
    let extraction = extract_curves_detailed(&ws, &cfg.extraction)?;
    let summary = ExtractionSummary::from_extraction(&extraction);
    let mut table = Vec::new();
    write_curves_csv(&mut table, &extraction.curves)?;
    write_out_file(&cfg, "curves.csv", &table)?;
    let envelope = Envelope::new("curves", cfg.echo(), summary);
    let csv = (cfg.format == OutputFormat::Csv).then(|| String::from_utf8(table).unwrap());
    finish(&cfg, &envelope, csv)
}

fn run_lyapunov(mut cfg: RunConfig) -> Result<()> {
    let system = make_system(&cfg.system, cfg.noise_scale)?;
    let y0 = resolve_y0(&mut cfg, &system)?;
    if !(cfg.t_max > 0.0) {
        return Err(Error::Config(format!(
            "t_max must be positive, got {}",
            cfg.t_max
        )));
    }
    let seeds = cfg.seed_set(10);
    let z0 = CylinderPoint::new(cfg.s0, y0);
    let mut per_seed = Vec::with_capacity(seeds.len());
    let mut first_ws: Option<WindingSystem> = None;
    for &seed in &seeds {
        let mut seed_cfg = cfg.clone();
        seed_cfg.seed = seed;
        let ws = winding_view(&seed_cfg, &system)?;
        let exponent = lyapunov_exponent(&ws, &z0, cfg.t_max)?;
        per_seed.push(PerSeedExponent { seed, exponent });
        first_ws.get_or_insert(ws);
    }
    let exponent =
        per_seed.iter().map(|p| p.exponent).sum::<f64>() / per_seed.len().max(1) as f64;

    // Contraction data over the first realization: sample the attractor by
    // letting the start settle for a few windings, then collecting block
    // arrivals as the tube around the attracting set.
    let ws = first_ws.expect("at least one seed");
    let contraction = {
        let settle = 4usize;
        let collect = 8usize;
        let mut samples = Vec::with_capacity(collect);
        let mut z = z0.lift(0);
        let path = ws.path.ensure_domain(
            -system.history_needed() - 1.0,
            ws.block_time((settle + collect) as i64 + 1),
        )?;
        for k in 0..settle + collect {
            let (t0, t1) = (ws.block_time(k as i64), ws.block_time(k as i64 + 1));
            z = ws.base.flow(&path, t0, t1, &z)?;
            if k >= settle {
                let (p, _) = z.project();
                samples.push(p);
            }
        }
        estimate_contraction(&ws, &samples, cfg.n0, &seeds)
    };
    let contraction = match contraction {
        Ok(report) => Some(ContractionSummary::from_report(&report)),
        // The exponent stands on its own; a failed contraction certificate
        // at this block count is reported as absent, not fatal.
        Err(Error::ContractionFailed { .. }) => None,
        Err(other) => return Err(other),
    };

    // Independent cross-check through trajectory statistics, where the
    // system has a closed form to check against.
    let ergodic_average = if matches!(cfg.system.as_str(), "example" | "pitchfork-circle") {
        let bench = PitchforkCircle::new(cfg.noise_scale);
        let horizon = cfg.t_max.min(200.0);
        let path = WienerPath::generate(cfg.seed, -20.0, horizon + cfg.dt, cfg.dt)?;
        Some(bench.ergodic_rate_average(&path, horizon)?)
    } else {
        None
    };

    let summary = LyapunovSummary {
        exponent,
        per_seed,
        ergodic_average,
        contraction,
        t_max: cfg.t_max,
    };
    let envelope = Envelope::new("lyapunov", cfg.echo(), summary);
    finish(&cfg, &envelope, None)
}

fn run_verify(mut cfg: RunConfig) -> Result<()> {
    let shift_requested = cfg.shift.expect("verify always sets shift");
    let system = make_system(&cfg.system, cfg.noise_scale)?;
    let ws = winding_view(&cfg, &system)?;
    let dt = ws.path.dt();
    let shift = (shift_requested / dt).round() * dt;
    cfg.shift = Some(shift_requested);
    if shift == 0.0 {
        return Err(Error::Config(format!(
            "shift {shift_requested} snaps to zero on the aligned grid (dt = {dt})"
        )));
    }

    // Curves of the (-shift)-shifted realization, then the invariance check
    // against the current one.
    let hist = system.history_needed();
    // Whole number of aligned cells, so the domain request stays on grid.
    let reach = ((shift.abs() + ws.t1 + hist + 1.0) / dt).ceil() * dt;
    let shifted = ws.path.ensure_domain(-reach, reach)?.shift(-shift)?;
    let ws_then = build_winding_system(system.clone(), &shifted, &[])?.with_n0(cfg.n0);
    let then = extract_curves_detailed(&ws_then, &cfg.extraction)?;

    let mut worst: Option<VerifySummary> = None;
    for curve in &then.curves {
        let check = verify_invariance(curve, system.clone(), &ws.path, shift, &cfg.extraction)?;
        let summary =
            VerifySummary::from_check(&check, shift, shift_requested, cfg.extraction.tolerance);
        let replace = match worst {
            None => true,
            Some(ref w) => {
                (!summary.passed && w.passed) || summary.curve_residual > w.curve_residual
            }
        };
        if replace {
            worst = Some(summary);
        }
    }
    let summary = worst.ok_or_else(|| {
        Error::InvalidArgument("no curves extracted on the shifted realization".into())
    })?;
    let envelope = Envelope::new("verify", cfg.echo(), summary);
    finish(&cfg, &envelope, None)
}

fn run_oracle(mut cfg: RunConfig) -> Result<()> {
    match cfg.system.as_str() {
        "example" | "pitchfork-circle" => {}
        other => {
            return Err(Error::Config(format!(
                "the oracle comparison needs the closed-form example system, not `{other}`"
            )))
        }
    }
    let bench = PitchforkCircle::new(cfg.noise_scale);
    let system: SystemHandle = Arc::new(PitchforkCircle::new(cfg.noise_scale));
    let y0 = resolve_y0(&mut cfg, &system)?;
    if !(cfg.t_max > 0.0) {
        return Err(Error::Config(format!(
            "t_max must be positive, got {}",
            cfg.t_max
        )));
    }
    let rho0 = y0[0];
    let path = seeded_path(&cfg, 0.0, cfg.t_max)?;
    let cells = (cfg.t_max / cfg.dt).round().max(1.0) as usize;
    let stride = cells.div_ceil(1000).max(1);
    let t_end = cells as f64 * cfg.dt;
    let closed = bench.closed_form_radius_sampled(&path, 0.0, t_end, rho0, stride)?;
    let numeric = crate::integrate::integrate_sampled(
        &bench.sde_spec(),
        &path,
        0.0,
        t_end,
        &[cfg.s0, rho0],
        stride,
    )?;
    if closed.len() != numeric.len() {
        return Err(Error::InvalidArgument(
            "oracle sampling mismatch between the closed form and the integrator".into(),
        ));
    }
    let mut rows = Vec::with_capacity(closed.len());
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    for ((t, rho_closed), (_, state)) in closed.iter().zip(&numeric) {
        let rho_numeric = state[1];
        let abs = (rho_closed - rho_numeric).abs();
        max_abs = max_abs.max(abs);
        max_rel = max_rel.max(abs / rho_closed.abs().max(1e-300));
        rows.push(OracleRow {
            t: *t,
            rho_closed: *rho_closed,
            rho_numeric,
        });
    }
    let summary = OracleSummary {
        rows: rows.len(),
        max_abs_err: max_abs,
        max_rel_err: max_rel,
        t_max: t_end,
        dt: cfg.dt,
    };
    let mut table = Vec::new();
    write_oracle_csv(&mut table, &rows)?;
    write_out_file(&cfg, "oracle.csv", &table)?;
    let envelope = Envelope::new("oracle", cfg.echo(), summary);
    let csv = (cfg.format == OutputFormat::Csv).then(|| String::from_utf8(table).unwrap());
    finish(&cfg, &envelope, csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_then_file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.conf");
        fs::write(&file, "seed = 42\ndt = 0.01\n# comment\n\nsystem = double-well\n").unwrap();
        let opts = CommonOpts {
            config: Some(file),
            dt: Some(0.25),
            ..CommonOpts::default()
        };
        let cfg = RunConfig::resolve("simulate", &opts).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.dt, 0.25);
        assert_eq!(cfg.system, "double-well");
        assert_eq!(cfg.t_max, 10.0);
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.conf");
        fs::write(&file, "sede = 42\n").unwrap();
        let opts = CommonOpts {
            config: Some(file),
            ..CommonOpts::default()
        };
        let err = RunConfig::resolve("simulate", &opts).unwrap_err();
        assert_eq!(err.kind(), "config");
    }

    #[test]
    fn echo_is_flat_and_sorted() {
        let cfg = RunConfig::defaults("curves");
        let echo = cfg.echo();
        assert_eq!(echo["command"], "curves");
        assert_eq!(echo["seed"], "7");
        assert_eq!(echo["s_resolution"], "256");
        let keys: Vec<&String> = echo.keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn seed_set_prefers_the_explicit_list() {
        let mut cfg = RunConfig::defaults("lyapunov");
        assert_eq!(cfg.seed_set(3), vec![7, 8, 9]);
        cfg.seeds = vec![100, 200];
        assert_eq!(cfg.seed_set(3), vec![100, 200]);
    }

    #[test]
    fn parameter_files_instantiate_families() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("sys.conf");
        fs::write(&file, "family = tracked-sinusoid\nkappa = 1.0\na = 3.0\n").unwrap();
        let system = make_system(file.to_str().unwrap(), 0.5).unwrap();
        assert_eq!(system.name(), "tracked-sinusoid");

        fs::write(&file, "family = no-such\n").unwrap();
        assert!(make_system(file.to_str().unwrap(), 0.5).is_err());

        fs::write(&file, "family = double-well\nnu = 1.0\n").unwrap();
        assert!(make_system(file.to_str().unwrap(), 0.5).is_err());

        assert!(make_system("no-such-system", 0.5).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["cylinder", "no-such-subcommand"]), 2);
        assert_eq!(run(["cylinder"]), 2);
        assert_eq!(run(["cylinder", "simulate", "--no-such-flag"]), 2);
    }
}
