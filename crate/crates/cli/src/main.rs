//! Command-line driver: each subcommand writes CSV (or JSON) data files plus a
//! `<command>-manifest.json` describing the run into `--out-dir`.
//!
//! Energies are in units of the Ising coupling `mu`, times in units of `1/mu`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use z2scars::hamiltonian::build_ising;
use z2scars::scalar::Amplitude;
use z2scars::scars::{norm_constant_formula, scar_in_sector, scar_state, tower_labels};
use z2scars::tracker::{TrackingMode, TrackingPolicy};
use z2scars::{
    diagonalize, dynamics, gauge, preset_path, s_rmt, scan, track, ModelParams, ScarLabel, SectorBasis, SymmetrySector,
    Tower,
};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Model(#[from] z2scars::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("configuration: {0}")]
    Config(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use z2scars::Error as E;
        match self {
            CliError::Model(e) => match e {
                E::InvalidLength(_) => 10,
                E::TooLarge { .. } => 11,
                E::InvalidSector(_) => 12,
                E::InvalidParams(_) => 13,
                E::DimensionMismatch { .. } => 14,
                E::ComplexSector { .. } => 15,
                E::SolverFailure => 16,
                E::TooFewLevels(_) => 17,
                E::NotNormalized(_) => 18,
                E::VanishingState { .. } => 19,
                E::InvalidLabel(_) => 20,
                E::NoDualityMatch(_) => 21,
                E::UnknownPath(_) => 22,
                E::InvalidPath(_) => 23,
                E::LostState { .. } => 24,
            },
            CliError::Io(_) => 30,
            CliError::Csv(_) => 31,
            CliError::Json(_) => 32,
            CliError::Config(_) => 33,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "z2scars", version, about = "Scar towers in the mixed-field Ising chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues and half-chain entropies of symmetry blocks.
    /// Columns: sector,index,energy,entropy,entropy_rel.
    Spectrum(Common),
    /// Norm constants, effective energies and sector weights of the towers.
    /// Columns: tower,n,norm_constant,norm_constant_formula,energy_eff,sector_weight.
    Scars(Common),
    /// Follow a tower state along a parameter path.
    /// Columns: t,h,energy,entropy,overlap,eigenindex,accepted,crossing.
    Track(Common),
    /// Fidelity of (|S_0> + |S_2>)/sqrt2 (antimagnons) after a quench, one file per t.
    /// Columns: time,fidelity.
    Quench(Common),
    /// Phase map over a (t, h) grid.
    /// Columns: t,h,r_mean,s_min_rel,region,confinement,structure_factor.
    Scan(Common),
    /// Compare the Gauss-law sector of the gauged Kitaev chain with the Ising chain.
    ValidateDuality(Common),
}

/// Flags shared by all subcommands; unset flags fall back to `--config`, then
/// to the subcommand default.
#[derive(Args, Debug, Default)]
struct Common {
    /// Chain length.
    #[arg(long = "L")]
    len: Option<usize>,
    /// Transverse field; `quench` accepts a comma separated list.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Longitudinal field.
    #[arg(long, allow_hyphen_values = true)]
    h: Option<f64>,
    /// Ising coupling.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    /// Symmetry block such as `k=0,p=+1` or `k=3`, or `all`.
    #[arg(long)]
    sector: Option<String>,
    /// Path preset for `track`: `0` or `I`.
    #[arg(long)]
    path: Option<String>,
    /// `magnon` or `antimagnon`.
    #[arg(long)]
    tower: Option<String>,
    /// Excitation number of the tracked state.
    #[arg(long)]
    n: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    /// Fraction of levels dropped at each spectral edge for the gap ratio.
    #[arg(long)]
    trim: Option<f64>,
    /// Overlap acceptance threshold (`track`) or structure-factor threshold (`scan`).
    #[arg(long)]
    threshold: Option<f64>,
    /// Grid spacing for `scan`.
    #[arg(long)]
    step: Option<f64>,
    /// Largest grid value of t and h for `scan`.
    #[arg(long = "max")]
    max: Option<f64>,
    /// Largest time for `quench`.
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Time step for `quench`.
    #[arg(long)]
    dt: Option<f64>,
    /// Follow the best-overlap state at every step instead of passing crossings diabatically.
    #[arg(long)]
    adiabatic: bool,
    /// Coarsen the path's fine grid by this factor.
    #[arg(long)]
    coarsen: Option<usize>,
    /// File of `key = value` lines using the flag names above.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Flag values merged with the optional config file.
struct Settings {
    flags: Common,
    file: BTreeMap<String, String>,
}

impl Settings {
    fn load(flags: Common) -> CliResult<Self> {
        let mut file = BTreeMap::new();
        if let Some(path) = &flags.config {
            let text = fs::read_to_string(path)?;
            for (no, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
                file.insert(k.trim().trim_start_matches("--").to_string(), v.trim().to_string());
            }
        }
        Ok(Self { flags, file })
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Config(format!("{key} = {raw:?}: {e}"))),
            None => Ok(None),
        }
    }

    fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }

    fn len(&self, default: usize) -> CliResult<usize> {
        self.or(self.flags.len, "L", default)
    }

    fn params(&self) -> CliResult<ModelParams> {
        let t: f64 = self
            .or(self.flags.t.clone(), "t", "0".into())
            .and_then(|s: String| s.parse().map_err(|e| CliError::Config(format!("t = {s:?}: {e}"))))?;
        let params =
            ModelParams::new(t, self.or(self.flags.h, "h", 0.0)?).with_mu(self.or(self.flags.mu, "mu", 1.0)?);
        params.validate()?;
        Ok(params)
    }

    fn out_dir(&self) -> CliResult<PathBuf> {
        let dir = self.or(self.flags.out_dir.clone(), "out-dir", PathBuf::from("."))?;
        fs::create_dir_all(&dir)?;
        Ok(dir)
    }
}

/// Record of one invocation.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    parameters: serde_json::Value,
    seed: Option<u64>,
    version: String,
    started: String,
    finished: String,
    outputs: Vec<String>,
}

fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn file_name(dir: &Path, name: &str, outputs: &mut Vec<String>) -> PathBuf {
    outputs.push(name.to_string());
    dir.join(name)
}

#[derive(Serialize)]
struct SpectrumRow {
    sector: String,
    index: usize,
    energy: f64,
    entropy: f64,
    entropy_rel: f64,
}

fn spectrum_rows<T: Amplitude>(basis: Arc<SectorBasis>, params: &ModelParams) -> CliResult<Vec<SpectrumRow>> {
    let sol = diagonalize(&build_ising::<T>(params, &basis)?)?;
    let baseline = s_rmt(basis.len());
    let sector = basis.sector().to_string();
    Ok(sol
        .energies()
        .iter()
        .zip(sol.entropies())
        .enumerate()
        .map(|(index, (&energy, entropy))| SpectrumRow {
            sector: sector.clone(),
            index,
            energy,
            entropy,
            entropy_rel: entropy / baseline,
        })
        .collect())
}

fn run_spectrum(s: &Settings, outputs: &mut Vec<String>) -> CliResult<serde_json::Value> {
    let len = s.len(8)?;
    let params = s.params()?;
    let sector_arg = s.or(s.flags.sector.clone(), "sector", "k=0,p=+1".to_string())?;
    let sectors = if sector_arg.trim() == "all" {
        SymmetrySector::all(len)
    } else {
        let parsed: SymmetrySector = sector_arg.parse().map_err(z2scars::Error::InvalidSector)?;
        vec![SymmetrySector::new(len, parsed.momentum(), parsed.parity())?]
    };
    let mut rows = Vec::new();
    for sector in &sectors {
        let basis = Arc::new(SectorBasis::new(len, *sector)?);
        if basis.is_empty() {
            continue;
        }
        if basis.is_real() {
            rows.extend(spectrum_rows::<f64>(basis, &params)?);
        } else {
            rows.extend(spectrum_rows::<Complex64>(basis, &params)?);
        }
    }
    write_csv(&file_name(&s.out_dir()?, "spectrum.csv", outputs), &rows)?;
    Ok(json!({ "L": len, "params": params, "sector": sector_arg }))
}

#[derive(Serialize)]
struct ScarRow {
    tower: String,
    n: usize,
    norm_constant: f64,
    norm_constant_formula: f64,
    energy_eff: f64,
    sector_weight: f64,
}

fn towers(s: &Settings) -> CliResult<Vec<Tower>> {
    match s.get(s.flags.tower.clone(), "tower")? {
        Some(name) => Ok(vec![name.parse::<Tower>()?]),
        None => Ok(vec![Tower::Magnon, Tower::Antimagnon]),
    }
}

fn run_scars(s: &Settings, outputs: &mut Vec<String>) -> CliResult<serde_json::Value> {
    let len = s.len(12)?;
    let params = s.params()?;
    let basis = SectorBasis::new(len, SymmetrySector::zero_even())?;
    let mut rows = Vec::new();
    for tower in towers(s)? {
        for label in tower_labels(tower, len) {
            let (_, constant) = scar_state(label, len)?;
            let (_, weight) = scar_in_sector(label, &basis)?;
            rows.push(ScarRow {
                tower: tower.to_string(),
                n: label.n,
                norm_constant: constant,
                norm_constant_formula: norm_constant_formula(len, label.n),
                energy_eff: label.effective_energy(&params, len),
                sector_weight: weight,
            });
        }
    }
    write_csv(&file_name(&s.out_dir()?, "scars.csv", outputs), &rows)?;
    Ok(json!({ "L": len, "params": params }))
}

fn run_track(s: &Settings, outputs: &mut Vec<String>) -> CliResult<serde_json::Value> {
    let len = s.len(10)?;
    let mut path = preset_path(&s.or(s.flags.path.clone(), "path", "0".to_string())?)?;
    if let Some(f) = s.get(s.flags.coarsen, "coarsen")? {
        path = path.with_fine_step_scale(f)?;
    }
    let tower: Tower = s
        .or(s.flags.tower.clone(), "tower", "antimagnon".to_string())?
        .parse()?;
    let label = ScarLabel::new(tower, s.or(s.flags.n, "n", 0)?)?;
    let policy = TrackingPolicy {
        accept_threshold: s.or(s.flags.threshold, "threshold", 0.7)?,
        mode: if s.flags.adiabatic {
            TrackingMode::Adiabatic
        } else {
            TrackingMode::Diabatic
        },
        mu: s.or(s.flags.mu, "mu", 1.0)?,
        ..TrackingPolicy::default()
    };
    let name = format!("track_{}_{}_{}_L{len}.csv", path.name, tower, label.n);
    let target = file_name(&s.out_dir()?, &name, outputs);
    let meta = json!({ "L": len, "path": path, "label": label, "policy": policy });
    match track(&path, label, len, &policy) {
        Ok(record) => {
            write_csv(&target, &record.entries)?;
            Ok(json!({ "run": meta, "initial_overlap": record.initial_overlap }))
        }
        Err(z2scars::Error::LostState { step, t, h, record }) => {
            // keep the partial record before reporting the loss
            write_csv(&target, &record.entries)?;
            Err(z2scars::Error::LostState { step, t, h, record }.into())
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct FidelityRow {
    time: f64,
    fidelity: f64,
}

fn run_quench(s: &Settings, outputs: &mut Vec<String>) -> CliResult<serde_json::Value> {
    let len = s.len(12)?;
    let h = s.or(s.flags.h, "h", 0.5)?;
    let mu = s.or(s.flags.mu, "mu", 1.0)?;
    let t_list = s.or(s.flags.t.clone(), "t", "0.25,0.5".to_string())?;
    let params: Vec<ModelParams> = t_list
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map(|t| ModelParams::new(t, h).with_mu(mu))
                .map_err(|e| CliError::Config(format!("t = {v:?}: {e}")))
        })
        .collect::<CliResult<_>>()?;
    let times = dynamics::time_grid(s.or(s.flags.t_max, "t-max", 50.0)?, s.or(s.flags.dt, "dt", 0.05)?);
    let traces = z2scars::quench_experiment(&params, len, &times)?;
    let dir = s.out_dir()?;
    let mut means = Vec::new();
    for (p, trace) in params.iter().zip(&traces) {
        let rows: Vec<FidelityRow> = trace
            .times
            .iter()
            .zip(&trace.fidelity)
            .map(|(&time, &fidelity)| FidelityRow { time, fidelity })
            .collect();
        write_csv(&file_name(&dir, &format!("quench_t{}.csv", p.t), outputs), &rows)?;
        means.push(json!({ "t": p.t, "long_time_mean": trace.long_time_mean() }));
    }
    Ok(json!({ "L": len, "h": h, "mu": mu, "t": t_list, "times": times.len(), "summary": means }))
}

#[derive(Serialize)]
struct ScanRow {
    t: f64,
    h: f64,
    r_mean: f64,
    s_min_rel: f64,
    region: String,
    confinement: String,
    structure_factor: f64,
}

fn run_scan(s: &Settings, outputs: &mut Vec<String>) -> CliResult<serde_json::Value> {
    let len = s.len(12)?;
    let mut config = scan::ScanConfig::new(len);
    let step = s.or(s.flags.step, "step", 0.05)?;
    let max = s.or(s.flags.max, "max", 1.5)?;
    config.t_values = scan::grid_axis(step, max, step);
    config.h_values = config.t_values.clone();
    config.mu = s.or(s.flags.mu, "mu", 1.0)?;
    config.trim = s.or(s.flags.trim, "trim", 0.1)?;
    config.thresholds.structure_factor = s.or(s.flags.threshold, "threshold", 0.2)?;
    let points = z2scars::scan_grid(&config)?;
    let rows: Vec<ScanRow> = points
        .iter()
        .map(|p| ScanRow {
            t: p.t,
            h: p.h,
            r_mean: p.r_mean,
            s_min_rel: p.s_min_rel,
            region: p.region.to_string(),
            confinement: p.confinement.to_string(),
            structure_factor: p.structure_factor,
        })
        .collect();
    write_csv(&file_name(&s.out_dir()?, "scan.csv", outputs), &rows)?;
    let violations = scan::confined_scar_points(&points).len();
    Ok(json!({ "config": config, "qmbs_and_cc_points": violations }))
}

fn run_duality(s: &Settings, outputs: &mut Vec<String>) -> CliResult<serde_json::Value> {
    let len = s.len(4)?;
    let params = s.params()?;
    let report = gauge::validate_duality(&params, len)?;
    let path = file_name(&s.out_dir()?, "duality.json", outputs);
    fs::write(&path, serde_json::to_string_pretty(&report)?)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(json!({ "L": len, "params": params }))
}

fn run(cli: Cli) -> CliResult<()> {
    let (name, common) = match cli.command {
        Command::Spectrum(c) => ("spectrum", c),
        Command::Scars(c) => ("scars", c),
        Command::Track(c) => ("track", c),
        Command::Quench(c) => ("quench", c),
        Command::Scan(c) => ("scan", c),
        Command::ValidateDuality(c) => ("validate-duality", c),
    };
    let settings = Settings::load(common)?;
    if let Some(jobs) = settings.get(settings.flags.jobs, "jobs")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let started = chrono::Utc::now().to_rfc3339();
    let mut outputs = Vec::new();
    let result = match name {
        "spectrum" => run_spectrum(&settings, &mut outputs),
        "scars" => run_scars(&settings, &mut outputs),
        "track" => run_track(&settings, &mut outputs),
        "quench" => run_quench(&settings, &mut outputs),
        "scan" => run_scan(&settings, &mut outputs),
        _ => run_duality(&settings, &mut outputs),
    };
    if !outputs.is_empty() {
        let manifest = RunManifest {
            command: name.to_string(),
            parameters: match &result {
                Ok(v) => v.clone(),
                Err(e) => json!({ "error": e.to_string() }),
            },
            seed: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started,
            finished: chrono::Utc::now().to_rfc3339(),
            outputs: outputs.clone(),
        };
        let dir = settings.out_dir()?;
        fs::write(
            dir.join(format!("{name}-manifest.json")),
            serde_json::to_string_pretty(&manifest)?,
        )?;
    }
    result.map(|_| ())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
