//! The `kickchain` command line: `spectrum`, `dynamics`, `dd-plan`, `scaling`.

pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ChainConfig;
use crate::ddcalc::{decoupled_sites, enumerate_levels, kick_for_count, kick_for_site, rabi_frequency, EXACT_PHASE_TOL};
use crate::dynamics::{
    edge_spin_spectrum, lifetime, run_dynamics, saturation_entropy, time_averaged_imbalance, Observables,
    IMBALANCE_WINDOW, MIN_SPECTRUM_SAMPLES, SATURATION_WINDOW,
};
use crate::error::{Error, Result};
use crate::floquet::{EvolutionSchedule, FloquetOperator};
use crate::scaling::{
    boundary_trace, collapse_with_bootstrap, collapsed_curve, crossing_at, CollapseGrid, Grid2, ScalingDataset,
    ScalingPoint, DEFAULT_BOOTSTRAP, DEFAULT_BOUNDARY_LEVEL,
};
use crate::spectral::{
    diagonalize_floquet, sample_offsets, SpectralDiagnostics, DEFAULT_OFFSET_RANGE, DEFAULT_REALIZATIONS,
};
use crate::state::StatePreset;
use output::{fmt_g12, write_json, CsvTable, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "kickchain", version, about = "Kicked XY spin chain: Floquet spectra, dynamics, DD planning, scaling")]
pub struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Floquet diagnostics (I_F, O_F, S_F, r) over a (K, J) grid.
    Spectrum(SpectrumArgs),
    /// Stroboscopic evolution of one initial state.
    Dynamics(DynamicsArgs),
    /// Decoupled sites and kick strengths.
    #[command(name = "dd-plan")]
    DdPlan(DdPlanArgs),
    /// Finite-size data collapse of spectrum CSVs.
    Scaling(ScalingArgs),
}

/// Model parameters: a JSON config file, overridden by flags.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Flat JSON config with keys L, J, Omega, K, T, j0_offset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long = "J")]
    pub j: Option<f64>,
    #[arg(long = "K")]
    pub k: Option<f64>,
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub j0_offset: Option<f64>,
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<ChainConfig> {
        let mut cfg = match &self.config {
            Some(path) => ChainConfig::load(path)?,
            None => {
                let l = self.l.ok_or_else(|| Error::config("chain length missing: pass --L or --config"))?;
                ChainConfig::new(l, 0.0, 0.0)
            }
        };
        if let Some(v) = self.l {
            cfg.l = v;
        }
        if let Some(v) = self.j {
            cfg.j = v;
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(v) = self.t {
            cfg.t = v;
        }
        if let Some(v) = self.omega {
            cfg.omega = v;
        }
        if let Some(v) = self.j0_offset {
            cfg.j0_offset = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Kick strengths: `a,b,c` or `start:stop:step` (default: the config K).
    #[arg(long = "k-values")]
    pub k_values: Option<String>,
    /// Couplings, same syntax (default: the config J).
    #[arg(long = "j-values")]
    pub j_values: Option<String>,
    #[arg(long, default_value_t = DEFAULT_REALIZATIONS)]
    pub realizations: usize,
    /// Centre offsets are drawn uniformly from [-range, range].
    #[arg(long, default_value_t = DEFAULT_OFFSET_RANGE)]
    pub offset_range: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Initial state for O_F.
    #[arg(long, default_value = "neel")]
    pub state: String,
    /// I_F contour level written to boundary.csv.
    #[arg(long, default_value_t = DEFAULT_BOUNDARY_LEVEL)]
    pub boundary_level: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "neel")]
    pub state: String,
    #[arg(long, default_value_t = 200)]
    pub kicks: usize,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Subsystem size A for S_A and F_A (sites 1..=A).
    #[arg(long = "A")]
    pub a: Option<usize>,
    /// Record the half-chain entropy (default: on for L <= 16).
    #[arg(long)]
    pub half_chain: Option<bool>,
    /// Site whose P_up is Fourier analysed.
    #[arg(long, default_value_t = 1)]
    pub site: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DdPlanArgs {
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long = "T", default_value_t = crate::config::DEFAULT_PERIOD)]
    pub t: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Kick strength for a target number of decoupled spins.
    #[arg(long, conflicts_with_all = ["site", "m"])]
    pub count: Option<usize>,
    /// Kick strength decoupling this site...
    #[arg(long, requires = "m")]
    pub site: Option<usize>,
    /// ...at phase m*pi.
    #[arg(long)]
    pub m: Option<u32>,
    /// Write CSV here instead of printing a table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    /// Spectrum CSV files.
    #[arg(long = "input", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// `O_F` or `S_F` (collapsed as S_F / L).
    #[arg(long, default_value = "O_F")]
    pub observable: String,
    /// Coupling to analyse when the inputs hold several.
    #[arg(long = "J")]
    pub j: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_BOOTSTRAP)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `a,b,c` or an inclusive `start:stop:step` range.
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::config(format!("cannot parse value list {s:?}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || b < a {
            return Err(bad());
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| a + i as f64 * step).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

/// Entry point shared by the binary and tests; returns the process exit code.
pub fn run_from_args(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, argv: &[String]) -> Result<()> {
    let jobs = cli.jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Spectrum(a) => cmd_spectrum(&a, argv),
        Command::Dynamics(a) => cmd_dynamics(&a, argv),
        Command::DdPlan(a) => cmd_ddplan(&a, argv),
        Command::Scaling(a) => cmd_scaling(&a, argv),
    })
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub k: f64,
    pub j: f64,
    pub l: usize,
    pub realization: usize,
    pub j0_offset: f64,
    pub ipr: f64,
    pub staggered_mag: f64,
    pub entropy: f64,
    pub gap_ratio: f64,
}

pub const SPECTRUM_HEADER: [&str; 9] = ["K", "J", "L", "realization", "j0_offset", "I_F", "O_F", "S_F", "r_bar"];

/// Rows in `(J, K, realization)` order; the static propagator is shared per `J`.
pub fn spectrum_rows(
    base: &ChainConfig,
    ks: &[f64],
    js: &[f64],
    offsets: &[f64],
    preset: &StatePreset,
) -> Result<Vec<SpectrumRow>> {
    let psi0 = preset.build(base.l)?;
    let mut rows = Vec::with_capacity(ks.len() * js.len() * offsets.len());
    for &j in js {
        let cfg_j = ChainConfig { j, ..*base };
        cfg_j.validate()?;
        let u_j = FloquetOperator::dense(&cfg_j)?;
        let tasks: Vec<(f64, usize, f64)> = ks
            .iter()
            .flat_map(|&k| offsets.iter().enumerate().map(move |(r, &o)| (k, r, o)))
            .collect();
        let chunk: Vec<SpectrumRow> = tasks
            .par_iter()
            .map(|&(k, r, off)| {
                let offset = base.j0_offset + off;
                let u = u_j.rekick(k, offset)?;
                let spec = diagonalize_floquet(&u)?;
                let d = SpectralDiagnostics::compute(&spec, &psi0)?;
                Ok(SpectrumRow {
                    k,
                    j,
                    l: base.l,
                    realization: r,
                    j0_offset: offset,
                    ipr: d.ipr,
                    staggered_mag: d.staggered_mag,
                    entropy: d.entropy,
                    gap_ratio: d.gap_ratio,
                })
            })
            .collect::<Result<_>>()?;
        rows.extend(chunk);
    }
    Ok(rows)
}

pub fn cmd_spectrum(a: &SpectrumArgs, argv: &[String]) -> Result<()> {
    let started = Instant::now();
    let base = a.model.resolve()?;
    let ks = a.k_values.as_deref().map(parse_values).transpose()?.unwrap_or_else(|| vec![base.k]);
    let js = a.j_values.as_deref().map(parse_values).transpose()?.unwrap_or_else(|| vec![base.j]);
    if a.realizations == 0 {
        return Err(Error::config("--realizations must be >= 1"));
    }
    if base.l > crate::config::dense_max_l() {
        return Err(Error::TooLarge { l: base.l, max: crate::config::dense_max_l(), what: "spectral analysis" });
    }
    let preset: StatePreset = a.state.parse()?;
    let offsets = sample_offsets(a.realizations, a.offset_range, a.seed);
    let rows = spectrum_rows(&base, &ks, &js, &offsets, &preset)?;

    prepare_out(&a.out)?;
    let mut manifest = RunManifest::new("spectrum", argv, config_json(&base), Some(a.seed));
    let mut table = CsvTable::create(&a.out.join("spectrum.csv"), &SPECTRUM_HEADER)?;
    for r in &rows {
        table.row([
            fmt_g12(r.k),
            fmt_g12(r.j),
            r.l.to_string(),
            r.realization.to_string(),
            fmt_g12(r.j0_offset),
            fmt_g12(r.ipr),
            fmt_g12(r.staggered_mag),
            fmt_g12(r.entropy),
            fmt_g12(r.gap_ratio),
        ])?;
    }
    let path = table.finish()?;
    manifest.add_output(&a.out, &path)?;

    if ks.len() >= 2 && js.len() >= 2 {
        let triples: Vec<(f64, f64, f64)> = rows.iter().map(|r| (r.k, r.j, r.ipr)).collect();
        let grid = Grid2::from_triples(&triples)?;
        let mut table = CsvTable::create(&a.out.join("boundary.csv"), &["line", "K", "J"])?;
        for (i, line) in boundary_trace(&grid, a.boundary_level).iter().enumerate() {
            for &(k, j) in line {
                table.row([i.to_string(), fmt_g12(k), fmt_g12(j)])?;
            }
        }
        let path = table.finish()?;
        manifest.add_output(&a.out, &path)?;
        for &j in &js {
            if let Some(k) = crossing_at(&grid, a.boundary_level, j) {
                println!("I_F = {} crossed at K = {} for J = {}", a.boundary_level, fmt_g12(k), fmt_g12(j));
            }
        }
    }
    println!("{} rows written to {}", rows.len(), a.out.join("spectrum.csv").display());
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.write(&a.out)?;
    Ok(())
}

fn config_json(cfg: &ChainConfig) -> serde_json::Value {
    serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null)
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicsSummary {
    pub state: String,
    pub kicks: usize,
    pub time_averaged_imbalance: Option<f64>,
    pub saturation_entropy: Option<f64>,
    pub peak_frequency: Option<f64>,
    pub rabi_frequency: f64,
    pub lifetime: Option<f64>,
    pub lifetime_open_ended: Option<bool>,
}

pub fn cmd_dynamics(a: &DynamicsArgs, argv: &[String]) -> Result<()> {
    let started = Instant::now();
    let cfg = a.model.resolve()?;
    let preset: StatePreset = a.state.parse()?;
    let psi0 = preset.build(cfg.l)?;
    let schedule = EvolutionSchedule::new(a.kicks, a.stride)?;
    let mut obs = Observables::default();
    if let Some(sub) = a.a {
        obs = obs.with_subsystem(sub);
    }
    if a.half_chain.unwrap_or(cfg.l <= 16) {
        obs = obs.with_half_chain_entropy();
    }
    let ts = run_dynamics(&cfg, &psi0, &schedule, obs)?;

    prepare_out(&a.out)?;
    let mut manifest = RunManifest::new("dynamics", argv, config_json(&cfg), None);

    let mut raster = CsvTable::create(&a.out.join("raster.csv"), &["t", "j", "P_up"])?;
    for (n, row) in ts.kicks.iter().zip(&ts.p_up) {
        let t = fmt_g12(*n as f64 * cfg.t);
        for (j, p) in row.iter().enumerate() {
            raster.row([t.clone(), (j + 1).to_string(), fmt_g12(*p)])?;
        }
    }
    let path = raster.finish()?;
    manifest.add_output(&a.out, &path)?;

    let opt = |v: Option<&Vec<f64>>, i: usize| v.map(|s| fmt_g12(s[i])).unwrap_or_default();
    let mut series =
        CsvTable::create(&a.out.join("series.csv"), &["kick", "t", "imbalance", "S_A", "F_A", "S_half", "sz1"])?;
    for i in 0..ts.len() {
        series.row([
            ts.kicks[i].to_string(),
            fmt_g12(ts.kicks[i] as f64 * cfg.t),
            fmt_g12(ts.imbalance[i]),
            opt(ts.subsystem_entropy.as_ref(), i),
            opt(ts.subsystem_fidelity.as_ref(), i),
            opt(ts.half_chain_entropy.as_ref(), i),
            fmt_g12(ts.sz1[i]),
        ])?;
    }
    let path = series.finish()?;
    manifest.add_output(&a.out, &path)?;

    let mut summary = DynamicsSummary {
        state: a.state.clone(),
        kicks: a.kicks,
        time_averaged_imbalance: time_averaged_imbalance(&ts, IMBALANCE_WINDOW).ok(),
        saturation_entropy: saturation_entropy(&ts, SATURATION_WINDOW).ok(),
        peak_frequency: None,
        rabi_frequency: rabi_frequency(&cfg),
        lifetime: None,
        lifetime_open_ended: None,
    };
    if ts.len() >= MIN_SPECTRUM_SAMPLES {
        let spec = edge_spin_spectrum(&ts, a.site)?;
        let mut table = CsvTable::create(&a.out.join("spectrum.csv"), &["freq", "magnitude"])?;
        for (f, m) in spec.frequencies.iter().zip(&spec.magnitudes) {
            table.row([fmt_g12(*f), fmt_g12(*m)])?;
        }
        let path = table.finish()?;
        manifest.add_output(&a.out, &path)?;
        summary.peak_frequency = Some(spec.peak_frequency);
    }
    // Left out when the records are too sparse to resolve the envelope.
    if let Ok(est) = lifetime(&ts) {
        summary.lifetime = Some(est.tau);
        summary.lifetime_open_ended = Some(est.open_ended);
    }
    let path = a.out.join("summary.json");
    write_json(&path, &summary)?;
    manifest.add_output(&a.out, &path)?;

    if let Some(v) = summary.time_averaged_imbalance {
        println!("time-averaged imbalance [{}T, {}T]: {}", IMBALANCE_WINDOW.0, IMBALANCE_WINDOW.1, fmt_g12(v));
    }
    if let Some(v) = summary.saturation_entropy {
        println!("saturation entropy [{}T, {}T]: {}", SATURATION_WINDOW.0, SATURATION_WINDOW.1, fmt_g12(v));
    }
    if let Some(f) = summary.peak_frequency {
        println!("P_up({}) peak: {} per kick (omega_d = {})", a.site, fmt_g12(f), fmt_g12(summary.rabi_frequency));
    }
    println!("{} records written to {}", ts.len(), a.out.display());
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.write(&a.out)?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
struct PlanRow {
    l: Option<usize>,
    k: f64,
    n_d: usize,
    sites: Vec<usize>,
    omega_d: f64,
}

pub fn cmd_ddplan(a: &DdPlanArgs, argv: &[String]) -> Result<()> {
    let cfg = ChainConfig::new(a.l, 0.0, 0.0).with_period(a.t).with_omega(a.omega);
    cfg.validate()?;
    let omega_d = rabi_frequency(&cfg);
    let plan_at = |spacing: Option<usize>, k: f64| {
        let sites = decoupled_sites(&cfg, k, EXACT_PHASE_TOL);
        PlanRow { l: spacing, k, n_d: sites.len(), sites, omega_d }
    };
    let rows: Vec<PlanRow> = if let Some(n) = a.count {
        let k = kick_for_count(a.l, n, a.t)?;
        vec![plan_at(Some((a.l - 1) / n), k)]
    } else if let Some(j) = a.site {
        let k = kick_for_site(&cfg, j, a.m.unwrap_or(1))?;
        vec![plan_at(None, k)]
    } else {
        enumerate_levels(&cfg)
            .into_iter()
            .map(|lv| PlanRow { l: Some(lv.spacing), k: lv.k, n_d: lv.sites.len(), sites: lv.sites, omega_d: lv.omega_d })
            .collect()
    };
    let fields = |r: &PlanRow| {
        let sites: Vec<String> = r.sites.iter().map(|s| s.to_string()).collect();
        [
            r.l.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
            fmt_g12(r.k),
            r.n_d.to_string(),
            sites.join(" "),
            fmt_g12(r.omega_d),
        ]
    };
    let header = ["l", "K", "N_d", "sites", "omega_d"];
    match &a.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                prepare_out(dir)?;
            }
            let mut table = CsvTable::create(path, &header)?;
            for r in &rows {
                table.row(fields(r))?;
            }
            let path = table.finish()?;
            let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
            let mut manifest = RunManifest::new("dd-plan", argv, config_json(&cfg), None);
            manifest.add_output(&dir, &path)?;
            manifest.write(&dir)?;
        }
        None => {
            let cells: Vec<[String; 5]> = rows.iter().map(fields).collect();
            let width = |c: usize| cells.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap();
            let widths: Vec<usize> = (0..5).map(width).collect();
            let line = |r: [&str; 5]| {
                r.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
            };
            println!("{}", line(header));
            for r in &cells {
                println!("{}", line([&r[0], &r[1], &r[2], &r[3], &r[4]]));
            }
        }
    }
    Ok(())
}

/// Reads spectrum CSVs into a collapse dataset for `observable` at coupling `j`.
pub fn load_scaling_dataset(paths: &[PathBuf], observable: &str, j: Option<f64>) -> Result<ScalingDataset> {
    let (column, per_site) = match observable {
        "O_F" => ("O_F", false),
        "S_F" | "S_F/L" => ("S_F", true),
        other => return Err(Error::config(format!("unknown observable {other:?}; use O_F or S_F"))),
    };
    let mut rows: Vec<(f64, usize, f64, f64)> = Vec::new();
    for path in paths {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(output::csv_err)?;
        let headers = reader.headers().map_err(output::csv_err)?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Data(format!("{}: missing column {name}", path.display())))
        };
        let (ck, cj, cl, cv) = (col("K")?, col("J")?, col("L")?, col(column)?);
        for rec in reader.records() {
            let rec = rec.map_err(output::csv_err)?;
            let num = |c: usize| {
                rec.get(c)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Data(format!("{}: bad value in column {}", path.display(), &headers[c])))
            };
            let l = num(cl)?;
            if l < 1.0 || l.fract() != 0.0 {
                return Err(Error::Data(format!("{}: bad L value {l}", path.display())));
            }
            let v = num(cv)?;
            rows.push((num(cj)?, l as usize, num(ck)?, if per_site { v / l } else { v }));
        }
    }
    let mut couplings: Vec<f64> = rows.iter().map(|r| r.0).collect();
    couplings.sort_by(f64::total_cmp);
    couplings.dedup();
    let j = match (j, couplings.as_slice()) {
        (Some(j), _) => j,
        (None, [only]) => *only,
        (None, []) => return Err(Error::Data("inputs contain no rows".into())),
        (None, _) => return Err(Error::config("inputs hold several J values; pick one with --J")),
    };
    let mut points: Vec<ScalingPoint> = Vec::new();
    for &(_, l, k, v) in rows.iter().filter(|r| (r.0 - j).abs() < 1e-9) {
        match points.iter_mut().find(|p| p.l == l && p.k == k) {
            Some(p) => p.samples.push(v),
            None => points.push(ScalingPoint { l, k, samples: vec![v] }),
        }
    }
    points.sort_by(|a, b| a.l.cmp(&b.l).then(a.k.total_cmp(&b.k)));
    let name = if per_site { "S_F/L" } else { "O_F" };
    ScalingDataset::new(name, points)
}

pub fn cmd_scaling(a: &ScalingArgs, argv: &[String]) -> Result<()> {
    let started = Instant::now();
    let ds = load_scaling_dataset(&a.inputs, &a.observable, a.j)?;
    let grid = CollapseGrid::default_for(&ds);
    let result = collapse_with_bootstrap(&ds, &grid, a.bootstrap, a.seed)?;

    prepare_out(&a.out)?;
    let inputs: Vec<String> = a.inputs.iter().map(|p| p.display().to_string()).collect();
    let cfg = serde_json::json!({ "observable": ds.observable, "J": a.j, "inputs": inputs, "sizes": ds.sizes() });
    let mut manifest = RunManifest::new("scaling", argv, cfg, Some(a.seed));
    let path = a.out.join("collapse.json");
    write_json(&path, &result)?;
    manifest.add_output(&a.out, &path)?;
    let mut table = CsvTable::create(&a.out.join("collapsed.csv"), &["L", "K", "x", "value"])?;
    for (l, k, x, v) in collapsed_curve(&ds, result.k_c, result.nu) {
        table.row([l.to_string(), fmt_g12(k), fmt_g12(x), fmt_g12(v)])?;
    }
    let path = table.finish()?;
    manifest.add_output(&a.out, &path)?;
    println!(
        "{}: K_c = {} (+- {}), nu = {} (+- {}){}",
        ds.observable,
        fmt_g12(result.k_c),
        result.k_c_std.map(fmt_g12).unwrap_or_else(|| "n/a".into()),
        fmt_g12(result.nu),
        result.nu_std.map(fmt_g12).unwrap_or_else(|| "n/a".into()),
        if result.non_critical { " [non-critical: rescaling does not improve the collapse]" } else { "" }
    );
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.write(&a.out)?;
    Ok(())
}
