use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ga2d::config::RunConfig;
use ga2d::evolver::{initial_state, SplitStepper};
use ga2d::oracle::ExactPropagator;
use ga2d::{geometry, output, presets, spectral, Error, SystemConfig};
use rayon::prelude::*;

/// Largest lattice accepted by `oracle-compare`.
const ORACLE_LIMIT: usize = 40;
/// Comparison checkpoints per run in `oracle-compare`.
const CHECKPOINTS: usize = 10;

#[derive(Parser)]
#[command(name = "ga2d", version, about = "Giant atoms on a 2D coupled-cavity lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the split-operator evolution and write result files.
    Simulate {
        #[command(flatten)]
        source: Sources,
        /// Output directory; overrides `outputs.dir`. With several runs each
        /// one goes to a subdirectory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of runs executed concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print resolvent predictions for every atom.
    Predict {
        #[command(flatten)]
        source: Source,
    },
    /// Print subradiance verdicts and decoherence-free pairs.
    Check {
        #[command(flatten)]
        source: Source,
    },
    /// List presets, or dump one as a config file.
    Preset {
        #[arg(long)]
        name: Option<String>,
        /// Write the config here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the stepper with exact diagonalization for several steps.
    OracleCompare {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', default_values_t = [0.02, 0.01, 0.005])]
        dt_list: Vec<f64>,
        /// Resize the lattice before comparing.
        #[arg(long)]
        size: Option<usize>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
#[group(required = true, multiple = true)]
struct Sources {
    #[arg(long)]
    config: Vec<PathBuf>,
    #[arg(long)]
    name: Vec<String>,
}

/// A command failure and its exit code.
#[derive(Debug)]
enum Failure {
    Validation(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::LatticeTooLarge { .. } => Failure::Io(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Simulate { source, out, jobs } => simulate(&source, out.as_deref(), jobs),
        Command::Predict { source } => predict(&source),
        Command::Check { source } => check(&source),
        Command::Preset { name, out } => preset(name.as_deref(), out.as_deref()),
        Command::OracleCompare { source, dt_list, size } => oracle_compare(&source, &dt_list, size),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(value) = std::env::var("GA2D_THREADS") else {
        return Ok(());
    };
    let n: usize =
        value.trim().parse().map_err(|_| format!("GA2D_THREADS must be a positive integer, got '{value}'"))?;
    if n == 0 {
        return Err("GA2D_THREADS must be a positive integer, got '0'".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn load(config: Option<&Path>, name: Option<&str>) -> std::result::Result<RunConfig, Failure> {
    match (config, name) {
        (Some(path), _) => Ok(RunConfig::from_path(path)?),
        (None, Some(name)) => Ok(RunConfig::from_preset(name)?),
        (None, None) => Err(Failure::Validation("one of --config or --name is required".into())),
    }
}

fn load_source(source: &Source) -> std::result::Result<(RunConfig, SystemConfig), Failure> {
    let run = load(source.config.as_deref(), source.name.as_deref())?;
    let system = run.system()?;
    Ok((run, system))
}

fn simulate(source: &Sources, out: Option<&Path>, jobs: usize) -> CmdResult {
    let mut runs: Vec<(String, RunConfig)> = Vec::new();
    for path in &source.config {
        let label = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        runs.push((label, load(Some(path), None)?));
    }
    for name in &source.name {
        runs.push((name.clone(), load(None, Some(name))?));
    }
    let single = runs.len() == 1;
    let dirs: Vec<PathBuf> = runs
        .iter()
        .map(|(label, run)| match out {
            Some(dir) if single => dir.to_path_buf(),
            Some(dir) => dir.join(label),
            None => run.outputs.dir.clone(),
        })
        .collect();

    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| Failure::Io(e.to_string()))?;
    let results: Vec<CmdResult> =
        pool.install(|| runs.par_iter().zip(&dirs).map(|((_, run), dir)| simulate_one(run, dir)).collect());
    // report the most severe failure
    results.into_iter().filter_map(Result::err).max_by_key(Failure::code).map_or(Ok(()), Err)
}

fn simulate_one(run: &RunConfig, dir: &Path) -> CmdResult {
    let system = run.system()?;
    let params = run.params()?;
    let initial = initial_state(&system, run.initial_kind(&system)?)?;
    let evolution = ga2d::evolve(&system, &initial, &params)?;
    let written = output::write_run(dir, run, &evolution)?;
    if let Some(warning) = &evolution.diagnostics.wrap_warning {
        eprintln!("warning: {warning}");
    }
    println!("{}: {} steps, {} files written", dir.display(), evolution.diagnostics.steps, written.len());
    Ok(())
}

fn predict(source: &Source) -> CmdResult {
    let (run, system) = load_source(source)?;
    let hopping = run.lattice.j;
    for (i, atom) in system.atoms().iter().enumerate() {
        let not_subradiant = || Failure::Validation(format!("atom {i} is not perfectly subradiant"));
        if atom.detuning() != 0.0 {
            return Err(Failure::Validation(format!("atom {i} has nonzero detuning {}", atom.detuning())));
        }
        if !geometry::is_perfectly_subradiant(
            atom,
            geometry::DEFAULT_CONTOUR_SAMPLES,
            geometry::DEFAULT_SUBRADIANCE_TOL,
        ) {
            return Err(not_subradiant());
        }
        let slope = spectral::band_center_slope(atom, hopping).map_err(|_| not_subradiant())?;
        let support = geometry::bic_support_with_hopping(atom, hopping)?;
        let dressed = spectral::dressed_state(atom, hopping)?;
        println!("atom {i}");
        println!("  -dSigma/dz(0)    {slope:.9}");
        println!("  plateau          {:.6}", spectral::plateau_from_slope(slope));
        println!("  BIC peaks        {}", support.len());
        println!("  dressed atom     {:.9}", dressed.atom_weight.norm_sqr());
        println!("  dressed photonic {:.9}", dressed.photonic_weight());
        if let Some((a, b)) = geometry::split_into_rectangles(atom) {
            let (pa, pb) = (a.points()?, b.points()?);
            let (ga, gb) = (ga2d::GiantAtomSpec::new(0.0, pa)?, ga2d::GiantAtomSpec::new(0.0, pb)?);
            if let Ok(f) = spectral::interference_factor(&ga, &gb) {
                println!("  xi               {}", f.xi);
                println!("  overlap plus     {}", f.overlap_plus);
                println!("  overlap minus    {}", f.overlap_minus);
            }
        }
    }
    Ok(())
}

fn check(source: &Source) -> CmdResult {
    let (_, system) = load_source(source).map_err(|f| Failure::Io(f.message().to_string()))?;
    for (i, atom) in system.atoms().iter().enumerate() {
        let verdict = if geometry::is_perfectly_subradiant(
            atom,
            geometry::DEFAULT_CONTOUR_SAMPLES,
            geometry::DEFAULT_SUBRADIANCE_TOL,
        ) {
            "subradiant"
        } else {
            "radiant"
        };
        println!("atom {i}: {verdict}");
    }
    match geometry::dfi_pairs(&system) {
        Ok(pairs) if pairs.is_empty() => println!("DFI pairs: none"),
        Ok(pairs) => {
            let list: Vec<String> = pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
            println!("DFI pairs: {}", list.join(" "));
        }
        Err(e) => println!("DFI pairs: undefined ({e})"),
    }
    Ok(())
}

fn preset(name: Option<&str>, out: Option<&Path>) -> CmdResult {
    let Some(name) = name else {
        for n in presets::PRESET_NAMES {
            println!("{n:22} {}", presets::preset_info(n)?.description);
        }
        return Ok(());
    };
    let text = RunConfig::from_preset(name)?.to_toml_string()?;
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn oracle_compare(source: &Source, dt_list: &[f64], size: Option<usize>) -> CmdResult {
    let (run, mut system) = load_source(source)?;
    if let Some(n) = size {
        system = system.resized(n)?;
    }
    let n = system.lattice().size();
    if n > ORACLE_LIMIT {
        return Err(Failure::Io(format!("lattice too large for the oracle: N = {n} (limit {ORACLE_LIMIT})")));
    }
    if dt_list.is_empty() {
        return Err(Failure::Validation("--dt-list is empty".into()));
    }
    let t_max = run.evolution.t_max;
    let mut steps_per_checkpoint = Vec::with_capacity(dt_list.len());
    for &dt in dt_list {
        ga2d::EvolutionParams::new(dt, t_max, 1).validate(system.lattice().hopping())?;
        let per = t_max / (CHECKPOINTS as f64 * dt);
        if (per - per.round()).abs() > 1e-9 * per.max(1.0) || per.round() < 1.0 {
            return Err(Failure::Validation(format!(
                "t_max = {t_max} is not a multiple of {CHECKPOINTS} dt for dt = {dt}"
            )));
        }
        steps_per_checkpoint.push(per.round() as usize);
    }

    let initial = initial_state(&system, run.initial_kind(&system)?)?;
    let times: Vec<f64> = (1..=CHECKPOINTS).map(|k| t_max * k as f64 / CHECKPOINTS as f64).collect();
    let exact = ExactPropagator::new(&system)?.evolve(&initial, &times)?;

    let errors: Vec<f64> = dt_list
        .par_iter()
        .zip(&steps_per_checkpoint)
        .map(|(&dt, &per)| {
            let mut stepper = SplitStepper::new(&system, dt);
            let mut w = initial.clone();
            let mut worst = 0.0f64;
            for reference in &exact {
                stepper.run(&mut w, per)?;
                worst = worst.max(w.max_abs_diff(reference));
            }
            Ok(worst)
        })
        .collect::<ga2d::Result<_>>()?;

    println!("{:>10}  {:>12}", "dt", "max_error");
    for (dt, err) in dt_list.iter().zip(&errors) {
        println!("{dt:>10}  {err:>12.4e}");
    }
    if dt_list.len() < 2 {
        return Ok(());
    }
    let order = fitted_order(dt_list, &errors);
    println!("order {order:.3}");
    if (1.8..=2.2).contains(&order) {
        Ok(())
    } else {
        Err(Failure::Validation(format!("convergence order {order:.3} outside [1.8, 2.2]")))
    }
}

/// Least-squares slope of `ln err` against `ln dt`.
fn fitted_order(dts: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
