//! Command-line driver: configures geometry, construction, and seeds, runs
//! replicas in parallel, and emits `summary.json` plus `series.csv`.
//!
//! Exit status: 0 on success (for `certify`: the candidate was fully
//! certified), 1 on errors or a partially certified candidate, 2 on usage
//! errors, 3 when a certified-set flip aborted a run.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use slabsim::certify::certify;
use slabsim::config::SpinConfig;
use slabsim::experiment::{run_experiment, CommandKind, ExperimentConfig};
use slabsim::initial::{apply_construction, default_center, ConstructionKind};
use slabsim::lattice::{Site, VerticalBc};

const EXIT_WATCH_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "slabsim",
    about = "Zero-temperature coarsening dynamics on slab lattices",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SimArgs {
    /// Slab thickness.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// In-plane torus side (even, >= 8).
    #[arg(long = "L", default_value_t = 64)]
    l: usize,
    /// Vertical boundary condition.
    #[arg(long, value_parser = parse_bc, default_value = "free")]
    bc: VerticalBc,
    /// Initial plus-spin density of the product measure.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Base seed; replica r runs on stream r of this seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    replicas: usize,
    /// Run length in sweeps (1 sweep = L*L*k clock events).
    #[arg(long = "t-max", default_value_t = 256)]
    t_max: u64,
    /// Observable sampling period in sweeps (0 disables).
    #[arg(long = "sample-interval", default_value_t = 16)]
    sample_interval: u64,
    /// Scaffold construction applied to the initial state.
    #[arg(long, value_enum, default_value_t = ConstructionArg::None)]
    construction: ConstructionArg,
    /// Construction center `x,y` (defaults to the torus middle).
    #[arg(long, value_parser = parse_center)]
    center: Option<(i64, i64)>,
    /// Output directory for summary.json and series.csv.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Write a slab snapshot every N sweeps (includes sweep 0).
    #[arg(long = "snapshot-every")]
    snapshot_every: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run replicas from the product measure and report absorption.
    Fixation(SimArgs),
    /// Seed a scaffold construction and track the designated blinker sites.
    Blinker(SimArgs),
    /// Track the two-layer column projection statistics (k = 2).
    Tau(SimArgs),
    /// Run modified bootstrap percolation to its fixed point.
    Bootstrap {
        #[command(flatten)]
        sim: SimArgs,
        /// Sample the block field i.i.d. at this density instead of
        /// extracting it from a spin sample.
        #[arg(long)]
        density: Option<f64>,
        /// Block torus side for direct density mode.
        #[arg(long = "eta-side")]
        eta_side: Option<usize>,
    },
    /// Certify a candidate site set against a slab snapshot.
    Certify {
        /// Slab snapshot file to inspect.
        #[arg(long)]
        snapshot: PathBuf,
        /// Named construction whose written sites form the candidate.
        #[arg(long, value_enum)]
        construction: Option<ConstructionArg>,
        /// Construction center `x,y` (defaults to the torus middle).
        #[arg(long, value_parser = parse_center)]
        center: Option<(i64, i64)>,
        /// Explicit candidate file: one `x y z` triple per line.
        #[arg(long = "candidate-file")]
        candidate_file: Option<PathBuf>,
        /// Write the certified set here (one `x y z` triple per line);
        /// defaults to stdout.
        #[arg(long = "out-file")]
        out_file: Option<PathBuf>,
    },
}

/// CLI spelling of the construction choice, including "none".
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConstructionArg {
    None,
    EventA,
    EventAPrime,
    EventPeriodic,
}

impl ConstructionArg {
    fn kind(self) -> Option<ConstructionKind> {
        match self {
            ConstructionArg::None => None,
            ConstructionArg::EventA => Some(ConstructionKind::EventA),
            ConstructionArg::EventAPrime => Some(ConstructionKind::EventAPrime),
            ConstructionArg::EventPeriodic => Some(ConstructionKind::EventPeriodic),
        }
    }
}

fn parse_bc(s: &str) -> Result<VerticalBc, String> {
    VerticalBc::parse(s).map_err(|e| e.to_string())
}

fn parse_center(s: &str) -> Result<(i64, i64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected `x,y`, got `{s}`"));
    }
    let x = parts[0].trim().parse().map_err(|_| format!("bad x in `{s}`"))?;
    let y = parts[1].trim().parse().map_err(|_| format!("bad y in `{s}`"))?;
    Ok((x, y))
}

fn experiment_config(
    command: CommandKind,
    sim: &SimArgs,
    density: Option<f64>,
    eta_side: Option<usize>,
) -> ExperimentConfig {
    ExperimentConfig {
        command,
        k: sim.k,
        side: sim.l,
        vertical_bc: sim.bc,
        p: sim.p,
        seed: sim.seed,
        replicas: sim.replicas,
        t_max_sweeps: sim.t_max,
        sample_interval: sim.sample_interval,
        construction: sim.construction.kind(),
        center: sim.center,
        snapshot_every: sim.snapshot_every,
        eta_density: density,
        eta_side,
    }
}

fn run_sim(command: CommandKind, sim: &SimArgs, density: Option<f64>, eta_side: Option<usize>)
    -> Result<u8, slabsim::Error>
{
    let cfg = experiment_config(command, sim, density, eta_side);
    let report = run_experiment(&cfg)?;
    report.write_outputs(&sim.out)?;
    let violated = report.certified_violation();
    for rep in &report.per_replica {
        if let Some(bs) = &rep.bootstrap {
            println!(
                "replica {}: fraction {} -> {} in {} steps{}",
                rep.replica,
                bs.initial_fraction,
                bs.final_fraction,
                bs.steps,
                if bs.filled { " (filled)" } else { "" }
            );
            continue;
        }
        let absorbed = if rep.absorbed {
            format!("absorbed at {} sweeps", rep.absorption_sweeps.unwrap_or(rep.final_sweeps))
        } else {
            format!("ran to {} sweeps", rep.final_sweeps)
        };
        println!(
            "replica {}: {absorbed}, flips {}, H {}",
            rep.replica, rep.total_flips, rep.final_hamiltonian
        );
    }
    println!(
        "{}: {} replicas, {} absorbed, outputs in {}",
        cfg.command.as_str(),
        report.replicas,
        report.aggregate.absorbed_count,
        sim.out.display()
    );
    if violated {
        eprintln!(
            "error: {} flips observed on the certified set",
            report.aggregate.certified_flips_total
        );
        return Ok(EXIT_WATCH_VIOLATION);
    }
    Ok(0)
}

fn parse_candidate_file(text: &str) -> Result<Vec<Site>, String> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(format!("line {}: expected `x y z`", lineno + 1));
        }
        let coord = |i: usize| -> Result<usize, String> {
            parts[i]
                .parse()
                .map_err(|_| format!("line {}: bad coordinate `{}`", lineno + 1, parts[i]))
        };
        out.push(Site::new(coord(0)?, coord(1)?, coord(2)?));
    }
    Ok(out)
}

fn run_certify(
    snapshot: &PathBuf,
    construction: Option<ConstructionArg>,
    center: Option<(i64, i64)>,
    candidate_file: Option<&PathBuf>,
    out_file: Option<&PathBuf>,
) -> Result<u8, String> {
    let text = fs::read_to_string(snapshot).map_err(|e| format!("{}: {e}", snapshot.display()))?;
    let (config, _t) = SpinConfig::parse_snapshot(&text).map_err(|e| e.to_string())?;
    let geom = *config.geometry();
    let candidate: Vec<Site> = match (construction.and_then(ConstructionArg::kind), candidate_file) {
        (Some(kind), None) => {
            // The construction's written-site inventory on a scratch copy;
            // the snapshot itself supplies the inspected spins.
            let mut scratch = config.clone();
            let center = center.unwrap_or_else(|| default_center(&geom));
            apply_construction(kind, &mut scratch, center)
                .map_err(|e| e.to_string())?
                .sites
        }
        (None, Some(path)) => {
            let body = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_candidate_file(&body)?
        }
        (None, None) => return Err("need --construction or --candidate-file".into()),
        (Some(_), Some(_)) => {
            return Err("--construction and --candidate-file are mutually exclusive".into())
        }
    };
    let mut unique: Vec<usize> = candidate
        .iter()
        .map(|&v| geom.site_index(v).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    unique.sort_unstable();
    unique.dedup();
    let cert = certify(&config, &candidate).map_err(|e| e.to_string())?;
    let mut body = String::new();
    for (site, _spin) in cert.iter() {
        body.push_str(&format!("{} {} {}\n", site.x, site.y, site.z));
    }
    match out_file {
        Some(path) => fs::write(path, &body).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{body}"),
    }
    let fully = cert.len() == unique.len();
    eprintln!(
        "certified {} of {} candidate sites{}",
        cert.len(),
        unique.len(),
        if fully { "" } else { " (candidate not fully certified)" }
    );
    Ok(if fully { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Fixation(sim) => run_sim(CommandKind::Fixation, sim, None, None)
            .map_err(|e| e.to_string()),
        Command::Blinker(sim) => run_sim(CommandKind::Blinker, sim, None, None)
            .map_err(|e| e.to_string()),
        Command::Tau(sim) => run_sim(CommandKind::Tau, sim, None, None).map_err(|e| e.to_string()),
        Command::Bootstrap { sim, density, eta_side } => {
            run_sim(CommandKind::Bootstrap, sim, *density, *eta_side).map_err(|e| e.to_string())
        }
        Command::Certify { snapshot, construction, center, candidate_file, out_file } => {
            run_certify(snapshot, *construction, *center, candidate_file.as_ref(), out_file.as_ref())
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
