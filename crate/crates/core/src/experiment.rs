//! Seeded, replicated experiment drivers with deterministic JSON and CSV
//! reporting.
//!
//! All time in reports is measured in sweeps (`L^2 k` clock events); the
//! continuous exponential time is recorded alongside. Replicas run in
//! parallel on independent ChaCha streams of the experiment seed; results
//! are aggregated in replica order, so identical configurations and seeds
//! produce byte-identical outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::bootstrap::{self, EtaConfig};
use crate::certify::{certify, CertifiedSet};
use crate::dynamics::{replica_rng, DynamicsState, RunStatus, StopRule};
use crate::error::{Error, Result};
use crate::initial::{
    apply_construction, blinker_sites, default_center, sample_product, ConstructionKind,
};
use crate::lattice::{SlabGeometry, VerticalBc};
use crate::tau::{grey_stats, project, GreyStats};

/// Smallest doubling-window exponent tracked by the blinker and activity
/// reports: windows are `[2^j, 2^(j+1)]` sweeps for `j >= 3`.
pub const FIRST_WINDOW_EXPONENT: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Fixation,
    Blinker,
    Tau,
    Bootstrap,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Fixation => "fixation",
            CommandKind::Blinker => "blinker",
            CommandKind::Tau => "tau",
            CommandKind::Bootstrap => "bootstrap",
        }
    }
}

/// Full experiment configuration shared by the simulation commands.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub k: usize,
    pub side: usize,
    pub vertical_bc: VerticalBc,
    pub p: f64,
    pub seed: u64,
    pub replicas: usize,
    /// Run length in sweeps (1 sweep = `L^2 k` clock events).
    pub t_max_sweeps: u64,
    /// Observable sampling period in sweeps (0 disables interval samples).
    pub sample_interval: u64,
    pub construction: Option<ConstructionKind>,
    /// In-plane offset of the construction; defaults to the torus middle.
    pub center: Option<(i64, i64)>,
    /// Write a slab snapshot every this many sweeps (includes sweep 0).
    pub snapshot_every: Option<u64>,
    /// Direct density mode for the bootstrap command: sample the block field
    /// i.i.d. at this density instead of extracting it from spins.
    pub eta_density: Option<f64>,
    /// Block torus side for direct density mode.
    pub eta_side: Option<usize>,
}

impl ExperimentConfig {
    pub fn geometry(&self) -> Result<SlabGeometry> {
        SlabGeometry::new(self.k, self.side, self.vertical_bc)
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidProbability(self.p));
        }
        if self.replicas == 0 {
            return Err(Error::InvalidArgument("at least one replica required".into()));
        }
        match self.command {
            CommandKind::Tau => {
                if self.k != 2 {
                    return Err(Error::InvalidArgument(
                        "the tau command requires k = 2".into(),
                    ));
                }
            }
            CommandKind::Blinker => {
                if self.construction.is_none() {
                    return Err(Error::InvalidArgument(
                        "the blinker command requires a construction".into(),
                    ));
                }
            }
            CommandKind::Bootstrap => {
                if self.eta_density.is_some() != self.eta_side.is_some() {
                    return Err(Error::InvalidArgument(
                        "direct density mode needs both a density and a block torus side".into(),
                    ));
                }
                if self.eta_density.is_none() && self.k != 2 {
                    return Err(Error::InvalidArgument(
                        "bootstrap extraction requires k = 2".into(),
                    ));
                }
            }
            CommandKind::Fixation => {}
        }
        Ok(())
    }

    fn resolved_center(&self, geom: &SlabGeometry) -> (i64, i64) {
        self.center.unwrap_or_else(|| default_center(geom))
    }
}

/// One long-format CSV record: `replica,t_sweeps,observable,value`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub replica: usize,
    pub t_sweeps: f64,
    pub observable: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WindowFlips {
    /// Window `[2^j, 2^(j+1)]` sweeps.
    pub j: u32,
    pub flips: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BootstrapReplica {
    pub initial_fraction: f64,
    pub final_fraction: f64,
    pub steps: u64,
    pub filled: bool,
}

/// Per-replica observables. Fields not produced by a command are `null` in
/// the JSON summary; the key set is stable across commands.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReplicaReport {
    pub replica: usize,
    pub absorbed: bool,
    pub absorption_sweeps: Option<f64>,
    pub absorption_time: Option<f64>,
    pub final_sweeps: f64,
    pub final_time: f64,
    pub total_flips: u64,
    pub max_site_flips: u64,
    pub final_hamiltonian: i64,
    pub certified_size: Option<usize>,
    /// Flips observed on the certified set; any nonzero value is a hard
    /// violation.
    pub certified_flips: u64,
    pub blinker_windows: Option<Vec<WindowFlips>>,
    /// True iff every designated blinker site flipped in every tracked
    /// doubling window.
    pub blinker_each_site_all_windows: Option<bool>,
    /// True iff the blinker pair recorded at least one flip in every tracked
    /// doubling window.
    pub blinker_pair_all_windows: Option<bool>,
    pub window_activity: Option<Vec<WindowFlips>>,
    pub grey_final: Option<GreyStats>,
    pub bootstrap: Option<BootstrapReplica>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Aggregate {
    pub absorbed_count: usize,
    pub mean_absorption_sweeps: Option<f64>,
    pub max_total_flips: u64,
    pub certified_flips_total: u64,
    pub blinker_each_site_pass_count: Option<usize>,
    pub blinker_pair_pass_count: Option<usize>,
    pub grey_zero_count: Option<usize>,
    pub bootstrap_filled_count: Option<usize>,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct GeometrySummary {
    pub k: usize,
    #[serde(rename = "L")]
    pub side: usize,
    pub bc: VerticalBc,
}

/// The JSON summary document; schema keys are stable.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExperimentReport {
    pub command: CommandKind,
    pub geometry: GeometrySummary,
    pub p: f64,
    pub seed: u64,
    pub replicas: usize,
    pub per_replica: Vec<ReplicaReport>,
    pub aggregate: Aggregate,
    #[serde(skip)]
    pub series: Vec<SeriesRow>,
    #[serde(skip)]
    pub snapshots: Vec<(String, String)>,
}

impl ExperimentReport {
    pub fn summary_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn series_csv(&self) -> String {
        let mut out = String::from("replica,t_sweeps,observable,value\n");
        for row in &self.series {
            writeln!(out, "{},{},{},{}", row.replica, row.t_sweeps, row.observable, row.value)
                .expect("string write");
        }
        out
    }

    /// Write `summary.json`, `series.csv`, and any snapshot files.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("summary.json"), self.summary_json())?;
        fs::write(dir.join("series.csv"), self.series_csv())?;
        for (name, body) in &self.snapshots {
            fs::write(dir.join(name), body)?;
        }
        Ok(())
    }

    pub fn certified_violation(&self) -> bool {
        self.aggregate.certified_flips_total > 0
    }
}

/// Doubling-window boundaries `2^j` sweeps, `j = FIRST_WINDOW_EXPONENT ..`,
/// while the window fits below `t_max`.
fn window_exponents(t_max_sweeps: u64) -> Vec<u32> {
    let mut out = Vec::new();
    let mut j = FIRST_WINDOW_EXPONENT;
    while 2u64.saturating_pow(j + 1) <= t_max_sweeps {
        out.push(j);
        j += 1;
    }
    out
}

/// Event-count checkpoints at which a replica loop pauses to sample.
fn checkpoint_ladder(cfg: &ExperimentConfig, per_sweep: u64) -> Vec<u64> {
    let mut marks: Vec<u64> = Vec::new();
    let t_end = cfg.t_max_sweeps * per_sweep;
    if cfg.sample_interval > 0 {
        let mut s = cfg.sample_interval;
        while s <= cfg.t_max_sweeps {
            marks.push(s * per_sweep);
            s += cfg.sample_interval;
        }
    }
    for j in window_exponents(cfg.t_max_sweeps) {
        marks.push(2u64.pow(j) * per_sweep);
        marks.push(2u64.pow(j + 1) * per_sweep);
    }
    if let Some(every) = cfg.snapshot_every {
        if every > 0 {
            let mut s = every;
            while s <= cfg.t_max_sweeps {
                marks.push(s * per_sweep);
                s += every;
            }
        }
    }
    marks.push(t_end);
    marks.sort_unstable();
    marks.dedup();
    marks
}

struct ReplicaOutcome {
    report: ReplicaReport,
    series: Vec<SeriesRow>,
    snapshots: Vec<(String, String)>,
}

/// Shared replica loop for the fixation, blinker, and tau commands.
fn run_spin_replica(
    cfg: &ExperimentConfig,
    geom: SlabGeometry,
    replica: usize,
) -> Result<ReplicaOutcome> {
    let per_sweep = geom.events_per_sweep();
    let mut rng = replica_rng(cfg.seed, replica as u64);
    let mut config = sample_product(geom, cfg.p, &mut rng)?;

    let center = cfg.resolved_center(&geom);
    let mut certified: Option<CertifiedSet> = None;
    let mut blinkers = None;
    if let Some(kind) = cfg.construction {
        let inventory = apply_construction(kind, &mut config, center)?;
        let cert = certify(&config, &inventory.sites)?;
        blinkers = Some(blinker_sites(&geom, center)?);
        certified = Some(cert);
    }

    let mut state = DynamicsState::new(config, rng);
    if let Some(cert) = &certified {
        state.set_watch(cert.mask(&geom), true);
    }

    let track_grey = geom.k() == 2;
    let blinker_idx = blinkers.map(|pair| {
        [
            geom.site_index(pair[0]).expect("blinker in range"),
            geom.site_index(pair[1]).expect("blinker in range"),
        ]
    });

    let exponents = window_exponents(cfg.t_max_sweeps);
    // Cumulative per-blinker and total flips at each window boundary 2^j.
    let mut boundary_blinker: Vec<[u64; 2]> = Vec::new();
    let mut boundary_total: Vec<u64> = Vec::new();
    let mut boundary_events: Vec<u64> = Vec::new();

    let mut series: Vec<SeriesRow> = Vec::new();
    let mut snapshots: Vec<(String, String)> = Vec::new();
    let sample = |state: &DynamicsState, series: &mut Vec<SeriesRow>| {
        let t = state.sweeps();
        series.push(SeriesRow {
            replica,
            t_sweeps: t,
            observable: "hamiltonian".into(),
            value: state.cached_hamiltonian() as f64,
        });
        series.push(SeriesRow {
            replica,
            t_sweeps: t,
            observable: "flips_total".into(),
            value: state.total_flips() as f64,
        });
        if track_grey {
            let stats = grey_stats(&project(state.config()).expect("k = 2 checked"));
            for (name, value) in [
                ("grey_count", stats.grey_total()),
                ("grey_pm", stats.count_grey_pm),
                ("grey_mp", stats.count_grey_mp),
                ("plus_columns", stats.count_plus),
                ("minus_columns", stats.count_minus),
            ] {
                series.push(SeriesRow {
                    replica,
                    t_sweeps: t,
                    observable: name.into(),
                    value: value as f64,
                });
            }
        }
        if let Some(idx) = blinker_idx {
            for (which, i) in idx.iter().enumerate() {
                series.push(SeriesRow {
                    replica,
                    t_sweeps: t,
                    observable: format!("blinker{which}_flips"),
                    value: state.flip_counts()[*i] as f64,
                });
            }
        }
    };

    let push_snapshots =
        |state: &DynamicsState, sweep: u64, snapshots: &mut Vec<(String, String)>| {
            snapshots.push((
                format!("snapshot_r{replica}_s{sweep}.txt"),
                state.config().write_snapshot(state.t()),
            ));
            if cfg.command == CommandKind::Tau {
                let tau = project(state.config()).expect("k = 2 checked");
                snapshots
                    .push((format!("tau_r{replica}_s{sweep}.txt"), tau.write_snapshot(state.t())));
            }
        };

    if cfg.sample_interval > 0 || cfg.t_max_sweeps == 0 {
        sample(&state, &mut series);
    }
    if cfg.snapshot_every.is_some() {
        push_snapshots(&state, 0, &mut snapshots);
    }

    let to_absorption = matches!(cfg.command, CommandKind::Fixation | CommandKind::Tau);
    let mut absorbed_at: Option<(f64, f64)> = None;
    let mut violated = false;

    let ladder = checkpoint_ladder(cfg, per_sweep);
    for mark in ladder {
        if absorbed_at.is_none() && !violated {
            let status = if to_absorption {
                state.run(StopRule::Absorption { sweep_guard: Some(mark / per_sweep) })
            } else {
                state.run(StopRule::EventLimit(mark))
            };
            match status {
                RunStatus::Absorbed => {
                    absorbed_at = Some((state.sweeps(), state.t()));
                }
                RunStatus::WatchViolation => violated = true,
                RunStatus::ReachedLimit => {}
            }
        }
        let sweep_mark = mark / per_sweep;
        if cfg.sample_interval > 0
            && sweep_mark.is_multiple_of(cfg.sample_interval)
            && absorbed_at.is_none_or(|(s, _)| s >= sweep_mark as f64)
        {
            sample(&state, &mut series);
        }
        if let Some(every) = cfg.snapshot_every {
            if every > 0 && sweep_mark.is_multiple_of(every) {
                push_snapshots(&state, sweep_mark, &mut snapshots);
            }
        }
        if sweep_mark.is_power_of_two() {
            boundary_events.push(mark);
            boundary_total.push(state.total_flips());
            boundary_blinker.push(blinker_idx.map_or([0, 0], |idx| {
                [state.flip_counts()[idx[0]], state.flip_counts()[idx[1]]]
            }));
        }
        if violated {
            break;
        }
    }

    // Window differences from the cumulative boundary counts.
    let boundary_at = |sweeps: u64| -> Option<usize> {
        boundary_events.iter().position(|&e| e == sweeps * per_sweep)
    };
    let make_windows = |counts: &dyn Fn(usize) -> Vec<u64>| -> Vec<WindowFlips> {
        exponents
            .iter()
            .filter_map(|&j| {
                let lo = boundary_at(2u64.pow(j))?;
                let hi = boundary_at(2u64.pow(j + 1))?;
                let a = counts(lo);
                let b = counts(hi);
                Some(WindowFlips {
                    j,
                    flips: a.iter().zip(&b).map(|(x, y)| y - x).collect(),
                })
            })
            .collect()
    };

    let blinker_windows = blinker_idx.map(|_| {
        make_windows(&|i: usize| boundary_blinker[i].to_vec())
    });
    let window_activity = if cfg.command == CommandKind::Fixation {
        Some(make_windows(&|i: usize| vec![boundary_total[i]]))
    } else {
        None
    };
    let blinker_each_site_all_windows = blinker_windows.as_ref().map(|ws| {
        !ws.is_empty() && ws.iter().all(|w| w.flips.iter().all(|&f| f > 0))
    });
    let blinker_pair_all_windows = blinker_windows.as_ref().map(|ws| {
        !ws.is_empty() && ws.iter().all(|w| w.flips.iter().any(|&f| f > 0))
    });

    for ws in blinker_windows.iter().flatten() {
        for (which, f) in ws.flips.iter().enumerate() {
            series.push(SeriesRow {
                replica,
                t_sweeps: 2u64.pow(ws.j + 1) as f64,
                observable: format!("blinker{which}_window_flips"),
                value: *f as f64,
            });
        }
    }
    for ws in window_activity.iter().flatten() {
        series.push(SeriesRow {
            replica,
            t_sweeps: 2u64.pow(ws.j + 1) as f64,
            observable: "window_flips".into(),
            value: ws.flips[0] as f64,
        });
    }

    let grey_final = if track_grey {
        Some(grey_stats(&project(state.config()).expect("k = 2 checked")))
    } else {
        None
    };

    let report = ReplicaReport {
        replica,
        absorbed: absorbed_at.is_some(),
        absorption_sweeps: absorbed_at.map(|(s, _)| s),
        absorption_time: absorbed_at.map(|(_, t)| t),
        final_sweeps: state.sweeps(),
        final_time: state.t(),
        total_flips: state.total_flips(),
        max_site_flips: state.flip_counts().iter().copied().max().unwrap_or(0),
        final_hamiltonian: state.cached_hamiltonian(),
        certified_size: certified.as_ref().map(|c| c.len()),
        certified_flips: state.watch_flips(),
        blinker_windows,
        blinker_each_site_all_windows,
        blinker_pair_all_windows,
        window_activity,
        grey_final,
        bootstrap: None,
    };
    Ok(ReplicaOutcome { report, series, snapshots })
}

fn run_bootstrap_replica(cfg: &ExperimentConfig, replica: usize) -> Result<ReplicaOutcome> {
    let mut rng = replica_rng(cfg.seed, replica as u64);
    let initial: EtaConfig = match (cfg.eta_density, cfg.eta_side) {
        (Some(density), Some(side)) => bootstrap::sample_eta(side, density, &mut rng)?,
        _ => {
            let geom = cfg.geometry()?;
            let config = sample_product(geom, cfg.p, &mut rng)?;
            bootstrap::extract_eta(&config)?
        }
    };
    let mut series = Vec::new();
    let initial_fraction = bootstrap::occupation_fraction(&initial);
    series.push(SeriesRow {
        replica,
        t_sweeps: 0.0,
        observable: "eta_fraction".into(),
        value: initial_fraction,
    });
    let mut current = initial;
    let mut steps = 0u64;
    loop {
        let next = bootstrap::bootstrap_step(&current);
        if next.occ() == current.occ() {
            break;
        }
        steps += 1;
        series.push(SeriesRow {
            replica,
            t_sweeps: steps as f64,
            observable: "eta_fraction".into(),
            value: bootstrap::occupation_fraction(&next),
        });
        current = next;
    }
    let final_fraction = bootstrap::occupation_fraction(&current);
    let snapshots = if cfg.snapshot_every.is_some() {
        vec![(format!("eta_r{replica}_final.txt"), current.write_snapshot())]
    } else {
        Vec::new()
    };
    let report = ReplicaReport {
        replica,
        absorbed: true,
        absorption_sweeps: None,
        absorption_time: None,
        final_sweeps: steps as f64,
        final_time: steps as f64,
        total_flips: 0,
        max_site_flips: 0,
        final_hamiltonian: 0,
        certified_size: None,
        certified_flips: 0,
        blinker_windows: None,
        blinker_each_site_all_windows: None,
        blinker_pair_all_windows: None,
        window_activity: None,
        grey_final: None,
        bootstrap: Some(BootstrapReplica {
            initial_fraction,
            final_fraction,
            steps,
            filled: current.is_full(),
        }),
    };
    Ok(ReplicaOutcome { report, series, snapshots })
}

fn aggregate(reports: &[ReplicaReport]) -> Aggregate {
    let absorbed: Vec<f64> = reports.iter().filter_map(|r| r.absorption_sweeps).collect();
    let count_true = |pick: fn(&ReplicaReport) -> Option<bool>| -> Option<usize> {
        if reports.iter().any(|r| pick(r).is_some()) {
            Some(reports.iter().filter(|r| pick(r) == Some(true)).count())
        } else {
            None
        }
    };
    let blinker_each = count_true(|r| r.blinker_each_site_all_windows);
    let blinker_pair = count_true(|r| r.blinker_pair_all_windows);
    let grey_zero: Option<usize> = if reports.iter().any(|r| r.grey_final.is_some()) {
        Some(
            reports
                .iter()
                .filter(|r| r.grey_final.map(|g| g.grey_total() == 0).unwrap_or(false))
                .count(),
        )
    } else {
        None
    };
    let filled: Option<usize> = if reports.iter().any(|r| r.bootstrap.is_some()) {
        Some(reports.iter().filter(|r| r.bootstrap.as_ref().is_some_and(|b| b.filled)).count())
    } else {
        None
    };
    Aggregate {
        absorbed_count: reports.iter().filter(|r| r.absorbed).count(),
        mean_absorption_sweeps: if absorbed.is_empty() {
            None
        } else {
            Some(absorbed.iter().sum::<f64>() / absorbed.len() as f64)
        },
        max_total_flips: reports.iter().map(|r| r.total_flips).max().unwrap_or(0),
        certified_flips_total: reports.iter().map(|r| r.certified_flips).sum(),
        blinker_each_site_pass_count: blinker_each,
        blinker_pair_pass_count: blinker_pair,
        grey_zero_count: grey_zero,
        bootstrap_filled_count: filled,
    }
}

/// Run an experiment: replicas in parallel, aggregation in replica order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let outcomes: Vec<Result<ReplicaOutcome>> = match cfg.command {
        CommandKind::Bootstrap => (0..cfg.replicas)
            .into_par_iter()
            .map(|r| run_bootstrap_replica(cfg, r))
            .collect(),
        _ => {
            let geom = cfg.geometry()?;
            (0..cfg.replicas)
                .into_par_iter()
                .map(|r| run_spin_replica(cfg, geom, r))
                .collect()
        }
    };
    let mut per_replica = Vec::with_capacity(cfg.replicas);
    let mut series = Vec::new();
    let mut snapshots = Vec::new();
    for outcome in outcomes {
        let outcome = outcome?;
        per_replica.push(outcome.report);
        series.extend(outcome.series);
        snapshots.extend(outcome.snapshots);
    }
    let aggregate = aggregate(&per_replica);
    Ok(ExperimentReport {
        command: cfg.command,
        geometry: GeometrySummary { k: cfg.k, side: cfg.side, bc: cfg.vertical_bc },
        p: cfg.p,
        seed: cfg.seed,
        replicas: cfg.replicas,
        per_replica,
        aggregate,
        series,
        snapshots,
    })
}
