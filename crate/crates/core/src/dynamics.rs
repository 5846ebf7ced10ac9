//! Zero-temperature Glauber dynamics on a slab.
//!
//! Every site carries a rate-1 exponential clock. Because all rates are
//! equal, the exact continuous-time chain is simulated by drawing a global
//! exponential increment of rate `n = site count` and selecting one site
//! uniformly per event. On a ring the site flips if its local energy is
//! positive, resamples its spin with a fair coin if the energy is zero (the
//! resample counts as a flip only when the value changes), and does nothing
//! if the energy is negative.
//!
//! Random draws per event occur in a fixed, documented order: (1) the time
//! increment uniform, (2) the site selection, (3) the fair coin when the
//! selected site has zero energy. The generator is ChaCha8 seeded from a
//! `u64`; replica `r` of an experiment uses the independent ChaCha stream
//! `r` of the same seed (see [`replica_rng`]).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SpinConfig;
use crate::error::Result;
use crate::lattice::Site;

/// Deterministic generator for replica `r` of a seeded experiment.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// One recorded spin flip (a state-changing event).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipEvent {
    /// Event counter value when the flip occurred (1-based: after this event).
    pub events: u64,
    /// Continuous time of the flip.
    pub t: f64,
    pub site: u32,
    pub old_spin: i8,
}

/// Bounded record of flips. Once `capacity` entries have been stored further
/// flips are counted but not recorded, and `truncated` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipLog {
    pub entries: Vec<FlipEvent>,
    pub capacity: usize,
    pub truncated: bool,
}

impl FlipLog {
    fn new(capacity: usize) -> Self {
        FlipLog { entries: Vec::new(), capacity, truncated: false }
    }

    fn record(&mut self, ev: FlipEvent) {
        if self.entries.len() < self.capacity {
            self.entries.push(ev);
        } else {
            self.truncated = true;
        }
    }
}

/// Outcome of a single clock ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub site: usize,
    /// Local energy of the selected site just before the update.
    pub pre_energy: i32,
    pub flipped: bool,
}

/// Stopping rule for [`DynamicsState::run`]. Limits are absolute thresholds
/// on the total event counter, so chunked runs compose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// Stop once the event counter reaches `sweeps * site_count` events.
    SweepLimit(u64),
    /// Stop once the event counter reaches this value.
    EventLimit(u64),
    /// Stop at absorption (no site can ever flip again), or at the optional
    /// sweep guard, whichever comes first.
    Absorption { sweep_guard: Option<u64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    ReachedLimit,
    Absorbed,
    /// A watched site flipped while `stop_on_watch` was set.
    WatchViolation,
}

/// A running simulation: spin field, clocks, counters, cached energies and
/// Hamiltonian, and the generator state.
#[derive(Debug, Clone)]
pub struct DynamicsState {
    config: SpinConfig,
    t: f64,
    events: u64,
    n_flips: Vec<u64>,
    f_lowering: Vec<u64>,
    hamiltonian: i64,
    energies: Vec<i8>,
    flippable: usize,
    rng: ChaCha8Rng,
    // Flattened neighbor table, 6 slots per site; a doubled edge occupies two
    // slots so multiplicity needs no special casing in the update loop.
    neighbor_slots: Vec<u32>,
    neighbor_len: Vec<u8>,
    watch: Option<Vec<bool>>,
    watch_flips: u64,
    stop_on_watch: bool,
    flip_log: Option<FlipLog>,
}

impl DynamicsState {
    pub fn new(config: SpinConfig, rng: ChaCha8Rng) -> Self {
        let geom = *config.geometry();
        let n = geom.site_count();
        let mut neighbor_slots = vec![0u32; n * 6];
        let mut neighbor_len = vec![0u8; n];
        for v in geom.sites() {
            let i = geom.site_index(v).expect("site in range");
            let nbrs = geom.neighbors(v).expect("site in range");
            neighbor_len[i] = nbrs.len() as u8;
            for (slot, w) in nbrs.iter().enumerate() {
                neighbor_slots[i * 6 + slot] = geom.site_index(*w).expect("site in range") as u32;
            }
        }
        let mut energies = vec![0i8; n];
        let mut flippable = 0usize;
        for v in geom.sites() {
            let i = geom.site_index(v).expect("site in range");
            let e = config.local_energy(v).expect("site in range");
            energies[i] = e as i8;
            if e >= 0 {
                flippable += 1;
            }
        }
        let hamiltonian = config.hamiltonian();
        DynamicsState {
            config,
            t: 0.0,
            events: 0,
            n_flips: vec![0; n],
            f_lowering: vec![0; n],
            hamiltonian,
            energies,
            flippable,
            rng,
            neighbor_slots,
            neighbor_len,
            watch: None,
            watch_flips: 0,
            stop_on_watch: false,
            flip_log: None,
        }
    }

    pub fn with_seed(config: SpinConfig, seed: u64) -> Self {
        DynamicsState::new(config, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn config(&self) -> &SpinConfig {
        &self.config
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn sweeps(&self) -> f64 {
        self.events as f64 / self.config.geometry().events_per_sweep() as f64
    }

    pub fn cached_hamiltonian(&self) -> i64 {
        self.hamiltonian
    }

    /// Cached local energy of a site (kept incrementally, equal to
    /// `config.local_energy`).
    pub fn cached_energy(&self, v: Site) -> Result<i32> {
        Ok(self.energies[self.config.geometry().site_index(v)?] as i32)
    }

    /// Per-site flip counts `N_v`.
    pub fn flip_counts(&self) -> &[u64] {
        &self.n_flips
    }

    /// Per-site energy-lowering flip counts `F_v` (flips from positive
    /// pre-flip energy).
    pub fn lowering_counts(&self) -> &[u64] {
        &self.f_lowering
    }

    pub fn total_flips(&self) -> u64 {
        self.n_flips.iter().sum()
    }

    /// Number of sites with nonnegative local energy. Zero iff absorbed.
    pub fn flippable_sites(&self) -> usize {
        self.flippable
    }

    pub fn is_absorbed(&self) -> bool {
        self.flippable == 0
    }

    /// Record flips into a bounded log.
    pub fn enable_flip_log(&mut self, capacity: usize) {
        self.flip_log = Some(FlipLog::new(capacity));
    }

    pub fn flip_log(&self) -> Option<&FlipLog> {
        self.flip_log.as_ref()
    }

    pub fn take_flip_log(&mut self) -> Option<FlipLog> {
        self.flip_log.take()
    }

    /// Watch a set of sites (mask in site-index order); flips at watched
    /// sites are counted, and abort the run when `stop_on_watch` is set.
    pub fn set_watch(&mut self, mask: Vec<bool>, stop_on_watch: bool) {
        assert_eq!(mask.len(), self.config.geometry().site_count());
        self.watch = Some(mask);
        self.stop_on_watch = stop_on_watch;
    }

    pub fn watch_flips(&self) -> u64 {
        self.watch_flips
    }

    /// Advance a single clock ring.
    pub fn step(&mut self) -> StepOutcome {
        let n = self.energies.len();
        // Draw order is fixed: time increment, site, then the coin if needed.
        let u: f64 = self.rng.random();
        self.t += -(1.0 - u).ln() / n as f64;
        self.events += 1;
        let site = self.rng.random_range(0..n);
        let e = self.energies[site];
        let flipped = if e > 0 {
            self.apply_flip(site, e);
            true
        } else if e == 0 {
            let new_spin: i8 = if self.rng.random::<bool>() { 1 } else { -1 };
            if new_spin != self.config.spins()[site] {
                self.apply_flip(site, 0);
                true
            } else {
                false
            }
        } else {
            false
        };
        StepOutcome { site, pre_energy: e as i32, flipped }
    }

    fn apply_flip(&mut self, site: usize, pre_energy: i8) {
        let old_spin = self.config.spins()[site];
        self.config.flip_index(site);
        self.n_flips[site] += 1;
        if pre_energy > 0 {
            self.f_lowering[site] += 1;
            self.hamiltonian -= 2 * pre_energy as i64;
            // Site energy negates; it leaves the flippable set.
            self.flippable -= 1;
        }
        self.energies[site] = -pre_energy;
        let len = self.neighbor_len[site] as usize;
        for slot in 0..len {
            let w = self.neighbor_slots[site * 6 + slot] as usize;
            // The edge to `site` turns from agreeing to disagreeing or back:
            // e_w changes by 2 * sigma_w * old_spin per slot.
            let delta = 2 * old_spin * self.config.spins()[w];
            let before = self.energies[w];
            let after = before + delta;
            self.energies[w] = after;
            if before < 0 && after >= 0 {
                self.flippable += 1;
            } else if before >= 0 && after < 0 {
                self.flippable -= 1;
            }
        }
        if let Some(mask) = &self.watch {
            if mask[site] {
                self.watch_flips += 1;
            }
        }
        if let Some(log) = &mut self.flip_log {
            log.record(FlipEvent { events: self.events, t: self.t, site: site as u32, old_spin });
        }
    }

    /// Run until the stop rule triggers.
    pub fn run(&mut self, stop: StopRule) -> RunStatus {
        let per_sweep = self.config.geometry().events_per_sweep();
        let (event_limit, to_absorption) = match stop {
            StopRule::SweepLimit(s) => (Some(s.saturating_mul(per_sweep)), false),
            StopRule::EventLimit(e) => (Some(e), false),
            StopRule::Absorption { sweep_guard } => {
                (sweep_guard.map(|s| s.saturating_mul(per_sweep)), true)
            }
        };
        loop {
            if to_absorption && self.flippable == 0 {
                return RunStatus::Absorbed;
            }
            if let Some(limit) = event_limit {
                if self.events >= limit {
                    return RunStatus::ReachedLimit;
                }
            }
            let outcome = self.step();
            if outcome.flipped && self.stop_on_watch {
                if let Some(mask) = &self.watch {
                    if mask[outcome.site] {
                        return RunStatus::WatchViolation;
                    }
                }
            }
        }
    }
}

/// True iff flipping the listed sites in order is a positive-probability
/// trajectory of the dynamics: each flip must occur at a site whose local
/// energy is nonnegative at its turn. The candidate configuration is not
/// modified.
pub fn is_legal_flip_sequence(config: &SpinConfig, sites: &[Site]) -> Result<bool> {
    let mut work = config.clone();
    for &v in sites {
        let e = work.local_energy(v)?;
        if e < 0 {
            return Ok(false);
        }
        let s = work.get(v)?;
        work.set(v, -s)?;
    }
    Ok(true)
}

/// Apply a flip sequence unconditionally (used to inspect the end state of a
/// witness sequence).
pub fn apply_flip_sequence(config: &SpinConfig, sites: &[Site]) -> Result<SpinConfig> {
    let mut work = config.clone();
    for &v in sites {
        let s = work.get(v)?;
        work.set(v, -s)?;
    }
    Ok(work)
}
