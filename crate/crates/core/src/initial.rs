//! Initial states: product-measure sampling and the explicit pillar/table
//! constructions that pin a rigid scaffold around a pair of designated
//! blinker sites.
//!
//! Construction coordinates are relative: `(0, 0)` is the construction
//! center, mapped onto the torus by an in-plane offset. The scaffold spans
//! `{-20..20}^2` in the plane, so a torus side of at least 48 is required for
//! it to fit without interacting with itself through the wraparound.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::SpinConfig;
use crate::error::{Error, Result};
use crate::lattice::{Site, SlabGeometry, VerticalBc};

/// Relative site coordinate used by construction geometry: in-plane offsets
/// from the construction center plus an absolute level.
pub type RelSite = (i64, i64, i64);

/// Smallest torus side on which the size-20 table footprint fits with margin.
pub const MIN_CONSTRUCTION_SIDE: usize = 48;

/// Half-width of the in-plane construction footprint `{-20..20}^2`.
pub const FOOTPRINT_HALF_WIDTH: i64 = 20;

/// Sample an i.i.d. spin field with `P(+1) = p`, one draw per site in site
/// index order.
pub fn sample_product(geom: SlabGeometry, p: f64, rng: &mut ChaCha8Rng) -> Result<SpinConfig> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let spins: Vec<i8> = (0..geom.site_count())
        .map(|_| if rng.random::<f64>() < p { 1 } else { -1 })
        .collect();
    SpinConfig::from_spins(geom, spins)
}

/// The 12-site pillar `{m, m+1} x {n, n+1} x {0, 1, 2}`.
pub fn pillar(m: i64, n: i64) -> Vec<RelSite> {
    let mut out = Vec::with_capacity(12);
    for z in 0..3 {
        for y in n..=n + 1 {
            for x in m..=m + 1 {
                out.push((x, y, z));
            }
        }
    }
    out
}

/// The table of size `n >= 2`: the plate `{-n..n}^2 x {2}` on four pillar
/// legs at its corners.
pub fn table(n: i64) -> Result<Vec<RelSite>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("table size {n} must be >= 2")));
    }
    let mut set = BTreeSet::new();
    for y in -n..=n {
        for x in -n..=n {
            set.insert((x, y, 2));
        }
    }
    for legs in [(-n, -n), (-n, n - 1), (n - 1, -n), (n - 1, n - 1)] {
        set.extend(pillar(legs.0, legs.1));
    }
    Ok(set.into_iter().collect())
}

/// The inverted table: the reflection of [`table`] through level 1
/// (`z -> 2 - z`).
pub fn inverted_table(n: i64) -> Result<Vec<RelSite>> {
    Ok(table(n)?.into_iter().map(|(x, y, z)| (x, y, 2 - z)).collect())
}

/// Which scaffold construction to apply to an initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionKind {
    /// k = 3, free: the base scaffold on levels 0-2.
    EventA,
    /// k >= 4, free: the base scaffold with level 2 copied upward.
    EventAPrime,
    /// k >= 5, periodic: level 2 copied through level k-2 and level 0 copied
    /// at level k-1.
    EventPeriodic,
}

impl ConstructionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstructionKind::EventA => "event-a",
            ConstructionKind::EventAPrime => "event-a-prime",
            ConstructionKind::EventPeriodic => "event-periodic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "event-a" => Ok(ConstructionKind::EventA),
            "event-a-prime" => Ok(ConstructionKind::EventAPrime),
            "event-periodic" => Ok(ConstructionKind::EventPeriodic),
            other => Err(Error::InvalidArgument(format!("unknown construction `{other}`"))),
        }
    }
}

/// A construction choice plus placement, as configured by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub kind: ConstructionKind,
    /// In-plane offset applied to all construction coordinates.
    pub center: (i64, i64),
}

/// The exact set of sites written by a construction, in a canonical order.
#[derive(Debug, Clone)]
pub struct AppliedConstruction {
    pub sites: Vec<Site>,
}

impl AppliedConstruction {
    pub fn mask(&self, geom: &SlabGeometry) -> Vec<bool> {
        let mut mask = vec![false; geom.site_count()];
        for &s in &self.sites {
            mask[geom.site_index(s).expect("construction site in range")] = true;
        }
        mask
    }
}

/// Default placement: the torus middle.
pub fn default_center(geom: &SlabGeometry) -> (i64, i64) {
    ((geom.side() / 2) as i64, (geom.side() / 2) as i64)
}

/// The two designated blinker sites `(0,0,1)` and `(1,0,1)` offset by the
/// construction center. They are never written by any construction.
pub fn blinker_sites(geom: &SlabGeometry, center: (i64, i64)) -> Result<[Site; 2]> {
    Ok([
        geom.wrap(center.0, center.1, 1)?,
        geom.wrap(center.0 + 1, center.1, 1)?,
    ])
}

// The base scaffold, relative coordinates with their pinned spins, in the
// order given by the defining conditions; earlier conditions win overlaps.
//
//   1. P1 = P(-2,-2) u P(-2,-1) u P(2,-2) at +1 and
//      P2 = P(-2,1) u P(2,0) u P(2,1) at -1,
//   2. the level-1 strips {0,1} x {-2,-1} at +1 and {0,1} x {1,2} at -1,
//   3. the inverted table of size 10 (minus what is already written) at +1,
//   4. the table of size 20 (minus what is already written) at -1.
fn event_a_writes() -> Vec<(RelSite, i8)> {
    let mut seen: BTreeSet<RelSite> = BTreeSet::new();
    let mut out: Vec<(RelSite, i8)> = Vec::new();
    let put = |sites: Vec<RelSite>, spin: i8, seen: &mut BTreeSet<RelSite>,
               out: &mut Vec<(RelSite, i8)>| {
        for s in sites {
            if seen.insert(s) {
                out.push((s, spin));
            }
        }
    };

    let p1: Vec<RelSite> = [pillar(-2, -2), pillar(-2, -1), pillar(2, -2)].concat();
    let p2: Vec<RelSite> = [pillar(-2, 1), pillar(2, 0), pillar(2, 1)].concat();
    put(p1, 1, &mut seen, &mut out);
    put(p2, -1, &mut seen, &mut out);

    let strip = |ys: [i64; 2]| -> Vec<RelSite> {
        let mut v = Vec::with_capacity(4);
        for y in ys {
            for x in 0..=1 {
                v.push((x, y, 1));
            }
        }
        v
    };
    put(strip([-2, -1]), 1, &mut seen, &mut out);
    put(strip([1, 2]), -1, &mut seen, &mut out);

    put(inverted_table(10).expect("10 >= 2"), 1, &mut seen, &mut out);
    put(table(20).expect("20 >= 2"), -1, &mut seen, &mut out);
    out
}

/// The scaffold candidate without the level-1 strips: the union of the
/// inverted size-10 table, the size-20 table, and the pillar groups, colored
/// as the construction colors them.
pub fn scaffold_without_strips() -> Vec<(RelSite, i8)> {
    let strips: BTreeSet<RelSite> = {
        let mut s = BTreeSet::new();
        for y in [-2i64, -1, 1, 2] {
            for x in 0..=1i64 {
                s.insert((x, y, 1));
            }
        }
        s
    };
    event_a_writes().into_iter().filter(|(s, _)| !strips.contains(s)).collect()
}

fn check_free(geom: &SlabGeometry, wanted_k: Option<usize>, min_k: usize, what: &str) -> Result<()> {
    if geom.vertical_bc() != VerticalBc::Free {
        return Err(Error::ConstructionMismatch(format!(
            "{what} requires free vertical boundary conditions"
        )));
    }
    if let Some(k) = wanted_k {
        if geom.k() != k {
            return Err(Error::ConstructionMismatch(format!(
                "{what} requires k = {k}, got k = {}",
                geom.k()
            )));
        }
    } else if geom.k() < min_k {
        return Err(Error::ConstructionMismatch(format!(
            "{what} requires k >= {min_k}, got k = {}",
            geom.k()
        )));
    }
    Ok(())
}

fn check_footprint(geom: &SlabGeometry) -> Result<()> {
    if geom.side() < MIN_CONSTRUCTION_SIDE {
        return Err(Error::ConstructionMismatch(format!(
            "torus side {} too small for the construction footprint (needs >= {MIN_CONSTRUCTION_SIDE})",
            geom.side()
        )));
    }
    Ok(())
}

fn write_rel(
    config: &mut SpinConfig,
    center: (i64, i64),
    writes: &[(RelSite, i8)],
    inventory: &mut Vec<Site>,
) -> Result<()> {
    let geom = *config.geometry();
    for &((x, y, z), spin) in writes {
        let site = geom.wrap(center.0 + x, center.1 + y, z as usize)?;
        config.set(site, spin)?;
        inventory.push(site);
    }
    Ok(())
}

/// Overwrite the scaffold of the base event onto a k = 3 free slab.
/// Returns the exact inventory of written sites.
pub fn apply_event_a(config: &mut SpinConfig, center: (i64, i64)) -> Result<AppliedConstruction> {
    let geom = *config.geometry();
    check_free(&geom, Some(3), 3, "the base construction")?;
    check_footprint(&geom)?;
    let mut inventory = Vec::new();
    write_rel(config, center, &event_a_writes(), &mut inventory)?;
    Ok(AppliedConstruction { sites: inventory })
}

fn copy_level(
    config: &mut SpinConfig,
    center: (i64, i64),
    from_z: usize,
    to_z: usize,
    inventory: &mut Vec<Site>,
) -> Result<()> {
    let geom = *config.geometry();
    let w = FOOTPRINT_HALF_WIDTH;
    for y in -w..=w {
        for x in -w..=w {
            let src = geom.wrap(center.0 + x, center.1 + y, from_z)?;
            let dst = geom.wrap(center.0 + x, center.1 + y, to_z)?;
            let spin = config.get(src)?;
            config.set(dst, spin)?;
            inventory.push(dst);
        }
    }
    Ok(())
}

/// Base event plus copies of level 2 on every level above, over the
/// footprint. Requires a free slab with k >= 4.
pub fn apply_event_a_prime(
    config: &mut SpinConfig,
    center: (i64, i64),
) -> Result<AppliedConstruction> {
    let geom = *config.geometry();
    check_free(&geom, None, 4, "the extended construction")?;
    check_footprint(&geom)?;
    let mut inventory = Vec::new();
    write_rel(config, center, &event_a_writes(), &mut inventory)?;
    for z in 3..geom.k() {
        copy_level(config, center, 2, z, &mut inventory)?;
    }
    Ok(AppliedConstruction { sites: inventory })
}

/// Base event with level 2 copied on levels `3..k-2` and level 0 duplicated
/// at level `k-1`, over the footprint. Requires a periodic slab with k >= 5
/// (both level 0 and level 2 need a duplicate, so four levels are not
/// enough).
pub fn apply_event_periodic(
    config: &mut SpinConfig,
    center: (i64, i64),
) -> Result<AppliedConstruction> {
    let geom = *config.geometry();
    if geom.vertical_bc() != VerticalBc::Periodic {
        return Err(Error::ConstructionMismatch(
            "the periodic construction requires periodic vertical boundary conditions".into(),
        ));
    }
    if geom.k() < 5 {
        return Err(Error::ConstructionMismatch(format!(
            "the periodic construction requires k >= 5, got k = {}",
            geom.k()
        )));
    }
    check_footprint(&geom)?;
    let mut inventory = Vec::new();
    write_rel(config, center, &event_a_writes(), &mut inventory)?;
    for z in 3..=geom.k() - 2 {
        copy_level(config, center, 2, z, &mut inventory)?;
    }
    copy_level(config, center, 0, geom.k() - 1, &mut inventory)?;
    Ok(AppliedConstruction { sites: inventory })
}

/// Dispatch on the construction kind.
pub fn apply_construction(
    kind: ConstructionKind,
    config: &mut SpinConfig,
    center: (i64, i64),
) -> Result<AppliedConstruction> {
    match kind {
        ConstructionKind::EventA => apply_event_a(config, center),
        ConstructionKind::EventAPrime => apply_event_a_prime(config, center),
        ConstructionKind::EventPeriodic => apply_event_periodic(config, center),
    }
}
