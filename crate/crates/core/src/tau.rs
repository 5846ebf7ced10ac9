//! The two-layer column projection for k = 2 slabs.
//!
//! A column whose layers agree projects to that sign; a disagreeing column is
//! grey, oriented by its top (z = 1) spin. The projection is a bijection on
//! k = 2 configurations, so it is computed on demand from the spin field
//! rather than co-evolved.

use crate::config::SpinConfig;
use crate::dynamics::FlipEvent;
use crate::error::{Error, Result};
use crate::lattice::{SlabGeometry, VerticalBc};

/// Column value: both layers agree (`Plus`/`Minus`) or disagree, named by the
/// z = 1 layer first (`GreyPM`: top +1, bottom -1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TauValue {
    Plus,
    Minus,
    GreyPM,
    GreyMP,
}

impl TauValue {
    pub fn is_grey(self) -> bool {
        matches!(self, TauValue::GreyPM | TauValue::GreyMP)
    }

    pub fn to_char(self) -> char {
        match self {
            TauValue::Plus => '+',
            TauValue::Minus => '-',
            TauValue::GreyPM => 'g',
            TauValue::GreyMP => 'G',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '+' => Ok(TauValue::Plus),
            '-' => Ok(TauValue::Minus),
            'g' => Ok(TauValue::GreyPM),
            'G' => Ok(TauValue::GreyMP),
            other => Err(Error::SnapshotFormat(format!("unexpected tau character `{other}`"))),
        }
    }

    fn from_layers(top: i8, bottom: i8) -> Self {
        match (top, bottom) {
            (1, 1) => TauValue::Plus,
            (-1, -1) => TauValue::Minus,
            (1, -1) => TauValue::GreyPM,
            _ => TauValue::GreyMP,
        }
    }

    /// The (top, bottom) spin pair this value encodes.
    pub fn layers(self) -> (i8, i8) {
        match self {
            TauValue::Plus => (1, 1),
            TauValue::Minus => (-1, -1),
            TauValue::GreyPM => (1, -1),
            TauValue::GreyMP => (-1, 1),
        }
    }
}

/// Projected configuration over the in-plane torus, row-major (`y * L + x`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauConfig {
    side: usize,
    values: Vec<TauValue>,
}

impl TauConfig {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn values(&self) -> &[TauValue] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> TauValue {
        self.values[y * self.side + x]
    }

    /// Snapshot: header `tau L=<L> t=<time>` then L lines of L characters
    /// from `{+,-,g,G}`.
    pub fn write_snapshot(&self, t: f64) -> String {
        let mut out = String::with_capacity(self.side * (self.side + 1) + 32);
        out.push_str(&format!("tau L={} t={}\n", self.side, t));
        for y in 0..self.side {
            for x in 0..self.side {
                out.push(self.get(x, y).to_char());
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_snapshot(text: &str) -> Result<(TauConfig, f64)> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::SnapshotFormat("empty tau snapshot".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "tau" {
            return Err(Error::SnapshotFormat(format!("bad tau header `{header}`")));
        }
        let side: usize = fields[1]
            .strip_prefix("L=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::SnapshotFormat("bad L".into()))?;
        let t: f64 = fields[2]
            .strip_prefix("t=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::SnapshotFormat("bad t".into()))?;
        let mut values = Vec::with_capacity(side * side);
        for y in 0..side {
            let line = lines
                .next()
                .ok_or_else(|| Error::SnapshotFormat(format!("missing tau row y={y}")))?;
            if line.chars().count() != side {
                return Err(Error::SnapshotFormat(format!("tau row y={y} has wrong length")));
            }
            for c in line.chars() {
                values.push(TauValue::from_char(c)?);
            }
        }
        Ok((TauConfig { side, values }, t))
    }
}

/// Exact counts of each column class; they sum to `L^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct GreyStats {
    pub count_plus: usize,
    pub count_minus: usize,
    pub count_grey_pm: usize,
    pub count_grey_mp: usize,
}

impl GreyStats {
    pub fn grey_total(&self) -> usize {
        self.count_grey_pm + self.count_grey_mp
    }
}

/// Project a k = 2 configuration onto its column values.
pub fn project(config: &SpinConfig) -> Result<TauConfig> {
    let geom = config.geometry();
    if geom.k() != 2 {
        return Err(Error::InvalidArgument(format!(
            "tau projection needs k = 2, got k = {}",
            geom.k()
        )));
    }
    let side = geom.side();
    let spins = config.spins();
    let mut values = Vec::with_capacity(side * side);
    for y in 0..side {
        for x in 0..side {
            let bottom = spins[y * side + x];
            let top = spins[(side + y) * side + x];
            values.push(TauValue::from_layers(top, bottom));
        }
    }
    Ok(TauConfig { side, values })
}

/// Rebuild the unique k = 2 spin configuration with these column values.
pub fn reconstruct(tau: &TauConfig, bc: VerticalBc) -> Result<SpinConfig> {
    let geom = SlabGeometry::new(2, tau.side, bc)?;
    let side = tau.side;
    let mut spins = vec![0i8; geom.site_count()];
    for y in 0..side {
        for x in 0..side {
            let (top, bottom) = tau.get(x, y).layers();
            spins[y * side + x] = bottom;
            spins[(side + y) * side + x] = top;
        }
    }
    SpinConfig::from_spins(geom, spins)
}

pub fn grey_stats(tau: &TauConfig) -> GreyStats {
    let mut stats =
        GreyStats { count_plus: 0, count_minus: 0, count_grey_pm: 0, count_grey_mp: 0 };
    for &v in &tau.values {
        match v {
            TauValue::Plus => stats.count_plus += 1,
            TauValue::Minus => stats.count_minus += 1,
            TauValue::GreyPM => stats.count_grey_pm += 1,
            TauValue::GreyMP => stats.count_grey_mp += 1,
        }
    }
    stats
}

/// Replay a flip log from its initial configuration and verify that no
/// column ever transitions directly between the two grey orientations.
/// Returns the number of flips checked.
pub fn check_no_grey_to_grey(initial: &SpinConfig, log: &[FlipEvent]) -> Result<u64> {
    let geom = *initial.geometry();
    if geom.k() != 2 {
        return Err(Error::InvalidArgument("grey transition check needs k = 2".into()));
    }
    let side = geom.side();
    let mut work = initial.clone();
    let mut checked = 0u64;
    for ev in log {
        let site = geom.index_site(ev.site as usize)?;
        let column_value = |c: &SpinConfig| {
            let bottom = c.spins()[site.y * side + site.x];
            let top = c.spins()[(side + site.y) * side + site.x];
            TauValue::from_layers(top, bottom)
        };
        let before = column_value(&work);
        work.set_index(ev.site as usize, -ev.old_spin);
        let after = column_value(&work);
        if before.is_grey() && after.is_grey() && before != after {
            return Err(Error::InvalidArgument(format!(
                "grey-to-grey transition at column ({}, {})",
                site.x, site.y
            )));
        }
        checked += 1;
    }
    Ok(checked)
}
