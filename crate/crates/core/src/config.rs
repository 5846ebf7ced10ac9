//! Spin configurations on a slab and their energy observables.

use crate::error::{Error, Result};
use crate::lattice::{Site, SlabGeometry, VerticalBc};

/// A full assignment of spins in {-1, +1} to the sites of a slab, stored
/// densely in [`SlabGeometry::site_index`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfig {
    geom: SlabGeometry,
    spins: Vec<i8>,
}

impl SpinConfig {
    /// Constant configuration with the given spin everywhere.
    pub fn constant(geom: SlabGeometry, spin: i8) -> Result<Self> {
        check_spin(spin)?;
        Ok(SpinConfig { geom, spins: vec![spin; geom.site_count()] })
    }

    pub fn all_plus(geom: SlabGeometry) -> Self {
        SpinConfig::constant(geom, 1).expect("+1 is a valid spin")
    }

    pub fn all_minus(geom: SlabGeometry) -> Self {
        SpinConfig::constant(geom, -1).expect("-1 is a valid spin")
    }

    /// Build from a raw spin array in site-index order.
    pub fn from_spins(geom: SlabGeometry, spins: Vec<i8>) -> Result<Self> {
        if spins.len() != geom.site_count() {
            return Err(Error::InvalidArgument(format!(
                "spin array has {} entries, geometry has {} sites",
                spins.len(),
                geom.site_count()
            )));
        }
        for &s in &spins {
            check_spin(s)?;
        }
        Ok(SpinConfig { geom, spins })
    }

    pub fn geometry(&self) -> &SlabGeometry {
        &self.geom
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn get(&self, v: Site) -> Result<i8> {
        Ok(self.spins[self.geom.site_index(v)?])
    }

    pub fn set(&mut self, v: Site, spin: i8) -> Result<()> {
        check_spin(spin)?;
        let i = self.geom.site_index(v)?;
        self.spins[i] = spin;
        Ok(())
    }

    pub(crate) fn set_index(&mut self, index: usize, spin: i8) {
        self.spins[index] = spin;
    }

    pub(crate) fn flip_index(&mut self, index: usize) {
        self.spins[index] = -self.spins[index];
    }

    /// Local energy `e_v`: disagreeing minus agreeing neighbor count, with
    /// edge multiplicity. Negative iff a strict majority of neighbors agree.
    pub fn local_energy(&self, v: Site) -> Result<i32> {
        let s = self.get(v)? as i32;
        let mut e = 0i32;
        for w in self.geom.neighbors(v)? {
            e -= s * self.spins[self.geom.site_index(w)?] as i32;
        }
        Ok(e)
    }

    /// Total energy: minus the sum of `sigma_u * sigma_v` over edges counted
    /// with multiplicity (the k = 2 periodic vertical pair contributes twice).
    /// Equals half the sum of all local energies.
    pub fn hamiltonian(&self) -> i64 {
        let side = self.geom.side();
        let k = self.geom.k();
        let mut h = 0i64;
        for v in self.geom.sites() {
            let i = self.geom.site_index(v).expect("site in range");
            let s = self.spins[i] as i64;
            // Forward in-plane edges: +x and +y with wraparound, each
            // unordered pair enumerated exactly once.
            let xp = (v.z * side + v.y) * side + (v.x + 1) % side;
            let yp = (v.z * side + (v.y + 1) % side) * side + v.x;
            h -= s * self.spins[xp] as i64;
            h -= s * self.spins[yp] as i64;
            // Forward vertical edge. Under periodic conditions every level has
            // a forward partner; for k = 2 this enumerates the same unordered
            // pair from both ends, which is exactly its multiplicity of 2.
            match self.geom.vertical_bc() {
                VerticalBc::Free => {
                    if v.z + 1 < k {
                        let zp = ((v.z + 1) * side + v.y) * side + v.x;
                        h -= s * self.spins[zp] as i64;
                    }
                }
                VerticalBc::Periodic => {
                    let zp = (((v.z + 1) % k) * side + v.y) * side + v.x;
                    h -= s * self.spins[zp] as i64;
                }
            }
        }
        h
    }

    /// True iff no site can ever flip again: every local energy is negative.
    pub fn is_absorbing(&self) -> bool {
        self.geom
            .sites()
            .all(|v| self.local_energy(v).expect("site in range") < 0)
    }

    /// Serialize to the slab snapshot format: a header
    /// `slab k=<k> L=<L> bc=<free|periodic> t=<time>` followed by `k` blocks
    /// of `L` lines of `L` characters from `{+,-}`; z ascending over blocks,
    /// y ascending within a block, x ascending within a line.
    pub fn write_snapshot(&self, t: f64) -> String {
        let side = self.geom.side();
        let mut out = String::with_capacity(self.geom.site_count() + self.geom.k() * side + 64);
        out.push_str(&format!(
            "slab k={} L={} bc={} t={}\n",
            self.geom.k(),
            side,
            self.geom.vertical_bc().as_str(),
            t
        ));
        for z in 0..self.geom.k() {
            for y in 0..side {
                for x in 0..side {
                    let i = (z * side + y) * side + x;
                    out.push(if self.spins[i] > 0 { '+' } else { '-' });
                }
                out.push('\n');
            }
        }
        out
    }

    /// Parse the snapshot format produced by [`write_snapshot`](Self::write_snapshot).
    /// Returns the configuration and the recorded time.
    pub fn parse_snapshot(text: &str) -> Result<(SpinConfig, f64)> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::SnapshotFormat("empty snapshot".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "slab" {
            return Err(Error::SnapshotFormat(format!("bad header `{header}`")));
        }
        let field = |idx: usize, key: &str| -> Result<String> {
            let part = fields[idx];
            part.strip_prefix(&format!("{key}="))
                .map(str::to_owned)
                .ok_or_else(|| Error::SnapshotFormat(format!("expected `{key}=...`, got `{part}`")))
        };
        let k: usize = field(1, "k")?
            .parse()
            .map_err(|_| Error::SnapshotFormat("bad k".into()))?;
        let side: usize = field(2, "L")?
            .parse()
            .map_err(|_| Error::SnapshotFormat("bad L".into()))?;
        let bc = VerticalBc::parse(&field(3, "bc")?)?;
        let t: f64 = field(4, "t")?
            .parse()
            .map_err(|_| Error::SnapshotFormat("bad t".into()))?;
        let geom = SlabGeometry::new(k, side, bc)?;
        let mut spins = vec![0i8; geom.site_count()];
        for z in 0..k {
            for y in 0..side {
                let line = lines.next().ok_or_else(|| {
                    Error::SnapshotFormat(format!("missing row z={z} y={y}"))
                })?;
                if line.chars().count() != side {
                    return Err(Error::SnapshotFormat(format!(
                        "row z={z} y={y} has {} characters, expected {side}",
                        line.chars().count()
                    )));
                }
                for (x, c) in line.chars().enumerate() {
                    spins[(z * side + y) * side + x] = match c {
                        '+' => 1,
                        '-' => -1,
                        other => {
                            return Err(Error::SnapshotFormat(format!(
                                "unexpected character `{other}` at z={z} y={y} x={x}"
                            )))
                        }
                    };
                }
            }
        }
        if lines.next().is_some_and(|l| !l.trim().is_empty()) {
            return Err(Error::SnapshotFormat("trailing content after spin rows".into()));
        }
        Ok((SpinConfig { geom, spins }, t))
    }
}

fn check_spin(spin: i8) -> Result<()> {
    if spin == 1 || spin == -1 {
        Ok(())
    } else {
        Err(Error::InvalidSpin(spin))
    }
}
