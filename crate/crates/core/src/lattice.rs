//! Slab lattice geometry: an `L x L` in-plane torus of thickness `k`.
//!
//! Sites live at integer coordinates `(x, y, z)` with `x, y` taken modulo the
//! torus side and `z` in `[0, k)`. Edges connect sites at 1-norm distance 1.
//! The vertical direction is either free (levels 0 and k-1 have no partner
//! beyond the slab) or periodic (level k-1 wraps to level 0). For `k = 2`
//! periodic the wrap identifies both vertical edges of a column, so the single
//! vertical neighbor carries edge multiplicity 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary condition in the vertical (z) direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerticalBc {
    Free,
    Periodic,
}

impl VerticalBc {
    pub fn as_str(self) -> &'static str {
        match self {
            VerticalBc::Free => "free",
            VerticalBc::Periodic => "periodic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(VerticalBc::Free),
            "periodic" => Ok(VerticalBc::Periodic),
            other => Err(Error::InvalidGeometry(format!(
                "unknown boundary condition `{other}` (expected `free` or `periodic`)"
            ))),
        }
    }
}

/// A site of the slab. In-plane coordinates are canonical representatives in
/// `[0, side)`; arithmetic on them wraps around the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl Site {
    pub fn new(x: usize, y: usize, z: usize) -> Self {
        Site { x, y, z }
    }
}

/// Shape of the finite slab: thickness `k >= 2` and an even in-plane torus
/// side `>= 8` (evenness lets 2x2x2 blocks tile the slab exactly).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlabGeometry {
    k: usize,
    side: usize,
    vertical_bc: VerticalBc,
}

impl SlabGeometry {
    pub fn new(k: usize, side: usize, vertical_bc: VerticalBc) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidGeometry(format!("thickness k = {k} must be >= 2")));
        }
        if side < 8 || !side.is_multiple_of(2) {
            return Err(Error::InvalidGeometry(format!(
                "torus side L = {side} must be even and >= 8"
            )));
        }
        Ok(SlabGeometry { k, side, vertical_bc })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn vertical_bc(&self) -> VerticalBc {
        self.vertical_bc
    }

    pub fn site_count(&self) -> usize {
        self.side * self.side * self.k
    }

    /// Events per sweep: one expected clock ring per site.
    pub fn events_per_sweep(&self) -> u64 {
        self.site_count() as u64
    }

    pub fn contains(&self, v: Site) -> bool {
        v.x < self.side && v.y < self.side && v.z < self.k
    }

    fn check(&self, v: Site) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::SiteOutOfBounds { x: v.x, y: v.y, z: v.z, k: self.k, side: self.side })
        }
    }

    /// Linear index of a site. Layout is fixed and documented: z-major, then
    /// y, with x fastest: `index = (z * L + y) * L + x`.
    pub fn site_index(&self, v: Site) -> Result<usize> {
        self.check(v)?;
        Ok((v.z * self.side + v.y) * self.side + v.x)
    }

    /// Inverse of [`site_index`](Self::site_index).
    pub fn index_site(&self, index: usize) -> Result<Site> {
        if index >= self.site_count() {
            return Err(Error::IndexOutOfBounds { index, count: self.site_count() });
        }
        let x = index % self.side;
        let rest = index / self.side;
        let y = rest % self.side;
        let z = rest / self.side;
        Ok(Site { x, y, z })
    }

    /// Canonical site for arbitrary integer in-plane coordinates (wrapped
    /// around the torus). `z` is not wrapped.
    pub fn wrap(&self, x: i64, y: i64, z: usize) -> Result<Site> {
        if z >= self.k {
            return Err(Error::SiteOutOfBounds {
                x: x.rem_euclid(self.side as i64) as usize,
                y: y.rem_euclid(self.side as i64) as usize,
                z,
                k: self.k,
                side: self.side,
            });
        }
        let side = self.side as i64;
        Ok(Site { x: x.rem_euclid(side) as usize, y: y.rem_euclid(side) as usize, z })
    }

    /// In-plane torus translation.
    pub fn translate(&self, v: Site, dx: i64, dy: i64) -> Result<Site> {
        self.check(v)?;
        self.wrap(v.x as i64 + dx, v.y as i64 + dy, v.z)
    }

    /// Number of neighbors counted with edge multiplicity.
    pub fn degree(&self, v: Site) -> Result<usize> {
        self.check(v)?;
        Ok(match self.vertical_bc {
            VerticalBc::Periodic => 6,
            VerticalBc::Free => {
                if v.z == 0 || v.z == self.k - 1 {
                    5
                } else {
                    6
                }
            }
        })
    }

    /// The neighbor multiset of `v`: 1-norm neighbors with in-plane
    /// wraparound and the vertical rule of the boundary condition. For k = 2
    /// periodic the vertical partner appears twice.
    pub fn neighbors(&self, v: Site) -> Result<Vec<Site>> {
        self.check(v)?;
        let side = self.side as i64;
        let (x, y) = (v.x as i64, v.y as i64);
        let mut out = Vec::with_capacity(6);
        for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
            out.push(Site {
                x: (x + dx).rem_euclid(side) as usize,
                y: (y + dy).rem_euclid(side) as usize,
                z: v.z,
            });
        }
        match self.vertical_bc {
            VerticalBc::Free => {
                if v.z > 0 {
                    out.push(Site { z: v.z - 1, ..v });
                }
                if v.z + 1 < self.k {
                    out.push(Site { z: v.z + 1, ..v });
                }
            }
            VerticalBc::Periodic => {
                out.push(Site { z: (v.z + 1) % self.k, ..v });
                out.push(Site { z: (v.z + self.k - 1) % self.k, ..v });
            }
        }
        Ok(out)
    }

    /// All sites in index order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.site_count()).map(|i| self.index_site(i).expect("index in range"))
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count(&self) -> usize {
        let degree_total = match self.vertical_bc {
            VerticalBc::Periodic => 6 * self.side * self.side * self.k,
            VerticalBc::Free => self.side * self.side * (6 * self.k - 2),
        };
        degree_total / 2
    }
}
