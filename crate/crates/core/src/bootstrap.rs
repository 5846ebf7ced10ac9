//! Modified bootstrap percolation on the block torus.
//!
//! A k = 2 slab with even side tiles exactly into 2x2x2 blocks; a block is
//! occupied when it is monochromatic (such blocks are absorbing under the
//! spin dynamics). The block field then evolves by a monotone deterministic
//! rule: a block becomes occupied when two of its four orthogonal neighbors
//! are occupied and form a perpendicular pair (their difference has sup-norm
//! 1, so opposite pairs do not qualify). Synchronous updates are canonical;
//! the fixed point is the same under any one-site-at-a-time schedule.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::SpinConfig;
use crate::error::{Error, Result};

/// 0/1 occupation field on the `(L/2) x (L/2)` block torus, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaConfig {
    side: usize,
    occ: Vec<bool>,
    step_index: u64,
}

impl EtaConfig {
    pub fn new(side: usize, occ: Vec<bool>) -> Result<Self> {
        if occ.len() != side * side {
            return Err(Error::InvalidArgument(format!(
                "occupation array has {} entries for side {side}",
                occ.len()
            )));
        }
        Ok(EtaConfig { side, occ, step_index: 0 })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn occ(&self) -> &[bool] {
        &self.occ
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.occ[y * self.side + x]
    }

    pub fn ones(&self) -> usize {
        self.occ.iter().filter(|&&b| b).count()
    }

    pub fn is_full(&self) -> bool {
        self.occ.iter().all(|&b| b)
    }

    /// Snapshot: header `eta L=<side> n=<step>` then rows of 0/1 characters.
    pub fn write_snapshot(&self) -> String {
        let mut out = String::with_capacity(self.side * (self.side + 1) + 32);
        out.push_str(&format!("eta L={} n={}\n", self.side, self.step_index));
        for y in 0..self.side {
            for x in 0..self.side {
                out.push(if self.get(x, y) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_snapshot(text: &str) -> Result<EtaConfig> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::SnapshotFormat("empty eta snapshot".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "eta" {
            return Err(Error::SnapshotFormat(format!("bad eta header `{header}`")));
        }
        let side: usize = fields[1]
            .strip_prefix("L=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::SnapshotFormat("bad L".into()))?;
        let step_index: u64 = fields[2]
            .strip_prefix("n=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::SnapshotFormat("bad n".into()))?;
        let mut occ = Vec::with_capacity(side * side);
        for y in 0..side {
            let line = lines
                .next()
                .ok_or_else(|| Error::SnapshotFormat(format!("missing eta row y={y}")))?;
            if line.chars().count() != side {
                return Err(Error::SnapshotFormat(format!("eta row y={y} has wrong length")));
            }
            for c in line.chars() {
                occ.push(match c {
                    '1' => true,
                    '0' => false,
                    other => {
                        return Err(Error::SnapshotFormat(format!(
                            "unexpected eta character `{other}`"
                        )))
                    }
                });
            }
        }
        Ok(EtaConfig { side, occ, step_index })
    }
}

/// Occupation from monochromatic 2x2x2 blocks of a k = 2 slab.
pub fn extract_eta(config: &SpinConfig) -> Result<EtaConfig> {
    let geom = config.geometry();
    if geom.k() != 2 {
        return Err(Error::InvalidArgument(format!(
            "block extraction needs k = 2, got k = {}",
            geom.k()
        )));
    }
    let side = geom.side();
    let bside = side / 2;
    let spins = config.spins();
    let mut occ = Vec::with_capacity(bside * bside);
    for by in 0..bside {
        for bx in 0..bside {
            let first = spins[(2 * by) * side + 2 * bx];
            let mut mono = true;
            'block: for dz in 0..2 {
                for dy in 0..2 {
                    for dx in 0..2 {
                        let i = (dz * side + 2 * by + dy) * side + 2 * bx + dx;
                        if spins[i] != first {
                            mono = false;
                            break 'block;
                        }
                    }
                }
            }
            occ.push(mono);
        }
    }
    EtaConfig::new(bside, occ)
}

/// I.i.d. occupation field with the given density (direct density mode).
pub fn sample_eta(side: usize, density: f64, rng: &mut ChaCha8Rng) -> Result<EtaConfig> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidProbability(density));
    }
    let occ: Vec<bool> = (0..side * side).map(|_| rng.random::<f64>() < density).collect();
    EtaConfig::new(side, occ)
}

#[inline]
fn rule(side: usize, occ: &[bool], x: usize, y: usize) -> bool {
    let idx = |x: usize, y: usize| y * side + x;
    if occ[idx(x, y)] {
        return true;
    }
    let north = occ[idx(x, (y + 1) % side)];
    let south = occ[idx(x, (y + side - 1) % side)];
    let east = occ[idx((x + 1) % side, y)];
    let west = occ[idx((x + side - 1) % side, y)];
    // Two occupied neighbors at sup-norm distance 1 from each other means one
    // vertical and one horizontal neighbor; opposite pairs are distance 2.
    (north || south) && (east || west)
}

/// One synchronous update of the whole field.
pub fn bootstrap_step(eta: &EtaConfig) -> EtaConfig {
    let side = eta.side;
    let mut occ = vec![false; side * side];
    for y in 0..side {
        for x in 0..side {
            occ[y * side + x] = rule(side, &eta.occ, x, y);
        }
    }
    EtaConfig { side, occ, step_index: eta.step_index + 1 }
}

/// Iterate synchronous steps to the fixed point. Monotonicity bounds the
/// number of steps by the number of cells. `step_index` of the result counts
/// the steps taken until (and excluding) the first unchanged image.
pub fn closure(eta: &EtaConfig) -> EtaConfig {
    let mut current = eta.clone();
    current.step_index = 0;
    loop {
        let next = bootstrap_step(&current);
        if next.occ == current.occ {
            return current;
        }
        current = next;
    }
}

/// Fraction of occupied blocks.
pub fn occupation_fraction(eta: &EtaConfig) -> f64 {
    eta.ones() as f64 / (eta.side * eta.side) as f64
}

/// Diagnostic: scan for an all-empty rectangular contour around the given
/// rectangle (corner `(x0, y0)`, width `w`, height `h`), inflating it by
/// successive margins. Returns the first margin whose full ring of cells is
/// empty, if any fits on the torus without self-overlap. No correctness
/// claim attaches to this helper; it mirrors a contour heuristic for eyeball
/// diagnosis of stuck regions.
pub fn empty_contour_margin(
    eta: &EtaConfig,
    x0: usize,
    y0: usize,
    w: usize,
    h: usize,
) -> Option<usize> {
    let side = eta.side as i64;
    let mut margin = 1i64;
    loop {
        let rw = w as i64 + 2 * margin;
        let rh = h as i64 + 2 * margin;
        if rw > side || rh > side {
            return None;
        }
        let left = x0 as i64 - margin;
        let top = y0 as i64 - margin;
        let mut all_empty = true;
        'ring: for dy in 0..rh {
            for dx in 0..rw {
                let on_ring = dy == 0 || dy == rh - 1 || dx == 0 || dx == rw - 1;
                if !on_ring {
                    continue;
                }
                let x = (left + dx).rem_euclid(side) as usize;
                let y = (top + dy).rem_euclid(side) as usize;
                if eta.get(x, y) {
                    all_empty = false;
                    break 'ring;
                }
            }
        }
        if all_empty {
            return Some(margin as usize);
        }
        margin += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::replica_rng;
    use crate::initial::sample_product;
    use crate::lattice::{Site, SlabGeometry, VerticalBc};

    fn from_points(side: usize, points: &[(usize, usize)]) -> EtaConfig {
        let mut occ = vec![false; side * side];
        for &(x, y) in points {
            occ[y * side + x] = true;
        }
        EtaConfig::new(side, occ).unwrap()
    }

    #[test]
    fn extraction_basics() {
        let g = SlabGeometry::new(2, 8, VerticalBc::Free).unwrap();
        let c = SpinConfig::all_plus(g);
        let eta = extract_eta(&c).unwrap();
        assert_eq!(eta.side(), 4);
        assert!(eta.is_full());

        // One flipped spin empties exactly its own block.
        let mut c = SpinConfig::all_plus(g);
        c.set(Site::new(3, 3, 0), -1).unwrap();
        let eta = extract_eta(&c).unwrap();
        assert_eq!(eta.ones(), 15);
        assert!(!eta.get(1, 1));

        let g3 = SlabGeometry::new(3, 8, VerticalBc::Free).unwrap();
        assert!(extract_eta(&SpinConfig::all_plus(g3)).is_err());
    }

    #[test]
    fn extraction_density_matches_monochromatic_block_probability() {
        // A 2x2x2 block has 2 monochromatic assignments among 2^8, so the
        // block density under mu-1/2 is 2^-7.
        let g = SlabGeometry::new(2, 512, VerticalBc::Free).unwrap();
        let mut rng = replica_rng(400, 0);
        let c = sample_product(g, 0.5, &mut rng).unwrap();
        let eta = extract_eta(&c).unwrap();
        let blocks = (256 * 256) as f64;
        let p = 2.0f64.powi(-7);
        let tol = 3.0 * (p * (1.0 - p) / blocks).sqrt();
        let density = occupation_fraction(&eta);
        assert!((density - p).abs() <= tol, "density {density} vs {p} +- {tol}");
    }

    #[test]
    fn perpendicular_pairs_grow_opposite_pairs_do_not() {
        // North + east neighbors occupied: the origin fills.
        let eta = from_points(8, &[(0, 1), (1, 0)]);
        assert!(bootstrap_step(&eta).get(0, 0));
        // North + south only: it does not.
        let eta = from_points(8, &[(0, 1), (0, 7)]);
        assert!(!bootstrap_step(&eta).get(0, 0));
        // Occupied cells stay occupied.
        let eta = from_points(8, &[(3, 3)]);
        assert!(bootstrap_step(&eta).get(3, 3));
    }

    #[test]
    fn isolated_square_is_a_fixed_point() {
        // No exterior cell of a lone 2x2 square has a perpendicular occupied
        // pair; exhaustively confirmed by one synchronous step.
        let eta = from_points(8, &[(2, 2), (2, 3), (3, 2), (3, 3)]);
        let next = bootstrap_step(&eta);
        assert_eq!(next.occ(), eta.occ());
        assert_eq!(closure(&eta).occ(), eta.occ());
    }

    #[test]
    fn square_with_diagonal_seed_closes_to_rectangle() {
        // {(0,0),(0,1),(1,0),(1,1),(2,1)}: (2,0) has west and north occupied,
        // fills, and the fixed point is the 3x2 rectangle.
        let eta = from_points(8, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 1)]);
        let closed = closure(&eta);
        let expect = from_points(8, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]);
        assert_eq!(closed.occ(), expect.occ());
    }

    #[test]
    fn closure_trivial_cases_and_idempotence() {
        let empty = EtaConfig::new(8, vec![false; 64]).unwrap();
        assert_eq!(closure(&empty).occ(), empty.occ());
        let full = EtaConfig::new(8, vec![true; 64]).unwrap();
        let closed = closure(&full);
        assert!(closed.is_full());
        assert_eq!(closed.step_index(), 0);

        let mut rng = replica_rng(401, 0);
        let eta = sample_eta(16, 0.2, &mut rng).unwrap();
        let once = closure(&eta);
        let twice = closure(&once);
        assert_eq!(once.occ(), twice.occ());
    }

    #[test]
    fn occupation_fraction_is_monotone_along_steps() {
        let mut rng = replica_rng(402, 0);
        let mut eta = sample_eta(32, 0.1, &mut rng).unwrap();
        let mut last = occupation_fraction(&eta);
        for _ in 0..20 {
            eta = bootstrap_step(&eta);
            let now = occupation_fraction(&eta);
            assert!(now >= last);
            last = now;
        }
    }

    #[test]
    fn closure_monotone_in_initial_condition() {
        let mut rng = replica_rng(403, 0);
        for _ in 0..5 {
            let low = sample_eta(16, 0.15, &mut rng).unwrap();
            // Pointwise-dominating field: add more occupied cells.
            let extra = sample_eta(16, 0.1, &mut rng).unwrap();
            let high_occ: Vec<bool> =
                low.occ().iter().zip(extra.occ()).map(|(&a, &b)| a || b).collect();
            let high = EtaConfig::new(16, high_occ).unwrap();
            let cl = closure(&low);
            let ch = closure(&high);
            for (a, b) in cl.occ().iter().zip(ch.occ()) {
                assert!(!*a || *b, "closure not monotone");
            }
        }
    }

    #[test]
    fn monochromatic_blocks_are_stable_sets_in_the_slab() {
        // Every monochromatic 2x2x2 block is absorbing under the spin
        // dynamics, for both vertical boundary conditions.
        use crate::certify::is_stable_set;
        for bc in [VerticalBc::Free, VerticalBc::Periodic] {
            let g = SlabGeometry::new(2, 8, bc).unwrap();
            let mut rng = replica_rng(404, 0);
            let mut c = sample_product(g, 0.5, &mut rng).unwrap();
            let block: Vec<Site> = (0..8)
                .map(|i| Site::new(4 + (i & 1), 2 + ((i >> 1) & 1), (i >> 2) & 1))
                .collect();
            for &v in &block {
                c.set(v, -1).unwrap();
            }
            assert!(is_stable_set(&c, &block).unwrap());
        }
    }

    #[test]
    fn empty_contour_diagnostic() {
        // A lone 2x2 square: margin-1 ring is empty.
        let eta = from_points(12, &[(5, 5), (5, 6), (6, 5), (6, 6)]);
        assert_eq!(empty_contour_margin(&eta, 5, 5, 2, 2), Some(1));
        // Occupied cell on the margin-1 ring pushes the contour out.
        let eta = from_points(12, &[(5, 5), (5, 6), (6, 5), (6, 6), (7, 5)]);
        assert_eq!(empty_contour_margin(&eta, 5, 5, 2, 2), Some(2));
        // Fully occupied: no empty contour at any margin.
        let full = EtaConfig::new(8, vec![true; 64]).unwrap();
        assert_eq!(empty_contour_margin(&full, 2, 2, 2, 2), None);
    }
}
