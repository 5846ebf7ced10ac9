//! Stability certificates: maximal subsets of a candidate site set in which
//! every member has a strict majority of same-spin neighbors inside the
//! subset (counted with edge multiplicity).
//!
//! A site whose strict majority condition holds can never flip while its
//! supporting neighbors hold theirs, so the greatest fixed point of iterated
//! removal is provably absorbing: no dynamics trajectory started from the
//! inspected configuration ever flips a member.

use crate::config::SpinConfig;
use crate::error::Result;
use crate::lattice::{Site, SlabGeometry};

/// A certified set: sites (in index order) with the spins they are pinned at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedSet {
    sites: Vec<Site>,
    pinned: Vec<i8>,
}

impl CertifiedSet {
    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn pinned(&self) -> &[i8] {
        &self.pinned
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, i8)> + '_ {
        self.sites.iter().copied().zip(self.pinned.iter().copied())
    }

    /// Site-index membership mask.
    pub fn mask(&self, geom: &SlabGeometry) -> Vec<bool> {
        let mut mask = vec![false; geom.site_count()];
        for &s in &self.sites {
            mask[geom.site_index(s).expect("certified site in range")] = true;
        }
        mask
    }

    pub fn contains(&self, v: Site) -> bool {
        self.sites.contains(&v)
    }
}

/// Greatest stable subset of `candidate`: repeatedly delete any site whose
/// strict-majority condition fails within the surviving set, until none
/// fails. The fixed point is independent of deletion order; a worklist makes
/// it near-linear.
pub fn certify(config: &SpinConfig, candidate: &[Site]) -> Result<CertifiedSet> {
    let geom = *config.geometry();
    let n = geom.site_count();
    let mut in_set = vec![false; n];
    for &v in candidate {
        in_set[geom.site_index(v)?] = true;
    }
    // Same-spin in-set neighbor count per member, with multiplicity.
    let mut support = vec![0i32; n];
    let mut degree = vec![0u8; n];
    let mut members: Vec<usize> = Vec::new();
    for (i, member) in in_set.iter().enumerate() {
        if !member {
            continue;
        }
        members.push(i);
        let v = geom.index_site(i).expect("index in range");
        degree[i] = geom.degree(v).expect("site in range") as u8;
        let s = config.spins()[i];
        for w in geom.neighbors(v).expect("site in range") {
            let wi = geom.site_index(w).expect("site in range");
            if in_set[wi] && config.spins()[wi] == s {
                support[i] += 1;
            }
        }
    }
    let fails = |i: usize, support: &[i32]| 2 * support[i] <= degree[i] as i32;
    let mut queue: Vec<usize> = members.iter().copied().filter(|&i| fails(i, &support)).collect();
    while let Some(i) = queue.pop() {
        if !in_set[i] {
            continue;
        }
        in_set[i] = false;
        let v = geom.index_site(i).expect("index in range");
        let s = config.spins()[i];
        for w in geom.neighbors(v).expect("site in range") {
            let wi = geom.site_index(w).expect("site in range");
            if in_set[wi] && config.spins()[wi] == s {
                support[wi] -= 1;
                if fails(wi, &support) {
                    queue.push(wi);
                }
            }
        }
    }
    let mut sites = Vec::new();
    let mut pinned = Vec::new();
    for (i, member) in in_set.iter().enumerate() {
        if *member {
            sites.push(geom.index_site(i).expect("index in range"));
            pinned.push(config.spins()[i]);
        }
    }
    Ok(CertifiedSet { sites, pinned })
}

/// True iff the candidate set is its own certificate (no site is removed).
pub fn is_stable_set(config: &SpinConfig, candidate: &[Site]) -> Result<bool> {
    let mut dedup: Vec<usize> = candidate
        .iter()
        .map(|&v| config.geometry().site_index(v))
        .collect::<Result<_>>()?;
    dedup.sort_unstable();
    dedup.dedup();
    Ok(certify(config, candidate)?.len() == dedup.len())
}
