//! Non-crossing combinatorics on the disk and on the annulus.

mod annulus;
mod graph;
mod partition;

pub(crate) use annulus::{anc_positions, annulus_cycles, kreweras_annular_positions};
pub(crate) use partition::kreweras_positions;
pub use annulus::{
    annular_pairings, enumerate_annular_ncp, enumerate_marked, is_annular_ncp, kreweras_annular,
    AnnulusShape, CyclicPermutation, MarkedPartitionPair,
};
pub use graph::{enumerate_ncg, for_each_ncg, ncg_weight_sum, WeightedGraph};
pub use partition::{
    enumerate_ncp, is_noncrossing, kreweras_disk, moebius_nc, moebius_to_top, ncp_positions,
    SetPartition,
};

use alloc::vec::Vec;

/// Number of cycles of a permutation given as an image array over `0..n`.
pub(crate) fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = alloc::vec![false; perm.len()];
    let mut count = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
        }
    }
    count
}

/// Cycles of a permutation over `0..n`, each starting at its minimum, sorted by minimum.
pub(crate) fn cycles_of(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = alloc::vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push(i);
            i = perm[i];
        }
        out.push(cycle);
    }
    out
}

pub(crate) fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = alloc::vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}
