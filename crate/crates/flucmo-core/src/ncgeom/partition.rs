use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::{cycles_of, invert};
use crate::{Error, Result};

/// A set partition of an ordered ground set of labels.
///
/// Blocks list their labels in ground order and are sorted by their first element, so
/// structural equality is partition equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    ground: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds a partition from label blocks, validating coverage and disjointness.
    pub fn new(ground: Vec<usize>, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let pos = position_map(&ground)?;
        let mut seen = alloc::vec![false; ground.len()];
        let mut pos_blocks = Vec::with_capacity(blocks.len());
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidLabels("empty block".into()));
            }
            let mut pb = Vec::with_capacity(block.len());
            for label in block {
                let p = *pos
                    .get(label)
                    .ok_or_else(|| Error::InvalidLabels(format!("label {label} not in ground set")))?;
                if seen[p] {
                    return Err(Error::InvalidLabels(format!("label {label} repeated")));
                }
                seen[p] = true;
                pb.push(p);
            }
            pos_blocks.push(pb);
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidLabels("blocks do not cover the ground set".into()));
        }
        Ok(Self::from_positions(ground, pos_blocks))
    }

    /// Builds a partition from blocks of positions into `ground` (assumed valid).
    pub fn from_positions(ground: Vec<usize>, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort_unstable();
        let blocks = blocks
            .into_iter()
            .map(|b| b.into_iter().map(|p| ground[p]).collect())
            .collect();
        SetPartition { ground, blocks }
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks `|π|`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks as sorted position lists.
    pub fn position_blocks(&self) -> Vec<Vec<usize>> {
        let pos = position_map(&self.ground).expect("validated ground");
        self.blocks
            .iter()
            .map(|b| b.iter().map(|l| pos[l]).collect())
            .collect()
    }

    /// Block index of every position.
    pub fn block_ids(&self) -> Vec<usize> {
        let mut ids = alloc::vec![0; self.ground.len()];
        for (bi, b) in self.position_blocks().iter().enumerate() {
            for &p in b {
                ids[p] = bi;
            }
        }
        ids
    }

    /// Whether every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &SetPartition) -> bool {
        if self.ground != other.ground {
            return false;
        }
        let ids = other.block_ids();
        self.position_blocks()
            .iter()
            .all(|b| b.iter().all(|&p| ids[p] == ids[b[0]]))
    }

    /// The partition into singletons.
    pub fn singletons(ground: Vec<usize>) -> Self {
        let blocks = (0..ground.len()).map(|p| alloc::vec![p]).collect();
        Self::from_positions(ground, blocks)
    }

    /// The one-block partition.
    pub fn full(ground: Vec<usize>) -> Self {
        let blocks = if ground.is_empty() {
            Vec::new()
        } else {
            alloc::vec![(0..ground.len()).collect()]
        };
        Self::from_positions(ground, blocks)
    }
}

fn position_map(ground: &[usize]) -> Result<BTreeMap<usize, usize>> {
    let mut pos = BTreeMap::new();
    for (i, &l) in ground.iter().enumerate() {
        if pos.insert(l, i).is_some() {
            return Err(Error::InvalidLabels(format!("ground label {l} repeated")));
        }
    }
    Ok(pos)
}

/// Whether blocks of positions (sorted) cross in the cyclic order.
pub(crate) fn positions_noncrossing(n: usize, blocks: &[Vec<usize>]) -> bool {
    let mut ids = alloc::vec![usize::MAX; n];
    for (bi, b) in blocks.iter().enumerate() {
        for &p in b {
            ids[p] = bi;
        }
    }
    // a < b < c < d with a,c in one block and b,d in another
    for a in 0..n {
        for b in a + 1..n {
            if ids[b] == ids[a] {
                continue;
            }
            for c in b + 1..n {
                if ids[c] != ids[a] {
                    continue;
                }
                if (c + 1..n).any(|d| ids[d] == ids[b]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether a partition is non-crossing with respect to the cyclic order of its ground set.
pub fn is_noncrossing(pi: &SetPartition) -> bool {
    positions_noncrossing(pi.ground.len(), &pi.position_blocks())
}

/// All non-crossing partitions of `0..n` as sorted position blocks.
///
/// Built from the Catalan decomposition by the largest element of the block of 0.
pub fn ncp_positions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut table: Vec<Vec<Vec<Vec<usize>>>> = alloc::vec![alloc::vec![Vec::new()]];
    for size in 1..=n {
        let mut out = Vec::new();
        for j in 0..size {
            for inner in &table[j] {
                for tail in &table[size - 1 - j] {
                    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(inner.len() + tail.len() + 1);
                    if j == 0 {
                        blocks.push(alloc::vec![0]);
                    }
                    for b in inner {
                        let mut nb: Vec<usize> = b.iter().map(|p| p + 1).collect();
                        if *nb.last().unwrap() == j {
                            nb.insert(0, 0);
                        }
                        blocks.push(nb);
                    }
                    for b in tail {
                        blocks.push(b.iter().map(|p| p + j + 1).collect());
                    }
                    blocks.sort_unstable();
                    out.push(blocks);
                }
            }
        }
        table.push(out);
    }
    table.swap_remove(n)
}

/// Enumerates the non-crossing partitions of a cyclically ordered label list.
pub fn enumerate_ncp(ground: &[usize]) -> Result<Vec<SetPartition>> {
    position_map(ground)?;
    Ok(ncp_positions(ground.len())
        .into_iter()
        .map(|b| SetPartition::from_positions(ground.to_vec(), b))
        .collect())
}

/// Kreweras complement on the disk, computed as the cycles of `π⁻¹ ∘ γ`.
pub fn kreweras_disk(pi: &SetPartition) -> Result<SetPartition> {
    if !is_noncrossing(pi) {
        return Err(Error::Crossing);
    }
    let n = pi.ground.len();
    let blocks = kreweras_positions(n, &pi.position_blocks());
    Ok(SetPartition::from_positions(pi.ground.clone(), blocks))
}

/// Kreweras complement of sorted position blocks on `0..n`.
pub(crate) fn kreweras_positions(n: usize, blocks: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut perm = alloc::vec![0; n];
    for b in blocks {
        for (i, &p) in b.iter().enumerate() {
            perm[p] = b[(i + 1) % b.len()];
        }
    }
    let inv = invert(&perm);
    let k: Vec<usize> = (0..n).map(|i| inv[(i + 1) % n]).collect();
    cycles_of(&k)
}

/// Möbius function `μ(π, ν)` of the non-crossing partition lattice.
///
/// Evaluated from the recursive definition over the interval `[π, ν]`.
pub fn moebius_nc(pi: &SetPartition, nu: &SetPartition) -> Result<i64> {
    if pi.ground != nu.ground {
        return Err(Error::InvalidLabels("different ground sets".into()));
    }
    if !is_noncrossing(pi) || !is_noncrossing(nu) {
        return Err(Error::Crossing);
    }
    if !pi.refines(nu) {
        return Err(Error::NotComparable);
    }
    let all = enumerate_ncp(&pi.ground)?;
    let interval: Vec<SetPartition> = all
        .into_iter()
        .filter(|t| pi.refines(t) && t.refines(nu))
        .collect();
    let mu = moebius_over(&interval, nu);
    let idx = interval.iter().position(|t| t == pi).expect("π lies in its interval");
    Ok(mu[idx])
}

/// `μ(τ, ν)` for every `τ` of an interval ending at `ν`.
fn moebius_over(interval: &[SetPartition], nu: &SetPartition) -> Vec<i64> {
    let mut order: Vec<usize> = (0..interval.len()).collect();
    order.sort_by_key(|&i| interval[i].len());
    let mut mu = alloc::vec![0i64; interval.len()];
    for (pos, &i) in order.iter().enumerate() {
        if interval[i] == *nu {
            mu[i] = 1;
            continue;
        }
        let mut s = 0;
        for &j in &order[..pos] {
            if interval[j].len() < interval[i].len() && interval[i].refines(&interval[j]) {
                s += mu[j];
            }
        }
        mu[i] = -s;
    }
    mu
}

/// `μ(π, 1_n)` for every non-crossing partition of `0..n`, by the recursive definition.
pub fn moebius_to_top(n: usize) -> Vec<(Vec<Vec<usize>>, i64)> {
    let ground: Vec<usize> = (0..n).collect();
    let parts: Vec<SetPartition> = ncp_positions(n)
        .into_iter()
        .map(|b| SetPartition::from_positions(ground.clone(), b))
        .collect();
    let top = SetPartition::full(ground);
    let mu = moebius_over(&parts, &top);
    parts
        .into_iter()
        .zip(mu)
        .map(|(p, m)| (p.position_blocks(), m))
        .collect()
}
