use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::vec::Vec;

use super::{Component, EnsembleParams, ScalarSecondOrder};
use crate::ncgeom::{ncp_positions, AnnulusShape};
use crate::semicircle::{graph_moment, stieltjes_all};
use crate::{Caps, Result, C64};

/// Second-order cumulants `f∘∘[U₁|U₂]` for every pair of nonempty ordered subsets of the
/// two circles, obtained by inverting
/// `f[U₁|U₂] = Σ_{π∈NCP⃗} ∏_{B∈π} f∘[B] + Σ_{marked} f∘∘[V₁|V₂] ∏ f∘[B]`.
///
/// Labels are `0..k` (outer) and `k..k+l` (inner). Subsets are bitmasks over each circle.
#[derive(Debug, Clone)]
pub(crate) struct SecondCumulants {
    k: usize,
    values: BTreeMap<(u32, u32), C64>,
}

impl SecondCumulants {
    /// `first(seq)` is the first-order cumulant of a block given as labels in cycle order;
    /// `moment(u1, u2)` is `f[u1|u2]`.
    pub(crate) fn compute<F1, F2>(
        k: usize,
        l: usize,
        caps: &Caps,
        mut first: F1,
        mut moment: F2,
    ) -> Result<Self>
    where
        F1: FnMut(&[usize]) -> Result<C64>,
        F2: FnMut(&[usize], &[usize]) -> Result<C64>,
    {
        let mut pairs: Vec<(u32, u32)> = (1..1u32 << k)
            .flat_map(|a| (1..1u32 << l).map(move |b| (a, b)))
            .collect();
        pairs.sort_by_key(|&(a, b)| (a.count_ones() + b.count_ones(), a, b));
        let mut anc_cache: BTreeMap<(usize, usize), Vec<Vec<Vec<usize>>>> = BTreeMap::new();
        let mut ncp_cache: BTreeMap<usize, Vec<Vec<Vec<usize>>>> = BTreeMap::new();
        let mut values = BTreeMap::new();
        for (ma, mb) in pairs {
            let u1: Vec<usize> = (0..k).filter(|i| ma >> i & 1 == 1).collect();
            let u2: Vec<usize> = (0..l).filter(|i| mb >> i & 1 == 1).map(|i| k + i).collect();
            let (a, b) = (u1.len(), u2.len());
            let label = |p: usize| if p < a { u1[p] } else { u2[p - a] };

            let mut val = moment(&u1, &u2)?;
            let cycles = match anc_cache.entry((a, b)) {
                Entry::Occupied(e) => e.into_mut(),
                Entry::Vacant(e) => e.insert(crate::ncgeom::annulus_cycles(AnnulusShape::new(a, b), caps)?),
            };
            for pi in cycles.iter() {
                let mut prod = C64::new(1.0, 0.0);
                for c in pi {
                    let seq: Vec<usize> = c.iter().map(|&p| label(p)).collect();
                    prod *= first(&seq)?;
                }
                val -= prod;
            }
            for n in [a, b] {
                ncp_cache.entry(n).or_insert_with(|| ncp_positions(n));
            }
            for p1 in &ncp_cache[&a] {
                for p2 in &ncp_cache[&b] {
                    for (i1, v1) in p1.iter().enumerate() {
                        for (i2, v2) in p2.iter().enumerate() {
                            if v1.len() == a && v2.len() == b {
                                continue;
                            }
                            let key = (
                                v1.iter().map(|&p| 1u32 << u1[p]).sum::<u32>(),
                                v2.iter().map(|&p| 1u32 << (u2[p] - k)).sum::<u32>(),
                            );
                            let mut prod = values[&key];
                            for (j, blk) in p1.iter().enumerate() {
                                if j != i1 {
                                    let seq: Vec<usize> = blk.iter().map(|&p| u1[p]).collect();
                                    prod *= first(&seq)?;
                                }
                            }
                            for (j, blk) in p2.iter().enumerate() {
                                if j != i2 {
                                    let seq: Vec<usize> = blk.iter().map(|&p| u2[p]).collect();
                                    prod *= first(&seq)?;
                                }
                            }
                            val -= prod;
                        }
                    }
                }
            }
            values.insert((ma, mb), val);
        }
        Ok(SecondCumulants { k, values })
    }

    /// `f∘∘[U₁|U₂]` for label sets (outer labels `< k`, inner labels `≥ k`).
    pub(crate) fn get(&self, u1: &[usize], u2: &[usize]) -> C64 {
        let a = u1.iter().map(|&i| 1u32 << i).sum::<u32>();
        let b = u2.iter().map(|&i| 1u32 << (i - self.k)).sum::<u32>();
        self.values[&(a, b)]
    }
}

/// First-order free cumulants of label sequences, cached.
pub(crate) fn mcirc_cached(
    cache: &mut BTreeMap<Vec<usize>, C64>,
    zs: &[C64],
    seq: &[usize],
) -> Result<C64> {
    if let Some(&v) = cache.get(seq) {
        return Ok(v);
    }
    let sub: Vec<C64> = seq.iter().map(|&i| zs[i]).collect();
    let v = graph_moment(&stieltjes_all(&sub)?, None, 0.0, true)?;
    cache.insert(seq.to_vec(), v);
    Ok(v)
}

/// Second-order free cumulant `m∘∘[left|right]` of the GUE component.
pub fn second_cumulant(left: &[C64], right: &[C64], caps: &Caps) -> Result<C64> {
    let (k, l) = (left.len(), right.len());
    if k == 0 || l == 0 {
        return Ok(C64::new(0.0, 0.0));
    }
    Caps::check("second-order cumulant", k + l, caps.m2)?;
    let table = gue_second_cumulants(left, right, caps)?;
    let u1: Vec<usize> = (0..k).collect();
    let u2: Vec<usize> = (k..k + l).collect();
    Ok(table.get(&u1, &u2))
}

pub(crate) fn gue_second_cumulants(
    left: &[C64],
    right: &[C64],
    caps: &Caps,
) -> Result<SecondCumulants> {
    let zs: Vec<C64> = left.iter().chain(right).copied().collect();
    let mut engine = ScalarSecondOrder::component(Component::Gue, &EnsembleParams::GUE, *caps);
    let mut cache = BTreeMap::new();
    let zs2 = zs.clone();
    SecondCumulants::compute(
        left.len(),
        right.len(),
        caps,
        |seq| mcirc_cached(&mut cache, &zs, seq),
        |u1, u2| {
            let a: Vec<C64> = u1.iter().map(|&i| zs2[i]).collect();
            let b: Vec<C64> = u2.iter().map(|&i| zs2[i]).collect();
            engine.m2(&a, &b)
        },
    )
}
