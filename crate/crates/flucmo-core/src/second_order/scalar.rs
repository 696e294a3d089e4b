use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{Component, EnsembleParams, SourceWeights};
use crate::semicircle::{graph_moment, stieltjes, stieltjes_all, SpectralPoint};
use crate::{Caps, Result, C64};

pub(crate) type ZKey = Vec<(u64, u64)>;

pub(crate) fn zkey(zs: &[C64]) -> ZKey {
    zs.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
}

/// Memoizing evaluator of the scalar recursion for `m[·|·]`.
///
/// Caches are keyed on the exact bit patterns of the spectral parameters, so repeated
/// evaluations on overlapping arguments share work.
#[derive(Debug, Clone)]
pub struct ScalarSecondOrder {
    w: SourceWeights,
    caps: Caps,
    dd: BTreeMap<ZKey, C64>,
    sharp: BTreeMap<(ZKey, Vec<bool>), C64>,
    memo: BTreeMap<(ZKey, ZKey), C64>,
}

impl ScalarSecondOrder {
    pub(crate) fn new(w: SourceWeights, caps: Caps) -> Self {
        ScalarSecondOrder {
            w,
            caps,
            dd: BTreeMap::new(),
            sharp: BTreeMap::new(),
            memo: BTreeMap::new(),
        }
    }

    /// Evaluator for the full `m[·|·]`.
    pub fn full(params: &EnsembleParams, caps: Caps) -> Self {
        Self::new(SourceWeights::full(params), caps)
    }

    /// Evaluator for one component of the decomposition.
    pub fn component(which: Component, params: &EnsembleParams, caps: Caps) -> Self {
        Self::new(SourceWeights::component(which, params), caps)
    }

    /// `m[left | right]`; zero when either side is empty.
    pub fn m2(&mut self, left: &[C64], right: &[C64]) -> Result<C64> {
        for &z in left.iter().chain(right) {
            SpectralPoint::new(z)?;
        }
        Caps::check("second-order recursion", left.len() + right.len(), self.caps.m2)?;
        self.rec(left, right)
    }

    /// Cached divided difference (order independent, so keyed on the sorted multiset).
    pub fn divided_difference(&mut self, zs: &[C64]) -> Result<C64> {
        let mut key = zkey(zs);
        key.sort_unstable();
        if let Some(&v) = self.dd.get(&key) {
            return Ok(v);
        }
        Caps::check("divided difference", zs.len(), self.caps.graphs)?;
        let v = graph_moment(&stieltjes_all(zs)?, None, 0.0, false)?;
        self.dd.insert(key, v);
        Ok(v)
    }

    fn m_sharp(&mut self, zs: &[C64], sharp: Vec<bool>) -> Result<C64> {
        let key = (zkey(zs), sharp);
        if let Some(&v) = self.sharp.get(&key) {
            return Ok(v);
        }
        Caps::check("m sharp", zs.len(), self.caps.graphs)?;
        let v = graph_moment(&stieltjes_all(zs)?, Some(&key.1), self.w.inner_sigma, false)?;
        self.sharp.insert(key, v);
        Ok(v)
    }

    fn rec(&mut self, left: &[C64], right: &[C64]) -> Result<C64> {
        let k = left.len();
        let l = right.len();
        if k == 0 || l == 0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let key = (zkey(left), zkey(right));
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let m1 = stieltjes(left[0])?;
        let mk = stieltjes(left[k - 1])?;

        let mut sum = self.rec(&left[1..], right)?;
        for j in 1..k {
            sum += self.rec(&left[..j], right)? * self.divided_difference(&left[j - 1..])?;
        }
        for j in 2..=k {
            sum += self.divided_difference(&left[..j])? * self.rec(&left[j - 1..], right)?;
        }

        // R_j..R_l, R_1..R_j for j = 1..l
        let rotations: Vec<Vec<C64>> = (0..l)
            .map(|j| right[j..].iter().chain(&right[..=j]).copied().collect())
            .collect();
        let w = self.w;
        if w.gue != 0.0 {
            let mut s = C64::new(0.0, 0.0);
            for rot in &rotations {
                let seq: Vec<C64> = left.iter().chain(rot).copied().collect();
                s += self.divided_difference(&seq)?;
            }
            sum += w.gue * s;
        }
        if w.sigma != 0.0 {
            let mut s = C64::new(0.0, 0.0);
            for rot in &rotations {
                let seq: Vec<C64> = left.iter().chain(rot).copied().collect();
                let sharp = (0..seq.len()).map(|i| i >= k).collect();
                s += self.m_sharp(&seq, sharp)?;
            }
            sum += w.sigma * s;
        }
        if w.omega != 0.0 {
            let mut s = C64::new(0.0, 0.0);
            for rot in &rotations {
                s += self.divided_difference(rot)?;
            }
            sum += w.omega * self.divided_difference(left)? * s;
        }
        if w.kappa != 0.0 {
            let mut outer = C64::new(0.0, 0.0);
            for r in 1..=k {
                outer += self.divided_difference(&left[..r])? * self.divided_difference(&left[r - 1..])?;
            }
            let mut inner = C64::new(0.0, 0.0);
            for s in 1..=l {
                for t in s..=l {
                    let wrap: Vec<C64> = right[t - 1..].iter().chain(&right[..s]).copied().collect();
                    inner += self.divided_difference(&right[s - 1..t])? * self.divided_difference(&wrap)?;
                }
            }
            sum += w.kappa * outer * inner;
        }

        let v = m1 / (1.0 - m1 * mk) * sum;
        self.memo.insert(key, v);
        Ok(v)
    }
}
