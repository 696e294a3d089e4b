use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::linalg::ComplexMatrix;
use crate::ncgeom::{kreweras_positions, ncp_positions};
use crate::second_order::SourceWeights;
use crate::semicircle::{graph_moment, stieltjes_all};
use crate::{Caps, Result, C64};

/// A product of the input matrices, each possibly transposed; empty means `Id`.
pub(crate) type Word = Vec<(usize, bool)>;

/// One factor `G(z)^♯ W` of a chain, with `W` a word in the input matrices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Factor {
    pub z: usize,
    pub word: Word,
    pub sharp: bool,
}

impl Factor {
    pub fn plain(z: usize, a: usize) -> Self {
        Factor {
            z,
            word: alloc::vec![(a, false)],
            sharp: false,
        }
    }

    pub fn bare(z: usize) -> Self {
        Factor {
            z,
            word: Vec::new(),
            sharp: false,
        }
    }
}

pub(crate) fn transpose_word(w: &Word) -> Word {
    w.iter().rev().map(|&(i, t)| (i, !t)).collect()
}

/// Non-crossing partitions of `0..n` with their Kreweras complements in cycle order.
type PartitionTable = Vec<(Vec<Vec<usize>>, Vec<Vec<usize>>)>;

/// Memoizing evaluator shared by the recursion and the closed formulas.
#[derive(Debug)]
pub(crate) struct Engine {
    pub n: usize,
    pub zs: Vec<C64>,
    pub ms: Vec<C64>,
    pub mats: Vec<ComplexMatrix>,
    pub sigma: f64,
    pub caps: Caps,
    words: BTreeMap<Word, ComplexMatrix>,
    traces: BTreeMap<Word, C64>,
    cumulants: BTreeMap<(Vec<usize>, Vec<bool>), C64>,
    fm: BTreeMap<Vec<Factor>, C64>,
    mm: BTreeMap<Vec<Factor>, ComplexMatrix>,
    partitions: BTreeMap<usize, PartitionTable>,
    m2: BTreeMap<Vec<Factor>, C64>,
}

impl Engine {
    pub fn new(n: usize, zs: Vec<C64>, mats: Vec<ComplexMatrix>, sigma: f64, caps: Caps) -> Result<Self> {
        Ok(Engine {
            n,
            ms: stieltjes_all(&zs)?,
            zs,
            mats,
            sigma,
            caps,
            words: BTreeMap::new(),
            traces: BTreeMap::new(),
            cumulants: BTreeMap::new(),
            fm: BTreeMap::new(),
            mm: BTreeMap::new(),
            partitions: BTreeMap::new(),
            m2: BTreeMap::new(),
        })
    }

    pub fn word(&mut self, w: &Word) -> ComplexMatrix {
        if let Some(m) = self.words.get(w) {
            return m.clone();
        }
        let mut acc = ComplexMatrix::identity(self.n);
        for &(i, t) in w {
            let a = if t { self.mats[i].transpose() } else { self.mats[i].clone() };
            acc = &acc * &a;
        }
        self.words.insert(w.clone(), acc.clone());
        acc
    }

    /// `⟨W⟩` for a word `W`.
    pub fn trace(&mut self, w: &Word) -> C64 {
        if let Some(&t) = self.traces.get(w) {
            return t;
        }
        let t = self.word(w).normalized_trace();
        self.traces.insert(w.clone(), t);
        t
    }

    /// `m∘^{#,σ}` of spectral indices with colors, by connected bicolored graphs.
    pub fn cumulant(&mut self, zs: &[usize], sharp: &[bool]) -> Result<C64> {
        let key = (zs.to_vec(), sharp.to_vec());
        if let Some(&v) = self.cumulants.get(&key) {
            return Ok(v);
        }
        Caps::check("free cumulant", zs.len(), self.caps.graphs)?;
        let ms: Vec<C64> = zs.iter().map(|&i| self.ms[i]).collect();
        let v = graph_moment(&ms, Some(sharp), self.sigma, true)?;
        self.cumulants.insert(key, v);
        Ok(v)
    }

    fn partitions(&mut self, n: usize) -> &PartitionTable {
        self.partitions.entry(n).or_insert_with(|| {
            ncp_positions(n)
                .into_iter()
                .map(|p| {
                    let k = kreweras_positions(n, &p);
                    (p, k)
                })
                .collect()
        })
    }

    fn block_cumulant(&mut self, chain: &[Factor], block: &[usize]) -> Result<C64> {
        let zs: Vec<usize> = block.iter().map(|&p| chain[p].z).collect();
        let sh: Vec<bool> = block.iter().map(|&p| chain[p].sharp).collect();
        self.cumulant(&zs, &sh)
    }

    fn concat(chain: &[Factor], cycle: &[usize]) -> Word {
        cycle.iter().flat_map(|&p| chain[p].word.iter().copied()).collect()
    }

    /// `𝔪[chain] = Σ_π ∏_{B∈K(π)} ⟨∏_{j∈B} W_j⟩ ∏_{B∈π} m∘^{#,σ}[B]`.
    pub fn frak_m(&mut self, chain: &[Factor]) -> Result<C64> {
        if chain.is_empty() {
            return Ok(C64::new(0.0, 0.0));
        }
        if let Some(&v) = self.fm.get(chain) {
            return Ok(v);
        }
        Caps::check("chain length", chain.len(), self.caps.partitions)?;
        let table = self.partitions(chain.len()).clone();
        let mut total = C64::new(0.0, 0.0);
        for (pi, k) in &table {
            let mut prod = C64::new(1.0, 0.0);
            for b in pi {
                prod *= self.block_cumulant(chain, b)?;
            }
            if prod == C64::new(0.0, 0.0) {
                continue;
            }
            for c in k {
                let w = Self::concat(chain, c);
                prod *= self.trace(&w);
            }
            total += prod;
        }
        self.fm.insert(chain.to_vec(), total);
        Ok(total)
    }

    /// `M_S`: traces over Kreweras cycles avoiding the last index, times the product of
    /// the words on the cycle of the last index (last word excluded).
    pub fn det_m(&mut self, chain: &[Factor]) -> Result<ComplexMatrix> {
        if let Some(m) = self.mm.get(chain) {
            return Ok(m.clone());
        }
        Caps::check("chain length", chain.len(), self.caps.partitions)?;
        let last = chain.len() - 1;
        let table = self.partitions(chain.len()).clone();
        let mut acc = ComplexMatrix::zeros(self.n);
        for (pi, k) in &table {
            let mut coeff = C64::new(1.0, 0.0);
            for b in pi {
                coeff *= self.block_cumulant(chain, b)?;
            }
            if coeff == C64::new(0.0, 0.0) {
                continue;
            }
            let mut open: Word = Vec::new();
            for c in k {
                if let Some(at) = c.iter().position(|&p| p == last) {
                    // the factors following `last` in cycle order
                    let rest: Vec<usize> = c[at + 1..].iter().chain(&c[..at]).copied().collect();
                    open = Self::concat(chain, &rest);
                } else {
                    let w = Self::concat(chain, c);
                    coeff *= self.trace(&w);
                }
            }
            let m = self.word(&open).scale(coeff);
            acc = &acc + &m;
        }
        self.mm.insert(chain.to_vec(), acc.clone());
        Ok(acc)
    }

    fn q(&self, i: usize, j: usize) -> C64 {
        let x = self.ms[i] * self.ms[j];
        x / (1.0 - x)
    }

    /// `𝔪[left | right]` by the linear recursion in the left argument.
    pub fn frak_m2(&mut self, left: &[Factor], right: &[Factor], w: &SourceWeights) -> Result<C64> {
        let k = left.len();
        let l = right.len();
        if k == 0 || l == 0 {
            return Ok(C64::new(0.0, 0.0));
        }
        if let Some(&v) = self.m2.get(left) {
            return Ok(v);
        }
        let t1 = &left[0];
        let tk = &left[k - 1];
        let m1 = self.ms[t1.z];
        let q1k = self.q(t1.z, tk.z);
        let tr_ak = self.trace(&tk.word);
        let cat = |a: &[Factor], b: &[Factor]| -> Vec<Factor> { a.iter().chain(b).cloned().collect() };

        let mut sum = C64::new(0.0, 0.0);
        if k >= 2 {
            let mid = &left[1..k - 1];
            let mut merged_word = tk.word.clone();
            merged_word.extend(t1.word.iter().copied());
            let merged = Factor {
                z: tk.z,
                word: merged_word,
                sharp: false,
            };
            let swapped = Factor {
                z: tk.z,
                word: t1.word.clone(),
                sharp: false,
            };
            sum += self.frak_m2(&cat(mid, &[merged]), right, w)?;
            sum += q1k * self.frak_m2(&cat(mid, &[swapped]), right, w)? * tr_ak;
        }
        let gk = Factor::bare(tk.z);
        for j in 1..k {
            let a = self.frak_m2(&cat(&left[..j - 1], &[Factor::bare(left[j - 1].z)]), right, w)?;
            let b = self.frak_m(&left[j - 1..])?
                + q1k * self.frak_m(&cat(&left[j - 1..k - 1], core::slice::from_ref(&gk)))? * tr_ak;
            sum += a * b;
        }
        for j in 2..=k {
            let a = self.frak_m(&cat(&left[..j - 1], &[Factor::bare(left[j - 1].z)]))?;
            let b = self.frak_m2(&left[j - 1..], right, w)?
                + q1k * self.frak_m2(&cat(&left[j - 1..k - 1], core::slice::from_ref(&gk)), right, w)? * tr_ak;
            sum += a * b;
        }

        // the left chain with its last matrix removed, for the q_{1,k}⟨A_k⟩ companions
        let left_c = cat(&left[..k - 1], core::slice::from_ref(&gk));
        let rotations: Vec<Vec<Factor>> = (0..l)
            .map(|j| {
                let mut r: Vec<Factor> = right[j..].iter().chain(&right[..j]).cloned().collect();
                r.push(Factor::bare(right[j].z));
                r
            })
            .collect();
        if w.gue != 0.0 {
            let mut s = C64::new(0.0, 0.0);
            for rot in &rotations {
                s += self.frak_m(&cat(left, rot))?;
                s += q1k * self.frak_m(&cat(&left_c, rot))? * tr_ak;
            }
            sum += w.gue * s;
        }
        if w.sigma != 0.0 {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..l {
                let tail = sigma_tail(right, j);
                s += self.frak_m(&cat(left, &tail))?;
                s += q1k * self.frak_m(&cat(&left_c, &tail))? * tr_ak;
            }
            sum += w.sigma * s;
        }
        if w.omega != 0.0 {
            let ml = self.det_m(left)?;
            let ak = self.word(&tk.word);
            let mla = &ml * &ak;
            let mut s = C64::new(0.0, 0.0);
            for rot in &rotations {
                let mr = self.det_m(rot)?;
                s += mla.hadamard_trace(&mr) + q1k * ml.hadamard_trace(&mr) * tr_ak;
            }
            sum += w.omega * s;
        }
        if w.kappa != 0.0 {
            sum += w.kappa * self.kappa_source(left, right, q1k, tr_ak)?;
        }

        let v = m1 * sum;
        self.m2.insert(left.to_vec(), v);
        Ok(v)
    }

    fn kappa_source(&mut self, left: &[Factor], right: &[Factor], q1k: C64, tr_ak: C64) -> Result<C64> {
        let k = left.len();
        let l = right.len();
        let ak = self.word(&left[k - 1].word);
        let wrap = |from: usize, to: usize| -> Vec<Factor> {
            // indices from..=l, 1..=to (1-based)
            right[from - 1..].iter().chain(&right[..to]).cloned().collect()
        };
        let mut main = C64::new(0.0, 0.0);
        let mut companion = C64::new(0.0, 0.0);
        for r in 1..=k {
            let mr = self.det_m(&left[..r])?;
            let mrk = self.det_m(&left[r - 1..])?;
            let mrka = &mrk * &ak;
            for s in 1..=l {
                for t in 1..=s {
                    let h1 = mr.hadamard_trace(&self.det_m(&wrap(s, t))?);
                    let inner = self.det_m(&right[t - 1..s])?;
                    main += h1 * mrka.hadamard_trace(&inner);
                    companion += h1 * mrk.hadamard_trace(&inner);
                }
                for t in s..=l {
                    let h1 = mr.hadamard_trace(&self.det_m(&right[s - 1..t])?);
                    let outer = self.det_m(&wrap(t, s))?;
                    main += h1 * mrka.hadamard_trace(&outer);
                    companion += h1 * mrk.hadamard_trace(&outer);
                }
            }
        }
        Ok(main + q1k * companion * tr_ak)
    }
}

/// `G^t_{k+j} A^t_{k+j-1}, G^t_{k+j-1} A^t_{k+j-2}, ..., G^t_{k+j+1} A^t_{k+j}, G^t_{k+j}`:
/// the transpose of the rotated right chain closed by `G_{k+j}`.
pub(crate) fn sigma_tail(right: &[Factor], j: usize) -> Vec<Factor> {
    let l = right.len();
    let mut tail: Vec<Factor> = (0..l)
        .map(|i| Factor {
            z: right[(j + l - i) % l].z,
            word: transpose_word(&right[(j + 2 * l - i - 1) % l].word),
            sharp: true,
        })
        .collect();
    tail.push(Factor {
        z: right[j].z,
        word: Vec::new(),
        sharp: true,
    });
    tail
}
