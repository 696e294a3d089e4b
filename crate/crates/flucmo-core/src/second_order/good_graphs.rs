use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::ncgeom::{for_each_ncg, AnnulusShape, WeightedGraph};
use crate::semicircle::{q_weight, stieltjes_all, SpectralPoint};
use crate::{Caps, Error, Result, C64};

/// Sorted edge list (with repeats) mapped to its multiplicity in the multiset.
type Multiset = BTreeMap<Vec<(usize, usize)>, u64>;

struct Builder {
    k: usize,
    l: usize,
    ncg: BTreeMap<usize, Vec<Vec<(usize, usize)>>>,
    memo: BTreeMap<(usize, usize), (Multiset, Multiset)>,
}

fn edge(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn merge(a: &[(usize, usize)], b: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> = a.iter().chain(b).copied().collect();
    e.sort_unstable();
    e
}

fn add(set: &mut Multiset, edges: Vec<(usize, usize)>, count: u64) {
    *set.entry(edges).or_insert(0) += count;
}

impl Builder {
    fn ncg(&mut self, n: usize) -> &[Vec<(usize, usize)>] {
        self.ncg.entry(n).or_insert_with(|| {
            let mut all = Vec::new();
            for_each_ncg(n, false, |e| all.push(e.to_vec()));
            all
        })
    }

    /// Disk graphs on `labels` (positions in order), optionally forced to contain the
    /// chord between the first and last position, mapped to sorted label edges.
    fn disk(&mut self, labels: &[usize], with_outer_chord: bool) -> Vec<Vec<(usize, usize)>> {
        let n = labels.len();
        self.ncg(n)
            .iter()
            .filter(|g| !with_outer_chord || g.contains(&(0, n - 1)))
            .map(|g| {
                let mut e: Vec<(usize, usize)> =
                    g.iter().map(|&(i, j)| edge(labels[i], labels[j])).collect();
                e.sort_unstable();
                e
            })
            .collect()
    }

    /// Returns `(G_¬(1,k), G)` for the left labels `a+1..=b` against the full right side.
    fn good(&mut self, a: usize, b: usize) -> (Multiset, Multiset) {
        if a >= b {
            return (Multiset::new(), Multiset::new());
        }
        if let Some(v) = self.memo.get(&(a, b)) {
            return v.clone();
        }
        let kk = b - a;
        let left: Vec<usize> = (a + 1..=b).collect();
        let right: Vec<usize> = (self.k + 1..=self.k + self.l).collect();
        let mut neg = Multiset::new();

        // G1: vertex 1 isolated
        let (_, rest) = self.good(a + 1, b);
        for (e, c) in rest {
            add(&mut neg, e, c);
        }
        // G2: disk graph on [1, j] with edge (1, j) joined with G([j, k])
        for j in 2..=kk {
            let disks = self.disk(&left[..j], true);
            let (_, tail) = self.good(a + j - 1, b);
            for d in &disks {
                for (e, c) in &tail {
                    add(&mut neg, merge(d, e), *c);
                }
            }
        }
        // G3: G([1, j]) with edge (1, j) joined with a disk graph on [j, k]
        for j in 1..kk {
            let (head_neg, _) = self.good(a, a + j);
            let disks = self.disk(&left[j - 1..], false);
            for (e, c) in &head_neg {
                let with = merge(e, &[edge(left[0], left[j - 1])]);
                for d in &disks {
                    add(&mut neg, merge(&with, d), *c);
                }
            }
        }
        // G4: images of disk graphs on 1..k, k+j..k+l, k+1..k+j under label merging
        for j in 0..self.l {
            let seq: Vec<usize> = left
                .iter()
                .chain(&right[j..])
                .chain(&right[..=j])
                .copied()
                .collect();
            for d in self.disk(&seq, true) {
                add(&mut neg, d, 1);
            }
        }

        let mut full = neg.clone();
        let closing = edge(left[0], left[kk - 1]);
        for (e, c) in &neg {
            add(&mut full, merge(e, &[closing]), *c);
        }
        self.memo.insert((a, b), (neg.clone(), full.clone()));
        (neg, full)
    }
}

fn build(shape: AnnulusShape, caps: &Caps) -> Result<Multiset> {
    if shape.k == 0 || shape.l == 0 {
        return Ok(Multiset::new());
    }
    Caps::check("good graphs", shape.size(), caps.good_graphs)?;
    let mut b = Builder {
        k: shape.k,
        l: shape.l,
        ncg: BTreeMap::new(),
        memo: BTreeMap::new(),
    };
    Ok(b.good(0, shape.k).1)
}

/// The good-graph multiset `𝒢(k, l)` on vertices `1..=k+l`, as (graph, multiplicity).
pub fn good_graphs(shape: AnnulusShape, caps: &Caps) -> Result<Vec<(WeightedGraph, u64)>> {
    let vertices: Vec<usize> = (1..=shape.size()).collect();
    build(shape, caps)?
        .into_iter()
        .map(|(edges, c)| Ok((WeightedGraph::with_edges(vertices.clone(), &edges)?, c)))
        .collect()
}

/// `m_GUE[left|right] = (∏ m_s) Σ_{Γ∈𝒢(k,l)} ∏_{(i,j)∈E(Γ)} q_{i,j}`.
pub fn m2_graph_formula(left: &[C64], right: &[C64], caps: &Caps) -> Result<C64> {
    let zs: Vec<C64> = left.iter().chain(right).copied().collect();
    for &z in &zs {
        SpectralPoint::new(z)?;
    }
    let n = zs.len();
    if left.is_empty() || right.is_empty() {
        return Ok(C64::new(0.0, 0.0));
    }
    let set = build(AnnulusShape::new(left.len(), right.len()), caps)?;
    let mut q = alloc::vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            q[i * n + j] = q_weight(zs[i], zs[j])?;
        }
    }
    let mut total = C64::new(0.0, 0.0);
    for (edges, c) in &set {
        let w: C64 = edges.iter().map(|&(i, j)| q[(i - 1) * n + (j - 1)]).product();
        total += w * *c as f64;
    }
    let prod: C64 = stieltjes_all(&zs)?.iter().product();
    if !total.re.is_finite() {
        return Err(Error::Domain("non-finite graph sum".into()));
    }
    Ok(prod * total)
}
