use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::{Caps, Error, Result, C64};

/// An undirected graph on labeled vertices whose edges form a multiset.
///
/// Loops `(v, v)` and repeated edges are allowed; disk non-crossing graphs never contain
/// them, good graphs on the annulus may.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightedGraph {
    vertices: Vec<usize>,
    edges: BTreeMap<(usize, usize), u32>,
    coloring: Option<Vec<bool>>,
}

impl WeightedGraph {
    pub fn new(vertices: Vec<usize>) -> Self {
        WeightedGraph {
            vertices,
            edges: BTreeMap::new(),
            coloring: None,
        }
    }

    /// Builds a graph from an edge list, checking endpoints.
    pub fn with_edges(vertices: Vec<usize>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(vertices);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if !self.vertices.contains(&a) || !self.vertices.contains(&b) {
            return Err(Error::InvalidLabels(alloc::format!("edge ({a},{b}) leaves the vertex set")));
        }
        *self.edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        Ok(())
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Sorted edges with multiplicities.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        self.edges.iter().map(|(&e, &m)| (e, m))
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edges.values().map(|&m| m as usize).sum()
    }

    pub fn multiplicity(&self, a: usize, b: usize) -> u32 {
        self.edges.get(&(a.min(b), a.max(b))).copied().unwrap_or(0)
    }

    pub fn coloring(&self) -> Option<&[bool]> {
        self.coloring.as_deref()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let idx = |l: usize| self.vertices.iter().position(|&v| v == l).unwrap();
        let mut uf = UnionFind::new(n);
        for &(a, b) in self.edges.keys() {
            uf.union(idx(a), idx(b));
        }
        uf.components() <= 1
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    pub(crate) fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

fn chords(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

fn crosses((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n <= 1 {
        return true;
    }
    let mut uf = UnionFind::new(n);
    for &(a, b) in edges {
        uf.union(a, b);
    }
    uf.components() == 1
}

/// Visits every non-crossing simple graph on positions `0..n` (edge lists in chord order).
pub fn for_each_ncg<F: FnMut(&[(usize, usize)])>(n: usize, connected_only: bool, mut f: F) {
    let all = chords(n);
    let mut current = Vec::new();
    fn rec<F: FnMut(&[(usize, usize)])>(
        idx: usize,
        all: &[(usize, usize)],
        current: &mut Vec<(usize, usize)>,
        n: usize,
        connected_only: bool,
        f: &mut F,
    ) {
        if idx == all.len() {
            if !connected_only || connected(n, current) {
                f(current);
            }
            return;
        }
        rec(idx + 1, all, current, n, connected_only, f);
        let c = all[idx];
        if current.iter().all(|&d| !crosses(c, d)) {
            current.push(c);
            rec(idx + 1, all, current, n, connected_only, f);
            current.pop();
        }
    }
    rec(0, &all, &mut current, n, connected_only, &mut f);
}

/// `Σ_Γ ∏_{(i,j)∈E(Γ)} w(i,j)` over non-crossing graphs on `0..n`, with a running product.
pub fn ncg_weight_sum<W: Fn(usize, usize) -> C64>(n: usize, connected_only: bool, weight: W) -> C64 {
    let all = chords(n);
    let w: Vec<C64> = all.iter().map(|&(i, j)| weight(i, j)).collect();
    let mut current = Vec::new();
    let mut total = C64::new(0.0, 0.0);
    #[allow(clippy::too_many_arguments)]
    fn rec(
        idx: usize,
        all: &[(usize, usize)],
        w: &[C64],
        current: &mut Vec<(usize, usize)>,
        prod: C64,
        n: usize,
        connected_only: bool,
        total: &mut C64,
    ) {
        if idx == all.len() {
            if !connected_only || connected(n, current) {
                *total += prod;
            }
            return;
        }
        rec(idx + 1, all, w, current, prod, n, connected_only, total);
        let c = all[idx];
        if current.iter().all(|&d| !crosses(c, d)) {
            current.push(c);
            rec(idx + 1, all, w, current, prod * w[idx], n, connected_only, total);
            current.pop();
        }
    }
    rec(0, &all, &w, &mut current, C64::new(1.0, 0.0), n, connected_only, &mut total);
    total
}

/// Enumerates the disk non-crossing graphs on `ground`, optionally connected only and
/// optionally carrying a two-coloring of the vertices.
pub fn enumerate_ncg(
    ground: &[usize],
    connected_only: bool,
    coloring: Option<&[bool]>,
    caps: &Caps,
) -> Result<Vec<WeightedGraph>> {
    Caps::check("non-crossing graphs", ground.len(), caps.graphs)?;
    if let Some(c) = coloring {
        if c.len() != ground.len() {
            return Err(Error::LengthMismatch {
                expected: ground.len(),
                got: c.len(),
            });
        }
    }
    let mut out = Vec::new();
    for_each_ncg(ground.len(), connected_only, |edges| {
        let mut g = WeightedGraph::new(ground.to_vec());
        for &(i, j) in edges {
            *g.edges.entry((ground[i].min(ground[j]), ground[i].max(ground[j]))).or_insert(0) += 1;
        }
        g.coloring = coloring.map(|c| c.to_vec());
        out.push(g);
    });
    Ok(out)
}
