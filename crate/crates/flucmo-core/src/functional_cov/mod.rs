//! Semicircle moments, the covariance kernel `u(x, y)` and the functional covariance of
//! monomial test functions.

mod quadrature;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::ComplexMatrix;
use crate::ncgeom::{
    anc_positions, cycles_of, kreweras_annular_positions, moebius_to_top, AnnulusShape,
    CyclicPermutation, MarkedPartitionPair,
};
use crate::second_order::SecondCumulants;
use crate::{Caps, Error, Result, C64};
use quadrature::{diagonal_singular_integral, gauss_legendre};

/// Exponents `(n_1, ..., n_k)` of monomial test functions `f_j(x) = x^{n_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MonomialSpec {
    pub exponents: Vec<u32>,
}

impl MonomialSpec {
    pub fn new(exponents: Vec<u32>) -> Self {
        MonomialSpec { exponents }
    }

    /// `f_j(x) = x` for `k` slots.
    pub fn linear(k: usize) -> Self {
        MonomialSpec {
            exponents: alloc::vec![1; k],
        }
    }

    /// Degree of the product `∏ f_j`.
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    fn select(&self, positions: &[usize]) -> MonomialSpec {
        MonomialSpec::new(positions.iter().map(|&p| self.exponents[p]).collect())
    }
}

/// Discretization of the two-variable integral over `[-2, 2]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Nodes per axis; split into panels of 16 Gauss–Legendre nodes.
    pub nodes: usize,
    /// Points with `|θ - φ|` at most this (in the angle variable) are dropped.
    pub offset: f64,
    /// Accepted relative gap between `nodes` and `2 nodes`.
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            nodes: 128,
            offset: 1e-12,
            tolerance: 1e-6,
        }
    }
}

const PER_PANEL: usize = 16;

impl QuadratureConfig {
    pub fn new(nodes: usize, offset: f64, tolerance: f64) -> Result<Self> {
        let cfg = QuadratureConfig { nodes, offset, tolerance };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < 64 {
            return Err(Error::InvalidParameter(alloc::format!("need at least 64 nodes, got {}", self.nodes)));
        }
        if self.offset.is_nan() || self.offset <= 0.0 || self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParameter("offset and tolerance must be positive".into()));
        }
        Ok(())
    }

    fn panels(&self) -> usize {
        self.nodes.div_ceil(PER_PANEL)
    }
}

fn catalan(n: u64) -> f64 {
    (0..n).fold(1.0, |c, i| c * 2.0 * (2 * i + 1) as f64 / (i + 2) as f64)
}

/// `sc[f_1, ..., f_k] = ∫ ∏ x^{n_j} ρ_sc(x) dx`: zero for odd degree, `C_{n/2}` otherwise.
pub fn sc_moment(exps: &MonomialSpec) -> f64 {
    let n = exps.degree() as u64;
    if n % 2 == 1 {
        0.0
    } else {
        catalan(n / 2)
    }
}

/// `∫ x^n ρ_sc(x) dx` by Gauss–Legendre in `x = 2 cos θ`.
pub fn sc_moment_quadrature(n: u32, nodes: usize) -> f64 {
    let (x, w) = gauss_legendre(nodes);
    x.iter()
        .zip(&w)
        .map(|(t, w)| {
            let th = PI * t;
            w * PI * (2.0 * th.cos()).powi(n as i32) * th.sin().powi(2)
        })
        .sum::<f64>()
        * 2.0
        / PI
}

/// `u(x, y) = (1/4π²) ln[(√(4-x²)+√(4-y²))²(xy+4-√(4-x²)√(4-y²)) / ((√(4-x²)-√(4-y²))²(xy+4+√(4-x²)√(4-y²)))]`.
pub fn kernel_u(x: f64, y: f64) -> Result<f64> {
    if x.abs() >= 2.0 || y.abs() >= 2.0 || x.is_nan() || y.is_nan() {
        return Err(Error::Domain(alloc::format!("u({x}, {y}) needs |x|, |y| < 2")));
    }
    if x == y {
        return Err(Error::Domain(alloc::format!("u is singular on the diagonal x = y = {x}")));
    }
    Ok(kernel_stable(x, y))
}

/// The same logarithm rewritten as `(1/2π²) ln[2(s_x+s_y)² / (|x-y|(xy+4+s_x s_y))]`, which
/// avoids the cancellation in `s_x - s_y`.
fn kernel_stable(x: f64, y: f64) -> f64 {
    let sx = (4.0 - x * x).sqrt();
    let sy = (4.0 - y * y).sqrt();
    let ratio = 2.0 * (sx + sy).powi(2) / ((x - y).abs() * (x * y + 4.0 + sx * sy));
    ratio.ln() / (2.0 * PI * PI)
}

fn double_integral<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(fp: &F, gp: &G, panels: usize, offset: f64) -> f64 {
    // x = 2cos θ, dx = -2 sin θ dθ; the two sign flips cancel
    diagonal_singular_integral(
        panels,
        PER_PANEL,
        offset,
        |t| fp(2.0 * t.cos()) * 2.0 * t.sin(),
        |s| gp(2.0 * s.cos()) * 2.0 * s.sin(),
        kernel_angular,
    )
}

/// `u(2cos θ, 2cos φ) = ln|sin((θ+φ)/2) / sin((θ-φ)/2)| / 2π²`.
fn kernel_angular(t: f64, s: f64) -> f64 {
    (((t + s) / 2.0).sin() / ((t - s) / 2.0).sin()).abs().ln() / (2.0 * PI * PI)
}

/// `∬ f′(x) g′(y) u(x, y) dx dy` for derivatives `f′`, `g′`, checked at two resolutions.
pub fn sc_second_with<F, G>(fp: F, gp: G, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    cfg.validate()?;
    let coarse = double_integral(&fp, &gp, cfg.panels(), cfg.offset);
    let fine = double_integral(&fp, &gp, 2 * cfg.panels(), cfg.offset);
    if (fine - coarse).abs() > cfg.tolerance * fine.abs().max(1.0) {
        return Err(Error::QuadratureNotConverged { coarse, fine });
    }
    Ok(fine)
}

/// `sc[f_1..f_k | g_1..g_l]` for monomials, i.e. `∬ (x^n)′ (y^m)′ u(x, y)`.
pub fn sc_second(left: &MonomialSpec, right: &MonomialSpec, cfg: &QuadratureConfig) -> Result<f64> {
    let (n, m) = (left.degree(), right.degree());
    if n == 0 || m == 0 {
        return Ok(0.0);
    }
    sc_second_with(
        |x| n as f64 * x.powi(n as i32 - 1),
        |y| m as f64 * y.powi(m as i32 - 1),
        cfg,
    )
}

/// `N²`-limit of the covariance of `⟨WA_1...WA_k⟩` and `⟨WA_{k+1}...WA_{k+l}⟩` for GUE:
/// the sum over annular pairings of Kreweras trace products.
pub fn poly_covariance(left: &[ComplexMatrix], right: &[ComplexMatrix], caps: &Caps) -> Result<C64> {
    let (k, l) = (left.len(), right.len());
    if k == 0 || l == 0 || (k + l) % 2 == 1 {
        return Ok(C64::new(0.0, 0.0));
    }
    let mats: Vec<&ComplexMatrix> = left.iter().chain(right).collect();
    let n = mats[0].dim();
    if let Some(bad) = mats.iter().find(|a| a.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
    }
    let shape = AnnulusShape::new(k, l);
    let gamma = shape.gamma();
    let mut total = C64::new(0.0, 0.0);
    for perm in anc_positions(shape, caps)? {
        let cycles = cycles_of(&perm);
        if cycles.iter().any(|c| c.len() != 2) {
            continue;
        }
        let mut prod = C64::new(1.0, 0.0);
        for c in cycles_of(&kreweras_annular_positions(&perm, &gamma)) {
            let mut acc = ComplexMatrix::identity(n);
            for &p in &c {
                acc = &acc * mats[p];
            }
            prod *= acc.normalized_trace();
        }
        total += prod;
    }
    Ok(total)
}

/// `sc∘[f_j : j ∈ block]` by Möbius inversion of the moments.
pub fn sc_free_cumulant(exps: &MonomialSpec) -> f64 {
    moebius_to_top(exps.exponents.len())
        .into_iter()
        .map(|(blocks, mu)| {
            mu as f64 * blocks.iter().map(|b| sc_moment(&exps.select(b))).product::<f64>()
        })
        .sum()
}

/// `sc∘∘[U₁|U₂]` for every pair of nonempty subsets of the two circles.
#[derive(Debug)]
pub struct ScSecondCumulants {
    k: usize,
    table: SecondCumulants,
}

impl ScSecondCumulants {
    pub fn compute(left: &MonomialSpec, right: &MonomialSpec, cfg: &QuadratureConfig, caps: &Caps) -> Result<Self> {
        let k = left.exponents.len();
        let all = MonomialSpec::new(left.exponents.iter().chain(&right.exponents).copied().collect());
        let mut firsts: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let table = SecondCumulants::compute(
            k,
            right.exponents.len(),
            caps,
            |seq| {
                let v = *firsts
                    .entry(seq.to_vec())
                    .or_insert_with(|| sc_free_cumulant(&all.select(seq)));
                Ok(C64::new(v, 0.0))
            },
            |u1, u2| Ok(C64::new(sc_second(&all.select(u1), &all.select(u2), cfg)?, 0.0)),
        )?;
        Ok(ScSecondCumulants { k, table })
    }

    /// `sc∘∘[U₁|U₂]` for label sets given as positions (`< k` outer, `≥ k` inner).
    pub fn get(&self, u1: &[usize], u2: &[usize]) -> f64 {
        debug_assert!(u1.iter().all(|&i| i < self.k) && u2.iter().all(|&i| i >= self.k));
        self.table.get(u1, u2).re
    }
}

/// `Φ_π = ∏_{B∈π} sc∘[B]` for an annular permutation (positions follow the ground order).
pub fn phi_gue(pi: &CyclicPermutation, monomials: &MonomialSpec) -> Result<f64> {
    if pi.ground().len() != monomials.exponents.len() {
        return Err(Error::LengthMismatch {
            expected: pi.ground().len(),
            got: monomials.exponents.len(),
        });
    }
    Ok(pi
        .position_cycles()
        .iter()
        .map(|c| sc_free_cumulant(&monomials.select(c)))
        .product())
}

/// `sc∘∘[U₁|U₂] ∏ sc∘[B]` over the unmarked blocks of a marked pair.
pub fn phi_gue_marked(
    pair: &MarkedPartitionPair,
    left: &MonomialSpec,
    right: &MonomialSpec,
    cfg: &QuadratureConfig,
    caps: &Caps,
) -> Result<f64> {
    let k = left.exponents.len();
    let (lb, rb) = (pair.left.position_blocks(), pair.right.position_blocks());
    let covered = |blocks: &[Vec<usize>]| blocks.iter().map(Vec::len).sum::<usize>();
    if covered(&lb) != k || covered(&rb) != right.exponents.len() {
        return Err(Error::LengthMismatch {
            expected: covered(&lb) + covered(&rb),
            got: k + right.exponents.len(),
        });
    }
    let table = ScSecondCumulants::compute(left, right, cfg, caps)?;
    let u2: Vec<usize> = rb[pair.marked_right].iter().map(|&p| p + k).collect();
    let mut v = table.get(&lb[pair.marked_left], &u2);
    for (i, b) in lb.iter().enumerate() {
        if i != pair.marked_left {
            v *= sc_free_cumulant(&left.select(b));
        }
    }
    for (i, b) in rb.iter().enumerate() {
        if i != pair.marked_right {
            v *= sc_free_cumulant(&right.select(b));
        }
    }
    Ok(v)
}
