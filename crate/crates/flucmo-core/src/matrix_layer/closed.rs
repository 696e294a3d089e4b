use alloc::vec::Vec;

use super::engine::{transpose_word, Engine, Factor, Word};
use super::{load, no_transposes, nonempty, ChainSpec};
use crate::ncgeom::{anc_positions, cycles_of, kreweras_annular_positions, kreweras_positions, ncp_positions, AnnulusShape};
use crate::second_order::{gue_second_cumulants, Component, EnsembleParams, ScalarSecondOrder, SecondCumulants};
use crate::semicircle::stieltjes;
use crate::{Caps, Error, Result, C64};

/// `(m_σ)∘∘` over the labels of `chain`, whose first `k` factors form the outer circle.
fn sigma_table(e: &mut Engine, chain: &[Factor], k: usize, sigma: f64, reorder: bool, caps: &Caps) -> Result<SecondCumulants> {
    let zs: Vec<C64> = chain.iter().map(|f| e.zs[f.z]).collect();
    let zidx: Vec<usize> = chain.iter().map(|f| f.z).collect();
    let params = EnsembleParams::new(0.0, sigma, 0.0)?;
    let mut scalar = ScalarSecondOrder::component(Component::Sigma, &params, *caps);
    SecondCumulants::compute(
        k,
        chain.len() - k,
        caps,
        |seq| {
            let seq = if reorder { sigma_order(seq, k) } else { seq.to_vec() };
            let sharp: Vec<bool> = seq.iter().map(|&i| i >= k).collect();
            let idx: Vec<usize> = seq.iter().map(|&i| zidx[i]).collect();
            e.cumulant(&idx, &sharp)
        },
        |u1, u2| {
            let a: Vec<C64> = u1.iter().map(|&i| zs[i]).collect();
            let b: Vec<C64> = u2.iter().map(|&i| zs[i]).collect();
            Ok(scalar.m2(&a, &b)? * sigma)
        },
    )
}

/// Rotates a cycle meeting both circles to start its outer run; returns it with the split.
fn outer_first(cycle: &[usize], k: usize) -> Option<(Vec<usize>, usize)> {
    let n = cycle.len();
    let start = (0..n).find(|&i| cycle[i] < k && cycle[(i + n - 1) % n] >= k)?;
    let rotated: Vec<usize> = cycle[start..].iter().chain(&cycle[..start]).copied().collect();
    let split = rotated.iter().position(|&p| p >= k).unwrap_or(n);
    Some((rotated, split))
}

/// `(i_1..i_r)∘(j_1..j_s) ↦ (i_1..i_r)∘(j_s..j_1)` for a cycle meeting both circles.
fn sigma_order(cycle: &[usize], k: usize) -> Vec<usize> {
    match outer_first(cycle, k) {
        Some((mut rotated, split)) => {
            rotated[split..].reverse();
            rotated
        }
        None => cycle.to_vec(),
    }
}

/// Word of a Kreweras cycle; with `transpose_inner`, a cycle meeting both circles is read
/// as its outer run followed by the transpose of its inner run.
fn cycle_word(chain: &[Factor], cycle: &[usize], k: usize, transpose_inner: bool) -> Word {
    let split = if transpose_inner { outer_first(cycle, k) } else { None };
    let Some((rotated, split)) = split else {
        return cycle.iter().flat_map(|&p| chain[p].word.iter().copied()).collect();
    };
    let mut w: Word = rotated[..split].iter().flat_map(|&p| chain[p].word.iter().copied()).collect();
    let inner: Word = rotated[split..].iter().flat_map(|&p| chain[p].word.iter().copied()).collect();
    w.extend(transpose_word(&inner));
    w
}

/// Annular plus marked-pair expansion of the chain `outer ++ inner` (`k` outer factors);
/// cumulant colors are read off the factors.
fn expand(
    e: &mut Engine,
    chain: &[Factor],
    k: usize,
    table: &SecondCumulants,
    reorder: bool,
    transpose_inner: bool,
    caps: &Caps,
) -> Result<C64> {
    let l = chain.len() - k;
    let shape = AnnulusShape::new(k, l);
    let gamma = shape.gamma();
    let mut total = C64::new(0.0, 0.0);
    for perm in anc_positions(shape, caps)? {
        let mut prod = C64::new(1.0, 0.0);
        for c in cycles_of(&perm) {
            let c = if reorder { sigma_order(&c, k) } else { c };
            prod *= block_cumulant(e, chain, &c)?;
        }
        for c in cycles_of(&kreweras_annular_positions(&perm, &gamma)) {
            prod *= e.trace(&cycle_word(chain, &c, k, transpose_inner));
        }
        total += prod;
    }

    let outer = ncp_positions(k);
    let inner: Vec<Vec<Vec<usize>>> = ncp_positions(l)
        .into_iter()
        .map(|p| p.into_iter().map(|b| b.into_iter().map(|i| i + k).collect()).collect())
        .collect();
    for p1 in &outer {
        for p2 in &inner {
            let local: Vec<Vec<usize>> = p2.iter().map(|b| b.iter().map(|i| i - k).collect()).collect();
            let mut traces = C64::new(1.0, 0.0);
            for c in kreweras_positions(k, p1) {
                traces *= e.trace(&cycle_word(chain, &c, k, false));
            }
            for c in kreweras_positions(l, &local) {
                let c: Vec<usize> = c.into_iter().map(|i| i + k).collect();
                traces *= e.trace(&cycle_word(chain, &c, k, false));
            }
            let mut firsts = Vec::new();
            for b in p1.iter().chain(p2) {
                firsts.push(block_cumulant(e, chain, b)?);
            }
            for (i1, u1) in p1.iter().enumerate() {
                for (i2, u2) in p2.iter().enumerate() {
                    let mut prod = table.get(u1, u2) * traces;
                    for (j, f) in firsts.iter().enumerate() {
                        if j != i1 && j != p1.len() + i2 {
                            prod *= f;
                        }
                    }
                    total += prod;
                }
            }
        }
    }
    Ok(total)
}

fn block_cumulant(e: &mut Engine, chain: &[Factor], block: &[usize]) -> Result<C64> {
    let zs: Vec<usize> = block.iter().map(|&p| chain[p].z).collect();
    let sharp: Vec<bool> = block.iter().map(|&p| chain[p].sharp).collect();
    e.cumulant(&zs, &sharp)
}

fn prepare(left: &ChainSpec, right: &ChainSpec, sigma: f64, caps: &Caps) -> Result<(Engine, Vec<Factor>, Vec<Factor>)> {
    for c in [left, right] {
        nonempty(c)?;
        no_transposes(c)?;
    }
    Caps::check("frak_m2 chain length", left.len() + right.len(), caps.frak_m2)?;
    let (e, mut fs) = load(&[left, right], sigma, caps)?;
    let r = fs.pop().unwrap_or_default();
    let l = fs.pop().unwrap_or_default();
    Ok((e, l, r))
}

/// Closed annular and marked-pair expansion of the GUE part of `𝔪[left | right]`.
pub fn closed_frak_m2_gue(left: &ChainSpec, right: &ChainSpec, caps: &Caps) -> Result<C64> {
    let (mut e, l, r) = prepare(left, right, 0.0, caps)?;
    let table = gue_second_cumulants(&left.spectral_parameters(), &right.spectral_parameters(), caps)?;
    let chain: Vec<Factor> = l.iter().chain(&r).cloned().collect();
    expand(&mut e, &chain, l.len(), &table, false, false, caps)
}

/// Closed expansion of the `σ` contribution to `𝔪[left | right]` (the component times `σ`).
///
/// The inner circle is read in reversed orientation: the annular expansion runs on the
/// transposed chain `G^t_{k+1}A^t_{k+l}, G^t_{k+l}A^t_{k+l-1}, ..., G^t_{k+2}A^t_{k+1}`, so
/// connecting cycles carry `m∘^{#,σ}` on `(i_1..i_r)∘(j_s..j_1)` and each Kreweras cycle
/// pairs the outer product with the transpose of the inner one.
pub fn closed_frak_m2_sigma(left: &ChainSpec, right: &ChainSpec, sigma: f64, caps: &Caps) -> Result<C64> {
    let (mut e, l, r) = prepare(left, right, sigma, caps)?;
    let n = r.len();
    let flipped: Vec<Factor> = (0..n)
        .map(|p| Factor {
            z: r[(n - p) % n].z,
            word: transpose_word(&r[(2 * n - p - 1) % n].word),
            sharp: true,
        })
        .collect();
    let chain: Vec<Factor> = l.iter().cloned().chain(flipped).collect();
    let table = sigma_table(&mut e, &chain, l.len(), sigma, false, caps)?;
    expand(&mut e, &chain, l.len(), &table, false, false, caps)
}

/// Literal reading of the closed `σ` expansion: Kreweras complements on the standard
/// annulus with transposed inner runs, and `m∘^{#,σ}` on connecting cycles with reversed
/// inner runs. Agrees with the recursion only when `k = 1` or `l = 1`.
pub fn closed_frak_m2_sigma_literal(left: &ChainSpec, right: &ChainSpec, sigma: f64, caps: &Caps) -> Result<C64> {
    let (mut e, l, r) = prepare(left, right, sigma, caps)?;
    let chain: Vec<Factor> = l
        .iter()
        .cloned()
        .chain(r.iter().map(|f| Factor { sharp: true, ..f.clone() }))
        .collect();
    let table = sigma_table(&mut e, &chain, l.len(), sigma, true, caps)?;
    expand(&mut e, &chain, l.len(), &table, true, true, caps)
}

fn single_pair(left: &ChainSpec, right: &ChainSpec) -> Result<(C64, C64, [C64; 4])> {
    if left.len() != 1 || right.len() != 1 {
        return Err(Error::InvalidParameter("expected chains of length one".into()));
    }
    no_transposes(left)?;
    no_transposes(right)?;
    let (f1, f2) = (&left.factors()[0], &right.factors()[0]);
    if f1.a.dim() != f2.a.dim() {
        return Err(Error::DimensionMismatch {
            expected: f1.a.dim(),
            got: f2.a.dim(),
        });
    }
    let (m1, m2) = (stieltjes(f1.z)?, stieltjes(f2.z)?);
    let n = f1.a.dim() as f64;
    let diag: C64 = f1.a.diagonal().iter().zip(f2.a.diagonal()).map(|(x, y)| x * y).sum::<C64>() / n;
    let traces = [
        f1.a.trace_of_product(&f2.a),
        f1.a.trace_of_product(&f2.a.transpose()),
        diag,
        f1.a.normalized_trace() * f2.a.normalized_trace(),
    ];
    Ok((m1, m2, traces))
}

/// The `k = l = 1` formulas for a single component: with `⟨A₁A₂⟩`, `⟨A₁A₂ᵗ⟩`, `⟨𝐚₁𝐚₂⟩` and
/// `⟨A₁⟩⟨A₂⟩` these are explicit in `m₁, m₂` (and `σ` for the `σ` component).
pub fn frak_m2_k1l1(left: &ChainSpec, right: &ChainSpec, which: Component, params: &EnsembleParams) -> Result<C64> {
    let (m1, m2, [ab, abt, diag, tt]) = single_pair(left, right)?;
    let dm1 = m1 * m1 / (1.0 - m1 * m1);
    let dm2 = m2 * m2 / (1.0 - m2 * m2);
    let cubes = m1 * m1 * m1 * m2 * m2 * m2;
    let squares = m1 * m1 * m2 * m2;
    Ok(match which {
        Component::Gue => {
            let cum1 = squares / (1.0 - m1 * m2);
            let caps = Caps::default();
            let z = [left.factors()[0].z, right.factors()[0].z];
            let cum2 = crate::second_order::second_cumulant(&z[..1], &z[1..], &caps)?;
            ab * cum1 + tt * cum2
        }
        Component::Kappa => kappa_k1l1(m1, m2, dm1, dm2, cubes, diag, tt),
        Component::Sigma => {
            let d = 1.0 - params.sigma() * m1 * m2;
            abt * squares / d + tt * (dm1 * dm2 / (d * d) - squares / d)
        }
        Component::Omega => diag * squares + tt * (dm1 * dm2 - squares),
    })
}

fn kappa_k1l1(m1: C64, m2: C64, dm1: C64, dm2: C64, cubes: C64, diag: C64, tt: C64) -> C64 {
    diag * cubes + tt * (2.0 * m1 * dm1 * m2 * dm2 - cubes)
}

/// `⟨𝐚₁𝐚₂⟩m₁²m₂² + ⟨A₁⟩⟨A₂⟩(m₁′m₂′ − m₁²m₂²)`.
pub fn frak_m2_k1l1_omega(left: &ChainSpec, right: &ChainSpec) -> Result<C64> {
    frak_m2_k1l1(left, right, Component::Omega, &EnsembleParams::GUE)
}
