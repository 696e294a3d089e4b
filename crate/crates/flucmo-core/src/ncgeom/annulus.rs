use alloc::vec::Vec;

use super::partition::{kreweras_positions, ncp_positions};
use super::{cycle_count, cycles_of, invert, SetPartition};
use crate::{Caps, Error, Result};

/// The `(k, l)`-annulus: outer labels `1..=k`, inner labels `k+1..=k+l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AnnulusShape {
    pub k: usize,
    pub l: usize,
}

impl AnnulusShape {
    pub fn new(k: usize, l: usize) -> Self {
        AnnulusShape { k, l }
    }

    pub fn size(&self) -> usize {
        self.k + self.l
    }

    /// `γ = (1..k)(k+1..k+l)` as an image array over positions `0..k+l`.
    pub(crate) fn gamma(&self) -> Vec<usize> {
        let (k, l) = (self.k, self.l);
        (0..k)
            .map(|i| (i + 1) % k)
            .chain((0..l).map(|i| k + (i + 1) % l))
            .collect()
    }

    fn require_both(&self) -> Result<()> {
        if self.k == 0 || self.l == 0 {
            return Err(Error::InvalidParameter("annulus needs k >= 1 and l >= 1".into()));
        }
        Ok(())
    }
}

/// A permutation written in cycle notation over a labeled ground set.
///
/// Every cycle starts at its minimal label and cycles are sorted by that label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicPermutation {
    ground: Vec<usize>,
    cycles: Vec<Vec<usize>>,
}

impl CyclicPermutation {
    /// Builds a permutation from label cycles; fixed points may be omitted.
    pub fn new(ground: Vec<usize>, cycles: Vec<Vec<usize>>) -> Result<Self> {
        let n = ground.len();
        let index = |l: usize| {
            ground
                .iter()
                .position(|&g| g == l)
                .ok_or_else(|| Error::InvalidLabels(alloc::format!("label {l} not in ground set")))
        };
        let mut perm: Vec<usize> = (0..n).collect();
        let mut seen = alloc::vec![false; n];
        for c in &cycles {
            for (i, &l) in c.iter().enumerate() {
                let p = index(l)?;
                if seen[p] {
                    return Err(Error::InvalidLabels(alloc::format!("label {l} repeated")));
                }
                seen[p] = true;
                perm[p] = index(c[(i + 1) % c.len()])?;
            }
        }
        Ok(Self::from_positions(ground, &perm))
    }

    /// Builds from an image array over positions of `ground`.
    pub fn from_positions(ground: Vec<usize>, perm: &[usize]) -> Self {
        let mut cycles: Vec<Vec<usize>> = cycles_of(perm)
            .into_iter()
            .map(|c| {
                let labels: Vec<usize> = c.iter().map(|&p| ground[p]).collect();
                let min = (0..labels.len()).min_by_key(|&i| labels[i]).unwrap_or(0);
                labels[min..].iter().chain(&labels[..min]).copied().collect()
            })
            .collect();
        cycles.sort_unstable();
        CyclicPermutation { ground, cycles }
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// Number of cycles `|π|`.
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Image array over positions.
    pub fn positions(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.ground.len()).collect();
        let pos = |l: usize| self.ground.iter().position(|&g| g == l).expect("label in ground");
        for c in &self.cycles {
            for (i, &l) in c.iter().enumerate() {
                perm[pos(l)] = pos(c[(i + 1) % c.len()]);
            }
        }
        perm
    }

    /// Cycles as position sequences in cycle order.
    pub fn position_cycles(&self) -> Vec<Vec<usize>> {
        let pos = |l: usize| self.ground.iter().position(|&g| g == l).expect("label in ground");
        self.cycles
            .iter()
            .map(|c| c.iter().map(|&l| pos(l)).collect())
            .collect()
    }
}

fn standard_ground(shape: AnnulusShape) -> Vec<usize> {
    (1..=shape.size()).collect()
}

fn connects(perm: &[usize], k: usize) -> bool {
    cycles_of(perm)
        .iter()
        .any(|c| c.iter().any(|&p| p < k) && c.iter().any(|&p| p >= k))
}

/// Membership in `NCP⃗(k, l)` for an image array over `0..k+l`.
pub(crate) fn positions_in_anc(perm: &[usize], shape: AnnulusShape, gamma: &[usize]) -> bool {
    let n = shape.size();
    if perm.len() != n || !connects(perm, shape.k) {
        return false;
    }
    let inv = invert(perm);
    let k_perm: Vec<usize> = (0..n).map(|i| inv[gamma[i]]).collect();
    cycle_count(perm) + cycle_count(&k_perm) == n
}

/// Whether `π` is an annular non-crossing permutation of `shape`.
pub fn is_annular_ncp(pi: &CyclicPermutation, shape: AnnulusShape) -> bool {
    pi.ground == standard_ground(shape) && positions_in_anc(&pi.positions(), shape, &shape.gamma())
}

/// Annular non-crossing permutations as image arrays over `0..k+l`, in lexicographic order.
pub(crate) fn anc_positions(shape: AnnulusShape, caps: &Caps) -> Result<Vec<Vec<usize>>> {
    shape.require_both()?;
    let n = shape.size();
    Caps::check("annular permutations", n, caps.partitions)?;
    let gamma = shape.gamma();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        if positions_in_anc(&perm, shape, &gamma) {
            out.push(perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Position cycles of every element of `NCP⃗(k, l)`, cached per shape by callers.
pub(crate) fn annulus_cycles(shape: AnnulusShape, caps: &Caps) -> Result<Vec<Vec<Vec<usize>>>> {
    Ok(anc_positions(shape, caps)?.iter().map(|p| cycles_of(p)).collect())
}

/// Enumerates `NCP⃗(k, l)` by filtering all permutations of `[k+l]`.
pub fn enumerate_annular_ncp(shape: AnnulusShape, caps: &Caps) -> Result<Vec<CyclicPermutation>> {
    let ground = standard_ground(shape);
    Ok(anc_positions(shape, caps)?
        .iter()
        .map(|p| CyclicPermutation::from_positions(ground.clone(), p))
        .collect())
}

/// Annular Kreweras complement `K(π) = π⁻¹ ∘ γ`.
pub fn kreweras_annular(pi: &CyclicPermutation, shape: AnnulusShape) -> Result<CyclicPermutation> {
    if !is_annular_ncp(pi, shape) {
        return Err(Error::NotAnnularNonCrossing { k: shape.k, l: shape.l });
    }
    let perm = pi.positions();
    Ok(CyclicPermutation::from_positions(
        pi.ground.clone(),
        &kreweras_annular_positions(&perm, &shape.gamma()),
    ))
}

pub(crate) fn kreweras_annular_positions(perm: &[usize], gamma: &[usize]) -> Vec<usize> {
    let inv = invert(perm);
    gamma.iter().map(|&g| inv[g]).collect()
}

/// Elements of `NCP⃗(k, l)` whose cycles all have length two.
pub fn annular_pairings(shape: AnnulusShape, caps: &Caps) -> Result<Vec<CyclicPermutation>> {
    if shape.size() % 2 == 1 {
        return Ok(Vec::new());
    }
    Ok(enumerate_annular_ncp(shape, caps)?
        .into_iter()
        .filter(|p| p.cycles().iter().all(|c| c.len() == 2))
        .collect())
}

/// A pair of disk partitions on the two circles with one marked block each.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkedPartitionPair {
    pub left: SetPartition,
    pub right: SetPartition,
    pub marked_left: usize,
    pub marked_right: usize,
}

impl MarkedPartitionPair {
    pub fn new(
        left: SetPartition,
        right: SetPartition,
        marked_left: usize,
        marked_right: usize,
    ) -> Result<Self> {
        if marked_left >= left.len() || marked_right >= right.len() {
            return Err(Error::InvalidParameter("marked block index out of range".into()));
        }
        Ok(MarkedPartitionPair {
            left,
            right,
            marked_left,
            marked_right,
        })
    }

    /// Circle-wise Kreweras complements.
    pub fn kreweras(&self) -> (SetPartition, SetPartition) {
        let kl = kreweras_positions(self.left.ground().len(), &self.left.position_blocks());
        let kr = kreweras_positions(self.right.ground().len(), &self.right.position_blocks());
        (
            SetPartition::from_positions(self.left.ground().to_vec(), kl),
            SetPartition::from_positions(self.right.ground().to_vec(), kr),
        )
    }
}

/// All marked pairs `π₁ × π₂ ∈ NCP(k) × NCP(l)` with marked blocks `U₁ ∈ π₁`, `U₂ ∈ π₂`.
pub fn enumerate_marked(shape: AnnulusShape, caps: &Caps) -> Result<Vec<MarkedPartitionPair>> {
    shape.require_both()?;
    Caps::check("marked partitions", shape.size(), caps.partitions)?;
    let lg: Vec<usize> = (1..=shape.k).collect();
    let rg: Vec<usize> = (shape.k + 1..=shape.size()).collect();
    let mut out = Vec::new();
    for lb in ncp_positions(shape.k) {
        let left = SetPartition::from_positions(lg.clone(), lb);
        for rb in ncp_positions(shape.l) {
            let right = SetPartition::from_positions(rg.clone(), rb);
            for ml in 0..left.len() {
                for mr in 0..right.len() {
                    out.push(MarkedPartitionPair {
                        left: left.clone(),
                        right: right.clone(),
                        marked_left: ml,
                        marked_right: mr,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn small_counts() {
        let one = enumerate_annular_ncp(AnnulusShape::new(1, 1), &caps()).unwrap();
        assert_eq!(one, vec![CyclicPermutation::new(vec![1, 2], vec![vec![1, 2]]).unwrap()]);
        assert_eq!(enumerate_annular_ncp(AnnulusShape::new(2, 2), &caps()).unwrap().len(), 18);
        let a12 = enumerate_annular_ncp(AnnulusShape::new(1, 2), &caps()).unwrap();
        let c123 = CyclicPermutation::new(vec![1, 2, 3], vec![vec![1, 2, 3]]).unwrap();
        let c132 = CyclicPermutation::new(vec![1, 2, 3], vec![vec![1, 3, 2]]).unwrap();
        assert!(a12.contains(&c123) && a12.contains(&c132));
        assert_ne!(c123, c132);
    }

    #[test]
    fn annular_count_formula() {
        // 2pq/(p+q) C(2p-1,p) C(2q-1,q)
        fn binom(n: u64, r: u64) -> u64 {
            (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
        }
        for p in 1..=4u64 {
            for q in 1..=(7 - p).min(4) {
                let expected = 2 * p * q * binom(2 * p - 1, p) * binom(2 * q - 1, q) / (p + q);
                let got = anc_positions(AnnulusShape::new(p as usize, q as usize), &caps()).unwrap();
                assert_eq!(got.len() as u64, expected, "({p},{q})");
            }
        }
    }

    #[test]
    fn annular_kreweras_fixture() {
        let shape = AnnulusShape::new(4, 3);
        let g: Vec<usize> = (1..=7).collect();
        let pi = CyclicPermutation::new(g.clone(), vec![vec![1, 2, 7, 5], vec![3, 4], vec![6]]).unwrap();
        let k = CyclicPermutation::new(g, vec![vec![1], vec![2, 4, 5, 6], vec![3], vec![7]]).unwrap();
        assert_eq!(kreweras_annular(&pi, shape).unwrap(), k);
    }

    #[test]
    fn kreweras_of_transposition_on_11() {
        // γ is the identity on the (1,1)-annulus, so K(π) = π⁻¹ = (1 2)
        let shape = AnnulusShape::new(1, 1);
        let pi = CyclicPermutation::new(vec![1, 2], vec![vec![1, 2]]).unwrap();
        assert_eq!(kreweras_annular(&pi, shape).unwrap(), pi);
    }

    #[test]
    fn kreweras_is_a_bijection() {
        let shape = AnnulusShape::new(2, 2);
        let all = enumerate_annular_ncp(shape, &caps()).unwrap();
        let mut images: Vec<_> = all.iter().map(|p| kreweras_annular(p, shape).unwrap()).collect();
        for p in &all {
            let k = kreweras_annular(p, shape).unwrap();
            assert_eq!(p.len() + k.len(), 4);
            // K⁻¹(σ) = γ σ⁻¹
            let kp = k.positions();
            let inv = invert(&kp);
            let gamma = shape.gamma();
            let back: Vec<usize> = (0..4).map(|i| gamma[inv[i]]).collect();
            assert_eq!(CyclicPermutation::from_positions(p.ground().to_vec(), &back), *p);
        }
        images.sort();
        images.dedup();
        assert_eq!(images.len(), all.len());
    }

    #[test]
    fn non_member_rejected() {
        let shape = AnnulusShape::new(2, 2);
        let pi = CyclicPermutation::new(vec![1, 2, 3, 4], vec![vec![1, 2]]).unwrap();
        assert!(kreweras_annular(&pi, shape).is_err());
    }

    #[test]
    fn pairings_and_marked() {
        let c = caps();
        assert_eq!(annular_pairings(AnnulusShape::new(1, 1), &c).unwrap().len(), 1);
        let p22 = annular_pairings(AnnulusShape::new(2, 2), &c).unwrap();
        let expected = vec![
            CyclicPermutation::new(vec![1, 2, 3, 4], vec![vec![1, 3], vec![2, 4]]).unwrap(),
            CyclicPermutation::new(vec![1, 2, 3, 4], vec![vec![1, 4], vec![2, 3]]).unwrap(),
        ];
        assert_eq!(p22, expected);
        assert_eq!(annular_pairings(AnnulusShape::new(1, 3), &c).unwrap().len(), 3);
        assert!(annular_pairings(AnnulusShape::new(1, 2), &c).unwrap().is_empty());
        assert_eq!(enumerate_marked(AnnulusShape::new(1, 1), &c).unwrap().len(), 1);
        assert_eq!(enumerate_marked(AnnulusShape::new(2, 1), &c).unwrap().len(), 3);
        assert_eq!(enumerate_marked(AnnulusShape::new(2, 2), &c).unwrap().len(), 9);
    }

    #[test]
    fn cap_enforced() {
        let c = Caps {
            partitions: 4,
            ..Caps::default()
        };
        assert!(matches!(
            enumerate_annular_ncp(AnnulusShape::new(3, 2), &c),
            Err(Error::CapExceeded { .. })
        ));
    }
}
