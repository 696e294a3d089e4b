//! Stieltjes transform of the semicircle law, divided differences and first-order free
//! cumulants, including the transpose-aware variant `m^{#,σ}`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::ncgeom::{moebius_to_top, ncg_weight_sum};
use crate::{Caps, Error, Result, C64};

/// Modulus below which `1 - σ m_i m_j` is treated as singular.
pub const MIXED_WEIGHT_GUARD: f64 = 1e-10;

/// Default `|Im z|` below which callers are warned.
pub const SOFT_WARNING_IM: f64 = 0.5;

/// A validated spectral parameter with `Im z != 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint(C64);

impl SpectralPoint {
    pub fn new(z: C64) -> Result<Self> {
        if z.im == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::RealSpectralParameter { re: z.re, im: z.im });
        }
        Ok(SpectralPoint(z))
    }

    pub fn z(self) -> C64 {
        self.0
    }

    /// Whether `|Im z|` is below `threshold` (see [`SOFT_WARNING_IM`]).
    pub fn is_near_real(self, threshold: f64) -> bool {
        self.0.im.abs() < threshold
    }
}

/// Marks which resolvents of a chain enter transposed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SharpVector(pub Vec<bool>);

impl SharpVector {
    pub fn zeros(n: usize) -> Self {
        SharpVector(alloc::vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `m(z)`: the root of `m² + zm + 1 = 0` with `Im z · Im m > 0`.
pub fn stieltjes(z: C64) -> Result<C64> {
    SpectralPoint::new(z)?;
    let s = (z * z - 4.0).sqrt();
    let r1 = (-z + s) * 0.5;
    let r2 = (-z - s) * 0.5;
    // the roots multiply to one; invert the larger one for accuracy
    let big = if r1.norm() >= r2.norm() { r1 } else { r2 };
    Ok(big.inv())
}

/// `m'(z) = m² / (1 - m²)`.
pub fn stieltjes_derivative(z: C64) -> Result<C64> {
    let m = stieltjes(z)?;
    Ok(m * m / (1.0 - m * m))
}

/// `q_{i,j} = m_i m_j / (1 - m_i m_j)`; equals `m'` when `z_i = z_j`.
pub fn q_weight(zi: C64, zj: C64) -> Result<C64> {
    let x = stieltjes(zi)? * stieltjes(zj)?;
    Ok(x / (1.0 - x))
}

/// Taylor coefficients `a_n = m^{(n)}(z)/n!` for `n = 0..=order`.
pub fn taylor_coefficients(z: C64, order: usize) -> Result<Vec<C64>> {
    let m = stieltjes(z)?;
    let mut a = Vec::with_capacity(order + 1);
    a.push(m);
    let denom = 2.0 * m + z;
    for n in 1..=order {
        let mut rhs = -a[n - 1];
        for i in 1..n {
            rhs -= a[i] * a[n - i];
        }
        a.push(rhs / denom);
    }
    Ok(a)
}

pub(crate) fn stieltjes_all(zs: &[C64]) -> Result<Vec<C64>> {
    zs.iter().map(|&z| stieltjes(z)).collect()
}

/// Weighted disk-graph sum `(∏ m_s) Σ_Γ ∏ w(i,j)` for bicolored vertices.
///
/// With `sharp = None` every edge carries `q_{i,j}`.
pub(crate) fn graph_moment(
    ms: &[C64],
    sharp: Option<&[bool]>,
    sigma: f64,
    connected_only: bool,
) -> Result<C64> {
    let n = ms.len();
    if n == 0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut w = alloc::vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let x = ms[i] * ms[j];
            let mixed = sharp.is_some_and(|s| s[i] != s[j]);
            w[i * n + j] = if mixed {
                let d = 1.0 - sigma * x;
                if d.norm() < MIXED_WEIGHT_GUARD {
                    return Err(Error::UnstableMixedWeight(d.norm()));
                }
                sigma * x / d
            } else {
                x / (1.0 - x)
            };
        }
    }
    let prod: C64 = ms.iter().product();
    Ok(prod * ncg_weight_sum(n, connected_only, |i, j| w[i * n + j]))
}

fn check_sizes(zs: &[C64], caps: &Caps) -> Result<()> {
    Caps::check("divided difference", zs.len(), caps.graphs)
}

/// Divided difference `m[z_1, ..., z_k]` by the disk non-crossing graph formula.
pub fn divided_difference(zs: &[C64], caps: &Caps) -> Result<C64> {
    check_sizes(zs, caps)?;
    graph_moment(&stieltjes_all(zs)?, None, 0.0, false)
}

fn cmp_c64(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Divided difference by the classical quotient recursion.
///
/// Points are sorted so that the outer points of every sub-problem differ unless all
/// points coincide, in which case the Taylor coefficient is used.
pub fn divided_difference_recursive(zs: &[C64]) -> Result<C64> {
    if zs.is_empty() {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut pts = zs.to_vec();
    pts.sort_by(cmp_c64);
    for &z in &pts {
        SpectralPoint::new(z)?;
    }
    let mut memo = BTreeMap::new();
    dd_range(&pts, 0, pts.len(), &mut memo)
}

fn dd_range(
    pts: &[C64],
    a: usize,
    b: usize,
    memo: &mut BTreeMap<(usize, usize), C64>,
) -> Result<C64> {
    if let Some(&v) = memo.get(&(a, b)) {
        return Ok(v);
    }
    let v = if pts[a] == pts[b - 1] {
        taylor_coefficients(pts[a], b - a - 1)?[b - a - 1]
    } else {
        let hi = dd_range(pts, a + 1, b, memo)?;
        let lo = dd_range(pts, a, b - 1, memo)?;
        (hi - lo) / (pts[b - 1] - pts[a])
    };
    memo.insert((a, b), v);
    Ok(v)
}

/// First-order free cumulant `m∘[S]` by the connected-graph formula.
pub fn free_cumulant(zs: &[C64], caps: &Caps) -> Result<C64> {
    check_sizes(zs, caps)?;
    graph_moment(&stieltjes_all(zs)?, None, 0.0, true)
}

/// `m∘[S] = Σ_π μ(π, 1) ∏_{B∈π} m[B]`.
pub fn free_cumulant_moebius(zs: &[C64], caps: &Caps) -> Result<C64> {
    check_sizes(zs, caps)?;
    Caps::check("free cumulant", zs.len(), caps.partitions)?;
    let ms = stieltjes_all(zs)?;
    moebius_invert(zs.len(), |block| {
        let sub: Vec<C64> = block.iter().map(|&p| ms[p]).collect();
        graph_moment(&sub, None, 0.0, false)
    })
}

/// `Σ_π μ(π, 1) ∏_{B∈π} f(B)` over non-crossing partitions of `0..n`.
pub(crate) fn moebius_invert<F>(n: usize, mut f: F) -> Result<C64>
where
    F: FnMut(&[usize]) -> Result<C64>,
{
    let mut memo: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
    let mut total = C64::new(0.0, 0.0);
    for (blocks, mu) in moebius_to_top(n) {
        let mut prod = C64::new(mu as f64, 0.0);
        for b in &blocks {
            let v = match memo.get(b) {
                Some(&v) => v,
                None => {
                    let v = f(b)?;
                    memo.insert(b.clone(), v);
                    v
                }
            };
            prod *= v;
        }
        total += prod;
    }
    Ok(total)
}

fn check_sharp(zs: &[C64], sharp: &SharpVector, sigma: f64, caps: &Caps) -> Result<()> {
    check_sizes(zs, caps)?;
    if sharp.len() != zs.len() {
        return Err(Error::LengthMismatch {
            expected: zs.len(),
            got: sharp.len(),
        });
    }
    if !(-1.0..=1.0).contains(&sigma) {
        return Err(Error::InvalidParameter(alloc::format!("sigma = {sigma} outside [-1, 1]")));
    }
    Ok(())
}

/// `m^{#,σ}[S]` by the bicolored disk-graph formula.
pub fn m_sharp(zs: &[C64], sharp: &SharpVector, sigma: f64, caps: &Caps) -> Result<C64> {
    check_sharp(zs, sharp, sigma, caps)?;
    graph_moment(&stieltjes_all(zs)?, Some(&sharp.0), sigma, false)
}

/// `m^{#,σ}_∘[S]` by the connected bicolored-graph formula.
pub fn m_sharp_cumulant(zs: &[C64], sharp: &SharpVector, sigma: f64, caps: &Caps) -> Result<C64> {
    check_sharp(zs, sharp, sigma, caps)?;
    graph_moment(&stieltjes_all(zs)?, Some(&sharp.0), sigma, true)
}

/// `m^{#,σ}_∘[S]` by Möbius inversion of [`m_sharp`].
pub fn m_sharp_cumulant_moebius(
    zs: &[C64],
    sharp: &SharpVector,
    sigma: f64,
    caps: &Caps,
) -> Result<C64> {
    check_sharp(zs, sharp, sigma, caps)?;
    Caps::check("free cumulant", zs.len(), caps.partitions)?;
    let ms = stieltjes_all(zs)?;
    moebius_invert(zs.len(), |block| {
        let sub: Vec<C64> = block.iter().map(|&p| ms[p]).collect();
        let sh: Vec<bool> = block.iter().map(|&p| sharp.0[p]).collect();
        graph_moment(&sub, Some(&sh), sigma, false)
    })
}

/// `m^{#,σ}[S]` by the first-vertex recursion
/// `m^#[1..k] = m_1 (1 + w_{1k}) (m^#[2..k] + Σ_{j=2}^{k-1} c_{1j} m^#[1..j] m^#[j..k])`
/// with `c_{1j} = 1` for equal colors and `σ` otherwise.
pub fn m_sharp_recursive(zs: &[C64], sharp: &SharpVector, sigma: f64) -> Result<C64> {
    check_sharp(zs, sharp, sigma, &Caps { graphs: usize::MAX, ..Caps::default() })?;
    let ms = stieltjes_all(zs)?;
    let mut memo = BTreeMap::new();
    sharp_range(&ms, &sharp.0, sigma, 0, ms.len(), &mut memo)
}

fn sharp_range(
    ms: &[C64],
    sh: &[bool],
    sigma: f64,
    a: usize,
    b: usize,
    memo: &mut BTreeMap<(usize, usize), C64>,
) -> Result<C64> {
    if b <= a {
        return Ok(C64::new(0.0, 0.0));
    }
    if b - a == 1 {
        return Ok(ms[a]);
    }
    if let Some(&v) = memo.get(&(a, b)) {
        return Ok(v);
    }
    let last = b - 1;
    let x = ms[a] * ms[last];
    let one_plus_w = if sh[a] == sh[last] {
        1.0 / (1.0 - x)
    } else {
        let d = 1.0 - sigma * x;
        if d.norm() < MIXED_WEIGHT_GUARD {
            return Err(Error::UnstableMixedWeight(d.norm()));
        }
        1.0 + sigma * x / d
    };
    let mut total = sharp_range(ms, sh, sigma, a + 1, b, memo)?;
    for j in a + 1..last {
        let c = if sh[a] == sh[j] { 1.0 } else { sigma };
        if c != 0.0 {
            total += c
                * sharp_range(ms, sh, sigma, a, j + 1, memo)?
                * sharp_range(ms, sh, sigma, j, b, memo)?;
        }
    }
    let v = ms[a] * one_plus_w * total;
    memo.insert((a, b), v);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    const S2: f64 = core::f64::consts::SQRT_2;

    #[test]
    fn stieltjes_values() {
        let m = stieltjes(c(0.0, 2.0)).unwrap();
        assert!(close(m, c(0.0, S2 - 1.0), 1e-15));
        assert!(close(stieltjes(c(0.0, -2.0)).unwrap(), c(0.0, 1.0 - S2), 1e-15));
        for z in [c(0.3, 1.0), c(-1.7, 0.2), c(5.0, -3.0), c(0.0, 1e-3), c(1e6, 1.0)] {
            let m = stieltjes(z).unwrap();
            assert!((m + 1.0 / (m + z)).norm() < 1e-12);
            assert!(z.im * m.im > 0.0);
            assert!(m.norm() < 1.0);
        }
        assert!(stieltjes(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn derivative_values() {
        let d = stieltjes_derivative(c(0.0, 2.0)).unwrap();
        assert!(close(d, c((S2 - 2.0) / 4.0, 0.0), 1e-14));
        let z = c(0.4, 1.3);
        let h = 1e-5;
        let fd = (stieltjes(z + h).unwrap() - stieltjes(z - h).unwrap()) / (2.0 * h);
        assert!(close(fd, stieltjes_derivative(z).unwrap(), 1e-6));
        assert_eq!(q_weight(c(0.0, 2.0), c(0.0, 2.0)).unwrap(), d);
    }

    #[test]
    fn q_values() {
        let q = q_weight(c(0.0, 2.0), c(0.0, -2.0)).unwrap();
        let expected = (3.0 - 2.0 * S2) / (2.0 * S2 - 2.0);
        assert!(close(q, c(expected, 0.0), 1e-14));
        let (zi, zj) = (c(0.2, 1.1), c(-0.5, -2.0));
        let x = stieltjes(zi).unwrap() * stieltjes(zj).unwrap();
        assert!(close(1.0 + q_weight(zi, zj).unwrap(), 1.0 / (1.0 - x), 1e-12));
    }

    #[test]
    fn taylor_matches_derivative() {
        let z = c(0.7, 1.4);
        let a = taylor_coefficients(z, 3).unwrap();
        assert!(close(a[1], stieltjes_derivative(z).unwrap(), 1e-13));
        let h = 1e-4;
        let fd2 = (stieltjes(z + h).unwrap() - 2.0 * a[0] + stieltjes(z - h).unwrap()) / (h * h);
        assert!(close(2.0 * a[2], fd2, 1e-5));
    }

    #[test]
    fn divided_difference_fixtures() {
        let caps = Caps::default();
        let z = c(0.3, 1.2);
        assert_eq!(divided_difference(&[z], &caps).unwrap(), stieltjes(z).unwrap());
        assert!(close(
            divided_difference(&[z, z], &caps).unwrap(),
            stieltjes_derivative(z).unwrap(),
            1e-13
        ));
        let (z1, z2) = (c(0.0, 2.0), c(0.0, -2.0));
        let g = divided_difference(&[z1, z2], &caps).unwrap();
        let r = divided_difference_recursive(&[z1, z2]).unwrap();
        assert!(close(g, c((S2 - 1.0) / 2.0, 0.0), 1e-12));
        assert!(close(r, g, 1e-12));
    }

    #[test]
    fn free_cumulant_fixtures() {
        let caps = Caps::default();
        let z = c(0.0, 2.0);
        let expected = (17.0 - 12.0 * S2) / (4.0 - 2.0 * S2);
        let g = free_cumulant(&[z, z], &caps).unwrap();
        let mb = free_cumulant_moebius(&[z, z], &caps).unwrap();
        assert!(close(g, c(expected, 0.0), 1e-12));
        assert!(close(mb, g, 1e-12));

        let zs = [c(0.1, 1.0), c(-0.4, 2.0), c(1.0, -1.5)];
        let m = |s: &[C64]| divided_difference(s, &caps).unwrap();
        let [m1, m2, m3] = [m(&zs[..1]), m(&zs[1..2]), m(&zs[2..])];
        assert!(close(free_cumulant(&zs[..2], &caps).unwrap(), m(&zs[..2]) - m1 * m2, 1e-12));
        let expected3 = m(&zs) - m1 * m(&[zs[1], zs[2]]) - m2 * m(&[zs[0], zs[2]])
            - m3 * m(&[zs[0], zs[1]])
            + 2.0 * m1 * m2 * m3;
        assert!(close(free_cumulant(&zs, &caps).unwrap(), expected3, 1e-12));
    }

    #[test]
    fn sharp_fixtures() {
        let caps = Caps::default();
        let zs = [c(0.1, 1.0), c(-0.4, 2.0), c(1.0, -1.5)];
        let ms: Vec<C64> = zs.iter().map(|&z| stieltjes(z).unwrap()).collect();
        for sigma in [-0.7, 0.0, 0.3, 1.0] {
            let sh = SharpVector(vec![false, true, true]);
            let expected = ms[0] * ms[1] * ms[2]
                / ((1.0 - sigma * ms[0] * ms[1]) * (1.0 - sigma * ms[0] * ms[2]) * (1.0 - ms[1] * ms[2]));
            assert!(close(m_sharp(&zs, &sh, sigma, &caps).unwrap(), expected, 1e-12));
            assert!(close(m_sharp_recursive(&zs, &sh, sigma).unwrap(), expected, 1e-12));
            let zero = SharpVector::zeros(3);
            assert!(close(
                m_sharp(&zs, &zero, sigma, &caps).unwrap(),
                divided_difference(&zs, &caps).unwrap(),
                1e-13
            ));
        }
        let sh = SharpVector(vec![true, false, true]);
        assert!(close(
            m_sharp(&zs, &sh, 1.0, &caps).unwrap(),
            divided_difference(&zs, &caps).unwrap(),
            1e-13
        ));
        let z = c(0.0, 2.0);
        let m = stieltjes(z).unwrap();
        let sh = SharpVector(vec![false, true]);
        let expected = m * m * (0.5 * m * m / (1.0 - 0.5 * m * m));
        assert!(close(m_sharp_cumulant(&[z, z], &sh, 0.5, &caps).unwrap(), expected, 1e-14));
        assert!(close(m_sharp_cumulant_moebius(&[z, z], &sh, 0.5, &caps).unwrap(), expected, 1e-14));
        assert_eq!(m_sharp_cumulant(&[z], &SharpVector::zeros(1), 0.5, &caps).unwrap(), m);
    }

    #[test]
    fn sharp_errors() {
        let caps = Caps::default();
        let z = c(0.0, 2.0);
        assert!(matches!(
            m_sharp(&[z, z], &SharpVector::zeros(3), 0.0, &caps),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(m_sharp(&[z], &SharpVector::zeros(1), 1.5, &caps).is_err());
    }
}
