//! Dense complex square matrices with an LU solver.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_traits::Float;

use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A dense `N × N` complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: alloc::vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> C64>(n: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { n, data }
    }

    /// Builds a matrix from rows, rejecting ragged, non-square or non-finite input.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidParameter("non-finite matrix entry".into()));
            }
            data.extend(r);
        }
        Ok(ComplexMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// Adds `s` to every diagonal entry.
    pub fn shift_diagonal(&self, s: C64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] += s;
        }
        m
    }

    /// Normalized trace `⟨X⟩ = tr(X)/N`.
    pub fn normalized_trace(&self) -> C64 {
        let s: C64 = (0..self.n).map(|i| self.get(i, i)).sum();
        s / self.n as f64
    }

    /// `⟨XY⟩` in `O(N²)`.
    pub fn trace_of_product(&self, other: &ComplexMatrix) -> C64 {
        let n = self.n;
        let mut s = ZERO;
        for i in 0..n {
            let row = self.row(i);
            for (j, &x) in row.iter().enumerate() {
                s += x * other.data[j * n + i];
            }
        }
        s / n as f64
    }

    /// Hadamard trace `⟨X ⊙ Y⟩ = (1/N) Σ_r X_rr Y_rr`.
    pub fn hadamard_trace(&self, other: &ComplexMatrix) -> C64 {
        let s: C64 = (0..self.n).map(|i| self.get(i, i) * other.get(i, i)).sum();
        s / self.n as f64
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator norm estimated by power iteration on `X* X`.
    pub fn spectral_norm(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let adj = self.adjoint();
        let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + i as f64 * 1e-3, 0.5)).collect();
        let mut lambda = 0.0;
        for _ in 0..200 {
            let w = adj.mul_vec(&self.mul_vec(&v));
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let next = norm / vnorm;
            v = w.into_iter().map(|z| z / norm).collect();
            if (next - lambda).abs() <= 1e-14 * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }

    /// A matrix with standard complex Gaussian entries rescaled to spectral norm one.
    pub fn random_unit_norm<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        let m = Self::from_fn(n, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        });
        let norm = m.spectral_norm();
        m.scale(C64::new(1.0 / norm, 0.0))
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_hermitian(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == self.get(j, i).conj()))
    }

    /// Checked matrix product.
    pub fn try_mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(self.matmul(other))
    }

    fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        let mut out = alloc::vec![ZERO; n * n];
        for i in 0..n {
            let orow = &mut out[i * n..(i + 1) * n];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix { n, data: out }
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = self.max_abs().max(f64::min_positive_value());
        for col in 0..n {
            let (p, best) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= scale * 1e-14 {
                return Err(Error::Singular);
            }
            if p != col {
                for j in 0..n {
                    a.swap(col * n + j, p * n + j);
                }
                perm.swap(col, p);
            }
            let pivot = a[col * n + col];
            let (upper, lower) = a.split_at_mut((col + 1) * n);
            let prow = &upper[col * n..];
            for r in 0..n - col - 1 {
                let row = &mut lower[r * n..(r + 1) * n];
                let f = row[col] / pivot;
                row[col] = f;
                for j in col + 1..n {
                    row[j] -= f * prow[j];
                }
            }
        }
        Ok(Lu { n, a, perm })
    }

    /// Matrix inverse via LU.
    pub fn inverse(&self) -> Result<ComplexMatrix> {
        Ok(self.lu()?.inverse())
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| self.row(i).iter().enumerate().all(|(j, &x)| x == if i == j { ONE } else { ZERO }))
    }
}

/// LU factors `PA = LU` with unit lower triangle.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    a: Vec<C64>,
    perm: Vec<usize>,
}

impl Lu {
    /// `A⁻¹ = U⁻¹ L⁻¹ P`; row `i` of `L⁻¹` vanishes right of the diagonal.
    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.n;
        let mut x = alloc::vec![ZERO; n * n];
        for i in 0..n {
            let (done, rest) = x.split_at_mut(i * n);
            let xi = &mut rest[..n];
            xi[i] = ONE;
            for k in 0..i {
                let l = self.a[i * n + k];
                if l == ZERO {
                    continue;
                }
                for (t, &s) in xi[..=k].iter_mut().zip(&done[k * n..=k * n + k]) {
                    *t -= l * s;
                }
            }
        }
        self.back_substitute(&mut x);
        let mut out = alloc::vec![ZERO; n * n];
        for i in 0..n {
            for (k, &p) in self.perm.iter().enumerate() {
                out[i * n + p] = x[i * n + k];
            }
        }
        ComplexMatrix { n, data: out }
    }

    fn back_substitute(&self, x: &mut [C64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let (head, tail) = x.split_at_mut((i + 1) * n);
            let xi = &mut head[i * n..];
            for k in i + 1..n {
                let u = self.a[i * n + k];
                if u == ZERO {
                    continue;
                }
                let xk = &tail[(k - i - 1) * n..(k - i) * n];
                for (t, &s) in xi.iter_mut().zip(xk) {
                    *t -= u * s;
                }
            }
            let d = self.a[i * n + i].inv();
            for t in xi.iter_mut() {
                *t *= d;
            }
        }
    }

    /// Solves `A X = B` for all columns of `B` at once.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.n;
        if b.n != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.n });
        }
        // rows of X are updated as whole slices, keeping the loops contiguous
        let mut x: Vec<C64> = Vec::with_capacity(n * n);
        for &p in &self.perm {
            x.extend_from_slice(b.row(p));
        }
        for i in 0..n {
            let (done, rest) = x.split_at_mut(i * n);
            let xi = &mut rest[..n];
            for k in 0..i {
                let l = self.a[i * n + k];
                if l == ZERO {
                    continue;
                }
                for (t, &s) in xi.iter_mut().zip(&done[k * n..(k + 1) * n]) {
                    *t -= l * s;
                }
            }
        }
        self.back_substitute(&mut x);
        Ok(ComplexMatrix { n, data: x })
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on dimension mismatch; see [`ComplexMatrix::try_mul`].
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}
