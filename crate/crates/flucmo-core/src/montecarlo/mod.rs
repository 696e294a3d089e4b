//! Monte Carlo validation: Wigner ensembles, chain traces of sampled matrices and
//! `N²`-scaled covariance estimates with jackknife error bars.

mod estimator;

pub use estimator::{
    chain_pair_sample, check_samples, estimate_covariance, estimate_poly_covariance, poly_pair_sample,
    predict_covariance, predict_poly_covariance, report, EstimatorReport, TolerancePolicy, MIN_SAMPLES,
};

use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::ComplexMatrix;
use crate::matrix_layer::ChainSpec;
use crate::second_order::EnsembleParams;
use crate::{Error, Result, C64};

/// Law of the normalized off-diagonal entries `χ_od` (`E|χ_od|² = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffDiagonalLaw {
    /// `(g₁ + i g₂)/√2` with independent standard Gaussians.
    ComplexGaussian,
    /// A real standard Gaussian.
    RealGaussian,
    /// Uniform on `{±1, ±i}`.
    ComplexBernoulli,
    /// Uniform on `{±1}`.
    RealBernoulli,
}

impl OffDiagonalLaw {
    /// `(E|χ|⁴, E χ²)`.
    fn moments(self) -> (f64, f64) {
        match self {
            OffDiagonalLaw::ComplexGaussian => (2.0, 0.0),
            OffDiagonalLaw::RealGaussian => (3.0, 1.0),
            OffDiagonalLaw::ComplexBernoulli => (1.0, 0.0),
            OffDiagonalLaw::RealBernoulli => (1.0, 1.0),
        }
    }

    fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> C64 {
        match self {
            OffDiagonalLaw::ComplexGaussian => {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
            }
            OffDiagonalLaw::RealGaussian => C64::new(StandardNormal.sample(rng), 0.0),
            OffDiagonalLaw::ComplexBernoulli => match rng.random_range(0..4u8) {
                0 => C64::new(1.0, 0.0),
                1 => C64::new(-1.0, 0.0),
                2 => C64::new(0.0, 1.0),
                _ => C64::new(0.0, -1.0),
            },
            OffDiagonalLaw::RealBernoulli => C64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0),
        }
    }
}

/// Law of the real diagonal entries `χ_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiagonalLaw {
    /// Centered Gaussian with the given variance.
    Gaussian(f64),
    /// Uniform on `{±1}`.
    Rademacher,
    /// Identically zero.
    Zero,
}

impl DiagonalLaw {
    fn second_moment(self) -> f64 {
        match self {
            DiagonalLaw::Gaussian(v) => v,
            DiagonalLaw::Rademacher => 1.0,
            DiagonalLaw::Zero => 0.0,
        }
    }

    fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            DiagonalLaw::Gaussian(v) => {
                let g: f64 = StandardNormal.sample(rng);
                v.sqrt() * g
            }
            DiagonalLaw::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            DiagonalLaw::Zero => 0.0,
        }
    }
}

/// Named ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnsembleName {
    Gue,
    Goe,
    ComplexBernoulli,
    ZeroDiagonalGue,
    Custom,
}

impl EnsembleName {
    pub const NAMED: [EnsembleName; 4] = [
        EnsembleName::Gue,
        EnsembleName::Goe,
        EnsembleName::ComplexBernoulli,
        EnsembleName::ZeroDiagonalGue,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EnsembleName::Gue => "GUE",
            EnsembleName::Goe => "GOE",
            EnsembleName::ComplexBernoulli => "complex-bernoulli",
            EnsembleName::ZeroDiagonalGue => "zero-diagonal-GUE",
            EnsembleName::Custom => "custom",
        }
    }
}

impl fmt::Display for EnsembleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnsembleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gue" => Ok(EnsembleName::Gue),
            "goe" => Ok(EnsembleName::Goe),
            "complex-bernoulli" => Ok(EnsembleName::ComplexBernoulli),
            "zero-diagonal-gue" => Ok(EnsembleName::ZeroDiagonalGue),
            "custom" => Ok(EnsembleName::Custom),
            _ => Err(Error::InvalidParameter(alloc::format!("unknown ensemble {s:?}"))),
        }
    }
}

/// A Wigner ensemble of dimension `N`: independent entries up to Hermitian symmetry,
/// `W_ij = χ_ij/√N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerEnsemble {
    name: EnsembleName,
    n: usize,
    off_diagonal: OffDiagonalLaw,
    diagonal: DiagonalLaw,
}

impl WignerEnsemble {
    pub fn named(name: EnsembleName, n: usize) -> Result<Self> {
        let (off_diagonal, diagonal) = match name {
            EnsembleName::Gue => (OffDiagonalLaw::ComplexGaussian, DiagonalLaw::Gaussian(1.0)),
            EnsembleName::Goe => (OffDiagonalLaw::RealGaussian, DiagonalLaw::Gaussian(2.0)),
            EnsembleName::ComplexBernoulli => (OffDiagonalLaw::ComplexBernoulli, DiagonalLaw::Rademacher),
            EnsembleName::ZeroDiagonalGue => (OffDiagonalLaw::ComplexGaussian, DiagonalLaw::Zero),
            EnsembleName::Custom => {
                return Err(Error::InvalidParameter("custom ensembles need explicit entry laws".into()))
            }
        };
        Self::build(name, n, off_diagonal, diagonal)
    }

    pub fn custom(n: usize, off_diagonal: OffDiagonalLaw, diagonal: DiagonalLaw) -> Result<Self> {
        Self::build(EnsembleName::Custom, n, off_diagonal, diagonal)
    }

    fn build(name: EnsembleName, n: usize, off_diagonal: OffDiagonalLaw, diagonal: DiagonalLaw) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(alloc::format!("dimension {n} below 2")));
        }
        if let DiagonalLaw::Gaussian(v) = diagonal {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(alloc::format!("diagonal variance {v}")));
            }
        }
        let e = WignerEnsemble {
            name,
            n,
            off_diagonal,
            diagonal,
        };
        e.params()?;
        Ok(e)
    }

    pub fn gue(n: usize) -> Result<Self> {
        Self::named(EnsembleName::Gue, n)
    }

    pub fn name(&self) -> EnsembleName {
        self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn off_diagonal(&self) -> OffDiagonalLaw {
        self.off_diagonal
    }

    pub fn diagonal(&self) -> DiagonalLaw {
        self.diagonal
    }

    /// `κ₄ = E|χ_od|⁴ - 2`, `σ = E χ_od²`, `ω̃₂ = E χ_d² - 1 - σ`.
    pub fn params(&self) -> Result<EnsembleParams> {
        let (fourth, sigma) = self.off_diagonal.moments();
        EnsembleParams::new(fourth - 2.0, sigma, self.diagonal.second_moment() - 1.0 - sigma)
    }
}

/// The generator for sample `index` of a run seeded with `seed`: one ChaCha8 stream per
/// sample, so draws do not depend on evaluation order.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws `W` from the ensemble using `rng`.
pub fn sample_wigner_with<R: Rng + ?Sized>(ensemble: &WignerEnsemble, rng: &mut R) -> ComplexMatrix {
    let n = ensemble.n;
    let scale = 1.0 / (n as f64).sqrt();
    let mut w = ComplexMatrix::zeros(n);
    for i in 0..n {
        w.set(i, i, C64::new(ensemble.diagonal.sample(rng) * scale, 0.0));
        for j in i + 1..n {
            let x = ensemble.off_diagonal.sample(rng) * scale;
            w.set(i, j, x);
            w.set(j, i, x.conj());
        }
    }
    w
}

/// Draws `W` deterministically from `seed`.
pub fn sample_wigner(ensemble: &WignerEnsemble, seed: u64) -> ComplexMatrix {
    sample_wigner_with(ensemble, &mut sample_rng(seed, 0))
}

/// `⟨G(z₁)^♯A₁ … G(z_k)^♯A_k⟩` with resolvents from dense LU solves.
pub fn chain_trace(w: &ComplexMatrix, chain: &ChainSpec) -> Result<C64> {
    let mut cache = ResolventCache::default();
    chain_trace_cached(w, chain, &mut cache)
}

/// Resolvents of one sampled matrix, keyed by the bit pattern of `z`.
#[derive(Debug, Default)]
pub(crate) struct ResolventCache {
    map: BTreeMap<(u64, u64), ComplexMatrix>,
}

impl ResolventCache {
    fn get(&mut self, w: &ComplexMatrix, z: C64) -> Result<&ComplexMatrix> {
        let key = (z.re.to_bits(), z.im.to_bits());
        match self.map.entry(key) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => Ok(e.insert(w.shift_diagonal(-z).inverse()?)),
        }
    }
}

pub(crate) fn chain_trace_cached(w: &ComplexMatrix, chain: &ChainSpec, cache: &mut ResolventCache) -> Result<C64> {
    let n = w.dim();
    if let Some(d) = chain.dim() {
        if d != n {
            return Err(Error::DimensionMismatch { expected: n, got: d });
        }
    }
    let mut factors: Vec<ComplexMatrix> = Vec::with_capacity(2 * chain.len());
    for f in chain.factors() {
        let g = cache.get(w, f.z)?;
        factors.push(if f.transposed { g.transpose() } else { g.clone() });
        if !f.a.is_identity() {
            factors.push(f.a.clone());
        }
    }
    Ok(trace_of_chain(factors))
}

/// `⟨W A₁ … W A_k⟩`.
pub fn poly_trace(w: &ComplexMatrix, mats: &[ComplexMatrix]) -> Result<C64> {
    let n = w.dim();
    if let Some(bad) = mats.iter().find(|a| a.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
    }
    let factors = mats
        .iter()
        .flat_map(|a| [Some(w.clone()), (!a.is_identity()).then(|| a.clone())])
        .flatten()
        .collect();
    Ok(trace_of_chain(factors))
}

/// Normalized trace of an ordered product; the last multiplication is folded into the trace.
fn trace_of_chain(mut blocks: Vec<ComplexMatrix>) -> C64 {
    let Some(last) = blocks.pop() else {
        return C64::new(1.0, 0.0);
    };
    match blocks.into_iter().reduce(|acc, b| &acc * &b) {
        Some(head) => head.trace_of_product(&last),
        None => last.normalized_trace(),
    }
}
