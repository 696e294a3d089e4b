//! Deterministic matrices `M_S`, chain functionals `𝔪[·]` and the second-order
//! functional `𝔪[·|·]` for resolvent chains with deterministic matrices.

mod closed;
mod engine;

pub use closed::{closed_frak_m2_gue, closed_frak_m2_sigma, closed_frak_m2_sigma_literal, frak_m2_k1l1, frak_m2_k1l1_omega};

use alloc::vec::Vec;

use crate::linalg::ComplexMatrix;
use crate::second_order::{Component, EnsembleParams, SourceWeights};
use crate::semicircle::SpectralPoint;
use crate::{Caps, Error, Result, C64};
use engine::{Engine, Factor};

/// One factor `G(z)^♯ A` of a resolvent chain, with `♯` a transpose when `transposed`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainFactor {
    pub z: C64,
    pub a: ComplexMatrix,
    pub transposed: bool,
}

impl ChainFactor {
    pub fn new(z: C64, a: ComplexMatrix) -> Self {
        ChainFactor {
            z,
            a,
            transposed: false,
        }
    }

    pub fn with_transpose(z: C64, a: ComplexMatrix) -> Self {
        ChainFactor {
            z,
            a,
            transposed: true,
        }
    }
}

/// An ordered chain `G_1^♯A_1 ... G_k^♯A_k` of common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    factors: Vec<ChainFactor>,
}

impl ChainSpec {
    /// Validates spectral parameters and dimensions.
    pub fn new(factors: Vec<ChainFactor>) -> Result<Self> {
        if let Some(first) = factors.first() {
            let n = first.a.dim();
            for f in &factors {
                SpectralPoint::new(f.z)?;
                if f.a.dim() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: f.a.dim(),
                    });
                }
            }
        }
        Ok(ChainSpec { factors })
    }

    /// The chain `G(z_1) Id ... G(z_k) Id` in dimension `n`.
    pub fn identities(zs: &[C64], n: usize) -> Result<Self> {
        Self::new(
            zs.iter()
                .map(|&z| ChainFactor::new(z, ComplexMatrix::identity(n)))
                .collect(),
        )
    }

    pub fn factors(&self) -> &[ChainFactor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Common matrix dimension, `None` for an empty chain.
    pub fn dim(&self) -> Option<usize> {
        self.factors.first().map(|f| f.a.dim())
    }

    pub fn has_transposes(&self) -> bool {
        self.factors.iter().any(|f| f.transposed)
    }

    pub fn spectral_parameters(&self) -> Vec<C64> {
        self.factors.iter().map(|f| f.z).collect()
    }
}

fn nonempty(chain: &ChainSpec) -> Result<()> {
    if chain.is_empty() {
        return Err(Error::InvalidParameter("empty chain".into()));
    }
    Ok(())
}

fn no_transposes(chain: &ChainSpec) -> Result<()> {
    if chain.has_transposes() {
        return Err(Error::InvalidParameter(
            "transposed resolvents are only supported in frak_m".into(),
        ));
    }
    Ok(())
}

/// Loads chains into an engine; factor `i` of the concatenation uses spectral index and
/// matrix index `i`.
fn load(chains: &[&ChainSpec], sigma: f64, caps: &Caps) -> Result<(Engine, Vec<Vec<Factor>>)> {
    let n = chains.iter().find_map(|c| c.dim()).unwrap_or(0);
    let mut zs = Vec::new();
    let mut mats = Vec::new();
    let mut out = Vec::new();
    for c in chains {
        if let Some(d) = c.dim() {
            if d != n {
                return Err(Error::DimensionMismatch { expected: n, got: d });
            }
        }
        let mut fs = Vec::new();
        for f in c.factors() {
            let idx = zs.len();
            zs.push(f.z);
            mats.push(f.a.clone());
            let mut factor = Factor::plain(idx, idx);
            factor.sharp = f.transposed;
            fs.push(factor);
        }
        out.push(fs);
    }
    Ok((Engine::new(n, zs, mats, sigma, *caps)?, out))
}

/// `M_S` for a chain without transposes; the matrix of the last factor is excluded.
pub fn det_matrix_m(chain: &ChainSpec, caps: &Caps) -> Result<ComplexMatrix> {
    nonempty(chain)?;
    no_transposes(chain)?;
    let (mut e, fs) = load(&[chain], 0.0, caps)?;
    e.det_m(&fs[0])
}

/// `𝔪[chain]`, reading `#` off the transpose flags.
pub fn frak_m(chain: &ChainSpec, sigma: f64, caps: &Caps) -> Result<C64> {
    nonempty(chain)?;
    let (mut e, fs) = load(&[chain], sigma, caps)?;
    e.frak_m(&fs[0])
}

fn frak_m2_with(left: &ChainSpec, right: &ChainSpec, w: SourceWeights, caps: &Caps) -> Result<C64> {
    no_transposes(left)?;
    no_transposes(right)?;
    Caps::check("frak_m2 chain length", left.len() + right.len(), caps.frak_m2)?;
    if left.is_empty() || right.is_empty() {
        return Ok(C64::new(0.0, 0.0));
    }
    let (mut e, fs) = load(&[left, right], w.inner_sigma, caps)?;
    e.frak_m2(&fs[0], &fs[1], &w)
}

/// `𝔪[left | right]` by the linear recursion with all four source terms.
pub fn frak_m2(left: &ChainSpec, right: &ChainSpec, params: &EnsembleParams, caps: &Caps) -> Result<C64> {
    frak_m2_with(left, right, SourceWeights::full(params), caps)
}

/// One additive component of `𝔪[left | right]`, without its parameter factor.
pub fn frak_m2_component(
    left: &ChainSpec,
    right: &ChainSpec,
    which: Component,
    params: &EnsembleParams,
    caps: &Caps,
) -> Result<C64> {
    frak_m2_with(left, right, SourceWeights::component(which, params), caps)
}
