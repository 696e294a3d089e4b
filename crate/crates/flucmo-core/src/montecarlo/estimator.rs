use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{chain_trace_cached, poly_trace, sample_rng, sample_wigner_with, ResolventCache, WignerEnsemble};
use crate::functional_cov::poly_covariance;
use crate::linalg::ComplexMatrix;
use crate::matrix_layer::{frak_m2, ChainSpec};
use crate::second_order::EnsembleParams;
use crate::{Caps, Error, Result, C64};

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 100;

/// Pass rule `|empirical - predicted| ≤ max(3·stderr + c_bias/√N, abs_floor)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    pub c_bias: f64,
    pub abs_floor: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            c_bias: 2.0,
            abs_floor: 0.02,
        }
    }
}

impl TolerancePolicy {
    pub fn new(c_bias: f64, abs_floor: f64) -> Result<Self> {
        for (name, v) in [("c_bias", c_bias), ("abs_floor", abs_floor)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(alloc::format!("{name} = {v}")));
            }
        }
        Ok(TolerancePolicy { c_bias, abs_floor })
    }

    pub fn tolerance(&self, standard_error: f64, n: usize) -> f64 {
        (3.0 * standard_error + self.c_bias / (n as f64).sqrt()).max(self.abs_floor)
    }
}

/// Outcome of one covariance experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub predicted: C64,
    pub empirical: C64,
    pub standard_error: f64,
    pub samples: usize,
    pub dimension: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl EstimatorReport {
    pub fn deviation(&self) -> f64 {
        (self.empirical - self.predicted).norm()
    }
}

/// `N² · mean(X_L X_R)` with sample-mean centering, its jackknife standard error and the
/// verdict under `policy`.
pub fn report(predicted: C64, pairs: &[(C64, C64)], n: usize, policy: &TolerancePolicy) -> Result<EstimatorReport> {
    let count = pairs.len();
    if count < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            min: MIN_SAMPLES,
            got: count,
        });
    }
    let c = count as f64;
    let (mean_a, mean_b) = pairs
        .iter()
        .fold((C64::default(), C64::default()), |(sa, sb), (a, b)| (sa + a, sb + b));
    let (mean_a, mean_b) = (mean_a / c, mean_b / c);
    // covariance is shift invariant; centering first avoids cancellation
    let centered: Vec<(C64, C64)> = pairs.iter().map(|(a, b)| (a - mean_a, b - mean_b)).collect();
    let sab: C64 = centered.iter().map(|(a, b)| a * b).sum();
    let n2 = (n * n) as f64;
    let empirical = sab / c * n2;
    let leave_one_out: Vec<C64> = centered
        .iter()
        .map(|(a, b)| ((sab - a * b) / (c - 1.0) - a * b / ((c - 1.0) * (c - 1.0))) * n2)
        .collect();
    let mean_loo: C64 = leave_one_out.iter().sum::<C64>() / c;
    let spread: f64 = leave_one_out.iter().map(|t| (t - mean_loo).norm_sqr()).sum();
    let standard_error = ((c - 1.0) / c * spread).sqrt();
    let tolerance = policy.tolerance(standard_error, n);
    Ok(EstimatorReport {
        predicted,
        empirical,
        standard_error,
        samples: count,
        dimension: n,
        tolerance,
        pass: (empirical - predicted).norm() <= tolerance,
    })
}

/// Chain traces of both sides for sample `index`.
pub fn chain_pair_sample(
    ensemble: &WignerEnsemble,
    left: &ChainSpec,
    right: &ChainSpec,
    seed: u64,
    index: u64,
) -> Result<(C64, C64)> {
    let w = sample_wigner_with(ensemble, &mut sample_rng(seed, index));
    let mut cache = ResolventCache::default();
    Ok((
        chain_trace_cached(&w, left, &mut cache)?,
        chain_trace_cached(&w, right, &mut cache)?,
    ))
}

/// `⟨WA₁…WA_k⟩` of both sides for sample `index`.
pub fn poly_pair_sample(
    ensemble: &WignerEnsemble,
    left: &[ComplexMatrix],
    right: &[ComplexMatrix],
    seed: u64,
    index: u64,
) -> Result<(C64, C64)> {
    let w = sample_wigner_with(ensemble, &mut sample_rng(seed, index));
    Ok((poly_trace(&w, left)?, poly_trace(&w, right)?))
}

/// Rejects runs below [`MIN_SAMPLES`].
pub fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            min: MIN_SAMPLES,
            got: samples,
        });
    }
    Ok(())
}

/// `𝔪[left|right]` for the ensemble's parameters.
pub fn predict_covariance(ensemble: &WignerEnsemble, left: &ChainSpec, right: &ChainSpec, caps: &Caps) -> Result<C64> {
    frak_m2(left, right, &ensemble.params()?, caps)
}

/// The annular pairing sum; defined for GUE-type ensembles only.
pub fn predict_poly_covariance(
    ensemble: &WignerEnsemble,
    left: &[ComplexMatrix],
    right: &[ComplexMatrix],
    caps: &Caps,
) -> Result<C64> {
    if ensemble.params()? != EnsembleParams::GUE {
        return Err(Error::InvalidParameter(
            "polynomial covariance is only predicted for GUE-type ensembles".into(),
        ));
    }
    poly_covariance(left, right, caps)
}

/// Resolvent chain covariance against [`predict_covariance`].
pub fn estimate_covariance(
    ensemble: &WignerEnsemble,
    left: &ChainSpec,
    right: &ChainSpec,
    samples: usize,
    seed: u64,
    policy: &TolerancePolicy,
    caps: &Caps,
) -> Result<EstimatorReport> {
    check_samples(samples)?;
    let predicted = predict_covariance(ensemble, left, right, caps)?;
    let pairs = (0..samples as u64)
        .map(|i| chain_pair_sample(ensemble, left, right, seed, i))
        .collect::<Result<Vec<_>>>()?;
    report(predicted, &pairs, ensemble.dim(), policy)
}

/// Polynomial chain covariance against [`predict_poly_covariance`].
pub fn estimate_poly_covariance(
    ensemble: &WignerEnsemble,
    left: &[ComplexMatrix],
    right: &[ComplexMatrix],
    samples: usize,
    seed: u64,
    policy: &TolerancePolicy,
    caps: &Caps,
) -> Result<EstimatorReport> {
    check_samples(samples)?;
    let predicted = predict_poly_covariance(ensemble, left, right, caps)?;
    let pairs = (0..samples as u64)
        .map(|i| poly_pair_sample(ensemble, left, right, seed, i))
        .collect::<Result<Vec<_>>>()?;
    report(predicted, &pairs, ensemble.dim(), policy)
}
