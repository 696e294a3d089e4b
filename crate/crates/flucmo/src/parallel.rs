//! Parallel Monte Carlo driver; bit-identical to the sequential estimators in the core.

use flucmo_core::matrix_layer::ChainSpec;
use flucmo_core::montecarlo::{
    chain_pair_sample, check_samples, poly_pair_sample, predict_covariance, predict_poly_covariance, report,
    EstimatorReport, TolerancePolicy, WignerEnsemble,
};
use flucmo_core::{Caps, ComplexMatrix, Result};
use rayon::prelude::*;

pub fn par_estimate_covariance(
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
        .into_par_iter()
        .map(|i| chain_pair_sample(ensemble, left, right, seed, i))
        .collect::<Result<Vec<_>>>()?;
    report(predicted, &pairs, ensemble.dim(), policy)
}

pub fn par_estimate_poly_covariance(
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
        .into_par_iter()
        .map(|i| poly_pair_sample(ensemble, left, right, seed, i))
        .collect::<Result<Vec<_>>>()?;
    report(predicted, &pairs, ensemble.dim(), policy)
}
