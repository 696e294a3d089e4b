//! JSON experiment files.

use std::collections::BTreeMap;
use std::path::Path;

use flucmo_core::matrix_layer::{ChainFactor, ChainSpec};
use flucmo_core::montecarlo::{DiagonalLaw, EnsembleName, OffDiagonalLaw, TolerancePolicy, WignerEnsemble};
use flucmo_core::second_order::EnsembleParams;
use flucmo_core::{Caps, ComplexMatrix, C64};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::caps::set_cap;
use crate::error::{CliError, CliResult};
use crate::format::parse_complex;

/// A matrix entry: a real number, `[re, im]`, or an `a+bi` string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum EntrySpec {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

impl EntrySpec {
    fn value(&self) -> CliResult<C64> {
        match self {
            EntrySpec::Real(x) => Ok(C64::new(*x, 0.0)),
            EntrySpec::Pair([re, im]) => Ok(C64::new(*re, *im)),
            EntrySpec::Text(s) => parse_complex(s).map_err(CliError::Schema),
        }
    }
}

/// `"id"`, `"zero"`, `"random"` (unit spectral norm) or explicit rows.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Keyword(String),
    Rows(Vec<Vec<EntrySpec>>),
}

impl Default for MatrixSpec {
    fn default() -> Self {
        MatrixSpec::Keyword("id".into())
    }
}

impl MatrixSpec {
    pub fn resolve(&self, n: usize, rng: &mut ChaCha8Rng) -> CliResult<ComplexMatrix> {
        match self {
            MatrixSpec::Keyword(k) => match k.to_ascii_lowercase().as_str() {
                "id" | "identity" => Ok(ComplexMatrix::identity(n)),
                "zero" => Ok(ComplexMatrix::zeros(n)),
                "random" => Ok(ComplexMatrix::random_unit_norm(n, rng)),
                other => Err(CliError::Schema(format!("unknown matrix keyword {other:?}"))),
            },
            MatrixSpec::Rows(rows) => {
                if rows.len() != n {
                    return Err(CliError::Schema(format!("matrix has {} rows, expected {n}", rows.len())));
                }
                let rows = rows
                    .iter()
                    .map(|r| r.iter().map(EntrySpec::value).collect::<CliResult<Vec<_>>>())
                    .collect::<CliResult<Vec<_>>>()?;
                Ok(ComplexMatrix::from_rows(rows)?)
            }
        }
    }
}

/// One factor `G(z)^♯ A` of a chain.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub z: String,
    #[serde(default)]
    pub a: MatrixSpec,
    #[serde(default)]
    pub transposed: bool,
}

fn resolve_chain(factors: &[FactorSpec], n: usize, rng: &mut ChaCha8Rng) -> CliResult<ChainSpec> {
    let factors = factors
        .iter()
        .map(|f| {
            let z = parse_complex(&f.z).map_err(CliError::Schema)?;
            let a = f.a.resolve(n, rng)?;
            Ok(if f.transposed {
                ChainFactor::with_transpose(z, a)
            } else {
                ChainFactor::new(z, a)
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(ChainSpec::new(factors)?)
}

/// Diagonal law: `"rademacher"`, `"zero"` or `{"gaussian": variance}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DiagonalSpec {
    Named(String),
    Gaussian { gaussian: f64 },
}

/// A named ensemble or explicit entry laws.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum EnsembleSpec {
    Named(String),
    Custom { off_diagonal: String, diagonal: DiagonalSpec },
}

impl EnsembleSpec {
    pub fn resolve(&self, n: usize) -> CliResult<WignerEnsemble> {
        match self {
            EnsembleSpec::Named(name) => Ok(WignerEnsemble::named(name.parse::<EnsembleName>()?, n)?),
            EnsembleSpec::Custom { off_diagonal, diagonal } => {
                let off = match off_diagonal.to_ascii_lowercase().as_str() {
                    "complex-gaussian" => OffDiagonalLaw::ComplexGaussian,
                    "real-gaussian" => OffDiagonalLaw::RealGaussian,
                    "complex-bernoulli" => OffDiagonalLaw::ComplexBernoulli,
                    "real-bernoulli" => OffDiagonalLaw::RealBernoulli,
                    other => return Err(CliError::Schema(format!("unknown off-diagonal law {other:?}"))),
                };
                let diag = match diagonal {
                    DiagonalSpec::Gaussian { gaussian } => DiagonalLaw::Gaussian(*gaussian),
                    DiagonalSpec::Named(s) => match s.to_ascii_lowercase().as_str() {
                        "rademacher" => DiagonalLaw::Rademacher,
                        "zero" => DiagonalLaw::Zero,
                        other => return Err(CliError::Schema(format!("unknown diagonal law {other:?}"))),
                    },
                };
                Ok(WignerEnsemble::custom(n, off, diag)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default = "default_c_bias")]
    pub c_bias: f64,
    #[serde(default = "default_abs_floor")]
    pub abs_floor: f64,
}

fn default_c_bias() -> f64 {
    TolerancePolicy::default().c_bias
}

fn default_abs_floor() -> f64 {
    TolerancePolicy::default().abs_floor
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec {
            c_bias: default_c_bias(),
            abs_floor: default_abs_floor(),
        }
    }
}

impl ToleranceSpec {
    pub fn policy(&self) -> CliResult<TolerancePolicy> {
        Ok(TolerancePolicy::new(self.c_bias, self.abs_floor)?)
    }
}

fn apply_caps(caps: &mut Caps, overrides: &BTreeMap<String, usize>) -> CliResult<()> {
    overrides.iter().try_for_each(|(k, v)| set_cap(caps, k, *v))
}

/// `mc covariance` experiment.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceConfig {
    pub ensemble: EnsembleSpec,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// Seed for `"random"` matrices; defaults to `seed`.
    #[serde(default)]
    pub matrix_seed: Option<u64>,
    pub left: Vec<FactorSpec>,
    pub right: Vec<FactorSpec>,
    #[serde(default)]
    pub tolerance: ToleranceSpec,
    #[serde(default)]
    pub caps: BTreeMap<String, usize>,
}

/// Resolved `mc covariance` experiment.
#[derive(Debug, Clone)]
pub struct CovarianceExperiment {
    pub ensemble: WignerEnsemble,
    pub left: ChainSpec,
    pub right: ChainSpec,
    pub samples: usize,
    pub seed: u64,
    pub policy: TolerancePolicy,
}

impl CovarianceConfig {
    pub fn resolve(&self, caps: &mut Caps) -> CliResult<CovarianceExperiment> {
        apply_caps(caps, &self.caps)?;
        let ensemble = self.ensemble.resolve(self.n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.matrix_seed.unwrap_or(self.seed));
        Ok(CovarianceExperiment {
            ensemble,
            left: resolve_chain(&self.left, self.n, &mut rng)?,
            right: resolve_chain(&self.right, self.n, &mut rng)?,
            samples: self.samples,
            seed: self.seed,
            policy: self.tolerance.policy()?,
        })
    }
}

/// `mc poly` experiment.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyConfig {
    #[serde(default = "default_ensemble")]
    pub ensemble: EnsembleSpec,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub matrix_seed: Option<u64>,
    pub left: Vec<MatrixSpec>,
    pub right: Vec<MatrixSpec>,
    #[serde(default)]
    pub tolerance: ToleranceSpec,
    #[serde(default)]
    pub caps: BTreeMap<String, usize>,
}

fn default_ensemble() -> EnsembleSpec {
    EnsembleSpec::Named("GUE".into())
}

/// Resolved `mc poly` experiment.
#[derive(Debug, Clone)]
pub struct PolyExperiment {
    pub ensemble: WignerEnsemble,
    pub left: Vec<ComplexMatrix>,
    pub right: Vec<ComplexMatrix>,
    pub samples: usize,
    pub seed: u64,
    pub policy: TolerancePolicy,
}

impl PolyConfig {
    pub fn resolve(&self, caps: &mut Caps) -> CliResult<PolyExperiment> {
        apply_caps(caps, &self.caps)?;
        let ensemble = self.ensemble.resolve(self.n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.matrix_seed.unwrap_or(self.seed));
        let mut mats = |specs: &[MatrixSpec]| {
            specs
                .iter()
                .map(|m| m.resolve(self.n, &mut rng))
                .collect::<CliResult<Vec<_>>>()
        };
        let left = mats(&self.left)?;
        let right = mats(&self.right)?;
        Ok(PolyExperiment {
            ensemble,
            left,
            right,
            samples: self.samples,
            seed: self.seed,
            policy: self.tolerance.policy()?,
        })
    }
}

/// Chains for `eval frakm | frakm2 | closed-gue | closed-sigma`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub n: usize,
    #[serde(default)]
    pub matrix_seed: u64,
    pub left: Vec<FactorSpec>,
    #[serde(default)]
    pub right: Vec<FactorSpec>,
    #[serde(default)]
    pub kappa4: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub omega2_tilde: f64,
}

impl ChainConfig {
    pub fn resolve(&self) -> CliResult<(ChainSpec, ChainSpec, EnsembleParams)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.matrix_seed);
        let left = resolve_chain(&self.left, self.n, &mut rng)?;
        let right = resolve_chain(&self.right, self.n, &mut rng)?;
        Ok((left, right, EnsembleParams::new(self.kappa4, self.sigma, self.omega2_tilde)?))
    }
}

/// Reads and schema-checks a JSON file.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariance_config_round_trip() {
        let text = r#"{
            "ensemble": "GOE", "n": 6, "samples": 100, "seed": 3,
            "left": [{"z": "0+2i"}],
            "right": [{"z": "1-1i", "a": "random", "transposed": true}],
            "tolerance": {"c_bias": 1.0},
            "caps": {"frak_m2": 4}
        }"#;
        let cfg: CovarianceConfig = serde_json::from_str(text).unwrap();
        let mut caps = Caps::default();
        let exp = cfg.resolve(&mut caps).unwrap();
        assert_eq!(caps.frak_m2, 4);
        assert_eq!(exp.ensemble.name(), EnsembleName::Goe);
        assert!(exp.right.has_transposes());
        assert_eq!(exp.policy, TolerancePolicy::new(1.0, 0.02).unwrap());
    }

    #[test]
    fn schema_violations() {
        assert!(serde_json::from_str::<CovarianceConfig>(r#"{"n": 4}"#).is_err());
        let bad_field = r#"{"ensemble": "GUE", "n": 4, "samples": 100, "seed": 1, "left": [], "right": [], "extra": 1}"#;
        assert!(serde_json::from_str::<CovarianceConfig>(bad_field).is_err());
        let m: MatrixSpec = serde_json::from_str(r#"[[1, [0, 1]], ["2-1i", 0]]"#).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = m.resolve(2, &mut rng).unwrap();
        assert_eq!(a.get(0, 1), C64::new(0.0, 1.0));
        assert_eq!(a.get(1, 0), C64::new(2.0, -1.0));
        assert!(m.resolve(3, &mut rng).is_err());
        assert!(MatrixSpec::Keyword("ones".into()).resolve(2, &mut rng).is_err());
    }

    #[test]
    fn custom_ensemble() {
        let e: EnsembleSpec = serde_json::from_str(r#"{"off_diagonal": "real-bernoulli", "diagonal": {"gaussian": 2.0}}"#).unwrap();
        let p = e.resolve(4).unwrap().params().unwrap();
        assert_eq!(p, EnsembleParams::new(-1.0, 1.0, 0.0).unwrap());
        let e: EnsembleSpec = serde_json::from_str(r#""zero-diagonal-GUE""#).unwrap();
        assert_eq!(e.resolve(4).unwrap().name(), EnsembleName::ZeroDiagonalGue);
    }
}
