//! Scalar second-order layer: the set function `m[·|·]`, its four-way decomposition,
//! second-order free cumulants and the good-graph multiset.

mod cumulant;
mod good_graphs;
mod scalar;

pub use cumulant::second_cumulant;
pub use good_graphs::{good_graphs, m2_graph_formula};
pub(crate) use cumulant::{gue_second_cumulants, SecondCumulants};
pub use scalar::ScalarSecondOrder;

use alloc::vec::Vec;
use core::str::FromStr;

use crate::semicircle::SpectralPoint;
use crate::{Caps, Error, Result, C64};

/// Ensemble parameters `(κ₄, σ, ω̃₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleParams {
    kappa4: f64,
    sigma: f64,
    omega2_tilde: f64,
}

impl EnsembleParams {
    pub const GUE: EnsembleParams = EnsembleParams {
        kappa4: 0.0,
        sigma: 0.0,
        omega2_tilde: 0.0,
    };

    /// Validates `σ ∈ [-1, 1]` and `ω̃₂ ≥ -2`.
    pub fn new(kappa4: f64, sigma: f64, omega2_tilde: f64) -> Result<Self> {
        if !kappa4.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("kappa4 = {kappa4}")));
        }
        if !(-1.0..=1.0).contains(&sigma) {
            return Err(Error::InvalidParameter(alloc::format!("sigma = {sigma} outside [-1, 1]")));
        }
        if !omega2_tilde.is_finite() || omega2_tilde < -2.0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "omega2_tilde = {omega2_tilde} below -2"
            )));
        }
        Ok(EnsembleParams {
            kappa4,
            sigma,
            omega2_tilde,
        })
    }

    pub fn kappa4(&self) -> f64 {
        self.kappa4
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn omega2_tilde(&self) -> f64 {
        self.omega2_tilde
    }

    /// Coefficient of a component in the decomposition.
    pub fn coefficient(&self, which: Component) -> f64 {
        match which {
            Component::Gue => 1.0,
            Component::Kappa => self.kappa4,
            Component::Sigma => self.sigma,
            Component::Omega => self.omega2_tilde,
        }
    }
}

/// The additive components `GUE`, `κ`, `σ`, `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Gue,
    Kappa,
    Sigma,
    Omega,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::Gue,
        Component::Kappa,
        Component::Sigma,
        Component::Omega,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::Gue => "gue",
            Component::Kappa => "kappa",
            Component::Sigma => "sigma",
            Component::Omega => "omega",
        }
    }
}

impl FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gue" => Ok(Component::Gue),
            "kappa" => Ok(Component::Kappa),
            "sigma" => Ok(Component::Sigma),
            "omega" => Ok(Component::Omega),
            other => Err(Error::InvalidParameter(alloc::format!("unknown component {other}"))),
        }
    }
}

/// Source-term weights of one recursion run: `(GUE, κ, σ, ω)` plus the `σ` used inside
/// `m^{#,σ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SourceWeights {
    pub gue: f64,
    pub kappa: f64,
    pub sigma: f64,
    pub omega: f64,
    pub inner_sigma: f64,
}

impl SourceWeights {
    pub fn full(p: &EnsembleParams) -> Self {
        SourceWeights {
            gue: 1.0,
            kappa: p.kappa4,
            sigma: p.sigma,
            omega: p.omega2_tilde,
            inner_sigma: p.sigma,
        }
    }

    /// One-hot weights; the component is the recursion solution with the parameter
    /// factor of its source term removed.
    pub fn component(which: Component, p: &EnsembleParams) -> Self {
        let mut w = SourceWeights {
            gue: 0.0,
            kappa: 0.0,
            sigma: 0.0,
            omega: 0.0,
            inner_sigma: p.sigma,
        };
        match which {
            Component::Gue => w.gue = 1.0,
            Component::Kappa => w.kappa = 1.0,
            Component::Sigma => w.sigma = 1.0,
            Component::Omega => w.omega = 1.0,
        }
        w
    }
}

/// Arguments of `m[z_1..z_k | z_{k+1}..z_{k+l}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderArgs {
    pub left: Vec<C64>,
    pub right: Vec<C64>,
    pub params: EnsembleParams,
}

impl SecondOrderArgs {
    pub fn new(left: Vec<C64>, right: Vec<C64>, params: EnsembleParams) -> Result<Self> {
        for &z in left.iter().chain(&right) {
            SpectralPoint::new(z)?;
        }
        Ok(SecondOrderArgs { left, right, params })
    }
}

/// `m[left | right]` from the defining recursion with all four source terms.
pub fn m2(args: &SecondOrderArgs, caps: &Caps) -> Result<C64> {
    ScalarSecondOrder::new(SourceWeights::full(&args.params), *caps).m2(&args.left, &args.right)
}

/// One additive component of `m[·|·]`.
pub fn m2_component(args: &SecondOrderArgs, which: Component, caps: &Caps) -> Result<C64> {
    ScalarSecondOrder::new(SourceWeights::component(which, &args.params), *caps)
        .m2(&args.left, &args.right)
}
