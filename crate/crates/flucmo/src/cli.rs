//! Command-line interface: `enumerate`, `eval`, `validate` and `mc`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use flucmo_core::functional_cov::{kernel_u, sc_second, MonomialSpec, QuadratureConfig};
use flucmo_core::matrix_layer::{
    closed_frak_m2_gue, closed_frak_m2_sigma, closed_frak_m2_sigma_literal, frak_m, frak_m2, frak_m2_component,
    ChainSpec,
};
use flucmo_core::montecarlo::{EstimatorReport, WignerEnsemble};
use flucmo_core::ncgeom::{
    annular_pairings, enumerate_annular_ncp, enumerate_marked, enumerate_ncg, enumerate_ncp, AnnulusShape,
};
use flucmo_core::second_order::{good_graphs, m2, m2_component, Component, EnsembleParams, SecondOrderArgs};
use flucmo_core::semicircle::{divided_difference, free_cumulant, m_sharp, SharpVector};
use flucmo_core::{Caps, C64};
use serde_json::{json, Value};

use crate::caps::resolve_caps;
use crate::config::{read_json, ChainConfig, CovarianceConfig, PolyConfig};
use crate::error::{CliError, CliResult};
use crate::format::{parse_complex, round_sig, JsonComplex};
use crate::parallel::{par_estimate_covariance, par_estimate_poly_covariance};
use crate::validate::{identities, oracle, CheckOutcome};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "flucmo", version, about = "Fluctuation moments of Wigner resolvent chains")]
pub struct Cli {
    /// Cap overrides `name=value,...`; applied after FLUCMO_CAPS
    #[arg(long, global = true)]
    caps: Option<String>,
    /// Write the JSON result here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Also write a CSV table here
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List combinatorial objects
    #[command(subcommand)]
    Enumerate(EnumerateCmd),
    /// Evaluate one formula
    #[command(subcommand)]
    Eval(EvalCmd),
    /// Run self-check suites; exit 1 on any failure
    #[command(subcommand)]
    Validate(ValidateCmd),
    /// Monte Carlo covariance experiments; exit 1 on a failed verdict
    #[command(subcommand)]
    Mc(McCmd),
}

#[derive(Debug, Args)]
struct DiskSize {
    #[arg(long)]
    n: usize,
}

#[derive(Debug, Args)]
struct Shape {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
}

#[derive(Debug, Subcommand)]
enum EnumerateCmd {
    /// Non-crossing partitions of 1..n
    Ncp(DiskSize),
    /// Non-crossing permutations of the (k, l)-annulus
    Anc(Shape),
    /// Marked partition pairs of the (k, l)-annulus
    Marked(Shape),
    /// Disk non-crossing graphs on 1..n
    Ncg {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        connected: bool,
    },
    /// The good-graph multiset of the (k, l)-annulus
    GoodGraphs(Shape),
    /// Non-crossing annular pairings
    Pairings(Shape),
}

#[derive(Debug, Args)]
struct Params {
    #[arg(long, allow_hyphen_values = true)]
    kappa4: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
}

#[derive(Debug, Args)]
struct Chains {
    /// Chain file with matrices; otherwise identity matrices of size --n
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    left: Vec<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    right: Vec<String>,
    #[arg(long, default_value_t = 4)]
    n: usize,
}

#[derive(Debug, Subcommand)]
enum EvalCmd {
    /// Divided difference m[z_1, ..., z_k]
    M {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z: Vec<String>,
    },
    /// First-order free cumulant
    Mcirc {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z: Vec<String>,
    },
    /// Mixed-transpose divided difference
    Msharp {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z: Vec<String>,
        /// One 0/1 flag per point
        #[arg(long, value_delimiter = ',', required = true)]
        sharp: Vec<u8>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        sigma: f64,
    },
    /// Scalar second-order function
    M2 {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        left: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        right: Vec<String>,
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        component: Option<String>,
    },
    /// Deterministic approximation of one chain
    Frakm {
        #[command(flatten)]
        chains: Chains,
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<f64>,
    },
    /// Second-order function of two chains
    Frakm2 {
        #[command(flatten)]
        chains: Chains,
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        component: Option<String>,
    },
    /// Closed annular expansion of the GUE part
    ClosedGue {
        #[command(flatten)]
        chains: Chains,
    },
    /// Closed expansion of the sigma contribution
    ClosedSigma {
        #[command(flatten)]
        chains: Chains,
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<f64>,
        /// Use the literal Kreweras reading instead of the corrected one
        #[arg(long)]
        literal: bool,
    },
    /// Covariance kernel u(x, y)
    Kernel {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
    },
    /// Semicircle second-order functional of monomials
    Sc2 {
        #[arg(long, value_delimiter = ',', required = true)]
        left: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        right: Vec<u32>,
        #[arg(long, default_value_t = 128)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
}

#[derive(Debug, Subcommand)]
enum ValidateCmd {
    /// Combinatorial invariants and exact identities
    Identities,
    /// Dual-path numerical agreement on random draws
    Oracle {
        #[arg(long, default_value_t = 5)]
        draws: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
enum McCmd {
    /// Resolvent chain covariance from a JSON experiment file
    Covariance {
        #[arg(long)]
        config: PathBuf,
    },
    /// Polynomial chain covariance from a JSON experiment file
    Poly {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Result of one command before it is written out.
struct Outcome {
    json: Value,
    table: Vec<Vec<String>>,
    ok: bool,
}

impl Outcome {
    fn value(command: &str, v: C64) -> Self {
        let j = JsonComplex::from(v);
        Outcome {
            json: json!({ "command": command, "value": j }),
            table: vec![
                vec!["command".into(), "re".into(), "im".into()],
                vec![command.into(), j.re.to_string(), j.im.to_string()],
            ],
            ok: true,
        }
    }

    fn real(command: &str, v: f64) -> Self {
        let v = round_sig(v);
        Outcome {
            json: json!({ "command": command, "value": v }),
            table: vec![vec!["command".into(), "value".into()], vec![command.into(), v.to_string()]],
            ok: true,
        }
    }

    fn items(items: Vec<Value>) -> Self {
        let mut table = vec![vec!["index".into(), "item".into()]];
        table.extend(items.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.to_string()]));
        Outcome {
            json: Value::Array(items),
            table,
            ok: true,
        }
    }

    fn checks(command: &str, checks: Vec<CheckOutcome>) -> Self {
        let ok = checks.iter().all(|c| c.pass);
        let mut table = vec![vec!["check".into(), "pass".into(), "detail".into()]];
        table.extend(checks.iter().map(|c| vec![c.check.clone(), c.pass.to_string(), c.detail.clone()]));
        Outcome {
            json: json!({ "command": command, "pass": ok, "checks": checks }),
            table,
            ok,
        }
    }

    fn report(command: &str, ensemble: &WignerEnsemble, seed: u64, r: &EstimatorReport) -> CliResult<Self> {
        let p = ensemble.params()?;
        let verdict = if r.pass { "pass" } else { "fail" };
        let json = json!({
            "command": command,
            "version": VERSION,
            "ensemble": ensemble.name().as_str(),
            "n": r.dimension,
            "samples": r.samples,
            "seed": seed,
            "params": {
                "kappa4": round_sig(p.kappa4()),
                "sigma": round_sig(p.sigma()),
                "omega2_tilde": round_sig(p.omega2_tilde()),
            },
            "predicted": JsonComplex::from(r.predicted),
            "empirical": JsonComplex::from(r.empirical),
            "standard_error": round_sig(r.standard_error),
            "deviation": round_sig(r.deviation()),
            "tolerance": round_sig(r.tolerance),
            "verdict": verdict,
        });
        let header = [
            "command", "ensemble", "n", "samples", "seed", "predicted_re", "predicted_im", "empirical_re",
            "empirical_im", "standard_error", "deviation", "tolerance", "verdict",
        ];
        let (pr, em) = (JsonComplex::from(r.predicted), JsonComplex::from(r.empirical));
        let row = vec![
            command.to_string(),
            ensemble.name().as_str().to_string(),
            r.dimension.to_string(),
            r.samples.to_string(),
            seed.to_string(),
            pr.re.to_string(),
            pr.im.to_string(),
            em.re.to_string(),
            em.im.to_string(),
            round_sig(r.standard_error).to_string(),
            round_sig(r.deviation()).to_string(),
            round_sig(r.tolerance).to_string(),
            verdict.to_string(),
        ];
        Ok(Outcome {
            json,
            table: vec![header.iter().map(|s| s.to_string()).collect(), row],
            ok: r.pass,
        })
    }
}

fn zs(values: &[String]) -> CliResult<Vec<C64>> {
    values.iter().map(|s| parse_complex(s).map_err(CliError::Usage)).collect()
}

fn component(name: &Option<String>) -> CliResult<Option<Component>> {
    name.as_deref().map(|s| s.parse::<Component>().map_err(CliError::from)).transpose()
}

fn params(p: &Params, base: Option<EnsembleParams>) -> CliResult<EnsembleParams> {
    let base = base.unwrap_or(EnsembleParams::GUE);
    Ok(EnsembleParams::new(
        p.kappa4.unwrap_or(base.kappa4()),
        p.sigma.unwrap_or(base.sigma()),
        p.omega.unwrap_or(base.omega2_tilde()),
    )?)
}

/// Chains and the parameters stored with them, if read from a file.
fn chains(c: &Chains) -> CliResult<(ChainSpec, ChainSpec, Option<EnsembleParams>)> {
    if let Some(path) = &c.config {
        if !c.left.is_empty() || !c.right.is_empty() {
            return Err(CliError::Usage("--config cannot be combined with --left/--right".into()));
        }
        let (l, r, p) = read_json::<ChainConfig>(path)?.resolve()?;
        return Ok((l, r, Some(p)));
    }
    if c.left.is_empty() {
        return Err(CliError::Usage("either --config or --left is required".into()));
    }
    Ok((ChainSpec::identities(&zs(&c.left)?, c.n)?, ChainSpec::identities(&zs(&c.right)?, c.n)?, None))
}

fn require_right(r: &ChainSpec) -> CliResult<()> {
    if r.is_empty() {
        return Err(CliError::Usage("the right chain is empty".into()));
    }
    Ok(())
}

fn enumerate(cmd: &EnumerateCmd, caps: &Caps) -> CliResult<Outcome> {
    let items: Vec<Value> = match cmd {
        EnumerateCmd::Ncp(d) => {
            if d.n > caps.partitions {
                return Err(flucmo_core::Error::CapExceeded {
                    what: "non-crossing partitions",
                    size: d.n,
                    cap: caps.partitions,
                }
                .into());
            }
            enumerate_ncp(&(1..=d.n).collect::<Vec<_>>())?
                .iter()
                .map(|p| json!(p.blocks()))
                .collect()
        }
        EnumerateCmd::Anc(s) => enumerate_annular_ncp(AnnulusShape::new(s.k, s.l), caps)?
            .iter()
            .map(|p| json!(p.cycles()))
            .collect(),
        EnumerateCmd::Pairings(s) => annular_pairings(AnnulusShape::new(s.k, s.l), caps)?
            .iter()
            .map(|p| json!(p.cycles()))
            .collect(),
        EnumerateCmd::Marked(s) => enumerate_marked(AnnulusShape::new(s.k, s.l), caps)?
            .iter()
            .map(|m| {
                json!({
                    "left": m.left.blocks(),
                    "right": m.right.blocks(),
                    "marked": [&m.left.blocks()[m.marked_left], &m.right.blocks()[m.marked_right]],
                })
            })
            .collect(),
        EnumerateCmd::Ncg { n, connected } => enumerate_ncg(&(1..=*n).collect::<Vec<_>>(), *connected, None, caps)?
            .iter()
            .map(|g| json!(g.edges().map(|((a, b), _)| [a, b]).collect::<Vec<_>>()))
            .collect(),
        EnumerateCmd::GoodGraphs(s) => good_graphs(AnnulusShape::new(s.k, s.l), caps)?
            .iter()
            .map(|(g, c)| {
                json!({
                    "edges": g.edges().map(|((a, b), m)| [a, b, m as usize]).collect::<Vec<_>>(),
                    "multiplicity": c,
                })
            })
            .collect(),
    };
    Ok(Outcome::items(items))
}

fn eval(cmd: &EvalCmd, caps: &Caps) -> CliResult<Outcome> {
    Ok(match cmd {
        EvalCmd::M { z } => Outcome::value("eval m", divided_difference(&zs(z)?, caps)?),
        EvalCmd::Mcirc { z } => Outcome::value("eval mcirc", free_cumulant(&zs(z)?, caps)?),
        EvalCmd::Msharp { z, sharp, sigma } => {
            if let Some(bad) = sharp.iter().find(|&&b| b > 1) {
                return Err(CliError::Usage(format!("--sharp flags must be 0 or 1, got {bad}")));
            }
            let flags = SharpVector(sharp.iter().map(|&b| b == 1).collect());
            Outcome::value("eval msharp", m_sharp(&zs(z)?, &flags, *sigma, caps)?)
        }
        EvalCmd::M2 {
            left,
            right,
            params: p,
            component: c,
        } => {
            let args = SecondOrderArgs::new(zs(left)?, zs(right)?, params(p, None)?)?;
            let v = match component(c)? {
                Some(which) => m2_component(&args, which, caps)?,
                None => m2(&args, caps)?,
            };
            Outcome::value("eval m2", v)
        }
        EvalCmd::Frakm { chains: c, sigma } => {
            let (l, _, stored) = chains(c)?;
            let sigma = sigma.or(stored.map(|p| p.sigma())).unwrap_or(0.0);
            Outcome::value("eval frakm", frak_m(&l, sigma, caps)?)
        }
        EvalCmd::Frakm2 {
            chains: c,
            params: p,
            component: which,
        } => {
            let (l, r, stored) = chains(c)?;
            require_right(&r)?;
            let p = params(p, stored)?;
            let v = match component(which)? {
                Some(which) => frak_m2_component(&l, &r, which, &p, caps)?,
                None => frak_m2(&l, &r, &p, caps)?,
            };
            Outcome::value("eval frakm2", v)
        }
        EvalCmd::ClosedGue { chains: c } => {
            let (l, r, _) = chains(c)?;
            require_right(&r)?;
            Outcome::value("eval closed-gue", closed_frak_m2_gue(&l, &r, caps)?)
        }
        EvalCmd::ClosedSigma {
            chains: c,
            sigma,
            literal,
        } => {
            let (l, r, stored) = chains(c)?;
            require_right(&r)?;
            let sigma = sigma.or(stored.map(|p| p.sigma())).unwrap_or(0.0);
            let v = if *literal {
                closed_frak_m2_sigma_literal(&l, &r, sigma, caps)?
            } else {
                closed_frak_m2_sigma(&l, &r, sigma, caps)?
            };
            Outcome::value("eval closed-sigma", v)
        }
        EvalCmd::Kernel { x, y } => Outcome::real("eval kernel", kernel_u(*x, *y)?),
        EvalCmd::Sc2 {
            left,
            right,
            nodes,
            tolerance,
        } => {
            let cfg = QuadratureConfig::new(*nodes, QuadratureConfig::default().offset, *tolerance)?;
            let v = sc_second(&MonomialSpec::new(left.clone()), &MonomialSpec::new(right.clone()), &cfg)?;
            Outcome::real("eval sc2", v)
        }
    })
}

fn mc(cmd: &McCmd, caps: &mut Caps) -> CliResult<(Outcome, u64)> {
    match cmd {
        McCmd::Covariance { config } => {
            let exp = read_json::<CovarianceConfig>(config)?.resolve(caps)?;
            log::info!(
                "mc covariance: ensemble {} N {} samples {} seed {}",
                exp.ensemble.name(),
                exp.ensemble.dim(),
                exp.samples,
                exp.seed
            );
            let r = par_estimate_covariance(&exp.ensemble, &exp.left, &exp.right, exp.samples, exp.seed, &exp.policy, caps)?;
            Ok((Outcome::report("mc covariance", &exp.ensemble, exp.seed, &r)?, exp.seed))
        }
        McCmd::Poly { config } => {
            let exp = read_json::<PolyConfig>(config)?.resolve(caps)?;
            log::info!(
                "mc poly: ensemble {} N {} samples {} seed {}",
                exp.ensemble.name(),
                exp.ensemble.dim(),
                exp.samples,
                exp.seed
            );
            let r =
                par_estimate_poly_covariance(&exp.ensemble, &exp.left, &exp.right, exp.samples, exp.seed, &exp.policy, caps)?;
            Ok((Outcome::report("mc poly", &exp.ensemble, exp.seed, &r)?, exp.seed))
        }
    }
}

fn write_csv(path: &Path, table: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in table {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(path: Option<&Path>, json: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(json).map_err(|e| CliError::Output(e.into()))?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn execute(cli: &Cli) -> CliResult<bool> {
    let mut caps = resolve_caps(cli.caps.as_deref())?;
    let (outcome, seed) = match &cli.command {
        Command::Enumerate(cmd) => (enumerate(cmd, &caps)?, None),
        Command::Eval(cmd) => (eval(cmd, &caps)?, None),
        Command::Validate(ValidateCmd::Identities) => (Outcome::checks("validate identities", identities(&caps)), None),
        Command::Validate(ValidateCmd::Oracle { draws, seed }) => {
            (Outcome::checks("validate oracle", oracle(*draws, *seed, &caps)), Some(*seed))
        }
        Command::Mc(cmd) => {
            let (o, seed) = mc(cmd, &mut caps)?;
            (o, Some(seed))
        }
    };
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    log::info!("flucmo {VERSION}; seed {seed}; caps {caps:?}");
    write_json(cli.output.as_deref(), &outcome.json)?;
    if let Some(path) = &cli.csv {
        write_csv(path, &outcome.table)?;
    }
    Ok(outcome.ok)
}

/// Runs the CLI and returns the process exit code: 0 success, 1 failed validation or
/// verdict, 2 usage, schema, cap or input errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
