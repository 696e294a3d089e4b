//! Batch self-checks behind `validate identities` and `validate oracle`.

use flucmo_core::functional_cov::{sc_second, MonomialSpec, QuadratureConfig};
use flucmo_core::matrix_layer::{
    closed_frak_m2_gue, closed_frak_m2_sigma, frak_m2, frak_m2_component, ChainFactor, ChainSpec,
};
use flucmo_core::ncgeom::{
    annular_pairings, enumerate_annular_ncp, enumerate_marked, enumerate_ncp, kreweras_annular, kreweras_disk,
    AnnulusShape,
};
use flucmo_core::second_order::{good_graphs, m2, m2_component, m2_graph_formula, Component, EnsembleParams, SecondOrderArgs};
use flucmo_core::semicircle::{
    divided_difference, divided_difference_recursive, free_cumulant, free_cumulant_moebius, m_sharp,
    m_sharp_recursive, SharpVector,
};
use flucmo_core::{Caps, ComplexMatrix, Result, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// One named check with its outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn exact(check: &str, got: usize, want: usize) -> Self {
        CheckOutcome {
            check: check.into(),
            pass: got == want,
            detail: format!("{got} (expected {want})"),
        }
    }

    fn within(check: &str, err: f64, tol: f64) -> Self {
        CheckOutcome {
            check: check.into(),
            pass: err <= tol,
            detail: format!("max error {err:.3e} (tolerance {tol:.0e})"),
        }
    }

    fn failed(check: &str, e: flucmo_core::Error) -> Self {
        CheckOutcome {
            check: check.into(),
            pass: false,
            detail: e.to_string(),
        }
    }
}

fn run(check: &str, f: impl FnOnce() -> Result<CheckOutcome>) -> CheckOutcome {
    f().unwrap_or_else(|e| CheckOutcome::failed(check, e))
}

fn catalan(n: usize) -> usize {
    (0..n).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn random_z(rng: &mut ChaCha8Rng) -> C64 {
    let im = rng.random_range(1.0..3.0);
    C64::new(rng.random_range(-2.0..2.0), if rng.random_bool(0.5) { im } else { -im })
}

fn random_zs(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| random_z(rng)).collect()
}

/// Exact combinatorial invariants plus cheap numerical identities.
pub fn identities(caps: &Caps) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    out.push(run("ncp counts are Catalan (n <= 9)", || {
        let bad = (0..=9)
            .map(|n| (n, enumerate_ncp(&(1..=n).collect::<Vec<_>>()).map(|v| v.len())))
            .find(|(n, c)| c.as_ref().map_or(true, |c| *c != catalan(*n)));
        Ok(CheckOutcome {
            check: "ncp counts are Catalan (n <= 9)".into(),
            pass: bad.is_none(),
            detail: bad.map_or("all match".into(), |(n, c)| format!("n = {n}: {c:?}")),
        })
    }));
    out.push(run("disk Kreweras |pi| + |K(pi)| = n + 1 (n <= 7)", || {
        let mut bad = 0;
        for n in 1..=7 {
            for pi in enumerate_ncp(&(1..=n).collect::<Vec<_>>())? {
                if pi.len() + kreweras_disk(&pi)?.len() != n + 1 {
                    bad += 1;
                }
            }
        }
        Ok(CheckOutcome::exact("disk Kreweras |pi| + |K(pi)| = n + 1 (n <= 7)", bad, 0))
    }));
    out.push(run("annular Kreweras |pi| + |K(pi)| = k + l (k + l <= 6)", || {
        let mut bad = 0;
        for k in 1..=5 {
            for l in 1..=6 - k {
                let shape = AnnulusShape::new(k, l);
                for pi in enumerate_annular_ncp(shape, caps)? {
                    if pi.len() + kreweras_annular(&pi, shape)?.len() != k + l {
                        bad += 1;
                    }
                }
            }
        }
        Ok(CheckOutcome::exact("annular Kreweras |pi| + |K(pi)| = k + l (k + l <= 6)", bad, 0))
    }));
    out.push(run("annular swap symmetry of counts", || {
        let mut bad = 0;
        for (k, l) in [(1, 2), (1, 3), (2, 3), (1, 4)] {
            if enumerate_annular_ncp(AnnulusShape::new(k, l), caps)?.len()
                != enumerate_annular_ncp(AnnulusShape::new(l, k), caps)?.len()
            {
                bad += 1;
            }
        }
        Ok(CheckOutcome::exact("annular swap symmetry of counts", bad, 0))
    }));
    out.push(run("|anc(2,2)| = 18", || {
        Ok(CheckOutcome::exact("|anc(2,2)| = 18", enumerate_annular_ncp(AnnulusShape::new(2, 2), caps)?.len(), 18))
    }));
    out.push(run("|G(1,1)| = 8", || {
        let total: u64 = good_graphs(AnnulusShape::new(1, 1), caps)?.iter().map(|(_, c)| c).sum();
        Ok(CheckOutcome::exact("|G(1,1)| = 8", total as usize, 8))
    }));
    out.push(run("marked pairs (2,2) = 9", || {
        Ok(CheckOutcome::exact("marked pairs (2,2) = 9", enumerate_marked(AnnulusShape::new(2, 2), caps)?.len(), 9))
    }));
    out.push(run("m[1|2] = 1/64 at z = 2i", || {
        let z = C64::new(0.0, 2.0);
        let v = m2(&SecondOrderArgs::new(vec![z], vec![z], EnsembleParams::GUE)?, caps)?;
        Ok(CheckOutcome::within("m[1|2] = 1/64 at z = 2i", (v - 0.015625).norm(), 1e-14))
    }));
    out.push(run("m2 decomposition linearity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut err: f64 = 0.0;
        for _ in 0..3 {
            let p = EnsembleParams::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0), rng.random_range(-2.0..2.0))?;
            let args = SecondOrderArgs::new(random_zs(&mut rng, 2), random_zs(&mut rng, 2), p)?;
            let parts = Component::ALL
                .iter()
                .map(|&c| Ok(m2_component(&args, c, caps)? * p.coefficient(c)))
                .sum::<Result<C64>>()?;
            err = err.max(rel(parts, m2(&args, caps)?));
        }
        Ok(CheckOutcome::within("m2 decomposition linearity", err, 1e-10))
    }));
    out.push(run("sc_second equals annular pairing counts (n + m <= 6)", || {
        let cfg = QuadratureConfig::default();
        let mut err: f64 = 0.0;
        for n in 1..=5u32 {
            for m in 1..=6 - n {
                if (n + m) % 2 == 1 {
                    continue;
                }
                let count = annular_pairings(AnnulusShape::new(n as usize, m as usize), caps)?.len() as f64;
                let v = sc_second(&MonomialSpec::new(vec![n]), &MonomialSpec::new(vec![m]), &cfg)?;
                err = err.max((v - count).abs());
            }
        }
        Ok(CheckOutcome::within("sc_second equals annular pairing counts (n + m <= 6)", err, 2e-3))
    }));
    out
}

fn random_chain(rng: &mut ChaCha8Rng, len: usize, n: usize) -> Result<ChainSpec> {
    ChainSpec::new(
        (0..len)
            .map(|_| ChainFactor::new(random_z(rng), ComplexMatrix::random_unit_norm(n, rng)))
            .collect(),
    )
}

/// Dual-path numerical agreement over `draws` random draws.
pub fn oracle(draws: usize, seed: u64, caps: &Caps) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    out.push(run("m[S] graph vs recursion (|S| <= 6)", || {
        let mut err: f64 = 0.0;
        for _ in 0..draws {
            for s in 1..=6 {
                let zs = random_zs(&mut rng, s);
                err = err.max(rel(divided_difference(&zs, caps)?, divided_difference_recursive(&zs)?));
            }
        }
        Ok(CheckOutcome::within("m[S] graph vs recursion (|S| <= 6)", err, 1e-8))
    }));
    out.push(run("free cumulant graph vs Moebius (|S| <= 6)", || {
        let mut err: f64 = 0.0;
        for _ in 0..draws {
            for s in 1..=6 {
                let zs = random_zs(&mut rng, s);
                err = err.max(rel(free_cumulant(&zs, caps)?, free_cumulant_moebius(&zs, caps)?));
            }
        }
        Ok(CheckOutcome::within("free cumulant graph vs Moebius (|S| <= 6)", err, 1e-8))
    }));
    out.push(run("m_sharp graph vs recursion (|S| <= 5)", || {
        let mut err: f64 = 0.0;
        for _ in 0..draws {
            for s in 1..=5 {
                let zs = random_zs(&mut rng, s);
                let sharp = SharpVector((0..s).map(|_| rng.random_bool(0.5)).collect());
                let sigma = rng.random_range(-1.0..1.0);
                err = err.max(rel(m_sharp(&zs, &sharp, sigma, caps)?, m_sharp_recursive(&zs, &sharp, sigma)?));
            }
        }
        Ok(CheckOutcome::within("m_sharp graph vs recursion (|S| <= 5)", err, 1e-8))
    }));
    out.push(run("m2 recursion vs good graphs (k + l <= 5)", || {
        let mut err: f64 = 0.0;
        for _ in 0..draws {
            for k in 1..=4 {
                for l in 1..=5 - k {
                    let (left, right) = (random_zs(&mut rng, k), random_zs(&mut rng, l));
                    let rec = m2(&SecondOrderArgs::new(left.clone(), right.clone(), EnsembleParams::GUE)?, caps)?;
                    err = err.max(rel(m2_graph_formula(&left, &right, caps)?, rec));
                }
            }
        }
        Ok(CheckOutcome::within("m2 recursion vs good graphs (k + l <= 5)", err, 1e-8))
    }));
    out.push(run("closed GUE vs recursion (k + l <= 4, N = 4)", || {
        let mut err: f64 = 0.0;
        for _ in 0..draws {
            for k in 1..=3 {
                for l in 1..=4 - k {
                    let left = random_chain(&mut rng, k, 4)?;
                    let right = random_chain(&mut rng, l, 4)?;
                    let rec = frak_m2(&left, &right, &EnsembleParams::GUE, caps)?;
                    err = err.max(rel(closed_frak_m2_gue(&left, &right, caps)?, rec));
                }
            }
        }
        Ok(CheckOutcome::within("closed GUE vs recursion (k + l <= 4, N = 4)", err, 1e-8))
    }));
    out.push(run("closed sigma vs sigma component (k + l <= 4, N = 4)", || {
        let mut err: f64 = 0.0;
        for _ in 0..draws {
            for k in 1..=3 {
                for l in 1..=4 - k {
                    let left = random_chain(&mut rng, k, 4)?;
                    let right = random_chain(&mut rng, l, 4)?;
                    let sigma = if rng.random_bool(0.5) { -0.6 } else { 0.4 };
                    let p = EnsembleParams::new(0.0, sigma, 0.0)?;
                    let rec = frak_m2_component(&left, &right, Component::Sigma, &p, caps)? * sigma;
                    err = err.max(rel(closed_frak_m2_sigma(&left, &right, sigma, caps)?, rec));
                }
            }
        }
        Ok(CheckOutcome::within("closed sigma vs sigma component (k + l <= 4, N = 4)", err, 1e-8))
    }));
    out
}
