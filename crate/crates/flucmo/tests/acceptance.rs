//! Acceptance suite: one PASS/FAIL line per criterion, with the individual checks and
//! informational lines indented below it.
//!
//! Criteria listed in `RECORDED_FAILURES` are implemented literally and are known not to
//! hold; they are printed as FAIL but do not fail the run. Any other failing criterion
//! makes the process exit with status 1.

use std::io::Write;
use std::time::{Duration, Instant};

use flucmo::parallel::{par_estimate_covariance, par_estimate_poly_covariance};
use flucmo_core::functional_cov::{sc_second, MonomialSpec, QuadratureConfig};
use flucmo_core::matrix_layer::{
    closed_frak_m2_gue, closed_frak_m2_sigma, closed_frak_m2_sigma_literal, frak_m2, frak_m2_component, ChainFactor,
    ChainSpec,
};
use flucmo_core::montecarlo::{EnsembleName, EstimatorReport, TolerancePolicy, WignerEnsemble};
use flucmo_core::ncgeom::{
    annular_pairings, enumerate_annular_ncp, enumerate_marked, enumerate_ncp, kreweras_annular, kreweras_disk,
    AnnulusShape, CyclicPermutation, SetPartition,
};
use flucmo_core::second_order::{
    good_graphs, m2, m2_component, m2_graph_formula, Component, EnsembleParams, SecondOrderArgs,
};
use flucmo_core::semicircle::{
    divided_difference, divided_difference_recursive, m_sharp, m_sharp_recursive, q_weight, stieltjes,
    stieltjes_derivative, SharpVector,
};
use flucmo_core::{Caps, ComplexMatrix, Result, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot hold as stated; see the decisions ledger.
const RECORDED_FAILURES: [u8; 1] = [4];

const MC_DIM: usize = 256;
const MC_SAMPLES: usize = 4000;

struct Line {
    label: String,
    pass: bool,
    detail: String,
}

impl Line {
    fn new(label: &str, pass: bool, detail: impl Into<String>) -> Self {
        Line {
            label: label.into(),
            pass,
            detail: detail.into(),
        }
    }

    fn count(label: &str, got: usize, want: usize) -> Self {
        Line::new(label, got == want, format!("{got} (expected {want})"))
    }

    fn within(label: &str, err: f64, tol: f64) -> Self {
        Line::new(label, err <= tol, format!("max error {err:.2e} (tolerance {tol:.0e})"))
    }
}

#[derive(Default)]
struct Outcome {
    checks: Vec<Line>,
    info: Vec<Line>,
}

impl Outcome {
    fn check(&mut self, label: &str, f: impl FnOnce() -> Result<Line>) {
        self.checks.push(f().unwrap_or_else(|e| Line::new(label, false, format!("error: {e}"))));
    }

    fn info(&mut self, label: &str, f: impl FnOnce() -> Result<Line>) {
        self.info.push(f().unwrap_or_else(|e| Line::new(label, false, format!("error: {e}"))));
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Re z ∈ [-2, 2]`, `|Im z| ∈ [1, 3]` with random sign.
fn random_z(r: &mut ChaCha8Rng) -> C64 {
    let im = r.random_range(1.0..3.0);
    C64::new(r.random_range(-2.0..2.0), if r.random_bool(0.5) { im } else { -im })
}

fn random_zs(r: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| random_z(r)).collect()
}

fn random_chain(r: &mut ChaCha8Rng, len: usize, n: usize) -> Result<ChainSpec> {
    ChainSpec::new((0..len).map(|_| ChainFactor::new(random_z(r), ComplexMatrix::random_unit_norm(n, r))).collect())
}

fn catalan(n: usize) -> usize {
    (0..n).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

fn labels(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

fn criterion_1(caps: &Caps) -> Outcome {
    let mut o = Outcome::default();
    o.check("|NCP(n)| = Catalan(n), n <= 9", || {
        let bad: Vec<usize> = (0..=9)
            .filter(|&n| enumerate_ncp(&labels(n)).map_or(true, |v| v.len() != catalan(n)))
            .collect();
        Ok(Line::new("|NCP(n)| = Catalan(n), n <= 9", bad.is_empty(), format!("mismatches at n = {bad:?}")))
    });
    o.check("|NCP(2,2)| = 18", || {
        Ok(Line::count("|NCP(2,2)| = 18", enumerate_annular_ncp(AnnulusShape::new(2, 2), caps)?.len(), 18))
    });
    o.check("|G(1,1)| = 8", || {
        let total: u64 = good_graphs(AnnulusShape::new(1, 1), caps)?.iter().map(|(_, c)| c).sum();
        Ok(Line::count("|G(1,1)| = 8", total as usize, 8))
    });
    o.check("marked pairs (2,2) = 9", || {
        Ok(Line::count("marked pairs (2,2) = 9", enumerate_marked(AnnulusShape::new(2, 2), caps)?.len(), 9))
    });
    o
}

fn criterion_2(caps: &Caps) -> Outcome {
    let mut o = Outcome::default();
    o.check("disk fixture K({1,3,4}{2}{5,8,9}{6,7}{10})", || {
        let pi = SetPartition::new(labels(10), vec![vec![1, 3, 4], vec![2], vec![5, 8, 9], vec![6, 7], vec![10]])?;
        let want =
            SetPartition::new(labels(10), vec![vec![1, 2], vec![3], vec![4, 9, 10], vec![5, 7], vec![6], vec![8]])?;
        let got = kreweras_disk(&pi)?;
        Ok(Line::new("disk fixture K({1,3,4}{2}{5,8,9}{6,7}{10})", got == want, format!("{:?}", got.blocks())))
    });
    o.check("annular fixture K((1275)(34)(6)) = (1)(2456)(3)(7)", || {
        let shape = AnnulusShape::new(4, 3);
        let pi = CyclicPermutation::new(labels(7), vec![vec![1, 2, 7, 5], vec![3, 4], vec![6]])?;
        let want = CyclicPermutation::new(labels(7), vec![vec![1], vec![2, 4, 5, 6], vec![3], vec![7]])?;
        let got = kreweras_annular(&pi, shape)?;
        Ok(Line::new(
            "annular fixture K((1275)(34)(6)) = (1)(2456)(3)(7)",
            got == want,
            format!("{:?}", got.cycles()),
        ))
    });
    o.check("disk |pi| + |K(pi)| = n + 1, n <= 7", || {
        let mut bad = 0;
        let mut total = 0;
        for n in 1..=7 {
            for pi in enumerate_ncp(&labels(n))? {
                total += 1;
                bad += usize::from(pi.len() + kreweras_disk(&pi)?.len() != n + 1);
            }
        }
        Ok(Line::new("disk |pi| + |K(pi)| = n + 1, n <= 7", bad == 0, format!("{bad} violations in {total}")))
    });
    o.check("annular |pi| + |K(pi)| = k + l, k + l <= 7", || {
        let mut bad = 0;
        let mut total = 0;
        for k in 1..=6 {
            for l in 1..=7 - k {
                let shape = AnnulusShape::new(k, l);
                for pi in enumerate_annular_ncp(shape, caps)? {
                    total += 1;
                    bad += usize::from(pi.len() + kreweras_annular(&pi, shape)?.len() != k + l);
                }
            }
        }
        Ok(Line::new("annular |pi| + |K(pi)| = k + l, k + l <= 7", bad == 0, format!("{bad} violations in {total}")))
    });
    o
}

fn criterion_3(caps: &Caps) -> Outcome {
    const DRAWS: usize = 20;
    let mut o = Outcome::default();
    let mut r = rng(3);
    o.check("m[S] recursion vs graphs, |S| <= 6", || {
        let mut err: f64 = 0.0;
        for _ in 0..DRAWS {
            for s in 1..=6 {
                let zs = random_zs(&mut r, s);
                err = err.max(rel(divided_difference_recursive(&zs)?, divided_difference(&zs, caps)?));
            }
        }
        Ok(Line::within("m[S] recursion vs graphs, |S| <= 6", err, 1e-8))
    });
    o.check("m^{#,sigma} recursion vs bicolored graphs, |S| <= 5", || {
        let mut err: f64 = 0.0;
        for _ in 0..DRAWS {
            for s in 1..=5 {
                let zs = random_zs(&mut r, s);
                let sharp = SharpVector((0..s).map(|_| r.random_bool(0.5)).collect());
                let sigma = r.random_range(-1.0..1.0);
                err = err.max(rel(m_sharp_recursive(&zs, &sharp, sigma)?, m_sharp(&zs, &sharp, sigma, caps)?));
            }
        }
        Ok(Line::within("m^{#,sigma} recursion vs bicolored graphs, |S| <= 5", err, 1e-8))
    });
    o.check("m_GUE[.|.] recursion vs good graphs, k + l <= 5", || {
        let mut err: f64 = 0.0;
        for _ in 0..DRAWS {
            for k in 1..=4 {
                for l in 1..=5 - k {
                    let (left, right) = (random_zs(&mut r, k), random_zs(&mut r, l));
                    let rec = m2(&SecondOrderArgs::new(left.clone(), right.clone(), EnsembleParams::GUE)?, caps)?;
                    err = err.max(rel(rec, m2_graph_formula(&left, &right, caps)?));
                }
            }
        }
        Ok(Line::within("m_GUE[.|.] recursion vs good graphs, k + l <= 5", err, 1e-8))
    });
    o
}

fn criterion_4(caps: &Caps) -> Outcome {
    let mut o = Outcome::default();
    let mut r = rng(4);
    o.check("m[1|2] closed form with kappa4, 10 points", || {
        let mut err: f64 = 0.0;
        for _ in 0..10 {
            let (z1, z2) = (random_z(&mut r), random_z(&mut r));
            let kappa4 = r.random_range(-2.0..2.0);
            let args = SecondOrderArgs::new(vec![z1], vec![z2], EnsembleParams::new(kappa4, 0.0, 0.0)?)?;
            let (m1, m2v) = (stieltjes(z1)?, stieltjes(z2)?);
            let (d1, d2) = (stieltjes_derivative(z1)?, stieltjes_derivative(z2)?);
            let printed = d1 * d2 / (1.0 - m1 * m2v).powi(2) + kappa4 * m1 * d1 * m2v * d2;
            let expanded = m1 * m1 * m2v * m2v / ((1.0 - m1 * m1) * (1.0 - m2v * m2v) * (1.0 - m1 * m2v).powi(2))
                + kappa4 * (m1 * m2v).powi(3) / ((1.0 - m1 * m1) * (1.0 - m2v * m2v));
            let v = m2(&args, caps)?;
            err = err.max(rel(v, printed)).max(rel(v, expanded));
        }
        Ok(Line::within("m[1|2] closed form with kappa4, 10 points", err, 1e-10))
    });
    o.check("m_GUE[1|2,3] printed display, 10 points", || {
        let mut err: f64 = 0.0;
        for _ in 0..10 {
            let zs = random_zs(&mut r, 3);
            let m: Vec<C64> = zs.iter().map(|&z| stieltjes(z)).collect::<Result<_>>()?;
            let d: Vec<C64> = zs.iter().map(|&z| stieltjes_derivative(z)).collect::<Result<_>>()?;
            let printed = d[0] * (d[1] * m[2] * (1.0 - m[0] * m[2]) + m[1] * d[2] * (1.0 - m[0] * m[1]))
                / ((1.0 - m[0] * m[1]).powi(2) * (1.0 - m[0] * m[2]).powi(2) * (1.0 - m[1] * m[2]));
            let v = m2(&SecondOrderArgs::new(vec![zs[0]], zs[1..].to_vec(), EnsembleParams::GUE)?, caps)?;
            err = err.max(rel(v, printed));
        }
        Ok(Line::within("m_GUE[1|2,3] printed display, 10 points", err, 1e-10))
    });
    o.check("doubled-index identity, k <= 5, all j", || {
        let mut err: f64 = 0.0;
        let mut worst_ok_k = 0;
        for k in 1..=5 {
            let mut err_k: f64 = 0.0;
            for _ in 0..3 {
                let zs = random_zs(&mut r, k);
                let base = divided_difference(&zs, caps)?;
                for j in 0..k {
                    let mut doubled = zs.clone();
                    doubled.push(zs[j]);
                    let q = (0..k).filter(|&l| l != j).map(|l| q_weight(zs[j], zs[l])).sum::<Result<C64>>()?;
                    let rhs = base * (1.0 + q) * stieltjes_derivative(zs[j])? / stieltjes(zs[j])?;
                    err_k = err_k.max(rel(divided_difference(&doubled, caps)?, rhs));
                }
            }
            if err_k <= 1e-10 && worst_ok_k == k - 1 {
                worst_ok_k = k;
            }
            err = err.max(err_k);
        }
        let mut line = Line::within("doubled-index identity, k <= 5, all j", err, 1e-10);
        line.detail = format!("{}; holds up to k = {worst_ok_k}", line.detail);
        Ok(line)
    });
    o.info("m_GUE[1|2,3] vs resolvent identity (m[1|2] - m[1|3])/(z2 - z3)", || {
        let mut err: f64 = 0.0;
        for _ in 0..10 {
            let zs = random_zs(&mut r, 3);
            let two = |z: C64| m2(&SecondOrderArgs::new(vec![zs[0]], vec![z], EnsembleParams::GUE)?, caps);
            let want = (two(zs[1])? - two(zs[2])?) / (zs[1] - zs[2]);
            let v = m2(&SecondOrderArgs::new(vec![zs[0]], zs[1..].to_vec(), EnsembleParams::GUE)?, caps)?;
            err = err.max(rel(v, want));
        }
        Ok(Line::within("m_GUE[1|2,3] vs resolvent identity (m[1|2] - m[1|3])/(z2 - z3)", err, 1e-10))
    });
    o
}

fn criterion_5(caps: &Caps) -> Outcome {
    const DRAWS: usize = 5;
    const N: usize = 8;
    let mut o = Outcome::default();
    let mut r = rng(5);
    let mut shapes = Vec::new();
    for _ in 0..DRAWS {
        for k in 1..=4 {
            for l in 1..=5 - k {
                shapes.push((k, l));
            }
        }
    }
    let draws: Vec<(ChainSpec, ChainSpec, f64)> = shapes
        .iter()
        .map(|&(k, l)| Ok((random_chain(&mut r, k, N)?, random_chain(&mut r, l, N)?, r.random_range(-1.0..1.0))))
        .collect::<Result<_>>()
        .expect("random chains");
    o.check("closed GUE expansion vs recursion, k + l <= 5", || {
        let mut err: f64 = 0.0;
        for (left, right, _) in &draws {
            let rec = frak_m2(left, right, &EnsembleParams::GUE, caps)?;
            err = err.max(rel(closed_frak_m2_gue(left, right, caps)?, rec));
        }
        Ok(Line::within("closed GUE expansion vs recursion, k + l <= 5", err, 1e-8))
    });
    o.check("closed sigma expansion vs sigma component, k + l <= 5", || {
        let mut err: f64 = 0.0;
        for (left, right, sigma) in &draws {
            let p = EnsembleParams::new(0.0, *sigma, 0.0)?;
            let rec = frak_m2_component(left, right, Component::Sigma, &p, caps)? * *sigma;
            err = err.max(rel(closed_frak_m2_sigma(left, right, *sigma, caps)?, rec));
        }
        Ok(Line::within("closed sigma expansion vs sigma component, k + l <= 5", err, 1e-8))
    });
    o.info("literal Kreweras reading of the sigma expansion", || {
        let mut err: f64 = 0.0;
        for (left, right, sigma) in &draws {
            let p = EnsembleParams::new(0.0, *sigma, 0.0)?;
            let rec = frak_m2_component(left, right, Component::Sigma, &p, caps)? * *sigma;
            err = err.max(rel(closed_frak_m2_sigma_literal(left, right, *sigma, caps)?, rec));
        }
        Ok(Line::within("literal Kreweras reading of the sigma expansion", err, 1e-8))
    });
    o
}

fn criterion_6(caps: &Caps) -> Outcome {
    let mut o = Outcome::default();
    o.check("sc_second(x^n, x^m) = annular pairings, n + m <= 8 even", || {
        let cfg = QuadratureConfig::default();
        let mut err: f64 = 0.0;
        for n in 1..=7u32 {
            for m in (1..=8 - n).filter(|m| (n + m) % 2 == 0) {
                let count = annular_pairings(AnnulusShape::new(n as usize, m as usize), caps)?.len() as f64;
                let v = sc_second(&MonomialSpec::new(vec![n]), &MonomialSpec::new(vec![m]), &cfg)?;
                err = err.max((v - count).abs());
            }
        }
        Ok(Line::within("sc_second(x^n, x^m) = annular pairings, n + m <= 8 even", err, 2e-3))
    });
    o
}

fn mc_line(label: &str, r: &EstimatorReport) -> (Line, Line) {
    let detail = format!(
        "empirical {:.5} predicted {:.5} se {:.5} |dev| {:.5}",
        r.empirical.re,
        r.predicted.re,
        r.standard_error,
        r.deviation()
    );
    let main = Line::new(label, r.pass, format!("{detail} tolerance {:.4}", r.tolerance));
    let tight = 3.0 * r.standard_error;
    let info = Line::new(
        &format!("{label}, 3 se only"),
        r.deviation() <= tight,
        format!("{detail} tolerance {tight:.5}"),
    );
    (main, info)
}

fn progress(msg: &str) {
    eprintln!("    ... {msg}");
    let _ = std::io::stderr().flush();
}

fn criterion_7(caps: &Caps) -> Outcome {
    let mut o = Outcome::default();
    // 3 se + 2/sqrt(N), no absolute floor
    let policy = TolerancePolicy::new(2.0, 0.0).expect("valid policy");
    let z = C64::new(0.0, 2.0);
    let a = ComplexMatrix::random_unit_norm(MC_DIM, &mut rng(70));
    let matrices = [("A = Id", ComplexMatrix::identity(MC_DIM)), ("A random", a)];
    for (i, name) in EnsembleName::NAMED.iter().enumerate() {
        for (j, (a_name, a)) in matrices.iter().enumerate() {
            let label = format!("{name}, k = l = 1, {a_name}");
            progress(&label);
            let run = || -> Result<EstimatorReport> {
                let ensemble = WignerEnsemble::named(*name, MC_DIM)?;
                let chain = ChainSpec::new(vec![ChainFactor::new(z, a.clone())])?;
                par_estimate_covariance(&ensemble, &chain, &chain, MC_SAMPLES, 7000 + 10 * i as u64 + j as u64, &policy, caps)
            };
            match run() {
                Ok(r) => {
                    let (main, info) = mc_line(&label, &r);
                    o.checks.push(main);
                    o.info.push(info);
                }
                Err(e) => o.checks.push(Line::new(&label, false, format!("error: {e}"))),
            }
        }
    }
    let label = "GUE polynomial k = l = 2, A = Id (predicted 2)";
    progress(label);
    let run = || -> Result<EstimatorReport> {
        let ensemble = WignerEnsemble::gue(MC_DIM)?;
        let id = [ComplexMatrix::identity(MC_DIM), ComplexMatrix::identity(MC_DIM)];
        par_estimate_poly_covariance(&ensemble, &id, &id, MC_SAMPLES, 7100, &policy, caps)
    };
    match run() {
        Ok(r) => {
            let (main, info) = mc_line(label, &r);
            o.checks.push(main);
            o.info.push(info);
        }
        Err(e) => o.checks.push(Line::new(label, false, format!("error: {e}"))),
    }
    o.info("GUE bias decreases with N (N = 64, 128, 256; 1000 samples)", || {
        let mut devs = Vec::new();
        for n in [64, 128, 256] {
            progress(&format!("GUE bias scaling, N = {n}"));
            let ensemble = WignerEnsemble::gue(n)?;
            let chain = ChainSpec::identities(&[z], n)?;
            devs.push(par_estimate_covariance(&ensemble, &chain, &chain, 1000, 7200 + n as u64, &policy, caps)?.deviation());
        }
        let monotone = devs.windows(2).all(|w| w[1] < w[0]);
        Ok(Line::new(
            "GUE bias decreases with N (N = 64, 128, 256; 1000 samples)",
            monotone,
            format!("|dev| = {:.5}, {:.5}, {:.5}", devs[0], devs[1], devs[2]),
        ))
    });
    o
}

fn criterion_8(caps: &Caps) -> Outcome {
    let mut o = Outcome::default();
    let mut r = rng(8);
    let triples: Vec<EnsembleParams> = (0..3)
        .map(|_| EnsembleParams::new(r.random_range(-2.0..2.0), r.random_range(-1.0..1.0), r.random_range(-2.0..2.0)))
        .collect::<Result<_>>()
        .expect("valid parameters");
    o.check("m2 = weighted sum of components", || {
        let mut err: f64 = 0.0;
        for p in &triples {
            for (k, l) in [(1, 1), (2, 1), (2, 2), (1, 3)] {
                let args = SecondOrderArgs::new(random_zs(&mut r, k), random_zs(&mut r, l), *p)?;
                let parts = Component::ALL
                    .iter()
                    .map(|&c| Ok(m2_component(&args, c, caps)? * p.coefficient(c)))
                    .sum::<Result<C64>>()?;
                err = err.max(rel(parts, m2(&args, caps)?));
            }
        }
        Ok(Line::within("m2 = weighted sum of components", err, 1e-10))
    });
    o.check("frak_m2 = weighted sum of components", || {
        let mut err: f64 = 0.0;
        for p in &triples {
            for (k, l) in [(1, 1), (2, 1), (2, 2), (1, 3)] {
                let (left, right) = (random_chain(&mut r, k, 6)?, random_chain(&mut r, l, 6)?);
                let parts = Component::ALL
                    .iter()
                    .map(|&c| Ok(frak_m2_component(&left, &right, c, p, caps)? * p.coefficient(c)))
                    .sum::<Result<C64>>()?;
                err = err.max(rel(parts, frak_m2(&left, &right, p, caps)?));
            }
        }
        Ok(Line::within("frak_m2 = weighted sum of components", err, 1e-10))
    });
    o
}

fn main() {
    let caps = Caps::default();
    type Runner = fn(&Caps) -> Outcome;
    let criteria: [(u8, &str, Option<Duration>, Runner); 8] = [
        (1, "combinatorial counts", Some(Duration::from_secs(1)), criterion_1),
        (2, "Kreweras fixtures and size identities", Some(Duration::from_secs(5)), criterion_2),
        (3, "dual-path scalar agreement", Some(Duration::from_secs(60)), criterion_3),
        (4, "closed-form fixtures", Some(Duration::from_secs(10)), criterion_4),
        (5, "closed expansions vs recursion", Some(Duration::from_secs(300)), criterion_5),
        (6, "kernel quadrature vs pairing counts", Some(Duration::from_secs(120)), criterion_6),
        (7, "Monte Carlo covariance at N = 256, 4000 samples", None, criterion_7),
        (8, "decomposition linearity", Some(Duration::from_secs(10)), criterion_8),
    ];
    println!("acceptance");
    let mut unexpected = Vec::new();
    for (id, title, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run(&caps);
        let elapsed = start.elapsed();
        let in_budget = budget.is_none_or(|b| elapsed <= b);
        let pass = in_budget && outcome.checks.iter().all(|l| l.pass);
        let timing = match budget {
            Some(b) => format!("{:.2} s, budget {} s", elapsed.as_secs_f64(), b.as_secs()),
            None => format!("{:.1} s", elapsed.as_secs_f64()),
        };
        let recorded = RECORDED_FAILURES.contains(&id);
        let note = if !pass && recorded { " [recorded as unattainable]" } else { "" };
        println!("criterion {id} {} {title} ({timing}){note}", verdict(pass));
        for l in &outcome.checks {
            println!("    {} {}: {}", verdict(l.pass), l.label, l.detail);
        }
        for l in &outcome.info {
            println!("    info {} {}: {}", verdict(l.pass), l.label, l.detail);
        }
        let _ = std::io::stdout().flush();
        if !pass && !recorded {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: no unexpected failures");
    } else {
        println!("acceptance: unexpected failures in criteria {unexpected:?}");
        std::process::exit(1);
    }
}
