//! Acceptance criteria for the characteristic and the identities it rests on.
//!
//! Prints one `PASS` or `FAIL` line per criterion and exits non-zero when any
//! criterion fails.

use std::f64::consts::TAU;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use annulus_core::annuluschar::identities::{
    cartan_residual, jensen_v1_residual, jensen_v2_residual, lemma4_residual, lemma5_residual, lemma6_residual,
    theorem1_scan,
};
use annulus_core::annuluschar::{characteristic, fft};
use annulus_core::corpus::{random_radius, rational_corpus, CorpusSpec};
use annulus_core::oracle::{exact_index, solve_a_points};
use annulus_core::winding::{check_eq12_eq13, quadrature_index};
use annulus_core::{AnnulusWindow, Complex64, Error, FunctionModel, QuadConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS_SEED: u64 = 20_240_611;
const CORPUS_SIZE: usize = 50;

/// Name, optional runtime budget and check.
type Criterion<'a> = (&'static str, Option<Duration>, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

fn window(tau: f64, r: f64) -> AnnulusWindow {
    AnnulusWindow::new(tau, r).unwrap()
}

fn parse(text: &str) -> FunctionModel {
    FunctionModel::parse(text).unwrap().rationalized()
}

/// `n` log-spaced points from 1 to `e^2`.
fn log_axis(n: usize) -> Vec<f64> {
    (0..n).map(|k| (2.0 * k as f64 / (n - 1) as f64).exp()).collect()
}

/// Random rationals whose zeros and poles keep 2% away from every radius
/// the identity checks below use.
fn corpus() -> Vec<FunctionModel> {
    let mut avoid = vec![1.0, 0.7, 2.5, 3.0, 1.5, 2.0, 2.7];
    avoid.extend(avoid.clone().iter().map(|x| 1.0 / x));
    rational_corpus(
        CORPUS_SEED,
        CORPUS_SIZE,
        &CorpusSpec {
            avoid,
            ..CorpusSpec::default()
        },
    )
}

fn worst<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> Result<f64, Error>) -> Result<f64, Error> {
    items.into_iter().try_fold(0.0f64, |acc, x| Ok(acc.max(f(x)?)))
}

fn verdict(worst: Result<f64, Error>, tol: f64) -> Outcome {
    match worst {
        Ok(w) => Outcome::new(w <= tol, format!("worst residual {w:.3e}, tolerance {tol:.0e}")),
        Err(e) => Outcome::new(false, format!("error: {e}")),
    }
}

fn strange_example() -> Outcome {
    let axis: Vec<f64> = (0..4).map(|k| (2.0 * k as f64 / 3.0).exp()).collect();
    verdict(
        worst([1, 2, 3, 5], |m| {
            let mut w = 0.0f64;
            for f in [FunctionModel::monomial(m), FunctionModel::monomial(-m)] {
                for &tau in &axis {
                    for &r in &axis {
                        let t = characteristic(&f, &window(tau, r), &cfg())?.t;
                        w = w.max((t - m as f64 * (tau.ln() + r.ln()) / 2.0).abs());
                    }
                }
            }
            Ok(w)
        }),
        1e-8,
    )
}

fn integrality(corpus: &[FunctionModel]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 2);
    let mut mismatches = 0;
    let mut worst_raw = 0.0f64;
    for f in corpus {
        let factors = f.exact_zeros_poles().unwrap();
        for _ in 0..10 {
            let t = random_radius(&mut rng, f, 0.2, 4.0, 0.02);
            match quadrature_index(f, t, &cfg()) {
                Ok(e) => {
                    worst_raw = worst_raw.max((e.raw - e.raw.round()).abs());
                    if e.value != exact_index(factors, t) || (e.raw - e.raw.round()).abs() > 0.01 {
                        mismatches += 1;
                    }
                }
                Err(_) => mismatches += 1,
            }
        }
    }
    Outcome::new(
        mismatches == 0,
        format!("{mismatches} mismatches in 500 circles, worst distance to an integer {worst_raw:.3e}"),
    )
}

fn jensen_one(corpus: &[FunctionModel]) -> Outcome {
    verdict(worst(corpus, |f| Ok(jensen_v1_residual(f, 0.7, 2.5, &cfg())?.residual)), 1e-8)
}

fn jensen_two(corpus: &[FunctionModel]) -> Outcome {
    verdict(worst(corpus, |f| Ok(jensen_v2_residual(f, &window(3.0, 3.0), &cfg())?.residual)), 1e-8)
}

fn argument_principle(corpus: &[FunctionModel]) -> Outcome {
    let mut nonzero = 0;
    for f in corpus {
        for t in [1.5, 2.0, 2.7] {
            match check_eq12_eq13(f, t) {
                Ok((0, 0)) => {}
                _ => nonzero += 1,
            }
        }
    }
    Outcome::new(nonzero == 0, format!("{nonzero} of 150 checks with a nonzero integer residual"))
}

fn lemma4() -> Outcome {
    let fs = ["2*z", "z+3", "z^2", "(z-2)/(z-0.5)"].map(parse);
    verdict(worst(&fs, |f| Ok(lemma4_residual(f, 512, &cfg())?.residual)), 1e-6)
}

fn lemma5(corpus: &[FunctionModel]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 5);
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| rng.gen_range(f64::ln(lo)..f64::ln(hi)).exp();
    let triples: Vec<(FunctionModel, Complex64, f64)> = (0..20)
        .map(|k| {
            let f = corpus[k].clone();
            let zeta = Complex64::from_polar(log_uniform(&mut rng, 0.3, 3.0), rng.gen_range(0.0..TAU));
            let rat = f.as_rational().unwrap();
            let mut moduli: Vec<f64> = rat.factors().iter().map(|x| x.root.norm()).collect();
            moduli.extend(solve_a_points(rat, zeta).unwrap().roots.iter().map(|z| z.norm()));
            let t = loop {
                let t = log_uniform(&mut rng, 0.5, 2.0);
                if moduli.iter().all(|&m| (m / t - 1.0).abs() >= 0.02) {
                    break t;
                }
            };
            (f, zeta, t)
        })
        .collect();
    verdict(worst(&triples, |(f, zeta, t)| Ok(lemma5_residual(f, *t, *zeta, &cfg())?.residual)), 1e-9)
}

fn lemma6() -> Outcome {
    let fs = ["z/2", "z", "5", "3*z"].map(parse);
    let mut pass = true;
    let mut worst_final = 0.0f64;
    for f in &fs {
        let residuals: Result<Vec<f64>, Error> = [512, 1024, 2048]
            .iter()
            .map(|&n| Ok(lemma6_residual(f, n, &cfg())?.residual))
            .collect();
        match residuals {
            Ok(r) => {
                let monotone = r.windows(2).all(|p| p[1] <= p[0] || p[0].max(p[1]) <= 1e-12);
                pass &= monotone && r[2] <= 1e-3;
                worst_final = worst_final.max(r[2]);
            }
            Err(e) => return Outcome::new(false, format!("error: {e}")),
        }
    }
    Outcome::new(
        pass,
        format!("worst residual at 2048 {worst_final:.3e}, tolerance 1e-3, non-increasing in the grid size"),
    )
}

fn cartan() -> Outcome {
    let mut fs = rational_corpus(
        CORPUS_SEED ^ 9,
        10,
        &CorpusSpec {
            max_degree: 3,
            avoid: vec![0.5, 1.0, 3.0],
            ..CorpusSpec::default()
        },
    );
    fs.extend(["z", "z^2", "z^3", "2*z", "(z-2)/(z-0.5)"].map(parse));
    verdict(worst(&fs, |f| Ok(cartan_residual(f, &window(2.0, 3.0), 512, &cfg())?.residual)), 1e-6)
}

fn first_fundamental_theorem() -> Outcome {
    let f = parse("(z-2)/(z-0.5)");
    let (mut worst_res, mut worst_excess, mut checked, mut skipped) = (0.0f64, f64::NEG_INFINITY, 0, 0);
    for (tau, r) in [(2.0, 2.0), (2.0, 5.0), (5.0, 2.0)] {
        for i in 0..5 {
            for j in 0..5 {
                let a = Complex64::new(-3.0 + 1.5 * i as f64, -3.0 + 1.5 * j as f64);
                match fft(&f, a, &window(tau, r), &cfg()) {
                    Ok(rep) => {
                        checked += 1;
                        worst_res = worst_res.max(rep.residual);
                        worst_excess = worst_excess.max(rep.eps1.abs() - rep.eps1_bound);
                    }
                    Err(Error::BoundaryRoot { .. }) => skipped += 1,
                    Err(e) => return Outcome::new(false, format!("error at a = {a}: {e}")),
                }
            }
        }
    }
    Outcome::new(
        worst_res <= 1e-7 && worst_excess <= 1e-9,
        format!(
            "{checked} values checked, {skipped} skipped, worst residual {worst_res:.3e}, \
             worst |eps1| minus bound {worst_excess:.3e}"
        ),
    )
}

fn theorem1() -> Outcome {
    let mut fs: Vec<FunctionModel> = ["z", "z^2", "z^3", "2*z", "z/2", "z+3", "(z-2)/(z-0.5)", "1/z"]
        .map(parse)
        .into();
    let axis = log_axis(5);
    let mut avoid: Vec<f64> = axis.clone();
    avoid.extend(axis.iter().map(|x| 1.0 / x));
    fs.extend(rational_corpus(
        CORPUS_SEED ^ 11,
        3,
        &CorpusSpec {
            max_degree: 3,
            avoid,
            ..CorpusSpec::default()
        },
    ));
    let mut failed = Vec::new();
    for (k, f) in fs.iter().enumerate() {
        match theorem1_scan(f, &axis, &axis, &cfg()) {
            Ok(rep) => failed.extend(
                rep.checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| format!("f#{k} {} ({:.3e} > {:.3e})", c.name, c.worst, c.tolerance)),
            ),
            Err(e) => failed.push(format!("f#{k} error: {e}")),
        }
    }
    Outcome::new(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} functions, every property holds on the 5x5 grid", fs.len())
        } else {
            failed.join("; ")
        },
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str, name: &str| -> Result<Vec<u8>, String> {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_annulus"))
            .args(["surface", "--fn", "(z-2)/(z-0.5)", "--tau-grid", "1:7.389:12", "--r-grid", "1:7.389:12"])
            .args(["--jobs", jobs, "--out"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("surface exited with {status}"));
        }
        std::fs::read(&path).map_err(|e| e.to_string())
    };
    let runs: Result<Vec<Vec<u8>>, String> =
        [("1", "a.csv"), ("1", "b.csv"), ("8", "c.csv")].iter().map(|(j, n)| run(j, n)).collect();
    match runs {
        Ok(r) => Outcome::new(
            r[0] == r[1] && r[0] == r[2] && !r[0].is_empty(),
            format!("3 runs of {} bytes, identical: {}", r[0].len(), r[0] == r[1] && r[0] == r[2]),
        ),
        Err(e) => Outcome::new(false, e),
    }
}

fn main() -> ExitCode {
    let corpus = corpus();
    let criteria: Vec<Criterion<'_>> = vec![
        ("1 strange example T(z^m) = T(z^-m) = m(log tau + log r)/2", Some(Duration::from_secs(5)), Box::new(strange_example)),
        ("2 quadrature index is an integer and matches the exact index", Some(Duration::from_secs(30)), Box::new(|| integrality(&corpus))),
        ("3 Jensen formula, version one", None, Box::new(|| jensen_one(&corpus))),
        ("4 Jensen formula, version two", None, Box::new(|| jensen_two(&corpus))),
        ("5 argument-principle relations", None, Box::new(|| argument_principle(&corpus))),
        ("6 unit-circle average of the index of f - e^(i phi)", None, Box::new(lemma4)),
        ("7 index of f - zeta against the index of f and a contour integral", None, Box::new(|| lemma5(&corpus))),
        ("8 double-integral identity on the unit torus", None, Box::new(lemma6)),
        ("9 Cartan identity", Some(Duration::from_secs(60)), Box::new(cartan)),
        ("10 first fundamental theorem", None, Box::new(first_fundamental_theorem)),
        ("11 characteristic properties scan", Some(Duration::from_secs(120)), Box::new(theorem1)),
        ("12 surface output is deterministic across thread counts", None, Box::new(determinism)),
    ];
    let mut failures = 0;
    for (name, budget, run) in &criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = outcome.pass && in_time;
        failures += usize::from(!pass);
        let budget_note = budget.map_or(String::new(), |b| format!(" (budget {} s)", b.as_secs()));
        println!(
            "{} criterion {name}: {} [{:.2} s{budget_note}]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
