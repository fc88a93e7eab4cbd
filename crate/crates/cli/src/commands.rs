//! The three subcommands. Each returns the exit status after writing its
//! report; errors that prevent any report propagate to the caller.

use std::io::Write;

use annulus_core::annuluschar::{
    cartan_residual, fft, jensen_v1_residual, jensen_v2_residual, lemma4_residual, lemma5_residual,
    lemma6_residual, theorem1_scan, Characteristic,
};
use annulus_core::oracle::solve_a_points;
use annulus_core::winding::check_eq12_eq13;
use annulus_core::{AnnulusWindow, CharacteristicReport, Complex64, Error, Residual, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{parse_axis, Format, RunConfig, Suite};
use crate::output::{error_json, error_kind, sci, write_json, Exit};

/// Windows evaluated in parallel before their rows are written.
const SURFACE_CHUNK: usize = 256;
const SURFACE_HEADER: &str = "tau,r,N,m_annulus,c_f,T,quad_error,status";

const JENSEN_TOL: f64 = 1e-8;
const CARTAN_TOL: f64 = 1e-6;
const LEMMA4_TOL: f64 = 1e-6;
const LEMMA5_TOL: f64 = 1e-9;
const LEMMA5_TRIPLES: usize = 5;
const LEMMA6_GRID: usize = 2048;
const LEMMA6_TOL: f64 = 1e-3;
const FFT_TOL: f64 = 1e-7;
const FFT_BOUND_SLACK: f64 = 1e-9;
const EQ12_RADII: [f64; 3] = [1.5, 2.0, 2.7];
const THEOREM1_AXIS: usize = 5;
/// Relative distance random radii keep from zeros, poles and a-points.
const AVOID_REL: f64 = 0.02;

fn report_json(rep: &CharacteristicReport) -> Value {
    json!({
        "N": rep.n,
        "m_inner": rep.m_inner,
        "m_outer": rep.m_outer,
        "m_unit": rep.m_unit,
        "m_annulus": rep.m_annulus,
        "c_f": rep.c_f,
        "T": rep.t,
        "tau": rep.window.tau(),
        "r": rep.window.r(),
        "quad_error": rep.quad_error,
        "edge_pole": rep.edge_pole,
    })
}

fn csv_row(w: &AnnulusWindow, rep: &Result<CharacteristicReport>) -> String {
    match rep {
        Ok(rep) => format!(
            "{},{},{},{},{},{},{},{}",
            sci(w.tau()),
            sci(w.r()),
            sci(rep.n),
            sci(rep.m_annulus),
            sci(rep.c_f),
            sci(rep.t),
            sci(rep.quad_error),
            if rep.edge_pole { "edge_pole" } else { "ok" }
        ),
        Err(e) => format!(
            "{},{},NaN,NaN,NaN,NaN,NaN,{}",
            sci(w.tau()),
            sci(w.r()),
            error_kind(e)
        ),
    }
}

pub fn eval(cfg: &RunConfig, out: &mut dyn Write) -> Result<Exit> {
    let rep = Characteristic::new(&cfg.f, &cfg.quad)?.at(&cfg.window)?;
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &report_json(&rep)).map_err(io_error)?,
        Format::Csv => {
            writeln!(out, "{SURFACE_HEADER}\n{}", csv_row(&cfg.window, &Ok(rep))).map_err(io_error)?
        }
    }
    Ok(Exit::Ok)
}

pub fn surface(cfg: &RunConfig, out: &mut dyn Write) -> Result<Exit> {
    let (Some(taus), Some(rs)) = (&cfg.tau_grid, &cfg.r_grid) else {
        return Err(Error::InvalidArgument(
            "surface needs --tau-grid and --r-grid".into(),
        ));
    };
    let windows: Vec<AnnulusWindow> = taus
        .iter()
        .flat_map(|&tau| rs.iter().map(move |&r| AnnulusWindow::new(tau, r)))
        .collect::<Result<_>>()?;
    let ch = Characteristic::new(&cfg.f, &cfg.quad)?;
    let format = cfg.format.unwrap_or(Format::Csv);
    let mut status = Exit::Ok;

    match format {
        Format::Csv => writeln!(out, "{SURFACE_HEADER}"),
        Format::Json => write!(out, "["),
    }
    .map_err(io_error)?;
    for (c, chunk) in windows.chunks(SURFACE_CHUNK).enumerate() {
        let reports: Vec<Result<CharacteristicReport>> = chunk.par_iter().map(|w| ch.at(w)).collect();
        for (k, (w, rep)) in chunk.iter().zip(&reports).enumerate() {
            if let Err(e) = rep {
                status = status.worst(Exit::of(e));
            }
            match format {
                Format::Csv => writeln!(out, "{}", csv_row(w, rep)),
                Format::Json => {
                    let sep = if c == 0 && k == 0 { "\n  " } else { ",\n  " };
                    let row = match rep {
                        Ok(rep) => report_json(rep),
                        Err(e) => json!({ "tau": w.tau(), "r": w.r(), "error": error_json(e)["error"] }),
                    };
                    write!(out, "{sep}{row}")
                }
            }
            .map_err(io_error)?;
        }
    }
    if format == Format::Json {
        writeln!(out, "\n]").map_err(io_error)?;
    }
    Ok(status)
}

/// One line of the verification report.
struct Entry {
    suite: &'static str,
    parameters: Value,
    residual: f64,
    tolerance: f64,
    pass: bool,
    error: Option<Error>,
}

impl Entry {
    fn residual(suite: Suite, parameters: Value, r: Result<Residual>, tolerance: f64) -> Self {
        match r {
            Ok(r) => Self {
                suite: suite.name(),
                parameters,
                residual: r.residual,
                tolerance,
                pass: r.residual <= tolerance,
                error: None,
            },
            Err(e) => Self::failed(suite, parameters, tolerance, e),
        }
    }

    fn failed(suite: Suite, parameters: Value, tolerance: f64, e: Error) -> Self {
        Self {
            suite: suite.name(),
            parameters,
            residual: f64::NAN,
            tolerance,
            pass: false,
            error: Some(e),
        }
    }

    fn status(&self) -> Exit {
        match (&self.error, self.pass) {
            (Some(e), _) => Exit::of(e),
            (None, true) => Exit::Ok,
            (None, false) => Exit::Verification,
        }
    }

    fn to_json(&self) -> Value {
        let mut v = json!({
            "suite": self.suite,
            "parameters": self.parameters,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.pass,
        });
        if let Some(e) = &self.error {
            v["error"] = error_json(e)["error"].clone();
        }
        v
    }
}

pub fn verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<Exit> {
    if cfg.suites.is_empty() {
        return Err(Error::InvalidArgument("--suite selects nothing".into()));
    }
    if cfg.format == Some(Format::Csv) {
        return Err(Error::InvalidArgument("verify reports are JSON only".into()));
    }
    let mut status = Exit::Ok;
    let mut first = true;
    write!(out, "[").map_err(io_error)?;
    for &suite in &cfg.suites {
        for entry in run_suite(cfg, suite) {
            status = status.worst(entry.status());
            let sep = if first { "\n  " } else { ",\n  " };
            first = false;
            write!(out, "{sep}{}", entry.to_json()).map_err(io_error)?;
            out.flush().map_err(io_error)?;
        }
    }
    writeln!(out, "\n]").map_err(io_error)?;
    Ok(status)
}

fn run_suite(cfg: &RunConfig, suite: Suite) -> Vec<Entry> {
    let (f, q, w) = (&cfg.f, &cfg.quad, &cfg.window);
    let window = json!({ "tau": w.tau(), "r": w.r() });
    match suite {
        Suite::Jensen1 => {
            let (s, r) = (w.inner(), w.r());
            let params = json!({ "s": s, "r": r });
            vec![Entry::residual(suite, params, jensen_v1_residual(f, s, r, q), JENSEN_TOL)]
        }
        Suite::Jensen2 => vec![Entry::residual(suite, window, jensen_v2_residual(f, w, q), JENSEN_TOL)],
        Suite::Eq12 => EQ12_RADII
            .iter()
            .map(|&t| {
                let params = json!({ "t": t });
                match check_eq12_eq13(f, t) {
                    Ok((a, b)) => {
                        let residual = a.abs().max(b.abs()) as f64;
                        Entry {
                            suite: suite.name(),
                            parameters: params,
                            residual,
                            tolerance: 0.0,
                            pass: residual == 0.0,
                            error: None,
                        }
                    }
                    Err(e) => Entry::failed(suite, params, 0.0, e),
                }
            })
            .collect(),
        Suite::Cartan => {
            let params = json!({ "tau": w.tau(), "r": w.r(), "nphi": cfg.n_phi });
            vec![Entry::residual(suite, params, cartan_residual(f, w, cfg.n_phi, q), CARTAN_TOL)]
        }
        Suite::Lemma4 => {
            let params = json!({ "nphi": cfg.n_phi });
            vec![Entry::residual(suite, params, lemma4_residual(f, cfg.n_phi, q), LEMMA4_TOL)]
        }
        Suite::Lemma5 => lemma5_entries(cfg),
        Suite::Lemma6 => {
            let params = json!({ "ngrid": LEMMA6_GRID });
            vec![Entry::residual(suite, params, lemma6_residual(f, LEMMA6_GRID, q), LEMMA6_TOL)]
        }
        Suite::Fft => fft_entries(cfg),
        Suite::Theorem1 => theorem1_entries(cfg),
    }
}

/// Random `(ζ, t)` pairs with `t` away from zeros, poles and `ζ`-points of
/// `f` when those are known.
fn lemma5_entries(cfg: &RunConfig) -> Vec<Entry> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| rng.gen_range(f64::ln(lo)..f64::ln(hi)).exp();
    let mut out = Vec::new();
    for _ in 0..LEMMA5_TRIPLES {
        let zeta = Complex64::from_polar(
            log_uniform(&mut rng, 0.3, 3.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let mut moduli: Vec<f64> = Vec::new();
        if let Some(r) = cfg.f.as_rational() {
            moduli.extend(r.factors().iter().map(|x| x.root.norm()));
            match solve_a_points(r, zeta) {
                Ok(p) => moduli.extend(p.roots.iter().map(|z| z.norm())),
                Err(e) => {
                    out.push(Entry::failed(Suite::Lemma5, zeta_params(zeta, None), LEMMA5_TOL, e));
                    continue;
                }
            }
        }
        let t = loop {
            let t = log_uniform(&mut rng, 0.5, 2.0);
            if moduli.iter().all(|&m| (m / t - 1.0).abs() >= AVOID_REL) {
                break t;
            }
        };
        out.push(Entry::residual(
            Suite::Lemma5,
            zeta_params(zeta, Some(t)),
            lemma5_residual(&cfg.f, t, zeta, &cfg.quad),
            LEMMA5_TOL,
        ));
    }
    out
}

fn zeta_params(zeta: Complex64, t: Option<f64>) -> Value {
    json!({ "zeta_re": zeta.re, "zeta_im": zeta.im, "t": t })
}

/// `a` on the 5×5 grid over `[−3, 3]²`; values with an a-point on a window
/// circle are skipped.
fn fft_entries(cfg: &RunConfig) -> Vec<Entry> {
    let w = &cfg.window;
    let mut out = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            let a = Complex64::new(-3.0 + 1.5 * i as f64, -3.0 + 1.5 * j as f64);
            let mut params = json!({ "a_re": a.re, "a_im": a.im, "tau": w.tau(), "r": w.r() });
            match fft(&cfg.f, a, w, &cfg.quad) {
                Ok(rep) => {
                    let bound_ok = rep.eps1.abs() <= rep.eps1_bound + FFT_BOUND_SLACK;
                    params["eps1"] = json!(rep.eps1);
                    params["eps1_bound"] = json!(rep.eps1_bound);
                    params["eps2"] = json!(rep.eps2);
                    out.push(Entry {
                        suite: Suite::Fft.name(),
                        parameters: params,
                        residual: rep.residual,
                        tolerance: FFT_TOL,
                        pass: rep.residual <= FFT_TOL && bound_ok,
                        error: None,
                    });
                }
                Err(Error::BoundaryRoot { .. }) => {}
                Err(e) => out.push(Entry::failed(Suite::Fft, params, FFT_TOL, e)),
            }
        }
    }
    out
}

/// Scan over the `--tau-grid × --r-grid` windows, or a 5×5 log grid over
/// `[1, τ] × [1, r]`.
fn theorem1_entries(cfg: &RunConfig) -> Vec<Entry> {
    let default_axis = |hi: f64| {
        if hi > 1.0 {
            parse_axis(&format!("1:{hi}:{THEOREM1_AXIS}"), "axis")
        } else {
            Ok(vec![1.0])
        }
    };
    let axes = || -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((
            cfg.tau_grid.clone().map_or_else(|| default_axis(cfg.window.tau()), Ok)?,
            cfg.r_grid.clone().map_or_else(|| default_axis(cfg.window.r()), Ok)?,
        ))
    };
    let report = axes().and_then(|(taus, rs)| theorem1_scan(&cfg.f, &taus, &rs, &cfg.quad));
    match report {
        Ok(rep) => rep
            .checks
            .into_iter()
            .map(|c| Entry {
                suite: Suite::Theorem1.name(),
                parameters: json!({
                    "check": c.name,
                    "skipped": c.skipped,
                    "tau": c.at.map(|w| w.tau()),
                    "r": c.at.map(|w| w.r()),
                }),
                residual: c.worst,
                tolerance: c.tolerance,
                pass: c.passed,
                error: None,
            })
            .collect(),
        Err(e) => vec![Entry::failed(Suite::Theorem1, json!({}), f64::NAN, e)],
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("cannot write output: {e}"))
}
