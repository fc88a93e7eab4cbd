//! Residual checks for the identities behind `T(τ, r; f)` and a scan of its
//! properties over a window grid.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::phi::phi_mean;
use super::{
    a_point_counting, band, c_constant, characteristic, classical_t, counting_n, finish, log_mean,
    minus_flux, AnnulusWindow, Band, Characteristic, CharacteristicReport, Residual,
};
use crate::error::{Error, Result};
use crate::funcdsl::{FunctionModel, Rational};
use crate::oracle;
use crate::quad::{periodic_integrate, QuadConfig};
use crate::winding;

/// Distance below which `|f(z) − ζ|` counts as the singular set of the double integral.
const LEMMA6_SINGULAR: f64 = 1e-8;
/// Finite-difference step in `log τ` and `log r`.
const FD_STEP: f64 = 1e-4;
/// φ panels for the derivative identity of the scan.
const SCAN_PHI_PANELS: usize = 256;
/// Absolute part of the scan tolerance.
const SCAN_ABS_TOL: f64 = 1e-6;

fn rational_of<'a>(f: &'a FunctionModel, what: &str) -> Result<&'a Rational> {
    f.as_rational()
        .ok_or_else(|| Error::Unsupported(format!("{what} needs a rational model")))
}

/// `∫_s^r ν(t, f)/t dt` against `(1/π) ∫ log|f(re^{iθ})| dθ − (1/π) ∫ log|f(se^{iθ})| dθ`.
///
/// The left side integrates the step function `ν` exactly between the jump
/// radii found by [`winding::locate_jump_radii`].
pub fn jensen_v1_residual(f: &FunctionModel, s: f64, r: f64, cfg: &QuadConfig) -> Result<Residual> {
    if !(s > 0.0 && s < r) {
        return Err(Error::InvalidArgument(format!("need 0 < s < r, got s = {s}, r = {r}")));
    }
    let nu_s = winding::index(f, s, cfg)? as f64;
    let jumps = winding::locate_jump_radii(f, Complex64::new(0.0, 0.0), s, r, cfg)?;
    let lhs = nu_s * (r / s).ln()
        + jumps
            .iter()
            .map(|j| 2.0 * j.jump as f64 * (r / j.radius).ln())
            .sum::<f64>();
    let outer = log_mean(f, r, cfg)?;
    let inner = log_mean(f, s, cfg)?;
    Ok(Residual::new(
        lhs,
        2.0 * (outer.value - inner.value),
        2.0 * (outer.error + inner.error),
    ))
}

/// `N(τ, r; 1/f) − N(τ, r; f)` against
/// `(1/2π) ∫ log|f(e^{iθ}/τ)| + (1/2π) ∫ log|f(re^{iθ})| − (1/π) ∫ log|f(e^{iθ})| + ν(1, f) log √(τ/r)`.
pub fn jensen_v2_residual(f: &FunctionModel, w: &AnnulusWindow, cfg: &QuadConfig) -> Result<Residual> {
    let lhs = counting_n(&f.reciprocal(), w)? - counting_n(f, w)?;
    let inner = log_mean(f, w.inner(), cfg)?;
    let outer = log_mean(f, w.r(), cfg)?;
    let unit = log_mean(f, 1.0, cfg)?;
    let nu = winding::index(f, 1.0, cfg)? as f64;
    let rhs = inner.value + outer.value - 2.0 * unit.value + 0.5 * nu * w.log_ratio();
    Ok(Residual::new(lhs, rhs, inner.error + outer.error + 2.0 * unit.error))
}

fn unit_points(rat: &Rational, phi: f64) -> Result<Vec<Complex64>> {
    Ok(oracle::solve_a_points(rat, Complex64::from_polar(1.0, phi))?.roots)
}

/// Band signature of the a-points: counts on `T`, in `(1/τ, 1)` and in `(1, r)`.
fn signature(points: &[Complex64], w: &AnnulusWindow) -> [u32; 3] {
    let mut s = [0; 3];
    for z in points {
        match band(z.norm(), w) {
            Band::Unit => s[0] += 1,
            Band::InnerRing => s[1] += 1,
            Band::OuterRing => s[2] += 1,
            Band::Outside => {}
        }
    }
    s
}

/// `T(τ, r; f)` against the Cartan average `(1/2π) ∫ N(τ, r; 1/(f − e^{iφ})) dφ`
/// for a rational `f`. The average runs over `n_phi` panels, each split where
/// an a-point crosses one of the window's circles.
pub fn cartan_residual(f: &FunctionModel, w: &AnnulusWindow, n_phi: usize, cfg: &QuadConfig) -> Result<Residual> {
    let rat = rational_of(f, "the Cartan identity")?;
    check_panels(n_phi)?;
    let ch = characteristic(f, w, cfg)?;
    let avg = phi_mean(
        n_phi,
        |phi| Ok(signature(&unit_points(rat, phi)?, w)),
        |phi| Ok(a_point_counting(&unit_points(rat, phi)?, w)),
    )?;
    Ok(Residual::new(ch.t, avg, ch.quad_error))
}

fn check_panels(n: usize) -> Result<()> {
    if n == 0 || n > 1 << 20 {
        return Err(Error::InvalidArgument(format!("φ node count out of range: {n}")));
    }
    Ok(())
}

/// `(1/4π) ∫ ν(1, f − e^{iφ}) dφ` against `c_f`.
pub fn lemma4_residual(f: &FunctionModel, n_phi: usize, cfg: &QuadConfig) -> Result<Residual> {
    check_panels(n_phi)?;
    let nu = |phi: f64| winding::shifted_index(f, Complex64::from_polar(1.0, phi), 1.0, cfg);
    let lhs = 0.5 * phi_mean(n_phi, nu, |phi| Ok(nu(phi)? as f64))?;
    let c = c_constant(f, cfg)?;
    Ok(Residual::new(lhs, c.value, c.error))
}

/// `ν(t, f − ζ)` against `ν(t, f) − (1/π) ∫ Im(ζ f' / (f (ζ − f)) dz)`.
pub fn lemma5_residual(f: &FunctionModel, t: f64, zeta: Complex64, cfg: &QuadConfig) -> Result<Residual> {
    let lhs = winding::shifted_index(f, zeta, t, cfg)? as f64;
    let nu = winding::index(f, t, cfg)? as f64;
    let q = periodic_integrate(
        |theta| {
            let z = Complex64::from_polar(t, theta);
            let d = f.log_deriv(z).ok()?;
            let v = f.eval(z).ok()?;
            let w = zeta * z * d / (zeta - v);
            w.re.is_finite().then_some(w.re)
        },
        cfg,
    );
    if q.near_singular {
        return Err(Error::OnCircle { radius: t });
    }
    let correction = finish(q, 1.0 / PI)?;
    Ok(Residual::new(lhs, nu - correction.value, correction.error))
}

/// `(1/4π²) ∬_{T×T} Re(f' / (f (ζ − f)) dz dζ)` by an `n_grid × n_grid`
/// product trapezoid, skipping `|f(z) − ζ| < 1e-8`, against
/// `−(1/2π) ∫_{E⁻} Im(f'/f dz) − (1/4π) ∫_{E⁰} Im(f'/f dz)`.
pub fn lemma6_residual(f: &FunctionModel, n_grid: usize, cfg: &QuadConfig) -> Result<Residual> {
    check_panels(n_grid)?;
    let rhs = minus_flux(f, cfg)?;
    let nodes: Vec<Complex64> = (0..n_grid)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n_grid as f64))
        .collect();
    let rows: Vec<f64> = nodes
        .par_iter()
        .map(|&z| {
            // dz dζ = −zζ dθ dφ.
            let (Ok(d), Ok(v)) = (f.log_deriv(z), f.eval(z)) else {
                return 0.0;
            };
            let zd = z * d;
            nodes
                .iter()
                .filter(|&&zeta| (v - zeta).norm() >= LEMMA6_SINGULAR)
                .map(|&zeta| (-zeta * zd / (zeta - v)).re)
                .sum::<f64>()
        })
        .collect();
    let n2 = (n_grid as f64).powi(2);
    Ok(Residual::new(rows.iter().sum::<f64>() / n2, rhs.value, rhs.error))
}

/// Outcome of one property over the scanned grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    /// Not applicable to this model (for instance a non-rational `f`).
    pub skipped: bool,
    /// Residual or bound violation at the worst point.
    pub worst: f64,
    /// Tolerance applied at the worst point.
    pub tolerance: f64,
    /// Worst window, if any point was checked.
    pub at: Option<AnnulusWindow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub checks: Vec<PropertyCheck>,
    /// Grid-wide tolerance `1e-6 + 10 · (largest quadrature error of T)`.
    pub tolerance: f64,
}

impl Theorem1Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Tracks the point where `value − tolerance` is largest.
struct Worst {
    name: &'static str,
    excess: f64,
    value: f64,
    tolerance: f64,
    at: Option<AnnulusWindow>,
}

impl Worst {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            excess: f64::NEG_INFINITY,
            value: 0.0,
            tolerance: 0.0,
            at: None,
        }
    }

    fn record(&mut self, value: f64, tolerance: f64, at: AnnulusWindow) {
        // NaN must surface as a failure.
        let excess = if value.is_nan() { f64::INFINITY } else { value - tolerance };
        if excess > self.excess {
            self.excess = excess;
            self.value = value;
            self.tolerance = tolerance;
            self.at = Some(at);
        }
    }

    fn finish(self) -> PropertyCheck {
        PropertyCheck {
            name: self.name.to_string(),
            passed: self.excess <= 0.0,
            skipped: false,
            worst: self.value,
            tolerance: self.tolerance,
            at: self.at,
        }
    }

    fn skipped(name: &'static str) -> PropertyCheck {
        PropertyCheck {
            name: name.to_string(),
            passed: true,
            skipped: true,
            worst: 0.0,
            tolerance: 0.0,
            at: None,
        }
    }
}

fn check_axis(values: &[f64], name: &str) -> Result<()> {
    if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v >= 1.0)) {
        return Err(Error::InvalidArgument(format!("{name} grid needs finite values ≥ 1")));
    }
    if values.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidArgument(format!("{name} grid must be increasing")));
    }
    Ok(())
}

/// Second divided difference in `x`, scaled to match `T₂ − 2T₁ + T₀` on a
/// uniform grid.
fn second_difference(x: [f64; 3], t: [f64; 3]) -> f64 {
    let (h0, h1) = (x[1] - x[0], x[2] - x[1]);
    (h0 * t[2] - (h0 + h1) * t[1] + h1 * t[0]) / (0.5 * (h0 + h1))
}

/// Checks the properties of `T(τ, r; f)` on the grid `taus × rs`:
///
/// - `T ≥ 0`;
/// - `T` non-decreasing in `τ` and in `r`;
/// - convexity in `log τ` and in `log r` (second differences);
/// - `T(τ, r; 1/f) = T(τ, r; f)`;
/// - `½ ν(1, f) = c_f − c_{1/f}`;
/// - on the diagonal `τ = r`, `T(r, f) − 2T(1, f) ≤ T(r, r; f) ≤ T(r, f)` with
///   the classical characteristic (rational `f`);
/// - `τ ∂T/∂τ + r ∂T/∂r` by finite differences along the diagonal direction
///   against the φ-average of the number of `e^{iφ}`-points in the closed
///   window annulus, unit circle included (rational `f`).
///
/// Inequalities and identities are checked to `1e-6 + 10 ·` the quadrature
/// error of the values involved.
pub fn theorem1_scan(f: &FunctionModel, taus: &[f64], rs: &[f64], cfg: &QuadConfig) -> Result<Theorem1Report> {
    check_axis(taus, "τ")?;
    check_axis(rs, "r")?;
    let windows: Vec<AnnulusWindow> = taus
        .iter()
        .flat_map(|&tau| rs.iter().map(move |&r| AnnulusWindow::new(tau, r)))
        .collect::<Result<_>>()?;
    let nr = rs.len();

    let ch = Characteristic::new(f, cfg)?;
    let reports: Vec<CharacteristicReport> = windows
        .par_iter()
        .map(|w| ch.at(w))
        .collect::<Result<_>>()?;
    let recip = f.reciprocal();
    let recip_reports: Option<Vec<CharacteristicReport>> = match Characteristic::new(&recip, cfg) {
        Ok(rc) => match windows.par_iter().map(|w| rc.at(w)).collect::<Result<Vec<_>>>() {
            Ok(v) => Some(v),
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        },
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };

    let max_err = reports
        .iter()
        .chain(recip_reports.iter().flatten())
        .map(|r| r.quad_error)
        .fold(0.0, f64::max);
    let tol = SCAN_ABS_TOL + 10.0 * max_err;
    let t = |i: usize, j: usize| reports[i * nr + j].t;
    let at = |i: usize, j: usize| windows[i * nr + j];

    let mut checks = Vec::new();

    let mut nonneg = Worst::new("nonnegative");
    for (k, rep) in reports.iter().enumerate() {
        nonneg.record(-rep.t, tol, windows[k]);
    }
    checks.push(nonneg.finish());

    let mut mono_tau = Worst::new("monotone_tau");
    let mut mono_r = Worst::new("monotone_r");
    let mut convex_tau = Worst::new("convex_log_tau");
    let mut convex_r = Worst::new("convex_log_r");
    for i in 0..taus.len() {
        for j in 0..nr {
            if i + 1 < taus.len() {
                mono_tau.record(t(i, j) - t(i + 1, j), tol, at(i + 1, j));
            }
            if j + 1 < nr {
                mono_r.record(t(i, j) - t(i, j + 1), tol, at(i, j + 1));
            }
            if i >= 1 && i + 1 < taus.len() {
                let x = [taus[i - 1].ln(), taus[i].ln(), taus[i + 1].ln()];
                let d = second_difference(x, [t(i - 1, j), t(i, j), t(i + 1, j)]);
                convex_tau.record(-d, tol, at(i, j));
            }
            if j >= 1 && j + 1 < nr {
                let x = [rs[j - 1].ln(), rs[j].ln(), rs[j + 1].ln()];
                let d = second_difference(x, [t(i, j - 1), t(i, j), t(i, j + 1)]);
                convex_r.record(-d, tol, at(i, j));
            }
        }
    }
    checks.extend([mono_tau.finish(), mono_r.finish(), convex_tau.finish(), convex_r.finish()]);

    match &recip_reports {
        Some(rr) => {
            let mut sym = Worst::new("reciprocal_symmetry");
            for (k, (a, b)) in reports.iter().zip(rr).enumerate() {
                sym.record((a.t - b.t).abs(), tol, windows[k]);
            }
            checks.push(sym.finish());
        }
        None => checks.push(Worst::skipped("reciprocal_symmetry")),
    }

    match c_constant(&recip, cfg) {
        Ok(c_recip) => {
            let mut rel = Worst::new("constant_relation");
            let nu = winding::index(f, 1.0, cfg)? as f64;
            let c = ch.c_f();
            let residual = (0.5 * nu - (c.value - c_recip.value)).abs();
            rel.record(residual, SCAN_ABS_TOL + 10.0 * (c.error + c_recip.error), AnnulusWindow::unit());
            checks.push(rel.finish());
        }
        Err(Error::Unsupported(_)) => checks.push(Worst::skipped("constant_relation")),
        Err(e) => return Err(e),
    }

    let rat = f.as_rational();
    match rat {
        Some(_) => {
            let mut sandwich = Worst::new("classical_sandwich");
            let t1 = classical_t(f, 1.0, cfg)?;
            for (i, &tau) in taus.iter().enumerate() {
                for (j, &r) in rs.iter().enumerate() {
                    if (tau - r).abs() > 1e-12 * r {
                        continue;
                    }
                    let tr = classical_t(f, r, cfg)?;
                    let v = t(i, j);
                    let slack = tol + 10.0 * (tr.error + 2.0 * t1.error);
                    let violation = (tr.value - 2.0 * t1.value - v).max(v - tr.value);
                    sandwich.record(violation, slack, at(i, j));
                }
            }
            checks.push(sandwich.finish());
        }
        None => checks.push(Worst::skipped("classical_sandwich")),
    }

    match rat {
        Some(rat) => {
            let results: Vec<(f64, f64)> = windows
                .par_iter()
                .map(|w| derivative_identity(&ch, rat, w))
                .collect::<Result<_>>()?;
            let mut deriv = Worst::new("derivative_identity");
            for (k, (residual, err)) in results.into_iter().enumerate() {
                deriv.record(residual, SCAN_ABS_TOL + 10.0 * err, windows[k]);
            }
            checks.push(deriv.finish());
        }
        None => checks.push(Worst::skipped("derivative_identity")),
    }

    Ok(Theorem1Report { checks, tolerance: tol })
}

/// `|d/ds T(τe^s, re^s)|_{s=0} − (1/2π) ∫ n dφ|` and the propagated
/// quadrature error of the finite difference.
fn derivative_identity(ch: &Characteristic<'_>, rat: &Rational, w: &AnnulusWindow) -> Result<(f64, f64)> {
    let h = FD_STEP;
    let along = |s: f64| -> Result<CharacteristicReport> {
        ch.at(&AnnulusWindow::new(w.tau() * s.exp(), w.r() * s.exp())?)
    };
    let central = w.tau().min(w.r()) * (-2.0 * h).exp() >= 1.0;
    let (steps, coeffs): (&[f64], &[f64]) = if central {
        (&[-2.0, -1.0, 1.0, 2.0], &[1.0, -8.0, 8.0, -1.0])
    } else {
        (&[0.0, 1.0, 2.0, 3.0, 4.0], &[-25.0, 48.0, -36.0, 16.0, -3.0])
    };
    let mut derivative = 0.0;
    let mut error = 0.0;
    for (&k, &c) in steps.iter().zip(coeffs) {
        let rep = along(k * h)?;
        derivative += c * rep.t;
        error += c.abs() * rep.quad_error;
    }
    derivative /= 12.0 * h;
    error /= 12.0 * h;

    let count = |phi: f64| -> Result<u32> {
        Ok(signature(&unit_points(rat, phi)?, w).iter().sum())
    };
    let mean = phi_mean(SCAN_PHI_PANELS, count, |phi| Ok(count(phi)? as f64))?;
    Ok(((derivative - mean).abs(), error))
}
