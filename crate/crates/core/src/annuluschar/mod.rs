//! Counting and proximity functions on the annulus `A(1/τ, r)`, the boundary
//! constant `c_f`, the characteristic
//!
//! ```text
//! T(τ, r; f) = N(τ, r; f) + m(τ, r; f) + c_f log(τ/r)
//! ```
//!
//! and the first fundamental theorem. Residual checks for the identities
//! behind `T` live in [`identities`].

pub mod identities;
mod phi;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcdsl::{Factor, FunctionModel};
use crate::oracle;
use crate::quad::{
    arc_integrate, classify_circle, integrate_with_breaks, periodic_integrate, ArcLabel, QuadConfig,
    QuadratureResult,
};
use crate::winding::{self, A_POINT_ON_CIRCLE_REL};

pub use identities::{
    cartan_residual, jensen_v1_residual, jensen_v2_residual, lemma4_residual, lemma5_residual,
    lemma6_residual, theorem1_scan, PropertyCheck, Theorem1Report,
};

/// Relative tolerance for zeros and poles counted as lying on a circle.
const ON_CIRCLE_REL: f64 = 1e-12;

/// The window `(τ, r)`, `τ ≥ 1`, `r ≥ 1`, describing `A(1/τ, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusWindow {
    tau: f64,
    r: f64,
}

impl AnnulusWindow {
    pub fn new(tau: f64, r: f64) -> Result<Self> {
        if !(tau.is_finite() && r.is_finite() && tau >= 1.0 && r >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "window needs finite τ ≥ 1 and r ≥ 1, got τ = {tau}, r = {r}"
            )));
        }
        Ok(Self { tau, r })
    }

    /// The degenerate window `(1, 1)`: the unit circle.
    pub fn unit() -> Self {
        Self { tau: 1.0, r: 1.0 }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Inner radius `1/τ`.
    pub fn inner(&self) -> f64 {
        1.0 / self.tau
    }

    /// `log(τ/r)`, the weight of `c_f` in `T`.
    pub fn log_ratio(&self) -> f64 {
        self.tau.ln() - self.r.ln()
    }
}

/// A quadrature-derived value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }
}

/// Both sides of an identity and their absolute difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Accumulated quadrature error estimate of both sides.
    pub quad_error: f64,
}

impl Residual {
    fn new(lhs: f64, rhs: f64, quad_error: f64) -> Self {
        Self {
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
            quad_error,
        }
    }
}

fn finish(q: QuadratureResult, factor: f64) -> Result<Estimate> {
    if !q.converged {
        return Err(Error::NonConvergence {
            value: q.value * factor,
            error_estimate: q.error_estimate * factor,
            nodes: q.nodes,
        });
    }
    Ok(Estimate {
        value: q.value * factor,
        error: q.error_estimate * factor,
    })
}

fn check_radius(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be positive, got {t}")))
    }
}

/// Mean of `g` over `|z| = t`, split at the given angles when there are any.
fn circle_mean<G>(g: G, breaks: &[f64], cfg: &QuadConfig) -> Result<Estimate>
where
    G: Fn(f64) -> Option<f64>,
{
    let q = if breaks.is_empty() {
        periodic_integrate(&g, cfg)
    } else {
        integrate_with_breaks(&g, breaks, cfg)
    };
    finish(q, 1.0 / TAU)
}

/// `m(t, f) = (1/2π) ∫ log⁺|f(te^{iθ})| dθ`.
///
/// The circle is split where `|f|` crosses 1 (kinks of `log⁺`) and at known
/// zeros and poles on it.
pub fn proximity(f: &FunctionModel, t: f64, cfg: &QuadConfig) -> Result<Estimate> {
    check_radius(t)?;
    if let Some(v) = constant_value(f)? {
        return Ok(Estimate::exact(v.norm().ln().max(0.0)));
    }
    let mut breaks = classify_circle(f, t, cfg).boundaries();
    breaks.extend(f.singular_angles(t, ON_CIRCLE_REL));
    circle_mean(
        |theta| {
            f.eval(Complex64::from_polar(t, theta))
                .ok()
                .map(|v| v.norm().ln().max(0.0))
        },
        &breaks,
        cfg,
    )
}

/// `(1/2π) ∫ log|f(te^{iθ})| dθ`, split at known zeros and poles on the circle.
pub fn log_mean(f: &FunctionModel, t: f64, cfg: &QuadConfig) -> Result<Estimate> {
    check_radius(t)?;
    if let Some(v) = constant_value(f)? {
        return Ok(Estimate::exact(v.norm().ln()));
    }
    let breaks = f.singular_angles(t, ON_CIRCLE_REL);
    circle_mean(
        |theta| {
            f.eval(Complex64::from_polar(t, theta))
                .ok()
                .map(|v| v.norm().ln())
                .filter(|x| x.is_finite())
        },
        &breaks,
        cfg,
    )
}

fn constant_value(f: &FunctionModel) -> Result<Option<Complex64>> {
    if f.is_constant() {
        Ok(Some(f.eval(Complex64::new(1.0, 0.0))?))
    } else {
        Ok(None)
    }
}

/// The three proximity values of a window and their combination
/// `m(τ, r; f) = m(1/τ, f) + m(r, f) − 2 m(1, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximityParts {
    pub inner: Estimate,
    pub outer: Estimate,
    pub unit: Estimate,
}

impl ProximityParts {
    pub fn annulus(&self) -> f64 {
        self.inner.value + self.outer.value - 2.0 * self.unit.value
    }

    pub fn error(&self) -> f64 {
        self.inner.error + self.outer.error + 2.0 * self.unit.error
    }
}

fn proximity_parts(
    f: &FunctionModel,
    w: &AnnulusWindow,
    unit: Estimate,
    cfg: &QuadConfig,
) -> Result<ProximityParts> {
    let inner = if w.tau == 1.0 { unit } else { proximity(f, w.inner(), cfg)? };
    let outer = if w.r == 1.0 { unit } else { proximity(f, w.r, cfg)? };
    Ok(ProximityParts { inner, outer, unit })
}

/// `m(τ, r; f)`.
pub fn proximity_annulus(f: &FunctionModel, w: &AnnulusWindow, cfg: &QuadConfig) -> Result<Estimate> {
    let parts = proximity_parts(f, w, proximity(f, 1.0, cfg)?, cfg)?;
    Ok(Estimate {
        value: parts.annulus(),
        error: parts.error(),
    })
}

/// `N(τ, r; f)` from an enumerable pole set: the factor list of a rational
/// model, or the known poles of an expression (none for entire trees).
pub fn counting_n(f: &FunctionModel, w: &AnnulusWindow) -> Result<f64> {
    if let Some(factors) = f.exact_zeros_poles() {
        return Ok(oracle::exact_n(factors, w));
    }
    match f.known_poles() {
        Some(poles) => Ok(oracle::exact_n(&poles, w)),
        None => Err(Error::Unsupported(
            "counting function of an expression with unknown poles".into(),
        )),
    }
}

/// `N(τ, r; f)` from pole moduli located by contour moments over thin shells.
pub fn counting_n_numeric(f: &FunctionModel, w: &AnnulusWindow, cfg: &QuadConfig) -> Result<f64> {
    if w.tau == 1.0 && w.r == 1.0 {
        return Ok(0.0);
    }
    // Scan slightly past both edges so a pole on an edge circle is not at a
    // scan endpoint; such poles carry zero weight anyway.
    let jumps = winding::located_poles(f, 0.99 * w.inner(), 1.01 * w.r, cfg)?;
    let poles: Vec<Factor> = jumps
        .iter()
        .map(|j| Factor::new(j.radius, -(j.jump as i32)))
        .collect();
    Ok(counting_from_moduli(&poles, w))
}

fn counting_from_moduli(poles: &[Factor], w: &AnnulusWindow) -> f64 {
    let boundary = 0.5 * (w.tau * w.r).ln();
    poles
        .iter()
        .map(|p| {
            let m = p.root.norm();
            let k = p.multiplicity.unsigned_abs() as f64;
            if (m - 1.0).abs() <= 1e-9 {
                k * boundary
            } else if m < 1.0 {
                k * (w.tau * m).ln().max(0.0)
            } else {
                k * (w.r / m).ln().max(0.0)
            }
        })
        .fold(0.0, |acc, x| acc + x)
}

/// `(1/2π) ∫ Re(z f'/f)` over the unit-circle arcs, weighted per label.
fn unit_circle_flux(f: &FunctionModel, weights: [(ArcLabel, f64); 3], cfg: &QuadConfig) -> Result<Estimate> {
    if let Some(factors) = f.exact_zeros_poles() {
        if let Some(bad) = factors
            .iter()
            .find(|x| (x.root.norm() - 1.0).abs() <= ON_CIRCLE_REL)
        {
            return Err(Error::BoundaryRoot { z: bad.root });
        }
    } else if !f.singular_angles(1.0, ON_CIRCLE_REL).is_empty() {
        return Err(Error::OnCircle { radius: 1.0 });
    }
    if f.is_constant() {
        return Ok(Estimate::exact(0.0));
    }
    let g = |theta: f64| {
        let z = Complex64::from_polar(1.0, theta);
        f.log_deriv(z).ok().map(|d| (z * d).re)
    };
    let partition = classify_circle(f, 1.0, cfg);
    let mut total = Estimate::exact(0.0);
    for (label, weight) in weights {
        if weight == 0.0 {
            continue;
        }
        let arcs = partition.arcs_with(label);
        if arcs.is_empty() {
            continue;
        }
        let q = if partition.arcs.len() == 1 {
            periodic_integrate(g, cfg)
        } else {
            arc_integrate(&g, &arcs, cfg)
        };
        if q.near_singular {
            return Err(Error::OnCircle { radius: 1.0 });
        }
        let e = finish(q, weight / TAU)?;
        total.value += e.value;
        total.error += e.error;
    }
    Ok(total)
}

/// `c_f = (1/2π) ∫_{E⁺} Im(f'/f dz) + (1/4π) ∫_{E⁰} Im(f'/f dz)` over the unit
/// circle, with `E⁺`, `E⁰` the arcs where `|f| > 1` and `|f| = 1`.
pub fn c_constant(f: &FunctionModel, cfg: &QuadConfig) -> Result<Estimate> {
    unit_circle_flux(
        f,
        [(ArcLabel::Plus, 1.0), (ArcLabel::Zero, 0.5), (ArcLabel::Minus, 0.0)],
        cfg,
    )
}

/// `−(1/2π) ∫_{E⁻} Im(f'/f dz) − (1/4π) ∫_{E⁰} Im(f'/f dz)`.
pub(crate) fn minus_flux(f: &FunctionModel, cfg: &QuadConfig) -> Result<Estimate> {
    unit_circle_flux(
        f,
        [(ArcLabel::Plus, 0.0), (ArcLabel::Zero, -0.5), (ArcLabel::Minus, -1.0)],
        cfg,
    )
}

/// Components of `T(τ, r; f)` for one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicReport {
    #[serde(rename = "N")]
    pub n: f64,
    pub m_inner: f64,
    pub m_outer: f64,
    pub m_unit: f64,
    pub m_annulus: f64,
    pub c_f: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub window: AnnulusWindow,
    /// Accumulated quadrature error estimate of `T`.
    pub quad_error: f64,
    /// A pole of `f` lies on `|z| = 1/τ` or `|z| = r`.
    pub edge_pole: bool,
}

/// Evaluates `T(τ, r; f)` over many windows, sharing the unit-circle data.
#[derive(Debug, Clone)]
pub struct Characteristic<'a> {
    f: &'a FunctionModel,
    cfg: QuadConfig,
    m_unit: Estimate,
    c_f: Estimate,
}

impl<'a> Characteristic<'a> {
    pub fn new(f: &'a FunctionModel, cfg: &QuadConfig) -> Result<Self> {
        Ok(Self {
            f,
            cfg: *cfg,
            m_unit: proximity(f, 1.0, cfg)?,
            c_f: c_constant(f, cfg)?,
        })
    }

    pub fn c_f(&self) -> Estimate {
        self.c_f
    }

    pub fn m_unit(&self) -> Estimate {
        self.m_unit
    }

    pub fn at(&self, w: &AnnulusWindow) -> Result<CharacteristicReport> {
        let n = counting_n(self.f, w)?;
        let edge_pole = match self.f.exact_zeros_poles() {
            Some(factors) => !oracle::poles_on_window_edges(factors, w).is_empty(),
            None => self
                .f
                .known_poles()
                .is_some_and(|p| !oracle::poles_on_window_edges(&p, w).is_empty()),
        };
        let parts = proximity_parts(self.f, w, self.m_unit, &self.cfg)?;
        let m_annulus = parts.annulus();
        let log_ratio = w.log_ratio();
        Ok(CharacteristicReport {
            n,
            m_inner: parts.inner.value,
            m_outer: parts.outer.value,
            m_unit: parts.unit.value,
            m_annulus,
            c_f: self.c_f.value,
            t: n + m_annulus + self.c_f.value * log_ratio,
            window: *w,
            quad_error: parts.error() + self.c_f.error * log_ratio.abs(),
            edge_pole,
        })
    }
}

/// `T(τ, r; f)` with its components.
pub fn characteristic(f: &FunctionModel, w: &AnnulusWindow, cfg: &QuadConfig) -> Result<CharacteristicReport> {
    Characteristic::new(f, cfg)?.at(w)
}

/// Classical characteristic `T(r, f) = m(r, f) + N(r, f)` of a rational model,
/// poles at the origin included.
pub fn classical_t(f: &FunctionModel, r: f64, cfg: &QuadConfig) -> Result<Estimate> {
    let factors = f
        .exact_zeros_poles()
        .ok_or_else(|| Error::Unsupported("classical characteristic needs a rational model".into()))?;
    let m = proximity(f, r, cfg)?;
    Ok(Estimate {
        value: m.value + oracle::classical_n(factors, r),
        error: m.error,
    })
}

/// First fundamental theorem at one value `a`:
/// `N(τ, r; 1/(f−a)) + m(τ, r; 1/(f−a)) = T(τ, r; f) + ε₁ + ε₂ log(τ/r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FftReport {
    pub a: Complex64,
    pub window: AnnulusWindow,
    /// `N(τ, r; 1/(f−a)) + m(τ, r; 1/(f−a))`.
    pub lhs: f64,
    #[serde(rename = "T")]
    pub t: f64,
    /// `m(τ, r; f − a) − m(τ, r; f)`.
    pub eps1: f64,
    /// `½ ν(1, f − a) − c_f`.
    pub eps2: f64,
    /// `4 log⁺|a| + 4 log 2`.
    pub eps1_bound: f64,
    /// `|lhs − (T + ε₁ + ε₂ log(τ/r))|`.
    pub residual: f64,
    pub quad_error: f64,
}

/// [`FftReport`] for a rational `f`. Fails with [`Error::BoundaryRoot`] when an
/// a-point lies on one of the circles `1/τ`, `1`, `r`.
pub fn fft(f: &FunctionModel, a: Complex64, w: &AnnulusWindow, cfg: &QuadConfig) -> Result<FftReport> {
    let rat = f
        .as_rational()
        .ok_or_else(|| Error::Unsupported("first fundamental theorem needs a rational model".into()))?;
    if f.is_constant() {
        return Err(Error::InvalidArgument("f must be non-constant".into()));
    }
    let points = oracle::solve_a_points(rat, a)?;
    for z in &points.roots {
        let m = z.norm();
        if [w.inner(), 1.0, w.r]
            .iter()
            .any(|&c| (m - c).abs() <= A_POINT_ON_CIRCLE_REL * c)
        {
            return Err(Error::BoundaryRoot { z: *z });
        }
    }
    let g = FunctionModel::Rational(oracle::shifted_rational(rat, a)?);
    let h = g.reciprocal();

    let ch = characteristic(f, w, cfg)?;
    let m_h = proximity_annulus(&h, w, cfg)?;
    let m_g = proximity_annulus(&g, w, cfg)?;
    let lhs = counting_n(&h, w)? + m_h.value;
    let eps1 = m_g.value - ch.m_annulus;
    let c_f = c_constant(f, cfg)?;
    let eps2 = 0.5 * winding::index(&g, 1.0, cfg)? as f64 - c_f.value;
    let log_ratio = w.log_ratio();
    let rhs = ch.t + eps1 + eps2 * log_ratio;
    Ok(FftReport {
        a,
        window: *w,
        lhs,
        t: ch.t,
        eps1,
        eps2,
        eps1_bound: 4.0 * a.norm().ln().max(0.0) + 4.0 * 2f64.ln(),
        residual: (lhs - rhs).abs(),
        quad_error: ch.quad_error + m_h.error + m_g.error + c_f.error * log_ratio.abs(),
    })
}

/// `N(τ, r; 1/(f − a))` from the a-points of a rational `f`, each weighted by
/// its band: `log(τ|b|)` inside the unit circle, `log(r/|b|)` outside and
/// `log √(τr)` on it.
pub(crate) fn a_point_counting(roots: &[Complex64], w: &AnnulusWindow) -> f64 {
    let boundary = 0.5 * (w.tau * w.r).ln();
    roots
        .iter()
        .map(|b| {
            let m = b.norm();
            match band(m, w) {
                Band::Unit => boundary,
                Band::InnerRing => (w.tau * m).ln(),
                Band::OuterRing => (w.r / m).ln(),
                Band::Outside => 0.0,
            }
        })
        .fold(0.0, |acc, x| acc + x)
}

/// Position of a modulus relative to the window's three circles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Band {
    Unit,
    InnerRing,
    OuterRing,
    Outside,
}

pub(crate) fn band(m: f64, w: &AnnulusWindow) -> Band {
    if (m - 1.0).abs() <= A_POINT_ON_CIRCLE_REL {
        Band::Unit
    } else if m < 1.0 && m * w.tau > 1.0 {
        Band::InnerRing
    } else if m > 1.0 && m < w.r {
        Band::OuterRing
    } else {
        Band::Outside
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    fn win(tau: f64, r: f64) -> AnnulusWindow {
        AnnulusWindow::new(tau, r).unwrap()
    }

    fn rat(factors: &[(f64, i32)]) -> FunctionModel {
        FunctionModel::rational(1.0, factors.iter().map(|&(r, m)| Factor::new(r, m))).unwrap()
    }

    #[test]
    fn window_rejects_small_parameters() {
        assert!(AnnulusWindow::new(0.5, 2.0).is_err());
        assert!(AnnulusWindow::new(2.0, f64::NAN).is_err());
        assert_eq!(AnnulusWindow::unit(), win(1.0, 1.0));
    }

    #[test]
    fn proximity_examples() {
        let z2 = FunctionModel::parse("z^2").unwrap();
        let p = proximity(&z2, 3.0, &cfg()).unwrap();
        assert!((p.value - 2.0 * 3f64.ln()).abs() < 1e-12);
        assert!(proximity(&z2, 0.5, &cfg()).unwrap().value.abs() < 1e-15);
        let five = FunctionModel::parse("5").unwrap();
        assert_eq!(proximity(&five, 0.3, &cfg()).unwrap().value, 5f64.ln());
        assert_eq!(proximity_annulus(&five, &win(2.0, 3.0), &cfg()).unwrap().value, 0.0);
    }

    #[test]
    fn proximity_annulus_of_monomials() {
        let (tau, r) = (2.5, 1.7);
        for m in [1, 3] {
            let p = proximity_annulus(&FunctionModel::monomial(m), &win(tau, r), &cfg()).unwrap();
            assert!((p.value - m as f64 * r.ln()).abs() < 1e-10);
            let q = proximity_annulus(&FunctionModel::monomial(-m), &win(tau, r), &cfg()).unwrap();
            assert!((q.value - m as f64 * tau.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn proximity_with_kinks_matches_closed_form() {
        // |f| > 1 on |z| = 4, so m is the Jensen mean log|f| = log(4/2).
        let f = FunctionModel::parse("(z-0.5)/2").unwrap();
        let want = (4f64 / 2.0).ln();
        assert!((proximity(&f, 4.0, &cfg()).unwrap().value - want).abs() < 1e-10);
        // |z + 0.3| crosses 1 on the unit circle: log|f| = log⁺|f| − log⁺|1/f|.
        let g = FunctionModel::parse("z+0.3").unwrap();
        let lhs = proximity(&g, 1.0, &cfg()).unwrap().value
            - proximity(&g.reciprocal(), 1.0, &cfg()).unwrap().value;
        assert!((lhs - log_mean(&g, 1.0, &cfg()).unwrap().value).abs() < 1e-10);
        assert!(log_mean(&g, 1.0, &cfg()).unwrap().value.abs() < 1e-10);
    }

    #[test]
    fn log_mean_with_pole_on_circle() {
        // Jensen: mean of log|z − 1| over the unit circle is 0.
        let f = rat(&[(1.0, -1)]);
        assert!(log_mean(&f, 1.0, &cfg()).unwrap().value.abs() < 1e-9);
    }

    #[test]
    fn counting_examples() {
        let f = rat(&[(2.0, -1)]);
        assert!((counting_n(&f, &win(3.0, 4.0)).unwrap() - 2f64.ln()).abs() < 1e-15);
        let e2 = 2f64.exp();
        let g = rat(&[(1.0, -1)]);
        assert!((counting_n(&g, &win(e2, e2)).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(counting_n(&FunctionModel::monomial(3), &win(5.0, 5.0)).unwrap(), 0.0);
        let unknown = FunctionModel::parse("1/(z-2)").unwrap();
        assert!(matches!(counting_n(&unknown, &win(3.0, 4.0)), Err(Error::Unsupported(_))));
        let known = unknown.with_known_poles(vec![Factor::new(2.0, -1)]).unwrap();
        assert!((counting_n(&known, &win(3.0, 4.0)).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn numeric_counting_matches_exact() {
        let f = rat(&[(0.5, -1), (1.7, -2), (0.4, 1)]);
        let w = win(3.0, 2.5);
        let exact = counting_n(&f, &w).unwrap();
        let numeric = counting_n_numeric(&f.to_expression(), &w, &cfg()).unwrap();
        assert!((exact - numeric).abs() < 1e-8, "{exact} vs {numeric}");
    }

    #[test]
    fn c_constant_examples() {
        for m in [1, 2, 5] {
            let c = c_constant(&FunctionModel::monomial(m), &cfg()).unwrap();
            assert!((c.value - m as f64 / 2.0).abs() < 1e-12);
        }
        assert_eq!(c_constant(&FunctionModel::parse("5").unwrap(), &cfg()).unwrap().value, 0.0);
        let c = c_constant(&FunctionModel::parse("2*z").unwrap(), &cfg()).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);
        let d = c_constant(&rat(&[(2.0, 1), (0.5, -1)]), &cfg()).unwrap();
        assert!((d.value + 1.0).abs() < 1e-10, "{}", d.value);
        assert!(c_constant(&rat(&[(1.0, 1)]), &cfg()).is_err());
    }

    #[test]
    fn characteristic_examples() {
        let (tau, r) = (2.0, 3.0);
        let z2 = FunctionModel::parse("z^2").unwrap();
        let rep = characteristic(&z2, &win(tau, r), &cfg()).unwrap();
        assert!((rep.t - (tau.ln() + r.ln())).abs() < 1e-10);
        assert!((rep.c_f - 1.0).abs() < 1e-12);
        assert_eq!(rep.n, 0.0);
        assert_eq!(rep.m_annulus, rep.m_inner + rep.m_outer - 2.0 * rep.m_unit);
        assert_eq!(rep.t, rep.n + rep.m_annulus + rep.c_f * (tau.ln() - r.ln()));

        let f = rat(&[(2.0, 1), (0.5, -1)]);
        assert_eq!(characteristic(&f, &AnnulusWindow::unit(), &cfg()).unwrap().t, 0.0);
        let five = FunctionModel::parse("5").unwrap();
        assert_eq!(characteristic(&five, &win(7.0, 7.0), &cfg()).unwrap().t, 0.0);
    }

    #[test]
    fn classical_examples() {
        let r = 2.5;
        let z2 = FunctionModel::monomial(2);
        assert!((classical_t(&z2, r, &cfg()).unwrap().value - 2.0 * r.ln()).abs() < 1e-12);
        let inv = FunctionModel::monomial(-1);
        assert!((classical_t(&inv, r, &cfg()).unwrap().value - r.ln()).abs() < 1e-12);
        let f = rat(&[(2.0, 1), (0.5, -1)]);
        let want = proximity(&f, 4.0, &cfg()).unwrap().value + 8f64.ln();
        assert!((classical_t(&f, 4.0, &cfg()).unwrap().value - want).abs() < 1e-14);
    }

    #[test]
    fn fft_examples() {
        let (tau, r) = (2.0, 3.5);
        let w = win(tau, r);
        let zero = Complex64::new(0.0, 0.0);
        let z2 = FunctionModel::parse("z^2").unwrap();
        assert!(fft(&z2, zero, &w, &cfg()).is_err());
        let z2 = FunctionModel::monomial(2);
        let rep = fft(&z2, zero, &w, &cfg()).unwrap();
        assert!((rep.lhs - 2.0 * tau.ln()).abs() < 1e-10);
        assert!((rep.eps2 - 1.0).abs() < 1e-12);
        assert!(rep.eps1.abs() < 1e-12);
        assert!(rep.residual < 1e-10);
        let z = FunctionModel::monomial(1);
        let rep = fft(&z, zero, &w, &cfg()).unwrap();
        assert!((rep.eps2 - 0.5).abs() < 1e-12);
        assert!(rep.residual < 1e-10);
    }

    #[test]
    fn fft_rejects_a_points_on_measurement_circles() {
        let f = rat(&[(2.0, 1), (0.5, -1)]);
        let w = win(2.0, 2.0);
        assert!(matches!(
            fft(&f, Complex64::new(0.0, 0.0), &w, &cfg()),
            Err(Error::BoundaryRoot { .. })
        ));
        let rep = fft(&f, Complex64::new(1.5, -1.5), &w, &cfg()).unwrap();
        assert!(rep.residual < 1e-7);
        assert!(rep.eps1.abs() <= rep.eps1_bound);
    }
}
