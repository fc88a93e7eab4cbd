//! The circle index `ν(t, f) = (1/π) ∫_{|z|=t} Im(f'/f dz)` and counting of
//! zeros, poles and a-points by the argument principle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcdsl::FunctionModel;
use crate::oracle;
use crate::quad::{periodic_integrate, QuadConfig, QuadratureResult};

mod shells;

pub use shells::shell_factors;

/// Largest admissible distance of the raw index from an integer.
pub const INTEGRALITY_SLACK: f64 = 0.05;
/// Relative tolerance for numerically computed a-points lying on a circle.
pub const A_POINT_ON_CIRCLE_REL: f64 = 1e-9;
/// Radial offset used when an expression's index cannot be computed on the circle itself.
pub const ON_CIRCLE_OFFSET: f64 = 1e-4;
/// Relative modulus difference below which located points share a jump radius.
const CLUSTER_REL: f64 = 1e-7;
/// Quadrature tolerance for the shell moments of the jump scan.
const SCAN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub value: i64,
    pub raw: f64,
    pub quad: QuadratureResult,
}

/// `ν(t, f)` by periodic quadrature of `Re(z f'(z)/f(z))`, rounded.
///
/// On-circle zeros and poles need no special treatment: for a simple zero at
/// `b` with `|b| = t`, `Re(z/(z − b)) = 1/2` on the circle, so the integrand
/// stays bounded and the raw value comes out odd.
pub fn quadrature_index(f: &FunctionModel, t: f64, cfg: &QuadConfig) -> Result<IndexEstimate> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {t}")));
    }
    let q = periodic_integrate(
        |theta| {
            let z = Complex64::from_polar(t, theta);
            f.log_deriv(z).ok().map(|d| (z * d).re)
        },
        cfg,
    );
    if !q.converged {
        return Err(Error::NonConvergence {
            value: q.value / PI,
            error_estimate: q.error_estimate / PI,
            nodes: q.nodes,
        });
    }
    let raw = q.value / PI;
    let value = raw.round();
    if (raw - value).abs() > INTEGRALITY_SLACK {
        return Err(Error::Integrality { radius: t, raw });
    }
    Ok(IndexEstimate {
        value: value as i64,
        raw,
        quad: q,
    })
}

/// `ν(t, f)`. Rational models use the exact factor count; expressions use
/// quadrature, falling back to the mean of `ν(t(1 ± ε))` when the circle
/// itself cannot be integrated.
pub fn index(f: &FunctionModel, t: f64, cfg: &QuadConfig) -> Result<i64> {
    if let Some(factors) = f.exact_zeros_poles() {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {t}")));
        }
        return Ok(oracle::exact_index(factors, t));
    }
    match quadrature_index(f, t, cfg) {
        Ok(est) => Ok(est.value),
        Err(first) => {
            let inner = quadrature_index(f, t * (1.0 - ON_CIRCLE_OFFSET), cfg);
            let outer = quadrature_index(f, t * (1.0 + ON_CIRCLE_OFFSET), cfg);
            match (inner, outer) {
                (Ok(i), Ok(o)) if (o.value - i.value) % 2 == 0 && i.value != o.value => {
                    Ok((i.value + o.value) / 2)
                }
                (Ok(_), Ok(_)) => Err(first),
                _ => Err(Error::OnCircle { radius: t }),
            }
        }
    }
}

/// `ν(t, f − a)`; for rational `f` from the exact a-points.
pub fn shifted_index(f: &FunctionModel, a: Complex64, t: f64, cfg: &QuadConfig) -> Result<i64> {
    match f.as_rational() {
        Some(r) => {
            let pts = oracle::solve_a_points(r, a)?;
            let weight = |m: f64| -> i64 {
                if (m - t).abs() <= A_POINT_ON_CIRCLE_REL * t {
                    1
                } else if m < t {
                    2
                } else {
                    0
                }
            };
            let zeros: i64 = pts.roots.iter().map(|z| weight(z.norm())).sum();
            let poles: i64 = r
                .poles()
                .map(|p| weight(p.root.norm()) * p.multiplicity.unsigned_abs() as i64)
                .sum();
            Ok(zeros - poles)
        }
        None => index(&f.shift(a), t, cfg),
    }
}

/// Zeros (`f = a` points) and poles of `f` in the annulus `s < |z| < r`.
/// Counts include multiplicity; the unit-circle counts are a subset of the
/// interior counts when `s < 1 < r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingData {
    pub inner: f64,
    pub outer: f64,
    pub zeros_interior: u32,
    pub poles_interior: u32,
    pub zeros_on_unit_circle: u32,
    pub poles_on_unit_circle: u32,
    pub exact: bool,
}

pub fn count_a_points(
    f: &FunctionModel,
    a: Complex64,
    s: f64,
    r: f64,
    cfg: &QuadConfig,
) -> Result<CountingData> {
    if !(s > 0.0 && s < r) {
        return Err(Error::InvalidArgument(format!("need 0 < s < r, got s = {s}, r = {r}")));
    }
    let contains_unit = s < 1.0 && 1.0 < r;
    let near = |m: f64, t: f64| (m - t).abs() <= A_POINT_ON_CIRCLE_REL * t;
    if let Some(rat) = f.as_rational() {
        let pts = oracle::solve_a_points(rat, a)?;
        let mut data = CountingData {
            inner: s,
            outer: r,
            zeros_interior: 0,
            poles_interior: 0,
            zeros_on_unit_circle: 0,
            poles_on_unit_circle: 0,
            exact: true,
        };
        for z in &pts.roots {
            let m = z.norm();
            if near(m, s) || near(m, r) {
                return Err(Error::BoundaryRoot { z: *z });
            }
            if s < m && m < r {
                data.zeros_interior += 1;
                if contains_unit && near(m, 1.0) {
                    data.zeros_on_unit_circle += 1;
                }
            }
        }
        for p in rat.poles() {
            let m = p.root.norm();
            let k = p.multiplicity.unsigned_abs();
            if s < m && m < r {
                data.poles_interior += k;
                if contains_unit && near(m, 1.0) {
                    data.poles_on_unit_circle += k;
                }
            }
        }
        return Ok(data);
    }

    let poles = f.known_poles().ok_or_else(|| {
        Error::Unsupported("a-point counting for an expression with unknown poles".into())
    })?;
    if poles.iter().any(|p| {
        let m = p.root.norm();
        s <= m && m <= r
    }) {
        return Err(Error::Unsupported(
            "a-point counting for an expression with poles in the annulus".into(),
        ));
    }
    let g = f.shift(a);
    // An odd index on a boundary circle betrays a root on it.
    let boundary = |t: f64| match quadrature_index(&g, t, cfg) {
        Ok(est) if est.value % 2 == 0 => Ok(est),
        Ok(_) | Err(Error::Integrality { .. }) | Err(Error::NonConvergence { .. }) => {
            Err(Error::BoundaryRoot {
                z: Complex64::new(t, 0.0),
            })
        }
        Err(other) => Err(other),
    };
    let outer = boundary(r)?.value;
    let inner = boundary(s)?.value;
    let on_unit = if contains_unit {
        let lo = quadrature_index(&g, 1.0 - ON_CIRCLE_OFFSET, cfg)?.value;
        let hi = quadrature_index(&g, 1.0 + ON_CIRCLE_OFFSET, cfg)?.value;
        ((hi - lo) / 2).max(0) as u32
    } else {
        0
    };
    Ok(CountingData {
        inner: s,
        outer: r,
        zeros_interior: ((outer - inner) / 2).max(0) as u32,
        poles_interior: 0,
        zeros_on_unit_circle: on_unit,
        poles_on_unit_circle: 0,
        exact: false,
    })
}

/// Radius at which `ν(t, f − a)` jumps by `2 · jump`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpRadius {
    pub radius: f64,
    pub jump: i64,
}

/// Moduli of the a-points of `f` in `(tmin, tmax)` with signed multiplicity
/// (poles count negative). Points are located by contour moments over thin
/// shells (see [`shell_factors`]) and merged when their moduli agree.
pub fn locate_jump_radii(
    f: &FunctionModel,
    a: Complex64,
    tmin: f64,
    tmax: f64,
    cfg: &QuadConfig,
) -> Result<Vec<JumpRadius>> {
    let scan_cfg = QuadConfig {
        tol: cfg.tol.max(SCAN_TOL),
        ..*cfg
    };
    let mut out: Vec<JumpRadius> = Vec::new();
    for x in shell_factors(&f.shift(a), tmin, tmax, &scan_cfg)? {
        let m = x.root.norm();
        match out.last_mut() {
            Some(j) if (m - j.radius).abs() <= CLUSTER_REL * m => j.jump += x.multiplicity as i64,
            _ => out.push(JumpRadius {
                radius: m,
                jump: x.multiplicity as i64,
            }),
        }
    }
    out.retain(|j| j.jump != 0);
    Ok(out)
}

/// Residuals of the two argument-principle relations
///
/// `ν(t) − ν(1) = 2n(1,t;1/f) + n(T,1/f) − 2n(1,t;f) − n(T,f)` and
/// `ν(1) − ν(1/t) = 2n(1/t,1;1/f) + n(T,1/f) − 2n(1/t,1;f) − n(T,f)`,
///
/// left sides from [`oracle::exact_index`], right sides from counting factor
/// moduli. Both are zero for every admissible input.
pub fn check_eq12_eq13(f: &FunctionModel, t: f64) -> Result<(i64, i64)> {
    let factors = f
        .exact_zeros_poles()
        .ok_or_else(|| Error::Unsupported("argument-principle check needs a rational model".into()))?;
    if !(t > 1.0) {
        return Err(Error::InvalidArgument(format!("need t > 1, got {t}")));
    }
    let tol = oracle::ON_CIRCLE_REL;
    let near = |m: f64, c: f64| (m - c).abs() <= tol * c.max(1.0);
    for fa in factors {
        let m = fa.root.norm();
        if near(m, t) || near(m, 1.0 / t) {
            return Err(Error::OnCircle {
                radius: if near(m, t) { t } else { 1.0 / t },
            });
        }
    }
    // n over an open band for zeros (sign > 0) or poles (sign < 0).
    let band = |lo: f64, hi: f64, sign: i32| -> i64 {
        factors
            .iter()
            .filter(|x| x.multiplicity.signum() == sign)
            .filter(|x| {
                let m = x.root.norm();
                lo < m && m < hi && !near(m, 1.0)
            })
            .map(|x| x.multiplicity.unsigned_abs() as i64)
            .sum()
    };
    let on_unit = |sign: i32| -> i64 {
        factors
            .iter()
            .filter(|x| x.multiplicity.signum() == sign && near(x.root.norm(), 1.0))
            .map(|x| x.multiplicity.unsigned_abs() as i64)
            .sum()
    };
    let nu = |r: f64| oracle::exact_index(factors, r);
    let (zt, pt) = (on_unit(1), on_unit(-1));
    let left12 = nu(t) - nu(1.0);
    let right12 = 2 * band(1.0, t, 1) + zt - 2 * band(1.0, t, -1) - pt;
    let left13 = nu(1.0) - nu(1.0 / t);
    let right13 = 2 * band(1.0 / t, 1.0, 1) + zt - 2 * band(1.0 / t, 1.0, -1) - pt;
    Ok((left12 - right12, left13 - right13))
}

/// Poles of `f` with modulus in `(tmin, tmax)`, located by contour moments
/// over thin shells (see [`shell_factors`]).
pub fn located_poles(f: &FunctionModel, tmin: f64, tmax: f64, cfg: &QuadConfig) -> Result<Vec<JumpRadius>> {
    Ok(shell_factors(f, tmin, tmax, cfg)?
        .into_iter()
        .filter(|x| x.multiplicity < 0)
        .map(|x| JumpRadius {
            radius: x.root.norm(),
            jump: -x.multiplicity as i64,
        })
        .collect())
}
