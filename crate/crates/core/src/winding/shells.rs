//! Zeros and poles in thin annular shells from contour moments.
//!
//! For a shell `a < |z| < b` with centre radius `ρ` the moments
//!
//! ```text
//! s_j = (1/2πi) (∮_{|z|=b} − ∮_{|z|=a}) (z/ρ)^j f'(z)/f(z) dz = Σ_k m_k (b_k/ρ)^j
//! ```
//!
//! are power sums of the enclosed zeros (`m_k > 0`) and poles (`m_k < 0`).
//! The rank of their Hankel matrix is the number of distinct points, and a
//! Prony step recovers the points with their signed multiplicities. A zero
//! and a pole of equal modulus are told apart, which the circle index alone
//! cannot do.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcdsl::{Factor, FunctionModel};
use crate::oracle::{poly_roots, PolyCoeffs};
use crate::quad::{periodic_integrate, QuadConfig, QuadValue};

/// Largest number of distinct points resolved in one shell before it is split.
const MAX_POINTS: usize = 8;
const MOMENTS: usize = 2 * MAX_POINTS;
/// Initial shell width in `log t`.
const SHELL_LOG_WIDTH: f64 = 0.05;
/// Singular values below this multiple of the moment scale count as zero.
const RANK_REL: f64 = 1e-7;
/// Largest admissible distance of a recovered multiplicity from an integer.
const WEIGHT_SLACK: f64 = 0.05;
const MAX_SPLITS: usize = 12;
/// Node budget for a shell boundary; circles needing more are moved.
const BOUNDARY_NODES: usize = 1 << 16;

#[derive(Debug, Clone, Copy)]
struct Moments([Complex64; MOMENTS]);

impl Add for Moments {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self.0.iter_mut().zip(o.0).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for Moments {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        self.0.iter_mut().zip(o.0).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Mul<f64> for Moments {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        self.0.iter_mut().for_each(|a| *a *= s);
        self
    }
}

impl QuadValue for Moments {
    fn zero() -> Self {
        Moments([Complex64::new(0.0, 0.0); MOMENTS])
    }
    fn magnitude(self) -> f64 {
        self.0.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// A circle and its moments `(1/2πi) ∮ (z/t)^j f'/f dz`, `j = 0, …, 15`.
#[derive(Debug, Clone, Copy)]
struct Circle {
    t: f64,
    m: Moments,
}

fn circle_moments(f: &FunctionModel, t: f64, cfg: &QuadConfig) -> Result<Circle> {
    let q = periodic_integrate(
        |theta| {
            let u = Complex64::from_polar(1.0, theta);
            let z = u * t;
            let mut p = z * f.log_deriv(z).ok()?;
            let mut m = [Complex64::new(0.0, 0.0); MOMENTS];
            for slot in &mut m {
                *slot = p;
                p *= u;
            }
            Some(Moments(m))
        },
        cfg,
    );
    if q.near_singular {
        return Err(Error::OnCircle { radius: t });
    }
    if !q.converged {
        return Err(Error::NonConvergence {
            value: q.value.magnitude(),
            error_estimate: q.error_estimate,
            nodes: q.nodes,
        });
    }
    Ok(Circle {
        t,
        m: q.value * (1.0 / TAU),
    })
}

/// Moments on a circle near `t`, moved by up to `log_spread` in `log t`
/// when the circle passes too close to a zero or pole.
fn usable_circle(f: &FunctionModel, t: f64, log_spread: f64, cfg: &QuadConfig) -> Result<Circle> {
    let mut last = None;
    for shift in [0.0, 0.37, -0.41, 0.73, -0.77] {
        match circle_moments(f, t * (shift * log_spread).exp(), cfg) {
            Ok(c) => return Ok(c),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

/// Zeros (`multiplicity > 0`) and poles (`multiplicity < 0`) of `f` with
/// modulus between `tmin` and `tmax`. Both ends may move by a few percent of
/// a shell width when a zero or pole lies on them.
pub fn shell_factors(f: &FunctionModel, tmin: f64, tmax: f64, cfg: &QuadConfig) -> Result<Vec<Factor>> {
    if !(tmin > 0.0 && tmin < tmax && tmax.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < tmin < tmax, got {tmin}, {tmax}"
        )));
    }
    let boundary_cfg = QuadConfig {
        max_nodes: cfg.max_nodes.min(BOUNDARY_NODES),
        ..*cfg
    };
    let span = (tmax / tmin).ln();
    let shells = (span / SHELL_LOG_WIDTH).ceil().max(1.0) as usize;
    let h = span / shells as f64;
    let circles: Vec<Circle> = (0..=shells)
        .map(|k| usable_circle(f, tmin * (h * k as f64).exp(), 0.1 * h, &boundary_cfg))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for pair in circles.windows(2) {
        recover(f, pair[0], pair[1], 0, &boundary_cfg, &mut out)?;
    }
    out.sort_by(|a, b| a.root.norm().total_cmp(&b.root.norm()));
    Ok(out)
}

fn recover(
    f: &FunctionModel,
    lo: Circle,
    hi: Circle,
    depth: usize,
    cfg: &QuadConfig,
    out: &mut Vec<Factor>,
) -> Result<()> {
    let rho = (lo.t * hi.t).sqrt();
    let mut s = [Complex64::new(0.0, 0.0); MOMENTS];
    let mut scale: f64 = 1.0;
    for j in 0..MOMENTS {
        let (a, b) = ((lo.t / rho).powi(j as i32), (hi.t / rho).powi(j as i32));
        s[j] = hi.m.0[j] * b - lo.m.0[j] * a;
        scale = scale.max(hi.m.0[j].norm() * b + lo.m.0[j].norm() * a);
    }
    if let Some(points) = prony(&s, scale) {
        let inside = points.iter().all(|(b, _)| {
            let m = b.norm() * rho;
            m > lo.t * (1.0 - 1e-9) && m < hi.t * (1.0 + 1e-9)
        });
        if inside {
            out.extend(points.into_iter().map(|(b, k)| Factor::new(b * rho, k)));
            return Ok(());
        }
    }
    if depth >= MAX_SPLITS {
        return Err(Error::Integrality {
            radius: rho,
            raw: s[0].re,
        });
    }
    let mid = usable_circle(f, rho, 0.2 * (hi.t / lo.t).ln(), cfg)?;
    recover(f, lo, mid, depth + 1, cfg, out)?;
    recover(f, mid, hi, depth + 1, cfg, out)
}

/// Distinct points and integer multiplicities with power sums `s`, or
/// `None` when there are too many points or the fit is not integral.
fn prony(s: &[Complex64; MOMENTS], scale: f64) -> Option<Vec<(Complex64, i32)>> {
    let hankel = |n: usize, shift: usize| DMatrix::from_fn(n, n, |i, k| s[i + k + shift]);
    let sigma = hankel(MAX_POINTS, 0).singular_values();
    let n = sigma.iter().filter(|&&x| x > RANK_REL * scale).count();
    if n == 0 {
        return Some(Vec::new());
    }
    if n == MAX_POINTS {
        return None;
    }
    // Monic polynomial z^n + c_{n−1} z^{n−1} + … + c_0 with Σ_k c_k s_{i+k} = −s_{i+n}.
    let rhs = DMatrix::from_fn(n, 1, |i, _| -s[i + n]);
    let c = hankel(n, 0).lu().solve(&rhs)?;
    let roots = if n == 1 {
        vec![-c[0]]
    } else {
        let mut coeffs: Vec<Complex64> = c.iter().copied().collect();
        coeffs.push(Complex64::new(1.0, 0.0));
        poly_roots(&PolyCoeffs::new(coeffs)).ok()?
    };
    // Multiplicities from the Vandermonde system Σ_k m_k b_k^j = s_j.
    let vander = DMatrix::from_fn(n, n, |j, k| roots[k].powi(j as i32));
    let rhs = DMatrix::from_fn(n, 1, |j, _| s[j]);
    let m = vander.lu().solve(&rhs)?;
    let mut points = Vec::with_capacity(n);
    for (b, w) in roots.into_iter().zip(m.iter()) {
        let k = w.re.round();
        if k == 0.0 || (w - k).norm() > WEIGHT_SLACK {
            return None;
        }
        points.push((b, k as i32));
    }
    Some(points)
}
