//! Exact reference computations for rational functions.
//!
//! Everything here works from factor lists and polynomial roots, never from
//! circle quadrature, so it can serve as ground truth for the numerical paths.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::annuluschar::AnnulusWindow;
use crate::error::{Error, Result};
use crate::funcdsl::{Factor, Rational};

/// Relative tolerance for "this root lies on that circle".
pub const ON_CIRCLE_REL: f64 = 1e-12;
const LEADING_DROP: f64 = 1e-12;
const MAX_ITERATIONS: usize = 500;

/// Polynomial with coefficients in ascending degree; trailing zeros stripped.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    coeffs: Vec<Complex64>,
}

impl PolyCoeffs {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn one() -> Self {
        Self::new(vec![Complex64::new(1.0, 0.0)])
    }

    /// `∏ (z − r)` over the given roots.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a Complex64>) -> Self {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            c.push(Complex64::new(0.0, 0.0));
            for k in (1..c.len()).rev() {
                c[k] = c[k - 1] - r * c[k];
            }
            c[0] = -r * c[0];
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Complex64], k: usize| v.get(k).copied().unwrap_or_default();
        Self::new(
            (0..n)
                .map(|k| get(&self.coeffs, k) - get(&other.coeffs, k))
                .collect(),
        )
    }

    /// Drops leading coefficients that are negligible against the largest one.
    pub fn trim_leading(&self, rel: f64) -> (Self, bool) {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut c = self.coeffs.clone();
        let mut dropped = false;
        while c.len() > 1 && c.last().unwrap().norm() <= rel * max {
            c.pop();
            dropped = true;
        }
        (Self { coeffs: c }, dropped)
    }
}

#[derive(Debug, Clone)]
pub struct RootsReport {
    pub roots: Vec<Complex64>,
    /// `|p(root)|` for each root.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// All roots of `p` with multiplicity by Aberth–Ehrlich simultaneous iteration.
pub fn poly_roots(p: &PolyCoeffs) -> Result<Vec<Complex64>> {
    let report = poly_roots_report(p)?;
    if report.converged {
        Ok(report.roots)
    } else {
        Err(Error::RootsNotConverged {
            iterations: report.iterations,
            max_residual: report.residuals.iter().copied().fold(0.0, f64::max),
        })
    }
}

/// Like [`poly_roots`] but always returns the best iterate with its residuals.
pub fn poly_roots_report(p: &PolyCoeffs) -> Result<RootsReport> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::InvalidArgument("polynomial of degree 0 has no roots".into()));
    }
    let lead = p.coeffs[n];
    let monic = PolyCoeffs {
        coeffs: p.coeffs.iter().map(|&c| c / lead).collect(),
    };

    // Exact zero roots are factored out first; they are common (z^m factors)
    // and Aberth converges slowly onto them.
    let zeros_at_origin = monic.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = PolyCoeffs {
        coeffs: monic.coeffs[zeros_at_origin..].to_vec(),
    };
    let m = reduced.degree();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    let mut iterations = 0;
    let mut converged = true;
    if m > 0 {
        // Initial radius: geometric mean of the root moduli.
        let radius = reduced.coeffs[0].norm().powf(1.0 / m as f64).max(1e-3);
        let mut z: Vec<Complex64> = (0..m)
            .map(|k| Complex64::from_polar(radius, TAU * k as f64 / m as f64 + 0.4))
            .collect();
        converged = false;
        for it in 1..=MAX_ITERATIONS {
            iterations = it;
            let mut max_step: f64 = 0.0;
            let mut max_ratio: f64 = 0.0;
            for k in 0..m {
                let (pv, dpv) = reduced.eval_with_derivative(z[k]);
                if pv == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let w = pv / dpv;
                let s: Complex64 = (0..m)
                    .filter(|&j| j != k)
                    .map(|j| 1.0 / (z[k] - z[j]))
                    .sum();
                let step = w / (1.0 - w * s);
                if step.re.is_finite() && step.im.is_finite() {
                    z[k] -= step;
                    max_step = max_step.max(step.norm());
                    max_ratio = max_ratio.max(step.norm() / (1.0 + z[k].norm()));
                }
            }
            if max_ratio < 1e-13 || max_step == 0.0 {
                converged = true;
                break;
            }
        }
        roots.extend(z);
    }
    let residuals = roots.iter().map(|&r| p.eval(r).norm()).collect();
    Ok(RootsReport {
        roots,
        residuals,
        iterations,
        converged,
    })
}

/// Numerator and denominator of a rational function: `f = num / den`.
pub fn rational_polys(f: &Rational) -> (PolyCoeffs, PolyCoeffs) {
    let expand = |sign: i32| {
        let roots: Vec<Complex64> = f
            .factors()
            .iter()
            .filter(|x| x.multiplicity.signum() == sign)
            .flat_map(|x| std::iter::repeat_n(x.root, x.multiplicity.unsigned_abs() as usize))
            .collect();
        PolyCoeffs::from_roots(roots.iter())
    };
    (expand(1).scale(f.scale()), expand(-1))
}

#[derive(Debug, Clone)]
pub struct APoints {
    pub roots: Vec<Complex64>,
    /// Leading coefficient of `num − a·den` after degree reduction.
    pub leading: Complex64,
    /// Some a-points escaped to infinity at this `a`.
    pub degree_drop: bool,
}

/// Solutions of `f(z) = a`, i.e. roots of `num − a·den`.
pub fn solve_a_points(f: &Rational, a: Complex64) -> Result<APoints> {
    let (num, den) = rational_polys(f);
    let full = num.degree().max(den.degree());
    let (p, _) = num.sub(&den.scale(a)).trim_leading(LEADING_DROP);
    let degree_drop = p.degree() < full;
    if p.degree() == 0 {
        if p.coeffs[0] == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidArgument("f − a vanishes identically".into()));
        }
        return Ok(APoints {
            roots: vec![],
            leading: p.coeffs[0],
            degree_drop,
        });
    }
    let leading = p.coeffs[p.degree()];
    Ok(APoints {
        roots: poly_roots(&p)?,
        leading,
        degree_drop,
    })
}

/// `f − a` as a factored rational: a-points as zeros, the poles of `f` kept.
pub fn shifted_rational(f: &Rational, a: Complex64) -> Result<Rational> {
    let pts = solve_a_points(f, a)?;
    let factors = pts
        .roots
        .iter()
        .map(|&r| Factor::new(r, 1))
        .chain(f.poles().copied());
    Rational::new(pts.leading, factors)
}

fn on_circle(modulus: f64, t: f64) -> bool {
    (modulus - t).abs() <= ON_CIRCLE_REL * t.max(1.0)
}

/// `ν(t, f)` from the factor list: interior roots count twice, roots on the
/// circle once, with sign by zero/pole.
pub fn exact_index(factors: &[Factor], t: f64) -> i64 {
    factors
        .iter()
        .map(|f| {
            let m = f.root.norm();
            let k = f.multiplicity as i64;
            if on_circle(m, t) {
                k
            } else if m < t {
                2 * k
            } else {
                0
            }
        })
        .sum()
}

/// Counting function `N(τ, r; f)` from exact pole moduli.
pub fn exact_n(factors: &[Factor], w: &AnnulusWindow) -> f64 {
    let (tau, r) = (w.tau(), w.r());
    let boundary = 0.5 * (tau * r).ln();
    factors
        .iter()
        .filter(|f| f.multiplicity < 0)
        .map(|f| {
            let k = f.multiplicity.unsigned_abs() as f64;
            let m = f.root.norm();
            if on_circle(m, 1.0) {
                k * boundary
            } else if m < 1.0 && m * tau > 1.0 {
                k * (tau * m).ln()
            } else if m > 1.0 && m < r {
                k * (r / m).ln()
            } else {
                0.0
            }
        })
        .fold(0.0, |acc, x| acc + x)
}

/// Poles within relative `1e-12` of the window's edge circles.
pub fn poles_on_window_edges(factors: &[Factor], w: &AnnulusWindow) -> Vec<Factor> {
    factors
        .iter()
        .filter(|f| f.multiplicity < 0)
        .filter(|f| {
            let m = f.root.norm();
            (w.tau() > 1.0 && on_circle(m, 1.0 / w.tau())) || (w.r() > 1.0 && on_circle(m, w.r()))
        })
        .copied()
        .collect()
}

/// Classical Nevanlinna counting function `N(r, f)`, poles at the origin included.
pub fn classical_n(factors: &[Factor], r: f64) -> f64 {
    factors
        .iter()
        .filter(|f| f.multiplicity < 0)
        .map(|f| {
            let k = f.multiplicity.unsigned_abs() as f64;
            let m = f.root.norm();
            if m == 0.0 {
                k * r.ln()
            } else if m < r {
                k * (r / m).ln()
            } else {
                0.0
            }
        })
        .fold(0.0, |acc, x| acc + x)
}
