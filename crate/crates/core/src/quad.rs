//! Quadrature over circles centred at the origin.
//!
//! Full circles with a smooth integrand use the periodic trapezoid rule with
//! node doubling, which converges geometrically for analytic periodic
//! integrands. Arcs, and circles split at known singular or non-smooth
//! angles, use the tanh-sinh rule: a trapezoid rule after a double
//! exponential change of variable, so endpoint singularities and kinks at arc
//! ends cost nothing extra.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::funcdsl::FunctionModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Relative convergence tolerance between refinement levels.
    pub tol: f64,
    /// Node budget for one integral.
    pub max_nodes: usize,
    /// Threshold on `||f| − 1|` below which a sample counts as `|f| = 1`.
    pub unit_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_nodes: 1 << 20,
            unit_tol: 1e-9,
        }
    }
}

pub const INITIAL_NODES: usize = 64;
pub const CLASSIFY_SAMPLES: usize = 4096;
const BOUNDARY_ANGLE_TOL: f64 = 1e-12;
const TANH_SINH_TMAX: f64 = 3.6;
const TANH_SINH_MAX_LEVEL: u32 = 14;

/// Values a quadrature rule can accumulate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult<T = f64> {
    pub value: T,
    /// Absolute difference between the last two refinement levels.
    pub error_estimate: f64,
    pub nodes: usize,
    /// Some sample landed on a point where the integrand is undefined.
    pub near_singular: bool,
    /// False when the node budget ran out with the error above `10 · tol`.
    pub converged: bool,
}

impl<T: QuadValue> QuadratureResult<T> {
    fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            nodes: self.nodes + other.nodes,
            near_singular: self.near_singular || other.near_singular,
            converged: self.converged && other.converged,
        }
    }

    fn empty() -> Self {
        Self {
            value: T::zero(),
            error_estimate: 0.0,
            nodes: 0,
            near_singular: false,
            converged: true,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> QuadratureResult<U> {
        QuadratureResult {
            value: f(self.value),
            error_estimate: self.error_estimate,
            nodes: self.nodes,
            near_singular: self.near_singular,
            converged: self.converged,
        }
    }
}

/// `∫_0^{2π} g(θ) dθ` for a periodic integrand. `g` returns `None` at angles
/// where it is undefined; those angles are promoted to arc endpoints and the
/// circle is re-integrated piecewise.
pub fn periodic_integrate<T, G>(g: G, cfg: &QuadConfig) -> QuadratureResult<T>
where
    T: QuadValue,
    G: Fn(f64) -> Option<T>,
{
    periodic_impl(&g, cfg)
}

fn periodic_impl<T, G>(g: &G, cfg: &QuadConfig) -> QuadratureResult<T>
where
    T: QuadValue,
    G: Fn(f64) -> Option<T>,
{
    let mut n = INITIAL_NODES;
    let mut singular = Vec::new();
    let mut sum = T::zero();
    for k in 0..n {
        let theta = TAU * k as f64 / n as f64;
        match g(theta) {
            Some(v) => sum = sum + v,
            None => singular.push(theta),
        }
    }
    if !singular.is_empty() {
        return integrate_with_breaks(g, &singular, cfg).flag_singular();
    }
    let mut value = sum * (TAU / n as f64);
    loop {
        let mut odd = T::zero();
        for k in 0..n {
            let theta = TAU * (2 * k + 1) as f64 / (2 * n) as f64;
            match g(theta) {
                Some(v) => odd = odd + v,
                None => singular.push(theta),
            }
        }
        if !singular.is_empty() {
            return integrate_with_breaks(g, &singular, cfg).flag_singular();
        }
        sum = sum + odd;
        n *= 2;
        let next = sum * (TAU / n as f64);
        let err = (next - value).magnitude();
        value = next;
        let scale = value.magnitude().max(1.0);
        if err < cfg.tol * scale || n >= cfg.max_nodes {
            return QuadratureResult {
                value,
                error_estimate: err,
                nodes: n,
                near_singular: false,
                converged: err <= 10.0 * cfg.tol * scale,
            };
        }
    }
}

impl<T: QuadValue> QuadratureResult<T> {
    fn flag_singular(mut self) -> Self {
        self.near_singular = true;
        self
    }
}

/// Full-circle integral split at `breaks` (angles, any order, taken mod 2π).
/// Without breaks this is [`periodic_integrate`].
pub fn integrate_with_breaks<T, G>(g: &G, breaks: &[f64], cfg: &QuadConfig) -> QuadratureResult<T>
where
    T: QuadValue,
    G: Fn(f64) -> Option<T>,
{
    let mut b: Vec<f64> = breaks.iter().map(|x| x.rem_euclid(TAU)).collect();
    b.sort_by(f64::total_cmp);
    b.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    if b.is_empty() {
        return periodic_impl(g, cfg);
    }
    let mut arcs = Vec::with_capacity(b.len());
    for w in b.windows(2) {
        arcs.push((w[0], w[1]));
    }
    arcs.push((b[b.len() - 1], b[0] + TAU));
    arc_integrate(g, &arcs, cfg)
}

/// Sum of `∫_a^b g(θ) dθ` over the given arcs.
pub fn arc_integrate<T, G>(g: &G, arcs: &[(f64, f64)], cfg: &QuadConfig) -> QuadratureResult<T>
where
    T: QuadValue,
    G: Fn(f64) -> Option<T>,
{
    arcs.iter()
        .filter(|(a, b)| b > a)
        .map(|&(a, b)| tanh_sinh(g, a, b, cfg))
        .fold(QuadratureResult::empty(), QuadratureResult::combine)
}

/// Tanh-sinh rule on `[a, b]` with level halving of the step.
fn tanh_sinh<T, G>(g: &G, a: f64, b: f64, cfg: &QuadConfig) -> QuadratureResult<T>
where
    T: QuadValue,
    G: Fn(f64) -> Option<T>,
{
    let half = 0.5 * (b - a);
    let mut near_singular = false;
    let mut nodes = 0usize;
    let mut eval = |t: f64, nodes: &mut usize| -> T {
        let u = FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if w == 0.0 || !w.is_finite() {
            return T::zero();
        }
        // Distance to the nearer endpoint, computed without cancellation.
        let off = half * 2.0 / (1.0 + (2.0 * u.abs()).exp());
        let x = if t >= 0.0 { b - off } else { a + off };
        *nodes += 1;
        match g(x) {
            Some(v) => v * w,
            None => {
                near_singular = true;
                T::zero()
            }
        }
    };

    let mut h = 0.5;
    let mut sum = eval(0.0, &mut nodes);
    let mut k = 1;
    while k as f64 * h <= TANH_SINH_TMAX {
        let t = k as f64 * h;
        sum = sum + eval(t, &mut nodes) + eval(-t, &mut nodes);
        k += 1;
    }
    let mut value = sum * h;
    let mut err = f64::INFINITY;
    for level in 1..=TANH_SINH_MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= TANH_SINH_TMAX {
            let t = k as f64 * h;
            sum = sum + eval(t, &mut nodes) + eval(-t, &mut nodes);
            k += 2;
        }
        let next = sum * h;
        err = (next - value).magnitude();
        value = next;
        let scale = value.magnitude().max(1.0);
        if (level >= 2 && err < cfg.tol * scale) || nodes >= cfg.max_nodes {
            break;
        }
    }
    let scale = value.magnitude().max(1.0);
    QuadratureResult {
        value,
        error_estimate: err,
        nodes,
        near_singular,
        converged: err <= 10.0 * cfg.tol * scale,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArcLabel {
    /// `|f| > 1`
    Plus,
    /// `|f| = 1`
    Zero,
    /// `|f| < 1`
    Minus,
}

impl ArcLabel {
    pub fn flipped(self) -> Self {
        match self {
            ArcLabel::Plus => ArcLabel::Minus,
            ArcLabel::Zero => ArcLabel::Zero,
            ArcLabel::Minus => ArcLabel::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
    pub label: ArcLabel,
}

impl Arc {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// Decomposition of `[0, 2π)` on the circle `|z| = radius` by `|f|` versus 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcPartition {
    pub radius: f64,
    pub arcs: Vec<Arc>,
}

impl ArcPartition {
    pub fn arcs_with(&self, label: ArcLabel) -> Vec<(f64, f64)> {
        self.arcs
            .iter()
            .filter(|a| a.label == label)
            .map(|a| (a.start, a.end))
            .collect()
    }

    /// Angles in `(0, 2π)` where the label changes.
    pub fn boundaries(&self) -> Vec<f64> {
        self.arcs.iter().skip(1).map(|a| a.start).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.arcs.iter().map(Arc::length).sum()
    }

    pub fn measure(&self, label: ArcLabel) -> f64 {
        self.arcs
            .iter()
            .filter(|a| a.label == label)
            .map(Arc::length)
            .sum()
    }
}

fn point_label(f: &FunctionModel, t: f64, theta: f64, unit_tol: f64) -> ArcLabel {
    match f.eval(Complex64::from_polar(t, theta)) {
        Ok(v) => {
            let d = v.norm() - 1.0;
            if d.abs() < unit_tol {
                ArcLabel::Zero
            } else if d > 0.0 {
                ArcLabel::Plus
            } else {
                ArcLabel::Minus
            }
        }
        // Poles: |f| → ∞.
        Err(_) => ArcLabel::Plus,
    }
}

/// Splits `|z| = t` into arcs where `|f| > 1`, `|f| = 1` and `|f| < 1`.
///
/// `|f| = 1` is decided with `cfg.unit_tol` and needs at least two
/// consecutive samples; single samples are absorbed by the preceding run.
pub fn classify_circle(f: &FunctionModel, t: f64, cfg: &QuadConfig) -> ArcPartition {
    let n = CLASSIFY_SAMPLES;
    let step = TAU / n as f64;
    let mut labels: Vec<ArcLabel> = (0..n)
        .map(|k| point_label(f, t, k as f64 * step, cfg.unit_tol))
        .collect();

    if labels.iter().all(|&l| l == ArcLabel::Zero) {
        return ArcPartition {
            radius: t,
            arcs: vec![Arc {
                start: 0.0,
                end: TAU,
                label: ArcLabel::Zero,
            }],
        };
    }
    let isolated: Vec<usize> = (0..n)
        .filter(|&k| {
            labels[k] == ArcLabel::Zero
                && labels[(k + n - 1) % n] != ArcLabel::Zero
                && labels[(k + 1) % n] != ArcLabel::Zero
        })
        .collect();
    for k in isolated {
        labels[k] = labels[(k + n - 1) % n];
    }

    let mut boundaries = Vec::new();
    for k in 0..n {
        let (a, b) = (labels[k], labels[(k + 1) % n]);
        if a == b {
            continue;
        }
        let (mut lo, mut hi) = (k as f64 * step, (k + 1) as f64 * step);
        // A direct Plus/Minus change is located at the exact crossing |f| = 1.
        let tol = if a == ArcLabel::Zero || b == ArcLabel::Zero { cfg.unit_tol } else { 0.0 };
        while hi - lo > BOUNDARY_ANGLE_TOL {
            let m = 0.5 * (lo + hi);
            if point_label(f, t, m, tol) == a {
                lo = m;
            } else {
                hi = m;
            }
        }
        let mut x = 0.5 * (lo + hi);
        if x >= TAU {
            x -= TAU;
        }
        boundaries.push((x, b));
    }
    boundaries.sort_by(|p, q| p.0.total_cmp(&q.0));

    let mut arcs = Vec::with_capacity(boundaries.len() + 1);
    if boundaries.is_empty() {
        arcs.push(Arc {
            start: 0.0,
            end: TAU,
            label: labels[0],
        });
    } else {
        let last_label = boundaries[boundaries.len() - 1].1;
        let mut start = 0.0;
        let mut label = last_label;
        for &(x, next) in &boundaries {
            if x > start {
                arcs.push(Arc {
                    start,
                    end: x,
                    label,
                });
            }
            start = x;
            label = next;
        }
        arcs.push(Arc {
            start,
            end: TAU,
            label,
        });
    }
    ArcPartition { radius: t, arcs }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
