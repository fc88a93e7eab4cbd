//! Seeded random rational functions and radii for property checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::funcdsl::{Factor, FunctionModel};

/// Shape of the random rationals.
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    /// Bound on `max(deg numerator, deg denominator)`.
    pub max_degree: u32,
    /// Root moduli are drawn log-uniformly from this range.
    pub modulus_range: (f64, f64),
    /// Radii every root modulus keeps away from.
    pub avoid: Vec<f64>,
    /// Required relative distance from the radii in `avoid`.
    pub avoid_rel: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            max_degree: 4,
            modulus_range: (0.3, 3.0),
            avoid: vec![1.0],
            avoid_rel: 0.02,
        }
    }
}

impl CorpusSpec {
    fn admissible(&self, m: f64) -> bool {
        self.avoid
            .iter()
            .all(|&a| (m / a - 1.0).abs() >= self.avoid_rel)
    }

    fn root(&self, rng: &mut impl Rng) -> Complex64 {
        let (lo, hi) = self.modulus_range;
        loop {
            let m = (rng.gen_range(lo.ln()..hi.ln())).exp();
            if self.admissible(m) {
                return Complex64::from_polar(m, rng.gen_range(0.0..std::f64::consts::TAU));
            }
        }
    }
}

/// A non-constant random rational: up to `max_degree` zeros and as many
/// poles, occasionally double, scaled by a random complex number of modulus
/// in `[0.5, 2]`.
pub fn random_rational(rng: &mut impl Rng, spec: &CorpusSpec) -> FunctionModel {
    loop {
        let mut factors = Vec::new();
        for sign in [1, -1] {
            let mut degree = 0;
            let target = rng.gen_range(0..=spec.max_degree);
            while degree < target {
                let mult = if target - degree >= 2 && rng.gen_bool(0.15) { 2 } else { 1 };
                factors.push(Factor::new(spec.root(rng), sign * mult as i32));
                degree += mult;
            }
        }
        if factors.is_empty() {
            continue;
        }
        let scale = Complex64::from_polar(
            rng.gen_range(0.5f64.ln()..2f64.ln()).exp(),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        if let Ok(f) = FunctionModel::rational(scale, factors) {
            return f;
        }
    }
}

/// `count` random rationals from a fixed seed.
pub fn rational_corpus(seed: u64, count: usize, spec: &CorpusSpec) -> Vec<FunctionModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_rational(&mut rng, spec)).collect()
}

/// A log-uniform radius in `[lo, hi]` at relative distance at least `rel`
/// from every zero and pole of a rational `f`.
pub fn random_radius(rng: &mut impl Rng, f: &FunctionModel, lo: f64, hi: f64, rel: f64) -> f64 {
    let moduli: Vec<f64> = f
        .exact_zeros_poles()
        .map(|fs| fs.iter().map(|x| x.root.norm()).collect())
        .unwrap_or_default();
    loop {
        let t = rng.gen_range(lo.ln()..hi.ln()).exp();
        if moduli.iter().all(|&m| (m / t - 1.0).abs() >= rel) {
            return t;
        }
    }
}
