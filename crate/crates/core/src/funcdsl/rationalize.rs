//! Conversion of expression trees that denote rational functions into the
//! factored form.
//!
//! Products, quotients and powers of factored operands merge factor lists
//! exactly. Sums and differences go through a common denominator and the
//! roots of the resulting numerator polynomial.

use num_complex::Complex64;

use super::{ExprNode, Factor, Rational};
use crate::oracle::{poly_roots, PolyCoeffs};

/// Numerator roots this close (relative) to a known root are snapped onto it
/// so that cancellations and multiplicities come out exact.
const SNAP_REL: f64 = 1e-8;
/// Numerator roots closer than this (relative) form one multiple root.
const CLUSTER_REL: f64 = 1e-6;
/// Coefficients below this fraction of the operands' size count as cancelled.
const CANCEL_REL: f64 = 1e-14;

enum Value {
    Zero,
    NonZero(Rational),
}

/// The factored form of `tree`, or `None` when it is not a rational function
/// (an `exp` of a non-constant, or a division by zero).
pub(crate) fn rationalize(tree: &ExprNode) -> Option<Rational> {
    match eval(tree)? {
        Value::Zero => None,
        Value::NonZero(r) => Some(r),
    }
}

fn eval(tree: &ExprNode) -> Option<Value> {
    Some(match tree {
        ExprNode::Const(c) => constant(*c),
        ExprNode::Var => Value::NonZero(Rational::new(one(), [Factor::new(0.0, 1)]).ok()?),
        ExprNode::Neg(a) => match eval(a)? {
            Value::Zero => Value::Zero,
            Value::NonZero(r) => Value::NonZero(Rational::new(-r.scale, r.factors).ok()?),
        },
        ExprNode::Mul(l, r) => match (eval(l)?, eval(r)?) {
            (Value::NonZero(a), Value::NonZero(b)) => Value::NonZero(product(&a, &b, 1)?),
            _ => Value::Zero,
        },
        ExprNode::Div(l, r) => match (eval(l)?, eval(r)?) {
            (_, Value::Zero) => return None,
            (Value::Zero, _) => Value::Zero,
            (Value::NonZero(a), Value::NonZero(b)) => Value::NonZero(product(&a, &b, -1)?),
        },
        ExprNode::IntPow(b, n) => match eval(b)? {
            Value::Zero if *n > 0 => Value::Zero,
            Value::Zero if *n < 0 => return None,
            Value::Zero => constant(one()),
            Value::NonZero(r) => Value::NonZero(
                Rational::new(
                    r.scale.powi(*n),
                    r.factors.iter().map(|f| Factor::new(f.root, f.multiplicity * n)),
                )
                .ok()?,
            ),
        },
        ExprNode::Exp(a) => match eval(a)? {
            Value::Zero => constant(one()),
            Value::NonZero(r) if r.factors.is_empty() => constant(r.scale.exp()),
            Value::NonZero(_) => return None,
        },
        ExprNode::Add(l, r) => sum(eval(l)?, eval(r)?, 1.0)?,
        ExprNode::Sub(l, r) => sum(eval(l)?, eval(r)?, -1.0)?,
    })
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn constant(c: Complex64) -> Value {
    match Rational::new(c, []) {
        Ok(r) => Value::NonZero(r),
        Err(_) => Value::Zero,
    }
}

fn product(a: &Rational, b: &Rational, sign: i32) -> Option<Rational> {
    let scale = if sign > 0 { a.scale * b.scale } else { a.scale / b.scale };
    let factors = a
        .factors
        .iter()
        .copied()
        .chain(b.factors.iter().map(|f| Factor::new(f.root, sign * f.multiplicity)));
    Rational::new(scale, factors).ok()
}

fn sum(a: Value, b: Value, sign: f64) -> Option<Value> {
    let (a, b) = match (a, b) {
        (Value::Zero, Value::Zero) => return Some(Value::Zero),
        (a, Value::Zero) => return Some(a),
        (Value::Zero, Value::NonZero(b)) => {
            return Some(Value::NonZero(Rational::new(b.scale * sign, b.factors).ok()?))
        }
        (Value::NonZero(a), Value::NonZero(b)) => (a, b),
    };

    // Common denominator: every pole with the larger of its two orders.
    let mut poles: Vec<Factor> = Vec::new();
    for f in a.poles().chain(b.poles()) {
        match poles.iter_mut().find(|p| p.root == f.root) {
            Some(p) => p.multiplicity = p.multiplicity.min(f.multiplicity),
            None => poles.push(*f),
        }
    }
    let numerator = |r: &Rational| -> PolyCoeffs {
        let mut roots = Vec::new();
        for f in r.factors.iter().filter(|f| f.multiplicity > 0) {
            roots.extend(std::iter::repeat_n(f.root, f.multiplicity as usize));
        }
        for p in &poles {
            let own = r
                .factors
                .iter()
                .find(|f| f.root == p.root)
                .map_or(0, |f| f.multiplicity.min(0));
            roots.extend(std::iter::repeat_n(p.root, (own - p.multiplicity) as usize));
        }
        PolyCoeffs::from_roots(roots.iter()).scale(r.scale)
    };
    let (pa, pb) = (numerator(&a), numerator(&b));
    let p = pa.sub(&pb.scale(Complex64::new(-sign, 0.0)));
    let size = pa
        .coeffs()
        .iter()
        .chain(pb.coeffs())
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let trimmed: Vec<Complex64> = p
        .coeffs()
        .iter()
        .map(|&c| if c.norm() <= CANCEL_REL * size { Complex64::new(0.0, 0.0) } else { c })
        .collect();
    let p = PolyCoeffs::new(trimmed);
    let degree = p.degree();
    let lead = p.coeffs()[degree];
    if lead.norm() == 0.0 {
        return Some(Value::Zero);
    }
    let roots = match degree {
        0 => vec![],
        1 => vec![-p.coeffs()[0] / lead],
        _ => poly_roots(&p).ok()?,
    };
    let known: Vec<Complex64> = a.factors.iter().chain(&b.factors).map(|f| f.root).collect();
    let zeros = cluster(roots, &known);
    Some(Value::NonZero(Rational::new(lead, zeros.into_iter().chain(poles)).ok()?))
}

/// Snaps roots onto nearby known roots and merges near-coincident ones.
fn cluster(roots: Vec<Complex64>, known: &[Complex64]) -> Vec<Factor> {
    let near = |a: Complex64, b: Complex64, rel: f64| (a - b).norm() <= rel * a.norm().max(b.norm()).max(1e-300);
    let mut out: Vec<(Complex64, i32)> = Vec::new();
    for r in roots {
        let r = known
            .iter()
            .copied()
            .find(|&k| near(r, k, SNAP_REL) || (k == Complex64::new(0.0, 0.0) && r.norm() <= SNAP_REL))
            .unwrap_or(r);
        match out.iter_mut().find(|(c, _)| near(*c, r, CLUSTER_REL)) {
            Some((c, m)) => {
                *c = (*c * *m as f64 + r) / (*m + 1) as f64;
                *m += 1;
            }
            None => out.push((r, 1)),
        }
    }
    out.into_iter().map(|(c, m)| Factor::new(c, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcdsl::parse_expr;

    fn factored(text: &str) -> Rational {
        rationalize(&parse_expr(text).unwrap()).unwrap()
    }

    #[test]
    fn products_and_powers_are_exact() {
        let r = factored("2*z^3/(z-2)^2");
        assert_eq!(r.scale(), Complex64::new(2.0, 0.0));
        assert_eq!(r.factors(), &[Factor::new(0.0, 3), Factor::new(2.0, -2)]);
        let r = factored("(z-2)/(z-0.5)");
        assert_eq!(r.factors(), &[Factor::new(2.0, 1), Factor::new(0.5, -1)]);
        let r = factored("-z^-2");
        assert_eq!(r.scale(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn sums_find_roots_and_cancel() {
        let r = factored("z^2 - 1");
        let mut roots: Vec<f64> = r.factors().iter().map(|f| f.root.re).collect();
        roots.sort_by(f64::total_cmp);
        assert!((roots[0] + 1.0).abs() < 1e-14 && (roots[1] - 1.0).abs() < 1e-14);
        let r = factored("(z^2 - 1)/(z - 1)");
        assert_eq!(r.factors().len(), 1);
        assert!((r.factors()[0].root + 1.0).norm() < 1e-14);
        let r = factored("z^2 - 2*z + 1");
        assert_eq!(r.factors().len(), 1);
        assert_eq!(r.factors()[0].multiplicity, 2);
        let r = factored("1/z + 1/(z-1)");
        assert_eq!(r.poles().count(), 2);
        assert!((r.zeros().next().unwrap().root - 0.5).norm() < 1e-14);
        assert!(rationalize(&parse_expr("z - z").unwrap()).is_none());
    }

    #[test]
    fn exponentials_of_constants_only() {
        let r = factored("exp(1)*z");
        assert!((r.scale() - Complex64::new(1f64.exp(), 0.0)).norm() < 1e-15);
        assert!(rationalize(&parse_expr("exp(z)").unwrap()).is_none());
        assert!(rationalize(&parse_expr("exp(1/z)").unwrap()).is_none());
    }
}
