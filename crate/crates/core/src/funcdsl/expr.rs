use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Syntax tree of the function language. The single variable is `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    Const(Complex64),
    Var,
    Add(Box<ExprNode>, Box<ExprNode>),
    Sub(Box<ExprNode>, Box<ExprNode>),
    Mul(Box<ExprNode>, Box<ExprNode>),
    Div(Box<ExprNode>, Box<ExprNode>),
    IntPow(Box<ExprNode>, i32),
    Exp(Box<ExprNode>),
    Neg(Box<ExprNode>),
}

/// Relative cutoff below which a difference counts as cancelled to zero.
pub(crate) const CANCEL_REL: f64 = 1e-14;

/// `value` is zero up to rounding, given the magnitude `scale` of the
/// operands it was computed from.
#[inline]
pub(crate) fn vanishes(value: Complex64, scale: f64) -> bool {
    value.norm() <= CANCEL_REL * scale
}

impl ExprNode {
    pub fn constant(c: impl Into<Complex64>) -> Self {
        ExprNode::Const(c.into())
    }

    pub fn add(l: ExprNode, r: ExprNode) -> Self {
        ExprNode::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: ExprNode, r: ExprNode) -> Self {
        ExprNode::Sub(Box::new(l), Box::new(r))
    }

    pub fn mul(l: ExprNode, r: ExprNode) -> Self {
        ExprNode::Mul(Box::new(l), Box::new(r))
    }

    pub fn div(l: ExprNode, r: ExprNode) -> Self {
        ExprNode::Div(Box::new(l), Box::new(r))
    }

    pub fn pow(base: ExprNode, exponent: i32) -> Self {
        ExprNode::IntPow(Box::new(base), exponent)
    }

    pub fn exp(arg: ExprNode) -> Self {
        ExprNode::Exp(Box::new(arg))
    }

    pub fn neg(arg: ExprNode) -> Self {
        ExprNode::Neg(Box::new(arg))
    }

    /// Value at `z`. A denominator that is zero up to rounding is a pole:
    /// a sum or difference is zero when it cancels to `1e-14` of its operands,
    /// and products and powers inherit zeros from their factors.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.eval_tracked(z).map(|(v, _)| v)
    }

    /// Value at `z` and whether it is zero up to rounding.
    pub(crate) fn eval_tracked(&self, z: Complex64) -> Result<(Complex64, bool)> {
        let (v, zero) = match self {
            ExprNode::Const(c) => (*c, c.norm() == 0.0),
            ExprNode::Var => (z, z.norm() == 0.0),
            ExprNode::Add(l, r) | ExprNode::Sub(l, r) => {
                let (a, _) = l.eval_tracked(z)?;
                let (b, _) = r.eval_tracked(z)?;
                let v = if matches!(self, ExprNode::Add(..)) { a + b } else { a - b };
                (v, vanishes(v, a.norm() + b.norm()))
            }
            ExprNode::Mul(l, r) => {
                let (a, za) = l.eval_tracked(z)?;
                let (b, zb) = r.eval_tracked(z)?;
                (a * b, za || zb)
            }
            ExprNode::Div(l, r) => {
                let (den, zero_den) = r.eval_tracked(z)?;
                if zero_den {
                    return Err(Error::Singular { z });
                }
                let (num, zero_num) = l.eval_tracked(z)?;
                (num / den, zero_num)
            }
            ExprNode::IntPow(b, n) => {
                let (base, zero) = b.eval_tracked(z)?;
                if *n < 0 && zero {
                    return Err(Error::Singular { z });
                }
                (base.powi(*n), zero && *n > 0)
            }
            ExprNode::Exp(a) => (a.eval_tracked(z)?.0.exp(), false),
            ExprNode::Neg(a) => {
                let (v, zero) = a.eval_tracked(z)?;
                (-v, zero)
            }
        };
        if v.re.is_finite() && v.im.is_finite() {
            Ok((v, zero))
        } else {
            Err(Error::Singular { z })
        }
    }

    /// Structural derivative with respect to `z`. Zero and unit factors are
    /// pruned so repeated differentiation stays small; nothing else is simplified.
    pub fn derivative(&self) -> ExprNode {
        match self {
            ExprNode::Const(_) => zero(),
            ExprNode::Var => one(),
            ExprNode::Add(l, r) => s_add(l.derivative(), r.derivative()),
            ExprNode::Sub(l, r) => s_sub(l.derivative(), r.derivative()),
            ExprNode::Mul(l, r) => s_add(
                s_mul(l.derivative(), (**r).clone()),
                s_mul((**l).clone(), r.derivative()),
            ),
            ExprNode::Div(l, r) => {
                // (l'r - lr') / r^2
                let num = s_sub(
                    s_mul(l.derivative(), (**r).clone()),
                    s_mul((**l).clone(), r.derivative()),
                );
                if is_zero(&num) {
                    zero()
                } else {
                    ExprNode::div(num, ExprNode::pow((**r).clone(), 2))
                }
            }
            ExprNode::IntPow(b, n) => {
                if *n == 0 {
                    return zero();
                }
                let inner = if *n == 1 {
                    one()
                } else {
                    ExprNode::pow((**b).clone(), n - 1)
                };
                s_mul(
                    s_mul(ExprNode::constant(*n as f64), inner),
                    b.derivative(),
                )
            }
            ExprNode::Exp(a) => s_mul(self.clone(), a.derivative()),
            ExprNode::Neg(a) => {
                let d = a.derivative();
                if is_zero(&d) {
                    zero()
                } else {
                    ExprNode::neg(d)
                }
            }
        }
    }

    /// True when the tree contains no division and no negative power, so it
    /// denotes an entire function.
    pub fn is_structurally_entire(&self) -> bool {
        match self {
            ExprNode::Const(_) | ExprNode::Var => true,
            ExprNode::Add(l, r) | ExprNode::Sub(l, r) | ExprNode::Mul(l, r) => {
                l.is_structurally_entire() && r.is_structurally_entire()
            }
            ExprNode::Div(..) => false,
            ExprNode::IntPow(b, n) => *n >= 0 && b.is_structurally_entire(),
            ExprNode::Exp(a) | ExprNode::Neg(a) => a.is_structurally_entire(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ExprNode::Const(_) | ExprNode::Var => 1,
            ExprNode::Add(l, r)
            | ExprNode::Sub(l, r)
            | ExprNode::Mul(l, r)
            | ExprNode::Div(l, r) => 1 + l.depth().max(r.depth()),
            ExprNode::IntPow(a, _) | ExprNode::Exp(a) | ExprNode::Neg(a) => 1 + a.depth(),
        }
    }
}

fn zero() -> ExprNode {
    ExprNode::Const(Complex64::new(0.0, 0.0))
}

fn one() -> ExprNode {
    ExprNode::Const(Complex64::new(1.0, 0.0))
}

fn is_zero(e: &ExprNode) -> bool {
    matches!(e, ExprNode::Const(c) if *c == Complex64::new(0.0, 0.0))
}

fn is_one(e: &ExprNode) -> bool {
    matches!(e, ExprNode::Const(c) if *c == Complex64::new(1.0, 0.0))
}

fn s_add(a: ExprNode, b: ExprNode) -> ExprNode {
    match (is_zero(&a), is_zero(&b)) {
        (true, _) => b,
        (_, true) => a,
        _ => ExprNode::add(a, b),
    }
}

fn s_sub(a: ExprNode, b: ExprNode) -> ExprNode {
    match (is_zero(&a), is_zero(&b)) {
        (_, true) => a,
        (true, _) => ExprNode::neg(b),
        _ => ExprNode::sub(a, b),
    }
}

fn s_mul(a: ExprNode, b: ExprNode) -> ExprNode {
    if is_zero(&a) || is_zero(&b) {
        zero()
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        ExprNode::mul(a, b)
    }
}

fn write_f64(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    // Debug formatting of f64 is the shortest representation that round-trips.
    write!(f, "{x:?}")
}

/// Fully parenthesised form accepted back by the parser.
impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprNode::Const(c) => {
                write!(f, "(")?;
                write_f64(f, c.re)?;
                write!(f, "{}", if c.im.is_sign_negative() { '-' } else { '+' })?;
                write_f64(f, c.im.abs())?;
                write!(f, "i)")
            }
            ExprNode::Var => write!(f, "z"),
            ExprNode::Add(l, r) => write!(f, "({l}+{r})"),
            ExprNode::Sub(l, r) => write!(f, "({l}-{r})"),
            ExprNode::Mul(l, r) => write!(f, "({l}*{r})"),
            ExprNode::Div(l, r) => write!(f, "({l}/{r})"),
            ExprNode::IntPow(b, n) => write!(f, "({b}^{n})"),
            ExprNode::Exp(a) => write!(f, "exp({a})"),
            ExprNode::Neg(a) => write!(f, "(-{a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derivative_of_exp_inverse() {
        let e = ExprNode::exp(ExprNode::div(ExprNode::constant(1.0), ExprNode::Var));
        let d = e.derivative();
        let z = c(0.3, 1.1);
        let expect = -(1.0 / z).exp() / (z * z);
        assert!((d.eval(z).unwrap() - expect).norm() < 1e-13);
    }

    #[test]
    fn derivative_of_power_chain() {
        // (z^2 + 1)^-3
        let e = ExprNode::pow(
            ExprNode::add(ExprNode::pow(ExprNode::Var, 2), ExprNode::constant(1.0)),
            -3,
        );
        let z = c(0.7, -0.2);
        let expect = -3.0 * (z * z + 1.0).powi(-4) * 2.0 * z;
        assert!((e.derivative().eval(z).unwrap() - expect).norm() < 1e-12);
    }

    #[test]
    fn division_by_vanishing_denominator_is_singular() {
        let e = ExprNode::div(ExprNode::constant(1.0), ExprNode::sub(ExprNode::Var, ExprNode::constant(2.0)));
        assert!(matches!(e.eval(c(2.0, 0.0)), Err(Error::Singular { .. })));
        assert!(e.eval(c(2.0, 1e-6)).is_ok());
    }

    #[test]
    fn entire_detection() {
        let e = ExprNode::exp(ExprNode::pow(ExprNode::Var, 3));
        assert!(e.is_structurally_entire());
        let g = ExprNode::exp(ExprNode::div(ExprNode::constant(1.0), ExprNode::Var));
        assert!(!g.is_structurally_entire());
    }

    #[test]
    fn display_constants() {
        assert_eq!(ExprNode::constant(c(1.0, -2.5)).to_string(), "(1.0-2.5i)");
        assert_eq!(ExprNode::pow(ExprNode::Var, -2).to_string(), "(z^-2)");
    }
}
