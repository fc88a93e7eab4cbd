//! Function models: a factored rational form with exact zeros and poles, and
//! parsed expression trees carrying an eagerly built derivative.

mod expr;
mod parser;
mod rationalize;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use expr::ExprNode;
pub(crate) use expr::vanishes;
pub use parser::{parse_expr, parse_expr_with, ParseOptions, DEFAULT_MAX_EXPONENT};

use crate::error::{Error, Result};

/// A zero (`multiplicity > 0`) or pole (`multiplicity < 0`) of a rational function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub root: Complex64,
    pub multiplicity: i32,
}

impl Factor {
    pub fn new(root: impl Into<Complex64>, multiplicity: i32) -> Self {
        Self {
            root: root.into(),
            multiplicity,
        }
    }

    pub fn is_pole(&self) -> bool {
        self.multiplicity < 0
    }
}

/// `scale · ∏ (z − root)^multiplicity`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    scale: Complex64,
    factors: Vec<Factor>,
}

impl Rational {
    /// Repeated roots are merged and cancelled; zero multiplicities dropped.
    pub fn new(scale: Complex64, factors: impl IntoIterator<Item = Factor>) -> Result<Self> {
        if scale == Complex64::new(0.0, 0.0) || !scale.re.is_finite() || !scale.im.is_finite() {
            return Err(Error::InvalidArgument(
                "rational scale must be finite and nonzero".into(),
            ));
        }
        let mut merged: Vec<Factor> = Vec::new();
        for f in factors {
            if !f.root.re.is_finite() || !f.root.im.is_finite() {
                return Err(Error::InvalidArgument("non-finite root".into()));
            }
            match merged.iter_mut().find(|g| g.root == f.root) {
                Some(g) => g.multiplicity += f.multiplicity,
                None => merged.push(f),
            }
        }
        merged.retain(|f| f.multiplicity != 0);
        Ok(Self {
            scale,
            factors: merged,
        })
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn zeros(&self) -> impl Iterator<Item = &Factor> {
        self.factors.iter().filter(|f| f.multiplicity > 0)
    }

    pub fn poles(&self) -> impl Iterator<Item = &Factor> {
        self.factors.iter().filter(|f| f.multiplicity < 0)
    }

    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut v = self.scale;
        for f in &self.factors {
            let d = z - f.root;
            if f.multiplicity < 0 && vanishes(d, z.norm() + f.root.norm()) {
                return Err(Error::Singular { z });
            }
            v *= d.powi(f.multiplicity);
        }
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Singular { z })
        }
    }

    fn log_deriv(&self, z: Complex64) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for f in &self.factors {
            let d = z - f.root;
            if vanishes(d, z.norm() + f.root.norm()) {
                return Err(if f.multiplicity > 0 {
                    Error::ZeroAtPoint { z }
                } else {
                    Error::Singular { z }
                });
            }
            s += f.multiplicity as f64 / d;
        }
        Ok(s)
    }

    fn to_tree(&self) -> ExprNode {
        let mut tree = ExprNode::Const(self.scale);
        for f in &self.factors {
            let lin = if f.root == Complex64::new(0.0, 0.0) {
                ExprNode::Var
            } else {
                ExprNode::sub(ExprNode::Var, ExprNode::Const(f.root))
            };
            let p = if f.multiplicity == 1 {
                lin
            } else {
                ExprNode::pow(lin, f.multiplicity)
            };
            tree = ExprNode::mul(tree, p);
        }
        tree
    }
}

/// Parsed expression with its derivative built once at construction.
#[derive(Debug, Clone)]
pub struct Expression {
    tree: Arc<ExprNode>,
    derivative: Arc<ExprNode>,
    known_poles: Option<Arc<Vec<Factor>>>,
}

impl Expression {
    pub fn new(tree: ExprNode) -> Self {
        let derivative = tree.derivative();
        let known_poles = tree
            .is_structurally_entire()
            .then(|| Arc::new(Vec::new()));
        Self {
            tree: Arc::new(tree),
            derivative: Arc::new(derivative),
            known_poles,
        }
    }

    pub fn tree(&self) -> &ExprNode {
        &self.tree
    }

    pub fn derivative(&self) -> &ExprNode {
        &self.derivative
    }
}

#[derive(Debug, Clone)]
pub enum FunctionModel {
    Rational(Rational),
    Expression(Expression),
}

impl FunctionModel {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::from_tree(parse_expr(text)?))
    }

    pub fn from_tree(tree: ExprNode) -> Self {
        FunctionModel::Expression(Expression::new(tree))
    }

    pub fn rational(scale: impl Into<Complex64>, factors: impl IntoIterator<Item = Factor>) -> Result<Self> {
        Ok(FunctionModel::Rational(Rational::new(scale.into(), factors)?))
    }

    /// Nonzero constant `c` as an empty factor list.
    pub fn constant(c: impl Into<Complex64>) -> Result<Self> {
        Self::rational(c, [])
    }

    /// `z^m`; negative `m` gives a pole of order `|m|` at the origin.
    pub fn monomial(m: i32) -> Self {
        let factors = if m == 0 {
            vec![]
        } else {
            vec![Factor::new(0.0, m)]
        };
        Self::rational(1.0, factors).expect("unit scale")
    }

    /// Parses `rational: scale; (root, mult); ...`. Scale and roots may be any
    /// constant expression of the function language.
    pub fn parse_rational_spec(body: &str) -> Result<Self> {
        let mut parts = body.split(';');
        let scale_text = parts.next().unwrap_or("").trim();
        let scale = const_value(scale_text, 0)?;
        let mut factors = Vec::new();
        let mut offset = body.find(';').map_or(body.len(), |i| i + 1);
        for part in parts {
            let trimmed = part.trim();
            if trimmed.is_empty() {
                offset += part.len() + 1;
                continue;
            }
            let inner = trimmed
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::Syntax {
                    offset,
                    message: "expected '(root, multiplicity)'".into(),
                })?;
            let comma = inner.rfind(',').ok_or_else(|| Error::Syntax {
                offset,
                message: "expected ',' between root and multiplicity".into(),
            })?;
            let root = const_value(&inner[..comma], offset)?;
            let mult: i32 = inner[comma + 1..].trim().parse().map_err(|_| Error::Syntax {
                offset: offset + comma,
                message: "multiplicity must be an integer".into(),
            })?;
            if mult == 0 {
                return Err(Error::Syntax {
                    offset,
                    message: "multiplicity must be nonzero".into(),
                });
            }
            factors.push(Factor::new(root, mult));
            offset += part.len() + 1;
        }
        Self::rational(scale, factors)
    }

    /// Either a `rational:` factor list or an expression.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let trimmed = spec.trim_start();
        match trimmed.strip_prefix("rational:") {
            Some(body) => Self::parse_rational_spec(body),
            None => Self::parse(spec),
        }
    }

    /// Declares the poles of an expression so that counting functions can use them.
    pub fn with_known_poles(self, poles: Vec<Factor>) -> Result<Self> {
        match self {
            FunctionModel::Expression(mut e) => {
                if poles.iter().any(|p| p.multiplicity >= 0) {
                    return Err(Error::InvalidArgument(
                        "declared poles need negative multiplicity".into(),
                    ));
                }
                e.known_poles = Some(Arc::new(poles));
                Ok(FunctionModel::Expression(e))
            }
            FunctionModel::Rational(_) => Err(Error::InvalidArgument(
                "rational models carry their own poles".into(),
            )),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, FunctionModel::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            FunctionModel::Rational(r) => Some(r),
            FunctionModel::Expression(_) => None,
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            FunctionModel::Rational(r) => r.eval(z),
            FunctionModel::Expression(e) => e.tree.eval(z),
        }
    }

    /// `f'(z) / f(z)`.
    pub fn log_deriv(&self, z: Complex64) -> Result<Complex64> {
        match self {
            FunctionModel::Rational(r) => r.log_deriv(z),
            FunctionModel::Expression(e) => {
                let (v, zero) = e.tree.eval_tracked(z)?;
                if zero || v.norm() < f64::MIN_POSITIVE {
                    return Err(Error::ZeroAtPoint { z });
                }
                let q = e.derivative.eval(z)? / v;
                if q.re.is_finite() && q.im.is_finite() {
                    Ok(q)
                } else {
                    Err(Error::Singular { z })
                }
            }
        }
    }

    /// `f − a`. A shifted rational becomes an expression since its roots move.
    pub fn shift(&self, a: Complex64) -> FunctionModel {
        if a == Complex64::new(0.0, 0.0) {
            return self.clone();
        }
        let (tree, derivative, known_poles) = match self {
            FunctionModel::Rational(r) => {
                let tree = r.to_tree();
                let d = tree.derivative();
                let poles: Vec<Factor> = r.poles().copied().collect();
                (tree, Arc::new(d), Some(Arc::new(poles)))
            }
            FunctionModel::Expression(e) => (
                (*e.tree).clone(),
                e.derivative.clone(),
                e.known_poles.clone(),
            ),
        };
        FunctionModel::Expression(Expression {
            tree: Arc::new(ExprNode::sub(tree, ExprNode::Const(a))),
            derivative,
            known_poles,
        })
    }

    /// `1 / f`.
    pub fn reciprocal(&self) -> FunctionModel {
        match self {
            FunctionModel::Rational(r) => FunctionModel::Rational(Rational {
                scale: 1.0 / r.scale,
                factors: r
                    .factors
                    .iter()
                    .map(|f| Factor::new(f.root, -f.multiplicity))
                    .collect(),
            }),
            FunctionModel::Expression(e) => {
                let tree = ExprNode::div(ExprNode::constant(1.0), (*e.tree).clone());
                FunctionModel::Expression(Expression {
                    derivative: Arc::new(tree.derivative()),
                    tree: Arc::new(tree),
                    known_poles: None,
                })
            }
        }
    }

    /// The factor list of a rational model; expressions have none.
    pub fn exact_zeros_poles(&self) -> Option<&[Factor]> {
        self.as_rational().map(|r| r.factors())
    }

    /// Poles with multiplicity, when enumerable.
    pub fn known_poles(&self) -> Option<Vec<Factor>> {
        match self {
            FunctionModel::Rational(r) => Some(r.poles().copied().collect()),
            FunctionModel::Expression(e) => e.known_poles.as_ref().map(|p| p.to_vec()),
        }
    }

    /// The factored form when an expression denotes a rational function;
    /// anything else is returned unchanged.
    pub fn rationalized(&self) -> FunctionModel {
        match self {
            FunctionModel::Expression(e) => match rationalize::rationalize(&e.tree) {
                Some(r) => FunctionModel::Rational(r),
                None => self.clone(),
            },
            FunctionModel::Rational(_) => self.clone(),
        }
    }

    /// Equivalent expression tree (identity for expressions).
    pub fn to_expression(&self) -> FunctionModel {
        match self {
            FunctionModel::Rational(r) => FunctionModel::from_tree(r.to_tree()),
            FunctionModel::Expression(_) => self.clone(),
        }
    }

    /// True when `f'` is identically zero as far as the model can tell.
    pub fn is_constant(&self) -> bool {
        match self {
            FunctionModel::Rational(r) => r.factors.is_empty(),
            FunctionModel::Expression(e) => {
                matches!(*e.derivative, ExprNode::Const(c) if c == Complex64::new(0.0, 0.0))
            }
        }
    }

    /// Angles of known zeros and poles lying on `|z| = t` (relative tolerance `rel`).
    pub fn singular_angles(&self, t: f64, rel: f64) -> Vec<f64> {
        let pts: Vec<Complex64> = match self {
            FunctionModel::Rational(r) => r.factors.iter().map(|f| f.root).collect(),
            FunctionModel::Expression(e) => e
                .known_poles
                .as_ref()
                .map(|p| p.iter().map(|f| f.root).collect())
                .unwrap_or_default(),
        };
        let mut angles: Vec<f64> = pts
            .into_iter()
            .filter(|b| (b.norm() - t).abs() <= rel * t)
            .map(|b| b.arg().rem_euclid(std::f64::consts::TAU))
            .collect();
        angles.sort_by(f64::total_cmp);
        angles.dedup();
        angles
    }
}

fn const_value(text: &str, offset: usize) -> Result<Complex64> {
    let tree = parse_expr(text).map_err(|e| match e {
        Error::Syntax { offset: o, message } => Error::Syntax {
            offset: offset + o,
            message,
        },
        other => other,
    })?;
    if !tree.derivative().eq(&ExprNode::Const(Complex64::new(0.0, 0.0))) {
        return Err(Error::Syntax {
            offset,
            message: "expected a constant".into(),
        });
    }
    tree.eval(Complex64::new(0.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let f = FunctionModel::parse("z^3").unwrap();
        assert_eq!(f.eval(c(2.0, 0.0)).unwrap(), c(8.0, 0.0));

        let g = FunctionModel::parse("(z-2)/(z+0.5)^2").unwrap();
        assert!((g.eval(c(0.0, 0.0)).unwrap() - c(-8.0, 0.0)).norm() < 1e-15);

        let h = FunctionModel::parse("exp(1/z)").unwrap();
        let v = h.eval(c(0.0, 1.0)).unwrap();
        assert!((v - c(1f64.cos(), -1f64.sin())).norm() < 1e-15);
    }

    #[test]
    fn eval_at_pole_is_an_error() {
        let f = FunctionModel::rational(1.0, [Factor::new(2.0, -1)]).unwrap();
        assert!(matches!(f.eval(c(2.0, 0.0)), Err(Error::Singular { .. })));
        let g = FunctionModel::parse("1/(z-2)").unwrap();
        assert!(matches!(g.eval(c(2.0, 0.0)), Err(Error::Singular { .. })));
    }

    #[test]
    fn log_deriv_examples() {
        for m in [-3, 1, 4] {
            let f = FunctionModel::monomial(m);
            let z = c(0.3, -1.7);
            assert!((f.log_deriv(z).unwrap() - m as f64 / z).norm() < 1e-14);
        }
        let f = FunctionModel::rational(1.0, [Factor::new(2.0, 1), Factor::new(0.5, 1)]).unwrap();
        assert!((f.log_deriv(c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let g = FunctionModel::parse("exp(1/z)").unwrap();
        let z = c(0.0, 2.0);
        let ld = g.log_deriv(z).unwrap();
        assert!((ld - c(0.25, 0.0)).norm() < 1e-15);
        let h = 1e-6;
        let fd = (g.eval(z + h).unwrap() - g.eval(z - h).unwrap()) / (2.0 * h * g.eval(z).unwrap());
        assert!((fd - ld).norm() < 1e-6);
    }

    #[test]
    fn reciprocal_and_shift() {
        let f = FunctionModel::monomial(2);
        assert_eq!(
            f.reciprocal().exact_zeros_poles().unwrap(),
            &[Factor::new(0.0, -2)]
        );
        let s = f.shift(c(0.0, 0.0));
        assert_eq!(s.exact_zeros_poles().unwrap(), f.exact_zeros_poles().unwrap());

        let g = FunctionModel::rational(c(2.0, 1.0), [Factor::new(c(1.0, 1.0), 2), Factor::new(-0.5, -1)]).unwrap();
        let gg = g.reciprocal().reciprocal();
        for k in 0..10 {
            let z = Complex64::from_polar(0.3 + 0.2 * k as f64, 0.7 * k as f64);
            let (a, b) = (g.eval(z).unwrap(), gg.eval(z).unwrap());
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }

        let sh = g.shift(c(1.0, -1.0));
        assert!(!sh.is_rational());
        assert_eq!(sh.known_poles().unwrap(), vec![Factor::new(-0.5, -1)]);
        let z = c(0.2, 0.9);
        assert!((sh.eval(z).unwrap() - (g.eval(z).unwrap() - c(1.0, -1.0))).norm() < 1e-13);
    }

    #[test]
    fn exact_factor_lists() {
        let f = FunctionModel::from_spec("rational: 1; (2,1); (-0.5,-2)").unwrap();
        assert_eq!(
            f.exact_zeros_poles().unwrap(),
            &[Factor::new(2.0, 1), Factor::new(-0.5, -2)]
        );
        assert!(FunctionModel::parse("exp(1/z)").unwrap().exact_zeros_poles().is_none());
        assert_eq!(FunctionModel::constant(5.0).unwrap().exact_zeros_poles().unwrap(), &[]);
    }

    #[test]
    fn rational_spec_parsing() {
        let f = FunctionModel::from_spec("rational: (1+2i); ((0.5-1i), 3); (2,-1);").unwrap();
        let r = f.as_rational().unwrap();
        assert_eq!(r.scale(), c(1.0, 2.0));
        assert_eq!(r.factors()[0], Factor::new(c(0.5, -1.0), 3));
        assert!(FunctionModel::from_spec("rational: 1; (2,0)").is_err());
        assert!(FunctionModel::from_spec("rational: 0; (2,1)").is_err());
        assert!(FunctionModel::from_spec("rational: z; (2,1)").is_err());
        assert!(FunctionModel::from_spec("rational: 1; 2,1").is_err());
    }

    #[test]
    fn merging_cancels_factors() {
        let f = FunctionModel::rational(1.0, [Factor::new(2.0, 1), Factor::new(2.0, -1), Factor::new(1.0, 2)]).unwrap();
        assert_eq!(f.exact_zeros_poles().unwrap(), &[Factor::new(1.0, 2)]);
    }

    #[test]
    fn constant_detection() {
        assert!(FunctionModel::parse("5").unwrap().is_constant());
        assert!(FunctionModel::constant(5.0).unwrap().is_constant());
        assert!(!FunctionModel::parse("z").unwrap().is_constant());
    }
}
