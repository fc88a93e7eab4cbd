//! Recursive-descent parser for the function language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' int)?
//! atom   := number | number 'i' | 'i' | 'z' | 'exp' '(' expr ')'
//!         | '(' number ('+' | '-') number 'i' ')'      complex literal
//!         | '(' expr ')'
//! int    := ('+' | '-')? digits
//! ```

use num_complex::Complex64;

use super::expr::ExprNode;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_EXPONENT: i32 = 64;

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    pub max_exponent: i32,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            max_exponent: DEFAULT_MAX_EXPONENT,
        }
    }
}

pub fn parse_expr(text: &str) -> Result<ExprNode> {
    parse_expr_with(text, ParseOptions::default())
}

pub fn parse_expr_with(text: &str, options: ParseOptions) -> Result<ExprNode> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty input".into(),
        });
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        options,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    options: ParseOptions,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", ch as char)))
        }
    }

    fn expr(&mut self) -> Result<ExprNode> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = ExprNode::add(lhs, self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = ExprNode::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprNode> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = ExprNode::mul(lhs, self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    if matches!(rhs, ExprNode::Const(c) if c == Complex64::new(0.0, 0.0)) {
                        return Err(self.error("division by the literal zero"));
                    }
                    lhs = ExprNode::div(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<ExprNode> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(ExprNode::neg(self.factor()?));
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.int()?;
            return Ok(ExprNode::pow(base, n));
        }
        Ok(base)
    }

    fn int(&mut self) -> Result<i32> {
        self.skip_ws();
        let start = self.pos;
        let mut negative = false;
        if let Some(&s @ (b'+' | b'-')) = self.src.get(self.pos) {
            negative = s == b'-';
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.error("expected an integer exponent"));
        }
        let digits = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
        let bound = self.options.max_exponent;
        let overflow = |exponent| Error::ExponentOverflow {
            offset: start,
            exponent,
            bound,
        };
        let magnitude: i64 = digits
            .parse()
            .map_err(|_| overflow(i64::MAX))?;
        let value = if negative { -magnitude } else { magnitude };
        if value.abs() > bound as i64 {
            return Err(overflow(value));
        }
        Ok(value as i32)
    }

    /// Lexes an unsigned real literal at the cursor, without skipping whitespace.
    fn number(&mut self) -> Option<f64> {
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        if i < s.len() && s[i] == b'.' {
            i += 1;
            while i < s.len() && s[i].is_ascii_digit() {
                i += 1;
            }
        }
        let mantissa = &s[start..i];
        if mantissa.is_empty() || mantissa == b"." {
            return None;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            let exp_digits = j;
            while j < s.len() && s[j].is_ascii_digit() {
                j += 1;
            }
            if j > exp_digits {
                i = j;
            }
        }
        let v = std::str::from_utf8(&s[start..i]).ok()?.parse().ok()?;
        self.pos = i;
        Some(v)
    }

    /// `( [-]num (+|-) num i )` starting at an opening parenthesis.
    fn complex_literal(&mut self) -> Option<Complex64> {
        let save = self.pos;
        let result = (|| {
            self.expect(b'(').ok()?;
            let mut sign_re = 1.0;
            if self.peek() == Some(b'-') {
                self.pos += 1;
                sign_re = -1.0;
                self.skip_ws();
            }
            let re = self.number()?;
            let sign_im = match self.peek()? {
                b'+' => 1.0,
                b'-' => -1.0,
                _ => return None,
            };
            self.pos += 1;
            self.skip_ws();
            let im = self.number()?;
            if self.src.get(self.pos) != Some(&b'i') {
                return None;
            }
            self.pos += 1;
            if self.src.get(self.pos).is_some_and(|b| b.is_ascii_alphanumeric()) {
                return None;
            }
            self.expect(b')').ok()?;
            Some(Complex64::new(sign_re * re, sign_im * im))
        })();
        if result.is_none() {
            self.pos = save;
        }
        result
    }

    fn atom(&mut self) -> Result<ExprNode> {
        let Some(ch) = self.peek() else {
            return Err(self.error("unexpected end of input"));
        };
        match ch {
            b'(' => {
                if let Some(c) = self.complex_literal() {
                    return Ok(ExprNode::Const(c));
                }
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            b'0'..=b'9' | b'.' => {
                let value = self
                    .number()
                    .ok_or_else(|| self.error("malformed number"))?;
                if self.src.get(self.pos) == Some(&b'i') {
                    let next = self.src.get(self.pos + 1);
                    if !next.is_some_and(|b| b.is_ascii_alphanumeric()) {
                        self.pos += 1;
                        return Ok(ExprNode::Const(Complex64::new(0.0, value)));
                    }
                }
                Ok(ExprNode::Const(Complex64::new(value, 0.0)))
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                match &self.src[start..self.pos] {
                    b"z" => Ok(ExprNode::Var),
                    b"i" => Ok(ExprNode::Const(Complex64::new(0.0, 1.0))),
                    b"exp" => {
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Ok(ExprNode::exp(arg))
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error("unknown identifier"))
                    }
                }
            }
            _ => Err(self.error(&format!("unexpected character '{}'", ch as char))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> ExprNode {
        ExprNode::Const(Complex64::new(re, 0.0))
    }

    #[test]
    fn cube() {
        assert_eq!(parse_expr("z^3").unwrap(), ExprNode::pow(ExprNode::Var, 3));
    }

    #[test]
    fn rational_quotient() {
        let want = ExprNode::div(
            ExprNode::sub(ExprNode::Var, c(2.0)),
            ExprNode::pow(ExprNode::add(ExprNode::Var, c(0.5)), 2),
        );
        assert_eq!(parse_expr("(z-2)/(z+0.5)^2").unwrap(), want);
    }

    #[test]
    fn exp_of_inverse() {
        let want = ExprNode::exp(ExprNode::div(c(1.0), ExprNode::Var));
        assert_eq!(parse_expr("exp(1/z)").unwrap(), want);
    }

    #[test]
    fn complex_literals() {
        assert_eq!(
            parse_expr("0.5i").unwrap(),
            ExprNode::Const(Complex64::new(0.0, 0.5))
        );
        assert_eq!(
            parse_expr("(1+2i)").unwrap(),
            ExprNode::Const(Complex64::new(1.0, 2.0))
        );
        assert_eq!(
            parse_expr("( -1.5 - 2e-3i )").unwrap(),
            ExprNode::Const(Complex64::new(-1.5, -2e-3))
        );
        assert_eq!(
            parse_expr("i*z").unwrap(),
            ExprNode::mul(ExprNode::Const(Complex64::new(0.0, 1.0)), ExprNode::Var)
        );
        // Not a literal: a real sum stays structural.
        assert_eq!(parse_expr("(2+3)").unwrap(), ExprNode::add(c(2.0), c(3.0)));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(
            parse_expr("-z^2").unwrap(),
            ExprNode::neg(ExprNode::pow(ExprNode::Var, 2))
        );
        assert_eq!(
            parse_expr("z^-2").unwrap(),
            ExprNode::pow(ExprNode::Var, -2)
        );
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse_expr("z^^2") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("{other:?}"),
        }
        match parse_expr("z + sin(z)") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("(z+1"), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse_expr("   "), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("1/0"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn exponent_bound() {
        assert!(matches!(
            parse_expr("z^65"),
            Err(Error::ExponentOverflow { offset: 2, exponent: 65, .. })
        ));
        assert!(parse_expr("z^-64").is_ok());
        let opts = ParseOptions { max_exponent: 4 };
        assert!(parse_expr_with("z^5", opts).is_err());
        assert!(parse_expr("z^99999999999999999999").is_err());
    }
}
