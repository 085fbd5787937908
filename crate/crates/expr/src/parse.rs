//! Text syntax for expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := base ('^' exponent)?
//! base   := number | ident '\''* | 'exp' '(' expr ')' | '(' expr ')'
//! exponent := integer | '(' '-'? integer ('/' integer)? ')'
//! ```
//!
//! Identifiers must be declared in the [`ParseContext`] unless implicit
//! coordinates are enabled.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};

use crate::atom::{sym, Atom};
use crate::expr::Expr;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected character `{ch}` at {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unexpected {found} at {pos}, expected {expected}")]
    Unexpected { found: String, expected: &'static str, pos: usize },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdent { name: String, pos: usize },
    #[error("division by zero at {pos}")]
    DivisionByZero { pos: usize },
    #[error("power not representable at {pos}")]
    BadPower { pos: usize },
    #[error("exponent out of range at {pos}")]
    ExponentRange { pos: usize },
}

#[derive(Debug, Clone, Default)]
pub struct ParseContext {
    coords: Vec<String>,
    funcs: HashMap<String, String>,
    integrals: HashMap<String, (String, Expr)>,
    implicit: bool,
}

impl ParseContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn coords<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        self.coords.extend(names.into_iter().map(Into::into));
        self
    }

    /// Declares a function symbol of one coordinate; primes denote derivatives.
    pub fn func(mut self, name: &str, arg: &str) -> Self {
        self.funcs.insert(name.into(), arg.into());
        self
    }

    pub fn integral(mut self, name: &str, var: &str, integrand: Expr) -> Self {
        self.integrals.insert(name.into(), (var.into(), integrand));
        self
    }

    /// Treat undeclared identifiers as coordinates.
    pub fn implicit_coords(mut self, on: bool) -> Self {
        self.implicit = on;
        self
    }

    pub fn parse(&self, src: &str) -> Result<Expr, ParseError> {
        let toks = lex(src)?;
        let mut p = Parser { ctx: self, toks, i: 0, end: src.len() };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some(t) => Err(ParseError::Unexpected { found: t.tok.describe(), expected: "end of input", pos: t.pos }),
        }
    }
}

/// Parses with every identifier taken as a coordinate.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    ParseContext::new().implicit_coords(true).parse(src)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Prime,
    Op(char),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Prime => "`'`".into(),
            Tok::Op(c) => format!("`{c}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let b: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < b.len() {
        let (pos, c) = b[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < b.len() && b[j].1.is_ascii_digit() {
                j += 1;
            }
            let end = if j < b.len() { b[j].0 } else { src.len() };
            let n: BigInt = src[pos..end].parse().expect("digits");
            out.push(Spanned { tok: Tok::Num(n), pos });
            i = j;
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < b.len() && (b[j].1.is_alphanumeric() || b[j].1 == '_') {
                j += 1;
            }
            let end = if j < b.len() { b[j].0 } else { src.len() };
            out.push(Spanned { tok: Tok::Ident(src[pos..end].to_string()), pos });
            i = j;
        } else if c == '\'' {
            out.push(Spanned { tok: Tok::Prime, pos });
            i += 1;
        } else if "+-*/^()".contains(c) {
            out.push(Spanned { tok: Tok::Op(c), pos });
            i += 1;
        } else {
            return Err(ParseError::UnexpectedChar { ch: c, pos });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: &'a ParseContext,
    toks: Vec<Spanned>,
    i: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.i)
    }

    fn pos(&self) -> usize {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    fn eat_op(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Spanned { tok: Tok::Op(x), .. }) if *x == c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, c: char, expected: &'static str) -> Result<(), ParseError> {
        if self.eat_op(c) {
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let found = self.peek().map(|t| t.tok.describe()).unwrap_or_else(|| "end of input".into());
        ParseError::Unexpected { found, expected, pos: self.pos() }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat_op('+') {
                acc = &acc + &self.term()?;
            } else if self.eat_op('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_op('*') {
                acc = &acc * &self.unary()?;
            } else if self.check_op('/') {
                let pos = self.pos();
                self.i += 1;
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(ParseError::DivisionByZero { pos });
                }
                acc = &acc / &d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn check_op(&self, c: char) -> bool {
        matches!(self.peek(), Some(Spanned { tok: Tok::Op(x), .. }) if *x == c)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op('-') {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if !self.check_op('^') {
            return Ok(base);
        }
        let pos = self.pos();
        self.i += 1;
        let e = self.exponent()?;
        if base.is_zero() && *e.numer() <= 0 {
            return Err(ParseError::DivisionByZero { pos });
        }
        base.pow_rational(e).ok_or(ParseError::BadPower { pos })
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Some(Spanned { tok: Tok::Num(n), .. }) => {
                let v = i64::try_from(n).map_err(|_| ParseError::ExponentRange { pos })?;
                self.i += 1;
                Ok(v)
            }
            _ => Err(self.unexpected("integer")),
        }
    }

    fn exponent(&mut self) -> Result<Rational64, ParseError> {
        if !self.eat_op('(') {
            return Ok(Rational64::from(self.integer()?));
        }
        let neg = self.eat_op('-');
        let n = self.integer()?;
        let pos = self.pos();
        let d = if self.eat_op('/') { self.integer()? } else { 1 };
        if d == 0 {
            return Err(ParseError::DivisionByZero { pos });
        }
        self.expect_op(')', "`)`")?;
        Ok(Rational64::new(if neg { -n } else { n }, d))
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let Some(t) = self.peek().cloned() else {
            return Err(self.unexpected("operand"));
        };
        match t.tok {
            Tok::Num(n) => {
                self.i += 1;
                Ok(Expr::scalar(Scalar::from_rational(BigRational::from_integer(n))))
            }
            Tok::Op('(') => {
                self.i += 1;
                let e = self.expr()?;
                self.expect_op(')', "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.i += 1;
                if name == "exp" && self.check_op('(') {
                    self.i += 1;
                    let e = self.expr()?;
                    self.expect_op(')', "`)`")?;
                    return Ok(Expr::exp(&e));
                }
                let mut order = 0u32;
                while matches!(self.peek(), Some(Spanned { tok: Tok::Prime, .. })) {
                    order += 1;
                    self.i += 1;
                }
                if let Some(arg) = self.ctx.funcs.get(&name) {
                    return Ok(Expr::atom(Atom::Func { name: sym(&name), arg: sym(arg), order }));
                }
                let plain = |e: Expr| {
                    if order == 0 {
                        Ok(e)
                    } else {
                        Err(ParseError::Unexpected { found: "`'`".into(), expected: "operator", pos: t.pos + name.len() })
                    }
                };
                if let Some((var, integrand)) = self.ctx.integrals.get(&name) {
                    return plain(Expr::integral(&name, var, integrand.clone()));
                }
                if self.ctx.implicit || self.ctx.coords.iter().any(|c| *c == name) {
                    return plain(Expr::var(&name));
                }
                Err(ParseError::UnknownIdent { name, pos: t.pos })
            }
            _ => Err(self.unexpected("operand")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse("1 + 2*x^2 - -x").unwrap();
        let x = Expr::var("x");
        assert!(e.equals(&(&(&Expr::one() + &(&Expr::int(2) * &x.pow_i(2))) + &x)));
    }

    #[test]
    fn primes_and_radicals() {
        let ctx = ParseContext::new().coords(["x"]).func("I", "x");
        let e = ctx.parse("I'' * 2^(-5/6) * 3^(-1/3)").unwrap();
        let c = &Scalar::prime_power(2, Rational64::new(-5, 6)) * &Scalar::prime_power(3, Rational64::new(-1, 3));
        assert!(e.equals(&(&Expr::scalar(c) * &Expr::func("I", "x", 2))));
    }

    #[test]
    fn errors_carry_positions() {
        let ctx = ParseContext::new().coords(["x"]);
        assert_eq!(ctx.parse("x + w"), Err(ParseError::UnknownIdent { name: "w".into(), pos: 4 }));
        assert!(matches!(ctx.parse("x +"), Err(ParseError::Unexpected { pos: 3, .. })));
        assert!(matches!(ctx.parse("x / 0"), Err(ParseError::DivisionByZero { pos: 2 })));
        assert!(matches!(ctx.parse("x $"), Err(ParseError::UnexpectedChar { ch: '$', pos: 2 })));
    }

    #[test]
    fn exp_of_linear_form() {
        let e = parse("exp(2*y - x)").unwrap();
        let s = e.to_string();
        assert_eq!(parse(&s).unwrap(), e);
    }
}
