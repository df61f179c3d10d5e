use std::collections::HashMap;

use super::{Expression, KernelError, RatFunc};
use crate::ring::{Gauss, Rational};

/// Supplies meaning for the identifiers and jet atoms met by
/// [`parse_expression`].
pub trait ExprResolver {
    fn ident(&mut self, name: &str) -> Option<Expression>;

    /// `d^order(arg)`, the x-derivative of a parsed argument; unsupported
    /// by default.
    fn derive(&mut self, _order: u32, _arg: Expression) -> Result<Expression, String> {
        Err("x-derivatives are not allowed here".into())
    }
}

/// Resolver backed by a fixed name table.
#[derive(Clone, Debug, Default)]
pub struct NameTable(pub HashMap<String, Expression>);

impl NameTable {
    pub fn insert(&mut self, name: impl Into<String>, value: Expression) {
        self.0.insert(name.into(), value);
    }
}

impl ExprResolver for NameTable {
    fn ident(&mut self, name: &str) -> Option<Expression> {
        self.0.get(name).cloned()
    }
}

/// Converts a byte offset into 1-based line and column.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Parses `text` with `+ - * / ^`, parentheses, rational literals, the
/// imaginary unit (`i` or `k`, also as a suffix `3/2i`) and `d^k(name)`.
/// Division is only by nonzero constants. Error positions are relative to
/// `text`, shifted by `origin` (line, column) when given.
pub fn parse_expression(
    text: &str,
    resolver: &mut dyn ExprResolver,
    origin: Option<(usize, usize)>,
) -> Result<Expression, KernelError> {
    let r = parse_inner(text, resolver, origin, false)?;
    Ok(r.num)
}

/// Like [`parse_expression`] but division by any nonzero expression is
/// allowed, producing a rational function.
pub fn parse_ratfunc(
    text: &str,
    resolver: &mut dyn ExprResolver,
    origin: Option<(usize, usize)>,
) -> Result<RatFunc, KernelError> {
    parse_inner(text, resolver, origin, true)
}

fn parse_inner(
    text: &str,
    resolver: &mut dyn ExprResolver,
    origin: Option<(usize, usize)>,
    rational: bool,
) -> Result<RatFunc, KernelError> {
    let mut p = Parser { src: text, pos: 0, resolver, rational };
    let result = p.expr().and_then(|e| {
        p.skip_ws();
        if p.pos < p.src.len() {
            Err((p.pos, format!("unexpected `{}`", p.rest().chars().next().unwrap())))
        } else {
            Ok(e)
        }
    });
    result.map_err(|(off, message)| {
        let (l, c) = line_col(text, off);
        let (line, col) = match origin {
            Some((ol, oc)) if l == 1 => (ol, oc + c - 1),
            Some((ol, _)) => (ol + l - 1, c),
            None => (l, c),
        };
        KernelError::Parse { line, col, message }
    })
}

type PResult<T> = Result<T, (usize, String)>;

struct Parser<'a, 'r> {
    src: &'a str,
    pos: usize,
    resolver: &'r mut dyn ExprResolver,
    rational: bool,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

impl Parser<'_, '_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err((self.pos, format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> PResult<RatFunc> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> PResult<RatFunc> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?);
            } else if self.peek() == Some('/') {
                let at = self.pos;
                self.pos += 1;
                let d = self.power()?;
                let constant = d.as_polynomial().and_then(|e| e.as_gauss()).is_some_and(|g| !g.is_zero());
                if !constant && !self.rational {
                    return Err((at, "division by a non-constant or zero expression".into()));
                }
                acc = acc.div(&d).ok_or((at, "division by zero".to_string()))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> PResult<RatFunc> {
        let base = if self.eat('-') { self.atom()?.neg() } else { self.atom()? };
        if self.eat('^') {
            let e = self.uint()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn uint(&mut self) -> PResult<u32> {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().chars().take_while(|c| c.is_ascii_digit()).count();
        if len == 0 {
            return Err((start, "expected an integer exponent".into()));
        }
        self.pos += len;
        self.src[start..self.pos].parse().map_err(|_| (start, "exponent too large".into()))
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        let len: usize = self.rest().chars().take_while(|c| is_ident_char(*c)).map(char::len_utf8).sum();
        self.pos += len;
        &self.src[start..self.pos]
    }

    fn atom(&mut self) -> PResult<RatFunc> {
        let Some(c) = self.peek() else {
            return Err((self.pos, "unexpected end of expression".into()));
        };
        let start = self.pos;
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() {
            let len = self.rest().chars().take_while(|c| c.is_ascii_digit()).count();
            self.pos += len;
            // `p/q` written without spaces is a single literal
            let rest = self.rest();
            if rest.starts_with('/') && rest[1..].starts_with(|c: char| c.is_ascii_digit()) {
                self.pos += 1 + rest[1..].chars().take_while(|c| c.is_ascii_digit()).count();
            }
            let n: Rational = self.src[start..self.pos].parse().map_err(|_| (start, "bad number".to_string()))?;
            // an `i`/`k` glued to a literal is the imaginary unit
            let rest = self.rest();
            let unit = (rest.starts_with('i') || rest.starts_with('k'))
                && !rest[1..].chars().next().is_some_and(is_ident_char);
            if unit {
                self.pos += 1;
                return Ok(Expression::gauss(Gauss::new(Rational::default(), n)).into());
            }
            return Ok(Expression::rational(n).into());
        }
        if is_ident_start(c) {
            let name = self.ident().to_string();
            if name == "d" && matches!(self.peek(), Some('^') | Some('(')) {
                let order = if self.eat('^') { self.uint()? } else { 1 };
                self.expect('(')?;
                self.skip_ws();
                let arg_at = self.pos;
                let arg = self.expr()?;
                self.expect(')')?;
                let Some(arg) = arg.as_polynomial().cloned() else {
                    return Err((arg_at, "cannot differentiate a rational function".into()));
                };
                return self.resolver.derive(order, arg).map(RatFunc::poly).map_err(|m| (arg_at, m));
            }
            if let Some(v) = self.resolver.ident(&name) {
                return Ok(v.into());
            }
            if name == "i" || name == "k" {
                return Ok(Expression::gauss(Gauss::k()).into());
            }
            return Err((start, format!("unknown name `{name}`")));
        }
        Err((start, format!("unexpected `{c}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Parity, Symbol};

    fn table() -> NameTable {
        let mut t = NameTable::default();
        t.insert("u_0", Expression::symbol(Symbol::series("u", 0, Parity::Even)));
        t.insert("a", Expression::symbol(Symbol::param("a")));
        t
    }

    #[test]
    fn arithmetic() {
        let e = parse_expression("2*(u_0 + 1)^2 - 1/2*a", &mut table(), None).unwrap();
        assert_eq!(e.render(), "2 - 1/2*a + 4*u_0 + 2*u_0^2");
    }

    #[test]
    fn imaginary_unit() {
        let e = parse_expression("3/2i + k*k", &mut table(), None).unwrap();
        assert_eq!(e.as_gauss().unwrap(), Gauss::parse("-1+3/2i").unwrap());
    }

    #[test]
    fn rational_functions() {
        let r = parse_ratfunc("1/a + 1/(a+1)", &mut table(), None).unwrap();
        let s = parse_ratfunc("(2*a+1)/(a^2+a)", &mut table(), None).unwrap();
        assert!(r.equals(&s));
        assert_eq!(parse_expression("3/2i", &mut table(), None).unwrap().as_gauss().unwrap(), Gauss::parse("3/2i").unwrap());
    }

    #[test]
    fn error_position() {
        let err = parse_expression("u_0 + zz", &mut table(), Some((4, 10))).unwrap_err();
        assert_eq!(err, KernelError::Parse { line: 4, col: 16, message: "unknown name `zz`".into() });
        let err = parse_expression("u_0 / a", &mut table(), None).unwrap_err();
        assert!(matches!(err, KernelError::Parse { col: 5, .. }));
    }
}
