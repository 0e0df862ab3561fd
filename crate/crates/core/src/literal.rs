//! Series literal grammar.
//!
//! ```text
//! series  := term ('+' term)*  |  '0'
//! term    := 'O' '(' var power? ')'  |  factor ('*' factor)*
//! factor  := integer | 'x' power? | var power? | '(' csum ')'
//! csum    := cterm ('+' cterm)*          cterm := (integer | 'x' power?) ('*' ...)*
//! power   := '^' ( '{' rational '}' | digits )
//! var     := 't' (formal) | 'p' (arithmetic)
//! ```
//!
//! Example: `(x^{3/2} + 2*x^{1/4})*t^{5/8} + x*t^{2} + O(t^{3})`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::domains::{Coefficient, CoefficientDomain};
use crate::series::{canonicalize, Mode, RawSeries, Series, SeriesError};
use crate::value::{parse_rational, Exponent, Precision};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiteralError {
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    var: char,
}

type PResult<T> = Result<T, LiteralError>;

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(LiteralError::Parse { position: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn expect(&mut self, want: char) -> PResult<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => self.err(format!("expected `{want}`, found `{c}`")),
            None => self.err(format!("expected `{want}`, found end of input")),
        }
    }

    fn digits(&mut self) -> PResult<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek_raw() {
            if c.is_ascii_digit() {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(&self.src[start..self.pos])
    }

    fn integer(&mut self) -> PResult<BigInt> {
        let d = self.digits()?;
        Ok(d.parse().expect("ascii digits"))
    }

    /// Optional `^...`; defaults to exponent one.
    fn power(&mut self) -> PResult<Exponent> {
        if self.peek() != Some('^') {
            return Ok(Exponent::integer(1));
        }
        self.bump();
        let at = self.pos;
        let text = if self.peek() == Some('{') {
            self.bump();
            self.skip_ws();
            let start = self.pos;
            while let Some(c) = self.peek_raw() {
                if c == '}' {
                    break;
                }
                self.pos += c.len_utf8();
            }
            let body = &self.src[start..self.pos];
            self.expect('}')?;
            body
        } else {
            self.digits()?
        };
        let q = parse_rational(text)
            .map_err(|_| LiteralError::Parse { position: at, message: format!("malformed exponent `{text}`") })?;
        Exponent::new(q)
            .map_err(|_| LiteralError::Parse { position: at, message: format!("negative exponent `{text}`") })
    }

    /// Sum of coefficient monomials inside parentheses.
    fn coeff_sum(&mut self) -> PResult<Coefficient> {
        let mut acc = self.coeff_product()?;
        while self.peek() == Some('+') {
            self.bump();
            acc = &acc + &self.coeff_product()?;
        }
        Ok(acc)
    }

    fn coeff_product(&mut self) -> PResult<Coefficient> {
        let mut acc = self.coeff_factor()?;
        while self.peek() == Some('*') {
            self.bump();
            acc = &acc * &self.coeff_factor()?;
        }
        Ok(acc)
    }

    fn coeff_factor(&mut self) -> PResult<Coefficient> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Coefficient::constant(self.integer()?)),
            Some('x') => {
                self.bump();
                Ok(Coefficient::x_pow(self.power()?))
            }
            Some('(') => {
                self.bump();
                let c = self.coeff_sum()?;
                self.expect(')')?;
                Ok(c)
            }
            Some(c) => self.err(format!("unexpected `{c}` in coefficient")),
            None => self.err("unexpected end of input"),
        }
    }

    fn term(&mut self, terms: &mut Vec<(Exponent, Coefficient)>, prec: &mut Precision) -> PResult<()> {
        if self.peek() == Some('O') {
            self.bump();
            self.expect('(')?;
            match self.bump() {
                Some(c) if c == self.var => {}
                _ => return self.err(format!("expected `{}` inside O(...)", self.var)),
            }
            let e = self.power()?;
            self.expect(')')?;
            *prec = prec.min_with(&Precision::Finite(e));
            return Ok(());
        }
        let mut coeff = Coefficient::one();
        let mut index = Exponent::zero();
        loop {
            match self.peek() {
                Some(c) if c == self.var => {
                    self.bump();
                    index = &index + &self.power()?;
                }
                Some('t') | Some('p') => {
                    return self.err(format!("series variable must be `{}` in this mode", self.var));
                }
                _ => coeff = &coeff * &self.coeff_factor()?,
            }
            if self.peek() == Some('*') {
                self.bump();
            } else {
                break;
            }
        }
        terms.push((index, coeff));
        Ok(())
    }

    fn series(&mut self) -> PResult<(Vec<(Exponent, Coefficient)>, Precision)> {
        let mut terms = Vec::new();
        let mut prec = Precision::Infinite;
        self.term(&mut terms, &mut prec)?;
        while self.peek() == Some('+') {
            self.bump();
            self.term(&mut terms, &mut prec)?;
        }
        if let Some(c) = self.peek() {
            return self.err(format!("unexpected `{c}`"));
        }
        Ok((terms, prec))
    }
}

fn parse_terms(text: &str, mode: Mode) -> PResult<(Vec<(Exponent, Coefficient)>, Precision)> {
    let mut parser = Parser { src: text, pos: 0, var: mode.variable() };
    if parser.peek().is_none() {
        return parser.err("empty series literal");
    }
    parser.series()
}

/// Parses without carrying (arithmetic mode only).
pub fn parse_raw(text: &str, domain: &CoefficientDomain) -> Result<RawSeries, LiteralError> {
    let (terms, prec) = parse_terms(text, Mode::Arithmetic)?;
    Ok(RawSeries::new(domain.clone(), terms, prec)?)
}

/// Parses a literal into a canonical series; arithmetic input is carried.
pub fn parse_series(text: &str, domain: &CoefficientDomain, mode: Mode) -> Result<Series, LiteralError> {
    match mode {
        Mode::Arithmetic => Ok(canonicalize(&parse_raw(text, domain)?)?),
        Mode::Formal => {
            let (terms, prec) = parse_terms(text, mode)?;
            Ok(Series::new(domain.clone(), mode, terms, prec)?)
        }
    }
}

/// Parses `i:G` pairs separated by commas, e.g. `1:1, 2:1/2`.
pub fn parse_nodes(text: &str) -> Result<Vec<(Exponent, num_rational::BigRational)>, LiteralError> {
    let mut out = BTreeMap::new();
    let mut offset = 0;
    for chunk in text.split(',') {
        let bad = |m: &str| LiteralError::Parse { position: offset, message: m.to_string() };
        let (i, g) = chunk.split_once(':').ok_or_else(|| bad("expected `i:G`"))?;
        let i: Exponent = i.trim().parse().map_err(|_| bad("malformed node index"))?;
        let g = parse_rational(g).map_err(|_| bad("malformed node value"))?;
        out.insert(i, g);
        offset += chunk.len() + 1;
    }
    Ok(out.into_iter().collect())
}
