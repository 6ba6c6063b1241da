//! Parser for polynomial literals such as `3/2*x^-2*y + 1` or `u + 2*u^2*eps`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-')* power
//! power  := atom ('^' ('+' | '-')? integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Division is only allowed by nonzero constants, which is how rational
//! coefficients `p/q` are written. Negative exponents require a unit.

use num_bigint::BigInt;

use super::element::{RingElem, RingRef};
use super::laurent::LaurentPoly;
use super::scalar::Scalar;
use crate::error::{Error, Result};

const MAX_DEPTH: usize = 128;
const MAX_TERMS: usize = 20_000;
const MAX_EXPONENT: i64 = 1_000_000;
const MAX_COEFF_BITS: u64 = 1 << 16;
// enough digits for any coefficient within MAX_COEFF_BITS, so printed
// elements always parse back
const MAX_DIGITS: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token {
                tok,
                line: l0,
                column: c0,
            });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i - start > MAX_DIGITS {
                return Err(err(l0, c0, "integer literal too long"));
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token {
                tok: Tok::Int(s.parse().expect("digits")),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(s),
                line: l0,
                column: c0,
            });
            continue;
        }
        return Err(err(l0, c0, format!("unexpected character `{c}`")));
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    ring: &'a RingRef,
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn check_size(&self, e: &RingElem, at: &Token) -> Result<()> {
        let terms: usize = e.parts().map(|(_, p)| p.len()).sum();
        if terms > MAX_TERMS {
            return Err(err(at.line, at.column, "expression too large"));
        }
        if coeff_bits(e) > MAX_COEFF_BITS {
            return Err(err(at.line, at.column, "coefficient too large"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<RingElem> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let t = self.peek();
            return Err(err(t.line, t.column, "expression nested too deeply"));
        }
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add_ref(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub_ref(&self.term()?);
                }
                _ => break,
            }
            let at = self.peek().clone();
            self.check_size(&acc, &at)?;
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<RingElem> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    let at = self.bump();
                    let rhs = self.unary()?;
                    let lhs_terms: usize = acc.parts().map(|(_, p)| p.len()).sum();
                    let rhs_terms: usize = rhs.parts().map(|(_, p)| p.len()).sum();
                    if lhs_terms.saturating_mul(rhs_terms) > MAX_TERMS {
                        return Err(err(at.line, at.column, "expression too large"));
                    }
                    check_exponent_sum(&acc, &rhs, &at)?;
                    acc = acc.mul_ref(&rhs);
                    self.check_size(&acc, &at)?;
                }
                Tok::Slash => {
                    let at = self.bump();
                    let rhs = self.unary()?;
                    let c = constant_of(&rhs).ok_or_else(|| err(at.line, at.column, "division only by constants"))?;
                    let inv = c.inv().map_err(|_| err(at.line, at.column, "division by zero"))?;
                    acc = acc.scale(&inv);
                    self.check_size(&acc, &at)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RingElem> {
        let mut negate = false;
        loop {
            match self.peek().tok {
                Tok::Minus => {
                    self.bump();
                    negate = !negate;
                }
                Tok::Plus => {
                    self.bump();
                }
                _ => break,
            }
        }
        let v = self.power()?;
        Ok(if negate { v.neg_ref() } else { v })
    }

    fn power(&mut self) -> Result<RingElem> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        let caret = self.bump();
        let mut neg = false;
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                neg = true;
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        let t = self.bump();
        let n = match t.tok {
            Tok::Int(n) => n,
            _ => return Err(err(t.line, t.column, "expected integer exponent")),
        };
        let n: i64 = i64::try_from(n)
            .ok()
            .filter(|&n| n <= MAX_EXPONENT)
            .ok_or_else(|| err(t.line, t.column, "exponent too large"))?;
        let e = if neg { -n } else { n };
        let terms: usize = base.parts().map(|(_, p)| p.len()).sum();
        if terms > 1 && e.abs() > 64 {
            return Err(err(caret.line, caret.column, "exponent too large for a sum"));
        }
        if (base.max_abs_exponent() as i64).saturating_mul(e.abs()) > MAX_EXPONENT {
            return Err(err(caret.line, caret.column, "exponent too large"));
        }
        // a lower bound on the result size; the exact size is checked after
        if coeff_bits(&base).saturating_sub(1).saturating_mul(e.unsigned_abs()) > MAX_COEFF_BITS {
            return Err(err(caret.line, caret.column, "coefficient too large"));
        }
        if terms > 1 && multisets(terms, e.unsigned_abs()) > MAX_TERMS {
            return Err(err(caret.line, caret.column, "expression too large"));
        }
        let v = base
            .pow(e as i32)
            .map_err(|e| err(caret.line, caret.column, e.to_string()))?;
        self.check_size(&v, &caret)?;
        Ok(v)
    }

    fn atom(&mut self) -> Result<RingElem> {
        let t = self.bump();
        match t.tok {
            Tok::Int(ref n) => {
                let c = RingElem::constant(
                    self.ring,
                    Scalar::from_bigints(n.clone(), BigInt::from(1)).expect("nonzero denominator"),
                );
                self.check_size(&c, &t)?;
                Ok(c)
            }
            Tok::Ident(name) => {
                if let Some(i) = self.ring.var_index(&name) {
                    Ok(RingElem::var(self.ring, i))
                } else if let Some(j) = self.ring.nil_index(&name) {
                    Ok(RingElem::nil_gen(self.ring, j))
                } else {
                    Err(err(t.line, t.column, format!("unknown variable `{name}`")))
                }
            }
            Tok::LParen => {
                let v = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return Err(err(close.line, close.column, "expected `)`"));
                }
                Ok(v)
            }
            Tok::End => Err(err(t.line, t.column, "unexpected end of input")),
            other => Err(err(t.line, t.column, format!("unexpected token {other:?}"))),
        }
    }
}

/// Number of monomials of degree `e` in `k` symbols, saturating at
/// `MAX_TERMS + 1`; bounds the size of a power of a `k`-term sum.
fn multisets(k: usize, e: u64) -> usize {
    let mut c: u128 = 1;
    for i in 1..k as u128 {
        c = c * (e as u128 + i) / i;
        if c > MAX_TERMS as u128 {
            return MAX_TERMS + 1;
        }
    }
    c as usize
}

/// Largest numerator or denominator bit length among the coefficients.
fn coeff_bits(e: &RingElem) -> u64 {
    e.parts()
        .flat_map(|(_, p)| p.terms().map(|(_, c)| c.numer().bits().max(c.denom().bits())))
        .max()
        .unwrap_or(0)
}

fn constant_of(e: &RingElem) -> Option<Scalar> {
    if !e.is_nilpotent() || e.is_zero() {
        if e.parts().any(|(m, _)| m != 0) {
            return None;
        }
        return e.body().as_constant();
    }
    None
}

fn check_exponent_sum(a: &RingElem, b: &RingElem, at: &Token) -> Result<()> {
    if (a.max_abs_exponent() as i64) + (b.max_abs_exponent() as i64) > MAX_EXPONENT {
        return Err(err(at.line, at.column, "exponent too large"));
    }
    Ok(())
}

/// Parses a literal into an element of `ring`. Identifiers must name base
/// variables or nilpotent generators of the ring; negative powers of
/// non-invertible variables are rejected.
pub fn parse_elem(ring: &RingRef, src: &str) -> Result<RingElem> {
    let toks = lex(src)?;
    let mut p = Parser {
        ring,
        toks,
        pos: 0,
        depth: 0,
    };
    let v = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(err(t.line, t.column, "trailing input"));
    }
    Ok(v)
}

/// Parses a literal into a Laurent polynomial of the ring's base variables.
pub fn parse_poly(ring: &RingRef, src: &str) -> Result<LaurentPoly> {
    let base = ring.base();
    Ok(parse_elem(&base, src)?.body())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::element::Ring;

    #[test]
    fn parses_rational_coefficients_and_negative_exponents() {
        let r = Ring::torus(&["x", "y"]);
        let e = parse_elem(&r, "3/2*x^-2*y + 1").unwrap();
        assert_eq!(e.to_string(), "1 + 3/2*x^-2*y");
        let again = parse_elem(&r, &e.to_string()).unwrap();
        assert_eq!(again, e);
    }

    #[test]
    fn nilpotents_and_parentheses() {
        let r = Ring::polynomial(&["u"]).with_dual("eps").unwrap();
        let e = parse_elem(&r, "(u + eps)^2 - -u").unwrap();
        assert_eq!(e.to_string(), "u^2 + u + 2*u*eps");
        assert!(parse_elem(&r, "eps*eps").unwrap().is_zero());
    }

    #[test]
    fn errors_carry_positions() {
        let r = Ring::polynomial(&["u"]);
        match parse_elem(&r, "u +\n  w") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_elem(&r, "u^-1").is_err());
        assert!(parse_elem(&r, "u/u").is_err());
        assert!(parse_elem(&r, "1/0").is_err());
        assert!(parse_elem(&r, "(u").is_err());
        assert!(parse_elem(&r, "u)").is_err());
        assert!(parse_elem(&r, "").is_err());
    }

    #[test]
    fn pathological_inputs_are_rejected_not_hung() {
        let r = Ring::polynomial(&["x", "y", "z"]);
        assert!(parse_elem(&r, "(x+y+z+1)^64").is_err());
        assert!(parse_elem(&r, "((x^1000)^1000)^1000").is_err());
        assert!(parse_elem(&r, &"(".repeat(10_000)).is_err());
        assert!(parse_elem(&r, "((2^60000)^60000)").is_err());
    }

    #[test]
    fn large_constants_print_and_parse_back() {
        let r = Ring::polynomial(&["x"]);
        for src in ["333^3333", "2^65000/3^30000*x", "(7^5000 + x)*(7^5000 - x)"] {
            let a = parse_elem(&r, src).unwrap();
            assert_eq!(parse_elem(&r, &a.to_string()).unwrap(), a, "{src}");
        }
        assert!(parse_elem(&r, "2^40000*2^40000").is_err());
        assert!(parse_elem(&r, &"9".repeat(20_001)).is_err());
    }
}
