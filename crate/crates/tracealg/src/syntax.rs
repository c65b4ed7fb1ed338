//! Text syntax for trace polynomials and for commutative polynomials in
//! the ξ/u variables.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := "-"? factor ("*" factor)*
//! factor := atom ("^" nat)?
//! atom   := rational | "x" nat "'"? | "Tr" "(" expr ")" | "(" expr ")"
//! ```
//!
//! The commutative grammar replaces the letter atoms by `xi(j,a,b)`,
//! `u(a,b)` and `aux(j,a,b)`.

use std::fmt;

use thiserror::Error;

use crate::scalar_poly::{Matrix, MultiPoly, PolyMatrix, Rational, VarId};
use crate::trace_ring::TracePolynomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at line {line}, column {column}: expected {expected}, found {found}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Scalar(Rational),
    Var(u32, bool),
    Tr(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Pow(Box<Ast>, u32),
    /// Commutative-grammar variable.
    CVar(VarId),
}

impl Ast {
    pub fn to_trace_polynomial(&self) -> TracePolynomial {
        match self {
            Ast::Scalar(c) => TracePolynomial::constant(c.clone()),
            Ast::Var(j, false) => TracePolynomial::var(*j),
            Ast::Var(j, true) => TracePolynomial::var_star(*j),
            Ast::Tr(a) => a.to_trace_polynomial().trace(),
            Ast::Add(a, b) => a.to_trace_polynomial().add(&b.to_trace_polynomial()),
            Ast::Sub(a, b) => a.to_trace_polynomial().sub(&b.to_trace_polynomial()),
            Ast::Mul(a, b) => a.to_trace_polynomial().mul(&b.to_trace_polynomial()),
            Ast::Neg(a) => a.to_trace_polynomial().neg(),
            Ast::Pow(a, e) => a.to_trace_polynomial().pow(*e),
            Ast::CVar(v) => panic!("commutative variable {v} in a trace expression"),
        }
    }

    pub fn to_poly(&self) -> MultiPoly {
        match self {
            Ast::Scalar(c) => MultiPoly::constant(c.clone()),
            Ast::CVar(v) => MultiPoly::var(*v),
            Ast::Add(a, b) => a.to_poly().add_ref(&b.to_poly()),
            Ast::Sub(a, b) => a.to_poly().sub_ref(&b.to_poly()),
            Ast::Mul(a, b) => a.to_poly().mul_ref(&b.to_poly()),
            Ast::Neg(a) => a.to_poly().neg_ref(),
            Ast::Pow(a, e) => a.to_poly().pow(*e),
            Ast::Var(..) | Ast::Tr(_) => panic!("trace expression in a commutative context"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(s) => write!(f, "number `{s}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq)]
enum Grammar {
    Trace,
    Commutative,
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    grammar: Grammar,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut col) = (1, 1);
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
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && (chars[i] == '.' || chars[i] == 'e' || chars[i] == 'E') {
                return Err(SyntaxError {
                    line,
                    column: col + (i - start),
                    expected: "an integer or rational p/q (floats are not accepted)".into(),
                    found: format!("`{}`", chars[i]),
                });
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Num(s), l0, c0));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Ident(s), l0, c0));
            continue;
        }
        if "+-*^()'/,[]".contains(c) {
            out.push((Tok::Sym(c), l0, c0));
            i += 1;
            col += 1;
            continue;
        }
        if c == '.' {
            return Err(SyntaxError {
                line,
                column: col,
                expected: "an integer or rational p/q (floats are not accepted)".into(),
                found: "`.`".into(),
            });
        }
        return Err(SyntaxError { line, column: col, expected: "a token".into(), found: format!("`{c}`") });
    }
    out.push((Tok::End, line, col));
    Ok(out)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn err<T>(&self, expected: &str) -> Result<T, SyntaxError> {
        let (tok, line, column) = &self.toks[self.pos];
        Err(SyntaxError { line: *line, column: *column, expected: expected.into(), found: tok.to_string() })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(&format!("`{c}`"))
        }
    }

    fn nat(&mut self) -> Result<u64, SyntaxError> {
        if let Tok::Num(s) = self.peek().clone() {
            if let Ok(v) = s.parse() {
                self.pos += 1;
                return Ok(v);
            }
        }
        self.err("a natural number")
    }

    fn expr(&mut self) -> Result<Ast, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast, SyntaxError> {
        if self.eat('-') {
            return Ok(Ast::Neg(Box::new(self.term()?)));
        }
        let mut lhs = self.factor()?;
        while self.eat('*') {
            lhs = Ast::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Ast, SyntaxError> {
        let a = self.atom()?;
        if self.eat('^') {
            let e = self.nat()?;
            let e = u32::try_from(e).or_else(|_| self.err("a small exponent"))?;
            return Ok(Ast::Pow(Box::new(a), e));
        }
        Ok(a)
    }

    fn index(&mut self) -> Result<usize, SyntaxError> {
        let v = self.nat()?;
        if v == 0 || v > 255 {
            self.pos -= 1;
            return self.err("an index in 1..=255");
        }
        Ok(v as usize)
    }

    fn atom(&mut self) -> Result<Ast, SyntaxError> {
        match self.peek().clone() {
            Tok::Num(p) => {
                self.pos += 1;
                let mut text = p;
                if *self.peek() == Tok::Sym('/') {
                    self.pos += 1;
                    match self.peek().clone() {
                        Tok::Num(q) => {
                            self.pos += 1;
                            text = format!("{text}/{q}");
                        }
                        _ => return self.err("a denominator"),
                    }
                }
                match text.parse::<Rational>() {
                    Ok(r) => Ok(Ast::Scalar(r)),
                    Err(_) => {
                        self.pos -= 1;
                        self.err("a nonzero denominator")
                    }
                }
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                match (self.grammar, name.as_str()) {
                    (Grammar::Trace, "Tr") => {
                        self.expect('(')?;
                        let e = self.expr()?;
                        self.expect(')')?;
                        Ok(Ast::Tr(Box::new(e)))
                    }
                    (Grammar::Trace, "x") => {
                        let j = self.index()?;
                        let starred = self.eat('\'');
                        Ok(Ast::Var(j as u32, starred))
                    }
                    (Grammar::Commutative, "xi" | "aux") => {
                        self.expect('(')?;
                        let j = self.index()?;
                        self.expect(',')?;
                        let a = self.index()?;
                        self.expect(',')?;
                        let b = self.index()?;
                        self.expect(')')?;
                        Ok(Ast::CVar(if name == "xi" { VarId::xi(j, a, b) } else { VarId::aux(j, a, b) }))
                    }
                    (Grammar::Commutative, "u") => {
                        self.expect('(')?;
                        let a = self.index()?;
                        self.expect(',')?;
                        let b = self.index()?;
                        self.expect(')')?;
                        Ok(Ast::CVar(VarId::u(a, b)))
                    }
                    _ => {
                        self.pos -= 1;
                        self.err(match self.grammar {
                            Grammar::Trace => "a number, `x<j>`, `Tr(` or `(`",
                            Grammar::Commutative => "a number, `xi(j,a,b)`, `u(a,b)`, `aux(j,a,b)` or `(`",
                        })
                    }
                }
            }
            _ => self.err("an expression"),
        }
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.err("an operator or end of input")
        }
    }
}

fn parse_with(text: &str, grammar: Grammar) -> Result<Ast, SyntaxError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, grammar };
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses the trace-polynomial grammar.
pub fn parse(text: &str) -> Result<Ast, SyntaxError> {
    parse_with(text, Grammar::Trace)
}

pub fn parse_trace_polynomial(text: &str) -> Result<TracePolynomial, SyntaxError> {
    Ok(parse(text)?.to_trace_polynomial())
}

/// Parses a commutative polynomial in `xi(j,a,b)`, `u(a,b)`, `aux(j,a,b)`.
pub fn parse_poly(text: &str) -> Result<MultiPoly, SyntaxError> {
    Ok(parse_with(text, Grammar::Commutative)?.to_poly())
}

/// Parses `[[e, e], [e, e]]` with commutative entries.
pub fn parse_poly_matrix(text: &str) -> Result<PolyMatrix, SyntaxError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, grammar: Grammar::Commutative };
    p.expect('[')?;
    let mut rows: Vec<Vec<MultiPoly>> = Vec::new();
    loop {
        p.expect('[')?;
        let mut row = vec![p.expr()?.to_poly()];
        while p.eat(',') {
            row.push(p.expr()?.to_poly());
        }
        p.expect(']')?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return p.err(&format!("a row of length {}", first.len()));
            }
        }
        rows.push(row);
        if !p.eat(',') {
            break;
        }
    }
    p.expect(']')?;
    p.finish()?;
    if rows.len() != rows[0].len() {
        return p.err("a square matrix");
    }
    Ok(Matrix::from_rows(rows))
}

/// Trace polynomials serialize as strings in the text syntax.
impl serde::Serialize for TracePolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for TracePolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_trace_polynomial(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intro_polynomial() {
        let f = parse_trace_polynomial("5*Tr(x1*x1') - 2*Tr(x1)*(x1 + x1')").unwrap();
        assert_eq!(f.num_terms(), 3);
        assert_eq!(parse_trace_polynomial(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn cyclic_traces_agree() {
        assert_eq!(parse_trace_polynomial("Tr(x2*x1)").unwrap(), parse_trace_polynomial("Tr(x1*x2)").unwrap());
        assert_eq!(parse("x1'").unwrap(), Ast::Var(1, true));
    }

    #[test]
    fn rationals_powers_and_negation() {
        let f = parse_trace_polynomial("-3/2*x1^2 + Tr(1)").unwrap();
        assert_eq!(parse_trace_polynomial(&f.to_string()).unwrap(), f);
        assert!(parse("1.5*x1").is_err());
        assert!(parse("1/0").is_err());
    }

    #[test]
    fn errors_have_positions() {
        let e = parse("x1 +\n  * x2").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(parse("Tr(x1").is_err());
        assert!(parse("x0").is_err());
    }

    #[test]
    fn commutative_grammar() {
        let p = parse_poly("xi(1,1,2)^2 - 3*u(1,1)").unwrap();
        assert_eq!(p.num_terms(), 2);
        let m = parse_poly_matrix("[[xi(1,1,1), 0], [1/2, u(2,2)]]").unwrap();
        assert_eq!(*m.get(1, 0), MultiPoly::constant(Rational::new(1, 2)));
        assert!(parse_poly_matrix("[[1, 2], [3]]").is_err());
    }
}
