//! Text grammar for polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer ('/' integer)? | variable | '(' expr ')'
//! ```
//!
//! Variables are `x1..xn`; for `n <= 4` the aliases `x, y, z, w` are accepted
//! too. Whitespace is insignificant.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Monomial, PolyError, Polynomial, Rational};

const ALIASES: [&str; 4] = ["x", "y", "z", "w"];

/// Variable naming context for parsing and printing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vars {
    names: Vec<String>,
    aliases: bool,
}

impl Vars {
    /// `x, y, z, w` for up to four variables, `x1..xn` beyond.
    pub fn standard(nvars: usize) -> Self {
        if nvars <= ALIASES.len() {
            Vars {
                names: ALIASES[..nvars].iter().map(|s| s.to_string()).collect(),
                aliases: true,
            }
        } else {
            Vars {
                names: (1..=nvars).map(|i| format!("x{i}")).collect(),
                aliases: false,
            }
        }
    }

    /// Single variable `t`, used for arcs.
    pub fn arc() -> Self {
        Vars {
            names: vec!["t".to_string()],
            aliases: false,
        }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// Index of a variable name, honouring both naming schemes.
    pub fn lookup(&self, ident: &str) -> Option<usize> {
        if let Some(i) = self.names.iter().position(|n| n == ident) {
            return Some(i);
        }
        if self.aliases || self.names.first().is_some_and(|n| n.starts_with('x')) {
            if let Some(rest) = ident.strip_prefix('x') {
                if let Ok(k) = rest.parse::<usize>() {
                    if k >= 1 && k <= self.names.len() && !rest.starts_with('0') {
                        return Some(k - 1);
                    }
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
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
}

fn err(column: usize, message: impl Into<String>) -> PolyError {
    PolyError::Parse {
        column,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, PolyError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Tok::Int(s.parse().expect("digits")), col));
                continue;
            }
            a if a.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
                continue;
            }
            other => return Err(err(col, format!("unexpected character '{other}'"))),
        };
        out.push((tok, col));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a Vars,
    end_col: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let col = self.col();
            match self.bump() {
                Some(Tok::Int(k)) => {
                    let k: u32 = k
                        .try_into()
                        .map_err(|_| err(col, "exponent too large"))?;
                    Ok(base.pow(k))
                }
                _ => Err(err(col, "expected a nonnegative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        let n = self.vars.nvars();
        let col = self.col();
        match self.bump() {
            Some(Tok::Int(num)) => {
                let mut q = Rational::from_integer(num);
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let dcol = self.col();
                    match self.bump() {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            q /= Rational::from_integer(d);
                        }
                        Some(Tok::Int(_)) => return Err(err(dcol, "zero denominator")),
                        _ => return Err(err(dcol, "expected an integer denominator")),
                    }
                }
                Ok(Polynomial::constant(n, q))
            }
            Some(Tok::Ident(name)) => match self.vars.lookup(&name) {
                Some(i) => Ok(Polynomial::monomial(Monomial::var(n, i), Rational::one())),
                None => Err(err(col, format!("unknown variable '{name}'"))),
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let rcol = self.col();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(err(rcol, "expected ')'")),
                }
            }
            Some(Tok::Slash) => Err(err(col, "division is only allowed in rational literals")),
            Some(_) => Err(err(col, "unexpected token")),
            None => Err(err(col, "unexpected end of input")),
        }
    }
}

pub fn parse_poly(src: &str, vars: &Vars) -> Result<Polynomial, PolyError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars,
        end_col: src.chars().count() + 1,
    };
    let out = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(err(p.col(), "trailing input"));
    }
    Ok(out)
}

/// Parses an integer or `a/b` rational literal, optionally signed.
pub fn parse_rational(src: &str) -> Result<Rational, PolyError> {
    let p = parse_poly(src, &Vars { names: Vec::new(), aliases: false })?;
    Ok(p.constant_term())
}
