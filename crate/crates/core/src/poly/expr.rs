//! Sparse polynomials over Z[i] in a handful of named variables, with a small
//! infix parser (`+ - * ^`, parentheses, integers, `i`).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianInt, I, ONE, ZERO};

/// Polynomial in `nvars` variables; keys are exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, GaussianInt>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: GaussianInt) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, ONE);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], GaussianInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    fn add_term(&mut self, exps: Vec<u32>, c: GaussianInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert(ZERO);
        *entry = *entry + c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -*c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: GaussianInt) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), *x * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, *c1 * *c2);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::constant(self.nvars, ONE);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, f: impl Fn(GaussianInt) -> GaussianInt) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(*c));
        }
        out
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.degree_in(var) > 0
    }

    /// Replaces variable `var` by `value`.
    pub fn substitute(&self, var: usize, value: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            rest[var] = 0;
            let mut mono = Self::zero(self.nvars);
            mono.add_term(rest, *c);
            out = out.add(&mono.mul(&value.pow(e[var])));
        }
        out
    }

    /// Coefficients in `var`, lowest degree first; fails if another variable occurs.
    pub fn univariate(&self, var: usize) -> Result<Vec<GaussianInt>> {
        let mut out = vec![ZERO; self.degree_in(var) as usize + 1];
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(k, &x)| k != var && x > 0) {
                return Err(Error::Elimination("polynomial still involves an eliminated variable".into()));
            }
            out[e[var] as usize] = *c;
        }
        while out.len() > 1 && out.last() == Some(&ZERO) {
            out.pop();
        }
        if self.is_zero() {
            out.clear();
        }
        Ok(out)
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(k, &x)| if x == 1 { names[k].to_string() } else { format!("{}^{x}", names[k]) })
                .collect();
            let coeff = if c.im != 0 && c.re != 0 { format!("({c})") } else { c.to_string() };
            parts.push(match (mono.is_empty(), *c) {
                (true, _) => coeff,
                (false, ONE) => mono.join("*"),
                (false, c) if c == -ONE => format!("-{}", mono.join("*")),
                (false, _) => format!("{coeff}*{}", mono.join("*")),
            });
        }
        parts.join(" + ").replace("+ -", "- ")
    }

    /// Parses `text` with the given variable names; `i` is the imaginary unit.
    pub fn parse(text: &str, names: &[String]) -> Result<Self> {
        if names.iter().any(|n| n == "i") {
            return Err(Error::Parse("`i` is reserved for the imaginary unit".into()));
        }
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens, pos: 0, names, text };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(i128),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '_') {
                k += 1;
            }
            let s: String = chars[start..k].iter().filter(|c| **c != '_').collect();
            out.push(Token::Num(s.parse().map_err(|_| Error::Parse(format!("number too large in `{text}`")))?));
        } else if c.is_ascii_alphabetic() {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            out.push(Token::Ident(chars[start..k].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Token::Sym(c));
            k += 1;
        } else {
            return Err(Error::Parse(format!("unexpected `{c}` in `{text}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    names: &'a [String],
    text: &'a str,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at token {} in `{}`", self.pos, self.text))
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let n = self.names.len();
        let mut acc = Poly::zero(n);
        let mut sign = if self.eat('-') {
            -1
        } else {
            self.eat('+');
            1
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc.sub(&t) } else { acc.add(&t) };
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
                continue;
            }
            // juxtaposition such as `2x` or `3(x+1)`
            match self.peek() {
                Some(Token::Num(_)) | Some(Token::Ident(_)) | Some(Token::Sym('(')) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Token::Num(e)) if (0..=64).contains(&e) => {
                    self.pos += 1;
                    Ok(base.pow(e as u32))
                }
                _ => Err(self.error("expected exponent between 0 and 64")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        let n = self.names.len();
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Poly::constant(n, GaussianInt::from_int(v)))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if name == "i" {
                    return Ok(Poly::constant(n, I));
                }
                match self.names.iter().position(|x| *x == name) {
                    Some(k) => Ok(Poly::var(n, k)),
                    None => Err(Error::Parse(format!("unknown variable `{name}` in `{}`", self.text))),
                }
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let p = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(p)
            }
            Some(Token::Sym('-')) => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            _ => Err(self.error("expected a term")),
        }
    }
}
