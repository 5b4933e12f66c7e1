//! Noncommutative polynomials over `Q(√2, √5)` in dichotomic letters.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::ExtScalar;
use crate::error::{Error, Result};
use crate::word::{Letter, Word};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NcPolynomial {
    terms: BTreeMap<Word, ExtScalar>,
}

impl NcPolynomial {
    pub fn zero() -> NcPolynomial {
        NcPolynomial::default()
    }

    pub fn constant(c: ExtScalar) -> NcPolynomial {
        NcPolynomial::term(Word::identity(), c)
    }

    pub fn term(word: Word, coef: ExtScalar) -> NcPolynomial {
        let mut p = NcPolynomial::zero();
        p.add_term(word, &coef);
        p
    }

    /// The letter `party_setting`, e.g. `letter(0, 1)` is `A1`.
    pub fn letter(party: usize, setting: usize) -> NcPolynomial {
        NcPolynomial::term(Word::letter(Letter::new(party, setting)), ExtScalar::int(1))
    }

    pub fn add_term(&mut self, word: Word, coef: &ExtScalar) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(coef.clone());
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ExtScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, word: &Word) -> ExtScalar {
        self.terms.get(word).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The scalar value if this is a constant polynomial.
    pub fn as_constant(&self) -> Option<ExtScalar> {
        match self.terms.len() {
            0 => Some(ExtScalar::zero()),
            1 => self.terms.get(&Word::identity()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, s: &ExtScalar) -> NcPolynomial {
        let mut out = NcPolynomial::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), &(c * s));
        }
        out
    }

    pub fn nc_mul(&self, other: &NcPolynomial) -> NcPolynomial {
        let mut out = NcPolynomial::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.add_term(w1.mul(w2), &(c1 * c2));
            }
        }
        out
    }

    /// Formal adjoint; coefficients are real so only words change.
    pub fn adjoint(&self) -> NcPolynomial {
        let mut out = NcPolynomial::zero();
        for (w, c) in &self.terms {
            out.add_term(w.adjoint(), c);
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.adjoint() == *self
    }

    /// Evaluates with a numeric value for each letter; only meaningful for
    /// commuting substitutions.
    pub fn eval_f64(&self, value: impl Fn(Letter) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(w, c)| c.to_f64() * w.letters().iter().map(|&l| value(l)).product::<f64>())
            .sum()
    }

    /// Parses the expression grammar: letters `A0`..`Z9`, scalars `p/q`,
    /// `sqrt2`, `sqrt5`, `sqrt10`, operators `+ - *`, division by scalars,
    /// `^n` powers and parentheses. Juxtaposition multiplies.
    pub fn parse(text: &str) -> Result<NcPolynomial> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let out = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("trailing input in {text:?}")));
        }
        Ok(out)
    }
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let coef = c.to_string();
            let multi = coef.contains(' ');
            let (sign, body) = match coef.strip_prefix('-') {
                Some(rest) if !multi => ("-", rest.to_string()),
                _ => ("+", coef.clone()),
            };
            let body = if multi { format!("({body})") } else { body };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if w.is_empty() {
                write!(f, "{body}")?;
            } else if body == "1" {
                write!(f, "{w}")?;
            } else {
                write!(f, "{body}*{w}")?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a NcPolynomial> for &'a NcPolynomial {
    type Output = NcPolynomial;
    fn add(self, o: &NcPolynomial) -> NcPolynomial {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a NcPolynomial> for &'a NcPolynomial {
    type Output = NcPolynomial;
    fn sub(self, o: &NcPolynomial) -> NcPolynomial {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), &-c);
        }
        out
    }
}

impl<'a> Mul<&'a NcPolynomial> for &'a NcPolynomial {
    type Output = NcPolynomial;
    fn mul(self, o: &NcPolynomial) -> NcPolynomial {
        self.nc_mul(o)
    }
}

impl Neg for &NcPolynomial {
    type Output = NcPolynomial;
    fn neg(self) -> NcPolynomial {
        self.scale(&ExtScalar::int(-1))
    }
}

macro_rules! owned_poly_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for NcPolynomial {
            type Output = NcPolynomial;
            fn $m(self, o: NcPolynomial) -> NcPolynomial {
                (&self).$m(&o)
            }
        }
    )*};
}
owned_poly_ops!(Add add, Sub sub, Mul mul);

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(i64),
    Sqrt(u8),
    Letter(Letter),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |msg: String| Error::Parse(format!("{msg} in {text:?}"));
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' | '*' | '/' | '(' | ')' | '^' | '-' => {
                out.push(Token::Op(c));
                i += 1;
            }
            '−' => {
                out.push(Token::Op('-'));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token::Int(s.parse().map_err(|_| err(format!("bad integer {s}")))?));
            }
            's' => {
                let rest: String = chars[i..].iter().collect();
                let (tok, len) = if rest.starts_with("sqrt10") {
                    (10, 6)
                } else if rest.starts_with("sqrt2") {
                    (2, 5)
                } else if rest.starts_with("sqrt5") {
                    (5, 5)
                } else {
                    return Err(err("unknown symbol".into()));
                };
                out.push(Token::Sqrt(tok));
                i += len;
            }
            'A'..='Z' => {
                let party = (c as u8 - b'A') as usize;
                match chars.get(i + 1) {
                    Some(d) if d.is_ascii_digit() => {
                        out.push(Token::Letter(Letter::new(party, (*d as u8 - b'0') as usize)));
                        i += 2;
                    }
                    _ => return Err(err(format!("letter {c} needs a setting digit"))),
                }
            }
            _ => return Err(err(format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<NcPolynomial> {
        let mut acc = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<NcPolynomial> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Op('*')) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Token::Op('/')) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    let d = d
                        .as_constant()
                        .filter(|c| !c.is_zero())
                        .ok_or_else(|| Error::Parse("division by a non-scalar or zero".into()))?;
                    acc = acc.scale(&d.inverse().unwrap());
                }
                Some(Token::Op('(')) | Some(Token::Int(_)) | Some(Token::Sqrt(_)) | Some(Token::Letter(_)) => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<NcPolynomial> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<NcPolynomial> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let Some(Token::Int(n)) = self.peek().cloned() else {
                return Err(Error::Parse("exponent must be a non-negative integer".into()));
            };
            self.pos += 1;
            let mut out = NcPolynomial::constant(ExtScalar::int(1));
            for _ in 0..n {
                out = &out * &base;
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<NcPolynomial> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Token::Int(n) => Ok(NcPolynomial::constant(ExtScalar::int(n))),
            Token::Sqrt(2) => Ok(NcPolynomial::constant(ExtScalar::sqrt2())),
            Token::Sqrt(5) => Ok(NcPolynomial::constant(ExtScalar::sqrt5())),
            Token::Sqrt(_) => Ok(NcPolynomial::constant(ExtScalar::sqrt10())),
            Token::Letter(l) => Ok(NcPolynomial::term(Word::letter(l), ExtScalar::int(1))),
            Token::Op('(') => {
                let inner = self.expr()?;
                match self.peek() {
                    Some(Token::Op(')')) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(Error::Parse("missing ')'".into())),
                }
            }
            Token::Op(c) => Err(Error::Parse(format!("unexpected {c:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> NcPolynomial {
        NcPolynomial::parse(s).unwrap()
    }

    #[test]
    fn rewriting_rules() {
        assert_eq!(p("A0*A0"), p("1"));
        assert_eq!(p("A0*B0"), p("B0*A0"));
        assert_eq!(p("A0 A1 * A1 A0"), p("1"));
        assert_ne!(p("A0 A1"), p("A1 A0"));
    }

    #[test]
    fn parser_scalars() {
        assert_eq!(p("1/2 + 1/2"), p("1"));
        assert_eq!(p("sqrt2 * sqrt5"), p("sqrt10"));
        assert_eq!(p("(A0 + B0)^2"), p("2 + 2 A0 B0"));
        assert_eq!(p("A0/(2 sqrt2)"), p("sqrt2/4 * A0"));
        assert_eq!(p("-A0 - -A0"), NcPolynomial::zero());
        assert!(NcPolynomial::parse("A0/B0").is_err());
        assert!(NcPolynomial::parse("A0 +").is_err());
        assert!(NcPolynomial::parse("x").is_err());
    }

    #[test]
    fn adjoint_and_hermiticity() {
        let q = p("A0 A1 + B0");
        assert!(!q.is_hermitian());
        assert!((&q.adjoint() * &q).is_hermitian());
        assert!(p("A0 A1 + A1 A0").is_hermitian());
    }

    #[test]
    fn display_round_trips() {
        for s in ["1/2 - sqrt10/12 * A0 B1", "A0 A1 - 3 C1 + 2", "0"] {
            let q = p(s);
            assert_eq!(p(&q.to_string()), q);
        }
    }
}
