//! Sparse multivariate polynomials with exact coefficients.
//!
//! A [`Poly`] is a finite map from exponent vectors to nonzero coefficients.
//! Exponent vectors are stored with trailing zeros trimmed, so a polynomial
//! does not need to know how many variables its chart has and constants are
//! compatible with every chart. Zero coefficients are never stored, which
//! makes structural equality coincide with mathematical equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::{parse_rational, Field, Q};

/// Exponent vector with trailing zeros removed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[u16; 8]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(i: usize) -> Self {
        let mut e = SmallVec::from_elem(0, i + 1);
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        let mut e: SmallVec<[u16; 8]> = exps.iter().copied().collect();
        while e.last() == Some(&0) {
            e.pop();
        }
        Monomial(e)
    }

    pub fn exponent(&self, i: usize) -> u16 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// Highest variable index that occurs, plus one.
    pub fn width(&self) -> usize {
        self.0.len()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let mut e: SmallVec<[u16; 8]> = SmallVec::with_capacity(n);
        for i in 0..n {
            e.push(self.exponent(i) + other.exponent(i));
        }
        Monomial(e)
    }
}

impl Ord for Monomial {
    /// Graded order: total degree first, then lexicographic with `x1 > x2 > ...`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                match self.exponent(i).cmp(&other.exponent(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial over the exact field `F`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly<F: Field = Q> {
    terms: BTreeMap<Monomial, F>,
}

impl<F: Field> Poly<F> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn from_i64(c: i64) -> Self {
        Self::constant(F::from_i64(c))
    }

    /// The coordinate function `x_{i+1}` (0-based index `i`).
    pub fn var(i: usize) -> Self {
        let mut p = Self::zero();
        p.terms.insert(Monomial::var(i), F::one());
        p
    }

    pub fn monomial(m: Monomial, c: F) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// Constant term when the polynomial is constant.
    pub fn as_constant(&self) -> Option<F> {
        if self.is_zero() {
            return Some(F::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn constant_term(&self) -> F {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(F::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &F)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Number of variables actually referenced.
    pub fn width(&self) -> usize {
        self.terms.keys().map(|m| m.width()).max().unwrap_or(0)
    }

    /// Largest term in the graded order, if any.
    pub fn leading_term(&self) -> Option<(&Monomial, &F)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to the 0-based variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            let mut exps: SmallVec<[u16; 8]> = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial::from_exponents(&exps), c.clone() * F::from_i64(e as i64));
        }
        out
    }

    /// Evaluates at a point; variables beyond `point.len()` are an error.
    pub fn eval(&self, point: &[F]) -> Result<F> {
        if self.width() > point.len() {
            return Err(Error::Arity { expected: point.len(), found: self.width() });
        }
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    t = t * point[i].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        let mut out = Poly::<G>::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Renders with the given coordinate names, highest term first.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (mut cs, bare) = c.render();
            let negative = bare && cs.starts_with('-');
            if negative {
                cs.remove(0);
            }
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else if negative {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut factors = Vec::new();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
                if e == 1 {
                    factors.push(name);
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            let coeff = if bare { cs } else { format!("({cs})") };
            if factors.is_empty() {
                out.push_str(&coeff);
            } else if coeff == "1" {
                out.push_str(&factors.join("*"));
            } else {
                out.push_str(&coeff);
                out.push('*');
                out.push_str(&factors.join("*"));
            }
        }
        out
    }

    /// Parses a polynomial literal such as `"3/2*x1^2*x3 - x2"` over the
    /// coordinate names `names`. The identifier `i` denotes the Gaussian unit
    /// unless it is itself a coordinate name.
    pub fn parse(src: &str, names: &[String]) -> Result<Self> {
        let mut p = Parser { src, pos: 0, names };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(v)
    }
}

impl Poly<Q> {
    /// Lifts a rational polynomial to Gaussian coefficients.
    pub fn complexify<G: Field>(&self) -> Poly<G> {
        self.map_coeffs(|c| G::from_q(c.clone()))
    }
}

impl<F: Field> crate::field::FromRational for Poly<F> {
    fn from_rational(q: &Q) -> Self {
        Poly::constant(F::from_q(q.clone()))
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

impl<F: Field> Zero for Poly<F> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<F: Field> One for Poly<F> {
    fn one() -> Self {
        Poly::one()
    }
}

impl<F: Field> From<F> for Poly<F> {
    fn from(c: F) -> Self {
        Poly::constant(c)
    }
}

impl<F: Field> AddAssign<&Poly<F>> for Poly<F> {
    fn add_assign(&mut self, rhs: &Poly<F>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<F: Field> SubAssign<&Poly<F>> for Poly<F> {
    fn sub_assign(&mut self, rhs: &Poly<F>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<F: Field> Add<&Poly<F>> for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: &Poly<F>) -> Poly<F> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<F: Field> Sub<&Poly<F>> for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: &Poly<F>) -> Poly<F> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<F: Field> Mul<&Poly<F>> for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: &Poly<F>) -> Poly<F> {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<F: Field> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<F: Field> $tr<Poly<F>> for Poly<F> {
            type Output = Poly<F>;
            fn $m(self, rhs: Poly<F>) -> Poly<F> {
                (&self).$m(&rhs)
            }
        }
        impl<F: Field> $tr<&Poly<F>> for Poly<F> {
            type Output = Poly<F>;
            fn $m(self, rhs: &Poly<F>) -> Poly<F> {
                (&self).$m(rhs)
            }
        }
        impl<F: Field> $tr<Poly<F>> for &Poly<F> {
            type Output = Poly<F>;
            fn $m(self, rhs: Poly<F>) -> Poly<F> {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<F: Field> Neg for Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        -&self
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    names: &'a [String],
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { input: self.src.to_string(), pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr<F: Field>(&mut self) -> Result<Poly<F>> {
        self.skip_ws();
        let mut acc = if self.eat('-') {
            -self.term::<F>()?
        } else {
            self.eat('+');
            self.term::<F>()?
        };
        loop {
            if self.eat('+') {
                acc = acc + self.term::<F>()?;
            } else if self.eat('-') {
                acc = acc - self.term::<F>()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<F: Field>(&mut self) -> Result<Poly<F>> {
        let mut acc = self.factor::<F>()?;
        loop {
            if self.eat('*') {
                acc = acc * self.factor::<F>()?;
            } else if self.eat('/') {
                let at = self.pos;
                let d = self.factor::<F>()?;
                match d.as_constant() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&(F::one() / c)),
                    _ => {
                        self.pos = at;
                        return Err(self.err("division only by a nonzero constant"));
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor<F: Field>(&mut self) -> Result<Poly<F>> {
        let base = self.base::<F>()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            let e: u32 = self.src[start..self.pos].parse().map_err(|_| self.err("expected exponent"))?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn base<F: Field>(&mut self) -> Result<Poly<F>> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr::<F>()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(v)
            }
            Some('-') => {
                self.pos += 1;
                Ok(-self.factor::<F>()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let q = parse_rational(&self.src[start..self.pos]).ok_or_else(|| self.err("bad number"))?;
                Ok(Poly::constant(F::from_q(q)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let ident = &self.src[start..self.pos];
                if let Some(k) = self.names.iter().position(|n| n == ident) {
                    return Ok(Poly::var(k));
                }
                if ident == "i" {
                    return match F::imaginary_unit() {
                        Some(u) => Ok(Poly::constant(u)),
                        None => {
                            self.pos = start;
                            Err(self.err("Gaussian unit 'i' not allowed over the rationals"))
                        }
                    };
                }
                self.pos = start;
                Err(self.err(&format!("unknown identifier '{ident}'")))
            }
            _ => Err(self.err("expected number, identifier or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, qi, qr, QI};

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let x: Poly = Poly::var(0);
        let y: Poly = Poly::var(1);
        let p = &(&x + &y) - &y;
        assert_eq!(p, x);
        assert!((&x - &x).is_zero());
        assert_eq!((&x - &x).num_terms(), 0);
    }

    #[test]
    fn parse_display_roundtrip() {
        let n = names(3);
        let p: Poly = Poly::parse("3/2*x1^2*x3 - x2", &n).unwrap();
        assert_eq!(p.display_with(&n), "3/2*x1^2*x3 - x2");
        let r: Poly = Poly::parse(&p.display_with(&n), &n).unwrap();
        assert_eq!(p, r);
        let z: Poly<QI> = Poly::parse("(1+2*i)*x1 - i", &n).unwrap();
        assert_eq!(z.eval(&[QI::from_i64(1)]).unwrap(), qi(q(1), q(1)));
        assert!(Poly::<Q>::parse("i*x1", &n).is_err());
        assert!(Poly::<Q>::parse("x4", &n).is_err());
        assert!(Poly::<Q>::parse("x1/x2", &n).is_err());
    }

    #[test]
    fn derivative_and_eval() {
        let n = names(2);
        let p: Poly = Poly::parse("x1*x2 + x1^3", &n).unwrap();
        assert_eq!(p.derivative(0), Poly::parse("x2 + 3*x1^2", &n).unwrap());
        assert_eq!(p.eval(&[q(2), q(3)]).unwrap(), q(14));
        assert_eq!(Poly::<Q>::parse("x1*x2", &n).unwrap().eval(&[q(2), q(3)]).unwrap(), q(6));
        assert!(p.eval(&[q(1)]).is_err());
        assert_eq!(p.scale(&qr(1, 2)).eval(&[q(2), q(3)]).unwrap(), q(7));
    }
}
