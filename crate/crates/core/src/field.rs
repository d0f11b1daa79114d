//! Exact coefficient fields.
//!
//! Everything in the crate is computed over [`Q`] (arbitrary precision
//! rationals) or, for complexified pointwise linear algebra, over the
//! Gaussian rationals [`QI`]. The [`Ring`] and [`Field`] traits keep the
//! polynomial and matrix layers agnostic of which one is in use.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary precision rationals.
pub type Q = BigRational;
/// Gaussian rationals `Q(i)`.
pub type QI = Complex<Q>;

/// Commutative ring with unit, as needed by [`crate::matrix::Matrix`].
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Add<Output = Self>
        + Sub<Output = Self>
        + Mul<Output = Self>
        + Neg<Output = Self>
        + Send
        + Sync
{
}

/// Exact field of characteristic zero containing `Q`.
pub trait Field: Ring + Div<Output = Self> + Eq + std::hash::Hash {
    fn from_q(q: Q) -> Self;

    /// Square root of -1 if the field has one.
    fn imaginary_unit() -> Option<Self>;

    /// Complex conjugation (the identity on `Q`).
    fn conj(&self) -> Self;

    fn real_part(&self) -> Q;

    fn imag_part(&self) -> Q;

    fn is_real(&self) -> bool {
        self.imag_part().is_zero()
    }

    /// Renders the coefficient; `bare` is true when it is a pure rational that
    /// can be printed without parentheses.
    fn render(&self) -> (String, bool);

    fn from_i64(v: i64) -> Self {
        Self::from_q(q(v))
    }
}

impl Field for Q {
    fn from_q(q: Q) -> Self {
        q
    }

    fn imaginary_unit() -> Option<Self> {
        None
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn real_part(&self) -> Q {
        self.clone()
    }

    fn imag_part(&self) -> Q {
        Q::zero()
    }

    fn render(&self) -> (String, bool) {
        (self.to_string(), true)
    }
}

impl Field for QI {
    fn from_q(q: Q) -> Self {
        Complex::new(q, Q::zero())
    }

    fn imaginary_unit() -> Option<Self> {
        Some(Complex::new(Q::zero(), Q::one()))
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn real_part(&self) -> Q {
        self.re.clone()
    }

    fn imag_part(&self) -> Q {
        self.im.clone()
    }

    fn render(&self) -> (String, bool) {
        if self.im.is_zero() {
            return (self.re.to_string(), true);
        }
        let im = if self.im.is_one() {
            "i".to_string()
        } else if (-self.im.clone()).is_one() {
            "-i".to_string()
        } else {
            format!("{}*i", self.im)
        };
        if self.re.is_zero() {
            (im, false)
        } else if self.im.is_negative() {
            (format!("{}{}", self.re, im), false)
        } else {
            (format!("{}+{}", self.re, im), false)
        }
    }
}

/// Rings that contain a copy of `Q` (fields and polynomial rings over them).
pub trait FromRational: Ring {
    fn from_rational(q: &Q) -> Self;
}

impl FromRational for Q {
    fn from_rational(q: &Q) -> Self {
        q.clone()
    }
}

impl FromRational for QI {
    fn from_rational(q: &Q) -> Self {
        Complex::new(q.clone(), Q::zero())
    }
}

/// Rational from an integer.
pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Rational `num/den`; panics on a zero denominator.
pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Gaussian rational `re + im*i`.
pub fn qi(re: Q, im: Q) -> QI {
    Complex::new(re, im)
}

/// Parses `"3"`, `"-3/4"` or `" 7 "` as a rational.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Q::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        assert_eq!(parse_rational("-3/6"), Some(qr(-1, 2)));
        assert_eq!(parse_rational("4"), Some(q(4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        let z = qi(q(1), q(-2));
        assert_eq!(z.render().0, "1-2*i");
        assert_eq!(z.conj(), qi(q(1), q(2)));
        let i = QI::imaginary_unit().unwrap();
        assert_eq!(i.clone() * i, QI::from_i64(-1));
    }
}
