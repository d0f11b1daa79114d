//! Seeded generators of random polynomial data for property tests and the
//! randomized corpus entries.

use rand::Rng;

use crate::field::{qr, Q};
use crate::matrix::Matrix;
use crate::poly::{Monomial, Poly};
use crate::symcalc::{increasing_tuples, KForm, VectorField};
use crate::Scalar;

/// Small nonzero rational: integer in `[-3, 3]` or a half.
pub fn coefficient<R: Rng + ?Sized>(rng: &mut R) -> Q {
    loop {
        let num = rng.gen_range(-3i64..=3);
        if num == 0 {
            continue;
        }
        let den = if rng.gen_bool(0.2) { 2 } else { 1 };
        return qr(num, den);
    }
}

/// Random polynomial in `n` variables with degree at most `max_deg` and at
/// most `max_terms` terms (possibly zero).
pub fn poly<R: Rng + ?Sized>(rng: &mut R, n: usize, max_deg: u16, max_terms: usize) -> Scalar {
    let terms = rng.gen_range(0..=max_terms);
    let mut p = Scalar::zero();
    for _ in 0..terms {
        let deg = rng.gen_range(0..=max_deg);
        let mut exps = vec![0u16; n];
        for _ in 0..deg {
            exps[rng.gen_range(0..n)] += 1;
        }
        p += &Poly::monomial(Monomial::from_exponents(&exps), coefficient(rng));
    }
    p
}

pub fn form<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, max_deg: u16) -> KForm {
    let mut w = KForm::zero(n, k);
    for t in increasing_tuples(n, k) {
        if rng.gen_bool(0.6) {
            w.add_component(&t, &poly(rng, n, max_deg, 2));
        }
    }
    w
}

pub fn vector_field<R: Rng + ?Sized>(rng: &mut R, n: usize, max_deg: u16) -> VectorField {
    VectorField::new((0..n).map(|_| poly(rng, n, max_deg, 2)).collect())
}

pub fn column<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, max_deg: u16) -> Vec<Scalar> {
    (0..m).map(|_| poly(rng, n, max_deg, 2)).collect()
}

pub fn poly_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, rows: usize, cols: usize, max_deg: u16) -> Matrix<Scalar> {
    Matrix::from_fn(rows, cols, |_, _| poly(rng, n, max_deg, 2))
}

/// Rational point with small entries.
pub fn point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Q> {
    (0..n).map(|_| qr(rng.gen_range(-4i64..=4), rng.gen_range(1i64..=3))).collect()
}

/// Invertible rational matrix: a product of random elementary operations.
pub fn invertible<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Matrix<Q> {
    let mut s = Matrix::<Q>::identity(m);
    for _ in 0..3 * m {
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(0..m);
        if i == j {
            let c = coefficient(rng);
            for col in 0..m {
                let v = s[(i, col)].clone() * c.clone();
                s[(i, col)] = v;
            }
        } else {
            let c = coefficient(rng);
            for col in 0..m {
                let v = s[(i, col)].clone() + c.clone() * s[(j, col)].clone();
                s[(i, col)] = v;
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::SeedableRng;

    #[test]
    fn generators_are_seeded_and_bounded() {
        let mut a = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut b = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert_eq!(poly(&mut a, 3, 2, 4), poly(&mut b, 3, 2, 4));
        for _ in 0..20 {
            let p = poly(&mut a, 3, 2, 4);
            assert!(p.degree().unwrap_or(0) <= 2);
            assert!(!coefficient(&mut a).is_zero());
            let m = invertible(&mut a, 3);
            assert!(!m.det_field().is_zero());
        }
    }
}
