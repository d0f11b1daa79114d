use courant_core::field::{q, Q};
use courant_core::random;
use courant_core::symcalc::*;
use courant_core::{Matrix, Scalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p(s: &str, n: usize) -> Scalar {
    Chart::standard(n).unwrap().parse(s).unwrap()
}

fn coord(n: usize, i: usize) -> VectorField {
    VectorField::coordinate(n, i)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn wedge_of_coordinate_one_forms() {
    let dx = KForm::<Q>::basis(2, &[0]);
    let dy = KForm::<Q>::basis(2, &[1]);
    let w = dx.wedge(&dy).unwrap();
    assert_eq!(w.eval_on(&[coord(2, 0), coord(2, 1)]).unwrap(), Scalar::from_i64(1));
    assert_eq!(w.eval_on(&[coord(2, 1), coord(2, 0)]).unwrap(), Scalar::from_i64(-1));
}

#[test]
fn wedge_square_of_one_form_vanishes() {
    let mut r = rng(1);
    for _ in 0..10 {
        let a = random::form(&mut r, 3, 1, 2);
        assert!(a.wedge(&a).unwrap().is_zero());
    }
}

/// `2 * sum over cyclic (X,Y,Z) of w(X,Y) w(Z,V)`, expanded by hand.
fn two_cyclic(w: &KForm, x: &VectorField, y: &VectorField, z: &VectorField, v: &VectorField) -> Scalar {
    let e = |a: &VectorField, b: &VectorField| w.eval_on(&[a.clone(), b.clone()]).unwrap();
    let s = &(&(&e(x, y) * &e(z, v)) + &(&e(y, z) * &e(x, v))) + &(&e(z, x) * &e(y, v));
    &s + &s
}

#[test]
fn symplectic_square_on_coordinate_frame() {
    let w = KForm::<Q>::from_terms(4, 2, vec![(vec![0, 1], Scalar::one()), (vec![2, 3], Scalar::one())]).unwrap();
    let ww = w.wedge(&w).unwrap();
    let frame: Vec<_> = (0..4).map(|i| coord(4, i)).collect();
    let value = ww.eval_on(&frame).unwrap();
    assert_eq!(value, two_cyclic(&w, &frame[0], &frame[1], &frame[2], &frame[3]));
    assert_eq!(value, Scalar::from_i64(2));
}

#[test]
fn displayed_wedge_identities_hold_on_random_forms() {
    let mut r = rng(2);
    for _ in 0..5 {
        let a = random::form(&mut r, 4, 1, 1);
        let b = random::form(&mut r, 4, 1, 1);
        let w = random::form(&mut r, 4, 2, 1);
        let xs: Vec<_> = (0..4).map(|_| random::vector_field(&mut r, 4, 1)).collect();
        let ev1 = |f: &KForm, x: &VectorField| f.eval_on(&[x.clone()]).unwrap();
        let ev2 = |x: &VectorField, y: &VectorField| w.eval_on(&[x.clone(), y.clone()]).unwrap();
        let ab = a.wedge(&b).unwrap().eval_on(&xs[..2]).unwrap();
        assert_eq!(ab, &(&ev1(&a, &xs[0]) * &ev1(&b, &xs[1])) - &(&ev1(&a, &xs[1]) * &ev1(&b, &xs[0])));
        let aw = a.wedge(&w).unwrap().eval_on(&xs[..3]).unwrap();
        let cyc = &(&(&ev1(&a, &xs[0]) * &ev2(&xs[1], &xs[2])) + &(&ev1(&a, &xs[1]) * &ev2(&xs[2], &xs[0])))
            + &(&ev1(&a, &xs[2]) * &ev2(&xs[0], &xs[1]));
        assert_eq!(aw, cyc);
        let ww = w.wedge(&w).unwrap().eval_on(&xs).unwrap();
        assert_eq!(ww, two_cyclic(&w, &xs[0], &xs[1], &xs[2], &xs[3]));
    }
}

#[test]
fn wedge_errors() {
    let a = KForm::<Q>::basis(2, &[0, 1]);
    assert!(a.wedge(&KForm::basis(2, &[0])).is_err());
    assert!(a.wedge(&KForm::basis(3, &[0])).is_err());
}

#[test]
fn exterior_derivative_examples() {
    let w = KForm::from_terms(2, 1, vec![(vec![1], p("x1", 2))]).unwrap();
    assert_eq!(w.d().unwrap(), KForm::basis(2, &[0, 1]));
    assert!(KForm::<Q>::basis(2, &[0]).d().unwrap().is_zero());
    let w = KForm::from_terms(3, 1, vec![(vec![2], p("x1*x2", 3))]).unwrap();
    let expected =
        KForm::from_terms(3, 2, vec![(vec![0, 2], p("x2", 3)), (vec![1, 2], p("x1", 3))]).unwrap();
    assert_eq!(w.d().unwrap(), expected);
    assert!(KForm::<Q>::basis(2, &[0, 1]).d().is_err());
}

#[test]
fn interior_examples() {
    let w = KForm::<Q>::basis(2, &[0, 1]);
    assert_eq!(w.interior(&coord(2, 0)).unwrap(), KForm::basis(2, &[1]));
    let x = VectorField::new(vec![p("x2", 2), Scalar::zero()]);
    assert_eq!(w.interior(&x).unwrap(), KForm::from_terms(2, 1, vec![(vec![1], p("x2", 2))]).unwrap());
    assert!(KForm::<Q>::function(2, p("x1", 2)).interior(&x).is_err());
    let mut r = rng(3);
    for _ in 0..5 {
        let w = random::form(&mut r, 4, 3, 2);
        let x = random::vector_field(&mut r, 4, 2);
        assert!(w.interior(&x).unwrap().interior(&x).unwrap().is_zero());
    }
}

#[test]
fn lie_derivative_examples() {
    let w = KForm::from_terms(2, 1, vec![(vec![1], p("x1", 2))]).unwrap();
    assert_eq!(w.lie_derivative(&coord(2, 0)).unwrap(), KForm::basis(2, &[1]));
    let y = VectorField::new(vec![Scalar::zero(), p("x1", 2)]);
    assert_eq!(coord(2, 0).lie_derivative(&y).unwrap(), coord(2, 1));
}

#[test]
fn endomorphism_lie_derivative_leibniz() {
    let mut r = rng(4);
    let n = 3;
    for _ in 0..5 {
        let x = random::vector_field(&mut r, n, 2);
        let y = random::vector_field(&mut r, n, 2);
        let c = EndoField::new(Space::Tangent, Space::Cotangent, random::poly_matrix(&mut r, n, n, n, 2));
        let lc = c.lie_derivative(&x).unwrap();
        let lhs = KForm::one_form(lc.apply(y.components()));
        let cy = KForm::one_form(c.apply(y.components()));
        let rhs = &cy.lie_derivative(&x).unwrap() - &KForm::one_form(c.apply(x.bracket(&y).unwrap().components()));
        assert_eq!(lhs, rhs);

        let j = EndoField::new(Space::Tangent, Space::Tangent, random::poly_matrix(&mut r, n, n, n, 2));
        let lj = j.lie_derivative(&x).unwrap();
        let jy = VectorField::new(j.apply(y.components()));
        let rhs = &x.bracket(&jy).unwrap() - &VectorField::new(j.apply(x.bracket(&y).unwrap().components()));
        assert_eq!(VectorField::new(lj.apply(y.components())), rhs);

        let b = EndoField::new(Space::Cotangent, Space::Tangent, random::poly_matrix(&mut r, n, n, n, 2));
        let xi = random::form(&mut r, n, 1, 2);
        let lb = b.lie_derivative(&x).unwrap();
        let bxi = VectorField::new(b.apply(xi.coefficients()));
        let lxi = xi.lie_derivative(&x).unwrap();
        let rhs = &x.bracket(&bxi).unwrap() - &VectorField::new(b.apply(lxi.coefficients()));
        assert_eq!(VectorField::new(lb.apply(xi.coefficients())), rhs);
    }
}

#[test]
fn schouten_examples() {
    let b = Matrix::<Scalar>::from_fn(3, 3, |i, j| {
        Scalar::from_i64(match (i, j) {
            (0, 1) => 2,
            (1, 0) => -2,
            (1, 2) => 5,
            (2, 1) => -5,
            _ => 0,
        })
    });
    assert!(schouten_pb(&b).unwrap().is_zero());
    let mut r = rng(5);
    let f = random::poly(&mut r, 2, 3, 3);
    let b2 = Matrix::from_rows(vec![vec![Scalar::zero(), f.clone()], vec![-&f, Scalar::zero()]]).unwrap();
    assert!(schouten_pb(&b2).unwrap().is_zero());

    // B^{12} = x2, B^{23} = x1. Hand expansion of the cyclic sum for (1,2,3):
    // B^{l1} d_l B^{23} + B^{l2} d_l B^{31} + B^{l3} d_l B^{12}
    //   = B^{11} * 1 + 0 + B^{23} * 1 = x1.
    let x1 = p("x1", 3);
    let x2 = p("x2", 3);
    let z = Scalar::zero();
    let b3 = Matrix::from_rows(vec![
        vec![z.clone(), x2.clone(), z.clone()],
        vec![-&x2, z.clone(), x1.clone()],
        vec![z.clone(), -&x1, z.clone()],
    ])
    .unwrap();
    let t = schouten_pb(&b3).unwrap();
    assert_eq!(t.component(0, 1, 2), x1);
    assert_eq!(t.component(2, 1, 0), -&x1);
    assert!(schouten_pb(&Matrix::<Scalar>::identity(3)).is_err());
}

#[test]
fn pairing_wedge_examples() {
    let n = 2;
    let hyperbolic = Matrix::from_rows(vec![vec![q(0), q(1)], vec![q(1), q(0)]]).unwrap();
    let r = FiberValuedForm::section(n, &[p("x1", n), p("x2", n)]);
    let s = FiberValuedForm::section(n, &[p("3", n), p("x1", n)]);
    assert_eq!(pairing_wedge(&r, &s, &hyperbolic).unwrap().as_function(), p("x1^2 + 3*x2", n));

    // Phi = dx1 (x) e + dx2 (x) f with <e,f> = 1, <e,e> = <f,f> = 0.
    let phi = FiberValuedForm::from_matrix(
        &Matrix::from_rows(vec![vec![Scalar::one(), Scalar::zero()], vec![Scalar::zero(), Scalar::one()]]).unwrap(),
    );
    // g_ef dx1^dx2 + g_fe dx2^dx1 cancels: odd forms pair to zero with themselves.
    assert!(pairing_wedge(&phi, &phi, &hyperbolic).unwrap().is_zero());
    let e_part = FiberValuedForm::from_parts(2, 1, vec![KForm::basis(2, &[0]), KForm::zero(2, 1)]).unwrap();
    let f_part = FiberValuedForm::from_parts(2, 1, vec![KForm::zero(2, 1), KForm::basis(2, &[1])]).unwrap();
    assert_eq!(pairing_wedge(&e_part, &f_part, &hyperbolic).unwrap(), KForm::basis(2, &[0, 1]));
    assert_eq!(pairing_wedge(&e_part, &phi, &hyperbolic).unwrap(), KForm::basis(2, &[0, 1]));

    // Decomposable R = w (x) e with e isotropic.
    let w = KForm::<Q>::basis(4, &[0, 1]);
    let rr = FiberValuedForm::from_parts(4, 2, vec![w.clone(), KForm::zero(4, 2)]).unwrap();
    assert!(pairing_wedge(&rr, &rr, &hyperbolic).unwrap().is_zero());

    let wrong = FiberValuedForm::section(n, &[p("1", n)]);
    assert!(pairing_wedge(&r, &wrong, &hyperbolic).is_err());
}

#[test]
fn evaluation_examples() {
    assert_eq!(p("x1*x2", 2).eval(&[q(2), q(3)]).unwrap(), q(6));
    let id = EndoField::<Q>::identity(Space::Tangent, 3);
    assert_eq!(id.eval_at(&[q(5), q(-1), q(7)]).unwrap(), Matrix::identity(3));
    assert!(p("x1*x2", 2).eval(&[q(1)]).is_err());
}

#[test]
fn rank_examples() {
    let id = rank_and_nullspace(&Matrix::<Q>::identity(3));
    assert_eq!(id.rank, 3);
    assert!(id.nullspace.is_empty());
    assert_eq!(rank_and_nullspace(&Matrix::<Q>::zeros(3, 2)).rank, 0);
    let m = Matrix::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]).unwrap();
    let info = rank_and_nullspace(&m);
    assert_eq!(info.rank, 1);
    assert_eq!(info.nullspace.len(), 1);
    let v = &info.nullspace[0];
    assert_eq!(v[0].clone() * q(-1), v[1].clone() * q(2));
    assert_eq!(m.apply(v), vec![q(0), q(0)]);
}

#[test]
fn chart_validation() {
    assert!(Chart::standard(9).is_err());
    assert!(Chart::new(vec!["x".into(), "x".into()]).is_err());
    assert!(Chart::new(vec![]).is_err());
    assert_eq!(Chart::new(vec!["u".into(), "v".into()]).unwrap().dim(), 2);
}

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), n in 2usize..=4, k in 0usize..3) {
        prop_assume!(k + 2 <= n);
        let mut r = rng(seed);
        let w = random::form(&mut r, n, k, 3);
        prop_assert!(w.d().unwrap().d().unwrap().is_zero());
    }

    #[test]
    fn graded_commutativity(seed in any::<u64>(), p_deg in 0usize..3, q_deg in 0usize..3) {
        let n = 4;
        let mut r = rng(seed);
        let a = random::form(&mut r, n, p_deg, 2);
        let b = random::form(&mut r, n, q_deg, 2);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        if (p_deg * q_deg) % 2 == 0 {
            prop_assert_eq!(ab, ba);
        } else {
            prop_assert_eq!(ab, -ba);
        }
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>(), p_deg in 0usize..2, q_deg in 0usize..2) {
        let n = 4;
        let mut r = rng(seed);
        let a = random::form(&mut r, n, p_deg, 2);
        let b = random::form(&mut r, n, q_deg, 2);
        let lhs = a.wedge(&b).unwrap().d().unwrap();
        let t1 = a.d().unwrap().wedge(&b).unwrap();
        let t2 = a.wedge(&b.d().unwrap()).unwrap();
        let rhs = if p_deg % 2 == 0 { &t1 + &t2 } else { &t1 - &t2 };
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn interior_is_antiderivation(seed in any::<u64>(), p_deg in 1usize..3, q_deg in 1usize..3) {
        let n = 4;
        let mut r = rng(seed);
        let a = random::form(&mut r, n, p_deg, 2);
        let b = random::form(&mut r, n, q_deg, 2);
        let x = random::vector_field(&mut r, n, 2);
        let lhs = a.wedge(&b).unwrap().interior(&x).unwrap();
        let t1 = a.interior(&x).unwrap().wedge(&b).unwrap();
        let t2 = a.wedge(&b.interior(&x).unwrap()).unwrap();
        let rhs = if p_deg % 2 == 0 { &t1 + &t2 } else { &t1 - &t2 };
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cartan_formula(seed in any::<u64>(), k in 1usize..3) {
        let n = 3;
        let mut r = rng(seed);
        let w = random::form(&mut r, n, k, 2);
        let x = random::vector_field(&mut r, n, 2);
        let cartan = &w.d().unwrap().interior(&x).unwrap() + &w.interior(&x).unwrap().d().unwrap();
        prop_assert_eq!(w.lie_derivative(&x).unwrap(), cartan);
    }

    #[test]
    fn lie_derivative_commutes_with_d(seed in any::<u64>(), k in 0usize..3) {
        let n = 3;
        let mut r = rng(seed);
        let w = random::form(&mut r, n, k, 2);
        let x = random::vector_field(&mut r, n, 2);
        prop_assert_eq!(
            w.lie_derivative(&x).unwrap().d().unwrap(),
            w.d().unwrap().lie_derivative(&x).unwrap()
        );
    }

    #[test]
    fn lie_derivative_of_bracket(seed in any::<u64>(), k in 0usize..4) {
        let n = 3;
        let mut r = rng(seed);
        let w = random::form(&mut r, n, k, 2);
        let x = random::vector_field(&mut r, n, 1);
        let y = random::vector_field(&mut r, n, 1);
        let lhs = w.lie_derivative(&x.bracket(&y).unwrap()).unwrap();
        let xy = w.lie_derivative(&y).unwrap().lie_derivative(&x).unwrap();
        let yx = w.lie_derivative(&x).unwrap().lie_derivative(&y).unwrap();
        prop_assert_eq!(lhs, &xy - &yx);
    }

    #[test]
    fn schouten_is_antisymmetric(seed in any::<u64>()) {
        let n = 4;
        let mut r = rng(seed);
        let m = random::poly_matrix(&mut r, n, n, n, 2);
        let b = &m - &m.transpose();
        let t = schouten_pb(&b).unwrap();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let raw = schouten_component(&b, i, j, k);
                    prop_assert_eq!(&raw, &t.component(i, j, k));
                    prop_assert_eq!(&raw, &-schouten_component(&b, j, i, k));
                }
            }
        }
    }
}
