use courant_core::field::{q, qi, Field, Q, QI};
use courant_core::quadlie::*;
use courant_core::random;
use courant_core::symcalc::KForm;
use courant_core::{Matrix, Scalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NO_CX: [&str; 6] = ["0", "0", "0", "12", "14", "24"];
const EX2: [&str; 6] = ["0", "0", "0", "12", "13", "23"];

fn qm(rows: &[&[i64]]) -> Matrix<Q> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()).unwrap()
}

fn sym(m: usize, entries: &[(usize, usize, i64)]) -> Matrix<Q> {
    let mut g = Matrix::<Q>::zeros(m, m);
    for &(i, j, v) in entries {
        g[(i - 1, j - 1)] = q(v);
        g[(j - 1, i - 1)] = q(v);
    }
    g
}

/// d^2 e^k computed from the raw Salamon entries, extending d by the
/// graded Leibniz rule on the exterior algebra of the dual.
fn d_squared_vanishes(differentials: &[&str]) -> bool {
    let m = differentials.len();
    let de: Vec<KForm> = differentials
        .iter()
        .map(|s| {
            let mut w = KForm::zero(m, 2);
            if *s != "0" {
                for pair in s.split('+') {
                    let b = pair.as_bytes();
                    let (i, j) = ((b[0] - b'1') as usize, (b[1] - b'1') as usize);
                    w.add_component(&[i, j], &Scalar::one());
                }
            }
            w
        })
        .collect();
    (0..m).all(|k| {
        let mut dd = KForm::zero(m, 3);
        for (idx, c) in de[k].terms() {
            let ei = KForm::basis(m, &[idx[0]]);
            let ej = KForm::basis(m, &[idx[1]]);
            let t = &de[idx[0]].wedge(&ej).unwrap() - &ei.wedge(&de[idx[1]]).unwrap();
            dd = &dd + &t.scale(c);
        }
        dd.is_zero()
    })
}

#[test]
fn differentials_examples() {
    let l = LieAlgebra::from_differentials(&NO_CX).unwrap();
    assert!(l.jacobi_check().is_empty());
    assert_eq!(l.bracket::<Q>(&l.basis_vector(0), &l.basis_vector(3)), l.basis_vector::<Q>(4).iter().map(|c| -c.clone()).collect::<Vec<_>>());
    assert!(LieAlgebra::from_differentials(&["0"; 5]).unwrap().is_abelian());
    let l2 = LieAlgebra::from_differentials(&EX2).unwrap();
    assert!(l2.jacobi_check().is_empty());
    assert!(LieAlgebra::from_differentials(&["0", "0", "14"]).is_err());
    assert!(LieAlgebra::from_differentials(&["0", "0", "12", "12+12"]).is_err());
}

#[test]
fn jacobi_examples() {
    assert!(LieAlgebra::abelian(4).jacobi_check().is_empty());
    assert!(d_squared_vanishes(&NO_CX));
    assert!(LieAlgebra::from_differentials(&NO_CX).unwrap().jacobi_check().is_empty());
    assert!(d_squared_vanishes(&EX2));
    // d^2 e^4 = d(e^3 ^ e^4) = e^1 ^ e^2 ^ e^4
    assert!(!d_squared_vanishes(&["0", "0", "12", "34"]));
    assert_eq!(LieAlgebra::from_differentials(&["0", "0", "12", "34"]).unwrap().jacobi_check(), vec![(1, 2, 4)]);

    // c^3_12 = c^4_13 = c^2_14 = 1 still satisfies Jacobi: every double
    // bracket of basis vectors vanishes.
    let consistent = LieAlgebra::from_constants(4, &[(0, 1, 2, q(1)), (0, 2, 3, q(1)), (0, 3, 1, q(1))]).unwrap();
    assert!(consistent.jacobi_check().is_empty());

    // [e1,e2] = e3, [e3,e4] = e1: [[e1,e2],e4] = e1 and [[e3,e4],e2] = e3.
    let broken = LieAlgebra::from_constants(4, &[(0, 1, 2, q(1)), (2, 3, 0, q(1))]).unwrap();
    assert_eq!(broken.jacobi_check(), vec![(1, 2, 4), (2, 3, 4)]);
    assert!(broken.require_jacobi().is_err());
}

#[test]
fn invariant_forms_of_the_nilpotent_example() {
    let l = LieAlgebra::from_differentials(&NO_CX).unwrap();
    let fam = invariant_sym_forms(&l);
    assert_eq!(fam.dimension(), 7);
    let beta0 = sym(6, &[(1, 6, 1), (2, 5, -1), (3, 3, -1), (4, 4, 1)]);
    assert!(fam.contains(&beta0));
    assert_eq!(signature(&beta0).unwrap().triple(), (3, 3, 0));
    assert!(invariance_defects(&l, &beta0).is_empty());
    for b in &fam.basis {
        assert!(invariance_defects(&l, b).is_empty());
    }
    assert!(!fam.contains(&sym(6, &[(4, 4, 1)])));
}

#[test]
fn invariant_forms_abelian() {
    for m in 1..=5 {
        assert_eq!(invariant_sym_forms(&LieAlgebra::abelian(m)).dimension(), m * (m + 1) / 2);
    }
}

#[test]
fn invariant_forms_of_example_two_follow_the_pattern() {
    let l = LieAlgebra::from_differentials(&EX2).unwrap();
    let fam = invariant_sym_forms(&l);
    assert_eq!(fam.dimension(), 7);
    assert_eq!(fam.params, vec!["b11", "b12", "b13", "b22", "b23", "b33", "b34"]);
    let g = fam.general_element();
    let lambda = Scalar::var(fam.param_of(2, 3).unwrap());
    assert_eq!(g[(0, 5)], lambda);
    assert_eq!(g[(2, 3)], lambda);
    assert_eq!(g[(1, 4)], -&lambda);
    let listed = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2), (0, 5), (2, 3), (1, 4)];
    for i in 0..6 {
        for j in i..6 {
            if !listed.contains(&(i, j)) {
                assert!(g[(i, j)].is_zero(), "entry ({}, {}) = {:?}", i + 1, j + 1, g[(i, j)]);
            }
        }
    }
    let rho = sym(6, &[(1, 6, 1), (2, 5, -1), (3, 4, 1)]);
    assert!(fam.contains(&rho));
    assert_eq!(signature(&rho).unwrap().triple(), (3, 3, 0));
}

#[test]
fn isotropy_witness_on_e3_minus_mu_e4() {
    let l = LieAlgebra::from_differentials(&EX2).unwrap();
    let fam = invariant_sym_forms(&l);
    let d = fam.dimension();
    let g = fam.general_element();
    // mu is the extra variable after the seven parameters
    let mu = Scalar::var(d);
    let mut v = vec![Scalar::zero(); 6];
    v[2] = Scalar::one();
    v[3] = -&mu;
    let value = quadratic_value(&g, &v);
    let l34 = Scalar::var(fam.param_of(2, 2).unwrap());
    let lambda = Scalar::var(fam.param_of(2, 3).unwrap());
    assert_eq!(value, &l34 - &(&(&mu * &lambda) * &Scalar::from_i64(2)));

    // mu = s + i t: the imaginary part is -2 t lambda, nonzero when t, lambda != 0
    let s = courant_core::CScalar::var(d);
    let t = courant_core::CScalar::var(d + 1);
    let i = QI::imaginary_unit().unwrap();
    let mu_c = &s + &t.scale(&i);
    let gc = g.map(|p| p.complexify::<QI>());
    let mut vc = vec![courant_core::CScalar::zero(); 6];
    vc[2] = courant_core::CScalar::one();
    vc[3] = -&mu_c;
    let val = quadratic_value(&gc, &vc);
    let imag = val.map_coeffs(|c| QI::from_q(c.imag_part()));
    let lambda_c = lambda.complexify::<QI>();
    assert_eq!(imag, (&t * &lambda_c).scale(&QI::from_i64(-2)));
}

#[test]
fn bracket_sign_does_not_change_invariant_forms() {
    for differentials in [&NO_CX, &EX2] {
        let l = LieAlgebra::from_differentials(differentials).unwrap();
        let flipped_entries: Vec<_> = l.nonzero_constants().into_iter().map(|(i, j, k, c)| (i, j, k, -c)).collect();
        let flipped = LieAlgebra::from_constants(6, &flipped_entries).unwrap();
        assert!(flipped.jacobi_check().is_empty());
        let a = invariant_sym_forms(&l);
        let b = invariant_sym_forms(&flipped);
        assert_eq!(a.dimension(), b.dimension());
        assert!(a.basis.iter().all(|m| b.contains(m)));
    }
}

#[test]
fn signature_examples() {
    assert_eq!(signature(&Matrix::identity(4)).unwrap().triple(), (4, 0, 0));
    let beta0 = sym(6, &[(1, 6, 1), (2, 5, -1), (3, 3, -1), (4, 4, 1)]);
    assert_eq!(signature(&beta0).unwrap().triple(), (3, 3, 0));
    // rho(e_i, e_j) = (-1)^(i-1) for i <= j, i + j = 7
    let rho = sym(6, &[(1, 6, 1), (2, 5, -1), (3, 4, 1)]);
    assert_eq!(signature(&rho).unwrap().triple(), (3, 3, 0));
    assert!(signature(&qm(&[&[0, 1], &[0, 0]])).is_err());
}

fn ex2_complex_structure() -> Matrix<Q> {
    let one = || qi(q(1), q(0));
    let i = || qi(q(0), q(1));
    let z = || qi(q(0), q(0));
    let forms = vec![
        vec![one(), i(), z(), z(), z(), z()],
        vec![z(), z(), one(), i(), z(), z()],
        vec![z(), z(), z(), z(), one(), i()],
    ];
    complex_structure_from_forms(&forms).unwrap()
}

#[test]
fn complex_structure_of_example_two() {
    let j = ex2_complex_structure();
    let mut expected = Matrix::<Q>::zeros(6, 6);
    for a in [0, 2, 4] {
        expected[(a + 1, a)] = q(1);
        expected[(a, a + 1)] = q(-1);
    }
    assert_eq!(j, expected);
    let l = LieAlgebra::from_differentials(&EX2).unwrap();
    let rho = sym(6, &[(1, 6, 1), (2, 5, -1), (3, 4, 1)]);
    let report = complex_structure_check(&l, &rho, &j);
    assert!(report.square);
    assert!(report.integrable);
    assert!(!report.skew);
    assert!(report.skew_defects.contains(&(3, 3)));
    assert!(holomorphic_closure(&l, &j));

    let neg = -&j;
    let r2 = complex_structure_check(&l, &rho, &neg);
    assert_eq!((r2.square, r2.skew, r2.integrable), (report.square, report.skew, report.integrable));
    assert_eq!(holomorphic_closure(&l, &neg), r2.integrable);
}

#[test]
fn abelian_pseudo_hermitian_structure() {
    let l = LieAlgebra::abelian(4);
    let j = qm(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
    let g = sym(4, &[(1, 1, 1), (2, 2, 1), (3, 3, -1), (4, 4, -1)]);
    assert!(complex_structure_check(&l, &g, &j).all_pass());
}

#[test]
fn non_integrable_structure_is_detected_by_both_methods() {
    // Je1 = e4 on the algebra [e1,e2] = -e4 ... pick a J mixing center and derived part
    let l = LieAlgebra::from_differentials(&["0", "0", "0", "12"]).unwrap();
    let j = qm(&[&[0, 0, -1, 0], &[0, 0, 0, -1], &[1, 0, 0, 0], &[0, 1, 0, 0]]);
    let report = complex_structure_check(&l, &Matrix::identity(4), &j);
    assert!(report.square);
    assert!(!report.integrable);
    assert!(!holomorphic_closure(&l, &j));
}

fn su2_plus_r() -> LieAlgebra {
    // [e1,e2] = e3, [e2,e3] = e1, [e3,e1] = e2, e4 central
    LieAlgebra::from_constants(4, &[(0, 1, 2, q(1)), (1, 2, 0, q(1)), (2, 0, 1, q(1))]).unwrap()
}

#[test]
fn unitary_algebra_structure() {
    let l = su2_plus_r();
    assert!(l.jacobi_check().is_empty());
    let g = Matrix::<Q>::identity(4);
    assert!(invariance_defects(&l, &g).is_empty());
    let a = qm(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
    assert!(complex_structure_check(&l, &g, &a).all_pass());
    assert!(holomorphic_closure(&l, &a));
}

#[test]
fn double_examples() {
    let ab = build_double(&LieAlgebra::abelian(3)).unwrap();
    assert!(ab.algebra.is_abelian());
    assert_eq!(signature(&ab.metric).unwrap().triple(), (3, 3, 0));

    let l = LieAlgebra::from_constants(2, &[(0, 1, 1, q(1))]).unwrap();
    let d = build_double(&l).unwrap();
    assert_eq!(d.dim(), 4);
    assert!(d.algebra.jacobi_check().is_empty());
    assert!(invariance_defects(&d.algebra, &d.metric).is_empty());
    assert_eq!(signature(&d.metric).unwrap().triple(), (2, 2, 0));

    // direct expansion of [X+xi, Y+eta] = [X,Y] - eta o ad_X + xi o ad_Y
    let mut r = ChaCha8Rng::seed_from_u64(7);
    for differentials in [&NO_CX[..], &EX2[..]] {
        let l = LieAlgebra::from_differentials(differentials).unwrap();
        let m = l.dim();
        let d = build_double(&l).unwrap();
        for _ in 0..5 {
            let u: Vec<Q> = (0..2 * m).map(|_| random::coefficient(&mut r)).collect();
            let v: Vec<Q> = (0..2 * m).map(|_| random::coefficient(&mut r)).collect();
            let (x, xi) = u.split_at(m);
            let (y, eta) = v.split_at(m);
            let mut expected = l.bracket(x, y);
            let adx = l.ad(x);
            let ady = l.ad(y);
            let eta_adx = adx.transpose().apply(eta);
            let xi_ady = ady.transpose().apply(xi);
            expected.extend(eta_adx.iter().zip(&xi_ady).map(|(a, b)| b.clone() - a.clone()));
            assert_eq!(d.algebra.bracket(&u, &v), expected);
        }
    }
    assert!(build_double(&LieAlgebra::from_constants(4, &[(0, 1, 2, q(1)), (2, 3, 0, q(1))]).unwrap()).is_err());
}

fn cv(entries: &[(i64, i64)]) -> Vec<QI> {
    entries.iter().map(|&(a, b)| qi(q(a), q(b))).collect()
}

#[test]
fn admissible_pair_examples() {
    let ab = LieAlgebra::abelian(2);
    let k = vec![cv(&[(1, 0), (0, 1)])];
    let rep = admissible_pair_check(&ab, &k, &Matrix::zeros(1, 1)).unwrap();
    assert_eq!(rep.real_part_dim, 0);
    assert!(rep.pass());

    let k = vec![cv(&[(1, 0), (0, 0)])];
    let rep = admissible_pair_check(&ab, &k, &Matrix::zeros(1, 1)).unwrap();
    assert!(!rep.spans);
    assert_eq!(rep.rank_deficit, 1);
    assert!(!rep.pass());
}

#[test]
fn admissible_pairs_on_the_unitary_algebra() {
    let l = su2_plus_r();
    let root = cv(&[(1, 0), (0, -1), (0, 0), (0, 0)]);
    // root vector for ad_{e3} with eigenvalue i
    let ad3 = l.ad(&l.basis_vector::<QI>(2));
    assert_eq!(ad3.apply(&root), root.iter().map(|c| c.clone() * qi(q(0), q(1))).collect::<Vec<_>>());

    let h0 = cv(&[(0, 0), (0, 0), (1, 0), (0, 1)]);
    let rep = admissible_pair_check(&l, &[root.clone(), h0], &Matrix::zeros(2, 2)).unwrap();
    assert!(rep.subalgebra && rep.spans && rep.closed);
    assert_eq!(rep.real_part_dim, 0);
    assert!(rep.pass());

    let e3 = cv(&[(0, 0), (0, 0), (1, 0), (0, 0)]);
    let rep = admissible_pair_check(&l, &[root.clone(), e3.clone()], &Matrix::zeros(2, 2)).unwrap();
    assert!(rep.subalgebra);
    assert_eq!(rep.rank_deficit, 1);
    assert!(!rep.pass());

    // full Cartan part: k cap g = span{e3, e4} needs Im(omega) non-degenerate there
    let e4 = cv(&[(0, 0), (0, 0), (0, 0), (1, 0)]);
    let k = vec![root.clone(), e3.clone(), e4.clone()];
    let mut omega = Matrix::<QI>::zeros(3, 3);
    omega[(1, 2)] = qi(q(0), q(1));
    omega[(2, 1)] = qi(q(0), q(-1));
    let rep = admissible_pair_check(&l, &k, &omega).unwrap();
    assert_eq!(rep.real_part_dim, 2);
    assert!(rep.closed && rep.nondegenerate && rep.pass());
    let rep = admissible_pair_check(&l, &k, &Matrix::zeros(3, 3)).unwrap();
    assert!(!rep.nondegenerate);

    // not a subalgebra: [e1 - i e2, e1 + i e2] = 2i e3
    let anti = cv(&[(1, 0), (0, 1), (0, 0), (0, 0)]);
    let rep = admissible_pair_check(&l, &[root, anti], &Matrix::zeros(2, 2)).unwrap();
    assert_eq!(rep.bracket_witness, Some((1, 2)));
}

#[test]
fn automorphism_examples() {
    let l = LieAlgebra::abelian(4);
    let g = Matrix::<Q>::identity(4);
    let j = qm(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
    assert!(automorphism_check(&l, &g, &j, &Matrix::identity(4)).pass());
    let neg = Matrix::<Q>::identity(4).scale(&q(-1));
    let g2 = sym(4, &[(1, 1, 1), (2, 2, 1), (3, 3, -1), (4, 4, -1)]);
    assert!(automorphism_check(&l, &g2, &j, &neg).pass());
    let mut dil = Matrix::<Q>::identity(4);
    dil[(0, 0)] = q(2);
    let rep = automorphism_check(&l, &g, &j, &dil);
    assert!(!rep.isometry);

    let u2 = su2_plus_r();
    let a = qm(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
    // rotation about e3 by the Cayley angle: cos = 3/5, sin = 4/5
    let c = courant_core::field::qr(3, 5);
    let s = courant_core::field::qr(4, 5);
    let mut rot = Matrix::<Q>::identity(4);
    rot[(0, 0)] = c.clone();
    rot[(0, 1)] = -s.clone();
    rot[(1, 0)] = s;
    rot[(1, 1)] = c;
    assert!(automorphism_check(&u2, &g, &a, &rot).pass());
}

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 32, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn signature_is_congruence_invariant(seed in any::<u64>(), which in 0usize..3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = match which {
            0 => sym(6, &[(1, 6, 1), (2, 5, -1), (3, 3, -1), (4, 4, 1)]),
            1 => sym(4, &[(1, 2, 1), (3, 3, 2)]),
            _ => {
                let a = Matrix::from_fn(5, 5, |_, _| random::coefficient(&mut r));
                &a + &a.transpose()
            }
        };
        let s = random::invertible(&mut r, g.rows());
        let moved = &(&s.transpose() * &g) * &s;
        prop_assert_eq!(signature(&moved).unwrap(), signature(&g).unwrap());
    }

    #[test]
    fn nijenhuis_agrees_with_eigenspace_closure(seed in any::<u64>(), which in 0usize..3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (l, j0) = match which {
            0 => (LieAlgebra::from_differentials(&EX2).unwrap(), ex2_complex_structure()),
            1 => (su2_plus_r(), qm(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]])),
            _ => (LieAlgebra::from_differentials(&["0", "0", "0", "12"]).unwrap(),
                  qm(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]])),
        };
        let m = l.dim();
        let s = random::invertible(&mut r, m);
        let j = &(&s * &j0) * &s.inverse().unwrap();
        let rep = complex_structure_check(&l, &Matrix::identity(m), &j);
        prop_assert!(rep.square);
        prop_assert_eq!(rep.integrable, holomorphic_closure(&l, &j));
    }

    #[test]
    fn invariant_forms_resolve_consistently(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let l = LieAlgebra::from_differentials(&NO_CX).unwrap();
        let fam = invariant_sym_forms(&l);
        let mut g = Matrix::<Q>::zeros(6, 6);
        for b in &fam.basis {
            g = &g + &b.scale(&random::coefficient(&mut r));
        }
        prop_assert!(invariance_defects(&l, &g).is_empty());
        prop_assert!(fam.contains(&g));
        prop_assert_eq!(invariant_sym_forms(&l).dimension(), 7);
    }
}
