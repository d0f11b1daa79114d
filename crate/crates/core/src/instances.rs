//! Ready-made structures: the `u(2)` fiber, canonical symplectic-type
//! structures and randomized twists of them.

use rand::Rng;

use crate::courant::CourantData;
use crate::error::Result;
use crate::field::{q, qr, Q};
use crate::gacs::GacsComponents;
use crate::matrix::Matrix;
use crate::quadlie::{LieAlgebra, QuadLieAlgebra};
use crate::random;
use crate::symcalc::{constant_matrix, increasing_tuples, Chart, FiberValuedForm, KForm};
use crate::transport::{invert_iso, transform_data, transform_gacs, IsoData};
use crate::{PolyMatrix, Scalar};

/// `u(2) = su(2) ⊕ ℝ` with `[e1,e2]=e3` cyclically, `e4` central, metric `Id`.
pub fn u2() -> QuadLieAlgebra {
    let l = LieAlgebra::from_constants(4, &[(0, 1, 2, q(1)), (1, 2, 0, q(1)), (2, 0, 1, q(1))]).expect("valid constants");
    QuadLieAlgebra::new(l, Matrix::identity(4)).expect("invariant metric")
}

/// Skew complex structure on `u(2)`: `e1 ↦ e2`, `e3 ↦ e4`.
pub fn u2_complex_structure() -> Matrix<Q> {
    let mut a = Matrix::zeros(4, 4);
    a[(1, 0)] = q(1);
    a[(0, 1)] = q(-1);
    a[(3, 2)] = q(1);
    a[(2, 3)] = q(-1);
    a
}

/// `dx¹²+dx³⁴+… + h·dx¹³` (the `h` term only when `n ≥ 4`).
pub fn darboux_form(n: usize, h: &Scalar) -> KForm {
    let mut w = KForm::zero(n, 2);
    for k in (0..n - 1).step_by(2) {
        w.add_component(&[k, k + 1], &Scalar::one());
    }
    if n >= 4 {
        w.add_component(&[0, 2], h);
    }
    w
}

/// `𝒥_ω ⊕ A` on the untwisted algebroid over the standard `n`-chart.
pub fn canonical_symplectic(n: usize, h: &Scalar) -> Result<(CourantData, GacsComponents)> {
    let d = CourantData::untwisted(Chart::standard(n)?, u2());
    let c = GacsComponents::symplectic(&darboux_form(n, h), constant_matrix(&u2_complex_structure()))?;
    Ok((d, c))
}

/// Rotation about `e_{axis+1}` (`axis < 3`) with rational Cayley parameter `t`;
/// an automorphism of `u(2)`.
pub fn cayley_rotation(axis: usize, t: &Q) -> Matrix<Q> {
    let one = q(1);
    let den = one.clone() + t * t;
    let c = (one - t * t) / den.clone();
    let s = (q(2) * t) / den;
    let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
    let mut k = Matrix::identity(4);
    k[(i, i)] = c.clone();
    k[(j, j)] = c;
    k[(j, i)] = s.clone();
    k[(i, j)] = -s;
    k
}

/// Random isomorphism datum: constant `K` a Cayley rotation about a random axis, `Φ` constant
/// plus one linear entry, `β` of degree at most 2.
pub fn random_iso<R: Rng + ?Sized>(rng: &mut R, n: usize) -> IsoData {
    let t = qr(rng.gen_range(-3i64..=3), rng.gen_range(1i64..=3));
    let k = constant_matrix(&cayley_rotation(rng.gen_range(0..3), &t));
    let mut phi = random::poly_matrix(rng, n, 4, n, 0);
    let (i, a, v) = (rng.gen_range(0..4), rng.gen_range(0..n), rng.gen_range(0..n));
    phi[(i, a)] += &(&Scalar::var(v) * &Scalar::constant(random::coefficient(rng)));
    let phi = FiberValuedForm::from_matrix(&phi);
    let mut beta = KForm::zero(n, 2);
    for tup in increasing_tuples(n, 2) {
        if rng.gen_bool(0.5) {
            beta.add_component(&tup, &random::poly(rng, n, 2, 2));
        }
    }
    IsoData::new(k, phi, beta).expect("shapes match")
}

/// `(D₁, I⁻¹𝒥I)` where `D₁` is sent onto `d` by `iso`.
pub fn twist(d: &CourantData, c: &GacsComponents, iso: &IsoData) -> Result<(CourantData, GacsComponents)> {
    let d1 = transform_data(d, &invert_iso(iso)?)?;
    let c1 = transform_gacs(c, iso, d)?;
    Ok((d1, c1))
}

/// How a generated instance was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Defect {
    /// Twisted canonical structure; integrable.
    None,
    /// `dω ≠ 0` before twisting (needs `n ≥ 4`).
    NonClosedOmega,
    /// Canonical components placed on twisted data, so `A` is not parallel.
    NonParallelA,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub data: CourantData,
    pub components: GacsComponents,
    pub defect: Defect,
}

impl Instance {
    pub fn integrable(&self) -> bool {
        self.defect == Defect::None
    }
}

/// Randomized instance over the standard `n`-chart (`n` even) with the `u(2)` fiber.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, defect: Defect) -> Result<Instance> {
    let h = if n >= 4 {
        match defect {
            Defect::NonClosedOmega => &Scalar::var(1) * &Scalar::constant(random::coefficient(rng)),
            _ => {
                let a = Scalar::constant(random::coefficient(rng));
                &(&Scalar::var(0) * &a) + &Scalar::var(2)
            }
        }
    } else {
        Scalar::zero()
    };
    let (d, c) = canonical_symplectic(n, &h)?;
    let iso = random_iso(rng, n);
    let (d1, c1) = twist(&d, &c, &iso)?;
    let components = if defect == Defect::NonParallelA { c } else { c1 };
    Ok(Instance { data: d1, components, defect })
}

/// Alternating integrable and broken instances over 2- and 4-charts.
pub fn tri_oracle_batch<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Result<Vec<Instance>> {
    (0..count)
        .map(|i| {
            let n = if i % 4 < 2 { 2 } else { 4 };
            let defect = match (i % 2, n, (i / 4) % 2) {
                (0, _, _) => Defect::None,
                (_, 2, _) => Defect::NonParallelA,
                (_, _, 0) => Defect::NonClosedOmega,
                _ => Defect::NonParallelA,
            };
            random_instance(rng, n, defect)
        })
        .collect()
}

/// Standard complex structure `∂_{2k} ↦ ∂_{2k+1}` (0-based) on an even chart.
pub fn standard_j(n: usize) -> Matrix<Q> {
    let mut j = Matrix::zeros(n, n);
    for k in (0..n - 1).step_by(2) {
        j[(k + 1, k)] = q(1);
        j[(k, k + 1)] = q(-1);
    }
    j
}

/// `𝒥_J ⊕ A` with the standard `J` on the untwisted algebroid with `u(2)` fiber.
pub fn complex_type(n: usize) -> Result<(CourantData, GacsComponents)> {
    let d = CourantData::untwisted(Chart::standard(n)?, u2());
    let c = GacsComponents::complex(constant_matrix(&standard_j(n)), constant_matrix(&u2_complex_structure()))?;
    Ok((d, c))
}

/// Holomorphic Poisson structure `β = z¹z²∂_{z¹}∧∂_{z²}` on `ℂ²` in real coordinates
/// `z¹ = x1 + i x2`, `z² = x3 + i x4`: `J` standard, `B = β + β̄`, `C = μ = ν = 0`,
/// constant `A` on the abelian rank-2 fiber with metric `Id`.
pub fn hopf_chart() -> Result<(CourantData, GacsComponents)> {
    let n = 4;
    let x = Scalar::var;
    let half = Scalar::constant(qr(1, 2));
    let a = &(&x(0) * &x(2)) - &(&x(1) * &x(3));
    let b = &(&x(0) * &x(3)) + &(&x(1) * &x(2));
    let (ha, hb) = (&a * &half, &b * &half);
    let mut bm: PolyMatrix = Matrix::zeros(n, n);
    let mut set = |i: usize, j: usize, v: &Scalar| {
        bm[(i, j)] = v.clone();
        bm[(j, i)] = -v;
    };
    set(0, 2, &ha);
    set(1, 3, &-&ha);
    set(0, 3, &hb);
    set(1, 2, &hb);
    let fiber = QuadLieAlgebra::new(LieAlgebra::abelian(2), Matrix::identity(2))?;
    let d = CourantData::untwisted(Chart::standard(n)?, fiber);
    let mut am = Matrix::zeros(2, 2);
    am[(1, 0)] = q(1);
    am[(0, 1)] = q(-1);
    let c = GacsComponents::new(
        constant_matrix(&standard_j(n)),
        constant_matrix(&am),
        bm,
        Matrix::zeros(n, n),
        Matrix::zeros(2, n),
        Matrix::zeros(2, n),
    )?;
    Ok((d, c))
}

/// A structure with `B = 0` and `ν` of rank 2: a complex-type structure with
/// `T` and `T*` exchanged, transported by a null `Φ`, exchanged back. Lives on a
/// 2-chart with abelian fiber of signature `(2,2)`.
pub fn mixed_type() -> Result<(CourantData, GacsComponents)> {
    let n = 2;
    let mut g = Matrix::<Q>::identity(4);
    g[(2, 2)] = q(-1);
    g[(3, 3)] = q(-1);
    let fiber = QuadLieAlgebra::new(LieAlgebra::abelian(4), g)?;
    let d = CourantData::untwisted(Chart::standard(n)?, fiber);
    let mut a = Matrix::<Q>::zeros(4, 4);
    a[(1, 0)] = q(1);
    a[(0, 1)] = q(-1);
    a[(3, 2)] = q(1);
    a[(2, 3)] = q(-1);
    let cj = GacsComponents::complex(constant_matrix(&standard_j(n)), constant_matrix(&a))?;
    let swap = |c: &GacsComponents| {
        GacsComponents::new(-c.j.transpose(), c.a.clone(), c.c.clone(), c.b.clone(), c.nu.clone(), c.mu.clone())
    };
    let mut phi: PolyMatrix = Matrix::zeros(4, n);
    phi[(0, 0)] = Scalar::one();
    phi[(2, 0)] = Scalar::one();
    let iso = IsoData::new(Matrix::identity(4), FiberValuedForm::from_matrix(&phi), KForm::zero(n, 2))?;
    let c = swap(&transform_gacs(&swap(&cj)?, &iso, &d)?)?;
    Ok((d, c))
}
