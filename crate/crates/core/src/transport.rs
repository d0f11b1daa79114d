//! Courant algebroid isomorphisms `(K, Φ, β)` between standard algebroids
//! with the same quadratic Lie algebra bundle, and their action on data,
//! sections and generalised almost complex structures.

use crate::courant::{CourantData, LieAlgebraBundle, Section};
use crate::error::{Error, Result};
use crate::gacs::{adjoint, b_j, check_algebraic, Adjoint, BlockMatrix, GacsComponents, NondegSeed};
use crate::matrix::Matrix;
use crate::symcalc::{pairing_wedge, FiberValuedForm, KForm};
use crate::{PolyMatrix, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct IsoData {
    /// Fiber map, `m×m`.
    pub k: PolyMatrix,
    /// Fiber-valued 1-form.
    pub phi: FiberValuedForm,
    pub beta: KForm,
}

impl IsoData {
    pub fn new(k: PolyMatrix, phi: FiberValuedForm, beta: KForm) -> Result<Self> {
        let n = beta.dim();
        let m = k.rows();
        if !k.is_square() {
            return Err(Error::Shape("K must be square".into()));
        }
        if phi.dim() != n {
            return Err(Error::ChartMismatch(n, phi.dim()));
        }
        if phi.fiber_dim() != m {
            return Err(Error::FiberMismatch(m, phi.fiber_dim()));
        }
        if phi.degree() != 1 || beta.degree() != 2 {
            return Err(Error::Shape("Phi must be a 1-form and beta a 2-form".into()));
        }
        Ok(IsoData { k, phi, beta })
    }

    pub fn identity(n: usize, m: usize) -> Self {
        IsoData { k: Matrix::identity(m), phi: FiberValuedForm::zero(n, m, 1), beta: KForm::zero(n, 2) }
    }

    pub fn dim(&self) -> usize {
        self.beta.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.k.rows()
    }

    /// Checks that `K` is invertible with polynomial inverse and preserves
    /// bracket and metric of the fiber.
    pub fn validate(&self, bundle: &LieAlgebraBundle) -> Result<()> {
        if self.dim() != bundle.dim() {
            return Err(Error::ChartMismatch(bundle.dim(), self.dim()));
        }
        if self.fiber_dim() != bundle.fiber_dim() {
            return Err(Error::FiberMismatch(bundle.fiber_dim(), self.fiber_dim()));
        }
        self.k.inverse_polynomial()?;
        let g = bundle.metric();
        if &(&self.k.transpose() * &g) * &self.k != g {
            return Err(Error::Precondition("K does not preserve the fiber metric".into()));
        }
        let l = &bundle.fiber().algebra;
        let m = self.fiber_dim();
        let cols = self.k.columns();
        for i in 0..m {
            for j in i + 1..m {
                let lhs = self.k.apply(&l.bracket(&l.basis_vector::<Scalar>(i), &l.basis_vector(j)));
                if lhs != l.bracket(&cols[i], &cols[j]) {
                    return Err(Error::Precondition(format!(
                        "K does not preserve the bracket on (e{}, e{})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// `Φ*` with `(Φ*r)(X) = ⟨r, Φ(X)⟩` (no factor 2), an `n×m` matrix.
    pub fn phi_star(&self, g: &PolyMatrix) -> PolyMatrix {
        &self.phi.to_matrix().transpose() * g
    }

    /// `I` as a `(2n+m)`-square matrix in the frame `(∂, dx, e)`.
    pub fn matrix(&self, g: &PolyMatrix) -> PolyMatrix {
        let n = self.dim();
        let m = self.fiber_dim();
        let phi = self.phi.to_matrix();
        let ps = self.phi_star(g);
        let mut out = Matrix::identity(2 * n + m);
        out.set_block(n, 0, &(&self.beta.to_map() - &(&ps * &phi)));
        out.set_block(n, 2 * n, &(&ps * &self.k).scale(&Scalar::from_i64(-2)));
        out.set_block(2 * n, 0, &phi);
        out.set_block(2 * n, 2 * n, &self.k);
        out
    }
}

/// `I(X + η + r)`.
pub fn apply_iso(i: &IsoData, g: &PolyMatrix, u: &Section) -> Result<Section> {
    if u.dim() != i.dim() {
        return Err(Error::ChartMismatch(i.dim(), u.dim()));
    }
    if u.fiber_dim() != i.fiber_dim() {
        return Err(Error::FiberMismatch(i.fiber_dim(), u.fiber_dim()));
    }
    let col = i.matrix(g).apply(&u.to_column());
    Section::from_column(i.dim(), i.fiber_dim(), &col)
}

/// `(K⁻¹, −K⁻¹Φ, −β)`.
pub fn invert_iso(i: &IsoData) -> Result<IsoData> {
    let kinv = i.k.inverse_polynomial()?;
    let phi = FiberValuedForm::from_matrix(&-(&kinv * &i.phi.to_matrix()));
    Ok(IsoData { k: kinv, phi, beta: -&i.beta })
}

/// `i2 ∘ i1`.
pub fn compose(i2: &IsoData, i1: &IsoData, g: &PolyMatrix) -> IsoData {
    let p1 = &i2.k * &i1.phi.to_matrix();
    let p2 = i2.phi.to_matrix();
    let k = &i2.k * &i1.k;
    let phi = FiberValuedForm::from_matrix(&(&p2 + &p1));
    // β(X,Y) gains −⟨K2Φ1X, Φ2Y⟩ + ⟨K2Φ1Y, Φ2X⟩; as a map, entry (b, a) is β(∂a, ∂b).
    let cross = &(&p2.transpose() * g) * &p1;
    let corr = &cross.transpose() - &cross;
    let beta = &(&i1.beta + &i2.beta) + &KForm::from_map(&corr).expect("antisymmetric");
    IsoData { k, phi, beta }
}

/// Data `D₂` such that `I` is an isomorphism from `D₁` to `D₂`.
pub fn transform_data(d1: &CourantData, i: &IsoData) -> Result<CourantData> {
    let check = d1.check_defining_data();
    if !check.pass() {
        return Err(Error::Precondition("input data fail the defining-data check".into()));
    }
    transform_data_unchecked(d1, i)
}

pub fn transform_data_unchecked(d1: &CourantData, i: &IsoData) -> Result<CourantData> {
    let b1 = &d1.bundle;
    i.validate(b1)?;
    let n = d1.dim();
    let l = &b1.fiber().algebra;
    let kinv = i.k.inverse_polynomial()?;
    let conn: Vec<PolyMatrix> = (0..n)
        .map(|a| {
            let t1 = &i.k * &kinv.derivative(a);
            let t2 = &(&i.k * &b1.connection()[a]) * &kinv;
            &(&t1 + &t2) - &l.ad(&i.phi.column(&[a]))
        })
        .collect();
    let bundle = LieAlgebraBundle::new_unchecked(b1.chart().clone(), b1.fiber().clone(), conn)?;
    let kr1 = d1.r.map_fiber(&i.k)?;
    let r2 = &(&kr1 - &bundle.d_nabla(&i.phi)) - &bundle.bracket_square(&i.phi);
    let gq = &b1.fiber().metric;
    let mixed = pairing_wedge(&(&kr1 + &r2), &i.phi, gq)?;
    let h2 = &(&(&d1.h - &i.beta.d_total()) - &mixed) + &c3(&bundle, &i.phi);
    CourantData::new(bundle, r2, h2)
}

/// `c₃(X,Y,Z) = ⟨Φ(X), [Φ(Y), Φ(Z)]⟩`.
pub fn c3(bundle: &LieAlgebraBundle, phi: &FiberValuedForm) -> KForm {
    let n = bundle.dim();
    let mut out = KForm::zero(n, 3);
    for t in crate::symcalc::increasing_tuples(n, 3) {
        let v = bundle.pairing(&phi.column(&[t[0]]), &bundle.bracket(&phi.column(&[t[1]]), &phi.column(&[t[2]])));
        out.add_component(&t, &v);
    }
    out
}

/// Components of `I⁻¹ ∘ 𝒥 ∘ I`, by block conjugation, cross-checked against
/// the closed formulas for `J₁, A₁, B₁, ν₁`.
pub fn transform_gacs(c: &GacsComponents, i: &IsoData, d2: &CourantData) -> Result<GacsComponents> {
    if c.dim() != d2.dim() || i.dim() != d2.dim() {
        return Err(Error::ChartMismatch(d2.dim(), c.dim()));
    }
    if c.fiber_dim() != d2.fiber_dim() || i.fiber_dim() != d2.fiber_dim() {
        return Err(Error::FiberMismatch(d2.fiber_dim(), c.fiber_dim()));
    }
    let gq = &d2.bundle.fiber().metric;
    let g = d2.bundle.metric();
    let block = BlockMatrix::assemble(c, gq)?;
    let inv = invert_iso(i)?;
    let conj = &(&inv.matrix(&g) * &block.matrix) * &i.matrix(&g);
    let out = BlockMatrix { n: block.n, m: block.m, matrix: conj }.components(gq)?;

    let phi = i.phi.to_matrix();
    let ps = i.phi_star(&g);
    let nus = adjoint(Adjoint::Nu, &c.nu, gq)?;
    let kinv = i.k.inverse_polynomial()?;
    let j1 = &(&c.j + &(&c.b * &(&i.beta.to_map() - &(&ps * &phi)))) - &(&nus * &phi);
    let two = Scalar::from_i64(2);
    let inner = &(&(&c.a + &(&(&phi * &c.b) * &ps).scale(&two)) - &(&c.nu * &ps).scale(&two)) + &(&phi * &nus);
    let a1 = &(&kinv * &inner) * &i.k;
    let nu1 = &kinv * &(&c.nu - &(&phi * &c.b));
    if out.j != j1 || out.a != a1 || out.b != c.b || out.nu != nu1 {
        return Err(Error::Precondition("block conjugation disagrees with the component formulas".into()));
    }
    Ok(out)
}

/// Result of the two-step reduction to `𝒥_ω ⊕ A` on an untwisted algebroid.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub data: CourantData,
    pub components: GacsComponents,
    pub omega: KForm,
    pub a: PolyMatrix,
    /// The composite isomorphism from the reduced algebroid to the input one.
    pub iso: IsoData,
    pub step1: IsoData,
    pub step2: IsoData,
}

/// Completes `s` and reduces the result with [`normal_form`].
pub fn normal_form_from_seed(s: &NondegSeed, d: &CourantData) -> Result<NormalForm> {
    let c = crate::gacs::nondeg_complete(s, &d.bundle.fiber().metric)?;
    normal_form(&c, d)
}

/// Reduces an integrable non-degenerate structure: first by
/// `(Id, νB⁻¹, B_J)`, then by `(Id, 0, B_J')` with `B_J'` recomputed.
pub fn normal_form(c: &GacsComponents, d: &CourantData) -> Result<NormalForm> {
    let n = d.dim();
    let m = d.fiber_dim();
    let gq = d.bundle.fiber().metric.clone();
    let g = d.bundle.metric();
    if !check_algebraic(c, &gq)?.pass() {
        return Err(Error::Precondition("components fail the algebraic check".into()));
    }
    let seed = NondegSeed::from_components(c, &gq)?;
    let report = crate::gacs::nondeg_integrability(&seed, d)?;
    if !report.pass() {
        return Err(Error::Precondition(format!("structure is not integrable: failing {:?}", report.failing())));
    }
    let binv = c.b.inverse_polynomial()?;
    let step1 = IsoData::new(
        Matrix::identity(m),
        FiberValuedForm::from_matrix(&(&c.nu * &binv)),
        b_j(c, &gq)?,
    )?;
    // step1 maps the reduced algebroid D1 onto d, so D1 = step1⁻¹(d).
    let inv1 = invert_iso(&step1)?;
    let d1 = transform_data(d, &inv1)?;
    let c1 = transform_gacs(c, &step1, d)?;
    let step2 = IsoData::new(Matrix::identity(m), FiberValuedForm::zero(n, m, 1), b_j(&c1, &gq)?)?;
    let d2 = transform_data(&d1, &invert_iso(&step2)?)?;
    let c2 = transform_gacs(&c1, &step2, &d1)?;
    let iso = compose(&step1, &step2, &g);
    let omega = KForm::from_map(&c2.c)?;
    Ok(NormalForm { data: d2, a: c2.a.clone(), components: c2, omega, iso, step1, step2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{cayley_rotation, u2};
    use crate::field::q;
    use crate::symcalc::{constant_matrix, Chart};

    #[test]
    fn identity_acts_trivially() {
        let d = CourantData::untwisted(Chart::standard(2).unwrap(), u2());
        let id = IsoData::identity(2, 4);
        let g = d.bundle.metric();
        assert_eq!(id.matrix(&g), Matrix::identity(8));
        assert_eq!(transform_data(&d, &id).unwrap(), d);
        for u in Section::frame(2, 4) {
            assert_eq!(apply_iso(&id, &g, &u).unwrap(), u);
        }
    }

    #[test]
    fn rotation_inverse_is_the_transpose() {
        let k = constant_matrix(&cayley_rotation(2, &q(2)));
        let iso = IsoData::new(k.clone(), FiberValuedForm::zero(2, 4, 1), KForm::zero(2, 2)).unwrap();
        let inv = invert_iso(&iso).unwrap();
        assert_eq!(inv.k, k.transpose());
    }

    #[test]
    fn shapes_are_checked() {
        assert!(IsoData::new(Matrix::identity(3), FiberValuedForm::zero(2, 4, 1), KForm::zero(2, 2)).is_err());
    }
}
