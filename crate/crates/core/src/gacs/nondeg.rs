use crate::courant::{CourantData, LieAlgebraBundle};
use crate::error::{Error, Result};
use crate::field::{qr, Q};
use crate::matrix::Matrix;
use crate::symcalc::{pairing_wedge, FiberValuedForm, KForm};
use crate::{PolyMatrix, Scalar};

use super::{adjoint, Adjoint, GacsComponents};

/// `(J, Ã, B, ν)` with `B` invertible.
#[derive(Clone, Debug, PartialEq)]
pub struct NondegSeed {
    pub j: PolyMatrix,
    pub atilde: PolyMatrix,
    pub b: PolyMatrix,
    pub nu: PolyMatrix,
}

impl NondegSeed {
    /// Validates skewness of `B` and `Ã`, `Ã² = −Id`, `JB − BJ* = ν*ν`
    /// and invertibility of `B` over the fraction field.
    pub fn new(j: PolyMatrix, atilde: PolyMatrix, b: PolyMatrix, nu: PolyMatrix, g: &Matrix<Q>) -> Result<Self> {
        let n = j.rows();
        let m = atilde.rows();
        if !j.is_square() || b.rows() != n || b.cols() != n || atilde.cols() != m || nu.rows() != m || nu.cols() != n {
            return Err(Error::Shape("seed blocks have inconsistent shapes".into()));
        }
        if g.rows() != m {
            return Err(Error::FiberMismatch(g.rows(), m));
        }
        let s = NondegSeed { j, atilde, b, nu };
        if let Some(v) = s.violations(g)?.first() {
            return Err(Error::Precondition(format!("seed invariant violated: {v}")));
        }
        Ok(s)
    }

    /// Recovers the seed of a structure with invertible `B`: `Ã = A + νB⁻¹ν*`.
    pub fn from_components(c: &GacsComponents, g: &Matrix<Q>) -> Result<Self> {
        let binv = c.b.inverse_polynomial()?;
        let nus = adjoint(Adjoint::Nu, &c.nu, g)?;
        let atilde = &c.a + &(&(&c.nu * &binv) * &nus);
        NondegSeed::new(c.j.clone(), atilde, c.b.clone(), c.nu.clone(), g)
    }

    /// Names of violated seed invariants.
    pub fn violations(&self, g: &Matrix<Q>) -> Result<Vec<&'static str>> {
        let n = self.j.rows();
        let m = self.atilde.rows();
        let mut out = Vec::new();
        if !self.b.is_antisymmetric() {
            out.push("B* = -B");
        }
        if !(&self.atilde + &adjoint(Adjoint::A, &self.atilde, g)?).is_zero() {
            out.push("A~* = -A~");
        }
        if &self.atilde * &self.atilde != -Matrix::<Scalar>::identity(m) {
            out.push("A~^2 = -Id");
        }
        let nus = adjoint(Adjoint::Nu, &self.nu, g)?;
        if &(&self.j * &self.b) - &(&self.b * &self.j.transpose()) != &nus * &self.nu {
            out.push("JB - BJ* = nu*nu");
        }
        if self.b.det().is_zero() || n == 0 {
            out.push("B invertible");
        }
        Ok(out)
    }
}

/// `A = Ã − νB⁻¹ν*`, `C = −B⁻¹(ν*ÃνB⁻¹ + Id) − J*B⁻¹J`, `μ = νB⁻¹J − ÃνB⁻¹`.
pub fn nondeg_complete(s: &NondegSeed, g: &Matrix<Q>) -> Result<GacsComponents> {
    let n = s.j.rows();
    let binv = s.b.inverse_polynomial()?;
    let nus = adjoint(Adjoint::Nu, &s.nu, g)?;
    let sigma = &s.nu * &binv;
    let a = &s.atilde - &(&sigma * &nus);
    let inner = &(&(&nus * &s.atilde) * &sigma) + &Matrix::identity(n);
    let c = &(-&(&binv * &inner)) - &(&(&s.j.transpose() * &binv) * &s.j);
    let mu = &(&sigma * &s.j) - &(&s.atilde * &sigma);
    GacsComponents::new(s.j.clone(), a, s.b.clone(), c, mu, s.nu.clone())
}

/// `B_J = −½(B⁻¹(J·,·) + B⁻¹(·,J·))`.
pub fn b_j(c: &GacsComponents, _g: &Matrix<Q>) -> Result<KForm> {
    let binv = c.b.inverse_polynomial()?;
    let map = (&(&binv * &c.j) + &(&c.j.transpose() * &binv)).scale(&Scalar::constant(qr(-1, 2)));
    KForm::from_map(&map)
}

/// `∇̃_X = ∇_X + ad_{νB⁻¹X}`.
pub fn modified_connection(s: &NondegSeed, d: &CourantData) -> Result<LieAlgebraBundle> {
    let sigma = FiberValuedForm::from_matrix(&(&s.nu * &s.b.inverse_polynomial()?));
    let l = &d.bundle.fiber().algebra;
    let conn = d
        .bundle
        .connection()
        .iter()
        .enumerate()
        .map(|(a, om)| om + &l.ad(&sigma.column(&[a])))
        .collect();
    LieAlgebraBundle::new_unchecked(d.bundle.chart().clone(), d.bundle.fiber().clone(), conn)
}

/// The five integrability conditions of a non-degenerate structure.
#[derive(Clone, Debug)]
pub struct NondegReport {
    /// `d(B⁻¹)`.
    pub symplectic: KForm,
    /// Basis pairs `(i, j)` with nonzero fiber Nijenhuis tensor of `Ã`.
    pub fiber_nijenhuis: Vec<(usize, usize)>,
    /// `(a, ∇̃_a Ã)` for the nonzero ones.
    pub parallel: Vec<(usize, PolyMatrix)>,
    /// `d^∇σ + [σ,σ] + R` with `σ = νB⁻¹`.
    pub curvature: FiberValuedForm,
    /// `dB_J + H + ⟨(R − ⅓[σ,σ])∧σ⟩`.
    pub h: KForm,
}

impl NondegReport {
    pub fn flags(&self) -> [(&'static str, bool); 5] {
        [
            ("B^-1 closed", self.symplectic.is_zero()),
            ("A~ integrable", self.fiber_nijenhuis.is_empty()),
            ("A~ parallel", self.parallel.is_empty()),
            ("curvature equation", self.curvature.is_zero()),
            ("H equation", self.h.is_zero()),
        ]
    }

    pub fn pass(&self) -> bool {
        self.flags().iter().all(|(_, ok)| *ok)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.flags().iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect()
    }
}

pub fn nondeg_integrability(s: &NondegSeed, d: &CourantData) -> Result<NondegReport> {
    let n = d.dim();
    let m = d.fiber_dim();
    if s.j.rows() != n {
        return Err(Error::ChartMismatch(n, s.j.rows()));
    }
    if s.atilde.rows() != m {
        return Err(Error::FiberMismatch(m, s.atilde.rows()));
    }
    let binv = s.b.inverse_polynomial()?;
    let binv_form = KForm::from_map(&binv)?;
    let symplectic = binv_form.d_total();

    let l = &d.bundle.fiber().algebra;
    let mut fiber_nijenhuis = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let v = l.nijenhuis(&s.atilde, &l.basis_vector::<Scalar>(i), &l.basis_vector(j));
            if v.iter().any(|x| !x.is_zero()) {
                fiber_nijenhuis.push((i, j));
            }
        }
    }

    let tilde = modified_connection(s, d)?;
    let mut parallel = Vec::new();
    for (a, om) in tilde.connection().iter().enumerate() {
        let res = &s.atilde.derivative(a) + &om.commutator(&s.atilde);
        if !res.is_zero() {
            parallel.push((a, res));
        }
    }

    let sigma = FiberValuedForm::from_matrix(&(&s.nu * &binv));
    let sq = d.bundle.bracket_square(&sigma);
    let curvature = &(&d.bundle.d_nabla(&sigma) + &sq) + &d.r;

    let third = Scalar::constant(qr(1, 3));
    let gq = &d.bundle.fiber().metric;
    let comps = GacsComponents::new(s.j.clone(), Matrix::identity(m), s.b.clone(), Matrix::zeros(n, n), Matrix::zeros(m, n), s.nu.clone())?;
    let bj = b_j(&comps, gq)?;
    let inner = &d.r - &sq.scale(&third);
    let h = &(&bj.d_total() + &d.h) + &pairing_wedge(&inner, &sigma, gq)?;

    Ok(NondegReport { symplectic, fiber_nijenhuis, parallel, curvature, h })
}

/// Nonzero curvature components of `∇̃` on coordinate pairs `a < b`.
pub fn flat_curvature_check(s: &NondegSeed, d: &CourantData) -> Result<Vec<((usize, usize), PolyMatrix)>> {
    Ok(modified_connection(s, d)?.curvature().into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{canonical_symplectic, u2};

    #[test]
    fn seed_of_canonical_structure_completes_back() {
        let g = u2().metric;
        let (d, c) = canonical_symplectic(4, &Scalar::var(0)).unwrap();
        let s = NondegSeed::from_components(&c, &g).unwrap();
        assert!(s.violations(&g).unwrap().is_empty());
        assert_eq!(nondeg_complete(&s, &g).unwrap(), c);
        assert!(nondeg_integrability(&s, &d).unwrap().pass());
        assert!(flat_curvature_check(&s, &d).unwrap().is_empty());
    }

    #[test]
    fn singular_b_is_rejected() {
        let g = u2().metric;
        let r = NondegSeed::new(Matrix::zeros(2, 2), crate::symcalc::constant_matrix(&crate::instances::u2_complex_structure()), Matrix::zeros(2, 2), Matrix::zeros(4, 2), &g);
        assert!(r.is_err());
    }
}
