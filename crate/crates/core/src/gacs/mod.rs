//! Generalised almost complex structures on a standard Courant algebroid,
//! described through their components `(J, A, B, C, μ, ν)`.

mod ldata;
mod nondeg;
mod relations;

pub use ldata::{pointwise_ldata, LDataCheck, PointwiseLData};
pub use nondeg::{
    b_j, flat_curvature_check, modified_connection, nondeg_complete, nondeg_integrability, NondegReport, NondegSeed,
};
pub use relations::{
    integrability_10, integrability_18, relation_signature, relation_value, run_suite, nijenhuis_oracle, poisson_operator, poisson_residual, ArgKind,
    IntegrabilityReport, OracleReport, PoissonReport, RelationResidual, SUITE_10,
};

use crate::courant::{CourantData, Section};
use crate::error::{Error, Result};
use crate::field::{qr, Q};
use crate::matrix::Matrix;
use crate::symcalc::{constant_matrix, EndoField, FiberValuedForm, KForm, Space};
use crate::{PolyMatrix, Scalar};

/// The six component fields. Matrices act on coordinate columns:
/// `J, B, C` are `n×n`, `A` is `m×m`, `μ, ν` are `m×n`.
/// `C` is stored as the map `X ↦ C(X, ·)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GacsComponents {
    pub j: PolyMatrix,
    pub a: PolyMatrix,
    pub b: PolyMatrix,
    pub c: PolyMatrix,
    pub mu: PolyMatrix,
    pub nu: PolyMatrix,
}

impl GacsComponents {
    pub fn new(j: PolyMatrix, a: PolyMatrix, b: PolyMatrix, c: PolyMatrix, mu: PolyMatrix, nu: PolyMatrix) -> Result<Self> {
        let n = j.rows();
        let m = a.rows();
        let shape = |name: &str, mat: &PolyMatrix, r: usize, c: usize| -> Result<()> {
            if mat.rows() != r || mat.cols() != c {
                return Err(Error::Shape(format!(
                    "{name} must be {r}x{c}, got {}x{}",
                    mat.rows(),
                    mat.cols()
                )));
            }
            Ok(())
        };
        shape("J", &j, n, n)?;
        shape("A", &a, m, m)?;
        shape("B", &b, n, n)?;
        shape("C", &c, n, n)?;
        shape("mu", &mu, m, n)?;
        shape("nu", &nu, m, n)?;
        Ok(GacsComponents { j, a, b, c, mu, nu })
    }

    /// `𝒥_ω ⊕ A`: `J = 0`, `B = −ω⁻¹`, `C = ω`, `μ = ν = 0`.
    pub fn symplectic(omega: &KForm, a: PolyMatrix) -> Result<Self> {
        let n = omega.dim();
        let w = omega.to_map();
        let b = -w.inverse_polynomial()?;
        let m = a.rows();
        Self::new(Matrix::zeros(n, n), a, b, w, Matrix::zeros(m, n), Matrix::zeros(m, n))
    }

    /// `𝒥_J ⊕ A`: `B = C = μ = ν = 0`.
    pub fn complex(j: PolyMatrix, a: PolyMatrix) -> Result<Self> {
        let n = j.rows();
        let m = a.rows();
        Self::new(j, a, Matrix::zeros(n, n), Matrix::zeros(n, n), Matrix::zeros(m, n), Matrix::zeros(m, n))
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }

    pub fn fiber_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn endo(&self, which: Adjoint) -> EndoField {
        let (s, t, m) = match which {
            Adjoint::J => (Space::Tangent, Space::Tangent, &self.j),
            Adjoint::A => (Space::Fiber, Space::Fiber, &self.a),
            Adjoint::B => (Space::Cotangent, Space::Tangent, &self.b),
            Adjoint::C => (Space::Tangent, Space::Cotangent, &self.c),
            Adjoint::Mu => (Space::Tangent, Space::Fiber, &self.mu),
            Adjoint::Nu => (Space::Cotangent, Space::Fiber, &self.nu),
        };
        EndoField::new(s, t, m.clone())
    }

    /// `C` as a 2-form (requires antisymmetry).
    pub fn c_form(&self) -> Result<KForm> {
        KForm::from_map(&self.c)
    }

    pub fn mu_form(&self) -> FiberValuedForm {
        FiberValuedForm::from_matrix(&self.mu)
    }

    pub fn eval_at(&self, p: &[Q]) -> Result<GacsComponents> {
        let c = |m: &PolyMatrix| -> Result<PolyMatrix> { Ok(constant_matrix(&m.eval(p)?)) };
        Ok(GacsComponents { j: c(&self.j)?, a: c(&self.a)?, b: c(&self.b)?, c: c(&self.c)?, mu: c(&self.mu)?, nu: c(&self.nu)? })
    }

    fn check(&self, d: &CourantData) -> Result<()> {
        if self.dim() != d.dim() {
            return Err(Error::ChartMismatch(d.dim(), self.dim()));
        }
        if self.fiber_dim() != d.fiber_dim() {
            return Err(Error::FiberMismatch(d.fiber_dim(), self.fiber_dim()));
        }
        Ok(())
    }
}

/// Which adjoint to form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Adjoint {
    J,
    A,
    B,
    C,
    Mu,
    Nu,
}

/// Metric adjoints. `J*, B*, C*` are transposes, `A* = g⁻¹Aᵀg`,
/// and `μ* = 2μᵀg`, `ν* = 2νᵀg` (the factor 2 undoes the ½ of the
/// tangent/cotangent pairing).
pub fn adjoint(kind: Adjoint, t: &PolyMatrix, g: &Matrix<Q>) -> Result<PolyMatrix> {
    let m = g.rows();
    let gp = constant_matrix(g);
    match kind {
        Adjoint::J | Adjoint::B | Adjoint::C => {
            if !t.is_square() {
                return Err(Error::Shape(format!("{kind:?} must be square")));
            }
            Ok(t.transpose())
        }
        Adjoint::A => {
            if t.rows() != m || t.cols() != m {
                return Err(Error::Shape(format!("A must be {m}x{m}")));
            }
            let gi = constant_matrix(&g.inverse().ok_or(Error::Singular)?);
            Ok(&(&gi * &t.transpose()) * &gp)
        }
        Adjoint::Mu | Adjoint::Nu => {
            if t.rows() != m {
                return Err(Error::Shape(format!("{kind:?} must have {m} rows")));
            }
            Ok((&t.transpose() * &gp).scale(&Scalar::from_i64(2)))
        }
    }
}

/// `𝒥` as a `(2n+m)`-square matrix in the frame `(∂, dx, e)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    pub n: usize,
    pub m: usize,
    pub matrix: PolyMatrix,
}

impl BlockMatrix {
    /// `𝒥 = (J B −ν*; C −J* −μ*; μ ν A)`.
    pub fn assemble(c: &GacsComponents, g: &Matrix<Q>) -> Result<Self> {
        let n = c.dim();
        let m = c.fiber_dim();
        let mut out = Matrix::zeros(2 * n + m, 2 * n + m);
        out.set_block(0, 0, &c.j);
        out.set_block(0, n, &c.b);
        out.set_block(0, 2 * n, &-adjoint(Adjoint::Nu, &c.nu, g)?);
        out.set_block(n, 0, &c.c);
        out.set_block(n, n, &-c.j.transpose());
        out.set_block(n, 2 * n, &-adjoint(Adjoint::Mu, &c.mu, g)?);
        out.set_block(2 * n, 0, &c.mu);
        out.set_block(2 * n, n, &c.nu);
        out.set_block(2 * n, 2 * n, &c.a);
        Ok(BlockMatrix { n, m, matrix: out })
    }

    /// Reads back `(J, A, B, C, μ, ν)`; fails if the dependent blocks disagree.
    pub fn components(&self, g: &Matrix<Q>) -> Result<GacsComponents> {
        let (n, m) = (self.n, self.m);
        let mt = &self.matrix;
        let c = GacsComponents {
            j: mt.block(0, 0, n, n),
            b: mt.block(0, n, n, n),
            c: mt.block(n, 0, n, n),
            mu: mt.block(2 * n, 0, m, n),
            nu: mt.block(2 * n, n, m, n),
            a: mt.block(2 * n, 2 * n, m, m),
        };
        if BlockMatrix::assemble(&c, g)? != *self {
            return Err(Error::Precondition("block matrix is not of component form".into()));
        }
        Ok(c)
    }

    /// Metric of `E` in the frame: `(0 ½I 0; ½I 0 0; 0 0 g)`.
    pub fn ambient_metric(n: usize, g: &Matrix<Q>) -> PolyMatrix {
        let m = g.rows();
        let mut out = Matrix::zeros(2 * n + m, 2 * n + m);
        let half = Scalar::constant(qr(1, 2));
        for i in 0..n {
            out[(i, n + i)] = half.clone();
            out[(n + i, i)] = half.clone();
        }
        out.set_block(2 * n, 2 * n, &constant_matrix(g));
        out
    }

    pub fn apply(&self, u: &Section) -> Section {
        let col = self.matrix.apply(&u.to_column());
        Section::from_column(self.n, self.m, &col).expect("matching shape")
    }

    /// `𝒥² + Id`.
    pub fn square_residual(&self) -> PolyMatrix {
        &(&self.matrix * &self.matrix) + &Matrix::identity(self.matrix.rows())
    }

    /// `𝒥ᵀG + G𝒥`, the skew-adjointness defect.
    pub fn skew_residual(&self, g: &Matrix<Q>) -> PolyMatrix {
        let big = Self::ambient_metric(self.n, g);
        &(&self.matrix.transpose() * &big) + &(&big * &self.matrix)
    }
}

/// Residuals of the skew conditions and the six quadratic equations,
/// plus the block-matrix cross-check.
#[derive(Clone, Debug)]
pub struct AlgebraicReport {
    /// `(name, residual)` in the order B skew, C skew, A skew, then the six equations.
    pub residuals: Vec<(&'static str, PolyMatrix)>,
    pub block_square_ok: bool,
    pub block_skew_ok: bool,
}

impl AlgebraicReport {
    pub fn components_pass(&self) -> bool {
        self.residuals.iter().all(|(_, r)| r.is_zero())
    }

    pub fn block_pass(&self) -> bool {
        self.block_square_ok && self.block_skew_ok
    }

    pub fn agree(&self) -> bool {
        self.components_pass() == self.block_pass()
    }

    pub fn pass(&self) -> bool {
        self.components_pass() && self.block_pass()
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.residuals.iter().filter(|(_, r)| !r.is_zero()).map(|(n, _)| *n).collect()
    }
}

pub fn check_algebraic(c: &GacsComponents, g: &Matrix<Q>) -> Result<AlgebraicReport> {
    let n = c.dim();
    let m = c.fiber_dim();
    let js = c.j.transpose();
    let a_s = adjoint(Adjoint::A, &c.a, g)?;
    let mus = adjoint(Adjoint::Mu, &c.mu, g)?;
    let nus = adjoint(Adjoint::Nu, &c.nu, g)?;
    let idn = Matrix::<Scalar>::identity(n);
    let idm = Matrix::<Scalar>::identity(m);
    let (j, a, b, cc, mu, nu) = (&c.j, &c.a, &c.b, &c.c, &c.mu, &c.nu);
    let residuals = vec![
        ("B* = -B", b + &b.transpose()),
        ("C* = -C", cc + &cc.transpose()),
        ("A* = -A", a + &a_s),
        ("J^2 + BC - nu*mu = -Id", &(&(&(j * j) + &(b * cc)) - &(&nus * mu)) + &idn),
        ("-mu nu* - nu mu* + A^2 = -Id", &(&(&(a * a) - &(mu * &nus)) - &(nu * &mus)) + &idm),
        ("JB - BJ* - nu*nu = 0", &(&(j * b) - &(b * &js)) - &(&nus * nu)),
        ("mu B - nu J* + A nu = 0", &(&(mu * b) - &(nu * &js)) + &(a * nu)),
        ("CJ - J*C - mu*mu = 0", &(&(cc * j) - &(&js * cc)) - &(&mus * mu)),
        ("mu J + nu C + A mu = 0", &(&(mu * j) + &(nu * cc)) + &(a * mu)),
    ];
    let block = BlockMatrix::assemble(c, g)?;
    Ok(AlgebraicReport {
        residuals,
        block_square_ok: block.square_residual().is_zero(),
        block_skew_ok: block.skew_residual(g).is_zero(),
    })
}

/// `N(u,v) = [𝒥u,𝒥v] − [u,v] − 𝒥([𝒥u,v] + [u,𝒥v])`.
pub fn nijenhuis(d: &CourantData, c: &GacsComponents, u: &Section, v: &Section) -> Result<Section> {
    c.check(d)?;
    let block = BlockMatrix::assemble(c, &d.bundle.fiber().metric)?;
    nijenhuis_with(d, &block, u, v)
}

pub(crate) fn nijenhuis_with(d: &CourantData, block: &BlockMatrix, u: &Section, v: &Section) -> Result<Section> {
    let ju = block.apply(u);
    let jv = block.apply(v);
    let first = d.dorfman(&ju, &jv)?;
    let second = d.dorfman(u, v)?;
    let inner = &d.dorfman(&ju, v)? + &d.dorfman(u, &jv)?;
    Ok(&(&first - &second) - &block.apply(&inner))
}

pub(crate) fn half() -> Q {
    qr(1, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{canonical_symplectic, complex_type, u2};
    use crate::Scalar;

    #[test]
    fn block_matrix_of_canonical_structures() {
        let g = u2().metric;
        for (_, c) in [canonical_symplectic(2, &Scalar::zero()).unwrap(), complex_type(2).unwrap()] {
            let block = BlockMatrix::assemble(&c, &g).unwrap();
            assert!(block.square_residual().is_zero());
            assert!(block.skew_residual(&g).is_zero());
            assert_eq!(block.components(&g).unwrap(), c);
            assert!(check_algebraic(&c, &g).unwrap().pass());
        }
    }

    #[test]
    fn zero_structure_is_not_almost_complex() {
        let g = u2().metric;
        let z = GacsComponents::new(
            Matrix::zeros(2, 2),
            Matrix::zeros(4, 4),
            Matrix::zeros(2, 2),
            Matrix::zeros(2, 2),
            Matrix::zeros(4, 2),
            Matrix::zeros(4, 2),
        )
        .unwrap();
        let rep = check_algebraic(&z, &g).unwrap();
        assert!(!rep.pass() && rep.agree());
        assert!(!rep.failing().is_empty());
    }
}
