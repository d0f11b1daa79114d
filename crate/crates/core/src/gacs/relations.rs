use std::ops::{Add, Neg, Sub};

use rayon::prelude::*;

use crate::courant::{CourantData, Section};
use crate::error::Result;
use crate::symcalc::{schouten_pb, KForm, Space, Trivector, VectorField};
use crate::{PolyMatrix, Scalar};

use super::{adjoint, nijenhuis_with, Adjoint, BlockMatrix, GacsComponents};

/// Relations making up the reduced suite.
pub const SUITE_10: [usize; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 12];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArgKind {
    Vector,
    Form,
    Fiber,
}

impl ArgKind {
    fn count(self, n: usize, m: usize) -> usize {
        match self {
            ArgKind::Fiber => m,
            _ => n,
        }
    }

    /// Offset of this kind in the frame `(∂, dx, e)`.
    pub fn offset(self, n: usize) -> usize {
        match self {
            ArgKind::Vector => 0,
            ArgKind::Form => n,
            ArgKind::Fiber => 2 * n,
        }
    }
}

/// Frame evaluation of one relation: the nonzero values only.
#[derive(Clone, Debug)]
pub struct RelationResidual {
    pub index: usize,
    pub args: (ArgKind, ArgKind),
    pub target: Space,
    /// `((a, b), value)` for frame arguments with nonzero value.
    pub nonzero: Vec<((usize, usize), Vec<Scalar>)>,
}

impl RelationResidual {
    pub fn is_zero(&self) -> bool {
        self.nonzero.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct IntegrabilityReport {
    pub relations: Vec<RelationResidual>,
}

impl IntegrabilityReport {
    pub fn pass(&self) -> bool {
        self.relations.iter().all(|r| r.is_zero())
    }

    pub fn failing(&self) -> Vec<usize> {
        self.relations.iter().filter(|r| !r.is_zero()).map(|r| r.index).collect()
    }

    pub fn relation(&self, index: usize) -> Option<&RelationResidual> {
        self.relations.iter().find(|r| r.index == index)
    }
}

/// Argument kinds and target space of relation `k` (1-based).
pub fn relation_signature(k: usize) -> ((ArgKind, ArgKind), Space) {
    use ArgKind::*;
    let args = match (k - 1) / 3 {
        0 => (Vector, Vector),
        1 => (Form, Form),
        2 => (Fiber, Fiber),
        3 => (Vector, Form),
        4 => (Fiber, Form),
        _ => (Fiber, Vector),
    };
    let target = match (k - 1) % 3 {
        0 => Space::Tangent,
        1 => Space::Cotangent,
        _ => Space::Fiber,
    };
    (args, target)
}

pub fn integrability_18(d: &CourantData, c: &GacsComponents) -> Result<IntegrabilityReport> {
    run_suite(d, c, &(1..=18).collect::<Vec<_>>(), false)
}

pub fn integrability_10(d: &CourantData, c: &GacsComponents) -> Result<IntegrabilityReport> {
    run_suite(d, c, &SUITE_10, false)
}

/// Evaluates the listed relations on all frame argument pairs, optionally in parallel.
pub fn run_suite(d: &CourantData, c: &GacsComponents, which: &[usize], parallel: bool) -> Result<IntegrabilityReport> {
    c.check(d)?;
    let ctx = Ctx::new(d, c)?;
    let one = |k: usize| ctx.residual(k);
    let relations = if parallel { which.par_iter().map(|&k| one(k)).collect() } else { which.iter().map(|&k| one(k)).collect() };
    Ok(IntegrabilityReport { relations })
}

/// Value of relation `k` on frame arguments `a`, `b` of its argument kinds.
pub fn relation_value(d: &CourantData, c: &GacsComponents, k: usize, a: usize, b: usize) -> Result<Vec<Scalar>> {
    c.check(d)?;
    if !(1..=18).contains(&k) {
        return Err(crate::error::Error::Precondition(format!("no relation {k}")));
    }
    let ((k1, k2), _) = relation_signature(k);
    let (n, m) = (d.dim(), d.fiber_dim());
    if a >= k1.count(n, m) || b >= k2.count(n, m) {
        return Err(crate::error::Error::Precondition("frame index out of range".into()));
    }
    Ok(Ctx::new(d, c)?.eval(k, a, b).column())
}

/// Nijenhuis tensor on frame pairs `i < j` of `(∂, dx, e)`.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub pairs_checked: usize,
    pub nonzero: Vec<((usize, usize), Section)>,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.nonzero.is_empty()
    }
}

pub fn nijenhuis_oracle(d: &CourantData, c: &GacsComponents) -> Result<OracleReport> {
    c.check(d)?;
    let block = BlockMatrix::assemble(c, &d.bundle.fiber().metric)?;
    let frame = Section::frame(d.dim(), d.fiber_dim());
    let mut nonzero = Vec::new();
    let mut pairs_checked = 0;
    for i in 0..frame.len() {
        for j in i + 1..frame.len() {
            pairs_checked += 1;
            let v = nijenhuis_with(d, &block, &frame[i], &frame[j])?;
            if !v.is_zero() {
                nonzero.push(((i, j), v));
            }
        }
    }
    Ok(OracleReport { pairs_checked, nonzero })
}

/// `𝒫_B(ξ,η) = ℒ_{Bξ}(Bη) − B(ℒ_{Bξ}η − ℒ_{Bη}ξ) + Bd(B(ξ,η))`, with `B(ξ,η) = η(Bξ)`.
pub fn poisson_operator(b: &PolyMatrix, xi: &KForm, eta: &KForm) -> VectorField {
    let bv = |f: &KForm| VectorField::new(b.apply(f.coefficients()));
    let (bx, by) = (bv(xi), bv(eta));
    let bval = pair(eta, &bx);
    let inner = &(&eta.lie_derivative(&bx).expect("chart") - &xi.lie_derivative(&by).expect("chart"))
        - &KForm::differential(b.rows(), &bval);
    &bx.bracket(&by).expect("chart") - &bv(&inner)
}

#[derive(Clone, Debug)]
pub struct PoissonReport {
    /// `T^{ijk} = −𝒫_B(dx^j, dx^k)^i`.
    pub operator: Trivector,
    pub schouten: Trivector,
}

impl PoissonReport {
    pub fn agree(&self) -> bool {
        self.operator == self.schouten
    }

    pub fn is_zero(&self) -> bool {
        self.operator.is_zero()
    }
}

pub fn poisson_residual(c: &GacsComponents) -> Result<PoissonReport> {
    let n = c.dim();
    let mut vals = vec![vec![None; n]; n];
    for j in 0..n {
        for k in j + 1..n {
            let p = poisson_operator(&c.b, &KForm::basis(n, &[j]), &KForm::basis(n, &[k]));
            vals[j][k] = Some(p);
        }
    }
    let operator = Trivector::from_fn(n, |i, j, k| -vals[j][k].as_ref().expect("j < k").components()[i].clone());
    let schouten = schouten_pb(&c.b)?;
    Ok(PoissonReport { operator, schouten })
}

fn pair(xi: &KForm, x: &VectorField) -> Scalar {
    let mut s = Scalar::zero();
    for (a, b) in xi.coefficients().iter().zip(x.components()) {
        s += &(a * b);
    }
    s
}

#[derive(Clone, Debug)]
struct Fib(Vec<Scalar>);

impl Add for Fib {
    type Output = Fib;
    fn add(self, o: Fib) -> Fib {
        Fib(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for Fib {
    type Output = Fib;
    fn sub(self, o: Fib) -> Fib {
        Fib(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for Fib {
    type Output = Fib;
    fn neg(self) -> Fib {
        Fib(self.0.iter().map(|a| -a).collect())
    }
}

impl Fib {
    fn times(self, c: i64) -> Fib {
        let s = Scalar::from_i64(c);
        Fib(self.0.iter().map(|a| a * &s).collect())
    }
}

type V = VectorField;
type F = KForm;

fn vadd(a: V, b: V) -> V {
    &a + &b
}

fn vsub(a: V, b: V) -> V {
    &a - &b
}

fn ftimes(f: F, c: i64) -> F {
    f.scale(&Scalar::from_i64(c))
}

fn vtimes(v: V, c: i64) -> V {
    v.scale(&Scalar::from_i64(c))
}

enum Out {
    V(V),
    F(F),
    G(Fib),
}

impl Out {
    fn column(self) -> Vec<Scalar> {
        match self {
            Out::V(v) => v.into_components(),
            Out::F(f) => f.coefficients().to_vec(),
            Out::G(g) => g.0,
        }
    }
}

struct Ctx<'a> {
    d: &'a CourantData,
    n: usize,
    m: usize,
    j: PolyMatrix,
    jt: PolyMatrix,
    a: PolyMatrix,
    b: PolyMatrix,
    c: PolyMatrix,
    mu: PolyMatrix,
    nu: PolyMatrix,
    mus: PolyMatrix,
    nus: PolyMatrix,
    dc: F,
}

impl<'a> Ctx<'a> {
    fn new(d: &'a CourantData, c: &GacsComponents) -> Result<Self> {
        let g = &d.bundle.fiber().metric;
        let n = d.dim();
        // C need not be antisymmetric on non-algebraic input; use its skew part for dC.
        let skew = (&c.c - &c.c.transpose()).scale(&Scalar::constant(super::half()));
        let dc = F::from_map(&skew)?.d_total();
        Ok(Ctx {
            d,
            n,
            m: d.fiber_dim(),
            j: c.j.clone(),
            jt: c.j.transpose(),
            a: c.a.clone(),
            b: c.b.clone(),
            c: c.c.clone(),
            mu: c.mu.clone(),
            nu: c.nu.clone(),
            mus: adjoint(Adjoint::Mu, &c.mu, g)?,
            nus: adjoint(Adjoint::Nu, &c.nu, g)?,
            dc,
        })
    }

    // --- component maps
    fn jv(&self, x: &V) -> V {
        V::new(self.j.apply(x.components()))
    }
    fn bv(&self, f: &F) -> V {
        V::new(self.b.apply(f.coefficients()))
    }
    fn jt(&self, f: &F) -> F {
        F::one_form(self.jt.apply(f.coefficients()))
    }
    fn cv(&self, x: &V) -> F {
        F::one_form(self.c.apply(x.components()))
    }
    fn mu(&self, x: &V) -> Fib {
        Fib(self.mu.apply(x.components()))
    }
    fn nu(&self, f: &F) -> Fib {
        Fib(self.nu.apply(f.coefficients()))
    }
    fn av(&self, r: &Fib) -> Fib {
        Fib(self.a.apply(&r.0))
    }
    fn mus(&self, r: &Fib) -> F {
        F::one_form(self.mus.apply(&r.0))
    }
    fn nus(&self, r: &Fib) -> V {
        V::new(self.nus.apply(&r.0))
    }

    // --- calculus
    fn lie(&self, x: &V, y: &V) -> V {
        x.bracket(y).expect("chart")
    }
    fn lief(&self, x: &V, f: &F) -> F {
        f.lie_derivative(x).expect("chart")
    }
    fn df(&self, f: &Scalar) -> F {
        F::differential(self.n, f)
    }
    /// `H(X, Y, ·)`.
    fn h(&self, x: &V, y: &V) -> F {
        self.d.h.interior(x).and_then(|w| w.interior(y)).expect("chart")
    }
    /// `dC(X, Y, ·)`.
    fn dch(&self, x: &V, y: &V) -> F {
        self.dc.interior(x).and_then(|w| w.interior(y)).expect("chart")
    }
    /// `C(X, Y) = (CX)(Y)`.
    fn cval(&self, x: &V, y: &V) -> Scalar {
        pair(&self.cv(x), y)
    }
    /// `B(ξ, η) = η(Bξ)`.
    fn bval(&self, xi: &F, eta: &F) -> Scalar {
        pair(eta, &self.bv(xi))
    }
    /// `(ℒ_Z C)Y`.
    fn lie_c(&self, z: &V, y: &V) -> F {
        self.lief(z, &self.cv(y)) - self.cv(&self.lie(z, y))
    }
    /// `(ℒ_Z B)ξ`.
    fn lie_b(&self, z: &V, xi: &F) -> V {
        vsub(self.lie(z, &self.bv(xi)), self.bv(&self.lief(z, xi)))
    }
    /// `(ℒ_Z J*)ξ`.
    fn lie_jt(&self, z: &V, xi: &F) -> F {
        self.lief(z, &self.jt(xi)) - self.jt(&self.lief(z, xi))
    }

    // --- fiber
    fn rr(&self, x: &V, y: &V) -> Fib {
        Fib(self.d.r.eval_on(&[x.clone(), y.clone()]).expect("chart"))
    }
    fn nab(&self, x: &V, r: &Fib) -> Fib {
        Fib(self.d.bundle.nabla(x, &r.0))
    }
    /// `(∇_X A) r`.
    fn na(&self, x: &V, r: &Fib) -> Fib {
        self.nab(x, &self.av(r)) - self.av(&self.nab(x, r))
    }
    fn br(&self, r: &Fib, s: &Fib) -> Fib {
        Fib(self.d.bundle.bracket(&r.0, &s.0))
    }
    fn gp(&self, r: &Fib, s: &Fib) -> Scalar {
        self.d.bundle.pairing(&r.0, &s.0)
    }
    fn coord(&self, c: usize) -> V {
        V::coordinate(self.n, c)
    }
    /// `⟨i_X R, s⟩: Z ↦ ⟨R(X, Z), s⟩`.
    fn ir(&self, x: &V, s: &Fib) -> F {
        let ixr = self.d.r.interior(x).expect("chart").to_matrix();
        F::one_form((0..self.n).map(|c| self.d.bundle.pairing(&ixr.column(c), &s.0)).collect())
    }
    /// `⟨∇r, s⟩: Z ↦ ⟨∇_Z r, s⟩`.
    fn nr(&self, r: &Fib, s: &Fib) -> F {
        F::one_form((0..self.n).map(|c| self.gp(&self.nab(&self.coord(c), r), s)).collect())
    }
    /// `⟨(∇A) r, s⟩: Z ↦ ⟨(∇_Z A) r, s⟩`.
    fn nar(&self, r: &Fib, s: &Fib) -> F {
        F::one_form((0..self.n).map(|c| self.gp(&self.na(&self.coord(c), r), s)).collect())
    }

    fn frame_vector(&self, a: usize) -> V {
        V::coordinate(self.n, a)
    }
    fn frame_form(&self, a: usize) -> F {
        F::basis(self.n, &[a])
    }
    fn frame_fiber(&self, a: usize) -> Fib {
        let mut v = vec![Scalar::zero(); self.m];
        v[a] = Scalar::one();
        Fib(v)
    }

    fn residual(&self, k: usize) -> RelationResidual {
        let (args, target) = relation_signature(k);
        let mut nonzero = Vec::new();
        for a in 0..args.0.count(self.n, self.m) {
            for b in 0..args.1.count(self.n, self.m) {
                let col = self.eval(k, a, b).column();
                if col.iter().any(|x| !x.is_zero()) {
                    nonzero.push(((a, b), col));
                }
            }
        }
        RelationResidual { index: k, args, target, nonzero }
    }

    fn eval(&self, k: usize, a: usize, b: usize) -> Out {
        match k {
            1..=3 => {
                let (x, y) = (self.frame_vector(a), self.frame_vector(b));
                match k {
                    1 => Out::V(self.rel1(&x, &y)),
                    2 => Out::F(self.rel2(&x, &y)),
                    _ => Out::G(self.rel3(&x, &y)),
                }
            }
            4..=6 => {
                let (xi, eta) = (self.frame_form(a), self.frame_form(b));
                match k {
                    4 => Out::V(self.rel4(&xi, &eta)),
                    5 => Out::F(self.rel5(&xi, &eta)),
                    _ => Out::G(self.rel6(&xi, &eta)),
                }
            }
            7..=9 => {
                let (r, s) = (self.frame_fiber(a), self.frame_fiber(b));
                match k {
                    7 => Out::V(self.rel7(&r, &s)),
                    8 => Out::F(self.rel8(&r, &s)),
                    _ => Out::G(self.rel9(&r, &s)),
                }
            }
            10..=12 => {
                let (x, xi) = (self.frame_vector(a), self.frame_form(b));
                match k {
                    10 => Out::V(self.rel10(&x, &xi)),
                    11 => Out::F(self.rel11(&x, &xi)),
                    _ => Out::G(self.rel12(&x, &xi)),
                }
            }
            13..=15 => {
                let (r, xi) = (self.frame_fiber(a), self.frame_form(b));
                match k {
                    13 => Out::V(self.rel13(&r, &xi)),
                    14 => Out::F(self.rel14(&r, &xi)),
                    _ => Out::G(self.rel15(&r, &xi)),
                }
            }
            _ => {
                let (r, x) = (self.frame_fiber(a), self.frame_vector(b));
                match k {
                    16 => Out::V(self.rel16(&r, &x)),
                    17 => Out::F(self.rel17(&r, &x)),
                    _ => Out::G(self.rel18(&r, &x)),
                }
            }
        }
    }

    // Common subexpressions of relations 1-3.
    fn hc_part(&self, x: &V, y: &V) -> F {
        let (jx, jy) = (self.jv(x), self.jv(y));
        self.h(&jy, x) + self.h(y, &jx) + self.dch(y, x) - self.cv(&self.lie(x, y))
    }
    fn rmu_form(&self, x: &V, y: &V) -> F {
        self.ir(x, &self.mu(y)) - self.ir(y, &self.mu(x))
    }
    fn rmu_fiber(&self, x: &V, y: &V) -> Fib {
        let (jx, jy) = (self.jv(x), self.jv(y));
        self.rr(x, &jy) - self.rr(y, &jx) + self.nab(x, &self.mu(y)) - self.nab(y, &self.mu(x))
    }

    fn rel1(&self, x: &V, y: &V) -> V {
        let (jx, jy) = (self.jv(x), self.jv(y));
        let mut out = vsub(self.lie(&jx, &jy), self.lie(x, y));
        out = vsub(out, self.jv(&self.lie(x, &jy)));
        out = vadd(out, self.jv(&self.lie(y, &jx)));
        out = vadd(out, self.bv(&self.hc_part(x, y)));
        out = vadd(out, vtimes(self.bv(&self.rmu_form(x, y)), 2));
        vadd(out, self.nus(&self.rmu_fiber(x, y)))
    }

    fn rel2(&self, x: &V, y: &V) -> F {
        let (jx, jy) = (self.jv(x), self.jv(y));
        let (mx, my) = (self.mu(x), self.mu(y));
        self.h(&jx, &jy) - self.h(x, y)
            + self.jt(&(self.h(x, &jy) - self.h(y, &jx)))
            + ftimes(self.ir(&jy, &mx), 2)
            - ftimes(self.ir(&jx, &my), 2)
            - ftimes(self.jt(&(self.ir(x, &my) - self.ir(y, &mx))), 2)
            + self.lie_c(&jx, y)
            - self.lie_c(&jy, x)
            + self.df(&self.cval(x, &jy))
            + self.jt(&(self.dch(x, y) + self.cv(&self.lie(x, y))))
            + ftimes(self.nr(&mx, &my), 2)
            + self.mus(&(self.rr(x, &jy) + self.rr(&jx, y) + self.nab(x, &my) - self.nab(y, &mx)))
    }

    fn rel3(&self, x: &V, y: &V) -> Fib {
        let (jx, jy) = (self.jv(x), self.jv(y));
        let (mx, my) = (self.mu(x), self.mu(y));
        self.rr(&jx, &jy) - self.rr(x, y) + self.nab(&jx, &my) - self.nab(&jy, &mx) + self.br(&mx, &my)
            - self.mu(&vsub(self.lie(x, &jy), self.lie(y, &jx)))
            + self.nu(&self.hc_part(x, y))
            + self.nu(&self.rmu_form(x, y)).times(2)
            - self.av(&self.rmu_fiber(x, y))
    }

    fn lie_bb(&self, xi: &F, eta: &F) -> F {
        let (bx, by) = (self.bv(xi), self.bv(eta));
        self.lief(&bx, eta) - self.lief(&by, xi)
    }

    fn rel4(&self, xi: &F, eta: &F) -> V {
        let (bx, by) = (self.bv(xi), self.bv(eta));
        let out = vsub(self.lie(&bx, &by), self.bv(&self.lie_bb(xi, eta)));
        vadd(out, self.bv(&self.df(&self.bval(xi, eta))))
    }

    fn rel5(&self, xi: &F, eta: &F) -> F {
        let (bx, by) = (self.bv(xi), self.bv(eta));
        let (nx, ny) = (self.nu(xi), self.nu(eta));
        self.lief(&by, &self.jt(xi)) - self.lief(&bx, &self.jt(eta))
            + self.df(&self.bval(&self.jt(xi), eta))
            + self.jt(&(self.lie_bb(xi, eta) - self.df(&self.bval(xi, eta))))
            - ftimes(self.ir(&bx, &ny) - self.ir(&by, &nx), 2)
            + ftimes(self.nr(&nx, &ny), 2)
            + self.h(&bx, &by)
    }

    fn rel6(&self, xi: &F, eta: &F) -> Fib {
        let (bx, by) = (self.bv(xi), self.bv(eta));
        let (nx, ny) = (self.nu(xi), self.nu(eta));
        self.rr(&bx, &by) + self.nab(&bx, &ny) - self.nab(&by, &nx) + self.br(&nx, &ny)
            - self.nu(&(self.lie_bb(xi, eta) - self.df(&self.bval(xi, eta))))
    }

    /// `⟨i_{ν*r}R, s⟩ − ⟨i_{ν*s}R, r⟩ + ⟨(∇A)r, s⟩`.
    fn rr_form(&self, r: &Fib, s: &Fib) -> F {
        let (vr, vs) = (self.nus(r), self.nus(s));
        self.ir(&vr, s) - self.ir(&vs, r) + self.nar(r, s)
    }

    fn rel7(&self, r: &Fib, s: &Fib) -> V {
        let (vr, vs) = (self.nus(r), self.nus(s));
        let (ar, as_) = (self.av(r), self.av(s));
        let out = vsub(self.lie(&vr, &vs), vtimes(self.bv(&self.rr_form(r, s)), 2));
        let g = self.br(&ar, s) - self.br(&as_, r) - self.nab(&vr, s) + self.nab(&vs, r);
        vadd(out, self.nus(&g))
    }

    fn rel8(&self, r: &Fib, s: &Fib) -> F {
        let (vr, vs) = (self.nus(r), self.nus(s));
        let (ar, as_) = (self.av(r), self.av(s));
        // ⟨μ*r, ν*s⟩ is the scalar product of E: ½ (μ*r)(ν*s).
        let musr_nuss = pair(&self.mus(r), &vs);
        self.h(&vr, &vs) + self.lief(&vr, &self.mus(s)) - self.lief(&vs, &self.mus(r))
            + self.df(&musr_nuss)
            + ftimes(self.ir(&vr, &as_) - self.ir(&vs, &ar) + self.nr(&ar, &as_) - self.nr(r, s), 2)
            + ftimes(self.jt(&self.rr_form(r, s)), 2)
            + self.mus(&(self.br(&ar, s) + self.br(r, &as_) - self.nab(&vr, s) + self.nab(&vs, r)))
    }

    fn rel9(&self, r: &Fib, s: &Fib) -> Fib {
        let (vr, vs) = (self.nus(r), self.nus(s));
        let (ar, as_) = (self.av(r), self.av(s));
        self.br(&ar, &as_) - self.br(r, s) - self.av(&(self.br(&ar, s) + self.br(r, &as_)))
            - self.na(&vr, s)
            + self.na(&vs, r)
            + self.rr(&vr, &vs)
            - self.nu(&self.rr_form(r, s)).times(2)
    }

    fn rel10(&self, x: &V, xi: &F) -> V {
        let (jx, bx) = (self.jv(x), self.bv(xi));
        let nx = self.nu(xi);
        let mut out = vsub(self.lie(&jx, &bx), self.bv(&self.lief(&jx, xi)));
        out = vsub(out, self.jv(&self.lie(x, &bx)));
        out = vadd(out, self.bv(&self.lief(x, &self.jt(xi))));
        out = vadd(out, self.bv(&(self.h(&bx, x) + ftimes(self.ir(x, &nx), 2))));
        vadd(out, self.nus(&(self.nab(x, &nx) + self.rr(x, &bx))))
    }

    fn rel11(&self, x: &V, xi: &F) -> F {
        let (jx, bx) = (self.jv(x), self.bv(xi));
        let (mx, nx) = (self.mu(x), self.nu(xi));
        self.h(&jx, &bx) + self.jt(&self.h(x, &bx)) - self.lief(&jx, &self.jt(xi)) - self.lief(x, xi)
            + self.jt(&(self.lief(&jx, xi) - self.lief(x, &self.jt(xi))))
            + self.dch(x, &bx)
            - self.lief(x, &self.cv(&bx))
            + ftimes(self.ir(&bx, &mx) - self.ir(&jx, &nx), 2)
            + ftimes(self.nr(&mx, &nx), 2)
            - ftimes(self.jt(&self.ir(x, &nx)), 2)
            + self.mus(&(self.nab(x, &nx) + self.rr(x, &bx)))
    }

    fn rel12(&self, x: &V, xi: &F) -> Fib {
        let (jx, bx) = (self.jv(x), self.bv(xi));
        let (mx, nx) = (self.mu(x), self.nu(xi));
        self.nab(&jx, &nx) - self.nu(&self.lief(&jx, xi)) - self.nab(&bx, &mx) - self.mu(&self.lie(x, &bx))
            + self.br(&mx, &nx)
            - self.nu(&(self.h(x, &bx) - self.lief(x, &self.jt(xi)) - ftimes(self.ir(x, &nx), 2)))
            - self.av(&(self.nab(x, &nx) + self.rr(x, &bx)))
            + self.rr(&jx, &bx)
    }

    /// `⟨i_{Bξ}R, r⟩ + ⟨∇r, νξ⟩`.
    fn rb_form(&self, r: &Fib, xi: &F) -> F {
        self.ir(&self.bv(xi), r) + self.nr(r, &self.nu(xi))
    }

    fn rel13(&self, r: &Fib, xi: &F) -> V {
        let (vr, bx) = (self.nus(r), self.bv(xi));
        let nx = self.nu(xi);
        let out = vadd(self.lie_b(&vr, xi), vtimes(self.bv(&self.rb_form(r, xi)), 2));
        vadd(out, self.nus(&(self.nab(&bx, r) - self.br(r, &nx))))
    }

    fn rel14(&self, r: &Fib, xi: &F) -> F {
        let (vr, bx) = (self.nus(r), self.bv(xi));
        let nx = self.nu(xi);
        let ar = self.av(r);
        let msr = self.mus(r);
        self.lief(&bx, &msr) + self.df(&self.bval(&msr, xi)) - self.mus(&self.nab(&bx, r))
            + self.h(&bx, &vr)
            + self.lie_jt(&vr, xi)
            + ftimes(self.ir(&vr, &nx), 2)
            + ftimes(self.ir(&bx, &ar), 2)
            + ftimes(self.nr(&ar, &nx), 2)
            + ftimes(self.jt(&self.rb_form(r, xi)), 2)
            + self.mus(&self.br(r, &nx))
    }

    fn rel15(&self, r: &Fib, xi: &F) -> Fib {
        let (vr, bx) = (self.nus(r), self.bv(xi));
        let nx = self.nu(xi);
        let ar = self.av(r);
        // 2ν(... − ½ℒ_{ν*r}ξ): the half is applied before doubling.
        let inner = ftimes(self.rb_form(r, xi), 2) - self.lief(&vr, xi);
        self.rr(&vr, &bx) + self.nab(&vr, &nx) + self.na(&bx, r) - self.br(&ar, &nx)
            + self.av(&self.br(r, &nx))
            + self.nu(&inner)
    }

    fn rel16(&self, r: &Fib, x: &V) -> V {
        let (vr, jx) = (self.nus(r), self.jv(x));
        let (ar, mx) = (self.av(r), self.mu(x));
        let mut out = vsub(self.lie(&jx, &vr), self.jv(&self.lie(x, &vr)));
        out = vsub(out, vtimes(self.bv(&(self.ir(&jx, r) + self.ir(x, &ar))), 2));
        let g = self.nab(&jx, r) + self.nab(x, &ar) + self.br(&mx, r) - self.rr(x, &vr);
        out = vsub(out, self.nus(&g));
        let f = self.h(x, &vr) + self.lief(x, &self.mus(r)) - ftimes(self.nr(&mx, r), 2);
        vsub(out, self.bv(&f))
    }

    fn rel17(&self, r: &Fib, x: &V) -> F {
        let (vr, jx) = (self.nus(r), self.jv(x));
        let (ar, mx) = (self.av(r), self.mu(x));
        let msr = self.mus(r);
        self.h(&vr, &jx) - self.jt(&self.h(x, &vr)) - self.lief(&jx, &msr) - self.jt(&self.lief(x, &msr))
            - ftimes(self.ir(&jx, &ar), 2)
            + ftimes(self.ir(x, r), 2)
            - ftimes(self.jt(&(self.ir(x, &ar) + self.ir(&jx, r))), 2)
            + self.dch(&vr, x)
            + self.lief(x, &self.cv(&vr))
            - ftimes(self.ir(&vr, &mx), 2)
            + ftimes(self.nr(&mx, &ar), 2)
            + ftimes(self.jt(&self.nr(&mx, r)), 2)
            + self.mus(&(self.nab(&jx, r) + self.nab(x, &ar) + self.br(&mx, r) - self.rr(x, &vr)))
    }

    fn rel18(&self, r: &Fib, x: &V) -> Fib {
        let (vr, jx) = (self.nus(r), self.jv(x));
        let (ar, mx) = (self.av(r), self.mu(x));
        self.rr(&vr, &jx) + self.nu(&(self.ir(x, &ar) + self.ir(&jx, r))).times(2) - self.av(&self.rr(&vr, x))
            + self.na(&jx, r)
            - self.nab(x, r)
            - self.av(&self.nab(x, &ar))
            + self.nab(&vr, &mx)
            - self.mu(&self.lie(&vr, x))
            + self.br(&mx, &ar)
            - self.av(&self.br(&mx, r))
            + self.nu(&(self.h(x, &vr) + self.lief(x, &self.mus(r)) - ftimes(self.nr(&mx, r), 2)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::canonical_symplectic;

    #[test]
    fn suites_contain_valid_indices() {
        assert!(SUITE_10.iter().all(|k| (1..=18).contains(k)));
        for k in 1..=18 {
            let _ = relation_signature(k);
        }
    }

    #[test]
    fn constant_structure_is_integrable() {
        let (d, c) = canonical_symplectic(2, &Scalar::zero()).unwrap();
        assert!(integrability_18(&d, &c).unwrap().pass());
        assert!(integrability_10(&d, &c).unwrap().pass());
        let o = nijenhuis_oracle(&d, &c).unwrap();
        assert!(o.pass());
        assert_eq!(o.pairs_checked, 28);
        assert!(poisson_residual(&c).unwrap().is_zero());
    }
}
