//! Standard Courant algebroids `TM + T*M + G` over a polynomial chart:
//! defining data, scalar product and Dorfman bracket.

use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::Q;
use crate::matrix::Matrix;
use crate::quadlie::QuadLieAlgebra;
use crate::symcalc::{constant_matrix, increasing_tuples, is_zero_column, Chart, FiberValuedForm, KForm, VectorField};
use crate::{PolyMatrix, Scalar};

/// Trivialized quadratic Lie algebra bundle with connection `∇_X r = X(r) + Ω(X) r`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraBundle {
    chart: Chart,
    fiber: QuadLieAlgebra,
    connection: Vec<PolyMatrix>,
}

/// Where a connection coefficient fails to be a metric derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionDefects {
    /// `(coordinate, i, j)`: `Ω_a [e_i, e_j] != [Ω_a e_i, e_j] + [e_i, Ω_a e_j]`, 0-based.
    pub derivation: Vec<(usize, usize, usize)>,
    /// Coordinates where `g Ω_a + Ω_a^T g != 0`.
    pub metric: Vec<usize>,
}

impl ConnectionDefects {
    pub fn pass(&self) -> bool {
        self.derivation.is_empty() && self.metric.is_empty()
    }
}

impl LieAlgebraBundle {
    /// Bundle with the trivial connection.
    pub fn flat(chart: Chart, fiber: QuadLieAlgebra) -> Self {
        let n = chart.dim();
        let m = fiber.dim();
        LieAlgebraBundle { chart, fiber, connection: vec![Matrix::zeros(m, m); n] }
    }

    /// Validates shapes and the derivation/metric invariants.
    pub fn new(chart: Chart, fiber: QuadLieAlgebra, connection: Vec<PolyMatrix>) -> Result<Self> {
        let b = Self::new_unchecked(chart, fiber, connection)?;
        let defects = b.connection_defects();
        if !defects.pass() {
            return Err(Error::Precondition(format!(
                "connection is not a metric derivation (derivation defects {:?}, metric defects {:?})",
                defects.derivation, defects.metric
            )));
        }
        Ok(b)
    }

    /// Shape checks only.
    pub fn new_unchecked(chart: Chart, fiber: QuadLieAlgebra, connection: Vec<PolyMatrix>) -> Result<Self> {
        let n = chart.dim();
        let m = fiber.dim();
        if connection.len() != n {
            return Err(Error::ChartMismatch(n, connection.len()));
        }
        for om in &connection {
            if om.rows() != m || om.cols() != m {
                return Err(Error::Shape(format!(
                    "connection coefficient is {}x{}, fiber dimension is {m}",
                    om.rows(),
                    om.cols()
                )));
            }
        }
        Ok(LieAlgebraBundle { chart, fiber, connection })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn fiber(&self) -> &QuadLieAlgebra {
        &self.fiber
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber.dim()
    }

    pub fn connection(&self) -> &[PolyMatrix] {
        &self.connection
    }

    /// Metric of the fiber as constant polynomials.
    pub fn metric(&self) -> PolyMatrix {
        constant_matrix(&self.fiber.metric)
    }

    pub fn connection_defects(&self) -> ConnectionDefects {
        let l = &self.fiber.algebra;
        let g = self.metric();
        let mut derivation = Vec::new();
        let mut metric = Vec::new();
        for (a, om) in self.connection.iter().enumerate() {
            derivation.extend(l.derivation_defects(om).into_iter().map(|(i, j)| (a, i, j)));
            if !(&(&g * om) + &(&om.transpose() * &g)).is_zero() {
                metric.push(a);
            }
        }
        ConnectionDefects { derivation, metric }
    }

    /// `Ω(X) = Σ X^a Ω_a`.
    pub fn omega(&self, x: &VectorField) -> PolyMatrix {
        let m = self.fiber_dim();
        let mut out = Matrix::zeros(m, m);
        for (xa, om) in x.components().iter().zip(&self.connection) {
            if !xa.is_zero() {
                out = &out + &om.scale(xa);
            }
        }
        out
    }

    /// Covariant derivative `∇_X r`.
    pub fn nabla(&self, x: &VectorField, r: &[Scalar]) -> Vec<Scalar> {
        let om = self.omega(x).apply(r);
        r.iter().zip(om).map(|(ri, oi)| x.apply(ri) + oi).collect()
    }

    /// `∇_{∂_a} r`.
    pub fn nabla_coord(&self, a: usize, r: &[Scalar]) -> Vec<Scalar> {
        let om = self.connection[a].apply(r);
        r.iter().zip(om).map(|(ri, oi)| ri.derivative(a) + oi).collect()
    }

    /// Covariant exterior derivative `d^∇ α = dα + Ω∧α`.
    pub fn d_nabla(&self, alpha: &FiberValuedForm) -> FiberValuedForm {
        let n = self.dim();
        let mut out = alpha.d_total();
        for (a, om) in self.connection.iter().enumerate() {
            if om.is_zero() {
                continue;
            }
            let mapped = alpha.map_fiber(om).expect("fiber dimension checked");
            out = &out + &mapped.wedge_left(&KForm::basis(n, &[a]));
        }
        out
    }

    /// Curvature `R^∇_{ab} = ∂_a Ω_b − ∂_b Ω_a + [Ω_a, Ω_b]` for `a < b`.
    pub fn curvature(&self) -> Vec<((usize, usize), PolyMatrix)> {
        let n = self.dim();
        let om = &self.connection;
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let c = &(&om[b].derivative(a) - &om[a].derivative(b)) + &om[a].commutator(&om[b]);
                out.push(((a, b), c));
            }
        }
        out
    }

    pub fn bracket(&self, r: &[Scalar], s: &[Scalar]) -> Vec<Scalar> {
        self.fiber.algebra.bracket(r, s)
    }

    pub fn pairing(&self, r: &[Scalar], s: &[Scalar]) -> Scalar {
        self.fiber.pairing(r, s)
    }

    /// `[α∧β]_G`: wedge of fiber-valued forms combined through the bracket.
    pub fn bracket_wedge(&self, alpha: &FiberValuedForm, beta: &FiberValuedForm) -> FiberValuedForm {
        let n = self.dim();
        let m = self.fiber_dim();
        let l = &self.fiber.algebra;
        let mut out = FiberValuedForm::zero(n, m, alpha.degree() + beta.degree());
        let mut parts: Vec<KForm> = out.parts().to_vec();
        for (i, j, k, c) in l.nonzero_constants() {
            let w = alpha.part(i).wedge_total(beta.part(j));
            if !w.is_zero() {
                parts[k] = &parts[k] + &w.map_coeffs(|p| p.scale(&c));
            }
        }
        out = FiberValuedForm::from_parts(n, out.degree(), parts).expect("consistent parts");
        out
    }

    /// The 2-form `(X, Y) ↦ [Φ(X), Φ(Y)]` of a fiber-valued 1-form.
    pub fn bracket_square(&self, phi: &FiberValuedForm) -> FiberValuedForm {
        let n = self.dim();
        let m = self.fiber_dim();
        let mut out = FiberValuedForm::zero(n, m, 2);
        for t in increasing_tuples(n, 2) {
            let v = self.bracket(&phi.column(&[t[0]]), &phi.column(&[t[1]]));
            for (a, c) in v.iter().enumerate() {
                out.add_component(&t, a, c);
            }
        }
        out
    }
}

/// A section `X + ξ + r` of `TM + T*M + G`.
#[derive(Clone, PartialEq)]
pub struct Section {
    pub x: VectorField,
    pub xi: KForm,
    pub r: Vec<Scalar>,
}

impl std::fmt::Debug for Section {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Section").field("x", &self.x).field("xi", &self.xi).field("r", &self.r).finish()
    }
}

impl Section {
    pub fn new(x: VectorField, xi: KForm, r: Vec<Scalar>) -> Result<Self> {
        let n = x.dim();
        if xi.dim() != n {
            return Err(Error::ChartMismatch(n, xi.dim()));
        }
        if xi.degree() != 1 {
            return Err(Error::Degree { degree: xi.degree(), dim: 1 });
        }
        Ok(Section { x, xi, r })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        Section { x: VectorField::zero(n), xi: KForm::zero(n, 1), r: vec![Scalar::zero(); m] }
    }

    pub fn tangent(x: VectorField, m: usize) -> Self {
        let n = x.dim();
        Section { x, xi: KForm::zero(n, 1), r: vec![Scalar::zero(); m] }
    }

    pub fn cotangent(xi: KForm, m: usize) -> Self {
        let n = xi.dim();
        Section { x: VectorField::zero(n), xi, r: vec![Scalar::zero(); m] }
    }

    pub fn fiber(n: usize, r: Vec<Scalar>) -> Self {
        Section { x: VectorField::zero(n), xi: KForm::zero(n, 1), r }
    }

    /// Frame `∂_1..∂_n, dx^1..dx^n, e_1..e_m`.
    pub fn frame(n: usize, m: usize) -> Vec<Section> {
        let mut out = Vec::with_capacity(2 * n + m);
        for i in 0..n {
            out.push(Self::tangent(VectorField::coordinate(n, i), m));
        }
        for i in 0..n {
            out.push(Self::cotangent(KForm::basis(n, &[i]), m));
        }
        for a in 0..m {
            let mut r = vec![Scalar::zero(); m];
            r[a] = Scalar::one();
            out.push(Self::fiber(n, r));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.r.len()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.xi.is_zero() && is_zero_column(&self.r)
    }

    /// Component column in the frame order of [`Section::frame`].
    pub fn to_column(&self) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = self.x.components().to_vec();
        out.extend(self.xi.coefficients().iter().cloned());
        out.extend(self.r.iter().cloned());
        out
    }

    pub fn from_column(n: usize, m: usize, col: &[Scalar]) -> Result<Self> {
        if col.len() != 2 * n + m {
            return Err(Error::Shape(format!("section column has length {}, expected {}", col.len(), 2 * n + m)));
        }
        Ok(Section {
            x: VectorField::new(col[..n].to_vec()),
            xi: KForm::one_form(col[n..2 * n].to_vec()),
            r: col[2 * n..].to_vec(),
        })
    }

    pub fn scale(&self, f: &Scalar) -> Self {
        Section { x: self.x.scale(f), xi: self.xi.scale(f), r: self.r.iter().map(|c| c * f).collect() }
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        self.scale(&Scalar::constant(c.clone()))
    }

    pub fn eval_at(&self, p: &[Q]) -> Result<Vec<Q>> {
        self.to_column().iter().map(|c| c.eval(p)).collect()
    }

    fn check(&self, n: usize, m: usize) -> Result<()> {
        if self.dim() != n || self.xi.dim() != n {
            return Err(Error::ChartMismatch(n, self.dim()));
        }
        if self.fiber_dim() != m {
            return Err(Error::FiberMismatch(m, self.fiber_dim()));
        }
        Ok(())
    }
}

impl Add for &Section {
    type Output = Section;
    fn add(self, o: &Section) -> Section {
        Section { x: &self.x + &o.x, xi: &self.xi + &o.xi, r: self.r.iter().zip(&o.r).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Section {
    type Output = Section;
    fn sub(self, o: &Section) -> Section {
        Section { x: &self.x - &o.x, xi: &self.xi - &o.xi, r: self.r.iter().zip(&o.r).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Section {
    type Output = Section;
    fn neg(self) -> Section {
        Section { x: -&self.x, xi: -&self.xi, r: self.r.iter().map(|a| -a).collect() }
    }
}

impl Add for Section {
    type Output = Section;
    fn add(self, o: Section) -> Section {
        &self + &o
    }
}

impl Sub for Section {
    type Output = Section;
    fn sub(self, o: Section) -> Section {
        &self - &o
    }
}

impl Neg for Section {
    type Output = Section;
    fn neg(self) -> Section {
        -&self
    }
}

/// Defining data `(∇, R, H)` of a standard Courant algebroid.
#[derive(Clone, Debug, PartialEq)]
pub struct CourantData {
    pub bundle: LieAlgebraBundle,
    pub r: FiberValuedForm,
    pub h: KForm,
}

/// Residuals of the three defining conditions; all zero on valid data.
#[derive(Clone, Debug)]
pub struct DefiningDataReport {
    /// `R^∇_{ab} − ad_{R_{ab}}` for `a < b`, only the nonzero ones.
    pub curvature: Vec<((usize, usize), PolyMatrix)>,
    /// `d^∇ R`.
    pub bianchi: FiberValuedForm,
    /// `dH − ⟨R∧R⟩`.
    pub h_closure: KForm,
}

impl DefiningDataReport {
    pub fn curvature_ok(&self) -> bool {
        self.curvature.is_empty()
    }

    pub fn bianchi_ok(&self) -> bool {
        self.bianchi.is_zero()
    }

    pub fn h_ok(&self) -> bool {
        self.h_closure.is_zero()
    }

    pub fn pass(&self) -> bool {
        self.curvature_ok() && self.bianchi_ok() && self.h_ok()
    }
}

impl CourantData {
    pub fn new(bundle: LieAlgebraBundle, r: FiberValuedForm, h: KForm) -> Result<Self> {
        let n = bundle.dim();
        let m = bundle.fiber_dim();
        if r.dim() != n {
            return Err(Error::ChartMismatch(n, r.dim()));
        }
        if h.dim() != n {
            return Err(Error::ChartMismatch(n, h.dim()));
        }
        if r.fiber_dim() != m {
            return Err(Error::FiberMismatch(m, r.fiber_dim()));
        }
        if r.degree() != 2 {
            return Err(Error::Shape(format!("R must be a 2-form, got degree {}", r.degree())));
        }
        if h.degree() != 3 {
            return Err(Error::Shape(format!("H must be a 3-form, got degree {}", h.degree())));
        }
        Ok(CourantData { bundle, r, h })
    }

    /// `R = 0`, `H = 0`, flat connection.
    pub fn untwisted(chart: Chart, fiber: QuadLieAlgebra) -> Self {
        let n = chart.dim();
        let m = fiber.dim();
        CourantData { bundle: LieAlgebraBundle::flat(chart, fiber), r: FiberValuedForm::zero(n, m, 2), h: KForm::zero(n, 3) }
    }

    pub fn dim(&self) -> usize {
        self.bundle.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.bundle.fiber_dim()
    }

    pub fn check_defining_data(&self) -> DefiningDataReport {
        let l = &self.bundle.fiber.algebra;
        let mut curvature = Vec::new();
        for ((a, b), rn) in self.bundle.curvature() {
            let res = &rn - &l.ad(&self.r.column(&[a, b]));
            if !res.is_zero() {
                curvature.push(((a, b), res));
            }
        }
        let bianchi = self.bundle.d_nabla(&self.r);
        let rr = crate::symcalc::pairing_wedge(&self.r, &self.r, &self.bundle.fiber.metric).expect("same fiber");
        let h_closure = &self.h.d_total() - &rr;
        DefiningDataReport { curvature, bianchi, h_closure }
    }

    /// `⟨u, v⟩ = ½(η(X) + ξ(Y)) + ⟨r, s⟩_G`.
    pub fn scalar_product(&self, u: &Section, v: &Section) -> Result<Scalar> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.pairing_unchecked(u, v))
    }

    fn pairing_unchecked(&self, u: &Section, v: &Section) -> Scalar {
        let half = Scalar::constant(crate::field::qr(1, 2));
        let mut s = Scalar::zero();
        for i in 0..self.dim() {
            s += &(&v.xi.coefficients()[i] * &u.x.components()[i]);
            s += &(&u.xi.coefficients()[i] * &v.x.components()[i]);
        }
        &(&s * &half) + &self.bundle.pairing(&u.r, &v.r)
    }

    /// Dorfman bracket. Computed whether or not the defining data pass.
    pub fn dorfman(&self, u: &Section, v: &Section) -> Result<Section> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.dorfman_unchecked(u, v))
    }

    fn dorfman_unchecked(&self, u: &Section, v: &Section) -> Section {
        let n = self.dim();
        let b = &self.bundle;
        let (x, xi, r) = (&u.x, &u.xi, &u.r);
        let (y, eta, s) = (&v.x, &v.xi, &v.r);
        let two = Scalar::from_i64(2);

        let tm = x.bracket(y).expect("same chart");

        let mut ct = eta.lie_derivative(x).expect("same chart");
        ct = &ct - &xi.d_total().interior(y).expect("same chart");
        if !self.h.is_zero() {
            let h_xy = self.h.interior(x).and_then(|w| w.interior(y)).expect("same chart");
            ct = &ct + &h_xy;
        }
        let ix_r = self.r.interior(x).expect("same chart").to_matrix();
        let iy_r = self.r.interior(y).expect("same chart").to_matrix();
        let mut extra = Vec::with_capacity(n);
        for c in 0..n {
            let rxc = ix_r.column(c);
            let ryc = iy_r.column(c);
            let nab = b.nabla_coord(c, r);
            let val = &(&b.pairing(&ryc, r) - &b.pairing(&rxc, s)) + &b.pairing(&nab, s);
            extra.push(&val * &two);
        }
        ct = &ct + &KForm::one_form(extra);

        let nx_s = b.nabla(x, s);
        let ny_r = b.nabla(y, r);
        let rxy = self.r.interior(x).and_then(|w| w.interior(y)).expect("same chart");
        let rxy = rxy.parts().iter().map(|p| p.as_function());
        let br = b.bracket(r, s);
        let fib = nx_s.iter().zip(&ny_r).zip(rxy).zip(&br).map(|(((a, bb), c), d)| &(&(a - bb) + &c) + d).collect();

        Section { x: tm, xi: ct, r: fib }
    }

    /// `[u,[v,w]] − [[u,v],w] − [v,[u,w]]`.
    pub fn jacobi_residual(&self, u: &Section, v: &Section, w: &Section) -> Result<Section> {
        self.check(u)?;
        self.check(v)?;
        self.check(w)?;
        let d = |a: &Section, b: &Section| self.dorfman_unchecked(a, b);
        let lhs = d(u, &d(v, w));
        let r1 = d(&d(u, v), w);
        let r2 = d(v, &d(u, w));
        Ok(&(&lhs - &r1) - &r2)
    }

    /// `d f` as a section.
    pub fn d_section(&self, f: &Scalar) -> Section {
        Section::cotangent(KForm::differential(self.dim(), f), self.fiber_dim())
    }

    fn check(&self, u: &Section) -> Result<()> {
        u.check(self.dim(), self.fiber_dim())
    }
}

/// First nonzero residual of each algebroid axiom found over random section tuples.
#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub trials: usize,
    /// `[u,v] + [v,u] − 2d⟨u,v⟩`.
    pub symmetrization: Option<Section>,
    /// `π[u,v] − [πu, πv]`.
    pub anchor: Option<VectorField>,
    /// `πu⟨v,w⟩ − ⟨[u,v],w⟩ − ⟨v,[u,w]⟩`.
    pub metric: Option<Scalar>,
    /// `[u,fv] − f[u,v] − (πu f)v`.
    pub leibniz: Option<Section>,
    pub jacobi: Option<Section>,
}

impl AxiomReport {
    pub fn flags(&self) -> [(&'static str, bool); 5] {
        [
            ("symmetrization", self.symmetrization.is_none()),
            ("anchor", self.anchor.is_none()),
            ("metric compatibility", self.metric.is_none()),
            ("Leibniz", self.leibniz.is_none()),
            ("Jacobi", self.jacobi.is_none()),
        ]
    }

    pub fn pass(&self) -> bool {
        self.flags().iter().all(|(_, ok)| *ok)
    }
}

fn random_section<R: rand::Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Section {
    Section {
        x: crate::random::vector_field(rng, n, 1),
        xi: crate::random::form(rng, n, 1, 1),
        r: crate::random::column(rng, n, m, 1),
    }
}

fn keep<T>(slot: &mut Option<T>, v: T, zero: bool) {
    if slot.is_none() && !zero {
        *slot = Some(v);
    }
}

/// Checks the algebroid axioms on `trials` random tuples of sections with affine coefficients.
pub fn dorfman_axioms<R: rand::Rng + ?Sized>(d: &CourantData, rng: &mut R, trials: usize) -> AxiomReport {
    let (n, m) = (d.dim(), d.fiber_dim());
    let mut rep = AxiomReport { trials, ..Default::default() };
    let two = Scalar::from_i64(2);
    for _ in 0..trials {
        let (u, v, w) = (random_section(rng, n, m), random_section(rng, n, m), random_section(rng, n, m));
        let f = crate::random::poly(rng, n, 2, 3);
        let uv = d.dorfman_unchecked(&u, &v);
        let vu = d.dorfman_unchecked(&v, &u);
        let uw = d.dorfman_unchecked(&u, &w);
        let sym = &(&uv + &vu) - &d.d_section(&(&d.pairing_unchecked(&u, &v) * &two));
        keep(&mut rep.symmetrization, sym.clone(), sym.is_zero());
        let anchor = &uv.x - &u.x.bracket(&v.x).expect("same chart");
        keep(&mut rep.anchor, anchor.clone(), anchor.is_zero());
        let metric = &(&u.x.apply(&d.pairing_unchecked(&v, &w)) - &d.pairing_unchecked(&uv, &w)) - &d.pairing_unchecked(&v, &uw);
        keep(&mut rep.metric, metric.clone(), metric.is_zero());
        let fv = v.scale(&f);
        let leib = &(&d.dorfman_unchecked(&u, &fv) - &uv.scale(&f)) - &v.scale(&u.x.apply(&f));
        keep(&mut rep.leibniz, leib.clone(), leib.is_zero());
        let jac = d.jacobi_residual(&u, &v, &w).expect("same shapes");
        keep(&mut rep.jacobi, jac.clone(), jac.is_zero());
    }
    rep
}

/// First frame triple `(i, j, k)` (indices into [`Section::frame`]) with nonzero Jacobi residual.
pub fn jacobi_frame_scan(d: &CourantData) -> Option<(usize, usize, usize)> {
    let frame = Section::frame(d.dim(), d.fiber_dim());
    let len = frame.len();
    (0..len * len * len).map(|t| (t / (len * len), (t / len) % len, t % len)).find(|&(i, j, k)| {
        !d.jacobi_residual(&frame[i], &frame[j], &frame[k]).expect("frame shapes").is_zero()
    })
}
