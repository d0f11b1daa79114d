//! Exterior calculus and tensor algebra with polynomial coefficients on a
//! single coordinate chart.
//!
//! Forms use the unnormalized shuffle convention: `dx^I` evaluated on
//! coordinate vectors is a determinant, so `(dx1^dx2)(d1, d2) = 1` and
//! `(a^b)(X, Y) = a(X) b(Y) - a(Y) b(X)` for one-forms.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Field, Q};
use crate::matrix::Matrix;
use crate::poly::Poly;

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() || names.len() > MAX_DIM {
            return Err(Error::Chart(format!(
                "dimension {} outside 1..={MAX_DIM}",
                names.len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            let ok = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::Chart(format!("invalid coordinate name {name:?}")));
            }
            if names[..i].contains(name) {
                return Err(Error::Chart(format!("duplicate coordinate name {name:?}")));
            }
        }
        Ok(Chart { names })
    }

    /// Coordinates `x1, ..., xn`.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("x{i}")).collect())
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parse<F: Field>(&self, src: &str) -> Result<Poly<F>> {
        Poly::parse(src, &self.names)
    }
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All strictly increasing `k`-tuples from `0..n`, in lexicographic order.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(binom(n, k));
    rec(n, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Lexicographic rank of a strictly increasing tuple among all tuples of
/// the same length drawn from `0..n`.
pub fn tuple_index(n: usize, tuple: &[usize]) -> usize {
    let k = tuple.len();
    let mut rank = 0;
    let mut next = 0;
    for (t, &c) in tuple.iter().enumerate() {
        for j in next..c {
            rank += binom(n - 1 - j, k - 1 - t);
        }
        next = c + 1;
    }
    rank
}

/// Sorts an index list. Returns the sorted list and whether the sorting
/// permutation is odd, or `None` if an index repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, odd))
}

fn signed<F: Field>(p: Poly<F>, odd: bool) -> Poly<F> {
    if odd {
        -p
    } else {
        p
    }
}

/// Differential `k`-form; coefficients stored densely over increasing tuples.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KForm<F: Field = Q> {
    n: usize,
    k: usize,
    coeffs: Vec<Poly<F>>,
}

impl<F: Field> KForm<F> {
    /// Zero form; degrees above `n` give the (trivial) zero space.
    pub fn zero(n: usize, k: usize) -> Self {
        KForm { n, k, coeffs: vec![Poly::zero(); binom(n, k)] }
    }

    pub fn function(n: usize, f: Poly<F>) -> Self {
        KForm { n, k: 0, coeffs: vec![f] }
    }

    /// Builds a form from `(index list, coefficient)` terms; index lists may
    /// be in any order and are antisymmetrized.
    pub fn from_terms(n: usize, k: usize, terms: impl IntoIterator<Item = (Vec<usize>, Poly<F>)>) -> Result<Self> {
        if k > n {
            return Err(Error::Degree { degree: k, dim: n });
        }
        let mut out = Self::zero(n, k);
        for (idx, c) in terms {
            if idx.len() != k {
                return Err(Error::Shape(format!("index list {idx:?} for a {k}-form")));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
                return Err(Error::Shape(format!("index {} out of range for dimension {n}", bad + 1)));
            }
            out.add_component(&idx, &c);
        }
        Ok(out)
    }

    /// `dx^{i1} ^ ... ^ dx^{ik}` (0-based indices, any order).
    pub fn basis(n: usize, idx: &[usize]) -> Self {
        let mut out = Self::zero(n, idx.len());
        out.add_component(idx, &Poly::one());
        out
    }

    pub fn one_form(comps: Vec<Poly<F>>) -> Self {
        KForm { n: comps.len(), k: 1, coeffs: comps }
    }

    /// `sum_i df/dx^i dx^i`.
    pub fn differential(n: usize, f: &Poly<F>) -> Self {
        Self::one_form((0..n).map(|i| f.derivative(i)).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Coefficient on an arbitrary index list (signed; zero on repeats).
    pub fn component(&self, idx: &[usize]) -> Poly<F> {
        assert_eq!(idx.len(), self.k);
        match sort_with_sign(idx) {
            Some((sorted, odd)) => signed(self.coeffs[tuple_index(self.n, &sorted)].clone(), odd),
            None => Poly::zero(),
        }
    }

    /// Adds `c` to the coefficient of `dx^idx` (any order).
    pub fn add_component(&mut self, idx: &[usize], c: &Poly<F>) {
        if c.is_zero() {
            return;
        }
        if let Some((sorted, odd)) = sort_with_sign(idx) {
            let slot = &mut self.coeffs[tuple_index(self.n, &sorted)];
            if odd {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
    }

    /// Coefficients in lexicographic tuple order.
    pub fn coefficients(&self) -> &[Poly<F>] {
        &self.coeffs
    }

    /// Nonzero `(tuple, coefficient)` pairs.
    pub fn terms(&self) -> Vec<(Vec<usize>, &Poly<F>)> {
        increasing_tuples(self.n, self.k)
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// The 0-form as a function.
    pub fn as_function(&self) -> Poly<F> {
        assert_eq!(self.k, 0);
        self.coeffs[0].clone()
    }

    pub fn scale(&self, f: &Poly<F>) -> Self {
        KForm { n: self.n, k: self.k, coeffs: self.coeffs.iter().map(|c| c * f).collect() }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly<F>) -> Poly<F>) -> Self {
        KForm { n: self.n, k: self.k, coeffs: self.coeffs.iter().map(f).collect() }
    }

    fn check_chart(&self, other_n: usize) -> Result<()> {
        if self.n != other_n {
            return Err(Error::ChartMismatch(self.n, other_n));
        }
        Ok(())
    }

    pub fn wedge(&self, other: &KForm<F>) -> Result<KForm<F>> {
        self.check_chart(other.n)?;
        let k = self.k + other.k;
        if k > self.n {
            return Err(Error::Degree { degree: k, dim: self.n });
        }
        Ok(self.wedge_total(other))
    }

    /// Wedge product that yields the zero form above the chart dimension.
    pub fn wedge_total(&self, other: &KForm<F>) -> KForm<F> {
        assert_eq!(self.n, other.n, "chart mismatch in wedge");
        let k = self.k + other.k;
        let mut out = Self::zero(self.n, k);
        let right = other.terms();
        for (i, a) in self.terms() {
            for (j, b) in &right {
                if i.iter().any(|x| j.contains(x)) {
                    continue;
                }
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                out.add_component(&idx, &(a * *b));
            }
        }
        out
    }

    /// Exterior derivative; a top-degree input is an error.
    pub fn d(&self) -> Result<KForm<F>> {
        if self.k >= self.n {
            return Err(Error::Degree { degree: self.k + 1, dim: self.n });
        }
        Ok(self.d_total())
    }

    /// Exterior derivative that is zero on top-degree forms.
    pub fn d_total(&self) -> KForm<F> {
        let mut out = Self::zero(self.n, self.k + 1);
        for (idx, c) in self.terms() {
            for j in 0..self.n {
                if idx.contains(&j) {
                    continue;
                }
                let dc = c.derivative(j);
                if dc.is_zero() {
                    continue;
                }
                let mut full = Vec::with_capacity(idx.len() + 1);
                full.push(j);
                full.extend_from_slice(&idx);
                out.add_component(&full, &dc);
            }
        }
        out
    }

    /// Contraction in the first slot; a 0-form input is an error.
    pub fn interior(&self, x: &VectorField<F>) -> Result<KForm<F>> {
        self.check_chart(x.dim())?;
        if self.k == 0 {
            return Err(Error::Degree { degree: 0, dim: self.n });
        }
        let mut out = Self::zero(self.n, self.k - 1);
        for (idx, c) in self.terms() {
            for t in 0..idx.len() {
                let xi = &x.comps[idx[t]];
                if xi.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(t);
                let term = xi * c;
                out.add_component(&rest, &signed(term, t % 2 == 1));
            }
        }
        Ok(out)
    }

    /// Lie derivative along `x`, computed from `L_X dx^i = d(X^i)`.
    pub fn lie_derivative(&self, x: &VectorField<F>) -> Result<KForm<F>> {
        self.check_chart(x.dim())?;
        let mut out = self.map_coeffs(|c| x.apply(c));
        let dx: Vec<Vec<Poly<F>>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| x.comps[i].derivative(j)).collect())
            .collect();
        for (idx, c) in self.terms() {
            for t in 0..idx.len() {
                for (j, dxij) in dx[idx[t]].iter().enumerate() {
                    if dxij.is_zero() {
                        continue;
                    }
                    let mut moved = idx.clone();
                    moved[t] = j;
                    out.add_component(&moved, &(c * dxij));
                }
            }
        }
        Ok(out)
    }

    /// Value on `k` vector fields.
    pub fn eval_on(&self, xs: &[VectorField<F>]) -> Result<Poly<F>> {
        if xs.len() != self.k {
            return Err(Error::Arity { expected: self.k, found: xs.len() });
        }
        let mut acc = Poly::zero();
        for (idx, c) in self.terms() {
            let m = Matrix::from_fn(self.k, self.k, |r, s| xs[s].comps[idx[r]].clone());
            acc += &(c * &m.det());
        }
        Ok(acc)
    }

    /// Value on coordinate vector fields `d_{i1}, ..., d_{ik}`.
    pub fn eval_coords(&self, idx: &[usize]) -> Poly<F> {
        self.component(idx)
    }

    /// Coefficients at a point, in lexicographic tuple order.
    pub fn eval_at(&self, p: &[F]) -> Result<Vec<F>> {
        self.coeffs.iter().map(|c| c.eval(p)).collect()
    }

    /// A 2-form as the map `X -> i_X b`: entry `(b, a)` is `b(d_a, d_b)`.
    pub fn to_map(&self) -> Matrix<Poly<F>> {
        assert_eq!(self.k, 2, "to_map needs a 2-form");
        Matrix::from_fn(self.n, self.n, |b, a| self.component(&[a, b]))
    }

    /// Inverse of [`KForm::to_map`]; the matrix must be antisymmetric.
    pub fn from_map(m: &Matrix<Poly<F>>) -> Result<Self> {
        if !m.is_square() || !m.is_antisymmetric() {
            return Err(Error::Shape("a 2-form needs an antisymmetric square matrix".into()));
        }
        let n = m.rows();
        let mut out = Self::zero(n, 2);
        for t in increasing_tuples(n, 2) {
            out.add_component(&t, &m[(t[1], t[0])]);
        }
        Ok(out)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let terms = self.terms();
        if terms.is_empty() {
            return "0".into();
        }
        terms
            .iter()
            .map(|(idx, c)| {
                let basis: Vec<String> = idx
                    .iter()
                    .map(|&i| format!("d{}", names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1))))
                    .collect();
                if idx.is_empty() {
                    c.display_with(names)
                } else {
                    format!("({})*{}", c.display_with(names), basis.join("^"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl<F: Field> fmt::Debug for KForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

impl<F: Field> Add for &KForm<F> {
    type Output = KForm<F>;
    fn add(self, rhs: &KForm<F>) -> KForm<F> {
        assert_eq!((self.n, self.k), (rhs.n, rhs.k), "form sum shape mismatch");
        KForm { n: self.n, k: self.k, coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl<F: Field> Sub for &KForm<F> {
    type Output = KForm<F>;
    fn sub(self, rhs: &KForm<F>) -> KForm<F> {
        assert_eq!((self.n, self.k), (rhs.n, rhs.k), "form difference shape mismatch");
        KForm { n: self.n, k: self.k, coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl<F: Field> Neg for &KForm<F> {
    type Output = KForm<F>;
    fn neg(self) -> KForm<F> {
        self.map_coeffs(|c| -c)
    }
}

impl<F: Field> Add for KForm<F> {
    type Output = KForm<F>;
    fn add(self, rhs: KForm<F>) -> KForm<F> {
        &self + &rhs
    }
}

impl<F: Field> Sub for KForm<F> {
    type Output = KForm<F>;
    fn sub(self, rhs: KForm<F>) -> KForm<F> {
        &self - &rhs
    }
}

impl<F: Field> Neg for KForm<F> {
    type Output = KForm<F>;
    fn neg(self) -> KForm<F> {
        -&self
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorField<F: Field = Q> {
    comps: Vec<Poly<F>>,
}

impl<F: Field> VectorField<F> {
    pub fn new(comps: Vec<Poly<F>>) -> Self {
        VectorField { comps }
    }

    pub fn zero(n: usize) -> Self {
        VectorField { comps: vec![Poly::zero(); n] }
    }

    /// The coordinate field `d/dx^i` (0-based).
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.comps[i] = Poly::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Poly<F>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Poly<F>> {
        self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &Poly<F>) -> Poly<F> {
        let mut acc = Poly::zero();
        for (i, xi) in self.comps.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let df = f.derivative(i);
            if !df.is_zero() {
                acc += &(xi * &df);
            }
        }
        acc
    }

    /// Lie bracket `[X, Y]`.
    pub fn bracket(&self, y: &VectorField<F>) -> Result<VectorField<F>> {
        if self.dim() != y.dim() {
            return Err(Error::ChartMismatch(self.dim(), y.dim()));
        }
        Ok(VectorField {
            comps: (0..self.dim()).map(|i| &self.apply(&y.comps[i]) - &y.apply(&self.comps[i])).collect(),
        })
    }

    /// Lie derivative of a vector field, i.e. the bracket.
    pub fn lie_derivative(&self, y: &VectorField<F>) -> Result<VectorField<F>> {
        self.bracket(y)
    }

    /// `DX[i][j] = dX^i / dx^j`.
    pub fn jacobian(&self) -> Matrix<Poly<F>> {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| self.comps[i].derivative(j))
    }

    pub fn scale(&self, f: &Poly<F>) -> Self {
        VectorField { comps: self.comps.iter().map(|c| c * f).collect() }
    }

    pub fn eval_at(&self, p: &[F]) -> Result<Vec<F>> {
        self.comps.iter().map(|c| c.eval(p)).collect()
    }
}

impl<F: Field> fmt::Debug for VectorField<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.comps)
    }
}

impl<F: Field> Add for &VectorField<F> {
    type Output = VectorField<F>;
    fn add(self, rhs: &VectorField<F>) -> VectorField<F> {
        assert_eq!(self.dim(), rhs.dim());
        VectorField { comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect() }
    }
}

impl<F: Field> Sub for &VectorField<F> {
    type Output = VectorField<F>;
    fn sub(self, rhs: &VectorField<F>) -> VectorField<F> {
        assert_eq!(self.dim(), rhs.dim());
        VectorField { comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a - b).collect() }
    }
}

impl<F: Field> Neg for &VectorField<F> {
    type Output = VectorField<F>;
    fn neg(self) -> VectorField<F> {
        VectorField { comps: self.comps.iter().map(|c| -c).collect() }
    }
}

/// Which bundle a matrix field acts on or lands in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Tangent,
    Cotangent,
    Fiber,
}

/// Bundle map given by a matrix of polynomials; rows index the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoField<F: Field = Q> {
    pub source: Space,
    pub target: Space,
    pub matrix: Matrix<Poly<F>>,
}

impl<F: Field> EndoField<F> {
    pub fn new(source: Space, target: Space, matrix: Matrix<Poly<F>>) -> Self {
        EndoField { source, target, matrix }
    }

    pub fn identity(space: Space, n: usize) -> Self {
        EndoField { source: space, target: space, matrix: Matrix::identity(n) }
    }

    /// Checks the matrix shape against chart dimension `n` and fiber rank `m`.
    pub fn check_dims(&self, n: usize, m: usize) -> Result<()> {
        let size = |s: Space| if s == Space::Fiber { m } else { n };
        if self.matrix.rows() != size(self.target) || self.matrix.cols() != size(self.source) {
            return Err(Error::Shape(format!(
                "{:?} -> {:?} map needs a {}x{} matrix, got {}x{}",
                self.source,
                self.target,
                size(self.target),
                size(self.source),
                self.matrix.rows(),
                self.matrix.cols()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, v: &[Poly<F>]) -> Vec<Poly<F>> {
        self.matrix.apply(v)
    }

    /// Lie derivative by the Leibniz rule: `(L_X T)s = L_X(Ts) - T(L_X s)`.
    /// The fiber is treated as trivial, with `L_X` acting componentwise.
    pub fn lie_derivative(&self, x: &VectorField<F>) -> Result<EndoField<F>> {
        let n = x.dim();
        for (s, size) in [(self.target, self.matrix.rows()), (self.source, self.matrix.cols())] {
            if s != Space::Fiber && size != n {
                return Err(Error::ChartMismatch(n, size));
            }
        }
        let dx = x.jacobian();
        let action = |s: Space, size: usize| -> Matrix<Poly<F>> {
            match s {
                Space::Tangent => -&dx,
                Space::Cotangent => dx.transpose(),
                Space::Fiber => Matrix::zeros(size, size),
            }
        };
        let lt = action(self.target, self.matrix.rows());
        let ls = action(self.source, self.matrix.cols());
        let deriv = self.matrix.map(|p| x.apply(p));
        let matrix = &(&deriv + &(&lt * &self.matrix)) - &(&self.matrix * &ls);
        Ok(EndoField { source: self.source, target: self.target, matrix })
    }

    pub fn eval_at(&self, p: &[F]) -> Result<Matrix<F>> {
        self.matrix.eval(p)
    }
}

/// Totally antisymmetric contravariant 3-tensor over increasing triples.
#[derive(Clone, PartialEq, Eq)]
pub struct Trivector<F: Field = Q> {
    n: usize,
    comps: Vec<Poly<F>>,
}

impl<F: Field> Trivector<F> {
    pub fn zero(n: usize) -> Self {
        Trivector { n, comps: vec![Poly::zero(); binom(n, 3)] }
    }

    /// Fills the increasing-triple components from `f(i, j, k)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> Poly<F>) -> Self {
        Trivector { n, comps: increasing_tuples(n, 3).into_iter().map(|t| f(t[0], t[1], t[2])).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn component(&self, i: usize, j: usize, k: usize) -> Poly<F> {
        match sort_with_sign(&[i, j, k]) {
            Some((s, odd)) => signed(self.comps[tuple_index(self.n, &s)].clone(), odd),
            None => Poly::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// Nonzero components on increasing triples.
    pub fn terms(&self) -> Vec<(Vec<usize>, &Poly<F>)> {
        increasing_tuples(self.n, 3).into_iter().zip(&self.comps).filter(|(_, c)| !c.is_zero()).collect()
    }
}

impl<F: Field> fmt::Debug for Trivector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms().iter().map(|(t, c)| format!("P{t:?} = {c:?}")).collect();
        write!(f, "Trivector{{{}}}", parts.join(", "))
    }
}

/// `sum_cyc(i,j,k) sum_l B^{li} d_l B^{jk}` for arbitrary (unsorted) indices,
/// reading `B^{ab}` as the matrix entry `(a, b)`.
pub fn schouten_component<F: Field>(b: &Matrix<Poly<F>>, i: usize, j: usize, k: usize) -> Poly<F> {
    let n = b.rows();
    let mut acc = Poly::zero();
    for (a, c, e) in [(i, j, k), (j, k, i), (k, i, j)] {
        for l in 0..n {
            let bl = &b[(l, a)];
            if bl.is_zero() {
                continue;
            }
            let d = b[(c, e)].derivative(l);
            if !d.is_zero() {
                acc += &(bl * &d);
            }
        }
    }
    acc
}

/// Schouten trivector of an antisymmetric bivector matrix.
pub fn schouten_pb<F: Field>(b: &Matrix<Poly<F>>) -> Result<Trivector<F>> {
    if !b.is_square() || !b.is_antisymmetric() {
        return Err(Error::Shape("bivector matrix must be square and antisymmetric".into()));
    }
    Ok(Trivector::from_fn(b.rows(), |i, j, k| schouten_component(b, i, j, k)))
}

/// Form with values in a trivialized fiber `R^m`: one scalar form per slot.
#[derive(Clone, PartialEq, Eq)]
pub struct FiberValuedForm<F: Field = Q> {
    n: usize,
    k: usize,
    parts: Vec<KForm<F>>,
}

impl<F: Field> FiberValuedForm<F> {
    pub fn zero(n: usize, m: usize, k: usize) -> Self {
        FiberValuedForm { n, k, parts: vec![KForm::zero(n, k); m] }
    }

    pub fn from_parts(n: usize, k: usize, parts: Vec<KForm<F>>) -> Result<Self> {
        for p in &parts {
            if p.dim() != n {
                return Err(Error::ChartMismatch(n, p.dim()));
            }
            if p.degree() != k {
                return Err(Error::Shape(format!("fiber slot of degree {} in a {k}-form", p.degree())));
            }
        }
        Ok(FiberValuedForm { n, k, parts })
    }

    /// Fiber-valued 1-form from an `m x n` matrix (`mat[a][i] = alpha^a(d_i)`).
    pub fn from_matrix(mat: &Matrix<Poly<F>>) -> Self {
        FiberValuedForm {
            n: mat.cols(),
            k: 1,
            parts: (0..mat.rows()).map(|a| KForm::one_form(mat.row(a))).collect(),
        }
    }

    /// Inverse of [`FiberValuedForm::from_matrix`].
    pub fn to_matrix(&self) -> Matrix<Poly<F>> {
        assert_eq!(self.k, 1, "to_matrix needs a 1-form");
        Matrix::from_fn(self.fiber_dim(), self.n, |a, i| self.parts[a].coeffs[i].clone())
    }

    /// Fiber-valued 0-form (a section) from its column.
    pub fn section(n: usize, r: &[Poly<F>]) -> Self {
        FiberValuedForm { n, k: 0, parts: r.iter().map(|c| KForm::function(n, c.clone())).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.parts.len()
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn parts(&self) -> &[KForm<F>] {
        &self.parts
    }

    pub fn part(&self, a: usize) -> &KForm<F> {
        &self.parts[a]
    }

    pub fn component(&self, idx: &[usize], a: usize) -> Poly<F> {
        self.parts[a].component(idx)
    }

    /// Fiber column of coefficients on the given index list.
    pub fn column(&self, idx: &[usize]) -> Vec<Poly<F>> {
        self.parts.iter().map(|p| p.component(idx)).collect()
    }

    pub fn add_component(&mut self, idx: &[usize], a: usize, c: &Poly<F>) {
        self.parts[a].add_component(idx, c);
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }

    /// Flat exterior derivative, slot by slot.
    pub fn d(&self) -> Result<Self> {
        if self.k >= self.n {
            return Err(Error::Degree { degree: self.k + 1, dim: self.n });
        }
        Ok(self.d_total())
    }

    pub fn d_total(&self) -> Self {
        FiberValuedForm { n: self.n, k: self.k + 1, parts: self.parts.iter().map(|p| p.d_total()).collect() }
    }

    pub fn interior(&self, x: &VectorField<F>) -> Result<Self> {
        Ok(FiberValuedForm {
            n: self.n,
            k: self.k.saturating_sub(1),
            parts: self.parts.iter().map(|p| p.interior(x)).collect::<Result<_>>()?,
        })
    }

    /// Value on `k` vector fields, as a fiber column.
    pub fn eval_on(&self, xs: &[VectorField<F>]) -> Result<Vec<Poly<F>>> {
        self.parts.iter().map(|p| p.eval_on(xs)).collect()
    }

    /// Applies a fiber endomorphism slotwise: `(M alpha)^a = M[a][b] alpha^b`.
    pub fn map_fiber(&self, m: &Matrix<Poly<F>>) -> Result<Self> {
        if m.cols() != self.fiber_dim() {
            return Err(Error::FiberMismatch(m.cols(), self.fiber_dim()));
        }
        let mut parts = vec![KForm::zero(self.n, self.k); m.rows()];
        for (a, part) in parts.iter_mut().enumerate() {
            for b in 0..m.cols() {
                if !m[(a, b)].is_zero() {
                    *part = &*part + &self.parts[b].scale(&m[(a, b)]);
                }
            }
        }
        Ok(FiberValuedForm { n: self.n, k: self.k, parts })
    }

    /// `beta ^ alpha` with the scalar form on the left.
    pub fn wedge_left(&self, beta: &KForm<F>) -> Self {
        FiberValuedForm {
            n: self.n,
            k: self.k + beta.degree(),
            parts: self.parts.iter().map(|p| beta.wedge_total(p)).collect(),
        }
    }

    pub fn scale(&self, f: &Poly<F>) -> Self {
        FiberValuedForm { n: self.n, k: self.k, parts: self.parts.iter().map(|p| p.scale(f)).collect() }
    }

    pub fn eval_at(&self, p: &[F]) -> Result<Vec<Vec<F>>> {
        self.parts.iter().map(|f| f.eval_at(p)).collect()
    }
}

impl<F: Field> fmt::Debug for FiberValuedForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.parts.iter()).finish()
    }
}

impl<F: Field> Add for &FiberValuedForm<F> {
    type Output = FiberValuedForm<F>;
    fn add(self, rhs: &FiberValuedForm<F>) -> FiberValuedForm<F> {
        assert_eq!(self.fiber_dim(), rhs.fiber_dim());
        FiberValuedForm { n: self.n, k: self.k, parts: self.parts.iter().zip(&rhs.parts).map(|(a, b)| a + b).collect() }
    }
}

impl<F: Field> Sub for &FiberValuedForm<F> {
    type Output = FiberValuedForm<F>;
    fn sub(self, rhs: &FiberValuedForm<F>) -> FiberValuedForm<F> {
        assert_eq!(self.fiber_dim(), rhs.fiber_dim());
        FiberValuedForm { n: self.n, k: self.k, parts: self.parts.iter().zip(&rhs.parts).map(|(a, b)| a - b).collect() }
    }
}

impl<F: Field> Neg for &FiberValuedForm<F> {
    type Output = FiberValuedForm<F>;
    fn neg(self) -> FiberValuedForm<F> {
        FiberValuedForm { n: self.n, k: self.k, parts: self.parts.iter().map(|p| -p).collect() }
    }
}

/// `<alpha ^ beta>_g = sum_ab g_ab alpha^a ^ beta^b`.
pub fn pairing_wedge<F: Field>(
    alpha: &FiberValuedForm<F>,
    beta: &FiberValuedForm<F>,
    g: &Matrix<F>,
) -> Result<KForm<F>> {
    let m = alpha.fiber_dim();
    if beta.fiber_dim() != m {
        return Err(Error::FiberMismatch(m, beta.fiber_dim()));
    }
    if g.rows() != m || g.cols() != m {
        return Err(Error::FiberMismatch(m, g.rows()));
    }
    if alpha.dim() != beta.dim() {
        return Err(Error::ChartMismatch(alpha.dim(), beta.dim()));
    }
    let k = alpha.degree() + beta.degree();
    let mut out = KForm::zero(alpha.dim(), k);
    for a in 0..m {
        if alpha.parts[a].is_zero() {
            continue;
        }
        for b in 0..m {
            if g[(a, b)].is_zero() || beta.parts[b].is_zero() {
                continue;
            }
            let w = alpha.parts[a].wedge_total(&beta.parts[b]);
            out = &out + &w.scale(&Poly::constant(g[(a, b)].clone()));
        }
    }
    Ok(out)
}

/// Rank, nullspace basis and column-space basis of an exact matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RankInfo<F> {
    pub rank: usize,
    pub nullspace: Vec<Vec<F>>,
    pub column_space: Vec<Vec<F>>,
}

pub fn rank_and_nullspace<F: Field>(m: &Matrix<F>) -> RankInfo<F> {
    let rref = m.rref();
    let nullspace = m.nullspace();
    let column_space = rref.pivots.iter().map(|&c| m.column(c)).collect();
    RankInfo { rank: rref.pivots.len(), nullspace, column_space }
}

/// Polynomial value at a point; convenience wrapper around [`Poly::eval`].
pub fn eval_at<F: Field>(f: &Poly<F>, p: &[F]) -> Result<F> {
    f.eval(p)
}

/// `true` if every entry is the zero polynomial.
pub fn is_zero_column<F: Field>(v: &[Poly<F>]) -> bool {
    v.iter().all(|c| c.is_zero())
}

/// Constant polynomial matrix from a numeric one.
pub fn constant_matrix<F: Field>(m: &Matrix<F>) -> Matrix<Poly<F>> {
    m.map(|c| Poly::constant(c.clone()))
}

pub fn is_identity<T: crate::field::Ring>(m: &Matrix<T>) -> bool {
    m.is_square()
        && (0..m.rows()).all(|i| (0..m.cols()).all(|j| if i == j { m[(i, j)].is_one() } else { m[(i, j)].is_zero() }))
}
