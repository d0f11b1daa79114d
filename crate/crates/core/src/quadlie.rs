//! Finite-dimensional Lie algebras given by rational structure constants,
//! their invariant symmetric forms, complex structures and doubles.
//!
//! Salamon-style differentials follow `d xi(x, y) = -xi([x, y])`, so
//! `de^4 = e^1 ^ e^2` gives `[e_1, e_2] = -e_4`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{parse_rational, q, FromRational, Field, Q, QI};
use crate::matrix::{in_column_span, Matrix};
use crate::poly::Poly;
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    /// `c^k_{ij}` at `k + dim * (j + dim * i)`.
    constants: Vec<Q>,
}

impl LieAlgebra {
    pub fn abelian(dim: usize) -> Self {
        LieAlgebra { dim, constants: vec![Q::zero(); dim * dim * dim] }
    }

    /// From `(i, j, k, c)` meaning `c^k_{ij} = c` (0-based); the `(j, i)`
    /// entry is filled in by antisymmetry.
    pub fn from_constants(dim: usize, entries: &[(usize, usize, usize, Q)]) -> Result<Self> {
        let mut out = Self::abelian(dim);
        let mut seen = std::collections::HashSet::new();
        for (i, j, k, c) in entries {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::LieSpec(format!(
                    "constant c^{}_{{{},{}}} out of range for dimension {dim}",
                    k + 1,
                    i + 1,
                    j + 1
                )));
            }
            if i == j {
                if !c.is_zero() {
                    return Err(Error::LieSpec(format!("c^{}_{{{},{}}} must vanish", k + 1, i + 1, i + 1)));
                }
                continue;
            }
            let key = (i.min(j), i.max(j), k);
            if !seen.insert(key) {
                return Err(Error::LieSpec(format!(
                    "duplicate definition of c^{}_{{{},{}}}",
                    k + 1,
                    key.0 + 1,
                    key.1 + 1
                )));
            }
            out.set(i, j, k, c.clone());
            out.set(j, i, k, -c.clone());
        }
        Ok(out)
    }

    /// Parses Salamon notation: entry `k` describes `de^{k+1}` as a sum of
    /// index pairs with optional rational coefficients, e.g. `"12"`,
    /// `"13+24"`, `"-2*14"`, `"1/2*23 - 14"` or `"0"`.
    pub fn from_differentials<S: AsRef<str>>(differentials: &[S]) -> Result<Self> {
        let m = differentials.len();
        if m > 9 {
            return Err(Error::LieSpec("Salamon notation supports at most 9 generators".into()));
        }
        let mut out = Self::abelian(m);
        for (k, entry) in differentials.iter().enumerate() {
            let terms = parse_differential(entry.as_ref(), m)
                .map_err(|e| Error::LieSpec(format!("de^{}: {e}", k + 1)))?;
            let mut seen = Vec::new();
            for (i, j, a) in terms {
                let key = (i.min(j), i.max(j));
                if seen.contains(&key) {
                    return Err(Error::LieSpec(format!(
                        "de^{}: duplicate pair e^{}^e^{}",
                        k + 1,
                        key.0 + 1,
                        key.1 + 1
                    )));
                }
                seen.push(key);
                // d e^k (e_i, e_j) = a = -c^k_{ij}
                out.set(i, j, k, -a.clone());
                out.set(j, i, k, a);
            }
        }
        Ok(out)
    }

    fn set(&mut self, i: usize, j: usize, k: usize, c: Q) {
        let d = self.dim;
        self.constants[k + d * (j + d * i)] = c;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c^k_{ij}` (0-based).
    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Q {
        &self.constants[k + self.dim * (j + self.dim * i)]
    }

    pub fn is_abelian(&self) -> bool {
        self.constants.iter().all(|c| c.is_zero())
    }

    /// Nonzero `(i, j, k, c^k_{ij})` with `i < j`.
    pub fn nonzero_constants(&self) -> Vec<(usize, usize, usize, Q)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in 0..self.dim {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        out.push((i, j, k, c.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn bracket<T: FromRational>(&self, x: &[T], y: &[T]) -> Vec<T> {
        let m = self.dim;
        let mut out = vec![T::zero(); m];
        for i in 0..m {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..m {
                if y[j].is_zero() || i == j {
                    continue;
                }
                let xy = x[i].clone() * y[j].clone();
                for (k, slot) in out.iter_mut().enumerate() {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        *slot = slot.clone() + xy.clone() * T::from_rational(c);
                    }
                }
            }
        }
        out
    }

    pub fn basis_vector<T: FromRational>(&self, i: usize) -> Vec<T> {
        let mut v = vec![T::zero(); self.dim];
        v[i] = T::one();
        v
    }

    /// Matrix of `ad_x`: `(ad_x)_{kj} = sum_i x^i c^k_{ij}`.
    pub fn ad<T: FromRational>(&self, x: &[T]) -> Matrix<T> {
        let m = self.dim;
        let mut out = Matrix::<T>::zeros(m, m);
        for i in 0..m {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..m {
                for k in 0..m {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        out[(k, j)] = out[(k, j)].clone() + x[i].clone() * T::from_rational(c);
                    }
                }
            }
        }
        out
    }

    /// Cyclic sum `[[x,y],z] + [[y,z],x] + [[z,x],y]`.
    pub fn jacobiator<T: FromRational>(&self, x: &[T], y: &[T], z: &[T]) -> Vec<T> {
        let a = self.bracket(&self.bracket(x, y), z);
        let b = self.bracket(&self.bracket(y, z), x);
        let c = self.bracket(&self.bracket(z, x), y);
        a.into_iter().zip(b).zip(c).map(|((a, b), c)| a + b + c).collect()
    }

    /// Basis triples `i < j < k` (1-based) on which the Jacobi identity fails.
    pub fn jacobi_check(&self) -> Vec<(usize, usize, usize)> {
        let m = self.dim;
        let mut bad = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let (x, y, z) = (self.basis_vector::<Q>(i), self.basis_vector(j), self.basis_vector(k));
                    if self.jacobiator(&x, &y, &z).iter().any(|c| !c.is_zero()) {
                        bad.push((i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        bad
    }

    pub fn require_jacobi(&self) -> Result<()> {
        let bad = self.jacobi_check();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Jacobi(bad))
        }
    }

    /// `D[x,y] - [Dx,y] - [x,Dy]` on basis pairs; empty when `D` is a derivation.
    pub fn derivation_defects<T: FromRational>(&self, d: &Matrix<T>) -> Vec<(usize, usize)> {
        let m = self.dim;
        let mut bad = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let (x, y) = (self.basis_vector::<T>(i), self.basis_vector::<T>(j));
                let lhs = d.apply(&self.bracket(&x, &y));
                let r1 = self.bracket(&d.apply(&x), &y);
                let r2 = self.bracket(&x, &d.apply(&y));
                if lhs.iter().zip(r1.iter().zip(&r2)).any(|(l, (a, b))| *l != a.clone() + b.clone()) {
                    bad.push((i + 1, j + 1));
                }
            }
        }
        bad
    }

    /// Algebraic Nijenhuis tensor `[Jx,Jy] - [x,y] - J([Jx,y] + [x,Jy])`.
    pub fn nijenhuis<T: FromRational>(&self, j: &Matrix<T>, x: &[T], y: &[T]) -> Vec<T> {
        let jx = j.apply(x);
        let jy = j.apply(y);
        let a = self.bracket(&jx, &jy);
        let b = self.bracket(x, y);
        let mut c = self.bracket(&jx, y);
        for (ci, di) in c.iter_mut().zip(self.bracket(x, &jy)) {
            *ci = ci.clone() + di;
        }
        let jc = j.apply(&c);
        a.into_iter().zip(b).zip(jc).map(|((a, b), c)| a - b - c).collect()
    }
}

fn parse_differential(src: &str, m: usize) -> std::result::Result<Vec<(usize, usize, Q)>, String> {
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty entry".into());
    }
    if s == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let mut sign = Q::one();
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r;
        } else if !out.is_empty() {
            return Err(format!("expected '+' or '-' before {rest:?}"));
        }
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let term = &rest[..end];
        rest = &rest[end..];
        let (coef, pairs) = match term.split_once('*') {
            Some((c, p)) => (parse_rational(c).ok_or_else(|| format!("bad coefficient {c:?}"))?, p),
            None => (Q::one(), term),
        };
        if pairs.is_empty() || pairs.len() % 2 != 0 || !pairs.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("malformed index pair {pairs:?}"));
        }
        let digits: Vec<usize> = pairs.chars().map(|c| c as usize - '0' as usize).collect();
        for p in digits.chunks(2) {
            let (i, j) = (p[0], p[1]);
            if i == 0 || j == 0 || i > m || j > m {
                return Err(format!("index pair {i}{j} out of range 1..={m}"));
            }
            if i == j {
                return Err(format!("repeated index in pair {i}{j}"));
            }
            out.push((i - 1, j - 1, sign.clone() * coef.clone()));
        }
    }
    Ok(out)
}

/// Lie algebra with a symmetric bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadLieAlgebra {
    pub algebra: LieAlgebra,
    pub metric: Matrix<Q>,
}

impl QuadLieAlgebra {
    /// Validates Jacobi, symmetry, non-degeneracy and ad-invariance.
    pub fn new(algebra: LieAlgebra, metric: Matrix<Q>) -> Result<Self> {
        let m = algebra.dim();
        if metric.rows() != m || metric.cols() != m {
            return Err(Error::FiberMismatch(m, metric.rows()));
        }
        algebra.require_jacobi()?;
        if !metric.is_symmetric() {
            return Err(Error::Precondition("fiber metric is not symmetric".into()));
        }
        if metric.det_field().is_zero() {
            return Err(Error::Precondition("fiber metric is degenerate".into()));
        }
        let bad = invariance_defects(&algebra, &metric);
        if !bad.is_empty() {
            return Err(Error::Precondition(format!("fiber metric is not ad-invariant on triples {bad:?}")));
        }
        Ok(QuadLieAlgebra { algebra, metric })
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn pairing<T: FromRational>(&self, x: &[T], y: &[T]) -> T {
        let gy = self.metric.map(T::from_rational).apply(y);
        x.iter().zip(gy).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b)
    }
}

/// Basis triples `(a, b, c)` (1-based) where `g([e_a,e_b],e_c) + g(e_b,[e_a,e_c]) != 0`.
pub fn invariance_defects(l: &LieAlgebra, g: &Matrix<Q>) -> Vec<(usize, usize, usize)> {
    let m = l.dim();
    let mut bad = Vec::new();
    for a in 0..m {
        for b in 0..m {
            for c in b..m {
                if !invariance_value(l, g, a, b, c).is_zero() {
                    bad.push((a + 1, b + 1, c + 1));
                }
            }
        }
    }
    bad
}

fn invariance_value(l: &LieAlgebra, g: &Matrix<Q>, a: usize, b: usize, c: usize) -> Q {
    let m = l.dim();
    let mut acc = Q::zero();
    for k in 0..m {
        acc += l.constant(a, b, k) * &g[(k, c)] + l.constant(a, c, k) * &g[(b, k)];
    }
    acc
}

/// Solution space of an ad-invariance linear system, with one named
/// parameter per free unknown `b_ij` (`i <= j`, 1-based).
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSymFamily {
    pub basis: Vec<Matrix<Q>>,
    pub params: Vec<String>,
    pub free_entries: Vec<(usize, usize)>,
}

impl ParamSymFamily {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// General element; parameter `t` is polynomial variable `t`.
    pub fn general_element(&self) -> Matrix<Scalar> {
        let m = self.basis.first().map_or(0, |b| b.rows());
        let mut out = Matrix::<Scalar>::zeros(m, m);
        for (t, b) in self.basis.iter().enumerate() {
            let var = Scalar::var(t);
            out = &out + &b.map(|c| var.scale(c));
        }
        out
    }

    pub fn contains(&self, beta: &Matrix<Q>) -> bool {
        let m = beta.rows();
        let cols: Vec<Vec<Q>> = self.basis.iter().map(flatten).collect();
        if cols.is_empty() {
            return beta.is_zero();
        }
        let a = Matrix::from_columns(m * m, &cols);
        in_column_span(&a, &flatten(beta))
    }

    /// Parameter index of the unknown `b_ij` (0-based `i <= j`), if free.
    pub fn param_of(&self, i: usize, j: usize) -> Option<usize> {
        let key = (i.min(j), i.max(j));
        self.free_entries.iter().position(|&e| e == key)
    }
}

fn flatten(m: &Matrix<Q>) -> Vec<Q> {
    m.entries().cloned().collect()
}

fn sym_unknowns(m: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..m {
        for j in i..m {
            v.push((i, j));
        }
    }
    v
}

/// Basis of the ad-invariant symmetric bilinear forms of `l`.
pub fn invariant_sym_forms(l: &LieAlgebra) -> ParamSymFamily {
    let m = l.dim();
    let unknowns = sym_unknowns(m);
    let idx = |i: usize, j: usize| unknowns.iter().position(|&u| u == (i.min(j), i.max(j))).unwrap();
    let mut rows = Vec::new();
    for a in 0..m {
        for b in 0..m {
            for c in b..m {
                let mut row = vec![Q::zero(); unknowns.len()];
                for k in 0..m {
                    let c1 = l.constant(a, b, k);
                    if !c1.is_zero() {
                        row[idx(k, c)] += c1;
                    }
                    let c2 = l.constant(a, c, k);
                    if !c2.is_zero() {
                        row[idx(b, k)] += c2;
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let system = if rows.is_empty() {
        Matrix::zeros(1, unknowns.len())
    } else {
        Matrix::from_rows(rows).expect("rectangular system")
    };
    let pivots = system.rref().pivots;
    let free: Vec<usize> = (0..unknowns.len()).filter(|c| !pivots.contains(c)).collect();
    let basis = system
        .nullspace()
        .into_iter()
        .map(|v| {
            let mut b = Matrix::<Q>::zeros(m, m);
            for (t, &(i, j)) in unknowns.iter().enumerate() {
                b[(i, j)] = v[t].clone();
                b[(j, i)] = v[t].clone();
            }
            b
        })
        .collect();
    let free_entries: Vec<(usize, usize)> = free.iter().map(|&c| unknowns[c]).collect();
    let params = free_entries.iter().map(|(i, j)| format!("b{}{}", i + 1, j + 1)).collect();
    ParamSymFamily { basis, params, free_entries }
}

/// Inertia of a symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn triple(&self) -> (usize, usize, usize) {
        (self.positive, self.negative, self.zero)
    }
}

/// Signature by symmetric Gaussian elimination (congruence over `Q`).
pub fn signature(g: &Matrix<Q>) -> Result<Signature> {
    if !g.is_symmetric() {
        return Err(Error::Shape("signature needs a symmetric matrix".into()));
    }
    let mut a = g.clone();
    let n = a.rows();
    let mut sig = Signature { positive: 0, negative: 0, zero: 0 };
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| !a[(i, i)].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                let pair = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a[(i, j)].is_zero());
                match pair {
                    Some((i, j)) => {
                        // row/column i += row/column j makes the diagonal 2 a_ij
                        for &c in &active {
                            let v = a[(i, c)].clone() + a[(j, c)].clone();
                            a[(i, c)] = v;
                        }
                        for &r in &active {
                            let v = a[(r, i)].clone() + a[(r, j)].clone();
                            a[(r, i)] = v;
                        }
                        i
                    }
                    None => {
                        sig.zero += active.len();
                        break;
                    }
                }
            }
        };
        let d = a[(p, p)].clone();
        if d > Q::zero() {
            sig.positive += 1;
        } else {
            sig.negative += 1;
        }
        active.retain(|&i| i != p);
        for &r in &active {
            if a[(r, p)].is_zero() {
                continue;
            }
            let f = a[(r, p)].clone() / d.clone();
            for &c in &active {
                let v = a[(r, c)].clone() - f.clone() * a[(p, c)].clone();
                a[(r, c)] = v;
            }
        }
    }
    Ok(sig)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexStructureReport {
    pub square: bool,
    pub skew: bool,
    pub integrable: bool,
    /// Basis pairs (1-based) with nonzero Nijenhuis tensor.
    pub nijenhuis_defects: Vec<(usize, usize)>,
    /// Basis pairs (1-based) where `g(Jx,y) + g(x,Jy) != 0`.
    pub skew_defects: Vec<(usize, usize)>,
}

impl ComplexStructureReport {
    pub fn all_pass(&self) -> bool {
        self.square && self.skew && self.integrable
    }
}

pub fn complex_structure_check(l: &LieAlgebra, g: &Matrix<Q>, j: &Matrix<Q>) -> ComplexStructureReport {
    let m = l.dim();
    let square = &(j * j) + &Matrix::identity(m) == Matrix::zeros(m, m);
    let skew_m = &(&j.transpose() * g) + &(g * j);
    let mut skew_defects = Vec::new();
    let mut nijenhuis_defects = Vec::new();
    for a in 0..m {
        for b in a..m {
            if !skew_m[(a, b)].is_zero() {
                skew_defects.push((a + 1, b + 1));
            }
            if b > a {
                let n = l.nijenhuis(j, &l.basis_vector::<Q>(a), &l.basis_vector::<Q>(b));
                if n.iter().any(|c| !c.is_zero()) {
                    nijenhuis_defects.push((a + 1, b + 1));
                }
            }
        }
    }
    ComplexStructureReport {
        square,
        skew: skew_defects.is_empty(),
        integrable: nijenhuis_defects.is_empty(),
        nijenhuis_defects,
        skew_defects,
    }
}

fn complexify(m: &Matrix<Q>) -> Matrix<QI> {
    m.map(|c| QI::from_q(c.clone()))
}

/// Basis of the `+i` eigenspace of `J` on `g^C`.
pub fn holomorphic_subspace(j: &Matrix<Q>) -> Vec<Vec<QI>> {
    let m = j.rows();
    let i = QI::imaginary_unit().expect("Gaussian unit");
    let shifted = &complexify(j) - &Matrix::<QI>::identity(m).scale(&i);
    shifted.nullspace()
}

/// Eigenspace oracle: the `+i` eigenspace of `J` is closed under the
/// complexified bracket.
pub fn holomorphic_closure(l: &LieAlgebra, j: &Matrix<Q>) -> bool {
    let v = holomorphic_subspace(j);
    if v.is_empty() {
        return true;
    }
    let span = Matrix::from_columns(l.dim(), &v);
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            if !in_column_span(&span, &l.bracket(&v[a], &v[b])) {
                return false;
            }
        }
    }
    true
}

/// Complex structure whose `(1,0)`-covectors are the rows `forms`
/// (`alpha o J = i alpha`). Needs `m/2` independent forms with
/// `forms + conj(forms)` spanning the dual.
pub fn complex_structure_from_forms(forms: &[Vec<QI>]) -> Result<Matrix<Q>> {
    let half = forms.len();
    let m = 2 * half;
    if forms.iter().any(|f| f.len() != m) {
        return Err(Error::Shape(format!("{half} covectors need {m} entries each")));
    }
    let mut rows: Vec<Vec<QI>> = forms.to_vec();
    rows.extend(forms.iter().map(|f| f.iter().map(|c| c.conj()).collect::<Vec<_>>()));
    let p = Matrix::from_rows(rows)?;
    let p_inv = p.inverse().ok_or_else(|| Error::Precondition("forms and conjugates are dependent".into()))?;
    let i = QI::imaginary_unit().expect("Gaussian unit");
    let d = Matrix::from_fn(m, m, |r, c| {
        if r != c {
            QI::zero()
        } else if r < half {
            i.clone()
        } else {
            -i.clone()
        }
    });
    let j = &(&p_inv * &d) * &p;
    if j.entries().any(|c| !c.is_real()) {
        return Err(Error::Precondition("forms do not define a real complex structure".into()));
    }
    Ok(j.map(|c| c.real_part()))
}

/// The double `g + g*` with `[X+xi, Y+eta] = [X,Y] - eta o ad_X + xi o ad_Y`
/// and pairing `(X+xi, Y+eta) = xi(Y) + eta(X)`. Basis: `e_1..e_m, e^1..e^m`.
pub fn build_double(l: &LieAlgebra) -> Result<QuadLieAlgebra> {
    l.require_jacobi()?;
    let m = l.dim();
    let mut entries = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..m {
                let c = l.constant(i, j, k);
                if !c.is_zero() {
                    entries.push((i, j, k, c.clone()));
                }
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            // [e_i, e^j] = -sum_k c^j_{ik} e^k
            for k in 0..m {
                let c = l.constant(i, k, j);
                if !c.is_zero() {
                    entries.push((i, m + j, m + k, -c.clone()));
                }
            }
        }
    }
    let algebra = LieAlgebra::from_constants(2 * m, &entries)?;
    let metric = Matrix::from_fn(2 * m, 2 * m, |a, b| if a + m == b || b + m == a { q(1) } else { q(0) });
    QuadLieAlgebra::new(algebra, metric)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissiblePairReport {
    pub subalgebra: bool,
    /// Spanning-list positions (1-based) whose bracket leaves `k`.
    pub bracket_witness: Option<(usize, usize)>,
    pub spans: bool,
    pub rank_deficit: usize,
    pub omega_well_defined: bool,
    pub closed: bool,
    pub real_part_dim: usize,
    pub nondegenerate: bool,
}

impl AdmissiblePairReport {
    pub fn pass(&self) -> bool {
        self.subalgebra && self.spans && self.omega_well_defined && self.closed && self.nondegenerate
    }
}

/// Checks an admissible pair `(k, omega)`: `k` is given by a spanning list
/// in `g^C` and `omega(k_a, k_b) = omega[a][b]`.
pub fn admissible_pair_check(l: &LieAlgebra, k: &[Vec<QI>], omega: &Matrix<QI>) -> Result<AdmissiblePairReport> {
    let m = l.dim();
    if k.iter().any(|v| v.len() != m) {
        return Err(Error::Shape(format!("subspace vectors must have {m} entries")));
    }
    if omega.rows() != k.len() || omega.cols() != k.len() || !omega.is_antisymmetric() {
        return Err(Error::Shape("omega must be an antisymmetric matrix on the spanning list".into()));
    }
    let span = if k.is_empty() { Matrix::zeros(m, 0) } else { Matrix::from_columns(m, k) };
    let pivots = span.rref().pivots;
    let basis: Vec<Vec<QI>> = pivots.iter().map(|&c| k[c].clone()).collect();
    let bspan = if basis.is_empty() { Matrix::zeros(m, 0) } else { Matrix::from_columns(m, &basis) };

    // omega must vanish on every relation among the spanning vectors
    let omega_well_defined = span.nullspace().iter().all(|rel| omega.transpose().apply(rel).iter().all(|c| c.is_zero()));
    let omega_b = Matrix::from_fn(basis.len(), basis.len(), |a, b| omega[(pivots[a], pivots[b])].clone());

    let mut bracket_witness = None;
    'outer: for a in 0..k.len() {
        for b in a + 1..k.len() {
            if !in_column_span(&bspan, &l.bracket(&k[a], &k[b])) {
                bracket_witness = Some((a + 1, b + 1));
                break 'outer;
            }
        }
    }
    let subalgebra = bracket_witness.is_none();

    let conj: Vec<Vec<QI>> = basis.iter().map(|v| v.iter().map(|c| c.conj()).collect()).collect();
    let both: Vec<Vec<QI>> = basis.iter().chain(&conj).cloned().collect();
    let rank = if both.is_empty() { 0 } else { Matrix::from_columns(m, &both).rank() };

    let coords = |v: &[QI]| bspan.solve(v);
    let eval = |x: &[QI], y: &[QI]| -> Option<QI> {
        let cx = coords(x)?;
        let cy = coords(y)?;
        Some(cx.iter().zip(omega_b.apply(&cy)).fold(QI::zero(), |acc, (a, b)| acc + a.clone() * b))
    };
    let mut closed = subalgebra;
    if subalgebra {
        let r = basis.len();
        'cl: for a in 0..r {
            for b in a + 1..r {
                for c in b + 1..r {
                    let (x, y, z) = (&basis[a], &basis[b], &basis[c]);
                    let t1 = eval(&l.bracket(x, y), z);
                    let t2 = eval(&l.bracket(y, z), x);
                    let t3 = eval(&l.bracket(z, x), y);
                    match (t1, t2, t3) {
                        (Some(a1), Some(a2), Some(a3)) if (a1.clone() + a2.clone() + a3.clone()).is_zero() => {}
                        _ => {
                            closed = false;
                            break 'cl;
                        }
                    }
                }
            }
        }
    }

    // real points of k: real and imaginary parts of a basis of k and conj(k)
    let real_vectors = real_points(m, &basis, &conj);
    let real_part_dim = real_vectors.len();
    let nondegenerate = if real_part_dim == 0 {
        true
    } else {
        let lifted: Vec<Vec<QI>> = real_vectors.iter().map(|v| v.iter().map(|c| QI::from_q(c.clone())).collect()).collect();
        let im = Matrix::from_fn(real_part_dim, real_part_dim, |a, b| {
            eval(&lifted[a], &lifted[b]).map(|z| z.imag_part()).unwrap_or_else(Q::zero)
        });
        !im.det_field().is_zero()
    };

    Ok(AdmissiblePairReport {
        subalgebra,
        bracket_witness,
        spans: rank == m,
        rank_deficit: m - rank,
        omega_well_defined,
        closed,
        real_part_dim,
        nondegenerate,
    })
}

/// Rational basis of `span(u) cap span(conj u) cap R^m`.
fn real_points(m: usize, u: &[Vec<QI>], ubar: &[Vec<QI>]) -> Vec<Vec<Q>> {
    if u.is_empty() {
        return Vec::new();
    }
    let a = Matrix::from_columns(m, u);
    let b = Matrix::from_columns(m, ubar);
    let joint = a.hcat(&b.scale(&-QI::one()));
    let mut cands: Vec<Vec<Q>> = Vec::new();
    for sol in joint.nullspace() {
        let v = a.apply(&sol[..u.len()]);
        cands.push(v.iter().map(|c| c.real_part()).collect());
        cands.push(v.iter().map(|c| c.imag_part()).collect());
    }
    if cands.is_empty() {
        return Vec::new();
    }
    Matrix::from_columns(m, &cands).column_space()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismReport {
    pub bracket: bool,
    pub isometry: bool,
    pub j_linear: bool,
}

impl AutomorphismReport {
    pub fn pass(&self) -> bool {
        self.bracket && self.isometry && self.j_linear
    }
}

pub fn automorphism_check(l: &LieAlgebra, g: &Matrix<Q>, j: &Matrix<Q>, phi: &Matrix<Q>) -> AutomorphismReport {
    let m = l.dim();
    let mut bracket = true;
    for a in 0..m {
        for b in a + 1..m {
            let (x, y) = (l.basis_vector::<Q>(a), l.basis_vector::<Q>(b));
            if phi.apply(&l.bracket(&x, &y)) != l.bracket(&phi.apply(&x), &phi.apply(&y)) {
                bracket = false;
            }
        }
    }
    AutomorphismReport {
        bracket,
        isometry: &(&phi.transpose() * g) * phi == *g,
        j_linear: phi * j == j * phi,
    }
}

/// Evaluates a symmetric matrix of polynomials on `(v, v)`.
pub fn quadratic_value<F: Field>(g: &Matrix<Poly<F>>, v: &[Poly<F>]) -> Poly<F> {
    let gv = g.apply(v);
    v.iter().zip(gv).fold(Poly::zero(), |acc, (a, b)| &acc + &(a * &b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn salamon_sign_convention() {
        let l = LieAlgebra::from_differentials(&["0", "0", "0", "12"]).unwrap();
        assert_eq!(l.bracket::<Q>(&l.basis_vector(0), &l.basis_vector(1)), vec![q(0), q(0), q(0), q(-1)]);
    }

    #[test]
    fn differential_parsing() {
        let l = LieAlgebra::from_differentials(&["0", "0", "-2*12", "1/2*13 + 23"]).unwrap();
        assert_eq!(l.constant(0, 1, 2), &q(2));
        assert_eq!(l.constant(0, 2, 3), &crate::field::qr(-1, 2));
        assert!(LieAlgebra::from_differentials(&["0", "15"]).is_err());
        assert!(LieAlgebra::from_differentials(&["0", "0", "12+21"]).is_err());
        assert!(LieAlgebra::from_differentials(&["0", "0", "11"]).is_err());
        assert!(LieAlgebra::from_differentials(&["0", "0", "1"]).is_err());
    }

    #[test]
    fn hyperbolic_signature() {
        let h = Matrix::from_rows(vec![vec![q(0), q(1)], vec![q(1), q(0)]]).unwrap();
        assert_eq!(signature(&h).unwrap().triple(), (1, 1, 0));
        let d = Matrix::from_rows(vec![vec![q(0), q(0)], vec![q(0), q(-3)]]).unwrap();
        assert_eq!(signature(&d).unwrap().triple(), (0, 1, 1));
    }
}
