use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{qr, Field, Q, QI};
use crate::matrix::{same_column_span, Matrix};

use super::{adjoint, check_algebraic, Adjoint, BlockMatrix, GacsComponents};

fn cx(m: &Matrix<Q>) -> Matrix<QI> {
    m.map(|x| QI::from_q(x.clone()))
}

fn cv(v: &[Q]) -> Vec<QI> {
    v.iter().map(|x| QI::from_q(x.clone())).collect()
}

fn iu() -> QI {
    QI::new(Q::zero(), Q::one())
}

fn scale(v: &[QI], c: &QI) -> Vec<QI> {
    v.iter().map(|x| x * c).collect()
}

fn add(a: &[QI], b: &[QI]) -> Vec<QI> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[QI], b: &[QI]) -> Vec<QI> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[QI], b: &[QI]) -> QI {
    a.iter().zip(b).fold(QI::zero(), |s, (x, y)| s + x * y)
}

/// Canonical basis of a column span: the transposed nonzero rows of the RREF of `mᵀ`.
fn canonical_span<F: Field>(rows: usize, cols: &[Vec<F>]) -> Matrix<F> {
    if cols.is_empty() {
        return Matrix::zeros(rows, 0);
    }
    let r = Matrix::from_columns(rows, cols).transpose().rref();
    let k = r.pivots.len();
    Matrix::from_fn(rows, k, |i, j| r.reduced[(j, i)].clone())
}

/// Data `(W, D, σ, ε)` of the `(1,0)`-bundle of a structure at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointwiseLData {
    pub point: Vec<Q>,
    /// `n × k`, columns a basis of `W`.
    pub w: Matrix<QI>,
    /// `m × l`, columns a basis of `D`.
    pub d: Matrix<QI>,
    /// `m × k`, column `j` is `σ(w_j)`.
    pub sigma: Matrix<QI>,
    /// `ε(w_i, w_j)`.
    pub epsilon: Matrix<QI>,
    /// Coordinate covectors spanning the complement of `ker B`.
    pub complement_b: Vec<usize>,
    /// Fiber basis vectors spanning the complement of `ker ν*`.
    pub complement_nus: Vec<usize>,
    /// `n × r`, a complement of `Rg B ∩ Rg ν*` in `Rg ν*`.
    pub rg_nus0: Matrix<Q>,
    /// `{v − i𝒥v}`, canonical basis, `(2n+m) × (n + m/2)`.
    pub l: Matrix<QI>,
    pub metric: Matrix<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LDataCheck {
    pub w_is_projection: bool,
    pub d_is_kernel_projection: bool,
    pub d_maximally_isotropic: bool,
    pub epsilon_antisymmetric: bool,
    pub epsilon_oracle: bool,
    pub reconstruction: bool,
    pub transversal: bool,
}

impl LDataCheck {
    pub fn flags(&self) -> [(&'static str, bool); 7] {
        [
            ("W = pi(L)", self.w_is_projection),
            ("D = pi_G(ker pi|L)", self.d_is_kernel_projection),
            ("D maximally isotropic", self.d_maximally_isotropic),
            ("epsilon antisymmetric", self.epsilon_antisymmetric),
            ("epsilon from lift", self.epsilon_oracle),
            ("L(W,D,sigma,epsilon) = L", self.reconstruction),
            ("L and conj(L) transversal", self.transversal),
        ]
    }

    pub fn pass(&self) -> bool {
        self.flags().iter().all(|(_, ok)| *ok)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.flags().iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect()
    }
}

struct PointBlocks {
    j: Matrix<Q>,
    a: Matrix<Q>,
    c: Matrix<Q>,
    mu: Matrix<Q>,
    nu: Matrix<Q>,
    mus: Matrix<Q>,
    bcols: Matrix<Q>,
    piv_b: Vec<usize>,
    nus_piv: Matrix<Q>,
    piv_nus: Vec<usize>,
    rg0: Matrix<Q>,
    split: Matrix<Q>,
}

impl PointBlocks {
    /// `X` and the split of `Im Z + J Re Z` into `Rg B ⊕ (Rg ν*)₀` coordinates.
    fn decompose(&self, z: &[QI]) -> Result<(Vec<Q>, Vec<Q>, Vec<Q>)> {
        let x: Vec<Q> = z.iter().map(|c| c.re.clone()).collect();
        let im: Vec<Q> = z.iter().map(|c| c.im.clone()).collect();
        let jx = self.j.apply(&x);
        let u: Vec<Q> = im.iter().zip(&jx).map(|(a, b)| a + b).collect();
        let coeffs = if self.split.cols() == 0 {
            if u.iter().any(|c| !c.is_zero()) {
                return Err(Error::Precondition("vector outside W".into()));
            }
            vec![]
        } else {
            self.split.solve(&u).ok_or_else(|| Error::Precondition("vector outside W".into()))?
        };
        let rb = self.bcols.cols();
        Ok((x, coeffs[..rb].to_vec(), coeffs[rb..].to_vec()))
    }

    /// `B⁻¹v` on the complement of `ker B`, from coordinates along the pivot columns.
    fn binv(&self, cb: &[Q], n: usize) -> Vec<Q> {
        let mut xi = vec![Q::zero(); n];
        for (k, &p) in self.piv_b.iter().enumerate() {
            xi[p] = cb[k].clone();
        }
        xi
    }

    /// `(ν*)⁻¹w` on the complement of `ker ν*`.
    fn nusinv(&self, c0: &[Q], m: usize) -> Result<Vec<Q>> {
        let w = self.rg0.apply(c0);
        let mut r = vec![Q::zero(); m];
        if self.piv_nus.is_empty() {
            return Ok(r);
        }
        let d = self.nus_piv.solve(&w).ok_or_else(|| Error::Precondition("(Rg nu*)_0 outside Rg nu*".into()))?;
        for (k, &p) in self.piv_nus.iter().enumerate() {
            r[p] = d[k].clone();
        }
        Ok(r)
    }

    /// `σ₁(Z)` and `η(Z)`.
    fn sigma1_eta(&self, z: &[QI]) -> Result<(Vec<QI>, Vec<QI>)> {
        let n = self.j.rows();
        let m = self.a.rows();
        let (x, cb, c0) = self.decompose(z)?;
        let i = iu();
        let binv_v = self.binv(&cb, n);
        let nusinv_w = self.nusinv(&c0, m)?;
        let id_m = Matrix::<Q>::identity(m);
        let one_minus_ia = &cx(&id_m) - &cx(&self.a).scale(&i);
        let one_plus_ijt = &cx(&Matrix::identity(n)) + &cx(&self.j.transpose()).scale(&i);

        let mut s1 = scale(&cv(&self.mu.apply(&x)), &-i.clone());
        s1 = add(&s1, &scale(&cv(&self.nu.apply(&binv_v)), &i));
        s1 = add(&s1, &one_minus_ia.apply(&cv(&nusinv_w)));

        let mut eta = scale(&cv(&self.c.apply(&x)), &-i.clone());
        eta = sub(&eta, &one_plus_ijt.apply(&cv(&binv_v)));
        eta = add(&eta, &scale(&cv(&self.mus.apply(&nusinv_w)), &i));
        Ok((s1, eta))
    }
}

/// Extracts `(W, D, σ, ε)` at `p` over the Gaussian rationals.
pub fn pointwise_ldata(c: &GacsComponents, g: &Matrix<Q>, p: &[Q]) -> Result<PointwiseLData> {
    let n = c.dim();
    let m = c.fiber_dim();
    if p.len() != n {
        return Err(Error::ChartMismatch(n, p.len()));
    }
    let cp = c.eval_at(p)?;
    let alg = check_algebraic(&cp, g)?;
    if !alg.pass() {
        return Err(Error::Precondition(format!("not almost complex at the point: {}", alg.failing().join(", "))));
    }
    let ev = |m: &crate::PolyMatrix| m.eval(p);
    let b = ev(&cp.b)?;
    let nus = ev(&adjoint(Adjoint::Nu, &cp.nu, g)?)?;
    let rb = b.rref();
    let bcols = Matrix::from_columns(n, &rb.pivots.iter().map(|&k| b.column(k)).collect::<Vec<_>>());
    let both = bcols.hcat(&nus).rref();
    let r_b = bcols.cols();
    let rg0_idx: Vec<usize> = both.pivots.iter().filter(|&&k| k >= r_b).map(|&k| k - r_b).collect();
    let rg0 = Matrix::from_columns(n, &rg0_idx.iter().map(|&k| nus.column(k)).collect::<Vec<_>>());
    let rn = nus.rref();
    let nus_piv = Matrix::from_columns(n, &rn.pivots.iter().map(|&k| nus.column(k)).collect::<Vec<_>>());
    let blocks = PointBlocks {
        j: ev(&cp.j)?,
        a: ev(&cp.a)?,
        c: ev(&cp.c)?,
        mu: ev(&cp.mu)?,
        nu: ev(&cp.nu)?,
        mus: ev(&adjoint(Adjoint::Mu, &cp.mu, g)?)?,
        split: bcols.hcat(&rg0),
        bcols,
        piv_b: rb.pivots,
        nus_piv,
        piv_nus: rn.pivots,
        rg0,
    };
    let i = iu();

    // W = Rg(Id − iJ) ⊕ iRg B ⊕ i(Rg ν*)₀
    let mut gens: Vec<Vec<QI>> = (0..n)
        .map(|a| {
            let mut e = vec![QI::zero(); n];
            e[a] = QI::one();
            sub(&e, &scale(&cv(&blocks.j.column(a)), &i))
        })
        .collect();
    gens.extend(blocks.split.columns().iter().map(|col| scale(&cv(col), &i)));
    let w = canonical_span(n, &gens);

    // D = {(Id − iA)r − iνξ | Bξ = ν*r}
    let ker = b.hcat(&-&nus).nullspace();
    let dgens: Vec<Vec<QI>> = ker
        .iter()
        .map(|v| {
            let (xi, r) = v.split_at(n);
            let ar = blocks.a.apply(r);
            let nxi = blocks.nu.apply(xi);
            (0..m).map(|k| QI::new(r[k].clone(), -(ar[k].clone() + nxi[k].clone()))).collect()
        })
        .collect();
    let d = canonical_span(m, &dgens);

    let k = w.cols();
    let mut sigma_cols = Vec::with_capacity(k);
    let mut s1s = Vec::with_capacity(k);
    let mut etas = Vec::with_capacity(k);
    for col in w.columns() {
        let (s1, eta) = blocks.sigma1_eta(&col)?;
        let (s1i, etai) = blocks.sigma1_eta(&scale(&col, &i))?;
        let s = scale(&sub(&s1, &scale(&s1i, &i)), &QI::from_q(qr(1, 2)));
        sigma_cols.push(s);
        s1s.push(s1);
        etas.push((eta, etai));
    }
    let sigma = Matrix::from_columns(m, &sigma_cols);
    let gc = cx(g);
    let quarter = QI::from_q(qr(1, 4));
    let half = QI::from_q(qr(1, 2));
    let epsilon = Matrix::from_fn(k, k, |a, bb| {
        let y = w.column(bb);
        let (eta, etai) = &etas[a];
        let first = (dot(eta, &y) - i.clone() * dot(etai, &y)) * quarter.clone();
        first + half.clone() * dot(&sigma_cols[a], &gc.apply(&sigma_cols[bb]))
    });

    let block = BlockMatrix::assemble(&cp, g)?.matrix.eval(p)?;
    let big = 2 * n + m;
    let lmat = &cx(&Matrix::identity(big)) - &cx(&block).scale(&i);
    let l = canonical_span(big, &lmat.columns());

    Ok(PointwiseLData {
        point: p.to_vec(),
        w,
        d,
        sigma,
        epsilon,
        complement_b: blocks.piv_b.clone(),
        complement_nus: blocks.piv_nus.clone(),
        rg_nus0: blocks.rg0.clone(),
        l,
        metric: g.clone(),
    })
}

impl PointwiseLData {
    fn n(&self) -> usize {
        self.w.rows()
    }

    fn m(&self) -> usize {
        self.d.rows()
    }

    fn pair(&self, r: &[QI], s: &[QI]) -> QI {
        dot(r, &cx(&self.metric).apply(s))
    }

    /// Covector `ξ` with `ξ(w_j) = rhs_j`.
    fn covector(&self, rhs: &[QI]) -> Result<Vec<QI>> {
        self.w.transpose().solve(rhs).ok_or_else(|| Error::Precondition("W basis is dependent".into()))
    }

    /// `L(W, D, σ, ε)` as a spanning set of columns.
    pub fn reconstruct(&self) -> Result<Matrix<QI>> {
        let (n, m) = (self.n(), self.m());
        let k = self.w.cols();
        let two = QI::from_q(Q::from_integer(2.into()));
        let mut cols = Vec::new();
        let col = |x: &[QI], xi: &[QI], r: &[QI]| -> Vec<QI> { x.iter().chain(xi).chain(r).cloned().collect() };
        for a in 0..k {
            let sx = self.sigma.column(a);
            let rhs: Vec<QI> =
                (0..k).map(|b| two.clone() * self.epsilon[(a, b)].clone() - self.pair(&self.sigma.column(b), &sx)).collect();
            cols.push(col(&self.w.column(a), &self.covector(&rhs)?, &sx));
        }
        for r in self.d.columns() {
            let rhs: Vec<QI> = (0..k).map(|b| -(two.clone() * self.pair(&self.sigma.column(b), &r))).collect();
            cols.push(col(&vec![QI::zero(); n], &self.covector(&rhs)?, &r));
        }
        for ann in self.w.transpose().nullspace() {
            cols.push(col(&vec![QI::zero(); n], &ann, &vec![QI::zero(); m]));
        }
        Ok(Matrix::from_columns(2 * n + m, &cols))
    }

    /// `ε` recomputed from lifts `u ∈ L` with `π u = w_j` and `π_G u = σ(w_j)`.
    pub fn epsilon_from_lift(&self, sigma: &Matrix<QI>) -> Result<Matrix<QI>> {
        let (n, m) = (self.n(), self.m());
        let k = self.w.cols();
        let lt = self.l.block(0, 0, n, self.l.cols());
        let lg = self.l.block(2 * n, 0, m, self.l.cols());
        let sys = lt.vcat(&lg);
        let half = QI::from_q(qr(1, 2));
        let mut xis = Vec::with_capacity(k);
        for a in 0..k {
            let rhs: Vec<QI> = self.w.column(a).into_iter().chain(sigma.column(a)).collect();
            let x = sys.solve(&rhs).ok_or_else(|| Error::Precondition(format!("sigma(w_{a}) is not in D_(w_{a})")))?;
            xis.push(self.l.block(n, 0, n, self.l.cols()).apply(&x));
        }
        Ok(Matrix::from_fn(k, k, |a, b| {
            half.clone() * (dot(&xis[a], &self.w.column(b)) + self.pair(&sigma.column(a), &sigma.column(b)))
        }))
    }

    /// Replaces `σ` by another admissible choice and recomputes `ε` accordingly.
    pub fn regauge(&self, sigma: Matrix<QI>) -> Result<PointwiseLData> {
        if sigma.rows() != self.m() || sigma.cols() != self.w.cols() {
            return Err(Error::Shape("sigma must be m x dim W".into()));
        }
        let epsilon = self.epsilon_from_lift(&sigma)?;
        Ok(PointwiseLData { sigma, epsilon, ..self.clone() })
    }

    pub fn check(&self) -> Result<LDataCheck> {
        let (n, m) = (self.n(), self.m());
        let lc = self.l.cols();
        let lt = self.l.block(0, 0, n, lc);
        let w_is_projection = same_column_span(&self.w, &lt);

        let kernel: Vec<Vec<QI>> = lt.nullspace().iter().map(|x| self.l.block(2 * n, 0, m, lc).apply(x)).collect();
        let d_kernel = canonical_span(m, &kernel);
        let d_is_kernel_projection = same_column_span(&self.d, &d_kernel) && self.d.cols() == d_kernel.cols();

        let gram = &(&self.d.transpose() * &cx(&self.metric)) * &self.d;
        let d_maximally_isotropic = gram.is_zero() && 2 * self.d.cols() == m;

        let epsilon_antisymmetric = (&self.epsilon + &self.epsilon.transpose()).is_zero();
        let epsilon_oracle = self.epsilon_from_lift(&self.sigma).map(|e| e == self.epsilon).unwrap_or(false);

        let rec = self.reconstruct()?;
        let reconstruction = same_column_span(&rec, &self.l);
        let transversal = rec.hcat(&rec.conj()).rank() == 2 * rec.rank() && 2 * rec.rank() == 2 * n + m;

        Ok(LDataCheck {
            w_is_projection,
            d_is_kernel_projection,
            d_maximally_isotropic,
            epsilon_antisymmetric,
            epsilon_oracle,
            reconstruction,
            transversal,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{complex_type, u2};

    #[test]
    fn complex_type_has_holomorphic_tangent_part() {
        let (_, c) = complex_type(2).unwrap();
        let ld = pointwise_ldata(&c, &u2().metric, &[qr(1, 1), qr(-1, 2)]).unwrap();
        assert_eq!(ld.w.cols(), 1);
        assert!(ld.sigma.is_zero() && ld.epsilon.is_zero());
        assert!(ld.check().unwrap().pass());
    }

    #[test]
    fn regauge_rejects_wrong_shapes() {
        let (_, c) = complex_type(2).unwrap();
        let ld = pointwise_ldata(&c, &u2().metric, &[Q::zero(), Q::zero()]).unwrap();
        assert!(ld.regauge(Matrix::zeros(2, 2)).is_err());
    }
}
