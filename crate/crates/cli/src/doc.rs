//! Typed access to input documents, and the inverse serialization.

use courant_core::courant::{CourantData, LieAlgebraBundle};
use courant_core::field::{parse_rational, Q, QI};
use courant_core::gacs::{GacsComponents, NondegSeed};
use courant_core::quadlie::{LieAlgebra, QuadLieAlgebra};
use courant_core::symcalc::{increasing_tuples, Chart, FiberValuedForm, KForm};
use courant_core::transport::IsoData;
use courant_core::{Matrix, PolyMatrix, Scalar};
use serde_json::{json, Value};

use crate::error::{CliError, Outcome};

pub fn child(ptr: &str, key: impl std::fmt::Display) -> String {
    let k = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{ptr}/{k}")
}

fn bad(ptr: &str, msg: impl Into<String>) -> CliError {
    CliError::Input { pointer: ptr.to_string(), message: msg.into() }
}

/// Maps a core error raised while interpreting the value at `ptr`.
pub fn at(ptr: &str) -> impl Fn(courant_core::Error) -> Outcome + '_ {
    move |e| Outcome::from_core(e, ptr)
}

pub fn rational(v: &Value, ptr: &str) -> Result<Q, CliError> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(Q::from_integer(n.as_i64().unwrap().into())),
        Value::String(s) => parse_rational(s).ok_or_else(|| bad(ptr, format!("{s:?} is not a rational"))),
        _ => Err(bad(ptr, "expected an integer or a rational string")),
    }
}

pub fn poly(v: &Value, chart: &Chart, ptr: &str) -> Result<Scalar, CliError> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(Scalar::from_i64(n.as_i64().unwrap())),
        Value::String(s) => chart.parse(s).map_err(|e| bad(ptr, e.to_string())),
        _ => Err(bad(ptr, "expected an integer or a polynomial string")),
    }
}

fn array<'v>(v: &'v Value, ptr: &str) -> Result<&'v Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| bad(ptr, "expected an array"))
}

fn matrix_with<T: courant_core::Ring>(
    v: &Value,
    ptr: &str,
    shape: (usize, usize),
    mut entry: impl FnMut(&Value, &str) -> Result<T, CliError>,
) -> Result<Matrix<T>, CliError> {
    let rows = array(v, ptr)?;
    if rows.len() != shape.0 {
        return Err(bad(ptr, format!("expected {} rows, found {}", shape.0, rows.len())));
    }
    let mut out = Matrix::zeros(shape.0, shape.1);
    for (i, row) in rows.iter().enumerate() {
        let rp = child(ptr, i);
        let row = array(row, &rp)?;
        if row.len() != shape.1 {
            return Err(bad(&rp, format!("expected {} entries, found {}", shape.1, row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            out[(i, j)] = entry(e, &child(&rp, j))?;
        }
    }
    Ok(out)
}

pub fn rational_matrix(v: &Value, ptr: &str, m: Option<usize>) -> Result<Matrix<Q>, CliError> {
    let rows = array(v, ptr)?.len();
    let m = m.unwrap_or(rows);
    matrix_with(v, ptr, (m, m), rational)
}

pub fn poly_matrix(v: &Value, chart: &Chart, ptr: &str, shape: (usize, usize)) -> Result<PolyMatrix, CliError> {
    matrix_with(v, ptr, shape, |e, p| poly(e, chart, p))
}

pub fn rational_vector(v: &Value, ptr: &str, len: usize) -> Result<Vec<Q>, CliError> {
    let items = array(v, ptr)?;
    if items.len() != len {
        return Err(bad(ptr, format!("expected {len} coordinates, found {}", items.len())));
    }
    items.iter().enumerate().map(|(i, e)| rational(e, &child(ptr, i))).collect()
}

/// A skew matrix `[a][b] = β(∂a, ∂b)` as a 2-form.
pub fn two_form(v: &Value, chart: &Chart, ptr: &str) -> Result<KForm, CliError> {
    let n = chart.dim();
    let m = poly_matrix(v, chart, ptr, (n, n))?;
    if !m.is_antisymmetric() {
        return Err(bad(ptr, "2-form matrix must be skew-symmetric"));
    }
    KForm::from_map(&m.transpose()).map_err(|e| bad(ptr, e.to_string()))
}

/// An input document; every accessor reports failures with a JSON pointer.
pub struct Doc<'a> {
    root: &'a Value,
}

impl<'a> Doc<'a> {
    pub fn new(root: &'a Value) -> Self {
        Doc { root }
    }

    pub fn has(&self, key: &str) -> bool {
        self.root.get(key).is_some()
    }

    fn field(&self, key: &str, why: &str) -> Result<&'a Value, CliError> {
        self.root.get(key).ok_or_else(|| CliError::Missing { pointer: format!("/{key}"), reason: why.to_string() })
    }

    pub fn chart(&self) -> Result<Chart, CliError> {
        let v = self.field("chart", "coordinates are needed to read polynomials")?;
        let chart = match v {
            Value::Number(n) => Chart::standard(n.as_u64().unwrap_or(0) as usize),
            Value::Array(items) => {
                let names = items
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.as_str().map(str::to_string).ok_or_else(|| bad(&child("/chart", i), "expected a string")))
                    .collect::<Result<Vec<_>, _>>()?;
                Chart::new(names)
            }
            _ => return Err(bad("/chart", "expected a dimension or a list of names")),
        };
        chart.map_err(|e| bad("/chart", e.to_string()))
    }

    pub fn algebra(&self) -> Result<LieAlgebra, CliError> {
        let v = self.field("algebra", "the fiber Lie algebra is required")?;
        if let Some(d) = v.get("differentials") {
            let items = array(d, "/algebra/differentials")?;
            let strs = items
                .iter()
                .enumerate()
                .map(|(i, s)| s.as_str().ok_or_else(|| bad(&child("/algebra/differentials", i), "expected a string")))
                .collect::<Result<Vec<_>, _>>()?;
            return LieAlgebra::from_differentials(&strs).map_err(|e| bad("/algebra/differentials", e.to_string()));
        }
        let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| bad("/algebra/dim", "expected a positive integer"))? as usize;
        let items = array(v.get("constants").unwrap_or(&Value::Null), "/algebra/constants")?;
        let mut entries = Vec::new();
        for (t, e) in items.iter().enumerate() {
            let p = child("/algebra/constants", t);
            let e = array(e, &p)?;
            if e.len() != 4 {
                return Err(bad(&p, "expected [i, j, k, c]"));
            }
            let idx = |s: usize| {
                e[s].as_u64().filter(|&v| v >= 1).map(|v| v as usize - 1).ok_or_else(|| bad(&child(&p, s), "expected a 1-based index"))
            };
            entries.push((idx(0)?, idx(1)?, idx(2)?, rational(&e[3], &child(&p, 3))?));
        }
        LieAlgebra::from_constants(dim, &entries).map_err(|e| bad("/algebra/constants", e.to_string()))
    }

    pub fn metric(&self, m: usize) -> Result<Matrix<Q>, CliError> {
        rational_matrix(self.field("metric", "the fiber metric is required")?, "/metric", Some(m))
    }

    pub fn optional_rational_matrix(&self, key: &str, m: Option<usize>) -> Result<Option<Matrix<Q>>, CliError> {
        self.root.get(key).map(|v| rational_matrix(v, &format!("/{key}"), m)).transpose()
    }

    /// The quadratic fiber; invariance failures are mathematical.
    pub fn fiber(&self) -> Result<QuadLieAlgebra, Outcome> {
        let l = self.algebra()?;
        let g = self.metric(l.dim())?;
        QuadLieAlgebra::new(l, g).map_err(at("/metric"))
    }

    pub fn data(&self) -> Result<CourantData, Outcome> {
        let chart = self.chart()?;
        let fiber = self.fiber()?;
        let (n, m) = (chart.dim(), fiber.dim());
        let conn = match self.root.get("connection") {
            None => vec![Matrix::zeros(m, m); n],
            Some(v) => {
                let items = array(v, "/connection")?;
                if items.len() != n {
                    return Err(bad("/connection", format!("expected one matrix per coordinate ({n})")).into());
                }
                items
                    .iter()
                    .enumerate()
                    .map(|(a, om)| poly_matrix(om, &chart, &child("/connection", a), (m, m)))
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        let mut r = FiberValuedForm::zero(n, m, 2);
        if let Some(v) = self.root.get("R") {
            for (t, e) in array(v, "/R")?.iter().enumerate() {
                let p = child("/R", t);
                let idx = indices(e, &child(&p, "idx"), 2, n)?;
                let vals = array(e.get("value").unwrap_or(&Value::Null), &child(&p, "value"))?;
                if vals.len() != m {
                    return Err(bad(&child(&p, "value"), format!("expected {m} fiber components")).into());
                }
                for (k, val) in vals.iter().enumerate() {
                    r.add_component(&idx, k, &poly(val, &chart, &child(&child(&p, "value"), k))?);
                }
            }
        }
        let mut h = KForm::zero(n, 3);
        if let Some(v) = self.root.get("H") {
            for (t, e) in array(v, "/H")?.iter().enumerate() {
                let p = child("/H", t);
                let idx = indices(e, &child(&p, "idx"), 3, n)?;
                h.add_component(&idx, &poly(e.get("value").unwrap_or(&Value::Null), &chart, &child(&p, "value"))?);
            }
        }
        let bundle = LieAlgebraBundle::new_unchecked(chart, fiber, conn).map_err(at("/connection"))?;
        CourantData::new(bundle, r, h).map_err(at(""))
    }

    pub fn gacs(&self, chart: &Chart, m: usize) -> Result<GacsComponents, Outcome> {
        let v = self.field("gacs", "the structure blocks are required")?;
        let n = chart.dim();
        let get = |k: &str, shape| poly_matrix(v.get(k).unwrap_or(&Value::Null), chart, &child("/gacs", k), shape);
        let c = GacsComponents::new(
            get("J", (n, n))?,
            get("A", (m, m))?,
            get("B", (n, n))?,
            get("C", (n, n))?,
            get("mu", (m, n))?,
            get("nu", (m, n))?,
        )
        .map_err(at("/gacs"))?;
        Ok(c)
    }

    /// The seed, from `/seed` or else recovered from `/gacs`.
    pub fn seed(&self, chart: &Chart, g: &Matrix<Q>) -> Result<NondegSeed, Outcome> {
        let m = g.rows();
        let n = chart.dim();
        match self.root.get("seed") {
            Some(v) => {
                let get = |k: &str, shape| poly_matrix(v.get(k).unwrap_or(&Value::Null), chart, &child("/seed", k), shape);
                NondegSeed::new(get("J", (n, n))?, get("Atilde", (m, m))?, get("B", (n, n))?, get("nu", (m, n))?, g)
                    .map_err(at("/seed"))
            }
            None if self.has("gacs") => {
                let c = self.gacs(chart, m)?;
                NondegSeed::from_components(&c, g).map_err(at("/gacs/B"))
            }
            None => Err(CliError::Missing { pointer: "/seed".into(), reason: "a seed or a structure is required".into() }.into()),
        }
    }

    pub fn iso(&self, chart: &Chart, m: usize) -> Result<IsoData, CliError> {
        iso_at(self.field("iso", "the isomorphism is required")?, "/iso", chart, m)
    }

    pub fn points(&self, n: usize) -> Result<Vec<Vec<Q>>, CliError> {
        match self.root.get("points") {
            None => Ok(Vec::new()),
            Some(v) => array(v, "/points")?.iter().enumerate().map(|(i, p)| rational_vector(p, &child("/points", i), n)).collect(),
        }
    }

    pub fn reference(&self) -> Option<&'a Value> {
        self.root.get("reference")
    }
}

pub fn iso_at(v: &Value, ptr: &str, chart: &Chart, m: usize) -> Result<IsoData, CliError> {
    let n = chart.dim();
    let get = |k: &str, shape| poly_matrix(v.get(k).unwrap_or(&Value::Null), chart, &child(ptr, k), shape);
    let k = get("K", (m, m))?;
    let phi = FiberValuedForm::from_matrix(&get("Phi", (m, n))?);
    let beta = two_form(v.get("beta").unwrap_or(&Value::Null), chart, &child(ptr, "beta"))?;
    IsoData::new(k, phi, beta).map_err(|e| bad(ptr, e.to_string()))
}

fn indices(e: &Value, ptr: &str, k: usize, n: usize) -> Result<Vec<usize>, CliError> {
    let items = array(e.get("idx").unwrap_or(&Value::Null), ptr)?;
    let idx: Vec<usize> = items
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_u64().filter(|&a| a >= 1 && a as usize <= n).map(|a| a as usize - 1).ok_or_else(|| bad(&child(ptr, i), format!("expected an index in 1..={n}")))
        })
        .collect::<Result<_, _>>()?;
    if idx.len() != k {
        return Err(bad(ptr, format!("expected {k} indices")));
    }
    let mut sorted = idx.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != k {
        return Err(bad(ptr, "indices must be distinct"));
    }
    Ok(idx)
}

// ---------------------------------------------------------------- writing

pub fn poly_json(p: &Scalar, names: &[String]) -> Value {
    Value::String(p.display_with(names))
}

pub fn rational_json(v: &Q) -> Value {
    if v.is_integer() {
        if let Ok(i) = v.to_integer().to_string().parse::<i64>() {
            return json!(i);
        }
    }
    Value::String(v.to_string())
}

pub fn complex_string(v: &QI) -> String {
    use num_traits::Zero;
    let (re, im) = (&v.re, &v.im);
    let imag = |x: &Q| if *x == Q::from_integer(1.into()) { "i".to_string() } else { format!("{x}*i") };
    match (re.is_zero(), im.is_zero()) {
        (_, true) => re.to_string(),
        (true, false) => {
            if *im == Q::from_integer((-1).into()) {
                "-i".to_string()
            } else {
                imag(im)
            }
        }
        (false, false) if *im < Q::zero() => format!("{re} - {}", imag(&-im.clone())),
        _ => format!("{re} + {}", imag(im)),
    }
}

pub fn poly_matrix_json(m: &PolyMatrix, names: &[String]) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array((0..m.cols()).map(|j| poly_json(&m[(i, j)], names)).collect())).collect())
}

pub fn rational_matrix_json(m: &Matrix<Q>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array((0..m.cols()).map(|j| rational_json(&m[(i, j)])).collect())).collect())
}

pub fn complex_matrix_json(m: &Matrix<QI>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array((0..m.cols()).map(|j| Value::String(complex_string(&m[(i, j)]))).collect())).collect())
}

/// `[a][b] = β(∂a, ∂b)`.
pub fn two_form_json(f: &KForm, names: &[String]) -> Value {
    poly_matrix_json(&f.to_map().transpose(), names)
}

pub fn algebra_json(l: &LieAlgebra) -> Value {
    let constants: Vec<Value> = l
        .nonzero_constants()
        .into_iter()
        .filter(|(i, j, _, _)| i < j)
        .map(|(i, j, k, c)| json!([i + 1, j + 1, k + 1, rational_json(&c)]))
        .collect();
    json!({ "dim": l.dim(), "constants": constants })
}

pub fn chart_json(c: &Chart) -> Value {
    json!(c.names())
}

/// Data fields of a document: chart, algebra, metric and the nonzero parts of `(∇, R, H)`.
pub fn data_json(d: &CourantData) -> serde_json::Map<String, Value> {
    let names = d.bundle.chart().names().to_vec();
    let n = d.dim();
    let mut out = serde_json::Map::new();
    out.insert("chart".into(), chart_json(d.bundle.chart()));
    out.insert("algebra".into(), algebra_json(&d.bundle.fiber().algebra));
    out.insert("metric".into(), rational_matrix_json(&d.bundle.fiber().metric));
    if d.bundle.connection().iter().any(|om| !om.is_zero()) {
        out.insert("connection".into(), Value::Array(d.bundle.connection().iter().map(|om| poly_matrix_json(om, &names)).collect()));
    }
    let r: Vec<Value> = increasing_tuples(n, 2)
        .into_iter()
        .filter_map(|t| {
            let col = d.r.column(&t);
            col.iter().any(|v| !v.is_zero()).then(|| {
                json!({ "idx": [t[0] + 1, t[1] + 1], "value": col.iter().map(|v| poly_json(v, &names)).collect::<Vec<_>>() })
            })
        })
        .collect();
    if !r.is_empty() {
        out.insert("R".into(), Value::Array(r));
    }
    let h: Vec<Value> = d
        .h
        .terms()
        .into_iter()
        .map(|(t, v)| json!({ "idx": t.iter().map(|a| a + 1).collect::<Vec<_>>(), "value": poly_json(v, &names) }))
        .collect();
    if !h.is_empty() {
        out.insert("H".into(), Value::Array(h));
    }
    out
}

pub fn gacs_json(c: &GacsComponents, names: &[String]) -> Value {
    json!({
        "J": poly_matrix_json(&c.j, names),
        "A": poly_matrix_json(&c.a, names),
        "B": poly_matrix_json(&c.b, names),
        "C": poly_matrix_json(&c.c, names),
        "mu": poly_matrix_json(&c.mu, names),
        "nu": poly_matrix_json(&c.nu, names),
    })
}

pub fn seed_json(s: &NondegSeed, names: &[String]) -> Value {
    json!({
        "J": poly_matrix_json(&s.j, names),
        "Atilde": poly_matrix_json(&s.atilde, names),
        "B": poly_matrix_json(&s.b, names),
        "nu": poly_matrix_json(&s.nu, names),
    })
}

pub fn iso_json(i: &IsoData, names: &[String]) -> Value {
    json!({
        "K": poly_matrix_json(&i.k, names),
        "Phi": poly_matrix_json(&i.phi.to_matrix(), names),
        "beta": two_form_json(&i.beta, names),
    })
}

/// Full document for `d` with structure `c`.
pub fn structure_doc(d: &CourantData, c: &GacsComponents) -> Value {
    let mut doc = data_json(d);
    doc.insert("gacs".into(), gacs_json(c, d.bundle.chart().names()));
    Value::Object(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use courant_core::instances::{canonical_symplectic, random_iso, twist};
    use rand::SeedableRng;

    #[test]
    fn pointers_escape_keys() {
        assert_eq!(child("/a", "b/c~d"), "/a/b~1c~0d");
        assert_eq!(child("", 3), "/3");
    }

    #[test]
    fn structures_round_trip_through_json() {
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let (d0, c0) = canonical_symplectic(4, &Scalar::var(0)).unwrap();
        let iso = random_iso(&mut r, 4);
        let (d, c) = twist(&d0, &c0, &iso).unwrap();
        let mut v = structure_doc(&d, &c);
        v["iso"] = iso_json(&iso, d.bundle.chart().names());
        let text = serde_json::to_string(&v).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        crate::validate(&back).unwrap();
        let doc = Doc::new(&back);
        let d2 = doc.data().map_err(|_| "data").unwrap();
        assert_eq!(d2, d);
        let chart = doc.chart().unwrap();
        assert_eq!(doc.gacs(&chart, 4).map_err(|_| "gacs").unwrap(), c);
        assert_eq!(doc.iso(&chart, 4).unwrap(), iso);
    }

    #[test]
    fn rationals_and_complex_numbers_print_exactly() {
        let h = Q::new(1.into(), 2.into());
        assert_eq!(rational_json(&Q::from_integer(3.into())), json!(3));
        assert_eq!(rational(&rational_json(&h), "/x").unwrap(), h);
        assert_eq!(rational(&json!("-3 / 4"), "/x").unwrap(), Q::new((-3).into(), 4.into()));
        assert!(rational(&json!(1.5), "/x").is_err());
        let z = QI::new(h.clone(), -h.clone());
        let s = complex_string(&z);
        assert!(s.contains("1/2") && s.contains('i'), "{s}");
    }
}
