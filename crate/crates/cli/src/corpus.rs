//! Built-in reference inputs, each a list of jobs with their expected outcomes.

use courant_core::field::{q, Q, QI};
use courant_core::instances::{canonical_symplectic, darboux_form, hopf_chart, random_iso, twist, u2_complex_structure};
use courant_core::quadlie::{build_double, complex_structure_from_forms, LieAlgebra};
use courant_core::{Matrix, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::doc::{self, algebra_json, rational_matrix_json, structure_doc};
use crate::{CliError, Command, Job, Options, Suite};

pub const NAMES: [&str; 7] =
    ["lemma-7param", "lemma-ex2", "double-sl2", "canonical-symplectic", "twist-roundtrip", "hopf-chart", "dorfman-axioms"];

const NO_CX: [&str; 6] = ["0", "0", "0", "12", "14", "24"];
const EX2: [&str; 6] = ["0", "0", "0", "12", "13", "23"];

/// Symmetric 6x6 matrix from 1-based upper entries.
fn sym6(entries: &[(usize, usize, i64)]) -> Matrix<Q> {
    let mut m = Matrix::zeros(6, 6);
    for &(i, j, v) in entries {
        m[(i - 1, j - 1)] = q(v);
        m[(j - 1, i - 1)] = q(v);
    }
    m
}

pub fn jobs(name: &str, opts: &Options) -> Result<Vec<Job>, CliError> {
    let with = |j: Job| j.with_options(|o| *o = opts.clone());
    let jobs = match name {
        "lemma-7param" => vec![with(
            Job::new(
                "invariant forms on (0,0,0,12,14,24)",
                Command::InvariantForms,
                json!({
                    "algebra": { "differentials": NO_CX },
                    "form": rational_matrix_json(&sym6(&[(1, 6, 1), (2, 5, -1), (3, 3, -1), (4, 4, 1)])),
                }),
            )
            .expect_value("dimension", 7)
            .expect_value("form signature", json!([3, 3, 0])),
        )],
        "lemma-ex2" => {
            let i = QI::new(q(0), q(1));
            let one = QI::new(q(1), q(0));
            let forms: Vec<Vec<QI>> = (0..3)
                .map(|k| (0..6).map(|a| if a == 2 * k { one.clone() } else if a == 2 * k + 1 { i.clone() } else { QI::new(q(0), q(0)) }).collect())
                .collect();
            let j = complex_structure_from_forms(&forms).expect("independent forms");
            let rho = sym6(&[(1, 6, 1), (2, 5, -1), (3, 4, 1)]);
            vec![
                with(
                    Job::new("invariant forms on (0,0,0,12,13,23)", Command::InvariantForms, json!({ "algebra": { "differentials": EX2 } }))
                        .expect_value("dimension", 7),
                ),
                with(
                    Job::new(
                        "split metric and integrable J on (0,0,0,12,13,23)",
                        Command::CheckLie,
                        json!({
                            "algebra": { "differentials": EX2 },
                            "metric": rational_matrix_json(&rho),
                            "complex_structure": rational_matrix_json(&j),
                        }),
                    )
                    .expect_value("metric signature", json!([3, 3, 0]))
                    .expect_fail("J skew for the metric"),
                ),
            ]
        }
        "double-sl2" => {
            let sl2 = LieAlgebra::from_constants(3, &[(0, 1, 1, q(2)), (0, 2, 2, q(-2)), (1, 2, 0, q(1))]).expect("sl2");
            let dbl = build_double(&sl2).expect("double of sl2");
            vec![with(
                Job::new(
                    "double of sl(2)",
                    Command::CheckLie,
                    json!({ "algebra": algebra_json(&dbl.algebra), "metric": rational_matrix_json(&dbl.metric) }),
                )
                .expect_value("metric signature", json!([3, 3, 0])),
            )]
        }
        "canonical-symplectic" => {
            let mut out = Vec::new();
            for n in [2, 4] {
                let (d, c) = canonical_symplectic(n, &Scalar::zero()).expect("canonical structure");
                let names = d.bundle.chart().names().to_vec();
                let mut normal = structure_doc(&d, &c);
                normal["reference"] = json!({
                    "omega": doc::two_form_json(&darboux_form(n, &Scalar::zero()), &names),
                    "A": doc::rational_matrix_json(&u2_complex_structure()),
                });
                out.push(with(
                    Job::new(format!("normal form, {n}-chart"), Command::NormalForm, normal).expect_value("reduction is trivial", true),
                ));
                out.push(with(Job::new(format!("integrability, {n}-chart"), Command::Integrability, structure_doc(&d, &c)))
                    .with_options(|o| o.suite = Suite::All));
            }
            out
        }
        "twist-roundtrip" => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let n = 4;
            let x = Scalar::var;
            let h = &x(0) * &x(2);
            let (d0, c0) = canonical_symplectic(n, &h).expect("canonical structure");
            let names = d0.bundle.chart().names().to_vec();
            let mut out = Vec::new();
            for k in 1..=3 {
                let iso = random_iso(&mut rng, n);
                let (d, c) = twist(&d0, &c0, &iso).expect("twist of a valid structure");
                let mut v = structure_doc(&d, &c);
                v["reference"] = json!({
                    "omega": doc::two_form_json(&darboux_form(n, &h), &names),
                    "A": doc::rational_matrix_json(&u2_complex_structure()),
                    "iso": doc::iso_json(&iso, &names),
                });
                out.push(with(Job::new(format!("twist {k}: normal form"), Command::NormalForm, v)));
                out.push(with(Job::new(format!("twist {k}: integrability"), Command::Integrability, structure_doc(&d, &c))));
            }
            out
        }
        "hopf-chart" => {
            let (d, c) = hopf_chart().expect("hopf structure");
            let mut v = structure_doc(&d, &c);
            v["points"] = json!([[1, 0, 1, 0], [0, 0, 1, 0], [0, 0, 0, 0], [1, 1, "1/2", -2]]);
            vec![
                with(
                    Job::new("hopf chart: algebraic", Command::CheckGacs, v.clone())
                        .expect_value("rank B at (1,0,1,0)", 4)
                        .expect_value("rank B at (0,0,1,0)", 0),
                ),
                with(Job::new("hopf chart: integrability", Command::Integrability, structure_doc(&d, &c))),
                with(Job::new("hopf chart: L-data", Command::Ldata, v)),
            ]
        }
        "dorfman-axioms" => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
            let n = 4;
            let (d0, c0) = canonical_symplectic(n, &Scalar::zero()).expect("canonical structure");
            let (d, _) = twist(&d0, &c0, &random_iso(&mut rng, n)).expect("twist");
            let good = Value::Object(doc::data_json(&d));
            let mut bad = d.clone();
            bad.h.add_component(&[1, 2, 3], &Scalar::var(0));
            let bad = Value::Object(doc::data_json(&bad));
            vec![
                with(Job::new("twisted data", Command::CheckCourant, good)),
                with(
                    Job::new("H perturbed by x1 dx2^dx3^dx4", Command::CheckCourant, bad)
                        .expect_fail("dH = <R ^ R>")
                        .expect_fail("Jacobi identity (random sections)")
                        .expect_fail("Jacobi identity (frame triples)"),
                ),
            ]
        }
        "all" => {
            let mut out = Vec::new();
            for n in NAMES {
                out.extend(jobs(n, opts)?.into_iter().map(|mut j| {
                    j.name = format!("{n}: {}", j.name);
                    j
                }));
            }
            out
        }
        other => return Err(CliError::UnknownCorpus(other.to_string(), format!("{}, all", NAMES.join(", ")))),
    };
    Ok(jobs)
}
