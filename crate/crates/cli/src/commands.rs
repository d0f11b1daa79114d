//! One function per command; each fills a [`SectionReport`].

use courant_core::courant::{dorfman_axioms, jacobi_frame_scan, CourantData, Section};
use courant_core::field::{Q, QI};
use courant_core::gacs::{
    b_j, check_algebraic, flat_curvature_check, nijenhuis_oracle, nondeg_complete, nondeg_integrability,
    poisson_residual, pointwise_ldata, run_suite, GacsComponents, SUITE_10,
};
use courant_core::quadlie::{
    complex_structure_check, holomorphic_closure, invariance_defects, invariant_sym_forms, signature,
};
use courant_core::symcalc::Chart;
use courant_core::transport::{apply_iso, compose, invert_iso, normal_form, transform_data, transform_gacs, IsoData};
use courant_core::Matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::doc::{self, at, Doc};
use crate::error::{CliError, Outcome};
use crate::report::SectionReport;
use crate::{Command, NondegMode, Options, Suite};

type Run = Result<(), Outcome>;

pub fn execute(cmd: Command, root: &Value, opts: &Options, sec: &mut SectionReport) -> Result<(), CliError> {
    let d = Doc::new(root);
    let res = match cmd {
        Command::CheckLie => check_lie(&d, sec),
        Command::InvariantForms => invariant_forms(&d, sec),
        Command::Signature => signature_cmd(&d, sec),
        Command::CheckCourant => check_courant(&d, opts, sec),
        Command::CheckGacs => check_gacs(&d, opts, sec),
        Command::Integrability => integrability(&d, opts, sec),
        Command::Nondeg => nondeg(&d, opts, sec),
        Command::Ldata => ldata(&d, opts, sec),
        Command::Transport => transport(&d, opts, sec),
        Command::NormalForm => normal_form_cmd(&d, sec),
    };
    match res {
        Ok(()) => Ok(()),
        Err(Outcome::Input(e)) => Err(e),
        Err(Outcome::Math(msg)) => {
            sec.precondition_failed(&msg);
            Ok(())
        }
    }
}

fn point_label(p: &[Q]) -> String {
    format!("({})", p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
}

fn frame_label(chart: &Chart, m: usize, i: usize) -> String {
    let n = chart.dim();
    let names = chart.names();
    if i < n {
        format!("d/d{}", names[i])
    } else if i < 2 * n {
        format!("d{}", names[i - n])
    } else {
        let _ = m;
        format!("e{}", i - 2 * n + 1)
    }
}

fn signature_json(g: &Matrix<Q>) -> Option<Value> {
    signature(g).ok().map(|s| json!([s.positive, s.negative, s.zero]))
}

// ---------------------------------------------------------------- Lie algebra level

fn check_lie(d: &Doc, sec: &mut SectionReport) -> Run {
    let l = d.algebra()?;
    let m = l.dim();
    sec.value("dimension", m);
    let bad = l.jacobi_check();
    sec.flag_with("Jacobi identity", bad.is_empty(), if bad.is_empty() { String::new() } else { format!("triples {bad:?}") });
    let g = d.optional_rational_matrix("metric", Some(m))?;
    if let Some(g) = &g {
        let sym = g.is_symmetric();
        sec.flag("metric symmetric", sym);
        sec.flag("metric nondegenerate", !num_traits::Zero::is_zero(&g.det_field()));
        let inv = invariance_defects(&l, g);
        sec.flag_with("metric ad-invariant", inv.is_empty(), if inv.is_empty() { String::new() } else { format!("triples {inv:?}") });
        if let Some(s) = signature_json(g) {
            sec.value("metric signature", s);
        }
    }
    if let Some(j) = d.optional_rational_matrix("complex_structure", Some(m))? {
        let metric = g.clone().unwrap_or_else(|| Matrix::identity(m));
        let rep = complex_structure_check(&l, &metric, &j);
        sec.flag("J^2 = -Id", rep.square);
        if g.is_some() {
            sec.flag_with(
                "J skew for the metric",
                rep.skew,
                if rep.skew { String::new() } else { format!("defects on pairs {:?}", rep.skew_defects) },
            );
        } else {
            sec.skip("J skew for the metric", "no /metric given");
        }
        sec.flag_with(
            "J integrable (Nijenhuis)",
            rep.integrable,
            if rep.integrable { String::new() } else { format!("defects on pairs {:?}", rep.nijenhuis_defects) },
        );
        if rep.square {
            sec.flag("(1,0)-space closure agrees with Nijenhuis", holomorphic_closure(&l, &j) == rep.integrable);
        } else {
            sec.skip("(1,0)-space closure agrees with Nijenhuis", "J^2 != -Id");
        }
    }
    Ok(())
}

fn invariant_forms(d: &Doc, sec: &mut SectionReport) -> Run {
    let l = d.algebra()?;
    let fam = invariant_sym_forms(&l);
    sec.value("dimension", fam.dimension());
    sec.value("parameters", json!(fam.params));
    sec.value("general element", doc::poly_matrix_json(&fam.general_element(), &fam.params));
    if let Some(f) = d.optional_rational_matrix("form", Some(l.dim()))? {
        sec.flag("form is invariant", fam.contains(&f));
        if let Some(s) = signature_json(&f) {
            sec.value("form signature", s);
        }
    }
    Ok(())
}

fn signature_cmd(d: &Doc, sec: &mut SectionReport) -> Run {
    let (key, f) = match d.optional_rational_matrix("form", None)? {
        Some(f) => ("/form", f),
        None => ("/metric", d.optional_rational_matrix("metric", None)?.ok_or_else(|| CliError::Missing {
            pointer: "/form".into(),
            reason: "signature needs /form or /metric".into(),
        })?),
    };
    let s = signature(&f).map_err(at(key))?;
    sec.value("signature", json!([s.positive, s.negative, s.zero]));
    Ok(())
}

// ---------------------------------------------------------------- algebroid level

/// Adds the defining-data checks; returns whether all passed.
fn defining_data(d: &CourantData, sec: &mut SectionReport) -> bool {
    let defects = d.bundle.connection_defects();
    let mut ok = sec.flag_with(
        "connection is a derivation",
        defects.derivation.is_empty(),
        if defects.derivation.is_empty() { String::new() } else { format!("(coordinate, i, j) {:?}", defects.derivation) },
    );
    ok &= sec.flag("connection is metric", defects.metric.is_empty());
    let rep = d.check_defining_data();
    ok &= sec.zero("curvature of connection = ad R", rep.curvature.as_slice());
    ok &= sec.zero("Bianchi d^nabla R = 0", &rep.bianchi);
    ok &= sec.zero("dH = <R ^ R>", &rep.h_closure);
    ok
}

fn load_data(d: &Doc, sec: &mut SectionReport) -> Result<CourantData, Outcome> {
    let data = d.data()?;
    sec.set_names(data.bundle.chart().names());
    Ok(data)
}

fn check_courant(d: &Doc, opts: &Options, sec: &mut SectionReport) -> Run {
    let data = load_data(d, sec)?;
    defining_data(&data, sec);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let ax = dorfman_axioms(&data, &mut rng, opts.trials);
    sec.value("random section tuples", opts.trials);
    sec.zero("symmetrization [u,v] + [v,u] = 2d<u,v>", &ax.symmetrization);
    sec.zero("anchor is a morphism", &ax.anchor);
    sec.zero("metric compatibility", &ax.metric);
    sec.zero("Leibniz rule", &ax.leibniz);
    sec.zero("Jacobi identity (random sections)", &ax.jacobi);
    let chart = data.bundle.chart().clone();
    let m = data.fiber_dim();
    match jacobi_frame_scan(&data) {
        None => sec.flag("Jacobi identity (frame triples)", true),
        Some((i, j, k)) => sec.flag_with(
            "Jacobi identity (frame triples)",
            false,
            format!(
                "nonzero on ({}, {}, {})",
                frame_label(&chart, m, i),
                frame_label(&chart, m, j),
                frame_label(&chart, m, k)
            ),
        ),
    };
    Ok(())
}

// ---------------------------------------------------------------- structures

fn load_structure(d: &Doc, sec: &mut SectionReport) -> Result<(CourantData, GacsComponents), Outcome> {
    let data = load_data(d, sec)?;
    let c = d.gacs(data.bundle.chart(), data.fiber_dim())?;
    Ok((data, c))
}

/// Algebraic checks; returns whether `c` is an almost complex structure.
fn algebraic(c: &GacsComponents, g: &Matrix<Q>, sec: &mut SectionReport) -> Result<bool, Outcome> {
    let rep = check_algebraic(c, g).map_err(at("/gacs"))?;
    let mut ok = true;
    for (name, res) in &rep.residuals {
        ok &= sec.zero(name, res);
    }
    sec.flag("block matrix squares to -Id", rep.block_square_ok);
    sec.flag("block matrix is skew", rep.block_skew_ok);
    sec.flag("component and block verdicts agree", rep.agree());
    Ok(ok && rep.block_pass())
}

fn points(d: &Doc, opts: &Options, n: usize) -> Result<Vec<Vec<Q>>, CliError> {
    for p in &opts.points {
        if p.len() != n {
            return Err(CliError::Option(format!("--point has {} coordinates, the chart has {n}", p.len())));
        }
    }
    let mut all = opts.points.clone();
    all.extend(d.points(n)?);
    Ok(all)
}

fn check_gacs(d: &Doc, opts: &Options, sec: &mut SectionReport) -> Run {
    let chart = d.chart()?;
    sec.set_names(chart.names());
    let fiber = d.fiber()?;
    let c = d.gacs(&chart, fiber.dim())?;
    algebraic(&c, &fiber.metric, sec)?;
    for p in points(d, opts, chart.dim())? {
        let b = c.b.eval(&p).map_err(at("/points"))?;
        sec.value(&format!("rank B at {}", point_label(&p)), b.rank());
    }
    Ok(())
}

fn integrability(d: &Doc, opts: &Options, sec: &mut SectionReport) -> Run {
    let (data, c) = load_structure(d, sec)?;
    let g = data.bundle.fiber().metric.clone();
    let data_ok = defining_data(&data, sec);
    let acs = algebraic(&c, &g, sec)?;
    if !(data_ok && acs) {
        sec.skip("integrability", "defining data or almost complex structure invalid");
        return Ok(());
    }
    let (run18, run10, oracle) = match opts.suite {
        Suite::S18 => (true, false, false),
        Suite::S10 => (false, true, false),
        Suite::Oracle => (false, false, true),
        Suite::All => (true, true, true),
    };
    let mut verdicts = Vec::new();
    if run18 {
        let all: Vec<usize> = (1..=18).collect();
        let rep = run_suite(&data, &c, &all, opts.parallel).map_err(at("/gacs"))?;
        for r in &rep.relations {
            sec.zero(&format!("relation {}", r.index), r.nonzero.as_slice());
        }
        verdicts.push(("18-relation suite", rep.pass()));
        sec.flag_with("18-relation suite", rep.pass(), failing_list(&rep.failing()));
    }
    if run10 {
        let rep = run_suite(&data, &c, &SUITE_10, opts.parallel).map_err(at("/gacs"))?;
        verdicts.push(("10-relation suite", rep.pass()));
        sec.flag_with("10-relation suite {1-9, 12}", rep.pass(), failing_list(&rep.failing()));
    }
    if oracle {
        let rep = nijenhuis_oracle(&data, &c).map_err(at("/gacs"))?;
        let chart = data.bundle.chart().clone();
        let m = data.fiber_dim();
        let labelled: Vec<(String, Section)> = rep
            .nonzero
            .iter()
            .map(|((i, j), s)| (format!("N({}, {})", frame_label(&chart, m, *i), frame_label(&chart, m, *j)), s.clone()))
            .collect();
        verdicts.push(("frame oracle", rep.pass()));
        sec.zero("Dorfman-Nijenhuis frame oracle", labelled.as_slice());
        sec.value("frame pairs checked", rep.pairs_checked);
    }
    if verdicts.len() > 1 {
        let agree = verdicts.iter().all(|(_, v)| *v == verdicts[0].1);
        let detail = verdicts.iter().map(|(n, v)| format!("{n}: {}", if *v { "pass" } else { "fail" })).collect::<Vec<_>>().join(", ");
        sec.flag_with("suite verdicts agree", agree, detail);
    }
    if run18 {
        let p = poisson_residual(&c).map_err(at("/gacs/B"))?;
        sec.zero("B is Poisson ([B,B] = 0)", &p.schouten);
        sec.flag("Poisson operator agrees with Schouten bracket", p.agree());
    }
    Ok(())
}

fn failing_list(v: &[usize]) -> String {
    if v.is_empty() {
        String::new()
    } else {
        format!("failing relations {v:?}")
    }
}

fn nondeg(d: &Doc, opts: &Options, sec: &mut SectionReport) -> Run {
    let chart = d.chart()?;
    sec.set_names(chart.names());
    let fiber = d.fiber()?;
    let g = fiber.metric.clone();
    let seed = d.seed(&chart, &g)?;
    sec.flag("seed invariants", true);
    if opts.nondeg != NondegMode::Check {
        let c = nondeg_complete(&seed, &g).map_err(at("/seed"))?;
        sec.value("components", doc::gacs_json(&c, chart.names()));
        let rep = check_algebraic(&c, &g).map_err(at("/seed"))?;
        sec.flag_with("completion is almost complex", rep.pass(), rep.failing().join("; "));
        if d.has("gacs") {
            let given = d.gacs(&chart, g.rows())?;
            sec.flag("completion reproduces /gacs", given == c);
        }
    }
    if opts.nondeg != NondegMode::Complete {
        let data = load_data(d, sec)?;
        if !defining_data(&data, sec) {
            sec.skip("integrability conditions", "defining data invalid");
            return Ok(());
        }
        let rep = nondeg_integrability(&seed, &data).map_err(at("/seed"))?;
        sec.zero("d(B^-1) = 0", &rep.symplectic);
        sec.flag_with(
            "A~ integrable on the fiber",
            rep.fiber_nijenhuis.is_empty(),
            if rep.fiber_nijenhuis.is_empty() { String::new() } else { format!("pairs {:?}", rep.fiber_nijenhuis) },
        );
        sec.zero("A~ parallel for the modified connection", rep.parallel.as_slice());
        sec.zero("curvature equation", &rep.curvature);
        sec.zero("H equation", &rep.h);
        let flat = flat_curvature_check(&seed, &data).map_err(at("/seed"))?;
        sec.zero("modified connection flat", flat.as_slice());
        sec.flag("nondegenerate verdict", rep.pass());
    }
    Ok(())
}

fn ldata(d: &Doc, opts: &Options, sec: &mut SectionReport) -> Run {
    let chart = d.chart()?;
    sec.set_names(chart.names());
    let fiber = d.fiber()?;
    let g = fiber.metric.clone();
    let c = d.gacs(&chart, fiber.dim())?;
    let pts = points(d, opts, chart.dim())?;
    if pts.is_empty() {
        return Err(CliError::Missing { pointer: "/points".into(), reason: "ldata needs --point or /points".into() }.into());
    }
    let gauge = match c.b.inverse_polynomial() {
        Ok(binv) => Some((binv, b_j(&c, &g).map_err(at("/gacs"))?)),
        Err(_) => None,
    };
    for p in pts {
        let label = point_label(&p);
        let ld = pointwise_ldata(&c, &g, &p).map_err(at("/gacs"))?;
        let check = ld.check().map_err(at("/gacs"))?;
        for (name, ok) in check.flags() {
            sec.flag(&format!("{name} at {label}"), ok);
        }
        sec.value(
            &format!("L-data at {label}"),
            json!({
                "W": doc::complex_matrix_json(&ld.w),
                "D": doc::complex_matrix_json(&ld.d),
                "sigma": doc::complex_matrix_json(&ld.sigma),
                "epsilon": doc::complex_matrix_json(&ld.epsilon),
            }),
        );
        if let Some((binv, bj)) = &gauge {
            let to_c = |m: &Matrix<Q>| m.map(|v| QI::new(v.clone(), Q::from_integer(0.into())));
            let sigma = &c.nu.eval(&p).map_err(at("/points"))? * &binv.eval(&p).map_err(at("/points"))?;
            let gauged = ld.regauge(to_c(&sigma)).map_err(at("/gacs"))?;
            let bjm = bj.to_map().eval(&p).map_err(at("/points"))?;
            let bi = binv.eval(&p).map_err(at("/points"))?;
            let half = Q::new(1.into(), 2.into());
            let expected = Matrix::from_fn(bi.rows(), bi.cols(), |a, b| {
                QI::new(bjm[(b, a)].clone() * half.clone(), bi[(b, a)].clone() * half.clone())
            });
            let ok = gauged.check().map_err(at("/gacs"))?.pass() && gauged.epsilon == expected;
            sec.flag(&format!("gauge sigma = nu B^-1 gives epsilon = (B_J + i B^-1)/2 at {label}"), ok);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- transport

fn transport(d: &Doc, opts: &Options, sec: &mut SectionReport) -> Run {
    let data = load_data(d, sec)?;
    let chart = data.bundle.chart().clone();
    let (n, m) = (data.dim(), data.fiber_dim());
    let iso = d.iso(&chart, m)?;
    iso.validate(&data.bundle).map_err(at("/iso/K"))?;
    sec.flag("K is a fiber automorphism", true);
    if !defining_data(&data, sec) {
        sec.skip("transport", "input defining data invalid");
        return Ok(());
    }
    let g = data.bundle.metric();
    let d2 = transform_data(&data, &iso).map_err(at("/iso"))?;
    sec.flag("transformed data pass the defining-data check", d2.check_defining_data().pass());
    sec.value("transformed data", Value::Object(doc::data_json(&d2)));

    let frame = Section::frame(n, m);
    let mut bracket = Vec::new();
    let mut metric = Vec::new();
    let mut anchor = true;
    let img: Vec<Section> = frame.iter().map(|u| apply_iso(&iso, &g, u)).collect::<Result<_, _>>().map_err(at("/iso"))?;
    for (i, u) in frame.iter().enumerate() {
        anchor &= img[i].x == u.x;
        for (j, v) in frame.iter().enumerate() {
            let lhs = apply_iso(&iso, &g, &data.dorfman(u, v).map_err(at(""))?).map_err(at("/iso"))?;
            let rhs = d2.dorfman(&img[i], &img[j]).map_err(at(""))?;
            let label = format!("({}, {})", frame_label(&chart, m, i), frame_label(&chart, m, j));
            bracket.push((label.clone(), &lhs - &rhs));
            let pm = &d2.scalar_product(&img[i], &img[j]).map_err(at(""))? - &data.scalar_product(u, v).map_err(at(""))?;
            metric.push((label, pm));
        }
    }
    sec.zero("bracket intertwined on frame pairs", bracket.as_slice());
    sec.zero("scalar product preserved on frame pairs", metric.as_slice());
    sec.flag("anchor preserved", anchor);

    let inv = invert_iso(&iso).map_err(at("/iso/K"))?;
    sec.flag("inverse composed with iso is the identity", compose(&inv, &iso, &g) == IsoData::identity(n, m));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut sections = frame.clone();
    for _ in 0..opts.trials {
        sections.push(Section::new(
            courant_core::random::vector_field(&mut rng, n, 1),
            courant_core::random::form(&mut rng, n, 1, 1),
            courant_core::random::column(&mut rng, n, m, 1),
        )
        .map_err(at(""))?);
    }
    let mut round = Vec::new();
    for (k, u) in sections.iter().enumerate() {
        let back = apply_iso(&inv, &g, &apply_iso(&iso, &g, u).map_err(at("/iso"))?).map_err(at("/iso"))?;
        round.push((format!("section {}", k + 1), &back - u));
    }
    sec.zero("inverse round-trips on sections", round.as_slice());
    let back = transform_data(&d2, &inv).map_err(at("/iso"))?;
    sec.flag("inverse recovers the input data", back == data);

    if d.has("gacs") {
        let c = d.gacs(&chart, m)?;
        let c2 = transform_gacs(&c, &inv, &data).map_err(at("/gacs"))?;
        sec.flag("B unchanged", c2.b == c.b);
        let before = check_algebraic(&c, &data.bundle.fiber().metric).map_err(at("/gacs"))?.pass();
        let after = check_algebraic(&c2, &d2.bundle.fiber().metric).map_err(at("/gacs"))?.pass();
        sec.flag("almost complex verdict preserved", before == after);
        if before {
            let v1 = nijenhuis_oracle(&data, &c).map_err(at("/gacs"))?.pass();
            let v2 = nijenhuis_oracle(&d2, &c2).map_err(at("/gacs"))?.pass();
            sec.flag_with("integrability verdict preserved", v1 == v2, format!("integrable: {v1}"));
        }
        sec.value("transformed gacs", doc::gacs_json(&c2, chart.names()));
    }
    Ok(())
}

fn normal_form_cmd(d: &Doc, sec: &mut SectionReport) -> Run {
    let (data, c) = load_structure(d, sec)?;
    let chart = data.bundle.chart().clone();
    let names = chart.names().to_vec();
    let (n, m) = (data.dim(), data.fiber_dim());
    let nf = normal_form(&c, &data).map_err(at("/gacs"))?;
    let nc = &nf.components;
    sec.zero("R = 0", &nf.data.r);
    sec.zero("H = 0", &nf.data.h);
    let conn: Vec<(String, courant_core::PolyMatrix)> =
        nf.data.bundle.connection().iter().enumerate().map(|(a, om)| (format!("d/d{}", names[a]), om.clone())).collect();
    sec.zero("connection = 0", conn.as_slice());
    sec.zero("J = 0", &nc.j);
    sec.zero("mu = 0", &nc.mu);
    sec.zero("nu = 0", &nc.nu);
    let binv = c.b.inverse_polynomial().map_err(at("/gacs/B"))?;
    sec.zero("C = -B^-1", &(&nc.c + &binv));
    sec.zero("d omega = 0", &nf.omega.d_total());
    let da: Vec<(String, courant_core::PolyMatrix)> = (0..n).map(|a| (format!("d/d{}", names[a]), nf.a.derivative(a))).collect();
    sec.zero("A constant", da.as_slice());
    sec.value("omega", doc::two_form_json(&nf.omega, &names));
    sec.value("A", doc::poly_matrix_json(&nf.a, &names));
    sec.value("iso", doc::iso_json(&nf.iso, &names));
    sec.value("reduction is trivial", nf.iso == IsoData::identity(n, m));

    if let Some(r) = d.reference() {
        let omega = doc::two_form(r.get("omega").unwrap_or(&Value::Null), &chart, "/reference/omega")?;
        let a_ref = doc::poly_matrix(r.get("A").unwrap_or(&Value::Null), &chart, "/reference/A", (m, m))?;
        sec.zero("omega equals the reference", &(&nf.omega - &omega));
        match r.get("iso") {
            Some(v) => {
                let to_ref = doc::iso_at(v, "/reference/iso", &chart, m)?;
                let total = compose(&to_ref, &nf.iso, &data.bundle.metric());
                sec.flag("composite isomorphism has Phi = 0 and beta = 0", total.phi.is_zero() && total.beta.is_zero());
                let valid = total.validate(&nf.data.bundle).is_ok();
                sec.flag("composite K is a quadratic Lie algebra automorphism", valid);
                sec.zero("K A = A_ref K", &(&(&total.k * &nf.a) - &(&a_ref * &total.k)));
            }
            None => sec.skip("A conjugate to the reference", "no /reference/iso given"),
        }
    }
    Ok(())
}
