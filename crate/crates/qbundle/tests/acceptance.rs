//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p qbundle --test acceptance`. The process exits
//! with status 1 when any criterion fails.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::Instant;

use qbundle::calculus::woronowicz_from_ideal;
use qbundle::catalog::{self, check_base_calculus, check_identities, load_example, Example};
use qbundle::comodule::{check_crossed_data, CrossedProduct};
use qbundle::linalg;
use qbundle::text::Context;
use qbundle::{
    parse_form, parse_poly, parse_tensor, Calculus, HopfAlgebra, LinearMap, Poly, Presentation,
    Report, Scalar, Tensor, Word,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// A labelled acceptance criterion.
type Criterion = (&'static str, fn() -> Outcome);

fn example(name: &str) -> Example {
    load_example(name).expect("catalog entry")
}

fn from_report(rep: &Report) -> Outcome {
    match rep.first_failure() {
        None => Ok(format!("{} checks", rep.passed())),
        Some(c) => Err(format!("{}: {}", c.id, c.witness)),
    }
}

fn require(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn hopf_axioms() -> Outcome {
    let mut rep = Report::new("hopf axioms");
    for h in [
        catalog::u1(),
        catalog::cz(),
        catalog::slq2(),
        catalog::suq2(),
    ] {
        rep.extend(h.check_axioms(4));
    }
    for id in [
        "antipode-anti-multiplicative",
        "antipode-unit",
        "antipode-coproduct",
        "counit-antipode",
    ] {
        let n = rep
            .checks
            .iter()
            .filter(|c| c.id.starts_with(&format!("hopf.{id}[")))
            .count();
        require(n == 4, format!("{id} checked on {n} of 4 Hopf algebras"))?;
    }
    from_report(&rep)
}

fn random_poly(rng: &mut ChaCha8Rng, a: &Presentation, words: &[Word]) -> Poly {
    let mut p = Poly::zero();
    for _ in 0..rng.gen_range(1..3) {
        let w = &words[rng.gen_range(0..words.len())];
        let c = Scalar::int(rng.gen_range(-3..4))
            * Scalar::q(rng.gen_range(-2..3))
            * Scalar::l(rng.gen_range(-1..2));
        p.add_scaled(&Poly::word(w.clone()), &c);
    }
    a.nf(&p)
}

fn convolution_algebra() -> Outcome {
    let h = catalog::cz();
    let target = catalog::torus();
    let hw = h.pres().basis_words(4);
    let tw = target.basis_words(2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut random_map = |name: &str| {
        let table: HashMap<Word, Poly> = hw
            .iter()
            .map(|w| (w.clone(), random_poly(&mut rng, &target, &tw)))
            .collect();
        Arc::new(LinearMap::table(name, &h, target.clone(), table))
    };
    let unit = Arc::new(LinearMap::unit_counit(&h, target.clone()));
    let mut triples = 0;
    for i in 0..10 {
        let (f, g, k) = (
            random_map(&format!("f{i}")),
            random_map(&format!("g{i}")),
            random_map(&format!("k{i}")),
        );
        let fg = Arc::new(LinearMap::convolution(&f, &g).map_err(|e| e.to_string())?);
        let gk = Arc::new(LinearMap::convolution(&g, &k).map_err(|e| e.to_string())?);
        let left = LinearMap::convolution(&fg, &k).map_err(|e| e.to_string())?;
        let right = LinearMap::convolution(&f, &gk).map_err(|e| e.to_string())?;
        require(
            left.agrees_with(&right, 4).map_err(|e| e.to_string())?,
            format!("(f*g)*k != f*(g*k) for triple {i}"),
        )?;
        let uf = LinearMap::convolution(&unit, &f).map_err(|e| e.to_string())?;
        let fu = LinearMap::convolution(&f, &unit).map_err(|e| e.to_string())?;
        require(
            uf.agrees_with(&f, 4).map_err(|e| e.to_string())?
                && fu.agrees_with(&f, 4).map_err(|e| e.to_string())?,
            format!("eta eps is not a unit for map {i}"),
        )?;
        triples += 1;
    }
    Ok(format!(
        "{triples} random triples on {} basis words",
        hw.len()
    ))
}

fn cleft_galois() -> Outcome {
    let ex = example("torus");
    let spec = ex.cleaving.as_ref().ok_or("torus has no cleaving")?;
    let c = &spec.cleaving;
    let a = c.total().clone();
    let hp = c.hopf().pres().clone();
    let t = hp.letter("t").map_err(|e| e.to_string())?;
    let ti = hp.letter("t^-1").map_err(|e| e.to_string())?;
    let (u, v) = (
        a.letter("u").map_err(|e| e.to_string())?,
        a.letter("v").map_err(|e| e.to_string())?,
    );
    for k in 0..=4usize {
        let jt = c.j().eval_word(&vec![t; k]).map_err(|e| e.to_string())?;
        let jti = c.j().eval_word(&vec![ti; k]).map_err(|e| e.to_string())?;
        require(
            jt == a.nf_word(&vec![u; k]),
            format!("j(t^{k}) = {}", a.render(&jt)),
        )?;
        require(
            jti == a.nf_word(&vec![v; k]),
            format!("j(t^-{k}) = {}", a.render(&jti)),
        )?;
    }
    let mut rep = c.check(3);
    let aw = a.basis_words(3);
    let hw = hp.basis_words(3);
    let comps = vec![a.clone(), hp.clone()];
    let mut pairs = 0;
    for x in &aw {
        for h in &hw {
            let y = Tensor::pure(comps.clone(), vec![x.clone(), h.clone()], Scalar::one());
            let back = c.chi(&c.chi_inverse(&y).map_err(|e| e.to_string())?);
            require(back == y, format!("chi chi^-1 moves {}", y.render()))?;
            pairs += 1;
        }
    }
    rep.extend(c.check_translation_map(3));
    let n = rep
        .checks
        .iter()
        .filter(|c| c.id.starts_with("translation."))
        .count();
    require(n == 5, format!("{n} translation-map properties checked"))?;
    from_report(&rep).map(|s| format!("{s}, chi chi^-1 = id on {pairs} pairs"))
}

fn doi_takeuchi() -> Outcome {
    let ex = example("crossed_demo");
    let spec = ex.cleaving.as_ref().ok_or("no cleaving")?;
    let x = ex.crossed.as_ref().ok_or("no crossed data")?;
    let dt = qbundle::comodule::doi_takeuchi_from_cleft(
        spec.cleaving.clone(),
        x.base.clone(),
        x.embedding.clone(),
        x.base_len,
        2,
    )
    .map_err(|e| e.to_string())?;
    let mut rep = dt.report.clone();
    rep.extend(check_crossed_data(dt.data.as_ref(), 2, 2));
    for id in ["cocycle", "twisted-module"] {
        require(
            rep.checks.iter().any(|c| c.id.contains(id)),
            format!("no {id} check ran"),
        )?;
    }
    let product = CrossedProduct::build(dt.data.clone(), 2, 1).map_err(|e| e.to_string())?;
    rep.extend(product.check(2, 1));
    require(
        rep.checks.iter().any(|c| c.id.contains("associative")),
        "no associativity check ran",
    )?;
    from_report(&rep)
}

fn woronowicz_triangle() -> Outcome {
    let mut n = 0;
    for c in [
        Arc::new(catalog::torus_calculus()),
        Arc::new(catalog::cz_calculus().1),
    ] {
        let a = c.base().clone();
        for w in a.basis_words(4) {
            let p = Poly::word(w.clone());
            let via = c
                .universal_quotient(&c.universal_d(&p))
                .map_err(|e| e.to_string())?;
            let direct = c.d(&p).map_err(|e| e.to_string())?;
            require(
                via == direct,
                format!(
                    "{}: {}",
                    a.alphabet().render_word(&w),
                    c.omega().render(&via)
                ),
            )?;
            n += 1;
        }
    }
    let (h, c) = catalog::cz_calculus();
    let ideal = maurer_cartan_kernel(&h, &c)?;
    let wc = woronowicz_from_ideal(&h, &ideal, 4).map_err(|e| e.to_string())?;
    require(
        wc.dim() == 1,
        format!(
            "quotient of the universal calculus has dimension {}",
            wc.dim()
        ),
    )?;
    require(wc.is_bicovariant(), wc.bicovariance_witness().to_string())?;
    Ok(format!(
        "pi d_u = d on {n} basis words; ker varpi gives a 1-dimensional bicovariant quotient"
    ))
}

fn maurer_cartan_kernel(h: &HopfAlgebra, c: &Calculus) -> Result<Vec<Poly>, String> {
    let words: Vec<Word> = h
        .pres()
        .basis_words(4)
        .into_iter()
        .filter(|w| !w.is_empty())
        .collect();
    let images: Vec<BTreeMap<Word, Scalar>> = words
        .iter()
        .map(|w| {
            c.maurer_cartan(h, &h.augmentation_projection(&Poly::word(w.clone())))
                .map(|p| p.as_map().clone())
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    Ok(linalg::kernel(&images)
        .into_iter()
        .map(|k| {
            let mut x = Poly::zero();
            for (i, s) in k {
                x.add_scaled(
                    &h.augmentation_projection(&Poly::word(words[i].clone())),
                    &s,
                );
            }
            x
        })
        .collect())
}

fn maurer_cartan_equation() -> Outcome {
    let (h, c) = catalog::cz_calculus();
    let free = c.free_prolongation().map_err(|e| e.to_string())?;
    let mut n = 0;
    for w in h.pres().basis_words(4) {
        let a = h.augmentation_projection(&Poly::word(w.clone()));
        let (lhs, rhs) = free
            .maurer_cartan_equation(&h, &a)
            .map_err(|e| e.to_string())?;
        require(
            lhs == rhs,
            format!(
                "{}: {} vs {}",
                h.pres().alphabet().render_word(&w),
                free.omega().render(&lhs),
                free.omega().render(&rhs)
            ),
        )?;
        n += 1;
    }
    Ok(format!("{n} basis words"))
}

fn prolongation_vanishing() -> Outcome {
    let (_, c) = catalog::cz_calculus();
    let pr = c.maximal_prolongation_check(4).map_err(|e| e.to_string())?;
    let a = c.base().clone();
    let g = a.letter("g").map_err(|e| e.to_string())?;
    let gi = a.letter("g^-1").map_err(|e| e.to_string())?;
    let target: BTreeMap<(Word, Word), Scalar> = [
        ((Word::new(), Word::from_slice(&[gi])), Scalar::one()),
        (
            (Word::from_slice(&[gi, gi]), Word::from_slice(&[g])),
            Scalar::q(-1),
        ),
    ]
    .into_iter()
    .collect();
    let rels: Vec<BTreeMap<(Word, Word), Scalar>> = pr
        .relations
        .iter()
        .map(|r| {
            r.iter()
                .map(|(a, b, c)| ((a.clone(), b.clone()), c.clone()))
                .collect()
        })
        .collect();
    require(
        linalg::in_span(&rels, &target),
        "d(g^-1) + q^-1 g^-2 dg = 0 not found among the first-order relations",
    )?;
    require(
        pr.report
            .get("prolongation.top-degree-vanishes[Omega(C[Z])]")
            .is_some(),
        "two-form check did not run",
    )?;
    let shipped = c.omega().graded_basis(4, 2).len();
    require(
        shipped == 0,
        format!("{shipped} two-form basis words in the shipped calculus"),
    )?;
    from_report(&pr.report)
}

fn torus_completeness() -> Outcome {
    let ex = example("torus");
    let b = ex.bundle.as_ref().ok_or("no bundle")?;
    let c = b.acalc();
    let comps = b.comps();
    let f = |s: &str| parse_form(s, c).map_err(|e| e.to_string());
    let tw = parse_tensor("(1 | dt*t^-1)", &comps).map_err(|e| e.to_string())?;
    let duv = f("d(u*v)")?;
    let dudv = f("du*dv")?;
    let dvdu = f("dv*du")?;
    let want = Tensor::from_polys(comps.clone(), &[duv.clone(), Poly::one()])
        .mul(&tw)
        .map_err(|e| e.to_string())?
        .scale(&-Scalar::one());
    let got = b.ver(&dudv, 1, 1);
    require(got == want, format!("ver11(du dv) = {}", got.render()))?;
    let got2 = b.ver(&dvdu, 1, 1);
    let cancel = got.add(&got2.scale(&Scalar::l(-1)));
    require(
        cancel.is_zero(),
        format!("ver11(du dv) + l^-1 ver11(dv du) = {}", cancel.render()),
    )?;
    let rep = b.check_completeness(4);
    require(
        rep.checks
            .iter()
            .filter(|c| c.id.starts_with("completeness.expected["))
            .count()
            >= 5,
        "catalog expectations missing",
    )?;
    from_report(&rep)
}

fn torus_base() -> Outcome {
    let ex = example("torus");
    let b = ex.bundle.as_ref().ok_or("no bundle")?;
    let got: Vec<_> = b
        .base_forms(1, 4)
        .iter()
        .map(|p| p.as_map().clone())
        .collect();
    let c = b.acalc();
    let oa = c.omega().alphabet().clone();
    let mut want = Vec::new();
    let mut powers = Vec::new();
    for k in -4i32..=4 {
        let p = parse_form(&format!("(u*v)^{k}*d(u*v)"), c).map_err(|e| e.to_string())?;
        if p.terms().all(|(w, _)| oa.algebra_len(w) <= 4) {
            want.push(p.as_map().clone());
            powers.push(k.to_string());
        }
    }
    require(
        linalg::same_span(&got, &want),
        format!(
            "base forms have dimension {}, expected span has {}",
            got.len(),
            want.len()
        ),
    )?;
    Ok(format!(
        "dimension {} = span of (uv)^k d(uv) for k in {{{}}}",
        got.len(),
        powers.join(", ")
    ))
}

fn hopf_fibration_table() -> Outcome {
    let ex = example("qsu2_hopf");
    let b = ex.bundle.as_ref().ok_or("no bundle")?;
    let c = b.acalc();
    let comps = b.comps();
    let rows = [
        ("ep", 0, 1, "0"),
        ("em", 0, 1, "0"),
        ("e0", 0, 1, "(1 | t^-1*dt)"),
        ("ep*e0", 1, 1, "(ep | t*dt)"),
        ("em*e0", 1, 1, "(em | t^-3*dt)"),
        ("d(e0)", 1, 1, "0"),
        ("d(ep)", 1, 1, "-1*(q^2 + 1)*(ep | t*dt)"),
        ("d(em)", 1, 1, "q^-2*(1 + q^-2)*(em | t^-3*dt)"),
        ("ep*em*e0", 2, 1, "(ep*em | t^-1*dt)"),
        ("d(ep*em)", 2, 1, "0"),
    ];
    for (src, k, l, val) in rows {
        let w = parse_form(src, c).map_err(|e| e.to_string())?;
        let want = parse_tensor(val, &comps).map_err(|e| e.to_string())?;
        let got = b.ver(&w, k, l);
        require(
            got == want,
            format!(
                "ver{k}{l}({src}) = {}, expected {}",
                got.render(),
                want.render()
            ),
        )?;
    }
    let rep = b.check_completeness(2);
    from_report(&rep).map(|s| format!("{} table entries, {s}", rows.len()))
}

fn exact_sequence() -> Outcome {
    let mut rep = Report::new("exact sequence");
    for (name, len) in [("torus", 4), ("qsu2_hopf", 2)] {
        let ex = example(name);
        let b = ex.bundle.as_ref().ok_or("no bundle")?;
        let r = b.check_exact_sequence(len);
        for id in ["exact.kernel", "exact.degree-two-inclusion"] {
            require(
                r.checks.iter().any(|c| c.id.starts_with(id)),
                format!("{name}: {id} missing"),
            )?;
        }
        rep.extend(r);
    }
    from_report(&rep)
}

fn brzezinski_majid() -> Outcome {
    let mut rep = Report::new("bm");
    for (name, len) in [("torus", 3), ("qsu2_hopf", 2)] {
        let ex = example(name);
        let b = ex.bundle.as_ref().ok_or("no bundle")?;
        let r = b.check_bm(len);
        for id in ["bm.well-defined", "bm.kernel"] {
            require(
                r.checks.iter().any(|c| c.id.starts_with(id)),
                format!("{name}: {id} missing"),
            )?;
        }
        rep.extend(r);
    }
    from_report(&rep)
}

fn podles() -> Outcome {
    let ex = example("qsu2_hopf");
    let ids = ex.identities.as_ref().ok_or("no identities")?;
    let mut podles = ids.clone();
    podles.items.retain(|(l, _, _)| l.starts_with("podles-"));
    require(podles.items.len() == 4, "four relations expected")?;
    let rep = check_identities(&podles);
    let mut printed = ids.clone();
    printed.items = vec![(
        "printed-beta-ep".into(),
        "beta*ep".into(),
        "q^-2*gamma*d(z) - q*alpha*d(x)".into(),
    )];
    require(
        !check_identities(&printed).all_passed(),
        "the printed form of the beta e+ relation unexpectedly holds",
    )?;
    from_report(&rep)
        .map(|s| format!("{s}; beta e+ holds with d(zbar), the printed d(z) form does not"))
}

fn crossed_calculus() -> Outcome {
    let ex = example("smash_demo");
    let b = ex.bundle.as_ref().ok_or("no bundle")?;
    let bc = ex.base_calculus.as_ref().ok_or("no base calculus")?;
    let rep = check_base_calculus(b, bc, 3, 2);
    require(
        rep.checks.len() == 3,
        format!("{} degrees compared", rep.checks.len()),
    )?;
    from_report(&rep)
}

fn random_expression(
    rng: &mut ChaCha8Rng,
    names: &[String],
    calc: Option<&Calculus>,
    depth: usize,
) -> String {
    const SCALARS: [&str; 8] = [
        "2",
        "(-1)",
        "q",
        "q^-2",
        "3/2*l",
        "(q + q^-1)",
        "l^-1",
        "(1 - q^2)",
    ];
    let terms = rng.gen_range(1..4);
    let mut out = String::new();
    for i in 0..terms {
        if i > 0 {
            out.push_str(if rng.gen_bool(0.5) { " + " } else { " - " });
        }
        let mut factors = Vec::new();
        if rng.gen_bool(0.5) {
            factors.push(SCALARS[rng.gen_range(0..SCALARS.len())].to_string());
        }
        for _ in 0..rng.gen_range(1..3) {
            let pick = rng.gen_range(0..10);
            let f = if pick == 0 && depth > 0 {
                format!("({})", random_expression(rng, names, calc, depth - 1))
            } else if pick == 1 && calc.is_some() {
                let alg: Vec<&String> = names
                    .iter()
                    .filter(|n| !n.starts_with('d') && !n.starts_with('e'))
                    .collect();
                format!("d({})", alg[rng.gen_range(0..alg.len())])
            } else {
                let n = &names[rng.gen_range(0..names.len())];
                if rng.gen_bool(0.2) && !n.contains('^') {
                    format!("{n}^{}", rng.gen_range(1..3))
                } else {
                    n.clone()
                }
            };
            factors.push(f);
        }
        out.push_str(&factors.join("*"));
    }
    out
}

fn parser_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut total = 0;
    for name in catalog::example_names() {
        let ex = example(name);
        let calc = ex.total_calculus().cloned();
        let pres = match &calc {
            Some(c) => c.omega().clone(),
            None => ex.total_algebra().ok_or("no algebra")?.clone(),
        };
        let names: Vec<String> = pres
            .alphabet()
            .letters()
            .map(|x| pres.alphabet().letter_name(x))
            .collect();
        for _ in 0..100 {
            let src = random_expression(&mut rng, &names, calc.as_deref(), 1);
            let value = match &calc {
                Some(c) => Context::forms(c).parse(&src),
                None => parse_poly(&src, &pres),
            }
            .map_err(|e| format!("{name}: `{src}`: {e}"))?;
            let rendered = pres.render(&value);
            let again =
                parse_poly(&rendered, &pres).map_err(|e| format!("{name}: `{rendered}`: {e}"))?;
            require(
                again == value,
                format!("{name}: `{src}` renders as `{rendered}` which parses differently"),
            )?;
            total += 1;
        }
    }
    for name in ["group_z", "torus"] {
        let ex = example(name);
        let a = ex.check(3, ex.max_deg).to_json();
        let b = example(name).check(3, ex.max_deg).to_json();
        require(a == b, format!("{name}: reports differ between runs"))?;
    }
    Ok(format!(
        "{total} expressions round-trip; reports are byte-identical across runs"
    ))
}

fn main() {
    let criteria: [Criterion; 15] = [
        (
            "Hopf axioms and derived antipode properties at length 4",
            hopf_axioms,
        ),
        (
            "convolution algebra on C[Z] at length 4",
            convolution_algebra,
        ),
        (
            "torus cleaving, Galois map and translation map",
            cleft_galois,
        ),
        (
            "Doi-Takeuchi crossed data and crossed product",
            doi_takeuchi,
        ),
        ("universal calculus quotient triangle", woronowicz_triangle),
        ("Maurer-Cartan equation on C[Z]", maurer_cartan_equation),
        ("C[Z] prolongation has no two-forms", prolongation_vanishing),
        ("torus completeness", torus_completeness),
        ("torus base one-forms", torus_base),
        ("Hopf fibration vertical table", hopf_fibration_table),
        ("degree-one exact sequence", exact_sequence),
        ("Brzezinski-Majid comparison", brzezinski_majid),
        ("Podles relations", podles),
        ("smash product base forms", crossed_calculus),
        (
            "parser round trip and report determinism",
            parser_round_trip,
        ),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (label, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!(
                "criterion {:>2}: PASS  {label} ({detail}) [{secs:.1}s]",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {label}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
