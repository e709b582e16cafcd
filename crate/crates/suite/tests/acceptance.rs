//! Acceptance suite: one PASS/FAIL line per criterion, failures listed below it.

use std::collections::BTreeSet;
use std::time::Instant;

use num_traits::Zero;
use superdatum::analysis::{
    check_equivalence, decompose, equivalent, recognize, EquivalenceResult,
};
use superdatum::catalog::{
    build_datum, build_grs, corpus, corpus_alphas, Family, FamilyTag, GroupForm,
};
use superdatum::grs::{check_lemmas, Grs};
use superdatum::lattice::z_identity;
use superdatum::linalg::{q, qf, scale, Q};
use superdatum::rootdatum::{Outcome, SpanMode};
use superdatum::superalgebra::{
    self, cartan_element, check_jacobi, evaluate_weight, invariant_forms, root_decomposition,
    sl2_triple, AlgebraFamily, FormStatus, SuperAlgebra,
};
use superdatum::supermatrix::{berezinian, sample_supermatrices, GrassmannElement, SuperMatrix};

const SHOWN: usize = 12;

struct Outcomes {
    checked: usize,
    failures: Vec<String>,
    skipped: Vec<String>,
}

impl Outcomes {
    fn new() -> Self {
        Outcomes {
            checked: 0,
            failures: Vec::new(),
            skipped: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn criterion_corpus() -> Vec<FamilyTag> {
    corpus(6, 4, 3, &corpus_alphas())
}

fn c1_axioms() -> Outcomes {
    let mut o = Outcomes::new();
    for tag in criterion_corpus() {
        let d = build_datum(&tag).expect("corpus datum");
        let r = d.verify_bqr(SpanMode::Rational);
        for i in [1, 3, 4] {
            o.record(*r.axiom(i) == Outcome::Pass, || {
                format!("{tag}: BQR({i}) {}", r.axiom(i))
            });
        }
    }
    o
}

fn lemma_failures(name: &str, g: &Grs, o: &mut Outcomes) {
    for (lemma, w) in check_lemmas(g).results {
        o.record(w.is_none(), || {
            format!("{name}: {} ({})", lemma.label(), w.unwrap_or_default())
        });
    }
}

fn c2_lemmas() -> Outcomes {
    let mut o = Outcomes::new();
    for tag in criterion_corpus() {
        let g = build_grs(&tag.family).expect("corpus root system");
        lemma_failures(&format!("{tag} roots"), &g, &mut o);
        match build_datum(&tag).expect("corpus datum").shadow() {
            Ok(s) => lemma_failures(&format!("{tag} datum"), &s, &mut o),
            Err(e) => o.record(false, || {
                format!("{tag} datum: roots in X ⊗ ℚ do not form a root system ({e})")
            }),
        }
    }
    o
}

fn c3_round_trip() -> Outcomes {
    let mut o = Outcomes::new();
    let mut seen = BTreeSet::new();
    for tag in criterion_corpus() {
        if !seen.insert(tag.family.to_string()) {
            continue;
        }
        let g = build_grs(&tag.family).unwrap();
        match recognize(&g) {
            Ok(r) => {
                let ok = r.family.as_ref().is_some_and(|f| f.same_type(&tag.family));
                o.record(ok, || {
                    format!("{} recognized as {:?}", tag.family, r.family)
                });
            }
            Err(e) => o.record(false, || format!("{}: {e}", tag.family)),
        }
    }
    let pool = [
        Family::A { m: 2, n: 1 },
        Family::B { m: 0, n: 1 },
        Family::B { m: 1, n: 1 },
    ];
    for i in 0..3 {
        for j in i..3 {
            for k in j..3 {
                let parts: Vec<Grs> = [i, j, k]
                    .iter()
                    .map(|&x| build_grs(&pool[x]).unwrap())
                    .collect();
                let sum = Grs::direct_sum(&parts.iter().collect::<Vec<_>>()).unwrap();
                let mut want: Vec<String> =
                    [i, j, k].iter().map(|&x| pool[x].to_string()).collect();
                let mut got: Vec<String> = decompose(&sum)
                    .iter()
                    .map(|c| match recognize(c) {
                        Ok(r) => r.family.map_or("unknown".into(), |f| f.to_string()),
                        Err(e) => e.to_string(),
                    })
                    .collect();
                want.sort();
                got.sort();
                o.record(want == got, || format!("decompose({want:?}) gave {got:?}"));
            }
        }
    }
    o
}

fn c4_equivalence() -> Outcomes {
    let mut o = Outcomes::new();
    for tag in criterion_corpus() {
        let d = build_datum(&tag).unwrap();
        let ok = matches!(equivalent(&d, &d), EquivalenceResult::Equivalent(e) if e.matrix == z_identity(d.rank()));
        o.record(ok, || {
            format!("{tag}: self-equivalence is not the identity")
        });
    }
    let d2 = build_datum(&FamilyTag::of(Family::D21a(q(2))).unwrap()).unwrap();
    let dh = build_datum(&FamilyTag::of(Family::D21a(qf(1, 2))).unwrap()).unwrap();
    match equivalent(&d2, &dh) {
        EquivalenceResult::Equivalent(e) => {
            o.record(check_equivalence(&d2, &dh, &e.matrix).is_ok(), || {
                "D(2,1;2) → D(2,1;1/2) witness rejected".into()
            });
            let image: BTreeSet<_> = d2.all_root_coords().iter().map(|x| e.apply(x)).collect();
            let target: BTreeSet<_> = dh.all_root_coords().into_iter().collect();
            o.record(image == target, || {
                "D(2,1;2) → D(2,1;1/2) witness is not a bijection on roots".into()
            });
        }
        EquivalenceResult::NotEquivalent { reason } => {
            o.record(false, || format!("D(2,1;2) vs D(2,1;1/2): {reason}"))
        }
    }
    let g11 =
        build_datum(&FamilyTag::new(Family::A { m: 1, n: 1 }, GroupForm::GL).unwrap()).unwrap();
    let g21 =
        build_datum(&FamilyTag::new(Family::A { m: 2, n: 1 }, GroupForm::GL).unwrap()).unwrap();
    o.record(equivalent(&g11, &g21).witness().is_none(), || {
        "GL(1,1) ≅ GL(2,1) reported".into()
    });
    o
}

/// gl(m|n), sl(m|n) with m ≠ n, osp(1|2), osp(2|2), osp(3|2) and D(2,1;α).
fn algebras() -> Vec<AlgebraFamily> {
    let mut out = Vec::new();
    for m in 1..=3 {
        for n in 1..=3 {
            out.push(AlgebraFamily::Gl { m, n });
            if m != n {
                out.push(AlgebraFamily::Sl { m, n });
            }
        }
    }
    for m in 1..=3 {
        out.push(AlgebraFamily::Osp { m, n: 1 });
    }
    out.extend(corpus_alphas().into_iter().map(AlgebraFamily::D21a));
    out
}

fn realized() -> Vec<(AlgebraFamily, SuperAlgebra)> {
    algebras()
        .into_iter()
        .map(|f| {
            let sa = superalgebra::realize(&f).expect("realization");
            (f, sa)
        })
        .collect()
}

fn c5_superalgebras(algs: &[(AlgebraFamily, SuperAlgebra)]) -> Outcomes {
    let mut o = Outcomes::new();
    for (fam, sa) in algs {
        let v = check_jacobi(sa);
        o.record(v.is_none(), || {
            format!("{fam}: super-Jacobi fails on {:?}", v.map(|v| v.triple))
        });
        let rd = root_decomposition(sa).expect("weights");
        let grs = build_grs(&fam.catalog_family().unwrap()).unwrap();
        let diff = rd.compare_with(sa, &grs).unwrap();
        o.record(diff.is_none(), || {
            format!("{fam}: {}", diff.unwrap_or_default())
        });
        o.record(rd.is_monodromy(), || format!("{fam}: not monodromy"));
        let forms = invariant_forms(sa, 0);
        let Some(b) = forms.witness() else {
            o.record(false, || format!("{fam}: no non-degenerate form for H_θ"));
            continue;
        };
        for (theta, plus) in rd.roots() {
            let neg: Vec<Q> = theta.iter().map(|x| -x).collect();
            let minus = &rd.spaces[&neg];
            let h = cartan_element(sa, b, theta).expect("H_θ");
            let mut nonzero = false;
            let mut ok = true;
            for x in plus.even.iter().chain(&plus.odd) {
                for y in minus.even.iter().chain(&minus.odd) {
                    let bxy = b.bilinear(x, y);
                    nonzero |= !bxy.is_zero();
                    ok &= sa.bracket(x, y) == scale(&bxy, &h);
                }
            }
            o.record(ok && nonzero, || {
                format!("{fam}: [𝔤_θ, 𝔤_−θ] ≠ ℚ·H_θ for θ = {theta:?}")
            });
        }
    }
    o
}

fn c6_forms(algs: &[(AlgebraFamily, SuperAlgebra)]) -> Outcomes {
    let mut o = Outcomes::new();
    for (fam, sa) in algs {
        let f = invariant_forms(sa, 0);
        o.record(f.witness().is_some(), || {
            format!("{fam}: no non-degenerate witness ({:?})", status(&f.status))
        });
    }
    for base in [
        superalgebra::sl(2, 1).unwrap(),
        superalgebra::gl(1, 1).unwrap(),
    ] {
        let d = superalgebra::double_odd(&base);
        let f = invariant_forms(&d, 0);
        o.record(matches!(f.status, FormStatus::Degenerate(_)), || {
            format!(
                "{}: expected a zero-determinant certificate, got {}",
                d.name(),
                status(&f.status)
            )
        });
    }
    o
}

fn status(s: &FormStatus) -> String {
    match s {
        FormStatus::NonDegenerate(_) => "a non-degenerate member".into(),
        FormStatus::Degenerate(c) => format!("certificate: {c}"),
        FormStatus::Undecided(w) => format!("undecided: {w}"),
    }
}

fn c7_span_discrepancy() -> Outcomes {
    let mut o = Outcomes::new();
    for m in 1..=4 {
        for n in 1..=4 {
            let gl =
                build_datum(&FamilyTag::new(Family::A { m, n }, GroupForm::GL).unwrap()).unwrap();
            let r = gl.verify_bqr(SpanMode::Strict);
            o.record(r.axiom(2).is_fail() && r.deficit() == 1, || {
                format!(
                    "GL({m},{n}): strict BQR(2) {} with deficit {}",
                    r.axiom(2),
                    r.deficit()
                )
            });
            let sl = match FamilyTag::new(Family::A { m, n }, GroupForm::SL) {
                Ok(tag) => build_datum(&tag).unwrap(),
                Err(e) => {
                    o.skipped.push(e.to_string());
                    continue;
                }
            };
            let r = sl.verify_bqr(SpanMode::Strict);
            o.record(*r.axiom(2) == Outcome::Pass, || {
                format!("SL({m},{n}): strict BQR(2) {}", r.axiom(2))
            });
        }
    }
    o
}

fn c8_berezinian() -> Outcomes {
    let mut o = Outcomes::new();
    for (m, n) in [(1, 1), (2, 1)] {
        let sample = sample_supermatrices(m, n, 4, 100, 0x5eed);
        o.record(sample.len() == 100, || {
            format!("({m}|{n}): sample has {} matrices", sample.len())
        });
        let bers: Vec<GrassmannElement> = sample.iter().map(|g| berezinian(g).unwrap()).collect();
        for (i, g) in sample.iter().enumerate() {
            for (j, h) in sample.iter().enumerate() {
                let lhs = berezinian(&g.mul(h).unwrap()).unwrap();
                o.record(lhs == &bers[i] * &bers[j], || {
                    format!("({m}|{n}): Ber(g{i} g{j}) ≠ Ber(g{i}) Ber(g{j})")
                });
            }
        }
        let id = SuperMatrix::identity(m, n, 4);
        o.record(berezinian(&id).unwrap() == GrassmannElement::one(4), || {
            format!("({m}|{n}): Ber(1) ≠ 1")
        });
    }
    o
}

fn c9_sl2_triples(algs: &[(AlgebraFamily, SuperAlgebra)]) -> Outcomes {
    let mut o = Outcomes::new();
    let two = q(2);
    for (fam, sa) in algs {
        let rd = root_decomposition(sa).unwrap();
        for (alpha, _) in rd.roots().filter(|(_, s)| !s.even.is_empty()) {
            match sl2_triple(sa, alpha) {
                Ok((e, h, f)) => {
                    let ok = evaluate_weight(sa, alpha, &h).unwrap() == two
                        && sa.bracket(&h, &e) == scale(&two, &e)
                        && sa.bracket(&h, &f) == scale(&-two.clone(), &f)
                        && sa.bracket(&e, &f) == h;
                    o.record(ok, || {
                        format!("{fam}: triple for {alpha:?} fails the relations")
                    });
                }
                Err(err) => o.record(false, || format!("{fam}: {alpha:?}: {err}")),
            }
        }
    }
    o
}

fn main() {
    let total = Instant::now();
    let algs = realized();
    type Run<'a> = Box<dyn Fn() -> Outcomes + 'a>;
    let criteria: Vec<(&str, Run)> = vec![
        ("axiom suite", Box::new(c1_axioms)),
        ("lemma suite", Box::new(c2_lemmas)),
        (
            "recognition and decomposition round trip",
            Box::new(c3_round_trip),
        ),
        ("equivalence", Box::new(c4_equivalence)),
        ("superalgebra suite", Box::new(|| c5_superalgebras(&algs))),
        ("invariant-form dichotomy", Box::new(|| c6_forms(&algs))),
        ("BQR(2) discrepancy", Box::new(c7_span_discrepancy)),
        ("Berezinian", Box::new(c8_berezinian)),
        ("sl2-triples", Box::new(|| c9_sl2_triples(&algs))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        let verdict = if o.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "criterion {} ({name}): {verdict} [{} checks, {} failed, {secs:.1}s]",
            i + 1,
            o.checked,
            o.failures.len()
        );
        for s in &o.skipped {
            println!("    skipped: {s}");
        }
        for f in o.failures.iter().take(SHOWN) {
            println!("    {f}");
        }
        if o.failures.len() > SHOWN {
            println!("    ... and {} more", o.failures.len() - SHOWN);
        }
        failed += usize::from(!o.failures.is_empty());
    }
    println!(
        "acceptance: {} of {} criteria pass ({:.1}s)",
        criteria.len() - failed,
        criteria.len(),
        total.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
