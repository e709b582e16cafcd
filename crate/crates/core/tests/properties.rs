use std::collections::BTreeSet;

use num_traits::Zero;
use proptest::prelude::*;
use superdatum::analysis::{components, decompose, equivalent, weyl_orbit};
use superdatum::catalog::{build_datum, build_grs, corpus, corpus_alphas, Family, FamilyTag};
use superdatum::grs::Grs;
use superdatum::lattice::LatticeVector;
use superdatum::linalg::q;

fn pieces() -> Vec<Family> {
    vec![
        Family::A { m: 2, n: 1 },
        Family::A { m: 1, n: 1 },
        Family::B { m: 0, n: 1 },
        Family::B { m: 1, n: 1 },
        Family::C { n: 2 },
        Family::D21a(q(-3)),
    ]
}

fn small_corpus() -> Vec<FamilyTag> {
    corpus(3, 2, 2, &corpus_alphas())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decompose_partitions_the_roots(picks in prop::collection::vec(0usize..6, 1..4)) {
        let all = pieces();
        let parts: Vec<Grs> = picks.iter().map(|&i| build_grs(&all[i]).unwrap()).collect();
        let sum = Grs::direct_sum(&parts.iter().collect::<Vec<_>>()).unwrap();
        let comps = components(&sum);
        let mut seen = BTreeSet::new();
        for c in &comps {
            for &i in c {
                prop_assert!(seen.insert(i), "root {} in two components", i);
            }
        }
        prop_assert_eq!(seen.len(), sum.len());
        for (a, ca) in comps.iter().enumerate() {
            for cb in &comps[a + 1..] {
                for &i in ca {
                    for &j in cb {
                        prop_assert!(sum.pair(&sum.roots()[i].vector, &sum.roots()[j].vector).is_zero());
                    }
                }
            }
        }
        let dec = decompose(&sum);
        prop_assert_eq!(dec.len(), picks.len());
        let total: usize = dec.iter().map(Grs::len).sum();
        prop_assert_eq!(total, sum.len());
    }

    #[test]
    fn equivalence_is_symmetric(i in 0usize..64, j in 0usize..64) {
        let tags = small_corpus();
        let (a, b) = (&tags[i % tags.len()], &tags[j % tags.len()]);
        let (da, db) = (build_datum(a).unwrap(), build_datum(b).unwrap());
        let ab = equivalent(&da, &db);
        let ba = equivalent(&db, &da);
        prop_assert_eq!(ab.witness().is_some(), ba.witness().is_some(), "{} vs {}", a, b);
        if let Some(e) = ab.witness() {
            for x in da.all_root_coords() {
                let y = e.apply(&x);
                let back: Vec<_> = e.inverse.iter()
                    .map(|row| row.iter().zip(&y).map(|(p, q)| p * q).sum::<num_bigint::BigInt>())
                    .collect();
                prop_assert_eq!(back, x);
            }
        }
    }

    #[test]
    fn orbits_are_stable(t in 0usize..64, r in 0usize..64, k in 0usize..64) {
        let tags = small_corpus();
        let d = build_datum(&tags[t % tags.len()]).unwrap();
        let roots = d.all_root_coords();
        prop_assume!(!roots.is_empty());
        let v = d.x().representative(&roots[r % roots.len()]);
        let orbit = weyl_orbit(&d, &v, 10_000).unwrap();
        prop_assert!(orbit.contains(&d.x().canonical(&v)));
        let w: &LatticeVector = orbit.iter().nth(k % orbit.len()).unwrap();
        prop_assert_eq!(weyl_orbit(&d, w, 10_000).unwrap(), orbit);
    }
}
