//! Library results checked against independent computations done here.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use superdatum::analysis::{components, weyl_orbit};
use superdatum::catalog::{build_datum, build_grs, Family, FamilyTag, GroupForm};
use superdatum::grs::{Grs, Parity};
use superdatum::lattice::{smith_normal_form, LatticeVector};
use superdatum::linalg::{q, Q};
use superdatum::superalgebra::{self, cartan_element, invariant_forms};
use superdatum::supermatrix::{berezinian, GrassmannElement, SuperMatrix};

// ---------------------------------------------------------------------------
// Smith normal form against determinantal divisors

fn det_i64(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, x)| *x)
                            .collect()
                    })
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det_i64(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..1u32 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// `d₁ ⋯ d_k` equals the gcd of all k×k minors.
fn determinantal_divisors(m: &[Vec<i64>]) -> Vec<i64> {
    let (r, c) = (m.len(), m[0].len());
    let mut out = Vec::new();
    for k in 1..=r.min(c) {
        let mut g = 0i64;
        for rows in subsets(r, k) {
            for cols in subsets(c, k) {
                let minor: Vec<Vec<i64>> = rows
                    .iter()
                    .map(|&i| cols.iter().map(|&j| m[i][j]).collect())
                    .collect();
                g = g.gcd(&det_i64(&minor));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g);
    }
    out
}

#[test]
fn smith_form_matches_determinantal_divisors() {
    let cases: Vec<Vec<Vec<i64>>> = vec![
        vec![vec![2, 0], vec![0, 3]],
        vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]],
        vec![vec![1, -1, 0, 0], vec![0, 1, -1, 0]],
        vec![vec![6, 10], vec![15, 4], vec![9, 21]],
        vec![vec![0, 0], vec![0, 0]],
    ];
    for m in cases {
        let z: Vec<Vec<BigInt>> = m
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let got = smith_normal_form(&z, m[0].len()).invariant_factors();
        let divisors = determinantal_divisors(&m);
        let mut expected = Vec::new();
        let mut prev = 1i64;
        for d in divisors {
            expected.push(BigInt::from(d / prev));
            prev = d;
        }
        let got: Vec<BigInt> = got.iter().map(|x| x.abs()).collect();
        assert_eq!(got, expected, "{m:?}");
    }
}

// ---------------------------------------------------------------------------
// Components by transitive closure

fn closure_components(g: &Grs) -> BTreeSet<BTreeSet<usize>> {
    let roots = g.roots();
    let n = roots.len();
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            let (u, v) = (&roots[i].vector, &roots[j].vector);
            let prop = (0..u.len()).all(|a| (0..u.len()).all(|b| &u[a] * &v[b] == &u[b] * &v[a]));
            reach[i][j] = i == j || !g.pair(u, v).is_zero() || prop;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    (0..n)
        .map(|i| (0..n).filter(|&j| reach[i][j]).collect())
        .collect()
}

#[test]
fn components_agree_with_transitive_closure() {
    let pieces = [
        Family::A { m: 2, n: 1 },
        Family::B { m: 0, n: 1 },
        Family::A { m: 1, n: 1 },
        Family::D21a(q(2)),
        Family::C { n: 2 },
    ];
    for a in &pieces {
        for b in &pieces {
            let sum = Grs::direct_sum(&[&build_grs(a).unwrap(), &build_grs(b).unwrap()]).unwrap();
            let got: BTreeSet<BTreeSet<usize>> = components(&sum)
                .into_iter()
                .map(|c| c.into_iter().collect())
                .collect();
            assert_eq!(got, closure_components(&sum), "{a} ⊕ {b}");
            assert_eq!(got.len(), 2);
        }
    }
}

// ---------------------------------------------------------------------------
// Brackets against explicit supermatrices

type M = Vec<Vec<i64>>;

fn elementary(size: usize, i: usize, j: usize) -> M {
    let mut m = vec![vec![0; size]; size];
    m[i][j] = 1;
    m
}

fn mat_mul(a: &M, b: &M) -> M {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

#[test]
fn gl_brackets_are_supercommutators() {
    for (m, n) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        let sa = superalgebra::gl(m, n).unwrap();
        let size = m + n;
        let odd = |i: usize, j: usize| (i < m) != (j < m);
        let cells: Vec<(usize, usize)> = (0..size)
            .flat_map(|i| (0..size).map(move |j| (i, j)))
            .collect();
        for &(a, b) in &cells {
            for &(c, d) in &cells {
                let x = elementary(size, a, b);
                let y = elementary(size, c, d);
                let sign = if odd(a, b) && odd(c, d) { -1 } else { 1 };
                let xy = mat_mul(&x, &y);
                let yx = mat_mul(&y, &x);
                let expected: M = (0..size)
                    .map(|i| (0..size).map(|j| xy[i][j] - sign * yx[i][j]).collect())
                    .collect();
                let label = |i: usize, j: usize| format!("E{}{}", i + 1, j + 1);
                let xi = sa.basis_vector(sa.index_of(&label(a, b)).unwrap());
                let yi = sa.basis_vector(sa.index_of(&label(c, d)).unwrap());
                let got = sa.bracket(&xi, &yi);
                for (i, row) in expected.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        assert_eq!(
                            got[sa.index_of(&label(i, j)).unwrap()],
                            q(*v),
                            "gl({m}|{n}) [{},{}]",
                            label(a, b),
                            label(c, d)
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn gl11_cartan_element_under_the_supertrace_form() {
    let sa = superalgebra::gl(1, 1).unwrap();
    let forms = invariant_forms(&sa, 3);
    // The supertrace form: str(E11 E11) = 1, str(E22 E22) = −1, str(E12 E21) = 1, str(E21 E12) = −1.
    let idx = |l: &str| sa.index_of(l).unwrap();
    let mut b = superdatum::linalg::Matrix::zeros(4, 4);
    b[(idx("E11"), idx("E11"))] = q(1);
    b[(idx("E22"), idx("E22"))] = q(-1);
    b[(idx("E12"), idx("E21"))] = q(1);
    b[(idx("E21"), idx("E12"))] = q(-1);
    assert!(superdatum::superalgebra::check_invariant_form(&sa, &b).is_none());
    let rank_with = {
        let mut rows: Vec<Vec<Q>> = forms.basis.iter().map(flatten).collect();
        rows.push(flatten(&b));
        superdatum::linalg::rank_of(&rows)
    };
    assert_eq!(
        rank_with,
        forms.basis.len(),
        "supertrace form lies in the computed space"
    );
    // θ = ε₁ − δ₁ takes values (1, −1) on (E11, E22).
    let theta: Vec<Q> = sa
        .cartan()
        .iter()
        .map(|&i| if i == idx("E11") { q(1) } else { q(-1) })
        .collect();
    let h = cartan_element(&sa, &b, &theta).unwrap();
    let mut expected = vec![q(0); 4];
    expected[idx("E11")] = q(1);
    expected[idx("E22")] = q(1);
    assert_eq!(h, expected);
    let bracket = sa.bracket(&sa.basis_vector(idx("E12")), &sa.basis_vector(idx("E21")));
    assert_eq!(bracket, expected);
}

fn flatten(m: &superdatum::linalg::Matrix) -> Vec<Q> {
    m.to_rows().concat()
}

// ---------------------------------------------------------------------------
// Berezinian by hand expansion

#[test]
fn berezinian_hand_expansions() {
    let e = |s: &str| GrassmannElement::parse(s, 2).unwrap();
    // [[1, θ1], [θ2, 1]]: (1 − θ1·1·θ2)·1
    let g = SuperMatrix::new(1, 1, vec![vec![e("1"), e("θ1")], vec![e("θ2"), e("1")]]).unwrap();
    assert_eq!(berezinian(&g).unwrap(), e("1 - θ1θ2"));
    // [[a, 0], [0, d]] with a = 3 + θ1θ2, d = 2: a/d
    let g = SuperMatrix::new(
        1,
        1,
        vec![vec![e("3 + θ1θ2"), e("0")], vec![e("0"), e("2")]],
    )
    .unwrap();
    assert_eq!(berezinian(&g).unwrap(), e("3/2 + 1/2*θ1θ2"));
    // d = 1 + θ1θ2 has inverse 1 − θ1θ2
    let g = SuperMatrix::new(
        1,
        1,
        vec![vec![e("1"), e("0")], vec![e("0"), e("1 + θ1θ2")]],
    )
    .unwrap();
    assert_eq!(berezinian(&g).unwrap(), e("1 - θ1θ2"));
    assert_eq!(&e("1 + θ1") * &e("1 - θ1"), e("1"));
}

// ---------------------------------------------------------------------------
// Weyl orbits by closure

#[test]
fn orbits_match_reflection_closure() {
    let tag = FamilyTag::new(Family::A { m: 2, n: 1 }, GroupForm::GL).unwrap();
    let d = build_datum(&tag).unwrap();
    let v = LatticeVector::from_i64(&[1, 0, -1]);
    let got = weyl_orbit(&d, &v, 100).unwrap();
    // Only even reflection swaps ε₁ and ε₂.
    let expected: BTreeSet<LatticeVector> = [
        LatticeVector::from_i64(&[1, 0, -1]),
        LatticeVector::from_i64(&[0, 1, -1]),
    ]
    .into_iter()
    .collect();
    assert_eq!(got, expected);

    let osp = build_datum(&FamilyTag::of(Family::B { m: 0, n: 1 }).unwrap()).unwrap();
    let two_delta = LatticeVector::from_i64(&[2]);
    let got = weyl_orbit(&osp, &two_delta, 100).unwrap();
    assert_eq!(
        got,
        [
            LatticeVector::from_i64(&[2]),
            LatticeVector::from_i64(&[-2])
        ]
        .into_iter()
        .collect()
    );
}

// ---------------------------------------------------------------------------
// Root counts by formula

#[test]
fn root_counts_by_formula() {
    for m in 1..=4usize {
        for n in 1..=4usize {
            let g = build_grs(&Family::A { m, n }).unwrap();
            assert_eq!(g.count(Parity::Even), m * (m - 1) + n * (n - 1));
            assert_eq!(g.count(Parity::Odd), 2 * m * n);
        }
    }
    for m in 0..=3usize {
        for n in 1..=3usize {
            // osp(2m+1|2n): even 2m² + 2n², odd 2n(2m+1)
            let g = build_grs(&Family::B { m, n }).unwrap();
            assert_eq!(g.count(Parity::Even), 2 * m * m + 2 * n * n, "B({m},{n})");
            assert_eq!(g.count(Parity::Odd), 2 * n * (2 * m + 1), "B({m},{n})");
        }
    }
    let f4 = build_grs(&Family::F4).unwrap();
    assert_eq!((f4.count(Parity::Even), f4.count(Parity::Odd)), (20, 16));
    let g3 = build_grs(&Family::G3).unwrap();
    assert_eq!((g3.count(Parity::Even), g3.count(Parity::Odd)), (14, 14));
}
