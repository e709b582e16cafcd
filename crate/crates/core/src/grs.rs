//! Generalized root systems: parity-labelled finite root sets in a rational
//! quadratic space, with coroots and even/odd reflections.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::RationalForm;
use crate::linalg::{self, fmt_vec, q, Matrix, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn from_bit(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn bit(self) -> u8 {
        self as u8
    }
}

/// Parity of the sum (the bracket lands in this parity).
impl std::ops::Add for Parity {
    type Output = Parity;

    fn add(self, other: Parity) -> Parity {
        Parity::from_bit(self.is_odd() != other.is_odd())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    pub parity: Parity,
    pub vector: Vec<Q>,
}

/// A generalized root system `𝔯 = Φ ∪ Γ ⊂ ℚ^dim`.
///
/// Roots are kept sorted (even before odd, then lexicographically on
/// coordinates) with a hash index for membership tests.
#[derive(Clone, Debug)]
pub struct Grs {
    form: RationalForm,
    roots: Vec<Root>,
    index: HashMap<Vec<Q>, usize>,
}

impl PartialEq for Grs {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form && self.roots == other.roots
    }
}

impl Eq for Grs {}

impl Grs {
    pub fn new(
        form: RationalForm,
        roots: impl IntoIterator<Item = (Vec<Q>, Parity)>,
    ) -> Result<Self> {
        let g = Self::new_unchecked(form, roots)?;
        if g.roots.iter().any(|r| linalg::is_zero_vec(&r.vector)) {
            return Err(Error::ZeroRoot);
        }
        Ok(g)
    }

    /// Skips the nonzero-root check; used to diagnose root data whose roots
    /// collapse in the character lattice.
    pub(crate) fn new_unchecked(
        form: RationalForm,
        roots: impl IntoIterator<Item = (Vec<Q>, Parity)>,
    ) -> Result<Self> {
        let mut roots: Vec<Root> = roots
            .into_iter()
            .map(|(vector, parity)| Root { parity, vector })
            .collect();
        if let Some(r) = roots.iter().find(|r| r.vector.len() != form.dim()) {
            return Err(Error::DimensionMismatch {
                expected: form.dim(),
                got: r.vector.len(),
            });
        }
        roots.sort();
        let mut index = HashMap::with_capacity(roots.len());
        for (i, r) in roots.iter().enumerate() {
            if let Some(&j) = index.get(&r.vector) {
                let other: &Root = &roots[j];
                return Err(if other.parity == r.parity {
                    Error::DuplicateRoot(fmt_vec(&r.vector))
                } else {
                    Error::ParityClash(fmt_vec(&r.vector))
                });
            }
            index.insert(r.vector.clone(), i);
        }
        Ok(Grs { form, roots, index })
    }

    pub fn empty(dim: usize) -> Self {
        Grs {
            form: RationalForm::diagonal(&vec![Q::one(); dim]),
            roots: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn form(&self) -> &RationalForm {
        &self.form
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn even(&self) -> impl Iterator<Item = &Vec<Q>> {
        self.roots
            .iter()
            .filter(|r| r.parity == Parity::Even)
            .map(|r| &r.vector)
    }

    pub fn odd(&self) -> impl Iterator<Item = &Vec<Q>> {
        self.roots
            .iter()
            .filter(|r| r.parity == Parity::Odd)
            .map(|r| &r.vector)
    }

    pub fn count(&self, parity: Parity) -> usize {
        self.roots.iter().filter(|r| r.parity == parity).count()
    }

    pub fn vectors(&self) -> Vec<Vec<Q>> {
        self.roots.iter().map(|r| r.vector.clone()).collect()
    }

    pub fn parity_of(&self, v: &[Q]) -> Option<Parity> {
        self.index.get(v).map(|&i| self.roots[i].parity)
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.index.contains_key(v)
    }

    pub fn index_of(&self, v: &[Q]) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn pair(&self, u: &[Q], v: &[Q]) -> Q {
        self.form.eval(u, v)
    }

    pub fn norm(&self, v: &[Q]) -> Q {
        self.form.eval(v, v)
    }

    pub fn is_isotropic(&self, v: &[Q]) -> bool {
        self.norm(v).is_zero()
    }

    pub fn span_rank(&self) -> usize {
        linalg::rank_of(&self.vectors())
    }

    /// Coroot `2β/(β,β)`, so that `(ν, β^∨) = ⟨ν, β^∨⟩`.
    pub fn coroot(&self, beta: &[Q]) -> Result<Vec<Q>> {
        let n = self.norm(beta);
        if n.is_zero() {
            return Err(Error::IsotropicRoot(fmt_vec(beta)));
        }
        Ok(linalg::scale(&(q(2) / n), beta))
    }

    /// `⟨ν, β^∨⟩ = 2(ν,β)/(β,β)`.
    pub fn cartan_integer(&self, nu: &[Q], beta: &[Q]) -> Result<Q> {
        let n = self.norm(beta);
        if n.is_zero() {
            return Err(Error::IsotropicRoot(fmt_vec(beta)));
        }
        Ok(q(2) * self.pair(nu, beta) / n)
    }

    /// Linear reflection `ν ↦ ν − ⟨ν, β^∨⟩β` in a non-isotropic vector.
    pub fn reflect(&self, beta: &[Q], nu: &[Q]) -> Result<Vec<Q>> {
        let c = self.cartan_integer(nu, beta)?;
        Ok(linalg::sub(nu, &linalg::scale(&c, beta)))
    }

    /// Odd reflection in `γ` applied to a root `β`.
    ///
    /// Non-isotropic `γ` reflects linearly. Isotropic `γ` fixes roots orthogonal
    /// to it and otherwise moves `β` to whichever of `β ± γ` lies in the root set;
    /// exactly one of them must.
    pub fn odd_reflection(&self, gamma: &[Q], beta: &[Q]) -> Result<Vec<Q>> {
        if self.parity_of(gamma) != Some(Parity::Odd) {
            return Err(Error::NotARoot(format!(
                "{} (as an odd root)",
                fmt_vec(gamma)
            )));
        }
        if !self.contains(beta) {
            return Err(Error::NotARoot(fmt_vec(beta)));
        }
        self.odd_reflection_unchecked(gamma, beta)
    }

    pub(crate) fn odd_reflection_unchecked(&self, gamma: &[Q], beta: &[Q]) -> Result<Vec<Q>> {
        if !self.is_isotropic(gamma) {
            return self.reflect(gamma, beta);
        }
        if self.pair(gamma, beta).is_zero() {
            return Ok(beta.to_vec());
        }
        let plus = linalg::add(beta, gamma);
        let minus = linalg::sub(beta, gamma);
        match (self.contains(&plus), self.contains(&minus)) {
            (true, false) => Ok(plus),
            (false, true) => Ok(minus),
            (both, _) => Err(Error::AmbiguousReflection {
                gamma: fmt_vec(gamma),
                beta: fmt_vec(beta),
                detail: if both {
                    "both β+γ and β−γ are roots".into()
                } else {
                    "neither β+γ nor β−γ is a root".into()
                },
            }),
        }
    }

    /// Gram matrix of the form on a basis of the span of the roots.
    pub fn span_gram(&self) -> Matrix {
        let vs = self.vectors();
        let basis: Vec<Vec<Q>> = linalg::independent_subset(&vs)
            .into_iter()
            .map(|i| vs[i].clone())
            .collect();
        crate::lattice::gram_matrix(&self.form, &basis).expect("dimensions agree")
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(parts: &[&Grs]) -> Result<Grs> {
        if parts.is_empty() {
            return Err(Error::EmptySum);
        }
        let dim: usize = parts.iter().map(|g| g.dim()).sum();
        let form = RationalForm::direct_sum(&parts.iter().map(|g| g.form()).collect::<Vec<_>>());
        let mut roots = Vec::new();
        let mut off = 0;
        for g in parts {
            for r in g.roots() {
                let mut v = linalg::zero_vec(dim);
                v[off..off + g.dim()].clone_from_slice(&r.vector);
                roots.push((v, r.parity));
            }
            off += g.dim();
        }
        Grs::new(form, roots)
    }
}

/// The lemma-level properties every valid generalized root system satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lemma {
    /// `𝔯 = −𝔯`
    Symmetry,
    /// `2γ ∈ Φ` for non-isotropic odd `γ`
    Doubling,
    /// `⟨β, γ^∨⟩ ∈ ℤ` for non-isotropic odd `γ`
    Integrality,
    /// `β + kγ ∈ 𝔯` forces `k ∈ {0, ±1}` for isotropic `γ` and `β ≠ ±γ`
    StringBound,
    /// exactly one of `β ± γ` is a root when `(γ, β) ≠ 0`, `γ` isotropic
    UniquePair,
    /// the isotropic odd reflection is an involution
    Involution,
}

impl Lemma {
    pub const ALL: [Lemma; 6] = [
        Lemma::Symmetry,
        Lemma::Doubling,
        Lemma::Integrality,
        Lemma::StringBound,
        Lemma::UniquePair,
        Lemma::Involution,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Lemma::Symmetry => "symmetry",
            Lemma::Doubling => "non-isotropic doubling",
            Lemma::Integrality => "integrality",
            Lemma::StringBound => "string bound",
            Lemma::UniquePair => "unique pair",
            Lemma::Involution => "involution",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub results: Vec<(Lemma, Option<String>)>,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|(_, w)| w.is_none())
    }

    pub fn violation(&self, lemma: Lemma) -> Option<&str> {
        self.results
            .iter()
            .find(|(l, _)| *l == lemma)
            .and_then(|(_, w)| w.as_deref())
    }
}

/// Exhaustively checks every [`Lemma`] over all roots and pairs.
pub fn check_lemmas(grs: &Grs) -> LemmaReport {
    let vs = grs.vectors();
    let odd: Vec<&Vec<Q>> = grs.odd().collect();
    let (iso, noniso): (Vec<&Vec<Q>>, Vec<&Vec<Q>>) = odd.iter().partition(|g| grs.is_isotropic(g));
    let max_coord = vs
        .iter()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Q::zero);

    let symmetry = vs
        .iter()
        .find(|v| grs.parity_of(&linalg::neg(v)) != grs.parity_of(v))
        .map(|v| format!("−({}) is missing or has the other parity", fmt_vec(v)));

    let doubling = noniso
        .iter()
        .find(|g| grs.parity_of(&linalg::scale(&q(2), g)) != Some(Parity::Even))
        .map(|g| format!("2·({}) is not an even root", fmt_vec(g)));

    let integrality = noniso.iter().find_map(|g| {
        vs.iter().find_map(|b| {
            let c = grs.cartan_integer(b, g).expect("non-isotropic");
            (!c.is_integer()).then(|| {
                format!(
                    "⟨{}, ({})^∨⟩ = {}",
                    fmt_vec(b),
                    fmt_vec(g),
                    linalg::fmt_q(&c)
                )
            })
        })
    });

    let string_bound = iso.iter().find_map(|g| {
        // |β_i + kγ_i| ≤ max_coord bounds |k| on a coordinate where γ_i ≠ 0.
        let gi = g
            .iter()
            .map(|x| x.abs())
            .filter(|x| !x.is_zero())
            .max()
            .expect("nonzero");
        let kmax = ((q(2) * &max_coord) / gi).ceil().to_integer();
        let ng = linalg::neg(g);
        vs.iter().filter(|b| *b != *g && **b != ng).find_map(|b| {
            let mut k = num_bigint::BigInt::from(2);
            while k <= kmax {
                for s in [Q::from_integer(k.clone()), -Q::from_integer(k.clone())] {
                    let v = linalg::add(b, &linalg::scale(&s, g));
                    if grs.contains(&v) {
                        return Some(format!(
                            "{} + ({})·({}) is a root",
                            fmt_vec(b),
                            linalg::fmt_q(&s),
                            fmt_vec(g)
                        ));
                    }
                }
                k += 1;
            }
            None
        })
    });

    let unique_pair = iso.iter().find_map(|g| {
        vs.iter().find_map(|b| {
            if grs.pair(g, b).is_zero() {
                return None;
            }
            let p = grs.contains(&linalg::add(b, g));
            let m = grs.contains(&linalg::sub(b, g));
            (p == m).then(|| {
                format!(
                    "β = {}, γ = {}: {} of β±γ are roots",
                    fmt_vec(b),
                    fmt_vec(g),
                    if p { "both" } else { "neither" }
                )
            })
        })
    });

    let involution = iso.iter().find_map(|g| {
        vs.iter().find_map(|b| {
            let once = match grs.odd_reflection_unchecked(g, b) {
                Ok(v) => v,
                Err(e) => return Some(e.to_string()),
            };
            if !grs.contains(&once) {
                return Some(format!(
                    "r_γ({}) = {} is not a root",
                    fmt_vec(b),
                    fmt_vec(&once)
                ));
            }
            match grs.odd_reflection_unchecked(g, &once) {
                Ok(twice) if twice == *b => None,
                Ok(twice) => Some(format!(
                    "r_γ r_γ({}) = {} for γ = {}",
                    fmt_vec(b),
                    fmt_vec(&twice),
                    fmt_vec(g)
                )),
                Err(e) => Some(e.to_string()),
            }
        })
    });

    LemmaReport {
        results: vec![
            (Lemma::Symmetry, symmetry),
            (Lemma::Doubling, doubling),
            (Lemma::Integrality, integrality),
            (Lemma::StringBound, string_bound),
            (Lemma::UniquePair, unique_pair),
            (Lemma::Involution, involution),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| q(a)).collect()
    }

    /// sl(2|1) in (ε₁, ε₂, δ) coordinates.
    fn sl21() -> Grs {
        let form = RationalForm::diagonal(&v(&[1, 1, -1]));
        let mut roots = vec![
            (v(&[1, -1, 0]), Parity::Even),
            (v(&[-1, 1, 0]), Parity::Even),
        ];
        for r in [[1, 0, -1], [0, 1, -1]] {
            roots.push((v(&r), Parity::Odd));
            roots.push((linalg::neg(&v(&r)), Parity::Odd));
        }
        Grs::new(form, roots).unwrap()
    }

    fn osp12() -> Grs {
        let form = RationalForm::diagonal(&v(&[-1]));
        Grs::new(
            form,
            vec![
                (v(&[2]), Parity::Even),
                (v(&[-2]), Parity::Even),
                (v(&[1]), Parity::Odd),
                (v(&[-1]), Parity::Odd),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_zero_and_parity_clash() {
        let form = RationalForm::diagonal(&v(&[1, -1]));
        assert_eq!(
            Grs::new(form.clone(), vec![(v(&[0, 0]), Parity::Odd)]),
            Err(Error::ZeroRoot)
        );
        assert!(matches!(
            Grs::new(
                form,
                vec![(v(&[1, 0]), Parity::Odd), (v(&[1, 0]), Parity::Even)]
            ),
            Err(Error::ParityClash(_))
        ));
    }

    #[test]
    fn coroot_examples() {
        let g = osp12();
        // 2·(2δ)/(2δ,2δ) = 4δ/(−4) = −δ
        assert_eq!(g.coroot(&v(&[2])).unwrap(), v(&[-1]));
        assert_eq!(g.cartan_integer(&v(&[2]), &v(&[2])).unwrap(), q(2));

        let e = Grs::new(
            RationalForm::diagonal(&v(&[1, 1])),
            vec![(v(&[1, -1]), Parity::Even), (v(&[-1, 1]), Parity::Even)],
        )
        .unwrap();
        assert_eq!(e.coroot(&v(&[1, -1])).unwrap(), v(&[1, -1]));

        assert!(matches!(
            sl21().coroot(&v(&[1, 0, -1])),
            Err(Error::IsotropicRoot(_))
        ));
    }

    #[test]
    fn odd_reflection_examples() {
        let g = sl21();
        // (γ, β) = 1 and only β − γ = δ − ε₂ is a root
        assert_eq!(
            g.odd_reflection(&v(&[1, 0, -1]), &v(&[1, -1, 0])).unwrap(),
            v(&[0, -1, 1])
        );
        // (ε₁−δ, ε₂−δ) = (−δ, −δ) = −1 ≠ 0; β + γ ∉ 𝔯, β − γ = ε₂ − ε₁
        assert_eq!(g.pair(&v(&[1, 0, -1]), &v(&[0, 1, -1])), q(-1));
        assert_eq!(
            g.odd_reflection(&v(&[1, 0, -1]), &v(&[0, 1, -1])).unwrap(),
            v(&[-1, 1, 0])
        );
        // γ fixes −γ
        assert_eq!(
            g.odd_reflection(&v(&[1, 0, -1]), &v(&[-1, 0, 1])).unwrap(),
            v(&[-1, 0, 1])
        );

        let o = osp12();
        assert_eq!(o.odd_reflection(&v(&[1]), &v(&[2])).unwrap(), v(&[-2]));
        assert!(matches!(
            o.odd_reflection(&v(&[2]), &v(&[1])),
            Err(Error::NotARoot(_))
        ));
        assert!(matches!(
            o.odd_reflection(&v(&[1]), &v(&[3])),
            Err(Error::NotARoot(_))
        ));
    }

    #[test]
    fn ambiguous_reflection_is_an_error() {
        // γ isotropic with both β ± γ present
        let gamma = v(&[1, 1, 0]);
        let beta = v(&[0, 0, 1]);
        let bad = Grs::new(
            RationalForm::new(Matrix::from_i64(&[
                vec![1, 0, 1],
                vec![0, -1, 0],
                vec![1, 0, 1],
            ]))
            .unwrap(),
            vec![
                (gamma.clone(), Parity::Odd),
                (beta.clone(), Parity::Even),
                (linalg::add(&beta, &gamma), Parity::Odd),
                (linalg::sub(&beta, &gamma), Parity::Odd),
            ],
        )
        .unwrap();
        assert!(bad.is_isotropic(&gamma));
        assert!(!bad.pair(&gamma, &beta).is_zero());
        assert!(matches!(
            bad.odd_reflection(&gamma, &beta),
            Err(Error::AmbiguousReflection { .. })
        ));
    }

    #[test]
    fn lemmas_hold_for_small_systems() {
        let r = check_lemmas(&sl21());
        assert!(r.all_pass(), "{:?}", r);
        assert!(check_lemmas(&osp12()).all_pass());
        assert!(check_lemmas(&Grs::empty(2)).all_pass());
    }

    #[test]
    fn lemma_violations_are_witnessed() {
        // drop −2δ from osp(1|2): symmetry fails; drop 2δ: doubling fails
        let form = RationalForm::diagonal(&v(&[-1]));
        let g = Grs::new(form, vec![(v(&[1]), Parity::Odd), (v(&[-1]), Parity::Odd)]).unwrap();
        let r = check_lemmas(&g);
        assert!(r.violation(Lemma::Doubling).is_some());
        assert!(r.violation(Lemma::Symmetry).is_none());

        // isotropic γ with a long string
        let form = RationalForm::diagonal(&v(&[1, -1]));
        let g = Grs::new(
            form,
            vec![
                (v(&[1, 1]), Parity::Odd),
                (v(&[-1, -1]), Parity::Odd),
                (v(&[1, 0]), Parity::Even),
                (v(&[-1, 0]), Parity::Even),
                (v(&[3, 2]), Parity::Even),
                (v(&[-3, -2]), Parity::Even),
            ],
        )
        .unwrap();
        assert!(check_lemmas(&g).violation(Lemma::StringBound).is_some());
    }

    #[test]
    fn direct_sum_dimensions() {
        let s = Grs::direct_sum(&[&sl21(), &osp12()]).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(s.len(), 10);
        assert_eq!(Grs::direct_sum(&[&sl21()]).unwrap(), sl21());
        assert_eq!(Grs::direct_sum(&[]), Err(Error::EmptySum));
    }
}
