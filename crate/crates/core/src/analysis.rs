//! Decomposition into irreducible components, family recognition, equivalence
//! of root data and Weyl orbits.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::catalog::{build_grs, d21a_canonical, Family};
use crate::error::{Error, Result};
use crate::grs::{Grs, Parity};
use crate::lattice::{
    self, q_to_z, smith_normal_form, z_to_q, LatticeVector, RationalForm, ZMatrix,
};
use crate::linalg::{self, fmt_q, Echelon, Matrix, Q};
use crate::rootdatum::RootDatum;

pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

fn parallel(a: &[Q], b: &[Q]) -> bool {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if &a[i] * &b[j] != &a[j] * &b[i] {
                return false;
            }
        }
    }
    true
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

/// Root indices of each connected component, ordered by smallest index.
///
/// Roots are adjacent when they are non-orthogonal or proportional; the
/// second rule keeps `γ` and `−γ` together when `γ` is isotropic.
pub fn components(grs: &Grs) -> Vec<Vec<usize>> {
    let roots = grs.roots();
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let fi = grs.form().matrix().mul_vec(&roots[i].vector);
        for j in i + 1..n {
            let linked = !linalg::dot(&fi, &roots[j].vector).is_zero()
                || parallel(&roots[i].vector, &roots[j].vector);
            if linked {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        let k = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[k].push(i);
    }
    groups
}

/// Irreducible components, each on the rational span of its roots (basis:
/// the first independent roots in canonical order) with the restricted form.
pub fn decompose(grs: &Grs) -> Vec<Grs> {
    components(grs)
        .into_iter()
        .map(|idx| {
            let vs: Vec<Vec<Q>> = idx.iter().map(|&i| grs.roots()[i].vector.clone()).collect();
            let basis: Vec<Vec<Q>> = linalg::independent_subset(&vs)
                .into_iter()
                .map(|i| vs[i].clone())
                .collect();
            let m = Matrix::from_columns(&basis, grs.dim());
            let gram = lattice::gram_matrix(grs.form(), &basis).expect("dims");
            let roots = idx
                .iter()
                .zip(&vs)
                .map(|(&i, v)| (m.solve(v).expect("in span"), grs.roots()[i].parity));
            Grs::new(RationalForm::new(gram).expect("symmetric"), roots).expect("component")
        })
        .collect()
}

/// True iff there is exactly one component; the empty system has none.
pub fn is_irreducible(grs: &Grs) -> bool {
    components(grs).len() == 1
}

/// Basis of the span of `vectors` chosen greedily so that each prefix spans
/// as many of the vectors as possible, with coefficients of every vector.
struct Plan {
    basis: Vec<usize>,
    coeffs: Vec<Vec<Q>>,
    /// Vectors whose coefficients are supported on the first `t + 1` basis elements.
    by_level: Vec<Vec<usize>>,
}

impl Plan {
    fn new(vectors: &[Vec<Q>], dim: usize) -> Plan {
        let k = linalg::rank_of(vectors);
        let mut basis = Vec::new();
        let mut ech = Echelon::default();
        while ech.dim() < k {
            let mut best: Option<(usize, usize)> = None;
            for (i, v) in vectors.iter().enumerate() {
                if ech.contains(v) {
                    continue;
                }
                let mut e = ech.clone();
                e.insert(v);
                let covered = vectors.iter().filter(|w| e.contains(w)).count();
                if best.is_none_or(|(_, c)| covered > c) {
                    best = Some((i, covered));
                }
            }
            let (i, _) = best.expect("rank not reached");
            ech.insert(&vectors[i]);
            basis.push(i);
        }
        let m = Matrix::from_columns(
            &basis
                .iter()
                .map(|&i| vectors[i].clone())
                .collect::<Vec<_>>(),
            dim,
        );
        let coeffs: Vec<Vec<Q>> = vectors
            .iter()
            .map(|v| m.solve(v).expect("in span"))
            .collect();
        let mut by_level = vec![Vec::new(); k];
        for (r, c) in coeffs.iter().enumerate() {
            if let Some(last) = c.iter().rposition(|x| !x.is_zero()) {
                by_level[last].push(r);
            }
        }
        Plan {
            basis,
            coeffs,
            by_level,
        }
    }

    fn image(&self, r: usize, imgs: &[Vec<Q>], dim: usize) -> Vec<Q> {
        let mut out = linalg::zero_vec(dim);
        for (c, img) in self.coeffs[r].iter().zip(imgs) {
            if !c.is_zero() {
                for (o, x) in out.iter_mut().zip(img) {
                    *o += c * x;
                }
            }
        }
        out
    }
}

/// `(level, candidate image, images chosen so far)`.
type Admissible<'a> = &'a dyn Fn(usize, &[Q], &[Vec<Q>]) -> bool;

struct Search<'a> {
    plan: &'a Plan,
    dst_dim: usize,
    /// Candidate images for each level, in preference order.
    candidates: Vec<Vec<Vec<Q>>>,
    /// Cheap test of a candidate at a level against earlier images.
    admissible: Admissible<'a>,
    /// Test of the image of source vector `r`.
    image_ok: &'a dyn Fn(usize, &[Q]) -> bool,
}

impl Search<'_> {
    /// Depth-first search; `accept` sees complete assignments in search order
    /// and returns true to stop.
    fn run(&self, accept: &mut dyn FnMut(&[Vec<Q>]) -> bool) -> bool {
        let mut imgs = Vec::new();
        self.step(0, &mut imgs, &Echelon::default(), accept)
    }

    fn step(
        &self,
        t: usize,
        imgs: &mut Vec<Vec<Q>>,
        ech: &Echelon,
        accept: &mut dyn FnMut(&[Vec<Q>]) -> bool,
    ) -> bool {
        if t == self.plan.basis.len() {
            return accept(imgs);
        }
        for cand in &self.candidates[t] {
            if !(self.admissible)(t, cand, imgs) || ech.contains(cand) {
                continue;
            }
            imgs.push(cand.clone());
            let closed = self.plan.by_level[t]
                .iter()
                .all(|&r| (self.image_ok)(r, &self.plan.image(r, imgs, self.dst_dim)));
            if closed {
                let mut e = ech.clone();
                e.insert(cand);
                if self.step(t + 1, imgs, &e, accept) {
                    return true;
                }
            }
            imgs.pop();
        }
        false
    }
}

/// A linear map `W` (`dst.dim × src.dim`) with `W(𝔯_src) = 𝔯_dst` preserving
/// parity and `(Wx, Wy) = scale·(x, y)`, zero on a complement of the span.
pub fn find_isometry(src: &Grs, dst: &Grs, scale: &Q) -> Option<Matrix> {
    if src.len() != dst.len()
        || src.count(Parity::Even) != dst.count(Parity::Even)
        || src.span_rank() != dst.span_rank()
    {
        return None;
    }
    let sv = src.vectors();
    let plan = Plan::new(&sv, src.dim());
    let basis: Vec<Vec<Q>> = plan.basis.iter().map(|&i| sv[i].clone()).collect();
    let gram = lattice::gram_matrix(src.form(), &basis).expect("dims");
    let src_parity: Vec<Parity> = src.roots().iter().map(|r| r.parity).collect();
    let dst_norms: HashMap<Vec<Q>, Q> = dst
        .roots()
        .iter()
        .map(|r| (r.vector.clone(), dst.norm(&r.vector)))
        .collect();
    let candidates: Vec<Vec<Vec<Q>>> = plan
        .basis
        .iter()
        .enumerate()
        .map(|(t, &b)| {
            let want = scale * &gram[(t, t)];
            dst.roots()
                .iter()
                .filter(|r| r.parity == src_parity[b] && dst_norms[&r.vector] == want)
                .map(|r| r.vector.clone())
                .collect()
        })
        .collect();
    let admissible = |t: usize, cand: &[Q], imgs: &[Vec<Q>]| {
        imgs.iter()
            .enumerate()
            .all(|(s, img)| dst.pair(cand, img) == scale * &gram[(t, s)])
    };
    let image_ok = |r: usize, img: &[Q]| dst.parity_of(img) == Some(src_parity[r]);
    let search = Search {
        plan: &plan,
        dst_dim: dst.dim(),
        candidates,
        admissible: &admissible,
        image_ok: &image_ok,
    };
    let mut found = None;
    search.run(&mut |imgs| {
        found = Some(imgs.to_vec());
        true
    });
    let imgs = found?;
    Some(extend_to_ambient(&basis, &imgs, src.dim(), dst.dim()))
}

/// `W` with `W bᵢ = imgᵢ` and `W = 0` on unit vectors completing the basis.
fn extend_to_ambient(basis: &[Vec<Q>], imgs: &[Vec<Q>], n: usize, m: usize) -> Matrix {
    let mut cols = basis.to_vec();
    let mut targets = imgs.to_vec();
    let mut ech = Echelon::default();
    for b in basis {
        ech.insert(b);
    }
    for i in 0..n {
        let e = linalg::unit_vec(n, i);
        if ech.insert(&e) {
            cols.push(e);
            targets.push(linalg::zero_vec(m));
        }
    }
    let b = Matrix::from_columns(&cols, n);
    let t = Matrix::from_columns(&targets, m);
    t.mul(&b.inverse().expect("basis"))
}

fn nonzero_norms(g: &Grs) -> Vec<Q> {
    let mut v: Vec<Q> = g
        .roots()
        .iter()
        .map(|r| g.norm(&r.vector))
        .filter(|x| !x.is_zero())
        .collect();
    v.sort();
    v
}

fn nonzero_pairings(g: &Grs) -> Vec<Q> {
    let vs = g.vectors();
    let mut out = Vec::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let x = g.pair(&vs[i], &vs[j]);
            if !x.is_zero() {
                out.push(x);
            }
        }
    }
    out.sort();
    out
}

fn scaled_equal(a: &[Q], b: &[Q], c: &Q) -> bool {
    let mut s: Vec<Q> = b.iter().map(|x| x * c).collect();
    s.sort();
    a == s.as_slice()
}

/// Scales `c` with `norms(template) = c · norms(input)` as multisets, ordered
/// 1 first, then positive, then negative (each by absolute value).
fn candidate_scales(input: &Grs, template: &Grs) -> Vec<Q> {
    let (a, b) = match (nonzero_norms(input), nonzero_norms(template)) {
        (a, b) if a.is_empty() && b.is_empty() => {
            (nonzero_pairings(input), nonzero_pairings(template))
        }
        x => x,
    };
    if a.len() != b.len() {
        return Vec::new();
    }
    if a.is_empty() {
        return vec![Q::one()];
    }
    let mut out: Vec<Q> = b
        .iter()
        .map(|t| t / &a[0])
        .filter(|c| scaled_equal(&b, &a, c))
        .collect();
    out.sort_by_key(|c| (c != &Q::one(), c.is_negative(), c.abs()));
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recognition {
    /// `None` when no catalog template matches.
    pub family: Option<Family>,
    /// `(Wx, Wy)_template = scale · (x, y)_input`.
    pub scale: Option<Q>,
    /// `template_dim × input_dim`, maps the input roots onto the template roots.
    pub witness: Option<Matrix>,
    pub notes: Vec<String>,
}

impl Recognition {
    fn unknown(note: String) -> Self {
        Recognition {
            family: None,
            scale: None,
            witness: None,
            notes: vec![note],
        }
    }
}

struct Invariants {
    span_rank: usize,
    even: usize,
    odd: usize,
    isotropic_odd: usize,
}

fn invariants(g: &Grs) -> Invariants {
    Invariants {
        span_rank: g.span_rank(),
        even: g.count(Parity::Even),
        odd: g.count(Parity::Odd),
        isotropic_odd: g.odd().filter(|v| g.is_isotropic(v)).count(),
    }
}

/// Catalog families whose root system could have span rank `k`.
fn families_of_rank(k: usize, input: &Grs) -> Vec<Family> {
    let mut out = Vec::new();
    for m in 1..=k {
        out.push(Family::A { m, n: k + 1 - m });
    }
    for m in 0..k {
        out.push(Family::B { m, n: k - m });
    }
    if k >= 2 {
        out.push(Family::C { n: k - 1 });
    }
    for m in 2..k {
        out.push(Family::D { m, n: k - m });
    }
    if k == 3 {
        // D(2,1;α): even norms are c·(−2(1+α), 2, 2α) for a scale c
        let mut norms: Vec<Q> = input.even().map(|v| input.norm(v)).collect();
        norms.sort();
        norms.dedup();
        let mut alphas = BTreeSet::new();
        for x in &norms {
            for y in &norms {
                if !x.is_zero() && x != y {
                    alphas.insert(y / x);
                }
            }
        }
        if norms.len() == 2 && norms.iter().all(|x| !x.is_zero()) {
            alphas.insert(Q::one());
        }
        if norms.len() == 1 && !norms[0].is_zero() {
            alphas.insert(Q::one());
        }
        alphas.remove(&Q::zero());
        out.extend(alphas.into_iter().map(Family::D21a));
        out.push(Family::G3);
    }
    if k == 4 {
        out.push(Family::F4);
    }
    out
}

/// Identifies an irreducible GRS with a catalog family by isometry search.
pub fn recognize(grs: &Grs) -> Result<Recognition> {
    let comps = components(grs).len();
    if comps != 1 {
        return Err(Error::NotIrreducible { components: comps });
    }
    let inv = invariants(grs);
    let mut templates: Vec<(Family, Grs, Vec<Q>)> = Vec::new();
    for f in families_of_rank(inv.span_rank, grs) {
        let Ok(t) = build_grs(&f) else { continue };
        let ti = invariants(&t);
        if ti.even != inv.even || ti.odd != inv.odd || ti.isotropic_odd != inv.isotropic_odd {
            continue;
        }
        let scales = candidate_scales(grs, &t);
        if !scales.is_empty() {
            templates.push((f, t, scales));
        }
    }
    // scale 1 across all templates, then positive, then negative scales
    let class = |c: &Q| {
        if c.is_one() {
            0
        } else if c.is_positive() {
            1
        } else {
            2
        }
    };
    for pass in 0..3 {
        for (f, t, scales) in &templates {
            for c in scales.iter().filter(|c| class(c) == pass) {
                if let Some(w) = find_isometry(grs, t, c) {
                    return Ok(finish(grs, f.clone(), c.clone(), w));
                }
            }
        }
    }
    Ok(Recognition::unknown(format!(
        "no catalog template matches (span rank {}, {} even, {} odd of which {} isotropic)",
        inv.span_rank, inv.even, inv.odd, inv.isotropic_odd
    )))
}

fn finish(grs: &Grs, family: Family, scale: Q, witness: Matrix) -> Recognition {
    let Family::D21a(a) = &family else {
        let mut notes = Vec::new();
        if family == (Family::D { m: 2, n: 1 }) {
            notes.push("also matches D(2,1;α) for α in the orbit of 1; reported as D(2,1)".into());
        }
        return Recognition {
            family: Some(family),
            scale: Some(scale),
            witness: Some(witness),
            notes,
        };
    };
    let canon = d21a_canonical(a);
    let fam = Family::D21a(canon.clone());
    let notes = vec![format!(
        "parameter α = {} reported as the orbit representative {}",
        fmt_q(a),
        fmt_q(&canon)
    )];
    if canon == *a {
        return Recognition {
            family: Some(fam),
            scale: Some(scale),
            witness: Some(witness),
            notes,
        };
    }
    let t = build_grs(&fam).expect("canonical parameter is valid");
    for c in candidate_scales(grs, &t) {
        if let Some(w) = find_isometry(grs, &t, &c) {
            return Recognition {
                family: Some(fam),
                scale: Some(c),
                witness: Some(w),
                notes,
            };
        }
    }
    unreachable!("D(2,1;α) orbit members are isometric up to scale")
}

/// Checks a recognition witness directly: roots map onto the template roots
/// with parity, and the form is multiplied by the scale on root pairs.
pub fn check_witness(input: &Grs, template: &Grs, w: &Matrix, scale: &Q) -> bool {
    let imgs: Vec<Vec<Q>> = input.vectors().iter().map(|v| w.mul_vec(v)).collect();
    let set: BTreeSet<&Vec<Q>> = imgs.iter().collect();
    if set.len() != template.len() || imgs.len() != template.len() {
        return false;
    }
    for (r, img) in input.roots().iter().zip(&imgs) {
        if template.parity_of(img) != Some(r.parity) {
            return false;
        }
    }
    let vs = input.vectors();
    for i in 0..vs.len() {
        for j in i..vs.len() {
            if template.pair(&imgs[i], &imgs[j]) != scale * input.pair(&vs[i], &vs[j]) {
                return false;
            }
        }
    }
    true
}

/// `x ↦ A x` on canonical coordinates, `X₁ → X₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub matrix: ZMatrix,
    pub inverse: ZMatrix,
}

impl Equivalence {
    pub fn is_identity(&self) -> bool {
        self.matrix == lattice::z_identity(self.matrix.len())
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        apply(&self.matrix, x)
    }
}

fn apply(a: &ZMatrix, x: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(BigInt::zero(), |s, (p, q)| s + p * q)
        })
        .collect()
}

fn to_qmatrix(a: &ZMatrix, cols: usize) -> Matrix {
    Matrix::from_rows(a.iter().map(|r| z_to_q(r)).collect(), cols)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceResult {
    Equivalent(Equivalence),
    NotEquivalent { reason: String },
}

impl EquivalenceResult {
    pub fn witness(&self) -> Option<&Equivalence> {
        match self {
            EquivalenceResult::Equivalent(e) => Some(e),
            EquivalenceResult::NotEquivalent { .. } => None,
        }
    }
}

fn not_equiv(reason: impl Into<String>) -> EquivalenceResult {
    EquivalenceResult::NotEquivalent {
        reason: reason.into(),
    }
}

/// Exact check that `a` is an equivalence `d1 → d2`: unimodular, bijective
/// on even and odd roots with multiplicities, and the dual map sends each
/// coroot of `Aα` to the coroot of `α`.
pub fn check_equivalence(
    d1: &RootDatum,
    d2: &RootDatum,
    a: &ZMatrix,
) -> std::result::Result<(), String> {
    let r = d1.rank();
    if d2.rank() != r || a.len() != r || a.iter().any(|row| row.len() != r) {
        return Err("matrix shape does not match the ranks".into());
    }
    let det = to_qmatrix(a, r).det();
    if det.abs() != Q::one() {
        return Err(format!("determinant {} is not ±1", fmt_q(&det)));
    }
    let p1_inv = d1
        .pairing()
        .as_matrix()
        .inverse()
        .expect("unimodular pairing");
    let at = to_qmatrix(a, r).transpose();
    let p2 = d2.pairing().as_matrix();
    let dual_map = p1_inv.mul(&at).mul(&p2);
    let mut seen_even = BTreeSet::new();
    for (alpha, coroot) in d1.even() {
        let img = apply(a, alpha);
        let Some(c2) = d2.coroot_of(&img) else {
            return Err(format!(
                "image of even root {} is not an even root",
                crate::rootdatum::fmt_coords(alpha)
            ));
        };
        // ⟨Ax, χ⟩₂ = ⟨x, φ^∨χ⟩₁ with φ^∨ = P₁⁻¹ Aᵀ P₂
        let dual = dual_map.mul_vec(&z_to_q(c2));
        if dual != z_to_q(coroot) {
            return Err(format!(
                "dual map sends the coroot of {} to {}, not {}",
                crate::rootdatum::fmt_coords(&img),
                linalg::fmt_vec(&dual),
                crate::rootdatum::fmt_coords(coroot)
            ));
        }
        seen_even.insert(img);
    }
    if seen_even.len() != d2.even().len() {
        return Err("even roots are not mapped onto".into());
    }
    let mut seen_odd = BTreeSet::new();
    for (g, m) in d1.odd() {
        let img = apply(a, g);
        match d2.odd().get(&img) {
            Some(m2) if m2 == m => {}
            Some(m2) => {
                return Err(format!(
                    "odd root {} has multiplicity {m} but its image has {m2}",
                    crate::rootdatum::fmt_coords(g)
                ))
            }
            None => {
                return Err(format!(
                    "image of odd root {} is not an odd root",
                    crate::rootdatum::fmt_coords(g)
                ))
            }
        }
        seen_odd.insert(img);
    }
    if seen_odd.len() != d2.odd().len() {
        return Err("odd roots are not mapped onto".into());
    }
    Ok(())
}

/// Integer solutions `w = p + K t` of `M w = b` via Smith normal form.
fn integer_solutions(
    m: &ZMatrix,
    b: &[BigInt],
    cols: usize,
) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    if m.is_empty() {
        let kernel = lattice::z_identity(cols);
        return Some((vec![BigInt::zero(); cols], kernel));
    }
    let snf = smith_normal_form(m, cols);
    let ub = apply(&snf.u, b);
    let factors = snf.invariant_factors();
    let rk = factors.len();
    let mut y = vec![BigInt::zero(); cols];
    for (i, f) in factors.iter().enumerate() {
        if !(&ub[i] % f).is_zero() {
            return None;
        }
        y[i] = &ub[i] / f;
    }
    if ub[rk..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let p = apply(&snf.v, &y);
    let kernel = (rk..cols)
        .map(|j| snf.v.iter().map(|row| row[j].clone()).collect())
        .collect();
    Some((p, kernel))
}

/// Bound on the coefficients tried for each kernel direction when completing
/// a map off the root span.
const COMPLEMENT_BOX: i64 = 2;
const COMPLEMENT_CAP: usize = 200_000;

/// Searches for an equivalence `d1 → d2`; deterministic, preferring the identity.
pub fn equivalent(d1: &RootDatum, d2: &RootDatum) -> EquivalenceResult {
    let r = d1.rank();
    if d2.rank() != r {
        return not_equiv(format!("rank mismatch: {} vs {}", r, d2.rank()));
    }
    if d1.even().len() != d2.even().len() || d1.odd().len() != d2.odd().len() {
        return not_equiv(format!(
            "root-count mismatch: {}+{} vs {}+{} (even+odd)",
            d1.even().len(),
            d1.odd().len(),
            d2.even().len(),
            d2.odd().len()
        ));
    }
    let mults = |d: &RootDatum| {
        let mut v: Vec<usize> = d.odd().values().copied().collect();
        v.sort();
        v
    };
    if mults(d1) != mults(d2) {
        return not_equiv("odd multiplicities differ");
    }

    let roots1: Vec<(Vec<Q>, Parity, usize)> = d1
        .even()
        .iter()
        .map(|(a, _)| (z_to_q(a), Parity::Even, 0))
        .chain(d1.odd().iter().map(|(g, m)| (z_to_q(g), Parity::Odd, *m)))
        .collect();
    let kind2: HashMap<Vec<Q>, (Parity, usize)> = d2
        .even()
        .iter()
        .map(|(a, _)| (z_to_q(a), (Parity::Even, 0)))
        .chain(d2.odd().iter().map(|(g, m)| (z_to_q(g), (Parity::Odd, *m))))
        .collect();
    let vs1: Vec<Vec<Q>> = roots1.iter().map(|r| r.0.clone()).collect();
    if linalg::rank_of(&vs1) != linalg::rank_of(&kind2.keys().cloned().collect::<Vec<_>>()) {
        return not_equiv("root spans have different ranks");
    }
    let plan = Plan::new(&vs1, r);
    let p1 = d1.pairing().as_matrix();
    let p2 = d2.pairing().as_matrix();
    let coroot1 = |v: &[Q]| -> Option<Vec<Q>> {
        q_to_z(v).and_then(|z| d1.coroot_of(&z).map(|c| p1.mul_vec(&z_to_q(c))))
    };
    let coroot2 = |v: &[Q]| -> Option<Vec<Q>> {
        q_to_z(v).and_then(|z| d2.coroot_of(&z).map(|c| p2.mul_vec(&z_to_q(c))))
    };
    let basis: Vec<Vec<Q>> = plan.basis.iter().map(|&i| vs1[i].clone()).collect();
    let basis_coroots: Vec<Option<Vec<Q>>> = basis.iter().map(|b| coroot1(b)).collect();

    // identity first, then canonical order
    let mut all2: Vec<Vec<Q>> = d2
        .even()
        .iter()
        .map(|(a, _)| z_to_q(a))
        .chain(d2.odd().keys().map(|g| z_to_q(g)))
        .collect();
    all2.sort();
    let candidates: Vec<Vec<Vec<Q>>> = plan
        .basis
        .iter()
        .map(|&b| {
            let (ref v, p, m) = roots1[b];
            let mut c: Vec<Vec<Q>> = all2
                .iter()
                .filter(|w| kind2[*w] == (p, m))
                .cloned()
                .collect();
            if let Some(pos) = c.iter().position(|w| w == v) {
                let w = c.remove(pos);
                c.insert(0, w);
            }
            c
        })
        .collect();

    let admissible = |t: usize, cand: &[Q], imgs: &[Vec<Q>]| {
        let cc = coroot2(cand);
        if basis_coroots[t].is_some() != cc.is_some() {
            return false;
        }
        if let (Some(c1), Some(c2)) = (&basis_coroots[t], &cc) {
            if linalg::dot(&basis[t], c1) != linalg::dot(cand, c2) {
                return false;
            }
        }
        imgs.iter().enumerate().all(|(s, img)| {
            if let (Some(c1), Some(c2)) = (&basis_coroots[t], &cc) {
                if linalg::dot(&basis[s], c1) != linalg::dot(img, c2) {
                    return false;
                }
            }
            if let Some(c1s) = &basis_coroots[s] {
                let c2s = coroot2(img).expect("same parity");
                if linalg::dot(&basis[t], c1s) != linalg::dot(cand, &c2s) {
                    return false;
                }
            }
            true
        })
    };
    let image_ok = |i: usize, img: &[Q]| {
        let (_, p, m) = roots1[i];
        kind2.get(img) == Some(&(p, m))
    };
    let search = Search {
        plan: &plan,
        dst_dim: r,
        candidates,
        admissible: &admissible,
        image_ok: &image_ok,
    };

    // SNF-adapted basis of ℤ^r: the first k rows of V⁻¹ span the saturation
    // of the root lattice, the rest a complement.
    let k = plan.basis.len();
    let root_rows: ZMatrix = d1.all_root_coords();
    let adapted: Matrix = if root_rows.is_empty() {
        Matrix::identity(r)
    } else {
        let snf = smith_normal_form(&root_rows, r);
        to_qmatrix(&snf.v, r).inverse().expect("unimodular")
    };
    let sat: Vec<Vec<Q>> = (0..k).map(|i| adapted.row(i).to_vec()).collect();
    let comp: Vec<Vec<Q>> = (k..r).map(|i| adapted.row(i).to_vec()).collect();
    let basis_m = Matrix::from_columns(&basis, r);
    let sat_coeffs: Vec<Vec<Q>> = sat
        .iter()
        .map(|s| basis_m.solve(s).expect("in span"))
        .collect();
    let even1: Vec<Vec<Q>> = d1.even().iter().map(|(a, _)| z_to_q(a)).collect();

    let mut found: Option<Equivalence> = None;
    let mut reason = String::from("no root bijection compatible with the pairings");
    search.run(&mut |imgs| {
        let lin = |c: &[Q]| {
            let mut out = linalg::zero_vec(r);
            for (x, img) in c.iter().zip(imgs) {
                out = linalg::add(&out, &linalg::scale(x, img));
            }
            out
        };
        let sat_imgs: Vec<Vec<Q>> = sat_coeffs.iter().map(|c| lin(c)).collect();
        if sat_imgs.iter().any(|v| q_to_z(v).is_none()) {
            reason = "root bijection is not integral on the saturated root lattice".into();
            return false;
        }
        // constraints ⟨w, coroot₂(Aα)⟩ = ⟨c, coroot₁(α)⟩ for complement images w
        let mut rows: ZMatrix = Vec::new();
        let mut rhs_cols: Vec<Vec<BigInt>> = vec![Vec::new(); comp.len()];
        for alpha in &even1 {
            let coeff = basis_m.solve(alpha).expect("in span");
            let img = lin(&coeff);
            let c2 = coroot2(&img).expect("even image");
            let c1 = coroot1(alpha).expect("even");
            rows.push(q_to_z(&c2).expect("integral"));
            for (j, c) in comp.iter().enumerate() {
                rhs_cols[j].push(q_to_z(&[linalg::dot(c, &c1)]).expect("integral")[0].clone());
            }
        }
        let mut sols = Vec::new();
        for (j, c) in comp.iter().enumerate() {
            match integer_solutions(&rows, &rhs_cols[j], r) {
                Some((p, ker)) => {
                    // prefer the complement vector itself when admissible
                    let cz = q_to_z(c).expect("integral");
                    let okc = rows.iter().zip(&rhs_cols[j]).all(|(row, b)| {
                        row.iter()
                            .zip(&cz)
                            .fold(BigInt::zero(), |s, (x, y)| s + x * y)
                            == *b
                    });
                    sols.push((if okc { cz } else { p }, ker));
                }
                None => {
                    reason = "coroot conditions have no integer solution off the root span".into();
                    return false;
                }
            }
        }
        match complete(&sat, &sat_imgs, &comp, &sols, r, |a| {
            check_equivalence(d1, d2, a).is_ok()
        }) {
            Some(a) => {
                let inv = to_qmatrix(&a, r).inverse().expect("unimodular");
                let inverse = inv
                    .to_rows()
                    .iter()
                    .map(|row| q_to_z(row).expect("integral"))
                    .collect();
                found = Some(Equivalence { matrix: a, inverse });
                true
            }
            None => {
                reason = "no unimodular completion off the root span within the search box".into();
                false
            }
        }
    });
    match found {
        Some(e) => EquivalenceResult::Equivalent(e),
        None => not_equiv(reason),
    }
}

/// Tries complement images `pⱼ + Kⱼ tⱼ` with `|t| ≤ COMPLEMENT_BOX`, smallest
/// `Σ|t|` first, and returns the first matrix accepted by `ok`.
fn complete(
    sat: &[Vec<Q>],
    sat_imgs: &[Vec<Q>],
    comp: &[Vec<Q>],
    sols: &[(Vec<BigInt>, Vec<Vec<BigInt>>)],
    r: usize,
    ok: impl Fn(&ZMatrix) -> bool,
) -> Option<ZMatrix> {
    let dims: Vec<usize> = sols.iter().map(|(_, k)| k.len()).collect();
    let total: usize = dims.iter().sum();
    let side = (2 * COMPLEMENT_BOX + 1) as usize;
    let mut ts: Vec<Vec<i64>> = Vec::new();
    let mut count = 1usize;
    for _ in 0..total {
        count = count.saturating_mul(side);
    }
    if count > COMPLEMENT_CAP {
        return None;
    }
    for mut idx in 0..count {
        let mut t = Vec::with_capacity(total);
        for _ in 0..total {
            t.push((idx % side) as i64 - COMPLEMENT_BOX);
            idx /= side;
        }
        ts.push(t);
    }
    ts.sort_by_key(|t| (t.iter().map(|x| x.abs()).sum::<i64>(), t.clone()));
    let src = Matrix::from_columns(&sat.iter().chain(comp).cloned().collect::<Vec<_>>(), r);
    let src_inv = src.inverse().expect("adapted basis");
    for t in ts {
        let mut cols: Vec<Vec<Q>> = sat_imgs.to_vec();
        let mut off = 0;
        for (j, (p, ker)) in sols.iter().enumerate() {
            let mut w = p.clone();
            for (l, kv) in ker.iter().enumerate() {
                let c = BigInt::from(t[off + l]);
                for (x, y) in w.iter_mut().zip(kv) {
                    *x += &c * y;
                }
            }
            off += dims[j];
            cols.push(z_to_q(&w));
        }
        let a = Matrix::from_columns(&cols, r).mul(&src_inv);
        let Some(az) = a
            .to_rows()
            .iter()
            .map(|row| q_to_z(row))
            .collect::<Option<ZMatrix>>()
        else {
            continue;
        };
        if ok(&az) {
            return Some(az);
        }
    }
    None
}

/// Orbit of `v` under the even reflections, as ambient representatives.
pub fn weyl_orbit(
    datum: &RootDatum,
    v: &LatticeVector,
    cap: usize,
) -> Result<BTreeSet<LatticeVector>> {
    if v.len() != datum.x().ambient_rank() {
        return Err(Error::DimensionMismatch {
            expected: datum.x().ambient_rank(),
            got: v.len(),
        });
    }
    let orbit = datum.weyl_orbit(&datum.x().coords(v), cap)?;
    Ok(orbit.iter().map(|c| datum.x().representative(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{
        build_datum, corpus, corpus_alphas, direct_sum, CatalogObject, FamilyTag,
    };
    use crate::linalg::{q, qf};

    fn grs(f: Family) -> Grs {
        build_grs(&f).unwrap()
    }

    fn sum(parts: &[Grs]) -> Grs {
        let objs: Vec<CatalogObject> = parts.iter().cloned().map(CatalogObject::Grs).collect();
        match direct_sum(&objs).unwrap() {
            CatalogObject::Grs(g) => g,
            _ => unreachable!(),
        }
    }

    #[test]
    fn decomposition_examples() {
        let s = sum(&[grs(Family::A { m: 2, n: 1 }), grs(Family::B { m: 0, n: 1 })]);
        let mut sizes: Vec<usize> = decompose(&s).iter().map(Grs::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![4, 6]);
        assert_eq!(decompose(&grs(Family::A { m: 2, n: 1 })).len(), 1);
        assert!(decompose(&Grs::empty(3)).is_empty());
        assert!(!is_irreducible(&Grs::empty(3)));
        assert!(is_irreducible(&grs(Family::D21a(q(1)))));
        let o = grs(Family::B { m: 0, n: 1 });
        assert!(!is_irreducible(&sum(&[o.clone(), o])));
        assert!(is_irreducible(&grs(Family::A { m: 1, n: 1 })));
    }

    #[test]
    fn recognize_examples() {
        let r = recognize(&grs(Family::B { m: 1, n: 1 })).unwrap();
        assert_eq!(r.family, Some(Family::B { m: 1, n: 1 }));
        assert_eq!(r.scale, Some(q(1)));

        let input = grs(Family::D21a(q(2)));
        let r = recognize(&input).unwrap();
        assert_eq!(r.family, Some(Family::D21a(qf(1, 2))));
        let t = build_grs(&Family::D21a(qf(1, 2))).unwrap();
        assert!(check_witness(
            &input,
            &t,
            r.witness.as_ref().unwrap(),
            r.scale.as_ref().unwrap()
        ));

        // {±γ, ±2γ}: four mutually orthogonal isotropic odd roots
        let form = RationalForm::diagonal(&[q(1), q(-1)]);
        let g = Grs::new(
            form,
            [1, -1, 2, -2]
                .iter()
                .map(|&k| (vec![q(k), q(k)], Parity::Odd)),
        )
        .unwrap();
        assert_eq!(recognize(&g).unwrap().family, None);

        let o = grs(Family::B { m: 0, n: 1 });
        assert_eq!(
            recognize(&sum(&[o.clone(), o])),
            Err(Error::NotIrreducible { components: 2 })
        );
    }

    #[test]
    fn d21_one_is_reported_as_d21() {
        let r = recognize(&grs(Family::D21a(q(1)))).unwrap();
        assert_eq!(r.family, Some(Family::D { m: 2, n: 1 }));
        assert!(!r.notes.is_empty());
        // the degenerate form splits off ±2ε₁
        assert_eq!(
            recognize(&grs(Family::D21a(q(-1)))),
            Err(Error::NotIrreducible { components: 2 })
        );
    }

    #[test]
    fn recognition_round_trip_small() {
        for tag in corpus(4, 3, 2, &corpus_alphas()) {
            let g = grs(tag.family.clone());
            let r = recognize(&g).unwrap();
            let f = r
                .family
                .clone()
                .unwrap_or_else(|| panic!("{tag}: {:?}", r.notes));
            assert!(f.same_type(&tag.family), "{tag} recognized as {f}");
            let t = build_grs(&f).unwrap();
            assert!(check_witness(
                &g,
                &t,
                r.witness.as_ref().unwrap(),
                r.scale.as_ref().unwrap()
            ));
        }
    }

    #[test]
    fn equivalence_examples() {
        let d = |name: &str, p: &[&str]| build_datum(&FamilyTag::parse(name, p).unwrap()).unwrap();
        for (n, p) in [
            ("SL", vec!["2", "1"]),
            ("GL", vec!["2", "2"]),
            ("B", vec!["1", "1"]),
            ("G3", vec![]),
        ] {
            let x = d(n, &p);
            let e = equivalent(&x, &x);
            assert!(e.witness().unwrap().is_identity(), "{n}");
        }
        let a = d("D21a", &["2"]);
        let b = d("D21a", &["1/2"]);
        let e = equivalent(&a, &b);
        assert!(check_equivalence(&a, &b, &e.witness().unwrap().matrix).is_ok());
        assert!(equivalent(&d("GL", &["1", "1"]), &d("GL", &["2", "1"]))
            .witness()
            .is_none());
    }

    #[test]
    fn nontrivial_equivalence() {
        // GL(2,1) against itself with the coordinates permuted
        let d = build_datum(&FamilyTag::parse("GL", &["2", "1"]).unwrap()).unwrap();
        let perm: ZMatrix = vec![
            crate::lattice::zvec(&[0, 1, 0]),
            crate::lattice::zvec(&[1, 0, 0]),
            crate::lattice::zvec(&[0, 0, 1]),
        ];
        let even = d
            .even_roots()
            .into_iter()
            .map(|(a, c)| {
                (
                    LatticeVector(apply(&perm, &a.0)),
                    LatticeVector(apply(&perm, &c.0)),
                )
            })
            .collect();
        let odd = d
            .odd_roots()
            .into_iter()
            .map(|(g, m)| (LatticeVector(apply(&perm, &g.0)), m))
            .collect();
        let d2 = RootDatum::new(
            d.x().clone(),
            d.x_dual().clone(),
            d.pairing().clone(),
            d.form().clone(),
            even,
            odd,
        )
        .unwrap();
        let e = equivalent(&d, &d2);
        let w = e.witness().expect("equivalent");
        assert!(check_equivalence(&d, &d2, &w.matrix).is_ok());
        let back = equivalent(&d2, &d);
        assert!(back.witness().is_some());
    }

    #[test]
    fn weyl_orbit_examples() {
        let d = build_datum(&FamilyTag::parse("GL", &["2", "1"]).unwrap()).unwrap();
        let o = weyl_orbit(&d, &LatticeVector::from_i64(&[1, 0, -1]), DEFAULT_ORBIT_CAP).unwrap();
        let want: BTreeSet<_> = [[1, 0, -1], [0, 1, -1]]
            .iter()
            .map(|v| LatticeVector::from_i64(v))
            .collect();
        assert_eq!(o, want);
        let o = weyl_orbit(&d, &LatticeVector::from_i64(&[0, 0, 0]), 10).unwrap();
        assert_eq!(o.len(), 1);
        let osp = build_datum(&FamilyTag::parse("B", &["0", "1"]).unwrap()).unwrap();
        let o = weyl_orbit(&osp, &LatticeVector::from_i64(&[2]), 10).unwrap();
        let want: BTreeSet<_> = [[2], [-2]]
            .iter()
            .map(|v| LatticeVector::from_i64(v))
            .collect();
        assert_eq!(o, want);
    }
}
