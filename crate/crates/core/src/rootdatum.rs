//! Root data `(X, 𝔯, X^∨, 𝔯^∨)` with odd multiplicities, and the axiom checks.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::grs::{Grs, Parity};
use crate::lattice::{
    self, spans_full_lattice, z_to_q, DualityPairing, Lattice, LatticeVector, RationalForm,
};
use crate::linalg::{self, fmt_q, fmt_vec, Q};

pub type Coords = Vec<BigInt>;

pub fn fmt_coords(v: &[BigInt]) -> String {
    format!(
        "({})",
        v.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    x: Lattice,
    x_dual: Lattice,
    pairing: DualityPairing,
    form: RationalForm,
    /// `(root, coroot)` in canonical coordinates of `X` and `X^∨`, sorted.
    even: Vec<(Coords, Coords)>,
    /// Odd roots in canonical coordinates with multiplicities, sorted.
    odd: BTreeMap<Coords, usize>,
}

impl RootDatum {
    /// Structural validation only: dimensions, disjoint supports, positive
    /// multiplicities, a perfect pairing. The classical and BQR axioms are
    /// checked by [`RootDatum::verify_classical`] and [`RootDatum::verify_bqr`].
    pub fn new(
        x: Lattice,
        x_dual: Lattice,
        pairing: DualityPairing,
        form: RationalForm,
        even: Vec<(LatticeVector, LatticeVector)>,
        odd: Vec<(LatticeVector, usize)>,
    ) -> Result<Self> {
        let r = x.rank();
        if x_dual.rank() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: x_dual.rank(),
            });
        }
        if pairing.rows() != r || (r > 0 && pairing.cols() != r) {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: pairing.rows(),
            });
        }
        if r > 0 {
            let det = pairing.as_matrix().det();
            if det.abs() != Q::one() {
                return Err(Error::InvalidDatum(format!(
                    "pairing has determinant {}, not ±1",
                    fmt_q(&det)
                )));
            }
        }
        if form.dim() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: form.dim(),
            });
        }
        let check_len = |v: &LatticeVector, l: &Lattice| {
            if v.len() != l.ambient_rank() {
                Err(Error::DimensionMismatch {
                    expected: l.ambient_rank(),
                    got: v.len(),
                })
            } else {
                Ok(())
            }
        };
        let mut even_c = Vec::with_capacity(even.len());
        let mut seen = HashSet::new();
        for (a, c) in &even {
            check_len(a, &x)?;
            check_len(c, &x_dual)?;
            let ac = x.coords(a);
            if !seen.insert(ac.clone()) {
                return Err(Error::DuplicateRoot(fmt_coords(&a.0)));
            }
            even_c.push((ac, x_dual.coords(c)));
        }
        even_c.sort();
        let mut odd_c = BTreeMap::new();
        for (g, m) in &odd {
            check_len(g, &x)?;
            if *m == 0 {
                return Err(Error::InvalidDatum(format!(
                    "odd root {} has multiplicity 0",
                    fmt_coords(&g.0)
                )));
            }
            let gc = x.coords(g);
            if seen.contains(&gc) {
                return Err(Error::ParityClash(fmt_coords(&g.0)));
            }
            if odd_c.insert(gc, *m).is_some() {
                return Err(Error::DuplicateRoot(fmt_coords(&g.0)));
            }
        }
        Ok(RootDatum {
            x,
            x_dual,
            pairing,
            form,
            even: even_c,
            odd: odd_c,
        })
    }

    pub fn x(&self) -> &Lattice {
        &self.x
    }

    pub fn x_dual(&self) -> &Lattice {
        &self.x_dual
    }

    pub fn pairing(&self) -> &DualityPairing {
        &self.pairing
    }

    pub fn form(&self) -> &RationalForm {
        &self.form
    }

    pub fn rank(&self) -> usize {
        self.x.rank()
    }

    /// Even `(root, coroot)` pairs in canonical coordinates.
    pub fn even(&self) -> &[(Coords, Coords)] {
        &self.even
    }

    /// Odd roots in canonical coordinates with multiplicities.
    pub fn odd(&self) -> &BTreeMap<Coords, usize> {
        &self.odd
    }

    /// Even roots as ambient representatives.
    pub fn even_roots(&self) -> Vec<(LatticeVector, LatticeVector)> {
        self.even
            .iter()
            .map(|(a, c)| (self.x.representative(a), self.x_dual.representative(c)))
            .collect()
    }

    pub fn odd_roots(&self) -> Vec<(LatticeVector, usize)> {
        self.odd
            .iter()
            .map(|(g, m)| (self.x.representative(g), *m))
            .collect()
    }

    pub fn all_root_coords(&self) -> Vec<Coords> {
        self.even
            .iter()
            .map(|(a, _)| a.clone())
            .chain(self.odd.keys().cloned())
            .collect()
    }

    pub fn is_monodromy(&self) -> bool {
        self.odd.values().all(|&m| m == 1)
    }

    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        self.pairing.pair(x, y)
    }

    pub fn coroot_of(&self, alpha: &[BigInt]) -> Option<&Coords> {
        self.even
            .binary_search_by(|(a, _)| a.as_slice().cmp(alpha))
            .ok()
            .map(|i| &self.even[i].1)
    }

    /// `v − ⟨v, α^∨⟩ α` in canonical coordinates.
    pub fn even_reflection(&self, alpha: &[BigInt], v: &[BigInt]) -> Result<Coords> {
        let coroot = self
            .coroot_of(alpha)
            .ok_or_else(|| Error::NotAnEvenRoot(fmt_coords(alpha)))?;
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: v.len(),
            });
        }
        let c = self.pair(v, coroot);
        Ok(v.iter().zip(alpha).map(|(x, a)| x - &c * a).collect())
    }

    /// The same reflection on ambient representatives.
    pub fn even_reflection_ambient(
        &self,
        alpha: &LatticeVector,
        v: &LatticeVector,
    ) -> Result<LatticeVector> {
        let out = self.even_reflection(&self.x.coords(alpha), &self.x.coords(v))?;
        Ok(self.x.representative(&out))
    }

    /// Dual reflection `χ − ⟨α, χ⟩ α^∨` on `X^∨`.
    pub fn dual_reflection(&self, alpha: &[BigInt], chi: &[BigInt]) -> Result<Coords> {
        let coroot = self
            .coroot_of(alpha)
            .ok_or_else(|| Error::NotAnEvenRoot(fmt_coords(alpha)))?;
        let c = self.pair(alpha, chi);
        Ok(chi.iter().zip(coroot).map(|(x, a)| x - &c * a).collect())
    }

    /// The multiplicity-free GRS on `X ⊗ ℚ` in canonical coordinates.
    pub fn shadow(&self) -> Result<Grs> {
        Grs::new(self.form.clone(), self.shadow_roots())
    }

    fn shadow_roots(&self) -> Vec<(Vec<Q>, Parity)> {
        self.even
            .iter()
            .map(|(a, _)| (z_to_q(a), Parity::Even))
            .chain(self.odd.keys().map(|g| (z_to_q(g), Parity::Odd)))
            .collect()
    }

    /// Orbit of `v` under the group generated by the even reflections.
    pub fn weyl_orbit(&self, v: &[BigInt], cap: usize) -> Result<BTreeSet<Coords>> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(v.to_vec());
        queue.push_back(v.to_vec());
        while let Some(w) = queue.pop_front() {
            for (a, _) in &self.even {
                let u = self.even_reflection(a, &w)?;
                if !seen.contains(&u) {
                    if seen.len() >= cap {
                        return Err(Error::IterationCap { cap });
                    }
                    seen.insert(u.clone());
                    queue.push_back(u);
                }
            }
        }
        Ok(seen)
    }

    pub fn verify_classical(&self) -> ClassicalReport {
        let mut checks = Vec::new();
        let even_set: HashSet<&Coords> = self.even.iter().map(|(a, _)| a).collect();
        let coroot_set: HashSet<&Coords> = self.even.iter().map(|(_, c)| c).collect();

        let pairing_two = self.even.iter().find_map(|(a, c)| {
            let p = self.pair(a, c);
            (p != BigInt::from(2)).then(|| {
                format!(
                    "⟨α, α^∨⟩ = {p} for α = {}, α^∨ = {}",
                    fmt_coords(a),
                    fmt_coords(c)
                )
            })
        });
        checks.push(Check::from_witness("⟨α, α^∨⟩ = 2", pairing_two));

        let stable = self.even.iter().find_map(|(a, _)| {
            self.even.iter().find_map(|(b, _)| {
                let s = self.even_reflection(a, b).expect("a is even");
                (!even_set.contains(&s)).then(|| {
                    format!(
                        "s_{}({}) = {} is not an even root",
                        fmt_coords(a),
                        fmt_coords(b),
                        fmt_coords(&s)
                    )
                })
            })
        });
        checks.push(Check::from_witness("reflections stabilize Φ", stable));

        let dual = self.even.iter().find_map(|(a, _)| {
            self.even.iter().find_map(|(_, bc)| {
                let s = self.dual_reflection(a, bc).expect("a is even");
                (!coroot_set.contains(&s)).then(|| {
                    format!(
                        "s^∨_{}({}) = {} is not a coroot",
                        fmt_coords(a),
                        fmt_coords(bc),
                        fmt_coords(&s)
                    )
                })
            })
        });
        checks.push(Check::from_witness("dual reflections stabilize Φ^∨", dual));

        ClassicalReport { checks }
    }

    pub fn verify_bqr(&self, mode: SpanMode) -> BqrReport {
        let roots = self.shadow_roots();
        let all: Vec<Coords> = self.all_root_coords();
        let r = self.rank();
        let span_rank =
            lattice::span_rank(&roots.iter().map(|(v, _)| v.clone()).collect::<Vec<_>>());
        let mut notes = Vec::new();

        // BQR(1)
        let bqr1 = self.odd.keys().find_map(|g| {
            if g.iter().all(Zero::is_zero) {
                Some(format!("0 ∈ Γ (odd root {})", fmt_coords(g)))
            } else {
                let ng: Coords = g.iter().map(|x| -x).collect();
                (!self.odd.contains_key(&ng))
                    .then(|| format!("γ = {} ∈ Γ but −γ ∉ Γ", fmt_coords(g)))
            }
        });

        // BQR(2)
        let bqr2 = match mode {
            SpanMode::Lax => Outcome::Skipped,
            SpanMode::Rational => {
                if span_rank == r {
                    Outcome::Pass
                } else {
                    Outcome::Fail(format!(
                        "span rank {span_rank} < {r} (deficit {})",
                        r - span_rank
                    ))
                }
            }
            SpanMode::Strict => {
                if span_rank < r {
                    Outcome::Fail(format!(
                        "span rank {span_rank} < {r} (deficit {})",
                        r - span_rank
                    ))
                } else if spans_full_lattice(&all, r) {
                    Outcome::Pass
                } else {
                    Outcome::Fail("roots span a proper finite-index sublattice of X".into())
                }
            }
        };

        // BQR(3)
        let bqr3 = if !self.form.is_nondegenerate() {
            Some("form is degenerate on X ⊗ ℚ".to_string())
        } else {
            self.even.iter().find_map(|(b, bc)| {
                let bq = z_to_q(b);
                let n = self.form.eval(&bq, &bq);
                if n.is_zero() {
                    return Some(format!("even root {} is isotropic", fmt_coords(b)));
                }
                self.even.iter().find_map(|(a, _)| {
                    let lhs = Q::from_integer(self.pair(a, bc));
                    let rhs = linalg::q(2) * self.form.eval(&z_to_q(a), &bq) / &n;
                    (lhs != rhs).then(|| {
                        format!(
                            "⟨α, β^∨⟩ = {} but 2(α,β)/(β,β) = {} for α = {}, β = {}",
                            fmt_q(&lhs),
                            fmt_q(&rhs),
                            fmt_coords(a),
                            fmt_coords(b)
                        )
                    })
                })
            })
        };
        if bqr3.is_none() && span_rank > 0 {
            let shadow_vectors: Vec<Vec<Q>> = roots.iter().map(|(v, _)| v.clone()).collect();
            let idx = linalg::independent_subset(&shadow_vectors);
            let basis: Vec<Vec<Q>> = idx.into_iter().map(|i| shadow_vectors[i].clone()).collect();
            let g = lattice::gram_matrix(&self.form, &basis).expect("dims");
            if g.det().is_zero() {
                notes.push(
                    "form restricted to the span of the roots is degenerate; BQR(3) is checked on X ⊗ ℚ"
                        .to_string(),
                );
            }
        }

        // BQR(4)
        let bqr4 = match Grs::new_unchecked(self.form.clone(), roots) {
            Ok(grs) => reflection_axiom(&grs),
            Err(e) => Some(e.to_string()),
        };

        if !self.is_monodromy() {
            let (g, m) = self
                .odd
                .iter()
                .find(|(_, &m)| m > 1)
                .expect("non-monodromy");
            notes.push(format!(
                "non-monodromy: odd root {} has multiplicity {m}",
                fmt_coords(g)
            ));
        }

        BqrReport {
            mode,
            checks: vec![
                Check::from_witness("BQR(1)", bqr1),
                Check::new("BQR(2)", bqr2),
                Check::from_witness("BQR(3)", bqr3),
                Check::from_witness("BQR(4)", bqr4),
            ],
            span_rank,
            lattice_rank: r,
            monodromy: self.is_monodromy(),
            notes,
        }
    }

    /// Block direct sum of data.
    pub fn direct_sum(parts: &[&RootDatum]) -> Result<RootDatum> {
        if parts.is_empty() {
            return Err(Error::EmptySum);
        }
        let x = Lattice::direct_sum(&parts.iter().map(|d| &d.x).collect::<Vec<_>>());
        let x_dual = Lattice::direct_sum(&parts.iter().map(|d| &d.x_dual).collect::<Vec<_>>());
        let pairing =
            DualityPairing::direct_sum(&parts.iter().map(|d| &d.pairing).collect::<Vec<_>>());
        let form = RationalForm::direct_sum(&parts.iter().map(|d| &d.form).collect::<Vec<_>>());
        let r = x.rank();
        let embed = |c: &Coords, off: usize| {
            let mut v = vec![BigInt::zero(); r];
            v[off..off + c.len()].clone_from_slice(c);
            v
        };
        let mut even = Vec::new();
        let mut odd = Vec::new();
        let mut off = 0;
        for d in parts {
            for (a, c) in &d.even {
                even.push((
                    x.representative(&embed(a, off)),
                    x_dual.representative(&embed(c, off)),
                ));
            }
            for (g, m) in &d.odd {
                odd.push((x.representative(&embed(g, off)), *m));
            }
            off += d.rank();
        }
        RootDatum::new(x, x_dual, pairing, form, even, odd)
    }
}

/// The S1/S2 reflection axiom on a root table that may contain zero.
pub(crate) fn reflection_axiom(grs: &Grs) -> Option<String> {
    let vs = grs.vectors();
    for g in grs.odd() {
        if linalg::is_zero_vec(g) {
            continue;
        }
        if grs.is_isotropic(g) {
            let mut images = HashSet::new();
            for b in &vs {
                let once = match grs.odd_reflection_unchecked(g, b) {
                    Ok(v) => v,
                    Err(e) => return Some(e.to_string()),
                };
                if !grs.contains(&once) {
                    return Some(format!(
                        "r_γ({}) = {} ∉ 𝔯 for γ = {}",
                        fmt_vec(b),
                        fmt_vec(&once),
                        fmt_vec(g)
                    ));
                }
                match grs.odd_reflection_unchecked(g, &once) {
                    Ok(t) if t == *b => {}
                    Ok(t) => {
                        return Some(format!(
                            "r_γ is not an involution: {} ↦ {} ↦ {} for γ = {}",
                            fmt_vec(b),
                            fmt_vec(&once),
                            fmt_vec(&t),
                            fmt_vec(g)
                        ))
                    }
                    Err(e) => return Some(e.to_string()),
                }
                images.insert(once);
            }
            if images.len() != vs.len() {
                return Some(format!("r_γ is not injective for γ = {}", fmt_vec(g)));
            }
        } else {
            for b in &vs {
                let c = grs.cartan_integer(b, g).expect("non-isotropic");
                if !c.is_integer() {
                    return Some(format!(
                        "⟨{}, γ^∨⟩ = {} ∉ ℤ for γ = {}",
                        fmt_vec(b),
                        fmt_q(&c),
                        fmt_vec(g)
                    ));
                }
                let s = linalg::sub(b, &linalg::scale(&c, g));
                if !grs.contains(&s) {
                    return Some(format!(
                        "r_γ({}) = {} ∉ 𝔯 for γ = {}",
                        fmt_vec(b),
                        fmt_vec(&s),
                        fmt_vec(g)
                    ));
                }
            }
        }
    }
    None
}

/// How BQR(2) ("𝔯 spans X") is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SpanMode {
    /// The integer span of the roots is all of `X`.
    Strict,
    /// The rational span of the roots is `X ⊗ ℚ`.
    #[default]
    Rational,
    /// Not checked.
    Lax,
}

impl SpanMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SpanMode::Strict => "strict",
            SpanMode::Rational => "rational",
            SpanMode::Lax => "lax",
        }
    }
}

impl std::str::FromStr for SpanMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "strict" => Ok(SpanMode::Strict),
            "rational" => Ok(SpanMode::Rational),
            "lax" => Ok(SpanMode::Lax),
            _ => Err(format!(
                "unknown span mode '{s}' (expected strict, rational or lax)"
            )),
        }
    }
}

impl fmt::Display for SpanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    Skipped,
}

impl Outcome {
    pub fn is_fail(&self) -> bool {
        matches!(self, Outcome::Fail(_))
    }

    pub fn witness(&self) -> Option<&str> {
        match self {
            Outcome::Fail(w) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Pass => f.write_str("pass"),
            Outcome::Fail(w) => write!(f, "fail: {w}"),
            Outcome::Skipped => f.write_str("skipped"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub outcome: Outcome,
}

impl Check {
    pub fn new(label: &str, outcome: Outcome) -> Self {
        Check {
            label: label.to_string(),
            outcome,
        }
    }

    pub fn from_witness(label: &str, witness: Option<String>) -> Self {
        Check::new(label, witness.map_or(Outcome::Pass, Outcome::Fail))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalReport {
    pub checks: Vec<Check>,
}

impl ClassicalReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.outcome.is_fail())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BqrReport {
    pub mode: SpanMode,
    /// `BQR(1)` to `BQR(4)` in order.
    pub checks: Vec<Check>,
    pub span_rank: usize,
    pub lattice_rank: usize,
    pub monodromy: bool,
    pub notes: Vec<String>,
}

impl BqrReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.outcome.is_fail())
    }

    /// Outcome of `BQR(i)`, `i ∈ 1..=4`.
    pub fn axiom(&self, i: usize) -> &Outcome {
        &self.checks[i - 1].outcome
    }

    pub fn deficit(&self) -> usize {
        self.lattice_rank - self.span_rank
    }
}

/// BQR(1), (3), (4) and the rational/lax BQR(2) for a bare GRS.
///
/// Strict mode asks for integral roots spanning `ℤ^dim`.
pub fn verify_grs(grs: &Grs, mode: SpanMode) -> BqrReport {
    let vs = grs.vectors();
    let n = grs.dim();
    let span_rank = lattice::span_rank(&vs);
    let bqr1 = grs.odd().find_map(|g| {
        (grs.parity_of(&linalg::neg(g)) != Some(Parity::Odd))
            .then(|| format!("γ = {} ∈ Γ but −γ ∉ Γ", fmt_vec(g)))
    });
    let deficit = |sr: usize| format!("span rank {sr} < {n} (deficit {})", n - sr);
    let bqr2 = match mode {
        SpanMode::Lax => Outcome::Skipped,
        SpanMode::Rational if span_rank == n => Outcome::Pass,
        SpanMode::Rational => Outcome::Fail(deficit(span_rank)),
        SpanMode::Strict => {
            let ints: Option<Vec<Coords>> = vs.iter().map(|v| lattice::q_to_z(v)).collect();
            match ints {
                _ if span_rank < n => Outcome::Fail(deficit(span_rank)),
                Some(z) if spans_full_lattice(&z, n) => Outcome::Pass,
                Some(_) => {
                    Outcome::Fail("roots span a proper finite-index sublattice of ℤ^n".into())
                }
                None => Outcome::Fail("roots are not integral".into()),
            }
        }
    };
    let bqr3 = if !grs.form().is_nondegenerate() {
        Some("form is degenerate".to_string())
    } else {
        grs.even()
            .find(|a| grs.is_isotropic(a))
            .map(|a| format!("even root {} is isotropic", fmt_vec(a)))
    };
    let bqr4 = reflection_axiom(grs);
    let mut notes = Vec::new();
    if span_rank > 0 && grs.span_gram().det().is_zero() {
        notes.push("form restricted to the span of the roots is degenerate".to_string());
    }
    BqrReport {
        mode,
        checks: vec![
            Check::from_witness("BQR(1)", bqr1),
            Check::new("BQR(2)", bqr2),
            Check::from_witness("BQR(3)", bqr3),
            Check::from_witness("BQR(4)", bqr4),
        ],
        span_rank,
        lattice_rank: n,
        monodromy: true,
        notes,
    }
}
