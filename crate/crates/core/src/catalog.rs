//! Root systems and root data of the classified families, plus direct sums.
//!
//! Coordinates are ε-before-δ. The form is `(εᵢ,εᵢ) = 1`, `(δᵢ,δᵢ) = −1` for
//! the A/B/C/D families; the exceptional families use their own constants.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::grs::{Grs, Parity};
use crate::lattice::{
    self, q_to_z, quotient_lattice, z_to_q, DualityPairing, Lattice, LatticeVector, RationalForm,
    RationalLattice,
};
use crate::linalg::{self, fmt_q, parse_q, q, qf, Matrix, Q};
use crate::rootdatum::RootDatum;

/// Root-system type, with block sizes as in the defining matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// gl(m|n)
    A {
        m: usize,
        n: usize,
    },
    /// osp(2m+1|2n)
    B {
        m: usize,
        n: usize,
    },
    /// osp(2|2n)
    C {
        n: usize,
    },
    /// osp(2m|2n)
    D {
        m: usize,
        n: usize,
    },
    D21a(Q),
    F4,
    G3,
}

/// Which lattice `X` a root datum is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupForm {
    GL,
    SL,
    /// SL(n,n) modulo scalars.
    SLtilde,
    OSp,
    /// `X` is the root lattice (used for D(2,1;α), F(4), G(3)).
    Adjoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamilyTag {
    pub family: Family,
    pub group: GroupForm,
}

fn out_of_range(msg: impl Into<String>) -> Error {
    Error::ParameterOutOfRange(msg.into())
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::A { m, n } if m == 0 || n == 0 => {
                Err(out_of_range(format!("gl({m}|{n}) needs m, n > 0")))
            }
            Family::B { n: 0, m } => Err(out_of_range(format!("B({m},0) needs n ≥ 1"))),
            Family::C { n: 0 } => Err(out_of_range("C(0) needs n ≥ 1")),
            Family::D { m, n } if m < 2 || n == 0 => {
                Err(out_of_range(format!("D({m},{n}) needs m ≥ 2, n ≥ 1")))
            }
            Family::D21a(ref a) if a.is_zero() => Err(out_of_range("D(2,1;α) needs α ≠ 0")),
            _ => Ok(()),
        }
    }

    /// Rank of the ambient coordinate space.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            Family::A { m, n } | Family::B { m, n } | Family::D { m, n } => m + n,
            Family::C { n } => n + 1,
            Family::D21a(_) => 3,
            Family::F4 => 4,
            Family::G3 => 3,
        }
    }

    /// Conventional superalgebra name.
    pub fn algebra_name(&self) -> String {
        match self {
            Family::A { m, n } => format!("gl({m}|{n})"),
            Family::B { m, n } => format!("osp({}|{})", 2 * m + 1, 2 * n),
            Family::C { n } => format!("osp(2|{})", 2 * n),
            Family::D { m, n } => format!("osp({}|{})", 2 * m, 2 * n),
            Family::D21a(a) => format!("D(2,1;{})", fmt_q(a)),
            Family::F4 => "F(4)".into(),
            Family::G3 => "G(3)".into(),
        }
    }

    pub fn default_group(&self) -> GroupForm {
        match self {
            Family::A { .. } => GroupForm::GL,
            Family::B { .. } | Family::C { .. } | Family::D { .. } => GroupForm::OSp,
            _ => GroupForm::Adjoint,
        }
    }

    /// Same root system up to relabelling the D(2,1;α) parameter orbit,
    /// with D(2,1) identified with D(2,1;1).
    pub fn same_type(&self, other: &Family) -> bool {
        match (self.d21_parameter(), other.d21_parameter()) {
            (Some(a), Some(b)) => d21a_orbit(&a).contains(&b),
            _ => self == other,
        }
    }

    fn d21_parameter(&self) -> Option<Q> {
        match self {
            Family::D21a(a) => Some(a.clone()),
            Family::D { m: 2, n: 1 } => Some(Q::one()),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::A { m, n } => write!(f, "A({m},{n})"),
            Family::B { m, n } => write!(f, "B({m},{n})"),
            Family::C { n } => write!(f, "C({n})"),
            Family::D { m, n } => write!(f, "D({m},{n})"),
            Family::D21a(a) => write!(f, "D21a({})", fmt_q(a)),
            Family::F4 => f.write_str("F4"),
            Family::G3 => f.write_str("G3"),
        }
    }
}

impl GroupForm {
    pub fn name(self) -> &'static str {
        match self {
            GroupForm::GL => "GL",
            GroupForm::SL => "SL",
            GroupForm::SLtilde => "SLtilde",
            GroupForm::OSp => "OSp",
            GroupForm::Adjoint => "Adjoint",
        }
    }
}

impl FamilyTag {
    pub fn new(family: Family, group: GroupForm) -> Result<Self> {
        let tag = FamilyTag { family, group };
        tag.validate()?;
        Ok(tag)
    }

    pub fn of(family: Family) -> Result<Self> {
        let g = family.default_group();
        FamilyTag::new(family, g)
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        match (&self.family, self.group) {
            (Family::A { .. }, GroupForm::GL) => Ok(()),
            (Family::A { m: 2, n: 2 }, GroupForm::SL) => Err(out_of_range("SL(2,2) is excluded")),
            (Family::A { .. }, GroupForm::SL) => Ok(()),
            (Family::A { m, n }, GroupForm::SLtilde) if m != n => {
                Err(out_of_range(format!("SLtilde needs m = n, got ({m},{n})")))
            }
            (Family::A { n: 2, .. }, GroupForm::SLtilde) => {
                Err(out_of_range("SLtilde(2,2) is excluded"))
            }
            (Family::A { .. }, GroupForm::SLtilde) => Ok(()),
            (Family::B { .. } | Family::C { .. } | Family::D { .. }, GroupForm::OSp) => Ok(()),
            (Family::D21a(a), GroupForm::Adjoint) if *a == -Q::one() => Err(out_of_range(
                "D(2,1;−1) has a degenerate form, so its even coroots are undefined",
            )),
            (Family::D21a(_) | Family::F4 | Family::G3, GroupForm::Adjoint) => Ok(()),
            (f, g) => Err(out_of_range(format!(
                "group form {} does not apply to {f}",
                g.name()
            ))),
        }
    }

    /// Parses command-line style tags such as `GL 2 1`, `SLtilde 3`, `D21a 1/2`.
    pub fn parse(name: &str, params: &[&str]) -> Result<Self> {
        let nat = |i: usize| -> Result<usize> {
            params
                .get(i)
                .ok_or_else(|| out_of_range(format!("{name}: missing parameter {}", i + 1)))?
                .parse::<usize>()
                .map_err(|_| {
                    out_of_range(format!(
                        "{name}: parameter {} is not a natural number",
                        i + 1
                    ))
                })
        };
        let arity = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(out_of_range(format!(
                    "{name} takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let (family, group) = match name.to_ascii_lowercase().as_str() {
            "gl" | "a" => {
                arity(2)?;
                (
                    Family::A {
                        m: nat(0)?,
                        n: nat(1)?,
                    },
                    GroupForm::GL,
                )
            }
            "sl" => {
                arity(2)?;
                (
                    Family::A {
                        m: nat(0)?,
                        n: nat(1)?,
                    },
                    GroupForm::SL,
                )
            }
            "sltilde" => {
                if params.len() == 2 {
                    (
                        Family::A {
                            m: nat(0)?,
                            n: nat(1)?,
                        },
                        GroupForm::SLtilde,
                    )
                } else {
                    arity(1)?;
                    (
                        Family::A {
                            m: nat(0)?,
                            n: nat(0)?,
                        },
                        GroupForm::SLtilde,
                    )
                }
            }
            "b" | "osp-b" => {
                arity(2)?;
                (
                    Family::B {
                        m: nat(0)?,
                        n: nat(1)?,
                    },
                    GroupForm::OSp,
                )
            }
            "c" | "osp-c" => {
                arity(1)?;
                (Family::C { n: nat(0)? }, GroupForm::OSp)
            }
            "d" | "osp-d" => {
                arity(2)?;
                (
                    Family::D {
                        m: nat(0)?,
                        n: nat(1)?,
                    },
                    GroupForm::OSp,
                )
            }
            "d21a" => {
                arity(1)?;
                let a = parse_q(params[0]).ok_or_else(|| {
                    out_of_range(format!("D21a: '{}' is not a rational", params[0]))
                })?;
                (Family::D21a(a), GroupForm::Adjoint)
            }
            "f4" => {
                arity(0)?;
                (Family::F4, GroupForm::Adjoint)
            }
            "g3" => {
                arity(0)?;
                (Family::G3, GroupForm::Adjoint)
            }
            _ => return Err(out_of_range(format!("unknown family '{name}'"))),
        };
        FamilyTag::new(family, group)
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.family, self.group) {
            (Family::A { m, n }, g) => write!(f, "{}({m},{n})", g.name()),
            (fam, _) => write!(f, "{fam}"),
        }
    }
}

/// The orbit `{α, 1/α, −1−α, −1/(1+α), −α/(1+α), −(1+α)/α}` (α ∉ {0, −1}).
pub fn d21a_orbit(a: &Q) -> Vec<Q> {
    let one = Q::one();
    let mut out = vec![a.clone()];
    if !a.is_zero() {
        out.push(one.clone() / a);
        out.push(-(one.clone() + a) / a);
    }
    out.push(-(one.clone() + a));
    if !(one.clone() + a).is_zero() {
        out.push(-one.clone() / (one.clone() + a));
        out.push(-a.clone() / (one + a));
    }
    out.sort();
    out.dedup();
    out
}

/// Canonical orbit representative: among positive members the smallest
/// `(num², den²)`, otherwise the smallest absolute value.
pub fn d21a_canonical(a: &Q) -> Q {
    let orbit = d21a_orbit(a);
    let key = |x: &Q| (x.numer() * x.numer(), x.denom() * x.denom());
    if let Some(p) = orbit
        .iter()
        .filter(|x| x.is_positive_q())
        .min_by(|x, y| key(x).cmp(&key(y)))
    {
        return p.clone();
    }
    orbit
        .into_iter()
        .min_by(|x, y| x.abs_q().cmp(&y.abs_q()).then(x.cmp(y)))
        .expect("nonempty orbit")
}

trait QExt {
    fn is_positive_q(&self) -> bool;
    fn abs_q(&self) -> Q;
}

impl QExt for Q {
    fn is_positive_q(&self) -> bool {
        *self > Q::zero()
    }

    fn abs_q(&self) -> Q {
        if *self < Q::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    linalg::unit_vec(n, i)
}

fn pm_pairs(out: &mut Vec<(Vec<Q>, Parity)>, a: &[Q], b: &[Q], parity: Parity) {
    for s in [q(1), q(-1)] {
        for t in [q(1), q(-1)] {
            let v = linalg::add(&linalg::scale(&s, a), &linalg::scale(&t, b));
            out.push((v, parity));
        }
    }
}

fn pm(out: &mut Vec<(Vec<Q>, Parity)>, a: &[Q], parity: Parity) {
    out.push((a.to_vec(), parity));
    out.push((linalg::neg(a), parity));
}

/// Ambient form and roots in ε/δ coordinates.
fn blueprint(family: &Family) -> (RationalForm, Vec<(Vec<Q>, Parity)>) {
    let mut roots = Vec::new();
    match *family {
        Family::A { m, n } => {
            let d = m + n;
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        let parity = Parity::from_bit((i < m) != (j < m));
                        roots.push((linalg::sub(&unit(d, i), &unit(d, j)), parity));
                    }
                }
            }
            (eps_delta_form(m, n), roots)
        }
        Family::B { m, n } | Family::D { m, n } => {
            let d = m + n;
            let e = |i| unit(d, i);
            let dl = |j| unit(d, m + j);
            for i in 0..m {
                for j in i + 1..m {
                    pm_pairs(&mut roots, &e(i), &e(j), Parity::Even);
                }
                if matches!(family, Family::B { .. }) {
                    pm(&mut roots, &e(i), Parity::Even);
                }
                for j in 0..n {
                    pm_pairs(&mut roots, &e(i), &dl(j), Parity::Odd);
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    pm_pairs(&mut roots, &dl(i), &dl(j), Parity::Even);
                }
                pm(&mut roots, &linalg::scale(&q(2), &dl(i)), Parity::Even);
                if matches!(family, Family::B { .. }) {
                    pm(&mut roots, &dl(i), Parity::Odd);
                }
            }
            (eps_delta_form(m, n), roots)
        }
        Family::C { n } => {
            let d = n + 1;
            let dl = |j| unit(d, 1 + j);
            for i in 0..n {
                for j in i + 1..n {
                    pm_pairs(&mut roots, &dl(i), &dl(j), Parity::Even);
                }
                pm(&mut roots, &linalg::scale(&q(2), &dl(i)), Parity::Even);
                pm_pairs(&mut roots, &unit(d, 0), &dl(i), Parity::Odd);
            }
            (eps_delta_form(1, n), roots)
        }
        Family::D21a(ref a) => {
            let sigma = d21a_sigma(a);
            for i in 0..3 {
                pm(&mut roots, &linalg::scale(&q(2), &unit(3, i)), Parity::Even);
            }
            for s in [1, -1] {
                for t in [1, -1] {
                    pm(&mut roots, &[q(1), q(s), q(t)], Parity::Odd);
                }
            }
            let diag: Vec<Q> = sigma.iter().map(|s| s / q(2)).collect();
            (RationalForm::diagonal(&diag), roots)
        }
        Family::F4 => {
            // (ε₁, ε₂, ε₃, δ) with (εᵢ,εᵢ) = 1, (δ,δ) = −3
            let e = |i| unit(4, i);
            for i in 0..3 {
                for j in i + 1..3 {
                    pm_pairs(&mut roots, &e(i), &e(j), Parity::Even);
                }
                pm(&mut roots, &e(i), Parity::Even);
            }
            pm(&mut roots, &e(3), Parity::Even);
            let h = qf(1, 2);
            for s1 in [1, -1] {
                for s2 in [1, -1] {
                    for s3 in [1, -1] {
                        for s4 in [1, -1] {
                            let v = [s1, s2, s3, s4].iter().map(|&s| &h * q(s)).collect();
                            roots.push((v, Parity::Odd));
                        }
                    }
                }
            }
            (RationalForm::diagonal(&[q(1), q(1), q(1), q(-3)]), roots)
        }
        Family::G3 => {
            // (ε₁, ε₂, δ) with ε₃ = −ε₁ − ε₂, (εᵢ,εᵢ) = 2, (εᵢ,εⱼ) = −1, (δ,δ) = −2
            let eps = [
                vec![q(1), q(0), q(0)],
                vec![q(0), q(1), q(0)],
                vec![q(-1), q(-1), q(0)],
            ];
            let delta = unit(3, 2);
            for i in 0..3 {
                pm(&mut roots, &eps[i], Parity::Even);
                for j in i + 1..3 {
                    pm(&mut roots, &linalg::sub(&eps[i], &eps[j]), Parity::Even);
                }
                pm_pairs(&mut roots, &eps[i], &delta, Parity::Odd);
            }
            pm(&mut roots, &linalg::scale(&q(2), &delta), Parity::Even);
            pm(&mut roots, &delta, Parity::Odd);
            let form = RationalForm::new(Matrix::from_i64(&[
                vec![2, -1, 0],
                vec![-1, 2, 0],
                vec![0, 0, -2],
            ]))
            .expect("symmetric");
            (form, roots)
        }
    }
}

fn eps_delta_form(m: usize, n: usize) -> RationalForm {
    let diag: Vec<Q> = (0..m + n)
        .map(|i| if i < m { q(1) } else { q(-1) })
        .collect();
    RationalForm::diagonal(&diag)
}

/// `(−(1+α), 1, α)`; twice the diagonal of the D(2,1;α) form.
pub fn d21a_sigma(a: &Q) -> [Q; 3] {
    [-(Q::one() + a), Q::one(), a.clone()]
}

pub fn build_grs(family: &Family) -> Result<Grs> {
    family.validate()?;
    let (form, roots) = blueprint(family);
    Grs::new(form, roots)
}

pub fn build_datum(tag: &FamilyTag) -> Result<RootDatum> {
    tag.validate()?;
    let (form, roots) = blueprint(&tag.family);
    let n = form.dim();
    match tag.group {
        GroupForm::GL | GroupForm::OSp => {
            let coords: Vec<Vec<BigInt>> = roots
                .iter()
                .map(|(v, _)| q_to_z(v).expect("classical roots are integral"))
                .collect();
            build_on(Lattice::free(n), form, &roots, coords)
        }
        GroupForm::SL | GroupForm::SLtilde => {
            let Family::A { m, .. } = tag.family else {
                unreachable!("validated")
            };
            let z: Vec<BigInt> = (0..n)
                .map(|i| BigInt::from(if i < m { 1 } else { -1 }))
                .collect();
            let x = quotient_lattice(n, &[z])?;
            let coords: Vec<Vec<BigInt>> = roots
                .iter()
                .map(|(v, _)| x.coords(&LatticeVector(q_to_z(v).expect("integral"))))
                .collect();
            if tag.group == GroupForm::SL {
                let sections: Vec<Vec<Q>> = (0..x.rank())
                    .map(|i| {
                        let mut e = vec![BigInt::zero(); x.rank()];
                        e[i] = BigInt::one();
                        x.representative(&e).to_q()
                    })
                    .collect();
                let g = descend_form(&form, &roots, &coords, &sections)?;
                build_on(x, g, &roots, coords)
            } else {
                let cq: Vec<Vec<Q>> = coords.iter().map(|c| z_to_q(c)).collect();
                sublattice_datum(&form, &roots, &cq)
            }
        }
        GroupForm::Adjoint => {
            let vs: Vec<Vec<Q>> = roots.iter().map(|(v, _)| v.clone()).collect();
            sublattice_datum(&form, &roots, &vs)
        }
    }
}

/// Datum on the ℤ-span of `points` (one per root, in some rational coordinates).
fn sublattice_datum(
    ambient: &RationalForm,
    roots: &[(Vec<Q>, Parity)],
    points: &[Vec<Q>],
) -> Result<RootDatum> {
    let dim = points.first().map_or(0, Vec::len);
    let rl = RationalLattice::span_of(points, dim);
    let coords: Vec<Vec<BigInt>> = points
        .iter()
        .map(|p| rl.coords(p).expect("generators lie in their span"))
        .collect();
    let g = descend_form(ambient, roots, &coords, &[])?;
    build_on(Lattice::free(rl.rank()), g, roots, coords)
}

/// Form on `X ⊗ ℚ` agreeing with the ambient form on all root pairs.
///
/// A basis of independent root coordinates is completed by unit coordinate
/// vectors whose ambient representatives are `sections[i]`; their Gram
/// entries come from the ambient form, with the self-pairing shifted when
/// needed to keep the form non-degenerate.
fn descend_form(
    ambient: &RationalForm,
    roots: &[(Vec<Q>, Parity)],
    coords: &[Vec<BigInt>],
    sections: &[Vec<Q>],
) -> Result<RationalForm> {
    let r = coords.first().map(Vec::len).unwrap_or(sections.len());
    let cq: Vec<Vec<Q>> = coords.iter().map(|c| z_to_q(c)).collect();
    let mut basis_coords: Vec<Vec<Q>> = Vec::new();
    let mut basis_ambient: Vec<Vec<Q>> = Vec::new();
    for i in linalg::independent_subset(&cq) {
        basis_coords.push(cq[i].clone());
        basis_ambient.push(roots[i].0.clone());
    }
    let mut gram = lattice::gram_matrix(ambient, &basis_ambient)?;
    let mut ech = linalg::Echelon::default();
    for b in &basis_coords {
        ech.insert(b);
    }
    for i in 0..r {
        if basis_coords.len() == r {
            break;
        }
        let e = linalg::unit_vec(r, i);
        if !ech.insert(&e) {
            continue;
        }
        let amb = sections
            .get(i)
            .ok_or_else(|| Error::InvalidDatum("roots do not span X ⊗ ℚ".into()))?
            .clone();
        basis_coords.push(e);
        basis_ambient.push(amb);
        let mut g = lattice::gram_matrix(ambient, &basis_ambient)?;
        let k = basis_ambient.len() - 1;
        if g.det().is_zero() && !gram.det().is_zero() {
            g[(k, k)] += Q::one();
        }
        gram = g;
    }
    let p = Matrix::from_rows(basis_coords, r);
    let p_inv = p
        .inverse()
        .ok_or_else(|| Error::InvalidDatum("basis completion failed".into()))?;
    let g_x = p_inv.mul(&gram).mul(&p_inv.transpose());
    let form = RationalForm::new(g_x)?;
    for (a, ca) in roots.iter().zip(&cq) {
        for (b, cb) in roots.iter().zip(&cq) {
            if form.eval(ca, cb) != ambient.eval(&a.0, &b.0) {
                return Err(Error::InvalidDatum(
                    "ambient form does not descend to X ⊗ ℚ".into(),
                ));
            }
        }
    }
    Ok(form)
}

/// Root datum with `X^∨ = ℤ^r` dual to the canonical basis of `x`.
fn build_on(
    x: Lattice,
    form: RationalForm,
    roots: &[(Vec<Q>, Parity)],
    coords: Vec<Vec<BigInt>>,
) -> Result<RootDatum> {
    let r = x.rank();
    let mut even = Vec::new();
    let mut odd: Vec<(Vec<BigInt>, usize)> = Vec::new();
    for ((_, parity), c) in roots.iter().zip(coords) {
        match parity {
            Parity::Even => {
                let cq = z_to_q(&c);
                let n = form.eval(&cq, &cq);
                if n.is_zero() {
                    return Err(Error::IsotropicRoot(crate::rootdatum::fmt_coords(&c)));
                }
                let f = linalg::scale(&(q(2) / n), &form.matrix().mul_vec(&cq));
                let coroot = q_to_z(&f).ok_or_else(|| {
                    Error::InvalidDatum(format!(
                        "coroot of {} is not integral",
                        crate::rootdatum::fmt_coords(&c)
                    ))
                })?;
                even.push((c, coroot));
            }
            Parity::Odd => match odd.iter_mut().find(|(g, _)| *g == c) {
                Some((_, m)) => *m += 1,
                None => odd.push((c, 1)),
            },
        }
    }
    let rep = |c: &[BigInt]| x.representative(c);
    let even: Vec<_> = even
        .iter()
        .map(|(a, c)| (rep(a), LatticeVector(c.clone())))
        .collect();
    let odd: Vec<_> = odd.iter().map(|(g, m)| (rep(g), *m)).collect();
    RootDatum::new(
        x,
        Lattice::free(r),
        DualityPairing::identity(r),
        form,
        even,
        odd,
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogObject {
    Grs(Grs),
    Datum(RootDatum),
}

/// Direct sum of a nonempty sequence of objects of one kind.
pub fn direct_sum(parts: &[CatalogObject]) -> Result<CatalogObject> {
    match parts.first() {
        None => Err(Error::EmptySum),
        Some(CatalogObject::Grs(_)) => {
            let gs: Option<Vec<&Grs>> = parts
                .iter()
                .map(|p| match p {
                    CatalogObject::Grs(g) => Some(g),
                    _ => None,
                })
                .collect();
            Ok(CatalogObject::Grs(Grs::direct_sum(
                &gs.ok_or(Error::MixedKinds)?,
            )?))
        }
        Some(CatalogObject::Datum(_)) => {
            let ds: Option<Vec<&RootDatum>> = parts
                .iter()
                .map(|p| match p {
                    CatalogObject::Datum(d) => Some(d),
                    _ => None,
                })
                .collect();
            Ok(CatalogObject::Datum(RootDatum::direct_sum(
                &ds.ok_or(Error::MixedKinds)?,
            )?))
        }
    }
}

/// Every in-range tag whose datum has rank at most `max_rank`, with
/// GL/SL block sizes and OSp parameters capped as given.
pub fn corpus(max_rank: usize, max_a: usize, max_osp: usize, alphas: &[Q]) -> Vec<FamilyTag> {
    let mut out = Vec::new();
    let mut push = |f: Family, g: GroupForm| {
        if let Ok(t) = FamilyTag::new(f, g) {
            out.push(t);
        }
    };
    for m in 1..=max_a {
        for n in 1..=max_a {
            if m + n <= max_rank {
                push(Family::A { m, n }, GroupForm::GL);
            }
            if m + n - 1 <= max_rank {
                push(Family::A { m, n }, GroupForm::SL);
            }
            if m == n && 2 * n - 2 <= max_rank {
                push(Family::A { m, n }, GroupForm::SLtilde);
            }
        }
    }
    for m in 0..=max_osp {
        for n in 1..=max_osp {
            if m + n <= max_rank {
                push(Family::B { m, n }, GroupForm::OSp);
                push(Family::D { m, n }, GroupForm::OSp);
            }
        }
    }
    for n in 1..=max_osp {
        if n < max_rank {
            push(Family::C { n }, GroupForm::OSp);
        }
    }
    for a in alphas {
        push(Family::D21a(a.clone()), GroupForm::Adjoint);
    }
    push(Family::F4, GroupForm::Adjoint);
    push(Family::G3, GroupForm::Adjoint);
    out
}

/// The five D(2,1;α) parameters used throughout the test corpus.
pub fn corpus_alphas() -> Vec<Q> {
    vec![q(1), q(2), qf(1, 2), q(-3), qf(-2, 3)]
}
