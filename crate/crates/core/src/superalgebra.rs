//! Finite-dimensional Lie superalgebras given by structure constants.
//!
//! Matrix families are realized inside gl(p|q) by solving the defining linear
//! conditions; the reduced-row-echelon nullspace basis doubles as a weight basis
//! whose free positions give coordinate read-off for brackets.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::Family;
use crate::grs::{Grs, Parity};
use crate::linalg::{
    fmt_q, fmt_vec, is_zero_vec, parse_q, q, unit_vec, zero_vec, Echelon, Matrix, Q,
};
use crate::{Error, Result};

/// Sparse vector: sorted `(index, coefficient)` pairs with nonzero coefficients.
pub type Sparse = Vec<(usize, Q)>;

fn normalize(mut v: Vec<(usize, Q)>) -> Sparse {
    v.sort_by_key(|(i, _)| *i);
    let mut out: Sparse = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some((j, d)) if *j == i => *d += c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

fn sign(odd: bool) -> Q {
    if odd {
        -Q::one()
    } else {
        Q::one()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperAlgebra {
    name: String,
    labels: Vec<String>,
    parity: Vec<Parity>,
    /// `table[i][j]` = `[b_i, b_j]`.
    table: Vec<Vec<Sparse>>,
    cartan: Vec<usize>,
    /// Row `k`: values of the ambient coordinate functionals on `b_{cartan[k]}`.
    cartan_coords: Option<Vec<Vec<Q>>>,
}

impl SuperAlgebra {
    /// Builds an algebra from constants `(i, j, k, c)` meaning `[b_i, b_j] ∋ c·b_k`.
    ///
    /// A pair given in only one order is completed by super-antisymmetry; pairs
    /// given in both orders must agree.
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        parity: Vec<Parity>,
        constants: Vec<(usize, usize, usize, Q)>,
        cartan: Vec<usize>,
        cartan_coords: Option<Vec<Vec<Q>>>,
    ) -> Result<Self> {
        let n = labels.len();
        if parity.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: parity.len(),
            });
        }
        let bad = |s: String| Err(Error::InvalidAlgebra(s));
        let mut raw: Vec<Vec<Vec<(usize, Q)>>> = vec![vec![Vec::new(); n]; n];
        for (i, j, k, c) in constants {
            if i >= n || j >= n || k >= n {
                return bad(format!(
                    "constant index ({i}, {j}, {k}) out of range for dimension {n}"
                ));
            }
            if parity[k] != parity[i] + parity[j] {
                return bad(format!(
                    "[{}, {}] has a component on {} of the wrong parity",
                    labels[i], labels[j], labels[k]
                ));
            }
            raw[i][j].push((k, c));
        }
        let mut table: Vec<Vec<Sparse>> = raw
            .into_iter()
            .map(|row| row.into_iter().map(normalize).collect())
            .collect();
        for i in 0..n {
            for j in i..n {
                let s = -sign(parity[i].is_odd() && parity[j].is_odd());
                let mirror =
                    |v: &Sparse| -> Sparse { v.iter().map(|(k, c)| (*k, &s * c)).collect() };
                if i == j {
                    if table[i][i] != mirror(&table[i][i]) {
                        return bad(format!("[{0}, {0}] violates super-antisymmetry", labels[i]));
                    }
                    continue;
                }
                if table[j][i].is_empty() {
                    table[j][i] = mirror(&table[i][j]);
                } else if table[i][j].is_empty() {
                    table[i][j] = mirror(&table[j][i]);
                } else if table[j][i] != mirror(&table[i][j]) {
                    return bad(format!(
                        "[{}, {}] and [{}, {}] violate super-antisymmetry",
                        labels[i], labels[j], labels[j], labels[i]
                    ));
                }
            }
        }
        for &h in &cartan {
            if h >= n {
                return bad(format!("Cartan index {h} out of range"));
            }
            if parity[h].is_odd() {
                return bad(format!("Cartan element {} is odd", labels[h]));
            }
        }
        if let Some(coords) = &cartan_coords {
            if coords.len() != cartan.len() {
                return Err(Error::DimensionMismatch {
                    expected: cartan.len(),
                    got: coords.len(),
                });
            }
            if let Some(first) = coords.first() {
                if let Some(r) = coords.iter().find(|r| r.len() != first.len()) {
                    return Err(Error::DimensionMismatch {
                        expected: first.len(),
                        got: r.len(),
                    });
                }
            }
        }
        Ok(SuperAlgebra {
            name: name.into(),
            labels,
            parity,
            table,
            cartan,
            cartan_coords,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `(even dimension, odd dimension)`.
    pub fn dim(&self) -> (usize, usize) {
        let odd = self.parity.iter().filter(|p| p.is_odd()).count();
        (self.len() - odd, odd)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parity
    }

    pub fn parity_of(&self, i: usize) -> Parity {
        self.parity[i]
    }

    pub fn cartan(&self) -> &[usize] {
        &self.cartan
    }

    pub fn cartan_coords(&self) -> Option<&[Vec<Q>]> {
        self.cartan_coords.as_deref()
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, Q)] {
        &self.table[i][j]
    }

    /// Constants with `i ≤ j`, enough to rebuild the algebra through [`SuperAlgebra::new`].
    pub fn constants(&self) -> Vec<(usize, usize, usize, Q)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i..self.len() {
                for (k, c) in &self.table[i][j] {
                    out.push((i, j, *k, c.clone()));
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Q> {
        unit_vec(self.len(), i)
    }

    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut out = zero_vec(self.len());
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let ab = a * b;
                for (k, c) in &self.table[i][j] {
                    out[*k] += &ab * c;
                }
            }
        }
        out
    }

    /// Parity of a nonzero homogeneous element.
    pub fn parity_of_element(&self, x: &[Q]) -> Option<Parity> {
        let mut ps = x
            .iter()
            .zip(&self.parity)
            .filter(|(c, _)| !c.is_zero())
            .map(|(_, p)| *p);
        let first = ps.next()?;
        ps.all(|p| p == first).then_some(first)
    }

    /// Matrix of `ad x` in the basis (column `j` is `[x, b_j]`).
    pub fn ad(&self, x: &[Q]) -> Matrix {
        let n = self.len();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let col = self.bracket(x, &self.basis_vector(j));
            for (i, c) in col.into_iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        m
    }

    /// Restriction of an ambient weight (in ε/δ coordinates) to the Cartan basis.
    pub fn weight_of_ambient(&self, rho: &[Q]) -> Result<Vec<Q>> {
        let coords = self.cartan_coords.as_ref().ok_or(Error::NoCartan)?;
        coords
            .iter()
            .map(|row| {
                if row.len() != rho.len() {
                    return Err(Error::DimensionMismatch {
                        expected: row.len(),
                        got: rho.len(),
                    });
                }
                Ok(row.iter().zip(rho).map(|(a, b)| a * b).sum())
            })
            .collect()
    }

    /// Human-readable linear combination, e.g. `E11 - E22`.
    pub fn format_element(&self, x: &[Q]) -> String {
        let mut s = String::new();
        for (i, c) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let (neg, a) = (c.is_negative(), c.abs());
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if !a.is_one() {
                s.push_str(&fmt_q(&a));
                s.push('*');
            }
            s.push_str(&self.labels[i]);
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    /// Basis element by label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl fmt::Display for SuperAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (e, o) = self.dim();
        write!(f, "{} (dim {e}|{o})", self.name)
    }
}

// ---------------------------------------------------------------------------
// Realizations

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraFamily {
    Gl {
        m: usize,
        n: usize,
    },
    Sl {
        m: usize,
        n: usize,
    },
    /// osp(m|2n)
    Osp {
        m: usize,
        n: usize,
    },
    D21a(Q),
}

impl AlgebraFamily {
    /// Parses `gl 2 1`, `sl 2 1`, `osp 3 2` (superdimension, second entry even), `d21a 1/2`.
    pub fn parse(name: &str, params: &[&str]) -> Result<Self> {
        let oor = |s: String| Error::ParameterOutOfRange(s);
        let ints = || -> Result<Vec<usize>> {
            params
                .iter()
                .map(|p| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| oor(format!("bad parameter {p:?}")))
                })
                .collect()
        };
        let two = |v: Vec<usize>| -> Result<(usize, usize)> {
            match v[..] {
                [a, b] => Ok((a, b)),
                _ => Err(oor(format!("{name} takes two parameters"))),
            }
        };
        let fam = match name.to_ascii_lowercase().as_str() {
            "gl" => {
                let (m, n) = two(ints()?)?;
                AlgebraFamily::Gl { m, n }
            }
            "sl" => {
                let (m, n) = two(ints()?)?;
                AlgebraFamily::Sl { m, n }
            }
            "osp" => {
                let (m, n2) = two(ints()?)?;
                if n2 % 2 == 1 {
                    return Err(oor(format!("osp({m}|{n2}) needs an even odd dimension")));
                }
                AlgebraFamily::Osp { m, n: n2 / 2 }
            }
            "d21a" => match params {
                [a] => AlgebraFamily::D21a(
                    parse_q(a).ok_or_else(|| oor(format!("bad rational {a:?}")))?,
                ),
                _ => return Err(oor("d21a takes one parameter".into())),
            },
            other => return Err(oor(format!("unknown algebra family {other:?}"))),
        };
        fam.validate()?;
        Ok(fam)
    }

    pub fn validate(&self) -> Result<()> {
        let oor = |s: String| Err(Error::ParameterOutOfRange(s));
        match self {
            AlgebraFamily::Gl { m, n } | AlgebraFamily::Sl { m, n } if m + n == 0 => {
                oor(format!("{self} is empty"))
            }
            AlgebraFamily::Osp { m, n } if *m == 0 || *n == 0 => {
                oor(format!("{self} needs M ≥ 1, n ≥ 1"))
            }
            AlgebraFamily::D21a(a) if a.is_zero() => oor("D(2,1;α) needs α ≠ 0".into()),
            _ => Ok(()),
        }
    }

    /// Catalog family whose roots the realization's weights should reproduce.
    pub fn catalog_family(&self) -> Option<Family> {
        let fam = match *self {
            AlgebraFamily::Gl { m, n } | AlgebraFamily::Sl { m, n } => Family::A { m, n },
            AlgebraFamily::Osp { m, n } if m % 2 == 1 => Family::B { m: (m - 1) / 2, n },
            AlgebraFamily::Osp { m: 2, n } => Family::C { n },
            AlgebraFamily::Osp { m, n } => Family::D { m: m / 2, n },
            AlgebraFamily::D21a(ref a) => Family::D21a(a.clone()),
        };
        fam.validate().ok().map(|_| fam)
    }
}

impl fmt::Display for AlgebraFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraFamily::Gl { m, n } => write!(f, "gl({m}|{n})"),
            AlgebraFamily::Sl { m, n } => write!(f, "sl({m}|{n})"),
            AlgebraFamily::Osp { m, n } => write!(f, "osp({m}|{})", 2 * n),
            AlgebraFamily::D21a(a) => write!(f, "D(2,1;{})", fmt_q(a)),
        }
    }
}

pub fn realize(family: &AlgebraFamily) -> Result<SuperAlgebra> {
    family.validate()?;
    match family {
        AlgebraFamily::Gl { m, n } => gl(*m, *n),
        AlgebraFamily::Sl { m, n } => sl(*m, *n),
        AlgebraFamily::Osp { m, n } => osp(*m, *n),
        AlgebraFamily::D21a(a) => d21a(a),
    }
}

fn elementary_label(i: usize, j: usize, size: usize) -> String {
    if size <= 9 {
        format!("E{}{}", i + 1, j + 1)
    } else {
        format!("E({},{})", i + 1, j + 1)
    }
}

/// Subalgebra of gl(p|q) cut out by linear conditions on the matrix entries
/// (entry `(i, j)` is variable `i·(p+q)+j`). `coord_pos[c]` is the diagonal
/// position on which the `c`-th ambient coordinate functional is read.
fn matrix_algebra(
    name: String,
    p: usize,
    q_: usize,
    conditions: Vec<Vec<(usize, Q)>>,
    coord_pos: &[usize],
) -> Result<SuperAlgebra> {
    let size = p + q_;
    let nvars = size * size;
    let mut ech = Echelon::default();
    for cond in conditions {
        let mut row = zero_vec(nvars);
        for (v, c) in cond {
            row[v] += c;
        }
        ech.insert(&row);
    }
    let rows: Vec<Vec<Q>> = ech.basis().map(|r| r.to_vec()).collect();
    let cond = Matrix::from_rows(rows, nvars);
    let (_, pivots) = cond.rref();
    let free_cols: Vec<usize> = (0..nvars).filter(|c| !pivots.contains(c)).collect();
    let null = cond.nullspace();
    let odd_entry = |v: usize| (v / size < p) != (v % size < p);

    struct Elem {
        free: usize,
        entries: Vec<(usize, usize, Q)>,
    }
    let mut elems = Vec::with_capacity(null.len());
    let mut parity = Vec::with_capacity(null.len());
    for (vec, &free) in null.iter().zip(&free_cols) {
        let entries: Vec<(usize, usize, Q)> = vec
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| (v / size, v % size, c.clone()))
            .collect();
        let odd = odd_entry(entries[0].0 * size + entries[0].1);
        if entries
            .iter()
            .any(|(i, j, _)| odd_entry(i * size + j) != odd)
        {
            return Err(Error::InvalidAlgebra(format!(
                "{name}: basis element mixes parities"
            )));
        }
        parity.push(Parity::from_bit(odd));
        elems.push(Elem { free, entries });
    }
    let labels: Vec<String> = elems
        .iter()
        .map(|e| elementary_label(e.free / size, e.free % size, size))
        .collect();
    let free_of: HashMap<usize, usize> =
        elems.iter().enumerate().map(|(k, e)| (e.free, k)).collect();

    let product = |a: &Elem, b: &Elem| -> HashMap<(usize, usize), Q> {
        let mut out: HashMap<(usize, usize), Q> = HashMap::new();
        for (i, k, x) in &a.entries {
            for (k2, j, y) in &b.entries {
                if k == k2 {
                    *out.entry((*i, *j)).or_insert_with(Q::zero) += x * y;
                }
            }
        }
        out
    };
    let mut constants = Vec::new();
    for a in 0..elems.len() {
        for b in a..elems.len() {
            let s = sign(parity[a].is_odd() && parity[b].is_odd());
            let mut res = product(&elems[a], &elems[b]);
            for (key, v) in product(&elems[b], &elems[a]) {
                *res.entry(key).or_insert_with(Q::zero) -= &s * v;
            }
            res.retain(|_, v| !v.is_zero());
            // Read off coordinates at free positions, then check the reconstruction.
            let mut rebuilt: HashMap<(usize, usize), Q> = HashMap::new();
            for (&(i, j), v) in &res {
                if let Some(&k) = free_of.get(&(i * size + j)) {
                    constants.push((a, b, k, v.clone()));
                    for (r, c, x) in &elems[k].entries {
                        *rebuilt.entry((*r, *c)).or_insert_with(Q::zero) += v * x;
                    }
                }
            }
            rebuilt.retain(|_, v| !v.is_zero());
            if rebuilt != res {
                return Err(Error::InvalidAlgebra(format!(
                    "{name}: [{}, {}] leaves the subalgebra",
                    labels[a], labels[b]
                )));
            }
        }
    }
    let cartan: Vec<usize> = (0..elems.len())
        .filter(|&k| parity[k] == Parity::Even && elems[k].entries.iter().all(|(i, j, _)| i == j))
        .collect();
    let cartan_coords = cartan
        .iter()
        .map(|&k| {
            let mut diag = zero_vec(size);
            for (i, _, x) in &elems[k].entries {
                diag[*i] = x.clone();
            }
            coord_pos.iter().map(|&p| diag[p].clone()).collect()
        })
        .collect();
    SuperAlgebra::new(name, labels, parity, constants, cartan, Some(cartan_coords))
}

pub fn gl(m: usize, n: usize) -> Result<SuperAlgebra> {
    AlgebraFamily::Gl { m, n }.validate()?;
    let pos: Vec<usize> = (0..m + n).collect();
    matrix_algebra(format!("gl({m}|{n})"), m, n, Vec::new(), &pos)
}

/// Supertrace-zero matrices; for m = n this keeps the center.
pub fn sl(m: usize, n: usize) -> Result<SuperAlgebra> {
    AlgebraFamily::Sl { m, n }.validate()?;
    let size = m + n;
    let cond: Vec<(usize, Q)> = (0..size)
        .map(|i| (i * size + i, if i < m { q(1) } else { q(-1) }))
        .collect();
    let pos: Vec<usize> = (0..size).collect();
    matrix_algebra(format!("sl({m}|{n})"), m, n, vec![cond], &pos)
}

/// osp(M|2n) preserving the even supersymmetric form with
/// `(e_i, e_{-i}) = 1`, `(e_0, e_0) = 1` and `(f_j, f_{-j}) = 1 = -(f_{-j}, f_j)`.
pub fn osp(big_m: usize, n: usize) -> Result<SuperAlgebra> {
    AlgebraFamily::Osp { m: big_m, n }.validate()?;
    let m = big_m / 2;
    let size = big_m + 2 * n;
    let mut form = Matrix::zeros(size, size);
    for i in 0..m {
        form[(i, m + i)] = q(1);
        form[(m + i, i)] = q(1);
    }
    if big_m % 2 == 1 {
        form[(2 * m, 2 * m)] = q(1);
    }
    for j in 0..n {
        form[(big_m + j, big_m + n + j)] = q(1);
        form[(big_m + n + j, big_m + j)] = q(-1);
    }
    let odd_vec = |u: usize| u >= big_m;
    let odd_entry = |i: usize, j: usize| odd_vec(i) != odd_vec(j);
    // B(X e_u, e_v) + (-1)^{|X||u|} B(e_u, X e_v) = 0, one equation per (u, v).
    let mut conditions = Vec::new();
    for u in 0..size {
        for v in 0..size {
            let mut cond = Vec::new();
            for i in 0..size {
                if !form[(i, v)].is_zero() {
                    cond.push((i * size + u, form[(i, v)].clone()));
                }
                if !form[(u, i)].is_zero() {
                    let s = sign(odd_entry(i, v) && odd_vec(u));
                    cond.push((i * size + v, s * &form[(u, i)]));
                }
            }
            if !cond.is_empty() {
                conditions.push(cond);
            }
        }
    }
    let pos: Vec<usize> = (0..m).chain(big_m..big_m + n).collect();
    matrix_algebra(
        format!("osp({big_m}|{})", 2 * n),
        big_m,
        2 * n,
        conditions,
        &pos,
    )
}

/// D(2,1;α) with odd-odd coefficients (−(1+α), 1, α).
pub fn d21a(alpha: &Q) -> Result<SuperAlgebra> {
    AlgebraFamily::D21a(alpha.clone()).validate()?;
    let sigma = [-(Q::one() + alpha), Q::one(), alpha.clone()];
    d21a_with_coefficients(format!("D(2,1;{})", fmt_q(alpha)), &sigma)
}

/// The sl₂³ ⊕ (2⊗2⊗2) model with arbitrary odd-odd coefficients; Jacobi holds iff
/// they sum to zero.
pub fn d21a_with_coefficients(name: String, sigma: &[Q; 3]) -> Result<SuperAlgebra> {
    // Even basis: e_i, h_i, f_i at 3i, 3i+1, 3i+2. Odd: v_s at 9 + s, bit i of s set
    // meaning v_- in slot i.
    let (e, h, f) = (|i: usize| 3 * i, |i: usize| 3 * i + 1, |i: usize| 3 * i + 2);
    let v = |s: usize| 9 + s;
    let mut labels = Vec::new();
    for i in 1..=3 {
        labels.extend([format!("e{i}"), format!("h{i}"), format!("f{i}")]);
    }
    for s in 0..8 {
        let signs: String = (0..3)
            .map(|i| if s >> i & 1 == 0 { '+' } else { '-' })
            .collect();
        labels.push(format!("v{signs}"));
    }
    let parity: Vec<Parity> = (0..17).map(|k| Parity::from_bit(k >= 9)).collect();
    let mut c = Vec::new();
    for i in 0..3 {
        c.push((h(i), e(i), e(i), q(2)));
        c.push((h(i), f(i), f(i), q(-2)));
        c.push((e(i), f(i), h(i), q(1)));
        for s in 0..8 {
            let minus = s >> i & 1 == 1;
            let flip = s ^ (1 << i);
            if minus {
                c.push((e(i), v(s), v(flip), q(1)));
                c.push((h(i), v(s), v(s), q(-1)));
            } else {
                c.push((f(i), v(s), v(flip), q(1)));
                c.push((h(i), v(s), v(s), q(1)));
            }
        }
    }
    // ψ(v+, v-) = 1 = -ψ(v-, v+); p(v+,v+) = 2e, p(v-,v-) = -2f, p(v+,v-) = p(v-,v+) = -h.
    let psi = |a: bool, b: bool| match (a, b) {
        (false, true) => q(1),
        (true, false) => q(-1),
        _ => q(0),
    };
    for s in 0..8usize {
        for t in s..8usize {
            for (i, si) in sigma.iter().enumerate() {
                let mut coef = si.clone();
                for j in (0..3).filter(|&j| j != i) {
                    coef *= psi(s >> j & 1 == 1, t >> j & 1 == 1);
                }
                if coef.is_zero() {
                    continue;
                }
                match (s >> i & 1 == 1, t >> i & 1 == 1) {
                    (false, false) => c.push((v(s), v(t), e(i), coef * q(2))),
                    (true, true) => c.push((v(s), v(t), f(i), coef * q(-2))),
                    _ => c.push((v(s), v(t), h(i), -coef)),
                }
            }
        }
    }
    let cartan = vec![h(0), h(1), h(2)];
    let coords = (0..3).map(|i| unit_vec(3, i)).collect();
    SuperAlgebra::new(name, labels, parity, c, cartan, Some(coords))
}

// ---------------------------------------------------------------------------
// Constructions

/// Quotient by the center, with the induced constants.
pub fn quotient_center(sa: &SuperAlgebra) -> SuperAlgebra {
    let center = center(sa);
    let n = sa.len();
    let (rref, pivots) = Matrix::from_rows(center, n).rref();
    let keep: Vec<usize> = (0..n).filter(|i| !pivots.contains(i)).collect();
    let new_index: HashMap<usize, usize> = keep.iter().enumerate().map(|(a, &i)| (i, a)).collect();
    // x mod center: subtract x[p]·(reduced center vector with pivot p).
    let project = |x: &mut Vec<Q>| {
        for (r, &p) in pivots.iter().enumerate() {
            if x[p].is_zero() {
                continue;
            }
            let f = x[p].clone();
            for j in 0..n {
                if !rref[(r, j)].is_zero() {
                    x[j] -= &f * &rref[(r, j)];
                }
            }
        }
    };
    let mut constants = Vec::new();
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate().skip(a) {
            let mut x = zero_vec(n);
            for (k, c) in sa.bracket_basis(i, j) {
                x[*k] += c;
            }
            project(&mut x);
            for (k, c) in x.into_iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                constants.push((a, b, new_index[&k], c));
            }
        }
    }
    let kept_cartan: Vec<(usize, usize)> = sa
        .cartan
        .iter()
        .enumerate()
        .filter_map(|(pos, h)| new_index.get(h).map(|&a| (pos, a)))
        .collect();
    let cartan = kept_cartan.iter().map(|&(_, a)| a).collect();
    let coords = sa.cartan_coords.as_ref().map(|cc| {
        kept_cartan
            .iter()
            .map(|&(pos, _)| cc[pos].clone())
            .collect()
    });
    SuperAlgebra::new(
        format!("{}/Z", sa.name),
        keep.iter().map(|&i| sa.labels[i].clone()).collect(),
        keep.iter().map(|&i| sa.parity[i]).collect(),
        constants,
        cartan,
        coords,
    )
    .expect("quotient of a valid algebra is valid")
}

/// Basis of the center `{x : [x, b_j] = 0 for all j}`.
pub fn center(sa: &SuperAlgebra) -> Vec<Vec<Q>> {
    let n = sa.len();
    let mut ech = Echelon::default();
    for j in 0..n {
        // Coefficient of b_k in sum_i x_i [b_i, b_j].
        let mut rows: BTreeMap<usize, Vec<Q>> = BTreeMap::new();
        for i in 0..n {
            for (k, c) in sa.bracket_basis(i, j) {
                rows.entry(*k).or_insert_with(|| zero_vec(n))[i] += c;
            }
        }
        for row in rows.values() {
            ech.insert(row);
        }
    }
    let rows: Vec<Vec<Q>> = ech.basis().map(|r| r.to_vec()).collect();
    Matrix::from_rows(rows, n).nullspace()
}

/// Duplicates the odd part; the two copies bracket to zero with each other.
pub fn double_odd(sa: &SuperAlgebra) -> SuperAlgebra {
    let n = sa.len();
    let odd: Vec<usize> = (0..n).filter(|&i| sa.parity[i].is_odd()).collect();
    let copy: HashMap<usize, usize> = odd.iter().enumerate().map(|(a, &i)| (i, n + a)).collect();
    let mut labels = sa.labels.clone();
    labels.extend(odd.iter().map(|&i| format!("{}'", sa.labels[i])));
    let mut parity = sa.parity.clone();
    parity.extend(odd.iter().map(|_| Parity::Odd));
    let mut constants = sa.constants();
    for (i, j, k, c) in sa.constants() {
        match (sa.parity[i].is_odd(), sa.parity[j].is_odd()) {
            (false, true) => constants.push((i, copy[&j], copy[&k], c)),
            (true, false) => constants.push((copy[&i], j, copy[&k], c)),
            (true, true) => constants.push((copy[&i], copy[&j], k, c)),
            (false, false) => {}
        }
    }
    SuperAlgebra::new(
        format!("double_odd({})", sa.name),
        labels,
        parity,
        constants,
        sa.cartan.clone(),
        sa.cartan_coords.clone(),
    )
    .expect("doubling a valid algebra is valid")
}

// ---------------------------------------------------------------------------
// Jacobi

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiViolation {
    pub triple: (usize, usize, usize),
    /// Value of the cyclic super-Jacobi sum on the triple.
    pub residual: Vec<Q>,
}

fn nested(sa: &SuperAlgebra, i: usize, j: usize, k: usize, out: &mut [Q], s: &Q) {
    for (l, c) in sa.bracket_basis(j, k) {
        for (m, d) in sa.bracket_basis(i, *l) {
            out[*m] += s * c * d;
        }
    }
}

/// Checks `(-1)^{|x||z|}[x,[y,z]] + (-1)^{|y||x|}[y,[z,x]] + (-1)^{|z||y|}[z,[x,y]] = 0`
/// on all basis triples; returns the first violating triple in lexicographic order.
pub fn check_jacobi(sa: &SuperAlgebra) -> Option<JacobiViolation> {
    let n = sa.len();
    let odd = |i: usize| sa.parity[i].is_odd();
    (0..n).into_par_iter().find_map_first(|i| {
        for j in 0..n {
            for k in 0..n {
                let mut r = zero_vec(n);
                nested(sa, i, j, k, &mut r, &sign(odd(i) && odd(k)));
                nested(sa, j, k, i, &mut r, &sign(odd(j) && odd(i)));
                nested(sa, k, i, j, &mut r, &sign(odd(k) && odd(j)));
                if !is_zero_vec(&r) {
                    return Some(JacobiViolation {
                        triple: (i, j, k),
                        residual: r,
                    });
                }
            }
        }
        None
    })
}

// ---------------------------------------------------------------------------
// Root decomposition

#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightSpace {
    pub even: Vec<Vec<Q>>,
    pub odd: Vec<Vec<Q>>,
}

impl WeightSpace {
    pub fn dims(&self) -> (usize, usize) {
        (self.even.len(), self.odd.len())
    }

    pub fn total(&self) -> usize {
        self.even.len() + self.odd.len()
    }
}

/// Weights are vectors of eigenvalues on the designated Cartan basis.
#[derive(Clone, Debug, PartialEq)]
pub struct RootDecomposition {
    pub spaces: BTreeMap<Vec<Q>, WeightSpace>,
}

impl RootDecomposition {
    pub fn dims(&self, weight: &[Q]) -> (usize, usize) {
        self.spaces.get(weight).map_or((0, 0), WeightSpace::dims)
    }

    /// Nonzero weights.
    pub fn roots(&self) -> impl Iterator<Item = (&Vec<Q>, &WeightSpace)> {
        self.spaces.iter().filter(|(w, _)| !is_zero_vec(w))
    }

    /// All nonzero weight spaces have total dimension 1.
    pub fn is_monodromy(&self) -> bool {
        self.roots().all(|(_, s)| s.total() == 1)
    }

    /// Compares with a catalog root system restricted to the Cartan; `None` when
    /// even and odd nonzero weights coincide with the restricted roots.
    pub fn compare_with(&self, sa: &SuperAlgebra, grs: &Grs) -> Result<Option<String>> {
        let mut expected: BTreeMap<Vec<Q>, (bool, bool)> = BTreeMap::new();
        for r in grs.roots() {
            let w = sa.weight_of_ambient(&r.vector)?;
            let e = expected.entry(w).or_default();
            if r.parity.is_odd() {
                e.1 = true;
            } else {
                e.0 = true;
            }
        }
        let found: BTreeMap<Vec<Q>, (bool, bool)> = self
            .roots()
            .map(|(w, s)| (w.clone(), (!s.even.is_empty(), !s.odd.is_empty())))
            .collect();
        expected.retain(|w, _| !is_zero_vec(w));
        if expected == found {
            return Ok(None);
        }
        for (w, p) in &expected {
            if found.get(w) != Some(p) {
                return Ok(Some(format!(
                    "catalog root {} (even {}, odd {}) has weight space {:?}",
                    fmt_vec(w),
                    p.0,
                    p.1,
                    found.get(w)
                )));
            }
        }
        let (w, _) = found
            .iter()
            .find(|(w, _)| !expected.contains_key(*w))
            .expect("sets differ");
        Ok(Some(format!("weight {} is not a catalog root", fmt_vec(w))))
    }
}

/// Simultaneous eigenspaces of the designated Cartan acting by `ad`.
pub fn root_decomposition(sa: &SuperAlgebra) -> Result<RootDecomposition> {
    let n = sa.len();
    let hs: Vec<Vec<Q>> = sa.cartan.iter().map(|&h| sa.basis_vector(h)).collect();
    // Fast path: the basis already consists of weight vectors.
    let mut spaces: BTreeMap<Vec<Q>, WeightSpace> = BTreeMap::new();
    let mut weight_basis = true;
    'basis: for i in 0..n {
        let mut w = Vec::with_capacity(hs.len());
        for &h in &sa.cartan {
            match sa.bracket_basis(h, i) {
                [] => w.push(Q::zero()),
                [(k, c)] if *k == i => w.push(c.clone()),
                _ => {
                    weight_basis = false;
                    break 'basis;
                }
            }
        }
        let space = spaces.entry(w).or_default();
        if sa.parity[i].is_odd() {
            space.odd.push(sa.basis_vector(i));
        } else {
            space.even.push(sa.basis_vector(i));
        }
    }
    if weight_basis {
        return Ok(RootDecomposition { spaces });
    }

    let ads: Vec<Matrix> = hs.iter().map(|h| sa.ad(h)).collect();
    let mut spaces: BTreeMap<Vec<Q>, WeightSpace> = BTreeMap::new();
    for parity in [Parity::Even, Parity::Odd] {
        let start: Vec<Vec<Q>> = (0..n)
            .filter(|&i| sa.parity[i] == parity)
            .map(|i| sa.basis_vector(i))
            .collect();
        if start.is_empty() {
            continue;
        }
        let mut parts: Vec<(Vec<Q>, Vec<Vec<Q>>)> = vec![(Vec::new(), start)];
        for ad in &ads {
            let mut next = Vec::new();
            for (w, sub) in parts {
                for (lambda, eig) in split_eigen(ad, &sub)? {
                    let mut w2 = w.clone();
                    w2.push(lambda);
                    next.push((w2, eig));
                }
            }
            parts = next;
        }
        for (w, sub) in parts {
            let space = spaces.entry(w).or_default();
            match parity {
                Parity::Even => space.even.extend(sub),
                Parity::Odd => space.odd.extend(sub),
            }
        }
    }
    Ok(RootDecomposition { spaces })
}

/// Coordinates of `v` in the independent vectors `basis`, if `v` lies in their span.
fn coords_in(basis: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
    let m = Matrix::from_columns(basis, v.len());
    let x = m.solve(v)?;
    (m.mul_vec(&x) == v).then_some(x)
}

/// Eigenspaces of `op` restricted to the invariant subspace spanned by `sub`.
fn split_eigen(op: &Matrix, sub: &[Vec<Q>]) -> Result<Vec<(Q, Vec<Vec<Q>>)>> {
    let d = sub.len();
    let mut r = Matrix::zeros(d, d);
    for (j, w) in sub.iter().enumerate() {
        let c = coords_in(sub, &op.mul_vec(w)).ok_or(Error::NotDiagonalizable)?;
        for (i, x) in c.into_iter().enumerate() {
            r[(i, j)] = x;
        }
    }
    let mut out = Vec::new();
    let mut total = 0;
    for lambda in rational_roots(&char_poly(&r)).ok_or(Error::NotDiagonalizable)? {
        let mut shifted = r.clone();
        for i in 0..d {
            shifted[(i, i)] -= &lambda;
        }
        let vecs: Vec<Vec<Q>> = shifted
            .nullspace()
            .into_iter()
            .map(|c| {
                let mut v = zero_vec(sub[0].len());
                for (ci, w) in c.iter().zip(sub) {
                    for (x, y) in v.iter_mut().zip(w) {
                        *x += ci * y;
                    }
                }
                v
            })
            .collect();
        total += vecs.len();
        out.push((lambda, vecs));
    }
    if total != d {
        return Err(Error::NotDiagonalizable);
    }
    Ok(out)
}

/// Characteristic polynomial coefficients `c_0..c_d` (monic) via Faddeev–LeVerrier.
fn char_poly(a: &Matrix) -> Vec<Q> {
    let d = a.rows();
    let mut c = vec![Q::zero(); d + 1];
    c[d] = Q::one();
    let mut m = Matrix::zeros(d, d);
    for k in 1..=d {
        let mut next = a.mul(&m);
        for i in 0..d {
            next[(i, i)] += &c[d - k + 1];
        }
        m = next;
        let am = a.mul(&m);
        let tr: Q = (0..d).map(|i| am[(i, i)].clone()).sum();
        c[d - k] = -tr / Q::from_integer(BigInt::from(k));
    }
    c
}

fn eval_poly(c: &[Q], x: &Q) -> Q {
    c.iter().rev().fold(Q::zero(), |acc, a| acc * x + a)
}

/// Divisors of `n > 0` when it factors by trial division below 10^6; `None` otherwise.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let mut rest = n.clone();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while &p * &p <= rest && p < limit {
        let mut e = 0;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            factors.push((p.clone(), e));
        }
        p += 1;
    }
    if !rest.is_one() {
        if &p * &p <= rest {
            return None;
        }
        factors.push((rest, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    Some(divs)
}

/// Distinct rational roots, or `None` if the polynomial does not split over ℚ.
fn rational_roots(c: &[Q]) -> Option<Vec<Q>> {
    let mut c = c.to_vec();
    let mut roots = Vec::new();
    while c.len() > 1 && c[0].is_zero() {
        c.remove(0);
        if !roots.contains(&Q::zero()) {
            roots.push(Q::zero());
        }
    }
    if c.len() > 1 {
        let den = c.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let ints: Vec<BigInt> = c
            .iter()
            .map(|x| (x * Q::from_integer(den.clone())).to_integer())
            .collect();
        let lead = divisors(&ints[ints.len() - 1].abs())?;
        let konst = divisors(&ints[0].abs())?;
        let mut deg = c.len() - 1;
        for p in &konst {
            for qd in &lead {
                for s in [1, -1] {
                    let x = Q::new(p * s, qd.clone());
                    if roots.contains(&x) {
                        continue;
                    }
                    if eval_poly(&c, &x).is_zero() {
                        roots.push(x.clone());
                        // Deflate to count multiplicity.
                        loop {
                            c = deflate(&c, &x);
                            deg -= 1;
                            if deg == 0 || !eval_poly(&c, &x).is_zero() {
                                break;
                            }
                        }
                    }
                }
            }
        }
        if deg > 0 {
            return None;
        }
    }
    Some(roots)
}

/// Divides by `(t - x)`, assuming `x` is a root.
fn deflate(c: &[Q], x: &Q) -> Vec<Q> {
    let d = c.len() - 1;
    let mut out = vec![Q::zero(); d];
    let mut carry = Q::zero();
    for k in (0..d).rev() {
        carry = &c[k + 1] + carry * x;
        out[k] = carry.clone();
    }
    out
}

// ---------------------------------------------------------------------------
// Invariant forms

/// How the non-degeneracy question over the space of invariant forms was settled.
#[derive(Clone, Debug, PartialEq)]
pub enum FormStatus {
    /// An explicit non-degenerate member.
    NonDegenerate(Matrix),
    /// The Gram determinant of the generic member vanishes identically.
    Degenerate(Certificate),
    /// The exhaustive check would exceed the grid cap.
    Undecided(String),
}

/// Proof that every member is degenerate: the determinant of the block of the
/// generic member (parity `block`) vanishes on a grid with more points per
/// variable than its degree in that variable. `block = None` means the only
/// invariant form is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub block: Option<Parity>,
    pub grid: Vec<usize>,
    pub points: usize,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.block {
            None => f.write_str("the only invariant form is zero"),
            Some(p) => write!(
                f,
                "{p} block determinant of the generic form vanishes on the grid {:?} ({} points, each side exceeding the degree bound)",
                self.grid, self.points
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantForms {
    pub basis: Vec<Matrix>,
    pub status: FormStatus,
}

impl InvariantForms {
    pub fn witness(&self) -> Option<&Matrix> {
        match &self.status {
            FormStatus::NonDegenerate(m) => Some(m),
            _ => None,
        }
    }
}

pub const GRID_CAP: usize = 1_000_000;

/// Unknown for `B(b_i, b_j)`: index into the pair list and sign, or `None` where the
/// form vanishes by evenness or super-symmetry.
fn pair_var(
    sa: &SuperAlgebra,
    ids: &HashMap<(usize, usize), usize>,
    i: usize,
    j: usize,
) -> Option<(usize, Q)> {
    let (a, b, s) = if i <= j {
        (i, j, Q::one())
    } else {
        (j, i, sign(sa.parity[i].is_odd() && sa.parity[j].is_odd()))
    };
    ids.get(&(a, b)).map(|&u| (u, s))
}

/// `B([b_i,b_j], b_k) - B(b_i, [b_j,b_k])` as a sparse row over unknowns.
fn invariance_row(
    sa: &SuperAlgebra,
    ids: &HashMap<(usize, usize), usize>,
    i: usize,
    j: usize,
    k: usize,
) -> Sparse {
    let mut row = Vec::new();
    for (l, c) in sa.bracket_basis(i, j) {
        if let Some((u, s)) = pair_var(sa, ids, *l, k) {
            row.push((u, c * s));
        }
    }
    for (l, c) in sa.bracket_basis(j, k) {
        if let Some((u, s)) = pair_var(sa, ids, i, *l) {
            row.push((u, -(c * s)));
        }
    }
    normalize(row)
}

/// Space of even super-symmetric invariant forms and a non-degeneracy verdict.
/// Random evaluation points come from `seed`; the verdict itself is exact.
pub fn invariant_forms(sa: &SuperAlgebra, seed: u64) -> InvariantForms {
    let n = sa.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i..n {
            if sa.parity[i] == sa.parity[j] && !(i == j && sa.parity[i].is_odd()) {
                pairs.push((i, j));
            }
        }
    }
    let all: HashMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(u, &p)| (p, u)).collect();

    // Triples through a Cartan element mostly pin single unknowns to zero.
    let mut zero = vec![false; pairs.len()];
    for &h in &sa.cartan {
        for i in 0..n {
            for k in 0..n {
                if let [(u, _)] = invariance_row(sa, &all, i, h, k)[..] {
                    zero[u] = true;
                }
            }
        }
    }
    let live: Vec<(usize, usize)> = pairs
        .iter()
        .zip(&zero)
        .filter(|(_, z)| !**z)
        .map(|(p, _)| *p)
        .collect();
    let ids: HashMap<(usize, usize), usize> =
        live.iter().enumerate().map(|(u, &p)| (p, u)).collect();
    let s = live.len();

    let rows: Vec<Vec<Sparse>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for j in 0..n {
                for k in 0..n {
                    let row = invariance_row(sa, &ids, i, j, k);
                    if row.is_empty() {
                        continue;
                    }
                    let lead = row[0].1.clone();
                    let row: Sparse = row.into_iter().map(|(u, c)| (u, c / &lead)).collect();
                    if seen.insert(row.clone()) {
                        out.push(row);
                    }
                }
            }
            out
        })
        .collect();
    let mut ech = Echelon::default();
    let mut seen = HashSet::new();
    for row in rows.into_iter().flatten() {
        if ech.dim() == s {
            break;
        }
        if !seen.insert(row.clone()) {
            continue;
        }
        let mut dense = zero_vec(s);
        for (u, c) in row {
            dense[u] = c;
        }
        ech.insert(&dense);
    }
    let eq: Vec<Vec<Q>> = ech.basis().map(|r| r.to_vec()).collect();
    let solutions = Matrix::from_rows(eq, s).nullspace();
    let basis: Vec<Matrix> = solutions
        .iter()
        .map(|sol| {
            let mut g = Matrix::zeros(n, n);
            for (u, &(i, j)) in live.iter().enumerate() {
                if sol[u].is_zero() {
                    continue;
                }
                g[(i, j)] = sol[u].clone();
                g[(j, i)] = sign(sa.parity[i].is_odd() && sa.parity[j].is_odd()) * &sol[u];
            }
            g
        })
        .collect();
    let status = nondegeneracy(sa, &basis, seed);
    InvariantForms { basis, status }
}

fn combination(basis: &[Matrix], t: &[Q], n: usize) -> Matrix {
    let mut g = Matrix::zeros(n, n);
    for (b, c) in basis.iter().zip(t) {
        if c.is_zero() {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                if !b[(i, j)].is_zero() {
                    g[(i, j)] += c * &b[(i, j)];
                }
            }
        }
    }
    g
}

fn sub_det(g: &Matrix, idx: &[usize]) -> Q {
    let mut m = Matrix::zeros(idx.len(), idx.len());
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            m[(a, b)] = g[(i, j)].clone();
        }
    }
    m.det()
}

/// Per-variable degree bound of the block determinant: the number of block rows
/// in which the variable occurs.
fn degree_bounds(basis: &[Matrix], idx: &[usize]) -> Vec<usize> {
    basis
        .iter()
        .map(|b| {
            idx.iter()
                .filter(|&&i| idx.iter().any(|&j| !b[(i, j)].is_zero()))
                .count()
        })
        .collect()
}

/// Calls `f` on every point of `{0..=d_0} × … × {0..=d_k}` until it returns true.
fn grid_find(bounds: &[usize], mut f: impl FnMut(&[Q]) -> bool) -> bool {
    let mut idx = vec![0usize; bounds.len()];
    loop {
        let t: Vec<Q> = idx.iter().map(|&x| q(x as i64)).collect();
        if f(&t) {
            return true;
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return false;
            }
            if idx[pos] < bounds[pos] {
                idx[pos] += 1;
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn grid_size(bounds: &[usize]) -> Option<usize> {
    bounds.iter().try_fold(1usize, |acc, &d| {
        acc.checked_mul(d + 1).filter(|&x| x <= GRID_CAP)
    })
}

fn nondegeneracy(sa: &SuperAlgebra, basis: &[Matrix], seed: u64) -> FormStatus {
    let n = sa.len();
    if basis.is_empty() {
        if n == 0 {
            return FormStatus::NonDegenerate(Matrix::zeros(0, 0));
        }
        return FormStatus::Degenerate(Certificate {
            block: None,
            grid: Vec::new(),
            points: 0,
        });
    }
    let even: Vec<usize> = (0..n).filter(|&i| !sa.parity[i].is_odd()).collect();
    let odd: Vec<usize> = (0..n).filter(|&i| sa.parity[i].is_odd()).collect();
    let blocks = [(Parity::Even, &even), (Parity::Odd, &odd)];
    let nonzero = |g: &Matrix| blocks.iter().all(|(_, idx)| !sub_det(g, idx).is_zero());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..=n {
        let t: Vec<Q> = (0..basis.len())
            .map(|_| q(rng.gen_range(-1000..=1000)))
            .collect();
        let g = combination(basis, &t, n);
        if nonzero(&g) {
            return FormStatus::NonDegenerate(g);
        }
    }
    // Exhaustive: a polynomial vanishing on a grid that beats its degree in every
    // variable is zero.
    for (parity, idx) in blocks {
        let bounds = degree_bounds(basis, idx);
        let Some(points) = grid_size(&bounds) else {
            return FormStatus::Undecided(format!("{parity} block grid exceeds {GRID_CAP} points"));
        };
        let found = grid_find(&bounds, |t| {
            !sub_det(&combination(basis, t, n), idx).is_zero()
        });
        if !found {
            let grid = bounds.iter().map(|d| d + 1).collect();
            return FormStatus::Degenerate(Certificate {
                block: Some(parity),
                grid,
                points,
            });
        }
    }
    // Both block determinants are nonzero polynomials, so their product is too.
    let bounds: Vec<usize> = degree_bounds(basis, &even)
        .into_iter()
        .zip(degree_bounds(basis, &odd))
        .map(|(a, b)| a + b)
        .collect();
    if grid_size(&bounds).is_none() {
        return FormStatus::Undecided(format!("product grid exceeds {GRID_CAP} points"));
    }
    let mut witness = None;
    grid_find(&bounds, |t| {
        let g = combination(basis, t, n);
        let ok = nonzero(&g);
        if ok {
            witness = Some(g);
        }
        ok
    });
    FormStatus::NonDegenerate(
        witness.expect("a nonzero polynomial is nonzero somewhere on the grid"),
    )
}

/// Checks evenness, super-symmetry and invariance of `form` on all basis triples.
pub fn check_invariant_form(sa: &SuperAlgebra, form: &Matrix) -> Option<String> {
    let n = sa.len();
    if form.rows() != n || form.cols() != n {
        return Some(format!(
            "form is {}×{}, algebra has dimension {n}",
            form.rows(),
            form.cols()
        ));
    }
    for i in 0..n {
        for j in 0..n {
            let b = &form[(i, j)];
            if sa.parity[i] != sa.parity[j] && !b.is_zero() {
                return Some(format!(
                    "B({}, {}) ≠ 0 on mixed parities",
                    sa.labels[i], sa.labels[j]
                ));
            }
            if *b != sign(sa.parity[i].is_odd() && sa.parity[j].is_odd()) * &form[(j, i)] {
                return Some(format!(
                    "B({}, {}) violates super-symmetry",
                    sa.labels[i], sa.labels[j]
                ));
            }
        }
    }
    (0..n).into_par_iter().find_map_first(|i| {
        for j in 0..n {
            for k in 0..n {
                let lhs: Q = sa
                    .bracket_basis(i, j)
                    .iter()
                    .map(|(l, c)| c * &form[(*l, k)])
                    .sum();
                let rhs: Q = sa
                    .bracket_basis(j, k)
                    .iter()
                    .map(|(l, c)| c * &form[(i, *l)])
                    .sum();
                if lhs != rhs {
                    return Some(format!(
                        "B([{0},{1}],{2}) ≠ B({0},[{1},{2}])",
                        sa.labels[i], sa.labels[j], sa.labels[k]
                    ));
                }
            }
        }
        None
    })
}

// ---------------------------------------------------------------------------
// Cartan-side constructions

/// The Cartan element `H_θ` with `θ(H) = B(H_θ, H)` for every Cartan `H`.
/// `theta` is given by its values on the Cartan basis.
pub fn cartan_element(sa: &SuperAlgebra, form: &Matrix, theta: &[Q]) -> Result<Vec<Q>> {
    let c = sa.cartan.len();
    if c == 0 {
        return Err(Error::NoCartan);
    }
    if theta.len() != c {
        return Err(Error::DimensionMismatch {
            expected: c,
            got: theta.len(),
        });
    }
    let mut g = Matrix::zeros(c, c);
    for (a, &ha) in sa.cartan.iter().enumerate() {
        for (b, &hb) in sa.cartan.iter().enumerate() {
            g[(a, b)] = form[(ha, hb)].clone();
        }
    }
    let inv = g.inverse().ok_or(Error::DegenerateOnCartan)?;
    let coef = inv.mul_vec(theta);
    let mut h = zero_vec(sa.len());
    for (x, &idx) in coef.into_iter().zip(&sa.cartan) {
        h[idx] = x;
    }
    Ok(h)
}

/// Value of a weight on a Cartan element.
pub fn evaluate_weight(sa: &SuperAlgebra, weight: &[Q], h: &[Q]) -> Result<Q> {
    let mut total = Q::zero();
    let cartan: HashSet<usize> = sa.cartan.iter().copied().collect();
    if let Some(i) = h
        .iter()
        .enumerate()
        .position(|(i, x)| !x.is_zero() && !cartan.contains(&i))
    {
        return Err(Error::InvalidAlgebra(format!(
            "{} is not in the Cartan subalgebra",
            sa.labels[i]
        )));
    }
    for (w, &idx) in weight.iter().zip(&sa.cartan) {
        total += w * &h[idx];
    }
    Ok(total)
}

/// `(e, h, f)` with `e ∈ 𝔤_α`, `f ∈ 𝔤_{−α}`, `h = [e, f]` and `α(h) = 2`.
pub fn sl2_triple(sa: &SuperAlgebra, alpha: &[Q]) -> Result<(Vec<Q>, Vec<Q>, Vec<Q>)> {
    if sa.cartan.is_empty() {
        return Err(Error::NoCartan);
    }
    if alpha.len() != sa.cartan.len() {
        return Err(Error::DimensionMismatch {
            expected: sa.cartan.len(),
            got: alpha.len(),
        });
    }
    let dec = root_decomposition(sa)?;
    let neg: Vec<Q> = alpha.iter().map(|x| -x).collect();
    let (Some(plus), Some(minus)) = (dec.spaces.get(alpha), dec.spaces.get(&neg)) else {
        return Err(Error::NotAWeight(fmt_vec(alpha)));
    };
    if is_zero_vec(alpha) {
        return Err(Error::NotAWeight(fmt_vec(alpha)));
    }
    if !plus.odd.is_empty() || plus.even.len() != 1 || minus.even.len() != 1 {
        return Err(Error::IsotropicOrOdd(fmt_vec(alpha)));
    }
    let e = plus.even[0].clone();
    let f0 = minus.even[0].clone();
    let h0 = sa.bracket(&e, &f0);
    let a = evaluate_weight(sa, alpha, &h0)?;
    if a.is_zero() {
        return Err(Error::IsotropicOrOdd(fmt_vec(alpha)));
    }
    let s = Q::from_integer(BigInt::from(2)) / a;
    let f: Vec<Q> = f0.iter().map(|x| x * &s).collect();
    let h = sa.bracket(&e, &f);
    Ok((e, h, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_grs;
    use crate::linalg::qf;

    fn el(sa: &SuperAlgebra, terms: &[(&str, i64)]) -> Vec<Q> {
        let mut v = zero_vec(sa.len());
        for (l, c) in terms {
            v[sa.index_of(l).unwrap_or_else(|| panic!("no {l}"))] += q(*c);
        }
        v
    }

    fn supertrace_form(sa: &SuperAlgebra, p: usize) -> Matrix {
        // Only for gl: basis is elementary matrices E_ij.
        let n = sa.len();
        let size = (n as f64).sqrt() as usize;
        let mut g = Matrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let (i, j) = (a / size, a % size);
                let (k, l) = (b / size, b % size);
                if j == k && i == l {
                    g[(a, b)] = if i < p { q(1) } else { q(-1) };
                }
            }
        }
        g
    }

    #[test]
    fn gl11_brackets() {
        let g = gl(1, 1).unwrap();
        assert_eq!(g.dim(), (2, 2));
        let x = g.bracket(&el(&g, &[("E12", 1)]), &el(&g, &[("E21", 1)]));
        assert_eq!(x, el(&g, &[("E11", 1), ("E22", 1)]));
        assert!(check_jacobi(&g).is_none());
    }

    #[test]
    fn dimensions() {
        assert_eq!(osp(1, 1).unwrap().dim(), (3, 2));
        assert_eq!(osp(2, 1).unwrap().dim(), (4, 4));
        assert_eq!(osp(3, 1).unwrap().dim(), (6, 6));
        assert_eq!(osp(4, 1).unwrap().dim(), (9, 8));
        assert_eq!(sl(2, 1).unwrap().dim(), (4, 4));
        assert_eq!(d21a(&q(1)).unwrap().dim(), (9, 8));
        assert!(matches!(
            realize(&AlgebraFamily::D21a(q(0))),
            Err(Error::ParameterOutOfRange(_))
        ));
        assert!(matches!(
            realize(&AlgebraFamily::Osp { m: 0, n: 1 }),
            Err(Error::ParameterOutOfRange(_))
        ));
    }

    #[test]
    fn jacobi_on_realizations() {
        for sa in [
            gl(2, 1),
            sl(2, 1),
            osp(1, 1),
            osp(3, 1),
            osp(2, 1),
            d21a(&qf(1, 2)),
            d21a(&q(-3)),
        ] {
            let sa = sa.unwrap();
            assert!(check_jacobi(&sa).is_none(), "{}", sa.name());
        }
    }

    #[test]
    fn jacobi_detects_mutation() {
        let sa = d21a_with_coefficients("bad".into(), &[q(1), q(1), q(1)]).unwrap();
        assert!(check_jacobi(&sa).is_some());
        let g = gl(1, 1).unwrap();
        let mut c = g.constants();
        for entry in c.iter_mut() {
            if (entry.0, entry.1, entry.2) == (1, 2, 0) {
                entry.3 += q(1);
            }
        }
        let bad = SuperAlgebra::new(
            "bad",
            g.labels().to_vec(),
            g.parities().to_vec(),
            c,
            vec![],
            None,
        )
        .unwrap();
        assert!(check_jacobi(&bad).is_some());
        let abelian = SuperAlgebra::new(
            "ab",
            vec!["x".into(), "y".into()],
            vec![Parity::Even, Parity::Odd],
            vec![],
            vec![],
            None,
        )
        .unwrap();
        assert!(check_jacobi(&abelian).is_none());
    }

    #[test]
    fn constructor_rejects_bad_constants() {
        let labels = vec!["x".to_string(), "y".to_string()];
        let par = vec![Parity::Even, Parity::Odd];
        let wrong_parity = SuperAlgebra::new(
            "w",
            labels.clone(),
            par.clone(),
            vec![(0, 1, 0, q(1))],
            vec![],
            None,
        );
        assert!(matches!(wrong_parity, Err(Error::InvalidAlgebra(_))));
        let even_square = SuperAlgebra::new(
            "w",
            labels.clone(),
            par.clone(),
            vec![(0, 0, 0, q(1))],
            vec![],
            None,
        );
        assert!(matches!(even_square, Err(Error::InvalidAlgebra(_))));
        let clash = SuperAlgebra::new(
            "w",
            labels,
            par,
            vec![(0, 1, 1, q(1)), (1, 0, 1, q(1))],
            vec![],
            None,
        );
        assert!(matches!(clash, Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn centers_and_quotients() {
        let s11 = sl(1, 1).unwrap();
        assert_eq!(s11.dim(), (1, 2));
        let p = quotient_center(&s11);
        assert_eq!(p.dim(), (0, 2));
        assert!(p.constants().is_empty());
        assert_eq!(quotient_center(&gl(1, 1).unwrap()).dim(), (1, 2));
        let s21 = sl(2, 1).unwrap();
        assert_eq!(quotient_center(&s21).dim(), s21.dim());
        let p22 = quotient_center(&sl(2, 2).unwrap());
        assert_eq!(p22.dim(), (6, 8));
        assert!(check_jacobi(&p22).is_none());
    }

    #[test]
    fn doubling() {
        let g = double_odd(&gl(1, 1).unwrap());
        assert_eq!(g.dim(), (2, 4));
        // [g1, g1] is central in gl(1|1), so the copies stay compatible.
        assert!(check_jacobi(&g).is_none());
        let d = double_odd(&sl(2, 1).unwrap());
        let dec = root_decomposition(&d).unwrap();
        assert!(!dec.is_monodromy());
        for (_, s) in dec.roots() {
            if !s.odd.is_empty() {
                assert_eq!(s.dims(), (0, 2));
            }
        }
    }

    #[test]
    fn doubled_sl21_breaks_jacobi() {
        // x = E13, y = E31 in copy one, z = E23 in copy two: only [[x,y],z] survives.
        let d = double_odd(&sl(2, 1).unwrap());
        let x = d.index_of("E13").unwrap();
        let y = d.index_of("E31").unwrap();
        let z = d.index_of("E23'").unwrap();
        let mut r = zero_vec(d.len());
        nested(&d, x, y, z, &mut r, &q(-1));
        nested(&d, y, z, x, &mut r, &q(-1));
        nested(&d, z, x, y, &mut r, &q(1));
        assert!(!is_zero_vec(&r));
        assert!(check_jacobi(&d).is_some());
    }

    #[test]
    fn gl_weights() {
        let g = gl(1, 1).unwrap();
        let dec = root_decomposition(&g).unwrap();
        let roots: Vec<_> = dec.roots().map(|(w, s)| (w.clone(), s.dims())).collect();
        assert_eq!(
            roots,
            vec![(vec![q(-1), q(1)], (0, 1)), (vec![q(1), q(-1)], (0, 1))]
        );
        assert!(dec.is_monodromy());
        let g21 = gl(2, 1).unwrap();
        let dec = root_decomposition(&g21).unwrap();
        assert_eq!(dec.roots().count(), 6);
        assert!(dec.is_monodromy());
    }

    #[test]
    fn weights_match_catalog() {
        let cases = [
            AlgebraFamily::Gl { m: 2, n: 1 },
            AlgebraFamily::Sl { m: 3, n: 1 },
            AlgebraFamily::Osp { m: 1, n: 1 },
            AlgebraFamily::Osp { m: 2, n: 2 },
            AlgebraFamily::Osp { m: 3, n: 1 },
            AlgebraFamily::Osp { m: 4, n: 1 },
            AlgebraFamily::D21a(qf(-2, 3)),
        ];
        for fam in cases {
            let sa = realize(&fam).unwrap();
            let grs = build_grs(&fam.catalog_family().unwrap()).unwrap();
            let dec = root_decomposition(&sa).unwrap();
            assert_eq!(dec.compare_with(&sa, &grs).unwrap(), None, "{fam}");
            assert!(dec.is_monodromy(), "{fam}");
        }
    }

    #[test]
    fn non_weight_basis_uses_eigen_split() {
        // gl(1|1) with the Cartan basis E11+E22, E11-E22 mixed: x = E11, y = E11+E22.
        let g = gl(1, 1).unwrap();
        let t = Matrix::from_i64(&[
            vec![1, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
            vec![0, 1, 0, 0],
        ]);
        // New basis vectors are the columns of t in the old basis; rebuild constants.
        let tinv = t.inverse().unwrap();
        let cols: Vec<Vec<Q>> = (0..4).map(|j| t.column(j)).collect();
        let mut c = Vec::new();
        for a in 0..4 {
            for b in a..4 {
                let x = tinv.mul_vec(&g.bracket(&cols[a], &cols[b]));
                for (k, v) in x.into_iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                    c.push((a, b, k, v));
                }
            }
        }
        let par: Vec<Parity> = cols
            .iter()
            .map(|v| g.parity_of_element(v).unwrap())
            .collect();
        let labels = (0..4).map(|i| format!("b{i}")).collect();
        let sa = SuperAlgebra::new("twisted", labels, par, c, vec![0, 1], None).unwrap();
        let dec = root_decomposition(&sa).unwrap();
        assert_eq!(dec.roots().count(), 2);
        assert!(dec.is_monodromy());
    }

    #[test]
    fn not_diagonalizable() {
        // ad h nilpotent: [h, x] = y, [h, y] = 0.
        let labels = vec!["h".to_string(), "x".into(), "y".into()];
        let par = vec![Parity::Even; 3];
        let sa =
            SuperAlgebra::new("heis", labels, par, vec![(0, 1, 2, q(1))], vec![0], None).unwrap();
        assert!(matches!(
            root_decomposition(&sa),
            Err(Error::NotDiagonalizable)
        ));
    }

    #[test]
    fn forms_gl11() {
        let g = gl(1, 1).unwrap();
        let forms = invariant_forms(&g, 7);
        assert_eq!(forms.basis.len(), 2);
        let st = supertrace_form(&g, 1);
        let span: Vec<Vec<Q>> = forms.basis.iter().map(|m| m.to_rows().concat()).collect();
        let mut ech = Echelon::default();
        for v in &span {
            ech.insert(v);
        }
        assert!(ech.contains(&st.to_rows().concat()));
        let w = forms.witness().unwrap();
        assert!(!w.det().is_zero());
        assert_eq!(check_invariant_form(&g, w), None);
    }

    #[test]
    fn forms_sl21_unique() {
        let sa = sl(2, 1).unwrap();
        let forms = invariant_forms(&sa, 1);
        assert_eq!(forms.basis.len(), 1);
        assert!(forms.witness().is_some());
        for b in &forms.basis {
            assert_eq!(check_invariant_form(&sa, b), None);
        }
    }

    #[test]
    fn doubled_gl11_keeps_a_nondegenerate_form() {
        let d = double_odd(&gl(1, 1).unwrap());
        // str on the even part and on each copy separately.
        let mut b = Matrix::zeros(6, 6);
        let idx = |l: &str| d.index_of(l).unwrap();
        b[(idx("E11"), idx("E11"))] = q(1);
        b[(idx("E22"), idx("E22"))] = q(-1);
        for (x, y) in [("E12", "E21"), ("E12'", "E21'")] {
            b[(idx(x), idx(y))] = q(1);
            b[(idx(y), idx(x))] = q(-1);
        }
        assert_eq!(check_invariant_form(&d, &b), None);
        assert!(!b.det().is_zero());
        let forms = invariant_forms(&d, 3);
        for f in &forms.basis {
            assert_eq!(check_invariant_form(&d, f), None);
        }
        assert!(forms.witness().is_some());
    }

    #[test]
    fn certificate_without_forms() {
        let sa = SuperAlgebra::new(
            "odd line",
            vec!["x".into()],
            vec![Parity::Odd],
            vec![],
            vec![],
            None,
        )
        .unwrap();
        let forms = invariant_forms(&sa, 0);
        assert!(forms.basis.is_empty());
        assert_eq!(
            forms.status,
            FormStatus::Degenerate(Certificate {
                block: None,
                grid: vec![],
                points: 0
            })
        );
    }

    #[test]
    fn forms_sl22_has_none() {
        // sl(2|2) keeps its center; the identity pairs with nothing.
        let forms = invariant_forms(&sl(2, 2).unwrap(), 5);
        assert!(forms.witness().is_none());
        assert!(matches!(forms.status, FormStatus::Degenerate(_)));
    }

    #[test]
    fn cartan_elements() {
        let g = gl(1, 1).unwrap();
        let st = supertrace_form(&g, 1);
        let theta = vec![q(1), q(-1)];
        let h = cartan_element(&g, &st, &theta).unwrap();
        assert_eq!(h, el(&g, &[("E11", 1), ("E22", 1)]));
        let x = el(&g, &[("E12", 1)]);
        let y = el(&g, &[("E21", 1)]);
        let b = st.bilinear(&x, &y);
        assert_eq!(
            g.bracket(&x, &y),
            h.iter().map(|c| c * &b).collect::<Vec<_>>()
        );
        assert!(is_zero_vec(
            &cartan_element(&g, &st, &[q(0), q(0)]).unwrap()
        ));
        let g21 = gl(2, 1).unwrap();
        let st = supertrace_form(&g21, 2);
        let h = cartan_element(&g21, &st, &[q(1), q(-1), q(0)]).unwrap();
        assert_eq!(h, el(&g21, &[("E11", 1), ("E22", -1)]));
        assert!(matches!(
            cartan_element(&g, &Matrix::zeros(4, 4), &theta),
            Err(Error::DegenerateOnCartan)
        ));
    }

    #[test]
    fn sl2_triples() {
        let g = gl(2, 1).unwrap();
        let (e, h, f) = sl2_triple(&g, &[q(1), q(-1), q(0)]).unwrap();
        assert_eq!(e, el(&g, &[("E12", 1)]));
        assert_eq!(h, el(&g, &[("E11", 1), ("E22", -1)]));
        assert_eq!(f, el(&g, &[("E21", 1)]));
        let o = osp(1, 1).unwrap();
        let alpha = o.weight_of_ambient(&[q(2)]).unwrap();
        let (e, h, f) = sl2_triple(&o, &alpha).unwrap();
        assert_eq!(evaluate_weight(&o, &alpha, &h).unwrap(), q(2));
        assert_eq!(
            o.bracket(&h, &e),
            e.iter().map(|x| x * q(2)).collect::<Vec<_>>()
        );
        assert_eq!(
            o.bracket(&h, &f),
            f.iter().map(|x| x * q(-2)).collect::<Vec<_>>()
        );
        let g11 = gl(1, 1).unwrap();
        assert!(matches!(
            sl2_triple(&g11, &[q(1), q(-1)]),
            Err(Error::IsotropicOrOdd(_))
        ));
        assert!(matches!(
            sl2_triple(&g11, &[q(5), q(0)]),
            Err(Error::NotAWeight(_))
        ));
    }

    #[test]
    fn rational_root_finder() {
        // (t-1)^2 (t+1/2)
        let c = vec![qf(1, 2), q(0), qf(-3, 2), q(1)];
        let mut r = rational_roots(&c).unwrap();
        r.sort();
        assert_eq!(r, vec![qf(-1, 2), q(1)]);
        // t^2 + 1 has no rational roots.
        assert_eq!(rational_roots(&[q(1), q(0), q(1)]), None);
        assert_eq!(rational_roots(&[q(0), q(0), q(1)]), Some(vec![q(0)]));
    }
}
