//! Grassmann algebras over ℚ and the Berezinian of even invertible supermatrices.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grs::Parity;
use crate::linalg::{fmt_q, parse_q, q, Matrix, Q};
use crate::{Error, Result};

/// Largest supported number of generators (coefficients are stored densely).
pub const MAX_GENERATORS: usize = 16;

/// Element of the Grassmann algebra on `n` generators; coefficient `k` belongs to
/// the monomial whose generator set is the bit set of `k`, in increasing order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrassmannElement {
    n: usize,
    coeffs: Vec<Q>,
}

/// Sign of `θ_a θ_b` reordered increasingly (`a`, `b` disjoint bit sets).
fn merge_sign(a: usize, b: usize) -> bool {
    let mut odd = false;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        odd ^= (a >> (j + 1)).count_ones() % 2 == 1;
        rest &= rest - 1;
    }
    odd
}

impl GrassmannElement {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_GENERATORS, "at most {MAX_GENERATORS} generators");
        GrassmannElement {
            n,
            coeffs: vec![Q::zero(); 1 << n],
        }
    }

    pub fn scalar(n: usize, c: Q) -> Self {
        let mut x = Self::zero(n);
        x.coeffs[0] = c;
        x
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, Q::one())
    }

    /// The generator θ_{i+1}.
    pub fn generator(n: usize, i: usize) -> Self {
        assert!(i < n, "generator index out of range");
        let mut x = Self::zero(n);
        x.coeffs[1 << i] = Q::one();
        x
    }

    /// `c · θ_{i_1} ⋯ θ_{i_k}` for 0-based indices in any order.
    pub fn monomial(n: usize, c: Q, gens: &[usize]) -> Self {
        let mut x = Self::zero(n);
        let mut mask = 0usize;
        let mut odd = false;
        for &g in gens {
            assert!(g < n, "generator index out of range");
            if mask >> g & 1 == 1 {
                return x;
            }
            odd ^= merge_sign(mask, 1 << g);
            mask |= 1 << g;
        }
        x.coeffs[mask] = if odd { -c } else { c };
        x
    }

    pub fn generators(&self) -> usize {
        self.n
    }

    /// Coefficient of the monomial with generator bit set `mask`.
    pub fn coeff(&self, mask: usize) -> &Q {
        &self.coeffs[mask]
    }

    pub fn body(&self) -> &Q {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Nonzero terms as `(mask, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    /// Parity of a homogeneous element; zero counts as both, reported even.
    pub fn parity(&self) -> Option<Parity> {
        let mut p = None;
        for (mask, _) in self.terms() {
            let this = Parity::from_bit(mask.count_ones() % 2 == 1);
            match p {
                None => p = Some(this),
                Some(q) if q != this => return None,
                _ => {}
            }
        }
        Some(p.unwrap_or(Parity::Even))
    }

    pub fn is_even(&self) -> bool {
        self.terms().all(|(m, _)| m.count_ones() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms().all(|(m, _)| m.count_ones() % 2 == 1)
    }

    pub fn scale(&self, c: &Q) -> Self {
        GrassmannElement {
            n: self.n,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GeneratorMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(GrassmannElement { n: self.n, coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GrassmannElement { n: self.n, coeffs })
    }

    /// Inverse of an element with nonzero body: `b⁻¹ Σ_k (−u)^k` with `u = x/b − 1`
    /// nilpotent of order at most `n + 1`.
    pub fn inverse(&self) -> Option<Self> {
        let b = self.body().clone();
        if b.is_zero() {
            return None;
        }
        let binv = b.recip();
        let mut u = self.scale(&binv);
        u.coeffs[0] = Q::zero();
        let neg_u = -&u;
        let mut term = Self::one(self.n);
        let mut sum = Self::one(self.n);
        for _ in 0..self.n {
            term = &term * &neg_u;
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
        }
        Some(sum.scale(&binv))
    }

    /// Parses sums of terms such as `1 - θ1θ2 + 3/2*t3`; generators are 1-based and
    /// may be written `θk` or `tk`, optionally separated by `*`.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let bad = |msg: String| Error::InvalidElement(format!("{s:?}: {msg}"));
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(bad("empty".into()));
        }
        let mut out = Self::zero(n);
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in text.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, term.strip_prefix('+').unwrap_or(&term)),
            };
            let split = body.find(['t', 'θ']).unwrap_or(body.len());
            let (coef_s, gens_s) = body.split_at(split);
            let coef_s = coef_s.trim_end_matches('*');
            let mut coef = if coef_s.is_empty() {
                if gens_s.is_empty() {
                    return Err(bad("dangling sign".into()));
                }
                Q::one()
            } else {
                parse_q(coef_s).ok_or_else(|| bad(format!("bad coefficient {coef_s:?}")))?
            };
            if neg {
                coef = -coef;
            }
            let mut gens = Vec::new();
            for g in gens_s.split(['t', 'θ']).skip(1) {
                let g = g.trim_end_matches('*');
                let k: usize = g
                    .parse()
                    .map_err(|_| bad(format!("bad generator index {g:?}")))?;
                if k == 0 || k > n {
                    return Err(bad(format!("generator θ{k} outside 1..={n}")));
                }
                gens.push(k - 1);
            }
            out = &out + &Self::monomial(n, coef, &gens);
        }
        Ok(out)
    }
}

pub fn grassmann_mul(a: &GrassmannElement, b: &GrassmannElement) -> Result<GrassmannElement> {
    a.check(b)?;
    let mut out = GrassmannElement::zero(a.n);
    for (ma, x) in a.terms() {
        for (mb, y) in b.terms() {
            if ma & mb != 0 {
                continue;
            }
            let v = x * y;
            if merge_sign(ma, mb) {
                out.coeffs[ma | mb] -= v;
            } else {
                out.coeffs[ma | mb] += v;
            }
        }
    }
    Ok(out)
}

// Operators panic on generator-count mismatch; use the checked forms for fallible input.
impl Mul for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: Self) -> GrassmannElement {
        grassmann_mul(self, rhs).expect("generator counts differ")
    }
}

impl Add for &GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: Self) -> GrassmannElement {
        self.checked_add(rhs).expect("generator counts differ")
    }
}

impl Sub for &GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: Self) -> GrassmannElement {
        self.checked_sub(rhs).expect("generator counts differ")
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        self.scale(&-Q::one())
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut terms: Vec<(usize, &Q)> = self.terms().collect();
        terms.sort_by_key(|(m, _)| (m.count_ones(), std::cmp::Reverse(m.reverse_bits())));
        for (mask, c) in terms {
            let (neg, a) = (c.is_negative(), c.abs());
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            if mask == 0 || !a.is_one() {
                f.write_str(&fmt_q(&a))?;
                if mask != 0 {
                    f.write_str("*")?;
                }
            }
            for i in 0..self.n {
                if mask >> i & 1 == 1 {
                    write!(f, "θ{}", i + 1)?;
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Even supermatrix of block size `(m|n)`: diagonal blocks even, off-diagonal odd.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperMatrix {
    m: usize,
    n: usize,
    gens: usize,
    entries: Vec<GrassmannElement>,
}

impl SuperMatrix {
    pub fn new(m: usize, n: usize, rows: Vec<Vec<GrassmannElement>>) -> Result<Self> {
        let size = m + n;
        if rows.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: rows.len(),
            });
        }
        let gens = rows.first().and_then(|r| r.first()).map_or(0, |x| x.n);
        let mut entries = Vec::with_capacity(size * size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::DimensionMismatch {
                    expected: size,
                    got: row.len(),
                });
            }
            for (j, x) in row.into_iter().enumerate() {
                if x.n != gens {
                    return Err(Error::GeneratorMismatch(gens, x.n));
                }
                let ok = if (i < m) == (j < m) {
                    x.is_even()
                } else {
                    x.is_odd()
                };
                if !ok {
                    return Err(Error::ParityViolation { row: i, col: j });
                }
                entries.push(x);
            }
        }
        Ok(SuperMatrix {
            m,
            n,
            gens,
            entries,
        })
    }

    pub fn identity(m: usize, n: usize, gens: usize) -> Self {
        let size = m + n;
        let entries = (0..size * size)
            .map(|k| {
                if k / size == k % size {
                    GrassmannElement::one(gens)
                } else {
                    GrassmannElement::zero(gens)
                }
            })
            .collect();
        SuperMatrix {
            m,
            n,
            gens,
            entries,
        }
    }

    pub fn block_sizes(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn generators(&self) -> usize {
        self.gens
    }

    pub fn entry(&self, i: usize, j: usize) -> &GrassmannElement {
        &self.entries[i * (self.m + self.n) + j]
    }

    pub fn rows(&self) -> Vec<Vec<GrassmannElement>> {
        let size = self.m + self.n;
        self.entries.chunks(size).map(|r| r.to_vec()).collect()
    }

    fn block(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> Vec<Vec<GrassmannElement>> {
        rows.map(|i| cols.clone().map(|j| self.entry(i, j).clone()).collect())
            .collect()
    }

    /// Rational matrix of bodies.
    pub fn body(&self) -> Matrix {
        let size = self.m + self.n;
        Matrix::from_rows(
            (0..size)
                .map(|i| (0..size).map(|j| self.entry(i, j).body().clone()).collect())
                .collect(),
            size,
        )
    }

    pub fn mul(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::DimensionMismatch {
                expected: self.m + self.n,
                got: other.m + other.n,
            });
        }
        if self.gens != other.gens {
            return Err(Error::GeneratorMismatch(self.gens, other.gens));
        }
        let size = self.m + self.n;
        let mut entries = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                let mut acc = GrassmannElement::zero(self.gens);
                for k in 0..size {
                    acc = &acc + &(self.entry(i, k) * other.entry(k, j));
                }
                entries.push(acc);
            }
        }
        Ok(SuperMatrix {
            m: self.m,
            n: self.n,
            gens: self.gens,
            entries,
        })
    }
}

/// Determinant of a square matrix of even (pairwise commuting) elements, by
/// expansion along rows with memoization on the set of used columns.
pub fn det_even(a: &[Vec<GrassmannElement>], gens: usize) -> GrassmannElement {
    let k = a.len();
    let mut memo: HashMap<usize, GrassmannElement> = HashMap::new();
    fn go(
        a: &[Vec<GrassmannElement>],
        row: usize,
        used: usize,
        gens: usize,
        memo: &mut HashMap<usize, GrassmannElement>,
    ) -> GrassmannElement {
        if row == a.len() {
            return GrassmannElement::one(gens);
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut acc = GrassmannElement::zero(gens);
        let mut parity = false;
        for j in 0..a.len() {
            if used >> j & 1 == 1 {
                continue;
            }
            if !a[row][j].is_zero() {
                let minor = go(a, row + 1, used | 1 << j, gens, memo);
                let t = &a[row][j] * &minor;
                acc = if parity { &acc - &t } else { &acc + &t };
            }
            parity = !parity;
        }
        memo.insert(used, acc.clone());
        acc
    }
    if k == 0 {
        return GrassmannElement::one(gens);
    }
    go(a, 0, 0, gens, &mut memo)
}

/// Inverse of a square matrix of even elements with invertible body determinant.
fn inverse_even(a: &[Vec<GrassmannElement>], gens: usize) -> Option<Vec<Vec<GrassmannElement>>> {
    let k = a.len();
    let dinv = det_even(a, gens).inverse()?;
    let minor = |r: usize, c: usize| -> Vec<Vec<GrassmannElement>> {
        (0..k)
            .filter(|&i| i != r)
            .map(|i| {
                (0..k)
                    .filter(|&j| j != c)
                    .map(|j| a[i][j].clone())
                    .collect()
            })
            .collect()
    };
    Some(
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        // adj[i][j] = (−1)^{i+j} det(minor(j, i))
                        let c = det_even(&minor(j, i), gens);
                        let c = if (i + j) % 2 == 1 { -&c } else { c };
                        &c * &dinv
                    })
                    .collect()
            })
            .collect(),
    )
}

fn mat_mul(
    a: &[Vec<GrassmannElement>],
    b: &[Vec<GrassmannElement>],
    gens: usize,
) -> Vec<Vec<GrassmannElement>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(GrassmannElement::zero(gens), |acc, (x, brow)| {
                            &acc + &(x * &brow[j])
                        })
                })
                .collect()
        })
        .collect()
}

/// Both diagonal blocks have invertible bodies.
pub fn is_invertible(g: &SuperMatrix) -> bool {
    let body = g.body();
    let (m, n) = (g.m, g.n);
    let sub = |r: std::ops::Range<usize>| {
        Matrix::from_rows(
            r.clone()
                .map(|i| r.clone().map(|j| body[(i, j)].clone()).collect())
                .collect(),
            r.len(),
        )
    };
    !sub(0..m).det().is_zero() && !sub(m..m + n).det().is_zero()
}

/// `Ber(g) = det(B₁ − B₂B₄⁻¹B₃) · det(B₄)⁻¹`.
pub fn berezinian(g: &SuperMatrix) -> Result<GrassmannElement> {
    if !is_invertible(g) {
        return Err(Error::NotInvertible);
    }
    let (m, n, gens) = (g.m, g.n, g.gens);
    let b1 = g.block(0..m, 0..m);
    let b2 = g.block(0..m, m..m + n);
    let b3 = g.block(m..m + n, 0..m);
    let b4 = g.block(m..m + n, m..m + n);
    let b4inv = inverse_even(&b4, gens).ok_or(Error::NotInvertible)?;
    let corr = mat_mul(&mat_mul(&b2, &b4inv, gens), &b3, gens);
    let schur: Vec<Vec<GrassmannElement>> = b1
        .iter()
        .zip(&corr)
        .map(|(r, c)| r.iter().zip(c).map(|(x, y)| x - y).collect())
        .collect();
    let d4inv = det_even(&b4, gens).inverse().ok_or(Error::NotInvertible)?;
    Ok(&det_even(&schur, gens) * &d4inv)
}

/// Random even element: body from `body` (if given) plus small even nilpotent terms.
fn random_element(
    rng: &mut ChaCha8Rng,
    gens: usize,
    odd: bool,
    body: Option<i64>,
) -> GrassmannElement {
    let mut x = GrassmannElement::zero(gens);
    for mask in 0..1usize << gens {
        let deg_odd = mask.count_ones() % 2 == 1;
        if deg_odd != odd {
            continue;
        }
        x.coeffs[mask] = if mask == 0 {
            q(body.unwrap_or(0))
        } else if rng.gen_bool(0.5) {
            q(rng.gen_range(-3..=3))
        } else {
            Q::zero()
        };
    }
    x
}

/// Deterministic sample of `count` invertible even supermatrices of size `(m|n)`.
pub fn sample_supermatrices(
    m: usize,
    n: usize,
    gens: usize,
    count: usize,
    seed: u64,
) -> Vec<SuperMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = m + n;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let rows: Vec<Vec<GrassmannElement>> = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| {
                        let odd = (i < m) != (j < m);
                        let body = (!odd).then(|| rng.gen_range(-4..=4));
                        random_element(&mut rng, gens, odd, body)
                    })
                    .collect()
            })
            .collect();
        let g = SuperMatrix::new(m, n, rows).expect("sampled entries respect parity");
        if is_invertible(&g) {
            out.push(g);
        }
    }
    out
}
