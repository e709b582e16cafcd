//! Integer lattices, Smith normal form and rational bilinear forms.
//!
//! Character lattices are either free (`ℤ^n`) or a torsion-free quotient of a
//! free ambient lattice by a set of relation vectors. Every lattice carries a
//! projection onto canonical coordinates in `ℤ^rank`, computed once from the
//! Smith normal form of the relation matrix, so that vector equality can be
//! tested by comparing canonical coordinates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Q};

pub type ZMatrix = Vec<Vec<BigInt>>;

pub fn zvec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn z_to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

/// Converts a rational vector with integral entries; `None` otherwise.
pub fn q_to_z(v: &[Q]) -> Option<Vec<BigInt>> {
    v.iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

pub fn z_identity(n: usize) -> ZMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { One::one() } else { Zero::zero() })
                .collect()
        })
        .collect()
}

pub fn z_mul(a: &ZMatrix, b: &ZMatrix, inner: usize, cols: usize) -> ZMatrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Result of [`smith_normal_form`]: `u · m · v = d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub u: ZMatrix,
    pub d: ZMatrix,
    pub v: ZMatrix,
}

impl Snf {
    /// Nonzero invariant factors `d₁ | d₂ | …`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let n = self.d.len().min(self.d.first().map_or(0, Vec::len));
        (0..n)
            .map(|i| self.d[i][i].clone())
            .filter(|x| !x.is_zero())
            .collect()
    }
}

/// Smith normal form of an integer matrix with `rows` rows and `cols` columns.
pub fn smith_normal_form(m: &ZMatrix, cols: usize) -> Snf {
    let rows = m.len();
    let mut d = m.clone();
    let mut u = z_identity(rows);
    let mut v = z_identity(cols);

    let swap_cols = |x: &mut ZMatrix, a: usize, b: usize| {
        for row in x.iter_mut() {
            row.swap(a, b);
        }
    };
    // row_i -= f * row_j
    let row_axpy = |x: &mut ZMatrix, i: usize, j: usize, f: &BigInt| {
        let src = x[j].clone();
        for (a, b) in x[i].iter_mut().zip(&src) {
            *a -= f * b;
        }
    };
    // col_i -= f * col_j
    let col_axpy = |x: &mut ZMatrix, i: usize, j: usize, f: &BigInt| {
        for row in x.iter_mut() {
            let t = f * &row[j];
            row[i] -= t;
        }
    };

    for t in 0..rows.min(cols) {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if d[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Snf { u, d, v };
            };
            d.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let f = d[i][t].div_floor(&d[t][t]);
                row_axpy(&mut d, i, t, &f);
                row_axpy(&mut u, i, t, &f);
                if !d[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let f = d[t][j].div_floor(&d[t][t]);
                col_axpy(&mut d, j, t, &f);
                col_axpy(&mut v, j, t, &f);
                if !d[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility of the trailing block by the pivot.
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d[i][j].is_multiple_of(&d[t][t]));
            match bad {
                Some((i, _)) => {
                    // row_t += row_i, then re-reduce.
                    let neg = -BigInt::one();
                    row_axpy(&mut d, t, i, &neg);
                    row_axpy(&mut u, t, i, &neg);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    Snf { u, d, v }
}

/// Integer vector in the ambient coordinates of a lattice presentation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub Vec<BigInt>);

impl LatticeVector {
    pub fn from_i64(v: &[i64]) -> Self {
        LatticeVector(zvec(v))
    }

    pub fn to_q(&self) -> Vec<Q> {
        z_to_q(&self.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn neg(&self) -> Self {
        LatticeVector(self.0.iter().map(|x| -x).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Presentation {
    Free,
    Quotient { relations: Vec<Vec<BigInt>> },
}

/// A finitely generated free abelian group, possibly given as a quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    ambient_rank: usize,
    presentation: Presentation,
    /// `rank × ambient_rank`: canonical coordinates of an ambient vector.
    projection: ZMatrix,
    /// `rank` ambient representatives of the canonical basis.
    section: ZMatrix,
}

impl Lattice {
    pub fn free(rank: usize) -> Self {
        Lattice {
            ambient_rank: rank,
            presentation: Presentation::Free,
            projection: z_identity(rank),
            section: z_identity(rank),
        }
    }

    pub fn rank(&self) -> usize {
        self.section.len()
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn relations(&self) -> &[Vec<BigInt>] {
        match &self.presentation {
            Presentation::Free => &[],
            Presentation::Quotient { relations } => relations,
        }
    }

    /// `rank × ambient_rank` matrix sending ambient vectors to canonical coordinates.
    pub fn projection(&self) -> &ZMatrix {
        &self.projection
    }

    /// Ambient representatives of the canonical basis, one per row.
    pub fn section(&self) -> &ZMatrix {
        &self.section
    }

    /// Rebuilds a lattice from stored parts, checking that `projection` kills
    /// exactly the relation span and that `section` is a right inverse.
    pub fn from_parts(
        ambient_rank: usize,
        relations: Vec<Vec<BigInt>>,
        projection: ZMatrix,
        section: ZMatrix,
    ) -> Result<Lattice> {
        let reference = quotient_lattice(ambient_rank, &relations)?;
        let r = reference.rank();
        let bad = |what: &str| Err(Error::InvalidDatum(format!("lattice {what}")));
        if projection.len() != r || section.len() != r {
            return bad(&format!("needs rank {r} projection and section"));
        }
        if projection
            .iter()
            .chain(&section)
            .any(|row| row.len() != ambient_rank)
        {
            return bad(&format!("rows must have length {ambient_rank}"));
        }
        for (i, p) in projection.iter().enumerate() {
            for (j, s) in section.iter().enumerate() {
                let v: BigInt = p.iter().zip(s).map(|(a, b)| a * b).sum();
                if v != BigInt::from((i == j) as i32) {
                    return bad("projection is not left inverse to section");
                }
            }
            if relations.iter().any(|rel| {
                !p.iter()
                    .zip(rel)
                    .map(|(a, b)| a * b)
                    .sum::<BigInt>()
                    .is_zero()
            }) {
                return bad("projection does not vanish on a relation");
            }
        }
        Ok(Lattice {
            projection,
            section,
            ..reference
        })
    }

    /// Canonical coordinates in `ℤ^rank`.
    pub fn coords(&self, v: &LatticeVector) -> Vec<BigInt> {
        assert_eq!(v.len(), self.ambient_rank, "vector length != ambient rank");
        self.projection
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&v.0)
                    .fold(BigInt::zero(), |a, (x, y)| a + x * y)
            })
            .collect()
    }

    /// Ambient representative of canonical coordinates.
    pub fn representative(&self, coords: &[BigInt]) -> LatticeVector {
        let mut out = vec![BigInt::zero(); self.ambient_rank];
        for (c, s) in coords.iter().zip(&self.section) {
            for (o, x) in out.iter_mut().zip(s) {
                *o += c * x;
            }
        }
        LatticeVector(out)
    }

    pub fn canonical(&self, v: &LatticeVector) -> LatticeVector {
        self.representative(&self.coords(v))
    }

    /// Equality modulo the relation span.
    pub fn same(&self, a: &LatticeVector, b: &LatticeVector) -> bool {
        self.coords(a) == self.coords(b)
    }

    pub fn direct_sum(parts: &[&Lattice]) -> Lattice {
        let ambient: usize = parts.iter().map(|l| l.ambient_rank).sum();
        let rank: usize = parts.iter().map(|l| l.rank()).sum();
        let mut projection = vec![vec![BigInt::zero(); ambient]; rank];
        let mut section = vec![vec![BigInt::zero(); ambient]; rank];
        let mut relations = Vec::new();
        let (mut a0, mut r0) = (0, 0);
        for l in parts {
            for i in 0..l.rank() {
                for j in 0..l.ambient_rank {
                    projection[r0 + i][a0 + j] = l.projection[i][j].clone();
                    section[r0 + i][a0 + j] = l.section[i][j].clone();
                }
            }
            for rel in l.relations() {
                let mut e = vec![BigInt::zero(); ambient];
                e[a0..a0 + l.ambient_rank].clone_from_slice(rel);
                relations.push(e);
            }
            a0 += l.ambient_rank;
            r0 += l.rank();
        }
        let presentation = if relations.is_empty() {
            Presentation::Free
        } else {
            Presentation::Quotient { relations }
        };
        Lattice {
            ambient_rank: ambient,
            presentation,
            projection,
            section,
        }
    }
}

/// `ℤ^ambient_rank / ⟨relations⟩`, provided the quotient is torsion-free.
pub fn quotient_lattice(ambient_rank: usize, relations: &[Vec<BigInt>]) -> Result<Lattice> {
    if let Some(r) = relations.iter().find(|r| r.len() != ambient_rank) {
        return Err(Error::DimensionMismatch {
            expected: ambient_rank,
            got: r.len(),
        });
    }
    if relations.iter().all(|r| r.iter().all(Zero::is_zero)) {
        let mut l = Lattice::free(ambient_rank);
        if !relations.is_empty() {
            l.presentation = Presentation::Quotient {
                relations: relations.to_vec(),
            };
        }
        return Ok(l);
    }
    let snf = smith_normal_form(&relations.to_vec(), ambient_rank);
    let factors = snf.invariant_factors();
    if let Some(f) = factors.iter().find(|f| !f.is_one()) {
        return Err(Error::Torsion {
            factor: f.to_string(),
        });
    }
    let s = factors.len();
    // Rows of v⁻¹ form a basis w of ℤ^n in which the relation span is ⟨w₁..w_s⟩.
    let v_q = Matrix::from_rows(snf.v.iter().map(|r| z_to_q(r)).collect(), ambient_rank);
    let v_inv = v_q.inverse().expect("unimodular");
    let projection = (s..ambient_rank)
        .map(|j| snf.v.iter().map(|row| row[j].clone()).collect())
        .collect();
    let section = (s..ambient_rank)
        .map(|j| q_to_z(v_inv.row(j)).expect("unimodular inverse is integral"))
        .collect();
    Ok(Lattice {
        ambient_rank,
        presentation: Presentation::Quotient {
            relations: relations.to_vec(),
        },
        projection,
        section,
    })
}

/// Rank of the rational span.
pub fn span_rank(vectors: &[Vec<Q>]) -> usize {
    crate::linalg::rank_of(vectors)
}

/// Whether the integer span of `vectors` is all of `ℤ^rank`.
pub fn spans_full_lattice(vectors: &[Vec<BigInt>], rank: usize) -> bool {
    if rank == 0 {
        return true;
    }
    if vectors.is_empty() {
        return false;
    }
    let snf = smith_normal_form(&vectors.to_vec(), rank);
    let f = snf.invariant_factors();
    f.len() == rank && f.iter().all(One::is_one)
}

/// The ℤ-span of finitely many rational vectors, with a chosen basis.
#[derive(Clone, Debug)]
pub struct RationalLattice {
    dim: usize,
    denom: BigInt,
    /// `v` from the SNF of the scaled generator matrix.
    v: Matrix,
    factors: Vec<BigInt>,
    basis: Vec<Vec<Q>>,
}

impl RationalLattice {
    pub fn span_of(vectors: &[Vec<Q>], dim: usize) -> Self {
        let denom = vectors
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let scaled: ZMatrix = vectors
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| (x * Q::from_integer(denom.clone())).to_integer())
                    .collect()
            })
            .collect();
        let (v, factors) = if scaled.is_empty() {
            (Matrix::identity(dim), Vec::new())
        } else {
            let snf = smith_normal_form(&scaled, dim);
            (
                Matrix::from_rows(snf.v.iter().map(|r| z_to_q(r)).collect(), dim),
                snf.invariant_factors(),
            )
        };
        let v_inv = v.inverse().expect("unimodular");
        let dq = Q::from_integer(denom.clone());
        let basis = factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                v_inv
                    .row(i)
                    .iter()
                    .map(|x| x * Q::from_integer(f.clone()) / &dq)
                    .collect()
            })
            .collect();
        RationalLattice {
            dim,
            denom,
            v,
            factors,
            basis,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    /// Integer coordinates in the chosen basis, or `None` when `x` is not in the lattice.
    pub fn coords(&self, x: &[Q]) -> Option<Vec<BigInt>> {
        assert_eq!(x.len(), self.dim);
        let dq = Q::from_integer(self.denom.clone());
        let scaled: Vec<Q> = x.iter().map(|c| c * &dq).collect();
        let c: Vec<Q> = (0..self.dim)
            .map(|j| (0..self.dim).fold(Q::zero(), |a, i| a + &scaled[i] * &self.v[(i, j)]))
            .collect();
        if c[self.factors.len()..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        self.factors
            .iter()
            .zip(&c)
            .map(|(f, ci)| {
                let y = ci / Q::from_integer(f.clone());
                y.is_integer().then(|| y.to_integer())
            })
            .collect()
    }
}

/// Symmetric rational bilinear form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalForm(Matrix);

impl RationalForm {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(RationalForm(m))
    }

    pub fn diagonal(d: &[Q]) -> Self {
        RationalForm(Matrix::diagonal(d))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn eval(&self, u: &[Q], v: &[Q]) -> Q {
        self.0.bilinear(u, v)
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.0.det().is_zero()
    }

    pub fn direct_sum(parts: &[&RationalForm]) -> Self {
        RationalForm(Matrix::block_diag(
            &parts.iter().map(|f| &f.0).collect::<Vec<_>>(),
        ))
    }
}

/// Integer matrix pairing `X` against `X^∨` in canonical coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityPairing(pub ZMatrix);

impl DualityPairing {
    pub fn identity(n: usize) -> Self {
        DualityPairing(z_identity(n))
    }

    pub fn rows(&self) -> usize {
        self.0.len()
    }

    pub fn cols(&self) -> usize {
        self.0.first().map_or(0, Vec::len)
    }

    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                acc += xi * &self.0[i][j] * yj;
            }
        }
        acc
    }

    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_rows(self.0.iter().map(|r| z_to_q(r)).collect(), self.cols())
    }

    pub fn direct_sum(parts: &[&DualityPairing]) -> Self {
        let rows: usize = parts.iter().map(|p| p.rows()).sum();
        let cols: usize = parts.iter().map(|p| p.cols()).sum();
        let mut m = vec![vec![BigInt::zero(); cols]; rows];
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            for (i, row) in p.0.iter().enumerate() {
                m[r0 + i][c0..c0 + row.len()].clone_from_slice(row);
            }
            r0 += p.rows();
            c0 += p.cols();
        }
        DualityPairing(m)
    }
}

/// Gram matrix `(form(vᵢ, vⱼ))ᵢⱼ`.
pub fn gram_matrix(form: &RationalForm, vectors: &[Vec<Q>]) -> Result<Matrix> {
    if let Some(v) = vectors.iter().find(|v| v.len() != form.dim()) {
        return Err(Error::DimensionMismatch {
            expected: form.dim(),
            got: v.len(),
        });
    }
    let n = vectors.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        let fi = form.matrix().mul_vec(&vectors[i]);
        for j in i..n {
            let x = crate::linalg::dot(&fi, &vectors[j]);
            g[(j, i)] = x.clone();
            g[(i, j)] = x;
        }
    }
    Ok(g)
}

pub fn q_int(x: &BigInt) -> Q {
    Q::from_integer(x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qf};
    use proptest::prelude::*;

    fn z(rows: &[&[i64]]) -> ZMatrix {
        rows.iter().map(|r| zvec(r)).collect()
    }

    fn check_snf(m: &ZMatrix, cols: usize) -> Snf {
        let s = smith_normal_form(m, cols);
        let rows = m.len();
        let umv = z_mul(&z_mul(&s.u, m, rows, cols), &s.v, cols, cols);
        assert_eq!(umv, s.d);
        let det = |x: &ZMatrix, n: usize| {
            Matrix::from_rows(x.iter().map(|r| z_to_q(r)).collect(), n).det()
        };
        assert!(det(&s.u, rows).abs() == q(1));
        assert!(det(&s.v, cols).abs() == q(1));
        for i in 0..rows {
            for j in 0..cols {
                if i != j {
                    assert!(s.d[i][j].is_zero());
                }
            }
        }
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn snf_of_diag_2_3() {
        let s = check_snf(&z(&[&[2, 0], &[0, 3]]), 2);
        assert_eq!(s.invariant_factors(), zvec(&[1, 6]));
    }

    #[test]
    fn snf_identity_and_zero() {
        let s = check_snf(&z(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), 3);
        assert_eq!(s.d, z_identity(3));
        let s = check_snf(&z(&[&[0]]), 1);
        assert_eq!(s.d, z(&[&[0]]));
    }

    #[test]
    fn quotient_by_antidiagonal_is_rank_one() {
        let l = quotient_lattice(2, &[zvec(&[1, -1])]).unwrap();
        assert_eq!(l.rank(), 1);
        assert!(l.same(
            &LatticeVector::from_i64(&[1, 0]),
            &LatticeVector::from_i64(&[0, 1])
        ));
        assert!(!l.same(
            &LatticeVector::from_i64(&[1, 0]),
            &LatticeVector::from_i64(&[0, 0])
        ));
        let c = l.canonical(&LatticeVector::from_i64(&[3, 4]));
        assert!(l.same(&c, &LatticeVector::from_i64(&[7, 0])));
    }

    #[test]
    fn quotient_with_torsion_is_rejected() {
        assert!(matches!(
            quotient_lattice(2, &[zvec(&[2, 0])]),
            Err(Error::Torsion { .. })
        ));
    }

    #[test]
    fn quotient_by_nothing() {
        let l = quotient_lattice(2, &[]).unwrap();
        assert_eq!(l.rank(), 2);
        assert_eq!(l, Lattice::free(2));
    }

    #[test]
    fn span_rank_examples() {
        let e = |v: &[i64]| v.iter().map(|&x| q(x)).collect::<Vec<_>>();
        assert_eq!(span_rank(&[e(&[1, 0]), e(&[0, 1])]), 2);
        assert_eq!(span_rank(&[]), 0);
        // sl(2|1) roots in ε₁, ε₂, δ coordinates
        let roots = [
            e(&[1, -1, 0]),
            e(&[-1, 1, 0]),
            e(&[1, 0, -1]),
            e(&[-1, 0, 1]),
            e(&[0, 1, -1]),
            e(&[0, -1, 1]),
        ];
        assert_eq!(span_rank(&roots), 2);
    }

    #[test]
    fn full_lattice_detection() {
        assert!(spans_full_lattice(&[zvec(&[1, 0]), zvec(&[1, 1])], 2));
        assert!(!spans_full_lattice(&[zvec(&[2, 0]), zvec(&[0, 1])], 2));
        assert!(!spans_full_lattice(&[zvec(&[1, -1])], 2));
        assert!(spans_full_lattice(&[], 0));
    }

    #[test]
    fn rational_lattice_half_integers() {
        let v = vec![vec![qf(1, 2), qf(1, 2)], vec![qf(1, 2), qf(-1, 2)]];
        let l = RationalLattice::span_of(&v, 2);
        assert_eq!(l.rank(), 2);
        assert!(l.coords(&[q(1), q(0)]).is_some());
        assert!(l.coords(&[qf(1, 2), q(0)]).is_none());
        let c = l.coords(&v[0]).unwrap();
        let back = (0..2)
            .map(|j| (0..2).fold(Q::zero(), |a, i| a + q_int(&c[i]) * &l.basis()[i][j]))
            .collect::<Vec<_>>();
        assert_eq!(back, v[0]);
    }

    #[test]
    fn gram_examples() {
        let gl11 = RationalForm::diagonal(&[q(1), q(-1)]);
        let g = gram_matrix(&gl11, &[vec![q(1), q(-1)]]).unwrap();
        assert_eq!(g, Matrix::from_i64(&[vec![0]]));
        assert_eq!(gram_matrix(&gl11, &[]).unwrap().rows(), 0);
        let id = RationalForm::diagonal(&[q(1), q(1)]);
        let g = gram_matrix(&id, &[vec![q(1), q(0)], vec![q(0), q(1)]]).unwrap();
        assert_eq!(g, Matrix::identity(2));
        assert!(gram_matrix(&id, &[vec![q(1)]]).is_err());
    }

    proptest! {
        #[test]
        fn snf_round_trip(entries in proptest::collection::vec(-6i64..6, 12), rows in 1usize..4) {
            let cols = 12 / 4;
            let m: ZMatrix = entries.chunks(cols).take(rows).map(zvec).collect();
            check_snf(&m, cols);
        }

        #[test]
        fn quotient_never_has_torsion(entries in proptest::collection::vec(-4i64..4, 6)) {
            let rels: Vec<Vec<BigInt>> = entries.chunks(3).map(zvec).collect();
            let snf = smith_normal_form(&rels, 3);
            let torsion = snf.invariant_factors().iter().any(|f| !f.is_one());
            match quotient_lattice(3, &rels) {
                Ok(l) => {
                    prop_assert!(!torsion);
                    prop_assert_eq!(l.rank(), 3 - snf.invariant_factors().len());
                    for r in &rels {
                        prop_assert!(l.coords(&LatticeVector(r.clone())).iter().all(Zero::is_zero));
                    }
                }
                Err(_) => prop_assert!(torsion),
            }
        }

        #[test]
        fn span_rank_ignores_order_and_sign(entries in proptest::collection::vec(-3i64..3, 9), flip in 0usize..3) {
            let vs: Vec<Vec<Q>> = entries.chunks(3).map(|c| c.iter().map(|&x| q(x)).collect()).collect();
            let mut ws = vs.clone();
            ws.reverse();
            ws[flip] = crate::linalg::neg(&ws[flip]);
            prop_assert_eq!(span_rank(&vs), span_rank(&ws));
        }
    }

    #[test]
    fn lattice_from_parts() {
        let l = quotient_lattice(3, &[zvec(&[1, 1, -1])]).unwrap();
        let back = Lattice::from_parts(
            3,
            l.relations().to_vec(),
            l.projection().clone(),
            l.section().clone(),
        )
        .unwrap();
        assert_eq!(back, l);
        let mut bad = l.section().clone();
        bad[0][0] += 1;
        assert!(
            Lattice::from_parts(3, l.relations().to_vec(), l.projection().clone(), bad).is_err()
        );
        let sum = Lattice::direct_sum(&[&l, &Lattice::free(1)]);
        let back = Lattice::from_parts(
            4,
            sum.relations().to_vec(),
            sum.projection().clone(),
            sum.section().clone(),
        )
        .unwrap();
        assert_eq!(back, sum);
    }
}
