//! Dense exact matrices over Q(sqrt2): determinants, kernels, Pluecker
//! vectors of all maximal minors, Pfaffians, the pinned bilinear forms,
//! isotropy, orthogonal complements, flags, and the coordinate-interval
//! intersection used to reduce big extension problems to small ones.

use crate::scalar::QuadScalar;
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("matrix is not square")]
    NonSquare,
    #[error("Pfaffian needs even size")]
    OddSize,
    #[error("matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("empty interval")]
    EmptyInterval,
    #[error("rank deficiency: {0}")]
    RankDeficient(&'static str),
}

/// Row-major dense matrix over Q(sqrt2). Indices are 0-based in code; the
/// JSON wire format and Pluecker subset keys are 1-based.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<QuadScalar>,
}

impl ExactMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![QuadScalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ExactMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, QuadScalar::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> QuadScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<QuadScalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ExactMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Integer test/construction helper.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        ExactMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| QuadScalar::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn from_cols(cols: Vec<Vec<QuadScalar>>) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        assert!(cols.iter().all(|col| col.len() == r), "ragged columns");
        ExactMatrix::from_fn(r, c, |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &QuadScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: QuadScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<QuadScalar> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<QuadScalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        ExactMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        ExactMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = QuadScalar::zero();
            for k in 0..self.cols {
                acc += &(self.get(i, k) * rhs.get(k, j));
            }
            acc
        })
    }

    pub fn scale(&self, c: &QuadScalar) -> ExactMatrix {
        ExactMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    pub fn neg(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.rows, self.cols, |i, j| -self.get(i, j))
    }

    pub fn add(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "matrix sum shape");
        ExactMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + rhs.get(i, j))
    }

    pub fn sub(&self, rhs: &ExactMatrix) -> ExactMatrix {
        self.add(&rhs.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(QuadScalar::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.rows == self.cols && self.transpose() == self.neg()
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j).is_zero()))
    }

    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> ExactMatrix {
        ExactMatrix::from_fn(row_idx.len(), col_idx.len(), |i, j| {
            self.get(row_idx[i], col_idx[j]).clone()
        })
    }

    pub fn leading_columns(&self, k: usize) -> ExactMatrix {
        assert!(k <= self.cols);
        self.submatrix(&(0..self.rows).collect::<Vec<_>>(), &(0..k).collect::<Vec<_>>())
    }

    pub fn hstack(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.rows, rhs.rows, "hstack row count");
        ExactMatrix::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, rhs.cols, "vstack column count");
        ExactMatrix::from_fn(self.rows + rhs.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                rhs.get(i - self.rows, j).clone()
            }
        })
    }

    /// Fraction-free (Bareiss) echelon form with column pivoting.
    /// Returns (echelon matrix, pivot (row, col) list, row-swap sign).
    /// Divisions are by earlier pivots and are exact.
    fn bareiss_echelon(&self) -> (ExactMatrix, Vec<(usize, usize)>, i8) {
        let mut m = self.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut sign = 1i8;
        let mut prev = QuadScalar::one();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    let a = m.get(r, j).clone();
                    let b = m.get(p, j).clone();
                    m.set(r, j, b);
                    m.set(p, j, a);
                }
                sign = -sign;
            }
            let piv = m.get(r, c).clone();
            for i in r + 1..m.rows {
                let lead = m.get(i, c).clone();
                for j in c + 1..m.cols {
                    let v = (&piv * m.get(i, j) - &lead * m.get(r, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, c, QuadScalar::zero());
            }
            prev = piv;
            pivots.push((r, c));
            r += 1;
        }
        (m, pivots, sign)
    }

    pub fn rank(&self) -> usize {
        self.bareiss_echelon().1.len()
    }

    pub fn det(&self) -> QuadScalar {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        if self.rows == 0 {
            return QuadScalar::one();
        }
        let (m, pivots, sign) = self.bareiss_echelon();
        if pivots.len() < self.rows {
            return QuadScalar::zero();
        }
        let last = m.get(self.rows - 1, self.cols - 1).clone();
        if sign < 0 {
            -last
        } else {
            last
        }
    }

    pub fn minor(&self, row_idx: &[usize], col_idx: &[usize]) -> QuadScalar {
        self.submatrix(row_idx, col_idx).det()
    }

    /// Columns spanning the null space {x : Mx = 0}; width = cols - rank.
    pub fn kernel(&self) -> ExactMatrix {
        let (e, pivots, _) = self.bareiss_echelon();
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let free_cols: Vec<usize> = (0..self.cols).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis: Vec<Vec<QuadScalar>> = Vec::new();
        for &fc in &free_cols {
            let mut x = vec![QuadScalar::zero(); self.cols];
            x[fc] = QuadScalar::one();
            // Back-substitute through the pivot rows; field division is exact.
            for &(pr, pc) in pivots.iter().rev() {
                let mut acc = QuadScalar::zero();
                for j in pc + 1..self.cols {
                    acc += &(e.get(pr, j) * &x[j]);
                }
                x[pc] = -&acc / e.get(pr, pc);
            }
            basis.push(x);
        }
        if basis.is_empty() {
            ExactMatrix::zero(self.cols, 0)
        } else {
            ExactMatrix::from_cols(basis)
        }
    }

    pub fn inverse(&self) -> Option<ExactMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.hstack(&ExactMatrix::identity(n));
        // Gauss-Jordan over the field.
        for c in 0..n {
            let p = (c..n).find(|&i| !a.get(i, c).is_zero())?;
            if p != c {
                for j in 0..2 * n {
                    let x = a.get(c, j).clone();
                    let y = a.get(p, j).clone();
                    a.set(c, j, y);
                    a.set(p, j, x);
                }
            }
            let piv = a.get(c, c).clone();
            for j in 0..2 * n {
                let v = a.get(c, j) / &piv;
                a.set(c, j, v);
            }
            for i in 0..n {
                if i == c || a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                for j in 0..2 * n {
                    let v = a.get(i, j) - &(&f * a.get(c, j));
                    a.set(i, j, v);
                }
            }
        }
        Some(a.submatrix(
            &(0..n).collect::<Vec<_>>(),
            &(n..2 * n).collect::<Vec<_>>(),
        ))
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row = (0..self.cols).map(|j| self.get(i, j).to_string()).join(", ");
            writeln!(f, "  [{row}]")?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<QuadScalar>>,
}

impl Serialize for ExactMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows).map(|i| self.row(i)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        if repr.entries.len() != repr.rows
            || repr.entries.iter().any(|r| r.len() != repr.cols)
        {
            return Err(serde::de::Error::custom("entries grid does not match rows x cols"));
        }
        Ok(ExactMatrix::from_rows(repr.entries))
    }
}

/// Pfaffian of an antisymmetric even-size matrix by expansion along the
/// first active row. Satisfies Pf(M)^2 = det(M).
pub fn pfaffian(m: &ExactMatrix) -> Result<QuadScalar, LinalgError> {
    if m.rows() != m.cols() {
        return Err(LinalgError::NonSquare);
    }
    if m.rows() % 2 != 0 {
        return Err(LinalgError::OddSize);
    }
    if !m.is_antisymmetric() {
        return Err(LinalgError::NotAntisymmetric);
    }
    fn pf_rec(m: &ExactMatrix, active: &[usize]) -> QuadScalar {
        if active.is_empty() {
            return QuadScalar::one();
        }
        let i0 = active[0];
        let mut acc = QuadScalar::zero();
        for p in 1..active.len() {
            let j = active[p];
            if m.get(i0, j).is_zero() {
                continue;
            }
            let rest: Vec<usize> = active[1..]
                .iter()
                .copied()
                .filter(|&x| x != j)
                .collect();
            let term = m.get(i0, j) * &pf_rec(m, &rest);
            // Local column index of j is p+1 (1-based), sign (-1)^(p+1).
            if p % 2 == 1 {
                acc += &term;
            } else {
                acc -= &term;
            }
        }
        acc
    }
    let active: Vec<usize> = (0..m.rows()).collect();
    Ok(pf_rec(m, &active))
}

/// All maximal minors of an N x k full-column-rank matrix, keyed by 1-based
/// k-subsets of row indices in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluckerVector {
    pub n: usize,
    pub k: usize,
    pub coords: BTreeMap<Vec<usize>, QuadScalar>,
}

impl PluckerVector {
    /// First lexicographic subset with a nonzero coordinate.
    pub fn first_nonzero(&self) -> Option<(&Vec<usize>, &QuadScalar)> {
        self.coords.iter().find(|(_, v)| !v.is_zero())
    }

    /// Scale by the sign of the first nonzero coordinate, making the
    /// projective representative canonical for positivity tests.
    pub fn sign_normalized(&self) -> PluckerVector {
        let s = self.first_nonzero().map_or(1, |(_, v)| v.sign());
        if s >= 0 {
            self.clone()
        } else {
            PluckerVector {
                n: self.n,
                k: self.k,
                coords: self.coords.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            }
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        let norm = self.sign_normalized();
        norm.first_nonzero().is_some() && norm.coords.values().all(|v| v.sign() >= 0)
    }

    pub fn is_positive(&self) -> bool {
        let norm = self.sign_normalized();
        norm.coords.values().all(|v| v.sign() > 0)
    }

    pub fn scale(&self, c: &QuadScalar) -> PluckerVector {
        PluckerVector {
            n: self.n,
            k: self.k,
            coords: self.coords.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }
}

/// Pluecker vector by column-incremental subset dynamic programming: process
/// columns left to right, maintaining all j-subset minors of the first j
/// columns. O(C(N,k) k) ring operations per column.
pub fn plucker_vector(m: &ExactMatrix) -> Result<PluckerVector, LinalgError> {
    let (n, k) = (m.rows(), m.cols());
    if k > n || n > 63 {
        return Err(LinalgError::DimensionMismatch("need k <= N <= 63"));
    }
    let mut dp: BTreeMap<u64, QuadScalar> = BTreeMap::new();
    dp.insert(0, QuadScalar::one());
    for j in 0..k {
        let mut next: BTreeMap<u64, QuadScalar> = BTreeMap::new();
        for (mask, val) in &dp {
            if val.is_zero() {
                continue;
            }
            for r in 0..n {
                if mask & (1 << r) != 0 {
                    continue;
                }
                let entry = m.get(r, j);
                if entry.is_zero() {
                    continue;
                }
                // Laplace expansion along the new column: the sign is parity
                // of the number of already-chosen rows below r.
                let above = (mask >> (r + 1)).count_ones();
                let term = entry * val;
                let slot = next.entry(mask | (1 << r)).or_insert_with(QuadScalar::zero);
                if above % 2 == 0 {
                    *slot += &term;
                } else {
                    *slot -= &term;
                }
            }
        }
        dp = next;
    }
    let mut coords = BTreeMap::new();
    for subset in (1..=n).combinations(k) {
        let mask: u64 = subset.iter().map(|&i| 1u64 << (i - 1)).sum();
        let val = dp.get(&mask).cloned().unwrap_or_else(QuadScalar::zero);
        coords.insert(subset, val);
    }
    Ok(PluckerVector { n, k, coords })
}

/// True iff q = c p for a single nonzero scalar c (c of either sign when
/// `up_to_sign`, otherwise c > 0).
pub fn plucker_projectively_equal(p: &PluckerVector, q: &PluckerVector, up_to_sign: bool) -> bool {
    projective_ratio(p, q).is_some_and(|c| up_to_sign || c.sign() > 0)
}

/// The scalar c with q = c p, when it exists.
pub fn projective_ratio(p: &PluckerVector, q: &PluckerVector) -> Option<QuadScalar> {
    if p.n != q.n || p.k != q.k {
        return None;
    }
    let (s0, pv) = p.first_nonzero()?;
    let qv = q.coords.get(s0)?;
    if qv.is_zero() {
        return None;
    }
    let c = qv / pv;
    for (key, pval) in &p.coords {
        if *q.coords.get(key)? != pval * &c {
            return None;
        }
    }
    Some(c)
}

/// Index map for comparing a subspace with its orthogonal complement:
/// a k-subset S of [N] goes to the reversed complement {N+1-j : j not in S}.
pub fn dual_index_map(s: &[usize], n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=n)
        .filter(|j| !s.contains(j))
        .map(|j| n + 1 - j)
        .collect();
    out.sort_unstable();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormKind {
    TypeC,
    TypeB,
    TypeD,
    Custom,
}

/// A fixed symmetric or alternating bilinear form together with its Gram
/// matrix. The three pinned kinds are the antidiagonal forms preserved by
/// the embedded symplectic and orthogonal groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    pub kind: FormKind,
    pub n: usize,
    pub gram: ExactMatrix,
}

impl BilinearForm {
    /// Alternating form on 2n coordinates: E(i, 2n+1-i) = (-1)^(i+1), 1-based.
    pub fn type_c(n: usize) -> Self {
        let nn = 2 * n;
        let mut g = ExactMatrix::zero(nn, nn);
        for i in 0..nn {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            g.set(i, nn - 1 - i, QuadScalar::from_int(sign));
        }
        BilinearForm { kind: FormKind::TypeC, n, gram: g }
    }

    /// Symmetric form on 2n+1 coordinates: E'(i, 2n+2-i) = (-1)^i, 1-based.
    pub fn type_b(n: usize) -> Self {
        let nn = 2 * n + 1;
        let mut g = ExactMatrix::zero(nn, nn);
        for i in 0..nn {
            let sign = if i % 2 == 0 { -1 } else { 1 };
            g.set(i, nn - 1 - i, QuadScalar::from_int(sign));
        }
        BilinearForm { kind: FormKind::TypeB, n, gram: g }
    }

    /// Symmetric form on 2n coordinates, block antidiagonal [[0, E0^t], [E0, 0]]
    /// with E0(i, n+1-i) = (-1)^(n+1-i), 1-based.
    pub fn type_d(n: usize) -> Self {
        let e0 = type_d_e0(n);
        let e0t = e0.transpose();
        let g = ExactMatrix::from_fn(2 * n, 2 * n, |i, j| {
            if i < n && j >= n {
                e0t.get(i, j - n).clone()
            } else if i >= n && j < n {
                e0.get(i - n, j).clone()
            } else {
                QuadScalar::zero()
            }
        });
        BilinearForm { kind: FormKind::TypeD, n, gram: g }
    }

    pub fn custom(gram: ExactMatrix) -> Self {
        assert_eq!(gram.rows(), gram.cols());
        let n = gram.rows();
        BilinearForm { kind: FormKind::Custom, n, gram }
    }

    pub fn ambient(&self) -> usize {
        self.gram.rows()
    }

    pub fn pairing(&self, u: &[QuadScalar], v: &[QuadScalar]) -> QuadScalar {
        assert!(u.len() == self.ambient() && v.len() == self.ambient());
        let mut acc = QuadScalar::zero();
        for i in 0..u.len() {
            for j in 0..v.len() {
                let g = self.gram.get(i, j);
                if !g.is_zero() {
                    acc += &(&(&u[i] * g) * &v[j]);
                }
            }
        }
        acc
    }

    /// True iff the form vanishes on all pairs of columns of M.
    pub fn is_isotropic(&self, m: &ExactMatrix) -> Result<bool, LinalgError> {
        if m.rows() != self.ambient() {
            return Err(LinalgError::DimensionMismatch("isotropy ambient"));
        }
        Ok(m.transpose().mul(&self.gram).mul(m).is_zero())
    }

    /// Basis of the orthogonal complement of the column span of M.
    pub fn perp(&self, m: &ExactMatrix) -> Result<ExactMatrix, LinalgError> {
        if m.rows() != self.ambient() {
            return Err(LinalgError::DimensionMismatch("perp ambient"));
        }
        Ok(m.transpose().mul(&self.gram).kernel())
    }
}

/// E0 block of the type-D form.
pub fn type_d_e0(n: usize) -> ExactMatrix {
    let mut e0 = ExactMatrix::zero(n, n);
    for i in 0..n {
        // 1-based: E0(i, n+1-i) = (-1)^(n+1-i) = (-1)^(n-i0) with i = i0+1.
        let sign = if (n - i) % 2 == 0 { 1 } else { -1 };
        e0.set(i, n - 1 - i, QuadScalar::from_int(sign));
    }
    e0
}

/// A flag of nested subspaces: the first k columns of `basis` span the
/// rank-k member, for each k in `ranks`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    pub ambient: usize,
    pub ranks: Vec<usize>,
    pub basis: ExactMatrix,
}

impl Flag {
    pub fn from_matrix(basis: ExactMatrix, ranks: Vec<usize>) -> Result<Self, LinalgError> {
        if !ranks.windows(2).all(|w| w[0] < w[1]) {
            return Err(LinalgError::DimensionMismatch("ranks must strictly increase"));
        }
        if let Some(&max) = ranks.last() {
            if max > basis.cols() {
                return Err(LinalgError::DimensionMismatch("rank exceeds basis width"));
            }
            for &k in &ranks {
                if basis.leading_columns(k).rank() != k {
                    return Err(LinalgError::RankDeficient("leading columns"));
                }
            }
        }
        Ok(Flag { ambient: basis.rows(), ranks, basis })
    }

    pub fn subspace(&self, k: usize) -> ExactMatrix {
        assert!(self.ranks.contains(&k), "rank {k} not in flag");
        self.basis.leading_columns(k)
    }

    pub fn plucker_at(&self, k: usize) -> PluckerVector {
        plucker_vector(&self.subspace(k)).expect("flag dimensions")
    }
}

/// Intersect every flag member with span(e_a..e_b) (1-based, inclusive) and
/// re-express in the interval's own coordinates. Duplicate ranks collapse;
/// zero-dimensional intersections vanish from the rank list.
pub fn intersect_with_interval(f: &Flag, a: usize, b: usize) -> Result<Flag, LinalgError> {
    if a < 1 || b > f.ambient || a > b {
        return Err(LinalgError::EmptyInterval);
    }
    let window: Vec<usize> = (a - 1..b).collect();
    let outside: Vec<usize> = (0..f.ambient).filter(|i| !window.contains(i)).collect();
    let w = window.len();
    let mut cols: Vec<Vec<QuadScalar>> = Vec::new();
    let mut ranks: Vec<usize> = Vec::new();
    for &k in &f.ranks {
        let u = f.basis.leading_columns(k);
        // Combinations of basis columns supported inside the window: kernel
        // of the rows outside it.
        let coeffs = u
            .submatrix(&outside, &(0..k).collect::<Vec<_>>())
            .kernel();
        let inter = u.mul(&coeffs).submatrix(&window, &(0..coeffs.cols()).collect::<Vec<_>>());
        // Extend the nested basis; nesting of the inputs makes the leading
        // prefix span each intersection exactly.
        for j in 0..inter.cols() {
            let cand = inter.col(j);
            let mut trial = cols.clone();
            trial.push(cand.clone());
            if ExactMatrix::from_cols(trial.clone()).rank() == trial.len() {
                cols.push(cand);
            }
        }
        if cols.len() > ranks.last().copied().unwrap_or(0) {
            ranks.push(cols.len());
        }
    }
    let basis = if cols.is_empty() {
        ExactMatrix::zero(w, 0)
    } else {
        ExactMatrix::from_cols(cols)
    };
    Flag::from_matrix(basis, ranks)
}

/// Span equality of two column spans.
pub fn same_span(a: &ExactMatrix, b: &ExactMatrix) -> bool {
    if a.rows() != b.rows() {
        return false;
    }
    let ra = a.rank();
    let rb = b.rank();
    ra == rb && a.hstack(b).rank() == ra
}
