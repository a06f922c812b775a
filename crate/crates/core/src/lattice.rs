//! Finite-index sublattices `A·Z^d` of `Z^d`.
//!
//! Every lattice is stored through its column-style Hermite normal form:
//! lower triangular, positive diagonal, and each entry left of the diagonal
//! reduced into `[0, H(i,i))`. Two bases span the same lattice exactly when
//! their canonical matrices coincide.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::int::ext_gcd;

/// Upper bound on the number of points any enumeration in this crate will produce.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("ragged or empty matrix rows")]
    Ragged,
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("unsupported dimension {0} (shortest vectors need d <= 4)")]
    UnsupportedDimension(usize),
    #[error("enumeration of {count} points exceeds the limit of {limit}")]
    TooLarge { count: BigInt, limit: u64 },
}

/// A dense integer matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(LatticeError::Ragged);
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<BigInt>]) -> Result<Self, LatticeError> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || columns.iter().any(|col| col.len() != r) {
            return Err(LatticeError::Ragged);
        }
        let mut m = IntMatrix::zeros(r, c);
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.data[i * c + j] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, v) in entries.iter().enumerate() {
            m.data[i * n + i] = v.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &BigInt> {
        self.data.iter()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.cols != other.rows {
            return Err(LatticeError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += self.get(r, k) * other.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt, LatticeError> {
        if !self.is_square() {
            return Err(LatticeError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    fn col_combine(&mut self, i: usize, j: usize, coeffs: [&BigInt; 4]) {
        // new_i = a*col_i + b*col_j ; new_j = c*col_i + d*col_j
        let [a, b, c, d] = coeffs;
        for r in 0..self.rows {
            let ci = self.get(r, i).clone();
            let cj = self.get(r, j).clone();
            self.set(r, i, a * &ci + b * &cj);
            self.set(r, j, c * &ci + d * &cj);
        }
    }

    fn col_axpy(&mut self, target: usize, factor: &BigInt, source: usize) {
        // col_target += factor * col_source
        for r in 0..self.rows {
            let v = self.get(r, target) + factor * self.get(r, source);
            self.set(r, target, v);
        }
    }

    fn col_negate(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = -self.get(r, c);
            self.set(r, c, v);
        }
    }
}

impl<const R: usize, const C: usize> From<[[i64; C]; R]> for IntMatrix {
    fn from(rows: [[i64; C]; R]) -> Self {
        IntMatrix {
            rows: R,
            cols: C,
            data: rows.iter().flatten().map(|&v| BigInt::from(v)).collect(),
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (c, v) in self.row(r).iter().enumerate() {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Column HNF of a `d×n` matrix of rank `d`. Returns `(H, U)` with `M·U = H`,
/// `U` unimodular, the first `d` columns of `H` canonical and the rest zero.
fn column_hnf(m: &IntMatrix) -> Result<(IntMatrix, IntMatrix), LatticeError> {
    let d = m.rows();
    let n = m.cols();
    if n < d {
        return Err(LatticeError::SingularMatrix);
    }
    let mut h = m.clone();
    let mut u = IntMatrix::identity(n);
    for i in 0..d {
        for j in i + 1..n {
            if h.get(i, j).is_zero() {
                continue;
            }
            let a = h.get(i, i).clone();
            let b = h.get(i, j).clone();
            let (g, s, t) = ext_gcd(&a, &b);
            let c = -(&b / &g);
            let dd = &a / &g;
            h.col_combine(i, j, [&s, &t, &c, &dd]);
            u.col_combine(i, j, [&s, &t, &c, &dd]);
        }
        if h.get(i, i).is_zero() {
            return Err(LatticeError::SingularMatrix);
        }
        if h.get(i, i).is_negative() {
            h.col_negate(i);
            u.col_negate(i);
        }
        for j in 0..i {
            let q = h.get(i, j).div_floor(h.get(i, i));
            if !q.is_zero() {
                let neg = -q;
                h.col_axpy(j, &neg, i);
                u.col_axpy(j, &neg, i);
            }
        }
    }
    Ok((h, u))
}

/// Canonical basis of a full-rank sublattice of `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeBasis {
    hnf: IntMatrix,
}

/// Result of [`hnf`]: the canonical basis and the unimodular `U` with `M·U = H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub basis: LatticeBasis,
    pub transform: IntMatrix,
}

/// Result of [`hnf_of_generators`]: `transform` is `n×n` and its first `d`
/// columns express the canonical basis columns in the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorHnf {
    pub basis: LatticeBasis,
    pub transform: IntMatrix,
}

pub fn hnf(m: &IntMatrix) -> Result<Hnf, LatticeError> {
    if !m.is_square() {
        return Err(LatticeError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let (h, u) = column_hnf(m)?;
    Ok(Hnf {
        basis: LatticeBasis { hnf: h },
        transform: u,
    })
}

/// HNF of the lattice spanned by the columns of a `d×n` generator matrix.
pub fn hnf_of_generators(m: &IntMatrix) -> Result<GeneratorHnf, LatticeError> {
    let d = m.rows();
    let (h, u) = column_hnf(m)?;
    let mut basis = IntMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            basis.set(r, c, h.get(r, c).clone());
        }
    }
    Ok(GeneratorHnf {
        basis: LatticeBasis { hnf: basis },
        transform: u,
    })
}

impl LatticeBasis {
    pub fn from_matrix(m: &IntMatrix) -> Result<Self, LatticeError> {
        Ok(hnf(m)?.basis)
    }

    pub fn diagonal(entries: &[BigInt]) -> Result<Self, LatticeError> {
        LatticeBasis::from_matrix(&IntMatrix::diagonal(entries))
    }

    pub fn dim(&self) -> usize {
        self.hnf.rows()
    }

    /// The canonical (HNF) matrix.
    pub fn matrix(&self) -> &IntMatrix {
        &self.hnf
    }

    pub fn column(&self, k: usize) -> Vec<BigInt> {
        self.hnf.column(k)
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.dim()).map(|k| self.column(k)).collect()
    }

    /// `|det|`, the index of the lattice in `Z^d`.
    pub fn det(&self) -> BigInt {
        (0..self.dim()).map(|i| self.hnf.get(i, i).clone()).product()
    }

    pub fn diag(&self, i: usize) -> &BigInt {
        self.hnf.get(i, i)
    }

    /// Coordinates `u` with `H·u = v` when `v` lies in the lattice.
    pub fn member(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        if v.len() != self.dim() {
            return None;
        }
        let d = self.dim();
        let mut u: Vec<BigInt> = Vec::with_capacity(d);
        for i in 0..d {
            let mut rest = v[i].clone();
            for (j, uj) in u.iter().enumerate() {
                rest -= self.hnf.get(i, j) * uj;
            }
            let (q, r) = rest.div_mod_floor(self.hnf.get(i, i));
            if !r.is_zero() {
                return None;
            }
            u.push(q);
        }
        Some(u)
    }

    pub fn is_member(&self, v: &[BigInt]) -> bool {
        self.member(v).is_some()
    }

    /// `true` iff `other ⊆ self`.
    pub fn contains(&self, other: &LatticeBasis) -> Result<bool, LatticeError> {
        if self.dim() != other.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok((0..other.dim()).all(|k| self.is_member(&other.column(k))))
    }

    /// The unique representative of `v + L` in the fundamental box of the HNF.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let d = self.dim();
        let mut out = v.to_vec();
        for i in 0..d {
            let q = out[i].div_floor(self.hnf.get(i, i));
            if q.is_zero() {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate().skip(i) {
                *o -= &q * self.hnf.get(r, i);
            }
        }
        out
    }

    /// One representative per coset of the lattice, in lexicographic order.
    pub fn coset_reps(&self) -> Result<Vec<Vec<BigInt>>, LatticeError> {
        let count = self.det();
        if count > BigInt::from(ENUMERATION_LIMIT) {
            return Err(LatticeError::TooLarge {
                count,
                limit: ENUMERATION_LIMIT,
            });
        }
        let d = self.dim();
        let bounds: Vec<BigInt> = (0..d).map(|i| self.diag(i).clone()).collect();
        let total = count.to_usize().expect("bounded by the enumeration limit");
        let mut out = Vec::with_capacity(total);
        let mut cur = vec![BigInt::zero(); d];
        loop {
            out.push(cur.clone());
            let mut k = d;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                cur[k] += 1;
                if cur[k] < bounds[k] {
                    break;
                }
                cur[k] = BigInt::zero();
            }
        }
    }

    /// `m_k(L) = min{m >= 1 : m·e_k ∈ L}`, from the denominators of `L⁻¹ e_k`.
    pub fn min_multiple(&self, axis: usize) -> Result<BigInt, LatticeError> {
        let d = self.dim();
        if axis >= d {
            return Err(LatticeError::AxisOutOfRange { axis, dim: d });
        }
        let mut u: Vec<BigRational> = Vec::with_capacity(d);
        for i in 0..d {
            let mut rest = if i == axis {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            for (j, uj) in u.iter().enumerate() {
                rest -= BigRational::from_integer(self.hnf.get(i, j).clone()) * uj;
            }
            u.push(rest / BigRational::from_integer(self.hnf.get(i, i).clone()));
        }
        Ok(u.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom())))
    }

    /// Scans `m = 1, 2, …, limit` for the least `m` with `m·e_k` in the lattice.
    pub fn min_multiple_by_scan(&self, axis: usize, limit: u64) -> Option<BigInt> {
        let d = self.dim();
        if axis >= d {
            return None;
        }
        let mut v = vec![BigInt::zero(); d];
        for m in 1..=limit {
            v[axis] = BigInt::from(m);
            if self.is_member(&v) {
                return Some(v[axis].clone());
            }
        }
        None
    }

    /// A nonzero lattice vector of minimal Euclidean norm. Among vectors of
    /// equal norm the lexicographically greatest is returned, so `diag(2,2)`
    /// yields `(2,0)` rather than `(0,2)` or `(-2,0)`.
    pub fn shortest_vector(&self) -> Result<Vec<BigInt>, LatticeError> {
        match self.dim() {
            2 => Ok(gauss_shortest(&self.column(0), &self.column(1))),
            1 | 3 | 4 => self.shortest_vector_by_enumeration(),
            d => Err(LatticeError::UnsupportedDimension(d)),
        }
    }

    /// Exhaustive search over every lattice point in the cube `|v_i| <= r`,
    /// where `r²` is the squared length of the shortest HNF column.
    pub fn shortest_vector_by_enumeration(&self) -> Result<Vec<BigInt>, LatticeError> {
        let d = self.dim();
        if d > 4 {
            return Err(LatticeError::UnsupportedDimension(d));
        }
        let bound_sq = self
            .columns()
            .iter()
            .map(|c| norm_sq(c))
            .min()
            .expect("dimension is at least 1");
        let radius = bound_sq.sqrt();
        let mut best: Option<(BigInt, Vec<BigInt>)> = None;
        let mut partial = vec![BigInt::zero(); d];
        let mut budget = ENUMERATION_LIMIT;
        self.enumerate_box(0, &radius, &mut partial, &mut best, &mut budget)?;
        Ok(best.expect("basis columns lie inside the search box").1)
    }

    fn enumerate_box(
        &self,
        level: usize,
        radius: &BigInt,
        v: &mut Vec<BigInt>,
        best: &mut Option<(BigInt, Vec<BigInt>)>,
        budget: &mut u64,
    ) -> Result<(), LatticeError> {
        let d = self.dim();
        if level == d {
            if v.iter().all(Zero::is_zero) {
                return Ok(());
            }
            let n = norm_sq(v);
            let better = match best {
                None => true,
                Some((bn, bv)) => n < *bn || (n == *bn && *v > *bv),
            };
            if better {
                *best = Some((n, v.clone()));
            }
            return Ok(());
        }
        // v[level..] currently holds the contribution of earlier coordinates.
        let diag = self.diag(level).clone();
        let base = v[level].clone();
        let lo = (-radius - &base).div_ceil(&diag);
        let hi = (radius - &base).div_floor(&diag);
        let mut c = lo;
        while c <= hi {
            if *budget == 0 {
                return Err(LatticeError::TooLarge {
                    count: BigInt::from(ENUMERATION_LIMIT) + 1,
                    limit: ENUMERATION_LIMIT,
                });
            }
            *budget -= 1;
            let saved: Vec<BigInt> = v[level..].to_vec();
            for r in level..d {
                v[r] += &c * self.hnf.get(r, level);
            }
            self.enumerate_box(level + 1, radius, v, best, budget)?;
            v[level..].clone_from_slice(&saved);
            c += 1;
        }
        Ok(())
    }
}

impl fmt::Display for LatticeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.hnf.fmt(f)
    }
}

pub fn norm_sq(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x * x).sum()
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn round_div(p: &BigInt, q: &BigInt) -> BigInt {
    // nearest integer to p/q for q > 0, halves rounded up
    (BigInt::from(2) * p + q).div_floor(&(BigInt::from(2) * q))
}

fn gauss_shortest(c0: &[BigInt], c1: &[BigInt]) -> Vec<BigInt> {
    let mut b1 = c0.to_vec();
    let mut b2 = c1.to_vec();
    loop {
        if norm_sq(&b1) > norm_sq(&b2) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let mu = round_div(&dot(&b1, &b2), &norm_sq(&b1));
        if mu.is_zero() {
            break;
        }
        for (x, y) in b2.iter_mut().zip(&b1) {
            *x -= &mu * y;
        }
    }
    let sum: Vec<BigInt> = b1.iter().zip(&b2).map(|(x, y)| x + y).collect();
    let diff: Vec<BigInt> = b1.iter().zip(&b2).map(|(x, y)| x - y).collect();
    let mut candidates = Vec::with_capacity(8);
    for v in [b1, b2, sum, diff] {
        let neg: Vec<BigInt> = v.iter().map(|x| -x).collect();
        candidates.push(v);
        candidates.push(neg);
    }
    candidates
        .into_iter()
        .map(|v| (norm_sq(&v), v))
        .min_by(|(na, va), (nb, vb)| na.cmp(nb).then_with(|| vb.cmp(va)))
        .expect("eight candidates")
        .1
}

/// `M = Δ·Â` with `Δ` the diagonal of positive row gcds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagFactorization {
    pub delta: IntMatrix,
    pub ahat: IntMatrix,
}

impl DiagFactorization {
    pub fn delta_entry(&self, k: usize) -> &BigInt {
        self.delta.get(k, k)
    }
}

pub fn diag_factor(m: &IntMatrix) -> Result<DiagFactorization, LatticeError> {
    if m.det()?.is_zero() {
        return Err(LatticeError::SingularMatrix);
    }
    let d = m.rows();
    let mut delta = IntMatrix::zeros(d, d);
    let mut ahat = IntMatrix::zeros(d, d);
    for r in 0..d {
        let g = m.row(r).iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        for c in 0..d {
            ahat.set(r, c, m.get(r, c) / &g);
        }
        delta.set(r, r, g);
    }
    Ok(DiagFactorization { delta, ahat })
}
