//! Exact integer linear algebra over `i64` with checked arithmetic.
//!
//! Every operation that can overflow returns [`LatticeError::Overflow`]
//! instead of wrapping. The Smith form falls back to arbitrary precision
//! when the `i64` elimination overflows, since its transforms can grow far
//! beyond the size of the input before they shrink again.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod wide;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("matrix must be square but is {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rows cannot be completed to a unimodular matrix (invariant factors {factors:?})")]
    NotCompletable { factors: Vec<i64> },
}

pub type Result<T> = std::result::Result<T, LatticeError>;

#[inline]
pub(crate) fn cmul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(LatticeError::Overflow)
}

#[inline]
pub(crate) fn cadd(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(LatticeError::Overflow)
}

#[inline]
pub(crate) fn cneg(a: i64) -> Result<i64> {
    a.checked_neg().ok_or(LatticeError::Overflow)
}

/// Non-negative gcd; `gcd(0, 0) = 0`.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn gcd_slice(xs: &[i64]) -> i64 {
    xs.iter().fold(0, |g, &x| gcd(g, x))
}

/// Extended gcd: `(g, s, t)` with `a*s + c*t = g = gcd(a, c) >= 0`.
///
/// Among all Bezout pairs the one with minimal `|s|` is returned, ties
/// broken towards `s >= 0`. When `c = 0` the coefficient `t` is free and
/// is fixed to zero.
pub fn gcd_ext(a: i64, c: i64) -> (i64, i64, i64) {
    if a == 0 && c == 0 {
        return (0, 0, 0);
    }
    if a == 0 {
        return (c.abs(), 0, c.signum());
    }
    if c == 0 {
        return (a.abs(), a.signum(), 0);
    }
    const SMALL: i64 = 1 << 31;
    if a.abs() < SMALL && c.abs() < SMALL {
        let (g, s, t) = gcd_ext_in::<i64>(a, c);
        return (g, s, t);
    }
    // i128 keeps extreme inputs clear of overflow
    let (g, s, t) = gcd_ext_in::<i128>(a as i128, c as i128);
    (g as i64, s as i64, t as i64)
}

fn gcd_ext_in<T>(a: T, c: T) -> (T, T, T)
where
    T: Copy
        + PartialOrd
        + From<i8>
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<Output = T>
        + std::ops::Div<Output = T>
        + std::ops::Rem<Output = T>
        + std::ops::Neg<Output = T>,
{
    let zero = T::from(0);
    let abs = |x: T| if x < zero { -x } else { x };
    let (mut r0, mut r1) = (a, c);
    let (mut s0, mut s1) = (T::from(1), zero);
    while r1 != zero {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 < zero {
        r0 = -r0;
        s0 = -s0;
    }
    let g = r0;
    // all solutions: s = s0 + (c/g) x; t follows from s
    let step = abs(c / g);
    let mut s = s0 % step;
    if s < zero {
        s = s + step;
    }
    // ties between s and s - step keep the non-negative one
    if s > step - s {
        s = s - step;
    }
    let t = (g - a * s) / c;
    debug_assert!(a * s + c * t == g);
    (g, s, t)
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LatticeError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equally long rows. An empty slice gives a 0x0 matrix.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LatticeError::DimensionMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Rows picked by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self { rows: idx.len(), cols: self.cols, data }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(LatticeError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0i64;
                for k in 0..self.cols {
                    acc = cadd(acc, cmul(self.get(i, k), other.get(k, j))?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v * self`.
    pub fn left_apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.rows {
            return Err(LatticeError::DimensionMismatch(format!(
                "vector of length {} against {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut out = vec![0i64; self.cols];
        for (k, &vk) in v.iter().enumerate() {
            if vk == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = cadd(*o, cmul(vk, self.get(k, j))?)?;
            }
        }
        Ok(out)
    }

    /// Matrix times column vector: `self * v`.
    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(LatticeError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .try_fold(0i64, |acc, (&a, &b)| cadd(acc, cmul(a, b)?))
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: i64) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        for j in 0..self.cols {
            let v = cadd(self.get(dst, j), cmul(q, self.get(src, j))?)?;
            self.set(dst, j, v);
        }
        Ok(())
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: i64) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        for i in 0..self.rows {
            let v = cadd(self.get(i, dst), cmul(q, self.get(i, src))?)?;
            self.set(i, dst, v);
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) -> Result<()> {
        for j in 0..self.cols {
            let v = cneg(self.get(i, j))?;
            self.set(i, j, v);
        }
        Ok(())
    }

}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_vector(self.row(i)))?;
        }
        write!(f, "]")
    }
}

/// `(1,-2,3)` style rendering used throughout the CLI.
pub fn format_vector(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> Result<i64> {
    if !m.is_square() {
        return Err(LatticeError::NonSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<i128>> = m.to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j]
                    .checked_mul(a[k][k])
                    .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                    .ok_or(LatticeError::Overflow)?;
                a[i][j] = num / prev;
            }
        }
        prev = a[k][k];
    }
    i64::try_from(sign * a[n - 1][n - 1]).map_err(|_| LatticeError::Overflow)
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` in Smith form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, kept because unimodular completion reads rows off it.
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    /// The diagonal `d_1 | d_2 | ...`, including trailing zeros up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i)).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|&&x| x != 0).count()
    }

    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<i64> {
        self.diagonal().into_iter().take_while(|&x| x != 0).collect()
    }

    /// `Z^cols / rowspace(A)`.
    pub fn cokernel(&self) -> AbelianGroup {
        let factors = self.invariant_factors();
        AbelianGroup {
            free_rank: self.d.cols - factors.len(),
            torsion: factors.into_iter().filter(|&x| x > 1).collect(),
        }
    }
}

/// Smith normal form `U A V = D`.
///
/// Elimination with the smallest nonzero entry as pivot, in `i64`. If that
/// overflows, the decomposition is recomputed with arbitrary precision and
/// reduced transforms; `Overflow` means even those do not fit.
pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithDecomposition> {
    match smith_by_pivoting(m) {
        Err(LatticeError::Overflow) => {
            let w = wide::smith(&m.to_rows(), m.rows, m.cols).ok_or(LatticeError::Overflow)?;
            let square = |rows: Vec<Vec<i64>>, n: usize| IntMatrix::from_vec(n, n, rows.concat());
            Ok(SmithDecomposition {
                u: square(w.u, m.rows)?,
                d: IntMatrix::from_vec(m.rows, m.cols, w.d.concat())?,
                v: square(w.v, m.cols)?,
                v_inv: square(w.v_inv, m.cols)?,
            })
        }
        other => other,
    }
}

fn smith_by_pivoting(m: &IntMatrix) -> Result<SmithDecomposition> {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    // Column operations are mirrored on v (as column ops) and v_inv (as inverse row ops).
    let col_swap = |d: &mut IntMatrix, v: &mut IntMatrix, vi: &mut IntMatrix, a: usize, b: usize| {
        d.swap_cols(a, b);
        v.swap_cols(a, b);
        vi.swap_rows(a, b);
    };

    for t in 0..rows.min(cols) {
        loop {
            // smallest |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = d.get(i, j);
                    if x != 0 && best.is_none_or(|(bi, bj)| x.unsigned_abs() < d.get(bi, bj).unsigned_abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Ok(SmithDecomposition { u, d, v, v_inv });
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            col_swap(&mut d, &mut v, &mut v_inv, t, pj);

            let p = d.get(t, t);
            let mut dirty = false;
            for i in t + 1..rows {
                let q = d.get(i, t) / p;
                if q != 0 {
                    d.add_row_multiple(i, t, -q)?;
                    u.add_row_multiple(i, t, -q)?;
                }
                dirty |= d.get(i, t) != 0;
            }
            for j in t + 1..cols {
                let q = d.get(t, j) / p;
                if q != 0 {
                    d.add_col_multiple(j, t, -q)?;
                    v.add_col_multiple(j, t, -q)?;
                    v_inv.add_row_multiple(t, j, q)?;
                }
                dirty |= d.get(t, j) != 0;
            }
            if dirty {
                continue;
            }
            // pivot isolated; enforce divisibility of the remaining block
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| d.get(i, j) % p != 0));
            if let Some(i) = bad {
                d.add_row_multiple(t, i, 1)?;
                u.add_row_multiple(t, i, 1)?;
                continue;
            }
            if p < 0 {
                d.negate_row(t)?;
                u.negate_row(t)?;
            }
            break;
        }
    }
    Ok(SmithDecomposition { u, d, v, v_inv })
}

/// Finitely generated abelian group `Z^free_rank + Z_{t1} + ... `, `t1 | t2 | ...`, all `t_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        Self { free_rank: 0, torsion: Vec::new() }
    }

    /// `Z_n`; `n = 0` gives `Z` and `n = +-1` the trivial group.
    pub fn cyclic(n: i64) -> Self {
        match n.unsigned_abs() {
            0 => Self { free_rank: 1, torsion: Vec::new() },
            1 => Self::trivial(),
            k => Self { free_rank: 0, torsion: vec![k as i64] },
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of a finite group, `None` if infinite.
    pub fn order(&self) -> Option<i64> {
        self.is_finite().then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z_{t}")));
        write!(f, "{}", parts.join(" x "))
    }
}

/// `Z^cols / rowspace(m)`.
pub fn quotient_group(m: &IntMatrix) -> Result<AbelianGroup> {
    Ok(smith_normal_form(m)?.cokernel())
}

/// Row-style Hermite normal form: echelon, positive pivots, entries above
/// each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hermite_rows(m: &IntMatrix) -> Result<IntMatrix> {
    let mut h = m.clone();
    let mut r = 0;
    for c in 0..h.cols {
        if r == h.rows {
            break;
        }
        loop {
            let pivot = (r..h.rows)
                .filter(|&i| h.get(i, c) != 0)
                .min_by_key(|&i| h.get(i, c).unsigned_abs());
            let Some(pi) = pivot else { break };
            h.swap_rows(r, pi);
            let p = h.get(r, c);
            let mut done = true;
            for i in r + 1..h.rows {
                let q = h.get(i, c) / p;
                h.add_row_multiple(i, r, -q)?;
                done &= h.get(i, c) == 0;
            }
            if done {
                break;
            }
        }
        if h.get(r, c) == 0 {
            continue;
        }
        if h.get(r, c) < 0 {
            h.negate_row(r)?;
        }
        let p = h.get(r, c);
        for i in 0..r {
            let q = h.get(i, c).div_euclid(p);
            h.add_row_multiple(i, r, -q)?;
        }
        r += 1;
    }
    Ok(h.select_rows(&(0..r).collect::<Vec<_>>()))
}

/// Extends `rows` (k primitive n-vectors, k <= n) to an n x n matrix of
/// determinant +-1 whose first k rows are the inputs.
///
/// Standard basis vectors are appended greedily in index order while the
/// partial set stays extendable; if that stalls, the remaining rows are
/// taken from the Smith decomposition and put in Hermite form.
pub fn unimodular_complete(rows: &[Vec<i64>]) -> Result<IntMatrix> {
    let n = match rows.first() {
        Some(r) => r.len(),
        None => return Err(LatticeError::DimensionMismatch("no rows to complete".into())),
    };
    if rows.len() > n {
        return Err(LatticeError::DimensionMismatch(format!("{} rows in dimension {n}", rows.len())));
    }
    let a = IntMatrix::from_rows(rows)?;
    let snf = smith_normal_form(&a)?;
    let diag = snf.diagonal();
    if diag.iter().any(|&x| x != 1) {
        return Err(LatticeError::NotCompletable { factors: diag });
    }

    let mut current: Vec<Vec<i64>> = rows.to_vec();
    for j in 0..n {
        if current.len() == n {
            break;
        }
        let mut e = vec![0; n];
        e[j] = 1;
        current.push(e);
        let ok = smith_normal_form(&IntMatrix::from_rows(&current)?)?.diagonal().iter().all(|&x| x == 1);
        if !ok {
            current.pop();
        }
    }
    if current.len() < n {
        let partial = IntMatrix::from_rows(&current)?;
        let snf = smith_normal_form(&partial)?;
        let k = current.len();
        let tail = snf.v_inv.select_rows(&(k..n).collect::<Vec<_>>());
        let tail = hermite_rows(&tail)?;
        current.extend(tail.to_rows());
    }
    let out = IntMatrix::from_rows(&current)?;
    debug_assert_eq!(determinant(&out).map(|d| d.abs()), Ok(1));
    Ok(out)
}

/// Basis of `{ v in Z^cols : m v = 0 }` in Hermite form (each vector primitive).
pub fn integer_kernel(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    kernel_basis(&smith_normal_form(m)?, m.cols)
}

/// [`integer_kernel`] from an existing Smith decomposition of a matrix with `cols` columns.
pub fn kernel_basis(snf: &SmithDecomposition, cols: usize) -> Result<Vec<Vec<i64>>> {
    let rank = snf.rank();
    if rank == cols {
        return Ok(Vec::new());
    }
    let basis: Vec<Vec<i64>> = (rank..cols).map(|j| snf.v.column(j)).collect();
    Ok(hermite_rows(&IntMatrix::from_rows(&basis)?)?.to_rows())
}

/// Inverse of a unimodular square matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    if !m.is_square() {
        return Err(LatticeError::NonSquare { rows: m.rows, cols: m.cols });
    }
    let snf = smith_normal_form(m)?;
    if snf.diagonal().iter().any(|&x| x != 1) {
        return Err(LatticeError::NotCompletable { factors: snf.diagonal() });
    }
    // U M V = I  =>  M^{-1} = V U
    snf.v.mul(&snf.u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn gcd_ext_examples() {
        assert_eq!(gcd_ext(0, 5), (5, 0, 1));
        assert_eq!(gcd_ext(3, 2), (1, 1, -1));
        assert_eq!(gcd_ext(12, 8), (4, 1, -1));
        assert_eq!(gcd_ext(0, 0), (0, 0, 0));
        assert_eq!(gcd_ext(-3, 0), (3, -1, 0));
        assert_eq!(gcd_ext(0, -7), (7, 0, -1));
    }

    #[test]
    fn gcd_ext_minimal_s_by_enumeration() {
        for a in -15i64..=15 {
            for c in -15i64..=15 {
                let (g, s, t) = gcd_ext(a, c);
                assert_eq!(a * s + c * t, g);
                assert_eq!(g, gcd(a, c));
                if c == 0 {
                    continue;
                }
                // brute force the minimal |s| (ties to s >= 0)
                let best = (-40i64..=40)
                    .filter(|&s2| (g - a * s2) % c == 0)
                    .min_by_key(|&s2| (s2.abs(), s2 < 0))
                    .unwrap();
                assert_eq!(s, best, "a={a} c={c}");
            }
        }
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&IntMatrix::identity(4)).unwrap(), 1);
        for k in -5..=5 {
            assert_eq!(determinant(&mat(&[&[1, 0], &[k, 1]])).unwrap(), 1);
        }
        // reparametrization matrix of the effective T^4 action
        for (a, b, c, d, k, l, m, n) in [(3, 1, 2, 1, 0, 0, 1, -1), (1, 1, 1, 1, 4, -2, 1, 0), (2, 5, 3, 7, 1, 1, 2, -1)] {
            let w = mat(&[&[0, 1, 0, 0], &[0, 0, 0, 1], &[-n, k, m, l], &[a, b, c, d]]);
            assert_eq!(determinant(&w).unwrap(), a * m + c * n);
        }
        assert!(matches!(determinant(&mat(&[&[1, 2, 3]])), Err(LatticeError::NonSquare { .. })));
        assert_eq!(determinant(&mat(&[&[0, 1], &[1, 0]])).unwrap(), -1);
        assert_eq!(determinant(&mat(&[&[2, 0, 0], &[0, 0, 3], &[0, 5, 0]])).unwrap(), -30);
    }

    #[test]
    fn snf_examples() {
        let snf = smith_normal_form(&IntMatrix::identity(3)).unwrap();
        assert_eq!(snf.invariant_factors(), vec![1, 1, 1]);
        let snf = smith_normal_form(&mat(&[&[2, 4]])).unwrap();
        assert_eq!(snf.invariant_factors(), vec![2]);
        for (p, q, r, x, y, z) in [(1, 1, 2, 1, 1, 4), (3, -2, 6, 5, 1, 9), (0, 0, 0, 0, 0, 5), (1, 2, 0, 3, 4, 0)] {
            let m = mat(&[&[1, 0, 0], &[0, 1, 0], &[p, q, r], &[x, y, z]]);
            let snf = smith_normal_form(&m).unwrap();
            let g = gcd(r, z);
            let mut expect = vec![1, 1];
            if g != 0 {
                expect.push(g);
            }
            assert_eq!(snf.invariant_factors(), expect);
        }
    }

    #[test]
    fn snf_identities_hold() {
        let m = mat(&[&[6, 4, 2], &[3, -9, 12], &[0, 8, 14], &[1, 1, 1]]);
        let snf = smith_normal_form(&m).unwrap();
        assert_eq!(snf.u.mul(&m).unwrap().mul(&snf.v).unwrap(), snf.d);
        assert_eq!(snf.v.mul(&snf.v_inv).unwrap(), IntMatrix::identity(3));
        assert_eq!(determinant(&snf.u).unwrap().abs(), 1);
    }

    #[test]
    fn overflow_is_reported() {
        let big = i64::MAX / 2;
        let m = mat(&[&[big, big], &[big, big]]);
        let sq = m.mul(&m);
        assert_eq!(sq, Err(LatticeError::Overflow));
    }

    #[test]
    fn unimodular_complete_examples() {
        let c = unimodular_complete(&[vec![1, 0, 0]]).unwrap();
        assert_eq!(c, IntMatrix::identity(3));
        let c = unimodular_complete(&[vec![2, 3]]).unwrap();
        assert_eq!(c.row(0), &[2, 3]);
        assert_eq!(determinant(&c).unwrap().abs(), 1);
        assert!(matches!(unimodular_complete(&[vec![2, 4]]), Err(LatticeError::NotCompletable { .. })));
        // coordinate subtori are completed by the remaining coordinate axes, in order
        let c = unimodular_complete(&[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).unwrap();
        assert_eq!(c.to_rows()[2..], [vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
    }

    #[test]
    fn kernel_examples() {
        assert!(integer_kernel(&IntMatrix::identity(2)).unwrap().is_empty());
        let k = integer_kernel(&mat(&[&[3, 5]])).unwrap();
        assert_eq!(k, vec![vec![5, -3]]);
        let m = mat(&[&[1, 1, 2]]);
        let k = integer_kernel(&m).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(m.apply(v).unwrap(), vec![0]);
            assert_eq!(gcd_slice(v), 1);
        }
    }

    #[test]
    fn hermite_is_canonical_for_a_lattice() {
        let a = mat(&[&[1, 1, -1], &[0, 2, 1]]);
        let b = mat(&[&[1, 3, 0], &[-1, -1, 1]]); // same lattice, other basis
        assert_eq!(hermite_rows(&a).unwrap(), hermite_rows(&b).unwrap());
    }

    #[test]
    fn group_display() {
        assert_eq!(AbelianGroup::trivial().to_string(), "1");
        assert_eq!(AbelianGroup::cyclic(2).to_string(), "Z_2");
        assert_eq!(AbelianGroup::cyclic(0).to_string(), "Z");
        assert_eq!(AbelianGroup { free_rank: 2, torsion: vec![2, 6] }.to_string(), "Z^2 x Z_2 x Z_6");
    }
}
