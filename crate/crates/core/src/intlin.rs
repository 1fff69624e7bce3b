//! Exact integer matrices: Smith normal form, integral solvability and an
//! independent invariant-factor oracle based on gcds of minors.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Largest `min(rows, cols)` accepted by [`minor_gcd_factors`].
pub const MINOR_ORACLE_LIMIT: usize = 6;
/// Largest `max(rows, cols)` accepted by [`minor_gcd_factors`].
pub const MINOR_ORACLE_MAX_SIDE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("malformed matrix: {rows}x{cols} requires {expected} entries, found {found}")]
    Malformed {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(
        "minor oracle accepts min side <= {MINOR_ORACLE_LIMIT} and max side <= {MINOR_ORACLE_MAX_SIDE}, got {rows}x{cols}; use snf"
    )]
    OracleLimit { rows: usize, cols: usize },
}

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LinAlgError> {
        if entries.len() != rows * cols {
            return Err(LinAlgError::Malformed {
                rows,
                cols,
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from a list of rows. The column count of an empty list
    /// is zero; ragged input is rejected.
    pub fn from_rows<T: Clone + Into<BigInt>>(rows: &[Vec<T>]) -> Result<Self, LinAlgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinAlgError::Malformed {
                    rows: rows.len(),
                    cols,
                    expected: rows.len() * cols,
                    found: rows.iter().map(Vec::len).sum(),
                });
            }
            entries.extend(row.iter().cloned().map(Into::into));
        }
        Self::new(rows.len(), cols, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Square diagonal matrix.
    pub fn diagonal(diag: &[BigInt]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * n + i] = d.clone();
        }
        m
    }

    pub fn column_vector(values: Vec<BigInt>) -> Self {
        IntMatrix {
            rows: values.len(),
            cols: 1,
            entries: values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, LinAlgError> {
        if self.cols != rhs.rows {
            return Err(LinAlgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[self | rhs]`.
    pub fn hconcat(&self, rhs: &IntMatrix) -> Result<IntMatrix, LinAlgError> {
        if self.rows != rhs.rows {
            return Err(LinAlgError::DimensionMismatch(format!(
                "cannot concatenate {} rows with {} rows",
                self.rows, rhs.rows
            )));
        }
        let cols = self.cols + rhs.cols;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            entries.extend_from_slice(self.row(i));
            entries.extend_from_slice(rhs.row(i));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols,
            entries,
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut entries = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            entries.extend_from_slice(self.row(i));
        }
        IntMatrix {
            rows: idx.len(),
            cols: self.cols,
            entries,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> IntMatrix {
        let mut entries = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            entries.extend(idx.iter().map(|&j| self.get(i, j).clone()));
        }
        IntMatrix {
            rows: self.rows,
            cols: idx.len(),
            entries,
        }
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * k).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += q * row[src]
    fn add_row_multiple(&mut self, target: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let delta = q * &self.entries[src * self.cols + j];
            self.entries[target * self.cols + j] += delta;
        }
    }

    /// col[target] += q * col[src]
    fn add_col_multiple(&mut self, target: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let delta = q * &self.entries[i * self.cols + src];
            self.entries[i * self.cols + target] += delta;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let e = &mut self.entries[i * self.cols + j];
            *e = -std::mem::take(e);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let e = &mut self.entries[i * self.cols + j];
            *e = -std::mem::take(e);
        }
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    /// Panics on a dimension mismatch; use [`IntMatrix::checked_mul`] for
    /// untrusted shapes.
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix dimensions agree")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(ToString::to_string).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", cells[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// `u · a · v = s` with unimodular `u`, `v`. The inverses of `u` and `v` are
/// tracked alongside so callers can move between bases without inverting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    /// Nonzero diagonal entries of `s`, in order. Units are kept.
    pub factors: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Full diagonal of `s`, including trailing zeros.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }
}

struct Elimination {
    m: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Elimination {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.m.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.m.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    fn add_row(&mut self, target: usize, src: usize, q: &BigInt) {
        self.m.add_row_multiple(target, src, q);
        self.u.add_row_multiple(target, src, q);
        self.u_inv.add_col_multiple(src, target, &-q);
    }

    fn add_col(&mut self, target: usize, src: usize, q: &BigInt) {
        self.m.add_col_multiple(target, src, q);
        self.v.add_col_multiple(target, src, q);
        self.v_inv.add_row_multiple(src, target, &-q);
    }

    fn negate_row(&mut self, i: usize) {
        self.m.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    fn smallest_in_block(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.m.rows {
            for j in t..self.m.cols {
                let e = self.m.get(i, j);
                if e.is_zero() {
                    continue;
                }
                let a = e.abs();
                if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                    best = Some((i, j, a));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    /// Clears row and column `t` below/right of the pivot with Euclidean
    /// steps. Returns false when a nonzero remainder is left behind.
    fn clear_cross(&mut self, t: usize) -> bool {
        let mut clean = true;
        for i in t + 1..self.m.rows {
            if self.m.get(i, t).is_zero() {
                continue;
            }
            let q = self.m.get(i, t).div_floor(self.m.get(t, t));
            self.add_row(i, t, &-q);
            clean &= self.m.get(i, t).is_zero();
        }
        for j in t + 1..self.m.cols {
            if self.m.get(t, j).is_zero() {
                continue;
            }
            let q = self.m.get(t, j).div_floor(self.m.get(t, t));
            self.add_col(j, t, &-q);
            clean &= self.m.get(t, j).is_zero();
        }
        clean
    }

    fn pull_smallest_of_cross(&mut self, t: usize) {
        let mut best = (t, t, self.m.get(t, t).abs());
        for i in t + 1..self.m.rows {
            let e = self.m.get(i, t);
            if !e.is_zero() && e.abs() < best.2 {
                best = (i, t, e.abs());
            }
        }
        for j in t + 1..self.m.cols {
            let e = self.m.get(t, j);
            if !e.is_zero() && e.abs() < best.2 {
                best = (t, j, e.abs());
            }
        }
        self.swap_rows(t, best.0);
        self.swap_cols(t, best.1);
    }

    fn non_divisible_entry(&self, t: usize) -> Option<usize> {
        let pivot = self.m.get(t, t);
        for i in t + 1..self.m.rows {
            for j in t + 1..self.m.cols {
                if !self.m.get(i, j).is_multiple_of(pivot) {
                    return Some(i);
                }
            }
        }
        None
    }
}

/// Smith normal form by smallest-pivot Euclidean elimination.
pub fn snf(a: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (a.rows, a.cols);
    let mut e = Elimination {
        m: a.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = e.smallest_in_block(t) else {
            break;
        };
        e.swap_rows(t, pi);
        e.swap_cols(t, pj);
        loop {
            if !e.clear_cross(t) {
                e.pull_smallest_of_cross(t);
                continue;
            }
            match e.non_divisible_entry(t) {
                Some(i) => e.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if e.m.get(t, t).is_negative() {
            e.negate_row(t);
        }
        t += 1;
    }
    let factors = (0..t).map(|i| e.m.get(i, i).clone()).collect();
    SmithDecomposition {
        u: e.u,
        s: e.m,
        v: e.v,
        u_inv: e.u_inv,
        v_inv: e.v_inv,
        factors,
    }
}

/// Invariant factors computed only from determinantal divisors:
/// `d_k = g_k / g_{k-1}` where `g_k` is the gcd of all `k x k` minors.
/// Zero factors are omitted.
pub fn minor_gcd_factors(a: &IntMatrix) -> Result<Vec<BigInt>, LinAlgError> {
    let (lo, hi) = (a.rows.min(a.cols), a.rows.max(a.cols));
    if lo > MINOR_ORACLE_LIMIT || hi > MINOR_ORACLE_MAX_SIDE {
        return Err(LinAlgError::OracleLimit {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let mut factors = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=lo {
        let mut g = BigInt::zero();
        for rs in combinations(a.rows, k) {
            for cs in combinations(a.cols, k) {
                let minor: Vec<Vec<BigInt>> = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| a.get(i, j).clone()).collect())
                    .collect();
                g = g.gcd(&laplace_det(&minor));
            }
        }
        if g.is_zero() {
            break;
        }
        factors.push(&g / &prev);
        prev = g;
    }
    Ok(factors)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn laplace_det(m: &[Vec<BigInt>]) -> BigInt {
    match m.len() {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        n => {
            let mut det = BigInt::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][j] * laplace_det(&sub);
                if j % 2 == 0 {
                    det += term;
                } else {
                    det -= term;
                }
            }
            det
        }
    }
}

/// Some integer `x` with `a · x = b`, or `None` if no integral solution exists.
pub fn solve_integral(a: &IntMatrix, b: &IntMatrix) -> Result<Option<IntMatrix>, LinAlgError> {
    if a.rows != b.rows {
        return Err(LinAlgError::DimensionMismatch(format!(
            "system has {} rows but right-hand side has {}",
            a.rows, b.rows
        )));
    }
    let d = snf(a);
    solve_with(&d, a.cols, b)
}

/// Solves `a · x = b` against a precomputed decomposition of `a`.
pub fn solve_with(
    d: &SmithDecomposition,
    unknowns: usize,
    b: &IntMatrix,
) -> Result<Option<IntMatrix>, LinAlgError> {
    // a = u⁻¹ s v⁻¹, so a x = b  <=>  s y = u b with x = v y.
    let ub = d.u.checked_mul(b)?;
    let mut y = IntMatrix::zeros(unknowns, b.cols);
    for j in 0..b.cols {
        for i in 0..ub.rows {
            let c = ub.get(i, j);
            match d.factors.get(i) {
                Some(f) => {
                    let (q, r) = c.div_rem(f);
                    if !r.is_zero() {
                        return Ok(None);
                    }
                    y.set(i, j, q);
                }
                None if !c.is_zero() => return Ok(None),
                None => {}
            }
        }
    }
    Ok(Some(&d.v * &y))
}

/// A basis (full column rank) of the lattice spanned by the columns of `gens`.
pub fn lattice_basis(gens: &IntMatrix) -> IntMatrix {
    let d = snf(gens);
    let idx: Vec<usize> = (0..d.rank()).collect();
    let mut basis = d.u_inv.select_cols(&idx);
    for (j, f) in d.factors.iter().enumerate() {
        for i in 0..basis.rows {
            let e = basis.get(i, j) * f;
            basis.set(i, j, e);
        }
    }
    basis
}

/// A basis of the integer kernel `{x : a · x = 0}`, as columns.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let d = snf(a);
    let idx: Vec<usize> = (d.rank()..a.cols).collect();
    d.v.select_cols(&idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_decomposition(a: &IntMatrix) -> SmithDecomposition {
        let d = snf(a);
        assert_eq!(&(&d.u * a) * &d.v, d.s);
        assert_eq!(&d.u * &d.u_inv, IntMatrix::identity(a.rows()));
        assert_eq!(&d.v * &d.v_inv, IntMatrix::identity(a.cols()));
        d
    }

    #[test]
    fn identity_is_its_own_normal_form() {
        let d = check_decomposition(&IntMatrix::identity(2));
        assert_eq!(d.factors, ints(&[1, 1]));
        assert_eq!(d.s, IntMatrix::identity(2));
    }

    #[test]
    fn small_examples_match_minor_gcds() {
        let a = m(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(check_decomposition(&a).factors, ints(&[2, 4]));
        assert_eq!(minor_gcd_factors(&a).unwrap(), ints(&[2, 4]));

        let b = m(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(check_decomposition(&b).factors, ints(&[1, 2]));
        assert_eq!(minor_gcd_factors(&b).unwrap(), ints(&[1, 2]));
    }

    #[test]
    fn zero_and_empty_matrices() {
        let z = IntMatrix::zeros(3, 3);
        assert!(check_decomposition(&z).factors.is_empty());
        assert!(minor_gcd_factors(&z).unwrap().is_empty());

        let e = IntMatrix::zeros(0, 4);
        let d = check_decomposition(&e);
        assert!(d.factors.is_empty());
        assert_eq!(d.v.rows(), 4);
        let e = IntMatrix::zeros(3, 0);
        assert_eq!(check_decomposition(&e).u.rows(), 3);
    }

    #[test]
    fn malformed_matrices_are_rejected() {
        assert!(matches!(
            IntMatrix::new(2, 2, ints(&[1, 2, 3])),
            Err(LinAlgError::Malformed { expected: 4, found: 3, .. })
        ));
        assert!(IntMatrix::from_rows(&[vec![1, 2], vec![3]]).is_err());
    }

    #[test]
    fn oracle_refuses_large_inputs() {
        let big = IntMatrix::zeros(7, 7);
        assert!(matches!(
            minor_gcd_factors(&big),
            Err(LinAlgError::OracleLimit { .. })
        ));
    }

    #[test]
    fn negative_and_rectangular_inputs() {
        let a = m(&[vec![-6, 0, 4], vec![0, -10, 2]]);
        let d = check_decomposition(&a);
        assert_eq!(d.factors, minor_gcd_factors(&a).unwrap());
        assert!(d.factors.iter().all(|f| f.is_positive()));
    }

    #[test]
    fn solve_examples() {
        let x = solve_integral(&m(&[vec![2]]), &m(&[vec![4]])).unwrap();
        assert_eq!(x, Some(m(&[vec![2]])));
        assert_eq!(solve_integral(&m(&[vec![2]]), &m(&[vec![3]])).unwrap(), None);

        let a = m(&[vec![1, 0], vec![0, 3]]);
        let x = solve_integral(&a, &m(&[vec![5], vec![6]])).unwrap();
        assert_eq!(x, Some(m(&[vec![5], vec![2]])));

        assert!(solve_integral(&a, &m(&[vec![1]])).is_err());
    }

    #[test]
    fn kernel_and_basis() {
        let a = m(&[vec![1, 2, 3]]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 2);
        assert!((&a * &k).is_zero());

        let g = m(&[vec![2, 4, 6], vec![0, 0, 0]]);
        let b = lattice_basis(&g);
        assert_eq!(b.cols(), 1);
        assert!(solve_integral(&b, &g).unwrap().is_some());
        assert!(solve_integral(&g, &b).unwrap().is_some());
    }
}
