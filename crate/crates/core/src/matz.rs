//! Exact arbitrary-precision integer matrices: Smith and column-Hermite
//! normal forms with tracked unimodular transforms, row-lattice membership,
//! and element orders in quotients `Z^n / rowlattice`.
//!
//! Pivot selection is deterministic everywhere: smallest nonzero absolute
//! value, ties broken by lowest `(row, col)` index.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major matrix over the integers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, entries: vec![BigInt::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> BigInt>(rows: usize, cols: usize, mut f: F) -> IntMatrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, entries }
    }

    /// Builds a matrix from rows; panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> IntMatrix {
        for r in &rows {
            assert_eq!(r.len(), cols, "ragged rows");
        }
        let nrows = rows.len();
        IntMatrix { rows: nrows, cols, entries: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        IntMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| &self[(i, k)] * &rhs[(k, j)]).sum()
        })
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// `H[i][j] = 0` for all `j > i`.
    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)].is_zero()))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows)
            .all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::ZERO,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = num / &prev;
                }
                m[(i, k)] = BigInt::ZERO;
            }
            prev = m[(k, k)].clone();
        }
        sign * m[(n - 1, n - 1)].clone()
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

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -core::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -core::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }

    /// `row[dst] += factor * row[src]`
    fn add_row_multiple(&mut self, src: usize, dst: usize, factor: &BigInt) {
        assert_ne!(src, dst);
        for j in 0..self.cols {
            let add = &self[(src, j)] * factor;
            self[(dst, j)] += add;
        }
    }

    /// `col[dst] += factor * col[src]`
    fn add_col_multiple(&mut self, src: usize, dst: usize, factor: &BigInt) {
        assert_ne!(src, dst);
        for i in 0..self.rows {
            let add = &self[(i, src)] * factor;
            self[(i, dst)] += add;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Order of an element (or group): finite with an exact value, or infinite.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Order {
    Finite(BigUint),
    Infinite,
}

impl Order {
    pub fn is_finite(&self) -> bool {
        matches!(self, Order::Finite(_))
    }

    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => write!(f, "infinite"),
        }
    }
}

/// Dimension mismatch between a matrix and a vector argument.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DimMismatch {
    pub expected: usize,
    pub got: usize,
}

impl fmt::Display for DimMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expected a vector of length {}, got {}", self.expected, self.got)
    }
}

impl core::error::Error for DimMismatch {}

/// Smith normal form `U * M * V = D` with unimodular `U`, `V` and diagonal
/// `D` whose nonzero entries `d_1 | d_2 | ... | d_r` are positive.
///
/// `det_u` and `det_v` are the determinants of the transforms, tracked while
/// they are built; both are `±1` by construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub invariant_factors: Vec<BigUint>,
    pub rank: usize,
    pub det_u: i8,
    pub det_v: i8,
}

/// Position of the entry of smallest nonzero absolute value in the trailing
/// submatrix starting at `(k, k)`, ties broken by lowest `(row, col)`.
fn select_pivot(a: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..a.rows() {
        for j in k..a.cols() {
            if a[(i, j)].is_zero() {
                continue;
            }
            match best {
                Some(b) if a[b].abs() <= a[(i, j)].abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form of `M`; deterministic for a fixed input.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut det_u: i8 = 1;
    let mut det_v: i8 = 1;

    for k in 0..rows.min(cols) {
        'place: loop {
            let Some((pi, pj)) = select_pivot(&a, k) else {
                break 'place;
            };
            if pi != k {
                a.swap_rows(pi, k);
                u.swap_rows(pi, k);
                det_u = -det_u;
            }
            if pj != k {
                a.swap_cols(pj, k);
                v.swap_cols(pj, k);
                det_v = -det_v;
            }
            if a[(k, k)].is_negative() {
                a.negate_row(k);
                u.negate_row(k);
                det_u = -det_u;
            }

            let mut dirty = false;
            for i in k + 1..rows {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let q = &a[(i, k)] / &a[(k, k)];
                if !q.is_zero() {
                    a.add_row_multiple(k, i, &-&q);
                    u.add_row_multiple(k, i, &-q);
                }
                if !a[(i, k)].is_zero() {
                    dirty = true;
                }
            }
            for j in k + 1..cols {
                if a[(k, j)].is_zero() {
                    continue;
                }
                let q = &a[(k, j)] / &a[(k, k)];
                if !q.is_zero() {
                    a.add_col_multiple(k, j, &-&q);
                    v.add_col_multiple(k, j, &-q);
                }
                if !a[(k, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'place;
            }

            // Divisibility sweep: pull a non-divisible entry into row k so
            // the next pass replaces the pivot by a proper divisor.
            let pivot = a[(k, k)].clone();
            let offender = (k + 1..rows)
                .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[(i, j)] % &pivot).is_zero());
            match offender {
                Some((i, _)) => {
                    a.add_row_multiple(i, k, &BigInt::one());
                    u.add_row_multiple(i, k, &BigInt::one());
                }
                None => break 'place,
            }
        }
        if a[(k, k)].is_zero() {
            break;
        }
    }

    let rank = (0..rows.min(cols)).take_while(|&i| !a[(i, i)].is_zero()).count();
    let invariant_factors = (0..rank)
        .map(|i| a[(i, i)].magnitude().clone())
        .collect();
    debug_assert!(a.is_diagonal());
    debug_assert_eq!(u.mul(m).mul(&v), a);
    SmithDecomposition { u, d: a, v, invariant_factors, rank, det_u, det_v }
}

/// An elementary column operation; `AddMultiple` means
/// `col[dst] += factor * col[src]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ColumnOp {
    Swap(usize, usize),
    Negate(usize),
    AddMultiple { src: usize, dst: usize, factor: BigInt },
}

impl ColumnOp {
    pub fn apply(&self, m: &mut IntMatrix) {
        match self {
            ColumnOp::Swap(a, b) => m.swap_cols(*a, *b),
            ColumnOp::Negate(j) => m.negate_col(*j),
            ColumnOp::AddMultiple { src, dst, factor } => m.add_col_multiple(*src, *dst, factor),
        }
    }
}

/// Column Hermite form `M * V = H` with `V` unimodular and `H`
/// lower-triangular.
///
/// `ops` lists the elementary column operations that build `V`, in
/// application order, so callers can replay the reduction on other data.
/// A matrix that is already lower-triangular is returned untouched with
/// `V = I` and no operations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ColumnHermite {
    pub h: IntMatrix,
    pub v: IntMatrix,
    pub ops: Vec<ColumnOp>,
}

pub fn column_hermite(m: &IntMatrix) -> ColumnHermite {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut v = IntMatrix::identity(cols);
    let mut ops: Vec<ColumnOp> = Vec::new();
    let mut record = |op: ColumnOp, h: &mut IntMatrix, v: &mut IntMatrix| {
        op.apply(h);
        op.apply(v);
        ops.push(op);
    };

    let mut p = 0;
    for i in 0..rows {
        if p >= cols {
            break;
        }
        let right_nonzero = (p + 1..cols).any(|j| !h[(i, j)].is_zero());
        if !right_nonzero {
            if !h[(i, p)].is_zero() {
                p += 1;
            }
            continue;
        }
        // Fold the row's entries in columns p.. into a single positive gcd.
        loop {
            let jmin = (p..cols)
                .filter(|&j| !h[(i, j)].is_zero())
                .min_by(|&a, &b| h[(i, a)].abs().cmp(&h[(i, b)].abs()))
                .expect("nonzero entry exists");
            let others: Vec<usize> =
                (p..cols).filter(|&j| j != jmin && !h[(i, j)].is_zero()).collect();
            if others.is_empty() {
                if jmin != p {
                    record(ColumnOp::Swap(jmin, p), &mut h, &mut v);
                }
                if h[(i, p)].is_negative() {
                    record(ColumnOp::Negate(p), &mut h, &mut v);
                }
                p += 1;
                break;
            }
            for j in others {
                let q = &h[(i, j)] / &h[(i, jmin)];
                debug_assert!(!q.is_zero());
                record(ColumnOp::AddMultiple { src: jmin, dst: j, factor: -q }, &mut h, &mut v);
            }
        }
    }

    debug_assert!(h.is_lower_triangular());
    debug_assert_eq!(m.mul(&v), h);
    ColumnHermite { h, v, ops }
}

fn row_times_matrix(v: &[BigInt], m: &IntMatrix) -> Vec<BigInt> {
    assert_eq!(v.len(), m.rows());
    (0..m.cols())
        .map(|j| v.iter().enumerate().map(|(i, x)| x * &m[(i, j)]).sum())
        .collect()
}

/// Membership of `v` in the lattice spanned by the rows of `M`.
///
/// Returns witness coefficients `w` with `w * M = v` exactly when the vector
/// is a member, `None` otherwise.
pub fn in_row_lattice(m: &IntMatrix, v: &[BigInt]) -> Result<Option<Vec<BigInt>>, DimMismatch> {
    if v.len() != m.cols() {
        return Err(DimMismatch { expected: m.cols(), got: v.len() });
    }
    let snf = smith_normal_form(m);
    let c = row_times_matrix(v, &snf.v);
    let mut z = vec![BigInt::ZERO; m.rows()];
    for (i, ci) in c.iter().enumerate() {
        if i < snf.rank {
            let d = &snf.d[(i, i)];
            let (q, r) = ci.div_rem(d);
            if !r.is_zero() {
                return Ok(None);
            }
            z[i] = q;
        } else if !ci.is_zero() {
            return Ok(None);
        }
    }
    let witness = row_times_matrix(&z, &snf.u);
    debug_assert_eq!(row_times_matrix(&witness, m), v);
    Ok(Some(witness))
}

/// Order of `v + L` in `Z^n / L` for `L` the row lattice of `M`: the least
/// `k >= 1` with `k * v` in the lattice, or [`Order::Infinite`] when `v` has
/// a component along a free direction of the quotient.
pub fn order_in_quotient(m: &IntMatrix, v: &[BigInt]) -> Result<Order, DimMismatch> {
    if v.len() != m.cols() {
        return Err(DimMismatch { expected: m.cols(), got: v.len() });
    }
    let snf = smith_normal_form(m);
    let c = row_times_matrix(v, &snf.v);
    let mut k = BigUint::one();
    for (i, ci) in c.iter().enumerate() {
        if i < snf.rank {
            let d = snf.d[(i, i)].magnitude();
            let g = d.gcd(ci.magnitude());
            k = k.lcm(&(d / g));
        } else if !ci.is_zero() {
            return Ok(Order::Infinite);
        }
    }
    Ok(Order::Finite(k))
}
