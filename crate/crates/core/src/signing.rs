//! Signed single-bit-flip matrices.
//!
//! A d-qubit step operator has an entry at `(row, col)` exactly when `row` and
//! `col` differ in one bit, each nonzero entry is `±1`, and the matrix times
//! its transpose equals `d · I`. The physical operator is that matrix scaled
//! by `1/sqrt(d)`; the scale is carried symbolically and never applied in the
//! integer checks.
//!
//! Basis states are ordered lexicographically, `|0..0⟩, |0..1⟩, …, |1..1⟩`,
//! so qubit 0 is the most significant bit of the index.

use std::fmt;

use num_traits::{Float, One, Signed, Zero};
use thiserror::Error;

/// Largest degree accepted by [`build_flip_unitary`].
pub const MAX_DEGREE: usize = 10;
/// Largest degree for which [`search_signings`] is exhaustive.
pub const MAX_SEARCH_DEGREE: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigningError {
    #[error("degree {0} is outside 1..={MAX_DEGREE}")]
    InvalidDegree(usize),
    #[error("matrix is {actual}x{actual}, expected {expected}x{expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("exhaustive signing search supports degree 1..={MAX_SEARCH_DEGREE}, got {0}")]
    SearchTooLarge(usize),
    #[error("matrix is not a valid flip unitary: {0}")]
    NotFlipUnitary(FlipReport),
}

/// A dense square matrix over a signed scalar, row-major.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Clone + Zero> SignedMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        SignedMatrix {
            dim,
            entries: vec![T::zero(); dim * dim],
        }
    }
}

impl<T> SignedMatrix<T> {
    /// Builds from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, SigningError> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(SigningError::DimensionMismatch {
                expected: dim,
                actual: bad.len(),
            });
        }
        Ok(SignedMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.entries.chunks(self.dim.max(1))
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> SignedMatrix<U> {
        SignedMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl<T: Signed + Clone> SignedMatrix<T> {
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                let mut acc = T::zero();
                for k in 0..self.dim {
                    acc = acc + self.get(r, k).clone() * other.get(k, c).clone();
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    fn row_dot(&self, a: usize, b: usize) -> T {
        self.row(a)
            .iter()
            .zip(self.row(b))
            .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    }
}

/// Sign matrix with `i8` entries, the storage used by [`FlipUnitary`].
pub type SignMatrix = SignedMatrix<i8>;

/// Outcome of [`verify_flip_unitary`]. Row and column indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipReport {
    pub unitary: bool,
    pub single_flip_support: bool,
    /// First entry in row-major order whose zero/nonzero status is wrong.
    pub support_violation: Option<(usize, usize)>,
    /// First pair `(i, j)`, `i <= j`, in row-major order with
    /// `row_i · row_j != d · δ_ij`, together with that dot product.
    pub unitarity_violation: Option<RowPairViolation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowPairViolation {
    pub rows: (usize, usize),
    pub dot: i64,
}

impl FlipReport {
    pub fn is_valid(&self) -> bool {
        self.unitary && self.single_flip_support
    }

    /// The support violation if there is one, else the unitarity violation.
    pub fn first_violation(&self) -> Option<String> {
        if let Some((r, c)) = self.support_violation {
            return Some(format!("entry ({r},{c})"));
        }
        self.unitarity_violation
            .map(|v| format!("rows ({},{}) dot {}", v.rows.0, v.rows.1, v.dot))
    }
}

impl fmt::Display for FlipReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unitary={} single_flip_support={}",
            self.unitary, self.single_flip_support
        )?;
        if let Some((r, c)) = self.support_violation {
            write!(f, " support_violation=({r},{c})")?;
        }
        if let Some(v) = self.unitarity_violation {
            write!(f, " row_pair=({},{}) dot={}", v.rows.0, v.rows.1, v.dot)?;
        }
        Ok(())
    }
}

/// Checks the support pattern and `M · Mᵀ = d · I` exactly.
///
/// Works over any signed scalar with an exact integer embedding (`i8`, `i64`,
/// rationals, ...). Dot products are reported as `i64`.
pub fn verify_flip_unitary<T>(m: &SignedMatrix<T>, d: usize) -> Result<FlipReport, SigningError>
where
    T: Signed + Clone + num_traits::ToPrimitive,
{
    let expected = 1usize
        .checked_shl(d as u32)
        .filter(|_| d < usize::BITS as usize)
        .ok_or(SigningError::InvalidDegree(d))?;
    if m.dim() != expected {
        return Err(SigningError::DimensionMismatch {
            expected,
            actual: m.dim(),
        });
    }

    let mut support_violation = None;
    'support: for r in 0..m.dim() {
        for c in 0..m.dim() {
            let should_be_nonzero = (r ^ c).count_ones() == 1;
            let entry = m.get(r, c);
            let ok = if should_be_nonzero {
                entry.abs().is_one()
            } else {
                entry.is_zero()
            };
            if !ok {
                support_violation = Some((r + 1, c + 1));
                break 'support;
            }
        }
    }

    let target = T::from_usize(d);
    let mut unitarity_violation = None;
    'pairs: for i in 0..m.dim() {
        for j in i..m.dim() {
            let dot = m.row_dot(i, j);
            let want = if i == j { target.clone() } else { T::zero() };
            if dot != want {
                unitarity_violation = Some(RowPairViolation {
                    rows: (i + 1, j + 1),
                    dot: dot.to_i64().unwrap_or(i64::MAX),
                });
                break 'pairs;
            }
        }
    }

    Ok(FlipReport {
        unitary: unitarity_violation.is_none(),
        single_flip_support: support_violation.is_none(),
        support_violation,
        unitarity_violation,
    })
}

trait FromUsize {
    fn from_usize(n: usize) -> Self;
}

impl<T: One + Zero + Clone + std::ops::Add<Output = T>> FromUsize for T {
    fn from_usize(n: usize) -> Self {
        (0..n).fold(T::zero(), |acc, _| acc + T::one())
    }
}

/// A verified signed flip matrix for a given degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipUnitary {
    degree: usize,
    matrix: SignMatrix,
}

impl FlipUnitary {
    /// Accepts `matrix` only if it passes [`verify_flip_unitary`].
    pub fn from_matrix(matrix: SignMatrix, degree: usize) -> Result<Self, SigningError> {
        let report = verify_flip_unitary(&matrix, degree)?;
        if !report.is_valid() {
            return Err(SigningError::NotFlipUnitary(report));
        }
        Ok(FlipUnitary { degree, matrix })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn matrix(&self) -> &SignMatrix {
        &self.matrix
    }

    /// Entry at output word `row`, input word `col`; nonzero iff they differ
    /// in exactly one bit.
    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> i8 {
        *self.matrix.get(row, col)
    }

    /// The physically scaled matrix `M / sqrt(d)` in floating point.
    pub fn scaled<F: Float>(&self) -> SignedMatrix<F> {
        let scale = F::from(self.degree).unwrap().sqrt().recip();
        self.matrix.map(|&e| F::from(e).unwrap() * scale)
    }
}

impl fmt::Display for FlipUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(1/sqrt({})) *", self.degree)?;
        for row in self.matrix.rows() {
            let cells: Vec<String> = row.iter().map(|e| format!("{e:>2}")).collect();
            writeln!(f, "  [{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// The recursive signing `A_1 = [[0,1],[1,0]]`,
/// `A_d = [[A_{d-1}, I], [I, -A_{d-1}]]`.
///
/// `A_d` is symmetric with `A_d² = d · I`.
pub fn build_flip_unitary(d: usize) -> Result<FlipUnitary, SigningError> {
    if !(1..=MAX_DEGREE).contains(&d) {
        return Err(SigningError::InvalidDegree(d));
    }
    let mut a = SignMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
    for _ in 1..d {
        let half = a.dim();
        let mut next = SignMatrix::zeros(2 * half);
        for r in 0..half {
            for c in 0..half {
                let e = *a.get(r, c);
                next.set(r, c, e);
                next.set(r + half, c + half, -e);
            }
            next.set(r, r + half, 1);
            next.set(r + half, r, 1);
        }
        a = next;
    }
    Ok(FlipUnitary { degree: d, matrix: a })
}

/// A 3-qubit sign pattern with the right support but non-orthogonal rows
/// (rows 1 and 6 share two `+1` columns). Kept as a regression fixture for
/// [`verify_flip_unitary`]; the `1/sqrt(3)` prefactor is implied.
pub fn printed_matrix() -> SignMatrix {
    SignMatrix::from_rows(vec![
        vec![0, 1, 1, 0, 1, 0, 0, 0],
        vec![1, 0, 0, 1, 0, 1, 0, 0],
        vec![1, 0, 0, 1, 0, 0, 1, 0],
        vec![0, 1, -1, 0, 0, 0, 0, 1],
        vec![1, 0, 0, 0, 0, 1, -1, 0],
        vec![0, 1, 0, 0, 1, 0, 0, -1],
        vec![0, 0, 1, 0, 1, 0, 0, 1],
        vec![0, 0, 0, 1, 0, 1, 1, 0],
    ])
    .unwrap()
}

/// Every valid signing of the single-flip support for `d <= 3`, sorted.
///
/// Rows are assigned one at a time; a row's sign choice is kept only if it is
/// orthogonal to every earlier row.
pub fn search_signings(d: usize) -> Result<Vec<SignMatrix>, SigningError> {
    if !(1..=MAX_SEARCH_DEGREE).contains(&d) {
        return Err(SigningError::SearchTooLarge(d));
    }
    let dim = 1usize << d;
    // Support columns of each row, ascending.
    let support: Vec<Vec<usize>> = (0..dim)
        .map(|r| {
            let mut cols: Vec<usize> = (0..d).map(|b| r ^ (1 << b)).collect();
            cols.sort_unstable();
            cols
        })
        .collect();

    let mut found = Vec::new();
    let mut current = SignMatrix::zeros(dim);
    extend_rows(0, d, &support, &mut current, &mut found);
    found.sort();
    Ok(found)
}

fn extend_rows(
    row: usize,
    d: usize,
    support: &[Vec<usize>],
    current: &mut SignMatrix,
    found: &mut Vec<SignMatrix>,
) {
    if row == current.dim() {
        found.push(current.clone());
        return;
    }
    for pattern in 0..(1u32 << d) {
        for (k, &c) in support[row].iter().enumerate() {
            current.set(row, c, if pattern >> k & 1 == 1 { -1 } else { 1 });
        }
        if (0..row).all(|earlier| current.row_dot(earlier, row) == 0) {
            extend_rows(row + 1, d, support, current, found);
        }
    }
    for &c in &support[row] {
        current.set(row, c, 0);
    }
}
