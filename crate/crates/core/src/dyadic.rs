//! Dyadic rationals (`n / 2^m`) and matrices built from them.
//!
//! Every low-complexity transform matrix in the catalog has entries in
//! `{0, ±1/2, ±1}`, so exact integer arithmetic on a numerator plus a
//! power-of-two exponent is enough to evaluate them without rounding.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};

/// A number of the form `num / 2^den_log2`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Dyadic {
    num: i64,
    den_log2: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, den_log2: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, den_log2: 0 };

    pub fn new(num: i64, den_log2: u32) -> Self {
        Dyadic { num, den_log2 }.normalized()
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic { num: v, den_log2: 0 }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn den_log2(self) -> u32 {
        self.den_log2
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.den_log2) as f64
    }

    /// Exact division by `2^bits`.
    pub fn halve(self, bits: u32) -> Self {
        Dyadic::new(self.num, self.den_log2 + bits)
    }

    /// Exact multiplication by `2^bits`.
    pub fn double(self, bits: u32) -> Self {
        let drop = bits.min(self.den_log2);
        Dyadic::new(self.num << (bits - drop), self.den_log2 - drop)
    }

    pub fn abs(self) -> Self {
        Dyadic { num: self.num.abs(), den_log2: self.den_log2 }
    }

    pub fn signum(self) -> i64 {
        self.num.signum()
    }

    fn normalized(mut self) -> Self {
        if self.num == 0 {
            self.den_log2 = 0;
            return self;
        }
        let tz = self.num.trailing_zeros().min(self.den_log2);
        self.num >>= tz;
        self.den_log2 -= tz;
        self
    }

    /// Numerators of `self` and `other` over their common denominator.
    fn aligned(self, other: Self) -> (i64, i64, u32) {
        let d = self.den_log2.max(other.den_log2);
        (self.num << (d - self.den_log2), other.num << (d - other.den_log2), d)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, d) = self.aligned(rhs);
        Dyadic::new(a + b, d)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (a, b, d) = self.aligned(rhs);
        Dyadic::new(a - b, d)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, den_log2: self.den_log2 }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(self.num * rhs.num, self.den_log2 + rhs.den_log2)
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den_log2 == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.den_log2)
        }
    }
}

/// Row-major rectangular matrix of dyadic entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Dyadic>,
}

impl DyadicMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Dyadic>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!("empty shape {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension { expected: rows * cols, actual: entries.len() });
        }
        Ok(DyadicMatrix { rows, cols, entries })
    }

    /// Builds an 8-column matrix from integer rows that are implicitly divided
    /// by `2^den_log2`.
    pub fn from_scaled_rows(rows: &[[i64; 8]], den_log2: u32) -> Self {
        let entries = rows.iter().flat_map(|r| r.iter().map(move |&v| Dyadic::new(v, den_log2))).collect();
        DyadicMatrix { rows: rows.len(), cols: 8, entries }
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Dyadic::ZERO; n * n];
        for i in 0..n {
            entries[i * n + i] = Dyadic::ONE;
        }
        DyadicMatrix { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Dyadic {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Dyadic] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Dyadic]> {
        self.entries.chunks(self.cols)
    }

    /// The first `k` rows.
    pub fn prefix_rows(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.rows {
            return Err(Error::PruneRange(k));
        }
        Ok(DyadicMatrix { rows: k, cols: self.cols, entries: self.entries[..k * self.cols].to_vec() })
    }

    /// `self · selfᵀ`, exactly, as a `rows × rows` matrix.
    pub fn gram(&self) -> DyadicMatrix {
        let n = self.rows;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(dot(self.row(i), self.row(j)));
            }
        }
        DyadicMatrix { rows: n, cols: n, entries }
    }

    /// Squared Euclidean norm of every row.
    pub fn row_norms_squared(&self) -> Vec<Dyadic> {
        self.row_iter().map(|r| dot(r, r)).collect()
    }

    /// True when distinct rows are mutually orthogonal.
    pub fn has_orthogonal_rows(&self) -> bool {
        let g = self.gram();
        (0..self.rows).all(|i| (0..self.rows).all(|j| i == j || g.get(i, j).is_zero()))
    }

    /// Exact matrix-vector product.
    pub fn mul_vec(&self, x: &[Dyadic]) -> Result<Vec<Dyadic>> {
        if x.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, actual: x.len() });
        }
        Ok(self.row_iter().map(|r| dot(r, x)).collect())
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.row_iter().map(|r| r.iter().map(|d| d.to_f64()).collect()).collect()
    }
}

fn dot(a: &[Dyadic], b: &[Dyadic]) -> Dyadic {
    a.iter().zip(b).fold(Dyadic::ZERO, |acc, (&x, &y)| acc + x * y)
}

impl fmt::Display for DyadicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.row_iter() {
            let cells: Vec<String> = r.iter().map(|d| format!("{d:>5}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}
