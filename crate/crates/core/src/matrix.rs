//! Exact, approximate and pruned 8-point transform matrices.
//!
//! An approximation is the product `S·T` of a low-complexity dyadic matrix
//! `T` and a diagonal `S` whose entries are `1/sqrt(‖row‖²)`, so each scaled
//! row has unit norm. Pruning to `K` outputs keeps the first `K` rows.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::dyadic::{Dyadic, DyadicMatrix};
use crate::error::{Error, Result};
use crate::plan::OpCount;

/// Block length of every transform in this crate.
pub const N: usize = 8;

/// One diagonal entry of a scaling matrix, kept in exact form as
/// `1 / sqrt(norm)` where `norm` is the squared norm of the matrix row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScaleFactor {
    norm: Dyadic,
}

impl ScaleFactor {
    pub fn inv_sqrt(norm: Dyadic) -> Result<Self> {
        if norm.signum() <= 0 {
            return Err(Error::InvalidMatrix(format!("row with squared norm {norm} has no positive scaling")));
        }
        Ok(ScaleFactor { norm })
    }

    /// Squared norm of the row this factor normalizes.
    pub fn norm(self) -> Dyadic {
        self.norm
    }

    pub fn value(self) -> f64 {
        1.0 / self.norm.to_f64().sqrt()
    }
}

impl fmt::Display for ScaleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.norm.den_log2() == 0 {
            let n = self.norm.numerator();
            let r = (n as f64).sqrt().round() as i64;
            if r * r == n {
                return write!(f, "1/{r}");
            }
        }
        write!(f, "1/√{}", self.norm)
    }
}

/// Diagonal normalizer `S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalingDiagonal {
    factors: Vec<ScaleFactor>,
}

impl ScalingDiagonal {
    pub fn new(factors: Vec<ScaleFactor>) -> Self {
        ScalingDiagonal { factors }
    }

    /// `sqrt(diag(T·Tᵀ)⁻¹)`.
    pub fn from_matrix(t: &DyadicMatrix) -> Result<Self> {
        let factors = t.row_norms_squared().into_iter().map(ScaleFactor::inv_sqrt).collect::<Result<_>>()?;
        Ok(ScalingDiagonal { factors })
    }

    /// A diagonal with every entry equal to `1/sqrt(norm)`.
    pub fn uniform(norm: Dyadic, len: usize) -> Result<Self> {
        Ok(ScalingDiagonal { factors: vec![ScaleFactor::inv_sqrt(norm)?; len] })
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[ScaleFactor] {
        &self.factors
    }

    pub fn values(&self) -> Vec<f64> {
        self.factors.iter().map(|s| s.value()).collect()
    }

    pub fn prefix(&self, k: usize) -> Self {
        ScalingDiagonal { factors: self.factors[..k].to_vec() }
    }
}

impl fmt::Display for ScalingDiagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|s| s.to_string()).collect();
        write!(f, "diag({})", parts.join(", "))
    }
}

/// The orthonormal 8-point DCT-II matrix, optionally pruned to its first `k`
/// rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDct {
    rows: Vec<[f64; N]>,
}

impl ExactDct {
    pub fn new() -> Self {
        let rows = (0..N)
            .map(|k| {
                let mut r = [0.0; N];
                for (n, v) in r.iter_mut().enumerate() {
                    *v = dct_entry(k, n);
                }
                r
            })
            .collect();
        ExactDct { rows }
    }

    pub fn pruned(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.rows.len() {
            return Err(Error::PruneRange(k));
        }
        Ok(ExactDct { rows: self.rows[..k].to_vec() })
    }

    pub fn prune_k(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[[f64; N]] {
        &self.rows
    }

    pub fn get(&self, k: usize, n: usize) -> f64 {
        self.rows[k][n]
    }
}

impl Default for ExactDct {
    fn default() -> Self {
        Self::new()
    }
}

/// `c[k][n] = α_k · sqrt(2/N) · cos((n + 1/2)·k·π / N)`.
fn dct_entry(k: usize, n: usize) -> f64 {
    let alpha = if k == 0 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
    alpha * (2.0 / N as f64).sqrt() * ((n as f64 + 0.5) * k as f64 * PI / N as f64).cos()
}

pub fn build_exact_dct() -> ExactDct {
    ExactDct::new()
}

/// Approximation family, used to pick the hand-derived fast algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Sdct,
    Rdct,
    Mrdct,
    Lodct,
    Custom,
}

impl Family {
    pub fn base_name(self) -> &'static str {
        match self {
            Family::Sdct => "sdct",
            Family::Rdct => "rdct",
            Family::Mrdct => "mrdct",
            Family::Lodct => "lodct",
            Family::Custom => "custom",
        }
    }

    /// Published 1-D operation counts, where a count is on record.
    pub fn declared_counts(self, k: usize) -> Option<OpCount> {
        match (self, k) {
            (Family::Sdct, 8) => Some(OpCount::new(0, 24, 0)),
            (Family::Rdct, 8) => Some(OpCount::new(0, 22, 0)),
            (Family::Mrdct, 8) => Some(OpCount::new(0, 14, 0)),
            (Family::Mrdct, 6) => Some(OpCount::new(0, 12, 0)),
            (Family::Lodct, 8) => Some(OpCount::new(0, 24, 2)),
            (Family::Lodct, 4) => Some(OpCount::new(0, 18, 1)),
            _ => None,
        }
    }
}

/// A named approximation `Ĉ = S·T`, possibly pruned to `prune_k` rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransformSpec {
    pub name: String,
    pub family: Family,
    pub matrix: DyadicMatrix,
    pub scaling: ScalingDiagonal,
    pub declared: Option<OpCount>,
    pub prune_k: usize,
}

impl TransformSpec {
    /// Builds an unpruned spec with the normalizing diagonal derived from `matrix`.
    pub fn new(name: &str, family: Family, matrix: DyadicMatrix) -> Result<Self> {
        if matrix.cols() != N || matrix.rows() != N {
            return Err(Error::InvalidMatrix(format!("expected {N}x{N}, got {}x{}", matrix.rows(), matrix.cols())));
        }
        let scaling = ScalingDiagonal::from_matrix(&matrix)?;
        Ok(TransformSpec {
            name: name.to_string(),
            family,
            declared: family.declared_counts(N),
            scaling,
            matrix,
            prune_k: N,
        })
    }

    pub fn is_pruned(&self) -> bool {
        self.prune_k < N
    }

    /// Scaled rows `S·T` in floating point.
    pub fn scaled_rows(&self) -> Vec<[f64; N]> {
        let s = self.scaling.values();
        self.matrix
            .row_iter()
            .zip(s)
            .map(|(r, si)| {
                let mut out = [0.0; N];
                for (o, t) in out.iter_mut().zip(r) {
                    *o = si * t.to_f64();
                }
                out
            })
            .collect()
    }

    /// True when `S·T` has orthonormal rows, i.e. `T·Tᵀ` is diagonal.
    pub fn is_row_orthogonal(&self) -> bool {
        self.matrix.has_orthogonal_rows()
    }
}

/// LODCT matrix `W` (entries in `{0, ±1/2, ±1}`).
pub fn build_lodct() -> TransformSpec {
    #[rustfmt::skip]
    let w2: [[i64; 8]; 8] = [
        [2,  2,  2,  2,  2,  2,  2,  2],
        [2,  2,  2,  0,  0, -2, -2, -2],
        [2,  1, -1, -2, -2, -1,  1,  2],
        [2,  0, -2, -2,  2,  2,  0, -2],
        [2, -2, -2,  2,  2, -2, -2,  2],
        [2, -2,  0,  2, -2,  0,  2, -2],
        [1, -2,  2, -1, -1,  2, -2,  1],
        [0, -2,  2, -2,  2, -2,  2,  0],
    ];
    TransformSpec::new("lodct", Family::Lodct, DyadicMatrix::from_scaled_rows(&w2, 1)).expect("LODCT rows are nonzero")
}

/// Modified rounded DCT `M` (entries in `{0, ±1}`).
pub fn build_mrdct() -> TransformSpec {
    #[rustfmt::skip]
    let m: [[i64; 8]; 8] = [
        [1,  1,  1,  1,  1,  1,  1,  1],
        [1,  0,  0,  0,  0,  0,  0, -1],
        [1,  0,  0, -1, -1,  0,  0,  1],
        [0,  0, -1,  0,  0,  1,  0,  0],
        [1, -1, -1,  1,  1, -1, -1,  1],
        [0, -1,  0,  0,  0,  0,  1,  0],
        [0, -1,  1,  0,  0,  1, -1,  0],
        [0,  0,  0, -1,  1,  0,  0,  0],
    ];
    TransformSpec::new("mrdct", Family::Mrdct, DyadicMatrix::from_scaled_rows(&m, 0)).expect("MRDCT rows are nonzero")
}

/// Signed DCT: elementwise signum of the exact DCT matrix.
///
/// Every row has eight `±1` entries, so the scaling is `1/sqrt(8)`
/// throughout. The rows are not mutually orthogonal.
pub fn build_sdct() -> TransformSpec {
    let c = ExactDct::new();
    let entries = c.rows().iter().flat_map(|r| r.iter().map(|&v| Dyadic::from_int(signum(v)))).collect();
    let matrix = DyadicMatrix::new(N, N, entries).expect("8x8");
    TransformSpec::new("sdct", Family::Sdct, matrix).expect("no zero rows")
}

/// Rounded DCT: elementwise `round(2·C)` with ties away from zero.
///
/// Rounding `C` itself collapses every entry to zero (all magnitudes are
/// below 1/2), so the doubled matrix is the one that yields `{0, ±1}` rows.
pub fn build_rdct() -> TransformSpec {
    let matrix = rounded_dct(2.0);
    TransformSpec::new("rdct", Family::Rdct, matrix).expect("round(2C) has no zero rows")
}

/// `round(gain · C)` elementwise.
pub fn rounded_dct(gain: f64) -> DyadicMatrix {
    let c = ExactDct::new();
    let entries =
        c.rows().iter().flat_map(|r| r.iter().map(|&v| Dyadic::from_int((gain * v).round() as i64))).collect();
    DyadicMatrix::new(N, N, entries).expect("8x8")
}

fn signum(v: f64) -> i64 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Keeps the first `k` rows of an unpruned spec and re-derives its scaling.
pub fn prune(spec: &TransformSpec, k: usize) -> Result<TransformSpec> {
    if !(1..=N).contains(&k) {
        return Err(Error::PruneRange(k));
    }
    if spec.is_pruned() {
        return Err(Error::AlreadyPruned(spec.name.clone()));
    }
    if k == N {
        return Ok(spec.clone());
    }
    let matrix = spec.matrix.prefix_rows(k)?;
    let scaling = ScalingDiagonal::from_matrix(&matrix)?;
    Ok(TransformSpec {
        name: format!("{}-p{k}", spec.name),
        family: spec.family,
        declared: spec.family.declared_counts(k),
        matrix,
        scaling,
        prune_k: k,
    })
}

/// `S·T·x` by direct matrix product.
pub fn apply_direct(spec: &TransformSpec, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != N {
        return Err(Error::Dimension { expected: N, actual: x.len() });
    }
    Ok(spec.scaled_rows().iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect())
}
