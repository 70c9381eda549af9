//! Named transforms and the runtime [`Transform`] used by the codec.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{self, ExactDct, TransformSpec, N};
use crate::plan::{self, FlowGraphPlan, OpCount};

/// Names accepted by [`lookup`], in listing order.
pub const IMPLEMENTED: &[&str] = &["exact-dct", "sdct", "rdct", "mrdct", "lodct", "lodct-p4", "mrdct-p6"];

/// Approximations whose matrices are not defined here. Looking them up fails
/// with [`Error::NotImplemented`].
pub const UNSPECIFIED: &[&str] = &["bas-2008", "bas-2009", "bas-2013", "t4", "t5", "t6"];

/// Published counts for Chen's fast exact DCT. The exact DCT in this crate is
/// evaluated by direct matrix product; this row is kept for comparison only.
pub const CHEN_REFERENCE_1D: OpCount = OpCount::new(16, 26, 0);

/// A transform ready to run on 8×8 blocks.
#[derive(Clone, Debug)]
pub enum Transform {
    Exact(ExactDct),
    Approx { spec: TransformSpec, plan: FlowGraphPlan },
}

impl Transform {
    pub fn exact() -> Self {
        Transform::Exact(ExactDct::new())
    }

    pub fn approx(spec: TransformSpec) -> Self {
        let plan = plan::plan_for(&spec);
        Transform::Approx { spec, plan }
    }

    pub fn name(&self) -> String {
        match self {
            Transform::Exact(c) if c.prune_k() < N => format!("exact-dct-p{}", c.prune_k()),
            Transform::Exact(_) => "exact-dct".to_string(),
            Transform::Approx { spec, .. } => spec.name.clone(),
        }
    }

    pub fn prune_k(&self) -> usize {
        match self {
            Transform::Exact(c) => c.prune_k(),
            Transform::Approx { spec, .. } => spec.prune_k,
        }
    }

    pub fn is_pruned(&self) -> bool {
        self.prune_k() < N
    }

    /// Keeps the first `k` outputs of an unpruned transform.
    pub fn pruned(&self, k: usize) -> Result<Self> {
        match self {
            Transform::Exact(c) => {
                if c.prune_k() < N {
                    return Err(Error::AlreadyPruned(self.name()));
                }
                Ok(Transform::Exact(c.pruned(k)?))
            }
            Transform::Approx { spec, .. } => Ok(Transform::approx(matrix::prune(spec, k)?)),
        }
    }

    /// Diagonal of `S`; all ones for the exact DCT.
    pub fn scaling(&self) -> Vec<f64> {
        match self {
            Transform::Exact(c) => vec![1.0; c.prune_k()],
            Transform::Approx { spec, .. } => spec.scaling.values(),
        }
    }

    /// Rows of the scaled transform `S·T` (or `C⟨K⟩`).
    pub fn basis(&self) -> Vec<[f64; N]> {
        match self {
            Transform::Exact(c) => c.rows().to_vec(),
            Transform::Approx { spec, .. } => spec.scaled_rows(),
        }
    }

    /// Unscaled 1-D forward transform of one length-8 vector into `out`.
    /// Approximations run their add/shift plan.
    pub fn forward_1d(&self, x: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) -> Result<()> {
        match self {
            Transform::Exact(c) => {
                if x.len() != N {
                    return Err(Error::Dimension { expected: N, actual: x.len() });
                }
                if out.len() != c.prune_k() {
                    return Err(Error::Dimension { expected: c.prune_k(), actual: out.len() });
                }
                for (o, row) in out.iter_mut().zip(c.rows()) {
                    *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
                Ok(())
            }
            Transform::Approx { plan, .. } => plan.evaluate_into(x, scratch, out),
        }
    }

    /// 1-D counts of the evaluation path actually used: the fast plan for
    /// approximations, the direct `K×8` product for the exact DCT.
    pub fn op_count_1d(&self) -> OpCount {
        match self {
            Transform::Exact(c) => {
                let k = c.prune_k() as u64;
                OpCount::new(k * N as u64, k * (N as u64 - 1), 0)
            }
            Transform::Approx { plan, .. } => plan.op_count(),
        }
    }

    pub fn op_count_2d(&self) -> OpCount {
        plan::two_d(self.op_count_1d(), self.prune_k())
    }

    /// Published 1-D counts, when there are any.
    pub fn declared_1d(&self) -> Option<OpCount> {
        match self {
            Transform::Exact(c) if c.prune_k() == N => Some(CHEN_REFERENCE_1D),
            Transform::Exact(_) => None,
            Transform::Approx { spec, .. } => spec.declared,
        }
    }

    /// True when the scaled transform is square and orthogonal, so the
    /// inverse reproduces the input exactly.
    pub fn is_orthogonal(&self) -> bool {
        match self {
            Transform::Exact(c) => c.prune_k() == N,
            Transform::Approx { spec, .. } => !spec.is_pruned() && spec.is_row_orthogonal(),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn base(name: &str) -> Result<Transform> {
    match name {
        "exact-dct" | "dct" => Ok(Transform::exact()),
        "sdct" => Ok(Transform::approx(matrix::build_sdct())),
        "rdct" => Ok(Transform::approx(matrix::build_rdct())),
        "mrdct" => Ok(Transform::approx(matrix::build_mrdct())),
        "lodct" => Ok(Transform::approx(matrix::build_lodct())),
        n if UNSPECIFIED.contains(&n) => Err(Error::NotImplemented(n.to_string())),
        n => Err(Error::UnknownTransform(n.to_string())),
    }
}

/// Resolves a catalog name. A `-p<K>` suffix prunes to `K` outputs, so
/// `lodct-p4` is `W⟨4⟩` and `mrdct-p6` is `M⟨6⟩`.
pub fn lookup(name: &str) -> Result<Transform> {
    let name = name.trim().to_ascii_lowercase();
    if let Some((stem, k)) = name.rsplit_once("-p") {
        if let Ok(k) = k.parse::<usize>() {
            return base(stem)?.pruned(k);
        }
    }
    base(&name)
}

/// Resolves `name`, then applies an explicit prune level. Conflicting levels
/// (`lodct-p4` with `prune = 6`) are rejected.
pub fn lookup_with_prune(name: &str, prune: Option<usize>) -> Result<Transform> {
    let t = lookup(name)?;
    match prune {
        None => Ok(t),
        Some(k) if k == t.prune_k() => Ok(t),
        Some(k) if !t.is_pruned() => t.pruned(k),
        Some(_) => Err(Error::AlreadyPruned(t.name())),
    }
}

/// Every implemented catalog transform.
pub fn implemented() -> Vec<Transform> {
    IMPLEMENTED.iter().map(|n| lookup(n).expect("catalog names resolve")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for name in IMPLEMENTED {
            assert_eq!(lookup(name).unwrap().name(), *name);
        }
        assert_eq!(lookup("lodct-p4").unwrap().prune_k(), 4);
        assert_eq!(lookup("EXACT-DCT-p3").unwrap().name(), "exact-dct-p3");
        assert_eq!(lookup_with_prune("mrdct", Some(6)).unwrap().name(), "mrdct-p6");
        assert_eq!(lookup_with_prune("mrdct-p6", Some(6)).unwrap().name(), "mrdct-p6");
    }

    #[test]
    fn unspecified_and_unknown_are_errors() {
        for name in UNSPECIFIED {
            let err = lookup(name).unwrap_err();
            assert!(matches!(err, Error::NotImplemented(_)));
            assert!(err.to_string().contains("matrix not specified"));
        }
        assert!(matches!(lookup("foo"), Err(Error::UnknownTransform(_))));
        assert!(matches!(lookup("lodct-p9"), Err(Error::PruneRange(9))));
        assert!(matches!(lookup_with_prune("lodct-p4", Some(6)), Err(Error::AlreadyPruned(_))));
    }

    #[test]
    fn counts_follow_the_evaluation_path() {
        let w4 = lookup("lodct-p4").unwrap();
        assert_eq!(w4.op_count_1d(), OpCount::new(0, 18, 1));
        assert_eq!(w4.op_count_2d(), OpCount::new(0, 216, 12));
        assert_eq!(w4.declared_1d(), Some(OpCount::new(0, 18, 1)));
        let exact = Transform::exact();
        assert_eq!(exact.op_count_1d(), OpCount::new(64, 56, 0));
        assert_eq!(exact.declared_1d(), Some(CHEN_REFERENCE_1D));
        assert_eq!(CHEN_REFERENCE_1D.scaled(16), OpCount::new(256, 416, 0));
    }

    #[test]
    fn orthogonality_flags() {
        assert!(lookup("exact-dct").unwrap().is_orthogonal());
        assert!(lookup("lodct").unwrap().is_orthogonal());
        assert!(lookup("mrdct").unwrap().is_orthogonal());
        assert!(lookup("rdct").unwrap().is_orthogonal());
        assert!(!lookup("sdct").unwrap().is_orthogonal());
        assert!(!lookup("lodct-p4").unwrap().is_orthogonal());
    }
}
