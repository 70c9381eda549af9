//! Exact, approximate and pruned 8-point DCT-II kernels.
//!
//! Approximations are integer matrices `T` with a diagonal scaling `S` so
//! that `Ĉ = S·T`. Each has an addition/shift flow-graph plan with exact
//! operation counts. Pruning keeps the first `K` rows, and the 2-D pruned
//! transform `Ĉ⟨K⟩·A·Ĉ⟨K⟩ᵀ` costs `(8 + K)` one-dimensional calls.
//!
//! ```
//! use dctprune::{lookup, OpCount};
//!
//! let w4 = lookup("lodct-p4").unwrap();
//! assert_eq!(w4.op_count_2d(), OpCount::new(0, 216, 12));
//! ```

pub mod catalog;
pub mod codec;
pub mod dyadic;
pub mod error;
pub mod image;
pub mod matrix;
pub mod metrics;
pub mod plan;

pub use catalog::{implemented, lookup, lookup_with_prune, Transform};
pub use codec::{compress_image, forward_2d, inverse_2d, CompressOptions, QuantTable};
pub use dyadic::{Dyadic, DyadicMatrix};
pub use error::{Error, Result};
pub use image::GrayImage;
pub use matrix::{prune, ExactDct, Family, ScaleFactor, ScalingDiagonal, TransformSpec, N};
pub use metrics::{energy_compaction, psnr, ssim, DcConvention, QualityReport};
pub use plan::{count_ops_1d, count_ops_2d, FlowGraphPlan, OpCount};
