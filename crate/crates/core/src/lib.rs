//! Hausdorff compactifications of the real line built from finite families of
//! bounded continuous functions.
//!
//! A family `f_0, …, f_{N-1}` of bounded functions on ℝ defines an embedding
//! `k(x) = (f_0(x), …, f_{N-1}(x))` into the product of the functions' range
//! intervals. The closure of the image is a compact Hausdorff space; its
//! points outside `k(ℝ)` form the remainder. This crate samples that closure
//! at desk scale and answers questions about it:
//!
//! * [`functions`]: closed-form bounded functions with exact range intervals.
//! * [`product_space`]: points of a finite product of intervals and the
//!   weighted capped product metric.
//! * [`compactification`]: the embedding, the sampled image and the
//!   clustered remainder.
//! * [`extension`]: which bounded functions extend continuously over the
//!   remainder, and their extended values.
//! * [`ordering`]: the order between compactifications and strict enlargement.
//! * [`inverse_limit`]: chains of compactifications, threads and chain limits.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod compactification;
mod error;
pub mod extension;
pub mod functions;
mod index;
pub mod inverse_limit;
pub mod ordering;
pub mod product_space;

pub use compactification::{
    build_compactification, BuildParams, CompactificationModel, EmbeddingMap, ImageSample,
    Membership, RemainderCluster, TailSide,
};
pub use error::{Error, Result};
pub use extension::{
    check_extendability, check_extendability_with, derived_extension, extend_by_projection,
    ClusterOscillation, ExtendedFunction, ExtensionReport, OscillationRow, Thresholds, Verdict,
    DEFAULT_DELTAS,
};
pub use functions::{chebyshev_expand, chebyshev_t, FunctionDescriptor, FunctionFamily};
pub use inverse_limit::{ClosednessEntry, InverseSystem, Thread};
pub use ordering::{
    compare, enlarge, equivalence_check, Comparison, ComparisonWitness, CoordinateMap, Enlargement,
    Incomparable,
};
pub use product_space::{
    cap_metric, check_ball_cylinder_inclusions, product_distance, tail_bound, InclusionKind,
    InclusionReport, InclusionViolation, Interval, ProductMetric, ProductPoint, ProductSpace,
};

/// Residual allowed for maps built from Chebyshev transforms of coordinates.
pub const BOND_TOLERANCE: f64 = 1e-9;
