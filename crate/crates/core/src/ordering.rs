//! The order `δ₁ℝ ≤ δ₂ℝ` between compactifications, decided by exhibiting a
//! coordinate map `L` with `L ∘ k₂ = k₁`.
//!
//! `L` is found syntactically: every coordinate of the smaller family must be
//! a coordinate of the larger family, or a Chebyshev polynomial of one. The
//! candidate is then checked numerically on the image grid and for
//! surjectivity onto the smaller remainder. A failed syntactic match yields
//! [`Incomparable`] even when some other quotient map might exist.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::compactification::{build_compactification, CompactificationModel};
use crate::extension::{check_extendability, ExtensionReport, DEFAULT_DELTAS};
use crate::functions::{chebyshev_t, FunctionDescriptor, FunctionFamily};
use crate::index::PointIndex;
use crate::product_space::{distance, ProductPoint};
use crate::{Error, Result, BOND_TOLERANCE};

/// How one coordinate of the smaller model is read off the larger one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoordinateMap {
    Copy { source: usize },
    Chebyshev { degree: u32, source: usize },
}

impl CoordinateMap {
    pub fn source(&self) -> usize {
        match self {
            Self::Copy { source } | Self::Chebyshev { source, .. } => *source,
        }
    }

    fn degree(&self) -> u32 {
        match self {
            Self::Copy { .. } => 1,
            Self::Chebyshev { degree, .. } => *degree,
        }
    }

    fn from_degree(source: usize, degree: u32) -> Self {
        if degree == 1 {
            Self::Copy { source }
        } else {
            Self::Chebyshev { degree, source }
        }
    }

    pub fn apply(&self, p: &[f64]) -> f64 {
        match self {
            Self::Copy { source } => p[*source],
            Self::Chebyshev { degree, source } => chebyshev_t(*degree, p[*source]),
        }
    }
}

/// A verified comparison map from the larger model onto the smaller one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonWitness {
    /// One entry per coordinate of the smaller model.
    pub mapping: Vec<CoordinateMap>,
    /// Dimension of the larger model.
    pub source_dim: usize,
    /// `sup_x d(L(k_larger(x)), k_smaller(x))` over the smaller image grid.
    pub residual: f64,
    /// Largest distance from a smaller remainder center to the image under
    /// `L` of the larger remainder centers; `None` when not measured.
    pub onto_gap: Option<f64>,
}

impl ComparisonWitness {
    pub fn target_dim(&self) -> usize {
        self.mapping.len()
    }

    pub fn apply_coords(&self, p: &[f64]) -> Vec<f64> {
        self.mapping.iter().map(|m| m.apply(p)).collect()
    }

    pub fn apply(&self, p: &ProductPoint) -> Result<ProductPoint> {
        if p.dim() != self.source_dim {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim,
                found: p.dim(),
            });
        }
        Ok(ProductPoint::new(self.apply_coords(p.coords())))
    }

    /// The composite `next ∘ self`, where `self` maps `a` onto `b` and `next`
    /// maps `b` onto `c`. Chebyshev degrees multiply since `T_m ∘ T_n = T_{mn}`.
    /// The residual is bounded by the sum of both residuals; surjectivity is
    /// not re-measured.
    pub fn then(&self, next: &ComparisonWitness) -> Result<ComparisonWitness> {
        if next.source_dim != self.target_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.target_dim(),
                found: next.source_dim,
            });
        }
        let mapping = next
            .mapping
            .iter()
            .map(|m| {
                let inner = self.mapping[m.source()];
                CoordinateMap::from_degree(inner.source(), inner.degree() * m.degree())
            })
            .collect();
        Ok(ComparisonWitness {
            mapping,
            source_dim: self.source_dim,
            residual: self.residual + next.residual,
            onto_gap: None,
        })
    }
}

/// Why no comparison map was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Incomparable {
    /// Coordinate `coordinate` of the smaller family is not derivable from
    /// any coordinate of the larger family.
    NoDerivation {
        coordinate: usize,
        function: FunctionDescriptor,
    },
    /// The candidate map misses `L ∘ k_larger = k_smaller` by more than the tolerance.
    ResidualExceeded { residual: f64 },
    /// Remainder cluster `cluster` of the smaller model is not reached.
    NotOnto { cluster: usize, gap: f64 },
}

impl fmt::Display for Incomparable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Incomparable::NoDerivation {
                coordinate,
                function,
            } => {
                write!(f, "coordinate {coordinate} ({function}) is not derivable")
            }
            Incomparable::ResidualExceeded { residual } => {
                write!(f, "residual {residual} exceeds {BOND_TOLERANCE}")
            }
            Incomparable::NotOnto { cluster, gap } => {
                write!(f, "remainder cluster {cluster} is missed by {gap}")
            }
        }
    }
}

impl Incomparable {
    /// Whether the failure is numerical rather than structural.
    pub fn is_numeric(&self) -> bool {
        !matches!(self, Incomparable::NoDerivation { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Witness(ComparisonWitness),
    Incomparable(Incomparable),
}

impl Comparison {
    pub fn witness(&self) -> Option<&ComparisonWitness> {
        match self {
            Comparison::Witness(w) => Some(w),
            Comparison::Incomparable(_) => None,
        }
    }

    pub fn into_witness(self) -> Option<ComparisonWitness> {
        match self {
            Comparison::Witness(w) => Some(w),
            Comparison::Incomparable(_) => None,
        }
    }
}

/// Syntactic coordinate map expressing `smaller` through `larger`, or the
/// first underivable coordinate of `smaller`.
pub fn coordinate_mapping(
    larger: &FunctionFamily,
    smaller: &FunctionFamily,
) -> core::result::Result<Vec<CoordinateMap>, usize> {
    smaller
        .functions()
        .iter()
        .enumerate()
        .map(|(n, g)| {
            larger
                .derive(g)
                .map(|(source, degree)| CoordinateMap::from_degree(source, degree))
                .ok_or(n)
        })
        .collect()
}

/// `sup_x d(L(k_larger(x)), k_smaller(x))` over the smaller model's image grid.
pub fn measure_residual(
    larger: &CompactificationModel,
    smaller: &CompactificationModel,
    mapping: &[CoordinateMap],
) -> f64 {
    smaller
        .image_cloud()
        .iter()
        .map(|s| {
            let p = larger.embed(s.parameter);
            let image: Vec<f64> = mapping.iter().map(|m| m.apply(p.coords())).collect();
            distance(&image, s.point.coords())
        })
        .fold(0.0, f64::max)
}

/// Largest distance from a smaller remainder center to the nearest image of a
/// larger remainder center, with the first cluster beyond `tolerance`.
fn measure_onto_gap(
    larger: &CompactificationModel,
    smaller: &CompactificationModel,
    mapping: &[CoordinateMap],
    tolerance: f64,
) -> (f64, Option<usize>) {
    let mut index = PointIndex::new(smaller.dim(), tolerance);
    let images: Vec<Vec<f64>> = larger
        .remainder()
        .iter()
        .map(|c| mapping.iter().map(|m| m.apply(c.center.coords())).collect())
        .collect();
    for p in &images {
        index.insert(p);
    }
    let mut gap: f64 = 0.0;
    for (id, c) in smaller.remainder().iter().enumerate() {
        match index.nearest_within(c.center.coords(), tolerance) {
            Some((_, d)) => gap = gap.max(d),
            None => {
                let d = images
                    .iter()
                    .map(|p| distance(p, c.center.coords()))
                    .fold(f64::INFINITY, f64::min);
                return (d, Some(id));
            }
        }
    }
    (gap, None)
}

/// Tries to show `smaller ≤ larger`.
pub fn compare(larger: &CompactificationModel, smaller: &CompactificationModel) -> Comparison {
    let mapping = match coordinate_mapping(larger.family(), smaller.family()) {
        Ok(m) => m,
        Err(coordinate) => {
            return Comparison::Incomparable(Incomparable::NoDerivation {
                coordinate,
                function: smaller.family().functions()[coordinate].clone(),
            })
        }
    };
    let residual = measure_residual(larger, smaller, &mapping);
    if !(residual <= BOND_TOLERANCE) {
        return Comparison::Incomparable(Incomparable::ResidualExceeded { residual });
    }
    let tolerance = 2.0 * smaller.params().cluster_radius;
    let (gap, missed) = measure_onto_gap(larger, smaller, &mapping, tolerance);
    if let Some(cluster) = missed {
        return Comparison::Incomparable(Incomparable::NotOnto { cluster, gap });
    }
    Comparison::Witness(ComparisonWitness {
        mapping,
        source_dim: larger.dim(),
        residual,
        onto_gap: Some(gap),
    })
}

/// Comparable both ways.
pub fn equivalence_check(a: &CompactificationModel, b: &CompactificationModel) -> bool {
    compare(a, b).witness().is_some() && compare(b, a).witness().is_some()
}

/// Result of [`enlarge`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enlargement {
    pub model: CompactificationModel,
    /// The first projection from the new model onto the old one.
    pub witness: ComparisonWitness,
    /// The added function fails to extend to the old model.
    pub strict: bool,
    pub old_report: ExtensionReport,
}

/// Appends `f` as a new coordinate, `s ↦ (k(s), f(s))`, and rebuilds with the
/// same parameters. The enlargement is strict when `f` fails to extend to the
/// old model.
pub fn enlarge(model: &CompactificationModel, f: &FunctionDescriptor) -> Result<Enlargement> {
    let family = model.family().with(f.clone())?;
    let bigger = build_compactification(family, *model.params())?;
    let witness = match compare(&bigger, model) {
        Comparison::Witness(w) => w,
        Comparison::Incomparable(why) => {
            return Err(Error::EnlargementNotComparable(why.to_string()))
        }
    };
    let old_report = check_extendability(model, f, &DEFAULT_DELTAS)?;
    Ok(Enlargement {
        strict: old_report.verdict.fails(),
        model: bigger,
        witness,
        old_report,
    })
}
