//! Finite products of closed intervals with the weighted capped metric
//!
//! `d(x, y) = Σ_n min{1, |x_n − y_n|} / 2^n`.
//!
//! A countable product is represented by its first `N` coordinates; the mass
//! ignored by truncating is at most [`tail_bound`]`(N) = 2^{1−N}`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidParameter(alloc::format!(
                "[{lo}, {hi}] is not a closed interval"
            )))
        }
    }

    pub fn point(c: f64) -> Self {
        Self { lo: c, hi: c }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.max(self.lo).min(self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A point of a finite product of intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductPoint(Vec<f64>);

impl ProductPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for ProductPoint {
    fn from(coords: Vec<f64>) -> Self {
        Self(coords)
    }
}

/// The product `I_0 × … × I_{N−1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductSpace {
    intervals: Vec<Interval>,
}

impl ProductSpace {
    pub fn new(intervals: Vec<Interval>) -> Self {
        Self { intervals }
    }

    /// `[-1, 1]^dim`
    pub fn cube(dim: usize) -> Self {
        Self::new(alloc::vec![Interval { lo: -1.0, hi: 1.0 }; dim])
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Builds a point, checking dimension and exact interval containment.
    pub fn point(&self, coords: Vec<f64>) -> Result<ProductPoint> {
        let p = ProductPoint(coords);
        self.check(&p)?;
        Ok(p)
    }

    pub fn check(&self, p: &ProductPoint) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.dim(),
            });
        }
        for (index, (iv, &value)) in self.intervals.iter().zip(p.coords()).enumerate() {
            if !iv.contains(value) {
                return Err(Error::OutOfInterval {
                    index,
                    value,
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &ProductPoint) -> bool {
        self.check(p).is_ok()
    }

    /// Coordinatewise clamp into the space.
    pub fn clamp(&self, coords: &mut [f64]) {
        for (v, iv) in coords.iter_mut().zip(&self.intervals) {
            *v = iv.clamp(*v);
        }
    }

    pub fn metric(&self) -> ProductMetric {
        ProductMetric::new(self.dim())
    }
}

/// `min{1, |u − v|}`
pub fn cap_metric(u: f64, v: f64) -> f64 {
    (u - v).abs().min(1.0)
}

/// Weighted capped distance over the common prefix of two coordinate slices.
pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    let mut weight = 1.0;
    let mut sum = 0.0;
    for (u, v) in a.iter().zip(b) {
        sum += cap_metric(*u, *v) * weight;
        weight *= 0.5;
    }
    sum
}

/// `Σ_n min{1, |x_n − y_n|} / 2^n`; errors if the dimensions differ.
pub fn product_distance(x: &ProductPoint, y: &ProductPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(distance(x.coords(), y.coords()))
}

/// Upper bound `2^{1−N}` on the metric mass of coordinates `N, N+1, …`.
pub fn tail_bound(n: usize) -> f64 {
    libm::ldexp(1.0, 1 - n as i32)
}

/// The weighted capped product metric on `N` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductMetric {
    dim: usize,
}

impl ProductMetric {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `2^{-n}`
    pub fn weight(&self, n: usize) -> f64 {
        libm::ldexp(1.0, -(n as i32))
    }

    /// `Σ_{n<N} 2^{-n}`, strictly below 2.
    pub fn diameter_bound(&self) -> f64 {
        2.0 - tail_bound(self.dim)
    }

    pub fn distance(&self, x: &ProductPoint, y: &ProductPoint) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        product_distance(x, y)
    }
}

/// Which implication of the ball/cylinder comparison failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InclusionKind {
    /// `d(x, y) < r/2^n` but `d_n(x_n, y_n) ≥ r`.
    Projection,
    /// `d_n < r/4` on coordinates `0..=k` but `d(x, y) ≥ r`.
    Cylinder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionViolation {
    pub pair: usize,
    pub coordinate: Option<usize>,
    pub kind: InclusionKind,
    pub distance: f64,
}

/// Outcome of [`check_ball_cylinder_inclusions`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub radius: f64,
    /// Smallest `k` with `2^{-k} < r/2`.
    pub k: usize,
    pub pairs_checked: usize,
    /// Number of (pair, coordinate) cases where the projection premise held.
    pub projection_premises: usize,
    /// Number of pairs inside the cylinder around the first point.
    pub cylinder_premises: usize,
    pub violations: Vec<InclusionViolation>,
}

/// Checks both inclusions between metric balls and product cylinders:
///
/// * projection: `d(x, y) < r/2^n` implies `d_n(x_n, y_n) < r`;
/// * cylinder: with `k` minimal such that `2^{-k} < r/2`, if
///   `d_n(x_n, y_n) < r/4` for every `n ≤ k` then `d(x, y) < r`.
pub fn check_ball_cylinder_inclusions(
    space: &ProductSpace,
    pairs: &[(ProductPoint, ProductPoint)],
    r: f64,
) -> Result<InclusionReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!(
            "radius must be positive, got {r}"
        )));
    }
    let mut k = 0usize;
    while libm::ldexp(1.0, -(k as i32)) >= r / 2.0 {
        k += 1;
    }
    let metric = space.metric();
    let mut report = InclusionReport {
        radius: r,
        k,
        pairs_checked: 0,
        projection_premises: 0,
        cylinder_premises: 0,
        violations: Vec::new(),
    };
    for (pair, (x, y)) in pairs.iter().enumerate() {
        space.check(x)?;
        space.check(y)?;
        let d = metric.distance(x, y)?;
        for n in 0..space.dim() {
            if d < r * metric.weight(n) {
                report.projection_premises += 1;
                if cap_metric(x.coords()[n], y.coords()[n]) >= r {
                    report.violations.push(InclusionViolation {
                        pair,
                        coordinate: Some(n),
                        kind: InclusionKind::Projection,
                        distance: d,
                    });
                }
            }
        }
        let head = (k + 1).min(space.dim());
        let in_cylinder = x.coords()[..head]
            .iter()
            .zip(&y.coords()[..head])
            .all(|(u, v)| cap_metric(*u, *v) < r / 4.0);
        if in_cylinder {
            report.cylinder_premises += 1;
            if d >= r {
                report.violations.push(InclusionViolation {
                    pair,
                    coordinate: None,
                    kind: InclusionKind::Cylinder,
                    distance: d,
                });
            }
        }
        report.pairs_checked += 1;
    }
    Ok(report)
}
