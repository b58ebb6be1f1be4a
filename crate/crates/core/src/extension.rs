//! Continuous extension of bounded functions from ℝ to a compactification.
//!
//! A family coordinate `f_n` always extends: the extension is the coordinate
//! projection `p ↦ p_n`, and `T_d ∘ f_n` extends as `p ↦ T_d(p_n)`. For any
//! other function the decision is numerical: near each remainder point the
//! oscillation of `f` over tail witnesses must shrink to zero for a continuous
//! extension to exist, and a persistent oscillation is an obstruction.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::compactification::{CompactificationModel, TailSide};
use crate::functions::{chebyshev_t, FunctionDescriptor};
use crate::product_space::{distance, ProductPoint};
use crate::{Error, Result};

/// Radii used when none are given; the smallest nonempty radius decides.
pub const DEFAULT_DELTAS: [f64; 5] = [0.2, 0.1, 0.05, 0.02, 0.01];

/// Decision thresholds on the oscillation at the decisive radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Every cluster below this: the function extends.
    pub pass: f64,
    /// Some cluster above this (with enough witnesses): it does not.
    pub fail: f64,
    /// Witnesses required before a failure is reported.
    pub min_fail_witnesses: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            pass: 0.05,
            fail: 0.5,
            min_fail_witnesses: 100,
        }
    }
}

/// A continuous function on the compactification given by its action on
/// product coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtendedFunction {
    /// `p ↦ p_coordinate`
    Projection { coordinate: usize },
    /// `p ↦ T_degree(p_coordinate)`
    Chebyshev { degree: u32, coordinate: usize },
}

impl ExtendedFunction {
    pub fn coordinate(&self) -> usize {
        match self {
            Self::Projection { coordinate } | Self::Chebyshev { coordinate, .. } => *coordinate,
        }
    }

    pub fn evaluate(&self, p: &ProductPoint) -> Result<f64> {
        let coordinate = self.coordinate();
        let v = *p
            .coords()
            .get(coordinate)
            .ok_or(Error::CoordinateOutOfRange {
                index: coordinate,
                len: p.dim(),
            })?;
        Ok(match self {
            Self::Projection { .. } => v,
            Self::Chebyshev { degree, .. } => chebyshev_t(*degree, v),
        })
    }
}

/// The projection onto coordinate `n`, which extends `f_n`.
pub fn extend_by_projection(model: &CompactificationModel, n: usize) -> Result<ExtendedFunction> {
    if n >= model.dim() {
        return Err(Error::CoordinateOutOfRange {
            index: n,
            len: model.dim(),
        });
    }
    Ok(ExtendedFunction::Projection { coordinate: n })
}

/// Extension of `cos(n·x)` as `T_n` of the first `cos(x)` coordinate.
pub fn derived_extension(model: &CompactificationModel, n: u32) -> Result<ExtendedFunction> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "derived extension needs n >= 1".into(),
        ));
    }
    let target = FunctionDescriptor::cos(1.0, 0.0);
    let coordinate = model
        .family()
        .functions()
        .iter()
        .position(|f| *f == target)
        .ok_or(Error::NoCosCoordinate)?;
    Ok(if n == 1 {
        ExtendedFunction::Projection { coordinate }
    } else {
        ExtendedFunction::Chebyshev {
            degree: n,
            coordinate,
        }
    })
}

/// Oscillation of the function over the witnesses within one radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationRow {
    pub delta: f64,
    pub witnesses: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub oscillation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterOscillation {
    pub cluster: usize,
    pub side: TailSide,
    pub center: ProductPoint,
    /// One row per radius, in the order given.
    pub rows: Vec<OscillationRow>,
    /// Smallest radius with at least one witness.
    pub decisive_delta: f64,
    pub oscillation: f64,
    pub witnesses: usize,
    /// Midpoint of the range at the decisive radius.
    pub value: f64,
}

/// Outcome of an extendability check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// The function is a family coordinate or a Chebyshev polynomial of one.
    ExtendsByProjection { coordinate: usize, degree: u32 },
    /// Every cluster oscillates less than the pass threshold; `values[c]` is
    /// the extension's value at cluster `c`.
    ExtendsNumerically { values: Vec<f64> },
    /// Cluster `cluster` oscillates more than the fail threshold;
    /// `offending` lists every such cluster.
    FailsToExtend {
        cluster: usize,
        oscillation: f64,
        witnesses: usize,
        offending: Vec<usize>,
    },
    /// Neither threshold is conclusive; `cluster` has the largest oscillation.
    Inconclusive { cluster: usize, oscillation: f64 },
}

impl Verdict {
    pub fn fails(&self) -> bool {
        matches!(self, Verdict::FailsToExtend { .. })
    }

    pub fn extends(&self) -> bool {
        matches!(
            self,
            Verdict::ExtendsByProjection { .. } | Verdict::ExtendsNumerically { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::ExtendsByProjection { .. } => "ExtendsByProjection",
            Verdict::ExtendsNumerically { .. } => "ExtendsNumerically",
            Verdict::FailsToExtend { .. } => "FailsToExtend",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub function: FunctionDescriptor,
    /// Final verdict: syntactic when the function is derived from a
    /// coordinate, numerical otherwise.
    pub verdict: Verdict,
    /// The oscillation-based verdict, always computed.
    pub numeric: Verdict,
    pub clusters: Vec<ClusterOscillation>,
    pub deltas: Vec<f64>,
    pub thresholds: Thresholds,
}

impl ExtensionReport {
    /// The closed-form extension when the verdict is syntactic.
    pub fn extension(&self) -> Option<ExtendedFunction> {
        match self.verdict {
            Verdict::ExtendsByProjection {
                coordinate,
                degree: 1,
            } => Some(ExtendedFunction::Projection { coordinate }),
            Verdict::ExtendsByProjection { coordinate, degree } => {
                Some(ExtendedFunction::Chebyshev { degree, coordinate })
            }
            _ => None,
        }
    }
}

/// Decides whether `f` extends continuously to the model, with default thresholds.
pub fn check_extendability(
    model: &CompactificationModel,
    f: &FunctionDescriptor,
    deltas: &[f64],
) -> Result<ExtensionReport> {
    check_extendability_with(model, f, deltas, Thresholds::default())
}

/// [`check_extendability`] with explicit thresholds.
pub fn check_extendability_with(
    model: &CompactificationModel,
    f: &FunctionDescriptor,
    deltas: &[f64],
    thresholds: Thresholds,
) -> Result<ExtensionReport> {
    f.validate()?;
    if deltas.is_empty()
        || deltas.iter().any(|d| !(d.is_finite() && *d > 0.0))
        || deltas.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidParameter(
            "deltas must be positive and strictly decreasing".into(),
        ));
    }
    if model.remainder().is_empty() {
        return Err(Error::EmptyRemainder);
    }

    let clusters = model
        .remainder()
        .iter()
        .enumerate()
        .map(|(id, _)| cluster_oscillation(model, f, id, deltas))
        .collect::<Result<Vec<_>>>()?;
    let numeric = numeric_verdict(&clusters, thresholds);
    let verdict = match model.family().derive(f) {
        Some((coordinate, degree)) => Verdict::ExtendsByProjection { coordinate, degree },
        None => numeric.clone(),
    };
    Ok(ExtensionReport {
        function: f.clone(),
        verdict,
        numeric,
        clusters,
        deltas: deltas.to_vec(),
        thresholds,
    })
}

fn cluster_oscillation(
    model: &CompactificationModel,
    f: &FunctionDescriptor,
    id: usize,
    deltas: &[f64],
) -> Result<ClusterOscillation> {
    let cluster = &model.remainder()[id];
    let center = cluster.center.coords();
    let samples: Vec<(f64, f64)> = cluster
        .witnesses
        .iter()
        .map(|&x| (distance(model.embed(x).coords(), center), f.evaluate(x)))
        .collect();
    let rows: Vec<OscillationRow> = deltas
        .iter()
        .map(|&delta| {
            let mut n = 0;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &(d, v) in &samples {
                if d < delta {
                    n += 1;
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            let (min, max, oscillation) = if n > 0 {
                (Some(lo), Some(hi), Some(hi - lo))
            } else {
                (None, None, None)
            };
            OscillationRow {
                delta,
                witnesses: n,
                min,
                max,
                oscillation,
            }
        })
        .collect();
    let decisive = rows
        .iter()
        .rev()
        .find(|r| r.witnesses > 0)
        .ok_or(Error::NoWitnesses { cluster: id })?;
    let (lo, hi) = (decisive.min.unwrap_or(0.0), decisive.max.unwrap_or(0.0));
    Ok(ClusterOscillation {
        cluster: id,
        side: cluster.side,
        center: cluster.center.clone(),
        decisive_delta: decisive.delta,
        oscillation: hi - lo,
        witnesses: decisive.witnesses,
        value: lo + (hi - lo) / 2.0,
        rows,
    })
}

fn numeric_verdict(clusters: &[ClusterOscillation], t: Thresholds) -> Verdict {
    let worst = clusters
        .iter()
        .fold(None::<&ClusterOscillation>, |best, c| match best {
            Some(b) if b.oscillation >= c.oscillation => best,
            _ => Some(c),
        });
    let Some(worst) = worst else {
        return Verdict::ExtendsNumerically { values: Vec::new() };
    };
    let offending: Vec<&ClusterOscillation> = clusters
        .iter()
        .filter(|c| c.oscillation > t.fail && c.witnesses >= t.min_fail_witnesses)
        .collect();
    if let Some(first) = offending
        .iter()
        .copied()
        .fold(None::<&ClusterOscillation>, |best, c| match best {
            Some(b) if b.oscillation >= c.oscillation => best,
            _ => Some(c),
        })
    {
        return Verdict::FailsToExtend {
            cluster: first.cluster,
            oscillation: first.oscillation,
            witnesses: first.witnesses,
            offending: offending.iter().map(|c| c.cluster).collect(),
        };
    }
    if worst.oscillation < t.pass {
        Verdict::ExtendsNumerically {
            values: clusters.iter().map(|c| c.value).collect(),
        }
    } else {
        Verdict::Inconclusive {
            cluster: worst.cluster,
            oscillation: worst.oscillation,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compactification::{build_compactification, BuildParams};
    use crate::functions::FunctionFamily;
    use alloc::vec;
    use FunctionDescriptor as F;

    fn params() -> BuildParams {
        BuildParams {
            r_image: 10.0,
            r_tail_lo: 50.0,
            r_tail_hi: 600.0,
            grid_step: 1e-2,
            tail_step: 1e-2,
            cluster_radius: 0.05,
        }
    }

    fn model(fs: Vec<F>) -> CompactificationModel {
        build_compactification(FunctionFamily::new(fs).unwrap(), params()).unwrap()
    }

    #[test]
    fn projection_reads_coordinates() {
        let m = model(vec![F::tanh(1.0, 0.0), F::cos(1.0, 0.0)]);
        let g = extend_by_projection(&m, 1).unwrap();
        for s in m.image_cloud() {
            assert_eq!(
                g.evaluate(&s.point).unwrap(),
                F::cos(1.0, 0.0).evaluate(s.parameter)
            );
        }
        assert!(extend_by_projection(&m, 2).is_err());
        let h = extend_by_projection(&m, 0).unwrap();
        for c in m.remainder().iter().filter(|c| c.side == TailSide::Plus) {
            assert!((h.evaluate(&c.center).unwrap() - 1.0).abs() < 0.02);
            assert_eq!(g.evaluate(&c.center).unwrap(), c.center.coords()[1]);
        }
    }

    #[test]
    fn derived_extension_uses_chebyshev() {
        let m = model(vec![F::tanh(1.0, 0.0), F::cos(1.0, 0.0)]);
        assert_eq!(
            derived_extension(&m, 1).unwrap(),
            extend_by_projection(&m, 1).unwrap()
        );
        let g = derived_extension(&m, 2).unwrap();
        let c = ProductPoint::new(vec![1.0, 0.3]);
        assert!((g.evaluate(&c).unwrap() - (2.0 * 0.09 - 1.0)).abs() < 1e-15);
        let g5 = derived_extension(&m, 5).unwrap();
        let worst = m
            .image_cloud()
            .iter()
            .map(|s| (g5.evaluate(&s.point).unwrap() - (5.0 * s.parameter).cos()).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-9, "{worst}");
        assert!(derived_extension(&m, 0).is_err());
        let t = model(vec![F::tanh(1.0, 0.0)]);
        assert_eq!(derived_extension(&t, 2), Err(Error::NoCosCoordinate));
    }

    #[test]
    fn cos_fails_on_two_point_model() {
        let m = model(vec![F::tanh(1.0, 0.0)]);
        let r = check_extendability(&m, &F::cos(1.0, 0.0), &DEFAULT_DELTAS).unwrap();
        let Verdict::FailsToExtend {
            oscillation,
            witnesses,
            offending,
            ..
        } = &r.verdict
        else {
            panic!("{:?}", r.verdict)
        };
        assert!(*oscillation >= 1.9 && *witnesses >= 100);
        let plus = m
            .remainder()
            .iter()
            .position(|c| c.side == TailSide::Plus)
            .unwrap();
        assert!(offending.contains(&plus));
    }

    #[test]
    fn coordinate_functions_extend_by_projection() {
        let m = model(vec![F::tanh(1.0, 0.0), F::cos(1.0, 0.0)]);
        let r = check_extendability(&m, &F::cos(1.0, 0.0), &DEFAULT_DELTAS).unwrap();
        assert_eq!(
            r.verdict,
            Verdict::ExtendsByProjection {
                coordinate: 1,
                degree: 1
            }
        );
        let r = check_extendability(&m, &F::cheb(2, F::cos(1.0, 0.0)), &DEFAULT_DELTAS).unwrap();
        assert_eq!(
            r.verdict,
            Verdict::ExtendsByProjection {
                coordinate: 1,
                degree: 2
            }
        );
        assert_eq!(
            r.extension(),
            Some(ExtendedFunction::Chebyshev {
                degree: 2,
                coordinate: 1
            })
        );
    }

    #[test]
    fn oscillation_is_monotone_in_delta() {
        let m = model(vec![F::tanh(1.0, 0.0), F::cos(1.0, 0.0)]);
        let r = check_extendability(&m, &F::cos(core::f64::consts::SQRT_2, 0.0), &DEFAULT_DELTAS)
            .unwrap();
        assert!(r.verdict.fails());
        for c in &r.clusters {
            for w in c.rows.windows(2) {
                assert!(w[0].witnesses >= w[1].witnesses);
                if let (Some(a), Some(b)) = (w[0].oscillation, w[1].oscillation) {
                    assert!(a >= b);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_deltas() {
        let m = model(vec![F::tanh(1.0, 0.0)]);
        let f = F::cos(1.0, 0.0);
        assert!(check_extendability(&m, &f, &[]).is_err());
        assert!(check_extendability(&m, &f, &[0.1, 0.2]).is_err());
        assert!(check_extendability(&m, &f, &[0.1, 0.0]).is_err());
    }

    #[test]
    fn no_witnesses_is_an_error() {
        let m = model(vec![F::tanh(1.0, 0.0)]);
        // Saturated tanh puts every tail image exactly on its center.
        assert!(check_extendability(&m, &F::cos(1.0, 0.0), &[1e-300]).is_ok());
        let stereo = model(vec![F::StereoX, F::StereoY]);
        assert_eq!(
            check_extendability(&stereo, &F::cos(1.0, 0.0), &[1e-12]).unwrap_err(),
            Error::NoWitnesses { cluster: 0 }
        );
    }

    #[test]
    fn inconclusive_band_is_reported() {
        let clusters = vec![ClusterOscillation {
            cluster: 0,
            side: TailSide::Plus,
            center: ProductPoint::new(vec![1.0]),
            rows: vec![],
            decisive_delta: 0.01,
            oscillation: 0.2,
            witnesses: 1000,
            value: 0.0,
        }];
        assert_eq!(
            numeric_verdict(&clusters, Thresholds::default()),
            Verdict::Inconclusive {
                cluster: 0,
                oscillation: 0.2
            }
        );
        let mut few = clusters.clone();
        few[0].oscillation = 1.0;
        few[0].witnesses = 99;
        assert!(matches!(
            numeric_verdict(&few, Thresholds::default()),
            Verdict::Inconclusive { .. }
        ));
    }
}
