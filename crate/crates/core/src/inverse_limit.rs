//! Inverse limits of finite chains `δ_0ℝ ≤ δ_1ℝ ≤ … ≤ δ_Kℝ`.
//!
//! Level `n + 1` maps onto level `n` by the bond `d_n`, a verified
//! [`ComparisonWitness`]. A [`Thread`] picks one point per level with
//! `x(n) = d_n(x(n+1))`; the chain limit is the compactification generated by
//! the union of the level families, which dominates every level.
//!
//! Tolerances: coordinate-copy bonds are exact, Chebyshev bonds hold to
//! [`BOND_TOLERANCE`], and anything resolved against sampled clouds (lifting)
//! holds to twice the level's cluster radius.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::compactification::{argmin, build_compactification, CompactificationModel};
use crate::functions::FunctionFamily;
use crate::ordering::{compare, Comparison, ComparisonWitness};
use crate::product_space::{distance, ProductPoint};
use crate::{Error, Result, BOND_TOLERANCE};

/// One point per level of an inverse system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thread {
    entries: Vec<ProductPoint>,
}

impl Thread {
    pub fn new(entries: Vec<ProductPoint>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[ProductPoint] {
        &self.entries
    }

    pub fn entry(&self, level: usize) -> Option<&ProductPoint> {
        self.entries.get(level)
    }

    pub fn depth(&self) -> usize {
        self.entries.len()
    }
}

/// Per-candidate outcome of [`InverseSystem::verify_closedness_sample`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosednessEntry {
    pub member: bool,
    /// `d(d_n(x(n+1)), x(n))`, or `None` when the dimensions do not fit.
    pub residuals: Vec<Option<f64>>,
    /// Levels `n` whose compatibility equation fails.
    pub violated: Vec<usize>,
}

/// A chain of compactifications with bonding maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseSystem {
    levels: Vec<CompactificationModel>,
    bonds: Vec<ComparisonWitness>,
}

impl InverseSystem {
    /// Computes every bond with [`compare`]; each must be a witness.
    pub fn new(levels: Vec<CompactificationModel>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptySystem);
        }
        let bonds = levels
            .windows(2)
            .enumerate()
            .map(|(n, pair)| match compare(&pair[1], &pair[0]) {
                Comparison::Witness(w) => Ok(w),
                Comparison::Incomparable(why) => Err(Error::BrokenBond {
                    level: n,
                    reason: alloc::string::ToString::to_string(&why),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(levels, bonds)
    }

    /// Assembles a system from precomputed bonds, checking their shapes and residuals.
    pub fn from_parts(
        levels: Vec<CompactificationModel>,
        bonds: Vec<ComparisonWitness>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptySystem);
        }
        if bonds.len() + 1 != levels.len() {
            return Err(Error::BrokenBond {
                level: bonds.len(),
                reason: alloc::format!("{} bonds for {} levels", bonds.len(), levels.len()),
            });
        }
        for (n, bond) in bonds.iter().enumerate() {
            if bond.source_dim != levels[n + 1].dim() || bond.target_dim() != levels[n].dim() {
                return Err(Error::BrokenBond {
                    level: n,
                    reason: "bond dimensions do not match the levels".into(),
                });
            }
            if !(bond.residual <= BOND_TOLERANCE) {
                return Err(Error::BrokenBond {
                    level: n,
                    reason: alloc::format!("residual {} exceeds {BOND_TOLERANCE}", bond.residual),
                });
            }
        }
        Ok(Self { levels, bonds })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[CompactificationModel] {
        &self.levels
    }

    pub fn bonds(&self) -> &[ComparisonWitness] {
        &self.bonds
    }

    fn check_level(&self, level: usize) -> Result<&CompactificationModel> {
        self.levels.get(level).ok_or(Error::LevelOutOfRange {
            level,
            depth: self.depth(),
        })
    }

    /// `d_n`: maps a point of level `n + 1` to level `n`.
    pub fn apply_bond(&self, n: usize, p: &ProductPoint) -> Result<ProductPoint> {
        let bond = self.bonds.get(n).ok_or(Error::LevelOutOfRange {
            level: n + 1,
            depth: self.depth(),
        })?;
        bond.apply(p)
    }

    /// Composite bond from level `from` down to level `to ≤ from`.
    pub fn project(&self, from: usize, to: usize, p: &ProductPoint) -> Result<ProductPoint> {
        self.check_level(from)?;
        if to > from {
            return Err(Error::LevelOutOfRange {
                level: to,
                depth: from + 1,
            });
        }
        let mut q = p.clone();
        for n in (to..from).rev() {
            q = self.apply_bond(n, &q)?;
        }
        Ok(q)
    }

    /// The thread `(k_0(x), …, k_K(x))` of a real parameter.
    pub fn make_thread_from_parameter(&self, x: f64) -> Thread {
        Thread::new(self.levels.iter().map(|m| m.embed(x)).collect())
    }

    /// `d(d_n(x(n+1)), x(n))` for every `n`.
    pub fn compatibility_residuals(&self, thread: &Thread) -> Result<Vec<f64>> {
        if thread.depth() != self.depth() {
            return Err(Error::DimensionMismatch {
                expected: self.depth(),
                found: thread.depth(),
            });
        }
        (0..self.bonds.len())
            .map(|n| {
                let down = self.apply_bond(n, &thread.entries[n + 1])?;
                if down.dim() != thread.entries[n].dim() {
                    return Err(Error::DimensionMismatch {
                        expected: thread.entries[n].dim(),
                        found: down.dim(),
                    });
                }
                Ok(distance(down.coords(), thread.entries[n].coords()))
            })
            .collect()
    }

    /// A thread through (a sampled neighbour of) `p` at level `n`.
    ///
    /// The level-`n` entry is the nearest remainder center or image sample of
    /// that level. Lower levels follow by applying bonds. Each higher level
    /// takes the candidate whose bond image is nearest to the entry below.
    /// Remainder centers are searched before image samples and ties go to the
    /// lowest index. Every match must lie within twice the level's cluster
    /// radius.
    pub fn lift_point(&self, n: usize, p: &ProductPoint) -> Result<Thread> {
        let level = self.check_level(n)?;
        if p.dim() != level.dim() {
            return Err(Error::DimensionMismatch {
                expected: level.dim(),
                found: p.dim(),
            });
        }
        let mut entries: Vec<Option<ProductPoint>> = alloc::vec![None; self.depth()];
        entries[n] = Some(nearest_candidate(level, n, p.coords(), |c| c.to_vec())?);
        for i in n + 1..self.depth() {
            let below = entries[i - 1]
                .as_ref()
                .map(|e| e.coords().to_vec())
                .unwrap_or_default();
            let bond = &self.bonds[i - 1];
            entries[i] = Some(nearest_candidate(&self.levels[i], i, &below, |c| {
                bond.apply_coords(c)
            })?);
        }
        for i in (0..n).rev() {
            let above = entries[i + 1].as_ref().expect("filled above");
            entries[i] = Some(self.apply_bond(i, above)?);
        }
        Ok(Thread::new(
            entries
                .into_iter()
                .map(|e| e.expect("all levels filled"))
                .collect(),
        ))
    }

    /// The compactification generated by the union of all level families.
    ///
    /// The deepest family comes first (keeping its injective coordinate 0),
    /// followed by any coordinate of a shallower level not already present.
    /// When nothing is added the deepest level is returned as is, which is
    /// what a rebuild with the same parameters would produce.
    pub fn chain_limit(&self) -> Result<CompactificationModel> {
        let deepest = self.levels.last().ok_or(Error::EmptySystem)?;
        let mut functions = deepest.family().functions().to_vec();
        for level in &self.levels {
            for f in level.family().functions() {
                if !functions.contains(f) {
                    functions.push(f.clone());
                }
            }
        }
        let family = FunctionFamily::new(functions)?;
        if &family == deepest.family() {
            return Ok(deepest.clone());
        }
        build_compactification(family, *deepest.params())
    }

    /// Membership of candidate tuples in the inverse limit: every
    /// compatibility equation must hold within [`BOND_TOLERANCE`].
    pub fn verify_closedness_sample(
        &self,
        candidates: &[Vec<ProductPoint>],
    ) -> Vec<ClosednessEntry> {
        candidates
            .iter()
            .map(|tuple| {
                let pairs = tuple.len().min(self.depth()).saturating_sub(1);
                let residuals: Vec<Option<f64>> = (0..pairs)
                    .map(|n| {
                        let down = self.apply_bond(n, &tuple[n + 1]).ok()?;
                        (down.dim() == tuple[n].dim())
                            .then(|| distance(down.coords(), tuple[n].coords()))
                    })
                    .collect();
                let violated: Vec<usize> = residuals
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| !matches!(r, Some(d) if *d <= BOND_TOLERANCE))
                    .map(|(n, _)| n)
                    .collect();
                ClosednessEntry {
                    member: tuple.len() == self.depth() && violated.is_empty(),
                    residuals,
                    violated,
                }
            })
            .collect()
    }
}

fn nearest_candidate(
    model: &CompactificationModel,
    level: usize,
    target: &[f64],
    map: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<ProductPoint> {
    let candidates: Vec<&[f64]> = model
        .remainder()
        .iter()
        .map(|c| c.center.coords())
        .chain(model.image_cloud().iter().map(|s| s.point.coords()))
        .collect();
    let tolerance = 2.0 * model.params().cluster_radius;
    match argmin(candidates.iter().map(|c| distance(&map(c), target))) {
        Some((i, d)) if d <= tolerance => Ok(ProductPoint::new(candidates[i].to_vec())),
        best => Err(Error::LiftFailed {
            level,
            nearest: best.map_or(f64::INFINITY, |(_, d)| d),
            tolerance,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compactification::BuildParams;
    use crate::functions::FunctionDescriptor as F;
    use crate::ordering::equivalence_check;
    use alloc::vec;

    fn params() -> BuildParams {
        BuildParams {
            r_image: 10.0,
            r_tail_lo: 50.0,
            r_tail_hi: 400.0,
            grid_step: 1e-2,
            tail_step: 1e-2,
            cluster_radius: 0.05,
        }
    }

    fn model(fs: Vec<F>) -> CompactificationModel {
        build_compactification(FunctionFamily::new(fs).unwrap(), params()).unwrap()
    }

    fn system() -> InverseSystem {
        InverseSystem::new(vec![
            model(vec![F::tanh(1.0, 0.0)]),
            model(vec![F::tanh(1.0, 0.0), F::cos(1.0, 0.0)]),
            model(vec![F::tanh(1.0, 0.0), F::cos(1.0, 0.0), F::cos(2.0, 0.0)]),
        ])
        .unwrap()
    }

    #[test]
    fn bonds_drop_and_transform() {
        let s = system();
        assert_eq!(
            s.apply_bond(1, &ProductPoint::new(vec![0.1, 0.2, 0.3]))
                .unwrap(),
            ProductPoint::new(vec![0.1, 0.2])
        );
        assert!(s.apply_bond(1, &ProductPoint::new(vec![0.1])).is_err());
        assert!(s.apply_bond(2, &ProductPoint::new(vec![0.1])).is_err());
    }

    #[test]
    fn chebyshev_bond() {
        let levels = vec![
            model(vec![F::tanh(1.0, 0.0), F::cos(2.0, 0.0)]),
            model(vec![F::tanh(1.0, 0.0), F::cos(1.0, 0.0)]),
        ];
        let s = InverseSystem::new(levels).unwrap();
        let (t, c) = (0.25, 0.6);
        let down = s.apply_bond(0, &ProductPoint::new(vec![t, c])).unwrap();
        assert_eq!(down.coords()[0], t);
        assert!((down.coords()[1] - (2.0 * c * c - 1.0)).abs() < 1e-15);
        for i in 0..200 {
            let x = -10.0 + 0.1 * i as f64;
            let d = s.apply_bond(0, &s.levels()[1].embed(x)).unwrap();
            assert!(distance(d.coords(), s.levels()[0].embed(x).coords()) <= 1e-9);
        }
    }

    #[test]
    fn incompatible_levels_are_rejected() {
        let levels = vec![
            model(vec![F::tanh(1.0, 0.0), F::cos(1.0, 0.0)]),
            model(vec![F::tanh(1.0, 0.0)]),
        ];
        assert!(matches!(
            InverseSystem::new(levels),
            Err(Error::BrokenBond { level: 0, .. })
        ));
        assert_eq!(InverseSystem::new(vec![]).unwrap_err(), Error::EmptySystem);
    }

    #[test]
    fn threads_from_parameters() {
        let s = system();
        let t = s.make_thread_from_parameter(0.0);
        assert_eq!(t.entry(0).unwrap().coords(), &[0.0]);
        assert_eq!(t.entry(1).unwrap().coords(), &[0.0, 1.0]);
        for i in 0..100 {
            let x = -10.0 + 0.2 * i as f64;
            let t = s.make_thread_from_parameter(x);
            assert!(s
                .compatibility_residuals(&t)
                .unwrap()
                .iter()
                .all(|r| *r <= BOND_TOLERANCE));
            for n in 0..s.depth() {
                let down = s
                    .project(s.depth() - 1, n, t.entry(s.depth() - 1).unwrap())
                    .unwrap();
                assert!(distance(down.coords(), s.levels()[n].embed(x).coords()) <= 2e-9);
            }
        }
    }

    #[test]
    fn lifting_recovers_parameter_threads() {
        let s = system();
        for x0 in [-7.5, -1.0, 0.0, 2.5, 9.0] {
            for n in 0..s.depth() {
                let p = s.levels()[n].embed(x0);
                let lifted = s.lift_point(n, &p).unwrap();
                let expect = s.make_thread_from_parameter(x0);
                for (a, b) in lifted.entries().iter().zip(expect.entries()) {
                    assert!(distance(a.coords(), b.coords()) <= 0.1);
                }
                // Below n the thread is iterated bond application exactly.
                for i in 0..n {
                    assert_eq!(
                        lifted.entry(i).unwrap(),
                        &s.apply_bond(i, lifted.entry(i + 1).unwrap()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn lifting_a_remainder_point() {
        let s = system();
        let t = s.lift_point(0, &ProductPoint::new(vec![1.0])).unwrap();
        let e1 = t.entry(1).unwrap();
        assert_eq!(e1.coords()[0], 1.0);
        assert!(s.levels()[1].remainder().iter().any(|c| &c.center == e1));
        assert_eq!(t, s.lift_point(0, &ProductPoint::new(vec![1.0])).unwrap());
    }

    #[test]
    fn lifting_fails_far_from_samples() {
        let s = system();
        let err = s
            .lift_point(1, &ProductPoint::new(vec![0.0, -1.0]))
            .unwrap_err();
        assert!(matches!(err, Error::LiftFailed { level: 1, .. }));
    }

    #[test]
    fn chain_limit_dominates() {
        let s = system();
        let limit = s.chain_limit().unwrap();
        assert!(equivalence_check(&limit, &s.levels()[2]));
        for level in s.levels() {
            assert!(compare(&limit, level).witness().is_some());
        }
        let single = InverseSystem::new(vec![model(vec![F::tanh(1.0, 0.0)])]).unwrap();
        assert!(equivalence_check(
            &single.chain_limit().unwrap(),
            &single.levels()[0]
        ));
    }

    #[test]
    fn closedness_sample() {
        let s = system();
        let good = s.make_thread_from_parameter(1.5).entries().to_vec();
        let mut bad = good.clone();
        let mut c = bad[0].coords().to_vec();
        c[0] += 0.5;
        bad[0] = ProductPoint::new(c);
        let report = s.verify_closedness_sample(&[good, bad]);
        assert!(report[0].member);
        assert!(!report[1].member);
        assert_eq!(report[1].violated, vec![0]);
        assert!(s.verify_closedness_sample(&[]).is_empty());
    }
}
