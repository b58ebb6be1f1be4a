//! The embedding `k(x) = (f_0(x), …, f_{N−1}(x))` of ℝ into a product of
//! intervals, and a sampled model of the closure of its image.
//!
//! The image is sampled on a uniform grid over `[-r_image, r_image]`. The
//! remainder (the points of the closure not in `k(ℝ)`) is exactly the set of
//! limit points of `k(x)` as `|x| → ∞`, so it is approximated from the tails
//! `±[r_tail_lo, r_tail_hi]` rather than by gridding the product space. Tail
//! samples are grouped by greedy radius clustering in increasing-`x` order:
//! the first unassigned sample founds a cluster, later samples join the
//! nearest existing seed within `cluster_radius`, and each center is finally
//! replaced by the coordinatewise mean of its members.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::functions::FunctionFamily;
use crate::index::PointIndex;
use crate::product_space::{distance, ProductPoint, ProductSpace};
use crate::{Error, Result};

/// Sampling parameters for [`build_compactification`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildParams {
    /// Half-width of the image grid.
    pub r_image: f64,
    /// Inner end of the tail grids.
    pub r_tail_lo: f64,
    /// Outer end of the tail grids.
    pub r_tail_hi: f64,
    /// Step of the image grid.
    pub grid_step: f64,
    /// Step of the tail grids.
    pub tail_step: f64,
    /// Clustering radius under the product metric.
    pub cluster_radius: f64,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self {
            r_image: 50.0,
            r_tail_lo: 50.0,
            r_tail_hi: 2000.0,
            grid_step: 1e-3,
            tail_step: 1e-2,
            cluster_radius: 0.05,
        }
    }
}

impl BuildParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.r_image,
            self.r_tail_lo,
            self.r_tail_hi,
            self.grid_step,
            self.tail_step,
            self.cluster_radius,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter(
                "build parameters must be finite and positive".into(),
            ));
        }
        if !(self.r_tail_hi > self.r_tail_lo && self.r_tail_lo >= self.r_image) {
            return Err(Error::InvalidParameter(
                "need r_tail_hi > r_tail_lo >= r_image".into(),
            ));
        }
        if self.grid_step > 2.0 * self.r_image {
            return Err(Error::EmptyGrid {
                step: self.grid_step,
                span: 2.0 * self.r_image,
            });
        }
        Ok(())
    }

    /// Image grid `-r_image, -r_image + step, …` up to `r_image`.
    pub fn image_grid(&self) -> Vec<f64> {
        let m = libm::floor(2.0 * self.r_image / self.grid_step + 1e-9) as usize;
        (0..=m)
            .map(|i| -self.r_image + i as f64 * self.grid_step)
            .collect()
    }

    /// Both tail grids in increasing order: `-r_tail_hi ..= -r_tail_lo` then
    /// `r_tail_lo ..= r_tail_hi`, the negative tail being the exact mirror of
    /// the positive one.
    pub fn tail_grid(&self) -> Vec<f64> {
        let m = libm::floor((self.r_tail_hi - self.r_tail_lo) / self.tail_step + 1e-9) as usize;
        let plus = (0..=m).map(|i| self.r_tail_lo + i as f64 * self.tail_step);
        let minus = (0..=m)
            .rev()
            .map(|i| -(self.r_tail_lo + i as f64 * self.tail_step));
        minus.chain(plus).collect()
    }
}

/// `x ↦ (f_0(x), …, f_{N−1}(x))`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMap {
    family: FunctionFamily,
}

impl EmbeddingMap {
    pub fn new(family: FunctionFamily) -> Self {
        Self { family }
    }

    pub fn family(&self) -> &FunctionFamily {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.family.len()
    }

    /// Product of the range intervals of the family.
    pub fn space(&self) -> ProductSpace {
        ProductSpace::new(self.family.intervals())
    }

    pub fn embed(&self, x: f64) -> ProductPoint {
        ProductPoint::new(
            self.family
                .functions()
                .iter()
                .map(|f| f.evaluate(x))
                .collect(),
        )
    }

    fn embed_into(&self, x: f64, out: &mut Vec<f64>) {
        out.extend(self.family.functions().iter().map(|f| f.evaluate(x)));
    }
}

/// A grid parameter and its image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageSample {
    pub parameter: f64,
    pub point: ProductPoint,
}

/// Which tail(s) of ℝ a remainder cluster was reached from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailSide {
    #[serde(rename = "+inf")]
    Plus,
    #[serde(rename = "-inf")]
    Minus,
    #[serde(rename = "both")]
    Both,
}

impl TailSide {
    pub fn as_str(&self) -> &'static str {
        match self {
            TailSide::Plus => "+inf",
            TailSide::Minus => "-inf",
            TailSide::Both => "both",
        }
    }
}

/// An approximate remainder point together with the tail parameters whose
/// images lie within `cluster_radius` of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderCluster {
    pub center: ProductPoint,
    /// Increasing tail parameters `x` with `d(k(x), center) < cluster_radius`.
    pub witnesses: Vec<f64>,
    pub side: TailSide,
}

/// Result of [`CompactificationModel::closure_membership`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Membership {
    Image { parameter: f64 },
    Remainder { cluster: usize },
    Outside,
}

/// A sampled compactification: embedding, image cloud and clustered remainder.
///
/// The serialized form holds the family, the parameters and the remainder.
/// The image cloud is a pure function of the first two and is resampled on
/// deserialization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ModelRepr", try_from = "ModelRepr")]
pub struct CompactificationModel {
    embedding: EmbeddingMap,
    space: ProductSpace,
    params: BuildParams,
    image_cloud: Vec<ImageSample>,
    remainder: Vec<RemainderCluster>,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    family: FunctionFamily,
    params: BuildParams,
    remainder: Vec<RemainderCluster>,
}

impl From<CompactificationModel> for ModelRepr {
    fn from(m: CompactificationModel) -> Self {
        Self {
            family: m.embedding.family,
            params: m.params,
            remainder: m.remainder,
        }
    }
}

impl TryFrom<ModelRepr> for CompactificationModel {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        r.params.validate()?;
        let embedding = EmbeddingMap::new(r.family);
        let space = embedding.space();
        for c in &r.remainder {
            space.check(&c.center)?;
        }
        Ok(Self {
            image_cloud: sample_image(&embedding, &r.params),
            embedding,
            space,
            params: r.params,
            remainder: r.remainder,
        })
    }
}

fn sample_image(embedding: &EmbeddingMap, params: &BuildParams) -> Vec<ImageSample> {
    params
        .image_grid()
        .into_iter()
        .map(|x| ImageSample {
            parameter: x,
            point: embedding.embed(x),
        })
        .collect()
}

/// Samples the image of the family's embedding and clusters its tails.
pub fn build_compactification(
    family: FunctionFamily,
    params: BuildParams,
) -> Result<CompactificationModel> {
    params.validate()?;
    let embedding = EmbeddingMap::new(family);
    let space = embedding.space();
    let dim = embedding.dim();

    let image_cloud = sample_image(&embedding, &params);

    let tail = params.tail_grid();
    let mut coords = Vec::with_capacity(tail.len() * dim);
    for &x in &tail {
        embedding.embed_into(x, &mut coords);
    }
    let sample = |i: usize| &coords[i * dim..(i + 1) * dim];
    let radius = params.cluster_radius;

    let mut seeds = PointIndex::new(dim, radius);
    let mut sums: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut reached: Vec<(bool, bool)> = Vec::new();
    for (i, &x) in tail.iter().enumerate() {
        let p = sample(i);
        let c = match seeds.nearest_within(p, radius) {
            Some((c, _)) => c,
            None => {
                sums.extend(core::iter::repeat_n(0.0, dim));
                counts.push(0);
                reached.push((false, false));
                seeds.insert(p)
            }
        };
        for (s, v) in sums[c * dim..(c + 1) * dim].iter_mut().zip(p) {
            *s += v;
        }
        counts[c] += 1;
        if x < 0.0 {
            reached[c].0 = true;
        } else {
            reached[c].1 = true;
        }
    }

    let mut centers = PointIndex::new(dim, radius);
    let mut remainder: Vec<RemainderCluster> = Vec::with_capacity(counts.len());
    for (c, &count) in counts.iter().enumerate() {
        let mut center: Vec<f64> = sums[c * dim..(c + 1) * dim]
            .iter()
            .map(|s| s / count as f64)
            .collect();
        space.clamp(&mut center);
        centers.insert(&center);
        let side = match reached[c] {
            (true, true) => TailSide::Both,
            (true, false) => TailSide::Minus,
            _ => TailSide::Plus,
        };
        remainder.push(RemainderCluster {
            center: ProductPoint::new(center),
            witnesses: Vec::new(),
            side,
        });
    }
    for (i, &x) in tail.iter().enumerate() {
        centers.for_each_within(sample(i), radius, |c, _| remainder[c].witnesses.push(x));
    }

    Ok(CompactificationModel {
        embedding,
        space,
        params,
        image_cloud,
        remainder,
    })
}

impl CompactificationModel {
    pub fn embedding(&self) -> &EmbeddingMap {
        &self.embedding
    }

    pub fn family(&self) -> &FunctionFamily {
        self.embedding.family()
    }

    pub fn dim(&self) -> usize {
        self.embedding.dim()
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn params(&self) -> &BuildParams {
        &self.params
    }

    pub fn image_cloud(&self) -> &[ImageSample] {
        &self.image_cloud
    }

    pub fn remainder(&self) -> &[RemainderCluster] {
        &self.remainder
    }

    pub fn embed(&self, x: f64) -> ProductPoint {
        self.embedding.embed(x)
    }

    /// Classifies `p` at resolution `eps`.
    ///
    /// A point within `eps` of a remainder center is reported as
    /// [`Membership::Remainder`] even if some image sample is also within
    /// `eps`: far along the tails the embedded image is numerically
    /// indistinguishable from the remainder, so remainder proximity wins.
    /// Otherwise the nearest image sample within `eps` gives
    /// [`Membership::Image`]. Ties go to the lowest index.
    pub fn closure_membership(&self, p: &ProductPoint, eps: f64) -> Result<Membership> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "eps must be positive, got {eps}"
            )));
        }
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.dim(),
            });
        }
        let nearest_center = argmin(
            self.remainder
                .iter()
                .map(|c| distance(c.center.coords(), p.coords())),
        );
        if let Some((cluster, d)) = nearest_center {
            if d < eps {
                return Ok(Membership::Remainder { cluster });
            }
        }
        let nearest_image = argmin(
            self.image_cloud
                .iter()
                .map(|s| distance(s.point.coords(), p.coords())),
        );
        Ok(match nearest_image {
            Some((i, d)) if d < eps => Membership::Image {
                parameter: self.image_cloud[i].parameter,
            },
            _ => Membership::Outside,
        })
    }

    /// Smallest distance between a remainder center and an image sample,
    /// capped at `cluster_radius`.
    pub fn remainder_separation(&self) -> f64 {
        let radius = self.params.cluster_radius;
        let mut index = PointIndex::new(self.dim(), radius);
        for c in &self.remainder {
            index.insert(c.center.coords());
        }
        self.image_cloud
            .iter()
            .filter_map(|s| index.nearest_within(s.point.coords(), radius))
            .map(|(_, d)| d)
            .fold(radius, f64::min)
    }

    /// Whether every stored image sample equals the embedding of its parameter.
    pub fn image_recomputes(&self) -> bool {
        self.image_cloud
            .iter()
            .all(|s| self.embed(s.parameter) == s.point)
    }

    /// Remainder centers as plain coordinate vectors.
    pub fn centers(&self) -> Vec<&[f64]> {
        self.remainder.iter().map(|c| c.center.coords()).collect()
    }
}

/// Index and value of the minimum; ties go to the lowest index.
pub(crate) fn argmin(values: impl Iterator<Item = f64>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        match best {
            Some((_, b)) if b <= v => {}
            _ => best = Some((i, v)),
        }
    }
    best
}
