//! Bucket grid over the leading coordinates for radius queries under the
//! product metric.
//!
//! If `d(p, q) < r` then `min(1, |p_n − q_n|) < r·2^n` for every `n`, so as
//! long as `r·2^n ≤ 1` the two points lie in adjacent cells of width `r·2^n`
//! along coordinate `n`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::product_space::distance;

const MAX_KEY_DIMS: usize = 3;

type Key = [i64; MAX_KEY_DIMS];

pub(crate) struct PointIndex {
    dim: usize,
    radius: f64,
    widths: Vec<f64>,
    buckets: BTreeMap<Key, Vec<usize>>,
    coords: Vec<f64>,
}

impl PointIndex {
    pub(crate) fn new(dim: usize, radius: f64) -> Self {
        let mut widths = Vec::new();
        let mut w = radius;
        while widths.len() < MAX_KEY_DIMS.min(dim) && w <= 1.0 && w > 0.0 {
            widths.push(w);
            w *= 2.0;
        }
        Self {
            dim,
            radius,
            widths,
            buckets: BTreeMap::new(),
            coords: Vec::new(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.coords.len() / self.dim
        }
    }

    pub(crate) fn point(&self, id: usize) -> &[f64] {
        &self.coords[id * self.dim..(id + 1) * self.dim]
    }

    fn key(&self, p: &[f64]) -> Key {
        let mut key = [0i64; MAX_KEY_DIMS];
        for (k, w) in key
            .iter_mut()
            .zip(&self.widths)
            .zip(p)
            .map(|((k, w), v)| (k, v / w))
        {
            *k = libm::floor(w) as i64;
        }
        key
    }

    pub(crate) fn insert(&mut self, p: &[f64]) -> usize {
        debug_assert_eq!(p.len(), self.dim);
        let id = self.len();
        self.coords.extend_from_slice(p);
        let key = self.key(p);
        self.buckets.entry(key).or_default().push(id);
        id
    }

    /// Calls `visit(id, distance)` for every stored point with distance
    /// strictly below `radius`, which must not exceed the index radius.
    pub(crate) fn for_each_within(
        &self,
        p: &[f64],
        radius: f64,
        mut visit: impl FnMut(usize, f64),
    ) {
        debug_assert!(radius <= self.radius);
        let base = self.key(p);
        let used = self.widths.len();
        let cells = 3usize.pow(used as u32);
        for c in 0..cells {
            let mut key = base;
            let mut rest = c;
            for k in key.iter_mut().take(used) {
                *k += (rest % 3) as i64 - 1;
                rest /= 3;
            }
            if let Some(ids) = self.buckets.get(&key) {
                for &id in ids {
                    let d = distance(self.point(id), p);
                    if d < radius {
                        visit(id, d);
                    }
                }
            }
        }
    }

    /// Nearest stored point strictly within `radius`; ties go to the lowest id.
    pub(crate) fn nearest_within(&self, p: &[f64], radius: f64) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        self.for_each_within(p, radius, |id, d| match best {
            Some((bid, bd)) if bd < d || (bd == d && bid < id) => {}
            _ => best = Some((id, d)),
        });
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn agrees_with_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in 1..=5 {
            let radius = 0.07;
            let mut index = PointIndex::new(dim, radius);
            let pts: Vec<Vec<f64>> = (0..800)
                .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            for p in &pts {
                index.insert(p);
            }
            for _ in 0..300 {
                let q: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let brute = pts
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, distance(p, &q)))
                    .filter(|(_, d)| *d < radius)
                    .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
                        Some((_, bd)) if bd <= d => best,
                        _ => Some((i, d)),
                    });
                assert_eq!(index.nearest_within(&q, radius), brute);
                let mut found = Vec::new();
                index.for_each_within(&q, radius, |id, _| found.push(id));
                found.sort_unstable();
                let expect: Vec<usize> = (0..pts.len())
                    .filter(|&i| distance(&pts[i], &q) < radius)
                    .collect();
                assert_eq!(found, expect);
            }
        }
    }

    #[test]
    fn large_radius_uses_no_buckets() {
        let mut index = PointIndex::new(2, 1.6);
        index.insert(&[-1.0, -1.0]);
        index.insert(&[1.0, 1.0]);
        let mut n = 0;
        index.for_each_within(&[0.0, 0.0], 1.6, |_, _| n += 1);
        assert_eq!(n, 2);
    }
}
