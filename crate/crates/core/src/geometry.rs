//! Small geometric primitives shared by the boundary, extension and solver
//! modules: axis-aligned boxes, segment distances, an exact nearest-neighbor
//! index over finite point clouds, and least-squares line fits.

use std::collections::HashMap;

/// Axis-aligned box in any dimension, stored as per-axis [lo, hi].
#[derive(Clone, Debug, PartialEq)]
pub struct Aabb {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Aabb {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b), "degenerate box");
        Aabb { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn from_points<'a>(points: impl Iterator<Item = &'a [f64]>) -> Option<Self> {
        let mut iter = points;
        let first = iter.next()?;
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in iter {
            for (i, &c) in p.iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        Some(Aabb { lo, hi })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&c, (&l, &h))| c >= l && c <= h)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn extents(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).collect()
    }

    /// Distance from a point to the box (zero inside).
    pub fn dist(&self, p: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, &c) in p.iter().enumerate() {
            let d = if c < self.lo[i] {
                self.lo[i] - c
            } else if c > self.hi[i] {
                c - self.hi[i]
            } else {
                0.0
            };
            s += d * d;
        }
        s.sqrt()
    }

    /// Grow the box by `margin` on every side.
    pub fn inflate(&self, margin: f64) -> Aabb {
        Aabb {
            lo: self.lo.iter().map(|l| l - margin).collect(),
            hi: self.hi.iter().map(|h| h + margin).collect(),
        }
    }

    /// Smallest cube with the same center covering the box.
    pub fn to_cube(&self) -> Aabb {
        let c = self.center();
        let side = self.extents().iter().fold(0.0f64, |a, &b| a.max(b));
        Aabb {
            lo: c.iter().map(|x| x - side / 2.0).collect(),
            hi: c.iter().map(|x| x + side / 2.0).collect(),
        }
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Distance from point p to the segment [a, b] in the plane.
pub fn dist_point_segment2(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    let len2 = dx * dx + dy * dy;
    let (cx, cy) = if len2 == 0.0 {
        (a[0], a[1])
    } else {
        let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0);
        (a[0] + t * dx, a[1] + t * dy)
    };
    ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt()
}

/// Finite point cloud with an exact nearest-neighbor query backed by a
/// uniform bucket grid. Ties resolve to the lexicographically smallest point.
#[derive(Clone, Debug)]
pub struct PointCloud {
    dim: usize,
    points: Vec<f64>,
    cell: f64,
    origin: Vec<f64>,
    buckets: HashMap<Vec<i64>, Vec<u32>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Self {
        assert!(!points.is_empty(), "empty point cloud");
        let dim = points[0].len();
        assert!(points.iter().all(|p| p.len() == dim));
        let bbox = Aabb::from_points(points.iter().map(|p| p.as_slice())).unwrap();
        let extent = bbox.extents().iter().fold(0.0f64, |a, &b| a.max(b));
        // Aim for O(1) points per bucket on average; degenerate clouds
        // (single point, collinear along an axis) get a unit cell.
        let per_axis = (points.len() as f64).powf(1.0 / dim as f64).ceil().max(1.0);
        let cell = if extent > 0.0 { extent / per_axis } else { 1.0 };
        let mut buckets: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
        let origin = bbox.lo.clone();
        let mut flat = Vec::with_capacity(points.len() * dim);
        for (idx, p) in points.iter().enumerate() {
            let key = Self::key_of(p, &origin, cell);
            buckets.entry(key).or_default().push(idx as u32);
            flat.extend_from_slice(p);
        }
        PointCloud { dim, points: flat, cell, origin, buckets }
    }

    fn key_of(p: &[f64], origin: &[f64], cell: f64) -> Vec<i64> {
        p.iter().zip(origin).map(|(&c, &o)| ((c - o) / cell).floor() as i64).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, idx: usize) -> &[f64] {
        &self.points[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    /// Index and distance of the nearest point to `q`; exact.
    pub fn nearest(&self, q: &[f64]) -> (usize, f64) {
        // Ring search pays off only near the cloud; far queries scan.
        const MAX_RING: i64 = 64;
        let base: Vec<i64> = q
            .iter()
            .zip(&self.origin)
            .map(|(&c, &o)| ((c - o) / self.cell).floor() as i64)
            .collect();
        let mut best: Option<(f64, usize)> = None;
        for ring in 0..=MAX_RING {
            self.for_ring(&base, ring, |key| {
                if let Some(idxs) = self.buckets.get(key) {
                    for &idx in idxs {
                        let d = dist(q, self.point(idx as usize));
                        let better = match best {
                            None => true,
                            Some((bd, bi)) => d < bd || (d == bd && self.lex_less(idx as usize, bi)),
                        };
                        if better {
                            best = Some((d, idx as usize));
                        }
                    }
                }
            });
            // Unswept cells only hold points farther than ring * cell.
            if let Some((bd, bi)) = best {
                if bd <= ring as f64 * self.cell {
                    return (bi, bd);
                }
            }
        }
        self.nearest_linear(q)
    }

    fn nearest_linear(&self, q: &[f64]) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for idx in 0..self.len() {
            let d = dist(q, self.point(idx));
            if d < best.1 || (d == best.1 && self.lex_less(idx, best.0)) {
                best = (idx, d);
            }
        }
        best
    }

    fn lex_less(&self, a: usize, b: usize) -> bool {
        self.point(a) < self.point(b)
    }

    fn for_ring(&self, base: &[i64], ring: i64, mut f: impl FnMut(&Vec<i64>)) {
        // Visit all cells with Chebyshev distance exactly `ring` from base.
        let dim = self.dim;
        let mut offset = vec![-ring; dim];
        loop {
            if offset.iter().any(|&o| o.abs() == ring) || ring == 0 {
                let key: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
                f(&key);
            }
            let mut axis = 0;
            loop {
                if axis == dim {
                    return;
                }
                offset[axis] += 1;
                if offset[axis] > ring {
                    offset[axis] = -ring;
                    axis += 1;
                } else {
                    break;
                }
            }
        }
    }

    /// Distance from `q` to the cloud.
    pub fn dist(&self, q: &[f64]) -> f64 {
        self.nearest(q).1
    }

    /// Visit every point within `radius` of `q` (inclusive).
    pub fn for_within_radius(&self, q: &[f64], radius: f64, mut f: impl FnMut(usize, f64)) {
        let max_ring = (radius / self.cell).ceil() as i64 + 1;
        if max_ring > 64 {
            for idx in 0..self.len() {
                let d = dist(q, self.point(idx));
                if d <= radius {
                    f(idx, d);
                }
            }
            return;
        }
        let base: Vec<i64> = q
            .iter()
            .zip(&self.origin)
            .map(|(&c, &o)| ((c - o) / self.cell).floor() as i64)
            .collect();
        for ring in 0..=max_ring {
            self.for_ring(&base, ring, |key| {
                if let Some(idxs) = self.buckets.get(key) {
                    for &idx in idxs {
                        let d = dist(q, self.point(idx as usize));
                        if d <= radius {
                            f(idx as usize, d);
                        }
                    }
                }
            });
        }
    }
}

/// Least-squares line fit y = slope * x + intercept.
#[derive(Clone, Copy, Debug)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a line fit");
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    assert!(denom.abs() > 0.0, "degenerate abscissae in line fit");
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    LineFit { slope, intercept, rms_residual: (ss / n).sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn aabb_queries() {
        let b = Aabb::new(vec![0.0, -1.0], vec![1.0, 0.0]);
        assert!(b.contains(&[0.5, -0.5]));
        assert!(!b.contains(&[1.5, -0.5]));
        assert_eq!(b.dist(&[0.5, -0.5]), 0.0);
        assert_eq!(b.dist(&[2.0, -0.5]), 1.0);
        assert_eq!(b.to_cube().extents(), vec![1.0, 1.0]);
    }

    #[test]
    fn segment_distance() {
        let d = dist_point_segment2([0.5, 1.0], [0.0, 0.0], [1.0, 0.0]);
        assert!((d - 1.0).abs() < 1e-15);
        let d = dist_point_segment2([2.0, 0.0], [0.0, 0.0], [1.0, 0.0]);
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nearest_matches_brute_force() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let points: Vec<Vec<f64>> =
            (0..500).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let cloud = PointCloud::new(points.clone());
        for _ in 0..200 {
            let q = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
            let (idx, d) = cloud.nearest(&q);
            let brute = points.iter().map(|p| dist(&q, p)).fold(f64::INFINITY, f64::min);
            assert!((d - brute).abs() < 1e-12, "nearest {d} vs brute {brute}");
            assert!((dist(&q, cloud.point(idx)) - d).abs() < 1e-15);
        }
    }

    #[test]
    fn nearest_tie_break_is_lexicographic() {
        let cloud = PointCloud::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]);
        let (idx, _) = cloud.nearest(&[0.0, 0.0]);
        assert_eq!(cloud.point(idx), &[-1.0, 0.0]);
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let fit = fit_line(&xs, &ys);
        assert!((fit.slope - 2.5).abs() < 1e-12);
        assert!((fit.intercept + 1.0).abs() < 1e-12);
        assert!(fit.rms_residual < 1e-12);
    }
}
