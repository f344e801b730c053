//! Degree-0 Whitney extension of Hoelder data from a finite sample cloud.
//!
//! The complement of the sample set is tiled by dyadic cubes accepted once
//! side <= dist(Q, E) (the proportionality dist <= 4 * side then holds by
//! construction). Each cube carries a C^2 tensor bump supported on the cube
//! expanded to twice its side and an anchor sample point; the extension is
//! the bump-weighted average of anchor values, so it reproduces constants and
//! is smooth off the sample set. The doubled support makes neighboring bumps
//! overlap across whole cubes, which keeps the blended gradient on the scale
//! of the data increments instead of concentrating it in thin strips near
//! cube faces; the overlap count stays bounded by a dimension constant.
//! Cells still too close to E at the depth limit form the unresolved collar
//! and are flagged on evaluation.

use std::collections::HashMap;
use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::clifford::Multivector;
use crate::error::{CoreError, Result};
use crate::geometry::{dist, fit_line, Aabb, PointCloud};

/// Finite sample of a compact set with values and an asserted Hoelder
/// exponent.
#[derive(Clone, Debug)]
pub struct CompactSample {
    cloud: PointCloud,
    values: Vec<Multivector>,
    nu: f64,
}

impl CompactSample {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<Multivector>, nu: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(CoreError::input("empty sample set"));
        }
        if points.len() != values.len() {
            return Err(CoreError::input("sample points/values length mismatch"));
        }
        if !(0.0 < nu && nu <= 1.0) {
            return Err(CoreError::input(format!("Hoelder exponent {nu} outside (0, 1]")));
        }
        let n = values[0].dim();
        if values.iter().any(|v| v.dim() != n) {
            return Err(CoreError::input("sample values have mixed Clifford dimensions"));
        }
        let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(CoreError::input("sample points must be pairwise distinct"));
        }
        Ok(CompactSample { cloud: PointCloud::new(points), values, nu })
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.cloud.dim()
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn value(&self, idx: usize) -> &Multivector {
        &self.values[idx]
    }

    /// Empirical Hoelder seminorm sup |u(x)-u(y)| / |x-y|^nu over sampled
    /// pairs (all pairs when small, otherwise a seeded subsample).
    pub fn holder_seminorm(&self, max_pairs: usize, seed: u64) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        let consider = |i: usize, j: usize, best: &mut f64| {
            if i == j {
                return;
            }
            let d = dist(self.cloud.point(i), self.cloud.point(j));
            if d > 0.0 {
                let q = self.values[i].sub(&self.values[j]).norm() / d.powf(self.nu);
                if q > *best {
                    *best = q;
                }
            }
        };
        if n * (n - 1) / 2 <= max_pairs {
            for i in 0..n {
                for j in (i + 1)..n {
                    consider(i, j, &mut best);
                }
            }
        } else {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            for _ in 0..max_pairs {
                consider(rng.gen_range(0..n), rng.gen_range(0..n), &mut best);
            }
            // Consecutive samples of an ordered cloud are near neighbors and
            // carry the binding small-scale quotients.
            for i in 0..n - 1 {
                consider(i, i + 1, &mut best);
            }
        }
        best
    }
}

/// One accepted Whitney cube.
#[derive(Clone, Debug)]
pub struct Cube {
    pub corner: Vec<f64>,
    pub side: f64,
    pub depth: u32,
    /// Index of the anchor sample point (nearest to the cube center).
    pub anchor: u32,
}

impl Cube {
    pub fn center(&self) -> Vec<f64> {
        self.corner.iter().map(|c| c + self.side / 2.0).collect()
    }

    fn aabb(&self) -> Aabb {
        Aabb::new(self.corner.clone(), self.corner.iter().map(|c| c + self.side).collect())
    }
}

/// Dyadic Whitney decomposition of a box minus the sample neighborhood.
#[derive(Clone, Debug)]
pub struct WhitneyDecomposition {
    dim: usize,
    root: Aabb,
    root_side: f64,
    cubes: Vec<Cube>,
    /// Cells at the depth limit still closer to E than their side.
    collar: Vec<(Vec<f64>, f64)>,
    max_depth: u32,
    /// Bucket index per depth: cube corner in units of its side.
    index: HashMap<u32, HashMap<Vec<i64>, Vec<u32>>>,
}

/// Exact distance from an axis-aligned cube to the sample cloud.
fn cube_dist(cloud: &PointCloud, aabb: &Aabb) -> f64 {
    let center = aabb.center();
    let half_diag = aabb.extents().iter().map(|e| e * e).sum::<f64>().sqrt() / 2.0;
    let (_, dc) = cloud.nearest(&center);
    // The minimizer of the cube distance lies within dc + half_diag of the
    // center, because aabb.dist(p) >= dist(center, p) - half_diag.
    let mut best = f64::INFINITY;
    cloud.for_within_radius(&center, dc + half_diag, |idx, _| {
        let d = aabb.dist(cloud.point(idx));
        if d < best {
            best = d;
        }
    });
    best
}

impl WhitneyDecomposition {
    /// Dyadically refine `bounding_box` against the sample: a cube is
    /// accepted once its side is at most its distance to the cloud, otherwise
    /// split until `max_depth`.
    pub fn build(sample: &CompactSample, bounding_box: &Aabb, max_depth: u32) -> Result<Self> {
        let dim = sample.dim();
        if bounding_box.dim() != dim {
            return Err(CoreError::input("bounding box dimension mismatch"));
        }
        let root = bounding_box.to_cube();
        let root_side = root.extents()[0];
        let sample_box = Aabb::from_points(sample.cloud().iter()).unwrap();
        let margin = root_side / 2f64.powi(3);
        for axis in 0..dim {
            if sample_box.lo[axis] - root.lo[axis] < margin
                || root.hi[axis] - sample_box.hi[axis] < margin
            {
                return Err(CoreError::input(
                    "bounding box must contain the samples with a coarse-cube margin",
                ));
            }
        }
        if max_depth == 0 || max_depth > 40 {
            return Err(CoreError::config(format!("max_depth {max_depth} outside 1..=40")));
        }

        let mut dec = WhitneyDecomposition {
            dim,
            root: root.clone(),
            root_side,
            cubes: Vec::new(),
            collar: Vec::new(),
            max_depth,
            index: HashMap::new(),
        };

        // Iterative refinement; the frontier holds (corner, depth).
        let mut frontier: Vec<(Vec<f64>, u32)> = vec![(root.lo.clone(), 0)];
        while let Some((corner, depth)) = frontier.pop() {
            let side = root_side / 2f64.powi(depth as i32);
            let aabb =
                Aabb::new(corner.clone(), corner.iter().map(|c| c + side).collect());
            let d = cube_dist(sample.cloud(), &aabb);
            if d >= side && depth > 0 {
                let center = aabb.center();
                let (anchor, _) = sample.cloud().nearest(&center);
                dec.push_cube(Cube { corner, side, depth, anchor: anchor as u32 });
            } else if depth >= max_depth {
                dec.collar.push((corner, side));
            } else {
                for child in 0..(1usize << dim) {
                    let child_corner: Vec<f64> = corner
                        .iter()
                        .enumerate()
                        .map(|(axis, &c)| {
                            if child >> axis & 1 == 1 {
                                c + side / 2.0
                            } else {
                                c
                            }
                        })
                        .collect();
                    frontier.push((child_corner, depth + 1));
                }
            }
        }
        if dec.cubes.is_empty() {
            return Err(CoreError::config(
                "no cube accepted before max_depth; raise the depth or shrink the box",
            ));
        }
        Ok(dec)
    }

    fn push_cube(&mut self, cube: Cube) {
        let key: Vec<i64> = cube
            .corner
            .iter()
            .zip(&self.root.lo)
            .map(|(&c, &lo)| ((c - lo) / cube.side).round() as i64)
            .collect();
        let idx = self.cubes.len() as u32;
        self.index.entry(cube.depth).or_default().entry(key).or_default().push(idx);
        self.cubes.push(cube);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn collar(&self) -> &[(Vec<f64>, f64)] {
        &self.collar
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn root(&self) -> &Aabb {
        &self.root
    }

    /// Total volume of the unresolved collar cells.
    pub fn collar_measure(&self) -> f64 {
        self.collar.iter().map(|(_, s)| s.powi(self.dim as i32)).sum()
    }

    /// Diagonal of the finest possible cell; the evaluation collar reach.
    pub fn collar_width(&self) -> f64 {
        let s = self.root_side / 2f64.powi(self.max_depth as i32);
        s * (self.dim as f64).sqrt()
    }

    /// Indices of cubes whose expanded support (factor 2) contains x.
    pub fn active_cubes(&self, x: &[f64]) -> Vec<u32> {
        let mut out = Vec::new();
        for (&depth, buckets) in &self.index {
            let side = self.root_side / 2f64.powi(depth as i32);
            let base: Vec<i64> = x
                .iter()
                .zip(&self.root.lo)
                .map(|(&c, &lo)| ((c - lo) / side).floor() as i64)
                .collect();
            // Supports reach one side past the cube center, so only the
            // 3^dim neighborhood can contribute at each depth.
            for_offsets(self.dim, |offset| {
                let key: Vec<i64> = base.iter().zip(offset).map(|(b, o)| b + o).collect();
                if let Some(idxs) = buckets.get(&key) {
                    for &idx in idxs {
                        if bump(&self.cubes[idx as usize], x) > 0.0 {
                            out.push(idx);
                        }
                    }
                }
            });
        }
        out.sort_unstable();
        out
    }

    /// Exhaustive proportionality audit: fraction of cubes with
    /// side <= dist(Q, E) <= 4 side, and the worst ratios seen.
    pub fn proportionality_audit(&self, sample: &CompactSample) -> ProportionalityReport {
        let mut ok = 0usize;
        let mut min_ratio = f64::INFINITY;
        let mut max_ratio: f64 = 0.0;
        for cube in &self.cubes {
            let d = cube_dist(sample.cloud(), &cube.aabb());
            let r = d / cube.side;
            min_ratio = min_ratio.min(r);
            max_ratio = max_ratio.max(r);
            if (1.0..=4.0).contains(&r) {
                ok += 1;
            }
        }
        ProportionalityReport {
            cubes: self.cubes.len(),
            satisfied: ok,
            min_ratio,
            max_ratio,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProportionalityReport {
    pub cubes: usize,
    pub satisfied: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Call `f` for every offset vector in {-1, 0, 1}^dim.
fn for_offsets(dim: usize, mut f: impl FnMut(&[i64])) {
    let mut offset = vec![-1i64; dim];
    'outer: loop {
        f(&offset);
        let mut axis = 0;
        loop {
            if axis == dim {
                break 'outer;
            }
            offset[axis] += 1;
            if offset[axis] > 1 {
                offset[axis] = -1;
                axis += 1;
            } else {
                break;
            }
        }
    }
}

const SUPPORT_HALF: f64 = 1.0; // support half-width in units of side

/// Tensorized C^2 bump (1 - t^2)^3 on the cube expanded to twice its side.
fn bump(cube: &Cube, x: &[f64]) -> f64 {
    let scale = cube.side * SUPPORT_HALF;
    let mut b = 1.0;
    for (axis, &c) in x.iter().enumerate() {
        let t = (c - (cube.corner[axis] + cube.side / 2.0)) / scale;
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t * t;
        b *= s * s * s;
    }
    b
}

/// Bump value and gradient.
fn bump_grad(cube: &Cube, x: &[f64]) -> (f64, Vec<f64>) {
    let scale = cube.side * SUPPORT_HALF;
    let dim = x.len();
    let mut per_axis = Vec::with_capacity(dim);
    for (axis, &c) in x.iter().enumerate() {
        let t = (c - (cube.corner[axis] + cube.side / 2.0)) / scale;
        if t.abs() >= 1.0 {
            return (0.0, vec![0.0; dim]);
        }
        let s = 1.0 - t * t;
        per_axis.push((s * s * s, -6.0 * t * s * s / scale));
    }
    let b: f64 = per_axis.iter().map(|(v, _)| v).product();
    let grad = (0..dim)
        .map(|axis| {
            per_axis
                .iter()
                .enumerate()
                .map(|(k, &(v, dv))| if k == axis { dv } else { v })
                .product()
        })
        .collect();
    (b, grad)
}

/// How a point was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalFlag {
    /// Bump-weighted average of anchor values; smooth here.
    Covered,
    /// Exact sample value (point lies on E).
    OnSample,
    /// Unresolved collar: nearest-sample value, approximate only.
    Collar,
    /// Outside the decomposed region entirely.
    Outside,
}

/// Evaluator for the extension; cheap to clone and thread-safe.
#[derive(Clone)]
pub struct WhitneyExtension {
    sample: Arc<CompactSample>,
    dec: Arc<WhitneyDecomposition>,
}

impl WhitneyExtension {
    pub fn new(sample: Arc<CompactSample>, dec: Arc<WhitneyDecomposition>) -> Self {
        WhitneyExtension { sample, dec }
    }

    /// Build the decomposition for `sample` over its inflated bounding box.
    pub fn build(sample: CompactSample, bounding_box: &Aabb, max_depth: u32) -> Result<Self> {
        let dec = WhitneyDecomposition::build(&sample, bounding_box, max_depth)?;
        Ok(WhitneyExtension { sample: Arc::new(sample), dec: Arc::new(dec) })
    }

    pub fn sample(&self) -> &CompactSample {
        &self.sample
    }

    pub fn decomposition(&self) -> &WhitneyDecomposition {
        &self.dec
    }

    fn value_dim(&self) -> usize {
        self.sample.value(0).dim()
    }

    /// Extension value with provenance flag.
    pub fn eval(&self, x: &[f64]) -> (Multivector, EvalFlag) {
        let (nearest_idx, d) = self.sample.cloud().nearest(x);
        if d <= 1e-14 * self.dec.root_side.max(1.0) {
            return (self.sample.value(nearest_idx).clone(), EvalFlag::OnSample);
        }
        let active = self.dec.active_cubes(x);
        if active.is_empty() {
            let flag = if d <= 4.0 * self.dec.collar_width() {
                EvalFlag::Collar
            } else {
                EvalFlag::Outside
            };
            return (self.sample.value(nearest_idx).clone(), flag);
        }
        let mut total = 0.0;
        let mut acc = Multivector::zero(self.value_dim());
        for &idx in &active {
            let cube = &self.dec.cubes[idx as usize];
            let b = bump(cube, x);
            total += b;
            acc.add_scaled(self.sample.value(cube.anchor as usize), b);
        }
        (acc.scale(1.0 / total), EvalFlag::Covered)
    }

    /// Analytic partial derivatives of the extension at a covered point;
    /// errors elsewhere.
    pub fn grad(&self, x: &[f64]) -> Result<Vec<Multivector>> {
        let active = self.dec.active_cubes(x);
        if active.is_empty() {
            return Err(CoreError::domain("gradient requested outside the covered region"));
        }
        let dim = self.dec.dim;
        let vdim = self.value_dim();
        let mut total = 0.0;
        let mut total_grad = vec![0.0; dim];
        let mut acc = Multivector::zero(vdim);
        let mut acc_grad = vec![Multivector::zero(vdim); dim];
        for &idx in &active {
            let cube = &self.dec.cubes[idx as usize];
            let (b, g) = bump_grad(cube, x);
            let value = self.sample.value(cube.anchor as usize);
            total += b;
            acc.add_scaled(value, b);
            for axis in 0..dim {
                total_grad[axis] += g[axis];
                acc_grad[axis].add_scaled(value, g[axis]);
            }
        }
        // d(acc / total) = (d acc * total - acc * d total) / total^2
        let inv = 1.0 / total;
        Ok((0..dim)
            .map(|axis| {
                let mut out = acc_grad[axis].scale(inv);
                out.add_scaled(&acc, -total_grad[axis] * inv * inv);
                out
            })
            .collect())
    }

    /// Sum of the partition of unity at x (1 on the covered region).
    pub fn partition_sum(&self, x: &[f64]) -> Option<f64> {
        let active = self.dec.active_cubes(x);
        if active.is_empty() {
            return None;
        }
        let mut total = 0.0;
        let mut weight = 0.0;
        for &idx in &active {
            let b = bump(&self.dec.cubes[idx as usize], x);
            total += b;
            weight += b;
        }
        Some(weight / total)
    }
}

/// Outcome of the gradient-bound audit |D u~| <= C dist^{nu-1}.
#[derive(Clone, Copy, Debug)]
pub struct GradientBoundReport {
    pub slope: f64,
    pub log_constant: f64,
    pub probes_used: usize,
    pub pass: bool,
    /// True when every probed gradient was below the degeneracy floor.
    pub degenerate: bool,
}

/// Regress log |grad u~| against log dist(x, E) over probe points using
/// central finite differences; PASS when the slope is at least nu - 1 - 0.1.
pub fn gradient_bound_audit(
    ext: &WhitneyExtension,
    probes: &[Vec<f64>],
    nu: f64,
) -> Result<GradientBoundReport> {
    if probes.len() < 100 {
        return Err(CoreError::input(format!(
            "gradient audit needs at least 100 probes, got {}",
            probes.len()
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut used = 0usize;
    let scale: f64 = (0..ext.sample.len())
        .map(|i| ext.sample.value(i).norm())
        .fold(0.0, f64::max)
        .max(1e-30);
    for p in probes {
        let d = ext.sample.cloud().dist(p);
        if d <= 0.0 {
            continue;
        }
        let step = d / 8.0;
        let mut g2 = 0.0;
        let mut covered = true;
        for axis in 0..ext.dec.dim {
            let mut hi = p.clone();
            let mut lo = p.clone();
            hi[axis] += step;
            lo[axis] -= step;
            let (vh, fh) = ext.eval(&hi);
            let (vl, fl) = ext.eval(&lo);
            if fh != EvalFlag::Covered || fl != EvalFlag::Covered {
                covered = false;
                break;
            }
            let d_axis = vh.sub(&vl).norm() / (2.0 * step);
            g2 += d_axis * d_axis;
        }
        if !covered {
            continue;
        }
        used += 1;
        let g = g2.sqrt();
        if g > 1e-12 * scale {
            xs.push(d.ln());
            ys.push(g.ln());
        }
    }
    if used < 100 {
        return Err(CoreError::input(format!(
            "only {used} probes were inside the covered region; need 100"
        )));
    }
    if ys.len() < 10 {
        // Essentially constant data: gradient vanishes everywhere.
        return Ok(GradientBoundReport {
            slope: 0.0,
            log_constant: f64::NEG_INFINITY,
            probes_used: used,
            pass: true,
            degenerate: true,
        });
    }
    let fit = fit_line(&xs, &ys);
    Ok(GradientBoundReport {
        slope: fit.slope,
        log_constant: fit.intercept,
        probes_used: used,
        pass: fit.slope >= nu - 1.0 - 0.1,
        degenerate: false,
    })
}

/// Max deviation of the partition of unity from 1 over seeded random points
/// in the covered region.
pub fn partition_of_unity_audit(ext: &WhitneyExtension, n_points: usize, seed: u64) -> f64 {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let root = ext.dec.root.clone();
    let mut worst = 0.0f64;
    let mut found = 0usize;
    let mut attempts = 0usize;
    while found < n_points && attempts < n_points * 50 {
        attempts += 1;
        let x: Vec<f64> = root
            .lo
            .iter()
            .zip(&root.hi)
            .map(|(&l, &h)| rng.gen_range(l..h))
            .collect();
        if let Some(s) = ext.partition_sum(&x) {
            worst = worst.max((s - 1.0).abs());
            found += 1;
        }
    }
    worst
}

/// CSV dump of the decomposition: one row per cube
/// `corner...,side,anchor_index`, then collar rows flagged with anchor -1.
pub fn decomposition_csv(dec: &WhitneyDecomposition) -> String {
    let mut out = String::new();
    let dim = dec.dim();
    for axis in 0..dim {
        out.push_str(&format!("corner{axis},"));
    }
    out.push_str("side,anchor\n");
    for cube in dec.cubes() {
        for c in &cube.corner {
            out.push_str(&format!("{c},"));
        }
        out.push_str(&format!("{},{}\n", cube.side, cube.anchor));
    }
    for (corner, side) in dec.collar() {
        for c in corner {
            out.push_str(&format!("{c},"));
        }
        out.push_str(&format!("{side},-1\n"));
    }
    out
}
