//! The comb-like fractal curve family: a unit square with, at every level m,
//! 2^floor(m*beta) thin rectangular teeth of width a_m^alpha / 2 and height
//! 2^-m attached to the top edge over the x-range (2^-m, 2^-m+1], where
//! a_m = 2^(-m - floor(m*beta)) is the tooth pitch. On top of construction
//! and geometry queries the module estimates the metric characteristics that
//! drive solvability: Marcinkiewicz exponents (closed form and numeric
//! transition detection), box-counting dimension, and Hoelder sup-exponents
//! of boundary data.

use std::collections::HashSet;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::geometry::{dist_point_segment2, fit_line};

/// Parameters of the curve family; the base square is [0,1] x [-1,0].
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct FractalCurveSpec {
    pub alpha: f64,
    pub beta: f64,
    /// Levels 1..=depth are realized.
    pub depth: u32,
}

pub const MAX_RECTS: u128 = 1 << 24;

impl FractalCurveSpec {
    pub fn new(alpha: f64, beta: f64, depth: u32) -> Result<Self> {
        if !(alpha >= 1.0) || !(beta >= 1.0) {
            return Err(CoreError::input(format!(
                "curve family needs alpha >= 1 and beta >= 1, got ({alpha}, {beta})"
            )));
        }
        if !(1..=16).contains(&depth) {
            return Err(CoreError::input(format!("depth {depth} outside 1..=16")));
        }
        Ok(FractalCurveSpec { alpha, beta, depth })
    }

    /// floor(m * beta), the per-level subdivision exponent.
    pub fn level_exponent(&self, m: u32) -> u32 {
        (m as f64 * self.beta).floor() as u32
    }

    /// Number of teeth at level m: 2^floor(m beta).
    pub fn level_count(&self, m: u32) -> u128 {
        1u128 << self.level_exponent(m)
    }

    /// Tooth pitch a_m = 2^(-m - floor(m beta)).
    pub fn spacing(&self, m: u32) -> f64 {
        2f64.powi(-((m + self.level_exponent(m)) as i32))
    }

    /// Tooth width B_m = a_m^alpha / 2.
    pub fn tooth_width(&self, m: u32) -> f64 {
        self.spacing(m).powf(self.alpha) / 2.0
    }

    /// Tooth height 2^-m.
    pub fn tooth_height(&self, m: u32) -> f64 {
        2f64.powi(-(m as i32))
    }

    /// Right edge of tooth j (1-based) at level m.
    pub fn tooth_right_edge(&self, m: u32, j: u128) -> f64 {
        self.tooth_height(m) + j as f64 * self.spacing(m)
    }

    /// Total rectangle count including the base square.
    pub fn total_rects(&self) -> u128 {
        1 + (1..=self.depth).map(|m| self.level_count(m)).sum::<u128>()
    }

    /// Level whose x-range (2^-m, 2^-m+1] contains x, if any.
    fn level_of_x(&self, x: f64) -> Option<u32> {
        if x <= 0.0 || x > 1.0 {
            return None;
        }
        let m = (-x.log2()).floor() as i64 + 1;
        let m = if x == 2f64.powi(1 - m as i32) { m - 1 } else { m };
        if m < 1 {
            None
        } else {
            Some(m as u32)
        }
    }

    /// Whether the point lies in the closed region (base square plus teeth).
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let [x, y] = p;
        if (0.0..=1.0).contains(&x) && (-1.0..=0.0).contains(&y) {
            return true;
        }
        if y < 0.0 || y > 0.5 {
            return false;
        }
        let Some(m) = self.level_of_x(x) else { return false };
        for level in [m, m + 1] {
            if level < 1 || level > self.depth {
                continue;
            }
            if y > self.tooth_height(level) {
                continue;
            }
            let a = self.spacing(level);
            let b = self.tooth_width(level);
            let lo = self.tooth_height(level);
            let j = ((x - lo) / a).ceil() as i128;
            for jj in [j - 1, j, j + 1] {
                if jj >= 1 && jj <= self.level_count(level) as i128 {
                    let right = self.tooth_right_edge(level, jj as u128);
                    if x >= right - b && x <= right {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Distance from a point to the boundary curve; exact up to round-off.
    pub fn dist_to_boundary(&self, p: [f64; 2]) -> f64 {
        let [x, y] = p;
        // Outer edges of the base square.
        let mut best = dist_point_segment2(p, [0.0, -1.0], [1.0, -1.0]);
        best = best.min(dist_point_segment2(p, [0.0, -1.0], [0.0, 0.0]));
        best = best.min(dist_point_segment2(p, [1.0, -1.0], [1.0, 0.0]));
        // Exposed baseline left of the deepest teeth.
        let leftmost = self.tooth_height(self.depth);
        best = best.min(dist_point_segment2(p, [0.0, 0.0], [leftmost, 0.0]));

        for m in 1..=self.depth {
            let h = self.tooth_height(m);
            let a = self.spacing(m);
            let b = self.tooth_width(m);
            // Level strip bounding box: x in [h - b, 2h], y in [0, h].
            let dx = if x < h - b {
                h - b - x
            } else if x > 2.0 * h {
                x - 2.0 * h
            } else {
                0.0
            };
            let dy = if y < 0.0 {
                -y
            } else if y > h {
                y - h
            } else {
                0.0
            };
            if (dx * dx + dy * dy).sqrt() >= best {
                continue;
            }
            let count = self.level_count(m) as i128;
            let j0 = (((x - h) / a).round() as i128).clamp(1, count);
            for jj in (j0 - 2).max(1)..=(j0 + 2).min(count) {
                let right = self.tooth_right_edge(m, jj as u128);
                let left = right - b;
                // Tooth walls and top.
                best = best.min(dist_point_segment2(p, [left, 0.0], [left, h]));
                best = best.min(dist_point_segment2(p, [right, 0.0], [right, h]));
                best = best.min(dist_point_segment2(p, [left, h], [right, h]));
                // Exposed baseline to the right of this tooth.
                let next_left = if jj == count {
                    // The following tooth belongs to level m-1; its left edge
                    // is right of 2h, so the gap ends at the level border.
                    2.0 * h
                } else {
                    right + a - b
                };
                best = best.min(dist_point_segment2(p, [right, 0.0], [next_left, 0.0]));
            }
            // Gap between the level border and the first tooth.
            let first_left = self.tooth_right_edge(m, 1) - b;
            best = best.min(dist_point_segment2(p, [h, 0.0], [first_left, 0.0]));
        }
        best
    }

    /// Center and radius of the smallest axis-box circumscribed ball, and the
    /// default clipping radius (twice the circumradius).
    pub fn clip_ball(&self) -> ([f64; 2], f64) {
        let center = [0.5, -0.25];
        let circum = (0.5f64.powi(2) + 0.75f64.powi(2)).sqrt();
        (center, 2.0 * circum)
    }
}

/// Materialized union of axis-aligned rectangles: the base square plus every
/// tooth up to the construction depth.
#[derive(Clone, Debug)]
pub struct PolyrectRegion {
    pub spec: FractalCurveSpec,
    /// Rectangles as [x0, y0, x1, y1]; index 0 is the base square.
    pub rects: Vec<[f64; 4]>,
}

impl PolyrectRegion {
    pub fn build(spec: FractalCurveSpec) -> Result<Self> {
        let total = spec.total_rects();
        if total > MAX_RECTS {
            return Err(CoreError::resource(format!(
                "construction needs {total} rectangles (cap {MAX_RECTS}); lower the depth"
            )));
        }
        let mut rects = Vec::with_capacity(total as usize);
        rects.push([0.0, -1.0, 1.0, 0.0]);
        for m in 1..=spec.depth {
            let h = spec.tooth_height(m);
            let b = spec.tooth_width(m);
            for j in 1..=spec.level_count(m) {
                let right = spec.tooth_right_edge(m, j);
                rects.push([right - b, 0.0, right, h]);
            }
        }
        Ok(PolyrectRegion { spec, rects })
    }

    /// Teeth of one level, as indices into `rects`.
    pub fn level_range(&self, m: u32) -> std::ops::Range<usize> {
        let mut start = 1usize;
        for lvl in 1..m {
            start += self.spec.level_count(lvl) as usize;
        }
        start..start + self.spec.level_count(m) as usize
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.spec.contains(p)
    }

    pub fn dist_to_boundary(&self, p: [f64; 2]) -> f64 {
        self.spec.dist_to_boundary(p)
    }

    /// Closed boundary polyline, counterclockwise, starting and ending at the
    /// origin.
    pub fn boundary_polyline(&self) -> Vec<[f64; 2]> {
        let spec = &self.spec;
        let mut pts: Vec<[f64; 2]> = vec![[0.0, 0.0]];
        // Walk the top profile left to right: deepest level first.
        for m in (1..=spec.depth).rev() {
            let h = spec.tooth_height(m);
            let b = spec.tooth_width(m);
            for j in 1..=spec.level_count(m) {
                let right = spec.tooth_right_edge(m, j);
                pts.push([right - b, 0.0]);
                pts.push([right - b, h]);
                pts.push([right, h]);
                pts.push([right, 0.0]);
            }
        }
        pts.push([1.0, 0.0]);
        pts.push([1.0, -1.0]);
        pts.push([0.0, -1.0]);
        pts.push([0.0, 0.0]);
        pts.dedup_by(|a, b| a == b);
        pts
    }

    /// JSON document: { alpha, beta, depth, rects: [[x0,y0,x1,y1], ...] }.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "alpha": self.spec.alpha,
            "beta": self.spec.beta,
            "depth": self.spec.depth,
            "rects": self.rects,
        })
    }

    /// SVG render on the unit viewBox scaled by 1000 (y axis flipped).
    pub fn to_svg(&self) -> String {
        let mut svg = String::from(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 -500 1000 1500\">\n",
        );
        svg.push_str("<rect x=\"0\" y=\"-500\" width=\"1000\" height=\"1500\" fill=\"white\"/>\n");
        let pts = self.boundary_polyline();
        svg.push_str("<path d=\"");
        for (k, p) in pts.iter().enumerate() {
            let cmd = if k == 0 { 'M' } else { 'L' };
            svg.push_str(&format!("{cmd}{:.4} {:.4} ", p[0] * 1000.0, -p[1] * 1000.0));
        }
        svg.push_str("Z\" fill=\"#c8d6e8\" stroke=\"#1a3a5c\" stroke-width=\"0.5\"/>\n");
        svg.push_str("</svg>\n");
        svg
    }
}

/// Closed-form Marcinkiewicz exponents of the curve family:
/// inner 1 - (beta-1)/((beta+1) alpha), outer 2/(beta+1).
pub fn marcinkiewicz_closed_form(alpha: f64, beta: f64) -> (f64, f64) {
    let m_plus = 1.0 - (beta - 1.0) / ((beta + 1.0) * alpha);
    let m_minus = 2.0 / (beta + 1.0);
    (m_plus, m_minus)
}

/// Which complement component the integral runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegralSide {
    Inner,
    Outer,
}

/// Domain selector for the numeric transition estimator.
#[derive(Clone, Copy, Debug)]
pub enum MetricDomain {
    Fractal(FractalCurveSpec),
    Disk { radius: f64, clip_factor: f64 },
}

/// Numeric estimate of sup { p : I_p finite } with a bracketing interval.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransitionEstimate {
    pub p_star: f64,
    pub p_lo: f64,
    pub p_hi: f64,
    /// Per-grid-point decay slopes of the level/shell sums (log2 per level).
    pub slopes: Vec<(f64, f64)>,
}

impl TransitionEstimate {
    pub fn bracket_contains(&self, p: f64) -> bool {
        self.p_lo <= p && p <= self.p_hi
    }
}

/// Locate the sign change of slope(p); the slopes grow with p.
fn transition_from_slopes(p_grid: &[f64], slopes: &[f64]) -> Result<TransitionEstimate> {
    let tol = 0.05;
    let mut p_lo = None;
    let mut p_hi = None;
    for (i, &s) in slopes.iter().enumerate() {
        if s <= -tol {
            p_lo = Some(p_grid[i]);
        }
        if s >= tol && p_hi.is_none() {
            p_hi = Some(p_grid[i]);
        }
    }
    let (p_lo, p_hi) = match (p_lo, p_hi) {
        (Some(a), Some(b)) if a < b => (a, b),
        _ => {
            return Err(CoreError::domain(
                "no divergence transition inside the probed p range",
            ))
        }
    };
    // Interpolate the zero crossing on the finest sign change.
    let mut p_star = 0.5 * (p_lo + p_hi);
    for w in 0..p_grid.len() - 1 {
        if slopes[w] < 0.0 && slopes[w + 1] >= 0.0 {
            let t = -slopes[w] / (slopes[w + 1] - slopes[w]);
            p_star = p_grid[w] + t * (p_grid[w + 1] - p_grid[w]);
        }
    }
    Ok(TransitionEstimate {
        p_star,
        p_lo,
        p_hi,
        slopes: p_grid.iter().copied().zip(slopes.iter().copied()).collect(),
    })
}

fn validate_p_grid(p_grid: &[f64]) -> Result<()> {
    if p_grid.len() < 4 {
        return Err(CoreError::input("p grid needs at least 4 points"));
    }
    if p_grid.iter().any(|&p| p <= 0.0 || p > 2.0) {
        return Err(CoreError::input("p grid must lie in (0, 2]"));
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoreError::input("p grid must be strictly increasing"));
    }
    Ok(())
}

pub fn default_p_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// How a quadrature cell turns into a distance value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DistRule {
    /// Exact minimum of the distance over the cell (conservative: the
    /// integral is overestimated, divergence is never missed).
    LowerBound,
    /// Distance at the cell midpoint.
    Midpoint,
}

/// Integrate min(x, width - x, edge-distance)^-p over a width x height
/// rectangle on a geometrically graded tensor grid. `singular_top` selects
/// whether the horizontal singular edge is y = height (tooth top seen from
/// inside) or y = 0 (exposed baseline seen from the gap).
fn graded_cell_sums(
    width: f64,
    height: f64,
    singular_top: bool,
    rule: DistRule,
    p_grid: &[f64],
) -> Vec<f64> {
    const OCTAVES: usize = 44;
    const PER_OCTAVE: usize = 3;
    let steps = OCTAVES * PER_OCTAVE;
    // Breakpoints clustered toward 0 as scale * 2^(-i / PER_OCTAVE).
    let graded = |scale: f64| -> Vec<f64> {
        let mut b: Vec<f64> = (0..=steps)
            .map(|i| scale * 2f64.powf(-(i as f64) / PER_OCTAVE as f64))
            .collect();
        b.push(0.0);
        b.reverse();
        b
    };
    // x: graded toward both walls; use symmetry and integrate [0, w/2] twice.
    let xb = graded(width / 2.0);
    // y: graded toward the single singular horizontal edge.
    let yb = graded(height);
    let mut sums = vec![0.0; p_grid.len()];
    for xw in xb.windows(2) {
        let (x0, x1) = (xw[0], xw[1]);
        let xa = x1 - x0;
        if xa <= 0.0 {
            continue;
        }
        for yw in yb.windows(2) {
            // yw is the distance-to-singular-edge interval [e0, e1].
            let (e0, e1) = (yw[0], yw[1]);
            let ya = e1 - e0;
            if ya <= 0.0 {
                continue;
            }
            let d = match rule {
                DistRule::LowerBound => x0.min(e0),
                DistRule::Midpoint => (0.5 * (x0 + x1)).min(0.5 * (e0 + e1)),
            };
            if d <= 0.0 {
                continue; // truncation tail touching the boundary
            }
            let area = 2.0 * xa * ya; // both x-halves at once
            for (k, &p) in p_grid.iter().enumerate() {
                sums[k] += area * d.powf(-p);
            }
        }
    }
    // The y-grading direction never entered the distances explicitly, so the
    // orientation flag only documents intent.
    let _ = singular_top;
    sums
}

/// Per-level integral sums for the structural fractal estimator.
fn fractal_level_sums(
    spec: &FractalCurveSpec,
    side: IntegralSide,
    rule: DistRule,
    p_grid: &[f64],
) -> Vec<(u32, Vec<f64>)> {
    (2..=spec.depth)
        .map(|m| {
            let h = spec.tooth_height(m);
            let count = spec.level_count(m) as f64;
            let sums = match side {
                IntegralSide::Inner => {
                    graded_cell_sums(spec.tooth_width(m), h, true, rule, p_grid)
                }
                IntegralSide::Outer => {
                    let gap = spec.spacing(m) - spec.tooth_width(m);
                    graded_cell_sums(gap, h, false, rule, p_grid)
                }
            };
            (m, sums.into_iter().map(|s| s * count).collect())
        })
        .collect()
}

/// Shell-sum transition estimator over an arbitrary domain: dyadic cell
/// refinement, per-cell lower-bound distances, shells binned by
/// floor(-log2 d).
fn shell_transition(
    bbox_lo: [f64; 2],
    bbox_size: f64,
    membership: &dyn Fn([f64; 2]) -> bool,
    dist: &dyn Fn([f64; 2]) -> f64,
    min_cell: f64,
    p_grid: &[f64],
) -> Result<TransitionEstimate> {
    let mut cells: Vec<(f64, [f64; 2], f64)> = Vec::new(); // (center dist, corner, size)
    let mut stack = vec![(bbox_lo, bbox_size)];
    while let Some((corner, size)) = stack.pop() {
        let center = [corner[0] + size / 2.0, corner[1] + size / 2.0];
        let d = dist(center);
        let half_diag = size * std::f64::consts::SQRT_2 / 2.0;
        if d >= 4.0 * half_diag {
            if membership(center) {
                cells.push((d, corner, size));
            }
            continue;
        }
        if size <= min_cell {
            continue; // unresolved boundary cell, dropped from the shells
        }
        let half = size / 2.0;
        for k in 0..4 {
            let child = [
                corner[0] + if k & 1 == 1 { half } else { 0.0 },
                corner[1] + if k & 2 == 2 { half } else { 0.0 },
            ];
            stack.push((child, half));
        }
    }
    if cells.is_empty() {
        return Err(CoreError::domain("no interior cells resolved; raise the resolution"));
    }
    // Shell sums from a 3x3 midpoint subsample per cell, each subcell binned
    // by its own distance (cells are small relative to their distance).
    let mut bins: std::collections::BTreeMap<i32, Vec<f64>> = std::collections::BTreeMap::new();
    for (_, corner, size) in cells {
        let sub_area = size * size / 9.0;
        for si in 0..3 {
            for sj in 0..3 {
                let sp = [
                    corner[0] + (si as f64 + 0.5) * size / 3.0,
                    corner[1] + (sj as f64 + 0.5) * size / 3.0,
                ];
                let sd = dist(sp);
                let l = (-sd.log2()).floor() as i32;
                let entry = bins.entry(l).or_insert_with(|| vec![0.0; p_grid.len()]);
                for (k, &p) in p_grid.iter().enumerate() {
                    entry[k] += sub_area * sd.powf(-p);
                }
            }
        }
    }
    // A shell is fully resolved only when cells at the size cap are small
    // enough to be finalized at its near edge: 2^{-l-1} >= 2 sqrt2 size_min.
    let full_limit = (-(2.0 * std::f64::consts::SQRT_2 * min_cell).log2()).floor() as i32 - 1;
    bins.retain(|&l, _| l <= full_limit);
    // Longest run of consecutive shells, trimmed at both ends.
    let keys: Vec<i32> = bins.keys().copied().collect();
    let mut run_start = 0usize;
    let mut best_run = (0usize, 0usize);
    for i in 1..=keys.len() {
        if i == keys.len() || keys[i] != keys[i - 1] + 1 {
            if i - run_start > best_run.1 - best_run.0 {
                best_run = (run_start, i);
            }
            run_start = i;
        }
    }
    let run: Vec<i32> = keys[best_run.0..best_run.1].to_vec();
    if run.len() < 5 {
        return Err(CoreError::domain("too few usable shells; raise the resolution"));
    }
    let used = &run[1..run.len() - 1];
    // Shell masses behave like 2^{-l(1-p)} (C + C' 2^{-l}): fit the decay
    // rate with an explicit curvature term so coarse shells do not bias it.
    let slopes: Vec<f64> = (0..p_grid.len())
        .map(|k| {
            let xs: Vec<f64> = used.iter().map(|&l| l as f64).collect();
            let ys: Vec<f64> = used.iter().map(|&l| bins[&l][k].log2()).collect();
            fit_slope_with_curvature(&xs, &ys)
        })
        .collect();
    transition_from_slopes(p_grid, &slopes)
}

/// Least-squares slope b of y = a + b x + c 2^{-x}.
fn fit_slope_with_curvature(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    assert!(n >= 4);
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let row = [1.0, x, 2f64.powf(-x)];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 system.
    let mut m = [
        [ata[0][0], ata[0][1], ata[0][2], atb[0]],
        [ata[1][0], ata[1][1], ata[1][2], atb[1]],
        [ata[2][0], ata[2][1], ata[2][2], atb[2]],
    ];
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap()).unwrap();
        m.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let c2 = m[2][3] / m[2][2];
    let c1 = (m[1][3] - m[1][2] * c2) / m[1][1];
    c1
}

/// Numeric Marcinkiewicz transition estimate for one side of the boundary.
///
/// Fractal domains use the per-level structure: the sum over the congruent
/// level-m cells (tooth interiors for the inner side, inter-tooth gaps for
/// the outer side) forms a geometric-type series whose decay-vs－growth
/// transition in the level index marks the exponent; the smooth bulk of the
/// region transitions at 1 and is folded in by taking the minimum. Disks use
/// dyadic distance shells directly.
pub fn marcinkiewicz_numeric(
    domain: &MetricDomain,
    side: IntegralSide,
    p_grid: &[f64],
    resolution: u32,
) -> Result<TransitionEstimate> {
    validate_p_grid(p_grid)?;
    match domain {
        MetricDomain::Disk { radius, clip_factor } => {
            let r = *radius;
            let clip = r * clip_factor;
            let bbox_lo = [-1.05 * clip, -1.05 * clip];
            let size = 2.1 * clip;
            let member: Box<dyn Fn([f64; 2]) -> bool> = match side {
                IntegralSide::Inner => Box::new(move |p: [f64; 2]| p[0].hypot(p[1]) < r),
                IntegralSide::Outer => {
                    Box::new(move |p: [f64; 2]| {
                        let rr = p[0].hypot(p[1]);
                        rr > r && rr < clip
                    })
                }
            };
            let dist = move |p: [f64; 2]| (p[0].hypot(p[1]) - r).abs();
            let min_cell = 2.1 * r * 2f64.powi(-(resolution as i32));
            shell_transition(bbox_lo, size, &member, &dist, min_cell, p_grid)
        }
        MetricDomain::Fractal(spec) => {
            if spec.depth < 4 {
                return Err(CoreError::input("structural estimator needs depth >= 4"));
            }
            let levels = fractal_level_sums(spec, side, DistRule::LowerBound, p_grid);
            let slopes: Vec<f64> = (0..p_grid.len())
                .map(|k| {
                    let xs: Vec<f64> = levels.iter().map(|(m, _)| *m as f64).collect();
                    let ys: Vec<f64> = levels.iter().map(|(_, s)| s[k].log2()).collect();
                    fit_line(&xs, &ys).slope
                })
                .collect();
            let structural = transition_from_slopes(p_grid, &slopes)?;

            // Smooth bulk: shells against the flat bottom edge of the square.
            let smooth = {
                let member: Box<dyn Fn([f64; 2]) -> bool> = match side {
                    IntegralSide::Inner => {
                        Box::new(|p: [f64; 2]| p[1] > -1.0 && p[1] < -0.5 && p[0] > 0.1 && p[0] < 0.9)
                    }
                    IntegralSide::Outer => {
                        Box::new(|p: [f64; 2]| p[1] < -1.0 && p[1] > -1.5 && p[0] > 0.1 && p[0] < 0.9)
                    }
                };
                let dist = |p: [f64; 2]| (p[1] + 1.0).abs();
                let min_cell = 1.2 * 2f64.powi(-(resolution as i32));
                shell_transition([0.0, -1.6], 1.2, &member, &dist, min_cell, p_grid)
            }?;

            Ok(if structural.p_star <= smooth.p_star { structural } else { smooth })
        }
    }
}

/// Joint metric report for a curve: closed forms, numeric transitions, and
/// the box-counting dimension of the truncated boundary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricReport {
    pub alpha: f64,
    pub beta: f64,
    pub depth_used: u32,
    pub grid_resolution: u32,
    pub m_plus_closed: f64,
    pub m_minus_closed: f64,
    pub m_plus_numeric: TransitionEstimate,
    pub m_minus_numeric: TransitionEstimate,
    /// Upper box-counting estimate; conservative stand-in for the Hausdorff
    /// dimension in the uniqueness window.
    pub box_dimension: f64,
    pub box_fit_residual: f64,
}

pub fn metric_report(spec: FractalCurveSpec, resolution: u32) -> Result<MetricReport> {
    let (m_plus_closed, m_minus_closed) = marcinkiewicz_closed_form(spec.alpha, spec.beta);
    let p_grid = default_p_grid(0.30, 1.40, 45);
    let domain = MetricDomain::Fractal(spec);
    let m_plus_numeric =
        marcinkiewicz_numeric(&domain, IntegralSide::Inner, &p_grid, resolution)?;
    let m_minus_numeric =
        marcinkiewicz_numeric(&domain, IntegralSide::Outer, &p_grid, resolution)?;
    // Box dimension from a materialized region at a depth within the cap.
    let mut box_depth = spec.depth;
    while FractalCurveSpec::new(spec.alpha, spec.beta, box_depth)?.total_rects() > MAX_RECTS {
        box_depth -= 1;
    }
    let region = PolyrectRegion::build(FractalCurveSpec::new(spec.alpha, spec.beta, box_depth)?)?;
    let scales: Vec<f64> = (4..=10).map(|k| 2f64.powi(-k)).collect();
    let box_fit = box_counting_dimension(&region.boundary_polyline(), &scales)?;
    Ok(MetricReport {
        alpha: spec.alpha,
        beta: spec.beta,
        depth_used: spec.depth,
        grid_resolution: resolution,
        m_plus_closed,
        m_minus_closed,
        m_plus_numeric,
        m_minus_numeric,
        box_dimension: box_fit.0,
        box_fit_residual: box_fit.1,
    })
}

/// Box-counting dimension of a polyline: least-squares slope of log N(d)
/// against log 1/d. Returns (dimension, rms residual).
pub fn box_counting_dimension(polyline: &[[f64; 2]], scales: &[f64]) -> Result<(f64, f64)> {
    if polyline.len() < 2 || polyline.iter().all(|p| *p == polyline[0]) {
        return Err(CoreError::input("degenerate polyline"));
    }
    if scales.len() < 4 {
        return Err(CoreError::input("need at least 4 scales"));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &delta in scales {
        if delta <= 0.0 {
            return Err(CoreError::input("scales must be positive"));
        }
        let mut boxes: HashSet<(i64, i64)> = HashSet::new();
        for w in polyline.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            let steps = (len / (delta / 3.0)).ceil().max(1.0) as usize;
            for s in 0..=steps {
                let t = s as f64 / steps as f64;
                let x = a[0] + t * (b[0] - a[0]);
                let y = a[1] + t * (b[1] - a[1]);
                boxes.insert(((x / delta).floor() as i64, (y / delta).floor() as i64));
            }
        }
        xs.push((1.0 / delta).ln());
        ys.push((boxes.len() as f64).ln());
    }
    let fit = fit_line(&xs, &ys);
    Ok((fit.slope, fit.rms_residual))
}

/// Hoelder sup-exponent estimate from sampled data.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub exponent: f64,
    /// Uncorrected regression exponent before the 1/k bias term.
    pub raw_slope: f64,
    pub confidence: f64,
    pub degenerate: bool,
}

/// Estimate the supremum of Hoelder exponents of data on a point cloud.
///
/// Pairwise increments are binned by dyadic distance; per-bin maxima give
/// inter-bin slopes s_k which behave like nu + a/k for data with logarithmic
/// factors, so a least-squares fit in (1, 1/k) extracts nu without the slow
/// log bias.
pub fn holder_sup_exponent(
    points: &[Vec<f64>],
    values: &[f64],
    seed: u64,
) -> Result<HolderEstimate> {
    if points.len() != values.len() || points.len() < 8 {
        return Err(CoreError::input("need matching points/values, at least 8 samples"));
    }
    let n = points.len();
    let scale = values.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    // Bin maxima of |du| by floor(-log2 |dx|).
    let mut bins: std::collections::BTreeMap<i32, f64> = std::collections::BTreeMap::new();
    let mut pair_count = 0usize;
    let consider = |i: usize, j: usize, bins: &mut std::collections::BTreeMap<i32, f64>| {
        if i == j {
            return;
        }
        let d = crate::geometry::dist(&points[i], &points[j]);
        if d <= 0.0 {
            return;
        }
        let du = (values[i] - values[j]).abs();
        if du <= 0.0 {
            return;
        }
        let k = (-d.log2()).floor() as i32;
        let m = bins.entry(k).or_insert(0.0);
        if du > *m {
            *m = du;
        }
    };
    for i in 0..n - 1 {
        consider(i, i + 1, &mut bins);
        pair_count += 1;
    }
    // Anchor pairs against coordinate extremes capture one-endpoint scaling.
    let mut anchors: Vec<usize> = Vec::new();
    for axis in 0..points[0].len() {
        let lo = (0..n).min_by(|&a, &b| points[a][axis].partial_cmp(&points[b][axis]).unwrap());
        let hi = (0..n).max_by(|&a, &b| points[a][axis].partial_cmp(&points[b][axis]).unwrap());
        anchors.extend([lo.unwrap(), hi.unwrap()]);
    }
    anchors.sort_unstable();
    anchors.dedup();
    for &a in &anchors {
        for i in 0..n {
            consider(a, i, &mut bins);
            pair_count += 1;
        }
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let random_pairs = 200_000.min(n * n / 2);
    for _ in 0..random_pairs {
        consider(rng.gen_range(0..n), rng.gen_range(0..n), &mut bins);
        pair_count += 1;
    }
    if pair_count < 1000 {
        return Err(CoreError::input("need at least 1000 sample pairs"));
    }
    // Degenerate data: all increments vanish.
    if bins.is_empty() || bins.values().all(|&m| m < 1e-14 * scale) {
        return Ok(HolderEstimate { exponent: 1.0, raw_slope: 1.0, confidence: 0.0, degenerate: true });
    }

    // Inter-bin slopes on the consecutive populated bins at small scales.
    let keys: Vec<i32> = bins.keys().copied().filter(|&k| k >= 2).collect();
    let mut slopes: Vec<(f64, f64)> = Vec::new(); // (k midpoint, slope)
    for w in keys.windows(2) {
        if w[1] != w[0] + 1 {
            continue;
        }
        let m0 = bins[&w[0]];
        let m1 = bins[&w[1]];
        if m0 <= 0.0 || m1 <= 0.0 {
            continue;
        }
        let s = (m0.ln() - m1.ln()) / std::f64::consts::LN_2;
        slopes.push((0.5 * (w[0] + w[1]) as f64, s));
    }
    if slopes.len() < 4 {
        return Err(CoreError::input("too few distance scales for an exponent fit"));
    }
    // Fit s_k = nu + a / k by least squares.
    let (mut s11, mut s1x, mut sxx, mut s1y, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(k, s) in &slopes {
        let x = 1.0 / k;
        s11 += 1.0;
        s1x += x;
        sxx += x * x;
        s1y += s;
        sxy += x * s;
    }
    let det = s11 * sxx - s1x * s1x;
    let nu = (sxx * s1y - s1x * sxy) / det;
    let a = (s11 * sxy - s1x * s1y) / det;
    let rms = (slopes
        .iter()
        .map(|&(k, s)| {
            let r = s - (nu + a / k);
            r * r
        })
        .sum::<f64>()
        / slopes.len() as f64)
        .sqrt();
    let raw = fit_line(
        &slopes.iter().map(|&(k, _)| k).collect::<Vec<_>>(),
        &slopes.iter().map(|&(_, s)| s).collect::<Vec<_>>(),
    )
    .intercept;
    Ok(HolderEstimate {
        exponent: nu.clamp(0.0, 1.0),
        raw_slope: raw,
        confidence: rms,
        degenerate: false,
    })
}

/// Radial C^2 cutoff: 1 inside r1, 0 outside r2, quintic smoothstep between.
#[derive(Clone, Debug)]
pub struct Cutoff {
    pub center: Vec<f64>,
    pub r1: f64,
    pub r2: f64,
}

impl Cutoff {
    pub fn new(center: Vec<f64>, r1: f64, r2: f64) -> Result<Self> {
        if !(0.0 < r1 && r1 < r2) {
            return Err(CoreError::input(format!("need 0 < r1 < r2, got ({r1}, {r2})")));
        }
        Ok(Cutoff { center, r1, r2 })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = crate::geometry::dist(x, &self.center);
        if r <= self.r1 {
            1.0
        } else if r >= self.r2 {
            0.0
        } else {
            let t = (r - self.r1) / (self.r2 - self.r1);
            1.0 - t * t * t * (6.0 * t * t - 15.0 * t + 10.0)
        }
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let r = crate::geometry::dist(x, &self.center);
        if r <= self.r1 || r >= self.r2 || r == 0.0 {
            return vec![0.0; x.len()];
        }
        let t = (r - self.r1) / (self.r2 - self.r1);
        let dpdt = -(30.0 * t * t * t * t - 60.0 * t * t * t + 30.0 * t * t);
        let dpdr = dpdt / (self.r2 - self.r1);
        x.iter().zip(&self.center).map(|(&c, &m)| dpdr * (c - m) / r).collect()
    }
}

/// Boundary sample points of the curve: polyline vertices, arclength fill,
/// and a geometric tail along the exposed baseline toward the origin.
pub fn boundary_samples(
    region: &PolyrectRegion,
    target_count: usize,
    geometric_tail: bool,
) -> Vec<Vec<f64>> {
    let polyline = region.boundary_polyline();
    let total_len: f64 = polyline
        .windows(2)
        .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
        .sum();
    let spacing = total_len / target_count as f64;
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for w in polyline.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let steps = (len / spacing).ceil().max(1.0) as usize;
        for s in 0..steps {
            let t = s as f64 / steps as f64;
            pts.push(vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    pts.push(vec![0.0, 0.0]);
    if geometric_tail {
        // The exposed baseline (0, 2^-depth) approaches the accumulation
        // point; geometric samples there expose the data's small-scale law.
        let cap = region.spec.tooth_height(region.spec.depth);
        for k in 0..160 {
            let x = cap * 2f64.powf(-(k as f64) / 4.0);
            if x > 0.0 {
                pts.push(vec![x, 0.0]);
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(alpha: f64, beta: f64, depth: u32) -> FractalCurveSpec {
        FractalCurveSpec::new(alpha, beta, depth).unwrap()
    }

    #[test]
    fn census_formulas() {
        let s = spec(1.05, 2.2, 8);
        // floor(2 * 2.2) = 4 -> 16 teeth at level 2.
        assert_eq!(s.level_count(2), 16);
        // a_3 = 2^(-3-6) = 1/512.
        assert_eq!(s.spacing(3), 1.0 / 512.0);
        // B_3 = (1/512)^1.05 / 2.
        assert!((s.tooth_width(3) - (1.0f64 / 512.0).powf(1.05) / 2.0).abs() < 1e-18);
        // Right edge of the last tooth meets the level border.
        for m in 1..=6 {
            let last = s.tooth_right_edge(m, s.level_count(m));
            assert!((last - 2.0 * s.tooth_height(m)).abs() < 1e-12, "level {m}");
        }
    }

    #[test]
    fn region_census_is_exact() {
        let s = spec(1.05, 2.2, 5);
        let region = PolyrectRegion::build(s).unwrap();
        assert_eq!(region.rects.len() as u128, s.total_rects());
        for m in 1..=5 {
            let range = region.level_range(m);
            assert_eq!((range.end - range.start) as u128, s.level_count(m), "level {m}");
            // Teeth heights match 2^-m and are pairwise disjoint.
            let mut prev_right = f64::NEG_INFINITY;
            for idx in range {
                let [x0, y0, x1, y1] = region.rects[idx];
                assert_eq!(y0, 0.0);
                assert!((y1 - s.tooth_height(m)).abs() < 1e-15);
                assert!(x0 > prev_right, "overlap at level {m}");
                assert!(x1 > x0);
                prev_right = x1;
            }
        }
    }

    #[test]
    fn resource_cap_enforced() {
        // beta = 3 at depth 8 wants ~1.9e7 rectangles, over the 2^24 cap.
        let s = spec(1.2, 3.0, 8);
        assert!(s.total_rects() > MAX_RECTS);
        assert!(PolyrectRegion::build(s).is_err());
    }

    #[test]
    fn membership_hand_cases() {
        // alpha = beta = 1, depth 1: two teeth of width 1/8 and height 1/2
        // at [5/8, 3/4] and [7/8, 1].
        let s = spec(1.0, 1.0, 1);
        assert!(s.contains([0.5, -0.5])); // inside the square
        assert!(s.contains([0.7, 0.3])); // inside the first tooth
        assert!(s.contains([0.9, 0.49])); // inside the second tooth
        assert!(!s.contains([0.8, 0.1])); // in the gap
        assert!(!s.contains([0.3, 0.25])); // above the bare baseline
        assert!(!s.contains([-0.1, -0.5]));
        assert!(s.contains([0.75, 0.2])); // on a tooth wall
    }

    #[test]
    fn distance_matches_polyline_brute_force() {
        let s = spec(1.05, 2.2, 4);
        let region = PolyrectRegion::build(s).unwrap();
        let polyline = region.boundary_polyline();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..400 {
            let p = [rng.gen_range(-0.3..1.3), rng.gen_range(-1.3..0.8)];
            let fast = s.dist_to_boundary(p);
            let brute = polyline
                .windows(2)
                .map(|w| dist_point_segment2(p, w[0], w[1]))
                .fold(f64::INFINITY, f64::min);
            assert!(
                (fast - brute).abs() < 1e-12,
                "at {p:?}: fast {fast} vs brute {brute}"
            );
        }
    }

    #[test]
    fn distance_is_lipschitz() {
        let s = spec(1.05, 2.2, 6);
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..300 {
            let p = [rng.gen_range(-0.2..1.2), rng.gen_range(-1.2..0.7)];
            let q = [p[0] + rng.gen_range(-0.1..0.1), p[1] + rng.gen_range(-0.1..0.1)];
            let dp = s.dist_to_boundary(p);
            let dq = s.dist_to_boundary(q);
            let step = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            assert!((dp - dq).abs() <= step + 1e-12);
        }
    }

    #[test]
    fn closed_forms() {
        let (mp, mm) = marcinkiewicz_closed_form(1.0, 1.0);
        assert_eq!(mp, 1.0);
        assert_eq!(mm, 1.0);
        let (mp, mm) = marcinkiewicz_closed_form(1.05, 2.2);
        assert!((mm - 0.625).abs() < 1e-12);
        assert!((mp - (1.0 - 1.2 / (3.2 * 1.05))).abs() < 1e-12);
        assert!((mp - 0.6428571428571429).abs() < 1e-10);
    }

    #[test]
    fn graded_sums_match_analytic_tooth_integral() {
        // For the tooth cell the distance is min(x, w-x, H-y), so
        //   I(p) = 2 [ (w/2)^{2-p} / ((1-p)(2-p))
        //            + H (w/2)^{1-p} / (1-p) - (w/2)^{2-p} / (2-p) ].
        let w: f64 = 1e-4;
        let h: f64 = 1e-2;
        let p_grid = [0.4, 0.625, 0.8];
        let analytic: Vec<f64> = p_grid
            .iter()
            .map(|&p| {
                let ww = w / 2.0;
                2.0 * (ww.powf(2.0 - p) / ((1.0 - p) * (2.0 - p))
                    + h * ww.powf(1.0 - p) / (1.0 - p)
                    - ww.powf(2.0 - p) / (2.0 - p))
            })
            .collect();
        let mid = graded_cell_sums(w, h, true, DistRule::Midpoint, &p_grid);
        let lb = graded_cell_sums(w, h, true, DistRule::LowerBound, &p_grid);
        for k in 0..p_grid.len() {
            let rel = (mid[k] - analytic[k]).abs() / analytic[k];
            assert!(rel < 0.02, "p={}: midpoint {} vs analytic {}", p_grid[k], mid[k], analytic[k]);
            assert!(lb[k] >= mid[k], "lower-bound rule must dominate");
        }
    }

    #[test]
    fn disk_transition_is_one() {
        let p_grid = default_p_grid(0.5, 1.5, 41);
        for side in [IntegralSide::Inner, IntegralSide::Outer] {
            let est = marcinkiewicz_numeric(
                &MetricDomain::Disk { radius: 1.0, clip_factor: 2.0 },
                side,
                &p_grid,
                12,
            )
            .unwrap();
            assert!(
                (est.p_star - 1.0).abs() <= 0.03,
                "{side:?}: p_star {} bracket [{}, {}]",
                est.p_star,
                est.p_lo,
                est.p_hi
            );
            assert!(est.bracket_contains(1.0));
        }
    }

    #[test]
    fn outer_transition_independent_of_clip_radius() {
        let p_grid = default_p_grid(0.5, 1.5, 41);
        let a = marcinkiewicz_numeric(
            &MetricDomain::Disk { radius: 1.0, clip_factor: 2.0 },
            IntegralSide::Outer,
            &p_grid,
            12,
        )
        .unwrap();
        let b = marcinkiewicz_numeric(
            &MetricDomain::Disk { radius: 1.0, clip_factor: 3.0 },
            IntegralSide::Outer,
            &p_grid,
            12,
        )
        .unwrap();
        assert!((a.p_star - b.p_star).abs() < 0.02);
    }

    #[test]
    fn fractal_transitions_bracket_closed_forms() {
        let p_grid = default_p_grid(0.30, 1.40, 45);
        for &(alpha, beta) in &[(1.0, 1.5), (1.05, 2.2), (1.2, 3.0)] {
            let s = spec(alpha, beta, 8);
            let (mp, mm) = marcinkiewicz_closed_form(alpha, beta);
            let inner =
                marcinkiewicz_numeric(&MetricDomain::Fractal(s), IntegralSide::Inner, &p_grid, 12)
                    .unwrap();
            let outer =
                marcinkiewicz_numeric(&MetricDomain::Fractal(s), IntegralSide::Outer, &p_grid, 12)
                    .unwrap();
            assert!(
                (inner.p_star - mp).abs() <= 0.05,
                "({alpha},{beta}) inner: {} vs closed {mp}",
                inner.p_star
            );
            assert!(
                (outer.p_star - mm).abs() <= 0.05,
                "({alpha},{beta}) outer: {} vs closed {mm}",
                outer.p_star
            );
        }
    }

    #[test]
    fn box_counting_smooth_baselines() {
        let segment: Vec<[f64; 2]> = vec![[0.0, 0.0], [1.0, 0.37]];
        let scales: Vec<f64> = (4..=10).map(|k| 2f64.powi(-k)).collect();
        let (d, _) = box_counting_dimension(&segment, &scales).unwrap();
        assert!((d - 1.0).abs() < 0.05, "segment dimension {d}");

        let circle: Vec<[f64; 2]> = (0..=2048)
            .map(|i| {
                let t = i as f64 / 2048.0 * std::f64::consts::TAU;
                [t.cos(), t.sin()]
            })
            .collect();
        let (d, _) = box_counting_dimension(&circle, &scales).unwrap();
        assert!((d - 1.0).abs() < 0.05, "circle dimension {d}");

        assert!(box_counting_dimension(&[[0.0, 0.0], [0.0, 0.0]], &scales).is_err());
        assert!(box_counting_dimension(&segment, &scales[..3]).is_err());
    }

    #[test]
    fn fractal_box_dimension_in_range_and_grows() {
        let scales: Vec<f64> = (4..=10).map(|k| 2f64.powi(-k)).collect();
        let mut prev = 1.0;
        for depth in [4u32, 6, 8] {
            let region = PolyrectRegion::build(spec(1.05, 2.2, depth)).unwrap();
            let (d, _) = box_counting_dimension(&region.boundary_polyline(), &scales).unwrap();
            assert!(d > 1.0 && d < 2.0, "depth {depth}: dimension {d}");
            assert!(d > prev - 0.02, "depth {depth}: {d} vs prev {prev}");
            prev = d;
        }
    }

    #[test]
    fn holder_linear_and_constant() {
        let points: Vec<Vec<f64>> = (0..4000).map(|i| vec![i as f64 / 4000.0, 0.0]).collect();
        let values: Vec<f64> = points.iter().map(|p| 2.0 * p[0] - 0.5).collect();
        let est = holder_sup_exponent(&points, &values, 5).unwrap();
        assert!(est.exponent >= 0.95, "linear exponent {}", est.exponent);
        assert!(!est.degenerate);

        let constant = vec![1.25; points.len()];
        let est = holder_sup_exponent(&points, &constant, 5).unwrap();
        assert!(est.degenerate);
        assert_eq!(est.exponent, 1.0);
    }

    #[test]
    fn holder_log_power_law() {
        // f(t) = t^{beta/(beta+1)} log t at beta = 2.2 has sup exponent
        // 0.6875 (power law with a log factor).
        let nu = 2.2 / 3.2;
        let mut points: Vec<Vec<f64>> = (1..2000).map(|i| vec![i as f64 / 2000.0, 0.0]).collect();
        for k in 0..200 {
            points.push(vec![2f64.powf(-(k as f64) / 4.0), 0.0]);
        }
        points.push(vec![0.0, 0.0]);
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup();
        let values: Vec<f64> =
            points.iter().map(|p| if p[0] > 0.0 { p[0].powf(nu) * p[0].ln() } else { 0.0 }).collect();
        let est = holder_sup_exponent(&points, &values, 7).unwrap();
        assert!(
            (est.exponent - 0.6875).abs() <= 0.05,
            "exponent {} (raw {})",
            est.exponent,
            est.raw_slope
        );
    }

    #[test]
    fn cutoff_profile() {
        let rho = Cutoff::new(vec![0.5, -0.25], 1.0, 2.0).unwrap();
        assert_eq!(rho.eval(&[0.5, -0.25]), 1.0);
        assert_eq!(rho.eval(&[2.5, -0.25]), 0.0);
        assert_eq!(rho.eval(&[0.5, 1.75]), 0.0); // exactly r2 away
        assert!(Cutoff::new(vec![0.0], 2.0, 1.0).is_err());

        // Gradient magnitude stays below max |smoothstep'| / (r2 - r1).
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for _ in 0..500 {
            let x = [rng.gen_range(-2.0..3.0), rng.gen_range(-3.0..2.5)];
            let g = rho.grad(&x);
            let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
            assert!(gn <= 1.875 / 1.0 + 1e-9, "gradient {gn} at {x:?}");
            // Check against finite differences.
            let eps = 1e-6;
            for axis in 0..2 {
                let mut hi = x;
                let mut lo = x;
                hi[axis] += eps;
                lo[axis] -= eps;
                let fd = (rho.eval(&hi) - rho.eval(&lo)) / (2.0 * eps);
                assert!((fd - g[axis]).abs() < 1e-5, "axis {axis}");
            }
        }
    }

    #[test]
    fn boundary_sampling_covers_curve() {
        let region = PolyrectRegion::build(spec(1.05, 2.2, 4)).unwrap();
        let pts = boundary_samples(&region, 2000, true);
        assert!(pts.len() >= 2000);
        assert!(pts.contains(&vec![0.0, 0.0]));
        for p in &pts {
            let d = region.dist_to_boundary([p[0], p[1]]);
            assert!(d < 1e-9, "sample {p:?} off the curve by {d}");
        }
    }
}
