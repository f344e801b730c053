//! Volume-potential quadrature against the Cauchy-Riemann and Dirac kernels.
//!
//! The planar solvers integrate w(y) E(y - x) dV with w supported near the
//! boundary. In the plane the kernel is 1/(2 pi (zeta - z)) under the complex
//! identification, and its integral over an axis-aligned rectangle has a
//! closed form via the boundary representation
//!     int_R dA / (zeta - z) = (1/2i) oint_{dR} conj(zeta - z)/(zeta - z) dzeta,
//! valid for z inside or outside R. Cells near the evaluation point use this
//! exact form with the density frozen per cell; far cells use the midpoint
//! rule. Meshes are adaptive: cells grade toward the boundary and a collar of
//! configurable width is excluded and accounted separately.

use num_complex::Complex64;

use crate::clifford::Multivector;
use crate::error::{CoreError, Result};
use crate::fields::{fundamental_solution, KernelKind, MultivectorField, OperatorSide};

/// Exact integral of 1/(zeta - z) over the rectangle [x0,x1] x [y0,y1].
pub fn rect_cauchy_integral(x0: f64, x1: f64, y0: f64, y1: f64, z: Complex64) -> Complex64 {
    debug_assert!(x1 > x0 && y1 > y0);
    // Nudge z off edge lines to keep the log branches unambiguous.
    let eps = 1e-13 * ((x1 - x0) + (y1 - y0));
    let mut zz = z;
    if (zz.re - x0).abs() < eps || (zz.re - x1).abs() < eps {
        zz.re += 2.0 * eps;
    }
    if (zz.im - y0).abs() < eps || (zz.im - y1).abs() < eps {
        zz.im += 2.0 * eps;
    }
    let corners = [
        Complex64::new(x0, y0),
        Complex64::new(x1, y0),
        Complex64::new(x1, y1),
        Complex64::new(x0, y1),
    ];
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        let a = corners[k] - zz;
        let b = corners[(k + 1) % 4] - zz;
        let u = b - a;
        let len = u.norm();
        let dir = u / len;
        // int_edge conj(D)/D dzeta with D = a + t dir, t in [0, len]:
        //   conj(dir) len + (conj(a) - conj(dir) a / dir) * [Log(b) - Log(a)],
        // the log difference taken with the branch continuous along the edge
        // (a straight segment not through 0 sweeps less than pi).
        let mut darg = b.arg() - a.arg();
        if darg > std::f64::consts::PI {
            darg -= 2.0 * std::f64::consts::PI;
        } else if darg < -std::f64::consts::PI {
            darg += 2.0 * std::f64::consts::PI;
        }
        let log_diff = Complex64::new((b.norm() / a.norm()).ln(), darg);
        acc += dir.conj() * len + (a.conj() - dir.conj() * a / dir) * log_diff;
    }
    acc / Complex64::new(0.0, 2.0)
}

/// One finalized quadrature cell with a frozen complex density.
#[derive(Clone, Copy, Debug)]
pub struct WeightedCell {
    pub corner: [f64; 2],
    pub size: f64,
    pub weight: Complex64,
}

impl WeightedCell {
    pub fn center(&self) -> Complex64 {
        Complex64::new(self.corner[0] + self.size / 2.0, self.corner[1] + self.size / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.size * self.size
    }
}

/// Mesh construction parameters.
#[derive(Clone, Copy, Debug)]
pub struct MeshParams {
    /// Smallest cell side produced by refinement.
    pub min_cell: f64,
    /// Largest cell side anywhere; bounds the frozen-density error.
    pub max_cell: f64,
    /// Cells keep their side below `grading * dist` near the boundary.
    pub grading: f64,
    /// Half-width of the boundary collar excluded from the quadrature.
    pub exclusion: f64,
    /// Hard cap on finalized cells.
    pub max_cells: usize,
}

/// Adaptive quadrature mesh over a planar domain with a excluded boundary
/// collar.
#[derive(Clone, Debug)]
pub struct WeightedMesh {
    pub cells: Vec<WeightedCell>,
    /// Total area dropped inside the collar or at the size cap.
    pub excluded_area: f64,
    /// Largest |weight| seen adjacent to the excluded collar.
    pub max_weight_near_collar: f64,
    pub params: MeshParams,
}

/// Build a graded mesh of `domain` (membership by center) weighted by
/// `weight`. `dist` must return the distance to the domain boundary relevant
/// for grading and exclusion.
pub fn build_weighted_mesh(
    bbox_lo: [f64; 2],
    bbox_size: f64,
    membership: &dyn Fn([f64; 2]) -> bool,
    dist: &dyn Fn([f64; 2]) -> f64,
    weight: &dyn Fn([f64; 2]) -> Complex64,
    params: MeshParams,
) -> Result<WeightedMesh> {
    let mut mesh = WeightedMesh {
        cells: Vec::new(),
        excluded_area: 0.0,
        max_weight_near_collar: 0.0,
        params,
    };
    let mut stack = vec![(bbox_lo, bbox_size)];
    while let Some((corner, size)) = stack.pop() {
        let center = [corner[0] + size / 2.0, corner[1] + size / 2.0];
        let d = dist(center);
        let half_diag = size * std::f64::consts::SQRT_2 / 2.0;
        let clear = d >= 2.0 * half_diag;
        let inside = membership(center);
        if clear && !inside {
            continue;
        }
        let needs_split = if !clear {
            true
        } else if d - half_diag < params.exclusion {
            true
        } else {
            size > (params.grading * d).min(params.max_cell)
        };
        if needs_split {
            if size > params.min_cell {
                let half = size / 2.0;
                for k in 0..4 {
                    let child = [
                        corner[0] + if k & 1 == 1 { half } else { 0.0 },
                        corner[1] + if k & 2 == 2 { half } else { 0.0 },
                    ];
                    stack.push((child, half));
                }
            } else if inside {
                mesh.excluded_area += size * size;
                let w = weight(center).norm();
                if w > mesh.max_weight_near_collar {
                    mesh.max_weight_near_collar = w;
                }
            }
            continue;
        }
        let w = weight(center);
        if w.norm() > 0.0 {
            mesh.cells.push(WeightedCell { corner, size, weight: w });
        }
        if mesh.cells.len() > params.max_cells {
            return Err(CoreError::resource(format!(
                "quadrature mesh exceeded {} cells",
                params.max_cells
            )));
        }
    }
    // Deterministic cell order regardless of stack traversal details.
    mesh.cells.sort_by(|a, b| {
        (a.corner[1], a.corner[0], a.size)
            .partial_cmp(&(b.corner[1], b.corner[0], b.size))
            .unwrap()
    });
    Ok(mesh)
}

/// Cauchy-type volume potential of a weighted mesh:
///   P(z) = -(1/2 pi) sum_c int_c w_c / (zeta - z) dA.
///
/// Cells within `near_factor` sides of z use the exact rectangle integral;
/// the rest use the midpoint rule.
pub fn potential(mesh: &WeightedMesh, z: Complex64, near_factor: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for cell in &mesh.cells {
        let zc = cell.center();
        let dz = zc - z;
        let near = dz.norm() <= near_factor * cell.size;
        let integral = if near {
            rect_cauchy_integral(
                cell.corner[0],
                cell.corner[0] + cell.size,
                cell.corner[1],
                cell.corner[1] + cell.size,
                z,
            )
        } else {
            Complex64::new(cell.area(), 0.0) / dz
        };
        acc += cell.weight * integral;
    }
    -acc / (2.0 * std::f64::consts::PI)
}

/// Power-series moments of the mesh density at infinity:
///   M_k = -(1/2 pi) int w(zeta) zeta^{k-1} dA,   k = 1..=k_max.
pub fn moments(mesh: &WeightedMesh, k_max: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); k_max];
    for cell in &mesh.cells {
        let zc = cell.center();
        let mut pw = Complex64::new(1.0, 0.0);
        for m in out.iter_mut() {
            *m += cell.weight * pw * cell.area();
            pw *= zc;
        }
    }
    for m in out.iter_mut() {
        *m /= -2.0 * std::f64::consts::PI;
    }
    out
}

/// Result of a field-based transform evaluation.
#[derive(Clone, Debug)]
pub struct PotentialValue {
    pub value: Multivector,
    pub accuracy_warning: Option<String>,
}

/// Teodorescu transform of a compactly supported field sampled on a uniform
/// grid: -int E(y - x) u(y) dV (left) or -int u(y) E(y - x) dV (right).
///
/// The kernel kind follows the field: values in Cl(m) over R^m use the Dirac
/// kernel, values in Cl(m-1) over R^m the Cauchy-Riemann kernel. Cells close
/// to x integrate the kernel on a dyadic subgrid with the density frozen; the
/// subcell containing x itself is dropped (the kernel is odd, its core
/// cancels).
pub fn teodorescu_field(
    field: &MultivectorField,
    x: &[f64],
    side: OperatorSide,
) -> Result<PotentialValue> {
    let grid = field.grid();
    let m = grid.dim();
    if x.len() != m {
        return Err(CoreError::input("evaluation point dimension mismatch"));
    }
    let kind = if field.clifford_dim() == m {
        KernelKind::Vector
    } else if field.clifford_dim() + 1 == m {
        KernelKind::Paravector
    } else {
        return Err(CoreError::input(
            "field must be Cl(m)-valued over R^m or Cl(m-1)-valued over R^m",
        ));
    };
    let h = grid.spacing;
    let cell_volume = h.powi(m as i32);
    let near_radius = 1.5 * h * (m as f64).sqrt();
    let mut acc = Multivector::zero(field.clifford_dim());
    for node in 0..grid.node_count() {
        if !field.mask()[node] {
            continue;
        }
        let w = field.value(node);
        if w.is_zero() {
            continue;
        }
        let y = grid.point(node);
        let diff: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        let r = diff.iter().map(|c| c * c).sum::<f64>().sqrt();
        let kernel_int = if r <= near_radius {
            singular_cell_kernel(kind, &y, x, h, 8)
        } else {
            fundamental_solution(kind, &diff)?.scale(cell_volume)
        };
        let term = match side {
            OperatorSide::Left => kernel_int.geometric_product(&w)?,
            OperatorSide::Right => w.geometric_product(&kernel_int)?,
        };
        acc.add_scaled(&term, -1.0);
    }
    // Support-resolution advisory: the stencil should resolve the support.
    let support_extent = grid
        .extents
        .iter()
        .map(|&e| (e - 1) as f64 * h)
        .fold(0.0f64, f64::max);
    let accuracy_warning = if h > support_extent / 8.0 {
        Some(format!(
            "grid spacing {h} is coarse relative to the support extent {support_extent}"
        ))
    } else {
        None
    };
    Ok(PotentialValue { value: acc, accuracy_warning })
}

/// Integral of the kernel over the cell centered at y, refined dyadically
/// toward x; the density is frozen by the caller.
fn singular_cell_kernel(
    kind: KernelKind,
    cell_center: &[f64],
    x: &[f64],
    cell_size: f64,
    max_depth: u32,
) -> Multivector {
    let m = cell_center.len();
    let n = match kind {
        KernelKind::Vector => m,
        KernelKind::Paravector => m - 1,
    };
    let mut acc = Multivector::zero(n);
    // Stack of (center, size, depth) subcells.
    let mut stack = vec![(cell_center.to_vec(), cell_size, 0u32)];
    while let Some((center, size, depth)) = stack.pop() {
        let diff: Vec<f64> = center.iter().zip(x).map(|(a, b)| a - b).collect();
        let r = diff.iter().map(|c| c * c).sum::<f64>().sqrt();
        let diag = size * (m as f64).sqrt();
        if r >= diag || depth >= max_depth {
            if r > 0.0 {
                if let Ok(k) = fundamental_solution(kind, &diff) {
                    acc.add_scaled(&k, size.powi(m as i32));
                }
            }
            // r == 0 at the cap: odd kernel core, dropped.
            continue;
        }
        let half = size / 2.0;
        for child in 0..(1usize << m) {
            let cc: Vec<f64> = center
                .iter()
                .enumerate()
                .map(|(axis, &c)| c + if child >> axis & 1 == 1 { half / 2.0 } else { -half / 2.0 })
                .collect();
            stack.push((cc, half, depth + 1));
        }
    }
    acc
}

/// Map a Cl(1) value to its complex image (1 -> 1, e_1 -> i).
pub fn cl1_to_complex(v: &Multivector) -> Complex64 {
    debug_assert_eq!(v.dim(), 1);
    Complex64::new(v.coeffs()[0], v.coeffs()[1])
}

/// Inverse of [`cl1_to_complex`].
pub fn complex_to_cl1(z: Complex64) -> Multivector {
    Multivector::from_coeffs(1, vec![z.re, z.im]).expect("two coefficients")
}
