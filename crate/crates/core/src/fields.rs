//! Multivector-valued fields on uniform grids with second-order central
//! difference Dirac and Cauchy-Riemann operators, the reduction identity
//! residual, and the fundamental-solution kernels.
//!
//! Two settings share the machinery: fields over R^m valued in Cl(m) carry
//! the Dirac operator sum e_j d/dx^j, and fields over R^{q+1} valued in Cl(q)
//! carry the Cauchy-Riemann operator d/dy^0 + sum e_j d/dy^j. Nodes on the
//! grid edge cannot host a central stencil and are masked invalid in every
//! operator output.

use serde::{Deserialize, Serialize};

use crate::clifford::{beta_iso, blade_product_sign, split_even_odd, Multivector};
use crate::error::{CoreError, Result};

/// Which side a Clifford operator multiplies from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorSide {
    Left,
    Right,
}

/// Fundamental-solution family: the Cauchy-Riemann kernel on paravector
/// space R^{q+1}, or the Dirac kernel on vector space R^m.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Paravector,
    Vector,
}

/// Uniform lattice: `extents[k]` nodes along axis k, spacing `h`, corner
/// `origin`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Grid {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub extents: Vec<usize>,
}

impl Grid {
    pub fn new(origin: Vec<f64>, spacing: f64, extents: Vec<usize>) -> Result<Self> {
        if spacing <= 0.0 {
            return Err(CoreError::input("grid spacing must be positive"));
        }
        if origin.len() != extents.len() || origin.is_empty() {
            return Err(CoreError::input("grid origin/extents dimension mismatch"));
        }
        if extents.iter().any(|&e| e == 0) {
            return Err(CoreError::input("grid extents must be nonzero"));
        }
        Ok(Grid { origin, spacing, extents })
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn node_count(&self) -> usize {
        self.extents.iter().product()
    }

    /// Row-major strides; axis 0 is the slowest.
    pub fn strides(&self) -> Vec<usize> {
        let dim = self.dim();
        let mut strides = vec![1; dim];
        for k in (0..dim.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.extents[k + 1];
        }
        strides
    }

    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        let strides = self.strides();
        let mut rem = node;
        strides
            .iter()
            .map(|&s| {
                let q = rem / s;
                rem %= s;
                q
            })
            .collect()
    }

    pub fn node_of(&self, multi: &[usize]) -> usize {
        self.strides().iter().zip(multi).map(|(s, m)| s * m).sum()
    }

    pub fn point(&self, node: usize) -> Vec<f64> {
        self.multi_index(node)
            .iter()
            .zip(&self.origin)
            .map(|(&m, &o)| o + m as f64 * self.spacing)
            .collect()
    }
}

/// Multivector samples on a [`Grid`], stored blade-major so per-blade sweeps
/// are contiguous. `mask[node]` marks nodes whose value is meaningful.
#[derive(Clone, Debug, PartialEq)]
pub struct MultivectorField {
    grid: Grid,
    clifford_dim: usize,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl MultivectorField {
    pub fn zero(grid: Grid, clifford_dim: usize) -> Self {
        let nodes = grid.node_count();
        let blades = 1usize << clifford_dim;
        MultivectorField {
            grid,
            clifford_dim,
            values: vec![0.0; nodes * blades],
            mask: vec![true; nodes],
        }
    }

    pub fn from_fn(grid: Grid, clifford_dim: usize, f: impl Fn(&[f64]) -> Multivector) -> Self {
        let mut field = Self::zero(grid, clifford_dim);
        for node in 0..field.grid.node_count() {
            let p = field.grid.point(node);
            let v = f(&p);
            assert_eq!(v.dim(), clifford_dim, "field value dimension mismatch");
            field.set_value(node, &v);
        }
        field
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn clifford_dim(&self) -> usize {
        self.clifford_dim
    }

    pub fn blade_count(&self) -> usize {
        1 << self.clifford_dim
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn set_mask(&mut self, node: usize, valid: bool) {
        self.mask[node] = valid;
    }

    #[inline]
    pub fn coeff(&self, blade: usize, node: usize) -> f64 {
        self.values[blade * self.grid.node_count() + node]
    }

    #[inline]
    fn coeff_mut(&mut self, blade: usize, node: usize) -> &mut f64 {
        let nodes = self.grid.node_count();
        &mut self.values[blade * nodes + node]
    }

    pub fn value(&self, node: usize) -> Multivector {
        let nodes = self.grid.node_count();
        let mut mv = Multivector::zero(self.clifford_dim);
        for blade in 0..self.blade_count() {
            let c = self.values[blade * nodes + node];
            if c != 0.0 {
                mv.set_coeff(crate::clifford::BladeIndex(blade as u16), c);
            }
        }
        mv
    }

    pub fn set_value(&mut self, node: usize, v: &Multivector) {
        let nodes = self.grid.node_count();
        for (blade, &c) in v.coeffs().iter().enumerate() {
            self.values[blade * nodes + node] = c;
        }
    }

    /// Central difference along `axis`; edge nodes and neighbors of invalid
    /// nodes become invalid.
    pub fn directional_derivative(&self, axis: usize) -> Result<MultivectorField> {
        if self.grid.extents[axis] < 3 {
            return Err(CoreError::input(format!(
                "axis {axis} has {} nodes; central stencils need at least 3",
                self.grid.extents[axis]
            )));
        }
        let mut out = MultivectorField::zero(self.grid.clone(), self.clifford_dim);
        let stride = self.grid.strides()[axis];
        let nodes = self.grid.node_count();
        let inv2h = 1.0 / (2.0 * self.grid.spacing);
        for node in 0..nodes {
            let multi = self.grid.multi_index(node);
            let ok = multi[axis] >= 1
                && multi[axis] + 1 < self.grid.extents[axis]
                && self.mask[node + stride]
                && self.mask[node - stride]
                && self.mask[node];
            if !ok {
                out.mask[node] = false;
                continue;
            }
            for blade in 0..self.blade_count() {
                let hi = self.values[blade * nodes + node + stride];
                let lo = self.values[blade * nodes + node - stride];
                *out.coeff_mut(blade, node) = (hi - lo) * inv2h;
            }
        }
        Ok(out)
    }

    /// In-place `self += sign * (e_B * other)` or `(other * e_B)` for a basis
    /// blade with mask `blade_mask`, merging validity masks.
    fn accumulate_blade_product(
        &mut self,
        blade_mask: u16,
        sign: f64,
        other: &MultivectorField,
        side: OperatorSide,
    ) {
        let nodes = self.grid.node_count();
        for src in 0..self.blade_count() {
            let s = match side {
                OperatorSide::Left => blade_product_sign(blade_mask, src as u16),
                OperatorSide::Right => blade_product_sign(src as u16, blade_mask),
            } * sign;
            let dst = (src as u16 ^ blade_mask) as usize;
            for node in 0..nodes {
                let v = other.values[src * nodes + node];
                if v != 0.0 {
                    self.values[dst * nodes + node] += s * v;
                }
            }
        }
        for node in 0..nodes {
            self.mask[node] = self.mask[node] && other.mask[node];
        }
    }

    /// Apply a first-order operator sum_k coef_k * d/d(axis_k), with each
    /// single-blade coefficient multiplying from `side`.
    fn apply_operator(
        &self,
        terms: &[(usize, u16, f64)],
        side: OperatorSide,
    ) -> Result<MultivectorField> {
        let mut out = MultivectorField::zero(self.grid.clone(), self.clifford_dim);
        for &(axis, blade_mask, sign) in terms {
            let deriv = self.directional_derivative(axis)?;
            out.accumulate_blade_product(blade_mask, sign, &deriv, side);
        }
        Ok(out)
    }

    /// Vectorial Dirac operator sum_{j=1..m} e_j d/dx^j; needs the grid
    /// dimension to equal the Clifford dimension.
    pub fn dirac(&self, side: OperatorSide) -> Result<MultivectorField> {
        let m = self.grid.dim();
        if m != self.clifford_dim {
            return Err(CoreError::input(format!(
                "Dirac operator needs grid dim == Clifford dim, got {m} vs {}",
                self.clifford_dim
            )));
        }
        let terms: Vec<(usize, u16, f64)> = (0..m).map(|j| (j, 1u16 << j, 1.0)).collect();
        self.apply_operator(&terms, side)
    }

    /// Cauchy-Riemann operator d/dy^0 +/- sum_{j=1..q} e_j d/dy^j on fields
    /// over R^{q+1} valued in Cl(q); `conjugated` flips the vector part sign.
    pub fn cauchy_riemann(&self, side: OperatorSide, conjugated: bool) -> Result<MultivectorField> {
        let m = self.grid.dim();
        if m != self.clifford_dim + 1 {
            return Err(CoreError::input(format!(
                "Cauchy-Riemann operator needs grid dim == Clifford dim + 1, got {m} vs {}",
                self.clifford_dim
            )));
        }
        let s = if conjugated { -1.0 } else { 1.0 };
        let mut terms = vec![(0usize, 0u16, 1.0)];
        terms.extend((1..m).map(|j| (j, 1u16 << (j - 1), s)));
        self.apply_operator(&terms, side)
    }

    /// Split form of the Dirac operator relative to pivot i0:
    /// d/dx^{i0} +/- sum_{i != i0} (e_{i0} e_i) d/dx^i, values in Cl(n).
    pub fn dirac_split_form(
        &self,
        i0: usize,
        conjugated: bool,
        side: OperatorSide,
    ) -> Result<MultivectorField> {
        let m = self.grid.dim();
        if m != self.clifford_dim {
            return Err(CoreError::input(format!(
                "split-form operator needs grid dim == Clifford dim, got {m} vs {}",
                self.clifford_dim
            )));
        }
        if i0 == 0 || i0 > m {
            return Err(CoreError::input(format!("pivot {i0} outside 1..={m}")));
        }
        let s = if conjugated { -1.0 } else { 1.0 };
        let pivot_bit = 1u16 << (i0 - 1);
        let mut terms = vec![(i0 - 1, 0u16, 1.0)];
        for i in 1..=m {
            if i != i0 {
                // e_{i0} e_i is the blade e_{i0,i} for i0 < i, and -e_{i,i0}
                // for i < i0.
                let blade = pivot_bit | (1u16 << (i - 1));
                let blade_sign = if i > i0 { 1.0 } else { -1.0 };
                terms.push((i - 1, blade, s * blade_sign));
            }
        }
        self.apply_operator(&terms, side)
    }

    /// Per-node norm of Dirac(f) - [ e_{i0} conj-split(f_0) - split(f_1) ],
    /// the discrete form of the reduction identity. Returns the node-wise
    /// residuals (NaN where masked) and the maximum over valid nodes.
    pub fn reduction_identity_residual(&self, i0: usize) -> Result<(Vec<f64>, f64)> {
        let lhs = self.dirac(OperatorSide::Left)?;
        let nodes = self.grid.node_count();

        let mut f0 = MultivectorField::zero(self.grid.clone(), self.clifford_dim);
        let mut f1 = MultivectorField::zero(self.grid.clone(), self.clifford_dim);
        for node in 0..nodes {
            let parts = split_even_odd(&self.value(node), i0)?;
            f0.set_value(node, &parts.even);
            f1.set_value(node, &parts.odd_cofactor);
        }
        f0.mask = self.mask.clone();
        f1.mask = self.mask.clone();

        let d_conj_f0 = f0.dirac_split_form(i0, true, OperatorSide::Left)?;
        let d_f1 = f1.dirac_split_form(i0, false, OperatorSide::Left)?;

        let pivot_bit = 1u16 << (i0 - 1);
        let mut rhs = MultivectorField::zero(self.grid.clone(), self.clifford_dim);
        rhs.accumulate_blade_product(pivot_bit, 1.0, &d_conj_f0, OperatorSide::Left);
        rhs.accumulate_blade_product(0, -1.0, &d_f1, OperatorSide::Left);

        let mut residual = vec![0.0; nodes];
        let mut max = 0.0f64;
        for node in 0..nodes {
            if lhs.mask[node] && rhs.mask[node] {
                let r = lhs.value(node).sub(&rhs.value(node)).norm();
                residual[node] = r;
                max = max.max(r);
            } else {
                residual[node] = f64::NAN;
            }
        }
        Ok((residual, max))
    }

    /// Maximum value norm over valid nodes.
    pub fn max_norm(&self) -> f64 {
        (0..self.grid.node_count())
            .filter(|&n| self.mask[n])
            .map(|n| self.value(n).norm())
            .fold(0.0, f64::max)
    }

    /// Map an even-valued field over R^n to its image under beta_{i0}: values
    /// in Cl(n-1) on the grid with axes permuted so x^{i0} comes first.
    pub fn reduce_via_beta(&self, i0: usize) -> Result<MultivectorField> {
        let n = self.grid.dim();
        if n != self.clifford_dim {
            return Err(CoreError::input("reduce_via_beta needs grid dim == Clifford dim"));
        }
        let perm: Vec<usize> =
            std::iter::once(i0 - 1).chain((0..n).filter(|&a| a != i0 - 1)).collect();
        let new_grid = Grid::new(
            perm.iter().map(|&a| self.grid.origin[a]).collect(),
            self.grid.spacing,
            perm.iter().map(|&a| self.grid.extents[a]).collect(),
        )?;
        let mut out = MultivectorField::zero(new_grid, self.clifford_dim - 1);
        for node in 0..self.grid.node_count() {
            let multi = self.grid.multi_index(node);
            let new_multi: Vec<usize> = perm.iter().map(|&a| multi[a]).collect();
            let new_node = out.grid.node_of(&new_multi);
            out.set_value(new_node, &beta_iso(&self.value(node), i0)?);
            out.mask[new_node] = self.mask[node];
        }
        Ok(out)
    }
}

/// Surface area of the unit sphere S^{n-1} in R^n.
pub fn unit_sphere_area(n: usize) -> f64 {
    assert!(n >= 1);
    // sigma_1 = 2, sigma_2 = 2 pi, sigma_k = 2 pi sigma_{k-2} / (k-2).
    match n {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI * unit_sphere_area(n - 2) / (n - 2) as f64,
    }
}

/// Fundamental solution of the Cauchy-Riemann (paravector kind, x in R^{q+1},
/// value in Cl(q)) or Dirac (vector kind, x in R^m, value in Cl(m)) operator.
pub fn fundamental_solution(kind: KernelKind, x: &[f64]) -> Result<Multivector> {
    let r2: f64 = x.iter().map(|c| c * c).sum();
    if r2 == 0.0 {
        return Err(CoreError::domain("fundamental solution evaluated at the origin"));
    }
    match kind {
        KernelKind::Paravector => {
            let q = x.len() - 1;
            if q == 0 {
                return Err(CoreError::input("paravector kernel needs at least R^2"));
            }
            let sigma = unit_sphere_area(q + 1);
            let scale = 1.0 / (sigma * r2.powf((q as f64 + 1.0) / 2.0));
            let mut conj_coords = Vec::with_capacity(x.len());
            conj_coords.push(x[0]);
            conj_coords.extend(x[1..].iter().map(|c| -c));
            Ok(Multivector::paravector(&conj_coords).scale(scale))
        }
        KernelKind::Vector => {
            let m = x.len();
            let sigma = unit_sphere_area(m);
            let scale = -1.0 / (sigma * r2.powf(m as f64 / 2.0));
            Ok(Multivector::vector(x).scale(scale))
        }
    }
}

/// Header metadata for the JSON/CSV field interchange format.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub grid: Grid,
    pub clifford_n: usize,
    /// Canonical blade labels, one per CSV coefficient column.
    pub blades: Vec<String>,
}

/// Serialize a field as a (header JSON, coefficient CSV) pair. The CSV holds
/// one row per node in row-major node order: `valid,c_0,c_1,...` with the
/// coefficients in canonical blade order.
pub fn write_field(field: &MultivectorField) -> (String, String) {
    let blades = (0..field.blade_count())
        .map(|b| crate::clifford::BladeIndex(b as u16).label())
        .collect();
    let header =
        FieldHeader { grid: field.grid().clone(), clifford_n: field.clifford_dim(), blades };
    let header_json = serde_json::to_string_pretty(&header).expect("header serializes");
    let mut csv = String::from("valid");
    for b in 0..field.blade_count() {
        csv.push_str(&format!(",c{b}"));
    }
    csv.push('\n');
    for node in 0..field.grid().node_count() {
        csv.push_str(if field.mask()[node] { "1" } else { "0" });
        for blade in 0..field.blade_count() {
            csv.push(',');
            csv.push_str(&format!("{}", field.coeff(blade, node)));
        }
        csv.push('\n');
    }
    (header_json, csv)
}

/// Parse a field from the (header JSON, coefficient CSV) pair.
pub fn read_field(header_json: &str, csv: &str) -> Result<MultivectorField> {
    let header: FieldHeader = serde_json::from_str(header_json)
        .map_err(|e| CoreError::input(format!("bad field header: {e}")))?;
    let mut field = MultivectorField::zero(header.grid.clone(), header.clifford_n);
    let blades = field.blade_count();
    let mut lines = csv.lines();
    let _ = lines.next(); // column header
    let mut node = 0usize;
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        if node >= field.grid().node_count() {
            return Err(CoreError::input("field CSV has more rows than grid nodes"));
        }
        let mut cols = line.split(',');
        let valid = cols.next().ok_or_else(|| CoreError::input("empty field CSV row"))?;
        field.mask[node] = valid.trim() != "0";
        for blade in 0..blades {
            let cell = cols
                .next()
                .ok_or_else(|| CoreError::input(format!("field CSV row {node} too short")))?;
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| CoreError::input(format!("bad coefficient {cell:?} in row {node}")))?;
            *field.coeff_mut(blade, node) = v;
        }
        node += 1;
    }
    if node != field.grid().node_count() {
        return Err(CoreError::input(format!(
            "field CSV has {node} rows; grid has {} nodes",
            field.grid().node_count()
        )));
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::BladeIndex;

    fn grid2(n: usize, h: f64) -> Grid {
        Grid::new(vec![-0.5 * h * (n - 1) as f64; 2], h, vec![n; 2]).unwrap()
    }

    #[test]
    fn constant_field_has_zero_dirac() {
        let f = MultivectorField::from_fn(grid2(9, 0.1), 2, |_| {
            let mut v = Multivector::scalar(2, 3.0);
            v.set_coeff(BladeIndex(0b11), -1.0);
            v
        });
        let d = f.dirac(OperatorSide::Left).unwrap();
        assert_eq!(d.max_norm(), 0.0);
        assert!(!d.mask()[0], "edge nodes must be masked");
    }

    #[test]
    fn linear_monogenic_vector_field() {
        // f(x) = x1 e1 - x2 e2 in Cl(2): e1 d1(x1 e1) + e2 d2(-x2 e2) = -1 + 1 = 0,
        // exact under central differences.
        let f =
            MultivectorField::from_fn(grid2(9, 0.05), 2, |p| Multivector::vector(&[p[0], -p[1]]));
        let d = f.dirac(OperatorSide::Left).unwrap();
        assert!(d.max_norm() < 1e-14);
    }

    #[test]
    fn cauchy_riemann_on_paravector_coordinate() {
        // f(y) = y^0 + y^1 e1 in Cl(1) over R^2:
        // D f = 1 + e1 e1 = 0, conj(D) f = 1 - e1 e1 = 2.
        let f =
            MultivectorField::from_fn(grid2(9, 0.05), 1, |p| Multivector::paravector(&[p[0], p[1]]));
        let d = f.cauchy_riemann(OperatorSide::Left, false).unwrap();
        assert!(d.max_norm() < 1e-13);
        let dbar = f.cauchy_riemann(OperatorSide::Left, true).unwrap();
        for node in 0..f.grid().node_count() {
            if dbar.mask()[node] {
                assert!(dbar.value(node).sub(&Multivector::scalar(1, 2.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn antimonogenic_counterpart() {
        // f(y) = y^0 - y^1 e1: the conjugated operator annihilates it, the
        // plain one yields 2.
        let f = MultivectorField::from_fn(grid2(9, 0.05), 1, |p| {
            Multivector::paravector(&[p[0], -p[1]])
        });
        let dbar = f.cauchy_riemann(OperatorSide::Left, true).unwrap();
        assert!(dbar.max_norm() < 1e-13);
        let d = f.cauchy_riemann(OperatorSide::Left, false).unwrap();
        for node in 0..f.grid().node_count() {
            if d.mask()[node] {
                assert!(d.value(node).sub(&Multivector::scalar(1, 2.0)).norm() < 1e-12);
            }
        }
    }

    fn polynomial_field(dim: usize, n: usize, h: f64) -> MultivectorField {
        // Quadratic coefficients; central stencils are exact on these.
        let grid = Grid::new(vec![-0.4; dim], h, vec![n; dim]).unwrap();
        MultivectorField::from_fn(grid, dim, |p| {
            let mut v = Multivector::zero(dim);
            let size = 1 << dim;
            for blade in 0..size {
                let a = (blade + 1) as f64 * 0.37;
                let mut val = a;
                for (k, &c) in p.iter().enumerate() {
                    val += (0.3 + 0.1 * (blade + k) as f64) * c
                        + (0.05 * (1 + (blade * 7 + k * 3) % 5) as f64) * c * c;
                    if k + 1 < p.len() {
                        val += 0.07 * (blade % 3) as f64 * c * p[k + 1];
                    }
                }
                v.set_coeff(BladeIndex(blade as u16), val);
            }
            v
        })
    }

    #[test]
    fn reduction_identity_is_discretely_exact() {
        for i0 in 1..=3 {
            let f = polynomial_field(3, 7, 0.1);
            let (_, max) = f.reduction_identity_residual(i0).unwrap();
            assert!(max < 1e-10, "pivot {i0}: residual {max}");
        }
        let zero = MultivectorField::zero(grid2(7, 0.1), 2);
        let (_, max) = zero.reduction_identity_residual(1).unwrap();
        assert_eq!(max, 0.0);
    }

    #[test]
    fn split_then_operate_commutes() {
        // beta of the split-form derivative of f1 equals the Cauchy-Riemann
        // derivative of beta(f1) on the permuted grid.
        for i0 in 1..=2 {
            let f = polynomial_field(2, 7, 0.1);
            let mut f1 = MultivectorField::zero(f.grid().clone(), 2);
            for node in 0..f.grid().node_count() {
                let parts = split_even_odd(&f.value(node), i0).unwrap();
                f1.set_value(node, &parts.odd_cofactor);
            }
            let route_a = f1
                .dirac_split_form(i0, false, OperatorSide::Left)
                .unwrap()
                .reduce_via_beta(i0)
                .unwrap();
            let route_b =
                f1.reduce_via_beta(i0).unwrap().cauchy_riemann(OperatorSide::Left, false).unwrap();
            for node in 0..route_a.grid().node_count() {
                if route_a.mask()[node] && route_b.mask()[node] {
                    let d = route_a.value(node).sub(&route_b.value(node)).norm();
                    assert!(d < 1e-10, "pivot {i0}, node {node}: {d}");
                }
            }
        }
    }

    fn smooth_bump(dim: usize) -> impl Fn(&[f64]) -> Multivector {
        move |p: &[f64]| {
            let r2: f64 = p.iter().map(|c| c * c).sum();
            let mut v = Multivector::zero(dim);
            v.set_coeff(BladeIndex(0), (-3.0 * r2).exp());
            v.set_coeff(BladeIndex(0b1), (p[0] * 2.0).sin() * (-r2).exp());
            if dim >= 2 {
                v.set_coeff(BladeIndex(0b10), (p[1] * 1.5).cos() * (-2.0 * r2).exp());
            }
            v
        }
    }

    #[test]
    fn dirac_second_order_convergence() {
        // Error ratio between h and h/2 should sit near 4 on smooth fields.
        let f = smooth_bump(2);
        let exact_dirac = |p: &[f64]| {
            // High-order differences of the closed form as the reference.
            let eps = 1e-5;
            let mut partials = Vec::new();
            for axis in 0..2 {
                let shift = |t: f64| {
                    let mut q = p.to_vec();
                    q[axis] += t;
                    f(&q)
                };
                // 4th-order central difference, error ~ eps^4.
                let d = shift(-2.0 * eps)
                    .sub(&shift(2.0 * eps))
                    .add(&shift(eps).sub(&shift(-eps)).scale(8.0))
                    .scale(1.0 / (12.0 * eps));
                partials.push(d);
            }
            let e1 = Multivector::basis_blade(2, BladeIndex(0b01));
            let e2 = Multivector::basis_blade(2, BladeIndex(0b10));
            e1.geometric_product(&partials[0])
                .unwrap()
                .add(&e2.geometric_product(&partials[1]).unwrap())
        };
        let mut errs = Vec::new();
        for &n in &[17usize, 33] {
            let h = 0.8 / (n - 1) as f64;
            let grid = Grid::new(vec![-0.4, -0.4], h, vec![n, n]).unwrap();
            let field = MultivectorField::from_fn(grid, 2, &f);
            let d = field.dirac(OperatorSide::Left).unwrap();
            let mut max = 0.0f64;
            for node in 0..d.grid().node_count() {
                if d.mask()[node] {
                    let p = d.grid().point(node);
                    max = max.max(d.value(node).sub(&exact_dirac(&p)).norm());
                }
            }
            errs.push(max);
        }
        let ratio = errs[0] / errs[1];
        assert!((3.0..5.4).contains(&ratio), "ratio {ratio}, errs {errs:?}");
    }

    #[test]
    fn kernel_values_and_symmetry() {
        // E_1 at (1, 0) is 1/(2 pi).
        let e = fundamental_solution(KernelKind::Paravector, &[1.0, 0.0]).unwrap();
        assert!((e.scalar_part() - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert!((e.norm() - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);

        // Odd kernels.
        let x = [0.3, -0.7, 0.2];
        let t = fundamental_solution(KernelKind::Vector, &x).unwrap();
        let tm = fundamental_solution(KernelKind::Vector, &x.map(|c| -c)).unwrap();
        assert!(t.add(&tm).norm() < 1e-15);
        let e = fundamental_solution(KernelKind::Paravector, &x).unwrap();
        let em = fundamental_solution(KernelKind::Paravector, &x.map(|c| -c)).unwrap();
        assert!(e.add(&em).norm() < 1e-15);

        // Homogeneity: E_q(l x) = l^{-q} E_q(x), q the Clifford dimension.
        let lam = 2.7;
        let scaled = fundamental_solution(KernelKind::Paravector, &x.map(|c| lam * c)).unwrap();
        assert!(scaled.sub(&e.scale(lam.powi(-2))).norm() < 1e-14);

        assert!(fundamental_solution(KernelKind::Vector, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn kernel_is_discretely_monogenic_off_origin() {
        // Sample E_1 on a patch away from the origin; the discrete
        // Cauchy-Riemann residual shrinks at second order.
        let mut errs = Vec::new();
        for &n in &[17usize, 33] {
            let h = 0.4 / (n - 1) as f64;
            let grid = Grid::new(vec![1.0, 0.7], h, vec![n, n]).unwrap();
            let field = MultivectorField::from_fn(grid, 1, |p| {
                fundamental_solution(KernelKind::Paravector, p).unwrap()
            });
            errs.push(field.cauchy_riemann(OperatorSide::Left, false).unwrap().max_norm());
        }
        let slope = (errs[0] / errs[1]).log2();
        assert!((1.5..2.5).contains(&slope), "slope {slope}, errs {errs:?}");
    }

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-13);
    }

    #[test]
    fn field_io_round_trip() {
        let mut f = polynomial_field(2, 5, 0.1);
        f.set_mask(3, false);
        let (header, csv) = write_field(&f);
        let back = read_field(&header, &csv).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn too_small_grid_is_rejected() {
        let grid = Grid::new(vec![0.0, 0.0], 0.1, vec![2, 5]).unwrap();
        let f = MultivectorField::zero(grid, 2);
        assert!(f.dirac(OperatorSide::Left).is_err());
    }
}
