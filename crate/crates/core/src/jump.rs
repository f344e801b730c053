//! Solver for the scalar additive jump problem Phi+ - Phi- = g on a closed
//! (possibly fractal) plane curve, with Phi monogenic off the curve.
//!
//! The pipeline splits g into its even part and odd cofactor relative to the
//! pivot generator, maps both to Cl(1) data on the paravector plane, extends
//! each datum off the boundary with a Whitney extension, multiplies by the
//! one-sided characteristic function (inner variant) or by minus the clipped
//! outer characteristic function times a cutoff (outer variant), and corrects
//! with the volume potential of the derivative so each branch becomes
//! monogenic off the curve while keeping the prescribed jump. The two
//! branches reassemble through the inverse isomorphisms.
//!
//! Solvability and uniqueness checks evaluate the Marcinkiewicz-exponent
//! inequalities; each of the four inner/outer variant combinations is
//! certified separately.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{
    beta_iso, beta_iso_inv, point_from_reduced, point_to_reduced, split_even_odd, Multivector,
};
use crate::error::{CoreError, Result};
use crate::fractal::{Cutoff, FractalCurveSpec};
use crate::geometry::Aabb;
use crate::quadrature::{
    build_weighted_mesh, cl1_to_complex, complex_to_cl1, potential, MeshParams, WeightedMesh,
};
use crate::whitney::{CompactSample, EvalFlag, WhitneyDecomposition, WhitneyExtension};

/// Closed boundary curves the solver understands.
#[derive(Clone, Debug)]
pub enum BoundaryGeometry {
    Circle { center: [f64; 2], radius: f64 },
    Fractal(FractalCurveSpec),
}

impl BoundaryGeometry {
    pub fn is_inside(&self, p: [f64; 2]) -> bool {
        match self {
            BoundaryGeometry::Circle { center, radius } => {
                ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt() < *radius
            }
            BoundaryGeometry::Fractal(spec) => spec.contains(p),
        }
    }

    pub fn dist(&self, p: [f64; 2]) -> f64 {
        match self {
            BoundaryGeometry::Circle { center, radius } => {
                (((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt() - radius).abs()
            }
            BoundaryGeometry::Fractal(spec) => spec.dist_to_boundary(p),
        }
    }

    /// Center and radius of a ball strictly containing the curve.
    pub fn circumball(&self) -> ([f64; 2], f64) {
        match self {
            BoundaryGeometry::Circle { center, radius } => (*center, *radius),
            BoundaryGeometry::Fractal(_) => {
                let center = [0.5, -0.25];
                (center, (0.5f64.powi(2) + 0.75f64.powi(2)).sqrt())
            }
        }
    }

    /// Uniform-ish boundary samples; the fractal adds a geometric tail near
    /// its accumulation point.
    pub fn sample_points(&self, count: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            BoundaryGeometry::Circle { center, radius } => Ok((0..count)
                .map(|k| {
                    let t = k as f64 / count as f64 * std::f64::consts::TAU;
                    vec![center[0] + radius * t.cos(), center[1] + radius * t.sin()]
                })
                .collect()),
            BoundaryGeometry::Fractal(spec) => {
                let region = crate::fractal::PolyrectRegion::build(*spec)?;
                Ok(crate::fractal::boundary_samples(&region, count, true))
            }
        }
    }

    /// Outward unit normal estimate at a boundary point.
    pub fn outward_normal(&self, p: [f64; 2]) -> [f64; 2] {
        match self {
            BoundaryGeometry::Circle { center, .. } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                let n = dx.hypot(dy).max(1e-300);
                [dx / n, dy / n]
            }
            BoundaryGeometry::Fractal(_) => {
                // Gradient of the signed distance by central differences.
                let h = 1e-6;
                let sd = |q: [f64; 2]| {
                    let d = self.dist(q);
                    if self.is_inside(q) {
                        -d
                    } else {
                        d
                    }
                };
                let gx = (sd([p[0] + h, p[1]]) - sd([p[0] - h, p[1]])) / (2.0 * h);
                let gy = (sd([p[0], p[1] + h]) - sd([p[0], p[1] - h])) / (2.0 * h);
                let n = gx.hypot(gy).max(1e-300);
                [gx / n, gy / n]
            }
        }
    }
}

/// Which characteristic function a branch multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariantSide {
    Inner,
    Outer,
}

/// Inner/outer choice per branch; four combinations total.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionVariant {
    pub even: VariantSide,
    pub odd: VariantSide,
}

impl SolutionVariant {
    pub const ALL: [SolutionVariant; 4] = [
        SolutionVariant { even: VariantSide::Inner, odd: VariantSide::Inner },
        SolutionVariant { even: VariantSide::Inner, odd: VariantSide::Outer },
        SolutionVariant { even: VariantSide::Outer, odd: VariantSide::Inner },
        SolutionVariant { even: VariantSide::Outer, odd: VariantSide::Outer },
    ];
}

/// Jump problem instance: boundary samples of g, asserted Hoelder exponents
/// of the split parts, pivot generator, and the value at infinity.
#[derive(Clone)]
pub struct JumpProblem {
    pub boundary: BoundaryGeometry,
    pub samples: Vec<Vec<f64>>,
    pub data: Vec<Multivector>,
    pub pivot: usize,
    pub nu_even: f64,
    pub nu_odd: f64,
    pub c_infinity: Multivector,
}

impl JumpProblem {
    pub fn new(
        boundary: BoundaryGeometry,
        samples: Vec<Vec<f64>>,
        data: Vec<Multivector>,
        pivot: usize,
        nu_even: f64,
        nu_odd: f64,
        c_infinity: Multivector,
    ) -> Result<Self> {
        if samples.len() != data.len() || samples.is_empty() {
            return Err(CoreError::input("boundary samples and data must match and be nonempty"));
        }
        if data.iter().any(|v| v.dim() != 2) || c_infinity.dim() != 2 {
            return Err(CoreError::input("jump data must take values in Cl(2)"));
        }
        if pivot == 0 || pivot > 2 {
            return Err(CoreError::input("pivot must be 1 or 2"));
        }
        for nu in [nu_even, nu_odd] {
            if !(0.0 < nu && nu <= 1.0) {
                return Err(CoreError::input(format!("Hoelder exponent {nu} outside (0, 1]")));
            }
        }
        Ok(JumpProblem { boundary, samples, data, pivot, nu_even, nu_odd, c_infinity })
    }

    /// Combined exponent: the minimum of the split parts.
    pub fn nu(&self) -> f64 {
        self.nu_even.min(self.nu_odd)
    }

    /// Empirical consistency of the asserted exponents with the sampled
    /// data; rejects an exponent visibly above the measured sup-exponent.
    pub fn validate_holder(&self) -> Result<()> {
        let (even, odd) = split_jump_data(&self.data, self.pivot)?;
        for (label, values, nu) in
            [("even", &even, self.nu_even), ("odd", &odd, self.nu_odd)]
        {
            let scalars: Vec<f64> = values.iter().map(|v| v.norm()).collect();
            let all_same = scalars.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-13);
            if all_same {
                continue;
            }
            match crate::fractal::holder_sup_exponent(&self.samples, &scalars, 1) {
                Ok(est) if !est.degenerate && nu > est.exponent + 0.08 => {
                    return Err(CoreError::input(format!(
                        "asserted {label} exponent {nu} exceeds the measured sup-exponent {:.4}",
                        est.exponent
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Split boundary data into the two reduced jump data: conj(beta(even part))
/// for the right-monogenic branch and beta(odd cofactor) for the left one.
pub fn split_jump_data(
    data: &[Multivector],
    pivot: usize,
) -> Result<(Vec<Multivector>, Vec<Multivector>)> {
    let mut even = Vec::with_capacity(data.len());
    let mut odd = Vec::with_capacity(data.len());
    for g in data {
        let parts = split_even_odd(g, pivot)?;
        even.push(beta_iso(&parts.even, pivot)?.conjugate());
        odd.push(beta_iso(&parts.odd_cofactor, pivot)?);
    }
    Ok((even, odd))
}

/// Reassemble a Cl(2) value from the two reduced branch values.
pub fn assemble_from_branches(
    upsilon_even: Complex64,
    upsilon_odd: Complex64,
    pivot: usize,
) -> Multivector {
    let phi0_hat = complex_to_cl1(upsilon_even).conjugate();
    let phi1_hat = complex_to_cl1(upsilon_odd);
    let phi0 = beta_iso_inv(&phi0_hat, pivot, 2).expect("Cl(1) lifts to Cl(2)+");
    let phi1 = beta_iso_inv(&phi1_hat, pivot, 2).expect("Cl(1) lifts to Cl(2)+");
    let e = Multivector::basis_blade(2, crate::clifford::BladeIndex(1 << (pivot - 1)));
    phi0.add(&e.geometric_product(&phi1).expect("same dimension"))
}

/// Solvability decision per the exponent inequalities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolvabilityReport {
    pub n: usize,
    pub m_plus: f64,
    pub m_minus: f64,
    pub nu_even: f64,
    pub nu_odd: f64,
    pub threshold_inner: f64,
    pub threshold_outer: f64,
    pub threshold_overall: f64,
    pub even_inner: bool,
    pub even_outer: bool,
    pub odd_inner: bool,
    pub odd_outer: bool,
    pub solvable: bool,
    pub certified_variants: Vec<SolutionVariant>,
}

/// Evaluate nu_j > 1 - m(side)/n for both parts and both sides (vectorial
/// setting; strict inequalities). A variant is certified when both its
/// branches pass.
pub fn check_solvability(
    nu_even: f64,
    nu_odd: f64,
    m_plus: f64,
    m_minus: f64,
    n: usize,
) -> SolvabilityReport {
    let nf = n as f64;
    let threshold_inner = 1.0 - m_plus / nf;
    let threshold_outer = 1.0 - m_minus / nf;
    let m = m_plus.max(m_minus);
    let threshold_overall = 1.0 - m / nf;
    let even_inner = nu_even > threshold_inner;
    let even_outer = nu_even > threshold_outer;
    let odd_inner = nu_odd > threshold_inner;
    let odd_outer = nu_odd > threshold_outer;
    let mut certified = Vec::new();
    for v in SolutionVariant::ALL {
        let even_ok = match v.even {
            VariantSide::Inner => even_inner,
            VariantSide::Outer => even_outer,
        };
        let odd_ok = match v.odd {
            VariantSide::Inner => odd_inner,
            VariantSide::Outer => odd_outer,
        };
        if even_ok && odd_ok {
            certified.push(v);
        }
    }
    SolvabilityReport {
        n,
        m_plus,
        m_minus,
        nu_even,
        nu_odd,
        threshold_inner,
        threshold_outer,
        threshold_overall,
        even_inner,
        even_outer,
        odd_inner,
        odd_outer,
        solvable: nu_even.min(nu_odd) > threshold_overall,
        certified_variants: certified,
    }
}

/// Uniqueness window (dim_upper - (n-1), 1 - n(1-nu)/m) and the
/// non-coincidence criterion.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct UniquenessWindow {
    pub lo: f64,
    pub hi: f64,
    pub nonempty: bool,
    /// True when dim_upper - (n-1) >= 1 - n(1-nu)/m: distinct solution
    /// representations are not excluded.
    pub distinct_solutions_possible: bool,
}

pub fn check_uniqueness_window(dim_upper: f64, nu: f64, m: f64, n: usize) -> UniquenessWindow {
    let nf = n as f64;
    let lo = dim_upper - (nf - 1.0);
    let hi = 1.0 - nf * (1.0 - nu) / m;
    UniquenessWindow { lo, hi, nonempty: lo < hi, distinct_solutions_possible: lo >= hi }
}

/// Numerical parameters of the solve pipeline.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SolveParams {
    /// Whitney refinement depth (collar shrinks as 2^-depth).
    pub whitney_depth: u32,
    /// Quadrature resolution: smallest cells are extent / (4 resolution).
    pub resolution: u32,
    /// Exact-kernel neighborhood radius in units of the local cell size.
    pub near_factor: f64,
    /// Cutoff radii in units of the circumradius.
    pub rho_inner_factor: f64,
    pub rho_outer_factor: f64,
    /// Clipping ball radius in units of the circumradius.
    pub clip_factor: f64,
    /// Proceed even when the requested variant is not certified.
    pub force: bool,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            whitney_depth: 12,
            resolution: 256,
            near_factor: 16.0,
            rho_inner_factor: 1.25,
            rho_outer_factor: 1.75,
            clip_factor: 2.0,
            force: false,
        }
    }
}

/// Evaluation flags for probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeStatus {
    Ok,
    /// Inside the excluded collar around the boundary.
    Rejected,
}

struct Branch {
    extension: WhitneyExtension,
    mesh: WeightedMesh,
    side: VariantSide,
}

/// Evaluator for one solved jump problem; immutable and thread-safe.
pub struct SolvedField {
    boundary: BoundaryGeometry,
    pivot: usize,
    variant: SolutionVariant,
    c_infinity: Multivector,
    rho: Cutoff,
    clip_center: [f64; 2],
    clip_radius: f64,
    branches: [Branch; 2],
    exclusion: f64,
    pub params: SolveParams,
    pub diagnostics: SolveDiagnostics,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub excluded_area: [f64; 2],
    /// Crude bound for the dropped collar contribution to the potential.
    pub collar_budget: [f64; 2],
    pub whitney_cubes: [usize; 2],
    pub mesh_cells: [usize; 2],
    pub warnings: Vec<String>,
}

/// Solve the jump problem for one inner/outer variant combination.
///
/// `certify` carries the Marcinkiewicz exponents used to gate the variant;
/// pass `params.force = true` to bypass the gate.
pub fn solve_jump(
    problem: &JumpProblem,
    variant: SolutionVariant,
    exponents: (f64, f64),
    params: SolveParams,
) -> Result<SolvedField> {
    let report =
        check_solvability(problem.nu_even, problem.nu_odd, exponents.0, exponents.1, 2);
    if !params.force && !report.certified_variants.contains(&variant) {
        return Err(CoreError::NotCertified(format!(
            "variant {variant:?} not certified: thresholds inner {:.6} / outer {:.6}, exponents ({}, {})",
            report.threshold_inner, report.threshold_outer, problem.nu_even, problem.nu_odd
        )));
    }

    let pivot = problem.pivot;
    let (even_data, odd_data) = split_jump_data(&problem.data, pivot)?;
    let (center, circum) = problem.boundary.circumball();
    let clip_radius = params.clip_factor * circum;
    let rho = Cutoff::new(
        vec![center[0], center[1]],
        params.rho_inner_factor * circum,
        params.rho_outer_factor * circum,
    )?;

    // Reduced-plane sample cloud (coordinates permuted by the pivot map).
    let y_points: Vec<Vec<f64>> =
        problem.samples.iter().map(|p| point_to_reduced(p, pivot)).collect();
    let y_center = point_to_reduced(&[center[0], center[1]], pivot);
    let half_extent = (params.rho_outer_factor.max(params.clip_factor) + 0.25) * circum;
    let extent = 2.0 * half_extent;
    let root = Aabb::new(
        vec![y_center[0] - half_extent, y_center[1] - half_extent],
        vec![y_center[0] + half_extent, y_center[1] + half_extent],
    );

    let sample_even =
        Arc::new(CompactSample::new(y_points.clone(), even_data, problem.nu_even)?);
    let sample_odd = Arc::new(CompactSample::new(y_points, odd_data, problem.nu_odd)?);
    let decomposition =
        Arc::new(WhitneyDecomposition::build(&sample_even, &root, params.whitney_depth)?);
    let ext_even = WhitneyExtension::new(sample_even, Arc::clone(&decomposition));
    let ext_odd = WhitneyExtension::new(sample_odd, Arc::clone(&decomposition));

    let exclusion = 2.0 * decomposition.collar_width();
    let mesh_params = MeshParams {
        min_cell: (extent / (4.0 * params.resolution as f64)).min(exclusion / 2.0),
        max_cell: extent / 64.0,
        grading: 0.5,
        exclusion,
        max_cells: 4_000_000,
    };

    let mut diagnostics = SolveDiagnostics::default();
    let mut branches = Vec::with_capacity(2);
    for (idx, (ext, side)) in
        [(ext_even, variant.even), (ext_odd, variant.odd)].into_iter().enumerate()
    {
        let mesh = build_branch_mesh(
            problem,
            &ext,
            side,
            &rho,
            clip_radius,
            &root,
            mesh_params,
            pivot,
        )?;
        diagnostics.excluded_area[idx] = mesh.excluded_area;
        diagnostics.collar_budget[idx] = mesh.excluded_area * mesh.max_weight_near_collar;
        diagnostics.whitney_cubes[idx] = ext.decomposition().cubes().len();
        diagnostics.mesh_cells[idx] = mesh.cells.len();
        branches.push(Branch { extension: ext, mesh, side });
    }
    let branch_odd = branches.pop().unwrap();
    let branch_even = branches.pop().unwrap();

    Ok(SolvedField {
        boundary: problem.boundary.clone(),
        pivot,
        variant,
        c_infinity: problem.c_infinity.clone(),
        rho,
        clip_center: center,
        clip_radius,
        branches: [branch_even, branch_odd],
        exclusion,
        params,
        diagnostics,
    })
}

#[allow(clippy::too_many_arguments)]
fn build_branch_mesh(
    problem: &JumpProblem,
    ext: &WhitneyExtension,
    side: VariantSide,
    rho: &Cutoff,
    clip_radius: f64,
    root: &Aabb,
    params: MeshParams,
    pivot: usize,
) -> Result<WeightedMesh> {
    let boundary = &problem.boundary;
    let (center, _) = boundary.circumball();
    let member = |y: [f64; 2]| {
        let x = point_from_reduced(&y, pivot);
        let inside = boundary.is_inside([x[0], x[1]]);
        match side {
            VariantSide::Inner => inside,
            VariantSide::Outer => {
                !inside && (x[0] - center[0]).hypot(x[1] - center[1]) < clip_radius
            }
        }
    };
    let dist = |y: [f64; 2]| {
        let x = point_from_reduced(&y, pivot);
        let d_boundary = boundary.dist([x[0], x[1]]);
        match side {
            VariantSide::Inner => d_boundary,
            VariantSide::Outer => {
                // Grade toward both the curve and the clipping sphere.
                let d_clip =
                    (clip_radius - (x[0] - center[0]).hypot(x[1] - center[1])).abs();
                d_boundary.min(d_clip)
            }
        }
    };
    // Derivative of the branch density: D(u chi+) = Du on the inside, and
    // D(-u rho chi*) = -(Du rho + u Drho) outside. The reduced operator is
    // d/dy0 + e1 d/dy1, i.e. w = du0 + i du1 in the complex picture.
    let weight = |y: [f64; 2]| {
        let yv = [y[0], y[1]];
        let (u, flag) = ext.eval(&yv);
        if flag != EvalFlag::Covered {
            return Complex64::new(0.0, 0.0);
        }
        let grad = match ext.grad(&yv) {
            Ok(g) => g,
            Err(_) => return Complex64::new(0.0, 0.0),
        };
        let du = cl1_to_complex(&grad[0]) + Complex64::new(0.0, 1.0) * cl1_to_complex(&grad[1]);
        match side {
            VariantSide::Inner => du,
            VariantSide::Outer => {
                let x = point_from_reduced(&y, pivot);
                let r = rho.eval(&x);
                if r == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let rg = rho.grad(&x);
                // Gradient back in reduced coordinates.
                let rg_y = point_to_reduced(&rg, pivot);
                let drho = Complex64::new(rg_y[0], rg_y[1]);
                -(du * r + cl1_to_complex(&u) * drho)
            }
        }
    };
    build_weighted_mesh(
        [root.lo[0], root.lo[1]],
        root.hi[0] - root.lo[0],
        &member,
        &dist,
        &weight,
        params,
    )
}

impl SolvedField {
    pub fn variant(&self) -> SolutionVariant {
        self.variant
    }

    pub fn exclusion_width(&self) -> f64 {
        self.exclusion
    }

    fn member(&self, side: VariantSide, x: [f64; 2]) -> bool {
        let inside = self.boundary.is_inside(x);
        match side {
            VariantSide::Inner => inside,
            VariantSide::Outer => {
                !inside
                    && (x[0] - self.clip_center[0]).hypot(x[1] - self.clip_center[1])
                        < self.clip_radius
            }
        }
    }

    /// Reduced-branch value at a reduced-plane point.
    pub fn eval_upsilon(&self, branch: usize, y: [f64; 2]) -> Complex64 {
        let b = &self.branches[branch];
        let x = point_from_reduced(&y, self.pivot);
        let x2 = [x[0], x[1]];
        let phi = if self.member(b.side, x2) {
            let (u, _) = b.extension.eval(&[y[0], y[1]]);
            let u = cl1_to_complex(&u);
            match b.side {
                VariantSide::Inner => u,
                VariantSide::Outer => -u * self.rho.eval(&x),
            }
        } else {
            Complex64::new(0.0, 0.0)
        };
        phi - potential(&b.mesh, Complex64::new(y[0], y[1]), self.params.near_factor)
    }

    /// Solution value at a point off the boundary; points inside the
    /// excluded collar are rejected.
    pub fn eval(&self, x: [f64; 2]) -> Result<Multivector> {
        if self.boundary.dist(x) < self.exclusion {
            return Err(CoreError::domain(format!(
                "probe at {x:?} lies inside the unresolved collar (width {})",
                self.exclusion
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Solution value without the collar guard (used by trace extrapolation).
    pub fn eval_unchecked(&self, x: [f64; 2]) -> Multivector {
        let y = point_to_reduced(&x, self.pivot);
        let u0 = self.eval_upsilon(0, [y[0], y[1]]);
        let u1 = self.eval_upsilon(1, [y[0], y[1]]);
        assemble_from_branches(u0, u1, self.pivot).add(&self.c_infinity)
    }
}

/// Jump-residual statistics over boundary probes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JumpResidualReport {
    pub max: f64,
    pub median: f64,
    pub used: usize,
    pub skipped: usize,
    pub epsilon: f64,
}

/// Compare one-sided traces against the jump datum at sampled boundary
/// points. Traces are Richardson-extrapolated from offsets eps and eps/2, so
/// the smooth variation of Phi off the curve cancels at second order.
pub fn jump_residual(
    solved: &SolvedField,
    problem: &JumpProblem,
    probe_stride: usize,
    epsilon: f64,
) -> Result<JumpResidualReport> {
    if epsilon <= 0.0 {
        return Err(CoreError::input("epsilon must be positive"));
    }
    let mut residuals: Vec<f64> = Vec::new();
    let mut skipped = 0usize;
    let indices: Vec<usize> = (0..problem.samples.len()).step_by(probe_stride.max(1)).collect();
    let results: Vec<Option<f64>> = indices
        .par_iter()
        .map(|&k| {
            let t = [problem.samples[k][0], problem.samples[k][1]];
            let n = solved.boundary.outward_normal(t);
            let probe = |s: f64| [t[0] + s * n[0], t[1] + s * n[1]];
            let x_out_far = probe(epsilon);
            let x_out_near = probe(epsilon / 2.0);
            let x_in_far = probe(-epsilon);
            let x_in_near = probe(-epsilon / 2.0);
            let ok = !solved.boundary.is_inside(x_out_far)
                && !solved.boundary.is_inside(x_out_near)
                && solved.boundary.is_inside(x_in_far)
                && solved.boundary.is_inside(x_in_near)
                && solved.boundary.dist(x_out_near) > 0.4 * epsilon
                && solved.boundary.dist(x_in_near) > 0.4 * epsilon;
            if !ok {
                return None;
            }
            let plus = solved
                .eval_unchecked(x_in_near)
                .scale(2.0)
                .sub(&solved.eval_unchecked(x_in_far));
            let minus = solved
                .eval_unchecked(x_out_near)
                .scale(2.0)
                .sub(&solved.eval_unchecked(x_out_far));
            Some(plus.sub(&minus).sub(&problem.data[k]).norm())
        })
        .collect();
    for r in results {
        match r {
            Some(v) => residuals.push(v),
            None => skipped += 1,
        }
    }
    if residuals.is_empty() {
        return Err(CoreError::domain("no usable jump probes"));
    }
    residuals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(JumpResidualReport {
        max: *residuals.last().unwrap(),
        median: residuals[residuals.len() / 2],
        used: residuals.len(),
        skipped,
        epsilon,
    })
}

/// Discrete monogenicity residual of the reduced branches at probe points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonogenicityReport {
    pub max: f64,
    pub median: f64,
    pub per_branch_max: [f64; 2],
    pub step: f64,
    pub probes: usize,
}

/// Central-difference Cauchy-Riemann residual of both branches; branch 0 is
/// checked with the operator applied from the right, branch 1 from the left
/// (identical in the commutative plane picture, kept separate for clarity).
pub fn monogenicity_residual(
    solved: &SolvedField,
    probes: &[[f64; 2]],
    step: f64,
) -> Result<MonogenicityReport> {
    if probes.is_empty() {
        return Err(CoreError::input("no probes"));
    }
    let mut all: Vec<f64> = Vec::new();
    let mut per_branch = [0.0f64; 2];
    for branch in 0..2 {
        let values: Vec<f64> = probes
            .par_iter()
            .map(|&x| {
                let y = point_to_reduced(&x, solved.pivot);
                let y = [y[0], y[1]];
                let f = |p: [f64; 2]| solved.eval_upsilon(branch, p);
                let d0 = (f([y[0] + step, y[1]]) - f([y[0] - step, y[1]])) / (2.0 * step);
                let d1 = (f([y[0], y[1] + step]) - f([y[0], y[1] - step])) / (2.0 * step);
                (d0 + Complex64::new(0.0, 1.0) * d1).norm()
            })
            .collect();
        for &v in &values {
            per_branch[branch] = per_branch[branch].max(v);
            all.push(v);
        }
    }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(MonogenicityReport {
        max: *all.last().unwrap(),
        median: all[all.len() / 2],
        per_branch_max: per_branch,
        step,
        probes: probes.len(),
    })
}

/// Trapezoid Cauchy integral over the unit circle for uniformly sampled
/// boundary data: (1/2 pi i) oint gamma(t)/(t - z) dt. Spectrally accurate
/// for smooth data away from the circle; the independent oracle for jump
/// solutions with Phi(inf) = 0.
pub fn circle_cauchy_oracle(samples: &[Complex64], z: Complex64) -> Complex64 {
    let n = samples.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &g) in samples.iter().enumerate() {
        let theta = k as f64 / n as f64 * std::f64::consts::TAU;
        let t = Complex64::new(theta.cos(), theta.sin());
        acc += g * t / (t - z);
    }
    acc / n as f64
}
