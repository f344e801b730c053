use fracbvp_core::jump::*;
use fracbvp_core::clifford::Multivector;
use num_complex::Complex64;
use std::time::Instant;

fn main() {
    for (depth, res, nsamp) in [(13u32, 192u32, 8192usize), (14, 256, 16384)] {
        let data = |t: Complex64| (0.5 * t * t + 0.1 / t, t + 0.25 / t);
        let boundary = BoundaryGeometry::Circle { center: [0.0, 0.0], radius: 1.0 };
        let points = boundary.sample_points(nsamp).unwrap();
        let gdata: Vec<Multivector> = points.iter().map(|p| {
            let t = Complex64::new(p[0], p[1]);
            let (de, do_) = data(t);
            assemble_from_branches(de, do_, 1)
        }).collect();
        let problem = JumpProblem::new(boundary, points.clone(), gdata, 1, 1.0, 1.0, Multivector::zero(2)).unwrap();
        let variant = SolutionVariant { even: VariantSide::Inner, odd: VariantSide::Outer };
        let params = SolveParams { whitney_depth: depth, resolution: res, ..Default::default() };
        let t0 = Instant::now();
        let solved = solve_jump(&problem, variant, (1.0, 1.0), params).unwrap();
        eprintln!("depth {depth} res {res} nsamp {nsamp}: solve {:?} cells {:?}", t0.elapsed(), solved.diagnostics.mesh_cells);
        let ge: Vec<Complex64> = points.iter().map(|p| data(Complex64::new(p[0], p[1])).0).collect();
        let go: Vec<Complex64> = points.iter().map(|p| data(Complex64::new(p[0], p[1])).1).collect();
        let t1 = Instant::now();
        let mut we = 0.0f64; let mut wo = 0.0f64; let mut scale = 0.0f64;
        for k in 0..16 {
            let th = k as f64 / 16.0 * std::f64::consts::TAU;
            for r in [0.5, 1.6] {
                let z = Complex64::new(r * th.cos(), r * th.sin());
                let oe = circle_cauchy_oracle(&ge, z);
                let oo = circle_cauchy_oracle(&go, z);
                we = we.max((solved.eval_upsilon(0, [z.re, z.im]) - oe).norm());
                wo = wo.max((solved.eval_upsilon(1, [z.re, z.im]) - oo).norm());
                scale = scale.max(oe.norm()).max(oo.norm());
            }
        }
        eprintln!("  errors: even {we:.5} odd {wo:.5} scale {scale:.3} evals {:?}", t1.elapsed());
    }
}
