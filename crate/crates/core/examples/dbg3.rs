use fracbvp_core::jump::*;
use fracbvp_core::whitney::*;
use fracbvp_core::geometry::Aabb;
use fracbvp_core::clifford::Multivector;
use num_complex::Complex64;
use std::sync::Arc;
use std::time::Instant;

fn main() {
    let nsamp = 8192usize;
    let depth = 13u32;
    let boundary = BoundaryGeometry::Circle { center: [0.0, 0.0], radius: 1.0 };
    let points = boundary.sample_points(nsamp).unwrap();
    let values: Vec<Multivector> = points.iter().map(|p| {
        let t = Complex64::new(p[0], p[1]);
        let d = 0.5 * t * t;
        Multivector::from_coeffs(1, vec![d.re, d.im]).unwrap()
    }).collect();
    let t0 = Instant::now();
    let sample = Arc::new(CompactSample::new(points, values, 1.0).unwrap());
    eprintln!("sample: {:?}", t0.elapsed());
    let root = Aabb::new(vec![-2.25, -2.25], vec![2.25, 2.25]);
    let t0 = Instant::now();
    let dec = Arc::new(WhitneyDecomposition::build(&sample, &root, depth).unwrap());
    eprintln!("decomposition ({} cubes, {} collar): {:?}", dec.cubes().len(), dec.collar().len(), t0.elapsed());
    let ext = WhitneyExtension::new(sample, dec);
    let t0 = Instant::now();
    let mut s = 0.0;
    for k in 0..10000 {
        let th = k as f64 * 0.001;
        let p = [(1.0 + 0.01 * (k % 7) as f64) * th.cos(), (1.0 + 0.01 * (k % 7) as f64) * th.sin()];
        s += ext.eval(&p).0.norm();
        if let Ok(g) = ext.grad(&p) { s += g[0].norm(); }
    }
    eprintln!("10k eval+grad: {:?} ({s:.2})", t0.elapsed());

    use fracbvp_core::quadrature::*;
    let excl = 2.0 * ext.decomposition().collar_width();
    let params = MeshParams {
        min_cell: (4.5_f64 / 768.0).min(excl / 2.0),
        max_cell: 4.5 / 64.0,
        grading: 0.5,
        exclusion: excl,
        max_cells: 4_000_000,
    };
    eprintln!("params: {params:?}");
    let member = |y: [f64; 2]| y[0].hypot(y[1]) < 1.0;
    let dist = |y: [f64; 2]| (y[0].hypot(y[1]) - 1.0).abs();
    let ext2 = ext.clone();
    let weight = move |y: [f64; 2]| {
        let (_, flag) = ext2.eval(&[y[0], y[1]]);
        if flag != EvalFlag::Covered { return num_complex::Complex64::new(0.0, 0.0); }
        match ext2.grad(&[y[0], y[1]]) {
            Ok(g) => cl1_to_complex(&g[0]) + num_complex::Complex64::new(0.0, 1.0) * cl1_to_complex(&g[1]),
            Err(_) => num_complex::Complex64::new(0.0, 0.0),
        }
    };
    let t0 = Instant::now();
    let mesh = build_weighted_mesh([-2.25, -2.25], 4.5, &member, &dist, &weight, params).unwrap();
    eprintln!("mesh: {} cells, excluded {:.4}, {:?}", mesh.cells.len(), mesh.excluded_area, t0.elapsed());
}
// appended: mesh timing
