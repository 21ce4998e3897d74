use bonnet_core::discrete::{diagnose, optimize_torus, DiscreteNet, OptimizeOptions, OptimizeWeights};
use bonnet_core::lame::LameData;
use bonnet_core::planar::{IsothermicSurface, PlanarFamily, DEFAULT_FRAME_STEPS};
use bonnet_core::spherical::{ReparamCurve, SphericalParams};
use bonnet_core::theta::RhombicLattice;

fn main() {
    let lambda = 0.3205128205;
    let gold3 = SphericalParams { delta: 1.897366596, s1: -3.601381552, s2: 0.5965202011 };
    let lame = LameData::new(RhombicLattice::new(lambda).unwrap()).unwrap();
    let curve = ReparamCurve::build(&lame, &gold3).unwrap();
    let surface =
        IsothermicSurface::new(PlanarFamily::new(lame), Box::new(curve), DEFAULT_FRAME_STEPS)
            .unwrap();

    // conformality check
    for &(u, v) in &[(0.3, 0.2), (1.0, 1.5), (2.0, 3.0), (4.0, 0.7), (5.5, 2.4)] {
        let fu = surface.d_u(u, v).unwrap();
        let fv = surface.d_v(u, v).unwrap();
        println!(
            "u={u:.2} v={v:.2}  |fu|={:.4} |fv|={:.4} ratio={:.4} cos={:.2e}",
            fu.norm(),
            fv.norm(),
            fu.norm() / fv.norm(),
            fu.dot(fv) / (fu.norm() * fv.norm())
        );
    }

    for (n, m) in [(9usize, 12usize), (8, 14), (16, 28), (32, 56)] {
        let net = DiscreteNet::sample_torus(&surface, n, m, 3).unwrap();
        let mut defects: Vec<f64> = net
            .quad_bases()
            .iter()
            .map(|&(i, j)| {
                let [f, f1, f12, f2] = net.quad(i, j);
                (bonnet_core::discrete::cross_ratio(f, f1, f12, f2).unwrap()
                    + bonnet_core::quat::Quat::ONE)
                    .norm()
            })
            .collect();
        defects.sort_by(f64::total_cmp);
        let med = defects[defects.len() / 2];
        println!(
            "{n}x{m}: |CR+1| worst={:.3} p90={:.3} median={:.3} diam={:.3}",
            defects.last().unwrap(),
            defects[(defects.len() as f64 * 0.9) as usize],
            med,
            net.diameter()
        );
    }

    for (n, m) in [(9usize, 12usize), (8, 14)] {
        let seed = DiscreteNet::sample_torus(&surface, n, m, 3).unwrap();
        let t = std::time::Instant::now();
        match optimize_torus(n, m, &seed, 1.0, OptimizeWeights::default(), &OptimizeOptions::default())
        {
            Ok(rep) => {
                println!(
                    "{n}x{m}: converged={} iters={} r0={:.3e} r={:.3e} moved={:.4} ({:.4} of diam) in {:.2?}",
                    rep.converged,
                    rep.iterations,
                    rep.initial_residual,
                    rep.residual,
                    rep.displacement,
                    rep.displacement / seed.diameter(),
                    t.elapsed()
                );
                let d = diagnose(&rep.net, 1.0).unwrap();
                println!("   diagnostics: {d:?}");
            }
            Err(e) => println!("{n}x{m}: error {e}"),
        }
    }
}
