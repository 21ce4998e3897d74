//! The work behind the CLI verbs: solving closing conditions, building
//! surfaces and pairs, sampling meshes, optimizing nets, and assembling the
//! JSON reports.

use serde_json::json;
use std::path::Path;

use bonnet_core::bonnet::BonnetPair;
use bonnet_core::discrete::{
    diagnose, optimize_torus, DiscreteNet, OptimizeOptions, OptimizeWeights,
};
use bonnet_core::mesh::Mesh;
use bonnet_core::periodicity::{
    bpart_integral, monodromy_report, solve_spherical, theta_integral,
};
use bonnet_core::planar::{
    BasisFamily, IsothermicSurface, PlanarFamily, DEFAULT_FRAME_STEPS,
};
use bonnet_core::spherical::ReparamCurve;
use bonnet_core::theta::{RhombicLattice, ThetaKind};
use bonnet_core::{Error, LameData, Result};

use crate::config::{Mode, RunConfig};

/// Largest vertex count accepted by the dense discrete optimizer.
const MAX_OPTIMIZER_VERTICES: usize = 1024;

/// Solves the spherical closing conditions for `config` and reports the
/// solved parameters plus both periodicity integrals as JSON.
pub fn solve_report(config: &RunConfig) -> Result<serde_json::Value> {
    let lattice = RhombicLattice::new(config.lambda)?;
    let omega = lattice.critical_omega()?;
    let lame = LameData::new(lattice)?;
    let target = config.theta_target_angle()?;
    let s1 = config.s1.expect("validated config has s1");
    let params = solve_spherical(&lame, target, s1, None)?;
    let theta = theta_integral(&lame, &params)?;
    let bpart = bpart_integral(&lame, &params)?;
    Ok(json!({
        "lambda": config.lambda,
        "omega": omega,
        "delta": params.delta,
        "s1": params.s1,
        "s2": params.s2,
        "theta_target": target,
        "theta_integral": theta,
        "bpart_integral": bpart,
    }))
}

/// Builds the isothermic surface for `config`, returning it along with the
/// JSON block describing the solved (or given) profile parameters.
pub fn build_surface(config: &RunConfig) -> Result<(IsothermicSurface, serde_json::Value)> {
    let lattice = RhombicLattice::new(config.lambda)?;
    let omega = lattice.critical_omega()?;
    let lame = LameData::new(lattice)?;
    match config.mode {
        Mode::Spherical | Mode::Discrete => {
            let target = config.theta_target_angle()?;
            let s1 = config.s1.expect("validated config has s1");
            let params = solve_spherical(&lame, target, s1, None)?;
            let theta = theta_integral(&lame, &params)?;
            let bpart = bpart_integral(&lame, &params)?;
            let curve = ReparamCurve::build(&lame, &params)?;
            let surface = IsothermicSurface::new(
                PlanarFamily::new(lame),
                Box::new(curve),
                DEFAULT_FRAME_STEPS,
            )?;
            let solved = json!({
                "lambda": config.lambda,
                "omega": omega,
                "delta": params.delta,
                "s1": params.s1,
                "s2": params.s2,
                "theta_target": target,
                "theta_integral": theta,
                "bpart_integral": bpart,
                "r_omega": surface.r_omega(),
            });
            Ok((surface, solved))
        }
        Mode::Fourier => {
            let profile = config.profile.expect("validated config has profile");
            let rep = BasisFamily::two_harmonic(profile.c, profile.a, profile.b);
            let surface = IsothermicSurface::new(
                PlanarFamily::new(lame),
                Box::new(rep),
                DEFAULT_FRAME_STEPS,
            )?;
            let solved = json!({
                "lambda": config.lambda,
                "omega": omega,
                "profile": profile,
                "r_omega": surface.r_omega(),
            });
            Ok((surface, solved))
        }
    }
}

/// Full pipeline: build the surface, check periodicity, assemble the pair,
/// verify its invariants, write the three meshes and `report.json` into
/// `out_dir`, and return the report.
pub fn run_gen(config: &RunConfig, out_dir: &Path, ply: bool) -> Result<serde_json::Value> {
    let (surface, solved) = build_surface(config)?;
    let periodicity = monodromy_report(&surface)?;
    let fold = periodicity.fold.ok_or_else(|| {
        Error::Domain(format!(
            "monodromy angle {:.12} is not a fraction of a full turn; the cylinder does not \
             close into a torus",
            periodicity.theta
        ))
    })?;
    println!(
        "monodromy: theta = {:.12} ({}-fold), axial defect = {:.3e}",
        periodicity.theta, fold, periodicity.axial_defect
    );
    let pair = BonnetPair::assemble(surface, config.epsilon)?;
    let report = pair.verify(config.nu, config.nv, fold)?;
    println!(
        "pair on {}×{} grid: isometry {:.3e}, mean-curvature gap {:.3e}, closure {:.3e}",
        config.nu, config.nv, report.isometry_residual, report.mean_curvature_residual,
        report.closure_base.max(report.closure_plus).max(report.closure_minus)
    );
    std::fs::create_dir_all(out_dir)?;
    let base = Mesh::sample_surface(pair.surface(), config.nu, config.nv, fold)?;
    let (plus, minus) = Mesh::sample_pair(&pair, config.nu, config.nv, fold)?;
    for (mesh, name) in [(&base, "isothermic"), (&plus, "bonnet_plus"), (&minus, "bonnet_minus")] {
        let obj = out_dir.join(format!("{name}.obj"));
        mesh.write_obj(&obj)?;
        println!("wrote {}", obj.display());
        if ply {
            let ply_path = out_dir.join(format!("{name}.ply"));
            mesh.write_ply(&ply_path)?;
            println!("wrote {}", ply_path.display());
        }
    }
    let value = json!({
        "schema": 1,
        "config": config,
        "solved": solved,
        "periodicity": periodicity,
        "pair": report,
    });
    let report_path = out_dir.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&value)? + "\n")?;
    println!("wrote {}", report_path.display());
    Ok(value)
}

/// One verification check line.
struct Check {
    name: &'static str,
    value: f64,
    bound: f64,
    pass: bool,
}

impl Check {
    fn bounded(name: &'static str, value: f64, bound: f64) -> Self {
        Check { name, value, bound, pass: value.abs() <= bound }
    }
}

/// Re-runs the pipeline recorded in a `report.json` and checks the stored
/// and recomputed invariants. Returns an error listing the failed checks if
/// any check fails.
pub fn run_verify(report_path: &Path, nu: Option<usize>, nv: Option<usize>) -> Result<()> {
    let text = std::fs::read_to_string(report_path)?;
    let stored: serde_json::Value = serde_json::from_str(&text)?;
    if stored["schema"] != json!(1) {
        return Err(Error::Domain(format!("unsupported report schema {}", stored["schema"])));
    }
    let mut config: RunConfig = serde_json::from_value(stored["config"].clone())?;
    let grid_overridden = nu.is_some() || nv.is_some();
    config.nu = nu.unwrap_or(config.nu);
    config.nv = nv.unwrap_or(config.nv);
    config.validate()?;

    let (surface, solved) = build_surface(&config)?;
    let periodicity = monodromy_report(&surface)?;
    let fold = periodicity
        .fold
        .ok_or_else(|| Error::Domain("recomputed monodromy does not close".into()))?;
    let pair = BonnetPair::assemble(surface, config.epsilon)?;
    let report = pair.verify(config.nu, config.nv, fold)?;

    let mut checks = Vec::new();
    if matches!(config.mode, Mode::Spherical | Mode::Discrete) {
        let target = config.theta_target_angle()?;
        let theta = solved["theta_integral"].as_f64().unwrap_or(f64::NAN);
        let bpart = solved["bpart_integral"].as_f64().unwrap_or(f64::NAN);
        checks.push(Check::bounded("theta integral matches target", theta - target, 1e-6));
        checks.push(Check::bounded("translational defect", bpart, 1e-6));
    }
    checks.push(Check::bounded("base closure / diameter", report.closure_base, config.tolerances.closure));
    checks.push(Check::bounded("pair closure / diameter", report.closure_plus.max(report.closure_minus), config.tolerances.closure));
    checks.push(Check::bounded("isometry residual", report.isometry_residual, 1e-6));
    checks.push(Check::bounded("conformal residual", report.conformal_residual, 1e-6));
    checks.push(Check::bounded("mean curvature gap", report.mean_curvature_residual, 1e-4));
    checks.push(Check::bounded("Hopf modulus gap", report.hopf_modulus_residual, 1e-4));

    if !grid_overridden {
        let recomputed = serde_json::to_value(&report)?;
        let reproduces = json_close(&recomputed, &stored["pair"], 1e-12);
        checks.push(Check {
            name: "report reproduces stored pair numbers",
            value: if reproduces { 0.0 } else { 1.0 },
            bound: 0.0,
            pass: reproduces,
        });
        let dir = report_path.parent().unwrap_or(Path::new("."));
        let ply = dir.join("bonnet_plus.ply");
        if ply.exists() {
            let (plus, _) = Mesh::sample_pair(&pair, config.nu, config.nv, fold)?;
            let same = Mesh::read_ply(&ply)? == plus;
            checks.push(Check {
                name: "bonnet_plus.ply matches resampled mesh bit-exactly",
                value: if same { 0.0 } else { 1.0 },
                bound: 0.0,
                pass: same,
            });
        }
    }

    let mut failed = 0;
    for check in &checks {
        println!(
            "{}: {} = {:.3e} (bound {:.1e})",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.value,
            check.bound
        );
        failed += usize::from(!check.pass);
    }
    if failed > 0 {
        return Err(Error::Domain(format!("{failed} of {} checks failed", checks.len())));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}

/// Structural float comparison of two JSON trees with relative tolerance.
fn json_close(a: &serde_json::Value, b: &serde_json::Value, tol: f64) -> bool {
    use serde_json::Value::*;
    match (a, b) {
        (Number(x), Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()))
        }
        (Object(x), Object(y)) => {
            x.len() == y.len()
                && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| json_close(v, w, tol)))
        }
        (Array(x), Array(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(v, w)| json_close(v, w, tol))
        }
        _ => a == b,
    }
}

pub struct DiscreteRun {
    pub seed_path: Option<std::path::PathBuf>,
    pub n: usize,
    pub m: usize,
    pub max_iterations: usize,
    pub target: f64,
}

/// Discrete verb: sample (or load) a torus net, optimize it into an exactly
/// isothermic net with closing pair, write nets and a report, and return the
/// report. `config` is only needed when sampling a seed (no `--net` file).
pub fn run_discrete(
    config: Option<&RunConfig>,
    epsilon: f64,
    run: &DiscreteRun,
    out_dir: Option<&Path>,
) -> Result<serde_json::Value> {
    let (seed, source) = match &run.seed_path {
        Some(path) => (DiscreteNet::read_json(path)?, path.display().to_string()),
        None => {
            let config = config.ok_or_else(|| {
                Error::Domain("sampling a seed net needs --imtau/--symmetry/--s1 (or --net FILE)".into())
            })?;
            let (surface, _) = build_surface(config)?;
            let periodicity = monodromy_report(&surface)?;
            let fold = periodicity
                .fold
                .ok_or_else(|| Error::Domain("sampled surface does not close into a torus".into()))?;
            let net = DiscreteNet::sample_torus(&surface, run.n, run.m, fold as usize)?;
            (net, format!("{}×{} sampling of the {fold}-fold torus", run.n, run.m))
        }
    };
    let (n, m) = (seed.n(), seed.m());
    if n * m > MAX_OPTIMIZER_VERTICES {
        return Err(Error::Domain(format!(
            "net has {} vertices; the dense optimizer accepts at most {MAX_OPTIMIZER_VERTICES}",
            n * m
        )));
    }
    println!("optimizing {source} ({n}×{m} vertices, ε = {epsilon})");
    let opts = OptimizeOptions {
        max_iterations: run.max_iterations,
        target: run.target,
        ..OptimizeOptions::default()
    };
    let result = optimize_torus(n, m, &seed, epsilon, OptimizeWeights::default(), &opts)?;
    let diameter = seed.diameter();
    println!(
        "residual {:.3e} → {:.3e} in {} iterations (converged: {})",
        result.initial_residual, result.residual, result.iterations, result.converged
    );
    println!(
        "largest vertex displacement {:.6} = {:.3e} × diameter",
        result.displacement,
        result.displacement / diameter
    );
    let health = diagnose(&result.net, epsilon)?;
    let value = json!({
        "schema": 1,
        "source": source,
        "n": n,
        "m": m,
        "epsilon": epsilon,
        "converged": result.converged,
        "iterations": result.iterations,
        "initial_residual": result.initial_residual,
        "residual": result.residual,
        "seed_diameter": diameter,
        "displacement": result.displacement,
        "displacement_over_diameter": result.displacement / diameter,
        "history": result.history,
        "diagnostics": health,
    });
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        seed.write_json(&dir.join("seed_net.json"))?;
        result.net.write_json(&dir.join("optimized_net.json"))?;
        Mesh::from_net(&seed)?.write_obj(&dir.join("seed_net.obj"))?;
        Mesh::from_net(&result.net)?.write_obj(&dir.join("optimized_net.obj"))?;
        let report_path = dir.join("discrete_report.json");
        std::fs::write(&report_path, serde_json::to_string_pretty(&value)? + "\n")?;
        println!("wrote {}", report_path.display());
    }
    Ok(value)
}

/// Theta verb: evaluate θ_kind and its first two derivatives at z.
pub fn run_theta(lambda: f64, kind: u8, re: f64, im: f64) -> Result<serde_json::Value> {
    let lattice = RhombicLattice::new(lambda)?;
    let kind = ThetaKind::from_index(kind)
        .ok_or_else(|| Error::Domain(format!("theta kind must be 1..=4, got {kind}")))?;
    let z = num_complex::Complex64::new(re, im);
    let value = lattice.theta(kind, z, 0)?;
    let d1 = lattice.theta(kind, z, 1)?;
    let d2 = lattice.theta(kind, z, 2)?;
    let omega = lattice.critical_omega().ok();
    Ok(json!({
        "schema": 1,
        "lambda": lambda,
        "kind": kind.index(),
        "z": [z.re, z.im],
        "value": [value.re, value.im],
        "d1": [d1.re, d1.im],
        "d2": [d2.re, d2.im],
        "critical_omega": omega,
    }))
}
