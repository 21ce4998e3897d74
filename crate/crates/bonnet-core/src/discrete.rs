//! Discrete counterpart of the smooth construction.
//!
//! A quad net `f : Z² → R³` plays the role of a conformally curvature-line
//! parametrized surface when every elementary quad has quaternionic
//! cross-ratio −1 (equivalently: concircular vertices that can be mapped to a
//! conformal square). Such a net has a dual net built by inverting edge
//! vectors in their own length, and net + dual integrate — for every real ε —
//! to a pair of nets whose corresponding edges have exactly equal lengths but
//! whose shapes differ. This module provides those three operations, a
//! diagnostic report for closed nets, and a Levenberg–Marquardt optimizer
//! that takes a coarse almost-closing torus (for instance a sampling of one
//! of the smooth tori) and perturbs its vertices until every quad is exactly
//! isothermic and both integrated nets close around both directions of the
//! torus.
//!
//! Lattice conventions: a net stores `n × m` vertices row-major, `vertex(i, j)`
//! with `i < n` counting steps in the first lattice direction (the planar
//! curves of a sampled torus) and `j < m` in the second (the sweep). Shifts
//! are written like the subscripts they implement: for a quad based at
//! `(i, j)` the corners are `f = f(i,j)`, `f1 = f(i+1,j)`, `f12 = f(i+1,j+1)`,
//! `f2 = f(i,j+1)`, wrapping in directions marked periodic.

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::planar::IsothermicSurface;
use crate::quat::{Quat, Vec3};

/// Relative threshold below which two quad vertices count as coincident.
const COINCIDENCE_TOL: f64 = 1e-13;

/// Quad net in R³ with optional wrap-around in each lattice direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteNet {
    n: usize,
    m: usize,
    periodic: [bool; 2],
    vertices: Vec<Vec3>,
}

/// Serialized form of a net: plain arrays so files are portable.
#[derive(Serialize, Deserialize)]
struct NetFile {
    n: usize,
    m: usize,
    periodic: [bool; 2],
    vertices: Vec<[f64; 3]>,
}

impl DiscreteNet {
    /// Builds a net from row-major vertex data (`vertices[i*m + j]`).
    pub fn new(n: usize, m: usize, periodic: [bool; 2], vertices: Vec<Vec3>) -> Result<Self> {
        if n < 2 || m < 2 {
            return Err(Error::GridMismatch(format!(
                "net needs at least 2×2 vertices, got {n}×{m}"
            )));
        }
        if vertices.len() != n * m {
            return Err(Error::GridMismatch(format!(
                "expected {n}×{m} = {} vertices, got {}",
                n * m,
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("non-finite vertex {p:?}")));
        }
        Ok(DiscreteNet { n, m, periodic, vertices })
    }

    /// Samples a closed torus of the smooth family: `n` points around the
    /// planar curves (period 2π in u) by `m` points along `fold` sweep
    /// periods, periodic in both directions.
    pub fn sample_torus(
        surface: &IsothermicSurface,
        n: usize,
        m: usize,
        fold: usize,
    ) -> Result<Self> {
        if n < 3 || m < 3 {
            return Err(Error::GridMismatch(format!(
                "torus sampling needs at least 3×3 vertices, got {n}×{m}"
            )));
        }
        if fold == 0 {
            return Err(Error::Domain("fold must be at least 1".into()));
        }
        let du = 2.0 * std::f64::consts::PI / n as f64;
        let dv = fold as f64 * surface.v_period() / m as f64;
        let mut vertices = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                vertices.push(surface.position(i as f64 * du, j as f64 * dv)?);
            }
        }
        DiscreteNet::new(n, m, [true, true], vertices)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn periodic(&self) -> [bool; 2] {
        self.periodic
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    /// Vertex at lattice point `(i, j)`, wrapping indices in periodic
    /// directions (so `i == n` is valid on a net periodic in direction 1).
    pub fn at(&self, i: usize, j: usize) -> Vec3 {
        let i = if self.periodic[0] { i % self.n } else { i };
        let j = if self.periodic[1] { j % self.m } else { j };
        self.vertices[i * self.m + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Vec3) {
        self.vertices[i * self.m + j] = p;
    }

    /// Number of edges per lattice line in each direction (`n` resp. `m`
    /// when periodic, one less when open).
    pub fn edge_counts(&self) -> (usize, usize) {
        (
            if self.periodic[0] { self.n } else { self.n - 1 },
            if self.periodic[1] { self.m } else { self.m - 1 },
        )
    }

    /// Base points `(i, j)` of every elementary quad.
    pub fn quad_bases(&self) -> Vec<(usize, usize)> {
        let (e1, e2) = self.edge_counts();
        let mut bases = Vec::with_capacity(e1 * e2);
        for i in 0..e1 {
            for j in 0..e2 {
                bases.push((i, j));
            }
        }
        bases
    }

    /// Corners `[f, f1, f12, f2]` of the quad based at `(i, j)`.
    pub fn quad(&self, i: usize, j: usize) -> [Vec3; 4] {
        [self.at(i, j), self.at(i + 1, j), self.at(i + 1, j + 1), self.at(i, j + 1)]
    }

    /// Diagonal of the axis-aligned bounding box.
    pub fn diameter(&self) -> f64 {
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        (hi - lo).norm()
    }

    /// Largest deviation of any quad's cross-ratio from −1.
    pub fn max_cross_ratio_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (i, j) in self.quad_bases() {
            let [f, f1, f12, f2] = self.quad(i, j);
            let cr = cross_ratio(f, f1, f12, f2)?;
            worst = worst.max((cr + Quat::ONE).norm());
        }
        Ok(worst)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = NetFile {
            n: self.n,
            m: self.m,
            periodic: self.periodic,
            vertices: self.vertices.iter().map(|p| [p.x, p.y, p.z]).collect(),
        };
        serde_json::to_value(file).expect("net serialization cannot fail")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let file: NetFile = serde_json::from_value(value)?;
        let vertices = file.vertices.iter().map(|&[x, y, z]| Vec3::new(x, y, z)).collect();
        DiscreteNet::new(file.n, file.m, file.periodic, vertices)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(serde_json::from_str(&text)?)
    }
}

/// Quaternionic cross-ratio of one quad, taken edge by edge around the cycle
/// `f → f1 → f12 → f2`: `(f1−f)(f12−f1)⁻¹(f12−f2)(f2−f)⁻¹`. The quad belongs
/// to a discrete isothermic net exactly when the value is −1; any value is a
/// similarity invariant (rigid motions and scalings preserve its scalar part
/// and norm, Möbius transformations conjugate it by a unit quaternion).
pub fn cross_ratio(f: Vec3, f1: Vec3, f12: Vec3, f2: Vec3) -> Result<Quat> {
    let edges = [f1 - f, f12 - f1, f12 - f2, f2 - f];
    let scale =
        1.0 + [f, f1, f12, f2].iter().map(|p| p.norm()).fold(0.0_f64, f64::max);
    if let Some(e) = edges.iter().find(|e| e.norm() <= COINCIDENCE_TOL * scale) {
        return Err(Error::Domain(format!(
            "coincident quad vertices (edge length {:.3e})",
            e.norm()
        )));
    }
    Ok(edges[0].as_quat()
        * edges[1].as_quat().inverse()
        * edges[2].as_quat()
        * edges[3].as_quat().inverse())
}

/// Dual edge across the first lattice direction: edge divided by its squared
/// length.
fn dual_step_1(f: Vec3, f1: Vec3) -> Result<Vec3> {
    let e = f1 - f;
    let nn = e.norm_sqr();
    if nn <= COINCIDENCE_TOL * COINCIDENCE_TOL {
        return Err(Error::Domain("degenerate edge in dual construction".into()));
    }
    Ok(e / nn)
}

/// Dual edge across the second lattice direction: the same inversion with the
/// opposite sign, mirroring the sign split of the smooth dual one-form.
fn dual_step_2(f: Vec3, f2: Vec3) -> Result<Vec3> {
    Ok(-(dual_step_1(f, f2)?))
}

/// Integrates a vector-valued edge field over the net's canonical spanning
/// path (first along row `i = 0`, then up each column), returning the primitive
/// and the largest quad-closure defect of the field. For a net periodic in a
/// direction the primitive gains one extra lattice line there, so the loop
/// gap sits between first and last line of the open result.
fn integrate_edge_field(
    net: &DiscreteNet,
    step_1: &dyn Fn(usize, usize) -> Result<Vec3>,
    step_2: &dyn Fn(usize, usize) -> Result<Vec3>,
) -> Result<(DiscreteNet, f64)> {
    let rows = net.n + usize::from(net.periodic[0]);
    let cols = net.m + usize::from(net.periodic[1]);
    let mut vertices = vec![Vec3::default(); rows * cols];
    for i in 1..rows {
        vertices[i * cols] = vertices[(i - 1) * cols] + step_1(i - 1, 0)?;
    }
    for i in 0..rows {
        for j in 1..cols {
            vertices[i * cols + j] = vertices[i * cols + j - 1] + step_2(i, j - 1)?;
        }
    }
    let (e1, e2) = net.edge_counts();
    let mut defect: f64 = 0.0;
    for i in 0..e1 {
        for j in 0..e2 {
            let gap = step_1(i, j)? + step_2(i + 1, j)? - step_1(i, j + 1)? - step_2(i, j)?;
            defect = defect.max(gap.norm());
        }
    }
    let result = DiscreteNet::new(rows, cols, [false, false], vertices)?;
    Ok((result, defect))
}

/// Builds the dual net: edges are the original edges inverted in their own
/// squared length, with opposite signs in the two lattice directions. The
/// edge field closes around quads exactly when the net is isothermic; its
/// largest quad defect is returned, and a defect above `tol` is an error.
pub fn dual_net(net: &DiscreteNet, tol: f64) -> Result<(DiscreteNet, f64)> {
    let step_1 = |i: usize, j: usize| dual_step_1(net.at(i, j), net.at(i + 1, j));
    let step_2 = |i: usize, j: usize| dual_step_2(net.at(i, j), net.at(i, j + 1));
    let (dual, defect) = integrate_edge_field(net, &step_1, &step_2)?;
    if defect > tol {
        return Err(Error::QuadClosure { residual: defect, tol });
    }
    Ok((dual, defect))
}

/// The two integrated nets of a pair, plus the worst quad-compatibility
/// defect of their edge increments.
#[derive(Debug, Clone)]
pub struct DiscretePair {
    pub plus: DiscreteNet,
    pub minus: DiscreteNet,
    pub quad_defect: f64,
}

/// Edge increments of the pair across one edge with endpoints `f`, `f_end`
/// and dual difference `dual_step` along it, for ε and −ε.
fn pair_increments(f: Vec3, dual_step: Vec3, f_end: Vec3, eps: f64) -> (Vec3, Vec3) {
    let d = dual_step.as_quat();
    let plus = (Quat::from_scalar(eps) - f.as_quat()) * d * (Quat::from_scalar(eps) + f_end.as_quat());
    let minus =
        (Quat::from_scalar(-eps) - f.as_quat()) * d * (Quat::from_scalar(-eps) + f_end.as_quat());
    (plus.im_h(), minus.im_h())
}

/// Looks up dual values on the lattice of `net`, accepting either a dual on
/// the same periodic lattice (e.g. a sampled smooth dual torus) or the open
/// one-line-larger net produced by [`dual_net`].
fn dual_accessor<'a>(
    net: &'a DiscreteNet,
    dual: &'a DiscreteNet,
) -> Result<impl Fn(usize, usize) -> Vec3 + 'a> {
    let rows = net.n + usize::from(net.periodic[0]);
    let cols = net.m + usize::from(net.periodic[1]);
    let same_lattice = dual.n == net.n && dual.m == net.m && dual.periodic == net.periodic;
    let integrated = dual.n == rows && dual.m == cols && dual.periodic == [false, false];
    if !same_lattice && !integrated {
        return Err(Error::GridMismatch(format!(
            "dual net is {}×{}, expected {}×{} (same lattice) or {rows}×{cols} (integrated)",
            dual.n, dual.m, net.n, net.m
        )));
    }
    Ok(move |i: usize, j: usize| dual.at(i, j))
}

/// Integrates the discrete pair from a net and a compatible dual net: across
/// each edge the two nets move by the dual step sandwiched between the
/// endpoint values shifted by ∓ε and ±ε, projected back to R³. The increment
/// field closes around quads exactly for isothermic input; `tol` bounds the
/// accepted quad defect.
pub fn discrete_pair(
    net: &DiscreteNet,
    dual: &DiscreteNet,
    eps: f64,
    tol: f64,
) -> Result<DiscretePair> {
    if !eps.is_finite() {
        return Err(Error::Domain(format!("pair parameter must be finite, got {eps}")));
    }
    let dual_at = dual_accessor(net, dual)?;
    let inc = |i: usize, j: usize, i2: usize, j2: usize| {
        pair_increments(net.at(i, j), dual_at(i2, j2) - dual_at(i, j), net.at(i2, j2), eps)
    };
    let plus_1 = |i: usize, j: usize| Ok(inc(i, j, i + 1, j).0);
    let plus_2 = |i: usize, j: usize| Ok(inc(i, j, i, j + 1).0);
    let minus_1 = |i: usize, j: usize| Ok(inc(i, j, i + 1, j).1);
    let minus_2 = |i: usize, j: usize| Ok(inc(i, j, i, j + 1).1);
    let (plus, defect_plus) = integrate_edge_field(net, &plus_1, &plus_2)?;
    let (minus, defect_minus) = integrate_edge_field(net, &minus_1, &minus_2)?;
    let quad_defect = defect_plus.max(defect_minus);
    if quad_defect > tol {
        return Err(Error::QuadClosure { residual: quad_defect, tol });
    }
    Ok(DiscretePair { plus, minus, quad_defect })
}

/// Health report for a closed (doubly periodic) net: how isothermic it is,
/// how well dual and pair edge fields close around quads and around the two
/// torus directions, and how closely the pair nets match in edge length.
#[derive(Debug, Clone, Serialize)]
pub struct NetDiagnostics {
    /// Largest `|cross-ratio − (−1)|` over quads.
    pub cross_ratio_defect: f64,
    /// Largest quad-closure gap of the dual edge field.
    pub dual_quad_defect: f64,
    /// Largest loop gap of the dual edge field around either torus
    /// direction. An isothermic torus generally dualizes to a net with a
    /// translation period, so this need not be small even when every quad
    /// closes exactly.
    pub dual_loop_defect: f64,
    /// Largest quad-compatibility gap of the pair increments (both signs).
    pub pair_quad_defect: f64,
    /// Largest loop gap of the ε-net around either torus direction.
    pub plus_loop_defect: f64,
    /// Largest loop gap of the −ε-net around either torus direction.
    pub minus_loop_defect: f64,
    /// Largest mismatch between corresponding edge lengths of the two pair
    /// nets.
    pub pair_edge_mismatch: f64,
    /// Bounding-box diagonal of the net.
    pub diameter: f64,
}

/// Computes [`NetDiagnostics`] for a torus net at pair parameter `eps`.
pub fn diagnose(net: &DiscreteNet, eps: f64) -> Result<NetDiagnostics> {
    if net.periodic != [true, true] {
        return Err(Error::GridMismatch(
            "diagnostics need a net periodic in both directions".into(),
        ));
    }
    let (n, m) = (net.n, net.m);
    let mut cross_ratio_defect: f64 = 0.0;
    let mut dual_quad_defect: f64 = 0.0;
    let mut pair_quad_defect: f64 = 0.0;
    let mut pair_edge_mismatch: f64 = 0.0;
    let d1 = |i: usize, j: usize| dual_step_1(net.at(i, j), net.at(i + 1, j));
    let d2 = |i: usize, j: usize| dual_step_2(net.at(i, j), net.at(i, j + 1));
    let inc1 = |i: usize, j: usize| -> Result<(Vec3, Vec3)> {
        Ok(pair_increments(net.at(i, j), d1(i, j)?, net.at(i + 1, j), eps))
    };
    let inc2 = |i: usize, j: usize| -> Result<(Vec3, Vec3)> {
        Ok(pair_increments(net.at(i, j), d2(i, j)?, net.at(i, j + 1), eps))
    };
    for (i, j) in net.quad_bases() {
        let [f, f1, f12, f2] = net.quad(i, j);
        cross_ratio_defect =
            cross_ratio_defect.max((cross_ratio(f, f1, f12, f2)? + Quat::ONE).norm());
        let dual_gap = d1(i, j)? + d2(i + 1, j)? - d1(i, j + 1)? - d2(i, j)?;
        dual_quad_defect = dual_quad_defect.max(dual_gap.norm());
        let (p_a, m_a) = inc1(i, j)?;
        let (p_b, m_b) = inc2(i + 1, j)?;
        let (p_c, m_c) = inc1(i, j + 1)?;
        let (p_d, m_d) = inc2(i, j)?;
        pair_quad_defect = pair_quad_defect
            .max((p_a + p_b - p_c - p_d).norm())
            .max((m_a + m_b - m_c - m_d).norm());
        pair_edge_mismatch = pair_edge_mismatch
            .max((p_a.norm() - m_a.norm()).abs())
            .max((p_d.norm() - m_d.norm()).abs());
    }
    let mut dual_loop_defect: f64 = 0.0;
    let mut plus_loop_defect: f64 = 0.0;
    let mut minus_loop_defect: f64 = 0.0;
    for j in 0..m {
        let mut dual_sum = Vec3::default();
        let mut plus_sum = Vec3::default();
        let mut minus_sum = Vec3::default();
        for i in 0..n {
            dual_sum += d1(i, j)?;
            let (p, mi) = inc1(i, j)?;
            plus_sum += p;
            minus_sum += mi;
        }
        dual_loop_defect = dual_loop_defect.max(dual_sum.norm());
        plus_loop_defect = plus_loop_defect.max(plus_sum.norm());
        minus_loop_defect = minus_loop_defect.max(minus_sum.norm());
    }
    for i in 0..n {
        let mut dual_sum = Vec3::default();
        let mut plus_sum = Vec3::default();
        let mut minus_sum = Vec3::default();
        for j in 0..m {
            dual_sum += d2(i, j)?;
            let (p, mi) = inc2(i, j)?;
            plus_sum += p;
            minus_sum += mi;
        }
        dual_loop_defect = dual_loop_defect.max(dual_sum.norm());
        plus_loop_defect = plus_loop_defect.max(plus_sum.norm());
        minus_loop_defect = minus_loop_defect.max(minus_sum.norm());
    }
    Ok(NetDiagnostics {
        cross_ratio_defect,
        dual_quad_defect,
        dual_loop_defect,
        pair_quad_defect,
        plus_loop_defect,
        minus_loop_defect,
        pair_edge_mismatch,
        diameter: net.diameter(),
    })
}

/// Relative weights of the two residual families stacked by the optimizer.
#[derive(Debug, Clone, Copy)]
pub struct OptimizeWeights {
    /// Per-quad cross-ratio residual (four components of cross-ratio + 1).
    pub cross_ratio: f64,
    /// Per-line closure gaps of both pair nets around both torus directions.
    pub pair_closure: f64,
}

impl Default for OptimizeWeights {
    fn default() -> Self {
        OptimizeWeights { cross_ratio: 1.0, pair_closure: 1.0 }
    }
}

/// Termination controls for [`optimize_torus`].
#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    /// Stop once the residual 2-norm drops below this.
    pub target: f64,
    /// Hard cap on accepted Levenberg–Marquardt iterations.
    pub max_iterations: usize,
    /// Relative step for the finite-difference Jacobian.
    pub fd_step: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions { target: 1e-10, max_iterations: 250, fd_step: 1e-6 }
    }
}

/// Result of a torus optimization run.
#[derive(Debug, Clone)]
pub struct OptimizedTorus {
    /// Net after the last accepted step.
    pub net: DiscreteNet,
    /// Whether the residual target was reached.
    pub converged: bool,
    /// Accepted iterations taken.
    pub iterations: usize,
    /// Residual 2-norm of the seed.
    pub initial_residual: f64,
    /// Residual 2-norm of the returned net.
    pub residual: f64,
    /// Largest vertex displacement between seed and result.
    pub displacement: f64,
    /// Residual 2-norm after every accepted step, starting with the seed.
    pub history: Vec<f64>,
}

/// Maps optimization variables to a net. Vertex (0,0) stays pinned at its
/// seed position and vertex (1,0) moves only along its seed edge direction,
/// removing the rigid-motion near-nullspace from the normal equations; every
/// other vertex contributes its three coordinates.
struct TorusVariables {
    seed: DiscreteNet,
    base: Vec3,
    direction: Vec3,
}

impl TorusVariables {
    fn new(seed: &DiscreteNet) -> Result<Self> {
        let base = seed.at(0, 0);
        let edge = seed.at(1, 0) - base;
        let direction = edge.normalized().ok_or_else(|| {
            Error::Domain("seed edge (0,0)→(1,0) is degenerate; cannot pin a direction".into())
        })?;
        Ok(TorusVariables { seed: seed.clone(), base, direction })
    }

    fn dof(&self) -> usize {
        3 * self.seed.n * self.seed.m - 5
    }

    fn pack(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.dof());
        x[0] = (self.seed.at(1, 0) - self.base).dot(self.direction);
        let mut k = 1;
        for (idx, p) in self.seed.vertices().iter().enumerate() {
            if idx == 0 || idx == self.seed.m {
                continue;
            }
            x[k] = p.x;
            x[k + 1] = p.y;
            x[k + 2] = p.z;
            k += 3;
        }
        x
    }

    fn unpack(&self, x: &DVector<f64>) -> Result<DiscreteNet> {
        let (n, m) = (self.seed.n, self.seed.m);
        let mut vertices = vec![Vec3::default(); n * m];
        vertices[0] = self.base;
        vertices[m] = self.base + self.direction * x[0];
        let mut k = 1;
        for (idx, v) in vertices.iter_mut().enumerate() {
            if idx == 0 || idx == m {
                continue;
            }
            *v = Vec3::new(x[k], x[k + 1], x[k + 2]);
            k += 3;
        }
        DiscreteNet::new(n, m, [true, true], vertices)
    }
}

/// Stacked residual vector of the torus objective: for every quad the four
/// components of (cross-ratio + 1), then for both signs of ε the loop gaps of
/// the pair increments around every line of both torus directions.
fn torus_residuals(
    net: &DiscreteNet,
    eps: f64,
    weights: OptimizeWeights,
) -> Result<DVector<f64>> {
    let (n, m) = (net.n, net.m);
    let quad_rows: Vec<[f64; 4]> = net
        .quad_bases()
        .into_par_iter()
        .map(|(i, j)| {
            let [f, f1, f12, f2] = net.quad(i, j);
            let gap = cross_ratio(f, f1, f12, f2)? + Quat::ONE;
            let im = gap.im_h();
            Ok([
                weights.cross_ratio * gap.re(),
                weights.cross_ratio * im.x,
                weights.cross_ratio * im.y,
                weights.cross_ratio * im.z,
            ])
        })
        .collect::<Result<_>>()?;
    let mut r = DVector::zeros(4 * n * m + 6 * (n + m));
    for (q, row) in quad_rows.iter().enumerate() {
        r.rows_mut(4 * q, 4).copy_from_slice(row);
    }
    let mut k = 4 * n * m;
    let mut push = |gap: Vec3, k: &mut usize| {
        r[*k] = weights.pair_closure * gap.x;
        r[*k + 1] = weights.pair_closure * gap.y;
        r[*k + 2] = weights.pair_closure * gap.z;
        *k += 3;
    };
    for j in 0..m {
        let mut plus = Vec3::default();
        let mut minus = Vec3::default();
        for i in 0..n {
            let step = dual_step_1(net.at(i, j), net.at(i + 1, j))?;
            let (p, mi) = pair_increments(net.at(i, j), step, net.at(i + 1, j), eps);
            plus += p;
            minus += mi;
        }
        push(plus, &mut k);
        push(minus, &mut k);
    }
    for i in 0..n {
        let mut plus = Vec3::default();
        let mut minus = Vec3::default();
        for j in 0..m {
            let step = dual_step_2(net.at(i, j), net.at(i, j + 1))?;
            let (p, mi) = pair_increments(net.at(i, j), step, net.at(i, j + 1), eps);
            plus += p;
            minus += mi;
        }
        push(plus, &mut k);
        push(minus, &mut k);
    }
    Ok(r)
}

/// Central finite-difference Jacobian of the residual vector, columns in
/// parallel.
fn torus_jacobian(
    vars: &TorusVariables,
    x: &DVector<f64>,
    eps: f64,
    weights: OptimizeWeights,
    fd_step: f64,
) -> Result<DMatrix<f64>> {
    let cols: Vec<DVector<f64>> = (0..x.len())
        .into_par_iter()
        .map(|k| {
            let h = fd_step * (1.0 + x[k].abs());
            let mut forward = x.clone();
            forward[k] += h;
            let mut backward = x.clone();
            backward[k] -= h;
            let rf = torus_residuals(&vars.unpack(&forward)?, eps, weights)?;
            let rb = torus_residuals(&vars.unpack(&backward)?, eps, weights)?;
            Ok((rf - rb) / (2.0 * h))
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_columns(&cols))
}

/// Perturbs the vertices of a doubly periodic `n × m` seed net until every
/// quad has cross-ratio −1 and both integrated pair nets close around both
/// torus directions, by Levenberg–Marquardt on the stacked residuals with a
/// pinned base vertex and base edge direction. Returns the optimized net
/// with its convergence record; a damping blow-up (no step of any size
/// improves the residual) is reported as a stalled optimization.
pub fn optimize_torus(
    n: usize,
    m: usize,
    seed: &DiscreteNet,
    eps: f64,
    weights: OptimizeWeights,
    opts: &OptimizeOptions,
) -> Result<OptimizedTorus> {
    if seed.n != n || seed.m != m {
        return Err(Error::GridMismatch(format!(
            "seed is {}×{}, expected {n}×{m}",
            seed.n, seed.m
        )));
    }
    if seed.periodic != [true, true] {
        return Err(Error::GridMismatch(
            "torus optimization needs a net periodic in both directions".into(),
        ));
    }
    if n < 3 || m < 3 {
        return Err(Error::GridMismatch(format!("torus needs at least 3×3 vertices, got {n}×{m}")));
    }
    if !eps.is_finite() || eps == 0.0 {
        return Err(Error::Domain(format!("pair parameter must be finite and nonzero, got {eps}")));
    }
    let vars = TorusVariables::new(seed)?;
    let mut x = vars.pack();
    let mut residual = torus_residuals(&vars.unpack(&x)?, eps, weights)?;
    let mut norm = residual.norm();
    let initial_residual = norm;
    let mut history = vec![norm];
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = norm <= opts.target;
    while !converged && iterations < opts.max_iterations {
        let jacobian = torus_jacobian(&vars, &x, eps, weights, opts.fd_step)?;
        let jtj = jacobian.tr_mul(&jacobian);
        let gradient = jacobian.tr_mul(&residual);
        let diag_floor = 1e-12 * jtj.diagonal().amax().max(1e-300);
        loop {
            let mut damped = jtj.clone();
            for k in 0..damped.nrows() {
                damped[(k, k)] += lambda * jtj[(k, k)].max(diag_floor);
            }
            let step = Cholesky::new(damped).map(|ch| ch.solve(&(-&gradient)));
            let accepted = step.and_then(|delta| {
                let trial = &x + &delta;
                let trial_residual =
                    vars.unpack(&trial).and_then(|net| torus_residuals(&net, eps, weights)).ok()?;
                (trial_residual.norm() < norm).then_some((trial, trial_residual))
            });
            match accepted {
                Some((trial, trial_residual)) => {
                    x = trial;
                    residual = trial_residual;
                    norm = residual.norm();
                    history.push(norm);
                    lambda = (lambda / 3.0).max(1e-15);
                    break;
                }
                None => {
                    lambda *= 4.0;
                    if lambda > 1e13 {
                        return Err(Error::StalledOptimization {
                            iters: iterations,
                            residual: norm,
                        });
                    }
                }
            }
        }
        iterations += 1;
        converged = norm <= opts.target;
    }
    let net = vars.unpack(&x)?;
    let displacement = net
        .vertices()
        .iter()
        .zip(seed.vertices())
        .map(|(a, b)| (*a - *b).norm())
        .fold(0.0_f64, f64::max);
    Ok(OptimizedTorus {
        net,
        converged,
        iterations,
        initial_residual,
        residual: norm,
        displacement,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bonnet::BonnetPair;
    use crate::lame::LameData;
    use crate::planar::{PlanarFamily, DEFAULT_FRAME_STEPS};
    use crate::spherical::{ReparamCurve, SphericalParams};
    use crate::theta::RhombicLattice;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::OnceLock;

    const LAMBDA: f64 = 0.3205128205;
    const GOLD3: SphericalParams =
        SphericalParams { delta: 1.897366596, s1: -3.601381552, s2: 0.5965202011 };

    fn golden_surface() -> &'static IsothermicSurface {
        static CELL: OnceLock<IsothermicSurface> = OnceLock::new();
        CELL.get_or_init(|| {
            let lame = LameData::new(RhombicLattice::new(LAMBDA).unwrap()).unwrap();
            let curve = ReparamCurve::build(&lame, &GOLD3).unwrap();
            IsothermicSurface::new(PlanarFamily::new(lame), Box::new(curve), DEFAULT_FRAME_STEPS)
                .unwrap()
        })
    }

    fn golden_pair() -> &'static BonnetPair {
        static CELL: OnceLock<BonnetPair> = OnceLock::new();
        CELL.get_or_init(|| {
            let lame = LameData::new(RhombicLattice::new(LAMBDA).unwrap()).unwrap();
            let curve = ReparamCurve::build(&lame, &GOLD3).unwrap();
            let surface =
                IsothermicSurface::new(PlanarFamily::new(lame), Box::new(curve), DEFAULT_FRAME_STEPS)
                    .unwrap();
            BonnetPair::assemble(surface, 1.0).unwrap()
        })
    }

    /// Unit square in a tilted plane: the model isothermic quad.
    fn tilted_square() -> [Vec3; 4] {
        let e1 = Vec3::new(0.6, 0.8, 0.0);
        let e2 = Vec3::new(-0.64, 0.48, 0.6);
        let shift = Vec3::new(0.3, -0.2, 0.5);
        [shift, shift + e1, shift + e1 + e2, shift + e2]
    }

    /// Planar quad with complex cross-ratio −1, in a tilted plane, from three
    /// random corners (the fourth is determined linearly).
    fn random_isothermic_quad(rng: &mut ChaCha8Rng) -> [Vec3; 4] {
        loop {
            let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let (z, z1, z2) = (c(), c(), c());
            let a = z1 - z;
            let d = z2 - z;
            if a.norm() < 0.3 || d.norm() < 0.3 || (a + d).norm() < 0.3 {
                continue;
            }
            let z12 = (d * z1 + a * z2) / (a + d);
            if (z12 - z1).norm() < 0.15 || (z12 - z2).norm() < 0.15 {
                continue;
            }
            let e1 = Vec3::new(0.48, 0.6, 0.64).normalized().unwrap();
            let raw = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let ortho = raw - e1 * raw.dot(e1);
            let Some(e2) = ortho.normalized() else { continue };
            let shift = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let embed =
                |w: Complex64| shift + e1 * w.re + e2 * w.im;
            return [embed(z), embed(z1), embed(z12), embed(z2)];
        }
    }

    /// Exactly isothermic open net: fractional-linear image of a square grid,
    /// embedded in a tilted plane. Complex fractional-linear maps preserve
    /// the cross-ratio, so every quad keeps the value −1 of the unit square.
    fn moebius_net(n: usize, m: usize) -> DiscreteNet {
        let map = |w: Complex64| {
            (w + Complex64::new(0.4, -0.3)) / (w * Complex64::new(0.06, 0.04) + Complex64::new(1.4, 0.2))
        };
        let e1 = Vec3::new(0.6, 0.8, 0.0);
        let e2 = Vec3::new(-0.64, 0.48, 0.6);
        let shift = Vec3::new(0.1, 0.2, -0.3);
        let mut vertices = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                let z = map(Complex64::new(i as f64, j as f64));
                vertices.push(shift + e1 * z.re + e2 * z.im);
            }
        }
        DiscreteNet::new(n, m, [false, false], vertices).unwrap()
    }

    /// Sphere inversion through the origin.
    fn invert(p: Vec3) -> Vec3 {
        p / p.norm_sqr()
    }

    #[test]
    fn unit_square_has_cross_ratio_minus_one() {
        let [f, f1, f12, f2] = tilted_square();
        let cr = cross_ratio(f, f1, f12, f2).unwrap();
        assert!((cr + Quat::ONE).norm() < 1e-14, "square cross-ratio {cr:?}");
        let scaled = cross_ratio(f * 3.7, f1 * 3.7, f12 * 3.7, f2 * 3.7).unwrap();
        assert!((scaled + Quat::ONE).norm() < 1e-14);
    }

    #[test]
    fn generic_quad_is_not_isothermic() {
        let cr = cross_ratio(
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.1, -0.2),
            Vec3::new(1.3, 1.2, 0.4),
            Vec3::new(-0.2, 0.9, 0.1),
        )
        .unwrap();
        assert!((cr + Quat::ONE).norm() > 0.1, "generic quad scored {cr:?}");
    }

    #[test]
    fn coincident_vertices_are_rejected() {
        let p = Vec3::new(0.3, -0.1, 0.2);
        let err = cross_ratio(p, p, Vec3::new(1.0, 1.0, 0.0), Vec3::new(0.0, 1.0, 0.3));
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn random_isothermic_quads_score_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let [f, f1, f12, f2] = random_isothermic_quad(&mut rng);
            let cr = cross_ratio(f, f1, f12, f2).unwrap();
            assert!((cr + Quat::ONE).norm() < 1e-11, "cross-ratio {cr:?}");
        }
    }

    #[test]
    fn cross_ratio_survives_inversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let away = Vec3::new(2.5, 1.5, -2.0);
        for _ in 0..100 {
            let quad = random_isothermic_quad(&mut rng).map(|p| p + away);
            let inverted = quad.map(invert);
            let cr = cross_ratio(inverted[0], inverted[1], inverted[2], inverted[3]).unwrap();
            assert!(
                (cr + Quat::ONE).norm() < 1e-9,
                "inverted isothermic quad scored {cr:?}"
            );
        }
    }

    proptest! {
        /// The scalar part and norm of the cross-ratio are invariant under
        /// inversion (and rigid motions), being similarity data of the
        /// conjugacy class.
        #[test]
        fn inversion_preserves_the_cross_ratio_class(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut p = || Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(2.0..4.0),
            );
            let quad = [p(), p(), p(), p()];
            let distinct = quad
                .iter()
                .enumerate()
                .all(|(i, a)| quad.iter().skip(i + 1).all(|b| (*a - *b).norm() > 0.05));
            prop_assume!(distinct);
            let before = cross_ratio(quad[0], quad[1], quad[2], quad[3]).unwrap();
            let inv = quad.map(invert);
            let after = cross_ratio(inv[0], inv[1], inv[2], inv[3]).unwrap();
            prop_assert!((before.re() - after.re()).abs() <= 1e-7 * (1.0 + before.norm()));
            prop_assert!((before.norm() - after.norm()).abs() <= 1e-7 * (1.0 + before.norm()));
        }
    }

    #[test]
    fn dual_edges_close_around_isothermic_quads() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..200 {
            let [f, f1, f12, f2] = random_isothermic_quad(&mut rng);
            let gap = dual_step_1(f, f1).unwrap() + dual_step_2(f1, f12).unwrap()
                - dual_step_1(f2, f12).unwrap()
                - dual_step_2(f, f2).unwrap();
            assert!(gap.norm() < 1e-12, "dual quad gap {:.3e}", gap.norm());
        }
    }

    #[test]
    fn dual_edge_lengths_are_reciprocal() {
        let f = Vec3::new(0.2, -0.4, 1.0);
        let f1 = Vec3::new(1.1, 0.3, 0.6);
        let edge = (f1 - f).norm();
        assert_abs_diff(dual_step_1(f, f1).unwrap().norm(), 1.0 / edge, 1e-14);
        assert_abs_diff(dual_step_2(f, f1).unwrap().norm(), 1.0 / edge, 1e-14);
    }

    fn assert_abs_diff(a: f64, b: f64, eps: f64) {
        assert!((a - b).abs() <= eps, "{a} vs {b}");
    }

    #[test]
    fn dual_of_dual_restores_the_net_up_to_translation() {
        let net = moebius_net(5, 6);
        let (dual, defect) = dual_net(&net, 1e-10).unwrap();
        assert!(defect < 1e-12, "dual quad defect {defect:.3e}");
        let (bidual, _) = dual_net(&dual, 1e-10).unwrap();
        let offset = bidual.at(0, 0) - net.at(0, 0);
        for i in 0..5 {
            for j in 0..6 {
                let gap = (bidual.at(i, j) - net.at(i, j) - offset).norm();
                assert!(gap < 1e-12, "dual involution broke at ({i},{j}): {gap:.3e}");
            }
        }
    }

    #[test]
    fn dual_net_rejects_non_isothermic_input() {
        let mut net = moebius_net(4, 4);
        let p = net.at(1, 1);
        net.set(1, 1, p + Vec3::new(0.05, -0.02, 0.04));
        let err = dual_net(&net, 1e-10);
        assert!(matches!(err, Err(Error::QuadClosure { .. })), "got {err:?}");
    }

    #[test]
    fn pair_increments_close_around_random_isothermic_quads() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for trial in 0..200 {
            let [f, f1, f12, f2] = random_isothermic_quad(&mut rng);
            let eps = rng.random_range(0.2..2.0);
            // Dual corner values relative to the base corner.
            let s = Vec3::default();
            let s1 = s + dual_step_1(f, f1).unwrap();
            let s2 = s + dual_step_2(f, f2).unwrap();
            let s12 = s1 + dual_step_2(f1, f12).unwrap();
            let (p_a, m_a) = pair_increments(f, s1 - s, f1, eps);
            let (p_b, m_b) = pair_increments(f1, s12 - s1, f12, eps);
            let (p_c, m_c) = pair_increments(f2, s12 - s2, f12, eps);
            let (p_d, m_d) = pair_increments(f, s2 - s, f2, eps);
            let plus_gap = (p_a + p_b - p_c - p_d).norm();
            let minus_gap = (m_a + m_b - m_c - m_d).norm();
            assert!(plus_gap < 1e-10, "trial {trial}: quad gap {plus_gap:.3e}");
            assert!(minus_gap < 1e-10, "trial {trial}: quad gap {minus_gap:.3e}");
        }
    }

    #[test]
    fn pair_nets_swap_under_sign_change() {
        let net = moebius_net(5, 5);
        let (dual, _) = dual_net(&net, 1e-10).unwrap();
        let pair = discrete_pair(&net, &dual, 0.8, 1e-9).unwrap();
        let swapped = discrete_pair(&net, &dual, -0.8, 1e-9).unwrap();
        assert_eq!(pair.plus, swapped.minus);
        assert_eq!(pair.minus, swapped.plus);
    }

    #[test]
    fn pair_nets_have_matching_edge_lengths() {
        let net = moebius_net(6, 5);
        let (dual, _) = dual_net(&net, 1e-10).unwrap();
        let pair = discrete_pair(&net, &dual, 1.3, 1e-9).unwrap();
        for i in 0..6 {
            for j in 0..4 {
                let plus = (pair.plus.at(i, j + 1) - pair.plus.at(i, j)).norm();
                let minus = (pair.minus.at(i, j + 1) - pair.minus.at(i, j)).norm();
                assert_abs_diff(plus, minus, 1e-12 * (1.0 + plus));
            }
        }
        for i in 0..5 {
            for j in 0..5 {
                let plus = (pair.plus.at(i + 1, j) - pair.plus.at(i, j)).norm();
                let minus = (pair.minus.at(i + 1, j) - pair.minus.at(i, j)).norm();
                assert_abs_diff(plus, minus, 1e-12 * (1.0 + plus));
            }
        }
    }

    /// Sampled smooth dual torus: the dual of the closed surface is itself
    /// closed, so it lives on the same periodic lattice as the sampled net.
    fn sampled_dual(n: usize, m: usize, fold: usize) -> DiscreteNet {
        let surface = golden_surface();
        let du = 2.0 * std::f64::consts::PI / n as f64;
        let dv = fold as f64 * surface.v_period() / m as f64;
        let mut vertices = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                let u = i as f64 * du;
                let v = j as f64 * dv;
                vertices.push(-surface.position(std::f64::consts::PI - u, v).unwrap());
            }
        }
        DiscreteNet::new(n, m, [true, true], vertices).unwrap()
    }

    /// Cross-ratios of a sampled conformal curvature-line net approach
    /// −(du/dv)² at second order in the mesh, so on a modulus-matched grid
    /// they approach −1. The constant is large — the worst quads sit at the
    /// tight bends of the lobes, which coarse grids under-resolve — so only
    /// the decay rate and a loose absolute bound are asserted.
    #[test]
    fn sampled_torus_cross_ratios_follow_the_grid_ratio() {
        let surface = golden_surface();
        let mut defects = Vec::new();
        for (n, m) in [(16usize, 28usize), (32, 56)] {
            let net = DiscreteNet::sample_torus(surface, n, m, 3).unwrap();
            let du = 2.0 * std::f64::consts::PI / n as f64;
            let dv = 3.0 * surface.v_period() / m as f64;
            let ratio = (du / dv).powi(2);
            let mut worst: f64 = 0.0;
            for (i, j) in net.quad_bases() {
                let [f, f1, f12, f2] = net.quad(i, j);
                let cr = cross_ratio(f, f1, f12, f2).unwrap();
                worst = worst.max((cr + Quat::from_scalar(ratio)).norm());
            }
            defects.push(worst);
        }
        assert!(
            defects[0] > 3.0 * defects[1],
            "expected ~4× decay of the cross-ratio defect, got {defects:?}"
        );
        assert!(defects[1] < 0.5, "fine-grid cross-ratio defect {:.3e}", defects[1]);
    }

    /// The discrete pair built from the sampled smooth net and its sampled
    /// smooth dual reproduces the smooth pair at the vertices, at second
    /// order in the mesh.
    #[test]
    fn discrete_pair_converges_to_the_smooth_pair() {
        let pair = golden_pair();
        let surface = golden_surface();
        let mut errors = Vec::new();
        for (n, m) in [(12usize, 21usize), (24, 42)] {
            let net = DiscreteNet::sample_torus(surface, n, m, 3).unwrap();
            let dual = sampled_dual(n, m, 3);
            let discrete = discrete_pair(&net, &dual, 1.0, 1.0).unwrap();
            let du = 2.0 * std::f64::consts::PI / n as f64;
            let dv = 3.0 * surface.v_period() / m as f64;
            let (base_plus, base_minus) = pair.positions(0.0, 0.0).unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..=n {
                for j in 0..=m {
                    let (smooth_plus, smooth_minus) =
                        pair.positions(i as f64 * du, j as f64 * dv).unwrap();
                    let gap_plus =
                        (discrete.plus.at(i, j) - (smooth_plus - base_plus)).norm();
                    let gap_minus =
                        (discrete.minus.at(i, j) - (smooth_minus - base_minus)).norm();
                    worst = worst.max(gap_plus).max(gap_minus);
                }
            }
            errors.push(worst);
        }
        let diameter = golden_pair().verify(8, 8, 3).unwrap().diameter;
        assert!(
            errors[0] > 3.0 * errors[1],
            "expected ~4× decay of the vertex error, got {errors:?}"
        );
        assert!(
            errors[1] < 0.05 * diameter,
            "fine-grid pair error {:.3e} too large for diameter {diameter:.3}",
            errors[1]
        );
    }

    #[test]
    fn json_round_trip_preserves_the_net() {
        let net = moebius_net(4, 7);
        let restored = DiscreteNet::from_json(net.to_json()).unwrap();
        assert_eq!(net, restored);
        let bad = serde_json::json!({"n": 4, "m": 7, "periodic": [false, false], "vertices": [[0.0, 0.0, 0.0]]});
        assert!(matches!(DiscreteNet::from_json(bad), Err(Error::GridMismatch(_))));
    }

    /// An 8×14 sampling matches the conformal modulus of the three-fold
    /// torus (2π/8 ≈ three periods / 14), the best case for seeding. The
    /// optimizer reaches an exact solution quickly; the solution is not
    /// pointwise close to the seed because the sampling under-resolves the
    /// lobe bends, so the displacement bound is a loose sanity check.
    #[test]
    fn optimizer_closes_the_sampled_golden_torus() {
        let seed = DiscreteNet::sample_torus(golden_surface(), 8, 14, 3).unwrap();
        let report = optimize_torus(
            8,
            14,
            &seed,
            1.0,
            OptimizeWeights::default(),
            &OptimizeOptions::default(),
        )
        .unwrap();
        assert!(report.converged, "stopped at residual {:.3e}", report.residual);
        assert!(report.residual < 1e-8, "residual {:.3e}", report.residual);
        let diameter = seed.diameter();
        assert!(
            report.displacement < 0.5 * diameter,
            "vertices moved {:.3e} (diameter {diameter:.3})",
            report.displacement
        );
        let health = diagnose(&report.net, 1.0).unwrap();
        assert!(health.cross_ratio_defect < 1e-8, "{health:?}");
        assert!(health.dual_quad_defect < 1e-8, "{health:?}");
        assert!(health.pair_quad_defect < 1e-8, "{health:?}");
        assert!(health.plus_loop_defect < 1e-8, "{health:?}");
        assert!(health.minus_loop_defect < 1e-8, "{health:?}");
        assert!(health.pair_edge_mismatch < 1e-10, "{health:?}");
    }

    #[test]
    fn optimizer_is_a_fixed_point_on_an_optimized_net() {
        let seed = DiscreteNet::sample_torus(golden_surface(), 8, 14, 3).unwrap();
        let first = optimize_torus(
            8,
            14,
            &seed,
            1.0,
            OptimizeWeights::default(),
            &OptimizeOptions::default(),
        )
        .unwrap();
        let second = optimize_torus(
            8,
            14,
            &first.net,
            1.0,
            OptimizeWeights::default(),
            &OptimizeOptions::default(),
        )
        .unwrap();
        assert!(second.converged);
        assert_eq!(second.iterations, 0, "already optimal input should take no steps");
        assert_eq!(second.displacement, 0.0);
    }

    #[test]
    fn optimizer_history_is_monotone_from_a_perturbed_seed() {
        let mut seed = DiscreteNet::sample_torus(golden_surface(), 5, 7, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let scale = 0.01 * seed.diameter();
        for i in 0..5 {
            for j in 0..7 {
                let jitter = Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ) * scale;
                let p = seed.at(i, j);
                seed.set(i, j, p + jitter);
            }
        }
        let opts = OptimizeOptions { max_iterations: 25, ..OptimizeOptions::default() };
        let report =
            optimize_torus(5, 7, &seed, 1.0, OptimizeWeights::default(), &opts).unwrap();
        assert!(report.history.len() >= 2, "optimizer made no progress");
        for w in report.history.windows(2) {
            assert!(w[1] < w[0], "history not monotone: {:?}", report.history);
        }
    }

    #[test]
    fn optimizer_rejects_mismatched_dimensions() {
        let seed = DiscreteNet::sample_torus(golden_surface(), 5, 7, 3).unwrap();
        let err = optimize_torus(
            6,
            7,
            &seed,
            1.0,
            OptimizeWeights::default(),
            &OptimizeOptions::default(),
        );
        assert!(matches!(err, Err(Error::GridMismatch(_))));
    }
}
