//! Grid meshes sampled from the smooth surfaces and discrete nets, with
//! Wavefront OBJ and binary little-endian PLY export.
//!
//! A mesh is a structured `nu × nv` vertex grid with quad faces, optionally
//! stitched closed in either grid direction, plus named per-vertex scalar
//! fields (conformal factor, mean curvature). OBJ output stores scalars as
//! comment blocks; PLY output stores them as extra `double` vertex
//! properties, and the PLY reader restores a written mesh bit-exactly.

use rayon::prelude::*;
use std::io::Write as IoWrite;
use std::path::Path;

use crate::bonnet::BonnetPair;
use crate::discrete::DiscreteNet;
use crate::error::{Error, Result};
use crate::planar::IsothermicSurface;
use crate::quat::Vec3;

/// Step for the five-point stencils turning analytic tangents into curvature.
const CURVATURE_STEP: f64 = 1e-3;

/// Fourth-order central derivative of a vector-valued function at 0.
fn central4(f: impl Fn(f64) -> Result<Vec3>, h: f64) -> Result<Vec3> {
    Ok((f(-2.0 * h)? - f(-h)? * 8.0 + f(h)? * 8.0 - f(2.0 * h)?) / (12.0 * h))
}

/// Structured quad mesh: `nu × nv` vertices row-major (`index = i*nv + j`),
/// with faces wrapping around directions marked closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nu: usize,
    nv: usize,
    closed: [bool; 2],
    vertices: Vec<Vec3>,
    scalars: Vec<(String, Vec<f64>)>,
}

impl Mesh {
    pub fn from_grid(
        nu: usize,
        nv: usize,
        closed: [bool; 2],
        vertices: Vec<Vec3>,
        scalars: Vec<(String, Vec<f64>)>,
    ) -> Result<Self> {
        if nu < 2 || nv < 2 {
            return Err(Error::GridMismatch(format!("mesh needs at least 2×2 vertices, got {nu}×{nv}")));
        }
        if vertices.len() != nu * nv {
            return Err(Error::GridMismatch(format!(
                "expected {nu}×{nv} = {} vertices, got {}",
                nu * nv,
                vertices.len()
            )));
        }
        for (name, values) in &scalars {
            if values.len() != vertices.len() {
                return Err(Error::GridMismatch(format!(
                    "scalar field {name} has {} values for {} vertices",
                    values.len(),
                    vertices.len()
                )));
            }
        }
        Ok(Mesh { nu, nv, closed, vertices, scalars })
    }

    /// Samples the isothermic surface over `fold` sweep periods on an
    /// `nu × nv` grid closed in both directions, with per-vertex conformal
    /// factor and mean curvature.
    pub fn sample_surface(
        surface: &IsothermicSurface,
        nu: usize,
        nv: usize,
        fold: u32,
    ) -> Result<Self> {
        let du = 2.0 * std::f64::consts::PI / nu as f64;
        let dv = fold as f64 * surface.v_period() / nv as f64;
        let rows: Vec<Vec<(Vec3, f64, f64)>> = (0..nu)
            .into_par_iter()
            .map(|i| {
                let u = i as f64 * du;
                (0..nv)
                    .map(|j| {
                        let v = j as f64 * dv;
                        let p = surface.position(u, v)?;
                        let factor = surface.metric(u, v)?;
                        let n = surface.normal(u, v)?;
                        let fuu = central4(|t| surface.d_u(u + t, v), CURVATURE_STEP)?;
                        let fvv = central4(|t| surface.d_v(u, v + t), CURVATURE_STEP)?;
                        let h = (n.dot(fuu) + n.dot(fvv)) / (2.0 * factor * factor);
                        Ok((p, factor, h))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let flat: Vec<(Vec3, f64, f64)> = rows.into_iter().flatten().collect();
        Mesh::from_grid(
            nu,
            nv,
            [true, true],
            flat.iter().map(|r| r.0).collect(),
            vec![
                ("conformal_factor".into(), flat.iter().map(|r| r.1).collect()),
                ("mean_curvature".into(), flat.iter().map(|r| r.2).collect()),
            ],
        )
    }

    /// Samples both mates of a Bonnet pair over `fold` sweep periods,
    /// returning the ε-mesh and the −ε-mesh with their common conformal
    /// factor and their respective mean curvatures.
    pub fn sample_pair(pair: &BonnetPair, nu: usize, nv: usize, fold: u32) -> Result<(Self, Self)> {
        let surface = pair.surface();
        let du = 2.0 * std::f64::consts::PI / nu as f64;
        let dv = fold as f64 * surface.v_period() / nv as f64;
        type Row = Vec<(Vec3, Vec3, f64, f64, f64)>;
        let rows: Vec<Row> = (0..nu)
            .into_par_iter()
            .map(|i| {
                let u = i as f64 * du;
                (0..nv)
                    .map(|j| {
                        let v = j as f64 * dv;
                        let (p_plus, p_minus) = pair.positions(u, v)?;
                        let factor = pair.pair_metric(u, v)?;
                        let (n_plus, n_minus) = pair.normals(u, v)?;
                        let duu = central4_pair(|t| pair.derivative_u(u + t, v), CURVATURE_STEP)?;
                        let dvv = central4_pair(|t| pair.derivative_v(u, v + t), CURVATURE_STEP)?;
                        let ee = 2.0 * factor * factor;
                        let h_plus = (n_plus.dot(duu.0) + n_plus.dot(dvv.0)) / ee;
                        let h_minus = (n_minus.dot(duu.1) + n_minus.dot(dvv.1)) / ee;
                        Ok((p_plus, p_minus, factor, h_plus, h_minus))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let flat: Vec<(Vec3, Vec3, f64, f64, f64)> = rows.into_iter().flatten().collect();
        let factors: Vec<f64> = flat.iter().map(|r| r.2).collect();
        let plus = Mesh::from_grid(
            nu,
            nv,
            [true, true],
            flat.iter().map(|r| r.0).collect(),
            vec![
                ("conformal_factor".into(), factors.clone()),
                ("mean_curvature".into(), flat.iter().map(|r| r.3).collect()),
            ],
        )?;
        let minus = Mesh::from_grid(
            nu,
            nv,
            [true, true],
            flat.iter().map(|r| r.1).collect(),
            vec![
                ("conformal_factor".into(), factors),
                ("mean_curvature".into(), flat.iter().map(|r| r.4).collect()),
            ],
        )?;
        Ok((plus, minus))
    }

    /// Wraps a discrete net as a mesh (no scalar fields).
    pub fn from_net(net: &DiscreteNet) -> Result<Self> {
        Mesh::from_grid(net.n(), net.m(), net.periodic(), net.vertices().to_vec(), Vec::new())
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn closed(&self) -> [bool; 2] {
        self.closed
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn scalars(&self) -> &[(String, Vec<f64>)] {
        &self.scalars
    }

    /// Quad faces as 0-based vertex indices, wrapping in closed directions.
    pub fn faces(&self) -> Vec<[u32; 4]> {
        let rows = if self.closed[0] { self.nu } else { self.nu - 1 };
        let cols = if self.closed[1] { self.nv } else { self.nv - 1 };
        let idx = |i: usize, j: usize| ((i % self.nu) * self.nv + (j % self.nv)) as u32;
        let mut faces = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        faces
    }

    /// Writes the mesh as Wavefront OBJ: `v` records with 17 significant
    /// digits, quad `f` records with 1-based indices, scalar fields as
    /// comment blocks (one value per vertex, in vertex order).
    pub fn write_obj(&self, path: &Path) -> Result<()> {
        let mut text = String::new();
        text.push_str(&format!(
            "# {}x{} grid, closed [{}, {}]\n",
            self.nu, self.nv, self.closed[0], self.closed[1]
        ));
        for p in &self.vertices {
            text.push_str(&format!("v {:.16e} {:.16e} {:.16e}\n", p.x, p.y, p.z));
        }
        for (name, values) in &self.scalars {
            text.push_str(&format!("# scalar {name}\n"));
            for value in values {
                text.push_str(&format!("# {value:.16e}\n"));
            }
        }
        for [a, b, c, d] in self.faces() {
            text.push_str(&format!("f {} {} {} {}\n", a + 1, b + 1, c + 1, d + 1));
        }
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Writes the mesh as binary little-endian PLY. Vertex coordinates and
    /// scalar fields are `double` properties, so a read-back restores them
    /// bit-exactly; the grid shape travels in a header comment.
    pub fn write_ply(&self, path: &Path) -> Result<()> {
        let mut header = String::from("ply\nformat binary_little_endian 1.0\n");
        header.push_str(&format!(
            "comment grid {} {} closed {} {}\n",
            self.nu, self.nv, u8::from(self.closed[0]), u8::from(self.closed[1])
        ));
        header.push_str(&format!("element vertex {}\n", self.vertices.len()));
        header.push_str("property double x\nproperty double y\nproperty double z\n");
        for (name, _) in &self.scalars {
            header.push_str(&format!("property double {name}\n"));
        }
        let faces = self.faces();
        header.push_str(&format!("element face {}\n", faces.len()));
        header.push_str("property list uchar uint vertex_indices\nend_header\n");

        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        out.write_all(header.as_bytes())?;
        for (k, p) in self.vertices.iter().enumerate() {
            for coord in [p.x, p.y, p.z] {
                out.write_all(&coord.to_le_bytes())?;
            }
            for (_, values) in &self.scalars {
                out.write_all(&values[k].to_le_bytes())?;
            }
        }
        for face in faces {
            out.write_all(&[4u8])?;
            for index in face {
                out.write_all(&index.to_le_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Reads back a PLY file written by [`Mesh::write_ply`].
    pub fn read_ply(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        let header_end = bytes
            .windows(11)
            .position(|w| w == b"end_header\n")
            .ok_or_else(|| Error::Domain("ply: missing end_header".into()))?
            + 11;
        let header = std::str::from_utf8(&bytes[..header_end])
            .map_err(|_| Error::Domain("ply: header is not UTF-8".into()))?;
        let mut lines = header.lines();
        if lines.next() != Some("ply") {
            return Err(Error::Domain("ply: missing magic line".into()));
        }
        let mut grid: Option<(usize, usize, [bool; 2])> = None;
        let mut vertex_count = 0usize;
        let mut face_count = 0usize;
        let mut scalar_names: Vec<String> = Vec::new();
        let mut in_vertex_element = false;
        for line in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["format", "binary_little_endian", "1.0"] => {}
                ["format", ..] => {
                    return Err(Error::Domain(format!("ply: unsupported format line '{line}'")))
                }
                ["comment", "grid", nu, nv, "closed", c0, c1] => {
                    let parse = |s: &str| {
                        s.parse::<usize>()
                            .map_err(|_| Error::Domain(format!("ply: bad grid comment '{line}'")))
                    };
                    grid = Some((parse(nu)?, parse(nv)?, [parse(c0)? != 0, parse(c1)? != 0]));
                }
                ["comment", ..] => {}
                ["element", "vertex", count] => {
                    vertex_count = count
                        .parse()
                        .map_err(|_| Error::Domain("ply: bad vertex count".into()))?;
                    in_vertex_element = true;
                }
                ["element", "face", count] => {
                    face_count =
                        count.parse().map_err(|_| Error::Domain("ply: bad face count".into()))?;
                    in_vertex_element = false;
                }
                ["property", "double", name] if in_vertex_element => {
                    if !matches!(*name, "x" | "y" | "z") {
                        scalar_names.push((*name).to_string());
                    }
                }
                ["property", "list", "uchar", "uint", "vertex_indices"] => {}
                ["end_header"] => break,
                _ => return Err(Error::Domain(format!("ply: unsupported header line '{line}'"))),
            }
        }
        let (nu, nv, closed) =
            grid.ok_or_else(|| Error::Domain("ply: missing grid comment".into()))?;
        let stride = 8 * (3 + scalar_names.len());
        let body = &bytes[header_end..];
        if body.len() < vertex_count * stride {
            return Err(Error::Domain("ply: truncated vertex data".into()));
        }
        let mut vertices = Vec::with_capacity(vertex_count);
        let mut scalars: Vec<(String, Vec<f64>)> = scalar_names
            .into_iter()
            .map(|name| (name, Vec::with_capacity(vertex_count)))
            .collect();
        let read_f64 = |chunk: &[u8]| f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        for k in 0..vertex_count {
            let row = &body[k * stride..(k + 1) * stride];
            vertices.push(Vec3::new(
                read_f64(&row[0..8]),
                read_f64(&row[8..16]),
                read_f64(&row[16..24]),
            ));
            for (s, (_, values)) in scalars.iter_mut().enumerate() {
                values.push(read_f64(&row[24 + 8 * s..32 + 8 * s]));
            }
        }
        let faces_bytes = &body[vertex_count * stride..];
        if faces_bytes.len() < face_count * 17 {
            return Err(Error::Domain("ply: truncated face data".into()));
        }
        let mesh = Mesh::from_grid(nu, nv, closed, vertices, scalars)?;
        if face_count != mesh.faces().len() {
            return Err(Error::GridMismatch(format!(
                "ply: {face_count} faces for a {nu}×{nv} grid (expected {})",
                mesh.faces().len()
            )));
        }
        Ok(mesh)
    }
}

/// Fourth-order central derivative for functions returning a pair of vectors.
fn central4_pair(
    f: impl Fn(f64) -> Result<(Vec3, Vec3)>,
    h: f64,
) -> Result<(Vec3, Vec3)> {
    let m2 = f(-2.0 * h)?;
    let m1 = f(-h)?;
    let p1 = f(h)?;
    let p2 = f(2.0 * h)?;
    let combine = |a: Vec3, b: Vec3, c: Vec3, d: Vec3| (a - b * 8.0 + c * 8.0 - d) / (12.0 * h);
    Ok((combine(m2.0, m1.0, p1.0, p2.0), combine(m2.1, m1.1, p1.1, p2.1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lame::LameData;
    use crate::planar::{PlanarFamily, DEFAULT_FRAME_STEPS};
    use crate::spherical::{ReparamCurve, SphericalParams};
    use crate::theta::RhombicLattice;
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

    fn random_mesh(nu: usize, nv: usize, closed: [bool; 2]) -> Mesh {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut value = || rng.random_range(-10.0..10.0);
        let vertices: Vec<Vec3> = (0..nu * nv).map(|_| Vec3::new(value(), value(), value())).collect();
        let field: Vec<f64> = (0..nu * nv).map(|_| value()).collect();
        let other: Vec<f64> = (0..nu * nv).map(|_| value()).collect();
        Mesh::from_grid(
            nu,
            nv,
            closed,
            vertices,
            vec![("conformal_factor".into(), field), ("mean_curvature".into(), other)],
        )
        .unwrap()
    }

    #[test]
    fn open_2x2_grid_exports_one_quad() {
        let mesh = Mesh::from_grid(
            2,
            2,
            [false, false],
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(1.0, 1.0, 0.0),
            ],
            Vec::new(),
        )
        .unwrap();
        assert_eq!(mesh.faces(), vec![[0, 2, 3, 1]]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("quad.obj");
        mesh.write_obj(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let faces: Vec<&str> = text.lines().filter(|l| l.starts_with("f ")).collect();
        assert_eq!(faces, vec!["f 1 3 4 2"]);
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 4);
    }

    #[test]
    fn closed_grid_wraps_faces_around_both_directions() {
        let mesh = random_mesh(4, 3, [true, true]);
        let faces = mesh.faces();
        assert_eq!(faces.len(), 12);
        assert!(faces.contains(&[3 * 3 + 2, 2, 0, 3 * 3]), "missing corner wrap face");
        let open = random_mesh(4, 3, [false, false]);
        assert_eq!(open.faces().len(), 6);
        assert!(open.faces().iter().all(|f| f.iter().all(|&k| k < 12)));
    }

    #[test]
    fn obj_records_full_precision_vertices() {
        let mesh = Mesh::from_grid(
            2,
            2,
            [false, false],
            vec![
                Vec3::new(std::f64::consts::PI, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(1.0, 1.0, 0.0),
            ],
            Vec::new(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pi.obj");
        mesh.write_obj(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("3.1415926535897931e0"), "precision lost: {text}");
    }

    #[test]
    fn ply_round_trip_is_bit_exact() {
        let mesh = random_mesh(5, 4, [true, false]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.ply");
        mesh.write_ply(&path).unwrap();
        let restored = Mesh::read_ply(&path).unwrap();
        assert_eq!(restored.nu(), 5);
        assert_eq!(restored.nv(), 4);
        assert_eq!(restored.closed(), [true, false]);
        for (a, b) in mesh.vertices().iter().zip(restored.vertices()) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.y.to_bits(), b.y.to_bits());
            assert_eq!(a.z.to_bits(), b.z.to_bits());
        }
        assert_eq!(mesh.scalars().len(), restored.scalars().len());
        for ((name_a, va), (name_b, vb)) in mesh.scalars().iter().zip(restored.scalars()) {
            assert_eq!(name_a, name_b);
            for (a, b) in va.iter().zip(vb) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn ply_reader_rejects_foreign_material() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ply");
        std::fs::write(&path, b"ply\nformat ascii 1.0\nend_header\n").unwrap();
        assert!(matches!(Mesh::read_ply(&path), Err(Error::Domain(_))));
    }

    #[test]
    fn sampled_surface_mesh_is_closed_with_conformal_scalars() {
        let mesh = Mesh::sample_surface(golden_surface(), 12, 12, 3).unwrap();
        assert_eq!(mesh.closed(), [true, true]);
        assert_eq!(mesh.faces().len(), 144);
        assert!(mesh.vertices().iter().all(|p| p.is_finite()));
        let factor = &mesh.scalars()[0].1;
        assert!(factor.iter().all(|&e| e.is_finite() && e > 0.0));
        let curvature = &mesh.scalars()[1].1;
        assert!(curvature.iter().all(|&h| h.is_finite()));
        // the conformal factor scalar matches a direct evaluation
        let direct = golden_surface().metric(0.0, 0.0).unwrap();
        assert!((factor[0] - direct).abs() < 1e-14);
    }
}
