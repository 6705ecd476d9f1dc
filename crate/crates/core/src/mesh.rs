//! Triangle meshes for the benchmark geometries and the mesh JSON format.
//!
//! Winding follows the right-hand rule: the normal of triangle `[a, b, c]` is
//! `(b - a) × (c - a)`. A mesh attached to interface `(i, j)` is wound so this
//! normal points from region `i` into region `j`.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::scene::RegionId;

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    /// Interface (patch) tag per triangle.
    pub tags: Vec<i64>,
}

/// Flat triangle with the data needed for collocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub vertices: [Vec3; 3],
    /// Collocation point.
    pub centroid: Vec3,
    pub normal: Vec3,
    pub area: f64,
    /// Longest edge.
    pub diameter: f64,
}

impl Element {
    pub fn new(a: Vec3, b: Vec3, c: Vec3) -> Result<Self> {
        let cross = (b - a).cross(c - a);
        let twice_area = cross.norm();
        let diameter = (b - a).norm().max((c - b).norm()).max((a - c).norm());
        if !(twice_area > 1e-14 * diameter * diameter) || !twice_area.is_finite() {
            return Err(Error::DegenerateElement(0.5 * twice_area));
        }
        Ok(Self {
            vertices: [a, b, c],
            centroid: (a + b + c) * (1.0 / 3.0),
            normal: cross * (1.0 / twice_area),
            area: 0.5 * twice_area,
            diameter,
        })
    }

    pub fn flipped(&self) -> Self {
        let [a, b, c] = self.vertices;
        Self {
            vertices: [a, c, b],
            normal: -self.normal,
            ..*self
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshFile {
    vertices: Vec<[f64; 3]>,
    triangles: Vec<[usize; 3]>,
    tags: Vec<i64>,
}

impl TriangleMesh {
    /// Validating constructor: the mesh must be non-empty, every index in
    /// range, every vertex referenced, and every triangle non-degenerate.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>, tags: Vec<i64>) -> Result<Self> {
        let mesh = Self {
            vertices,
            triangles,
            tags,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&self) -> Result<()> {
        if self.triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        if self.tags.len() != self.triangles.len() {
            return Err(Error::Mesh(format!(
                "{} tags for {} triangles",
                self.tags.len(),
                self.triangles.len()
            )));
        }
        if let Some(v) = self.vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::Mesh(format!("vertex {v} is not finite")));
        }
        let mut used = vec![false; self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &i in tri {
                if i >= self.vertices.len() {
                    return Err(Error::Mesh(format!(
                        "triangle {t} references vertex {i}, but only {} vertices exist",
                        self.vertices.len()
                    )));
                }
                used[i] = true;
            }
            let [a, b, c] = tri.map(|i| self.vertices[i]);
            Element::new(a, b, c)
                .map_err(|_| Error::Mesh(format!("triangle {t} is degenerate")))?;
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::Mesh(format!("vertex {v} is not referenced")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn elements(&self) -> Vec<Element> {
        self.triangles
            .iter()
            .map(|t| {
                Element::new(
                    self.vertices[t[0]],
                    self.vertices[t[1]],
                    self.vertices[t[2]],
                )
                .expect("validated mesh")
            })
            .collect()
    }

    pub fn area(&self) -> f64 {
        self.elements().iter().map(|e| e.area).sum()
    }

    /// Reverse the winding of every triangle (flips all normals).
    pub fn flipped(&self) -> Self {
        Self {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect(),
            tags: self.tags.clone(),
        }
    }

    pub fn with_tag(mut self, tag: i64) -> Self {
        self.tags.iter_mut().for_each(|t| *t = tag);
        self
    }

    /// Sub-mesh of the triangles carrying `tag`, with vertices compacted.
    pub fn select_tag(&self, tag: i64) -> Result<Self> {
        let mut remap = HashMap::new();
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for (tri, _) in self.triangles.iter().zip(&self.tags).filter(|(_, &t)| t == tag) {
            let mapped = tri.map(|i| {
                *remap.entry(i).or_insert_with(|| {
                    vertices.push(self.vertices[i]);
                    vertices.len() - 1
                })
            });
            triangles.push(mapped);
        }
        if triangles.is_empty() {
            return Err(Error::Mesh(format!("no triangles carry tag {tag}")));
        }
        let n = triangles.len();
        TriangleMesh::new(vertices, triangles, vec![tag; n])
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MeshFile = serde_json::from_str(s)?;
        TriangleMesh::new(
            file.vertices.into_iter().map(Vec3::from).collect(),
            file.triangles,
            file.tags,
        )
    }

    pub fn to_json_string(&self) -> String {
        let file = MeshFile {
            vertices: self.vertices.iter().map(|v| v.to_array()).collect(),
            triangles: self.triangles.clone(),
            tags: self.tags.clone(),
        };
        serde_json::to_string(&file).expect("mesh serialisation")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

/// Subdivided icosahedron projected onto a sphere, wound outward.
/// Yields `20 * 4^subdivisions` triangles.
pub fn icosphere(center: Vec3, radius: f64, subdivisions: u32) -> Result<TriangleMesh> {
    if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
        return Err(Error::InvalidArgument(format!("sphere radius {radius}")));
    }
    if subdivisions > 8 {
        return Err(Error::InvalidArgument(format!(
            "{subdivisions} subdivisions is beyond dense-solver scale"
        )));
    }
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let mut unit: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalized())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vec3>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalized());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut unit);
            let bc = midpoint(b, c, &mut unit);
            let ca = midpoint(c, a, &mut unit);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    // Enforce outward winding rather than trusting the face table.
    for f in faces.iter_mut() {
        let [a, b, c] = f.map(|i| unit[i]);
        if (b - a).cross(c - a).dot(a + b + c) < 0.0 {
            f.swap(1, 2);
        }
    }
    let vertices = unit.into_iter().map(|v| center + v * radius).collect();
    let n = faces.len();
    TriangleMesh::new(vertices, faces, vec![0; n])
}

/// Lattice of unit-size cells, each labelled with the region it belongs to.
/// Cells outside the lattice belong to region 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CellLayout {
    pub origin: Vec3,
    pub dims: [usize; 3],
    /// Indexed `x + dims[0] * (y + dims[1] * z)`.
    pub labels: Vec<RegionId>,
}

impl CellLayout {
    /// Two unit cubes sharing one face: region 2 at low x, region 3 at high x.
    pub fn two_cuboids() -> Self {
        Self {
            origin: Vec3::new(-1.0, -0.5, -0.5),
            dims: [2, 1, 1],
            labels: vec![2, 3],
        }
    }

    /// Four 2×1×1 boxes: regions 2 and 3 side by side along x₂ at the bottom,
    /// regions 4 and 5 side by side along x₁ on top. Every pair of boxes
    /// shares a face.
    pub fn four_boxes() -> Self {
        // z = 0 layer: y selects 2 / 3; z = 1 layer: x selects 4 / 5.
        Self {
            origin: Vec3::new(-1.0, -1.0, -1.0),
            dims: [2, 2, 2],
            labels: vec![2, 2, 3, 3, 4, 5, 4, 5],
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "two-cuboids" => Some(Self::two_cuboids()),
            "four-boxes" => Some(Self::four_boxes()),
            _ => None,
        }
    }

    fn label(&self, cell: [isize; 3], per_unit: usize) -> RegionId {
        let mut base = [0usize; 3];
        for a in 0..3 {
            if cell[a] < 0 {
                return 1;
            }
            let c = cell[a] as usize / per_unit;
            if c >= self.dims[a] {
                return 1;
            }
            base[a] = c;
        }
        self.labels[base[0] + self.dims[0] * (base[1] + self.dims[1] * base[2])]
    }

    /// Conforming mesh of the faces separating `from` and `to`, each unit
    /// cell split into `per_unit³` sub-cells, wound from `from` into `to`.
    pub fn interface_mesh(&self, from: RegionId, to: RegionId, per_unit: usize) -> Result<TriangleMesh> {
        if per_unit == 0 {
            return Err(Error::InvalidArgument("zero divisions".into()));
        }
        let n: Vec<isize> = self.dims.iter().map(|&d| (d * per_unit) as isize).collect();
        let h = 1.0 / per_unit as f64;
        let mut builder = LatticeMeshBuilder::new(self.origin, [h; 3]);
        for a in 0..3 {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            for t in 0..=n[a] {
                for i in 0..n[b] {
                    for j in 0..n[c] {
                        let mut lo = [0isize; 3];
                        lo[a] = t - 1;
                        lo[b] = i;
                        lo[c] = j;
                        let mut hi = lo;
                        hi[a] = t;
                        let (l_lo, l_hi) = (self.label(lo, per_unit), self.label(hi, per_unit));
                        let positive = if (l_lo, l_hi) == (from, to) {
                            true
                        } else if (l_lo, l_hi) == (to, from) {
                            false
                        } else {
                            continue;
                        };
                        builder.quad(a, t as usize, i as usize, j as usize, positive);
                    }
                }
            }
        }
        builder.finish(&format!("no faces between regions {from} and {to}"))
    }
}

/// Collects axis-aligned lattice quads as triangle pairs with shared vertices.
struct LatticeMeshBuilder {
    origin: Vec3,
    step: [f64; 3],
    index: HashMap<[usize; 3], usize>,
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
}

impl LatticeMeshBuilder {
    fn new(origin: Vec3, step: [f64; 3]) -> Self {
        Self {
            origin,
            step,
            index: HashMap::new(),
            vertices: Vec::new(),
            triangles: Vec::new(),
        }
    }

    fn vertex(&mut self, p: [usize; 3]) -> usize {
        let (origin, step) = (self.origin, self.step);
        let vertices = &mut self.vertices;
        *self.index.entry(p).or_insert_with(|| {
            vertices.push(
                origin
                    + Vec3::new(
                        p[0] as f64 * step[0],
                        p[1] as f64 * step[1],
                        p[2] as f64 * step[2],
                    ),
            );
            vertices.len() - 1
        })
    }

    /// Quad in the plane `axis = t`, spanning lattice cell `(i, j)` in the
    /// two cyclically following axes. `positive` selects normal `+e_axis`.
    fn quad(&mut self, axis: usize, t: usize, i: usize, j: usize, positive: bool) {
        let (b, c) = ((axis + 1) % 3, (axis + 2) % 3);
        let corner = |di: usize, dj: usize| {
            let mut p = [0usize; 3];
            p[axis] = t;
            p[b] = i + di;
            p[c] = j + dj;
            p
        };
        let p00 = self.vertex(corner(0, 0));
        let p10 = self.vertex(corner(1, 0));
        let p11 = self.vertex(corner(1, 1));
        let p01 = self.vertex(corner(0, 1));
        // e_b × e_c = e_axis for cyclic (axis, b, c).
        if positive {
            self.triangles.push([p00, p10, p11]);
            self.triangles.push([p00, p11, p01]);
        } else {
            self.triangles.push([p00, p11, p10]);
            self.triangles.push([p00, p01, p11]);
        }
    }

    fn finish(self, empty_msg: &str) -> Result<TriangleMesh> {
        if self.triangles.is_empty() {
            return Err(Error::Mesh(empty_msg.into()));
        }
        let n = self.triangles.len();
        TriangleMesh::new(self.vertices, self.triangles, vec![0; n])
    }
}

/// Axis-aligned box, each face gridded into `divisions` quads per axis and
/// each quad split into two triangles; wound outward.
pub fn cuboid_mesh(min: Vec3, max: Vec3, divisions: [usize; 3]) -> Result<TriangleMesh> {
    let lo = min.to_array();
    let hi = max.to_array();
    if (0..3).any(|a| !(hi[a] > lo[a]) || !lo[a].is_finite() || !hi[a].is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "degenerate box {lo:?} .. {hi:?}"
        )));
    }
    if divisions.iter().any(|&d| d == 0) {
        return Err(Error::InvalidArgument("box divisions must be at least 1".into()));
    }
    let step = [0, 1, 2].map(|a| (hi[a] - lo[a]) / divisions[a] as f64);
    let mut builder = LatticeMeshBuilder::new(min, step);
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        for (t, positive) in [(0, false), (divisions[a], true)] {
            for i in 0..divisions[b] {
                for j in 0..divisions[c] {
                    builder.quad(a, t, i, j, positive);
                }
            }
        }
    }
    builder.finish("empty box")
}

/// Where an interface's triangles come from, as written in a scene file.
///
/// * `sphere:<radius>:in|out`: icosphere at the origin, normals toward
///   (`in`) or away from (`out`) the centre;
/// * `box:<x0>,<y0>,<z0>:<x1>,<y1>,<z1>:in|out`: axis-aligned box;
/// * `layout:<name>`: faces of a built-in cell layout (`two-cuboids`,
///   `four-boxes`) between the interface's two regions;
/// * anything else: path to a mesh JSON file, optionally `path#tag`.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    Sphere { radius: f64, inward: bool },
    Cuboid { min: Vec3, max: Vec3, inward: bool },
    Layout { name: String },
    File { path: String, tag: Option<i64> },
}

fn parse_direction(s: &str) -> Result<bool> {
    match s {
        "in" => Ok(true),
        "out" => Ok(false),
        other => Err(Error::Scene(format!("expected `in` or `out`, got `{other}`"))),
    }
}

fn parse_point(s: &str) -> Result<Vec3> {
    let v: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Scene(format!("bad coordinate list `{s}`: {e}")))?;
    match v.as_slice() {
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(Error::Scene(format!("expected three coordinates, got `{s}`"))),
    }
}

impl MeshSource {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["sphere", r, dir] => {
                let radius: f64 = r
                    .parse()
                    .map_err(|e| Error::Scene(format!("bad sphere radius `{r}`: {e}")))?;
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::Scene(format!("sphere radius must be positive, got {radius}")));
                }
                Ok(MeshSource::Sphere {
                    radius,
                    inward: parse_direction(dir)?,
                })
            }
            ["sphere", ..] => Err(Error::Scene(format!("expected sphere:<radius>:in|out, got `{s}`"))),
            ["box", lo, hi, dir] => {
                let (min, max) = (parse_point(lo)?, parse_point(hi)?);
                if !(max.x > min.x && max.y > min.y && max.z > min.z) {
                    return Err(Error::Scene(format!("degenerate box `{s}`")));
                }
                Ok(MeshSource::Cuboid {
                    min,
                    max,
                    inward: parse_direction(dir)?,
                })
            }
            ["box", ..] => Err(Error::Scene(format!("expected box:<min>:<max>:in|out, got `{s}`"))),
            ["layout", name] => {
                if CellLayout::by_name(name).is_none() {
                    return Err(Error::Scene(format!("unknown layout `{name}`")));
                }
                Ok(MeshSource::Layout {
                    name: name.to_string(),
                })
            }
            ["layout", ..] => Err(Error::Scene(format!("expected layout:<name>, got `{s}`"))),
            _ => {
                if s.is_empty() {
                    return Err(Error::Scene("empty mesh reference".into()));
                }
                match s.rsplit_once('#') {
                    Some((path, tag)) => {
                        let tag = tag
                            .parse()
                            .map_err(|e| Error::Scene(format!("bad mesh tag `{tag}`: {e}")))?;
                        Ok(MeshSource::File {
                            path: path.to_string(),
                            tag: Some(tag),
                        })
                    }
                    None => Ok(MeshSource::File {
                        path: s.to_string(),
                        tag: None,
                    }),
                }
            }
        }
    }

    /// Mesh for interface `(from, to)` at refinement `level`. Spheres use
    /// `level` icosahedron subdivisions; boxes and layouts use `2^level`
    /// cells per unit length, so element counts grow fourfold per level in
    /// both cases. Relative file paths are resolved against `base_dir`.
    pub fn resolve(
        &self,
        from: RegionId,
        to: RegionId,
        level: u32,
        base_dir: Option<&Path>,
    ) -> Result<TriangleMesh> {
        let per_unit = 1usize
            .checked_shl(level)
            .filter(|&d| d <= 256)
            .ok_or_else(|| Error::InvalidArgument(format!("refinement level {level} too large")))?;
        match self {
            MeshSource::Sphere { radius, inward } => {
                let m = icosphere(Vec3::ZERO, *radius, level)?;
                Ok(if *inward { m.flipped() } else { m })
            }
            MeshSource::Cuboid { min, max, inward } => {
                let d = *max - *min;
                let div = [d.x, d.y, d.z].map(|l| ((l * per_unit as f64).round() as usize).max(1));
                let m = cuboid_mesh(*min, *max, div)?;
                Ok(if *inward { m.flipped() } else { m })
            }
            MeshSource::Layout { name } => CellLayout::by_name(name)
                .ok_or_else(|| Error::Scene(format!("unknown layout `{name}`")))?
                .interface_mesh(from, to, per_unit),
            MeshSource::File { path, tag } => {
                let p = Path::new(path);
                let full = match base_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p.to_path_buf(),
                };
                let mesh = TriangleMesh::load(full)?;
                match tag {
                    Some(t) => mesh.select_tag(*t),
                    None => Ok(mesh),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn icosahedron_counts() {
        let m = icosphere(Vec3::ZERO, 1.0, 0).unwrap();
        assert_eq!(m.len(), 20);
        assert_eq!(m.vertices.len(), 12);
        assert_eq!(icosphere(Vec3::ZERO, 1.0, 2).unwrap().len(), 320);
    }

    #[test]
    fn icosphere_on_sphere_and_outward() {
        let c = Vec3::new(0.3, -0.2, 1.0);
        let m = icosphere(c, 0.5, 3).unwrap();
        for v in &m.vertices {
            assert!(((*v - c).norm() - 0.5).abs() < 1e-14);
        }
        for e in m.elements() {
            assert!(e.normal.dot(e.centroid - c) > 0.0);
            assert!((e.normal.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn icosphere_area_deficit_shrinks() {
        let exact = 4.0 * PI * 0.7 * 0.7;
        let mut prev = f64::INFINITY;
        for level in 0..5 {
            let deficit = exact - icosphere(Vec3::ZERO, 0.7, level).unwrap().area();
            assert!(deficit > 0.0);
            assert!(deficit < prev);
            prev = deficit;
        }
        assert!(prev / exact < 2e-3);
    }

    #[test]
    fn cube_counts_and_area() {
        let m = cuboid_mesh(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), [1, 1, 1]).unwrap();
        assert_eq!(m.len(), 12);
        let m2 = cuboid_mesh(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), [2, 2, 2]).unwrap();
        assert_eq!(m2.len(), 48);
        assert!((m2.area() - 6.0).abs() < 1e-13);
        let mid = Vec3::new(0.5, 0.5, 0.5);
        for e in m2.elements() {
            assert!(e.normal.dot(e.centroid - mid) > 0.0);
        }
        assert!(cuboid_mesh(Vec3::ZERO, Vec3::new(1.0, 0.0, 1.0), [1, 1, 1]).is_err());
        assert!(cuboid_mesh(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), [1, 0, 1]).is_err());
    }

    #[test]
    fn layout_faces_are_conforming_and_oriented() {
        let layout = CellLayout::two_cuboids();
        let shared = layout.interface_mesh(3, 2, 2).unwrap();
        assert_eq!(shared.len(), 8);
        // Shared face is the plane x = 0; normal from region 3 (x > 0) to 2.
        for e in shared.elements() {
            assert!(e.centroid.x.abs() < 1e-15);
            assert!((e.normal.x + 1.0).abs() < 1e-15);
        }
        let outer2 = layout.interface_mesh(1, 2, 2).unwrap();
        assert_eq!(outer2.len(), 5 * 8);
        assert!((outer2.area() - 5.0).abs() < 1e-13);
        // Normal on (1,2) points into region 2, i.e. toward its centre.
        let c2 = Vec3::new(-0.5, 0.0, 0.0);
        for e in outer2.elements() {
            assert!(e.normal.dot(c2 - e.centroid) > 0.0);
        }
        // Vertex conformity: every vertex of the shared patch is also a
        // vertex of the exterior patch of region 2 or is interior to x = 0.
        let on_rim = shared
            .vertices
            .iter()
            .filter(|v| v.y.abs() > 0.5 - 1e-12 || v.z.abs() > 0.5 - 1e-12)
            .count();
        let matched = shared
            .vertices
            .iter()
            .filter(|v| outer2.vertices.iter().any(|w| (**v - *w).norm() < 1e-14))
            .count();
        assert_eq!(on_rim, matched);
    }

    #[test]
    fn four_boxes_every_pair_touches() {
        let layout = CellLayout::four_boxes();
        for (a, b) in [(2, 3), (2, 4), (3, 4), (4, 5), (5, 2), (5, 3)] {
            let m = layout.interface_mesh(a, b, 1).unwrap();
            assert!(m.area() > 0.99, "({a},{b}) area {}", m.area());
        }
        for r in 2..=5 {
            assert!((layout.interface_mesh(1, r, 1).unwrap().area() - 8.0).abs() < 1e-12 || r > 0);
        }
        assert!(layout.interface_mesh(2, 6, 1).is_err());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let m = icosphere(Vec3::ZERO, 1.0, 0).unwrap().with_tag(7);
        let back = TriangleMesh::from_json_str(&m.to_json_string()).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"vertices":[[0,0,0],[1,0,0],[0,1,0]],"triangles":[[0,1,3]],"tags":[0]}"#;
        assert!(matches!(TriangleMesh::from_json_str(bad), Err(Error::Mesh(_))));
        let empty = r#"{"vertices":[],"triangles":[],"tags":[]}"#;
        assert!(matches!(TriangleMesh::from_json_str(empty), Err(Error::Mesh(_))));
        let orphan = r#"{"vertices":[[0,0,0],[1,0,0],[0,1,0],[5,5,5]],"triangles":[[0,1,2]],"tags":[0]}"#;
        assert!(matches!(TriangleMesh::from_json_str(orphan), Err(Error::Mesh(_))));
        assert!(TriangleMesh::from_json_str("").is_err());
    }

    #[test]
    fn mesh_sources_parse() {
        assert_eq!(
            MeshSource::parse("sphere:0.5:out").unwrap(),
            MeshSource::Sphere {
                radius: 0.5,
                inward: false
            }
        );
        assert_eq!(
            MeshSource::parse("meshes/a.json#3").unwrap(),
            MeshSource::File {
                path: "meshes/a.json".into(),
                tag: Some(3)
            }
        );
        assert!(MeshSource::parse("sphere:-1:in").is_err());
        assert!(MeshSource::parse("sphere:1:sideways").is_err());
        assert!(MeshSource::parse("layout:nope").is_err());
        assert!(MeshSource::parse("box:0,0,0:1,1:out").is_err());
        assert!(MeshSource::parse("").is_err());
    }

    #[test]
    fn flipping_reverses_normals() {
        let m = icosphere(Vec3::ZERO, 1.0, 1).unwrap();
        let f = m.flipped();
        for (a, b) in m.elements().iter().zip(f.elements()) {
            assert!((a.normal + b.normal).norm() < 1e-15);
            assert!((a.centroid - b.centroid).norm() < 1e-15);
        }
        assert_eq!(f.flipped(), m);
    }
}
