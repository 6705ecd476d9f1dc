//! Scene files and discretised problems: a domain graph with one oriented
//! triangle patch per interface and an incident plane wave.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{Element, MeshSource, TriangleMesh};
use crate::scene::{DomainGraph, Interface, RegionId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub id: RegionId,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceSpec {
    pub from: RegionId,
    pub to: RegionId,
    pub mesh: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidentSpec {
    pub direction: [f64; 3],
}

impl Default for IncidentSpec {
    fn default() -> Self {
        Self {
            direction: [0.0, 1.0, 0.0],
        }
    }
}

/// Scene description file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub omega: f64,
    pub regions: Vec<RegionSpec>,
    pub interfaces: Vec<InterfaceSpec>,
    #[serde(default)]
    pub incident: IncidentSpec,
}

impl SceneFile {
    /// Parse and validate topology, materials and mesh references. Meshes are
    /// not loaded.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let scene: SceneFile = serde_json::from_str(s)?;
        scene.graph()?;
        scene.mesh_sources()?;
        scene.direction()?;
        Ok(scene)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serialisation")
    }

    /// Material constants ordered by region id; ids must be exactly `1..=M`.
    pub fn epsilons(&self) -> Result<Vec<f64>> {
        let m = self.regions.len();
        let mut eps = vec![None; m];
        for r in &self.regions {
            if r.id == 0 || r.id > m {
                return Err(Error::Scene(format!(
                    "region ids must be 1..={m}, got {}",
                    r.id
                )));
            }
            if eps[r.id - 1].replace(r.epsilon).is_some() {
                return Err(Error::Scene(format!("region {} listed twice", r.id)));
            }
        }
        Ok(eps.into_iter().map(|e| e.expect("all ids present")).collect())
    }

    pub fn graph(&self) -> Result<DomainGraph> {
        let pairs: Vec<(RegionId, RegionId)> =
            self.interfaces.iter().map(|i| (i.from, i.to)).collect();
        DomainGraph::from_pairs(&self.epsilons()?, &pairs, self.omega)
    }

    pub fn mesh_sources(&self) -> Result<Vec<MeshSource>> {
        self.interfaces
            .iter()
            .map(|i| MeshSource::parse(&i.mesh))
            .collect()
    }

    pub fn direction(&self) -> Result<Vec3> {
        let d = Vec3::from(self.incident.direction);
        let n = d.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Scene(format!(
                "incident direction {:?} cannot be normalised",
                self.incident.direction
            )));
        }
        Ok(d * (1.0 / n))
    }
}

/// Radii of a concentric two-sphere scene: region 2 is the shell between
/// `r_inner` and `r_outer`, region 3 the core.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereLayout {
    pub r_inner: f64,
    pub r_outer: f64,
}

/// Discretised scene. `patches[b]` is the mesh of the `b`-th interface of
/// `graph`, wound so its normals point from `from` into `to`.
#[derive(Debug, Clone)]
pub struct Problem {
    pub graph: DomainGraph,
    pub patches: Vec<TriangleMesh>,
    pub direction: Vec3,
    pub spheres: Option<SphereLayout>,
}

impl Problem {
    pub fn new(graph: DomainGraph, patches: Vec<TriangleMesh>, direction: Vec3) -> Result<Self> {
        if patches.len() != graph.len() {
            return Err(Error::MissingMesh(patches.len().min(graph.len())));
        }
        if ((direction.norm() - 1.0).abs()) > 1e-10 {
            return Err(Error::InvalidArgument("incident direction must be a unit vector".into()));
        }
        Ok(Self {
            graph,
            patches,
            direction,
            spheres: None,
        })
    }

    /// Mesh every interface of `scene` at refinement `level`.
    pub fn from_scene(scene: &SceneFile, level: u32, base_dir: Option<&Path>) -> Result<Self> {
        let graph = scene.graph()?;
        let sources = scene.mesh_sources()?;
        let patches = graph
            .interfaces()
            .iter()
            .zip(&sources)
            .map(|(i, s)| s.resolve(i.from, i.to, level, base_dir))
            .collect::<Result<Vec<_>>>()?;
        let mut p = Problem::new(graph, patches, scene.direction()?)?;
        p.spheres = detect_spheres(&p.graph, &sources);
        Ok(p)
    }

    pub fn num_elements(&self) -> usize {
        self.patches.iter().map(|p| p.len()).sum()
    }

    pub fn elements(&self) -> Vec<Vec<Element>> {
        self.patches.iter().map(|p| p.elements()).collect()
    }

    pub fn interface(&self, b: usize) -> Interface {
        self.graph.interfaces()[b]
    }

    /// Flip interface `b` in the graph and reverse its patch winding.
    pub fn flipped(&self, b: usize) -> Result<Self> {
        let graph = self.graph.flip_interface(b)?;
        let mut patches = self.patches.clone();
        patches[b] = patches[b].flipped();
        Ok(Self {
            graph,
            patches,
            ..self.clone()
        })
    }

    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Ok(Self {
            graph: self.graph.with_omega(omega)?,
            ..self.clone()
        })
    }

    pub fn with_epsilons(&self, epsilons: &[f64]) -> Result<Self> {
        Ok(Self {
            graph: self.graph.with_epsilons(epsilons)?,
            ..self.clone()
        })
    }
}

fn detect_spheres(graph: &DomainGraph, sources: &[MeshSource]) -> Option<SphereLayout> {
    if graph.num_regions() != 3 || graph.len() != 2 {
        return None;
    }
    let mut outer = None;
    let mut inner = None;
    for (i, s) in graph.interfaces().iter().zip(sources) {
        let MeshSource::Sphere { radius, inward } = *s else {
            return None;
        };
        // Normals must point from `from` into `to`.
        match (i.from, i.to) {
            (1, 2) if inward => outer = Some(radius),
            (3, 2) if !inward => inner = Some(radius),
            (2, 3) if inward => inner = Some(radius),
            _ => return None,
        }
    }
    match (inner, outer) {
        (Some(r_inner), Some(r_outer)) if r_inner < r_outer => Some(SphereLayout { r_inner, r_outer }),
        _ => None,
    }
}

fn spheres_scene(r_inner: f64, r_outer: f64, epsilons: [f64; 3], omega: f64) -> SceneFile {
    SceneFile {
        omega,
        regions: (1..=3)
            .map(|id| RegionSpec {
                id,
                epsilon: epsilons[id - 1],
            })
            .collect(),
        interfaces: vec![
            InterfaceSpec {
                from: 1,
                to: 2,
                mesh: format!("sphere:{r_outer}:in"),
            },
            InterfaceSpec {
                from: 3,
                to: 2,
                mesh: format!("sphere:{r_inner}:out"),
            },
        ],
        incident: IncidentSpec::default(),
    }
}

/// Sphere of radius `r_inner` (region 3) embedded in a sphere of radius
/// `r_outer` (region 2), ℬ = [(1,2),(3,2)], plane wave along x₂.
pub fn build_scene_spheres(
    r_inner: f64,
    r_outer: f64,
    subdivisions: u32,
    epsilons: [f64; 3],
    omega: f64,
) -> Result<Problem> {
    if !(r_inner > 0.0 && r_inner < r_outer && r_outer.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < r_inner < r_outer, got {r_inner} and {r_outer}"
        )));
    }
    Problem::from_scene(&spheres_scene(r_inner, r_outer, epsilons, omega), subdivisions, None)
}

/// Scene for a built-in cell layout with the given interface list.
pub fn layout_scene(layout: &str, epsilons: &[f64], pairs: &[(RegionId, RegionId)], omega: f64) -> SceneFile {
    SceneFile {
        omega,
        regions: epsilons
            .iter()
            .enumerate()
            .map(|(i, &epsilon)| RegionSpec { id: i + 1, epsilon })
            .collect(),
        interfaces: pairs
            .iter()
            .map(|&(from, to)| InterfaceSpec {
                from,
                to,
                mesh: format!("layout:{layout}"),
            })
            .collect(),
        incident: IncidentSpec::default(),
    }
}

/// Interface order of the two-cuboid scene.
pub const TWO_CUBOIDS_PAIRS: [(RegionId, RegionId); 3] = [(1, 2), (1, 3), (3, 2)];

/// Interface order of the four-box scene.
pub const FOUR_BOXES_PAIRS: [(RegionId, RegionId); 10] = [
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (2, 3),
    (2, 4),
    (3, 4),
    (4, 5),
    (5, 2),
    (5, 3),
];

/// Two unit cubes touching along one face.
pub fn build_two_cuboids(level: u32, epsilons: [f64; 3], omega: f64) -> Result<Problem> {
    Problem::from_scene(&layout_scene("two-cuboids", &epsilons, &TWO_CUBOIDS_PAIRS, omega), level, None)
}

/// Four pairwise touching boxes.
pub fn build_four_boxes(level: u32, epsilons: [f64; 5], omega: f64) -> Result<Problem> {
    Problem::from_scene(&layout_scene("four-boxes", &epsilons, &FOUR_BOXES_PAIRS, omega), level, None)
}
