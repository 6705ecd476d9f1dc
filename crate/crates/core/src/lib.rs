//! Collocation boundary element solver for 3D Helmholtz transmission
//! problems with Calderon-preconditioned Burton–Miller equations.
//!
//! The pieces, bottom-up:
//!
//! * [`scene`]: regions, oriented interfaces, adjacency sets;
//! * [`mesh`]: icospheres, boxes, cell layouts and the mesh JSON format;
//! * [`kernels`]: fundamental solution and element integrals of S, D, D*, N;
//! * [`assembly`]: block system of standard and Burton–Miller rows;
//! * [`spectral`]: accumulation points, parameter patterns, the tuner,
//!   the point-Jacobi diagonal and dense eigenvalues;
//! * [`solver`]: full GMRES with right diagonal preconditioning;
//! * [`oracle`]: series solution for two concentric spheres;
//! * [`pipeline`]: solve modes tying everything together.

pub mod assembly;
pub mod error;
pub mod geom;
pub mod kernels;
pub mod mesh;
pub mod oracle;
pub mod pipeline;
pub mod problem;
pub mod quadrature;
pub mod scene;
pub mod solver;
pub mod spectral;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use geom::Vec3;
pub use mesh::{Element, MeshSource, TriangleMesh};
pub use scene::{build_domain_graph, DomainGraph, Interface, Material, RegionId};
