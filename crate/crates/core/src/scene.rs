//! Region/interface topology of a multi-material scatterer.
//!
//! Regions are numbered from 1; region 1 is the unbounded host medium. Each
//! interface `(i, j)` carries a unit normal pointing from region `i` into
//! region `j`, so no interface may point into region 1. The interface list is
//! an ordered set: its order fixes the block layout of the assembled system.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1-based region index. Region 1 is the exterior.
pub type RegionId = usize;

pub const EXTERIOR: RegionId = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    epsilon: f64,
}

impl Material {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidMaterial { region: 0, epsilon });
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Oriented interface between two regions; `patch` names the mesh patch
/// that discretises it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interface {
    pub from: RegionId,
    pub to: RegionId,
    pub patch: usize,
}

impl Interface {
    pub fn new(from: RegionId, to: RegionId, patch: usize) -> Self {
        Self { from, to, patch }
    }

    pub fn flipped(self) -> Self {
        Self {
            from: self.to,
            to: self.from,
            patch: self.patch,
        }
    }

    pub fn is_exterior(&self) -> bool {
        self.from == EXTERIOR
    }

    pub fn touches(&self, region: RegionId) -> bool {
        self.from == region || self.to == region
    }

    /// The same geometric interface regardless of orientation.
    fn unordered(&self) -> (RegionId, RegionId) {
        (self.from.min(self.to), self.from.max(self.to))
    }
}

/// Neighbour sets of one region: all neighbours, those reached through the
/// region's outward normals, and those whose normals point into it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AdjacencySets {
    pub all: BTreeSet<RegionId>,
    pub outward: BTreeSet<RegionId>,
    pub inward: BTreeSet<RegionId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainGraph {
    materials: Vec<Material>,
    interfaces: Vec<Interface>,
    omega: f64,
}

/// Validate and build a domain graph. The interface order is preserved.
pub fn build_domain_graph(
    materials: Vec<Material>,
    interfaces: Vec<Interface>,
    omega: f64,
) -> Result<DomainGraph> {
    let m = materials.len();
    if m < 2 {
        return Err(Error::TooFewRegions(m));
    }
    for (idx, mat) in materials.iter().enumerate() {
        if !(mat.epsilon > 0.0 && mat.epsilon.is_finite()) {
            return Err(Error::InvalidMaterial {
                region: idx + 1,
                epsilon: mat.epsilon,
            });
        }
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidFrequency(omega));
    }
    let mut seen = BTreeSet::new();
    for iface in &interfaces {
        for r in [iface.from, iface.to] {
            if r == 0 || r > m {
                return Err(Error::UnknownRegion(r));
            }
        }
        if iface.from == iface.to {
            return Err(Error::SelfLoop {
                from: iface.from,
                to: iface.to,
            });
        }
        if iface.to == EXTERIOR {
            return Err(Error::OrientedIntoExterior {
                from: iface.from,
                to: iface.to,
            });
        }
        let key = iface.unordered();
        if !seen.insert(key) {
            return Err(Error::DuplicateInterface { a: key.0, b: key.1 });
        }
    }
    Ok(DomainGraph {
        materials,
        interfaces,
        omega,
    })
}

impl DomainGraph {
    /// Convenience constructor from raw material constants and `(from, to)`
    /// pairs; patch ids are the pair positions.
    pub fn from_pairs(epsilons: &[f64], pairs: &[(RegionId, RegionId)], omega: f64) -> Result<Self> {
        let materials = epsilons
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                Material::new(e).map_err(|_| Error::InvalidMaterial {
                    region: i + 1,
                    epsilon: e,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let interfaces = pairs
            .iter()
            .enumerate()
            .map(|(p, &(from, to))| Interface::new(from, to, p))
            .collect();
        build_domain_graph(materials, interfaces, omega)
    }

    pub fn num_regions(&self) -> usize {
        self.materials.len()
    }

    /// Number of interfaces, N_B.
    pub fn len(&self) -> usize {
        self.interfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interfaces.is_empty()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn interfaces(&self) -> &[Interface] {
        &self.interfaces
    }

    pub fn interface(&self, index: usize) -> Result<Interface> {
        self.interfaces
            .get(index)
            .copied()
            .ok_or(Error::InterfaceIndex {
                index,
                len: self.interfaces.len(),
            })
    }

    pub fn materials(&self) -> &[Material] {
        &self.materials
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.materials.iter().map(Material::epsilon).collect()
    }

    /// Material constant of a region. Panics on an unknown id.
    pub fn epsilon(&self, region: RegionId) -> f64 {
        self.materials[region - 1].epsilon
    }

    /// k_i = ω √ε_i
    pub fn wavenumber(&self, region: RegionId) -> f64 {
        self.omega * self.epsilon(region).sqrt()
    }

    /// Burton-Miller coefficient of the exterior equation, α₁ = −i/k₁.
    pub fn alpha1(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(0.0, -1.0 / self.wavenumber(EXTERIOR))
    }

    /// Position of the interface oriented `(from, to)`, if present.
    pub fn position(&self, from: RegionId, to: RegionId) -> Option<usize> {
        self.interfaces
            .iter()
            .position(|i| i.from == from && i.to == to)
    }

    fn check_region(&self, region: RegionId) -> Result<()> {
        if region == 0 || region > self.num_regions() {
            Err(Error::UnknownRegion(region))
        } else {
            Ok(())
        }
    }

    pub fn adjacency_sets(&self, region: RegionId) -> Result<AdjacencySets> {
        self.check_region(region)?;
        let mut sets = AdjacencySets::default();
        for iface in &self.interfaces {
            if iface.from == region {
                sets.outward.insert(iface.to);
                sets.all.insert(iface.to);
            } else if iface.to == region {
                sets.inward.insert(iface.from);
                sets.all.insert(iface.from);
            }
        }
        Ok(sets)
    }

    /// Interface positions whose normal points out of `region`.
    pub fn outward_positions(&self, region: RegionId) -> Vec<usize> {
        (0..self.len())
            .filter(|&b| self.interfaces[b].from == region)
            .collect()
    }

    /// Interface positions whose normal points into `region`.
    pub fn inward_positions(&self, region: RegionId) -> Vec<usize> {
        (0..self.len())
            .filter(|&b| self.interfaces[b].to == region)
            .collect()
    }

    /// Returns a copy with interface `index` reoriented; the position in the
    /// ordered set is unchanged.
    pub fn flip_interface(&self, index: usize) -> Result<DomainGraph> {
        let iface = self.interface(index)?;
        if iface.touches(EXTERIOR) {
            return Err(Error::ExteriorFlip {
                from: iface.from,
                to: iface.to,
            });
        }
        let mut out = self.clone();
        out.interfaces[index] = iface.flipped();
        Ok(out)
    }

    pub fn with_omega(&self, omega: f64) -> Result<DomainGraph> {
        build_domain_graph(self.materials.clone(), self.interfaces.clone(), omega)
    }

    pub fn with_epsilons(&self, epsilons: &[f64]) -> Result<DomainGraph> {
        if epsilons.len() != self.num_regions() {
            return Err(Error::DimensionMismatch {
                expected: self.num_regions(),
                got: epsilons.len(),
            });
        }
        let materials = epsilons
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                Material::new(e).map_err(|_| Error::InvalidMaterial {
                    region: i + 1,
                    epsilon: e,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        build_domain_graph(materials, self.interfaces.clone(), self.omega)
    }
}
