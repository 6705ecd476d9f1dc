//! Predicted spectrum of the squared Calderon operator, parameter patterns,
//! the tuner and the point-Jacobi diagonal.
//!
//! A [`BieConfig`] fixes two things on top of a base [`DomainGraph`]: which
//! interior interfaces have their normal reversed, and which [`Pattern`]
//! sets `γ_r = α_r/α₁` for every region owning a Burton–Miller equation.
//! Given both, [`accumulation_points`] returns the `2N_ℬ` points at which
//! the eigenvalues of `A²` accumulate.

mod config;
mod eigen;
mod tune;

pub use config::{BieConfig, Pattern};
pub use eigen::{dense_eigenvalues, fraction_within, radius_for_fraction, squared, system_eigenvalues};
pub use tune::{enumerate_configs, evaluate_all, tune, Candidate};

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::assembly::{expand_block_diagonal, BlockIndexMap};
use crate::error::{Error, Result};
use crate::scene::{DomainGraph, RegionId, EXTERIOR};
use crate::C64;

/// Two accumulation points closer than this (relative) are one point.
pub const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    /// `λ₁ … λ_{N_ℬ}` followed by `λ_{N_ℬ+1} … λ_{2N_ℬ}`.
    pub lambdas: Vec<C64>,
    pub distinct_points: Vec<C64>,
    pub max_ratio: f64,
}

impl ClusterReport {
    pub fn from_lambdas(lambdas: Vec<C64>) -> Result<Self> {
        let scale = lambdas.iter().map(|l| l.norm()).fold(0.0, f64::max);
        if let Some(index) = lambdas
            .iter()
            .position(|l| !(l.norm() > 1e-14 * scale) || !l.re.is_finite() || !l.im.is_finite())
        {
            return Err(Error::ZeroAccumulationPoint { index });
        }
        let mut distinct: Vec<C64> = Vec::new();
        for &l in &lambdas {
            if !distinct.iter().any(|d| same_point(*d, l)) {
                distinct.push(l);
            }
        }
        let max = lambdas.iter().map(|l| l.norm()).fold(0.0, f64::max);
        let min = lambdas.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min);
        Ok(Self {
            lambdas,
            distinct_points: distinct,
            max_ratio: max / min,
        })
    }

    /// Clusters of `(A M⁻¹)²` when column block `b` is scaled by `diag[b]`.
    pub fn preconditioned(&self, diag: &JacobiDiagonal) -> Result<Self> {
        if diag.scales.len() != self.lambdas.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lambdas.len(),
                got: diag.scales.len(),
            });
        }
        Self::from_lambdas(
            self.lambdas
                .iter()
                .zip(&diag.scales)
                .map(|(l, m)| l * m * m)
                .collect(),
        )
    }
}

pub fn same_point(a: C64, b: C64) -> bool {
    (a - b).norm() <= MERGE_TOL * a.norm().max(b.norm())
}

/// Block-constant diagonal of `M⁻¹`, one scale per column block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiDiagonal {
    pub scales: Vec<C64>,
}

impl JacobiDiagonal {
    /// One entry per unknown, laid out like the system columns.
    pub fn expand(&self, map: &BlockIndexMap) -> Result<Vec<C64>> {
        expand_block_diagonal(map, &self.scales)
    }
}

/// `1/√λ_b` with the principal root.
pub fn jacobi_diagonal(report: &ClusterReport) -> Result<JacobiDiagonal> {
    let scales = report
        .lambdas
        .iter()
        .enumerate()
        .map(|(index, l)| {
            if l.norm() == 0.0 {
                Err(Error::ZeroAccumulationPoint { index })
            } else {
                Ok(l.sqrt().inv())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(JacobiDiagonal { scales })
}

/// `γ_r` for every region (index `r − 1`) of an already oriented graph.
/// Region 1 gets 1; regions with no outward interface get `None`.
pub fn gammas(oriented: &DomainGraph, config: &BieConfig) -> Result<Vec<Option<f64>>> {
    let m = oriented.num_regions();
    if config.patterns.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: config.patterns.len(),
        });
    }
    (1..=m)
        .map(|r| region_gamma(oriented, config, r))
        .collect()
}

fn p1_gamma(graph: &DomainGraph, region: RegionId) -> f64 {
    if region == EXTERIOR {
        1.0
    } else {
        1.0 / graph.epsilon(region)
    }
}

fn region_gamma(graph: &DomainGraph, config: &BieConfig, r: RegionId) -> Result<Option<f64>> {
    if r == EXTERIOR {
        return match config.patterns[0] {
            Pattern::P1 => Ok(Some(1.0)),
            p => Err(Error::Config(format!("region 1 has a fixed coefficient, cannot use {p}"))),
        };
    }
    let outward = graph.outward_positions(r);
    let pattern = config.patterns[r - 1];
    let Some((k, l)) = pattern.reference() else {
        return Ok((!outward.is_empty()).then(|| p1_gamma(graph, r)));
    };
    if outward.len() != 1 {
        return Err(Error::Config(format!(
            "region {r} has {} outward interfaces, {pattern} needs exactly one",
            outward.len()
        )));
    }
    let j = graph.interfaces()[outward[0]].to;
    if graph.position(k, l).is_none() {
        return Err(Error::Config(format!("reference pair ({k},{l}) is not an interface")));
    }
    if k != EXTERIOR && config.patterns.get(k - 1) != Some(&Pattern::P1) {
        return Err(Error::Config(format!(
            "reference pair ({k},{l}) of region {r}: region {k} does not use P1"
        )));
    }
    // λ of the reference pair divided by α₁²/4.
    let shift = p1_gamma(graph, k) * graph.epsilon(l);
    let target = 1.0 + shift;
    let (ei, ej) = (graph.epsilon(r), graph.epsilon(j));
    let g = match pattern {
        Pattern::P2 { .. } => shift / ej,
        // positive root of ε_i² γ² + ε_j γ − t, in the cancellation-free form
        _ => 2.0 * target / (ej + (ej * ej + 4.0 * ei * ei * target).sqrt()),
    };
    Ok(Some(g))
}

/// `γ` of the region owning the Burton–Miller equation on oriented interface `index`.
pub fn gamma_for_pattern(base: &DomainGraph, config: &BieConfig, index: usize) -> Result<f64> {
    let oriented = config.oriented(base)?;
    let from = oriented.interface(index)?.from;
    Ok(region_gamma(&oriented, config, from)?.expect("the source region has an outward interface"))
}

/// Accumulation points of `A²` for an oriented graph and its `γ` values.
pub fn cluster_report(oriented: &DomainGraph, gammas: &[Option<f64>]) -> Result<ClusterReport> {
    let a1 = oriented.alpha1();
    let q = a1 * a1 / 4.0;
    let n = oriented.len();
    let mut lambdas = vec![C64::default(); 2 * n];
    for (b, iface) in oriented.interfaces().iter().enumerate() {
        let g = gammas
            .get(iface.from - 1)
            .copied()
            .flatten()
            .ok_or(Error::MissingAlpha(iface.from))?;
        let (ei, ej) = (oriented.epsilon(iface.from), oriented.epsilon(iface.to));
        let gi = g * ei;
        lambdas[b] = q * (1.0 + g * ej);
        lambdas[b + n] = q * (gi * gi + g * ej);
    }
    ClusterReport::from_lambdas(lambdas)
}

/// Predicted clusters of `A²` for `config` applied to `base`.
pub fn accumulation_points(base: &DomainGraph, config: &BieConfig) -> Result<ClusterReport> {
    let oriented = config.oriented(base)?;
    let g = gammas(&oriented, config)?;
    cluster_report(&oriented, &g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// A non-P1 pattern on a region whose normals point into two or more regions.
    C1 { region: RegionId },
    /// `ε_region` appears in `γ_tuned` but `region` does not use P1.
    C2 { region: RegionId, tuned: RegionId },
    /// Missing reference pair or a reference region not fixed by P1.
    Reference { region: RegionId, reference: (RegionId, RegionId) },
    /// A pattern on a region that owns no Burton–Miller equation.
    NoEquation { region: RegionId },
    ExteriorFlip { interface: usize },
    Shape { detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::C1 { region } => write!(f, "C1: region {region} has several outward neighbours and must use P1"),
            Violation::C2 { region, tuned } => {
                write!(f, "C2: eps_{region} appears in gamma_{tuned}, so region {region} must use P1")
            }
            Violation::Reference { region, reference: (k, l) } => {
                write!(f, "region {region}: reference ({k},{l}) is not a P1 pair of this orientation")
            }
            Violation::NoEquation { region } => write!(f, "region {region} owns no tunable Burton-Miller equation"),
            Violation::ExteriorFlip { interface } => write!(f, "exterior interface {interface} cannot be flipped"),
            Violation::Shape { detail } => write!(f, "{detail}"),
        }
    }
}

/// All constraint violations of `config` on `base`. Empty iff admissible.
pub fn check_constraints(base: &DomainGraph, config: &BieConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let m = base.num_regions();
    if config.flips.len() != base.len() || config.patterns.len() != m {
        out.push(Violation::Shape {
            detail: format!(
                "config has {} flips and {} patterns for {} interfaces and {m} regions",
                config.flips.len(),
                config.patterns.len(),
                base.len()
            ),
        });
        return out;
    }
    for (b, iface) in base.interfaces().iter().enumerate() {
        if config.flips[b] && iface.is_exterior() {
            out.push(Violation::ExteriorFlip { interface: b });
        }
    }
    if !out.is_empty() {
        return out;
    }
    let oriented = config.oriented(base).expect("flips checked above");
    let pattern = |r: RegionId| config.patterns[r - 1];
    let has_equation = |r: RegionId| !oriented.outward_positions(r).is_empty();
    if pattern(EXTERIOR) != Pattern::P1 {
        out.push(Violation::NoEquation { region: EXTERIOR });
    }
    for r in 2..=m {
        let Some((k, l)) = pattern(r).reference() else {
            continue;
        };
        let outward = oriented.outward_positions(r);
        match outward.len() {
            0 => {
                out.push(Violation::NoEquation { region: r });
                continue;
            }
            1 => {}
            _ => {
                out.push(Violation::C1 { region: r });
                continue;
            }
        }
        let s = oriented.interfaces()[outward[0]].to;
        let ref_ok = k >= 1
            && k <= m
            && l >= 1
            && l <= m
            && oriented.position(k, l).is_some()
            && (k == EXTERIOR || pattern(k) == Pattern::P1);
        if !ref_ok {
            out.push(Violation::Reference { region: r, reference: (k, l) });
            continue;
        }
        let mut appearing: BTreeSet<RegionId> = [k, l, s].into_iter().collect();
        if matches!(pattern(r), Pattern::P3 { .. }) {
            appearing.insert(r);
        }
        for t in appearing {
            if t != s && t != r && t != EXTERIOR && has_equation(t) && pattern(t) != Pattern::P1 {
                out.push(Violation::C2 { region: t, tuned: r });
            }
        }
    }
    out
}
