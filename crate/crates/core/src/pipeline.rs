//! Solve modes and the runs built on them: one solve, one spectrum, a sweep.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_rhs, assemble_system, Density, Formulation, Precision, SystemMatrix};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::oracle::{eval_analytic, l2_error, series_coefficients, SeriesSolution, DEFAULT_N_MAX};
use crate::problem::Problem;
use crate::scene::EXTERIOR;
use crate::solver::gmres;
use crate::spectral::{
    check_constraints, cluster_report, gammas, jacobi_diagonal, squared, system_eigenvalues, tune, BieConfig,
    ClusterReport, JacobiDiagonal,
};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `α_r = 0` for `r ≠ 1`, Burton–Miller rows first.
    Conventional,
    /// P1 everywhere, base orientation.
    Calderon,
    /// Tuned orientation and patterns.
    Param,
    /// P1 everywhere with the point-Jacobi diagonal.
    Jacobi,
    /// Tuned configuration with the point-Jacobi diagonal.
    Ppm,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Conventional, Mode::Calderon, Mode::Param, Mode::Jacobi, Mode::Ppm];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Conventional => "conventional",
            Mode::Calderon => "calderon",
            Mode::Param => "param",
            Mode::Jacobi => "jacobi",
            Mode::Ppm => "ppm",
        }
    }

    pub fn tuned(self) -> bool {
        matches!(self, Mode::Param | Mode::Ppm)
    }

    pub fn preconditioned(self) -> bool {
        matches!(self, Mode::Jacobi | Mode::Ppm)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: Mode,
    pub tol: f64,
    pub max_iter: usize,
    pub precision: Precision,
    /// Replaces the default or tuned configuration in every mode but conventional.
    pub force_config: Option<BieConfig>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Calderon,
            tol: 1e-5,
            max_iter: 2000,
            precision: Precision::default(),
            force_config: None,
        }
    }
}

/// A problem oriented and parametrised for one mode.
#[derive(Debug, Clone)]
pub struct Setup {
    pub mode: Mode,
    /// With the configuration's flips applied.
    pub problem: Problem,
    pub formulation: Formulation,
    pub config: Option<BieConfig>,
    pub notation: Option<String>,
    pub clusters: Option<ClusterReport>,
    pub jacobi: Option<JacobiDiagonal>,
}

pub fn prepare(problem: &Problem, mode: Mode, force: Option<&BieConfig>) -> Result<Setup> {
    if mode == Mode::Conventional {
        if force.is_some() {
            return Err(Error::InvalidArgument(
                "a forced configuration does not apply to conventional mode".into(),
            ));
        }
        return Ok(Setup {
            mode,
            problem: problem.clone(),
            formulation: Formulation::conventional(&problem.graph),
            config: None,
            notation: None,
            clusters: None,
            jacobi: None,
        });
    }
    let base = &problem.graph;
    let config = match force {
        Some(c) => {
            let v = check_constraints(base, c);
            if !v.is_empty() {
                let msg: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                return Err(Error::Config(msg.join("; ")));
            }
            c.clone()
        }
        None if mode.tuned() => tune(base)?.config,
        None => BieConfig::identity(base),
    };
    let mut oriented = problem.clone();
    for (b, _) in config.flips.iter().enumerate().filter(|(_, f)| **f) {
        oriented = oriented.flipped(b)?;
    }
    let g = gammas(&oriented.graph, &config)?;
    let formulation = Formulation::calderon(&oriented.graph, &g)?;
    let clusters = cluster_report(&oriented.graph, &g)?;
    let jacobi = if mode.preconditioned() {
        Some(jacobi_diagonal(&clusters)?)
    } else {
        None
    };
    Ok(Setup {
        mode,
        notation: Some(config.to_notation(base)?),
        problem: oriented,
        formulation,
        config: Some(config),
        clusters: Some(clusters),
        jacobi,
    })
}

impl Setup {
    pub fn assemble(&self, precision: Precision) -> Result<SystemMatrix> {
        assemble_system(&self.problem.graph, &self.problem.elements(), &self.formulation, precision)
    }

    /// Per-column `M⁻¹`, if this mode uses it.
    pub fn column_scale(&self, sys: &SystemMatrix) -> Result<Option<Vec<C64>>> {
        self.jacobi.as_ref().map(|j| j.expand(sys.map())).transpose()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutcome {
    pub mode: Mode,
    pub config: Option<String>,
    pub clusters: Option<ClusterReport>,
    pub jacobi: Option<JacobiDiagonal>,
    pub num_elements: usize,
    pub dim: usize,
    pub single_precision: bool,
    pub iterations: usize,
    pub converged: bool,
    pub true_residual: f64,
    pub residual_history: Vec<f64>,
    /// Relative ℓ₂ error of `u` at the collocation points, when a series solution exists.
    pub l2_error: Option<f64>,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    /// `u` at every collocation point, interface by interface.
    #[serde(skip)]
    pub u: Vec<Vec<C64>>,
}

/// Series solution matching a concentric-spheres problem, if it is one.
pub fn series_for(problem: &Problem) -> Result<Option<SeriesSolution>> {
    let Some(s) = problem.spheres else {
        return Ok(None);
    };
    let g = &problem.graph;
    let eps = [g.epsilon(1), g.epsilon(2), g.epsilon(3)];
    Ok(Some(
        series_coefficients(g.omega(), eps, s.r_inner, s.r_outer, DEFAULT_N_MAX)?.with_direction(problem.direction)?,
    ))
}

/// Series values at the centroids of each interface, pushed radially onto
/// the exact sphere.
pub fn reference_values(problem: &Problem, series: &SeriesSolution) -> Vec<Vec<C64>> {
    problem
        .graph
        .interfaces()
        .iter()
        .zip(&problem.patches)
        .map(|(iface, mesh)| {
            let radius = if iface.touches(EXTERIOR) {
                series.r_outer
            } else {
                series.r_inner
            };
            mesh.elements()
                .iter()
                .map(|e| {
                    let c: Vec3 = e.centroid;
                    eval_analytic(series, c * (radius / c.norm()))
                })
                .collect()
        })
        .collect()
}

pub fn run_solve(problem: &Problem, opts: &SolveOptions) -> Result<SolveOutcome> {
    let setup = prepare(problem, opts.mode, opts.force_config.as_ref())?;
    let t0 = Instant::now();
    let sys = setup.assemble(opts.precision)?;
    let elements = setup.problem.elements();
    let rhs = assemble_rhs(&setup.problem.graph, &elements, sys.map(), setup.problem.direction)?;
    let assembly_seconds = t0.elapsed().as_secs_f64();
    let scale = setup.column_scale(&sys)?;
    let t1 = Instant::now();
    let report = gmres(&sys, &rhs, scale.as_deref(), opts.tol, opts.max_iter)?;
    let solve_seconds = t1.elapsed().as_secs_f64();

    let map = sys.map();
    let u: Vec<Vec<C64>> = (0..map.num_interfaces())
        .map(|b| report.solution[map.range(map.col_block_of(Density::U, b))].to_vec())
        .collect();
    let l2 = match series_for(&setup.problem)? {
        Some(series) => {
            let reference: Vec<C64> = reference_values(&setup.problem, &series).concat();
            Some(l2_error(&u.concat(), &reference)?)
        }
        None => None,
    };
    Ok(SolveOutcome {
        mode: opts.mode,
        config: setup.notation,
        clusters: setup.clusters,
        jacobi: setup.jacobi,
        num_elements: problem.num_elements(),
        dim: sys.dim(),
        single_precision: sys.is_single_precision(),
        iterations: report.iterations,
        converged: report.converged,
        true_residual: report.true_residual,
        residual_history: report.residual_history,
        l2_error: l2,
        assembly_seconds,
        solve_seconds,
        u,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumOutcome {
    pub mode: Mode,
    pub config: Option<String>,
    /// Squared eigenvalues of `A` (or `A M⁻¹`).
    #[serde(skip)]
    pub squared_eigenvalues: Vec<C64>,
    /// Predicted accumulation points of the same operator.
    pub predicted: Vec<C64>,
    pub dim: usize,
}

pub fn spectrum(problem: &Problem, mode: Mode, force: Option<&BieConfig>) -> Result<SpectrumOutcome> {
    let setup = prepare(problem, mode, force)?;
    let sys = setup.assemble(Precision::Double)?;
    let scale = setup.column_scale(&sys)?;
    let eigs = system_eigenvalues(&sys, scale.as_deref())?;
    let predicted = match (&setup.clusters, &setup.jacobi) {
        (Some(c), Some(j)) => c.preconditioned(j)?.distinct_points,
        (Some(c), None) => c.distinct_points.clone(),
        _ => Vec::new(),
    };
    Ok(SpectrumOutcome {
        mode,
        config: setup.notation,
        squared_eigenvalues: squared(&eigs),
        predicted,
        dim: sys.dim(),
    })
}

/// Swept quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Omega,
    /// `ε` of one region.
    Epsilon(usize),
}

impl FromStr for SweepParam {
    type Err = Error;

    /// `omega` or `epsN`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "omega" {
            return Ok(SweepParam::Omega);
        }
        s.strip_prefix("eps")
            .and_then(|r| r.parse().ok())
            .filter(|&r: &usize| r >= 1)
            .map(SweepParam::Epsilon)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown sweep parameter {s:?}, want omega or epsN")))
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepParam::Omega => f.write_str("omega"),
            SweepParam::Epsilon(r) => write!(f, "eps{r}"),
        }
    }
}

/// `ε_region = value^power` at every sweep point, e.g. `(2, −1)` for ε₂ = 1/ε₃.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepLink {
    pub region: usize,
    pub power: f64,
}

impl FromStr for SweepLink {
    type Err = Error;

    /// `REGION:POWER`, e.g. `2:-1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad link {s:?}, want REGION:POWER"));
        let (r, p) = s.split_once(':').ok_or_else(bad)?;
        let region: usize = r.parse().map_err(|_| bad())?;
        let power: f64 = p.parse().map_err(|_| bad())?;
        if region == 0 || !power.is_finite() {
            return Err(bad());
        }
        Ok(SweepLink { region, power })
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub links: Vec<SweepLink>,
    pub modes: Vec<Mode>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub mode: Mode,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub l2_error: Option<f64>,
    pub config: Option<String>,
    pub seconds: f64,
    pub error: Option<String>,
}

/// `problem` with the swept quantity and its links set to `value`.
pub fn sweep_point(problem: &Problem, param: SweepParam, links: &[SweepLink], value: f64) -> Result<Problem> {
    let mut eps = problem.graph.epsilons();
    let mut omega = problem.graph.omega();
    let mut set = |region: usize, v: f64| -> Result<()> {
        let slot = eps.get_mut(region.wrapping_sub(1)).ok_or(Error::UnknownRegion(region))?;
        *slot = v;
        Ok(())
    };
    match param {
        SweepParam::Omega => omega = value,
        SweepParam::Epsilon(r) => set(r, value)?,
    }
    for l in links {
        set(l.region, value.powf(l.power))?;
    }
    problem.with_epsilons(&eps)?.with_omega(omega)
}

/// One row per value and mode, in that order. Failures are recorded in the
/// row and the sweep carries on.
pub fn run_sweep(problem: &Problem, spec: &SweepSpec, opts: &SolveOptions) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for &value in &spec.values {
        for &mode in &spec.modes {
            let t = Instant::now();
            let outcome = sweep_point(problem, spec.param, &spec.links, value).and_then(|p| {
                run_solve(
                    &p,
                    &SolveOptions {
                        mode,
                        ..opts.clone()
                    },
                )
            });
            let seconds = t.elapsed().as_secs_f64();
            rows.push(match outcome {
                Ok(o) => SweepRow {
                    value,
                    mode,
                    iterations: Some(o.iterations),
                    converged: Some(o.converged),
                    l2_error: o.l2_error,
                    config: o.config,
                    seconds,
                    error: None,
                },
                Err(e) => SweepRow {
                    value,
                    mode,
                    iterations: None,
                    converged: None,
                    l2_error: None,
                    config: None,
                    seconds,
                    error: Some(e.to_string()),
                },
            });
        }
    }
    rows
}
