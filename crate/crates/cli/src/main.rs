use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use helm_bem_core::assembly::Precision;
use helm_bem_core::oracle::eval_analytic;
use helm_bem_core::pipeline::{
    run_solve, run_sweep, series_for, spectrum, Mode, SolveOptions, SweepLink, SweepParam, SweepSpec,
};
use helm_bem_core::problem::{Problem, SceneFile};
use helm_bem_core::spectral::{evaluate_all, tune, BieConfig};
use helm_bem_core::{Vec3, C64};

#[derive(Parser)]
#[command(name = "helm-bem", version, about = "Calderon-preconditioned Burton-Miller BEM for Helmholtz transmission problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the interface meshes of a scene as JSON.
    Mesh(MeshArgs),
    /// Assemble and solve one scene in one mode.
    Solve(SolveArgs),
    /// List every admissible configuration with its predicted clusters.
    Tune(TuneArgs),
    /// Squared eigenvalues of the assembled matrix and the predicted clusters.
    Spectrum(SpectrumArgs),
    /// Solve over a range of ω or one ε, for several modes.
    Sweep(SweepArgs),
    /// Series solution of a concentric-spheres scene at given points.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SceneArgs {
    /// Scene JSON file.
    #[arg(long)]
    scene: PathBuf,
    /// Mesh refinement level (sphere subdivisions, or log2 of cells per unit for boxes).
    #[arg(long, default_value_t = 2)]
    subdiv: u32,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Ppm)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    /// Configuration as JSON, as compact notation (e.g. "23:P3_12"), or @file.
    #[arg(long)]
    force_config: Option<String>,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Auto)]
    precision: PrecisionArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Conventional,
    Calderon,
    Param,
    Jacobi,
    Ppm,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Conventional => Mode::Conventional,
            ModeArg::Calderon => Mode::Calderon,
            ModeArg::Param => Mode::Param,
            ModeArg::Jacobi => Mode::Jacobi,
            ModeArg::Ppm => Mode::Ppm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Auto,
    Double,
    Single,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Precision {
        match p {
            PrecisionArg::Auto => Precision::default(),
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Single => Precision::Single,
        }
    }
}

#[derive(Args)]
struct MeshArgs {
    #[command(flatten)]
    scene: SceneArgs,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    scene: SceneArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    scene: SceneArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Calderon)]
    mode: ModeArg,
    #[arg(long)]
    force_config: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scene: SceneArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// `omega` or `epsN`.
    #[arg(long)]
    param: String,
    /// Explicit values, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["from", "to", "steps"])]
    values: Vec<f64>,
    #[arg(long, requires_all = ["to", "steps"])]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Tie another region's ε to the swept value as REGION:POWER, e.g. 2:-1.
    #[arg(long)]
    link: Vec<String>,
    /// Modes to run at every point; defaults to the --mode value.
    #[arg(long, value_enum, value_delimiter = ',')]
    modes: Vec<ModeArg>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    scene: PathBuf,
    /// CSV with columns x,y,z (header optional). Reads stdin when absent.
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Mesh(a) => cmd_mesh(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Tune(a) => cmd_tune(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

fn load_scene(path: &Path) -> Result<SceneFile> {
    SceneFile::load(path).with_context(|| format!("reading scene {}", path.display()))
}

fn load_problem(args: &SceneArgs) -> Result<Problem> {
    let scene = load_scene(&args.scene)?;
    Ok(Problem::from_scene(&scene, args.subdiv, args.scene.parent())?)
}

fn out_dir(out: &Option<PathBuf>) -> Result<PathBuf> {
    let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn read_force(text: &Option<String>, problem: &Problem) -> Result<Option<BieConfig>> {
    let Some(t) = text else {
        return Ok(None);
    };
    let body = match t.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => t.clone(),
    };
    Ok(Some(BieConfig::parse(&body, &problem.graph)?))
}

fn solve_options(a: &SolverArgs, problem: &Problem) -> Result<SolveOptions> {
    Ok(SolveOptions {
        mode: a.mode.into(),
        tol: a.tol,
        max_iter: a.max_iter,
        precision: a.precision.into(),
        force_config: read_force(&a.force_config, problem)?,
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn fmt_c(z: C64) -> String {
    // + 0.0 clears negative zeros
    format!("{:.6}{:+.6}i", z.re + 0.0, z.im + 0.0)
}

fn cmd_mesh(a: MeshArgs) -> Result<()> {
    let p = load_problem(&a.scene)?;
    let dir = out_dir(&a.scene.out)?;
    for (b, (iface, mesh)) in p.graph.interfaces().iter().zip(&p.patches).enumerate() {
        let path = dir.join(format!("mesh_{b}_{}_{}.json", iface.from, iface.to));
        mesh.save(&path)?;
        println!("interface {b} ({},{}): {} elements -> {}", iface.from, iface.to, mesh.len(), path.display());
    }
    println!("total {} elements", p.num_elements());
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let p = load_problem(&a.scene)?;
    let opts = solve_options(&a.solver, &p)?;
    let o = run_solve(&p, &opts)?;
    let dir = out_dir(&a.scene.out)?;
    write_json(&dir.join("report.json"), &o)?;
    let mut csv = String::from("iteration,residual\n");
    for (i, r) in o.residual_history.iter().enumerate() {
        csv += &format!("{i},{r}\n");
    }
    fs::write(dir.join("residuals.csv"), csv)?;
    println!(
        "mode {} config {} N {} iterations {} converged {} residual {:.3e}{}",
        o.mode,
        o.config.as_deref().unwrap_or("-"),
        o.num_elements,
        o.iterations,
        o.converged,
        o.true_residual,
        o.l2_error.map(|e| format!(" l2_error {e:.4e}")).unwrap_or_default()
    );
    Ok(())
}

#[derive(Serialize)]
struct TuneOutput<'a> {
    selected: &'a str,
    candidates: &'a [helm_bem_core::spectral::Candidate],
}

fn cmd_tune(a: TuneArgs) -> Result<()> {
    let scene = load_scene(&a.scene)?;
    let graph = scene.graph()?;
    let all = evaluate_all(&graph)?;
    let best = tune(&graph)?;
    println!("{:>4}  {:<48} {:>10}  points", "", "config", "max_ratio");
    for (i, c) in all.iter().enumerate() {
        let mark = if c.config == best.config { "*" } else { "" };
        let pts: Vec<String> = c.report.distinct_points.iter().map(|z| fmt_c(*z)).collect();
        let cfg = if c.notation.is_empty() { "(exterior only)" } else { &c.notation };
        println!("{mark:>1}{i:>3}  {cfg:<48} {:>10.6}  {}", c.report.max_ratio, pts.join(" "));
    }
    println!("{} configurations, selected: {}", all.len(), best.notation);
    if let Some(out) = &a.out {
        let dir = out_dir(&Some(out.clone()))?;
        write_json(
            &dir.join("tune.json"),
            &TuneOutput {
                selected: &best.notation,
                candidates: &all,
            },
        )?;
    }
    Ok(())
}

fn cmd_spectrum(a: SpectrumArgs) -> Result<()> {
    let p = load_problem(&a.scene)?;
    let force = read_force(&a.force_config, &p)?;
    let s = spectrum(&p, a.mode.into(), force.as_ref())?;
    let dir = out_dir(&a.scene.out)?;
    let mut csv = String::from("re,im\n");
    for z in &s.squared_eigenvalues {
        csv += &format!("{},{}\n", z.re, z.im);
    }
    fs::write(dir.join("spectrum.csv"), csv)?;
    write_json(&dir.join("clusters.json"), &s)?;
    let pts: Vec<String> = s.predicted.iter().map(|z| fmt_c(*z)).collect();
    println!("{} eigenvalues; predicted clusters: {}", s.squared_eigenvalues.len(), pts.join(" "));
    Ok(())
}

fn sweep_values(a: &SweepArgs) -> Result<Vec<f64>> {
    match (a.from, a.to, a.steps) {
        (Some(from), Some(to), Some(steps)) => Ok(match steps {
            0 => vec![],
            1 => vec![from],
            n => (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect(),
        }),
        (None, None, None) => Ok(a.values.clone()),
        _ => bail!("--from, --to and --steps go together"),
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let p = load_problem(&a.scene)?;
    let opts = solve_options(&a.solver, &p)?;
    let spec = SweepSpec {
        param: a.param.parse::<SweepParam>()?,
        values: sweep_values(&a)?,
        links: a.link.iter().map(|l| l.parse::<SweepLink>()).collect::<Result<_, _>>()?,
        modes: if a.modes.is_empty() {
            vec![opts.mode]
        } else {
            a.modes.iter().map(|&m| m.into()).collect()
        },
    };
    let rows = run_sweep(&p, &spec, &opts);
    let dir = out_dir(&a.scene.out)?;
    let mut csv = String::from("value,mode,iterations,converged,l2_error,config,seconds,error\n");
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in &rows {
        csv += &format!(
            "{},{},{},{},{},{},{:.3},{}\n",
            r.value,
            r.mode,
            opt(r.iterations.map(|v| v.to_string())),
            opt(r.converged.map(|v| v.to_string())),
            opt(r.l2_error.map(|v| v.to_string())),
            opt(r.config.clone()),
            r.seconds,
            opt(r.error.as_ref().map(|e| format!("\"{}\"", e.replace('"', "'")))),
        );
        println!(
            "{} = {:<10} {:<12} iterations {:>5} {}",
            spec.param,
            r.value,
            r.mode,
            opt(r.iterations.map(|v| v.to_string())),
            opt(r.error.clone())
        );
    }
    fs::write(dir.join("sweep.csv"), csv)?;
    Ok(())
}

fn parse_points(text: &str) -> Result<Vec<Vec3>> {
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 3 => pts.push(Vec3::new(v[0], v[1], v[2])),
            Err(_) if i == 0 => continue,
            _ => bail!("line {}: expected x,y,z", i + 1),
        }
    }
    Ok(pts)
}

fn cmd_oracle(a: OracleArgs) -> Result<()> {
    let scene = load_scene(&a.scene)?;
    let p = Problem::from_scene(&scene, 0, a.scene.parent())?;
    let Some(series) = series_for(&p)? else {
        bail!("the series solution needs a concentric-spheres scene");
    };
    let text = match &a.points {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        None => std::io::read_to_string(std::io::stdin())?,
    };
    let mut csv = String::from("x,y,z,re,im\n");
    for x in parse_points(&text)? {
        let u = eval_analytic(&series, x);
        csv += &format!("{},{},{},{},{}\n", x.x, x.y, x.z, u.re, u.im);
    }
    match &a.out {
        Some(dir) => {
            let dir = out_dir(&Some(dir.clone()))?;
            fs::write(dir.join("oracle.csv"), csv)?;
        }
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}
