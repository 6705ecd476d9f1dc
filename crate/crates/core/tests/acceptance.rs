//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! `HELM_ACCEPTANCE_ONLY=1,2,7` runs a subset. With `HELM_ACCEPTANCE_STRICT=1`
//! any FAIL makes the process exit non-zero.

use std::collections::BTreeSet;
use std::time::Instant;

use faer::linalg::solvers::Solve;
use faer::Mat;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use helm_bem_core::assembly::{BlockPlan, Density, EquationKind, Formulation};
use helm_bem_core::kernels::KernelKind;
use helm_bem_core::oracle::{
    series_coefficients, spherical_j_with_derivative, spherical_y, DEFAULT_N_MAX,
};
use helm_bem_core::pipeline::{run_solve, spectrum, Mode, SolveOptions, SolveOutcome};
use helm_bem_core::problem::build_scene_spheres;
use helm_bem_core::solver::gmres;
use helm_bem_core::spectral::{
    accumulation_points, check_constraints, cluster_report, enumerate_configs, fraction_within, gammas, BieConfig,
    Pattern,
};
use helm_bem_core::{DomainGraph, Vec3, C64};

/// Radius capturing 70% of the squared eigenvalues at 320 elements per
/// sphere (measured: 0.13291).
const R_STAR: f64 = 0.133;

const FOUR_BOXES: [(usize, usize); 10] =
    [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (3, 4), (4, 5), (5, 2), (5, 3)];

const REFERENCE_ROWS: [&str; 12] = [
    "23:P1 24:P1 34:P2_12 45:P2_52 52:P1 53:P1",
    "23:P1 24:P1 43:P3_14 54:P1 52:P1 35:P2_12",
    "23:P1 24:P1 43:P2_23 54:P1 52:P1 35:P2_12",
    "32:P2_12 24:P1 43:P1 45:P1 25:P1 53:P2_43",
    "32:P2_12 24:P1 43:P1 45:P1 25:P1 53:P3_15",
    "32:P2_12 42:P1 43:P1 45:P1 25:P2_12 53:P3_15",
    "32:P2_12 42:P1 43:P1 45:P1 25:P2_12 53:P3_45",
    "23:P1 42:P2_12 34:P1 54:P3_15 25:P1 35:P1",
    "23:P1 42:P2_12 34:P1 54:P2_34 25:P1 35:P1",
    "23:P1 24:P1 34:P2_24 45:P2_12 52:P1 53:P1",
    "23:P1 24:P1 43:P2_12 54:P2_24 25:P1 35:P3_12",
    "23:P1 24:P1 43:P2_12 54:P2_14 25:P1 35:P3_12",
];

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

fn spheres_graph(eps: [f64; 3], omega: f64) -> DomainGraph {
    DomainGraph::from_pairs(&eps, &[(1, 2), (3, 2)], omega).unwrap()
}

// 1
fn cluster_formula_exactness() -> Outcome {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let structures: Vec<(Vec<(usize, usize)>, Vec<BieConfig>)> = [&[(1, 2), (3, 2)][..], &FOUR_BOXES[..]]
        .iter()
        .map(|pairs| {
            let g = DomainGraph::from_pairs(&vec![1.0; count_regions(pairs)], pairs, 1.0).unwrap();
            (pairs.to_vec(), enumerate_configs(&g))
        })
        .collect();
    let (mut worst, mut checks) = (0.0f64, 0usize);
    for _ in 0..1000 {
        let (pairs, configs) = &structures[rng.gen_range(0..structures.len())];
        let n_reg = count_regions(pairs);
        let mut eps = vec![1.0];
        eps.extend((1..n_reg).map(|_| 10f64.powf(rng.gen_range(-1.5..1.5))));
        let omega = rng.gen_range(0.1..5.0);
        let base = DomainGraph::from_pairs(&eps, pairs, omega).unwrap();
        let cfg = &configs[rng.gen_range(0..configs.len())];
        if !check_constraints(&base, cfg).is_empty() {
            return Err(format!("enumerated config {} violates constraints", cfg.to_notation(&base).unwrap()));
        }
        let oriented = cfg.oriented(&base).unwrap();
        let lam = cluster_report(&oriented, &gammas(&oriented, cfg).unwrap()).unwrap().lambdas;
        let nb = oriented.len();
        for r in 1..=n_reg {
            let outs = oriented.outward_positions(r);
            match cfg.patterns[r - 1] {
                Pattern::P1 => {
                    for b in outs {
                        worst = worst.max(rel(lam[b], lam[b + nb]));
                        checks += 1;
                    }
                }
                Pattern::P2 { reference: (k, l) } => {
                    let j = oriented.position(k, l).unwrap();
                    worst = worst.max(rel(lam[outs[0]], lam[j]));
                    checks += 1;
                }
                Pattern::P3 { reference: (k, l) } => {
                    let j = oriented.position(k, l).unwrap();
                    worst = worst.max(rel(lam[outs[0] + nb], lam[j]));
                    checks += 1;
                }
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    check(
        worst <= 1e-12 && secs < 1.0,
        format!("{checks} identities over 1000 draws, worst relative gap {worst:.2e}, {secs:.3}s"),
    )
}

fn count_regions(pairs: &[(usize, usize)]) -> usize {
    pairs.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(1)
}

// 2
fn reference_values() -> Outcome {
    let t = Instant::now();
    let close = |pts: &[C64], v: f64| pts.iter().any(|p| (p.re - v).abs() <= 5e-5 * v.abs() && p.im.abs() <= 5e-5);
    let g = spheres_graph([1.0, 2.0, 3.0], 1.0);
    let a = accumulation_points(&g, &BieConfig::identity(&g)).unwrap().distinct_points;
    let g2 = spheres_graph([1.0, 4.0, 10.0], 1.0);
    let b = accumulation_points(&g2, &BieConfig::identity(&g2)).unwrap().distinct_points;
    let c = accumulation_points(&g2, &BieConfig::from_notation("23:P3_12", &g2).unwrap())
        .unwrap()
        .distinct_points;
    let ok = a.len() == 2
        && close(&a, -0.75)
        && close(&a, -0.41667)
        && b.len() == 2
        && close(&b, -1.25)
        && close(&b, -0.35)
        && close(&c, -1.0698);
    let secs = t.elapsed().as_secs_f64();
    let show = |v: &[C64]| v.iter().map(|z| format!("{:.5}", z.re)).collect::<Vec<_>>().join(", ");
    check(
        ok && secs < 1.0,
        format!("{{{}}}, {{{}}}, {{{}}}, {secs:.3}s", show(&a), show(&b), show(&c)),
    )
}

// 3
fn spectrum_clustering() -> Outcome {
    let t = Instant::now();
    let mut fractions = Vec::new();
    for level in [2, 3] {
        let p = build_scene_spheres(0.5, 1.0, level, [1.0, 2.0, 3.0], 1.0).unwrap();
        let s = spectrum(&p, Mode::Calderon, None).map_err(|e| e.to_string())?;
        fractions.push((p.patches[0].len(), fraction_within(&s.squared_eigenvalues, &s.predicted, R_STAR)));
    }
    let ok = fractions[0].1 >= 0.70 && fractions[1].1 > fractions[0].1;
    check(
        ok,
        format!(
            "r* = {R_STAR}: {:.1}% at {} per sphere, {:.1}% at {} per sphere, {:.0}s",
            100.0 * fractions[0].1,
            fractions[0].0,
            100.0 * fractions[1].1,
            fractions[1].0,
            t.elapsed().as_secs_f64()
        ),
    )
}

fn solve_spheres(level: u32, eps: [f64; 3], mode: Mode) -> Result<SolveOutcome, String> {
    let p = build_scene_spheres(0.5, 1.0, level, eps, 5.0).map_err(|e| e.to_string())?;
    let opts = SolveOptions {
        mode,
        ..SolveOptions::default()
    };
    let o = run_solve(&p, &opts).map_err(|e| e.to_string())?;
    println!(
        "      level {level} N={} {mode}: {} iterations, l2 error {:.4e}, {:.0}s",
        o.num_elements,
        o.iterations,
        o.l2_error.unwrap_or(f64::NAN),
        o.assembly_seconds + o.solve_seconds
    );
    Ok(o)
}

struct Convergence {
    errors: [[f64; 3]; 2],
    iterations: [[usize; 3]; 2],
    converged: bool,
}

fn convergence_runs() -> Result<Convergence, String> {
    let mut c = Convergence {
        errors: [[0.0; 3]; 2],
        iterations: [[0; 3]; 2],
        converged: true,
    };
    for (l, level) in [2, 3, 4].into_iter().enumerate() {
        for (m, mode) in [Mode::Conventional, Mode::Calderon].into_iter().enumerate() {
            let o = solve_spheres(level, [1.0, 2.0, 3.0], mode)?;
            c.errors[m][l] = o.l2_error.unwrap_or(f64::NAN);
            c.iterations[m][l] = o.iterations;
            c.converged &= o.converged;
        }
    }
    Ok(c)
}

// 4
fn accuracy_convergence(c: &Convergence) -> Outcome {
    let [conv, cald] = c.errors;
    let decreasing = |e: [f64; 3]| e[0] > e[1] && e[1] > e[2];
    let within = (0..3).all(|l| conv[l].max(cald[l]) <= 3.0 * conv[l].min(cald[l]));
    check(
        c.converged && decreasing(conv) && decreasing(cald) && within,
        format!("conventional {conv:.4?}, calderon {cald:.4?}"),
    )
}

// 5
fn iteration_flatness(c: &Convergence) -> Outcome {
    let [conv, cald] = c.iterations;
    let spread = *cald.iter().max().unwrap() as f64 / *cald.iter().min().unwrap() as f64;
    let growth = conv[2] as f64 / conv[0] as f64;
    check(
        c.converged && spread <= 1.5 && growth > 1.5,
        format!("calderon {cald:?} (spread {spread:.2}), conventional {conv:?} (growth {growth:.2})"),
    )
}

// 6
fn preconditioner_benefit() -> Outcome {
    let mut it = Vec::new();
    for mode in [Mode::Calderon, Mode::Jacobi, Mode::Ppm] {
        let o = solve_spheres(3, [1.0, 0.1, 10.0], mode)?;
        if !o.converged {
            return Err(format!("{mode} did not converge"));
        }
        it.push(o.iterations);
    }
    check(
        it[1] < it[0] && it[2] <= it[1],
        format!("calderon {}, jacobi {}, ppm {}", it[0], it[1], it[2]),
    )
}

// 7
fn tuner_enumeration() -> Outcome {
    let t = Instant::now();
    let g = spheres_graph([1.0, 0.1, 10.0], 5.0);
    let n_spheres = enumerate_configs(&g).len();
    let g4 = DomainGraph::from_pairs(&[1.0, 2.0, 3.0, 4.0, 5.0], &FOUR_BOXES, 1.0).unwrap();
    let all: BTreeSet<String> = enumerate_configs(&g4).iter().map(|c| c.to_notation(&g4).unwrap()).collect();
    let found = REFERENCE_ROWS
        .iter()
        .filter(|row| {
            BieConfig::from_notation(row, &g4)
                .and_then(|c| c.to_notation(&g4))
                .is_ok_and(|n| all.contains(&n))
        })
        .count();
    let secs = t.elapsed().as_secs_f64();
    check(
        n_spheres == 6 && found == 12 && secs < 1.0,
        format!("spheres {n_spheres}, four boxes {} configs containing {found}/12 rows, {secs:.3}s", all.len()),
    )
}

// 8
fn gmres_suite() -> Outcome {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(8);
    let mut rc = move || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut fails = Vec::new();

    let n = 30;
    let b: Vec<C64> = (0..n).map(|_| rc()).collect();
    let id = Mat::<C64>::identity(n, n);
    let r = gmres(&id, &b, None, 1e-12, 100).map_err(|e| e.to_string())?;
    if r.iterations != 1 {
        fails.push(format!("identity took {}", r.iterations));
    }

    let values = [C64::new(1.0, 0.0), C64::new(2.0, 1.0), C64::new(-3.0, 0.5), C64::new(0.5, -2.0)];
    let diag = Mat::<C64>::from_fn(n, n, |i, j| if i == j { values[i % values.len()] } else { C64::default() });
    let r = gmres(&diag, &b, None, 1e-12, 100).map_err(|e| e.to_string())?;
    if r.iterations > values.len() {
        fails.push(format!("diagonal with {} values took {}", values.len(), r.iterations));
    }

    let n = 50;
    let a = Mat::<C64>::from_fn(n, n, |i, j| rc() * 0.3 + if i == j { C64::new(4.0, 1.0) } else { C64::default() });
    let b: Vec<C64> = (0..n).map(|_| rc()).collect();
    let r = gmres(&a, &b, None, 1e-14, 200).map_err(|e| e.to_string())?;
    let mut x = Mat::<C64>::from_fn(n, 1, |i, _| b[i]);
    a.partial_piv_lu().solve_in_place(&mut x);
    let err = (0..n).map(|i| (r.solution[i] - x[(i, 0)]).norm_sqr()).sum::<f64>().sqrt()
        / (0..n).map(|i| x[(i, 0)].norm_sqr()).sum::<f64>().sqrt();
    if err > 1e-10 {
        fails.push(format!("random 50x50 off by {err:.2e}"));
    }
    if !r.residual_history.windows(2).all(|w| w[1] <= w[0]) {
        fails.push("residual history increases".into());
    }
    let secs = t.elapsed().as_secs_f64();
    if secs >= 1.0 {
        fails.push(format!("took {secs:.2}s"));
    }
    if fails.is_empty() {
        Ok(format!("random 50x50 relative error {err:.2e}, {secs:.3}s"))
    } else {
        Err(fails.join("; "))
    }
}

// 9
fn oracle_self_consistency() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let eps = [1.0, 2.0, 3.0];
    let s = series_coefficients(5.0, eps, 0.5, 1.0, DEFAULT_N_MAX)
        .and_then(|s| s.with_direction(Vec3::new(0.0, 1.0, 0.0)))
        .map_err(|e| e.to_string())?;
    let mut bc = 0.0f64;
    for (radius, (a, b)) in [(1.0, (1, 2)), (0.5, (2, 3))] {
        let (mut du, mut dw, mut nu, mut nw) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..100 {
            let x = random_on_sphere(&mut rng, radius);
            let (ua, da) = s.eval_region(a, x);
            let (ub, db) = s.eval_region(b, x);
            let (wa, wb) = (da / eps[a - 1], db / eps[b - 1]);
            du = du.max((ua - ub).norm());
            dw = dw.max((wa - wb).norm());
            nu = nu.max(ua.norm());
            nw = nw.max(wa.norm());
        }
        bc = bc.max(du / nu).max(dw / nw);
    }

    let mut wr = 0.0f64;
    for i in 0..=100 {
        let x = 0.1 * 500f64.powf(i as f64 / 100.0);
        let (j, dj) = spherical_j_with_derivative(50, x);
        let y = spherical_y(51, x);
        for n in 0..=50 {
            // y'ₙ = (n/x) yₙ − yₙ₊₁
            let dy = n as f64 / x * y[n] - y[n + 1];
            let w = j[n] * dy - dj[n] * y[n];
            let want = 1.0 / (x * x);
            wr = wr.max((w - want).abs() / want);
        }
    }

    let h = series_coefficients(5.0, [1.0, 1.0, 1.0], 0.5, 1.0, DEFAULT_N_MAX).map_err(|e| e.to_string())?;
    let mut hom = 0.0f64;
    for _ in 0..200 {
        let x = Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (u, _) = h.eval_region(h.region_of(x), x);
        let inc = C64::new(0.0, 5.0 * x.z).exp();
        hom = hom.max((u - inc).norm());
    }
    check(
        bc <= 1e-8 && wr <= 1e-10 && hom <= 1e-12,
        format!("interface residual {bc:.2e}, Wronskian {wr:.2e}, homogeneous {hom:.2e}"),
    )
}

fn random_on_sphere(rng: &mut impl Rng, r: f64) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v * (r / n);
        }
    }
}

// 10
fn block_structure() -> Outcome {
    use Density::{U, W};
    use EquationKind::{BurtonMiller as Bm, Standard as Std};
    use KernelKind::{DStar as Ds, D, N, S};

    let e = [0.0, 1.0, 2.0, 3.0, 5.0];
    let g = DomainGraph::from_pairs(&e[1..], &[(1, 2), (1, 3), (3, 2), (4, 3)], 1.0).unwrap();
    let a1 = g.alpha1();
    let (a3, a4) = (a1 * 0.7, a1 * 0.3);
    let f = Formulation::calderon(&g, &[None, None, Some(0.7), Some(0.3)]).unwrap();
    let plan = BlockPlan::build(&g, vec![1; 4], &f).unwrap();
    let (h, z) = (C64::new(0.5, 0.0), C64::default());
    let one = C64::new(1.0, 0.0);

    // Interfaces: 0 = Γ12, 1 = Γ13, 2 = Γ32, 3 = Γ43.
    // (row, column, free term, [(op, region, coefficient)])
    type Cell = (EquationKind, usize, Density, usize, C64, Vec<(KernelKind, usize, C64)>);
    let mut table: Vec<Cell> = vec![
        (Std, 0, U, 0, -a1 * h, vec![(D, 2, a1)]),
        (Std, 0, U, 2, z, vec![(D, 2, a1)]),
        (Std, 0, W, 0, z, vec![(S, 2, -a1 * e[2])]),
        (Std, 0, W, 2, z, vec![(S, 2, -a1 * e[2])]),
        (Std, 1, U, 1, -a1 * h, vec![(D, 3, a1)]),
        (Std, 1, U, 2, z, vec![(D, 3, -a1)]),
        (Std, 1, U, 3, z, vec![(D, 3, a1)]),
        (Std, 1, W, 1, z, vec![(S, 3, -a1 * e[3])]),
        (Std, 1, W, 2, z, vec![(S, 3, a1 * e[3])]),
        (Std, 1, W, 3, z, vec![(S, 3, -a1 * e[3])]),
        (Std, 2, U, 0, z, vec![(D, 2, a1)]),
        (Std, 2, U, 2, -a1 * h, vec![(D, 2, a1)]),
        (Std, 2, W, 0, z, vec![(S, 2, -a1 * e[2])]),
        (Std, 2, W, 2, z, vec![(S, 2, -a1 * e[2])]),
        (Std, 3, U, 1, z, vec![(D, 3, a1)]),
        (Std, 3, U, 2, z, vec![(D, 3, -a1)]),
        (Std, 3, U, 3, -a1 * h, vec![(D, 3, a1)]),
        (Std, 3, W, 1, z, vec![(S, 3, -a1 * e[3])]),
        (Std, 3, W, 2, z, vec![(S, 3, a1 * e[3])]),
        (Std, 3, W, 3, z, vec![(S, 3, -a1 * e[3])]),
    ];
    // W = D + αN and V = S + αD*; a term `c·W` or `c·V` expands to two.
    let w = |c: C64, r: usize, alpha: C64| vec![(D, r, c), (N, r, c * alpha)];
    let v = |c: C64, r: usize, alpha: C64| vec![(S, r, c), (Ds, r, c * alpha)];
    table.extend([
        (Bm, 0, U, 0, h, w(one, 1, a1)),
        (Bm, 0, U, 1, z, w(one, 1, a1)),
        (Bm, 0, W, 0, e[1] * a1 * h, v(-one * e[1], 1, a1)),
        (Bm, 0, W, 1, z, v(-one * e[1], 1, a1)),
        (Bm, 1, U, 0, z, w(one, 1, a1)),
        (Bm, 1, U, 1, h, w(one, 1, a1)),
        (Bm, 1, W, 0, z, v(-one * e[1], 1, a1)),
        (Bm, 1, W, 1, e[1] * a1 * h, v(-one * e[1], 1, a1)),
        (Bm, 2, U, 1, z, w(-one, 3, a3)),
        (Bm, 2, U, 2, h, w(one, 3, a3)),
        (Bm, 2, U, 3, z, w(-one, 3, a3)),
        (Bm, 2, W, 1, z, v(one * e[3], 3, a3)),
        (Bm, 2, W, 2, e[3] * a3 * h, v(-one * e[3], 3, a3)),
        (Bm, 2, W, 3, z, v(one * e[3], 3, a3)),
        (Bm, 3, U, 3, h, w(one, 4, a4)),
        (Bm, 3, W, 3, e[4] * a4 * h, v(-one * e[4], 4, a4)),
    ]);

    let map = &plan.map;
    let mut expected = vec![None; map.num_blocks() * map.num_blocks()];
    for (kind, row, dens, col, free, terms) in &table {
        let idx = map.row_block_of(*kind, *row) * map.num_blocks() + map.col_block_of(*dens, *col);
        expected[idx] = Some((*free, terms.clone()));
    }
    let mut mismatches = Vec::new();
    for br in 0..map.num_blocks() {
        for bc in 0..map.num_blocks() {
            let got = plan.entry(br, bc);
            let tag = format!("{:?} / {:?}", map.row_block(br), map.col_block(bc));
            match &expected[br * map.num_blocks() + bc] {
                None if !got.is_zero() => mismatches.push(format!("{tag}: unexpected block")),
                None => {}
                Some((free, terms)) => {
                    if rel(got.identity, *free) > 1e-14 && (got.identity - free).norm() > 1e-14 {
                        mismatches.push(format!("{tag}: free term {} vs {}", got.identity, free));
                    }
                    for op in [S, D, Ds, N] {
                        for r in 1..=4 {
                            let want: C64 = terms.iter().filter(|t| t.0 == op && t.1 == r).map(|t| t.2).sum();
                            let have = got.coeff(op, r);
                            if (have - want).norm() > 1e-14 * (1.0 + want.norm()) {
                                mismatches.push(format!("{tag}: {op:?}^{r} {have} vs {want}"));
                            }
                        }
                    }
                }
            }
        }
    }
    check(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!("{} nonzero blocks of 64 match", plan.nonzero_blocks())
        } else {
            mismatches.join("; ")
        },
    )
}

fn main() {
    let only: Option<BTreeSet<usize>> = std::env::var("HELM_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let strict = std::env::var_os("HELM_ACCEPTANCE_STRICT").is_some();
    let wanted = |i: usize| only.as_ref().is_none_or(|o| o.contains(&i));

    let names = [
        "cluster-formula exactness",
        "reference-value regression",
        "spectrum clustering",
        "accuracy convergence",
        "iteration flatness",
        "preconditioner benefit at high contrast",
        "tuner enumeration",
        "GMRES unit suite",
        "oracle self-consistency",
        "four-domain block structure",
    ];
    let convergence = if wanted(4) || wanted(5) { Some(convergence_runs()) } else { None };
    let mut failed = 0;
    for (i, name) in names.iter().enumerate() {
        let id = i + 1;
        if !wanted(id) {
            continue;
        }
        let outcome = match id {
            1 => cluster_formula_exactness(),
            2 => reference_values(),
            3 => spectrum_clustering(),
            4 | 5 => match convergence.as_ref().unwrap() {
                Ok(c) if id == 4 => accuracy_convergence(c),
                Ok(c) => iteration_flatness(c),
                Err(e) => Err(e.clone()),
            },
            6 => preconditioner_benefit(),
            7 => tuner_enumeration(),
            8 => gmres_suite(),
            9 => oracle_self_consistency(),
            _ => block_structure(),
        };
        match outcome {
            Ok(d) => println!("PASS {id:>2} {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {d}");
            }
        }
    }
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
