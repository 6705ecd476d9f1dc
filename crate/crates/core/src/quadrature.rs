//! Gauss–Legendre rules on intervals and collapsed-square rules on triangles.

use std::sync::OnceLock;

use crate::geom::Vec3;

/// Nodes and weights on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre nodes/weights on `[0, 1]` by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Rule1d {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    Rule1d { nodes, weights }
}

/// Point rule on a reference triangle, as barycentric-style pairs
/// `(s, t)` with `x = a + s (b - a) + t (c - a)` and weights summing to 1.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

/// `n × n` Gauss–Legendre product rule on the Duffy-collapsed square.
pub fn duffy_rule(n: usize) -> TriangleRule {
    let g = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&u, &wu) in g.nodes.iter().zip(&g.weights) {
        for (&v, &wv) in g.nodes.iter().zip(&g.weights) {
            // a + u (b - a) + u v (c - b)  =  a + u (1 - v) (b - a) + u v (c - a)
            points.push((u * (1.0 - v), u * v));
            weights.push(2.0 * wu * wv * u);
        }
    }
    TriangleRule { points, weights }
}

/// The 16-point (4 × 4) rule used for all regular element integrals.
pub fn triangle16() -> &'static TriangleRule {
    static RULE: OnceLock<TriangleRule> = OnceLock::new();
    RULE.get_or_init(|| duffy_rule(4))
}

/// The 10-point rule used along element edges.
pub fn edge10() -> &'static Rule1d {
    static RULE: OnceLock<Rule1d> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(10))
}

/// Physical quadrature points `(x, w)` of `rule` on triangle `abc` with
/// area `area`.
pub fn map_rule(rule: &TriangleRule, [a, b, c]: [Vec3; 3], area: f64) -> impl Iterator<Item = (Vec3, f64)> + '_ {
    let (e1, e2) = (b - a, c - a);
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(move |(&(s, t), &w)| (a + e1 * s + e2 * t, w * area))
}
