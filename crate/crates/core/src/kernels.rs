//! Helmholtz fundamental solution and constant-density element integrals of
//! the layer operators S, D, D* and N at a collocation point.
//!
//! Regular pairs use the 16-point collapsed-square rule. On the self element
//! the single layer is split into the static part, integrated in closed form,
//! plus a bounded remainder. D and D* vanish there. The hypersingular operator
//! is always evaluated through the tangential identity
//!
//! ```text
//! N_E(x) = k² (n_x·n_y) ∫_E G  −  n_x · ∮_{∂E} ∇_x G × dr_y
//! ```
//!
//! with the contour traversed counter-clockwise about `n_y` and a 10-point
//! rule per edge.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::Element;
use crate::quadrature::{edge10, gauss_legendre, map_rule, triangle16, Rule1d};

const FOUR_PI: f64 = 4.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    S,
    D,
    DStar,
    N,
}

fn check_wavenumber(k: f64) -> Result<()> {
    if k >= 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("wavenumber {k}")))
    }
}

#[inline]
fn expikr(k: f64, r: f64) -> C64 {
    let (s, c) = (k * r).sin_cos();
    C64::new(c, s)
}

/// `e^{ik|x−y|} / (4π|x−y|)`. `k = 0` gives the Laplace kernel.
pub fn green(k: f64, x: Vec3, y: Vec3) -> Result<C64> {
    check_wavenumber(k)?;
    let r = (x - y).norm();
    if !(r > 0.0) {
        return Err(Error::CoincidentPoints);
    }
    Ok(expikr(k, r) / (FOUR_PI * r))
}

/// `G'(r) / r`, so that `∇_x G = (x − y) · dg_over_r`.
#[inline]
fn dg_over_r(k: f64, r: f64) -> C64 {
    expikr(k, r) * C64::new(-1.0, k * r) / (FOUR_PI * r * r * r)
}

/// Which of the four operators to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorMask {
    pub s: bool,
    pub d: bool,
    pub dstar: bool,
    pub n: bool,
}

impl OperatorMask {
    pub const ALL: OperatorMask = OperatorMask {
        s: true,
        d: true,
        dstar: true,
        n: true,
    };
    pub const NONE: OperatorMask = OperatorMask {
        s: false,
        d: false,
        dstar: false,
        n: false,
    };

    pub fn with(mut self, kind: KernelKind) -> Self {
        match kind {
            KernelKind::S => self.s = true,
            KernelKind::D => self.d = true,
            KernelKind::DStar => self.dstar = true,
            KernelKind::N => self.n = true,
        }
        self
    }

    pub fn any(&self) -> bool {
        self.s || self.d || self.dstar || self.n
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ElementIntegrals {
    pub s: C64,
    pub d: C64,
    pub dstar: C64,
    pub n: C64,
}

impl ElementIntegrals {
    pub fn get(&self, kind: KernelKind) -> C64 {
        match kind {
            KernelKind::S => self.s,
            KernelKind::D => self.d,
            KernelKind::DStar => self.dstar,
            KernelKind::N => self.n,
        }
    }
}

/// Source element with its quadrature points mapped once.
#[derive(Debug, Clone)]
pub struct SourcePanel {
    pub element: Element,
    quad: Vec<(Vec3, f64)>,
    /// Edge points with their weighted tangent `dr`.
    contour: Vec<(Vec3, Vec3)>,
}

impl SourcePanel {
    pub fn new(element: &Element) -> Self {
        let quad = map_rule(triangle16(), element.vertices, element.area).collect();
        let g = edge10();
        let [a, b, c] = element.vertices;
        let mut contour = Vec::with_capacity(3 * g.nodes.len());
        for (p, q) in [(a, b), (b, c), (c, a)] {
            let t = q - p;
            for (&s, &w) in g.nodes.iter().zip(&g.weights) {
                contour.push((p + t * s, t * w));
            }
        }
        Self {
            element: *element,
            quad,
            contour,
        }
    }

    /// True when `x` is this element's collocation point.
    pub fn is_self(&self, x: Vec3) -> bool {
        (x - self.element.centroid).norm() <= 1e-12 * self.element.diameter
    }

    /// Integrals of the requested operators at `x` with normal `nx`.
    pub fn integrals(&self, k: f64, x: Vec3, nx: Vec3, mask: OperatorMask) -> ElementIntegrals {
        if self.is_self(x) {
            return self.self_integrals(k, nx, mask);
        }
        let ny = self.element.normal;
        let mut out = ElementIntegrals::default();
        let need_s = mask.s || mask.n;
        if need_s || mask.d || mask.dstar {
            for &(y, w) in &self.quad {
                let rv = x - y;
                let r = rv.norm();
                let e = expikr(k, r);
                if need_s {
                    out.s += e * (w / (FOUR_PI * r));
                }
                if mask.d || mask.dstar {
                    let g1 = e * C64::new(-1.0, k * r) * (w / (FOUR_PI * r * r * r));
                    if mask.d {
                        out.d -= g1 * rv.dot(ny);
                    }
                    if mask.dstar {
                        out.dstar += g1 * rv.dot(nx);
                    }
                }
            }
        }
        if mask.n {
            out.n = self.hypersingular(k, x, nx, out.s);
        }
        if !mask.s {
            out.s = C64::default();
        }
        out
    }

    fn hypersingular(&self, k: f64, x: Vec3, nx: Vec3, s: C64) -> C64 {
        let mut contour = C64::default();
        for &(y, dr) in &self.contour {
            let rv = x - y;
            let r = rv.norm();
            contour += dg_over_r(k, r) * nx.dot(rv.cross(dr));
        }
        s * (k * k * nx.dot(self.element.normal)) - contour
    }

    fn self_integrals(&self, k: f64, nx: Vec3, mask: OperatorMask) -> ElementIntegrals {
        let mut out = ElementIntegrals::default();
        if mask.s || mask.n {
            let s = self_single_layer(&self.element, k);
            if mask.n {
                out.n = self.hypersingular(k, self.element.centroid, nx, s);
            }
            if mask.s {
                out.s = s;
            }
        }
        out
    }
}

/// `∫_E 1/(4π|x−y|) dy` for `x` in the plane of `E` and strictly inside it.
fn static_single_layer_in_plane(e: &Element, x: Vec3) -> f64 {
    let [a, b, c] = e.vertices;
    let mut sum = 0.0;
    for (p, q) in [(a, b), (b, c), (c, a)] {
        let len = (q - p).norm();
        let t = (q - p) * (1.0 / len);
        // Inward-facing in-plane edge normal: n × t.
        let m = e.normal.cross(t);
        let d = (p - x).dot(m).abs();
        let sp = (p - x).dot(t);
        let sq = (q - x).dot(t);
        sum += d * ((sq / d).asinh() - (sp / d).asinh());
    }
    sum / FOUR_PI
}

/// Self-element single layer: analytic static part plus the bounded
/// remainder `(e^{ikr} − 1)/(4πr)`. In polar coordinates about the centroid
/// the remainder integrates radially in closed form,
/// `∫_0^R (e^{ikr} − 1)/(4π) dr = ((e^{ikR} − 1)/(ik) − R)/(4π)`, leaving a
/// smooth angular integral done with 16 Gauss–Legendre nodes per edge.
fn self_single_layer(e: &Element, k: f64) -> C64 {
    let x = e.centroid;
    let mut out = C64::new(static_single_layer_in_plane(e, x), 0.0);
    if k == 0.0 {
        return out;
    }
    let g = gauss16();
    let [a, b, c] = e.vertices;
    for (p, q) in [(a, b), (b, c), (c, a)] {
        let t = (q - p).normalized();
        let m = e.normal.cross(t);
        let d = (p - x).dot(m).abs();
        let (phi_p, phi_q) = (((p - x).dot(t) / d).atan(), ((q - x).dot(t) / d).atan());
        let span = phi_q - phi_p;
        for (&s, &w) in g.nodes.iter().zip(&g.weights) {
            let r = d / (phi_p + s * span).cos();
            let kr = k * r;
            // (e^{ikR} − 1)/(ik) − R, split to avoid cancellation.
            let half = (0.5 * kr).sin();
            let re = kr.sin() / k - r;
            let im = 2.0 * half * half / k;
            out += C64::new(re, im) * (w * span / FOUR_PI);
        }
    }
    out
}

fn gauss16() -> &'static Rule1d {
    static RULE: OnceLock<Rule1d> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Integral of one operator over `element` for a unit density, collocated at
/// `x` with normal `nx` (required for D* and N).
pub fn element_integral(
    kind: KernelKind,
    k: f64,
    element: &Element,
    x: Vec3,
    nx: Option<Vec3>,
) -> Result<C64> {
    check_wavenumber(k)?;
    if !(element.area > 0.0) {
        return Err(Error::DegenerateElement(element.area));
    }
    let nx = match (kind, nx) {
        (KernelKind::DStar | KernelKind::N, None) => {
            return Err(Error::InvalidArgument(format!(
                "{kind:?} needs a collocation normal"
            )))
        }
        (_, Some(n)) => n,
        (_, None) => Vec3::ZERO,
    };
    let panel = SourcePanel::new(element);
    Ok(panel
        .integrals(k, x, nx, OperatorMask::NONE.with(kind))
        .get(kind))
}

/// Plane wave `u = e^{ik₁ x·d}` and its flux `w = (ik₁/ε₁)(n·d) u`.
pub fn incident_plane_wave(k1: f64, epsilon1: f64, direction: Vec3, x: Vec3, n: Vec3) -> Result<(C64, C64)> {
    if ((direction.norm() - 1.0).abs()) > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "incident direction must be a unit vector, |d| = {}",
            direction.norm()
        )));
    }
    let u = expikr(k1, x.dot(direction));
    let w = C64::new(0.0, k1 / epsilon1) * n.dot(direction) * u;
    Ok((u, w))
}
