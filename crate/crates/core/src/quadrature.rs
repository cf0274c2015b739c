//! Gauss-Legendre quadrature and compensated accumulation.
//!
//! All domain integrals in this crate reduce to tensor-product Gauss-Legendre
//! rules over a reference square, composed with smooth maps onto the actual
//! region (axis-aligned rectangles, the rotated rhombus square, or triangles
//! with coordinate-dependent inner limits). The maps keep the integrands
//! smooth, so the rules converge at spectral rate.

use crate::error::{Error, Result};

/// Quadrature controls: `order` Gauss points per axis per cell, and an
/// optional refinement tolerance. When `refine_tol` is set, integrals are
/// recomputed at doubled order and the difference must stay below it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub order: usize,
    pub refine_tol: Option<f64>,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            order: 64,
            refine_tol: None,
        }
    }
}

impl QuadConfig {
    pub fn with_order(order: usize) -> Self {
        QuadConfig {
            order,
            refine_tol: None,
        }
    }
}

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on P_n; standard three-term
    /// recurrence, roots seeded with the Chebyshev approximation.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be at least 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for k in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (_, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            weights[k] = w;
            nodes[n - 1 - k] = x;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// Integrate `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mut acc = NeumaierSum::new();
        for (x, w) in self.mapped(a, b) {
            acc.add(w * f(x));
        }
        acc.value()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Neumaier variant of Kahan summation; keeps long accumulations at
/// near-machine accuracy regardless of term count.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// A positioned quadrature node of a 2D rule: location and weight.
pub type WeightedNode = ((f64, f64), f64);

/// Tensor rule over an axis-aligned rectangle [x0,x1] x [y0,y1].
pub fn rect_rule(gl: &GaussLegendre, x0: f64, x1: f64, y0: f64, y1: f64) -> Vec<WeightedNode> {
    let mut out = Vec::with_capacity(gl.nodes().len() * gl.nodes().len());
    let xs: Vec<(f64, f64)> = gl.mapped(x0, x1).collect();
    let ys: Vec<(f64, f64)> = gl.mapped(y0, y1).collect();
    for &(x, wx) in &xs {
        for &(y, wy) in &ys {
            out.push(((x, y), wx * wy));
        }
    }
    out
}

/// Tensor rule over a region with an outer variable s in [s0,s1] and inner
/// variable running between lo(s) and hi(s), both affine in s. `axis_first`
/// selects whether s is the first or the second output coordinate.
pub fn sheared_rule(
    gl: &GaussLegendre,
    s0: f64,
    s1: f64,
    lo: impl Fn(f64) -> f64,
    hi: impl Fn(f64) -> f64,
    axis_first: bool,
) -> Vec<WeightedNode> {
    let mut out = Vec::with_capacity(gl.nodes().len() * gl.nodes().len());
    let ss: Vec<(f64, f64)> = gl.mapped(s0, s1).collect();
    for &(s, ws) in &ss {
        let (a, b) = (lo(s), hi(s));
        for (r, wr) in gl.mapped(a, b) {
            let p = if axis_first { (s, r) } else { (r, s) };
            out.push((p, ws * wr));
        }
    }
    out
}

/// Sum `f` against a prepared rule.
pub fn integrate_rule<F: FnMut(f64, f64) -> f64>(rule: &[WeightedNode], mut f: F) -> f64 {
    let mut acc = NeumaierSum::new();
    for &((x, y), w) in rule {
        acc.add(w * f(x, y));
    }
    acc.value()
}

/// Integrate with an order-doubling consistency check. Returns the refined
/// value together with the achieved difference; errors when the difference
/// exceeds `tol`.
pub fn integrate_checked<F>(
    mut build: impl FnMut(usize) -> Vec<WeightedNode>,
    mut f: F,
    order: usize,
    tol: f64,
    context: &str,
) -> Result<(f64, f64)>
where
    F: FnMut(f64, f64) -> f64,
{
    let coarse_rule = build(order);
    let coarse = integrate_rule(&coarse_rule, &mut f);
    let fine_rule = build(2 * order);
    let fine = integrate_rule(&fine_rule, &mut f);
    let achieved = (fine - coarse).abs();
    if achieved > tol {
        return Err(Error::Quadrature {
            achieved,
            required: tol,
            context: context.to_string(),
        });
    }
    Ok((fine, achieved))
}
