//! Closed-form eigenfunctions, energies, and normalization for the
//! two-particle box (particle and center-of-mass coordinates) and the four
//! single-particle billiard shapes, with numerical self-verification
//! (boundary vanishing, finite-difference PDE residual).
//!
//! Basis convention: the billiard shapes use the sine family sin(pi N x / d)
//! on [-d, d], which vanishes at the center as well as the walls and spans
//! only the even-index subspace of the full box basis. All kernels and
//! oracles in this crate work inside that same subspace, so the restriction
//! is consistent end to end.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{from_com, BoxSpec, Point2, Region, Shape, ShapeDomain};
use crate::quadrature::{integrate_checked, GaussLegendre};

/// Mode indices (N1, N2), both >= 1. N = 0 gives the zero function and
/// negative indices give the same ray, so only the positive set is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantumNumbers {
    pub n1: u32,
    pub n2: u32,
}

impl QuantumNumbers {
    pub fn new(n1: u32, n2: u32) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidInput(format!(
                "quantum numbers must be >= 1, got ({n1}, {n2})"
            )));
        }
        Ok(QuantumNumbers { n1, n2 })
    }
}

/// Analytic eigenvalue with hbar restored. The billiard shapes carry the
/// mass of particle 1; the rectangle absorbs the masses into the scales
/// (a, b) and evolves with unit mass in the stretched coordinates.
pub fn energy(shape: Shape, qn: QuantumNumbers, spec: &BoxSpec) -> Result<f64> {
    spec.validate()?;
    reject_degenerate(shape, qn)?;
    let n1 = qn.n1 as f64;
    let n2 = qn.n2 as f64;
    let h2 = spec.hbar * spec.hbar;
    let pref = h2 * PI * PI / (2.0 * spec.d * spec.d);
    Ok(match shape {
        Shape::TwoParticleBox => pref * (n1 * n1 / spec.m1 + n2 * n2 / spec.m2),
        Shape::Square | Shape::Rhombus | Shape::Triangle => {
            pref * (n1 * n1 + n2 * n2) / spec.billiard_mass()
        }
        Shape::Rectangle => pref * (n1 * n1 / spec.a + n2 * n2 / spec.b),
    })
}

fn reject_degenerate(shape: Shape, qn: QuantumNumbers) -> Result<()> {
    if shape == Shape::Triangle && qn.n1 == qn.n2 {
        return Err(Error::InvalidInput(format!(
            "triangle state with N1 = N2 = {} is identically zero",
            qn.n1
        )));
    }
    Ok(())
}

/// A normalized eigenstate of one of the five domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenState {
    shape: Shape,
    qn: QuantumNumbers,
    spec: BoxSpec,
    norm: f64,
}

impl EigenState {
    pub fn new(shape: Shape, qn: QuantumNumbers, spec: BoxSpec) -> Result<Self> {
        spec.validate()?;
        reject_degenerate(shape, qn)?;
        let norm = analytic_normalization(shape, &spec);
        Ok(EigenState {
            shape,
            qn,
            spec,
            norm,
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn quantum_numbers(&self) -> QuantumNumbers {
        self.qn
    }

    pub fn spec(&self) -> &BoxSpec {
        &self.spec
    }

    /// The normalization amplitude in front of the raw sine product.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn energy(&self) -> f64 {
        energy(self.shape, self.qn, &self.spec).expect("state was validated at construction")
    }

    pub fn domain(&self) -> ShapeDomain {
        ShapeDomain::new(self.shape, self.spec)
    }

    /// Normalized eigenfunction value; points outside the domain return 0,
    /// points on the boundary (within the default tolerance) evaluate the
    /// closed form so that boundary vanishing can be measured rather than
    /// imposed.
    pub fn eval(&self, p: Point2) -> f64 {
        let domain = self.domain();
        if domain.contains(p, self.spec.boundary_tol()) == Region::Exterior {
            return 0.0;
        }
        self.norm * raw_eigenfunction(self.shape, self.qn, &self.spec, p)
    }
}

/// The unnormalized sine product for `shape` at point `p` (no domain clip).
fn raw_eigenfunction(shape: Shape, qn: QuantumNumbers, spec: &BoxSpec, p: Point2) -> f64 {
    let d = spec.d;
    let n1 = qn.n1 as f64;
    let n2 = qn.n2 as f64;
    match shape {
        Shape::TwoParticleBox | Shape::Square => {
            (PI * n1 * p.u / d).sin() * (PI * n2 * p.v / d).sin()
        }
        Shape::Rhombus => {
            let k1 = PI * n1 / (2.0f64.sqrt() * d);
            let k2 = PI * n2 / (2.0f64.sqrt() * d);
            (k1 * (p.u + p.v)).sin() * (k2 * (p.u - p.v)).sin()
        }
        Shape::Triangle => {
            let k1 = PI * n1 / (2.0f64.sqrt() * d);
            let k2 = PI * n2 / (2.0f64.sqrt() * d);
            let u = p.u + p.v;
            let v = p.u - p.v;
            (k1 * u).sin() * (k2 * v).sin() - (k2 * u).sin() * (k1 * v).sin()
        }
        Shape::Rectangle => {
            let sa = spec.a.sqrt();
            let sb = spec.b.sqrt();
            (PI * n1 * p.u / (d * sa)).sin() * (PI * n2 * p.v / (d * sb)).sin()
        }
    }
}

fn analytic_normalization(shape: Shape, spec: &BoxSpec) -> f64 {
    match shape {
        Shape::TwoParticleBox => 2.0 / spec.d,
        Shape::Square | Shape::Rhombus | Shape::Triangle => 1.0 / spec.d,
        Shape::Rectangle => 1.0 / (spec.d * (spec.a * spec.b).powf(0.25)),
    }
}

/// Two-particle box eigenfunction written directly in center-of-mass
/// coordinates: amplitude times
/// sin((pi N1/d)(Xc + (m2/M) x)) sin((pi N2/d)(Xc - (m1/M) x)).
/// Coincides with the particle-coordinate form composed with `from_com`
/// (including the zero clip outside the domain image).
pub fn eval_com_eigen(qn: QuantumNumbers, spec: &BoxSpec, xc: f64, x: f64) -> f64 {
    let (x1, x2) = from_com(xc, x, spec);
    let d = spec.d;
    let tol = spec.boundary_tol();
    if !(-tol..=d + tol).contains(&x1) || !(-tol..=d + tol).contains(&x2) {
        return 0.0;
    }
    let amp = 2.0 / d;
    amp * (PI * qn.n1 as f64 * x1 / d).sin() * (PI * qn.n2 as f64 * x2 / d).sin()
}

/// Normalization amplitude recomputed from scratch: 1/sqrt(integral of the
/// raw sine product squared) by 2D quadrature over the shape's domain. The
/// constant is independent of the quantum numbers for every shape (for the
/// triangle because the cross term integrates to zero when N1 != N2), so a
/// fixed representative mode is integrated.
pub fn normalization_constant(shape: Shape, spec: &BoxSpec) -> Result<f64> {
    spec.validate()?;
    let qn = match shape {
        Shape::Triangle => QuantumNumbers::new(1, 2)?,
        _ => QuantumNumbers::new(1, 1)?,
    };
    let domain = ShapeDomain::new(shape, *spec);
    let scale = spec.d * spec.d;
    let (integral, _) = integrate_checked(
        |order| domain.quad_rule(&GaussLegendre::new(order)),
        |u, v| {
            let w = raw_eigenfunction(shape, qn, spec, Point2::new(u, v));
            w * w / scale
        },
        64,
        1e-12,
        "normalization_constant",
    )?;
    Ok(1.0 / (integral * scale).sqrt())
}

/// Max |psi| over `n_samples` points placed on every boundary edge
/// (endpoints included).
pub fn boundary_residual(state: &EigenState, n_samples: usize) -> Result<f64> {
    if n_samples < 10 {
        return Err(Error::InvalidInput(format!(
            "boundary_residual needs at least 10 samples per edge, got {n_samples}"
        )));
    }
    let polygon = state.domain().polygon();
    let mut worst = 0.0f64;
    for (a, b) in polygon.edges() {
        for i in 0..n_samples {
            let t = i as f64 / (n_samples - 1) as f64;
            let p = Point2::new(a.u + t * (b.u - a.u), a.v + t * (b.v - a.v));
            worst = worst.max(state.eval(p).abs());
        }
    }
    Ok(worst)
}

/// Relative finite-difference residual ||H_h psi - E psi|| / ||E psi||
/// (root-mean-square over interior lattice points whose whole 5-point
/// stencil stays inside the domain), with E the state's analytic energy.
pub fn hamiltonian_residual(state: &EigenState, h: f64) -> Result<f64> {
    hamiltonian_residual_at(state, h, state.energy())
}

/// Same residual against an arbitrary candidate energy; used to decide
/// between competing eigenvalue formulas.
pub fn hamiltonian_residual_at(state: &EigenState, h: f64, energy: f64) -> Result<f64> {
    let spec = state.spec();
    if !(h > 0.0 && h < spec.d / 100.0) {
        return Err(Error::InvalidInput(format!(
            "stencil spacing must lie in (0, d/100), got {h}"
        )));
    }
    let domain = state.domain();
    let polygon = domain.polygon();
    let (lo, hi) = polygon.bounding_box();
    let (c1, c2) = stencil_coefficients(state.shape(), spec);
    let tol = spec.boundary_tol();

    let lattice = 25usize;
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    let mut used = 0usize;
    for i in 0..lattice {
        for j in 0..lattice {
            let u = lo.u + (i as f64 + 0.5) * (hi.u - lo.u) / lattice as f64;
            let v = lo.v + (j as f64 + 0.5) * (hi.v - lo.v) / lattice as f64;
            let p = Point2::new(u, v);
            let arms = [
                Point2::new(u + h, v),
                Point2::new(u - h, v),
                Point2::new(u, v + h),
                Point2::new(u, v - h),
            ];
            let inside = domain.contains(p, tol) == Region::Interior
                && arms
                    .iter()
                    .all(|&q| domain.contains(q, tol) == Region::Interior);
            if !inside {
                continue;
            }
            let psi = state.eval(p);
            let lap1 = (state.eval(arms[0]) - 2.0 * psi + state.eval(arms[1])) / (h * h);
            let lap2 = (state.eval(arms[2]) - 2.0 * psi + state.eval(arms[3])) / (h * h);
            let h_psi = -0.5 * spec.hbar * spec.hbar * (c1 * lap1 + c2 * lap2);
            let r = h_psi - energy * psi;
            num += r * r;
            den += (energy * psi) * (energy * psi);
            used += 1;
        }
    }
    if used == 0 || den == 0.0 {
        return Err(Error::InvalidInput(
            "no interior stencil points available for the residual".into(),
        ));
    }
    Ok((num / den).sqrt())
}

/// Kinetic coefficients (on the second derivatives along the two axes) of
/// the shape's Hamiltonian.
fn stencil_coefficients(shape: Shape, spec: &BoxSpec) -> (f64, f64) {
    match shape {
        Shape::TwoParticleBox => (1.0 / spec.m1, 1.0 / spec.m2),
        Shape::Square | Shape::Rhombus | Shape::Triangle => {
            let m = spec.billiard_mass();
            (1.0 / m, 1.0 / m)
        }
        Shape::Rectangle => (1.0, 1.0),
    }
}

/// A normalized linear combination of eigenstates of one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Superposition {
    terms: Vec<(Complex64, EigenState)>,
}

impl Superposition {
    /// Builds the combination and rescales the coefficients so that
    /// sum |c|^2 = 1. All states must share shape and box parameters.
    pub fn new(terms: Vec<(Complex64, EigenState)>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::InvalidInput(
                "superposition needs at least one term".into(),
            ));
        };
        let shape = first.1.shape();
        let spec = *first.1.spec();
        for (_, s) in &terms {
            if s.shape() != shape || *s.spec() != spec {
                return Err(Error::InvalidInput(
                    "superposition terms must share shape and box parameters".into(),
                ));
            }
        }
        let total: f64 = terms.iter().map(|(c, _)| c.norm_sqr()).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidInput(
                "superposition coefficients must have positive finite weight".into(),
            ));
        }
        let scale = total.sqrt();
        let terms = terms
            .into_iter()
            .map(|(c, s)| (c / scale, s))
            .collect::<Vec<_>>();
        Ok(Superposition { terms })
    }

    pub fn terms(&self) -> &[(Complex64, EigenState)] {
        &self.terms
    }

    pub fn shape(&self) -> Shape {
        self.terms[0].1.shape()
    }

    pub fn spec(&self) -> &BoxSpec {
        self.terms[0].1.spec()
    }

    pub fn eval(&self, p: Point2) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, s)| c * s.eval(p))
            .sum()
    }

    /// Evaluation in center-of-mass coordinates; only meaningful for the
    /// two-particle box.
    pub fn eval_com(&self, xc: f64, x: f64) -> Result<Complex64> {
        if self.shape() != Shape::TwoParticleBox {
            return Err(Error::InvalidInput(format!(
                "center-of-mass evaluation applies to the two-particle box, not {}",
                self.shape().name()
            )));
        }
        Ok(self
            .terms
            .iter()
            .map(|(c, s)| c * eval_com_eigen(s.quantum_numbers(), s.spec(), xc, x))
            .sum())
    }
}
