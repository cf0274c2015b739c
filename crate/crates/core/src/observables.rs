//! Expectation values and the covariance of the center of mass with the
//! relative coordinate.
//!
//! Bounded states are integrated either by Gauss-Legendre quadrature with an
//! order-doubling check (superpositions) or nodewise with lattice weights
//! (grid snapshots). `covariance_direct` integrates the observables Xc * x,
//! Xc, and x against the joint density over the center-of-mass domain;
//! `covariance_expanded` assembles the same quantity from particle-coordinate
//! moments as (m1/M) Var(x1) - (m2/M) Var(x2) + ((m2 - m1)/M) Cov(x1, x2),
//! and the two agree for every state.
//!
//! `covariance_closed_form_example` evaluates a fixed reference trace for the
//! two-mode example state. That expression restricts the density to the
//! x >= 0 half of the domain and renormalizes, so it differs from the
//! full-domain covariance; `covariance_example_exact` gives the full-domain
//! closed form, and trace output reports the gap between the two.
//!
//! For unbounded evolution, `covariance_free` propagates Gaussian product
//! packets analytically; the result is exactly quadratic in time.

use std::f64::consts::PI;

use crate::eigenstates::{EigenState, QuantumNumbers, Superposition};
use crate::error::{Error, Result};
use crate::geometry::{com_domain, to_com, BoxSpec, ComDomain, Point2, Shape, ShapeDomain};
use crate::propagator::{evolve_superposition, GridState};
use crate::quadrature::{integrate_checked, GaussLegendre, NeumaierSum, QuadConfig};
use num_complex::Complex64;

/// Default order-doubling tolerance when `QuadConfig::refine_tol` is unset,
/// applied per moment after scaling by the matching power of the box length.
const DEFAULT_REFINE_TOL: f64 = 1e-10;

/// Relative slack granted to the moment consistency checks; the quadrature
/// sums carry rounding noise of this size.
const MOMENT_SLACK: f64 = 1e-12;

/// Raw coordinate moments of a joint density: means, second moments, and the
/// mixed moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub e_x1: f64,
    pub e_x2: f64,
    pub e_x1sq: f64,
    pub e_x2sq: f64,
    pub e_x1x2: f64,
}

impl MomentSet {
    pub fn var_x1(&self) -> f64 {
        self.e_x1sq - self.e_x1 * self.e_x1
    }

    pub fn var_x2(&self) -> f64 {
        self.e_x2sq - self.e_x2 * self.e_x2
    }

    pub fn cov_x1x2(&self) -> f64 {
        self.e_x1x2 - self.e_x1 * self.e_x2
    }

    /// Mean of Xc = (m1 x1 + m2 x2)/M.
    pub fn mean_com(&self, spec: &BoxSpec) -> f64 {
        (spec.m1 * self.e_x1 + spec.m2 * self.e_x2) / spec.total_mass()
    }

    /// Mean of x = x1 - x2.
    pub fn mean_rel(&self) -> f64 {
        self.e_x1 - self.e_x2
    }

    /// Variance of Xc.
    pub fn var_com(&self, spec: &BoxSpec) -> f64 {
        let m = spec.total_mass();
        (spec.m1 * spec.m1 * self.var_x1()
            + spec.m2 * spec.m2 * self.var_x2()
            + 2.0 * spec.m1 * spec.m2 * self.cov_x1x2())
            / (m * m)
    }

    /// Variance of x.
    pub fn var_rel(&self) -> f64 {
        self.var_x1() + self.var_x2() - 2.0 * self.cov_x1x2()
    }

    /// Cov(Xc, x) by bilinearity:
    /// (m1/M) Var(x1) - (m2/M) Var(x2) + ((m2 - m1)/M) Cov(x1, x2).
    pub fn cov_com_rel(&self, spec: &BoxSpec) -> f64 {
        let m = spec.total_mass();
        (spec.m1 * self.var_x1() - spec.m2 * self.var_x2()
            + (spec.m2 - spec.m1) * self.cov_x1x2())
            / m
    }

    /// Consistency of the computed moments: variances must be nonnegative and
    /// the mixed moment bounded by Cauchy-Schwarz, up to rounding slack.
    fn validated(self, scale: f64) -> Result<Self> {
        let slack = MOMENT_SLACK * scale.max(1.0);
        if self.var_x1() < -slack || self.var_x2() < -slack {
            return Err(Error::Quadrature {
                achieved: self.var_x1().min(self.var_x2()).abs(),
                required: slack,
                context: "moment consistency: negative variance".into(),
            });
        }
        let bound = (self.var_x1().max(0.0) * self.var_x2().max(0.0)).sqrt()
            + (self.e_x1 * self.e_x2).abs();
        if self.e_x1x2.abs() > bound + slack {
            return Err(Error::Quadrature {
                achieved: self.e_x1x2.abs() - bound,
                required: slack,
                context: "moment consistency: mixed moment exceeds Cauchy-Schwarz bound".into(),
            });
        }
        Ok(self)
    }
}

/// A state whose density can be integrated: an exact superposition, evolved
/// by phase rotation to the requested time, or a lattice snapshot already
/// stamped with its time.
#[derive(Debug, Clone, Copy)]
pub enum MomentSource<'a> {
    Superposition(&'a Superposition),
    Grid(&'a GridState),
}

impl<'a> From<&'a Superposition> for MomentSource<'a> {
    fn from(s: &'a Superposition) -> Self {
        MomentSource::Superposition(s)
    }
}

impl<'a> From<&'a GridState> for MomentSource<'a> {
    fn from(g: &'a GridState) -> Self {
        MomentSource::Grid(g)
    }
}

impl MomentSource<'_> {
    fn shape(&self) -> Shape {
        match self {
            MomentSource::Superposition(s) => s.shape(),
            MomentSource::Grid(g) => g.domain().kind,
        }
    }

    fn spec(&self) -> BoxSpec {
        match self {
            MomentSource::Superposition(s) => *s.spec(),
            MomentSource::Grid(g) => g.domain().spec,
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if let MomentSource::Grid(g) = self {
            if (t - g.t()).abs() > 1e-12 * (1.0 + t.abs()) {
                return Err(Error::InvalidInput(format!(
                    "lattice snapshot is stamped at t = {}, cannot evaluate at t = {t}",
                    g.t()
                )));
            }
        }
        Ok(())
    }
}

/// Coordinate moments of |state(t)|^2 over the state's own domain.
pub fn moments(source: MomentSource, t: f64, quad: &QuadConfig) -> Result<MomentSet> {
    source.check_time(t)?;
    let spec = source.spec();
    let d = spec.d;
    let base = quad.refine_tol.unwrap_or(DEFAULT_REFINE_TOL);
    let raw = match source {
        MomentSource::Superposition(s) => {
            let evolved = evolve_superposition(s, t);
            let domain = ShapeDomain::new(s.shape(), spec);
            let dens = |x1: f64, x2: f64| evolved.eval(Point2::new(x1, x2)).norm_sqr();
            let integral = |f: &dyn Fn(f64, f64) -> f64, degree: i32, what: &str| {
                integrate_checked(
                    |order| domain.quad_rule(&GaussLegendre::new(order)),
                    |x1, x2| f(x1, x2) * dens(x1, x2),
                    quad.order,
                    base * d.powi(degree),
                    what,
                )
                .map(|(v, _)| v)
            };
            let z = integral(&|_, _| 1.0, 0, "moment quadrature: norm")?;
            [
                z,
                integral(&|x1, _| x1, 1, "moment quadrature: E[x1]")?,
                integral(&|_, x2| x2, 1, "moment quadrature: E[x2]")?,
                integral(&|x1, _| x1 * x1, 2, "moment quadrature: E[x1^2]")?,
                integral(&|_, x2| x2 * x2, 2, "moment quadrature: E[x2^2]")?,
                integral(&|x1, x2| x1 * x2, 2, "moment quadrature: E[x1 x2]")?,
            ]
        }
        MomentSource::Grid(g) => {
            let mut sums = [NeumaierSum::new(); 6];
            for i in 0..g.nx() {
                for j in 0..g.ny() {
                    let rho = g.weight(i, j) * g.value(i, j).norm_sqr();
                    let p = g.node(i, j);
                    sums[0].add(rho);
                    sums[1].add(p.u * rho);
                    sums[2].add(p.v * rho);
                    sums[3].add(p.u * p.u * rho);
                    sums[4].add(p.v * p.v * rho);
                    sums[5].add(p.u * p.v * rho);
                }
            }
            [
                sums[0].value(),
                sums[1].value(),
                sums[2].value(),
                sums[3].value(),
                sums[4].value(),
                sums[5].value(),
            ]
        }
    };
    let z = raw[0];
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "state carries no probability mass (norm^2 integral = {z})"
        )));
    }
    MomentSet {
        e_x1: raw[1] / z,
        e_x2: raw[2] / z,
        e_x1sq: raw[3] / z,
        e_x2sq: raw[4] / z,
        e_x1x2: raw[5] / z,
    }
    .validated(d * d)
}

fn require_two_particle(shape: Shape) -> Result<()> {
    if shape != Shape::TwoParticleBox {
        return Err(Error::InvalidInput(format!(
            "the center-of-mass covariance is defined for the two-particle box, not {}",
            shape.name()
        )));
    }
    Ok(())
}

/// Cov(Xc, x) of a density over a center-of-mass domain: the density is
/// restricted to the domain, renormalized, and the expectations of Xc * x,
/// Xc, and x are taken by Gauss quadrature. The density closure receives
/// (Xc, x).
pub fn covariance_of_com_density(
    domain: &ComDomain,
    density: impl Fn(f64, f64) -> f64,
    quad: &QuadConfig,
) -> Result<f64> {
    let d = domain.spec().d;
    let base = quad.refine_tol.unwrap_or(DEFAULT_REFINE_TOL);
    let integral = |f: &dyn Fn(f64, f64) -> f64, degree: i32, what: &str| {
        integrate_checked(
            |order| domain.quad_rule(&GaussLegendre::new(order)),
            |xc, x| f(xc, x) * density(xc, x),
            quad.order,
            base * d.powi(degree),
            what,
        )
        .map(|(v, _)| v)
    };
    let z = integral(&|_, _| 1.0, 0, "covariance quadrature: norm")?;
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "density carries no probability mass on the domain (integral = {z})"
        )));
    }
    let e_xc = integral(&|xc, _| xc, 1, "covariance quadrature: E[Xc]")? / z;
    let e_x = integral(&|_, x| x, 1, "covariance quadrature: E[x]")? / z;
    let e_xcx = integral(&|xc, x| xc * x, 2, "covariance quadrature: E[Xc x]")? / z;
    Ok(e_xcx - e_xc * e_x)
}

/// Cov(Xc, x, t) = E[Xc x] - E[Xc] E[x], with the expectations integrated
/// against |state(t)|^2 over the center-of-mass domain.
pub fn covariance_direct(source: MomentSource, t: f64, quad: &QuadConfig) -> Result<f64> {
    require_two_particle(source.shape())?;
    source.check_time(t)?;
    let spec = source.spec();
    match source {
        MomentSource::Superposition(s) => {
            let evolved = evolve_superposition(s, t);
            let domain = com_domain(&spec, false);
            covariance_of_com_density(
                &domain,
                |xc, x| {
                    evolved
                        .eval_com(xc, x)
                        .expect("two-particle shape checked")
                        .norm_sqr()
                },
                quad,
            )
        }
        MomentSource::Grid(g) => {
            let mut sums = [NeumaierSum::new(); 4];
            for i in 0..g.nx() {
                for j in 0..g.ny() {
                    let rho = g.weight(i, j) * g.value(i, j).norm_sqr();
                    let p = g.node(i, j);
                    let (xc, x) = to_com(p.u, p.v, &spec);
                    sums[0].add(rho);
                    sums[1].add(xc * rho);
                    sums[2].add(x * rho);
                    sums[3].add(xc * x * rho);
                }
            }
            let z = sums[0].value();
            if !z.is_finite() || z <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "state carries no probability mass (norm^2 integral = {z})"
                )));
            }
            Ok(sums[3].value() / z - (sums[1].value() / z) * (sums[2].value() / z))
        }
    }
}

/// Cov(Xc, x, t) assembled from particle-coordinate moments:
/// (m1/M) Var(x1) - (m2/M) Var(x2) + ((m2 - m1)/M) Cov(x1, x2).
pub fn covariance_expanded(source: MomentSource, t: f64, quad: &QuadConfig) -> Result<f64> {
    require_two_particle(source.shape())?;
    let spec = source.spec();
    Ok(moments(source, t, quad)?.cov_com_rel(&spec))
}

/// A one-dimensional Gaussian packet with a real envelope:
/// position mean `center`, position standard deviation `sigma`, and mean
/// momentum `momentum`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center: f64,
    pub sigma: f64,
    pub momentum: f64,
}

impl GaussianPacket {
    pub fn new(center: f64, sigma: f64, momentum: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) || !center.is_finite() || !momentum.is_finite() {
            return Err(Error::InvalidInput(format!(
                "Gaussian packet needs finite parameters and sigma > 0, \
                 got center = {center}, sigma = {sigma}, momentum = {momentum}"
            )));
        }
        Ok(GaussianPacket {
            center,
            sigma,
            momentum,
        })
    }

    pub fn var_x(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Momentum variance of a minimum-uncertainty packet.
    pub fn var_p(&self, hbar: f64) -> f64 {
        hbar * hbar / (4.0 * self.sigma * self.sigma)
    }

    /// Symmetrized position-momentum covariance (x p + p x)/2 - <x><p>;
    /// zero for a real envelope.
    pub fn cov_xp(&self) -> f64 {
        0.0
    }

    /// Normalized position density.
    pub fn density(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.sigma;
        (-0.5 * u * u).exp() / (self.sigma * (2.0 * PI).sqrt())
    }
}

/// Product of two independent Gaussian packets, one per particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeInitialState {
    pub p1: GaussianPacket,
    pub p2: GaussianPacket,
}

impl FreeInitialState {
    pub fn new(p1: GaussianPacket, p2: GaussianPacket) -> Self {
        FreeInitialState { p1, p2 }
    }

    /// Joint position density at (x1, x2).
    pub fn density(&self, x1: f64, x2: f64) -> f64 {
        self.p1.density(x1) * self.p2.density(x2)
    }
}

/// Cov(Xc, x, t) for free evolution of a Gaussian product state:
///
/// Cov(t) = Cov(0)
///        + t [Cov(Xc, p)/mu + Cov(x, P)/M]
///        + t^2 Cov(P, p)/(M mu),
///
/// with P = p1 + p2, p = (m2 p1 - m1 p2)/M, symmetrized mixed moments, and
/// every covariance evaluated from the packet description. The result is
/// exactly quadratic in t.
pub fn covariance_free(init: &FreeInitialState, spec: &BoxSpec, t: f64) -> f64 {
    let (m1, m2) = (spec.m1, spec.m2);
    let m = spec.total_mass();
    let mu = spec.reduced_mass();
    let (v1, v2) = (init.p1.var_x(), init.p2.var_x());
    let (w1, w2) = (init.p1.var_p(spec.hbar), init.p2.var_p(spec.hbar));
    let (c1, c2) = (init.p1.cov_xp(), init.p2.cov_xp());
    let cov0 = (m1 * v1 - m2 * v2) / m;
    let cov_xc_p = m1 * m2 * (c1 - c2) / (m * m);
    let cov_x_ptot = c1 - c2;
    let cov_ptot_p = (m2 * w1 - m1 * w2) / m;
    cov0 + t * (cov_xc_p / mu + cov_x_ptot / m) + t * t * cov_ptot_p / (m * mu)
}

/// The two-mode example state (Phi_11 + Phi_22)/sqrt(2) in the two-particle
/// box.
pub fn two_mode_example_state(spec: &BoxSpec) -> Result<Superposition> {
    let one = Complex64::new(1.0, 0.0);
    let s11 = EigenState::new(Shape::TwoParticleBox, QuantumNumbers::new(1, 1)?, *spec)?;
    let s22 = EigenState::new(Shape::TwoParticleBox, QuantumNumbers::new(2, 2)?, *spec)?;
    Superposition::new(vec![(one, s11), (one, s22)])
}

/// Beat period of the two-mode example state: 2 pi hbar / |E11 - E22|
/// = 4 d^2 mu / (3 pi hbar).
pub fn two_mode_example_period(spec: &BoxSpec) -> f64 {
    4.0 * spec.d * spec.d * spec.reduced_mass() / (3.0 * PI * spec.hbar)
}

/// Phase angle (E11 - E22) t / hbar of the two-mode example state, with
/// E11 - E22 = -3 hbar^2 pi^2 / (2 d^2 mu).
fn two_mode_phase(spec: &BoxSpec, t: f64) -> f64 {
    let de = -3.0 * spec.hbar * spec.hbar * PI * PI / (2.0 * spec.d * spec.d * spec.reduced_mass());
    de * t / spec.hbar
}

/// Full-domain covariance of the two-mode example state in closed form:
///
/// Cov(t) = ((m1 - m2)/M) d^2 [1/12 - 5/(16 pi^2) - (256/(81 pi^4)) cos Theta],
///
/// Theta = (E11 - E22) t / hbar. `covariance_direct` reproduces this to
/// quadrature accuracy.
pub fn covariance_example_exact(spec: &BoxSpec, t: f64) -> f64 {
    let cos = two_mode_phase(spec, t).cos();
    let bracket = 1.0 / 12.0 - 5.0 / (16.0 * PI * PI) - 256.0 / (81.0 * PI.powi(4)) * cos;
    (spec.m1 - spec.m2) / spec.total_mass() * spec.d * spec.d * bracket
}

/// Reference trace for the two-mode example state:
///
/// -(d^2 (m1 - m2)/(165888 pi^4 M)) [(668288 - 61440 pi^2) cos Theta
///   + 102400 cos^2 Theta + 8640 pi^2 - 4608 pi^4 + 50625].
///
/// This expression equals the covariance of the density restricted to the
/// x >= 0 half of the domain and renormalized, not the full-domain value;
/// `covariance_of_com_density` over the impenetrable domain reproduces it
/// exactly, and trace output reports its gap from `covariance_direct`.
pub fn covariance_closed_form_example(spec: &BoxSpec, t: f64) -> f64 {
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let cos = two_mode_phase(spec, t).cos();
    let bracket = (668288.0 - 61440.0 * pi2) * cos
        + 102400.0 * cos * cos
        + 8640.0 * pi2
        - 4608.0 * pi4
        + 50625.0;
    -(spec.d * spec.d * (spec.m1 - spec.m2)) / (165888.0 * pi4 * spec.total_mass()) * bracket
}
