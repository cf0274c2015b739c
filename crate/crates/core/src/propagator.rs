//! Theta-form Green's functions for the four billiard shapes, a truncated
//! spectral-sum oracle, and grid-based state propagation.
//!
//! Every kernel factorizes along lattice axes: the square and rectangle
//! along the coordinate axes, the rhombus and triangle along the rotated
//! axes u = x1 + x2, v = x1 - x2 (the triangle through antisymmetric
//! extension to the full rhombus). Grid propagation therefore applies two
//! one-dimensional kernel matrices instead of a dense 4D sum, and the
//! trapezoid rule on the lattice is spectrally accurate because every
//! integrand is a trigonometric polynomial that is periodic across the
//! lattice span.
//!
//! Kernel amplitude convention: expanding the theta differences termwise
//! gives theta3(pi(x-x')/2s) - theta3(pi(x+x')/2s) =
//! 4 sum_k q^(k^2) sin(k pi x/s) sin(k pi x'/s), so the projector kernel
//! built from unit-norm modes carries 1/(4s) per axis (norm^2/16 overall),
//! not norm^2/4. The spectral oracle fixes this scale; see the
//! oracle-equivalence tests.

use num_complex::Complex64;
use std::f64::consts::PI;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::eigenstates::{energy, EigenState, QuantumNumbers, Superposition};
use crate::error::{Error, Result};
use crate::geometry::{BoxSpec, Point2, Region, Shape, ShapeDomain};
use crate::quadrature::NeumaierSum;
use crate::theta::{nome_from_time, theta3, Nome, ThetaParams};

/// One axis factor of a separable kernel: the 1D box propagator on
/// [-s, s] restricted to the sin(k pi x / s) family,
/// (1/4s) [theta3(pi(x-x')/2s, q) - theta3(pi(x+x')/2s, q)].
fn axis_kernel(x: f64, xp: f64, s: f64, q: &Nome, params: &ThetaParams) -> Result<Complex64> {
    let minus = Complex64::new(PI * (x - xp) / (2.0 * s), 0.0);
    let plus = Complex64::new(PI * (x + xp) / (2.0 * s), 0.0);
    let tm = theta3(minus, q, params)?.value;
    let tp = theta3(plus, q, params)?.value;
    Ok((tm - tp) / (4.0 * s))
}

fn rhombus_kernel(
    p: Point2,
    pp: Point2,
    q: &Nome,
    spec: &BoxSpec,
    params: &ThetaParams,
) -> Result<Complex64> {
    let s = 2.0f64.sqrt() * spec.d;
    let gu = axis_kernel(p.u + p.v, pp.u + pp.v, s, q, params)?;
    let gv = axis_kernel(p.u - p.v, pp.u - pp.v, s, q, params)?;
    // The rotated measure du dv = 2 dx1 dx2 puts a factor 2 on the product
    // of the 1D kernels.
    Ok(2.0 * gu * gv)
}

/// Time-domain Green's function of `shape` between `p_prime` and `p`,
/// assembled from theta3 factors. The two-particle box is excluded: its
/// states evolve exactly through [`evolve_superposition`].
pub fn greens_theta(
    shape: Shape,
    p: Point2,
    p_prime: Point2,
    t: f64,
    spec: &BoxSpec,
    params: &ThetaParams,
) -> Result<Complex64> {
    spec.validate()?;
    params.validate()?;
    match shape {
        Shape::TwoParticleBox => Err(Error::InvalidInput(
            "the two-particle box has no theta kernel here; evolve superpositions instead".into(),
        )),
        Shape::Square => {
            let q = nome_from_time(t, spec.billiard_mass(), spec.d, spec, 1, params.epsilon)?;
            Ok(axis_kernel(p.u, p_prime.u, spec.d, &q, params)?
                * axis_kernel(p.v, p_prime.v, spec.d, &q, params)?)
        }
        Shape::Rectangle => {
            let qa = nome_from_time(t, spec.a, spec.d, spec, 1, params.epsilon)?;
            let qb = nome_from_time(t, spec.b, spec.d, spec, 1, params.epsilon)?;
            let sa = spec.d * spec.a.sqrt();
            let sb = spec.d * spec.b.sqrt();
            Ok(axis_kernel(p.u, p_prime.u, sa, &qa, params)?
                * axis_kernel(p.v, p_prime.v, sb, &qb, params)?)
        }
        Shape::Rhombus => {
            let q = nome_from_time(t, spec.billiard_mass(), spec.d, spec, 1, params.epsilon)?;
            rhombus_kernel(p, p_prime, &q, spec, params)
        }
        Shape::Triangle => {
            let q = nome_from_time(t, spec.billiard_mass(), spec.d, spec, 1, params.epsilon)?;
            let direct = rhombus_kernel(p, p_prime, &q, spec, params)?;
            let image = rhombus_kernel(Point2::new(-p.u, p.v), p_prime, &q, spec, params)?;
            Ok(direct - image)
        }
    }
}

/// A kernel evaluation request: shape, endpoints, time, and series controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensEval {
    pub shape: Shape,
    pub source: Point2,
    pub target: Point2,
    pub t: f64,
    pub params: ThetaParams,
}

impl GreensEval {
    /// Classifies (target, source) against the shape's boundary.
    pub fn classify(&self, spec: &BoxSpec) -> (Region, Region) {
        let domain = ShapeDomain::new(self.shape, *spec);
        let tol = spec.boundary_tol();
        (
            domain.contains(self.target, tol),
            domain.contains(self.source, tol),
        )
    }

    pub fn eval(&self, spec: &BoxSpec) -> Result<Complex64> {
        greens_theta(
            self.shape,
            self.target,
            self.source,
            self.t,
            spec,
            &self.params,
        )
    }
}

/// Truncated spectral sum sum_N psi_N(p) psi_N(p') e^(-i E_N t / hbar)
/// with the damping factor e^(-pi epsilon (N1^2 + N2^2)) matched to a
/// theta-side nome of modulus e^(-pi epsilon). Independent of the theta
/// path: it goes through the eigenstate closed forms and certified
/// energies.
pub fn greens_spectral_oracle(
    shape: Shape,
    p: Point2,
    p_prime: Point2,
    t: f64,
    spec: &BoxSpec,
    n_cut: u32,
    epsilon: f64,
) -> Result<Complex64> {
    spec.validate()?;
    if n_cut < 1 {
        return Err(Error::InvalidInput("n_cut must be >= 1".into()));
    }
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for n1 in 1..=n_cut {
        for n2 in 1..=n_cut {
            if shape == Shape::Triangle && n1 >= n2 {
                continue;
            }
            let qn = QuantumNumbers::new(n1, n2)?;
            let state = EigenState::new(shape, qn, *spec)?;
            let e = energy(shape, qn, spec)?;
            let damping = (-PI * epsilon * ((n1 * n1 + n2 * n2) as f64)).exp();
            let phase = Complex64::from_polar(damping, -e * t / spec.hbar);
            let term = phase * (state.eval(p) * state.eval(p_prime));
            re.add(term.re);
            im.add(term.im);
        }
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Upper bound on the damped spectral tail dropped beyond `n_cut`, from the
/// geometric majorant e^(-pi eps N^2) <= e^(-pi eps (n+1)^2) r^(N-n-1) with
/// r = e^(-pi eps (2n+1)).
pub fn spectral_tail_estimate(shape: Shape, spec: &BoxSpec, n_cut: u32, epsilon: f64) -> f64 {
    if epsilon <= 0.0 {
        return f64::INFINITY;
    }
    let sum_beyond = |n: u32| -> f64 {
        let pe = PI * epsilon;
        let head = (-pe * ((n + 1) * (n + 1)) as f64).exp();
        let ratio = (-pe * (2 * n + 1) as f64).exp();
        head / (1.0 - ratio)
    };
    let amp = match shape {
        Shape::TwoParticleBox => 2.0 / spec.d,
        Shape::Square | Shape::Rhombus => 1.0 / spec.d,
        Shape::Triangle => 2.0 / spec.d,
        Shape::Rectangle => 1.0 / (spec.d * (spec.a * spec.b).powf(0.25)),
    };
    let s_tail = sum_beyond(n_cut);
    let s_all = sum_beyond(0);
    amp * amp * (2.0 * s_all * s_tail + s_tail * s_tail)
}

/// Exact unitary evolution of a superposition: each coefficient picks up
/// e^(-i E t / hbar). Norms are preserved exactly.
pub fn evolve_superposition(s: &Superposition, t: f64) -> Superposition {
    let terms = s
        .terms()
        .iter()
        .map(|(c, state)| {
            let phase = Complex64::from_polar(1.0, -state.energy() * t / state.spec().hbar);
            (c * phase, *state)
        })
        .collect();
    Superposition::new(terms).expect("phase evolution preserves the weight sum")
}

/// How lattice coordinates map to the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LatticeKind {
    /// Nodes at (u_i, v_j) directly.
    Axis,
    /// Nodes at ((u_i + v_j)/2, (u_i - v_j)/2); used by rhombus and
    /// triangle so their kernels separate along lattice axes.
    Rotated,
}

/// Complex samples on a shape-adapted lattice with trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    domain: ShapeDomain,
    kind: LatticeKind,
    nx: usize,
    ny: usize,
    us: Vec<f64>,
    vs: Vec<f64>,
    wu: Vec<f64>,
    wv: Vec<f64>,
    jac: f64,
    values: Vec<Complex64>,
    t: f64,
    defect: f64,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    let mut xs: Vec<f64> = (0..n).map(|k| a + k as f64 * h).collect();
    if a == -b {
        // Mirror the lower half so the grid is exactly symmetric; the
        // rotated-lattice reflection logic indexes mirrored nodes.
        for k in 0..n / 2 {
            xs[n - 1 - k] = -xs[k];
        }
        if n % 2 == 1 {
            xs[n / 2] = 0.0;
        }
    }
    xs
}

fn trapezoid_weights(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    (0..n)
        .map(|k| if k == 0 || k == n - 1 { 0.5 * h } else { h })
        .collect()
}

impl GridState {
    fn lattice(domain: &ShapeDomain, nx: usize, ny: usize) -> Result<(LatticeKind, Vec<f64>, Vec<f64>, f64)> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidInput(format!(
                "lattice needs at least 2 nodes per axis, got {nx} x {ny}"
            )));
        }
        let spec = domain.spec;
        let d = spec.d;
        Ok(match domain.kind {
            Shape::TwoParticleBox => (
                LatticeKind::Axis,
                linspace(0.0, d, nx),
                linspace(0.0, d, ny),
                1.0,
            ),
            Shape::Square => (
                LatticeKind::Axis,
                linspace(-d, d, nx),
                linspace(-d, d, ny),
                1.0,
            ),
            Shape::Rectangle => {
                let sa = d * spec.a.sqrt();
                let sb = d * spec.b.sqrt();
                (
                    LatticeKind::Axis,
                    linspace(-sa, sa, nx),
                    linspace(-sb, sb, ny),
                    1.0,
                )
            }
            Shape::Rhombus | Shape::Triangle => {
                if domain.kind == Shape::Triangle && nx != ny {
                    return Err(Error::InvalidInput(format!(
                        "triangle lattices must be square for reflection, got {nx} x {ny}"
                    )));
                }
                let s = 2.0f64.sqrt() * d;
                (
                    LatticeKind::Rotated,
                    linspace(-s, s, nx),
                    linspace(-s, s, ny),
                    0.5,
                )
            }
        })
    }

    fn build(
        domain: ShapeDomain,
        nx: usize,
        ny: usize,
        f: &mut dyn FnMut(Point2) -> Complex64,
        normalize: bool,
    ) -> Result<GridState> {
        let (kind, us, vs, jac) = Self::lattice(&domain, nx, ny)?;
        let wu = trapezoid_weights(&us);
        let wv = trapezoid_weights(&vs);
        let tol = domain.spec.boundary_tol();
        let mut values = vec![Complex64::new(0.0, 0.0); nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                let p = node_of(kind, us[i], vs[j]);
                if domain.contains(p, tol) == Region::Interior {
                    values[i * ny + j] = f(p);
                }
            }
        }
        let mut state = GridState {
            domain,
            kind,
            nx,
            ny,
            us,
            vs,
            wu,
            wv,
            jac,
            values,
            t: 0.0,
            defect: 0.0,
        };
        if normalize {
            let before = state.norm_sq();
            if !(before > 0.0 && before.is_finite()) {
                return Err(Error::InvalidInput(
                    "grid state has no interior support to normalize".into(),
                ));
            }
            state.normalize();
            state.defect = (before - 1.0).abs();
        }
        Ok(state)
    }

    /// Samples `f` at interior lattice nodes (exterior and boundary nodes
    /// hold 0) and normalizes to unit lattice norm. The deviation of the
    /// raw sampling from unit norm is kept in [`GridState::construction_defect`].
    pub fn from_fn(
        domain: ShapeDomain,
        nx: usize,
        ny: usize,
        mut f: impl FnMut(Point2) -> Complex64,
    ) -> Result<GridState> {
        Self::build(domain, nx, ny, &mut f, true)
    }

    /// Samples a superposition at t = 0.
    pub fn from_superposition(s: &Superposition, nx: usize, ny: usize) -> Result<GridState> {
        let domain = ShapeDomain::new(s.shape(), *s.spec());
        Self::build(domain, nx, ny, &mut |p| s.eval(p), true)
    }

    pub fn domain(&self) -> &ShapeDomain {
        &self.domain
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// |1 - raw lattice norm^2| measured before the constructor rescaled.
    pub fn construction_defect(&self) -> f64 {
        self.defect
    }

    pub fn node(&self, i: usize, j: usize) -> Point2 {
        node_of(self.kind, self.us[i], self.vs[j])
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.ny + j]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Lattice quadrature weight of node (i, j) in plane measure.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.jac * self.wu[i] * self.wv[j]
    }

    pub fn norm_sq(&self) -> f64 {
        let mut acc = NeumaierSum::new();
        for i in 0..self.nx {
            for j in 0..self.ny {
                acc.add(self.weight(i, j) * self.values[i * self.ny + j].norm_sqr());
            }
        }
        acc.value()
    }

    pub fn normalize(&mut self) {
        let scale = self.norm_sq().sqrt();
        for z in &mut self.values {
            *z /= scale;
        }
    }

    /// Lattice inner product <self|other> (conjugate on self).
    pub fn inner(&self, other: &GridState) -> Complex64 {
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for i in 0..self.nx {
            for j in 0..self.ny {
                let z = self.values[i * self.ny + j].conj() * other.values[i * self.ny + j];
                let w = self.weight(i, j);
                re.add(w * z.re);
                im.add(w * z.im);
            }
        }
        Complex64::new(re.value(), im.value())
    }

    /// CSV serialization: header `x1,x2,re,im`, row-major lattice order,
    /// 17 significant digits.
    pub fn to_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "x1,x2,re,im")?;
        for i in 0..self.nx {
            for j in 0..self.ny {
                let p = self.node(i, j);
                let z = self.values[i * self.ny + j];
                writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", p.u, p.v, z.re, z.im)?;
            }
        }
        Ok(())
    }
}

fn node_of(kind: LatticeKind, u: f64, v: f64) -> Point2 {
    match kind {
        LatticeKind::Axis => Point2::new(u, v),
        LatticeKind::Rotated => Point2::new(0.5 * (u + v), 0.5 * (u - v)),
    }
}

fn map_rows<T: Send>(n: usize, parallel: bool, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        if parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// One axis kernel matrix with source weights folded in:
/// M[i][k] = g(c_i, c_k) w_k.
fn kernel_matrix(
    coords: &[f64],
    weights: &[f64],
    s: f64,
    q: &Nome,
    params: &ThetaParams,
    parallel: bool,
) -> Result<Vec<Complex64>> {
    let n = coords.len();
    let rows: Vec<Result<Vec<Complex64>>> = map_rows(n, parallel, |i| {
        let mut row = Vec::with_capacity(n);
        for k in 0..n {
            row.push(axis_kernel(coords[i], coords[k], s, q, params)? * weights[k]);
        }
        Ok(row)
    });
    let mut m = Vec::with_capacity(n * n);
    for row in rows {
        m.extend(row?);
    }
    Ok(m)
}

/// out = M1 (V M2^T): V is nx x ny row-major, M1 nx x nx, M2 ny x ny.
fn apply_separable(
    m1: &[Complex64],
    m2: &[Complex64],
    v: &[Complex64],
    nx: usize,
    ny: usize,
    parallel: bool,
) -> Vec<Complex64> {
    let tmp_rows: Vec<Vec<Complex64>> = map_rows(nx, parallel, |i| {
        (0..ny)
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..ny {
                    acc += v[i * ny + l] * m2[j * ny + l];
                }
                acc
            })
            .collect()
    });
    let out_rows: Vec<Vec<Complex64>> = map_rows(nx, parallel, |i| {
        (0..ny)
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..nx {
                    acc += m1[i * nx + k] * tmp_rows[k][j];
                }
                acc
            })
            .collect()
    });
    let mut out = Vec::with_capacity(nx * ny);
    for row in out_rows {
        out.extend(row);
    }
    out
}

fn propagate_impl(initial: &GridState, t: f64, params: &ThetaParams, parallel: bool) -> Result<GridState> {
    params.validate()?;
    if initial.t != 0.0 {
        return Err(Error::InvalidInput(format!(
            "propagation starts from t = 0 grids, got t = {}",
            initial.t
        )));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidInput(format!(
            "propagation time must be >= 0, got {t}"
        )));
    }
    let spec = initial.domain.spec;
    let shape = initial.domain.kind;
    let (s1, s2, q1, q2) = match shape {
        Shape::TwoParticleBox => {
            return Err(Error::InvalidInput(
                "the two-particle box propagates through evolve_superposition".into(),
            ))
        }
        Shape::Square => {
            let q = nome_from_time(t, spec.billiard_mass(), spec.d, &spec, 1, params.epsilon)?;
            (spec.d, spec.d, q, q)
        }
        Shape::Rectangle => (
            spec.d * spec.a.sqrt(),
            spec.d * spec.b.sqrt(),
            nome_from_time(t, spec.a, spec.d, &spec, 1, params.epsilon)?,
            nome_from_time(t, spec.b, spec.d, &spec, 1, params.epsilon)?,
        ),
        Shape::Rhombus | Shape::Triangle => {
            let s = 2.0f64.sqrt() * spec.d;
            let q = nome_from_time(t, spec.billiard_mass(), spec.d, &spec, 1, params.epsilon)?;
            (s, s, q, q)
        }
    };

    // The rotated measure's Jacobian cancels against the factor 2 relating
    // the rhombus kernel to the product of axis kernels, so every shape
    // reduces to plain weighted axis matrices.
    let source = if shape == Shape::Triangle {
        extend_antisymmetric(initial)
    } else {
        initial.values.clone()
    };
    let m1 = kernel_matrix(&initial.us, &initial.wu, s1, &q1, params, parallel)?;
    let m2 = if initial.us == initial.vs && s1 == s2 && q1 == q2 {
        m1.clone()
    } else {
        kernel_matrix(&initial.vs, &initial.wv, s2, &q2, params, parallel)?
    };
    let mut values = apply_separable(&m1, &m2, &source, initial.nx, initial.ny, parallel);

    let tol = spec.boundary_tol();
    for i in 0..initial.nx {
        for j in 0..initial.ny {
            let p = node_of(initial.kind, initial.us[i], initial.vs[j]);
            if initial.domain.contains(p, tol) != Region::Interior {
                values[i * initial.ny + j] = Complex64::new(0.0, 0.0);
            }
        }
    }

    Ok(GridState {
        domain: initial.domain,
        kind: initial.kind,
        nx: initial.nx,
        ny: initial.ny,
        us: initial.us.clone(),
        vs: initial.vs.clone(),
        wu: initial.wu.clone(),
        wv: initial.wv.clone(),
        jac: initial.jac,
        values,
        t,
        defect: initial.defect,
    })
}

/// Odd extension of a triangle grid across x1 = 0 onto the full rhombus
/// lattice: the reflection x1 -> -x1 maps (u, v) to (-v, -u), i.e. lattice
/// node (i, j) to (n-1-j, n-1-i).
fn extend_antisymmetric(state: &GridState) -> Vec<Complex64> {
    let n = state.nx;
    let mut out = state.values.clone();
    for i in 0..n {
        for j in 0..n {
            let p = node_of(state.kind, state.us[i], state.vs[j]);
            if p.u < 0.0 {
                out[i * n + j] = -state.values[(n - 1 - j) * n + (n - 1 - i)];
            }
        }
    }
    out
}

/// Propagates a t = 0 grid to time `t` by quadrature of the theta kernel
/// against the samples: Psi(t) = integral of G * Psi(0). The result is raw
/// (not renormalized) so the damping loss stays observable; call
/// [`GridState::normalize`] to rescale. Parallel over lattice rows when the
/// `parallel` feature is on.
pub fn propagate_grid(initial: &GridState, t: f64, params: &ThetaParams) -> Result<GridState> {
    propagate_impl(initial, t, params, cfg!(feature = "parallel"))
}

/// Sequential reference path of [`propagate_grid`]; bit-identical results.
pub fn propagate_grid_seq(initial: &GridState, t: f64, params: &ThetaParams) -> Result<GridState> {
    propagate_impl(initial, t, params, false)
}

/// Explicit data-parallel path of [`propagate_grid`].
#[cfg(feature = "parallel")]
pub fn propagate_grid_par(initial: &GridState, t: f64, params: &ThetaParams) -> Result<GridState> {
    propagate_impl(initial, t, params, true)
}
