//! Jacobi theta_3 for complex argument and nome:
//!
//! ```text
//! theta_3(zeta, q) = 1 + 2 * sum_{n>=1} cos(2 n zeta) q^(n^2)
//! ```
//!
//! Real-time propagators put |q| on the unit circle, where the series does
//! not converge absolutely. Evaluation therefore runs with a nome damping
//! parameter epsilon > 0 (|q| = e^(-pi*factor*epsilon)); undamped nomes are
//! accepted only through an explicit constructor and fail loudly when the
//! series does not settle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::BoxSpec;
use crate::quadrature::NeumaierSum;

/// Truncation controls for the theta_3 series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams {
    /// Hard cap on the number of series terms.
    pub n_max: usize,
    /// Stop once the term-magnitude envelope falls below this.
    pub tol: f64,
    /// Nome damping used when building nomes from physical time.
    pub epsilon: f64,
}

impl Default for ThetaParams {
    fn default() -> Self {
        ThetaParams {
            n_max: 256,
            tol: 1e-14,
            epsilon: 1e-3,
        }
    }
}

impl ThetaParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::InvalidInput("ThetaParams.n_max must be >= 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "ThetaParams.tol must be positive, got {}",
                self.tol
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "ThetaParams.epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Series nome q with |q| <= 1. The damped constructor insists on |q| < 1;
/// unit-modulus nomes must be requested explicitly via [`Nome::undamped`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nome {
    q: Complex64,
    allow_unit: bool,
}

impl Nome {
    /// A strictly damped nome, |q| < 1.
    pub fn new(q: Complex64) -> Result<Self> {
        if !q.re.is_finite() || !q.im.is_finite() {
            return Err(Error::InvalidInput("nome must be finite".into()));
        }
        if q.norm() >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "damped nome requires |q| < 1, got |q| = {}",
                q.norm()
            )));
        }
        Ok(Nome {
            q,
            allow_unit: false,
        })
    }

    /// Opt-in for |q| = 1 (real-time, undamped). Series evaluation with such
    /// a nome reports NonConvergent unless the argument forces termination.
    pub fn undamped(q: Complex64) -> Result<Self> {
        if !q.re.is_finite() || !q.im.is_finite() {
            return Err(Error::InvalidInput("nome must be finite".into()));
        }
        if q.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidInput(format!(
                "nome requires |q| <= 1, got |q| = {}",
                q.norm()
            )));
        }
        Ok(Nome {
            q,
            allow_unit: true,
        })
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn modulus(&self) -> f64 {
        self.q.norm()
    }
}

/// Result of a truncated theta_3 evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEval {
    pub value: Complex64,
    /// Number of series terms actually summed (n runs 1..=terms_used).
    pub terms_used: usize,
    /// Upper bound on the dropped tail: the real-argument bound, and for
    /// Im(zeta) != 0 the cosh-scaled variant whose geometric ratio is
    /// widened to |q|^(2n+3) e^(2 |Im zeta|) so the growth of cosh across
    /// the tail stays majorized.
    pub tail_estimate: f64,
    /// Whether the tolerance cut fired before n_max.
    pub converged: bool,
}

/// Evaluate theta_3(zeta, q) by direct summation in ascending n with
/// compensated accumulation. Terms are majorized by
/// 2 |q|^(n^2) cosh(2 n Im zeta), which is the stopping criterion (immune to
/// accidental zeros of the cosine).
pub fn theta3(zeta: Complex64, q: &Nome, params: &ThetaParams) -> Result<ThetaEval> {
    params.validate()?;
    if !zeta.re.is_finite() || !zeta.im.is_finite() {
        return Err(Error::InvalidInput("theta3 argument must be finite".into()));
    }

    let qv = q.q();
    let qabs = qv.norm();
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    re.add(1.0);

    if qabs == 0.0 {
        return Ok(ThetaEval {
            value: Complex64::new(1.0, 0.0),
            terms_used: 0,
            tail_estimate: 0.0,
            converged: true,
        });
    }

    let qsq = qv * qv;
    let mut qn2 = qv; // q^(n^2) for the current n
    let mut qodd = qv * qsq; // q^(2n+1), consumed when stepping n -> n+1
    let two_im = 2.0 * zeta.im;
    let mut first_envelope = 0.0;
    let mut last_envelope = 0.0;
    let mut terms_used = params.n_max;
    let mut converged = false;

    for n in 1..=params.n_max {
        let envelope = 2.0 * qn2.norm() * (n as f64 * two_im).cosh();
        if n == 1 {
            first_envelope = envelope;
        }
        last_envelope = envelope;
        if envelope > 1e140 {
            return Err(Error::Overflow {
                term: n,
                magnitude: envelope,
            });
        }
        let term = 2.0 * (zeta * (2 * n) as f64).cos() * qn2;
        re.add(term.re);
        im.add(term.im);
        if envelope < params.tol {
            terms_used = n;
            converged = true;
            break;
        }
        qn2 *= qodd;
        qodd *= qsq;
    }

    if !converged {
        let grew = last_envelope > first_envelope;
        if zeta.im != 0.0 && grew {
            return Err(Error::Overflow {
                term: params.n_max,
                magnitude: last_envelope,
            });
        }
        return Err(Error::NonConvergent {
            q_modulus: qabs,
            last_term: last_envelope,
            terms: params.n_max,
            tol: params.tol,
        });
    }

    let tail = if zeta.im == 0.0 {
        theta3_tail_bound_modulus(qabs, terms_used)
    } else {
        theta3_tail_bound_cosh(qabs, terms_used, zeta.im)
    };
    Ok(ThetaEval {
        value: Complex64::new(re.value(), im.value()),
        terms_used,
        tail_estimate: tail,
        converged: true,
    })
}

/// Upper bound on the tail dropped after term n, for real arguments:
/// 2 |q|^((n+1)^2) / (1 - |q|^(2n+3)). The bound follows from
/// k^2 - (n+1)^2 >= (k - n - 1)(2n + 3) for k > n, which majorizes the tail
/// by a geometric series. Real arguments only; complex arguments need the
/// cosh-scaled variant reported in [`ThetaEval::tail_estimate`].
pub fn theta3_tail_bound(q: &Nome, n: usize) -> f64 {
    theta3_tail_bound_modulus(q.modulus(), n)
}

fn theta3_tail_bound_modulus(qabs: f64, n: usize) -> f64 {
    if qabs == 0.0 {
        return 0.0;
    }
    if qabs >= 1.0 {
        return f64::INFINITY;
    }
    let log_q = qabs.ln();
    let head = 2.0 * (((n + 1) * (n + 1)) as f64 * log_q).exp();
    let denom = 1.0 - ((2 * n + 3) as f64 * log_q).exp();
    head / denom
}

/// Tail majorant for complex arguments. Each dropped term is at most
/// 2 |q|^(k^2) cosh(2 k Im zeta); pulling out the k = n+1 factors leaves a
/// geometric series of ratio |q|^(2n+3) e^(2 |Im zeta|), infinite when that
/// ratio reaches 1.
fn theta3_tail_bound_cosh(qabs: f64, n: usize, im: f64) -> f64 {
    if qabs == 0.0 {
        return 0.0;
    }
    if qabs >= 1.0 {
        return f64::INFINITY;
    }
    let log_q = qabs.ln();
    let head = 2.0 * (((n + 1) * (n + 1)) as f64 * log_q).exp();
    let cosh = (2.0 * (n + 1) as f64 * im).cosh();
    let ratio = ((2 * n + 3) as f64 * log_q + 2.0 * im.abs()).exp();
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    head * cosh / (1.0 - ratio)
}

/// Nome for evolution time t of a particle of mass `mass` in a box of length
/// scale `d`: tau = -pi hbar t / (2 mass d^2) + i epsilon and
/// q = e^(i pi factor tau), so |q| = e^(-pi factor epsilon). `factor` is 1
/// for every kernel in this crate; 2 is kept for the doubled-energy
/// convention that the triangle billiard is sometimes written with.
pub fn nome_from_time(
    t: f64,
    mass: f64,
    d: f64,
    spec: &BoxSpec,
    factor: u8,
    epsilon: f64,
) -> Result<Nome> {
    if !(factor == 1 || factor == 2) {
        return Err(Error::InvalidInput(format!(
            "nome factor must be 1 or 2, got {factor}"
        )));
    }
    if !(mass > 0.0 && d > 0.0) {
        return Err(Error::InvalidInput(
            "nome_from_time requires positive mass and length".into(),
        ));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "nome damping must be >= 0, got {epsilon}"
        )));
    }
    if !t.is_finite() {
        return Err(Error::InvalidInput("time must be finite".into()));
    }
    let tau_re = -std::f64::consts::PI * spec.hbar * t / (2.0 * mass * d * d);
    let f = factor as f64;
    let modulus = (-std::f64::consts::PI * f * epsilon).exp();
    let phase = std::f64::consts::PI * f * tau_re;
    let q = Complex64::from_polar(modulus, phase);
    if epsilon == 0.0 {
        Nome::undamped(q)
    } else {
        Nome::new(q)
    }
}

/// Polynomial extrapolation of damped evaluations to epsilon = 0 (Neville's
/// scheme on the sample abscissae). Samples are (epsilon, value) pairs with
/// distinct epsilons.
pub fn richardson_extrapolate(samples: &[(f64, Complex64)]) -> Result<Complex64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput(
            "extrapolation needs at least one sample".into(),
        ));
    }
    let n = samples.len();
    let mut v: Vec<Complex64> = samples.iter().map(|&(_, y)| y).collect();
    for j in 1..n {
        for i in 0..n - j {
            let xi = samples[i].0;
            let xj = samples[i + j].0;
            if xi == xj {
                return Err(Error::InvalidInput(
                    "extrapolation abscissae must be distinct".into(),
                ));
            }
            v[i] = (v[i + 1] * xi - v[i] * xj) / (xi - xj);
        }
    }
    Ok(v[0])
}
