use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation received arguments violating its contract.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A series did not reach the requested tolerance within the term budget.
    #[error(
        "series not convergent: |q| = {q_modulus}, last term magnitude {last_term:e} \
         after {terms} terms (tol {tol:e})"
    )]
    NonConvergent {
        q_modulus: f64,
        last_term: f64,
        terms: usize,
        tol: f64,
    },

    /// Series terms grew beyond representable range before truncation kicked in.
    #[error("series overflow at term {term}: magnitude {magnitude:e}")]
    Overflow { term: usize, magnitude: f64 },

    /// A quadrature refinement check failed to meet the requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:e}, required {required:e} ({context})")]
    Quadrature {
        achieved: f64,
        required: f64,
        context: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
