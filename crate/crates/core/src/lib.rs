//! Exact quantum billiards in planar domains and the two-body particle in a
//! box: eigenstates, Jacobi-theta propagators, and center-of-mass
//! observables, with quadrature and finite-difference cross-checks next to
//! every closed form.

pub mod eigenstates;
pub mod error;
pub mod geometry;
pub mod observables;
pub mod propagator;
pub mod quadrature;
pub mod theta;

pub use eigenstates::{
    boundary_residual, energy, eval_com_eigen, hamiltonian_residual, hamiltonian_residual_at,
    normalization_constant, EigenState, QuantumNumbers, Superposition,
};
pub use error::{Error, Result};
pub use geometry::{
    com_domain, from_com, to_com, BoxSpec, ComDomain, Point2, Polygon, Region, Shape, ShapeDomain,
};
pub use observables::{
    covariance_closed_form_example, covariance_direct, covariance_example_exact,
    covariance_expanded, covariance_free, covariance_of_com_density, moments,
    two_mode_example_period, two_mode_example_state, FreeInitialState, GaussianPacket, MomentSet,
    MomentSource,
};
pub use propagator::{
    evolve_superposition, greens_spectral_oracle, greens_theta, propagate_grid,
    propagate_grid_seq, spectral_tail_estimate, GreensEval, GridState,
};
#[cfg(feature = "parallel")]
pub use propagator::propagate_grid_par;
pub use quadrature::{GaussLegendre, NeumaierSum, QuadConfig};
pub use theta::{nome_from_time, richardson_extrapolate, theta3, theta3_tail_bound, Nome, ThetaEval, ThetaParams};
