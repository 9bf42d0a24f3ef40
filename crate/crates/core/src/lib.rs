//! Projective embeddings of dynamical systems.
//!
//! An m-dimensional ODE dx_i/dt = f_i(x) is lifted into mN dimensions as
//! dX_i/dt = P F_i(X_1..X_m) b_i + G_i(P; X_i), where P is a projector
//! (P^2 = P), F_i lifts f_i to matrix arguments and G_i damps the Ker(P)
//! modes. Projecting the extended trajectory recovers the target system's
//! fixed points; stable equilibria stay stable while unstable ones become
//! saddles of the extended flow.
//!
//! Modules:
//! - [`projector`]: mean-field / trivial / Gram projectors and their identities
//! - [`target`]: structured analytic equations, orderings, derivatives
//! - [`embedding`]: the three matrix maps, decay functions, the assembled rhs
//! - [`mod@integrate`]: fixed-step Euler/RK4 evolution and trajectory recording
//! - [`analysis`]: fixed points, closed-form Jacobians, spectra, stability
//! - [`verify`]: the executable property suite behind `peds verify`

pub mod analysis;
pub mod embedding;
pub mod error;
pub mod integrate;
pub mod linalg;
pub mod polynomial;
pub mod projector;
pub mod systems;
pub mod target;
pub mod verify;

pub use analysis::{
    classify_equilibrium, find_fixed_points, gerschgorin_bounds, peds_jacobian_closed_form,
    peds_jacobian_fd, Classification, FixedPointReport, FixedPointSearch, FixedPointSource,
    JacobianReport,
};
pub use embedding::{
    apply_decay, matrix_function_eval, noncommutative_monomial, DecayFunction, ExtendedState,
    MapKind, PedsSystem,
};
pub use error::{Error, Result};
pub use integrate::{
    complement_norms, integrate, integrate_ode, integrate_target, IntegrationConfig, Method,
    OdeRhs, ScalarTrajectory, Trajectory,
};
pub use projector::{Projector, ProjectorKind};
pub use target::{AnalyticFactorTerm, FactorFn, MonomialTerm, Ordering, TargetSystem, Term};
pub use verify::{run_verify, PropResult, PropStatus, VerifyConfig};
