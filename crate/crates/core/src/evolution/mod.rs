//! Time integration, compatibility, primitives and the exact reference flow.

mod bound;
mod compat;
mod fit;
mod initial;
mod primitives;
mod reference;
mod simulate;
mod stepper;

pub use bound::{check_decay_bound, check_decay_bound_log, BoundCheck};
pub use compat::{compatibility_check, project_compatible, CompatibilityAnalysis, CompatibilityReport};
pub use fit::{fit_decay_rate, DecayFit};
pub use initial::{mode, random_compatible, random_raw};
pub use primitives::{initialize_primitives, initialize_primitives_with, PrimitiveSolver};
pub use reference::{generator, reference_solution, ReferencePropagator};
pub use simulate::{simulate, PrimitiveUpdate, SimulateOptions, Simulator, Trajectory};
pub use stepper::{backward_euler_step, BackwardEuler};
