//! Builders for the bundled model families: lumped RLC networks and damped
//! membranes discretized by continuous P1 / discontinuous P0 pairs.

mod membrane;
mod network;

pub use membrane::{build_membrane, build_membrane_1d, build_membrane_2d, Coefficient, MembraneSpec};
pub use network::{build_network, Branch, NetworkSpec, GROUND};
