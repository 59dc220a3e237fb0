//! Exact and certified numerics for infinite ergodic theory at desk scale:
//! return sequences and multiple correlations of Z^kappa extensions of
//! Markov shifts, Farey ordering combinatorics, special semiflows, and
//! orbital sums of Fuchsian groups.

pub mod asymptotics;
pub mod builtin;
pub mod cli;
pub mod error;
pub mod farey;
pub mod hyperbolic;
pub mod markov;
pub mod quad;
pub mod scalar;
pub mod semiflow;

pub use error::{Error, Result};
