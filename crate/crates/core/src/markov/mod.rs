//! Exact measure computations for Z^kappa extensions of finite Markov shifts.

pub mod correlation;
pub mod events;
pub mod lattice;
pub mod model;
pub mod recurrence;
pub mod stable;
pub mod transfer;

pub use correlation::{
    admissibility_band, multi_correlation, recurrence_witness, return_prefix, return_probability,
    return_sequence, return_sequence_pruned, rwm_defect, state_return_probability, Correlator,
};
pub use events::{event_measure, Anchor, Atoms, FiberedSet};
pub use lattice::{step_distribution, LatticeDistribution};
pub use model::{cylinder_measure, stationary_distribution, Cylinder, MarkovModel, ModelDef};
pub use recurrence::{recurrence_classify, Recurrence, RecurrenceReport};
pub use stable::{stable_density_check, stable_half_density};
pub use transfer::{induced_return_distribution, transfer_apply, transfer_nested, StepFunction};
