//! Fully entangled fraction, concurrence and protocol fidelities for
//! two-qubit mixed states, with a d×d generalization.
//!
//! States are stored with Bob's qubit first: basis index `2·bob + alice`.

pub mod applications;
pub mod cli;
pub mod concurrence;
pub mod ddim;
pub mod fef;
pub mod io;
pub mod linalg;
pub mod ops;
pub mod optimize;
pub mod states;
