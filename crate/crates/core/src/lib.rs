//! Analysis toolkit for population protocols and Petri nets.
//!
//! The crate provides the value types (states, configurations, transitions,
//! nets, protocols), reachability and coverability procedures, output
//! stability, bottom-component extraction, control-state cycle analysis
//! with Hilbert-basis reduction, whole-protocol verification of counting
//! predicates, and exact evaluation of the associated state-complexity
//! bound formulas.

pub mod action;
pub mod bottom;
pub mod bounds;
pub mod config;
pub mod cpn;
pub mod error;
pub mod format;
pub mod net;
pub mod reach;
pub mod stab;
pub mod state;
pub mod verify;

pub use action::Action;
pub use config::Configuration;
pub use error::{Error, Result};
pub use net::{Output, OutputMap, PetriNet, Protocol, Transition};
pub use reach::{CoverWitness, ExplorationBudget, FiringWord};
pub use state::{State, StateSet};

/// Arbitrary-precision natural number used by the bound formulas.
pub type BigNat = num_bigint::BigUint;
