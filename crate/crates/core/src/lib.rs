//! Set covering with pairwise conflict penalties.
//!
//! Select subsets so that every element is covered, paying each selected
//! subset's cost plus a penalty for every selected conflicting pair.
//!
//! - [`model`]: instances, selections, feasibility and objective evaluation
//! - [`ingest`]: OR-Library reader and the canonical `scpcs` text format
//! - [`transform`]: benchmark generation from plain set covering instances
//! - [`exact`]: anytime branch-and-bound with certified bounds
//! - [`lp`]: CPLEX LP export of the linearized model
//! - [`heur`]: greedy, local search and GRASP
//! - [`oracle`]: exhaustive enumeration for tiny instances
//! - [`bench`]: deviation metrics, statistics and suite runs

pub mod bench;
pub mod exact;
pub mod heur;
pub mod ingest;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod testgen;
pub mod toy;
pub mod transform;

pub use model::{Conflict, Cost, Instance, ObjectiveBreakdown, Solution};
