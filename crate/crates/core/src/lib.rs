//! Random-order online algorithms with exact offline oracles.
//!
//! Every algorithm runs through the [`online`] contract: it sees requests one
//! at a time through a [`online::Session`] and commits decisions that the
//! problem's constraint state validates. [`trial`] turns runs into records
//! with oracle values, and enumerates all arrival orders for small inputs.

pub mod arrival;
pub mod covering;
pub mod error;
pub mod graphical;
pub mod matching;
pub mod metric;
pub mod numeric;
pub mod online;
pub mod packing;
pub mod secretary;
pub mod stochastic;
pub mod trial;
pub mod values;

pub use arrival::{ArrivalSchedule, OrderModel, TrialRng};
pub use error::{Error, Result};
pub use online::{OfflineOptimum, OnlineAlgorithm, Oracle, Problem, Sense};
pub use trial::{enumerate_expectation, run_trial, RunSummary, TrialRecord};
pub use values::ValueInstance;
