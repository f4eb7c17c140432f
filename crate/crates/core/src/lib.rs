//! A pyramidal hierarchical genetic algorithm with inter-agent partnering
//! strategies, applied to nurse rostering and mall tenant selection.
//!
//! Lower nodes of the pyramid optimize parts of the solution string under
//! substitute fitness measures; higher nodes assemble those parts into
//! larger strings until the top node holds full solutions.

pub mod engine;
pub mod error;
pub mod experiment;
pub mod mall;
pub mod nurse;
pub mod oracle;
pub mod partnering;
pub mod problem;

pub use error::{Error, Result};
pub use partnering::StrategyKind;
pub use problem::{Direction, Evaluation, Gene, Measure, PartSet, Problem};
