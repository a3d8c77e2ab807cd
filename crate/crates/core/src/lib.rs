//! Model checking for a modal logic of only-knowing and abduction and its
//! preferential extension over finite models.

pub mod abduction;
pub mod cli;
pub mod document;
pub mod formula;
pub mod kripke;
pub mod metatheory;
pub mod preferential;
pub mod worldset;

pub use formula::{parse, print, Formula, ParseError};
pub use kripke::{EvalError, EvaluationContext, KripkeModel, ModelError, WitnessMode};
pub use preferential::{MinimalReading, OrderCheck, PlausibilityModel, StrictOrder};
pub use worldset::WorldSet;
