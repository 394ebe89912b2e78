//! Finite posets, up-sets and coloured Kripke models.

mod io;
mod model;
mod poset;

pub use io::{load_frame, load_model, to_dot, LoadedFrame, LoadedModel, ModelFile, NodePosition, PointEntry};
pub use model::{Colour, ColouredModel, ModelMap, PMorphismViolation, SeparatedSubmodel, MAX_VARS};
pub use poset::{upset_implication, Poset, UpSet};

pub(crate) use model::mask;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error("not a partial order: {0}")]
    NotAPartialOrder(String),
    #[error("point {0} does not exist")]
    UnknownPoint(usize),
    #[error("point id {0} does not exist")]
    UnknownId(i64),
    #[error("point id {0} occurs twice")]
    DuplicateId(i64),
    #[error("point {0} has no colour")]
    MissingColour(i64),
    #[error("bad colour {0}")]
    BadColour(String),
    #[error("{0} variables exceed the supported maximum of 64")]
    TooManyVariables(usize),
    #[error("colour of point {point} uses more than {n} variables")]
    ColourOutOfRange { point: usize, n: usize },
    #[error("colouring is not order-preserving between points {lower} and {upper}")]
    ColouringNotMonotone { lower: usize, upper: usize },
    #[error("set is not upward closed")]
    NotAnUpSet,
    #[error("carrier mismatch: expected {expected} points, found {found}")]
    CarrierMismatch { expected: usize, found: usize },
    #[error("variable p{var} out of range for a model on {n} variables")]
    VariableOutOfRange { var: usize, n: usize },
    #[error("invalid JSON: {0}")]
    Json(String),
}
