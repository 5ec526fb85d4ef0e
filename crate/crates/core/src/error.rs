use thiserror::Error;

use crate::surface::Slot;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: value {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("exponent {exponent} is out of range (|x| > {limit})")]
    Range { exponent: f64, limit: f64 },

    /// The horospherical triangle at `corner` violates the triangle inequality.
    #[error("inadmissible prism: triangle inequality fails at corner {corner}")]
    InadmissiblePrism { corner: usize },

    #[error("inadmissible prism in triangle {triangle} at corner {corner}")]
    InadmissibleTriangle { triangle: usize, corner: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("slot {slot} does not exist")]
    InvalidSlot { slot: Slot },

    #[error("gluing maps slot {slot} to itself")]
    FixedPoint { slot: Slot },

    #[error("gluing is not an involution at slot {slot}")]
    NotInvolution { slot: Slot },

    #[error("slot {slot} is not glued to anything")]
    Unglued { slot: Slot },

    #[error("surface is disconnected: slot {slot} is unreachable from triangle 0")]
    Disconnected { slot: Slot },

    #[error("surface has no triangles")]
    Empty,

    #[error("expected {expected} {what}, got {got}")]
    CountMismatch { what: &'static str, expected: usize, got: usize },

    #[error("{what} {index} is not finite")]
    NonFinite { what: &'static str, index: usize },

    #[error("edge {0} does not exist")]
    InvalidEdge(usize),

    #[error("cusp {0} does not exist")]
    InvalidCusp(usize),

    #[error("edge {0} bounds the same triangle on both sides and cannot be flipped")]
    Unflippable(usize),

    #[error("flip cap of {cap} exceeded; most negative exterior angle per flip: {history:?}")]
    FlipCap { cap: usize, history: Vec<f64> },

    #[error("stuck: every non-convex edge is unflippable (most negative is edge {edge})")]
    Stuck { edge: usize },

    #[error("infeasible curvature target: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64, trace: Vec<f64> },

    #[error("states describe different surfaces: {0}")]
    Mismatch(String),

    #[error("document error: {0}")]
    Document(String),
}
