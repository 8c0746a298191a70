use serde::Serialize;
use thiserror::Error;

use crate::algebra::index_set::IndexSet;
use crate::algebra::poly::Var;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad classification of an error, used for process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Ceiling,
    Schema,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Validation => 2,
            ErrorClass::Ceiling => 3,
            ErrorClass::Schema => 4,
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "error", content = "detail")]
pub enum Error {
    // polynomial algebra
    #[error("index sets differ: {left} vs {right}")]
    IndexSetMismatch { left: IndexSet, right: IndexSet },
    #[error("index sets overlap: {left} and {right}")]
    IndexSetOverlap { left: IndexSet, right: IndexSet },
    #[error("no value assigned to {0}")]
    MissingAssignment(Var),
    #[error("variable {0} is not in the partition")]
    UnknownVariable(Var),
    #[error("bucket {0} is partially assigned with a nonzero value")]
    PartialBucketAssignment(u32),
    #[error("modulus {0} is not a supported prime")]
    UnsupportedPrime(u64),

    // ceilings
    #[error("term count {terms} exceeds ceiling {ceiling}")]
    TermBlowup { terms: usize, ceiling: usize },
    #[error("matrix {rows}x{cols} exceeds {ceiling} entries")]
    MatrixTooLarge {
        rows: usize,
        cols: usize,
        ceiling: usize,
    },
    #[error("size {size} exceeds ceiling {ceiling}")]
    SizeCeilingExceeded { size: usize, ceiling: usize },
    #[error("more than {ceiling} proof-tree types")]
    TypeCountCeiling { ceiling: usize },
    #[error("parameter out of supported range: {0}")]
    ScaleExceeded(String),

    // circuits
    #[error("gate {gate}: add children have different index sets")]
    AddChildMismatch { gate: usize },
    #[error("gate {gate}: mul children have overlapping index sets")]
    MulChildOverlap { gate: usize },
    #[error("gate {gate}: add mixes constants with non-constant children")]
    ConstInAddWithVariables { gate: usize },
    #[error("gate {gate}: add gate without children")]
    EmptyAdd { gate: usize },
    #[error("gate {gate}: mul gate must have exactly two children")]
    NotFanin2 { gate: usize },
    #[error("cycle through gate {gate}")]
    CycleDetected { gate: usize },
    #[error("gate {0} does not exist")]
    GateNotFound(usize),
    #[error("gate id {0} is used twice")]
    DuplicateGate(usize),
    #[error("gate {gate}: constant {value} has no small integer sign")]
    AmbiguousSign { gate: usize, value: String },
    #[error("gate {gate} computes the zero polynomial")]
    RedundantGate { gate: usize },
    #[error("gate {gate} has fanout greater than one")]
    NotAFormula { gate: usize },
    #[error("gate {gate}: derivative variable appears non-linearly")]
    NonLinearInGate { gate: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("degree-zero program cannot be represented")]
    DegreeZero,
    #[error("the program computes the zero polynomial")]
    ZeroProgram,

    // branching programs
    #[error("edge {edge} skips from layer {from} to layer {to}")]
    LayerSkip { edge: usize, from: usize, to: usize },
    #[error("edge {edge}: target index set is not source index set plus its bucket")]
    IndexSetStep { edge: usize },
    #[error("program must have exactly one source and one sink: {0}")]
    MultiSourceOrSink(String),
    #[error("edge {edge}: linear form is not over the stepped bucket")]
    WrongBucketForm { edge: usize },
    #[error("layer {layer} out of range 0..={max}")]
    LayerOutOfRange { layer: usize, max: usize },
    #[error("degrees differ: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("supports overlap: {left} and {right}")]
    SupportOverlap { left: IndexSet, right: IndexSet },
    #[error("supports differ: {left} vs {right}")]
    SupportMismatch { left: IndexSet, right: IndexSet },
    #[error("variable partitions differ")]
    PartitionMismatch,

    // proof trees
    #[error("no frontier gate has index set {0}")]
    EmptyFrontier(IndexSet),
    #[error("circuit has {count} proof-tree types, expected exactly one")]
    NotUniqueType { count: usize },

    // generators
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(u32),
    #[error("{0} is not divisible by 8")]
    BadDivisibility(u32),
    #[error("not a permutation of 1..={0}")]
    InvalidPermutation(usize),

    // input/output
    #[error("schema error: {0}")]
    Schema(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            TermBlowup { .. }
            | MatrixTooLarge { .. }
            | SizeCeilingExceeded { .. }
            | TypeCountCeiling { .. }
            | ScaleExceeded(_) => ErrorClass::Ceiling,
            Schema(_) | Io(_) | UnsupportedPrime(_) => ErrorClass::Schema,
            _ => ErrorClass::Validation,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class().exit_code()
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
