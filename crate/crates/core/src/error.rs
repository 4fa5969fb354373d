//! Error type shared by all pipeline stages.

use alloc::string::String;
use alloc::vec::Vec;

/// Validation and runtime failures surfaced by the core pipeline.
///
/// Variants carry enough context to name the offending line, class, or
/// dimension; callers decide how to map them onto exit codes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: String,
    },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("duplicate instance id {id:?}")]
    DuplicateInstanceId { id: String },

    #[error("empty input: {context}")]
    EmptyInput { context: String },

    #[error("class {class:?} has no records in {context}")]
    ClassWithoutRecords { class: String, context: String },

    #[error("class {class:?} missing from {context}")]
    MissingClass { class: String, context: String },

    #[error("class sets differ: only in first {only_in_a:?}, only in second {only_in_b:?}")]
    ClassSetMismatch {
        only_in_a: Vec<String>,
        only_in_b: Vec<String>,
    },

    #[error("zero vector for class {class:?} cannot be normalized")]
    ZeroVector { class: String },

    #[error("taxonomy cycle involving {mid:?}")]
    CycleDetected { mid: String },

    #[error("taxonomy node {parent:?} references unknown child {child:?}")]
    DanglingChild { parent: String, child: String },

    #[error("duplicate taxonomy node {mid:?}")]
    DuplicateMid { mid: String },

    #[error("taxonomy is not a forest: {mid:?} is reachable along more than one parent edge")]
    NotAForest { mid: String },

    #[error("unknown category {name:?}")]
    UnknownCategory { name: String },

    #[error("class {mid:?} listed under more than one category")]
    OverlappingMembers { mid: String },

    #[error("category {name:?} has {found} members, expected {expected}")]
    CategorySize {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("category {name:?} needs {needed} distinct classes, only {available} available")]
    CategoryTooSmall {
        name: String,
        needed: usize,
        available: usize,
    },

    #[error("{count} classes cannot be split into three equal parts")]
    NotDivisibleByThree { count: usize },

    #[error("split sizes total {requested} but only {available} classes are available")]
    SplitCountMismatch { requested: usize, available: usize },

    #[error("class {class:?} appears in more than one partition subset")]
    OverlappingClassSets { class: String },

    #[error("invalid configuration: {message}")]
    InvalidConfig { message: String },
}
