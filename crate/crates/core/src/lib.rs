//! Fuzzy numbers from interval-valued data and a weighted similarity measure
//! between them.

pub mod attributes;
pub mod cli;
pub mod curve;
pub mod demo;
pub mod error;
pub mod interval;
pub mod parallel;
pub mod plot;
pub mod similarity;
pub mod weights;

pub use attributes::{
    AgreementLoop, AttributeOptions, AttributeSummary, PerimeterMode, QuartileMethod,
};
pub use curve::{build_curve, MembershipCurve, Region};
pub use error::{Error, Result};
pub use interval::{Interval, IntervalDataset, IntervalSet};
pub use parallel::Execution;
pub use similarity::{
    similarity, similarity_matrix, FeatureVector, FuzzyNumber, RangeSpec, SimilarityMatrix,
    WeightVector,
};
