//! Exact classification of singular Brascamp-Lieb projection data with
//! dimension datum `(1,2,2;1)`.
//!
//! [`exactla`] does row reduction over `Q`. [`datum`] holds projection data
//! and their equivalences. [`classifier`] reduces a datum to its normal form.

pub mod classifier;
pub mod datum;
pub mod exactla;
pub mod random;

pub use classifier::{
    classify, cross_ratio, cross_ratio_along, equivalent, ClassificationResult, ClassifyError,
    CrossRatio, CrossRatioError, Line,
};
pub use datum::{
    apply_witness, constant_factor, normal_form_targets, subspace_profile, triangular_unit_witness,
    triangular_unit_witness_as_displayed, triangular_witness, verify_witness,
    BlDatum, DatumError, EquivalenceWitness, ExponentTriple, NormalForm, SubspaceProfile,
    ValidationReport,
};
pub use exactla::{parse_rational, LinalgError, Rational, RationalMatrix, Subspace};
