//! Event-by-event kernels for EPR-Bohm singlet correlations.
//!
//! Two local hidden-variable constructions over the 3-sphere, built on one
//! exact Cl(3,0) kernel:
//!
//! * [`constraint`]: pairs carry a spin axis and a rotation scalar; a
//!   strength threshold gates detection and a strength constant `kappa`
//!   sweeps the correlation family from linear through the singlet cosine
//!   to past-Tsirelson.
//! * [`bivector_model`]: the orientation (handedness) of the frame is a
//!   fair coin; outcomes are scalar limits of bivector products.
//!
//! [`oracle`] evaluates the model's joint probabilities by adaptive
//! Gauss-Kronrod quadrature (no sampling), alongside the quantum closed
//! forms, so Monte Carlo results can be checked against two independent
//! references. [`stream`] provides the counter-based random streams that
//! make every run bit-reproducible for any worker count.

pub mod bivector_model;
pub mod constraint;
pub mod ga;
pub mod oracle;
pub mod stream;

pub use bivector_model::{
    chsh_statistic, paired_product_average, BivectorModelError, PairedProductAverage,
};
pub use constraint::{
    run_trials, Correlation, DetectionMode, InitialState, ModelError, ModelParams, OutcomeCounts,
    StationOutcome, TrialOutcome,
};
pub use ga::{Multivector3, Orientation, UnitQuaternion, UnitVector3};
pub use oracle::{Channel, OracleError, ProbabilityTable, QuadratureSettings};
pub use stream::{ChunkPlan, StreamError};
