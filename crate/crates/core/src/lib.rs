//! Recursive multipartite Bell operators and quadratic entanglement
//! witnesses: builds the F / F' and S+ / S- operator families for n
//! qubits, evaluates quadratic sum-of-squares witnesses that separate
//! biseparable from fully entangled states, optimizes measurement
//! settings, and models partially separable hidden-variable theories.

pub mod error;
pub mod hv;
pub mod linalg;
pub mod operators;
pub mod optimizer;
pub mod pauli;
pub mod random;
pub mod schmidt;
pub mod settings;
pub mod state;
pub mod witness;

pub use error::{QbError, Result};
pub use operators::{
    apply_to_pure, build_f, build_s, chsh_operator, family_expectations, verify_identities,
    BellFamily, BellOperatorHandle, IdentityReport, Term, TermExpansion,
};
pub use optimizer::{
    optimize_over_biseparable, optimize_settings, planar_quadratic_value, svetlichny_opt_settings,
    BiseparableOptimum, Objective, OptimizationConfig, OptimizationResult, PlanarAngles,
};
pub use pauli::{pauli_observable, UnitVector3};
pub use random::{random_state, rng_for, StateKind};
pub use schmidt::{schmidt_decompose, SchmidtForm};
pub use settings::MeasurementSettings;
pub use state::{ghz_state, singlet, w_state, QuantumState};
pub use witness::{bounds, chsh_quadratic, evaluate, Verdict, WitnessReport};
