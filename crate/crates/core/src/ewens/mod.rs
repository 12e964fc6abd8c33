//! Ewens-measure estimators: the permutation average `K_θ` and the
//! injection averages `K_{θ,m,p}`, `K̃_{θ,m,p}`.

pub mod estimator;
pub mod hybrid;
pub mod measure;

pub use estimator::{ewens_estimator, ewens_estimator_bruteforce, ewens_transform};
pub use hybrid::{
    hybrid_estimator, hybrid_estimator_exhaustive, hybrid_inverse_base, hybrid_inverse_diagonal,
    hybrid_inverse_exhaustive, hybrid_inverse_inductive, hybrid_inverse_inductive_step, hybrid_inverse_mc,
    inductive_correction_mc,
};
pub use measure::{
    enumerate_injections, enumerate_permutations, ewens_probability, injection_probability, sample_ewens,
    Injection, Permutation, Theta,
};
