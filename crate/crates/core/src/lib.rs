//! Indivisibility and channel-resourcefulness measures for single-qubit
//! amplitude-damping dynamics (Jaynes-Cummings model at resonance), and the
//! sweep engine that checks the bounds relating them.
//!
//! Basis convention: `|e> = (1, 0)`, `|g> = (0, 1)`; two-qubit states are
//! ordered `|ee>, |eg>, |ge>, |gg>` with the system as the first factor.

pub mod channels;
pub mod error;
pub mod export;
pub mod inequalities;
pub mod measures;
pub mod optim;
pub mod qmat;

pub use channels::{
    apply_ad, choi_of, decay_amplitude, decay_rate, free_family, integrate_lindblad,
    interval_map, ChoiState, FreeFamily, GTrajectory, JCParams, SurvivalRatio,
};
pub use error::{Error, Result};
pub use inequalities::{sweep, verify, Summary, SweepConfig, VerdictRecord};
pub use measures::{
    cp_indivisibility, diameter_d, measure_record, nm1, nm2, p_indivisibility, MeasureRecord,
    OptConfig,
};
pub use qmat::{
    bloch_to_state, hermitian_eig, trace_distance, trace_norm, BlochVector, ComplexMatrix,
    DensityMatrix,
};
