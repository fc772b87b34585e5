//! Noise injection and error mitigation: trajectory sampling under Pauli
//! noise, TREX, dynamical decoupling, Pauli twirling and zero-noise
//! extrapolation.

pub mod dd;
pub mod noise;
pub mod pipeline;
pub mod trex;
pub mod twirl;
pub mod zne;

pub use dd::{insert_dd, schedule_times, DdReport, GateDurations, IdleWindow};
pub use noise::{measurement_groups, noisy_expectation, sample_noisy, ExecOptions, MeasurementGroup, NoiseModel};
pub use pipeline::{mitigated_pipeline, zne_estimate, MitigatedPoint, MitigationPlan};
pub use trex::{apply_trex, random_masks, TrexEstimate};
pub use twirl::{cz_twirl_set, is_cz_twirl, pauli_twirl, Quadruple};
pub use zne::{extrapolate, fold_cz, ZneFit, ZneResult};
