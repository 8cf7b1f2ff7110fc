//! Reference flows, perturbation decomposition and the evaluators of the
//! decay, product and scaling bounds.

pub mod commutator;
pub mod fit;
pub mod flows;
pub mod lemma;
pub mod monitor;
pub mod oracle;
pub mod perturbation;
pub mod quadrature;

pub use commutator::{commutator_spot_check, CommutatorSample};
pub use fit::{fit_decay, fit_log_linear, fit_power, DecayFit, LogLinearFit, PowerFit};
pub use flows::{free_flow, ReferenceFlows, Which};
pub use lemma::{decay_rate_check, lemma23_eval, BoundConstants, LemmaOptions, LemmaReport, RateCheck, SupNorm};
pub use monitor::{theorem_monitor, MonitorSample, MonitorStatus, MonitorVerdict};
pub use oracle::{
    fg_cross_integral, fg_cross_scaling, fg_cross_value, multiplier_bounds_check, CrossIntegral, CrossParams,
    CrossScaling, MultiplierReport, QuadratureOracle,
};
pub use perturbation::{
    forcing_fields, perturbation_extract, perturbation_residual, CommutatorMode, FlowSnapshot, ForcingFields,
    PerturbationResidual,
};
