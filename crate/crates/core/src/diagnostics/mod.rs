//! Verdicts on simulation output: decay fits, monotonicity, persistence of
//! smallness, rescaling equivalence, and the embedding and bilinear-estimate suites.

mod bounds;
mod decay;
mod embedding;
mod rescale;
mod series;

pub use bounds::{bilinear_bound_suite, dissipation_check, dissipation_rate, BilinearBoundReport, DissipationReport};
pub use decay::{
    decay_envelope_check, fit_decay, monotonicity_check, smallness_margin, smallness_threshold, DecayFit,
    EnvelopeVerdict, MonotonicityVerdict, Violation, FIT_CONFIDENCE, MIN_FIT_SAMPLES, MONOTONE_REL_TOL,
};
pub use embedding::{
    embedding_suite, holder_constant, random_zero_mean_field, EmbeddingCheck, EmbeddingReport, EMBEDDING_REL_TOL,
    FL_EPSILON, FL_HAUSDORFF_YOUNG, FL_HOLDER, GEVREY_SCALE, GEVREY_SMOOTHING,
};
pub use rescale::{rescale_equivalence_check, RescaleReport};
pub use series::{NormSchedule, NormSeries, RadiusRule};
