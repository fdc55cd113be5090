//! Ratio-regression starts and maximum-likelihood fitting for CMNB, NB and
//! COM-Poisson.

mod fit;
mod init;
mod models;

pub use fit::{
    fit_model, mle_fit, mle_fit_cmp, mle_fit_nb, FitConfig, FitResult, FitStatus, InitStrategy,
};
pub use init::{
    cmnb_fallback_init, cmp_init, nb_moment_init, ratio_regression_from_probs,
    ratio_regression_init,
};
pub use models::{
    expected_frequencies, fit_policy, loglik, loglik_with, score, ModelKind, ModelParams,
};
