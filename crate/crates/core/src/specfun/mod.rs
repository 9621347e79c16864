//! Special functions: log-Gamma, Gauss ₂F₁ and Airy functions.

mod airy;
mod gamma;
mod hyp2f1;

pub use airy::{airy, airy_ai, AiryValues, AIRY_AI_RANGE};
pub use gamma::{gamma, gamma_real, is_gamma_pole, log_gamma, rgamma};
pub use hyp2f1::{
    hyp2f1, hyp2f1_complement, hyp2f1_dz, hyp2f1_dz_complement, Hyp2F1Eval, Hyp2F1Params, MAX_TERMS,
};
