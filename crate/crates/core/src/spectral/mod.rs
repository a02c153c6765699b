//! Correlations, Fourier coefficients, exponential sums and the identities
//! and inequalities that connect them.

pub mod correlation;
pub mod expsum;
pub mod fourier;
pub mod inequalities;
pub mod sum;

pub use correlation::{
    block_decomposition, correlation, correlation_from_values, correlation_profile,
    BlockDecomposition, CorrelationProfile,
};
pub use expsum::{exponential_sum, scale_sums, spectrum_scan, ExpSumEvaluator, SpectrumScan};
pub use fourier::{
    cyclic_identity_check, fourier_coeffs, fourier_coeffs_capped, parseval_check, FourierTable,
    IdentityCheck,
};
pub use inequalities::{fejer_check, large_sieve_check, vdc_check, BoundCheck, VdcCheck};
pub use sum::{pairwise_sum, pairwise_sum_slice};
