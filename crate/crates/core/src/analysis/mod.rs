//! Frequency-domain analysis of the sloshing subsystem.
//!
//! The map from cart velocity to the wall height difference
//! `z1(1) - z1(0)` has the transfer function
//!
//! ```text
//! H(lambda) = -sqrt(4 h0 lambda / (g (lambda + 2 mu))) tanh(sqrt(lambda (lambda + 2 mu)) / (2 sqrt(h0 g)))
//!           = -8 h0 sum_{n odd} lambda / (lambda^2 + 2 mu lambda + sigma_n^2),   sigma_n = n pi sqrt(h0 g)
//! ```
//!
//! Its inverse Laplace transform is a finite measure whose atomic part is an
//! alternating, exponentially damped comb at multiples of `1/c`.

mod bibo;
mod comb;
mod resolvent;
mod series;
mod transfer;

pub use bibo::{bibo_convolution_check, bibo_horizon_sweep, BiboInput, BiboReport};
pub use comb::{impulse_response_comb, DeltaComb};
pub use resolvent::{transfer_resolvent_oracle, ResolventCheck};
pub use series::{tanh_series_identity, transfer_series, CompensatedSum, ModalData};
pub use transfer::{stable_tanh, transfer_closed_form, transfer_limit_at_infinity};

use num_complex::Complex64;

/// How a transfer function value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferMethod {
    ClosedForm,
    Series { n_terms: usize },
    ResolventOracle { n_points: usize },
}

/// A transfer function value at `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferEval {
    pub lambda: Complex64,
    pub value: Complex64,
    pub method: TransferMethod,
}

impl TransferEval {
    /// `|self - other| / |other|`.
    pub fn relative_error(&self, other: &TransferEval) -> f64 {
        (self.value - other.value).norm() / other.value.norm()
    }
}
