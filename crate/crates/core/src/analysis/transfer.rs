use num_complex::Complex64;

use super::{TransferEval, TransferMethod};
use crate::error::{Error, Result};
use crate::model::PhysicalParams;

/// `tanh(z)` without overflow for large `|Re z|`.
pub fn stable_tanh(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        return -stable_tanh(-z);
    }
    let e = (-2.0 * z).exp();
    (1.0 - e) / (1.0 + e)
}

/// Closed-form transfer function on the open right half-plane, principal
/// branches throughout.
pub fn transfer_closed_form(lambda: Complex64, p: &PhysicalParams) -> Result<TransferEval> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) || lambda.re <= 0.0 {
        return Err(Error::Domain(format!(
            "closed-form transfer function needs Re(lambda) > 0, got {lambda}"
        )));
    }
    let shifted = lambda + 2.0 * p.mu();
    let product = lambda * shifted;
    // for Re(lambda) > 0 and mu > 0 the product stays off the branch cut
    if product.im == 0.0 && product.re <= 0.0 {
        return Err(Error::Domain(format!("lambda (lambda + 2 mu) = {product} lies on the branch cut")));
    }
    let theta = product.sqrt() / p.wave_speed();
    let prefactor = (4.0 * p.h0() * lambda / (p.g() * shifted)).sqrt();
    Ok(TransferEval {
        lambda,
        value: -prefactor * stable_tanh(0.5 * theta),
        method: TransferMethod::ClosedForm,
    })
}

/// `lim H(lambda)` for real `lambda -> inf`, i.e. `-2 sqrt(h0 / g)`.
pub fn transfer_limit_at_infinity(p: &PhysicalParams) -> f64 {
    -2.0 * (p.h0() / p.g()).sqrt()
}
