//! Independent check of the transfer function: solve `(lambda - A) w = lambda b`
//! on a fine grid and evaluate the wall outputs of `w1`.
//!
//! Eliminating `w2` gives `w1'' = theta^2 w1` with `w1'(0) = w1'(1) = -lambda / g`,
//! `theta^2 = lambda (lambda + 2 mu) / (h0 g)`; `w2 = -(lambda + g w1') / (lambda + 2 mu)`.
//! The ODE is discretized by second-order central differences with ghost
//! nodes for the Neumann data and solved by the Thomas algorithm.

use num_complex::Complex64;

use super::{TransferEval, TransferMethod};
use crate::error::{Error, Result};
use crate::model::PhysicalParams;

/// Result of one resolvent solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventCheck {
    /// `w1(1) - w1(0)`.
    pub h: TransferEval,
    /// `w1(1) + w1(0)`, which vanishes for the exact solution.
    pub sum_trace: Complex64,
    /// Largest nodal deviation of `(w1, w2)` from the closed-form profile,
    /// relative to the largest profile value.
    pub profile_error: f64,
}

fn thomas(lower: &[Complex64], diag: &[Complex64], upper: &[Complex64], rhs: &mut [Complex64]) -> Result<()> {
    let n = diag.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut beta = diag[0];
    if beta.norm() == 0.0 {
        return Err(Error::Domain("singular tridiagonal system".into()));
    }
    c[0] = upper[0] / beta;
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        if beta.norm() == 0.0 {
            return Err(Error::Domain("singular tridiagonal system".into()));
        }
        if i < n - 1 {
            c[i] = upper[i] / beta;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= c[i] * next;
    }
    Ok(())
}

/// `lambda (lambda - A)^{-1} b` from the closed-form profile.
fn exact_profile(lambda: Complex64, theta: Complex64, p: &PhysicalParams, zeta: f64) -> (Complex64, Complex64) {
    let pre = lambda / (p.g() * theta);
    let ratio = (theta.cosh() - 1.0) / theta.sinh();
    let (ch, sh) = ((theta * zeta).cosh(), (theta * zeta).sinh());
    let scale = lambda / (p.h0() * theta);
    let w1 = pre * (ratio * ch - sh);
    // the closed form returns w - b with b = (0, -1)
    let l2 = pre * (-ratio * scale * sh + scale * (ch - 1.0)) + 1.0;
    (w1, l2 - 1.0)
}

/// Solves the resolvent problem at `lambda` on `n_points` nodes.
pub fn transfer_resolvent_oracle(lambda: Complex64, p: &PhysicalParams, n_points: usize) -> Result<ResolventCheck> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) || lambda.re <= 0.0 {
        return Err(Error::Domain(format!("resolvent oracle needs Re(lambda) > 0, got {lambda}")));
    }
    if n_points < 3 {
        return Err(Error::Domain(format!("resolvent oracle needs at least 3 nodes, got {n_points}")));
    }
    let n = n_points;
    let h = 1.0 / (n - 1) as f64;
    let shifted = lambda + 2.0 * p.mu();
    let theta2 = lambda * shifted / (p.h0() * p.g());
    let slope = -lambda / p.g();

    let one = Complex64::new(1.0, 0.0);
    let mut lower = vec![one; n];
    let mut upper = vec![one; n];
    let diag = vec![-(2.0 + theta2 * h * h); n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    // ghost nodes: w_{-1} = w_1 - 2h slope, w_n = w_{n-2} + 2h slope
    upper[0] = 2.0 * one;
    rhs[0] = 2.0 * h * slope;
    lower[n - 1] = 2.0 * one;
    rhs[n - 1] = -2.0 * h * slope;
    lower[0] = Complex64::new(0.0, 0.0);
    upper[n - 1] = Complex64::new(0.0, 0.0);
    thomas(&lower, &diag, &upper, &mut rhs)?;
    let w1 = rhs;

    let theta = theta2.sqrt();
    let mut max_err: f64 = 0.0;
    let mut max_ref: f64 = 0.0;
    for i in 0..n {
        let d1 = if i == 0 || i == n - 1 {
            slope
        } else {
            (w1[i + 1] - w1[i - 1]) / (2.0 * h)
        };
        let w2 = -(lambda + p.g() * d1) / shifted;
        let (e1, e2) = exact_profile(lambda, theta, p, i as f64 * h);
        max_err = max_err.max((w1[i] - e1).norm()).max((w2 - e2).norm());
        max_ref = max_ref.max(e1.norm()).max(e2.norm());
    }
    if !(max_err.is_finite() && max_ref.is_finite()) {
        return Err(Error::Domain(format!("resolvent solve at lambda = {lambda} overflowed")));
    }

    Ok(ResolventCheck {
        h: TransferEval {
            lambda,
            value: w1[n - 1] - w1[0],
            method: TransferMethod::ResolventOracle { n_points },
        },
        sum_trace: w1[n - 1] + w1[0],
        profile_error: max_err / max_ref,
    })
}
