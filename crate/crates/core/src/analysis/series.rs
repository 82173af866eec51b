use std::f64::consts::PI;
use std::ops::AddAssign;

use num_complex::Complex64;

use super::{TransferEval, TransferMethod};
use crate::error::{Error, Result};
use crate::model::PhysicalParams;

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

fn two_sum(sum: &mut f64, carry: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *carry += (*sum - t) + x;
    } else {
        *carry += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

impl AddAssign<Complex64> for CompensatedSum {
    fn add_assign(&mut self, x: Complex64) {
        two_sum(&mut self.sum.re, &mut self.carry.re, x.re);
        two_sum(&mut self.sum.im, &mut self.carry.im, x.im);
    }
}

/// `sigma_n = n pi sqrt(h0 g)` for the `k`-th odd index `n = 2k - 1`.
fn sigma(k: usize, c: f64) -> f64 {
    (2 * k - 1) as f64 * PI * c
}

/// Partial modal sum `-8 h0 sum lambda / (lambda^2 + 2 mu lambda + sigma_n^2)`
/// over the first `n_terms` odd indices, in ascending order.
pub fn transfer_series(lambda: Complex64, n_terms: usize, p: &PhysicalParams) -> Result<TransferEval> {
    if !(lambda.re > 0.0) || !lambda.im.is_finite() || !lambda.re.is_finite() {
        return Err(Error::Domain(format!("modal series needs Re(lambda) > 0, got {lambda}")));
    }
    if n_terms == 0 {
        return Err(Error::Domain("modal series needs at least one term".into()));
    }
    let c = p.wave_speed();
    let base = lambda * lambda + 2.0 * p.mu() * lambda;
    let mut acc = CompensatedSum::default();
    for k in 1..=n_terms {
        let s = sigma(k, c);
        acc += lambda / (base + s * s);
    }
    Ok(TransferEval {
        lambda,
        value: -8.0 * p.h0() * acc.value(),
        method: TransferMethod::Series { n_terms },
    })
}

/// `|tanh(z) - 8 z sum_{k=1}^{n} 1 / (pi^2 (2k-1)^2 + 4 z^2)|`.
///
/// Undefined at the poles `z = i pi (2k - 1) / 2`.
pub fn tanh_series_identity(z: Complex64, n_terms: usize) -> f64 {
    let four_z2 = 4.0 * z * z;
    let mut acc = CompensatedSum::default();
    for k in 1..=n_terms {
        let m = (2 * k - 1) as f64 * PI;
        acc += 1.0 / (m * m + four_z2);
    }
    (super::stable_tanh(z) - 8.0 * z * acc.value()).norm()
}

/// Modal frequencies and the absolutely summable coefficient sequences of
/// the impulse-response decomposition, over odd `n`.
///
/// `a_bound[k]` holds `mu^4 / (sigma_n + phi_n)^2`, the envelope of the
/// first sequence (`-a_bound < a_n < 0`); `a_n` itself depends on a
/// mean-value point and has no closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalData {
    pub sigma: Vec<f64>,
    pub phi: Vec<f64>,
    pub a_bound: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

impl ModalData {
    /// First `n_terms` odd modes. Requires `mu < sigma_1` so that every
    /// damped frequency `phi_n = sqrt(sigma_n^2 - mu^2)` is real.
    pub fn new(p: &PhysicalParams, n_terms: usize) -> Result<Self> {
        let c = p.wave_speed();
        let mu = p.mu();
        if !(mu < sigma(1, c)) {
            return Err(Error::Domain(format!(
                "mu = {mu} must be below sigma_1 = {} for real modal frequencies",
                sigma(1, c)
            )));
        }
        let mut data = ModalData {
            sigma: Vec::with_capacity(n_terms),
            phi: Vec::with_capacity(n_terms),
            a_bound: Vec::with_capacity(n_terms),
            b: Vec::with_capacity(n_terms),
            c: Vec::with_capacity(n_terms),
            d: Vec::with_capacity(n_terms),
        };
        let (mu2, mu3) = (mu * mu, mu * mu * mu);
        let mu4 = mu2 * mu2;
        for k in 1..=n_terms {
            let s = sigma(k, c);
            let f = ((s - mu) * (s + mu)).sqrt();
            let sum = s + f;
            data.sigma.push(s);
            data.phi.push(f);
            data.a_bound.push(mu4 / (sum * sum));
            data.b.push(mu3 / (f * sum));
            data.c.push(mu4 / (2.0 * s * sum * sum));
            data.d.push(mu3 / (s * f * sum));
        }
        Ok(data)
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// `|S_{2n} - S_n|` for the partial sums of `|seq|`; requires
    /// `2n <= len`.
    pub fn cauchy_gap(seq: &[f64], n: usize) -> f64 {
        assert!(2 * n <= seq.len(), "need {} terms, have {}", 2 * n, seq.len());
        let mut acc = CompensatedSum::default();
        for x in &seq[n..2 * n] {
            acc += Complex64::new(x.abs(), 0.0);
        }
        acc.value().re
    }
}
