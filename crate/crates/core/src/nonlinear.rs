//! Nonlinear Saint-Venant equations
//!
//! ```text
//! d/dt h + d/dzeta (h v)             = 0
//! d/dt v + d/dzeta (v^2/2 + g h) + h S(v/h) = -yddot
//! ```
//!
//! with `v = 0` at both walls. Conservative node-centred finite volumes with
//! Rusanov (local Lax-Friedrichs) interface fluxes; friction and the cart
//! acceleration are applied pointwise after the flux update.

use crate::error::{Error, Result};
use crate::linear::LinearStepConfig;
use crate::model::{trapezoid, trapezoid_product, PhysicalParams, SpatialGrid, StateField};

/// Height `h` and relative velocity `v` profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearState {
    pub h: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl NonlinearState {
    /// Builds the state from `(h, v)` profiles, checking `h > 0` and the wall
    /// condition on `v`.
    pub fn new(h: Vec<f64>, v: Vec<f64>, t: f64) -> Result<Self> {
        if h.len() != v.len() || h.len() < 3 {
            return Err(Error::param(
                "state",
                format!("need two profiles of equal length >= 3, got {} and {}", h.len(), v.len()),
            ));
        }
        if let Some((index, &h)) = h.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
            return Err(Error::Positivity { t, index, h });
        }
        let last = v.len() - 1;
        if v[0] != 0.0 || v[last] != 0.0 {
            return Err(Error::param(
                "state",
                format!("wall velocity must vanish, got v(0) = {}, v(1) = {}", v[0], v[last]),
            ));
        }
        Ok(Self { h, v, t })
    }

    pub fn from_field(field: &StateField) -> Result<Self> {
        Self::new(field.first.clone(), field.second.clone(), field.t)
    }

    pub fn to_field(&self) -> StateField {
        StateField {
            first: self.h.clone(),
            second: self.v.clone(),
            t: self.t,
        }
    }

    /// `int h dzeta`.
    pub fn mass(&self, grid: &SpatialGrid) -> f64 {
        trapezoid(&self.h, grid.spacing())
    }

    /// Largest characteristic speed `|v| + sqrt(g h)`.
    pub fn max_wave_speed(&self, g: f64) -> f64 {
        self.h
            .iter()
            .zip(&self.v)
            .map(|(&h, &v)| v.abs() + (g * h).sqrt())
            .fold(0.0, f64::max)
    }
}

/// Friction law `S(z) = c_d z + c_s z^2`.
pub fn friction(z: f64, p: &PhysicalParams) -> f64 {
    p.c_d() * z + p.c_s() * z * z
}

/// One explicit step of the nonlinear equations with `yddot` held constant.
///
/// Fails if the Courant number `max(|v| + sqrt(g h)) dt / dzeta` exceeds one,
/// if the state stops being finite, or if any height becomes non-positive.
pub fn step_nonlinear(s: &mut NonlinearState, yddot: f64, cfg: &LinearStepConfig) -> Result<()> {
    let grid = cfg.grid();
    let n = grid.n_points();
    assert_eq!(s.h.len(), n, "h length does not match the grid");
    assert_eq!(s.v.len(), n, "v length does not match the grid");

    let p = cfg.params();
    let g = p.g();
    let dt = cfg.dt();
    let r = dt / grid.spacing();

    let a = s.max_wave_speed(g);
    let courant = a * r;
    if !courant.is_finite() {
        return Err(Error::NonFinite { t: s.t, what: "nonlinear state" });
    }
    if courant > LinearStepConfig::COURANT_LIMIT {
        return Err(Error::Cfl {
            t: s.t,
            courant,
            limit: LinearStepConfig::COURANT_LIMIT,
        });
    }

    // interface fluxes at i + 1/2, i = 0..n-2
    let (h, v) = (&s.h, &s.v);
    let mut flux_h = Vec::with_capacity(n - 1);
    let mut flux_v = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let (hl, hr, vl, vr) = (h[i], h[i + 1], v[i], v[i + 1]);
        flux_h.push(0.5 * (hl * vl + hr * vr) - 0.5 * a * (hr - hl));
        flux_v.push(0.5 * (0.5 * vl * vl + g * hl + 0.5 * vr * vr + g * hr) - 0.5 * a * (vr - vl));
    }

    let last = n - 1;
    // walls own half cells; the wall mass flux h v vanishes
    s.h[0] -= 2.0 * r * flux_h[0];
    s.h[last] += 2.0 * r * flux_h[last - 1];
    for i in 1..last {
        s.h[i] -= r * (flux_h[i] - flux_h[i - 1]);
        s.v[i] -= r * (flux_v[i] - flux_v[i - 1]);
    }

    s.t += dt;
    if s.h.iter().chain(&s.v).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { t: s.t, what: "nonlinear state" });
    }
    if let Some((index, &h)) = s.h.iter().enumerate().find(|(_, &x)| x <= 0.0) {
        return Err(Error::Positivity { t: s.t, index, h });
    }

    for i in 1..last {
        let (h, v) = (s.h[i], s.v[i]);
        s.v[i] = v - dt * (h * friction(v / h, p) + yddot);
    }
    s.v[0] = 0.0;
    s.v[last] = 0.0;
    Ok(())
}

/// Cart acceleration from the momentum balance with the nonlinear state:
///
/// `m yddot = u + c_d int h v + c_s int v^2 + g/2 (h(1)^2 - h(0)^2)`.
pub fn nonlinear_output_rhs(s: &NonlinearState, u: f64, p: &PhysicalParams, grid: &SpatialGrid) -> f64 {
    let dx = grid.spacing();
    let last = s.h.len() - 1;
    let hv = trapezoid_product(&s.h, &s.v, dx);
    let vv = trapezoid_product(&s.v, &s.v, dx);
    let wall = 0.5 * p.g() * (s.h[last] * s.h[last] - s.h[0] * s.h[0]);
    (u + p.c_d() * hv + p.c_s() * vv + wall) / p.m()
}
