//! Linearized Saint-Venant system in characteristic variables.
//!
//! With `z = Q (eta1, eta2)`, `Q = [[1, 1], [g/c, -g/c]]`, the linear system
//! `dz/dt = A z + b yddot` splits into two transport equations
//!
//! ```text
//! d/dt eta1 + c d/dzeta eta1 + mu (eta1 - eta2) = -(c / 2g) yddot
//! d/dt eta2 - c d/dzeta eta2 - mu (eta1 - eta2) = +(c / 2g) yddot
//! ```
//!
//! coupled through the reflecting walls `eta1 = eta2` (i.e. `z2 = 0`).
//!
//! Discretization: node-centred finite volumes with first-order upwind
//! interface fluxes (`c eta1_i` and `-c eta2_{i+1}` at `i + 1/2`). The
//! right-moving `eta1` is advanced by backward Euler (a forward bidiagonal
//! sweep), the left-moving `eta2` by forward Euler. Wall nodes own a half
//! cell and are updated through the same interface fluxes with zero wall flux
//! for `z1`, after which both characteristics are set to `z1 / 2`. Hence the
//! trapezoid mass `int z1` is conserved exactly up to rounding, and the
//! discrete energy `g int (eta1^2 + eta2^2)` is non-increasing whenever
//! `c dt / dzeta + mu dt <= 1`.

use crate::error::{Error, Result};
use crate::model::{PhysicalParams, SpatialGrid, StateField};

/// Characteristic variables `(eta1, eta2)` on the grid, in metres.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicState {
    pub eta1: Vec<f64>,
    pub eta2: Vec<f64>,
    pub t: f64,
}

impl CharacteristicState {
    pub fn len(&self) -> usize {
        self.eta1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta1.is_empty()
    }

    /// Largest wall mismatch `|eta1 - eta2|`.
    pub fn wall_mismatch(&self) -> f64 {
        let n = self.len();
        if n == 0 {
            return 0.0;
        }
        (self.eta1[0] - self.eta2[0])
            .abs()
            .max((self.eta1[n - 1] - self.eta2[n - 1]).abs())
    }
}

/// Time step, grid and parameters of a linear solver run, validated against
/// the CFL restriction of the explicit leg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearStepConfig {
    dt: f64,
    grid: SpatialGrid,
    params: PhysicalParams,
}

impl LinearStepConfig {
    /// Largest admissible `c dt / dzeta + mu dt`.
    pub const COURANT_LIMIT: f64 = 1.0;

    pub fn new(dt: f64, grid: SpatialGrid, params: PhysicalParams) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::param("dt", format!("must be finite and > 0, got {dt}")));
        }
        let cfg = Self { dt, grid, params };
        let courant = cfg.effective_courant();
        if courant > Self::COURANT_LIMIT {
            return Err(Error::Cfl {
                t: 0.0,
                courant,
                limit: Self::COURANT_LIMIT,
            });
        }
        Ok(cfg)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    /// `c dt / dzeta`.
    pub fn courant(&self) -> f64 {
        self.params.wave_speed() * self.dt / self.grid.spacing()
    }

    /// `c dt / dzeta + mu dt`: the explicit leg stays a convex combination
    /// while this is at most one.
    pub fn effective_courant(&self) -> f64 {
        self.courant() + self.params.mu() * self.dt
    }
}

/// `eta1 = (z1 + (c/g) z2) / 2`, `eta2 = (z1 - (c/g) z2) / 2`.
pub fn to_characteristic(z: &StateField, p: &PhysicalParams) -> CharacteristicState {
    let s = p.wave_speed() / p.g();
    let (eta1, eta2) = z
        .first
        .iter()
        .zip(&z.second)
        .map(|(&z1, &z2)| (0.5 * (z1 + s * z2), 0.5 * (z1 - s * z2)))
        .unzip();
    CharacteristicState { eta1, eta2, t: z.t }
}

/// `z1 = eta1 + eta2`, `z2 = (g/c) (eta1 - eta2)`.
pub fn from_characteristic(s: &CharacteristicState, p: &PhysicalParams) -> StateField {
    let k = p.g() / p.wave_speed();
    let (first, second) = s
        .eta1
        .iter()
        .zip(&s.eta2)
        .map(|(&a, &b)| (a + b, k * (a - b)))
        .unzip();
    StateField {
        first,
        second,
        t: s.t,
    }
}

/// The equilibrium `z = (h0, 0)` on `grid`.
pub fn solve_steady_state(p: &PhysicalParams, grid: &SpatialGrid) -> StateField {
    let n = grid.n_points();
    StateField {
        first: vec![p.h0(); n],
        second: vec![0.0; n],
        t: 0.0,
    }
}

/// Advances `s` by one step of length `cfg.dt()` with the cart acceleration
/// `yddot` held constant over the step.
pub fn step_linear(s: &mut CharacteristicState, yddot: f64, cfg: &LinearStepConfig) {
    let n = cfg.grid.n_points();
    assert_eq!(s.eta1.len(), n, "eta1 length does not match the grid");
    assert_eq!(s.eta2.len(), n, "eta2 length does not match the grid");

    let p = &cfg.params;
    let nu = cfg.courant();
    let damp = p.mu() * cfg.dt;
    let forcing = 0.5 * p.wave_speed() / p.g() * yddot * cfg.dt;
    let (eta1, eta2) = (&mut s.eta1, &mut s.eta2);

    // left wall: half cell, implicit in the outgoing flux c*eta1_0 = c*z1_0/2
    let z_left = (eta1[0] + eta2[0] + 2.0 * nu * eta2[1]) / (1.0 + nu);
    eta1[0] = 0.5 * z_left;
    eta2[0] = 0.5 * z_left;

    // eta1: backward Euler, upwind from the left, coupling implicit in eta1
    let diag = 1.0 + nu + damp;
    for i in 1..n - 1 {
        eta1[i] = (eta1[i] + nu * eta1[i - 1] + damp * eta2[i] - forcing) / diag;
    }

    // eta2: forward Euler, upwind from the right; ascending order reads the
    // old eta2[i + 1]
    for i in 1..n - 1 {
        let coupling = damp * (eta1[i] - eta2[i]);
        eta2[i] += nu * (eta2[i + 1] - eta2[i]) + coupling + forcing;
    }

    // right wall: half cell fed by c*eta1_{n-2}, draining c*eta2_{n-1}
    let last = n - 1;
    let z_right = eta1[last] + eta2[last] + 2.0 * nu * (eta1[last - 1] - eta2[last]);
    eta1[last] = 0.5 * z_right;
    eta2[last] = 0.5 * z_right;

    s.t += cfg.dt;
}

/// Trapezoid mass `int z1` computed directly from characteristic variables.
pub fn characteristic_mass(s: &CharacteristicState, grid: &SpatialGrid) -> f64 {
    let sum: Vec<f64> = s.eta1.iter().zip(&s.eta2).map(|(a, b)| a + b).collect();
    crate::model::trapezoid(&sum, grid.spacing())
}

/// Discrete energy `g int (eta1^2 + eta2^2)`, equal to
/// `1/2 int (g z1^2 + h0 z2^2)`.
pub fn characteristic_energy(s: &CharacteristicState, grid: &SpatialGrid, p: &PhysicalParams) -> f64 {
    let dx = grid.spacing();
    p.g() * (crate::model::trapezoid_product(&s.eta1, &s.eta1, dx)
        + crate::model::trapezoid_product(&s.eta2, &s.eta2, dx))
}
