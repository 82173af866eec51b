use serde::Serialize;

use crate::error::{Error, Result};
use crate::linear::{from_characteristic, solve_steady_state, step_linear, to_characteristic, LinearStepConfig};
use crate::model::{trapezoid_product, PhysicalParams, SpatialGrid};

/// Bounded test signals for the cart velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BiboInput {
    Zero,
    /// Unit step switched on at `t = 0`.
    Step,
    /// `sin(frequency t)`, angular frequency in rad/s.
    Sine { frequency: f64 },
}

impl BiboInput {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            BiboInput::Zero => 0.0,
            BiboInput::Step => 1.0,
            BiboInput::Sine { frequency } => (frequency * t).sin(),
        }
    }
}

/// Sup norms over one run started from the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiboReport {
    pub horizon: f64,
    pub steps: usize,
    pub max_input: f64,
    /// `max |<z1, z2>|`
    pub max_inner: f64,
    /// `max |z1(1) - z1(0)|`
    pub max_trace: f64,
    /// `max(max_inner, max_trace) / max_input`, zero for the zero input.
    pub ratio: f64,
}

/// Courant number used by the BIBO runs.
const BIBO_COURANT: f64 = 0.5;

/// Drives the linear solver with the cart velocity `input` over `[0, horizon]`
/// and records the output functionals.
///
/// Per step the acceleration is the difference quotient of `input` over the
/// step, with the input taken as zero before `t = 0`; a jump at the origin
/// therefore enters as a one-step pulse.
pub fn bibo_convolution_check(p: &PhysicalParams, input: BiboInput, horizon: f64, grid_n: usize) -> Result<BiboReport> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::param("horizon", format!("must be finite and > 0, got {horizon}")));
    }
    let grid = SpatialGrid::new(grid_n)?;
    let dt_target = BIBO_COURANT * grid.spacing() / (p.wave_speed() + p.mu() * grid.spacing());
    let steps = (horizon / dt_target).ceil() as usize;
    let dt = horizon / steps as f64;
    let cfg = LinearStepConfig::new(dt, grid, *p)?;
    let dx = grid.spacing();

    let mut state = to_characteristic(&solve_steady_state(p, &grid), p);
    let mut prev = 0.0;
    let (mut max_input, mut max_inner, mut max_trace) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..steps {
        let next = input.eval((k + 1) as f64 * dt);
        step_linear(&mut state, (next - prev) / dt, &cfg);
        prev = next;
        let z = from_characteristic(&state, p);
        let last = z.first.len() - 1;
        let inner = trapezoid_product(&z.first, &z.second, dx);
        let trace = z.first[last] - z.first[0];
        if !(inner.is_finite() && trace.is_finite()) {
            return Err(Error::NonFinite {
                t: state.t,
                what: "BIBO output",
            });
        }
        max_input = max_input.max(next.abs());
        max_inner = max_inner.max(inner.abs());
        max_trace = max_trace.max(trace.abs());
    }
    max_input = max_input.max(input.eval(0.0).abs());
    let ratio = if max_input > 0.0 {
        max_inner.max(max_trace) / max_input
    } else {
        0.0
    };
    Ok(BiboReport {
        horizon,
        steps,
        max_input,
        max_inner,
        max_trace,
        ratio,
    })
}

/// Runs the check for the horizons `2 tau`, `20 tau` and `200 tau`.
pub fn bibo_horizon_sweep(p: &PhysicalParams, input: BiboInput, grid_n: usize) -> Result<Vec<BiboReport>> {
    [2.0, 20.0, 200.0]
        .iter()
        .map(|&k| bibo_convolution_check(p, input, k * p.tau(), grid_n))
        .collect()
}
