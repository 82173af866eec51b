//! Closed loop of funnel controller, cart and sloshing dynamics.
//!
//! Per step of length `dt`, all quantities sampled at `t_k`:
//! 1. `e = y - y_ref`, `edot = ydot - ydot_ref`
//! 2. `u` from the funnel law
//! 3. `yddot` from the momentum balance
//! 4. semi-implicit Euler for the cart (`ydot` first, then `y`)
//! 5. one PDE step with `yddot` held constant
//!
//! `u` depends on `(e, edot)` only, so `yddot` is explicit and no algebraic
//! loop has to be solved.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funnel::{check_initial_feasibility, control_input, validate_funnel_class, FunnelSpec, GainState};
use crate::linear::{from_characteristic, step_linear, to_characteristic, CharacteristicState, LinearStepConfig};
use crate::model::{
    energy, mass_integral, trapezoid, trapezoid_product, CartState, PhysicalParams, ReferenceSignal, SpatialGrid,
    StateField,
};
use crate::nonlinear::{nonlinear_output_rhs, step_nonlinear, NonlinearState};

/// Wall velocity mismatch tolerated when checking `x0 + b y1 ∈ D(A)`.
pub const WALL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Linear,
    Nonlinear,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::Nonlinear => "nonlinear",
        }
    }
}

/// Cart acceleration from the linearized momentum balance, state in relative
/// coordinates `z = (z1, z2)`:
///
/// `m yddot = g/2 (z1(1)^2 - z1(0)^2) + 2 mu <z1, z2> + 2 mu ydot (int z1 - h0) + u`
///
/// This is the balance written for the absolute velocity `x2 = z2 + ydot`;
/// the `ydot` term vanishes whenever the mass equals `h0`.
pub fn linear_output_rhs(z: &StateField, ydot: f64, u: f64, p: &PhysicalParams, grid: &SpatialGrid) -> f64 {
    let dx = grid.spacing();
    let last = z.first.len() - 1;
    let wall = 0.5 * p.g() * (z.first[last] * z.first[last] - z.first[0] * z.first[0]);
    let inner = trapezoid_product(&z.first, &z.second, dx);
    let mass = trapezoid(&z.first, dx);
    let two_mu = 2.0 * p.mu();
    (wall + two_mu * inner + two_mu * ydot * (mass - p.h0()) + u) / p.m()
}

/// Everything needed for one closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopConfig {
    pub params: PhysicalParams,
    pub grid: SpatialGrid,
    pub dt: f64,
    pub steps: usize,
    pub reference: ReferenceSignal,
    pub phi0: FunnelSpec,
    pub phi1: FunnelSpec,
    pub cart0: CartState,
    /// Initial profiles `(x1, x2)` with `x2` the absolute fluid velocity.
    pub initial: StateField,
    pub snapshot_times: Vec<f64>,
}

impl ClosedLoopConfig {
    pub fn horizon(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Initial PDE state in relative coordinates, `z2 = x2 - y1`.
    pub fn relative_initial(&self) -> StateField {
        StateField {
            first: self.initial.first.clone(),
            second: self.initial.second.iter().map(|x2| x2 - self.cart0.ydot).collect(),
            t: 0.0,
        }
    }

    /// Checks funnel class, initial feasibility, the compatibility of the
    /// initial profile with the walls, and the CFL restriction.
    pub fn validate(&self) -> Result<LinearStepConfig> {
        validate_funnel_class(&self.phi0)?;
        validate_funnel_class(&self.phi1)?;
        check_initial_feasibility(&self.phi0, &self.phi1, &self.cart0, &self.reference)?;
        let n = self.grid.n_points();
        if self.initial.first.len() != n || self.initial.second.len() != n {
            return Err(Error::param(
                "initial",
                format!("profile length {} does not match grid of {n} nodes", self.initial.len()),
            ));
        }
        if self.initial.first.iter().chain(&self.initial.second).any(|x| !x.is_finite()) {
            return Err(Error::param("initial", "profile has non-finite entries"));
        }
        let wall = self.relative_initial().wall_velocity();
        if wall > WALL_TOLERANCE {
            return Err(Error::param(
                "initial",
                format!("x2 - y1 must vanish at both walls (got {wall:e})"),
            ));
        }
        if self.steps == 0 {
            return Err(Error::param("steps", "need at least one time step"));
        }
        LinearStepConfig::new(self.dt, self.grid, self.params)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldState {
    Linear(CharacteristicState),
    Nonlinear(NonlinearState),
}

impl FieldState {
    /// Profiles as `(z1, z2)` or `(h, v)`.
    pub fn profiles(&self, p: &PhysicalParams) -> StateField {
        match self {
            FieldState::Linear(s) => from_characteristic(s, p),
            FieldState::Nonlinear(s) => s.to_field(),
        }
    }
}

/// Full state of the coupled system at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopState {
    pub cart: CartState,
    pub field: FieldState,
    pub gains: GainState,
    pub u: f64,
    pub t: f64,
}

/// One trace row, sampled at the start of a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub y: f64,
    pub ydot: f64,
    pub yddot: f64,
    pub y_ref: f64,
    pub e: f64,
    pub funnel0_inv: f64,
    pub funnel1_inv: f64,
    pub k0: f64,
    pub k1: f64,
    pub u: f64,
    pub mass: f64,
    pub energy: f64,
}

impl TraceRow {
    pub const COLUMNS: [&'static str; 13] = [
        "t",
        "y",
        "ydot",
        "yddot",
        "y_ref",
        "e",
        "funnel0_inv",
        "funnel1_inv",
        "k0",
        "k1",
        "u",
        "mass",
        "energy",
    ];

    pub fn values(&self) -> [f64; 13] {
        [
            self.t,
            self.y,
            self.ydot,
            self.yddot,
            self.y_ref,
            self.e,
            self.funnel0_inv,
            self.funnel1_inv,
            self.k0,
            self.k1,
            self.u,
            self.mass,
            self.energy,
        ]
    }

    pub fn from_values(v: [f64; 13]) -> Self {
        Self {
            t: v[0],
            y: v[1],
            ydot: v[2],
            yddot: v[3],
            y_ref: v[4],
            e: v[5],
            funnel0_inv: v[6],
            funnel1_inv: v[7],
            k0: v[8],
            k1: v[9],
            u: v[10],
            mass: v[11],
            energy: v[12],
        }
    }
}

/// Field profiles captured at a requested time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub requested: f64,
    pub field: StateField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub model: ModelKind,
    pub rows: Vec<TraceRow>,
    pub snapshots: Vec<Snapshot>,
}

/// Run-level statistics reported alongside a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSummary {
    pub model: ModelKind,
    pub steps: usize,
    pub horizon: f64,
    /// `min (1/phi0(t) - |e(t)|)` over the recorded `t >= dt`.
    pub funnel_margin: f64,
    pub max_abs_u: f64,
    pub max_abs_y: f64,
    pub max_abs_ydot: f64,
    pub max_k0: f64,
    pub max_k1: f64,
    pub final_abs_e: f64,
    /// `max |mass(t) - mass(0)| / mass(0)`.
    pub mass_drift: f64,
}

impl TraceRecord {
    pub fn summary(&self) -> RunSummary {
        let rows = &self.rows;
        let fold = |f: fn(&TraceRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
        let m0 = rows.first().map_or(0.0, |r| r.mass);
        RunSummary {
            model: self.model,
            steps: rows.len().saturating_sub(1),
            horizon: rows.last().map_or(0.0, |r| r.t),
            funnel_margin: rows
                .iter()
                .skip(1)
                .map(|r| r.funnel0_inv - r.e.abs())
                .fold(f64::INFINITY, f64::min),
            max_abs_u: fold(|r| r.u.abs()),
            max_abs_y: fold(|r| r.y.abs()),
            max_abs_ydot: fold(|r| r.ydot.abs()),
            max_k0: fold(|r| r.k0),
            max_k1: fold(|r| r.k1),
            final_abs_e: rows.last().map_or(0.0, |r| r.e.abs()),
            mass_drift: rows
                .iter()
                .map(|r| ((r.mass - m0) / m0).abs())
                .fold(0.0, f64::max),
        }
    }
}

struct Simulation<'a> {
    cfg: &'a ClosedLoopConfig,
    step: LinearStepConfig,
    state: ClosedLoopState,
}

impl<'a> Simulation<'a> {
    fn new(cfg: &'a ClosedLoopConfig, model: ModelKind) -> Result<Self> {
        let step = cfg.validate()?;
        let z = cfg.relative_initial();
        let field = match model {
            ModelKind::Linear => FieldState::Linear(to_characteristic(&z, &cfg.params)),
            ModelKind::Nonlinear => {
                let mut z = z;
                // validate() bounds the wall velocity; pin it exactly
                let last = z.second.len() - 1;
                z.second[0] = 0.0;
                z.second[last] = 0.0;
                FieldState::Nonlinear(NonlinearState::from_field(&z)?)
            }
        };
        Ok(Self {
            cfg,
            step,
            state: ClosedLoopState {
                cart: cfg.cart0,
                field,
                gains: GainState::default(),
                u: 0.0,
                t: 0.0,
            },
        })
    }

    /// Evaluates controller and momentum balance at the current time and
    /// returns the trace row together with the field profiles.
    fn sample(&mut self) -> Result<(TraceRow, StateField)> {
        let cfg = self.cfg;
        let p = &cfg.params;
        let t = self.state.t;
        let r = cfg.reference.eval(t);
        let cart = self.state.cart;
        let e = cart.y - r.y;
        let edot = cart.ydot - r.ydot;
        let (u, gains) = control_input(t, e, edot, &cfg.phi0, &cfg.phi1)?;
        let profiles = self.state.field.profiles(p);
        let yddot = match &self.state.field {
            FieldState::Linear(_) => linear_output_rhs(&profiles, cart.ydot, u, p, &cfg.grid),
            FieldState::Nonlinear(s) => nonlinear_output_rhs(s, u, p, &cfg.grid),
        };
        if !yddot.is_finite() || !cart.is_finite() {
            return Err(Error::NonFinite { t, what: "cart dynamics" });
        }
        self.state.u = u;
        self.state.gains = gains;
        let row = TraceRow {
            t,
            y: cart.y,
            ydot: cart.ydot,
            yddot,
            y_ref: r.y,
            e,
            funnel0_inv: cfg.phi0.radius(t),
            funnel1_inv: cfg.phi1.radius(t),
            k0: gains.k0,
            k1: gains.k1,
            u,
            mass: mass_integral(&profiles, &cfg.grid),
            energy: energy(&profiles, &cfg.grid, p),
        };
        Ok((row, profiles))
    }

    fn advance(&mut self, k: usize, yddot: f64) -> Result<()> {
        let dt = self.step.dt();
        let cart = &mut self.state.cart;
        cart.ydot += dt * yddot;
        cart.y += dt * cart.ydot;
        match &mut self.state.field {
            FieldState::Linear(s) => step_linear(s, yddot, &self.step),
            FieldState::Nonlinear(s) => step_nonlinear(s, yddot, &self.step)?,
        }
        // index-based time avoids accumulating rounding in t
        self.state.t = self.cfg.time(k + 1);
        Ok(())
    }
}

/// Runs the closed loop on `[0, steps * dt]` and records one row per time
/// point (`steps + 1` rows).
pub fn run_closed_loop(cfg: &ClosedLoopConfig, model: ModelKind) -> Result<TraceRecord> {
    let mut sim = Simulation::new(cfg, model)?;
    let mut rows = Vec::with_capacity(cfg.steps + 1);
    let mut snapshots = Vec::with_capacity(cfg.snapshot_times.len());
    let mut pending: Vec<f64> = cfg.snapshot_times.clone();
    pending.sort_by(|a, b| a.total_cmp(b));
    let mut pending = pending.into_iter().peekable();

    for k in 0..=cfg.steps {
        let (row, profiles) = sim.sample()?;
        while let Some(&ts) = pending.peek() {
            if ts <= row.t + 0.5 * cfg.dt {
                snapshots.push(Snapshot {
                    requested: ts,
                    field: profiles.clone(),
                });
                pending.next();
            } else {
                break;
            }
        }
        rows.push(row);
        if k < cfg.steps {
            sim.advance(k, row.yddot)?;
        }
    }
    Ok(TraceRecord {
        model,
        rows,
        snapshots,
    })
}

/// Runs several models on the same configuration, one thread per model.
pub fn run_models(cfg: &ClosedLoopConfig, models: &[ModelKind]) -> Vec<Result<TraceRecord>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = models
            .iter()
            .map(|&m| scope.spawn(move || run_closed_loop(cfg, m)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("closed-loop worker panicked"))
            .collect()
    })
}
