//! Funnel control of a moving water tank.
//!
//! A cart carrying a water tank is driven by a force `u`; the water sloshes
//! according to the (linearized or nonlinear) Saint-Venant equations and
//! feeds back into the cart through the momentum balance. The funnel
//! controller keeps the tracking error inside a prescribed time-varying
//! funnel without knowing the plant parameters.
//!
//! Modules:
//! - [`model`]: physical constants, grid, reference signal, quadrature
//! - [`funnel`]: funnel functions and the control law
//! - [`linear`]: characteristic finite-difference solver for the linear PDE
//! - [`nonlinear`]: conservative solver for the nonlinear PDE
//! - [`closed_loop`]: coupled simulation and traces
//! - [`analysis`]: transfer function, modal series, impulse-response comb
//! - [`config`], [`trace`]: experiment files and CSV traces

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod closed_loop;
pub mod config;
pub mod error;
pub mod funnel;
pub mod linear;
pub mod model;
pub mod nonlinear;
pub mod trace;

pub use closed_loop::{
    linear_output_rhs, run_closed_loop, run_models, ClosedLoopConfig, ClosedLoopState, ModelKind, RunSummary,
    TraceRecord, TraceRow,
};
pub use error::{Error, FunnelBoundary, Result};
pub use funnel::{check_initial_feasibility, control_input, validate_funnel_class, FunnelSpec, GainState};
pub use linear::{solve_steady_state, step_linear, CharacteristicState, LinearStepConfig};
pub use model::{
    energy, mass_integral, reference_eval, CartState, PhysicalParams, ReferenceSignal, SpatialGrid, StateField,
};
pub use nonlinear::{friction, nonlinear_output_rhs, step_nonlinear, NonlinearState};
pub use config::{derive_grids, parse_config, parse_config_str, preset, ExperimentConfig, InitialProfile, ModelSelection};
pub use trace::{read_csv, validate_trace, write_csv};
pub use num_complex::Complex64;
