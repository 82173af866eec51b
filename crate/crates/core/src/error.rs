use std::path::PathBuf;

use thiserror::Error;

use crate::funnel::FunnelProperty;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which of the two funnel denominators of the controller collapsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunnelBoundary {
    /// `phi0(t) |e(t)| >= 1`
    Error,
    /// `phi1(t) |edot(t) + k0(t) e(t)| >= 1`
    Derivative,
}

impl std::fmt::Display for FunnelBoundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunnelBoundary::Error => f.write_str("phi0*|e| < 1"),
            FunnelBoundary::Derivative => f.write_str("phi1*|edot + k0*e| < 1"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("funnel function violates class property ({property}): {detail}")]
    FunnelClass {
        property: FunnelProperty,
        detail: String,
    },

    #[error("initial data infeasible: {which} violated (value {value:.6e})")]
    Infeasible { which: FunnelBoundary, value: f64 },

    #[error("left the performance funnel at t = {t:.6e} s: {which} violated (value {value:.6e})")]
    FunnelViolation {
        t: f64,
        which: FunnelBoundary,
        value: f64,
    },

    #[error("CFL condition violated at t = {t:.6e} s: Courant number {courant:.6} exceeds {limit}")]
    Cfl { t: f64, courant: f64, limit: f64 },

    #[error("grid too coarse: Courant number {courant:.6} exceeds {limit}; use at least M = {suggested_m} time points at this spatial resolution")]
    GridCfl {
        courant: f64,
        limit: f64,
        suggested_m: usize,
    },

    #[error("water height lost positivity at t = {t:.6e} s, node {index}: h = {h:.6e}")]
    Positivity { t: f64, index: usize, h: f64 },

    #[error("non-finite state at t = {t:.6e} s ({what})")]
    NonFinite { t: f64, what: &'static str },

    #[error("outside the domain of evaluation: {0}")]
    Domain(String),

    #[error("config {key}: {reason}")]
    Config { key: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("trace: {0}")]
    Trace(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True for errors raised before any time stepping takes place.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::FunnelClass { .. }
                | Error::Infeasible { .. }
                | Error::GridCfl { .. }
                | Error::Domain(_)
                | Error::Config { .. }
        )
    }

    /// Simulation time at which a runtime failure occurred, if any.
    pub fn failure_time(&self) -> Option<f64> {
        match self {
            Error::FunnelViolation { t, .. }
            | Error::Cfl { t, .. }
            | Error::Positivity { t, .. }
            | Error::NonFinite { t, .. } => Some(*t),
            _ => None,
        }
    }
}
