//! Funnel functions and the relative-degree-two funnel controller
//!
//! ```text
//! u  = -k1 (edot + k0 e)
//! k0 = 1 / (1 - phi0(t)^2 e^2)
//! k1 = 1 / (1 - phi1(t)^2 (edot + k0 e)^2)
//! ```

use std::fmt;

use crate::error::{Error, FunnelBoundary, Result};
use crate::model::{CartState, ReferenceSignal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunnelKind {
    /// `phi(t) = scale * tanh(omega t)`
    ScaledTanh,
    /// `phi(t) = scale`
    Constant,
}

/// A funnel function `phi`; the funnel boundary is `1 / phi(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunnelSpec {
    pub kind: FunnelKind,
    pub scale: f64,
    pub omega: f64,
}

impl FunnelSpec {
    pub fn scaled_tanh(scale: f64, omega: f64) -> Self {
        Self {
            kind: FunnelKind::ScaledTanh,
            scale,
            omega,
        }
    }

    pub fn constant(scale: f64) -> Self {
        Self {
            kind: FunnelKind::Constant,
            scale,
            omega: 0.0,
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        match self.kind {
            FunnelKind::ScaledTanh => self.scale * (self.omega * t).tanh(),
            FunnelKind::Constant => self.scale,
        }
    }

    pub fn phi_dot(&self, t: f64) -> f64 {
        match self.kind {
            FunnelKind::ScaledTanh => {
                let th = (self.omega * t).tanh();
                self.scale * self.omega * (1.0 - th * th)
            }
            FunnelKind::Constant => 0.0,
        }
    }

    /// Funnel radius `1 / phi(t)`; `+inf` where `phi` vanishes.
    pub fn radius(&self, t: f64) -> f64 {
        1.0 / self.phi(t)
    }
}

/// Defining properties of the admissible funnel class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunnelProperty {
    /// `phi(t) > 0` for every `t > 0`.
    Positivity,
    /// `phi` and its derivative are bounded.
    Boundedness,
    /// `liminf phi(t) > 0` as `t -> inf`.
    PositiveAtInfinity,
}

impl fmt::Display for FunnelProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunnelProperty::Positivity => "positivity",
            FunnelProperty::Boundedness => "boundedness",
            FunnelProperty::PositiveAtInfinity => "positive liminf",
        })
    }
}

fn violation(property: FunnelProperty, detail: impl Into<String>) -> Error {
    Error::FunnelClass {
        property,
        detail: detail.into(),
    }
}

const SAMPLE_HORIZON: f64 = 1e6;
const SAMPLES_PER_DECADE: usize = 20;

/// Checks membership of `phi` in the admissible funnel class.
///
/// The parametric conditions are checked first, then `phi` and `phi_dot` are
/// sampled on a logarithmic grid in `[1e-6, 1e6]` s.
pub fn validate_funnel_class(phi: &FunnelSpec) -> Result<()> {
    if !phi.scale.is_finite() || !phi.omega.is_finite() {
        return Err(violation(
            FunnelProperty::Boundedness,
            format!("non-finite parameters a = {}, omega = {}", phi.scale, phi.omega),
        ));
    }
    if phi.scale <= 0.0 {
        return Err(violation(
            FunnelProperty::Positivity,
            format!("scale a = {} must be > 0", phi.scale),
        ));
    }
    if phi.kind == FunnelKind::ScaledTanh && phi.omega <= 0.0 {
        return Err(violation(
            FunnelProperty::Positivity,
            format!("rate omega = {} must be > 0", phi.omega),
        ));
    }

    let decades = 12;
    let n = decades * SAMPLES_PER_DECADE;
    for k in 0..=n {
        let t = 1e-6 * 10f64.powf(k as f64 / SAMPLES_PER_DECADE as f64);
        let (v, dv) = (phi.phi(t), phi.phi_dot(t));
        if !v.is_finite() || !dv.is_finite() {
            return Err(violation(
                FunnelProperty::Boundedness,
                format!("phi({t:e}) = {v}, phi'({t:e}) = {dv}"),
            ));
        }
        if v <= 0.0 {
            return Err(violation(
                FunnelProperty::Positivity,
                format!("phi({t:e}) = {v}"),
            ));
        }
    }
    let tail = phi.phi(SAMPLE_HORIZON);
    if tail <= 0.0 {
        return Err(violation(
            FunnelProperty::PositiveAtInfinity,
            format!("phi({SAMPLE_HORIZON:e}) = {tail}"),
        ));
    }
    Ok(())
}

/// Controller gains and the auxiliary error `w = edot + k0 e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainState {
    pub k0: f64,
    pub k1: f64,
    pub w: f64,
}

impl Default for GainState {
    fn default() -> Self {
        Self {
            k0: 1.0,
            k1: 1.0,
            w: 0.0,
        }
    }
}

/// Evaluates both gains; the error carries the value of `phi * |arg|` that
/// reached or exceeded one.
fn gains(t: f64, e: f64, edot: f64, phi0: &FunnelSpec, phi1: &FunnelSpec) -> Result<GainState, (FunnelBoundary, f64)> {
    let p0 = phi0.phi(t);
    let den0 = 1.0 - p0 * p0 * e * e;
    if !(den0 > 0.0) {
        return Err((FunnelBoundary::Error, (p0 * e).abs()));
    }
    let k0 = 1.0 / den0;
    let w = edot + k0 * e;
    let p1 = phi1.phi(t);
    let den1 = 1.0 - p1 * p1 * w * w;
    if !(den1 > 0.0) {
        return Err((FunnelBoundary::Derivative, (p1 * w).abs()));
    }
    Ok(GainState {
        k0,
        k1: 1.0 / den1,
        w,
    })
}

/// Checks the two strict initial inequalities for the cart data `cart0`.
pub fn check_initial_feasibility(
    phi0: &FunnelSpec,
    phi1: &FunnelSpec,
    cart0: &CartState,
    reference: &ReferenceSignal,
) -> Result<()> {
    let r = reference.eval(0.0);
    gains(0.0, cart0.y - r.y, cart0.ydot - r.ydot, phi0, phi1)
        .map(|_| ())
        .map_err(|(which, value)| Error::Infeasible { which, value })
}

/// The funnel control law. Returns the force `u` and the gains used.
///
/// Leaving either funnel is an error, never a clamp.
pub fn control_input(
    t: f64,
    e: f64,
    edot: f64,
    phi0: &FunnelSpec,
    phi1: &FunnelSpec,
) -> Result<(f64, GainState)> {
    let g = gains(t, e, edot, phi0, phi1)
        .map_err(|(which, value)| Error::FunnelViolation { t, which, value })?;
    Ok((-g.k1 * g.w, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PI: f64 = std::f64::consts::PI;

    fn constant(value: f64) -> FunnelSpec {
        FunnelSpec::constant(value)
    }

    #[test]
    fn preset_funnels_are_admissible() {
        let f = (9.81f64 / 0.5).sqrt();
        validate_funnel_class(&FunnelSpec::scaled_tanh(100.0, 0.06 * PI * f)).unwrap();
        validate_funnel_class(&FunnelSpec::scaled_tanh(10.0, 0.025)).unwrap();
    }

    #[test]
    fn negative_scale_fails_positivity() {
        let err = validate_funnel_class(&FunnelSpec::scaled_tanh(-1.0, 1.0)).unwrap_err();
        assert!(matches!(
            err,
            Error::FunnelClass {
                property: FunnelProperty::Positivity,
                ..
            }
        ));
        let err = validate_funnel_class(&FunnelSpec::scaled_tanh(1.0, 0.0)).unwrap_err();
        assert!(matches!(
            err,
            Error::FunnelClass {
                property: FunnelProperty::Positivity,
                ..
            }
        ));
        let err = validate_funnel_class(&FunnelSpec::scaled_tanh(f64::INFINITY, 1.0)).unwrap_err();
        assert!(matches!(
            err,
            Error::FunnelClass {
                property: FunnelProperty::Boundedness,
                ..
            }
        ));
    }

    #[test]
    fn feasibility_with_pole_at_zero() {
        let phi = FunnelSpec::scaled_tanh(100.0, 0.8);
        let r = ReferenceSignal::tanh_squared(0.8).unwrap();
        check_initial_feasibility(&phi, &phi, &CartState::new(123.0, -45.0), &r).unwrap();
    }

    #[test]
    fn feasibility_first_inequality() {
        let one = constant(1.0);
        let r = ReferenceSignal::tanh_squared(0.0).unwrap();
        let err = check_initial_feasibility(&one, &one, &CartState::new(2.0, 0.0), &r).unwrap_err();
        assert!(matches!(
            err,
            Error::Infeasible {
                which: FunnelBoundary::Error,
                ..
            }
        ));
        let err = check_initial_feasibility(&one, &one, &CartState::new(0.0, 1.5), &r).unwrap_err();
        assert!(matches!(
            err,
            Error::Infeasible {
                which: FunnelBoundary::Derivative,
                ..
            }
        ));
    }

    #[test]
    fn feasibility_hand_evaluation() {
        // phi0 = phi1 = 2, e = 0.25, edot = 0 -> k0 = 4/3, 2 * |0 + 4/3 * 0.25| = 2/3 < 1
        let two = constant(2.0);
        let r = ReferenceSignal::tanh_squared(0.0).unwrap();
        check_initial_feasibility(&two, &two, &CartState::new(0.25, 0.0), &r).unwrap();
        let g = gains(0.0, 0.25, 0.0, &two, &two).unwrap();
        assert!((g.k0 - 4.0 / 3.0).abs() < 1e-15);
        assert!((2.0 * g.w.abs() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_funnel_is_admissible() {
        validate_funnel_class(&FunnelSpec::constant(3.0)).unwrap();
        assert!(validate_funnel_class(&FunnelSpec::constant(0.0)).is_err());
    }

    #[test]
    fn zero_error_gives_unit_gains() {
        let phi = constant(5.0);
        let (u, g) = control_input(1.0, 0.0, 0.0, &phi, &phi).unwrap();
        assert_eq!(u, 0.0);
        assert_eq!((g.k0, g.k1, g.w), (1.0, 1.0, 0.0));
    }

    #[test]
    fn hand_evaluated_control() {
        let two = constant(2.0);
        let (u, g) = control_input(1.0, 0.25, 0.0, &two, &two).unwrap();
        assert!((g.k0 - 4.0 / 3.0).abs() < 1e-15);
        assert!((g.w - 1.0 / 3.0).abs() < 1e-15);
        assert!((g.k1 - 9.0 / 5.0).abs() < 1e-14);
        assert!((u + 3.0 / 5.0).abs() < 1e-14);
    }

    #[test]
    fn gain_blows_up_at_boundary() {
        let phi = constant(1.0);
        let mut last = 0.0;
        for n in 1..12 {
            let e = 1.0 - 10f64.powi(-n);
            let g = gains(1.0, e, 0.0, &phi, &constant(1e-30)).unwrap();
            assert!(g.k0 > last);
            last = g.k0;
        }
        assert!(last > 1e10);
    }

    #[test]
    fn violation_is_an_error_with_time() {
        let phi = constant(1.0);
        let err = control_input(2.5, 1.0, 0.0, &phi, &phi).unwrap_err();
        assert_eq!(err.failure_time(), Some(2.5));
        assert!(matches!(
            err,
            Error::FunnelViolation {
                which: FunnelBoundary::Error,
                ..
            }
        ));
        let err = control_input(2.5, 0.0, 3.0, &phi, &phi).unwrap_err();
        assert!(matches!(
            err,
            Error::FunnelViolation {
                which: FunnelBoundary::Derivative,
                ..
            }
        ));
    }

    proptest! {
        #[test]
        fn gains_at_least_one_and_odd(
            t in 0.0f64..10.0,
            a0 in 0.1f64..200.0,
            a1 in 0.1f64..200.0,
            s in -0.999f64..0.999,
            r in -0.999f64..0.999,
        ) {
            let phi0 = FunnelSpec::scaled_tanh(a0, 0.8);
            let phi1 = FunnelSpec::scaled_tanh(a1, 0.8);
            let p0 = phi0.phi(t).max(1e-12);
            let p1 = phi1.phi(t).max(1e-12);
            let e = s / p0;
            let k0 = 1.0 / (1.0 - s * s);
            let edot = r / p1 - k0 * e;
            if let Ok((u, g)) = control_input(t, e, edot, &phi0, &phi1) {
                prop_assert!(g.k0 >= 1.0 && g.k1 >= 1.0);
                let (um, gm) = control_input(t, -e, -edot, &phi0, &phi1).unwrap();
                prop_assert_eq!(um, -u);
                prop_assert_eq!((gm.k0, gm.k1), (g.k0, g.k1));
                let (u2, _) = control_input(t, e, edot, &phi0, &phi1).unwrap();
                prop_assert_eq!(u.to_bits(), u2.to_bits());
            }
        }

        #[test]
        fn gains_increase_with_error(s1 in 0.0f64..0.99, ds in 0.0001f64..0.009) {
            let phi = constant(1.0);
            let s2 = s1 + ds;
            let g1 = gains(1.0, s1, -s1 / (1.0 - s1 * s1), &phi, &phi).unwrap();
            let g2 = gains(1.0, s2, -s2 / (1.0 - s2 * s2), &phi, &phi).unwrap();
            prop_assert!(g2.k0 > g1.k0);
        }
    }
}
