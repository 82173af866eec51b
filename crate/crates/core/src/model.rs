//! Physical constants, the spatial grid, field containers and the reference
//! trajectory shared by every solver.

use crate::error::{Error, Result};

/// Tank and fluid constants in SI units.
///
/// `mu` is half the slope of the friction law at zero velocity; `c_d`, `c_s`
/// parameterize the friction law `S(z) = c_d z + c_s z^2` of the nonlinear
/// model. The linear model only sees `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    m: f64,
    h0: f64,
    g: f64,
    mu: f64,
    c_d: f64,
    c_s: f64,
}

impl PhysicalParams {
    pub fn new(m: f64, h0: f64, g: f64, mu: f64, c_d: f64, c_s: f64) -> Result<Self> {
        positive("m", m)?;
        positive("h0", h0)?;
        positive("g", g)?;
        // mu = 0 is the undamped regime where the impulse response has unbounded variation
        positive("mu", mu)?;
        non_negative("c_d", c_d)?;
        non_negative("c_s", c_s)?;
        Ok(Self {
            m,
            h0,
            g,
            mu,
            c_d,
            c_s,
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn c_d(&self) -> f64 {
        self.c_d
    }

    pub fn c_s(&self) -> f64 {
        self.c_s
    }

    /// Gravity wave speed `c = sqrt(h0 g)`.
    pub fn wave_speed(&self) -> f64 {
        (self.h0 * self.g).sqrt()
    }

    /// `f = sqrt(g / h0)`.
    pub fn frequency(&self) -> f64 {
        (self.g / self.h0).sqrt()
    }

    /// `tau = 1 / f`.
    pub fn tau(&self) -> f64 {
        1.0 / self.frequency()
    }
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {x}")))
    }
}

fn non_negative(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and >= 0, got {x}")))
    }
}

/// Uniform grid of `n_points` nodes on the normalized tank `[0, 1]`,
/// both walls included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpatialGrid {
    n_points: usize,
}

impl SpatialGrid {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::param(
                "n_points",
                format!("need at least 3 grid nodes, got {n_points}"),
            ));
        }
        Ok(Self { n_points })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.n_points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.node(i))
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes().map(f).collect()
    }
}

/// Trapezoid rule on a uniform grid with spacing `dx`.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => dx * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// Trapezoid rule for the product of two sampled profiles.
pub fn trapezoid_product(a: &[f64], b: &[f64], dx: f64) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = a[1..n - 1]
        .iter()
        .zip(&b[1..n - 1])
        .map(|(x, y)| x * y)
        .sum();
    dx * (0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]) + inner)
}

/// Two sampled spatial profiles at time `t`.
///
/// Linear model: `first = z1` (height), `second = z2` (velocity relative to
/// the tank). Nonlinear model: `first = h`, `second = v`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub t: f64,
}

impl StateField {
    pub fn new(first: Vec<f64>, second: Vec<f64>, t: f64) -> Result<Self> {
        if first.len() != second.len() {
            return Err(Error::param(
                "state",
                format!(
                    "component lengths differ ({} vs {})",
                    first.len(),
                    second.len()
                ),
            ));
        }
        Ok(Self { first, second, t })
    }

    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    /// Largest velocity magnitude at the two walls.
    pub fn wall_velocity(&self) -> f64 {
        match (self.second.first(), self.second.last()) {
            (Some(a), Some(b)) => a.abs().max(b.abs()),
            _ => 0.0,
        }
    }
}

/// `int_0^1 z1 dzeta` by the trapezoid rule.
pub fn mass_integral(s: &StateField, grid: &SpatialGrid) -> f64 {
    trapezoid(&s.first, grid.spacing())
}

/// `1/2 int_0^1 (g z1^2 + h0 z2^2) dzeta` by the trapezoid rule.
pub fn energy(s: &StateField, grid: &SpatialGrid, p: &PhysicalParams) -> f64 {
    let dx = grid.spacing();
    0.5 * (p.g() * trapezoid_product(&s.first, &s.first, dx)
        + p.h0() * trapezoid_product(&s.second, &s.second, dx))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// `y_ref(t) = tanh(omega t)^2`
    TanhSquared,
}

/// Reference position with closed-form first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSignal {
    pub kind: ReferenceKind,
    pub omega: f64,
}

/// `(y_ref, ydot_ref, yddot_ref)` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceValue {
    pub y: f64,
    pub ydot: f64,
    pub yddot: f64,
}

impl ReferenceSignal {
    /// `omega = 0` gives the identically zero reference.
    pub fn tanh_squared(omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::param(
                "reference.omega",
                format!("must be finite and >= 0, got {omega}"),
            ));
        }
        Ok(Self {
            kind: ReferenceKind::TanhSquared,
            omega,
        })
    }

    pub fn eval(&self, t: f64) -> ReferenceValue {
        reference_eval(self, t)
    }
}

pub fn reference_eval(r: &ReferenceSignal, t: f64) -> ReferenceValue {
    match r.kind {
        ReferenceKind::TanhSquared => {
            let w = r.omega;
            let th = (w * t).tanh();
            let sech2 = 1.0 - th * th;
            ReferenceValue {
                y: th * th,
                ydot: 2.0 * w * th * sech2,
                yddot: 2.0 * w * w * sech2 * (sech2 - 2.0 * th * th),
            }
        }
    }
}

/// Cart position and velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartState {
    pub y: f64,
    pub ydot: f64,
}

impl CartState {
    pub fn new(y: f64, ydot: f64) -> Self {
        Self { y, ydot }
    }

    pub fn is_finite(&self) -> bool {
        self.y.is_finite() && self.ydot.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn experiment_params() -> PhysicalParams {
        PhysicalParams::new(1.0, 0.5, 9.81, 0.1, 0.2, 1.0).unwrap()
    }

    #[test]
    fn derived_constants() {
        let p = experiment_params();
        assert!((p.wave_speed().powi(2) - p.h0() * p.g()).abs() < 1e-15);
        assert!((p.tau() * p.frequency() - 1.0).abs() < 1e-15);
        // c * tau = h0
        assert!((p.wave_speed() * p.tau() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_zero_damping_and_bad_constants() {
        assert!(PhysicalParams::new(1.0, 0.5, 9.81, 0.0, 0.0, 1.0).is_err());
        assert!(PhysicalParams::new(0.0, 0.5, 9.81, 0.1, 0.2, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, -0.5, 9.81, 0.1, 0.2, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 0.5, 9.81, 0.1, -0.2, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 0.5, f64::NAN, 0.1, 0.2, 1.0).is_err());
    }

    #[test]
    fn grid_covers_unit_interval() {
        assert!(SpatialGrid::new(2).is_err());
        let g = SpatialGrid::new(11).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert!((g.node(10) - 1.0).abs() < 1e-15);
        assert!((g.spacing() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn reference_at_zero() {
        let r = ReferenceSignal::tanh_squared(0.7).unwrap();
        let v = r.eval(0.0);
        assert_eq!(v.y, 0.0);
        assert_eq!(v.ydot, 0.0);
        assert!((v.yddot - 2.0 * 0.7 * 0.7).abs() < 1e-15);
    }

    #[test]
    fn reference_saturates() {
        let r = ReferenceSignal::tanh_squared(0.7).unwrap();
        let v = r.eval(200.0);
        assert!((v.y - 1.0).abs() < 1e-15);
        assert!(v.ydot.abs() < 1e-15);
        assert!(v.yddot.abs() < 1e-15);
    }

    #[test]
    fn reference_regression_at_tau() {
        // omega = 0.06 pi f with f = sqrt(9.81/0.5), evaluated at t = tau = 1/f.
        // Frozen from an independent double-precision evaluation of tanh^2 and
        // its derivatives (wt = 0.06 pi).
        let f = (9.81f64 / 0.5).sqrt();
        let r = ReferenceSignal::tanh_squared(0.06 * std::f64::consts::PI * f).unwrap();
        let v = r.eval(1.0 / f);
        assert!((v.y - 0.034705598104690726).abs() < 1e-15);
        assert!((v.ydot - 0.3002895191232804).abs() < 1e-14);
        assert!((v.yddot - 1.2057087919337097).abs() < 1e-13);
    }

    #[test]
    fn reference_derivatives_match_finite_differences() {
        let r = ReferenceSignal::tanh_squared(0.834_931).unwrap();
        let ts = [0.05, 0.3, 1.1, 2.5];
        let err = |dt: f64| {
            ts.iter()
                .map(|&t| {
                    let fd1 = (r.eval(t + dt).y - r.eval(t - dt).y) / (2.0 * dt);
                    let fd2 = (r.eval(t + dt).ydot - r.eval(t - dt).ydot) / (2.0 * dt);
                    let v = r.eval(t);
                    (fd1 - v.ydot).abs().max((fd2 - v.yddot).abs())
                })
                .fold(0.0, f64::max)
        };
        let (e3, e4) = (err(1e-3), err(1e-4));
        let order = (e3 / e4).log10();
        assert!(order >= 1.9, "observed order {order} (errors {e3:e}, {e4:e})");
    }

    #[test]
    fn zero_reference() {
        let r = ReferenceSignal::tanh_squared(0.0).unwrap();
        let v = r.eval(3.0);
        assert_eq!((v.y, v.ydot, v.yddot), (0.0, 0.0, 0.0));
        assert!(ReferenceSignal::tanh_squared(-1.0).is_err());
    }

    #[test]
    fn mass_of_constant_and_sine_profiles() {
        let grid = SpatialGrid::new(201).unwrap();
        let flat = StateField::new(vec![0.5; 201], vec![0.0; 201], 0.0).unwrap();
        assert!((mass_integral(&flat, &grid) - 0.5).abs() < 1e-15);

        let pi = std::f64::consts::PI;
        let z1 = grid.sample(|x| 0.5 + (2.0 * pi * x).sin());
        let s = StateField::new(z1, vec![0.0; 201], 0.0).unwrap();
        assert!((mass_integral(&s, &grid) - 0.5).abs() < grid.spacing().powi(2));

        let z2 = grid.sample(|x| 0.1 * (4.0 * pi * x).sin().powi(2));
        let s = StateField::new(vec![0.5; 201], z2, 0.0).unwrap();
        assert!((mass_integral(&s, &grid) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn energy_examples() {
        let p = experiment_params();
        let grid = SpatialGrid::new(11).unwrap();
        let zero = StateField::new(vec![0.0; 11], vec![0.0; 11], 0.0).unwrap();
        assert_eq!(energy(&zero, &grid, &p), 0.0);
        let ones = StateField::new(vec![1.0; 11], vec![0.0; 11], 0.0).unwrap();
        assert!((energy(&ones, &grid, &p) - p.g() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_degenerate() {
        assert_eq!(trapezoid(&[], 0.1), 0.0);
        assert_eq!(trapezoid(&[3.0], 0.1), 0.0);
        assert!((trapezoid(&[1.0, 3.0], 0.5) - 1.0).abs() < 1e-15);
    }
}
