use serde::Serialize;

use crate::model::PhysicalParams;

/// Atomic part of the impulse response: an alternating, exponentially
/// damped comb of Dirac masses at multiples of the travel time `1/c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaComb {
    /// `(location, weight)` for `k = 0..=truncation`.
    pub atoms: Vec<(f64, f64)>,
    pub truncation: usize,
    pub wave_speed: f64,
    /// `exp(-mu / c)`, the decay ratio between neighbouring atoms.
    pub ratio: f64,
}

impl DeltaComb {
    /// Sum of `|weight|` over the stored atoms, accumulated from the
    /// smallest atom upwards.
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().rev().map(|(_, w)| w.abs()).sum()
    }

    /// `(1 + 2 r / (1 - r)) / (4c)`.
    pub fn total_variation_closed_form(&self) -> f64 {
        let r = self.ratio;
        (1.0 + 2.0 * r / (1.0 - r)) / (4.0 * self.wave_speed)
    }

    /// `(1 + 2 r (1 - r^K) / (1 - r)) / (4c)`, the geometric sum up to the
    /// truncation.
    pub fn truncated_closed_form(&self) -> f64 {
        let r = self.ratio;
        let k = self.truncation as i32;
        let partial = r * (1.0 - r.powi(k)) / (1.0 - r);
        (1.0 + 2.0 * partial) / (4.0 * self.wave_speed)
    }

    /// Mass carried by the atoms beyond the truncation.
    pub fn tail_variation(&self) -> f64 {
        let r = self.ratio;
        r.powi(self.truncation as i32 + 1) / ((1.0 - r) * 2.0 * self.wave_speed)
    }
}

/// Atoms `1/(4c)` at `0` and `(-1)^k exp(-k mu / c) / (2c)` at `k/c`.
pub fn impulse_response_comb(p: &PhysicalParams, truncation: usize) -> DeltaComb {
    let c = p.wave_speed();
    let ratio = (-p.mu() / c).exp();
    let mut atoms = Vec::with_capacity(truncation + 1);
    atoms.push((0.0, 1.0 / (4.0 * c)));
    for k in 1..=truncation {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let weight = sign * (-(k as f64) * p.mu() / c).exp() / (2.0 * c);
        atoms.push((k as f64 / c, weight));
    }
    DeltaComb { atoms, truncation, wave_speed: c, ratio }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(mu: f64) -> PhysicalParams {
        PhysicalParams::new(1.0, 0.5, 9.81, mu, 2.0 * mu, 1.0).unwrap()
    }

    #[test]
    fn frozen_total_variation() {
        let tv = impulse_response_comb(&params(0.1), 0).total_variation_closed_form();
        assert!((tv - 5.000849444463742).abs() < 1e-12, "{tv:.16}");
        let tv = impulse_response_comb(&params(0.01), 0).total_variation_closed_form();
        assert!((tv - 50.00008494730409).abs() < 1e-10, "{tv:.16}");
    }

    #[test]
    fn truncated_sum_matches_geometric_form() {
        for mu in [0.1, 0.01] {
            let comb = impulse_response_comb(&params(mu), 200);
            let rel = (comb.total_variation() - comb.truncated_closed_form()).abs() / comb.truncated_closed_form();
            assert!(rel < 1e-12, "mu = {mu}: {rel}");
            let gap = comb.total_variation_closed_form() - comb.total_variation();
            assert!((gap - comb.tail_variation()).abs() < 1e-9 * comb.total_variation_closed_form());
        }
    }

    #[test]
    fn truncation_converges_geometrically() {
        let p = params(0.1);
        let gaps: Vec<f64> = [100, 200, 400]
            .iter()
            .map(|&k| {
                let comb = impulse_response_comb(&p, k);
                comb.total_variation_closed_form() - comb.total_variation()
            })
            .collect();
        let r = impulse_response_comb(&p, 0).ratio;
        assert!((gaps[1] / gaps[0] - r.powi(100)).abs() < 1e-6);
        assert!((gaps[2] / gaps[1] - r.powi(200)).abs() < 1e-6);
    }

    #[test]
    fn heavy_damping_leaves_origin_atom() {
        let p = PhysicalParams::new(1.0, 0.5, 9.81, 1e4, 0.0, 0.0).unwrap();
        let comb = impulse_response_comb(&p, 50);
        let origin = 1.0 / (4.0 * p.wave_speed());
        assert!((comb.total_variation_closed_form() - origin).abs() < 1e-15);
        assert!(comb.atoms[1..].iter().all(|(_, w)| w.abs() < 1e-300));
    }

    #[test]
    fn signs_alternate_and_locations_are_travel_times() {
        let p = params(0.1);
        let comb = impulse_response_comb(&p, 20);
        assert_eq!(comb.atoms.len(), 21);
        for k in 1..20 {
            assert!(comb.atoms[k].1 * comb.atoms[k + 1].1 < 0.0);
            assert!((comb.atoms[k].0 * p.wave_speed() - k as f64).abs() < 1e-12);
        }
        assert!(comb.atoms[0].1 > 0.0 && comb.atoms[1].1 < 0.0);
    }
}
