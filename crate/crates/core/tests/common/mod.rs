//! Dense semi-discrete reference for the linear solver.
//!
//! The upwind finite-volume semi-discretization in characteristic variables is
//! assembled as a dense matrix and integrated with an adaptive Dormand-Prince
//! 5(4) method. Unknowns: `[z1_0, eta1_1..eta1_{n-2}, eta2_1..eta2_{n-2}, z1_{n-1}]`.

#![allow(dead_code)]

use tank_core::model::PhysicalParams;

pub struct DenseOracle {
    pub n: usize,
    dim: usize,
    matrix: Vec<f64>,
    forcing: Vec<f64>,
}

impl DenseOracle {
    pub fn new(p: &PhysicalParams, n: usize) -> Self {
        assert!(n >= 3);
        let dim = 2 * n - 2;
        let c = p.wave_speed();
        let mu = p.mu();
        let k = c * (n - 1) as f64;
        let mut a = vec![0.0; dim * dim];
        let mut f = vec![0.0; dim];
        let e1 = |i: usize| i; // eta1_i, 1 <= i <= n-2
        let e2 = |i: usize| n - 2 + i; // eta2_i
        let zl = 0;
        let zr = dim - 1;
        let idx1 = |i: usize| -> (usize, f64) {
            if i == 0 {
                (zl, 0.5)
            } else if i == n - 1 {
                (zr, 0.5)
            } else {
                (e1(i), 1.0)
            }
        };
        let idx2 = |i: usize| -> (usize, f64) {
            if i == 0 {
                (zl, 0.5)
            } else if i == n - 1 {
                (zr, 0.5)
            } else {
                (e2(i), 1.0)
            }
        };
        let mut add = |row: usize, (col, w): (usize, f64), v: f64| a[row * dim + col] += w * v;

        // walls: half cells with the interface flux c eta1_i - c eta2_{i+1}
        add(zl, idx1(0), -2.0 * k);
        add(zl, idx2(1), 2.0 * k);
        add(zr, idx1(n - 2), 2.0 * k);
        add(zr, idx2(n - 1), -2.0 * k);

        for i in 1..n - 1 {
            let r1 = e1(i);
            add(r1, idx1(i), -k - mu);
            add(r1, idx1(i - 1), k);
            add(r1, idx2(i), mu);
            f[r1] = -0.5 * c / p.g();

            let r2 = e2(i);
            add(r2, idx2(i), -k - mu);
            add(r2, idx2(i + 1), k);
            add(r2, idx1(i), mu);
            f[r2] = 0.5 * c / p.g();
        }
        Self {
            n,
            dim,
            matrix: a,
            forcing: f,
        }
    }

    pub fn pack(&self, eta1: &[f64], eta2: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = vec![0.0; self.dim];
        x[0] = eta1[0] + eta2[0];
        x[self.dim - 1] = eta1[n - 1] + eta2[n - 1];
        x[1..n - 1].copy_from_slice(&eta1[1..n - 1]);
        x[n - 1..2 * n - 3].copy_from_slice(&eta2[1..n - 1]);
        x
    }

    pub fn unpack(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut eta1 = vec![0.5 * x[0]; n];
        let mut eta2 = vec![0.5 * x[0]; n];
        eta1[n - 1] = 0.5 * x[self.dim - 1];
        eta2[n - 1] = 0.5 * x[self.dim - 1];
        eta1[1..n - 1].copy_from_slice(&x[1..n - 1]);
        eta2[1..n - 1].copy_from_slice(&x[n - 1..2 * n - 3]);
        (eta1, eta2)
    }

    fn rhs(&self, x: &[f64], yddot: f64, out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.matrix[r * self.dim..(r + 1) * self.dim];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.forcing[r] * yddot;
        }
    }

    /// Integrates from `t0` to `t1` with forcing `yddot(t)`.
    pub fn integrate(&self, x: &mut [f64], t0: f64, t1: f64, yddot: &dyn Fn(f64) -> f64, tol: f64) {
        dopri5(|t, y, out| self.rhs(y, yddot(t), out), x, t0, t1, tol);
    }
}

/// Adaptive Dormand-Prince 5(4) with mixed absolute/relative error control.
pub fn dopri5(f: impl Fn(f64, &[f64], &mut [f64]), y: &mut [f64], t0: f64, t1: f64, tol: f64) {
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let dim = y.len();
    let mut k = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];
    let mut t = t0;
    let mut h = (t1 - t0) / 100.0;
    while t1 - t > 1e-14 * t1.abs().max(1.0) {
        if t + h > t1 {
            h = t1 - t;
        }
        for s in 0..7 {
            for j in 0..dim {
                stage[j] = y[j] + h * (0..s).map(|q| A[s][q] * k[q][j]).sum::<f64>();
            }
            f(t + C[s] * h, &stage, &mut k[s]);
        }
        let mut err: f64 = 0.0;
        let mut y5 = vec![0.0; dim];
        for j in 0..dim {
            let incr5: f64 = (0..7).map(|s| B5[s] * k[s][j]).sum();
            let incr4: f64 = (0..7).map(|s| B4[s] * k[s][j]).sum();
            y5[j] = y[j] + h * incr5;
            let scale = tol * (1.0 + y[j].abs().max(y5[j].abs()));
            err = err.max((h * (incr5 - incr4)).abs() / scale);
        }
        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&y5);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
}
