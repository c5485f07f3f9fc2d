//! Dormand-Prince 5(4) integrator with adaptive step size.

/// Tolerances of the embedded error control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub relative: f64,
    pub absolute: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            relative: 1e-3,
            absolute: 1e-6,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights are the last row of A; these are the fourth-order ones
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop<T> {
    /// The stop predicate returned `Some` at an accepted state.
    Event(T),
    /// `t_max` was passed first.
    Timeout,
    /// The step size collapsed or the state became non-finite.
    Failed,
}

/// Integrates `y' = rhs(t, y)` from `t = 0` until `stop(t, y)` returns
/// `Some`, checking the initial state and every accepted step.
pub fn integrate_until<F, S, T>(
    rhs: F,
    y0: &[f64],
    t_max: f64,
    tol: Tolerances,
    mut stop: S,
) -> (Stop<T>, f64, Vec<f64>)
where
    F: Fn(f64, &[f64], &mut [f64]),
    S: FnMut(f64, &[f64]) -> Option<T>,
{
    let d = y0.len();
    let mut t = 0.0;
    let mut y = y0.to_vec();
    if let Some(ev) = stop(t, &y) {
        return (Stop::Event(ev), t, y);
    }
    let mut k = vec![vec![0.0; d]; 7];
    let mut tmp = vec![0.0; d];
    let mut y5 = vec![0.0; d];
    let mut h = 1e-2_f64.min(t_max);
    rhs(t, &y, &mut k[0]);
    while t < t_max {
        if h < 1e-12 * t_max.max(1.0) {
            return (Stop::Failed, t, y);
        }
        let step = h.min(t_max - t);
        for s in 1..7 {
            for i in 0..d {
                tmp[i] = y[i] + step * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            rhs(t + C[s] * step, &tmp, &mut k[s]);
        }
        // k[6] was evaluated at the fifth-order solution
        y5.copy_from_slice(&tmp);
        let mut err = 0.0;
        for i in 0..d {
            let y4 = y[i] + step * (0..7).map(|j| B4[j] * k[j][i]).sum::<f64>();
            let scale = tol.absolute + tol.relative * y[i].abs().max(y5[i].abs());
            err += ((y5[i] - y4) / scale).powi(2);
        }
        let err = (err / d as f64).sqrt();
        if !err.is_finite() {
            return (Stop::Failed, t, y);
        }
        if err <= 1.0 {
            t += step;
            y.copy_from_slice(&y5);
            k.swap(0, 6);
            if let Some(ev) = stop(t, &y) {
                return (Stop::Event(ev), t, y);
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    (Stop::Timeout, t, y)
}
