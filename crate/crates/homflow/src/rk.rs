//! Adaptive Dormand-Prince 5(4) integration with FSAL and step-size
//! control. States are dynamic vectors; an event callback can stop the
//! integration at any accepted step.

use nalgebra::DVector;

#[derive(Debug, Clone)]
pub struct RkOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h0: Option<f64>,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for RkOptions {
    fn default() -> Self {
        RkOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            h0: None,
            h_min: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntStatus {
    Completed,
    StoppedByEvent,
    StepFailure,
    MaxSteps,
}

#[derive(Debug, Clone)]
pub struct Integration {
    pub ts: Vec<f64>,
    pub ys: Vec<DVector<f64>>,
    pub status: IntStatus,
    pub n_accepted: usize,
    pub n_rejected: usize,
}

const A: [[f64; 6]; 6] = [
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
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates dy/dt = f(t, y) from t0 to t_end. The event callback sees
/// every accepted step; returning true stops the run.
pub fn dopri5<F, E>(
    f: &F,
    t0: f64,
    t_end: f64,
    y0: DVector<f64>,
    opts: &RkOptions,
    event: &mut E,
) -> Integration
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64>,
    E: FnMut(f64, &DVector<f64>) -> bool,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    let mut h = opts.h0.unwrap_or(span.min(1e-3).max(1e-10)) * dir;
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut ts = vec![t];
    let mut ys = vec![y.clone()];
    let mut n_accepted = 0;
    let mut n_rejected = 0;
    if event(t, &y) {
        return Integration {
            ts,
            ys,
            status: IntStatus::StoppedByEvent,
            n_accepted,
            n_rejected,
        };
    }
    if span == 0.0 {
        return Integration {
            ts,
            ys,
            status: IntStatus::Completed,
            n_accepted,
            n_rejected,
        };
    }
    let mut steps = 0;
    loop {
        steps += 1;
        if steps > opts.max_steps {
            return Integration {
                ts,
                ys,
                status: IntStatus::MaxSteps,
                n_accepted,
                n_rejected,
            };
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        // stages
        let mut k = Vec::with_capacity(7);
        k.push(k1.clone());
        for s in 0..6 {
            let mut ysum = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[s][j];
                if a != 0.0 {
                    ysum += kj * (a * h);
                }
            }
            k.push(f(t + C[s] * h, &ysum));
        }
        let mut y5 = y.clone();
        let mut err_vec = DVector::zeros(y.len());
        for (j, kj) in k.iter().enumerate() {
            if B5[j] != 0.0 {
                y5 += kj * (B5[j] * h);
            }
            let db = B5[j] - B4[j];
            if db != 0.0 {
                err_vec += kj * (db * h);
            }
        }
        // scaled error norm
        let mut err = 0.0;
        for i in 0..y.len() {
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
            let e = err_vec[i] / sc;
            err += e * e;
        }
        let err = (err / y.len() as f64).sqrt();
        if err <= 1.0 {
            // accepted
            t += h;
            // FSAL: k7 = f(t + h, y5)
            k1 = k[6].clone();
            y = y5;
            ts.push(t);
            ys.push(y.clone());
            n_accepted += 1;
            if event(t, &y) {
                return Integration {
                    ts,
                    ys,
                    status: IntStatus::StoppedByEvent,
                    n_accepted,
                    n_rejected,
                };
            }
            if ((t - t_end) * dir) >= 0.0 {
                return Integration {
                    ts,
                    ys,
                    status: IntStatus::Completed,
                    n_accepted,
                    n_rejected,
                };
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
            h *= fac;
        } else {
            n_rejected += 1;
            if !err.is_finite() {
                h *= 0.2;
            } else {
                let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                h *= fac;
            }
            if h.abs() < opts.h_min {
                return Integration {
                    ts,
                    ys,
                    status: IntStatus::StepFailure,
                    n_accepted,
                    n_rejected,
                };
            }
        }
        if h.abs() < opts.h_min {
            h = opts.h_min * dir;
        }
    }
}
