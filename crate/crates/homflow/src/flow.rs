//! Homogeneous Ricci flow integration in unnormalized, volume-normalized
//! and projected forms; Einstein metrics by damped Newton; construction of
//! collapsed ancient solutions by unstable-manifold shooting.

use crate::curvature::{ricci_eigenvalues, ricci_jacobian, scalar_curvature, SpaceData};
use crate::error::{Error, Result};
use crate::nr::NormalizerData;
use crate::rk::{dopri5, IntStatus, RkOptions};
use crate::submersion::{
    extended_ricci, functional_f, oneill_norm_sq, s_norm_sq, theta, SubmersionSplit,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const BLOW_UP_RATE: f64 = 1e8;
pub const COLLAPSE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowDirection {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    None,
    Volume,
}

#[derive(Debug, Clone)]
pub struct FlowSpec {
    pub direction: FlowDirection,
    pub normalization: Normalization,
    pub t_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for FlowSpec {
    fn default() -> Self {
        FlowSpec {
            direction: FlowDirection::Backward,
            normalization: Normalization::None,
            t_end: 100.0,
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    SpanEnd,
    BlowUp,
    CollapseFloor,
    StepFailure,
}

/// Per-step diagnostics recorded along a trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagRow {
    pub scal: f64,
    pub tau_scal: f64,
    pub vol: f64,
    /// Functional F and |A|^2 when a torus split is attached.
    pub f: f64,
    pub a2: f64,
    pub s_norms: Vec<f64>,
    pub theta_max: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub diags: Vec<DiagRow>,
    pub termination: Termination,
    /// Number of toral entries in `s_norms` (0 when no split was attached).
    pub s_count: usize,
}

impl Trajectory {
    pub fn last_state(&self) -> &Vec<f64> {
        self.states.last().expect("nonempty trajectory")
    }
}

/// Right-hand side of the flow in x-coordinates.
pub fn flow_rhs(sd: &SpaceData, x: &[f64], direction: FlowDirection, normalization: Normalization) -> Vec<f64> {
    let ric = ricci_eigenvalues(sd, x);
    let sign = match direction {
        FlowDirection::Forward => -1.0,
        FlowDirection::Backward => 1.0,
    };
    match normalization {
        Normalization::None => x
            .iter()
            .zip(ric.iter())
            .map(|(&xi, &ri)| sign * 2.0 * xi * ri)
            .collect(),
        Normalization::Volume => {
            let m = sd.dim_m() as f64;
            let scal = scalar_curvature(sd, x);
            x.iter()
                .zip(ric.iter())
                .map(|(&xi, &ri)| sign * 2.0 * (xi * ri - scal / m * xi))
                .collect()
        }
    }
}

/// Diagnostics context: a torus split for the submersion quantities.
pub struct DiagCtx<'a> {
    pub nd: &'a NormalizerData,
    pub split: &'a SubmersionSplit,
}

fn diagnostics(sd: &SpaceData, ctx: Option<&DiagCtx>, tau: f64, x: &[f64]) -> DiagRow {
    let scal = scalar_curvature(sd, x);
    let mut row = DiagRow {
        scal,
        tau_scal: tau.abs() * scal,
        vol: x
            .iter()
            .zip(sd.st.d.iter())
            .map(|(&xi, &d)| xi.powf(d as f64 / 2.0))
            .product(),
        f: 0.0,
        a2: 0.0,
        s_norms: Vec::new(),
        theta_max: 0.0,
    };
    if let Some(c) = ctx {
        row.a2 = oneill_norm_sq(sd, c.split, x);
        row.f = functional_f(sd, c.split, x);
        for &p in &c.split.toral {
            row.s_norms.push(s_norm_sq(sd, &c.nd, x, p).sqrt());
            for &i in &c.nd.i_lower[p] {
                row.theta_max = row.theta_max.max(theta(c.nd, x, p, i));
            }
        }
    }
    row
}

/// Integrates the flow in log coordinates u = log x (positivity for free).
pub fn integrate(
    sd: &SpaceData,
    x0: &[f64],
    spec: &FlowSpec,
    ctx: Option<&DiagCtx>,
) -> Result<Trajectory> {
    sd.check_metric(x0)?;
    if spec.rel_tol <= 0.0 || spec.abs_tol <= 0.0 {
        return Err(Error::config("tolerances must be positive"));
    }
    let ell = sd.ell();
    let u0 = DVector::from_vec(x0.iter().map(|v| v.ln()).collect());
    let rhs = |_t: f64, u: &DVector<f64>| -> DVector<f64> {
        let x: Vec<f64> = u.iter().map(|v| v.exp()).collect();
        let dx = flow_rhs(sd, &x, spec.direction, spec.normalization);
        DVector::from_vec(dx.iter().zip(x.iter()).map(|(d, xi)| d / xi).collect())
    };
    let floor = COLLAPSE_FLOOR.ln();
    let mut terminated = Termination::SpanEnd;
    let mut stop = |_t: f64, u: &DVector<f64>| -> bool {
        if u.iter().any(|&v| v < floor) {
            terminated = Termination::CollapseFloor;
            return true;
        }
        let du = rhs(0.0, u);
        if du.amax() > BLOW_UP_RATE {
            terminated = Termination::BlowUp;
            return true;
        }
        false
    };
    let opts = RkOptions {
        rel_tol: spec.rel_tol,
        abs_tol: spec.abs_tol,
        max_steps: spec.max_steps,
        ..Default::default()
    };
    let run = dopri5(&rhs, 0.0, spec.t_end, u0, &opts, &mut stop);
    let termination = match run.status {
        IntStatus::Completed => Termination::SpanEnd,
        IntStatus::StoppedByEvent => terminated,
        IntStatus::StepFailure => Termination::StepFailure,
        IntStatus::MaxSteps => Termination::StepFailure,
    };
    let mut times = Vec::with_capacity(run.ts.len());
    let mut states = Vec::with_capacity(run.ts.len());
    let mut diags = Vec::with_capacity(run.ts.len());
    for (t, u) in run.ts.iter().zip(run.ys.iter()) {
        let x: Vec<f64> = u.iter().map(|v| v.exp()).collect();
        diags.push(diagnostics(sd, ctx, *t, &x));
        times.push(*t);
        states.push(x);
    }
    let s_count = ctx.map(|c| c.split.toral.len()).unwrap_or(0);
    let _ = ell;
    Ok(Trajectory {
        times,
        states,
        diags,
        termination,
        s_count,
    })
}

// ---------------------------------------------------------------------------
// Einstein metrics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EinsteinResult {
    pub x: Vec<f64>,
    pub lambda: f64,
    /// max_i |ric_i - lambda|.
    pub residual: f64,
}

/// Damped Newton for Einstein metrics in log coordinates: solves
/// ric_i(x) = ric_0(x) for all i, normalized by sum d_i log x_i = 0.
/// Multistart over log-uniform samples, deduplicated up to scale.
pub fn einstein_solve(sd: &SpaceData, n_starts: usize, seed: u64) -> Vec<EinsteinResult> {
    let ell = sd.ell();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<EinsteinResult> = Vec::new();
    let mut starts = vec![DVector::zeros(ell)];
    for _ in 1..n_starts.max(1) {
        starts.push(DVector::from_vec(
            (0..ell).map(|_| rng.gen::<f64>() * 3.0 - 1.5).collect(),
        ));
    }
    for u0 in starts {
        if let Some(res) = newton_from(sd, u0) {
            let x = normalize_volume(sd, &res.x);
            let duplicate = found.iter().any(|f| {
                f.x.iter()
                    .zip(x.iter())
                    .all(|(a, b)| ((a - b) / a.abs().max(1e-12)).abs() < 1e-6)
            });
            if !duplicate {
                let ric = ricci_eigenvalues(sd, &x);
                let m = sd.dim_m() as f64;
                let lambda = ric
                    .iter()
                    .zip(sd.st.d.iter())
                    .map(|(r, &d)| r * d as f64)
                    .sum::<f64>()
                    / m;
                let residual = ric.iter().map(|r| (r - lambda).abs()).fold(0.0, f64::max);
                found.push(EinsteinResult { x, lambda, residual });
            }
        }
    }
    found.sort_by(|a, b| a.x[0].partial_cmp(&b.x[0]).unwrap());
    found
}

fn normalize_volume(sd: &SpaceData, x: &[f64]) -> Vec<f64> {
    let m: f64 = sd.st.d.iter().map(|&d| d as f64).sum();
    let logv: f64 = x
        .iter()
        .zip(sd.st.d.iter())
        .map(|(xi, &d)| d as f64 * xi.ln())
        .sum();
    let scale = (-logv / m).exp();
    x.iter().map(|xi| xi * scale).collect()
}

fn newton_from(sd: &SpaceData, mut u: DVector<f64>) -> Option<EinsteinResult> {
    let ell = sd.ell();
    let residual = |u: &DVector<f64>| -> (DVector<f64>, Vec<f64>) {
        let x: Vec<f64> = u.iter().map(|v| v.exp()).collect();
        let ric = ricci_eigenvalues(sd, &x);
        let mut r = DVector::zeros(ell);
        for i in 1..ell {
            r[i - 1] = ric[i] - ric[0];
        }
        r[ell - 1] = u
            .iter()
            .zip(sd.st.d.iter())
            .map(|(ui, &d)| d as f64 * ui)
            .sum::<f64>();
        (r, x)
    };
    let mut best = f64::INFINITY;
    for _iter in 0..200 {
        let (r, x) = residual(&u);
        let norm = r.amax();
        if norm < 1e-13 {
            let ric = ricci_eigenvalues(sd, &x);
            let m = sd.dim_m() as f64;
            let lambda = ric
                .iter()
                .zip(sd.st.d.iter())
                .map(|(ri, &d)| ri * d as f64)
                .sum::<f64>()
                / m;
            let max_dev = ric.iter().map(|ri| (ri - lambda).abs()).fold(0.0, f64::max);
            if max_dev < 1e-10 {
                return Some(EinsteinResult {
                    x,
                    lambda,
                    residual: max_dev,
                });
            }
            return None;
        }
        // Jacobian in log coordinates: d ric_i / d u_m = x_m d ric_i / d x_m
        let jac_x = ricci_jacobian(sd, &x);
        let mut jac = DMatrix::zeros(ell, ell);
        for i in 1..ell {
            for m in 0..ell {
                jac[(i - 1, m)] = x[m] * (jac_x[(i, m)] - jac_x[(0, m)]);
            }
        }
        for m in 0..ell {
            jac[(ell - 1, m)] = sd.st.d[m] as f64;
        }
        let delta = jac.lu().solve(&r)?;
        // damped update
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = &u - &delta * step;
            if cand.iter().any(|v| !v.is_finite() || v.abs() > 40.0) {
                step *= 0.5;
                continue;
            }
            let (rc, _) = residual(&cand);
            if rc.amax() < norm {
                u = cand;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return None;
        }
        if norm < best {
            best = norm;
        }
    }
    None
}

// ---------------------------------------------------------------------------
// projected flow and ancient solutions
// ---------------------------------------------------------------------------

/// The projected Ricci system relative to a base Einstein metric: states
/// are (fiber values y, base block values x) and the flow is
/// dh/dt = -2 (Ric(h) - <<Ric(h), h>> / <<h, h>> h)
/// with the Einstein-weighted Euclidean product <<.,.>>.
pub struct ProjectedSystem<'a> {
    pub sd: &'a SpaceData,
    pub nd: &'a NormalizerData,
    pub split: &'a SubmersionSplit,
    /// Unit-volume base Einstein values per base block.
    pub base_einstein: Vec<f64>,
}

impl<'a> ProjectedSystem<'a> {
    pub fn new(
        sd: &'a SpaceData,
        nd: &'a NormalizerData,
        split: &'a SubmersionSplit,
        base_einstein: Vec<f64>,
    ) -> Result<Self> {
        if base_einstein.len() != split.orbits.len() {
            return Err(Error::config("base metric has wrong block count"));
        }
        Ok(ProjectedSystem {
            sd,
            nd,
            split,
            base_einstein,
        })
    }

    pub fn dim(&self) -> usize {
        self.split.s() + self.split.orbits.len()
    }

    /// Weighted product of def:prod: fiber entries carry 1/dim(B), base
    /// entries d_a / (dim(B) x-check_a^2).
    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let s = self.split.s();
        let kf = self.split.k as f64;
        let mut total = 0.0;
        for q in 0..s {
            total += u[q] * v[q] / kf;
        }
        for (a, orbit) in self.split.orbits.iter().enumerate() {
            let da: f64 = orbit.iter().map(|&i| self.sd.st.d[i] as f64).sum();
            let xe = self.base_einstein[a];
            total += da / kf * u[s + a] * v[s + a] / (xe * xe);
        }
        total
    }

    /// Ricci tensor coefficients of the state as a vector.
    pub fn ricci_vec(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        let s = self.split.s();
        let r = self.split.orbits.len();
        let y: Vec<f64> = (0..s).map(|q| z[q]).collect();
        let xb: Vec<f64> = (0..r).map(|a| z[s + a]).collect();
        if xb.iter().any(|&v| v <= 0.0) {
            return Err(Error::config("base part must stay positive"));
        }
        let (rho_t, rho_b) = extended_ricci(self.sd, self.nd, self.split, &y, &xb);
        let mut out = DVector::zeros(s + r);
        for q in 0..s {
            out[q] = rho_t[q];
        }
        for a in 0..r {
            out[s + a] = rho_b[a];
        }
        Ok(out)
    }

    /// RHS of the projected flow in paper-t orientation.
    pub fn rhs(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        let ric = self.ricci_vec(z)?;
        let lambda = self.inner(&ric, z) / self.inner(z, z);
        Ok((ric - z * lambda) * (-2.0))
    }

    /// The degenerate critical state 0 (+) g-check (unit norm by design).
    pub fn critical_state(&self) -> DVector<f64> {
        let s = self.split.s();
        let mut z = DVector::zeros(self.dim());
        for (a, xe) in self.base_einstein.iter().enumerate() {
            z[s + a] = *xe;
        }
        z
    }

    /// Central-difference Jacobian of the projected RHS.
    pub fn jacobian(&self, z: &DVector<f64>) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let mut jac = DMatrix::zeros(n, n);
        let h = 1e-7;
        for m in 0..n {
            let mut zp = z.clone();
            zp[m] += h;
            let mut zm = z.clone();
            zm[m] -= h;
            let fp = self.rhs(&zp)?;
            let fm = self.rhs(&zm)?;
            for i in 0..n {
                jac[(i, m)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        Ok(jac)
    }

    /// Unstable directions at the critical state: real eigenvalues above
    /// the threshold whose eigenvectors can be oriented with positive fiber
    /// components. The projection of the pure-fiber direction onto the
    /// whole unstable subspace is offered as an extra candidate, which
    /// keeps degenerate eigenspaces from hiding the fiber instability.
    /// Returns (eigenvalue, unit vector) pairs sorted by decreasing
    /// eigenvalue, best fiber candidate first among ties.
    pub fn unstable_directions(&self) -> Result<Vec<(f64, DVector<f64>)>> {
        let z0 = self.critical_state();
        let jac = self.jacobian(&z0)?;
        let eigs = jac.complex_eigenvalues();
        let s = self.split.s();
        let n = self.dim();
        let orient = |mut v: DVector<f64>| -> DVector<f64> {
            let fiber_sum: f64 = (0..s).map(|q| v[q]).sum();
            if fiber_sum < 0.0 {
                v = -v;
            }
            v
        };
        let mut lambdas: Vec<f64> = Vec::new();
        for e in eigs.iter() {
            if e.im.abs() > 1e-8 || e.re <= 1e-8 {
                continue;
            }
            if !lambdas.iter().any(|l| (l - e.re).abs() < 1e-7) {
                lambdas.push(e.re);
            }
        }
        let mut out: Vec<(f64, DVector<f64>)> = Vec::new();
        let mut unstable_cols: Vec<DVector<f64>> = Vec::new();
        for &lam in &lambdas {
            let shifted = &jac - DMatrix::<f64>::identity(n, n) * lam;
            let ns = crate::la::null_space(&shifted, 1e-7);
            for j in 0..ns.ncols() {
                let v = orient(ns.column(j).clone_owned());
                unstable_cols.push(v.clone());
                if (0..s).all(|q| v[q] > 1e-10) {
                    out.push((lam, v));
                }
            }
        }
        // projection of the fiber indicator onto the unstable subspace
        if !unstable_cols.is_empty() {
            let mat = DMatrix::from_columns(&unstable_cols);
            let basis = crate::la::gram_schmidt(&mat, 1e-10);
            let mut fiber = DVector::zeros(n);
            for q in 0..s {
                fiber[q] = 1.0;
            }
            let proj = &basis * (basis.transpose() * &fiber);
            if proj.norm() > 1e-8 {
                let v = orient(proj.normalize());
                if (0..s).all(|q| v[q] > 1e-10) {
                    out.push((lambdas.iter().cloned().fold(0.0, f64::max), v));
                }
            }
        }
        // prefer larger eigenvalue, then larger minimal fiber component
        out.sort_by(|a, b| {
            let fa = (0..s).map(|q| a.1[q]).fold(f64::INFINITY, f64::min);
            let fb = (0..s).map(|q| b.1[q]).fold(f64::INFINITY, f64::min);
            b.0.partial_cmp(&a.0).unwrap().then(fb.partial_cmp(&fa).unwrap())
        });
        Ok(out)
    }
}

/// Constructs a collapsed ancient solution: shoots along the unstable
/// direction of the projected flow at 0 (+) g-check, walks down to an
/// interior metric, and integrates the plain backward flow from there.
/// Returns the backward trajectory with diagnostics attached.
pub fn ancient_construct(
    sd: &SpaceData,
    nd: &NormalizerData,
    split: &SubmersionSplit,
    base_einstein: &EinsteinResult,
    eta: f64,
    tau_max: f64,
) -> Result<Trajectory> {
    if !(eta > 0.0 && eta <= 1e-3) {
        return Err(Error::config("eta must lie in (0, 1e-3]"));
    }
    let sys = ProjectedSystem::new(sd, nd, split, base_einstein.x.clone())?;
    let dirs = sys.unstable_directions()?;
    let (_lam, v) = dirs
        .into_iter()
        .max_by(|a, b| {
            let fa = (0..split.s()).map(|q| a.1[q]).fold(f64::INFINITY, f64::min);
            let fb = (0..split.s()).map(|q| b.1[q]).fold(f64::INFINITY, f64::min);
            fa.partial_cmp(&fb).unwrap()
        })
        .ok_or_else(|| {
            Error::numerical(
                "construction hypothesis fails for this (space, torus, base metric): no unstable direction with positive fiber entries",
            )
        })?;
    let z0 = sys.critical_state() + &v * eta;
    // walk the unstable manifold until the fiber is comparable to the base
    let rhs = |_t: f64, z: &DVector<f64>| sys.rhs(z).unwrap_or_else(|_| DVector::zeros(z.len()));
    let s = split.s();
    let mut stop = |_t: f64, z: &DVector<f64>| -> bool {
        let ymin = (0..s).map(|q| z[q]).fold(f64::INFINITY, f64::min);
        let xmin = (s..z.len()).map(|a| z[a]).fold(f64::INFINITY, f64::min);
        !(xmin > 0.0) || ymin >= 0.35 * xmin
    };
    let opts = RkOptions {
        rel_tol: 1e-10,
        abs_tol: 1e-13,
        max_steps: 400_000,
        ..Default::default()
    };
    let run = dopri5(&rhs, 0.0, 1e6, z0, &opts, &mut stop);
    if run.status != IntStatus::StoppedByEvent {
        return Err(Error::numerical(
            "unstable-manifold shot did not reach an interior metric",
        ));
    }
    let zf = run.ys.last().unwrap();
    let y: Vec<f64> = (0..s).map(|q| zf[q]).collect();
    let xb: Vec<f64> = (s..zf.len()).map(|a| zf[a]).collect();
    let x0 = split.assemble(&y, &xb, sd.ell());
    let spec = FlowSpec {
        direction: FlowDirection::Backward,
        normalization: Normalization::None,
        t_end: tau_max,
        rel_tol: 1e-10,
        abs_tol: 1e-12,
        max_steps: 4_000_000,
    };
    let ctx = DiagCtx { nd, split };
    integrate(sd, &x0, &spec, Some(&ctx))
}
