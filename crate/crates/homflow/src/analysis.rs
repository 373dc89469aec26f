//! Post-processing of flow trajectories and pointwise states: finite
//! difference oracles for the first-variation formulas, the main
//! monotonicity estimate for the submersion tensor, collapse detection and
//! the Type-I band of tau*scal.

use crate::curvature::SpaceData;
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::nr::NormalizerData;
use crate::submersion::{
    da2_dtau, df_dtau, functional_f, oneill_norm_sq, s_norm_sq, theta, theta_derivative,
    SubmersionSplit,
};

/// Derivative of a scalar function of the metric along the backward flow,
/// by Richardson-extrapolated central differences in x-space contracted
/// with the flow vector field dx_i/dtau = 2 x_i ric_i.
pub fn fd_flow_derivative<F>(sd: &SpaceData, x: &[f64], h: f64, f: F) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let ric = crate::curvature::ricci_eigenvalues(sd, x);
    let xdot: Vec<f64> = x.iter().zip(ric.iter()).map(|(xi, ri)| 2.0 * xi * ri).collect();
    let dir_diff = |step: f64| -> f64 {
        let xp: Vec<f64> = x.iter().zip(xdot.iter()).map(|(xi, d)| xi + step * d).collect();
        let xm: Vec<f64> = x.iter().zip(xdot.iter()).map(|(xi, d)| xi - step * d).collect();
        (f(&xp) - f(&xm)) / (2.0 * step)
    };
    let d1 = dir_diff(h);
    let d2 = dir_diff(h / 2.0);
    (4.0 * d2 - d1) / 3.0
}

/// One row of the derivative-oracle comparison.
#[derive(Debug, Clone)]
pub struct DerivativeCheck {
    pub analytic: f64,
    pub finite_difference: f64,
    pub rel_err: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

pub fn check_df(sd: &SpaceData, split: &SubmersionSplit, x: &[f64], h: f64) -> Result<DerivativeCheck> {
    let analytic = df_dtau(sd, split, x)?;
    let fd = fd_flow_derivative(sd, x, h, |xx| functional_f(sd, split, xx));
    Ok(DerivativeCheck {
        analytic,
        finite_difference: fd,
        rel_err: rel(analytic, fd),
    })
}

pub fn check_da2(sd: &SpaceData, split: &SubmersionSplit, x: &[f64], h: f64) -> Result<DerivativeCheck> {
    let analytic = da2_dtau(sd, split, x)?;
    let fd = fd_flow_derivative(sd, x, h, |xx| oneill_norm_sq(sd, split, xx));
    Ok(DerivativeCheck {
        analytic,
        finite_difference: fd,
        rel_err: rel(analytic, fd),
    })
}

pub fn check_dtheta(
    sd: &SpaceData,
    nd: &NormalizerData,
    x: &[f64],
    q: usize,
    j: usize,
    h: f64,
) -> DerivativeCheck {
    let analytic = theta_derivative(sd, nd, x, q, j);
    let fd = fd_flow_derivative(sd, x, h, |xx| theta(nd, xx, q, j));
    DerivativeCheck {
        analytic,
        finite_difference: fd,
        rel_err: rel(analytic, fd),
    }
}

/// Monotonicity scan of a per-step quantity along a trajectory: the first
/// index after which the quantity is non-increasing for the remainder of
/// the span, and the largest late-time violation.
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub quantity: String,
    pub values: Vec<f64>,
    pub settle_index: Option<usize>,
    pub max_violation_after_settle: f64,
}

pub fn monotone_nonincreasing_report(quantity: &str, values: &[f64], tol: f64) -> MonotonicityReport {
    let n = values.len();
    let mut settle = None;
    'outer: for start in 0..n.saturating_sub(1) {
        for w in values[start..].windows(2) {
            if w[1] > w[0] + tol {
                continue 'outer;
            }
        }
        settle = Some(start);
        break;
    }
    let max_violation = match settle {
        Some(s) => values[s..]
            .windows(2)
            .map(|w| (w[1] - w[0]).max(0.0))
            .fold(0.0, f64::max),
        None => values
            .windows(2)
            .map(|w| (w[1] - w[0]).max(0.0))
            .fold(0.0, f64::max),
    };
    MonotonicityReport {
        quantity: quantity.to_string(),
        values: values.to_vec(),
        settle_index: settle,
        max_violation_after_settle: max_violation,
    }
}

/// One sample row of the main monotonicity estimate
/// d theta_{p,iota}/dtau >= delta(m,p) |S_p|^2 / x_p.
#[derive(Debug, Clone)]
pub struct EstimateRow {
    pub p: usize,
    pub iota: usize,
    pub preconditions_hold: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// delta(m, p) = 1 / (m^2 alpha_p^3).
pub fn delta_mp(sd: &SpaceData, nd: &NormalizerData, p: usize) -> f64 {
    let m = sd.dim_m() as f64;
    1.0 / (m * m * nd.alpha[p].powi(3))
}

/// Preconditions of the estimate: all phi-related ratios within
/// (0.9, 1.1) and x_q < 3 alpha_q xmin / b_total for every toral q.
pub fn estimate_preconditions(
    sd: &SpaceData,
    nd: &NormalizerData,
    split: &SubmersionSplit,
    x: &[f64],
) -> bool {
    let xmin = split
        .nontoral
        .iter()
        .map(|&j| x[j])
        .fold(f64::INFINITY, f64::min);
    for &q in &split.toral {
        for &j in &nd.i_lower[q] {
            let r = x[nd.phi[q][j]] / x[j];
            if !(0.9 < r && r < 1.1 && 0.9 < 1.0 / r && 1.0 / r < 1.1) {
                return false;
            }
        }
        if !(x[q] < 3.0 * nd.alpha[q] * xmin / sd.st.b_total) {
            return false;
        }
    }
    true
}

pub fn main_estimate_check(
    sd: &SpaceData,
    nd: &NormalizerData,
    split: &SubmersionSplit,
    x: &[f64],
    p: usize,
) -> Result<EstimateRow> {
    if !split.is_toral(p) {
        return Err(Error::config("p must be a toral index of the split"));
    }
    if nd.i_lower[p].is_empty() {
        return Ok(EstimateRow {
            p,
            iota: p,
            preconditions_hold: estimate_preconditions(sd, nd, split, x),
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
        });
    }
    let iota = *nd.i_lower[p]
        .iter()
        .max_by(|&&a, &&b| {
            theta(nd, x, p, a)
                .partial_cmp(&theta(nd, x, p, b))
                .unwrap()
        })
        .unwrap();
    let lhs = theta_derivative(sd, nd, x, p, iota);
    let rhs = delta_mp(sd, nd, p) * s_norm_sq(sd, nd, x, p) / x[p];
    Ok(EstimateRow {
        p,
        iota,
        preconditions_hold: estimate_preconditions(sd, nd, split, x),
        lhs,
        rhs,
        margin: lhs - rhs,
    })
}

/// Thresholds of the collapse detector; asymptotic statements are replaced
/// by finite-time surrogates over the last decade of the span.
#[derive(Debug, Clone)]
pub struct CollapseThresholds {
    /// x_i / tau below this over the last decade marks a collapsing index.
    pub eps_c: f64,
    /// Ratio gate for the phi-invariance proxy at the end of the span.
    pub ratio_gate: (f64, f64),
}

impl Default for CollapseThresholds {
    fn default() -> Self {
        CollapseThresholds {
            eps_c: 1e-3,
            ratio_gate: (0.99, 1.01),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexClass {
    Collapsing,
    BoundedRatio,
    Indeterminate,
}

#[derive(Debug, Clone)]
pub struct CollapseReport {
    pub classes: Vec<IndexClass>,
    pub collapsing: Vec<usize>,
    /// min and max of x_i / tau over the last decade, per index.
    pub ratio_bounds: Vec<(f64, f64)>,
    /// The detected span is an abelian subalgebra of m_0.
    pub abelian_span: bool,
    /// phi-ratio proxy holds at the end of the span for each detected p.
    pub phi_ratio_ok: bool,
    pub thresholds: CollapseThresholds,
}

pub fn collapsing_detect(
    sd: &SpaceData,
    nd: &NormalizerData,
    traj: &Trajectory,
    thresholds: &CollapseThresholds,
) -> Result<CollapseReport> {
    let tau_max = *traj
        .times
        .last()
        .ok_or_else(|| Error::config("empty trajectory"))?;
    if tau_max <= 0.0 {
        return Err(Error::config("collapse detection needs a backward span"));
    }
    let window_start = tau_max / 10.0;
    let ell = sd.ell();
    let mut ratio_bounds = vec![(f64::INFINITY, 0.0f64); ell];
    for (t, x) in traj.times.iter().zip(traj.states.iter()) {
        if *t < window_start {
            continue;
        }
        for i in 0..ell {
            let r = x[i] / t;
            ratio_bounds[i].0 = ratio_bounds[i].0.min(r);
            ratio_bounds[i].1 = ratio_bounds[i].1.max(r);
        }
    }
    let mut classes = Vec::with_capacity(ell);
    let mut collapsing = Vec::new();
    for i in 0..ell {
        let (lo, hi) = ratio_bounds[i];
        if hi < thresholds.eps_c {
            classes.push(IndexClass::Collapsing);
            collapsing.push(i);
        } else if lo > thresholds.eps_c {
            classes.push(IndexClass::BoundedRatio);
        } else {
            classes.push(IndexClass::Indeterminate);
        }
    }
    if classes.iter().any(|c| *c == IndexClass::Indeterminate) {
        return Err(Error::numerical("indeterminate, extend tau_max"));
    }
    // abelian span inside m_0
    let mut abelian = collapsing.iter().all(|&i| i < sd.dec.trivial_count);
    if abelian {
        for (ai, &i) in collapsing.iter().enumerate() {
            for &j in collapsing.iter().skip(ai + 1) {
                if !nd.commuting[i][j] {
                    abelian = false;
                }
            }
        }
    }
    // phi-ratio proxy at the final state
    let xf = traj.last_state();
    let mut phi_ok = true;
    for &p in &collapsing {
        for &i in &nd.i_lower[p] {
            let r = xf[nd.phi[p][i]] / xf[i];
            if !(thresholds.ratio_gate.0 < r && r < thresholds.ratio_gate.1) {
                phi_ok = false;
            }
        }
    }
    Ok(CollapseReport {
        classes,
        collapsing,
        ratio_bounds,
        abelian_span: abelian,
        phi_ratio_ok: phi_ok,
        thresholds: thresholds.clone(),
    })
}

/// Empirical Type-I band: (inf, sup) of tau*scal over the final 80% of the
/// span. Fails hard when scal is not positive throughout.
pub fn type_one_check(traj: &Trajectory) -> Result<(f64, f64)> {
    let tau_max = *traj
        .times
        .last()
        .ok_or_else(|| Error::config("empty trajectory"))?;
    let start = 0.2 * tau_max;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (t, d) in traj.times.iter().zip(traj.diags.iter()) {
        if d.scal <= 0.0 {
            return Err(Error::numerical(
                "scal <= 0 along the trajectory, not an ancient regime",
            ));
        }
        if *t >= start && *t > 0.0 {
            lo = lo.min(d.tau_scal);
            hi = hi.max(d.tau_scal);
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{einstein_solve, integrate, FlowDirection, FlowSpec, Normalization};
    use crate::presets::build_preset;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(name: &str, toral: &[usize]) -> (SpaceData, NormalizerData, SubmersionSplit) {
        let p = build_preset(name).unwrap();
        let sd = SpaceData::new(p.space, p.dec).unwrap();
        let nd = NormalizerData::compute(&sd.space, &sd.dec, &sd.st).unwrap();
        let split = SubmersionSplit::new(&sd, &nd, toral).unwrap();
        (sd, nd, split)
    }

    fn random_submersion_state(
        split: &SubmersionSplit,
        ell: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<f64> {
        let y: Vec<f64> = (0..split.s()).map(|_| 0.2 + rng.gen::<f64>()).collect();
        let xb: Vec<f64> = (0..split.orbits.len()).map(|_| 0.5 + rng.gen::<f64>()).collect();
        split.assemble(&y, &xb, ell)
    }

    #[test]
    fn df_matches_fd() {
        let (sd, _, split) = setup("aloff-wallach-11", &[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let x = random_submersion_state(&split, sd.ell(), &mut rng);
            let c = check_df(&sd, &split, &x, 1e-4).unwrap();
            assert!(c.rel_err < 1e-6, "{:?}", c);
        }
    }

    #[test]
    fn da2_matches_fd() {
        let (sd, _, split) = setup("aloff-wallach-11", &[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..10 {
            let x = random_submersion_state(&split, sd.ell(), &mut rng);
            let c = check_da2(&sd, &split, &x, 1e-4).unwrap();
            assert!(c.rel_err < 1e-6, "{:?}", c);
        }
    }

    #[test]
    fn dtheta_matches_fd_and_zero_at_equal() {
        let (sd, nd, _) = setup("aloff-wallach-11", &[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let x: Vec<f64> = (0..sd.ell()).map(|_| 0.5 + rng.gen::<f64>()).collect();
            let c = check_dtheta(&sd, &nd, &x, 0, 1, 1e-4);
            assert!(c.rel_err < 1e-6, "{:?}", c);
        }
        let xeq = vec![0.4, 1.2, 1.2, 0.9, 1.1];
        assert_eq!(theta_derivative(&sd, &nd, &xeq, 0, 1), 0.0);
    }

    #[test]
    fn estimate_holds_in_regime() {
        let (sd, nd, split) = setup("aloff-wallach-11", &[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let mut checked = 0;
        for _ in 0..2000 {
            // sample the near-invariant regime with tiny fibers
            let base = 0.5 + rng.gen::<f64>();
            let ratio = 1.0 + (rng.gen::<f64>() * 2.0 - 1.0) * 0.009;
            let mut x = vec![0.0; sd.ell()];
            x[1] = base;
            x[2] = base * ratio;
            x[3] = 0.5 + rng.gen::<f64>();
            x[4] = 0.5 + rng.gen::<f64>();
            let xmin = x[1..].iter().cloned().fold(f64::INFINITY, f64::min);
            x[0] = xmin * 1e-3 * rng.gen::<f64>().max(1e-3);
            let row = main_estimate_check(&sd, &nd, &split, &x, 0).unwrap();
            if row.preconditions_hold {
                checked += 1;
                assert!(row.margin >= -1e-12, "{:?}", row);
            }
        }
        assert!(checked > 1500, "only {checked} states hit the regime");
    }

    #[test]
    fn einstein_backward_trajectory_not_collapsed() {
        let (sd, nd, _) = setup("flag-su3", &[]);
        let sols = einstein_solve(&sd, 32, 3);
        let spec = FlowSpec {
            direction: FlowDirection::Backward,
            normalization: Normalization::None,
            t_end: 2e3,
            ..Default::default()
        };
        let traj = integrate(&sd, &sols[0].x, &spec, None).unwrap();
        let rep = collapsing_detect(&sd, &nd, &traj, &CollapseThresholds::default()).unwrap();
        assert!(rep.collapsing.is_empty());
        let (lo, hi) = type_one_check(&traj).unwrap();
        assert!(hi / lo < 1e3);
    }

    #[test]
    fn monotone_report_finds_settle_point() {
        let vals = vec![1.0, 1.5, 1.2, 1.1, 1.0, 0.9];
        let rep = monotone_nonincreasing_report("f", &vals, 1e-12);
        assert_eq!(rep.settle_index, Some(1));
    }
}
