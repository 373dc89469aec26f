//! Riemannian-submersion quantities for a chosen torus inside the trivial
//! submodule: the O'Neill tensor and its contractions, base curvature, the
//! scale-invariant functional F and its first variation, the submersion
//! tensor norms |S_p| and theta coefficients, and the closed-form Ricci
//! difference across phi_p-related modules.

use crate::curvature::{ricci_eigenvalues, scalar_curvature, SpaceData};
use crate::decomp::SNAP_TOL;
use crate::error::{Error, Result};
use crate::nr::{induced_base_decomposition, NormalizerData};
use nalgebra::DMatrix;

/// A torus choice together with the induced base space G/(HT).
#[derive(Debug, Clone)]
pub struct SubmersionSplit {
    /// Toral module indices (sorted, subset of the trivial modules).
    pub toral: Vec<usize>,
    /// The complementary module indices in order.
    pub nontoral: Vec<usize>,
    /// Base space data over the grouped decomposition.
    pub base: SpaceData,
    /// orbits[a] = total-space module indices grouped into base block a.
    pub orbits: Vec<Vec<usize>>,
    /// dim B.
    pub k: usize,
}

impl SubmersionSplit {
    pub fn new(sd: &SpaceData, nd: &NormalizerData, toral: &[usize]) -> Result<Self> {
        let induced = induced_base_decomposition(&sd.space, &sd.dec, nd, toral)?;
        let k = induced.space.dim_m();
        let base = SpaceData::new(induced.space, induced.dec)?;
        let nontoral = (0..sd.ell())
            .filter(|i| !induced.toral.contains(i))
            .collect();
        Ok(SubmersionSplit {
            toral: induced.toral,
            nontoral,
            base,
            orbits: induced.orbits,
            k,
        })
    }

    pub fn s(&self) -> usize {
        self.toral.len()
    }

    pub fn is_toral(&self, i: usize) -> bool {
        self.toral.binary_search(&i).is_ok()
    }

    /// Base metric values per block for a submersion-type x (constant on
    /// each orbit); errors when x is not of submersion type.
    pub fn base_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.orbits.len());
        for orbit in &self.orbits {
            let v = x[orbit[0]];
            for &i in orbit {
                if ((x[i] - v) / v.abs().max(1.0)).abs() > 1e-9 {
                    return Err(Error::config(
                        "metric is not of submersion type for this split",
                    ));
                }
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Full diagonal metric from fiber values y (per toral index) and base
    /// block values xb.
    pub fn assemble(&self, y: &[f64], xb: &[f64], ell: usize) -> Vec<f64> {
        let mut x = vec![0.0; ell];
        for (p, &i) in self.toral.iter().enumerate() {
            x[i] = y[p];
        }
        for (a, orbit) in self.orbits.iter().enumerate() {
            for &i in orbit {
                x[i] = xb[a];
            }
        }
        x
    }
}

/// Base volume: product of base eigenvalues to the half-dimension power
/// (the volume of (B, g_b) up to a space-wide constant).
pub fn vol_b(sd: &SpaceData, split: &SubmersionSplit, x: &[f64]) -> f64 {
    split
        .nontoral
        .iter()
        .map(|&i| x[i].powf(sd.st.d[i] as f64 / 2.0))
        .product()
}

/// |A|_g^2 = (1/4) sum_{k toral} sum_{i,j nontoral} [ijk] x_k/(x_i x_j).
pub fn oneill_norm_sq(sd: &SpaceData, split: &SubmersionSplit, x: &[f64]) -> f64 {
    let st = &sd.st;
    let mut total = 0.0;
    for &k in &split.toral {
        for &i in &split.nontoral {
            for &j in &split.nontoral {
                let t = st.t(i, j, k);
                if t != 0.0 {
                    total += t * x[k] / (x[i] * x[j]);
                }
            }
        }
    }
    total / 4.0
}

/// The A-contractions of a submersion metric, over g-orthonormal frames.
#[derive(Debug, Clone)]
pub struct OneillTensors {
    /// |A|^2 summed directly from the tensor.
    pub a2: f64,
    /// A-hat on the toral frame (s x s).
    pub a_hat: DMatrix<f64>,
    /// A-check on the base frame (k x k).
    pub a_check: DMatrix<f64>,
    pub a_hat_norm: f64,
    pub a_check_norm: f64,
}

pub fn oneill_tensors(sd: &SpaceData, split: &SubmersionSplit, x: &[f64]) -> OneillTensors {
    let dec = &sd.dec;
    let t_cols: Vec<usize> = split.toral.iter().map(|&p| dec.ranges[p].0).collect();
    let b_cols: Vec<usize> = split
        .nontoral
        .iter()
        .flat_map(|&i| (dec.ranges[i].0..dec.ranges[i].1).collect::<Vec<_>>())
        .collect();
    let xc = |c: usize| x[dec.module_of_column(c)];
    let s = t_cols.len();
    let kb = b_cols.len();
    // A^r_{ab} = g(A_{f_a} f_b, u_r) = sqrt(x_r) br_ab[t_r] / (2 sqrt(x_a x_b))
    let mut a = vec![0.0; kb * kb * s];
    for (ai, &ca) in b_cols.iter().enumerate() {
        for (bi, &cb) in b_cols.iter().enumerate() {
            let br = sd.bracket_entry(ca, cb);
            for (ri, &cr) in t_cols.iter().enumerate() {
                a[ai + kb * bi + kb * kb * ri] =
                    (xc(cr)).sqrt() * br[cr] / (2.0 * (xc(ca) * xc(cb)).sqrt());
            }
        }
    }
    let at = |p: usize, q: usize, r: usize| a[p + kb * q + kb * kb * r];
    let mut a2 = 0.0;
    for p in 0..kb {
        for q in 0..kb {
            for r in 0..s {
                a2 += at(p, q, r) * at(p, q, r);
            }
        }
    }
    let mut a_hat = DMatrix::zeros(s, s);
    for i in 0..s {
        for j in 0..s {
            let mut v = 0.0;
            for p in 0..kb {
                for q in 0..kb {
                    v += at(p, q, i) * at(p, q, j);
                }
            }
            a_hat[(i, j)] = v;
        }
    }
    let mut a_check = DMatrix::zeros(kb, kb);
    for p in 0..kb {
        for q in 0..kb {
            let mut v = 0.0;
            for l in 0..kb {
                for r in 0..s {
                    v += at(p, l, r) * at(q, l, r);
                }
            }
            a_check[(p, q)] = v;
        }
    }
    let a_hat_norm = a_hat.iter().map(|v| v * v).sum::<f64>().sqrt();
    let a_check_norm = a_check.iter().map(|v| v * v).sum::<f64>().sqrt();
    OneillTensors {
        a2,
        a_hat,
        a_check,
        a_hat_norm,
        a_check_norm,
    }
}

/// Quantities of the base metric needed by the first-variation formulas.
#[derive(Debug, Clone)]
pub struct BaseCurvature {
    pub xb: Vec<f64>,
    pub ric: Vec<f64>,
    pub scal: f64,
    pub ric_norm_sq: f64,
}

pub fn base_curvature(split: &SubmersionSplit, x: &[f64]) -> Result<BaseCurvature> {
    let xb = split.base_values(x)?;
    let ric = ricci_eigenvalues(&split.base, &xb);
    let scal = scalar_curvature(&split.base, &xb);
    let ric_norm_sq = ric
        .iter()
        .zip(split.base.st.d.iter())
        .map(|(r, &d)| d as f64 * r * r)
        .sum();
    Ok(BaseCurvature {
        xb,
        ric,
        scal,
        ric_norm_sq,
    })
}

/// F(g) = (scal(g) + 2 |A|_g^2) vol_B(g_b)^{2/k}; scale invariant.
pub fn functional_f(sd: &SpaceData, split: &SubmersionSplit, x: &[f64]) -> f64 {
    let scal = scalar_curvature(sd, x);
    let a2 = oneill_norm_sq(sd, split, x);
    let vol = vol_b(sd, split, x);
    (scal + 2.0 * a2) * vol.powf(2.0 / split.k as f64)
}

/// Closed-form first variation of F along the backward flow:
/// dF/dtau = -2 vol_B^{2/k} ( |Ric_B|^2 - scal_B^2/k + scal_B |A|^2 / k
///            - |A-hat|^2 - 4 |A-check|^2 + 2 |A|^4 / k ).
pub fn df_dtau(sd: &SpaceData, split: &SubmersionSplit, x: &[f64]) -> Result<f64> {
    let bc = base_curvature(split, x)?;
    let t = oneill_tensors(sd, split, x);
    let a2 = t.a2;
    let kf = split.k as f64;
    let vol = vol_b(sd, split, x);
    let inner = bc.ric_norm_sq - bc.scal * bc.scal / kf + bc.scal * a2 / kf
        - t.a_hat_norm * t.a_hat_norm
        - 4.0 * t.a_check_norm * t.a_check_norm
        + 2.0 * a2 * a2 / kf;
    Ok(-2.0 * vol.powf(2.0 / kf) * inner)
}

/// Closed-form first variation of |A|^2 along the backward flow:
/// d|A|^2/dtau = 2 |A-hat|^2 + 8 |A-check|^2 - 4 <Ric_B, A-check>.
pub fn da2_dtau(sd: &SpaceData, split: &SubmersionSplit, x: &[f64]) -> Result<f64> {
    let bc = base_curvature(split, x)?;
    let t = oneill_tensors(sd, split, x);
    // <Ric_B, A-check>: Ric_B is scalar per base block; the columns of the
    // A-check frame run over the non-toral modules in module order
    let mut block_of = vec![usize::MAX; sd.ell()];
    for (a, orbit) in split.orbits.iter().enumerate() {
        for &i in orbit {
            block_of[i] = a;
        }
    }
    let mut ric_dot = 0.0;
    let mut col = 0;
    for &i in &split.nontoral {
        for _ in 0..sd.st.d[i] {
            ric_dot += bc.ric[block_of[i]] * t.a_check[(col, col)];
            col += 1;
        }
    }
    Ok(2.0 * t.a_hat_norm * t.a_hat_norm + 8.0 * t.a_check_norm * t.a_check_norm - 4.0 * ric_dot)
}

/// theta_{p,i} = (x_phi/x_i + x_i/x_phi)/4 - 1/2 for i in I_p.
pub fn theta(nd: &NormalizerData, x: &[f64], p: usize, i: usize) -> f64 {
    let fi = nd.phi[p][i];
    0.25 * (x[fi] / x[i] + x[i] / x[fi]) - 0.5
}

/// epsilon_{p,i} = |x_phi/x_i - 1|.
pub fn epsilon(nd: &NormalizerData, x: &[f64], p: usize, i: usize) -> f64 {
    (x[nd.phi[p][i]] / x[i] - 1.0).abs()
}

/// |S_p|_g^2 = sum_{i in I_p} [p i phi_p(i)] theta_{p,i}; scale invariant.
pub fn s_norm_sq(sd: &SpaceData, nd: &NormalizerData, x: &[f64], p: usize) -> f64 {
    nd.i_lower[p]
        .iter()
        .map(|&i| sd.st.t(p, i, nd.phi[p][i]) * theta(nd, x, p, i))
        .sum()
}

/// d theta_{q,j} / d tau along the backward flow:
/// (1/2)(x_phi/x_j - x_j/x_phi)(ric_phi - ric_j).
pub fn theta_derivative(sd: &SpaceData, nd: &NormalizerData, x: &[f64], q: usize, j: usize) -> f64 {
    let fj = nd.phi[q][j];
    let ric = ricci_eigenvalues(sd, x);
    0.5 * (x[fj] / x[j] - x[j] / x[fj]) * (ric[fj] - ric[j])
}

/// Closed-form Ricci difference ric_{phi_p(i)} - ric_i for an
/// NR-decomposition, i in I_p, relative to the torus of `split`.
pub fn ricci_difference(
    sd: &SpaceData,
    nd: &NormalizerData,
    split: &SubmersionSplit,
    x: &[f64],
    p: usize,
    i: usize,
) -> f64 {
    let st = &sd.st;
    let phi_p = &nd.phi[p];
    let fi = phi_p[i];
    let di = st.d[i] as f64;
    let mu_pi2 = nd.mu[p][i] * nd.mu[p][i];
    let b_i = st.b[i];

    let mut total = mu_pi2 * (x[fi] - x[i]) / (x[p] * x[i] * x[fi])
        * (x[fi] + x[i] - b_i / (2.0 * mu_pi2) * x[p]);

    for &q in &split.toral {
        if q == p {
            continue;
        }
        let mu_qi2 = nd.mu[q][i] * nd.mu[q][i];
        if mu_qi2 == 0.0 {
            continue;
        }
        let fqi = nd.phi[q][i];
        let fqfi = nd.phi[q][fi];
        total += 0.5
            * mu_qi2
            * (x[q] / (x[i] * x[fqi]) - x[q] / (x[fi] * x[fqfi]));
        total += 0.5 * mu_qi2 / x[q]
            * (x[fqi] / x[i] - x[fqfi] / x[fi] + x[fi] / x[fqfi] - x[i] / x[fqi]);
    }

    let in_plus = |j: usize| nd.mu[p][j] > 0.0;
    for &j in &split.nontoral {
        for &k in &split.nontoral {
            let t = st.t(i, j, k);
            if t == 0.0 {
                continue;
            }
            match (in_plus(j), in_plus(k)) {
                (false, false) => {
                    total -= t / (2.0 * di) * (x[k] / (x[fi] * x[j]) - x[k] / (x[i] * x[j]));
                    total += t / (4.0 * di) * ((x[fi] - x[i]) / (x[j] * x[k]));
                }
                (false, true) => {
                    let fk = phi_p[k];
                    total -= t / (2.0 * di) * (x[fk] / (x[fi] * x[j]) - x[k] / (x[i] * x[j]));
                    total += t / (4.0 * di) * (x[fi] / (x[j] * x[fk]) - x[i] / (x[j] * x[k]));
                }
                (true, _) => {
                    let fj = phi_p[j];
                    total -= t / (2.0 * di) * (x[k] / (x[fi] * x[fj]) - x[k] / (x[i] * x[j]));
                    total += t / (4.0 * di) * (x[fi] / (x[fj] * x[k]) - x[i] / (x[j] * x[k]));
                }
            }
        }
    }
    total
}

/// The extended Ricci coefficients of a submersion-type state with fiber
/// values y (any sign) and positive base values xb: the Ricci tensor is
/// rho_p Q on the p-th fiber line and rho_a Q on base block a. Rational in
/// y with the fiber singularities cancelled by the block grouping; agrees
/// with the plain formulas for y > 0.
pub fn extended_ricci(
    sd: &SpaceData,
    nd: &NormalizerData,
    split: &SubmersionSplit,
    y: &[f64],
    xb: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let st = &sd.st;
    // block value lookup for non-toral modules
    let mut block_of = vec![usize::MAX; sd.ell()];
    for (a, orbit) in split.orbits.iter().enumerate() {
        for &i in orbit {
            block_of[i] = a;
        }
    }
    let xv = |i: usize| xb[block_of[i]];
    // fiber coefficients: rho_p = (y_p^2 / 4) sum_{j,k nontoral} [pjk]/(x_j x_k)
    let mut rho_t = Vec::with_capacity(split.toral.len());
    for (pi, &p) in split.toral.iter().enumerate() {
        let mut sum = 0.0;
        for &j in &split.nontoral {
            for &k in &split.nontoral {
                let t = st.t(p, j, k);
                if t != 0.0 {
                    sum += t / (xv(j) * xv(k));
                }
            }
        }
        rho_t.push(y[pi] * y[pi] / 4.0 * sum);
    }
    // base coefficients: rho_a = xb_a * ric_i for any representative i
    let mut rho_b = Vec::with_capacity(split.orbits.len());
    for (a, orbit) in split.orbits.iter().enumerate() {
        let i = orbit[0];
        let di = st.d[i] as f64;
        let xi = xb[a];
        let mut mid = 0.0;
        let mut last = 0.0;
        for &j in &split.nontoral {
            for &k in &split.nontoral {
                let t = st.t(i, j, k);
                if t != 0.0 {
                    mid += t * xv(k) / (xi * xv(j));
                    last += t * xi / (xv(j) * xv(k));
                }
            }
        }
        let mut ric = st.b[i] / (2.0 * xi) - mid / (2.0 * di) + last / (4.0 * di);
        for (qi, &q) in split.toral.iter().enumerate() {
            let mu2 = nd.mu[q][i] * nd.mu[q][i];
            if mu2 != 0.0 {
                ric -= mu2 * y[qi] / (2.0 * xi * xi);
            }
        }
        rho_b.push(xi * ric);
    }
    (rho_t, rho_b)
}

/// Extended scalar curvature of a submersion-type state:
/// scal = scal_B(xb) - |A|^2(y, xb), analytic in y.
pub fn extended_scal(sd: &SpaceData, split: &SubmersionSplit, y: &[f64], xb: &[f64]) -> f64 {
    let scal_b = scalar_curvature(&split.base, xb);
    let mut block_of = vec![usize::MAX; sd.ell()];
    for (a, orbit) in split.orbits.iter().enumerate() {
        for &i in orbit {
            block_of[i] = a;
        }
    }
    let mut a2 = 0.0;
    for (pi, &p) in split.toral.iter().enumerate() {
        for &i in &split.nontoral {
            for &j in &split.nontoral {
                let t = sd.st.t(i, j, p);
                if t != 0.0 {
                    a2 += t * y[pi] / (xb[block_of[i]] * xb[block_of[j]]);
                }
            }
        }
    }
    scal_b - a2 / 4.0
}

/// Sanity gate used by tests: theta = (x_i / x_phi) eps^2 / 4 exactly.
pub fn theta_epsilon_residual(nd: &NormalizerData, x: &[f64], p: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for &i in &nd.i_lower[p] {
        let th = theta(nd, x, p, i);
        let ep = epsilon(nd, x, p, i);
        let alt = 0.25 * (x[i] / x[nd.phi[p][i]]) * ep * ep;
        worst = worst.max((th - alt).abs());
    }
    worst
}

/// Verdict row for the Prop 4.1 sandwich: C^{-1}|A|^2 <= |A-hat|, |A-check|
/// <= C |A|^2 with C = dim m.
pub fn sandwich_holds(sd: &SpaceData, t: &OneillTensors) -> bool {
    let m = sd.dim_m() as f64;
    let a2 = t.a2;
    if a2 < SNAP_TOL {
        return t.a_hat_norm < 1e-8 && t.a_check_norm < 1e-8;
    }
    t.a_hat_norm >= a2 / m
        && t.a_hat_norm <= m * a2
        && t.a_check_norm >= a2 / m
        && t.a_check_norm <= m * a2
}
