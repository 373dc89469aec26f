//! Curvature of diagonal invariant metrics, evaluated from the structure
//! tensor: Ricci eigenvalues, off-diagonal Ricci blocks, scalar curvature
//! and sectional block sums. A slow basis-level Ricci evaluator lives in
//! `oracle` for cross-checking.

use crate::decomp::Decomposition;
use crate::error::{Error, Result};
use crate::space::HomogeneousSpace;
use crate::structure::StructureTensor;
use nalgebra::{DMatrix, DVector};

/// A homogeneous space with a fixed decomposition and its structure tensor;
/// the unit of account for every curvature and flow computation.
#[derive(Debug, Clone)]
pub struct SpaceData {
    pub space: HomogeneousSpace,
    pub dec: Decomposition,
    pub st: StructureTensor,
    /// Adapted-basis bracket projections: bracket[a][b] holds the
    /// m-components of [e_a, e_b] along the adapted basis.
    bracket: Vec<Vec<DVector<f64>>>,
}

impl SpaceData {
    pub fn new(space: HomogeneousSpace, dec: Decomposition) -> Result<Self> {
        let st = StructureTensor::compute(&space, &dec)?;
        let m = space.dim_m();
        let cols: Vec<DVector<f64>> = (0..m).map(|j| dec.basis.column(j).clone_owned()).collect();
        let mut bracket = Vec::with_capacity(m);
        for a in 0..m {
            let ad_a = space.algebra.ad_of(&cols[a]);
            let mut row = Vec::with_capacity(m);
            for col_b in cols.iter() {
                let br = &ad_a * col_b;
                let mut proj = DVector::zeros(m);
                for (g, col) in cols.iter().enumerate() {
                    proj[g] = br.dot(col);
                }
                row.push(proj);
            }
            bracket.push(row);
        }
        Ok(SpaceData {
            space,
            dec,
            st,
            bracket,
        })
    }

    pub fn ell(&self) -> usize {
        self.st.ell
    }

    pub fn dim_m(&self) -> usize {
        self.space.dim_m()
    }

    pub fn bracket_entry(&self, a: usize, b: usize) -> &DVector<f64> {
        &self.bracket[a][b]
    }

    pub fn check_metric(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.ell() {
            return Err(Error::config(format!(
                "metric has {} entries, decomposition has {} modules",
                x.len(),
                self.ell()
            )));
        }
        if x.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::config("metric eigenvalues must be positive"));
        }
        Ok(())
    }
}

/// Ricci eigenvalues of the diagonal metric x:
/// ric_i = b_i/(2 x_i) - 1/(2 d_i) sum [ijk] x_k/(x_i x_j)
///       + 1/(4 d_i) sum [ijk] x_i/(x_j x_k).
pub fn ricci_eigenvalues(sd: &SpaceData, x: &[f64]) -> Vec<f64> {
    let st = &sd.st;
    let ell = st.ell;
    let mut out = Vec::with_capacity(ell);
    for i in 0..ell {
        let di = st.d[i] as f64;
        let mut mid = 0.0;
        let mut last = 0.0;
        for j in 0..ell {
            for k in 0..ell {
                let t = st.t(i, j, k);
                if t != 0.0 {
                    mid += t * x[k] / (x[i] * x[j]);
                    last += t * x[i] / (x[j] * x[k]);
                }
            }
        }
        out.push(st.b[i] / (2.0 * x[i]) - mid / (2.0 * di) + last / (4.0 * di));
    }
    out
}

/// Partial derivatives d ric_i / d x_m as a dense matrix.
pub fn ricci_jacobian(sd: &SpaceData, x: &[f64]) -> DMatrix<f64> {
    let st = &sd.st;
    let ell = st.ell;
    let mut jac = DMatrix::zeros(ell, ell);
    for i in 0..ell {
        let di = st.d[i] as f64;
        jac[(i, i)] -= st.b[i] / (2.0 * x[i] * x[i]);
        for j in 0..ell {
            for k in 0..ell {
                let t = st.t(i, j, k);
                if t == 0.0 {
                    continue;
                }
                // -t/(2 d_i) * x_k/(x_i x_j)
                jac[(i, k)] -= t / (2.0 * di * x[i] * x[j]);
                jac[(i, i)] += t * x[k] / (2.0 * di * x[i] * x[i] * x[j]);
                jac[(i, j)] += t * x[k] / (2.0 * di * x[i] * x[j] * x[j]);
                // +t/(4 d_i) * x_i/(x_j x_k)
                jac[(i, i)] += t / (4.0 * di * x[j] * x[k]);
                jac[(i, j)] -= t * x[i] / (4.0 * di * x[j] * x[j] * x[k]);
                jac[(i, k)] -= t * x[i] / (4.0 * di * x[j] * x[k] * x[k]);
            }
        }
    }
    jac
}

/// scal(g) = 1/2 sum d_i b_i / x_i - 1/4 sum [ijk] x_i/(x_j x_k).
pub fn scalar_curvature(sd: &SpaceData, x: &[f64]) -> f64 {
    let st = &sd.st;
    let ell = st.ell;
    let mut first = 0.0;
    for i in 0..ell {
        first += st.d[i] as f64 * st.b[i] / x[i];
    }
    let mut second = 0.0;
    for i in 0..ell {
        for j in 0..ell {
            for k in 0..ell {
                let t = st.t(i, j, k);
                if t != 0.0 {
                    second += t * x[i] / (x[j] * x[k]);
                }
            }
        }
    }
    first / 2.0 - second / 4.0
}

/// Off-diagonal Ricci block between equivalent modules i != j: the
/// d_i x d_j matrix Ric(v, w) over the adapted bases. Zero by Schur's
/// lemma when the modules are inequivalent.
pub fn ricci_offdiagonal(sd: &SpaceData, x: &[f64], i: usize, j: usize) -> DMatrix<f64> {
    let dec = &sd.dec;
    let (si, ei) = dec.ranges[i];
    let (sj, ej) = dec.ranges[j];
    let di = ei - si;
    let dj = ej - sj;
    let mut out = DMatrix::zeros(di, dj);
    if !dec.equivalent(i, j) {
        return out;
    }
    let ell = sd.ell();
    for r in 0..ell {
        for k in 0..ell {
            let coef = (x[i] * x[j] - 2.0 * x[r] * x[r] + 2.0 * x[r] * x[k]) / (4.0 * x[r] * x[k]);
            if coef == 0.0 {
                continue;
            }
            let (sr, er) = dec.ranges[r];
            let (sk, ek) = dec.ranges[k];
            for a in sr..er {
                for b in sk..ek {
                    let br = sd.bracket_entry(a, b);
                    for (vi, v) in (si..ei).enumerate() {
                        let qv = br[v];
                        if qv == 0.0 {
                            continue;
                        }
                        for (wi, w) in (sj..ej).enumerate() {
                            out[(vi, wi)] += coef * qv * br[w];
                        }
                    }
                }
            }
        }
    }
    out
}

/// Sectional curvature block sums of Appendix-B type, divided by 4 x_i:
/// diagnostics for collapse detection.
pub fn sectional_block_sum(sd: &SpaceData, x: &[f64], i: usize, j: usize) -> f64 {
    let st = &sd.st;
    let ell = st.ell;
    if i == j {
        let mut v = 4.0 * st.d[i] as f64 * st.c[i] + st.t(i, i, i);
        for k in 0..ell {
            if k != i {
                let t = st.t(i, i, k);
                v += 4.0 * t - 3.0 * t * x[k] / x[i];
            }
        }
        v / (4.0 * x[i])
    } else {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let mut v = 0.0;
        for k in 0..ell {
            let t = st.t(i, j, k);
            if t == 0.0 {
                continue;
            }
            v += t * (x[i] / x[j]) * (x[i] / x[k]);
            v += t * (x[j] / x[k] - 1.0) * (1.0 - 2.0 * x[i] / x[j] + 3.0 * x[k] / x[j]);
        }
        v / (4.0 * x[i])
    }
}

/// Basis-level Ricci oracle: the textbook formula for the Ricci tensor of a
/// homogeneous metric summed over a g-orthonormal basis of m,
///   Ric(X,Y) = -1/2 sum_a g([X,f_a]_m, [Y,f_a]_m) - 1/2 B(X,Y)
///            + 1/4 sum_{a,b} g([f_a,f_b]_m, X) g([f_a,f_b]_m, Y),
/// independent of the structure-tensor fast path.
pub mod oracle {
    use super::*;

    /// Full Ricci tensor in adapted coordinates (dim_m x dim_m), evaluated
    /// on the unit vectors e_p of the adapted basis (so the diagonal entry
    /// is x_i ric_i for e_p in m_i).
    pub fn ricci_tensor(sd: &SpaceData, x: &[f64]) -> DMatrix<f64> {
        let m = sd.dim_m();
        let dec = &sd.dec;
        let xs: Vec<f64> = (0..m).map(|c| x[dec.module_of_column(c)]).collect();
        // g-orthonormal frame f_a = e_a / sqrt(x_a)
        let g_of = |v: &DVector<f64>, w: &DVector<f64>| -> f64 {
            (0..m).map(|c| xs[c] * v[c] * w[c]).sum()
        };
        let mut ric = DMatrix::zeros(m, m);
        for p in 0..m {
            for q in p..m {
                let mut term1 = 0.0;
                for a in 0..m {
                    let bx = sd.bracket_entry(p, a);
                    let by = sd.bracket_entry(q, a);
                    term1 += g_of(bx, by) / xs[a];
                }
                let cp = dec.basis.column(p).clone_owned();
                let cq = dec.basis.column(q).clone_owned();
                let nk = (cp.transpose() * &sd.space.algebra.neg_killing * cq)[(0, 0)];
                let mut term3 = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        let br = sd.bracket_entry(a, b);
                        // g([f_a,f_b]_m, e_p) = x_p br[p] / sqrt(x_a x_b)
                        term3 += (xs[p] * br[p]) * (xs[q] * br[q]) / (xs[a] * xs[b]);
                    }
                }
                let v = -0.5 * term1 + 0.5 * nk + 0.25 * term3;
                ric[(p, q)] = v;
                ric[(q, p)] = v;
            }
        }
        ric
    }
}
