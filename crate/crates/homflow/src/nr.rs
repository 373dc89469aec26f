//! Normalizer-adapted decompositions, nice and strongly nice bases, and the
//! coefficient identities they satisfy.
//!
//! Module indices are 0-based throughout: trivial modules occupy indices
//! 0..ell_0 in the canonical ordering.

use crate::decomp::{trivial_generator, Decomposition, SNAP_TOL};
use crate::error::{Error, Result};
use crate::space::HomogeneousSpace;
use crate::structure::StructureTensor;
use nalgebra::{DMatrix, DVector};

/// Witness of a failed niceness condition.
#[derive(Debug, Clone)]
pub struct Witness {
    /// Basis columns (e1, e2) and module-vector columns (v, w).
    pub e1: usize,
    pub e2: usize,
    pub v: usize,
    pub w: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Holds,
    Fails(Witness),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Bracket table of the adapted basis: entry (a, b) holds the m-projection
/// coefficients of [e_a, e_b] along the adapted basis columns.
fn adapted_bracket_table(space: &HomogeneousSpace, dec: &Decomposition) -> Vec<Vec<DVector<f64>>> {
    let m = space.dim_m();
    let cols: Vec<DVector<f64>> = (0..m).map(|j| dec.basis.column(j).clone_owned()).collect();
    let mut table = Vec::with_capacity(m);
    for a in 0..m {
        let ad_a = space.algebra.ad_of(&cols[a]);
        let mut row = Vec::with_capacity(m);
        for b in cols.iter() {
            let br = &ad_a * b;
            let mut proj = DVector::zeros(m);
            for (g, col) in cols.iter().enumerate() {
                proj[g] = br.dot(col);
            }
            row.push(proj);
        }
        table.push(row);
    }
    table
}

/// Strongly nice check: for every pair of distinct equivalent modules and
/// every pair of basis vectors e1, e2, the products
/// Q([e1,e2], v) Q([e1,e2], w) vanish for v, w in the two modules.
pub fn check_strongly_nice(space: &HomogeneousSpace, dec: &Decomposition) -> Verdict {
    let table = adapted_bracket_table(space, dec);
    let m = space.dim_m();
    for class in &dec.isotypic_classes {
        for (ci, &i) in class.iter().enumerate() {
            for &j in class.iter().skip(ci + 1) {
                let (si, ei) = dec.ranges[i];
                let (sj, ej) = dec.ranges[j];
                for e1 in 0..m {
                    for e2 in (e1 + 1)..m {
                        let br = &table[e1][e2];
                        for v in si..ei {
                            let qv = br[v];
                            if qv.abs() < SNAP_TOL {
                                continue;
                            }
                            for w in sj..ej {
                                let qw = br[w];
                                let prod = qv * qw;
                                if prod.abs() > SNAP_TOL {
                                    return Verdict::Fails(Witness {
                                        e1,
                                        e2,
                                        v,
                                        w,
                                        value: prod,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Verdict::Holds
}

/// Nice (stably Ricci-diagonal) check: for every pair of distinct
/// equivalent modules (i, j) and every module pair (k, r), the bilinear
/// form sum_{e_a in m_k, e_b in m_r} Q([e_a,e_b], v) Q([e_a,e_b], w)
/// vanishes on m_i x m_j. This is a property of the decomposition.
pub fn check_nice(space: &HomogeneousSpace, dec: &Decomposition) -> Verdict {
    let table = adapted_bracket_table(space, dec);
    let ell = dec.ell();
    for class in &dec.isotypic_classes {
        for (ci, &i) in class.iter().enumerate() {
            for &j in class.iter().skip(ci + 1) {
                let (si, ei) = dec.ranges[i];
                let (sj, ej) = dec.ranges[j];
                for k in 0..ell {
                    for r in 0..ell {
                        let (sk, ek) = dec.ranges[k];
                        let (sr, er) = dec.ranges[r];
                        for v in si..ei {
                            for w in sj..ej {
                                let mut total = 0.0;
                                for a in sk..ek {
                                    for b in sr..er {
                                        total += table[a][b][v] * table[a][b][w];
                                    }
                                }
                                if total.abs() > SNAP_TOL {
                                    return Verdict::Fails(Witness {
                                        e1: k,
                                        e2: r,
                                        v,
                                        w,
                                        value: total,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Verdict::Holds
}

/// Result of the normalizer-adapted check: for each trivial module p and
/// each module i, the bracket [m_p, m_i] must land in a single module.
pub fn check_normalizer_adapted(st: &StructureTensor, trivial_count: usize) -> Result<()> {
    for p in 0..trivial_count {
        for i in 0..st.ell {
            let hits: Vec<usize> = (0..st.ell).filter(|&j| st.t(p, i, j) > 0.0).collect();
            if hits.len() > 1 {
                return Err(Error::structure(format!(
                    "not normalizer-adapted: [m_{} , m_{}] spreads over modules {:?}",
                    p, i, hits
                )));
            }
        }
    }
    Ok(())
}

/// Trivial-module generators, permutations phi_p, coefficients mu_{p,i},
/// index partitions and the constants alpha_q.
#[derive(Debug, Clone)]
pub struct NormalizerData {
    /// Unit generators V_p of the trivial modules (frame coordinates).
    pub v: Vec<DVector<f64>>,
    /// Self-inverse permutations phi_p of 0..ell.
    pub phi: Vec<Vec<usize>>,
    /// mu[p][i] >= 0, zero exactly on I_p^0.
    pub mu: Vec<Vec<f64>>,
    /// I_p^0: ad(V_p) trivial on m_i.
    pub i_zero: Vec<Vec<usize>>,
    /// I_p: i in I_p^+ with i < phi_p(i).
    pub i_lower: Vec<Vec<usize>>,
    /// I_p': i in I_p^+ with i = phi_p(i) (even-dimensional rotation).
    pub i_fixed: Vec<Vec<usize>>,
    /// I_p'': i in I_p^+ with i > phi_p(i).
    pub i_upper: Vec<Vec<usize>>,
    /// alpha_q = max(max |mu|, 1/min |mu|) over I_q; 1.0 when I_q is empty.
    pub alpha: Vec<f64>,
    /// Whether [V_p, V_q] = 0, for the commuting-permutation identities.
    pub commuting: Vec<Vec<bool>>,
}

impl NormalizerData {
    pub fn compute(
        space: &HomogeneousSpace,
        dec: &Decomposition,
        st: &StructureTensor,
    ) -> Result<Self> {
        check_normalizer_adapted(st, dec.trivial_count)?;
        let ell = dec.ell();
        let l0 = dec.trivial_count;
        let mut v = Vec::with_capacity(l0);
        let mut phi = Vec::with_capacity(l0);
        let mut mu = Vec::with_capacity(l0);
        let mut i_zero = Vec::new();
        let mut i_lower = Vec::new();
        let mut i_fixed = Vec::new();
        let mut i_upper = Vec::new();
        let mut alpha = Vec::new();

        for p in 0..l0 {
            let vp = trivial_generator(dec, p);
            let ad_vp = space.algebra.ad_of(&vp);
            let mut phi_p = vec![0usize; ell];
            let mut mu_p = vec![0.0; ell];
            let mut z = Vec::new();
            let mut lo = Vec::new();
            let mut fx = Vec::new();
            let mut up = Vec::new();
            for i in 0..ell {
                let hits: Vec<usize> = (0..ell).filter(|&j| st.t(p, i, j) > 0.0).collect();
                match hits.as_slice() {
                    [] => {
                        phi_p[i] = i;
                        z.push(i);
                    }
                    [j] => {
                        phi_p[i] = *j;
                        let d_i = dec.dims[i] as f64;
                        mu_p[i] = (st.t(p, i, *j) / d_i).sqrt();
                        // certify that ad(V_p): m_i -> m_j is conformal
                        // (mu * orthogonal), which yields the adapted basis
                        let mi = dec.module(i);
                        let mj = dec.module(*j);
                        let a = mj.transpose() * &ad_vp * &mi;
                        let gram = a.transpose() * &a;
                        let expect = DMatrix::identity(dec.dims[i], dec.dims[i]) * mu_p[i] * mu_p[i];
                        if (&gram - &expect).amax() > 1e-8 {
                            return Err(Error::numerical(
                                "no adapted basis diagonalizing ad(V_p) found within tolerance",
                            ));
                        }
                        match (*j).cmp(&i) {
                            std::cmp::Ordering::Greater => lo.push(i),
                            std::cmp::Ordering::Equal => fx.push(i),
                            std::cmp::Ordering::Less => up.push(i),
                        }
                    }
                    _ => unreachable!("normalizer-adapted was checked"),
                }
            }
            // involution and fixed-set structure
            for i in 0..ell {
                if phi_p[phi_p[i]] != i {
                    return Err(Error::structure("phi_p is not an involution"));
                }
            }
            let a_p = if lo.is_empty() {
                1.0
            } else {
                let mx = lo.iter().map(|&i| mu_p[i]).fold(0.0f64, f64::max);
                let mn = lo.iter().map(|&i| mu_p[i]).fold(f64::INFINITY, f64::min);
                mx.max(1.0 / mn).max(1.0)
            };
            v.push(vp);
            phi.push(phi_p);
            mu.push(mu_p);
            i_zero.push(z);
            i_lower.push(lo);
            i_fixed.push(fx);
            i_upper.push(up);
            alpha.push(a_p);
        }
        let mut commuting = vec![vec![false; l0]; l0];
        for p in 0..l0 {
            for q in 0..l0 {
                let br = space.algebra.bracket(&v[p], &v[q]);
                commuting[p][q] = br.amax() < SNAP_TOL;
            }
        }
        // commuting generators must have commuting permutations
        for p in 0..l0 {
            for q in 0..l0 {
                if commuting[p][q] {
                    for i in 0..ell {
                        if phi[p][phi[q][i]] != phi[q][phi[p][i]] {
                            return Err(Error::structure(
                                "commuting generators with non-commuting permutations",
                            ));
                        }
                    }
                }
            }
        }
        Ok(NormalizerData {
            v,
            phi,
            mu,
            i_zero,
            i_lower,
            i_fixed,
            i_upper,
            alpha,
            commuting,
        })
    }
}

/// Residual report of the coefficient identities satisfied by an
/// NR-decomposition: d_i = d_phi(i), b_i = b_phi(i), the three structure
/// constant transport identities, and the Wang-Ziller identity for
/// self-commuting trivial modules.
#[derive(Debug, Clone, Default)]
pub struct NrIdentityReport {
    pub coef_dims: f64,
    pub coef_killing: f64,
    pub strconst_plus: f64,
    pub strconst_zero: f64,
    pub strconst_commuting: f64,
    pub wang_ziller: f64,
}

impl NrIdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.coef_dims
            .max(self.coef_killing)
            .max(self.strconst_plus)
            .max(self.strconst_zero)
            .max(self.strconst_commuting)
            .max(self.wang_ziller)
    }
}

pub fn verify_nr_identities(
    dec: &Decomposition,
    st: &StructureTensor,
    nd: &NormalizerData,
) -> NrIdentityReport {
    let ell = dec.ell();
    let l0 = dec.trivial_count;
    let mut rep = NrIdentityReport::default();
    for p in 0..l0 {
        let phi = &nd.phi[p];
        let in_plus: Vec<bool> = (0..ell).map(|i| nd.mu[p][i] > 0.0).collect();
        for &i in nd.i_lower[p].iter().chain(nd.i_fixed[p].iter()) {
            let fi = phi[i];
            rep.coef_dims = rep
                .coef_dims
                .max((dec.dims[i] as f64 - dec.dims[fi] as f64).abs());
            rep.coef_killing = rep.coef_killing.max((st.b[i] - st.b[fi]).abs());
            for j in 0..ell {
                for k in 0..ell {
                    if in_plus[j] {
                        let lhs = st.t(phi[i], phi[j], k);
                        let rhs = st.t(i, j, k);
                        rep.strconst_plus = rep.strconst_plus.max((lhs - rhs).abs());
                    }
                    if !in_plus[j] && !in_plus[k] {
                        let lhs = st.t(phi[i], j, k);
                        let rhs = st.t(i, j, k);
                        rep.strconst_zero = rep.strconst_zero.max((lhs - rhs).abs());
                    }
                }
            }
            for q in 0..l0 {
                if q != p && nd.commuting[p][q] {
                    let lhs = st.t(q, phi[i], nd.phi[q][phi[i]]);
                    let rhs = st.t(q, i, nd.phi[q][i]);
                    rep.strconst_commuting = rep.strconst_commuting.max((lhs - rhs).abs());
                }
            }
        }
        // Wang-Ziller for an abelian line: d_p b_p = sum_{j,k != p} [pjk]
        if nd.commuting[p][p] {
            let mut total = 0.0;
            for j in 0..ell {
                for k in 0..ell {
                    if j != p && k != p {
                        total += st.t(p, j, k);
                    }
                }
            }
            let lhs = dec.dims[p] as f64 * st.b[p];
            rep.wang_ziller = rep.wang_ziller.max((lhs - total).abs());
        }
    }
    rep
}

/// Outcome of the combined NR check.
#[derive(Debug, Clone)]
pub struct NrVerdict {
    pub normalizer_adapted: bool,
    pub stably_ricci_diagonal: bool,
    pub detail: String,
}

impl NrVerdict {
    pub fn is_nr(&self) -> bool {
        self.normalizer_adapted && self.stably_ricci_diagonal
    }
}

pub fn check_nr(
    space: &HomogeneousSpace,
    dec: &Decomposition,
    st: &StructureTensor,
) -> NrVerdict {
    let na = check_normalizer_adapted(st, dec.trivial_count);
    let nice = check_nice(space, dec);
    let detail = match (&na, &nice) {
        (Ok(()), Verdict::Holds) => "normalizer-adapted and stably Ricci-diagonal".to_string(),
        (Err(e), _) => format!("{e}"),
        (_, Verdict::Fails(w)) => format!(
            "nice condition fails at modules ({}, {}) columns ({}, {}) value {:.3e}",
            w.e1, w.e2, w.v, w.w, w.value
        ),
    };
    NrVerdict {
        normalizer_adapted: na.is_ok(),
        stably_ricci_diagonal: nice.holds(),
        detail,
    }
}

/// The base decomposition induced by a torus. Non-toral modules are grouped
/// into orbits of the permutations phi_p over the chosen toral indices.
#[derive(Debug, Clone)]
pub struct InducedBase {
    /// Base homogeneous space G/(HT).
    pub space: HomogeneousSpace,
    /// Grouped decomposition of the base tangent space.
    pub dec: Decomposition,
    /// orbit[a] = sorted module indices of the total space forming block a.
    pub orbits: Vec<Vec<usize>>,
    /// Toral module indices (sorted).
    pub toral: Vec<usize>,
}

/// Builds the base G/(HT) of the torus bundle spanned by the chosen trivial
/// modules, grouping the non-toral modules into phi-orbits.
pub fn induced_base_decomposition(
    space: &HomogeneousSpace,
    dec: &Decomposition,
    nd: &NormalizerData,
    toral: &[usize],
) -> Result<InducedBase> {
    let ell = dec.ell();
    let mut toral: Vec<usize> = toral.to_vec();
    toral.sort_unstable();
    toral.dedup();
    if toral.iter().any(|&p| p >= dec.trivial_count) {
        return Err(Error::config("toral indices must name trivial modules"));
    }
    for (a, &p) in toral.iter().enumerate() {
        for &q in toral.iter().skip(a) {
            if !nd.commuting[p][q] {
                return Err(Error::structure("chosen torus is not abelian"));
            }
        }
    }
    // orbits of non-toral indices under the phi_p
    let mut seen = vec![false; ell];
    for &p in &toral {
        seen[p] = true;
    }
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..ell {
        if seen[i] {
            continue;
        }
        let mut orbit = vec![i];
        seen[i] = true;
        let mut stack = vec![i];
        while let Some(j) = stack.pop() {
            for &p in &toral {
                let k = nd.phi[p][j];
                if !seen[k] {
                    seen[k] = true;
                    orbit.push(k);
                    stack.push(k);
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    // base space: h' = h + t
    let n = space.algebra.dim();
    let mut h_cols = Vec::new();
    for j in 0..space.h_basis.ncols() {
        h_cols.push(space.h_basis.column(j).clone_owned());
    }
    for &p in &toral {
        h_cols.push(trivial_generator(dec, p));
    }
    let mut h_span = DMatrix::zeros(n, h_cols.len());
    for (k, c) in h_cols.iter().enumerate() {
        h_span.set_column(k, c);
    }
    let h_basis = crate::la::gram_schmidt(&h_span, 1e-10);
    let modules: Vec<DMatrix<f64>> = orbits
        .iter()
        .map(|orbit| {
            let cols: Vec<DVector<f64>> = orbit
                .iter()
                .flat_map(|&i| {
                    let (s, e) = dec.ranges[i];
                    (s..e).map(|c| dec.basis.column(c).clone_owned()).collect::<Vec<_>>()
                })
                .collect();
            DMatrix::from_columns(&cols)
        })
        .collect();
    let mut m_cols = Vec::new();
    for mb in &modules {
        for j in 0..mb.ncols() {
            m_cols.push(mb.column(j).clone_owned());
        }
    }
    let m_basis = DMatrix::from_columns(&m_cols);
    let base_space = HomogeneousSpace::with_bases(space.algebra.clone(), h_basis, m_basis)?;
    // grouped modules are invariant but not necessarily irreducible as
    // listed by `orbits`; the Ad(HT)-action glues each orbit into one
    // irreducible module, which from_modules certifies implicitly through
    // the Killing/Casimir proportionality checks.
    let base_dec = crate::decomp::from_modules(&base_space, modules)?;
    // keep the orbit <-> base module correspondence aligned with the
    // reordering done by from_modules
    let mut ordered_orbits = vec![Vec::new(); orbits.len()];
    for orbit in &orbits {
        // find the base module whose first column matches this orbit's span
        let (s, _) = dec.ranges[orbit[0]];
        let probe = dec.basis.column(s).clone_owned();
        let mut found = None;
        for bi in 0..base_dec.ell() {
            let mb = base_dec.module(bi);
            let proj = &mb * (mb.transpose() * &probe);
            if (&proj - &probe).amax() < 1e-9 {
                found = Some(bi);
                break;
            }
        }
        let bi = found.ok_or_else(|| Error::structure("orbit lost in base reordering"))?;
        ordered_orbits[bi] = orbit.clone();
    }
    Ok(InducedBase {
        space: base_space,
        dec: base_dec,
        orbits: ordered_orbits,
        toral,
    })
}

/// Decomposition obtained from a preset by mixing two equivalent trivial
/// modules i and j by 45 degrees. All modules stay ad(h)-invariant; used to
/// exhibit bases that fail the niceness conditions.
pub fn rotate_trivial_pair(
    p: &crate::presets::PresetSpace,
    i: usize,
    j: usize,
) -> Result<Decomposition> {
    let dec = &p.dec;
    if i >= dec.trivial_count || j >= dec.trivial_count || i == j {
        return Err(Error::config("expected two distinct trivial modules"));
    }
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let vi = dec.module(i).column(0).clone_owned();
    let vj = dec.module(j).column(0).clone_owned();
    let mut modules = Vec::new();
    for k in 0..dec.ell() {
        if k == i {
            modules.push(DMatrix::from_columns(&[(&vi * c + &vj * c)]));
        } else if k == j {
            modules.push(DMatrix::from_columns(&[(&vi * (-c) + &vj * c)]));
        } else {
            modules.push(dec.module(k));
        }
    }
    crate::decomp::from_modules(&p.space, modules)
}
