//! The structure tensor of a decomposition: triple sums [ijk], Killing
//! coefficients b_i, Casimir constants c_i and derived identities.

use crate::decomp::{Decomposition, SNAP_TOL};
use crate::error::{Error, Result};
use crate::la;
use crate::space::HomogeneousSpace;
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Structure constants attached to a (space, decomposition) pair.
#[derive(Debug, Clone)]
pub struct StructureTensor {
    pub ell: usize,
    pub d: Vec<usize>,
    pub b: Vec<f64>,
    /// Casimir constant of ad(h) on each module (zero on trivial modules).
    pub c: Vec<f64>,
    /// Symmetric triple sums, indexed [i + ell j + ell^2 k].
    triple: Vec<f64>,
    /// b_{G/H} = sum_j d_j b_j.
    pub b_total: f64,
}

impl StructureTensor {
    #[inline]
    pub fn t(&self, i: usize, j: usize, k: usize) -> f64 {
        self.triple[i + self.ell * j + self.ell * self.ell * k]
    }

    /// Computes the tensor from the adapted basis of the decomposition.
    pub fn compute(space: &HomogeneousSpace, dec: &Decomposition) -> Result<Self> {
        let ell = dec.ell();
        let m = space.dim_m();
        // bracket projections of adapted basis pairs onto the adapted basis
        let cols: Vec<_> = (0..m).map(|j| dec.basis.column(j).clone_owned()).collect();
        let mut triple = vec![0.0; ell * ell * ell];
        let module_of: Vec<usize> = (0..m).map(|c| dec.module_of_column(c)).collect();
        for a in 0..m {
            let ad_a = space.algebra.ad_of(&cols[a]);
            for b in 0..m {
                let br = &ad_a * &cols[b];
                for g in 0..m {
                    let v = br.dot(&cols[g]);
                    if v != 0.0 {
                        let (i, j, k) = (module_of[a], module_of[b], module_of[g]);
                        triple[i + ell * j + ell * ell * k] += v * v;
                    }
                }
            }
        }
        for v in triple.iter_mut() {
            *v = la::snap(*v, SNAP_TOL);
        }
        // b_i from -B restricted to each module; c_i from the Casimir
        let mut b = Vec::with_capacity(ell);
        let mut c = Vec::with_capacity(ell);
        for i in 0..ell {
            let mb = dec.module(i);
            let d = mb.ncols();
            let nk = mb.transpose() * &space.algebra.neg_killing * &mb;
            let bi = nk.trace() / d as f64;
            if (&nk - DMatrix::identity(d, d) * bi).amax() > 1e-8 {
                return Err(Error::structure(
                    "Killing form not proportional to Q on a module",
                ));
            }
            b.push(la::snap(bi, SNAP_TOL));
            let mut cas = DMatrix::zeros(d, d);
            for aidx in 0..space.dim_h() {
                let z = space.h_basis.column(aidx).clone_owned();
                let adz = space.algebra.ad_of(&z);
                let on = mb.transpose() * &adz * &adz * &mb;
                cas -= on;
            }
            let ci = cas.trace() / d as f64;
            if (&cas - DMatrix::identity(d, d) * ci).amax() > 1e-8 {
                return Err(Error::structure("Casimir not scalar on a module"));
            }
            c.push(la::snap(ci, SNAP_TOL));
        }
        let b_total = dec
            .dims
            .iter()
            .zip(b.iter())
            .map(|(&d, &bi)| d as f64 * bi)
            .sum();
        Ok(StructureTensor {
            ell,
            d: dec.dims.clone(),
            b,
            c,
            triple,
            b_total,
        })
    }

    /// Maximum deviation of [ijk] under the six index permutations.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.ell {
            for j in 0..self.ell {
                for k in 0..self.ell {
                    let v = self.t(i, j, k);
                    for w in [
                        self.t(i, k, j),
                        self.t(j, i, k),
                        self.t(j, k, i),
                        self.t(k, i, j),
                        self.t(k, j, i),
                    ] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        worst
    }

    /// Wang-Ziller identity residual: d_i b_i = 2 d_i c_i + sum_{j,k} [ijk]
    /// for every module; the toral special case has c_i = 0.
    pub fn wang_ziller_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.ell {
            let mut total = 0.0;
            for j in 0..self.ell {
                for k in 0..self.ell {
                    total += self.t(i, j, k);
                }
            }
            let lhs = self.d[i] as f64 * self.b[i];
            let rhs = 2.0 * self.d[i] as f64 * self.c[i] + total;
            worst = worst.max((lhs - rhs).abs());
        }
        worst
    }
}

/// Brute-force triple sums over a randomly re-chosen adapted orthonormal
/// basis, computed from raw matrix commutators and the raw Q Gram matrix.
/// Kept independent of the `ad`-tensor fast path; used as the test oracle.
pub fn brute_force_triple_sums(
    space: &HomogeneousSpace,
    dec: &Decomposition,
    seed: u64,
) -> Vec<f64> {
    let ell = dec.ell();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // random Q-orthogonal rotation inside each module
    let mut rotated: Vec<Vec<DMatrix<f64>>> = Vec::with_capacity(ell);
    for i in 0..ell {
        let mb = dec.module(i);
        let d = mb.ncols();
        let mut g = DMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                g[(r, c)] = rng.gen::<f64>() * 2.0 - 1.0;
            }
        }
        let qr = g.qr();
        let rot = qr.q();
        let newb = &mb * rot;
        let mats = (0..d)
            .map(|j| space.algebra.matrix_of(&newb.column(j).clone_owned()))
            .collect();
        rotated.push(mats);
    }

    // independent Q product on matrices: raw least squares + raw Gram
    let raw = &space.algebra.raw;
    let d2 = raw.mat_dim * raw.mat_dim;
    let mut stack = DMatrix::zeros(d2, raw.dim);
    for (j, b) in raw.basis.iter().enumerate() {
        for (i, v) in b.iter().enumerate() {
            stack[(i, j)] = *v;
        }
    }
    let pinv = (stack.transpose() * &stack).try_inverse().unwrap() * stack.transpose();
    let gram = &space.algebra.q.gram;
    let raw_coords = |m: &DMatrix<f64>| -> nalgebra::DVector<f64> {
        &pinv * nalgebra::DVector::from_column_slice(m.as_slice())
    };
    let qprod = |a: &DMatrix<f64>, b: &DMatrix<f64>| -> f64 {
        let ca = raw_coords(a);
        let cb = raw_coords(b);
        (ca.transpose() * gram * cb)[(0, 0)]
    };

    let mut triple = vec![0.0; ell * ell * ell];
    for i in 0..ell {
        for j in 0..ell {
            for k in 0..ell {
                let mut total = 0.0;
                for ea in &rotated[i] {
                    for eb in &rotated[j] {
                        let comm = ea * eb - eb * ea;
                        for ec in &rotated[k] {
                            let v = qprod(&comm, ec);
                            total += v * v;
                        }
                    }
                }
                triple[i + ell * j + ell * ell * k] = total;
            }
        }
    }
    triple
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::build_preset;

    #[test]
    fn full_symmetry_on_flag() {
        let p = build_preset("flag-su3").unwrap();
        let st = StructureTensor::compute(&p.space, &p.dec).unwrap();
        assert!(st.symmetry_residual() < 1e-12);
        // only the mixed triple survives
        assert!(st.t(0, 1, 2) > 0.0);
        assert_eq!(st.t(0, 0, 1), 0.0);
        // value 1/3 for Q = -B, see the flag computation
        assert!((st.t(0, 1, 2) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn wang_ziller_on_presets() {
        for name in ["group-su2", "group-so4", "so5-so3", "aloff-wallach-11", "sp2-sp1"] {
            let p = build_preset(name).unwrap();
            let st = StructureTensor::compute(&p.space, &p.dec).unwrap();
            assert!(
                st.wang_ziller_residual() < 1e-9,
                "{name}: {:.2e}",
                st.wang_ziller_residual()
            );
        }
    }

    #[test]
    fn group_case_row_sums_equal_dimension() {
        // simple G, H = {0}, Q = -B: b_i = 1, c_i = 0, so sum_{j,k}[ijk] = d_i
        for name in ["group-su2", "group-so4"] {
            let p = build_preset(name).unwrap();
            let st = StructureTensor::compute(&p.space, &p.dec).unwrap();
            for i in 0..st.ell {
                let sum: f64 = (0..st.ell)
                    .flat_map(|j| (0..st.ell).map(move |k| (j, k)))
                    .map(|(j, k)| st.t(i, j, k))
                    .sum();
                assert!((sum - st.d[i] as f64).abs() < 1e-9, "{name} i={i}");
                assert!((st.b[i] - 1.0).abs() < 1e-9);
                assert_eq!(st.c[i], 0.0);
            }
        }
    }

    #[test]
    fn brute_force_matches_fast_path() {
        let p = build_preset("aloff-wallach-11").unwrap();
        let st = StructureTensor::compute(&p.space, &p.dec).unwrap();
        let oracle = brute_force_triple_sums(&p.space, &p.dec, 7);
        for i in 0..st.ell {
            for j in 0..st.ell {
                for k in 0..st.ell {
                    let f = st.t(i, j, k);
                    let o = oracle[i + st.ell * j + st.ell * st.ell * k];
                    assert!((f - o).abs() < 1e-10, "[{i}{j}{k}] {f} vs {o}");
                }
            }
        }
    }

    #[test]
    fn central_module_has_zero_killing() {
        // u(4): the central direction i*Id lies in z(g), so some trivial
        // module of U(4)/U(1)U(2) would have b = 0 only if it contained the
        // center; here the center sits inside h, so instead check a torus
        // group directly: u(1) x u(1) ... via u(2) trivial piece is overkill.
        // Use the direct statement: on u(2) with -tr, the center line has
        // b = 0.
        use crate::algebra::*;
        let raw = MatrixLieAlgebra::classical(Family::U, 2).unwrap();
        let q = invariant_inner_product(&raw, QKind::NegativeTrace).unwrap();
        let alg = CompactAlgebra::new(raw, q).unwrap();
        // center: i * Id; its -B value must vanish
        let mut center = DMatrix::zeros(alg.raw.mat_dim, alg.raw.mat_dim);
        for k in 0..2 {
            center[(2 * k, 2 * k + 1)] = -1.0;
            center[(2 * k + 1, 2 * k)] = 1.0;
        }
        let v = alg.coords_of_matrix(&center).unwrap();
        let v = &v / v.norm();
        let b = (v.transpose() * &alg.neg_killing * v)[(0, 0)];
        assert!(b.abs() < 1e-12);
    }
}
