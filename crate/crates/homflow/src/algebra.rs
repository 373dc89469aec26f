//! Compact matrix Lie algebras with an Ad-invariant inner product.
//!
//! Complex and quaternionic algebras are realised over the reals, so every
//! basis element is a real square matrix and all brackets are exact matrix
//! commutators. The working representation used by the rest of the crate is
//! a `CompactAlgebra`: a Q-orthonormal frame together with the structure
//! tensor of the bracket in that frame. In the orthonormal frame Q is the
//! Euclidean product and Ad-invariance is equivalent to every `ad(e_i)`
//! being skew-symmetric.

use crate::error::{Error, Result};
use crate::la;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub const JACOBI_TOL: f64 = 1e-10;
pub const AD_INVARIANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    So,
    Su,
    Sp,
    U,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::So => "so",
            Family::Su => "su",
            Family::Sp => "sp",
            Family::U => "u",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FamilyTag {
    Classical { family: Family, n: usize },
    Product(Vec<FamilyTag>),
}

impl std::fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FamilyTag::Classical { family, n } => write!(f, "{}({})", family.name(), n),
            FamilyTag::Product(parts) => {
                let names: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", names.join("+"))
            }
        }
    }
}

/// A compact Lie algebra given by explicit real basis matrices.
#[derive(Debug, Clone)]
pub struct MatrixLieAlgebra {
    pub dim: usize,
    /// Size of the square matrices realising the algebra.
    pub mat_dim: usize,
    pub basis: Vec<DMatrix<f64>>,
    pub family: FamilyTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QKind {
    NegativeKilling,
    NegativeTrace,
    Custom,
}

/// Gram matrix of an Ad-invariant Euclidean inner product in the raw basis.
#[derive(Debug, Clone)]
pub struct InnerProductQ {
    pub gram: DMatrix<f64>,
    pub kind: QKind,
}

// ---------------------------------------------------------------------------
// real realisations of complex / quaternionic entries
// ---------------------------------------------------------------------------

/// Writes the real 2x2 block of the complex number `a + b i` at complex
/// position `(r, c)` of a matrix realised over the reals.
fn complex_entry(m: &mut DMatrix<f64>, r: usize, c: usize, a: f64, b: f64) {
    m[(2 * r, 2 * c)] += a;
    m[(2 * r + 1, 2 * c + 1)] += a;
    m[(2 * r, 2 * c + 1)] += -b;
    m[(2 * r + 1, 2 * c)] += b;
}

/// Writes the quaternion `a + b i + c j + d k` at quaternionic position
/// `(r, c)` using the standard embedding into 2x2 complex blocks.
fn quaternion_entry(m: &mut DMatrix<f64>, r: usize, c: usize, q: [f64; 4]) {
    let [a, b, cc, d] = q;
    // [[a+bi, c+di], [-c+di, a-bi]] over C, then complex -> real
    complex_entry(m, 2 * r, 2 * c, a, b);
    complex_entry(m, 2 * r, 2 * c + 1, cc, d);
    complex_entry(m, 2 * r + 1, 2 * c, -cc, d);
    complex_entry(m, 2 * r + 1, 2 * c + 1, a, -b);
}

impl MatrixLieAlgebra {
    /// Canonical basis of a classical compact algebra.
    ///
    /// so(n): standard basis E_ij (1 in entry (i,j), -1 in (j,i), i < j).
    /// su(n), u(n): skew-Hermitian matrices realised as real 2n x 2n.
    /// sp(n): quaternionic skew-Hermitian matrices realised as real 4n x 4n.
    pub fn classical(family: Family, n: usize) -> Result<Self> {
        let ok = match family {
            Family::So => n >= 2,
            Family::Su => n >= 2,
            Family::Sp => n >= 1,
            Family::U => n >= 1,
        };
        if !ok {
            return Err(Error::config(format!(
                "{}({}) is outside the family's validity range",
                family.name(),
                n
            )));
        }
        let mut basis = Vec::new();
        let mat_dim;
        match family {
            Family::So => {
                mat_dim = n;
                for i in 0..n {
                    for j in (i + 1)..n {
                        let mut m = DMatrix::zeros(n, n);
                        m[(i, j)] = 1.0;
                        m[(j, i)] = -1.0;
                        basis.push(m);
                    }
                }
            }
            Family::Su | Family::U => {
                mat_dim = 2 * n;
                for i in 0..n {
                    for j in (i + 1)..n {
                        let mut a = DMatrix::zeros(2 * n, 2 * n);
                        complex_entry(&mut a, i, j, 1.0, 0.0);
                        complex_entry(&mut a, j, i, -1.0, 0.0);
                        basis.push(a);
                        let mut b = DMatrix::zeros(2 * n, 2 * n);
                        complex_entry(&mut b, i, j, 0.0, 1.0);
                        complex_entry(&mut b, j, i, 0.0, 1.0);
                        basis.push(b);
                    }
                }
                if family == Family::Su {
                    for k in 0..(n - 1) {
                        let mut d = DMatrix::zeros(2 * n, 2 * n);
                        complex_entry(&mut d, k, k, 0.0, 1.0);
                        complex_entry(&mut d, k + 1, k + 1, 0.0, -1.0);
                        basis.push(d);
                    }
                } else {
                    for k in 0..n {
                        let mut d = DMatrix::zeros(2 * n, 2 * n);
                        complex_entry(&mut d, k, k, 0.0, 1.0);
                        basis.push(d);
                    }
                }
            }
            Family::Sp => {
                mat_dim = 4 * n;
                // imaginary units on the diagonal
                for k in 0..n {
                    for unit in 1..4usize {
                        let mut q = [0.0; 4];
                        q[unit] = 1.0;
                        let mut m = DMatrix::zeros(4 * n, 4 * n);
                        quaternion_entry(&mut m, k, k, q);
                        basis.push(m);
                    }
                }
                // off-diagonal: q at (r,c), -conj(q) at (c,r)
                for r in 0..n {
                    for c in (r + 1)..n {
                        for unit in 0..4usize {
                            let mut q = [0.0; 4];
                            q[unit] = 1.0;
                            let conj = [-q[0], q[1], q[2], q[3]];
                            let mut m = DMatrix::zeros(4 * n, 4 * n);
                            quaternion_entry(&mut m, r, c, q);
                            quaternion_entry(&mut m, c, r, conj);
                            basis.push(m);
                        }
                    }
                }
            }
        }
        let alg = MatrixLieAlgebra {
            dim: basis.len(),
            mat_dim,
            basis,
            family: FamilyTag::Classical { family, n },
        };
        alg.check_independent()?;
        Ok(alg)
    }

    /// Direct sum realised by block-diagonal matrices.
    pub fn product(parts: &[MatrixLieAlgebra]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::config("empty product"));
        }
        let total: usize = parts.iter().map(|p| p.mat_dim).sum();
        let mut basis = Vec::new();
        let mut offset = 0;
        for p in parts {
            for b in &p.basis {
                let mut m = DMatrix::zeros(total, total);
                m.view_mut((offset, offset), (p.mat_dim, p.mat_dim)).copy_from(b);
                basis.push(m);
            }
            offset += p.mat_dim;
        }
        Ok(MatrixLieAlgebra {
            dim: basis.len(),
            mat_dim: total,
            basis,
            family: FamilyTag::Product(parts.iter().map(|p| p.family.clone()).collect()),
        })
    }

    fn check_independent(&self) -> Result<()> {
        let d2 = self.mat_dim * self.mat_dim;
        let mut stack = DMatrix::zeros(d2, self.dim);
        for (j, b) in self.basis.iter().enumerate() {
            for (i, v) in b.iter().enumerate() {
                stack[(i, j)] = *v;
            }
        }
        // normalise columns so the singular-value gate is scale free
        for mut col in stack.column_iter_mut() {
            let nrm = col.norm();
            if nrm > 0.0 {
                col /= nrm;
            }
        }
        if la::min_singular_value(&stack) <= 1e-8 {
            return Err(Error::structure("basis is not linearly independent"));
        }
        Ok(())
    }

    /// Coordinates of the commutator `[x, y]` of two coordinate vectors in
    /// the raw basis, solved by least squares against the stacked basis.
    fn raw_bracket_coords(&self) -> Vec<DMatrix<f64>> {
        let d2 = self.mat_dim * self.mat_dim;
        let mut stack = DMatrix::zeros(d2, self.dim);
        for (j, b) in self.basis.iter().enumerate() {
            for (i, v) in b.iter().enumerate() {
                stack[(i, j)] = *v;
            }
        }
        let pinv = (stack.transpose() * &stack)
            .try_inverse()
            .expect("basis Gram invertible")
            * stack.transpose();
        // ad_i as a dim x dim matrix: column j = coords of [b_i, b_j]
        let mut ads = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut ad = DMatrix::zeros(self.dim, self.dim);
            for j in 0..self.dim {
                let comm = &self.basis[i] * &self.basis[j] - &self.basis[j] * &self.basis[i];
                let vecc = DVector::from_column_slice(comm.as_slice());
                ad.set_column(j, &(&pinv * vecc));
            }
            ads.push(ad);
        }
        ads
    }

    /// Killing form B(x, y) = Tr(ad x . ad y) in the raw basis, computed
    /// from the bracket table rather than defining-representation shortcuts.
    pub fn killing_gram(&self) -> DMatrix<f64> {
        let ads = self.raw_bracket_coords();
        let mut b = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in i..self.dim {
                let v = (&ads[i] * &ads[j]).trace();
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        b
    }
}

/// Builds the requested Ad-invariant inner product on `alg`.
///
/// For `NegativeKilling` the algebra must be semisimple; a degenerate
/// Killing form is reported with a pointer to `NegativeTrace`. All `b_i`
/// coefficients downstream depend on the overall scale of Q, which is fixed
/// here and nowhere else.
pub fn invariant_inner_product(alg: &MatrixLieAlgebra, kind: QKind) -> Result<InnerProductQ> {
    let gram = match kind {
        QKind::NegativeKilling => {
            let b = alg.killing_gram();
            let neg = -b;
            let eig = neg.clone().symmetric_eigen();
            let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            if min.abs() < 1e-10 || min < 0.0 {
                return Err(Error::config(
                    "Killing form degenerate, choose negative_trace",
                ));
            }
            neg
        }
        QKind::NegativeTrace => {
            let mut g = DMatrix::zeros(alg.dim, alg.dim);
            for i in 0..alg.dim {
                for j in i..alg.dim {
                    let v = -(&alg.basis[i] * &alg.basis[j]).trace();
                    g[(i, j)] = v;
                    g[(j, i)] = v;
                }
            }
            let eig = g.clone().symmetric_eigen();
            let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            if min <= 0.0 {
                return Err(Error::structure("negative trace form is not positive definite"));
            }
            g
        }
        QKind::Custom => {
            return Err(Error::config("custom Q requires an explicit Gram matrix"));
        }
    };
    Ok(InnerProductQ { gram, kind })
}

/// A compact Lie algebra in a Q-orthonormal frame.
///
/// `on_basis` are the frame matrices; `ad` holds the structure tensor:
/// `ad[i]` is the matrix of `ad(e_i)` in frame coordinates, so the bracket
/// of coordinate vectors x, y is `sum_i x_i (ad[i] y)`. In this frame Q is
/// the Euclidean product and `neg_killing` is the matrix of -B.
#[derive(Debug, Clone)]
pub struct CompactAlgebra {
    pub raw: MatrixLieAlgebra,
    pub q: InnerProductQ,
    pub on_basis: Vec<DMatrix<f64>>,
    /// on_basis[j] = sum_i coord[(i, j)] raw.basis[i]
    pub coord: DMatrix<f64>,
    pub ad: Vec<DMatrix<f64>>,
    pub neg_killing: DMatrix<f64>,
    /// Least-squares map from vectorised matrices to frame coordinates.
    frame_pinv: DMatrix<f64>,
}

impl CompactAlgebra {
    pub fn new(raw: MatrixLieAlgebra, q: InnerProductQ) -> Result<Self> {
        let n = raw.dim;
        // Q-Gram-Schmidt on the raw basis, deterministic order
        let chol = q
            .gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::structure("Q is not positive definite"))?;
        // coordinates c_j of orthonormal vectors: G = L L^T, e_j = L^{-T} columns
        let linv_t = chol
            .l()
            .transpose()
            .try_inverse()
            .ok_or_else(|| Error::structure("Q Cholesky factor not invertible"))?;
        let coord = linv_t;
        let mut on_basis = Vec::with_capacity(n);
        for j in 0..n {
            let mut m = DMatrix::zeros(raw.mat_dim, raw.mat_dim);
            for i in 0..n {
                let c = coord[(i, j)];
                if c != 0.0 {
                    m += &raw.basis[i] * c;
                }
            }
            on_basis.push(m);
        }
        let alg = Self::from_frame(raw, q, on_basis, coord)?;
        Ok(alg)
    }

    /// Assembles the working data from an explicit Q-orthonormal frame.
    pub fn from_frame(
        raw: MatrixLieAlgebra,
        q: InnerProductQ,
        on_basis: Vec<DMatrix<f64>>,
        coord: DMatrix<f64>,
    ) -> Result<Self> {
        let n = raw.dim;
        let d2 = raw.mat_dim * raw.mat_dim;
        let mut stack = DMatrix::zeros(d2, n);
        for (j, b) in on_basis.iter().enumerate() {
            for (i, v) in b.iter().enumerate() {
                stack[(i, j)] = *v;
            }
        }
        let pinv = (stack.transpose() * &stack)
            .try_inverse()
            .ok_or_else(|| Error::structure("orthonormal frame is degenerate"))?
            * stack.transpose();
        let mut ad = Vec::with_capacity(n);
        for i in 0..n {
            let mut adm = DMatrix::zeros(n, n);
            for j in 0..n {
                let comm = &on_basis[i] * &on_basis[j] - &on_basis[j] * &on_basis[i];
                let vecc = DVector::from_column_slice(comm.as_slice());
                adm.set_column(j, &(&pinv * vecc));
            }
            ad.push(adm);
        }
        let mut neg_killing = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = -(&ad[i] * &ad[j]).trace();
                neg_killing[(i, j)] = v;
                neg_killing[(j, i)] = v;
            }
        }
        let alg = CompactAlgebra {
            raw,
            q,
            on_basis,
            coord,
            ad,
            neg_killing,
            frame_pinv: pinv,
        };
        alg.validate()?;
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.raw.dim
    }

    /// Frame coordinates of a matrix that is expected to lie in the algebra.
    /// Fails when the least-squares reconstruction misses by more than 1e-8
    /// relative to the matrix norm.
    pub fn coords_of_matrix(&self, m: &DMatrix<f64>) -> Result<DVector<f64>> {
        let vecm = DVector::from_column_slice(m.as_slice());
        let coords = &self.frame_pinv * vecm;
        let rebuilt = self.matrix_of(&coords);
        let scale = m.amax().max(1.0);
        if la::max_abs_diff(&rebuilt, m) > 1e-8 * scale {
            return Err(Error::structure(
                "matrix does not lie in the algebra's span",
            ));
        }
        Ok(coords)
    }

    /// Bracket of coordinate vectors in the orthonormal frame.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for i in 0..self.dim() {
            let xi = x[i];
            if xi != 0.0 {
                out += &(&self.ad[i] * y) * xi;
            }
        }
        out
    }

    /// ad(x) as a matrix in frame coordinates.
    pub fn ad_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] != 0.0 {
                out += &self.ad[i] * x[i];
            }
        }
        out
    }

    /// Frame matrix of a coordinate vector.
    pub fn matrix_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.raw.mat_dim, self.raw.mat_dim);
        for i in 0..self.dim() {
            if x[i] != 0.0 {
                m += &self.on_basis[i] * x[i];
            }
        }
        m
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        // orthonormality of the frame wrt Q pulled back to raw coordinates
        let mut gram_on = DMatrix::zeros(n, n);
        let g = &self.q.gram;
        for i in 0..n {
            for j in 0..n {
                let ci = self.coord.column(i);
                let cj = self.coord.column(j);
                gram_on[(i, j)] = (ci.transpose() * g * cj)[(0, 0)];
            }
        }
        let id = DMatrix::identity(n, n);
        if la::max_abs_diff(&gram_on, &id) > 1e-9 {
            return Err(Error::structure("frame is not Q-orthonormal"));
        }
        // Ad-invariance: ad(e_i) skew in orthonormal coordinates
        for a in &self.ad {
            if la::max_abs_diff(&a.transpose(), &(-a)) > AD_INVARIANCE_TOL {
                return Err(Error::structure("Q is not Ad-invariant"));
            }
        }
        // antisymmetry of the bracket
        for i in 0..n {
            for j in (i + 1)..n {
                let fwd = self.ad[i].column(j);
                let bwd = self.ad[j].column(i);
                if (fwd + bwd).amax() > JACOBI_TOL {
                    return Err(Error::structure("bracket is not antisymmetric"));
                }
            }
        }
        Ok(())
    }

    /// Maximum Jacobi residual |ad([x,y]) - [ad x, ad y]| over frame pairs.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let c = self.ad[i].column(j).clone_owned();
                let lhs = self.ad_of(&c);
                let rhs = &self.ad[i] * &self.ad[j] - &self.ad[j] * &self.ad[i];
                worst = worst.max(la::max_abs_diff(&lhs, &rhs));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_dimensions() {
        assert_eq!(MatrixLieAlgebra::classical(Family::So, 3).unwrap().dim, 3);
        assert_eq!(MatrixLieAlgebra::classical(Family::Su, 3).unwrap().dim, 8);
        assert_eq!(MatrixLieAlgebra::classical(Family::Sp, 2).unwrap().dim, 10);
        assert_eq!(MatrixLieAlgebra::classical(Family::U, 2).unwrap().dim, 4);
        assert!(MatrixLieAlgebra::classical(Family::So, 1).is_err());
    }

    #[test]
    fn sp2_jacobi() {
        let alg = MatrixLieAlgebra::classical(Family::Sp, 2).unwrap();
        let q = invariant_inner_product(&alg, QKind::NegativeKilling).unwrap();
        let ca = CompactAlgebra::new(alg, q).unwrap();
        assert!(ca.jacobi_residual() < 1e-12);
    }

    #[test]
    fn su2_killing_is_twice_real_trace() {
        // B_{su(n)}(X,Y) = 2n tr_C(XY); on the real realisation
        // tr_R = 2 Re tr_C, so -B = n * (-tr_R) = 2 * (-tr_R) for n = 2.
        let alg = MatrixLieAlgebra::classical(Family::Su, 2).unwrap();
        let killing = invariant_inner_product(&alg, QKind::NegativeKilling).unwrap();
        let trace = invariant_inner_product(&alg, QKind::NegativeTrace).unwrap();
        let scaled = &trace.gram * 2.0;
        assert!(la::max_abs_diff(&killing.gram, &scaled) < 1e-9);
    }

    #[test]
    fn u2_killing_degenerate() {
        let alg = MatrixLieAlgebra::classical(Family::U, 2).unwrap();
        let err = invariant_inner_product(&alg, QKind::NegativeKilling).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("negative_trace"));
    }

    #[test]
    fn so4_trace_form_ad_invariant() {
        let alg = MatrixLieAlgebra::classical(Family::So, 4).unwrap();
        let q = invariant_inner_product(&alg, QKind::NegativeTrace).unwrap();
        // CompactAlgebra::validate checks skewness of ad, i.e. Ad-invariance
        let ca = CompactAlgebra::new(alg, q).unwrap();
        for a in &ca.ad {
            assert!(la::max_abs_diff(&a.transpose(), &(-a)) < 1e-12);
        }
    }

    #[test]
    fn product_is_block_diagonal() {
        let a = MatrixLieAlgebra::classical(Family::Su, 2).unwrap();
        let b = MatrixLieAlgebra::classical(Family::Su, 2).unwrap();
        let p = MatrixLieAlgebra::product(&[a, b]).unwrap();
        assert_eq!(p.dim, 6);
        let q = invariant_inner_product(&p, QKind::NegativeKilling).unwrap();
        let ca = CompactAlgebra::new(p, q).unwrap();
        assert!(ca.jacobi_residual() < 1e-12);
        // the two factors commute
        for i in 0..3 {
            for j in 3..6 {
                assert!(ca.ad[i].column(j).amax() < 1e-14);
            }
        }
    }
}
