//! Homogeneous spaces G/H at the Lie-algebra level: the isotropy algebra h,
//! its Q-orthogonal complement m, and the ad(h)-action on m.

use crate::algebra::CompactAlgebra;
use crate::error::{Error, Result};
use crate::la;
use nalgebra::{DMatrix, DVector};

pub const REDUCTIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct HomogeneousSpace {
    pub algebra: CompactAlgebra,
    /// Q-orthonormal basis of h, columns in frame coordinates.
    pub h_basis: DMatrix<f64>,
    /// Q-orthonormal basis of m, columns in frame coordinates.
    pub m_basis: DMatrix<f64>,
    pub preset_tag: Option<String>,
}

impl HomogeneousSpace {
    /// Builds G/H from a spanning set for h. The h columns are
    /// orthonormalised, closure under the bracket is verified, and m is the
    /// deterministic Q-orthogonal complement.
    pub fn build(algebra: CompactAlgebra, h_span: &DMatrix<f64>) -> Result<Self> {
        let h_basis = la::gram_schmidt(h_span, 1e-10);
        let m_basis = la::orthogonal_complement(&h_basis, algebra.dim(), 1e-10);
        Self::with_bases(algebra, h_basis, m_basis)
    }

    /// Builds G/H from explicit orthonormal bases (used by presets that
    /// carry a canonical ordering of m).
    pub fn with_bases(
        algebra: CompactAlgebra,
        h_basis: DMatrix<f64>,
        m_basis: DMatrix<f64>,
    ) -> Result<Self> {
        let space = HomogeneousSpace {
            algebra,
            h_basis,
            m_basis,
            preset_tag: None,
        };
        space.validate()?;
        Ok(space)
    }

    pub fn dim_m(&self) -> usize {
        self.m_basis.ncols()
    }

    pub fn dim_h(&self) -> usize {
        self.h_basis.ncols()
    }

    /// ad(z)|_m in m-coordinates for z given in frame coordinates.
    pub fn ad_on_m(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let full = self.algebra.ad_of(z);
        self.m_basis.transpose() * full * &self.m_basis
    }

    /// ad(z)|_m for the a-th h-basis vector.
    pub fn isotropy_generators(&self) -> Vec<DMatrix<f64>> {
        (0..self.dim_h())
            .map(|a| self.ad_on_m(&self.h_basis.column(a).clone_owned()))
            .collect()
    }

    /// m-coordinates of the bracket of two m-coordinate vectors (projection
    /// onto m of [x, y]).
    pub fn bracket_m(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let fx = &self.m_basis * x;
        let fy = &self.m_basis * y;
        let br = self.algebra.bracket(&fx, &fy);
        self.m_basis.transpose() * br
    }

    fn validate(&self) -> Result<()> {
        let n = self.algebra.dim();
        if self.h_basis.ncols() + self.m_basis.ncols() != n {
            return Err(Error::structure("h and m do not span the algebra"));
        }
        // orthonormality and h-m orthogonality
        for i in 0..self.h_basis.ncols() {
            for j in 0..self.m_basis.ncols() {
                if self.h_basis.column(i).dot(&self.m_basis.column(j)).abs() > 1e-12 {
                    return Err(Error::structure("h and m are not Q-orthogonal"));
                }
            }
        }
        // h closed under bracket
        for i in 0..self.h_basis.ncols() {
            for j in (i + 1)..self.h_basis.ncols() {
                let br = self.algebra.bracket(
                    &self.h_basis.column(i).clone_owned(),
                    &self.h_basis.column(j).clone_owned(),
                );
                let up = self.m_basis.transpose() * &br;
                if up.amax() > REDUCTIVITY_TOL {
                    return Err(Error::structure("h is not a subalgebra"));
                }
            }
        }
        // reductivity [h, m] in m (automatic for Ad-invariant Q, asserted)
        for i in 0..self.h_basis.ncols() {
            let z = self.h_basis.column(i).clone_owned();
            let full = self.algebra.ad_of(&z);
            let into_h = self.h_basis.transpose() * &full * &self.m_basis;
            if into_h.amax() > REDUCTIVITY_TOL {
                return Err(Error::structure("[h, m] leaves m"));
            }
        }
        Ok(())
    }
}
