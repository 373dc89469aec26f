//! Custom space specifications loaded from JSON: a classical algebra, an
//! inner product kind and a regular subalgebra given by torus functionals
//! and a closed set of positive roots.

use crate::algebra::{invariant_inner_product, CompactAlgebra, Family, MatrixLieAlgebra, QKind};
use crate::curvature::SpaceData;
use crate::decomp::decompose_isotropy;
use crate::error::{Error, Result};
use crate::roots::{regular_subalgebra, RootDatum};
use crate::space::HomogeneousSpace;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HSpec {
    /// Torus part of h: each entry is a theta-coefficient vector whose
    /// Q-dual generates part of t'.
    #[serde(default)]
    pub torus: Vec<Vec<f64>>,
    /// Indices into the positive-root table, or explicit coefficient
    /// vectors, naming the root spaces of h.
    #[serde(default)]
    pub roots: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceSpecFile {
    pub family: String,
    pub n: usize,
    #[serde(default)]
    pub q: Option<String>,
    pub h: HSpec,
}

pub fn parse_family(s: &str) -> Result<Family> {
    Ok(match s {
        "so" => Family::So,
        "su" => Family::Su,
        "sp" => Family::Sp,
        "u" => Family::U,
        _ => return Err(Error::config(format!("unknown family '{s}'"))),
    })
}

fn parse_qkind(s: &str) -> Result<QKind> {
    Ok(match s {
        "negative_killing" => QKind::NegativeKilling,
        "negative_trace" => QKind::NegativeTrace,
        _ => return Err(Error::config(format!("unknown inner product kind '{s}'"))),
    })
}

/// Builds the space described by a JSON spec, decomposing the isotropy
/// representation with the given seed.
pub fn build_from_spec(spec: &SpaceSpecFile, seed: u64) -> Result<(SpaceData, RootDatum)> {
    let family = parse_family(&spec.family)?;
    let kind = match &spec.q {
        Some(s) => parse_qkind(s)?,
        None => QKind::NegativeKilling,
    };
    let raw = MatrixLieAlgebra::classical(family, spec.n)?;
    let q = invariant_inner_product(&raw, kind)?;
    let alg = CompactAlgebra::new(raw, q)?;
    let datum = RootDatum::build(&alg)?;
    let mut torus = DMatrix::zeros(alg.dim(), spec.h.torus.len());
    for (k, coeffs) in spec.h.torus.iter().enumerate() {
        if coeffs.len() != datum.rank {
            return Err(Error::config("torus functional has wrong rank"));
        }
        let h = datum.dual(coeffs);
        let n = h.norm();
        if n < 1e-12 {
            return Err(Error::config("torus functional is degenerate"));
        }
        torus.set_column(k, &(&h / n));
    }
    let mut root_indices = Vec::new();
    for r in &spec.h.roots {
        let idx = datum
            .root_index(r)
            .ok_or_else(|| Error::config(format!("{:?} is not a positive root", r)))?;
        root_indices.push(idx);
    }
    let h_basis = regular_subalgebra(&alg, &datum, &torus, &root_indices)?;
    let space = HomogeneousSpace::build(alg, &h_basis)?;
    let dec = decompose_isotropy(&space, seed)?;
    let sd = SpaceData::new(space, dec)?;
    Ok((sd, datum))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_from_spec_file() {
        let spec: SpaceSpecFile = serde_json::from_str(
            r#"{"family":"su","n":3,"h":{"torus":[[1,-1,0],[0,1,-1]],"roots":[]}}"#,
        )
        .unwrap();
        let (sd, _) = build_from_spec(&spec, 11).unwrap();
        assert_eq!(sd.dim_m(), 6);
        assert_eq!(sd.st.ell, 3);
        assert_eq!(sd.st.d, vec![2, 2, 2]);
    }

    #[test]
    fn aw01_from_spec_file() {
        let spec: SpaceSpecFile = serde_json::from_str(
            r#"{"family":"su","n":3,"h":{"torus":[[0,1,-1]],"roots":[]}}"#,
        )
        .unwrap();
        let (sd, _) = build_from_spec(&spec, 5).unwrap();
        assert_eq!(sd.dim_m(), 7);
        assert_eq!(sd.st.d, vec![1, 2, 2, 2]);
    }

    #[test]
    fn bad_root_rejected() {
        let spec: SpaceSpecFile = serde_json::from_str(
            r#"{"family":"su","n":3,"h":{"torus":[],"roots":[[2,0,-2]]}}"#,
        )
        .unwrap();
        assert!(build_from_spec(&spec, 1).is_err());
    }
}
