//! Catalog of homogeneous spaces used throughout the library: compact Lie
//! groups with bi-invariant Q, block quotients of SO(n) and Sp(n), the
//! Aloff-Wallach spaces, U(4)/U(1)U(2), SO(8)/SO(3)SO(4), SO(7)/SO(3)SO(3),
//! the full flag SU(3)/T^2 and the product space Sp(2)xSp(2)/diag Sp(1).
//!
//! Each preset carries a canonical ordered decomposition adapted to a
//! distinguished basis (standard basis for orthogonal block quotients, real
//! Cartan-Weyl bases elsewhere).

use crate::algebra::{invariant_inner_product, CompactAlgebra, Family, MatrixLieAlgebra, QKind};
use crate::decomp::{self, Decomposition};
use crate::error::{Error, Result};
use crate::roots::{regular_subalgebra, RootDatum};
use crate::space::HomogeneousSpace;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct PresetSpace {
    pub name: String,
    pub space: HomogeneousSpace,
    pub dec: Decomposition,
    /// Root datum of the group when the preset is built from root spaces.
    pub datum: Option<RootDatum>,
}

/// All named presets.
pub fn preset_names() -> Vec<&'static str> {
    vec![
        "group-su2",
        "group-su3",
        "group-so3",
        "group-so4",
        "group-so5",
        "group-so6",
        "group-so7",
        "flag-su3",
        "so5-so3",
        "sp2-sp1",
        "aloff-wallach-11",
        "aloff-wallach-01",
        "u4-u1u2",
        "so8-so3so4",
        "so7-so3so3",
        "sp2xsp2-dsp1",
    ]
}

/// Presets whose canonical decomposition is expected to be an
/// NR-decomposition (the worked examples of the strongly-nice criterion).
pub fn nr_preset_names() -> Vec<&'static str> {
    vec![
        "so5-so3",
        "sp2-sp1",
        "aloff-wallach-11",
        "aloff-wallach-01",
        "u4-u1u2",
        "so8-so3so4",
        "so7-so3so3",
        "sp2xsp2-dsp1",
    ]
}

pub fn build_preset(name: &str) -> Result<PresetSpace> {
    match name {
        "group-su2" => group_preset(Family::Su, 2, name),
        "group-su3" => group_preset(Family::Su, 3, name),
        "group-so3" => group_preset(Family::So, 3, name),
        "group-so4" => group_preset(Family::So, 4, name),
        "group-so5" => group_preset(Family::So, 5, name),
        "group-so6" => group_preset(Family::So, 6, name),
        "group-so7" => group_preset(Family::So, 7, name),
        "flag-su3" => flag_su3(),
        "so5-so3" => so_blocks(5, &[3], name),
        "sp2-sp1" => sp2_sp1(),
        "aloff-wallach-11" => aloff_wallach(1, 1),
        "aloff-wallach-01" => aloff_wallach(0, 1),
        "u4-u1u2" => u4_u1u2(),
        "so8-so3so4" => so_even_so3(4),
        "so7-so3so3" => so_odd_so3(3),
        "sp2xsp2-dsp1" => sp2xsp2_dsp1(),
        _ => Err(Error::config(format!("unknown preset '{name}'"))),
    }
}

/// Aloff-Wallach space W^7_{(p,q)} = SU(3)/S^1_{(p,q)} for coprime (p, q).
pub fn aloff_wallach(p: i64, q: i64) -> Result<PresetSpace> {
    if p == 0 && q == 0 {
        return Err(Error::config("aloff-wallach requires (p, q) != (0, 0)"));
    }
    let g = gcd(p.unsigned_abs(), q.unsigned_abs());
    if g != 1 {
        return Err(Error::config("aloff-wallach requires coprime (p, q)"));
    }
    let (alg, datum) = classical_with_datum(Family::Su, 3, QKind::NegativeKilling)?;
    // isotropy circle: dual of p theta1 + q theta2 - (p+q) theta3
    let iso = datum.dual(&[p as f64, q as f64, -(p + q) as f64]);
    let iso = &iso / iso.norm();
    let mut h_span = DMatrix::zeros(alg.dim(), 1);
    h_span.set_column(0, &iso);
    let h_basis = crate::la::gram_schmidt(&h_span, 1e-10);
    // m_0 torus direction: the Q-complement of h inside t
    let mut t_span = DMatrix::zeros(alg.dim(), datum.cartan.ncols() + 1);
    t_span.set_column(0, &iso);
    for k in 0..datum.cartan.ncols() {
        t_span.set_column(k + 1, &datum.cartan.column(k));
    }
    let t_on = crate::la::gram_schmidt(&t_span, 1e-10);
    let m0_torus = t_on.column(1).clone_owned();

    let mut modules: Vec<DMatrix<f64>> = vec![DMatrix::from_columns(&[m0_torus.clone()])];
    for alpha in [[1, -1, 0], [1, 0, -1], [0, 1, -1]] {
        let idx = datum.root_index(&alpha).unwrap();
        let pair = &datum.pairs[idx];
        let coeffs: Vec<f64> = alpha.iter().map(|&c| c as f64).collect();
        let weight = datum.eval(&coeffs, &(&iso * 1.0));
        if weight.abs() < 1e-12 {
            // root space commutes with the circle: two trivial lines
            modules.push(DMatrix::from_columns(&[pair.x.clone()]));
            modules.push(DMatrix::from_columns(&[pair.y.clone()]));
        } else {
            modules.push(DMatrix::from_columns(&[pair.x.clone(), pair.y.clone()]));
        }
    }
    let m_basis = adapted_m_basis(&modules);
    let space = HomogeneousSpace::with_bases(alg, h_basis, m_basis)?;
    let dec = decomp::from_modules(&space, modules)?;
    Ok(PresetSpace {
        name: format!("aloff-wallach-{}{}", p, q),
        space,
        dec,
        datum: Some(datum),
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

fn classical_with_datum(
    family: Family,
    n: usize,
    kind: QKind,
) -> Result<(CompactAlgebra, RootDatum)> {
    let raw = MatrixLieAlgebra::classical(family, n)?;
    let q = invariant_inner_product(&raw, kind)?;
    let alg = CompactAlgebra::new(raw, q)?;
    let datum = RootDatum::build(&alg)?;
    Ok((alg, datum))
}

fn adapted_m_basis(modules: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = modules[0].nrows();
    let total: usize = modules.iter().map(|m| m.ncols()).sum();
    let mut out = DMatrix::zeros(n, total);
    let mut col = 0;
    for m in modules {
        for j in 0..m.ncols() {
            out.set_column(col, &m.column(j));
            col += 1;
        }
    }
    out
}

/// Compact group preset: H = {0}, Q = -B, the finest decomposition into
/// coordinate lines of the orthonormal standard basis.
fn group_preset(family: Family, n: usize, name: &str) -> Result<PresetSpace> {
    let raw = MatrixLieAlgebra::classical(family, n)?;
    let q = invariant_inner_product(&raw, QKind::NegativeKilling)?;
    let alg = CompactAlgebra::new(raw, q)?;
    let dim = alg.dim();
    let h_basis = DMatrix::zeros(dim, 0);
    let m_basis = DMatrix::identity(dim, dim);
    let space = HomogeneousSpace::with_bases(alg, h_basis, m_basis)?;
    let modules: Vec<DMatrix<f64>> = (0..dim)
        .map(|i| {
            let mut v = DVector::zeros(dim);
            v[i] = 1.0;
            DMatrix::from_columns(&[v])
        })
        .collect();
    let dec = decomp::from_modules(&space, modules)?;
    Ok(PresetSpace {
        name: name.to_string(),
        space,
        dec,
        datum: None,
    })
}

/// Full flag SU(3)/T^2 with the root-space decomposition.
fn flag_su3() -> Result<PresetSpace> {
    let (alg, datum) = classical_with_datum(Family::Su, 3, QKind::NegativeKilling)?;
    let h_basis = datum.cartan.clone();
    let modules: Vec<DMatrix<f64>> = datum
        .pairs
        .iter()
        .map(|p| DMatrix::from_columns(&[p.x.clone(), p.y.clone()]))
        .collect();
    let m_basis = adapted_m_basis(&modules);
    let space = HomogeneousSpace::with_bases(alg, h_basis, m_basis)?;
    let dec = decomp::from_modules(&space, modules)?;
    Ok(PresetSpace {
        name: "flag-su3".into(),
        space,
        dec,
        datum: Some(datum),
    })
}

/// SO(n)/SO(p_1)x...xSO(p_k) in block embedding, standard-basis adapted.
/// The leftover q = n - sum p_i columns carry the trivial so(q) modules.
fn so_blocks(n: usize, blocks: &[usize], name: &str) -> Result<PresetSpace> {
    let total: usize = blocks.iter().sum();
    if total >= n {
        return Err(Error::config("blocks must leave at least one column"));
    }
    if blocks.iter().any(|&p| p < 2) {
        return Err(Error::config("blocks of size < 2 belong to the leftover"));
    }
    let raw = MatrixLieAlgebra::classical(Family::So, n)?;
    let q = invariant_inner_product(&raw, QKind::NegativeKilling)?;
    let alg = CompactAlgebra::new(raw, q)?;

    let mut ranges = Vec::new();
    let mut off = 0;
    for &p in blocks {
        ranges.push(off..off + p);
        off += p;
    }
    let leftover: Vec<usize> = (off..n).collect();

    let unit = |i: usize, j: usize| -> DVector<f64> {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = 1.0;
        m[(j, i)] = -1.0;
        alg.coords_of_matrix(&m).expect("so unit in algebra")
    };

    // h: within-block elements
    let mut h_cols = Vec::new();
    for r in &ranges {
        for i in r.clone() {
            for j in (i + 1)..r.end {
                h_cols.push(unit(i, j));
            }
        }
    }
    let h_basis = if h_cols.is_empty() {
        DMatrix::zeros(alg.dim(), 0)
    } else {
        let mut hm = DMatrix::zeros(alg.dim(), h_cols.len());
        for (k, c) in h_cols.iter().enumerate() {
            hm.set_column(k, c);
        }
        crate::la::gram_schmidt(&hm, 1e-10)
    };

    let mut modules: Vec<DMatrix<f64>> = Vec::new();
    // trivial so(q) lines
    for (a, &i) in leftover.iter().enumerate() {
        for &j in leftover.iter().skip(a + 1) {
            let v = unit(i, j);
            modules.push(DMatrix::from_columns(&[&v / v.norm()]));
        }
    }
    // block-pair modules
    for a in 0..ranges.len() {
        for b in (a + 1)..ranges.len() {
            let mut cols = Vec::new();
            for i in ranges[a].clone() {
                for j in ranges[b].clone() {
                    let v = unit(i, j);
                    cols.push(&v / v.norm());
                }
            }
            modules.push(DMatrix::from_columns(&cols));
        }
    }
    // block-to-leftover columns
    for r in &ranges {
        for &c in &leftover {
            let mut cols = Vec::new();
            for i in r.clone() {
                let v = unit(i, c);
                cols.push(&v / v.norm());
            }
            modules.push(DMatrix::from_columns(&cols));
        }
    }
    let m_basis = adapted_m_basis(&modules);
    let space = HomogeneousSpace::with_bases(alg, h_basis, m_basis)?;
    let dec = decomp::from_modules(&space, modules)?;
    Ok(PresetSpace {
        name: name.to_string(),
        space,
        dec,
        datum: None,
    })
}

/// Sp(2)/Sp(1) with the real Cartan-Weyl adapted decomposition:
/// h = span{H_theta1} + r_{2 theta1}, m_0 = sp(1) on the second slot.
fn sp2_sp1() -> Result<PresetSpace> {
    let (alg, datum) = classical_with_datum(Family::Sp, 2, QKind::NegativeKilling)?;
    let h1 = datum.dual(&[1.0, 0.0]);
    let mut tp = DMatrix::zeros(alg.dim(), 1);
    tp.set_column(0, &(&h1 / h1.norm()));
    let r_2t1 = datum.root_index(&[2, 0]).unwrap();
    let h_basis = regular_subalgebra(&alg, &datum, &tp, &[r_2t1])?;

    let h2 = datum.dual(&[0.0, 1.0]);
    let h2 = &h2 / h2.norm();
    let p_2t2 = &datum.pairs[datum.root_index(&[0, 2]).unwrap()];
    let p_dif = &datum.pairs[datum.root_index(&[1, -1]).unwrap()];
    let p_sum = &datum.pairs[datum.root_index(&[1, 1]).unwrap()];
    let modules = vec![
        DMatrix::from_columns(&[h2.clone_owned()]),
        DMatrix::from_columns(&[p_2t2.x.clone()]),
        DMatrix::from_columns(&[p_2t2.y.clone()]),
        DMatrix::from_columns(&[
            p_dif.x.clone(),
            p_dif.y.clone(),
            p_sum.x.clone(),
            p_sum.y.clone(),
        ]),
    ];
    let m_basis = adapted_m_basis(&modules);
    let space = HomogeneousSpace::with_bases(alg, h_basis, m_basis)?;
    let dec = decomp::from_modules(&space, modules)?;
    Ok(PresetSpace {
        name: "sp2-sp1".into(),
        space,
        dec,
        datum: Some(datum),
    })
}

/// U(4)/U(1)U(2): h = span{H_{theta3-theta4}, H_{theta1+theta2},
/// H_{theta3+theta4}} + r_{theta3-theta4}; Q = -tr on the real realisation.
fn u4_u1u2() -> Result<PresetSpace> {
    let (alg, datum) = classical_with_datum(Family::U, 4, QKind::NegativeTrace)?;
    let mut tp = DMatrix::zeros(alg.dim(), 3);
    for (k, coeffs) in [
        [0.0, 0.0, 1.0, -1.0],
        [1.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0],
    ]
    .iter()
    .enumerate()
    {
        let h = datum.dual(coeffs);
        tp.set_column(k, &(&h / h.norm()));
    }
    let r34 = datum.root_index(&[0, 0, 1, -1]).unwrap();
    let h_basis = regular_subalgebra(&alg, &datum, &tp, &[r34])?;

    let h12 = datum.dual(&[1.0, -1.0, 0.0, 0.0]);
    let h12 = &h12 / h12.norm();
    let p12 = &datum.pairs[datum.root_index(&[1, -1, 0, 0]).unwrap()];
    let p13 = &datum.pairs[datum.root_index(&[1, 0, -1, 0]).unwrap()];
    let p14 = &datum.pairs[datum.root_index(&[1, 0, 0, -1]).unwrap()];
    let p23 = &datum.pairs[datum.root_index(&[0, 1, -1, 0]).unwrap()];
    let p24 = &datum.pairs[datum.root_index(&[0, 1, 0, -1]).unwrap()];
    let modules = vec![
        DMatrix::from_columns(&[h12.clone_owned()]),
        DMatrix::from_columns(&[p12.x.clone()]),
        DMatrix::from_columns(&[p12.y.clone()]),
        DMatrix::from_columns(&[p13.x.clone(), p13.y.clone(), p14.x.clone(), p14.y.clone()]),
        DMatrix::from_columns(&[p23.x.clone(), p23.y.clone(), p24.x.clone(), p24.y.clone()]),
    ];
    let m_basis = adapted_m_basis(&modules);
    let space = HomogeneousSpace::with_bases(alg, h_basis, m_basis)?;
    let dec = decomp::from_modules(&space, modules)?;
    Ok(PresetSpace {
        name: "u4-u1u2".into(),
        space,
        dec,
        datum: Some(datum),
    })
}

/// SO(2n)/SO(3)SO(2n-4): h = span{H_{t1-t2}, H_{t3}, ..., H_{tn}} +
/// r_{t1-t2} + sum_{3<=i<j<=n} r_{ti +- tj}; m_0 = so(3) around t1+t2.
fn so_even_so3(n: usize) -> Result<PresetSpace> {
    let (alg, datum) = classical_with_datum(Family::So, 2 * n, QKind::NegativeKilling)?;
    build_so_so3(alg, datum, n, false, &format!("so{}-so3so{}", 2 * n, 2 * n - 4))
}

/// SO(2n+1)/SO(3)SO(2n-3): as above plus the short roots r_{tk}, k >= 3.
fn so_odd_so3(n: usize) -> Result<PresetSpace> {
    let (alg, datum) = classical_with_datum(Family::So, 2 * n + 1, QKind::NegativeKilling)?;
    build_so_so3(alg, datum, n, true, &format!("so{}-so3so{}", 2 * n + 1, 2 * n - 3))
}

fn build_so_so3(
    alg: CompactAlgebra,
    datum: RootDatum,
    _n: usize,
    odd: bool,
    name: &str,
) -> Result<PresetSpace> {
    let rank = datum.rank;
    let mut torus_cols = Vec::new();
    let mut coeff = vec![0.0; rank];
    coeff[0] = 1.0;
    coeff[1] = -1.0;
    let h = datum.dual(&coeff);
    torus_cols.push(&h / h.norm());
    for k in 2..rank {
        let mut c = vec![0.0; rank];
        c[k] = 1.0;
        let h = datum.dual(&c);
        torus_cols.push(&h / h.norm());
    }
    let mut tp = DMatrix::zeros(alg.dim(), torus_cols.len());
    for (k, c) in torus_cols.iter().enumerate() {
        tp.set_column(k, c);
    }
    let mut h_roots = Vec::new();
    let mut v = vec![0i32; rank];
    v[0] = 1;
    v[1] = -1;
    h_roots.push(datum.root_index(&v).unwrap());
    for i in 2..rank {
        for j in (i + 1)..rank {
            for s in [-1i32, 1] {
                let mut v = vec![0i32; rank];
                v[i] = 1;
                v[j] = s;
                h_roots.push(datum.root_index(&v).unwrap());
            }
        }
        if odd {
            let mut v = vec![0i32; rank];
            v[i] = 1;
            h_roots.push(datum.root_index(&v).unwrap());
        }
    }
    let h_basis = regular_subalgebra(&alg, &datum, &tp, &h_roots)?;

    // m_0 = span{H_{t1+t2}} + r_{t1+t2}
    let mut csum = vec![0.0; rank];
    csum[0] = 1.0;
    csum[1] = 1.0;
    let hsum = datum.dual(&csum);
    let hsum = &hsum / hsum.norm();
    let mut vsum = vec![0i32; rank];
    vsum[0] = 1;
    vsum[1] = 1;
    let psum = &datum.pairs[datum.root_index(&vsum).unwrap()];
    let mut modules = vec![
        DMatrix::from_columns(&[hsum.clone_owned()]),
        DMatrix::from_columns(&[psum.x.clone()]),
        DMatrix::from_columns(&[psum.y.clone()]),
    ];
    // the irreducible complement: all r_{t1 +- tk}, r_{t2 +- tk} (k >= 3)
    // plus r_{t1}, r_{t2} in the odd case
    let mut cols = Vec::new();
    for a in 0..2usize {
        if odd {
            let mut v = vec![0i32; rank];
            v[a] = 1;
            let p = &datum.pairs[datum.root_index(&v).unwrap()];
            cols.push(p.x.clone());
            cols.push(p.y.clone());
        }
        for k in 2..rank {
            for s in [-1i32, 1] {
                let mut v = vec![0i32; rank];
                v[a] = 1;
                v[k] = s;
                let p = &datum.pairs[datum.root_index(&v).unwrap()];
                cols.push(p.x.clone());
                cols.push(p.y.clone());
            }
        }
    }
    modules.push(DMatrix::from_columns(&cols));
    let m_basis = adapted_m_basis(&modules);
    let space = HomogeneousSpace::with_bases(alg, h_basis, m_basis)?;
    let dec = decomp::from_modules(&space, modules)?;
    Ok(PresetSpace {
        name: name.to_string(),
        space,
        dec,
        datum: Some(datum),
    })
}

/// Sp(2)xSp(2)/diag Sp(1): the product construction for gauge groups of
/// higher rank. Modules: six trivial lines from the two sp(1) slots, the
/// anti-diagonal copy of h, and the two 4-dimensional factor modules.
fn sp2xsp2_dsp1() -> Result<PresetSpace> {
    let factor = MatrixLieAlgebra::classical(Family::Sp, 2)?;
    let prod_raw = MatrixLieAlgebra::product(&[factor.clone(), factor.clone()])?;
    let q = invariant_inner_product(&prod_raw, QKind::NegativeKilling)?;
    let alg = CompactAlgebra::new(prod_raw, q)?;
    // factor data for the module layout
    let sub = sp2_sp1()?;
    let fac_alg = &sub.space.algebra;
    let md = factor.mat_dim;

    let embed = |m: &DMatrix<f64>, slot: usize| -> DMatrix<f64> {
        let total = 2 * md;
        let mut out = DMatrix::zeros(total, total);
        out.view_mut((slot * md, slot * md), (md, md)).copy_from(m);
        out
    };
    let lift = |v: &DVector<f64>, slot: usize| -> DVector<f64> {
        let m = fac_alg.matrix_of(v);
        alg.coords_of_matrix(&embed(&m, slot)).expect("embedded factor element")
    };
    // diagonal sp(1): h columns of the factor space lifted to (z, z)/sqrt2
    let mut h_cols = Vec::new();
    for j in 0..sub.space.h_basis.ncols() {
        let z = sub.space.h_basis.column(j).clone_owned();
        let v = (lift(&z, 0) + lift(&z, 1)) / 2f64.sqrt();
        h_cols.push(v);
    }
    let mut h_span = DMatrix::zeros(alg.dim(), h_cols.len());
    for (k, c) in h_cols.iter().enumerate() {
        h_span.set_column(k, c);
    }
    let h_basis = crate::la::gram_schmidt(&h_span, 1e-10);

    let mut modules: Vec<DMatrix<f64>> = Vec::new();
    // trivial lines: factor trivial modules in each slot
    for slot in 0..2 {
        for p in 0..sub.dec.trivial_count {
            let v = decomp::trivial_generator(&sub.dec, p);
            let w = lift(&v, slot);
            modules.push(DMatrix::from_columns(&[&w / w.norm()]));
        }
    }
    // anti-diagonal copy of h: (z, -z)/sqrt2, one irreducible 3-dim module
    let mut anti = Vec::new();
    for j in 0..sub.space.h_basis.ncols() {
        let z = sub.space.h_basis.column(j).clone_owned();
        let v = (lift(&z, 0) - lift(&z, 1)) / 2f64.sqrt();
        anti.push(&v / v.norm());
    }
    modules.push(DMatrix::from_columns(&anti));
    // the 4-dimensional factor modules
    for slot in 0..2 {
        let mb = sub.dec.module(sub.dec.ell() - 1);
        let mut cols = Vec::new();
        for j in 0..mb.ncols() {
            let w = lift(&mb.column(j).clone_owned(), slot);
            cols.push(&w / w.norm());
        }
        modules.push(DMatrix::from_columns(&cols));
    }
    let m_basis = adapted_m_basis(&modules);
    let space = HomogeneousSpace::with_bases(alg, h_basis, m_basis)?;
    let dec = decomp::from_modules(&space, modules)?;
    Ok(PresetSpace {
        name: "sp2xsp2-dsp1".into(),
        space,
        dec,
        datum: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_build() {
        for name in preset_names() {
            let p = build_preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(p.dec.ell() >= 1, "{name}");
        }
    }

    #[test]
    fn aloff_wallach_11_shape() {
        let p = build_preset("aloff-wallach-11").unwrap();
        assert_eq!(p.space.dim_m(), 7);
        assert_eq!(p.space.dim_h(), 1);
        assert_eq!(p.dec.dims, vec![1, 1, 1, 2, 2]);
        assert_eq!(p.dec.trivial_count, 3);
        // the two 2-dimensional modules are equivalent
        assert!(p.dec.equivalent(3, 4));
    }

    #[test]
    fn aloff_wallach_01_shape() {
        let p = build_preset("aloff-wallach-01").unwrap();
        assert_eq!(p.dec.dims, vec![1, 2, 2, 2]);
        assert_eq!(p.dec.trivial_count, 1);
        // exactly one pair of equivalent 2-dimensional modules
        let pairs: Vec<_> = p
            .dec
            .isotypic_classes
            .iter()
            .filter(|c| c.len() > 1)
            .collect();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].len(), 2);
    }

    #[test]
    fn so5_so3_shape() {
        let p = build_preset("so5-so3").unwrap();
        assert_eq!(p.space.dim_m(), 7);
        assert_eq!(p.dec.dims, vec![1, 3, 3]);
        assert_eq!(p.dec.trivial_count, 1);
        assert!(p.dec.equivalent(1, 2));
    }

    #[test]
    fn sp2_sp1_shape() {
        let p = build_preset("sp2-sp1").unwrap();
        assert_eq!(p.space.dim_m(), 7);
        assert_eq!(p.dec.dims, vec![1, 1, 1, 4]);
        assert_eq!(p.dec.trivial_count, 3);
    }

    #[test]
    fn u4_shape() {
        let p = build_preset("u4-u1u2").unwrap();
        assert_eq!(p.space.dim_m(), 11);
        assert_eq!(p.dec.dims, vec![1, 1, 1, 4, 4]);
        assert_eq!(p.dec.trivial_count, 3);
        assert!(p.dec.equivalent(3, 4));
    }

    #[test]
    fn so8_shape() {
        let p = build_preset("so8-so3so4").unwrap();
        assert_eq!(p.space.dim_m(), 19);
        assert_eq!(p.dec.dims, vec![1, 1, 1, 16]);
    }

    #[test]
    fn so7_shape() {
        let p = build_preset("so7-so3so3").unwrap();
        assert_eq!(p.space.dim_m(), 15);
        assert_eq!(p.dec.dims, vec![1, 1, 1, 12]);
    }

    #[test]
    fn product_shape() {
        let p = build_preset("sp2xsp2-dsp1").unwrap();
        assert_eq!(p.space.dim_m(), 17);
        assert_eq!(p.dec.dims, vec![1, 1, 1, 1, 1, 1, 3, 4, 4]);
        assert_eq!(p.dec.trivial_count, 6);
    }

    #[test]
    fn flag_su3_shape() {
        let p = build_preset("flag-su3").unwrap();
        assert_eq!(p.dec.dims, vec![2, 2, 2]);
        assert_eq!(p.dec.trivial_count, 0);
    }

    #[test]
    fn generic_aloff_wallach_is_monotypic() {
        let p = aloff_wallach(1, 2).unwrap();
        assert_eq!(p.dec.dims, vec![1, 2, 2, 2]);
        assert!(p.dec.isotypic_classes.iter().all(|c| c.len() == 1));
    }
}
