//! Irreducible decomposition of the isotropy representation and detection
//! of equivalent modules.
//!
//! The decomposition algorithm builds a random self-adjoint element of the
//! commutant of ad(h)|_m, eigendecomposes it and clusters eigenspaces. The
//! ordering is deterministic: trivial modules first, then by (dimension,
//! Killing coefficient, first basis column).

use crate::error::{Error, Result};
use crate::la;
use crate::space::HomogeneousSpace;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CLUSTER_GAP: f64 = 1e-7;
pub const SNAP_TOL: f64 = 1e-9;

/// An ordered Q-orthogonal decomposition of m into ad(h)-invariant modules,
/// carried by an adapted orthonormal basis of m given in frame coordinates.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// phi-adapted Q-orthonormal basis of m, columns in frame coordinates.
    pub basis: DMatrix<f64>,
    /// Column ranges of the modules m_1..m_ell inside `basis`.
    pub ranges: Vec<(usize, usize)>,
    pub dims: Vec<usize>,
    /// Number of leading 1-dimensional trivial modules (ell_0).
    pub trivial_count: usize,
    /// Partition of module indices into isotypic classes.
    pub isotypic_classes: Vec<Vec<usize>>,
}

impl Decomposition {
    pub fn ell(&self) -> usize {
        self.ranges.len()
    }

    /// Columns of module i as a matrix (frame coordinates).
    pub fn module(&self, i: usize) -> DMatrix<f64> {
        let (s, e) = self.ranges[i];
        let mut out = DMatrix::zeros(self.basis.nrows(), e - s);
        for (k, j) in (s..e).enumerate() {
            out.set_column(k, &self.basis.column(j));
        }
        out
    }

    /// Module index containing adapted-basis column `col`.
    pub fn module_of_column(&self, col: usize) -> usize {
        self.ranges
            .iter()
            .position(|&(s, e)| col >= s && col < e)
            .expect("column inside some module")
    }

    /// True when modules i and j belong to the same isotypic class.
    pub fn equivalent(&self, i: usize, j: usize) -> bool {
        self.isotypic_classes
            .iter()
            .any(|c| c.contains(&i) && c.contains(&j))
    }
}

/// ad(h) generators expressed on the columns of `basis`.
fn generators_on(space: &HomogeneousSpace, basis: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
    (0..space.dim_h())
        .map(|a| {
            let z = space.h_basis.column(a).clone_owned();
            let full = space.algebra.ad_of(&z);
            basis.transpose() * full * basis
        })
        .collect()
}

/// Orthonormal basis of the space of symmetric matrices commuting with all
/// `gens`, as vectorised symmetric matrices.
fn symmetric_commutant(gens: &[DMatrix<f64>], m: usize) -> Vec<DMatrix<f64>> {
    // parametrise symmetric matrices by their upper triangle
    let nsym = m * (m + 1) / 2;
    let mut rows = Vec::new();
    let mut sym_basis = Vec::with_capacity(nsym);
    for i in 0..m {
        for j in i..m {
            let mut s = DMatrix::zeros(m, m);
            if i == j {
                s[(i, i)] = 1.0;
            } else {
                let v = 1.0 / std::f64::consts::SQRT_2;
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
            sym_basis.push(s);
        }
    }
    for g in gens {
        // row block: vec(S G - G S) as linear function of sym coords
        let mut block = DMatrix::zeros(m * m, nsym);
        for (k, s) in sym_basis.iter().enumerate() {
            let c = s * g - g * s;
            for (idx, v) in c.iter().enumerate() {
                block[(idx, k)] = *v;
            }
        }
        rows.push(block);
    }
    let total_rows: usize = rows.iter().map(|b| b.nrows()).sum();
    let stacked = if rows.is_empty() {
        DMatrix::zeros(1, nsym)
    } else {
        let mut st = DMatrix::zeros(total_rows, nsym);
        let mut off = 0;
        for b in rows {
            st.view_mut((off, 0), (b.nrows(), b.ncols())).copy_from(&b);
            off += b.nrows();
        }
        st
    };
    let ns = la::null_space(&stacked, 1e-9);
    (0..ns.ncols())
        .map(|j| {
            let mut s = DMatrix::zeros(m, m);
            for (k, sb) in sym_basis.iter().enumerate() {
                s += sb * ns[(k, j)];
            }
            s
        })
        .collect()
}

/// Dimension of the space of intertwiners L with L ad(z)|_i = ad(z)|_j L,
/// plus the decision margin (smallest singular value above / largest below
/// the tolerance).
pub fn intertwiner_dimension(
    space: &HomogeneousSpace,
    basis_i: &DMatrix<f64>,
    basis_j: &DMatrix<f64>,
) -> (usize, f64) {
    let di = basis_i.ncols();
    let dj = basis_j.ncols();
    let na = space.dim_h();
    if na == 0 {
        return (di * dj, f64::INFINITY);
    }
    let mut stacked: DMatrix<f64> = DMatrix::zeros(na * di * dj, di * dj);
    for a in 0..na {
        let z = space.h_basis.column(a).clone_owned();
        let full = space.algebra.ad_of(&z);
        let ai = basis_i.transpose() * &full * basis_i;
        let aj = basis_j.transpose() * &full * basis_j;
        // vec(L ai - aj L) = (ai^T (x) I - I (x) aj) vec(L)
        let mut block: DMatrix<f64> = DMatrix::zeros(di * dj, di * dj);
        // vec is column-major: L is dj x di
        for p in 0..di {
            for q in 0..di {
                // (ai^T (x) I): block (p,q) scaled identity ai[(q,p)]
                for r in 0..dj {
                    block[(p * dj + r, q * dj + r)] += ai[(q, p)];
                }
            }
        }
        for r in 0..dj {
            for s in 0..dj {
                for p in 0..di {
                    block[(p * dj + r, p * dj + s)] -= aj[(r, s)];
                }
            }
        }
        stacked
            .view_mut((a * di * dj, 0), (di * dj, di * dj))
            .copy_from(&block);
    }
    let svd = stacked.svd(false, false);
    let tol: f64 = 1e-8;
    let mut count = 0;
    let mut nearest = f64::INFINITY;
    for s in svd.singular_values.iter() {
        let sv: f64 = *s;
        if sv < tol {
            count += 1;
        }
        let margin = (sv - tol).abs();
        if margin < nearest {
            nearest = margin;
        }
    }
    (count, nearest)
}

/// Irreducibility certificate: the symmetric commutant of ad(h) restricted
/// to the module is spanned by the identity alone.
pub fn is_irreducible(space: &HomogeneousSpace, module_basis: &DMatrix<f64>) -> bool {
    let gens = generators_on_module(space, module_basis);
    let comm = symmetric_commutant(&gens, module_basis.ncols());
    comm.len() == 1
}

fn generators_on_module(space: &HomogeneousSpace, module_basis: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
    (0..space.dim_h())
        .map(|a| {
            let z = space.h_basis.column(a).clone_owned();
            let full = space.algebra.ad_of(&z);
            module_basis.transpose() * full * module_basis
        })
        .collect()
}

fn killing_coefficient(space: &HomogeneousSpace, module: &DMatrix<f64>) -> Result<f64> {
    let nk = &space.algebra.neg_killing;
    let restricted = module.transpose() * nk * module;
    let d = module.ncols();
    let b = restricted.trace() / d as f64;
    let residual = (&restricted - DMatrix::identity(d, d) * b).amax();
    if residual > 1e-8 {
        return Err(Error::structure(
            "Killing form is not proportional to Q on a module",
        ));
    }
    Ok(la::snap(b, SNAP_TOL))
}

/// Splits m into irreducible ad(h)-modules using a seeded random commutant
/// element, orders them deterministically and certifies irreducibility.
pub fn decompose_isotropy(space: &HomogeneousSpace, seed: u64) -> Result<Decomposition> {
    let m = space.dim_m();
    let gens = generators_on(space, &space.m_basis);
    let comm = symmetric_commutant(&gens, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = DMatrix::zeros(m, m);
    for c in &comm {
        let g: f64 = rng.gen::<f64>() * 2.0 - 1.0;
        s += c * g;
    }
    let eig = s.symmetric_eigen();
    // sort eigenpairs
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    // cluster by eigenvalue gap
    let scale = eig.eigenvalues.amax().max(1.0);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        let ev = eig.eigenvalues[idx];
        match clusters.last_mut() {
            Some(cl) if (ev - eig.eigenvalues[*cl.last().unwrap()]).abs() < CLUSTER_GAP * scale => {
                cl.push(idx)
            }
            _ => clusters.push(vec![idx]),
        }
    }
    // build module bases in m-coordinates, then frame coordinates
    let mut modules: Vec<DMatrix<f64>> = Vec::new();
    for cl in &clusters {
        let mut mm = DMatrix::zeros(m, cl.len());
        for (k, &idx) in cl.iter().enumerate() {
            mm.set_column(k, &eig.eigenvectors.column(idx));
        }
        modules.push(&space.m_basis * mm);
    }
    // certify invariance + irreducibility
    for mb in &modules {
        for a in 0..space.dim_h() {
            let z = space.h_basis.column(a).clone_owned();
            let full = space.algebra.ad_of(&z);
            let image = &full * mb;
            let proj = mb * (mb.transpose() * &image);
            if la::max_abs_diff(&proj, &image) > 1e-8 {
                return Err(Error::numerical(
                    "decomposition unresolved, lower tolerance",
                ));
            }
        }
        if !is_irreducible(space, mb) {
            return Err(Error::numerical(
                "decomposition unresolved, lower tolerance",
            ));
        }
    }
    from_modules(space, modules)
}

/// Assembles and orders a `Decomposition` from invariant module bases given
/// in frame coordinates. Used both by `decompose_isotropy` and by presets
/// that carry canonical modules.
pub fn from_modules(
    space: &HomogeneousSpace,
    modules: Vec<DMatrix<f64>>,
) -> Result<Decomposition> {
    struct Entry {
        basis: DMatrix<f64>,
        trivial: bool,
        dim: usize,
        b: f64,
        first_col: usize,
    }
    let mut entries = Vec::new();
    for (pos, mb) in modules.into_iter().enumerate() {
        let trivial = (0..space.dim_h()).all(|a| {
            let z = space.h_basis.column(a).clone_owned();
            let full = space.algebra.ad_of(&z);
            (&full * &mb).amax() < 1e-9
        });
        let b = killing_coefficient(space, &mb)?;
        entries.push(Entry {
            dim: mb.ncols(),
            basis: mb,
            trivial,
            b,
            first_col: pos,
        });
    }
    // trivial 1-dimensional modules first, then (d, b, position); the
    // Killing coefficient is quantized so ties cannot be broken by
    // floating-point noise
    let qb = |v: f64| (v * 1e9).round() as i64;
    entries.sort_by(|x, y| {
        let tx = !(x.trivial && x.dim == 1);
        let ty = !(y.trivial && y.dim == 1);
        tx.cmp(&ty)
            .then(x.dim.cmp(&y.dim))
            .then(qb(x.b).cmp(&qb(y.b)))
            .then(x.first_col.cmp(&y.first_col))
    });
    let m = space.dim_m();
    let total: usize = entries.iter().map(|e| e.dim).sum();
    if total != m {
        return Err(Error::structure("modules do not span m"));
    }
    let mut basis = DMatrix::zeros(space.algebra.dim(), m);
    let mut ranges = Vec::new();
    let mut dims = Vec::new();
    let mut col = 0;
    let mut trivial_count = 0;
    for e in &entries {
        ranges.push((col, col + e.dim));
        dims.push(e.dim);
        for k in 0..e.dim {
            basis.set_column(col + k, &e.basis.column(k));
        }
        col += e.dim;
        if e.trivial && e.dim == 1 {
            trivial_count += 1;
        }
    }
    // orthogonality across modules
    for i in 0..m {
        for j in (i + 1)..m {
            if basis.column(i).dot(&basis.column(j)).abs() > 1e-9 {
                return Err(Error::structure("modules are not pairwise Q-orthogonal"));
            }
        }
    }
    let mut dec = Decomposition {
        basis,
        ranges,
        dims,
        trivial_count,
        isotypic_classes: Vec::new(),
    };
    dec.isotypic_classes = detect_equivalences(space, &dec);
    Ok(dec)
}

/// Isotypic classes via the dimension of the intertwiner space. Valid for
/// connected H, where the infinitesimal criterion decides equivalence.
pub fn detect_equivalences(space: &HomogeneousSpace, dec: &Decomposition) -> Vec<Vec<usize>> {
    let ell = dec.ell();
    let mut class_of: Vec<Option<usize>> = vec![None; ell];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..ell {
        if class_of[i].is_some() {
            continue;
        }
        let ci = classes.len();
        classes.push(vec![i]);
        class_of[i] = Some(ci);
        for j in (i + 1)..ell {
            if class_of[j].is_some() || dec.dims[i] != dec.dims[j] {
                continue;
            }
            let (dim, _) = intertwiner_dimension(space, &dec.module(i), &dec.module(j));
            if dim > 0 {
                classes[ci].push(j);
                class_of[j] = Some(ci);
            }
        }
    }
    classes
}

/// The trivial submodule m_0 = modules 1..ell_0 as one basis (frame coords).
pub fn trivial_submodule(dec: &Decomposition) -> DMatrix<f64> {
    let n = dec.basis.nrows();
    let cols = dec.trivial_count;
    let mut out = DMatrix::zeros(n, cols);
    for j in 0..cols {
        out.set_column(j, &dec.basis.column(j));
    }
    out
}

/// Unit generator V_p of the p-th trivial module (frame coordinates).
pub fn trivial_generator(dec: &Decomposition, p: usize) -> DVector<f64> {
    assert!(p < dec.trivial_count);
    let (s, _) = dec.ranges[p];
    dec.basis.column(s).clone_owned()
}
