//! Root-space decompositions and real Cartan–Weyl bases of the classical
//! compact algebras, relative to the standard diagonal torus.
//!
//! Roots are stored as integer coefficient vectors in the theta coordinates
//! of the standard torus. Real root vector pairs (X_a, Y_a) are built from
//! canonical complex root vectors (matrix units per family), which keeps all
//! bracket coefficients n_{a,b} real and the bracket pattern coherent across
//! the whole root system. The orientation is fixed so that
//! [H, X_a] = +a(H) Y_a for every H in the torus.

use crate::algebra::{CompactAlgebra, Family, FamilyTag};
use crate::error::{Error, Result};
use crate::la;
use nalgebra::{DMatrix, DVector};
use std::collections::HashMap;

pub const ROOT_TOL: f64 = 1e-9;

pub type RootVec = Vec<i32>;

/// A signed root: coefficient vector of the underlying positive root plus a
/// sign. Used when checking the antisymmetry identities of the bracket
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedRoot {
    pub index: usize,
    pub positive: bool,
}

#[derive(Debug, Clone)]
pub struct RootPair {
    /// Frame coordinates of X_a, Q-orthonormal.
    pub x: DVector<f64>,
    /// Frame coordinates of Y_a, Q-orthonormal.
    pub y: DVector<f64>,
}

/// Root datum of a compact classical algebra with respect to the standard
/// diagonal torus.
#[derive(Debug, Clone)]
pub struct RootDatum {
    pub family: Family,
    pub n: usize,
    /// Number of theta coordinates.
    pub rank: usize,
    /// Q-orthonormal basis of the maximal torus t, columns in frame coords.
    pub cartan: DMatrix<f64>,
    /// theta coordinates of frame vectors: theta = extract * coords, valid
    /// for vectors lying in t.
    theta_extract: DMatrix<f64>,
    pub positive_roots: Vec<RootVec>,
    pub pairs: Vec<RootPair>,
    index: HashMap<RootVec, usize>,
}

fn positive_roots_for(family: Family, n: usize) -> (usize, Vec<RootVec>) {
    let mut roots = Vec::new();
    match family {
        Family::Su | Family::U => {
            let rank = n;
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut v = vec![0i32; rank];
                    v[i] = 1;
                    v[j] = -1;
                    roots.push(v);
                }
            }
            (rank, roots)
        }
        Family::So => {
            let rank = n / 2;
            for i in 0..rank {
                for j in (i + 1)..rank {
                    let mut v = vec![0i32; rank];
                    v[i] = 1;
                    v[j] = -1;
                    roots.push(v);
                    let mut w = vec![0i32; rank];
                    w[i] = 1;
                    w[j] = 1;
                    roots.push(w);
                }
            }
            if n % 2 == 1 {
                for k in 0..rank {
                    let mut v = vec![0i32; rank];
                    v[k] = 1;
                    roots.push(v);
                }
            }
            (rank, roots)
        }
        Family::Sp => {
            let rank = n;
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut v = vec![0i32; rank];
                    v[i] = 1;
                    v[j] = -1;
                    roots.push(v);
                    let mut w = vec![0i32; rank];
                    w[i] = 1;
                    w[j] = 1;
                    roots.push(w);
                }
            }
            for k in 0..n {
                let mut v = vec![0i32; rank];
                v[k] = 2;
                roots.push(v);
            }
            (rank, roots)
        }
    }
}

// -- complex matrices as (re, im) pairs -------------------------------------

#[derive(Clone)]
struct CMat {
    re: DMatrix<f64>,
    im: DMatrix<f64>,
}

impl CMat {
    fn zeros(n: usize) -> Self {
        CMat {
            re: DMatrix::zeros(n, n),
            im: DMatrix::zeros(n, n),
        }
    }
    fn unit(n: usize, r: usize, c: usize) -> Self {
        let mut m = Self::zeros(n);
        m.re[(r, c)] = 1.0;
        m
    }
    fn add(&self, other: &CMat) -> CMat {
        CMat {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }
    fn sub(&self, other: &CMat) -> CMat {
        CMat {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
        }
    }
    fn dagger(&self) -> CMat {
        CMat {
            re: self.re.transpose(),
            im: -self.im.transpose(),
        }
    }
    fn times_i(&self) -> CMat {
        CMat {
            re: -self.im.clone(),
            im: self.re.clone(),
        }
    }
    fn scale(&self, s: f64) -> CMat {
        CMat {
            re: &self.re * s,
            im: &self.im * s,
        }
    }
    /// Real 2m x 2m realisation matching `algebra::complex_entry`.
    fn realify(&self) -> DMatrix<f64> {
        let m = self.re.nrows();
        let mut out = DMatrix::zeros(2 * m, 2 * m);
        for r in 0..m {
            for c in 0..m {
                let a = self.re[(r, c)];
                let b = self.im[(r, c)];
                out[(2 * r, 2 * c)] = a;
                out[(2 * r + 1, 2 * c + 1)] = a;
                out[(2 * r, 2 * c + 1)] = -b;
                out[(2 * r + 1, 2 * c)] = b;
            }
        }
        out
    }
}

/// Skew matrix with +1 at (i, j) and -1 at (j, i).
fn so_unit(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m[(j, i)] = -1.0;
    m
}

/// Raw real matrices (X_a, Y_a) of the unnormalised real root vectors of the
/// positive root `alpha`, per family. E_a = X - iY is the corresponding
/// complex root vector; matrix-unit constructions keep the bracket
/// coefficients real across the root system.
fn raw_root_pair(family: Family, n: usize, alpha: &[i32]) -> (DMatrix<f64>, DMatrix<f64>) {
    let support: Vec<usize> = alpha
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, _)| i)
        .collect();
    match family {
        Family::Su | Family::U => {
            let (a, b) = (support[0], support[1]);
            let e = CMat::unit(n, a, b);
            let x = e.sub(&e.dagger()).scale(0.5);
            let y = e.add(&e.dagger()).times_i().scale(0.5);
            (x.realify(), y.realify())
        }
        Family::So => {
            if support.len() == 2 {
                let (a, b) = (support[0], support[1]);
                if alpha[b] < 0 {
                    // theta_a - theta_b
                    let x = so_unit(n, 2 * a, 2 * b) + so_unit(n, 2 * a + 1, 2 * b + 1);
                    let y = so_unit(n, 2 * a, 2 * b + 1) - so_unit(n, 2 * a + 1, 2 * b);
                    (x, y)
                } else {
                    // theta_a + theta_b
                    let x = so_unit(n, 2 * a, 2 * b) - so_unit(n, 2 * a + 1, 2 * b + 1);
                    let y = -(so_unit(n, 2 * a, 2 * b + 1) + so_unit(n, 2 * a + 1, 2 * b));
                    (x, y)
                }
            } else {
                // theta_a, odd dimension: last coordinate index n-1
                let a = support[0];
                let x = so_unit(n, 2 * a, n - 1);
                let y = -so_unit(n, 2 * a + 1, n - 1);
                (x, y)
            }
        }
        Family::Sp => {
            // complex 2n x 2n picture with interleaved symplectic pairs
            let m = 2 * n;
            let e = if support.len() == 2 {
                let (a, b) = (support[0], support[1]);
                if alpha[b] < 0 {
                    // theta_a - theta_b
                    CMat::unit(m, 2 * a, 2 * b).sub(&CMat::unit(m, 2 * b + 1, 2 * a + 1))
                } else {
                    // theta_a + theta_b
                    CMat::unit(m, 2 * a, 2 * b + 1).add(&CMat::unit(m, 2 * b, 2 * a + 1))
                }
            } else {
                // 2 theta_a
                let a = support[0];
                CMat::unit(m, 2 * a, 2 * a + 1)
            };
            let x = e.sub(&e.dagger()).scale(0.5);
            let y = e.add(&e.dagger()).times_i().scale(0.5);
            (x.realify(), y.realify())
        }
    }
}

/// Torus generator matrices and the map reading theta coordinates off a
/// realised matrix, per family.
fn torus_generators(family: Family, n: usize, mat_dim: usize) -> Vec<DMatrix<f64>> {
    match family {
        Family::So => (0..n / 2).map(|k| so_unit(mat_dim, 2 * k, 2 * k + 1)).collect(),
        Family::Su => {
            // traceless combinations i(E_kk - E_{k+1,k+1})
            (0..n - 1)
                .map(|k| {
                    let mut m = CMat::zeros(n);
                    m.im[(k, k)] = 1.0;
                    m.im[(k + 1, k + 1)] = -1.0;
                    m.realify()
                })
                .collect()
        }
        Family::U => (0..n)
            .map(|k| {
                let mut m = CMat::zeros(n);
                m.im[(k, k)] = 1.0;
                m.realify()
            })
            .collect(),
        Family::Sp => (0..n)
            .map(|k| {
                let mut m = CMat::zeros(2 * n);
                m.im[(2 * k, 2 * k)] = 1.0;
                m.im[(2 * k + 1, 2 * k + 1)] = -1.0;
                m.realify()
            })
            .collect(),
    }
}

fn theta_entry_positions(family: Family, n: usize) -> Vec<(usize, usize)> {
    match family {
        Family::So => (0..n / 2).map(|k| (2 * k, 2 * k + 1)).collect(),
        Family::Su | Family::U => (0..n).map(|k| (2 * k + 1, 2 * k)).collect(),
        Family::Sp => (0..n).map(|k| (4 * k + 1, 4 * k)).collect(),
    }
}

impl RootDatum {
    /// Builds the root datum of a compact classical algebra with respect to
    /// the standard diagonal torus.
    pub fn build(alg: &CompactAlgebra) -> Result<Self> {
        let (family, n) = match alg.raw.family {
            FamilyTag::Classical { family, n } => (family, n),
            _ => {
                return Err(Error::config(
                    "root datum construction requires a classical algebra",
                ))
            }
        };
        let (rank, positive_roots) = positive_roots_for(family, n);

        // theta extraction: linear in frame coordinates
        let positions = theta_entry_positions(family, n);
        let mut theta_extract = DMatrix::zeros(rank, alg.dim());
        for (i, basis_mat) in alg.on_basis.iter().enumerate() {
            for (k, &(r, c)) in positions.iter().enumerate().take(rank) {
                theta_extract[(k, i)] = basis_mat[(r, c)];
            }
        }
        // cartan basis from torus generators, Q-Gram-Schmidt in frame coords
        let gens = torus_generators(family, n, alg.raw.mat_dim);
        let mut gen_coords = DMatrix::zeros(alg.dim(), gens.len());
        for (j, g) in gens.iter().enumerate() {
            gen_coords.set_column(j, &alg.coords_of_matrix(g)?);
        }
        let cartan = la::gram_schmidt(&gen_coords, 1e-10);
        // maximality / abelianity sanity: [t, t] = 0
        for i in 0..cartan.ncols() {
            for j in (i + 1)..cartan.ncols() {
                let br = alg.bracket(&cartan.column(i).clone_owned(), &cartan.column(j).clone_owned());
                if br.amax() > ROOT_TOL {
                    return Err(Error::structure("cartan choice is not abelian"));
                }
            }
        }

        let mut pairs = Vec::with_capacity(positive_roots.len());
        for alpha in &positive_roots {
            let (xm, ym) = raw_root_pair(family, n, alpha);
            let x_raw = alg.coords_of_matrix(&xm)?;
            let y_raw = alg.coords_of_matrix(&ym)?;
            let nx = x_raw.norm();
            let ny = y_raw.norm();
            if (nx - ny).abs() > 1e-9 * nx.max(1.0) {
                return Err(Error::structure("root pair has unequal Q-norms"));
            }
            if x_raw.dot(&y_raw).abs() > 1e-9 * nx * ny {
                return Err(Error::structure("root pair is not Q-orthogonal"));
            }
            pairs.push(RootPair {
                x: x_raw / nx,
                y: y_raw / ny,
            });
        }

        let index: HashMap<RootVec, usize> = positive_roots
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, r)| (r, i))
            .collect();

        let datum = RootDatum {
            family,
            n,
            rank,
            cartan,
            theta_extract,
            positive_roots,
            pairs,
            index,
        };
        datum.validate(alg)?;
        Ok(datum)
    }

    /// theta coordinates of a frame vector lying in t.
    pub fn theta_of(&self, h: &DVector<f64>) -> DVector<f64> {
        &self.theta_extract * h
    }

    /// Evaluates the functional with theta coefficients `coeffs` on `h` in t.
    pub fn eval(&self, coeffs: &[f64], h: &DVector<f64>) -> f64 {
        let th = self.theta_of(h);
        coeffs.iter().zip(th.iter()).map(|(c, t)| c * t).sum()
    }

    /// Q-dual vector in t of the functional with theta coefficients `coeffs`.
    pub fn dual(&self, coeffs: &[f64]) -> DVector<f64> {
        // On the Q-orthonormal cartan columns c_k the functional has values
        // v_k = eval(coeffs, c_k); the dual is sum_k v_k c_k.
        let r = self.cartan.ncols();
        let mut out = DVector::zeros(self.cartan.nrows());
        for k in 0..r {
            let ck = self.cartan.column(k).clone_owned();
            out += &ck * self.eval(coeffs, &ck);
        }
        out
    }

    pub fn root_index(&self, alpha: &[i32]) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    /// Whether the integer vector is a positive root.
    pub fn is_positive_root(&self, v: &[i32]) -> bool {
        self.index.contains_key(v)
    }

    /// n_{a,b} for signed roots, with the Weyl sign convention used in the
    /// antisymmetry identities: the coefficient of the complex root vector
    /// E_{a+b} in [E_a, E_b], halved, with E_{-a} := -conj(E_a).
    pub fn n_signed(&self, alg: &CompactAlgebra, a: SignedRoot, b: SignedRoot) -> f64 {
        let gamma = self.signed_sum(a, b);
        let gamma = match gamma {
            Some(g) => g,
            None => return 0.0,
        };
        // complex vectors: E_{+a} = X - iY, E_{-a} = -(X + iY)
        let (ax, ay) = self.signed_parts(a);
        let (bx, by) = self.signed_parts(b);
        // [ax + i ay, bx + i by] = ([ax,bx] - [ay,by]) + i([ax,by] + [ay,bx])
        let re = alg.bracket(&ax, &bx) - alg.bracket(&ay, &by);
        let im = alg.bracket(&ax, &by) + alg.bracket(&ay, &bx);
        // coefficient of E_gamma: <Z, conj(E_gamma)> / <E_gamma, conj(E_gamma)>
        // with the bilinear extension of Q; <E_g, conj(E_g)> = 2.
        let (gx, gy) = self.signed_parts(gamma);
        // conj(E_gamma) has parts (gx, -gy)
        let coeff_re = re.dot(&gx) + im.dot(&gy);
        let _coeff_im = im.dot(&gx) - re.dot(&gy);
        coeff_re / 4.0
    }

    /// Complex parts (re, im) of the signed root vector E_a = re + i im,
    /// with the Weyl convention E_{-a} = -conj(E_{+a}).
    fn signed_parts(&self, a: SignedRoot) -> (DVector<f64>, DVector<f64>) {
        let p = &self.pairs[a.index];
        if a.positive {
            (p.x.clone(), -p.y.clone())
        } else {
            (-p.x.clone(), -p.y.clone())
        }
    }

    fn signed_sum(&self, a: SignedRoot, b: SignedRoot) -> Option<SignedRoot> {
        let sa: i32 = if a.positive { 1 } else { -1 };
        let sb: i32 = if b.positive { 1 } else { -1 };
        let va = &self.positive_roots[a.index];
        let vb = &self.positive_roots[b.index];
        let sum: Vec<i32> = va
            .iter()
            .zip(vb.iter())
            .map(|(x, y)| sa * x + sb * y)
            .collect();
        if let Some(i) = self.root_index(&sum) {
            return Some(SignedRoot {
                index: i,
                positive: true,
            });
        }
        let neg: Vec<i32> = sum.iter().map(|v| -v).collect();
        self.root_index(&neg).map(|i| SignedRoot {
            index: i,
            positive: false,
        })
    }

    /// n_{a,b} for positive roots a, b with a + b a positive root; zero
    /// otherwise. Snapped below the root tolerance.
    pub fn n_coefficient(&self, alg: &CompactAlgebra, a: usize, b: usize) -> f64 {
        let v = self.n_signed(
            alg,
            SignedRoot {
                index: a,
                positive: true,
            },
            SignedRoot {
                index: b,
                positive: true,
            },
        );
        la::snap(v, ROOT_TOL)
    }

    fn validate(&self, alg: &CompactAlgebra) -> Result<()> {
        // orthonormality of the emitted Cartan-Weyl basis
        let mut cols: Vec<DVector<f64>> = Vec::new();
        for j in 0..self.cartan.ncols() {
            cols.push(self.cartan.column(j).clone_owned());
        }
        for p in &self.pairs {
            cols.push(p.x.clone());
            cols.push(p.y.clone());
        }
        if cols.len() != alg.dim() {
            return Err(Error::structure(
                "Cartan-Weyl basis does not span the algebra",
            ));
        }
        for i in 0..cols.len() {
            for j in i..cols.len() {
                let d = cols[i].dot(&cols[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                if (d - want).abs() > 1e-12 {
                    return Err(Error::structure("Cartan-Weyl basis not Q-orthonormal"));
                }
            }
        }
        // sign convention [H, X_a] = +a(H) Y_a, [H, Y_a] = -a(H) X_a
        for (ri, alpha) in self.positive_roots.iter().enumerate() {
            let coeffs: Vec<f64> = alpha.iter().map(|&c| c as f64).collect();
            for k in 0..self.cartan.ncols() {
                let h = self.cartan.column(k).clone_owned();
                let av = self.eval(&coeffs, &h);
                let bx = alg.bracket(&h, &self.pairs[ri].x);
                let by = alg.bracket(&h, &self.pairs[ri].y);
                let rx = (&bx - &self.pairs[ri].y * av).amax();
                let ry = (&by + &self.pairs[ri].x * av).amax();
                if rx > ROOT_TOL || ry > ROOT_TOL {
                    return Err(Error::structure(format!(
                        "root {:?} violates the sign convention (residual {:.2e}/{:.2e})",
                        alpha, rx, ry
                    )));
                }
            }
        }
        Ok(())
    }

    /// Verifies the full bracket pattern of the real Cartan-Weyl basis: the
    /// bracket of two root-pair vectors decomposes along the root spaces of
    /// a+b and |a-b| (and t for a = b) with a single coefficient family.
    /// Returns the maximum residual.
    pub fn bracket_pattern_residual(&self, alg: &CompactAlgebra) -> f64 {
        let mut worst: f64 = 0.0;
        let nr = self.positive_roots.len();
        for a in 0..nr {
            for b in 0..nr {
                if a == b {
                    continue;
                }
                let sp = SignedRoot {
                    index: a,
                    positive: true,
                };
                let sq = SignedRoot {
                    index: b,
                    positive: true,
                };
                let n_ab = self.n_signed(alg, sp, sq);
                let n_a_minus_b = self.n_signed(
                    alg,
                    sp,
                    SignedRoot {
                        index: b,
                        positive: false,
                    },
                );
                // expected brackets per the real pattern
                let pa = &self.pairs[a];
                let pb = &self.pairs[b];
                let sum = self.signed_sum(sp, sq);
                let dif = self.signed_sum(
                    sp,
                    SignedRoot {
                        index: b,
                        positive: false,
                    },
                );
                let sgn = match dif {
                    Some(d) => {
                        if d.positive {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                    None => 0.0,
                };
                let mut expect_xx = DVector::zeros(alg.dim());
                let mut expect_xy = DVector::zeros(alg.dim());
                let mut expect_yy = DVector::zeros(alg.dim());
                if let Some(s) = sum {
                    let ps = &self.pairs[s.index];
                    expect_xx += &ps.x * n_ab;
                    expect_xy += &ps.y * n_ab;
                    expect_yy += &ps.x * (-n_ab);
                }
                if let Some(d) = dif {
                    let pd = &self.pairs[d.index];
                    expect_xx += &pd.x * (-sgn * n_a_minus_b);
                    expect_xy += &pd.y * n_a_minus_b;
                    expect_yy += &pd.x * (-sgn * n_a_minus_b);
                }
                worst = worst.max((alg.bracket(&pa.x, &pb.x) - &expect_xx).amax());
                worst = worst.max((alg.bracket(&pa.x, &pb.y) - &expect_xy).amax());
                worst = worst.max((alg.bracket(&pa.y, &pb.y) - &expect_yy).amax());
            }
        }
        worst
    }
}

/// Checks closure of a set of positive roots: for any a, b in the subset,
/// a+b or a-b being a positive root forces membership in the subset.
pub fn root_subset_closed(datum: &RootDatum, subset: &[usize]) -> bool {
    let inset: std::collections::HashSet<usize> = subset.iter().copied().collect();
    for &a in subset {
        for &b in subset {
            let va = &datum.positive_roots[a];
            let vb = &datum.positive_roots[b];
            for sign in [1i32, -1] {
                let comb: Vec<i32> = va
                    .iter()
                    .zip(vb.iter())
                    .map(|(x, y)| x + sign * y)
                    .collect();
                if let Some(i) = datum.root_index(&comb) {
                    if !inset.contains(&i) {
                        return false;
                    }
                }
                let neg: Vec<i32> = comb.iter().map(|v| -v).collect();
                if let Some(i) = datum.root_index(&neg) {
                    if !inset.contains(&i) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Basis of a regular subalgebra h = t' + sum of root spaces, as columns in
/// frame coordinates. `torus_part` columns must lie in t; `root_subset`
/// must be closed. Bracket closure of the result is verified numerically.
pub fn regular_subalgebra(
    alg: &CompactAlgebra,
    datum: &RootDatum,
    torus_part: &DMatrix<f64>,
    root_subset: &[usize],
) -> Result<DMatrix<f64>> {
    // torus part inside t
    for j in 0..torus_part.ncols() {
        let v = torus_part.column(j).clone_owned();
        let mut proj = DVector::zeros(v.len());
        for k in 0..datum.cartan.ncols() {
            let c = datum.cartan.column(k).clone_owned();
            proj += &c * c.dot(&v);
        }
        if (&proj - &v).amax() > 1e-9 * v.amax().max(1.0) {
            return Err(Error::structure("torus part is not inside t"));
        }
    }
    if !root_subset_closed(datum, root_subset) {
        return Err(Error::structure("root subset not closed"));
    }
    let mut cols = Vec::new();
    for j in 0..torus_part.ncols() {
        cols.push(torus_part.column(j).clone_owned());
    }
    for &r in root_subset {
        cols.push(datum.pairs[r].x.clone());
        cols.push(datum.pairs[r].y.clone());
    }
    let mut m = DMatrix::zeros(alg.dim(), cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    let h = la::gram_schmidt(&m, 1e-10);
    if h.ncols() != cols.len() {
        return Err(Error::structure("subalgebra basis degenerate"));
    }
    // bracket closure
    for i in 0..h.ncols() {
        for j in (i + 1)..h.ncols() {
            let br = alg.bracket(&h.column(i).clone_owned(), &h.column(j).clone_owned());
            let mut proj = DVector::zeros(br.len());
            for k in 0..h.ncols() {
                let c = h.column(k).clone_owned();
                proj += &c * c.dot(&br);
            }
            if (&proj - &br).amax() > ROOT_TOL {
                return Err(Error::structure(
                    "subalgebra not closed under the bracket (torus part may miss a coroot)",
                ));
            }
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{invariant_inner_product, MatrixLieAlgebra, QKind};

    fn datum_for(family: Family, n: usize, kind: QKind) -> (CompactAlgebra, RootDatum) {
        let raw = MatrixLieAlgebra::classical(family, n).unwrap();
        let q = invariant_inner_product(&raw, kind).unwrap();
        let alg = CompactAlgebra::new(raw, q).unwrap();
        let datum = RootDatum::build(&alg).unwrap();
        (alg, datum)
    }

    #[test]
    fn su3_has_three_positive_roots() {
        let (_, d) = datum_for(Family::Su, 3, QKind::NegativeKilling);
        assert_eq!(d.positive_roots.len(), 3);
        assert!(d.is_positive_root(&[1, -1, 0]));
        assert!(d.is_positive_root(&[1, 0, -1]));
        assert!(d.is_positive_root(&[0, 1, -1]));
    }

    #[test]
    fn so5_root_table() {
        let (_, d) = datum_for(Family::So, 5, QKind::NegativeKilling);
        assert_eq!(d.positive_roots.len(), 4);
        assert!(d.is_positive_root(&[1, -1]));
        assert!(d.is_positive_root(&[1, 1]));
        assert!(d.is_positive_root(&[1, 0]));
        assert!(d.is_positive_root(&[0, 1]));
    }

    #[test]
    fn sp2_roots_and_vanishing_n() {
        let (alg, d) = datum_for(Family::Sp, 2, QKind::NegativeKilling);
        assert_eq!(d.positive_roots.len(), 4);
        assert!(d.is_positive_root(&[2, 0]));
        assert!(d.is_positive_root(&[0, 2]));
        // n_{a,b} = 0 whenever a+b is not a root
        let i20 = d.root_index(&[2, 0]).unwrap();
        let i02 = d.root_index(&[0, 2]).unwrap();
        assert_eq!(d.n_coefficient(&alg, i20, i02), 0.0);
    }

    #[test]
    fn bracket_pattern_families() {
        for (family, n) in [
            (Family::Su, 3),
            (Family::Su, 4),
            (Family::U, 3),
            (Family::So, 5),
            (Family::So, 6),
            (Family::So, 7),
            (Family::Sp, 2),
            (Family::Sp, 3),
        ] {
            let kind = if family == Family::U {
                QKind::NegativeTrace
            } else {
                QKind::NegativeKilling
            };
            let (alg, d) = datum_for(family, n, kind);
            let res = d.bracket_pattern_residual(&alg);
            assert!(
                res < 1e-9,
                "{}({}) bracket pattern residual {:.3e}",
                family.name(),
                n,
                res
            );
        }
    }

    #[test]
    fn n_antisymmetry_identities() {
        let (alg, d) = datum_for(Family::Su, 3, QKind::NegativeKilling);
        let nr = d.positive_roots.len();
        for a in 0..nr {
            for b in 0..nr {
                let sa = SignedRoot {
                    index: a,
                    positive: true,
                };
                let sb = SignedRoot {
                    index: b,
                    positive: true,
                };
                let nab = d.n_signed(&alg, sa, sb);
                let nba = d.n_signed(&alg, sb, sa);
                assert!((nab + nba).abs() < 1e-9);
                // n_{a,b} = n_{b, -(a+b)}
                if let Some(g) = d.signed_sum(sa, sb) {
                    let neg_g = SignedRoot {
                        index: g.index,
                        positive: !g.positive,
                    };
                    let cyc = d.n_signed(&alg, sb, neg_g);
                    assert!(
                        (nab - cyc).abs() < 1e-9,
                        "cyclic identity violated: {} vs {}",
                        nab,
                        cyc
                    );
                }
            }
        }
    }

    #[test]
    fn at_most_one_combination_is_a_root() {
        // hypothesis of the strongly-nice criterion for su(n+1), so(2n), u(n)
        for (family, n) in [
            (Family::Su, 3),
            (Family::Su, 5),
            (Family::Su, 7),
            (Family::U, 6),
            (Family::So, 8),
            (Family::So, 12),
        ] {
            let (_, roots) = positive_roots_for(family, n);
            let index: std::collections::HashSet<Vec<i32>> = roots.iter().cloned().collect();
            for a in &roots {
                for b in &roots {
                    if a == b {
                        continue;
                    }
                    let mut count = 0;
                    let sum: Vec<i32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    let dif: Vec<i32> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                    let fid: Vec<i32> = dif.iter().map(|v| -v).collect();
                    if index.contains(&sum) {
                        count += 1;
                    }
                    if index.contains(&dif) {
                        count += 1;
                    }
                    if index.contains(&fid) {
                        count += 1;
                    }
                    assert!(count <= 1, "family {} n {}", family.name(), n);
                }
            }
        }
    }

    #[test]
    fn regular_subalgebra_su3() {
        let (alg, d) = datum_for(Family::Su, 3, QKind::NegativeKilling);
        // span{H_{theta2 - theta3}} + r_{theta2-theta3}: the isotropy algebra
        // of the (0,1) Aloff-Wallach circle's normalizer companion
        let h23 = d.dual(&[0.0, 1.0, -1.0]);
        let h23 = &h23 / h23.norm();
        let mut tp = DMatrix::zeros(alg.dim(), 1);
        tp.set_column(0, &h23);
        let r = d.root_index(&[0, 1, -1]).unwrap();
        let h = regular_subalgebra(&alg, &d, &tp, &[r]).unwrap();
        assert_eq!(h.ncols(), 3);
    }

    #[test]
    fn regular_subalgebra_torus_only() {
        let (alg, d) = datum_for(Family::So, 5, QKind::NegativeKilling);
        let tp = d.cartan.clone();
        let h = regular_subalgebra(&alg, &d, &tp, &[]).unwrap();
        assert_eq!(h.ncols(), 2);
    }

    #[test]
    fn regular_subalgebra_rejects_non_closed() {
        let (alg, d) = datum_for(Family::Su, 3, QKind::NegativeKilling);
        let r12 = d.root_index(&[1, -1, 0]).unwrap();
        let r23 = d.root_index(&[0, 1, -1]).unwrap();
        let tp = DMatrix::zeros(alg.dim(), 0);
        let err = regular_subalgebra(&alg, &d, &tp, &[r12, r23]).unwrap_err();
        assert!(format!("{err}").contains("not closed"));
    }
}
