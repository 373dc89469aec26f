//! Machine-readable outputs: trajectory CSV and JSON views of algebras,
//! root data, space reports and Einstein results. All floats print in
//! shortest round-trip form.

use crate::algebra::CompactAlgebra;
use crate::curvature::SpaceData;
use crate::decomp::Decomposition;
use crate::error::{Error, Result};
use crate::flow::{DiagRow, Termination, Trajectory};
use crate::nr::{NormalizerData, NrIdentityReport, NrVerdict};
use crate::roots::RootDatum;
use crate::structure::StructureTensor;
use serde::{Deserialize, Serialize};

pub fn term_flag(t: Termination) -> &'static str {
    match t {
        Termination::SpanEnd => "span_end",
        Termination::BlowUp => "blow_up",
        Termination::CollapseFloor => "collapse_floor",
        Termination::StepFailure => "step_failure",
    }
}

pub fn parse_term_flag(s: &str) -> Result<Termination> {
    Ok(match s {
        "span_end" => Termination::SpanEnd,
        "blow_up" => Termination::BlowUp,
        "collapse_floor" => Termination::CollapseFloor,
        "step_failure" => Termination::StepFailure,
        _ => return Err(Error::config(format!("unknown termination flag '{s}'"))),
    })
}

/// Serialises a trajectory as CSV with the fixed column layout
/// tau, x_1..x_ell, scal, tau_scal, F, A2, S_1..S_s, theta_max, term_flag.
pub fn trajectory_to_csv(traj: &Trajectory) -> String {
    let ell = traj.states.first().map(|s| s.len()).unwrap_or(0);
    let mut out = String::new();
    out.push_str("tau");
    for i in 1..=ell {
        out.push_str(&format!(",x_{i}"));
    }
    out.push_str(",scal,tau_scal,F,A2");
    for p in 1..=traj.s_count {
        out.push_str(&format!(",S_{p}"));
    }
    out.push_str(",theta_max,term_flag\n");
    let flag = term_flag(traj.termination);
    for ((t, x), d) in traj
        .times
        .iter()
        .zip(traj.states.iter())
        .zip(traj.diags.iter())
    {
        out.push_str(&format!("{t}"));
        for v in x {
            out.push_str(&format!(",{v}"));
        }
        out.push_str(&format!(",{},{},{},{}", d.scal, d.tau_scal, d.f, d.a2));
        for s in &d.s_norms {
            out.push_str(&format!(",{s}"));
        }
        out.push_str(&format!(",{},{flag}\n", d.theta_max));
    }
    out
}

/// Parses a trajectory CSV produced by `trajectory_to_csv`.
pub fn trajectory_from_csv(text: &str) -> Result<Trajectory> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::config("empty CSV"))?;
    let cols: Vec<&str> = header.split(',').collect();
    let ell = cols.iter().filter(|c| c.starts_with("x_")).count();
    let s_count = cols.iter().filter(|c| c.starts_with("S_")).count();
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut diags = Vec::new();
    let mut termination = Termination::SpanEnd;
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != cols.len() {
            return Err(Error::config("CSV row width mismatch"));
        }
        let fval = |i: usize| -> Result<f64> {
            parts[i]
                .parse::<f64>()
                .map_err(|e| Error::config(format!("bad float in CSV: {e}")))
        };
        times.push(fval(0)?);
        let mut x = Vec::with_capacity(ell);
        for i in 0..ell {
            x.push(fval(1 + i)?);
        }
        states.push(x);
        let base = 1 + ell;
        let mut s_norms = Vec::with_capacity(s_count);
        for p in 0..s_count {
            s_norms.push(fval(base + 4 + p)?);
        }
        diags.push(DiagRow {
            scal: fval(base)?,
            tau_scal: fval(base + 1)?,
            vol: 0.0,
            f: fval(base + 2)?,
            a2: fval(base + 3)?,
            s_norms,
            theta_max: fval(base + 4 + s_count)?,
        });
        termination = parse_term_flag(parts[base + 5 + s_count])?;
    }
    Ok(Trajectory {
        times,
        states,
        diags,
        termination,
        s_count,
    })
}

// ---------------------------------------------------------------------------
// JSON views
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    pub mat_dim: usize,
    /// Row-major raw basis matrices.
    pub basis: Vec<Vec<f64>>,
    pub gram: Vec<Vec<f64>>,
    pub family_tag: String,
}

pub fn algebra_json(alg: &CompactAlgebra) -> AlgebraJson {
    let md = alg.raw.mat_dim;
    let basis = alg
        .raw
        .basis
        .iter()
        .map(|m| {
            let mut row_major = Vec::with_capacity(md * md);
            for r in 0..md {
                for c in 0..md {
                    row_major.push(m[(r, c)]);
                }
            }
            row_major
        })
        .collect();
    let gram = (0..alg.dim())
        .map(|i| (0..alg.dim()).map(|j| alg.q.gram[(i, j)]).collect())
        .collect();
    AlgebraJson {
        dim: alg.dim(),
        mat_dim: md,
        basis,
        gram,
        family_tag: alg.raw.family.to_string(),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NCoefficient {
    pub alpha: usize,
    pub beta: usize,
    pub value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RootDatumJson {
    pub positive_roots: Vec<Vec<i32>>,
    pub n_coefficients: Vec<NCoefficient>,
}

pub fn root_datum_json(alg: &CompactAlgebra, datum: &RootDatum) -> RootDatumJson {
    let mut n_coefficients = Vec::new();
    let nr = datum.positive_roots.len();
    for a in 0..nr {
        for b in 0..nr {
            let v = datum.n_coefficient(alg, a, b);
            if v != 0.0 {
                n_coefficients.push(NCoefficient {
                    alpha: a,
                    beta: b,
                    value: v,
                });
            }
        }
    }
    RootDatumJson {
        positive_roots: datum.positive_roots.clone(),
        n_coefficients,
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub dims: Vec<usize>,
    pub trivial_count: usize,
    pub isotypic_classes: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StructureJson {
    pub d: Vec<usize>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub b_total: f64,
    /// Nonzero entries (i, j, k, value) of the triple-sum tensor.
    pub triple_sums: Vec<(usize, usize, usize, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NormalizerJson {
    pub phi: Vec<Vec<usize>>,
    pub mu: Vec<Vec<f64>>,
    pub i_zero: Vec<Vec<usize>>,
    pub i_lower: Vec<Vec<usize>>,
    pub i_fixed: Vec<Vec<usize>>,
    pub i_upper: Vec<Vec<usize>>,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerdictsJson {
    pub normalizer_adapted: bool,
    pub stably_ricci_diagonal: bool,
    pub strongly_nice: bool,
    pub nr: bool,
    pub detail: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct IdentityResidualsJson {
    pub coef_dims: f64,
    pub coef_killing: f64,
    pub strconst_plus: f64,
    pub strconst_zero: f64,
    pub strconst_commuting: f64,
    pub wang_ziller: f64,
    pub max: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpaceReportJson {
    pub name: String,
    pub dim_m: usize,
    pub decomposition: DecompositionJson,
    pub structure: StructureJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalizer: Option<NormalizerJson>,
    pub verdicts: VerdictsJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity_residuals: Option<IdentityResidualsJson>,
}

pub fn decomposition_json(dec: &Decomposition) -> DecompositionJson {
    DecompositionJson {
        dims: dec.dims.clone(),
        trivial_count: dec.trivial_count,
        isotypic_classes: dec.isotypic_classes.clone(),
    }
}

pub fn structure_json(st: &StructureTensor) -> StructureJson {
    let mut triple_sums = Vec::new();
    for i in 0..st.ell {
        for j in 0..st.ell {
            for k in 0..st.ell {
                let v = st.t(i, j, k);
                if v != 0.0 {
                    triple_sums.push((i, j, k, v));
                }
            }
        }
    }
    StructureJson {
        d: st.d.clone(),
        b: st.b.clone(),
        c: st.c.clone(),
        b_total: st.b_total,
        triple_sums,
    }
}

pub fn normalizer_json(nd: &NormalizerData) -> NormalizerJson {
    NormalizerJson {
        phi: nd.phi.clone(),
        mu: nd.mu.clone(),
        i_zero: nd.i_zero.clone(),
        i_lower: nd.i_lower.clone(),
        i_fixed: nd.i_fixed.clone(),
        i_upper: nd.i_upper.clone(),
        alpha: nd.alpha.clone(),
    }
}

pub fn verdicts_json(v: &NrVerdict, strongly_nice: bool) -> VerdictsJson {
    VerdictsJson {
        normalizer_adapted: v.normalizer_adapted,
        stably_ricci_diagonal: v.stably_ricci_diagonal,
        strongly_nice,
        nr: v.is_nr(),
        detail: v.detail.clone(),
    }
}

pub fn identity_residuals_json(rep: &NrIdentityReport) -> IdentityResidualsJson {
    IdentityResidualsJson {
        coef_dims: rep.coef_dims,
        coef_killing: rep.coef_killing,
        strconst_plus: rep.strconst_plus,
        strconst_zero: rep.strconst_zero,
        strconst_commuting: rep.strconst_commuting,
        wang_ziller: rep.wang_ziller,
        max: rep.max_residual(),
    }
}

/// Recomputes the per-row diagnostics of a parsed trajectory from its
/// states, for round-trip validation. Returns the maximum deviation.
pub fn recompute_diag_residual(
    sd: &SpaceData,
    nd: Option<&NormalizerData>,
    split: Option<&crate::submersion::SubmersionSplit>,
    traj: &Trajectory,
) -> f64 {
    let mut worst: f64 = 0.0;
    for ((t, x), d) in traj
        .times
        .iter()
        .zip(traj.states.iter())
        .zip(traj.diags.iter())
    {
        let scal = crate::curvature::scalar_curvature(sd, x);
        worst = worst.max((scal - d.scal).abs());
        worst = worst.max((t.abs() * scal - d.tau_scal).abs());
        if let (Some(nd), Some(split)) = (nd, split) {
            let a2 = crate::submersion::oneill_norm_sq(sd, split, x);
            let f = crate::submersion::functional_f(sd, split, x);
            worst = worst.max((a2 - d.a2).abs());
            worst = worst.max((f - d.f).abs());
            for (p_idx, &p) in split.toral.iter().enumerate() {
                let s = crate::submersion::s_norm_sq(sd, nd, x, p).sqrt();
                worst = worst.max((s - d.s_norms[p_idx]).abs());
            }
        }
    }
    worst
}
