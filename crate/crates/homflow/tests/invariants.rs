//! Property tests for the structural invariants: scaling homogeneities of
//! the curvature quantities, invariance of decomposition statistics under
//! reseeding, gauge preservation of the trivial splitting, integrator
//! order, and late-time monotonicity of the largest theta.

use homflow::analysis::estimate_preconditions;
use homflow::curvature::{
    ricci_eigenvalues, scalar_curvature, sectional_block_sum, SpaceData,
};
use homflow::decomp::{decompose_isotropy, trivial_generator};
use homflow::flow::{integrate, FlowDirection, FlowSpec, Normalization};
use homflow::nr::NormalizerData;
use homflow::presets::build_preset;
use homflow::structure::brute_force_triple_sums;
use homflow::submersion::{epsilon, oneill_norm_sq, s_norm_sq, theta, SubmersionSplit};
use proptest::prelude::*;

fn sd_for(name: &str) -> SpaceData {
    let p = build_preset(name).unwrap();
    SpaceData::new(p.space, p.dec).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scaling_homogeneities(
        seed_c in 0u64..1000,
        log_c in -3.0f64..3.0,
    ) {
        let sd = sd_for("aloff-wallach-11");
        let nd = NormalizerData::compute(&sd.space, &sd.dec, &sd.st).unwrap();
        let split = SubmersionSplit::new(&sd, &nd, &[0]).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed_c);
        let x: Vec<f64> = (0..sd.st.ell).map(|_| 0.3 + rng.gen::<f64>()).collect();
        let c = 10f64.powf(log_c);
        let xc: Vec<f64> = x.iter().map(|v| v * c).collect();

        // degree -1: ric, scal, |A|^2, sec
        let r1 = ricci_eigenvalues(&sd, &x);
        let r2 = ricci_eigenvalues(&sd, &xc);
        for (a, b) in r1.iter().zip(r2.iter()) {
            prop_assert!((a / c - b).abs() <= 1e-9 * a.abs().max(1e-12));
        }
        let s1 = scalar_curvature(&sd, &x);
        prop_assert!((s1 / c - scalar_curvature(&sd, &xc)).abs() <= 1e-9 * s1.abs());
        let a1 = oneill_norm_sq(&sd, &split, &x);
        prop_assert!((a1 / c - oneill_norm_sq(&sd, &split, &xc)).abs() <= 1e-9 * a1.abs().max(1e-12));
        for i in 0..sd.st.ell {
            for j in 0..sd.st.ell {
                let v1 = sectional_block_sum(&sd, &x, i, j);
                let v2 = sectional_block_sum(&sd, &xc, i, j);
                prop_assert!((v1 / c - v2).abs() <= 1e-9 * v1.abs().max(1e-12));
            }
        }
        // invariant: theta, epsilon, |S_p|
        for &i in &nd.i_lower[0] {
            prop_assert!((theta(&nd, &x, 0, i) - theta(&nd, &xc, 0, i)).abs() <= 1e-12);
            prop_assert!((epsilon(&nd, &x, 0, i) - epsilon(&nd, &xc, 0, i)).abs() <= 1e-12);
        }
        let sn1 = s_norm_sq(&sd, &nd, &x, 0);
        let sn2 = s_norm_sq(&sd, &nd, &xc, 0);
        // exact invariance up to rounding in the scaled ratios
        prop_assert!((sn1 - sn2).abs() <= 1e-13 + 1e-9 * sn1.abs());
    }

    #[test]
    fn triple_sums_basis_independent(seed in 0u64..500) {
        let sd = sd_for("aloff-wallach-01");
        let st = &sd.st;
        let rot = brute_force_triple_sums(&sd.space, &sd.dec, seed);
        for i in 0..st.ell {
            for j in 0..st.ell {
                for k in 0..st.ell {
                    let dev = (st.t(i, j, k) - rot[i + st.ell * j + st.ell * st.ell * k]).abs();
                    prop_assert!(dev < 1e-9);
                }
            }
        }
    }
}

#[test]
fn decomposition_statistics_seed_invariant() {
    // ell, the dimension multiset and the isotypic class count do not
    // depend on the random commutant element
    for name in ["aloff-wallach-11", "so5-so3", "u4-u1u2"] {
        let p = build_preset(name).unwrap();
        let reference = &p.dec;
        let mut ref_dims = reference.dims.clone();
        ref_dims.sort_unstable();
        let ref_classes = reference.isotypic_classes.len();
        for seed in [1u64, 17, 99, 12345] {
            let dec = decompose_isotropy(&p.space, seed).unwrap();
            let mut dims = dec.dims.clone();
            dims.sort_unstable();
            assert_eq!(dims, ref_dims, "{name} seed {seed}");
            assert_eq!(dec.isotypic_classes.len(), ref_classes, "{name} seed {seed}");
            assert_eq!(dec.trivial_count, reference.trivial_count);
        }
    }
}

#[test]
fn gauge_action_preserves_trivial_splitting() {
    // ad(V_p) maps m_0 into m_0 and its complement into the complement
    for name in ["aloff-wallach-11", "sp2-sp1", "sp2xsp2-dsp1"] {
        let p = build_preset(name).unwrap();
        let sd = SpaceData::new(p.space, p.dec).unwrap();
        let l0 = sd.dec.trivial_count;
        let m0_cols: Vec<usize> = (0..l0).map(|p| sd.dec.ranges[p].0).collect();
        let m = sd.dim_m();
        for p_idx in 0..l0 {
            let v = trivial_generator(&sd.dec, p_idx);
            let ad = sd.space.algebra.ad_of(&v);
            for a in 0..m {
                let col = sd.dec.basis.column(a).clone_owned();
                let img = &ad * col;
                let img_m = sd.dec.basis.transpose() * &img;
                let a_trivial = m0_cols.contains(&a) || sd.dec.module_of_column(a) < l0;
                for b in 0..m {
                    let b_trivial = sd.dec.module_of_column(b) < l0;
                    if a_trivial != b_trivial {
                        assert!(
                            img_m[b].abs() < 1e-10,
                            "{name}: gauge mixes m_0 with its complement"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn integrator_error_tracks_tolerance() {
    // two-decade tolerance sweep on the bi-invariant closed form
    let sd = sd_for("group-su3");
    let x0 = vec![1.0; sd.st.ell];
    let mut errs = Vec::new();
    for tol in [1e-6, 1e-8, 1e-10] {
        let spec = FlowSpec {
            direction: FlowDirection::Backward,
            normalization: Normalization::None,
            t_end: 50.0,
            rel_tol: tol,
            abs_tol: tol * 1e-2,
            ..Default::default()
        };
        let traj = integrate(&sd, &x0, &spec, None).unwrap();
        let t = traj.times.last().unwrap();
        let x = traj.last_state();
        let expect = 1.0 + t / 2.0;
        errs.push((x[0] - expect).abs() / expect);
    }
    assert!(errs[1] < errs[0]);
    assert!(errs[2] < errs[0] * 1e-1, "{errs:?}");
    assert!(errs[2] < 1e-10, "{errs:?}");
}

#[test]
fn theta_argmax_increases_in_regime() {
    // along a backward trajectory started in the precondition regime with
    // broken T-invariance, the largest theta must increase step to step
    let sd = sd_for("aloff-wallach-11");
    let nd = NormalizerData::compute(&sd.space, &sd.dec, &sd.st).unwrap();
    let split = SubmersionSplit::new(&sd, &nd, &[0]).unwrap();
    let mut x0 = vec![0.0; sd.st.ell];
    x0[1] = 1.0;
    x0[2] = 1.004; // broken invariance within the (0.99, 1.01) gate
    x0[3] = 1.1;
    x0[4] = 0.95;
    x0[0] = 2e-4; // tiny fiber
    assert!(estimate_preconditions(&sd, &nd, &split, &x0));
    let spec = FlowSpec {
        direction: FlowDirection::Backward,
        normalization: Normalization::None,
        t_end: 50.0,
        rel_tol: 1e-10,
        abs_tol: 1e-12,
        ..Default::default()
    };
    let traj = integrate(&sd, &x0, &spec, None).unwrap();
    let mut prev = f64::NEG_INFINITY;
    let mut checked = 0;
    for x in &traj.states {
        if !estimate_preconditions(&sd, &nd, &split, x) {
            break;
        }
        let th = nd.i_lower[0]
            .iter()
            .map(|&i| theta(&nd, x, 0, i))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(
            th >= prev - 1e-12,
            "theta_max decreased: {th} after {prev}"
        );
        prev = th;
        checked += 1;
    }
    assert!(checked > 10, "regime left too early ({checked} steps)");
}

#[test]
fn sandwich_bounds_on_random_submersion_states() {
    use rand::{Rng, SeedableRng};
    let sd = sd_for("aloff-wallach-11");
    let nd = NormalizerData::compute(&sd.space, &sd.dec, &sd.st).unwrap();
    let split = SubmersionSplit::new(&sd, &nd, &[0]).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let y = [0.1 + rng.gen::<f64>()];
        let xb: Vec<f64> = (0..3).map(|_| 0.4 + rng.gen::<f64>()).collect();
        let x = split.assemble(&y, &xb, sd.st.ell);
        let t = homflow::submersion::oneill_tensors(&sd, &split, &x);
        assert!(homflow::submersion::sandwich_holds(&sd, &t));
    }
}
