//! Property tests over randomly drawn physical scenarios.

use nalgebra::DMatrix;
use proptest::prelude::*;
use qi_core::classical::{homodyne_roc, marcum_roc, ClassicalRocParams};
use qi_core::gaussian::{ppt_separable_two_mode, symplectic_form, williamson};
use qi_core::scenario::{hypothesis_pair_generic, max_correlation, ChannelSpec, SourceSpec};
use qi_core::symmetric::{qbb, qcb, s_overlap};

fn rotation_symplectic(theta: f64, phi1: f64, phi2: f64) -> DMatrix<f64> {
    let (c, s) = (theta.cos(), theta.sin());
    let bs = DMatrix::from_row_slice(
        4,
        4,
        &[
            c, s, 0.0, 0.0, //
            -s, c, 0.0, 0.0, //
            0.0, 0.0, c, s, //
            0.0, 0.0, -s, c,
        ],
    );
    let mut local = DMatrix::zeros(4, 4);
    for (m, f) in [(0usize, phi1), (1usize, phi2)] {
        local[(m, m)] = f.cos();
        local[(m, 2 + m)] = f.sin();
        local[(2 + m, m)] = -f.sin();
        local[(2 + m, 2 + m)] = f.cos();
    }
    bs * local
}

fn pair_strategy() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (
        0.01f64..3.0,  // n_s
        0.0f64..1.0,   // c as a fraction of C_q
        0.01f64..0.9,  // kappa
        0.05f64..5.0,  // n_b
    )
}

proptest! {
    #[test]
    fn williamson_invariants_hold((n_s, c_frac, kappa, n_b) in pair_strategy(),
                                  theta in 0.0f64..3.0,
                                  phi1 in 0.0f64..6.0,
                                  phi2 in 0.0f64..6.0) {
        let source = SourceSpec::generic(n_s, c_frac * max_correlation(n_s)).unwrap();
        let channel = ChannelSpec::new(kappa, n_b).unwrap();
        let pair = hypothesis_pair_generic(&source, &channel).unwrap();
        let r = rotation_symplectic(theta, phi1, phi2);
        let cov = &r * &pair.rho1.cov * r.transpose();

        let dec = williamson(&cov).unwrap();
        let omega = symplectic_form(2).omega;
        let omega_res = (&dec.s_mat * &omega * dec.s_mat.transpose() - &omega).norm();
        let reass_res = (dec.reassemble() - &cov).norm() / cov.norm();
        prop_assert!(omega_res < 1e-9 * cov.norm().max(1.0));
        prop_assert!(reass_res < 1e-9);
        prop_assert!(dec.nu.iter().all(|&nu| nu >= 0.5 - 1e-10));
    }

    #[test]
    fn overlap_bounded_and_swap_symmetric((n_s, c_frac, kappa, n_b) in pair_strategy(),
                                          s in 0.05f64..0.95) {
        let source = SourceSpec::generic(n_s, c_frac * max_correlation(n_s)).unwrap();
        let channel = ChannelSpec::new(kappa, n_b).unwrap();
        let pair = hypothesis_pair_generic(&source, &channel).unwrap();
        let fwd = s_overlap(&pair.rho0, &pair.rho1, s).unwrap();
        let rev = s_overlap(&pair.rho1, &pair.rho0, 1.0 - s).unwrap();
        prop_assert!(fwd.c_s > 0.0 && fwd.c_s <= 1.0 + 1e-12);
        prop_assert!((fwd.log_c_s - rev.log_c_s).abs() < 1e-10);
    }

    #[test]
    fn chernoff_under_bhattacharyya((n_s, c_frac, kappa, n_b) in pair_strategy()) {
        let source = SourceSpec::generic(n_s, c_frac * max_correlation(n_s)).unwrap();
        let channel = ChannelSpec::new(kappa, n_b).unwrap();
        let pair = hypothesis_pair_generic(&source, &channel).unwrap();
        let chern = qcb(&pair, 3).unwrap();
        let bhat = qbb(&pair, 3).unwrap();
        prop_assert!(chern.log_p_err_bound <= bhat.log_p_err_bound + 1e-12);
        prop_assert!(bhat.p_err_bound <= 0.5 + 1e-15);
        prop_assert!(chern.exponent_per_copy >= 0.0);
    }

    #[test]
    fn source_entangled_iff_above_separable_line(n_s in 0.01f64..5.0,
                                                 frac in 0.0f64..1.0) {
        let c = frac * max_correlation(n_s);
        let st = qi_core::scenario::generic_source_state(n_s, c).unwrap();
        let separable = ppt_separable_two_mode(&st.cov).unwrap();
        // Margin keeps the check away from the borderline c = n_s.
        if c < n_s * 0.999 {
            prop_assert!(separable);
        } else if c > n_s * 1.001 {
            prop_assert!(!separable);
        }
    }

    #[test]
    fn classical_rocs_are_valid_curves(kappa in 1e-6f64..0.5,
                                       n_s in 0.01f64..2.0,
                                       n_b in 0.5f64..100.0,
                                       m in 1u64..1000) {
        let params = ClassicalRocParams::new(m, kappa, n_s, n_b).unwrap();
        let mut prev_h = f64::INFINITY;
        let mut prev_m = f64::INFINITY;
        for k in 1..=12 {
            let p_fa = k as f64 / 13.0;
            let h = homodyne_roc(p_fa, &params).unwrap();
            let mm = marcum_roc(p_fa, m as f64 * kappa * n_s / n_b).unwrap();
            prop_assert!((0.0..=1.0).contains(&h.p_md));
            prop_assert!((0.0..=1.0).contains(&mm.p_md));
            prop_assert!(h.log_p_md <= prev_h + 1e-9);
            prop_assert!(mm.log_p_md <= prev_m + 1e-7);
            prop_assert!((h.p_md - h.log_p_md.exp()).abs() <= 1e-12);
            prev_h = h.log_p_md;
            prev_m = mm.log_p_md;
        }
    }
}
