mod common;

use common::*;
use kickchain::floquet::FloquetOperator;
use kickchain::linalg::max_abs_diff;
use kickchain::ChainConfig;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn floquet_operator_is_unitary(l in 2usize..=8, j in 0.0f64..3.0, k in 0.0f64..3.0, off in -0.3f64..0.3) {
        let cfg = ChainConfig::new(l, j, k).with_offset(off);
        prop_assert!(unitarity_defect_of(&cfg) < 1e-10);
    }

    #[test]
    fn decoupled_spins_evolve_independently(l in 2usize..=7, k in 0.0f64..4.0, bits in 0usize..128, n in 1usize..40) {
        let cfg = ChainConfig::new(l, 0.0, k);
        prop_assert!(factorization_defect(&cfg, bits % (1 << l), n) < 1e-10);
    }

    #[test]
    fn dense_and_krylov_paths_agree(l in 2usize..=8, j in 0.0f64..2.5, k in 0.0f64..2.5, seed in any::<u64>()) {
        let cfg = ChainConfig::new(l, j, k);
        prop_assert!(path_defect(&cfg, seed, 12) < 1e-9);
    }

    #[test]
    fn pure_state_entropy_is_symmetric(l in 2usize..=9, cut in 1usize..9, seed in any::<u64>()) {
        let a = 1 + cut % (l - 1);
        prop_assert!(entropy_asymmetry(l, a, seed) < 1e-10);
    }

    #[test]
    fn partial_trace_matches_explicit_sum(l in 2usize..=8, cut in 0usize..8, seed in any::<u64>()) {
        let a = 1 + cut % (l - 1);
        prop_assert!(partial_trace_gap(l, a, seed) < 1e-12);
    }

    #[test]
    fn fidelity_matches_singular_value_oracle(seed in any::<u64>()) {
        prop_assert!(fidelity_oracle_gap(seed) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 4, ..ProptestConfig::default() })]

    #[test]
    fn collapse_recovers_planted_exponents(k_c in 0.25f64..0.55, nu in 0.55f64..1.0) {
        let (dk, dnu) = collapse_recovery(k_c, nu);
        prop_assert!(dk < 0.02, "K_c off by {dk}");
        prop_assert!(dnu < 0.05, "nu off by {dnu}");
    }
}

#[test]
fn hamiltonian_matches_kronecker_construction() {
    for (l, j, omega) in [(2, 1.0, 1.0), (4, 0.7, 1.3), (6, 2.0, 0.5)] {
        let cfg = ChainConfig::new(l, j, 0.0).with_omega(omega);
        let ours = kickchain::floquet::build_static_hamiltonian(&cfg).unwrap().dense().unwrap();
        let ours = faer::Mat::from_fn(ours.nrows(), ours.ncols(), |r, col| c(ours[(r, col)], 0.0));
        let oracle = kron_hamiltonian(l, 2.0 * j, omega);
        assert!(max_abs_diff(ours.as_ref(), oracle.as_ref()) < 1e-14, "L={l}");
    }
}

#[test]
fn floquet_matrix_matches_kronecker_oracle() {
    let cfg = ChainConfig::new(5, 0.9, 1.7).with_offset(0.013);
    let u = FloquetOperator::dense(&cfg).unwrap().dense_matrix().unwrap();
    let free = oracle_expm(&kron_hamiltonian(5, 1.8, 1.0), cfg.t);
    let kappa = cfg.kick_coefficients();
    let mut kick = identity(1);
    for s in (1..=5).rev() {
        let k = kappa[s - 1];
        let site = faer::Mat::from_fn(2, 2, |r, col| {
            if r != col {
                c(0.0, 0.0)
            } else if r == 1 {
                num_complex::Complex64::from_polar(1.0, -k)
            } else {
                num_complex::Complex64::from_polar(1.0, k)
            }
        });
        kick = kron(&kick, &site);
    }
    let oracle = &kick * &free;
    assert!(max_abs_diff(u.as_ref(), oracle.as_ref()) < 1e-12);
}
