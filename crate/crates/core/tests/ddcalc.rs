use kickchain::ddcalc::*;
use kickchain::state::{make_product_state, ProductSpec};
use kickchain::ChainConfig;
use std::f64::consts::PI;

#[test]
fn count_relation_reproduces_closed_form() {
    for l in [7usize, 21, 41, 61] {
        let cfg = ChainConfig::new(l, 1.0, 0.0);
        let pairs = count_relation(&cfg);
        assert!(!pairs.is_empty());
        assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        for (n_d, k) in pairs {
            let expected = PI / (cfg.t * (((l - 1) / n_d) as f64).powi(2));
            assert_eq!(k, expected, "L={l} N_d={n_d}");
            assert_eq!(k, kick_for_count(l, n_d, cfg.t).unwrap());
            assert_eq!(decoupled_sites(&cfg, k, EXACT_PHASE_TOL).len(), n_d);
        }
    }
}

#[test]
fn every_level_decouples_a_symmetric_site_set() {
    let cfg = ChainConfig::new(21, 1.0, 0.0);
    for level in enumerate_levels(&cfg) {
        assert_eq!(level.sites.len(), level.n_d);
        for &j in &level.sites {
            assert!(level.sites.contains(&(22 - j)));
            let phase = level.k * cfg.t * (j as f64 - 11.0).powi(2);
            assert!((phase / PI - (phase / PI).round()).abs() < 1e-9);
        }
    }
}

#[test]
fn edge_spins_follow_free_precession_at_the_decoupling_kick() {
    // Weak coupling: the exchange-induced frequency shift of the edge spin is
    // linear in J, so the closed form holds over the whole horizon only for small J.
    let cfg = ChainConfig::new(9, 0.25, 0.0);
    let k = kick_for_site(&cfg, 1, 1).unwrap();
    let sites = decoupled_sites(&cfg, k, EXACT_PHASE_TOL);
    assert_eq!(sites, vec![1, 9]);
    let psi = make_product_state(9, &ProductSpec::vacuum(9)).unwrap();
    let report = verify_dd(&cfg, k, &sites, 512, &psi).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.sites.iter().all(|s| s.amplitude > 0.8));
}

#[test]
fn strongly_coupled_edge_keeps_its_amplitude_but_shifts_frequency() {
    let cfg = ChainConfig::new(9, 1.0, 0.0);
    let k = kick_for_site(&cfg, 1, 1).unwrap();
    let psi = make_product_state(9, &ProductSpec::vacuum(9)).unwrap();
    let report = verify_dd(&cfg, k, &[1, 9], 1024, &psi).unwrap();
    for site in &report.sites {
        assert!(site.amplitude > 0.9);
        assert!(site.peak_frequency.unwrap() > report.omega_d);
    }
}

#[test]
fn detuned_kick_loses_the_edge_oscillation() {
    let cfg = ChainConfig::new(9, 1.0, 0.0);
    let k = kick_for_site(&cfg, 1, 1).unwrap();
    let psi = make_product_state(9, &ProductSpec::vacuum(9)).unwrap();
    let on = verify_dd(&cfg, k, &[1], 1024, &psi).unwrap();
    let off = verify_dd(&cfg, 0.8 * k, &[1], 1024, &psi).unwrap();
    assert!(off.sites[0].amplitude < on.sites[0].amplitude);
    assert!(!off.pass);
}

#[test]
fn sustained_amplitude_of_a_free_spin_is_one() {
    let omega_t = 1.0 / 16.0;
    let kicks: Vec<usize> = (0..2000).collect();
    let values: Vec<f64> = kicks.iter().map(|&n| -(2.0 * omega_t * n as f64).cos()).collect();
    assert!((sustained_amplitude(&values, &kicks, omega_t) - 1.0).abs() < 0.01);
    let flat = vec![0.3; kicks.len()];
    assert!(sustained_amplitude(&flat, &kicks, omega_t) < 0.01);
}

#[test]
fn bad_claims_are_rejected() {
    let cfg = ChainConfig::new(7, 1.0, 0.0);
    let psi = make_product_state(7, &ProductSpec::vacuum(7)).unwrap();
    assert!(verify_dd(&cfg, 1.0, &[0], 10, &psi).is_err());
    assert!(verify_dd(&cfg, 1.0, &[8], 10, &psi).is_err());
    assert!(kick_for_site(&cfg, 4, 1).is_err());
}
