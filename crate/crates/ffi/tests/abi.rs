use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use kickchain_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(kc_last_error_message()) }.to_string_lossy().into_owned()
}

fn config(l: usize, j: f64, k: f64) -> KcChainConfig {
    let mut c = KcChainConfig { l: 0, j: 0.0, omega: 0.0, k: 0.0, t: 0.0, j0_offset: 0.0 };
    assert_eq!(unsafe { kc_config_default(l, &mut c) }, KcStatus::KcOk);
    c.j = j;
    c.k = k;
    c
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(kc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn rabi_flip_of_vacuum() {
    // J = K = 0: each spin rotates freely, P_up = sin^2(Omega T)
    let cfg = config(3, 0.0, 0.0);
    unsafe {
        let mut u = ptr::null_mut();
        assert_eq!(kc_floquet_new(&cfg, KcPath::KcPathMatrixFree, &mut u), KcStatus::KcOk);
        let mut s = ptr::null_mut();
        let name = CString::new("vacuum").unwrap();
        assert_eq!(kc_state_from_preset(3, name.as_ptr(), &mut s), KcStatus::KcOk);
        assert_eq!(kc_state_dim(s), 8);
        assert_eq!(kc_floquet_apply(u, s, 1), KcStatus::KcOk);
        let mut sz = 0.0;
        assert_eq!(kc_state_sigma_z(s, 2, &mut sz), KcStatus::KcOk);
        let expect = 2.0 * (1.0f64 / 16.0).sin().powi(2) - 1.0;
        assert!((sz - expect).abs() < 1e-10);
        let mut amps = vec![0.0; 16];
        assert_eq!(kc_state_amplitudes(s, amps.as_mut_ptr(), amps.len()), KcStatus::KcOk);
        let norm: f64 = amps.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-10);
        assert_eq!(kc_state_sigma_z(s, 9, &mut sz), KcStatus::KcErrConfig);
        assert!(!last_error().is_empty());
        kc_state_free(s);
        kc_floquet_free(u);
    }
}

#[test]
fn spectrum_and_diagnostics() {
    let cfg = config(6, 0.5, 1.0);
    unsafe {
        let mut u = ptr::null_mut();
        assert_eq!(kc_floquet_new(&cfg, KcPath::KcPathDense, &mut u), KcStatus::KcOk);
        let mut spec = ptr::null_mut();
        assert_eq!(kc_spectrum_new(u, &mut spec), KcStatus::KcOk);
        let d = kc_spectrum_dim(spec);
        assert_eq!(d, 64);
        let mut phases = vec![0.0; d];
        assert_eq!(kc_spectrum_eigenphases(spec, phases.as_mut_ptr(), d), KcStatus::KcOk);
        assert!(phases.windows(2).all(|w| w[0] <= w[1]));
        assert!(phases.iter().all(|p| *p > -std::f64::consts::PI && *p <= std::f64::consts::PI));

        let mut psi = ptr::null_mut();
        let name = CString::new("neel").unwrap();
        assert_eq!(kc_state_from_preset(6, name.as_ptr(), &mut psi), KcStatus::KcOk);
        let mut diag = KcDiagnostics::default();
        assert_eq!(kc_spectrum_diagnostics(spec, psi, &mut diag), KcStatus::KcOk);
        assert!(diag.ipr >= 1.0 / 64.0 && diag.ipr <= 1.0);
        assert!(diag.staggered_mag.abs() <= 1.0);
        assert_eq!(diag.entropy_block, 3);
        let mut fit = KcThermalFit::default();
        assert_eq!(kc_spectrum_thermal_fit(spec, psi, &mut fit), KcStatus::KcOk);
        assert!(fit.residual < 1e-8);

        kc_state_free(psi);
        kc_spectrum_free(spec);
        kc_floquet_free(u);
    }
}

#[test]
fn spectrum_needs_dense_operator() {
    let cfg = config(4, 1.0, 1.0);
    unsafe {
        let mut u = ptr::null_mut();
        assert_eq!(kc_floquet_new(&cfg, KcPath::KcPathMatrixFree, &mut u), KcStatus::KcOk);
        let mut spec = ptr::null_mut();
        assert_eq!(kc_spectrum_new(u, &mut spec), KcStatus::KcErrConfig);
        assert!(spec.is_null());
        kc_floquet_free(u);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut u = ptr::null_mut();
        assert_eq!(kc_floquet_new(ptr::null(), KcPath::KcPathAuto, &mut u), KcStatus::KcErrNullPointer);
        let bad = config(1, 0.0, 0.0);
        assert_eq!(kc_floquet_new(&bad, KcPath::KcPathAuto, &mut u), KcStatus::KcErrConfig);
        assert!(last_error().contains('L'));

        let mut s = ptr::null_mut();
        let name = CString::new("sideways").unwrap();
        assert_eq!(kc_state_from_preset(4, name.as_ptr(), &mut s), KcStatus::KcErrConfig);
        let amps = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(kc_state_from_amplitudes(2, amps.as_ptr(), 4, &mut s), KcStatus::KcErrInvalidArgument);
        let amps = [2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(kc_state_from_amplitudes(2, amps.as_ptr(), 8, &mut s), KcStatus::KcErrConfig);
        let amps = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(kc_state_from_amplitudes(2, amps.as_ptr(), 8, &mut s), KcStatus::KcOk);
        assert!(last_error().is_empty());
        kc_state_free(s);

        // freeing null is a no-op
        kc_state_free(ptr::null_mut());
        kc_floquet_free(ptr::null_mut());
        kc_spectrum_free(ptr::null_mut());
    }
}

#[test]
fn dd_helpers() {
    let cfg = config(11, 1.0, 0.0);
    unsafe {
        let mut k = 0.0;
        assert_eq!(kc_dd_kick_for_site(&cfg, 1, 1, &mut k), KcStatus::KcOk);
        assert!((k - 16.0 * std::f64::consts::PI / 25.0).abs() < 1e-12);
        assert_eq!(kc_dd_kick_for_site(&cfg, 6, 1, &mut k), KcStatus::KcErrConfig);
        let mut kc = 0.0;
        assert_eq!(kc_dd_kick_for_count(21, 4, 1.0 / 16.0, &mut kc), KcStatus::KcOk);
        assert!((kc - 16.0 * std::f64::consts::PI / 25.0).abs() < 1e-12);
        assert_eq!(kc_dd_kick_for_count(21, 30, 1.0 / 16.0, &mut kc), KcStatus::KcErrConfig);
        assert!((kc_dd_rabi_frequency(&cfg) - 1.0 / (16.0 * std::f64::consts::PI)).abs() < 1e-15);

        let cfg21 = config(21, 1.0, 0.0);
        let mut count = 0;
        assert_eq!(kc_dd_decoupled_sites(&cfg21, kc, 1e-9, ptr::null_mut(), 0, &mut count), KcStatus::KcOk);
        assert_eq!(count, 4);
        let mut sites = [0usize; 2];
        assert_eq!(kc_dd_decoupled_sites(&cfg21, kc, 1e-9, sites.as_mut_ptr(), 2, &mut count), KcStatus::KcOk);
        assert_eq!(sites, [1, 6]);
    }
}

#[test]
fn header_is_valid_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include").join("kickchain.h");
    let text = std::fs::read_to_string(&header).expect("generated header");
    for sym in ["kc_floquet_new", "kc_spectrum_diagnostics", "KC_OK", "KC_ERR_NUMERIC", "KcChainConfig", "kc_last_error_message"] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
    let probe = tempfile_path("kc_probe.c");
    std::fs::write(
        &probe,
        "#include \"kickchain.h\"\n\
         int main(void) {\n\
           KcChainConfig c; KcFloquet *u = 0;\n\
           if (kc_config_default(5, &c) != KC_OK) return 1;\n\
           KcStatus s = kc_floquet_new(&c, KC_PATH_AUTO, &u);\n\
           kc_floquet_free(u);\n\
           return s == KC_OK ? 0 : (int)s;\n\
         }\n",
    )
    .unwrap();
    match Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(header.parent().unwrap()).arg(&probe).output() {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(_) => eprintln!("no C compiler found; skipped syntax check"),
    }
}

fn tempfile_path(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("kickchain-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}
