use std::ffi::CStr;
use std::ptr;

use phaseprobe_ffi::*;

fn state(re: &[f64]) -> *mut PpFockVector {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pp_fock_new(re.as_ptr(), ptr::null(), re.len(), &mut h) }, PpStatus::Ok);
    h
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(pp_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn state_round_trip() {
    let s = 0.5f64.sqrt();
    let h = state(&[s, 0.0, s]);
    let mut len = 0;
    assert_eq!(unsafe { pp_fock_len(h, &mut len) }, PpStatus::Ok);
    assert_eq!(len, 3);
    let (mut re, mut im) = ([0.0; 3], [9.0; 3]);
    assert_eq!(unsafe { pp_fock_amplitudes(h, re.as_mut_ptr(), im.as_mut_ptr(), 3) }, PpStatus::Ok);
    assert_eq!(re, [s, 0.0, s]);
    assert_eq!(im, [0.0; 3]);
    assert_eq!(unsafe { pp_fock_amplitudes(h, re.as_mut_ptr(), ptr::null_mut(), 2) }, PpStatus::BufferTooSmall);

    let mut n = 0.0;
    assert_eq!(unsafe { pp_mean_photon(h, &mut n) }, PpStatus::Ok);
    assert!((n - 1.0).abs() < 1e-15);
    let mut d = 0.0;
    assert_eq!(unsafe { pp_covariant_error(h, &mut d) }, PpStatus::Ok);
    assert!((d - 0.5).abs() < 1e-15);
    unsafe { pp_fock_free(h) };
}

#[test]
fn contract_errors_carry_messages() {
    let h = state(&[1.0, 1.0]);
    let mut n = 0.0;
    assert_eq!(unsafe { pp_mean_photon(h, &mut n) }, PpStatus::Contract);
    assert!(last_error().contains("normalized"));

    let mut unit = ptr::null_mut();
    assert_eq!(unsafe { pp_fock_normalize(h, &mut unit) }, PpStatus::Ok);
    assert_eq!(unsafe { pp_mean_photon(unit, &mut n) }, PpStatus::Ok);
    assert!((n - 0.5).abs() < 1e-15);
    unsafe {
        pp_fock_free(h);
        pp_fock_free(unit);
        pp_fock_free(ptr::null_mut());
    }

    let zero = state(&[0.0, 0.0]);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pp_fock_normalize(zero, &mut out) }, PpStatus::Normalization);
    assert!(out.is_null());
    unsafe { pp_fock_free(zero) };
}

#[test]
fn null_pointers_rejected() {
    let mut n = 0.0;
    assert_eq!(unsafe { pp_mean_photon(ptr::null(), &mut n) }, PpStatus::NullPointer);
    assert!(last_error().contains("state"));
    let h = state(&[1.0]);
    assert_eq!(unsafe { pp_mean_photon(h, ptr::null_mut()) }, PpStatus::NullPointer);
    unsafe { pp_fock_free(h) };
}

#[test]
fn tau_handle() {
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { pp_minimize_tau(10.0, 512, &mut r) }, PpStatus::Ok);
    let mut s = PpTauSummary::default();
    assert_eq!(unsafe { pp_tau_summary(r, &mut s) }, PpStatus::Ok);
    assert!(s.e2tau >= 0.125 && s.e2tau <= 4.05);
    assert!(s.has_multiplier);
    assert_eq!(s.sector, 0);

    let mut opt = ptr::null_mut();
    assert_eq!(unsafe { pp_tau_optimizer(r, &mut opt) }, PpStatus::Ok);
    let mut d = 0.0;
    assert_eq!(unsafe { pp_covariant_error(opt, &mut d) }, PpStatus::Ok);
    assert!((d - s.tau).abs() < 1e-12);
    unsafe {
        pp_fock_free(opt);
        pp_tau_free(r);
    }

    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { pp_minimize_tau(10.0, 16, &mut bad) }, PpStatus::Truncation);
    assert_eq!(unsafe { pp_minimize_tau(-1.0, 16, &mut bad) }, PpStatus::Precondition);
    assert!(bad.is_null());

    let mut zero = ptr::null_mut();
    assert_eq!(unsafe { pp_minimize_tau(0.0, 4, &mut zero) }, PpStatus::Ok);
    assert_eq!(unsafe { pp_tau_summary(zero, &mut s) }, PpStatus::Ok);
    assert!(!s.has_multiplier && s.multiplier.is_nan());
    unsafe { pp_tau_free(zero) };
}

#[test]
fn herald_and_squeezed_probe() {
    let betas = [0.343824, 2.59058, -0.343824, -2.59058];
    let q = 2f64.tanh();
    let mut phi = [0.0; 5];
    let mut norm = 0.0;
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pp_herald(q, betas.as_ptr(), phi.as_mut_ptr(), &mut norm, &mut h) }, PpStatus::Ok);
    assert_eq!(phi[1], 0.0);
    assert_eq!(phi[3], 0.0);
    let mut f = 0.0;
    assert_eq!(unsafe { pp_herald_fidelity(q, betas.as_ptr(), h, &mut f) }, PpStatus::Ok);
    assert!((f - 1.0).abs() < 1e-12);
    assert_eq!(
        unsafe { pp_herald(1.5, betas.as_ptr(), phi.as_mut_ptr(), &mut norm, ptr::null_mut()) },
        PpStatus::Precondition
    );

    let mut p0 = ptr::null_mut();
    let mut p1 = ptr::null_mut();
    assert_eq!(unsafe { pp_psi74_state(0.0, 5, &mut p0) }, PpStatus::Ok);
    assert_eq!(unsafe { pp_psi74_state(1.0, 0, &mut p1) }, PpStatus::Ok);
    let mut n = 0.0;
    assert_eq!(unsafe { pp_mean_photon(p0, &mut n) }, PpStatus::Ok);
    assert!((n - 80.0 / 35.0).abs() < 1e-12);
    unsafe {
        pp_fock_free(h);
        pp_fock_free(p0);
        pp_fock_free(p1);
    }
}

#[test]
fn fisher_report() {
    let s = 0.5f64.sqrt();
    let h = state(&[s, 0.0, s]);
    let mut r = PpFisherReport::default();
    assert_eq!(unsafe { pp_sld_fisher(h, &mut r) }, PpStatus::Ok);
    assert!((r.j - 4.0).abs() < 1e-12);
    assert!((r.mcrb * r.j - 2.0).abs() < 1e-12);
    let n = state(&[0.0, 1.0]);
    assert_eq!(unsafe { pp_sld_fisher(n, &mut r) }, PpStatus::Ok);
    assert!(r.mcrb_infinite && r.mcrb.is_infinite());
    let mut f = 0.0;
    assert_eq!(unsafe { pp_fidelity(h, n, &mut f) }, PpStatus::Ok);
    assert_eq!(f, 0.0);
    unsafe {
        pp_fock_free(h);
        pp_fock_free(n);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(pp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/phaseprobe.h")).unwrap();
    for name in ["pp_fock_new", "pp_minimize_tau", "pp_tau_summary", "pp_herald", "pp_last_error_message", "PP_STATUS_OK"]
    {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/phaseprobe.h"))
        .status()
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    assert!(status.success());
}
