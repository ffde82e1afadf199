use std::ffi::{CStr, CString};
use std::ptr;

use kahler_qm_ffi::*;

struct Fixture {
    space: *mut KqmSpace,
    dim: usize,
}

impl Fixture {
    fn new(modes: usize, cutoff: usize, hbar: f64) -> Self {
        let mut space = ptr::null_mut();
        assert_eq!(unsafe { kqm_space_new(modes, cutoff, hbar, &mut space) }, KqmStatus::Ok);
        let mut dim = 0;
        assert_eq!(unsafe { kqm_space_dim(space, &mut dim) }, KqmStatus::Ok);
        Fixture { space, dim }
    }

    fn state(&self, z: &[KqmComplex]) -> *mut KqmState {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { kqm_state_new(self.space, z.as_ptr(), z.len(), &mut out) }, KqmStatus::Ok);
        out
    }

    fn coordinate(&self, which: u32, mode: usize) -> *mut KqmOperator {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { kqm_operator_coordinate(self.space, which, mode, &mut out) }, KqmStatus::Ok);
        out
    }

    fn amplitudes(&self, state: *const KqmState) -> Vec<KqmComplex> {
        let mut buf = vec![KqmComplex::default(); self.dim];
        assert_eq!(unsafe { kqm_state_amplitudes(state, buf.as_mut_ptr(), buf.len()) }, KqmStatus::Ok);
        buf
    }
}

impl Drop for Fixture {
    fn drop(&mut self) {
        unsafe { kqm_space_free(self.space) };
    }
}

fn c(re: f64, im: f64) -> KqmComplex {
    KqmComplex { re, im }
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe { kqm_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn distance(a: &[KqmComplex], b: &[KqmComplex]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.re - y.re).powi(2) + (x.im - y.im).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[test]
fn space_dimension_counts_product_basis() {
    assert_eq!(Fixture::new(1, 8, 1.0).dim, 9);
    assert_eq!(Fixture::new(2, 4, 1.0).dim, 25);
}

#[test]
fn invalid_space_reports_code_and_message() {
    let mut space = ptr::null_mut();
    assert_eq!(unsafe { kqm_space_new(1, 1, 1.0, &mut space) }, KqmStatus::InvalidSpace);
    assert!(space.is_null());
    assert!(last_error().contains("cutoff"));
    assert_eq!(kqm_last_error_length(), last_error().len());
}

#[test]
fn null_handles_are_rejected() {
    let mut out = KqmComplex::default();
    let status = unsafe { kqm_evaluate(ptr::null(), ptr::null(), KQM_PICTURE_HILBERT, &mut out) };
    assert_eq!(status, KqmStatus::NullPointer);
    assert!(last_error().contains("op"));
    unsafe {
        kqm_space_free(ptr::null_mut());
        kqm_state_free(ptr::null_mut());
        kqm_operator_free(ptr::null_mut());
        kqm_string_free(ptr::null_mut());
    }
}

#[test]
fn wrong_buffer_length_is_a_dimension_mismatch() {
    let f = Fixture::new(1, 3, 1.0);
    let z = [c(1.0, 0.0), c(0.0, 0.0)];
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { kqm_state_new(f.space, z.as_ptr(), z.len(), &mut out) }, KqmStatus::DimensionMismatch);
}

#[test]
fn number_operator_expectation_in_every_picture() {
    let f = Fixture::new(1, 4, 0.5);
    // |z|^2 = 2 hbar with weights 1/2, 1/2 on |1>, |2>.
    let phi = f.state(&[c(0.0, 0.0), c(0.5f64.sqrt(), 0.0), c(0.0, 0.5f64.sqrt()), c(0.0, 0.0), c(0.0, 0.0)]);
    let n = f.coordinate(KQM_COORDINATE_NUMBER, 0);
    for (picture, expected) in [
        (KQM_PICTURE_HILBERT, 1.5),
        (KQM_PICTURE_HOMOGENEOUS, 1.5),
    ] {
        let mut v = KqmComplex::default();
        assert_eq!(unsafe { kqm_evaluate(n, phi, picture, &mut v) }, KqmStatus::Ok);
        assert!((v.re - expected).abs() < 1e-14 && v.im.abs() < 1e-14, "{picture}: {v:?}");
    }
    let mut v = KqmComplex::default();
    assert_eq!(unsafe { kqm_evaluate(n, phi, KQM_PICTURE_AFFINE, &mut v) }, KqmStatus::Chart);
    assert_eq!(unsafe { kqm_evaluate(n, phi, 7, &mut v) }, KqmStatus::InvalidParameter);
    unsafe {
        kqm_operator_free(n);
        kqm_state_free(phi);
    }
}

#[test]
fn canonical_bracket_and_product() {
    let f = Fixture::new(1, 6, 1.0);
    let phi = f.state(&[c(1.0, 0.0), c(0.3, 0.2), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let x = f.coordinate(KQM_COORDINATE_X, 0);
    let p = f.coordinate(KQM_COORDINATE_P, 0);
    let (mut geo, mut alg) = (KqmComplex::default(), KqmComplex::default());
    let status = unsafe { kqm_bracket(x, p, phi, KQM_BRACKET_POISSON, KQM_PICTURE_HOMOGENEOUS, &mut geo, &mut alg) };
    assert_eq!(status, KqmStatus::Ok);
    assert!((geo.re - 1.0).abs() < 1e-12 && geo.im.abs() < 1e-12);
    assert!((alg.re - 1.0).abs() < 1e-12 && alg.im.abs() < 1e-12);

    let mut product = KqmComplex::default();
    assert_eq!(unsafe { kqm_kahler_product(x, p, phi, KQM_PICTURE_HILBERT, &mut product) }, KqmStatus::Ok);
    // With hbar = 1, x p = (-i/2)(a^2 - a^dag^2 - 1) below the cutoff, and a^2
    // has no diagonal part on span{|0>, |1>}, so <z|x p|z> = (i/2)|z|^2 and
    // H = <z|x p|z> / 2.
    let norm_sqr = 1.0 + 0.3 * 0.3 + 0.2 * 0.2;
    assert!(product.re.abs() < 1e-12);
    assert!((product.im - norm_sqr / 4.0).abs() < 1e-12, "{product:?}");
    unsafe {
        kqm_operator_free(x);
        kqm_operator_free(p);
        kqm_state_free(phi);
    }
}

#[test]
fn flow_of_number_operator_is_a_phase() {
    let f = Fixture::new(1, 4, 1.0);
    let z = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let phi = f.state(&z);
    let n = f.coordinate(KQM_COORDINATE_NUMBER, 0);
    let mut end = ptr::null_mut();
    let t = 0.7;
    assert_eq!(unsafe { kqm_flow(n, phi, t, 1e-3, KQM_INTEGRATOR_SPLIT_EXACT, &mut end) }, KqmStatus::Ok);
    let got = f.amplitudes(end);
    let expected: Vec<KqmComplex> = z
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let (s, co) = (-(k as f64) * t).sin_cos();
            c(a.re * co - a.im * s, a.re * s + a.im * co)
        })
        .collect();
    assert!(distance(&got, &expected) < 1e-12);
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { kqm_flow(n, phi, t, 1e-3, 9, &mut bad) }, KqmStatus::InvalidParameter);
    unsafe {
        kqm_state_free(end);
        kqm_operator_free(n);
        kqm_state_free(phi);
    }
}

#[test]
fn non_hermitian_generator_is_rejected() {
    let f = Fixture::new(1, 3, 1.0);
    let phi = f.state(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let a = f.coordinate(KQM_COORDINATE_ALPHA, 0);
    let mut end = ptr::null_mut();
    assert_eq!(unsafe { kqm_flow(a, phi, 1.0, 1e-2, KQM_INTEGRATOR_RK4, &mut end) }, KqmStatus::NotHermitian);
    unsafe {
        kqm_operator_free(a);
        kqm_state_free(phi);
    }
}

#[test]
fn matrix_operator_round_trip() {
    let f = Fixture::new(1, 2, 1.0);
    let mut entries = [KqmComplex::default(); 9];
    entries[0] = c(2.0, 0.0);
    entries[4] = c(-1.0, 0.0);
    let mut op = ptr::null_mut();
    assert_eq!(unsafe { kqm_operator_from_matrix(f.space, entries.as_ptr(), 9, &mut op) }, KqmStatus::Ok);
    let phi = f.state(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let mut v = KqmComplex::default();
    assert_eq!(unsafe { kqm_evaluate(op, phi, KQM_PICTURE_HOMOGENEOUS, &mut v) }, KqmStatus::Ok);
    assert!((v.re - 0.5).abs() < 1e-14);
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { kqm_operator_from_matrix(f.space, entries.as_ptr(), 8, &mut bad) }, KqmStatus::DimensionMismatch);
    unsafe {
        kqm_operator_free(op);
        kqm_state_free(phi);
    }
}

#[test]
fn direct_reconstruction_round_trip() {
    let f = Fixture::new(1, 4, 0.8);
    let z = [c(0.5, 0.1), c(-0.2, 0.4), c(0.3, 0.0), c(0.0, -0.1), c(0.0, 0.0)];
    let phi = f.state(&z);
    let mut data = vec![KqmComplex::default(); f.dim];
    assert_eq!(unsafe { kqm_forward_direct(phi, 0, data.as_mut_ptr(), data.len()) }, KqmStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { kqm_reconstruct_direct(f.space, 0, data.as_ptr(), data.len(), &mut back) }, KqmStatus::Ok);
    assert!(distance(&f.amplitudes(back), &z) < 1e-14);
    unsafe {
        kqm_state_free(back);
        kqm_state_free(phi);
    }
}

#[test]
fn recursive_reconstruction_and_singular_seed() {
    let f = Fixture::new(1, 3, 1.0);
    let z = [c(1.0, 0.0), c(0.5, 0.5), c(0.2, 0.0), c(0.0, 0.1)];
    let phi = f.state(&z);
    let mut data = vec![KqmComplex::default(); f.dim];
    let mut seed = KqmComplex::default();
    assert_eq!(unsafe { kqm_forward_recursive(phi, 0, data.as_mut_ptr(), data.len(), &mut seed) }, KqmStatus::Ok);
    let mut back = ptr::null_mut();
    let status = unsafe { kqm_reconstruct_recursive(f.space, 0, data.as_ptr(), data.len(), seed, &mut back) };
    assert_eq!(status, KqmStatus::Ok);
    let got = f.amplitudes(back);
    let norm = z.iter().map(|a| a.re * a.re + a.im * a.im).sum::<f64>().sqrt();
    assert!(distance(&got, &z) / norm < 1e-12);

    let mut refused = ptr::null_mut();
    let status = unsafe { kqm_reconstruct_recursive(f.space, 0, data.as_ptr(), data.len(), c(0.0, 0.0), &mut refused) };
    assert_eq!(status, KqmStatus::SingularSeed);
    assert!(refused.is_null());
    unsafe {
        kqm_state_free(back);
        kqm_state_free(phi);
    }
}

#[test]
fn verify_returns_json_report() {
    let suite = CString::new("kahler-functions").unwrap();
    let mut cfg = kqm_suite_config_default();
    cfg.cases = 5;
    let mut json = ptr::null_mut();
    let mut passed = false;
    assert_eq!(unsafe { kqm_verify(suite.as_ptr(), &cfg, &mut json, &mut passed) }, KqmStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { kqm_string_free(json) };
    assert!(passed);
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["suite"], "kahler-functions");
    assert!(report["entries"].as_array().unwrap().len() > 3);
}

#[test]
fn verify_rejects_unknown_suite() {
    let suite = CString::new("no-such-suite").unwrap();
    let mut json = ptr::null_mut();
    let status = unsafe { kqm_verify(suite.as_ptr(), ptr::null(), &mut json, ptr::null_mut()) };
    assert_eq!(status, KqmStatus::InvalidParameter);
    assert!(json.is_null());
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(kqm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
