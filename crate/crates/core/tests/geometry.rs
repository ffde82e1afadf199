mod common;

use common::c;
use kahler_qm::fock::{build_coordinate_operators, CMatrix, CVector};
use kahler_qm::geometry::{
    christoffel, christoffel_fd, covariant_derivative_check, fs_distance, killing_reduce, line_element,
    line_element_braket, metric, projected_derivative_fd, vertical_fields, MetricPicture, Variance,
};
use kahler_qm::{FockSpace, StateVector};
use proptest::prelude::*;

const LEVELS: usize = 5;

fn space(hbar: f64) -> kahler_qm::Space {
    FockSpace::new(1, LEVELS - 1, hbar).unwrap()
}

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.norm()))
}

#[test]
fn orthogonal_basis_states_are_a_quarter_circle_apart() {
    for hbar in [0.5, 1.0, 2.0] {
        let s = FockSpace::new(2, 3, hbar).unwrap();
        let expected = std::f64::consts::PI * (hbar / 2.0).sqrt();
        for (a, b) in [([0, 0], [1, 0]), ([0, 1], [3, 3]), ([2, 1], [1, 2])] {
            let d = fs_distance(&StateVector::basis(&s, &a).unwrap(), &StateVector::basis(&s, &b).unwrap()).unwrap();
            assert!((d - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn hilbert_metric_is_flat_and_omega_is_i_g() {
    let s = space(1.0);
    let phi = StateVector::basis(&s, &[1]).unwrap();
    let g = metric(MetricPicture::Hilbert, &phi, Variance::Covariant).unwrap();
    let inv = metric(MetricPicture::Hilbert, &phi, Variance::Contravariant).unwrap();
    assert!(max_entry(&(g.block() - CMatrix::identity(LEVELS, LEVELS) * c(0.5, 0.0))) == 0.0);
    assert!(max_entry(&(g.block() * inv.block() - CMatrix::identity(LEVELS, LEVELS))) < 1e-15);
    let omega = g.symplectic_partner().unwrap();
    assert!(max_entry(&(omega - g.block() * c(0.0, 1.0))) == 0.0);
    assert!(!g.is_degenerate());
}

#[test]
fn christoffel_symbols_match_finite_differences() {
    let s = FockSpace::new(2, 2, 0.7).unwrap();
    let z: Vec<_> = (0..9).map(|k| c(0.3 + 0.1 * k as f64, 0.05 * k as f64 - 0.2)).collect();
    let phi = common::state(&s, &z);
    let fd = christoffel_fd(&phi, 1e-5).unwrap();
    assert!(christoffel(&phi).max_difference(&fd) < 1e-6);
}

#[test]
fn killing_fields_are_the_radial_and_phase_directions() {
    let s = space(1.3);
    let z: Vec<_> = (0..LEVELS).map(|k| c(1.0 / (1.0 + k as f64), 0.2 * k as f64)).collect();
    let phi = common::state(&s, &z);
    let [tau, theta] = vertical_fields(&phi);
    for (k, v) in z.iter().enumerate() {
        assert_eq!(tau.holo[k], *v);
        assert_eq!(tau.anti[k], v.conj());
        assert!((theta.holo[k] - c(0.0, 1.0) * v).norm() < 1e-15);
    }
    // Both have squared length hbar under the conformal metric.
    assert!((tau.half_norm() * 2.0 - c(2.0 * 1.3, 0.0)).norm() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_matches_overlap_oracle(
        a in common::amplitudes(LEVELS, LEVELS),
        b in common::amplitudes(LEVELS, LEVELS),
        hbar in 0.2f64..3.0,
    ) {
        let s = space(hbar);
        let (pa, pb) = (common::state(&s, &a), common::state(&s, &b));
        let d = fs_distance(&pa, &pb).unwrap();
        prop_assert!((d - common::fs_distance(&a, &b, hbar)).abs() < 1e-12);
        prop_assert!((d - fs_distance(&pb, &pa).unwrap()).abs() < 1e-15);
        prop_assert!(d <= std::f64::consts::PI * (hbar / 2.0).sqrt() + 1e-12);
    }

    #[test]
    fn distance_is_a_function_of_rays(
        a in common::amplitudes(LEVELS, LEVELS),
        b in common::amplitudes(LEVELS, LEVELS),
        re in 0.1f64..3.0,
        im in -3.0f64..3.0,
    ) {
        let s = space(1.0);
        let (pa, pb) = (common::state(&s, &a), common::state(&s, &b));
        let moved = pa.scaled(c(re, im)).unwrap();
        prop_assert!((fs_distance(&pa, &pb).unwrap() - fs_distance(&moved, &pb).unwrap()).abs() < 1e-7);
        prop_assert!(fs_distance(&pa, &moved).unwrap() < 1e-7);
    }

    #[test]
    fn triangle_inequality(
        a in common::amplitudes(LEVELS, LEVELS),
        b in common::amplitudes(LEVELS, LEVELS),
        d in common::amplitudes(LEVELS, LEVELS),
    ) {
        let s = space(1.0);
        let (pa, pb, pd) = (common::state(&s, &a), common::state(&s, &b), common::state(&s, &d));
        let direct = fs_distance(&pa, &pd).unwrap();
        let detour = fs_distance(&pa, &pb).unwrap() + fs_distance(&pb, &pd).unwrap();
        prop_assert!(direct <= detour + 1e-12);
    }

    #[test]
    fn line_elements_agree_across_pictures(
        z in common::chart_amplitudes(LEVELS, LEVELS),
        dz in common::amplitudes(LEVELS, LEVELS),
        hbar in 0.2f64..3.0,
    ) {
        let s = space(hbar);
        let phi = common::state(&s, &z);
        let v = CVector::from_column_slice(&dz);
        let braket = line_element_braket(&phi, &v).unwrap();
        let homogeneous = line_element(MetricPicture::Homogeneous, &phi, &v).unwrap();
        let affine = line_element(MetricPicture::Affine, &phi, &v).unwrap();
        let tol = 1e-10 * (1.0 + braket);
        prop_assert!((braket - homogeneous).abs() < tol);
        prop_assert!((braket - affine).abs() < tol);
        // Small steps along dz have length sqrt(ds^2) times the step.
        let h = 1e-5;
        let moved: Vec<_> = z.iter().zip(&dz).map(|(a, b)| a + b * h).collect();
        let d = common::fs_distance(&z, &moved, hbar) / h;
        prop_assert!((d * d - braket).abs() < 1e-4 * (1.0 + braket));
    }

    #[test]
    fn homogeneous_metric_annihilates_vertical_directions(
        z in common::amplitudes(LEVELS, LEVELS),
        hbar in 0.2f64..3.0,
    ) {
        let s = space(hbar);
        let phi = common::state(&s, &z);
        let g = metric(MetricPicture::Homogeneous, &phi, Variance::Covariant).unwrap();
        prop_assert!(g.is_degenerate());
        prop_assert!(g.hermiticity_residual() < 1e-14);
        let zv = CVector::from_column_slice(&z);
        prop_assert!((zv.transpose() * g.block()).norm() < 1e-13);
        prop_assert!((g.block() * zv.conjugate()).norm() < 1e-13);
    }

    #[test]
    fn killing_reduction_gives_the_fubini_study_blocks(
        z in common::amplitudes(LEVELS, LEVELS),
        hbar in 0.2f64..3.0,
    ) {
        let s = space(hbar);
        let phi = common::state(&s, &z);
        let d = common::norm_sqr(&z);
        let inv = killing_reduce(&metric(MetricPicture::HilbertConformal, &phi, Variance::Contravariant).unwrap(), &phi).unwrap();
        let cov = killing_reduce(&metric(MetricPicture::HilbertConformal, &phi, Variance::Covariant).unwrap(), &phi).unwrap();
        let proj = killing_reduce(&metric(MetricPicture::HilbertConformal, &phi, Variance::Mixed).unwrap(), &phi).unwrap();
        for m in 0..LEVELS {
            for n in 0..LEVELS {
                let delta = if m == n { 1.0 } else { 0.0 };
                let want_inv = (c(d * delta, 0.0) - z[m] * z[n].conj()) / hbar;
                let want_cov = (c(delta, 0.0) - z[m].conj() * z[n] / d) * (hbar / d);
                let want_proj = c(delta, 0.0) - z[m].conj() * z[n] / d;
                prop_assert!((inv.block()[(m, n)] - want_inv).norm() < 1e-12 * (1.0 + d / hbar));
                prop_assert!((cov.block()[(m, n)] - want_cov).norm() < 1e-12);
                prop_assert!((proj.block()[(m, n)] - want_proj).norm() < 1e-12);
            }
        }
        let p = proj.block();
        prop_assert!(max_entry(&(p * p - p)) < 1e-12);
    }

    #[test]
    fn affine_metric_and_inverse_are_inverse(
        z in common::chart_amplitudes(LEVELS, LEVELS),
        hbar in 0.2f64..3.0,
    ) {
        let s = space(hbar);
        let phi = common::state(&s, &z);
        let g = metric(MetricPicture::Affine, &phi, Variance::Covariant).unwrap();
        let inv = metric(MetricPicture::Affine, &phi, Variance::Contravariant).unwrap();
        let prod = g.block().transpose() * inv.block();
        prop_assert!(max_entry(&(prod - CMatrix::identity(LEVELS - 1, LEVELS - 1))) < 1e-10);
    }

    #[test]
    fn covariant_derivative_reduces_to_the_hessian(
        m in common::hermitian(LEVELS),
        z in common::amplitudes(LEVELS, LEVELS),
    ) {
        let s = space(1.0);
        let op = common::from_dense(&s, &m);
        let phi = common::state(&s, &z);
        let check = covariant_derivative_check(&op, &phi).unwrap();
        prop_assert!(check.max_residual() < 1e-10);
        let fd = projected_derivative_fd(&op, &phi, 1e-5).unwrap();
        prop_assert!(max_entry(&(fd - &check.rhs)) < 1e-6);
    }
}

#[test]
fn coordinate_operator_covariant_derivative() {
    let s = FockSpace::new(2, 3, 0.9).unwrap();
    let ops = build_coordinate_operators(&s);
    let z: Vec<_> = (0..16).map(|k| c(((k * 7) % 5) as f64 * 0.2 + 0.1, ((k * 3) % 4) as f64 * 0.1)).collect();
    let phi = common::state(&s, &z);
    for op in [ops.x(0), ops.p(1), ops.number(0)] {
        assert!(covariant_derivative_check(op, &phi).unwrap().max_residual() < 1e-10);
    }
}
