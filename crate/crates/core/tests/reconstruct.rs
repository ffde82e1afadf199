mod common;

use common::c;
use kahler_qm::fock::CVector;
use kahler_qm::reconstruct::{
    canonical_form, forward_direct, forward_recursive, ray_distance, reconstruct_direct, reconstruct_recursive,
    recursion_condition, TildeData,
};
use kahler_qm::{Error, FockSpace, StateVector, C64};
use proptest::prelude::*;

const LEVELS: usize = 6;

fn space(hbar: f64) -> kahler_qm::Space {
    FockSpace::new(1, LEVELS - 1, hbar).unwrap()
}

fn distance(a: &StateVector, b: &[C64]) -> f64 {
    a.amplitudes().iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// `|L|_1 |L^-1|_1` for the one-mode bidiagonal system, from the closed form
/// `(L^-1)_{kj} = prod_{m=j+1..k} sqrt(2 hbar m) / f^(k-j+1)`.
fn condition_oracle(levels: usize, hbar: f64, f: C64) -> f64 {
    let mut norm_l = 0.0f64;
    let mut norm_inv = 0.0f64;
    for j in 0..levels {
        let below = if j + 1 < levels { (2.0 * hbar * (j + 1) as f64).sqrt() } else { 0.0 };
        norm_l = norm_l.max(f.norm() + below);
        let mut column = 0.0;
        let mut product = 1.0;
        for k in j..levels {
            if k > j {
                product *= (2.0 * hbar * k as f64).sqrt();
            }
            column += product / f.norm().powi((k - j + 1) as i32);
        }
        norm_inv = norm_inv.max(column);
    }
    norm_l * norm_inv
}

#[test]
fn two_modes_fill_in_each_others_cutoff() {
    let s = FockSpace::new(2, 2, 0.9).unwrap();
    let mut z = vec![c(0.0, 0.0); 9];
    for (idx, v) in [([0, 0], c(0.5, 0.1)), ([2, 0], c(-0.3, 0.4)), ([1, 1], c(0.2, 0.0)), ([0, 2], c(0.0, 0.7))] {
        z[s.flat_index(&idx).unwrap()] = v;
    }
    let phi = common::state(&s, &z);
    let data: Vec<(usize, CVector)> = (0..2).map(|m| (m, forward_direct(&phi, m).unwrap())).collect();
    let back = reconstruct_direct(&s, &data).unwrap();
    assert!(distance(&back, &z) < 1e-14);
    // One mode alone loses the amplitudes sitting at its cutoff.
    let only_first = reconstruct_direct(&s, &data[..1]).unwrap();
    assert_eq!(only_first.amplitudes()[s.flat_index(&[2, 0]).unwrap()], c(0.0, 0.0));
    assert!((only_first.amplitudes()[s.flat_index(&[0, 2]).unwrap()] - c(0.0, 0.7)).norm() < 1e-14);
}

#[test]
fn disagreeing_modes_are_reported() {
    let s = FockSpace::new(2, 2, 1.0).unwrap();
    let z: Vec<C64> = (0..9).map(|k| if k % 3 == 2 || k >= 6 { c(0.0, 0.0) } else { c(0.4, 0.1 * k as f64) }).collect();
    let phi = common::state(&s, &z);
    let first = forward_direct(&phi, 0).unwrap();
    let mut second = forward_direct(&phi, 1).unwrap();
    second[s.flat_index(&[0, 1]).unwrap()] *= c(1.5, 0.0);
    match reconstruct_direct(&s, &[(0, first), (1, second)]) {
        Err(Error::Inconsistent { index, disagreement }) => {
            assert_eq!(index, 0);
            assert!(disagreement > 0.1);
        }
        other => panic!("expected an inconsistency, got {other:?}"),
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    let s = space(1.0);
    assert!(matches!(reconstruct_direct(&s, &[]), Err(Error::InvalidParameter(_))));
    assert!(matches!(
        reconstruct_direct(&s, &[(1, CVector::zeros(LEVELS))]),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        reconstruct_direct(&s, &[(0, CVector::zeros(3))]),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(matches!(reconstruct_direct(&s, &[(0, CVector::zeros(LEVELS))]), Err(Error::UndefinedState(_))));
    let phi = StateVector::basis(&s, &[0]).unwrap();
    assert!(forward_recursive(&phi, 1).is_err());
}

#[test]
fn number_states_are_singular_seeds() {
    let s = space(0.7);
    for n in 0..LEVELS {
        let phi = StateVector::basis(&s, &[n]).unwrap();
        let data = forward_recursive(&phi, 0).unwrap();
        assert_eq!(data.f_value, c(0.0, 0.0));
        assert!(matches!(reconstruct_recursive(&s, &data), Err(Error::SingularSeed(_))));
        assert!(matches!(recursion_condition(&s, &data), Err(Error::SingularSeed(_))));
    }
}

#[test]
fn canonical_form_fixes_phase_and_norm() {
    let s = space(1.5);
    let z = [c(0.0, 0.0), c(0.0, -2.0), c(1.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let canon = canonical_form(&common::state(&s, &z)).unwrap();
    assert!((canon.norm_sqr() - 3.0).abs() < 1e-14);
    assert_eq!(canon.amplitudes()[0], c(0.0, 0.0));
    assert!(canon.amplitudes()[1].im.abs() < 1e-15 && canon.amplitudes()[1].re > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn direct_components_are_shifted_amplitudes(
        z in common::amplitudes(LEVELS, LEVELS),
        hbar in 0.2f64..3.0,
    ) {
        let phi = common::state(&space(hbar), &z);
        let x = forward_direct(&phi, 0).unwrap();
        prop_assert_eq!(x[0], c(0.0, 0.0));
        for n in 1..LEVELS {
            let want = c(0.0, -(n as f64 / (2.0 * hbar)).sqrt()) * z[n - 1];
            prop_assert!((x[n] - want).norm() < 1e-14 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn direct_round_trip(z in common::amplitudes(LEVELS, LEVELS - 1), hbar in 0.2f64..3.0) {
        let s = space(hbar);
        let phi = common::state(&s, &z);
        let back = reconstruct_direct(&s, &[(0, forward_direct(&phi, 0).unwrap())]).unwrap();
        prop_assert!(distance(&back, &z) < 1e-13 * (1.0 + phi.radius()));
    }

    #[test]
    fn recursive_data_matches_the_closed_form(
        z in common::amplitudes(LEVELS, LEVELS),
        hbar in 0.2f64..3.0,
    ) {
        let phi = common::state(&space(hbar), &z);
        let data = forward_recursive(&phi, 0).unwrap();
        let a = common::scale(&common::lowering(LEVELS), c((2.0 * hbar).sqrt(), 0.0));
        let d = common::norm_sqr(&z);
        let f = common::expectation(&common::dagger(&a), &z) / d;
        prop_assert!((data.f_value - f).norm() < 1e-13 * (1.0 + f.norm()));
        for n in 0..LEVELS {
            let lower = if n > 0 { z[n - 1] * (2.0 * hbar * n as f64).sqrt() } else { c(0.0, 0.0) };
            let want = c(0.0, -1.0 / d) * (lower - z[n] * f);
            prop_assert!((data.components[n] - want).norm() < 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn recursive_round_trip_within_the_condition_bound(
        z in common::amplitudes(4, 4),
        hbar in 0.2f64..3.0,
    ) {
        let s = FockSpace::new(1, 3, hbar).unwrap();
        let phi = common::state(&s, &z);
        let data = forward_recursive(&phi, 0).unwrap();
        prop_assume!(data.f_value.norm() > 1e-3 * phi.norm_sqr().sqrt());
        let kappa = recursion_condition(&s, &data).unwrap();
        prop_assert!((kappa - condition_oracle(4, hbar, data.f_value)).abs() < 1e-9 * kappa);
        let back = reconstruct_recursive(&s, &data).unwrap();
        let err = distance(&back, &z) / phi.radius();
        prop_assert!(err <= 4.0 * kappa * f64::EPSILON, "error {} with condition {}", err, kappa);
        prop_assert!(ray_distance(&back, &phi).unwrap() <= 8.0 * kappa * f64::EPSILON);
    }

    #[test]
    fn recursive_route_follows_rescaling(
        z in common::amplitudes(4, 4),
        re in -3.0f64..3.0,
        im in 0.1f64..3.0,
    ) {
        let s = FockSpace::new(1, 3, 1.0).unwrap();
        let phi = common::state(&s, &z);
        let data = forward_recursive(&phi, 0).unwrap();
        prop_assume!(data.f_value.norm() > 1e-2);
        let k = c(re, im);
        let moved = forward_recursive(&phi.scaled(k).unwrap(), 0).unwrap();
        prop_assert!((moved.f_value - data.f_value).norm() < 1e-12 * (1.0 + data.f_value.norm()));
        let expected = &data.components / k.conj();
        prop_assert!((&moved.components - &expected).norm() < 1e-12 * (1.0 + expected.norm()));
        let back = reconstruct_recursive(&s, &moved).unwrap();
        let target: Vec<C64> = z.iter().map(|v| v * k).collect();
        let kappa = recursion_condition(&s, &moved).unwrap();
        prop_assert!(distance(&back, &target) <= 4.0 * kappa * f64::EPSILON * (1.0 + back.radius()));
    }

    #[test]
    fn ray_distance_ignores_scale(z in common::amplitudes(LEVELS, LEVELS), re in 0.1f64..3.0, im in -3.0f64..3.0) {
        let phi = common::state(&space(1.0), &z);
        let moved = phi.scaled(c(re, im)).unwrap();
        prop_assert!(ray_distance(&phi, &moved).unwrap() < 1e-12);
    }
}

#[test]
fn supplied_seed_below_threshold_is_refused() {
    let s = space(1.0);
    let data = TildeData { components: CVector::from_element(LEVELS, c(1.0, 0.0)), f_value: c(1e-13, 0.0), mode: 0 };
    assert!(matches!(reconstruct_recursive(&s, &data), Err(Error::SingularSeed(_))));
}
