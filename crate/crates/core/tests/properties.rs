mod common;

use proptest::prelude::*;

use djspec::analysis::{dispersion_sweep, DispersionTarget};
use djspec::eigen::eigensolve;
use djspec::hamiltonian::{build_single_mode, build_two_mode_full, build_two_mode_simplified};
use djspec::models::{transmon_operator, u_classical};
use djspec::numerics::Numerics;
use djspec::params::{CircuitForm, CircuitSpec, DerivedParams, Offsets};
use djspec::potential::sample_and_fourier;

fn params(e_c: f64, ratio: f64, k: f64, lambda: f64, offsets: Offsets) -> DerivedParams {
    let e_j_sigma = 40.0;
    CircuitSpec::new(
        CircuitForm::Energy {
            e_c,
            e_c_int: Some(e_j_sigma / ratio),
            k,
            lambda,
            e_j_sigma,
        },
        offsets,
    )
    .derive()
    .unwrap()
}

fn lowest(op: &djspec::operator::ChargeBasisOperator, n: usize) -> Vec<f64> {
    eigensolve(op, n, false).unwrap().eigenvalues
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transmon_is_periodic_and_even_in_offset(ng in -1.0f64..1.0, ej in 1.0f64..40.0) {
        let at = |x: f64| lowest(&transmon_operator(0.5, ej, x, 20, false).unwrap(), 4);
        let base = at(ng);
        prop_assert!(close(&base, &at(ng + 1.0), 1e-10));
        prop_assert!(close(&base, &at(-ng), 1e-10));
    }

    #[test]
    fn two_mode_spectrum_is_periodic_in_junction_offsets(
        n1 in -0.5f64..0.5,
        n2 in -0.5f64..0.5,
        k in 0.0f64..0.4,
        lambda in 0.5f64..1.0,
    ) {
        let at = |a: f64, b: f64| {
            let p = params(0.4, 16.0, k, lambda, Offsets::Junction { n_g1: a, n_g2: b });
            lowest(&build_two_mode_full(&p, 14).unwrap(), 4)
        };
        let base = at(n1, n2);
        prop_assert!(close(&base, &at(n1 + 1.0, n2), 1e-8));
        prop_assert!(close(&base, &at(n1, n2 - 1.0), 1e-8));
        prop_assert!(close(&base, &at(-n1, -n2), 1e-8));
    }

    #[test]
    fn hamiltonians_are_symmetric(
        e_c in 0.1f64..1.0,
        ratio in 8.0f64..64.0,
        k in 0.0f64..0.6,
        lambda in 0.0f64..1.0,
        ng in -1.0f64..1.0,
    ) {
        let p = params(e_c, ratio, k, lambda, Offsets::Mode { n_g: ng, n_big_g: 0.3 });
        let full = build_two_mode_full(&p, 5).unwrap();
        prop_assert!(full.max_asymmetry() <= 1e-14 * full.max_abs());
        let simple = build_two_mode_simplified(&p, 5, &Numerics::default()).unwrap();
        prop_assert!(simple.max_asymmetry() <= 1e-14 * simple.max_abs());
        let dense = full.to_dense();
        let n = dense.len();
        prop_assert!((0..n).all(|i| (0..n).all(|j| dense[i][j] == dense[j][i])));
    }

    #[test]
    fn enlarging_the_cutoff_never_raises_a_level(lambda in 0.5f64..1.0, ng in -0.5f64..0.5) {
        let pot = sample_and_fourier(|x| u_classical(x, lambda, 40.0), 1024, 32).unwrap();
        let at = |n: usize| lowest(&build_single_mode(0.2, ng, &pot, n).unwrap(), 5);
        let (small, large) = (at(12), at(13));
        prop_assert!(small.iter().zip(&large).all(|(s, l)| *l <= *s + 1e-9));
    }

    #[test]
    fn parameters_survive_a_round_trip_through_capacitances(
        e_c in 0.05f64..2.0,
        ratio in 4.0f64..100.0,
        k in -0.6f64..0.6,
        lambda in 0.0f64..1.0,
    ) {
        let p = params(e_c, ratio, k, lambda, Offsets::default());
        let back = CircuitSpec::new(
            CircuitForm::Capacitance { c: p.c, c_j1: p.c_j1, c_j2: p.c_j2, e_j1: p.e_j1, e_j2: p.e_j2 },
            Offsets::default(),
        )
        .derive()
        .unwrap();
        for (a, b) in [(p.e_c, back.e_c), (p.e_c_int, back.e_c_int), (p.k, back.k), (p.lambda, back.lambda)] {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
        }
        let again = p.energy_spec().derive().unwrap();
        prop_assert!((again.c - p.c).abs() <= 1e-9 * p.c);
    }

    #[test]
    fn offset_dispersion_is_symmetric_about_half(ratio in 4.0f64..16.0, ng in 0.0f64..0.5) {
        let p = params(0.2, ratio, 0.0, 1.0, Offsets::default());
        let curves = dispersion_sweep(
            DispersionTarget::FastOnly,
            &p,
            &[ng, 1.0 - ng],
            &Numerics::default(),
        )
        .unwrap();
        let e = &curves.levels[0];
        prop_assert!((e[0] - e[1]).abs() <= 1e-10 * (1.0 + e[0].abs()));
    }
}

/// Without junction asymmetry the simplified model splits into a free rotor and a transmon.
#[test]
fn symmetric_junction_limit_separates_the_modes() {
    let p = params(
        0.3,
        10.0,
        0.0,
        0.0,
        Offsets::Mode {
            n_g: 0.2,
            n_big_g: 0.1,
        },
    );
    let n_cut = 10;
    let simple = lowest(
        &build_two_mode_simplified(&p, n_cut, &Numerics::default()).unwrap(),
        6,
    );
    let rotor: Vec<f64> = (-(n_cut as i64)..=n_cut as i64)
        .map(|n| 4.0 * p.e_c * (n as f64 - p.n_g).powi(2))
        .collect();
    let internal = lowest(
        &transmon_operator(p.e_c_int, p.e_j_sigma, p.n_big_g, n_cut, false).unwrap(),
        6,
    );
    let mut sums: Vec<f64> = rotor
        .iter()
        .flat_map(|r| internal.iter().map(move |t| r + t))
        .collect();
    sums.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (s, e) in simple.iter().zip(&sums) {
        assert!((s - e).abs() < 1e-9, "{s} vs {e}");
    }
}

/// The banded LAPACK path agrees with dense Jacobi rotations on a small two-mode operator.
#[test]
fn band_solver_matches_dense_jacobi() {
    let p = params(
        0.4,
        12.0,
        0.2,
        0.8,
        Offsets::Junction {
            n_g1: 0.3,
            n_g2: -0.1,
        },
    );
    let op = build_two_mode_full(&p, 5).unwrap();
    let reference = common::jacobi::sorted_eigenvalues(&op.to_dense());
    let got = lowest(&op, 10);
    assert!(close(&got, &reference[..10], 1e-10));
}
