mod common;

use common::{phi_for_theta, published};
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use transparent_detectors::entanglement::{
    build_rho_f, closed_form_negativity, gg_dagger_expectation, negativity_closed_form, negativity_numeric,
    negativity_vs_r_sweep, optimal_squeezing, squeeze_penalty, write_sweep_csv, TwoQubitDensityMatrix,
};
use transparent_detectors::gates::FieldState;
use transparent_detectors::linalg::{hermitian_eigenvalues, CMatrix};
use transparent_detectors::phase_integrals::PhaseIntegralSet;
use transparent_detectors::{Complex64, Error};

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    m.hermitize()
}

fn nalgebra_eigs(m: &CMatrix) -> Vec<f64> {
    let d = DMatrix::from_fn(m.n, m.n, |i, j| Complex::new(m[(i, j)].re, m[(i, j)].im));
    let mut ev: Vec<f64> = d.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

#[test]
fn jacobi_agrees_with_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [2, 4, 8] {
        for _ in 0..50 {
            let m = random_hermitian(&mut rng, n);
            let (a, b) = (hermitian_eigenvalues(&m), nalgebra_eigs(&m));
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12, "{a:?} vs {b:?}");
            }
        }
    }
}

#[test]
fn published_state_is_physical() {
    let p = published();
    for field in [FieldState::Vacuum, FieldState::Squeezed { r: 0.7, phi: 1.0 }, FieldState::Coherent { alpha: Complex64::new(0.5, 0.5) }] {
        let lambda = 0.01;
        let rho = build_rho_f(&p.ints[0], &p.ints[1], &field, lambda, p.m).unwrap();
        assert!((rho.m.trace() - 1.0).norm() < 1e-15);
        assert!(rho.m.data.iter().zip(&rho.m.adjoint().data).all(|(a, b)| (a - b).norm() < 1e-18));
        let min = rho.eigenvalues()[0];
        assert!(min > -10.0 * lambda.powi(3), "{field:?}: {min}");
        // the partial transpose keeps trace and is an involution
        let pt = TwoQubitDensityMatrix::new(rho.partial_transpose_first());
        assert!((pt.m.trace() - 1.0).norm() < 1e-15);
        assert_eq!(pt.partial_transpose_first(), rho.m);
        // independent spectrum of the partial transpose
        let want: f64 = nalgebra_eigs(&pt.m).iter().filter(|x| **x < 0.0).map(|x| -x).sum();
        assert!((negativity_numeric(&rho).negativity - want).abs() < 1e-15);
    }
}

#[test]
fn unsqueezed_is_vacuum() {
    let p = published();
    let vac = build_rho_f(&p.ints[0], &p.ints[1], &FieldState::Vacuum, 0.01, p.m).unwrap();
    let sq = build_rho_f(&p.ints[0], &p.ints[1], &FieldState::Squeezed { r: 0.0, phi: 0.4 }, 0.01, p.m).unwrap();
    assert_eq!(vac, sq);
    let a = negativity_closed_form(p.m, p.ints[0].pp, &FieldState::Vacuum, 0.01, 0.0).unwrap();
    let b = negativity_closed_form(p.m, p.ints[0].pp, &FieldState::Squeezed { r: 0.0, phi: 0.4 }, 0.01, 0.0).unwrap();
    assert_eq!(a.negativity, b.negativity);
}

#[test]
fn vacuum_negativity_matches_closed_form() {
    let p = published();
    let lambda = 0.01;
    let rho = build_rho_f(&p.ints[0], &p.ints[1], &FieldState::Vacuum, lambda, p.m).unwrap();
    let num = negativity_numeric(&rho).negativity;
    let cf = negativity_closed_form(p.m, p.ints[0].pp, &FieldState::Vacuum, lambda, 0.0).unwrap().negativity;
    assert!(num > 0.0);
    assert!((num - cf).abs() < 5.0 * lambda.powi(3), "{num} vs {cf}");
}

#[test]
fn mild_squeezing_cross_check() {
    // the closed form is the linearisation of the smallest partial-transpose eigenvalue
    let p = published();
    let lambda = 0.01;
    for theta in [0.0, PI / 4.0, PI / 2.0, PI] {
        let field = FieldState::Squeezed { r: 0.2, phi: phi_for_theta(p, theta) };
        let rho = build_rho_f(&p.ints[0], &p.ints[1], &field, lambda, p.m).unwrap();
        let num = negativity_numeric(&rho).negativity;
        let cf = negativity_closed_form(p.m, p.ints[0].pp, &field, lambda, 0.0).unwrap();
        assert!((cf.theta.unwrap() - theta).abs() < 1e-12);
        assert!((num - cf.negativity).abs() < 5.0 * lambda.powi(3), "Θ = {theta}: {num} vs {}", cf.negativity);
    }
}

#[test]
fn large_squeezing_kills_entanglement() {
    let p = published();
    let (m, i) = (p.m.norm(), p.ints[0].pp.norm());
    assert!(closed_form_negativity(m, i, 3.0, 2.0, 0.01) == 0.0);
    let rows = negativity_vs_r_sweep(m, i, &[2.0], &(0..=300).map(|k| k as f64 * 0.01).collect::<Vec<_>>(), 0.01);
    assert!(rows.iter().any(|r| r.negativity == 0.0));
    assert_eq!(rows[0].negativity, rows[0].negativity_vacuum);
}

#[test]
fn optimum_minimises_the_penalty() {
    for theta in [0.3, 1.0, PI / 3.0, 1.3, 1.9, 2.8] {
        let r = optimal_squeezing(theta).unwrap();
        let f = |x: f64| squeeze_penalty(x, theta);
        assert!(f(r) <= f(r + 1e-3) && f(r) <= f(r - 1e-3));
    }
    assert!(matches!(optimal_squeezing(0.0), Err(Error::ThetaDegenerate(_))));
}

#[test]
fn gg_dagger_vacuum_and_squeezed() {
    let (i, l) = (0.8, 0.01);
    let v = gg_dagger_expectation(i, l, &FieldState::Vacuum, 1.0).unwrap();
    assert!((v - l * l * i * i).abs() < 1e-18);
    // squeezing at the optimum lowers the noise below vacuum
    let theta = 0.7;
    let r = optimal_squeezing(theta).unwrap();
    let s = gg_dagger_expectation(i, l, &FieldState::Squeezed { r, phi: 0.0 }, theta).unwrap();
    assert!(s < v);
}

#[test]
fn opaque_trajectory_rejected() {
    let p = published();
    let leaky = PhaseIntegralSet { pm: Complex64::new(1e-3, 0.0), ..p.ints[0] };
    let r = build_rho_f(&leaky, &p.ints[1], &FieldState::Vacuum, 0.01, p.m);
    assert!(matches!(r, Err(Error::TransparencyRequired(_))));
}

#[test]
fn sweep_csv_layout() {
    let rows = negativity_vs_r_sweep(5.0, 0.8, &[0.0, 1.0], &[0.0, 0.5], 0.01);
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "Theta,r,negativity,negativity_vacuum,r_opt");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].ends_with(",NaN"));
}

proptest! {
    #[test]
    fn rho_json_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = TwoQubitDensityMatrix::new(random_hermitian(&mut rng, 4));
        prop_assert_eq!(TwoQubitDensityMatrix::from_json(&rho.to_json()).unwrap(), rho);
    }

    #[test]
    fn closed_form_never_negative(m in 0.0f64..20.0, i in 0.0f64..3.0, r in 0.0f64..3.0, t in -7.0f64..7.0) {
        prop_assert!(closed_form_negativity(m, i, r, t, 0.01) >= 0.0);
    }
}
