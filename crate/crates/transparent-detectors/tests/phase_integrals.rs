mod common;

use common::{gl5, published, K, OMEGA};
use proptest::prelude::*;
use transparent_detectors::phase_integrals::{
    compute_m, cycle_integrals, layout_integrals, segment_integral, DetectorLayout, RunningIntegrals, Sign,
};
use transparent_detectors::trajectory::{build_cycle, concat_intervals, lorentz_gamma, CycleSpec, Segment};
use transparent_detectors::Complex64;

fn raw_phase(omega: f64, k: f64, s1: Sign, s2: Sign, tau: f64, t: f64, x: f64) -> f64 {
    s1.value() * omega * tau + s2.value() * k * (t - x)
}

/// Integrate `e^{i phase}` over one segment by brute force.
fn oracle_segment(seg: &Segment, t0: f64, x0: f64, tau0: f64, omega: f64, k: f64, s1: Sign, s2: Sign) -> Complex64 {
    let g = lorentz_gamma(seg.velocity);
    let dtau = seg.coord_duration / g;
    let f = |tau: f64| {
        let dt = g * (tau - tau0);
        Complex64::from_polar(1.0, raw_phase(omega, k, s1, s2, tau, t0 + dt, x0 + seg.velocity * dt))
    };
    let turns = ((s1.value() * omega + s2.value() * k * g * (1.0 - seg.velocity)).abs() * dtau / std::f64::consts::TAU).ceil();
    gl5(f, tau0, tau0 + dtau, 64 + 16 * turns as usize)
}

fn sign(b: bool) -> Sign {
    if b {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn check(seg: Segment, t0: f64, x0: f64, tau0: f64, omega: f64, k: f64, s1: Sign, s2: Sign) -> Result<(), TestCaseError> {
    let c = build_cycle(&[seg], t0, x0, tau0).unwrap();
    let got = segment_integral(&seg, &c.anchors()[0], omega, k, s1, s2);
    let want = oracle_segment(&seg, t0, x0, tau0, omega, k, s1, s2);
    let scale = want.norm().max(1e-12 * seg.proper_duration());
    prop_assert!((got - want).norm() <= 1e-9 * scale, "got {got}, want {want}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn closed_form_matches_quadrature(
        v in -0.95f64..0.95, dur in 0.05f64..30.0,
        t0 in -50.0f64..50.0, x0 in -20.0f64..20.0, tau0 in -50.0f64..50.0,
        omega in 0.1f64..3.0, k in 0.1f64..3.0, a in any::<bool>(), b in any::<bool>(),
    ) {
        check(Segment::new(v, dur).unwrap(), t0, x0, tau0, omega, k, sign(a), sign(b))?;
    }

    #[test]
    fn near_resonant_segments(
        v in -0.9f64..0.9, dur in 0.05f64..30.0, tau0 in -20.0f64..20.0,
        k in 0.2f64..2.0, log_d in -10.0f64..-1.0, neg in any::<bool>(),
    ) {
        // tune Ω so the (+,-) detuning is ±10^log_d
        let d = if neg { -1.0 } else { 1.0 } * 10f64.powf(log_d);
        let omega = d + k * lorentz_gamma(v) * (1.0 - v);
        check(Segment::new(v, dur).unwrap(), 0.3, -0.2, tau0, omega, k, Sign::Plus, Sign::Minus)?;
    }
}

#[test]
fn conjugate_sign_pairs() {
    let p = published();
    let s = cycle_integrals(&p.traj.cycle, OMEGA, K, 0.7);
    assert!((s.mm - s.pp.conj()).norm() < 1e-13);
    assert!((s.mp - s.pm.conj()).norm() < 1e-13);
}

#[test]
fn running_integral_ends_at_total() {
    let p = published();
    let c = &p.traj.cycle;
    let run = RunningIntegrals::new(c, OMEGA, K);
    let end = c.end().tau;
    for (s1, s2) in [(Sign::Plus, Sign::Plus), (Sign::Minus, Sign::Plus), (Sign::Plus, Sign::Minus)] {
        assert!((run.value(end, s1, s2, 0.0) - run.total(s1, s2, 0.0)).norm() < 1e-12);
    }
}

fn event(c: &CycleSpec, tau: f64) -> (f64, f64) {
    c.event_at(tau)
}

/// `∫_0^T dτ e^{iφ_{+-}(τ)} ∫_0^τ dτ' e^{iφ_{++}(τ')}` by nested brute force.
fn nested(c: &CycleSpec, a_outer: f64, a_inner: f64) -> Complex64 {
    let dens = |tau: f64, s2: Sign, a: f64| {
        let (t, x) = event(c, tau);
        Complex64::from_polar(1.0, raw_phase(OMEGA, K, Sign::Plus, s2, tau, t - a, x))
    };
    let mut total = Complex64::new(0.0, 0.0);
    let mut inner_prefix = Complex64::new(0.0, 0.0);
    for w in c.anchors().windows(2) {
        let (lo, hi) = (w[0].tau, w[1].tau);
        let inner_to = |tau: f64| inner_prefix + gl5(|u| dens(u, Sign::Plus, a_inner), lo, tau, 8);
        total += gl5(|tau| dens(tau, Sign::Minus, a_outer) * inner_to(tau), lo, hi, 200);
        inner_prefix += gl5(|u| dens(u, Sign::Plus, a_inner), lo, hi, 200);
    }
    total
}

#[test]
fn m_matches_nested_quadrature() {
    let c = build_cycle(
        &[Segment::new(0.0, 1.3).unwrap(), Segment::new(0.6, 2.0).unwrap(), Segment::new(-0.4, 1.1).unwrap()],
        0.0,
        0.0,
        0.0,
    )
    .unwrap();
    let (a1, a2) = (0.0, 0.8);
    let ints = layout_integrals(&c, OMEGA, K, &DetectorLayout::pair(a2));
    let boundary = ints[0].pp * ints[1].pm + ints[1].pp * ints[0].pm;
    let want = boundary - 2.0 * (nested(&c, a1, a2) + nested(&c, a2, a1));
    let got = compute_m(&c, OMEGA, K, &DetectorLayout::pair(a2), false).unwrap();
    assert!((got - want).norm() < 1e-9 * want.norm(), "got {got}, want {want}");

    // integrating by parts moves the derivative to the other factor
    let run = RunningIntegrals::new(&c, OMEGA, K);
    let by_parts = |outer: f64, inner: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for w in c.anchors().windows(2) {
            acc += gl5(
                |tau| run.value(tau, Sign::Plus, Sign::Minus, outer) * run.density(tau, Sign::Plus, Sign::Plus, inner),
                w[0].tau,
                w[1].tau,
                200,
            );
        }
        acc
    };
    let dual = -boundary + 2.0 * (by_parts(a1, a2) + by_parts(a2, a1));
    assert!((got - dual).norm() < 1e-9 * got.norm(), "{got} vs {dual}");
}

#[test]
fn transparent_m_drops_vanishing_boundary() {
    let p = published();
    let full = compute_m(&p.traj.cycle, OMEGA, K, &p.layout, false).unwrap();
    assert!((full - p.m).norm() < 1e-7);
}

#[test]
fn doubled_cycle_accumulates_linearly() {
    let p = published();
    let one = cycle_integrals(&p.traj.cycle, OMEGA, K, 0.0).pp.norm();
    for n in [2, 3, 5] {
        let rep = concat_intervals(&[&p.traj.cycle], n).unwrap();
        let got = cycle_integrals(&rep, OMEGA, K, 0.0).pp.norm();
        assert!((got - n as f64 * one).abs() < 1e-10 * n as f64 * one, "N = {n}: {got} vs {}", n as f64 * one);
    }
}

#[test]
fn single_interval_alternates() {
    let p = published();
    let c = &p.outcome.by_label("P1").unwrap().cycle.cycle;
    let one = cycle_integrals(c, OMEGA, K, 0.0).pp;
    let two = cycle_integrals(&concat_intervals(&[c], 2).unwrap(), OMEGA, K, 0.0).pp;
    let three = cycle_integrals(&concat_intervals(&[c], 3).unwrap(), OMEGA, K, 0.0).pp;
    assert!(two.norm() < 1e-10 * one.norm());
    assert!((three - one).norm() < 1e-10 * one.norm());
}
