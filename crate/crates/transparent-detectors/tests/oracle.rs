mod common;

use nalgebra::{Complex, DMatrix, DVector};
use transparent_detectors::gates::FieldState;
use transparent_detectors::oracle::{evolve_exact, initial_field, FockConfig};
use transparent_detectors::phase_integrals::DetectorLayout;
use transparent_detectors::trajectory::{build_cycle, lorentz_gamma, CycleSpec, Segment};
use transparent_detectors::Complex64;

type C = Complex<f64>;

fn cycle() -> CycleSpec {
    build_cycle(
        &[Segment::new(0.0, 1.2).unwrap(), Segment::new(0.7, 2.5).unwrap(), Segment::new(-0.5, 1.9).unwrap()],
        0.4,
        0.1,
        0.2,
    )
    .unwrap()
}

/// Exact interaction-picture propagator, built segment by segment.
///
/// Inside a segment every phase is linear in τ, so with `H0 = Ω Σ n_j + w a†a`
/// the propagator is `exp(i H0 Δ) exp(-i (H0 + V0) Δ)`.
fn reference_evolution(c: &CycleSpec, omega: f64, k: f64, offsets: &[f64], lambda: f64, n_max: usize, psi0: DVector<C>) -> DVector<C> {
    let nd = offsets.len();
    let q = 1usize << nd;
    let dim = q * (n_max + 1);
    let idx = |bits: usize, n: usize| bits + q * n;
    let mut psi = psi0;
    for (seg, a) in c.segments().iter().zip(c.anchors()) {
        let g = lorentz_gamma(seg.velocity);
        let w = k * g * (1.0 - seg.velocity);
        let mut h0 = DMatrix::<C>::zeros(dim, dim);
        let mut v0 = DMatrix::<C>::zeros(dim, dim);
        for bits in 0..q {
            for n in 0..=n_max {
                h0[(idx(bits, n), idx(bits, n))] = C::new(omega * bits.count_ones() as f64 + w * n as f64, 0.0);
            }
        }
        for (j, off) in offsets.iter().enumerate() {
            for s1 in [1.0f64, -1.0] {
                for s2 in [1.0f64, -1.0] {
                    let ph = C::from_polar(lambda, s1 * omega * a.tau + s2 * k * (a.t - a.x - off));
                    for bits in 0..q {
                        let up = bits & (1 << j) != 0;
                        // σ⁺ needs the qubit down, σ⁻ needs it up
                        if (s1 > 0.0) == up {
                            continue;
                        }
                        let nb = bits ^ (1 << j);
                        for n in 0..=n_max {
                            let (m, amp) = if s2 > 0.0 {
                                (n + 1, ((n + 1) as f64).sqrt())
                            } else if n > 0 {
                                (n - 1, (n as f64).sqrt())
                            } else {
                                continue;
                            };
                            if m > n_max {
                                continue;
                            }
                            v0[(idx(nb, m), idx(bits, n))] += ph * amp;
                        }
                    }
                }
            }
        }
        let dt = seg.proper_duration();
        let u = (h0.clone() * C::new(0.0, dt)).exp() * ((h0 + v0) * C::new(0.0, -dt)).exp();
        psi = u * psi;
    }
    psi
}

fn start_state(nd: usize, field: &FieldState, n_max: usize) -> DVector<C> {
    let amp = initial_field(field, n_max).unwrap();
    let q = 1usize << nd;
    DVector::from_fn(q * (n_max + 1), |i, _| if i % q == 0 { amp[i / q] } else { C::new(0.0, 0.0) })
}

fn compare(offsets: &[f64], field: FieldState, lambda: f64, n_max: usize) {
    let c = cycle();
    let (omega, k) = (1.3, 0.9);
    let layout = DetectorLayout { offsets: offsets.to_vec() };
    let out = evolve_exact(&c, omega, k, &layout, &field, lambda, &FockConfig { n_max, steps_per_segment: 64 }).unwrap();
    let want = reference_evolution(&c, omega, k, offsets, lambda, n_max, start_state(offsets.len(), &field, n_max));
    assert_eq!(out.psi.len(), want.len());
    let diff: f64 = out.psi.iter().zip(want.iter()).map(|(a, b)| (a - Complex64::new(b.re, b.im)).norm_sqr()).sum::<f64>().sqrt();
    println!("{offsets:?} {field:?}: |Δψ| = {diff:e}");
    assert!(diff < 1e-8, "{offsets:?} {field:?}: |Δψ| = {diff:e}");
    assert!(out.norm_drift < 1e-10);
}

#[test]
fn one_detector_matches_exact_propagator() {
    compare(&[0.0], FieldState::Vacuum, 0.2, 14);
}

#[test]
fn two_detectors_match_exact_propagator() {
    compare(&[0.0, 0.6], FieldState::Vacuum, 0.15, 12);
}

#[test]
fn driven_pair_matches_exact_propagator() {
    compare(&[0.0, 0.3], FieldState::Coherent { alpha: Complex64::new(0.6, -0.4) }, 0.1, 18);
}

#[test]
fn zero_coupling_is_identity() {
    let out = evolve_exact(&cycle(), 1.3, 0.9, &DetectorLayout::pair(0.5), &FieldState::Vacuum, 0.0, &FockConfig { n_max: 6, steps_per_segment: 8 })
        .unwrap();
    assert!((out.rho_detectors[(0, 0)].re - 1.0).abs() < 1e-15);
    assert!(out.rho_detectors.data.iter().skip(1).all(|x| x.norm() < 1e-15));
}

#[test]
fn truncation_is_converged() {
    let field = FieldState::Coherent { alpha: Complex64::new(1.0, 0.0) };
    let run = |n_max| {
        evolve_exact(&cycle(), 1.3, 0.9, &DetectorLayout::pair(0.2), &field, 0.1, &FockConfig { n_max, steps_per_segment: 64 })
            .unwrap()
            .rho_detectors
    };
    let (a, b) = (run(30), run(38));
    for i in 0..4 {
        assert!((a[(i, i)].re - b[(i, i)].re).abs() < 1e-9);
    }
}

#[test]
fn step_doubling_is_converged() {
    let run = |steps| {
        evolve_exact(&cycle(), 1.3, 0.9, &DetectorLayout::single(), &FieldState::Vacuum, 0.1, &FockConfig { n_max: 8, steps_per_segment: steps })
            .unwrap()
    };
    let (a, b) = (run(256), run(512));
    let diff: f64 = a.psi.iter().zip(&b.psi).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    assert!(diff < 1e-9);
}
