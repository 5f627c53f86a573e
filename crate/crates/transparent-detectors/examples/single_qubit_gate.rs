//! Plan a drive that rotates one detector by pi/2 about y on a transparent
//! two-interval cycle, then check the forward map reproduces it.

use std::f64::consts::FRAC_PI_2;

use transparent_detectors::gates::{
    compute_ab, contract_delta, field_moments, plan_gate, single_qubit_rotation, FieldState, DEFAULT_DRIVE_CEILING,
};
use transparent_detectors::phase_integrals::DetectorLayout;
use transparent_detectors::search::{pair, search, SearchGrid, DEFAULT_POLISH_TOL};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = SearchGrid {
        v_c_range: (0.4, 0.9),
        t_a_range: (0.0, 6.0),
        resolution: (128, 128),
        omega: 1.2,
        k: 1.0,
        m: 16,
        n: 15,
    };
    let (_, _, found) = search(&grid, DEFAULT_POLISH_TOL)?;
    let traj = pair(&found.intersections[0], &found.intersections[1])?;
    let i_plus = traj.integrals.pp;

    let coeffs = compute_ab(&traj.cycle, grid.omega, grid.k, &DetectorLayout::single())?;
    let delta = contract_delta(&coeffs, &field_moments(&FieldState::Vacuum)?, 0);
    println!("I_pp = {:.6} {:+.6}i, delta = {:.3e} {:+.3e}i", i_plus.re, i_plus.im, delta.re, delta.im);

    let lambda = 0.01;
    let plan = plan_gate([0.0, 1.0, 0.0], FRAC_PI_2, i_plus, delta, lambda, 100, DEFAULT_DRIVE_CEILING)?;
    println!("{}", plan.to_json());
    let rot = single_qubit_rotation(i_plus, delta, plan.alpha, lambda, plan.cycles)?;
    println!("forward: angle {:.12}, axis {:?}", rot.angle, rot.axis);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
