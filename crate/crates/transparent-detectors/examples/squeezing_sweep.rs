//! Harvested negativity on the transparent pair: numeric partial transpose
//! against the closed form, then a squeezing sweep over Θ.

use std::f64::consts::PI;

use transparent_detectors::entanglement::{
    big_theta, build_rho_f, negativity_closed_form, negativity_numeric, negativity_vs_r_sweep, sweep_argmax,
};
use transparent_detectors::gates::FieldState;
use transparent_detectors::phase_integrals::{compute_m, layout_integrals, DetectorLayout};
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
    let layout = DetectorLayout::pair(0.0);
    let ints = layout_integrals(&traj.cycle, grid.omega, grid.k, &layout);
    let m = compute_m(&traj.cycle, grid.omega, grid.k, &layout, true)?;
    let lambda = 0.01;
    println!("M = {m:.8}, |M| / |I++|^2 = {:.4}", m.norm() / ints[0].pp.norm_sqr());
    println!("Theta(phi = 0) = {:.6}", big_theta(m, ints[0].pp, 0.0, 0.0));

    for field in [FieldState::Vacuum, FieldState::Squeezed { r: 0.3, phi: 0.5 }] {
        let rho = build_rho_f(&ints[0], &ints[1], &field, lambda, m)?;
        let num = negativity_numeric(&rho);
        let cf = negativity_closed_form(m, ints[0].pp, &field, lambda, 0.0)?;
        println!("{field:?}: numeric {:.6e}  closed form {:.6e}", num.negativity, cf.negativity);
    }

    let thetas: Vec<f64> = (0..=8).map(|i| i as f64 * PI / 8.0).collect();
    let rs: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
    let rows = negativity_vs_r_sweep(m.norm(), ints[0].pp.norm(), &thetas, &rs, lambda);
    for (theta, r, n) in sweep_argmax(&rows) {
        println!("Theta = {theta:.4}: best r = {r:.2}, negativity {n:.6e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
