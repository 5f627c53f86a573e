//! Integrate the full detector-field dynamics on the transparent cycle and
//! check the second-order state converges at the expected rate.

use transparent_detectors::gates::FieldState;
use transparent_detectors::oracle::{validate_perturbative, FockConfig};
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

    let cfg = FockConfig { n_max: 12, steps_per_segment: 1024 };
    let report = validate_perturbative(
        &traj.cycle,
        grid.omega,
        grid.k,
        &DetectorLayout::pair(0.0),
        &FieldState::Vacuum,
        &[0.02, 0.01, 0.005],
        &cfg,
    )?;
    println!("{}", report.to_json());
    println!("excitation gaps: {:?}", report.excitation_err());
    report.check(2.7, 8.0)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
