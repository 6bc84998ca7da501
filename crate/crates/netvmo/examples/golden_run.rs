//! Runs the bundled five-camera scenario with both reference gain settings
//! and prints where the artifacts went plus the settled error energies.
//!
//! ```text
//! cargo run --release -p netvmo --example golden_run
//! ```

use netvmo::runner;
use netvmo::scenario;
use std::path::Path;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/five_cameras.scn");
    println!("scenario: {}", path.display());

    for k_s in [1.0, 50.0] {
        let mut s = scenario::load_scenario(&path)?;
        s.gains.k_s = k_s;
        let out = std::env::temp_dir().join(format!("netvmo_golden_ks{k_s:.0}"));
        let artifacts = runner::run(&s, &out)?;
        println!("\nk_e = 1, k_s = {k_s}:");
        println!("  series : {}", artifacts.series_path.display());
        println!("  summary: {}", artifacts.summary_path.display());
        println!(
            "  settled U_p = {:.6e} m^2, settled U_R = {:.6e}",
            artifacts.summary.settled_u_p, artifacts.summary.settled_u_r
        );
        println!(
            "  attained eps_p = {:.3e}, eps_R = {:.3e} (theory limit eps_R = {:.3})",
            artifacts.summary.attained_epsilon_p,
            artifacts.summary.attained_epsilon_r,
            artifacts.summary.epsilon_r_theory
        );
    }

    println!("\nThe larger mutual gain (smaller gain ratio) settles both energies");
    println!("lower, while the orientation energy keeps a strictly positive offset.");
    Ok(())
}
