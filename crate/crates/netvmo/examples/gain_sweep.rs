//! Sweeps the mutual feedback gain and tabulates how the settled energies
//! and attained accuracy levels improve as the gain ratio k = k_e/k_s
//! shrinks.
//!
//! ```text
//! cargo run --release -p netvmo --example gain_sweep
//! ```

use netvmo::metrics;
use netvmo::observer;
use netvmo::scenario;
use std::path::Path;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/five_cameras.scn");

    println!("{:>8} {:>8} {:>13} {:>13} {:>13} {:>13}", "k_s", "k", "U_p", "U_R", "eps_p", "eps_R");
    for k_s in [1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
        let mut s = scenario::load_scenario(&path)?;
        s.gains.k_s = k_s;
        let (net, initial, params) = scenario::build(&s)?;
        let series = observer::simulate(&net, &initial, &params)?;
        let baseline = metrics::baseline(&net, s.analysis.zeta_margin)?;
        let (u_p, u_r) = metrics::tail_mean_energies(&series, s.analysis.tail_fraction);
        let (eps_p, eps_r) =
            metrics::tail_attained_epsilon(&series, &baseline, s.analysis.tail_fraction);
        println!(
            "{:>8} {:>8} {:>13.4e} {:>13.4e} {:>13.4e} {:>13.4e}",
            k_s,
            1.0 / k_s,
            u_p,
            u_r,
            eps_p,
            eps_r
        );
    }
    println!("\nPosition accuracy improves without bound; orientation accuracy");
    println!("saturates at an offset governed by the contraction constant beta.");
    Ok(())
}
