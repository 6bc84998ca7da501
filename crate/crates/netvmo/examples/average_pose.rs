//! Computes the Frobenius mean of three slightly disagreeing target poses:
//! the quantity the camera network estimates in a distributed fashion.
//!
//! ```text
//! cargo run --release -p netvmo --example average_pose
//! ```

use nalgebra::Vector3;
use netvmo::se3::{exp_so3, log_so3, mean_pose, psi, Pose};

fn main() {
    let targets = [
        Pose::new(exp_so3(&Vector3::new(0.30, 0.19, 0.21)), Vector3::new(0.55, 1.00, -1.91)),
        Pose::new(exp_so3(&Vector3::new(0.21, 0.30, 0.19)), Vector3::new(0.30, 0.80, -1.84)),
        Pose::new(exp_so3(&Vector3::new(0.29, 0.20, 0.31)), Vector3::new(0.56, 1.05, -2.00)),
    ];

    let mean = mean_pose(&targets).expect("three well-separated poses have a unique mean");
    let xi = log_so3(&mean.rotation).expect("mean rotation is far from a half turn");

    println!("mean of {} target poses", targets.len());
    println!(
        "  p*       = [{:+.4}, {:+.4}, {:+.4}] m",
        mean.position[0], mean.position[1], mean.position[2]
    );
    println!("  xitheta* = [{:+.4}, {:+.4}, {:+.4}] rad", xi[0], xi[1], xi[2]);

    println!("\nper-target distance to the mean (psi):");
    for (k, g) in targets.iter().enumerate() {
        println!("  target {}: {:.6}", k + 1, psi(&(mean.inverse() * *g)));
    }
    let total: f64 = targets.iter().map(|g| psi(&(mean.inverse() * *g))).sum();
    println!("  total cost at the minimizer: {total:.6}");
}
