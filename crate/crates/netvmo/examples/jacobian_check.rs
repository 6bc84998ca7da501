//! Cross-validates the analytic image Jacobian against central finite
//! differences of the measurement map, and shows the first-order error
//! reconstruction converging quadratically as the injected perturbation
//! shrinks.
//!
//! ```text
//! cargo run --release -p netvmo --example jacobian_check
//! ```

use nalgebra::{Vector3, Vector6};
use netvmo::camera::{image_jacobian, measure, reconstruction_gap, CameraIntrinsics, FeatureModel};
use netvmo::se3::{exp_so3, pose_from_error, ErrorVector, Pose};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let intrinsics = CameraIntrinsics::new(0.03)?;
    let features = FeatureModel::default_tetrahedron();
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let mut worst = 0.0_f64;
    let h = 1e-6;
    for _ in 0..200 {
        let g_bar = Pose::new(
            exp_so3(&Vector3::new(
                rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
            )),
            Vector3::new(
                rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
                rng.random_range(1.0..3.0),
            ),
        );
        let j = image_jacobian(&intrinsics, &features, &g_bar)?;
        for k in 0..6 {
            let mut e = Vector6::zeros();
            e[k] = h;
            let plus = measure(&intrinsics, &features, &(g_bar * pose_from_error(&ErrorVector::from_vector6(&e))?))?;
            e[k] = -h;
            let minus = measure(&intrinsics, &features, &(g_bar * pose_from_error(&ErrorVector::from_vector6(&e))?))?;
            let fd = (plus.as_vector() - minus.as_vector()) / (2.0 * h);
            worst = worst.max((&fd - j.column(k)).norm() / j.column(k).norm());
        }
    }
    println!("analytic Jacobian vs central differences over 200 poses x 6 columns:");
    println!("  worst relative gap: {worst:.3e}\n");

    let g_bar = Pose::new(exp_so3(&Vector3::new(0.1, -0.05, 0.08)), Vector3::new(0.1, -0.1, 2.0));
    let dir = Vector6::from_fn(|_, _| rng.random_range(-1.0..1.0)).normalize();
    println!("reconstruction error against the true pose error (one direction):");
    println!("{:>12} {:>14} {:>10}", "delta", "gap", "gap/d^2");
    let mut delta = 1e-2;
    while delta >= 1e-4 {
        let gap = reconstruction_gap(
            &intrinsics,
            &features,
            &g_bar,
            &ErrorVector::from_vector6(&(dir * delta)),
        )?;
        println!("{delta:>12.2e} {gap:>14.3e} {:>10.3}", gap / (delta * delta));
        delta /= 2.0;
    }
    println!("\nthe gap scales with the square of the perturbation: the");
    println!("reconstruction is exact to first order");
    Ok(())
}
