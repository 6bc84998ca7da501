//! Pose synchronization: when no camera sees the target, every observer runs
//! on the mutual feedback term alone and all estimates converge to a common
//! pose (there is no averaging baseline to converge *to*, just agreement).
//!
//! ```text
//! cargo run --release -p netvmo --example consensus_only
//! ```

use nalgebra::Vector3;
use netvmo::camera::{CameraIntrinsics, FeatureModel};
use netvmo::graph::CommGraph;
use netvmo::observer::{step, CameraNode, ErrorMode, Gains, Network, Scheme, VisibilitySchedule};
use netvmo::se3::{exp_so3, psi, Pose, Rotation};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ring = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)];
    let cameras: Vec<CameraNode> = (1..=5)
        .map(|id| CameraNode {
            id,
            pose_in_world: Pose::new(
                Rotation::identity(),
                Vector3::new(id as f64, -(id as f64), 0.0),
            ),
            intrinsics: CameraIntrinsics::new(0.03).unwrap(),
            visible: false,
        })
        .collect();
    let net = Network::new(
        cameras,
        BTreeMap::new(),
        FeatureModel::default_tetrahedron(),
        CommGraph::new(5, &ring)?,
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut state = net.initial_state();
    for est in &mut state.estimates {
        *est = Pose::new(
            exp_so3(&Vector3::new(
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.8..0.8),
            )),
            Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ),
        );
    }

    // Worst pairwise disagreement between world-frame estimates.
    let disagreement = |state: &netvmo::ObserverState| -> f64 {
        let world: Vec<Pose> = net
            .cameras()
            .iter()
            .zip(&state.estimates)
            .map(|(c, g)| c.pose_in_world * *g)
            .collect();
        let mut worst = 0.0_f64;
        for i in 0..world.len() {
            for j in i + 1..world.len() {
                worst = worst.max(psi(&(world[i].inverse() * world[j])));
            }
        }
        worst
    };

    let gains = Gains::new(1.0, 2.0)?;
    let dt = 1e-3;
    println!("five blind cameras on a ring, k_s = 2");
    println!("{:>8} {:>22}", "t [s]", "max pairwise psi");
    for k in 0..=25_000 {
        if k % 2_500 == 0 {
            println!("{:>8.1} {:>22.3e}", k as f64 * dt, disagreement(&state));
        }
        if k == 25_000 {
            break;
        }
        state = step(
            &net,
            &state,
            &gains,
            dt,
            Scheme::LieEuler,
            ErrorMode::Geometric,
            &VisibilitySchedule::default(),
        )?;
    }
    println!("\nall estimates agree on one pose; which pose depends on the start");
    Ok(())
}
