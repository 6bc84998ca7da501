//! The single-camera special case: with the mutual gain at zero the observer
//! reduces to a visual motion observer that drives its estimate to the true
//! relative pose through the full measurement pipeline (projection, image
//! Jacobian, pseudo-inverse reconstruction).
//!
//! ```text
//! cargo run --release -p netvmo --example single_camera
//! ```

use nalgebra::Vector3;
use netvmo::camera::{CameraIntrinsics, FeatureModel};
use netvmo::graph::CommGraph;
use netvmo::observer::{
    relative_pose, step, CameraNode, ErrorMode, Gains, Network, Scheme, TargetView,
    VisibilitySchedule,
};
use netvmo::se3::{exp_so3, psi, Pose, Twist};
use std::collections::BTreeMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let camera = CameraNode {
        id: 1,
        pose_in_world: Pose::identity(),
        intrinsics: CameraIntrinsics::new(0.03)?,
        visible: true,
    };
    let target = TargetView {
        pose_in_world: Pose::new(exp_so3(&Vector3::new(0.2, 0.1, -0.1)), Vector3::new(0.1, -0.05, 2.0)),
        body_velocity: Twist::zero(),
    };
    let net = Network::new(
        vec![camera],
        BTreeMap::from([(1, target)]),
        FeatureModel::default_tetrahedron(),
        CommGraph::new(1, &[])?,
    )?;

    let gains = Gains::new(1.0, 0.0)?;
    let dt = 1e-3;
    let mut state = net.initial_state();
    let g_io = relative_pose(&net.camera(1).pose_in_world, &state.target_poses[&1]);

    println!("visual-feedback-only observer, k_e = 1, measurement pipeline active");
    println!("{:>8} {:>14}", "t [s]", "psi(g_bar^-1 g_io)");
    for k in 0..=20_000 {
        if k % 2_000 == 0 {
            let residual = psi(&(state.estimates[0].inverse() * g_io));
            println!("{:>8.1} {:>14.3e}", k as f64 * dt, residual);
        }
        if k == 20_000 {
            break;
        }
        state = step(
            &net,
            &state,
            &gains,
            dt,
            Scheme::LieEuler,
            ErrorMode::Visual,
            &VisibilitySchedule::default(),
        )?;
    }
    Ok(())
}
