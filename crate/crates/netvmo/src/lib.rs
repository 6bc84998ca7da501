//! Distributed averaging of a 3D rigid-body pose over a camera network.
//!
//! A network of pinhole cameras cooperatively estimates the average pose of
//! a target object. Each camera runs a local observer on SE(3); cameras that
//! view the target blend a visual feedback term with mutual feedback from
//! their communication neighbors, while cameras that cannot see the target
//! run on mutual feedback alone and still converge near the average. The
//! crate also carries the full averaging-performance analysis machinery:
//! error energies, accuracy-level sets, invariant-set certificates, and the
//! spanning-tree load constant entering the gain-ratio bounds.
//!
//! # Modules
//!
//! - [`se3`] — SO(3)/SE(3) primitives, error maps, and the chordal mean.
//! - [`camera`] — pinhole projection, the image Jacobian, and error
//!   reconstruction from measurements.
//! - [`graph`] — the communication graph and its spanning-tree load `W`.
//! - [`observer`] — the networked observer dynamics and time integration.
//! - [`metrics`] — energies, accuracy levels, and positivity certificates.
//! - [`scenario`] — the scenario file format.
//! - [`runner`] — run orchestration, CSV/summary artifacts, and the seeded
//!   property-check suite.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --release -p netvmo --example average_pose
//! cargo run --release -p netvmo --example golden_run
//! cargo run --release -p netvmo --example gain_sweep
//! cargo run --release -p netvmo --example single_camera
//! cargo run --release -p netvmo --example consensus_only
//! cargo run --release -p netvmo --example moving_target
//! cargo run --release -p netvmo --example visibility_dropout
//! cargo run --release -p netvmo --example graph_analysis
//! cargo run --release -p netvmo --example jacobian_check
//! cargo run --release -p netvmo --example rotation_inequality
//! ```
//!
//! The same functionality is scriptable through the `netvmo` binary
//! (`simulate`, `verify`, `report`, `mean`).

pub mod camera;
pub mod graph;
pub mod metrics;
pub mod observer;
pub mod runner;
pub mod scenario;
pub mod se3;

pub use camera::{CameraIntrinsics, FeatureModel, VisualMeasurement};
pub use graph::CommGraph;
pub use metrics::AveragingBaseline;
pub use observer::{
    CameraNode, ErrorMode, Gains, Network, ObserverState, Scheme, SimulationParams, TargetView,
    VisibilitySchedule,
};
pub use runner::{RunArtifacts, SummaryReport, TimeSeries};
pub use scenario::Scenario;
pub use se3::{ErrorVector, Pose, Rotation, Twist};
