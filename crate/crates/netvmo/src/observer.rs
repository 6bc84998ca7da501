//! The networked visual motion observer: per-camera estimate dynamics, the
//! visibility-switched input, target kinematics, and geometric time
//! integration of the whole camera network.
//!
//! Each camera `i` integrates an estimate of the averaged target pose in its
//! own frame. Cameras that view the target blend a visual feedback term
//! (gain `k_e`) with mutual feedback from neighbors' transported estimates
//! (gain `k_s`); cameras that cannot see the target run on the mutual
//! feedback term alone. All inputs for a step are computed from one immutable
//! state snapshot before any estimate advances, matching the coupled
//! continuous-time dynamics.

use crate::camera::{self, CameraError, CameraIntrinsics, FeatureModel};
use crate::graph::CommGraph;
use crate::metrics;
use crate::runner::{Record, TimeSeries};
use crate::se3::{exp_se3, pose_error, Pose, Se3Error, Twist};
use nalgebra::Vector3;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ObserverError {
    #[error("invalid gains: need k_e > 0 and k_s >= 0, got k_e = {k_e}, k_s = {k_s}")]
    InvalidGains { k_e: f64, k_s: f64 },
    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("record cadence must be at least 1")]
    ZeroRecordCadence,
    #[error("camera ids must be exactly 1..=n in order; entry {index} has id {id}")]
    BadCameraIds { index: usize, id: usize },
    #[error("graph covers {graph_nodes} nodes but the network has {cameras} cameras")]
    NodeCountMismatch { graph_nodes: usize, cameras: usize },
    #[error("camera {0} views the target but has no target view")]
    MissingTargetView(usize),
    #[error("camera {0} does not view the target but has a target view")]
    UnexpectedTargetView(usize),
    #[error("estimate count {estimates} does not match camera count {cameras}")]
    StateSizeMismatch { estimates: usize, cameras: usize },
    #[error("camera {camera} at t = {t:.6} s: {source}")]
    Measurement {
        camera: usize,
        t: f64,
        #[source]
        source: CameraError,
    },
    #[error("camera {camera} at t = {t:.6} s: {source}")]
    Geometry {
        camera: usize,
        t: f64,
        #[source]
        source: Se3Error,
    },
    #[error("averaging baseline: {0}")]
    Baseline(#[source] Se3Error),
}

/// A camera with its mounting pose, optics, and static target visibility.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraNode {
    pub id: usize,
    /// Pose of the camera frame in the world frame.
    pub pose_in_world: Pose,
    pub intrinsics: CameraIntrinsics,
    /// Whether this camera views the target (membership is static; transient
    /// dropouts can be layered on top with a [`VisibilitySchedule`]).
    pub visible: bool,
}

/// The target pose consistent with one camera's measurement, with its body
/// velocity (zero for the static analysis setting).
#[derive(Debug, Clone, PartialEq)]
pub struct TargetView {
    pub pose_in_world: Pose,
    pub body_velocity: Twist,
}

/// Feedback gains of the observer input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    k_e: f64,
    k_s: f64,
}

impl Gains {
    /// `k_e` must be positive. `k_s = 0` is accepted and turns off the mutual
    /// feedback term (the single-camera observer); the averaging analysis
    /// itself assumes `k_s > 0`.
    pub fn new(k_e: f64, k_s: f64) -> Result<Self, ObserverError> {
        if k_e <= 0.0 || k_s < 0.0 || !k_e.is_finite() || !k_s.is_finite() {
            return Err(ObserverError::InvalidGains { k_e, k_s });
        }
        Ok(Gains { k_e, k_s })
    }

    pub fn k_e(&self) -> f64 {
        self.k_e
    }

    pub fn k_s(&self) -> f64 {
        self.k_s
    }

    /// Gain ratio `k = k_e / k_s`; infinite when the mutual term is off.
    pub fn ratio(&self) -> f64 {
        self.k_e / self.k_s
    }
}

/// How the visual feedback error of a viewing camera is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMode {
    /// Full measurement pipeline: synthesize the true measurement, predict
    /// one from the estimate, reconstruct the error through the image
    /// Jacobian pseudo-inverse.
    Visual,
    /// Shortcut for debugging and for configurations the projection cannot
    /// express: the exact pose error between estimate and relative target
    /// pose.
    Geometric,
}

/// Time integration scheme on SE(3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// First-order exponential step `g <- g exp(dt u^)`.
    LieEuler,
    /// Second-order midpoint step with the input re-evaluated at half step.
    Midpoint,
}

/// Transient per-camera visibility dropouts for exploratory runs. Intervals
/// are half-open `[start, end)`. Runs using a non-empty schedule are outside
/// the static-visibility analysis guarantees and are flagged in summaries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VisibilitySchedule {
    blackouts: BTreeMap<usize, Vec<(f64, f64)>>,
}

impl VisibilitySchedule {
    pub fn add_blackout(&mut self, camera: usize, start: f64, end: f64) {
        self.blackouts.entry(camera).or_default().push((start, end));
    }

    pub fn is_blacked_out(&self, camera: usize, t: f64) -> bool {
        self.blackouts
            .get(&camera)
            .is_some_and(|iv| iv.iter().any(|&(s, e)| t >= s && t < e))
    }

    pub fn is_empty(&self) -> bool {
        self.blackouts.is_empty()
    }

    pub fn cameras(&self) -> impl Iterator<Item = usize> + '_ {
        self.blackouts.keys().copied()
    }
}

/// The assembled static configuration: cameras, their target views, the
/// shared feature model, the communication graph, and the ground-truth
/// inter-camera transports `g_ij = g_wi^-1 g_wj` fixed at build time.
#[derive(Debug, Clone)]
pub struct Network {
    cameras: Vec<CameraNode>,
    targets: BTreeMap<usize, TargetView>,
    features: FeatureModel,
    graph: CommGraph,
    transports: BTreeMap<(usize, usize), Pose>,
}

impl Network {
    pub fn new(
        cameras: Vec<CameraNode>,
        targets: BTreeMap<usize, TargetView>,
        features: FeatureModel,
        graph: CommGraph,
    ) -> Result<Self, ObserverError> {
        if graph.node_count() != cameras.len() {
            return Err(ObserverError::NodeCountMismatch {
                graph_nodes: graph.node_count(),
                cameras: cameras.len(),
            });
        }
        for (index, cam) in cameras.iter().enumerate() {
            if cam.id != index + 1 {
                return Err(ObserverError::BadCameraIds { index, id: cam.id });
            }
            if cam.visible && !targets.contains_key(&cam.id) {
                return Err(ObserverError::MissingTargetView(cam.id));
            }
            if !cam.visible && targets.contains_key(&cam.id) {
                return Err(ObserverError::UnexpectedTargetView(cam.id));
            }
        }
        let mut transports = BTreeMap::new();
        for cam in &cameras {
            for j in graph.neighbors(cam.id) {
                let g_ij = relative_pose(&cam.pose_in_world, &cameras[j - 1].pose_in_world);
                transports.insert((cam.id, j), g_ij);
            }
        }
        Ok(Network { cameras, targets, features, graph, transports })
    }

    pub fn cameras(&self) -> &[CameraNode] {
        &self.cameras
    }

    pub fn camera(&self, id: usize) -> &CameraNode {
        &self.cameras[id - 1]
    }

    pub fn targets(&self) -> &BTreeMap<usize, TargetView> {
        &self.targets
    }

    pub fn features(&self) -> &FeatureModel {
        &self.features
    }

    pub fn graph(&self) -> &CommGraph {
        &self.graph
    }

    /// Ids of cameras that view the target (static membership).
    pub fn visible_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.cameras.iter().filter(|c| c.visible).map(|c| c.id)
    }

    /// Ground-truth transport `g_ij` between a camera and one of its
    /// neighbors, precomputed at build time.
    pub fn transport(&self, i: usize, j: usize) -> &Pose {
        &self.transports[&(i, j)]
    }

    /// State with every estimate at the default initial value (one meter in
    /// front of the camera, identity orientation) and targets at their
    /// configured poses.
    pub fn initial_state(&self) -> ObserverState {
        let default = Pose::new(
            crate::se3::Rotation::identity(),
            Vector3::new(0.0, 0.0, 1.0),
        );
        ObserverState {
            time: 0.0,
            estimates: vec![default; self.cameras.len()],
            target_poses: self.targets.iter().map(|(&id, tv)| (id, tv.pose_in_world)).collect(),
        }
    }
}

/// The evolving state: one pose estimate per camera (expressed in that
/// camera's frame) and the current target poses (world frame).
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverState {
    pub time: f64,
    pub estimates: Vec<Pose>,
    pub target_poses: BTreeMap<usize, Pose>,
}

/// Relative pose `g_wi^-1 g_wj` of frame `j` expressed in frame `i`.
pub fn relative_pose(g_wi: &Pose, g_wj: &Pose) -> Pose {
    g_wi.inverse() * *g_wj
}

/// The observer input for camera `id` from a state snapshot:
/// a visual feedback term `k_e e_ei` when the camera currently views the
/// target, plus the mutual feedback term summing the pose errors toward the
/// neighbors' transported estimates.
pub fn observer_input(
    net: &Network,
    state: &ObserverState,
    id: usize,
    gains: &Gains,
    mode: ErrorMode,
    sees_target: bool,
) -> Result<Twist, ObserverError> {
    let cam = net.camera(id);
    let g_bar = &state.estimates[id - 1];
    let mut linear = Vector3::zeros();
    let mut angular = Vector3::zeros();

    if sees_target {
        let target_pose = state.target_poses[&id];
        let g_io = relative_pose(&cam.pose_in_world, &target_pose);
        let e = match mode {
            ErrorMode::Geometric => pose_error(&(g_bar.inverse() * g_io)),
            ErrorMode::Visual => {
                let wrap = |source| ObserverError::Measurement { camera: id, t: state.time, source };
                let f = camera::measure(&cam.intrinsics, net.features(), &g_io).map_err(wrap)?;
                camera::reconstruct_error(&cam.intrinsics, net.features(), g_bar, &f)
                    .map_err(wrap)?
            }
        };
        linear += gains.k_e * e.position;
        angular += gains.k_e * e.rotation;
    }

    for j in net.graph().neighbors(id) {
        let transported = *net.transport(id, j) * state.estimates[j - 1];
        let e = pose_error(&(g_bar.inverse() * transported));
        linear += gains.k_s * e.position;
        angular += gains.k_s * e.rotation;
    }

    Ok(Twist::new(linear, angular))
}

fn inputs_snapshot(
    net: &Network,
    state: &ObserverState,
    gains: &Gains,
    mode: ErrorMode,
    schedule: &VisibilitySchedule,
) -> Result<Vec<Twist>, ObserverError> {
    net.cameras()
        .iter()
        .map(|cam| {
            let sees = cam.visible && !schedule.is_blacked_out(cam.id, state.time);
            observer_input(net, state, cam.id, gains, mode, sees)
        })
        .collect()
}

/// Advances estimates by `g <- g exp(dt u^)` and moving targets by their body
/// velocity. Exact zero inputs leave poses bit-identical.
fn advance(net: &Network, state: &ObserverState, inputs: &[Twist], dt: f64) -> ObserverState {
    let estimates = state
        .estimates
        .iter()
        .zip(inputs)
        .map(|(g, u)| if u.is_zero() { *g } else { *g * exp_se3(&u.scaled(dt)) })
        .collect();
    let target_poses = state
        .target_poses
        .iter()
        .map(|(&id, pose)| {
            let v = &net.targets()[&id].body_velocity;
            let moved = if v.is_zero() { *pose } else { *pose * exp_se3(&v.scaled(dt)) };
            (id, moved)
        })
        .collect();
    ObserverState { time: state.time + dt, estimates, target_poses }
}

/// One synchronous integration step of the coupled network dynamics.
pub fn step(
    net: &Network,
    state: &ObserverState,
    gains: &Gains,
    dt: f64,
    scheme: Scheme,
    mode: ErrorMode,
    schedule: &VisibilitySchedule,
) -> Result<ObserverState, ObserverError> {
    if dt <= 0.0 {
        return Err(ObserverError::NonPositiveStep(dt));
    }
    if state.estimates.len() != net.cameras().len() {
        return Err(ObserverError::StateSizeMismatch {
            estimates: state.estimates.len(),
            cameras: net.cameras().len(),
        });
    }
    let inputs = inputs_snapshot(net, state, gains, mode, schedule)?;
    match scheme {
        Scheme::LieEuler => Ok(advance(net, state, &inputs, dt)),
        Scheme::Midpoint => {
            let half = advance(net, state, &inputs, dt / 2.0);
            let mid_inputs = inputs_snapshot(net, &half, gains, mode, schedule)?;
            Ok(advance(net, state, &mid_inputs, dt))
        }
    }
}

/// Simulation configuration for [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationParams {
    pub gains: Gains,
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    pub scheme: Scheme,
    pub error_mode: ErrorMode,
    pub schedule: VisibilitySchedule,
    /// Relative margin of the invariant-set threshold over the worst initial
    /// rotation discrepancy.
    pub zeta_margin: f64,
}

impl SimulationParams {
    pub fn new(gains: Gains) -> Self {
        SimulationParams {
            gains,
            dt: 1e-3,
            t_final: 20.0,
            record_every: 10,
            scheme: Scheme::LieEuler,
            error_mode: ErrorMode::Visual,
            schedule: VisibilitySchedule::default(),
            zeta_margin: 0.1,
        }
    }
}

/// Integrates the network from `initial` and records state plus analysis
/// metrics every `record_every` steps (plus the final step). Identical inputs
/// produce bit-identical output.
///
/// When no camera views the target there is no averaging baseline; the
/// energy columns of the records are NaN and the membership fields are
/// vacuously empty/false.
pub fn simulate(
    net: &Network,
    initial: &ObserverState,
    params: &SimulationParams,
) -> Result<TimeSeries, ObserverError> {
    if params.dt <= 0.0 {
        return Err(ObserverError::NonPositiveStep(params.dt));
    }
    if params.record_every == 0 {
        return Err(ObserverError::ZeroRecordCadence);
    }
    // A network nobody views has no baseline and records NaN energies; a
    // degenerate mean is a broken configuration and fails loudly.
    let baseline = match metrics::baseline(net, params.zeta_margin) {
        Ok(b) => Some(b),
        Err(metrics::MetricsError::NoVisibleCameras) => None,
        Err(metrics::MetricsError::Mean(e)) => return Err(ObserverError::Baseline(e)),
    };
    let n_steps = (params.t_final / params.dt).round() as usize;
    let mut state = initial.clone();
    let mut records = Vec::with_capacity(n_steps / params.record_every + 2);
    for k in 0..=n_steps {
        if k % params.record_every == 0 || k == n_steps {
            records.push(make_record(net, &state, baseline.as_ref())?);
        }
        if k == n_steps {
            break;
        }
        state = step(
            net,
            &state,
            &params.gains,
            params.dt,
            params.scheme,
            params.error_mode,
            &params.schedule,
        )?;
    }
    Ok(TimeSeries { n_cameras: net.cameras().len(), records })
}

fn make_record(
    net: &Network,
    state: &ObserverState,
    baseline: Option<&metrics::AveragingBaseline>,
) -> Result<Record, ObserverError> {
    let mut positions = Vec::with_capacity(state.estimates.len());
    let mut rotations_world = Vec::with_capacity(state.estimates.len());
    for (cam, g_bar) in net.cameras().iter().zip(&state.estimates) {
        let world_rotation = cam.pose_in_world.rotation * g_bar.rotation;
        let xi = crate::se3::log_so3(&world_rotation).map_err(|source| {
            ObserverError::Geometry { camera: cam.id, t: state.time, source }
        })?;
        positions.push(g_bar.position);
        rotations_world.push(xi);
    }
    let (u_p, u_r, lambda_size, in_s) = match baseline {
        Some(b) => {
            let m = metrics::step_metrics(&state.estimates, b);
            (m.u_p, m.u_r, m.lambda.len(), m.in_s)
        }
        None => (f64::NAN, f64::NAN, 0, false),
    };
    Ok(Record { t: state.time, positions, rotations_world, u_p, u_r, lambda_size, in_s })
}
