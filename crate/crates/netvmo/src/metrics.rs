//! Averaging-performance analysis: the averaging baseline (mean pose, the
//! spread constants `rho_p`/`rho_R`, the invariant-set threshold `zeta` and
//! the contraction constant `beta`), estimation error energies, error-set
//! membership and attained accuracy levels, and the rotation positivity
//! certificates used by the invariant-set arguments.
//!
//! All quantities can be evaluated either in camera frames or in the world
//! frame; the two agree because the discrepancy functional `phi` only sees
//! relative rotations.

use crate::observer::Network;
use crate::runner::TimeSeries;
use crate::se3::{mean_pose, min_symmetric_eigenvalue, phi, Pose, Se3Error};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no camera views the target; the averaging baseline is undefined")]
    NoVisibleCameras,
    #[error("mean pose failed: {0}")]
    Mean(#[from] Se3Error),
}

/// Static averaging baseline of a network configuration.
#[derive(Debug, Clone)]
pub struct AveragingBaseline {
    /// The mean target pose in the world frame.
    pub g_star: Pose,
    /// The mean pose expressed in each camera's frame, indexed by camera.
    pub per_camera: Vec<Pose>,
    /// Total squared position spread of the viewed targets around the mean (m^2).
    pub rho_p: f64,
    /// Total rotation spread of the viewed targets around the mean.
    pub rho_r: f64,
    /// Worst single-camera rotation discrepancy from the mean.
    pub phi_m: f64,
    /// Invariant-set threshold, strictly above `phi_m`.
    pub zeta: f64,
    /// Contraction constant `1 - sqrt(2 zeta)`; the orientation guarantee is
    /// void when this is not positive.
    pub beta: f64,
    /// Number of cameras viewing the target.
    pub visible_count: usize,
    /// Whether at least one pair of viewed targets differs in both position
    /// and orientation (reported, not enforced).
    pub distinct_targets: bool,
}

impl AveragingBaseline {
    pub fn beta_positive(&self) -> bool {
        self.beta > 0.0
    }
}

/// Computes the baseline from the network's static target configuration.
/// `zeta_margin` is the relative margin of `zeta` over `phi_m` (with a tiny
/// absolute floor when all viewed targets already agree with the mean).
pub fn baseline(net: &Network, zeta_margin: f64) -> Result<AveragingBaseline, MetricsError> {
    let visible: Vec<usize> = net.visible_ids().collect();
    if visible.is_empty() {
        return Err(MetricsError::NoVisibleCameras);
    }
    let world_targets: Vec<Pose> =
        visible.iter().map(|id| net.targets()[id].pose_in_world).collect();
    let g_star = mean_pose(&world_targets)?;
    let per_camera: Vec<Pose> = net
        .cameras()
        .iter()
        .map(|c| crate::observer::relative_pose(&c.pose_in_world, &g_star))
        .collect();
    let mut rho_p = 0.0;
    let mut rho_r = 0.0;
    let mut phi_m = 0.0_f64;
    for &id in &visible {
        let g_io = crate::observer::relative_pose(
            &net.camera(id).pose_in_world,
            &net.targets()[&id].pose_in_world,
        );
        let g_star_i = &per_camera[id - 1];
        rho_p += (g_io.position - g_star_i.position).norm_squared();
        let d = phi(&(g_star_i.rotation.inverse() * g_io.rotation));
        rho_r += d;
        phi_m = phi_m.max(d);
    }
    // Absolute floor keeps the threshold meaningful when the viewed targets
    // already coincide with the mean (phi_m at or near roundoff zero).
    let zeta = (phi_m * (1.0 + zeta_margin)).max(1e-6);
    let beta = 1.0 - (2.0 * zeta).sqrt();
    let distinct_targets = visible.len() >= 2
        && visible.iter().enumerate().any(|(a, &i)| {
            visible[a + 1..].iter().any(|&j| {
                let ti = &net.targets()[&i].pose_in_world;
                let tj = &net.targets()[&j].pose_in_world;
                (ti.position - tj.position).norm() > 1e-12
                    && (ti.rotation.matrix() - tj.rotation.matrix()).norm() > 1e-12
            })
        });
    Ok(AveragingBaseline {
        g_star,
        per_camera,
        rho_p,
        rho_r,
        phi_m,
        zeta,
        beta,
        visible_count: visible.len(),
        distinct_targets,
    })
}

/// Position estimation error energy `1/2 sum_i ||p_bar_i - p*_i||^2`.
pub fn energy_p(estimates: &[Pose], base: &AveragingBaseline) -> f64 {
    0.5 * estimates
        .iter()
        .zip(&base.per_camera)
        .map(|(g, gs)| (g.position - gs.position).norm_squared())
        .sum::<f64>()
}

/// Orientation estimation error energy `sum_i phi(R*_i^T R_bar_i)`.
pub fn energy_r(estimates: &[Pose], base: &AveragingBaseline) -> f64 {
    estimates
        .iter()
        .zip(&base.per_camera)
        .map(|(g, gs)| phi(&(gs.rotation.inverse() * g.rotation)))
        .sum::<f64>()
}

/// Per-camera rotation discrepancy `phi(R*_i^T R_bar_i)`.
pub fn rotation_discrepancy(estimates: &[Pose], base: &AveragingBaseline, id: usize) -> f64 {
    phi(&(base.per_camera[id - 1].rotation.inverse() * estimates[id - 1].rotation))
}

/// Largest per-camera rotation discrepancy.
pub fn max_rotation_discrepancy(estimates: &[Pose], base: &AveragingBaseline) -> f64 {
    (1..=estimates.len())
        .map(|id| rotation_discrepancy(estimates, base, id))
        .fold(0.0, f64::max)
}

/// Strict membership of the estimates in the position and orientation error
/// sets at accuracy level `epsilon`.
pub fn omega_membership(
    estimates: &[Pose],
    base: &AveragingBaseline,
    epsilon: f64,
) -> (bool, bool) {
    let n = estimates.len() as f64;
    let mean_p = 2.0 * energy_p(estimates, base) / n;
    let mean_r = energy_r(estimates, base) / n;
    let vf = base.visible_count as f64;
    (mean_p < epsilon * base.rho_p / vf, mean_r < epsilon * base.rho_r / vf)
}

fn attained_from_mean(mean: f64, rho: f64, visible_count: usize) -> f64 {
    if mean == 0.0 {
        0.0
    } else {
        mean * visible_count as f64 / rho
    }
}

/// The infimum accuracy levels at which the current estimates belong to the
/// error sets: the membership inequalities rearranged for `epsilon`.
pub fn attained_epsilon(estimates: &[Pose], base: &AveragingBaseline) -> (f64, f64) {
    let n = estimates.len() as f64;
    let mean_p = 2.0 * energy_p(estimates, base) / n;
    let mean_r = energy_r(estimates, base) / n;
    (
        attained_from_mean(mean_p, base.rho_p, base.visible_count),
        attained_from_mean(mean_r, base.rho_r, base.visible_count),
    )
}

/// Positivity certificate per camera: the symmetric part of
/// `R_bar_i^T R*_i` is positive definite. Returns the per-camera flags and
/// their conjunction.
pub fn set_s_membership(estimates: &[Pose], base: &AveragingBaseline) -> (Vec<bool>, bool) {
    let flags: Vec<bool> = estimates
        .iter()
        .zip(&base.per_camera)
        .map(|(g, gs)| {
            let m = g.rotation.inverse().matrix() * gs.rotation.matrix();
            min_symmetric_eigenvalue(&m) > 0.0
        })
        .collect();
    let all = flags.iter().all(|&f| f);
    (flags, all)
}

/// Minimum eigenvalue of the symmetric part of `R*_i^T R_bar_i` for camera
/// `id`; positive values certify the local convexity used by the descent
/// arguments.
pub fn sigma(estimates: &[Pose], base: &AveragingBaseline, id: usize) -> f64 {
    let m = base.per_camera[id - 1].rotation.inverse().matrix()
        * estimates[id - 1].rotation.matrix();
    min_symmetric_eigenvalue(&m)
}

/// Ids of cameras whose rotation discrepancy from the mean is at or above
/// the threshold.
pub fn lambda_set(estimates: &[Pose], base: &AveragingBaseline, zeta: f64) -> Vec<usize> {
    (1..=estimates.len())
        .filter(|&id| rotation_discrepancy(estimates, base, id) >= zeta)
        .collect()
}

/// Per-step analysis bundle recorded along a simulation.
#[derive(Debug, Clone)]
pub struct StepMetrics {
    pub u_p: f64,
    pub u_r: f64,
    pub lambda: Vec<usize>,
    pub in_s: bool,
    pub max_phi: f64,
}

pub fn step_metrics(estimates: &[Pose], base: &AveragingBaseline) -> StepMetrics {
    let (_, in_s) = set_s_membership(estimates, base);
    StepMetrics {
        u_p: energy_p(estimates, base),
        u_r: energy_r(estimates, base),
        lambda: lambda_set(estimates, base, base.zeta),
        in_s,
        max_phi: max_rotation_discrepancy(estimates, base),
    }
}

/// Index of the first record belonging to the trailing fraction of a run.
pub fn tail_start(len: usize, tail_fraction: f64) -> usize {
    let count = ((len as f64 * tail_fraction).floor() as usize).clamp(1, len.max(1));
    len.saturating_sub(count)
}

/// Mean of the recorded energies over the trailing fraction of the run.
pub fn tail_mean_energies(series: &TimeSeries, tail_fraction: f64) -> (f64, f64) {
    let start = tail_start(series.records.len(), tail_fraction);
    let tail = &series.records[start..];
    let n = tail.len() as f64;
    (
        tail.iter().map(|r| r.u_p).sum::<f64>() / n,
        tail.iter().map(|r| r.u_r).sum::<f64>() / n,
    )
}

/// The smallest accuracy levels met at every record of the trailing fraction
/// (a finite-horizon proxy for membership holding for all later times).
pub fn tail_attained_epsilon(
    series: &TimeSeries,
    base: &AveragingBaseline,
    tail_fraction: f64,
) -> (f64, f64) {
    let n = series.n_cameras as f64;
    let start = tail_start(series.records.len(), tail_fraction);
    let mut eps_p = 0.0_f64;
    let mut eps_r = 0.0_f64;
    for r in &series.records[start..] {
        eps_p = eps_p.max(attained_from_mean(2.0 * r.u_p / n, base.rho_p, base.visible_count));
        eps_r = eps_r.max(attained_from_mean(r.u_r / n, base.rho_r, base.visible_count));
    }
    (eps_p, eps_r)
}

/// Whether the estimates meet accuracy level `epsilon` on every record of the
/// trailing fraction of the run, for positions and orientations.
pub fn epsilon_level_achieved(
    series: &TimeSeries,
    base: &AveragingBaseline,
    epsilon: f64,
    tail_fraction: f64,
) -> (bool, bool) {
    let n = series.n_cameras as f64;
    let vf = base.visible_count as f64;
    let start = tail_start(series.records.len(), tail_fraction);
    let mut ok_p = true;
    let mut ok_r = true;
    for r in &series.records[start..] {
        ok_p &= 2.0 * r.u_p / n < epsilon * base.rho_p / vf;
        ok_r &= r.u_r / n < epsilon * base.rho_r / vf;
    }
    (ok_p, ok_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::{CameraIntrinsics, FeatureModel};
    use crate::graph::CommGraph;
    use crate::observer::{CameraNode, Network, TargetView};
    use crate::runner::Record;
    use crate::se3::{exp_so3, Rotation, Twist};
    use approx::assert_relative_eq;
    use nalgebra::{Matrix3, Vector3};
    use std::collections::BTreeMap;

    fn camera(id: usize, p: Vector3<f64>, visible: bool) -> CameraNode {
        CameraNode {
            id,
            pose_in_world: Pose::new(Rotation::identity(), p),
            intrinsics: CameraIntrinsics::new(0.03).unwrap(),
            visible,
        }
    }

    fn target(p: Vector3<f64>, xi: Vector3<f64>) -> TargetView {
        TargetView {
            pose_in_world: Pose::new(exp_so3(&xi), p),
            body_velocity: Twist::zero(),
        }
    }

    /// Five cameras, three of which view the target, on the six-edge graph.
    pub(crate) fn five_camera_network() -> Network {
        let cameras = vec![
            camera(1, Vector3::zeros(), true),
            camera(2, Vector3::new(1.0, 0.0, 0.0), true),
            camera(3, Vector3::new(0.0, 1.0, 0.0), true),
            camera(4, Vector3::new(-1.0, 0.0, 0.0), false),
            camera(5, Vector3::new(0.0, -1.0, 0.0), false),
        ];
        let targets = BTreeMap::from([
            (1, target(Vector3::new(0.55, 1.00, -1.91), Vector3::new(0.30, 0.19, 0.21))),
            (2, target(Vector3::new(0.30, 0.80, -1.84), Vector3::new(0.21, 0.30, 0.19))),
            (3, target(Vector3::new(0.56, 1.05, -2.00), Vector3::new(0.29, 0.20, 0.31))),
        ]);
        Network::new(
            cameras,
            targets,
            FeatureModel::default_tetrahedron(),
            CommGraph::new(5, &[(1, 2), (1, 3), (1, 5), (2, 3), (3, 4), (4, 5)]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn baseline_requires_a_viewing_camera() {
        let net = Network::new(
            vec![camera(1, Vector3::zeros(), false)],
            BTreeMap::new(),
            FeatureModel::default_tetrahedron(),
            CommGraph::new(1, &[]).unwrap(),
        )
        .unwrap();
        assert!(matches!(baseline(&net, 0.1), Err(MetricsError::NoVisibleCameras)));
    }

    #[test]
    fn baseline_of_identical_targets_is_degenerate() {
        let t = target(Vector3::new(0.1, 0.2, 2.0), Vector3::new(0.1, 0.0, 0.0));
        let net = Network::new(
            vec![camera(1, Vector3::zeros(), true), camera(2, Vector3::x(), true)],
            BTreeMap::from([(1, t.clone()), (2, t)]),
            FeatureModel::default_tetrahedron(),
            CommGraph::new(2, &[(1, 2)]).unwrap(),
        )
        .unwrap();
        let b = baseline(&net, 0.1).unwrap();
        assert!(b.rho_p < 1e-24);
        assert!(b.rho_r < 1e-24);
        assert!(b.phi_m < 1e-30);
        assert_eq!(b.zeta, 1e-6);
        assert!(!b.distinct_targets);
    }

    #[test]
    fn baseline_reproduces_reference_mean_position() {
        let b = baseline(&five_camera_network(), 0.1).unwrap();
        let expected = Vector3::new(0.47, 0.95, -1.92);
        for k in 0..3 {
            assert!((b.g_star.position[k] - expected[k]).abs() < 0.005);
        }
        assert_eq!(b.visible_count, 3);
        assert!(b.distinct_targets);
        assert!(b.beta_positive());
    }

    #[test]
    fn rho_p_matches_hand_summed_value() {
        // Independent arithmetic from the scenario constants: with identity
        // camera rotations, p_io_i - p*_i = (p_wo_i - p_wi) - (p* - p_wi)
        // = p_wo_i - p*, so rho_p is the squared spread around the mean.
        let b = baseline(&five_camera_network(), 0.1).unwrap();
        let targets = [
            Vector3::new(0.55, 1.00, -1.91),
            Vector3::new(0.30, 0.80, -1.84),
            Vector3::new(0.56, 1.05, -2.00),
        ];
        let mean = (targets[0] + targets[1] + targets[2]) / 3.0;
        let by_hand: f64 = targets.iter().map(|p| (p - mean).norm_squared()).sum();
        assert_relative_eq!(b.rho_p, by_hand, epsilon = 1e-12);
    }

    fn exact_estimates(net: &Network, b: &AveragingBaseline) -> Vec<Pose> {
        let _ = net;
        b.per_camera.clone()
    }

    #[test]
    fn energy_p_zero_iff_exact_and_unit_offset() {
        let net = five_camera_network();
        let b = baseline(&net, 0.1).unwrap();
        let mut est = exact_estimates(&net, &b);
        assert_eq!(energy_p(&est, &b), 0.0);
        est[2].position += Vector3::x();
        assert_relative_eq!(energy_p(&est, &b), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn energy_r_zero_exact_and_quarter_turn() {
        let net = five_camera_network();
        let b = baseline(&net, 0.1).unwrap();
        let mut est = exact_estimates(&net, &b);
        assert!(energy_r(&est, &b) < 1e-24);
        est[1].rotation =
            est[1].rotation * exp_so3(&Vector3::new(0.0, 0.0, std::f64::consts::FRAC_PI_2));
        assert_relative_eq!(energy_r(&est, &b), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn energy_r_is_frame_independent() {
        let net = five_camera_network();
        let b = baseline(&net, 0.1).unwrap();
        let mut est = exact_estimates(&net, &b);
        for (k, g) in est.iter_mut().enumerate() {
            g.rotation = g.rotation * exp_so3(&Vector3::new(0.05 * k as f64, -0.03, 0.02));
        }
        let camera_frames = energy_r(&est, &b);
        // World-frame evaluation: phi(R*^T R_w,i) with R_w,i = R_wi R_bar_i.
        let world: f64 = net
            .cameras()
            .iter()
            .zip(&est)
            .map(|(c, g)| {
                let r_w = c.pose_in_world.rotation * g.rotation;
                phi(&(b.g_star.rotation.inverse() * r_w))
            })
            .sum();
        assert!((camera_frames - world).abs() < 1e-12);
    }

    #[test]
    fn omega_membership_strictness() {
        let net = five_camera_network();
        let b = baseline(&net, 0.1).unwrap();
        let est = exact_estimates(&net, &b);
        assert_eq!(omega_membership(&est, &b, 0.5), (true, true));
        // Strict inequality: exact estimates still fail at epsilon = 0.
        assert_eq!(omega_membership(&est, &b, 0.0), (false, false));
    }

    #[test]
    fn attained_epsilon_flips_membership() {
        let net = five_camera_network();
        let b = baseline(&net, 0.1).unwrap();
        let mut est = exact_estimates(&net, &b);
        est[0].position += Vector3::new(0.05, 0.0, 0.0);
        est[3].rotation = est[3].rotation * exp_so3(&Vector3::new(0.1, 0.0, 0.0));
        let (eps_p, eps_r) = attained_epsilon(&est, &b);
        assert!(eps_p > 0.0 && eps_r > 0.0);
        let delta = 1e-9;
        assert!(omega_membership(&est, &b, eps_p + delta).0);
        assert!(!omega_membership(&est, &b, eps_p - delta).0);
        assert!(omega_membership(&est, &b, eps_r + delta).1);
        assert!(!omega_membership(&est, &b, eps_r - delta).1);
    }

    #[test]
    fn s_membership_aligned_and_flipped() {
        let net = five_camera_network();
        let b = baseline(&net, 0.1).unwrap();
        let mut est = exact_estimates(&net, &b);
        let (flags, all) = set_s_membership(&est, &b);
        assert!(all && flags.iter().all(|&f| f));
        est[0].rotation =
            est[0].rotation * exp_so3(&Vector3::new(std::f64::consts::PI, 0.0, 0.0));
        let (flags, all) = set_s_membership(&est, &b);
        assert!(!all);
        assert!(!flags[0]);
        assert!(sigma(&est, &b, 1) < 0.0);
    }

    #[test]
    fn initial_identity_estimates_are_in_s() {
        // The default initial orientation estimates (identity) must satisfy
        // the positivity hypothesis on this configuration.
        let net = five_camera_network();
        let b = baseline(&net, 0.1).unwrap();
        let est = net.initial_state().estimates;
        let (_, all) = set_s_membership(&est, &b);
        assert!(all);
    }

    #[test]
    fn sigma_closed_forms() {
        let net = five_camera_network();
        let b = baseline(&net, 0.1).unwrap();
        let est = exact_estimates(&net, &b);
        assert_relative_eq!(sigma(&est, &b, 1), 1.0, epsilon = 1e-12);
        let mut est2 = est.clone();
        est2[0].rotation =
            est2[0].rotation * exp_so3(&Vector3::new(std::f64::consts::FRAC_PI_2, 0.0, 0.0));
        assert_relative_eq!(sigma(&est2, &b, 1), 0.0, epsilon = 1e-12);
    }

    /// Independent 3x3 symmetric eigenvalue bound via the trigonometric
    /// solution of the characteristic cubic.
    fn min_eig_by_characteristic_cubic(s: &Matrix3<f64>) -> f64 {
        let q = s.trace() / 3.0;
        let p1 = s[(0, 1)].powi(2) + s[(0, 2)].powi(2) + s[(1, 2)].powi(2);
        let p2 = (s[(0, 0)] - q).powi(2) + (s[(1, 1)] - q).powi(2) + (s[(2, 2)] - q).powi(2)
            + 2.0 * p1;
        if p2 < 1e-30 {
            return q;
        }
        let p = (p2 / 6.0).sqrt();
        let b = (s - q * Matrix3::identity()) / p;
        let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
        let phi_angle = r.acos() / 3.0;
        q + 2.0 * p * (phi_angle + 2.0 * std::f64::consts::FRAC_PI_3).cos()
    }

    #[test]
    fn sigma_matches_characteristic_cubic_oracle() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        let net = five_camera_network();
        let b = baseline(&net, 0.1).unwrap();
        for _ in 0..50 {
            let mut est = exact_estimates(&net, &b);
            let axis = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            est[0].rotation = est[0].rotation
                * exp_so3(&(axis.normalize() * rng.random_range(0.0..3.0_f64)));
            let m = b.per_camera[0].rotation.inverse().matrix() * est[0].rotation.matrix();
            let s = crate::se3::sym_part(&m);
            // The acos in the closed form limits the oracle itself to ~1e-8.
            assert_relative_eq!(
                sigma(&est, &b, 1),
                min_eig_by_characteristic_cubic(&s),
                epsilon = 1e-7
            );
        }
    }

    #[test]
    fn lambda_set_cases() {
        let net = five_camera_network();
        let b = baseline(&net, 0.1).unwrap();
        let est = exact_estimates(&net, &b);
        assert!(lambda_set(&est, &b, b.zeta).is_empty());
        // Everyone at the maximal discrepancy 4 with threshold 1.
        let mut worst = est.clone();
        for g in &mut worst {
            g.rotation = g.rotation * exp_so3(&Vector3::new(std::f64::consts::PI, 0.0, 0.0));
        }
        assert_eq!(lambda_set(&worst, &b, 1.0), vec![1, 2, 3, 4, 5]);
        // Mixed state matches the per-element comparison.
        let mut mixed = est;
        mixed[1].rotation = mixed[1].rotation * exp_so3(&Vector3::new(0.8, 0.0, 0.0));
        mixed[4].rotation = mixed[4].rotation * exp_so3(&Vector3::new(0.0, 1.2, 0.0));
        let zeta = 0.5;
        let expected: Vec<usize> = (1..=5)
            .filter(|&id| rotation_discrepancy(&mixed, &b, id) >= zeta)
            .collect();
        assert_eq!(lambda_set(&mixed, &b, zeta), expected);
        assert_eq!(expected, vec![2, 5]);
    }

    fn series_from_energies(n: usize, energies: &[(f64, f64)]) -> TimeSeries {
        TimeSeries {
            n_cameras: n,
            records: energies
                .iter()
                .enumerate()
                .map(|(k, &(u_p, u_r))| Record {
                    t: k as f64,
                    positions: vec![Vector3::zeros(); n],
                    rotations_world: vec![Vector3::zeros(); n],
                    u_p,
                    u_r,
                    lambda_size: 0,
                    in_s: true,
                })
                .collect(),
        }
    }

    #[test]
    fn epsilon_level_on_constant_and_diverging_series() {
        let net = five_camera_network();
        let b = baseline(&net, 0.1).unwrap();
        let exact = series_from_energies(5, &[(0.0, 0.0); 10]);
        assert_eq!(epsilon_level_achieved(&exact, &b, 1e-6, 0.2), (true, true));
        let diverging: Vec<(f64, f64)> =
            (0..10).map(|k| (k as f64 * 10.0, k as f64 * 10.0)).collect();
        let series = series_from_energies(5, &diverging);
        assert_eq!(epsilon_level_achieved(&series, &b, 1.0, 0.5), (false, false));
    }

    #[test]
    fn tail_helpers() {
        assert_eq!(tail_start(10, 0.2), 8);
        assert_eq!(tail_start(1, 0.2), 0);
        assert_eq!(tail_start(2001, 0.2), 1601);
        let series = series_from_energies(5, &[(4.0, 8.0), (2.0, 6.0), (1.0, 3.0), (1.0, 1.0)]);
        let (up, ur) = tail_mean_energies(&series, 0.5);
        assert_relative_eq!(up, 1.0, epsilon = 1e-15);
        assert_relative_eq!(ur, 2.0, epsilon = 1e-15);
    }
}
