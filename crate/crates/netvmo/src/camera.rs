//! Pinhole measurement synthesis, the image Jacobian, and reconstruction of
//! the pose estimation error from the visual measurement error.
//!
//! Measurements are stacked metric image-plane coordinates of known feature
//! points. The Jacobian is the exact first-order sensitivity of the predicted
//! measurement to the stacked error coordinates of [`pose_error`], so that
//! applying its pseudo-inverse to a measurement residual reconstructs that
//! error to first order.

use crate::se3::{hat, pose_error, ErrorVector, Pose};
use nalgebra::{DMatrix, DVector, Matrix3, Vector2, Vector3};
use thiserror::Error;

/// Depth floor guarding the projection singularity (meters).
pub const MIN_DEPTH: f64 = 1e-6;
/// Relative singular-value cutoff for the Jacobian pseudo-inverse.
pub const PINV_CUTOFF: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CameraError {
    #[error("focal length must be positive, got {0}")]
    NonPositiveFocal(f64),
    #[error("need at least 4 feature points, got {0}")]
    TooFewFeatures(usize),
    #[error("point at depth {depth:.3e} m is behind the camera ({})",
            .feature.map_or("single point".to_string(), |l| format!("feature {l}")))]
    BehindCamera { feature: Option<usize>, depth: f64 },
    #[error("degenerate feature geometry: image Jacobian has rank {rank} < 6")]
    DegenerateFeatures { rank: usize },
    #[error("measurement has {got} entries but the feature model implies {expected}")]
    MeasurementSize { got: usize, expected: usize },
}

/// Pinhole intrinsics: focal length in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    focal_length: f64,
}

impl CameraIntrinsics {
    pub fn new(focal_length: f64) -> Result<Self, CameraError> {
        if focal_length <= 0.0 {
            return Err(CameraError::NonPositiveFocal(focal_length));
        }
        Ok(CameraIntrinsics { focal_length })
    }

    pub fn focal_length(&self) -> f64 {
        self.focal_length
    }
}

/// Known feature points in the object frame (meters).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureModel {
    points: Vec<Vector3<f64>>,
}

impl FeatureModel {
    pub fn new(points: Vec<Vector3<f64>>) -> Result<Self, CameraError> {
        if points.len() < 4 {
            return Err(CameraError::TooFewFeatures(points.len()));
        }
        Ok(FeatureModel { points })
    }

    /// A regular tetrahedron of edge 0.2 m centered on the object origin;
    /// non-coplanar, so the image Jacobian has full rank generically.
    pub fn default_tetrahedron() -> Self {
        let a = 0.1 / 2.0_f64.sqrt();
        FeatureModel {
            points: vec![
                Vector3::new(a, a, a),
                Vector3::new(a, -a, -a),
                Vector3::new(-a, a, -a),
                Vector3::new(-a, -a, a),
            ],
        }
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Stacked image-plane coordinates of all features, length `2m` (meters on
/// the sensor plane).
#[derive(Debug, Clone, PartialEq)]
pub struct VisualMeasurement(DVector<f64>);

impl VisualMeasurement {
    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn feature(&self, l: usize) -> Vector2<f64> {
        Vector2::new(self.0[2 * l], self.0[2 * l + 1])
    }

    pub fn feature_count(&self) -> usize {
        self.0.len() / 2
    }
}

/// Perspective projection of a camera-frame point: `(lambda / z) [x, y]`,
/// with the default depth floor [`MIN_DEPTH`].
pub fn project(
    intrinsics: &CameraIntrinsics,
    point_in_camera: &Vector3<f64>,
) -> Result<Vector2<f64>, CameraError> {
    project_with_min_depth(intrinsics, point_in_camera, MIN_DEPTH)
}

/// [`project`] with an explicit minimum depth.
pub fn project_with_min_depth(
    intrinsics: &CameraIntrinsics,
    point_in_camera: &Vector3<f64>,
    min_depth: f64,
) -> Result<Vector2<f64>, CameraError> {
    let z = point_in_camera[2];
    if z <= min_depth {
        return Err(CameraError::BehindCamera { feature: None, depth: z });
    }
    let s = intrinsics.focal_length / z;
    Ok(Vector2::new(s * point_in_camera[0], s * point_in_camera[1]))
}

/// Synthesizes the visual measurement of the feature set under the relative
/// pose `g` (object frame expressed in the camera frame).
pub fn measure(
    intrinsics: &CameraIntrinsics,
    features: &FeatureModel,
    g: &Pose,
) -> Result<VisualMeasurement, CameraError> {
    let mut f = DVector::zeros(2 * features.len());
    for (l, q) in features.points().iter().enumerate() {
        let p_cam = g.transform_point(q);
        let uv = project(intrinsics, &p_cam).map_err(|e| match e {
            CameraError::BehindCamera { depth, .. } => {
                CameraError::BehindCamera { feature: Some(l), depth }
            }
            other => other,
        })?;
        f[2 * l] = uv[0];
        f[2 * l + 1] = uv[1];
    }
    Ok(VisualMeasurement(f))
}

/// Image Jacobian at `g_bar`: the `2m x 6` first-order sensitivity of the
/// predicted measurement to the stacked error coordinates, i.e. for small `e`
///
/// `measure(g_bar * pose_from_error(e)) - measure(g_bar) = J e + O(||e||^2)`.
pub fn image_jacobian(
    intrinsics: &CameraIntrinsics,
    features: &FeatureModel,
    g_bar: &Pose,
) -> Result<DMatrix<f64>, CameraError> {
    let m = features.len();
    let lambda = intrinsics.focal_length;
    let r = g_bar.rotation.matrix();
    let mut j = DMatrix::zeros(2 * m, 6);
    for (l, q) in features.points().iter().enumerate() {
        let p_cam = g_bar.transform_point(q);
        let (x, y, z) = (p_cam[0], p_cam[1], p_cam[2]);
        if z <= MIN_DEPTH {
            return Err(CameraError::BehindCamera { feature: Some(l), depth: z });
        }
        // d(projection)/d(camera point), then the camera point moves as
        // R (e_p - hat(q) e_r) to first order in the error coordinates.
        let proj = nalgebra::Matrix2x3::new(
            lambda / z, 0.0, -lambda * x / (z * z),
            0.0, lambda / z, -lambda * y / (z * z),
        );
        let mut body = nalgebra::Matrix3x6::zeros();
        body.fixed_view_mut::<3, 3>(0, 0).copy_from(&Matrix3::identity());
        body.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-hat(q)));
        let block = proj * r * body;
        j.view_mut((2 * l, 0), (2, 6)).copy_from(&block);
    }
    Ok(j)
}

/// Reconstructs the pose estimation error from a measured image vector:
/// the least-squares solution of `J(g_bar) e = f_measured - measure(g_bar)`.
///
/// Singular values below [`PINV_CUTOFF`] times the largest are treated as
/// zero; a resulting rank below 6 is an error rather than a minimum-norm
/// solve, so rank-deficient feature geometry cannot pass silently.
pub fn reconstruct_error(
    intrinsics: &CameraIntrinsics,
    features: &FeatureModel,
    g_bar: &Pose,
    f_measured: &VisualMeasurement,
) -> Result<ErrorVector, CameraError> {
    if f_measured.as_vector().len() != 2 * features.len() {
        return Err(CameraError::MeasurementSize {
            got: f_measured.as_vector().len(),
            expected: 2 * features.len(),
        });
    }
    let predicted = measure(intrinsics, features, g_bar)?;
    let j = image_jacobian(intrinsics, features, g_bar)?;
    let svd = j.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let cutoff = PINV_CUTOFF * sigma_max;
    let rank = svd.singular_values.iter().filter(|s| **s > cutoff).count();
    if rank < 6 {
        return Err(CameraError::DegenerateFeatures { rank });
    }
    let residual = f_measured.as_vector() - predicted.as_vector();
    let e = svd.solve(&residual, cutoff).expect("SVD was computed with u and v_t");
    Ok(ErrorVector::new(
        Vector3::new(e[0], e[1], e[2]),
        Vector3::new(e[3], e[4], e[5]),
    ))
}

/// First-order residual of the reconstruction against the true error of a
/// perturbed pose; test and diagnostics helper.
pub fn reconstruction_gap(
    intrinsics: &CameraIntrinsics,
    features: &FeatureModel,
    g_bar: &Pose,
    e_true: &ErrorVector,
) -> Result<f64, CameraError> {
    let g_true = *g_bar
        * crate::se3::pose_from_error(e_true)
            .map_err(|_| CameraError::DegenerateFeatures { rank: 0 })?;
    let f = measure(intrinsics, features, &g_true)?;
    let e_rec = reconstruct_error(intrinsics, features, g_bar, &f)?;
    let g_e = g_bar.inverse() * g_true;
    let e_exact = pose_error(&g_e);
    Ok(ErrorVector::new(
        e_rec.position - e_exact.position,
        e_rec.rotation - e_exact.rotation,
    )
    .norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::se3::{exp_so3, pose_from_error, Rotation};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn intr(lambda: f64) -> CameraIntrinsics {
        CameraIntrinsics::new(lambda).unwrap()
    }

    #[test]
    fn intrinsics_reject_non_positive_focal() {
        assert!(matches!(CameraIntrinsics::new(0.0), Err(CameraError::NonPositiveFocal(_))));
        assert!(matches!(CameraIntrinsics::new(-0.5), Err(CameraError::NonPositiveFocal(_))));
    }

    #[test]
    fn feature_model_requires_four_points() {
        let three = vec![Vector3::zeros(); 3];
        assert!(matches!(FeatureModel::new(three), Err(CameraError::TooFewFeatures(3))));
        assert_eq!(FeatureModel::default_tetrahedron().len(), 4);
    }

    #[test]
    fn default_tetrahedron_has_edge_0_2() {
        let f = FeatureModel::default_tetrahedron();
        for a in 0..4 {
            for b in (a + 1)..4 {
                assert_relative_eq!((f.points()[a] - f.points()[b]).norm(), 0.2, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn project_on_axis_point() {
        assert_eq!(project(&intr(0.03), &Vector3::new(0.0, 0.0, 2.0)).unwrap(), Vector2::zeros());
    }

    #[test]
    fn project_direct_formula() {
        assert_relative_eq!(
            project(&intr(0.03), &Vector3::new(1.0, 1.0, 2.0)).unwrap(),
            Vector2::new(0.015, 0.015),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            project(&intr(1.0), &Vector3::new(2.0, 3.0, 4.0)).unwrap(),
            Vector2::new(0.5, 0.75),
            epsilon = 1e-15
        );
    }

    #[test]
    fn project_rejects_points_behind_camera() {
        assert!(matches!(
            project(&intr(0.03), &Vector3::new(0.0, 0.0, 0.0)),
            Err(CameraError::BehindCamera { feature: None, .. })
        ));
        assert!(matches!(
            project(&intr(0.03), &Vector3::new(0.1, 0.1, -1.0)),
            Err(CameraError::BehindCamera { .. })
        ));
        // The floor is configurable; a tighter one rejects shallow points the
        // default accepts.
        let shallow = Vector3::new(0.0, 0.0, 1e-3);
        assert!(project(&intr(0.03), &shallow).is_ok());
        assert!(project_with_min_depth(&intr(0.03), &shallow, 1e-2).is_err());
    }

    fn square_features() -> FeatureModel {
        FeatureModel::new(vec![
            Vector3::new(0.1, 0.1, 0.0),
            Vector3::new(0.1, -0.1, 0.0),
            Vector3::new(-0.1, -0.1, 0.0),
            Vector3::new(-0.1, 0.1, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn measure_translated_square_projects_componentwise() {
        let lambda = 0.03;
        let g = Pose::new(Rotation::identity(), Vector3::new(0.0, 0.0, 2.0));
        let features = square_features();
        let f = measure(&intr(lambda), &features, &g).unwrap();
        for (l, q) in features.points().iter().enumerate() {
            let moved = q + Vector3::new(0.0, 0.0, 2.0);
            let expected = (lambda / 2.0) * Vector2::new(moved[0], moved[1]);
            assert_relative_eq!(f.feature(l), expected, epsilon = 1e-15);
        }
    }

    #[test]
    fn measure_single_offset_feature() {
        let features = FeatureModel::new(vec![
            Vector3::new(0.1, 0.0, 0.0),
            Vector3::new(0.0, 0.1, 0.0),
            Vector3::new(0.0, 0.0, 0.1),
            Vector3::new(0.1, 0.1, 0.1),
        ])
        .unwrap();
        let g = Pose::new(Rotation::identity(), Vector3::new(0.0, 0.0, 1.0));
        let f = measure(&intr(0.03), &features, &g).unwrap();
        assert_relative_eq!(f.feature(0), Vector2::new(0.003, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn measure_is_invariant_under_identity_composition() {
        let g = Pose::new(exp_so3(&Vector3::new(0.1, 0.2, -0.1)), Vector3::new(0.2, -0.1, 1.5));
        let features = FeatureModel::default_tetrahedron();
        let a = measure(&intr(0.03), &features, &g).unwrap();
        let b = measure(&intr(0.03), &features, &(g * Pose::identity())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn measure_depends_only_on_relative_pose() {
        // Re-express the same relative pose through two different world frames.
        let g_io = Pose::new(exp_so3(&Vector3::new(0.2, -0.1, 0.3)), Vector3::new(0.1, 0.05, 1.8));
        let features = FeatureModel::default_tetrahedron();
        let direct = measure(&intr(0.03), &features, &g_io).unwrap();
        let g_wi = Pose::new(exp_so3(&Vector3::new(-0.4, 0.9, 0.2)), Vector3::new(3.0, -1.0, 0.5));
        let g_wo = g_wi * g_io;
        let relative = g_wi.inverse() * g_wo;
        let indirect = measure(&intr(0.03), &features, &relative).unwrap();
        for l in 0..4 {
            assert_relative_eq!(direct.feature(l), indirect.feature(l), epsilon = 1e-12);
        }
    }

    #[test]
    fn measure_propagates_behind_camera_with_feature_index() {
        let g = Pose::new(Rotation::identity(), Vector3::new(0.0, 0.0, 0.05));
        // Tetrahedron extends to z = -0.07 around the origin, so some
        // transformed feature has negative depth.
        let err = measure(&intr(0.03), &FeatureModel::default_tetrahedron(), &g).unwrap_err();
        assert!(matches!(err, CameraError::BehindCamera { feature: Some(_), .. }));
    }

    fn well_posed_pose(rng: &mut impl Rng) -> Pose {
        Pose::new(
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
        )
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let features = FeatureModel::default_tetrahedron();
        let intrinsics = intr(0.03);
        let h = 1e-6;
        for _ in 0..100 {
            let g_bar = well_posed_pose(&mut rng);
            let j = image_jacobian(&intrinsics, &features, &g_bar).unwrap();
            for k in 0..6 {
                let mut e = nalgebra::Vector6::zeros();
                e[k] = h;
                let plus = measure(
                    &intrinsics,
                    &features,
                    &(g_bar * pose_from_error(&ErrorVector::from_vector6(&e)).unwrap()),
                )
                .unwrap();
                e[k] = -h;
                let minus = measure(
                    &intrinsics,
                    &features,
                    &(g_bar * pose_from_error(&ErrorVector::from_vector6(&e)).unwrap()),
                )
                .unwrap();
                let fd = (plus.as_vector() - minus.as_vector()) / (2.0 * h);
                let col = j.column(k);
                let denom = col.norm().max(1e-12);
                let gap = (&fd - col).norm() / denom;
                assert!(gap < 1e-5, "column {k} disagrees by {gap}: fd {fd:?}");
            }
        }
    }

    #[test]
    fn zero_perturbation_changes_nothing() {
        let g_bar = Pose::new(Rotation::identity(), Vector3::new(0.0, 0.0, 2.0));
        let features = FeatureModel::default_tetrahedron();
        let f0 = measure(&intr(0.03), &features, &g_bar).unwrap();
        let f1 = measure(
            &intr(0.03),
            &features,
            &(g_bar * pose_from_error(&ErrorVector::zero()).unwrap()),
        )
        .unwrap();
        assert_eq!(f0, f1);
    }

    #[test]
    fn depth_column_sign_on_offset_point() {
        // A single point at (x, 0, z): moving the object away along the
        // optical axis shrinks the image, so df_x/de_3 = -lambda x / z^2.
        let lambda = 0.03;
        let features = FeatureModel::new(vec![
            Vector3::new(0.1, 0.0, 0.0),
            Vector3::new(0.0, 0.1, 0.0),
            Vector3::new(0.0, 0.0, 0.1),
            Vector3::new(0.05, 0.05, 0.05),
        ])
        .unwrap();
        let g_bar = Pose::new(Rotation::identity(), Vector3::new(0.0, 0.0, 1.0));
        let j = image_jacobian(&intr(lambda), &features, &g_bar).unwrap();
        let expected = -lambda * 0.1 / 1.0_f64.powi(2);
        assert_relative_eq!(j[(0, 2)], expected, epsilon = 1e-12);
        assert!(j[(0, 2)] < 0.0);
    }

    #[test]
    fn reconstruct_zero_residual_gives_zero_error() {
        let g_bar = Pose::new(exp_so3(&Vector3::new(0.1, -0.2, 0.05)), Vector3::new(0.1, 0.0, 2.0));
        let features = FeatureModel::default_tetrahedron();
        let f = measure(&intr(0.03), &features, &g_bar).unwrap();
        let e = reconstruct_error(&intr(0.03), &features, &g_bar, &f).unwrap();
        assert!(e.norm() < 1e-15, "norm {}", e.norm());
    }

    #[test]
    fn reconstruct_recovers_small_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let features = FeatureModel::default_tetrahedron();
        let intrinsics = intr(0.03);
        let g_bar = Pose::new(exp_so3(&Vector3::new(0.1, -0.05, 0.08)), Vector3::new(0.1, -0.1, 2.0));
        for _ in 0..20 {
            let dir = nalgebra::Vector6::from_fn(|_, _| rng.random_range(-1.0..1.0)).normalize();
            let e_true = ErrorVector::from_vector6(&(dir * 1e-4));
            let g_true = g_bar * pose_from_error(&e_true).unwrap();
            let f = measure(&intrinsics, &features, &g_true).unwrap();
            let e_rec = reconstruct_error(&intrinsics, &features, &g_bar, &f).unwrap();
            let gap = (e_rec.to_vector6() - e_true.to_vector6()).norm();
            assert!(gap < 1e-6, "gap {gap}");
        }
    }

    #[test]
    fn reconstruct_rejects_collinear_duplicate_features() {
        let features = FeatureModel::new(vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(0.1, 0.0, 0.0),
            Vector3::new(0.2, 0.0, 0.0),
            Vector3::new(0.1, 0.0, 0.0),
        ])
        .unwrap();
        let g_bar = Pose::new(Rotation::identity(), Vector3::new(0.0, 0.0, 2.0));
        let f = measure(&intr(0.03), &features, &g_bar).unwrap();
        let err = reconstruct_error(&intr(0.03), &features, &g_bar, &f).unwrap_err();
        assert!(matches!(err, CameraError::DegenerateFeatures { rank } if rank < 6));
    }

    #[test]
    fn reconstruction_error_decays_quadratically() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let features = FeatureModel::default_tetrahedron();
        let intrinsics = intr(0.03);
        let g_bar = well_posed_pose(&mut rng);
        let dir = nalgebra::Vector6::from_fn(|_, _| rng.random_range(-1.0..1.0)).normalize();
        let gap = |delta: f64| {
            reconstruction_gap(
                &intrinsics,
                &features,
                &g_bar,
                &ErrorVector::from_vector6(&(dir * delta)),
            )
            .unwrap()
        };
        let g1 = gap(1e-2);
        let g2 = gap(5e-3);
        let ratio = g1 / g2;
        assert!(
            (2.5..6.0).contains(&ratio),
            "halving the perturbation should roughly quarter the gap, got ratio {ratio}"
        );
    }

    #[test]
    fn reconstruct_checks_measurement_size() {
        let features = FeatureModel::default_tetrahedron();
        let g_bar = Pose::new(Rotation::identity(), Vector3::new(0.0, 0.0, 2.0));
        let small = VisualMeasurement(DVector::zeros(6));
        let err = reconstruct_error(&intr(0.03), &features, &g_bar, &small).unwrap_err();
        assert!(matches!(err, CameraError::MeasurementSize { got: 6, expected: 8 }));
    }
}
