//! SO(3)/SE(3) primitives: skew operators, exponential and logarithm maps,
//! rotation and pose error maps, the error functionals `phi`/`psi`, and the
//! Frobenius (chordal) mean on SE(3).
//!
//! Rotations are kept as plain 3x3 matrices. Every operation that returns a
//! [`Rotation`] re-projects its result onto the orthogonal group whenever the
//! orthogonality residual exceeds [`REPROJECT_THRESHOLD`], which bounds drift
//! under long composition chains (e.g. during time integration).

use nalgebra::{Matrix3, Matrix4, Vector3, Vector6};
use thiserror::Error;

/// Tolerance for the algebraic invariants of a rotation matrix.
pub const ROTATION_TOL: f64 = 1e-9;
/// Orthogonality drift above which results are re-projected onto SO(3).
pub const REPROJECT_THRESHOLD: f64 = 1e-12;
/// Margin below pi under which the rotation logarithm is rejected.
pub const LOG_ANGLE_MARGIN: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum Se3Error {
    #[error("matrix is not a rotation: orthogonality residual {residual:.3e}, det {det:.6}")]
    NotARotation { residual: f64, det: f64 },
    #[error("matrix is not skew-symmetric: symmetry residual {residual:.3e}")]
    NotSkewSymmetric { residual: f64 },
    #[error("rotation angle {angle:.9} rad is within {margin:.1e} of pi; the axis is not unique")]
    AngleNearPi { angle: f64, margin: f64 },
    #[error("rotation error vector has norm {norm:.6} > 1; no rotation maps to it")]
    ErrorVectorTooLarge { norm: f64 },
    #[error("mean of an empty pose list")]
    EmptyMean,
    #[error("rotation mean is ambiguous: the averaged matrix is rank-deficient")]
    DegenerateMean,
}

/// A rotation matrix in SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Validates orthogonality and determinant within [`ROTATION_TOL`],
    /// re-projecting when the residual exceeds [`REPROJECT_THRESHOLD`].
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self, Se3Error> {
        let residual = orthogonality_residual(&m);
        let det = m.determinant();
        if residual > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(Se3Error::NotARotation { residual, det });
        }
        Ok(Self::wrap(m))
    }

    /// Wraps a matrix that is already a rotation up to numerical drift.
    pub(crate) fn wrap(m: Matrix3<f64>) -> Self {
        if orthogonality_residual(&m) > REPROJECT_THRESHOLD {
            Rotation(project_to_orthogonal(&m).expect("near-rotation matrix must project"))
        } else {
            Rotation(m)
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Rotation(self.0.transpose())
    }

    /// Rotation angle in `[0, pi]`.
    pub fn angle(&self) -> f64 {
        let s = rotation_error(self).norm();
        let c = (self.0.trace() - 1.0) / 2.0;
        s.atan2(c)
    }

    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.0)
    }
}

impl std::ops::Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation::wrap(self.0 * rhs.0)
    }
}

impl std::ops::Mul<Vector3<f64>> for Rotation {
    type Output = Vector3<f64>;
    fn mul(self, rhs: Vector3<f64>) -> Vector3<f64> {
        self.0 * rhs
    }
}

fn orthogonality_residual(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).norm()
}

/// Nearest orthogonal matrix with determinant +1 (polar factor via SVD).
fn project_to_orthogonal(m: &Matrix3<f64>) -> Result<Matrix3<f64>, Se3Error> {
    let svd = nalgebra::SVD::new(*m, true, true);
    let mut u = svd.u.ok_or(Se3Error::DegenerateMean)?;
    let v_t = svd.v_t.ok_or(Se3Error::DegenerateMean)?;
    let sv = svd.singular_values;
    // Singular values come out sorted descending; the projection is ambiguous
    // when the matrix has rank <= 1, or when a sign flip is needed but the two
    // smallest singular values tie.
    let scale = sv[0].max(1.0);
    let needs_flip = (u * v_t).determinant() < 0.0;
    if sv[1] <= 1e-9 * scale || (needs_flip && (sv[1] - sv[2]).abs() <= 1e-9 * scale) {
        return Err(Se3Error::DegenerateMean);
    }
    if needs_flip {
        u.column_mut(2).scale_mut(-1.0);
    }
    Ok(u * v_t)
}

/// A rigid-body pose: rotation plus position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Rotation,
    pub position: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose { rotation: Rotation::identity(), position: Vector3::zeros() }
    }

    pub fn new(rotation: Rotation, position: Vector3<f64>) -> Self {
        Pose { rotation, position }
    }

    pub fn inverse(&self) -> Self {
        let r_inv = self.rotation.inverse();
        Pose { rotation: r_inv, position: -(r_inv * self.position) }
    }

    /// Applies the pose to a point: `R q + p`.
    pub fn transform_point(&self, q: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * *q + self.position
    }

    pub fn homogeneous(&self) -> Matrix4<f64> {
        let mut h = Matrix4::identity();
        h.fixed_view_mut::<3, 3>(0, 0).copy_from(self.rotation.matrix());
        h.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.position);
        h
    }
}

impl std::ops::Mul for Pose {
    type Output = Pose;
    fn mul(self, rhs: Pose) -> Pose {
        Pose {
            rotation: self.rotation * rhs.rotation,
            position: self.rotation * rhs.position + self.position,
        }
    }
}

/// A body velocity: linear and angular components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub linear: Vector3<f64>,
    pub angular: Vector3<f64>,
}

impl Twist {
    pub fn zero() -> Self {
        Twist { linear: Vector3::zeros(), angular: Vector3::zeros() }
    }

    pub fn new(linear: Vector3<f64>, angular: Vector3<f64>) -> Self {
        Twist { linear, angular }
    }

    pub fn is_zero(&self) -> bool {
        self.linear == Vector3::zeros() && self.angular == Vector3::zeros()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Twist { linear: self.linear * s, angular: self.angular * s }
    }

    /// 4x4 matrix form: skew upper-left block, linear part in the last
    /// column, zero bottom row.
    pub fn hat4(&self) -> Matrix4<f64> {
        let mut h = Matrix4::zeros();
        h.fixed_view_mut::<3, 3>(0, 0).copy_from(&hat(&self.angular));
        h.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.linear);
        h
    }
}

/// Stacked pose error: position error over sine-axis rotation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorVector {
    pub position: Vector3<f64>,
    pub rotation: Vector3<f64>,
}

impl ErrorVector {
    pub fn zero() -> Self {
        ErrorVector { position: Vector3::zeros(), rotation: Vector3::zeros() }
    }

    pub fn new(position: Vector3<f64>, rotation: Vector3<f64>) -> Self {
        ErrorVector { position, rotation }
    }

    pub fn to_vector6(&self) -> Vector6<f64> {
        Vector6::new(
            self.position[0], self.position[1], self.position[2],
            self.rotation[0], self.rotation[1], self.rotation[2],
        )
    }

    pub fn from_vector6(v: &Vector6<f64>) -> Self {
        ErrorVector {
            position: Vector3::new(v[0], v[1], v[2]),
            rotation: Vector3::new(v[3], v[4], v[5]),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.position.norm_squared() + self.rotation.norm_squared()).sqrt()
    }
}

/// Skew-symmetric matrix of a 3-vector: `hat(v) w = v x w`.
pub fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(
        0.0, -v[2], v[1],
        v[2], 0.0, -v[0],
        -v[1], v[0], 0.0,
    )
}

/// Inverse of [`hat`]. Rejects matrices whose symmetric part is nonzero.
pub fn vee(m: &Matrix3<f64>) -> Result<Vector3<f64>, Se3Error> {
    let residual = (m + m.transpose()).norm();
    if residual >= 1e-9 {
        return Err(Se3Error::NotSkewSymmetric { residual });
    }
    Ok(Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)]))
}

/// Rotation exponential (Rodrigues formula). The argument is axis times
/// angle in radians.
pub fn exp_so3(xi_theta: &Vector3<f64>) -> Rotation {
    let t2 = xi_theta.norm_squared();
    let k = hat(xi_theta);
    let m = if t2 < 1e-12 {
        Matrix3::identity() + (1.0 - t2 / 6.0) * k + (0.5 - t2 / 24.0) * (k * k)
    } else {
        let theta = t2.sqrt();
        Matrix3::identity() + (theta.sin() / theta) * k + ((1.0 - theta.cos()) / t2) * (k * k)
    };
    Rotation::wrap(m)
}

/// Rotation logarithm: axis times angle, with angle in `[0, pi)`.
///
/// Angles within [`LOG_ANGLE_MARGIN`] of pi are rejected because the axis is
/// not unique there; callers that only need a scalar discrepancy should use
/// [`phi`], which is well-defined everywhere.
pub fn log_so3(r: &Rotation) -> Result<Vector3<f64>, Se3Error> {
    let e = rotation_error(r);
    let s = e.norm();
    let c = (r.matrix().trace() - 1.0) / 2.0;
    let theta = s.atan2(c);
    if theta > std::f64::consts::PI - LOG_ANGLE_MARGIN {
        return Err(Se3Error::AngleNearPi { angle: theta, margin: LOG_ANGLE_MARGIN });
    }
    let factor = if s > 1e-9 { theta / s } else { 1.0 + theta * theta / 6.0 };
    Ok(factor * e)
}

/// Antisymmetric part `(R - R^T)/2`.
pub fn skew_part(r: &Rotation) -> Matrix3<f64> {
    (r.matrix() - r.matrix().transpose()) / 2.0
}

/// Symmetric part `(M + M^T)/2`.
pub fn sym_part(m: &Matrix3<f64>) -> Matrix3<f64> {
    (m + m.transpose()) / 2.0
}

/// Minimum eigenvalue of the symmetric part of a 3x3 matrix.
pub fn min_symmetric_eigenvalue(m: &Matrix3<f64>) -> f64 {
    let eig = nalgebra::SymmetricEigen::new(sym_part(m));
    eig.eigenvalues.min()
}

/// Sine-axis rotation error: the vee of the skew part, `sin(theta) * axis`.
pub fn rotation_error(r: &Rotation) -> Vector3<f64> {
    let s = skew_part(r);
    Vector3::new(s[(2, 1)], s[(0, 2)], s[(1, 0)])
}

/// Stacked pose error: position over [`rotation_error`].
pub fn pose_error(g: &Pose) -> ErrorVector {
    ErrorVector { position: g.position, rotation: rotation_error(&g.rotation) }
}

/// Inverse of [`pose_error`] on the small-angle branch (`theta <= pi/2`).
pub fn pose_from_error(e: &ErrorVector) -> Result<Pose, Se3Error> {
    let s = e.rotation.norm();
    if s > 1.0 + 1e-12 {
        return Err(Se3Error::ErrorVectorTooLarge { norm: s });
    }
    let rotation = if s <= 1e-12 {
        exp_so3(&e.rotation)
    } else {
        let theta = s.min(1.0).asin();
        exp_so3(&(e.rotation * (theta / s)))
    };
    Ok(Pose { rotation, position: e.position })
}

/// Rotation error functional `1/2 ||I - R||_F^2 = tr(I - R) = 2(1 - cos theta)`.
pub fn phi(r: &Rotation) -> f64 {
    phi_matrix(r.matrix())
}

pub(crate) fn phi_matrix(m: &Matrix3<f64>) -> f64 {
    0.5 * (Matrix3::identity() - m).norm_squared()
}

/// Pose error functional `1/2 ||I - g||_F^2 = 1/2 ||p||^2 + phi(R)`.
pub fn psi(g: &Pose) -> f64 {
    0.5 * g.position.norm_squared() + phi(&g.rotation)
}

/// SE(3) exponential of a twist.
pub fn exp_se3(xi: &Twist) -> Pose {
    let w = xi.angular;
    let t2 = w.norm_squared();
    let k = hat(&w);
    let v_mat = if t2 < 1e-12 {
        Matrix3::identity() + (0.5 - t2 / 24.0) * k + (1.0 / 6.0 - t2 / 120.0) * (k * k)
    } else {
        let theta = t2.sqrt();
        Matrix3::identity()
            + ((1.0 - theta.cos()) / t2) * k
            + ((theta - theta.sin()) / (t2 * theta)) * (k * k)
    };
    Pose { rotation: exp_so3(&w), position: v_mat * xi.linear }
}

/// Frobenius mean on SE(3): the minimizer of `sum_j psi(g^-1 g_j)`.
///
/// The cost splits into the arithmetic mean of the positions and the chordal
/// mean of the rotations; the latter is the polar projection of the averaged
/// rotation matrix onto SO(3) with the determinant forced to +1.
pub fn mean_pose(poses: &[Pose]) -> Result<Pose, Se3Error> {
    match poses {
        [] => Err(Se3Error::EmptyMean),
        [g] => Ok(*g),
        _ => {
            let n = poses.len() as f64;
            let p = poses.iter().map(|g| g.position).sum::<Vector3<f64>>() / n;
            let m = poses.iter().map(|g| *g.rotation.matrix()).sum::<Matrix3<f64>>() / n;
            let r = project_to_orthogonal(&m)?;
            Ok(Pose { rotation: Rotation(r), position: p })
        }
    }
}

/// Checks the rotation-triple inequality
/// `1/2 tr(R1^T R2 - R1^T R3 R2^T R3) >= phi(R1^T R3) - phi(R1^T R2)
///  + lambda_min(sym(R1^T R3)) phi(R3^T R2)`.
///
/// Returns whether it holds within a `1e-9` slack tolerance, and the slack
/// (left side minus right side).
pub fn verify_sym_inequality(r1: &Rotation, r2: &Rotation, r3: &Rotation) -> (bool, f64) {
    let a = r1.matrix().transpose() * r2.matrix(); // R1^T R2
    let b = r1.matrix().transpose() * r3.matrix(); // R1^T R3
    let c = r3.matrix().transpose() * r2.matrix(); // R3^T R2
    let lhs = 0.5 * (a.trace() - (b * c.transpose()).trace());
    let rhs = phi_matrix(&b) - phi_matrix(&a) + min_symmetric_eigenvalue(&b) * phi_matrix(&c);
    let slack = lhs - rhs;
    (slack >= -1e-9, slack)
}
