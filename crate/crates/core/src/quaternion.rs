//! Scalar-last attitude quaternions, direction cosine matrices and the exact
//! discrete-time kinematics used by every estimator in the crate.

use core::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};

/// Tolerance on `|‖q‖ − 1|` accepted when building a quaternion from raw parts.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Below this rate magnitude (rad/s) the propagation uses the small-angle limit.
pub const ZERO_RATE_THRESHOLD: f64 = 1e-12;

/// Skew-symmetric cross-product matrix, `skew(a) * b == a × b`.
pub fn skew(a: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Unit attitude quaternion stored as `[x, y, z, w]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "[f64; 4]", into = "[f64; 4]"))]
pub struct UnitQuaternion {
    x: f64,
    y: f64,
    z: f64,
    w: f64,
}

impl UnitQuaternion {
    pub const fn identity() -> Self {
        Self { x: 0.0, y: 0.0, z: 0.0, w: 1.0 }
    }

    /// Builds a quaternion from components that are already (nearly) unit
    /// norm, renormalizing the residual.
    pub fn try_new(x: f64, y: f64, z: f64, w: f64) -> Result<Self> {
        let n = libm::sqrt(x * x + y * y + z * z + w * w);
        if !n.is_finite() {
            return Err(Error::InvalidInput("quaternion has non-finite components"));
        }
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidInput("quaternion norm deviates from 1"));
        }
        Ok(Self { x: x / n, y: y / n, z: z / n, w: w / n })
    }

    /// Normalizes an arbitrary non-zero 4-vector.
    pub fn normalize(x: f64, y: f64, z: f64, w: f64) -> Result<Self> {
        let n = libm::sqrt(x * x + y * y + z * z + w * w);
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::InvalidInput("cannot normalize a zero or non-finite quaternion"));
        }
        Ok(Self { x: x / n, y: y / n, z: z / n, w: w / n })
    }

    pub fn from_vector(v: &Vector4<f64>) -> Result<Self> {
        Self::normalize(v[0], v[1], v[2], v[3])
    }

    /// Frame rotation by `angle` radians about `axis` (need not be unit).
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Result<Self> {
        let n = axis.norm();
        if !n.is_finite() || n == 0.0 || !angle.is_finite() {
            return Err(Error::InvalidInput("axis must be finite and non-zero"));
        }
        let s = libm::sin(0.5 * angle) / n;
        Self::normalize(axis.x * s, axis.y * s, axis.z * s, libm::cos(0.5 * angle))
    }

    /// Quaternion of the rotation vector `phi` (axis times angle, radians).
    pub fn from_rotation_vector(phi: &Vector3<f64>) -> Self {
        let angle = phi.norm();
        if angle < ZERO_RATE_THRESHOLD {
            let h = 0.5 * phi;
            // second-order accurate; renormalized below
            return Self::normalize(h.x, h.y, h.z, 1.0).unwrap_or_else(|_| Self::identity());
        }
        let s = libm::sin(0.5 * angle) / angle;
        Self::normalize(phi.x * s, phi.y * s, phi.z * s, libm::cos(0.5 * angle))
            .unwrap_or_else(|_| Self::identity())
    }

    /// Successive 3-2-1 frame rotations: `yaw` about z, then `pitch` about the
    /// new y, then `roll` about the new x (radians).
    pub fn from_euler_321(roll: f64, pitch: f64, yaw: f64) -> Self {
        let qx = Self::from_rotation_vector(&Vector3::new(roll, 0.0, 0.0));
        let qy = Self::from_rotation_vector(&Vector3::new(0.0, pitch, 0.0));
        let qz = Self::from_rotation_vector(&Vector3::new(0.0, 0.0, yaw));
        qx.compose(&qy).compose(&qz)
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }
    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn scalar(&self) -> f64 {
        self.w
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub fn as_vector4(&self) -> Vector4<f64> {
        Vector4::new(self.x, self.y, self.z, self.w)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.x * self.x + self.y * self.y + self.z * self.z + self.w * self.w)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z + self.w * other.w
    }

    pub fn conjugate(&self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z, w: self.w }
    }

    pub fn negated(&self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z, w: -self.w }
    }

    /// `self ⊗ other`, the attitude of applying `other` first and `self`
    /// second: `A(self ⊗ other) = A(self) A(other)`.
    pub fn compose(&self, other: &Self) -> Self {
        let pv = self.vector();
        let qv = other.vector();
        let v = self.w * qv + other.w * pv - pv.cross(&qv);
        let w = self.w * other.w - pv.dot(&qv);
        Self::normalize(v.x, v.y, v.z, w).unwrap_or_else(|_| Self::identity())
    }

    /// Direction cosine matrix mapping reference-frame coordinates into
    /// body-frame coordinates.
    pub fn to_rotation_matrix(&self) -> RotationMatrix {
        let v = self.vector();
        let w = self.w;
        let m = Matrix3::identity() * (w * w - v.norm_squared()) + 2.0 * v * v.transpose()
            - 2.0 * w * skew(&v);
        RotationMatrix(m)
    }

    /// Rotation angle in radians, in `[0, π]`.
    pub fn angle(&self) -> f64 {
        2.0 * libm::atan2(self.vector().norm(), self.w.abs())
    }

    /// Representative with non-negative scalar part.
    pub fn canonical(&self) -> Self {
        if self.w < 0.0 {
            self.negated()
        } else {
            *self
        }
    }

    /// The same rotation, `q` and `-q` being identified.
    pub fn same_rotation(&self, other: &Self, tol: f64) -> bool {
        (1.0 - self.dot(other).abs()).abs() <= tol
    }
}

impl Default for UnitQuaternion {
    fn default() -> Self {
        Self::identity()
    }
}

impl From<UnitQuaternion> for [f64; 4] {
    fn from(q: UnitQuaternion) -> Self {
        q.as_array()
    }
}

impl TryFrom<[f64; 4]> for UnitQuaternion {
    type Error = Error;
    fn try_from(a: [f64; 4]) -> Result<Self> {
        Self::try_new(a[0], a[1], a[2], a[3])
    }
}

/// 3×3 direction cosine matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    /// `Aᵀ v`, the inverse mapping.
    pub fn apply_transpose(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0.tr_mul(v)
    }

    /// Largest element of `|M Mᵀ − I|`.
    pub fn orthogonality_error(&self) -> f64 {
        (self.0 * self.0.transpose() - Matrix3::identity()).abs().max()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Rotation angle from the trace, degrees.
    pub fn angle_deg(&self) -> f64 {
        let c = ((self.0.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
        libm::acos(c) * 180.0 / PI
    }
}

/// Body angular rate relative to inertial space, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularRate(pub Vector3<f64>);

impl AngularRate {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    pub fn zero() -> Self {
        Self(Vector3::zeros())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

/// One step of the discrete quaternion transition `q_k = Ω(ω) q_{k-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationStep {
    omega: Matrix4<f64>,
    dt: f64,
}

impl PropagationStep {
    /// Builds `Ω(ω)` for a rate held constant over `dt` seconds.
    pub fn new(rate: &AngularRate, dt: f64) -> Result<Self> {
        if !rate.is_finite() {
            return Err(Error::InvalidInput("angular rate must be finite"));
        }
        if dt <= 0.0 || !dt.is_finite() {
            return Err(Error::InvalidInput("time step must be positive"));
        }
        let w = rate.0;
        let n = w.norm();
        let (c, psi) = if n < ZERO_RATE_THRESHOLD {
            (1.0, 0.5 * dt * w)
        } else {
            let half = 0.5 * n * dt;
            (libm::cos(half), (libm::sin(half) / n) * w)
        };
        let z = Matrix3::identity() * c - skew(&psi);
        let mut omega = Matrix4::zeros();
        omega.fixed_view_mut::<3, 3>(0, 0).copy_from(&z);
        omega.fixed_view_mut::<3, 1>(0, 3).copy_from(&psi);
        omega.fixed_view_mut::<1, 3>(3, 0).copy_from(&(-psi.transpose()));
        omega[(3, 3)] = c;
        Ok(Self { omega, dt })
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.omega
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn apply(&self, q: &UnitQuaternion) -> UnitQuaternion {
        let v = self.omega * q.as_vector4();
        UnitQuaternion::from_vector(&v).unwrap_or(*q)
    }
}

/// Advances `q` by one gyro interval of `dt` seconds at constant `rate`.
pub fn propagate(q: &UnitQuaternion, rate: &AngularRate, dt: f64) -> Result<UnitQuaternion> {
    Ok(PropagationStep::new(rate, dt)?.apply(q))
}

/// Angle in degrees of the error rotation `A(q_est) A(q_true)ᵀ`, in `[0, 180]`.
pub fn attitude_error_deg(q_est: &UnitQuaternion, q_true: &UnitQuaternion) -> f64 {
    q_est.compose(&q_true.conjugate()).angle() * 180.0 / PI
}
