//! Six-state multiplicative extended Kalman filter: small-angle attitude
//! error plus additive gyro bias, with the quaternion kept as global state.

use nalgebra::{Matrix3, Matrix3x6, Matrix6, Matrix6x3, Vector3, Vector6};

use crate::davenport::VectorObservationPair;
use crate::error::{Error, Result};
use crate::quaternion::{propagate, skew, AngularRate, UnitQuaternion};

/// Innovation covariances worse conditioned than this are rejected.
pub const MAX_INNOVATION_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MekfConfig {
    /// Gyro white-noise density σ_v, rad/s/√Hz.
    pub gyro_noise: f64,
    /// Bias random-walk density σ_u, rad/s²/√Hz.
    pub bias_walk: f64,
    /// Per-axis variance of the unit-vector measurement, rad².
    pub measurement_variance: f64,
    /// Filter step, s.
    pub dt: f64,
}

impl MekfConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(self.gyro_noise) || !ok(self.bias_walk) || !ok(self.measurement_variance) {
            return Err(Error::InvalidInput("noise parameters must be finite and non-negative"));
        }
        if self.dt <= 0.0 || !self.dt.is_finite() {
            return Err(Error::InvalidInput("time step must be positive"));
        }
        Ok(())
    }

    /// Discrete process noise of the error state over one step.
    pub fn process_noise(&self) -> Matrix6<f64> {
        let dt = self.dt;
        let sv2 = self.gyro_noise * self.gyro_noise;
        let su2 = self.bias_walk * self.bias_walk;
        let i3 = Matrix3::<f64>::identity();
        let mut q = Matrix6::zeros();
        q.fixed_view_mut::<3, 3>(0, 0).copy_from(&(i3 * (sv2 * dt + su2 * dt * dt * dt / 3.0)));
        q.fixed_view_mut::<3, 3>(0, 3).copy_from(&(i3 * (-0.5 * su2 * dt * dt)));
        q.fixed_view_mut::<3, 3>(3, 0).copy_from(&(i3 * (-0.5 * su2 * dt * dt)));
        q.fixed_view_mut::<3, 3>(3, 3).copy_from(&(i3 * (su2 * dt)));
        q
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MekfState {
    pub q: UnitQuaternion,
    /// Gyro-bias estimate, rad/s.
    pub bias: Vector3<f64>,
    /// Error covariance ordered `[attitude (rad²), bias ((rad/s)²)]`.
    pub p: Matrix6<f64>,
    pub t: f64,
}

fn symmetrize(p: &Matrix6<f64>) -> Matrix6<f64> {
    (p + p.transpose()) * 0.5
}

impl MekfState {
    pub fn new(q: UnitQuaternion, bias: Vector3<f64>, p: Matrix6<f64>, t: f64) -> Self {
        Self { q, bias, p: symmetrize(&p), t }
    }

    /// Filter seeded from an initializer solution: zero bias estimate and
    /// `P = blockdiag(att_std² I, bias_std² I)`.
    pub fn handoff_from_initializer(q_init: UnitQuaternion, att_std_deg: f64, bias_std: f64) -> Self {
        let att = att_std_deg.to_radians();
        let mut p = Matrix6::zeros();
        for i in 0..3 {
            p[(i, i)] = att * att;
            p[(i + 3, i + 3)] = bias_std * bias_std;
        }
        Self { q: q_init, bias: Vector3::zeros(), p, t: 0.0 }
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn attitude_std_rad(&self) -> Vector3<f64> {
        Vector3::new(self.p[(0, 0)], self.p[(1, 1)], self.p[(2, 2)]).map(libm::sqrt)
    }

    pub fn bias_std(&self) -> Vector3<f64> {
        Vector3::new(self.p[(3, 3)], self.p[(4, 4)], self.p[(5, 5)]).map(libm::sqrt)
    }

    /// Time update with one gyro sample.
    pub fn propagate(&mut self, gyro: &AngularRate, cfg: &MekfConfig) -> Result<()> {
        let w = gyro.0 - self.bias;
        self.q = propagate(&self.q, &AngularRate(w), cfg.dt)?;

        let dt = cfg.dt;
        let mut f = Matrix6::zeros();
        f.fixed_view_mut::<3, 3>(0, 0).copy_from(&(-skew(&w)));
        f.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-Matrix3::<f64>::identity()));
        let phi = Matrix6::identity() + f * dt + f * f * (0.5 * dt * dt);
        self.p = symmetrize(&(phi * self.p * phi.transpose() + cfg.process_noise()));
        self.t += dt;
        Ok(())
    }

    /// Measurement update with one unit-vector observation.
    pub fn update(&mut self, obs: &VectorObservationPair, cfg: &MekfConfig) -> Result<()> {
        let predicted = self.q.to_rotation_matrix().apply(&obs.reference);
        let residual = obs.body - predicted;
        let mut h = Matrix3x6::zeros();
        h.fixed_view_mut::<3, 3>(0, 0).copy_from(&skew(&predicted));

        let r = Matrix3::identity() * cfg.measurement_variance;
        let s = h * self.p * h.transpose() + r;
        let s = (s + s.transpose()) * 0.5;
        let sv = s.symmetric_eigenvalues();
        let (lo, hi) = (sv.min(), sv.max());
        let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if cond.is_nan() || cond > MAX_INNOVATION_CONDITION {
            return Err(Error::SingularUpdate(cond));
        }
        let s_inv = s.try_inverse().ok_or(Error::SingularUpdate(cond))?;
        let gain: Matrix6x3<f64> = self.p * h.transpose() * s_inv;
        let dx: Vector6<f64> = gain * residual;

        let da = dx.fixed_rows::<3>(0).into_owned();
        let dq = UnitQuaternion::normalize(0.5 * da.x, 0.5 * da.y, 0.5 * da.z, 1.0)?;
        self.q = dq.compose(&self.q);
        self.bias += dx.fixed_rows::<3>(3);

        let ikh = Matrix6::identity() - gain * h;
        self.p = symmetrize(&(ikh * self.p * ikh.transpose() + gain * r * gain.transpose()));
        Ok(())
    }
}
