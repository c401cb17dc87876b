//! Recursive attitude initializer built on constructed vector observations.
//!
//! The body attitude `A(q_i^b)` is factored as `A(q_b0^b) A(q_i^b0)`. The first
//! factor is integrated from raw gyro output starting at the identity. Each
//! body-frame measurement `b_k` is rotated back into the frozen start-up frame,
//! `b̄_k = A(q_b0^b)ᵀ b_k`, where it satisfies `b̄_k = A(q_i^b0) r_k` for a
//! *constant* unknown. Every epoch contributes the Gram matrix of
//! `L(b̄_k) − R(r_k)` to a 4×4 Davenport matrix `K`; the constant attitude is the
//! eigenvector of `K` for its smallest eigenvalue.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::eigen::eigh4;
use crate::error::{Error, Result};
use crate::quaternion::{propagate, skew, AngularRate, RotationMatrix, UnitQuaternion};

const UNIT_TOLERANCE: f64 = 1e-9;

/// Relative gap between the two smallest eigenvalues below which the
/// solution is declared non-unique.
pub const DEGENERATE_GAP: f64 = 1e-9;

fn is_unit(v: &Vector3<f64>) -> bool {
    v.iter().all(|c| c.is_finite()) && (v.norm() - 1.0).abs() <= UNIT_TOLERANCE
}

/// One measured direction: `body` in body coordinates, `reference` in inertial
/// coordinates, sampled at time `t` (s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorObservationPair {
    pub body: Vector3<f64>,
    pub reference: Vector3<f64>,
    pub t: f64,
}

impl VectorObservationPair {
    pub fn new(body: Vector3<f64>, reference: Vector3<f64>, t: f64) -> Result<Self> {
        if !is_unit(&body) || !is_unit(&reference) {
            return Err(Error::InvalidInput("observation vectors must be unit length"));
        }
        Ok(Self { body, reference, t })
    }
}

/// A measurement expressed in the start-up frame `b0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstructedObservation {
    pub b0: Vector3<f64>,
    pub reference: Vector3<f64>,
}

/// Rotates a body-frame observation into the start-up frame using the
/// integrated body attitude change `q_b0_b`.
pub fn construct_observation(
    q_b0_b: &UnitQuaternion,
    obs: &VectorObservationPair,
) -> Result<ConstructedObservation> {
    if !is_unit(&obs.body) || !is_unit(&obs.reference) {
        return Err(Error::InvalidInput("observation vectors must be unit length"));
    }
    let b0 = q_b0_b.to_rotation_matrix().apply_transpose(&obs.body);
    Ok(ConstructedObservation { b0, reference: obs.reference })
}

/// Left multiplication by the pure quaternion `b̄` and right multiplication by
/// the pure quaternion `r`, both acting on scalar-last quaternions.
///
/// Laid out so that `‖(b_plus − r_minus) q‖ = ‖b̄ − A(q) r‖` for every unit `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuatObservationMatrices {
    pub b_plus: Matrix4<f64>,
    pub r_minus: Matrix4<f64>,
}

impl QuatObservationMatrices {
    pub fn build(c: &ConstructedObservation) -> Self {
        Self { b_plus: pure_left(&c.b0), r_minus: pure_right(&c.reference) }
    }

    pub fn difference(&self) -> Matrix4<f64> {
        self.b_plus - self.r_minus
    }
}

// [b; 0] ⊗ q
fn pure_left(b: &Vector3<f64>) -> Matrix4<f64> {
    block(&(-skew(b)), b)
}

// q ⊗ [r; 0]
fn pure_right(r: &Vector3<f64>) -> Matrix4<f64> {
    block(&skew(r), r)
}

fn block(upper_left: &Matrix3<f64>, v: &Vector3<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(upper_left);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(v);
    m.fixed_view_mut::<1, 3>(3, 0).copy_from(&(-v.transpose()));
    m
}

/// Running Davenport matrix `K_k = Σ Δt (b̄⁺ − r⁻)ᵀ (b̄⁺ − r⁻)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DavenportAccumulator {
    k: Matrix4<f64>,
    n_obs: usize,
    t_last: Option<f64>,
}

impl Default for DavenportAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

/// Smallest-eigenvalue solution of the accumulated problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantAttitudeSolution {
    pub q_i_b0: UnitQuaternion,
    pub eigenvalues: Vector4<f64>,
}

impl DavenportAccumulator {
    pub fn new() -> Self {
        Self { k: Matrix4::zeros(), n_obs: 0, t_last: None }
    }

    pub fn k(&self) -> &Matrix4<f64> {
        &self.k
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn t_last(&self) -> Option<f64> {
        self.t_last
    }

    pub fn accumulate(&mut self, m: &QuatObservationMatrices, dt: f64) -> Result<()> {
        if dt <= 0.0 || !dt.is_finite() {
            return Err(Error::InvalidInput("time step must be positive"));
        }
        let d = m.difference();
        self.k += d.tr_mul(&d) * dt;
        self.k = (self.k + self.k.transpose()) * 0.5;
        self.n_obs += 1;
        Ok(())
    }

    /// `qᵀ K q`, which equals the Δt-weighted Wahba loss (twice the usual ½-scaled cost).
    pub fn cost(&self, q: &UnitQuaternion) -> f64 {
        let v = q.as_vector4();
        v.dot(&(self.k * v))
    }

    /// Eigenvector of `K` for its smallest eigenvalue, with non-negative scalar part.
    pub fn solve(&self) -> Result<ConstantAttitudeSolution> {
        if self.n_obs < 2 {
            return Err(Error::InsufficientObservations(self.n_obs));
        }
        let eig = eigh4(&self.k)?;
        let span = eig.values[3].abs().max(f64::MIN_POSITIVE);
        let gap = (eig.values[1] - eig.values[0]) / span;
        if gap < DEGENERATE_GAP {
            return Err(Error::DegenerateGeometry(gap));
        }
        let mut v = eig.vectors.column(0).into_owned();
        let flip = if v[3].abs() >= 1e-12 {
            v[3] < 0.0
        } else {
            let imax = v.iamax();
            v[imax] < 0.0
        };
        if flip {
            v = -v;
        }
        Ok(ConstantAttitudeSolution { q_i_b0: UnitQuaternion::from_vector(&v)?, eigenvalues: eig.values })
    }

    pub fn solve_constant_attitude(&self) -> Result<UnitQuaternion> {
        self.solve().map(|s| s.q_i_b0)
    }
}

/// State of the recursive initializer.
#[derive(Debug, Clone, PartialEq)]
pub struct Initializer {
    q_b0_b: UnitQuaternion,
    accumulator: DavenportAccumulator,
    q_i_b0: Option<UnitQuaternion>,
    step: u64,
    solve_every: u32,
}

impl Default for Initializer {
    fn default() -> Self {
        Self::new()
    }
}

impl Initializer {
    pub fn new() -> Self {
        Self {
            q_b0_b: UnitQuaternion::identity(),
            accumulator: DavenportAccumulator::new(),
            q_i_b0: None,
            step: 0,
            solve_every: 1,
        }
    }

    /// Re-solves the eigenproblem only every `n` steps (and whenever no
    /// solution exists yet). `n = 0` is treated as 1.
    pub fn with_solve_interval(mut self, n: u32) -> Self {
        self.solve_every = n.max(1);
        self
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    /// Body attitude relative to the frozen start-up frame.
    pub fn relative_attitude(&self) -> &UnitQuaternion {
        &self.q_b0_b
    }

    /// Latest constant attitude of `b0` relative to inertial space.
    pub fn constant_attitude(&self) -> Option<&UnitQuaternion> {
        self.q_i_b0.as_ref()
    }

    pub fn accumulator(&self) -> &DavenportAccumulator {
        &self.accumulator
    }

    /// Integrates the raw gyro output over one interval. No bias is removed:
    /// the initializer has no bias estimate.
    pub fn step_propagate(&mut self, gyro: &AngularRate, dt: f64) -> Result<()> {
        self.q_b0_b = propagate(&self.q_b0_b, gyro, dt)?;
        self.step += 1;
        Ok(())
    }

    /// Folds one observation taken at the current step into `K` and, on the
    /// solve cadence, refreshes the constant attitude. Until the geometry is
    /// unique the previous solution (if any) is kept.
    pub fn observe(&mut self, obs: &VectorObservationPair, dt: f64) -> Result<()> {
        let constructed = construct_observation(&self.q_b0_b, obs)?;
        let m = QuatObservationMatrices::build(&constructed);
        self.accumulator.accumulate(&m, dt)?;
        self.accumulator.t_last = Some(obs.t);
        if self.q_i_b0.is_none() || self.step.is_multiple_of(u64::from(self.solve_every)) {
            match self.accumulator.solve_constant_attitude() {
                Ok(q) => self.q_i_b0 = Some(q),
                Err(Error::InsufficientObservations(_) | Error::DegenerateGeometry(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    /// One full recursion: propagate with the gyro sample, then absorb `obs`.
    pub fn step(&mut self, gyro: &AngularRate, obs: &VectorObservationPair, dt: f64) -> Result<()> {
        self.step_propagate(gyro, dt)?;
        self.observe(obs, dt)
    }

    /// `q_b0_b ⊗ q_i_b0`, the current body attitude.
    pub fn current_quaternion(&self) -> Result<UnitQuaternion> {
        let q_i_b0 = self.q_i_b0.ok_or(Error::NotReady)?;
        Ok(self.q_b0_b.compose(&q_i_b0))
    }

    /// `A(q_b0_b) A(q_i_b0)`.
    pub fn current_attitude(&self) -> Result<RotationMatrix> {
        let q_i_b0 = self.q_i_b0.ok_or(Error::NotReady)?;
        Ok(self.q_b0_b.to_rotation_matrix().mul(&q_i_b0.to_rotation_matrix()))
    }
}
