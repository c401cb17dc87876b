//! In-motion attitude initialization from single star sightings and gyro data.
//!
//! The attitude of the body relative to inertial space is split into two
//! factors: the attitude change of the body since start-up, integrated from
//! gyro output with an exactly known identity initial value, and the constant
//! attitude of the frozen start-up body frame (`b0`) relative to inertial
//! space. Single vector observations taken at different times are rotated
//! into `b0` and jointly solved with Davenport's q-method, which yields a
//! memoryful attitude solution that can seed a multiplicative EKF.
//!
//! The crate is `no_std` (it needs `alloc` for the scenario streams); all
//! transcendental functions go through `libm`, so the platform math library
//! never enters the results.
//!
//! Quaternions are stored scalar-last, `[x, y, z, w]`, and compose so that
//! `A(p ⊗ q) = A(p) A(q)`, with `A(q)` mapping reference-frame coordinates
//! into body-frame coordinates.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod davenport;
pub mod eigen;
mod error;
pub mod mekf;
pub mod quaternion;
pub mod sim;

pub use davenport::{
    ConstructedObservation, DavenportAccumulator, Initializer, QuatObservationMatrices,
    VectorObservationPair,
};
pub use error::{Error, Result};
pub use mekf::{MekfConfig, MekfState};
pub use quaternion::{attitude_error_deg, AngularRate, PropagationStep, RotationMatrix, UnitQuaternion};
pub use sim::{Epoch, Method, ScenarioConfig};

/// Degrees per hour expressed in radians per second.
pub const DEG_PER_HOUR: f64 = core::f64::consts::PI / (180.0 * 3600.0);
