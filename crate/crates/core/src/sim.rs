//! Seeded synthetic scenarios: truth attitude, gyro output with constant
//! bias, one star direction per epoch, and the three estimation pipelines
//! that are compared on them.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use nalgebra::{Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::davenport::{Initializer, VectorObservationPair};
use crate::error::{Error, Result};
use crate::mekf::{MekfConfig, MekfState};
use crate::quaternion::{attitude_error_deg, AngularRate, UnitQuaternion};
use crate::DEG_PER_HOUR;

/// Deterministic body-rate profile of the truth trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields))]
pub enum RateProfile {
    /// Pitch at one revolution per `orbit_period_s` plus a roll/yaw wobble
    /// `amplitude · [sin, ·, cos](2πt / wobble_period_s)`.
    Orbit { wobble_amplitude_degps: f64, wobble_period_s: f64, orbit_period_s: f64 },
    /// Constant body rate, rad/s.
    Constant { rate: [f64; 3] },
}

impl Default for RateProfile {
    fn default() -> Self {
        RateProfile::Orbit { wobble_amplitude_degps: 0.05, wobble_period_s: 600.0, orbit_period_s: 5400.0 }
    }
}

impl RateProfile {
    pub fn rate(&self, t: f64) -> Vector3<f64> {
        match *self {
            RateProfile::Orbit { wobble_amplitude_degps, wobble_period_s, orbit_period_s } => {
                let a = wobble_amplitude_degps.to_radians();
                let phase = 2.0 * PI * t / wobble_period_s;
                Vector3::new(a * libm::sin(phase), 2.0 * PI / orbit_period_s, a * libm::cos(phase))
            }
            RateProfile::Constant { rate } => Vector3::from(rate),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            RateProfile::Orbit { wobble_amplitude_degps, wobble_period_s, orbit_period_s } => {
                if !wobble_amplitude_degps.is_finite()
                    || !(wobble_period_s > 0.0 && wobble_period_s.is_finite())
                    || !(orbit_period_s > 0.0 && orbit_period_s.is_finite())
                {
                    return Err(Error::InvalidInput("trajectory: periods must be positive and finite"));
                }
            }
            RateProfile::Constant { rate } => {
                if rate.iter().any(|r| !r.is_finite()) {
                    return Err(Error::InvalidInput("trajectory.rate must be finite"));
                }
            }
        }
        Ok(())
    }
}

/// Every truth, sensor and filter parameter of one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ScenarioConfig {
    pub duration_s: f64,
    pub dt_s: f64,
    pub trajectory: RateProfile,
    /// Constant per-axis gyro bias, deg/h.
    pub bias_degph: [f64; 3],
    /// Gyro white-noise density σ_v, rad/s/√Hz.
    pub gyro_noise: f64,
    /// Bias random-walk density assumed by the MEKF, rad/s²/√Hz.
    pub bias_walk: f64,
    /// Per-axis star measurement noise, rad.
    pub star_noise_rad: f64,
    /// Length of the analytical initialization window before handoff, s.
    pub init_phase_s: f64,
    /// 3-2-1 Euler perturbation `[roll, pitch, yaw]` of the standalone MEKF's
    /// initial estimate, deg.
    pub init_att_err_deg: [f64; 3],
    /// Attitude std given to the MEKF at handoff, deg.
    pub handoff_att_std_deg: f64,
    /// Attitude std of the standalone MEKF's initial covariance, deg.
    pub mekf_att_std_deg: f64,
    /// Initial bias std of both MEKF variants, deg/h.
    pub bias_std_degph: f64,
    pub mc_runs: usize,
    pub seed: u64,
    /// Eigen-solve cadence of the initializer, in steps.
    pub solve_every: u32,
    /// Truth integration substeps per `dt_s`.
    pub truth_substeps: u32,
    /// Draw a uniformly random initial attitude per run (identity otherwise).
    pub random_initial_attitude: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            duration_s: 5400.0,
            dt_s: 1.0,
            trajectory: RateProfile::default(),
            bias_degph: [0.1; 3],
            gyro_noise: 3.16e-7,
            bias_walk: 1e-10,
            star_noise_rad: 2.909e-5,
            init_phase_s: 300.0,
            init_att_err_deg: [10.0, 10.0, 30.0],
            handoff_att_std_deg: 0.1,
            mekf_att_std_deg: 10.0,
            bias_std_degph: 0.1,
            mc_runs: 50,
            seed: 0,
            solve_every: 1,
            truth_substeps: 10,
            random_initial_attitude: true,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !(self.dt_s > 0.0 && self.dt_s.is_finite()) {
            return Err(Error::InvalidInput("dt_s must be positive"));
        }
        if !(self.init_phase_s > 0.0 && self.init_phase_s.is_finite()) {
            return Err(Error::InvalidInput("init_phase_s must be positive"));
        }
        if !(self.duration_s >= self.init_phase_s && self.duration_s.is_finite()) {
            return Err(Error::InvalidInput("duration_s must be at least init_phase_s"));
        }
        if self.init_phase_s < self.dt_s {
            return Err(Error::InvalidInput("init_phase_s must cover at least one dt_s"));
        }
        if self.mc_runs < 1 {
            return Err(Error::InvalidInput("mc_runs must be at least 1"));
        }
        if self.truth_substeps < 1 {
            return Err(Error::InvalidInput("truth_substeps must be at least 1"));
        }
        if self.bias_degph.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInput("bias_degph must be finite"));
        }
        if self.init_att_err_deg.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInput("init_att_err_deg must be finite"));
        }
        for (v, msg) in [
            (self.gyro_noise, "gyro_noise must be non-negative"),
            (self.bias_walk, "bias_walk must be non-negative"),
            (self.star_noise_rad, "star_noise_rad must be non-negative"),
            (self.handoff_att_std_deg, "handoff_att_std_deg must be non-negative"),
            (self.mekf_att_std_deg, "mekf_att_std_deg must be non-negative"),
            (self.bias_std_degph, "bias_std_degph must be non-negative"),
        ] {
            if !finite_nonneg(v) {
                return Err(Error::InvalidInput(msg));
            }
        }
        self.trajectory.validate()
    }

    /// Number of gyro/observation epochs after `t = 0`.
    pub fn epochs(&self) -> usize {
        libm::round(self.duration_s / self.dt_s) as usize
    }

    /// Epoch index at which the initializer hands off to the MEKF.
    pub fn handoff_epoch(&self) -> usize {
        libm::round(self.init_phase_s / self.dt_s) as usize
    }

    pub fn bias_rad_s(&self) -> Vector3<f64> {
        Vector3::from(self.bias_degph) * DEG_PER_HOUR
    }

    pub fn mekf_config(&self) -> MekfConfig {
        MekfConfig {
            gyro_noise: self.gyro_noise,
            bias_walk: self.bias_walk,
            measurement_variance: self.star_noise_rad * self.star_noise_rad,
            dt: self.dt_s,
        }
    }

    /// Seed of Monte Carlo run `run`.
    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed.wrapping_add(run as u64)
    }
}

/// Estimation pipeline compared in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Method {
    /// Analytical initializer for the whole run.
    Optimal,
    /// Analytical initializer for `init_phase_s`, MEKF afterwards.
    OptimalPlusMekf,
    /// MEKF from a perturbed initial estimate.
    MekfOnly,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Optimal, Method::OptimalPlusMekf, Method::MekfOnly];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Optimal => "Optimal",
            Method::OptimalPlusMekf => "OptimalPlusMekf",
            Method::MekfOnly => "MekfOnly",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['+', '_', '-'], "").as_str() {
            "optimal" => Ok(Method::Optimal),
            "optimalplusmekf" | "optimalmekf" => Ok(Method::OptimalPlusMekf),
            "mekfonly" | "mekf" => Ok(Method::MekfOnly),
            _ => Err(Error::InvalidInput("unknown method (expected Optimal, OptimalPlusMekf or MekfOnly)")),
        }
    }
}

/// Truth attitude at `t` together with the constant rate that carries it to
/// the next sample exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthSample {
    pub t: f64,
    pub q: UnitQuaternion,
    pub interval_rate: AngularRate,
}

/// Sensor data for one epoch: the gyro sample over `(t − Δt, t]` and one star.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epoch {
    pub t: f64,
    pub gyro: AngularRate,
    pub obs: VectorObservationPair,
    pub q_true: UnitQuaternion,
}

// ½ [ω; 0] ⊗ q on raw components
fn kinematics(w: &Vector3<f64>, q: &Vector4<f64>) -> Vector4<f64> {
    let qv = Vector3::new(q[0], q[1], q[2]);
    let v = q[3] * w - w.cross(&qv);
    Vector4::new(v.x, v.y, v.z, -w.dot(&qv)) * 0.5
}

fn rk4_step(profile: &RateProfile, t: f64, h: f64, q: &Vector4<f64>) -> Vector4<f64> {
    let w0 = profile.rate(t);
    let wm = profile.rate(t + 0.5 * h);
    let w1 = profile.rate(t + h);
    let k1 = kinematics(&w0, q);
    let k2 = kinematics(&wm, &(q + k1 * (0.5 * h)));
    let k3 = kinematics(&wm, &(q + k2 * (0.5 * h)));
    let k4 = kinematics(&w1, &(q + k3 * h));
    let next = q + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    next / next.norm()
}

/// Integrates the rate profile from `q0` with `substeps` RK4 steps per `dt`
/// and samples it every `dt` for `epochs` intervals.
pub fn generate_truth_with(
    profile: &RateProfile,
    q0: UnitQuaternion,
    dt: f64,
    epochs: usize,
    substeps: u32,
) -> Vec<TruthSample> {
    let h = dt / f64::from(substeps.max(1));
    let mut out = Vec::with_capacity(epochs + 1);
    let mut q = q0.as_vector4();
    let mut qs = Vec::with_capacity(epochs + 1);
    qs.push(q0);
    for k in 0..epochs {
        let t0 = k as f64 * dt;
        for j in 0..substeps.max(1) {
            q = rk4_step(profile, t0 + f64::from(j) * h, h, &q);
        }
        qs.push(UnitQuaternion::from_vector(&q).unwrap_or(q0));
    }
    for k in 0..=epochs {
        let t = k as f64 * dt;
        let interval_rate = if k < epochs {
            let dq = qs[k + 1].compose(&qs[k].conjugate()).canonical();
            let angle = dq.angle();
            let vn = dq.vector().norm();
            let phi = if vn > 0.0 { dq.vector() * (angle / vn) } else { Vector3::zeros() };
            AngularRate(phi / dt)
        } else {
            AngularRate(profile.rate(t))
        };
        out.push(TruthSample { t, q: qs[k], interval_rate });
    }
    out
}

pub fn generate_truth(cfg: &ScenarioConfig, q0: UnitQuaternion) -> Vec<TruthSample> {
    generate_truth_with(&cfg.trajectory, q0, cfg.dt_s, cfg.epochs(), cfg.truth_substeps)
}

fn normal3<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    Vector3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Gyro output `ω + β + η` for one interval, η with per-axis std `σ_v/√Δt`.
pub fn gyro_sample<R: Rng + ?Sized>(
    truth_rate: &AngularRate,
    bias: &Vector3<f64>,
    gyro_noise: f64,
    dt: f64,
    rng: &mut R,
) -> AngularRate {
    let sigma = gyro_noise / libm::sqrt(dt);
    AngularRate(truth_rate.0 + bias + normal3(rng) * sigma)
}

/// Gyro stream for a whole truth trajectory (one sample per interval).
pub fn generate_gyro<R: Rng + ?Sized>(
    truth: &[TruthSample],
    bias: &Vector3<f64>,
    gyro_noise: f64,
    dt: f64,
    rng: &mut R,
) -> Vec<AngularRate> {
    truth[..truth.len().saturating_sub(1)]
        .iter()
        .map(|s| gyro_sample(&s.interval_rate, bias, gyro_noise, dt, rng))
        .collect()
}

/// Uniformly distributed unit vector.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = normal3(rng);
        let n = v.norm();
        if n > 1e-9 {
            return v / n;
        }
    }
}

/// Uniformly distributed attitude.
pub fn random_attitude<R: Rng + ?Sized>(rng: &mut R) -> UnitQuaternion {
    loop {
        let v: Vector4<f64> =
            Vector4::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        if let Ok(q) = UnitQuaternion::from_vector(&v) {
            return q;
        }
    }
}

/// One star: fresh random reference direction, body vector `A(q) r + n`
/// renormalized.
pub fn generate_star_obs<R: Rng + ?Sized>(
    q_true: &UnitQuaternion,
    star_noise: f64,
    t: f64,
    rng: &mut R,
) -> VectorObservationPair {
    let r = random_direction(rng);
    let clean = q_true.to_rotation_matrix().apply(&r);
    let noisy = clean + normal3(rng) * star_noise;
    let n = noisy.norm();
    let body = if n > 1e-9 { noisy / n } else { clean };
    VectorObservationPair { body, reference: r, t }
}

/// All sensor data of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub q0: UnitQuaternion,
    pub bias: Vector3<f64>,
    pub epochs: Vec<Epoch>,
}

impl Scenario {
    /// Generates run `run` of `cfg`, seeded with `cfg.seed + run`.
    pub fn generate(cfg: &ScenarioConfig, run: usize) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.run_seed(run));
        let q0 = if cfg.random_initial_attitude { random_attitude(&mut rng) } else { UnitQuaternion::identity() };
        let bias = cfg.bias_rad_s();
        let truth = generate_truth(cfg, q0);
        let mut epochs = Vec::with_capacity(truth.len().saturating_sub(1));
        for k in 1..truth.len() {
            let gyro = gyro_sample(&truth[k - 1].interval_rate, &bias, cfg.gyro_noise, cfg.dt_s, &mut rng);
            let s = &truth[k];
            let obs = generate_star_obs(&s.q, cfg.star_noise_rad, s.t, &mut rng);
            epochs.push(Epoch { t: s.t, gyro, obs, q_true: s.q });
        }
        Ok(Self { q0, bias, epochs })
    }
}

/// Error history of one method on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub times: Vec<f64>,
    pub errors_deg: Vec<f64>,
    /// Final filter state for the MEKF-based methods.
    pub final_state: Option<MekfState>,
}

/// Runs `method` over an already generated scenario.
pub fn run_method(cfg: &ScenarioConfig, method: Method, scenario: &Scenario) -> Result<RunTrace> {
    run_method_observed(cfg, method, scenario, |_, _| {})
}

/// As [`run_method`], calling `on_filter(epoch_index, state)` after every
/// MEKF measurement update.
pub fn run_method_observed<F>(
    cfg: &ScenarioConfig,
    method: Method,
    scenario: &Scenario,
    mut on_filter: F,
) -> Result<RunTrace>
where
    F: FnMut(usize, &MekfState),
{
    let n = scenario.epochs.len();
    let mut times = Vec::with_capacity(n);
    let mut errors = Vec::with_capacity(n);
    let dt = cfg.dt_s;
    let mcfg = cfg.mekf_config();
    let bias_std = cfg.bias_std_degph * DEG_PER_HOUR;
    let handoff = cfg.handoff_epoch();

    let mut init = Initializer::new().with_solve_interval(cfg.solve_every);
    let mut filter: Option<MekfState> = None;

    if method == Method::MekfOnly {
        let [roll, pitch, yaw] = cfg.init_att_err_deg.map(f64::to_radians);
        let q = UnitQuaternion::from_euler_321(roll, pitch, yaw).compose(&scenario.q0);
        filter = Some(MekfState::handoff_from_initializer(q, cfg.mekf_att_std_deg, bias_std));
    }

    for (k, epoch) in scenario.epochs.iter().enumerate() {
        let index = k + 1;
        let estimate = match filter.as_mut() {
            Some(state) => {
                state.propagate(&epoch.gyro, &mcfg)?;
                state.update(&epoch.obs, &mcfg)?;
                on_filter(k + 1, state);
                state.q
            }
            None => {
                init.step(&epoch.gyro, &epoch.obs, dt)?;
                // before the geometry is unique the constant factor is unknown;
                // report the gyro-only attitude
                let q = init.current_quaternion().unwrap_or(*init.relative_attitude());
                if method == Method::OptimalPlusMekf && index == handoff {
                    filter = Some(
                        MekfState::handoff_from_initializer(q, cfg.handoff_att_std_deg, bias_std)
                            .with_time(epoch.t),
                    );
                }
                q
            }
        };
        times.push(epoch.t);
        errors.push(attitude_error_deg(&estimate, &epoch.q_true));
    }
    Ok(RunTrace { times, errors_deg: errors, final_state: filter })
}

/// Generates run `run` and executes `method` on it.
pub fn simulate_run(cfg: &ScenarioConfig, method: Method, run: usize) -> Result<RunTrace> {
    let scenario = Scenario::generate(cfg, run)?;
    run_method(cfg, method, &scenario)
}

/// Per-run error curves of one method; a failed run keeps its error.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    pub method: Method,
    pub times: Vec<f64>,
    pub runs: Vec<Result<Vec<f64>>>,
}

impl MonteCarloResult {
    pub fn successful(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.runs.iter().filter_map(|r| r.as_ref().ok())
    }

    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.is_err()).count()
    }

    /// Mean over successful runs at epoch index `k` (0-based).
    pub fn mean_at(&self, k: usize) -> f64 {
        let (s, n) = self.successful().fold((0.0, 0usize), |(s, n), r| (s + r[k], n + 1));
        s / n as f64
    }
}

/// Sequential Monte Carlo batch: runs `0..cfg.mc_runs` with seeds `seed + i`.
pub fn run_monte_carlo(cfg: &ScenarioConfig, method: Method) -> Result<MonteCarloResult> {
    cfg.validate()?;
    let times = (1..=cfg.epochs()).map(|k| k as f64 * cfg.dt_s).collect();
    let runs = (0..cfg.mc_runs).map(|i| simulate_run(cfg, method, i).map(|t| t.errors_deg)).collect();
    Ok(MonteCarloResult { method, times, runs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::propagate;

    fn quiet() -> ScenarioConfig {
        ScenarioConfig {
            bias_degph: [0.0; 3],
            gyro_noise: 0.0,
            star_noise_rad: 0.0,
            mc_runs: 1,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn default_config_is_valid() {
        let c = ScenarioConfig::default();
        c.validate().unwrap();
        assert_eq!(c.epochs(), 5400);
        assert_eq!(c.handoff_epoch(), 300);
        assert_eq!(c.mc_runs, 50);
    }

    #[test]
    fn validation_names_field() {
        let mut c = ScenarioConfig { init_phase_s: 6000.0, ..Default::default() };
        assert!(matches!(c.validate(), Err(Error::InvalidInput(m)) if m.contains("duration_s")));
        c = ScenarioConfig { mc_runs: 0, ..Default::default() };
        assert!(matches!(c.validate(), Err(Error::InvalidInput(m)) if m.contains("mc_runs")));
        c = ScenarioConfig { dt_s: -1.0, ..Default::default() };
        assert!(matches!(c.validate(), Err(Error::InvalidInput(m)) if m.contains("dt_s")));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("Optimal+MEKF".parse::<Method>().unwrap(), Method::OptimalPlusMekf);
        assert!("usque".parse::<Method>().is_err());
    }

    #[test]
    fn zero_rate_truth_is_constant() {
        let q0 = UnitQuaternion::from_axis_angle(&Vector3::new(1.0, 2.0, 3.0), 0.3).unwrap();
        let truth = generate_truth_with(&RateProfile::Constant { rate: [0.0; 3] }, q0, 1.0, 50, 10);
        assert!(truth.iter().all(|s| s.q == q0));
    }

    #[test]
    fn one_pitch_revolution_returns_to_start() {
        let profile = RateProfile::Constant { rate: [0.0, 2.0 * PI / 5400.0, 0.0] };
        let truth = generate_truth_with(&profile, UnitQuaternion::identity(), 1.0, 5400, 10);
        let last = truth.last().unwrap();
        assert!(attitude_error_deg(&last.q, &UnitQuaternion::identity()) < 1e-9);
        assert!(attitude_error_deg(&truth[2700].q, &UnitQuaternion::identity()) > 179.9);
    }

    #[test]
    fn truth_matches_finer_integration() {
        let profile = RateProfile::default();
        let q0 = UnitQuaternion::identity();
        let coarse = generate_truth_with(&profile, q0, 1.0, 5400, 10);
        let fine = generate_truth_with(&profile, q0, 1.0, 5400, 100);
        let worst = coarse.iter().zip(&fine).map(|(a, b)| attitude_error_deg(&a.q, &b.q)).fold(0.0, f64::max);
        assert!(worst < 1e-7, "worst {worst}");
    }

    #[test]
    fn ideal_gyro_reproduces_truth() {
        let cfg = quiet();
        let q0 = UnitQuaternion::from_axis_angle(&Vector3::new(0.5, -1.0, 0.2), 2.5).unwrap();
        let truth = generate_truth(&cfg, q0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gyro = generate_gyro(&truth, &Vector3::zeros(), 0.0, cfg.dt_s, &mut rng);
        assert_eq!(gyro.len(), cfg.epochs());
        let mut q = q0;
        for (k, w) in gyro.iter().enumerate() {
            assert_eq!(*w, truth[k].interval_rate);
            q = propagate(&q, w, cfg.dt_s).unwrap();
            assert!(attitude_error_deg(&q, &truth[k + 1].q) < 1e-6);
        }
    }

    #[test]
    fn gyro_bias_is_constant_offset() {
        let cfg = ScenarioConfig { gyro_noise: 0.0, ..quiet() };
        let truth = generate_truth(&cfg, UnitQuaternion::identity());
        let bias = Vector3::from([0.1; 3]) * DEG_PER_HOUR;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gyro = generate_gyro(&truth, &bias, 0.0, 1.0, &mut rng);
        for (w, s) in gyro.iter().zip(&truth) {
            let d = w.0 - s.interval_rate.0;
            for c in d.iter() {
                assert!((c - 4.848e-7).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gyro_noise_is_zero_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1_000_000;
        let sigma = 1.0;
        let mut sum = Vector3::zeros();
        for _ in 0..n {
            sum += gyro_sample(&AngularRate::zero(), &Vector3::zeros(), sigma, 1.0, &mut rng).0;
        }
        let mean = sum / n as f64;
        let bound = 4.0 * sigma / (n as f64).sqrt();
        assert!(mean.iter().all(|m| m.abs() < bound), "{mean:?}");
    }

    #[test]
    fn noiseless_star_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let q = random_attitude(&mut rng);
        for _ in 0..100 {
            let o = generate_star_obs(&q, 0.0, 0.0, &mut rng);
            assert!((o.body - q.to_rotation_matrix().apply(&o.reference)).norm() < 1e-15);
            assert!((o.body.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn star_angular_deviation_statistic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = random_attitude(&mut rng);
        let sigma = 1e-4;
        let n = 100_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..n {
            let o = generate_star_obs(&q, sigma, 0.0, &mut rng);
            let clean = q.to_rotation_matrix().apply(&o.reference);
            let a = libm::acos(o.body.dot(&clean).min(1.0));
            sum += a;
            sq += a * a;
        }
        // tangential error is 2-D Gaussian: RMS σ√2, Rayleigh mean σ√(π/2)
        let rms = (sq / n as f64).sqrt();
        let mean = sum / n as f64;
        assert!((rms / (sigma * 2f64.sqrt()) - 1.0).abs() < 0.05, "rms {rms}");
        assert!((mean / (sigma * (PI / 2.0).sqrt()) - 1.0).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn reference_directions_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 1_000_000;
        let mut sum = Vector3::zeros();
        for _ in 0..n {
            sum += random_direction(&mut rng);
        }
        assert!((sum / n as f64).norm() < 0.005);
    }

    #[test]
    fn one_observation_per_epoch() {
        let cfg = ScenarioConfig { duration_s: 600.0, ..ScenarioConfig::default() };
        let s = Scenario::generate(&cfg, 0).unwrap();
        assert_eq!(s.epochs.len(), 600);
        for (k, e) in s.epochs.iter().enumerate() {
            assert_eq!(e.t, (k + 1) as f64);
            assert_eq!(e.obs.t, e.t);
        }
    }

    #[test]
    fn noiseless_optimal_is_exact_after_second_epoch() {
        let cfg = quiet();
        let trace = simulate_run(&cfg, Method::Optimal, 0).unwrap();
        assert_eq!(trace.errors_deg.len(), 5400);
        let worst = trace.errors_deg[1..].iter().cloned().fold(0.0, f64::max);
        assert!(worst < 1e-6, "worst {worst}");
        assert!(trace.final_state.is_none());
    }

    #[test]
    fn runs_are_deterministic_and_independent() {
        let cfg = ScenarioConfig { duration_s: 400.0, mc_runs: 3, seed: 42, ..Default::default() };
        let a = run_monte_carlo(&cfg, Method::OptimalPlusMekf).unwrap();
        let b = run_monte_carlo(&cfg, Method::OptimalPlusMekf).unwrap();
        assert_eq!(a, b);
        let solo = simulate_run(&cfg, Method::OptimalPlusMekf, 2).unwrap();
        assert_eq!(a.runs[2].as_ref().unwrap(), &solo.errors_deg);
        assert_eq!(a.failures(), 0);
    }

    #[test]
    fn handoff_switches_to_filter() {
        let cfg = ScenarioConfig { duration_s: 400.0, ..Default::default() };
        let s = Scenario::generate(&cfg, 0).unwrap();
        let opt = run_method(&cfg, Method::Optimal, &s).unwrap();
        let hand = run_method(&cfg, Method::OptimalPlusMekf, &s).unwrap();
        assert_eq!(opt.errors_deg[..300], hand.errors_deg[..300]);
        assert_ne!(opt.errors_deg[350], hand.errors_deg[350]);
        let st = hand.final_state.unwrap();
        assert_eq!(st.t, 400.0);
    }

    #[test]
    fn mekf_only_starts_from_perturbed_attitude() {
        let cfg = ScenarioConfig { duration_s: 10.0, init_phase_s: 5.0, ..Default::default() };
        let s = Scenario::generate(&cfg, 0).unwrap();
        let [r, p, y] = cfg.init_att_err_deg.map(f64::to_radians);
        let q = UnitQuaternion::from_euler_321(r, p, y).compose(&s.q0);
        let e0 = attitude_error_deg(&q, &s.q0);
        assert!((e0 - UnitQuaternion::from_euler_321(r, p, y).angle().to_degrees()).abs() < 1e-9);
    }
}
