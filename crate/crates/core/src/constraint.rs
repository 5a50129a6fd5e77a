//! The S^3 quaternionic constraint model.
//!
//! A source emits pairs carrying a hidden state `(e0, eta_zs)`: a spin axis
//! `e0` uniform on the sphere and a rotation scalar `eta_zs` uniform on
//! `[0, pi]`. A station measuring along `n` produces a nonzero outcome only
//! when `|n . e0|` clears the strength threshold `f(eta_zs, kappa)`; the
//! detected sign is `-sign(n . e0)` at Alice and `+sign(n . e0)` at Bob.
//! The strength constant `kappa` selects the correlation family: 0 gives
//! the linear correlation, +1 the singlet cosine, larger values push past
//! the Tsirelson bound, and -1 falls back to linear.

use std::f64::consts::PI;

use rand::Rng;
use thiserror::Error;

use crate::ga::UnitVector3;
use crate::stream::{run_chunked, sample_unit_vector, ChunkPlan, StreamError};

/// Slack for the `[0, pi]` angle-domain checks.
const ANGLE_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("angle {value} outside [0, pi]")]
    AngleOutOfRange { value: f64 },
    #[error("kappa = {value} is not in {{-1}} U [0, inf)")]
    InvalidKappa { value: f64 },
    #[error("empty experiment: at least one trial is required")]
    EmptyExperiment,
    #[error("no coincident detections: correlation undefined")]
    NoCoincidences,
    #[error("correlation input {value} outside [-1, 1]")]
    CorrelationOutOfRange { value: f64 },
}

impl From<StreamError> for ModelError {
    fn from(err: StreamError) -> Self {
        match err {
            StreamError::EmptyExperiment | StreamError::ZeroChunkSize => ModelError::EmptyExperiment,
        }
    }
}

/// How the two stations decide that a trial counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetectionMode {
    /// Each wing applies its own threshold test; single-sided detections
    /// populate the +/-0 and 0+/- outcome categories.
    PerStation,
    /// A trial contributes only when the state clears the threshold for
    /// both detector directions; otherwise both outcomes are 0.
    PairedFilter,
}

#[derive(Clone, Copy, Debug)]
pub struct ModelParams {
    kappa: f64,
    mode: DetectionMode,
}

impl ModelParams {
    pub fn new(kappa: f64, mode: DetectionMode) -> Result<Self, ModelError> {
        validate_kappa(kappa)?;
        Ok(Self { kappa, mode })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mode(&self) -> DetectionMode {
        self.mode
    }
}

/// One emitted pair's hidden variables. `s0` enters the dynamics only
/// through `eta_zs`; it is carried for reporting.
#[derive(Clone, Copy, Debug)]
pub struct InitialState {
    pub e0: UnitVector3,
    pub eta_zs: f64,
    pub s0: UnitVector3,
}

/// A station outcome: detected sign or no detection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StationOutcome {
    Plus,
    Minus,
    Undetected,
}

impl StationOutcome {
    pub fn sign(self) -> i8 {
        match self {
            StationOutcome::Plus => 1,
            StationOutcome::Minus => -1,
            StationOutcome::Undetected => 0,
        }
    }

    pub fn detected(self) -> bool {
        self != StationOutcome::Undetected
    }
}

/// One coincidence event.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub alice: StationOutcome,
    pub bob: StationOutcome,
}

fn validate_angle(value: f64) -> Result<(), ModelError> {
    if value.is_finite() && (-ANGLE_EPS..=PI + ANGLE_EPS).contains(&value) {
        Ok(())
    } else {
        Err(ModelError::AngleOutOfRange { value })
    }
}

fn validate_kappa(value: f64) -> Result<(), ModelError> {
    if value.is_finite() && (value >= 0.0 || value == -1.0) {
        Ok(())
    } else {
        Err(ModelError::InvalidKappa { value })
    }
}

/// Strength value for pre-validated arguments; the hot path calls this once
/// per trial with `eta` produced by the sampler and `kappa` validated at
/// [`ModelParams::new`].
#[inline]
pub(crate) fn strength_value(eta: f64, kappa: f64) -> f64 {
    if kappa == 0.0 {
        // eta/(kappa pi) -> inf limit: the constraint becomes vacuous.
        return -1.0;
    }
    if kappa == -1.0 {
        // Mirrored angle: the kappa = +1 form evaluated at 2 pi - eta.
        return -1.0 + 2.0 / (1.0 + 3.0 * (2.0 * PI - eta) / PI).sqrt();
    }
    let f = -1.0 + 2.0 / (1.0 + 3.0 * eta / (kappa * PI)).sqrt();
    f.clamp(-1.0, 1.0)
}

/// The strength function `f(eta, kappa)` controlling the detection
/// threshold; `kappa = 0` is the vacuous limit `-1`, `kappa = -1` mirrors
/// the angle to `2 pi - eta`.
pub fn strength_f(eta: f64, kappa: f64) -> Result<f64, ModelError> {
    validate_angle(eta)?;
    validate_kappa(kappa)?;
    Ok(strength_value(eta, kappa))
}

/// Norm of the complete-state quaternion sum:
/// `1 + sin^2(eta_ne) + f(eta_zs, kappa)^2`.
pub fn complete_state_norm(eta_ne: f64, eta_zs: f64, kappa: f64) -> Result<f64, ModelError> {
    validate_angle(eta_ne)?;
    let f = strength_f(eta_zs, kappa)?;
    let s = eta_ne.sin();
    Ok(1.0 + s * s + f * f)
}

/// Membership in the complete-state set: `|cos(eta_ne)| >= f(eta_zs, kappa)`.
pub fn lambda_membership(eta_ne: f64, eta_zs: f64, kappa: f64) -> Result<bool, ModelError> {
    validate_angle(eta_ne)?;
    let f = strength_f(eta_zs, kappa)?;
    Ok(eta_ne.cos().abs() >= f)
}

/// The norm-condition form of membership, `||P0 + Q0|| = N <= 2`. Algebra
/// makes this equivalent to [`lambda_membership`] whenever `f >= 0`; for
/// `f < 0` it is strictly stronger (it bounds `f^2 <= cos^2` rather than
/// `f <= |cos|`). Both predicates are exposed so the difference can be
/// measured rather than assumed.
pub fn norm_membership(eta_ne: f64, eta_zs: f64, kappa: f64) -> Result<bool, ModelError> {
    Ok(complete_state_norm(eta_ne, eta_zs, kappa)? <= 2.0)
}

/// Effective metric `g(u, v, eta)`: the inner product survives only when
/// `|u . v|` clears the strength threshold at `kappa = 1`.
pub fn effective_metric(u: &UnitVector3, v: &UnitVector3, eta: f64) -> Result<f64, ModelError> {
    validate_angle(eta)?;
    let d = u.dot(v);
    if d.abs() >= strength_value(eta, 1.0) {
        Ok(d)
    } else {
        Ok(0.0)
    }
}

/// Draws one hidden state. Draw order is part of the reproducibility
/// contract: e0 (two uniforms), eta_zs (one), s0 (two).
pub fn sample_initial_state<R: Rng>(rng: &mut R) -> InitialState {
    let e0 = sample_unit_vector(rng);
    let eta_zs = PI * rng.gen::<f64>();
    let s0 = sample_unit_vector(rng);
    InitialState { e0, eta_zs, s0 }
}

#[inline]
fn station_outcome(c: f64, f: f64, flip_sign: bool) -> StationOutcome {
    if c.abs() >= f {
        // sign(0) is defined as +1, so c = 0 detects with sign +1.
        let sign_plus = c >= 0.0;
        if sign_plus != flip_sign {
            StationOutcome::Plus
        } else {
            StationOutcome::Minus
        }
    } else {
        StationOutcome::Undetected
    }
}

/// Alice's outcome: `-sign(a . e0)` when `|a . e0|` clears the threshold,
/// 0 otherwise. Depends only on `a` and the state, never on Bob's setting.
pub fn measure_a(a: &UnitVector3, state: &InitialState, params: &ModelParams) -> StationOutcome {
    let f = strength_value(state.eta_zs, params.kappa);
    station_outcome(a.dot(&state.e0), f, true)
}

/// Bob's outcome: `+sign(b . e0)` when `|b . e0|` clears the threshold.
pub fn measure_b(b: &UnitVector3, state: &InitialState, params: &ModelParams) -> StationOutcome {
    let f = strength_value(state.eta_zs, params.kappa);
    station_outcome(b.dot(&state.e0), f, false)
}

/// Both stations' outcomes under the configured detection mode.
pub fn trial_outcome(
    a: &UnitVector3,
    b: &UnitVector3,
    state: &InitialState,
    params: &ModelParams,
) -> TrialOutcome {
    let f = strength_value(state.eta_zs, params.kappa);
    let alice = station_outcome(a.dot(&state.e0), f, true);
    let bob = station_outcome(b.dot(&state.e0), f, false);
    match params.mode {
        DetectionMode::PerStation => TrialOutcome { alice, bob },
        DetectionMode::PairedFilter => {
            if alice.detected() && bob.detected() {
                TrialOutcome { alice, bob }
            } else {
                TrialOutcome {
                    alice: StationOutcome::Undetected,
                    bob: StationOutcome::Undetected,
                }
            }
        }
    }
}

/// Tallies of the nine outcome categories of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub pp: u64,
    pub pm: u64,
    pub mp: u64,
    pub mm: u64,
    pub p0: u64,
    pub m0: u64,
    pub zp: u64,
    pub zm: u64,
    pub zz: u64,
}

impl OutcomeCounts {
    pub fn record(&mut self, outcome: TrialOutcome) {
        use StationOutcome::*;
        let slot = match (outcome.alice, outcome.bob) {
            (Plus, Plus) => &mut self.pp,
            (Plus, Minus) => &mut self.pm,
            (Minus, Plus) => &mut self.mp,
            (Minus, Minus) => &mut self.mm,
            (Plus, Undetected) => &mut self.p0,
            (Minus, Undetected) => &mut self.m0,
            (Undetected, Plus) => &mut self.zp,
            (Undetected, Minus) => &mut self.zm,
            (Undetected, Undetected) => &mut self.zz,
        };
        *slot += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        self.pp += other.pp;
        self.pm += other.pm;
        self.mp += other.mp;
        self.mm += other.mm;
        self.p0 += other.p0;
        self.m0 += other.m0;
        self.zp += other.zp;
        self.zm += other.zm;
        self.zz += other.zz;
    }

    pub fn total(&self) -> u64 {
        self.pp + self.pm + self.mp + self.mm + self.p0 + self.m0 + self.zp + self.zm + self.zz
    }

    pub fn coincidences(&self) -> u64 {
        self.pp + self.pm + self.mp + self.mm
    }

    /// Detected-pair fraction g.
    pub fn g(&self) -> f64 {
        self.coincidences() as f64 / self.total() as f64
    }

    /// Alice / Bob marginals as (plus, minus, undetected).
    pub fn alice_marginals(&self) -> (u64, u64, u64) {
        (
            self.pp + self.pm + self.p0,
            self.mp + self.mm + self.m0,
            self.zp + self.zm + self.zz,
        )
    }

    pub fn bob_marginals(&self) -> (u64, u64, u64) {
        (
            self.pp + self.mp + self.zp,
            self.pm + self.mm + self.zm,
            self.p0 + self.m0 + self.zz,
        )
    }

    /// Coincidence-conditioned correlation with its standard error.
    pub fn correlation(&self) -> Result<Correlation, ModelError> {
        let coinc = self.coincidences();
        if coinc == 0 {
            return Err(ModelError::NoCoincidences);
        }
        let same = (self.pp + self.mm) as f64;
        let diff = (self.pm + self.mp) as f64;
        let value = (same - diff) / (same + diff);
        let std_error = ((1.0 - value * value) / coinc as f64).sqrt();
        Ok(Correlation { value, std_error, coincidences: coinc })
    }
}

/// Correlation estimate `E = (N++ + N-- - N+- - N-+)/N_coinc` with standard
/// error `sqrt((1 - E^2)/N_coinc)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correlation {
    pub value: f64,
    pub std_error: f64,
    pub coincidences: u64,
}

/// Runs `plan.trials` independent pair emissions measured along `(a, b)` and
/// tallies the nine outcome categories. Chunked per [`crate::stream`], so the
/// counts are identical for any worker count.
pub fn run_trials(
    a: &UnitVector3,
    b: &UnitVector3,
    params: &ModelParams,
    plan: &ChunkPlan,
) -> Result<OutcomeCounts, ModelError> {
    if plan.trials == 0 {
        return Err(ModelError::EmptyExperiment);
    }
    let chunks = run_chunked(plan, |rng, len| {
        let mut counts = OutcomeCounts::default();
        for _ in 0..len {
            let state = sample_initial_state(rng);
            counts.record(trial_outcome(a, b, &state, params));
        }
        counts
    });
    let mut total = OutcomeCounts::default();
    for chunk in &chunks {
        total.merge(chunk);
    }
    Ok(total)
}
