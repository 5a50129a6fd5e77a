//! Deterministic quadrature oracle for the constraint model, plus the
//! closed-form quantum reference table.
//!
//! The bridge to Pearle's ball representation: uniform `eta_zs` maps through
//! the strength function onto the radial density `p(r)`, detection becomes a
//! polar-cap test of half-angle `pi r / 2`, and joint probabilities reduce to
//! radial integrals of the phase-shifted cap-overlap area. Everything here is
//! pure quadrature over those expressions; no Monte Carlo anywhere.

pub mod quad;

use std::cell::RefCell;
use std::f64::consts::PI;

use thiserror::Error;

use crate::constraint::{strength_f, ModelError};
pub use quad::{integrate, QuadError, Quadrature, QuadratureSettings};

/// Angle slack mirroring the constraint module's domain checks.
const ANGLE_EPS: f64 = 1e-9;
/// Below this distance from eta = 0 or pi the phase shift uses its 3/2 limit.
const H_ENDPOINT_EPS: f64 = 1e-7;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("negative joint probability {value}")]
    NegativeProbability { value: f64 },
    #[error("zero coincidence mass: correlation undefined")]
    ZeroCoincidenceMass,
}

fn check_angle(name: &'static str, value: f64) -> Result<(), OracleError> {
    if value.is_finite() && (-ANGLE_EPS..=PI + ANGLE_EPS).contains(&value) {
        Ok(())
    } else {
        Err(OracleError::OutOfRange { name, value, range: "[0, pi]" })
    }
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<(), OracleError> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(OracleError::OutOfRange { name, value, range: "[0, 1]" })
    }
}

/// The nine joint probabilities plus singles for one opening angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilityTable {
    pub eta: f64,
    pub p_pm: f64,
    pub p_mp: f64,
    pub p_pp: f64,
    pub p_mm: f64,
    pub p_p0: f64,
    pub p_m0: f64,
    pub p_0p: f64,
    pub p_0m: f64,
    pub p_00: f64,
    pub p1_plus: f64,
    pub p1_minus: f64,
    pub p2_plus: f64,
    pub p2_minus: f64,
}

/// Singlet-state closed forms: `P(+-) = P(-+) = cos^2(eta/2)/2`,
/// `P(++) = P(--) = sin^2(eta/2)/2`, all zero-outcome entries 0, singles 1/2.
pub fn quantum_reference(eta: f64) -> Result<ProbabilityTable, OracleError> {
    check_angle("eta", eta)?;
    let c = (eta / 2.0).cos();
    let s = (eta / 2.0).sin();
    let opposite = 0.5 * c * c;
    let same = 0.5 * s * s;
    Ok(ProbabilityTable {
        eta,
        p_pm: opposite,
        p_mp: opposite,
        p_pp: same,
        p_mm: same,
        p_p0: 0.0,
        p_m0: 0.0,
        p_0p: 0.0,
        p_0m: 0.0,
        p_00: 0.0,
        p1_plus: 0.5,
        p1_minus: 0.5,
        p2_plus: 0.5,
        p2_minus: 0.5,
    })
}

/// Radial probability density on the unit ball:
/// `p(r) = (4 pi / 3) sin(pi r/2) / (1 + cos(pi r/2))^3`.
pub fn pearle_density(r: f64) -> Result<f64, OracleError> {
    check_unit_interval("r", r)?;
    let half = PI * r / 2.0;
    Ok((4.0 * PI / 3.0) * half.sin() / (1.0 + half.cos()).powi(3))
}

/// Cumulative distribution of [`pearle_density`]:
/// `C(r) = -1/3 + 4 / (3 (1 + cos(pi r/2))^2)`.
pub fn pearle_cumulative(r: f64) -> Result<f64, OracleError> {
    check_unit_interval("r", r)?;
    let c = (PI * r / 2.0).cos();
    Ok(-1.0 / 3.0 + 4.0 / (3.0 * (1.0 + c) * (1.0 + c)))
}

/// Radial coordinate solving `cos(pi r / 2) = f(eta_zs, kappa)`.
pub fn r_from_eta_zs(eta_zs: f64, kappa: f64) -> Result<f64, OracleError> {
    let f = strength_f(eta_zs, kappa)?;
    Ok((2.0 / PI) * f.clamp(-1.0, 1.0).acos())
}

/// Radial mismatch between the rotations about the two detector directions,
/// with the double cover folding the branches at eta = pi/2.
pub fn delta_r(eta_ab: f64) -> Result<f64, OracleError> {
    check_angle("eta_ab", eta_ab)?;
    let arg = if eta_ab <= PI / 2.0 {
        1.0 + 3.0 * eta_ab / PI
    } else {
        4.0 - 3.0 * eta_ab / PI
    };
    let f = -1.0 + 2.0 / arg.sqrt();
    Ok((2.0 / PI) * f.clamp(-1.0, 1.0).acos())
}

/// Phase shift applied to the cap radius:
/// `h = (3 pi / 8) sin^2(eta) / (pi sin^2(eta/2) + eta cos(eta) - sin(eta))`,
/// with the removable 0/0 at both endpoints replaced by the limit 3/2.
pub fn phase_shift_h(eta_ab: f64) -> Result<f64, OracleError> {
    check_angle("eta_ab", eta_ab)?;
    // The denominator telescopes under eta -> pi - eta (the pi cos(eta)
    // terms cancel exactly), so h is symmetric about pi/2. Evaluating on
    // the [0, pi/2] half avoids the catastrophic cancellation that the raw
    // formula suffers near pi.
    let eta = if eta_ab > PI / 2.0 { PI - eta_ab } else { eta_ab };
    if eta < H_ENDPOINT_EPS {
        return Ok(1.5);
    }
    let s = eta.sin();
    let sh = (eta / 2.0).sin();
    let denom = PI * sh * sh + eta * eta.cos() - s;
    Ok((3.0 * PI / 8.0) * s * s / denom)
}

/// Overlap area of the two circular caps of half-angle `pi r / 2` on the
/// sphere of radius `r`, centers separated by `eta_ab`:
/// `4 r^2 int_{eta/2}^{pi r/2} sqrt(1 - (cos(pi r/2)/cos(xi))^2) dxi`,
/// and zero when `eta_ab > pi r`.
pub fn cap_overlap(
    r: f64,
    eta_ab: f64,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    if !(r.is_finite() && r > 0.0 && r <= 1.0 + 1e-12) {
        return Err(OracleError::OutOfRange { name: "r", value: r, range: "(0, 1]" });
    }
    check_angle("eta_ab", eta_ab)?;
    let upper = PI * r / 2.0;
    let lower = eta_ab / 2.0;
    if lower >= upper {
        return Ok(0.0);
    }
    let cos_cap = upper.cos();
    let integrand = move |xi: f64| {
        let ratio = cos_cap / xi.cos();
        (1.0 - ratio * ratio).max(0.0).sqrt()
    };
    let q = integrate(&integrand, lower, upper, settings)?;
    Ok(4.0 * r * r * q.value)
}

/// `h(eta) * cap_overlap(r, eta)`: the overlap area corrected for the
/// relative rotation of the state about the two detector directions.
pub fn scaled_overlap(
    r: f64,
    eta_ab: f64,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    Ok(phase_shift_h(eta_ab)? * cap_overlap(r, eta_ab, settings)?)
}

/// Which joint-probability channel a radial integral computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    /// `P(+-) = P(-+)`: outcomes of opposite sign.
    Opposite,
    /// `P(++) = P(--)`: outcomes of the same sign.
    Same,
}

/// Runs an outer adaptive integral whose integrand itself integrates; any
/// inner quadrature failure is stashed and re-raised after the outer pass.
fn nested_integral<G>(
    lower: f64,
    upper: f64,
    settings: &QuadratureSettings,
    inner: G,
) -> Result<f64, OracleError>
where
    G: Fn(f64, &QuadratureSettings) -> Result<f64, OracleError>,
{
    let inner_settings = QuadratureSettings {
        abs_tol: settings.abs_tol * 0.1,
        max_depth: settings.max_depth,
    };
    let failure: RefCell<Option<OracleError>> = RefCell::new(None);
    let integrand = |x: f64| match inner(x, &inner_settings) {
        Ok(v) => v,
        Err(e) => {
            let mut slot = failure.borrow_mut();
            if slot.is_none() {
                *slot = Some(e);
            }
            0.0
        }
    };
    let outer = integrate(&integrand, lower, upper, settings)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(outer.value)
}

/// Joint-probability integral over the radial density:
/// opposite channel `int_{eta/pi}^{1} p(r) J(pi r, eta) / (4 pi r^2) dr`,
/// same channel `int_{1-eta/pi}^{1} p(r) J(pi r, pi - eta) / (4 pi r^2) dr`,
/// with `J` the phase-shifted overlap of [`scaled_overlap`].
pub fn joint_prob_integral(
    eta_ab: f64,
    channel: Channel,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    check_angle("eta_ab", eta_ab)?;
    let eta = eta_ab.clamp(0.0, PI);
    let (lower, cap_angle) = match channel {
        Channel::Opposite => (eta / PI, eta),
        Channel::Same => (1.0 - eta / PI, PI - eta),
    };
    nested_integral(lower, 1.0, settings, |r, inner_settings| {
        let density = pearle_density(r.clamp(0.0, 1.0))?;
        let area = scaled_overlap(r, cap_angle, inner_settings)?;
        Ok(density * area / (4.0 * PI * r * r))
    })
}

/// Zero-outcome probabilities derived from measured coincidence fractions:
/// `P00 = 1 + g(eta) - 2 g(0)` and `P+0 = (g(0) - g(eta)) / 2`. Negative
/// values are returned as-is with `consistent = false`, signalling that the
/// supplied fractions cannot come from one detection model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroOutcomeProbs {
    pub p_00: f64,
    pub p_plus0: f64,
    pub consistent: bool,
}

pub fn zero_outcome_probs(g0: f64, g_eta: f64) -> Result<ZeroOutcomeProbs, OracleError> {
    check_unit_interval("g0", g0)?;
    check_unit_interval("g_eta", g_eta)?;
    let p_00 = 1.0 + g_eta - 2.0 * g0;
    let p_plus0 = 0.5 * (g0 - g_eta);
    Ok(ZeroOutcomeProbs {
        p_00,
        p_plus0,
        consistent: p_00 >= -1e-12 && p_plus0 >= -1e-12,
    })
}

/// Coincidence-conditioned correlation of a probability table.
pub fn correlation_from_probs(table: &ProbabilityTable) -> Result<f64, OracleError> {
    let entries = [table.p_pp, table.p_mm, table.p_pm, table.p_mp];
    for &p in &entries {
        if p < 0.0 {
            return Err(OracleError::NegativeProbability { value: p });
        }
    }
    let mass = entries.iter().sum::<f64>();
    if mass <= 0.0 {
        return Err(OracleError::ZeroCoincidenceMass);
    }
    Ok((table.p_pp + table.p_mm - table.p_pm - table.p_mp) / mass)
}

/// Double-detection probability for one threshold `s = cos` of the cap
/// half-angle, detector separation `gamma`. Exact hemisphere form at `s = 0`;
/// otherwise the Pearle cap-overlap fraction.
fn detection_overlap(
    s: f64,
    gamma: f64,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    debug_assert!((0.0..=1.0).contains(&s));
    if s == 0.0 {
        // Two hemispheres with axes separated by gamma.
        return Ok((PI - gamma) / (2.0 * PI));
    }
    if s >= 1.0 - 1e-14 {
        return Ok(0.0);
    }
    let r = (2.0 / PI) * s.acos();
    if gamma >= PI * r {
        return Ok(0.0);
    }
    Ok(cap_overlap(r, gamma, settings)? / (4.0 * PI * r * r))
}

/// Expected coincidence-conditioned correlation of the constraint model at
/// strength `kappa`, computed by quadrature over the hidden variables
/// (uniform `eta_zs`, uniform spin axis). `kappa = 0` and `kappa = -1` have
/// non-positive thresholds everywhere, so the unfiltered linear form
/// `-1 + 2 eta / pi` is exact and returned directly.
pub fn model_correlation(
    eta_ab: f64,
    kappa: f64,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    check_angle("eta_ab", eta_ab)?;
    strength_f(0.0, kappa)?; // domain check on kappa
    if kappa == 0.0 || kappa == -1.0 {
        return Ok(-1.0 + 2.0 * eta_ab.clamp(0.0, PI) / PI);
    }
    let eta = eta_ab.clamp(0.0, PI);
    let p_opposite = channel_probability(eta, kappa, settings)?;
    let p_same = channel_probability(PI - eta, kappa, settings)?;
    let mass = p_same + p_opposite;
    if mass <= 1e-300 {
        return Err(OracleError::ZeroCoincidenceMass);
    }
    Ok((p_same - p_opposite) / mass)
}

/// `P(gamma) = (1/pi) int_0^pi ovl(max(f(u, kappa), 0), gamma) du`: the
/// unconditional probability of a coincident detection pair with signs in
/// the channel whose cap centers are `gamma` apart.
fn channel_probability(
    gamma: f64,
    kappa: f64,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    let value = nested_integral(0.0, PI, settings, |u, inner_settings| {
        let s = crate::constraint::strength_value(u.clamp(0.0, PI), kappa).max(0.0);
        detection_overlap(s.min(1.0), gamma, inner_settings)
    })?;
    Ok(value / PI)
}

/// Full oracle probability table for the constraint model at `kappa` via
/// channel quadrature; zero-outcome entries follow from the marginals.
pub fn model_probability_table(
    eta_ab: f64,
    kappa: f64,
    settings: &QuadratureSettings,
) -> Result<ProbabilityTable, OracleError> {
    check_angle("eta_ab", eta_ab)?;
    strength_f(0.0, kappa)?;
    let eta = eta_ab.clamp(0.0, PI);
    let (p_opp, p_same, single) = if kappa == 0.0 || kappa == -1.0 {
        ((PI - eta) / (2.0 * PI), eta / (2.0 * PI), 0.5)
    } else {
        let p_opp = channel_probability(eta, kappa, settings)?;
        let p_same = channel_probability(PI - eta, kappa, settings)?;
        // Single-side detection probability: (1 - E[f^+]) / 2 per sign.
        let ef = integrate(
            &|u: f64| crate::constraint::strength_value(u.clamp(0.0, PI), kappa).max(0.0),
            0.0,
            PI,
            settings,
        )?
        .value
            / PI;
        (p_opp, p_same, (1.0 - ef) / 2.0)
    };
    let p_plus0 = single - p_opp - p_same;
    let p_00 = 1.0 - 4.0 * single + 2.0 * (p_opp + p_same);
    Ok(ProbabilityTable {
        eta,
        p_pm: p_opp,
        p_mp: p_opp,
        p_pp: p_same,
        p_mm: p_same,
        p_p0: p_plus0,
        p_m0: p_plus0,
        p_0p: p_plus0,
        p_0m: p_plus0,
        p_00,
        p1_plus: single,
        p1_minus: single,
        p2_plus: single,
        p2_minus: single,
    })
}
