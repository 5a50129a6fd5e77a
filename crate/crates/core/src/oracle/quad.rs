//! Adaptive Gauss-Kronrod quadrature with interval bisection.
//!
//! A (G7, K15) pair estimates each interval; intervals whose |K15 - G7|
//! discrepancy exceeds the local budget are bisected with the budget split
//! in half. The scheme is robust to the square-root endpoint behavior of
//! the cap-overlap integrand because refinement concentrates at the
//! offending endpoint while the smooth interior terminates early.

use thiserror::Error;

/// Positive K15 abscissae, descending; even indices are the embedded G7 nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// K15 weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// G7 weights for the nodes at odd XGK indices (1, 3, 5) plus the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Absolute-tolerance / recursion-depth budget for one integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl QuadratureSettings {
    /// Inner (cap-overlap) budget.
    pub fn inner_default() -> Self {
        Self { abs_tol: 1e-9, max_depth: 60 }
    }

    /// Outer (radial / angular) budget.
    pub fn outer_default() -> Self {
        Self { abs_tol: 1e-8, max_depth: 60 }
    }
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self::outer_default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge at max depth: estimate {estimate}, residual {residual:e}")]
    DepthExceeded { estimate: f64, residual: f64 },
    #[error("quadrature tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
}

/// One (G7, K15) evaluation over `[a, b]`: returns the K15 value and the
/// |K15 - G7| discrepancy used as the local error gauge.
fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let fsum = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

struct Partial {
    value: f64,
    residual: f64,
    exhausted: bool,
}

fn bisect<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Partial {
    let (value, residual) = gauss_kronrod_15(f, a, b);
    if residual <= tol || (b - a).abs() < f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
        return Partial { value, residual, exhausted: false };
    }
    if depth == 0 {
        return Partial { value, residual, exhausted: true };
    }
    let mid = 0.5 * (a + b);
    let left = bisect(f, a, mid, 0.5 * tol, depth - 1);
    let right = bisect(f, mid, b, 0.5 * tol, depth - 1);
    Partial {
        value: left.value + right.value,
        residual: left.residual + right.residual,
        exhausted: left.exhausted || right.exhausted,
    }
}

/// Integrates `f` over `[a, b]` to the requested absolute tolerance.
///
/// A degenerate range (`a == b`) integrates to zero. Non-convergence at
/// `max_depth` returns the best estimate together with its residual.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<Quadrature, QuadError> {
    if settings.abs_tol <= 0.0 {
        return Err(QuadError::NonPositiveTolerance(settings.abs_tol));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error_estimate: 0.0 });
    }
    let partial = bisect(f, a, b, settings.abs_tol, settings.max_depth);
    if partial.exhausted && partial.residual > settings.abs_tol {
        return Err(QuadError::DepthExceeded {
            estimate: partial.value,
            residual: partial.residual,
        });
    }
    Ok(Quadrature { value: partial.value, error_estimate: partial.residual })
}
