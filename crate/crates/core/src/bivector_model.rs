//! The Clifford-algebraic singlet model.
//!
//! The only hidden variable is the handedness `lambda` of the frame, a fair
//! coin per emitted pair. Station outcomes are the scalar limits of spin
//! bivectors meeting detector bivectors, so the pointwise outcome product is
//! identically -1. The paired-product chain instead accumulates the
//! multivector `-a.b - lambda^k D(a x b)` per trial: its scalar part is
//! exactly `-a.b` while the bivector coefficient is the running mean of
//! `lambda`, decaying as 1/sqrt(n). Both averages are first-class results;
//! neither is preferred here.

use rand::Rng;
use thiserror::Error;

use crate::ga::{detector_bivector, spin_bivector, Orientation, UnitVector3};
use crate::stream::{run_chunked, ChunkPlan};

#[derive(Debug, Error, PartialEq)]
pub enum BivectorModelError {
    #[error("empty experiment: at least one trial is required")]
    EmptyExperiment,
    #[error("correlation input {value} outside [-1, 1]")]
    CorrelationOutOfRange { value: f64 },
}

/// One orientation draw with its trial index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrientationSample {
    pub lambda: Orientation,
    pub index: u64,
}

pub fn sample_orientation<R: Rng>(rng: &mut R) -> Orientation {
    if rng.gen::<bool>() {
        Orientation::Plus
    } else {
        Orientation::Minus
    }
}

/// Alice's outcome: the scalar limit `lim_{s->a} {-D(a) L(s, lambda)}`,
/// evaluated by the geometric product at `s = a`; equals `lambda`.
pub fn outcome_a(a: UnitVector3, lambda: Orientation) -> i8 {
    let m = -(detector_bivector(a) * spin_bivector(a, lambda));
    debug_assert!(
        (m.scalar_part() - lambda.sign()).abs() < 1e-12
            && m.norm() - m.scalar_part().abs() < 1e-12,
        "product did not collapse to the scalar lambda: {m:?}"
    );
    if m.scalar_part() >= 0.0 {
        1
    } else {
        -1
    }
}

/// Bob's outcome: `lim_{s->b} {+L(s, lambda) D(b)}`; equals `-lambda`.
pub fn outcome_b(b: UnitVector3, lambda: Orientation) -> i8 {
    let m = spin_bivector(b, lambda) * detector_bivector(b);
    debug_assert!(
        (m.scalar_part() + lambda.sign()).abs() < 1e-12
            && m.norm() - m.scalar_part().abs() < 1e-12,
        "product did not collapse to the scalar -lambda: {m:?}"
    );
    if m.scalar_part() >= 0.0 {
        1
    } else {
        -1
    }
}

/// Sums of the per-trial multivector `-a.b - lambda^k D(a x b)` and of the
/// two scalar series (`lambda^k` and the pointwise outcome product).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PairedProductAccumulator {
    pub scalar_sum: f64,
    /// Coefficients on (e_y^e_z, e_z^e_x, e_x^e_y).
    pub bivector_sums: [f64; 3],
    pub lambda_sum: f64,
    pub outcome_product_sum: i64,
    pub count: u64,
}

impl PairedProductAccumulator {
    pub fn record(&mut self, dot: f64, cross: [f64; 3], lambda: Orientation, product: i8) {
        let s = lambda.sign();
        self.scalar_sum += -dot;
        for (acc, c) in self.bivector_sums.iter_mut().zip(cross) {
            *acc += -s * c;
        }
        self.lambda_sum += s;
        self.outcome_product_sum += i64::from(product);
        self.count += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        self.scalar_sum += other.scalar_sum;
        for (acc, c) in self.bivector_sums.iter_mut().zip(other.bivector_sums) {
            *acc += c;
        }
        self.lambda_sum += other.lambda_sum;
        self.outcome_product_sum += other.outcome_product_sum;
        self.count += other.count;
    }
}

/// Averages of one paired-product run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedProductAverage {
    /// Mean scalar part; exactly `-a.b` for every lambda sequence.
    pub scalar: f64,
    /// Mean bivector coefficients on (e_y^e_z, e_z^e_x, e_x^e_y); equals
    /// `-bivector_coeff * (a x b)` componentwise.
    pub bivector: [f64; 3],
    /// The running mean of lambda: the coefficient multiplying `-D(a x b)`
    /// in the accumulated product. CLT-bounded by ~1/sqrt(n).
    pub bivector_coeff: f64,
    /// Mean of the pointwise outcome products `A^k B^k`; identically -1.
    pub outcome_product: f64,
    pub trials: u64,
    /// Count of lambda = +1 draws (for outcome tallies).
    pub plus_count: u64,
}

/// Runs `plan.trials` fair-coin orientation draws and averages the paired
/// spin product along `(a, b)`. Chunk layout per [`crate::stream`]; merging
/// is in chunk order, so results are bit-identical for any worker count.
pub fn paired_product_average(
    a: &UnitVector3,
    b: &UnitVector3,
    plan: &ChunkPlan,
) -> Result<PairedProductAverage, BivectorModelError> {
    if plan.trials == 0 {
        return Err(BivectorModelError::EmptyExperiment);
    }
    let dot = a.dot(b);
    let cross = a.cross(b);
    let chunks = run_chunked(plan, |rng, len| {
        let mut acc = PairedProductAccumulator::default();
        for _ in 0..len {
            let lambda = sample_orientation(rng);
            let product = outcome_a(*a, lambda) * outcome_b(*b, lambda);
            acc.record(dot, cross, lambda, product);
        }
        acc
    });
    let mut total = PairedProductAccumulator::default();
    for chunk in &chunks {
        total.merge(chunk);
    }
    let n = total.count as f64;
    Ok(PairedProductAverage {
        scalar: total.scalar_sum / n,
        bivector: total.bivector_sums.map(|s| s / n),
        bivector_coeff: total.lambda_sum / n,
        outcome_product: total.outcome_product_sum as f64 / n,
        trials: total.count,
        plus_count: ((total.count as i64 + total.lambda_sum as i64) / 2) as u64,
    })
}

/// CHSH statistic `|E(a,b) + E(a,b') + E(a',b) - E(a',b')|`.
pub fn chsh_statistic(
    e_ab: f64,
    e_abp: f64,
    e_apb: f64,
    e_apbp: f64,
) -> Result<f64, BivectorModelError> {
    for value in [e_ab, e_abp, e_apb, e_apbp] {
        if !(value.is_finite() && (-1.0 - 1e-9..=1.0 + 1e-9).contains(&value)) {
            return Err(BivectorModelError::CorrelationOutOfRange { value });
        }
    }
    Ok((e_ab + e_abp + e_apb - e_apbp).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::{Multivector3, Orientation};
    use crate::stream::chunk_rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    const TOL: f64 = 1e-12;

    #[test]
    fn outcome_case_tables() {
        let a = UnitVector3::new(0.1, -0.8, 0.5).unwrap();
        assert_eq!(outcome_a(a, Orientation::Plus), 1);
        assert_eq!(outcome_a(a, Orientation::Minus), -1);
        assert_eq!(outcome_b(a, Orientation::Plus), -1);
        assert_eq!(outcome_b(a, Orientation::Minus), 1);
    }

    #[test]
    fn outcome_product_is_minus_one_for_any_direction() {
        let mut rng = chunk_rng(8, 0);
        for _ in 0..100 {
            let n = crate::stream::sample_unit_vector(&mut rng);
            for lambda in [Orientation::Plus, Orientation::Minus] {
                assert_eq!(outcome_a(n, lambda) * outcome_b(n, lambda), -1);
            }
        }
    }

    #[test]
    fn outcome_mean_vanishes_for_fair_coin() {
        let mut rng = chunk_rng(5150, 0);
        let a = UnitVector3::z_axis();
        let n = 1_000_000;
        let sum: i64 = (0..n)
            .map(|_| i64::from(outcome_a(a, sample_orientation(&mut rng))))
            .sum();
        assert!((sum as f64 / n as f64).abs() < 3e-3);
    }

    #[test]
    fn conservation_condition_is_pure_scalar() {
        let mut rng = chunk_rng(31, 0);
        for _ in 0..200 {
            let s = crate::stream::sample_unit_vector(&mut rng);
            for lambda in [Orientation::Plus, Orientation::Minus] {
                let l = spin_bivector(s, lambda);
                assert!((l * l).max_abs_diff(&Multivector3::scalar(-1.0)) < TOL);
            }
        }
    }

    #[test]
    fn limit_of_product_equals_product_of_limits() {
        // -D(a) L(a,l) L(b,l) D(b) collapses to the same scalar as the
        // product of the separately evaluated station outcomes.
        let mut rng = chunk_rng(77, 0);
        for _ in 0..200 {
            let a = crate::stream::sample_unit_vector(&mut rng);
            let b = crate::stream::sample_unit_vector(&mut rng);
            for lambda in [Orientation::Plus, Orientation::Minus] {
                let chained = -(detector_bivector(a)
                    * spin_bivector(a, lambda)
                    * spin_bivector(b, lambda)
                    * detector_bivector(b));
                let pointwise = f64::from(outcome_a(a, lambda) * outcome_b(b, lambda));
                assert!(
                    chained
                        .max_abs_diff(&Multivector3::scalar(pointwise))
                        < TOL
                );
            }
        }
    }

    #[test]
    fn paired_average_collinear() {
        let a = UnitVector3::new(0.6, 0.0, 0.8).unwrap();
        let plan = ChunkPlan::new(10_000, 512, 3).unwrap();
        let avg = paired_product_average(&a, &a, &plan).unwrap();
        assert!((avg.scalar + 1.0).abs() < TOL);
        assert_eq!(avg.bivector, [0.0; 3]);
        assert_eq!(avg.outcome_product, -1.0);
        // bivector_coeff is the mean lambda even when a x b = 0.
        let lambda_sum = avg.plus_count as f64 - (avg.trials - avg.plus_count) as f64;
        assert!((lambda_sum / avg.trials as f64 - avg.bivector_coeff).abs() < TOL);
    }

    #[test]
    fn paired_average_orthogonal() {
        let a = UnitVector3::x_axis();
        let b = UnitVector3::y_axis();
        let plan = ChunkPlan::new(1_000_000, 65_536, 40).unwrap();
        let avg = paired_product_average(&a, &b, &plan).unwrap();
        assert_eq!(avg.scalar, 0.0); // -a.b = -0.0 exactly
        assert!(avg.bivector_coeff.abs() <= 3e-3);
        // accumulated bivector = -mean_lambda * (a x b) = (0, 0, -mean).
        assert!((avg.bivector[2] + avg.bivector_coeff).abs() < TOL);
        assert_eq!(avg.outcome_product, -1.0);
    }

    #[test]
    fn paired_average_half_overlap_scalar_is_exact() {
        let a = UnitVector3::z_axis();
        // b with b.z = 0.5 exactly, so a.b = 0.5 with no rounding.
        let b = UnitVector3::from_unit_unchecked(0.75f64.sqrt(), 0.0, 0.5);
        let plan = ChunkPlan::new(4_096, 256, 9).unwrap();
        let avg = paired_product_average(&a, &b, &plan).unwrap();
        assert_eq!(avg.scalar, -0.5);
    }

    #[test]
    fn paired_average_rejects_empty() {
        let plan = ChunkPlan { trials: 0, chunk_size: 16, seed: 0, stream_offset: 0 };
        assert_eq!(
            paired_product_average(&UnitVector3::x_axis(), &UnitVector3::y_axis(), &plan),
            Err(BivectorModelError::EmptyExperiment)
        );
    }

    #[test]
    fn chsh_examples() {
        // Quantum correlations at the saturating angle layout:
        // a = 0, a' = pi/2, b = pi/4, b' = -pi/4.
        let e = |eta: f64| -eta.cos();
        let s = chsh_statistic(
            e(FRAC_PI_4),
            e(FRAC_PI_4),
            e(FRAC_PI_4),
            e(3.0 * FRAC_PI_4),
        )
        .unwrap();
        assert!((s - 2.0 * 2.0f64.sqrt()).abs() < TOL);

        // Equal inputs: 2|e| <= 2.
        let s = chsh_statistic(0.4, 0.4, 0.4, 0.4).unwrap();
        assert!((s - 0.8).abs() < TOL);

        // Linear model at the same angles gives exactly 2.
        let lin = |eta: f64| -1.0 + 2.0 * eta / PI;
        let s = chsh_statistic(
            lin(FRAC_PI_4),
            lin(FRAC_PI_4),
            lin(FRAC_PI_4),
            lin(3.0 * FRAC_PI_4),
        )
        .unwrap();
        assert!((s - 2.0).abs() < TOL);

        assert!(chsh_statistic(1.5, 0.0, 0.0, 0.0).is_err());
    }
}
