//! Experiment drivers: angle-grid runs, CHSH runs, and kappa sweeps, with
//! the quadrature oracle and quantum closed form attached to every record.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use singlet_core::bivector_model::{self, BivectorModelError};
use singlet_core::constraint::{self, ModelError, ModelParams};
use singlet_core::oracle::{self, OracleError, QuadratureSettings};
use singlet_core::{ChunkPlan, StreamError, UnitVector3};
use thiserror::Error;

use crate::config::{ModelKind, RunConfig};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bivector(#[from] BivectorModelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error("empty angle grid")]
    EmptyGrid,
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

/// One per-angle aggregate: the nine outcome counts, the coincidence
/// fraction, and the three correlation columns (Monte Carlo, quadrature
/// oracle, quantum closed form).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub eta: f64,
    #[serde(rename = "N_pp")]
    pub n_pp: u64,
    #[serde(rename = "N_pm")]
    pub n_pm: u64,
    #[serde(rename = "N_mp")]
    pub n_mp: u64,
    #[serde(rename = "N_mm")]
    pub n_mm: u64,
    #[serde(rename = "N_p0")]
    pub n_p0: u64,
    #[serde(rename = "N_m0")]
    pub n_m0: u64,
    #[serde(rename = "N_0p")]
    pub n_0p: u64,
    #[serde(rename = "N_0m")]
    pub n_0m: u64,
    #[serde(rename = "N_00")]
    pub n_00: u64,
    pub g: f64,
    #[serde(rename = "E_mc")]
    pub e_mc: f64,
    #[serde(rename = "E_stderr")]
    pub e_stderr: f64,
    #[serde(rename = "E_oracle")]
    pub e_oracle: f64,
    #[serde(rename = "E_quantum")]
    pub e_quantum: f64,
}

impl CorrelationRecord {
    pub fn counts_total(&self) -> u64 {
        self.n_pp
            + self.n_pm
            + self.n_mp
            + self.n_mm
            + self.n_p0
            + self.n_m0
            + self.n_0p
            + self.n_0m
            + self.n_00
    }
}

/// Bivector-model companions to a [`CorrelationRecord`]. The model admits
/// two readings of the expectation value: the pointwise outcome-product
/// average (identically -1) and the quaternionic scalar-part average
/// (-a.b). Both are reported side by side; neither is preferred.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BivectorDetail {
    pub eta: f64,
    /// Mean of A^k B^k over the run; -1 by construction.
    pub pointwise_product: f64,
    /// Mean scalar part of the paired spin product; exactly -a.b.
    pub scalar_part: f64,
    /// Mean lambda (coefficient on -D(a x b)); decays as 1/sqrt(n).
    pub mean_lambda: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<CorrelationRecord>,
    /// Present for bivector-model runs only.
    pub bivector_detail: Option<Vec<BivectorDetail>>,
}

/// Runs `body` inside a rayon pool of the requested size (or the global
/// pool when `workers` is `None`). Results do not depend on the choice.
pub fn with_workers<T: Send>(
    workers: Option<usize>,
    body: impl FnOnce() -> T + Send,
) -> Result<T, ExperimentError> {
    match workers {
        None => Ok(body()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ExperimentError::Pool(e.to_string()))
            .map(|pool| pool.install(body)),
    }
}

fn chunks_per_run(config: &RunConfig) -> u64 {
    config.trials.div_ceil(config.chunk_size)
}

fn plan_for(config: &RunConfig, slot: u64) -> Result<ChunkPlan, StreamError> {
    ChunkPlan::with_offset(
        config.trials,
        config.chunk_size,
        config.seed,
        slot * chunks_per_run(config),
    )
}

/// Runs the configured model over the angle grid. Detector `a` sits at the
/// reference direction (angle 0 in the x-z plane) and `b` at each grid
/// angle; every row gets its own disjoint set of random streams, so the
/// output is a pure function of `(config, seed, chunk_size)`.
pub fn run_experiment(config: &RunConfig) -> Result<ExperimentOutput, ExperimentError> {
    config.validate()?;
    with_workers(config.workers, || run_experiment_inner(config))?
}

fn run_experiment_inner(config: &RunConfig) -> Result<ExperimentOutput, ExperimentError> {
    let grid = config.angle_grid();
    if grid.is_empty() {
        return Err(ExperimentError::EmptyGrid);
    }
    let quad = QuadratureSettings::outer_default();
    let a = UnitVector3::from_xz_angle(0.0);
    match config.model {
        ModelKind::Constraint => {
            let params = ModelParams::new(config.kappa, config.mode)?;
            let mut records = Vec::with_capacity(grid.len());
            for (slot, &eta) in grid.iter().enumerate() {
                let b = UnitVector3::from_xz_angle(eta);
                let plan = plan_for(config, slot as u64)?;
                let counts = constraint::run_trials(&a, &b, &params, &plan)?;
                let corr = counts.correlation()?;
                records.push(CorrelationRecord {
                    eta,
                    n_pp: counts.pp,
                    n_pm: counts.pm,
                    n_mp: counts.mp,
                    n_mm: counts.mm,
                    n_p0: counts.p0,
                    n_m0: counts.m0,
                    n_0p: counts.zp,
                    n_0m: counts.zm,
                    n_00: counts.zz,
                    g: counts.g(),
                    e_mc: corr.value,
                    e_stderr: corr.std_error,
                    e_oracle: oracle::model_correlation(eta, config.kappa, &quad)?,
                    e_quantum: -eta.cos(),
                });
            }
            Ok(ExperimentOutput { records, bivector_detail: None })
        }
        ModelKind::Bivector => {
            let mut records = Vec::with_capacity(grid.len());
            let mut detail = Vec::with_capacity(grid.len());
            for (slot, &eta) in grid.iter().enumerate() {
                let b = UnitVector3::from_xz_angle(eta);
                let plan = plan_for(config, slot as u64)?;
                let avg = bivector_model::paired_product_average(&a, &b, &plan)?;
                records.push(CorrelationRecord {
                    eta,
                    n_pp: 0,
                    n_pm: avg.plus_count,
                    n_mp: avg.trials - avg.plus_count,
                    n_mm: 0,
                    n_p0: 0,
                    n_m0: 0,
                    n_0p: 0,
                    n_0m: 0,
                    n_00: 0,
                    g: 1.0,
                    e_mc: avg.scalar,
                    e_stderr: 0.0,
                    e_oracle: -a.dot(&b),
                    e_quantum: -eta.cos(),
                });
                detail.push(BivectorDetail {
                    eta,
                    pointwise_product: avg.outcome_product,
                    scalar_part: avg.scalar,
                    mean_lambda: avg.bivector_coeff,
                });
            }
            Ok(ExperimentOutput { records, bivector_detail: Some(detail) })
        }
    }
}

/// How a kappa run is classified from its CHSH statistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationClass {
    Cosine,
    Linear,
    SupraQuantum,
    Intermediate,
}

impl std::fmt::Display for CorrelationClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CorrelationClass::Cosine => "cosine",
            CorrelationClass::Linear => "linear",
            CorrelationClass::SupraQuantum => "supra-quantum",
            CorrelationClass::Intermediate => "intermediate",
        })
    }
}

pub const TSIRELSON_BOUND: f64 = 2.828_427_124_746_190_3; // 2 sqrt(2)

/// Classification bands: past-Tsirelson by more than 0.05 is supra-quantum,
/// within 0.05 of 2 sqrt(2) is the cosine family, within 0.08 of 2 the
/// linear family. Monte Carlo noise at the default trial counts is an order
/// of magnitude below the band widths.
pub fn classify(chsh: f64) -> CorrelationClass {
    if chsh > TSIRELSON_BOUND + 0.05 {
        CorrelationClass::SupraQuantum
    } else if (chsh - TSIRELSON_BOUND).abs() <= 0.05 {
        CorrelationClass::Cosine
    } else if (chsh - 2.0).abs() <= 0.08 {
        CorrelationClass::Linear
    } else {
        CorrelationClass::Intermediate
    }
}

/// One CHSH evaluation: four pair correlations at the configured detector
/// angles and the statistic `|E(a,b) + E(a,b') + E(a',b) - E(a',b')|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChshReport {
    /// `(a, a', b, b')` in radians.
    pub angles: [f64; 4],
    /// Pair correlations in the order (a,b), (a,b'), (a',b), (a',b').
    pub correlations: [f64; 4],
    pub statistic: f64,
    pub class: CorrelationClass,
}

pub fn chsh_experiment(config: &RunConfig) -> Result<ChshReport, ExperimentError> {
    with_workers(config.workers, || chsh_inner(config))?
}

fn chsh_inner(config: &RunConfig) -> Result<ChshReport, ExperimentError> {
    let [a, ap, b, bp] = config.chsh_angles;
    let pairs = [(a, b), (a, bp), (ap, b), (ap, bp)];
    let mut correlations = [0.0f64; 4];
    for (slot, (alpha, beta)) in pairs.iter().enumerate() {
        let va = UnitVector3::from_xz_angle(*alpha);
        let vb = UnitVector3::from_xz_angle(*beta);
        let plan = plan_for(config, slot as u64)?;
        correlations[slot] = match config.model {
            ModelKind::Constraint => {
                let params = ModelParams::new(config.kappa, config.mode)?;
                constraint::run_trials(&va, &vb, &params, &plan)?
                    .correlation()?
                    .value
            }
            ModelKind::Bivector => {
                bivector_model::paired_product_average(&va, &vb, &plan)?.scalar
            }
        };
    }
    let statistic = bivector_model::chsh_statistic(
        correlations[0],
        correlations[1],
        correlations[2],
        correlations[3],
    )?;
    Ok(ChshReport {
        angles: config.chsh_angles,
        correlations,
        statistic,
        class: classify(statistic),
    })
}

/// One kappa's worth of a sweep: grid records plus the CHSH classification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaRun {
    pub kappa: f64,
    pub chsh: ChshReport,
    pub records: Vec<CorrelationRecord>,
}

/// Runs the grid experiment and a CHSH evaluation for each kappa.
pub fn sweep_kappa(config: &RunConfig, kappas: &[f64]) -> Result<Vec<KappaRun>, ExperimentError> {
    let mut runs = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let sub = RunConfig { kappa, ..config.clone() };
        sub.validate()?;
        let output = run_experiment(&sub)?;
        let chsh = chsh_experiment(&sub)?;
        runs.push(KappaRun { kappa, chsh, records: output.records });
    }
    Ok(runs)
}

/// Oracle-only table row: channel probabilities and correlations from
/// quadrature alone, no Monte Carlo.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRecord {
    pub eta: f64,
    pub p_opposite: f64,
    pub p_same: f64,
    pub p_single: f64,
    #[serde(rename = "E_oracle")]
    pub e_oracle: f64,
    #[serde(rename = "E_quantum")]
    pub e_quantum: f64,
}

pub fn oracle_table(config: &RunConfig) -> Result<Vec<OracleRecord>, ExperimentError> {
    let quad = QuadratureSettings::outer_default();
    let mut rows = Vec::with_capacity(config.grid_points);
    for eta in config.angle_grid() {
        let table = oracle::model_probability_table(eta, config.kappa, &quad)?;
        rows.push(OracleRecord {
            eta,
            p_opposite: table.p_pm,
            p_same: table.p_pp,
            p_single: table.p1_plus,
            e_oracle: oracle::model_correlation(eta, config.kappa, &quad)?,
            e_quantum: -eta.cos(),
        });
    }
    Ok(rows)
}

/// Linear-correlation reference `-1 + 2 eta / pi`.
pub fn linear_reference(eta: f64) -> f64 {
    -1.0 + 2.0 * eta / PI
}
