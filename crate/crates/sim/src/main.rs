use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use singlet_sim::config::{
    mode_name, parse_angle_list, parse_kappa_list, parse_mode, ModelKind, OutputFormat, RunConfig,
};
use singlet_sim::experiment::{
    chsh_experiment, oracle_table, run_experiment, sweep_kappa, BivectorDetail, ChshReport,
    CorrelationRecord,
};
use singlet_sim::report::{render_oracle, render_records, write_with_sidecar};

/// Event-by-event singlet correlation simulator with a quadrature oracle.
#[derive(Parser, Debug)]
#[command(name = "singlet-sim", version, about)]
struct Cli {
    /// Optional key=value config file; flags override its entries.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Hidden-variable model to run.
    #[arg(long, value_enum)]
    model: Option<ModelKind>,

    /// Strength constant: 0 linear, 1 quantum, >1 supra-quantum, -1 mirrored.
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,

    /// Detection semantics: per-station or paired-filter.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<singlet_core::DetectionMode>,

    /// Trials per grid angle.
    #[arg(long)]
    trials: Option<u64>,

    /// Base seed for the counter-based random streams.
    #[arg(long)]
    seed: Option<u64>,

    /// Number of grid angles between 0 and pi inclusive.
    #[arg(long)]
    grid_points: Option<usize>,

    /// Also evaluate the CHSH statistic at the configured detector angles.
    #[arg(long)]
    chsh: bool,

    /// CHSH detector angles a,a',b,b' in radians.
    #[arg(long, allow_hyphen_values = true, value_name = "A,A',B,B'")]
    chsh_angles: Option<String>,

    /// Run the grid once per comma-separated kappa and classify each run.
    #[arg(long, allow_hyphen_values = true, value_name = "K1,K2,...")]
    sweep_kappa: Option<String>,

    /// Emit the quadrature oracle table only; no Monte Carlo.
    #[arg(long)]
    oracle_only: bool,

    /// Write the report here (plus a .plot.py sidecar); stdout otherwise.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,

    /// Trials per random-stream chunk (reproducibility granularity).
    #[arg(long)]
    chunk_size: Option<u64>,

    /// Worker threads; results are identical for every value.
    #[arg(long)]
    workers: Option<usize>,
}

impl Cli {
    fn into_config(self) -> Result<(RunConfig, Actions), Box<dyn std::error::Error>> {
        let mut config = RunConfig::default();
        if let Some(path) = &self.config {
            config.apply_file(path)?;
        }
        if let Some(v) = self.model {
            config.model = v;
        }
        if let Some(v) = self.kappa {
            config.kappa = v;
        }
        if let Some(v) = self.mode {
            config.mode = v;
        }
        if let Some(v) = self.trials {
            config.trials = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.grid_points {
            config.grid_points = v;
        }
        if let Some(v) = &self.chsh_angles {
            config.chsh_angles = parse_angle_list(v)?;
        }
        if let Some(v) = self.format {
            config.output_format = v;
        }
        if let Some(v) = self.chunk_size {
            config.chunk_size = v;
        }
        if let Some(v) = self.workers {
            config.workers = Some(v);
        }
        config.validate()?;
        let sweep = self.sweep_kappa.as_deref().map(parse_kappa_list).transpose()?;
        let actions = Actions {
            chsh: self.chsh,
            oracle_only: self.oracle_only,
            sweep,
            output: self.output,
        };
        Ok((config, actions))
    }
}

struct Actions {
    chsh: bool,
    oracle_only: bool,
    sweep: Option<Vec<f64>>,
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = err.source();
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    let (config, actions) = cli.into_config()?;
    print_banner(&config);

    if actions.oracle_only {
        let rows = oracle_table(&config)?;
        let body = render_oracle(&rows, config.output_format)?;
        match &actions.output {
            Some(path) => {
                std::fs::write(path, &body)?;
                println!("wrote oracle table to {}", path.display());
            }
            None => print!("{body}"),
        }
        return Ok(());
    }

    if let Some(kappas) = &actions.sweep {
        let runs = sweep_kappa(&config, kappas)?;
        for run in &runs {
            println!(
                "kappa = {:>6}: CHSH = {:.5} ({} 2 sqrt(2) = {:.5}) -> {}",
                run.kappa,
                run.chsh.statistic,
                if run.chsh.statistic > singlet_sim::experiment::TSIRELSON_BOUND {
                    "above"
                } else {
                    "at or below"
                },
                singlet_sim::experiment::TSIRELSON_BOUND,
                run.chsh.class,
            );
            if let Some(base) = &actions.output {
                let path = kappa_path(base, run.kappa);
                let body = render_records(&run.records, config.output_format)?;
                write_with_sidecar(&body, config.output_format, &path)?;
                println!("  wrote {}", path.display());
            }
        }
        return Ok(());
    }

    let output = run_experiment(&config)?;
    print_records(&output.records);
    if let Some(detail) = &output.bivector_detail {
        print_bivector_detail(detail);
    }

    if actions.chsh {
        let report = chsh_experiment(&config)?;
        print_chsh(&report);
    }

    if let Some(path) = &actions.output {
        let body = render_records(&output.records, config.output_format)?;
        write_with_sidecar(&body, config.output_format, path)?;
        println!(
            "wrote {} and {}",
            path.display(),
            singlet_sim::report::sidecar_path(path).display()
        );
    }
    Ok(())
}

fn kappa_path(base: &Path, kappa: f64) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = base.extension().map(|s| s.to_string_lossy().into_owned());
    let name = match ext {
        Some(ext) => format!("{stem}_kappa_{kappa}.{ext}"),
        None => format!("{stem}_kappa_{kappa}"),
    };
    base.with_file_name(name)
}

fn print_banner(config: &RunConfig) {
    println!(
        "singlet-sim: model={} kappa={} mode={} trials={} seed={:#x} chunk={} grid={}",
        match config.model {
            ModelKind::Constraint => "constraint",
            ModelKind::Bivector => "bivector",
        },
        config.kappa,
        mode_name(config.mode),
        config.trials,
        config.seed,
        config.chunk_size,
        config.grid_points,
    );
}

fn print_records(records: &[CorrelationRecord]) {
    println!(
        "{:>8}  {:>8}  {:>10}  {:>9}  {:>10}  {:>10}",
        "eta", "g", "E_mc", "stderr", "E_oracle", "E_quantum"
    );
    for r in records {
        println!(
            "{:>8.4}  {:>8.4}  {:>10.6}  {:>9.6}  {:>10.6}  {:>10.6}",
            r.eta, r.g, r.e_mc, r.e_stderr, r.e_oracle, r.e_quantum
        );
    }
}

fn print_bivector_detail(detail: &[BivectorDetail]) {
    println!();
    println!("bivector model: both averages, side by side");
    println!(
        "{:>8}  {:>18}  {:>16}  {:>12}",
        "eta", "pointwise <A.B>", "scalar <L L>_0", "mean lambda"
    );
    for d in detail {
        println!(
            "{:>8.4}  {:>18.6}  {:>16.6}  {:>12.6}",
            d.eta, d.pointwise_product, d.scalar_part, d.mean_lambda
        );
    }
}

fn print_chsh(report: &ChshReport) {
    let [a, ap, b, bp] = report.angles;
    let [e_ab, e_abp, e_apb, e_apbp] = report.correlations;
    println!();
    println!("CHSH at angles a={a:.5} a'={ap:.5} b={b:.5} b'={bp:.5}");
    println!("  E(a,b) = {e_ab:+.6}  E(a,b') = {e_abp:+.6}  E(a',b) = {e_apb:+.6}  E(a',b') = {e_apbp:+.6}");
    println!(
        "  S = |E(a,b) + E(a,b') + E(a',b) - E(a',b')| = {:.6}  -> {}",
        report.statistic, report.class
    );
}
