use clap::{Parser, Subcommand, ValueEnum};
use evoc::harness::{
    self, CliOverrides, ComparisonReport, ExperimentConfig, HarnessError, VariantResult,
};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "evoc",
    version,
    about = "Agent-based invention/imitation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Toggle {
    On,
    Off,
}

impl From<Toggle> for bool {
    fn from(t: Toggle) -> bool {
        matches!(t, Toggle::On)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured variant and write aggregate CSV/JSON (and SVG) outputs
    Run {
        /// Experiment config (JSON; `{}` is the default experiment)
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed (replicate k runs with seed + k)
        #[arg(long)]
        seed: Option<u64>,
        /// Replicates per variant
        #[arg(long)]
        replicates: Option<usize>,
        /// Iterations per run
        #[arg(long)]
        iterations: Option<usize>,
        /// Force self-regulation on or off for every variant
        #[arg(long, value_enum)]
        sr: Option<Toggle>,
        /// Force chaining on or off for every variant
        #[arg(long, value_enum)]
        chaining: Option<Toggle>,
        /// Worker threads (default: available parallelism)
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the paired sr_on vs sr_off comparison and write compare_report.json
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Exhaustively verify the single-action optima under both head rules
    Oracle {
        /// Print the report as JSON instead of text
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn real_main() -> Result<(), HarnessError> {
    match Cli::parse().command {
        Command::Run {
            config,
            out,
            seed,
            replicates,
            iterations,
            sr,
            chaining,
            jobs,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.apply_cli(&CliOverrides {
                out,
                seed,
                replicates,
                iterations,
                sr: sr.map(bool::from),
                chaining: chaining.map(bool::from),
                jobs,
            });
            let started = Instant::now();
            let results = harness::run_experiment(&cfg)?;
            let written = harness::write_outputs(&cfg, &results)?;
            print_run_summary(&results, started);
            for path in written {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Compare { config, out, jobs } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.apply_cli(&CliOverrides {
                out,
                jobs,
                ..Default::default()
            });
            let started = Instant::now();
            let (report, results) = harness::compare_sr(&cfg)?;
            harness::write_outputs(&cfg, &results)?;
            let path = harness::write_comparison(&cfg, &report)?;
            print_run_summary(&results, started);
            print_comparison(&report);
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Oracle { json } => {
            let report = harness::verify_oracle();
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serialize")
                );
            } else {
                print_oracle(&report);
            }
            if report.passed {
                Ok(())
            } else {
                Err(HarnessError::Oracle(format!(
                    "default head rule yielded max {} with {} optima, expected 10 with 8",
                    report.prose.max_fitness, report.prose.optimum_count
                )))
            }
        }
    }
}

fn print_run_summary(results: &[VariantResult], started: Instant) {
    for r in results {
        let last = r
            .aggregate
            .records
            .last()
            .expect("at least the initial record");
        println!(
            "{}: replicates={} iterations={} final mean fitness={:.4} final diversity={:.1}",
            r.name,
            r.aggregate.replicates,
            r.params.iterations,
            last.mean_fitness.mean,
            last.diversity.mean,
        );
    }
    println!("elapsed {:.2}s", started.elapsed().as_secs_f64());
}

fn print_comparison(report: &ComparisonReport) {
    println!(
        "final mean fitness: sr_on={:.4} sr_off={:.4} difference={:.4}",
        report.final_mean_fitness_sr_on, report.final_mean_fitness_sr_off, report.final_difference,
    );
    println!(
        "bootstrap 95% CI of the difference: [{:.4}, {:.4}]",
        report.bootstrap_ci_low, report.bootstrap_ci_high
    );
    println!(
        "diversity peaks: sr_on at iteration {} (value {:.1}), sr_off at iteration {} (value {:.1})",
        report.sr_on_diversity_peak.iteration,
        report.sr_on_diversity_peak.value,
        report.sr_off_diversity_peak.iteration,
        report.sr_off_diversity_peak.value,
    );
    println!(
        "sr_on final segregation: imitators={:.3} creators={:.3} total={:.3}",
        report.sr_on_final_frac_imitators,
        report.sr_on_final_frac_creators,
        report.sr_on_final_segregation,
    );
}

fn print_oracle(report: &harness::OracleReport) {
    for (name, rule) in [("prose", &report.prose), ("literal", &report.literal)] {
        println!(
            "{name} head rule: max fitness {} with {} optima",
            rule.max_fitness, rule.optimum_count
        );
        println!("  optima: {}", rule.optima.join(" "));
    }
    println!(
        "oracle verification: {}",
        if report.passed { "PASS" } else { "FAIL" }
    );
}
