//! Experiment orchestration and I/O: configuration loading, parallel
//! replicate execution, the SR-vs-non-SR comparison, CSV/JSON/SVG emission
//! and the oracle verification command.
//!
//! Output files are a pure function of the configuration: no timestamps, no
//! machine identifiers, fixed float formatting. Wall-clock timing is printed
//! by the CLI, never written to a file.

use crate::chart;
use crate::fitness::{oracle_max_and_argmax, HeadRule};
use crate::metrics::{aggregate, diversity_peak, AggregateSeries, TimeSeries};
use crate::world::{SimParams, Simulation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Resamples drawn for the comparison confidence interval.
pub const BOOTSTRAP_RESAMPLES: usize = 10_000;

pub const SR_ON: &str = "sr_on";
pub const SR_OFF: &str = "sr_off";

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("oracle verification failed: {0}")]
    Oracle(String),
}

impl HarnessError {
    /// Process exit code: 1 config, 2 i/o, 3 oracle.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Io { .. } => 2,
            HarnessError::Oracle(_) => 3,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Partial parameter set; `None` fields fall back to the base.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamOverrides {
    pub grid_width: Option<usize>,
    pub grid_height: Option<usize>,
    pub iterations: Option<usize>,
    pub sr_enabled: Option<bool>,
    pub chaining_enabled: Option<bool>,
    pub p_change: Option<f64>,
    pub eta: Option<f64>,
    pub p_create_init: Option<f64>,
    pub fitness_head_rule: Option<crate::fitness::HeadRule>,
    pub chain_discount_rule: Option<crate::fitness::DiscountRule>,
    pub seed: Option<u64>,
}

impl ParamOverrides {
    pub fn apply(&self, base: SimParams) -> SimParams {
        SimParams {
            grid_width: self.grid_width.unwrap_or(base.grid_width),
            grid_height: self.grid_height.unwrap_or(base.grid_height),
            iterations: self.iterations.unwrap_or(base.iterations),
            sr_enabled: self.sr_enabled.unwrap_or(base.sr_enabled),
            chaining_enabled: self.chaining_enabled.unwrap_or(base.chaining_enabled),
            p_change: self.p_change.unwrap_or(base.p_change),
            eta: self.eta.unwrap_or(base.eta),
            p_create_init: self.p_create_init.unwrap_or(base.p_create_init),
            fitness_head_rule: self.fitness_head_rule.unwrap_or(base.fitness_head_rule),
            chain_discount_rule: self.chain_discount_rule.unwrap_or(base.chain_discount_rule),
            seed: self.seed.unwrap_or(base.seed),
        }
    }
}

/// One named parameter variation of the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub name: String,
    #[serde(default)]
    pub overrides: ParamOverrides,
}

impl Variant {
    pub fn new(name: &str, overrides: ParamOverrides) -> Self {
        Variant {
            name: name.to_string(),
            overrides,
        }
    }

    fn sr(name: &str, enabled: bool) -> Self {
        Variant::new(
            name,
            ParamOverrides {
                sr_enabled: Some(enabled),
                ..Default::default()
            },
        )
    }
}

/// A whole experiment: base parameters, replicate count, named variants.
///
/// Every field has a default, so an empty JSON document (`{}`) describes the
/// default world compared with and without self-regulation across 250
/// replicates. Replicate k of a variant runs with seed `base_seed + k`, so
/// equal-seeded variants form paired replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub base: SimParams,
    pub replicates: usize,
    pub variants: Vec<Variant>,
    pub output_dir: PathBuf,
    /// Also render SVG line charts of the aggregates.
    pub charts: bool,
    /// Worker threads for replicate execution; `None` = available parallelism.
    pub jobs: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            base: SimParams::default(),
            replicates: 250,
            variants: vec![Variant::sr(SR_ON, true), Variant::sr(SR_OFF, false)],
            output_dir: PathBuf::from("out"),
            charts: true,
            jobs: None,
        }
    }
}

/// Command-line overrides; applied on top of the loaded config. The sr /
/// chaining / seed / iterations toggles force the setting for every variant.
#[derive(Debug, Clone, Default)]
pub struct CliOverrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub iterations: Option<usize>,
    pub sr: Option<bool>,
    pub chaining: Option<bool>,
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply_cli(&mut self, cli: &CliOverrides) {
        if let Some(out) = &cli.out {
            self.output_dir = out.clone();
        }
        if let Some(jobs) = cli.jobs {
            self.jobs = Some(jobs);
        }
        if let Some(replicates) = cli.replicates {
            self.replicates = replicates;
        }
        if let Some(seed) = cli.seed {
            self.base.seed = seed;
            for v in &mut self.variants {
                v.overrides.seed = None;
            }
        }
        if let Some(iterations) = cli.iterations {
            self.base.iterations = iterations;
            for v in &mut self.variants {
                v.overrides.iterations = None;
            }
        }
        if let Some(sr) = cli.sr {
            self.base.sr_enabled = sr;
            for v in &mut self.variants {
                v.overrides.sr_enabled = Some(sr);
            }
        }
        if let Some(chaining) = cli.chaining {
            self.base.chaining_enabled = chaining;
            for v in &mut self.variants {
                v.overrides.chaining_enabled = Some(chaining);
            }
        }
    }

    pub fn resolved_params(&self, variant: &Variant) -> SimParams {
        variant.overrides.apply(self.base)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.replicates == 0 {
            return Err(HarnessError::Config("replicates must be at least 1".into()));
        }
        if self.variants.is_empty() {
            return Err(HarnessError::Config(
                "config must define at least one variant".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for variant in &self.variants {
            if variant.name.is_empty()
                || !variant
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(HarnessError::Config(format!(
                    "variant name {:?} must be non-empty and use only [A-Za-z0-9_-]",
                    variant.name
                )));
            }
            if !seen.insert(variant.name.as_str()) {
                return Err(HarnessError::Config(format!(
                    "duplicate variant name {:?}",
                    variant.name
                )));
            }
            self.resolved_params(variant)
                .validate()
                .map_err(|e| HarnessError::Config(format!("variant {:?}: {e}", variant.name)))?;
        }
        Ok(())
    }
}

/// One variant's resolved parameters, raw replicate series and aggregate.
#[derive(Debug, Clone)]
pub struct VariantResult {
    pub name: String,
    pub params: SimParams,
    pub series: Vec<TimeSeries>,
    pub aggregate: AggregateSeries,
}

/// Runs `replicates` independent seeded runs of one parameter set.
/// `jobs = 0` uses all available parallelism; results are keyed by replicate
/// index, so the output never depends on completion order.
pub fn run_variant(
    params: SimParams,
    replicates: usize,
    jobs: usize,
) -> Result<Vec<TimeSeries>, HarnessError> {
    params
        .validate()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
    let series: Result<Vec<TimeSeries>, _> = pool.install(|| {
        (0..replicates as u64)
            .into_par_iter()
            .map(|k| {
                Simulation::run(SimParams {
                    seed: params.seed.wrapping_add(k),
                    ..params
                })
            })
            .collect()
    });
    series.map_err(|e| HarnessError::Config(e.to_string()))
}

/// Executes every variant of the experiment and aggregates each batch.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<VariantResult>, HarnessError> {
    cfg.validate()?;
    let jobs = cfg.jobs.unwrap_or(0);
    cfg.variants
        .iter()
        .map(|variant| {
            let params = cfg.resolved_params(variant);
            let series = run_variant(params, cfg.replicates, jobs)?;
            let agg = aggregate(&series).map_err(|e| HarnessError::Config(e.to_string()))?;
            Ok(VariantResult {
                name: variant.name.clone(),
                params,
                series,
                aggregate: agg,
            })
        })
        .collect()
}

/// Fixed CSV schema of a variant aggregate; floats at 6 decimals, LF endings.
pub fn aggregate_csv(agg: &AggregateSeries) -> String {
    let mut out = String::from(
        "iteration,mean_fitness_mean,mean_fitness_std,diversity_mean,diversity_std,\
         mean_pc_mean,frac_imitators_mean,frac_creators_mean\n",
    );
    for r in &agg.records {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            r.iteration,
            r.mean_fitness.mean,
            r.mean_fitness.std,
            r.diversity.mean,
            r.diversity.std,
            r.mean_p_create.mean,
            r.frac_imitators.mean,
            r.frac_creators.mean,
        ));
    }
    out
}

#[derive(Serialize)]
struct VariantMeta<'a> {
    variant: &'a str,
    params: &'a SimParams,
    replicates: usize,
    tool_version: &'a str,
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

/// Writes `<variant>_aggregate.csv` and `<variant>_meta.json` per variant,
/// plus the two overlay charts when enabled. Returns the paths written.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    results: &[VariantResult],
) -> Result<Vec<PathBuf>, HarnessError> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::new();

    for result in results {
        let csv_path = dir.join(format!("{}_aggregate.csv", result.name));
        write_file(&csv_path, &aggregate_csv(&result.aggregate))?;
        written.push(csv_path);

        let meta = VariantMeta {
            variant: &result.name,
            params: &result.params,
            replicates: result.aggregate.replicates,
            tool_version: TOOL_VERSION,
        };
        let meta_path = dir.join(format!("{}_meta.json", result.name));
        let mut body =
            serde_json::to_string_pretty(&meta).map_err(|e| HarnessError::Config(e.to_string()))?;
        body.push('\n');
        write_file(&meta_path, &body)?;
        written.push(meta_path);
    }

    if cfg.charts {
        let fitness_columns: Vec<Vec<f64>> = results
            .iter()
            .map(|r| {
                r.aggregate
                    .records
                    .iter()
                    .map(|rec| rec.mean_fitness.mean)
                    .collect()
            })
            .collect();
        let diversity_columns: Vec<Vec<f64>> = results
            .iter()
            .map(|r| {
                r.aggregate
                    .records
                    .iter()
                    .map(|rec| rec.diversity.mean)
                    .collect()
            })
            .collect();
        for (file, title, y_label, columns) in [
            (
                "mean_fitness.svg",
                "Mean fitness of implemented actions",
                "mean fitness",
                &fitness_columns,
            ),
            (
                "diversity.svg",
                "Diversity of implemented actions",
                "distinct chains",
                &diversity_columns,
            ),
        ] {
            let series: Vec<chart::Series<'_>> = results
                .iter()
                .zip(columns)
                .map(|(r, values)| chart::Series {
                    label: &r.name,
                    values,
                })
                .collect();
            let path = dir.join(file);
            write_file(&path, &chart::line_chart(title, y_label, &series))?;
            written.push(path);
        }
    }

    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakPoint {
    pub iteration: usize,
    pub value: f64,
}

/// Outcome of the paired sr_on / sr_off comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub replicates: usize,
    /// Per-iteration difference of mean fitness (sr_on - sr_off).
    pub fitness_difference: Vec<f64>,
    pub final_difference: f64,
    pub final_mean_fitness_sr_on: f64,
    pub final_mean_fitness_sr_off: f64,
    /// Seeded percentile bootstrap 95% CI of the final-iteration difference.
    pub bootstrap_ci_low: f64,
    pub bootstrap_ci_high: f64,
    pub sr_on_diversity_peak: PeakPoint,
    pub sr_off_diversity_peak: PeakPoint,
    pub sr_on_final_frac_imitators: f64,
    pub sr_on_final_frac_creators: f64,
    /// frac_imitators + frac_creators of sr_on at the final iteration.
    pub sr_on_final_segregation: f64,
}

/// Percentile bootstrap 95% CI for the mean of `values`, with a fixed seed so
/// the report is reproducible.
pub fn bootstrap_mean_ci(values: &[f64], resamples: usize, seed: u64) -> (f64, f64) {
    assert!(!values.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| {
            let sum: f64 = (0..values.len())
                .map(|_| values[rng.random_range(0..values.len())])
                .sum();
            sum / values.len() as f64
        })
        .collect();
    means.sort_by(|a, b| a.total_cmp(b));
    let lower = means[(0.025 * resamples as f64) as usize];
    let upper = means[((0.975 * resamples as f64) as usize).min(resamples - 1)];
    (lower, upper)
}

/// Runs the experiment (which must define exactly the `sr_on` and `sr_off`
/// variants) and builds the comparison report from the paired replicates.
pub fn compare_sr(
    cfg: &ExperimentConfig,
) -> Result<(ComparisonReport, Vec<VariantResult>), HarnessError> {
    cfg.validate()?;
    let names: Vec<&str> = cfg.variants.iter().map(|v| v.name.as_str()).collect();
    if !(names.len() == 2 && names.contains(&SR_ON) && names.contains(&SR_OFF)) {
        return Err(HarnessError::Config(format!(
            "compare requires exactly the variants {SR_ON:?} and {SR_OFF:?}, got {names:?}"
        )));
    }
    let results = run_experiment(cfg)?;
    let on = results
        .iter()
        .find(|r| r.name == SR_ON)
        .expect("validated above");
    let off = results
        .iter()
        .find(|r| r.name == SR_OFF)
        .expect("validated above");
    let report = build_comparison(on, off)?;
    Ok((report, results))
}

fn build_comparison(
    on: &VariantResult,
    off: &VariantResult,
) -> Result<ComparisonReport, HarnessError> {
    if on.aggregate.records.len() != off.aggregate.records.len() {
        return Err(HarnessError::Config(
            "sr_on and sr_off must run the same number of iterations".into(),
        ));
    }
    let fitness_difference: Vec<f64> = on
        .aggregate
        .records
        .iter()
        .zip(&off.aggregate.records)
        .map(|(a, b)| a.mean_fitness.mean - b.mean_fitness.mean)
        .collect();

    // paired per-replicate differences at the final iteration
    let final_diffs: Vec<f64> = on
        .series
        .iter()
        .zip(&off.series)
        .map(|(a, b)| {
            a.records.last().expect("non-empty").mean_fitness
                - b.records.last().expect("non-empty").mean_fitness
        })
        .collect();
    let (ci_low, ci_high) = bootstrap_mean_ci(&final_diffs, BOOTSTRAP_RESAMPLES, on.params.seed);

    let (peak_on_iter, peak_on_value) = diversity_peak(&on.aggregate);
    let (peak_off_iter, peak_off_value) = diversity_peak(&off.aggregate);
    let last_on = on.aggregate.records.last().expect("non-empty");
    let last_off = off.aggregate.records.last().expect("non-empty");

    Ok(ComparisonReport {
        replicates: on.aggregate.replicates,
        final_difference: last_on.mean_fitness.mean - last_off.mean_fitness.mean,
        final_mean_fitness_sr_on: last_on.mean_fitness.mean,
        final_mean_fitness_sr_off: last_off.mean_fitness.mean,
        fitness_difference,
        bootstrap_ci_low: ci_low,
        bootstrap_ci_high: ci_high,
        sr_on_diversity_peak: PeakPoint {
            iteration: peak_on_iter,
            value: peak_on_value,
        },
        sr_off_diversity_peak: PeakPoint {
            iteration: peak_off_iter,
            value: peak_off_value,
        },
        sr_on_final_frac_imitators: last_on.frac_imitators.mean,
        sr_on_final_frac_creators: last_on.frac_creators.mean,
        sr_on_final_segregation: last_on.frac_imitators.mean + last_on.frac_creators.mean,
    })
}

/// Writes `compare_report.json` next to the variant outputs.
pub fn write_comparison(
    cfg: &ExperimentConfig,
    report: &ComparisonReport,
) -> Result<PathBuf, HarnessError> {
    fs::create_dir_all(&cfg.output_dir).map_err(|e| HarnessError::io(&cfg.output_dir, e))?;
    let path = cfg.output_dir.join("compare_report.json");
    let mut body =
        serde_json::to_string_pretty(report).map_err(|e| HarnessError::Config(e.to_string()))?;
    body.push('\n');
    write_file(&path, &body)?;
    Ok(path)
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRuleReport {
    pub max_fitness: f64,
    pub optimum_count: usize,
    pub optima: Vec<String>,
}

fn oracle_rule_report(rule: HeadRule) -> OracleRuleReport {
    let (max, argmax) = oracle_max_and_argmax(rule);
    OracleRuleReport {
        max_fitness: max.value(),
        optimum_count: argmax.len(),
        optima: argmax.iter().map(|a| a.encode()).collect(),
    }
}

/// Exhaustive optimum scan under both head rules.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub prose: OracleRuleReport,
    pub literal: OracleRuleReport,
    /// True iff the default rule yields max 10.0 with exactly 8 optima.
    pub passed: bool,
}

pub fn verify_oracle() -> OracleReport {
    let prose = oracle_rule_report(HeadRule::Prose);
    let literal = oracle_rule_report(HeadRule::Literal);
    let passed = prose.max_fitness == 10.0 && prose.optimum_count == 8;
    OracleReport {
        prose,
        literal,
        passed,
    }
}
