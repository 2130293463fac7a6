//! Experiment configuration and the command runners behind the `heavytail`
//! binary.
//!
//! A JSON [`ExperimentConfig`] fully describes a run: the component sequence,
//! the stopping law, the functional, evaluation points, diagnostic grid, and
//! Monte Carlo budget.  Each `cmd_*` function consumes a config, prints its
//! primary table to stdout, optionally writes CSV/JSON artifacts, and returns
//! a process exit code:
//!
//! * `0` — success,
//! * `1` — configuration or I/O problems (mapped by the binary from errors),
//! * `2` — a certified computation failed to converge within its budget,
//! * `3` — a hypothesis check failed,
//! * `4` — a hypothesis check was inconclusive (a fail anywhere dominates).
//!
//! Outputs are deterministic: the same config and seed produce byte-identical
//! CSV and JSON files regardless of worker count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    check_corollary1, check_corollary2, check_theorem1, check_theorem2, check_theorem3,
    check_theorem4, check_theorem5, diagnose, DiagnosisReport, GridSpec, HypothesisReport,
    Verdict,
};
use crate::distributions::{CountingDistribution, SequenceRule, SequenceSpec, TailDistribution};
use crate::error::{Error, Result};
use crate::montecarlo::{mc_stopped_tail, MCConfig};
use crate::tail_algebra::{
    stopped_tail, EstimateMethod, GridOptions, SeriesOptions, StoppedFunctional, TailEstimate,
};

/// The only config schema this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Fixed column order of the tail CSV; a compatibility surface.
pub const TAIL_CSV_HEADER: &str = "experiment_id,functional,x,lower,estimate,upper,method,seed";

/// Fixed column order of the diagnosis CSV; a compatibility surface.
pub const DIAGNOSIS_CSV_HEADER: &str = "experiment_id,component,class,statistic,verdict";

/// Optional artifact paths named by the config itself.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

/// A complete, serializable description of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must equal [`SCHEMA_VERSION`].
    pub schema_version: u32,
    /// Identifier echoed into every CSV row.
    pub experiment_id: String,
    pub seq: SequenceSpec,
    pub eta: CountingDistribution,
    pub functional: StoppedFunctional,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub mc: MCConfig,
    /// Evaluation points for the tail commands.
    #[serde(default = "default_x_list")]
    pub x_list: Vec<f64>,
    /// Relative tolerance for certified series truncation.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Lattice step for certified convolution bounds.
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    /// Hard cap on series levels before reporting non-convergence.
    #[serde(default = "default_level_cap")]
    pub level_cap: usize,
    /// How many leading components the hypothesis checkers probe.
    #[serde(default = "default_probe_depth")]
    pub probe_depth: usize,
    #[serde(default)]
    pub outputs: OutputPaths,
}

fn default_x_list() -> Vec<f64> {
    vec![10.0, 100.0, 1000.0]
}

fn default_tol() -> f64 {
    0.05
}

fn default_grid_step() -> f64 {
    1.0 / 16.0
}

fn default_level_cap() -> usize {
    512
}

fn default_probe_depth() -> usize {
    64
}

impl ExperimentConfig {
    /// Parse and validate a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|err| Error::Config(format!("{}: {err}", path.display())))?;
        config.validated()
    }

    /// Enforce every invariant a hand-written JSON file could violate.
    pub fn validated(self) -> Result<Self> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            )));
        }
        if self.experiment_id.is_empty() {
            return Err(Error::Config("experiment_id: must be nonempty".into()));
        }
        let seq = self.seq.validated()?;
        let eta = self.eta.validated()?;
        let grid = self.grid.validated()?;
        if self.x_list.is_empty() || self.x_list.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(Error::Config(
                "x_list: must be a nonempty list of finite positive points".into(),
            ));
        }
        if !(self.tol.is_finite() && self.tol > 0.0 && self.tol <= 0.1) {
            return Err(Error::Config(format!(
                "tol: must lie in (0, 0.1], got {}",
                self.tol
            )));
        }
        if !(self.grid_step.is_finite() && self.grid_step > 0.0) {
            return Err(Error::Config(format!(
                "grid_step: must be finite and positive, got {}",
                self.grid_step
            )));
        }
        if self.level_cap == 0 {
            return Err(Error::Config("level_cap: must be at least 1".into()));
        }
        if self.probe_depth == 0 {
            return Err(Error::Config("probe_depth: must be at least 1".into()));
        }
        // A zero sample budget is the documented way to switch the Monte
        // Carlo cross-check off; any positive budget must be a valid one.
        if self.mc.samples > 0 {
            self.mc.validate()?;
        }
        Ok(ExperimentConfig {
            seq,
            eta,
            grid,
            ..self
        })
    }

    fn series_options(&self) -> SeriesOptions {
        SeriesOptions {
            tol: self.tol,
            level_cap: self.level_cap,
            grid: self.grid_options(),
            envelope: None,
        }
    }

    fn grid_options(&self) -> GridOptions {
        GridOptions {
            step: self.grid_step,
            ..GridOptions::default()
        }
    }

    /// The common law of an i.i.d. sequence, or a config error for results
    /// that are stated only in the i.i.d. case.
    fn iid_law(&self, purpose: &str) -> Result<&TailDistribution> {
        match &self.seq.rule {
            SequenceRule::Iid { dist } => Ok(dist),
            _ => Err(Error::Config(format!(
                "seq.rule: {purpose} applies to i.i.d. sequences; rule kind must be \"iid\""
            ))),
        }
    }
}

/// One evaluated tail point in the fixed CSV column order.
#[derive(Clone, Debug, Serialize)]
pub struct TailRow {
    pub experiment_id: String,
    pub functional: &'static str,
    pub x: f64,
    pub lower: f64,
    pub estimate: f64,
    pub upper: f64,
    pub method: String,
    pub seed: u64,
}

impl TailRow {
    fn from_estimate(config: &ExperimentConfig, x: f64, estimate: &TailEstimate) -> Self {
        let method = match &estimate.method {
            EstimateMethod::Exact => "exact".to_string(),
            EstimateMethod::SeriesTruncated { levels, .. } => format!("series[{levels}]"),
            EstimateMethod::GridConvolution { step } => format!("grid[h={step}]"),
            EstimateMethod::MonteCarlo { samples } => format!("mc[{samples}]"),
        };
        TailRow {
            experiment_id: config.experiment_id.clone(),
            functional: config.functional.label(),
            x,
            lower: estimate.lower,
            estimate: estimate.value(),
            upper: estimate.upper,
            method,
            seed: config.mc.seed,
        }
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.experiment_id,
            self.functional,
            self.x,
            self.lower,
            self.estimate,
            self.upper,
            self.method,
            self.seed
        )
    }
}

fn tail_csv(rows: &[TailRow]) -> String {
    let mut out = String::from(TAIL_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

/// Resolve where an artifact goes: an explicit `--out` directory wins (with
/// the command's default file name), then the config-named path, else none.
fn out_path(
    out_dir: Option<&Path>,
    configured: Option<&PathBuf>,
    default_name: &str,
) -> Option<PathBuf> {
    match (out_dir, configured) {
        (Some(dir), _) => Some(dir.join(default_name)),
        (None, Some(path)) => Some(path.clone()),
        (None, None) => None,
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|err| Error::Config(format!("serialization failed: {err}")))?;
    text.push('\n');
    write_text(path, &text)
}

/// Evaluate the configured functional at every `x_list` point with certified
/// series bounds, cross-checked by stratified Monte Carlo when the sample
/// budget is positive.  Returns the rows plus the exit code (2 when any
/// point failed to converge within the level cap).
pub fn tail_rows(config: &ExperimentConfig) -> Result<(Vec<TailRow>, i32)> {
    let opts = config.series_options();
    let mut rows = Vec::new();
    let mut code = 0;
    for &x in &config.x_list {
        match stopped_tail(config.functional, &config.seq, &config.eta, x, &opts) {
            Ok(estimate) => rows.push(TailRow::from_estimate(config, x, &estimate)),
            Err(Error::NoConvergence {
                levels,
                lower,
                upper,
                ..
            }) => {
                // Keep the achieved bracket in the table; the exit code
                // carries the failure.
                rows.push(TailRow {
                    experiment_id: config.experiment_id.clone(),
                    functional: config.functional.label(),
                    x,
                    lower,
                    estimate: 0.5 * (lower + upper),
                    upper,
                    method: format!("series[{levels},nonconvergent]"),
                    seed: config.mc.seed,
                });
                code = 2;
            }
            Err(err) => return Err(err),
        }
        if config.mc.samples > 0 {
            let estimate =
                mc_stopped_tail(config.functional, &config.seq, &config.eta, x, &config.mc);
            rows.push(TailRow::from_estimate(config, x, &estimate));
        }
    }
    Ok((rows, code))
}

/// `tail`: certified bounds (and Monte Carlo cross-checks) over `x_list`.
pub fn cmd_tail(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<i32> {
    let (rows, code) = tail_rows(config)?;
    let csv = tail_csv(&rows);
    print!("{csv}");
    if let Some(path) = out_path(out_dir, config.outputs.csv.as_ref(), "tail.csv") {
        write_text(&path, &csv)?;
    }
    if let Some(path) = out_path(out_dir, config.outputs.json.as_ref(), "tail.json") {
        write_json(&path, &serde_json::json!({
            "experiment_id": config.experiment_id,
            "rows": rows,
        }))?;
    }
    Ok(code)
}

/// `mc`: Monte Carlo estimates only, one row per `x_list` point.
pub fn cmd_mc(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<i32> {
    if config.mc.samples == 0 {
        return Err(Error::Config(
            "mc.samples: must be positive for the mc command".into(),
        ));
    }
    let mut rows = Vec::new();
    for &x in &config.x_list {
        let estimate = mc_stopped_tail(config.functional, &config.seq, &config.eta, x, &config.mc);
        rows.push(TailRow::from_estimate(config, x, &estimate));
    }
    let csv = tail_csv(&rows);
    print!("{csv}");
    if let Some(path) = out_path(out_dir, config.outputs.csv.as_ref(), "mc.csv") {
        write_text(&path, &csv)?;
    }
    if let Some(path) = out_path(out_dir, config.outputs.json.as_ref(), "mc.json") {
        write_json(&path, &serde_json::json!({
            "experiment_id": config.experiment_id,
            "rows": rows,
        }))?;
    }
    Ok(0)
}

/// Per-component diagnosis bundle written by `diagnose`.
#[derive(Debug, Serialize)]
pub struct ComponentDiagnosis {
    /// First index (1-based) at which this law occurs.
    pub index: usize,
    pub law: TailDistribution,
    pub diagnosis: DiagnosisReport,
}

/// Run the class indicators for every distinct component law.
pub fn diagnose_components(config: &ExperimentConfig) -> Result<Vec<ComponentDiagnosis>> {
    let gopts = config.grid_options();
    let mut out = Vec::new();
    for (index, law) in config.seq.distinct_components(config.probe_depth) {
        let diagnosis = diagnose(law, &config.grid, &gopts)?;
        out.push(ComponentDiagnosis {
            index,
            law: law.clone(),
            diagnosis,
        });
    }
    Ok(out)
}

fn diagnosis_csv(config: &ExperimentConfig, components: &[ComponentDiagnosis]) -> String {
    let mut out = String::from(DIAGNOSIS_CSV_HEADER);
    out.push('\n');
    for component in components {
        for (class, statistic, verdict) in component.diagnosis.class_rows() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                config.experiment_id,
                component.index,
                class,
                statistic,
                verdict.label()
            );
        }
    }
    out
}

/// `diagnose`: class indicators and index estimates per distinct component.
pub fn cmd_diagnose(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<i32> {
    let components = diagnose_components(config)?;
    let csv = diagnosis_csv(config, &components);
    print!("{csv}");
    for component in &components {
        for warning in &component.diagnosis.warnings {
            eprintln!("warning (component {}): {warning}", component.index);
        }
    }
    if let Some(path) = out_path(out_dir, config.outputs.csv.as_ref(), "diagnosis.csv") {
        write_text(&path, &csv)?;
    }
    if let Some(path) = out_path(out_dir, config.outputs.json.as_ref(), "diagnosis.json") {
        write_json(&path, &serde_json::json!({
            "experiment_id": config.experiment_id,
            "components": components,
        }))?;
    }
    Ok(0)
}

/// Which closure result `check` should test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremId {
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    Theorem5,
    Corollary1,
    Corollary2,
}

impl TheoremId {
    /// Accepts the CLI tokens `1`..`5`, `cor1`, `cor2`.
    pub fn parse(token: &str) -> Result<Self> {
        match token {
            "1" => Ok(TheoremId::Theorem1),
            "2" => Ok(TheoremId::Theorem2),
            "3" => Ok(TheoremId::Theorem3),
            "4" => Ok(TheoremId::Theorem4),
            "5" => Ok(TheoremId::Theorem5),
            "cor1" => Ok(TheoremId::Corollary1),
            "cor2" => Ok(TheoremId::Corollary2),
            other => Err(Error::Config(format!(
                "theorem: unknown id {other:?} (expected 1, 2, 3, 4, 5, cor1, or cor2)"
            ))),
        }
    }
}

/// Dispatch to the matching hypothesis checker.
pub fn run_check(config: &ExperimentConfig, theorem: TheoremId) -> Result<HypothesisReport> {
    let grid = &config.grid;
    let probe = config.probe_depth;
    match theorem {
        TheoremId::Theorem1 => {
            let law = config.iid_law("the subexponential closure result")?;
            check_theorem1(law, &config.eta, grid, &config.grid_options())
        }
        TheoremId::Theorem2 => check_theorem2(&config.seq, &config.eta, grid, probe),
        TheoremId::Theorem3 => check_theorem3(&config.seq, &config.eta, grid, probe),
        TheoremId::Theorem4 => check_theorem4(&config.seq, &config.eta, grid, probe),
        TheoremId::Theorem5 => check_theorem5(&config.seq, &config.eta, grid, probe),
        TheoremId::Corollary1 => {
            let law = config.iid_law("the i.i.d. stopped-maximum corollary")?;
            check_corollary1(law, &config.eta, grid)
        }
        TheoremId::Corollary2 => {
            let law = config.iid_law("the i.i.d. maximum-of-sums corollary")?;
            check_corollary2(law, &config.eta, grid)
        }
    }
}

fn verdict_exit_code(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Pass => 0,
        Verdict::Fail => 3,
        Verdict::Inconclusive => 4,
    }
}

/// `check`: evaluate one result's hypotheses; exit 0 / 3 / 4 by verdict.
pub fn cmd_check(
    config: &ExperimentConfig,
    theorem: TheoremId,
    out_dir: Option<&Path>,
) -> Result<i32> {
    let report = run_check(config, theorem)?;
    for condition in &report.conditions {
        let statistic = condition
            .statistic
            .map(|s| format!(" (statistic {s})"))
            .unwrap_or_default();
        println!(
            "condition {}: {}{statistic} — {}",
            condition.id,
            condition.verdict.label(),
            condition.description
        );
        if !condition.failing_indices.is_empty() {
            println!("  failing component indices: {:?}", condition.failing_indices);
        }
    }
    for note in &report.notes {
        println!("note: {note}");
    }
    println!("overall: {}", report.overall.label());
    if let Some(path) = out_path(out_dir, config.outputs.json.as_ref(), "check.json") {
        write_json(&path, &serde_json::json!({
            "experiment_id": config.experiment_id,
            "check": report,
        }))?;
    }
    Ok(verdict_exit_code(report.overall))
}

/// Built-in config mirroring the first worked example: a dyadic-oscillation
/// pivot, exponential components at indices divisible by 3, degenerate
/// components elsewhere, and (as a documented default, since only a finite
/// mean with mass at 1 is required) a geometric(1/2) stopping variable.
pub fn example1_config() -> ExperimentConfig {
    let degenerate = TailDistribution::degenerate_at_zero();
    let exponential = TailDistribution::exponential(1.0).expect("valid rate");
    let cai_tang = TailDistribution::cai_tang(0.5).expect("valid q");
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        experiment_id: "example1".into(),
        seq: SequenceSpec {
            rule: SequenceRule::Periodic {
                pattern: vec![degenerate.clone(), degenerate, exponential],
                head: [(1, cai_tang)].into_iter().collect(),
            },
            pivot: 1,
            weights: None,
        },
        eta: CountingDistribution::geometric(0.5).expect("valid q"),
        functional: StoppedFunctional::RandomMax,
        grid: GridSpec::default(),
        mc: MCConfig {
            samples: 1_000_000,
            seed: 1,
            ..MCConfig::default()
        },
        x_list: vec![10.0, 100.0, 1000.0],
        tol: default_tol(),
        grid_step: default_grid_step(),
        level_cap: default_level_cap(),
        probe_depth: default_probe_depth(),
        outputs: OutputPaths::default(),
    }
}

/// Built-in config mirroring the second worked example: alternating shifted
/// power tails (odd indices (1+x)^-3, even indices (2+x)^-3 supported from
/// -1) with a zeta(6) stopping variable.
pub fn example2_config() -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        experiment_id: "example2".into(),
        seq: SequenceSpec {
            rule: SequenceRule::Periodic {
                pattern: vec![
                    TailDistribution::pareto_shifted(0.0, 3.0).expect("valid tail"),
                    TailDistribution::pareto_shifted(1.0, 3.0).expect("valid tail"),
                ],
                head: Default::default(),
            },
            pivot: 1,
            weights: None,
        },
        eta: CountingDistribution::zeta(6.0).expect("valid exponent"),
        functional: StoppedFunctional::RandomMaxOfSums,
        grid: GridSpec::default(),
        mc: MCConfig {
            samples: 10_000_000,
            seed: 42,
            ..MCConfig::default()
        },
        x_list: vec![20.0, 50.0, 100.0],
        tol: default_tol(),
        grid_step: default_grid_step(),
        level_cap: default_level_cap(),
        probe_depth: default_probe_depth(),
        outputs: OutputPaths::default(),
    }
}

/// Built-in light-tailed control: i.i.d. exponential components with a
/// geometric stopping variable (the stopped sum has the closed form
/// P(S_N > x) = q e^{-(1-q)x}).  The grid is kept small so survival values
/// stay inside linear floating-point range.
pub fn exponential_iid_config() -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        experiment_id: "exponential-iid".into(),
        seq: SequenceSpec {
            rule: SequenceRule::Iid {
                dist: TailDistribution::exponential(1.0).expect("valid rate"),
            },
            pivot: 1,
            weights: None,
        },
        eta: CountingDistribution::geometric(0.5).expect("valid q"),
        functional: StoppedFunctional::RandomSum,
        grid: GridSpec {
            x_min: 1.0,
            x_max: 40.0,
            points: 17,
            ..GridSpec::default()
        },
        mc: MCConfig {
            samples: 200_000,
            seed: 7,
            ..MCConfig::default()
        },
        x_list: vec![1.0, 5.0, 10.0, 20.0],
        tol: default_tol(),
        grid_step: default_grid_step(),
        level_cap: default_level_cap(),
        probe_depth: default_probe_depth(),
        outputs: OutputPaths::default(),
    }
}

/// The built-in config for a `reproduce` example id.
pub fn builtin_example(example: u32, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut config = match example {
        1 => example1_config(),
        2 => example2_config(),
        other => {
            return Err(Error::Config(format!(
                "unknown example {other} (available: 1, 2)"
            )))
        }
    };
    if let Some(seed) = seed {
        config.mc.seed = seed;
    }
    Ok(config)
}

/// Which hypothesis check belongs to each built-in example.
fn example_theorem(example: u32) -> TheoremId {
    match example {
        1 => TheoremId::Theorem4,
        _ => TheoremId::Theorem5,
    }
}

/// `reproduce`: run a built-in example end to end, writing `config.json`,
/// `diagnosis.json`, `diagnosis.csv`, `check.json`, and `tail.csv` into the
/// output directory.  The exit code carries the most severe step outcome.
pub fn cmd_reproduce(example: u32, seed: Option<u64>, out_dir: &Path) -> Result<i32> {
    let config = builtin_example(example, seed)?;
    fs::create_dir_all(out_dir)?;

    let config_path = out_dir.join("config.json");
    write_json(&config_path, &config)?;
    println!("wrote {}", config_path.display());

    let components = diagnose_components(&config)?;
    let csv = diagnosis_csv(&config, &components);
    let diagnosis_csv_path = out_dir.join("diagnosis.csv");
    write_text(&diagnosis_csv_path, &csv)?;
    println!("wrote {}", diagnosis_csv_path.display());
    let diagnosis_json_path = out_dir.join("diagnosis.json");
    write_json(&diagnosis_json_path, &serde_json::json!({
        "experiment_id": config.experiment_id,
        "components": components,
    }))?;
    println!("wrote {}", diagnosis_json_path.display());

    let report = run_check(&config, example_theorem(example))?;
    let check_code = verdict_exit_code(report.overall);
    let check_path = out_dir.join("check.json");
    write_json(&check_path, &serde_json::json!({
        "experiment_id": config.experiment_id,
        "check": report,
    }))?;
    println!("wrote {} (overall: {})", check_path.display(), report.overall.label());

    let (rows, tail_code) = tail_rows(&config)?;
    let tail_path = out_dir.join("tail.csv");
    write_text(&tail_path, &tail_csv(&rows))?;
    println!("wrote {}", tail_path.display());

    // Severity order: nonconvergence (2) dominates a failed (3) or
    // inconclusive (4) hypothesis, which dominate success.
    let code = [tail_code, check_code]
        .into_iter()
        .filter(|c| *c != 0)
        .min()
        .unwrap_or(0);
    Ok(code)
}

/// Exit code for errors surfaced to the binary: configuration and I/O
/// problems are 1, everything else is a numeric failure (2).
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::Io(_)
        | Error::InvalidParameter { .. }
        | Error::PivotNotInSupport { .. } => 1,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_configs_pass_validation() {
        for config in [example1_config(), example2_config(), exponential_iid_config()] {
            let id = config.experiment_id.clone();
            let validated = config.validated().unwrap_or_else(|e| panic!("{id}: {e}"));
            assert_eq!(validated.schema_version, SCHEMA_VERSION);
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = example2_config();
        let text = serde_json::to_string_pretty(&config).unwrap();
        let parsed: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, config);
    }

    #[test]
    fn schema_version_mismatch_is_rejected_by_name() {
        let mut config = example1_config();
        config.schema_version = 2;
        let err = config.validated().unwrap_err();
        assert!(err.to_string().contains("schema_version"), "{err}");
    }

    #[test]
    fn malformed_kind_error_names_the_variant() {
        let text = r#"{
            "schema_version": 1,
            "experiment_id": "broken",
            "seq": {"rule": {"kind": "iid", "dist": {"kind": "pareto_shiftedX", "shift": 0.0, "alpha": 3.0}}},
            "eta": {"kind": "geometric", "q": 0.5},
            "functional": "random_max"
        }"#;
        let err = serde_json::from_str::<ExperimentConfig>(text).unwrap_err();
        assert!(err.to_string().contains("pareto_shiftedX"), "{err}");
    }

    #[test]
    fn invalid_parameters_are_rejected_after_parsing() {
        let text = r#"{
            "schema_version": 1,
            "experiment_id": "broken",
            "seq": {"rule": {"kind": "iid", "dist": {"kind": "pareto_shifted", "shift": 0.0, "alpha": -3.0}}},
            "eta": {"kind": "geometric", "q": 0.5},
            "functional": "random_max"
        }"#;
        let config: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert!(config.validated().is_err());
    }

    #[test]
    fn theorem_ids_parse_and_reject() {
        assert_eq!(TheoremId::parse("1").unwrap(), TheoremId::Theorem1);
        assert_eq!(TheoremId::parse("5").unwrap(), TheoremId::Theorem5);
        assert_eq!(TheoremId::parse("cor2").unwrap(), TheoremId::Corollary2);
        assert!(TheoremId::parse("6").is_err());
        assert!(TheoremId::parse("corollary1").is_err());
    }

    #[test]
    fn unknown_example_is_a_config_error() {
        let err = builtin_example(3, None).unwrap_err();
        assert!(err.to_string().contains("unknown example"), "{err}");
        assert_eq!(error_exit_code(&err), 1);
    }

    #[test]
    fn tail_rows_use_fixed_columns_and_seeded_methods() {
        let mut config = exponential_iid_config();
        config.x_list = vec![1.0, 10.0];
        config.mc.samples = 20_000;
        config.mc.seed = 11;
        let config = config.validated().unwrap();
        let (rows, code) = tail_rows(&config).unwrap();
        assert_eq!(code, 0);
        // One certified row plus one Monte Carlo row per point.
        assert_eq!(rows.len(), 4);
        assert!(rows[0].method.starts_with("series") || rows[0].method.starts_with("exact"));
        assert!(rows[1].method.starts_with("mc["));
        for row in &rows {
            assert_eq!(row.seed, 11);
            assert!(row.lower <= row.estimate && row.estimate <= row.upper);
        }
        let csv = tail_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(TAIL_CSV_HEADER));
        assert_eq!(lines.count(), 4);
    }

    #[test]
    fn stopped_sum_of_exponentials_matches_geometric_mixture() {
        // P(S_N > x) = q e^{-(1-q)x} for i.i.d. exponential(1) summands and
        // a geometric(q) stopping variable: the certified bracket from the
        // built-in control config must contain it.
        let mut config = exponential_iid_config();
        config.mc.samples = 0;
        let config = config.validated().unwrap();
        let (rows, code) = tail_rows(&config).unwrap();
        assert_eq!(code, 0);
        for row in &rows {
            let oracle = 0.5 * (-0.5 * row.x).exp();
            assert!(
                row.lower <= oracle && oracle <= row.upper,
                "x = {}: [{}, {}] misses {oracle}",
                row.x,
                row.lower,
                row.upper
            );
        }
    }

    #[test]
    fn nonconvergence_is_reported_as_exit_two_with_bracket_rows() {
        // A slowly decaying stopping law against a tight tolerance and a
        // tiny level cap cannot converge; the row keeps the partial bracket.
        let mut config = example2_config();
        config.experiment_id = "nonconvergent".into();
        config.tol = 0.001;
        config.level_cap = 3;
        config.mc.samples = 0;
        config.x_list = vec![50.0];
        let config = config.validated().unwrap();
        let (rows, code) = tail_rows(&config).unwrap();
        assert_eq!(code, 2);
        assert_eq!(rows.len(), 1);
        assert!(rows[0].method.contains("nonconvergent"));
        assert!(rows[0].lower > 0.0 && rows[0].lower < rows[0].upper);
    }

    #[test]
    fn shipped_configs_match_builtin_constructors() {
        for (shipped, config) in [
            (include_str!("../configs/example1.json"), example1_config()),
            (include_str!("../configs/example2.json"), example2_config()),
            (
                include_str!("../configs/exponential-iid.json"),
                exponential_iid_config(),
            ),
        ] {
            let mut expected = serde_json::to_string_pretty(&config).unwrap();
            expected.push('\n');
            assert_eq!(shipped, expected, "run the regenerate_shipped_configs test");
        }
    }

    #[test]
    #[ignore = "golden-file helper: regenerates the shipped config files"]
    fn regenerate_shipped_configs() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
        fs::create_dir_all(&dir).unwrap();
        for (name, config) in [
            ("example1.json", example1_config()),
            ("example2.json", example2_config()),
            ("exponential-iid.json", exponential_iid_config()),
        ] {
            let mut text = serde_json::to_string_pretty(&config).unwrap();
            text.push('\n');
            fs::write(dir.join(name), text).unwrap();
        }
    }

    #[test]
    fn out_path_prefers_explicit_directory() {
        let configured = Some(PathBuf::from("custom/name.csv"));
        let dir = PathBuf::from("outdir");
        assert_eq!(
            out_path(Some(&dir), configured.as_ref(), "tail.csv"),
            Some(PathBuf::from("outdir/tail.csv"))
        );
        assert_eq!(
            out_path(None, configured.as_ref(), "tail.csv"),
            Some(PathBuf::from("custom/name.csv"))
        );
        assert_eq!(out_path(None, None, "tail.csv"), None);
    }
}
