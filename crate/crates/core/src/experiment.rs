//! Time-stepping driver and parameter sweeps.
//!
//! Every step assembles the implicit system from the previous selected
//! profile, expands it to binary variables, builds the QUBO, samples it and
//! collapses the samples with each requested strategy. A double-precision
//! trajectory runs alongside for the error metrics.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{
    center_distribution, center_index, CenterDistribution, ErrorSeries, StepError,
};
use crate::channel_flow::{
    assemble_system, step_classical, FlowParams, LinearSystem, SolutionProfile,
};
use crate::error::{Error, Result};
use crate::fixed_point::FixedPointFormat;
use crate::qubo::{
    build_qubo, embeddable_hint, logical_problem_size, Qubo, DEFAULT_EMBEDDING_BUDGET,
};
use crate::samplers::{
    sample_annealing, sample_exhaustive, AnnealSchedule, SampleSet, SamplerConfig, EXHAUSTIVE_CAP,
};
use crate::selection::{select_profile, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    Exhaustive,
    Annealing,
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerKind::Exhaustive => "exhaustive",
            SamplerKind::Annealing => "annealing",
        })
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(SamplerKind::Exhaustive),
            "annealing" => Ok(SamplerKind::Annealing),
            other => Err(Error::Parse(format!("unknown sampler {other:?}"))),
        }
    }
}

/// Which profile builds the next right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feed {
    /// The profile selected from the samples (the normal mode).
    Quantum,
    /// The double-precision profile; isolates per-step error from
    /// accumulated error.
    Classical,
}

impl fmt::Display for Feed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Feed::Quantum => "quantum",
            Feed::Classical => "classical",
        })
    }
}

impl FromStr for Feed {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(Feed::Quantum),
            "classical" => Ok(Feed::Classical),
            other => Err(Error::Parse(format!("unknown feed mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub flow: FlowParams,
    pub precision: u32,
    pub radix_position: i32,
    pub num_reads: u64,
    pub sampler: SamplerKind,
    pub strategies: Vec<Strategy>,
    pub seed: u64,
    pub feed: Feed,
    /// Annealing sweeps per read.
    pub sweeps: usize,
    /// Schedule overrides; `None` uses [`AnnealSchedule::default_for`].
    pub t_initial: Option<f64>,
    pub t_final: Option<f64>,
    /// Maximum rows per sample-set dump.
    pub dump_limit: usize,
    pub embed_budget: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            flow: FlowParams::default(),
            precision: 4,
            radix_position: 1,
            num_reads: 10_000,
            sampler: SamplerKind::Annealing,
            strategies: Strategy::ALL.to_vec(),
            seed: 1,
            feed: Feed::Quantum,
            sweeps: AnnealSchedule::DEFAULT_SWEEPS,
            t_initial: None,
            t_final: None,
            dump_limit: 10_000,
            embed_budget: DEFAULT_EMBEDDING_BUDGET,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("invalid value {value:?} for {key}")))
}

fn parse_auto(key: &str, value: &str) -> Result<Option<f64>> {
    if value == "auto" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn auto_string(value: Option<f64>) -> String {
    value.map_or_else(|| "auto".to_string(), |v| format!("{v:?}"))
}

impl RunConfig {
    pub fn format(&self) -> Result<FixedPointFormat> {
        FixedPointFormat::new(self.precision, self.radix_position)
    }

    pub fn problem_size(&self) -> usize {
        logical_problem_size(self.flow.grid_points, self.precision as usize)
    }

    /// Set one field from its key=value spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "grid_points" => self.flow.grid_points = parse(key, value)?,
            "precision" => self.precision = parse(key, value)?,
            "radix_pos" => self.radix_position = parse(key, value)?,
            "steps" => self.flow.n_steps = parse(key, value)?,
            "reads" => self.num_reads = parse(key, value)?,
            "sampler" => self.sampler = value.parse()?,
            "strategy" => {
                self.strategies = if value == "all" {
                    Strategy::ALL.to_vec()
                } else {
                    value
                        .split(',')
                        .map(|s| s.trim().parse())
                        .collect::<Result<Vec<_>>>()?
                }
            }
            "seed" => self.seed = parse(key, value)?,
            "alpha" => self.flow.alpha = parse(key, value)?,
            "density" => self.flow.density = parse(key, value)?,
            "viscosity" => self.flow.dynamic_viscosity = parse(key, value)?,
            "dpdx" => self.flow.pressure_gradient = parse(key, value)?,
            "height" => self.flow.height = parse(key, value)?,
            "body_force" => self.flow.body_force = parse(key, value)?,
            "feed" => self.feed = value.parse()?,
            "sweeps" => self.sweeps = parse(key, value)?,
            "t0" => self.t_initial = parse_auto(key, value)?,
            "t1" => self.t_final = parse_auto(key, value)?,
            "dump_limit" => self.dump_limit = parse(key, value)?,
            "embed_budget" => self.embed_budget = parse(key, value)?,
            "out" => self.out_dir = PathBuf::from(value),
            other => return Err(Error::Parse(format!("unknown configuration key {other:?}"))),
        }
        Ok(())
    }

    /// Apply a key=value file on top of `self`. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", i + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Every setting that affects the computed results, in a fixed order.
    /// The output directory is not included.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let strategy = if self.strategies == Strategy::ALL {
            "all".to_string()
        } else {
            self.strategies
                .iter()
                .map(Strategy::name)
                .collect::<Vec<_>>()
                .join(",")
        };
        vec![
            ("grid_points", self.flow.grid_points.to_string()),
            ("precision", self.precision.to_string()),
            ("radix_pos", self.radix_position.to_string()),
            ("steps", self.flow.n_steps.to_string()),
            ("reads", self.num_reads.to_string()),
            ("sampler", self.sampler.to_string()),
            ("strategy", strategy),
            ("seed", self.seed.to_string()),
            ("alpha", format!("{:?}", self.flow.alpha)),
            ("density", format!("{:?}", self.flow.density)),
            ("viscosity", format!("{:?}", self.flow.dynamic_viscosity)),
            ("dpdx", format!("{:?}", self.flow.pressure_gradient)),
            ("height", format!("{:?}", self.flow.height)),
            ("body_force", format!("{:?}", self.flow.body_force)),
            ("feed", self.feed.to_string()),
            ("sweeps", self.sweeps.to_string()),
            ("t0", auto_string(self.t_initial)),
            ("t1", auto_string(self.t_final)),
            ("dump_limit", self.dump_limit.to_string()),
            ("embed_budget", self.embed_budget.to_string()),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        self.flow.validate()?;
        self.format()?;
        if self.num_reads == 0 {
            return Err(Error::Config("reads must be positive".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one strategy is required".into()));
        }
        let size = self.problem_size();
        if self.sampler == SamplerKind::Exhaustive && size > EXHAUSTIVE_CAP {
            return Err(Error::Capacity {
                vars: size,
                cap: EXHAUSTIVE_CAP,
            });
        }
        if self.sampler == SamplerKind::Annealing {
            let probe = AnnealSchedule {
                t_initial: self.t_initial.unwrap_or(1.0),
                t_final: self.t_final.unwrap_or(1e-3 * self.t_initial.unwrap_or(1.0)),
                sweeps: self.sweeps,
            };
            probe.validate()?;
        }
        Ok(())
    }

    fn schedule_for(&self, qubo: &Qubo) -> AnnealSchedule {
        let auto = AnnealSchedule::default_for(qubo);
        let t_initial = self.t_initial.unwrap_or(auto.t_initial);
        AnnealSchedule {
            t_initial,
            t_final: self.t_final.unwrap_or(1e-3 * t_initial),
            sweeps: self.sweeps,
        }
    }
}

/// Seed for the sampler at `step`, derived from the master seed.
pub fn step_seed(master: u64, step: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(step as u64);
    rng.next_u64()
}

/// What one strategy saw and chose at one step.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: usize,
    pub system: LinearSystem,
    pub qubo: Qubo,
    pub lowest_energy: f64,
    pub distinct_states: usize,
    pub num_reads: u64,
}

#[derive(Debug, Clone)]
pub struct StrategyRun {
    pub strategy: Strategy,
    /// Selected profiles for steps `0..=n_steps`; entry 0 is the initial profile.
    pub profiles: Vec<SolutionProfile>,
    pub steps: Vec<StepRecord>,
    pub errors: ErrorSeries,
    pub center: CenterDistribution,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Double-precision profiles for steps `0..=n_steps`.
    pub classical: Vec<SolutionProfile>,
    pub runs: Vec<StrategyRun>,
    pub warnings: Vec<String>,
}

fn sample(cfg: &RunConfig, qubo: &Qubo, seed: u64) -> Result<SampleSet> {
    match cfg.sampler {
        SamplerKind::Exhaustive => sample_exhaustive(qubo),
        SamplerKind::Annealing => {
            let sampler = SamplerConfig::new(cfg.num_reads, seed, cfg.schedule_for(qubo));
            sample_annealing(qubo, &sampler)
        }
    }
}

/// Clamp feed values into the representable range, reporting each change.
fn clamp_feed(
    profile: &SolutionProfile,
    fmt: &FixedPointFormat,
    step: usize,
    strategy: Strategy,
    warnings: &mut Vec<String>,
) -> SolutionProfile {
    let max = fmt.max_value();
    let mut out = profile.clone();
    for (i, v) in out.values.iter_mut().enumerate() {
        let clamped = v.clamp(0.0, max);
        if clamped != *v {
            warnings.push(format!(
                "step {step} strategy {strategy}: value {v:?} at grid point {i} outside [0, {max:?}], clamped to {clamped:?}"
            ));
            *v = clamped;
        }
    }
    out
}

/// Run the time loop in memory. `on_samples` sees every sample set as it
/// is produced, once per strategy, and may persist it.
pub fn simulate<F>(
    cfg: &RunConfig,
    initial: &SolutionProfile,
    mut on_samples: F,
) -> Result<RunOutput>
where
    F: FnMut(usize, Strategy, &Qubo, &SampleSet) -> Result<()>,
{
    cfg.validate()?;
    let params = &cfg.flow;
    let fmt = cfg.format()?;
    let n_steps = params.n_steps;
    let mut warnings = Vec::new();

    let mut classical = vec![initial.clone()];
    for _ in 0..n_steps {
        let next = step_classical(params, classical.last().expect("initial profile"))?;
        classical.push(next);
    }

    let (grid_index, exact_center) = center_index(params.grid_points);
    let mut runs: Vec<StrategyRun> = cfg
        .strategies
        .iter()
        .map(|&strategy| StrategyRun {
            strategy,
            profiles: vec![initial.clone()],
            steps: Vec::with_capacity(n_steps),
            errors: Vec::with_capacity(n_steps),
            center: CenterDistribution {
                grid_index,
                exact_center,
                steps: Vec::with_capacity(n_steps),
            },
        })
        .collect();

    for step in 1..=n_steps {
        let seed = step_seed(cfg.seed, step);
        // Strategies whose feed profiles agree bit-for-bit share one solve.
        let mut groups: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
        let mut feeds = Vec::with_capacity(runs.len());
        for (r, run) in runs.iter().enumerate() {
            let source = match cfg.feed {
                Feed::Quantum => &run.profiles[step - 1],
                Feed::Classical => &classical[step - 1],
            };
            let feed = clamp_feed(source, &fmt, step, run.strategy, &mut warnings);
            groups
                .entry(feed.values.iter().map(|v| v.to_bits()).collect())
                .or_default()
                .push(r);
            feeds.push(feed);
        }

        for members in groups.into_values() {
            let feed = &feeds[members[0]];
            let system = assemble_system(params, feed)?;
            let qubo = build_qubo(&fmt.expand_matrix(&system.to_dense()), &system.rhs)?;
            let samples = sample(cfg, &qubo, seed)?;
            let lowest_energy = samples.lowest().ok_or(Error::EmptySampleSet)?.energy;
            let histogram = center_distribution(std::slice::from_ref(&samples), &fmt, params)?
                .steps
                .pop()
                .unwrap_or_default();

            for r in members {
                let run = &mut runs[r];
                on_samples(step, run.strategy, &qubo, &samples)?;
                let mut profile = select_profile(&samples, run.strategy, &fmt, params)?;
                profile.time_index = step;
                run.errors.push(StepError::compute(
                    step,
                    run.strategy,
                    fmt.precision(),
                    &profile.values,
                    &classical[step].values,
                )?);
                run.profiles.push(profile);
                run.center.steps.push(histogram.clone());
                run.steps.push(StepRecord {
                    step,
                    system: system.clone(),
                    qubo: qubo.clone(),
                    lowest_energy,
                    distinct_states: samples.len(),
                    num_reads: samples.num_reads(),
                });
            }
        }
    }

    Ok(RunOutput {
        classical,
        runs,
        warnings,
    })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<fs::File>>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn finish(mut writer: csv::Writer<BufWriter<fs::File>>, path: &Path) -> Result<()> {
    writer.flush().map_err(|e| Error::io(path, e))
}

fn dump_name(step: usize, strategy: Strategy) -> String {
    format!("step{step:03}_{strategy}")
}

/// Run the experiment and write all artifacts into `cfg.out_dir`:
/// `profiles.csv`, `errors.csv`, `center_dist.csv`, `manifest.txt`, and
/// per-step sample and QUBO dumps under `samples/` and `qubos/`.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let out = &cfg.out_dir;
    let sample_dir = out.join("samples");
    let qubo_dir = out.join("qubos");
    create_dir(&sample_dir)?;
    create_dir(&qubo_dir)?;

    let initial = SolutionProfile::zeros(cfg.flow.grid_points);
    let output = simulate(cfg, &initial, |step, strategy, qubo, samples| {
        let name = dump_name(step, strategy);
        qubo.write_file(&qubo_dir.join(format!("{name}.txt")))?;
        let path = sample_dir.join(format!("{name}.csv"));
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        samples.write_csv(BufWriter::new(file), Some(cfg.dump_limit))
    })?;

    write_profiles(cfg, &output, &out.join("profiles.csv"))?;
    write_errors(&output, &out.join("errors.csv"))?;
    write_center(&output, &out.join("center_dist.csv"))?;
    write_manifest(cfg, &output, &out.join("manifest.txt"))?;
    Ok(output)
}

fn write_profiles(cfg: &RunConfig, output: &RunOutput, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["step".to_string(), "index".into(), "y".into()];
    header.extend(output.runs.iter().map(|r| r.strategy.to_string()));
    header.push("classical".into());
    w.write_record(&header)?;
    for (step, classical) in output.classical.iter().enumerate() {
        for (i, c) in classical.values.iter().enumerate() {
            let mut row = vec![
                step.to_string(),
                i.to_string(),
                format!("{:?}", cfg.flow.y(i)),
            ];
            row.extend(
                output
                    .runs
                    .iter()
                    .map(|r| format!("{:?}", r.profiles[step].values[i])),
            );
            row.push(format!("{c:?}"));
            w.write_record(&row)?;
        }
    }
    finish(w, path)
}

fn write_errors(output: &RunOutput, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["step", "strategy", "n", "Ngp", "l2", "linf", "chebyshev"])?;
    let steps = output.classical.len().saturating_sub(1);
    for step in 0..steps {
        for run in &output.runs {
            let e = &run.errors[step];
            w.write_record([
                e.step.to_string(),
                e.strategy.to_string(),
                e.precision.to_string(),
                e.grid_points.to_string(),
                format!("{:?}", e.l2),
                format!("{:?}", e.linf),
                format!("{:?}", e.chebyshev),
            ])?;
        }
    }
    finish(w, path)
}

fn write_center(output: &RunOutput, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["step", "strategy", "value", "occurrences"])?;
    let steps = output.classical.len().saturating_sub(1);
    for step in 0..steps {
        for run in &output.runs {
            for (value, occ) in &run.center.steps[step] {
                w.write_record([
                    (step + 1).to_string(),
                    run.strategy.to_string(),
                    format!("{value:?}"),
                    occ.to_string(),
                ])?;
            }
        }
    }
    finish(w, path)
}

/// Manifest text: the full configuration as key=value lines, followed by
/// comment lines for metadata and warnings. Loading it back with
/// [`RunConfig::apply_text`] reproduces the run.
pub fn manifest_text(cfg: &RunConfig, output: &RunOutput) -> String {
    let mut text = String::from("# channel-qubo run manifest\n");
    for (key, value) in cfg.to_pairs() {
        text.push_str(&format!("{key}={value}\n"));
    }
    let (index, exact) = center_index(cfg.flow.grid_points);
    text.push_str(&format!(
        "# center grid index {index} ({})\n",
        if exact {
            "exact center"
        } else {
            "lower middle point; grid has no single center"
        }
    ));
    for warning in &output.warnings {
        text.push_str(&format!("# warning: {warning}\n"));
    }
    text
}

fn write_manifest(cfg: &RunConfig, output: &RunOutput, path: &Path) -> Result<()> {
    fs::write(path, manifest_text(cfg, output)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepStatus {
    Completed,
    Skipped,
}

impl fmt::Display for SweepStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepStatus::Completed => "completed",
            SweepStatus::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub grid_points: usize,
    pub precision: u32,
    pub size: usize,
    pub status: SweepStatus,
    pub reason: String,
    pub dir: PathBuf,
    pub output: Option<RunOutput>,
}

/// Why a sweep cell would not be run, if it would not.
fn skip_reason(cfg: &RunConfig) -> Option<String> {
    let size = cfg.problem_size();
    if !embeddable_hint(size, cfg.embed_budget) {
        return Some(format!("size {size} exceeds budget {}", cfg.embed_budget));
    }
    if cfg.sampler == SamplerKind::Exhaustive && size > EXHAUSTIVE_CAP {
        return Some(format!(
            "size {size} exceeds exhaustive cap {EXHAUSTIVE_CAP}"
        ));
    }
    None
}

/// Run every (grid points, precision) combination into its own
/// subdirectory of `base.out_dir` and write `sweep_index.csv` there.
pub fn sweep(
    base: &RunConfig,
    grid_points: &[usize],
    precisions: &[u32],
) -> Result<Vec<SweepEntry>> {
    let cells: Vec<RunConfig> = grid_points
        .iter()
        .flat_map(|&g| {
            precisions.iter().map(move |&n| {
                let mut cfg = base.clone();
                cfg.flow.grid_points = g;
                cfg.precision = n;
                cfg.out_dir = base.out_dir.join(format!("ngp{g}_n{n}"));
                cfg
            })
        })
        .collect();

    let entries = cells
        .into_par_iter()
        .map(|cfg| {
            let mut entry = SweepEntry {
                grid_points: cfg.flow.grid_points,
                precision: cfg.precision,
                size: cfg.problem_size(),
                status: SweepStatus::Skipped,
                reason: String::new(),
                dir: cfg.out_dir.clone(),
                output: None,
            };
            match skip_reason(&cfg) {
                Some(reason) => entry.reason = reason,
                None => {
                    entry.output = Some(run_experiment(&cfg)?);
                    entry.status = SweepStatus::Completed;
                }
            }
            Ok(entry)
        })
        .collect::<Result<Vec<_>>>()?;

    create_dir(&base.out_dir)?;
    let path = base.out_dir.join("sweep_index.csv");
    let mut w = csv_writer(&path)?;
    w.write_record([
        "grid_points",
        "precision",
        "size",
        "status",
        "reason",
        "dir",
    ])?;
    for e in &entries {
        let dir = e
            .dir
            .file_name()
            .map(|d| d.to_string_lossy().into_owned())
            .unwrap_or_default();
        w.write_record([
            e.grid_points.to_string(),
            e.precision.to_string(),
            e.size.to_string(),
            e.status.to_string(),
            e.reason.clone(),
            dir,
        ])?;
    }
    finish(w, &path)?;
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_pairs() {
        let mut cfg = RunConfig {
            sampler: SamplerKind::Exhaustive,
            strategies: vec![Strategy::WeightedMean, Strategy::LowestEnergy],
            t_initial: Some(2.5),
            feed: Feed::Classical,
            ..RunConfig::default()
        };
        cfg.flow.alpha = 0.1 + 0.2;
        let text: String = cfg
            .to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        let mut back = RunConfig::default();
        back.apply_text(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn config_rejects_unknown_keys_and_values() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set("colour", "blue").is_err());
        assert!(cfg.set("sampler", "quantum").is_err());
        assert!(cfg.set("strategy", "median").is_err());
        assert!(cfg.apply_text("grid_points 5").is_err());
        cfg.apply_text("# comment\n\n grid_points = 7 \n").unwrap();
        assert_eq!(cfg.flow.grid_points, 7);
    }

    #[test]
    fn exhaustive_over_cap_is_reported() {
        let cfg = RunConfig {
            sampler: SamplerKind::Exhaustive,
            precision: 8,
            flow: FlowParams::default().with_grid_points(7),
            ..RunConfig::default()
        };
        let err = cfg.validate().unwrap_err();
        assert!(matches!(err, Error::Capacity { vars: 40, .. }));
        assert!(err.to_string().contains("annealing"));
    }

    #[test]
    fn step_seeds_differ() {
        assert_ne!(step_seed(1, 1), step_seed(1, 2));
        assert_ne!(step_seed(1, 1), step_seed(2, 1));
        assert_eq!(step_seed(9, 3), step_seed(9, 3));
    }

    #[test]
    fn zero_steps_keeps_initial_profile() {
        let cfg = RunConfig {
            flow: FlowParams {
                n_steps: 0,
                ..FlowParams::default()
            },
            ..RunConfig::default()
        };
        let out = simulate(&cfg, &SolutionProfile::zeros(5), |_, _, _, _| Ok(())).unwrap();
        assert_eq!(out.classical.len(), 1);
        assert!(out
            .runs
            .iter()
            .all(|r| r.errors.is_empty() && r.profiles.len() == 1));
    }

    #[test]
    fn classical_feed_clamps_and_warns() {
        // j0 = -1 caps values at 0.5 * (1 - 2^-n); the classical profile
        // overshoots after a few steps with a strong pressure gradient.
        let cfg = RunConfig {
            sampler: SamplerKind::Exhaustive,
            precision: 2,
            radix_position: -1,
            feed: Feed::Classical,
            strategies: vec![Strategy::LowestEnergy],
            flow: FlowParams {
                pressure_gradient: -20.0,
                n_steps: 4,
                ..FlowParams::default()
            },
            ..RunConfig::default()
        };
        let out = simulate(&cfg, &SolutionProfile::zeros(5), |_, _, _, _| Ok(())).unwrap();
        assert!(!out.warnings.is_empty());
        assert!(out.warnings[0].contains("clamped"));
    }
}
