//! Command implementations behind the `archevo` binary: config parsing with
//! strict keys and flag overrides, experiment runs with atomically written
//! outputs, benchmark table generation, and brute-force verification.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use archevo::{
    brute_force_optimum, codec, run, run_continuous, CachedOracle, CodecError, DenoiseError,
    EngineError, GenerationConfig, Genotype, OracleError, RankedGenotype, RunParams, RunTrace,
    ScheduleParams, SearchSpaceShape, SelectionConfig, SyntheticFunction, TabularBenchmark,
    TabularOptions, TabularOracle,
};

/// Errors carry their process exit code: 2 config, 3 oracle/IO, 4 numerical.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    OracleIo(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::OracleIo(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) | CliError::OracleIo(msg) | CliError::Numerical(msg) => {
                write!(f, "{msg}")
            }
        }
    }
}

impl std::error::Error for CliError {}

fn classify_engine(e: EngineError) -> CliError {
    match e {
        EngineError::Config(_)
        | EngineError::CapExceeded { .. }
        | EngineError::Schedule(_)
        | EngineError::Selection(_) => CliError::Config(e.to_string()),
        EngineError::NonFinitePopulation { .. } => CliError::Numerical(e.to_string()),
        EngineError::OracleInit { ref source } | EngineError::OracleStep { ref source, .. } => {
            match source {
                OracleError::Codec(CodecError::NonFiniteLatent { .. }) => {
                    CliError::Numerical(e.to_string())
                }
                _ => CliError::OracleIo(e.to_string()),
            }
        }
        EngineError::Codec(CodecError::NonFiniteLatent { .. }) => {
            CliError::Numerical(e.to_string())
        }
        EngineError::Codec(_) => CliError::Config(e.to_string()),
        EngineError::Denoise(DenoiseError::NonFiniteFitness { .. })
        | EngineError::Denoise(DenoiseError::Internal(_)) => CliError::Numerical(e.to_string()),
        EngineError::Denoise(_) => CliError::Config(e.to_string()),
        EngineError::Oracle(_) => CliError::OracleIo(e.to_string()),
    }
}

fn classify_oracle(e: OracleError) -> CliError {
    match e {
        OracleError::Codec(CodecError::NonFiniteLatent { .. }) => {
            CliError::Numerical(e.to_string())
        }
        OracleError::Codec(_) | OracleError::CapExceeded { .. } => CliError::Config(e.to_string()),
        OracleError::Table(_) | OracleError::MissingGenotype { .. } | OracleError::Io { .. } => {
            CliError::OracleIo(e.to_string())
        }
    }
}

mod defaults {
    use std::path::PathBuf;

    pub fn population() -> usize {
        30
    }
    pub fn steps() -> usize {
        100
    }
    pub fn abar_start() -> f64 {
        archevo::schedule::DEFAULT_ABAR_START
    }
    pub fn abar_end() -> f64 {
        archevo::schedule::DEFAULT_ABAR_END
    }
    pub fn sigma() -> f64 {
        0.8
    }
    pub fn beta() -> f64 {
        10.0
    }
    pub fn frac_elite() -> f64 {
        0.10
    }
    pub fn frac_diverse() -> f64 {
        0.20
    }
    pub fn frac_roulette() -> f64 {
        0.70
    }
    pub fn topk() -> usize {
        5
    }
    pub fn out() -> PathBuf {
        PathBuf::from("out")
    }
    pub fn smoothness() -> f64 {
        0.05
    }
}

/// A run configuration file. Unknown keys are rejected; omitted keys take
/// the documented defaults.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<usize>,
    #[serde(default = "defaults::population")]
    pub population: usize,
    #[serde(default = "defaults::steps")]
    pub steps: usize,
    #[serde(default = "defaults::abar_start")]
    pub abar_start: f64,
    #[serde(default = "defaults::abar_end")]
    pub abar_end: f64,
    #[serde(default = "defaults::sigma")]
    pub sigma: f64,
    #[serde(default = "defaults::beta")]
    pub beta: f64,
    #[serde(default = "defaults::frac_elite")]
    pub frac_elite: f64,
    #[serde(default = "defaults::frac_diverse")]
    pub frac_diverse: f64,
    #[serde(default = "defaults::frac_roulette")]
    pub frac_roulette: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::topk")]
    pub topk: usize,
    #[serde(default = "defaults::out")]
    pub out: PathBuf,
    pub oracle: OracleSpec,
}

/// The `[oracle]` section: a type tag plus per-type keys, validated in
/// [`RunSpec::normalize`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimum: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allow_partial: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
}

/// What a validated spec resolves to.
pub enum ResolvedOracle {
    Tabular {
        shape: SearchSpaceShape,
        path: PathBuf,
        options: TabularOptions,
    },
    Planted {
        shape: SearchSpaceShape,
        optimum: Genotype,
        smoothness: f64,
        seed: u64,
    },
    Synthetic(SyntheticFunction),
}

impl RunSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config error: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, setting: &str) -> Result<(), CliError> {
        let (key, value) = setting.split_once('=').ok_or_else(|| {
            CliError::Config(format!("override {setting:?} is not of the form key=value"))
        })?;
        let bad = |e: &dyn fmt::Display| {
            CliError::Config(format!("override {key}={value}: invalid value ({e})"))
        };
        match key {
            "d1" => self.d1 = Some(value.parse().map_err(|e| bad(&e))?),
            "d2" => self.d2 = Some(value.parse().map_err(|e| bad(&e))?),
            "population" => self.population = value.parse().map_err(|e| bad(&e))?,
            "steps" => self.steps = value.parse().map_err(|e| bad(&e))?,
            "abar_start" => self.abar_start = value.parse().map_err(|e| bad(&e))?,
            "abar_end" => self.abar_end = value.parse().map_err(|e| bad(&e))?,
            "sigma" => self.sigma = value.parse().map_err(|e| bad(&e))?,
            "beta" => self.beta = value.parse().map_err(|e| bad(&e))?,
            "frac_elite" => self.frac_elite = value.parse().map_err(|e| bad(&e))?,
            "frac_diverse" => self.frac_diverse = value.parse().map_err(|e| bad(&e))?,
            "frac_roulette" => self.frac_roulette = value.parse().map_err(|e| bad(&e))?,
            "seed" => self.seed = value.parse().map_err(|e| bad(&e))?,
            "topk" => self.topk = value.parse().map_err(|e| bad(&e))?,
            "out" => self.out = PathBuf::from(value),
            "oracle.type" => self.oracle.kind = value.to_string(),
            "oracle.path" => self.oracle.path = Some(PathBuf::from(value)),
            "oracle.optimum" => self.oracle.optimum = Some(value.to_string()),
            "oracle.smoothness" => {
                self.oracle.smoothness = Some(value.parse().map_err(|e| bad(&e))?)
            }
            "oracle.seed" => self.oracle.seed = Some(value.parse().map_err(|e| bad(&e))?),
            "oracle.dim" => self.oracle.dim = Some(value.parse().map_err(|e| bad(&e))?),
            "oracle.allow_partial" => {
                self.oracle.allow_partial = Some(value.parse().map_err(|e| bad(&e))?)
            }
            "oracle.floor" => self.oracle.floor = Some(value.parse().map_err(|e| bad(&e))?),
            other => return Err(CliError::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    fn shape(&self) -> Result<SearchSpaceShape, CliError> {
        match (self.d1, self.d2) {
            (Some(d1), Some(d2)) => SearchSpaceShape::new(d1, d2)
                .map_err(|e| CliError::Config(format!("config error: {e}"))),
            _ => Err(CliError::Config(format!(
                "oracle type {:?} needs both d1 and d2",
                self.oracle.kind
            ))),
        }
    }

    fn forbid(&self, field: &str, present: bool) -> Result<(), CliError> {
        if present {
            return Err(CliError::Config(format!(
                "key {field:?} is not used by oracle type {:?}",
                self.oracle.kind
            )));
        }
        Ok(())
    }

    /// Validates per-oracle keys, fills effective defaults into the spec
    /// (so the echoed config carries them), and resolves the oracle.
    pub fn normalize(&mut self) -> Result<ResolvedOracle, CliError> {
        let resolved = match self.oracle.kind.as_str() {
            "tabular" => {
                self.forbid("oracle.optimum", self.oracle.optimum.is_some())?;
                self.forbid("oracle.smoothness", self.oracle.smoothness.is_some())?;
                self.forbid("oracle.seed", self.oracle.seed.is_some())?;
                self.forbid("oracle.dim", self.oracle.dim.is_some())?;
                let path = self.oracle.path.clone().ok_or_else(|| {
                    CliError::Config("oracle type \"tabular\" needs oracle.path".to_string())
                })?;
                let allow_partial = *self.oracle.allow_partial.get_or_insert(false);
                let floor = *self.oracle.floor.get_or_insert(0.0);
                ResolvedOracle::Tabular {
                    shape: self.shape()?,
                    path,
                    options: TabularOptions {
                        allow_partial,
                        floor,
                    },
                }
            }
            "planted" => {
                self.forbid("oracle.path", self.oracle.path.is_some())?;
                self.forbid("oracle.dim", self.oracle.dim.is_some())?;
                self.forbid("oracle.allow_partial", self.oracle.allow_partial.is_some())?;
                self.forbid("oracle.floor", self.oracle.floor.is_some())?;
                let shape = self.shape()?;
                let optimum_text = self.oracle.optimum.clone().ok_or_else(|| {
                    CliError::Config("oracle type \"planted\" needs oracle.optimum".to_string())
                })?;
                let optimum = Genotype::parse(&optimum_text, shape)
                    .map_err(|e| CliError::Config(format!("oracle.optimum: {e}")))?;
                let smoothness = *self.oracle.smoothness.get_or_insert(defaults::smoothness());
                let seed = *self.oracle.seed.get_or_insert(0);
                ResolvedOracle::Planted {
                    shape,
                    optimum,
                    smoothness,
                    seed,
                }
            }
            "sphere" | "rastrigin" => {
                self.forbid("d1", self.d1.is_some())?;
                self.forbid("d2", self.d2.is_some())?;
                self.forbid("oracle.path", self.oracle.path.is_some())?;
                self.forbid("oracle.optimum", self.oracle.optimum.is_some())?;
                self.forbid("oracle.smoothness", self.oracle.smoothness.is_some())?;
                self.forbid("oracle.seed", self.oracle.seed.is_some())?;
                self.forbid("oracle.allow_partial", self.oracle.allow_partial.is_some())?;
                self.forbid("oracle.floor", self.oracle.floor.is_some())?;
                let dim = self.oracle.dim.ok_or_else(|| {
                    CliError::Config(format!(
                        "oracle type {:?} needs oracle.dim",
                        self.oracle.kind
                    ))
                })?;
                if dim == 0 {
                    return Err(CliError::Config("oracle.dim must be positive".to_string()));
                }
                ResolvedOracle::Synthetic(if self.oracle.kind == "sphere" {
                    SyntheticFunction::Sphere { dim }
                } else {
                    SyntheticFunction::Rastrigin { dim }
                })
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown oracle type {other:?} (expected tabular, planted, sphere, or rastrigin)"
                )))
            }
        };
        Ok(resolved)
    }

    fn run_params(&self) -> RunParams {
        RunParams {
            population: self.population,
            schedule: ScheduleParams {
                steps: self.steps,
                abar_start: self.abar_start,
                abar_end: self.abar_end,
                sigma: self.sigma,
            },
            beta: self.beta,
            selection: Some(SelectionConfig {
                frac_elite: self.frac_elite,
                frac_diverse: self.frac_diverse,
                frac_roulette: self.frac_roulette,
            }),
            seed: self.seed,
        }
    }
}

#[derive(Serialize)]
struct DiscreteResultDoc<'a> {
    config: &'a RunSpec,
    topk: &'a [RankedGenotype],
    evaluations: u64,
}

#[derive(Serialize)]
struct ContinuousResultDoc<'a> {
    config: &'a RunSpec,
    best_latent: &'a [f64],
    best_value: f64,
    evaluations: u64,
}

/// What `run` printed, for callers that embed the library.
pub enum RunSummary {
    Discrete { genotype: String, fitness: f64 },
    Continuous { best_value: f64 },
}

impl RunSummary {
    pub fn to_line(&self) -> String {
        match self {
            RunSummary::Discrete { genotype, fitness } => format!("{genotype} {fitness}"),
            RunSummary::Continuous { best_value } => format!("{best_value}"),
        }
    }
}

/// Executes a configured run and writes `result.json` and `trace.csv` into
/// the output directory. Dedicated flags win over `--set`, which wins over
/// the config file.
pub fn cmd_run(
    config_path: &Path,
    sets: &[String],
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<RunSummary, CliError> {
    let mut spec = RunSpec::load(config_path)?;
    for setting in sets {
        spec.apply_override(setting)?;
    }
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    if let Some(out) = out {
        spec.out = out;
    }
    let resolved = spec.normalize()?;

    let (summary, result_json, trace) = match resolved {
        ResolvedOracle::Tabular {
            shape,
            path,
            options,
        } => {
            let bench = TabularBenchmark::load(&path, shape, options).map_err(classify_oracle)?;
            let oracle = CachedOracle::new(TabularOracle::new(bench)).map_err(classify_oracle)?;
            discrete_run(&spec, shape, &oracle)?
        }
        ResolvedOracle::Planted {
            shape,
            optimum,
            smoothness,
            seed,
        } => {
            let bench = TabularBenchmark::planted(shape, &optimum, smoothness, seed)
                .map_err(classify_oracle)?;
            let oracle = CachedOracle::new(TabularOracle::new(bench)).map_err(classify_oracle)?;
            discrete_run(&spec, shape, &oracle)?
        }
        ResolvedOracle::Synthetic(function) => {
            let result = run_continuous(&spec.run_params(), function).map_err(classify_engine)?;
            let doc = ContinuousResultDoc {
                config: &spec,
                best_latent: &result.best_latent,
                best_value: result.best_value,
                evaluations: result.evaluations,
            };
            (
                RunSummary::Continuous {
                    best_value: result.best_value,
                },
                to_json_bytes(&doc)?,
                result.trace,
            )
        }
    };

    fs::create_dir_all(&spec.out).map_err(|e| {
        CliError::OracleIo(format!(
            "cannot create output dir {}: {e}",
            spec.out.display()
        ))
    })?;
    write_atomic(&spec.out.join("result.json"), &result_json)?;
    write_atomic(&spec.out.join("trace.csv"), trace.to_csv().as_bytes())?;
    Ok(summary)
}

fn discrete_run(
    spec: &RunSpec,
    shape: SearchSpaceShape,
    oracle: &dyn archevo::FitnessOracle,
) -> Result<(RunSummary, Vec<u8>, RunTrace), CliError> {
    let config = GenerationConfig {
        shape,
        topk: spec.topk,
        params: spec.run_params(),
    };
    let result = run(&config, oracle).map_err(classify_engine)?;
    let top = result
        .topk
        .first()
        .expect("a successful run reports at least one genotype");
    let doc = DiscreteResultDoc {
        config: spec,
        topk: &result.topk,
        evaluations: result.evaluations,
    };
    Ok((
        RunSummary::Discrete {
            genotype: top.genotype.to_string(),
            fitness: top.fitness,
        },
        to_json_bytes(&doc)?,
        result.trace,
    ))
}

/// Generates a planted benchmark table at `out`.
pub fn cmd_gen_table(
    d1: usize,
    d2: usize,
    optimum: &str,
    smoothness: f64,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let shape =
        SearchSpaceShape::new(d1, d2).map_err(|e| CliError::Config(format!("shape: {e}")))?;
    let optimum =
        Genotype::parse(optimum, shape).map_err(|e| CliError::Config(format!("optimum: {e}")))?;
    let bench =
        TabularBenchmark::planted(shape, &optimum, smoothness, seed).map_err(|e| match e {
            OracleError::CapExceeded { .. } => CliError::Config(e.to_string()),
            other => classify_oracle(other),
        })?;
    write_atomic(out, bench.to_table_string().as_bytes())
}

/// Prints the exhaustive optimum of a table whose shape is inferred from
/// its entries.
pub fn cmd_verify(table: &Path, cap: u64) -> Result<(Genotype, f64), CliError> {
    let shape = infer_table_shape(table)?;
    let count =
        codec::genotype_count(shape).map_err(|e| CliError::Config(format!("table shape: {e}")))?;
    if count > cap {
        return Err(CliError::Config(format!(
            "table spans {count} genotypes, exceeding the cap of {cap}; raise --cap to scan anyway"
        )));
    }
    let bench =
        TabularBenchmark::load(table, shape, TabularOptions::default()).map_err(classify_oracle)?;
    brute_force_optimum(&bench, cap).map_err(classify_engine)
}

/// Shape of a stored table: slot count from the first entry, choice count
/// from the largest op index seen (complete tables contain it).
fn infer_table_shape(path: &Path) -> Result<SearchSpaceShape, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::OracleIo(format!("cannot read table {}: {e}", path.display())))?;
    let mut d1: Option<usize> = None;
    let mut max_op = 0usize;
    for (idx, line) in text.lines().enumerate().skip(1) {
        let line_no = idx + 1;
        let (geno_text, _) = line.split_once(',').ok_or_else(|| {
            CliError::OracleIo(format!("table line {line_no}: missing comma in {line:?}"))
        })?;
        let genotype: Genotype = geno_text
            .parse()
            .map_err(|e| CliError::OracleIo(format!("table line {line_no}: {e}")))?;
        d1.get_or_insert(genotype.ops().len());
        max_op = max_op.max(genotype.ops().iter().copied().max().unwrap_or(0));
    }
    let d1 =
        d1.ok_or_else(|| CliError::OracleIo(format!("table {} has no entries", path.display())))?;
    SearchSpaceShape::new(d1, max_op + 1)
        .map_err(|e| CliError::OracleIo(format!("table shape: {e}")))
}

fn to_json_bytes<T: Serialize>(doc: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(doc)
        .map_err(|e| CliError::Config(format!("cannot serialize result: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Temp-then-rename in the destination directory, so interrupted runs never
/// leave partial files.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io_err =
        |e: &dyn fmt::Display| CliError::OracleIo(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(&e))?;
    tmp.write_all(contents).map_err(|e| io_err(&e))?;
    tmp.persist(path).map_err(|e| io_err(&e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLANTED: &str = r#"
d1 = 6
d2 = 5
seed = 3
topk = 5

[oracle]
type = "planted"
optimum = "4-0-3-1-4-0"
smoothness = 0.05
seed = 7
"#;

    #[test]
    fn defaults_fill_in() {
        let spec = RunSpec::parse(PLANTED).unwrap();
        assert_eq!(spec.population, 30);
        assert_eq!(spec.steps, 100);
        assert_eq!(spec.sigma, 0.8);
        assert_eq!(spec.beta, 10.0);
        assert_eq!(spec.frac_elite, 0.10);
        assert_eq!(spec.frac_diverse, 0.20);
        assert_eq!(spec.frac_roulette, 0.70);
        assert_eq!(spec.topk, 5);
        assert_eq!(spec.seed, 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunSpec::parse("unknown_key = 1\n[oracle]\ntype = \"sphere\"\ndim = 4\n").is_err());
        assert!(RunSpec::parse("[oracle]\ntype = \"sphere\"\ndim = 4\nextra = 2\n").is_err());
    }

    #[test]
    fn overrides_apply_in_order() {
        let mut spec = RunSpec::parse(PLANTED).unwrap();
        spec.apply_override("beta=20").unwrap();
        spec.apply_override("beta=30").unwrap();
        spec.apply_override("oracle.smoothness=0.1").unwrap();
        assert_eq!(spec.beta, 30.0);
        assert_eq!(spec.oracle.smoothness, Some(0.1));
        assert!(spec.apply_override("nonsense=1").is_err());
        assert!(spec.apply_override("beta").is_err());
        assert!(spec.apply_override("beta=x").is_err());
    }

    #[test]
    fn normalize_validates_per_oracle_keys() {
        let mut spec = RunSpec::parse(PLANTED).unwrap();
        assert!(matches!(
            spec.normalize().unwrap(),
            ResolvedOracle::Planted { .. }
        ));
        // defaults were materialized into the echoed config
        assert_eq!(spec.oracle.smoothness, Some(0.05));
        assert_eq!(spec.oracle.seed, Some(7));

        let mut spec = RunSpec::parse(PLANTED).unwrap();
        spec.apply_override("oracle.path=foo.csv").unwrap();
        assert!(spec.normalize().is_err(), "path is not a planted key");

        let mut spec = RunSpec::parse("[oracle]\ntype = \"sphere\"\ndim = 8\n").unwrap();
        assert!(matches!(
            spec.normalize().unwrap(),
            ResolvedOracle::Synthetic(SyntheticFunction::Sphere { dim: 8 })
        ));

        let mut spec =
            RunSpec::parse("d1 = 3\nd2 = 4\n[oracle]\ntype = \"sphere\"\ndim = 8\n").unwrap();
        assert!(spec.normalize().is_err(), "d1/d2 invalid for sphere");

        let mut spec = RunSpec::parse("[oracle]\ntype = \"mystery\"\n").unwrap();
        assert!(spec.normalize().is_err());

        let mut spec = RunSpec::parse("d1 = 2\nd2 = 2\n[oracle]\ntype = \"tabular\"\n").unwrap();
        assert!(spec.normalize().is_err(), "tabular needs a path");
    }

    #[test]
    fn exit_codes_match_error_classes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::OracleIo("x".into()).exit_code(), 3);
        assert_eq!(CliError::Numerical("x".into()).exit_code(), 4);
    }
}
