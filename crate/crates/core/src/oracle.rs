//! Fitness oracles: deterministic evaluators standing in for a trained
//! performance predictor.
//!
//! Discrete oracles decode each latent to a genotype and score it (tabular
//! benchmark tables, planted synthetic spaces); continuous oracles score the
//! raw latent (sphere, rastrigin). [`CachedOracle`] wraps any discrete
//! oracle with a cache keyed by the decoded genotype, so continuous
//! perturbations that decode identically cost nothing.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use ndarray::ArrayView2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::codec::{self, CodecError, Genotype, SearchSpaceShape};

/// What kind of input an oracle scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Latents are decoded to genotypes before scoring.
    Discrete(SearchSpaceShape),
    /// The raw latent vector is scored directly.
    Continuous { dim: usize },
}

impl OracleMode {
    /// Latent vector length the oracle expects.
    pub fn latent_dim(&self) -> usize {
        match self {
            OracleMode::Discrete(shape) => shape.latent_dim(),
            OracleMode::Continuous { dim } => *dim,
        }
    }
}

/// A deterministic batch fitness evaluator; higher fitness is better.
///
/// `eval_count` must grow by exactly the number of scored items, so a
/// caching layer in front of an oracle makes the count reflect cache
/// misses only. Implementations are safe to call concurrently.
pub trait FitnessOracle: Send + Sync {
    fn mode(&self) -> OracleMode;
    fn evaluate(&self, batch: ArrayView2<'_, f64>) -> Result<Vec<f64>, OracleError>;
    fn eval_count(&self) -> u64;
}

/// Loader behaviour for incomplete tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TabularOptions {
    /// Accept tables missing genotypes; absent entries score `floor`.
    pub allow_partial: bool,
    pub floor: f64,
}

impl Default for TabularOptions {
    fn default() -> Self {
        Self {
            allow_partial: false,
            floor: 0.0,
        }
    }
}

/// A complete (or explicitly partial) map from genotype to fitness.
#[derive(Debug, Clone)]
pub struct TabularBenchmark {
    shape: SearchSpaceShape,
    table: HashMap<Genotype, f64>,
    options: TabularOptions,
}

/// Header line of the on-disk table format.
pub const TABLE_HEADER: &str = "genotype,fitness";

/// Largest space the planted builder and brute-force scans will materialize.
pub const MAX_ENUMERABLE: u64 = 1_000_000;

impl TabularBenchmark {
    /// Builds a benchmark from parsed entries, rejecting duplicates and,
    /// unless `allow_partial`, incomplete tables.
    pub fn from_entries(
        shape: SearchSpaceShape,
        entries: Vec<(Genotype, f64)>,
        options: TabularOptions,
    ) -> Result<Self, OracleError> {
        let mut table = HashMap::with_capacity(entries.len());
        for (genotype, fitness) in entries {
            Genotype::new(genotype.ops().to_vec(), shape).map_err(OracleError::Codec)?;
            if !fitness.is_finite() {
                return Err(OracleError::Table(format!(
                    "non-finite fitness {fitness} for genotype {genotype}"
                )));
            }
            if table.insert(genotype.clone(), fitness).is_some() {
                return Err(OracleError::Table(format!(
                    "duplicate genotype {genotype}"
                )));
            }
        }
        let expected = codec::genotype_count(shape).map_err(OracleError::Codec)?;
        if !options.allow_partial && table.len() as u64 != expected {
            return Err(OracleError::Table(format!(
                "table has {} entries, expected {expected} for shape {shape}",
                table.len()
            )));
        }
        Ok(Self {
            shape,
            table,
            options,
        })
    }

    /// Parses the on-disk format: a `genotype,fitness` header followed by
    /// one `<dash-joined-ops>,<decimal>` entry per line.
    pub fn load(
        path: &Path,
        shape: SearchSpaceShape,
        options: TabularOptions,
    ) -> Result<Self, OracleError> {
        let text = fs::read_to_string(path).map_err(|e| OracleError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header == TABLE_HEADER => {}
            Some((_, header)) => {
                return Err(OracleError::Table(format!(
                    "line 1: expected header {TABLE_HEADER:?}, got {header:?}"
                )))
            }
            None => return Err(OracleError::Table("empty table file".to_string())),
        }
        let mut entries = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let (geno_text, fit_text) = line.split_once(',').ok_or_else(|| {
                OracleError::Table(format!("line {line_no}: missing comma in {line:?}"))
            })?;
            let genotype = Genotype::parse(geno_text, shape)
                .map_err(|e| OracleError::Table(format!("line {line_no}: {e}")))?;
            let fitness: f64 = fit_text.parse().map_err(|_| {
                OracleError::Table(format!("line {line_no}: invalid fitness {fit_text:?}"))
            })?;
            if !fitness.is_finite() {
                return Err(OracleError::Table(format!(
                    "line {line_no}: non-finite fitness {fit_text:?}"
                )));
            }
            entries.push((genotype, fitness));
        }
        // duplicate detection re-runs in from_entries; report line-free there
        Self::from_entries(shape, entries, options)
    }

    /// Renders the benchmark in the on-disk format, entries in lexicographic
    /// genotype order, `\n` line endings.
    pub fn to_table_string(&self) -> String {
        let mut buf = String::with_capacity(self.table.len() * 16);
        buf.push_str(TABLE_HEADER);
        buf.push('\n');
        let mut keys: Vec<&Genotype> = self.table.keys().collect();
        keys.sort();
        for g in keys {
            buf.push_str(&g.to_string());
            buf.push(',');
            buf.push_str(&self.table[g].to_string());
            buf.push('\n');
        }
        buf
    }

    /// Writes [`TabularBenchmark::to_table_string`] to `path`.
    pub fn save(&self, path: &Path) -> Result<(), OracleError> {
        let mut file = fs::File::create(path).map_err(|e| OracleError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        file.write_all(self.to_table_string().as_bytes())
            .map_err(|e| OracleError::Io {
                path: path.display().to_string(),
                source: e,
            })
    }

    /// Builds a complete synthetic space with a known optimum:
    /// `fitness(g) = 1 - hamming(g, optimum)/d1 + smoothness * u(g)` with
    /// `u(g)` seeded uniform noise in `[-1, 1]`. The optimum scores exactly
    /// 1 and every other genotype is clamped below `1 - 1e-3`, so the
    /// planted optimum is the unique argmax by construction.
    pub fn planted(
        shape: SearchSpaceShape,
        optimum: &Genotype,
        smoothness: f64,
        seed: u64,
    ) -> Result<Self, OracleError> {
        let optimum = Genotype::new(optimum.ops().to_vec(), shape).map_err(OracleError::Codec)?;
        if !smoothness.is_finite() || smoothness < 0.0 {
            return Err(OracleError::Table(format!(
                "smoothness must be finite and non-negative, got {smoothness}"
            )));
        }
        let count = codec::genotype_count(shape).map_err(OracleError::Codec)?;
        if count > MAX_ENUMERABLE {
            return Err(OracleError::CapExceeded {
                count,
                cap: MAX_ENUMERABLE,
            });
        }
        const MARGIN: f64 = 1e-3;
        let d1 = shape.slots() as f64;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut entries = Vec::with_capacity(count as usize);
        for genotype in codec::enumerate(shape) {
            // one draw per genotype in enumeration order keeps the table a
            // pure function of (shape, optimum, smoothness, seed)
            let noise: f64 = rng.random_range(-1.0..1.0);
            let fitness = if genotype == optimum {
                1.0
            } else {
                let base = 1.0 - genotype.hamming(&optimum) as f64 / d1;
                (base + smoothness * noise).min(1.0 - MARGIN)
            };
            entries.push((genotype, fitness));
        }
        let bench = Self::from_entries(shape, entries, TabularOptions::default())?;
        debug_assert!(bench
            .table
            .iter()
            .all(|(g, &f)| *g == optimum || f < bench.table[&optimum]));
        Ok(bench)
    }

    pub fn shape(&self) -> SearchSpaceShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, genotype: &Genotype) -> Option<f64> {
        self.table.get(genotype).copied()
    }

    /// Fitness of `genotype`, applying the partial-table floor when enabled.
    pub fn fitness_of(&self, genotype: &Genotype) -> Result<f64, OracleError> {
        match self.table.get(genotype) {
            Some(&f) => Ok(f),
            None if self.options.allow_partial => Ok(self.options.floor),
            None => Err(OracleError::MissingGenotype {
                genotype: genotype.to_string(),
            }),
        }
    }

    /// Entries in lexicographic genotype order.
    pub fn sorted_entries(&self) -> Vec<(Genotype, f64)> {
        let mut entries: Vec<(Genotype, f64)> =
            self.table.iter().map(|(g, &f)| (g.clone(), f)).collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        entries
    }
}

/// Direct table lookup oracle; every scored item counts as one evaluation.
pub struct TabularOracle {
    bench: TabularBenchmark,
    evals: AtomicU64,
}

impl TabularOracle {
    pub fn new(bench: TabularBenchmark) -> Self {
        Self {
            bench,
            evals: AtomicU64::new(0),
        }
    }

    pub fn benchmark(&self) -> &TabularBenchmark {
        &self.bench
    }
}

impl FitnessOracle for TabularOracle {
    fn mode(&self) -> OracleMode {
        OracleMode::Discrete(self.bench.shape)
    }

    fn evaluate(&self, batch: ArrayView2<'_, f64>) -> Result<Vec<f64>, OracleError> {
        let batch = batch.as_standard_layout();
        let shape = self.bench.shape;
        let mut out = Vec::with_capacity(batch.nrows());
        for row in batch.rows() {
            let latent = row.as_slice().expect("standard-layout rows are contiguous");
            let genotype = codec::decode(latent, shape).map_err(OracleError::Codec)?;
            out.push(self.bench.fitness_of(&genotype)?);
        }
        self.evals.fetch_add(batch.nrows() as u64, Ordering::Relaxed);
        Ok(out)
    }

    fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }
}

/// Cache keyed by decoded genotype in front of a discrete oracle.
///
/// Results are identical with or without the wrapper; only the inner
/// oracle's evaluation count changes, growing by the number of distinct
/// uncached genotypes per batch. Inserts are serialized behind a mutex.
pub struct CachedOracle<O: FitnessOracle> {
    inner: O,
    shape: SearchSpaceShape,
    cache: Mutex<HashMap<Genotype, f64>>,
}

impl<O: FitnessOracle> CachedOracle<O> {
    pub fn new(inner: O) -> Result<Self, OracleError> {
        match inner.mode() {
            OracleMode::Discrete(shape) => Ok(Self {
                inner,
                shape,
                cache: Mutex::new(HashMap::new()),
            }),
            OracleMode::Continuous { .. } => Err(OracleError::Table(
                "cache requires a discrete-mode oracle".to_string(),
            )),
        }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: FitnessOracle> FitnessOracle for CachedOracle<O> {
    fn mode(&self) -> OracleMode {
        self.inner.mode()
    }

    fn evaluate(&self, batch: ArrayView2<'_, f64>) -> Result<Vec<f64>, OracleError> {
        let batch = batch.as_standard_layout();
        let mut genotypes = Vec::with_capacity(batch.nrows());
        for row in batch.rows() {
            let latent = row.as_slice().expect("standard-layout rows are contiguous");
            genotypes.push(codec::decode(latent, self.shape).map_err(OracleError::Codec)?);
        }

        let mut cache = self.cache.lock().expect("oracle cache poisoned");
        // first occurrence of each uncached genotype, in batch order
        let mut miss_rows: Vec<usize> = Vec::new();
        let mut pending: Vec<&Genotype> = Vec::new();
        for (i, g) in genotypes.iter().enumerate() {
            if !cache.contains_key(g) && !pending.contains(&g) {
                miss_rows.push(i);
                pending.push(g);
            }
        }
        if !miss_rows.is_empty() {
            let sub = batch.select(ndarray::Axis(0), &miss_rows);
            let scores = self.inner.evaluate(sub.view())?;
            for (&row, score) in miss_rows.iter().zip(scores) {
                cache.insert(genotypes[row].clone(), score);
            }
        }
        Ok(genotypes.iter().map(|g| cache[g]).collect())
    }

    fn eval_count(&self) -> u64 {
        self.inner.eval_count()
    }
}

/// Closed-form test functions in maximization framing (negated losses).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticFunction {
    /// `-sum(x_k^2)`, global maximum 0 at the origin.
    Sphere { dim: usize },
    /// `-(10 d + sum(x_k^2 - 10 cos(2 pi x_k)))`, global maximum 0 at the
    /// origin, heavily multimodal elsewhere.
    Rastrigin { dim: usize },
}

impl SyntheticFunction {
    pub fn dim(&self) -> usize {
        match self {
            SyntheticFunction::Sphere { dim } | SyntheticFunction::Rastrigin { dim } => *dim,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            SyntheticFunction::Sphere { .. } => -x.iter().map(|v| v * v).sum::<f64>(),
            SyntheticFunction::Rastrigin { .. } => {
                let d = x.len() as f64;
                let sum: f64 = x
                    .iter()
                    .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                    .sum();
                -(10.0 * d + sum)
            }
        }
    }
}

impl fmt::Display for SyntheticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntheticFunction::Sphere { dim } => write!(f, "sphere(dim={dim})"),
            SyntheticFunction::Rastrigin { dim } => write!(f, "rastrigin(dim={dim})"),
        }
    }
}

/// Continuous-mode oracle over a [`SyntheticFunction`].
pub struct SyntheticOracle {
    func: SyntheticFunction,
    evals: AtomicU64,
}

impl SyntheticOracle {
    pub fn new(func: SyntheticFunction) -> Self {
        Self {
            func,
            evals: AtomicU64::new(0),
        }
    }
}

impl FitnessOracle for SyntheticOracle {
    fn mode(&self) -> OracleMode {
        OracleMode::Continuous {
            dim: self.func.dim(),
        }
    }

    fn evaluate(&self, batch: ArrayView2<'_, f64>) -> Result<Vec<f64>, OracleError> {
        if batch.ncols() != self.func.dim() {
            return Err(OracleError::Table(format!(
                "batch has {} dims, {} expects {}",
                batch.ncols(),
                self.func,
                self.func.dim()
            )));
        }
        let batch = batch.as_standard_layout();
        let out = batch
            .rows()
            .into_iter()
            .map(|row| {
                self.func
                    .value(row.as_slice().expect("standard-layout rows are contiguous"))
            })
            .collect();
        self.evals.fetch_add(batch.nrows() as u64, Ordering::Relaxed);
        Ok(out)
    }

    fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Codec(CodecError),
    #[error("table error: {0}")]
    Table(String),
    #[error("genotype {genotype} not present in table")]
    MissingGenotype { genotype: String },
    #[error("space has {count} genotypes, exceeding the cap of {cap}")]
    CapExceeded { count: u64, cap: u64 },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
