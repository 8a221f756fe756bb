//! Network-free neural architecture generation.
//!
//! A population of continuous architecture encodings starts as Gaussian
//! noise and is denoised toward task-optimal genotypes by an evolutionary
//! simulation of implicit-model sampling: per-individual fitness replaces a
//! trained noise-prediction network. Each step maps fitness to density
//! weights, estimates the clean sample as a weighted combination of the
//! population, applies the denoising update with mutation noise, and keeps
//! the best of parents and offspring via elitist / diversity / roulette
//! selection.
//!
//! Modules:
//! - [`codec`] — latent matrices <-> discrete genotypes
//! - [`schedule`] — the `abar_t` noise schedule and step coefficients
//! - [`denoise`] — fitness-guided clean-sample estimation and the update
//! - [`selection`] — survivor selection over parents and offspring
//! - [`oracle`] — pluggable fitness evaluation (tables, synthetics, caching)
//! - [`engine`] — the generation loop, brute-force verification, baselines

pub mod codec;
pub mod denoise;
pub mod engine;
pub mod oracle;
pub mod schedule;
pub mod selection;

pub use codec::{decode, encode, genotype_count, CodecError, Genotype, SearchSpaceShape};
pub use denoise::{denoise_step, estimate_x0, map_fitness, DenoiseError, DensityWeights};
pub use engine::{
    brute_force_optimum, random_search_baseline, run, run_continuous, ContinuousRunResult,
    EngineError, GenerationConfig, RankedGenotype, RunParams, RunResult, RunTrace, ScheduleParams,
    StepRecord, DEFAULT_BRUTE_FORCE_CAP,
};
pub use oracle::{
    CachedOracle, FitnessOracle, OracleError, OracleMode, SyntheticFunction, SyntheticOracle,
    TabularBenchmark, TabularOptions, TabularOracle,
};
pub use schedule::{NoiseSchedule, ScheduleError, StepCoefficients};
pub use selection::{
    select, CandidatePool, Origin, SelectionConfig, SelectionError, SelectionReport, SlotCounts,
};
