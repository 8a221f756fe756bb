//! Conversion between continuous latent matrices and discrete architecture
//! genotypes for cell-based search spaces.
//!
//! An individual lives in `R^(d1*d2)`: one row of `d2` scores per decision
//! slot, flattened row-major. Decoding takes the argmax of each row, so any
//! row-wise strictly monotone rescaling of the scores decodes identically.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dimensions of a cell-based search space: `d1` decision slots (e.g. cell
/// edges), each choosing one of `d2` operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchSpaceShape {
    d1: usize,
    d2: usize,
}

impl SearchSpaceShape {
    pub fn new(d1: usize, d2: usize) -> Result<Self, CodecError> {
        if d1 < 1 || d2 < 2 {
            return Err(CodecError::InvalidShape { d1, d2 });
        }
        Ok(Self { d1, d2 })
    }

    pub fn slots(&self) -> usize {
        self.d1
    }

    pub fn choices(&self) -> usize {
        self.d2
    }

    /// Length of a flattened latent vector for this space.
    pub fn latent_dim(&self) -> usize {
        self.d1 * self.d2
    }
}

impl fmt::Display for SearchSpaceShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.d1, self.d2)
    }
}

/// Total number of distinct genotypes, `d2^d1`. Fails instead of wrapping
/// when the count exceeds `u64`.
pub fn genotype_count(shape: SearchSpaceShape) -> Result<u64, CodecError> {
    let d1 = u32::try_from(shape.d1).map_err(|_| CodecError::CountOverflow {
        d1: shape.d1,
        d2: shape.d2,
    })?;
    (shape.d2 as u64)
        .checked_pow(d1)
        .ok_or(CodecError::CountOverflow {
            d1: shape.d1,
            d2: shape.d2,
        })
}

/// A discrete architecture: one operation index per decision slot.
///
/// The canonical textual form is dash-joined decimal indices, e.g.
/// `4-0-3-1-4-0`. `Ord` is lexicographic over the slot indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genotype {
    ops: Vec<usize>,
}

impl Genotype {
    /// Builds a genotype validated against `shape`.
    pub fn new(ops: Vec<usize>, shape: SearchSpaceShape) -> Result<Self, CodecError> {
        if ops.len() != shape.d1 {
            return Err(CodecError::SlotCount {
                len: ops.len(),
                expected: shape.d1,
            });
        }
        for (slot, &op) in ops.iter().enumerate() {
            if op >= shape.d2 {
                return Err(CodecError::OpOutOfRange {
                    slot,
                    op,
                    d2: shape.d2,
                });
            }
        }
        Ok(Self { ops })
    }

    /// Parses the canonical dash-joined form and validates against `shape`.
    pub fn parse(text: &str, shape: SearchSpaceShape) -> Result<Self, CodecError> {
        let g: Genotype = text.parse()?;
        Genotype::new(g.ops, shape)
    }

    pub fn ops(&self) -> &[usize] {
        &self.ops
    }

    /// Number of slots where `self` and `other` differ. Panics if lengths
    /// disagree; callers compare genotypes from the same space.
    pub fn hamming(&self, other: &Genotype) -> usize {
        assert_eq!(self.ops.len(), other.ops.len());
        self.ops
            .iter()
            .zip(&other.ops)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, op) in self.ops.iter().enumerate() {
            if i > 0 {
                write!(f, "-")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

impl FromStr for Genotype {
    type Err = CodecError;

    /// Parses the dash-joined form without shape validation; use
    /// [`Genotype::parse`] when the target space is known.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(CodecError::Parse {
                text: s.to_string(),
                reason: "empty string".to_string(),
            });
        }
        let ops = s
            .split('-')
            .map(|part| {
                part.parse::<usize>().map_err(|_| CodecError::Parse {
                    text: s.to_string(),
                    reason: format!("invalid op index {part:?}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { ops })
    }
}

impl Serialize for Genotype {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Decodes a flattened latent into a genotype by row-wise argmax.
/// Ties break toward the lower index.
pub fn decode(latent: &[f64], shape: SearchSpaceShape) -> Result<Genotype, CodecError> {
    if latent.len() != shape.latent_dim() {
        return Err(CodecError::LatentLength {
            len: latent.len(),
            expected: shape.latent_dim(),
            shape,
        });
    }
    let mut ops = Vec::with_capacity(shape.d1);
    for row in 0..shape.d1 {
        let scores = &latent[row * shape.d2..(row + 1) * shape.d2];
        let mut best = 0usize;
        for (col, &v) in scores.iter().enumerate() {
            if !v.is_finite() {
                return Err(CodecError::NonFiniteLatent { row, col });
            }
            if v > scores[best] {
                best = col;
            }
        }
        ops.push(best);
    }
    Ok(Genotype { ops })
}

/// Builds the latent whose row `k` holds `hot` at `ops[k]` and `cold`
/// elsewhere, so that `decode(encode(g)) == g`.
pub fn encode(
    genotype: &Genotype,
    shape: SearchSpaceShape,
    hot: f64,
    cold: f64,
) -> Result<Vec<f64>, CodecError> {
    if !(hot > cold) {
        return Err(CodecError::HotCold { hot, cold });
    }
    let validated = Genotype::new(genotype.ops.clone(), shape)?;
    let mut latent = vec![cold; shape.latent_dim()];
    for (row, &op) in validated.ops.iter().enumerate() {
        latent[row * shape.d2 + op] = hot;
    }
    Ok(latent)
}

/// Iterates every genotype of the space in lexicographic order
/// (`0-0-...-0` first, last slot incrementing fastest).
pub fn enumerate(shape: SearchSpaceShape) -> GenotypeIter {
    GenotypeIter {
        shape,
        next: Some(vec![0; shape.d1]),
    }
}

pub struct GenotypeIter {
    shape: SearchSpaceShape,
    next: Option<Vec<usize>>,
}

impl Iterator for GenotypeIter {
    type Item = Genotype;

    fn next(&mut self) -> Option<Genotype> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut slot = self.shape.d1;
        loop {
            if slot == 0 {
                break; // wrapped past the first slot: exhausted
            }
            slot -= 1;
            succ[slot] += 1;
            if succ[slot] < self.shape.d2 {
                self.next = Some(succ);
                break;
            }
            succ[slot] = 0;
        }
        Some(Genotype { ops: current })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CodecError {
    #[error("invalid search space shape {d1}x{d2}: need d1 >= 1 and d2 >= 2")]
    InvalidShape { d1: usize, d2: usize },
    #[error("latent has {len} values, expected {expected} for shape {shape}")]
    LatentLength {
        len: usize,
        expected: usize,
        shape: SearchSpaceShape,
    },
    #[error("non-finite latent value at row {row}, column {col}")]
    NonFiniteLatent { row: usize, col: usize },
    #[error("genotype has {len} slots, expected {expected}")]
    SlotCount { len: usize, expected: usize },
    #[error("op index {op} at slot {slot} out of range for {d2} choices")]
    OpOutOfRange { slot: usize, op: usize, d2: usize },
    #[error("genotype count {d2}^{d1} overflows u64")]
    CountOverflow { d1: usize, d2: usize },
    #[error("cannot parse genotype {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("hot value {hot} must exceed cold value {cold}")]
    HotCold { hot: f64, cold: f64 },
}
