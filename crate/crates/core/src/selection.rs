//! Survivor selection over the union of parents and denoised offspring.
//!
//! Slots are filled in order: elites (top fitness), diversity (greedy
//! farthest-point against the rows already chosen), then roulette (weighted
//! sampling without replacement over the remainder). Defaults split
//! 10% / 20% / 70%.

use ndarray::{Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fraction of survivor slots assigned to each rule. Fractions must be
/// non-negative and sum to 1 within 1e-9.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub frac_elite: f64,
    pub frac_diverse: f64,
    pub frac_roulette: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            frac_elite: 0.10,
            frac_diverse: 0.20,
            frac_roulette: 0.70,
        }
    }
}

/// Resolved slot counts for a survivor set of size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotCounts {
    pub elite: usize,
    pub diverse: usize,
    pub roulette: usize,
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<(), SelectionError> {
        let fracs = [self.frac_elite, self.frac_diverse, self.frac_roulette];
        if fracs.iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(SelectionError::Config(format!(
                "selection fractions must be finite and non-negative, got {fracs:?}"
            )));
        }
        let total: f64 = fracs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(SelectionError::Config(format!(
                "selection fractions sum to {total}, expected 1"
            )));
        }
        Ok(())
    }

    /// Elite and diversity counts round half-up; roulette absorbs the
    /// remainder so the total is exactly `n`.
    pub fn slot_counts(&self, n: usize) -> Result<SlotCounts, SelectionError> {
        self.validate()?;
        let elite = round_half_up(self.frac_elite * n as f64);
        let diverse = round_half_up(self.frac_diverse * n as f64);
        if elite + diverse > n {
            return Err(SelectionError::Config(format!(
                "elite ({elite}) + diversity ({diverse}) slots exceed population size {n}"
            )));
        }
        Ok(SlotCounts {
            elite,
            diverse,
            roulette: n - elite - diverse,
        })
    }
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Where a pool row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Parent,
    Offspring,
}

/// The 2N candidate rows a selection draws from: parents first, then
/// offspring, with their fitness.
#[derive(Debug, Clone)]
pub struct CandidatePool {
    rows: Array2<f64>,
    fitness: Vec<f64>,
    origin: Vec<Origin>,
}

impl CandidatePool {
    pub fn from_parents_offspring(
        parents: ArrayView2<'_, f64>,
        parent_fitness: &[f64],
        offspring: ArrayView2<'_, f64>,
        offspring_fitness: &[f64],
    ) -> Result<Self, SelectionError> {
        if parents.dim() != offspring.dim() {
            return Err(SelectionError::Argument(format!(
                "parent shape {:?} differs from offspring shape {:?}",
                parents.dim(),
                offspring.dim()
            )));
        }
        if parent_fitness.len() != parents.nrows() || offspring_fitness.len() != offspring.nrows()
        {
            return Err(SelectionError::Argument(
                "fitness length does not match row count".to_string(),
            ));
        }
        let rows = ndarray::concatenate(Axis(0), &[parents, offspring])
            .expect("equal column counts checked above");
        let mut fitness = Vec::with_capacity(rows.nrows());
        fitness.extend_from_slice(parent_fitness);
        fitness.extend_from_slice(offspring_fitness);
        for (i, f) in fitness.iter().enumerate() {
            if !f.is_finite() {
                return Err(SelectionError::Argument(format!(
                    "non-finite fitness {f} at pool row {i}"
                )));
            }
        }
        let mut origin = vec![Origin::Parent; parents.nrows()];
        origin.extend(vec![Origin::Offspring; offspring.nrows()]);
        Ok(Self {
            rows,
            fitness,
            origin,
        })
    }

    pub fn rows(&self) -> ArrayView2<'_, f64> {
        self.rows.view()
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn origin(&self) -> &[Origin] {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.fitness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fitness.is_empty()
    }
}

/// Which pool rows each rule picked, in pick order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SelectionReport {
    pub elite: Vec<usize>,
    pub diverse: Vec<usize>,
    pub roulette: Vec<usize>,
}

impl SelectionReport {
    pub fn selected(&self) -> Vec<usize> {
        let mut all = self.elite.clone();
        all.extend_from_slice(&self.diverse);
        all.extend_from_slice(&self.roulette);
        all
    }
}

/// Selects `n` survivors from a pool of `2n` rows.
///
/// Fitness of the survivors is copied from the pool, never re-evaluated.
/// Given the same rng stream the result is bit-reproducible.
pub fn select<R: Rng>(
    pool: &CandidatePool,
    cfg: &SelectionConfig,
    n: usize,
    rng: &mut R,
) -> Result<(Array2<f64>, Vec<f64>, SelectionReport), SelectionError> {
    if pool.is_empty() {
        return Err(SelectionError::Argument("empty candidate pool".to_string()));
    }
    if pool.len() != 2 * n {
        return Err(SelectionError::Argument(format!(
            "pool has {} rows, expected 2n = {}",
            pool.len(),
            2 * n
        )));
    }
    let counts = cfg.slot_counts(n)?;
    let mut taken = vec![false; pool.len()];
    let mut report = SelectionReport::default();

    // 1. elites: top fitness, ties toward the lower row index
    let mut by_fitness: Vec<usize> = (0..pool.len()).collect();
    by_fitness.sort_by(|&a, &b| {
        pool.fitness[b]
            .total_cmp(&pool.fitness[a])
            .then(a.cmp(&b))
    });
    for &idx in by_fitness.iter().take(counts.elite) {
        taken[idx] = true;
        report.elite.push(idx);
    }

    // 2. diversity: greedy farthest-point, measured against everything
    //    already selected. Squared distances preserve the argmax.
    let mut min_dist_sq = vec![f64::INFINITY; pool.len()];
    for &sel in &report.elite {
        update_min_distances(pool, sel, &mut min_dist_sq);
    }
    for _ in 0..counts.diverse {
        let pick = if report.elite.is_empty() && report.diverse.is_empty() {
            // nothing selected yet: seed with the first unselected row
            (0..pool.len()).find(|&i| !taken[i]).expect("pool non-empty")
        } else {
            let mut best = usize::MAX;
            for i in 0..pool.len() {
                if taken[i] {
                    continue;
                }
                if best == usize::MAX || min_dist_sq[i] > min_dist_sq[best] {
                    best = i;
                }
            }
            best
        };
        taken[pick] = true;
        report.diverse.push(pick);
        update_min_distances(pool, pick, &mut min_dist_sq);
    }

    // 3. roulette: without replacement, weights from min-max normalized
    //    fitness over the remaining rows plus a floor so degenerate pools
    //    fall back to uniform draws
    let mut remaining: Vec<usize> = (0..pool.len()).filter(|&i| !taken[i]).collect();
    let (min_f, max_f) = remaining.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, &i| {
        (acc.0.min(pool.fitness[i]), acc.1.max(pool.fitness[i]))
    });
    let weight_of = |i: usize| -> f64 {
        const EPS: f64 = 1e-6;
        if max_f == min_f {
            EPS
        } else {
            (pool.fitness[i] - min_f) / (max_f - min_f) + EPS
        }
    };
    let mut weights: Vec<f64> = remaining.iter().map(|&i| weight_of(i)).collect();
    for _ in 0..counts.roulette {
        let total: f64 = weights.iter().sum();
        let draw = rng.random_range(0.0..total);
        let mut acc = 0.0;
        let mut chosen = remaining.len() - 1; // guard against FP spill
        for (pos, &w) in weights.iter().enumerate() {
            acc += w;
            if draw < acc {
                chosen = pos;
                break;
            }
        }
        let idx = remaining.remove(chosen);
        weights.remove(chosen);
        taken[idx] = true;
        report.roulette.push(idx);
    }

    let selected = report.selected();
    debug_assert_eq!(selected.len(), n);
    let survivors = pool.rows.select(Axis(0), &selected);
    let fitness = selected.iter().map(|&i| pool.fitness[i]).collect();
    Ok((survivors, fitness, report))
}

fn update_min_distances(pool: &CandidatePool, selected: usize, min_dist_sq: &mut [f64]) {
    let sel_row = pool.rows.row(selected);
    for i in 0..pool.len() {
        let mut dist_sq = 0.0;
        for (a, b) in pool.rows.row(i).iter().zip(sel_row.iter()) {
            let d = a - b;
            dist_sq += d * d;
        }
        if dist_sq < min_dist_sq[i] {
            min_dist_sq[i] = dist_sq;
        }
    }
}

#[derive(Debug, Error)]
pub enum SelectionError {
    #[error("invalid selection config: {0}")]
    Config(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn pool_from(rows: Array2<f64>, fitness: Vec<f64>) -> CandidatePool {
        let n = rows.nrows() / 2;
        let (parents, offspring) = rows.view().split_at(Axis(0), n);
        let pf = fitness[..n].to_vec();
        let of = fitness[n..].to_vec();
        CandidatePool::from_parents_offspring(parents, &pf, offspring, &of).unwrap()
    }

    #[test]
    fn default_split_for_ten_slots() {
        let counts = SelectionConfig::default().slot_counts(10).unwrap();
        assert_eq!(
            counts,
            SlotCounts {
                elite: 1,
                diverse: 2,
                roulette: 7
            }
        );
    }

    #[test]
    fn rounding_absorbs_remainder_into_roulette() {
        let counts = SelectionConfig::default().slot_counts(3).unwrap();
        assert_eq!(counts.elite + counts.diverse + counts.roulette, 3);
        let counts = SelectionConfig::default().slot_counts(7).unwrap();
        assert_eq!(counts.elite + counts.diverse + counts.roulette, 7);
        assert_eq!(counts.elite, 1); // 0.7 rounds half-up to 1
    }

    #[test]
    fn config_validation() {
        let bad = SelectionConfig {
            frac_elite: 0.5,
            frac_diverse: 0.6,
            frac_roulette: -0.1,
        };
        assert!(bad.validate().is_err());
        let off = SelectionConfig {
            frac_elite: 0.5,
            frac_diverse: 0.5,
            frac_roulette: 0.1,
        };
        assert!(off.validate().is_err());
        // rounding can overflow n even when fractions are valid
        let tight = SelectionConfig {
            frac_elite: 0.5,
            frac_diverse: 0.5,
            frac_roulette: 0.0,
        };
        assert!(tight.slot_counts(3).is_err());
        assert!(tight.slot_counts(4).is_ok());
    }

    #[test]
    fn fittest_row_is_always_retained() {
        // n = 10 under defaults yields one elite slot, which pins the
        // pool maximum into the survivor set
        let rows = Array2::from_shape_fn((20, 3), |(i, j)| (i * 3 + j) as f64 * 0.1);
        let mut fitness = vec![0.0; 20];
        fitness[13] = 1.0;
        let pool = pool_from(rows, fitness);
        for seed in 0..50 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let (_, fit, report) =
                select(&pool, &SelectionConfig::default(), 10, &mut rng).unwrap();
            assert_eq!(report.elite, vec![13]);
            assert!(fit.iter().any(|&f| f == 1.0));
        }
    }

    #[test]
    fn elite_ties_break_toward_lower_index() {
        let rows = Array2::zeros((6, 2));
        let pool = pool_from(rows, vec![0.9, 0.9, 0.1, 0.1, 0.9, 0.1]);
        let cfg = SelectionConfig {
            frac_elite: 1.0,
            frac_diverse: 0.0,
            frac_roulette: 0.0,
        };
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let (_, _, report) = select(&pool, &cfg, 3, &mut rng).unwrap();
        assert_eq!(report.elite, vec![0, 1, 4]);
    }

    /// Greedy farthest-point on six fixed 2D points, hand-enumerated.
    #[test]
    fn diversity_matches_hand_run_greedy() {
        let rows = array![
            [0.0, 0.0],
            [10.0, 0.0],
            [0.0, 10.0],
            [10.0, 10.0],
            [5.0, 5.0],
            [1.0, 1.0]
        ];
        let pool = pool_from(rows.clone(), vec![0.5; 6]);

        // pure diversity: seed with row 0, then the far corner (10,10),
        // then (10,0) by the lower-index tie-break against (0,10)
        let cfg = SelectionConfig {
            frac_elite: 0.0,
            frac_diverse: 1.0,
            frac_roulette: 0.0,
        };
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let (_, _, report) = select(&pool, &cfg, 3, &mut rng).unwrap();
        assert_eq!(report.diverse, vec![0, 3, 1]);

        // elite-seeded diversity: the elite slot takes row 0 (fitness ties
        // break low), so the greedy picks are again (10,10) then (10,0)
        let pool = pool_from(rows, vec![0.5; 6]);
        let cfg = SelectionConfig {
            frac_elite: 1.0 / 3.0,
            frac_diverse: 2.0 / 3.0,
            frac_roulette: 0.0,
        };
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let (_, _, report) = select(&pool, &cfg, 3, &mut rng).unwrap();
        assert_eq!(report.elite, vec![0]);
        assert_eq!(report.diverse, vec![3, 1]);
    }

    #[test]
    fn selection_is_reproducible_and_exact_size() {
        let rows = Array2::from_shape_fn((20, 4), |(i, j)| ((i * 7 + j * 3) % 13) as f64);
        let fitness: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).fract()).collect();
        let pool = pool_from(rows, fitness);
        let run = |seed: u64| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            select(&pool, &SelectionConfig::default(), 10, &mut rng).unwrap()
        };
        let (rows_a, fit_a, rep_a) = run(11);
        let (rows_b, fit_b, rep_b) = run(11);
        assert_eq!(rows_a, rows_b);
        assert_eq!(fit_a, fit_b);
        assert_eq!(rep_a, rep_b);

        let mut seen = rep_a.selected();
        assert_eq!(seen.len(), 10);
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 10, "a pool row was selected twice");
    }

    #[test]
    fn roulette_prefers_high_fitness() {
        // no elites or diversity: pure roulette over a pool where row 7
        // dominates; it should be picked far more often than row 0
        let rows = Array2::zeros((8, 2));
        let mut fitness = vec![0.0; 8];
        fitness[7] = 1.0;
        let pool = pool_from(rows, fitness);
        let cfg = SelectionConfig {
            frac_elite: 0.0,
            frac_diverse: 0.0,
            frac_roulette: 1.0,
        };
        let mut hits = 0;
        for seed in 0..200 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let (_, _, report) = select(&pool, &cfg, 4, &mut rng).unwrap();
            if report.roulette.contains(&7) {
                hits += 1;
            }
        }
        assert!(hits > 190, "dominant row picked in only {hits}/200 runs");
    }

    #[test]
    fn degenerate_fitness_falls_back_to_uniform_roulette() {
        let rows = Array2::zeros((8, 2));
        let pool = pool_from(rows, vec![0.3; 8]);
        let cfg = SelectionConfig {
            frac_elite: 0.0,
            frac_diverse: 0.0,
            frac_roulette: 1.0,
        };
        let mut counts = [0usize; 8];
        for seed in 0..400 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let (_, _, report) = select(&pool, &cfg, 4, &mut rng).unwrap();
            for idx in report.roulette {
                counts[idx] += 1;
            }
        }
        // every row should land in a broad band around the expected 200
        for (i, &c) in counts.iter().enumerate() {
            assert!((100..=300).contains(&c), "row {i} selected {c} times");
        }
    }

    #[test]
    fn pool_validation() {
        let rows = Array2::zeros((4, 2));
        let pool = pool_from(rows, vec![0.1, 0.2, 0.3, 0.4]);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        // pool of 4 rows cannot serve n = 3
        assert!(select(&pool, &SelectionConfig::default(), 3, &mut rng).is_err());

        let parents = Array2::zeros((2, 2));
        let offspring = Array2::zeros((2, 2));
        assert!(CandidatePool::from_parents_offspring(
            parents.view(),
            &[0.1, f64::NAN],
            offspring.view(),
            &[0.2, 0.3]
        )
        .is_err());
    }

    #[test]
    fn origins_are_tracked() {
        let parents = array![[1.0], [2.0]];
        let offspring = array![[3.0], [4.0]];
        let pool = CandidatePool::from_parents_offspring(
            parents.view(),
            &[0.1, 0.2],
            offspring.view(),
            &[0.3, 0.4],
        )
        .unwrap();
        assert_eq!(
            pool.origin(),
            &[
                Origin::Parent,
                Origin::Parent,
                Origin::Offspring,
                Origin::Offspring
            ]
        );
    }
}
