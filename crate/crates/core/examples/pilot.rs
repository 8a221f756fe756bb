use archevo::*;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

fn main() {
    let shape = SearchSpaceShape::new(6, 5).unwrap();
    let optimum = Genotype::parse("4-0-3-1-4-0", shape).unwrap();
    let bench = TabularBenchmark::planted(shape, &optimum, 0.05, 7).unwrap();

    // 1. first index at which the normal-latent baseline stream decodes the optimum
    print!("normal-latent first-hit index (seeds 0..9): ");
    for seed in 0..10u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut first_hit = None;
        for i in 0..4000usize {
            let mut latent = vec![0.0; 30];
            for v in latent.iter_mut() { *v = rng.sample(StandardNormal); }
            if decode(&latent, shape).unwrap() == optimum { first_hit = Some(i); break; }
        }
        print!("{:?} ", first_hit);
    }
    println!();

    // 2. uniform-genotype baseline stream first-hit
    print!("uniform-genotype first-hit index (seeds 0..9): ");
    for seed in 0..10u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut first_hit = None;
        for i in 0..4000usize {
            let ops: Vec<usize> = (0..6).map(|_| rng.random_range(0..5usize)).collect();
            if Genotype::new(ops, shape).unwrap() == optimum { first_hit = Some(i); break; }
        }
        print!("{:?} ", first_hit);
    }
    println!();

    // 3. recovery robustness: seeds 0..30
    let mut hits = 0;
    let mut min_evals = u64::MAX; let mut max_evals = 0;
    for seed in 0..30u64 {
        let config = GenerationConfig { shape, topk: 1, params: RunParams { seed, ..RunParams::default() } };
        let oracle = CachedOracle::new(TabularOracle::new(bench.clone())).unwrap();
        let r = run(&config, &oracle).unwrap();
        hits += (r.topk[0].genotype == optimum) as u32;
        min_evals = min_evals.min(r.evaluations); max_evals = max_evals.max(r.evaluations);
    }
    println!("recovery seeds 0..30: {hits}/30, evals range [{min_evals}, {max_evals}]");

    let _ = Array2::<f64>::zeros((1,1));
}
