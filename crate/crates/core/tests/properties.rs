use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submat_core::dynbase::{BackendKind, BucketedBase};
use submat_core::pipeline::{solve, Algo, PipelineConfig};
use submat_core::rounding::{swap_round, BaseCombination, RoundingPath};
use submat_core::{gen, ElementSet, MatroidInstance, SetFunction, ValuationOracle};

fn subset<R: Rng>(n: usize, p: f64, rng: &mut R) -> ElementSet {
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}

fn random_base<R: Rng>(m: &MatroidInstance, rng: &mut R) -> ElementSet {
    let w: Vec<f64> = (0..m.ground_size()).map(|_| rng.gen()).collect();
    m.max_weight_base_bruteforce(&w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn independence_is_hereditary_and_augments(seed: u64, n in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = gen::random_matroid(n, 5, &mut rng);
        let b = random_base(&m, &mut rng);
        prop_assert!(m.is_base(&b));
        prop_assert_eq!(b.len(), m.rank());
        let sub = subset(n, 0.5, &mut rng).intersection(&b);
        prop_assert!(m.is_independent(&sub));
        let other = random_base(&m, &mut rng);
        if sub.len() < other.len() {
            let gain = other.difference(&sub).iter().any(|&e| m.is_independent(&sub.with(e)));
            prop_assert!(gain);
        }
    }

    #[test]
    fn max_weight_base_beats_every_base(seed: u64, n in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = gen::random_matroid(n, 4, &mut rng);
        let w: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let weigh = |s: &ElementSet| s.iter().map(|&e| w[e]).sum::<f64>();
        let best = weigh(&m.max_weight_base_bruteforce(&w));
        for b in m.enumerate_bases() {
            prop_assert!(weigh(&b) <= best + 1e-12);
        }
    }

    #[test]
    fn dynamic_base_stays_maximal(seed: u64, graphic: bool, updates in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m: MatroidInstance = if graphic {
            let v = rng.gen_range(2..=20);
            gen::random_connected_graph(v, rng.gen_range(v - 1..=3 * v), &mut rng).into()
        } else {
            let n = rng.gen_range(1..=80);
            gen::random_partition(n, rng.gen_range(1..=n.min(10)), 4, &mut rng).into()
        };
        let values: Vec<f64> = (0..m.ground_size()).map(|_| rng.gen()).collect();
        let mut db = BucketedBase::build(&m, &values, 1.0, 0.2, BackendKind::Auto).unwrap();
        for _ in 0..updates {
            let Some(e) = db.sample_base(&mut rng) else { break };
            let to = rng.gen_range(db.level(e)..=db.grid().floor_level());
            db.update_level(e, to).unwrap();
            prop_assert_eq!(db.check_invariants(), Ok(()));
        }
        let base = db.base();
        prop_assert!(m.is_base(&base));
        let sum: f64 = base.iter().map(|&e| db.weight(e)).sum();
        prop_assert!((sum - db.total_weight()).abs() <= 1e-9 * sum.max(1.0));
    }

    #[test]
    fn swap_rounding_returns_a_base_inside_the_support(seed: u64, graphic: bool, parts in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m: MatroidInstance = if graphic {
            gen::random_connected_graph(12, 30, &mut rng).into()
        } else {
            gen::random_partition(40, 6, 3, &mut rng).into()
        };
        let bases: Vec<ElementSet> = (0..parts).map(|_| random_base(&m, &mut rng)).collect();
        let raw: Vec<f64> = (0..parts).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let support = bases.iter().fold(ElementSet::new(), |acc, b| acc.union(b));
        let comb = BaseCombination::new(&m, bases, raw.iter().map(|w| w / total).collect()).unwrap();
        for path in [RoundingPath::Auto, RoundingPath::Generic] {
            let s = swap_round(&m, &comb, path, &mut rng).unwrap();
            prop_assert!(m.is_base(&s));
            prop_assert!(s.iter().all(|e| support.contains(*e)));
        }
    }

    #[test]
    fn coverage_is_monotone_and_submodular(seed: u64, n in 2usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = gen::random_coverage(n, 20, 0..=5, &mut rng);
        let a = subset(n, 0.3, &mut rng);
        let b = a.union(&subset(n, 0.3, &mut rng));
        let e = rng.gen_range(0..n);
        let (fa, fb) = (f.evaluate(&a), f.evaluate(&b));
        prop_assert!(fa <= fb);
        if !b.contains(e) {
            prop_assert!(f.evaluate(&a.with(e)) - fa >= f.evaluate(&b.with(e)) - fb - 1e-12);
        }
    }

    #[test]
    fn oracle_counts_every_call(seed: u64, n in 1usize..30, evals in 0usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let oracle = ValuationOracle::new(gen::random_coverage(n, 15, 0..=4, &mut rng));
        for _ in 0..evals {
            let s = subset(n, 0.4, &mut rng);
            let direct = oracle.function().evaluate(&s);
            prop_assert_eq!(oracle.eval(&s).unwrap(), direct);
        }
        prop_assert_eq!(oracle.call_count(), evals as u64);
        let before = oracle.call_count();
        oracle.peek(&[0]);
        prop_assert_eq!(oracle.call_count(), before);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pipeline_reports_a_feasible_solution(seed: u64, n in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = gen::random_coverage(n, 30, 1..=5, &mut rng);
        let m = gen::random_matroid(n, 6, &mut rng);
        let oracle = ValuationOracle::new(f.clone());
        let r = solve(&oracle, &m, Algo::Pipeline, &PipelineConfig::new(0.2), seed).unwrap();
        prop_assert!(m.is_base(&r.solution));
        prop_assert_eq!(r.value, f.evaluate(&r.solution));
        prop_assert_eq!(r.calls.total(), r.total_calls);
        prop_assert_eq!(r.total_calls, oracle.call_count());
    }
}
