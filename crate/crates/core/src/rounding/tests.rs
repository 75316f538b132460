use super::*;
use crate::gen;
use crate::matroid::GraphicMatroid;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn set(v: &[usize]) -> ElementSet {
    ElementSet::from(v.to_vec())
}

fn triangle() -> GraphicMatroid {
    GraphicMatroid::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap()
}

/// A uniformly weighted random spanning tree.
fn random_tree<R: Rng>(m: &MatroidInstance, rng: &mut R) -> ElementSet {
    let w: Vec<f64> = (0..m.ground_size()).map(|_| rng.gen()).collect();
    m.max_weight_base_bruteforce(&w)
}

fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize) -> GraphicMatroid {
    let v = rng.gen_range(2..=max_vertices);
    let extra = rng.gen_range(0..=2 * v);
    gen::random_connected_graph(v, v - 1 + extra, rng)
}

fn sigma_ok(hits: usize, trials: usize, p: f64) -> bool {
    let mean = hits as f64 / trials as f64;
    let sd = (p * (1.0 - p) / trials as f64).sqrt();
    (mean - p).abs() <= 3.0 * sd + 1e-12
}

#[test]
fn combination_validation() {
    let m: MatroidInstance = PartitionMatroid::uniform(3, 1).unwrap().into();
    let (a, b) = (set(&[0]), set(&[1]));
    assert!(BaseCombination::new(&m, vec![], vec![]).is_err());
    assert!(BaseCombination::new(&m, vec![a.clone()], vec![0.5]).is_err());
    assert!(BaseCombination::new(&m, vec![a.clone(), b.clone()], vec![1.2, -0.2]).is_err());
    assert!(BaseCombination::new(&m, vec![set(&[0, 1])], vec![1.0]).is_err());
    assert!(BaseCombination::new(&m, vec![a.clone(), b.clone()], vec![0.3]).is_err());
    let c = BaseCombination::new(&m, vec![a, b], vec![0.25, 0.75]).unwrap();
    assert_eq!(c.point(3).coords(), &[0.25, 0.75, 0.0]);
}

#[test]
fn single_or_identical_bases_are_returned() {
    let m: MatroidInstance = triangle().into();
    let b = set(&[0, 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for path in [RoundingPath::Auto, RoundingPath::Generic, RoundingPath::GenericLeafEdge] {
        let one = BaseCombination::new(&m, vec![b.clone()], vec![1.0]).unwrap();
        assert_eq!(swap_round(&m, &one, path, &mut rng).unwrap(), b);
        let same = BaseCombination::new(&m, vec![b.clone(); 3], vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(swap_round(&m, &same, path, &mut rng).unwrap(), b);
        let (out, swaps) = merge_with(&m, 0.5, &b, 0.5, &b, path, &mut rng).unwrap();
        assert_eq!((out, swaps), (b.clone(), 0));
    }
}

#[test]
fn rank_one_partition_frequency() {
    let m: MatroidInstance = PartitionMatroid::uniform(2, 1).unwrap().into();
    let comb = BaseCombination::new(&m, vec![set(&[0]), set(&[1])], vec![0.3, 0.7]).unwrap();
    for path in [RoundingPath::Auto, RoundingPath::Generic] {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 10_000;
        let hits = (0..trials)
            .filter(|_| swap_round(&m, &comb, path, &mut rng).unwrap() == set(&[0]))
            .count();
        assert!(sigma_ok(hits, trials, 0.3), "{path:?}: {hits}");
    }
}

#[test]
fn triangle_merge_returns_an_input() {
    let m: MatroidInstance = triangle().into();
    let (b1, b2) = (set(&[0, 1]), set(&[0, 2]));
    for path in [RoundingPath::Auto, RoundingPath::Generic, RoundingPath::GenericLeafEdge] {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 4000;
        let mut first = 0;
        for _ in 0..trials {
            let (out, swaps) = merge_with(&m, 0.5, &b1, 0.5, &b2, path, &mut rng).unwrap();
            assert_eq!(swaps, 1);
            if out == b1 {
                first += 1;
            } else {
                assert_eq!(out, b2);
            }
        }
        assert!(sigma_ok(first, trials, 0.5), "{path:?}: {first}");
    }
}

#[test]
fn merge_takes_one_swap_per_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let g = random_graph(&mut rng, 12);
        let m: MatroidInstance = g.into();
        let (b1, b2) = (random_tree(&m, &mut rng), random_tree(&m, &mut rng));
        let d = b1.difference(&b2).len();
        for path in [RoundingPath::Auto, RoundingPath::Generic, RoundingPath::GenericLeafEdge] {
            let (out, swaps) = merge_with(&m, 0.4, &b1, 0.6, &b2, path, &mut rng).unwrap();
            assert_eq!(swaps, d);
            assert!(m.is_base(&out));
        }
        let p = gen::random_partition(30, 5, 3, &mut rng);
        let pm: MatroidInstance = p.into();
        let (b1, b2) = (random_tree(&pm, &mut rng), random_tree(&pm, &mut rng));
        let d = b1.difference(&b2).len();
        for path in [RoundingPath::Auto, RoundingPath::Generic] {
            let (out, swaps) = merge_with(&pm, 0.4, &b1, 0.6, &b2, path, &mut rng).unwrap();
            assert_eq!(swaps, d);
            assert!(pm.is_base(&out));
        }
    }
}

#[test]
fn merge_rejects_bad_inputs() {
    let g = triangle();
    let m: MatroidInstance = g.clone().into();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (b, not_base) = (set(&[0, 1]), set(&[0]));
    assert!(merge_bases(&m, 0.5, &b, 0.5, &not_base, PairOrder::LowestIndex, &mut rng).is_err());
    assert!(merge_bases(&m, 0.0, &b, 1.0, &b, PairOrder::LowestIndex, &mut rng).is_err());
    assert!(merge_bases_graphic(&g, 0.5, &not_base, 0.5, &b, &mut rng).is_err());
    let p: MatroidInstance = PartitionMatroid::uniform(3, 1).unwrap().into();
    assert!(merge_bases(&p, 0.5, &set(&[0]), 0.5, &set(&[1]), PairOrder::LeafEdge, &mut rng).is_err());
    let mut merge = GraphicMerge::new(&g, &b, &b).unwrap();
    assert!(merge.is_done());
    assert!(merge.find_swap().is_err());
}

#[test]
fn find_swap_four_vertex_example() {
    // a=0 b=1 c=2 d=3; ab=0 bc=1 cd=2 bd=3
    let g = GraphicMatroid::new(4, vec![(0, 1), (1, 2), (2, 3), (1, 3)]).unwrap();
    let mut merge = GraphicMerge::new(&g, &set(&[0, 1, 2]), &set(&[0, 1, 3])).unwrap();
    assert_eq!(merge.contracted(), &set(&[0, 1]));
    assert_eq!(merge.find_swap().unwrap(), (2, 3));
    assert!(merge.swap_and_contract(3, 2, true).is_err());
    merge.swap_and_contract(2, 3, true).unwrap();
    assert!(merge.is_done());
    let c = merge.class_of(0);
    assert!((0..4).all(|v| merge.class_of(v) == c));
}

#[test]
fn find_swap_matches_bruteforce_partner() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for _ in 0..1000 {
        let g = random_graph(&mut rng, 30);
        let m: MatroidInstance = g.clone().into();
        let (mut b1, mut b2) = (random_tree(&m, &mut rng), random_tree(&m, &mut rng));
        let mut merge = GraphicMerge::new(&g, &b1, &b2).unwrap();
        while !merge.is_done() {
            let (e, f) = merge.find_swap().unwrap();
            assert_eq!(m.find_swap_pair_bruteforce(&b1, &b2, e).unwrap(), f);
            let to_second = rng.gen_bool(0.5);
            if to_second {
                b2.remove(f);
                b2.insert(e);
            } else {
                b1.remove(e);
                b1.insert(f);
            }
            merge.swap_and_contract(e, f, to_second).unwrap();
            assert_eq!(merge.contracted(), &b1.intersection(&b2));
            checked += 1;
        }
        assert_eq!(b1, b2);
    }
    assert!(checked > 1000);
}

#[test]
fn fast_paths_replay_generic_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for seed in 0..300u64 {
        let g = random_graph(&mut rng, 16);
        let m: MatroidInstance = g.clone().into();
        let (b1, b2) = (random_tree(&m, &mut rng), random_tree(&m, &mut rng));
        let fast = merge_bases_graphic(&g, 0.3, &b1, 0.7, &b2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let slow = merge_bases(
            &m,
            0.3,
            &b1,
            0.7,
            &b2,
            PairOrder::LeafEdge,
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap();
        assert_eq!((fast.0, fast.1.swaps), slow);

        let p: MatroidInstance = gen::random_partition(40, 6, 4, &mut rng).into();
        let (b1, b2) = (random_tree(&p, &mut rng), random_tree(&p, &mut rng));
        let fast = merge_with(
            &p,
            0.3,
            &b1,
            0.7,
            &b2,
            RoundingPath::Auto,
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap();
        let slow = merge_with(
            &p,
            0.3,
            &b1,
            0.7,
            &b2,
            RoundingPath::Generic,
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap();
        assert_eq!(fast, slow);
    }
}

#[test]
fn marginals_are_preserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let g = gen::random_connected_graph(8, 14, &mut rng);
    let m: MatroidInstance = g.into();
    let bases: Vec<ElementSet> = (0..3).map(|_| random_tree(&m, &mut rng)).collect();
    let comb = BaseCombination::new(&m, bases, vec![0.5, 0.3, 0.2]).unwrap();
    let x = comb.point(m.ground_size());
    let trials = 10_000;
    let mut hits = vec![0usize; m.ground_size()];
    for _ in 0..trials {
        let out = swap_round(&m, &comb, RoundingPath::Auto, &mut rng).unwrap();
        assert!(m.is_base(&out));
        for &e in out.iter() {
            hits[e] += 1;
        }
    }
    for (e, &h) in hits.iter().enumerate() {
        assert!(sigma_ok(h, trials, x.get(e)), "edge {e}: {h} vs {}", x.get(e));
    }
}

#[test]
fn graphic_meld_cost_is_near_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut cs = Vec::new();
    for &v in &[64usize, 256, 1024, 4096] {
        let g = gen::random_connected_graph(v, 3 * v, &mut rng);
        let m: MatroidInstance = g.clone().into();
        let (b1, b2) = (random_tree(&m, &mut rng), random_tree(&m, &mut rng));
        let (out, stats) = merge_bases_graphic(&g, 0.5, &b1, 0.5, &b2, &mut rng).unwrap();
        assert!(g.is_spanning_tree(&out));
        let log = (v as f64).log2();
        let c = (stats.meld_steps + stats.tour_steps) as f64 / (v as f64 * log * log);
        cs.push(c);
    }
    assert!(cs.iter().all(|&c| c <= 48.0), "C = {cs:?}");
    assert!(cs[cs.len() - 1] <= cs[0], "constant grows with n: {cs:?}");
}
