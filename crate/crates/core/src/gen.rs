//! Seeded random instance generators for tests, benchmarks and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::matroid::{GraphicMatroid, MatroidInstance, PartitionMatroid};
use crate::oracle::{CoverageObjective, ModularObjective};

/// `n` elements spread over `parts` nonempty parts, each with a budget in `1..=min(size, max_budget)`.
pub fn random_partition<R: Rng + ?Sized>(n: usize, parts: usize, max_budget: usize, rng: &mut R) -> PartitionMatroid {
    assert!(parts >= 1 && parts <= n && max_budget >= 1);
    let mut part_of: Vec<usize> = (0..n)
        .map(|e| if e < parts { e } else { rng.gen_range(0..parts) })
        .collect();
    part_of.shuffle(rng);
    let mut sizes = vec![0usize; parts];
    for &p in &part_of {
        sizes[p] += 1;
    }
    let budgets = sizes.iter().map(|&s| rng.gen_range(1..=s.min(max_budget))).collect();
    PartitionMatroid::new(part_of, budgets).expect("budgets fit their parts")
}

/// `n / size` parts of `size` consecutive elements, budget 1 each.
pub fn blocks(n: usize, size: usize) -> PartitionMatroid {
    assert!(size >= 1 && n.is_multiple_of(size));
    PartitionMatroid::new((0..n).map(|e| e / size).collect(), vec![1; n / size]).expect("unit budgets fit")
}

/// A connected multigraph on `vertices` vertices with `edges ≥ vertices − 1` edges and
/// shuffled edge ids; a random spanning tree keeps it connected.
pub fn random_connected_graph<R: Rng + ?Sized>(vertices: usize, edges: usize, rng: &mut R) -> GraphicMatroid {
    assert!(vertices >= 1 && edges + 1 >= vertices);
    assert!(vertices >= 2 || edges == 0, "a single vertex only admits self-loops");
    let mut order: Vec<usize> = (0..vertices).collect();
    order.shuffle(rng);
    let mut list: Vec<(usize, usize)> = (1..vertices).map(|i| (order[rng.gen_range(0..i)], order[i])).collect();
    while list.len() < edges {
        let a = rng.gen_range(0..vertices);
        let b = rng.gen_range(0..vertices);
        if a != b {
            list.push((a, b));
        }
    }
    list.shuffle(rng);
    GraphicMatroid::new(vertices, list).expect("spanning tree keeps the graph connected")
}

/// `n` sets over `0..universe`, each of a size drawn from `sizes`.
pub fn random_coverage<R: Rng + ?Sized>(
    n: usize,
    universe: usize,
    sizes: std::ops::RangeInclusive<usize>,
    rng: &mut R,
) -> CoverageObjective {
    let sets = (0..n)
        .map(|_| {
            let len = rng.gen_range(sizes.clone());
            (0..len).map(|_| rng.gen_range(0..universe)).collect()
        })
        .collect();
    CoverageObjective::new(universe, sets).expect("items lie in the universe")
}

/// Coverage over the edges of `graph`: an edge covers its two endpoints plus `extra`
/// random items from a pool of `pool` further items.
pub fn coverage_on_edges<R: Rng + ?Sized>(
    graph: &GraphicMatroid,
    pool: usize,
    extra: usize,
    rng: &mut R,
) -> CoverageObjective {
    let v = graph.vertices();
    let sets = graph
        .edges()
        .iter()
        .map(|&(a, b)| {
            let mut s = vec![a, b];
            s.extend((0..extra).map(|_| v + rng.gen_range(0..pool.max(1))));
            s
        })
        .collect();
    CoverageObjective::new(v + pool.max(1), sets).expect("items lie in the universe")
}

pub fn random_modular<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ModularObjective {
    ModularObjective::new((0..n).map(|_| rng.gen_range(0.0..10.0)).collect()).expect("weights are nonnegative")
}

/// Either a random partition or a random graphic matroid on exactly `n` elements.
pub fn random_matroid<R: Rng + ?Sized>(n: usize, max_rank: usize, rng: &mut R) -> MatroidInstance {
    if rng.gen_bool(0.5) || n < 1 {
        let parts = rng.gen_range(1..=max_rank.min(n).max(1));
        random_partition(n, parts, 1, rng).into()
    } else {
        let vertices = rng.gen_range(2..=(max_rank + 1).min(n + 1));
        random_connected_graph(vertices, n, rng).into()
    }
}

/// The scaling family: `n` coverage sets of size `1..=8` over `n/2` items, constrained to
/// one set per block of 16 (rank `n/16`).
pub fn scaling_coverage<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (CoverageObjective, PartitionMatroid) {
    assert!(n >= 16 && n.is_multiple_of(16));
    (random_coverage(n, n / 2, 1..=8, rng), blocks(n, 16))
}
