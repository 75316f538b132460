use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::gen;
use crate::matroid::{GraphicMatroid, PartitionMatroid};

fn pair() -> MatroidInstance {
    PartitionMatroid::from_parts(2, vec![(1, vec![0, 1])]).unwrap().into()
}

fn triangle() -> MatroidInstance {
    GraphicMatroid::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap().into()
}

const ALL: [BackendKind; 2] = [BackendKind::Auto, BackendKind::Naive];

#[test]
fn grid_rounds_up_and_clamps() {
    let g = WeightGrid::new(5.0, 0.5, 1).unwrap();
    assert_eq!(g.buckets(), 3);
    assert_eq!(g.level_of(5.0), 1);
    assert_eq!(g.level_of(9.0), 1);
    assert_eq!(g.level_of(2.5), 2);
    assert_eq!(g.level_of(2.6), 1);
    assert_eq!(g.level_of(0.625), 4);
    assert_eq!(g.level_of(0.0), 4);
    assert_eq!(g.weight(2), 2.5);
    assert!(WeightGrid::new(0.0, 0.5, 1).is_err());
    assert!(WeightGrid::new(1.0, 1.0, 1).is_err());
    assert_eq!(WeightGrid::new(1.0, 0.5, 0).unwrap().buckets(), 1);
}

#[test]
fn build_examples() {
    let m = pair();
    for kind in ALL {
        let db = BucketedBase::build(&m, &[5.0, 3.0], 5.0, 0.5, kind).unwrap();
        assert_eq!(db.weight(0), 5.0);
        assert_eq!(db.level(0), 1);
        assert_eq!(db.base().as_slice(), &[0]);
        assert_eq!(db.total_weight(), 5.0);
    }

    let big: MatroidInstance = PartitionMatroid::from_parts(4, vec![(1, vec![0, 1]), (1, vec![2, 3])])
        .unwrap()
        .into();
    let db = BucketedBase::build(&big, &[1e-9; 4], 1.0, 0.5, BackendKind::Auto).unwrap();
    let floor = db.grid().weight(db.grid().floor_level());
    assert!(db.levels().iter().all(|&l| l == db.grid().floor_level()));
    assert_eq!(db.total_weight(), 2.0 * floor);
    assert!((1..=db.grid().buckets()).all(|j| db.bucket(j).is_empty()));

    let empty: MatroidInstance = PartitionMatroid::from_parts(2, vec![(0, vec![0, 1])]).unwrap().into();
    let db = BucketedBase::build(&empty, &[1.0, 1.0], 1.0, 0.5, BackendKind::Auto).unwrap();
    assert!(db.base().is_empty());
    assert_eq!(db.total_weight(), 0.0);

    assert!(BucketedBase::build(&m, &[1.0, 1.0], -1.0, 0.5, BackendKind::Auto).is_err());
    assert!(BucketedBase::build(&m, &[1.0, 1.0], 1.0, 1.5, BackendKind::Auto).is_err());
    assert!(BucketedBase::build(&m, &[1.0], 1.0, 0.5, BackendKind::Auto).is_err());
    assert!(BucketedBase::build(&m, &[1.0, 1.0], 1.0, 0.5, BackendKind::Graphic).is_err());
}

#[test]
fn update_examples() {
    let m = pair();
    for kind in ALL {
        let mut db = BucketedBase::build(&m, &[5.0, 3.0], 5.0, 0.5, kind).unwrap();
        let rec = db.update_base(0, 2.0).unwrap();
        assert_eq!(rec.replaced_by, Some(1));
        assert_eq!(db.base().as_slice(), &[1]);
        assert_eq!(db.bucket(1), &[1]);
    }

    let t = triangle();
    for kind in ALL {
        let mut db = BucketedBase::build(&t, &[3.0, 2.0, 1.0], 3.0, 0.1, kind).unwrap();
        assert_eq!(db.base().as_slice(), &[0, 1]);
        let w0 = db.total_weight();
        let rec = db.update_base(1, 0.5).unwrap();
        assert_eq!(rec.replaced_by, Some(2));
        assert_eq!(db.base().as_slice(), &[0, 2]);
        assert!(db.total_weight() < w0);
        let expect = db.weight(0) + db.weight(2);
        assert!((db.total_weight() - expect).abs() < 1e-12);

        let w = db.total_weight();
        let lvl = db.level(0);
        let rec = db.update_base(0, db.grid().lower_bound(lvl) + 1e-9).unwrap();
        assert!(rec.is_noop() && rec.replaced_by.is_none());
        assert_eq!(db.total_weight(), w);
    }
}

#[test]
fn update_errors() {
    let m = pair();
    let mut db = BucketedBase::build(&m, &[1.0, 5.0], 5.0, 0.5, BackendKind::Auto).unwrap();
    assert_eq!(db.update_base(0, 1.0), Err(Error::NotInBase(0)));
    db.update_base(1, 2.0).unwrap();
    assert!(matches!(
        db.update_base(db.base()[0], 100.0),
        Err(Error::WeightIncrease { .. })
    ));
    let b = db.base()[0];
    db.freeze(b).unwrap();
    assert_eq!(db.freeze(b), Err(Error::Frozen(b)));
    assert_eq!(db.update_base(b, 0.0), Err(Error::Frozen(b)));
    assert!(matches!(db.update_base(9, 0.0), Err(Error::Domain { .. })));
}

fn chi_square(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    let expect = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum()
}

#[test]
fn sampling_is_uniform() {
    let m: MatroidInstance = PartitionMatroid::uniform(6, 5).unwrap().into();
    let mut db = BucketedBase::build(&m, &[1.0, 1.0, 1.0, 1.0, 0.01, 0.001], 1.0, 0.3, BackendKind::Auto).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    assert_eq!(db.bucket(1).len(), 4);
    let mut counts = [0usize; 4];
    for _ in 0..10_000 {
        counts[db.sample_bucket(1, &mut rng).unwrap()] += 1;
    }
    // 3 degrees of freedom, p = 0.001
    assert!(chi_square(&counts) < 16.27, "{counts:?}");
    assert_eq!(db.sample_bucket(2, &mut rng), None);

    db.freeze(4).unwrap();
    let mut counts = [0usize; 4];
    for _ in 0..10_000 {
        counts[db.sample_base(&mut rng).unwrap()] += 1;
    }
    assert!(chi_square(&counts) < 16.27, "{counts:?}");
    for e in 0..4 {
        db.freeze(e).unwrap();
    }
    assert_eq!(db.sample_base(&mut rng), None);
    assert!(db.bucket(1).is_empty());
}

fn audit(db: &BucketedBase<'_>) {
    if let Err(msg) = db.check_invariants() {
        panic!("{msg}");
    }
}

fn random_run(m: &MatroidInstance, kind: BackendKind, rng: &mut ChaCha8Rng, updates: usize) {
    let n = m.ground_size();
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let mut db = BucketedBase::build(m, &values, 1.0, 0.25, kind).unwrap();
    let mut frozen = Vec::new();
    audit(&db);
    let mut last_w = db.total_weight();
    for _ in 0..updates {
        if rng.gen_bool(0.05) {
            if let Some(e) = db.sample_base(rng) {
                db.freeze(e).unwrap();
                frozen.push(e);
            }
            continue;
        }
        let Some(e) = db.sample_base(rng) else { break };
        let to = rng.gen_range(db.level(e)..=db.grid().floor_level());
        db.update_level(e, to).unwrap();
        audit(&db);
        assert!(frozen.iter().all(|&f| db.in_base(f) && db.is_frozen(f)));
        assert!(db.total_weight() <= last_w);
        last_w = db.total_weight();
    }
}

#[test]
fn fast_backends_stay_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..60 {
        let n = rng.gen_range(1..60);
        let parts = rng.gen_range(1..=n.min(8));
        let p: MatroidInstance = gen::random_partition(n, parts, 4, &mut rng).into();
        random_run(&p, BackendKind::Partition, &mut rng, 100);
        random_run(&p, BackendKind::Naive, &mut rng, 30);

        let v = rng.gen_range(2..20);
        let g: MatroidInstance = gen::random_connected_graph(v, v - 1 + rng.gen_range(0..30), &mut rng).into();
        random_run(&g, BackendKind::Graphic, &mut rng, 100);
        random_run(&g, BackendKind::Naive, &mut rng, 30);
    }
}

#[test]
fn faulty_backend_is_caught() {
    let m = pair();
    let mut db = BucketedBase::build(&m, &[5.0, 3.0], 5.0, 0.5, BackendKind::FaultyNaive).unwrap();
    db.update_base(0, 0.1).unwrap();
    assert_eq!(db.base().as_slice(), &[0]);
    assert!(db.check_invariants().is_err());
}

#[test]
fn partition_steps_are_linear_in_updates() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 2000;
    let m: MatroidInstance = gen::random_partition(n, 40, 10, &mut rng).into();
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let mut db = BucketedBase::build(&m, &values, 1.0, 0.2, BackendKind::Partition).unwrap();
    let mut updates = 0u64;
    for _ in 0..20_000 {
        let e = db.sample_base(&mut rng).unwrap();
        let to = (db.level(e) + rng.gen_range(0..3)).min(db.grid().floor_level());
        db.update_level(e, to).unwrap();
        updates += 1;
    }
    let bound = n as u64 + updates * u64::from(db.grid().buckets());
    assert!(db.steps() <= 10 * bound, "{} > 10·{bound}", db.steps());
}
