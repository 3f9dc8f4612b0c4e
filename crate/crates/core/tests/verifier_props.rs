mod common;

use common::{bx, mixed_network};
use nnverify::scenario::{bench_network, bench_spec, BENCH_SEED};
use nnverify::{
    depth_bound, random_sample_unsafe_hits, robustness_region, verify, verify_uniform, verify_with,
    IntervalBox, Network, Sampler, Status, UnsafeRegion, VerifyOptions,
};

const INF: f64 = f64::INFINITY;

/// 2-in/2-out net with a quadrant placed near the edge of its sampled range,
/// so some instances are safe with margin and some are not.
fn quadrant_instance(seed: u64) -> (Network<f64>, IntervalBox<f64>, UnsafeRegion<f64>) {
    let mut s = Sampler::new(seed);
    let depth = 1 + s.index(4);
    let net = mixed_network(&mut s, depth, 8, 2, 2);
    let input = bx(&[(-1.0, 1.0), (-1.0, 1.0)]);
    let mut best = f64::NEG_INFINITY;
    let mut s2 = Sampler::new(seed ^ 0xabc);
    for _ in 0..400 {
        let y = net.eval(&s2.point_in(&input)).unwrap();
        best = best.max(y[0].min(y[1]));
    }
    let q = best + s.uniform(-0.05, 0.3);
    let region = UnsafeRegion::from_boxes(vec![bx(&[(q, INF), (q, INF)])]).unwrap();
    (net, input, region)
}

fn opts(jobs: usize) -> VerifyOptions {
    VerifyOptions {
        jobs,
        ..Default::default()
    }
}

#[test]
fn bench_instance_is_safe_and_sampling_agrees() {
    let spec = bench_spec();
    let net = bench_network(BENCH_SEED);
    let v = verify(&net, &spec.input, &spec.unsafe_region, spec.epsilon).unwrap();
    assert_eq!(v.status, Status::Safe);
    assert!(v.stats.boxes_processed > 1);
    assert_eq!(
        random_sample_unsafe_hits(&net, &spec.input, &spec.unsafe_region, 100_000, 17).unwrap(),
        0
    );
}

#[test]
fn safe_verdicts_survive_dense_sampling() {
    let mut safe = 0;
    for seed in 0..60 {
        let (net, input, region) = quadrant_instance(seed);
        let v = verify_with(&net, &input, &region, 0.02, &VerifyOptions { fail_fast: true, ..opts(1) }).unwrap();
        if v.is_safe() {
            safe += 1;
            assert_eq!(random_sample_unsafe_hits(&net, &input, &region, 20_000, seed).unwrap(), 0);
        }
    }
    assert!(safe >= 10, "only {safe} safe instances");
}

#[test]
fn known_unsafe_inputs_are_never_certified() {
    let mut s = Sampler::new(5);
    for seed in 0..30 {
        let net = mixed_network(&mut s, 3, 6, 2, 2);
        let input = bx(&[(-1.0, 1.0), (-0.5, 2.0)]);
        let x_star = s.point_in(&input);
        let y = net.eval(&x_star).unwrap();
        // region just touching y* from above in both coordinates
        let region = UnsafeRegion::from_boxes(vec![bx(&[(y[0], INF), (y[1], INF)])]).unwrap();
        for eps in [0.5, 0.1, 0.01] {
            let v = verify_with(&net, &input, &region, eps, &VerifyOptions { fail_fast: true, ..opts(1) })
                .unwrap();
            assert_eq!(v.status, Status::Uncertain, "seed {seed} eps {eps}");
        }
    }
}

#[test]
fn safe_at_epsilon_stays_safe_when_refined() {
    for seed in 0..40 {
        let (net, input, region) = quadrant_instance(seed);
        let coarse = verify(&net, &input, &region, 0.1).unwrap();
        if coarse.is_safe() {
            for eps in [0.05, 0.01] {
                let fine = verify(&net, &input, &region, eps).unwrap();
                assert!(fine.is_safe(), "seed {seed}: safe at 0.1 but not at {eps}");
                assert!(fine.stats.boxes_processed >= coarse.stats.boxes_processed);
            }
        }
    }
}

#[test]
fn guided_needs_no_more_boxes_than_uniform() {
    let mut compared = 0;
    for seed in 0..40 {
        let (net, input, region) = quadrant_instance(seed);
        let g = verify(&net, &input, &region, 0.02).unwrap();
        let u = verify_uniform(&net, &input, &region, 0.02).unwrap();
        if g.is_safe() && u.is_safe() {
            compared += 1;
            assert!(g.stats.boxes_processed <= u.stats.boxes_processed);
        }
    }
    assert!(compared > 0);
}

#[test]
fn depth_bound_and_worker_count_do_not_change_outcome() {
    for seed in 0..25 {
        let (net, input, region) = quadrant_instance(seed);
        let eps = 0.05;
        let one = verify_with(&net, &input, &region, eps, &opts(1)).unwrap();
        let four = verify_with(&net, &input, &region, eps, &opts(4)).unwrap();
        assert_eq!(one.status, four.status);
        assert_eq!(one.stats.boxes_processed, four.stats.boxes_processed);
        assert_eq!(one.stats.max_depth, four.stats.max_depth);
        assert!(one.stats.max_depth <= depth_bound(&input, eps));
        assert_eq!(one.status == Status::Uncertain, !one.witnesses.is_empty());
    }
}

#[test]
fn partition_tiles_the_input_box() {
    let (net, input, region) = quadrant_instance(3);
    let o = VerifyOptions {
        record_partition: true,
        ..opts(1)
    };
    let v = verify_with(&net, &input, &region, 0.05, &o).unwrap();
    let cells = v.partition.unwrap();
    // leaves of a bisection tree: areas sum to the input area and hulls match
    let area = |b: &IntervalBox<f64>| b.widths().iter().product::<f64>();
    let total: f64 = cells.iter().map(|c| area(c.item.input())).sum();
    assert!((total - area(&input)).abs() <= 1e-12 * area(&input));
    let hull = cells
        .iter()
        .skip(1)
        .fold(cells[0].item.input().clone(), |h, c| h.join(c.item.input()));
    assert_eq!(hull, input);
    for (i, a) in cells.iter().enumerate() {
        for b in &cells[i + 1..] {
            let overlap: f64 = a
                .item
                .input()
                .dims()
                .iter()
                .zip(b.item.input().dims())
                .map(|(p, q)| (p.hi().min(q.hi()) - p.lo().max(q.lo())).max(0.0))
                .product();
            assert_eq!(overlap, 0.0);
        }
    }
}

#[test]
fn robustness_safe_verdicts_agree_with_grid_oracle() {
    let mut s = Sampler::new(77);
    let mut certified = 0;
    for _ in 0..30 {
        let classes = 2 + s.index(2);
        let net = mixed_network(&mut s, 2, 4, 3, classes);
        let x: Vec<f64> = (0..3).map(|_| s.uniform(0.0, 1.0)).collect();
        let y = net.eval(&x).unwrap();
        let label = (0..classes).fold(0, |b, k| if y[k] > y[b] { k } else { b });
        let delta = s.uniform(0.0, 0.5);
        let input = nnverify::scenario::perturbation_box(&x, &[0, 2], delta).unwrap();
        let region = robustness_region(classes, label).unwrap();
        let v = verify(&net, &input, &region, 0.01).unwrap();
        if v.is_safe() {
            certified += 1;
            let mut p = x.clone();
            for i in 0..=100 {
                for j in 0..=100 {
                    p[0] = x[0] - delta + 2.0 * delta * i as f64 / 100.0;
                    p[2] = x[2] - delta + 2.0 * delta * j as f64 / 100.0;
                    assert!(!region.contains_point(&net.eval(&p).unwrap()));
                }
            }
        }
    }
    assert!(certified > 0);
}
