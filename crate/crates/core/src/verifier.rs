//! Specification-guided bisection.
//!
//! The input box is propagated through the network. Any sub-box whose output
//! enclosure misses the unsafe region is discarded as proven safe; the rest
//! are bisected until their width drops to the tolerance, at which point they
//! are kept as witnesses and the verdict becomes `Uncertain`.
//!
//! The worklist is FIFO. With `jobs > 1` it is processed one depth level at a
//! time on a rayon pool, which visits exactly the same boxes as the
//! sequential queue.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox};
use crate::model::Network;
use crate::propagation::network_interval;
use crate::region::UnsafeRegion;
use crate::scalar::Scalar;

/// Refuse uniform partitions larger than this.
pub const MAX_UNIFORM_CELLS: f64 = 1e8;

/// An input sub-box together with its cached output enclosure.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkItem<T> {
    input: IntervalBox<T>,
    output: IntervalBox<T>,
    depth: usize,
}

impl<T: Scalar> WorkItem<T> {
    pub fn new(net: &Network<T>, input: IntervalBox<T>, depth: usize) -> Result<Self> {
        let output = network_interval(net, &input)?;
        Ok(Self {
            input,
            output,
            depth,
        })
    }

    pub fn input(&self) -> &IntervalBox<T> {
        &self.input
    }

    pub fn output(&self) -> &IntervalBox<T> {
        &self.output
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Safe,
    Uncertain,
}

/// Final state of a leaf in the partition dump.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellStatus {
    Safe,
    Witness,
    /// Left unexamined because a fail-fast run stopped early.
    Pending,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionCell<T> {
    pub item: WorkItem<T>,
    pub status: CellStatus,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Stats {
    /// Boxes removed from the worklist (for the uniform baseline: cells).
    pub boxes_processed: u64,
    pub boxes_proven_safe: u64,
    pub bisections: u64,
    pub max_depth: usize,
    pub wall_time: Duration,
}

#[derive(Clone, Debug)]
pub struct Verdict<T> {
    pub status: Status,
    /// Boxes of width at most ε whose enclosure still meets the region.
    pub witnesses: Vec<WorkItem<T>>,
    pub stats: Stats,
    /// Every leaf of the refinement, when requested.
    pub partition: Option<Vec<PartitionCell<T>>>,
}

impl<T> Verdict<T> {
    pub fn is_safe(&self) -> bool {
        self.status == Status::Safe
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Stop at the first witness instead of draining the worklist.
    pub fail_fast: bool,
    /// Worker threads; 1 runs the plain sequential queue.
    pub jobs: usize,
    pub record_partition: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            fail_fast: false,
            jobs: 1,
            record_partition: false,
        }
    }
}

fn check_problem<T: Scalar>(
    net: &Network<T>,
    input: &IntervalBox<T>,
    region: &UnsafeRegion<T>,
    epsilon: T,
) -> Result<()> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::InvalidEpsilon(epsilon.to_f64_lossy()));
    }
    if input.dim() != net.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "input box",
            expected: net.input_dim(),
            found: input.dim(),
        });
    }
    if !input.is_finite() {
        return Err(Error::NonFinite("input box"));
    }
    region.check_dim(net.output_dim())
}

/// Upper bound on bisection depth: `Σ_i ⌈log2(w_i / ε)⌉` over dimensions
/// wider than `ε`.
pub fn depth_bound<T: Scalar>(input: &IntervalBox<T>, epsilon: T) -> usize {
    input
        .widths()
        .into_iter()
        .filter(|&w| w > epsilon)
        .map(|w| (w / epsilon).log2().ceil().to_usize().unwrap_or(usize::MAX))
        .sum()
}

pub fn verify<T: Scalar>(
    net: &Network<T>,
    input: &IntervalBox<T>,
    region: &UnsafeRegion<T>,
    epsilon: T,
) -> Result<Verdict<T>> {
    verify_with(net, input, region, epsilon, &VerifyOptions::default())
}

enum Step<T> {
    Safe(WorkItem<T>),
    Witness(WorkItem<T>),
    Split(WorkItem<T>, WorkItem<T>),
}

fn step<T: Scalar>(
    net: &Network<T>,
    region: &UnsafeRegion<T>,
    epsilon: T,
    item: WorkItem<T>,
) -> Step<T> {
    if !region.intersects_unchecked(&item.output) {
        return Step::Safe(item);
    }
    if item.input.width() > epsilon {
        let (l, r) = item
            .input
            .bisect()
            .expect("width above a positive tolerance is bisectable");
        let depth = item.depth + 1;
        let l = WorkItem::new(net, l, depth).expect("validated dimensions");
        let r = WorkItem::new(net, r, depth).expect("validated dimensions");
        Step::Split(l, r)
    } else {
        Step::Witness(item)
    }
}

#[derive(Default)]
struct Collector<T> {
    stats: Stats,
    witnesses: Vec<WorkItem<T>>,
    partition: Option<Vec<PartitionCell<T>>>,
}

impl<T: Scalar> Collector<T> {
    fn new(record: bool) -> Self {
        Self {
            stats: Stats::default(),
            witnesses: Vec::new(),
            partition: record.then(Vec::new),
        }
    }

    /// Books one processed item; returns the children to enqueue.
    fn absorb(&mut self, depth: usize, s: Step<T>) -> Option<(WorkItem<T>, WorkItem<T>)> {
        self.stats.boxes_processed += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        match s {
            Step::Safe(item) => {
                self.stats.boxes_proven_safe += 1;
                self.leaf(item, CellStatus::Safe);
                None
            }
            Step::Witness(item) => {
                if let Some(p) = self.partition.as_mut() {
                    p.push(PartitionCell {
                        item: item.clone(),
                        status: CellStatus::Witness,
                    });
                }
                self.witnesses.push(item);
                None
            }
            Step::Split(l, r) => {
                self.stats.bisections += 1;
                Some((l, r))
            }
        }
    }

    fn leaf(&mut self, item: WorkItem<T>, status: CellStatus) {
        if let Some(p) = self.partition.as_mut() {
            p.push(PartitionCell { item, status });
        }
    }

    fn finish(self, started: Instant) -> Verdict<T> {
        let mut stats = self.stats;
        stats.wall_time = started.elapsed();
        Verdict {
            status: if self.witnesses.is_empty() {
                Status::Safe
            } else {
                Status::Uncertain
            },
            witnesses: self.witnesses,
            stats,
            partition: self.partition,
        }
    }
}

fn build_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

/// Runs the bisection loop with explicit options.
pub fn verify_with<T: Scalar>(
    net: &Network<T>,
    input: &IntervalBox<T>,
    region: &UnsafeRegion<T>,
    epsilon: T,
    opts: &VerifyOptions,
) -> Result<Verdict<T>> {
    check_problem(net, input, region, epsilon)?;
    if opts.jobs == 0 {
        return Err(Error::InvalidArgument("jobs must be at least 1".into()));
    }
    let started = Instant::now();
    let root = WorkItem::new(net, input.clone(), 0)?;
    let mut acc = Collector::new(opts.record_partition);

    if opts.jobs == 1 {
        let mut queue = VecDeque::from([root]);
        while let Some(item) = queue.pop_front() {
            let depth = item.depth;
            if let Some((l, r)) = acc.absorb(depth, step(net, region, epsilon, item)) {
                queue.push_back(l);
                queue.push_back(r);
            }
            if opts.fail_fast && !acc.witnesses.is_empty() {
                for rest in queue.drain(..) {
                    acc.leaf(rest, CellStatus::Pending);
                }
            }
        }
        return Ok(acc.finish(started));
    }

    let pool = build_pool(opts.jobs)?;
    let mut level = vec![root];
    while !level.is_empty() {
        let steps: Vec<(usize, Step<T>)> = pool.install(|| {
            level
                .into_par_iter()
                .map(|item| (item.depth, step(net, region, epsilon, item)))
                .collect()
        });
        let mut next = Vec::with_capacity(steps.len());
        for (depth, s) in steps {
            if let Some((l, r)) = acc.absorb(depth, s) {
                next.push(l);
                next.push(r);
            }
        }
        if opts.fail_fast && !acc.witnesses.is_empty() {
            for rest in next {
                acc.leaf(rest, CellStatus::Pending);
            }
            break;
        }
        level = next;
    }
    Ok(acc.finish(started))
}

/// Number of grid cells per dimension so that each cell is at most `ε` wide.
pub fn uniform_grid_shape<T: Scalar>(input: &IntervalBox<T>, epsilon: T) -> Result<Vec<usize>> {
    let per_dim: Vec<f64> = input
        .widths()
        .into_iter()
        .map(|w| {
            let (w, eps) = (w.to_f64_lossy(), epsilon.to_f64_lossy());
            let mut k = (w / eps).ceil().max(1.0);
            // w / ε can land one ulp above an integer
            if k > 1.0 && k.is_finite() && w / (k - 1.0) <= eps {
                k -= 1.0;
            }
            k
        })
        .collect();
    let cells: f64 = per_dim.iter().product();
    if !(cells <= MAX_UNIFORM_CELLS) {
        return Err(Error::TooManyCells {
            cells,
            limit: MAX_UNIFORM_CELLS,
        });
    }
    Ok(per_dim.into_iter().map(|k| k as usize).collect())
}

fn grid_cell<T: Scalar>(input: &IntervalBox<T>, shape: &[usize], mut index: usize) -> IntervalBox<T> {
    let dims = input
        .dims()
        .iter()
        .zip(shape)
        .map(|(iv, &k)| {
            let j = index % k;
            index /= k;
            let at = |m: usize| {
                if m == k {
                    iv.hi()
                } else {
                    iv.lo() + iv.width() * T::lit(m as f64) / T::lit(k as f64)
                }
            };
            Interval::hull_of(at(j), at(j + 1))
        })
        .collect();
    IntervalBox::from_dims_unchecked(dims)
}

/// Uniform-partition baseline: grid the input box into cells of width at
/// most `ε`, propagate each once, and report `Safe` iff every cell is.
pub fn verify_uniform<T: Scalar>(
    net: &Network<T>,
    input: &IntervalBox<T>,
    region: &UnsafeRegion<T>,
    epsilon: T,
) -> Result<Verdict<T>> {
    verify_uniform_with(net, input, region, epsilon, &VerifyOptions::default())
}

pub fn verify_uniform_with<T: Scalar>(
    net: &Network<T>,
    input: &IntervalBox<T>,
    region: &UnsafeRegion<T>,
    epsilon: T,
    opts: &VerifyOptions,
) -> Result<Verdict<T>> {
    check_problem(net, input, region, epsilon)?;
    if opts.jobs == 0 {
        return Err(Error::InvalidArgument("jobs must be at least 1".into()));
    }
    let started = Instant::now();
    let shape = uniform_grid_shape(input, epsilon)?;
    let total: usize = shape.iter().product();
    let mut acc = Collector::new(opts.record_partition);

    let classify = |idx: usize| {
        let item = WorkItem::new(net, grid_cell(input, &shape, idx), 0).expect("validated dimensions");
        if region.intersects_unchecked(&item.output) {
            Step::Witness(item)
        } else {
            Step::Safe(item)
        }
    };

    if opts.jobs == 1 {
        for idx in 0..total {
            acc.absorb(0, classify(idx));
            if opts.fail_fast && !acc.witnesses.is_empty() {
                for rest in idx + 1..total {
                    let cell = WorkItem::new(net, grid_cell(input, &shape, rest), 0)?;
                    acc.leaf(cell, CellStatus::Pending);
                }
                break;
            }
        }
        return Ok(acc.finish(started));
    }

    let pool = build_pool(opts.jobs)?;
    const CHUNK: usize = 1 << 16;
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        let steps: Vec<Step<T>> = pool.install(|| (start..end).into_par_iter().map(classify).collect());
        for s in steps {
            acc.absorb(0, s);
        }
        if opts.fail_fast && !acc.witnesses.is_empty() {
            for rest in end..total {
                let cell = WorkItem::new(net, grid_cell(input, &shape, rest), 0)?;
                acc.leaf(cell, CellStatus::Pending);
            }
            break;
        }
        start = end;
    }
    Ok(acc.finish(started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Activation, Layer};

    const INF: f64 = f64::INFINITY;

    fn bx(b: &[(f64, f64)]) -> IntervalBox<f64> {
        IntervalBox::from_bounds(b).unwrap()
    }

    fn identity(n: usize) -> Network<f64> {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Network::new(vec![Layer::new(rows, vec![0.0; n], Activation::Linear).unwrap()]).unwrap()
    }

    fn region(b: &[(f64, f64)]) -> UnsafeRegion<f64> {
        UnsafeRegion::from_boxes(vec![bx(b)]).unwrap()
    }

    #[test]
    fn disjoint_root_is_safe_after_one_box() {
        let v = verify(
            &identity(2),
            &bx(&[(-5.0, 5.0), (-5.0, 5.0)]),
            &region(&[(10.0, INF), (10.0, INF)]),
            0.01,
        )
        .unwrap();
        assert_eq!(v.status, Status::Safe);
        assert_eq!(v.stats.boxes_processed, 1);
        assert_eq!(v.stats.boxes_proven_safe, 1);
        assert!(v.witnesses.is_empty());
    }

    #[test]
    fn genuinely_unsafe_is_uncertain() {
        let v = verify(
            &identity(2),
            &bx(&[(0.0, 2.0), (0.0, 2.0)]),
            &region(&[(1.0, INF), (1.0, INF)]),
            0.25,
        )
        .unwrap();
        assert_eq!(v.status, Status::Uncertain);
        assert!(!v.witnesses.is_empty());
        for w in &v.witnesses {
            assert!(w.input().width() <= 0.25);
        }
        assert!(v.stats.max_depth <= depth_bound(&bx(&[(0.0, 2.0), (0.0, 2.0)]), 0.25));
    }

    #[test]
    fn fail_fast_stops_at_first_witness() {
        let opts = VerifyOptions {
            fail_fast: true,
            record_partition: true,
            ..Default::default()
        };
        let input = bx(&[(0.0, 2.0), (0.0, 2.0)]);
        let r = region(&[(1.0, INF), (1.0, INF)]);
        let full = verify(&identity(2), &input, &r, 0.25).unwrap();
        let fast = verify_with(&identity(2), &input, &r, 0.25, &opts).unwrap();
        assert_eq!(fast.status, Status::Uncertain);
        assert_eq!(fast.witnesses.len(), 1);
        assert!(fast.stats.boxes_processed < full.stats.boxes_processed);
        let cells = fast.partition.unwrap();
        assert!(cells.iter().any(|c| c.status == CellStatus::Pending));
    }

    #[test]
    fn rejects_bad_problems() {
        let net = identity(2);
        let input = bx(&[(0.0, 1.0), (0.0, 1.0)]);
        let r = region(&[(1.0, INF), (1.0, INF)]);
        assert!(matches!(verify(&net, &input, &r, 0.0), Err(Error::InvalidEpsilon(_))));
        assert!(matches!(verify(&net, &input, &r, -1.0), Err(Error::InvalidEpsilon(_))));
        assert!(verify(&net, &input, &r, f64::NAN).is_err());
        assert!(verify(&net, &bx(&[(0.0, 1.0)]), &r, 0.1).is_err());
        assert!(verify(&net, &input, &region(&[(1.0, INF)]), 0.1).is_err());
        assert!(verify(&net, &bx(&[(0.0, INF), (0.0, 1.0)]), &r, 0.1).is_err());
        let opts = VerifyOptions {
            jobs: 0,
            ..Default::default()
        };
        assert!(verify_with(&net, &input, &r, 0.1, &opts).is_err());
    }

    #[test]
    fn uniform_examples() {
        let v = verify_uniform(&identity(1), &bx(&[(0.0, 1.0)]), &region(&[(2.0, INF)]), 0.5).unwrap();
        assert_eq!(v.status, Status::Safe);
        assert_eq!(v.stats.boxes_processed, 2);

        let v = verify_uniform(&identity(1), &bx(&[(0.0, 1.0)]), &region(&[(2.0, INF)]), 5.0).unwrap();
        assert_eq!(v.stats.boxes_processed, 1);

        assert_eq!(uniform_grid_shape(&bx(&[(-5.0, 5.0), (-5.0, 5.0)]), 0.01).unwrap(), vec![1000, 1000]);
        assert_eq!(uniform_grid_shape(&bx(&[(3.0, 3.0), (0.0, 1.0)]), 0.3).unwrap(), vec![1, 4]);
        assert!(matches!(
            uniform_grid_shape(&bx(&[(0.0, 1.0), (0.0, 1.0)]), 1e-5),
            Err(Error::TooManyCells { .. })
        ));
    }

    #[test]
    fn uniform_partition_tiles_input() {
        let input = bx(&[(-1.0, 2.0), (0.5, 1.0)]);
        let opts = VerifyOptions {
            record_partition: true,
            ..Default::default()
        };
        let v = verify_uniform_with(&identity(2), &input, &region(&[(0.0, 0.2), (0.6, 0.7)]), 0.3, &opts)
            .unwrap();
        let cells = v.partition.unwrap();
        assert_eq!(cells.len(), 10 * 2);
        let hull = cells
            .iter()
            .skip(1)
            .fold(cells[0].item.input().clone(), |h, c| h.join(c.item.input()));
        assert_eq!(hull, input);
        for c in &cells {
            assert!(c.item.input().width() <= 0.3 + 1e-12);
        }
        assert_eq!(v.status, Status::Uncertain);
    }

    #[test]
    fn parallel_matches_sequential() {
        let net = identity(2);
        let input = bx(&[(0.0, 2.0), (0.0, 2.0)]);
        let r = region(&[(1.9, INF), (1.9, INF)]);
        let seq = verify(&net, &input, &r, 0.05).unwrap();
        let par = verify_with(
            &net,
            &input,
            &r,
            0.05,
            &VerifyOptions {
                jobs: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(seq.status, par.status);
        assert_eq!(seq.stats.boxes_processed, par.stats.boxes_processed);
        assert_eq!(seq.stats.bisections, par.stats.bisections);
        assert_eq!(seq.witnesses, par.witnesses);
    }

    #[test]
    fn depth_bound_counts_per_dimension() {
        assert_eq!(depth_bound(&bx(&[(0.0, 1.0), (0.0, 1.0)]), 0.25), 4);
        assert_eq!(depth_bound(&bx(&[(0.0, 1.0), (0.0, 0.1)]), 0.25), 2);
        assert_eq!(depth_bound(&bx(&[(0.0, 0.1)]), 0.25), 0);
    }
}
