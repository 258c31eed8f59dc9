//! Distinctness filtering of certified boxes.
//!
//! Each box gets an interval enclosure of its squared distance to a random
//! anchor point. Boxes whose distance intervals are disjoint are disjoint
//! themselves, so only boxes with overlapping distance intervals need the
//! exact rectangle overlap test. A sort followed by a sweep finds those
//! pairs, and union-find turns pairwise overlap into groups.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::interval::{overlaps, Complex, IntervalBox, RealInterval};

#[derive(Clone, Debug, PartialEq)]
pub struct DistinctnessReport {
    /// Candidate indices, each group sorted ascending, groups ordered by
    /// their representative.
    pub groups: Vec<Vec<usize>>,
    pub representatives: Vec<usize>,
    pub distinct_count: usize,
    pub anchor: Vec<Complex>,
    /// `d_k`, in input order.
    pub distances: Vec<RealInterval>,
    /// Number of exact overlap tests performed.
    pub comparisons: usize,
}

impl DistinctnessReport {
    /// Position of the group holding candidate `index`.
    pub fn group_of(&self, index: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.binary_search(&index).is_ok())
    }
}

/// `sum_j (Re I_j - Re q_j)^2 + (Im I_j - Im q_j)^2` in real interval
/// arithmetic.
pub fn squared_distance(b: &IntervalBox, q: &[Complex]) -> RealInterval {
    assert_eq!(b.len(), q.len(), "anchor dimension must match the box");
    let mut acc = RealInterval::point(0.0);
    for (c, z) in b.iter().zip(q) {
        let dr = c.re.sub(&RealInterval::point(z.re)).square();
        let di = c.im.sub(&RealInterval::point(z.im)).square();
        acc = acc.add(&dr).add(&di);
    }
    acc
}

/// Anchor with coordinates uniform in `[-1,1] + i[-1,1]`.
pub fn random_anchor(n: usize, seed: u64) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect()
}

/// Groups boxes labelled by their position in `boxes`.
pub fn group_overlaps(boxes: &[IntervalBox], seed: u64) -> DistinctnessReport {
    let labelled: Vec<(usize, IntervalBox)> = boxes.iter().cloned().enumerate().collect();
    group_overlaps_indexed(&labelled, seed)
}

/// Groups `(candidate index, box)` pairs. All boxes must share one
/// dimension.
pub fn group_overlaps_indexed(boxes: &[(usize, IntervalBox)], seed: u64) -> DistinctnessReport {
    let n = boxes.first().map_or(0, |(_, b)| b.len());
    assert!(
        boxes.iter().all(|(_, b)| b.len() == n),
        "all boxes must have the same dimension"
    );
    let anchor = random_anchor(n, seed);
    let distances: Vec<RealInterval> = boxes
        .par_iter()
        .map(|(_, b)| squared_distance(b, &anchor))
        .collect();

    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&a, &b| {
        distances[a]
            .lo()
            .total_cmp(distances[b].lo())
            .then(boxes[a].0.cmp(&boxes[b].0))
    });

    let mut sets = DisjointSets::new(boxes.len());
    let mut active: Vec<usize> = Vec::new();
    let mut comparisons = 0;
    for &k in &order {
        let lo = *distances[k].lo();
        active.retain(|&j| *distances[j].hi() >= lo);
        for &j in &active {
            comparisons += 1;
            if overlaps(&boxes[j].1, &boxes[k].1) {
                sets.union(j, k);
            }
        }
        active.push(k);
    }

    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (k, (index, _)) in boxes.iter().enumerate() {
        by_root.entry(sets.find(k)).or_default().push(*index);
    }
    let mut groups: Vec<Vec<usize>> = by_root
        .into_values()
        .map(|mut g| {
            g.sort_unstable();
            g
        })
        .collect();
    groups.sort_by_key(|g| g[0]);
    let representatives: Vec<usize> = groups.iter().map(|g| g[0]).collect();

    DistinctnessReport {
        distinct_count: groups.len(),
        groups,
        representatives,
        anchor,
        distances,
        comparisons,
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::ComplexInterval;
    use proptest::prelude::*;

    fn ri(lo: f64, hi: f64) -> RealInterval {
        RealInterval::new(lo, hi).unwrap()
    }

    fn boxed(coords: &[(f64, f64, f64, f64)]) -> IntervalBox {
        IntervalBox::new(
            coords
                .iter()
                .map(|&(a, b, c, d)| ComplexInterval::new(ri(a, b), ri(c, d)))
                .collect(),
        )
        .unwrap()
    }

    fn ball(center: &[(f64, f64)], r: f64) -> IntervalBox {
        boxed(&center.iter().map(|&(x, y)| (x - r, x + r, y - r, y + r)).collect::<Vec<_>>())
    }

    #[test]
    fn squared_distance_examples() {
        let zero = [Complex::new(0.0, 0.0)];
        assert_eq!(squared_distance(&boxed(&[(1.0, 2.0, 0.0, 0.0)]), &zero), ri(1.0, 4.0));

        let two = boxed(&[(1.0, 2.0, 0.0, 0.0), (0.0, 0.0, -2.0, -1.0)]);
        let q = vec![Complex::new(0.0, 0.0); 2];
        assert_eq!(squared_distance(&two, &q), ri(2.0, 8.0));

        let q = [Complex::new(0.3, -0.7), Complex::new(0.1, 0.9)];
        let d = squared_distance(&IntervalBox::point(&q), &q);
        assert!(d.contains(&0.0));
        assert!(*d.hi() <= f64::EPSILON);
    }

    #[test]
    fn grouping_examples() {
        let a = ball(&[(1.0, 0.0)], 1e-10);
        let same = group_overlaps(&[a.clone(), a.clone()], 0);
        assert_eq!(same.distinct_count, 1);
        assert_eq!(same.groups, vec![vec![0, 1]]);
        assert_eq!(same.representatives, vec![0]);

        let b = ball(&[(2.0, 0.0)], 1e-10);
        let apart = group_overlaps(&[a, b], 0);
        assert_eq!(apart.distinct_count, 2);
        assert_eq!(apart.representatives, vec![0, 1]);
    }

    #[test]
    fn chained_overlaps_form_one_group() {
        let boxes = [
            ball(&[(0.0, 0.0)], 0.6),
            ball(&[(1.0, 0.0)], 0.6),
            ball(&[(2.0, 0.0)], 0.6),
            ball(&[(5.0, 5.0)], 0.1),
        ];
        let rep = group_overlaps(&boxes, 3);
        assert_eq!(rep.groups, vec![vec![0, 1, 2], vec![3]]);
        assert_eq!(rep.group_of(2), Some(0));
        assert_eq!(rep.group_of(3), Some(1));
    }

    #[test]
    fn indexed_labels_are_reported() {
        let a = ball(&[(1.0, 0.0)], 1e-3);
        let b = ball(&[(-1.0, 0.0)], 1e-3);
        let rep = group_overlaps_indexed(&[(7, a.clone()), (3, b), (11, a)], 1);
        assert_eq!(rep.groups, vec![vec![3], vec![7, 11]]);
        assert_eq!(rep.representatives, vec![3, 7]);
    }

    #[test]
    fn empty_input() {
        let rep = group_overlaps(&[], 0);
        assert_eq!(rep.distinct_count, 0);
        assert!(rep.groups.is_empty() && rep.anchor.is_empty());
    }

    #[test]
    fn anchor_lies_in_unit_square() {
        for z in random_anchor(100, 9) {
            assert!(z.re.abs() <= 1.0 && z.im.abs() <= 1.0);
        }
    }

    #[test]
    fn grid_of_disjoint_boxes_needs_few_comparisons() {
        let r = 10_000;
        let boxes: Vec<IntervalBox> = (0..r)
            .map(|k| ball(&[((k % 100) as f64, (k / 100) as f64), (0.5, -0.5)], 1e-9))
            .collect();
        let rep = group_overlaps(&boxes, 0);
        assert_eq!(rep.distinct_count, r);
        assert!(rep.comparisons < 10 * r, "comparisons = {}", rep.comparisons);
    }

    fn arb_box_set() -> impl Strategy<Value = Vec<IntervalBox>> {
        let coord = (-8i32..8, -8i32..8, 0u32..4, 0u32..4);
        let b = proptest::collection::vec(coord, 2).prop_map(|cs| {
            boxed(
                &cs.iter()
                    .map(|&(x, y, wx, wy)| {
                        let (x, y) = (x as f64 / 4.0, y as f64 / 4.0);
                        (x, x + wx as f64 / 4.0, y, y + wy as f64 / 4.0)
                    })
                    .collect::<Vec<_>>(),
            )
        });
        proptest::collection::vec(b, 1..30)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn disjoint_distances_imply_disjoint_boxes(boxes in arb_box_set(), seed in 0u64..1000) {
            let rep = group_overlaps(&boxes, seed);
            for a in 0..boxes.len() {
                for b in 0..boxes.len() {
                    if !rep.distances[a].intersects(&rep.distances[b]) {
                        prop_assert!(!overlaps(&boxes[a], &boxes[b]));
                    }
                }
            }
        }

        #[test]
        fn groups_match_brute_force_closure(boxes in arb_box_set(), seed in 0u64..1000) {
            let rep = group_overlaps(&boxes, seed);
            let mut sets = DisjointSets::new(boxes.len());
            for a in 0..boxes.len() {
                for b in a + 1..boxes.len() {
                    if overlaps(&boxes[a], &boxes[b]) {
                        sets.union(a, b);
                    }
                }
            }
            for g in &rep.groups {
                let root = sets.find(g[0]);
                prop_assert!(g.iter().all(|&k| sets.find(k) == root));
            }
            let mut roots: Vec<usize> = (0..boxes.len()).map(|k| sets.find(k)).collect();
            roots.sort_unstable();
            roots.dedup();
            prop_assert_eq!(rep.distinct_count, roots.len());
            for (a, ga) in rep.groups.iter().enumerate() {
                for gb in &rep.groups[a + 1..] {
                    for &i in ga {
                        for &j in gb {
                            prop_assert!(!overlaps(&boxes[i], &boxes[j]));
                        }
                    }
                }
            }
        }

        #[test]
        fn same_seed_same_grouping(boxes in arb_box_set(), seed in 0u64..1000) {
            let a = group_overlaps(&boxes, seed);
            let b = group_overlaps(&boxes, seed);
            prop_assert_eq!(a, b);
        }
    }
}
