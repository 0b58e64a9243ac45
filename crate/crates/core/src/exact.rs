//! Exact maximum independent sets on conflict graphs.
//!
//! Two independent routes: a branch and bound over bit masks, and plain
//! enumeration of every vertex subset. Both return the lexicographically
//! smallest maximum set.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::DEFAULT_FP_TOLERANCE;
use crate::model::{
    anchor_choices_for, build_conflict_graph, normalize, ConflictGraph, Instance, Labeling,
};

pub const DEFAULT_EXACT_CAP: usize = 30;
pub const BRUTEFORCE_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactConfig {
    /// Largest instance accepted; at most 64.
    pub cap: usize,
    pub fp_tolerance: f64,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            cap: DEFAULT_EXACT_CAP,
            fp_tolerance: DEFAULT_FP_TOLERANCE,
        }
    }
}

fn mask_to_set(mask: u64) -> BTreeSet<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// `a` precedes `b` as sorted index lists of equal length.
fn lex_smaller(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    diff != 0 && a >> diff.trailing_zeros() & 1 == 1
}

struct SearchState<'a> {
    adjacency: &'a [u64],
    /// Size a branch must beat to be worth exploring.
    threshold: u32,
    best: Option<u64>,
}

impl SearchState<'_> {
    fn branch(&mut self, candidates: u64, selection: u64) {
        let size = selection.count_ones();
        if size + candidates.count_ones() <= self.threshold {
            return;
        }
        if candidates == 0 {
            self.threshold = size;
            self.best = Some(selection);
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u64 << v;
        self.branch(candidates & !bit & !self.adjacency[v], selection | bit);
        self.branch(candidates & !bit, selection);
    }
}

fn greedy_size(adjacency: &[u64]) -> u32 {
    let mut taken = 0u64;
    let mut blocked = 0u64;
    for (v, &adj) in adjacency.iter().enumerate() {
        if blocked >> v & 1 == 0 {
            taken |= 1 << v;
            blocked |= adj;
        }
    }
    taken.count_ones()
}

/// Branch and bound on a graph of at most 64 vertices.
///
/// Vertices are decided in index order, including before excluding, so the
/// first maximum set reached is the lexicographically smallest one. The
/// greedy size seeds the bound and the count of undecided candidates caps
/// what a branch can still add.
pub fn exact_mis(graph: &ConflictGraph) -> Result<BTreeSet<usize>> {
    let n = graph.n();
    if n > 64 {
        return Err(Error::TooLarge { n, cap: 64 });
    }
    if n == 0 {
        return Ok(BTreeSet::new());
    }
    let adjacency: Vec<u64> = (0..n).map(|v| graph.neighbor_mask(v)).collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut state = SearchState {
        adjacency: &adjacency,
        threshold: greedy_size(&adjacency) - 1,
        best: None,
    };
    state.branch(all, 0);
    let best = state.best.expect("greedy bound is attainable");
    Ok(mask_to_set(best))
}

/// Exhaustive enumeration over all `2^n` vertex subsets, `n <= 20`.
pub fn exact_mis_bruteforce(graph: &ConflictGraph) -> Result<BTreeSet<usize>> {
    let n = graph.n();
    if n > BRUTEFORCE_CAP {
        return Err(Error::TooLarge {
            n,
            cap: BRUTEFORCE_CAP,
        });
    }
    let adjacency: Vec<u64> = (0..n).map(|v| graph.neighbor_mask(v)).collect();
    let total = 1usize << n;
    let mut independent = vec![false; total];
    independent[0] = true;
    let mut best = 0u64;
    for mask in 1..total {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        independent[mask] = independent[rest] && adjacency[low] & mask as u64 == 0;
        if !independent[mask] {
            continue;
        }
        let m = mask as u64;
        let (cm, cb) = (m.count_ones(), best.count_ones());
        if cm > cb || (cm == cb && lex_smaller(m, best)) {
            best = m;
        }
    }
    Ok(mask_to_set(best))
}

/// Maximum proper labeling by branch and bound on the conflict graph.
pub fn exact_mris_with(instance: &Instance, config: &ExactConfig) -> Result<Labeling> {
    let cap = config.cap.min(64);
    if instance.len() > cap {
        return Err(Error::TooLarge {
            n: instance.len(),
            cap,
        });
    }
    let normalized = normalize(instance)?;
    let graph = build_conflict_graph(&normalized, config.fp_tolerance)?;
    let selected = exact_mis(&graph)?;
    let anchor_choice = anchor_choices_for(instance, &selected);
    Ok(Labeling {
        selected,
        anchor_choice,
    })
}

pub fn exact_mris(instance: &Instance) -> Result<Labeling> {
    exact_mris_with(instance, &ExactConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, RotatingSegment};
    use crate::model::{validate_labeling, AnchorModel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    fn complete(n: usize) -> ConflictGraph {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        ConflictGraph::from_edges(n, edges).unwrap()
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> ConflictGraph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        ConflictGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn small_graphs() {
        let empty4 = ConflictGraph::from_edges(4, []).unwrap();
        assert_eq!(exact_mis(&empty4).unwrap(), set(&[0, 1, 2, 3]));
        assert_eq!(exact_mis_bruteforce(&empty4).unwrap(), set(&[0, 1, 2, 3]));
        assert_eq!(exact_mis(&complete(4)).unwrap(), set(&[0]));
        assert_eq!(exact_mis_bruteforce(&complete(4)).unwrap(), set(&[0]));
        let path = ConflictGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(exact_mis(&path).unwrap(), set(&[0, 2]));
        assert_eq!(exact_mis_bruteforce(&path).unwrap(), set(&[0, 2]));
        let none = ConflictGraph::from_edges(0, []).unwrap();
        assert!(exact_mis(&none).unwrap().is_empty());
        assert!(exact_mis_bruteforce(&none).unwrap().is_empty());
    }

    #[test]
    fn tie_break_is_lexicographic() {
        // The 4-cycle 0-1-3-2-0 has two maximum sets, {0, 3} and {1, 2}.
        let cycle = ConflictGraph::from_edges(4, [(0, 1), (1, 3), (3, 2), (2, 0)]).unwrap();
        assert_eq!(exact_mis(&cycle).unwrap(), set(&[0, 3]));
        assert_eq!(exact_mis_bruteforce(&cycle).unwrap(), set(&[0, 3]));
        // Greedy picks {0, 4}; the optimum {1, 2, 3} must still win.
        let star = ConflictGraph::from_edges(5, [(0, 1), (0, 2), (0, 3), (4, 1)]).unwrap();
        assert_eq!(exact_mis(&star).unwrap(), set(&[1, 2, 3]));
        assert_eq!(exact_mis_bruteforce(&star).unwrap(), set(&[1, 2, 3]));
    }

    #[test]
    fn solvers_agree_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(0..=14);
            let p = rng.gen_range(0.05..0.7);
            let g = random_graph(&mut rng, n, p);
            let bb = exact_mis(&g).unwrap();
            let brute = exact_mis_bruteforce(&g).unwrap();
            assert!(g.is_independent(&bb));
            assert_eq!(bb, brute);
        }
    }

    #[test]
    fn caps_are_enforced() {
        let g = ConflictGraph::from_edges(21, []).unwrap();
        assert!(matches!(
            exact_mis_bruteforce(&g),
            Err(Error::TooLarge { n: 21, cap: 20 })
        ));
        let labels = (0..31)
            .map(|i| {
                RotatingSegment::bottom_anchored(Point::new(i as f64 * 10.0, 0.0), 1.0).unwrap()
            })
            .collect();
        let inst = Instance::new("big", AnchorModel::OneP, labels).unwrap();
        assert!(matches!(
            exact_mris(&inst),
            Err(Error::TooLarge { n: 31, cap: 30 })
        ));
    }

    #[test]
    fn label_examples() {
        let inst = Instance::new("e", AnchorModel::OneP, vec![]).unwrap();
        assert!(exact_mris(&inst).unwrap().is_empty());

        let labels = (0..3)
            .map(|i| {
                RotatingSegment::bottom_anchored(Point::new(i as f64 * 0.1, 0.0), 1.0).unwrap()
            })
            .collect();
        let clique = Instance::new("k3", AnchorModel::OneP, labels).unwrap();
        assert_eq!(exact_mris(&clique).unwrap().selected, set(&[0]));

        let labels = [0.0, 1.5, 3.0]
            .iter()
            .map(|&x| RotatingSegment::bottom_anchored(Point::new(x, 0.0), 2.0).unwrap())
            .collect();
        let path = Instance::new("path", AnchorModel::OneP, labels).unwrap();
        assert_eq!(exact_mris(&path).unwrap().selected, set(&[0, 2]));
    }

    #[test]
    fn removing_a_label_never_raises_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let n = rng.gen_range(2..12);
            let labels: Vec<_> = (0..n)
                .map(|_| {
                    RotatingSegment::bottom_anchored(
                        Point::new(rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0)),
                        rng.gen_range(0.2..2.5),
                    )
                    .unwrap()
                })
                .collect();
            let inst = Instance::new("m", AnchorModel::OneP, labels.clone()).unwrap();
            let full = exact_mris(&inst).unwrap();
            assert!(validate_labeling(&inst, &full).unwrap().is_proper());
            let drop = rng.gen_range(0..n);
            let mut fewer = labels;
            fewer.remove(drop);
            let smaller = Instance::new("m", AnchorModel::OneP, fewer).unwrap();
            assert!(exact_mris(&smaller).unwrap().len() <= full.len());
        }
    }
}
