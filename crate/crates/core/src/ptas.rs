//! Shifted compressed-quadtree approximation scheme.
//!
//! For each of `k` diagonal shifts the disks that are not k-aligned are
//! dropped, the rest go into a compressed quadtree, and a dynamic program
//! computes a maximum compatible subset exactly. The best shift wins.
//!
//! The program works on states `(node, B)`: `B` holds the disks already
//! chosen higher up that reach into the node's cell. At a node it tries every
//! compatible subset `J` of the disks stored there and recurses into each
//! child with the members of `B ∪ J` that reach the child's cell.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{centre_disjoint, conflicts_fp, SweepDisk, DEFAULT_FP_TOLERANCE};
use crate::model::{AnchorModel, Instance, Labeling};
use crate::quadtree::{
    aligned_side, depth_cap, normalize_to_unit_square, shift_disk, shift_family,
    smallest_enclosing_cell, CompressedQuadtree, NodeId,
};

/// Most shifts out of `k` (for odd `k >= 5`) in which one disk can fail to
/// be k-aligned: at most 4 per axis.
pub const SHIFT_CONSTANT: usize = 8;

/// Bound on centre-disjoint disks of one boundary set, per unit of `k`.
pub const BOUNDARY_CONSTANT: usize = 72;

pub const DEFAULT_ENUMERATION_LIMIT: u64 = 50_000_000;

/// How disks are judged compatible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompatMode {
    /// Vertical bottom-anchored labels: neither disk holds the other's centre.
    CentreDisjoint,
    /// Arbitrary labels: the full rotating-segment conflict test.
    FullConflict,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtasConfig {
    pub epsilon: f64,
    pub mode: CompatMode,
    pub fp_tolerance: f64,
    /// Calibrated bound on misaligned shifts per disk.
    pub shift_constant: usize,
    /// Use this `k` instead of the one derived from `epsilon`.
    pub k_override: Option<usize>,
    pub memoize: bool,
    /// Cap on subsets evaluated per shift.
    pub enumeration_limit: u64,
}

impl PtasConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::EpsilonOutOfRange(epsilon));
        }
        Ok(PtasConfig {
            epsilon,
            mode: CompatMode::CentreDisjoint,
            fp_tolerance: DEFAULT_FP_TOLERANCE,
            shift_constant: SHIFT_CONSTANT,
            k_override: None,
            memoize: true,
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
        })
    }

    pub fn fp(epsilon: f64) -> Result<Self> {
        Ok(PtasConfig {
            mode: CompatMode::FullConflict,
            ..Self::new(epsilon)?
        })
    }

    /// Number of shifts, and the alignment factor.
    ///
    /// With at most `c` misaligned shifts per disk, some shift keeps a
    /// `1 - c/k` fraction of an optimum, and `k >= c (1 + ε) / ε` makes that
    /// at least `1 / (1 + ε)`. `k` is rounded up to an odd number so the
    /// offsets `j / k` spread evenly over every dyadic cell size.
    pub fn k(&self) -> usize {
        if let Some(k) = self.k_override {
            return k;
        }
        let c = self.shift_constant as f64;
        let raw = (c * (1.0 + self.epsilon) / self.epsilon).ceil() as usize;
        let k = raw.max(5);
        if k.is_multiple_of(2) {
            k + 1
        } else {
            k
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::EpsilonOutOfRange(self.epsilon));
        }
        if self.k() == 0 {
            return Err(Error::InvalidK(0));
        }
        if self.mode == CompatMode::FullConflict
            && !(self.fp_tolerance > 0.0 && self.fp_tolerance.is_finite())
        {
            return Err(Error::NonPositive {
                name: "fp tolerance",
                value: self.fp_tolerance,
            });
        }
        Ok(())
    }
}

/// Pairwise compatibility of the labels of one instance, computed once.
#[derive(Clone, Debug)]
pub struct CompatMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl CompatMatrix {
    pub fn build(instance: &Instance, mode: CompatMode, fp_tolerance: f64) -> Result<Self> {
        let expected = match mode {
            CompatMode::CentreDisjoint => AnchorModel::OneP,
            CompatMode::FullConflict => AnchorModel::FixedPosition,
        };
        if instance.model() != expected {
            return Err(Error::WrongModel {
                expected: expected.to_string(),
                found: instance.model(),
            });
        }
        let n = instance.len();
        let words = n.div_ceil(64).max(1);
        let mut m = CompatMatrix {
            n,
            words,
            bits: vec![0; n * words],
        };
        let labels = instance.labels();
        for i in 0..n {
            m.set(i, i);
            for j in i + 1..n {
                let ok = match mode {
                    CompatMode::CentreDisjoint => {
                        centre_disjoint(&labels[i].sweep_disk(), &labels[j].sweep_disk())
                    }
                    CompatMode::FullConflict => {
                        !conflicts_fp(&labels[i], &labels[j], fp_tolerance)?
                    }
                };
                if ok {
                    m.set(i, j);
                    m.set(j, i);
                }
            }
        }
        Ok(m)
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn compatible(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn compatible_with_all(&self, i: usize, set: &[usize]) -> bool {
        set.iter().all(|&j| self.compatible(i, j))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DpValue {
    pub size: usize,
    /// Chosen disk ids, ascending.
    pub witness: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DpStats {
    /// States evaluated (memo entries when memoizing).
    pub entries: u64,
    pub enumerated_subsets: u64,
    /// Largest boundary set seen.
    pub max_boundary: usize,
    /// Largest chosen subset at a single node.
    pub max_node_choice: usize,
}

/// The dynamic program over one compressed quadtree.
pub struct DpSolver<'a> {
    tree: &'a CompressedQuadtree,
    compat: &'a CompatMatrix,
    memoize: bool,
    enumeration_limit: u64,
    /// Growth applied to disks when deciding whether they reach a cell.
    reach_slack: f64,
    subtree_size: Vec<usize>,
    memo: HashMap<(NodeId, Vec<usize>), DpValue>,
    stats: DpStats,
}

impl<'a> DpSolver<'a> {
    pub fn new(tree: &'a CompressedQuadtree, compat: &'a CompatMatrix) -> Self {
        let mut subtree_size = vec![0; tree.node_count()];
        for id in (0..tree.node_count()).rev() {
            // children have larger ids than their parent
            let node = tree.node(id);
            subtree_size[id] = node.disks.len()
                + node
                    .children
                    .iter()
                    .map(|&c| subtree_size[c])
                    .sum::<usize>();
        }
        DpSolver {
            tree,
            compat,
            memoize: true,
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
            reach_slack: 1e-9,
            subtree_size,
            memo: HashMap::new(),
            stats: DpStats::default(),
        }
    }

    pub fn memoize(mut self, on: bool) -> Self {
        self.memoize = on;
        self
    }

    pub fn enumeration_limit(mut self, limit: u64) -> Self {
        self.enumeration_limit = limit;
        self
    }

    pub fn reach_slack(mut self, slack: f64) -> Self {
        self.reach_slack = slack;
        self
    }

    pub fn stats(&self) -> DpStats {
        self.stats
    }

    fn boundary_bound(&self) -> usize {
        BOUNDARY_CONSTANT * self.tree.k()
    }

    /// Largest compatible subset of the disks inside `node`'s cell whose union
    /// with `boundary` stays compatible.
    pub fn dp_solve(&mut self, node: NodeId, boundary: &[usize]) -> Result<DpValue> {
        let mut b = boundary.to_vec();
        b.sort_unstable();
        b.dedup();
        for (x, &i) in b.iter().enumerate() {
            for &j in &b[x + 1..] {
                if !self.compat.compatible(i, j) {
                    return Err(Error::IncompatibleBoundary(i, j));
                }
            }
        }
        self.solve(node, b)
    }

    /// Solves from the root with an empty boundary.
    pub fn solve_root(&mut self) -> Result<DpValue> {
        match self.tree.root() {
            Some(root) => self.solve(root, Vec::new()),
            None => Ok(DpValue::default()),
        }
    }

    fn solve(&mut self, node: NodeId, boundary: Vec<usize>) -> Result<DpValue> {
        if self.memoize {
            if let Some(v) = self.memo.get(&(node, boundary.clone())) {
                return Ok(v.clone());
            }
        }
        if boundary.len() > self.boundary_bound() {
            return Err(Error::EnumerationLimit {
                node,
                detail: format!(
                    "boundary set of {} disks exceeds {}·k = {}",
                    boundary.len(),
                    BOUNDARY_CONSTANT,
                    self.boundary_bound()
                ),
            });
        }
        self.stats.entries += 1;
        self.stats.max_boundary = self.stats.max_boundary.max(boundary.len());

        let tree = self.tree;
        let candidates: Vec<usize> = tree
            .node(node)
            .disks
            .iter()
            .copied()
            .filter(|&d| self.compat.compatible_with_all(d, &boundary))
            .collect();
        let children_bound: usize = tree
            .node(node)
            .children
            .iter()
            .map(|&c| self.subtree_size[c])
            .sum();

        let mut best: Option<DpValue> = None;
        let mut chosen = Vec::new();
        self.enumerate(
            node,
            &candidates,
            0,
            &mut chosen,
            &boundary,
            children_bound,
            &mut best,
        )?;
        let value = best.expect("the empty choice is always evaluated");

        if self.memoize {
            self.memo.insert((node, boundary), value.clone());
        }
        Ok(value)
    }

    /// Include-first enumeration of the compatible subsets of `candidates`.
    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &mut self,
        node: NodeId,
        candidates: &[usize],
        next: usize,
        chosen: &mut Vec<usize>,
        boundary: &[usize],
        children_bound: usize,
        best: &mut Option<DpValue>,
    ) -> Result<()> {
        let best_size = best.as_ref().map(|b| b.size);
        // Even taking every remaining candidate and every disk below cannot win.
        if let Some(bs) = best_size {
            if chosen.len() + (candidates.len() - next) + children_bound <= bs {
                return Ok(());
            }
        }
        if next == candidates.len() {
            return self.evaluate(node, chosen, boundary, best);
        }
        let d = candidates[next];
        if self.compat.compatible_with_all(d, chosen) {
            chosen.push(d);
            let r = self.enumerate(
                node,
                candidates,
                next + 1,
                chosen,
                boundary,
                children_bound,
                best,
            );
            chosen.pop();
            r?;
        }
        self.enumerate(
            node,
            candidates,
            next + 1,
            chosen,
            boundary,
            children_bound,
            best,
        )
    }

    fn evaluate(
        &mut self,
        node: NodeId,
        chosen: &[usize],
        boundary: &[usize],
        best: &mut Option<DpValue>,
    ) -> Result<()> {
        self.stats.enumerated_subsets += 1;
        if self.stats.enumerated_subsets > self.enumeration_limit {
            return Err(Error::EnumerationLimit {
                node,
                detail: format!("more than {} subsets evaluated", self.enumeration_limit),
            });
        }
        if chosen.len() > self.boundary_bound() {
            return Err(Error::EnumerationLimit {
                node,
                detail: format!("compatible choice of {} disks at one node", chosen.len()),
            });
        }
        self.stats.max_node_choice = self.stats.max_node_choice.max(chosen.len());

        let mut carried: Vec<usize> = boundary.iter().chain(chosen).copied().collect();
        carried.sort_unstable();

        let tree = self.tree;
        let mut witness = chosen.to_vec();
        for &child in &tree.node(node).children {
            let cell = tree.node(child).cell;
            let child_boundary: Vec<usize> = carried
                .iter()
                .copied()
                .filter(|&d| cell.meets_disk(tree.disk(d), self.reach_slack))
                .collect();
            let v = self.solve(child, child_boundary)?;
            witness.extend_from_slice(&v.witness);
        }
        if best.as_ref().is_none_or(|b| witness.len() > b.size) {
            witness.sort_unstable();
            *best = Some(DpValue {
                size: witness.len(),
                witness,
            });
        }
        Ok(())
    }
}

/// Per-shift figures for the benchmark harness.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftStats {
    pub shift: f64,
    pub aligned: usize,
    pub nodes: usize,
    pub dp: DpStats,
    pub best_size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PtasReport {
    pub labeling: Labeling,
    pub k: usize,
    pub shifts: Vec<ShiftStats>,
    /// Index of the winning shift (the first one on ties).
    pub best_shift: usize,
}

/// Everything the per-shift runs share.
pub struct PtasSetup {
    pub disks: Vec<SweepDisk>,
    pub compat: CompatMatrix,
    pub k: usize,
    pub reach_slack: f64,
    max_depth: u32,
}

impl PtasSetup {
    pub fn new(instance: &Instance, config: &PtasConfig) -> Result<Self> {
        config.validate()?;
        let compat = CompatMatrix::build(instance, config.mode, config.fp_tolerance)?;
        let (disks, transform) = if instance.is_empty() {
            (Vec::new(), crate::quadtree::UnitTransform::IDENTITY)
        } else {
            normalize_to_unit_square(&instance.sweep_disks())?
        };
        let reach_slack = match config.mode {
            CompatMode::CentreDisjoint => 1e-9,
            CompatMode::FullConflict => 1e-9 + config.fp_tolerance * transform.scale,
        };
        Ok(PtasSetup {
            max_depth: depth_cap(&disks),
            disks,
            compat,
            k: config.k(),
            reach_slack,
        })
    }

    /// Ids of the disks that are k-aligned under `shift`.
    pub fn aligned(&self, shift: f64) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (id, d) in self.disks.iter().enumerate() {
            let shifted = shift_disk(d, shift);
            let cell = smallest_enclosing_cell(&shifted, self.max_depth)
                .ok_or(Error::OutsideRoot { id })?;
            if aligned_side(cell.side(), d.radius, self.k) {
                out.push(id);
            }
        }
        Ok(out)
    }

    pub fn tree(&self, shift: f64) -> Result<CompressedQuadtree> {
        let aligned = self.aligned(shift)?;
        CompressedQuadtree::build(&self.disks, &aligned, shift, self.k)
    }
}

fn run_shift(setup: &PtasSetup, shift: f64, config: &PtasConfig) -> Result<(DpValue, ShiftStats)> {
    let tree = setup.tree(shift)?;
    let mut dp = DpSolver::new(&tree, &setup.compat)
        .memoize(config.memoize)
        .enumeration_limit(config.enumeration_limit)
        .reach_slack(setup.reach_slack);
    let value = dp.solve_root()?;
    debug_assert!(
        value
            .witness
            .iter()
            .enumerate()
            .all(|(x, &i)| value.witness[x + 1..]
                .iter()
                .all(|&j| setup.compat.compatible(i, j))),
        "incompatible witness at shift {shift}"
    );
    let stats = ShiftStats {
        shift,
        aligned: tree.members().len(),
        nodes: tree.node_count(),
        dp: dp.stats(),
        best_size: value.size,
    };
    Ok((value, stats))
}

/// Runs every shift and keeps the largest solution.
pub fn ptas_mris_report(instance: &Instance, config: &PtasConfig) -> Result<PtasReport> {
    let setup = PtasSetup::new(instance, config)?;
    let mut best: Option<(usize, DpValue)> = None;
    let mut shifts = Vec::new();
    for (i, shift) in shift_family(setup.k)?.into_iter().enumerate() {
        let (value, stats) = run_shift(&setup, shift, config)?;
        shifts.push(stats);
        if best.as_ref().is_none_or(|(_, b)| value.size > b.size) {
            best = Some((i, value));
        }
    }
    let (best_shift, value) = best.expect("at least one shift");
    Ok(PtasReport {
        labeling: Labeling::new(value.witness),
        k: setup.k,
        shifts,
        best_shift,
    })
}

/// Approximation scheme for bottom-anchored vertical labels.
pub fn ptas_mris(instance: &Instance, config: &PtasConfig) -> Result<Labeling> {
    let config = PtasConfig {
        mode: CompatMode::CentreDisjoint,
        ..*config
    };
    Ok(ptas_mris_report(instance, &config)?.labeling)
}

/// Approximation scheme for labels of fixed anchor and orientation.
pub fn ptas_mris_fp(instance: &Instance, config: &PtasConfig) -> Result<Labeling> {
    let config = PtasConfig {
        mode: CompatMode::FullConflict,
        ..*config
    };
    Ok(ptas_mris_report(instance, &config)?.labeling)
}
