//! Spatial scaffolding for the approximation scheme: normalization into the
//! unit square, the family of diagonal shifts, a compressed quadtree over
//! sweep disks and k-alignment.
//!
//! Content lives in `[0, 1]²` and the root cell is `[0, 2]²`, so every shift
//! in `[0, 1)` keeps all disks inside the root. Cell sides are `2 / 2^depth`
//! and cell corners are dyadic, so cell arithmetic is exact.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{Point, SweepDisk};

pub const ROOT_SIDE: f64 = 2.0;

/// Hard limit on subdivision, independent of the disk sizes.
const MAX_DEPTH: u32 = 60;

/// Similarity `p -> p * scale + translate`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitTransform {
    pub scale: f64,
    pub translate: (f64, f64),
}

impl UnitTransform {
    pub const IDENTITY: UnitTransform = UnitTransform {
        scale: 1.0,
        translate: (0.0, 0.0),
    };

    pub fn apply_point(&self, p: Point) -> Point {
        Point::new(
            p.x * self.scale + self.translate.0,
            p.y * self.scale + self.translate.1,
        )
    }

    pub fn apply_disk(&self, d: &SweepDisk) -> SweepDisk {
        SweepDisk {
            centre: self.apply_point(d.centre),
            radius: d.radius * self.scale,
        }
    }

    pub fn invert_point(&self, p: Point) -> Point {
        Point::new(
            (p.x - self.translate.0) / self.scale,
            (p.y - self.translate.1) / self.scale,
        )
    }
}

/// Scales and translates the disks so their joint bounding box has its lower
/// left corner at the origin and its longer side equal to 1.
pub fn normalize_to_unit_square(disks: &[SweepDisk]) -> Result<(Vec<SweepDisk>, UnitTransform)> {
    if disks.is_empty() {
        return Err(Error::EmptyInput("no disks to normalize"));
    }
    let (mut lo_x, mut lo_y) = (f64::INFINITY, f64::INFINITY);
    let (mut hi_x, mut hi_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for d in disks {
        lo_x = lo_x.min(d.centre.x - d.radius);
        lo_y = lo_y.min(d.centre.y - d.radius);
        hi_x = hi_x.max(d.centre.x + d.radius);
        hi_y = hi_y.max(d.centre.y + d.radius);
    }
    let extent = (hi_x - lo_x).max(hi_y - lo_y);
    let scale = 1.0 / extent;
    let transform = UnitTransform {
        scale,
        translate: (-lo_x * scale, -lo_y * scale),
    };
    let mapped = disks
        .iter()
        .map(|d| {
            let mut m = transform.apply_disk(d);
            // Rounding may push a bounding coordinate a few ulps past [0, 1].
            m.radius = m.radius.min(0.5);
            m.centre.x = fit_unit(m.centre.x, m.radius);
            m.centre.y = fit_unit(m.centre.y, m.radius);
            m
        })
        .collect();
    Ok((mapped, transform))
}

fn fit_unit(c: f64, r: f64) -> f64 {
    let mut c = c.clamp(r, 1.0 - r);
    while c + r > 1.0 {
        c = c.next_down();
    }
    while c - r < 0.0 {
        c = c.next_up();
    }
    c
}

/// Diagonal offsets `t / k` for `t = 0..k`.
pub fn shift_family(k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidK(k));
    }
    Ok((0..k).map(|t| t as f64 / k as f64).collect())
}

pub fn shift_disk(d: &SweepDisk, shift: f64) -> SweepDisk {
    SweepDisk {
        centre: Point::new(d.centre.x + shift, d.centre.y + shift),
        radius: d.radius,
    }
}

/// The literal alignment condition: a cell of side `side` holding a disk of
/// radius `radius` has side at most `k * radius`.
pub fn aligned_side(side: f64, radius: f64, k: usize) -> bool {
    side <= k as f64 * radius
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadtreeCell {
    pub depth: u32,
    pub ix: u64,
    pub iy: u64,
}

impl QuadtreeCell {
    pub const ROOT: QuadtreeCell = QuadtreeCell {
        depth: 0,
        ix: 0,
        iy: 0,
    };

    pub fn side(&self) -> f64 {
        ROOT_SIDE / (1u64 << self.depth) as f64
    }

    /// Lower-left corner, in shifted coordinates.
    pub fn origin(&self) -> Point {
        let s = self.side();
        Point::new(self.ix as f64 * s, self.iy as f64 * s)
    }

    /// Child quadrant `q` (bit 0: right half, bit 1: upper half).
    pub fn child(&self, q: usize) -> QuadtreeCell {
        QuadtreeCell {
            depth: self.depth + 1,
            ix: self.ix * 2 + (q & 1) as u64,
            iy: self.iy * 2 + (q >> 1 & 1) as u64,
        }
    }

    pub fn ancestor_at(&self, depth: u32) -> QuadtreeCell {
        debug_assert!(depth <= self.depth);
        let up = self.depth - depth;
        QuadtreeCell {
            depth,
            ix: self.ix >> up,
            iy: self.iy >> up,
        }
    }

    pub fn is_ancestor_of(&self, other: &QuadtreeCell) -> bool {
        other.depth >= self.depth && other.ancestor_at(self.depth) == *self
    }

    /// Which child quadrant of `self` contains the strict descendant `other`.
    pub fn quadrant_of(&self, other: &QuadtreeCell) -> usize {
        let c = other.ancestor_at(self.depth + 1);
        (c.ix & 1) as usize | ((c.iy & 1) as usize) << 1
    }

    /// Deepest cell containing both.
    pub fn common_ancestor(&self, other: &QuadtreeCell) -> QuadtreeCell {
        let mut depth = self.depth.min(other.depth);
        loop {
            let (a, b) = (self.ancestor_at(depth), other.ancestor_at(depth));
            if a == b {
                return a;
            }
            depth -= 1;
        }
    }

    /// Closed containment of a disk in the closed cell.
    pub fn contains_disk(&self, d: &SweepDisk) -> bool {
        let o = self.origin();
        let s = self.side();
        d.centre.x - d.radius >= o.x
            && d.centre.x + d.radius <= o.x + s
            && d.centre.y - d.radius >= o.y
            && d.centre.y + d.radius <= o.y + s
    }

    /// Whether the disk, grown by `slack`, meets the closed cell.
    pub fn meets_disk(&self, d: &SweepDisk, slack: f64) -> bool {
        let o = self.origin();
        let s = self.side();
        let nx = d.centre.x.clamp(o.x, o.x + s);
        let ny = d.centre.y.clamp(o.y, o.y + s);
        let r = d.radius + slack;
        Point::new(nx, ny).distance_sq(d.centre) <= r * r
    }
}

/// Depth below which cells are never split: side `>= min radius / 4`.
pub fn depth_cap(disks: &[SweepDisk]) -> u32 {
    let min_r = disks.iter().map(|d| d.radius).fold(f64::INFINITY, f64::min);
    if !min_r.is_finite() {
        return 0;
    }
    let ratio = ROOT_SIDE / (min_r / 4.0);
    (ratio.log2().floor().max(0.0) as u32).min(MAX_DEPTH)
}

/// Smallest cell (no deeper than `max_depth`) containing the disk, or `None`
/// if the disk sticks out of the root.
pub fn smallest_enclosing_cell(d: &SweepDisk, max_depth: u32) -> Option<QuadtreeCell> {
    if !QuadtreeCell::ROOT.contains_disk(d) {
        return None;
    }
    let mut cell = QuadtreeCell::ROOT;
    while cell.depth < max_depth {
        let s = cell.side() / 2.0;
        let ix = ((d.centre.x - d.radius) / s).floor();
        let iy = ((d.centre.y - d.radius) / s).floor();
        let next = QuadtreeCell {
            depth: cell.depth + 1,
            ix: ix.max(0.0) as u64,
            iy: iy.max(0.0) as u64,
        };
        if !next.contains_disk(d) {
            break;
        }
        cell = next;
    }
    Some(cell)
}

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub cell: QuadtreeCell,
    /// Disks whose smallest enclosing cell is this node's cell, ascending.
    pub disks: Vec<usize>,
    /// At most one child per quadrant, in quadrant order.
    pub children: Vec<NodeId>,
}

/// Quadtree over one shifted copy of the disks, with single-child chains
/// merged into their lowest cell.
#[derive(Clone, Debug)]
pub struct CompressedQuadtree {
    nodes: Vec<TreeNode>,
    /// Shifted disks, indexed by disk id.
    disks: Vec<SweepDisk>,
    cells: Vec<Option<QuadtreeCell>>,
    members: Vec<usize>,
    shift: f64,
    k: usize,
    max_depth: u32,
}

/// Builds the tree over all disks.
pub fn build_compressed_quadtree(
    disks: &[SweepDisk],
    shift: f64,
    k: usize,
) -> Result<CompressedQuadtree> {
    let all: Vec<usize> = (0..disks.len()).collect();
    CompressedQuadtree::build(disks, &all, shift, k)
}

impl CompressedQuadtree {
    /// Builds the tree over the disks listed in `members`. `disks` are the
    /// normalized, unshifted disks; ids are their positions in that slice.
    pub fn build(disks: &[SweepDisk], members: &[usize], shift: f64, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidK(k));
        }
        let max_depth = depth_cap(disks);
        let shifted: Vec<SweepDisk> = disks.iter().map(|d| shift_disk(d, shift)).collect();
        let mut cells = vec![None; disks.len()];
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        for &id in &members {
            if id >= disks.len() {
                return Err(Error::IndexOutOfRange {
                    index: id,
                    n: disks.len(),
                });
            }
            let cell = smallest_enclosing_cell(&shifted[id], max_depth)
                .ok_or(Error::OutsideRoot { id })?;
            cells[id] = Some(cell);
        }
        let mut tree = CompressedQuadtree {
            nodes: Vec::new(),
            disks: shifted,
            cells,
            members: members.clone(),
            shift,
            k,
            max_depth,
        };
        if !members.is_empty() {
            tree.grow(members);
        }
        Ok(tree)
    }

    fn cell(&self, id: usize) -> QuadtreeCell {
        self.cells[id].expect("member disk has a cell")
    }

    fn grow(&mut self, ids: Vec<usize>) -> NodeId {
        let common = ids
            .iter()
            .map(|&id| self.cell(id))
            .reduce(|a, b| a.common_ancestor(&b))
            .expect("non-empty");
        let mut stored = Vec::new();
        let mut quadrants: [Vec<usize>; 4] = Default::default();
        for id in ids {
            let c = self.cell(id);
            if c == common {
                stored.push(id);
            } else {
                quadrants[common.quadrant_of(&c)].push(id);
            }
        }
        let node = self.nodes.len();
        self.nodes.push(TreeNode {
            cell: common,
            disks: stored,
            children: Vec::new(),
        });
        for q in quadrants {
            if !q.is_empty() {
                let child = self.grow(q);
                self.nodes[node].children.push(child);
            }
        }
        node
    }

    pub fn root(&self) -> Option<NodeId> {
        (!self.nodes.is_empty()).then_some(0)
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    /// Ids of the disks stored in the tree, ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Shifted disk with the given id.
    pub fn disk(&self, id: usize) -> &SweepDisk {
        &self.disks[id]
    }

    /// Smallest enclosing cell of a stored disk.
    pub fn cell_of(&self, id: usize) -> Option<QuadtreeCell> {
        self.cells.get(id).copied().flatten()
    }

    /// Whether a stored disk sits in a cell of side at most `k` times its radius.
    pub fn is_k_aligned(&self, id: usize) -> bool {
        match self.cell_of(id) {
            Some(cell) => aligned_side(cell.side(), self.disks[id].radius, self.k),
            None => false,
        }
    }

    /// Checks the structural invariants; returns a description of the first
    /// violation found.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let n = self.members.len();
        if self.nodes.len() > 2 * n + 1 {
            return Err(format!("{} nodes for {} disks", self.nodes.len(), n));
        }
        let mut seen = 0usize;
        for (i, node) in self.nodes.iter().enumerate() {
            if node.disks.is_empty() && node.children.len() < 2 {
                return Err(format!(
                    "node {i} stores nothing and has {} children",
                    node.children.len()
                ));
            }
            for &id in &node.disks {
                seen += 1;
                let d = &self.disks[id];
                if !node.cell.contains_disk(d) {
                    return Err(format!("disk {id} is not inside the cell of node {i}"));
                }
                if node.cell.depth < self.max_depth
                    && (0..4).any(|q| node.cell.child(q).contains_disk(d))
                {
                    return Err(format!("disk {id} fits in a child of node {i}"));
                }
            }
            let mut quads = Vec::new();
            for &c in &node.children {
                let child = &self.nodes[c].cell;
                if child.depth <= node.cell.depth || !node.cell.is_ancestor_of(child) {
                    return Err(format!("node {c} is not below node {i}"));
                }
                quads.push(node.cell.quadrant_of(child));
            }
            let len = quads.len();
            quads.dedup();
            if quads.len() != len {
                return Err(format!("node {i} has two children in one quadrant"));
            }
        }
        if seen != n {
            return Err(format!("{seen} disks stored, {n} expected"));
        }
        Ok(())
    }

    /// Indented text listing of the tree, one node per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "shift={} k={} disks={} nodes={}",
            self.shift,
            self.k,
            self.members.len(),
            self.nodes.len()
        );
        if let Some(root) = self.root() {
            self.dump_node(root, 0, &mut out);
        }
        out
    }

    fn dump_node(&self, id: NodeId, indent: usize, out: &mut String) {
        let node = &self.nodes[id];
        let _ = writeln!(
            out,
            "{:indent$}depth={} cell=({},{}) side={} disks={:?}",
            "",
            node.cell.depth,
            node.cell.ix,
            node.cell.iy,
            node.cell.side(),
            node.disks,
            indent = indent * 2
        );
        for &c in &node.children {
            self.dump_node(c, indent + 1, out);
        }
    }
}
