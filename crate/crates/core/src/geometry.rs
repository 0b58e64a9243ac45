//! Geometry of labels that rotate in lockstep around their anchors.
//!
//! All labels turn by the same phase θ. A pair is therefore best studied in
//! the co-rotating frame of the first label: the first segment stays put, the
//! second keeps its direction, and its anchor travels around the circle of
//! radius |ab| centred at the first anchor.
//!
//! Segments and disks are closed sets. Touching counts as intersecting and
//! a disk contains the points on its boundary circle.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance of [`conflicts_fp`], in instance units.
pub const DEFAULT_FP_TOLERANCE: f64 = 1e-9;

/// Orientations closer than this (mod π) are treated as parallel.
pub const PARALLEL_ANGLE_EPS: f64 = 1e-12;

/// Number of equal sub-intervals the phase search starts from.
const INITIAL_PHASE_INTERVALS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(self, other: Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    fn offset(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

/// A label: a segment through its anchor that turns around the anchor.
///
/// `anchor_offset` is measured from the "down" end of the segment, so the
/// segment covers `anchor + t·u` for `t ∈ [-anchor_offset, length - anchor_offset]`,
/// where `u` is the unit "up" direction. At phase zero `u` is the vertical
/// `(0, 1)` turned counter-clockwise by `orientation` radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotatingSegment {
    pub anchor: Point,
    pub length: f64,
    pub anchor_offset: f64,
    pub orientation: f64,
}

impl RotatingSegment {
    pub fn new(anchor: Point, length: f64, anchor_offset: f64, orientation: f64) -> Result<Self> {
        if !anchor.is_finite() {
            return Err(Error::InvalidLabel(format!(
                "anchor ({}, {}) is not finite",
                anchor.x, anchor.y
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidLabel(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        if !(anchor_offset.is_finite() && (0.0..=length).contains(&anchor_offset)) {
            return Err(Error::InvalidLabel(format!(
                "anchor offset {anchor_offset} is outside [0, {length}]"
            )));
        }
        if !orientation.is_finite() {
            return Err(Error::InvalidLabel(format!(
                "orientation {orientation} is not finite"
            )));
        }
        Ok(RotatingSegment {
            anchor,
            length,
            anchor_offset,
            orientation: orientation.rem_euclid(TAU),
        })
    }

    /// Vertical label anchored `anchor_offset` above its bottom end.
    pub fn vertical(anchor: Point, length: f64, anchor_offset: f64) -> Result<Self> {
        Self::new(anchor, length, anchor_offset, 0.0)
    }

    /// Vertical label anchored at its bottom end (the 1P placement).
    pub fn bottom_anchored(anchor: Point, length: f64) -> Result<Self> {
        Self::new(anchor, length, 0.0, 0.0)
    }

    pub fn down_reach(&self) -> f64 {
        self.anchor_offset
    }

    pub fn up_reach(&self) -> f64 {
        self.length - self.anchor_offset
    }

    pub fn max_reach(&self) -> f64 {
        self.down_reach().max(self.up_reach())
    }

    /// The disk swept by the label over a full turn.
    pub fn sweep_disk(&self) -> SweepDisk {
        SweepDisk {
            centre: self.anchor,
            radius: self.max_reach(),
        }
    }

    /// Unit "up" direction at the given phase.
    pub fn direction(&self, phase: f64) -> (f64, f64) {
        let (s, c) = (self.orientation + phase).sin_cos();
        (-s, c)
    }

    /// Down and up end points at the given phase.
    pub fn endpoints_at(&self, phase: f64) -> (Point, Point) {
        let (ux, uy) = self.direction(phase);
        let down = self.down_reach();
        let up = self.up_reach();
        (
            self.anchor.offset(-down * ux, -down * uy),
            self.anchor.offset(up * ux, up * uy),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepDisk {
    pub centre: Point,
    pub radius: f64,
}

impl SweepDisk {
    pub fn new(centre: Point, radius: f64) -> Result<Self> {
        if !centre.is_finite() {
            return Err(Error::InvalidDisk("centre is not finite".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidDisk(format!(
                "radius must be positive and finite, got {radius}"
            )));
        }
        Ok(SweepDisk { centre, radius })
    }

    /// Closed containment of a point.
    pub fn contains(&self, p: Point) -> bool {
        self.centre.distance_sq(p) <= self.radius * self.radius
    }
}

/// Whether two parallel rotating segments ever meet during a full turn.
///
/// Both labels share one orientation; each is described by its anchor and the
/// reaches below and above it. The segments are collinear exactly when the
/// common direction is parallel to `ab`, so they meet iff
/// `|ab| <= max(up_a + down_b, up_b + down_a)`.
pub fn conflicts_vertical(
    anchor_a: Point,
    down_a: f64,
    up_a: f64,
    anchor_b: Point,
    down_b: f64,
    up_b: f64,
) -> Result<bool> {
    for reach in [down_a, up_a, down_b, up_b] {
        if !(reach.is_finite() && reach >= 0.0) {
            return Err(Error::InvalidReach(reach));
        }
    }
    let dist_sq = anchor_a.distance_sq(anchor_b);
    if dist_sq == 0.0 && down_a + up_a == 0.0 && down_b + up_b == 0.0 {
        return Err(Error::DegeneratePair);
    }
    let threshold = (up_a + down_b).max(up_b + down_a);
    Ok(dist_sq <= threshold * threshold)
}

/// Convenience wrapper of [`conflicts_vertical`] for two labels of the same
/// orientation family.
pub fn conflicts_parallel(a: &RotatingSegment, b: &RotatingSegment) -> Result<bool> {
    conflicts_vertical(
        a.anchor,
        a.down_reach(),
        a.up_reach(),
        b.anchor,
        b.down_reach(),
        b.up_reach(),
    )
}

/// Neither disk contains the centre of the other.
pub fn centre_disjoint(a: &SweepDisk, b: &SweepDisk) -> bool {
    let r = a.radius.max(b.radius);
    a.centre.distance_sq(b.centre) > r * r
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn on_segment(p: Point, q: Point, r: Point) -> bool {
    r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
}

/// Closed segment-segment intersection test.
pub fn segments_intersect(p1: Point, q1: Point, p2: Point, q2: Point) -> bool {
    let d1 = cross(p2, q2, p1);
    let d2 = cross(p2, q2, q1);
    let d3 = cross(p1, q1, p2);
    let d4 = cross(p1, q1, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(p2, q2, p1))
        || (d2 == 0.0 && on_segment(p2, q2, q1))
        || (d3 == 0.0 && on_segment(p1, q1, p2))
        || (d4 == 0.0 && on_segment(p1, q1, q2))
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (vx, vy) = (b.x - a.x, b.y - a.y);
    let len_sq = vx * vx + vy * vy;
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * vx + (p.y - a.y) * vy) / len_sq).clamp(0.0, 1.0);
    p.distance(a.offset(t * vx, t * vy))
}

pub fn segment_distance(p1: Point, q1: Point, p2: Point, q2: Point) -> f64 {
    if segments_intersect(p1, q1, p2, q2) {
        return 0.0;
    }
    point_segment_distance(p1, p2, q2)
        .min(point_segment_distance(q1, p2, q2))
        .min(point_segment_distance(p2, p1, q1))
        .min(point_segment_distance(q2, p1, q1))
}

/// Distance between the two placed segments at phase `theta`, evaluated in
/// the co-rotating frame of `a`.
#[derive(Clone, Copy, Debug)]
pub struct PhaseDistance {
    a_down: Point,
    a_up: Point,
    anchor_a: Point,
    rel: (f64, f64),
    b_down_off: (f64, f64),
    b_up_off: (f64, f64),
}

impl PhaseDistance {
    pub fn new(a: &RotatingSegment, b: &RotatingSegment) -> Self {
        let (a_down, a_up) = a.endpoints_at(0.0);
        let (ux, uy) = b.direction(0.0);
        let (down, up) = (b.down_reach(), b.up_reach());
        PhaseDistance {
            a_down,
            a_up,
            anchor_a: a.anchor,
            rel: (b.anchor.x - a.anchor.x, b.anchor.y - a.anchor.y),
            b_down_off: (-down * ux, -down * uy),
            b_up_off: (up * ux, up * uy),
        }
    }

    /// Lipschitz constant of the distance as a function of phase: `|ab|`.
    pub fn lipschitz(&self) -> f64 {
        self.rel.0.hypot(self.rel.1)
    }

    pub fn at(&self, theta: f64) -> f64 {
        let (s, c) = (-theta).sin_cos();
        let (dx, dy) = self.rel;
        let anchor_b = self.anchor_a.offset(c * dx - s * dy, s * dx + c * dy);
        segment_distance(
            self.a_down,
            self.a_up,
            anchor_b.offset(self.b_down_off.0, self.b_down_off.1),
            anchor_b.offset(self.b_up_off.0, self.b_up_off.1),
        )
    }
}

#[derive(Debug)]
struct PhaseInterval {
    lower_bound: f64,
    lo: f64,
    hi: f64,
}

impl PartialEq for PhaseInterval {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for PhaseInterval {}
impl PartialOrd for PhaseInterval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PhaseInterval {
    // Reversed so that the max-heap pops the smallest lower bound first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lower_bound
            .total_cmp(&self.lower_bound)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Outcome of a phase search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSearch {
    /// Smallest distance observed at an evaluated phase.
    pub best: f64,
    /// Certified lower bound on the true minimum when the search stopped.
    pub lower_bound: f64,
    pub evaluations: usize,
}

/// Lipschitz branch and bound over θ ∈ [0, 2π).
///
/// Stops once `best - lower_bound <= resolution`, or early when `best` drops
/// to `stop_at_or_below`, or when the lower bound exceeds `stop_above`.
fn search_phase(
    dist: &PhaseDistance,
    resolution: f64,
    stop_at_or_below: Option<f64>,
    stop_above: Option<f64>,
) -> PhaseSearch {
    let lip = dist.lipschitz();
    let mut evaluations = 0usize;
    let mut best = f64::INFINITY;
    let mut heap = BinaryHeap::new();
    let mut push = |lo: f64, hi: f64, heap: &mut BinaryHeap<PhaseInterval>, best: &mut f64| {
        let mid = 0.5 * (lo + hi);
        let v = dist.at(mid);
        evaluations += 1;
        if v < *best {
            *best = v;
        }
        heap.push(PhaseInterval {
            lower_bound: v - lip * 0.5 * (hi - lo),
            lo,
            hi,
        });
    };

    let step = TAU / INITIAL_PHASE_INTERVALS as f64;
    for i in 0..INITIAL_PHASE_INTERVALS {
        let lo = i as f64 * step;
        push(lo, lo + step, &mut heap, &mut best);
    }

    while let Some(top) = heap.pop() {
        let lower_bound = top.lower_bound.max(0.0);
        if let Some(t) = stop_at_or_below {
            if best <= t {
                heap.push(top);
                break;
            }
        }
        if let Some(t) = stop_above {
            if lower_bound > t {
                heap.push(top);
                break;
            }
        }
        if best - lower_bound <= resolution {
            heap.push(top);
            break;
        }
        let mid = 0.5 * (top.lo + top.hi);
        if mid <= top.lo || mid >= top.hi {
            // Interval cannot be split further in floating point.
            continue;
        }
        push(top.lo, mid, &mut heap, &mut best);
        push(mid, top.hi, &mut heap, &mut best);
    }

    let lower_bound = heap
        .peek()
        .map(|t| t.lower_bound.max(0.0))
        .unwrap_or(best)
        .min(best);
    PhaseSearch {
        best,
        lower_bound,
        evaluations: evaluations.max(1),
    }
}

/// Minimum over a full turn of the distance between the two placed segments,
/// accurate to within `resolution`.
pub fn min_rotational_distance(
    a: &RotatingSegment,
    b: &RotatingSegment,
    resolution: f64,
) -> Result<f64> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::NonPositive {
            name: "resolution",
            value: resolution,
        });
    }
    if a.anchor == b.anchor {
        return Ok(0.0);
    }
    let dist = PhaseDistance::new(a, b);
    Ok(search_phase(&dist, resolution, None, None).best)
}

fn orientation_gap(a: &RotatingSegment, b: &RotatingSegment) -> f64 {
    (b.orientation - a.orientation).rem_euclid(TAU)
}

/// Conflict test for labels of arbitrary anchor offset and orientation.
///
/// Returns true iff the smallest distance over a full turn, evaluated to
/// within `tolerance / 4`, is at most `tolerance`. Parallel and antiparallel
/// pairs use the exact closed form of [`conflicts_vertical`].
pub fn conflicts_fp(a: &RotatingSegment, b: &RotatingSegment, tolerance: f64) -> Result<bool> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::NonPositive {
            name: "tolerance",
            value: tolerance,
        });
    }
    let (da, db) = (a.sweep_disk(), b.sweep_disk());
    // A label that reaches the other anchor certainly hits the other label.
    if !centre_disjoint(&da, &db) {
        return Ok(true);
    }
    let gap = da.centre.distance(db.centre) - da.radius - db.radius;
    if gap > tolerance {
        return Ok(false);
    }

    let turn = orientation_gap(a, b);
    if turn <= PARALLEL_ANGLE_EPS || TAU - turn <= PARALLEL_ANGLE_EPS {
        return conflicts_parallel(a, b);
    }
    if (turn - PI).abs() <= PARALLEL_ANGLE_EPS {
        // b points the other way: its up reach lies along a's down direction.
        return conflicts_vertical(
            a.anchor,
            a.down_reach(),
            a.up_reach(),
            b.anchor,
            b.up_reach(),
            b.down_reach(),
        );
    }

    Ok(conflicts_by_search(a, b, tolerance))
}

/// The numeric half of [`conflicts_fp`], without any fast path.
pub(crate) fn conflicts_by_search(
    a: &RotatingSegment,
    b: &RotatingSegment,
    tolerance: f64,
) -> bool {
    if a.anchor == b.anchor {
        return true;
    }
    let dist = PhaseDistance::new(a, b);
    let search = search_phase(&dist, tolerance / 4.0, Some(tolerance), Some(tolerance));
    search.best <= tolerance
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn crossing_pair(second: Point) -> (RotatingSegment, RotatingSegment) {
        // Horizontal unit segment pointing right from its anchor, and a vertical
        // unit segment anchored at its bottom end.
        let h = RotatingSegment::new(p(0.0, 0.0), 1.0, 0.0, 1.5 * PI).unwrap();
        let v = RotatingSegment::bottom_anchored(second, 1.0).unwrap();
        (h, v)
    }

    #[test]
    fn vertical_examples() {
        assert!(!conflicts_vertical(p(0.0, 0.0), 0.0, 2.0, p(3.0, 0.0), 0.0, 2.0).unwrap());
        assert!(conflicts_vertical(p(0.0, 0.0), 0.0, 2.0, p(2.0, 0.0), 0.0, 2.0).unwrap());
        assert!(!conflicts_vertical(p(0.0, 0.0), 1.0, 1.0, p(2.1, 0.0), 1.0, 1.0).unwrap());
        // bottom-anchored against top-anchored: threshold max(1 + 1, 0 + 0) = 2
        assert!(conflicts_vertical(p(0.0, 0.0), 0.0, 1.0, p(1.5, 0.0), 1.0, 0.0).unwrap());
    }

    #[test]
    fn vertical_rejects_degenerate_and_negative() {
        assert!(matches!(
            conflicts_vertical(p(1.0, 1.0), 0.0, 0.0, p(1.0, 1.0), 0.0, 0.0),
            Err(Error::DegeneratePair)
        ));
        assert!(matches!(
            conflicts_vertical(p(0.0, 0.0), -1.0, 1.0, p(1.0, 1.0), 0.0, 1.0),
            Err(Error::InvalidReach(_))
        ));
        // zero length at distinct anchors is fine
        assert!(!conflicts_vertical(p(0.0, 0.0), 0.0, 0.0, p(1.0, 0.0), 0.0, 0.0).unwrap());
    }

    #[test]
    fn centre_disjoint_examples() {
        let d1 = SweepDisk::new(p(0.0, 0.0), 2.0).unwrap();
        let d2 = SweepDisk::new(p(12.0, 0.0), 20.0).unwrap();
        assert!(!centre_disjoint(&d1, &d2));
        // Halving the radii gives disjoint disks: 1 + 10 < 12.
        let h1 = SweepDisk::new(d1.centre, 1.0).unwrap();
        let h2 = SweepDisk::new(d2.centre, 10.0).unwrap();
        assert!(h1.radius + h2.radius < h1.centre.distance(h2.centre));

        let u1 = SweepDisk::new(p(0.0, 0.0), 1.0).unwrap();
        let u2 = SweepDisk::new(p(3.0, 0.0), 1.0).unwrap();
        assert!(centre_disjoint(&u1, &u2));

        let a = SweepDisk::new(p(0.0, 0.0), 1.0).unwrap();
        let b = SweepDisk::new(p(2.0, 0.0), 2.0).unwrap();
        assert!(!centre_disjoint(&a, &b));
    }

    #[test]
    fn min_distance_examples() {
        let a = RotatingSegment::bottom_anchored(p(0.0, 0.0), 1.0).unwrap();
        let b = RotatingSegment::bottom_anchored(p(3.0, 0.0), 1.0).unwrap();
        let res = 1e-7;
        let m = min_rotational_distance(&a, &b, res).unwrap();
        assert!((m - 2.0).abs() <= res, "{m}");

        let c = RotatingSegment::new(p(1.0, 1.0), 3.0, 1.0, 0.3).unwrap();
        let d = RotatingSegment::new(p(1.0, 1.0), 0.5, 0.5, 2.0).unwrap();
        assert_eq!(min_rotational_distance(&c, &d, 1e-3).unwrap(), 0.0);

        let (h, v) = crossing_pair(p(1.0, -0.5));
        assert!(min_rotational_distance(&h, &v, 1e-9).unwrap() <= 1e-9);

        assert!(min_rotational_distance(&a, &b, 0.0).is_err());
        assert!(min_rotational_distance(&a, &b, f64::NAN).is_err());
    }

    #[test]
    fn min_distance_matches_dense_sampling() {
        // Sampling at step 2π/10⁶ plus the Lipschitz slack brackets the minimum.
        let a = RotatingSegment::new(p(0.0, 0.0), 1.3, 0.4, 0.7).unwrap();
        let b = RotatingSegment::new(p(2.2, 0.9), 0.8, 0.1, 2.9).unwrap();
        let dist = PhaseDistance::new(&a, &b);
        let steps = 1_000_000;
        let h = TAU / steps as f64;
        let sampled = (0..steps)
            .map(|i| dist.at(i as f64 * h))
            .fold(f64::INFINITY, f64::min);
        let res = 1e-6;
        let m = min_rotational_distance(&a, &b, res).unwrap();
        let slack = dist.lipschitz() * h;
        assert!(m <= sampled + res, "{m} vs {sampled}");
        assert!(m >= sampled - slack - res, "{m} vs {sampled}");
    }

    #[test]
    fn fp_examples() {
        let (h, v) = crossing_pair(p(1.0, -0.5));
        assert!(centre_disjoint(&h.sweep_disk(), &v.sweep_disk()));
        assert!(conflicts_fp(&h, &v, DEFAULT_FP_TOLERANCE).unwrap());

        let (h, v) = crossing_pair(p(3.0, -0.5));
        assert!(!conflicts_fp(&h, &v, DEFAULT_FP_TOLERANCE).unwrap());

        assert!(conflicts_fp(&h, &v, 0.0).is_err());
    }

    #[test]
    fn fp_antiparallel_uses_swapped_reaches() {
        // b points down (orientation π) and is anchored at its "down" end, so it
        // extends 1 below its anchor; that is a top-anchored vertical label.
        let a = RotatingSegment::bottom_anchored(p(0.0, 0.0), 1.0).unwrap();
        let b = RotatingSegment::new(p(1.5, 0.0), 1.0, 0.0, PI).unwrap();
        assert!(conflicts_fp(&a, &b, DEFAULT_FP_TOLERANCE).unwrap());
        let c = RotatingSegment::new(p(2.5, 0.0), 1.0, 0.0, PI).unwrap();
        assert!(!conflicts_fp(&a, &c, DEFAULT_FP_TOLERANCE).unwrap());
    }

    #[test]
    fn search_agrees_with_closed_form_on_vertical_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let tol = 1e-9;
        let mut checked = 0;
        for _ in 0..1000 {
            let mut label = || {
                let len = rng.gen_range(0.1..3.0);
                let off = rng.gen_range(0.0..=len);
                RotatingSegment::vertical(
                    p(rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0)),
                    len,
                    off,
                )
                .unwrap()
            };
            let (a, b) = (label(), label());
            let thr = (a.up_reach() + b.down_reach()).max(b.up_reach() + a.down_reach());
            if (a.anchor.distance(b.anchor) - thr).abs() > 2.0 * tol {
                assert_eq!(
                    conflicts_by_search(&a, &b, tol),
                    conflicts_parallel(&a, &b).unwrap()
                );
                checked += 1;
            }
        }
        assert!(checked > 990);
    }

    #[test]
    fn segment_distance_basics() {
        assert_eq!(
            segment_distance(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)),
            0.0
        );
        assert_eq!(
            segment_distance(p(0.0, 0.0), p(2.0, 0.0), p(1.0, -1.0), p(1.0, 1.0)),
            0.0
        );
        assert_eq!(
            segment_distance(p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(3.0, 0.0)),
            1.0
        );
        assert_eq!(
            segment_distance(p(0.0, 0.0), p(0.0, 1.0), p(3.0, 0.5), p(3.0, 4.0)),
            3.0
        );
    }

    #[test]
    fn label_validation() {
        assert!(RotatingSegment::bottom_anchored(p(0.0, 0.0), 0.0).is_err());
        assert!(RotatingSegment::vertical(p(0.0, 0.0), 1.0, 1.5).is_err());
        assert!(RotatingSegment::bottom_anchored(p(f64::NAN, 0.0), 1.0).is_err());
        let l = RotatingSegment::new(p(0.0, 0.0), 2.0, 0.5, -PI / 2.0).unwrap();
        assert!((l.orientation - 1.5 * PI).abs() < 1e-15);
        assert_eq!(l.down_reach() + l.up_reach(), l.length);
        assert_eq!(l.max_reach(), 1.5);
        assert!(SweepDisk::new(p(0.0, 0.0), 0.0).is_err());
    }

    fn vertical_label() -> impl Strategy<Value = RotatingSegment> {
        (-5.0..5.0f64, -5.0..5.0f64, 0.1..3.0f64, 0.0..1.0f64)
            .prop_map(|(x, y, len, t)| RotatingSegment::vertical(p(x, y), len, t * len).unwrap())
    }

    fn any_label() -> impl Strategy<Value = RotatingSegment> {
        (vertical_label(), 0.0..TAU).prop_map(|(l, o)| {
            RotatingSegment::new(l.anchor, l.length, l.anchor_offset, o).unwrap()
        })
    }

    fn transform(l: &RotatingSegment, tx: f64, ty: f64, scale: f64, rot: f64) -> RotatingSegment {
        let (s, c) = rot.sin_cos();
        let (x, y) = (l.anchor.x * scale, l.anchor.y * scale);
        RotatingSegment::new(
            p(c * x - s * y + tx, s * x + c * y + ty),
            l.length * scale,
            l.anchor_offset * scale,
            l.orientation + rot,
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn predicates_are_symmetric(a in any_label(), b in any_label()) {
            prop_assert_eq!(
                conflicts_parallel(&a, &b).unwrap(),
                conflicts_parallel(&b, &a).unwrap()
            );
            prop_assert_eq!(
                centre_disjoint(&a.sweep_disk(), &b.sweep_disk()),
                centre_disjoint(&b.sweep_disk(), &a.sweep_disk())
            );
            prop_assert_eq!(
                conflicts_fp(&a, &b, 1e-9).unwrap(),
                conflicts_fp(&b, &a, 1e-9).unwrap()
            );
        }

        #[test]
        fn one_position_conflict_is_centre_containment(
            ax in -5.0..5.0f64, ay in -5.0..5.0f64, la in 0.1..3.0f64,
            bx in -5.0..5.0f64, by in -5.0..5.0f64, lb in 0.1..3.0f64,
        ) {
            let a = RotatingSegment::bottom_anchored(p(ax, ay), la).unwrap();
            let b = RotatingSegment::bottom_anchored(p(bx, by), lb).unwrap();
            prop_assert_eq!(
                conflicts_parallel(&a, &b).unwrap(),
                !centre_disjoint(&a.sweep_disk(), &b.sweep_disk())
            );
        }

        #[test]
        fn similarity_invariance(
            a in vertical_label(), b in vertical_label(),
            tx in -10.0..10.0f64, ty in -10.0..10.0f64,
            scale in prop::sample::select(vec![0.25, 0.5, 2.0, 4.0]),
            rot in 0.0..TAU,
        ) {
            // Power-of-two scales keep the vertical closed form bit-exact;
            // rotation is checked away from the threshold.
            let sa = transform(&a, tx, ty, scale, 0.0);
            let sb = transform(&b, tx, ty, scale, 0.0);
            let base = conflicts_parallel(&a, &b).unwrap();
            let thr = (a.up_reach() + b.down_reach()).max(b.up_reach() + a.down_reach());
            let margin = (a.anchor.distance(b.anchor) - thr).abs();
            if margin > 1e-9 {
                prop_assert_eq!(conflicts_parallel(&sa, &sb).unwrap(), base);
                let ra = transform(&a, tx, ty, scale, rot);
                let rb = transform(&b, tx, ty, scale, rot);
                prop_assert_eq!(conflicts_fp(&ra, &rb, 1e-9).unwrap(), base);
                prop_assert_eq!(
                    centre_disjoint(&ra.sweep_disk(), &rb.sweep_disk()),
                    centre_disjoint(&a.sweep_disk(), &b.sweep_disk())
                );
            }
        }

        #[test]
        fn lipschitz_certificate(
            a in any_label(), b in any_label(),
            t1 in 0.0..TAU, t2 in 0.0..TAU,
        ) {
            let d = PhaseDistance::new(&a, &b);
            let lhs = (d.at(t1) - d.at(t2)).abs();
            prop_assert!(lhs <= d.lipschitz() * (t1 - t2).abs() + 1e-9);
        }

        #[test]
        fn midpoint_split_minimises_threshold(
            la in 0.1..5.0f64, lb in 0.1..5.0f64, ta in 0.0..1.0f64, tb in 0.0..1.0f64,
        ) {
            let (da, db) = (ta * la, tb * lb);
            let thr = ((la - da) + db).max((lb - db) + da);
            prop_assert!(thr >= (la + lb) / 2.0 - 1e-12);
            let mid = (la / 2.0 + lb / 2.0).max(lb / 2.0 + la / 2.0);
            prop_assert!((mid - (la + lb) / 2.0).abs() <= 1e-12);
        }

        #[test]
        fn fp_agrees_with_closed_form_on_vertical_pairs(a in vertical_label(), b in vertical_label()) {
            let tol = 1e-9;
            let thr = (a.up_reach() + b.down_reach()).max(b.up_reach() + a.down_reach());
            let margin = (a.anchor.distance(b.anchor) - thr).abs();
            if margin > 2.0 * tol {
                prop_assert_eq!(conflicts_fp(&a, &b, tol).unwrap(), conflicts_parallel(&a, &b).unwrap());
            }
        }
    }
}
