//! Instances, labelings, anchoring-model normalizations and conflict graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    conflicts_fp, conflicts_parallel, conflicts_vertical, Point, RotatingSegment, SweepDisk,
};

/// Where a label may be anchored along its segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnchorModel {
    /// Bottom end point, vertical.
    OneP,
    /// Bottom or top end point, vertical.
    TwoP,
    /// Any point of the segment, vertical. The solver picks the anchor.
    Sliding,
    /// Anchor offset and orientation fixed per label.
    FixedPosition,
}

impl AnchorModel {
    pub fn as_str(self) -> &'static str {
        match self {
            AnchorModel::OneP => "1p",
            AnchorModel::TwoP => "2p",
            AnchorModel::Sliding => "sliding",
            AnchorModel::FixedPosition => "fp",
        }
    }

    /// Whether the solver chooses anchor offsets for this model.
    pub fn has_anchor_freedom(self) -> bool {
        matches!(self, AnchorModel::TwoP | AnchorModel::Sliding)
    }

    /// Checks a label against the constraints of this model.
    pub fn admits(self, label: &RotatingSegment) -> std::result::Result<(), String> {
        let vertical = label.orientation == 0.0;
        match self {
            AnchorModel::OneP if label.anchor_offset != 0.0 || !vertical => {
                Err("1p labels are vertical and anchored at their bottom end".into())
            }
            AnchorModel::TwoP
                if !vertical
                    || (label.anchor_offset != 0.0 && label.anchor_offset != label.length) =>
            {
                Err("2p labels are vertical and anchored at an end point".into())
            }
            AnchorModel::Sliding if !vertical => Err("sliding labels are vertical".into()),
            _ => Ok(()),
        }
    }

    /// Whether `offset` is a legal anchor choice for a label of this length.
    pub fn admits_offset(self, length: f64, offset: f64) -> bool {
        match self {
            AnchorModel::OneP => offset == 0.0,
            AnchorModel::TwoP => offset == 0.0 || offset == length,
            AnchorModel::Sliding => offset.is_finite() && (0.0..=length).contains(&offset),
            AnchorModel::FixedPosition => true,
        }
    }
}

impl fmt::Display for AnchorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnchorModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1p" => Ok(AnchorModel::OneP),
            "2p" => Ok(AnchorModel::TwoP),
            "sliding" => Ok(AnchorModel::Sliding),
            "fp" => Ok(AnchorModel::FixedPosition),
            other => Err(Error::Format(format!(
                "unknown model {other:?} (expected 1p, 2p, sliding or fp)"
            ))),
        }
    }
}

/// A set of labels under one anchoring model. Immutable once built; the
/// transforms below return new instances.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    id: String,
    model: AnchorModel,
    labels: Vec<RotatingSegment>,
    metadata: BTreeMap<String, String>,
}

impl Instance {
    pub fn new(
        id: impl Into<String>,
        model: AnchorModel,
        labels: Vec<RotatingSegment>,
    ) -> Result<Self> {
        Self::with_metadata(id, model, labels, BTreeMap::new())
    }

    pub fn with_metadata(
        id: impl Into<String>,
        model: AnchorModel,
        labels: Vec<RotatingSegment>,
        metadata: BTreeMap<String, String>,
    ) -> Result<Self> {
        for (i, label) in labels.iter().enumerate() {
            model
                .admits(label)
                .map_err(|msg| Error::InvalidLabel(format!("label {i}: {msg}")))?;
        }
        Ok(Instance {
            id: id.into(),
            model,
            labels,
            metadata,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn model(&self) -> AnchorModel {
        self.model
    }

    pub fn labels(&self) -> &[RotatingSegment] {
        &self.labels
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sweep_disks(&self) -> Vec<SweepDisk> {
        self.labels
            .iter()
            .map(RotatingSegment::sweep_disk)
            .collect()
    }

    /// New instance with the given labels and model, recording where it came from.
    fn derive(
        &self,
        transform: &str,
        model: AnchorModel,
        labels: Vec<RotatingSegment>,
    ) -> Result<Self> {
        let mut metadata = self.metadata.clone();
        metadata.insert("derived_from".into(), self.id.clone());
        let chain = match metadata.get("transform") {
            Some(prev) => format!("{prev},{transform}"),
            None => transform.to_string(),
        };
        metadata.insert("transform".into(), chain);
        Instance::with_metadata(self.id.clone(), model, labels, metadata)
    }

    fn expect_model(&self, expected: AnchorModel) -> Result<()> {
        if self.model != expected {
            return Err(Error::WrongModel {
                expected: expected.to_string(),
                found: self.model,
            });
        }
        Ok(())
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                n: self.len(),
            });
        }
        Ok(())
    }
}

/// A selection of labels, with the anchor offsets picked for models that
/// leave the anchor open.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Labeling {
    pub selected: BTreeSet<usize>,
    pub anchor_choice: BTreeMap<usize, f64>,
}

impl Labeling {
    pub fn new(selected: impl IntoIterator<Item = usize>) -> Self {
        Labeling {
            selected: selected.into_iter().collect(),
            anchor_choice: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }
}

/// Result of [`validate_labeling`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validation {
    Proper,
    /// Lexicographically smallest conflicting pair.
    Violated(usize, usize),
}

impl Validation {
    pub fn is_proper(self) -> bool {
        self == Validation::Proper
    }
}

/// Undirected graph with an edge for every conflicting pair of labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictGraph {
    n: usize,
    adjacency: Vec<Vec<usize>>,
}

impl ConflictGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut sets = vec![BTreeSet::new(); n];
        for (i, j) in edges {
            for v in [i, j] {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, n });
                }
            }
            if i != j {
                sets[i].insert(j);
                sets[j].insert(i);
            }
        }
        Ok(ConflictGraph {
            n,
            adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Neighbourhood of `v` as a bit mask; requires `n <= 64`.
    pub fn neighbor_mask(&self, v: usize) -> u64 {
        assert!(self.n <= 64, "bit masks need at most 64 vertices");
        self.adjacency[v].iter().fold(0u64, |m, &u| m | (1u64 << u))
    }

    pub fn is_independent(&self, set: &BTreeSet<usize>) -> bool {
        set.iter()
            .all(|&i| self.adjacency[i].iter().all(|j| !set.contains(j)))
    }
}

/// Moves every anchor of a 2P instance to the bottom end point.
pub fn normalize_2p(instance: &Instance) -> Result<Instance> {
    instance.expect_model(AnchorModel::TwoP)?;
    let labels = instance
        .labels()
        .iter()
        .map(|l| RotatingSegment::bottom_anchored(l.anchor, l.length))
        .collect::<Result<Vec<_>>>()?;
    instance.derive("normalize_2p", AnchorModel::OneP, labels)
}

/// Anchors every label of a sliding instance at its midpoint. The result is
/// a fixed-position instance.
pub fn normalize_sliding(instance: &Instance) -> Result<Instance> {
    instance.expect_model(AnchorModel::Sliding)?;
    let labels = instance
        .labels()
        .iter()
        .map(|l| RotatingSegment::vertical(l.anchor, l.length, l.length / 2.0))
        .collect::<Result<Vec<_>>>()?;
    instance.derive("normalize_sliding", AnchorModel::FixedPosition, labels)
}

/// Brings any instance to a model the solvers handle directly (1P or FP).
pub fn normalize(instance: &Instance) -> Result<Instance> {
    match instance.model() {
        AnchorModel::OneP | AnchorModel::FixedPosition => Ok(instance.clone()),
        AnchorModel::TwoP => normalize_2p(instance),
        AnchorModel::Sliding => normalize_sliding(instance),
    }
}

/// Unit disks become bottom-anchored labels of length 2 at the disk centres.
pub fn reduce_gmis_to_mris(disk_centres: &[Point]) -> Result<Instance> {
    let labels = disk_centres
        .iter()
        .map(|&c| RotatingSegment::bottom_anchored(c, 2.0))
        .collect::<Result<Vec<_>>>()?;
    let mut metadata = BTreeMap::new();
    metadata.insert("transform".into(), "reduce_gmis_to_mris".into());
    Instance::with_metadata("gmis-reduction", AnchorModel::OneP, labels, metadata)
}

/// Conflict test between two labels of a normalized (1P or FP) instance.
pub fn labels_conflict(instance: &Instance, i: usize, j: usize, fp_tolerance: f64) -> Result<bool> {
    let (a, b) = (&instance.labels()[i], &instance.labels()[j]);
    match instance.model() {
        AnchorModel::OneP => conflicts_parallel(a, b),
        AnchorModel::FixedPosition => conflicts_fp(a, b, fp_tolerance),
        other => Err(Error::WrongModel {
            expected: "normalized (1p or fp)".into(),
            found: other,
        }),
    }
}

/// Evaluates every pair of a normalized instance.
pub fn build_conflict_graph(instance: &Instance, fp_tolerance: f64) -> Result<ConflictGraph> {
    if instance.model().has_anchor_freedom() {
        return Err(Error::WrongModel {
            expected: "normalized (1p or fp)".into(),
            found: instance.model(),
        });
    }
    let n = instance.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if labels_conflict(instance, i, j, fp_tolerance)? {
                edges.push((i, j));
            }
        }
    }
    ConflictGraph::from_edges(n, edges)
}

/// Checks that no two selected labels meet during rotation.
///
/// For 2P and sliding instances the anchors come from
/// `labeling.anchor_choice`. Out-of-range indices are an error, not a
/// validation failure.
pub fn validate_labeling_with(
    instance: &Instance,
    labeling: &Labeling,
    fp_tolerance: f64,
) -> Result<Validation> {
    let model = instance.model();
    let mut placed = Vec::with_capacity(labeling.len());
    for &i in &labeling.selected {
        instance.check_index(i)?;
        let label = instance.labels()[i];
        let offset = if model.has_anchor_freedom() {
            let offset = *labeling
                .anchor_choice
                .get(&i)
                .ok_or(Error::MissingAnchorChoice(i))?;
            if !model.admits_offset(label.length, offset) {
                return Err(Error::IllegalAnchorChoice {
                    index: i,
                    offset,
                    model,
                });
            }
            offset
        } else {
            label.anchor_offset
        };
        placed.push((
            i,
            RotatingSegment::new(label.anchor, label.length, offset, label.orientation)?,
        ));
    }
    for (x, (i, a)) in placed.iter().enumerate() {
        for (j, b) in &placed[x + 1..] {
            let conflict = match model {
                AnchorModel::FixedPosition => conflicts_fp(a, b, fp_tolerance)?,
                _ => conflicts_vertical(
                    a.anchor,
                    a.down_reach(),
                    a.up_reach(),
                    b.anchor,
                    b.down_reach(),
                    b.up_reach(),
                )?,
            };
            if conflict {
                return Ok(Validation::Violated(*i, *j));
            }
        }
    }
    Ok(Validation::Proper)
}

pub fn validate_labeling(instance: &Instance, labeling: &Labeling) -> Result<Validation> {
    validate_labeling_with(instance, labeling, crate::geometry::DEFAULT_FP_TOLERANCE)
}

/// Anchor choices that go with a solution of the normalized form of `instance`.
pub fn anchor_choices_for(instance: &Instance, selected: &BTreeSet<usize>) -> BTreeMap<usize, f64> {
    match instance.model() {
        AnchorModel::TwoP => selected.iter().map(|&i| (i, 0.0)).collect(),
        AnchorModel::Sliding => selected
            .iter()
            .map(|&i| (i, instance.labels()[i].length / 2.0))
            .collect(),
        _ => BTreeMap::new(),
    }
}
