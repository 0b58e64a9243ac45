//! Smallest-first greedy baseline.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::model::{anchor_choices_for, labels_conflict, normalize, Instance, Labeling};

/// Scans labels by ascending sweep radius (ties by index) and keeps each one
/// that conflicts with nothing kept so far.
pub fn greedy_baseline_with(instance: &Instance, fp_tolerance: f64) -> Result<Labeling> {
    let normalized = normalize(instance)?;
    let labels = normalized.labels();
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| {
        labels[a]
            .max_reach()
            .total_cmp(&labels[b].max_reach())
            .then(a.cmp(&b))
    });

    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let mut free = true;
        for &j in &kept {
            if labels_conflict(&normalized, i, j, fp_tolerance)? {
                free = false;
                break;
            }
        }
        if free {
            kept.push(i);
        }
    }
    let selected: BTreeSet<usize> = kept.into_iter().collect();
    Ok(Labeling {
        anchor_choice: anchor_choices_for(instance, &selected),
        selected,
    })
}

pub fn greedy_baseline(instance: &Instance) -> Result<Labeling> {
    greedy_baseline_with(instance, crate::geometry::DEFAULT_FP_TOLERANCE)
}
