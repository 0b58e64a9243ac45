//! One entry point over the three solvers.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::exact::{exact_mris_with, ExactConfig, DEFAULT_EXACT_CAP};
use crate::geometry::DEFAULT_FP_TOLERANCE;
use crate::greedy::greedy_baseline_with;
use crate::model::{anchor_choices_for, normalize, AnchorModel, Instance, Labeling};
use crate::ptas::{ptas_mris_report, CompatMode, PtasConfig, ShiftStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Exact,
    Greedy,
    Ptas,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::Greedy => "greedy",
            Algorithm::Ptas => "ptas",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Algorithm::Exact),
            "greedy" => Ok(Algorithm::Greedy),
            "ptas" => Ok(Algorithm::Ptas),
            other => Err(Error::Format(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub epsilon: f64,
    pub fp_tolerance: f64,
    pub exact_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            epsilon: 0.5,
            fp_tolerance: DEFAULT_FP_TOLERANCE,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub labeling: Labeling,
    pub elapsed: Duration,
    /// Set for the approximation scheme only.
    pub k: Option<usize>,
    pub shifts: Vec<ShiftStats>,
}

/// Normalizes the instance, runs `algorithm` and attaches anchor choices.
pub fn solve(
    instance: &Instance,
    algorithm: Algorithm,
    options: &SolveOptions,
) -> Result<Solution> {
    let start = Instant::now();
    let (labeling, k, shifts) = match algorithm {
        Algorithm::Exact => {
            let config = ExactConfig {
                cap: options.exact_cap,
                fp_tolerance: options.fp_tolerance,
            };
            (exact_mris_with(instance, &config)?, None, Vec::new())
        }
        Algorithm::Greedy => (
            greedy_baseline_with(instance, options.fp_tolerance)?,
            None,
            Vec::new(),
        ),
        Algorithm::Ptas => {
            let normalized = normalize(instance)?;
            let mut config = PtasConfig::new(options.epsilon)?;
            config.fp_tolerance = options.fp_tolerance;
            config.mode = match normalized.model() {
                AnchorModel::OneP => CompatMode::CentreDisjoint,
                _ => CompatMode::FullConflict,
            };
            let report = ptas_mris_report(&normalized, &config)?;
            let selected = report.labeling.selected;
            let labeling = Labeling {
                anchor_choice: anchor_choices_for(instance, &selected),
                selected,
            };
            (labeling, Some(report.k), report.shifts)
        }
    };
    Ok(Solution {
        labeling,
        elapsed: start.elapsed(),
        k,
        shifts,
    })
}
