//! Seeded random instances.
//!
//! The generator is ChaCha8 (`rand_chacha`) seeded with the 64-bit seed, so
//! a seed names the same instance on every platform.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Point, RotatingSegment};
use crate::model::{AnchorModel, Instance};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LengthDist {
    Uniform(f64, f64),
    Fixed(f64),
}

impl FromStr for LengthDist {
    type Err = Error;

    /// `uniform:a,b` with `0 < a <= b`, or `fixed:v` with `v > 0`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Format(format!(
                "invalid length distribution {s:?}; use uniform:a,b or fixed:v"
            ))
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let dist = match kind {
            "fixed" => LengthDist::Fixed(num(args)?),
            "uniform" => {
                let (a, b) = args.split_once(',').ok_or_else(bad)?;
                LengthDist::Uniform(num(a)?, num(b)?)
            }
            _ => return Err(bad()),
        };
        let ok = match dist {
            LengthDist::Fixed(v) => v > 0.0 && v.is_finite(),
            LengthDist::Uniform(a, b) => a > 0.0 && a <= b && b.is_finite(),
        };
        if ok {
            Ok(dist)
        } else {
            Err(bad())
        }
    }
}

impl fmt::Display for LengthDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthDist::Uniform(a, b) => write!(f, "uniform:{a},{b}"),
            LengthDist::Fixed(v) => write!(f, "fixed:{v}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub model: AnchorModel,
    pub width: f64,
    pub height: f64,
    pub lengths: LengthDist,
    pub seed: u64,
}

/// Anchors uniform in the box. FP labels also get a uniform anchor offset
/// and a whole-degree orientation; all other labels are bottom-anchored.
pub fn generate(spec: &GenSpec) -> Result<Instance> {
    for (name, value) in [("box width", spec.width), ("box height", spec.height)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositive { name, value });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut labels = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let anchor = Point::new(
            rng.gen_range(0.0..=spec.width),
            rng.gen_range(0.0..=spec.height),
        );
        let length = match spec.lengths {
            LengthDist::Fixed(v) => v,
            LengthDist::Uniform(a, b) => rng.gen_range(a..=b),
        };
        let label = match spec.model {
            AnchorModel::FixedPosition => {
                let offset = rng.gen_range(0.0..=length);
                let degrees = rng.gen_range(0..360u32) as f64;
                RotatingSegment::new(anchor, length, offset, degrees.to_radians())?
            }
            _ => RotatingSegment::bottom_anchored(anchor, length)?,
        };
        labels.push(label);
    }
    let metadata = BTreeMap::from([
        ("generator".to_string(), "chacha8".to_string()),
        ("seed".to_string(), spec.seed.to_string()),
        ("box".to_string(), format!("{} {}", spec.width, spec.height)),
        ("length_dist".to_string(), spec.lengths.to_string()),
    ]);
    let id = format!("gen-{}-n{}-s{}", spec.model, spec.n, spec.seed);
    Instance::with_metadata(id, spec.model, labels, metadata)
}
