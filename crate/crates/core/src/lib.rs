//! Maximum independent sets of rotating map labels.

pub mod bench;
pub mod error;
pub mod exact;
pub mod gen;
pub mod geometry;
pub mod greedy;
pub mod io;
pub mod model;
pub mod ptas;
pub mod quadtree;
pub mod render;
pub mod solve;

pub use error::{Error, Result};
pub use exact::{exact_mris, exact_mris_with, ExactConfig};
pub use geometry::{Point, RotatingSegment, SweepDisk};
pub use greedy::greedy_baseline;
pub use model::{validate_labeling, AnchorModel, Instance, Labeling, Validation};
pub use ptas::{ptas_mris, ptas_mris_fp, PtasConfig};
pub use solve::{solve, Algorithm, Solution, SolveOptions};
