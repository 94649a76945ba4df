//! Detection, sensitivity scoring and policy enforcement for personal data
//! in free text and source code.

pub mod chunker;
pub mod detectors;
pub mod error;
pub mod eval;
pub mod gazetteer;
pub mod keywords;
pub mod model;
pub mod pipeline;
pub mod policy;
pub mod redactor;
pub mod resolver;
pub mod resources;
pub mod scorer;
pub mod triage;
pub mod validators;

pub use detectors::{Detector, DetectorConfig, PatternRegistry};
pub use error::{Error, Result};
pub use gazetteer::Gazetteer;
pub use model::*;
pub use pipeline::Guard;
pub use policy::PolicyTemplate;
