//! Instance JSON:
//!
//! ```json
//! { "kind": "coords", "dim": 2, "norm": "l2", "points": [[0,0],[1,2]], "radii": [0.5, 0.5] }
//! { "kind": "matrix", "dist": [[0,1],[1,0]], "radii": [0.4, 0.4] }
//! ```
//!
//! `radii` is optional and, when present, gives one radius per point.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{MetricInstance, Norm, RadiusAssignment};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Repr {
    Coords {
        dim: usize,
        norm: Norm,
        points: Vec<Vec<f64>>,
    },
    Matrix {
        dist: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct InstanceFile {
    #[serde(flatten)]
    repr: Repr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radii: Option<Vec<f64>>,
}

/// A validated instance plus its optional per-point radii.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceDoc {
    pub instance: MetricInstance,
    pub radii: Option<RadiusAssignment>,
}

impl InstanceDoc {
    pub fn new(instance: MetricInstance, radii: Option<RadiusAssignment>) -> Self {
        InstanceDoc { instance, radii }
    }

    pub fn from_json(text: &str, tolerance: f64) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        let instance = match &file.repr {
            Repr::Coords { dim, norm, points } => MetricInstance::from_coords(*dim, *norm, points)?,
            Repr::Matrix { dist } => MetricInstance::from_matrix(dist, tolerance)?,
        };
        let radii = match file.radii {
            None => None,
            Some(rs) if rs.len() == instance.len() => Some(RadiusAssignment::dense(&rs)?),
            Some(rs) => {
                return Err(Error::InvalidInstance(format!(
                    "{} radii for {} points",
                    rs.len(),
                    instance.len()
                )))
            }
        };
        Ok(InstanceDoc { instance, radii })
    }

    pub fn to_json(&self) -> String {
        let repr = match &self.instance {
            MetricInstance::Coords { dim, norm, .. } => Repr::Coords {
                dim: *dim,
                norm: *norm,
                points: (0..self.instance.len())
                    .map(|i| self.instance.point(i).unwrap().to_vec())
                    .collect(),
            },
            MetricInstance::Matrix { .. } => Repr::Matrix {
                dist: self.instance.to_matrix(),
            },
        };
        let radii = self
            .radii
            .as_ref()
            .map(|r| r.iter().map(|(_, v)| v).collect());
        serde_json::to_string(&InstanceFile { repr, radii }).expect("instance serializes")
    }

    pub fn read(path: impl AsRef<Path>, tolerance: f64) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?, tolerance)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}
