use std::path::Path;

use hpspline::{HpSplineModel, KnotGrid};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

pub const FORMAT_VERSION: u32 = 1;
/// Basis normalization `B^h(x) = B¹_{αh}(x / h)`.
pub const NORMALIZATION: &str = "dilation-eq6";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub normalization: String,
    pub alpha: f64,
    pub lambda: f64,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub coefficients: Vec<f64>,
}

impl ModelFile {
    pub fn from_model(model: &HpSplineModel) -> Self {
        let grid = model.grid();
        Self {
            format_version: FORMAT_VERSION,
            normalization: NORMALIZATION.to_string(),
            alpha: model.alpha(),
            lambda: model.lambda(),
            n: grid.n(),
            a: grid.a(),
            b: grid.b(),
            coefficients: model.coefficients().to_vec(),
        }
    }

    pub fn to_model(&self) -> CliResult<HpSplineModel> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::Usage(format!(
                "unsupported model format version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.normalization != NORMALIZATION {
            return Err(CliError::Usage(format!(
                "unsupported basis normalization {:?}",
                self.normalization
            )));
        }
        let grid = KnotGrid::new(self.a, self.b, self.n)?;
        Ok(HpSplineModel::from_parts(grid, self.alpha, self.lambda, self.coefficients.clone())?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model file serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        write_atomic(path, self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line: e.line() as u64,
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            normalization: NORMALIZATION.into(),
            alpha: 0.1 + 0.2,
            lambda: 1.0 / 3.0,
            n: 4,
            a: -1e-300,
            b: std::f64::consts::PI,
            coefficients: vec![1.0 / 7.0, -2.5e-17, 6.02214076e23, f64::MIN_POSITIVE, 5e-324, 0.0],
        };
        let back: ModelFile = serde_json::from_str(&file.to_json()).unwrap();
        assert_eq!(back, file);
        for (x, y) in back.coefficients.iter().zip(&file.coefficients) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn rejects_other_versions() {
        let mut file = ModelFile {
            format_version: 2,
            normalization: NORMALIZATION.into(),
            alpha: 1.0,
            lambda: 1.0,
            n: 2,
            a: 0.0,
            b: 1.0,
            coefficients: vec![0.0; 4],
        };
        assert!(file.to_model().is_err());
        file.format_version = FORMAT_VERSION;
        assert!(file.to_model().is_ok());
        file.normalization = "other".into();
        assert!(file.to_model().is_err());
    }
}
