// SPDX-License-Identifier: Apache-2.0

//! JSON result documents. Every document is an object with a `kind` tag and
//! a `schema_version`; floats use the shortest representation that parses
//! back to the same value, and infinite dividends are written as `"inf"`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::svg::HeatmapSpec;
use crate::config::SimulationConfig;
use crate::engine::RunResult;
use crate::ensemble::{CellResult, EnsembleSummary};
use crate::error::{Error, Result};
use crate::glmodel::{ExponentFit, GLPolynomial, Landscape, SampleMode, StationarySet};

pub const JSON_SCHEMA_VERSION: u32 = 1;

/// Landscape fit of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeCell {
    pub config: SimulationConfig,
    pub temperature: f64,
    pub samples: usize,
    pub landscape: Option<Landscape>,
    pub fit: Option<GLPolynomial>,
    pub stationary: Option<StationarySet>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JsonDocument {
    Run {
        schema_version: u32,
        config: SimulationConfig,
        temperature: f64,
        run: RunResult,
    },
    Ensemble {
        schema_version: u32,
        summary: EnsembleSummary,
    },
    Sweep {
        schema_version: u32,
        heatmap: HeatmapSpec,
        cells: Vec<CellResult>,
    },
    GlFit {
        schema_version: u32,
        bins: usize,
        sample_mode: SampleMode,
        cells: Vec<LandscapeCell>,
        /// Fit of `mean |o|` against temperature across cells.
        exponent: Option<ExponentFit>,
        exponent_error: Option<String>,
    },
}

/// Pretty-printed, followed by a single `\n`.
pub fn write_json<W: Write>(doc: &JsonDocument, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, doc).map_err(|e| Error::io("writing JSON", e))?;
    out.write_all(b"\n").map_err(|e| Error::io("writing JSON", e))
}

pub fn read_json<R: Read>(input: R) -> Result<JsonDocument> {
    let doc: JsonDocument = serde_json::from_reader(input).map_err(|e| Error::Format(e.to_string()))?;
    let version = match &doc {
        JsonDocument::Run { schema_version, .. }
        | JsonDocument::Ensemble { schema_version, .. }
        | JsonDocument::Sweep { schema_version, .. }
        | JsonDocument::GlFit { schema_version, .. } => *schema_version,
    };
    if version != JSON_SCHEMA_VERSION {
        return Err(Error::Format(format!("unsupported schema version {version}")));
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TrajectoryDetail;
    use crate::engine::run_realization;
    use crate::ensemble::{run_ensemble_with, sweep_with, Executor, SweepGrid};

    fn roundtrip(doc: &JsonDocument) {
        let mut first = Vec::new();
        write_json(doc, &mut first).unwrap();
        let back = read_json(first.as_slice()).unwrap();
        assert_eq!(&back, doc);
        let mut second = Vec::new();
        write_json(&back, &mut second).unwrap();
        assert_eq!(first, second);
        assert!(first.ends_with(b"}\n"));
    }

    #[test]
    fn documents_roundtrip() {
        let c = SimulationConfig::new(11, 3, 2, 3.0, f64::INFINITY, 100.0)
            .with_max_steps(50)
            .with_detail(TrajectoryDetail::Full);
        roundtrip(&JsonDocument::Run {
            schema_version: JSON_SCHEMA_VERSION,
            config: c.clone(),
            temperature: 9.0 / 22.0,
            run: run_realization(&c, 4).unwrap(),
        });
        let ex = Executor::new(1).unwrap();
        roundtrip(&JsonDocument::Ensemble {
            schema_version: JSON_SCHEMA_VERSION,
            summary: run_ensemble_with(&c, 5, 2, &ex).unwrap(),
        });
        let mut grid = SweepGrid::new(vec![5, 7], vec![2], vec![2], vec![3.0, -1.0], vec![50.0], 100.0, 1)
            .with_realizations(3);
        grid.max_steps = Some(40);
        roundtrip(&JsonDocument::Sweep {
            schema_version: JSON_SCHEMA_VERSION,
            heatmap: HeatmapSpec::default(),
            cells: sweep_with(&grid, &ex).unwrap(),
        });
    }

    #[test]
    fn rejects_other_versions() {
        let text = r#"{"kind":"ensemble","schema_version":9,"summary":null}"#;
        assert!(read_json(text.as_bytes()).is_err());
    }
}
