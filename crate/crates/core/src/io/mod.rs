// SPDX-License-Identifier: Apache-2.0

//! Config documents, CSV and JSON results, and SVG plots.

mod config;
mod json;
mod rows;
mod svg;
mod tables;

pub use config::{parse_config, Axis, ConfigDocument, CONFIG_VERSION, OPTIONAL_KEYS, REQUIRED_KEYS};
pub use json::{read_json, write_json, JsonDocument, LandscapeCell, JSON_SCHEMA_VERSION};
pub use rows::{format_float, read_csv, write_csv, RunRow, COLUMNS, CSV_SCHEMA_VERSION};
pub use tables::{write_summary_csv, write_trajectory_csv, SUMMARY_COLUMNS, TRAJECTORY_COLUMNS};
pub use svg::{
    cell_color, emit_heatmap, emit_landscape, emit_trajectory, hex, HeatmapPanel, HeatmapSpec, BLUE,
    MAX_TRAJECTORY_POINTS, RED, WHITE,
};


pub(crate) mod float_repr {
    //! `f64` fields that may be infinite, written as JSON strings `"inf"`.
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else if *x < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("NaN")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    impl Repr {
        fn value<E: serde::de::Error>(self) -> Result<f64, E> {
            match self {
                Repr::Num(x) => Ok(x),
                Repr::Str(s) => s.parse().map_err(E::custom),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Repr::deserialize(d)?.value()
    }

    pub(crate) fn deserialize_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?.into_iter().map(Repr::value).collect()
    }
}

pub(crate) mod float_vec_repr {
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    struct Item(f64);

    impl serde::Serialize for Item {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            super::float_repr::serialize(&self.0, s)
        }
    }

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for &x in xs {
            seq.serialize_element(&Item(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        super::float_repr::deserialize_vec(d)
    }
}
