//! JSON file formats read and written by the command-line tool.
//!
//! Complex matrices are stored as separate row-major `re` / `im` arrays;
//! `im` may be omitted for real matrices.

use std::fs;
use std::io;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use choquet_core::bratteli::BratteliDiagram;
use choquet_core::discrete_choquet::Capacity;
use choquet_core::linalg::HermitianMatrix;
use choquet_core::multimatrix::{Element, Multiplicity, RankVector};
use choquet_core::scale::{K0State, LevelScale, ScaleFunction, Transform};
use choquet_core::trace_engine::TraceResult;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockFile {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementFile {
    #[serde(default = "first_level")]
    pub level: usize,
    pub blocks: Vec<BlockFile>,
}

fn first_level() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramFile {
    pub initial_sizes: Vec<usize>,
    #[serde(default)]
    pub multiplicities: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub weights: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub rank: Vec<usize>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScaleFile {
    Composite { transform: Transform, state: StateFile },
    Table { level: usize, entries: Vec<TableEntry> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityFile {
    pub n: usize,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridFile {
    Plain(Vec<f64>),
    Wrapped { grid: Vec<f64> },
}

impl GridFile {
    pub fn points(self) -> Vec<f64> {
        match self {
            GridFile::Plain(g) | GridFile::Wrapped { grid: g } => g,
        }
    }
}

/// Reads and parses a JSON file; any failure is a schema error.
pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::schema(format!("cannot read {what} file {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::schema(format!("invalid {what} file {}: {e}", path.display())))
}

/// Converts structural failures while building values from a file into
/// schema errors that name the file.
fn in_file<T>(what: &str, r: choquet_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::schema(format!("invalid {what}: {e}")))
}

impl ElementFile {
    pub fn to_element(&self) -> Result<Element, CliError> {
        if self.level == 0 {
            return Err(CliError::schema("invalid element: field `level` must be at least 1"));
        }
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(s, b)| in_file(&format!("element: blocks[{s}]"), HermitianMatrix::from_parts(&b.re, b.im.as_deref())))
            .collect::<Result<Vec<_>, _>>()?;
        in_file("element: field `blocks`", Element::new(blocks))
    }

    pub fn from_element(a: &Element, level: usize) -> Self {
        let blocks = a
            .blocks()
            .iter()
            .map(|b| {
                let im = b.as_matrix().imag_parts();
                let has_imag = im.iter().flatten().any(|&x| x != 0.0);
                BlockFile { re: b.as_matrix().real_parts(), im: has_imag.then_some(im) }
            })
            .collect();
        ElementFile { level, blocks }
    }
}

impl DiagramFile {
    pub fn to_diagram(&self) -> Result<BratteliDiagram, CliError> {
        let mults = self.multiplicities.iter().cloned().map(Multiplicity).collect();
        in_file("diagram", BratteliDiagram::new(self.initial_sizes.clone(), mults))
    }

    pub fn from_diagram(d: &BratteliDiagram) -> Self {
        DiagramFile { initial_sizes: d.initial_sizes().to_vec(), multiplicities: d.multiplicities().iter().map(|m| m.0.clone()).collect() }
    }
}

impl ScaleFile {
    pub fn to_scale(&self) -> Result<ScaleFunction, CliError> {
        match self {
            ScaleFile::Composite { transform, state } => {
                let state = in_file("scale: field `state`", K0State::new(state.weights.clone()))?;
                in_file("scale: field `transform`", ScaleFunction::composite(state, transform.clone()))
            }
            ScaleFile::Table { level, entries } => {
                if *level == 0 {
                    return Err(CliError::schema("invalid scale: field `level` must be at least 1"));
                }
                let pairs: Vec<(RankVector, f64)> = entries.iter().map(|e| (RankVector(e.rank.clone()), e.value)).collect();
                let table = in_file("scale: field `entries`", LevelScale::from_entries(&pairs))?;
                Ok(ScaleFunction::table(*level, table))
            }
        }
    }

    pub fn from_scale(alpha: &ScaleFunction) -> Self {
        match alpha {
            ScaleFunction::Composite(c) => {
                ScaleFile::Composite { transform: c.transform.clone(), state: StateFile { weights: c.state.all_weights().to_vec() } }
            }
            ScaleFunction::Table { level, table } => ScaleFile::Table {
                level: *level,
                entries: table.entries().map(|(r, value)| TableEntry { rank: r.0, value }).collect(),
            },
        }
    }
}

impl CapacityFile {
    pub fn to_capacity(&self) -> Result<Capacity, CliError> {
        in_file("capacity", Capacity::from_table(self.n, self.values.clone()))
    }
}

/// `{"value", "level", "spectrum", "ranks"}`.
#[derive(Clone, Debug, Serialize)]
pub struct TraceJson {
    pub value: f64,
    pub level: usize,
    pub spectrum: Vec<f64>,
    pub ranks: Vec<Vec<usize>>,
}

impl From<&TraceResult> for TraceJson {
    fn from(r: &TraceResult) -> Self {
        TraceJson {
            value: r.value,
            level: r.level,
            spectrum: r.spectrum_used.distinct_values.clone(),
            ranks: r.spectrum_used.rank_vectors.iter().map(|r| r.0.clone()).collect(),
        }
    }
}

/// Writes every float with 17 significant digits.
struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(out).expect("JSON output is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_significant_digits() {
        let s = to_json_string(&serde_json::json!({"x": 2.0f64.sqrt() + 2.0, "n": 3, "z": 0.0}));
        assert_eq!(s, r#"{"n":3,"x":3.4142135623730949e0,"z":0.0000000000000000e0}"#);
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 2.0f64.sqrt() + 2.0);
        assert_eq!(to_json_string(&f64::INFINITY), "null");
    }

    #[test]
    fn element_file_defaults_and_errors() {
        let f: ElementFile = serde_json::from_str(r#"{"blocks":[{"re":[[2,0],[0,1]]}]}"#).unwrap();
        assert_eq!(f.level, 1);
        assert_eq!(f.to_element().unwrap(), Element::diagonal(&[vec![2.0, 1.0]]).unwrap());
        let f: ElementFile = serde_json::from_str(r#"{"blocks":[{"re":[[1,2],[0,1]]}]}"#).unwrap();
        let err = f.to_element().unwrap_err();
        assert_eq!(err.code, 2);
        assert!(err.message.contains("blocks[0]"), "{}", err.message);
        assert!(serde_json::from_str::<ElementFile>(r#"{"blocks":[], "extra": 1}"#).is_err());
    }

    #[test]
    fn scale_file_forms() {
        let c: ScaleFile = serde_json::from_str(
            r#"{"kind":"composite","transform":{"family":"power","lambda":0.5},"state":{"weights":[[0.5]]}}"#,
        )
        .unwrap();
        assert!(c.to_scale().unwrap().is_composite());
        let t: ScaleFile = serde_json::from_str(
            r#"{"kind":"table","level":1,"entries":[{"rank":[0],"value":0},{"rank":[1],"value":1},{"rank":[2],"value":1.5}]}"#,
        )
        .unwrap();
        let alpha = t.to_scale().unwrap();
        assert_eq!(ScaleFile::from_scale(&alpha), t);
        let bad: ScaleFile = serde_json::from_str(r#"{"kind":"composite","transform":{"family":"power","lambda":2},"state":{"weights":[[1]]}}"#).unwrap();
        assert_eq!(bad.to_scale().unwrap_err().code, 2);
    }

    #[test]
    fn grid_file_forms() {
        let a: GridFile = serde_json::from_str("[3, 2, 1]").unwrap();
        let b: GridFile = serde_json::from_str(r#"{"grid":[3, 2, 1]}"#).unwrap();
        assert_eq!(a.points(), b.points());
    }
}
