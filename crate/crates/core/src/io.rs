//! JSON file formats. Complex numbers are always `[re, im]`; matrices are
//! arrays of rows.
//!
//! ```text
//! channel: {"name": "...", "dim": N, "kraus": [M, ...]}
//! state:   {"rho": M}  or a bare M
//! walk:    {"graph": {"cycle": N} | {"nodes": V, "degree": d, "ports": [[w, b], ...]},
//!           "coin": M, "decoherence_p": p,
//!           "initial": {"coin": a, "node": v} | {"amplitudes": [[re, im], ...]}}
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{DensityMatrix, KrausSet};
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, ComplexVector};
use crate::walks::{Graph, WalkSpec, WalkState};

pub type JsonComplex = [f64; 2];
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.rows()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Format("matrix rows have different lengths".into()));
    }
    let data = rows.iter().flatten().map(|&[re, im]| c64(re, im)).collect();
    ComplexMatrix::from_vec(r, c, data)
}

pub fn vector_to_json(v: &ComplexVector) -> Vec<JsonComplex> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_json(v: &[JsonComplex]) -> ComplexVector {
    ComplexVector::new(v.iter().map(|&[re, im]| c64(re, im)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub name: String,
    pub dim: usize,
    pub kraus: Vec<JsonMatrix>,
}

impl ChannelFile {
    pub fn from_kraus(k: &KrausSet) -> Self {
        Self {
            name: k.label().to_string(),
            dim: k.dim(),
            kraus: k.operators().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn to_kraus(&self) -> Result<KrausSet> {
        let ops = self.kraus.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        let k = KrausSet::new(self.name.clone(), ops)?;
        if k.dim() != self.dim {
            return Err(Error::Format(format!(
                "declared dim {} but Kraus operators are {}x{}",
                self.dim,
                k.dim(),
                k.dim()
            )));
        }
        Ok(k)
    }
}

pub fn channel_to_json(k: &KrausSet) -> String {
    serde_json::to_string_pretty(&ChannelFile::from_kraus(k)).expect("plain data serializes")
}

pub fn channel_from_json(text: &str) -> Result<KrausSet> {
    serde_json::from_str::<ChannelFile>(text)?.to_kraus()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateFile {
    Wrapped {
        rho: JsonMatrix,
    },
    Bare(JsonMatrix),
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::json!({ "rho": matrix_to_json(rho.matrix()) }).to_string()
}

pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let m = match serde_json::from_str::<StateFile>(text) {
        Ok(StateFile::Wrapped { rho }) | Ok(StateFile::Bare(rho)) => rho,
        Err(e) => return Err(Error::Format(format!("expected {{\"rho\": matrix}} or a matrix: {e}"))),
    };
    DensityMatrix::new(matrix_from_json(&m)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphFile {
    Cycle {
        cycle: usize,
    },
    Regular {
        nodes: usize,
        degree: usize,
        ports: Vec<[usize; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialFile {
    Localized { coin: usize, node: usize },
    Amplitudes { amplitudes: Vec<JsonComplex> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkFile {
    pub graph: GraphFile,
    pub coin: JsonMatrix,
    #[serde(default)]
    pub decoherence_p: f64,
    pub initial: InitialFile,
}

impl WalkFile {
    pub fn to_walk(&self) -> Result<(WalkSpec, WalkState)> {
        let graph = match &self.graph {
            GraphFile::Cycle { cycle } => Graph::Cycle(*cycle),
            GraphFile::Regular { nodes, degree, ports } => Graph::Regular {
                nodes: *nodes,
                degree: *degree,
                ports: ports.iter().map(|&[w, b]| (w, b)).collect(),
            },
        };
        let spec = WalkSpec::new(graph, matrix_from_json(&self.coin)?, self.decoherence_p)?;
        let state = match &self.initial {
            InitialFile::Localized { coin, node } => WalkState::localized(*coin, *node, spec.degree(), spec.nodes())?,
            InitialFile::Amplitudes { amplitudes } => WalkState::for_spec(&spec, vector_from_json(amplitudes))?,
        };
        Ok((spec, state))
    }
}

pub fn walk_from_json(text: &str) -> Result<(WalkSpec, WalkState)> {
    serde_json::from_str::<WalkFile>(text)?.to_walk()
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))
}

pub fn read_channel(path: &Path) -> Result<KrausSet> {
    channel_from_json(&read_to_string(path)?)
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    state_from_json(&read_to_string(path)?)
}

pub fn read_walk(path: &Path) -> Result<(WalkSpec, WalkState)> {
    walk_from_json(&read_to_string(path)?)
}
