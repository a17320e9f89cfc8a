use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GeometryError, MultiPatch, Patch, Side};
use crate::spline::{KnotVector, SplineError, TensorBasis};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiPatchFile {
    dim: usize,
    patches: Vec<PatchFile>,
    #[serde(default)]
    dirichlet: Vec<(usize, Side)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatchFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<usize>,
    degrees: Vec<usize>,
    knots: Vec<Vec<f64>>,
    control_points: Vec<Vec<f64>>,
}

/// JSON text of a multipatch; floats use the shortest exact round-trip form.
pub fn write_multipatch(mp: &MultiPatch) -> String {
    let file = MultiPatchFile {
        dim: mp.dim(),
        patches: mp
            .patches()
            .iter()
            .map(|p| PatchFile {
                id: Some(p.id()),
                degrees: p.basis().degrees(),
                knots: p.basis().knot_vectors().iter().map(|kv| kv.knots().to_vec()).collect(),
                control_points: p.control_points().map(<[f64]>::to_vec).collect(),
            })
            .collect(),
        dirichlet: mp.dirichlet().iter().copied().collect(),
    };
    serde_json::to_string_pretty(&file).expect("multipatch serializes")
}

pub fn read_multipatch(text: &str) -> Result<MultiPatch, GeometryError> {
    let file: MultiPatchFile =
        serde_json::from_str(text).map_err(|e| GeometryError::Parse(e.to_string()))?;
    if !(1..=3).contains(&file.dim) {
        return Err(GeometryError::Parse(format!("field `dim`: unsupported value {}", file.dim)));
    }
    let mut patches = Vec::with_capacity(file.patches.len());
    for (k, pf) in file.patches.into_iter().enumerate() {
        let invalid = |reason: String| GeometryError::InvalidPatch { patch: k, reason };
        if pf.degrees.len() != file.dim || pf.knots.len() != file.dim {
            return Err(invalid(format!(
                "fields `degrees` and `knots` need {} entries",
                file.dim
            )));
        }
        let mut kvs = Vec::with_capacity(file.dim);
        for (dir, (&p, knots)) in pf.degrees.iter().zip(pf.knots).enumerate() {
            let kv = KnotVector::new(p, knots).map_err(|e| match e {
                SplineError::InvalidKnots { index, reason } => {
                    invalid(format!("direction {dir}: knot index {index}: {reason}"))
                }
                other => invalid(format!("direction {dir}: {other}")),
            })?;
            kvs.push(kv);
        }
        let basis = TensorBasis::new(kvs)?;
        patches.push(Patch::new(pf.id.unwrap_or(k), basis, pf.control_points)?);
    }
    MultiPatch::new(patches, file.dirichlet)
}

pub fn save_multipatch(mp: &MultiPatch, path: impl AsRef<Path>) -> Result<(), GeometryError> {
    fs::write(path, write_multipatch(mp)).map_err(|e| GeometryError::Io(e.to_string()))
}

pub fn load_multipatch(path: impl AsRef<Path>) -> Result<MultiPatch, GeometryError> {
    let text = fs::read_to_string(path).map_err(|e| GeometryError::Io(e.to_string()))?;
    read_multipatch(&text)
}
