//! JSON and DOT formats for models and frames.
//!
//! ```json
//! {"n": 1, "points": [{"id": 0, "colour": "0"}, {"id": 1, "colour": "1"}],
//!  "covers": [[0, 1]]}
//! ```
//!
//! Colours are bitstrings with `p1` leftmost. Frames use the same layout
//! with `n` and the colours omitted. `covers` may contain any generating
//! pairs; the loader closes them transitively.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Colour, ColouredModel, KripkeError, Poset};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub points: Vec<PointEntry>,
    #[serde(default)]
    pub covers: Vec<[i64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PointEntry {
    pub id: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colour: Option<String>,
}

/// A model read from a file, with the file's point ids in index order.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub model: ColouredModel,
    pub ids: Vec<i64>,
}

impl LoadedModel {
    pub fn index_of(&self, id: i64) -> Option<usize> {
        self.ids.iter().position(|&i| i == id)
    }
}

/// A frame read from a file.
#[derive(Clone, Debug)]
pub struct LoadedFrame {
    pub poset: Poset,
    pub ids: Vec<i64>,
}

type CoverPairs = Vec<(usize, usize)>;

impl ModelFile {
    pub fn from_json(text: &str) -> Result<ModelFile, KripkeError> {
        serde_json::from_str(text).map_err(|e| KripkeError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serializes")
    }

    /// Point ids in file order and the cover pairs as positions.
    fn index(&self) -> Result<(Vec<i64>, CoverPairs), KripkeError> {
        let ids: Vec<i64> = self.points.iter().map(|p| p.id).collect();
        let mut position = HashMap::new();
        for (i, &id) in ids.iter().enumerate() {
            if position.insert(id, i).is_some() {
                return Err(KripkeError::DuplicateId(id));
            }
        }
        let lookup = |id: i64| position.get(&id).copied().ok_or(KripkeError::UnknownId(id));
        let pairs =
            self.covers.iter().map(|&[a, b]| Ok((lookup(a)?, lookup(b)?))).collect::<Result<Vec<_>, KripkeError>>()?;
        Ok((ids, pairs))
    }

    pub fn into_frame(&self) -> Result<LoadedFrame, KripkeError> {
        let (ids, pairs) = self.index()?;
        let poset = Poset::from_covers(ids.len(), &pairs)?;
        Ok(LoadedFrame { poset, ids })
    }

    pub fn into_model(&self) -> Result<LoadedModel, KripkeError> {
        let (ids, pairs) = self.index()?;
        let poset = Poset::from_covers(ids.len(), &pairs)?;
        let mut colours = Vec::with_capacity(ids.len());
        let mut width = self.n;
        for p in &self.points {
            let text = p.colour.as_deref().ok_or(KripkeError::MissingColour(p.id))?;
            match width {
                None => width = Some(text.len()),
                Some(n) if n != text.len() => {
                    return Err(KripkeError::BadColour(format!("point {}: expected {n} bits, found {:?}", p.id, text)))
                }
                Some(_) => {}
            }
            colours.push(Colour::parse_bitstring(text)?);
        }
        let model = ColouredModel::new(poset, width.unwrap_or(0), colours)?;
        Ok(LoadedModel { model, ids })
    }

    /// Serializes a model with the given point ids; covers are written as
    /// the transitive reduction.
    pub fn from_model(model: &ColouredModel, ids: &[i64]) -> ModelFile {
        let n = model.num_vars();
        ModelFile {
            n: Some(n),
            points: (0..model.len())
                .map(|x| PointEntry { id: ids[x], colour: Some(model.colour(x).to_bitstring(n)) })
                .collect(),
            covers: model.poset().cover_pairs().into_iter().map(|(a, b)| [ids[a], ids[b]]).collect(),
        }
    }

    pub fn from_frame(poset: &Poset, ids: &[i64]) -> ModelFile {
        ModelFile {
            n: None,
            points: (0..poset.len()).map(|x| PointEntry { id: ids[x], colour: None }).collect(),
            covers: poset.cover_pairs().into_iter().map(|(a, b)| [ids[a], ids[b]]).collect(),
        }
    }
}

pub fn load_model(text: &str) -> Result<LoadedModel, KripkeError> {
    ModelFile::from_json(text)?.into_model()
}

pub fn load_frame(text: &str) -> Result<LoadedFrame, KripkeError> {
    ModelFile::from_json(text)?.into_frame()
}

/// Optional layout hint for a DOT node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodePosition {
    pub x: f64,
    pub y: f64,
}

/// DOT rendering: one node per point labelled `id:colour`, cover edges
/// drawn upward.
pub fn to_dot(model: &ColouredModel, ids: &[i64], positions: Option<&[NodePosition]>) -> String {
    let n = model.num_vars();
    let mut out = String::from("digraph model {\n  rankdir=BT;\n  node [shape=circle];\n");
    for x in 0..model.len() {
        let label = format!("{}:{}", ids[x], model.colour(x).to_bitstring(n));
        match positions.map(|p| p[x]) {
            Some(pos) => {
                let _ = writeln!(out, "  p{} [label=\"{label}\", pos=\"{},{}!\"];", ids[x], pos.x, pos.y);
            }
            None => {
                let _ = writeln!(out, "  p{} [label=\"{label}\"];", ids[x]);
            }
        }
    }
    for (a, b) in model.poset().cover_pairs() {
        let _ = writeln!(out, "  p{} -> p{};", ids[a], ids[b]);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_and_closes_covers() {
        let text = r#"{"n": 1, "points": [{"id": 7, "colour": "0"}, {"id": 3, "colour": "0"},
            {"id": 9, "colour": "1"}], "covers": [[7, 3], [3, 9]]}"#;
        let loaded = load_model(text).unwrap();
        assert_eq!(loaded.ids, vec![7, 3, 9]);
        assert!(loaded.model.poset().leq(0, 2));
        assert_eq!(loaded.index_of(9), Some(2));
    }

    #[test]
    fn rejects_invalid_models() {
        let not_monotone = r#"{"points": [{"id": 0, "colour": "1"}, {"id": 1, "colour": "0"}],
            "covers": [[0, 1]]}"#;
        assert!(matches!(load_model(not_monotone), Err(KripkeError::ColouringNotMonotone { .. })));
        let cycle = r#"{"points": [{"id": 0, "colour": "1"}, {"id": 1, "colour": "1"}],
            "covers": [[0, 1], [1, 0]]}"#;
        assert!(matches!(load_model(cycle), Err(KripkeError::NotAPartialOrder(_))));
        let dangling = r#"{"points": [{"id": 0, "colour": "1"}], "covers": [[0, 5]]}"#;
        assert!(matches!(load_model(dangling), Err(KripkeError::UnknownId(5))));
        let ragged = r#"{"points": [{"id": 0, "colour": "1"}, {"id": 1, "colour": "10"}]}"#;
        assert!(matches!(load_model(ragged), Err(KripkeError::BadColour(_))));
        assert!(matches!(load_model("{"), Err(KripkeError::Json(_))));
    }

    #[test]
    fn frames_need_no_colours() {
        let frame = load_frame(r#"{"points": [{"id": 1}, {"id": 2}], "covers": [[1, 2]]}"#).unwrap();
        assert_eq!(frame.poset.root(), Some(0));
        assert!(matches!(load_model(r#"{"points": [{"id": 1}]}"#), Err(KripkeError::MissingColour(1))));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"n": 2, "points": [{"id": 0, "colour": "00"}, {"id": 1, "colour": "10"},
            {"id": 2, "colour": "11"}], "covers": [[0, 1], [1, 2], [0, 2]]}"#;
        let loaded = load_model(text).unwrap();
        let file = ModelFile::from_model(&loaded.model, &loaded.ids);
        assert_eq!(file.covers, vec![[0, 1], [1, 2]]);
        let again = load_model(&file.to_json()).unwrap();
        assert_eq!(again.model, loaded.model);
    }

    #[test]
    fn dot_edges_point_upward() {
        let loaded = load_model(
            r#"{"points": [{"id": 4, "colour": "0"}, {"id": 5, "colour": "1"}],
            "covers": [[4, 5]]}"#,
        )
        .unwrap();
        let dot = to_dot(&loaded.model, &loaded.ids, None);
        assert!(dot.contains("p4 [label=\"4:0\"]"));
        assert!(dot.contains("p4 -> p5;"));
        assert!(dot.contains("rankdir=BT"));
    }
}
