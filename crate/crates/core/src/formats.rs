//! Structured-text (JSON) file formats for fans, collections, lattices, and
//! Galois actions, plus the content hashing that ties a collection or
//! action file to the fan file it was written against (guarding against
//! ray-order mismatches).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::descent::{DescentError, FieldLabel, GaloisAction};
use crate::divclass::TDivisor;
use crate::excol::{Collection, ExcolError, TCIObject};
use crate::fan::{fan_aut, Fan, FanError};
use crate::gmodule::{FiniteGroup, GModuleError};
use crate::zlattice::IntMatrix;

#[derive(Debug, Error)]
pub enum FormatsError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Collection(#[from] ExcolError),
    #[error(transparent)]
    Action(#[from] DescentError),
    #[error(transparent)]
    Group(#[from] GModuleError),
    #[error("collection was written for a different fan: expected hash {expected}, file says {found}")]
    FanHashMismatch { expected: String, found: String },
    #[error("object '{label}' has {got} coefficients but the fan has {expected} rays")]
    CoefficientCountMismatch { label: String, got: usize, expected: usize },
    #[error("unknown group name '{0}' (supported: C2, C2xC2, or an explicit table)")]
    UnknownGroup(String),
    #[error("missing image for generator '{0}' in the phi map")]
    MissingGenerator(String),
    #[error("the matrix given for generator '{0}' is not a fan automorphism")]
    NotAnAutomorphism(String),
}

/// Hex SHA-256 of a document's bytes.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

// ---------------------------------------------------------------- fan files

#[derive(Serialize, Deserialize)]
pub struct FanFile {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("fan data fits in 64 bits")
}

impl FanFile {
    pub fn from_fan(f: &Fan) -> Self {
        FanFile {
            rank: f.rank,
            rays: f.rays.iter().map(|r| r.iter().map(to_i64).collect()).collect(),
            max_cones: f.max_cones.clone(),
        }
    }

    pub fn to_fan(&self) -> Result<Fan, FormatsError> {
        Ok(Fan::from_i64(self.rank, &self.rays, &self.max_cones)?)
    }
}

pub fn write_fan(f: &Fan) -> String {
    let mut s = serde_json::to_string_pretty(&FanFile::from_fan(f)).expect("serializable");
    s.push('\n');
    s
}

pub fn read_fan(text: &str) -> Result<Fan, FormatsError> {
    let file: FanFile = serde_json::from_str(text)?;
    file.to_fan()
}

// --------------------------------------------------------- collection files

#[derive(Serialize, Deserialize)]
pub struct ObjectEntry {
    pub label: String,
    pub chi: Vec<i64>,
    pub vanishing: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
pub struct CollectionFile {
    /// Content hash of the fan file this collection refers to.
    pub fan_hash: String,
    pub objects: Vec<ObjectEntry>,
}

pub fn write_collection(c: &Collection, fan_text: &str) -> String {
    let file = CollectionFile {
        fan_hash: content_hash(fan_text.as_bytes()),
        objects: c
            .objects
            .iter()
            .zip(&c.labels)
            .map(|(t, label)| ObjectEntry {
                label: label.clone(),
                chi: t.chi.coeffs.iter().map(to_i64).collect(),
                vanishing: t.vanishing.clone(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("serializable");
    s.push('\n');
    s
}

/// Parse a collection against a fan, verifying the fan-file hash reference.
pub fn read_collection(text: &str, f: &Fan, fan_text: &str) -> Result<Collection, FormatsError> {
    let file: CollectionFile = serde_json::from_str(text)?;
    let expected = content_hash(fan_text.as_bytes());
    if file.fan_hash != expected {
        return Err(FormatsError::FanHashMismatch { expected, found: file.fan_hash });
    }
    let mut objects = vec![];
    let mut labels = vec![];
    for entry in file.objects {
        if entry.chi.len() != f.rays.len() {
            return Err(FormatsError::CoefficientCountMismatch {
                label: entry.label,
                got: entry.chi.len(),
                expected: f.rays.len(),
            });
        }
        let chi = TDivisor::from_i64(f, &entry.chi);
        objects.push(TCIObject::new(f, chi, entry.vanishing)?);
        labels.push(entry.label);
    }
    Ok(Collection::new(objects, labels)?)
}

// ------------------------------------------------------------- action files

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    /// "C2" or "C2xC2".
    Name(String),
    /// An explicit multiplication table with generator indices.
    Table { table: Vec<Vec<usize>>, generators: Vec<usize> },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiSpec {
    /// Index into the canonical fan-automorphism ordering.
    Index(usize),
    /// An explicit lattice matrix, resolved against the automorphism list.
    Matrix(Vec<Vec<i64>>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldLabelSpec {
    Biquadratic { biquadratic: (i64, i64) },
    Named { named: String },
}

#[derive(Serialize, Deserialize)]
pub struct ActionFile {
    pub group: GroupSpec,
    /// Generator name -> automorphism.  Generator names: "g" for C2,
    /// "s" and "t" for C2xC2, "g0", "g1", ... for explicit tables.
    pub phi: BTreeMap<String, PhiSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_label: Option<FieldLabelSpec>,
}

/// The generator names of a group spec, in generator order.
fn generator_names(group: &GroupSpec) -> Result<(FiniteGroup, Vec<String>), FormatsError> {
    match group {
        GroupSpec::Name(name) => match name.as_str() {
            "C2" => Ok((FiniteGroup::cyclic(2), vec!["g".into()])),
            "C2xC2" => Ok((FiniteGroup::klein_four(), vec!["s".into(), "t".into()])),
            other => Err(FormatsError::UnknownGroup(other.into())),
        },
        GroupSpec::Table { table, generators } => {
            let g = FiniteGroup::new(table.clone(), generators.clone())?;
            let names = (0..generators.len()).map(|i| format!("g{i}")).collect();
            Ok((g, names))
        }
    }
}

/// Resolve an action file against a fan: build the automorphism group,
/// translate each generator image (index or matrix) into a canonical
/// automorphism index, and extend to a verified homomorphism.
pub fn resolve_action(file: &ActionFile, f: &Fan) -> Result<GaloisAction, FormatsError> {
    let auts = fan_aut(f)?;
    let (group, names) = generator_names(&file.group)?;
    let mut images = vec![];
    for name in &names {
        let spec = file
            .phi
            .get(name)
            .ok_or_else(|| FormatsError::MissingGenerator(name.clone()))?;
        let index = match spec {
            PhiSpec::Index(i) => *i,
            PhiSpec::Matrix(rows) => {
                let m = square_matrix(rows, f.rank)
                    .ok_or_else(|| FormatsError::NotAnAutomorphism(name.clone()))?;
                auts.matrices
                    .iter()
                    .position(|x| *x == m)
                    .ok_or_else(|| FormatsError::NotAnAutomorphism(name.clone()))?
            }
        };
        images.push(index);
    }
    let field_label = file.field_label.as_ref().map(|spec| match spec {
        FieldLabelSpec::Biquadratic { biquadratic: (a, b) } => FieldLabel::Biquadratic(*a, *b),
        FieldLabelSpec::Named { named } => FieldLabel::Named(named.clone()),
    });
    Ok(GaloisAction::new(auts, group, &images, field_label)?)
}

/// Build an n-by-n matrix from rows, rejecting ragged or misshapen input.
fn square_matrix(rows: &[Vec<i64>], n: usize) -> Option<IntMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return None;
    }
    Some(IntMatrix::from_rows(rows))
}

pub fn read_action(text: &str) -> Result<ActionFile, FormatsError> {
    Ok(serde_json::from_str(text)?)
}

pub fn write_action(file: &ActionFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("serializable");
    s.push('\n');
    s
}

// ------------------------------------------------------------ lattice files

/// A lattice with a group action, given by generator matrices.
#[derive(Serialize, Deserialize)]
pub struct LatticeFile {
    pub rank: usize,
    /// One square matrix per group generator, as rows.
    pub generators: Vec<Vec<Vec<i64>>>,
}

impl LatticeFile {
    /// The generator matrices, or None if any is ragged or not rank x rank.
    pub fn generator_matrices(&self) -> Option<Vec<IntMatrix>> {
        self.generators.iter().map(|rows| square_matrix(rows, self.rank)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excol::build_ct_collection;
    use crate::fan::build_an_fan;

    #[test]
    fn fan_files_round_trip() {
        for n in 1..=3 {
            let f = build_an_fan(n).unwrap();
            let text = write_fan(&f);
            let back = read_fan(&text).unwrap();
            assert_eq!(back.rank, f.rank);
            assert_eq!(back.rays, f.rays);
            assert_eq!(back.max_cones, f.max_cones);
        }
    }

    #[test]
    fn invalid_fan_files_are_rejected() {
        assert!(read_fan("{").is_err());
        // non-primitive ray
        let bad = r#"{"rank":1,"rays":[[2],[-1]],"max_cones":[[0],[1]]}"#;
        assert!(matches!(read_fan(bad), Err(FormatsError::Fan(_))));
    }

    #[test]
    fn collection_files_round_trip_and_check_the_fan_hash() {
        let (f, c) = build_ct_collection(2).unwrap();
        let fan_text = write_fan(&f);
        let text = write_collection(&c, &fan_text);
        let back = read_collection(&text, &f, &fan_text).unwrap();
        assert_eq!(back.labels, c.labels);
        assert_eq!(back.objects[0].chi.coeffs, c.objects[0].chi.coeffs);
        // altering the fan file invalidates the reference
        let other = write_fan(&build_an_fan(3).unwrap());
        let f3 = build_an_fan(3).unwrap();
        assert!(matches!(
            read_collection(&text, &f3, &other),
            Err(FormatsError::FanHashMismatch { .. })
        ));
    }

    #[test]
    fn collection_files_validate_entries() {
        let (f, _) = build_ct_collection(1).unwrap();
        let fan_text = write_fan(&f);
        // wrong coefficient count
        let short = CollectionFile {
            fan_hash: content_hash(fan_text.as_bytes()),
            objects: vec![ObjectEntry { label: "x".into(), chi: vec![-1], vanishing: vec![] }],
        };
        let short_text = serde_json::to_string(&short).unwrap();
        assert!(matches!(
            read_collection(&short_text, &f, &fan_text),
            Err(FormatsError::CoefficientCountMismatch { .. })
        ));
        // duplicate labels are rejected through Collection validation
        let dup = CollectionFile {
            fan_hash: content_hash(fan_text.as_bytes()),
            objects: vec![
                ObjectEntry { label: "x".into(), chi: vec![0, 0], vanishing: vec![] },
                ObjectEntry { label: "x".into(), chi: vec![-1, 0], vanishing: vec![] },
            ],
        };
        let dup_text = serde_json::to_string(&dup).unwrap();
        assert!(matches!(
            read_collection(&dup_text, &f, &fan_text),
            Err(FormatsError::Collection(_))
        ));
    }

    #[test]
    fn action_files_resolve_by_index_and_matrix() {
        let f = build_an_fan(3).unwrap();
        let sigma = vec![vec![-1, 0, 0], vec![0, 0, -1], vec![0, -1, 0]];
        let tau = vec![vec![1, 0, 0], vec![1, -1, 0], vec![1, 0, -1]];
        let text = format!(
            r#"{{
  "group": "C2xC2",
  "phi": {{ "s": {}, "t": {} }},
  "field_label": {{ "biquadratic": [5, 29] }}
}}"#,
            serde_json::to_string(&sigma).unwrap(),
            serde_json::to_string(&tau).unwrap()
        );
        let file = read_action(&text).unwrap();
        let action = resolve_action(&file, &f).unwrap();
        assert_eq!(action.group.order(), 4);
        assert_eq!(action.field_label, Some(FieldLabel::Biquadratic(5, 29)));
        // the same generators by canonical index round-trip identically
        let by_index = ActionFile {
            group: GroupSpec::Name("C2xC2".into()),
            phi: [
                ("s".to_string(), PhiSpec::Index(action.phi[1])),
                ("t".to_string(), PhiSpec::Index(action.phi[2])),
            ]
            .into_iter()
            .collect(),
            field_label: None,
        };
        let again = resolve_action(&by_index, &f).unwrap();
        assert_eq!(again.phi, action.phi);
    }

    #[test]
    fn action_file_errors() {
        let f = build_an_fan(2).unwrap();
        let unknown = read_action(r#"{"group": "D8", "phi": {}}"#).unwrap();
        assert!(matches!(
            resolve_action(&unknown, &f),
            Err(FormatsError::UnknownGroup(_))
        ));
        let missing = read_action(r#"{"group": "C2", "phi": {}}"#).unwrap();
        assert!(matches!(
            resolve_action(&missing, &f),
            Err(FormatsError::MissingGenerator(_))
        ));
        let not_aut =
            read_action(r#"{"group": "C2", "phi": {"g": [[2, 0], [0, 1]]}}"#).unwrap();
        assert!(matches!(
            resolve_action(&not_aut, &f),
            Err(FormatsError::NotAnAutomorphism(_))
        ));
        // an automorphism of the wrong order is rejected downstream
        let f3 = build_an_fan(3).unwrap();
        let auts = fan_aut(&f3).unwrap();
        let g4 = auts
            .group
            .elements()
            .find(|&g| auts.group.element_order(g) == 4)
            .unwrap();
        let wrong_order = ActionFile {
            group: GroupSpec::Name("C2".into()),
            phi: [("g".to_string(), PhiSpec::Index(g4))].into_iter().collect(),
            field_label: None,
        };
        assert!(matches!(
            resolve_action(&wrong_order, &f3),
            Err(FormatsError::Action(DescentError::NotAHomomorphism))
        ));
    }

    #[test]
    fn explicit_table_groups_parse() {
        let f = build_an_fan(1).unwrap();
        let text = r#"{
  "group": { "table": [[0, 1], [1, 0]], "generators": [1] },
  "phi": { "g0": 0 }
}"#;
        let file = read_action(text).unwrap();
        let action = resolve_action(&file, &f).unwrap();
        assert_eq!(action.group.order(), 2);
        assert_eq!(action.phi, vec![0, 0]);
    }
}
