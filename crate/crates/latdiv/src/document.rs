//! The on-disk document format.
//!
//! One structured-text (JSON) format covers lattices, diversities, and
//! points; rationals travel as strings so no float contamination is
//! possible. Serialization is canonical: keys sorted, elements in the
//! lattice's element order, covers sorted, rationals in lowest terms, so
//! `serialize . parse` is the identity on canonical documents and every
//! canonical document is byte-stable.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::rational::BigRational;
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::diversity::{DiversityError, DiversityFn, FiniteMetric, MetricError};
use crate::lattice::{FiniteLattice, LatticeError};
use crate::rational::{format_rational, parse_rational, RationalParseError};
use crate::tightspan::{LatticeFunction, TightSpanError};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("bad rational for `{key}`: {source}")]
    BadRational {
        key: String,
        source: RationalParseError,
    },
    #[error("diversity names unknown element `{0}`")]
    UnknownDiversityElement(String),
    #[error("no diversity value for element `{0}`")]
    MissingDiversityValue(String),
    #[error("point names unknown element `{0}`")]
    UnknownPointElement(String),
    #[error("no point value for element `{0}`")]
    MissingPointValue(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Diversity(#[from] DiversityError),
    #[error(transparent)]
    Point(#[from] TightSpanError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A string-to-string map that rejects duplicate keys when parsed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct StrictMap(pub BTreeMap<String, String>);

impl StrictMap {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<'de> Deserialize<'de> for StrictMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct StrictVisitor;
        impl<'de> Visitor<'de> for StrictVisitor {
            type Value = StrictMap;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map with unique string keys")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut map = BTreeMap::new();
                while let Some((key, value)) = access.next_entry::<String, String>()? {
                    if map.insert(key.clone(), value).is_some() {
                        return Err(serde::de::Error::custom(format!(
                            "duplicate key `{key}`"
                        )));
                    }
                }
                Ok(StrictMap(map))
            }
        }
        deserializer.deserialize_map(StrictVisitor)
    }
}

/// A lattice document, optionally carrying a diversity. Field order is
/// the canonical (alphabetical) key order of the serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatDivDocument {
    pub covers: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diversity: Option<StrictMap>,
    pub elements: Vec<String>,
    #[serde(default, skip_serializing_if = "StrictMap::is_empty")]
    pub metadata: StrictMap,
    pub name: String,
}

/// A point file: one rational per lattice element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDocument {
    pub values: StrictMap,
}

/// A metric file: points plus one entry per unordered pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDocument {
    pub distances: Vec<(String, String, String)>,
    pub points: Vec<String>,
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, DocumentError> {
    serde_json::from_str(text).map_err(|e| DocumentError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses and syntactically validates a document: JSON structure, unique
/// keys, known fields, and well-formed rational literals.
pub fn parse(text: &str) -> Result<LatDivDocument, DocumentError> {
    let doc: LatDivDocument = parse_json(text)?;
    if let Some(diversity) = &doc.diversity {
        for (key, literal) in &diversity.0 {
            parse_rational(literal).map_err(|source| DocumentError::BadRational {
                key: key.clone(),
                source,
            })?;
        }
    }
    Ok(doc)
}

/// A parsed document instantiated into lattice + optional diversity. The
/// diversity is validated on load but kept even when invalid, so reports
/// can be produced for counterexample files.
#[derive(Debug, Clone)]
pub struct LoadedDocument {
    pub name: String,
    pub lattice: Arc<FiniteLattice>,
    pub diversity: Option<DiversityFn>,
    pub metadata: BTreeMap<String, String>,
}

/// Builds the lattice and diversity behind a document.
pub fn instantiate(doc: &LatDivDocument) -> Result<LoadedDocument, DocumentError> {
    let lattice = Arc::new(FiniteLattice::from_covers(&doc.elements, &doc.covers)?);
    let diversity = match &doc.diversity {
        None => None,
        Some(map) => {
            for key in map.0.keys() {
                if lattice.index_of(key).is_none() {
                    return Err(DocumentError::UnknownDiversityElement(key.clone()));
                }
            }
            let mut values = BTreeMap::new();
            for (key, literal) in &map.0 {
                let value =
                    parse_rational(literal).map_err(|source| DocumentError::BadRational {
                        key: key.clone(),
                        source,
                    })?;
                values.insert(key.clone(), value);
            }
            for name in lattice.elements() {
                if !values.contains_key(name) {
                    return Err(DocumentError::MissingDiversityValue(name.clone()));
                }
            }
            let mut d = DiversityFn::from_named_values(lattice.clone(), &values)?;
            d.validate();
            Some(d)
        }
    };
    Ok(LoadedDocument {
        name: doc.name.clone(),
        lattice,
        diversity,
        metadata: doc.metadata.0.clone(),
    })
}

/// Parses and instantiates in one step.
pub fn load(text: &str) -> Result<LoadedDocument, DocumentError> {
    instantiate(&parse(text)?)
}

/// The canonical document for a lattice and optional diversity values
/// (indexed by element order).
pub fn document_for(
    name: &str,
    lattice: &FiniteLattice,
    diversity: Option<&[BigRational]>,
    metadata: &BTreeMap<String, String>,
) -> LatDivDocument {
    let covers = lattice
        .covers()
        .iter()
        .map(|&(lo, hi)| {
            (
                lattice.element(lo).to_string(),
                lattice.element(hi).to_string(),
            )
        })
        .collect();
    let diversity = diversity.map(|values| {
        StrictMap(
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (lattice.element(i).to_string(), format_rational(v)))
                .collect(),
        )
    });
    LatDivDocument {
        covers,
        diversity,
        elements: lattice.elements().to_vec(),
        metadata: StrictMap(metadata.clone()),
        name: name.to_string(),
    }
}

/// Canonical serialization: pretty JSON with sorted keys and a trailing
/// newline.
pub fn serialize(doc: &LatDivDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("documents always serialize");
    text.push('\n');
    text
}

pub fn parse_point(text: &str) -> Result<PointDocument, DocumentError> {
    parse_json(text)
}

/// Resolves a point document against a lattice; values must cover every
/// element exactly.
pub fn point_to_function(
    point: &PointDocument,
    lattice: &Arc<FiniteLattice>,
) -> Result<LatticeFunction, DocumentError> {
    for key in point.values.0.keys() {
        if lattice.index_of(key).is_none() {
            return Err(DocumentError::UnknownPointElement(key.clone()));
        }
    }
    let mut values = Vec::with_capacity(lattice.len());
    for name in lattice.elements() {
        let literal = point
            .values
            .0
            .get(name)
            .ok_or_else(|| DocumentError::MissingPointValue(name.clone()))?;
        values.push(
            parse_rational(literal).map_err(|source| DocumentError::BadRational {
                key: name.clone(),
                source,
            })?,
        );
    }
    Ok(LatticeFunction::new(lattice.clone(), values)?)
}

/// The canonical point document of a lattice function.
pub fn function_to_point(f: &LatticeFunction) -> PointDocument {
    PointDocument {
        values: StrictMap(
            f.values()
                .iter()
                .enumerate()
                .map(|(i, v)| (f.lattice().element(i).to_string(), format_rational(v)))
                .collect(),
        ),
    }
}

pub fn parse_metric(text: &str) -> Result<FiniteMetric, DocumentError> {
    let doc: MetricDocument = parse_json(text)?;
    let mut pairs = Vec::with_capacity(doc.distances.len());
    for (a, b, literal) in &doc.distances {
        let value = parse_rational(literal).map_err(|source| DocumentError::BadRational {
            key: format!("{a},{b}"),
            source,
        })?;
        pairs.push((a.clone(), b.clone(), value));
    }
    Ok(FiniteMetric::from_pairs(doc.points, &pairs)?)
}
