//! Bags, label matrices and MIML datasets, plus reading and writing the
//! relational ARFF format with its label-list XML sidecar.

mod arff;
mod labels_xml;

use std::collections::HashSet;
use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

pub use arff::{parse_dataset, parse_dataset_str, to_arff_string, write_dataset};
pub use labels_xml::{labels_xml_string, parse_labels_xml};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("file not found: {}", path.display())]
    FileNotFound { path: PathBuf },
    #[error("{file}:{line}:{column}: syntax error: {message}")]
    Syntax {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Schema(String),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bag index {index} out of range for {len} bags")]
    IndexOutOfRange { index: usize, len: usize },
}

impl DataError {
    pub(crate) fn schema(msg: impl Into<String>) -> Self {
        DataError::Schema(msg.into())
    }
}

/// Names of the per-instance features. Only numeric attributes exist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSchema {
    names: Vec<String>,
}

impl AttributeSchema {
    pub fn new(names: Vec<String>) -> Result<Self, DataError> {
        if names.is_empty() {
            return Err(DataError::schema("a bag needs at least one attribute"));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if n.is_empty() {
                return Err(DataError::schema("empty attribute name"));
            }
            if !seen.insert(n.as_str()) {
                return Err(DataError::schema(format!("duplicate attribute '{n}'")));
            }
        }
        Ok(Self { names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }
}

/// A bag: an identifier and a row-major `len × dim` block of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct Bag {
    id: String,
    dim: usize,
    values: Vec<f64>,
}

impl Bag {
    pub fn new(id: impl Into<String>, dim: usize, values: Vec<f64>) -> Result<Self, DataError> {
        let id = id.into();
        if id.is_empty() {
            return Err(DataError::schema("empty bag id"));
        }
        if dim == 0 {
            return Err(DataError::schema(format!("bag '{id}' has zero-dimensional instances")));
        }
        if values.is_empty() {
            return Err(DataError::schema(format!("bag '{id}' is empty")));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(DataError::schema(format!(
                "bag '{id}': {} values do not form rows of width {dim}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(DataError::schema(format!("bag '{id}' holds non-finite value {v}")));
        }
        Ok(Self { id, dim, values })
    }

    pub fn from_rows(id: impl Into<String>, rows: &[Vec<f64>]) -> Result<Self, DataError> {
        let id = id.into();
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(DataError::schema(format!(
                "bag '{id}': ragged instance of width {} (expected {dim})",
                r.len()
            )));
        }
        Self::new(id, dim, rows.concat())
    }

    /// Constructor for internally derived bags whose values are known to be valid.
    pub(crate) fn from_parts(id: String, dim: usize, values: Vec<f64>) -> Self {
        debug_assert!(dim > 0 && !values.is_empty() && values.len().is_multiple_of(dim));
        Self { id, dim, values }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of instances.
    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn instance(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn instances(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.dim)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn with_id(&self, id: String) -> Self {
        Self {
            id,
            dim: self.dim,
            values: self.values.clone(),
        }
    }
}

/// Binary `m × q` label matrix with named columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMatrix {
    names: Vec<String>,
    values: Vec<bool>,
}

impl LabelMatrix {
    pub fn new(names: Vec<String>, rows: &[Vec<bool>]) -> Result<Self, DataError> {
        let q = names.len();
        if q < 2 {
            return Err(DataError::schema(format!(
                "at least two labels are required, found {q}"
            )));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if n.is_empty() {
                return Err(DataError::schema("empty label name"));
            }
            if !seen.insert(n.as_str()) {
                return Err(DataError::schema(format!("duplicate label '{n}'")));
            }
        }
        if let Some(r) = rows.iter().find(|r| r.len() != q) {
            return Err(DataError::schema(format!(
                "label row of length {} for {q} labels",
                r.len()
            )));
        }
        Ok(Self {
            names,
            values: rows.concat(),
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn num_labels(&self) -> usize {
        self.names.len()
    }

    pub fn num_rows(&self) -> usize {
        self.values.len() / self.names.len()
    }

    pub fn row(&self, i: usize) -> &[bool] {
        let q = self.num_labels();
        &self.values[i * q..(i + 1) * q]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, bool> {
        self.values.chunks_exact(self.num_labels())
    }

    pub fn get(&self, row: usize, label: usize) -> bool {
        self.values[row * self.num_labels() + label]
    }

    /// Positive count per label.
    pub fn label_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_labels()];
        for row in self.rows() {
            for (c, &v) in counts.iter_mut().zip(row) {
                *c += usize::from(v);
            }
        }
        counts
    }

    pub(crate) fn select(&self, indices: &[usize]) -> Self {
        let values = indices.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        Self {
            names: self.names.clone(),
            values,
        }
    }
}

/// A multi-instance multi-label dataset. Immutable once built; bags are
/// reference-counted so derived views can share them.
#[derive(Debug, Clone, PartialEq)]
pub struct MimlDataset {
    relation: String,
    bag_id_attribute: String,
    relational_attribute: String,
    schema: AttributeSchema,
    bags: Arc<[Bag]>,
    labels: LabelMatrix,
}

impl MimlDataset {
    pub fn new(
        relation: impl Into<String>,
        schema: AttributeSchema,
        bags: Vec<Bag>,
        labels: LabelMatrix,
    ) -> Result<Self, DataError> {
        Self::with_attribute_names(relation, "id", "bag", schema, bags, labels)
    }

    /// As [`MimlDataset::new`], naming the bag-id and relational attributes
    /// that appear in the ARFF header.
    pub fn with_attribute_names(
        relation: impl Into<String>,
        bag_id_attribute: impl Into<String>,
        relational_attribute: impl Into<String>,
        schema: AttributeSchema,
        bags: Vec<Bag>,
        labels: LabelMatrix,
    ) -> Result<Self, DataError> {
        let relation = relation.into();
        let bag_id_attribute = bag_id_attribute.into();
        let relational_attribute = relational_attribute.into();
        if relation.is_empty() || bag_id_attribute.is_empty() || relational_attribute.is_empty() {
            return Err(DataError::schema("relation and attribute names must be non-empty"));
        }
        if bag_id_attribute == relational_attribute {
            return Err(DataError::schema("bag-id and relational attributes share a name"));
        }
        if bags.is_empty() {
            return Err(DataError::schema("dataset has no bags"));
        }
        if bags.len() != labels.num_rows() {
            return Err(DataError::schema(format!(
                "{} bags but {} label rows",
                bags.len(),
                labels.num_rows()
            )));
        }
        let d = schema.dim();
        let mut ids = HashSet::new();
        for b in &bags {
            if b.dim() != d {
                return Err(DataError::schema(format!(
                    "bag '{}' has dimension {} but the schema has {d}",
                    b.id(),
                    b.dim()
                )));
            }
            if !ids.insert(b.id()) {
                return Err(DataError::schema(format!("duplicate bag id '{}'", b.id())));
            }
        }
        let reserved = [bag_id_attribute.as_str(), relational_attribute.as_str()];
        for name in labels.names().iter().chain(schema.names()) {
            if reserved.contains(&name.as_str()) {
                return Err(DataError::schema(format!("attribute name '{name}' is used twice")));
            }
        }
        if let Some(n) = labels.names().iter().find(|n| schema.names().contains(n)) {
            return Err(DataError::schema(format!("'{n}' is both a feature and a label")));
        }
        Ok(Self {
            relation,
            bag_id_attribute,
            relational_attribute,
            schema,
            bags: bags.into(),
            labels,
        })
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn bag_id_attribute(&self) -> &str {
        &self.bag_id_attribute
    }

    pub fn relational_attribute(&self) -> &str {
        &self.relational_attribute
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn bags(&self) -> &[Bag] {
        &self.bags
    }

    pub fn shared_bags(&self) -> Arc<[Bag]> {
        Arc::clone(&self.bags)
    }

    pub fn labels(&self) -> &LabelMatrix {
        &self.labels
    }

    pub fn num_bags(&self) -> usize {
        self.bags.len()
    }

    pub fn num_labels(&self) -> usize {
        self.labels.num_labels()
    }

    pub fn dim(&self) -> usize {
        self.schema.dim()
    }

    /// True when `other` can be used alongside `self` (same features and labels).
    pub fn is_compatible(&self, other: &MimlDataset) -> bool {
        self.schema == other.schema && self.labels.names() == other.labels.names()
    }
}

/// Builds a dataset from the bags at `indices` (in that order) and their
/// label rows. Repeated indices are allowed; later copies get a `_<n>`
/// suffix so bag ids stay unique.
pub fn select_bags(ds: &MimlDataset, indices: &[usize]) -> Result<MimlDataset, DataError> {
    let m = ds.num_bags();
    if let Some(&index) = indices.iter().find(|&&i| i >= m) {
        return Err(DataError::IndexOutOfRange { index, len: m });
    }
    if indices.is_empty() {
        return Err(DataError::schema("bag selection is empty"));
    }
    let mut used: HashSet<String> = HashSet::with_capacity(indices.len());
    let mut bags = Vec::with_capacity(indices.len());
    for &i in indices {
        let bag = &ds.bags[i];
        let mut id = bag.id().to_string();
        let mut n = 2;
        while used.contains(&id) {
            id = format!("{}_{n}", bag.id());
            n += 1;
        }
        used.insert(id.clone());
        bags.push(if id == bag.id() { bag.clone() } else { bag.with_id(id) });
    }
    Ok(MimlDataset {
        relation: ds.relation.clone(),
        bag_id_attribute: ds.bag_id_attribute.clone(),
        relational_attribute: ds.relational_attribute.clone(),
        schema: ds.schema.clone(),
        bags: bags.into(),
        labels: ds.labels.select(indices),
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Builds a dataset from `(rows, labels)` pairs with generated names.
    pub fn dataset(bags: &[(Vec<Vec<f64>>, Vec<bool>)]) -> MimlDataset {
        let d = bags[0].0[0].len();
        let q = bags[0].1.len();
        let schema = AttributeSchema::new((0..d).map(|j| format!("f{j}")).collect()).unwrap();
        let built = bags
            .iter()
            .enumerate()
            .map(|(i, (rows, _))| Bag::from_rows(format!("b{i}"), rows).unwrap())
            .collect();
        let rows: Vec<Vec<bool>> = bags.iter().map(|(_, l)| l.clone()).collect();
        let labels = LabelMatrix::new((0..q).map(|l| format!("l{l}")).collect(), &rows).unwrap();
        MimlDataset::new("fixture", schema, built, labels).unwrap()
    }
}
