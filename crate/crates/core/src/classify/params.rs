use std::collections::BTreeSet;
use std::str::FromStr;

use super::{ClassifierSpec, ClassifyError, Param};
use crate::distance::{BagDistanceKind, Hausdorff};

/// Typed, tracked access to a [`ClassifierSpec`]'s parameters.
///
/// Every read marks the parameter as used; [`ParamReader::finish`] rejects
/// any the algorithm did not ask for.
#[derive(Debug)]
pub struct ParamReader<'a> {
    spec: &'a ClassifierSpec,
    used: BTreeSet<&'a str>,
}

impl<'a> ParamReader<'a> {
    pub fn new(spec: &'a ClassifierSpec) -> Self {
        Self {
            spec,
            used: BTreeSet::new(),
        }
    }

    fn get(&mut self, name: &str) -> Option<&'a Param> {
        let (k, v) = self.spec.params.get_key_value(name)?;
        self.used.insert(k.as_str());
        Some(v)
    }

    pub fn text(&mut self, name: &str) -> Result<Option<&'a str>, ClassifyError> {
        match self.get(name) {
            None => Ok(None),
            Some(Param::Value(v)) => Ok(Some(v.trim())),
            Some(_) => Err(ClassifyError::bad(name, "expected a scalar value")),
        }
    }

    pub fn parse<T: FromStr>(&mut self, name: &str) -> Result<Option<T>, ClassifyError> {
        match self.text(name)? {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| ClassifyError::bad(name, format!("cannot parse '{v}'"))),
        }
    }

    /// A positive integer.
    pub fn count(&mut self, name: &str) -> Result<Option<usize>, ClassifyError> {
        match self.parse::<usize>(name)? {
            Some(0) => Err(ClassifyError::bad(name, "must be at least 1")),
            v => Ok(v),
        }
    }

    pub fn boolean(&mut self, name: &str) -> Result<Option<bool>, ClassifyError> {
        match self.text(name)? {
            None => Ok(None),
            Some(v) if v.eq_ignore_ascii_case("true") => Ok(Some(true)),
            Some(v) if v.eq_ignore_ascii_case("false") => Ok(Some(false)),
            Some(v) => Err(ClassifyError::bad(name, format!("expected true or false, got '{v}'"))),
        }
    }

    /// The `metric` parameter, either a `<metric>` element or a scalar key.
    pub fn metric(&mut self) -> Result<Option<BagDistanceKind>, ClassifyError> {
        let (name, normalize) = match self.get("metric") {
            None => return Ok(None),
            Some(Param::Metric { name, normalize }) => (name.as_str(), *normalize),
            Some(Param::Value(v)) => (v.trim(), false),
            Some(Param::Classifier(_)) => return Err(ClassifyError::bad("metric", "expected a metric")),
        };
        let variant: Hausdorff = name.parse().map_err(|e| ClassifyError::bad("metric", format!("{e}")))?;
        Ok(Some(BagDistanceKind { variant, normalize }))
    }

    pub fn classifier(&mut self, name: &str) -> Result<Option<&'a ClassifierSpec>, ClassifyError> {
        match self.get(name) {
            None => Ok(None),
            Some(Param::Classifier(c)) => Ok(Some(c)),
            Some(_) => Err(ClassifyError::bad(name, "expected a nested classifier")),
        }
    }

    /// A nested classifier given either as an element or as a bare key.
    pub fn nested(&mut self, name: &str) -> Result<Option<ClassifierSpec>, ClassifyError> {
        match self.get(name) {
            None => Ok(None),
            Some(Param::Classifier(c)) => Ok(Some(c.clone())),
            Some(Param::Value(v)) => Ok(Some(ClassifierSpec::new(v.trim()))),
            Some(Param::Metric { .. }) => Err(ClassifyError::bad(name, "expected a classifier")),
        }
    }

    pub fn finish(self) -> Result<(), ClassifyError> {
        match self.spec.params.keys().find(|k| !self.used.contains(k.as_str())) {
            Some(k) => Err(ClassifyError::bad(k, format!("not a parameter of {}", self.spec.key))),
            None => Ok(()),
        }
    }
}
