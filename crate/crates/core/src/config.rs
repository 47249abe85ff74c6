//! Experiment configuration files.
//!
//! ```xml
//! <configuration>
//!   <classifier name="classifiers.lazy.MIMLkNN">
//!     <nReferences>4</nReferences>
//!     <nCiters>6</nCiters>
//!     <metric name="distance.AverageHausdorff"/>
//!   </classifier>
//!   <evaluator name="evaluation.EvaluatorCV">
//!     <seed>712637</seed>
//!     <numFolds>5</numFolds>
//!     <data>
//!       <file>data/miml_birds.arff</file>
//!       <xmlFile>data/miml_birds.xml</xmlFile>
//!     </data>
//!   </evaluator>
//!   <report name="report.BaseMIMLReport">
//!     <fileName>results/mimlknn.csv</fileName>
//!     <measures perLabel="true">
//!       <measure>Hamming Loss</measure>
//!     </measures>
//!   </report>
//! </configuration>
//! ```
//!
//! Inside `<classifier>`, a leaf element is a scalar parameter, `<metric
//! name=".." normalize="true|false"/>` selects a bag distance, and any other
//! element with a `name` attribute is a nested classifier with its own
//! parameters. Evaluators also accept `<strategy>` (partitioning, default
//! iterative) and, for holdout, either `<trainFile>`/`<testFile>`/`<xmlFile>`
//! or `<file>`/`<xmlFile>` with `<percentageTrain>`. Unknown elements and
//! attributes are errors. Relative paths resolve against the configuration
//! file's directory.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::classify::{ClassifierSpec, ClassifyError, Param, Registry};
use crate::eval::EvaluatorKind;
use crate::metrics::Measure;
use crate::partition::Strategy;
use crate::xml::{self, Element, Pos};

/// Key of the CSV report writer.
pub const CSV_REPORT: &str = "report.BaseMIMLReport";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration file not found: {0}")]
    NotFound(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("syntax error: {0}")]
    Syntax(#[from] xml::XmlError),
    #[error("missing <{0}> branch")]
    MissingBranch(&'static str),
    #[error("{pos}: duplicate <{name}> branch")]
    DuplicateBranch { name: String, pos: Pos },
    #[error("{pos}: {message}")]
    Invalid { pos: Pos, message: String },
    #[error("{pos}: <{element}>: {source}")]
    Parameter {
        element: String,
        pos: Pos,
        #[source]
        source: ClassifyError,
    },
}

fn invalid(el: &Element, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        pos: el.pos,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// One dataset: cross-validated, or split by `percentageTrain` for holdout.
    Single { file: PathBuf, xml_file: PathBuf },
    /// Separate train and test ARFF files sharing one label sidecar.
    Split {
        train_file: PathBuf,
        test_file: PathBuf,
        xml_file: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatorConfig {
    pub kind: EvaluatorKind,
    pub seed: u64,
    /// Cross-validation only.
    pub num_folds: usize,
    pub strategy: Strategy,
    pub data: DataSource,
    /// Holdout from a single dataset: training share in percent.
    pub percentage_train: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportConfig {
    pub name: String,
    pub file_name: PathBuf,
    /// Empty means every measure.
    pub measures: Vec<Measure>,
    pub per_label: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub classifier: ClassifierSpec,
    pub evaluator: EvaluatorConfig,
    pub report: ReportConfig,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_FOLDS: usize = 10;

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            ConfigError::NotFound(path.to_path_buf())
        } else {
            ConfigError::Io {
                path: path.to_path_buf(),
                source: e,
            }
        }
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    parse_config_str(&text, base)
}

/// Parses configuration text; relative paths are joined onto `base_dir`.
pub fn parse_config_str(text: &str, base_dir: &Path) -> Result<ExperimentConfig, ConfigError> {
    let root = xml::parse(text)?;
    if root.name != "configuration" {
        return Err(invalid(
            &root,
            format!("root element must be <configuration>, found <{}>", root.name),
        ));
    }
    check_attributes(&root, &[])?;
    let mut branches: [Option<&Element>; 3] = [None, None, None];
    const NAMES: [&str; 3] = ["classifier", "evaluator", "report"];
    for child in &root.children {
        let slot = NAMES
            .iter()
            .position(|n| *n == child.name)
            .ok_or_else(|| invalid(child, format!("unknown element <{}>", child.name)))?;
        if branches[slot].is_some() {
            return Err(ConfigError::DuplicateBranch {
                name: child.name.clone(),
                pos: child.pos,
            });
        }
        branches[slot] = Some(child);
    }
    let [c, e, r] = branches;
    let c = c.ok_or(ConfigError::MissingBranch("classifier"))?;
    let e = e.ok_or(ConfigError::MissingBranch("evaluator"))?;
    let r = r.ok_or(ConfigError::MissingBranch("report"))?;

    let classifier = classifier_spec(c)?;
    validate_classifier(c, &classifier)?;
    Ok(ExperimentConfig {
        classifier,
        evaluator: evaluator_config(e, base_dir)?,
        report: report_config(r, base_dir)?,
    })
}

fn check_attributes(el: &Element, allowed: &[&str]) -> Result<(), ConfigError> {
    match el.attributes.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        Some((k, _)) => Err(invalid(el, format!("unknown attribute '{k}' on <{}>", el.name))),
        None => Ok(()),
    }
}

fn required_name(el: &Element) -> Result<String, ConfigError> {
    match el.attr("name").map(str::trim) {
        Some(n) if !n.is_empty() => Ok(n.to_string()),
        _ => Err(invalid(el, format!("<{}> needs a name attribute", el.name))),
    }
}

fn leaf_text(el: &Element) -> Result<&str, ConfigError> {
    check_attributes(el, &[])?;
    if let Some(c) = el.children.first() {
        return Err(invalid(
            c,
            format!("unexpected element <{}> inside <{}>", c.name, el.name),
        ));
    }
    Ok(el.text_trimmed())
}

fn parse_bool(el: &Element, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        v if v.eq_ignore_ascii_case("true") => Ok(true),
        v if v.eq_ignore_ascii_case("false") => Ok(false),
        v => Err(invalid(el, format!("expected true or false, got '{v}'"))),
    }
}

fn classifier_spec(el: &Element) -> Result<ClassifierSpec, ConfigError> {
    check_attributes(el, &["name"])?;
    let mut spec = ClassifierSpec::new(required_name(el)?);
    if !el.text_trimmed().is_empty() {
        return Err(invalid(el, format!("unexpected text inside <{}>", el.name)));
    }
    for child in &el.children {
        let param = if child.name == "metric" {
            check_attributes(child, &["name", "normalize"])?;
            if !child.children.is_empty() || !child.text_trimmed().is_empty() {
                return Err(invalid(child, "<metric> takes no content"));
            }
            Param::Metric {
                name: required_name(child)?,
                normalize: match child.attr("normalize") {
                    Some(v) => parse_bool(child, v)?,
                    None => false,
                },
            }
        } else if child.attr("name").is_some() {
            Param::Classifier(classifier_spec(child)?)
        } else {
            Param::Value(leaf_text(child)?.to_string())
        };
        if spec.params.insert(child.name.clone(), param).is_some() {
            return Err(invalid(child, format!("parameter <{}> given twice", child.name)));
        }
    }
    Ok(spec)
}

/// Builds the learner once so parameter errors surface at parse time,
/// pointing at the offending element where possible.
fn validate_classifier(el: &Element, spec: &ClassifierSpec) -> Result<(), ConfigError> {
    let Err(source) = Registry::builtin().build(spec) else {
        return Ok(());
    };
    let (element, pos) = match &source {
        ClassifyError::BadParameter { name, .. } => match el.children.iter().find(|c| &c.name == name) {
            Some(c) => (c.name.clone(), c.pos),
            None => (el.name.clone(), el.pos),
        },
        _ => (el.name.clone(), el.pos),
    };
    Err(ConfigError::Parameter { element, pos, source })
}

fn resolve(base: &Path, raw: &str) -> PathBuf {
    let p = Path::new(raw);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn evaluator_config(el: &Element, base: &Path) -> Result<EvaluatorConfig, ConfigError> {
    check_attributes(el, &["name"])?;
    let name = required_name(el)?;
    let kind: EvaluatorKind = name.parse().map_err(|e: String| invalid(el, e))?;
    let mut seed = None;
    let mut folds = None;
    let mut strategy = None;
    let mut percentage = None;
    let mut data = None;
    for child in &el.children {
        let dup = |slot: bool| {
            if slot {
                Err(invalid(child, format!("<{}> given twice", child.name)))
            } else {
                Ok(())
            }
        };
        match child.name.as_str() {
            "seed" => {
                dup(seed.is_some())?;
                let v = leaf_text(child)?;
                seed = Some(
                    v.parse::<u64>()
                        .map_err(|_| invalid(child, format!("invalid seed '{v}'")))?,
                );
            }
            "numFolds" if kind == EvaluatorKind::CrossValidation => {
                dup(folds.is_some())?;
                let v = leaf_text(child)?;
                folds = Some(
                    v.parse::<usize>()
                        .ok()
                        .filter(|&k| k >= 2)
                        .ok_or_else(|| invalid(child, format!("numFolds must be an integer >= 2, got '{v}'")))?,
                );
            }
            "percentageTrain" if kind == EvaluatorKind::Holdout => {
                dup(percentage.is_some())?;
                let v = leaf_text(child)?;
                percentage = Some(
                    v.parse::<f64>()
                        .ok()
                        .filter(|p| *p > 0.0 && *p < 100.0)
                        .ok_or_else(|| invalid(child, format!("percentageTrain must lie in (0, 100), got '{v}'")))?,
                );
            }
            "strategy" => {
                dup(strategy.is_some())?;
                strategy = Some(leaf_text(child)?.parse::<Strategy>().map_err(|e| invalid(child, e))?);
            }
            "data" => {
                dup(data.is_some())?;
                data = Some(data_source(child, base)?);
            }
            other => return Err(invalid(child, format!("unknown element <{other}> in {name}"))),
        }
    }
    let data = data.ok_or_else(|| invalid(el, "missing <data>"))?;
    match (&kind, &data, percentage) {
        (EvaluatorKind::CrossValidation, DataSource::Split { .. }, _) => {
            return Err(invalid(el, "cross-validation takes a single <file>"));
        }
        (EvaluatorKind::Holdout, DataSource::Single { .. }, None) => {
            return Err(invalid(el, "holdout on a single <file> needs <percentageTrain>"));
        }
        (EvaluatorKind::Holdout, DataSource::Split { .. }, Some(_)) => {
            return Err(invalid(
                el,
                "<percentageTrain> does not apply to separate train and test files",
            ));
        }
        _ => {}
    }
    Ok(EvaluatorConfig {
        kind,
        seed: seed.unwrap_or(DEFAULT_SEED),
        num_folds: folds.unwrap_or(DEFAULT_FOLDS),
        strategy: strategy.unwrap_or_default(),
        data,
        percentage_train: percentage,
    })
}

fn data_source(el: &Element, base: &Path) -> Result<DataSource, ConfigError> {
    check_attributes(el, &[])?;
    let mut files: [Option<PathBuf>; 4] = Default::default();
    const NAMES: [&str; 4] = ["file", "trainFile", "testFile", "xmlFile"];
    for child in &el.children {
        let slot = NAMES
            .iter()
            .position(|n| *n == child.name)
            .ok_or_else(|| invalid(child, format!("unknown element <{}> in <data>", child.name)))?;
        if files[slot].is_some() {
            return Err(invalid(child, format!("<{}> given twice", child.name)));
        }
        let v = leaf_text(child)?;
        if v.is_empty() {
            return Err(invalid(child, format!("<{}> is empty", child.name)));
        }
        files[slot] = Some(resolve(base, v));
    }
    match files {
        [Some(file), None, None, Some(xml_file)] => Ok(DataSource::Single { file, xml_file }),
        [None, Some(train_file), Some(test_file), Some(xml_file)] => Ok(DataSource::Split {
            train_file,
            test_file,
            xml_file,
        }),
        _ => Err(invalid(
            el,
            "<data> needs <file> and <xmlFile>, or <trainFile>, <testFile> and <xmlFile>",
        )),
    }
}

fn report_config(el: &Element, base: &Path) -> Result<ReportConfig, ConfigError> {
    check_attributes(el, &["name"])?;
    let name = required_name(el)?;
    let bare = name.strip_prefix("miml.").unwrap_or(&name);
    if bare != CSV_REPORT {
        return Err(invalid(el, format!("unknown report '{name}'")));
    }
    let mut file_name = None;
    let mut measures = None;
    let mut per_label = false;
    for child in &el.children {
        match child.name.as_str() {
            "fileName" if file_name.is_none() => {
                let v = leaf_text(child)?;
                if v.is_empty() {
                    return Err(invalid(child, "<fileName> is empty"));
                }
                file_name = Some(resolve(base, v));
            }
            "measures" if measures.is_none() => {
                check_attributes(child, &["perLabel"])?;
                if let Some(v) = child.attr("perLabel") {
                    per_label = parse_bool(child, v)?;
                }
                let mut list = Vec::new();
                for m in &child.children {
                    if m.name != "measure" {
                        return Err(invalid(m, format!("unknown element <{}> in <measures>", m.name)));
                    }
                    let measure: Measure = leaf_text(m)?.parse().map_err(|e| invalid(m, format!("{e}")))?;
                    if list.contains(&measure) {
                        return Err(invalid(m, format!("measure '{measure}' listed twice")));
                    }
                    list.push(measure);
                }
                measures = Some(list);
            }
            "fileName" | "measures" => return Err(invalid(child, format!("<{}> given twice", child.name))),
            other => return Err(invalid(child, format!("unknown element <{other}> in <report>"))),
        }
    }
    Ok(ReportConfig {
        name: CSV_REPORT.to_string(),
        file_name: file_name.ok_or_else(|| invalid(el, "missing <fileName>"))?,
        measures: measures.unwrap_or_default(),
        per_label,
    })
}
