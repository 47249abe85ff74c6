//! Relational ARFF: one row per bag, the bag's instances packed into a single
//! quoted field with instances separated by `\n` and values by commas.
//!
//! ```text
//! @relation birds
//! @attribute id {b1,b2}
//! @attribute bag relational
//!   @attribute f1 numeric
//!   @attribute f2 numeric
//! @end bag
//! @attribute song {0,1}
//! @attribute call {0,1}
//! @data
//! b1,"0.5,1.0\n0.7,1.2",1,0
//! ```
//!
//! Layout is fixed: bag id first, relational block second, labels after.
//! Label columns are reordered to the order of the XML sidecar.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::labels_xml::{labels_xml_string, parse_labels_xml};
use super::{AttributeSchema, Bag, DataError, LabelMatrix, MimlDataset};

/// Reads a dataset from an ARFF file and its label-list XML sidecar.
pub fn parse_dataset(arff_path: &Path, labels_xml_path: &Path) -> Result<MimlDataset, DataError> {
    let arff = read(arff_path)?;
    let xml = read(labels_xml_path)?;
    let label_names = parse_labels_xml(&xml, &labels_xml_path.display().to_string())?;
    parse_arff(&arff, &arff_path.display().to_string(), &label_names)
}

/// In-memory variant of [`parse_dataset`].
pub fn parse_dataset_str(arff: &str, labels_xml: &str) -> Result<MimlDataset, DataError> {
    let label_names = parse_labels_xml(labels_xml, "<labels>")?;
    parse_arff(arff, "<arff>", &label_names)
}

/// Writes `ds` as an ARFF file plus label XML. Feature values use the
/// shortest decimal form that parses back to the identical `f64`.
pub fn write_dataset(ds: &MimlDataset, arff_path: &Path, labels_xml_path: &Path) -> Result<(), DataError> {
    write(arff_path, &to_arff_string(ds))?;
    write(labels_xml_path, &labels_xml_string(ds.labels().names()))
}

fn read(path: &Path) -> Result<String, DataError> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(s.strip_prefix('\u{feff}').map(str::to_string).unwrap_or(s)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(DataError::FileNotFound {
            path: path.to_path_buf(),
        }),
        Err(source) => Err(DataError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), DataError> {
    fs::write(path, contents).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn to_arff_string(ds: &MimlDataset) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}\n", quote(ds.relation()));
    let ids: Vec<String> = ds.bags().iter().map(|b| quote(b.id())).collect();
    let _ = writeln!(out, "@attribute {} {{{}}}", quote(ds.bag_id_attribute()), ids.join(","));
    let rel = quote(ds.relational_attribute());
    let _ = writeln!(out, "@attribute {rel} relational");
    for f in ds.schema().names() {
        let _ = writeln!(out, "  @attribute {} numeric", quote(f));
    }
    let _ = writeln!(out, "@end {rel}");
    for l in ds.labels().names() {
        let _ = writeln!(out, "@attribute {} {{0,1}}", quote(l));
    }
    out.push_str("\n@data\n");
    for (bag, labels) in ds.bags().iter().zip(ds.labels().rows()) {
        out.push_str(&quote(bag.id()));
        out.push_str(",\"");
        for (i, inst) in bag.instances().enumerate() {
            if i > 0 {
                out.push_str("\\n");
            }
            for (j, v) in inst.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v:?}");
            }
        }
        out.push('"');
        for &l in labels {
            out.push_str(if l { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    out
}

fn needs_quoting(s: &str) -> bool {
    s.is_empty()
        || s.starts_with('@')
        || s.chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '\'' | '"' | '%' | '\\'))
}

fn quote(s: &str) -> String {
    if !needs_quoting(s) {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\'' => out.push_str("\\'"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Numeric,
    Nominal(Vec<String>),
    Text,
    Date,
    Relational(Vec<Attr>),
}

#[derive(Debug, Clone, PartialEq)]
struct Attr {
    name: String,
    kind: Kind,
    line: usize,
}

#[derive(Debug)]
enum Token {
    Word { text: String, quoted: bool },
    List(Vec<String>),
}

/// Character cursor over one line, tracking 1-based columns.
struct Cursor<'a> {
    file: &'a str,
    line: usize,
    chars: Vec<char>,
    at: usize,
}

impl<'a> Cursor<'a> {
    fn new(file: &'a str, line: usize, text: &str) -> Self {
        Self {
            file,
            line,
            chars: text.chars().collect(),
            at: 0,
        }
    }

    fn column(&self) -> usize {
        self.at + 1
    }

    fn syntax(&self, column: usize, message: impl Into<String>) -> DataError {
        DataError::Syntax {
            file: self.file.to_string(),
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.at += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.at >= self.chars.len()
    }

    /// Reads a quoted string starting at the opening quote.
    fn quoted(&mut self) -> Result<String, DataError> {
        let start = self.column();
        let q = self.chars[self.at];
        self.at += 1;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.syntax(start, "unterminated quoted string")),
                Some(c) if c == q => {
                    self.at += 1;
                    return Ok(out);
                }
                Some('\\') => {
                    self.at += 1;
                    match self.peek() {
                        Some('n') => out.push('\n'),
                        Some('r') => out.push('\r'),
                        Some('t') => out.push('\t'),
                        Some(c @ ('\\' | '\'' | '"')) => out.push(c),
                        Some(c) => {
                            out.push('\\');
                            out.push(c);
                        }
                        None => return Err(self.syntax(start, "unterminated quoted string")),
                    }
                    self.at += 1;
                }
                Some(c) => {
                    out.push(c);
                    self.at += 1;
                }
            }
        }
    }

    fn token(&mut self) -> Result<Option<(Token, usize)>, DataError> {
        if self.at_end() {
            return Ok(None);
        }
        let col = self.column();
        match self.chars[self.at] {
            '\'' | '"' => Ok(Some((
                Token::Word {
                    text: self.quoted()?,
                    quoted: true,
                },
                col,
            ))),
            '{' => {
                self.at += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(self.syntax(col, "unterminated '{' list")),
                        Some('}') if items.is_empty() => {
                            self.at += 1;
                            break;
                        }
                        Some('\'' | '"') => items.push(self.quoted()?),
                        Some(_) => {
                            let mut s = String::new();
                            while let Some(c) = self.peek() {
                                if c == ',' || c == '}' {
                                    break;
                                }
                                s.push(c);
                                self.at += 1;
                            }
                            items.push(s.trim().to_string());
                        }
                    }
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.at += 1,
                        Some('}') => {
                            self.at += 1;
                            break;
                        }
                        _ => return Err(self.syntax(self.column(), "expected ',' or '}' in list")),
                    }
                }
                Ok(Some((Token::List(items), col)))
            }
            _ => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '{' {
                        break;
                    }
                    s.push(c);
                    self.at += 1;
                }
                Ok(Some((Token::Word { text: s, quoted: false }, col)))
            }
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, usize), DataError> {
        match self.token()? {
            Some((Token::Word { text, .. }, col)) => Ok((text, col)),
            Some((Token::List(_), col)) => Err(self.syntax(col, format!("expected {what}, found a list"))),
            None => Err(self.syntax(self.column(), format!("expected {what}"))),
        }
    }

    fn expect_end(&mut self) -> Result<(), DataError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.syntax(self.column(), "unexpected trailing text"))
        }
    }

    /// Splits a data row into `(value, column)` fields at top-level commas.
    fn fields(&mut self) -> Result<Vec<(String, usize)>, DataError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let col = self.column();
            let value = match self.peek() {
                Some('\'' | '"') => {
                    let v = self.quoted()?;
                    self.skip_ws();
                    v
                }
                _ => {
                    let mut s = String::new();
                    while let Some(c) = self.peek() {
                        if c == ',' {
                            break;
                        }
                        if c == '\'' || c == '"' {
                            return Err(self.syntax(self.column(), "quote inside an unquoted value"));
                        }
                        s.push(c);
                        self.at += 1;
                    }
                    s.trim().to_string()
                }
            };
            out.push((value, col));
            match self.peek() {
                Some(',') => self.at += 1,
                None => return Ok(out),
                Some(_) => return Err(self.syntax(self.column(), "expected ',' between values")),
            }
        }
    }
}

struct Header {
    relation: String,
    attrs: Vec<Attr>,
}

fn parse_arff(text: &str, file: &str, label_names: &[String]) -> Result<MimlDataset, DataError> {
    let mut relation: Option<String> = None;
    let mut attrs: Vec<Attr> = Vec::new();
    let mut open: Option<(String, Vec<Attr>, usize)> = None;
    let mut lines = text.lines().enumerate();
    let mut header = None;

    for (idx, raw) in lines.by_ref() {
        let line_no = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut cur = Cursor::new(file, line_no, raw);
        let (keyword, kcol) = cur.word("a keyword")?;
        let keyword = keyword.to_ascii_lowercase();
        match keyword.as_str() {
            "@relation" => {
                if relation.is_some() {
                    return Err(cur.syntax(kcol, "duplicate @relation"));
                }
                let (name, _) = cur.word("relation name")?;
                cur.expect_end()?;
                relation = Some(name);
            }
            "@attribute" => {
                if relation.is_none() {
                    return Err(cur.syntax(kcol, "@attribute before @relation"));
                }
                let (name, _) = cur.word("attribute name")?;
                let (kind, tcol) = match cur.token()? {
                    Some((Token::List(items), col)) => (Kind::Nominal(items), col),
                    Some((Token::Word { text, quoted: false }, col)) => {
                        let kind = match text.to_ascii_lowercase().as_str() {
                            "numeric" | "real" | "integer" => Kind::Numeric,
                            "string" => Kind::Text,
                            "date" => Kind::Date,
                            "relational" => Kind::Relational(Vec::new()),
                            other => return Err(cur.syntax(col, format!("unknown attribute type '{other}'"))),
                        };
                        (kind, col)
                    }
                    Some((_, col)) => return Err(cur.syntax(col, "expected an attribute type")),
                    None => return Err(cur.syntax(cur.column(), "expected an attribute type")),
                };
                if kind == Kind::Date {
                    // optional date format; nothing else may follow
                    let _ = cur.token()?;
                }
                cur.expect_end()?;
                let attr = Attr {
                    name,
                    kind,
                    line: line_no,
                };
                match (&mut open, attr.kind == Kind::Relational(Vec::new())) {
                    (Some(_), true) => {
                        return Err(DataError::schema(format!(
                            "line {line_no}: nested relational attributes are not supported"
                        )))
                    }
                    (Some((_, inner, _)), false) => inner.push(attr),
                    (None, true) => open = Some((attr.name, Vec::new(), line_no)),
                    (None, false) => attrs.push(attr),
                }
                let _ = tcol;
            }
            "@end" => {
                let (name, ncol) = cur.word("relational attribute name")?;
                cur.expect_end()?;
                match open.take() {
                    Some((open_name, inner, line)) if open_name == name => attrs.push(Attr {
                        name,
                        kind: Kind::Relational(inner),
                        line,
                    }),
                    Some((open_name, ..)) => {
                        return Err(cur.syntax(ncol, format!("@end {name} does not close '{open_name}'")))
                    }
                    None => return Err(cur.syntax(kcol, "@end without an open relational attribute")),
                }
            }
            "@data" => {
                cur.expect_end()?;
                if let Some((name, _, line)) = open.take() {
                    return Err(DataError::Syntax {
                        file: file.to_string(),
                        line,
                        column: 1,
                        message: format!("relational attribute '{name}' is never closed"),
                    });
                }
                let Some(relation) = relation.take() else {
                    return Err(cur.syntax(kcol, "@data before @relation"));
                };
                header = Some(Header {
                    relation,
                    attrs: std::mem::take(&mut attrs),
                });
                break;
            }
            other => return Err(cur.syntax(kcol, format!("unexpected '{other}' in header"))),
        }
    }

    let Some(header) = header else {
        return Err(DataError::Syntax {
            file: file.to_string(),
            line: text.lines().count().max(1),
            column: 1,
            message: "missing @data section".into(),
        });
    };
    let layout = Layout::from_header(&header, label_names)?;

    let mut bags = Vec::new();
    let mut rows = Vec::new();
    let mut seen_ids = HashSet::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut cur = Cursor::new(file, line_no, raw);
        let fields = cur.fields()?;
        if fields.len() != header.attrs.len() {
            return Err(cur.syntax(
                1,
                format!("expected {} values, found {}", header.attrs.len(), fields.len()),
            ));
        }
        let (bag, labels) = layout.row(&fields, line_no)?;
        if !seen_ids.insert(bag.id().to_string()) {
            return Err(DataError::schema(format!(
                "line {line_no}: duplicate bag id '{}'",
                bag.id()
            )));
        }
        bags.push(bag);
        rows.push(labels);
    }
    if bags.is_empty() {
        return Err(DataError::schema("dataset has no bags"));
    }

    let schema = AttributeSchema::new(layout.features.clone())?;
    let labels = LabelMatrix::new(label_names.to_vec(), &rows)?;
    MimlDataset::with_attribute_names(
        header.relation,
        header.attrs[0].name.clone(),
        header.attrs[1].name.clone(),
        schema,
        bags,
        labels,
    )
}

enum LabelKind {
    Nominal,
    Numeric,
}

/// Validated column layout derived from the header.
struct Layout {
    bag_ids: Option<HashSet<String>>,
    features: Vec<String>,
    /// For each ARFF label column: (position in sidecar order, kind).
    label_columns: Vec<(usize, LabelKind)>,
}

impl Layout {
    fn from_header(header: &Header, label_names: &[String]) -> Result<Self, DataError> {
        let attrs = &header.attrs;
        let mut names = HashSet::new();
        for a in attrs {
            if !names.insert(a.name.as_str()) {
                return Err(DataError::schema(format!(
                    "line {}: duplicate attribute '{}'",
                    a.line, a.name
                )));
            }
        }
        let Some(first) = attrs.first() else {
            return Err(DataError::schema("header declares no attributes"));
        };
        let bag_ids = match &first.kind {
            Kind::Nominal(values) => Some(values.iter().cloned().collect()),
            Kind::Text => None,
            _ => {
                return Err(DataError::schema(format!(
                    "line {}: the first attribute '{}' must be the bag identifier (nominal or string)",
                    first.line, first.name
                )))
            }
        };
        let features = match attrs.get(1).map(|a| (a, &a.kind)) {
            Some((_, Kind::Relational(inner))) => {
                if inner.is_empty() {
                    return Err(DataError::schema("relational attribute declares no features"));
                }
                inner
                    .iter()
                    .map(|a| match &a.kind {
                        Kind::Numeric => Ok(a.name.clone()),
                        Kind::Nominal(_) => Err(DataError::schema(format!(
                            "line {}: nominal feature '{}' is not supported; features must be numeric",
                            a.line, a.name
                        ))),
                        _ => Err(DataError::schema(format!(
                            "line {}: feature '{}' must be numeric",
                            a.line, a.name
                        ))),
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            _ => {
                return Err(DataError::schema(
                    "the second attribute must be the relational block holding the instances",
                ))
            }
        };

        let position: HashMap<&str, usize> = label_names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut label_columns = Vec::new();
        for a in &attrs[2..] {
            let Some(&pos) = position.get(a.name.as_str()) else {
                return Err(DataError::schema(format!(
                    "line {}: attribute '{}' follows the relational block but is not a declared label",
                    a.line, a.name
                )));
            };
            let kind = match &a.kind {
                Kind::Nominal(values) => {
                    let set: HashSet<&str> = values.iter().map(String::as_str).collect();
                    if values.len() != 2 || set != HashSet::from(["0", "1"]) {
                        return Err(DataError::schema(format!(
                            "line {}: label '{}' must be declared {{0,1}}",
                            a.line, a.name
                        )));
                    }
                    LabelKind::Nominal
                }
                Kind::Numeric => LabelKind::Numeric,
                _ => {
                    return Err(DataError::schema(format!(
                        "line {}: label '{}' must be binary",
                        a.line, a.name
                    )))
                }
            };
            label_columns.push((pos, kind));
        }
        let present: HashSet<usize> = label_columns.iter().map(|(p, _)| *p).collect();
        if let Some(missing) = label_names.iter().enumerate().find(|(i, _)| !present.contains(i)) {
            return Err(DataError::schema(format!(
                "label '{}' named in the label file is missing from the ARFF header",
                missing.1
            )));
        }
        Ok(Self {
            bag_ids,
            features,
            label_columns,
        })
    }

    fn row(&self, fields: &[(String, usize)], line: usize) -> Result<(Bag, Vec<bool>), DataError> {
        let (id, _) = &fields[0];
        if id == "?" || id.is_empty() {
            return Err(DataError::schema(format!("line {line}: missing bag id")));
        }
        if let Some(ids) = &self.bag_ids {
            if !ids.contains(id) {
                return Err(DataError::schema(format!(
                    "line {line}: bag id '{id}' is not among the declared values"
                )));
            }
        }
        let d = self.features.len();
        let mut values = Vec::new();
        for inst in fields[1].0.split('\n').map(str::trim).filter(|s| !s.is_empty()) {
            let before = values.len();
            for v in inst.split(',').map(str::trim) {
                values.push(parse_feature(v, id, line)?);
            }
            if values.len() - before != d {
                return Err(DataError::schema(format!(
                    "line {line}: bag '{id}' has an instance with {} values, expected {d}",
                    values.len() - before
                )));
            }
        }
        if values.is_empty() {
            return Err(DataError::schema(format!("line {line}: bag '{id}' is empty")));
        }

        let mut labels = vec![false; self.label_columns.len()];
        for ((pos, kind), (v, col)) in self.label_columns.iter().zip(&fields[2..]) {
            labels[*pos] = match (v.as_str(), kind) {
                ("0", _) => false,
                ("1", _) => true,
                ("?", _) => {
                    return Err(DataError::schema(format!(
                        "line {line}, column {col}: missing label value"
                    )))
                }
                (other, LabelKind::Numeric) if other.parse::<f64>().is_ok_and(|x| x == 0.0 || x == 1.0) => {
                    other.parse::<f64>().unwrap() == 1.0
                }
                (other, _) => {
                    return Err(DataError::schema(format!(
                        "line {line}, column {col}: non-binary label value '{other}'"
                    )))
                }
            };
        }
        Ok((Bag::from_parts(id.clone(), d, values), labels))
    }
}

fn parse_feature(v: &str, id: &str, line: usize) -> Result<f64, DataError> {
    if v == "?" {
        return Err(DataError::schema(format!(
            "line {line}: bag '{id}' has a missing value; missing values are not supported"
        )));
    }
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        Ok(_) => Err(DataError::schema(format!(
            "line {line}: bag '{id}' holds non-finite value '{v}'"
        ))),
        Err(_) => Err(DataError::schema(format!(
            "line {line}: bag '{id}' holds non-numeric value '{v}'"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = r#"% toy dataset
@relation toy
@attribute id {a,b}
@attribute bag relational
  @attribute f1 numeric
  @attribute f2 numeric
@end bag
@attribute x {0,1}
@attribute y {0,1}
@data
a,"1.5,2\n3,4",1,0
b,"-1,0.25",0,1
"#;
    const LABELS: &str = r#"<?xml version="1.0" encoding="utf-8"?>
<labels xmlns="http://mulan.sourceforge.net/labels">
  <label name="x"></label>
  <label name="y"></label>
</labels>"#;

    fn parse(arff: &str) -> Result<MimlDataset, DataError> {
        parse_dataset_str(arff, LABELS)
    }

    #[test]
    fn toy_fixture_field_by_field() {
        let ds = parse(TOY).unwrap();
        assert_eq!(ds.relation(), "toy");
        assert_eq!(ds.num_bags(), 2);
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.num_labels(), 2);
        assert_eq!(ds.schema().names(), ["f1", "f2"]);
        assert_eq!(ds.bags()[0].id(), "a");
        assert_eq!(ds.bags()[0].len(), 2);
        assert_eq!(ds.bags()[0].values(), &[1.5, 2.0, 3.0, 4.0]);
        assert_eq!(ds.bags()[1].values(), &[-1.0, 0.25]);
        assert_eq!(ds.labels().row(0), &[true, false]);
        assert_eq!(ds.labels().row(1), &[false, true]);
        assert_eq!(ds.bag_id_attribute(), "id");
        assert_eq!(ds.relational_attribute(), "bag");
    }

    #[test]
    fn label_order_follows_sidecar() {
        let swapped = r#"<labels><label name="y"/><label name="x"/></labels>"#;
        let ds = parse_dataset_str(TOY, swapped).unwrap();
        assert_eq!(ds.labels().names(), ["y", "x"]);
        assert_eq!(ds.labels().row(0), &[false, true]);
    }

    #[test]
    fn case_insensitive_keywords_and_string_ids() {
        let text = TOY
            .replace("@attribute id {a,b}", "@ATTRIBUTE id STRING")
            .replace("@relation", "@RELATION")
            .replace("numeric", "REAL");
        let ds = parse(&text).unwrap();
        assert_eq!(ds.num_bags(), 2);
    }

    #[test]
    fn label_missing_from_header() {
        let xml = r#"<labels><label name="x"/><label name="y"/><label name="z"/></labels>"#;
        let err = parse_dataset_str(TOY, xml).unwrap_err();
        assert!(matches!(err, DataError::Schema(ref m) if m.contains("'z'")), "{err}");
    }

    #[test]
    fn undeclared_trailing_attribute() {
        let xml = r#"<labels><label name="x"/><label name="w"/></labels>"#;
        let text = TOY.replace("@attribute y {0,1}", "@attribute y {0,1}\n@attribute w {0,1}");
        let err =
            parse_dataset_str(&text.replace(",1,0\n", ",1,0,0\n").replace(",0,1\n", ",0,1,1\n"), xml).unwrap_err();
        assert!(matches!(err, DataError::Schema(ref m) if m.contains("'y'")), "{err}");
    }

    #[test]
    fn schema_errors() {
        let cases = [
            TOY.replace("@attribute f2 numeric", "@attribute f2 {u,v}"),
            TOY.replace("0.25", "?"),
            TOY.replace("0.25", "abc"),
            TOY.replace(",0,1\n", ",0,2\n"),
            TOY.replace("b,\"-1,0.25\"", "a,\"-1,0.25\""),
            TOY.replace("b,\"-1,0.25\"", "b,\"\""),
            TOY.replace("b,\"-1,0.25\"", "b,\"-1\""),
            TOY.replace("b,\"-1,0.25\"", "c,\"-1,0.25\""),
            TOY.replace("@attribute x {0,1}", "@attribute x {0,1,2}"),
        ];
        for text in cases {
            let err = parse(&text).unwrap_err();
            assert!(matches!(err, DataError::Schema(_)), "{text}\n=> {err}");
        }
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse(&TOY.replace("b,\"-1,0.25\"", "b,\"-1,0.25")).unwrap_err();
        match err {
            DataError::Syntax { line, column, .. } => {
                assert_eq!(line, 12);
                assert_eq!(column, 3);
            }
            other => panic!("{other}"),
        }
        let err = parse(&TOY.replace("@end bag", "@end other")).unwrap_err();
        assert!(matches!(err, DataError::Syntax { line: 7, .. }), "{err}");
        let err = parse(&TOY.replace("@data", "")).unwrap_err();
        assert!(matches!(err, DataError::Syntax { .. }), "{err}");
        let err = parse(&TOY.replace(",1,0\n", ",1\n")).unwrap_err();
        assert!(matches!(err, DataError::Syntax { line: 11, .. }), "{err}");
        let err = parse(&TOY.replace("numeric", "blob")).unwrap_err();
        assert!(
            matches!(
                err,
                DataError::Syntax {
                    line: 5,
                    column: 17,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn round_trip_with_awkward_names_and_values() {
        let schema = AttributeSchema::new(vec!["feature one".into(), "f,2".into()]).unwrap();
        let bags = vec![
            Bag::new("bag 'a'", 2, vec![1.0 / 3.0, -0.0, 1e-300, 6.02e23]).unwrap(),
            Bag::new("b\\c", 2, vec![f64::MAX, f64::MIN_POSITIVE]).unwrap(),
        ];
        let labels = LabelMatrix::new(
            vec!["label {1}".into(), "%two".into()],
            &[vec![true, true], vec![false, false]],
        )
        .unwrap();
        let ds = MimlDataset::with_attribute_names("rel name", "bag id", "@bag", schema, bags, labels).unwrap();
        let text = to_arff_string(&ds);
        let xml = labels_xml_string(ds.labels().names());
        let back = parse_dataset_str(&text, &xml).unwrap();
        assert_eq!(back, ds);
        assert_eq!(back.bags()[0].values()[0], 1.0 / 3.0);
    }

    #[test]
    fn files_round_trip_and_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let ds = parse(TOY).unwrap();
        let arff = dir.path().join("t.arff");
        let xml = dir.path().join("t.xml");
        write_dataset(&ds, &arff, &xml).unwrap();
        assert_eq!(parse_dataset(&arff, &xml).unwrap(), ds);
        assert!(matches!(
            parse_dataset(&dir.path().join("nope.arff"), &xml),
            Err(DataError::FileNotFound { .. })
        ));
        let bad = dir.path().join("missing_dir").join("x.arff");
        assert!(matches!(write_dataset(&ds, &bad, &xml), Err(DataError::Io { .. })));
    }
}
