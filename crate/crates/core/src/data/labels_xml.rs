//! Label-list sidecar: `<labels>` with one `<label name="..."/>` per column.

use crate::xml;

use super::DataError;

pub fn parse_labels_xml(text: &str, file: &str) -> Result<Vec<String>, DataError> {
    let root = xml::parse(text).map_err(|e| DataError::Syntax {
        file: file.to_string(),
        line: e.line,
        column: e.column,
        message: e.message,
    })?;
    if root.name != "labels" {
        return Err(DataError::schema(format!(
            "{file}: root element must be <labels>, found <{}>",
            root.name
        )));
    }
    let mut names = Vec::with_capacity(root.children.len());
    for child in &root.children {
        if child.name != "label" {
            return Err(DataError::schema(format!(
                "{file}:{}: unexpected element <{}> in <labels>",
                child.pos.line, child.name
            )));
        }
        if !child.children.is_empty() {
            return Err(DataError::schema(format!(
                "{file}:{}: hierarchical labels are not supported",
                child.pos.line
            )));
        }
        match child.attr("name") {
            Some(n) if !n.is_empty() => {
                if names.iter().any(|x| x == n) {
                    return Err(DataError::schema(format!("{file}: duplicate label '{n}'")));
                }
                names.push(n.to_string());
            }
            _ => {
                return Err(DataError::schema(format!(
                    "{file}:{}: <label> needs a non-empty name attribute",
                    child.pos.line
                )))
            }
        }
    }
    Ok(names)
}

pub fn labels_xml_string(names: &[String]) -> String {
    let mut out = String::from(
        "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<labels xmlns=\"http://mulan.sourceforge.net/labels\">\n",
    );
    for n in names {
        out.push_str(&format!("  <label name=\"{}\"></label>\n", xml::escape(n)));
    }
    out.push_str("</labels>\n");
    out
}
