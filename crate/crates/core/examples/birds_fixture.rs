//! Writes the synthetic birds-like dataset: `birds_fixture <arff> <xml> [seed]`.

use std::path::Path;

use miml_core::data::write_dataset;
use miml_core::synthetic::{generate, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [arff, xml, rest @ ..] = args.as_slice() else {
        return Err("usage: birds_fixture <arff> <xml> [seed]".into());
    };
    let seed = rest.first().map_or(Ok(1), |s| s.parse())?;
    let ds = generate(&SyntheticSpec::birds_like(seed));
    write_dataset(&ds, Path::new(arff), Path::new(xml))?;
    Ok(())
}
