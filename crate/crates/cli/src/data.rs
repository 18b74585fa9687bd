use std::io::BufRead;
use std::path::Path;

use anyhow::{bail, Context};
use condprop::uefa::{load_ties, ties_to_sample, TieRecord, TIE_HEADER};
use condprop::Sample;

/// Loads ties, naming the file in row-level errors.
pub fn load_ties_from(path: &Path) -> anyhow::Result<Vec<TieRecord>> {
    load_ties(path).map_err(|e| match e {
        condprop::Error::Io { .. } => anyhow::Error::new(e),
        other => anyhow::Error::new(other).context(format!("invalid ties file {}", path.display())),
    })
}

/// Loads a regression sample from either a ties file (recognised by its
/// header) or a plain `x,y` file.
pub fn load_sample(path: &Path) -> anyhow::Result<Sample> {
    let file =
        std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut first = String::new();
    std::io::BufReader::new(file)
        .read_line(&mut first)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let header: Vec<&str> = first.trim().split(',').map(str::trim).collect();

    if header == TIE_HEADER {
        let ties = load_ties_from(path)?;
        return Ok(ties_to_sample(&ties)?);
    }
    if header != ["x", "y"] {
        bail!(
            "{}: expected a ties header ({}) or `x,y`",
            path.display(),
            TIE_HEADER.join(",")
        );
    }

    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let x: f64 = row
            .get(0)
            .unwrap_or("")
            .parse()
            .with_context(|| format!("{}:{line}: column x is not a number", path.display()))?;
        let y: f64 = row
            .get(1)
            .unwrap_or("")
            .parse()
            .with_context(|| format!("{}:{line}: column y is not a number", path.display()))?;
        xs.push(x);
        ys.push(y);
    }
    Ok(Sample::from_numeric(xs, &ys)?)
}
