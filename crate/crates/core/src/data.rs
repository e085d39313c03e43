//! Datasets: the four builtin lifetime samples and plain-text/CSV loading.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataSource {
    Builtin,
    File,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub values: Vec<f64>,
    pub source: DataSource,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.values.len()
    }
}

/// Ids of the builtin datasets.
pub const BUILTIN_IDS: [&str; 4] = ["nicotine", "carbon100", "carbon66", "turbocharger"];

fn builtin_text(id: &str) -> Option<&'static str> {
    match id {
        // nicotine content (mg) of 346 cigarette brands
        "nicotine" => Some(include_str!("../data/nicotine.txt")),
        // breaking stress of carbon fibres (GPa), 100 observations
        "carbon100" => Some(include_str!("../data/carbon100.txt")),
        // breaking stress of carbon fibres (GPa), 66 observations
        "carbon66" => Some(include_str!("../data/carbon66.txt")),
        // time to failure of turbochargers (10³ h)
        "turbocharger" => Some(include_str!("../data/turbocharger.txt")),
        _ => None,
    }
}

/// The raw embedded text of a builtin dataset, one value per line.
pub fn builtin_source(id: &str) -> Result<&'static str> {
    builtin_text(id).ok_or_else(|| Error::UnknownDataset(id.to_string()))
}

pub fn builtin_dataset(id: &str) -> Result<Dataset> {
    let text = builtin_source(id)?;
    let mut d = parse_dataset(text, id, &LoadOptions::default())?;
    d.source = DataSource::Builtin;
    Ok(d)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LoadOptions {
    /// Zero-based column index.
    pub column: usize,
    /// Field separator; `None` splits on commas if present, else whitespace.
    pub delimiter: Option<char>,
}

/// Parses one-value-per-row text. Blank lines and lines starting with `#`
/// are skipped; a non-numeric first row is taken as a header.
pub fn parse_dataset(text: &str, name: &str, opts: &LoadOptions) -> Result<Dataset> {
    let mut values = Vec::new();
    let mut first_row = true;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = match opts.delimiter {
            Some(d) => line.split(d).map(str::trim).collect(),
            None if line.contains(',') => line.split(',').map(str::trim).collect(),
            None => line.split_whitespace().collect(),
        };
        let is_header = first_row && fields.iter().all(|f| f.parse::<f64>().is_err());
        first_row = false;
        if is_header {
            continue;
        }
        let field = fields.get(opts.column).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("row has no column {}", opts.column),
        })?;
        let value: f64 = field.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("`{field}` is not a number"),
        })?;
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("value {value} is not strictly positive"),
            });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(Dataset {
        name: name.to_string(),
        values,
        source: DataSource::File,
    })
}

pub fn load_dataset(path: &Path, opts: &LoadOptions) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_dataset(&text, &name, opts)
}

/// Resolves `builtin:<id>` or a file path.
pub fn resolve(source: &str, opts: &LoadOptions) -> Result<Dataset> {
    match source.strip_prefix("builtin:") {
        Some(id) => builtin_dataset(id),
        None => load_dataset(Path::new(source), opts),
    }
}

/// Writes one value per line in shortest round-trip decimal form.
pub fn save(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(dataset.values.len() * 8);
    for v in &dataset.values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines() {
        let d = parse_dataset("1.0\n2.5\n# comment\n\n3.0", "x", &LoadOptions::default()).unwrap();
        assert_eq!(d.values, vec![1.0, 2.5, 3.0]);
    }

    #[test]
    fn negative_value_names_its_row() {
        let err = parse_dataset("1.0\n-1.0\n", "x", &LoadOptions::default()).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                message: "value -1 is not strictly positive".into()
            }
        );
    }

    #[test]
    fn csv_column_with_header() {
        let opts = LoadOptions {
            column: 1,
            delimiter: None,
        };
        let d = parse_dataset("t,y\n1,0.5\n2,0.7", "x", &opts).unwrap();
        assert_eq!(d.values, vec![0.5, 0.7]);
    }

    #[test]
    fn empty_and_garbage() {
        assert_eq!(
            parse_dataset("# nothing\n", "x", &LoadOptions::default()),
            Err(Error::EmptyDataset)
        );
        assert!(matches!(
            parse_dataset("1\nabc\n", "x", &LoadOptions::default()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            builtin_dataset("nope"),
            Err(Error::UnknownDataset(_))
        ));
    }

    #[test]
    fn builtin_shapes() {
        let t = builtin_dataset("turbocharger").unwrap();
        assert_eq!(t.n(), 40);
        let min = t.values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = t.values.iter().copied().fold(0.0, f64::max);
        assert_eq!((min, max), (1.6, 9.0));
        let c = builtin_dataset("carbon100").unwrap();
        assert_eq!(c.n(), 100);
        assert!(c.values.contains(&0.39) && c.values.contains(&5.56));
        assert_eq!(builtin_dataset("nicotine").unwrap().n(), 346);
        assert_eq!(builtin_dataset("carbon66").unwrap().n(), 66);
    }
}
