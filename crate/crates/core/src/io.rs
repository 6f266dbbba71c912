//! JSON measure files.
//!
//! ```json
//! {"dim": 2, "s": 1.0, "resolution": 0.01, "nonneg": true,
//!  "atoms": [{"x": [0.0, 0.0], "w": 0.01}, {"x": [1.0, 0.0], "w": [0.0, 1.0]}]}
//! ```
//!
//! A weight written as a single number is real; `[re, im]` is complex. Atom order is kept,
//! and floats are written in shortest round-trip form so save followed by load reproduces
//! every coordinate bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Atom, DiscreteMeasure};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    dim: i64,
    s: f64,
    resolution: f64,
    #[serde(default)]
    nonneg: bool,
    atoms: Vec<AtomFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomFile {
    x: Vec<f64>,
    w: WeightFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum WeightFile {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Complex64> for WeightFile {
    fn from(w: Complex64) -> Self {
        if w.im.to_bits() == 0 {
            WeightFile::Real(w.re)
        } else {
            WeightFile::Complex([w.re, w.im])
        }
    }
}

impl From<&WeightFile> for Complex64 {
    fn from(w: &WeightFile) -> Self {
        match *w {
            WeightFile::Real(re) => Complex64::new(re, 0.0),
            WeightFile::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Parses a measure from JSON text. `origin` names the source in error messages.
pub fn parse_measure(text: &str, origin: &Path) -> Result<DiscreteMeasure> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: MeasureFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse {
            path: origin.to_path_buf(),
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })?;
    if file.dim < 1 {
        return Err(Error::input(format!(
            "{}: dim = {} must be at least 1",
            origin.display(),
            file.dim
        )));
    }
    let dim = file.dim as usize;
    for (i, a) in file.atoms.iter().enumerate() {
        if a.x.len() != dim {
            return Err(Error::input(format!(
                "{}: atom {i} has {} coordinates but dim = {dim}",
                origin.display(),
                a.x.len()
            )));
        }
    }
    let atoms = file
        .atoms
        .iter()
        .map(|a| Atom::new(a.x.clone(), Complex64::from(&a.w)))
        .collect();
    DiscreteMeasure::new(dim, file.s, file.resolution, file.nonneg, atoms)
}

pub fn measure_to_json(m: &DiscreteMeasure) -> String {
    let file = MeasureFile {
        dim: m.dim() as i64,
        s: m.s(),
        resolution: m.resolution(),
        nonneg: m.is_nonneg(),
        atoms: m
            .atoms()
            .iter()
            .map(|a| AtomFile {
                x: a.position.clone(),
                w: a.weight.into(),
            })
            .collect(),
    };
    serde_json::to_string(&file).expect("measure serialisation cannot fail")
}

pub fn load_measure(path: impl AsRef<Path>) -> Result<DiscreteMeasure> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_measure(&text, path)
}

pub fn save_measure(m: &DiscreteMeasure, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), measure_to_json(m).as_bytes())
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::input(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_weight_accepted() {
        let text = r#"{"dim": 2, "s": 1.0, "resolution": 0.1, "atoms": [{"x": [0.0, 1.0], "w": [0.0, 1.0]}, {"x": [1.0, 1.0], "w": 0.5}]}"#;
        let m = parse_measure(text, Path::new("inline")).unwrap();
        assert_eq!(m.atoms()[0].weight, Complex64::new(0.0, 1.0));
        assert_eq!(m.atoms()[1].weight, Complex64::new(0.5, 0.0));
        assert!(!m.is_nonneg());
    }

    #[test]
    fn negative_dim_rejected() {
        let text = r#"{"dim": -2, "s": 1.0, "resolution": 0.1, "atoms": []}"#;
        assert!(matches!(
            parse_measure(text, Path::new("inline")),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let text = r#"{"dim": 2, "s": 1.0, "resolution": 0.1, "atoms": [{"x": [0.0], "w": 1.0}]}"#;
        assert!(matches!(
            parse_measure(text, Path::new("inline")),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn malformed_file_reports_location() {
        let text = "{\"dim\": 2, \"s\": 1.0, \"resolution\": 0.1,\n \"atoms\": [{\"x\": [0.0, \"a\"], \"w\": 1.0}]}";
        match parse_measure(text, Path::new("bad.json")) {
            Err(Error::Parse { line, field, .. }) => {
                assert_eq!(line, 2);
                assert!(field.starts_with("atoms[0].x"), "field = {field}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
