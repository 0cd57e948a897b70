//! Atomic CSV/JSON writers with metadata sidecars.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Library modules listed in every sidecar.
pub const MODULES: [&str; 8] = [
    "geometry",
    "coefficients",
    "spectral",
    "field",
    "almgren",
    "fourier",
    "logexample",
    "cli",
];

/// Run-level metadata copied into every sidecar.
#[derive(Clone, Debug, Serialize)]
pub struct RunMeta {
    pub command: String,
    /// SHA-256 of the canonical JSON form of the effective configuration.
    pub config_hash: String,
    pub seed: u64,
    pub versions: BTreeMap<String, String>,
}

impl RunMeta {
    pub fn new(command: &str, config_hash: String, seed: u64) -> Self {
        let v = env!("CARGO_PKG_VERSION").to_string();
        let mut versions: BTreeMap<String, String> =
            MODULES.iter().map(|m| (m.to_string(), v.clone())).collect();
        versions.insert("corner-lens".into(), v);
        RunMeta {
            command: command.into(),
            config_hash,
            seed,
            versions,
        }
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    file: &'a str,
    #[serde(flatten)]
    meta: &'a RunMeta,
    tolerances: &'a BTreeMap<String, f64>,
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::Config("invalid output name".into()))?;
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// A cell of a CSV row.
#[derive(Clone, Debug)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::S(v.to_string())
    }
}

/// Output directory of one run.
pub struct OutputDir {
    pub dir: PathBuf,
    pub meta: RunMeta,
    /// Significant digits for floats; `None` keeps the shortest exact form.
    pub precision: Option<usize>,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(dir: &Path, meta: RunMeta, precision: Option<usize>) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            meta,
            precision,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn format(&self, c: &Cell) -> String {
        match c {
            Cell::F(v) => match self.precision {
                Some(p) => format!("{:.*e}", p.saturating_sub(1), v),
                None => format!("{v:e}"),
            },
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    fn sidecar(&mut self, name: &str, tol: &BTreeMap<String, f64>) -> Result<()> {
        let car = Sidecar {
            file: name,
            meta: &self.meta,
            tolerances: tol,
        };
        let path = self.dir.join(format!("{name}.meta.json"));
        atomic_write(&path, &to_json(&car)?)?;
        self.written.push(path);
        Ok(())
    }

    /// Writes `name` as CSV with a fixed header, plus its sidecar.
    pub fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<Cell>],
        tol: &BTreeMap<String, f64>,
    ) -> Result<PathBuf> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(header).map_err(io)?;
        for row in rows {
            if row.len() != header.len() {
                return Err(Error::Numerical(format!(
                    "{name}: row of width {} under {} columns",
                    row.len(),
                    header.len()
                )));
            }
            w.write_record(row.iter().map(|c| self.format(c)))
                .map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        let path = self.dir.join(name);
        atomic_write(&path, &bytes)?;
        self.written.push(path.clone());
        self.sidecar(name, tol)?;
        Ok(path)
    }

    /// Writes preformatted bytes plus their sidecar.
    pub fn raw(
        &mut self,
        name: &str,
        bytes: &[u8],
        tol: &BTreeMap<String, f64>,
    ) -> Result<PathBuf> {
        let path = self.dir.join(name);
        atomic_write(&path, bytes)?;
        self.written.push(path.clone());
        self.sidecar(name, tol)?;
        Ok(path)
    }

    /// Writes a pretty-printed JSON document plus its sidecar.
    pub fn json<T: Serialize>(
        &mut self,
        name: &str,
        value: &T,
        tol: &BTreeMap<String, f64>,
    ) -> Result<PathBuf> {
        let path = self.dir.join(name);
        atomic_write(&path, &to_json(value)?)?;
        self.written.push(path.clone());
        self.sidecar(name, tol)?;
        Ok(path)
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v)
        .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))?;
    b.push(b'\n');
    Ok(b)
}

/// Builds a tolerance table from name/value pairs.
pub fn tolerances(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_sidecar_land_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let mut out =
            OutputDir::create(dir.path(), RunMeta::new("t", "abc".into(), 7), None).unwrap();
        let tol = tolerances(&[("x", 1e-8)]);
        out.csv(
            "a.csv",
            &["r", "v"],
            &[vec![0.5.into(), 1usize.into()]],
            &tol,
        )
        .unwrap();
        let body = fs::read_to_string(dir.path().join("a.csv")).unwrap();
        assert_eq!(body, "r,v\n5e-1,1\n");
        let meta: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join("a.csv.meta.json")).unwrap()).unwrap();
        assert_eq!(meta["config_hash"], "abc");
        assert_eq!(meta["seed"], 7);
        assert_eq!(meta["tolerances"]["x"], 1e-8);
        let leftovers: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .filter(|e| {
                e.as_ref()
                    .unwrap()
                    .file_name()
                    .to_string_lossy()
                    .starts_with('.')
            })
            .collect();
        assert!(leftovers.is_empty());
    }
}
