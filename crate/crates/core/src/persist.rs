//! JSON files for surfaces, decorations and reports.
//!
//! Output is canonical: object keys are sorted, indentation is two spaces,
//! lines end in LF and the file ends with a newline. Floats are written in
//! the shortest decimal form that parses back to the same `f64`, so a save
//! followed by a load is exact.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decor::{CornerDecoration, DecorError, DecorationParams};
use crate::surface::{FaceColor, Family, Side, SurfaceError, Triangulation};

pub const FORMAT_VERSION: u32 = 1;
pub const SURFACE_FORMAT: &str = "horopack-surface";
pub const REPORT_FORMAT: &str = "horopack-report";

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("expected format {expected:?}, found {found:?}")]
    Format { expected: String, found: String },
    #[error("unsupported format version {found} (this library writes {expected})")]
    Version { found: u32, expected: u32 },
    #[error("expected report kind {expected:?}, found {found:?}")]
    Kind { expected: String, found: String },
    #[error("{0}")]
    Surface(#[from] SurfaceError),
    #[error("corner_areas has {found} entries for {expected} triangles")]
    AreaCount { expected: usize, found: usize },
    #[error("triangle {triangle}, corner {corner}: area {value} is not positive")]
    NonPositiveArea {
        triangle: usize,
        corner: usize,
        value: f64,
    },
    #[error("edge {edge}: side index {index} is out of range")]
    BadSideIndex { edge: usize, index: usize },
    #[error("params: {0}")]
    Params(DecorError),
    #[error("cannot serialize: {0}")]
    Serialize(String),
}

impl PersistError {
    /// True for failures to read or write the file itself.
    pub fn is_io(&self) -> bool {
        matches!(self, PersistError::Read { .. } | PersistError::Write { .. })
    }
}

/// On-disk form of a triangulated surface with an optional decoration.
///
/// Edges are stored as `[[t, k], [t', k']]` side pairs. They can be derived
/// from the triangle list but are kept so hand edits get cross-checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub format: String,
    pub version: u32,
    pub vertex_count: usize,
    pub triangles: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corner_areas: Option<Vec<[f64; 3]>>,
    pub edges: Vec<[[usize; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<FaceColor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<DecorationParams>,
}

/// A validated surface as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSurface {
    pub triangulation: Triangulation,
    pub decoration: Option<CornerDecoration>,
    pub params: Option<DecorationParams>,
}

impl SurfaceFile {
    pub fn new(
        t: &Triangulation,
        dec: Option<&CornerDecoration>,
        params: Option<&DecorationParams>,
    ) -> SurfaceFile {
        let colored = t.colors().iter().any(|c| *c != FaceColor::Uncolored);
        SurfaceFile {
            format: SURFACE_FORMAT.to_string(),
            version: FORMAT_VERSION,
            vertex_count: t.vertex_count(),
            triangles: t.triangles().to_vec(),
            corner_areas: dec.map(|d| d.areas().to_vec()),
            edges: t
                .edges()
                .iter()
                .map(|[a, b]| [[a.triangle, a.index], [b.triangle, b.index]])
                .collect(),
            colors: colored.then(|| t.colors().to_vec()),
            family: t.family().cloned(),
            params: params.cloned(),
        }
    }

    /// Checks every invariant and builds the in-memory structures.
    pub fn into_surface(self) -> Result<LoadedSurface, PersistError> {
        check_header(&self.format, SURFACE_FORMAT, self.version)?;
        let mut edges = Vec::with_capacity(self.edges.len());
        for (e, pair) in self.edges.iter().enumerate() {
            let mut sides = [Side {
                triangle: 0,
                index: 0,
            }; 2];
            for (slot, &[triangle, index]) in sides.iter_mut().zip(pair) {
                if index > 2 {
                    return Err(PersistError::BadSideIndex { edge: e, index });
                }
                *slot = Side { triangle, index };
            }
            edges.push(sides);
        }
        let f = self.triangles.len();
        let mut t = Triangulation::from_gluing(self.vertex_count, self.triangles, edges)?;
        if self.colors.is_some() || self.family.is_some() {
            let colors = self.colors.unwrap_or_else(|| vec![FaceColor::Uncolored; f]);
            t = t.with_metadata(colors, self.family)?;
        }
        let decoration = match self.corner_areas {
            None => None,
            Some(areas) => {
                if areas.len() != f {
                    return Err(PersistError::AreaCount {
                        expected: f,
                        found: areas.len(),
                    });
                }
                for (triangle, row) in areas.iter().enumerate() {
                    for (corner, &value) in row.iter().enumerate() {
                        if !(value.is_finite() && value > 0.0) {
                            return Err(PersistError::NonPositiveArea {
                                triangle,
                                corner,
                                value,
                            });
                        }
                    }
                }
                Some(CornerDecoration::new(areas).map_err(PersistError::Params)?)
            }
        };
        if let Some(p) = &self.params {
            DecorationParams::new(p.c.clone()).map_err(PersistError::Params)?;
            if p.m as usize != p.c.len() {
                return Err(PersistError::Params(DecorError::InvalidParams(format!(
                    "m = {} but {} c values",
                    p.m,
                    p.c.len()
                ))));
            }
        }
        Ok(LoadedSurface {
            triangulation: t,
            decoration,
            params: self.params,
        })
    }
}

fn check_header(found: &str, expected: &str, version: u32) -> Result<(), PersistError> {
    if found != expected {
        return Err(PersistError::Format {
            expected: expected.into(),
            found: found.into(),
        });
    }
    if version != FORMAT_VERSION {
        return Err(PersistError::Version {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    Ok(())
}

fn schema_error(e: serde_json::Error) -> PersistError {
    PersistError::Schema {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Canonical JSON text for any serializable value.
///
/// Going through `serde_json::Value` sorts object keys, so the result only
/// depends on the data.
pub fn canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String, PersistError> {
    let v = serde_json::to_value(value).map_err(|e| PersistError::Serialize(e.to_string()))?;
    let mut s =
        serde_json::to_string_pretty(&v).map_err(|e| PersistError::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn surface_to_string(
    t: &Triangulation,
    dec: Option<&CornerDecoration>,
    params: Option<&DecorationParams>,
) -> Result<String, PersistError> {
    canonical_json(&SurfaceFile::new(t, dec, params))
}

pub fn surface_from_str(text: &str) -> Result<LoadedSurface, PersistError> {
    let file: SurfaceFile = serde_json::from_str(text).map_err(schema_error)?;
    file.into_surface()
}

pub fn save_surface(
    t: &Triangulation,
    dec: Option<&CornerDecoration>,
    params: Option<&DecorationParams>,
    path: impl AsRef<Path>,
) -> Result<(), PersistError> {
    let text = surface_to_string(t, dec, params)?;
    write_file(path.as_ref(), &text)
}

pub fn load_surface(path: impl AsRef<Path>) -> Result<LoadedSurface, PersistError> {
    surface_from_str(&read_file(path.as_ref())?)
}

/// Versioned wrapper around a report body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile<T> {
    pub format: String,
    pub version: u32,
    pub kind: String,
    pub report: T,
}

impl<T> ReportFile<T> {
    pub fn new(kind: &str, report: T) -> Self {
        ReportFile {
            format: REPORT_FORMAT.to_string(),
            version: FORMAT_VERSION,
            kind: kind.to_string(),
            report,
        }
    }
}

pub fn report_to_string<T: Serialize>(kind: &str, report: &T) -> Result<String, PersistError> {
    canonical_json(&ReportFile::new(kind, report))
}

pub fn report_from_str<T: DeserializeOwned>(kind: &str, text: &str) -> Result<T, PersistError> {
    let file: ReportFile<T> = serde_json::from_str(text).map_err(schema_error)?;
    check_header(&file.format, REPORT_FORMAT, file.version)?;
    if file.kind != kind {
        return Err(PersistError::Kind {
            expected: kind.into(),
            found: file.kind,
        });
    }
    Ok(file.report)
}

pub fn save_report<T: Serialize>(
    kind: &str,
    report: &T,
    path: impl AsRef<Path>,
) -> Result<(), PersistError> {
    write_file(path.as_ref(), &report_to_string(kind, report)?)
}

pub fn load_report<T: DeserializeOwned>(
    kind: &str,
    path: impl AsRef<Path>,
) -> Result<T, PersistError> {
    report_from_str(kind, &read_file(path.as_ref())?)
}

fn read_file(path: &Path) -> Result<String, PersistError> {
    fs::read_to_string(path).map_err(|source| PersistError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), PersistError> {
    fs::write(path, text).map_err(|source| PersistError::Write {
        path: path.to_path_buf(),
        source,
    })
}
