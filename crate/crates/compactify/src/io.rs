//! Model files, family and function JSON, and CSV point clouds.
//!
//! A model file is the magic line `CPTF1` followed by the JSON form of a
//! [`CompactificationModel`]. CSV values are written with 17 significant
//! digits so they parse back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use compactify_core::{CompactificationModel, FunctionDescriptor, FunctionFamily, ProductPoint};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub const MODEL_MAGIC: &[u8] = b"CPTF1\n";

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: not a model file (missing CPTF1 header)")]
    BadMagic { path: PathBuf },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn json_err(path: &Path) -> impl FnOnce(serde_json::Error) -> IoError + '_ {
    move |source| IoError::Json {
        path: path.to_path_buf(),
        source,
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    serde_json::from_slice(&bytes).map_err(json_err(path))
}

/// Reads a family given as a JSON array of descriptors.
pub fn read_family(path: &Path) -> Result<FunctionFamily, IoError> {
    read_json(path)
}

/// Reads a single JSON descriptor; it is validated on load.
pub fn read_function(path: &Path) -> Result<FunctionDescriptor, IoError> {
    let f: FunctionDescriptor = read_json(path)?;
    f.validate().map_err(|e| IoError::Json {
        path: path.to_path_buf(),
        source: serde::de::Error::custom(e),
    })?;
    Ok(f)
}

pub fn write_model(path: &Path, model: &CompactificationModel) -> Result<(), IoError> {
    let mut bytes = MODEL_MAGIC.to_vec();
    serde_json::to_writer(&mut bytes, model).map_err(json_err(path))?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(io_err(path))
}

pub fn read_model(path: &Path) -> Result<CompactificationModel, IoError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let body = bytes
        .strip_prefix(MODEL_MAGIC)
        .ok_or_else(|| IoError::BadMagic {
            path: path.to_path_buf(),
        })?;
    serde_json::from_slice(body).map_err(json_err(path))
}

/// Pretty JSON followed by a newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    fs::write(path, to_json(value)).map_err(io_err(path))
}

fn render(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").expect("writing to a string");
}

fn coordinate_header(out: &mut String, dim: usize) {
    for n in 0..dim {
        if n > 0 {
            out.push(',');
        }
        write!(out, "c{n}").expect("writing to a string");
    }
}

/// One row per point, one column per coordinate.
pub fn points_csv<'a>(dim: usize, points: impl IntoIterator<Item = &'a [f64]>) -> String {
    let mut out = String::new();
    coordinate_header(&mut out, dim);
    out.push('\n');
    for p in points {
        for (n, v) in p.iter().enumerate() {
            if n > 0 {
                out.push(',');
            }
            render(&mut out, *v);
        }
        out.push('\n');
    }
    out
}

/// `cluster,side,c0,…,witnesses`, one row per remainder cluster.
pub fn remainder_csv(model: &CompactificationModel) -> String {
    let mut out = String::from("cluster,side,");
    coordinate_header(&mut out, model.dim());
    out.push_str(",witnesses\n");
    for (id, c) in model.remainder().iter().enumerate() {
        write!(out, "{id},{},", c.side.as_str()).expect("writing to a string");
        for v in c.center.coords() {
            render(&mut out, *v);
            out.push(',');
        }
        writeln!(out, "{}", c.witnesses.len()).expect("writing to a string");
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    let mut file = fs::File::create(path).map_err(io_err(path))?;
    file.write_all(text.as_bytes()).map_err(io_err(path))
}

pub fn write_remainder_csv(path: &Path, model: &CompactificationModel) -> Result<(), IoError> {
    write_text(path, &remainder_csv(model))
}

pub fn write_image_csv(path: &Path, model: &CompactificationModel) -> Result<(), IoError> {
    let csv = points_csv(
        model.dim(),
        model.image_cloud().iter().map(|s| s.point.coords()),
    );
    write_text(path, &csv)
}

/// Parses a CSV written by [`points_csv`].
pub fn parse_points_csv(text: &str) -> Option<Vec<ProductPoint>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|v| v.parse().ok())
                .collect::<Option<Vec<f64>>>()
                .map(ProductPoint::new)
        })
        .collect()
}
