//! Field snapshots: flat little-endian `f64` binary, first index fastest, with a JSON sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{GridSpec, LatticeState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    /// `"lattice-horizontal"`, `"lattice-diagonal"`, `"continuum"`, ...
    pub kind: String,
    pub nx: usize,
    pub ny: usize,
    #[serde(default)]
    pub j0: i64,
    #[serde(default)]
    pub k0: i64,
    pub t: f64,
    /// Field order inside the binary file.
    pub fields: Vec<String>,
    /// Box periods for continuum snapshots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::Config(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("bin"), stem.with_extension("json"))
}

/// Writes `<stem>.bin` and `<stem>.json`.
pub fn write_snapshot(stem: &Path, meta: &SnapshotMeta, fields: &[&[f64]]) -> Result<()> {
    if fields.len() != meta.fields.len() {
        return Err(Error::Dimension(format!(
            "{} field names for {} fields",
            meta.fields.len(),
            fields.len()
        )));
    }
    let n = meta.nx * meta.ny;
    let mut bytes = Vec::with_capacity(8 * n * fields.len());
    for (name, f) in meta.fields.iter().zip(fields) {
        if f.len() != n {
            return Err(Error::Dimension(format!("field {name} has {} entries, expected {n}", f.len())));
        }
        for v in f.iter() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let (bin, json) = paths(stem);
    write_atomic(&bin, &bytes)?;
    write_atomic(&json, serde_json::to_string_pretty(meta)?.as_bytes())
}

pub fn read_snapshot(stem: &Path) -> Result<(SnapshotMeta, Vec<Vec<f64>>)> {
    let (bin, json) = paths(stem);
    let meta: SnapshotMeta = serde_json::from_slice(&fs::read(json)?)?;
    let bytes = fs::read(bin)?;
    let n = meta.nx * meta.ny;
    if bytes.len() != 8 * n * meta.fields.len() {
        return Err(Error::Dimension(format!(
            "snapshot holds {} bytes, sidecar implies {}",
            bytes.len(),
            8 * n * meta.fields.len()
        )));
    }
    let fields = bytes
        .chunks_exact(8 * n)
        .map(|c| c.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect())
        .collect();
    Ok((meta, fields))
}

pub fn write_lattice_snapshot<S: LatticeState>(stem: &Path, kind: &str, state: &S) -> Result<()> {
    let g = state.grid();
    let meta = SnapshotMeta {
        kind: kind.to_string(),
        nx: g.nj,
        ny: g.nk,
        j0: g.j0,
        k0: g.k0,
        t: state.time(),
        fields: S::FIELD_NAMES.iter().map(|s| s.to_string()).collect(),
        lengths: None,
        eps: None,
    };
    write_snapshot(stem, &meta, &state.fields())
}

pub fn read_lattice_snapshot<S: LatticeState>(stem: &Path) -> Result<S> {
    let (meta, data) = read_snapshot(stem)?;
    if meta.fields.iter().map(String::as_str).ne(S::FIELD_NAMES.iter().copied()) {
        return Err(Error::Config(format!("snapshot field order {:?} does not match {:?}", meta.fields, S::FIELD_NAMES)));
    }
    let mut grid = GridSpec::new(meta.nx, meta.ny)?;
    grid.j0 = meta.j0;
    grid.k0 = meta.k0;
    let mut s = S::zeros(grid);
    s.set_time(meta.t);
    for (dst, src) in s.fields_mut().into_iter().zip(data) {
        dst.copy_from_slice(&src);
    }
    Ok(s)
}
