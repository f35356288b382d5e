//! Projector and state files.
//!
//! A projector is written as three files next to each other: `<stem>.json`
//! (the sidecar with all metadata) and `<stem>.re.csv` / `<stem>.im.csv`
//! holding the real and imaginary parts of the orthonormal range basis, one
//! basis vector per row. Dense matrices (output states) use the same pair of
//! grids, one matrix row per CSV row.

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use uqc_core::universal::{JoinReport, Schedule, UniversalProjector};
use uqc_core::{ComplexMatrix, Projector, C64};

pub const FORMAT: &str = "uqc-projector";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleInfo {
    pub m: usize,
    pub d: usize,
    pub r: f64,
    pub i: u32,
    pub l: usize,
    pub n: usize,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub pad: usize,
    pub overridden: bool,
}

impl From<&Schedule> for ScheduleInfo {
    fn from(s: &Schedule) -> Self {
        Self {
            m: s.m,
            d: s.d,
            r: s.r,
            i: s.i,
            l: s.l,
            n: s.n,
            big_r: s.big_r,
            pad: s.pad(),
            overridden: s.overridden,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JoinInfo {
    pub rank: usize,
    pub samples: usize,
    pub invariance_deviation: f64,
}

impl From<&JoinReport> for JoinInfo {
    fn from(j: &JoinReport) -> Self {
        Self {
            rank: j.rank,
            samples: j.samples,
            invariance_deviation: j.invariance_deviation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorSidecar {
    pub format: String,
    pub version: u32,
    /// Site dimension and number of sites the projector acts on.
    pub d: usize,
    pub sites: usize,
    pub dim: usize,
    pub rank: usize,
    /// `tr(q)`, equal to the rank.
    pub trace: f64,
    pub r: f64,
    pub schedule: ScheduleInfo,
    pub code_size: String,
    pub context_order: usize,
    pub join: JoinInfo,
    pub seed: u64,
    /// Grid file names, relative to the sidecar.
    pub basis_re: String,
    pub basis_im: String,
}

/// `<stem>.json`, `<stem>.re.csv`, `<stem>.im.csv` for an output path given
/// with or without the `.json` extension.
pub fn file_names(out: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let stem = if out.extension().is_some_and(|e| e == "json") {
        out.with_extension("")
    } else {
        out.to_owned()
    };
    let with = |suffix: &str| {
        let mut s = stem.clone().into_os_string();
        s.push(suffix);
        PathBuf::from(s)
    };
    (with(".json"), with(".re.csv"), with(".im.csv"))
}

fn write_grid(path: &Path, rows: &[&[C64]], part: fn(&C64) -> f64) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    for row in rows {
        w.write_record(row.iter().map(|z| format!("{}", part(z))))?;
    }
    w.flush()?;
    Ok(())
}

fn read_grid(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push(
            rec.iter()
                .map(|f| f.trim().parse::<f64>().with_context(|| format!("bad number {f:?} in {}", path.display())))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(out)
}

/// Writes real and imaginary grids for a list of equally long rows.
pub fn write_complex_rows(re: &Path, im: &Path, rows: &[&[C64]]) -> Result<()> {
    write_grid(re, rows, |z| z.re)?;
    write_grid(im, rows, |z| z.im)
}

pub fn read_complex_rows(re: &Path, im: &Path) -> Result<Vec<Vec<C64>>> {
    let re = read_grid(re)?;
    let im = read_grid(im)?;
    ensure!(re.len() == im.len(), "real and imaginary grids have different row counts");
    re.into_iter()
        .zip(im)
        .map(|(a, b)| {
            ensure!(a.len() == b.len(), "real and imaginary grids have different widths");
            Ok(a.into_iter().zip(b).map(|(x, y)| C64::new(x, y)).collect())
        })
        .collect()
}

pub fn write_matrix(re: &Path, im: &Path, m: &ComplexMatrix) -> Result<()> {
    let rows: Vec<&[C64]> = (0..m.rows()).map(|i| m.row(i)).collect();
    write_complex_rows(re, im, &rows)
}

/// Writes `q` (on all `m` sites) with its sidecar; returns the sidecar.
pub fn save_projector(out: &Path, up: &UniversalProjector, seed: u64) -> Result<ProjectorSidecar> {
    let q = up.q()?;
    let (json, re, im) = file_names(out);
    let rows: Vec<&[C64]> = q.basis().iter().map(Vec::as_slice).collect();
    write_complex_rows(&re, &im, &rows)?;
    let name = |p: &Path| p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let meta = ProjectorSidecar {
        format: FORMAT.into(),
        version: FORMAT_VERSION,
        d: up.schedule.d,
        sites: up.m(),
        dim: q.dim(),
        rank: q.rank(),
        trace: q.trace(),
        r: up.r(),
        schedule: (&up.schedule).into(),
        code_size: up.code_size.to_string(),
        context_order: up.context_order,
        join: (&up.join).into(),
        seed,
        basis_re: name(&re),
        basis_im: name(&im),
    };
    let text = serde_json::to_string_pretty(&meta)? + "\n";
    std::fs::write(&json, text).with_context(|| format!("writing {}", json.display()))?;
    Ok(meta)
}

/// Reads a projector back from its sidecar.
pub fn load_projector(sidecar: &Path) -> Result<(Projector, ProjectorSidecar)> {
    let text = std::fs::read_to_string(sidecar).with_context(|| format!("reading {}", sidecar.display()))?;
    let meta: ProjectorSidecar =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", sidecar.display()))?;
    if meta.format != FORMAT || meta.version != FORMAT_VERSION {
        bail!("{} is not a {FORMAT} v{FORMAT_VERSION} file", sidecar.display());
    }
    let dir = sidecar.parent().unwrap_or(Path::new("."));
    let rows = read_complex_rows(&dir.join(&meta.basis_re), &dir.join(&meta.basis_im))?;
    ensure!(rows.len() == meta.rank, "basis has {} rows, sidecar says rank {}", rows.len(), meta.rank);
    ensure!(rows.iter().all(|r| r.len() == meta.dim), "basis rows must have length {}", meta.dim);
    let p = Projector::span(meta.dim, &rows)?;
    ensure!(p.rank() == meta.rank, "stored basis is rank deficient ({} < {})", p.rank(), meta.rank);
    Ok((p, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        let (j, r, i) = file_names(Path::new("/tmp/q.json"));
        assert_eq!(j, Path::new("/tmp/q.json"));
        assert_eq!(r, Path::new("/tmp/q.re.csv"));
        assert_eq!(i, Path::new("/tmp/q.im.csv"));
        assert_eq!(file_names(Path::new("out/q")).0, Path::new("out/q.json"));
    }

    #[test]
    fn grids_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let m = ComplexMatrix::from_fn(3, 2, |i, j| C64::new(0.1 * i as f64 + 1.0 / 3.0, -(j as f64) / 7.0));
        let (re, im) = (dir.path().join("a.re.csv"), dir.path().join("a.im.csv"));
        write_matrix(&re, &im, &m).unwrap();
        let back = read_complex_rows(&re, &im).unwrap();
        for (i, row) in back.iter().enumerate() {
            assert_eq!(row, m.row(i));
        }
    }
}
