//! Result files: time series CSV, binary snapshots and run metadata.
//!
//! Snapshot layout (little-endian): magic `GA2D`, `u32` format version,
//! `u32` lattice size `N`, `f64` time, then `N²` `f64` values of `|ψ_n|²`
//! in row-major order.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::evolver::{Diagnostics, Evolution, Snapshot, TimeSeries};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"GA2D";
pub const SNAPSHOT_VERSION: u32 = 1;

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const META_FILE: &str = "run_meta.json";

/// Writes the time series with a header row; 12 significant digits.
pub fn write_timeseries<W: Write>(series: &TimeSeries, mut out: W) -> Result<()> {
    let mut header = vec!["t".to_string()];
    header.extend((0..series.atom_populations.len()).map(|i| format!("atom_pop_{i}")));
    header.extend(series.region_names.iter().map(|n| format!("region_pop_{n}")));
    header.push("bath_norm".into());
    writeln!(out, "{}", header.join(","))?;
    for k in 0..series.len() {
        let mut row = Vec::with_capacity(header.len());
        row.push(series.times[k]);
        row.extend(series.atom_populations.iter().map(|p| p[k]));
        row.extend(series.region_populations.iter().map(|p| p[k]));
        row.push(series.bath_norm[k]);
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.11e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn write_snapshot<W: Write>(snapshot: &Snapshot, mut out: W) -> Result<()> {
    let n = u32::try_from(snapshot.size).map_err(|_| Error::InvalidLattice(format!("size {}", snapshot.size)))?;
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    out.write_all(&n.to_le_bytes())?;
    out.write_all(&snapshot.t.to_le_bytes())?;
    for v in &snapshot.grid {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<Snapshot> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::InvalidState("not a snapshot file".into()));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != SNAPSHOT_VERSION {
        return Err(Error::InvalidState(format!("unsupported snapshot version {version}")));
    }
    input.read_exact(&mut word)?;
    let size = u32::from_le_bytes(word) as usize;
    let mut double = [0u8; 8];
    input.read_exact(&mut double)?;
    let t = f64::from_le_bytes(double);
    let mut grid = Vec::with_capacity(size * size);
    for _ in 0..size * size {
        input.read_exact(&mut double)?;
        grid.push(f64::from_le_bytes(double));
    }
    Ok(Snapshot { t, size, grid })
}

/// File name of the `index`-th snapshot.
pub fn snapshot_file_name(index: usize) -> String {
    format!("snapshot_{index:03}.bin")
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotEntry {
    pub file: String,
    pub t: f64,
}

/// Contents of `run_meta.json`. Holds nothing that changes between runs of
/// the same manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub diagnostics: &'a Diagnostics,
    pub snapshots: Vec<SnapshotEntry>,
}

/// Writes all result files of a run into `dir` and returns their paths.
pub fn write_run(dir: &Path, run: &RunConfig, evolution: &Evolution) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let path = dir.join(TIMESERIES_FILE);
    let mut out = BufWriter::new(fs::File::create(&path)?);
    write_timeseries(&evolution.series, &mut out)?;
    out.flush()?;
    written.push(path);

    let mut entries = Vec::new();
    for (i, snap) in evolution.snapshots.iter().enumerate() {
        let name = snapshot_file_name(i);
        let path = dir.join(&name);
        let mut out = BufWriter::new(fs::File::create(&path)?);
        write_snapshot(snap, &mut out)?;
        out.flush()?;
        written.push(path);
        entries.push(SnapshotEntry { file: name, t: snap.t });
    }

    let meta = RunMeta {
        tool: "ga2d",
        version: env!("CARGO_PKG_VERSION"),
        config: run,
        diagnostics: &evolution.diagnostics,
        snapshots: entries,
    };
    let path = dir.join(META_FILE);
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(&path, text + "\n")?;
    written.push(path);
    Ok(written)
}
