//! On-disk cache of coefficient series.
//!
//! A file is named by a SHA-256 of the symbol JSON, `J` and the method
//! policy, plus the side. Writes go to a temporary file in the same directory
//! and are renamed into place, so concurrent runs never see partial files.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use ratlog_core::fourier::{make_series, FourierSeries, MethodPolicy, SeriesSide};
use ratlog_core::io::{read_series_csv, write_series_csv};
use ratlog_core::symbol::SymbolSpec;

use crate::error::Result;

pub const CACHE_ENV: &str = "RATLOG_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".ratlog-cache";

#[derive(Serialize)]
struct KeyInput<'a> {
    format: &'static str,
    symbol: &'a SymbolSpec,
    #[serde(rename = "J")]
    j: usize,
    method_policy: &'a MethodPolicy,
}

/// Hex digest identifying the numerics of a series (both sides share it).
pub fn cache_key(symbol: &SymbolSpec, j: usize, policy: &MethodPolicy) -> String {
    let input = KeyInput {
        format: "series-csv-1",
        symbol,
        j,
        method_policy: policy,
    };
    let json = serde_json::to_vec(&input).expect("symbol specs always serialize");
    hex::encode(Sha256::digest(&json))
}

fn side_name(side: SeriesSide) -> &'static str {
    match side {
        SeriesSide::Minus => "minus",
        SeriesSide::Plus => "plus",
    }
}

pub fn cache_path(dir: &Path, key: &str, side: SeriesSide) -> PathBuf {
    dir.join(format!("series-{key}-{}.csv", side_name(side)))
}

/// Whether a series came from disk or was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Hit,
    Miss,
    /// The cached file was unreadable and has been replaced.
    Recomputed,
}

pub struct SeriesCache {
    dir: PathBuf,
}

impl SeriesCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Series `h(0..J)` for one side, from the cache when a valid file exists.
    pub fn series(
        &self,
        symbol: &SymbolSpec,
        side: SeriesSide,
        j: usize,
        policy: &MethodPolicy,
    ) -> Result<(FourierSeries, Origin)> {
        let path = cache_path(&self.dir, &cache_key(symbol, j, policy), side);
        let mut origin = Origin::Miss;
        if path.exists() {
            match read_file(&path, side, j) {
                Ok(s) => return Ok((s, Origin::Hit)),
                Err(e) => {
                    log::warn!("cache file {} is unusable ({e}); recomputing", path.display());
                    origin = Origin::Recomputed;
                }
            }
        }
        let series = make_series(symbol, side, j, policy)?;
        self.store(&path, &series)?;
        Ok((series, origin))
    }

    fn store(&self, path: &Path, series: &FourierSeries) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        {
            let mut w = BufWriter::new(tmp.as_file_mut());
            write_series_csv(&mut w, series)?;
            w.flush()?;
        }
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }
}

fn read_file(path: &Path, side: SeriesSide, j: usize) -> std::result::Result<FourierSeries, String> {
    let f = fs::File::open(path).map_err(|e| e.to_string())?;
    let s = read_series_csv(BufReader::new(f), side).map_err(|e| e.to_string())?;
    if s.len() != j {
        return Err(format!("expected {j} rows, found {}", s.len()));
    }
    if s.values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err("non-finite coefficient".into());
    }
    Ok(s)
}
