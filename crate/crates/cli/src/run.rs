//! Executes the commands of a configuration and writes their artifacts.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use ratlog_core::aak::{assemble, distances_from_series, singular_values, AakOptions, DistanceReport, DistanceSide};
use ratlog_core::asymptotics::{predict, Prediction};
use ratlog_core::fourier::{FourierSeries, SeriesSide};
use ratlog_core::hankel::DEFAULT_SEED;
use ratlog_core::io::{write_distances_csv, write_ratios_csv, write_series_csv, write_singular_values_csv};
use ratlog_core::verify::{self, CheckOutcome, VerifyContext};

use crate::cache::{SeriesCache, DEFAULT_CACHE_DIR};
use crate::config::{Command, Config, SymbolSource};
use crate::error::{CliError, Result};
use crate::plot::convergence_svg;

pub const DEFAULT_OUT_DIR: &str = "ratlog-out";

/// Flag, then config, then environment, then the built-in default.
pub fn resolve_cache_dir(flag: Option<PathBuf>, config: Option<PathBuf>, env: Option<OsString>) -> PathBuf {
    flag.or(config)
        .or_else(|| env.filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

pub fn resolve_out_dir(flag: Option<PathBuf>, config: Option<PathBuf>) -> PathBuf {
    flag.or(config).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

#[derive(Serialize)]
struct PredictOutput<'a> {
    source: &'static str,
    #[serde(flatten)]
    prediction: &'a Prediction,
    flags: &'a [String],
}

#[derive(Serialize)]
struct CheckRecord<'a> {
    name: &'a str,
    status: &'static str,
    measured: f64,
    threshold: f64,
    detail: &'a str,
    seconds: f64,
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    passed: bool,
    seed: u64,
    checks: Vec<CheckRecord<'a>>,
}

pub struct Runner<'a> {
    cfg: &'a Config,
    out: PathBuf,
    cache: SeriesCache,
    seed: u64,
    sides: OnceLock<(FourierSeries, FourierSeries)>,
    reports: OnceLock<Vec<DistanceReport>>,
}

impl<'a> Runner<'a> {
    pub fn new(cfg: &'a Config, out: PathBuf, cache_dir: PathBuf, seed: Option<u64>) -> Self {
        Self {
            cfg,
            out,
            cache: SeriesCache::new(cache_dir),
            seed: seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
            sides: OnceLock::new(),
            reports: OnceLock::new(),
        }
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    pub fn run_all(&self, commands: &[Command]) -> Result<()> {
        fs::create_dir_all(&self.out)?;
        if commands.is_empty() {
            log::warn!("no commands given; nothing to do");
        }
        for &cmd in commands {
            log::info!("running {}", cmd.as_str());
            self.run(cmd)?;
        }
        Ok(())
    }

    pub fn run(&self, cmd: Command) -> Result<()> {
        fs::create_dir_all(&self.out)?;
        match cmd {
            Command::Predict => self.predict(),
            Command::Coeffs => self.coeffs(),
            Command::Svd => self.svd(),
            Command::Distance => self.distance(),
            Command::Verify => self.verify(),
        }
    }

    fn source(&self, cmd: Command) -> Result<&SymbolSource> {
        self.cfg.require_symbol(cmd)
    }

    fn flags(&self) -> Vec<String> {
        match &self.cfg.symbol {
            Some(SymbolSource::Analytic { alpha, .. }) if (alpha - 1.0).abs() < 1e-12 => {
                vec!["alpha = 1: predicted limit is 0, ratios are not informative".to_string()]
            }
            _ => Vec::new(),
        }
    }

    fn options(&self) -> AakOptions {
        AakOptions {
            tol: self.cfg.tol,
            seed: self.seed,
            solver: self.cfg.solver,
            policy: self.cfg.method_policy,
            tail: true,
        }
    }

    fn sides(&self, cmd: Command) -> Result<&(FourierSeries, FourierSeries)> {
        if let Some(s) = self.sides.get() {
            return Ok(s);
        }
        let sym = self.source(cmd)?.spec();
        let load = |side| -> Result<FourierSeries> {
            let (s, origin) = self.cache.series(sym, side, self.cfg.j, &self.cfg.method_policy)?;
            log::info!("series {side:?} (J = {}): {origin:?} in {}", self.cfg.j, self.cache.dir().display());
            Ok(s)
        };
        let minus = load(SeriesSide::Minus)?;
        let plus = load(SeriesSide::Plus)?;
        Ok(self.sides.get_or_init(|| (minus, plus)))
    }

    fn predict(&self) -> Result<()> {
        let src = self.source(Command::Predict)?;
        let prediction = predict(src.spec())?;
        let out = PredictOutput {
            source: match src {
                SymbolSource::Boundary(_) => "boundary",
                SymbolSource::Analytic { .. } => "analytic",
            },
            prediction: &prediction,
            flags: &self.flags(),
        };
        write_json(&self.out.join("predict.json"), &out)
    }

    fn coeffs(&self) -> Result<()> {
        let (minus, plus) = self.sides(Command::Coeffs)?;
        write_file(&self.out.join("coeffs_minus.csv"), |w| Ok(write_series_csv(w, minus)?))?;
        write_file(&self.out.join("coeffs_plus.csv"), |w| Ok(write_series_csv(w, plus)?))
    }

    fn svd(&self) -> Result<()> {
        let (minus, plus) = self.sides(Command::Svd)?;
        let opts = self.options();
        let k = self.cfg.k;
        let results: Vec<Result<_>> = self
            .cfg
            .n
            .par_iter()
            .map(|&n| {
                let len = 2 * n - 1;
                let m = singular_values(&minus.truncated(len), k, n, &opts)?;
                let p = singular_values(&plus.truncated(len), k, n, &opts)?;
                Ok((n, m, p))
            })
            .collect();
        for r in results {
            let (n, m, p) = r?;
            write_file(&self.out.join(format!("svd_N{n}_minus.csv")), |w| Ok(write_singular_values_csv(w, &m)?))?;
            write_file(&self.out.join(format!("svd_N{n}_plus.csv")), |w| Ok(write_singular_values_csv(w, &p)?))?;
        }
        Ok(())
    }

    fn reports(&self, cmd: Command) -> Result<&[DistanceReport]> {
        if let Some(r) = self.reports.get() {
            return Ok(r);
        }
        let sym = self.source(cmd)?.spec();
        let prediction = predict(sym)?;
        let (minus, plus) = self.sides(cmd)?;
        let opts = self.options();
        let n_max = self.cfg.n_max;
        let flags = self.flags();
        let reports = self
            .cfg
            .n
            .par_iter()
            .map(|&n| {
                let len = 2 * n - 1;
                let m = distances_from_series(&minus.truncated(len), DistanceSide::Minus, n_max, n, &opts)?;
                let p = distances_from_series(&plus.truncated(len), DistanceSide::Plus, n_max, n, &opts)?;
                Ok(assemble(m, p, prediction.clone(), flags.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        for (n, r) in self.cfg.n.iter().zip(&reports) {
            for f in &r.flags {
                log::warn!("N = {n}: {f}");
            }
        }
        Ok(self.reports.get_or_init(|| reports))
    }

    fn distance(&self) -> Result<()> {
        let reports = self.reports(Command::Distance)?;
        for (n, r) in self.cfg.n.iter().zip(reports) {
            write_file(&self.out.join(format!("distances_N{n}.csv")), |w| {
                Ok(write_distances_csv(w, &[&r.minus, &r.plus, &r.merged])?)
            })?;
            write_file(&self.out.join(format!("ratios_N{n}.csv")), |w| Ok(write_ratios_csv(w, &r.ratios)?))?;
            write_json(&self.out.join(format!("report_N{n}.json")), r)?;
        }
        Ok(())
    }

    fn verify(&self) -> Result<()> {
        if self.cfg.symbol.is_some() {
            let reports = self.reports(Command::Verify)?;
            for (n, r) in self.cfg.n.iter().zip(reports) {
                write_file(&self.out.join(format!("ratios_N{n}.csv")), |w| Ok(write_ratios_csv(w, &r.ratios)?))?;
                let p = &r.prediction;
                let limits = [
                    (DistanceSide::Minus, p.a_minus),
                    (DistanceSide::Plus, p.a_plus),
                    (DistanceSide::Merged, p.a_merged),
                ];
                let svg = convergence_svg(
                    &format!("N = {n}, alpha = {}", p.alpha),
                    p.decay_exponent,
                    &r.ratios,
                    &limits,
                );
                fs::write(self.out.join(format!("convergence_N{n}.svg")), svg)?;
            }
        }

        if self.cfg.checks.is_empty() {
            log::warn!("no checks selected; verify passes trivially");
        }
        let ctx = VerifyContext { seed: self.seed };
        let outcomes: Vec<CheckOutcome> = self
            .cfg
            .checks
            .iter()
            .map(|name| {
                let check = verify::find(name).expect("check names are validated with the config");
                let o = check.run(&ctx);
                log::info!("check {name}: {} ({})", if o.passed { "pass" } else { "fail" }, o.detail);
                o
            })
            .collect();
        let failed = outcomes.iter().filter(|o| !o.passed).count();
        let summary = VerifySummary {
            passed: failed == 0,
            seed: self.seed,
            checks: outcomes
                .iter()
                .map(|o| CheckRecord {
                    name: &o.name,
                    status: if o.passed { "pass" } else { "fail" },
                    measured: o.measured,
                    threshold: o.threshold,
                    detail: &o.detail,
                    seconds: o.seconds,
                })
                .collect(),
        };
        write_json(&self.out.join("verify_summary.json"), &summary)?;
        if failed > 0 {
            return Err(CliError::ChecksFailed {
                failed,
                total: outcomes.len(),
            });
        }
        Ok(())
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_file(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")?;
        Ok(())
    })
}
