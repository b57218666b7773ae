//! CSV forms of series, spectra and ratio tables.
//!
//! Floats are written with 17 significant digits so that reading a file back
//! reproduces the values bit for bit.

use std::io::{Read, Write};

use crate::aak::{DistanceSeries, RatioRow};
use crate::error::{Error, Result};
use crate::fourier::{FourierSeries, Provenance, SeriesSide};
use crate::hankel::SingularValues;
use crate::C64;

pub const SERIES_HEADER: [&str; 5] = ["j", "re", "im", "abs_err", "provenance"];
pub const SINGULAR_VALUES_HEADER: [&str; 3] = ["n", "s_n", "residual"];
pub const DISTANCE_HEADER: [&str; 4] = ["side", "n", "rho_n", "residual"];
pub const RATIO_HEADER: [&str; 5] = ["side", "n", "rho_n", "n^alpha*rho_n", "ratio_to_a"];

/// Round-trippable decimal form of a float.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn parse_f64(s: &str, line: usize, col: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Io(format!("line {line}: column {col}: not a number: {s:?}")))
}

pub fn write_series_csv<W: Write>(w: W, series: &FourierSeries) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(SERIES_HEADER)?;
    for (j, ((v, e), p)) in series
        .values
        .iter()
        .zip(&series.accuracy)
        .zip(&series.provenance)
        .enumerate()
    {
        wr.write_record([
            j.to_string(),
            fmt_f64(v.re),
            fmt_f64(v.im),
            fmt_f64(*e),
            p.as_str().to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads a series written by [`write_series_csv`]; rows must be `j = 0, 1, ...`.
pub fn read_series_csv<R: Read>(r: R, side: SeriesSide) -> Result<FourierSeries> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != SERIES_HEADER {
        return Err(Error::Io(format!("unexpected series header {header:?}")));
    }
    let mut values = Vec::new();
    let mut accuracy = Vec::new();
    let mut provenance = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != 5 {
            return Err(Error::Io(format!("line {line}: expected 5 fields, got {}", rec.len())));
        }
        let j: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::Io(format!("line {line}: bad index {:?}", &rec[0])))?;
        if j != i {
            return Err(Error::Io(format!("line {line}: expected j = {i}, got {j}")));
        }
        values.push(C64::new(parse_f64(&rec[1], line, "re")?, parse_f64(&rec[2], line, "im")?));
        accuracy.push(parse_f64(&rec[3], line, "abs_err")?);
        provenance.push(rec[4].trim().parse::<Provenance>()?);
    }
    Ok(FourierSeries {
        side,
        values,
        accuracy,
        provenance,
    })
}

pub fn write_singular_values_csv<W: Write>(w: W, sv: &SingularValues) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(SINGULAR_VALUES_HEADER)?;
    for (n, (s, r)) in sv.values.iter().zip(&sv.residual_estimates).enumerate() {
        wr.write_record([n.to_string(), fmt_f64(*s), fmt_f64(*r)])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_distances_csv<W: Write>(w: W, series: &[&DistanceSeries]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(DISTANCE_HEADER)?;
    for s in series {
        for (n, (v, r)) in s.values.iter().zip(&s.residuals).enumerate() {
            wr.write_record([s.side.as_str().to_string(), n.to_string(), fmt_f64(*v), fmt_f64(*r)])?;
        }
    }
    wr.flush()?;
    Ok(())
}

pub fn write_ratios_csv<W: Write>(w: W, rows: &[RatioRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(RATIO_HEADER)?;
    for r in rows {
        wr.write_record([
            r.side.as_str().to_string(),
            r.n.to_string(),
            fmt_f64(r.rho),
            fmt_f64(r.scaled),
            fmt_f64(r.ratio),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
