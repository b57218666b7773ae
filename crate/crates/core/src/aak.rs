//! Distances to rational functions read off Hankel singular values.
//!
//! `rho_n^-(omega) = s_n` of the minus-side Hankel operator and
//! `rho_n^+(omega) = rho_n^-(conj omega)`. The two-sided distance merges both
//! spectra: its counting function is the sum of the one-sided ones.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{predict, Prediction};
use crate::error::{Error, Result};
use crate::fourier::{coeff_quadrature, make_series, FourierSeries, MethodPolicy, SeriesSide};
use crate::hankel::{
    singular_values_dense, singular_values_iterative_with, tail_norm_estimate, HankelOperator, LanczosOptions,
    SingularValues, DEFAULT_SEED, DEFAULT_TOL, DENSE_LIMIT,
};
use crate::symbol::{AnalyticSymbolSpec, CutoffSpec, SymbolSpec, DEFAULT_TAYLOR_DEGREE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceSide {
    Plus,
    Minus,
    Merged,
}

impl DistanceSide {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceSide::Plus => "plus",
            DistanceSide::Minus => "minus",
            DistanceSide::Merged => "merged",
        }
    }
}

/// Non-increasing distances `rho_0 >= rho_1 >= ...`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceSeries {
    pub side: DistanceSide,
    pub values: Vec<f64>,
    pub n_used: usize,
    /// Norm of the discarded tail of the compression.
    pub tail_proxy: f64,
    pub converged_count: usize,
    pub residuals: Vec<f64>,
}

/// Which singular value solver to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    /// Dense up to [`AUTO_DENSE_MAX`], iterative above.
    #[default]
    Auto,
    Dense,
    Iterative,
}

pub const AUTO_DENSE_MAX: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct AakOptions {
    pub tol: f64,
    pub seed: u64,
    pub solver: Solver,
    pub policy: MethodPolicy,
    /// Compute the tail proxy (one extra iterative solve per side).
    pub tail: bool,
}

impl Default for AakOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            solver: Solver::Auto,
            policy: MethodPolicy::default(),
            tail: true,
        }
    }
}

/// Singular values `s_0 .. s_{k-1}` of the `N x N` section of `series`.
pub fn singular_values(series: &FourierSeries, k: usize, n: usize, opts: &AakOptions) -> Result<SingularValues> {
    let op = HankelOperator::build(series, n)?;
    let dense = match opts.solver {
        Solver::Auto => n <= AUTO_DENSE_MAX,
        Solver::Dense => true,
        Solver::Iterative => false,
    };
    if dense {
        if n > DENSE_LIMIT {
            return Err(Error::DenseTooLarge { n, limit: DENSE_LIMIT });
        }
        let mut sv = singular_values_dense(&op)?;
        sv.values.truncate(k);
        sv.residual_estimates.truncate(k);
        sv.converged_count = sv.converged_count.min(k);
        Ok(sv)
    } else {
        let lopts = LanczosOptions {
            seed: opts.seed,
            ..LanczosOptions::default()
        };
        singular_values_iterative_with(&op, k, opts.tol, &lopts)
    }
}

/// Distances `rho_0 ..= rho_{n_max}` (capped at `N` values) from a precomputed series.
pub fn distances_from_series(
    series: &FourierSeries,
    side: DistanceSide,
    n_max: usize,
    n: usize,
    opts: &AakOptions,
) -> Result<DistanceSeries> {
    if n == 0 || n_max > n {
        return Err(Error::InvalidArgument(format!("need n_max <= N and N >= 1, got n_max = {n_max}, N = {n}")));
    }
    let k = (n_max + 1).min(n);
    let sv = singular_values(series, k, n, opts)?;
    let tail_proxy = if opts.tail {
        tail_norm_estimate(series, n)?
    } else {
        f64::NAN
    };
    Ok(DistanceSeries {
        side,
        values: sv.values,
        n_used: n,
        tail_proxy,
        converged_count: sv.converged_count,
        residuals: sv.residual_estimates,
    })
}

fn side_series(sym: &SymbolSpec, side: SeriesSide, n: usize, opts: &AakOptions) -> Result<FourierSeries> {
    make_series(sym, side, 2 * n - 1, &opts.policy)
}

pub fn rho_minus(sym: &SymbolSpec, n_max: usize, n: usize) -> Result<DistanceSeries> {
    rho_minus_with(sym, n_max, n, &AakOptions::default())
}

pub fn rho_minus_with(sym: &SymbolSpec, n_max: usize, n: usize, opts: &AakOptions) -> Result<DistanceSeries> {
    check_size(n_max, n)?;
    let s = side_series(sym, SeriesSide::Minus, n, opts)?;
    distances_from_series(&s, DistanceSide::Minus, n_max, n, opts)
}

pub fn rho_plus(sym: &SymbolSpec, n_max: usize, n: usize) -> Result<DistanceSeries> {
    rho_plus_with(sym, n_max, n, &AakOptions::default())
}

pub fn rho_plus_with(sym: &SymbolSpec, n_max: usize, n: usize, opts: &AakOptions) -> Result<DistanceSeries> {
    check_size(n_max, n)?;
    let s = side_series(sym, SeriesSide::Plus, n, opts)?;
    distances_from_series(&s, DistanceSide::Plus, n_max, n, opts)
}

fn check_size(n_max: usize, n: usize) -> Result<()> {
    if n == 0 || n_max > n {
        return Err(Error::InvalidArgument(format!("need n_max <= N and N >= 1, got n_max = {n_max}, N = {n}")));
    }
    Ok(())
}

/// Sorted merge of two non-increasing series.
pub fn merge(plus: &DistanceSeries, minus: &DistanceSeries) -> DistanceSeries {
    let values = merge_values(&plus.values, &minus.values);
    let residuals = {
        // residuals follow their values through the merge
        let mut tagged: Vec<(f64, f64)> = plus
            .values
            .iter()
            .copied()
            .zip(plus.residuals.iter().copied())
            .chain(minus.values.iter().copied().zip(minus.residuals.iter().copied()))
            .collect();
        tagged.sort_by(|a, b| b.0.total_cmp(&a.0));
        tagged.into_iter().map(|p| p.1).collect()
    };
    DistanceSeries {
        side: DistanceSide::Merged,
        values,
        n_used: plus.n_used.min(minus.n_used),
        tail_proxy: plus.tail_proxy.max(minus.tail_proxy),
        converged_count: merged_converged(plus, minus),
        residuals,
    }
}

/// Merged entries are trustworthy while they come from both parents'
/// converged prefixes and no truncated parent could still contribute.
fn merged_converged(plus: &DistanceSeries, minus: &DistanceSeries) -> usize {
    let mut unconverged = f64::NEG_INFINITY;
    let mut truncated = f64::NEG_INFINITY;
    for s in [plus, minus] {
        if s.converged_count < s.values.len() {
            unconverged = unconverged.max(s.values[s.converged_count]);
        }
        if s.values.len() < s.n_used {
            if let Some(last) = s.values.last() {
                truncated = truncated.max(*last);
            }
        }
    }
    merge_values(&plus.values, &minus.values)
        .iter()
        .take_while(|v| **v > unconverged && **v >= truncated)
        .count()
}

pub fn merge_values(plus: &[f64], minus: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(plus.len() + minus.len());
    let (mut i, mut j) = (0, 0);
    while i < plus.len() || j < minus.len() {
        let take_plus = j >= minus.len() || (i < plus.len() && plus[i] >= minus[j]);
        if take_plus {
            out.push(plus[i]);
            i += 1;
        } else {
            out.push(minus[j]);
            j += 1;
        }
    }
    out
}

/// `min over n_+ + n_- = n of max(plus[n_+], minus[n_-])`, entries beyond
/// either slice taken as zero.
pub fn merge_min_max(plus: &[f64], minus: &[f64], n: usize) -> f64 {
    let at = |s: &[f64], i: usize| s.get(i).copied().unwrap_or(0.0);
    (0..=n)
        .map(|np| at(plus, np).max(at(minus, n - np)))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Counting {
    pub count: usize,
    /// The last computed value still exceeds `s`, so the true count may be larger.
    pub saturated: bool,
}

/// `#{n : rho_n > s}` within the computed range.
pub fn counting(series: &DistanceSeries, s: f64) -> Counting {
    counting_values(&series.values, s)
}

pub fn counting_values(values: &[f64], s: f64) -> Counting {
    let count = values.iter().filter(|v| **v > s).count();
    Counting {
        count,
        saturated: values.last().is_some_and(|v| *v > s),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BmoNorm {
    pub value: f64,
    pub s0_minus: f64,
    pub s0_plus: f64,
    /// `|omega^(0)|`.
    pub mean_abs: f64,
    pub tail_minus: f64,
    pub tail_plus: f64,
}

/// `max(||K(omega)||, ||K(conj omega)||, |omega^(0)|)` at compression `N`.
pub fn bmo_norm(sym: &SymbolSpec, n: usize) -> Result<BmoNorm> {
    bmo_norm_with(sym, n, &AakOptions::default())
}

pub fn bmo_norm_with(sym: &SymbolSpec, n: usize, opts: &AakOptions) -> Result<BmoNorm> {
    let minus = rho_minus_with(sym, 0, n, opts)?;
    let plus = rho_plus_with(sym, 0, n, opts)?;
    let mean_abs = coeff_quadrature(sym, 0).value.norm();
    let s0_minus = minus.values[0];
    let s0_plus = plus.values[0];
    Ok(BmoNorm {
        value: s0_minus.max(s0_plus).max(mean_abs),
        s0_minus,
        s0_plus,
        mean_abs,
        tail_minus: minus.tail_proxy,
        tail_plus: plus.tail_proxy,
    })
}

/// One row `n^gamma rho_n / a` of the comparison table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub side: DistanceSide,
    pub n: usize,
    pub rho: f64,
    pub scaled: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceReport {
    pub minus: DistanceSeries,
    pub plus: DistanceSeries,
    pub merged: DistanceSeries,
    pub prediction: Prediction,
    pub ratios: Vec<RatioRow>,
    pub flags: Vec<String>,
}

pub fn report(sym: &SymbolSpec, n_max: usize, n: usize) -> Result<DistanceReport> {
    report_with(sym, n_max, n, &AakOptions::default())
}

pub fn report_with(sym: &SymbolSpec, n_max: usize, n: usize, opts: &AakOptions) -> Result<DistanceReport> {
    let prediction = predict(sym)?;
    let minus = rho_minus_with(sym, n_max, n, opts)?;
    let plus = rho_plus_with(sym, n_max, n, opts)?;
    Ok(assemble(minus, plus, prediction, Vec::new()))
}

/// Report for a symbol analytic in the disk, through its boundary reduction.
/// The smooth remainder of the reduction is not included; it does not move
/// the limits.
pub fn report_analytic(
    aspec: &AnalyticSymbolSpec,
    cutoff: CutoffSpec,
    n_max: usize,
    n: usize,
    opts: &AakOptions,
) -> Result<DistanceReport> {
    let sym = aspec.to_symbol_spec(cutoff, DEFAULT_TAYLOR_DEGREE)?;
    let mut flags = Vec::new();
    if (aspec.alpha() - 1.0).abs() < 1e-12 {
        flags.push("alpha = 1: predicted limit is 0, ratios are not informative".to_string());
    }
    let prediction = predict(&sym)?;
    let minus = rho_minus_with(&sym, n_max, n, opts)?;
    let plus = rho_plus_with(&sym, n_max, n, opts)?;
    Ok(assemble(minus, plus, prediction, flags))
}

/// Pairs measured series with the prediction.
pub fn assemble(
    minus: DistanceSeries,
    plus: DistanceSeries,
    prediction: Prediction,
    mut flags: Vec<String>,
) -> DistanceReport {
    let merged = merge(&plus, &minus);
    let gamma = prediction.decay_exponent;
    let mut ratios = Vec::new();
    if !prediction.compact {
        flags.push(format!("decay exponent {gamma} <= 0: operator not compact, no ratios"));
    } else {
        for (series, a) in [
            (&minus, prediction.a_minus),
            (&plus, prediction.a_plus),
            (&merged, prediction.a_merged),
        ] {
            if !(a > 0.0 && a.is_finite()) {
                flags.push(format!("{} side: predicted limit is 0, ratios omitted", series.side.as_str()));
                continue;
            }
            // unconverged values are not measurements
            for (n, rho) in series.values.iter().enumerate().take(series.converged_count).skip(1) {
                let scaled = (n as f64).powf(gamma) * rho;
                ratios.push(RatioRow {
                    side: series.side,
                    n,
                    rho: *rho,
                    scaled,
                    ratio: scaled / a,
                });
            }
        }
    }
    for s in [&minus, &plus] {
        if s.converged_count < s.values.len() {
            flags.push(format!(
                "{} side: only {} of {} values converged",
                s.side.as_str(),
                s.converged_count,
                s.values.len()
            ));
        }
    }
    DistanceReport {
        minus,
        plus,
        merged,
        prediction,
        ratios,
        flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{make_model_symbol, TrigPoly, TrigTerm};
    use crate::C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn series(side: DistanceSide, values: Vec<f64>) -> DistanceSeries {
        let n = values.len();
        DistanceSeries {
            side,
            residuals: vec![0.0; n],
            values,
            n_used: n,
            tail_proxy: 0.0,
            converged_count: n,
        }
    }

    #[test]
    fn zero_symbol_has_zero_distances() {
        let z = SymbolSpec::zero();
        let r = rho_minus(&z, 3, 8).unwrap();
        assert!(r.values.iter().all(|v| *v == 0.0));
        let r = rho_plus(&z, 3, 8).unwrap();
        assert!(r.values.iter().all(|v| *v == 0.0));
        assert_eq!(bmo_norm(&z, 8).unwrap().value, 0.0);
    }

    #[test]
    fn degree_one_rational() {
        let sym = SymbolSpec::zero()
            .with_smooth_extra(TrigPoly::new(vec![TrigTerm { k: -1, c: c(1.0, 0.0) }]))
            .unwrap();
        let r = rho_minus(&sym, 5, 16).unwrap();
        assert!((r.values[0] - 1.0).abs() < 1e-14);
        assert!(r.values[1..].iter().all(|v| *v < 1e-14));
        assert!(rho_plus(&sym, 5, 16).unwrap().values[0] < 1e-14);
    }

    #[test]
    fn constant_symbol_bmo_norm() {
        let sym = SymbolSpec::zero()
            .with_smooth_extra(TrigPoly::new(vec![TrigTerm { k: 0, c: c(0.0, -2.5) }]))
            .unwrap();
        let b = bmo_norm(&sym, 16).unwrap();
        assert!((b.value - 2.5).abs() < 1e-14);
        assert!(b.s0_minus < 1e-14 && b.s0_plus < 1e-14);
    }

    #[test]
    fn merge_examples() {
        let p = series(DistanceSide::Plus, vec![3.0, 1.0]);
        let m = series(DistanceSide::Minus, vec![2.0, 0.5]);
        assert_eq!(merge(&p, &m).values, vec![3.0, 2.0, 1.0, 0.5]);
        let z = series(DistanceSide::Minus, vec![0.0, 0.0]);
        assert_eq!(merge(&p, &z).values, vec![3.0, 1.0, 0.0, 0.0]);
        for n in 0..4 {
            assert_eq!(merge_min_max(&p.values, &m.values, n), merge(&p, &m).values[n]);
        }
    }

    #[test]
    fn counting_examples() {
        let s = series(DistanceSide::Minus, vec![3.0, 2.0, 1.0]);
        assert_eq!(counting(&s, 1.5), Counting { count: 2, saturated: false });
        assert_eq!(counting(&s, 5.0).count, 0);
        assert!(counting(&s, 0.5).saturated);
    }

    #[test]
    fn real_model_symbol_sides_agree() {
        let sym = make_model_symbol(c(0.5, 0.0), c(1.0, 0.0), c(0.3, 0.0), 1.0, CutoffSpec::default()).unwrap();
        let m = rho_minus(&sym, 10, 64).unwrap();
        let p = rho_plus(&sym, 10, 64).unwrap();
        for (a, b) in m.values.iter().zip(&p.values) {
            assert!((a - b).abs() <= 1e-10 * m.values[0], "{a} {b}");
        }
        let b = bmo_norm(&sym, 64).unwrap();
        assert!((b.s0_minus - b.s0_plus).abs() <= 1e-10 * b.s0_minus);
    }

    #[test]
    fn conjugate_symbol_swaps_sides_exactly() {
        let sym = make_model_symbol(c(0.2, 0.1), c(1.0, -0.5), c(0.0, 0.7), 1.5, CutoffSpec::default()).unwrap();
        let opts = AakOptions {
            solver: Solver::Iterative,
            ..AakOptions::default()
        };
        let a = rho_plus_with(&sym.conjugate(), 8, 64, &opts).unwrap();
        let b = rho_minus_with(&sym, 8, 64, &opts).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.tail_proxy, b.tail_proxy);
    }

    #[test]
    fn report_omits_sides_with_zero_limit() {
        let sym = make_model_symbol(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), 1.0, CutoffSpec::default()).unwrap();
        let r = report(&sym, 8, 32).unwrap();
        assert!(r.ratios.is_empty());
        assert!(!r.flags.is_empty());
        let sym = make_model_symbol(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), 1.0, CutoffSpec::default()).unwrap();
        let r = report(&sym, 8, 32).unwrap();
        assert!((r.prediction.a_minus - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert_eq!(r.ratios.iter().filter(|row| row.side == DistanceSide::Minus).count(), 8);
        assert_eq!(r.merged.values.len(), 18);
    }

    #[test]
    fn rejects_oversized_request() {
        let sym = SymbolSpec::zero();
        assert!(rho_minus(&sym, 9, 8).is_err());
    }
}
