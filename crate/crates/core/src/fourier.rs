//! Fourier coefficients of log-singular symbols.
//!
//! Two independent evaluators are provided. [`coeff_quadrature`] integrates on
//! the real line with panels graded toward each singular point and resolved
//! against the oscillation. [`coeff_contour`] rotates the part of the integral
//! where the cutoff equals 1 onto the imaginary axis, where it becomes a
//! Laplace-type integral without oscillation, and handles the remaining smooth
//! pieces directly.
//!
//! Around a singularity at angle `phi`, with local angle `x`,
//! `omega^(-j) = sum_l zeta_l^j (1/2pi) int omega_l(x) e^{ijx} dx + extra_{-j}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{b_coefficient, b_tilde, has_jump};
use crate::error::{Error, Result};
use crate::quad::{integrate_panels, uniform_panels, Estimate};
use crate::symbol::{CutoffSpec, Poly, Sign, SingularityParams, SymbolSpec, TrigPoly};
use crate::C64;

/// Discarded core radius is `e^{-CORE_EXPONENT}`.
pub const CORE_EXPONENT: f64 = 40.0;
pub const DEFAULT_KAPPA_MAX: f64 = 0.3;
const KAPPA_MIN: f64 = 1e-3;
/// Beyond this `t` the smooth pieces of the contour split are bounded, not computed.
pub const DEFAULT_SMOOTH_DROP_T: f64 = 1e6;
/// Default switch from quadrature to contour in series construction.
pub const DEFAULT_CROSSOVER: u64 = 10_000;
/// `exp(-LAPLACE_CUT)` is treated as zero.
const LAPLACE_CUT: f64 = 745.0;
/// Remainder diagnostics drop the smooth pieces once `t (c - c1)` exceeds this.
pub const DIAGNOSTIC_SMOOTH_DROP: f64 = 1000.0;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Extra factor multiplying the integrand, as a function of the local angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    One,
    /// `(e^{ix} - 1)^m`: turns a coefficient into its m-th forward difference
    /// for a singularity at `zeta = 1`.
    Diff(u32),
}

impl Weight {
    #[inline]
    fn at(self, x: C64) -> C64 {
        match self {
            Weight::One => C64::new(1.0, 0.0),
            Weight::Diff(0) => C64::new(1.0, 0.0),
            Weight::Diff(m) => {
                // e^{ix} - 1 = 2i sin(x/2) e^{ix/2}, no cancellation for small x
                let half = x * 0.5;
                let d = C64::new(0.0, 2.0) * half.sin() * (C64::new(0.0, 1.0) * half).exp();
                d.powu(m)
            }
        }
    }
}

/// Options for the real-line evaluator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    pub core_exponent: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            core_exponent: CORE_EXPONENT,
        }
    }
}

/// Options for the contour evaluator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourOptions {
    pub core_exponent: f64,
    pub kappa_max: f64,
    /// `None` always computes the smooth pieces.
    pub smooth_drop_t: Option<f64>,
    /// Add the integration-by-parts bound of dropped smooth pieces to the error.
    pub bound_dropped: bool,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self {
            core_exponent: CORE_EXPONENT,
            kappa_max: DEFAULT_KAPPA_MAX,
            smooth_drop_t: Some(DEFAULT_SMOOTH_DROP_T),
            bound_dropped: true,
        }
    }
}

/// One singularity's integrand: branch sums times a bump times a weight.
struct Local<'a> {
    p: &'a SingularityParams,
    bump: CutoffSpec,
    weight: Weight,
}

impl Local<'_> {
    #[inline]
    fn g(&self, s: Sign, theta: C64) -> C64 {
        self.p.branch_sum(s, theta) * self.weight.at(theta)
    }

    /// Integrand value on the real line at `x = s * r`, `r > 0`, without the phase.
    #[inline]
    fn real(&self, s: Sign, r: f64) -> C64 {
        let x = s.as_f64() * r;
        self.g(s, C64::new(x, 0.0)) * self.bump.value(r)
    }
}

/// `e^{i t x}`.
#[inline]
fn phase(t: f64, x: f64) -> C64 {
    C64::from_polar(1.0, t * x)
}

/// Panels on `(floor, c1]` graded toward 0 plus `[c1, c]`, all no wider than
/// a quarter period of `e^{itx}`.
fn real_line_panels(bump: CutoffSpec, t: f64, floor: f64) -> Vec<(f64, f64)> {
    let quarter = if t.abs() > 0.0 {
        PI / (2.0 * t.abs())
    } else {
        f64::INFINITY
    };
    let mut panels = graded_to_zero(floor, bump.c1, quarter);
    let w = quarter.min((bump.c - bump.c1) / 16.0);
    panels.extend(uniform_panels(bump.c1, bump.c, w));
    panels
}

/// Geometric ratio-2 panels from `floor` up to `hi`, each at most `max_width`.
fn graded_to_zero(floor: f64, hi: f64, max_width: f64) -> Vec<(f64, f64)> {
    crate::quad::graded_panels(floor, hi, max_width)
}

/// Panels for `int_floor^ymax f(y) e^{-t y} dy`: geometric toward 0, and no
/// wider than `8/t` where the exponential still matters at full precision.
fn laplace_panels(floor: f64, ymax: f64, t: f64) -> Vec<(f64, f64)> {
    let base = crate::quad::graded_panels(floor, ymax, f64::INFINITY);
    let fine_until = 64.0 / t;
    let w = 8.0 / t;
    let mut out = Vec::with_capacity(base.len() + 16);
    for (a, b) in base {
        if a < fine_until && b - a > w {
            out.extend(uniform_panels(a, b, w));
        } else {
            out.push((a, b));
        }
    }
    out
}

/// `int_{-c}^{c} G(x) bump(x) W(x) e^{itx} dx` on the real line.
fn local_quadrature(loc: &Local, t: f64, opts: &QuadratureOptions) -> Estimate {
    let floor = (-opts.core_exponent).exp();
    let panels = real_line_panels(loc.bump, t, floor);
    let mut total = Estimate::zero();
    for s in Sign::BOTH {
        if loc.p.v(0, s).is_zero() && loc.p.v(1, s).is_zero() {
            continue;
        }
        let sf = s.as_f64();
        let est = integrate_panels(&panels, |r| loc.real(s, r) * phase(t, sf * r));
        let core = 2.0 * floor * loc.real(s, floor).norm();
        total += est;
        total.abs_err += core;
    }
    total
}

/// Largest admissible contour height: every branch base stays away from zero
/// and off the principal cut on `[0, x_max] x [0, 2 kappa]`.
pub fn contour_height(p: &SingularityParams, x_max: f64, kappa_max: f64, eps_min: f64) -> Result<f64> {
    let mut kappa = kappa_max;
    while kappa >= KAPPA_MIN {
        if rectangle_ok(p, x_max, 2.0 * kappa, eps_min) {
            return Ok(kappa);
        }
        kappa *= 0.5;
    }
    Err(Error::Contour(format!(
        "no zero-free rectangle of height >= {KAPPA_MIN} above [0, {x_max}] for the branch bases"
    )))
}

fn rectangle_ok(p: &SingularityParams, x_max: f64, height: f64, eps_min: f64) -> bool {
    const NX: usize = 96;
    const NY: usize = 48;
    for s in Sign::BOTH {
        for j in 0..2 {
            if p.v(j, s).is_zero() {
                continue;
            }
            let mut prev_row: Vec<f64> = Vec::with_capacity(NX + 1);
            for iy in 0..=NY {
                let y = height * iy as f64 / NY as f64;
                let mut row = Vec::with_capacity(NX + 1);
                for ix in 0..=NX {
                    let x = x_max * ix as f64 / NX as f64;
                    if ix == 0 && iy == 0 {
                        row.push(0.0);
                        continue;
                    }
                    let theta = C64::new(s.as_f64() * x, y);
                    let base = p.branch_base(j, s, theta);
                    if !(base.norm() >= eps_min) {
                        return false;
                    }
                    let a = base.arg();
                    if let Some(&left) = row.last() {
                        if ix > 0 && (a - left).abs() > PI / 2.0 {
                            return false;
                        }
                    }
                    if iy > 0 && (a - prev_row[ix]).abs() > PI / 2.0 {
                        return false;
                    }
                    row.push(a);
                }
                prev_row = row;
            }
        }
    }
    true
}

/// Bound for the smooth pieces after two integrations by parts.
fn smooth_group_bound(loc: &Local, s: Sign, t: f64, kappa: f64) -> f64 {
    let (c1, c) = (loc.bump.c1, loc.bump.c);
    let h = 1e-4 * (c - c1);
    let second = |f: &dyn Fn(f64) -> C64, x: f64| (f(x + h) - 2.0 * f(x) + f(x - h)).norm() / (h * h);
    let real = |r: f64| loc.real(s, r);
    let mut sup = 0.0f64;
    for k in 0..=64 {
        let r = c1 + (c - c1) * k as f64 / 64.0;
        sup = sup.max(second(&real, r));
    }
    let g_at = |r: f64| loc.g(s, C64::new(s.as_f64() * r, 0.0));
    let g2 = second(&g_at, c1);
    ((c - c1) * sup + kappa * g2 / t) / (t * t)
}

/// Contour evaluation of the same integral as [`local_quadrature`], `t >= 2`.
fn local_contour(loc: &Local, t: f64, kappa: f64, opts: &ContourOptions) -> Estimate {
    let floor = (-opts.core_exponent).exp();
    let x_turn = loc.bump.c1;
    let ymax = kappa.min(LAPLACE_CUT / t);
    let drop_smooth = opts.smooth_drop_t.is_some_and(|d| t > d);
    let i = C64::new(0.0, 1.0);
    let mut total = Estimate::zero();
    for s in Sign::BOTH {
        if loc.p.v(0, s).is_zero() && loc.p.v(1, s).is_zero() {
            continue;
        }
        let sf = s.as_f64();
        let half_pi = C64::new(0.0, sf * PI / 2.0);
        let mut side = Estimate::zero();

        // (0, i kappa): theta = i y, log(s i y) = ln y + s i pi/2
        let vpanels = laplace_panels(floor, ymax, t);
        let v = integrate_panels(&vpanels, |y| {
            let theta = C64::new(0.0, y);
            loc.p.branch_sum_with_log(s, theta, y.ln() + half_pi) * loc.weight.at(theta) * (-t * y).exp()
        });
        let core_theta = C64::new(0.0, floor);
        let core = 2.0 * floor * (loc.p.branch_sum_with_log(s, core_theta, floor.ln() + half_pi)
            * loc.weight.at(core_theta))
        .norm();
        side += v.scale(i);
        side.abs_err += core;

        if drop_smooth {
            if opts.bound_dropped {
                side.abs_err += smooth_group_bound(loc, s, t, kappa);
            }
        } else {
            // (i kappa, i kappa + s X), damped by e^{-kappa t}
            if kappa * t < LAPLACE_CUT {
                let hpanels = uniform_panels(0.0, x_turn, PI / (2.0 * t));
                let damp = (-kappa * t).exp();
                let h = integrate_panels(&hpanels, |r| {
                    let theta = C64::new(sf * r, kappa);
                    loc.g(s, theta) * phase(t, sf * r)
                });
                side += h.scale(C64::new(sf * damp, 0.0));
            }
            // (s X + i kappa, s X): theta = s X + i y
            let p3panels = laplace_panels_from_zero(ymax, t);
            let p3 = integrate_panels(&p3panels, |y| {
                let theta = C64::new(sf * x_turn, y);
                loc.g(s, theta) * (-t * y).exp()
            });
            side += p3.scale(-i * phase(t, sf * x_turn));
            // the rest of the real line, [X, c], with the bump
            let spanels = uniform_panels(x_turn, loc.bump.c, (PI / (2.0 * t)).min((loc.bump.c - x_turn) / 16.0));
            let sm = integrate_panels(&spanels, |r| loc.real(s, r) * phase(t, sf * r));
            // the contour pieces carry the orientation sign, the real piece does not
            side = side.scale(C64::new(sf, 0.0));
            side += sm;
            total += side;
            continue;
        }
        total += side.scale(C64::new(sf, 0.0));
    }
    total
}

/// Panels on `[0, ymax]` for a smooth integrand times `e^{-ty}`.
fn laplace_panels_from_zero(ymax: f64, t: f64) -> Vec<(f64, f64)> {
    let first = (1.0 / t).min(ymax);
    let mut panels = vec![(0.0, first)];
    if ymax > first {
        let mut a = first;
        while a < ymax {
            let b = (2.0 * a).min(ymax);
            if a < 64.0 / t && b - a > 8.0 / t {
                panels.extend(uniform_panels(a, b, 8.0 / t));
            } else {
                panels.push((a, b));
            }
            a = b;
        }
    }
    panels
}

/// `(1/2pi) int_{-pi}^{pi} extra(e^{i theta}) e^{i t theta} d theta`.
fn extra_coefficient(extra: &TrigPoly, t: f64) -> C64 {
    if t.fract() == 0.0 {
        return extra.coeff(-(t as i64));
    }
    extra
        .0
        .iter()
        .map(|term| {
            let w = term.k as f64 + t;
            term.c * (PI * w).sin() / (PI * w)
        })
        .sum()
}

fn zeta_phase(p: &SingularityParams, t: f64) -> C64 {
    C64::from_polar(1.0, t * p.angle())
}

fn check_phase_support(sym: &SymbolSpec, t: f64) -> Result<()> {
    if t.fract() != 0.0 {
        let c = sym.cutoff().c;
        if sym.singularities().iter().any(|p| p.angle().abs() + c > PI) {
            return Err(Error::Unsupported(
                "non-integer t with a cutoff support crossing theta = pi".into(),
            ));
        }
    }
    Ok(())
}

/// `omega^(-j) = (1/2pi) int omega(e^{i theta}) e^{i j theta} d theta` by panel quadrature.
pub fn coeff_quadrature(sym: &SymbolSpec, j: i64) -> Estimate {
    coeff_quadrature_with(sym, j, &QuadratureOptions::default())
}

pub fn coeff_quadrature_with(sym: &SymbolSpec, j: i64, opts: &QuadratureOptions) -> Estimate {
    let t = j as f64;
    let mut total = Estimate {
        value: extra_coefficient(sym.smooth_extra(), t),
        abs_err: 0.0,
    };
    for p in sym.singularities() {
        let loc = Local {
            p,
            bump: sym.cutoff(),
            weight: Weight::One,
        };
        total += local_quadrature(&loc, t, opts).scale(zeta_phase(p, t) / (2.0 * PI));
    }
    total
}

/// `(1/2pi) Omega^(-t)` by contour rotation, `t >= 2`.
pub fn coeff_contour(sym: &SymbolSpec, t: f64) -> Result<Estimate> {
    coeff_contour_with(sym, t, Weight::One, &ContourOptions::default())
}

pub fn coeff_contour_with(sym: &SymbolSpec, t: f64, weight: Weight, opts: &ContourOptions) -> Result<Estimate> {
    if !(t >= 2.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("contour evaluator needs t >= 2, got {t}")));
    }
    check_phase_support(sym, t)?;
    let mut total = Estimate {
        value: if weight == Weight::One {
            extra_coefficient(sym.smooth_extra(), t)
        } else {
            zero()
        },
        abs_err: 0.0,
    };
    for p in sym.singularities() {
        let kappa = contour_height(p, sym.cutoff().c1, opts.kappa_max, crate::symbol::DEFAULT_EPS_MIN)?;
        let loc = Local {
            p,
            bump: sym.cutoff(),
            weight,
        };
        total += local_contour(&loc, t, kappa, opts).scale(zeta_phase(p, t) / (2.0 * PI));
    }
    Ok(total)
}

/// Which side of the Hankel pair a series belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesSide {
    /// `h(j) = omega^(-1-j)`, the series of `K(omega)`.
    Minus,
    /// `h(j) = conj(omega^(1+j))`, the series of `K(conj omega)`.
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Quadrature,
    Contour,
    Asymptotic,
    Exact,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Quadrature => "quadrature",
            Provenance::Contour => "contour",
            Provenance::Asymptotic => "asymptotic",
            Provenance::Exact => "exact",
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadrature" => Ok(Provenance::Quadrature),
            "contour" => Ok(Provenance::Contour),
            "asymptotic" => Ok(Provenance::Asymptotic),
            "exact" => Ok(Provenance::Exact),
            other => Err(Error::InvalidArgument(format!("unknown provenance {other:?}"))),
        }
    }
}

/// Coefficient sequence `h(0..J)` with per-entry error estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    pub side: SeriesSide,
    pub values: Vec<C64>,
    pub accuracy: Vec<f64>,
    pub provenance: Vec<Provenance>,
}

impl FourierSeries {
    /// Series with exactly known entries.
    pub fn exact(side: SeriesSide, values: Vec<C64>) -> Self {
        let n = values.len();
        Self {
            side,
            values,
            accuracy: vec![0.0; n],
            provenance: vec![Provenance::Exact; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// First `n` entries.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            side: self.side,
            values: self.values[..n].to_vec(),
            accuracy: self.accuracy[..n].to_vec(),
            provenance: self.provenance[..n].to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodMode {
    /// Quadrature below the crossover, contour above.
    #[default]
    Auto,
    Quadrature,
    Contour,
}

/// How coefficients are computed for a series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MethodPolicy {
    pub mode: MethodMode,
    pub crossover: u64,
    /// Width of the near-singularity window is `near_factor / J` (clamped).
    pub near_factor: f64,
}

impl Default for MethodPolicy {
    fn default() -> Self {
        Self {
            mode: MethodMode::Auto,
            crossover: DEFAULT_CROSSOVER,
            near_factor: 256.0,
        }
    }
}

impl MethodPolicy {
    fn use_contour(&self, n: u64) -> bool {
        match self.mode {
            MethodMode::Auto => n >= self.crossover && n >= 2,
            MethodMode::Quadrature => false,
            MethodMode::Contour => n >= 2,
        }
    }
}

/// Far-part grid needs this many samples per unit of `1/width` beyond `J`.
const FAR_RESOLUTION: f64 = 2500.0;
const FAR_MAX_LOG2: u32 = 24;

/// Builds `h(0..J)` for one side.
///
/// Each singularity is split with a narrow bump `beta` of width about
/// `near_factor / J`. The near part `omega beta` is integrated per index with
/// the evaluator chosen by the policy; the far part `omega (1 - beta)` is
/// smooth and periodic, so all its coefficients come from one FFT of samples.
pub fn make_series(sym: &SymbolSpec, side: SeriesSide, len: usize, policy: &MethodPolicy) -> Result<FourierSeries> {
    if len == 0 {
        return Err(Error::InvalidArgument("series length must be at least 1".into()));
    }
    let source = match side {
        SeriesSide::Minus => sym.clone(),
        SeriesSide::Plus => sym.conjugate(),
    };
    let sym = &source;
    // h(j) = omega^(-n) with n = j + 1
    let n_max = len as u64;
    let mut values: Vec<C64> = (1..=n_max)
        .map(|n| sym.smooth_extra().coeff(-(n as i64)))
        .collect();
    let mut accuracy = vec![0.0; len];
    let provenance: Vec<Provenance> = (1..=n_max)
        .map(|n| {
            if policy.use_contour(n) {
                Provenance::Contour
            } else {
                Provenance::Quadrature
            }
        })
        .collect();
    if sym.singularities().is_empty() {
        return Ok(FourierSeries {
            side,
            values,
            accuracy,
            provenance,
        });
    }

    let cut = sym.cutoff();
    let d2 = (policy.near_factor / n_max as f64).clamp(1e-3, cut.c1 / 2.0);
    let near = CutoffSpec { c1: d2 / 2.0, c: d2 };

    // far part
    let width = (near.c - near.c1).min(cut.c - cut.c1);
    let m_needed = 2.0 * (FAR_RESOLUTION / width + n_max as f64);
    let log2 = (m_needed.log2().ceil() as u32).clamp(4, FAR_MAX_LOG2);
    let m = 1usize << log2;
    let samples = far_samples(sym, near, m);
    let fine = inverse_dft(&samples);
    let coarse: Vec<C64> = {
        let half: Vec<C64> = samples.iter().step_by(2).copied().collect();
        inverse_dft(&half)
    };
    for (idx, n) in (1..=n_max as usize).enumerate() {
        values[idx] += fine[n % m];
        accuracy[idx] += (fine[n % m] - coarse[n % (m / 2)]).norm() + 1e-16 * fine[n % m].norm();
    }

    // near part
    let copts = ContourOptions {
        smooth_drop_t: None,
        ..ContourOptions::default()
    };
    let qopts = QuadratureOptions::default();
    let kappas: Vec<f64> = sym
        .singularities()
        .iter()
        .map(|p| contour_height(p, near.c1, copts.kappa_max, crate::symbol::DEFAULT_EPS_MIN))
        .collect::<Result<_>>()?;
    let near_vals: Vec<Estimate> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let t = n as f64;
            let mut acc = Estimate::zero();
            for (p, &kappa) in sym.singularities().iter().zip(&kappas) {
                let loc = Local {
                    p,
                    bump: near,
                    weight: Weight::One,
                };
                let e = if policy.use_contour(n) {
                    local_contour(&loc, t, kappa, &copts)
                } else {
                    local_quadrature(&loc, t, &qopts)
                };
                acc += e.scale(zeta_phase(p, t) / (2.0 * PI));
            }
            acc
        })
        .collect();
    for (idx, e) in near_vals.into_iter().enumerate() {
        values[idx] += e.value;
        accuracy[idx] += e.abs_err;
    }
    Ok(FourierSeries {
        side,
        values,
        accuracy,
        provenance,
    })
}

/// Samples of `sum_l omega_l (1 - beta)` at `theta_k = 2 pi k / m`.
fn far_samples(sym: &SymbolSpec, near: CutoffSpec, m: usize) -> Vec<C64> {
    let cut = sym.cutoff();
    let mut out = vec![zero(); m];
    let h = 2.0 * PI / m as f64;
    for p in sym.singularities() {
        let phi = p.angle();
        // indices whose local angle lies in (near.c1, cut.c) on either side
        let k_lo = ((phi - cut.c) / h).floor() as i64;
        let k_hi = ((phi + cut.c) / h).ceil() as i64;
        for k in k_lo..=k_hi {
            let x = k as f64 * h - phi;
            let r = x.abs();
            if r <= near.c1 || r >= cut.c {
                continue;
            }
            let s = if x > 0.0 { Sign::Plus } else { Sign::Minus };
            let w = (1.0 - near.value(r)) * cut.value(r);
            let v = p.branch_sum(s, C64::new(x, 0.0)) * w;
            let idx = k.rem_euclid(m as i64) as usize;
            out[idx] += v;
        }
    }
    out
}

/// `out[n] = (1/m) sum_k f_k e^{2 pi i n k / m}`.
fn inverse_dft(samples: &[C64]) -> Vec<C64> {
    let m = samples.len();
    let mut buf: Vec<Complex64> = samples.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(m);
    fft.process(&mut buf);
    let inv = 1.0 / m as f64;
    buf.iter_mut().for_each(|z| *z *= inv);
    buf
}

/// Leading term `sum_l b_l j^{-1} (log j)^{-e} zeta_l^j` of `omega^(-j)`,
/// `e = alpha` (or `alpha - 1` when a jump is present).
pub fn coeff_asymptotic(sym: &SymbolSpec, j: u64) -> Result<C64> {
    if j < 2 {
        return Err(Error::Domain(format!("asymptotic form needs j >= 2, got {j}")));
    }
    let Some((bs, e)) = leading_data(sym)? else {
        return Ok(zero());
    };
    let t = j as f64;
    let f = 1.0 / (t * t.ln().powf(e));
    Ok(sym
        .singularities()
        .iter()
        .zip(bs)
        .map(|(p, b)| b * f * zeta_phase(p, t))
        .sum())
}

/// Per-singularity leading coefficients of the minus side and their exponent.
fn leading_data(sym: &SymbolSpec) -> Result<Option<(Vec<C64>, f64)>> {
    let Some(alpha) = sym.alpha() else {
        return Ok(None);
    };
    let jump = sym.singularities().iter().any(has_jump);
    let bs = sym
        .singularities()
        .iter()
        .map(|p| {
            if jump {
                if has_jump(p) {
                    b_tilde(p)
                } else {
                    Ok(zero())
                }
            } else {
                b_coefficient(p)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some((bs, if jump { alpha - 1.0 } else { alpha })))
}

/// m-th forward difference `g(j+1) - g(j)` applied m times.
pub fn finite_difference(seq: &[C64], m: usize) -> Result<Vec<C64>> {
    if m >= seq.len().max(1) && !(m == 0 && seq.is_empty()) {
        return Err(Error::InvalidArgument(format!(
            "difference order {m} needs at least {} entries, have {}",
            m + 1,
            seq.len()
        )));
    }
    let mut cur = seq.to_vec();
    for _ in 0..m {
        cur = cur.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(cur)
}

/// m-th forward difference at `t` of `f(t) = t^{-1} (ln t)^{-e}`, from the
/// series `Delta^m f = sum_{n>=m} (m!/n!) S(n, m) f^{(n)}` with Stirling
/// numbers of the second kind. Free of the cancellation of direct differencing.
pub fn leading_difference(e: f64, m: u32, t: f64) -> f64 {
    if m == 0 {
        return 1.0 / (t * t.ln().powf(e));
    }
    let l = t.ln();
    let m = m as usize;
    let n_max = m + 60;
    // Stirling numbers S(n, m) for n = m..=n_max
    let mut stirling = vec![vec![0.0f64; m + 1]; n_max + 1];
    stirling[0][0] = 1.0;
    for n in 1..=n_max {
        for k in 1..=m.min(n) {
            stirling[n][k] = k as f64 * stirling[n - 1][k] + stirling[n - 1][k - 1];
        }
    }
    // f^{(n)}(t) = t^{-1-n} sum_i c[i] l^{-e-i}
    let mut c = vec![1.0f64];
    let mut total = 0.0;
    let mut fact_ratio = 1.0; // m!/n!
    for n in 0..=n_max {
        if n >= m {
            let deriv: f64 = c
                .iter()
                .enumerate()
                .map(|(i, ci)| ci * l.powf(-e - i as f64))
                .sum::<f64>()
                * t.powi(-1 - n as i32);
            let term = fact_ratio * stirling[n][m] * deriv;
            total += term;
            if n > m + 2 && term.abs() < 1e-20 * total.abs() {
                break;
            }
            fact_ratio /= (n + 1) as f64;
        }
        // differentiate once more
        let mut next = vec![0.0; c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i] += -((n + 1) as f64) * ci;
            next[i + 1] += -(e + i as f64) * ci;
        }
        c = next;
    }
    total
}

/// Scaled remainders of the leading-term law.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemainderDiagnostic {
    pub m: u32,
    pub exponent: f64,
    pub indices: Vec<u64>,
    /// `|g^{(m)}(j)| j^{1+m} (log j)^{e+1}`.
    pub scaled_remainders: Vec<f64>,
    /// Error estimates of the differenced coefficients, scaled the same way.
    /// Where `smooth_dropped` is set they cover the computed pieces only.
    pub scaled_errors: Vec<f64>,
    /// The smooth pieces of the contour split were not computed at this index.
    pub smooth_dropped: Vec<bool>,
}

fn scale_factor(j: f64, m: u32, e: f64) -> f64 {
    j.powi(1 + m as i32) * j.ln().powf(e + 1.0)
}

/// Remainder diagnostic from a consecutive run of coefficients
/// `seq[i] = omega^(-(j0 + i))`: subtract the leading term, difference m
/// times, scale. Reports indices `j0 ..= j0 + len - 1 - m`.
pub fn remainder_from_sequence(j0: u64, seq: &[C64], b: C64, e: f64, m: u32) -> Result<RemainderDiagnostic> {
    if j0 < 2 {
        return Err(Error::Domain("remainder diagnostic needs j >= 2".into()));
    }
    let g: Vec<C64> = seq
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let t = (j0 + i as u64) as f64;
            v - b / (t * t.ln().powf(e))
        })
        .collect();
    let d = finite_difference(&g, m as usize)?;
    let indices: Vec<u64> = (0..d.len() as u64).map(|i| j0 + i).collect();
    let scaled = d
        .iter()
        .zip(&indices)
        .map(|(v, &j)| v.norm() * scale_factor(j as f64, m, e))
        .collect();
    Ok(RemainderDiagnostic {
        m,
        exponent: e,
        indices: indices.clone(),
        scaled_remainders: scaled,
        scaled_errors: vec![0.0; indices.len()],
        smooth_dropped: vec![false; indices.len()],
    })
}

/// Scaled remainders `|g^{(m)}(j)| j^{1+m} (log j)^{e+1}` for a single
/// singularity at `zeta = 1`, with `omega^(-j)` from the contour evaluator.
/// The m-th difference of the coefficients is computed in one integral with
/// weight `(e^{ix} - 1)^m`, and that of the leading term from its derivative
/// series, so no cancellation between neighbouring indices occurs.
pub fn remainder_diagnostic(sym: &SymbolSpec, j_list: &[u64], m: u32) -> Result<RemainderDiagnostic> {
    let ps = sym.singularities();
    if ps.len() != 1 || (ps[0].zeta - C64::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(Error::Unsupported(
            "remainder diagnostic needs exactly one singularity at zeta = 1".into(),
        ));
    }
    if let Some(j) = j_list.iter().find(|&&j| j < 2) {
        return Err(Error::Domain(format!("remainder diagnostic needs j >= 2, got {j}")));
    }
    let (bs, e) = leading_data(sym)?.expect("one singularity present");
    let b = bs[0];
    let cut = sym.cutoff();
    let drop_t = DIAGNOSTIC_SMOOTH_DROP / (cut.c - cut.c1);
    let opts = ContourOptions {
        smooth_drop_t: Some(drop_t),
        bound_dropped: false,
        ..ContourOptions::default()
    };
    let rows: Vec<(f64, f64)> = j_list
        .par_iter()
        .map(|&j| -> Result<(f64, f64)> {
            let t = j as f64;
            let est = coeff_contour_with(sym, t, Weight::Diff(m), &opts)?;
            let extra = extra_difference(sym.smooth_extra(), j, m);
            let g = est.value + extra - b * leading_difference(e, m, t);
            let s = scale_factor(t, m, e);
            Ok((g.norm() * s, est.abs_err * s))
        })
        .collect::<Result<_>>()?;
    Ok(RemainderDiagnostic {
        m,
        exponent: e,
        indices: j_list.to_vec(),
        scaled_remainders: rows.iter().map(|r| r.0).collect(),
        scaled_errors: rows.iter().map(|r| r.1).collect(),
        smooth_dropped: j_list.iter().map(|&j| j as f64 > drop_t).collect(),
    })
}

fn extra_difference(extra: &TrigPoly, j: u64, m: u32) -> C64 {
    let mut acc = zero();
    let mut binom = 1.0;
    for i in 0..=m as u64 {
        let sign = if (m as u64 - i) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * extra.coeff(-((j + i) as i64));
        binom = binom * (m as u64 - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// `int_0^c (-log y)^{-alpha} y^m e^{-yt} dy` with panels graded toward 0.
pub fn laplace_log_moment(alpha: f64, m: u32, c: f64, t: f64) -> Result<Estimate> {
    if !(c > 0.0 && c < 1.0) || !(t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "laplace_log_moment needs 0 < c < 1 and t > 0, got c = {c}, t = {t}"
        )));
    }
    let floor = (-CORE_EXPONENT).exp().min(c / 4.0);
    let ymax = c.min(LAPLACE_CUT / t);
    let panels = laplace_panels(floor, ymax, t);
    let f = |y: f64| (-y.ln()).powf(-alpha) * y.powi(m as i32) * (-t * y).exp();
    let mut est = integrate_panels(&panels, |y| C64::new(f(y), 0.0));
    est.abs_err += 2.0 * floor * f(floor);
    if ymax < c {
        est.abs_err += c * (-t * ymax).exp();
    }
    Ok(est)
}

/// `int (-log|x| + a)^{-alpha} 1_s(x) chi0(x) x^m e^{ixt} dx`, the oscillatory
/// integral of the two-term law, by the contour evaluator (`t >= 2`) or by
/// real-line quadrature.
pub fn oscillatory_log_integral(
    a: C64,
    alpha: f64,
    m: u32,
    sign: Sign,
    cutoff: CutoffSpec,
    t: f64,
    contour: bool,
) -> Result<Estimate> {
    let mut xm = vec![zero(); m as usize + 1];
    xm[m as usize] = C64::new(1.0, 0.0);
    let (vp, vm) = match sign {
        Sign::Plus => (Poly(xm), Poly::zero()),
        Sign::Minus => (Poly::zero(), Poly(xm)),
    };
    let p = SingularityParams {
        zeta: C64::new(1.0, 0.0),
        // the j = 1 branch has power -alpha' = 1 - 1 - alpha'
        alpha,
        v0_plus: Poly::zero(),
        v0_minus: Poly::zero(),
        v1_plus: vp,
        v1_minus: vm,
        u0_plus: Poly::zero(),
        u0_minus: Poly::zero(),
        u1_plus: Poly::constant(a),
        u1_minus: Poly::constant(a),
        jump_mode: crate::symbol::JumpMode::Normal,
    };
    p.validate_local()?;
    p.validate_branches(cutoff.c, crate::symbol::DEFAULT_EPS_MIN)?;
    let loc = Local {
        p: &p,
        bump: cutoff,
        weight: Weight::One,
    };
    if contour {
        if !(t >= 2.0) {
            return Err(Error::InvalidArgument(format!("contour evaluator needs t >= 2, got {t}")));
        }
        let opts = ContourOptions::default();
        let kappa = contour_height(&p, cutoff.c1, opts.kappa_max, crate::symbol::DEFAULT_EPS_MIN)?;
        Ok(local_contour(&loc, t, kappa, &opts))
    } else {
        Ok(local_quadrature(&loc, t, &QuadratureOptions::default()))
    }
}
