//! Symbols with finitely many logarithmic singularities on the unit circle.
//!
//! Near a singular point `zeta = e^{i phi}` and in the local angle
//! `theta = arg(mu) - phi`, a singularity contributes
//!
//! ```text
//! sum_{j=0,1} sum_{s=+,-} v_{j,s}(theta) (-log|theta| + u_{j,s}(theta))^{1-j-alpha} 1_s(theta) chi0(theta)
//! ```
//!
//! with polynomial `v`, `u` and the flat bump cutoff `chi0`. Powers use the
//! principal branch, which is continuous on the support once validation has
//! checked that the base never touches the negative real axis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

pub const DEFAULT_C1: f64 = 0.25;
pub const DEFAULT_C: f64 = 0.5;
/// Lower bound for `|-log|theta| + u(theta)|` on the support.
pub const DEFAULT_EPS_MIN: f64 = 0.1;
pub const DEFAULT_TAYLOR_DEGREE: usize = 8;
/// Tolerance for `v0_plus(0) == v0_minus(0)` in normal mode.
pub const NORMAL_MODE_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-9;
const GRID_POINTS: usize = 4096;
const GRID_FLOOR: f64 = 1e-12;

/// Complex polynomial stored by its Taylor coefficients at 0.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly(pub Vec<C64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: C64) -> Self {
        if c == C64::new(0.0, 0.0) {
            Poly::zero()
        } else {
            Poly(vec![c])
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    /// Value at 0.
    pub fn at_zero(&self) -> C64 {
        self.0.first().copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.0
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> C64 {
        self.0
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    pub fn conj(&self) -> Self {
        Poly(self.0.iter().map(|c| c.conj()).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Which side of the singular point a branch lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JumpMode {
    #[default]
    Normal,
    Jump,
}

/// Smooth cutoff equal to 1 on `[-c1, c1]` and 0 for `|theta| >= c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSpec {
    pub c1: f64,
    pub c: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self {
            c1: DEFAULT_C1,
            c: DEFAULT_C,
        }
    }
}

impl CutoffSpec {
    pub fn new(c1: f64, c: f64) -> Result<Self> {
        let spec = Self { c1, c };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c1 < self.c && self.c < 1.0) {
            return Err(Error::InvalidSymbol(format!(
                "cutoff needs 0 < c1 < c < 1, got c1 = {}, c = {}",
                self.c1, self.c
            )));
        }
        Ok(())
    }

    pub fn value(&self, theta: f64) -> f64 {
        let a = theta.abs();
        if a <= self.c1 {
            1.0
        } else if a >= self.c {
            0.0
        } else {
            flat_step((self.c - a) / (self.c - self.c1))
        }
    }
}

/// `f(x) / (f(x) + f(1-x))` with `f(x) = exp(-1/x)`: 0 at 0, 1 at 1, flat at both.
pub fn flat_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    // f(x)/(f(x)+f(1-x)) = 1/(1 + exp(1/x - 1/(1-x)))
    let e = 1.0 / x - 1.0 / (1.0 - x);
    1.0 / (1.0 + e.exp())
}

/// Parameters of one singularity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularityParams {
    pub zeta: C64,
    pub alpha: f64,
    #[serde(default)]
    pub v0_plus: Poly,
    #[serde(default)]
    pub v0_minus: Poly,
    #[serde(default)]
    pub v1_plus: Poly,
    #[serde(default)]
    pub v1_minus: Poly,
    #[serde(default)]
    pub u0_plus: Poly,
    #[serde(default)]
    pub u0_minus: Poly,
    #[serde(default)]
    pub u1_plus: Poly,
    #[serde(default)]
    pub u1_minus: Poly,
    #[serde(default)]
    pub jump_mode: JumpMode,
}

impl SingularityParams {
    pub fn v(&self, j: usize, s: Sign) -> &Poly {
        match (j, s) {
            (0, Sign::Plus) => &self.v0_plus,
            (0, Sign::Minus) => &self.v0_minus,
            (1, Sign::Plus) => &self.v1_plus,
            (1, Sign::Minus) => &self.v1_minus,
            _ => panic!("branch index {j} out of range"),
        }
    }

    pub fn u(&self, j: usize, s: Sign) -> &Poly {
        match (j, s) {
            (0, Sign::Plus) => &self.u0_plus,
            (0, Sign::Minus) => &self.u0_minus,
            (1, Sign::Plus) => &self.u1_plus,
            (1, Sign::Minus) => &self.u1_minus,
            _ => panic!("branch index {j} out of range"),
        }
    }

    /// Angle of `zeta` in `(-pi, pi]`.
    pub fn angle(&self) -> f64 {
        self.zeta.arg()
    }

    /// `-log(s theta) + u_{j,s}(theta)`, principal logarithm. For real
    /// `theta` of sign `s` this is `-log|theta| + u(theta)`; it continues
    /// analytically into the upper half plane.
    #[inline]
    pub fn branch_base(&self, j: usize, s: Sign, theta: C64) -> C64 {
        -(theta * s.as_f64()).ln() + self.u(j, s).eval(theta)
    }

    /// Sum over `j` of the branch terms on side `s`, without cutoff.
    #[inline]
    pub fn branch_sum(&self, s: Sign, theta: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..2 {
            let v = self.v(j, s);
            if v.is_zero() {
                continue;
            }
            let p = 1.0 - j as f64 - self.alpha;
            let base = self.branch_base(j, s, theta);
            acc += v.eval(theta) * (base.ln() * p).exp();
        }
        acc
    }

    /// Same as [`Self::branch_sum`] but with the logarithm of `s theta`
    /// supplied by the caller, which keeps `ln y` exact for `theta = i y`.
    #[inline]
    pub fn branch_sum_with_log(&self, s: Sign, theta: C64, log_s_theta: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..2 {
            let v = self.v(j, s);
            if v.is_zero() {
                continue;
            }
            let p = 1.0 - j as f64 - self.alpha;
            let base = -log_s_theta + self.u(j, s).eval(theta);
            acc += v.eval(theta) * (base.ln() * p).exp();
        }
        acc
    }

    pub fn conj(&self) -> Self {
        Self {
            zeta: self.zeta,
            alpha: self.alpha,
            v0_plus: self.v0_plus.conj(),
            v0_minus: self.v0_minus.conj(),
            v1_plus: self.v1_plus.conj(),
            v1_minus: self.v1_minus.conj(),
            u0_plus: self.u0_plus.conj(),
            u0_minus: self.u0_minus.conj(),
            u1_plus: self.u1_plus.conj(),
            u1_minus: self.u1_minus.conj(),
            jump_mode: self.jump_mode,
        }
    }

    /// Multiplies every `v` by `s`.
    pub fn scale_v(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.v0_plus = self.v0_plus.scale(s);
        out.v0_minus = self.v0_minus.scale(s);
        out.v1_plus = self.v1_plus.scale(s);
        out.v1_minus = self.v1_minus.scale(s);
        out
    }

    fn all_polys(&self) -> [&Poly; 8] {
        [
            &self.v0_plus,
            &self.v0_minus,
            &self.v1_plus,
            &self.v1_minus,
            &self.u0_plus,
            &self.u0_minus,
            &self.u1_plus,
            &self.u1_minus,
        ]
    }

    /// Checks everything that does not depend on the cutoff.
    pub fn validate_local(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Domain(format!(
                "alpha must be positive and finite, got {}",
                self.alpha
            )));
        }
        if (self.zeta.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidSymbol(format!(
                "zeta must lie on the unit circle, |zeta| = {}",
                self.zeta.norm()
            )));
        }
        if self.all_polys().iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSymbol("non-finite polynomial coefficient".into()));
        }
        if self.jump_mode == JumpMode::Normal {
            let d = (self.v0_plus.at_zero() - self.v0_minus.at_zero()).norm();
            if d > NORMAL_MODE_TOL {
                return Err(Error::InvalidSymbol(format!(
                    "normal mode needs v0_plus(0) = v0_minus(0), they differ by {d:e}; use jump mode"
                )));
            }
        }
        Ok(())
    }

    /// Grid check that every branch base stays at least `eps_min` away from
    /// zero on `0 < |theta| <= c` and never crosses the principal cut.
    pub fn validate_branches(&self, c: f64, eps_min: f64) -> Result<()> {
        let grid = validation_grid(c);
        for s in Sign::BOTH {
            for j in 0..2 {
                let mut prev_arg: Option<f64> = None;
                for &x in &grid {
                    let theta = s.as_f64() * x;
                    let base = -x.ln() + self.u(j, s).eval_real(theta);
                    let m = base.norm();
                    if !(m >= eps_min) {
                        return Err(Error::InvalidSymbol(format!(
                            "branch (j={j}, {s:?}) base |-log|theta| + u(theta)| = {m:.3e} < {eps_min} at theta = {theta:.6e}"
                        )));
                    }
                    let a = base.arg();
                    if let Some(p) = prev_arg {
                        if (a - p).abs() > PI {
                            return Err(Error::InvalidSymbol(format!(
                                "branch (j={j}, {s:?}) base crosses the negative real axis near theta = {theta:.6e}"
                            )));
                        }
                    }
                    prev_arg = Some(a);
                }
            }
        }
        Ok(())
    }
}

/// Sorted points in `(0, c]`: geometric from `GRID_FLOOR` plus uniform.
fn validation_grid(c: f64) -> Vec<f64> {
    let mut pts = Vec::with_capacity(2 * GRID_POINTS);
    let ratio = (c / GRID_FLOOR).ln() / (GRID_POINTS - 1) as f64;
    for k in 0..GRID_POINTS {
        pts.push(GRID_FLOOR * (ratio * k as f64).exp());
    }
    for k in 1..=GRID_POINTS {
        pts.push(c * k as f64 / GRID_POINTS as f64);
    }
    pts.sort_by(|a, b| a.total_cmp(b));
    pts
}

/// One term `c mu^k` of a trigonometric polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub k: i64,
    pub c: C64,
}

/// `sum c_k mu^k` on the circle.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrigPoly(pub Vec<TrigTerm>);

impl TrigPoly {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        TrigPoly(terms)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, theta: f64) -> C64 {
        self.0
            .iter()
            .map(|t| t.c * C64::from_polar(1.0, t.k as f64 * theta))
            .sum()
    }

    /// Fourier coefficient at frequency `n`.
    pub fn coeff(&self, n: i64) -> C64 {
        self.0.iter().filter(|t| t.k == n).map(|t| t.c).sum()
    }

    /// `conj(f)`: term `c mu^k` becomes `conj(c) mu^{-k}`.
    pub fn conj(&self) -> Self {
        TrigPoly(
            self.0
                .iter()
                .map(|t| TrigTerm { k: -t.k, c: t.c.conj() })
                .collect(),
        )
    }
}

/// Options for symbol validation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationOptions {
    pub eps_min: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            eps_min: DEFAULT_EPS_MIN,
        }
    }
}

/// Raw serialized form; validated on conversion.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolSpecRepr {
    #[serde(default)]
    singularities: Vec<SingularityParams>,
    #[serde(default)]
    cutoff: CutoffSpec,
    #[serde(default)]
    smooth_extra: TrigPoly,
}

/// A validated symbol: singularities, cutoff and an optional smooth term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolSpecRepr", into = "SymbolSpecRepr")]
pub struct SymbolSpec {
    singularities: Vec<SingularityParams>,
    cutoff: CutoffSpec,
    smooth_extra: TrigPoly,
}

impl TryFrom<SymbolSpecRepr> for SymbolSpec {
    type Error = Error;
    fn try_from(r: SymbolSpecRepr) -> Result<Self> {
        SymbolSpec::new(r.singularities, r.cutoff, r.smooth_extra)
    }
}

impl From<SymbolSpec> for SymbolSpecRepr {
    fn from(s: SymbolSpec) -> Self {
        SymbolSpecRepr {
            singularities: s.singularities,
            cutoff: s.cutoff,
            smooth_extra: s.smooth_extra,
        }
    }
}

/// Result of pointwise evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Evaluation {
    Finite(C64),
    /// The angle hits singularity `index` where the symbol is unbounded.
    Singular { index: usize },
}

impl Evaluation {
    pub fn finite(self) -> Option<C64> {
        match self {
            Evaluation::Finite(z) => Some(z),
            Evaluation::Singular { .. } => None,
        }
    }
}

impl SymbolSpec {
    pub fn new(
        singularities: Vec<SingularityParams>,
        cutoff: CutoffSpec,
        smooth_extra: TrigPoly,
    ) -> Result<Self> {
        Self::with_options(singularities, cutoff, smooth_extra, ValidationOptions::default())
    }

    pub fn with_options(
        singularities: Vec<SingularityParams>,
        cutoff: CutoffSpec,
        smooth_extra: TrigPoly,
        opts: ValidationOptions,
    ) -> Result<Self> {
        cutoff.validate()?;
        for (i, p) in singularities.iter().enumerate() {
            p.validate_local()
                .and_then(|_| p.validate_branches(cutoff.c, opts.eps_min))
                .map_err(|e| prefix_error(e, i))?;
        }
        if let Some(first) = singularities.first() {
            if singularities.iter().any(|p| p.alpha != first.alpha) {
                return Err(Error::InvalidSymbol(
                    "all singularities must share the same alpha".into(),
                ));
            }
        }
        for a in 0..singularities.len() {
            for b in a + 1..singularities.len() {
                let d = wrap_angle(singularities[a].angle() - singularities[b].angle()).abs();
                if d < 2.0 * cutoff.c {
                    return Err(Error::InvalidSymbol(format!(
                        "singularities {a} and {b} are {d:.4} rad apart; cutoff supports need at least 2c = {}",
                        2.0 * cutoff.c
                    )));
                }
            }
        }
        if smooth_extra
            .0
            .iter()
            .any(|t| !(t.c.re.is_finite() && t.c.im.is_finite()))
        {
            return Err(Error::InvalidSymbol("non-finite smooth_extra coefficient".into()));
        }
        Ok(Self {
            singularities,
            cutoff,
            smooth_extra,
        })
    }

    pub fn zero() -> Self {
        Self {
            singularities: Vec::new(),
            cutoff: CutoffSpec::default(),
            smooth_extra: TrigPoly::default(),
        }
    }

    pub fn singularities(&self) -> &[SingularityParams] {
        &self.singularities
    }

    pub fn cutoff(&self) -> CutoffSpec {
        self.cutoff
    }

    pub fn smooth_extra(&self) -> &TrigPoly {
        &self.smooth_extra
    }

    /// Shared exponent, `None` for a symbol without singularities.
    pub fn alpha(&self) -> Option<f64> {
        self.singularities.first().map(|p| p.alpha)
    }

    /// Same singularities and cutoff with a different smooth term.
    pub fn with_smooth_extra(&self, extra: TrigPoly) -> Result<Self> {
        Self::new(self.singularities.clone(), self.cutoff, extra)
    }

    /// Value of a single singularity's contribution at local angle `x`.
    pub fn local_value(&self, p: &SingularityParams, x: f64) -> C64 {
        if x == 0.0 || x.abs() >= self.cutoff.c {
            return C64::new(0.0, 0.0);
        }
        let s = if x > 0.0 { Sign::Plus } else { Sign::Minus };
        p.branch_sum(s, C64::new(x, 0.0)) * self.cutoff.value(x)
    }

    /// `omega(e^{i theta})`.
    pub fn evaluate(&self, theta: f64) -> Evaluation {
        let mut acc = self.smooth_extra.eval(theta);
        for (i, p) in self.singularities.iter().enumerate() {
            let x = wrap_angle(theta - p.angle());
            if x == 0.0 {
                let unbounded = p.alpha <= 1.0
                    && (p.v0_plus.at_zero() != C64::new(0.0, 0.0)
                        || p.v0_minus.at_zero() != C64::new(0.0, 0.0));
                if unbounded {
                    return Evaluation::Singular { index: i };
                }
                continue;
            }
            acc += self.local_value(p, x);
        }
        Evaluation::Finite(acc)
    }

    /// The symbol of the complex-conjugate function.
    pub fn conjugate(&self) -> Self {
        Self {
            singularities: self.singularities.iter().map(|p| p.conj()).collect(),
            cutoff: self.cutoff,
            smooth_extra: self.smooth_extra.conj(),
        }
    }
}

fn prefix_error(e: Error, i: usize) -> Error {
    match e {
        Error::InvalidSymbol(m) => Error::InvalidSymbol(format!("singularity {i}: {m}")),
        Error::Domain(m) => Error::Domain(format!("singularity {i}: {m}")),
        other => other,
    }
}

/// Reduces an angle to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = x % two_pi;
    if y > PI {
        y -= two_pi;
    } else if y <= -PI {
        y += two_pi;
    }
    y
}

/// `v0 omega_0 + v_plus omega_+ + v_minus omega_-` at `zeta = 1`, `u = 0`.
pub fn make_model_symbol(
    v0: C64,
    v_plus: C64,
    v_minus: C64,
    alpha: f64,
    cutoff: CutoffSpec,
) -> Result<SymbolSpec> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "alpha must be positive (alpha = 0 symbols are not in VMO), got {alpha}"
        )));
    }
    let p = SingularityParams {
        zeta: C64::new(1.0, 0.0),
        alpha,
        v0_plus: Poly::constant(v0),
        v0_minus: Poly::constant(v0),
        v1_plus: Poly::constant(v_plus),
        v1_minus: Poly::constant(v_minus),
        u0_plus: Poly::zero(),
        u0_minus: Poly::zero(),
        u1_plus: Poly::zero(),
        u1_minus: Poly::zero(),
        jump_mode: JumpMode::Normal,
    };
    SymbolSpec::new(vec![p], cutoff, TrigPoly::default())
}

/// One term `v(z) (-log(zeta - z) + u(z))^{1-alpha}` of an analytic symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticSingularity {
    pub zeta: C64,
    pub v: Poly,
    #[serde(default)]
    pub u: Poly,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyticSymbolSpecRepr {
    singularities: Vec<AnalyticSingularity>,
    alpha: f64,
}

/// Symbol analytic in the disk with logarithmic boundary singularities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AnalyticSymbolSpecRepr", into = "AnalyticSymbolSpecRepr")]
pub struct AnalyticSymbolSpec {
    singularities: Vec<AnalyticSingularity>,
    alpha: f64,
}

impl TryFrom<AnalyticSymbolSpecRepr> for AnalyticSymbolSpec {
    type Error = Error;
    fn try_from(r: AnalyticSymbolSpecRepr) -> Result<Self> {
        AnalyticSymbolSpec::new(r.singularities, r.alpha)
    }
}

impl From<AnalyticSymbolSpec> for AnalyticSymbolSpecRepr {
    fn from(s: AnalyticSymbolSpec) -> Self {
        AnalyticSymbolSpecRepr {
            singularities: s.singularities,
            alpha: s.alpha,
        }
    }
}

/// Radial and angular resolution of the disk check.
const DISK_RADII: usize = 64;
const DISK_ANGLES: usize = 2048;

impl AnalyticSymbolSpec {
    pub fn new(singularities: Vec<AnalyticSingularity>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        for (i, s) in singularities.iter().enumerate() {
            if (s.zeta.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidSymbol(format!(
                    "analytic singularity {i}: zeta must lie on the unit circle"
                )));
            }
            check_disk_nonvanishing(s, DEFAULT_EPS_MIN)
                .map_err(|e| prefix_error(e, i))?;
        }
        Ok(Self {
            singularities,
            alpha,
        })
    }

    pub fn singularities(&self) -> &[AnalyticSingularity] {
        &self.singularities
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `sum v(z) (-log(zeta - z) + u(z))^{1-alpha}` for `|z| <= 1`, `z != zeta`.
    pub fn evaluate(&self, z: C64) -> C64 {
        self.singularities
            .iter()
            .map(|s| analytic_term(s, self.alpha, z))
            .sum()
    }

    /// Localized symbol: each singularity reduced to boundary form around its
    /// point and multiplied by the cutoff. Differs from the analytic symbol by
    /// a smooth function.
    pub fn to_symbol_spec(&self, cutoff: CutoffSpec, degree: usize) -> Result<SymbolSpec> {
        let params = (0..self.singularities.len())
            .map(|l| analytic_boundary_params(self, l, degree))
            .collect::<Result<Vec<_>>>()?;
        SymbolSpec::new(params, cutoff, TrigPoly::default())
    }
}

/// `log(zeta - z)` on the branch equal to `log(1 - r) + i psi0` at `z = r zeta`.
pub fn log_zeta_minus_z(zeta: C64, z: C64) -> C64 {
    (C64::new(1.0, 0.0) - z / zeta).ln() + C64::new(0.0, zeta.arg())
}

fn analytic_term(s: &AnalyticSingularity, alpha: f64, z: C64) -> C64 {
    let base = -log_zeta_minus_z(s.zeta, z) + s.u.eval(z);
    s.v.eval(z) * (base.ln() * (1.0 - alpha)).exp()
}

fn check_disk_nonvanishing(s: &AnalyticSingularity, eps_min: f64) -> Result<()> {
    let psi0 = s.zeta.arg();
    for ri in 0..=DISK_RADII {
        let r = ri as f64 / DISK_RADII as f64;
        let n_ang = if ri == 0 { 1 } else { DISK_ANGLES };
        for ai in 0..n_ang {
            let phi = psi0 + 2.0 * PI * ai as f64 / DISK_ANGLES as f64;
            let z = C64::from_polar(r, phi);
            if ri == DISK_RADII && ai == 0 {
                continue; // z = zeta itself, where the base is infinite
            }
            let base = -log_zeta_minus_z(s.zeta, z) + s.u.eval(z);
            if !(base.norm() >= eps_min) {
                return Err(Error::InvalidSymbol(format!(
                    "-log(zeta - z) + u(z) has modulus {:.3e} < {eps_min} at z = {z}",
                    base.norm()
                )));
            }
        }
    }
    Ok(())
}

/// Taylor coefficients at `theta = 0` of `p(zeta e^{i theta})`, up to `degree`.
fn rotate_taylor(p: &Poly, zeta: C64, degree: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); degree + 1];
    for (k, a) in p.coeffs().iter().enumerate() {
        let base = a * zeta.powu(k as u32);
        let ik = C64::new(0.0, k as f64);
        let mut term = base; // a zeta^k (ik)^n / n!
        for (n, slot) in out.iter_mut().enumerate() {
            if n > 0 {
                term = term * ik / n as f64;
            }
            *slot += term;
        }
    }
    out
}

/// Taylor coefficients of `log(sin(x)/x)` in `theta` with `x = theta/2`.
fn log_sinc_half_taylor(degree: usize) -> Vec<f64> {
    // log(sin x / x) = sum_{n>=1} (-1)^n 2^{2n-1} B_{2n} x^{2n} / (n (2n)!)
    const SERIES_X: [(usize, f64); 5] = [
        (2, -1.0 / 6.0),
        (4, -1.0 / 180.0),
        (6, -1.0 / 2835.0),
        (8, -1.0 / 37800.0),
        (10, -1.0 / 467_775.0),
    ];
    let mut out = vec![0.0; degree + 1];
    for (pow, c) in SERIES_X {
        if pow <= degree {
            out[pow] = c / 2f64.powi(pow as i32);
        }
    }
    out
}

/// Boundary parameters of singularity `ell` of an analytic symbol: `v1 = 0`,
/// `v0 = v(e^{i(psi0+theta)})`, `u0_(+/-) = +/- i pi/2 - i theta/2
/// - log(sin(theta/2)/(theta/2)) + u(e^{i(psi0+theta)}) - i psi0`, all
/// truncated to Taylor degree `degree`.
pub fn analytic_boundary_params(
    aspec: &AnalyticSymbolSpec,
    ell: usize,
    degree: usize,
) -> Result<SingularityParams> {
    let s = aspec.singularities.get(ell).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "singularity index {ell} out of range (have {})",
            aspec.singularities.len()
        ))
    })?;
    if degree > 10 {
        return Err(Error::InvalidArgument(format!(
            "Taylor degree {degree} exceeds the supported maximum of 10"
        )));
    }
    check_disk_nonvanishing(s, DEFAULT_EPS_MIN)?;
    let psi0 = s.zeta.arg();
    let v = Poly(rotate_taylor(&s.v, s.zeta, degree));
    let mut common = rotate_taylor(&s.u, s.zeta, degree);
    let sinc = log_sinc_half_taylor(degree);
    for (c, l) in common.iter_mut().zip(&sinc) {
        *c -= l;
    }
    common[0] -= C64::new(0.0, psi0);
    if degree >= 1 {
        common[1] -= C64::new(0.0, 0.5);
    }
    let mut plus = common.clone();
    let mut minus = common;
    plus[0] += C64::new(0.0, PI / 2.0);
    minus[0] -= C64::new(0.0, PI / 2.0);
    Ok(SingularityParams {
        zeta: s.zeta,
        alpha: aspec.alpha,
        v0_plus: v.clone(),
        v0_minus: v,
        v1_plus: Poly::zero(),
        v1_minus: Poly::zero(),
        u0_plus: Poly(plus.clone()),
        u0_minus: Poly(minus.clone()),
        // j = 1 branches carry v = 0; give them the same base so that the
        // nonvanishing check is meaningful
        u1_plus: Poly(plus),
        u1_minus: Poly(minus),
        jump_mode: JumpMode::Normal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cutoff_shape() {
        let cut = CutoffSpec::default();
        assert_eq!(cut.value(0.0), 1.0);
        assert_eq!(cut.value(0.25), 1.0);
        assert_eq!(cut.value(0.5), 0.0);
        assert_eq!(cut.value(-0.7), 0.0);
        for k in 0..100 {
            let x = 0.2 + 0.004 * k as f64;
            assert_eq!(cut.value(x), cut.value(-x));
            let v = cut.value(x);
            assert!((0.0..=1.0).contains(&v));
        }
        assert!((cut.value(0.375) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cutoff_is_flat_at_junctions() {
        // forward differences of order k at the junction, divided by h^k,
        // shrink with h because every derivative vanishes there
        let cut = CutoffSpec::default();
        for k in 1..=6usize {
            let mut prev = f64::INFINITY;
            for h in [4e-3, 2e-3, 1e-3] {
                let mut d = 0.0;
                for i in 0..=k {
                    let binom = (0..i).fold(1.0, |a, r| a * (k - r) as f64 / (r + 1) as f64);
                    let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
                    d += sign * binom * cut.value(0.25 + i as f64 * h);
                }
                let scaled = (d / h.powi(k as i32)).abs();
                assert!(scaled <= prev, "k={k} h={h}: {scaled} > {prev}");
                prev = scaled;
            }
            assert!(prev < 1e-6, "k={k}: {prev}");
        }
    }

    #[test]
    fn cutoff_rejects_bad_radii() {
        assert!(CutoffSpec::new(0.5, 0.25).is_err());
        assert!(CutoffSpec::new(0.0, 0.5).is_err());
        assert!(CutoffSpec::new(0.5, 1.0).is_err());
    }

    #[test]
    fn model_omega0_plateau_value() {
        let sym = make_model_symbol(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), 0.5, CutoffSpec::default())
            .unwrap();
        let theta = (-2.0f64).exp();
        let v = sym.evaluate(theta).finite().unwrap();
        assert!((v - c(2f64.sqrt(), 0.0)).norm() < 1e-14);
        assert_eq!(sym.evaluate(0.6), Evaluation::Finite(c(0.0, 0.0)));
        assert_eq!(sym.evaluate(0.0), Evaluation::Singular { index: 0 });
    }

    #[test]
    fn omega_plus_vanishes_on_negative_side() {
        let sym = make_model_symbol(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), 1.0, CutoffSpec::default())
            .unwrap();
        assert_eq!(sym.evaluate(-0.1), Evaluation::Finite(c(0.0, 0.0)));
        let v = sym.evaluate(0.1).finite().unwrap();
        assert!((v.re - 1.0 / (-(0.1f64).ln())).abs() < 1e-15);
        // bounded at the singular point when v0 = 0
        assert_eq!(sym.evaluate(0.0), Evaluation::Finite(c(0.0, 0.0)));
    }

    #[test]
    fn model_rejects_nonpositive_alpha() {
        let r = make_model_symbol(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), 0.0, CutoffSpec::default());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn conjugate_matches_pointwise_conjugate() {
        let sym = make_model_symbol(c(0.3, -1.0), c(0.0, 1.0), c(2.0, 0.5), 0.7, CutoffSpec::default())
            .unwrap()
            .with_smooth_extra(TrigPoly::new(vec![TrigTerm { k: -2, c: c(0.5, 0.25) }]))
            .unwrap();
        let conj = sym.conjugate();
        for k in 1..200 {
            let theta = -PI + 2.0 * PI * k as f64 / 200.0 + 1e-3;
            let a = sym.evaluate(theta).finite().unwrap();
            let b = conj.evaluate(theta).finite().unwrap();
            assert!((a.conj() - b).norm() <= 1e-15 * a.norm().max(1.0));
        }
        assert_eq!(conj.conjugate(), sym);
        let p = &conj.singularities()[0];
        assert_eq!(p.v1_plus.at_zero(), c(0.0, -1.0));
    }

    #[test]
    fn real_model_is_self_conjugate() {
        let sym = make_model_symbol(c(1.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0), 0.5, CutoffSpec::default())
            .unwrap();
        assert_eq!(sym.conjugate(), sym);
    }

    #[test]
    fn normal_mode_requires_matching_v0() {
        let mut p = make_model_symbol(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), 2.0, CutoffSpec::default())
            .unwrap()
            .singularities()[0]
            .clone();
        p.v0_minus = Poly::zero();
        assert!(SymbolSpec::new(vec![p.clone()], CutoffSpec::default(), TrigPoly::default()).is_err());
        p.jump_mode = JumpMode::Jump;
        assert!(SymbolSpec::new(vec![p], CutoffSpec::default(), TrigPoly::default()).is_ok());
    }

    #[test]
    fn rejects_vanishing_base() {
        // -log|theta| + u = 0 at |theta| = e^{-1} for u = -1
        let mut p = make_model_symbol(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), 2.0, CutoffSpec::default())
            .unwrap()
            .singularities()[0]
            .clone();
        p.u0_plus = Poly::constant(c(-1.0, 0.0));
        let err = SymbolSpec::new(vec![p], CutoffSpec::default(), TrigPoly::default()).unwrap_err();
        assert!(err.to_string().contains("base"), "{err}");
    }

    #[test]
    fn rejects_close_singularities() {
        let p = make_model_symbol(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), 2.0, CutoffSpec::default())
            .unwrap()
            .singularities()[0]
            .clone();
        let mut q = p.clone();
        q.zeta = C64::from_polar(1.0, 0.9);
        assert!(SymbolSpec::new(vec![p.clone(), q.clone()], CutoffSpec::default(), TrigPoly::default()).is_err());
        q.zeta = C64::from_polar(1.0, 1.1);
        assert!(SymbolSpec::new(vec![p, q], CutoffSpec::default(), TrigPoly::default()).is_ok());
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.1 - 2.0 * PI) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn evaluate_wraps_around_minus_pi() {
        let p = SingularityParams {
            zeta: c(-1.0, 0.0),
            ..make_model_symbol(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), 1.0, CutoffSpec::default())
                .unwrap()
                .singularities()[0]
                .clone()
        };
        let sym = SymbolSpec::new(vec![p], CutoffSpec::default(), TrigPoly::default()).unwrap();
        let a = sym.evaluate(PI - 0.1).finite().unwrap();
        let b = sym.evaluate(-PI + 0.1).finite().unwrap();
        assert!((a - b).norm() < 1e-14);
        assert!((a.re - 1.0 / (-(0.1f64).ln())).abs() < 1e-14);
    }

    fn unit_analytic(cst: f64, alpha: f64, zeta: C64) -> AnalyticSymbolSpec {
        AnalyticSymbolSpec::new(
            vec![AnalyticSingularity {
                zeta,
                v: Poly::constant(c(1.0, 0.0)),
                u: Poly::constant(c(cst, 0.0)),
            }],
            alpha,
        )
        .unwrap()
    }

    #[test]
    fn analytic_reduction_constants() {
        let a = unit_analytic(1.0, 0.5, c(1.0, 0.0));
        let p = analytic_boundary_params(&a, 0, 8).unwrap();
        assert!((p.u0_plus.at_zero() - c(1.0, PI / 2.0)).norm() < 1e-15);
        assert!((p.u0_minus.at_zero() - c(1.0, -PI / 2.0)).norm() < 1e-15);
        assert_eq!(p.v0_plus.at_zero(), c(1.0, 0.0));
        assert!(p.v1_plus.is_zero() && p.v1_minus.is_zero());
        let z = C64::from_polar(1.0, 2.0);
        let a = unit_analytic(1.0, 0.5, z);
        let p = analytic_boundary_params(&a, 0, 8).unwrap();
        let d = p.u0_plus.at_zero() - p.u0_minus.at_zero();
        assert!((d - c(0.0, PI)).norm() < 1e-15);
    }

    #[test]
    fn analytic_reduction_matches_direct_evaluation() {
        for (psi0, cst) in [(0.0, 1.0), (2.0, 1.0), (-2.5, 0.5)] {
            let zeta = C64::from_polar(1.0, psi0);
            let a = unit_analytic(cst, 0.5, zeta);
            let sym = a.to_symbol_spec(CutoffSpec::default(), 8).unwrap();
            for k in 1..=100 {
                for sgn in [1.0, -1.0] {
                    let theta = sgn * 0.25 * k as f64 / 100.0;
                    let direct = a.evaluate(C64::from_polar(1.0, psi0 + theta));
                    let reduced = sym.evaluate(psi0 + theta).finite().unwrap();
                    let rel = (direct - reduced).norm() / direct.norm();
                    assert!(rel < 1e-10, "psi0={psi0} theta={theta}: {rel:e}");
                }
            }
        }
    }

    #[test]
    fn analytic_rejects_vanishing_base() {
        // -log(1 - z) + u vanishes at z = 0 for u = 0
        let r = AnalyticSymbolSpec::new(
            vec![AnalyticSingularity {
                zeta: c(1.0, 0.0),
                v: Poly::constant(c(1.0, 0.0)),
                u: Poly::zero(),
            }],
            0.5,
        );
        assert!(r.is_err());
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let sym = make_model_symbol(c(2.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), 2.0, CutoffSpec::default())
            .unwrap();
        let s = serde_json::to_string(&sym).unwrap();
        let back: SymbolSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sym);
        let bad = s.replace("\"c1\":0.25", "\"c1\":0.75");
        assert!(serde_json::from_str::<SymbolSpec>(&bad).is_err());
        let unknown = s.replacen('{', "{\"bogus\":1,", 1);
        assert!(serde_json::from_str::<SymbolSpec>(&unknown).is_err());
    }

    #[test]
    fn trig_poly_coefficients() {
        let t = TrigPoly::new(vec![
            TrigTerm { k: -3, c: c(1.0, 0.0) },
            TrigTerm { k: 2, c: c(0.0, 2.0) },
        ]);
        assert_eq!(t.coeff(-3), c(1.0, 0.0));
        assert_eq!(t.coeff(0), c(0.0, 0.0));
        assert_eq!(t.conj().coeff(-2), c(0.0, -2.0));
        let v = t.eval(0.3);
        let expected = C64::from_polar(1.0, -0.9) + c(0.0, 2.0) * C64::from_polar(1.0, 0.6);
        assert!((v - expected).norm() < 1e-15);
    }
}
