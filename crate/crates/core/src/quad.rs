//! Composite Gauss–Legendre quadrature on explicit panel lists.
//!
//! Every panel is integrated twice: once with the base rule on the whole
//! panel and once on its two halves. The halves are returned as the value and
//! the difference between the two as the error estimate.

use std::sync::OnceLock;

use num_complex::Complex64;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n` from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Points per panel of the base rule.
pub const BASE_ORDER: usize = 10;

/// The shared base rule.
pub fn base_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(BASE_ORDER))
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

#[inline]
fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

/// Integral estimate with an error estimate from panel bisection.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub abs_err: f64,
}

impl Estimate {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scale(self, s: Complex64) -> Self {
        Self {
            value: self.value * s,
            abs_err: self.abs_err * s.norm(),
        }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            abs_err: self.abs_err + rhs.abs_err,
        }
    }
}

impl std::ops::AddAssign for Estimate {
    fn add_assign(&mut self, rhs: Estimate) {
        *self = *self + rhs;
    }
}

/// Integrates `f` over the given panels. `f` receives the node and returns
/// the integrand value there.
pub fn integrate_panels<F>(panels: &[(f64, f64)], mut f: F) -> Estimate
where
    F: FnMut(f64) -> Complex64,
{
    let rule = base_rule();
    let mut fine = CompensatedSum::new();
    let mut err = 0.0;
    for &(a, b) in panels {
        let coarse = apply_rule(rule, a, b, &mut f);
        let mid = 0.5 * (a + b);
        let left = apply_rule(rule, a, mid, &mut f);
        let right = apply_rule(rule, mid, b, &mut f);
        let refined = left + right;
        fine.add(refined);
        err += (refined - coarse).norm();
    }
    Estimate {
        value: fine.value(),
        abs_err: err,
    }
}

/// Same as [`integrate_panels`] but without the refinement pass: one rule per
/// panel, no error estimate. Used where the caller supplies its own estimate.
pub fn integrate_panels_single<F>(panels: &[(f64, f64)], mut f: F) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    let rule = base_rule();
    let mut acc = CompensatedSum::new();
    for &(a, b) in panels {
        acc.add(apply_rule(rule, a, b, &mut f));
    }
    acc.value()
}

#[inline]
fn apply_rule<F>(rule: &GaussLegendre, a: f64, b: f64, f: &mut F) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Panels on `[lo, hi]`, geometrically graded toward `lo = 0`-like singular
/// ends: breakpoints `hi, hi/2, hi/4, ...` down to `floor`, then every panel
/// split so its width is at most `max_width`.
pub fn graded_panels(floor: f64, hi: f64, max_width: f64) -> Vec<(f64, f64)> {
    assert!(floor > 0.0 && hi > floor, "bad graded interval");
    let mut edges = vec![hi];
    let mut x = hi;
    while x * 0.5 > floor {
        x *= 0.5;
        edges.push(x);
    }
    edges.push(floor);
    edges.reverse();
    let mut panels = Vec::with_capacity(edges.len());
    for w in edges.windows(2) {
        push_split(&mut panels, w[0], w[1], max_width);
    }
    panels
}

/// Uniform panels on `[lo, hi]` of width at most `max_width`.
pub fn uniform_panels(lo: f64, hi: f64, max_width: f64) -> Vec<(f64, f64)> {
    let mut panels = Vec::new();
    if hi > lo {
        push_split(&mut panels, lo, hi, max_width);
    }
    panels
}

fn push_split(panels: &mut Vec<(f64, f64)>, a: f64, b: f64, max_width: f64) {
    let pieces = if max_width.is_finite() && max_width > 0.0 {
        ((b - a) / max_width).ceil().max(1.0) as usize
    } else {
        1
    };
    let h = (b - a) / pieces as f64;
    for k in 0..pieces {
        let lo = a + h * k as f64;
        let hi = if k + 1 == pieces { b } else { a + h * (k + 1) as f64 };
        panels.push((lo, hi));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(7);
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        // x^12 over [-1,1] = 2/13, exact for n = 7
        let val: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(12))
            .sum();
        assert!((val - 2.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn log_singularity_on_graded_panels() {
        // ∫_0^1 -ln x dx = 1
        let panels = graded_panels(1e-20, 1.0, f64::INFINITY);
        let est = integrate_panels(&panels, |x| Complex64::new(-x.ln(), 0.0));
        assert!((est.value.re - 1.0).abs() < 1e-14, "{:?}", est);
        assert!(est.abs_err < 1e-10);
    }

    #[test]
    fn oscillatory_uniform_panels() {
        // ∫_0^1 e^{i 500 x} dx
        let t = 500.0;
        let panels = uniform_panels(0.0, 1.0, std::f64::consts::PI / (2.0 * t));
        let est = integrate_panels(&panels, |x| Complex64::new(0.0, t * x).exp());
        let exact = (Complex64::new(0.0, t).exp() - 1.0) / Complex64::new(0.0, t);
        assert!((est.value - exact).norm() < 1e-15);
    }

    #[test]
    fn split_respects_width() {
        let p = uniform_panels(0.0, 1.0, 0.3);
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|(a, b)| b - a <= 0.3 + 1e-15));
        assert_eq!(p.last().unwrap().1, 1.0);
    }
}
