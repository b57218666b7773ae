//! Closed-form asymptotic constants and two-term expansions.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{factorial, gamma_prime_at_integer, ln_beta};
use crate::symbol::{AnalyticSymbolSpec, JumpMode, SingularityParams, SymbolSpec, NORMAL_MODE_TOL};
use crate::C64;

fn two_pi_i() -> C64 {
    C64::new(0.0, 2.0 * PI)
}

/// `kappa(alpha) = 2^{-alpha} pi^{1-2 alpha} B(1/(2 alpha), 1/2)^alpha`.
pub fn kappa(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("kappa needs alpha > 0, got {alpha}")));
    }
    let ln = -alpha * 2f64.ln() + (1.0 - 2.0 * alpha) * PI.ln() + alpha * ln_beta(0.5 / alpha, 0.5);
    Ok(ln.exp())
}

/// True when the singularity really has a jump in its leading coefficient.
pub fn has_jump(p: &SingularityParams) -> bool {
    p.jump_mode == JumpMode::Jump
        && (p.v0_plus.at_zero() - p.v0_minus.at_zero()).norm() > NORMAL_MODE_TOL
}

/// `b = (1-alpha) v0 (1/2 - (u0+(0) - u0-(0))/(2 pi i)) - (v1+(0) - v1-(0))/(2 pi i)`.
pub fn b_coefficient(p: &SingularityParams) -> Result<C64> {
    if has_jump(p) {
        return Err(Error::InvalidArgument(
            "b_coefficient needs a normal-mode singularity; use b_tilde for jumps".into(),
        ));
    }
    let v0 = p.v0_plus.at_zero();
    let du = p.u0_plus.at_zero() - p.u0_minus.at_zero();
    let dv = p.v1_plus.at_zero() - p.v1_minus.at_zero();
    Ok((1.0 - p.alpha) * v0 * (0.5 - du / two_pi_i()) - dv / two_pi_i())
}

/// `-(v0+(0) - v0-(0))/(2 pi i)`, the leading coefficient of a jump.
pub fn b_tilde(p: &SingularityParams) -> Result<C64> {
    if p.jump_mode != JumpMode::Jump {
        return Err(Error::InvalidArgument("b_tilde needs a jump-mode singularity".into()));
    }
    Ok(-(p.v0_plus.at_zero() - p.v0_minus.at_zero()) / two_pi_i())
}

/// `kappa(alpha) (sum |b|^{1/alpha})^alpha`.
pub fn a_coefficient(bs: &[C64], alpha: f64) -> Result<f64> {
    let k = kappa(alpha)?;
    Ok(k * power_sum(bs.iter().map(|b| b.norm()), alpha))
}

/// `(sum x^{1/alpha})^alpha`, with `0^{1/alpha} = 0`.
fn power_sum(xs: impl Iterator<Item = f64>, alpha: f64) -> f64 {
    let s: f64 = xs.filter(|x| *x > 0.0).map(|x| x.powf(1.0 / alpha)).sum();
    if s == 0.0 {
        0.0
    } else {
        s.powf(alpha)
    }
}

/// `((a+)^{1/alpha} + (a-)^{1/alpha})^alpha`.
pub fn merge_a(a_plus: f64, a_minus: f64, alpha: f64) -> f64 {
    if a_plus.is_infinite() || a_minus.is_infinite() {
        return f64::INFINITY;
    }
    power_sum([a_plus, a_minus].into_iter(), alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayMode {
    Normal,
    Jump,
}

/// Predicted limits of `n^decay * rho_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub alpha: f64,
    /// `alpha` in normal mode, `alpha - 1` when a jump is present.
    pub decay_exponent: f64,
    pub mode: DecayMode,
    /// False when a jump with `alpha <= 1` makes the operator non-compact.
    pub compact: bool,
    #[serde(serialize_with = "finite_or_null")]
    pub kappa: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub a_plus: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub a_minus: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub a_merged: f64,
    /// Leading coefficients of `omega`, one per singularity.
    pub b_minus: Vec<C64>,
    /// Leading coefficients of `conj(omega)`, one per singularity.
    pub b_plus: Vec<C64>,
}

fn finite_or_null<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

/// Per-singularity coefficients at the given decay order.
fn side_coefficients(ps: &[SingularityParams], jump: bool) -> Result<Vec<C64>> {
    ps.iter()
        .map(|p| {
            if jump {
                // normal singularities decay one log-order faster and drop out
                if has_jump(p) {
                    b_tilde(p)
                } else {
                    Ok(C64::new(0.0, 0.0))
                }
            } else {
                b_coefficient(p)
            }
        })
        .collect()
}

/// Prediction for a symbol: minus side from `omega`, plus side from its
/// conjugate. The smooth term never contributes.
pub fn predict(sym: &SymbolSpec) -> Result<Prediction> {
    let Some(alpha) = sym.alpha() else {
        return Ok(Prediction {
            alpha: 0.0,
            decay_exponent: 0.0,
            mode: DecayMode::Normal,
            compact: true,
            kappa: 0.0,
            a_plus: 0.0,
            a_minus: 0.0,
            a_merged: 0.0,
            b_minus: Vec::new(),
            b_plus: Vec::new(),
        });
    };
    let minus_params = sym.singularities();
    let conj = sym.conjugate();
    let plus_params = conj.singularities();
    let jump = minus_params.iter().any(has_jump);
    let b_minus = side_coefficients(minus_params, jump)?;
    let b_plus = side_coefficients(plus_params, jump)?;
    let (mode, decay) = if jump {
        (DecayMode::Jump, alpha - 1.0)
    } else {
        (DecayMode::Normal, alpha)
    };
    if decay <= 0.0 {
        return Ok(Prediction {
            alpha,
            decay_exponent: decay,
            mode,
            compact: false,
            kappa: f64::NAN,
            a_plus: f64::INFINITY,
            a_minus: f64::INFINITY,
            a_merged: f64::INFINITY,
            b_minus,
            b_plus,
        });
    }
    let a_minus = a_coefficient(&b_minus, decay)?;
    let a_plus = a_coefficient(&b_plus, decay)?;
    Ok(Prediction {
        alpha,
        decay_exponent: decay,
        mode,
        compact: true,
        kappa: kappa(decay)?,
        a_plus,
        a_minus,
        a_merged: merge_a(a_plus, a_minus, decay),
        b_minus,
        b_plus,
    })
}

/// `|1 - alpha| kappa(alpha) (sum |v(zeta)|^{1/alpha})^alpha`, the limit of
/// `n^alpha rho_n^+` for an analytic symbol.
pub fn predict_analytic(aspec: &AnalyticSymbolSpec) -> Result<f64> {
    let alpha = aspec.alpha();
    let k = kappa(alpha)?;
    let s = power_sum(
        aspec.singularities().iter().map(|s| s.v.eval(s.zeta).norm()),
        alpha,
    );
    Ok((1.0 - alpha).abs() * k * s)
}

/// Two-term expansion of `int_0^c (-log y)^{-alpha} y^m e^{-yt} dy`:
/// `t^{-1-m} (log t)^{-alpha} (m! + alpha Gamma'(m+1) / log t)`.
pub fn laplace_two_term(alpha: f64, m: u32, t: f64) -> f64 {
    let l = t.ln();
    t.powi(-1 - m as i32) * l.powf(-alpha) * (factorial(m) + alpha * gamma_prime_at_integer(m) / l)
}

/// Two-term expansion of `int (-log|x| + a)^{-alpha} 1_s(x) chi0(x) x^m e^{ixt} dx`:
/// `s i^{m+1} t^{-m-1} (log t)^{-alpha} (m! + alpha (Gamma'(m+1) + m! (s pi i/2 - a)) / log t)`.
pub fn oscillatory_two_term(a: C64, alpha: f64, m: u32, sign: crate::symbol::Sign, t: f64) -> C64 {
    let s = sign.as_f64();
    let l = t.ln();
    let mf = factorial(m);
    let i_pow = C64::new(0.0, 1.0).powu(m + 1);
    let corr = alpha * (gamma_prime_at_integer(m) + mf * (C64::new(0.0, s * PI / 2.0) - a)) / l;
    s * i_pow * t.powi(-1 - m as i32) * l.powf(-alpha) * (mf + corr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::EULER_GAMMA;
    use crate::symbol::{make_model_symbol, CutoffSpec, Poly, Sign, TrigPoly, TrigTerm};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kappa_closed_forms() {
        assert!((kappa(1.0).unwrap() - 0.5).abs() < 1e-14);
        assert!((kappa(0.5).unwrap() - 1.0).abs() < 1e-14);
        assert!(kappa(0.0).is_err());
        assert!(kappa(-1.0).is_err());
    }

    #[test]
    fn kappa_matches_gamma_route() {
        for i in 0..=99 {
            let alpha = 0.1 + 9.9 * i as f64 / 99.0;
            let x = 0.5 / alpha;
            let g = statrs::function::gamma::gamma;
            let beta = g(x) * g(0.5) / g(x + 0.5);
            let direct = 2f64.powf(-alpha) * PI.powf(1.0 - 2.0 * alpha) * beta.powf(alpha);
            let k = kappa(alpha).unwrap();
            assert!((k - direct).abs() <= 1e-12 * direct.max(1.0), "alpha={alpha}: {k} vs {direct}");
        }
    }

    #[test]
    fn model_b_examples() {
        let cut = CutoffSpec::default();
        let sym = make_model_symbol(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), 1.0, cut).unwrap();
        assert_eq!(b_coefficient(&sym.singularities()[0]).unwrap(), c(0.0, 0.0));

        let sym = make_model_symbol(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), 0.5, cut).unwrap();
        let p = predict(&sym).unwrap();
        assert_eq!(p.b_minus[0].norm(), 0.0);
        assert_eq!(p.b_plus[0].norm(), 0.0);
        assert_eq!(p.a_merged, 0.0);

        let sym = make_model_symbol(c(2.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), 2.0, cut).unwrap();
        let p = predict(&sym).unwrap();
        assert!((p.b_minus[0] - c(-1.0 - 1.0 / (2.0 * PI), 0.0)).norm() < 1e-15);
        assert!((p.b_plus[0] - c(-1.0 + 1.0 / (2.0 * PI), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn model_symbol_limits() {
        // v+ = 1 alone, alpha = 1: a = kappa(1)/(2 pi) = 1/(4 pi)
        let sym = make_model_symbol(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), 1.0, CutoffSpec::default())
            .unwrap();
        let p = predict(&sym).unwrap();
        assert!((p.a_minus - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((p.a_plus - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((p.a_merged - 2.0 / (4.0 * PI)).abs() < 1e-15);
        assert_eq!(p.decay_exponent, 1.0);
    }

    #[test]
    fn b_tilde_examples() {
        let mut p = make_model_symbol(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), 2.0, CutoffSpec::default())
            .unwrap()
            .singularities()[0]
            .clone();
        p.jump_mode = JumpMode::Jump;
        assert_eq!(b_tilde(&p).unwrap(), c(0.0, 0.0));
        p.v0_minus = Poly::zero();
        assert!((b_tilde(&p).unwrap() - c(0.0, 1.0 / (2.0 * PI))).norm() < 1e-16);
        p.v0_minus = Poly::constant(c(-1.0, 0.0));
        assert!((b_tilde(&p).unwrap() - c(0.0, 1.0 / PI)).norm() < 1e-16);
        assert!(b_coefficient(&p).is_err());
    }

    #[test]
    fn jump_prediction_uses_shifted_exponent() {
        let mut p = make_model_symbol(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), 2.5, CutoffSpec::default())
            .unwrap()
            .singularities()[0]
            .clone();
        p.jump_mode = JumpMode::Jump;
        p.v0_minus = Poly::zero();
        let sym = SymbolSpec::new(vec![p.clone()], CutoffSpec::default(), TrigPoly::default()).unwrap();
        let pr = predict(&sym).unwrap();
        assert_eq!(pr.mode, DecayMode::Jump);
        assert!((pr.decay_exponent - 1.5).abs() < 1e-15);
        let expect = kappa(1.5).unwrap() / (2.0 * PI);
        assert!((pr.a_minus - expect).abs() < 1e-15);

        p.alpha = 0.8;
        let sym = SymbolSpec::new(vec![p], CutoffSpec::default(), TrigPoly::default()).unwrap();
        let pr = predict(&sym).unwrap();
        assert!(!pr.compact);
        assert!(pr.a_merged.is_infinite());
        let js = serde_json::to_value(&pr).unwrap();
        assert!(js["a_merged"].is_null());
    }

    #[test]
    fn a_coefficient_examples() {
        let k = kappa(0.7).unwrap();
        assert!((a_coefficient(&[c(0.3, 0.4)], 0.7).unwrap() - k * 0.5).abs() < 1e-15);
        assert!((a_coefficient(&[c(0.0, 2.0), c(2.0, 0.0)], 1.0).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(a_coefficient(&[c(0.0, 0.0)], 2.0).unwrap(), 0.0);
        assert_eq!(merge_a(0.0, 0.3, 0.5), 0.3);
    }

    #[test]
    fn smooth_extra_does_not_change_prediction() {
        let sym = make_model_symbol(c(0.5, 0.0), c(1.0, 0.0), c(0.0, 2.0), 1.5, CutoffSpec::default())
            .unwrap();
        let pert = sym
            .with_smooth_extra(TrigPoly::new(vec![TrigTerm { k: -2, c: c(1.0, 0.0) }]))
            .unwrap();
        assert_eq!(predict(&sym).unwrap(), predict(&pert).unwrap());
    }

    #[test]
    fn analytic_prediction() {
        use crate::symbol::{AnalyticSingularity, AnalyticSymbolSpec};
        let one = |zeta: C64| AnalyticSingularity {
            zeta,
            v: Poly::constant(c(1.0, 0.0)),
            u: Poly::constant(c(1.0, 0.0)),
        };
        let a = AnalyticSymbolSpec::new(vec![one(c(1.0, 0.0))], 0.5).unwrap();
        assert!((predict_analytic(&a).unwrap() - 0.5).abs() < 1e-14);
        let a = AnalyticSymbolSpec::new(vec![one(c(1.0, 0.0))], 1.0).unwrap();
        assert_eq!(predict_analytic(&a).unwrap(), 0.0);
        let a = AnalyticSymbolSpec::new(vec![one(c(1.0, 0.0)), one(c(-1.0, 0.0))], 0.5).unwrap();
        assert!((predict_analytic(&a).unwrap() - 2f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn analytic_reduction_b_values() {
        use crate::symbol::{AnalyticSingularity, AnalyticSymbolSpec};
        let a = AnalyticSymbolSpec::new(
            vec![AnalyticSingularity {
                zeta: C64::from_polar(1.0, 1.0),
                v: Poly(vec![c(1.0, 0.5), c(0.2, 0.0)]),
                u: Poly::constant(c(1.0, 0.0)),
            }],
            0.5,
        )
        .unwrap();
        let sym = a.to_symbol_spec(CutoffSpec::default(), 8).unwrap();
        let p = predict(&sym).unwrap();
        assert!(p.b_minus[0].norm() < 1e-15);
        let vz = a.singularities()[0].v.eval(a.singularities()[0].zeta);
        assert!((p.b_plus[0] - 0.5 * vz.conj()).norm() < 1e-14);
    }

    #[test]
    fn two_term_constants() {
        assert!((gamma_prime_at_integer(0) + EULER_GAMMA).abs() < 1e-15);
        let t = 1e5;
        assert!((laplace_two_term(0.0, 0, t) - 1.0 / t).abs() < 1e-20);
        assert!((laplace_two_term(0.0, 2, t) - 2.0 / t.powi(3)).abs() < 1e-28);
        let v = oscillatory_two_term(c(0.0, 0.0), 0.0, 1, Sign::Plus, t);
        assert!((v - c(-1.0 / (t * t), 0.0)).norm() < 1e-24);
        let l = t.ln();
        let v = oscillatory_two_term(c(0.0, 0.0), 1.0, 0, Sign::Plus, t);
        let expect = c(0.0, 1.0) / (t * l) * (1.0 + c(-EULER_GAMMA, PI / 2.0) / l);
        assert!((v - expect).norm() < 1e-18);
    }

    #[test]
    fn oscillatory_minus_is_reflected_conjugate() {
        // int over x<0 of f(|x|) x^m e^{ixt} = (-1)^m conj(int over x>0 of conj(f)(x) x^m e^{ixt})
        let a = c(0.3, -0.7);
        for m in 0..3u32 {
            let t = 1e7;
            let plus = oscillatory_two_term(a.conj(), 1.5, m, Sign::Plus, t);
            let minus = oscillatory_two_term(a, 1.5, m, Sign::Minus, t);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert!((minus - sign * plus.conj()).norm() < 1e-14 * minus.norm());
        }
    }
}
