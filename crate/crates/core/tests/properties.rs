use proptest::prelude::*;

use ratlog_core::aak::{counting_values, merge, merge_min_max, merge_values, DistanceSeries, DistanceSide};
use ratlog_core::asymptotics::{a_coefficient, merge_a, predict};
use ratlog_core::fourier::{coeff_contour, coeff_quadrature, FourierSeries, Provenance, SeriesSide};
use ratlog_core::hankel::{singular_values_dense, singular_values_iterative, HankelOperator};
use ratlog_core::io::{read_series_csv, write_series_csv};
use ratlog_core::symbol::{
    make_model_symbol, CutoffSpec, Evaluation, JumpMode, Poly, SingularityParams, SymbolSpec, TrigPoly,
};
use ratlog_core::C64;

fn cplx(range: f64) -> impl Strategy<Value = C64> {
    (-range..range, -range..range).prop_map(|(a, b)| C64::new(a, b))
}

fn poly(deg: usize, range: f64) -> impl Strategy<Value = Poly> {
    prop::collection::vec(cplx(range), 1..=deg + 1).prop_map(Poly)
}

/// Single-singularity specs with small polynomial data, so that the branch
/// bases stay away from zero on the support.
fn symbol() -> impl Strategy<Value = SymbolSpec> {
    (
        -3.0f64..3.0,
        0.3f64..3.0,
        cplx(1.0),
        poly(2, 1.0),
        poly(2, 1.0),
        poly(2, 1.0),
        poly(2, 0.2),
        poly(2, 0.2),
    )
        .prop_map(|(angle, alpha, v0, vp, vm, v0rest, up, um)| {
            let mut v0p = v0rest.clone();
            v0p.0[0] = v0;
            let mut v0m = v0rest;
            v0m.0[0] = v0;
            let p = SingularityParams {
                zeta: C64::from_polar(1.0, angle),
                alpha,
                v0_plus: v0p,
                v0_minus: v0m,
                v1_plus: vp,
                v1_minus: vm,
                u0_plus: up.clone(),
                u0_minus: um.clone(),
                u1_plus: up,
                u1_minus: um,
                jump_mode: JumpMode::Normal,
            };
            SymbolSpec::new(vec![p], CutoffSpec::default(), TrigPoly::default()).expect("valid by construction")
        })
}

fn non_increasing(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![0.0f64..1.0, (0u8..6).prop_map(|k| k as f64 / 4.0)], 0..max_len).prop_map(
        |mut v| {
            v.sort_by(|a, b| b.total_cmp(a));
            v
        },
    )
}

fn distance(side: DistanceSide, values: Vec<f64>) -> DistanceSeries {
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_conjugates_values(sym in symbol(), theta in -std::f64::consts::PI..std::f64::consts::PI) {
        let a = sym.evaluate(theta);
        let b = sym.conjugate().evaluate(theta);
        match (a, b) {
            (Evaluation::Finite(x), Evaluation::Finite(y)) => {
                prop_assert!((x.conj() - y).norm() <= 1e-14 * x.norm().max(1.0));
            }
            (Evaluation::Singular { .. }, Evaluation::Singular { .. }) => {}
            _ => prop_assert!(false, "conjugation changed singularity status"),
        }
    }

    #[test]
    fn conjugation_is_an_involution(sym in symbol()) {
        prop_assert_eq!(sym.conjugate().conjugate(), sym);
    }

    #[test]
    fn cutoff_is_even_flat_and_supported(c1 in 0.05f64..0.4, gap in 0.05f64..0.5, x in -1.0f64..1.0) {
        let c = (c1 + gap).min(0.95);
        let cut = CutoffSpec::new(c1, c).unwrap();
        let v = cut.value(x);
        prop_assert_eq!(v, cut.value(-x));
        prop_assert!((0.0..=1.0).contains(&v));
        if x.abs() <= c1 { prop_assert_eq!(v, 1.0); }
        if x.abs() >= c { prop_assert_eq!(v, 0.0); }
    }

    #[test]
    fn prediction_scales_with_symbol(v0 in cplx(2.0), vp in cplx(2.0), vm in cplx(2.0),
                                     alpha in 0.2f64..3.0, lambda in cplx(3.0)) {
        let cut = CutoffSpec::default();
        let a = predict(&make_model_symbol(v0, vp, vm, alpha, cut).unwrap()).unwrap();
        let b = predict(&make_model_symbol(v0 * lambda, vp * lambda, vm * lambda, alpha, cut).unwrap()).unwrap();
        let l = lambda.norm();
        prop_assert!((b.a_minus - l * a.a_minus).abs() <= 1e-12 * (1.0 + b.a_minus));
        prop_assert!((b.a_plus - l * a.a_plus).abs() <= 1e-12 * (1.0 + b.a_plus));
        prop_assert!((b.a_merged - l * a.a_merged).abs() <= 1e-12 * (1.0 + b.a_merged));
    }

    #[test]
    fn merged_limit_bounds(ap in 0.0f64..2.0, am in 0.0f64..2.0, alpha in 0.2f64..3.0) {
        let m = merge_a(ap, am, alpha);
        prop_assert_eq!(m, merge_a(am, ap, alpha));
        prop_assert!(m >= ap.max(am) * (1.0 - 1e-14));
        let direct = a_coefficient(&[C64::new(ap, 0.0), C64::new(am, 0.0)], alpha).unwrap();
        let k = ratlog_core::asymptotics::kappa(alpha).unwrap();
        prop_assert!((direct - k * m).abs() <= 1e-12 * (1.0 + direct));
    }

    #[test]
    fn sorted_merge_is_min_max(p in non_increasing(60), m in non_increasing(60)) {
        let merged = merge_values(&p, &m);
        for n in 0..=130 {
            prop_assert_eq!(merged.get(n).copied().unwrap_or(0.0), merge_min_max(&p, &m, n));
        }
        let mut all: Vec<f64> = p.iter().chain(&m).copied().collect();
        all.sort_by(|a, b| b.total_cmp(a));
        prop_assert_eq!(&merged, &all);
        let ds = merge(&distance(DistanceSide::Plus, p.clone()), &distance(DistanceSide::Minus, m.clone()));
        prop_assert_eq!(ds.values, merged);
    }

    #[test]
    fn counting_adds(p in non_increasing(60), m in non_increasing(60), s in 1e-6f64..1.5) {
        let merged = merge_values(&p, &m);
        prop_assert_eq!(
            counting_values(&merged, s).count,
            counting_values(&p, s).count + counting_values(&m, s).count
        );
    }

    #[test]
    fn series_csv_roundtrip(vals in prop::collection::vec((cplx(1e3), 0.0f64..1e-10), 1..50)) {
        let s = FourierSeries {
            side: SeriesSide::Minus,
            values: vals.iter().map(|v| v.0).collect(),
            accuracy: vals.iter().map(|v| v.1).collect(),
            provenance: vec![Provenance::Contour; vals.len()],
        };
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &s).unwrap();
        prop_assert_eq!(read_series_csv(buf.as_slice(), SeriesSide::Minus).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quadrature_and_contour_agree(sym in symbol(), j in 2i64..400) {
        let q = coeff_quadrature(&sym, j);
        let k = coeff_contour(&sym, j as f64).unwrap();
        let scale = q.value.norm().max(1e-12);
        prop_assert!((q.value - k.value).norm() <= 1e-9 * scale + 1e-15, "{:?} vs {:?}", q, k);
    }

    #[test]
    fn hankel_structure_and_fast_matvec(h in prop::collection::vec(cplx(1.0), 63..=63), j in 0usize..32, k in 0usize..32) {
        let op = HankelOperator::from_values(&h, 32).unwrap();
        let mut e = vec![C64::new(0.0, 0.0); 32];
        e[k] = C64::new(1.0, 0.0);
        prop_assert_eq!(op.matvec_naive(&e)[j], h[j + k]);
        prop_assert!((op.matvec_fast(&e)[j] - h[j + k]).norm() <= 1e-12 * h.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }

    #[test]
    fn singular_values_are_ordered_and_reproducible(h in prop::collection::vec(cplx(1.0), 127..=127)) {
        let op = HankelOperator::from_values(&h, 64).unwrap();
        let a = singular_values_iterative(&op, 10, 1e-10).unwrap();
        let b = singular_values_iterative(&op, 10, 1e-10).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(a.residual_estimates.iter().all(|r| *r >= 0.0));
        let d = singular_values_dense(&op).unwrap();
        for i in 0..a.converged_count {
            prop_assert!((a.values[i] - d.values[i]).abs() <= 1e-8 * d.values[0]);
        }
    }

    #[test]
    fn weyl_perturbation_bound(h in prop::collection::vec(cplx(1.0), 63..=63), g in prop::collection::vec(cplx(0.3), 63..=63)) {
        let a = singular_values_dense(&HankelOperator::from_values(&h, 32).unwrap()).unwrap();
        let sum: Vec<C64> = h.iter().zip(&g).map(|(x, y)| x + y).collect();
        let b = singular_values_dense(&HankelOperator::from_values(&sum, 32).unwrap()).unwrap();
        let bound = singular_values_dense(&HankelOperator::from_values(&g, 32).unwrap()).unwrap().values[0];
        for n in 0..32 {
            prop_assert!((a.values[n] - b.values[n]).abs() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn real_series_sides_share_spectrum(h in prop::collection::vec(-1.0f64..1.0, 63..=63)) {
        // for a real sequence conjugation changes nothing, and the spectrum of
        // the conjugate series equals that of the series itself
        let hc: Vec<C64> = h.iter().map(|x| C64::new(*x, 0.0)).collect();
        let conj: Vec<C64> = hc.iter().map(|z| z.conj()).collect();
        let a = singular_values_dense(&HankelOperator::from_values(&hc, 32).unwrap()).unwrap();
        let b = singular_values_dense(&HankelOperator::from_values(&conj, 32).unwrap()).unwrap();
        for n in 0..32 {
            prop_assert!((a.values[n] - b.values[n]).abs() <= 1e-12 * a.values[0].max(1e-300));
        }
    }
}
