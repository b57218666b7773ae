use ratlog_core::aak::{
    bmo_norm, merge_values, report, report_with, rho_minus_with, AakOptions, DistanceSide, Solver,
};
use ratlog_core::fourier::{coeff_quadrature, make_series, MethodPolicy, SeriesSide};
use ratlog_core::symbol::{make_model_symbol, CutoffSpec, SymbolSpec, TrigPoly, TrigTerm};
use ratlog_core::C64;

fn model(alpha: f64) -> SymbolSpec {
    make_model_symbol(C64::new(0.5, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.25), alpha, CutoffSpec::default())
        .unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn series_matches_per_index_quadrature() {
    let sym = model(0.5);
    let s = make_series(&sym, SeriesSide::Minus, 1023, &MethodPolicy::default()).unwrap();
    for j in [0usize, 1, 7, 100, 511, 1022] {
        let q = coeff_quadrature(&sym, 1 + j as i64).value;
        assert!((s.values[j] - q).norm() <= 1e-14, "j = {j}: {} vs {q}", s.values[j]);
    }
}

#[test]
fn conjugate_symbol_swaps_sides() {
    let sym = model(2.0);
    let a = report(&sym, 16, 128).unwrap();
    let b = report(&sym.conjugate(), 16, 128).unwrap();
    for (x, y) in a.minus.values.iter().zip(&b.plus.values) {
        assert!(close(*x, *y, 1e-12), "{x} vs {y}");
    }
    for (x, y) in a.plus.values.iter().zip(&b.minus.values) {
        assert!(close(*x, *y, 1e-12), "{x} vs {y}");
    }
    assert!(close(a.prediction.a_minus, b.prediction.a_plus, 1e-14));
    assert!(close(a.prediction.a_plus, b.prediction.a_minus, 1e-14));
    assert!(close(a.prediction.a_merged, b.prediction.a_merged, 1e-14));
}

#[test]
fn report_is_consistent() {
    let r = report(&model(1.0), 20, 256).unwrap();
    assert_eq!(r.minus.values.len(), 21);
    assert_eq!(r.merged.values, merge_values(&r.plus.values, &r.minus.values));
    for s in [&r.minus, &r.plus, &r.merged] {
        assert!(s.values.windows(2).all(|w| w[0] >= w[1]), "{:?} not sorted", s.side);
    }
    for row in &r.ratios {
        let series = match row.side {
            DistanceSide::Minus => &r.minus,
            DistanceSide::Plus => &r.plus,
            DistanceSide::Merged => &r.merged,
        };
        assert!(row.n >= 1 && row.n < series.converged_count);
        assert_eq!(row.rho, series.values[row.n]);
        assert!(close(row.scaled, row.n as f64 * row.rho, 1e-15));
    }
    // leading distances are within a modest factor of the prediction
    let first = r.ratios.iter().find(|x| x.side == DistanceSide::Minus && x.n == 1).unwrap();
    assert!(first.ratio > 0.3 && first.ratio < 3.0, "{first:?}");
}

#[test]
fn solvers_agree_on_leading_values() {
    let sym = model(0.5);
    let dense = AakOptions {
        solver: Solver::Dense,
        tail: false,
        ..AakOptions::default()
    };
    let iter = AakOptions {
        solver: Solver::Iterative,
        tail: false,
        ..AakOptions::default()
    };
    let a = rho_minus_with(&sym, 8, 512, &dense).unwrap();
    let b = rho_minus_with(&sym, 8, 512, &iter).unwrap();
    for n in 0..=8 {
        assert!(close(a.values[n], b.values[n], 1e-9), "n = {n}: {} vs {}", a.values[n], b.values[n]);
    }
}

#[test]
fn smooth_term_moves_distances_by_at_most_its_norm() {
    let sym = model(1.0);
    let extra = TrigPoly::new(vec![
        TrigTerm { k: -2, c: C64::new(0.3, 0.0) },
        TrigTerm { k: 5, c: C64::new(0.0, 0.2) },
    ]);
    let perturbed = sym.with_smooth_extra(extra).unwrap();
    let a = report(&sym, 32, 256).unwrap();
    let b = report(&perturbed, 32, 256).unwrap();
    // each side sees one term: the minus side k = -2 (norm 0.3), the plus side k = 5 (norm 0.2)
    for n in 0..=32 {
        assert!((a.minus.values[n] - b.minus.values[n]).abs() <= 0.3 * (1.0 + 1e-12));
        assert!((a.plus.values[n] - b.plus.values[n]).abs() <= 0.2 * (1.0 + 1e-12));
    }
    // h(1) alone fills two anti-diagonal entries: a rank-two perturbation
    for n in 2..=32 {
        assert!(b.minus.values[n] <= a.minus.values[n - 2] * (1.0 + 1e-10) + 1e-15);
    }
    assert_eq!(a.prediction, b.prediction);
}

#[test]
fn bmo_norm_covers_both_sides_and_the_mean() {
    let sym = model(0.5);
    let b = bmo_norm(&sym, 128).unwrap();
    assert_eq!(b.value, b.s0_minus.max(b.s0_plus).max(b.mean_abs));
    assert!(b.s0_minus > 0.0 && b.s0_plus > 0.0);
    let r = report(&sym, 0, 128).unwrap();
    assert!(close(b.s0_minus, r.minus.values[0], 1e-14));
    assert!(close(b.s0_plus, r.plus.values[0], 1e-14));
}

#[test]
fn compression_tail_shrinks_like_inverse_log() {
    let sym = model(1.0);
    let opts = AakOptions {
        tail: true,
        ..AakOptions::default()
    };
    let mut scaled = Vec::new();
    let mut tails = Vec::new();
    for log2n in [10u32, 12] {
        let n = 1usize << log2n;
        let r = report_with(&sym, 1, n, &opts).unwrap();
        let t = r.minus.tail_proxy;
        tails.push(t);
        scaled.push(t * (n as f64).ln());
    }
    assert!(tails[1] < tails[0], "{tails:?}");
    assert!(close(scaled[0], scaled[1], 0.1), "tail * ln N: {scaled:?}");
}
