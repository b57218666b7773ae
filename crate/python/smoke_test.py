"""Smoke test for the ratlog extension module.

Build and install first, e.g.

    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/ratlog-*.whl
"""

import json
import math

import ratlog


def main():
    assert abs(ratlog.kappa(1.0) - 0.5) < 1e-12
    assert abs(ratlog.kappa(0.5) - 1.0) < 1e-12

    sym = ratlog.Symbol.model(0.5, 1.0, 0.25j, 1.0)
    again = ratlog.Symbol.from_json(sym.to_json())
    assert again.to_json() == sym.to_json()
    assert sym.evaluate(0.0) is None
    z = sym.evaluate(0.1)
    assert abs(sym.conjugate().evaluate(0.1) - z.conjugate()) < 1e-14

    p = ratlog.predict(sym)
    # b = (1 - alpha) v0 / 2 - (v+ - v-) / (2 pi i) with alpha = 1
    b = -(1.0 - 0.25j) / (2j * math.pi)
    assert abs(p.b_minus[0] - b) < 1e-14, (p.b_minus, b)
    assert p.a_merged >= max(p.a_minus, p.a_plus)

    h = ratlog.coefficients(sym, 63)
    assert len(h) == 63

    # rank one: h(j) = 2^-j has a single nonzero singular value 4/3 (1 - 4^-N)
    n = 32
    geo = [2.0 ** -j for j in range(2 * n - 1)]
    s = ratlog.hankel_singular_values(geo, n, k=3)
    assert abs(s[0] - 4.0 / 3.0 * (1 - 4.0 ** -n)) < 1e-13, s
    assert s[1] < 1e-14

    x = [complex(k, -k) for k in range(n)]
    y = ratlog.hankel_matvec(geo, x)
    direct = [sum(geo[j + k] * x[k] for k in range(n)) for j in range(n)]
    assert max(abs(a - b) for a, b in zip(y, direct)) < 1e-12

    r = ratlog.report(sym, 8, 128)
    assert len(r.minus) == 9
    assert r.merged.values == ratlog.merge(r.plus.values, r.minus.values)
    assert all(row[1] >= 1 for row in r.ratios)
    assert ratlog.counting(r.merged.values, 1e-3) == ratlog.counting(r.plus.values, 1e-3) + ratlog.counting(
        r.minus.values, 1e-3
    )

    assert ratlog.bmo_norm(sym, 128) >= r.minus.values[0] * (1 - 1e-12)
    assert "kappa-closed-forms" in ratlog.check_names()
    passed, measured, threshold, detail = ratlog.run_check("kappa-closed-forms")
    assert passed, detail

    try:
        ratlog.Symbol.model(1.0, 0.0, 0.0, -1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative alpha accepted")

    print(json.dumps({"ok": True, "a_merged": p.a_merged, "s0": r.minus.values[0]}))


if __name__ == "__main__":
    main()
