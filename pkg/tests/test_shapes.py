import json

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

import trispline as ts
from trispline.shapes import (CurveSum, FunctionModifier, Homogenized, PolyModifier, S3,
                              S3_PLUS, cyclic_sum, full_sum)
from trispline.sampling import simplex_points

T1, T2, T3 = sp.symbols("t1 t2 t3")
frac = st.floats(0, 1, allow_nan=False)


def to_sympy(chi):
    return sum(c * T1 ** a * T2 ** b * T3 ** e for (a, b, e), c in chi.terms.items())


def sympy_partials_at(expr, pts):
    fns = [sp.lambdify((T1, T2, T3), sp.diff(expr, v), "numpy") for v in (T1, T2, T3)]
    return [np.broadcast_to(f(*pts.T), len(pts)) for f in fns]


def test_phi_theta_values():
    p, q = ts.phi(), ts.theta()
    assert p(0) == 0 and p(1) == 1 and p.deriv(0) == 0 and p.deriv(1) == 0
    assert p(0.5) == pytest.approx(0.5, abs=1e-15)
    assert q(0.5) == pytest.approx(0.3125, abs=1e-15)
    # 12 t^2 (1 - t) vanishes at both ends; the asymmetry is interior
    assert q.deriv(1) == pytest.approx(0.0, abs=1e-14)
    assert q.deriv(0.25) == pytest.approx(0.5625, abs=1e-14)
    assert q.deriv(0.75) == pytest.approx(1.6875, abs=1e-14)


def test_curve_derivatives_formal():
    t = sp.symbols("t")
    for curve, expr in ((ts.phi(), 30 * t ** 2 * (1 - t) ** 2), (ts.theta(), 12 * t ** 2 * (1 - t))):
        assert sp.expand(sp.Poly(curve.coeffs[::-1], t).as_expr().diff(t) - expr) == 0
        s = np.linspace(0, 1, 11)
        np.testing.assert_allclose(curve.deriv(s), sp.lambdify(t, expr)(s), atol=1e-13)


def test_d_symmetry_and_partition():
    s = np.linspace(0, 1, 101)
    p = ts.phi()
    assert np.max(np.abs(p.deriv(s) - p.deriv(1 - s))) <= 1e-12
    assert np.max(np.abs(p(s) + p(1 - s) - 1)) <= 1e-12
    assert ts.is_d_symmetric(p)
    assert not ts.is_d_symmetric(ts.theta())


def test_function_curve_checked():
    c = ts.FunctionCurve(np.sin, np.cos)
    assert c.deriv(0.3) == pytest.approx(np.cos(0.3))
    with pytest.raises(ValueError):
        ts.FunctionCurve(np.sin, np.sin)


def test_product_modifier_examples():
    chi = ts.product_modifier({(2, 2): 30.0})
    assert chi == PolyModifier({(2, 2, 1): 30.0})
    assert ts.product_modifier({(2, 2): 12.0}) == PolyModifier({(2, 2, 1): 12.0})
    zero = ts.product_modifier({})
    assert zero.value(0.2, 0.3, 0.5) == 0
    assert all(np.all(d == 0) for d in zero.partials(0.2, 0.3, 0.5))


def test_product_modifier_callables(rng):
    h = (lambda a, b: 30 * a ** 2 * b ** 2, lambda a, b: 60 * a * b ** 2, lambda a, b: 60 * a ** 2 * b)
    f = ts.product_modifier(h)
    p = ts.product_modifier({(2, 2): 30.0})
    t = rng.uniform(0, 1, size=(50, 3))
    np.testing.assert_allclose(f.value(*t.T), p.value(*t.T), atol=1e-13)
    for a, b in zip(f.partials(*t.T), p.partials(*t.T)):
        np.testing.assert_allclose(a, b, atol=1e-13)


def test_poly_partials_match_sympy(rng):
    chi = PolyModifier({(2, 3, 1): 30.0, (2, 2, 2): 15.0, (4, 0, 1): -2.5, (0, 0, 0): 1.0})
    pts = rng.uniform(0, 1, size=(100, 3))
    expr = to_sympy(chi)
    np.testing.assert_allclose(chi.value(*pts.T), sp.lambdify((T1, T2, T3), expr)(*pts.T), rtol=1e-13)
    for got, ref in zip(chi.partials(*pts.T), sympy_partials_at(expr, pts)):
        np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-14)


def test_poly_partials_finite_difference(rng):
    chi = ts.builtin("affine-sextic").chi1
    pts = rng.uniform(0.05, 0.95, size=(100, 3))
    h = 1e-6
    d = chi.partials(*pts.T)
    for q in range(3):
        e = np.zeros(3)
        e[q] = h
        fd = (chi.value(*(pts + e).T) - chi.value(*(pts - e).T)) / (2 * h)
        np.testing.assert_allclose(d[q], fd, atol=1e-7)


def test_permuted_matches_sympy(rng):
    chi = PolyModifier({(2, 3, 1): 1.0, (1, 0, 4): 2.0})
    expr = to_sympy(chi)
    pts = rng.uniform(0, 1, size=(20, 3))
    for perm in S3:
        args = [(T1, T2, T3)[p] for p in perm]
        ref = expr.subs(dict(zip((T1, T2, T3), args)), simultaneous=True)
        assert sp.expand(to_sympy(chi.permuted(perm)) - ref) == 0
        generic = FunctionModifier(chi.value, chi.partials).permuted(perm)
        np.testing.assert_allclose(generic.value(*pts.T), chi.permuted(perm).value(*pts.T), rtol=1e-13)
        for a, b in zip(generic.partials(*pts.T), chi.permuted(perm).partials(*pts.T)):
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


def test_symmetrize_example():
    chi = PolyModifier({(2, 3, 1): 30.0})
    assert ts.symmetrize(chi) == PolyModifier({(2, 3, 1): 15.0, (3, 2, 1): 15.0})


def test_symmetrize_fixed_point(rng):
    chi = ts.product_modifier({(2, 2): 30.0})
    pts = rng.uniform(0, 1, size=(100, 3))
    np.testing.assert_array_equal(ts.symmetrize(chi).value(*pts.T), chi.value(*pts.T))


@given(frac, frac, frac)
@settings(max_examples=200)
def test_symmetrize_exact(a, b, c):
    for chi in (PolyModifier({(2, 3, 1): 30.0, (4, 2, 1): -7.0, (3, 3, 1): 1.5}),
                FunctionModifier(lambda x, y, z: np.exp(x) * y ** 2 * z,
                                 lambda x, y, z: (np.exp(x) * y ** 2 * z, 2 * np.exp(x) * y * z,
                                                  np.exp(x) * y ** 2))):
        s = ts.symmetrize(chi)
        assert s.value(a, b, c) == s.value(b, a, c)


def test_ratio_modifier_example():
    chi0 = ts.product_modifier({(2, 2): 30.0})
    chi1 = ts.ratio_modifier(chi0, PolyModifier({(0, 1, 0): 1.0, (0, 0, 1): 0.5}))
    assert chi1 == PolyModifier({(2, 3, 1): 30.0, (2, 2, 2): 15.0})
    assert ts.ratio_modifier(chi0, 1.0) == chi0
    assert ts.ratio_modifier(chi0, 0.0) == PolyModifier()


def test_ratio_modifier_product_rule(rng):
    chi0 = ts.product_modifier({(2, 2): 30.0})
    vphi = FunctionModifier(lambda a, b, c: np.sin(a + 2 * b) + c,
                            lambda a, b, c: (np.cos(a + 2 * b), 2 * np.cos(a + 2 * b), 1.0 + 0 * c))
    chi1 = ts.ratio_modifier(chi0, vphi)
    pts = rng.uniform(0.1, 0.9, size=(50, 3))
    h = 1e-6
    for q, d in enumerate(chi1.partials(*pts.T)):
        e = np.zeros(3)
        e[q] = h
        fd = (chi1.value(*(pts + e).T) - chi1.value(*(pts - e).T)) / (2 * h)
        np.testing.assert_allclose(d, fd, atol=1e-7)


def test_builtin_tuples():
    names = [t.name for t in ts.builtin_tuples()]
    assert names == ["quintic-rsd", "phi-phi", "affine-sextic"]
    q, p, a = ts.builtin_tuples()
    assert q.psi1.coeffs == ts.theta().coeffs
    assert q.chi1 == PolyModifier({(2, 2, 1): 12.0})
    assert p.psi1.coeffs == ts.phi().coeffs
    assert p.chi1 == PolyModifier({(2, 3, 1): 30.0})
    assert a.chi1 == PolyModifier({(2, 3, 1): 30.0, (2, 2, 2): 15.0})
    for t in (q, p, a):
        assert t.chi0 == PolyModifier({(2, 2, 1): 30.0})
    with pytest.raises(KeyError):
        ts.builtin("nope")


def test_tuple_json_roundtrip(tmp_path):
    tup = ts.builtin("affine-sextic")
    path = tmp_path / "t.json"
    path.write_text(json.dumps(tup.to_dict()))
    back = ts.load_tuple(str(path))
    assert back.chi1 == tup.chi1 and back.psi0.coeffs == tup.psi0.coeffs
    assert ts.load_tuple("phi-phi").name == "phi-phi"
    with pytest.raises(ValueError):
        ts.RsdTuple.from_dict({"psi0": [0, 1]})


def test_defect_centroid_sympy():
    # oracle: 1 - 3*Phi(1/3) computed in exact arithmetic
    t = sp.Rational(1, 3)
    exact = 1 - 3 * t ** 3 * (10 - 15 * t + 6 * t ** 2)
    assert exact == sp.Rational(10, 27)
    zero = ts.RsdTuple(ts.phi(), ts.phi(), PolyModifier(), PolyModifier({(2, 3, 1): 30.0}))
    d = ts.range_shift_defect(zero)
    assert d.value(1 / 3, 1 / 3, 1 / 3) == pytest.approx(10 / 27, abs=1e-15)


def test_defect_vanishes_for_quintic():
    d = ts.range_shift_defect(ts.builtin("quintic-rsd"))
    assert np.max(np.abs(d.value(*simplex_points(500).T))) < 1e-13


def test_enforce_range_shift_noop_for_quintic():
    tup = ts.builtin("quintic-rsd")
    out = ts.enforce_range_shift(tup)
    assert out.chi0 == ts.symmetrize(tup.chi0)
    assert out.chi1 is tup.chi1 and out.psi0 is tup.psi0


def test_enforce_range_shift_zero_chi(rng):
    zero = ts.RsdTuple(ts.phi(), ts.phi(), PolyModifier(), PolyModifier({(2, 3, 1): 30.0}))
    out = ts.enforce_range_shift(zero)
    pts = simplex_points(1000)
    sigma = CurveSum(out.psi0) + cyclic_sum(out.chi0)
    assert np.max(np.abs(sigma.value(*pts.T) - 1)) < 1e-13
    a, b, c = rng.uniform(0, 1, size=(3, 100))
    np.testing.assert_array_equal(out.chi0.value(a, b, c), out.chi0.value(b, a, c))


def test_enforce_range_shift_precondition():
    tup = ts.RsdTuple(ts.theta(), ts.theta(), PolyModifier(), PolyModifier())
    with pytest.raises(ts.PreconditionError):
        ts.enforce_range_shift(tup)


def test_homogenized_degree_zero(rng):
    base = PolyModifier({(2, 1, 0): 3.0, (0, 0, 1): 1.0})
    h = Homogenized(base)
    t = rng.uniform(0.1, 1, size=(50, 3))
    s = rng.uniform(0.5, 3, size=50)
    np.testing.assert_allclose(h.value(*(t * s[:, None]).T), h.value(*t.T), rtol=1e-13)
    assert h.value(0.0, 0.0, 0.0) == 0.0
    # Euler: sum t_k D_k = 0 for a degree-zero function
    d = h.partials(*t.T)
    np.testing.assert_allclose(sum(t[:, k] * d[k] for k in range(3)), 0, atol=1e-12)
    # on the simplex, tangential derivatives agree with the base
    p = simplex_points(50)
    db, dh = base.partials(*p.T), h.partials(*p.T)
    np.testing.assert_allclose(dh[0] - dh[1], db[0] - db[1], atol=1e-12)


def test_sums():
    chi = PolyModifier({(2, 3, 1): 1.0})
    assert len(cyclic_sum(chi).terms) == 3 and len(full_sum(chi).terms) == 6
    assert S3_PLUS == ((0, 1, 2), (1, 2, 0), (2, 0, 1))
