"""Shape curves, trivariate modifiers and RSD tuples.

Two representations live behind one interface each:

* :class:`PolyCurve` / :class:`PolyModifier` hold exact polynomial
  coefficients, so derivatives are formal and results serialize to JSON.
* :class:`FunctionCurve` / :class:`FunctionModifier` wrap arbitrary callables
  for non-polynomial shape functions.

A modifier ``chi(t1, t2, t3)`` is evaluated with three equally shaped arrays
and returns the value; :meth:`Modifier.partials` returns ``(D1, D2, D3)``.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.polynomial import Polynomial

from .errors import PreconditionError
from .sampling import simplex_points

#: Sampling grid used for curve properties (d-symmetry, partition, FD checks).
CURVE_SAMPLES = 101

#: The six index permutations, in the fixed summation order used everywhere.
S3 = ((0, 1, 2), (1, 0, 2), (1, 2, 0), (2, 1, 0), (2, 0, 1), (0, 2, 1))

#: Cyclic permutations.
S3_PLUS = ((0, 1, 2), (1, 2, 0), (2, 0, 1))

SWAP12 = (1, 0, 2)


# ---------------------------------------------------------------- curves ---

class Curve:
    """Once differentiable scalar function on ``[0, 1]``."""

    def __call__(self, t):
        return self.value(t)

    def value(self, t):
        raise NotImplementedError

    def deriv(self, t):
        raise NotImplementedError


class PolyCurve(Curve):
    """Univariate polynomial, coefficients ascending in degree."""

    def __init__(self, coeffs):
        coeffs = [float(c) for c in coeffs]
        if not coeffs:
            coeffs = [0.0]
        self.poly = Polynomial(coeffs)
        self._dpoly = self.poly.deriv()

    @property
    def coeffs(self):
        return [float(c) for c in self.poly.coef]

    def value(self, t):
        return self.poly(np.asarray(t, dtype=float))

    def deriv(self, t):
        return self._dpoly(np.asarray(t, dtype=float))

    def __repr__(self):
        return f"PolyCurve({self.coeffs})"


class FunctionCurve(Curve):
    """Curve given by a value callable and a derivative callable.

    The derivative is checked against central differences of ``value`` at
    :data:`CURVE_SAMPLES` points (tolerance ``1e-6``) unless ``check=False``.
    """

    def __init__(self, value, deriv, check=True):
        self._value = value
        self._deriv = deriv
        if check:
            h = 1e-6
            t = np.linspace(h, 1.0 - h, CURVE_SAMPLES)
            fd = (np.asarray(value(t + h)) - np.asarray(value(t - h))) / (2 * h)
            err = np.max(np.abs(fd - np.asarray(deriv(t))))
            if not err <= 1e-6:
                raise ValueError(f"curve derivative disagrees with finite differences by {err:.3e}")

    def value(self, t):
        return np.asarray(self._value(np.asarray(t, dtype=float)), dtype=float)

    def deriv(self, t):
        return np.asarray(self._deriv(np.asarray(t, dtype=float)), dtype=float)


def phi():
    """Quintic ``t^3 (10 - 15 t + 6 t^2)``, derivative ``30 t^2 (1 - t)^2``."""
    return PolyCurve([0, 0, 0, 10, -15, 6])


def theta():
    """Quartic ``t^3 (4 - 3 t)``, derivative ``12 t^2 (1 - t)``."""
    return PolyCurve([0, 0, 0, 4, -3])


def is_d_symmetric(psi, tol=1e-10):
    """``psi'(t) == psi'(1 - t)`` at the sample grid, within ``tol``."""
    t = np.linspace(0.0, 1.0, CURVE_SAMPLES)
    return bool(np.max(np.abs(psi.deriv(t) - psi.deriv(1.0 - t))) <= tol)


# -------------------------------------------------------------- modifiers ---

def _broadcast(t1, t2, t3):
    return np.broadcast_arrays(np.asarray(t1, dtype=float),
                               np.asarray(t2, dtype=float),
                               np.asarray(t3, dtype=float))


class Modifier:
    """Trivariate function on the nonnegative octant with its three partials.

    Supports ``+``, ``-``, scalar ``*`` and modifier ``*`` (product rule).
    """

    def __call__(self, t1, t2, t3):
        return self.value(t1, t2, t3)

    def value(self, t1, t2, t3):
        raise NotImplementedError

    def partials(self, t1, t2, t3):
        raise NotImplementedError

    def permuted(self, perm):
        """``t -> self(t[perm[0]], t[perm[1]], t[perm[2]])``."""
        return _PermutedModifier(self, perm)

    def swapped(self):
        """Arguments one and two exchanged."""
        return self.permuted(SWAP12)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = PolyModifier.constant(other)
        return _Combination(((1.0, self), (1.0, other)))

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other if isinstance(other, Modifier) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Modifier):
            return _Product(self, other)
        return _Combination(((float(other), self),))

    __rmul__ = __mul__


class PolyModifier(Modifier):
    """Trivariate polynomial ``sum c * t1**e1 * t2**e2 * t3**e3``.

    ``terms`` maps exponent triples to coefficients (or is an iterable of
    ``(e1, e2, e3, coef)`` rows). Zero coefficients are dropped.
    """

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = (((int(e1), int(e2), int(e3)), c) for e1, e2, e3, c in terms)
        merged = {}
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != 3 or min(exps) < 0:
                raise ValueError(f"bad exponent triple {exps}")
            merged[exps] = merged.get(exps, 0.0) + float(c)
        self.terms = {e: c for e, c in sorted(merged.items()) if c != 0.0}

    @classmethod
    def constant(cls, c):
        return cls({(0, 0, 0): c})

    @classmethod
    def from_curve_sum(cls, curve):
        """``psi(t1) + psi(t2) + psi(t3)`` for a polynomial curve."""
        terms = {}
        for d, c in enumerate(curve.coeffs):
            for k in range(3):
                e = [0, 0, 0]
                e[k] = d
                terms[tuple(e)] = terms.get(tuple(e), 0.0) + c
        return cls(terms)

    def rows(self):
        """``[[e1, e2, e3, coef], ...]`` (the JSON form)."""
        return [[*e, c] for e, c in self.terms.items()]

    @property
    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def value(self, t1, t2, t3):
        t1, t2, t3 = _broadcast(t1, t2, t3)
        # monomials paired with their (t1,t2)-swapped partner and summed in a
        # swap-invariant order: symmetric coefficients give bitwise symmetric values
        groups = {}
        for (e1, e2, e3), c in self.terms.items():
            groups.setdefault((min(e1, e2), max(e1, e2), e3), []).append((e1, e2, e3, c))
        out = np.zeros_like(t1)
        for key in sorted(groups):
            acc = None
            for e1, e2, e3, c in groups[key]:
                term = c * ((t1 ** e1 * t2 ** e2) * t3 ** e3)
                acc = term if acc is None else acc + term
            out = out + acc
        return out

    def partials(self, t1, t2, t3):
        t = _broadcast(t1, t2, t3)
        out = [np.zeros_like(t[0]) for _ in range(3)]
        for exps, c in self.terms.items():
            for q in range(3):
                if exps[q] == 0:
                    continue
                term = c * exps[q]
                for r in range(3):
                    e = exps[r] - (r == q)
                    if e:
                        term = term * t[r] ** e
                out[q] = out[q] + term
        return tuple(out)

    def permuted(self, perm):
        terms = {}
        for exps, c in self.terms.items():
            new = [0, 0, 0]
            # slot q receives t[perm[q]], so that variable carries exps[q]
            for q in range(3):
                new[perm[q]] += exps[q]
            terms[tuple(new)] = terms.get(tuple(new), 0.0) + c
        return PolyModifier(terms)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = PolyModifier.constant(other)
        if isinstance(other, PolyModifier):
            terms = dict(self.terms)
            for e, c in other.terms.items():
                terms[e] = terms.get(e, 0.0) + c
            return PolyModifier(terms)
        return super().__add__(other)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, PolyModifier):
            terms = {}
            for ea, ca in self.terms.items():
                for eb, cb in other.terms.items():
                    e = tuple(x + y for x, y in zip(ea, eb))
                    terms[e] = terms.get(e, 0.0) + ca * cb
            return PolyModifier(terms)
        if isinstance(other, Modifier):
            return super().__mul__(other)
        return PolyModifier({e: c * float(other) for e, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, PolyModifier) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "PolyModifier(0)"
        parts = []
        for (e1, e2, e3), c in self.terms.items():
            mono = "".join(f"*t{i + 1}^{e}" if e > 1 else (f"*t{i + 1}" if e else "")
                           for i, e in enumerate((e1, e2, e3)))
            parts.append(f"{c:g}{mono}")
        return "PolyModifier(" + " + ".join(parts) + ")"


class FunctionModifier(Modifier):
    """Modifier from a value callable and a partials callable.

    ``partials(t1, t2, t3)`` must return the triple ``(D1, D2, D3)``.
    """

    def __init__(self, value, partials):
        self._value = value
        self._partials = partials

    def value(self, t1, t2, t3):
        t1, t2, t3 = _broadcast(t1, t2, t3)
        return np.asarray(self._value(t1, t2, t3), dtype=float) + np.zeros_like(t1)

    def partials(self, t1, t2, t3):
        t1, t2, t3 = _broadcast(t1, t2, t3)
        return tuple(np.asarray(d, dtype=float) + np.zeros_like(t1)
                     for d in self._partials(t1, t2, t3))


class _PermutedModifier(Modifier):
    def __init__(self, base, perm):
        self.base = base
        self.perm = tuple(perm)

    def _args(self, t1, t2, t3):
        t = _broadcast(t1, t2, t3)
        return [t[p] for p in self.perm]

    def value(self, t1, t2, t3):
        return self.base.value(*self._args(t1, t2, t3))

    def partials(self, t1, t2, t3):
        d = self.base.partials(*self._args(t1, t2, t3))
        out = [np.zeros_like(d[0]) for _ in range(3)]
        for q, p in enumerate(self.perm):
            out[p] = out[p] + d[q]
        return tuple(out)


class _Combination(Modifier):
    def __init__(self, items):
        self.items = tuple(items)

    def value(self, t1, t2, t3):
        return sum(c * m.value(t1, t2, t3) for c, m in self.items)

    def partials(self, t1, t2, t3):
        parts = [m.partials(t1, t2, t3) for _, m in self.items]
        return tuple(sum(c * p[q] for (c, _), p in zip(self.items, parts)) for q in range(3))


class _Product(Modifier):
    def __init__(self, a, b):
        self.a, self.b = a, b

    def value(self, t1, t2, t3):
        return self.a.value(t1, t2, t3) * self.b.value(t1, t2, t3)

    def partials(self, t1, t2, t3):
        va, vb = self.a.value(t1, t2, t3), self.b.value(t1, t2, t3)
        da, db = self.a.partials(t1, t2, t3), self.b.partials(t1, t2, t3)
        return tuple(da[q] * vb + va * db[q] for q in range(3))


class CurveSum(Modifier):
    """``psi(t1) + psi(t2) + psi(t3)`` for an arbitrary curve."""

    def __init__(self, curve):
        self.curve = curve

    def value(self, t1, t2, t3):
        return self.curve.value(t1) + self.curve.value(t2) + self.curve.value(t3)

    def partials(self, t1, t2, t3):
        t1, t2, t3 = _broadcast(t1, t2, t3)
        return self.curve.deriv(t1), self.curve.deriv(t2), self.curve.deriv(t3)


class Homogenized(Modifier):
    """Degree-zero extension ``t -> base(t / (t1 + t2 + t3))``, zero at the origin.

    Partials follow the quotient rule:
    ``D_k = (D_k base(tau) - sum_j tau_j D_j base(tau)) / s`` with ``tau = t / s``.
    """

    def __init__(self, base):
        self.base = base

    @staticmethod
    def _normalize(t1, t2, t3):
        t1, t2, t3 = _broadcast(t1, t2, t3)
        s = t1 + t2 + t3
        origin = s == 0.0
        s_safe = np.maximum(s, 1e-300)
        return (t1 / s_safe, t2 / s_safe, t3 / s_safe), s_safe, origin

    def value(self, t1, t2, t3):
        tau, _, origin = self._normalize(t1, t2, t3)
        return np.where(origin, 0.0, self.base.value(*tau))

    def partials(self, t1, t2, t3):
        tau, s, origin = self._normalize(t1, t2, t3)
        d = self.base.partials(*tau)
        radial = tau[0] * d[0] + tau[1] * d[1] + tau[2] * d[2]
        return tuple(np.where(origin, 0.0, (d[k] - radial) / s) for k in range(3))


def cyclic_sum(chi):
    """``chi(t1,t2,t3) + chi(t2,t3,t1) + chi(t3,t1,t2)``."""
    out = chi.permuted(S3_PLUS[0])
    for perm in S3_PLUS[1:]:
        out = out + chi.permuted(perm)
    return out


def full_sum(chi):
    """Sum of ``chi`` over all six argument permutations."""
    out = chi.permuted(S3[0])
    for perm in S3[1:]:
        out = out + chi.permuted(perm)
    return out


# ----------------------------------------------------------- constructors ---

def product_modifier(h):
    """``chi(t1, t2, t3) = h(t1, t2) * t3``.

    ``h`` is either a mapping ``{(e1, e2): coef}`` describing a bivariate
    polynomial (result is a :class:`PolyModifier`), or a triple of callables
    ``(h, dh/dt1, dh/dt2)``.
    """
    if isinstance(h, dict):
        return PolyModifier({(e1, e2, 1): c for (e1, e2), c in h.items()})
    hv, h1, h2 = h

    def value(t1, t2, t3):
        return hv(t1, t2) * t3

    def partials(t1, t2, t3):
        return h1(t1, t2) * t3, h2(t1, t2) * t3, hv(t1, t2) + 0.0 * t3

    return FunctionModifier(value, partials)


def symmetrize(chi):
    """``(chi(t1, t2, t3) + chi(t2, t1, t3)) / 2``."""
    if isinstance(chi, PolyModifier):
        return (chi + chi.swapped()) * 0.5
    return _Symmetrized(chi)


class _Symmetrized(Modifier):
    # evaluates both orders and averages, so value(a,b,c) == value(b,a,c) bitwise
    def __init__(self, base):
        self.base = base

    def value(self, t1, t2, t3):
        return 0.5 * (self.base.value(t1, t2, t3) + self.base.value(t2, t1, t3))

    def partials(self, t1, t2, t3):
        a = self.base.partials(t1, t2, t3)
        b = self.base.partials(t2, t1, t3)
        return 0.5 * (a[0] + b[1]), 0.5 * (a[1] + b[0]), 0.5 * (a[2] + b[2])


def ratio_modifier(chi0, varphi):
    """``chi1 = chi0 * varphi`` with product-rule partials.

    ``varphi`` is a :class:`Modifier`; a plain number is treated as a constant.
    """
    if not isinstance(varphi, Modifier):
        varphi = PolyModifier.constant(float(varphi))
    return chi0 * varphi


# ----------------------------------------------------------------- tuples ---

@dataclass(frozen=True, eq=False)
class RsdTuple:
    """Quadruple ``[psi0, psi1, chi0, chi1]`` defining a local scheme.

    No validation happens here; see :mod:`trispline.validation`.
    """

    psi0: Curve
    psi1: Curve
    chi0: Modifier
    chi1: Modifier
    name: str = "custom"

    @property
    def is_polynomial(self):
        return all(isinstance(c, PolyCurve) for c in (self.psi0, self.psi1)) and \
            all(isinstance(m, PolyModifier) for m in (self.chi0, self.chi1))

    def to_dict(self):
        if not self.is_polynomial:
            raise TypeError("only polynomial tuples serialize to JSON")
        return {
            "name": self.name,
            "psi0": self.psi0.coeffs,
            "psi1": self.psi1.coeffs,
            "chi0": self.chi0.rows(),
            "chi1": self.chi1.rows(),
        }

    @classmethod
    def from_dict(cls, data, name=None):
        missing = {"psi0", "psi1", "chi0", "chi1"} - set(data)
        if missing:
            raise ValueError(f"tuple definition lacks {sorted(missing)}")
        return cls(
            PolyCurve(data["psi0"]),
            PolyCurve(data["psi1"]),
            PolyModifier(data["chi0"]),
            PolyModifier(data["chi1"]),
            name=name or data.get("name", "custom"),
        )


def _chi_quintic():
    return product_modifier({(2, 2): 30.0})


def builtin_tuples():
    """The three named tuples shipped with the package."""
    chi0 = _chi_quintic()
    return [
        RsdTuple(phi(), theta(), chi0, product_modifier({(2, 2): 12.0}), "quintic-rsd"),
        RsdTuple(phi(), phi(), chi0, product_modifier({(2, 3): 30.0}), "phi-phi"),
        RsdTuple(phi(), phi(), chi0,
                 ratio_modifier(chi0, PolyModifier({(0, 1, 0): 1.0, (0, 0, 1): 0.5})),
                 "affine-sextic"),
    ]


def builtin(name):
    for t in builtin_tuples():
        if t.name == name:
            return t
    raise KeyError(name)


def load_tuple(spec):
    """Resolve a built-in tuple name, falling back to a JSON file path."""
    names = {t.name: t for t in builtin_tuples()}
    if spec in names:
        return names[spec]
    path = Path(spec)
    with path.open() as fh:
        data = json.load(fh)
    return RsdTuple.from_dict(data, name=data.get("name", path.stem))


def range_shift_defect(tup):
    """``delta(t) = 1 - sum_i psi0(t_i) - cyclic_sum(chi0^[s])(t)`` as a modifier.

    On the simplex this is ``1`` minus the interpolant of the constant one.
    """
    chi_s = symmetrize(tup.chi0)
    if isinstance(tup.psi0, PolyCurve):
        psi_sum = PolyModifier.from_curve_sum(tup.psi0)
    else:
        psi_sum = CurveSum(tup.psi0)
    return 1.0 - psi_sum - cyclic_sum(chi_s)


def enforce_range_shift(tup):
    """Return ``[psi0, psi1, chi0*, chi1]`` with the range shift property.

    ``chi0* = chi0^[s] + delta_hat / 3`` where ``delta_hat`` is the
    degree-zero extension of :func:`range_shift_defect`. If the defect vanishes
    on the simplex the symmetrized ``chi0`` is returned unchanged.

    Raises
    ------
    PreconditionError
        If ``psi0`` is not d-symmetric.
    """
    if not is_d_symmetric(tup.psi0):
        raise PreconditionError("psi0 must satisfy psi0'(t) == psi0'(1 - t)")
    chi_s = symmetrize(tup.chi0)
    delta = range_shift_defect(tup)
    t = simplex_points(1000)
    if np.max(np.abs(delta.value(*t.T))) <= 1e-13:
        chi_star = chi_s
    else:
        chi_star = chi_s + Homogenized(delta) * (1.0 / 3.0)
    return RsdTuple(tup.psi0, tup.psi1, chi_star, tup.chi1, name=f"{tup.name}*")
