"""Exact trigonometric polynomials over Q(sqrt 3).

A :class:`TrigPoly` is a finite sum of terms

    alpha**p * (c_cos * cos(theta) + c_sin * sin(theta)),
    theta = alpha * (k . x) + (m . xi),

with integer spatial frequencies ``k``, integer phase frequencies ``m`` and
coefficients in ``Q(sqrt 3)``.  Every operation returns a canonical object, so
two polynomials represent the same function iff they compare equal.

Spatial axes are numbered 0, 1, 2 (``x_1, x_2, x_3`` in the usual notation).
"""

from __future__ import annotations

import math
import numbers
import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

import numpy as np

SQRT3 = math.sqrt(3.0)

Rational = Union[int, Fraction]


class Coeff:
    """Exact scalar ``a + b*sqrt(3)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a: Rational | str = 0, b: Rational | str = 0):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction) -> "Coeff":
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        return obj

    @classmethod
    def coerce(cls, value) -> "Coeff":
        """Lift an int, Fraction, float (exact binary value) or Coeff into Coeff."""
        if isinstance(value, Coeff):
            return value
        if isinstance(value, numbers.Rational):
            return cls._raw(Fraction(value), _F0)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"cannot represent {value!r} exactly")
            return cls._raw(Fraction(value), _F0)
        raise TypeError(f"cannot convert {type(value).__name__} to Coeff")

    def __setattr__(self, name, value):
        raise AttributeError("Coeff is immutable")

    def __reduce__(self):
        return (Coeff, (self.a, self.b))

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __eq__(self, other) -> bool:
        if isinstance(other, Coeff):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return not self.b and self.a == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def __neg__(self) -> "Coeff":
        return Coeff._raw(-self.a, -self.b)

    def __add__(self, other) -> "Coeff":
        try:
            o = Coeff.coerce(other)
        except TypeError:
            return NotImplemented
        return Coeff._raw(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other) -> "Coeff":
        try:
            o = Coeff.coerce(other)
        except TypeError:
            return NotImplemented
        return Coeff._raw(self.a - o.a, self.b - o.b)

    def __rsub__(self, other) -> "Coeff":
        return Coeff.coerce(other) - self

    def __mul__(self, other) -> "Coeff":
        if isinstance(other, Coeff):
            a, b = self.a, self.b
            c, d = other.a, other.b
            return Coeff._raw(a * c + 3 * b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return Coeff._raw(self.a * other, self.b * other)
        if isinstance(other, float):
            return self * Coeff.coerce(other)
        return NotImplemented

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm ``a**2 - 3 b**2``; zero only for the zero element."""
        return self.a * self.a - 3 * self.b * self.b

    def inverse(self) -> "Coeff":
        n = self.norm()
        if not n:
            raise ZeroDivisionError("Coeff division by zero")
        return Coeff._raw(self.a / n, -self.b / n)

    def __truediv__(self, other) -> "Coeff":
        try:
            o = Coeff.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> "Coeff":
        return Coeff.coerce(other) * self.inverse()

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * SQRT3

    def conjugate(self) -> "Coeff":
        return Coeff._raw(self.a, -self.b)

    def __str__(self) -> str:
        sign = "+" if self.b >= 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}√3"

    def pretty(self) -> str:
        """Human form without zero parts, e.g. ``27/64`` or ``-3/2√3``."""
        if not self.b:
            return str(self.a)
        rad = f"{self.b}√3" if self.b not in (1, -1) else ("√3" if self.b == 1 else "-√3")
        if not self.a:
            return rad
        return f"{self.a}{'+' if self.b > 0 else '-'}{rad.lstrip('-')}"

    def __repr__(self) -> str:
        if not self.b:
            return f"Coeff({self.a})"
        return f"Coeff({self.a}, {self.b})"

    _PATTERN = re.compile(r"^\s*(-?\d+(?:/\d+)?)\s*([+-])\s*(\d+(?:/\d+)?)\s*√3\s*$")

    @classmethod
    def parse(cls, text: str) -> "Coeff":
        """Inverse of ``str()``: ``"p/q+r/s√3"``."""
        match = cls._PATTERN.match(text)
        if match is None:
            raise ValueError(f"malformed coefficient {text!r}")
        a, sign, b = match.groups()
        b_val = Fraction(b)
        return cls(Fraction(a), b_val if sign == "+" else -b_val)


_F0 = Fraction(0)
ZERO = Coeff._raw(_F0, _F0)
ONE = Coeff._raw(Fraction(1), _F0)
HALF = Fraction(1, 2)

Vec3 = tuple[int, int, int]
_Z3: Vec3 = (0, 0, 0)


class FreqKey(NamedTuple):
    """Spatial frequency ``k`` (units of alpha) and phase frequency ``m`` (units of xi)."""

    k: Vec3
    m: Vec3 = _Z3

    def is_zero(self) -> bool:
        return self.k == _Z3 and self.m == _Z3


class Term(NamedTuple):
    key: FreqKey
    alpha_power: int
    cos: Coeff
    sin: Coeff


def _canonical(k: Vec3, m: Vec3, c: Coeff, s: Coeff):
    # first nonzero entry of (k, m) must be positive; cos is even, sin is odd
    for v in k + m:
        if v:
            if v < 0:
                return (-k[0], -k[1], -k[2]), (-m[0], -m[1], -m[2]), c, -s
            return k, m, c, s
    return k, m, c, ZERO


class _Acc:
    """Mutable accumulator used while building a canonical TrigPoly."""

    __slots__ = ("d",)

    def __init__(self):
        self.d: dict = {}

    def add(self, k: Vec3, m: Vec3, p: int, c: Coeff, s: Coeff) -> None:
        k, m, c, s = _canonical(k, m, c, s)
        key = (FreqKey(k, m), p)
        cur = self.d.get(key)
        if cur is None:
            self.d[key] = (c, s)
        else:
            self.d[key] = (cur[0] + c, cur[1] + s)

    def build(self) -> "TrigPoly":
        terms = {key: cs for key, cs in self.d.items() if cs[0] or cs[1]}
        return TrigPoly._from_canonical(terms)


def _vadd(u: Vec3, v: Vec3) -> Vec3:
    return (u[0] + v[0], u[1] + v[1], u[2] + v[2])


def _vsub(u: Vec3, v: Vec3) -> Vec3:
    return (u[0] - v[0], u[1] - v[1], u[2] - v[2])


class TrigPoly:
    """Canonical multivariate trigonometric polynomial with exact coefficients.

    The term map is keyed by ``(FreqKey, alpha_power)`` and holds the pair
    ``(c_cos, c_sin)``.  Instances are immutable and hashable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Iterable[tuple] = ()):
        """Build from ``(k, m, alpha_power, c_cos, c_sin)`` tuples in any form."""
        acc = _Acc()
        for k, m, p, c, s in terms:
            if p < 0:
                raise ValueError("alpha_power must be nonnegative")
            acc.add(tuple(int(v) for v in k), tuple(int(v) for v in m), int(p),
                    Coeff.coerce(c), Coeff.coerce(s))
        object.__setattr__(self, "_terms", acc.build()._terms)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _from_canonical(cls, terms: dict) -> "TrigPoly":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_terms", terms)
        object.__setattr__(obj, "_hash", None)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("TrigPoly is immutable")

    def __reduce__(self):
        return (TrigPoly._from_canonical, (dict(self._terms),))

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "TrigPoly":
        return cls._from_canonical({})

    @classmethod
    def const(cls, value=1, alpha_power: int = 0) -> "TrigPoly":
        return cls([(_Z3, _Z3, alpha_power, value, 0)])

    @classmethod
    def cos(cls, k: Sequence[int] = _Z3, m: Sequence[int] = _Z3, coeff=1,
            alpha_power: int = 0) -> "TrigPoly":
        return cls([(k, m, alpha_power, coeff, 0)])

    @classmethod
    def sin(cls, k: Sequence[int] = _Z3, m: Sequence[int] = _Z3, coeff=1,
            alpha_power: int = 0) -> "TrigPoly":
        return cls([(k, m, alpha_power, 0, coeff)])

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    def __iter__(self) -> Iterator[Term]:
        for (key, p), (c, s) in sorted(self._terms.items(), key=_sort_key):
            yield Term(key, p, c, s)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, TrigPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction, Coeff)):
            return self == TrigPoly.const(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(frozenset(self._terms.items())))
        return self._hash

    @property
    def alpha_powers(self) -> set[int]:
        return {p for (_, p) in self._terms}

    def has_phases(self) -> bool:
        return any(key.m != _Z3 for (key, _) in self._terms)

    def max_abs_coeff(self) -> float:
        return max((max(abs(float(c)), abs(float(s))) for c, s in self._terms.values()),
                   default=0.0)

    def __repr__(self) -> str:
        if not self._terms:
            return "TrigPoly(0)"
        return "TrigPoly(" + " + ".join(_fmt_term(t) for t in self) + ")"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "TrigPoly":
        other = _lift(other)
        if other is None:
            return NotImplemented
        return tp_add(self, other)

    __radd__ = __add__

    def __neg__(self) -> "TrigPoly":
        return TrigPoly._from_canonical({key: (-c, -s) for key, (c, s) in self._terms.items()})

    def __sub__(self, other) -> "TrigPoly":
        other = _lift(other)
        if other is None:
            return NotImplemented
        return tp_add(self, -other)

    def __rsub__(self, other) -> "TrigPoly":
        return _lift(other) - self

    def __mul__(self, other) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            return tp_mul(self, other)
        try:
            scalar = Coeff.coerce(other)
        except TypeError:
            return NotImplemented
        return self.scale(scalar)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TrigPoly":
        return self.scale(1 / Coeff.coerce(other))

    def scale(self, scalar, alpha_power: int = 0) -> "TrigPoly":
        """Multiply by ``scalar * alpha**alpha_power``."""
        scalar = Coeff.coerce(scalar)
        if not scalar:
            return TrigPoly.zero()
        return TrigPoly._from_canonical({
            (key, p + alpha_power): (c * scalar, s * scalar)
            for (key, p), (c, s) in self._terms.items()
        })

    def diff(self, axis: int) -> "TrigPoly":
        return tp_diff(self, axis)

    def subst_phases(self, xi) -> "TrigPoly":
        return tp_subst_phases(self, xi)

    def eval(self, point, alpha: float = 1.0, xi=None):
        return tp_eval(self, point, alpha, xi)

    def filter(self, predicate) -> "TrigPoly":
        """Keep the terms for which ``predicate(key, alpha_power)`` is true."""
        return TrigPoly._from_canonical(
            {kp: cs for kp, cs in self._terms.items() if predicate(*kp)})


def _sort_key(item):
    (key, p), _ = item
    return (key.k, key.m, p)


def _lift(value) -> TrigPoly | None:
    if isinstance(value, TrigPoly):
        return value
    try:
        return TrigPoly.const(Coeff.coerce(value))
    except TypeError:
        return None


def _fmt_term(t: Term) -> str:
    arg = []
    for j, kj in enumerate(t.key.k):
        if kj:
            arg.append(f"{kj}αx{j + 1}")
    for j, mj in enumerate(t.key.m):
        if mj:
            arg.append(f"{mj}ξ{j + 1}")
    angle = "+".join(arg).replace("+-", "-") or "0"
    scale = f"α^{t.alpha_power} " if t.alpha_power else ""
    parts = []
    if t.cos:
        parts.append(f"({t.cos})cos({angle})")
    if t.sin:
        parts.append(f"({t.sin})sin({angle})")
    return scale + " + ".join(parts)


# ---------------------------------------------------------------------------
# ring operations and calculus


def tp_add(x: TrigPoly, y: TrigPoly) -> TrigPoly:
    if not y._terms:
        return x
    terms = dict(x._terms)
    for key, (c, s) in y._terms.items():
        cur = terms.get(key)
        if cur is None:
            terms[key] = (c, s)
            continue
        nc, ns = cur[0] + c, cur[1] + s
        if nc or ns:
            terms[key] = (nc, ns)
        else:
            del terms[key]
    return TrigPoly._from_canonical(terms)


def tp_mul(x: TrigPoly, y: TrigPoly) -> TrigPoly:
    """Exact product, rewriting every product of sinusoids as a sum."""
    acc = _Acc()
    for (kx, px), (c1, s1) in x._terms.items():
        for (ky, py), (c2, s2) in y._terms.items():
            p = px + py
            # A + B and A - B
            cp = c1 * c2 - s1 * s2
            sp = c1 * s2 + s1 * c2
            cm = c1 * c2 + s1 * s2
            sm = s1 * c2 - c1 * s2
            if cp or sp:
                acc.add(_vadd(kx.k, ky.k), _vadd(kx.m, ky.m), p, cp * HALF, sp * HALF)
            if cm or sm:
                acc.add(_vsub(kx.k, ky.k), _vsub(kx.m, ky.m), p, cm * HALF, sm * HALF)
    return acc.build()


def tp_diff(x: TrigPoly, axis: int) -> TrigPoly:
    """Partial derivative along spatial axis 0, 1 or 2."""
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis!r}")
    out = {}
    for (key, p), (c, s) in x._terms.items():
        kj = key.k[axis]
        if kj:
            # d/dx [c cos + s sin](alpha k.x) = alpha*kj*(s cos - c sin)
            out[(key, p + 1)] = (s * kj, -c * kj)
    return TrigPoly._from_canonical(out)


# exact cos/sin of n*pi/6, indexed by n mod 12
_R3_2 = Coeff(0, Fraction(1, 2))
_H = Coeff(Fraction(1, 2))
_SPECIAL = [
    (ONE, ZERO), (_R3_2, _H), (_H, _R3_2), (ZERO, ONE),
    (-_H, _R3_2), (-_R3_2, _H), (-ONE, ZERO), (-_R3_2, -_H),
    (-_H, -_R3_2), (ZERO, -ONE), (_H, -_R3_2), (_R3_2, -_H),
]


def phase_units(xi) -> tuple[int, int, int]:
    """Convert phases given as rational multiples of pi into units of pi/6.

    ``xi`` holds three values ``q_j`` meaning ``xi_j = q_j * pi``; each must be
    a multiple of 1/6.  Strings such as ``"-1/3"`` are accepted.
    """
    if len(xi) != 3:
        raise ValueError("expected three phases")
    units = []
    for q in xi:
        if isinstance(q, float):
            raise ValueError("phases must be exact rationals (multiples of pi), not floats")
        n = Fraction(q) * 6
        if n.denominator != 1:
            raise ValueError(f"phase {q}*pi is not a multiple of pi/6")
        units.append(int(n))
    return tuple(units)


def exact_cos_sin(n: int) -> tuple[Coeff, Coeff]:
    """``(cos, sin)`` of ``n*pi/6`` as exact Coeff values."""
    return _SPECIAL[n % 12]


def tp_subst_phases(x: TrigPoly, xi) -> TrigPoly:
    """Substitute exact phases (multiples of pi/6, given as multiples of pi)."""
    n = phase_units(xi)
    acc = _Acc()
    for (key, p), (c, s) in x._terms.items():
        m = key.m
        if m == _Z3:
            acc.add(key.k, _Z3, p, c, s)
            continue
        ct, st = exact_cos_sin(m[0] * n[0] + m[1] * n[1] + m[2] * n[2])
        # cos(A+t) = cos t cos A - sin t sin A ; sin(A+t) = sin t cos A + cos t sin A
        acc.add(key.k, _Z3, p, c * ct + s * st, s * ct - c * st)
    return acc.build()


def _eval_terms(items, point, alpha: float, xi):
    x0, x1, x2 = (np.asarray(c, dtype=float) for c in point)
    shape = np.broadcast(x0, x1, x2).shape
    total = np.zeros(shape)
    xi = np.zeros(3) if xi is None else np.asarray(xi, dtype=float)
    for k, m, p, c, s in items:
        theta = alpha * (k[0] * x0 + k[1] * x1 + k[2] * x2) + (m[0] * xi[0] + m[1] * xi[1] + m[2] * xi[2])
        scale = alpha ** p
        if c:
            total = total + (scale * c) * np.cos(theta)
        if s:
            total = total + (scale * s) * np.sin(theta)
    return total if shape else float(total)


def tp_eval(x: TrigPoly, point, alpha: float = 1.0, xi=None):
    """Floating-point evaluation at ``point`` (three coordinates or coordinate arrays).

    ``xi`` gives numerical phase values in radians; it is required only when
    ``x`` still carries phase frequencies.
    """
    if xi is None and x.has_phases():
        raise ValueError("polynomial has phase frequencies; pass numerical xi")
    items = [(key.k, key.m, p, float(c), float(s)) for (key, p), (c, s) in x._terms.items()]
    return _eval_terms(items, point, float(alpha), xi)


def tp_constant_mode(x: TrigPoly) -> dict[int, Coeff]:
    """Coefficient of the all-zero frequency, by alpha power (the cell mean)."""
    return {p: c for (key, p), (c, _) in x._terms.items() if key.is_zero()}


def constant_part(x: TrigPoly) -> TrigPoly:
    """Terms that do not depend on position (spatial frequency zero)."""
    return x.filter(lambda key, p: key.k == _Z3)


# ---------------------------------------------------------------------------
# vector calculus on triples


def gradient(phi: TrigPoly) -> tuple[TrigPoly, TrigPoly, TrigPoly]:
    return (tp_diff(phi, 0), tp_diff(phi, 1), tp_diff(phi, 2))


def divergence(v: Sequence[TrigPoly]) -> TrigPoly:
    return tp_diff(v[0], 0) + tp_diff(v[1], 1) + tp_diff(v[2], 2)


def curl(v: Sequence[TrigPoly]) -> tuple[TrigPoly, TrigPoly, TrigPoly]:
    return (
        tp_diff(v[2], 1) - tp_diff(v[1], 2),
        tp_diff(v[0], 2) - tp_diff(v[2], 0),
        tp_diff(v[1], 0) - tp_diff(v[0], 1),
    )


def laplacian(x: TrigPoly) -> TrigPoly:
    out = {}
    for (key, p), (c, s) in x._terms.items():
        k2 = -(key.k[0] ** 2 + key.k[1] ** 2 + key.k[2] ** 2)
        if k2:
            out[(key, p + 2)] = (c * k2, s * k2)
    return TrigPoly._from_canonical(out)


def dot(u: Sequence[TrigPoly], v: Sequence[TrigPoly]) -> TrigPoly:
    return tp_mul(u[0], v[0]) + tp_mul(u[1], v[1]) + tp_mul(u[2], v[2])


class NotAGradientError(ValueError):
    """Raised when a vector field has no periodic potential.

    ``witness`` is the first nonzero curl component (``None`` when the
    failure is a position-independent term), ``pair`` the axes it belongs to.
    """

    def __init__(self, message: str, witness: TrigPoly | None = None, pair=None):
        super().__init__(message)
        self.witness = witness
        self.pair = pair


def first_curl_witness(g: Sequence[TrigPoly]):
    """First nonzero ``d_i g_j - d_j g_i`` (i < j) as ``((i, j), poly)``, or ``None``."""
    for i, j in ((0, 1), (0, 2), (1, 2)):
        w = tp_diff(g[j], i) - tp_diff(g[i], j)
        if w:
            return (i, j), w
    return None


def tp_potential(g: Sequence[TrigPoly]) -> TrigPoly:
    """Zero-mean ``phi`` with ``grad phi == g`` exactly.

    Each mode is antidifferentiated along the first axis on which its
    spatial frequency is nonzero; the result is then checked against every
    component.
    """
    if len(g) != 3:
        raise ValueError("expected three components")
    for i, gi in enumerate(g):
        for (key, p) in gi._terms:
            if key.k == _Z3:
                raise NotAGradientError(
                    f"component {i} has a position-independent term; no periodic potential exists")
    acc = _Acc()
    seen = set()
    for gi in g:
        for (key, p) in gi._terms:
            if (key, p) in seen:
                continue
            seen.add((key, p))
            j = next(a for a in range(3) if key.k[a])
            term = g[j]._terms.get((key, p))
            if term is None:
                continue
            if p < 1:
                raise NotAGradientError("alpha grading of g must be at least 1")
            c, s = term
            kj = key.k[j]
            # inverse of tp_diff: (c', s') = kj*(s, -c)
            acc.add(key.k, key.m, p - 1, -s / kj, c / kj)
    phi = acc.build()
    if gradient(phi) != tuple(g):
        found = first_curl_witness(g)
        if found is None:  # pragma: no cover - grad mismatch implies nonzero curl
            raise NotAGradientError("field is not a gradient")
        pair, w = found
        raise NotAGradientError(
            f"field is not a gradient: d{pair[0]} g{pair[1]} - d{pair[1]} g{pair[0]} != 0",
            witness=w, pair=pair)
    return phi


# ---------------------------------------------------------------------------
# real-coefficient polynomials and the heat semigroup


class RealTrigPoly:
    """Trigonometric polynomial with floating-point coefficients (no phases)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping):
        self.terms = dict(terms)

    @classmethod
    def from_exact(cls, x: TrigPoly) -> "RealTrigPoly":
        if x.has_phases():
            raise ValueError("substitute phases before converting to real coefficients")
        return cls({kp: (float(c), float(s)) for kp, (c, s) in x.terms.items()})

    def eval(self, point, alpha: float = 1.0):
        items = [(key.k, key.m, p, c, s) for (key, p), (c, s) in self.terms.items()]
        return _eval_terms(items, point, float(alpha), None)

    def __repr__(self) -> str:
        return f"RealTrigPoly({len(self.terms)} terms)"


def heat_propagate(x: TrigPoly | RealTrigPoly, t, kappa: float, alpha: float) -> RealTrigPoly:
    """Solve the heat equation for time ``t``: mode ``k`` is damped by exp(-kappa alpha^2 |k|^2 t)."""
    if isinstance(x, TrigPoly):
        x = RealTrigPoly.from_exact(x)
    rate = float(kappa) * float(alpha) ** 2 * float(t)
    out = {}
    for (key, p), (c, s) in x.terms.items():
        if key.m != _Z3:
            raise ValueError("phases must be substituted before heat propagation")
        f = math.exp(-rate * (key.k[0] ** 2 + key.k[1] ** 2 + key.k[2] ** 2))
        out[(key, p)] = (c * f, s * f)
    return RealTrigPoly(out)


def eigen_rate(x: TrigPoly) -> int | None:
    """Shared ``|k|^2`` of every term, or ``None`` when the terms disagree (or x is 0)."""
    rates = {key.k[0] ** 2 + key.k[1] ** 2 + key.k[2] ** 2 for (key, _) in x.terms}
    return rates.pop() if len(rates) == 1 else None


@dataclass(frozen=True)
class DecayField:
    """Spatial profiles times ``exp(-rate * alpha^2 * kappa * t)``."""

    profiles: tuple[TrigPoly, ...]
    rate: Fraction

    def __post_init__(self):
        profiles = tuple(self.profiles)
        if len(profiles) not in (1, 3):
            raise ValueError("a DecayField has one or three profiles")
        rate = Fraction(self.rate)
        if rate < 0:
            raise ValueError("decay rate must be nonnegative")
        object.__setattr__(self, "profiles", profiles)
        object.__setattr__(self, "rate", rate)

    def factor(self, t: float, alpha: float, kappa: float) -> float:
        return math.exp(-float(self.rate) * alpha ** 2 * kappa * t)

    def eval(self, point, t: float, alpha: float, kappa: float, xi=None):
        f = self.factor(t, alpha, kappa)
        vals = [f * tp_eval(prof, point, alpha, xi) for prof in self.profiles]
        return vals[0] if len(vals) == 1 else np.stack(np.broadcast_arrays(*vals))


# ---------------------------------------------------------------------------
# canonical JSON


def to_json(x: TrigPoly) -> list[dict]:
    return [
        {"k": list(t.key.k), "m": list(t.key.m), "alpha_power": t.alpha_power,
         "cos": str(t.cos), "sin": str(t.sin)}
        for t in x
    ]


def from_json(items: Iterable[Mapping]) -> TrigPoly:
    return TrigPoly(
        (d["k"], d.get("m", _Z3), d.get("alpha_power", 0),
         Coeff.parse(d["cos"]), Coeff.parse(d["sin"]))
        for d in items
    )


ALPHA = TrigPoly.const(1, alpha_power=1)
