"""Catalog of closed-form flows as exact objects.

Each constructor returns a :class:`FlowSpec` whose velocity is a
:class:`~nsverify.exactfield.DecayField`.  Reference expressions
(inertial term, pressure) are transcribed term by term and kept separate from
anything derived, so that derivation and transcription check each other.

Phases are given as rational multiples of pi, e.g. ``(-1/3, 1/3, 1/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from nsverify.exactfield import (
    ALPHA,
    ONE,
    Coeff,
    DecayField,
    TrigPoly,
    divergence,
    eigen_rate,
    tp_subst_phases,
)

F = Fraction
R3 = Coeff(0, 1)  # sqrt(3)
SOLUTION_PHASES = (F(-1, 3), F(1, 3), F(1, 2))
FLOW_NAMES = ("general_xi", "paper_solution", "taylor", "abc", "antuono")

_Z = (0, 0, 0)


def _e(axis: int, n: int = 1) -> tuple[int, int, int]:
    v = [0, 0, 0]
    v[axis] = n
    return tuple(v)


def sin(k=_Z, m=_Z) -> TrigPoly:
    return TrigPoly.sin(k, m)


def cos(k=_Z, m=_Z) -> TrigPoly:
    return TrigPoly.cos(k, m)


class FlowConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class FlowSpec:
    """A catalog flow.

    ``alpha`` is the numerical wave number bound by the flow (``pi`` for the
    Taylor and ABC flows) or ``None`` when it stays free.  ``velocity_scale``
    is a floating-point prefactor applied on top of the exact profiles and
    ``velocity_scale_sq`` its exact square.
    """

    name: str
    params: dict
    velocity: DecayField
    pressure_reference: Optional[DecayField] = None
    g_reference: Optional[tuple[TrigPoly, TrigPoly, TrigPoly]] = None
    alpha: Optional[float] = None
    velocity_scale: float = 1.0
    velocity_scale_sq: Coeff = ONE
    beltrami_candidates: tuple = ()
    expect_beltrami: bool = False
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.velocity.profiles) != 3:
            raise FlowConstructionError("velocity needs three components")
        if divergence(self.velocity.profiles):
            raise FlowConstructionError(f"{self.name}: velocity is not divergence-free")
        if self.pressure_reference is not None and self.pressure_reference.rate != 2 * self.velocity.rate:
            raise FlowConstructionError(f"{self.name}: pressure rate must be twice the velocity rate")

    @property
    def profiles(self) -> tuple[TrigPoly, TrigPoly, TrigPoly]:
        return self.velocity.profiles

    @property
    def rate(self) -> Fraction:
        return self.velocity.rate

    def alpha_value(self, default: float = 1.0) -> float:
        return self.alpha if self.alpha is not None else default


def _rate_of(profiles) -> Fraction:
    # every term must share |k|^2; that common value is the decay rate
    rates = {eigen_rate(p) for p in profiles if p}
    if not rates:
        return F(0)
    if len(rates) != 1 or None in rates:
        raise FlowConstructionError("profiles are not a single Laplacian eigenspace")
    return F(rates.pop())


# ---------------------------------------------------------------------------
# the general phase family


def general_family_symbolic() -> tuple[TrigPoly, TrigPoly, TrigPoly]:
    """Initial velocity with the three phases kept symbolic."""

    def s(axis, phase):
        return sin(_e(axis), _e(phase))

    def c(axis, phase):
        return cos(_e(axis), _e(phase))

    v1 = s(0, 0) * c(1, 1) * s(2, 2) - s(0, 1) * c(2, 0) * s(1, 2)
    v2 = s(1, 0) * c(2, 1) * s(0, 2) - s(1, 1) * c(0, 0) * s(2, 2)
    v3 = s(2, 0) * c(0, 1) * s(1, 2) - s(2, 1) * c(1, 0) * s(0, 2)
    return v1, v2, v3


def make_general_family(xi) -> FlowSpec:
    xi = tuple(F(q) for q in xi)
    v = tuple(tp_subst_phases(vi, xi) for vi in general_family_symbolic())
    velocity = DecayField(v, _rate_of(v))
    cand = (
        (R3, 1), (-R3, 1),
    )
    return FlowSpec("general_xi", {"xi": xi}, velocity, beltrami_candidates=cand)


# ---------------------------------------------------------------------------
# reference forms for the phase-locked solution


def compact_profiles() -> tuple[TrigPoly, TrigPoly, TrigPoly]:
    """Alternative closed form of the velocity, one term at a time."""
    third = Coeff(0, F(1, 3))  # 1/sqrt(3)
    out = []
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        ea, eb, ec = _e(a), _e(b), _e(c)
        diff = tuple(x - y for x, y in zip(eb, ec))
        summ = tuple(x + y for x, y in zip(eb, ec))
        bracket = (
            cos(ea) * sin(diff)
            - third * (sin(ea) * sin(summ))
            - (2 * third) * (cos(ea) * cos(eb) * cos(ec))
        )
        out.append(F(3, 4) * bracket)
    return tuple(out)


def reference_inertial() -> tuple[TrigPoly, TrigPoly, TrigPoly]:
    """Reference inertial term at the solution phases (multiplied by alpha)."""
    s1, s2, s3 = sin((2, 0, 0)), sin((0, 2, 0)), sin((0, 0, 2))
    c1, c2, c3 = cos((2, 0, 0)), cos((0, 2, 0)), cos((0, 0, 2))
    a, b = F(3, 32), F(3, 32) * R3
    g1 = (-F(3, 8) * s1 - a * (s1 * c2) - a * (s1 * c3)
          - b * (c1 * c3) + b * (c1 * c2)
          + b * (s1 * s2) - b * (s1 * s3)
          + a * (c1 * s3) + a * (c1 * s2))
    g2 = (-F(3, 8) * s2 - a * (s2 * c3) - a * (s2 * c1)
          - b * (c2 * c1) + b * (c2 * c3)
          + b * (s2 * s3) - b * (s2 * s1)
          + a * (c2 * s1) + a * (c2 * s3))
    g3 = (-F(3, 8) * s3 - a * (s3 * c1) - a * (s3 * c2)
          - b * (c3 * c2) + b * (c3 * c1)
          + b * (s3 * s1) - b * (s3 * s2)
          + a * (c3 * s2) + a * (c3 * s1))
    return tuple(ALPHA * g for g in (g1, g2, g3))


def reference_div_inertial() -> TrigPoly:
    """Reference divergence of the inertial term (multiplied by alpha^2)."""
    s1, s2, s3 = sin((2, 0, 0)), sin((0, 2, 0)), sin((0, 0, 2))
    c1, c2, c3 = cos((2, 0, 0)), cos((0, 2, 0)), cos((0, 0, 2))
    a, b = F(3, 8), F(3, 8) * R3
    d = (-F(3, 4) * c1 - F(3, 4) * c2 - F(3, 4) * c3
         - a * (c1 * c2) - a * (c1 * c3)
         + b * (s1 * c3) - b * (s1 * c2)
         + b * (c1 * s2) - b * (c1 * s3)
         - a * (s1 * s3) - a * (s1 * s2)
         - a * (c2 * c3) - b * (s2 * c3)
         + b * (c2 * s3) - a * (s2 * s3))
    return d.scale(1, alpha_power=2)


def reference_pressure() -> TrigPoly:
    """Reference pressure profile per unit density."""
    d12, d31, d23, d32 = (2, -2, 0), (-2, 0, 2), (0, 2, -2), (0, -2, 2)
    return (F(3, 16) * (cos((2, 0, 0)) + cos((0, 2, 0)) + cos((0, 0, 2)))
            + F(3, 64) * (cos(d12) + cos(d31))
            + F(3, 64) * R3 * (sin(d12) + sin(d31) + sin(d23) + cos(d32)))


def reference_v_parts() -> tuple[TrigPoly, TrigPoly, TrigPoly]:
    """Reference x_i-independent parts of the inertial term, phases symbolic."""

    def ph(*m):
        return m

    out = []
    for a, b in ((1, 2), (2, 0), (0, 1)):
        def sp(axis, m):
            return sin(_e(axis, 2), m)

        def cp(axis, m):
            return cos(_e(axis, 2), m)

        v = (- cos(m=ph(1, 0, -1)) * sin(m=ph(0, 1, -1)) * cp(a, ph(1, 1, 0))
             - cos(m=ph(1, 0, -1)) * cos(m=ph(1, -1, 0)) * sp(b, ph(0, 1, 1))
             - cos(m=ph(0, -1, 1)) * cos(m=ph(1, -1, 0)) * sp(a, ph(1, 0, 1))
             - cos(m=ph(0, -1, 1)) * sin(m=ph(1, 0, -1)) * cp(b, ph(1, 1, 0))
             + sin(m=ph(-1, 1, 0)) * sin(m=ph(-1, 0, 1)) * sp(a, ph(0, 1, 1))
             + sin(m=ph(-1, 1, 0)) * sin(m=ph(0, 1, -1)) * sp(b, ph(1, 0, 1)))
        out.append(F(1, 4) * ALPHA * v)
    return tuple(out)


def reference_w_parts(ambiguous_sign: int = 1) -> tuple[TrigPoly, TrigPoly, TrigPoly]:
    """Reference x_i-dependent parts of the inertial term, phases symbolic.

    ``ambiguous_sign`` is the sign of the
    cos(xi_1 - xi_2) cos(2x_i + xi_2 + xi_3) sin(2x_j + xi_1 + xi_3) term;
    +1 is the value consistent with the derived inertial term.
    """
    out = []
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        def sp(axis, m):
            return sin(_e(axis, 2), m)

        def cp(axis, m):
            return cos(_e(axis, 2), m)

        w = (sp(i, (2, 0, 0))
             - sp(i, (2, 0, 0)) * cp(k, (0, 0, 2))
             + sp(i, (0, 2, 0))
             - sp(i, (0, 2, 0)) * cp(j, (0, 0, 2))
             - 2 * (sin(m=(0, -1, 1)) * sin(m=(-1, 0, 1)) * sp(i, (1, 1, 0)))
             - sin(m=(-1, 0, 1)) * sp(i, (1, 1, 0)) * sp(j, (0, 1, 1))
             - sin(m=(0, -1, 1)) * sp(i, (1, 1, 0)) * sp(k, (1, 0, 1))
             + sin(m=(0, 1, -1)) * cp(i, (1, 0, 1)) * cp(j, (1, 1, 0))
             + cos(m=(1, -1, 0)) * cp(i, (1, 0, 1)) * sp(k, (0, 1, 1))
             + ambiguous_sign * (cos(m=(1, -1, 0)) * cp(i, (0, 1, 1)) * sp(j, (1, 0, 1)))
             + sin(m=(1, 0, -1)) * cp(i, (0, 1, 1)) * cp(k, (1, 1, 0)))
        out.append(F(1, 4) * ALPHA * w)
    return tuple(out)


def make_phase_locked() -> FlowSpec:
    v = tuple(tp_subst_phases(vi, SOLUTION_PHASES) for vi in general_family_symbolic())
    compact = compact_profiles()
    if v != compact:
        bad = [i for i in range(3) if v[i] != compact[i]]
        raise FlowConstructionError(f"compact and phase-substituted profiles differ in components {bad}")
    velocity = DecayField(v, _rate_of(v))
    if velocity.rate != 3:
        raise FlowConstructionError(f"expected decay rate 3, got {velocity.rate}")
    pressure = DecayField((reference_pressure(),), 6)
    return FlowSpec(
        "paper_solution", {"xi": SOLUTION_PHASES}, velocity,
        pressure_reference=pressure,
        g_reference=reference_inertial(),
        beltrami_candidates=((R3, 1), (-R3, 1)),
        expect_beltrami=True,
        extras={"compact_profiles": compact, "div_g_reference": reference_div_inertial()},
    )


# ---------------------------------------------------------------------------
# classical flows; their wave number pi is carried as alpha


def make_taylor() -> FlowSpec:
    v1 = sin((1, 0, 0)) * cos((0, 1, 0))
    v2 = -(cos((1, 0, 0)) * sin((0, 1, 0)))
    v = (v1, v2, TrigPoly.zero())
    g_ref = tuple(F(1, 2) * ALPHA * sin(_e(i, 2)) for i in (0, 1)) + (TrigPoly.zero(),)
    pressure = DecayField((-F(1, 4) * (cos((2, 0, 0)) + cos((0, 2, 0))),), 4)
    return FlowSpec(
        "taylor", {}, DecayField(v, 2),
        pressure_reference=pressure, g_reference=g_ref, alpha=math.pi,
        beltrami_candidates=((ONE, 1), (-ONE, 1)),
    )


def make_abc(a=1, b=1, c=1) -> FlowSpec:
    a, b, c = (Coeff.coerce(x) for x in (a, b, c))
    v1 = a * sin((0, 0, 1)) - c * cos((0, 1, 0))
    v2 = b * sin((1, 0, 0)) - a * cos((0, 0, 1))
    v3 = c * sin((0, 1, 0)) - b * cos((1, 0, 0))
    g_ref = (
        ALPHA * ((b * c) * (sin((1, 0, 0)) * sin((0, 1, 0))) - (a * b) * (cos((1, 0, 0)) * cos((0, 0, 1)))),
        ALPHA * ((a * c) * (sin((0, 1, 0)) * sin((0, 0, 1))) - (b * c) * (cos((1, 0, 0)) * cos((0, 1, 0)))),
        ALPHA * ((a * b) * (sin((1, 0, 0)) * sin((0, 0, 1))) - (a * c) * (cos((0, 1, 0)) * cos((0, 0, 1)))),
    )
    pressure = -((b * c) * (cos((1, 0, 0)) * sin((0, 1, 0)))
                 + (a * b) * (cos((0, 0, 1)) * sin((1, 0, 0)))
                 + (a * c) * (cos((0, 1, 0)) * sin((0, 0, 1))))
    nonzero = bool(a or b or c)
    return FlowSpec(
        "abc", {"a": a, "b": b, "c": c}, DecayField((v1, v2, v3), 1),
        pressure_reference=DecayField((pressure,), 2), g_reference=g_ref, alpha=math.pi,
        beltrami_candidates=((ONE, 1), (-ONE, 1)),
        expect_beltrami=nonzero,
    )


ANTUONO_SCALE_SQ = Coeff(F(32, 27))  # (4 sqrt2 / (3 sqrt3))^2


def make_antuono(v0=1) -> FlowSpec:
    """Phase-locked profiles with the normalizing prefactor 4*sqrt(2)/(3*sqrt(3)) * v0."""
    base = make_phase_locked()
    v0 = Coeff.coerce(v0)
    linear = 4 * math.sqrt(2) / (3 * math.sqrt(3)) * float(v0)
    return FlowSpec(
        "antuono", {"v0": v0}, base.velocity,
        velocity_scale=linear, velocity_scale_sq=ANTUONO_SCALE_SQ * v0 * v0,
        beltrami_candidates=base.beltrami_candidates, expect_beltrami=True,
        extras={"compact_profiles": base.extras["compact_profiles"]},
    )


def make_flow(name: str, **params) -> FlowSpec:
    """Look a flow up by catalog name."""
    if name == "paper_solution":
        return make_phase_locked()
    if name == "taylor":
        return make_taylor()
    if name == "abc":
        return make_abc(*params.get("abc", (1, 1, 1)))
    if name == "antuono":
        return make_antuono(params.get("v0", 1))
    if name == "general_xi":
        return make_general_family(params.get("xi", SOLUTION_PHASES))
    raise KeyError(name)
