"""Exact verification of the momentum balance for catalog flows.

Everything here operates on :class:`~nsverify.exactfield.TrigPoly` objects,
so every check either passes with an empty residual or fails with a nonzero
polynomial witness.  Viscosity and density factor out of each check and stay
symbolic; time dependence is handled through the decay rates.
"""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from nsverify.exactfield import (
    ONE,
    Coeff,
    DecayField,
    NotAGradientError,
    TrigPoly,
    constant_part,
    curl,
    divergence,
    dot,
    first_curl_witness,
    gradient,
    laplacian,
    phase_units,
    tp_constant_mode,
    tp_diff,
    tp_mul,
    tp_potential,
    tp_subst_phases,
    to_json,
)
from nsverify.flows import (
    FlowSpec,
    general_family_symbolic,
    make_general_family,
)

Triple = tuple[TrigPoly, TrigPoly, TrigPoly]


def compute_inertial(v: Sequence[TrigPoly]) -> Triple:
    """Advective term ``g_i = sum_j v_j d_j v_i``."""
    return tuple(
        sum((tp_mul(v[j], tp_diff(v[i], j)) for j in range(3)), TrigPoly.zero())
        for i in range(3)
    )


def split_axis_independent(gi: TrigPoly, axis: int) -> tuple[TrigPoly, TrigPoly]:
    """Split into the terms that do not depend on ``x_axis`` and the rest."""
    v = gi.filter(lambda key, p: key.k[axis] == 0)
    return v, gi - v


# ---------------------------------------------------------------------------
# phase-condition scan


_SYMBOLIC_V: Optional[Triple] = None


def symbolic_axis_independent_parts() -> Triple:
    """x_i-independent parts of the inertial term of the family, phases symbolic."""
    global _SYMBOLIC_V
    if _SYMBOLIC_V is None:
        g = compute_inertial(general_family_symbolic())
        _SYMBOLIC_V = tuple(split_axis_independent(g[i], i)[0] for i in range(3))
    return _SYMBOLIC_V


def _phase_condition_holds(xi) -> bool:
    return all(not tp_subst_phases(vi, xi) for vi in symbolic_axis_independent_parts())


def _scan_chunk(candidates):
    return [xi for xi in candidates if _phase_condition_holds(xi)]


def lattice(step=Fraction(1, 6)) -> list[tuple[Fraction, Fraction, Fraction]]:
    """All phase triples in (-pi, pi] on the lattice ``step * pi``."""
    step = Fraction(step)
    if (6 * step).denominator != 1 or step <= 0 or (1 / step).denominator != 1:
        raise ValueError("step must be pi/6 times a divisor of 6")
    per = int(1 / step)
    axis = [step * n for n in range(-per + 1, per + 1)]
    return list(itertools.product(axis, repeat=3))


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("NSVERIFY_THREADS", "1")))
    except ValueError:
        return 1


def phase_condition_scan(step=Fraction(1, 6), predicate: Optional[Callable] = None,
                         workers: Optional[int] = None) -> list[tuple[Fraction, Fraction, Fraction]]:
    """Phase triples (multiples of pi) for which every x_i-independent part vanishes.

    ``predicate`` replaces the exact test; it exists to sanity-check the
    harness.  The order of the result follows the lattice order.
    """
    candidates = lattice(step)
    if predicate is not None:
        return [xi for xi in candidates if predicate(xi)]
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        return _scan_chunk(candidates)
    chunks = [candidates[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        found = set(itertools.chain.from_iterable(pool.map(_scan_chunk, chunks)))
    return [xi for xi in candidates if xi in found]


# ---------------------------------------------------------------------------
# gradient condition and pressure


@dataclass
class GradientCheck:
    passed: bool
    witness: Optional[TrigPoly] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.passed


def gradient_condition_check(g: Sequence[TrigPoly]) -> GradientCheck:
    """Exact test that ``g`` equals its own gradient part.

    For a periodic field this holds iff ``g`` is curl-free and has no
    position-independent part.
    """
    found = first_curl_witness(g)
    if found is not None:
        (i, j), w = found
        return GradientCheck(False, w, f"d{i + 1} g{j + 1} - d{j + 1} g{i + 1} != 0")
    for i, gi in enumerate(g):
        mean = constant_part(gi)
        if mean:
            return GradientCheck(False, mean, f"g{i + 1} has a position-independent part")
    return GradientCheck(True)


def reconstruct_pressure(g: Sequence[TrigPoly], rho=1) -> TrigPoly:
    """Zero-mean pressure profile with ``grad p = -rho g``."""
    return tp_potential(g).scale(-Coeff.coerce(rho))


@dataclass
class PressureMatch:
    """Outcome of matching a reconstructed pressure against a reference one.

    ``scale`` is +1 or -1 when ``p_rec == scale * p_ref + offset`` holds
    exactly and ``None`` otherwise.  ``best_scale`` and ``residual`` always
    describe the sign that leaves the smaller residual.
    """

    scale: Optional[int]
    offset: Coeff
    residual: TrigPoly
    best_scale: int


def compare_pressure(p_rec: TrigPoly, p_ref: TrigPoly) -> PressureMatch:
    best = None
    for s in (1, -1):
        diff = p_rec - p_ref.scale(s)
        const = constant_part(diff)
        # only a plain (alpha^0, phase-free) constant counts as an offset
        offset = tp_constant_mode(const).get(0, Coeff())
        residual = diff - TrigPoly.const(offset)
        if not residual:
            return PressureMatch(s, offset, residual, s)
        if best is None or len(residual) < len(best[2]):
            best = (s, offset, residual)
    s, offset, residual = best
    return PressureMatch(None, offset, residual, s)


def momentum_residual(flow: FlowSpec, p, rho=1) -> tuple[Triple, Triple]:
    """Residual of the momentum equation grouped by time factor.

    With ``v = V exp(-r a^2 k t)`` and ``p = P exp(-2 r a^2 k t)`` the residual
    splits into ``k * R_linear * exp(-r ...)`` and ``R_pressure * exp(-2r ...)``:

        R_linear   = -r alpha^2 V - Laplacian V
        R_pressure = G + grad(P) / rho

    ``p`` is a TrigPoly profile or a one-profile DecayField of rate ``2r``.
    The flow solves the equations iff both triples are zero.
    """
    r = flow.velocity.rate
    if isinstance(p, DecayField):
        if len(p.profiles) != 1:
            raise ValueError("pressure has a single profile")
        if p.rate != 2 * r:
            raise ValueError(f"pressure rate {p.rate} must be twice the velocity rate {r}")
        p = p.profiles[0]
    v = flow.profiles
    r_lin = tuple(vi.scale(-r, alpha_power=2) - laplacian(vi) for vi in v)
    g = compute_inertial(v)
    inv_rho = 1 / Coeff.coerce(rho)
    r_p = tuple(gi + dp.scale(inv_rho) for gi, dp in zip(g, gradient(p)))
    return r_lin, r_p


# ---------------------------------------------------------------------------
# energy and helicity


@dataclass(frozen=True)
class EnergyMean:
    """Mean kinetic energy per unit mass: ``value * exp(-rate alpha^2 kappa t)``."""

    value: Coeff
    rate: Fraction


def kinetic_energy_mean(v: DecayField, scale_sq=ONE) -> EnergyMean:
    """Cell average of ``|v|^2 / 2``; ``scale_sq`` multiplies the squared field."""
    sq = dot(v.profiles, v.profiles)
    modes = tp_constant_mode(sq)
    if set(modes) - {0}:
        raise ValueError("velocity profiles must not carry alpha factors")
    value = modes.get(0, Coeff()) * Fraction(1, 2) * Coeff.coerce(scale_sq)
    return EnergyMean(value, 2 * v.rate)


@dataclass
class BeltramiResult:
    eigenvalue: Optional[tuple[Coeff, int]]
    mean_helicity: dict

    def __bool__(self) -> bool:
        return self.eigenvalue is not None


def beltrami_check(v: Sequence[TrigPoly], candidates) -> BeltramiResult:
    """Find ``lam`` among ``candidates`` with ``curl v == lam v`` exactly.

    Candidates are ``(Coeff, alpha_power)`` pairs standing for
    ``coeff * alpha**alpha_power``.  ``mean_helicity`` maps alpha power to the
    cell mean of ``v . curl v``.
    """
    w = curl(v)
    helicity = tp_constant_mode(dot(v, w))
    found = None
    if any(v):
        for coeff, power in candidates:
            coeff = Coeff.coerce(coeff)
            if all(wi == vi.scale(coeff, alpha_power=power) for wi, vi in zip(w, v)):
                found = (coeff, power)
                break
    return BeltramiResult(found, helicity)


def leray_remainder_exact(g: Sequence[TrigPoly]) -> Triple:
    """Solenoidal part ``g - grad Laplacian^-1 div g`` computed mode by mode.

    The position-independent modes pass through unchanged.
    """
    keys = set().union(*(gi.terms.keys() for gi in g))
    zero = (Coeff(), Coeff())
    out = [[], [], []]
    for key, p in keys:
        vals = [gi.terms.get((key, p), zero) for gi in g]
        k = key.k
        k2 = k[0] ** 2 + k[1] ** 2 + k[2] ** 2
        if k2:
            kc = sum((vals[i][0] * k[i] for i in range(3)), Coeff())
            ks = sum((vals[i][1] * k[i] for i in range(3)), Coeff())
            vals = [(vals[i][0] - kc * Fraction(k[i], k2), vals[i][1] - ks * Fraction(k[i], k2))
                    for i in range(3)]
        for i in range(3):
            out[i].append((k, key.m, p, vals[i][0], vals[i][1]))
    return tuple(TrigPoly(terms) for terms in out)


# ---------------------------------------------------------------------------
# reports


@dataclass
class CheckEntry:
    check_id: str
    flow: str
    mode: str  # "exact" | "numeric"
    status: str  # "pass" | "fail"
    witness: object = None  # TrigPoly for exact checks, max-abs error for numeric
    notes: str = ""

    def to_dict(self) -> dict:
        if isinstance(self.witness, TrigPoly):
            witness = to_json(self.witness) if self.witness else None
        elif isinstance(self.witness, tuple):
            witness = [to_json(w) for w in self.witness] if any(self.witness) else None
        else:
            witness = self.witness
        return {"check_id": self.check_id, "flow": self.flow, "mode": self.mode,
                "status": self.status, "witness": witness, "notes": self.notes}


@dataclass
class VerificationReport:
    entries: list[CheckEntry] = field(default_factory=list)

    def add(self, check_id, flow, mode, passed, witness=None, notes="") -> CheckEntry:
        entry = CheckEntry(check_id, flow, mode, "pass" if passed else "fail", witness, notes)
        self.entries.append(entry)
        return entry

    @property
    def passed(self) -> bool:
        return all(e.status == "pass" for e in self.entries)

    def __getitem__(self, check_id: str) -> CheckEntry:
        for e in self.entries:
            if e.check_id == check_id:
                return e
        raise KeyError(check_id)

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        return VerificationReport(self.entries + other.entries)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "entries": [e.to_dict() for e in self.entries]}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, **kw)


def _fmt_lambda(lam) -> str:
    coeff, power = lam
    return f"{coeff.pretty()}·α^{power}"


def verify_flow(flow: FlowSpec, rho=1, n: int = 32, numeric: bool = True) -> VerificationReport:
    """Run every applicable check on ``flow``."""
    rep = VerificationReport()
    name = flow.name
    v = flow.profiles
    div = divergence(v)
    rep.add("divergence_free", name, "exact", not div, div)

    if "compact_profiles" in flow.extras:
        diff = tuple(a - b for a, b in zip(v, flow.extras["compact_profiles"]))
        rep.add("compact_form", name, "exact", not any(diff), diff)

    g = compute_inertial(v)
    if flow.g_reference is not None:
        diff = tuple(a - b for a, b in zip(g, flow.g_reference))
        rep.add("inertial_reference", name, "exact", not any(diff), diff)
    if "div_g_reference" in flow.extras:
        diff = divergence(g) - flow.extras["div_g_reference"]
        rep.add("div_inertial_reference", name, "exact", not diff, diff)

    splits = [split_axis_independent(g[i], i) for i in range(3)]
    recombined = all(vv + ww == gi for (vv, ww), gi in zip(splits, g))
    v_parts = tuple(vv for vv, _ in splits)
    rep.add("phase_condition", name, "exact", recombined and not any(v_parts), v_parts,
            "x_i-independent parts of g_i vanish")

    r_lin = tuple(vi.scale(-flow.rate, alpha_power=2) - laplacian(vi) for vi in v)
    rep.add("decay_rate", name, "exact", not any(r_lin), r_lin,
            f"velocity rate {flow.rate} (exp(-{flow.rate} α²κt))")

    gc = gradient_condition_check(g)
    rep.add("gradient_condition", name, "exact", gc.passed, gc.witness, gc.reason)

    p_rec = None
    if gc.passed:
        p_rec = reconstruct_pressure(g, rho)
        lin, pres = momentum_residual(flow, DecayField((p_rec,), 2 * flow.rate), rho)
        rep.add("momentum_residual", name, "exact", not any(lin) and not any(pres), lin + pres,
                "reconstructed pressure, both time-factor groups")
    else:
        rep.add("momentum_residual", name, "exact", False, None,
                "no periodic pressure: inertial term is not a gradient")

    if flow.pressure_reference is not None:
        if p_rec is None:
            rep.add("pressure_vs_reference", name, "exact", False, None, "no reconstructed pressure")
        else:
            ref = flow.pressure_reference.profiles[0].scale(Coeff.coerce(rho))
            m = compare_pressure(p_rec, ref)
            note = (f"s = {m.scale:+d}, offset {m.offset.pretty()}" if m.scale is not None else
                    f"no exact match; closest s = {m.best_scale:+d} leaves {len(m.residual)} term(s)")
            rep.add("pressure_vs_reference", name, "exact", m.scale is not None, m.residual, note)

    energy = kinetic_energy_mean(flow.velocity, flow.velocity_scale_sq)
    rep.add("kinetic_energy", name, "exact", energy.rate == 2 * flow.rate, None,
            f"mean |v|²/2 = {energy.value.pretty()} (≈{float(energy.value):.12g}), rate {energy.rate}")

    bel = beltrami_check(v, flow.beltrami_candidates)
    hel = ", ".join(f"α^{p}: {c.pretty()}" for p, c in sorted(bel.mean_helicity.items())) or "0"
    note = (f"curl v = {_fmt_lambda(bel.eigenvalue)} v" if bel else "not Beltrami") + f"; mean helicity {hel}"
    if flow.name == "general_xi":
        ok = True
    else:
        ok = bool(bel) == flow.expect_beltrami
    rep.add("beltrami", name, "exact", ok, None, note)

    if numeric:
        from nsverify.spectral import leray_remainder_ratio

        ratio = leray_remainder_ratio(g, n=n, alpha=flow.alpha_value())
        rep.add("leray_numeric", name, "numeric", ratio <= 1e-12, ratio,
                f"max|U| / max|g| on a {n}³ grid")
    return rep


def verify_phases(xi, numeric: bool = False) -> VerificationReport:
    return verify_flow(make_general_family(xi), numeric=numeric)


def phases_to_str(xi) -> list[str]:
    phase_units(xi)
    return [f"{Fraction(q)}" for q in xi]
