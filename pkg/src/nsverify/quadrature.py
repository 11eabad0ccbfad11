"""Numerical check of the one-dimensional Gaussian integral identities.

The left-hand sides are integrated adaptively on a finite window around
``x``; the neglected Gaussian tails are bounded analytically and added to the
error estimate.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import asdict, dataclass

from scipy import integrate, special

IDENTITIES = ("C1", "C2", "C3")
DEFAULT_SWEEP = {
    "tau": (0.1, 0.5, 1.0, 2.0),
    "alpha": (0.5, 1.0, 2.0),
    "x": (0.0, 0.7, math.pi),
}


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadResult:
    identity: str
    tau: float
    alpha: float
    x: float
    value: float
    reference: float
    rel_error: float
    error_estimate: float

    def to_dict(self) -> dict:
        return asdict(self)


def closed_form(identity: str, tau: float, alpha: float, x: float) -> float:
    base = 2.0 * math.sqrt(math.pi * tau)
    if identity == "C1":
        return base
    damp = base * math.exp(-alpha * alpha * tau)
    if identity == "C2":
        return damp * math.sin(alpha * x)
    if identity == "C3":
        return damp * math.cos(alpha * x)
    raise ValueError(f"unknown identity {identity!r}")


def amplitude(identity: str, tau: float, alpha: float) -> float:
    """Size of the right-hand side independent of ``x``; relative errors use it
    as the floor of the denominator, since sin/cos can vanish at ``x``."""
    base = 2.0 * math.sqrt(math.pi * tau)
    return base if identity == "C1" else base * math.exp(-alpha * alpha * tau)


def _gaussian(tau: float, x: float):
    four_tau = 4.0 * tau
    return lambda u: math.exp(-(x - u) ** 2 / four_tau)


def _integrand(identity: str, tau: float, alpha: float, x: float):
    four_tau = 4.0 * tau
    if identity == "C1":
        return lambda u: math.exp(-(x - u) ** 2 / four_tau)
    if identity == "C2":
        return lambda u: math.sin(alpha * u) * math.exp(-(x - u) ** 2 / four_tau)
    if identity == "C3":
        return lambda u: math.cos(alpha * u) * math.exp(-(x - u) ** 2 / four_tau)
    raise ValueError(f"unknown identity {identity!r}")


def verify_gaussian_identity(identity: str, tau: float, alpha: float = 1.0, x: float = 0.0,
                             rtol: float = 1e-10) -> QuadResult:
    """Integrate the left side of ``identity`` and compare with its closed form.

    Raises :class:`QuadratureError` when the integrator's own error estimate
    (tails included) does not meet ``rtol``.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    period = 2 * math.pi / abs(alpha) if alpha else 0.0
    half_width = max(10.0 * math.sqrt(2.0 * tau), period)
    ref = closed_form(identity, tau, alpha, x)
    scale = max(abs(ref), amplitude(identity, tau, alpha))
    gauss = _gaussian(tau, x)
    opts = dict(epsabs=1e-12 * scale, epsrel=1e-12, limit=500)
    if identity in ("C2", "C3") and alpha:
        # oscillatory-weight rule for gauss(u) * sin/cos(alpha u)
        opts.update(weight="sin" if identity == "C2" else "cos", wvar=alpha)
        f = gauss
    else:
        f = _integrand(identity, tau, alpha, x)
    with warnings.catch_warnings():
        # round-off warnings are reflected in the returned error estimate
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        left, e1 = integrate.quad(f, x - half_width, x, **opts)
        right, e2 = integrate.quad(f, x, x + half_width, **opts)
    value = left + right
    # |integrand| <= Gaussian, so the two tails are bounded by its tail mass
    tail = 2.0 * math.sqrt(math.pi * tau) * special.erfc(half_width / (2.0 * math.sqrt(tau)))
    err_est = float((e1 + e2 + tail) / scale)
    if err_est > rtol:
        raise QuadratureError(
            f"{identity} at tau={tau}, alpha={alpha}, x={x}: error estimate {err_est:.3e} exceeds {rtol:g}")
    return QuadResult(identity, tau, alpha, x, value, ref, abs(value - ref) / scale, err_est)


def sweep(taus=DEFAULT_SWEEP["tau"], alphas=DEFAULT_SWEEP["alpha"], xs=DEFAULT_SWEEP["x"],
          identities=IDENTITIES, rtol: float = 1e-10) -> list[QuadResult]:
    out = []
    for ident, tau, alpha, x in itertools.product(identities, taus, alphas, xs):
        out.append(verify_gaussian_identity(ident, tau, alpha, x, rtol=rtol))
    return out
