"""Periodic-box pseudo-spectral Navier-Stokes integrator and Leray projector.

This module is the numerical counterpart of the exact checks: it never looks
at the symbolic inertial term.  Fields live on ``[0, 2 pi / alpha)^3`` sampled
at ``x_j = 2 pi j / (alpha n)`` and are stored component-first, shape
``(3, n, n, n)``.

Time stepping is the integrating-factor form of classical RK4: the viscous
term is applied exactly through ``exp(-kappa |k|^2 h)`` and the convective
term ``v . grad v`` is evaluated pseudo-spectrally with 2/3-rule dealiasing
and Leray-projected at every stage.
"""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.fft as sfft

from nsverify.exactfield import RealTrigPoly, TrigPoly, dot, tp_constant_mode, tp_eval

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralTolerances:
    trajectory: float = 1e-6
    projector: float = 1e-12
    divergence: float = 1e-12
    energy_growth: float = 1e-10  # relative growth per step that counts as unstable


TOLERANCES = SpectralTolerances()


def _workers() -> int:
    from nsverify.analysis import worker_count

    return worker_count()


@dataclass
class GridField:
    """Real samples of a vector field on the periodic cell."""

    data: np.ndarray
    alpha: float = 1.0
    kappa: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 4 or self.data.shape[0] != 3 or len(set(self.data.shape[1:])) != 1:
            raise ValueError(f"expected data of shape (3, n, n, n), got {self.data.shape}")
        if self.n < 8:
            raise ValueError("grid size must be at least 8")

    @property
    def n(self) -> int:
        return self.data.shape[1]

    def norm(self) -> float:
        """Root-mean-square magnitude over the cell."""
        return float(np.sqrt(np.mean(np.sum(self.data ** 2, axis=0))))

    def energy(self) -> float:
        """Cell-averaged kinetic energy per unit mass."""
        return 0.5 * float(np.mean(np.sum(self.data ** 2, axis=0)))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.data)))


def grid_coords(n: int, alpha: float = 1.0):
    x = 2 * np.pi * np.arange(n) / (alpha * n)
    return np.meshgrid(x, x, x, indexing="ij")


class Wavenumbers:
    """Wave vectors for ``rfftn`` over the last three axes, with the 2/3 mask."""

    def __init__(self, n: int, alpha: float = 1.0):
        self.n = n
        self.alpha = alpha
        full = np.fft.fftfreq(n, 1.0 / n)
        half = np.fft.rfftfreq(n, 1.0 / n)
        ki = np.meshgrid(full, full, half, indexing="ij")
        self.k = [alpha * kk for kk in ki]
        self.k2 = self.k[0] ** 2 + self.k[1] ** 2 + self.k[2] ** 2
        self.k2_safe = np.where(self.k2 == 0, 1.0, self.k2)
        self.ik = np.stack([1j * kk for kk in self.k])
        cut = n / 3.0
        self.mask = (np.abs(ki[0]) < cut) & (np.abs(ki[1]) < cut) & (np.abs(ki[2]) < cut)
        # rfft stores half the spectrum; interior planes stand for two modes
        w = np.full(half.shape, 2.0)
        w[0] = 1.0
        if n % 2 == 0:
            w[-1] = 1.0
        self.weight = np.broadcast_to(w, self.k2.shape) / float(n) ** 6

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        """Cell mean of ``sum_i a_i b_i`` for real fields given by their rfft coefficients."""
        return float(np.sum(self.weight * np.real(np.conj(a) * b)))


_WN_CACHE: dict = {}


def wavenumbers(n: int, alpha: float) -> Wavenumbers:
    key = (n, float(alpha))
    if key not in _WN_CACHE:
        _WN_CACHE[key] = Wavenumbers(n, alpha)
    return _WN_CACHE[key]


def _fft(a):
    return sfft.rfftn(a, axes=(-3, -2, -1), workers=_workers())


def _ifft(a, n):
    return sfft.irfftn(a, s=(n, n, n), axes=(-3, -2, -1), workers=_workers())


@dataclass
class SpectralState:
    """Fourier coefficients of a real field (Hermitian symmetry is implicit in rfft)."""

    hat: np.ndarray
    n: int
    alpha: float = 1.0

    @classmethod
    def from_grid(cls, f: GridField) -> "SpectralState":
        return cls(_fft(f.data), f.n, f.alpha)

    def to_grid(self, kappa: float = 0.0, t: float = 0.0) -> GridField:
        return GridField(_ifft(self.hat, self.n), self.alpha, kappa, t)

    @property
    def wn(self) -> Wavenumbers:
        return wavenumbers(self.n, self.alpha)


def _project_hat(hat: np.ndarray, wn: Wavenumbers) -> np.ndarray:
    kdot = wn.k[0] * hat[0] + wn.k[1] * hat[1] + wn.k[2] * hat[2]
    kdot = kdot / wn.k2_safe
    return np.stack([hat[i] - wn.k[i] * kdot for i in range(3)])


def _div_max(hat: np.ndarray, wn: Wavenumbers, n: int) -> float:
    d = 1j * (wn.k[0] * hat[0] + wn.k[1] * hat[1] + wn.k[2] * hat[2])
    return float(np.max(np.abs(_ifft(d, n))))


def spectral_divergence(f: GridField) -> np.ndarray:
    wn = wavenumbers(f.n, f.alpha)
    hat = _fft(f.data)
    return _ifft(1j * (wn.k[0] * hat[0] + wn.k[1] * hat[1] + wn.k[2] * hat[2]), f.n)


def leray_project(g: GridField) -> GridField:
    """Remove the gradient part: ``g - grad Laplacian^-1 div g``; the mean passes through."""
    wn = wavenumbers(g.n, g.alpha)
    hat = _project_hat(_fft(g.data), wn)
    return replace(g, data=_ifft(hat, g.n))


# ---------------------------------------------------------------------------
# sampling exact fields


def sample_polys(polys: Sequence[TrigPoly], n: int, alpha: float, scale: float = 1.0) -> np.ndarray:
    x = grid_coords(n, alpha)
    return np.stack([scale * np.broadcast_to(tp_eval(p, x, alpha), x[0].shape) for p in polys])


def grid_sample(flow, n: int = 32, t: float = 0.0, alpha: Optional[float] = None,
                kappa: float = 0.05) -> GridField:
    """Closed-form velocity of ``flow`` at time ``t`` on the grid."""
    alpha = flow.alpha_value() if alpha is None else alpha
    decay = flow.velocity.factor(t, alpha, kappa)
    data = sample_polys(flow.profiles, n, alpha, flow.velocity_scale * decay)
    return GridField(data, alpha, kappa, t)


def leray_remainder_ratio(g: Sequence[TrigPoly], n: int = 32, alpha: float = 1.0) -> float:
    """``max|P g| / max|g|`` with ``g`` sampled from exact polynomials."""
    field_ = GridField(sample_polys(g, n, alpha), alpha)
    gmax = field_.max_abs()
    if gmax == 0:
        return 0.0
    return leray_project(field_).max_abs() / gmax


# ---------------------------------------------------------------------------
# time integration


class CFLError(ValueError):
    pass


class InstabilityError(RuntimeError):
    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


def _nonlinear(hat: np.ndarray, wn: Wavenumbers, n: int) -> np.ndarray:
    """``-P(v . grad v)`` in Fourier space, dealiased."""
    hat = hat * wn.mask
    v = _ifft(hat, n)
    # grads[i, j] = d_j v_i
    grads = _ifft(hat[:, None] * wn.ik[None, :], n)
    adv = np.einsum("jxyz,ijxyz->ixyz", v, grads, optimize=False)
    out = _fft(adv)
    out *= wn.mask
    return -_project_hat(out, wn)


def _curl_hat(hat: np.ndarray, wn: Wavenumbers) -> np.ndarray:
    ik = wn.ik
    return np.stack([
        ik[1] * hat[2] - ik[2] * hat[1],
        ik[2] * hat[0] - ik[0] * hat[2],
        ik[0] * hat[1] - ik[1] * hat[0],
    ])


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    helicity: list = field(default_factory=list)
    max_div: list = field(default_factory=list)
    saved: list = field(default_factory=list)  # GridField snapshots

    def final(self) -> GridField:
        return self.saved[-1]


def stable_dt_bound(v0: GridField) -> float:
    """Largest step allowed by the advective CFL limit and RK4 stability."""
    vmax = v0.max_abs()
    if vmax == 0:
        return math.inf
    dx = 2 * np.pi / (v0.alpha * v0.n)
    cfl = 0.5 * dx / vmax
    kmax = v0.alpha * v0.n / 3.0
    # |imag eigenvalue| <= k_max * sum_i max|v_i|; RK4 is stable up to 2.83
    rk4 = 2.8 / (kmax * 3 * vmax)
    return min(cfl, rk4)


def evolve(v0: GridField, dt: float, T: float, kappa: float,
           save_times: Sequence[float] = (), observer: Optional[Callable] = None,
           tol: SpectralTolerances = TOLERANCES) -> Trajectory:
    """Integrate from ``v0`` up to time ``T`` with uniform steps of at most ``dt``.

    Energy, helicity and the largest divergence are recorded at every step.
    Snapshots are stored at the steps closest to ``save_times`` and always
    at the final time.  ``observer(t, state)`` receives a
    :class:`SpectralState` after every step (and at ``t = 0``).
    """
    if dt <= 0 or T < 0 or kappa < 0:
        raise ValueError("dt must be positive, T and kappa nonnegative")
    bound = stable_dt_bound(v0)
    if dt > bound:
        raise CFLError(f"dt = {dt:g} exceeds the stability bound {bound:g}")
    n, alpha = v0.n, v0.alpha
    wn = wavenumbers(n, alpha)
    steps = 0 if T == 0 else max(1, math.ceil(T / dt - 1e-9))
    h = T / steps if steps else 0.0
    save_steps = {int(round(s / h)) if h else 0 for s in save_times} | {steps}

    hat = _project_hat(_fft(v0.data), wn) * wn.mask
    e_half = np.exp(-kappa * wn.k2 * h / 2)
    e_full = e_half * e_half
    traj = Trajectory()

    def record(step: int, hat: np.ndarray):
        t = step * h
        traj.times.append(t)
        traj.energy.append(0.5 * wn.inner(hat, hat))
        traj.helicity.append(wn.inner(hat, _curl_hat(hat, wn)))
        traj.max_div.append(_div_max(hat, wn, n))
        if step in save_steps:
            traj.saved.append(GridField(_ifft(hat, n), alpha, kappa, t))
        if observer is not None:
            observer(t, SpectralState(hat, n, alpha))

    record(0, hat)
    for step in range(1, steps + 1):
        a = _nonlinear(hat, wn, n)
        b = _nonlinear(e_half * (hat + 0.5 * h * a), wn, n)
        c = _nonlinear(e_half * hat + 0.5 * h * b, wn, n)
        d = _nonlinear(e_full * hat + h * e_half * c, wn, n)
        hat = e_full * hat + (h / 6.0) * (e_full * a + 2.0 * e_half * (b + c) + d)
        record(step, hat)
        e_prev, e_now = traj.energy[-2], traj.energy[-1]
        if not np.isfinite(e_now) or e_now > e_prev * (1 + tol.energy_growth) + 1e-300:
            raise InstabilityError(
                f"energy grew from {e_prev:.6e} to {e_now:.6e} at t = {step * h:.6g}",
                {"step": step, "t": step * h, "energy": e_now, "previous_energy": e_prev,
                 "max_div": traj.max_div[-1], "dt": h})
    return traj


def relative_l2_error(num: GridField, exact: GridField) -> float:
    ref = exact.norm()
    diff = float(np.sqrt(np.mean(np.sum((num.data - exact.data) ** 2, axis=0))))
    return diff / ref if ref else diff


def evolve_flow(flow, n: int = 32, dt: float = 5e-3, T: float = 1.0, kappa: float = 0.05,
                alpha: Optional[float] = None, observer: Optional[Callable] = None,
                save_times: Sequence[float] = ()) -> dict:
    """Evolve the closed-form initial condition and compare with the closed form.

    ``errors`` holds the relative L2 error at every step, taken against the
    initial samples times the flow's scalar decay factor; ``l2_error`` at the
    final time is taken against fresh samples of the closed form.
    """
    alpha = flow.alpha_value() if alpha is None else alpha
    v0 = grid_sample(flow, n, 0.0, alpha, kappa)
    wn = wavenumbers(n, alpha)
    hat0 = _fft(v0.data)
    norm0 = math.sqrt(wn.inner(hat0, hat0))
    errors = []

    def track(t, state):
        decay = flow.velocity.factor(t, alpha, kappa)
        diff = state.hat - hat0 * decay
        ref_norm = norm0 * decay
        errors.append(math.sqrt(wn.inner(diff, diff)) / ref_norm if ref_norm else 0.0)
        if observer is not None:
            observer(t, state)

    traj = evolve(v0, dt, T, kappa, save_times=save_times, observer=track)
    final = traj.final()
    exact = grid_sample(flow, n, final.t, alpha, kappa)
    return {
        "trajectory": traj,
        "errors": errors,
        "l2_error": relative_l2_error(final, exact),
        "energy_ratio": traj.energy[-1] / traj.energy[0] if traj.energy[0] else float("nan"),
        "max_div": max(traj.max_div),
    }


# ---------------------------------------------------------------------------
# deviation from pure diffusion


@dataclass
class DeviationCurve:
    times: np.ndarray
    deviation: np.ndarray
    exact_initial_slope: float  # ||U(0)|| / ||V||, from exact polynomials

    def initial_slope(self) -> float:
        """Finite-difference slope between the first two recorded times."""
        return float((self.deviation[1] - self.deviation[0]) / (self.times[1] - self.times[0]))


def exact_rms(polys: Sequence[TrigPoly]) -> float:
    """Root-mean-square over the cell, computed from the exact constant mode."""
    modes = tp_constant_mode(dot(polys, polys))
    if set(modes) - {0, 2}:
        raise ValueError("unexpected alpha grading")
    return math.sqrt(sum(float(c) for c in modes.values()))


def deviation_probe(flow, dt: float, T: float, kappa: float = 0.05, n: int = 32,
                    alpha: float = 1.0, every: int = 1) -> DeviationCurve:
    """Relative distance between the evolved field and pure heat decay of ``V``.

    ``exact_initial_slope`` is ``||U(0)|| / ||V||`` with ``U`` the exact
    solenoidal part of the initial inertial term (alpha is taken as 1 in the
    exact norm, so pass ``alpha=1``).
    """
    from nsverify.analysis import compute_inertial, leray_remainder_exact

    if alpha != 1.0:
        raise ValueError("deviation_probe compares against exact norms at alpha = 1")
    u0 = leray_remainder_exact(compute_inertial(flow.profiles))
    slope = exact_rms(u0) / exact_rms(flow.profiles)
    v0 = grid_sample(flow, n, 0.0, alpha, kappa)
    wn = wavenumbers(n, alpha)
    hat0 = _fft(v0.data)
    ref_norm = math.sqrt(wn.inner(hat0, hat0))
    times, devs = [], []
    count = [0]

    def observe(t, state):
        if count[0] % every == 0:
            # pure diffusion of the initial field, mode by mode
            diff = state.hat - hat0 * np.exp(-kappa * wn.k2 * t)
            times.append(t)
            devs.append(math.sqrt(wn.inner(diff, diff)) / ref_norm)
        count[0] += 1

    evolve(v0, dt, T, kappa, observer=observe)
    return DeviationCurve(np.array(times), np.array(devs), slope)


# ---------------------------------------------------------------------------
# checkpoints

_MAGIC = b"NSVCKPT1"
_HEADER = struct.Struct("<q3d")


def save_checkpoint(path, f: GridField) -> None:
    """Header ``(n, alpha, kappa, t)`` then the ``(3, n, n, n)`` samples as little-endian doubles."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(_HEADER.pack(f.n, f.alpha, f.kappa, f.t))
        fh.write(np.ascontiguousarray(f.data, dtype="<f8").tobytes())


def load_checkpoint(path) -> GridField:
    raw = Path(path).read_bytes()
    if raw[:8] != _MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    n, alpha, kappa, t = _HEADER.unpack_from(raw, 8)
    body = raw[8 + _HEADER.size:]
    if len(body) != 3 * n ** 3 * 8:
        raise ValueError(f"{path}: truncated checkpoint")
    data = np.frombuffer(body, dtype="<f8").reshape(3, n, n, n).astype(float)
    return GridField(data, alpha, kappa, t)


def heat_solution_grid(polys: Sequence[TrigPoly], t: float, kappa: float, n: int,
                       alpha: float = 1.0) -> np.ndarray:
    """Sample the mode-wise heat propagation of ``polys`` (no decay-rate assumption)."""
    from nsverify.exactfield import heat_propagate

    x = grid_coords(n, alpha)
    out = []
    for p in polys:
        hp: RealTrigPoly = heat_propagate(p, t, kappa, alpha)
        out.append(np.broadcast_to(hp.eval(x, alpha), x[0].shape))
    return np.stack(out)
