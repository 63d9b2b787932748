"""Multipole structure of the alternating bound state on the regular ``2m``-gon.

Far from the polygon each ``1/|x - z_j|`` is expanded in powers of
``t = 2 r0 R / (R^2 + r0^2)`` using the coefficients of ``(1 - t)^{-1/2}``.
The alternating signs cancel every angular factor

    ``C_l(theta, phi) = sum_j (-1)^j (nu . omega_j)^l``

with ``l < m``, so the bound state decays like ``R^{-(m+1)}``. This module
evaluates the ``C_l``, their half-step anti-symmetry in ``phi``, the
truncated series with a certified tail, and a least-squares fit of the decay
exponent from direct field evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .greens import FOUR_PI
from .model import Configuration, Point3, _check_polygon_args, make_polygon
from .spectral import bound_state_field


@dataclass(frozen=True)
class Direction:
    """Unit vector ``(sin t cos p, sin t sin p, cos t)`` given by polar ``theta`` and azimuth ``phi``."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @classmethod
    def from_vector(cls, v) -> "Direction":
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        return cls(float(np.arccos(np.clip(v[2], -1.0, 1.0))), float(np.arctan2(v[1], v[0])))


def fibonacci_directions(n: int = 64) -> list[Direction]:
    """Quasi-uniform directions on the Fibonacci spiral (no pole clustering)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    i = np.arange(n)
    cos_t = 1.0 - (2.0 * i + 1.0) / n
    phi = np.mod(i * math.pi * (3.0 - math.sqrt(5.0)), 2.0 * math.pi)
    return [Direction(float(t), float(p)) for t, p in zip(np.arccos(cos_t), phi)]


def random_directions(n: int, rng=None) -> list[Direction]:
    """Directions uniform on the sphere."""
    rng = np.random.default_rng(rng)
    v = rng.normal(size=(n, 3))
    return [Direction.from_vector(row) for row in v]


def _angles(dirs):
    if isinstance(dirs, Direction):
        return np.array([dirs.theta]), np.array([dirs.phi])
    if isinstance(dirs, np.ndarray):
        d = [Direction.from_vector(v) for v in dirs.reshape(-1, 3)]
    else:
        d = list(dirs)
    return np.array([x.theta for x in d]), np.array([x.phi for x in d])


def _vectors(dirs) -> np.ndarray:
    if isinstance(dirs, np.ndarray):
        v = dirs.reshape(-1, 3)
        return v / np.linalg.norm(v, axis=1, keepdims=True)
    if isinstance(dirs, Direction):
        dirs = [dirs]
    return np.array([d.vector for d in dirs])


def sqrt_series_coeffs(L: int) -> np.ndarray:
    """``b_0..b_L`` with ``(1 - t)^{-1/2} = sum_l b_l t^l``.

    ``b_0 = 1``, ``b_l = b_{l-1} (2l - 1) / (2l)``.
    """
    if L < 0:
        raise ValueError("L must be >= 0")
    b = np.empty(L + 1)
    b[0] = 1.0
    for l in range(1, L + 1):
        b[l] = b[l - 1] * (2 * l - 1) / (2 * l)
    return b


def _projections(m, theta, phi):
    # nu . omega_j = sin(theta) cos(phi - pi (j-1)/m), shape (..., 2m)
    shift = math.pi * np.arange(2 * m) / m
    return np.sin(theta)[..., None] * np.cos(phi[..., None] - shift)


def _signs(m):
    # (-1)^j for j = 1..2m
    return np.where(np.arange(1, 2 * m + 1) % 2 == 0, 1.0, -1.0)


def multipole_coefficients(m: int, l: int, theta, phi) -> np.ndarray:
    """Vectorized ``C_l`` over arrays of angles."""
    if m < 1 or l < 0:
        raise ValueError("need m >= 1 and l >= 0")
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    return (_projections(m, theta, phi) ** l) @ _signs(m)


def multipole_coefficient(m: int, l: int, direction: Direction) -> float:
    """``C_l = sum_{j=1}^{2m} (-1)^j (nu . omega_j)^l``; zero for every ``l < m``."""
    return float(multipole_coefficients(m, l, direction.theta, direction.phi))


def symmetry_defect(m: int, l: int, direction: Direction) -> float:
    """``|C_l(theta, phi + pi/m) + C_l(theta, phi)|``, which should vanish."""
    c0 = multipole_coefficients(m, l, direction.theta, direction.phi)
    c1 = multipole_coefficients(m, l, direction.theta, direction.phi + math.pi / m)
    return float(abs(c0 + c1))


def series_eval_bound_state(m: int, r0: float, x, L: int = 40) -> tuple[float, float]:
    """Alternating polygon bound state from the truncated multipole series.

    Evaluates ``psi(x) = (1/4pi) (R^2 + r0^2)^{-1/2} sum_{l<=L} b_l t^l C_l``
    (the same normalization as ``-(1/4pi) sum_j (-1)^{j+1}/|x - z_j|``).

    Returns
    -------
    value : float
    tail_bound : float
        Upper bound on the omitted terms: since ``|C_l| <= 2m`` and ``b_l``
        decreases, the tail is at most
        ``(1/4pi) (R^2 + r0^2)^{-1/2} 2m b_{L+1} t^{L+1} / (1 - t)``.
    """
    m, r0 = _check_polygon_args(m, r0)
    p = Point3.of(x).as_array()
    R = float(np.linalg.norm(p))
    if R < 2.0 * r0:
        raise ValueError(f"series evaluation needs |x| >= 2 r0 (|x| = {R!r}, r0 = {r0!r})")
    d = Direction.from_vector(p)
    t = 2.0 * r0 * R / (R * R + r0 * r0)
    pref = 1.0 / (FOUR_PI * math.sqrt(R * R + r0 * r0))
    b = sqrt_series_coeffs(L + 1)
    proj = _projections(m, np.array(d.theta), np.array(d.phi))
    C = (proj[None, :] ** np.arange(L + 1)[:, None]) @ _signs(m)
    terms = b[: L + 1] * t ** np.arange(L + 1) * C
    value = pref * math.fsum(terms)
    tail = pref * 2 * m * b[L + 1] * t ** (L + 1) / (1.0 - t)
    return value, tail


def decay_profile(config: Configuration, q, R_values, dirs) -> np.ndarray:
    """``F(R)``: root-mean-square of ``|psi(R nu)|`` over the directions."""
    nu = _vectors(dirs)
    R = np.asarray(R_values, dtype=float)
    pts = (R[:, None, None] * nu[None, :, :]).reshape(-1, 3)
    psi = bound_state_field(config, q, pts).reshape(len(R), len(nu))
    return np.sqrt(np.mean(psi * psi, axis=1))


def fit_decay_exponent(config: Configuration, q, R_values, dirs) -> float:
    """Exponent ``p`` in ``F(R) ~ R^{-p}`` from a log-log least-squares line.

    ``R_values`` must span at least two decades and ``dirs`` hold at least 20
    directions; RMS over directions avoids sitting on a nodal line of the
    leading multipole.
    """
    R = np.asarray(R_values, dtype=float)
    if len(R) < 2 or np.any(R <= 0):
        raise ValueError("need at least two positive radii")
    if R.max() / R.min() < 100.0 * (1 - 1e-12):
        raise ValueError("R_values must span at least two decades")
    nu = _vectors(dirs)
    if len(nu) < 20:
        raise ValueError("need at least 20 directions")
    F = decay_profile(config, q, R, nu)
    if np.any(F < 1e-300):
        raise ValueError("field underflows (F < 1e-300); reduce the R range")
    slope = np.polyfit(np.log(R), np.log(F), 1)[0]
    return float(-slope)


@dataclass(frozen=True)
class MultipoleReport:
    """Multipole data for the alternating ``2m``-gon bound state.

    ``C_values`` rows are ``(l, theta, phi, C_l)``; ``decay`` rows are
    ``(R, F_R, log_R, log_F)``.
    """

    m: int
    r0: float
    C_values: np.ndarray
    first_nonzero_order: int
    fitted_exponent: float
    fit_window: tuple[float, float]
    decay: np.ndarray


def alternating_charges(m: int) -> np.ndarray:
    """``q_j = (-1)^{j+1}`` for ``j = 1..2m``."""
    return -_signs(m)


def multipole_report(m: int, r0: float = 1.0, L: int | None = None, dirs=None, R_values=None,
                     threshold: float = 1e-10) -> MultipoleReport:
    """Tabulate ``C_l`` for ``l = 0..L`` and fit the decay of the alternating bound state.

    ``first_nonzero_order`` is the smallest ``l`` whose RMS over ``dirs``
    exceeds ``threshold * 2m``.
    """
    m, r0 = _check_polygon_args(m, r0)
    L = m + 2 if L is None else L
    dirs = fibonacci_directions(64) if dirs is None else list(dirs)
    R = np.geomspace(1e2 * r0, 1e4 * r0, 21) if R_values is None else np.asarray(R_values, float)
    theta, phi = _angles(dirs)
    rows, first = [], -1
    for l in range(L + 1):
        C = multipole_coefficients(m, l, theta, phi)
        rows.extend(zip([l] * len(C), theta, phi, C))
        if first < 0 and math.sqrt(np.mean(C * C)) > threshold * 2 * m:
            first = l
    config = make_polygon(m, r0)
    q = alternating_charges(m)
    exponent = fit_decay_exponent(config, q, R, dirs)
    F = decay_profile(config, q, R, dirs)
    decay = np.column_stack([R, F, np.log(R), np.log(F)])
    return MultipoleReport(m, r0, np.array(rows, dtype=float), first, exponent,
                           (float(R.min()), float(R.max())), decay)
