"""Scattering states of a multipoint scatterer at energy ``E >= 0``.

The total field is ``psi = psi0 + sum_j q_j G+(|x - z_j|, E)``, where the
incident wave ``psi0`` solves the free equation everywhere and the charges
solve ``A(E) q = phi`` with ``phi_j = -psi0(z_j)``. Near each scatterer the
field behaves like ``a_j/|x - z_j| + b_j + O(|x - z_j|)`` with the contact
condition ``b_j = 4 pi alpha_j a_j``; :func:`extract_contact_expansion` checks
that condition numerically from field samples alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ResonanceError, SingularityError
from .greens import FOUR_PI, Energy, as_energy, assemble_contact_matrix
from .model import Configuration, as_positions
from .spectral import inverse_distance_sum

MAX_CONDITION = 1e12

# Icosahedron vertices: a spherical 5-design, so averaging over them removes
# every non-isotropic harmonic of degree <= 5 from the local expansion.
_PHI = (1.0 + math.sqrt(5.0)) / 2.0
ICOSAHEDRON = np.array(
    [[0, s1, s2 * _PHI] for s1 in (1, -1) for s2 in (1, -1)]
    + [[s1, s2 * _PHI, 0] for s1 in (1, -1) for s2 in (1, -1)]
    + [[s2 * _PHI, 0, s1] for s1 in (1, -1) for s2 in (1, -1)],
    dtype=float,
)
ICOSAHEDRON /= np.linalg.norm(ICOSAHEDRON, axis=1, keepdims=True)


@dataclass(frozen=True)
class IncidentWave:
    """Free solution ``psi0``: a unit plane wave ``exp(i sqrt(E) d.x)`` or, at ``E = 0``, a constant."""

    kind: str
    energy: Energy
    direction: tuple[float, float, float] | None = None
    amplitude: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "energy", as_energy(self.energy))
        if self.kind == "plane_wave":
            d = np.asarray(self.direction, dtype=float).reshape(3)
            if abs(np.linalg.norm(d) - 1.0) > 1e-14:
                raise ValueError(f"plane-wave direction must be a unit vector, |d| = {np.linalg.norm(d)!r}")
            object.__setattr__(self, "direction", tuple(float(c) for c in d))
        elif self.kind == "constant":
            if not self.energy.is_zero:
                raise ValueError("a constant incident field only solves the free equation at E = 0")
            object.__setattr__(self, "direction", None)
        else:
            raise ValueError(f"unknown incident kind {self.kind!r}")

    @classmethod
    def plane_wave(cls, direction, energy, normalize: bool = False) -> "IncidentWave":
        d = np.asarray(direction, dtype=float)
        if normalize:
            norm = np.linalg.norm(d)
            if norm == 0:
                raise ValueError("direction must be nonzero")
            d = d / norm
        return cls("plane_wave", as_energy(energy), tuple(d))

    @classmethod
    def constant(cls, value: complex = 1.0) -> "IncidentWave":
        return cls("constant", Energy(0.0), None, value)

    def __call__(self, points) -> np.ndarray:
        x = as_positions(points)
        if self.kind == "constant":
            return np.full(len(x), complex(self.amplitude))
        k = self.energy.sqrt_value
        return self.amplitude * np.exp(1j * k * (x @ np.asarray(self.direction)))


@dataclass(frozen=True)
class ScatteringSolution:
    config: Configuration
    incident: IncidentWave
    q: np.ndarray
    source: np.ndarray
    residual: float = field(default=0.0)

    @property
    def energy(self) -> Energy:
        return self.incident.energy


def solve_scattering(config: Configuration, incident: IncidentWave,
                     max_condition: float = MAX_CONDITION) -> ScatteringSolution:
    """Solve ``A(E) q = phi`` for the scattered charges.

    Raises
    ------
    ResonanceError
        When the condition number of ``A(E)`` exceeds ``max_condition``.
    """
    A = assemble_contact_matrix(config, incident.energy).entries
    s = np.linalg.svd(A, compute_uv=False)
    cond = s[0] / s[-1] if s[-1] > 0 else math.inf
    if cond > max_condition:
        raise ResonanceError(float(s[-1]), float(cond))
    phi = -incident(config.positions)
    q = np.linalg.solve(A, phi)
    scale = np.abs(phi).max()
    res = float(np.abs(A @ q - phi).max() / scale) if scale > 0 else float(np.abs(A @ q).max())
    return ScatteringSolution(config, incident, q, phi, res)


def bound_state_solution(config: Configuration, q) -> ScatteringSolution:
    """Wrap a zero-energy bound-state charge vector as a solution with no incident field."""
    q = np.asarray(q, dtype=complex).reshape(config.n)
    A = assemble_contact_matrix(config, 0.0).entries
    res = float(np.abs(A @ q).max())
    return ScatteringSolution(config, IncidentWave.constant(0.0), q, np.zeros(config.n, dtype=complex), res)


def total_field_on(solution: ScatteringSolution, points) -> np.ndarray:
    """Total field ``psi0 + sum_j q_j G+(|x - z_j|, E)`` at each row of ``points``."""
    x = as_positions(points)
    config = solution.config
    E = solution.energy
    if E.is_zero:
        scat = -inverse_distance_sum(config.positions, solution.q, x, config.min_separation) / FOUR_PI
    else:
        diff = x[:, None, :] - config.positions[None, :, :]
        d = np.sqrt(np.einsum("pjk,pjk->pj", diff, diff))
        if np.any(d <= config.min_separation):
            p, j = np.argwhere(d <= config.min_separation)[0]
            raise SingularityError(f"point {x[p].tolist()} coincides with scatterer {j}")
        scat = (-np.exp(1j * E.sqrt_value * d) / (FOUR_PI * d)) @ solution.q
    return solution.incident(x) + scat


def total_field(solution: ScatteringSolution, x) -> complex:
    return complex(total_field_on(solution, [x])[0])


def far_field_amplitude(solution: ScatteringSolution, nu) -> complex:
    """Coefficient of ``exp(i sqrt(E) R) / R`` in ``psi - psi0`` along direction ``nu``.

    ``-(1/4pi) sum_j q_j exp(-i sqrt(E) nu.z_j)``; at ``E = 0`` this is the
    monopole ``-sum(q)/(4pi)``.
    """
    nu = np.asarray(nu, dtype=float).reshape(3)
    if abs(np.linalg.norm(nu) - 1.0) > 1e-12:
        raise ValueError("nu must be a unit vector")
    phase = np.exp(-1j * solution.energy.sqrt_value * (solution.config.positions @ nu))
    return complex(-(phase @ solution.q) / FOUR_PI)


@dataclass(frozen=True)
class ContactExpansion:
    """Fitted local behaviour ``pole_coeff/r + const_coeff`` at one scatterer."""

    pole_coeff: complex
    const_coeff: complex
    residual: float


def default_contact_radii(solution: ScatteringSolution, count: int = 6) -> np.ndarray:
    """Geometric radii ``h, h/2, h/4, ...`` with ``h`` well inside the local scale.

    The local scale is the smaller of the minimum scatterer separation and
    the wavelength scale ``1/sqrt(E)``.
    """
    scales = [solution.config.min_distance()]
    k = solution.energy.sqrt_value
    if k > 0:
        scales.append(1.0 / k)
    scale = min(scales)
    if not math.isfinite(scale):
        scale = 1.0
    return 0.03 * scale * 0.5 ** np.arange(count)


def extract_contact_expansion(solution: ScatteringSolution, j: int, radii=None,
                              directions=ICOSAHEDRON, max_terms: int = 5) -> ContactExpansion:
    """Recover the pole and constant coefficients of the field at scatterer ``j``.

    The field is averaged over a symmetric direction set on spheres of the
    given radii around ``z_j``, and ``a/r + b + c_1 r + c_2 r^2 + ...`` is
    fitted by linear least squares, using ``min(max_terms, len(radii))``
    terms. The averaging kills the anisotropic part of the remainder, but
    isotropic powers of ``r`` survive (the outgoing self field
    ``exp(i k r)/r`` contributes one at every order), hence the extra terms.
    The residual is

        ``|b - 4 pi alpha_j a| / (|b| + |4 pi alpha_j a| + eps)``

    with ``eps`` a ``1e-8`` fraction of the typical regular-part magnitude at
    ``z_j``, which keeps the ratio meaningful when ``q_j`` vanishes.
    """
    config = solution.config
    if not 0 <= j < config.n:
        raise IndexError(f"scatterer index {j} out of range")
    radii = default_contact_radii(solution) if radii is None else np.asarray(radii, dtype=float)
    if radii.ndim != 1 or len(radii) < 3:
        raise ValueError("need at least 3 radii")
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    if np.any(radii >= 0.5 * config.min_distance()):
        raise ValueError("radii must be smaller than half the minimum scatterer separation")
    dirs = np.asarray(directions, dtype=float)
    z = config.positions[j]
    pts = z[None, None, :] + radii[:, None, None] * dirs[None, :, :]
    vals = total_field_on(solution, pts.reshape(-1, 3)).reshape(len(radii), len(dirs)).mean(axis=1)
    nterms = min(max_terms, len(radii))
    design = np.column_stack([radii ** (p - 1) for p in range(nterms)])
    # column scaling keeps the least-squares problem well conditioned
    colscale = np.abs(design).max(axis=0)
    coef, *_ = np.linalg.lstsq(design / colscale, vals, rcond=None)
    a, b = coef[0] / colscale[0], coef[1] / colscale[1]

    alpha = config.alphas[j]
    target = FOUR_PI * alpha * a
    k = solution.energy.sqrt_value
    others = np.delete(np.arange(config.n), j)
    dist = np.linalg.norm(config.positions[others] - z, axis=1)
    scale = (abs(solution.incident([z])[0])
             + np.sum(np.abs(solution.q[others]) / (FOUR_PI * dist))
             + abs(solution.q[j]) * (abs(alpha) + k / FOUR_PI))
    eps = 1e-8 * scale + np.finfo(float).tiny
    residual = abs(b - target) / (abs(b) + abs(target) + eps)
    return ContactExpansion(complex(a), complex(b), float(residual))


def field_table(solution: ScatteringSolution, points) -> np.ndarray:
    """Rows ``x, y, z, re_psi, im_psi, abs_psi``; points on a scatterer get ``nan``."""
    x = as_positions(points)
    config = solution.config
    diff = x[:, None, :] - config.positions[None, :, :]
    bad = np.any(np.sqrt(np.einsum("pjk,pjk->pj", diff, diff)) <= config.min_separation, axis=1)
    psi = np.full(len(x), np.nan + 1j * np.nan)
    if np.any(~bad):
        psi[~bad] = total_field_on(solution, x[~bad])
    return np.column_stack([x, psi.real, psi.imag, np.abs(psi)])
