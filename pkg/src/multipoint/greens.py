"""Outgoing free Green's function and the contact matrix of a configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .model import Configuration

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class Energy:
    """A non-negative energy on the physical branch, ``sqrt_value >= 0``."""

    value: float

    def __post_init__(self):
        value = float(self.value)
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"energy must be finite and >= 0 (negative energies are not supported), got {value!r}")
        object.__setattr__(self, "value", value)

    @property
    def sqrt_value(self) -> float:
        return math.sqrt(self.value)

    @property
    def is_zero(self) -> bool:
        return self.value == 0.0


def as_energy(E) -> Energy:
    return E if isinstance(E, Energy) else Energy(E)


def green_plus(r, E=0.0):
    """``G+(r, E) = -exp(i sqrt(E) r) / (4 pi r)`` for ``r > 0``.

    Returns a real value (or array) at ``E = 0`` and complex otherwise.
    """
    E = as_energy(E)
    r_arr = np.asarray(r, dtype=float)
    if np.any(~(r_arr > 0)):
        raise ValueError("green_plus needs r > 0; the point singularity is not evaluable")
    if E.is_zero:
        out = -1.0 / (FOUR_PI * r_arr)
    else:
        out = -np.exp(1j * E.sqrt_value * r_arr) / (FOUR_PI * r_arr)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class ContactMatrix:
    """Dense contact matrix ``A(E)``.

    ``entries`` is float64 at ``E = 0`` (so the zero-energy path is exactly
    real) and complex128 otherwise.
    """

    entries: np.ndarray
    energy: Energy

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.entries)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)


def assemble_contact_matrix(config: Configuration, E=0.0) -> ContactMatrix:
    """Assemble ``A(E)``.

    Diagonal ``alpha_j - i sqrt(E)/(4 pi)``, off-diagonal ``G+(|z_j - z_k|, E)``.
    Off-diagonal entries are computed once per pair, so the result is
    exactly symmetric.
    """
    E = as_energy(E)
    n = config.n
    alphas = config.alphas
    A = np.zeros((n, n), dtype=float if E.is_zero else complex)
    if n > 1:
        iu = np.triu_indices(n, 1)
        g = green_plus(pdist(config.positions), E)
        A[iu] = g
        A[iu[1], iu[0]] = g
    A[np.diag_indices(n)] = alphas if E.is_zero else alphas - 1j * E.sqrt_value / FOUR_PI
    return ContactMatrix(A, E)
