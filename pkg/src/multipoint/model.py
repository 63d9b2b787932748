"""Scatterer configurations and the two example families.

A configuration is an ordered list of point scatterers, each with a position
``z_j`` in R^3 and a real strength ``alpha_j``. Two generators build the
symmetric families with zero-energy bound states: four equal scatterers on a
regular tetrahedron, and ``2m`` equal scatterers on a regular planar polygon.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import CoincidentScatterersError, ConfigurationError

#: Default absolute minimum separation between two scatterers.
MIN_SEPARATION = 1e-12


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ConfigurationError(f"coordinate {name} is not finite: {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def of(cls, p) -> "Point3":
        """Coerce a ``Point3`` or any length-3 sequence."""
        if isinstance(p, Point3):
            return p
        x, y, z = (float(c) for c in p)
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class PointScatterer:
    position: Point3
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "position", Point3.of(self.position))
        alpha = float(self.alpha)
        if not math.isfinite(alpha):
            raise ConfigurationError(f"alpha is not finite: {alpha!r}")
        object.__setattr__(self, "alpha", alpha)


@dataclass(frozen=True)
class Configuration:
    """An immutable multipoint scatterer.

    Parameters
    ----------
    scatterers : sequence of PointScatterer
        At least one scatterer; positions must be pairwise distinct.
    min_separation : float
        Absolute distance below which two positions count as coincident.
    """

    scatterers: tuple[PointScatterer, ...]
    min_separation: float = MIN_SEPARATION

    def __post_init__(self):
        scatterers = tuple(self.scatterers)
        if len(scatterers) < 1:
            raise ConfigurationError("a configuration needs at least one scatterer", "scatterers")
        object.__setattr__(self, "scatterers", scatterers)
        if len(scatterers) > 1:
            d = pdist(self.positions)
            k = int(np.argmin(d))
            if d[k] <= self.min_separation:
                i, j = _condensed_to_pair(k, len(scatterers))
                raise CoincidentScatterersError(
                    f"coincident scatterers {i} and {j} (distance {d[k]:.3e})", "scatterers"
                )

    @classmethod
    def from_arrays(cls, positions, alphas, min_separation: float = MIN_SEPARATION) -> "Configuration":
        positions = np.asarray(positions, dtype=float).reshape(-1, 3)
        alphas = np.broadcast_to(np.asarray(alphas, dtype=float), (len(positions),))
        return cls(
            tuple(PointScatterer(Point3.of(p), a) for p, a in zip(positions, alphas)),
            min_separation,
        )

    def __len__(self) -> int:
        return len(self.scatterers)

    @property
    def n(self) -> int:
        return len(self.scatterers)

    @property
    def positions(self) -> np.ndarray:
        """``(n, 3)`` array of positions (a fresh copy)."""
        return np.array([[s.position.x, s.position.y, s.position.z] for s in self.scatterers])

    @property
    def alphas(self) -> np.ndarray:
        return np.array([s.alpha for s in self.scatterers])

    def with_alphas(self, alphas) -> "Configuration":
        return Configuration.from_arrays(self.positions, alphas, self.min_separation)

    def pairwise_distances(self) -> np.ndarray:
        if self.n == 1:
            return np.zeros((1, 1))
        return squareform(pdist(self.positions))

    def min_distance(self) -> float:
        return float(pdist(self.positions).min()) if self.n > 1 else math.inf


def _condensed_to_pair(k, n):
    i = 0
    while k >= n - 1 - i:
        k -= n - 1 - i
        i += 1
    return i, i + 1 + k


@dataclass(frozen=True)
class AlternatingDistanceTerms:
    """The positive terms ``u_2, ..., u_{m+1}`` of the folded polygon alpha sum.

    ``u[0]`` corresponds to ``k = 2``. The sequence must be strictly
    decreasing and positive, which is what forces ``alpha < 0``.
    """

    u: tuple[float, ...]

    def __post_init__(self):
        u = tuple(float(v) for v in self.u)
        object.__setattr__(self, "u", u)
        if not u:
            raise ValueError("need at least one term")
        if not u[-1] > 0:
            raise ValueError(f"last term is not positive: {u[-1]!r}")
        for a, b in zip(u, u[1:]):
            if not a > b:
                raise ValueError("terms are not strictly decreasing")

    @property
    def m(self) -> int:
        return len(self.u)


def _check_polygon_args(m, r0):
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise ValueError(f"m must be an integer >= 1, got {m!r}")
    if not (r0 > 0 and math.isfinite(r0)):
        raise ValueError(f"r0 must be positive and finite, got {r0!r}")
    return int(m), float(r0)


def polygon_chords(m: int, r0: float) -> np.ndarray:
    """Distances ``|z_k - z_1|`` for ``k = 2..2m`` on the regular ``2m``-gon."""
    m, r0 = _check_polygon_args(m, r0)
    k = np.arange(2, 2 * m + 1)
    return 2.0 * r0 * np.sin(np.pi * (k - 1) / (2 * m))


def polygon_alpha(m: int, r0: float) -> float:
    """Uniform strength giving the alternating bound state on the ``2m``-gon.

    ``alpha = -sum_{k=2}^{2m} (-1)^k / (4 pi |z_k - z_1|)``.
    """
    d = polygon_chords(m, r0)
    k = np.arange(2, 2 * m + 1)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    return -math.fsum(sign / (4.0 * np.pi * d))


def alpha_alternating(m: int, r0: float) -> tuple[float, AlternatingDistanceTerms]:
    """Polygon alpha from the folded sum over half the polygon.

    Vertices ``k`` and ``2m + 2 - k`` sit at the same distance from vertex 1
    with the same sign, so the ``2m - 1`` term sum folds into ``m`` terms
    ``u_k``; the antipodal vertex ``k = m + 1`` is unpaired.
    """
    d = polygon_chords(m, r0)[:m]
    u = 1.0 / (2.0 * np.pi * d)
    u[-1] = 1.0 / (4.0 * np.pi * d[-1])
    k = np.arange(2, m + 2)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    alpha = -math.fsum(sign * u)
    return alpha, AlternatingDistanceTerms(tuple(u))


def make_polygon(m: int, r0: float, min_separation: float = MIN_SEPARATION) -> Configuration:
    """``2m`` equal scatterers on a regular polygon of circumradius ``r0``.

    Vertices are ``r0 (cos(pi (j-1)/m), sin(pi (j-1)/m), 0)`` for
    ``j = 1..2m``, enumerated counterclockwise from the +x axis. ``m = 1`` is
    the segment of length ``2 r0``.
    """
    m, r0 = _check_polygon_args(m, r0)
    ang = np.pi * np.arange(2 * m) / m
    pos = r0 * np.column_stack([np.cos(ang), np.sin(ang), np.zeros_like(ang)])
    # cos(pi/2) etc. are not exactly zero; snap the exact axis points
    pos[np.abs(pos) < 1e-15 * r0] = 0.0
    return Configuration.from_arrays(pos, polygon_alpha(m, r0), min_separation)


_TETRA = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])


def make_tetrahedron(edge: float, min_separation: float = MIN_SEPARATION) -> Configuration:
    """Four scatterers on a regular tetrahedron with ``alpha = -1/(4 pi edge)``."""
    edge = float(edge)
    if not (edge > 0 and math.isfinite(edge)):
        raise ValueError(f"edge must be positive and finite, got {edge!r}")
    pos = _TETRA * (edge / (2.0 * math.sqrt(2.0)))
    return Configuration.from_arrays(pos, -1.0 / (4.0 * math.pi * edge), min_separation)


# --- JSON -----------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_configuration(config: Configuration) -> str:
    """Serialize to the ``{"scatterers": [...]}`` document, 17 significant digits."""
    rows = []
    for s in config.scatterers:
        p = s.position
        rows.append(
            f'    {{"position": [{_fmt(p.x)}, {_fmt(p.y)}, {_fmt(p.z)}], "alpha": {_fmt(s.alpha)}}}'
        )
    return '{\n  "scatterers": [\n' + ",\n".join(rows) + "\n  ]\n}\n"


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"expected a number, got {type(value).__name__}", path)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigurationError("number is not finite", path)
    return value


def configuration_from_dict(doc, min_separation: float = MIN_SEPARATION) -> Configuration:
    if not isinstance(doc, dict):
        raise ConfigurationError("top level must be an object", "$")
    if "scatterers" not in doc:
        raise ConfigurationError("missing field", "scatterers")
    items = doc["scatterers"]
    if not isinstance(items, list):
        raise ConfigurationError("expected a list", "scatterers")
    scatterers = []
    for i, item in enumerate(items):
        path = f"scatterers[{i}]"
        if not isinstance(item, dict):
            raise ConfigurationError("expected an object", path)
        for key in ("position", "alpha"):
            if key not in item:
                raise ConfigurationError("missing field", f"{path}.{key}")
        pos = item["position"]
        if not isinstance(pos, list) or len(pos) != 3:
            raise ConfigurationError("expected a list of 3 numbers", f"{path}.position")
        xyz = [_number(v, f"{path}.position[{c}]") for c, v in enumerate(pos)]
        alpha = _number(item["alpha"], f"{path}.alpha")
        scatterers.append(PointScatterer(Point3(*xyz), alpha))
    return Configuration(tuple(scatterers), min_separation)


def load_configuration(text: str, min_separation: float = MIN_SEPARATION) -> Configuration:
    """Parse a configuration JSON document.

    Raises
    ------
    ConfigurationError
        On malformed JSON, missing or mistyped fields (message carries the
        field path) or coincident scatterers.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"malformed JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})", "$") from exc
    return configuration_from_dict(doc, min_separation)


def configuration_to_dict(config: Configuration) -> dict:
    return {
        "scatterers": [
            {"position": [s.position.x, s.position.y, s.position.z], "alpha": s.alpha}
            for s in config.scatterers
        ]
    }


def as_positions(points: Iterable | Sequence) -> np.ndarray:
    """Coerce a list of ``Point3`` / triples / an array to an ``(n, 3)`` array."""
    if isinstance(points, np.ndarray):
        return np.asarray(points, dtype=float).reshape(-1, 3)
    return np.array([Point3.of(p).as_array() for p in points]).reshape(-1, 3)
