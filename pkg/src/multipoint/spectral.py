"""Zero-energy bound states.

A configuration has a zero-energy bound state exactly when some nonzero
charge vector ``q`` satisfies ``A(0) q = 0`` together with charge neutrality
``sum(q) = 0``. The neutrality condition removes the ``1/|x|`` tail, which is
what makes the state square integrable. The bound state itself is
``psi(x) = -(1/4pi) sum_j q_j / |x - z_j|``.

Both conditions are stacked into one ``(n+1) x n`` matrix and the
multiplicity is read off its singular values.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NotFoundError, SingularityError
from .greens import FOUR_PI, assemble_contact_matrix
from .model import Configuration, as_positions, make_polygon

DEFAULT_RTOL = 1e-8


@dataclass(frozen=True)
class BoundStateBasis:
    """Orthonormal charge vectors spanning the zero-energy bound states.

    Attributes
    ----------
    multiplicity : int
        Number of singular values at or below ``rank_tolerance``.
    basis : ndarray, shape (multiplicity, n)
        Unit vectors, first significant component positive.
    singular_values : ndarray
        All ``n`` singular values of the augmented matrix, descending.
    rank_tolerance : float
        Absolute threshold, ``rtol * singular_values[0]``.
    """

    multiplicity: int
    basis: np.ndarray
    singular_values: np.ndarray
    rank_tolerance: float
    rtol: float = DEFAULT_RTOL

    @property
    def sigma_min_retained(self) -> float:
        """Smallest singular value kept as nonzero (``nan`` if none)."""
        kept = self.singular_values[: len(self.singular_values) - self.multiplicity]
        return float(kept[-1]) if len(kept) else math.nan

    @property
    def sigma_max_discarded(self) -> float:
        """Largest singular value treated as zero (``nan`` if none)."""
        if self.multiplicity == 0:
            return math.nan
        return float(self.singular_values[len(self.singular_values) - self.multiplicity])

    @property
    def margin(self) -> float:
        """``sigma_min_retained / sigma_max_discarded``; ``inf`` when nothing is discarded or the discarded value is 0."""
        lo, hi = self.sigma_max_discarded, self.sigma_min_retained
        if math.isnan(hi):
            return math.nan
        if math.isnan(lo) or lo == 0.0:
            return math.inf
        return hi / lo


def augmented_matrix(config: Configuration) -> np.ndarray:
    """``A(0)`` with a row of ones appended."""
    A = assemble_contact_matrix(config, 0.0).entries
    return np.vstack([A, np.ones((1, config.n))])


def _fix_sign(v: np.ndarray) -> np.ndarray:
    # first component above noise level is made positive
    idx = np.flatnonzero(np.abs(v) > 1e-10 * np.abs(v).max())[0]
    return -v if v[idx] < 0 else v


def zero_energy_null_space(config: Configuration, rtol: float = DEFAULT_RTOL) -> BoundStateBasis:
    """Find all charge vectors of zero-energy bound states.

    Parameters
    ----------
    config : Configuration
    rtol : float
        Relative rank tolerance in (0, 1); singular values
        ``<= rtol * sigma_max`` count as zero.
    """
    if not 0 < rtol < 1:
        raise ValueError(f"rtol must lie in (0, 1), got {rtol!r}")
    M = augmented_matrix(config)
    _, s, vh = np.linalg.svd(M, full_matrices=False)
    tol = rtol * s[0]
    mult = int(np.count_nonzero(s <= tol))
    basis = np.array([_fix_sign(v) for v in vh[len(s) - mult:]]).reshape(mult, config.n)
    return BoundStateBasis(mult, basis, s, float(tol), rtol)


def bound_state_residual(config: Configuration, q) -> float:
    """Scale-free violation of ``A(0) q = 0`` and ``sum(q) = 0``.

    ``max(|A q|_inf / (|A|_inf |q|_inf), |sum q| / |q|_1)``.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (config.n,):
        raise ValueError(f"q must have length {config.n}")
    if not np.any(q):
        raise ValueError("q must be nonzero")
    A = assemble_contact_matrix(config, 0.0).entries
    norm_A = np.abs(A).sum(axis=1).max()
    r1 = np.abs(A @ q).max() / (norm_A * np.abs(q).max()) if norm_A > 0 else 0.0
    r2 = abs(math.fsum(q)) / np.abs(q).sum()
    return float(max(r1, r2))


def inverse_distance_sum(positions, q, points, min_separation=0.0) -> np.ndarray:
    """``sum_j q_j / |x - z_j|`` at each row of ``points``.

    Far from the cluster the terms are rewritten relative to the centroid
    ``c`` as ``1/|x-z| - 1/|x-c|``, computed without subtraction. For
    charge-neutral ``q`` the rounding error then scales like ``|z|/|x|^2``
    instead of ``1/|x|``.
    """
    z = np.asarray(positions, dtype=float).reshape(-1, 3)
    q = np.asarray(q)
    x = np.atleast_2d(np.asarray(points, dtype=float))
    c = z.mean(axis=0)
    w = z - c
    y = x - c
    diff = x[:, None, :] - z[None, :, :]
    d = np.sqrt(np.einsum("pjk,pjk->pj", diff, diff))
    if np.any(d <= min_separation):
        p, j = np.argwhere(d <= min_separation)[0]
        raise SingularityError(f"point {x[p].tolist()} coincides with scatterer {j}")
    rho = np.sqrt(np.einsum("pk,pk->p", y, y))
    far = rho > 2.0 * np.sqrt(np.einsum("jk,jk->j", w, w)).max(initial=0.0)
    out = (d[~far] ** -1) @ q if np.any(~far) else None
    result = np.empty(len(x), dtype=np.result_type(q, float))
    if out is not None:
        result[~far] = out
    if np.any(far):
        yf, df, rf = y[far], d[far], rho[far][:, None]
        num = 2.0 * yf @ w.T - np.einsum("jk,jk->j", w, w)[None, :]
        delta = num / (rf * df * (rf + df))
        result[far] = q.sum() / rf[:, 0] + delta @ q
    return result


def bound_state_eval(config: Configuration, q, x) -> float:
    """Evaluate ``psi(x) = -(1/4pi) sum_j q_j / |x - z_j|`` (unnormalized)."""
    pts = as_positions([x])
    return float(bound_state_field(config, q, pts)[0])


def bound_state_field(config: Configuration, q, points) -> np.ndarray:
    """Vectorized :func:`bound_state_eval` over an ``(p, 3)`` array."""
    q = np.asarray(q, dtype=float)
    if q.shape != (config.n,):
        raise ValueError(f"q must have length {config.n}")
    s = inverse_distance_sum(config.positions, q, as_positions(points), config.min_separation)
    return -s / FOUR_PI


@dataclass(frozen=True)
class ScanRow:
    m: int
    multiplicity: int
    sigma_min_retained: float
    sigma_max_discarded: float
    margin: float


def _scan_one(m, r0, rtol):
    b = zero_energy_null_space(make_polygon(m, r0), rtol)
    return ScanRow(m, b.multiplicity, b.sigma_min_retained, b.sigma_max_discarded, b.margin)


def conjecture_scan(m_max: int, r0: float = 1.0, rtol: float = DEFAULT_RTOL, workers: int | None = None) -> list[ScanRow]:
    """Bound-state multiplicity of the alternating ``2m``-gon for ``m = 1..m_max``.

    ``margin`` is the gap between the smallest singular value kept as nonzero
    and the largest one treated as zero; it shows how clear-cut each rank
    decision was. Values of ``m`` are independent and may run on ``workers``
    threads.
    """
    if isinstance(m_max, bool) or int(m_max) != m_max or m_max < 1:
        raise ValueError(f"m_max must be an integer >= 1, got {m_max!r}")
    ms = range(1, int(m_max) + 1)
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda m: _scan_one(m, r0, rtol), ms))
    return [_scan_one(m, r0, rtol) for m in ms]


def _sigma_min(positions, alpha, min_separation):
    config = Configuration.from_arrays(positions, alpha, min_separation)
    s = np.linalg.svd(augmented_matrix(config), compute_uv=False)
    return s[-1], s[0]


def _refine(f, grid, vals, k, tol):
    if 0 < k < len(grid) - 1:
        # golden section on a bracketing triple; absolute tolerance, unlike bounded Brent
        res = minimize_scalar(f, bracket=(grid[k - 1], grid[k], grid[k + 1]), method="golden",
                              options={"xtol": tol / max(abs(grid[k]), 1.0)})
    else:
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": tol})
    return (float(res.x), float(res.fun)) if res.fun <= vals[k] else (float(grid[k]), float(vals[k]))


def _alpha_scan(positions, alpha_lo, alpha_hi, min_separation, npts=401):
    if not alpha_lo < alpha_hi:
        raise ValueError("need alpha_lo < alpha_hi")
    pos = as_positions(positions)
    grid = np.linspace(alpha_lo, alpha_hi, npts)
    vals = np.array([_sigma_min(pos, a, min_separation)[0] for a in grid])

    def f(a):
        return _sigma_min(pos, a, min_separation)[0]

    return pos, grid, vals, f


def find_critical_alphas(positions, alpha_lo: float, alpha_hi: float, tol: float = 1e-13,
                         accept: float = 1e-8, min_separation: float = 1e-12) -> list[float]:
    """Every uniform ``alpha`` in the bracket that yields a zero-energy bound state.

    Each local minimum of the smallest augmented singular value on a
    401-point grid is refined; minima below ``accept * sigma_max`` are kept.
    """
    pos, grid, vals, f = _alpha_scan(positions, alpha_lo, alpha_hi, min_separation)
    found = []
    for k in range(len(grid)):
        left = vals[k - 1] if k > 0 else np.inf
        right = vals[k + 1] if k < len(grid) - 1 else np.inf
        if vals[k] <= left and vals[k] < right:
            alpha, _ = _refine(f, grid, vals, k, tol)
            smin, smax = _sigma_min(pos, alpha, min_separation)
            if smin <= accept * smax:
                found.append(alpha)
    return found


def find_critical_alpha(positions, alpha_lo: float, alpha_hi: float, tol: float = 1e-13,
                        accept: float = 1e-8, min_separation: float = 1e-12) -> float:
    """Uniform strength ``alpha`` at which ``positions`` carry a zero-energy bound state.

    Minimizes the smallest singular value of the augmented matrix over
    ``alpha`` in ``[alpha_lo, alpha_hi]``: a coarse grid picks the basin, a
    golden-section search refines it to ``tol``. If the bracket holds several
    critical values (the square, for one, has two), the global minimizer is
    returned; :func:`find_critical_alphas` lists them all.

    Raises
    ------
    NotFoundError
        If the minimum found exceeds ``accept * sigma_max``; ``achieved``
        holds that minimum.
    """
    pos, grid, vals, f = _alpha_scan(positions, alpha_lo, alpha_hi, min_separation)
    alpha, _ = _refine(f, grid, vals, int(np.argmin(vals)), tol)
    smin, smax = _sigma_min(pos, alpha, min_separation)
    if smin > accept * smax:
        raise NotFoundError(
            f"no zero-energy bound state for uniform alpha in [{alpha_lo}, {alpha_hi}]; "
            f"smallest singular value reached {smin:.3e} at alpha={alpha:.17g}",
            achieved=float(smin),
        )
    return alpha
