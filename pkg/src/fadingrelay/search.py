"""Deterministic nested-grid search over small boxes.

Every pass evaluates a full tensor grid, then recenters a shrunken box on
the best point found so far.  No randomness is involved, so identical
inputs give bit-identical results.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError, DomainError, SearchError


class Scale(enum.Enum):
    LINEAR = "linear"
    LOG = "log"


class Direction(enum.Enum):
    MAX = "max"
    MIN = "min"


@dataclass(frozen=True)
class SearchConfig:
    """Grid-refinement settings.

    ``refinement_rounds`` counts the passes after the coarse grid, so a
    search makes ``coarse_points_per_dim**d * (refinement_rounds + 1)``
    objective evaluations.
    """

    coarse_points_per_dim: int = 24
    refinement_rounds: int = 4
    shrink_factor: float = 0.25
    scale: tuple = ()
    abs_tol: float = 1e-6
    budget: int = 10**6

    def __post_init__(self):
        if self.coarse_points_per_dim < 8:
            raise DomainError("coarse_points_per_dim must be at least 8")
        if self.refinement_rounds < 1:
            raise DomainError("refinement_rounds must be at least 1")
        if not 0.0 < self.shrink_factor < 1.0:
            raise DomainError("shrink_factor must lie in (0, 1)")
        if not self.abs_tol > 0.0:
            raise DomainError("abs_tol must be positive")

    def evaluations(self, dim):
        return self.coarse_points_per_dim**dim * (self.refinement_rounds + 1)


@dataclass(frozen=True)
class SearchResult:
    arg: tuple
    value: float
    evals: int
    history: tuple = field(default=(), repr=False)


def _to_unit(x, scale):
    if scale is Scale.LOG:
        return math.log(x)
    return x


def _from_unit(u, scale):
    return np.exp(u) if scale is Scale.LOG else u


def optimize_box(objective, box, direction=Direction.MAX, cfg=None, scales=None, vectorized=False):
    """Optimize ``objective`` over a box of at most three dimensions.

    Parameters
    ----------
    objective : callable
        ``objective(x0, x1, ...)``.  With ``vectorized=True`` it receives
        equally shaped arrays and must return an array of the same shape.
        Non-finite values, and scalar evaluations raising ValueError,
        ZeroDivisionError or OverflowError, count as the worst possible value.
    box : sequence of (low, high)
    direction : Direction
    cfg : SearchConfig
    scales : sequence of Scale, optional
        Per-dimension grid spacing; overrides ``cfg.scale``.  Log spacing
        needs a strictly positive lower edge.

    Returns
    -------
    SearchResult
        Best point, its value, the evaluation count and the best value after
        each pass.  Ties go to the lowest grid multi-index.
    """
    cfg = cfg or SearchConfig()
    box = [(float(lo), float(hi)) for lo, hi in box]
    dim = len(box)
    if not 1 <= dim <= 3:
        raise DomainError(f"box must have 1 to 3 dimensions, got {dim}")
    for lo, hi in box:
        if not lo <= hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
    scales = tuple(scales) if scales is not None else tuple(cfg.scale) or (Scale.LINEAR,) * dim
    if len(scales) != dim:
        raise DomainError("one scale per dimension is required")
    for (lo, _), sc in zip(box, scales):
        if sc is Scale.LOG and not lo > 0.0:
            raise DomainError("log-scaled dimensions need a positive lower edge")
    total = cfg.evaluations(dim)
    if total > cfg.budget:
        raise BudgetExceededError(f"search needs {total} evaluations, budget is {cfg.budget}")

    sign = 1.0 if direction is Direction.MAX else -1.0
    outer = [(_to_unit(lo, sc), _to_unit(hi, sc)) for (lo, hi), sc in zip(box, scales)]
    current = list(outer)
    n = cfg.coarse_points_per_dim

    best_u = None
    best_score = -math.inf
    evals = 0
    history = []
    for _ in range(cfg.refinement_rounds + 1):
        axes_u = [np.linspace(lo, hi, n) for lo, hi in current]
        axes_x = [_from_unit(ax, sc) for ax, sc in zip(axes_u, scales)]
        # keep the exact user edges despite exp(log(.)) round-off
        for ax, (lo, hi), (ulo, uhi), (olo, ohi) in zip(axes_x, box, current, outer):
            if ulo == olo:
                ax[0] = lo
            if uhi == ohi:
                ax[-1] = hi
        grids = np.meshgrid(*axes_x, indexing="ij")
        if vectorized:
            with np.errstate(all="ignore"):
                values = np.asarray(objective(*grids), dtype=float)
        else:
            values = np.empty(grids[0].shape)
            for idx in np.ndindex(values.shape):
                try:
                    values[idx] = objective(*(float(g[idx]) for g in grids))
                except (ValueError, ZeroDivisionError, OverflowError):
                    # e.g. log(0) on an open-interval edge
                    values[idx] = math.nan
        evals += values.size
        scores = np.where(np.isfinite(values), sign * values, -np.inf)
        flat = int(np.argmax(scores))
        if scores.flat[flat] > best_score:
            idx = np.unravel_index(flat, scores.shape)
            best_score = float(scores.flat[flat])
            best_u = [axes_u[k][idx[k]] for k in range(dim)]
            best_x = tuple(float(axes_x[k][idx[k]]) for k in range(dim))
        if best_u is not None:
            history.append(sign * best_score)
        if best_u is None:
            continue
        new = []
        for (lo, hi), (olo, ohi), c in zip(current, outer, best_u):
            half = 0.5 * cfg.shrink_factor * (hi - lo)
            # the shrunken box must still reach the neighbouring grid points
            half = max(half, (hi - lo) / (n - 1))
            new.append((max(olo, c - half), min(ohi, c + half)))
        current = new

    if best_u is None:
        raise SearchError("objective is non-finite at every grid point")
    return SearchResult(best_x, sign * best_score, evals, tuple(history))
