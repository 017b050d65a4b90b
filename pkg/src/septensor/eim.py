"""Directional greedy empirical interpolation.

Running the greedy loop in direction ``X`` treats x as the space variable and
y as a parameter; direction ``Y`` swaps the two roles.  Every basis function
is stored as a combination of function slices,

    q_i(t) = sum_j C[i, j] * f(t, p_j)        (direction X)
    s_i(t) = sum_j C[i, j] * f(p_j, t)        (direction Y)

where ``p_j`` are the parameter pivots.  This lets the basis be evaluated
exactly at any point of the domain, not only on the selection grid.

Once the pivots decay, the coefficients grow like the inverse of the
smallest pivot, and each q_i(t) becomes a sum of large terms that nearly
cancel.  The coefficients are therefore held in double-double precision
(``coeffs + coeffs_lo``) and every basis evaluation accumulates in that
precision before rounding to float64.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from ._dd import DD, outer
from .errors import DomainError, InvalidRank, ZeroFunction
from .gridfn import FunctionSource, Grid, default_grids

logger = logging.getLogger(__name__)

ZERO_PIVOT = 1e-300
LAGRANGE_WARN = 1e-8
DEFAULT_SELECTION_POINTS = 401


class Direction(str, enum.Enum):
    X = "X"
    Y = "Y"


@dataclass(frozen=True)
class EimConfig:
    """Greedy loop settings.

    ``pivot_tol`` is relative to the first pivot magnitude; ``residual_tol``
    is an absolute sup-norm threshold over the selection grids.  Ties in
    every argmax go to the lowest grid index.
    """

    max_rank: int
    selection_grid_space: Grid
    selection_grid_param: Grid
    pivot_tol: float = 1e-12
    residual_tol: float | None = None
    tie_break: str = "lowest index"

    def __post_init__(self):
        if self.max_rank < 1:
            raise InvalidRank(f"max_rank must be >= 1, got {self.max_rank}")
        if not self.pivot_tol > 0:
            raise ValueError("pivot_tol must be positive")
        if self.tie_break != "lowest index":
            raise ValueError("only the 'lowest index' tie-break policy is supported")

    @classmethod
    def default(cls, f: FunctionSource, direction: Direction, max_rank: int,
                n_select: int = DEFAULT_SELECTION_POINTS, **kw) -> "EimConfig":
        gx, gy = default_grids(f, n_select)
        if Direction(direction) is Direction.X:
            return cls(max_rank, gx, gy, **kw)
        return cls(max_rank, gy, gx, **kw)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DirectionalBasis:
    """Magic points, parameter pivots and slice coefficients of one direction.

    ``coeffs + coeffs_lo`` is the coefficient matrix C in double-double form;
    ``coeff_history[k-1]`` holds the same pair after k iterations, so the
    basis of every intermediate rank stays available through :meth:`at_rank`.
    """

    direction: Direction
    points: np.ndarray
    pivots: np.ndarray
    coeffs: np.ndarray
    coeffs_lo: np.ndarray
    pivot_magnitudes: np.ndarray
    residual_sup: float = float("nan")
    coeff_history: tuple = ()

    def __post_init__(self):
        for name in ("points", "pivots", "coeffs", "coeffs_lo", "pivot_magnitudes"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, "direction", Direction(self.direction))
        object.__setattr__(self, "coeff_history",
                           tuple((_frozen(h), _frozen(l)) for h, l in self.coeff_history))

    @property
    def achieved_rank(self) -> int:
        return int(self.points.size)

    @property
    def coeffs_dd(self) -> DD:
        return DD(self.coeffs, self.coeffs_lo)

    def at_rank(self, k: int) -> "DirectionalBasis":
        """The basis the greedy loop held after ``k`` iterations."""
        if not 1 <= k <= self.achieved_rank:
            raise InvalidRank(f"rank {k} outside 1..{self.achieved_rank}")
        if k == self.achieved_rank:
            return self
        hi, lo = self.coeff_history[k - 1]
        return DirectionalBasis(
            self.direction,
            self.points[:k],
            self.pivots[:k],
            hi,
            lo,
            self.pivot_magnitudes[:k],
            float(self.pivot_magnitudes[k]),
            self.coeff_history[:k],
        )

    def same_as(self, other: "DirectionalBasis") -> bool:
        """Bit-level equality of every stored array."""
        names = ("points", "pivots", "coeffs", "coeffs_lo", "pivot_magnitudes")
        return (
            self.direction == other.direction
            and len(self.coeff_history) == len(other.coeff_history)
            and all(np.array_equal(getattr(self, n), getattr(other, n)) for n in names)
            and all(
                np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
                for a, b in zip(self.coeff_history, other.coeff_history)
            )
        )


def _slices(f: FunctionSource, direction: Direction, t, params) -> np.ndarray:
    """Matrix of f(t_a, p_b) (direction X) or f(p_b, t_a) (direction Y)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    params = np.asarray(params, dtype=float)
    if direction is Direction.X:
        return f.sample(t, params)
    return f.sample(params, t).T


def run_directional_eim(f: FunctionSource, direction: Direction, cfg: EimConfig) -> DirectionalBasis:
    """Greedy selection of magic points and a Lagrange basis along one direction.

    Parameters
    ----------
    f : FunctionSource
        Function to interpolate.
    direction : Direction
        ``X`` selects x-points with y as parameter; ``Y`` the reverse.
    cfg : EimConfig
        Grids and stopping rules.

    Returns
    -------
    DirectionalBasis
        With ``achieved_rank <= cfg.max_rank``; the loop stops early when the
        pivot drops below ``pivot_tol`` times the first one, or when the sup
        residual reaches ``residual_tol``.

    Raises
    ------
    ZeroFunction
        If f vanishes on the selection grids.
    DomainError
        If a sample is NaN or a grid leaves the domain.
    """
    direction = Direction(direction)
    space = cfg.selection_grid_space.points
    param = cfg.selection_grid_param.points
    # rows: space nodes, columns: parameter nodes
    A = _slices(f, direction, space, param)

    pt_idx: list[int] = []
    pv_idx: list[int] = []
    mags: list[float] = []
    C = DD(np.zeros((0, 0)))
    history = []
    # R = f - I^(k) f on the selection grids.  The Lagrange update gives
    # I^(k) f - I^(k-1) f = q_k(t) * R(x_k, p), hence the rank-one update below.
    R = DD(A)

    for k in range(cfg.max_rank):
        absR = np.abs(R.hi)
        b = int(np.argmax(absR.max(axis=0)))
        a = int(np.argmax(absR[:, b]))
        denom = R[a, b]
        mag = abs(float(denom.hi))

        if k == 0 and mag < ZERO_PIVOT:
            raise ZeroFunction("function vanishes on the selection grids; no first pivot")
        if cfg.residual_tol is not None and mag <= cfg.residual_tol:
            break
        if k > 0 and mag < cfg.pivot_tol * mags[0]:
            break

        # q_k = (f(., p_k) - sum_i f(x_i, p_k) q_i) / denom, as slice coefficients
        row = DD(np.zeros(k + 1))
        row.hi[k] = 1.0
        if k:
            row_prev = -(DD(A[pt_idx, b]) @ C)
            row.hi[:k], row.lo[:k] = row_prev.hi, row_prev.lo
        row = row / denom
        # Lagrange update: q_i <- q_i - q_i(x_k) q_k
        C_new = DD(np.zeros((k + 1, k + 1)))
        if k:
            q_at_new = C @ DD(A[a, pv_idx])
            upd = DD(np.pad(C.hi, ((0, 0), (0, 1))), np.pad(C.lo, ((0, 0), (0, 1)))) \
                - outer(q_at_new, row)
            C_new.hi[:k], C_new.lo[:k] = upd.hi, upd.lo
        C_new.hi[k], C_new.lo[k] = row.hi, row.lo
        C = C_new

        R = R - outer(R[:, b] / denom, R[a, :])

        pt_idx.append(a)
        pv_idx.append(b)
        mags.append(mag)
        history.append((C.hi.copy(), C.lo.copy()))

        logger.info("iter %d: pivot=%r point=%r param=%r",
                    k + 1, float(denom.hi), float(space[a]), float(param[b]))
        lagrange = (DD(A[np.ix_(pt_idx, pv_idx)]) @ C.T - np.eye(k + 1)).to_float()
        dev = float(np.max(np.abs(lagrange)))
        if dev > LAGRANGE_WARN:
            logger.warning("iter %d: Lagrange property off by %.3e; basis is ill-conditioned",
                           k + 1, dev)

    return DirectionalBasis(
        direction,
        space[pt_idx],
        param[pv_idx],
        C.hi,
        C.lo,
        mags,
        float(np.max(np.abs(R.hi))),
        tuple(history),
    )


def evaluate_basis(b: DirectionalBasis, f: FunctionSource, t) -> np.ndarray:
    """Basis values (q_1(t), ..., q_m(t)).

    Scalar ``t`` gives a length-m vector; an array of points gives a
    ``(len(t), m)`` matrix.
    """
    scalar = np.ndim(t) == 0
    vals = (DD(_slices(f, b.direction, t, b.pivots)) @ b.coeffs_dd.T).to_float()
    return vals[0] if scalar else vals


def directional_interpolate(b: DirectionalBasis, f: FunctionSource, t, param) -> float:
    """One-directional interpolant: sum_i f(t_i, param) q_i(t), roles swapped for Y."""
    if b.direction is Direction.X:
        at_points = f(b.points, param)
    else:
        at_points = f(param, b.points)
    return float(evaluate_basis(b, f, t) @ at_points)


def directional_residual_sup(b: DirectionalBasis, f: FunctionSource, space: Grid, param: Grid) -> float:
    """sup over space x param of |f - I f| for the one-directional interpolant."""
    A = _slices(f, b.direction, space.points, param.points)
    Q = evaluate_basis(b, f, space.points)
    at_points = _slices(f, b.direction, b.points, param.points)
    return float(np.max(np.abs(A - Q @ at_points)))


__all__ = [
    "Direction",
    "EimConfig",
    "DirectionalBasis",
    "run_directional_eim",
    "evaluate_basis",
    "directional_interpolate",
    "directional_residual_sup",
    "DomainError",
]
