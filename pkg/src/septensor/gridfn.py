"""Domains, sampling grids and the function sources every other module evaluates.

A :class:`FunctionSource` is one of three kinds:

* ``builtin``: a named numpy function from :data:`BUILTINS`;
* ``expression``: a parsed :mod:`septensor.expr` tree;
* ``tabulated``: a matrix of samples on two node grids.  Tabulated sources
  can only be queried at their nodes (within 1e-14); anything else raises
  :class:`UnsupportedOffGrid` rather than interpolating silently.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import expr as _expr
from .errors import ConfigError, DomainError, InvalidGrid, UnsupportedOffGrid

NODE_TOL = 1e-14


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise InvalidGrid(f"interval bounds must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise InvalidGrid(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    def contains(self, t) -> bool:
        t = np.asarray(t)
        return bool(np.all((t >= self.lo) & (t <= self.hi)))


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Strictly increasing nodes covering an interval, endpoints included."""

    interval: Interval
    points: np.ndarray

    def __post_init__(self):
        pts = _frozen(self.points)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise InvalidGrid("a grid needs at least 2 points")
        if np.any(np.diff(pts) <= 0):
            raise InvalidGrid("grid points must be strictly increasing")
        if pts[0] != self.interval.lo or pts[-1] != self.interval.hi:
            raise InvalidGrid("grid must include both interval endpoints")

    def __len__(self):
        return self.points.size

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and self.interval == other.interval
            and np.array_equal(self.points, other.points)
        )

    __hash__ = None


def make_uniform_grid(interval: Interval, n: int) -> Grid:
    """``n`` equispaced points on ``interval``, both endpoints included."""
    if n < 2:
        raise InvalidGrid(f"a uniform grid needs n >= 2, got {n}")
    pts = np.linspace(interval.lo, interval.hi, n)
    return Grid(interval, pts)


# --- builtins ---------------------------------------------------------------

PAPER_F_TEXT = "x+y+x*y+exp(-(x^2+y^2))+sin(3*pi*y)-sin(pi*x*y^2+pi*x*exp(-y))"


def _paper_f(x, y):
    # operation order mirrors PAPER_F_TEXT so both routes round identically
    return (
        x + y + x * y
        + np.exp(-(x ** 2 + y ** 2))
        + np.sin(3 * np.pi * y)
        - np.sin(np.pi * x * y ** 2 + np.pi * x * np.exp(-y))
    )


def _rank1_sep(x, y):
    return (1 + x) * np.exp(y)


def _zero(x, y):
    return np.zeros(np.broadcast(x, y).shape)


BUILTINS: dict[str, Callable] = {
    "paper-f": _paper_f,
    "rank1-sep": _rank1_sep,
    "zero": _zero,
}


def builtin_registry() -> list[str]:
    return sorted(BUILTINS)


# --- sources ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Tabulated:
    x_grid: Grid
    y_grid: Grid
    values: np.ndarray


@dataclass(frozen=True)
class FunctionSource:
    """An evaluable f(x, y) on ``domain = (I, J)``.

    Use the constructors :meth:`builtin`, :meth:`from_expression` and
    :meth:`tabulated` rather than building one by hand.
    """

    kind: str
    domain: tuple[Interval, Interval]
    payload: Any
    label: str = field(default="", compare=False)

    @classmethod
    def builtin(cls, name: str, domain: tuple[Interval, Interval] | None = None):
        if name not in BUILTINS:
            raise ConfigError(f"unknown builtin {name!r}; choose from {builtin_registry()}")
        if domain is None:
            domain = (Interval(0.0, 1.0), Interval(0.0, 1.0))
        return cls("builtin", domain, name, label=name)

    @classmethod
    def from_expression(cls, text: str, domain: tuple[Interval, Interval] | None = None):
        if domain is None:
            domain = (Interval(0.0, 1.0), Interval(0.0, 1.0))
        return cls("expression", domain, _expr.parse(text), label=text)

    @classmethod
    def tabulated(cls, x_nodes, y_nodes, values):
        x_nodes = np.asarray(x_nodes, dtype=float)
        y_nodes = np.asarray(y_nodes, dtype=float)
        values = _frozen(values)
        if values.shape != (x_nodes.size, y_nodes.size):
            raise ConfigError(
                f"sample matrix has shape {values.shape}, grids give "
                f"({x_nodes.size}, {y_nodes.size})"
            )
        try:
            gx = Grid(Interval(float(x_nodes[0]), float(x_nodes[-1])), x_nodes)
            gy = Grid(Interval(float(y_nodes[0]), float(y_nodes[-1])), y_nodes)
        except (InvalidGrid, IndexError) as exc:
            raise ConfigError(f"bad tabulated grid: {exc}") from exc
        return cls("tabulated", (gx.interval, gy.interval), Tabulated(gx, gy, values),
                   label="tabulated")

    @property
    def is_tabulated(self) -> bool:
        return self.kind == "tabulated"

    def node_grids(self) -> tuple[Grid, Grid]:
        """The tabulated source's own nodes; searches are restricted to these."""
        if not self.is_tabulated:
            raise TypeError("only tabulated sources carry node grids")
        return self.payload.x_grid, self.payload.y_grid

    def _raw(self, x, y):
        if self.kind == "builtin":
            with np.errstate(all="ignore"):
                return BUILTINS[self.payload](x, y)
        if self.kind == "expression":
            return _expr.eval_expr(self.payload, x, y)
        tab = self.payload
        ix = _node_index(tab.x_grid.points, x)
        iy = _node_index(tab.y_grid.points, y)
        return tab.values[ix, iy]

    def __call__(self, x, y):
        """Evaluate with broadcasting; raises on out-of-domain points or NaN."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        I, J = self.domain
        if not (I.contains(x) and J.contains(y)):
            raise DomainError(f"point outside domain [{I.lo}, {I.hi}] x [{J.lo}, {J.hi}]")
        out = np.asarray(self._raw(x, y), dtype=float)
        out = np.broadcast_to(out, np.broadcast(x, y).shape)
        if np.isnan(out).any():
            raise DomainError("function evaluated to NaN")
        return out

    def sample(self, xs, ys) -> np.ndarray:
        """Matrix ``A[a, b] = f(xs[a], ys[b])``."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        return np.array(self(xs[:, None], ys[None, :]))

    on_grid = sample


def _node_index(nodes: np.ndarray, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    idx = np.clip(np.searchsorted(nodes, t), 1, nodes.size - 1)
    left = nodes[idx - 1]
    idx = np.where(np.abs(t - left) <= np.abs(nodes[idx] - t), idx - 1, idx)
    if np.any(np.abs(nodes[idx] - t) > NODE_TOL):
        raise UnsupportedOffGrid("tabulated source queried off its grid nodes")
    return idx


def eval_source(f: FunctionSource, x: float, y: float) -> float:
    """Scalar evaluation of ``f`` at ``(x, y)``."""
    return float(f(x, y))


def default_grids(f: FunctionSource, n: int) -> tuple[Grid, Grid]:
    """Uniform ``n``-point grids on f's domain, or f's own nodes if tabulated."""
    if f.is_tabulated:
        return f.node_grids()
    I, J = f.domain
    return make_uniform_grid(I, n), make_uniform_grid(J, n)


# --- CSV I/O ----------------------------------------------------------------


def read_tabulated_csv(path) -> FunctionSource:
    """Load a tabulated source.

    The header row is ``x\\y, y1, y2, ...``; every following row is an
    x node followed by the f values along the y nodes.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if len(rows) < 3:
        raise ConfigError(f"{path}: need a header and at least 2 data rows")
    header = rows[0]
    width = len(header)
    if width < 3:
        raise ConfigError(f"{path}: header needs at least 2 y nodes")
    try:
        ys = [float(c) for c in header[1:]]
    except ValueError as exc:
        raise ConfigError(f"{path}, line 1: {exc}") from exc
    xs, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise ConfigError(
                f"{path}, line {lineno}: expected {width} fields, found {len(row)}"
            )
        try:
            nums = [float(c) for c in row]
        except ValueError as exc:
            raise ConfigError(f"{path}, line {lineno}: {exc}") from exc
        xs.append(nums[0])
        values.append(nums[1:])
    return FunctionSource.tabulated(xs, ys, values)


def write_tabulated_csv(path, f: FunctionSource) -> None:
    tab = f.payload
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x\\y"] + [repr(float(v)) for v in tab.y_grid.points])
        for xv, row in zip(tab.x_grid.points, tab.values):
            w.writerow([repr(float(xv))] + [repr(float(v)) for v in row])
