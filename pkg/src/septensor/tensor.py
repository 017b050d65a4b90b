"""Tensor-product interpolant built from an X basis and a Y basis.

    I f(x, y) = sum_i sum_j F[i, j] q_i(x) s_j(y) = q(x)^T F s(y)

with ``F[i, j] = f(x_i, y_j)`` on the tensor grid of magic points.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .eim import DirectionalBasis, Direction, evaluate_basis
from .gridfn import FunctionSource


@dataclass(frozen=True, eq=False)
class TensorInterpolant:
    basis_x: DirectionalBasis
    basis_y: DirectionalBasis
    F: np.ndarray
    source: FunctionSource

    def __post_init__(self):
        if self.basis_x.direction is not Direction.X or self.basis_y.direction is not Direction.Y:
            raise ValueError("basis_x must have direction X and basis_y direction Y")
        F = np.array(self.F, dtype=float)
        if F.shape != (self.basis_x.achieved_rank, self.basis_y.achieved_rank):
            raise ValueError(f"F has shape {F.shape}, bases give "
                             f"({self.basis_x.achieved_rank}, {self.basis_y.achieved_rank})")
        F.setflags(write=False)
        object.__setattr__(self, "F", F)

    @property
    def shape(self) -> tuple[int, int]:
        return self.F.shape

    def q(self, x) -> np.ndarray:
        return evaluate_basis(self.basis_x, self.source, x)

    def s(self, y) -> np.ndarray:
        return evaluate_basis(self.basis_y, self.source, y)

    def on_grid(self, xs, ys) -> np.ndarray:
        """Interpolant on the tensor grid ``xs x ys``, evaluated as (q^T F) s."""
        Qx = self.q(np.asarray(xs, dtype=float))
        Sy = self.s(np.asarray(ys, dtype=float))
        return (Qx @ self.F) @ Sy.T

    def __call__(self, x: float, y: float) -> float:
        return evaluate_interpolant(self, x, y)


def build_tensor_interpolant(f: FunctionSource, bx: DirectionalBasis,
                             by: DirectionalBasis) -> TensorInterpolant:
    F = f.sample(bx.points, by.points)
    return TensorInterpolant(bx, by, F, f)


def evaluate_interpolant(T: TensorInterpolant, x: float, y: float) -> float:
    return float((T.q(x) @ T.F) @ T.s(y))


def at_ranks(T: TensorInterpolant, m: int, n: int) -> TensorInterpolant:
    """The interpolant the same greedy runs give when stopped at ranks m and n."""
    bx = T.basis_x.at_rank(m)
    by = T.basis_y.at_rank(n)
    return TensorInterpolant(bx, by, T.F[:m, :n], T.source)


def export_matrix(T: TensorInterpolant, out_dir) -> None:
    """Write ``F.csv`` (row i is x_i) and ``points.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "F.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in T.F:
            w.writerow([repr(float(v)) for v in row])
    doc = {
        "x_points": T.basis_x.points.tolist(),
        "y_points": T.basis_y.points.tolist(),
        "x_pivots": T.basis_x.pivots.tolist(),
        "y_pivots": T.basis_y.pivots.tolist(),
    }
    (out / "points.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
