"""SVD of the collocation matrix and rank-K truncation of the interpolant.

With F = U diag(sigma) V^T, the rotated bases phi(x) = U^T q(x) and
psi(y) = V^T s(y) give

    I f(x, y) = sum_k sigma_k phi_k(x) psi_k(y),

and keeping the first K terms yields the separable surrogate.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._io import write_csv, write_json
from .errors import InvalidRank, NumericError
from .gridfn import Grid
from .tensor import TensorInterpolant

ZERO_SIGMA = 1e-14
ORTHO_TOL = 1e-12
RECON_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SvdFactors:
    """``U`` (m x m), ``V`` (n x n) orthogonal and ``sigma`` non-increasing.

    The constructor rejects factors violating these invariants with
    :class:`NumericError`, so downstream code never sees them.
    """

    U: np.ndarray
    V: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        U, V, sigma = _frozen(self.U), _frozen(self.V), _frozen(self.sigma)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "sigma", sigma)
        m, n = U.shape[0], V.shape[0]
        if U.shape != (m, m) or V.shape != (n, n) or sigma.shape != (min(m, n),):
            raise NumericError(f"inconsistent factor shapes U{U.shape} V{V.shape} sigma{sigma.shape}")
        if not (np.all(np.isfinite(U)) and np.all(np.isfinite(V)) and np.all(np.isfinite(sigma))):
            raise NumericError("non-finite SVD factor")
        if np.any(sigma < 0):
            raise NumericError("negative singular value")
        if np.any(np.diff(sigma) > 0):
            raise NumericError("singular values are not sorted in non-increasing order")
        if np.linalg.norm(U.T @ U - np.eye(m)) > ORTHO_TOL * m:
            raise NumericError("U is not orthogonal")
        if np.linalg.norm(V.T @ V - np.eye(n)) > ORTHO_TOL * n:
            raise NumericError("V is not orthogonal")

    @property
    def shape(self) -> tuple[int, int]:
        return self.U.shape[0], self.V.shape[0]

    @property
    def numerical_rank(self) -> int:
        return int(np.count_nonzero(self.sigma))

    def sigma_matrix(self, K: int | None = None) -> np.ndarray:
        """m x n Sigma, keeping only the first K singular values if given."""
        m, n = self.shape
        S = np.zeros((m, n))
        r = min(m, n) if K is None else K
        S[np.arange(r), np.arange(r)] = self.sigma[:r]
        return S

    def reconstruct(self, K: int | None = None) -> np.ndarray:
        return self.U @ self.sigma_matrix(K) @ self.V.T


def _sign_fix(W: np.ndarray, cols) -> np.ndarray:
    signs = np.ones(W.shape[1])
    for k in cols:
        i = int(np.argmax(np.abs(W[:, k])))
        if W[i, k] < 0:
            signs[k] = -1.0
    return signs


def svd_decompose(F) -> SvdFactors:
    """Full SVD of F with a reproducible sign convention.

    In each leading column of U the entry of largest magnitude (lowest row
    on ties) is made nonnegative, flipping the paired V column along with
    it.  Singular values below ``1e-14 * sigma_1`` are reported as zero.
    """
    F = np.asarray(F, dtype=float)
    if F.ndim != 2 or F.size == 0:
        raise NumericError("SVD needs a nonempty 2-D matrix")
    if not np.all(np.isfinite(F)):
        raise NumericError("matrix has non-finite entries")
    m, n = F.shape
    r = min(m, n)
    U, sigma, Vt = np.linalg.svd(F, full_matrices=True)
    V = Vt.T
    paired = _sign_fix(U, range(r))
    U = U * paired
    V[:, :r] = V[:, :r] * paired[:r]
    U = U * _sign_fix(U, range(r, m))
    V = V * _sign_fix(V, range(r, n))
    sigma = sigma.copy()
    if sigma[0] > 0:
        sigma[sigma < ZERO_SIGMA * sigma[0]] = 0.0
    factors = SvdFactors(U, V, sigma)
    fro = np.linalg.norm(F)
    if np.linalg.norm(F - factors.reconstruct()) > RECON_TOL * max(fro, np.finfo(float).tiny):
        raise NumericError("SVD reconstruction error exceeds tolerance")
    return factors


@dataclass(frozen=True, eq=False)
class LowRankApprox:
    """Rank-K separable surrogate sum_k sigma_k phi_k(x) psi_k(y).

    Row k of ``phi_coeffs`` is column k of U, so phi_k(x) = phi_coeffs[k] @ q(x);
    likewise for ``psi_coeffs`` and V.
    """

    rank_K: int
    sigma: np.ndarray
    phi_coeffs: np.ndarray
    psi_coeffs: np.ndarray
    interpolant: TensorInterpolant

    def __post_init__(self):
        for name in ("sigma", "phi_coeffs", "psi_coeffs"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def basis_x(self):
        return self.interpolant.basis_x

    @property
    def basis_y(self):
        return self.interpolant.basis_y

    @property
    def source(self):
        return self.interpolant.source

    def phi(self, x) -> np.ndarray:
        """phi_1..phi_K at x; shape (K,) for scalar x, (len(x), K) otherwise."""
        return self.interpolant.q(x) @ self.phi_coeffs.T

    def psi(self, y) -> np.ndarray:
        return self.interpolant.s(y) @ self.psi_coeffs.T

    def on_grid(self, xs, ys) -> np.ndarray:
        Phi = self.phi(np.asarray(xs, dtype=float))
        Psi = self.psi(np.asarray(ys, dtype=float))
        return (Phi * self.sigma) @ Psi.T

    def __call__(self, x: float, y: float) -> float:
        return evaluate_lowrank(self, x, y)


def truncate(T: TensorInterpolant, factors: SvdFactors, K: int) -> LowRankApprox:
    """Keep the K leading singular triplets.

    Any of those K singular values that were reported as zero are dropped,
    so ``rank_K`` can come out below K.
    """
    m, n = T.shape
    if factors.shape != (m, n):
        raise ValueError(f"factors are for a {factors.shape} matrix, interpolant has {(m, n)}")
    if not 1 <= K <= min(m, n):
        raise InvalidRank(f"K={K} outside 1..{min(m, n)}")
    k = min(K, factors.numerical_rank)
    return LowRankApprox(
        k,
        factors.sigma[:k],
        factors.U[:, :k].T,
        factors.V[:, :k].T,
        T,
    )


def evaluate_lowrank(L: LowRankApprox, x: float, y: float) -> float:
    return float((L.phi(x) * L.sigma) @ L.psi(y))


def frobenius_tail(factors: SvdFactors, K: int) -> float:
    """sqrt(sum_{k > K} sigma_k^2), the Frobenius error of the rank-K truncation."""
    r = factors.sigma.size
    if not 0 <= K <= r:
        raise InvalidRank(f"K={K} outside 0..{r}")
    return float(np.sqrt(np.sum(factors.sigma[K:] ** 2)))


def energy_ratio(factors: SvdFactors, K: int) -> float:
    """Share of sum(sigma^2) carried by the discarded singular values."""
    lam = factors.sigma ** 2
    return float(np.sum(lam[K:]) / np.sum(lam))


def export_svd(factors: SvdFactors, K: int, path) -> None:
    write_json(path, {
        "sigma": factors.sigma.tolist(),
        "U": factors.U.tolist(),
        "V": factors.V.tolist(),
        "K": int(K),
    })


def export_phi_psi(L: LowRankApprox, gx: Grid, gy: Grid, out_dir) -> None:
    """Sample phi_k and psi_k into ``phi_k.csv`` and ``psi_k.csv``."""
    out = Path(out_dir)
    K = L.rank_K
    Phi = L.phi(gx.points)
    Psi = L.psi(gy.points)
    write_csv(out / "phi_k.csv", ["t"] + [f"phi_{k + 1}" for k in range(K)],
              (np.concatenate(([t], row)) for t, row in zip(gx.points, Phi)))
    write_csv(out / "psi_k.csv", ["t"] + [f"psi_{k + 1}" for k in range(K)],
              (np.concatenate(([t], row)) for t, row in zip(gy.points, Psi)))
