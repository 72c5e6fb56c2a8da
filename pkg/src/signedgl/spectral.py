"""Smallest eigenpairs of symmetric operators and symmetric-definite pairs.

Small problems (n <= DENSE_CAP) go through LAPACK on dense matrices,
with generalized pairs reduced by a Cholesky factorization of B; larger
ones through ARPACK's Lanczos iteration with a seeded start vector so
repeated solves are reproducible (generalized pairs apply B^{-1} by
conjugate gradients rather than factorizing, since sparse LU fill-in is
prohibitive on graph operators).  Either way the returned eigenvectors
are orthonormal, B-orthonormal in the generalized case.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import solve_triangular
from scipy.sparse.linalg import (
    ArpackError,
    ArpackNoConvergence,
    LinearOperator,
    cg,
    eigsh,
)

from .laplacians import OperatorHandle, OperatorKind, OperatorSpec

__all__ = [
    "DENSE_CAP",
    "Eigenbasis",
    "EigenSolveError",
    "smallest_eigs",
    "full_dense_eigs",
    "save_eigenbasis",
    "load_eigenbasis",
    "eigenbasis_cache_file",
]

DENSE_CAP = 2000
_RESIDUAL_TOL = 1e-6


class EigenSolveError(RuntimeError):
    """Raised when an iterative eigensolver fails to converge."""


@dataclass
class Eigenbasis:
    """The k smallest eigenpairs of an operator.

    ``lambdas`` is ascending; ``phis`` has one eigenvector per column,
    orthonormal (B-orthonormal for generalized pairs) and sign-canonicalized
    so the entry of largest magnitude in each column is positive.
    """

    lambdas: np.ndarray
    phis: np.ndarray
    source: OperatorSpec

    @property
    def n(self) -> int:
        return self.phis.shape[0]

    @property
    def k(self) -> int:
        return self.phis.shape[1]

    def truncate(self, k: int) -> "Eigenbasis":
        if not 1 <= k <= self.k:
            raise ValueError(f"cannot truncate basis of size {self.k} to k={k}")
        return Eigenbasis(self.lambdas[:k].copy(), self.phis[:, :k].copy(), self.source)


def _canonical_signs(phis: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(phis), axis=0)
    signs = np.sign(phis[idx, np.arange(phis.shape[1])])
    signs[signs == 0] = 1.0
    return phis * signs


def _dense_standard(S: np.ndarray):
    lam, V = np.linalg.eigh(S)
    return lam, V


def _dense_generalized(A: np.ndarray, B: np.ndarray):
    """Reduce (A, B) to standard form via B = L L^T; eigenvectors come back
    B-orthonormal."""
    L = np.linalg.cholesky(B)
    Y = solve_triangular(L, A, lower=True)
    C = solve_triangular(L, Y.T, lower=True).T
    C = (C + C.T) * 0.5
    lam, V = np.linalg.eigh(C)
    X = solve_triangular(L.T, V, lower=False)
    return lam, X


def _start_vector(n: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal(n)


def _cg_inverse(B) -> LinearOperator:
    """Apply B^{-1} by conjugate gradients; B is well conditioned by
    construction (I + a normalized Laplacian), so no factorization is
    needed and sparsity fill-in is avoided."""

    def solve(x):
        y, info = cg(B, x, rtol=1e-12, atol=0.0)
        if info != 0:
            raise EigenSolveError(f"inner CG solve failed (info={info})")
        return y

    return LinearOperator(B.shape, matvec=solve, dtype=float)


def _arpack_smallest(op: OperatorHandle, k: int, seed: int):
    v0 = _start_vector(op.n, seed)
    try:
        if op.is_generalized:
            A, B = op.pair
            lam, V = eigsh(A, k=k, M=B, Minv=_cg_inverse(B), which="SA", v0=v0)
        else:
            lam, V = eigsh(op.matrix, k=k, which="SA", v0=v0)
    except ArpackNoConvergence as exc:
        best = _best_residual(op, exc.eigenvalues, exc.eigenvectors)
        raise EigenSolveError(
            f"eigensolver did not converge for k={k} "
            f"({len(exc.eigenvalues)} pairs found, best residual {best:.3e})"
        ) from exc
    except ArpackError as exc:
        raise EigenSolveError(f"eigensolver failed: {exc}") from exc
    order = np.argsort(lam)
    return lam[order], V[:, order]


def _best_residual(op, lam, V) -> float:
    if lam is None or len(lam) == 0:
        return float("inf")
    if op.is_generalized:
        A, B = op.pair
        R = A @ V - (B @ V) * lam
    else:
        R = op.matrix @ V - V * lam
    return float(np.linalg.norm(R, axis=0).min())


def _check_residuals(op: OperatorHandle, lam: np.ndarray, V: np.ndarray) -> None:
    if op.is_generalized:
        A, B = op.pair
        R = A @ V - (B @ V) * lam
        bound = _RESIDUAL_TOL
    else:
        R = op.matrix @ V - V * lam
        bound = _RESIDUAL_TOL * np.linalg.norm(V, axis=0)
    rnorm = np.linalg.norm(R, axis=0)
    if np.any(rnorm > bound):
        raise EigenSolveError(
            f"eigenpair residual {rnorm.max():.3e} exceeds tolerance {_RESIDUAL_TOL:.1e}"
        )


def smallest_eigs(op: OperatorHandle, k: int, seed: int = 0) -> Eigenbasis:
    """Compute the k smallest eigenpairs of an operator handle.

    Deterministic for a fixed seed.  Raises EigenSolveError if the
    iterative solver fails to converge (with the best residual reached),
    ValueError for k out of range.
    """
    n = op.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    # ARPACK needs k < n-1; fall back to the dense path near full spectra.
    if n <= DENSE_CAP or k > n - 2:
        if op.is_generalized:
            lam, V = _dense_generalized(*op.dense_pair())
        else:
            lam, V = _dense_standard(op.dense())
        lam, V = lam[:k], V[:, :k]
    else:
        lam, V = _arpack_smallest(op, k, seed)
    V = _canonical_signs(np.ascontiguousarray(V))
    _check_residuals(op, lam, V)
    return Eigenbasis(lambdas=lam, phis=V, source=op.spec)


def full_dense_eigs(op: OperatorHandle) -> Eigenbasis:
    """All n eigenpairs, ascending; dense oracle path, n <= DENSE_CAP only."""
    if op.n > DENSE_CAP:
        raise ValueError(f"full dense solve limited to n <= {DENSE_CAP}, got n={op.n}")
    if op.is_generalized:
        lam, V = _dense_generalized(*op.dense_pair())
    else:
        lam, V = _dense_standard(op.dense())
    V = _canonical_signs(V)
    _check_residuals(op, lam, V)
    return Eigenbasis(lambdas=lam, phis=V, source=op.spec)


# ---------------------------------------------------------------------------
# Eigenbasis cache files

_CACHE_VERSION = 1


def eigenbasis_cache_file(cache_dir, dataset_digest: str, kind, k: int) -> Path:
    """Canonical cache filename keyed by (dataset digest, operator kind, k)."""
    kind = OperatorKind(kind)
    return Path(cache_dir) / f"eig_{dataset_digest[:16]}_{kind.value}_k{k}.npz"


def save_eigenbasis(path, eig: Eigenbasis) -> None:
    """Write an eigenbasis as a versioned npz dump (little-endian float64)."""
    np.savez(
        path,
        version=np.int64(_CACHE_VERSION),
        kind=np.str_(eig.source.kind.value),
        regularization=np.float64(eig.source.regularization),
        lambdas=eig.lambdas.astype("<f8"),
        phis=eig.phis.astype("<f8"),
    )


def load_eigenbasis(path) -> Eigenbasis:
    with np.load(path, allow_pickle=False) as data:
        version = int(data["version"])
        if version != _CACHE_VERSION:
            raise ValueError(f"unsupported eigenbasis cache version {version}")
        spec = OperatorSpec(
            OperatorKind(str(data["kind"])), regularization=float(data["regularization"])
        )
        return Eigenbasis(
            lambdas=data["lambdas"].astype(float),
            phis=data["phis"].astype(float),
            source=spec,
        )
