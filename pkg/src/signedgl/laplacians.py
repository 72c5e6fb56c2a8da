"""Laplacian operators for unsigned and signed graphs.

Every constructor returns an :class:`OperatorHandle` holding either an
explicit symmetric matrix or a symmetric-definite generalized pair
(A, B), ready for the eigensolvers in :mod:`signedgl.spectral`.

Conventions:
  * zero-degree nodes: D^{-1/2} entries are set to 0, so such nodes
    contribute identity rows in the I +/- D^{-1/2} W D^{-1/2} operators;
  * an entirely absent sign (Wn = 0 or Wp = 0) contributes the zero
    operator to composite constructions, so e.g. the arithmetic-mean
    operator of an all-positive graph collapses to the normalized
    Laplacian of its positive part;
  * every explicit matrix is symmetrized as (S + S^T)/2 after assembly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
import scipy.sparse as sp

from .graph import SignedGraph, degrees

__all__ = [
    "DENSE_CAP",
    "OperatorKind",
    "OperatorSpec",
    "OperatorHandle",
    "unsigned_laplacian",
    "signless_laplacian",
    "signed_ratio_laplacian",
    "balance_ratio_laplacian",
    "sponge_operator",
    "arithmetic_mean_laplacian",
    "geometric_mean_laplacian",
    "matrix_geometric_mean",
    "build_operator",
]

# Geometric-mean construction requires dense matrix square roots.
DENSE_CAP = 2000


class OperatorKind(str, Enum):
    L = "L"
    LSYM = "Lsym"
    Q = "Q"
    QSYM = "Qsym"
    LSYM_POS = "L_plus_sym"
    QSYM_NEG = "Q_minus_sym"
    SR = "SR"
    SN = "SN"
    BR = "BR"
    BN = "BN"
    SPONGE = "SPONGE"
    AM = "AM"
    GM = "GM"


# Balance-ratio operators may have negative eigenvalues; everything else
# here is positive semi-definite by construction.
_NOT_PSD = frozenset({OperatorKind.BR, OperatorKind.BN})


@dataclass(frozen=True)
class OperatorSpec:
    """Which operator a handle holds, plus its regularization (GM only)."""

    kind: OperatorKind
    regularization: float = 0.0

    @property
    def psd_guaranteed(self) -> bool:
        return self.kind not in _NOT_PSD


@dataclass(frozen=True)
class OperatorHandle:
    """A symmetric matrix, or a generalized pair (A, B) with B positive definite."""

    spec: OperatorSpec
    matrix: object = None
    pair: tuple | None = None

    def __post_init__(self):
        if (self.matrix is None) == (self.pair is None):
            raise ValueError("exactly one of matrix/pair must be set")

    @property
    def is_generalized(self) -> bool:
        return self.pair is not None

    @property
    def n(self) -> int:
        m = self.matrix if self.matrix is not None else self.pair[0]
        return m.shape[0]

    @property
    def psd_guaranteed(self) -> bool:
        return self.spec.psd_guaranteed

    def apply(self, x):
        """Matrix-vector product S @ x (explicit operators only)."""
        if self.is_generalized:
            raise ValueError("generalized pair has no single matrix to apply")
        return self.matrix @ x

    def apply_pair(self, x):
        """(A @ x, B @ x) for generalized operators."""
        if not self.is_generalized:
            raise ValueError("not a generalized operator")
        return self.pair[0] @ x, self.pair[1] @ x

    def dense(self) -> np.ndarray:
        if self.is_generalized:
            raise ValueError("use dense_pair() for generalized operators")
        return _to_dense(self.matrix)

    def dense_pair(self):
        if not self.is_generalized:
            raise ValueError("not a generalized operator")
        return _to_dense(self.pair[0]), _to_dense(self.pair[1])


def _to_dense(M) -> np.ndarray:
    return M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)


def _coerce(W) -> sp.csr_array:
    if sp.issparse(W):
        A = sp.csr_array(W).astype(float)
    else:
        A = sp.csr_array(np.asarray(W, dtype=float))
    A.eliminate_zeros()
    return A


def _symmetrized(S) -> sp.csr_array:
    return sp.csr_array((S + S.T) * 0.5)


def _sqrt_inv_degrees(d: np.ndarray) -> np.ndarray:
    out = np.zeros(d.shape, dtype=float)
    nz = d > 0
    out[nz] = 1.0 / np.sqrt(d[nz])
    return out


def _norm_adjacency(W: sp.csr_array) -> sp.csr_array:
    """D^{-1/2} W D^{-1/2} with zero rows for zero-degree nodes."""
    d = np.asarray(W.sum(axis=1)).ravel()
    Di = sp.diags_array(_sqrt_inv_degrees(d), format="csr")
    return sp.csr_array(Di @ W @ Di)


def _eye(n: int) -> sp.csr_array:
    return sp.eye_array(n, format="csr")


def _norm_laplacian(W: sp.csr_array) -> sp.csr_array:
    return sp.csr_array(_eye(W.shape[0]) - _norm_adjacency(W))


def _norm_signless(W: sp.csr_array) -> sp.csr_array:
    return sp.csr_array(_eye(W.shape[0]) + _norm_adjacency(W))


def unsigned_laplacian(W, normalized: bool = False) -> OperatorHandle:
    """L = D - W, or its normalized form I - D^{-1/2} W D^{-1/2}."""
    W = _coerce(W)
    if normalized:
        S = _norm_laplacian(W)
        kind = OperatorKind.LSYM
    else:
        d = np.asarray(W.sum(axis=1)).ravel()
        S = sp.csr_array(sp.diags_array(d, format="csr") - W)
        kind = OperatorKind.L
    return OperatorHandle(OperatorSpec(kind), matrix=_symmetrized(S))


def signless_laplacian(W, normalized: bool = False) -> OperatorHandle:
    """Q = D + W, or its normalized form I + D^{-1/2} W D^{-1/2}."""
    W = _coerce(W)
    if normalized:
        S = _norm_signless(W)
        kind = OperatorKind.QSYM
    else:
        d = np.asarray(W.sum(axis=1)).ravel()
        S = sp.csr_array(sp.diags_array(d, format="csr") + W)
        kind = OperatorKind.Q
    return OperatorHandle(OperatorSpec(kind), matrix=_symmetrized(S))


def signed_ratio_laplacian(g: SignedGraph, normalized: bool = False) -> OperatorHandle:
    """Dbar - (Wp - Wn); its smallest eigenvalue is 0 iff the graph is 2-balanced."""
    dbar = degrees(g).dbar
    W = g.signed_adjacency()
    if normalized:
        Di = sp.diags_array(_sqrt_inv_degrees(dbar), format="csr")
        S = _eye(g.n) - sp.csr_array(Di @ W @ Di)
        kind = OperatorKind.SN
    else:
        S = sp.csr_array(sp.diags_array(dbar, format="csr") - W)
        kind = OperatorKind.SR
    return OperatorHandle(OperatorSpec(kind), matrix=_symmetrized(S))


def balance_ratio_laplacian(g: SignedGraph, normalized: bool = False) -> OperatorHandle:
    """Dp - Wp + Wn.  Not positive semi-definite in general; the returned
    handle is flagged accordingly and rejected by the classifier."""
    deg = degrees(g)
    S = sp.csr_array(sp.diags_array(deg.dp, format="csr") - g.Wp + g.Wn)
    kind = OperatorKind.BR
    if normalized:
        Di = sp.diags_array(_sqrt_inv_degrees(deg.dbar), format="csr")
        S = sp.csr_array(Di @ S @ Di)
        kind = OperatorKind.BN
    return OperatorHandle(OperatorSpec(kind), matrix=_symmetrized(S))


def sponge_operator(g: SignedGraph) -> OperatorHandle:
    """Generalized pair A = Lsym(Wp) + I, B = Lsym(Wn) + I.

    B is symmetric positive definite, so the pair is suitable for a
    symmetric-definite generalized eigensolver.  An absent sign
    contributes the zero operator (so e.g. Wn = 0 gives B = I).
    """
    eye = _eye(g.n)
    A = eye if g.Wp.nnz == 0 else sp.csr_array(_norm_laplacian(g.Wp) + eye)
    B = eye if g.Wn.nnz == 0 else sp.csr_array(_norm_laplacian(g.Wn) + eye)
    return OperatorHandle(
        OperatorSpec(OperatorKind.SPONGE), pair=(_symmetrized(A), _symmetrized(B))
    )


def arithmetic_mean_laplacian(g: SignedGraph) -> OperatorHandle:
    """Lsym(Wp) + Qsym(Wn), blending attraction and repulsion."""
    n = g.n
    parts = []
    if g.Wp.nnz:
        parts.append(_norm_laplacian(g.Wp))
    if g.Wn.nnz:
        parts.append(_norm_signless(g.Wn))
    if not parts:
        S = sp.csr_array((n, n))
    else:
        S = parts[0] if len(parts) == 1 else sp.csr_array(parts[0] + parts[1])
    return OperatorHandle(OperatorSpec(OperatorKind.AM), matrix=_symmetrized(S))


def matrix_geometric_mean(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """A # B = A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2} for SPD A, symmetric PSD B."""
    lam, V = np.linalg.eigh(np.asarray(A, dtype=float))
    if lam.min() <= 0:
        raise ValueError("left operand must be positive definite (try a larger delta)")
    sq = np.sqrt(lam)
    Ah = (V * sq) @ V.T
    Aih = (V / sq) @ V.T
    M = Aih @ np.asarray(B, dtype=float) @ Aih
    mlam, MV = np.linalg.eigh((M + M.T) * 0.5)
    Mh = (MV * np.sqrt(np.clip(mlam, 0.0, None))) @ MV.T
    X = Ah @ Mh @ Ah
    return (X + X.T) * 0.5


def geometric_mean_laplacian(g: SignedGraph, delta: float = 1e-8) -> OperatorHandle:
    """Matrix geometric mean of Lsym(Wp) + delta*I and Qsym(Wn) + delta*I.

    Dense computation; only supported up to DENSE_CAP nodes.
    """
    if g.n > DENSE_CAP:
        raise ValueError(
            f"geometric mean requires dense matrix roots; n={g.n} exceeds cap {DENSE_CAP}"
        )
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    eyed = np.eye(g.n) * delta
    A = (np.zeros((g.n, g.n)) if g.Wp.nnz == 0 else _norm_laplacian(g.Wp).toarray()) + eyed
    B = (np.zeros((g.n, g.n)) if g.Wn.nnz == 0 else _norm_signless(g.Wn).toarray()) + eyed
    X = matrix_geometric_mean(A, B)
    return OperatorHandle(OperatorSpec(OperatorKind.GM, regularization=delta), matrix=X)


def build_operator(g: SignedGraph, kind, delta: float = 1e-8) -> OperatorHandle:
    """Construct any signed-graph operator kind from a SignedGraph.

    The unsigned kinds (L, Lsym, Q, Qsym) need an explicit adjacency and
    must go through unsigned_laplacian/signless_laplacian directly.
    """
    kind = OperatorKind(kind)
    if kind == OperatorKind.LSYM_POS:
        h = unsigned_laplacian(g.Wp, normalized=True)
        return replace(h, spec=OperatorSpec(kind))
    if kind == OperatorKind.QSYM_NEG:
        h = signless_laplacian(g.Wn, normalized=True)
        return replace(h, spec=OperatorSpec(kind))
    if kind == OperatorKind.SR:
        return signed_ratio_laplacian(g, normalized=False)
    if kind == OperatorKind.SN:
        return signed_ratio_laplacian(g, normalized=True)
    if kind == OperatorKind.BR:
        return balance_ratio_laplacian(g, normalized=False)
    if kind == OperatorKind.BN:
        return balance_ratio_laplacian(g, normalized=True)
    if kind == OperatorKind.SPONGE:
        return sponge_operator(g)
    if kind == OperatorKind.AM:
        return arithmetic_mean_laplacian(g)
    if kind == OperatorKind.GM:
        return geometric_mean_laplacian(g, delta=delta)
    raise ValueError(
        f"kind {kind.value} takes a plain adjacency; use unsigned_laplacian or signless_laplacian"
    )
