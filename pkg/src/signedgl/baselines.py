"""Unsigned-graph transductive baselines on the positive subgraph.

Harmonic-function label propagation solves the Dirichlet problem on the
unlabeled block of the combinatorial Laplacian; local-global
consistency solves (I - alpha * D^{-1/2} W D^{-1/2}) u = f.  Systems are
solved densely below DENSE_CAP nodes and by conjugate gradients above.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from .classifier import BinaryLabelData, MulticlassLabelData
from .laplacians import _coerce, _norm_adjacency

__all__ = ["harmonic_functions", "local_global"]

DENSE_CAP = 2000
_SOLVE_TOL = 1e-10


def _solve_columns(A, B):
    """Solve A X = B column by column; B may be a vector or a matrix."""
    rhs = B if B.ndim == 2 else B[:, None]
    n = A.shape[0]
    if n <= DENSE_CAP:
        Ad = A.toarray() if sp.issparse(A) else np.asarray(A)
        try:
            X = np.linalg.solve(Ad, rhs)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(f"linear system is singular: {exc}") from exc
    else:
        X = np.empty_like(rhs)
        for j in range(rhs.shape[1]):
            x, info = cg(A, rhs[:, j], rtol=_SOLVE_TOL, atol=0.0)
            if info != 0:
                raise np.linalg.LinAlgError(
                    f"conjugate gradient did not converge (info={info})"
                )
            X[:, j] = x
    resid = np.linalg.norm(A @ X - rhs)
    scale = max(np.linalg.norm(rhs), 1.0)
    if not np.isfinite(resid) or resid > 1e-8 * scale:
        raise np.linalg.LinAlgError(
            f"linear solve residual {resid:.3e} too large; system is singular "
            "or badly conditioned"
        )
    return X if B.ndim == 2 else X[:, 0]


def _label_arrays(labels):
    """(values, mask, K) with values an n-vector (binary) or n x K matrix."""
    if isinstance(labels, BinaryLabelData):
        return labels.f, labels.mask, None
    if isinstance(labels, MulticlassLabelData):
        return labels.U_hat, labels.mask, labels.num_classes
    raise TypeError("labels must be BinaryLabelData or MulticlassLabelData")


def _readout(scores, K):
    if K is None:
        return np.where(scores >= 0, 1, -1).astype(np.int64)
    return np.argmax(scores, axis=1).astype(np.int64)


def harmonic_functions(Wp, labels):
    """Harmonic extension of the labeled values over the positive subgraph.

    Solves L_uu u_u = W_ul f_l for the unlabeled block; labeled nodes keep
    their given values.  Raises a LinAlgError when an unlabeled region has
    no labeled attachment (singular block).

    Returns:
        (labels_out, scores): sign/argmax labels and the harmonic values.
    """
    W = _coerce(Wp)
    values, mask, K = _label_arrays(labels)
    if not mask.any():
        raise ValueError("harmonic functions need at least one labeled node")
    lab = np.flatnonzero(mask)
    unl = np.flatnonzero(~mask)
    scores = np.array(values, dtype=float)
    if unl.size:
        d = np.asarray(W.sum(axis=1)).ravel()
        L = sp.csr_array(sp.diags_array(d, format="csr") - W)
        L_uu = L[unl, :][:, unl]
        W_ul = W[unl, :][:, lab]
        rhs = W_ul @ values[lab]
        scores[unl] = _solve_columns(L_uu, rhs)
    return _readout(scores, K), scores


def local_global(Wp, labels, alpha: float = 0.99):
    """Local-global label propagation: (I - alpha * Wsym)^{-1} f.

    ``alpha`` must lie in (0, 1), which keeps the system nonsingular.

    Returns:
        (labels_out, scores).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    W = _coerce(Wp)
    values, _, K = _label_arrays(labels)
    n = W.shape[0]
    M = sp.csr_array(sp.eye_array(n, format="csr") - alpha * _norm_adjacency(W))
    scores = _solve_columns(M, np.asarray(values, dtype=float))
    return _readout(scores, K), scores
