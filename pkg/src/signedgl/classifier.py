"""Diffuse-interface node classification via the Ginzburg-Landau functional.

The binary classifier minimizes

    E(u) = eps/2 u^T S u + 1/(4 eps) sum_i (u_i^2 - 1)^2
           + sum_i omega_i/2 (f_i - u_i)^2

over the span of an eigenbasis of S by convexity splitting: the
quadratic part is treated implicitly, the double-well and fidelity
forces explicitly, which reduces every time step to a diagonal solve in
eigenvector coordinates.  The multiclass variant replaces the double
well by an L1 simplex-vertex potential and projects each row of the
iterate back onto the Gibbs simplex after every step.

S must be positive semi-definite (otherwise E is unbounded below), so
balance-ratio operators are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .laplacians import OperatorHandle, OperatorSpec
from .spectral import Eigenbasis

__all__ = [
    "GLConfig",
    "BinaryLabelData",
    "MulticlassLabelData",
    "GLDiagnostics",
    "DivergenceError",
    "energy",
    "energy_gradient",
    "multiclass_energy",
    "multiclass_potential",
    "multiclass_potential_gradient",
    "gl_binary",
    "gl_multiclass",
    "simplex_project",
    "project_rows_onto_simplex",
]

_NORM_FLOOR = 1e-30


class DivergenceError(RuntimeError):
    """Non-finite iterate encountered; carries the iteration index."""

    def __init__(self, iteration: int):
        super().__init__(f"iterate became non-finite at iteration {iteration}")
        self.iteration = iteration


@dataclass
class GLConfig:
    """Parameters of the Ginzburg-Landau scheme.

    ``c`` defaults to 3/epsilon + omega0 and must satisfy
    c >= omega0 + 1/epsilon for the convexity splitting to be stable.
    ``n_eigs`` is the eigenvector count requested by the harness; the
    solvers themselves use whatever basis they are handed.
    """

    epsilon: float = 0.1
    omega0: float = 1000.0
    c: float | None = None
    tau: float = 0.1
    max_iter: int = 2000
    tol: float = 1e-6
    n_eigs: int | None = None

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.omega0 < 0:
            raise ValueError("omega0 must be nonnegative")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.n_eigs is not None and self.n_eigs < 1:
            raise ValueError("n_eigs must be at least 1")
        if self.c is None:
            self.c = 3.0 / self.epsilon + self.omega0
        if self.c < self.omega0 + 1.0 / self.epsilon:
            raise ValueError(
                f"c={self.c} violates the convexity requirement "
                f"c >= omega0 + 1/epsilon = {self.omega0 + 1.0 / self.epsilon}"
            )


@dataclass(frozen=True)
class BinaryLabelData:
    """Per-node labels f in {-1, 0, +1}; f is 0 exactly on unlabeled nodes."""

    f: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        mask = np.asarray(self.mask, dtype=bool)
        if f.shape != mask.shape:
            raise ValueError("f and mask must have the same shape")
        if not np.isin(f, (-1.0, 0.0, 1.0)).all():
            raise ValueError("binary labels must be -1, 0 or +1")
        if not np.array_equal(f != 0, mask):
            raise ValueError("f must be nonzero exactly on masked (labeled) nodes")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_signs(cls, signs, train_mask) -> "BinaryLabelData":
        signs = np.asarray(signs, dtype=float)
        train_mask = np.asarray(train_mask, dtype=bool)
        return cls(f=np.where(train_mask, signs, 0.0), mask=train_mask)

    @property
    def n(self) -> int:
        return self.f.shape[0]

    def weights(self, omega0: float) -> np.ndarray:
        return np.where(self.mask, float(omega0), 0.0)


@dataclass(frozen=True)
class MulticlassLabelData:
    """One-hot rows for labeled nodes, zero rows elsewhere."""

    U_hat: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.U_hat, dtype=float)
        mask = np.asarray(self.mask, dtype=bool)
        if U.ndim != 2 or U.shape[1] < 2:
            raise ValueError("U_hat must be n x K with K >= 2")
        if U.shape[0] != mask.shape[0]:
            raise ValueError("U_hat and mask disagree on node count")
        onehot = (np.isin(U, (0.0, 1.0)).all(axis=1)) & (U.sum(axis=1) == 1.0)
        if not onehot[mask].all():
            raise ValueError("labeled rows of U_hat must be standard basis vectors")
        if U[~mask].any():
            raise ValueError("unlabeled rows of U_hat must be zero")
        object.__setattr__(self, "U_hat", U)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_classes(cls, classes, train_mask, num_classes: int) -> "MulticlassLabelData":
        classes = np.asarray(classes, dtype=int)
        train_mask = np.asarray(train_mask, dtype=bool)
        U = np.zeros((classes.shape[0], num_classes))
        idx = np.flatnonzero(train_mask)
        U[idx, classes[idx]] = 1.0
        return cls(U_hat=U, mask=train_mask)

    @property
    def n(self) -> int:
        return self.U_hat.shape[0]

    @property
    def num_classes(self) -> int:
        return self.U_hat.shape[1]

    def weights(self, omega0: float) -> np.ndarray:
        return np.where(self.mask, float(omega0), 0.0)


@dataclass
class GLDiagnostics:
    iterations: int
    final_change: float
    final_energy: float
    converged: bool
    energy_history: list = field(default_factory=list)


def _require_psd(spec: OperatorSpec) -> None:
    if not spec.psd_guaranteed:
        raise ValueError(
            f"operator kind {spec.kind.value} is not positive semi-definite; "
            "the Ginzburg-Landau energy would be unbounded below"
        )


def _quadratic_form(source, u: np.ndarray) -> float:
    if isinstance(source, OperatorHandle):
        if source.is_generalized:
            raise ValueError(
                "energy of a generalized pair needs an Eigenbasis, not the raw pair"
            )
        return float(u @ source.apply(u))
    a = source.phis.T @ u
    return float(a @ (source.lambdas * a))


def energy(source, u, labels: BinaryLabelData, cfg: GLConfig) -> float:
    """Evaluate the binary Ginzburg-Landau energy at u.

    ``source`` is an OperatorHandle (exact quadratic form) or an
    Eigenbasis (quadratic form of the span-projected part).
    """
    spec = source.spec if isinstance(source, OperatorHandle) else source.source
    _require_psd(spec)
    u = np.asarray(u, dtype=float)
    quad = _quadratic_form(source, u)
    omega = labels.weights(cfg.omega0)
    potential = float(np.sum((u**2 - 1.0) ** 2))
    fidelity = float(np.sum(omega * (labels.f - u) ** 2))
    return 0.5 * cfg.epsilon * quad + potential / (4.0 * cfg.epsilon) + 0.5 * fidelity


def energy_gradient(source, u, labels: BinaryLabelData, cfg: GLConfig) -> np.ndarray:
    """Analytic gradient of the binary energy: eps*S u + (u^3-u)/eps - omega*(f-u)."""
    spec = source.spec if isinstance(source, OperatorHandle) else source.source
    _require_psd(spec)
    u = np.asarray(u, dtype=float)
    if isinstance(source, OperatorHandle):
        Su = source.apply(u)
    else:
        Su = source.phis @ (source.lambdas * (source.phis.T @ u))
    omega = labels.weights(cfg.omega0)
    return cfg.epsilon * Su + (u**3 - u) / cfg.epsilon - omega * (labels.f - u)


def _binary_energy_from_state(lambdas, a, u, labels, cfg) -> float:
    quad = float(a @ (lambdas * a))
    omega = labels.weights(cfg.omega0)
    potential = float(np.sum((u**2 - 1.0) ** 2))
    fidelity = float(np.sum(omega * (labels.f - u) ** 2))
    return 0.5 * cfg.epsilon * quad + potential / (4.0 * cfg.epsilon) + 0.5 * fidelity


def gl_binary(
    basis: Eigenbasis,
    labels: BinaryLabelData,
    cfg: GLConfig,
    init_seed: int | None = None,
    track_energy: bool = False,
):
    """Binary Ginzburg-Landau classification over an eigenbasis.

    Starts from u = f and runs the semi-implicit convexity-splitting
    update until the relative change of the iterate drops below
    ``cfg.tol`` or ``cfg.max_iter`` is reached.  ``init_seed`` is
    accepted for interface parity with the multiclass solver but unused
    (the binary start is deterministic).

    Returns:
        (u, labels_out, diagnostics) with labels_out = sign(u), sign(0) = +1.
    """
    del init_seed
    _require_psd(basis.source)
    if labels.n != basis.n:
        raise ValueError("label vector length does not match eigenbasis")
    eps, c, tau = cfg.epsilon, cfg.c, cfg.tau
    phis, lambdas = basis.phis, basis.lambdas
    omega = labels.weights(cfg.omega0)
    f = labels.f
    denom = 1.0 + eps * tau * lambdas + c * tau

    a = phis.T @ f
    u = phis @ a
    diag = GLDiagnostics(0, np.inf, np.nan, False)
    if track_energy:
        diag.energy_history.append(_binary_energy_from_state(lambdas, a, u, labels, cfg))

    for it in range(cfg.max_iter):
        b = phis.T @ (u**3 - u)
        d = phis.T @ (omega * (f - u))
        a_new = ((1.0 + c * tau) * a - (tau / eps) * b + tau * d) / denom
        u_new = phis @ a_new
        if not np.all(np.isfinite(u_new)):
            raise DivergenceError(it)
        change = np.linalg.norm(u_new - u) / max(np.linalg.norm(u_new), _NORM_FLOOR)
        a, u = a_new, u_new
        diag.iterations = it + 1
        diag.final_change = float(change)
        if track_energy:
            diag.energy_history.append(
                _binary_energy_from_state(lambdas, a, u, labels, cfg)
            )
        if change < cfg.tol:
            diag.converged = True
            break

    diag.final_energy = _binary_energy_from_state(lambdas, a, u, labels, cfg)
    labels_out = np.where(u >= 0, 1, -1).astype(np.int64)
    return u, labels_out, diag


# ---------------------------------------------------------------------------
# Multiclass potential and Gibbs-simplex machinery


def multiclass_potential(U: np.ndarray) -> float:
    """sum_i prod_l ||u_i - e_l||_1^2 / 4, the simplex-vertex well."""
    U = np.asarray(U, dtype=float)
    dist = _vertex_distances(U)
    return float(np.prod(0.25 * dist**2, axis=1).sum())


def _vertex_distances(U: np.ndarray) -> np.ndarray:
    # dist[i, l] = ||u_i - e_l||_1
    K = U.shape[1]
    return np.abs(U[:, None, :] - np.eye(K)[None, :, :]).sum(axis=2)


def multiclass_potential_gradient(U: np.ndarray) -> np.ndarray:
    """Entrywise derivative of the simplex-vertex well at each row of U.

    Row i, class k:
        sum_l (1 - 2*delta_kl)/2 * ||u_i - e_l||_1 * prod_{m != l} ||u_i - e_m||_1^2 / 4
    with the interior sign convention of the L1 distances baked in.
    """
    U = np.asarray(U, dtype=float)
    n, K = U.shape
    dist = _vertex_distances(U)
    q = 0.25 * dist**2
    prod_excl = np.empty_like(q)
    for l in range(K):
        prod_excl[:, l] = np.prod(np.delete(q, l, axis=1), axis=1)
    base = 0.5 * dist * prod_excl
    return base.sum(axis=1, keepdims=True) - 2.0 * base


def project_rows_onto_simplex(V: np.ndarray) -> np.ndarray:
    """Euclidean projection of every row onto the probability simplex."""
    V = np.asarray(V, dtype=float)
    n, K = V.shape
    s = np.sort(V, axis=1)[:, ::-1]
    gaps = s - (np.cumsum(s, axis=1) - 1.0) / np.arange(1, K + 1)
    # index of the last positive gap; the first is always positive
    rho = K - 1 - np.argmax(gaps[:, ::-1] > 0, axis=1)
    theta = (np.cumsum(s, axis=1)[np.arange(n), rho] - 1.0) / (rho + 1)
    return np.maximum(V - theta[:, None], 0.0)


def simplex_project(v) -> np.ndarray:
    """Euclidean projection of a single vector onto {x >= 0, sum x = 1}."""
    v = np.asarray(v, dtype=float).ravel()
    return project_rows_onto_simplex(v[None, :])[0]


def multiclass_energy(source, U, labels: MulticlassLabelData, cfg: GLConfig) -> float:
    """Vector-valued Ginzburg-Landau energy (trace form + well + fidelity)."""
    spec = source.spec if isinstance(source, OperatorHandle) else source.source
    _require_psd(spec)
    U = np.asarray(U, dtype=float)
    if isinstance(source, OperatorHandle):
        quad = float(np.tensordot(U, source.matrix @ U))
    else:
        C = source.phis.T @ U
        quad = float(np.sum(source.lambdas[:, None] * C**2))
    omega = labels.weights(cfg.omega0)
    fidelity = float(np.sum(omega[:, None] * (labels.U_hat - U) ** 2))
    return (
        0.5 * cfg.epsilon * quad
        + multiclass_potential(U) / (2.0 * cfg.epsilon)
        + 0.5 * fidelity
    )


def gl_multiclass(
    basis: Eigenbasis,
    labels: MulticlassLabelData,
    cfg: GLConfig,
    init_seed: int | None = None,
    init: np.ndarray | None = None,
    track_energy: bool = False,
):
    """Multiclass Ginzburg-Landau classification over an eigenbasis.

    The iterate starts from uniform (0,1) noise projected onto the Gibbs
    simplex with labeled rows overwritten by their one-hot targets; pass
    ``init`` to override the random draw.  Every step solves the
    diagonal system in eigenvector coordinates and projects each row of
    the reconstruction back onto the simplex.

    Returns:
        (U, labels_out, diagnostics) with labels_out the row argmax
        (ties to the lowest class index).
    """
    _require_psd(basis.source)
    if labels.n != basis.n:
        raise ValueError("label matrix height does not match eigenbasis")
    n, K = labels.n, labels.num_classes
    eps, c, tau = cfg.epsilon, cfg.c, cfg.tau
    phis, lambdas = basis.phis, basis.lambdas
    omega = labels.weights(cfg.omega0)
    U_hat = labels.U_hat
    denom = (1.0 + c * tau + eps * tau * lambdas)[:, None]

    if init is not None:
        U0 = np.array(init, dtype=float)
        if U0.shape != (n, K):
            raise ValueError(f"init must have shape {(n, K)}")
    else:
        U0 = np.random.default_rng(init_seed).random((n, K))
    U = project_rows_onto_simplex(U0)
    U[labels.mask] = U_hat[labels.mask]

    diag = GLDiagnostics(0, np.inf, np.nan, False)
    if track_energy:
        diag.energy_history.append(multiclass_energy(basis, U, labels, cfg))

    for it in range(cfg.max_iter):
        C = phis.T @ U
        TU = multiclass_potential_gradient(U)
        fid = phis.T @ (omega[:, None] * (U_hat - U))
        C_new = ((1.0 + c * tau) * C - (tau / (2.0 * eps)) * (phis.T @ TU) + tau * fid) / denom
        U_new = phis @ C_new
        if not np.all(np.isfinite(U_new)):
            raise DivergenceError(it)
        U_new = project_rows_onto_simplex(U_new)
        change = np.linalg.norm(U_new - U) / max(np.linalg.norm(U_new), _NORM_FLOOR)
        U = U_new
        diag.iterations = it + 1
        diag.final_change = float(change)
        if track_energy:
            diag.energy_history.append(multiclass_energy(basis, U, labels, cfg))
        if change < cfg.tol:
            diag.converged = True
            break

    diag.final_energy = multiclass_energy(basis, U, labels, cfg)
    labels_out = np.argmax(U, axis=1).astype(np.int64)
    return U, labels_out, diag
