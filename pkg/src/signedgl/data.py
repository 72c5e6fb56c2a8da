"""Dataset ingestion, canonical export, synthetic generation, label sampling.

Edge lists are plain text with one ``src dst weight`` record per line
(whitespace or comma delimited, ``#``/``%`` comments, optional header).
Records with the same node pair are summed per sign, so a pair voted
both ways keeps a positive and a negative edge.  Zero-weight records
(neutral votes) and self-loops are dropped with a counted warning.

The canonical export declares every node in index order via ``# node:``
comment lines; plain edge-list parsers skip them, our loader uses them,
and reloading a canonical file reproduces the exact matrices including
isolated nodes.
"""

from __future__ import annotations

import hashlib
import io
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .graph import SignedGraph

__all__ = [
    "EdgeListFormat",
    "EdgeListError",
    "LabelData",
    "SSBMParams",
    "load_signed_edge_list",
    "write_signed_edge_list",
    "graph_digest",
    "load_labels",
    "generate_ssbm",
    "ssbm_label_data",
    "sample_labeled_nodes",
]

_COMMENT_PREFIXES = ("#", "%")
_NODE_DIRECTIVE = "node:"


class EdgeListError(ValueError):
    """Malformed edge-list or label file; message carries the line number."""


@dataclass(frozen=True)
class EdgeListFormat:
    """Parsing options for edge-list files."""

    delimiter: str = "whitespace"  # or "comma"
    header: bool = False

    def split(self, line: str) -> list[str]:
        if self.delimiter == "comma":
            return [p.strip() for p in line.split(",")]
        return line.split()

    def __post_init__(self):
        if self.delimiter not in ("whitespace", "comma"):
            raise ValueError(f"unknown delimiter {self.delimiter!r}")


def _iter_records(text: str, fmt: EdgeListFormat, node_order: list[str]):
    """Yield (lineno, fields) for data rows; collect '# node:' directives."""
    skipped_header = not fmt.header
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(_COMMENT_PREFIXES):
            body = line[1:].strip()
            if body.startswith(_NODE_DIRECTIVE):
                node_order.append(body[len(_NODE_DIRECTIVE):].strip())
            continue
        if not skipped_header:
            skipped_header = True
            continue
        yield lineno, fmt.split(line)


def load_signed_edge_list(path, fmt: EdgeListFormat | None = None) -> SignedGraph:
    """Parse a signed edge list into a SignedGraph.

    Node identifiers are arbitrary strings mapped to dense 0-based
    indices in order of first appearance (or in ``# node:`` manifest
    order when present).  Duplicate records are summed per sign.

    Raises:
        EdgeListError: on malformed rows (with line number) or an empty file.
    """
    fmt = fmt or EdgeListFormat()
    text = Path(path).read_text(encoding="utf-8")
    node_order: list[str] = []
    index: dict[str, int] = {}
    pos: dict[tuple[int, int], float] = {}
    neg: dict[tuple[int, int], float] = {}
    n_self = 0
    n_zero = 0
    n_rows = 0

    def node(ident: str) -> int:
        if ident not in index:
            index[ident] = len(index)
        return index[ident]

    records = list(_iter_records(text, fmt, node_order))
    for ident in node_order:
        node(ident)
    for lineno, fields in records:
        if len(fields) < 3:
            raise EdgeListError(
                f"{path}: line {lineno}: expected 'src dst weight', got {len(fields)} fields"
            )
        src, dst = fields[0], fields[1]
        try:
            w = float(fields[2])
        except ValueError as exc:
            raise EdgeListError(
                f"{path}: line {lineno}: weight {fields[2]!r} is not a number"
            ) from exc
        if not np.isfinite(w):
            raise EdgeListError(f"{path}: line {lineno}: non-finite weight")
        n_rows += 1
        if src == dst:
            n_self += 1
            continue
        if w == 0.0:
            n_zero += 1
            continue
        i, j = node(src), node(dst)
        key = (i, j) if i < j else (j, i)
        if w > 0:
            pos[key] = pos.get(key, 0.0) + w
        else:
            neg[key] = neg.get(key, 0.0) - w
    if n_rows == 0 and not node_order:
        raise EdgeListError(f"{path}: no edge records found")
    if n_self:
        warnings.warn(f"{path}: dropped {n_self} self-loop rows", stacklevel=2)
    if n_zero:
        warnings.warn(f"{path}: dropped {n_zero} zero-weight rows", stacklevel=2)

    n = len(index)
    ids = [None] * n
    for ident, i in index.items():
        ids[i] = ident
    Wp = _pairs_to_matrix(pos, n)
    Wn = _pairs_to_matrix(neg, n)
    return SignedGraph(Wp, Wn, node_ids=ids)


def _pairs_to_matrix(pairs: dict, n: int) -> sp.csr_array:
    if not pairs:
        return sp.csr_array((n, n))
    rows = np.fromiter((k[0] for k in pairs), dtype=np.int64, count=len(pairs))
    cols = np.fromiter((k[1] for k in pairs), dtype=np.int64, count=len(pairs))
    data = np.fromiter(pairs.values(), dtype=float, count=len(pairs))
    upper = sp.coo_array((data, (rows, cols)), shape=(n, n))
    return sp.csr_array(upper + upper.T)


def _canonical_lines(g: SignedGraph):
    yield "# signed edge list"
    for ident in g.node_ids:
        yield f"# node: {ident}"
    entries = []
    for sign, W in ((1.0, g.Wp), (-1.0, g.Wn)):
        coo = W.tocoo()
        keep = coo.row < coo.col
        for i, j, w in zip(coo.row[keep], coo.col[keep], coo.data[keep]):
            entries.append((int(i), int(j), sign * float(w)))
    entries.sort()
    for i, j, w in entries:
        yield f"{g.node_ids[i]} {g.node_ids[j]} {w!r}"


def write_signed_edge_list(g: SignedGraph, path) -> None:
    """Write the canonical whitespace-delimited edge list (sorted, exact weights)."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in _canonical_lines(g):
            fh.write(line + "\n")


def graph_digest(g: SignedGraph) -> str:
    """SHA-256 of the canonical edge-list serialization."""
    buf = io.StringIO()
    for line in _canonical_lines(g):
        buf.write(line + "\n")
    return hashlib.sha256(buf.getvalue().encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class LabelData:
    """Ground-truth classes aligned to graph indices; -1 marks unknown."""

    y: np.ndarray
    known: np.ndarray
    class_names: tuple

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    def binary_signs(self) -> np.ndarray:
        """Map class 0 -> +1, class 1 -> -1 (two-class data only); unknown -> 0."""
        if self.num_classes != 2:
            raise ValueError(f"binary signs need exactly 2 classes, got {self.num_classes}")
        return np.where(self.known, 1 - 2 * self.y, 0).astype(np.int64)

    def restrict(self, old_to_new: np.ndarray, n_new: int) -> "LabelData":
        """Re-index onto a subgraph produced by largest_connected_component."""
        y = np.full(n_new, -1, dtype=np.int64)
        known = np.zeros(n_new, dtype=bool)
        kept = np.flatnonzero(old_to_new >= 0)
        y[old_to_new[kept]] = self.y[kept]
        known[old_to_new[kept]] = self.known[kept]
        y[~known] = -1
        return LabelData(y=y, known=known, class_names=self.class_names)


def load_labels(path, g: SignedGraph, strict: bool = True) -> LabelData:
    """Read (node_id, class_label) rows and align them to graph indices.

    Class labels are arbitrary strings mapped to 0..K-1 in order of
    first appearance.  A label for an unknown node id is an error when
    ``strict`` else skipped with a counted warning; duplicate labels for
    one node are always an error.
    """
    text = Path(path).read_text(encoding="utf-8")
    index = {ident: i for i, ident in enumerate(g.node_ids)}
    classes: dict[str, int] = {}
    y = np.full(g.n, -1, dtype=np.int64)
    known = np.zeros(g.n, dtype=bool)
    n_skipped = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(_COMMENT_PREFIXES):
            continue
        fields = [p.strip() for p in line.split(",")] if "," in line else line.split()
        if len(fields) < 2:
            raise EdgeListError(
                f"{path}: line {lineno}: expected 'node_id class_label'"
            )
        ident, cls = fields[0], fields[1]
        if ident not in index:
            if strict:
                raise EdgeListError(
                    f"{path}: line {lineno}: unknown node id {ident!r}"
                )
            n_skipped += 1
            continue
        i = index[ident]
        if known[i]:
            raise EdgeListError(
                f"{path}: line {lineno}: duplicate label for node {ident!r}"
            )
        if cls not in classes:
            classes[cls] = len(classes)
        y[i] = classes[cls]
        known[i] = True
    if n_skipped:
        warnings.warn(f"{path}: skipped {n_skipped} labels for absent nodes", stacklevel=2)
    return LabelData(y=y, known=known, class_names=tuple(classes))


@dataclass(frozen=True)
class SSBMParams:
    """Signed stochastic block model: positive within blocks, negative across,
    each realized edge sign-flipped independently with probability eta."""

    n: int
    k: int
    p_in: float
    p_out: float
    eta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 1 <= self.k <= self.n:
            raise ValueError("k must be in [1, n]")
        for name in ("p_in", "p_out", "eta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


def generate_ssbm(params: SSBMParams):
    """Sample a signed stochastic block model.

    Returns:
        (graph, blocks): the signed graph and the ground-truth block of
        every node.  Deterministic for a fixed seed.
    """
    n, k = params.n, params.k
    sizes = np.full(k, n // k, dtype=np.int64)
    sizes[: n % k] += 1
    blocks = np.repeat(np.arange(k), sizes)
    rng = np.random.default_rng(params.seed)
    rows, cols, signs = [], [], []
    for i in range(n - 1):
        j = np.arange(i + 1, n)
        same = blocks[j] == blocks[i]
        r = rng.random(n - 1 - i)
        hit = np.where(same, r < params.p_in, r < params.p_out)
        jj = j[hit]
        if jj.size == 0:
            continue
        s = np.where(blocks[jj] == blocks[i], 1.0, -1.0)
        flip = rng.random(jj.size) < params.eta
        s[flip] *= -1.0
        rows.append(np.full(jj.size, i, dtype=np.int64))
        cols.append(jj)
        signs.append(s)
    if rows:
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        signs = np.concatenate(signs)
    else:
        rows = np.empty(0, dtype=np.int64)
        cols = np.empty(0, dtype=np.int64)
        signs = np.empty(0)
    ones = np.ones_like(signs)
    Wp_u = sp.coo_array((ones[signs > 0], (rows[signs > 0], cols[signs > 0])), shape=(n, n))
    Wn_u = sp.coo_array((ones[signs < 0], (rows[signs < 0], cols[signs < 0])), shape=(n, n))
    g = SignedGraph(Wp_u + Wp_u.T, Wn_u + Wn_u.T)
    return g, blocks


def ssbm_label_data(blocks: np.ndarray) -> LabelData:
    """Ground-truth LabelData for a generated block model."""
    blocks = np.asarray(blocks, dtype=np.int64)
    k = int(blocks.max()) + 1 if blocks.size else 0
    return LabelData(
        y=blocks.copy(),
        known=np.ones(blocks.shape[0], dtype=bool),
        class_names=tuple(f"block{i}" for i in range(k)),
    )


def sample_labeled_nodes(
    labels: LabelData, fraction: float, run_index: int = 0, base_seed: int = 0
) -> np.ndarray:
    """Uniform sample (without replacement) of labeled training nodes.

    Draws round(fraction * #known) nodes from those with ground truth,
    seeded by base_seed + run_index.  Raises if the rounded count is zero.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    pool = np.flatnonzero(labels.known)
    count = round(fraction * pool.size)
    if count == 0:
        raise ValueError(
            f"fraction {fraction} of {pool.size} labeled nodes rounds to zero"
        )
    rng = np.random.default_rng(int(base_seed) + int(run_index))
    chosen = rng.choice(pool, size=count, replace=False)
    mask = np.zeros(labels.n, dtype=bool)
    mask[chosen] = True
    return mask
