"""Reference dimensionality reducers: PCA, Isomap, LTSA, and file import.

All three built-in methods are deterministic: dense symmetric
eigendecompositions with a fixed sign convention (the largest-magnitude
entry of every eigenvector is made positive).  LTSA normalizes its output,
so its embeddings should be scored with the affine-adjusted measures; its
diagnostics carry an ``output_normalized`` flag as a reminder.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import DisconnectedGraphError, FormatError, ValidationError
from .geometry import build_neighborhoods, pairwise_distances, validate_data
from .matrixio import read_matrix

METHODS = ("pca", "isomap", "ltsa", "external")
OUTPUT_NORMALIZED = frozenset({"ltsa"})

# Relative ridge added to local Gram matrices so coincident neighbors
# cannot make the tangent fit blow up.
_LTSA_RIDGE = 1e-12


@dataclass(frozen=True)
class ReducerConfig:
    method: str
    q: int
    K: int | None = None
    external_path: str | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if self.q < 1:
            raise ValidationError(f"target dimension q must be >= 1, got {self.q}")
        if self.method in ("isomap", "ltsa"):
            if self.K is None or self.K < 1:
                raise ValidationError(f"method {self.method} needs a neighborhood size K >= 1")
        if self.method == "external" and self.external_path is None:
            raise ValidationError("method 'external' needs external_path")


@dataclass(frozen=True)
class Embedding:
    """Low-dimensional configuration plus how it was produced."""

    values: np.ndarray  # (n, q)
    config: ReducerConfig
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_cases(self) -> int:
        return self.values.shape[0]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so the largest-magnitude entry is positive."""
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def reduce_pca(X, q: int) -> Embedding:
    """Project onto the top-q principal axes of the mean-centered data."""
    X = validate_data(X, "X")
    n, p = X.shape
    if not 1 <= q < p:
        raise ValidationError(f"need 1 <= q < p, got q={q}, p={p}")

    centered = X - X.mean(axis=0)
    cov = (centered.T @ centered) / (n - 1)
    eigval, eigvec = np.linalg.eigh(cov)
    order = np.argsort(eigval)[::-1][:q]
    eigval = eigval[order]
    eigvec = _fix_signs(eigvec[:, order])
    scores = centered @ eigvec

    # Rank deficiency: directions with no variance carry only rounding
    # noise, so zero them out explicitly.
    tol = max(n, p) * np.finfo(np.float64).eps * max(eigval.max(), 0.0)
    dead = eigval <= tol
    if dead.any():
        warnings.warn(
            f"covariance rank {int((~dead).sum())} < q={q}; "
            "trailing components set to zero",
            RuntimeWarning,
            stacklevel=2,
        )
        scores[:, dead] = 0.0

    return Embedding(
        values=scores,
        config=ReducerConfig(method="pca", q=q),
        diagnostics={"eigenvalues": eigval, "output_normalized": False},
    )


def _knn_graph(X: np.ndarray, K: int) -> sparse.csr_matrix:
    """Union-symmetrized K-nearest-neighbor graph with Euclidean weights."""
    n = X.shape[0]
    distances = pairwise_distances(X)
    nbrs = build_neighborhoods(X, K)
    rows = np.repeat(np.arange(n), K)
    cols = nbrs.neighbor_index[:, :K].ravel()
    weights = distances[rows, cols]
    graph = sparse.csr_matrix((weights, (rows, cols)), shape=(n, n))
    return graph.maximum(graph.T)


def reduce_isomap(X, q: int, K: int) -> Embedding:
    """Classical MDS on K-NN-graph shortest-path distances.

    Raises DisconnectedGraphError (with the component sizes) when the union
    graph does not connect all cases; there is deliberately no
    largest-component fallback, since dropping cases would break the row
    correspondence the rank measures require.
    """
    X = validate_data(X, "X")
    n, p = X.shape
    if not 1 <= q < p:
        raise ValidationError(f"need 1 <= q < p, got q={q}, p={p}")
    if not 1 <= K <= n - 1:
        raise ValidationError(f"need 1 <= K <= n-1, got K={K}, n={n}")

    graph = _knn_graph(X, K)
    n_comp, labels = connected_components(graph, directed=False)
    if n_comp > 1:
        sizes = np.bincount(labels)
        raise DisconnectedGraphError(sorted(sizes.tolist(), reverse=True))

    geodesic = shortest_path(graph, method="D", directed=False)

    # Classical MDS: double-center the squared distances.
    d2 = geodesic**2
    row_mean = d2.mean(axis=1, keepdims=True)
    b = -0.5 * (d2 - row_mean - row_mean.T + d2.mean())
    eigval, eigvec = np.linalg.eigh(b)
    order = np.argsort(eigval)[::-1]
    top = eigval[order[:q]]
    vectors = _fix_signs(eigvec[:, order[:q]])
    if (top < 0).any():
        warnings.warn(
            "negative MDS eigenvalues clipped to zero; embedding dimension "
            "may exceed what the geodesics support",
            RuntimeWarning,
            stacklevel=2,
        )
    coords = vectors * np.sqrt(np.clip(top, 0.0, None))

    return Embedding(
        values=coords,
        config=ReducerConfig(method="isomap", q=q, K=K),
        diagnostics={
            "eigenvalues": eigval[order][: min(n, 2 * q + 5)],
            "residual_eigenvalues": eigval[order][q : min(n, 2 * q + 5)],
            "n_edges": graph.nnz // 2,
            "output_normalized": False,
        },
    )


def reduce_ltsa(X, q: int, K: int) -> Embedding:
    """Local tangent space alignment.

    Per case: the patch is the case itself plus its K nearest neighbors
    (so every case is pinned by at least its own patch); the top-q
    directions of the centered patch give local tangent coordinates, and
    the global embedding is read off the eigenvectors 2..q+1 (ascending
    eigenvalues) of the assembled alignment matrix.  Output columns are
    eigenvector-normalized, hence the adjusted goodness measures apply.
    """
    X = validate_data(X, "X")
    n, p = X.shape
    if not 1 <= q < p:
        raise ValidationError(f"need 1 <= q < p, got q={q}, p={p}")
    if K <= q:
        raise ValidationError(f"LTSA needs K >= q+1, got K={K}, q={q}")
    if K > n - 1:
        raise ValidationError(f"need K <= n-1, got K={K}, n={n}")

    nbrs = build_neighborhoods(X, K)
    align = np.zeros((n, n))
    m = K + 1
    ones = np.full(m, 1.0 / np.sqrt(m))
    for i in range(n):
        idx = np.concatenate(([i], nbrs.neighbor_index[i, :K]))
        patch = X[idx]
        patch = patch - patch.mean(axis=0)
        gram = patch @ patch.T
        gram[np.diag_indices(m)] += _LTSA_RIDGE * np.trace(gram)
        _, vecs = np.linalg.eigh(gram)
        local = np.empty((m, q + 1))
        local[:, 0] = ones
        local[:, 1:] = vecs[:, -q:][:, ::-1]
        block = np.eye(m) - local @ local.T
        align[np.ix_(idx, idx)] += block

    eigval, eigvec = np.linalg.eigh(align)
    coords = _fix_signs(eigvec[:, 1 : q + 1])

    return Embedding(
        values=coords,
        config=ReducerConfig(method="ltsa", q=q, K=K),
        diagnostics={
            "alignment_eigenvalues": eigval[: q + 2],
            "output_normalized": True,
        },
    )


def import_embedding(path, expected_n: int) -> Embedding:
    """Load an externally computed embedding (e.g. MVU) from a matrix file."""
    values = read_matrix(path)
    if values.shape[0] != expected_n:
        raise FormatError(
            f"{path}: embedding has {values.shape[0]} rows, expected {expected_n}"
        )
    return Embedding(
        values=values,
        config=ReducerConfig(method="external", q=values.shape[1], external_path=str(path)),
        diagnostics={"output_normalized": False},
    )


def reduce(X, config: ReducerConfig) -> Embedding:
    """Dispatch on config.method."""
    if config.method == "pca":
        return reduce_pca(X, config.q)
    if config.method == "isomap":
        return reduce_isomap(X, config.q, config.K)
    if config.method == "ltsa":
        return reduce_ltsa(X, config.q, config.K)
    X = validate_data(X, "X")
    return import_embedding(config.external_path, X.shape[0])
