"""Dense pairwise distances and nearest-neighbor rank tables.

A "data matrix" throughout the package is a 2-D float array with one case
per row, at least two cases, at least one column, and only finite entries;
``validate_data`` is the single gatekeeper.

Ranks are self-excluded: the closest *other* case has rank 1, and a case
never appears in its own neighbor list.  Exact distance ties are broken by
ascending case index, so every rank vector is a permutation and all
downstream scores are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import ValidationError


def validate_data(data, name: str = "data") -> np.ndarray:
    """Return ``data`` as a validated float64 matrix (n_cases x n_dims)."""
    values = np.asarray(data, dtype=np.float64)
    if values.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got shape {values.shape}")
    n, d = values.shape
    if n < 2:
        raise ValidationError(f"{name} needs at least 2 cases, got {n}")
    if d < 1:
        raise ValidationError(f"{name} needs at least 1 dimension")
    if not np.isfinite(values).all():
        bad = np.argwhere(~np.isfinite(values))[0]
        raise ValidationError(
            f"{name} contains a non-finite entry at row {bad[0]}, column {bad[1]}"
        )
    return values


def pairwise_distances(data) -> np.ndarray:
    """Full symmetric Euclidean distance matrix with an exactly zero diagonal."""
    values = validate_data(data)
    return squareform(pdist(values))


@dataclass(frozen=True)
class NeighborhoodTable:
    """Sorted neighbor indices and the inverse rank lookup for one space.

    ``neighbor_index[i, m]`` is the case with rank m+1 from case i (so the
    first column is every case's nearest neighbor).  ``neighbor_rank[i, j]``
    is the rank of case j counted from case i, 0 on the diagonal.  Ranks run
    1..n-1 even when ``j_max`` is smaller; only the first ``j_max`` columns
    of ``neighbor_index`` are kept.
    """

    n_cases: int
    j_max: int
    neighbor_index: np.ndarray  # (n, j_max) int64
    neighbor_rank: np.ndarray  # (n, n) int64

    def neighbors(self, i: int, j: int) -> np.ndarray:
        """Index set of the j nearest neighbors of case i (rank order)."""
        if not 1 <= j <= self.j_max:
            raise ValidationError(f"J={j} outside 1..{self.j_max}")
        return self.neighbor_index[i, :j]

    def rank(self, i: int, j: int) -> int:
        """Rank of case j counted outward from case i."""
        return int(self.neighbor_rank[i, j])


def build_neighborhoods(data, j_max: int | None = None) -> NeighborhoodTable:
    """Sort every case's neighbors by (distance, index) and tabulate ranks.

    ``j_max`` defaults to n-1.  Exact scale: O(n^2 log n) time, O(n^2)
    memory; fine at desk scale and exact by construction.
    """
    distances = pairwise_distances(data)
    return neighborhoods_from_distances(distances, j_max)


def neighborhoods_from_distances(
    distances: np.ndarray, j_max: int | None = None
) -> NeighborhoodTable:
    """Build a NeighborhoodTable from a precomputed square distance matrix."""
    distances = np.asarray(distances, dtype=np.float64)
    n = distances.shape[0]
    if distances.shape != (n, n):
        raise ValidationError(f"distance matrix must be square, got {distances.shape}")
    if j_max is None:
        j_max = n - 1
    if not 1 <= j_max <= n - 1:
        raise ValidationError(f"J_max={j_max} outside 1..{n - 1} for n={n}")

    # Stable argsort on equal distances keeps ascending column order, which
    # is exactly the tie-break contract.
    order = np.argsort(distances, axis=1, kind="stable")
    # Drop each row's self entry wherever ties placed it.
    self_mask = order == np.arange(n)[:, None]
    order = order[~self_mask].reshape(n, n - 1)

    rank = np.zeros((n, n), dtype=np.int64)
    rows = np.repeat(np.arange(n), n - 1)
    rank[rows, order.ravel()] = np.tile(np.arange(1, n), n)

    return NeighborhoodTable(
        n_cases=n,
        j_max=j_max,
        neighbor_index=np.ascontiguousarray(order[:, :j_max]),
        neighbor_rank=rank,
    )
