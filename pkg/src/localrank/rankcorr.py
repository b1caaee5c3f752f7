"""Local rank-correlation scores for embedding quality.

Given input data X and a low-dimensional configuration Y with matched rows,
every case i gets four scores in [-1, 1] describing how well the J-nearest-
neighbor structure around i survives the mapping:

* ``rho_O`` / ``tau_O`` -- Spearman / Kendall correlation over i's *output*
  neighborhood, comparing output ranks against input ranks trimmed to the
  intersection of the two neighborhoods.
* ``rho_I`` / ``tau_I`` -- the mirror image over i's *input* neighborhood.

Neighbors outside the intersection carry no usable rank in the other space,
so they are all assigned the common midrank (zeta + J + 1) / 2, where zeta
is the intersection size; the Spearman variants add the standard tie
adjustment U = ((J - zeta)^3 - (J - zeta)) / 12 for that artificial tie
group.  Averaging a local score over all cases gives the overall goodness
of the embedding.

Methods that normalize their output (LTSA and friends) destroy raw distance
comparability; for those, ``fit_affine_adjustment`` estimates the q x q
matrix A whose Gram matrix A'A best restores local squared distances, and
``goodness_adjusted`` scores the configuration Y @ A instead.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .geometry import NeighborhoodTable, build_neighborhoods, validate_data

MEASURES = ("rho_I", "rho_O", "tau_I", "tau_O")


def _check_J(J: int, n: int) -> None:
    if J < 2:
        raise ValidationError(f"J must be at least 2, got {J}")
    if J > n - 1:
        raise ValidationError(f"J={J} too large for n={n} (max {n - 1})")


def _check_kind(kind: str) -> None:
    if kind not in MEASURES:
        raise ValidationError(f"unknown measure kind {kind!r}, expected one of {MEASURES}")


@dataclass(frozen=True)
class TrimmedRanks:
    """Per-case trimmed rank vectors over the union of both J-neighborhoods.

    ``S[j]`` is the input rank of neighbor j recounted inside the
    intersection, ``R_hat[j]`` the analogous output rank; members of the
    union outside the intersection hold the shared midrank.
    """

    case: int
    J: int
    intersection: np.ndarray
    zeta: int
    S: dict[int, float]
    R_hat: dict[int, float]
    U: float


def trimmed_ranks(
    input_nbrs: NeighborhoodTable, output_nbrs: NeighborhoodTable, i: int, J: int
) -> TrimmedRanks:
    """Trim both rank vectors of case i to the intersection of neighborhoods."""
    _check_J(J, input_nbrs.n_cases)
    n_i = input_nbrs.neighbors(i, J)
    n_o = output_nbrs.neighbors(i, J)
    inter = np.intersect1d(n_i, n_o, assume_unique=True)
    zeta = inter.size
    mid = (zeta + J + 1) / 2
    U = ((J - zeta) ** 3 - (J - zeta)) / 12

    S = {int(j): mid for j in n_i}
    R_hat = {int(j): mid for j in n_o}
    for j in n_o:
        S.setdefault(int(j), mid)
    for j in n_i:
        R_hat.setdefault(int(j), mid)
    # Recount ranks inside the intersection; the tie-broken global ranks are
    # distinct integers, so sorting them is the (distance, index) order.
    for pos, j in enumerate(inter[np.argsort(input_nbrs.neighbor_rank[i, inter])]):
        S[int(j)] = float(pos + 1)
    for pos, j in enumerate(inter[np.argsort(output_nbrs.neighbor_rank[i, inter])]):
        R_hat[int(j)] = float(pos + 1)

    return TrimmedRanks(
        case=i, J=J, intersection=inter, zeta=int(zeta), S=S, R_hat=R_hat, U=float(U)
    )


def local_rho_output(
    input_nbrs: NeighborhoodTable, output_nbrs: NeighborhoodTable, i: int, J: int
) -> float:
    """Spearman correlation over the output neighborhood of case i."""
    t = trimmed_ranks(input_nbrs, output_nbrs, i, J)
    n_o = output_nbrs.neighbors(i, J)
    d2 = sum(
        (t.S[int(j)] - output_nbrs.neighbor_rank[i, j]) ** 2 for j in n_o
    )
    return 1.0 - 6.0 * (d2 + t.U) / (J * (J * J - 1))


def local_tau_output(
    input_nbrs: NeighborhoodTable, output_nbrs: NeighborhoodTable, i: int, J: int
) -> float:
    """Kendall correlation over the output neighborhood of case i."""
    t = trimmed_ranks(input_nbrs, output_nbrs, i, J)
    n_o = output_nbrs.neighbors(i, J)
    total = 0.0
    for a in range(J):
        for b in range(a + 1, J):
            ja, jb = int(n_o[a]), int(n_o[b])
            ds = t.S[ja] - t.S[jb]
            dr = output_nbrs.neighbor_rank[i, ja] - output_nbrs.neighbor_rank[i, jb]
            total += 2.0 * np.sign(ds * dr)
    return total / (J * (J - 1))


def local_rho_input(
    input_nbrs: NeighborhoodTable, output_nbrs: NeighborhoodTable, i: int, J: int
) -> float:
    """Spearman correlation over the input neighborhood of case i."""
    t = trimmed_ranks(input_nbrs, output_nbrs, i, J)
    n_i = input_nbrs.neighbors(i, J)
    d2 = sum(
        (input_nbrs.neighbor_rank[i, j] - t.R_hat[int(j)]) ** 2 for j in n_i
    )
    return 1.0 - (d2 + t.U) / ((J**3 - J) / 6.0)


def local_tau_input(
    input_nbrs: NeighborhoodTable, output_nbrs: NeighborhoodTable, i: int, J: int
) -> float:
    """Kendall correlation over the input neighborhood of case i."""
    t = trimmed_ranks(input_nbrs, output_nbrs, i, J)
    n_i = input_nbrs.neighbors(i, J)
    total = 0.0
    for a in range(J):
        for b in range(a + 1, J):
            ja, jb = int(n_i[a]), int(n_i[b])
            dr = t.R_hat[ja] - t.R_hat[jb]
            ds = input_nbrs.neighbor_rank[i, ja] - input_nbrs.neighbor_rank[i, jb]
            total += np.sign(dr * ds)
    return total / (J * (J - 1) / 2.0)


LOCAL_MEASURES = {
    "rho_I": local_rho_input,
    "rho_O": local_rho_output,
    "tau_I": local_tau_input,
    "tau_O": local_tau_output,
}


@dataclass(frozen=True)
class LocalScoreVector:
    measure_kind: str
    J: int
    scores: np.ndarray  # (n,) float64

    @property
    def mean(self) -> float:
        return float(np.mean(self.scores))


@dataclass(frozen=True)
class GoodnessScore:
    """Mean of one local measure over all cases, optionally affine-adjusted."""

    measure_kind: str
    J: int
    value: float
    adjusted: bool = False
    local: LocalScoreVector | None = field(default=None, repr=False, compare=False)


def batch_local_scores(
    input_nbrs: NeighborhoodTable, output_nbrs: NeighborhoodTable, J: int
) -> dict[str, np.ndarray]:
    """All four local score vectors at once, vectorized over cases.

    Equivalent to looping the per-case functions over i, but the O(n) work
    runs as whole-array operations so the n x n distance and rank tables
    dominate the cost.
    """
    n = input_nbrs.n_cases
    if output_nbrs.n_cases != n:
        raise ValidationError(
            f"case-count mismatch: input has {n}, output has {output_nbrs.n_cases}"
        )
    _check_J(J, n)
    if J > input_nbrs.j_max or J > output_nbrs.j_max:
        raise ValidationError(
            f"J={J} exceeds table J_max ({input_nbrs.j_max}, {output_nbrs.j_max})"
        )

    n_i = input_nbrs.neighbor_index[:, :J]
    n_o = output_nbrs.neighbor_index[:, :J]
    # Input ranks of output neighbors and vice versa; column m of n_o holds
    # the output-rank-(m+1) neighbor, so the raw rank grids are implicit.
    r_in_at_o = np.take_along_axis(input_nbrs.neighbor_rank, n_o, axis=1)
    r_out_at_i = np.take_along_axis(output_nbrs.neighbor_rank, n_i, axis=1)
    member_o = r_in_at_o <= J  # output neighbors that are also input neighbors
    member_i = r_out_at_i <= J
    zeta = member_o.sum(axis=1)
    mid = (zeta + J + 1) / 2.0
    U = ((J - zeta) ** 3 - (J - zeta)) / 12.0

    def trimmed(grid: np.ndarray, member: np.ndarray) -> np.ndarray:
        # Rank intersection members 1..zeta by their rank in the other
        # space; argsort of argsort turns distinct keys into positions.
        key = np.where(member, grid, n + 1)
        pos = np.argsort(np.argsort(key, axis=1, kind="stable"), axis=1, kind="stable") + 1
        return np.where(member, pos, mid[:, None])

    S_on_o = trimmed(r_in_at_o, member_o)  # trimmed input ranks, output nbhd
    R_on_i = trimmed(r_out_at_i, member_i)  # trimmed output ranks, input nbhd
    raw = np.arange(1, J + 1, dtype=np.float64)

    denom_rho = J * (J * J - 1) / 6.0
    rho_O = 1.0 - (((S_on_o - raw) ** 2).sum(axis=1) + U) / denom_rho
    rho_I = 1.0 - (((raw - R_on_i) ** 2).sum(axis=1) + U) / denom_rho

    # Raw ranks increase along the grid, so each pair's sign reduces to the
    # sign of the trimmed-rank difference.
    a, b = np.triu_indices(J, k=1)
    pair_scale = 2.0 / (J * (J - 1))
    tau_O = np.sign(S_on_o[:, b] - S_on_o[:, a]).sum(axis=1) * pair_scale
    tau_I = np.sign(R_on_i[:, b] - R_on_i[:, a]).sum(axis=1) * pair_scale

    return {"rho_I": rho_I, "rho_O": rho_O, "tau_I": tau_I, "tau_O": tau_O}


def local_scores(measure_kind: str, X, Yhat, J: int) -> LocalScoreVector:
    """Per-case scores of one measure for embedding Yhat of data X."""
    _check_kind(measure_kind)
    X = validate_data(X, "X")
    Y = validate_data(Yhat, "Yhat")
    if X.shape[0] != Y.shape[0]:
        raise ValidationError(
            f"case-count mismatch: X has {X.shape[0]} rows, Yhat has {Y.shape[0]}"
        )
    _check_J(J, X.shape[0])
    scores = batch_local_scores(
        build_neighborhoods(X, J), build_neighborhoods(Y, J), J
    )[measure_kind]
    return LocalScoreVector(measure_kind=measure_kind, J=J, scores=scores)


def goodness(measure_kind: str, X, Yhat, J: int) -> GoodnessScore:
    """Overall goodness: the mean of one local measure over all cases."""
    local = local_scores(measure_kind, X, Yhat, J)
    return GoodnessScore(
        measure_kind=measure_kind, J=J, value=local.mean, adjusted=False, local=local
    )


def evaluate(X, Yhat, J: int, adjusted: bool = False) -> dict[str, GoodnessScore]:
    """All four goodness measures, sharing one pair of neighbor tables.

    With ``adjusted=True`` the affine correction is fitted once and applied
    before scoring (for output-normalized methods).
    """
    X = validate_data(X, "X")
    Y = validate_data(Yhat, "Yhat")
    if X.shape[0] != Y.shape[0]:
        raise ValidationError(
            f"case-count mismatch: X has {X.shape[0]} rows, Yhat has {Y.shape[0]}"
        )
    _check_J(J, X.shape[0])
    if adjusted:
        Y = Y @ fit_affine_adjustment(X, Y, J).A
    per_case = batch_local_scores(build_neighborhoods(X, J), build_neighborhoods(Y, J), J)
    out = {}
    for kind, scores in per_case.items():
        local = LocalScoreVector(measure_kind=kind, J=J, scores=scores)
        out[kind] = GoodnessScore(
            measure_kind=kind, J=J, value=local.mean, adjusted=adjusted, local=local
        )
    return out


@dataclass(frozen=True)
class AffineAdjustment:
    """Right-multiplier A restoring local distance structure of an embedding.

    ``residual`` is the attained value of the least-squares objective; it
    never exceeds the objective at A = I.  ``degenerate`` marks embeddings
    with no local variation, for which A is the identity.
    """

    q: int
    A: np.ndarray
    residual: float
    degenerate: bool = False


def _adjustment_objective(dx2: np.ndarray, u: np.ndarray, M: np.ndarray) -> float:
    return float(np.sum((dx2 - np.einsum("ij,jk,ik->i", u, M, u)) ** 2))


def fit_affine_adjustment(X, Yhat, J: int) -> AffineAdjustment:
    """Fit A so that A'A best matches squared input distances over input
    neighborhoods.

    The objective is linear in M = A'A, so the symmetric M is found by
    ordinary least squares, projected onto the PSD cone by clipping negative
    eigenvalues, and A taken as the symmetric square root.  If the projected
    solution scores worse than the identity (or the embedding is
    degenerate), the identity is returned instead.
    """
    X = validate_data(X, "X")
    Y = validate_data(Yhat, "Yhat")
    n, q = Y.shape
    if X.shape[0] != n:
        raise ValidationError(
            f"case-count mismatch: X has {X.shape[0]} rows, Yhat has {n}"
        )
    _check_J(J, n)

    nbrs = build_neighborhoods(X, J)
    src = np.repeat(np.arange(n), J)
    dst = nbrs.neighbor_index[:, :J].ravel()
    u = Y[src] - Y[dst]
    dx = X[src] - X[dst]
    dx2 = np.einsum("ij,ij->i", dx, dx)

    identity_residual = _adjustment_objective(dx2, u, np.eye(q))
    if not np.any(np.abs(u) > 0):
        warnings.warn(
            "embedding has zero local variation; affine adjustment fixed to identity",
            RuntimeWarning,
            stacklevel=2,
        )
        return AffineAdjustment(q=q, A=np.eye(q), residual=identity_residual, degenerate=True)

    # Design matrix over the q(q+1)/2 free entries of symmetric M.
    diag_cols = [u[:, a] * u[:, a] for a in range(q)]
    off_cols = [2.0 * u[:, a] * u[:, b] for a in range(q) for b in range(a + 1, q)]
    design = np.column_stack(diag_cols + off_cols)
    coef, *_ = np.linalg.lstsq(design, dx2, rcond=None)

    M = np.zeros((q, q))
    M[np.diag_indices(q)] = coef[:q]
    k = q
    for a in range(q):
        for b in range(a + 1, q):
            M[a, b] = M[b, a] = coef[k]
            k += 1

    eigval, eigvec = np.linalg.eigh(M)
    eigval = np.clip(eigval, 0.0, None)
    A = (eigvec * np.sqrt(eigval)) @ eigvec.T
    residual = _adjustment_objective(dx2, u, (eigvec * eigval) @ eigvec.T)

    if residual > identity_residual:
        return AffineAdjustment(q=q, A=np.eye(q), residual=identity_residual)
    return AffineAdjustment(q=q, A=A, residual=residual)


def goodness_adjusted(measure_kind: str, X, Yhat, J: int) -> GoodnessScore:
    """Goodness of the affine-adjusted configuration Yhat @ A."""
    _check_kind(measure_kind)
    X = validate_data(X, "X")
    Y = validate_data(Yhat, "Yhat")
    adj = fit_affine_adjustment(X, Y, J)
    base = goodness(measure_kind, X, Y @ adj.A, J)
    return GoodnessScore(
        measure_kind=measure_kind,
        J=J,
        value=base.value,
        adjusted=True,
        local=base.local,
    )
