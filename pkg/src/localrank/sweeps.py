"""Parameter sweeps that turn goodness scores into decisions.

Three procedures: pick the neighborhood size J for the measures themselves
(largest J over which the curve is stable), pick the K-NN graph size for a
reducer (argmax of the curve), and estimate intrinsic dimensionality (the
smallest q beyond which the curve plateaus, a scree plot read in reverse).

The stability rules the plots suggest are formalized with explicit
window/tolerance parameters, and every sweep returns the full curve so a
human can overrule the automatic choice.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from .errors import DisconnectedGraphError, NumericalError, ValidationError
from .geometry import build_neighborhoods, validate_data
from .rankcorr import MEASURES, batch_local_scores, evaluate, fit_affine_adjustment
from .reducers import OUTPUT_NORMALIZED, ReducerConfig, reduce

SCHEMA_VERSION = 1

DEFAULT_MEASURE = "rho_I"  # Spearman is cheaper than Kendall and the four move together
DEFAULT_STABILITY_WINDOW = 4
DEFAULT_STABILITY_TOL = 0.02
DEFAULT_PLATEAU_TOL = 0.02


@dataclass(frozen=True)
class SweepCurve:
    """One goodness quadruple per grid point; NaN marks a failed point."""

    parameter_name: str  # "J", "K", or "q"
    grid: tuple[int, ...]
    scores: dict[str, np.ndarray]
    adjusted: bool = False

    def measure(self, kind: str) -> np.ndarray:
        if kind not in self.scores:
            raise ValidationError(f"unknown measure kind {kind!r}")
        return self.scores[kind]


@dataclass(frozen=True)
class SelectionResult:
    chosen_value: int
    rule: str
    curve: SweepCurve
    found: bool = True


def _check_grid(grid, lo: int, hi: int, name: str) -> tuple[int, ...]:
    grid = tuple(int(g) for g in grid)
    if not grid:
        raise ValidationError(f"{name} grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError(f"{name} grid must be strictly ascending, got {grid}")
    if grid[0] < lo or grid[-1] > hi:
        raise ValidationError(f"{name} grid must lie within [{lo}, {hi}], got {grid}")
    return grid


def sweep_J(X, Yhat, grid, adjusted: bool = False) -> SweepCurve:
    """Evaluate all four measures at every J in the grid."""
    X = validate_data(X, "X")
    Y = validate_data(Yhat, "Yhat")
    if X.shape[0] != Y.shape[0]:
        raise ValidationError(
            f"case-count mismatch: X has {X.shape[0]} rows, Yhat has {Y.shape[0]}"
        )
    n = X.shape[0]
    grid = _check_grid(grid, 2, n - 1, "J")

    scores = {kind: np.empty(len(grid)) for kind in MEASURES}
    if adjusted:
        # The affine fit depends on J, so refit per grid point.
        for g, J in enumerate(grid):
            adj = fit_affine_adjustment(X, Y, J)
            for kind, score in evaluate(X, Y @ adj.A, J).items():
                scores[kind][g] = score.value
    else:
        nbr_x = build_neighborhoods(X, grid[-1])
        nbr_y = build_neighborhoods(Y, grid[-1])
        for g, J in enumerate(grid):
            for kind, vec in batch_local_scores(nbr_x, nbr_y, J).items():
                scores[kind][g] = vec.mean()
    return SweepCurve(parameter_name="J", grid=grid, scores=scores, adjusted=adjusted)


def select_J(
    curve: SweepCurve,
    stability_window: int = DEFAULT_STABILITY_WINDOW,
    stability_tol: float = DEFAULT_STABILITY_TOL,
    measure: str = DEFAULT_MEASURE,
) -> SelectionResult:
    """Largest J whose trailing window of grid points stays within tolerance."""
    if curve.parameter_name != "J":
        raise ValidationError(f"expected a J curve, got {curve.parameter_name}")
    if stability_window < 2:
        raise ValidationError("stability window must cover at least 2 grid points")
    values = curve.measure(measure)
    w = min(stability_window, len(curve.grid))
    for idx in range(len(curve.grid) - 1, w - 2, -1):
        window = values[idx - w + 1 : idx + 1]
        if np.ptp(window) < stability_tol:
            return SelectionResult(
                chosen_value=curve.grid[idx],
                rule=f"largest J with {measure} range < {stability_tol} over {w} trailing points",
                curve=curve,
            )
    return SelectionResult(
        chosen_value=curve.grid[0],
        rule=f"no stable window found ({measure} range >= {stability_tol} everywhere); "
        "smallest grid value suggested",
        curve=curve,
        found=False,
    )


def _sweep_embeddings(X, configs, J: int, parameter_name: str, grid, adjusted):
    scores = {kind: np.full(len(grid), np.nan) for kind in MEASURES}
    for g, config in enumerate(configs):
        try:
            embedding = reduce(X, config)
        except DisconnectedGraphError:
            continue  # recorded as a missing grid point
        use_adjusted = (config.method in OUTPUT_NORMALIZED) if adjusted is None else adjusted
        for kind, score in evaluate(X, embedding.values, J, adjusted=use_adjusted).items():
            scores[kind][g] = score.value
    effective_adjusted = (
        (configs[0].method in OUTPUT_NORMALIZED) if adjusted is None else adjusted
    )
    return SweepCurve(
        parameter_name=parameter_name, grid=grid, scores=scores, adjusted=effective_adjusted
    )


def sweep_K(X, config: ReducerConfig, k_grid, J: int, adjusted: bool | None = None) -> SweepCurve:
    """Re-run a graph-based reducer over a K grid and score each embedding.

    Grid points whose neighbor graph is disconnected are recorded as missing
    (NaN), not raised.  Embeddings are recomputed from scratch per point.
    """
    X = validate_data(X, "X")
    if config.method not in ("isomap", "ltsa"):
        raise ValidationError(f"K sweep needs a graph-based method, got {config.method!r}")
    grid = _check_grid(k_grid, 1, X.shape[0] - 1, "K")
    configs = [dataclasses.replace(config, K=k) for k in grid]
    return _sweep_embeddings(X, configs, J, "K", grid, adjusted)


def select_K(curve: SweepCurve, measure: str = DEFAULT_MEASURE) -> SelectionResult:
    """argmax of the chosen measure; ties resolve to the smaller K."""
    if curve.parameter_name != "K":
        raise ValidationError(f"expected a K curve, got {curve.parameter_name}")
    values = curve.measure(measure)
    if np.isnan(values).all():
        raise NumericalError("every K in the grid produced a disconnected graph")
    idx = int(np.nanargmax(values))
    return SelectionResult(
        chosen_value=curve.grid[idx],
        rule=f"argmax of {measure} (ties to smaller K)",
        curve=curve,
    )


def sweep_dim(X, config: ReducerConfig, q_grid, J: int, adjusted: bool | None = None) -> SweepCurve:
    """Score one reducer across target dimensions."""
    X = validate_data(X, "X")
    grid = _check_grid(q_grid, 1, X.shape[1] - 1, "q")
    if config.method == "ltsa" and config.K is not None and config.K <= grid[-1]:
        raise ValidationError(
            f"LTSA needs K >= q+1 for every grid point; K={config.K} vs max q={grid[-1]}"
        )
    configs = [dataclasses.replace(config, q=q) for q in grid]
    return _sweep_embeddings(X, configs, J, "q", grid, adjusted)


def select_dim(
    curve: SweepCurve,
    plateau_tol: float = DEFAULT_PLATEAU_TOL,
    measure: str = DEFAULT_MEASURE,
) -> SelectionResult:
    """Smallest q beyond which the curve stays within plateau_tol of itself."""
    if curve.parameter_name != "q":
        raise ValidationError(f"expected a q curve, got {curve.parameter_name}")
    values = curve.measure(measure)
    valid = ~np.isnan(values)
    if not valid.any():
        raise NumericalError("every q in the grid failed to produce an embedding")
    for idx in range(len(curve.grid)):
        if not valid[idx]:
            continue
        rest = values[idx + 1 :]
        rest = rest[~np.isnan(rest)]
        if np.all(np.abs(rest - values[idx]) < plateau_tol):
            return SelectionResult(
                chosen_value=curve.grid[idx],
                rule=f"smallest q with all later {measure} values within {plateau_tol}",
                curve=curve,
            )
    # Unreachable: the last valid point always satisfies the rule vacuously.
    raise AssertionError("plateau scan found no candidate")


def write_curve_csv(curve: SweepCurve, path) -> None:
    """CSV with columns parameter, rho_I, rho_O, tau_I, tau_O."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("parameter,rho_I,rho_O,tau_I,tau_O\n")
        for g, value in enumerate(curve.grid):
            row = [str(value)] + [
                f"{curve.scores[k][g]:.17g}" for k in MEASURES
            ]
            fh.write(",".join(row) + "\n")


def curve_to_dict(curve: SweepCurve, selection: SelectionResult | None = None) -> dict:
    """JSON-ready representation (NaN encoded as null)."""
    def clean(vec):
        return [None if np.isnan(v) else float(v) for v in vec]

    payload = {
        "schema_version": SCHEMA_VERSION,
        "parameter_name": curve.parameter_name,
        "adjusted": curve.adjusted,
        "grid": list(curve.grid),
        "scores": {kind: clean(curve.scores[kind]) for kind in MEASURES},
    }
    if selection is not None:
        payload["selection"] = {
            "chosen_value": selection.chosen_value,
            "rule": selection.rule,
            "found": selection.found,
        }
    return payload


def write_curve_json(curve: SweepCurve, path, selection: SelectionResult | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(curve_to_dict(curve, selection), fh, indent=2)
        fh.write("\n")
