"""Command-line front end: generate | reduce | evaluate | sweep.

Every run is a pure function of its flags; the only randomness enters
through ``generate --seed``.  Scores are printed with 3 decimals while
output files keep full precision.  Exit codes: 0 success, 2 invalid
parameters or data, 3 malformed files, 4 numerical failures (e.g. a
disconnected neighbor graph).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import KINDS, ManifoldSpec, generate
from .errors import FormatError, NumericalError, ValidationError
from .matrixio import read_matrix, write_matrix
from .rankcorr import MEASURES, evaluate
from .reducers import OUTPUT_NORMALIZED, ReducerConfig, reduce
from .sweeps import (
    SCHEMA_VERSION,
    curve_to_dict,
    select_dim,
    select_J,
    select_K,
    sweep_dim,
    sweep_J,
    sweep_K,
    write_curve_csv,
    write_curve_json,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_FORMAT = 3
EXIT_NUMERICAL = 4

_MEASURE_FLAGS = {"rho-i": "rho_I", "rho-o": "rho_O", "tau-i": "tau_I", "tau-o": "tau_O"}


def _limit_threads(threads: int | None) -> None:
    # Caps the BLAS pools; the rank computations themselves are sequential,
    # so results do not depend on this.
    if threads is None:
        return
    if threads < 1:
        raise ValidationError(f"--threads must be >= 1, got {threads}")
    try:
        import threadpoolctl
    except ImportError:
        return
    threadpoolctl.threadpool_limits(limits=threads)


def _measure_list(flag: str) -> list[str]:
    if flag == "all":
        return list(MEASURES)
    return [_MEASURE_FLAGS[flag]]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="localrank",
        description="Rank-based neighborhood fidelity scores for low-dimensional embeddings.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic benchmark dataset")
    gen.add_argument("--kind", required=True, choices=KINDS)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--noise-sd", type=float, default=0.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--ambient-dim", type=int, help="noisy-flat only")
    gen.add_argument("--latent-dim", type=int, help="noisy-flat only")
    gen.add_argument("--output", required=True)
    gen.add_argument("--latent-output", help="also write the latent coordinates")
    gen.add_argument("--colors-output", help="also write the plotting color column")
    gen.add_argument("--format", choices=("csv", "binary"), default=None)
    gen.add_argument("--threads", type=int, default=None)

    red = sub.add_parser("reduce", help="embed a dataset with PCA, Isomap, or LTSA")
    red.add_argument("--input", required=True)
    red.add_argument("--method", required=True, choices=("pca", "isomap", "ltsa", "external"))
    red.add_argument("--q", type=int, required=True)
    red.add_argument("--k", type=int, help="neighborhood size for isomap/ltsa")
    red.add_argument("--external-path", help="embedding file for --method external")
    red.add_argument("--output", required=True)
    red.add_argument("--format", choices=("csv", "binary"), default=None)
    red.add_argument("--threads", type=int, default=None)

    ev = sub.add_parser("evaluate", help="score an embedding against its input data")
    ev.add_argument("--input", required=True)
    ev.add_argument("--embedding", required=True)
    ev.add_argument("--j", type=int, default=6)
    ev.add_argument("--measure", choices=tuple(_MEASURE_FLAGS) + ("all",), default="all")
    ev.add_argument("--adjusted", action="store_true", help="fit the affine correction first")
    ev.add_argument("--per-case", action="store_true", help="include per-case score vectors")
    ev.add_argument("--output", help="write a report file")
    ev.add_argument("--format", choices=("csv", "json"), default=None)
    ev.add_argument("--threads", type=int, default=None)

    sw = sub.add_parser("sweep", help="J-stability, K-tuning, or dimension sweeps")
    sw.add_argument("--kind", required=True, choices=("j", "k", "dim"))
    sw.add_argument("--input", required=True)
    sw.add_argument("--embedding", help="fixed embedding (J sweep only)")
    sw.add_argument("--method", choices=("pca", "isomap", "ltsa"))
    sw.add_argument("--q", type=int, help="target dimension (k sweep)")
    sw.add_argument("--k", type=int, help="graph size (dim sweep)")
    sw.add_argument("--j", type=int, default=6, help="J used to score embeddings (k/dim sweeps)")
    sw.add_argument("--j-min", type=int)
    sw.add_argument("--j-max", type=int)
    sw.add_argument("--k-min", type=int)
    sw.add_argument("--k-max", type=int)
    sw.add_argument("--q-min", type=int)
    sw.add_argument("--q-max", type=int)
    sw.add_argument("--measure", choices=tuple(_MEASURE_FLAGS), default="rho-i")
    sw.add_argument("--adjusted", action="store_true")
    sw.add_argument("--window", type=int, default=4, help="stability window (J sweep)")
    sw.add_argument("--tol", type=float, default=0.02, help="stability/plateau tolerance")
    sw.add_argument("--output", help="write the curve file")
    sw.add_argument("--format", choices=("csv", "json"), default=None)
    sw.add_argument("--threads", type=int, default=None)

    return parser


def _cmd_generate(args) -> int:
    spec = ManifoldSpec(
        kind=args.kind,
        n=args.n,
        noise_sd=args.noise_sd,
        ambient_dim=args.ambient_dim,
        latent_dim=args.latent_dim,
        seed=args.seed,
    )
    data = generate(spec)
    write_matrix(args.output, data.X, fmt=args.format)
    if args.latent_output:
        write_matrix(args.latent_output, data.latent, fmt=args.format)
    if args.colors_output:
        write_matrix(args.colors_output, data.colors.reshape(-1, 1), fmt=args.format)
    print(f"generated {spec.kind}: n={data.X.shape[0]} p={data.X.shape[1]} seed={spec.seed}")
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_reduce(args) -> int:
    X = read_matrix(args.input)
    config = ReducerConfig(
        method=args.method, q=args.q, K=args.k, external_path=args.external_path
    )
    embedding = reduce(X, config)
    write_matrix(args.output, embedding.values, fmt=args.format)
    n, q = embedding.values.shape
    print(f"reduced {args.input} with {args.method}: n={n} q={q}")
    if args.method in OUTPUT_NORMALIZED:
        print(
            "note: output is eigenvector-normalized; evaluate with --adjusted "
            "for meaningful scores"
        )
    eigvals = embedding.diagnostics.get("eigenvalues")
    if eigvals is not None:
        shown = ", ".join(f"{v:.4g}" for v in np.asarray(eigvals)[: args.q + 2])
        print(f"leading eigenvalues: {shown}")
    print(f"wrote {args.output}")
    return EXIT_OK


def _evaluation_report(args, scores, kinds) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "J": args.j,
        "adjusted": args.adjusted,
        "scores": {kind: scores[kind].value for kind in kinds},
    }
    if args.per_case:
        report["per_case"] = {
            kind: [float(v) for v in scores[kind].local.scores] for kind in kinds
        }
    return report


def _cmd_evaluate(args) -> int:
    X = read_matrix(args.input)
    Y = read_matrix(args.embedding)
    scores = evaluate(X, Y, args.j, adjusted=args.adjusted)
    kinds = _measure_list(args.measure)

    label = "adjusted " if args.adjusted else ""
    print(f"{label}goodness at J={args.j}:")
    for kind in kinds:
        print(f"  {kind}: {scores[kind].value:.3f}")

    if args.output:
        fmt = args.format or ("json" if Path(args.output).suffix == ".json" else "csv")
        if fmt == "json":
            with open(args.output, "w", encoding="utf-8") as fh:
                json.dump(_evaluation_report(args, scores, kinds), fh, indent=2)
                fh.write("\n")
        else:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write("measure,J,adjusted,value\n")
                for kind in kinds:
                    fh.write(f"{kind},{args.j},{int(args.adjusted)},{scores[kind].value:.17g}\n")
                if args.per_case:
                    fh.write("case," + ",".join(kinds) + "\n")
                    per = np.column_stack([scores[k].local.scores for k in kinds])
                    for case, row in enumerate(per):
                        fh.write(f"{case}," + ",".join(f"{v:.17g}" for v in row) + "\n")
        print(f"wrote {args.output}")
    return EXIT_OK


def _grid_from_args(lo, hi, name: str) -> range:
    if lo is None or hi is None:
        raise ValidationError(f"sweep --kind {name} needs --{name}-min and --{name}-max")
    if hi < lo:
        raise ValidationError(f"--{name}-max must be >= --{name}-min")
    return range(lo, hi + 1)


def _cmd_sweep(args) -> int:
    X = read_matrix(args.input)
    measure = _MEASURE_FLAGS[args.measure]

    if args.kind == "j":
        if not args.embedding:
            raise ValidationError("sweep --kind j needs --embedding")
        Y = read_matrix(args.embedding)
        grid = _grid_from_args(args.j_min, args.j_max, "j")
        curve = sweep_J(X, Y, grid, adjusted=args.adjusted)
        selection = select_J(
            curve, stability_window=args.window, stability_tol=args.tol, measure=measure
        )
    else:
        if not args.method:
            raise ValidationError(f"sweep --kind {args.kind} needs --method")
        adjusted = True if args.adjusted else None
        if args.kind == "k":
            if args.q is None:
                raise ValidationError("sweep --kind k needs --q")
            config = ReducerConfig(method=args.method, q=args.q, K=args.k_min or 1)
            curve = sweep_K(
                X, config, _grid_from_args(args.k_min, args.k_max, "k"), args.j, adjusted
            )
            selection = select_K(curve, measure=measure)
        else:
            if args.method != "pca" and args.k is None:
                raise ValidationError(f"sweep --kind dim with {args.method} needs --k")
            config = ReducerConfig(method=args.method, q=1, K=args.k)
            curve = sweep_dim(
                X, config, _grid_from_args(args.q_min, args.q_max, "q"), args.j, adjusted
            )
            selection = select_dim(curve, plateau_tol=args.tol, measure=measure)

    print(f"{curve.parameter_name} sweep over {curve.grid[0]}..{curve.grid[-1]} "
          f"(measure {measure}{', adjusted' if curve.adjusted else ''}):")
    for g, value in enumerate(curve.grid):
        cells = " ".join(f"{kind}={curve.scores[kind][g]:.3f}" for kind in MEASURES)
        print(f"  {curve.parameter_name}={value}: {cells}")
    status = "" if selection.found else " (no stable window; suggestion only)"
    print(f"selected {curve.parameter_name}={selection.chosen_value}{status}")
    print(f"rule: {selection.rule}")

    if args.output:
        fmt = args.format or ("json" if Path(args.output).suffix == ".json" else "csv")
        if fmt == "json":
            write_curve_json(curve, args.output, selection)
        else:
            write_curve_csv(curve, args.output)
        print(f"wrote {args.output}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _limit_threads(args.threads)
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "reduce":
            return _cmd_reduce(args)
        if args.command == "evaluate":
            return _cmd_evaluate(args)
        return _cmd_sweep(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
