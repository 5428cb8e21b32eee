"""Command-line front end.

    gsscm <verb> [flags]

Verbs: estimate, pca, simulate, influence, coga-check, breakdown. Output is
CSV (or JSON lines for ``estimate --format jsonl``) on ``--output`` or stdout.

Exit status: 0 success, 1 usage error, 2 data error, 3 numeric failure.
Errors are written to stderr as one line ``gsscm: error[<tag>]: <message>``.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io as gio
from .coga import EIGEN_SETTINGS, wh_experiment
from .errors import GsscmError
from .influence import DIRECTIONS, if_grid
from .pca import fit_pca, outlier_map
from .radial import RadialMethod
from .rng import DEFAULT_SEED
from .scatter import consistency_factor, gsscm, symmetrized_gsscm
from .sim import RECORD_COLUMNS, StudyGrid, breakdown_experiment, parse_study_config, run_study

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

METHODS = [m.value for m in RadialMethod]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; 2 is reserved for data errors here
    def error(self, message):
        raise UsageError(message)


def _on_off(text):
    v = text.strip().lower()
    if v in ("on", "true", "yes", "1"):
        return True
    if v in ("off", "false", "no", "0"):
        return False
    raise argparse.ArgumentTypeError(f"expected on or off, got {text!r}")


def _u64(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def parse_location(text):
    """``lts``, ``spatial``, ``mean`` or ``fixed=v1,v2,...``."""
    t = text.strip()
    if t in ("lts", "spatial", "mean"):
        return t
    if t.startswith("fixed="):
        try:
            vals = [float(v) for v in t[len("fixed=") :].split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad fixed location {text!r}") from None
        if not vals or not np.all(np.isfinite(vals)):
            raise argparse.ArgumentTypeError(f"bad fixed location {text!r}")
        return np.array(vals)
    raise argparse.ArgumentTypeError(f"location must be lts, spatial, mean or fixed=v1,v2,...; got {text!r}")


def parse_grid(text):
    """Either a comma list ``a,b,c`` or ``start:stop:num`` (inclusive linspace)."""
    try:
        if ":" in text:
            a, b, num = text.split(":")
            return [float(v) for v in np.linspace(float(a), float(b), int(num))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad value grid {text!r}") from None


def parse_int_range(text):
    """``1-20`` or ``2,5,10``."""
    try:
        out = []
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                a, b = part.split("-")
                out.extend(range(int(a), int(b) + 1))
            elif part:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty integer range")
    return out


def _method_list(text):
    items = [v.strip() for v in text.split(",") if v.strip()]
    for v in items:
        if v not in METHODS:
            raise argparse.ArgumentTypeError(f"unknown method {v!r}; choose from {', '.join(METHODS)}")
    return tuple(items)


def build_parser():
    parser = _Parser(prog="gsscm", description="Generalized spatial sign covariance matrices.")
    sub = parser.add_subparsers(dest="verb", metavar="verb", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("estimate", help="scatter matrix, eigenvalues and location of a data CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default="-")
    p.add_argument("--method", choices=METHODS, default="winsor")
    p.add_argument("--location", type=parse_location, default=None, help="default lts")
    p.add_argument("--k", type=_nonneg_int, default=None, help="C-steps for the LTS location (default 5)")
    p.add_argument("--symmetrize", action="store_true", help="use pairwise differences (no location)")
    p.add_argument("--normalize", type=_on_off, default=False, help="divide by the Gaussian consistency factor")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    p = sub.add_parser("pca", help="robust PCA scores and outlier map")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default="-")
    p.add_argument("--map-output", default=None, help="also write the outlier map alone to this path")
    p.add_argument("--components", type=_positive_int, required=True)
    p.add_argument("--method", choices=METHODS, default="winsor")
    p.add_argument("--location", type=parse_location, default="lts")
    p.add_argument("--k", type=_nonneg_int, default=5)
    p.add_argument("--standardization", choices=("auto", "robust", "classical", "none"), default="auto")

    p = sub.add_parser("simulate", help="Monte Carlo study of KL divergences")
    p.add_argument("--config", default=None, help="flat key = value study file")
    p.add_argument("--output", default="-")
    p.add_argument("--seed", type=_u64, default=None)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--normalize", type=_on_off, default=None)
    p.add_argument("--method", type=_method_list, default=None, help="comma list overriding the config")

    p = sub.add_parser("influence", help="bivariate influence function on a grid")
    p.add_argument("--method", type=_method_list, default=tuple(METHODS))
    p.add_argument("--direction", choices=DIRECTIONS, default="diag_xy")
    p.add_argument("--z", type=parse_grid, default=parse_grid("0:10:101"), help="a,b,c or start:stop:num")
    p.add_argument("--normalize", type=_on_off, default=True)
    p.add_argument("--output", default="-")

    p = sub.add_parser("coga-check", help="accuracy of quantile transforms under a gamma convolution")
    p.add_argument("--p", dest="dims", type=parse_int_range, default=parse_int_range("1-20"))
    p.add_argument("--settings", default=",".join(EIGEN_SETTINGS))
    p.add_argument("--samples", type=_positive_int, default=100_000)
    p.add_argument("--prob", type=float, default=0.75)
    p.add_argument("--mad-scaled", type=_on_off, default=True)
    p.add_argument("--seed", type=_u64, default=DEFAULT_SEED)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--output", default="-")

    p = sub.add_parser("breakdown", help="empirical breakdown of one estimator")
    p.add_argument("--n", type=_positive_int, default=100)
    p.add_argument("--p", dest="dim", type=_positive_int, default=10)
    p.add_argument("--m", type=_nonneg_int, required=True, help="number of replaced observations")
    p.add_argument("--magnitude", type=float, default=1e8)
    p.add_argument("--method", type=_method_list, default=("winsor",))
    p.add_argument("--placement", choices=("spread", "part2"), default="spread")
    p.add_argument("--k", type=_nonneg_int, default=5)
    p.add_argument("--seed", type=_u64, default=DEFAULT_SEED)
    p.add_argument("--output", default="-")
    return parser


def _cutoffs_dict(cut):
    return None if cut is None else {"q1": cut.q1, "q2": cut.q2, "q3": cut.q3, "q3star": cut.q3star}


def _estimate_csv(est):
    p = est.p
    header = ["kind", "row"] + [f"v{j + 1}" for j in range(p)]
    lines = [",".join(header)]

    def emit(kind, idx, vec):
        lines.append(",".join([kind, str(idx)] + [gio.fmt(float(v)) for v in vec]))

    for i in range(p):
        emit("matrix", i, est.matrix[i])
    emit("eigenvalues", 0, est.eigenvalues)
    for i in range(p):
        # row i holds eigenvector i
        emit("eigenvector", i, est.eigenvectors[:, i])
    emit("location", 0, est.location)
    return "\n".join(lines) + "\n"


def _estimate_jsonl(est):
    rec = {
        "method": est.method.value,
        "matrix": est.matrix.tolist(),
        "eigenvalues": est.eigenvalues.tolist(),
        "eigenvectors": est.eigenvectors.T.tolist(),
        "location": est.location.tolist(),
        "cutoffs": _cutoffs_dict(est.cutoffs),
    }
    return json.dumps(rec) + "\n"


def cmd_estimate(args):
    X = gio.read_csv_matrix(args.input)
    if args.symmetrize:
        if args.location is not None or args.k is not None:
            raise UsageError("--symmetrize takes no --location or --k")
        est = symmetrized_gsscm(X, args.method)
    else:
        location = "lts" if args.location is None else args.location
        k = 5 if args.k is None else args.k
        if k != 5 and not (isinstance(location, str) and location == "lts"):
            raise UsageError("--k only applies to the lts location")
        est = gsscm(X, args.method, location=location, k=k)
    if args.normalize:
        # pairwise differences have twice the covariance; the SSCM is scale free
        doubled = args.symmetrize and est.method is not RadialMethod.SSCM
        factor = consistency_factor(est.method, est.p) * (2.0 if doubled else 1.0)
        est = type(est)(
            est.matrix / factor,
            est.eigenvalues / factor,
            est.eigenvectors,
            est.location,
            est.method,
            est.cutoffs,
            est.weights,
        )
    text = _estimate_jsonl(est) if args.format == "jsonl" else _estimate_csv(est)
    gio.write_text(args.output, text)


def cmd_pca(args):
    X = gio.read_csv_matrix(args.input)
    if args.components > X.shape[1]:
        raise UsageError(f"--components {args.components} exceeds the {X.shape[1]} data columns")
    model = fit_pca(
        X, args.components, args.method, standardization=args.standardization, location=args.location, lts_k=args.k
    )
    rows = outlier_map(X, args.components, args.method, model=model)
    S = model.transform(X) @ model.loadings
    cols = ["index"] + [f"score{j + 1}" for j in range(model.k)] + ["sd", "od", "sd_cutoff", "od_cutoff", "flag"]
    lines = [",".join(cols)]
    for r in rows:
        vals = [str(r.index)] + [gio.fmt(float(v)) for v in S[r.index]]
        vals += [gio.fmt(r.sd), gio.fmt(r.od), gio.fmt(r.sd_cutoff), gio.fmt(r.od_cutoff), r.flag]
        lines.append(",".join(vals))
    gio.write_text(args.output, "\n".join(lines) + "\n")
    if args.map_output:
        gio.write_text(args.map_output, gio.records_to_csv(rows))


def cmd_simulate(args):
    if args.config is not None:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except FileNotFoundError:
            raise FileNotFoundError(f"config file not found: {args.config}") from None
        try:
            grid = parse_study_config(text)
        except (ValueError, KeyError) as exc:
            raise UsageError(f"bad study config: {exc}") from None
    else:
        grid = StudyGrid()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.normalize is not None:
        overrides["normalize"] = args.normalize
    if args.method is not None:
        overrides["methods"] = args.method
    if overrides:
        grid = StudyGrid(**{**{f: getattr(grid, f) for f in grid.__dataclass_fields__ if f != "extra"}, **overrides})
    try:
        cells = grid.cells()
    except ValueError as exc:
        raise UsageError(f"bad study config: {exc}") from None
    records = run_study(cells, threads=args.threads)
    gio.write_text(args.output, gio.records_to_csv(records, RECORD_COLUMNS))


def cmd_influence(args):
    rows = []
    for m in args.method:
        rows.extend(if_grid(m, args.direction, args.z, p=2, normalize=args.normalize))
    gio.write_text(args.output, gio.records_to_csv(rows, ["z", "method", "s11", "s12", "s22", "normalized"]))


def cmd_coga_check(args):
    settings = [s.strip() for s in args.settings.split(",") if s.strip()]
    for s in settings:
        if s not in EIGEN_SETTINGS:
            raise UsageError(f"unknown eigenvalue setting {s!r}; choose from {', '.join(EIGEN_SETTINGS)}")
    if not 0 < args.prob < 1:
        raise UsageError("--prob must lie in (0, 1)")
    rows = wh_experiment(
        args.dims,
        settings,
        n_samples=args.samples,
        seed=args.seed,
        prob=args.prob,
        mad_scaled=args.mad_scaled,
        threads=args.threads,
    )
    gio.write_text(args.output, gio.records_to_csv(rows, ["p", "setting", "transform", "f_coga_at_q3sq", "seed"]))


def cmd_breakdown(args):
    if args.m >= args.n:
        raise UsageError("--m must be smaller than --n")
    recs = [
        breakdown_experiment(
            args.n, args.dim, args.m, args.magnitude, method=m, seed=args.seed, placement=args.placement, lts_k=args.k
        )
        for m in args.method
    ]
    gio.write_text(args.output, gio.records_to_csv(recs))


COMMANDS = {
    "estimate": cmd_estimate,
    "pca": cmd_pca,
    "simulate": cmd_simulate,
    "influence": cmd_influence,
    "coga-check": cmd_coga_check,
    "breakdown": cmd_breakdown,
}


def _fail(tag, message, code):
    sys.stderr.write(f"gsscm: error[{tag}]: {' '.join(str(message).split())}\n")
    return code


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.verb](args)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except GsscmError as exc:
        return _fail(exc.tag, exc, exc.exit_code)
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        return _fail("io", exc, EXIT_DATA)
    except ValueError as exc:
        return _fail("invalid-input", exc, EXIT_DATA)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail("numeric", exc, EXIT_NUMERIC)
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
