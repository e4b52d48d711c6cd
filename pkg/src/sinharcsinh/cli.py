"""Command-line front-end.

Exit codes: 0 success, 2 I/O error, 3 insufficient data, 4 non-convergence
(the report is still written), 5 bad flags or parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import asymmetry, diagnostics, inference, montecarlo
from . import numerics as nx
from ._validation import InsufficientDataError
from .datasets import read_dataset
from .inference import Family, FitReport
from .twopiece import EPS, Parameterisation, TpSasParams, reparameterise

__all__ = ["main", "build_parser", "THREADS_ENV"]

log = logging.getLogger("sinharcsinh")

THREADS_ENV = "SINHARCSINH_THREADS"
EXIT_OK, EXIT_IO, EXIT_DATA, EXIT_CONVERGENCE, EXIT_FLAGS = 0, 2, 3, 4, 5
DEFAULT_P_GRID = "0.01:0.99:0.01"


class UsageError(Exception):
    """Bad flag values detected after parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# output helpers

def write_atomic(path, text: str) -> None:
    """Write ``text`` to a temporary file beside ``path`` and rename it."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _num(v) -> str:
    return f"{float(v):.10g}"


def _sibling(path, suffix: str) -> Path:
    p = Path(path)
    return p.with_name(p.stem + suffix)


def fit_report_json(report: FitReport) -> str:
    # json writes floats with repr, i.e. the shortest exact decimal text
    return json.dumps(report.to_dict(), indent=2, allow_nan=True) + "\n"


def compare_csv(reports) -> str:
    """One row per model, fixed columns whatever the model list."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    slots = ("mu", "sigma", "shape", "delta")
    header = ["rank", "model", "n_params", "converged", "loglik", "aic", "bic", "shape_name"]
    for s in slots:
        header += [s, f"{s}_lo", f"{s}_hi"]
    w.writerow(header + ["error"])
    for rank, r in enumerate(reports, start=1):
        fam = r.family
        shape = next((n for n in fam.param_names if n in ("gamma", "lam", "epsilon")), "")
        row = [rank, fam.value, fam.n_params, int(r.converged), _num(r.loglik), _num(r.aic),
               _num(r.bic), shape]
        for s in slots:
            name = shape if s == "shape" else s
            if name and name in fam.param_names:
                iv = r.intervals.get(name)
                row += [_num(r.estimates[name]),
                        _num(iv.lo) if iv else "", _num(iv.hi) if iv else ""]
            else:
                row += ["", "", ""]
        w.writerow(row + [r.error or ""])
    return buf.getvalue()


def curve_svg(x, y, title: str = "", xlabel: str = "", ylabel: str = "",
              size: int = 480) -> str:
    x, y = np.asarray(x, float), np.asarray(y, float)
    pad = 40
    ylo, yhi = float(min(y.min(), -1.0)), float(max(y.max(), 1.0))
    xlo, xhi = float(x.min()), float(x.max())
    xs = pad + (x - xlo) / ((xhi - xlo) or 1.0) * (size - 2 * pad)
    ys = size - pad - (y - ylo) / ((yhi - ylo) or 1.0) * (size - 2 * pad)
    y0 = size - pad - (0.0 - ylo) / ((yhi - ylo) or 1.0) * (size - 2 * pad)
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(xs, ys))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'<rect width="{size}" height="{size}" fill="white"/>\n'
        f'<rect x="{pad}" y="{pad}" width="{size - 2 * pad}" height="{size - 2 * pad}" '
        f'fill="none" stroke="black"/>\n'
        f'<line x1="{pad}" y1="{y0:.2f}" x2="{size - pad}" y2="{y0:.2f}" stroke="#999999"/>\n'
        f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>\n'
        f'<text x="{size / 2}" y="{pad / 2 + 5}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>\n'
        f'<text x="{size / 2}" y="{size - 8}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12">{xlabel}</text>\n'
        f'<text x="12" y="{size / 2}" font-family="sans-serif" font-size="12">{ylabel}</text>\n'
        "</svg>\n"
    )


# ---------------------------------------------------------------------------
# argument helpers

def parse_params(text: str, family: Family,
                 parameterisation: str = EPS.value) -> tuple[float, ...]:
    """``"0,1,0.25,1.25"`` or ``"mu=0,sigma=1,gamma=0.25,delta=1.25"``.

    Two-piece parameters given in another parameterisation are converted to
    epsilon-skew, the form used everywhere else.
    """
    parts = [p.strip() for p in text.split(",") if p.strip()]
    names = family.param_names
    if family is Family.TPSAS:
        try:
            par = Parameterisation(parameterisation)
        except ValueError:
            raise UsageError(f"unknown parameterisation {parameterisation!r}") from None
        if par is Parameterisation.TWO_SIGMA:
            names = ("mu", "sigma1", "sigma2", "delta")
    try:
        if parts and all("=" in p for p in parts):
            kv = {}
            for p in parts:
                k, v = p.split("=", 1)
                kv[k.strip()] = float(v)
            unknown = set(kv) - set(names)
            missing = [n for n in names if n not in kv]
            if unknown or missing:
                raise UsageError(f"{family.label} parameters are {', '.join(names)}")
            values = [kv[n] for n in names]
        else:
            values = [float(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"bad parameter list {text!r}: {exc}") from None
    if len(values) != len(names):
        raise UsageError(f"{family.label} takes {len(names)} parameters "
                         f"({', '.join(names)}), got {len(values)}")
    if family is Family.TPSAS:
        try:
            p = TpSasParams(*values, parameterisation=par)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        q = reparameterise(p, EPS)
        values = [q.mu, q.sigma, q.gamma, q.delta]
    try:
        inference.distribution(family, values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return tuple(values)


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` (inclusive) or a comma list of probabilities."""
    try:
        if ":" in text:
            a, b, h = (float(v) for v in text.split(":"))
            if h <= 0 or b < a:
                raise ValueError("need start <= stop and step > 0")
            k = int(np.floor((b - a) / h + 1e-9))
            grid = np.round(a + h * np.arange(k + 1), 12)
        else:
            grid = np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise UsageError(f"bad p-grid {text!r}: {exc}") from None
    if grid.size == 0 or np.any((grid <= 0) | (grid >= 1)):
        raise UsageError("p-grid values must lie in (0, 1)")
    return grid


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        env = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"{THREADS_ENV}={env!r} is not an integer") from None
    if n < 1:
        raise UsageError("thread count must be >= 1")
    return n


def _require_seed(args):
    if args.seed is None:
        raise UsageError(f"{args.command} needs an explicit --seed")
    return args.seed


def _load(args):
    ds = read_dataset(args.data, log_transform=args.log)
    return ds.values


def _settings(args) -> nx.OptimizerSettings:
    return nx.OptimizerSettings(max_iterations=args.max_iterations, restarts=args.restarts)


# ---------------------------------------------------------------------------
# commands

def cmd_fit(args) -> int:
    seed = _require_seed(args)
    x = _load(args)
    report = inference.fit_ml(args.model, x, _settings(args), seed=seed,
                              profile=not args.no_intervals)
    print(inference.format_table([report]))
    print(f"loglik {_num(report.loglik)}  n {report.n_obs}")
    if args.out:
        write_atomic(args.out, fit_report_json(report))
    if not report.converged:
        log.error("optimizer did not converge; report written anyway")
        return EXIT_CONVERGENCE
    return EXIT_OK


def cmd_compare(args) -> int:
    seed = _require_seed(args)
    x = _load(args)
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    try:
        models = [Family(m) for m in models]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    reports = inference.compare_models(x, models, _settings(args), seed=seed,
                                       profile=not args.no_intervals)
    table = inference.format_table(reports)
    print(table)
    if args.out:
        write_atomic(args.out, compare_csv(reports))
        write_atomic(_sibling(args.out, ".txt"), table + "\n")
    if any(r.error is None and not r.converged for r in reports):
        return EXIT_CONVERGENCE
    if all(r.error is not None for r in reports):
        return EXIT_DATA
    return EXIT_OK


def cmd_measure(args) -> int:
    fam = Family(args.model)
    theta = parse_params(args.params, fam, args.parameterisation)
    grid = parse_grid(args.p_grid)
    d = asymmetry.unimodal(inference.distribution(fam, theta))
    mode = asymmetry.find_mode(d)
    ag = asymmetry.ag_measure(d, mode)
    curve = asymmetry.cj_curve(d, grid)
    print(f"mode {_num(mode)}")
    print(f"AG {_num(ag)}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("p", "cj"))
    for p, c in zip(curve.p_grid, curve.cj_values):
        w.writerow((_num(p), _num(c)))
    if args.out:
        write_atomic(args.out, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if args.svg:
        write_atomic(args.svg, curve_svg(curve.p_grid, curve.cj_values,
                                         f"{fam.label} CJ", "p", "CJ"))
    return EXIT_OK


def cmd_simulate(args) -> int:
    text = Path(args.config).read_text()
    try:
        scenarios = montecarlo.read_scenarios(text)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{args.config}: {exc}") from None
    threads = _threads(args)
    csv_parts, text_parts = [], []
    failed = 0
    for k, s in enumerate(scenarios):
        if args.seed is not None:
            s = montecarlo.SimScenario(s.true_params, s.sample_sizes, s.n_replicates,
                                       args.seed, s.name)
        if args.replicates is not None:
            s = montecarlo.SimScenario(s.true_params, s.sample_sizes, args.replicates,
                                       s.seed, s.name)
        log.info("scenario %s: %d replicates x %s", s.name, s.n_replicates, s.sample_sizes)
        rep = montecarlo.run_study(s, _settings(args), threads=threads)
        body = rep.to_csv()
        csv_parts.append(body if k == 0 else body.split("\n", 1)[1])
        text_parts.append(rep.to_text())
        failed += sum(int((~c).sum()) for c in rep.converged.values())
    table = "\n\n".join(text_parts)
    print(table)
    if args.out:
        write_atomic(args.out, "".join(csv_parts))
        write_atomic(_sibling(args.out, ".txt"), table + "\n")
    else:
        sys.stdout.write("".join(csv_parts))
    if failed:
        log.warning("%d replicate fit(s) did not converge", failed)
    return EXIT_OK


def cmd_eval(args) -> int:
    fam = Family(args.model)
    theta = parse_params(args.params, fam, args.parameterisation)
    try:
        pts = np.array([float(v) for v in " ".join(args.points).replace(",", " ").split()])
    except ValueError as exc:
        raise UsageError(f"bad point list: {exc}") from None
    if pts.size == 0:
        raise UsageError("no points given")
    fn = {"pdf": inference.pdf, "cdf": inference.cdf, "quantile": inference.quantile,
          "logpdf": inference.logpdf}[args.which]
    try:
        vals = np.atleast_1d(fn(fam, theta, pts))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = "".join(f"{float(v)!r}\n" if args.digits is None else f"{float(v):.{args.digits}g}\n"
                  for v in vals)
    if args.out:
        write_atomic(args.out, out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def cmd_sample(args) -> int:
    seed = _require_seed(args)
    fam = Family(args.model)
    theta = parse_params(args.params, fam, args.parameterisation)
    if args.n < 1:
        raise UsageError("-n must be >= 1")
    x = inference.sample(fam, theta, args.n, seed)
    out = "".join(f"{float(v)!r}\n" for v in np.atleast_1d(x))
    if args.out:
        write_atomic(args.out, out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def cmd_qq(args) -> int:
    seed = _require_seed(args)
    x = _load(args)
    try:
        report = FitReport.from_dict(json.loads(Path(args.report).read_text()))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"{args.report}: not a fit report ({exc})") from None
    if args.n_sim < 2:
        raise UsageError("--n-sim must be >= 2")
    env = diagnostics.qq_envelope(report, x, n_sim=args.n_sim, seed=seed)
    frac = diagnostics.inside_fraction(env)
    print(f"{report.family.label}: {frac:.4f} of data quantiles inside the "
          f"{env.n_sim}-sample envelope")
    if args.out:
        write_atomic(args.out, env.to_csv())
    else:
        sys.stdout.write(env.to_csv())
    if args.svg:
        write_atomic(args.svg, diagnostics.envelope_svg(env, f"{report.family.label} QQ"))
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "compare": cmd_compare, "measure": cmd_measure,
            "simulate": cmd_simulate, "eval": cmd_eval, "sample": cmd_sample, "qq": cmd_qq}


# ---------------------------------------------------------------------------
# parser

def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # defaults are suppressed on subcommands so a flag given before the
    # subcommand is not overwritten by the subparser default
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=d(None), help="seed for every random stream")
    g.add_argument("--threads", type=int, default=d(None),
                   help=f"worker processes (default: ${THREADS_ENV} or 1)")
    g.add_argument("--out", default=d(None), help="output path (written atomically)")
    g.add_argument("--log", action="store_true", default=d(False),
                   help="natural-log transform ingested data")
    g.add_argument("-v", "--verbose", action="count", default=d(0))
    g.add_argument("-q", "--quiet", action="store_true", default=d(False))
    return p


def _model_flags(p, default=None):
    p.add_argument("--model", "-m", choices=[f.value for f in Family],
                   default=default, required=default is None)
    p.add_argument("--params", "-p", required=True,
                   help="comma list, positional or name=value")
    p.add_argument("--parameterisation", default=EPS.value,
                   help="two-piece parameterisation of --params: "
                        + ", ".join(x.value for x in Parameterisation) + " (or eps, isf)")


def _optimizer_flags(p):
    p.add_argument("--max-iterations", type=int, default=4000)
    p.add_argument("--restarts", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sinharcsinh", parents=[_global_flags(False)],
                     description="Sinh-arcsinh distributions: fitting, comparison, "
                                 "asymmetry measures, simulation and diagnostics.")
    common = [_global_flags(True)]
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", parents=common, help="maximum-likelihood fit of one model")
    p.add_argument("data")
    p.add_argument("--model", "-m", choices=[f.value for f in Family], default="tpsas")
    p.add_argument("--no-intervals", action="store_true", help="skip profile intervals")
    _optimizer_flags(p)

    p = sub.add_parser("compare", parents=common, help="fit several models, rank by AIC")
    p.add_argument("data")
    p.add_argument("--models", default="normal,sn,sas,tpsas,sssas")
    p.add_argument("--no-intervals", action="store_true")
    _optimizer_flags(p)

    p = sub.add_parser("measure", parents=common, help="AG value and CJ curve")
    _model_flags(p)
    p.add_argument("--p-grid", default=DEFAULT_P_GRID, help="start:stop:step or comma list")
    p.add_argument("--svg", help="also draw the CJ curve")

    p = sub.add_parser("simulate", parents=common, help="Monte Carlo study from an INI file")
    p.add_argument("config")
    p.add_argument("--replicates", type=int, help="override replicates of every scenario")
    _optimizer_flags(p)

    p = sub.add_parser("eval", parents=common, help="pdf, cdf or quantile at points")
    _model_flags(p)
    p.add_argument("--which", choices=("pdf", "logpdf", "cdf", "quantile"), default="pdf")
    p.add_argument("--digits", type=int, help="significant digits (default: exact repr)")
    p.add_argument("points", nargs="+")

    p = sub.add_parser("sample", parents=common, help="draw a sample")
    _model_flags(p)
    p.add_argument("-n", type=int, required=True)

    p = sub.add_parser("qq", parents=common, help="simulation envelope for a QQ-plot")
    p.add_argument("data")
    p.add_argument("report", help="JSON report written by 'fit --out'")
    p.add_argument("--n-sim", type=int, default=diagnostics.DEFAULT_N_SIM)
    p.add_argument("--svg")
    return parser


def _configure_logging(args):
    level = logging.ERROR if args.quiet else (logging.DEBUG if args.verbose > 1 else
                                              logging.INFO if args.verbose else logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    root = logging.getLogger("sinharcsinh")
    root.handlers[:] = [handler]
    root.setLevel(level)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sinharcsinh {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except InsufficientDataError as exc:
        print(f"sinharcsinh {args.command}: insufficient data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"sinharcsinh {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except nx.ConvergenceError as exc:
        print(f"sinharcsinh {args.command}: did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ValueError as exc:
        # parameter domain errors and multimodal densities
        print(f"sinharcsinh {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
