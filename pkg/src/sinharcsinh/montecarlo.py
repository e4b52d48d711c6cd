"""Replicated sampling and TP SAS fitting: bias, variance and RMSE tables."""

from __future__ import annotations

import configparser
import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import numerics as nx
from .inference import Family, fit_ml
from .twopiece import EPS, TpSasParams, reparameterise, tpsas_sample

__all__ = [
    "SimScenario",
    "SimCell",
    "SimReport",
    "run_study",
    "bias_shrinks",
    "read_scenarios",
    "DEFAULT_REPLICATES",
]

PARAMS = ("mu", "sigma", "gamma", "delta")
DEFAULT_REPLICATES = 1000
CSV_HEADER = ("scenario", "n", "parameter", "bias", "variance", "rmse", "n_failed")


@dataclass(frozen=True)
class SimScenario:
    true_params: TpSasParams
    sample_sizes: tuple[int, ...]
    n_replicates: int = DEFAULT_REPLICATES
    seed: int = 0
    name: str = "scenario"

    def __post_init__(self):
        object.__setattr__(self, "true_params", reparameterise(self.true_params, EPS))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        if self.n_replicates < 1:
            raise ValueError("n_replicates must be >= 1")
        if not self.sample_sizes or min(self.sample_sizes) < 20:
            raise ValueError("sample sizes must be >= 20")


@dataclass(frozen=True)
class SimCell:
    n: int
    parameter: str
    bias: float
    variance: float
    rmse: float
    n_failed: int


@dataclass
class SimReport:
    scenario: SimScenario
    estimates: dict  # n -> (n_replicates, 4) array
    converged: dict  # n -> (n_replicates,) bool array
    cells: list = field(default_factory=list)
    converged_cells: list = field(default_factory=list)

    def cell(self, n: int, parameter: str, converged_only: bool = False) -> SimCell:
        for c in (self.converged_cells if converged_only else self.cells):
            if c.n == n and c.parameter == parameter:
                return c
        raise KeyError((n, parameter))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in self.cells:
            w.writerow([self.scenario.name, c.n, c.parameter, f"{c.bias:.10g}",
                        f"{c.variance:.10g}", f"{c.rmse:.10g}", c.n_failed])
        return buf.getvalue()

    def to_text(self) -> str:
        """Bias / Var. / RMSE blocks by sample size, one column per parameter."""
        t = self.scenario.true_params
        truth = "  ".join(f"{p}={getattr(t, p):g}" for p in PARAMS)
        lines = [f"{self.scenario.name}: {truth}  "
                 f"({self.scenario.n_replicates} replicates)",
                 f"{'':6}{'n':>6}" + "".join(f"{p + '^':>12}" for p in PARAMS)]
        for label, attr in (("Bias", "bias"), ("Var.", "variance"), ("RMSE", "rmse")):
            for k, n in enumerate(self.scenario.sample_sizes):
                vals = [getattr(self.cell(n, p), attr) for p in PARAMS]
                lines.append(f"{label if k == 0 else '':6}{n:>6}"
                             + "".join(f"{_short(v):>12}" for v in vals))
        failed = {n: int((~self.converged[n]).sum()) for n in self.scenario.sample_sizes}
        lines.append("non-converged fits: " + ", ".join(f"n={n}: {k}" for n, k in failed.items()))
        return "\n".join(lines)


def _short(v):
    if v != 0 and (abs(v) >= 1e4 or abs(v) < 1e-3):
        return f"{v:.2e}"
    return f"{v:.4g}" if abs(v) >= 100 else f"{v:.3f}"


def _replicate(args):
    true_params, n, r, seed, settings = args
    x = tpsas_sample(n, true_params, seed, n, r)
    try:
        rep = fit_ml(Family.TPSAS, x, settings, seed=_fit_seed(seed, n, r))
        return np.array(rep.theta), rep.converged
    except (ValueError, nx.ConvergenceError):
        return np.full(4, np.nan), False


def _fit_seed(seed, n, r):
    return int(np.random.SeedSequence(int(seed), spawn_key=(int(n), int(r), 1)).generate_state(1)[0])


def _aggregate(est, truth, n, failed):
    cells = []
    for j, name in enumerate(PARAMS):
        col = est[:, j]
        col = col[np.isfinite(col)]
        if col.size == 0:
            cells.append(SimCell(n, name, math.nan, math.nan, math.nan, failed))
            continue
        bias = float(np.mean(col) - truth[j])
        var = float(np.var(col, ddof=1)) if col.size > 1 else 0.0
        cells.append(SimCell(n, name, bias, var, math.sqrt(bias * bias + var), failed))
    return cells


def run_study(s: SimScenario, settings: nx.OptimizerSettings | None = None,
              threads: int = 1) -> SimReport:
    """Simulate, fit and aggregate every (sample size, replicate) pair.

    Replicate ``r`` at size ``n`` draws from stream ``(seed, n, r)``, so the
    result does not depend on ``threads`` or completion order. Failed and
    non-converged fits stay in the main aggregates; ``converged_cells``
    repeats the aggregation over converged replicates only.
    """
    settings = settings or nx.OptimizerSettings()
    t = s.true_params
    truth = (t.mu, t.sigma, t.gamma, t.delta)
    report = SimReport(s, {}, {})
    for n in s.sample_sizes:
        jobs = [(t, n, r, s.seed, settings) for r in range(s.n_replicates)]
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(_replicate, jobs, chunksize=16))
        else:
            results = [_replicate(j) for j in jobs]
        est = np.array([r[0] for r in results])
        conv = np.array([r[1] for r in results], dtype=bool)
        report.estimates[n] = est
        report.converged[n] = conv
        failed = int((~conv).sum())
        report.cells += _aggregate(est, truth, n, failed)
        report.converged_cells += _aggregate(est[conv], truth, n, failed)
    return report


def bias_shrinks(report: SimReport, parameter: str = "delta") -> bool:
    """Whether |bias| of ``parameter`` shrinks as the sample size grows.

    Each step may rise by at most two Monte Carlo standard errors of the
    difference, and the last size must sit significantly (two standard
    errors) below the first.
    """
    sizes = sorted(report.scenario.sample_sizes)
    if len(sizes) < 3:
        raise ValueError("need at least three sample sizes")
    cells = [report.cell(n, parameter) for n in sizes]
    counts = [int(np.isfinite(report.estimates[n][:, PARAMS.index(parameter)]).sum())
              for n in sizes]
    return _shrinking([abs(c.bias) for c in cells],
                      [math.sqrt(c.variance / max(k, 1)) for c, k in zip(cells, counts)])


def _shrinking(abs_bias: Sequence[float], se: Sequence[float]) -> bool:
    for k in range(len(abs_bias) - 1):
        if abs_bias[k + 1] - abs_bias[k] > 2.0 * math.hypot(se[k], se[k + 1]):
            return False
    return abs_bias[0] - abs_bias[-1] > 2.0 * math.hypot(se[0], se[-1])


def read_scenarios(text: str) -> list[SimScenario]:
    """Parse an INI-style scenario file.

    Every section is one scenario::

        [light_tails]
        mu = 0
        sigma = 1
        gamma = 0.25
        delta = 1.25
        sample_sizes = 250, 500, 1000
        replicates = 1000
        seed = 2015
    """
    cp = configparser.ConfigParser()
    cp.read_string(text)
    out = []
    for name in cp.sections():
        sec = cp[name]
        missing = [k for k in ("mu", "sigma", "gamma", "delta", "sample_sizes", "seed")
                   if k not in sec]
        if missing:
            raise ValueError(f"scenario [{name}] is missing: {', '.join(missing)}")
        params = TpSasParams(sec.getfloat("mu"), sec.getfloat("sigma"),
                             sec.getfloat("gamma"), sec.getfloat("delta"),
                             sec.get("parameterisation", EPS.value))
        sizes = tuple(int(v) for v in sec.get("sample_sizes").replace(",", " ").split())
        out.append(SimScenario(params, sizes, sec.getint("replicates", DEFAULT_REPLICATES),
                               sec.getint("seed"), name))
    if not out:
        raise ValueError("scenario file has no sections")
    return out
