"""``pdc-contrast``: write the tables and curve data as CSV or JSON, or run the oracle checks."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import photon_statistics as ps
from . import swap, temporal, tomography
from .oracle import TruncationWarning, ghz_setup, oracle_visibility, outcome_table, two_photon_setup

COMMANDS = ("table1", "table2", "curves", "swap-region", "filter-visibility",
            "noise-tomography", "verify")
FIGURES = ("fig2", "fig4", "fig6", "fig8")


@dataclass(frozen=True)
class RunConfig:
    command: str
    N: int | None = None
    k_min: float = 0.0
    k_max: float = 3.0
    k_steps: int = 31
    f_min: float = 0.1
    f_max: float = 10.0
    f_steps: int = 100
    alpha_steps: int = 31
    cutoff: int | None = None
    tol: float | None = None
    fmt: str = "csv"
    out: str | None = None
    figure: str = "all"
    suites: tuple[str, ...] = ()
    perturb_alpha2: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        for lo, hi, n, name in ((self.k_min, self.k_max, self.k_steps, "k"),
                                (self.f_min, self.f_max, self.f_steps, "f")):
            if n < 1 or hi < lo:
                raise ValueError(f"empty {name} range")
        if self.k_min < 0 or self.f_min <= 0:
            raise ValueError("K must be >= 0 and f must be > 0")
        if self.alpha_steps < 1:
            raise ValueError("empty alpha range")
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")

    @property
    def k_grid(self) -> np.ndarray:
        return np.linspace(self.k_min, self.k_max, self.k_steps)

    @property
    def f_grid(self) -> np.ndarray:
        return np.linspace(self.f_min, self.f_max, self.f_steps)

    @property
    def alpha_grid(self) -> np.ndarray:
        return np.linspace(0.0, math.pi / 2, self.alpha_steps)


Table = tuple[list[str], list[list]]


# ---- formatting ----------------------------------------------------------------

def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return int(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.10g}")
    return "" if x is None else str(x)


def render(table: Table, fmt: str) -> str:
    header, rows = table
    cells = [[_cell(v) for v in row] for row in rows]
    if fmt == "json":
        return json.dumps([dict(zip(header, row)) for row in cells], indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in cells:
        w.writerow([f"{v:.10g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# ---- commands -------------------------------------------------------------------

def _bell_exact(N: int) -> str:
    m = (N - 2) // 2
    return "1/sqrt(2)" if m == 0 else f"1/({2 ** m}*sqrt(2))"


def cmd_table1(cfg: RunConfig) -> Table:
    header = ["N", "family", "V_crit_exact", "V_crit", "K_crit", "one_minus_p_Omega", "p_1",
              "one_minus_p_Omega_pow", "p_1_pow"]
    rows = []
    for family in ("bell", "separability"):
        for N in (2, 4, 6, 8, 10, None):
            r = ps.critical_row(N, family)
            e = r.emission
            if N is None:
                exact = "0"
            else:
                exact = _bell_exact(N) if family == "bell" else f"1/{2 ** (N - 1) + 1}"
            rows.append(["inf" if N is None else N, family, exact, r.V_crit, r.K_crit,
                         e.one_or_more, e.exactly_one, e.all_sources_ge_one,
                         e.all_sources_exactly_one])
    return header, rows


def cmd_table2(cfg: RunConfig) -> Table:
    header = ["N", "f_crit", "f_crit_approx", "f_crit_approx_exact"]
    top = max(12, cfg.N or 12)
    rows = [[N, temporal.critical_f(N), temporal.approx_critical_f(N), ""]
            for N in range(4, top + 1, 2)]
    rows.append(["inf", math.nan, 4 * math.sqrt(2), "4*sqrt(2)"])
    return header, rows


def _fig2(cfg):
    return [["fig2", "V_2", K, ps.two_photon_visibility(K), 0] for K in cfg.k_grid]


def _fig4(cfg):
    rows = []
    Ns = (cfg.N,) if cfg.N else (2, 4, 6, 8, 10)
    for N in Ns:
        rows += [["fig4", f"V_{N}", K, ps.ghz_visibility(N, K), 0] for K in cfg.k_grid]
        K_c = ps.critical_K(N, ps.bell_threshold(N))
        rows.append(["fig4", f"V_{N}", K_c, ps.bell_threshold(N), 1])
    return rows


def _fig6(cfg):
    region = swap.chsh_region(cfg.k_grid, cfg.alpha_grid)
    return [["fig6", f"alpha={a:.10g}", K, int(region[i, j]), 0]
            for i, K in enumerate(cfg.k_grid) for j, a in enumerate(cfg.alpha_grid)]


def _fig8(cfg):
    rows = []
    for K in cfg.k_grid:
        p = tomography.merit_point(K)
        rows += [["fig8", "V", K, p.V, 0], ["fig8", "F", K, p.F, 0],
                 ["fig8", "V_total", K, p.V_total, 0]]
    return rows


def cmd_curves(cfg: RunConfig) -> Table:
    header = ["figure", "series", "x", "y", "critical"]
    builders = {"fig2": _fig2, "fig4": _fig4, "fig6": _fig6, "fig8": _fig8}
    figs = FIGURES if cfg.figure == "all" else (cfg.figure,)
    rows = []
    for fig in figs:
        rows += builders[fig](cfg)
    return header, rows


def cmd_swap_region(cfg: RunConfig) -> Table:
    header = ["K", "alpha", "V", "chsh_violation"]
    region = swap.chsh_region(cfg.k_grid, cfg.alpha_grid)
    return header, [[K, a, swap.swap_visibility(K, a), region[i, j]]
                    for i, K in enumerate(cfg.k_grid) for j, a in enumerate(cfg.alpha_grid)]


def cmd_filter_visibility(cfg: RunConfig) -> Table:
    header = ["N", "f", "V"]
    Ns = (cfg.N,) if cfg.N else (4, 6, 8, 10, 12)
    return header, [[N, f, temporal.filter_visibility(N, f)] for N in Ns for f in cfg.f_grid]


def cmd_noise_tomography(cfg: RunConfig) -> Table:
    header = ["K", "V", "F", "V_total", "epsilon"]
    rows = []
    for K in cfg.k_grid:
        p = tomography.merit_point(K)
        rows.append([K, p.V, p.F, p.V_total, p.epsilon])
    if cfg.cutoff is not None:
        header += ["oracle_max_deviation", "oracle_convergence"]
        for row in rows:
            if row[0] == 0.0:  # no fourfold coincidences without emission
                row += [math.nan, math.nan]
                continue
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                res = tomography.correlation_tensor(row[0], cutoff=cfg.cutoff)
            rho = tomography.reconstruct_rho(res.tensor).rho
            row += [float(np.abs(rho - tomography.analytic_rho(row[0]).rho).max()),
                    res.convergence]
    return header, rows


# ---- verification suites --------------------------------------------------------

@dataclass(frozen=True)
class SuiteResult:
    suite: str
    max_deviation: float
    tolerance: float
    convergence: float
    truncation_limited: bool
    worst_case: str

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance and not self.truncation_limited


def _suite_two_photon(cfg, tol):
    cutoff = cfg.cutoff or 12
    setup = two_photon_setup()
    rng = np.random.default_rng(cfg.seed)
    worst, where, conv = 0.0, "", 0.0
    for _ in range(20):
        K = rng.uniform(0, 0.6)
        th1, th2, ph1, ph2 = rng.uniform(0, 2 * math.pi, 4)
        P = outcome_table(setup, K, [(th1, ph1), (th2, ph2)], cutoff=cutoff)
        P_prev = outcome_table(setup, K, [(th1, ph1), (th2, ph2)], cutoff=cutoff - 1)
        conv = max(conv, float(np.abs(P - P_prev).max()))
        for i, r1 in enumerate((1, -1)):
            for j, r2 in enumerate((1, -1)):
                ref = ps.two_photon_probability(K, ps.AnalyzerSetting(th1, ph1, r1),
                                                ps.AnalyzerSetting(th2, ph2, r2))
                d = abs(P[i, j] - ref)
                if d > worst:
                    worst, where = d, f"K={K:.4f}"
    return SuiteResult("two-photon", worst, tol, conv, conv > tol, where)


def _suite_ghz(cfg, tol):
    cutoff = cfg.cutoff or 6
    worst, where, conv = 0.0, "", 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for K in (0.1, 0.2):
            r = oracle_visibility(ghz_setup(4), K, cutoff=cutoff, phase_grid=8)
            conv = max(conv, r.convergence)
            d = abs(r.value - ps.ghz_visibility(4, K))
            if d > worst:
                worst, where = d, f"K={K}"
    return SuiteResult("ghz-4", worst, tol, conv, conv > tol, where)


def _suite_swap(cfg, tol):
    cutoff = cfg.cutoff or 5
    worst, where, conv = 0.0, "", 0.0
    K = 0.1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        base = swap.oracle_swap_visibility(K, 0.0, cutoff=cutoff, phase_grid=8)
        conv = base.convergence
        for a in (0.4, 0.8):
            r = swap.oracle_swap_visibility(K, a, cutoff=cutoff, phase_grid=8)
            d = abs(r.value / base.value - math.cos(a) ** 2)
            if d > worst:
                worst, where = d, f"K={K}, alpha={a}"
    return SuiteResult("swap-factorization", worst, tol, conv, conv > tol, where)


def _perturbed_form(N, f, pattern, delta):
    a1, a2, _ = temporal.pair_coefficients(f)
    A = np.eye(N) * -a1
    for i, j in pattern.pairs:
        A[i - 1, j - 1] = A[j - 1, i - 1] = -(a2 + delta) / 2
    return temporal.QuadraticGaussianForm(A)


def _suite_gaussian(cfg, tol):
    worst, where = 0.0, ""
    for N in (4, 6, 8, 10, 12):
        for f in (0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0):
            det = temporal.filter_visibility(N, f)
            R = _perturbed_form(N, f, temporal.reflected_pattern(N), cfg.perturb_alpha2)
            T = _perturbed_form(N, f, temporal.transmitted_pattern(N), cfg.perturb_alpha2)
            elim = temporal.eliminate_overlap(R, T)
            closed = temporal.closed_form_visibility(N, f)
            d = max(abs(det - elim), abs(det - closed))
            if d > worst:
                worst, where = d, f"N={N}, f={f}"
    return SuiteResult("gaussian-dual", worst, tol, 0.0, False, where)


def _suite_tomography(cfg, tol):
    cutoff = cfg.cutoff or 8
    worst, where, conv = 0.0, "", 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for K in (0.1, 0.3):
            res = tomography.correlation_tensor(K, cutoff=cutoff)
            conv = max(conv, res.convergence)
            rho = tomography.reconstruct_rho(res.tensor).rho
            d = float(np.abs(rho - tomography.analytic_rho(K).rho).max())
            if d > worst:
                worst, where = d, f"K={K}"
    return SuiteResult("tomography", worst, tol, conv, conv > tol, where)


SUITES: dict[str, tuple[Callable, float]] = {
    "two-photon": (_suite_two_photon, 1e-6),
    "ghz-4": (_suite_ghz, 1e-3),
    "swap-factorization": (_suite_swap, 2e-3),
    "gaussian-dual": (_suite_gaussian, 1e-10),
    "tomography": (_suite_tomography, 2e-3),
}


def run_suites(cfg: RunConfig) -> list[SuiteResult]:
    names = cfg.suites or tuple(SUITES)
    out = []
    for name in names:
        fn, default_tol = SUITES[name]
        out.append(fn(cfg, cfg.tol if cfg.tol is not None else default_tol))
    return out


def cmd_verify(cfg: RunConfig) -> Table:
    header = ["suite", "max_deviation", "tolerance", "convergence", "truncation_limited",
              "status", "worst_case"]
    rows = [[r.suite, r.max_deviation, r.tolerance, r.convergence, r.truncation_limited,
             "pass" if r.passed else ("truncated" if r.truncation_limited else "fail"),
             r.worst_case] for r in run_suites(cfg)]
    return header, rows


HANDLERS = {
    "table1": cmd_table1,
    "table2": cmd_table2,
    "curves": cmd_curves,
    "swap-region": cmd_swap_region,
    "filter-visibility": cmd_filter_visibility,
    "noise-tomography": cmd_noise_tomography,
    "verify": cmd_verify,
}


# ---- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pdc-contrast", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--N", type=int, default=None, help="photon number (command dependent)")
    p.add_argument("--k-min", type=float, default=0.0)
    p.add_argument("--k-max", type=float, default=3.0)
    p.add_argument("--k-steps", type=int, default=31)
    p.add_argument("--f-min", type=float, default=0.1)
    p.add_argument("--f-max", type=float, default=10.0)
    p.add_argument("--f-steps", type=int, default=100)
    p.add_argument("--alpha-steps", type=int, default=31)
    p.add_argument("--cutoff", type=int, default=None, help="Fock cutoff for oracle runs")
    p.add_argument("--tol", type=float, default=None, help="override suite tolerances")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--figure", choices=FIGURES + ("all",), default="all",
                   help="curves: which figure's data to emit")
    p.add_argument("--suite", dest="suites", action="append", choices=tuple(SUITES),
                   help="verify: run only this suite (repeatable)")
    p.add_argument("--perturb-alpha2", type=float, default=0.0, help=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=0)
    return p


def main(argv: list[str] | None = None) -> int:
    args = vars(build_parser().parse_args(argv))
    args["suites"] = tuple(args["suites"] or ())
    try:
        cfg = RunConfig(**args)
    except ValueError as exc:
        print(f"pdc-contrast: {exc}", file=sys.stderr)
        return 2
    table = HANDLERS[cfg.command](cfg)
    text = render(table, cfg.fmt)
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"pdc-contrast: cannot write {cfg.out}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    if cfg.command == "verify":
        failed = [row for row in table[1] if row[5] != "pass"]
        for row in failed:
            print(f"pdc-contrast: suite {row[0]} {row[5]}: deviation {row[1]:.3e} "
                  f"(tol {row[2]:.1e}) at {row[6]}", file=sys.stderr)
        return 1 if failed else 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
