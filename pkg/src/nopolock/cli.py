"""Command-line front end: steady states, variance sweeps, Monte Carlo, figures.

Subcommands
-----------
steady    print threshold, photon numbers, locked phases and stability
variance  sweep a variance evaluator, emit CSV rows
mc        run the positive-P ensemble, emit moment estimates (and phases)
figure    reproduce the data behind the five standard figures as CSV

Exit codes: 0 success, 2 parameter-domain error, 3 regime error,
4 Monte Carlo estimation failure.

CSV files start with ``#`` comment lines naming the tool version and the
full configuration; numbers are written with 17 significant digits so
reruns with identical configuration are byte-identical.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .entanglement import unitary_variance, variance_steady
from .errors import (EstimationError, ParameterDomainError, RegimeError)
from .montecarlo import (SimConfig, ensemble_moments, parse_moment_spec,
                         phase_histogram)
from .params import SystemParams, derive_scales, locking_feasible
from .steady import critical_points, output_rates, replace_pump, steady_state

OUTDIR_ENV = "NOPOLOCK_OUTDIR"

FIGURE_UNITARY_RATIOS = {1: (0.1, 0.4, 0.7), 2: (1.1, 2.0, 3.0)}
FIGURE_STEADY_PARAMS = {3: ((0.1, 10.0), (0.5, 3.0), (0.5, 1.0)),
                        4: ((0.5, 3.0),),
                        5: ((0.1, 10.0), (0.5, 1.0))}


def fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# configuration plumbing

_PARAM_KEYS = ("gamma", "gamma1", "gamma2", "gamma3", "delta", "delta1", "delta2",
               "chi", "k", "E", "phi_L", "phi_k", "phi_chi",
               "lam", "eps", "eps_ratio", "eps_over_chi")
_SIM_KEYS = ("dt", "t_max", "n_traj", "burn_in", "seed", "divergence_bound",
             "scheme", "sample_every", "chunk_size")


def read_config_file(path: str) -> dict[str, str]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterDomainError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def _merged(ns: argparse.Namespace, key: str, cast=float):
    """CLI flag if given, else config-file value, else None."""
    flag = getattr(ns, key, None)
    if flag is not None:
        return flag
    raw = ns._file_config.get(key)
    if raw is None:
        return None
    return cast(raw) if cast is not str else raw


def build_params(ns: argparse.Namespace) -> tuple[SystemParams, float]:
    """Assemble SystemParams and the working pump rate from flags/config."""
    get = lambda key, cast=float: _merged(ns, key, cast)
    gamma = get("gamma")
    g1 = get("gamma1") if get("gamma1") is not None else (gamma if gamma is not None else 1.0)
    g2 = get("gamma2") if get("gamma2") is not None else (gamma if gamma is not None else 1.0)
    delta = get("delta")
    d1 = get("delta1") if get("delta1") is not None else (delta if delta is not None else 0.0)
    d2 = get("delta2") if get("delta2") is not None else (delta if delta is not None else 0.0)
    chi = get("chi") if get("chi") is not None else 0.0
    gamma3 = get("gamma3") if get("gamma3") is not None else 100.0 * max(g1, g2)
    phases = {name: get(name) or 0.0 for name in ("phi_L", "phi_k", "phi_chi")}

    k = get("k")
    E = get("E")
    if k is None:
        lam = get("lam") if get("lam") is not None else 1.0
        k = math.sqrt(lam * gamma3)
    params = SystemParams(gamma1=g1, gamma2=g2, gamma3=gamma3, delta1=d1, delta2=d2,
                          chi=chi, k=k, E=E if E is not None else 0.0, **phases)
    scales = derive_scales(params)

    eps = get("eps")
    ratio = get("eps_ratio")
    over_chi = get("eps_over_chi")
    if sum(v is not None for v in (eps, ratio, over_chi)) > 1:
        raise ParameterDomainError("give at most one of --eps, --eps-ratio, --eps-over-chi")
    if ratio is not None:
        if not scales.eps_th == scales.eps_th:  # NaN guard
            raise ParameterDomainError("eps-ratio needs a defined threshold")
        eps = ratio * scales.eps_th
    elif over_chi is not None:
        eps = over_chi * chi
    elif eps is None:
        eps = scales.eps
    return params, eps


def build_sim_config(ns: argparse.Namespace) -> SimConfig:
    get = lambda key, cast=float: _merged(ns, key, cast)
    kwargs = {}
    for key, cast in (("dt", float), ("t_max", float), ("n_traj", int),
                      ("burn_in", float), ("seed", int), ("divergence_bound", float),
                      ("scheme", str), ("sample_every", int), ("chunk_size", int)):
        value = get(key, cast)
        if value is not None:
            kwargs[key] = value
    return SimConfig(**kwargs)


def parse_sweep(spec: str) -> tuple[str, np.ndarray]:
    """Parse ``var:start:stop:step`` into the variable name and grid."""
    parts = spec.split(":")
    if len(parts) != 4:
        raise ParameterDomainError(f"sweep must be var:start:stop:step, got {spec!r}")
    var = parts[0]
    start, stop, step = (float(p) for p in parts[1:])
    if step <= 0:
        raise ParameterDomainError("sweep step must be positive")
    if stop < start:
        raise ParameterDomainError("sweep stop must be >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return var, start + step * np.arange(n)


def _outdir(ns: argparse.Namespace) -> Path:
    out = ns.outdir or os.environ.get(OUTDIR_ENV) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _header(ns: argparse.Namespace, params: SystemParams, extra: dict) -> list[str]:
    lines = [f"# nopolock {__version__}", f"# command = {ns.command}"]
    for name in ("gamma1", "gamma2", "gamma3", "delta1", "delta2", "chi",
                 "k", "E", "phi_L", "phi_k", "phi_chi"):
        lines.append(f"# {name} = {fmt(getattr(params, name))}")
    for key, value in extra.items():
        lines.append(f"# {key} = {value}")
    return lines


def _write_csv(path: Path | None, header: list[str], columns: list[str],
               rows: list[list[str]]) -> None:
    text = "\n".join(header + [",".join(columns)] + [",".join(r) for r in rows]) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)
        print(f"wrote {path}")


# ---------------------------------------------------------------------------
# subcommands

def cmd_steady(ns: argparse.Namespace) -> int:
    params, eps = build_params(ns)
    params, scales = replace_pump(params, derive_scales(params), eps)
    print(f"eps        = {fmt(eps)}")
    print(f"eps_th     = {fmt(scales.eps_th)}  (E_th = {fmt(scales.e_th)}, "
          f"P_th = {fmt(scales.p_th)} hbar*omega^3)")
    if locking_feasible(params):
        crit = critical_points(params, scales)
        print(f"eps_cr+    = {fmt(crit.eps_cr_plus)}")
        print(f"eps_cr-    = {fmt(crit.eps_cr_minus)}")
    else:
        print("locking    : infeasible (4 chi^2 d1 d2 <= (g1 d2 - g2 d1)^2)")
    if eps == scales.eps_th:
        print("note       : at threshold")
    branches = ("+", "-") if locking_feasible(params) else ()
    for label in branches:
        state = steady_state(params, scales, eps, branch=label)
        if state.below_critical:
            print(f"branch {label}   : below critical point (zero solution)")
            continue
        n3, n1o, n2o = output_rates(params, scales, state.n10)
        twin = state.twin()
        print(f"branch {label}   : n10 = {fmt(state.n10)}  n20 = {fmt(state.n20)}  "
              f"stable = {state.stable}")
        print(f"  phases   : phi10 = {fmt(state.phi10)}  phi20 = {fmt(state.phi20)}"
              f"  (twin {fmt(twin.phi10)}, {fmt(twin.phi20)})")
        print(f"  sums     : phase_sum = {fmt(state.phase_sum)}  "
              f"phase_diff = {fmt(state.phase_diff)}")
        print(f"  rates    : n3_in = {fmt(n3)}  n1_out = {fmt(n1o)}  n2_out = {fmt(n2o)}")
        print(f"  eigs(Re) : {' '.join(fmt(ev.real) for ev in state.eigenvalues)}")
    print(f"zero state : n0 = 0  stable = {eps < scales.eps_th}")
    return 0


def _variance_rows(params, scales, ns, var, grid):
    delta_theta = ns.delta_theta
    rows = []
    regime = ns.regime
    if regime == "unitary":
        if var != "chi_t":
            raise ParameterDomainError("unitary sweeps use the variable chi_t")
        chi = params.chi
        _, eps = build_params(ns)
        for value in grid:
            v = unitary_variance(chi, eps, value / chi, ns.sigma_theta)
            rows.append([fmt(value), fmt(v), fmt(0.0), fmt(v), fmt(v), fmt(v * v), "ok"])
        return rows
    if var != "eps_ratio":
        raise ParameterDomainError("steady-state sweeps use the variable eps_ratio")
    for value in grid:
        rep = variance_steady(params, scales, value * scales.eps_th,
                              delta_theta, regime=regime)
        rows.append([fmt(value), fmt(rep.V), fmt(rep.R), fmt(rep.V_plus),
                     fmt(rep.V_minus), fmt(rep.product), rep.flag])
    return rows


def cmd_variance(ns: argparse.Namespace) -> int:
    params, eps = build_params(ns)
    params, scales = replace_pump(params, derive_scales(params), eps)
    var, grid = parse_sweep(ns.sweep)
    rows = _variance_rows(params, scales, ns, var, grid)
    header = _header(ns, params, {
        "regime": ns.regime, "delta_theta": fmt(ns.delta_theta),
        "sigma_theta": fmt(ns.sigma_theta), "sweep": ns.sweep})
    columns = [var, "V", "R", "V_plus", "V_minus", "product", "flag"]
    out = None if ns.output == "-" else _outdir(ns) / (ns.output or "variance.csv")
    _write_csv(out, header, columns, rows)
    return 0


def cmd_mc(ns: argparse.Namespace) -> int:
    params, eps = build_params(ns)
    params, scales = replace_pump(params, derive_scales(params), eps)
    config = build_sim_config(ns)
    specs = [s.strip() for s in ns.moments.split(",") if s.strip()]
    estimates = ensemble_moments(params, scales, config,
                                 [parse_moment_spec(s) for s in specs],
                                 n_workers=ns.workers)
    # worker count deliberately left out of the header: results are
    # bitwise identical for any worker count, and so must be the file
    header = _header(ns, params, {
        "eps": fmt(eps), "dt": fmt(config.dt), "t_max": fmt(config.t_max),
        "n_traj": config.n_traj, "burn_in": fmt(config.burn_in),
        "seed": config.seed, "divergence_bound": fmt(config.divergence_bound),
        "scheme": config.scheme, "sample_every": config.sample_every,
        "chunk_size": config.chunk_size})
    columns = ["observable", "mean_re", "mean_im", "std_error",
               "n_effective", "discard_fraction"]
    rows = [[e.label, fmt(e.mean.real), fmt(e.mean.imag), fmt(e.std_error),
             str(e.n_effective), fmt(e.discard_fraction)] for e in estimates]
    out = None if ns.output == "-" else _outdir(ns) / (ns.output or "mc.csv")
    _write_csv(out, header, columns, rows)

    if ns.phases:
        hist = phase_histogram(params, scales, config, n_workers=ns.workers)
        rows = [[fmt(lo), fmt(hi), str(cd), str(cs)]
                for lo, hi, cd, cs in zip(hist.edges[:-1], hist.edges[1:],
                                          hist.counts_diff, hist.counts_sum)]
        extra = {"locked_fraction_0.3": fmt(hist.locked_fraction(0.3))}
        if hist.note:
            extra["note"] = hist.note
        stem = (ns.output or "mc.csv").rsplit(".", 1)[0]
        _write_csv(None if ns.output == "-" else _outdir(ns) / f"{stem}_phases.csv",
                   header + [f"# {k} = {v}" for k, v in extra.items()],
                   ["edge_lo", "edge_hi", "count_diff", "count_sum"], rows)
    return 0


def _figure_curves(n: int, ns: argparse.Namespace):
    """Yield (filename, header-extra, columns, rows) per curve of figure ``n``."""
    if n in FIGURE_UNITARY_RATIOS:
        chi = 1.0
        grid = np.arange(0.0, 6.0 + 1e-9, 0.005) if n == 1 else \
            np.arange(0.0, 1.2 + 1e-9, 0.002)
        for i, ratio in enumerate(FIGURE_UNITARY_RATIOS[n], 1):
            rows = [[fmt(ct), fmt(unitary_variance(chi, ratio * chi, ct / chi))]
                    for ct in grid]
            yield (f"fig{n}_curve{i}.csv", {"eps_over_chi": fmt(ratio)},
                   ["chi_t", "V"], rows)
        return
    grid = np.arange(0.01, 3.0 + 1e-9, 0.005)
    for i, (chi, delta) in enumerate(FIGURE_STEADY_PARAMS[n], 1):
        params = SystemParams.symmetric(gamma=1.0, delta=delta, chi=chi, lam=1.0)
        scales = derive_scales(params)
        rows = []
        for ratio in grid:
            rep = variance_steady(params, scales, ratio * scales.eps_th, 0.0, "auto")
            if n == 3:
                rows.append([fmt(ratio), fmt(rep.V), rep.flag])
            elif n == 4:
                rows.append([fmt(ratio), fmt(rep.V_plus), fmt(rep.V_minus), rep.flag])
            else:
                rows.append([fmt(ratio), fmt(rep.product), rep.flag])
        columns = {3: ["eps_ratio", "V", "flag"],
                   4: ["eps_ratio", "V_plus", "V_minus", "flag"],
                   5: ["eps_ratio", "product", "flag"]}[n]
        yield (f"fig{n}_curve{i}.csv", {"chi": fmt(chi), "delta": fmt(delta)},
               columns, rows)


def cmd_figure(ns: argparse.Namespace) -> int:
    n = ns.n
    if n not in range(1, 6):
        raise ParameterDomainError("figure number must be 1..5")
    outdir = _outdir(ns)
    written = []
    for fname, extra, columns, rows in _figure_curves(n, ns):
        header = [f"# nopolock {__version__}", f"# command = figure {n}"]
        header += [f"# {k} = {v}" for k, v in extra.items()]
        _write_csv(outdir / fname, header, columns, rows)
        written.append(outdir / fname)
    if ns.format == "csv+svg":
        _render_svg(n, written, outdir / f"fig{n}.svg")
    return 0


def _render_svg(n: int, csv_paths: list[Path], out: Path) -> None:
    """Decorative plot of the curve CSVs; the CSV files are the contract."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise ParameterDomainError(
            "svg output needs matplotlib (pip install nopolock[viz])") from exc
    fig, ax = plt.subplots(figsize=(5, 3.4))
    for i, path in enumerate(csv_paths, 1):
        lines = [ln for ln in path.read_text().splitlines()
                 if ln and not ln.startswith("#")]
        names = lines[0].split(",")
        cells = [ln.split(",") for ln in lines[1:]]
        x = np.array([float(row[0]) for row in cells])
        for j, col in enumerate(names[1:], 1):
            if col == "flag":
                continue
            y = np.array([float(row[j]) for row in cells])
            ax.plot(x, y, label=f"curve {i} {col}")
    ax.set_xlabel("chi*t" if n in (1, 2) else "eps/eps_th")
    ax.set_ylabel({1: "V", 2: "V", 3: "V", 4: "V+-", 5: "V+ V-"}[n])
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    print(f"wrote {out}")


# ---------------------------------------------------------------------------
# argument parsing

def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("model parameters (rates in units of gamma)")
    for name in _PARAM_KEYS:
        g.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    parser.add_argument("--config", help="flat key = value file; flags override")
    parser.add_argument("--outdir", help=f"output directory (default ${OUTDIR_ENV} or .)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nopolock",
        description="Self-phase-locked NOPO: steady states, squeezing variances, "
                    "positive-P Monte Carlo and figure data.")
    parser.add_argument("--version", action="version", version=f"nopolock {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady", help="threshold, photon numbers, phases, stability")
    _add_param_flags(p)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("variance", help="sweep a variance evaluator to CSV")
    _add_param_flags(p)
    p.add_argument("--regime", choices=("unitary", "below", "above", "auto"),
                   default="auto")
    p.add_argument("--sweep", required=True, metavar="VAR:START:STOP:STEP",
                   help="eps_ratio:... for steady regimes, chi_t:... for unitary")
    p.add_argument("--delta-theta", dest="delta_theta", type=float, default=0.0)
    p.add_argument("--sigma-theta", dest="sigma_theta", type=float, default=0.0,
                   help="sum angle for the unitary regime (minimizing angle is 0)")
    p.add_argument("--output", help="file name under outdir, or - for stdout")
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("mc", help="positive-P ensemble moments (and phase histograms)")
    _add_param_flags(p)
    for name in _SIM_KEYS:
        kind = int if name in ("n_traj", "seed", "sample_every", "chunk_size") else float
        if name == "scheme":
            p.add_argument("--scheme", type=str)
        else:
            p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=kind)
    p.add_argument("--moments", default="n1,a1a2,b1a2,a1",
                   help="comma list of aliases or exponent tuples")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--phases", action="store_true",
                   help="also write the phase histogram CSV")
    p.add_argument("--output", help="file name under outdir, or - for stdout")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("figure", help="write per-curve CSV data for figures 1..5")
    p.add_argument("n", type=int, help="figure number 1..5")
    p.add_argument("--format", choices=("csv", "csv+svg"), default="csv")
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv: list[str] | None = None) -> int:
    ns = make_parser().parse_args(argv)
    ns._file_config = read_config_file(ns.config) if getattr(ns, "config", None) else {}
    try:
        return ns.func(ns)
    except ParameterDomainError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 2
    except RegimeError as exc:
        print(f"regime error: {exc}", file=sys.stderr)
        return 3
    except EstimationError as exc:
        print(f"estimation error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
