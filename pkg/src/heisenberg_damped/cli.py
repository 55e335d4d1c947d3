"""Command-line front end.

Commands
--------
scenario   evolve a configured scenario, write norms.csv and report.csv
propcheck  compare the closed-form propagator with the adaptive integrator
gftcheck   Plancherel and Riemann-Lebesgue check of a transformed test function
tailbound  tail of the series sum_k (2|k| + n)^-(n+1)

Exit status: 0 when every check passes, 1 when a check fails, 2 for
configuration or usage errors and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import decay_lab
from .config import ConfigError, RunConfig, load_config
from .group import GroupParams
from .heisenberg_fourier import (
    ResolutionError,
    TransformRules,
    TruncationError,
    gaussian,
    group_fourier,
    l1_norm,
    l2_norm,
    operator_norm,
    zero_function,
)
from .oracle import IntegratorConfig, OracleError, integrate_mode
from .plancherel import build_grid, pairwise_sum, tail_bound
from .propagator import evolve_mode

__all__ = ["main"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
PROPCHECK_TOL = 1e-8


class _Out:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, *args):
        if not self.quiet:
            print(*args)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    return "%.17g" % v


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _params(cfg: RunConfig) -> GroupParams:
    return GroupParams(cfg.n, cfg.plancherel_constant)


def cmd_scenario(cfg: RunConfig, out_dir: Path, say) -> int:
    params = _params(cfg)
    grid = build_grid(params, cfg.lambda_min, cfg.lambda_max, cfg.panels, cfg.points, cfg.symmetric)
    try:
        u0 = decay_lab.synth_field(cfg.u0.spec("u0"), grid, cfg.k_max, cfg.l_max)
        u1 = decay_lab.synth_field(cfg.u1.spec("u1"), grid, cfg.k_max, cfg.l_max)
    except decay_lab.ProfileError as exc:
        say(f"scenario: invalid profile: {exc}")
        return EXIT_CONFIG
    series = decay_lab.run_scenario(u0, u1, cfg.times())
    _write_csv(out_dir / "norms.csv", ["t", "norm_u", "norm_dtu", "norm_gradu", "norm_Tu"],
               zip(series.times, series["u"], series["dtu"], series["gradu"], series["Tu"]))
    header = ["observable", "slope", "stderr", "expected", "tol", "pass"]
    if cfg.regularity == "L1_and_L2":
        try:
            report = decay_lab.make_report(series, cfg.fit_window, cfg.tol)
        except ValueError as exc:
            say(f"scenario: fit refused: {exc}")
            return EXIT_NUMERIC
        check = decay_lab.verify_theorem(report, params, "L1_and_L2")
        rows = [(f.observable, f.slope, f.stderr, f.expected, f.tol, f.passed) for f in report.rows()]
        _write_csv(out_dir / "report.csv", header, rows)
        for f in report.rows():
            say(f"{f.observable:6s} slope {f.slope:+.4f} +- {f.stderr:.1e}  expected {f.expected:+.3f}"
                f" +- {f.tol:.2f}  {'PASS' if f.passed else 'FAIL'}")
    else:
        check = decay_lab.verify_theorem(series, params, "L2_only", cfg.bound_factor)
        rows = []
        for name, d in check.details.items():
            try:
                fit = decay_lab.fit_decay_exponent(series, name, cfg.fit_window)
                slope, stderr = fit.slope, fit.stderr
            except ValueError:
                slope, stderr = math.nan, math.nan
            rows.append((name, slope, stderr, -d["rate"], cfg.bound_factor, d["pass"]))
            say(f"{name:6s} max norm*(1+t)^{d['rate']:g} / value at t=1: {d['worst_ratio']:.6f}"
                f"  bound {cfg.bound_factor:g}  {'PASS' if d['pass'] else 'FAIL'}")
        _write_csv(out_dir / "report.csv", header, rows)
    say(f"scenario: {'PASS' if check.passed else 'FAIL'} ({cfg.regularity}, n={cfg.n}, Q={params.Q})")
    return EXIT_OK if check.passed else EXIT_FAIL


def propcheck_samples(samples: int, seed: int):
    """(z, t, v0, v1) triples; the first is the degenerate case z = 1/4, t = 2, (0, 1)."""
    rng = np.random.default_rng(seed)
    out = [(0.25, 2.0, 0j, 1 + 0j)]
    for _ in range(samples - 1):
        z = 10.0 ** rng.uniform(-6.0, 3.0)
        t = rng.uniform(0.0, 200.0)
        v0, v1 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        out.append((z, t, complex(v0), complex(v1)))
    return out


def cmd_propcheck(samples: int, seed: int, out_dir: Path | None, say) -> int:
    if samples < 1:
        say("propcheck: --samples must be at least 1")
        return EXIT_CONFIG
    cfg = IntegratorConfig(rel_tol=1e-12)
    rows = []
    worst = (0.0, None)
    for z, t, v0, v1 in propcheck_samples(samples, seed):
        try:
            ref = integrate_mode(t, z, v0, v1, cfg)
        except OracleError as exc:
            say(f"propcheck: oracle failed at z={z:.17g} t={t:.17g}: {exc}")
            return EXIT_NUMERIC
        got = evolve_mode(t, z, v0, v1)
        diff = math.hypot(abs(got.v - ref.v), abs(got.v_dot - ref.v_dot))
        size = math.hypot(abs(ref.v), abs(ref.v_dot))
        dev = diff / size if size > 0 else diff
        rows.append((z, t, dev))
        if dev >= worst[0]:
            worst = (dev, (z, t))
    if out_dir is not None:
        _write_csv(out_dir / "propcheck.csv", ["z", "t", "rel_dev"], rows)
    dev, (z, t) = worst
    ok = dev <= PROPCHECK_TOL
    say(f"propcheck: samples={samples} seed={seed} max_rel_dev={dev:.3e} at z={z:.6g} t={t:.6g}"
        f" tol={PROPCHECK_TOL:g} {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def _check_indices(count: int, nodes: int) -> set[int]:
    if count <= 0:
        return set()
    return {int(round(i)) for i in np.linspace(0, nodes - 1, min(count, nodes))}


def gft_run(cfg: RunConfig):
    """Transform the configured function on the positive half of the grid.

    Returns a dict with the nodes, weights, Hilbert-Schmidt and operator
    norms, and both sides of the Plancherel identity.
    """
    if cfg.n != 1:
        raise ConfigError("gftcheck transforms functions on H_1 only", key="group.n")
    params = _params(cfg)
    f = gaussian(cfg.gft_half_width) if cfg.gft_function == "gaussian" else zero_function(cfg.gft_half_width)
    grid = build_grid(params, cfg.lambda_min, cfg.lambda_max, cfg.panels, cfg.points, symmetric=False)
    l1 = l1_norm(f)
    base = TransformRules(points=cfg.gft_points, refine=cfg.gft_refine, tol=cfg.gft_tol,
                          floor_scale=1e-9 * l1)
    checked = _check_indices(cfg.gft_check_nodes, len(grid))
    hs2 = np.empty(len(grid))
    opn = np.empty(len(grid))
    for i, lam in enumerate(grid.nodes):
        rules = TransformRules(base.points, base.refine, i in checked, base.tol, base.floor_scale)
        mat = group_fourier(f, lam, cfg.k_max, cfg.l_max, rules)
        hs2[i] = float(np.sum(np.abs(mat) ** 2))
        opn[i] = operator_norm(mat)
    # a real f has f_hat(-lambda) = conj f_hat(lambda): the mirrored half has equal norms
    mirror = 2.0 if cfg.symmetric else 1.0
    integral = mirror * pairwise_sum(grid.weights * np.abs(grid.nodes) ** params.n * hs2)
    return {
        "params": params, "function": f, "nodes": grid.nodes, "weights": grid.weights,
        "hs2": hs2, "op_norm": opn, "integral": integral,
        "plancherel_norm": math.sqrt(params.c_n * integral),
        "l2": l2_norm(f), "l1": l1,
    }


def cmd_gftcheck(cfg: RunConfig, out_dir: Path | None, say) -> int:
    try:
        res = gft_run(cfg)
    except (ResolutionError, TruncationError) as exc:
        say(f"gftcheck: numerical failure: {exc}")
        return EXIT_NUMERIC
    l2, pl, l1 = res["l2"], res["plancherel_norm"], res["l1"]
    gap = abs(pl - l2) / l2 if l2 > 0 else (0.0 if pl == 0 else math.inf)
    margins = l1 - res["op_norm"]
    margin = float(np.min(margins))
    if out_dir is not None:
        _write_csv(out_dir / "gft.csv", ["lambda", "hs_norm", "op_norm", "rl_margin"],
                   zip(res["nodes"], np.sqrt(res["hs2"]), res["op_norm"], margins))
    ok_gap = gap <= cfg.gft_gap
    ok_rl = margin >= 0.0
    say(f"gftcheck: function={res['function'].name} c_n={res['params'].c_n:.17g}")
    say(f"grid-side L2 norm        {l2:.17g}")
    say(f"Plancherel-side L2 norm  {pl:.17g}")
    say(f"relative gap             {gap:.6e} (allowed {cfg.gft_gap:g}) {'PASS' if ok_gap else 'FAIL'}")
    say(f"Riemann-Lebesgue margin  {margin:.6e} (L1 norm {l1:.17g}) {'PASS' if ok_rl else 'FAIL'}")
    if res["integral"] > 0:
        say(f"constant matching the grid-side norm: {l2 ** 2 / res['integral']:.6e}")
    return EXIT_OK if ok_gap and ok_rl else EXIT_FAIL


def cmd_tailbound(n: int, k_max: int, out_dir: Path | None, say) -> int:
    if n < 1 or k_max < -1:
        say("tailbound: need n >= 1 and k_max >= -1")
        return EXIT_CONFIG
    full = tail_bound(n, -1).value
    tail = tail_bound(n, k_max).value
    say(f"tailbound: n={n} k_max={k_max} tail={tail:.17g} full_series={full:.17g}"
        f" partial_sum={full - tail:.17g}")
    if out_dir is not None:
        ks = sorted({-1, 0, 1, 2, 4, 8, 16, 32, 64, k_max})
        _write_csv(out_dir / "tailbound.csv", ["n", "k_max", "tail"],
                   [(n, k, tail_bound(n, k).value) for k in ks])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heisenberg-damped", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=False):
        p.add_argument("--config", required=config_required,
                       help="config file, or the name of a bundled config")
        p.add_argument("--out", type=Path, default=None, help="directory for CSV output")
        p.add_argument("--quiet", action="store_true", help="suppress stdout")

    common(sub.add_parser("scenario", help="run a decay scenario"), config_required=True)
    p = sub.add_parser("propcheck", help="propagator against the adaptive integrator")
    common(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    common(sub.add_parser("gftcheck", help="Plancherel check of a transformed test function"))
    p = sub.add_parser("tailbound", help="tail of sum_k (2|k|+n)^-(n+1)")
    common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--kmax", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    say = _Out(args.quiet)
    try:
        cfg = None
        if args.config is not None:
            cfg = load_config(args.config)
        elif args.command == "gftcheck":
            cfg = load_config("gauss_h1")
        if args.command == "scenario":
            return cmd_scenario(cfg, args.out or Path("."), say)
        if args.command == "propcheck":
            return cmd_propcheck(args.samples, args.seed, args.out, say)
        if args.command == "gftcheck":
            return cmd_gftcheck(cfg, args.out, say)
        n = args.n if args.n is not None else (cfg.n if cfg else 1)
        k_max = args.kmax if args.kmax is not None else (cfg.k_max if cfg else -1)
        return cmd_tailbound(n, k_max, args.out, say)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
