"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import report
from .core import (
    Problem1D,
    eval_fe_1d,
    fixture_example1_v,
    fixture_example1_v_prime,
    fixture_f1_exact,
    fixture_f1_exact_prime,
)
from .errors import ParameterError
from .solver1d import DiscretizationConfig, error_report_1d, solve_1d
from .solver2d import assemble_2d, error_report_2d, fixture_example1, fixture_example2, solve_2d_fast
from .study import PROBLEMS_1D, PROBLEMS_2D, StudySpec, run_study
from .verify import markdown_report, run_all

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
FORMATS = ("csv", "md", "svg")

# flag defaults; None means "not given" so that JSON config values can fill in
DEFAULTS = {
    "command": None,
    "problem": None,
    "epsilon": None,
    "epsilon_policy": "fixed",
    "epsilon_scale": 1.0,
    "n": 16,
    "n_range": None,
    "bubble": "quadratic",
    "beta": "special",
    "delta": None,
    "out_dir": "out",
    "formats": "csv,md,svg",
    "y_strip": None,
    "perturb": 0.0,
    "workers": 1,
}

FIXTURES_1D = {
    "f1": ([(1.0, 0, 0.0)], fixture_f1_exact, fixture_f1_exact_prime),
    "ex": ([(1.0, 0, 1.0)], fixture_example1_v, fixture_example1_v_prime),
}

log = logging.getLogger("bubble_upg")


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bubble-upg", description="Bubble-enriched upwind Petrov-Galerkin solver.")
    p.add_argument("--command", choices=("solve1d", "solve2d", "study", "verify"))
    p.add_argument("--problem", help="1D: f1, ex; 2D: example1, example2")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--epsilon-policy", choices=("fixed", "h2", "ch2"))
    p.add_argument("--epsilon-scale", type=float, help="c in eps = c h^2")
    p.add_argument("--n", type=int, help="number of mesh intervals")
    p.add_argument("--n-range", help="'k0:k1' for n = 2^k0..2^k1, or a comma list of n")
    p.add_argument("--bubble", choices=("quadratic", "exponential"))
    p.add_argument("--beta", help="'special' or a positive number")
    p.add_argument("--delta", help="comma list of subdomain cut-offs; 'h' means one mesh width")
    p.add_argument("--out-dir")
    p.add_argument("--formats", help="comma list from csv, md, svg")
    p.add_argument("--config", help="JSON file with the same keys as the flags (flags win)")
    p.add_argument("--y-strip", type=float, help="excluded strip width at y = 0, 1 (2D)")
    p.add_argument("--perturb", type=float, help="verification self-test: shift the diagonal of the exponential matrix")
    p.add_argument("--workers", type=int)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        for k, v in loaded.items():
            key = k.replace("-", "_")
            if key not in cfg:
                raise UsageError(f"unknown config key {k!r}")
            cfg[key] = v
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    return _validate(cfg)


def _positive(name, v, kind=float):
    try:
        v = kind(v)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--{name} must be a number") from exc
    if not (math.isfinite(v) and v > 0):
        raise UsageError(f"--{name} must be positive, got {v}")
    return v


def _parse_n_range(text) -> list:
    if isinstance(text, list):
        return [int(v) for v in text]
    text = str(text)
    try:
        if ":" in text:
            k0, k1 = (int(v) for v in text.split(":"))
            return [2**k for k in range(k0, k1 + 1)]
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --n-range {text!r}") from exc


def _parse_deltas(text):
    if text is None:
        return ()
    items = text if isinstance(text, list) else str(text).split(",")
    out = []
    for d in items:
        d = str(d).strip()
        out.append("h" if d == "h" else _positive("delta", d))
    return tuple(out)


def _validate(cfg: dict) -> dict:
    if cfg["command"] is None:
        raise UsageError("--command is required")
    cmd = cfg["command"]
    if cmd not in ("solve1d", "solve2d", "study", "verify"):
        raise UsageError(f"unknown command {cmd!r}")
    if cfg["epsilon"] is not None:
        cfg["epsilon"] = _positive("epsilon", cfg["epsilon"])
    cfg["epsilon_scale"] = _positive("epsilon-scale", cfg["epsilon_scale"])
    cfg["n"] = _positive("n", cfg["n"], int)
    if cfg["beta"] != "special":
        cfg["beta"] = _positive("beta", cfg["beta"])
    cfg["workers"] = _positive("workers", cfg["workers"], int)
    if cfg["y_strip"] is not None:
        cfg["y_strip"] = float(cfg["y_strip"])
        if cfg["y_strip"] < 0:
            raise UsageError("--y-strip must be nonnegative")
    cfg["perturb"] = float(cfg["perturb"])
    fmts = cfg["formats"] if isinstance(cfg["formats"], list) else str(cfg["formats"]).split(",")
    fmts = [f.strip() for f in fmts if f.strip()]
    bad = [f for f in fmts if f not in FORMATS]
    if bad:
        raise UsageError(f"unknown output formats {bad}")
    cfg["formats"] = fmts
    cfg["deltas"] = _parse_deltas(cfg["delta"])

    if cmd in ("solve1d", "solve2d", "study"):
        if cfg["problem"] is None:
            raise UsageError("--problem is required")
        allowed = {"solve1d": ("f1", "ex"), "solve2d": PROBLEMS_2D, "study": ("f1", "ex") + PROBLEMS_2D}[cmd]
        if cfg["problem"] not in allowed:
            raise UsageError(f"--problem must be one of {', '.join(allowed)} for {cmd}")
        if cfg["epsilon_policy"] == "fixed" and cfg["epsilon"] is None:
            raise UsageError("--epsilon is required with the fixed epsilon policy")
    if cmd in ("solve1d", "solve2d") and cfg["epsilon"] is None:
        raise UsageError("--epsilon is required")
    if cmd == "study":
        if cfg["n_range"] is None:
            raise UsageError("--n-range is required for study")
        cfg["ns"] = _parse_n_range(cfg["n_range"])
    return cfg


def _out_dir(cfg) -> Path:
    out = Path(cfg["out_dir"])
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out}: {exc}") from exc
    return out


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8", newline="\n")
    log.info("wrote %s", path)


def cmd_solve1d(cfg) -> int:
    eps, n = cfg["epsilon"], cfg["n"]
    terms, exact, exact_prime = FIXTURES_1D[cfg["problem"]]
    problem = Problem1D.from_terms(eps, terms, cfg["problem"])
    u, du = exact(eps), exact_prime(eps)
    config = DiscretizationConfig(cfg["bubble"], cfg["beta"])
    sol = solve_1d(problem, n, config)
    rep = error_report_1d(u, du, sol, cfg["deltas"][0] if cfg["deltas"] and cfg["deltas"][0] != "h" else None, problem)
    x = np.linspace(0.0, 1.0, 4 * n + 1)
    uh = eval_fe_1d(sol.u_h, x)
    ue = np.asarray(u(x), dtype=float)
    out = _out_dir(cfg)
    lines = ["x,u_h,u_exact,abs_err"]
    lines += [",".join(report.fmt(float(v)) for v in row) for row in zip(x, uh, ue, np.abs(uh - ue))]
    _write(out / "solve1d.csv", "\n".join(lines) + "\n")
    rows = [
        ("problem", cfg["problem"]), ("bubble", sol.bubble.family), ("beta", sol.bubble.beta),
        ("epsilon", eps), ("n", n), ("disc_inf", rep.disc_inf), ("l2_full", rep.l2_full),
        ("h1_full", rep.h1_full), ("delta", rep.delta), ("l2_sub", rep.l2_sub), ("h1_sub", rep.h1_sub),
        ("thm_bound", rep.thm_bound), ("hypothesis_flag", rep.hypothesis), ("residual", sol.residual),
    ]
    _write(out / "summary.md", "# 1D solve\n\n" + report.markdown_table(("quantity", "value"), rows))
    print(f"disc_inf = {rep.disc_inf:.3e}")
    return EXIT_OK


def cmd_solve2d(cfg) -> int:
    eps, n = cfg["epsilon"], cfg["n"]
    problem = fixture_example1(eps) if cfg["problem"] == "example1" else fixture_example2(eps)
    beta = None if cfg["beta"] == "special" else cfg["beta"]
    sol = solve_2d_fast(assemble_2d(problem, n, beta))
    delta = cfg["deltas"][0] if cfg["deltas"] else 0.01
    delta = 1.0 / n if delta == "h" else delta
    strip = cfg["y_strip"]
    if strip is None:
        strip = 40.0 * math.sqrt(eps) if cfg["problem"] == "example2" else 0.0
    rep = error_report_2d(problem, sol, delta, strip)
    z = np.linspace(0.0, 1.0, n + 1)
    U = sol.u_h.nodal_values
    E = np.broadcast_to(problem.exact_u(z[:, None], z[None, :]), U.shape)
    out = _out_dir(cfg)
    lines = ["x,y,u_h,u_exact,abs_err"]
    for i in range(n + 1):
        for j in range(n + 1):
            lines.append(",".join(report.fmt(float(v)) for v in (z[i], z[j], U[i, j], E[i, j], abs(U[i, j] - E[i, j]))))
    _write(out / "solve2d.csv", "\n".join(lines) + "\n")
    rows = [("problem", cfg["problem"]), ("epsilon", eps), ("n", n)]
    rows += [(k, getattr(rep, k)) for k in ("disc_inf", "disc_inf_sub", "l2_full", "h1_full", "l2_sub", "h1_sub",
                                            "max_uh_sub", "max_interp_sub", "delta", "y_strip", "empty_subdomain")]
    rows += [("boundary_mismatch", problem.boundary_mismatch), ("residual", sol.residual)]
    _write(out / "summary.md", "# 2D solve\n\n" + report.markdown_table(("quantity", "value"), rows))
    print(f"disc_inf = {rep.disc_inf:.3e}")
    return EXIT_OK


def cmd_study(cfg) -> int:
    try:
        spec = StudySpec(
            problem=cfg["problem"], ns=cfg["ns"], epsilon=cfg["epsilon"], epsilon_policy=cfg["epsilon_policy"],
            epsilon_scale=cfg["epsilon_scale"], bubble=cfg["bubble"], beta=cfg["beta"], deltas=cfg["deltas"],
            y_strip=cfg["y_strip"], workers=cfg["workers"],
        )
    except ParameterError as exc:
        raise UsageError(str(exc)) from exc
    result = run_study(spec)
    out = _out_dir(cfg)
    stem = f"study_{spec.problem}"
    if "csv" in cfg["formats"]:
        _write(out / f"{stem}.csv", report.to_csv(result))
    if "md" in cfg["formats"]:
        _write(out / f"{stem}.md", report.to_markdown(result))
    if "svg" in cfg["formats"]:
        _write(out / f"{stem}.svg", report.to_svg(result))
    failed = [r for r in result.rows if r.status.startswith("failed")]
    for r in failed:
        print(f"n={r.n}: {r.status}", file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_verify(cfg) -> int:
    results = run_all(cfg["perturb"])
    out = _out_dir(cfg)
    _write(out / "verify.md", markdown_report(results))
    bad = [r for r in results if not r.passed]
    for r in bad:
        print(f"FAIL {r.suite} [{r.case}]: residual {r.residual:.3e} > {r.threshold:.0e}", file=sys.stderr)
    print(f"{len(results) - len(bad)}/{len(results)} checks passed")
    return EXIT_VERIFY if bad else EXIT_OK


COMMANDS = {"solve1d": cmd_solve1d, "solve2d": cmd_solve2d, "study": cmd_study, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with 2 on malformed flags
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg["command"]](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, RuntimeError, ValueError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
