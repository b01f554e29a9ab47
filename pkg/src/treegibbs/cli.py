"""Command-line harness: reproducible experiment runs over all modules.

Commands: solve | converge | sample | gamma | laplace | diffuse | moments.
Every command is a pure function of (config, seed): rerunning with the same
inputs emits byte-identical output.  Exit codes: 0 ok, 2 config/model
error, 3 resource limit, 4 a verification command failed its threshold.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import asymptotics, infinite, limits
from .config import ConfigError, load_config, model_from_config
from .counting import WeightedCountTable
from .errors import (
    CheckFailureError,
    DomainError,
    InvalidModelError,
    ResourceLimitError,
)
from .model import critical_params
from .seeding import DEFAULT_SEED, make_rng

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_CHECK = 4


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _rows_to_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(row[h]) for h in header) for row in rows)
    return "\n".join(lines) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _to_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _note(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _seed_of(args, cfg) -> int:
    if args.seed is not None:
        return args.seed
    return int(cfg.get("seed", DEFAULT_SEED))


def _opt(args, cfg, command, key, default):
    """Flag value if given, else the config section's, else the default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    section = cfg.get(command, {})
    if isinstance(section, dict) and key in section:
        return section[key]
    return default


def _model(args, cfg):
    overrides = {"D": args.D, "beta": args.beta}
    if args.E is not None:
        try:
            overrides["E"] = [float(x) for x in args.E.split(",")]
        except ValueError as exc:
            raise InvalidModelError(f"bad --E list {args.E!r}") from exc
    return model_from_config(cfg, overrides)


def cmd_solve(args, cfg):
    params = critical_params(_model(args, cfg))
    record = params.to_record()
    if args.format == "csv":
        text = _rows_to_csv(list(record), [record])
    else:
        text = _to_json(record)
    return text, None


def cmd_converge(args, cfg):
    model = _model(args, cfg)
    n = int(_opt(args, cfg, "converge", "n", 1))
    N_list = _opt(args, cfg, "converge", "N", [16, 32, 64, 128, 256, 512])
    N_list = [int(N) for N in N_list]
    params = critical_params(model)
    table = WeightedCountTable(model, max(N_list))
    atoms = limits.enumerate_neighborhoods(n, model.D)
    rows = []
    for N in N_list:
        tv = limits.tv_distance(N, n, model, params=params, table=table, atoms=atoms)
        rows.append({"N": N, "n": n, "tv_distance": tv})
    tvs = [r["tv_distance"] for r in rows]
    inversions = sum(1 for a, b in zip(tvs, tvs[1:]) if b > a)
    passed = inversions <= 1 and tvs[-1] < tvs[0] / 3.0
    if args.format == "csv":
        text = _rows_to_csv(["N", "n", "tv_distance"], rows)
    else:
        text = _to_json({"rows": rows, "inversions": inversions, "passed": passed})
    return text, passed


def cmd_sample(args, cfg):
    model = _model(args, cfg)
    levels = int(_opt(args, cfg, "sample", "levels", 20))
    seed = _seed_of(args, cfg)
    params = critical_params(model)
    rng = make_rng(seed, "sample", 0)
    traj = infinite.sample_trajectory(
        levels, params, rng, seed_info=f"master={seed} path=(sample,0)"
    )
    if args.format == "json":
        text = _to_json(
            {
                "seed_info": traj.seed_info,
                "levels": [[int(v) for v in g] for g in traj.levels],
            }
        )
    else:
        text = traj.to_text()
    return text, None


def cmd_gamma(args, cfg):
    model = _model(args, cfg)
    n = int(_opt(args, cfg, "gamma", "n", 500))
    samples = int(_opt(args, cfg, "gamma", "samples", 100_000))
    threshold = float(_opt(args, cfg, "gamma", "threshold", 0.02))
    seed = _seed_of(args, cfg)
    params = critical_params(model)
    ks = asymptotics.gamma_limit_test(n, samples, params, make_rng(seed, "gamma"))
    row = {
        "test": "gamma_limit_ks",
        "n": n,
        "samples": samples,
        "statistic": ks.statistic,
        "pvalue": ks.pvalue,
        "threshold": threshold,
        "passed": ks.statistic < threshold,
    }
    if args.format == "csv":
        text = _rows_to_csv(list(row), [row])
    else:
        y = infinite.sample_level_sizes(n, params, make_rng(seed, "gamma", "hist"), 20_000)
        rescaled = y * 2.0 / (params.mu * n)
        counts, edges = np.histogram(rescaled, bins=60, range=(0.0, 12.0))
        payload = dict(row)
        payload["histogram"] = {
            "bin_edges": [float(e) for e in edges],
            "counts": [int(c) for c in counts],
        }
        text = _to_json(payload)
    return text, row["passed"]


def cmd_laplace(args, cfg):
    model = _model(args, cfg)
    x = float(_opt(args, cfg, "laplace", "x", -1.0))
    n_values = [int(v) for v in _opt(args, cfg, "laplace", "n_values", [10, 100, 1000, 10000])]
    params = critical_params(model)
    limit = 1.0 / (1.0 - params.mu * x / 2.0) ** 2
    rows = []
    oracle_ok = True
    for n in n_values:
        value = asymptotics.laplace_exact(n, x, params)
        row = {
            "n": n,
            "x": x,
            "value": value,
            "limit": limit,
            "abs_error": abs(value - limit),
        }
        if n <= 12:
            oracle = asymptotics.laplace_via_distribution(n, x, params)
            row["oracle"] = oracle
            row["oracle_gap"] = abs(value - oracle)
            oracle_ok = oracle_ok and row["oracle_gap"] < 1e-9
        else:
            row["oracle"] = ""
            row["oracle_gap"] = ""
        rows.append(row)
    passed = oracle_ok and rows[-1]["abs_error"] < 5e-3
    header = ["n", "x", "value", "limit", "abs_error", "oracle", "oracle_gap"]
    if args.format == "csv":
        text = _rows_to_csv(header, rows)
    else:
        text = _to_json({"rows": rows, "passed": passed})
    return text, passed


def cmd_diffuse(args, cfg):
    model = _model(args, cfg)
    paths = int(_opt(args, cfg, "diffuse", "paths", 100_000))
    dt = float(_opt(args, cfg, "diffuse", "dt", 1e-3))
    t_end = float(_opt(args, cfg, "diffuse", "t_end", 1.0))
    r = int(_opt(args, cfg, "diffuse", "r", 2))
    chain_steps = int(_opt(args, cfg, "diffuse", "chain_steps", 400))
    chain_paths = int(_opt(args, cfg, "diffuse", "chain_paths", 10_000))
    seed = _seed_of(args, cfg)
    params = critical_params(model)
    mu = params.mu

    path = asymptotics.simulate_besq(
        t_end, dt, params, make_rng(seed, "diffuse", "scalar"), paths=paths
    )
    z = path.at(t_end)
    mean = float(z.mean())
    var = float(z.var())
    ks = asymptotics.ks_test(z * 2.0 / (mu * t_end), asymptotics.gamma2_cdf)
    stats = asymptotics.group_increment_stats(
        chain_steps, chain_paths, params, make_rng(seed, "diffuse", "groups"), r=r
    )
    rows = [
        {
            "test": "besq_mean",
            "value": mean,
            "target": mu * t_end,
            "threshold": 0.01,
            "passed": abs(mean - mu * t_end) < 0.01 * mu * t_end,
        },
        {
            "test": "besq_variance",
            "value": var,
            "target": mu**2 * t_end**2 / 2.0,
            "threshold": 0.03,
            "passed": abs(var - mu**2 * t_end**2 / 2.0) < 0.03 * mu**2 * t_end**2 / 2.0,
        },
        {
            "test": "besq_gamma_ks",
            "value": ks.statistic,
            "target": 0.0,
            "threshold": 0.02,
            "passed": ks.statistic < 0.02,
        },
        {
            "test": "group_drift_z",
            "value": stats.drift_z,
            "target": 0.0,
            "threshold": 3.0,
            "passed": abs(stats.drift_z) < 3.0,
        },
        {
            "test": "group_cross_z",
            "value": stats.cross_z,
            "target": 0.0,
            "threshold": 3.0,
            "passed": abs(stats.cross_z) < 3.0,
        },
    ]
    passed = all(row["passed"] for row in rows)
    if args.format == "csv":
        text = _rows_to_csv(["test", "value", "target", "threshold", "passed"], rows)
    else:
        counts, edges = np.histogram(z * 2.0 / (mu * t_end), bins=60, range=(0.0, 12.0))
        text = _to_json(
            {
                "rows": rows,
                "passed": passed,
                "histogram": {
                    "bin_edges": [float(e) for e in edges],
                    "counts": [int(c) for c in counts],
                },
            }
        )
    return text, passed


def cmd_moments(args, cfg):
    model = _model(args, cfg)
    k_max = int(_opt(args, cfg, "moments", "k_max", 4))
    if model.D > 6 or k_max > 6:
        raise ResourceLimitError("exhaustive moment check capped at D <= 6, k <= 6")
    params = critical_params(model)
    rows = []
    worst = 0.0
    for k in range(1, k_max + 1):
        for order in range(1, 5):
            formula = infinite.conditional_moment_formula(k, order, params)
            exhaustive = infinite.conditional_moment_exhaustive(k, order, params)
            rel = abs(formula - exhaustive) / max(abs(formula), 1.0)
            worst = max(worst, rel)
            rows.append(
                {
                    "k": k,
                    "order": order,
                    "formula": formula,
                    "exhaustive": exhaustive,
                    "rel_error": rel,
                }
            )
    passed = worst < 1e-10
    if args.format == "csv":
        text = _rows_to_csv(["k", "order", "formula", "exhaustive", "rel_error"], rows)
    else:
        text = _to_json({"rows": rows, "worst_rel_error": worst, "passed": passed})
    return text, passed


_COMMANDS = {
    "solve": cmd_solve,
    "converge": cmd_converge,
    "sample": cmd_sample,
    "gamma": cmd_gamma,
    "laplace": cmd_laplace,
    "diffuse": cmd_diffuse,
    "moments": cmd_moments,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="64-bit master seed")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--quiet", action="store_true", help="suppress status lines")
    common.add_argument("--D", type=int, help="override model branching bound")
    common.add_argument("--E", help="override model energies, comma-separated")
    common.add_argument("--beta", type=float, help="override inverse temperature")

    parser = argparse.ArgumentParser(
        prog="treegibbs",
        description="Gibbs ensembles on bounded-branching plane trees",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "critical parameters of the energy model",
        "converge": "total-variation distance of finite projections to the limit",
        "sample": "sample levels of the limiting infinite tree",
        "gamma": "KS check of the rescaled level size against the gamma law",
        "laplace": "Laplace-transform iteration table",
        "diffuse": "diffusion-approximation checks (scalar and group SDE)",
        "moments": "exhaustive verification of the conditional-moment formulas",
    }
    p = sub.add_parser("solve", parents=[common], help=helps["solve"])
    p = sub.add_parser("converge", parents=[common], help=helps["converge"])
    p.add_argument("--n", type=int, help="neighborhood height (default 1)")
    p.add_argument("--N", type=int, nargs="+", help="tree orders to evaluate")
    p = sub.add_parser("sample", parents=[common], help=helps["sample"])
    p.add_argument("--levels", type=int, help="number of levels (default 20)")
    p = sub.add_parser("gamma", parents=[common], help=helps["gamma"])
    p.add_argument("--n", type=int, help="chain length (default 500)")
    p.add_argument("--samples", type=int, help="trajectories (default 100000)")
    p.add_argument("--threshold", type=float, help="KS pass threshold (default 0.02)")
    p = sub.add_parser("laplace", parents=[common], help=helps["laplace"])
    p.add_argument("--x", type=float, help="transform argument <= 0 (default -1)")
    p.add_argument("--n-values", dest="n_values", type=int, nargs="+")
    p = sub.add_parser("diffuse", parents=[common], help=helps["diffuse"])
    p.add_argument("--paths", type=int, help="SDE paths (default 100000)")
    p.add_argument("--dt", type=float, help="Euler step (default 1e-3)")
    p.add_argument("--t-end", dest="t_end", type=float, help="horizon (default 1.0)")
    p.add_argument("--r", type=int, help="number of groups (default 2)")
    p.add_argument("--chain-steps", dest="chain_steps", type=int)
    p.add_argument("--chain-paths", dest="chain_paths", type=int)
    p = sub.add_parser("moments", parents=[common], help=helps["moments"])
    p.add_argument("--k-max", dest="k_max", type=int, help="largest level size (default 4)")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        text, passed = _COMMANDS[args.command](args, cfg)
    except (InvalidModelError, ConfigError) as exc:
        _error(exc)
        return EXIT_CONFIG
    except DomainError as exc:
        _error(exc)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        _error(exc)
        return EXIT_RESOURCE
    except CheckFailureError as exc:
        _error(exc)
        return EXIT_CHECK
    _emit(text, args.out)
    if passed is None:
        _note(args, f"{args.command}: ok")
        return EXIT_OK
    if passed:
        _note(args, f"{args.command}: checks passed")
        return EXIT_OK
    _note(args, f"{args.command}: CHECK FAILED")
    return EXIT_CHECK


def _error(exc) -> None:
    payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
