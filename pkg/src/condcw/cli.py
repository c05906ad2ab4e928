"""Command-line front end.

Every output file starts with a ``#`` line holding the resolved parameters,
so any run can be repeated exactly.  Floats are written with 17 significant
digits, which makes reruns byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from condcw import __version__
from condcw.errors import ParameterError
from condcw.exactn import convergence_study, errors_decay, exact_moments
from condcw.mcsim import DYNAMICS, RNG_ALGORITHM, ChainConfig, run_chain
from condcw.model import FiniteModel, ModelParams, magnetization_from_z, validate_beta, validate_fractions
from condcw.phase import classify_region, classify_transition
from condcw.solver import directional_limits, minimize_free_energy

MODES = ("sweep-h", "sweep-beta", "diagram", "solve", "limits", "exact", "mc", "compare")
DEFAULTS = {
    "beta": None,
    "s": 0.0,
    "r": 0.0,
    "h": 0.0,
    "h_min": None,
    "h_max": None,
    "beta_min": None,
    "beta_max": None,
    "beta_factor": None,
    "points": 101,
    "n": None,
    "mc_n": None,
    "seed": 0,
    "sweeps": 10_000,
    "burn_in": 1_000,
    "dynamics": "metropolis",
    "format": "csv",
    "out": None,
}

_MC_KEYS = ("seed", "sweeps", "burn_in", "dynamics")
MODE_KEYS = {
    "sweep-h": ("beta", "s", "r", "h_min", "h_max", "points"),
    "sweep-beta": ("s", "r", "beta_min", "beta_max", "points"),
    "diagram": ("beta", "beta_factor", "points"),
    "solve": ("beta", "s", "r", "h"),
    "limits": ("beta", "s", "r"),
    "exact": ("beta", "s", "r", "h", "n"),
    "mc": ("beta", "s", "r", "h", "n", *_MC_KEYS),
    "compare": ("beta", "s", "r", "h", "n", "mc_n", *_MC_KEYS),
}


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _header(mode: str, params: dict) -> str:
    return f"# condcw {__version__} mode={mode} params={json.dumps(params, sort_keys=True)}\n"


def _csv(mode: str, params: dict, columns: list[str], rows: list[list]) -> str:
    lines = [_header(mode, params), ",".join(columns) + "\n"]
    lines += [",".join(fmt(v) for v in row) + "\n" for row in rows]
    return "".join(lines)


def _json(mode: str, params: dict, payload: dict) -> str:
    body = {"tool": "condcw", "version": __version__, "mode": mode, "params": params, **payload}
    return _header(mode, params) + json.dumps(_jsonable(body), indent=2, sort_keys=True) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    return obj


def _table(mode: str, params: dict, columns: list[str], rows: list[list], fmt_name: str) -> str:
    if fmt_name == "json":
        return _json(mode, params, {"columns": columns, "rows": rows})
    return _csv(mode, params, columns, rows)


def _require(params: dict, *names: str) -> None:
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise ParameterError("missing required parameter(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _grid(start: float, stop: float, count: int) -> list[float]:
    if count < 2:
        raise ParameterError(f"--points must be at least 2, got {count}")
    return [start + (stop - start) * i / (count - 1) for i in range(count)]


def _sizes(value) -> list[int]:
    if isinstance(value, str):
        value = [int(v) for v in value.split(",") if v.strip()]
    elif isinstance(value, int):
        value = [value]
    sizes = [int(v) for v in value]
    if not sizes or min(sizes) <= 0:
        raise ParameterError("--n needs positive integer sizes")
    return sizes


def sweep_h(params: dict) -> tuple[list[str], list[list]]:
    """Rows (h, m, z, branch); the grid point nearest r - s becomes two limit rows."""
    _require(params, "beta", "h_min", "h_max")
    beta, s, r = params["beta"], params["s"], params["r"]
    validate_beta(beta)
    validate_fractions(s, r)
    grid = _grid(params["h_min"], params["h_max"], params["points"])
    singular = r - s
    lo, hi = min(grid), max(grid)
    nearest = min(range(len(grid)), key=lambda i: abs(grid[i] - singular)) if lo <= singular <= hi else None
    rows = []
    for i, h in enumerate(grid):
        if i == nearest:
            lim = directional_limits(beta, s, r)
            rows.append([singular, lim.m_minus, lim.z_minus, "minus"])
            rows.append([singular, lim.m_plus, lim.z_plus, "plus"])
            continue
        p = ModelParams(beta, s, r, h)
        ms = minimize_free_energy(p)
        if not ms.unique:
            raise ParameterError(f"grid point h={h!r} sits on the discontinuity; shift the grid")
        z = ms.minimizers[0]
        rows.append([h, magnetization_from_z(p, z), z, "regular"])
    rows.sort(key=lambda row: row[0])
    return ["h", "m", "z", "branch"], rows


def sweep_beta(params: dict) -> tuple[list[str], list[list]]:
    _require(params, "beta_min", "beta_max")
    s, r = params["s"], params["r"]
    rows = []
    for beta in _grid(params["beta_min"], params["beta_max"], params["points"]):
        rep = classify_transition(s, r, beta)
        lim = rep.limits
        rows.append([beta, lim.m_minus, lim.m_plus, lim.jump, rep.regime.value])
    return ["beta", "m_minus", "m_plus", "jump", "regime"], rows


def diagram(params: dict) -> tuple[list[str], list[list]]:
    """Rows over an s-by-r grid on [0, 1); inadmissible cells are marked invalid."""
    if (params.get("beta") is None) == (params.get("beta_factor") is None):
        raise ParameterError("diagram needs exactly one of --beta or --beta-factor")
    count = params["points"]
    if count < 2:
        raise ParameterError(f"--points must be at least 2, got {count}")
    axis = [i / count for i in range(count)]
    rows = []
    for s in axis:
        for r in axis:
            try:
                region = classify_region(s, r)
            except ParameterError:
                rows.append([s, r, None, None, "invalid", None])
                continue
            beta = params["beta"] if params.get("beta") is not None else params["beta_factor"] / (1.0 - s - r)
            rep = classify_transition(s, r, beta)
            rows.append([s, r, rep.beta_star, rep.beta_double_star, region.value, rep.regime.value])
    return ["s", "r", "beta_star", "beta_double_star", "region", "regime"], rows


def solve(params: dict) -> dict:
    _require(params, "beta")
    p = ModelParams(params["beta"], params["s"], params["r"], params["h"])
    ms = minimize_free_energy(p)
    out = {
        "minimizers": list(ms.minimizers),
        "value": ms.value,
        "curvature": list(ms.curvature),
        "h_eff": p.h_eff,
    }
    if ms.unique:
        out["z"] = ms.minimizers[0]
        out["m"] = magnetization_from_z(p, ms.minimizers[0])
    else:
        lim = directional_limits(p.beta, p.s, p.r)
        out["m_minus"], out["m_plus"] = lim.m_minus, lim.m_plus
    return out


def limits(params: dict) -> dict:
    _require(params, "beta")
    rep = classify_transition(params["s"], params["r"], params["beta"])
    lim = rep.limits
    return {
        "region": rep.region.value,
        "regime": rep.regime.value,
        "beta_star": rep.beta_star,
        "beta_double_star": rep.beta_double_star,
        "beta_star_distance": rep.beta_star_distance,
        "beta_double_star_distance": rep.beta_double_star_distance,
        "m_minus": lim.m_minus,
        "m_plus": lim.m_plus,
        "z_minus": lim.z_minus,
        "z_plus": lim.z_plus,
        "jump": lim.jump,
    }


def exact(params: dict) -> tuple[list[str], list[list]]:
    _require(params, "beta", "n")
    m_inf, rows = convergence_study(params["s"], params["r"], params["beta"], params["h"], _sizes(params["n"]))
    return (
        ["n", "s_n", "r_n", "mean_m", "m_inf", "abs_error"],
        [[row.n_total, row.s_n, row.r_n, row.mean_magnetization, m_inf, row.error] for row in rows],
    )


def _chain(params: dict, n_total: int):
    fm = FiniteModel.from_fractions(n_total, params["s"], params["r"])
    cfg = ChainConfig(
        fm,
        params["beta"],
        params["h"],
        seed=params["seed"],
        sweeps=params["sweeps"],
        burn_in_sweeps=params["burn_in"],
        dynamics=params["dynamics"],
    )
    est = run_chain(cfg)
    ref = exact_moments(fm, params["beta"], params["h"]).mean_magnetization
    return {
        "n": n_total,
        "s_n": fm.s_n,
        "r_n": fm.r_n,
        "mean_m": est.mean_magnetization,
        "std_error": est.std_error,
        "acceptance_rate": est.acceptance_rate,
        "final_sector": est.final_sector,
        "exact_mean_m": ref,
        "within_3se": abs(est.mean_magnetization - ref) <= 3 * est.std_error,
    }


def mc(params: dict) -> dict:
    _require(params, "beta", "n")
    return {"rng": RNG_ALGORITHM, "seed": params["seed"], "chains": [_chain(params, n) for n in _sizes(params["n"])]}


def compare(params: dict) -> dict:
    """Solver limit, exact finite-N table and MC estimates with pass flags."""
    _require(params, "beta", "n")
    m_inf, rows = convergence_study(params["s"], params["r"], params["beta"], params["h"], _sizes(params["n"]))
    errors = [row.error for row in rows]
    out = {
        "m_inf": m_inf,
        "exact": [
            {"n": row.n_total, "s_n": row.s_n, "r_n": row.r_n, "mean_m": row.mean_magnetization, "abs_error": row.error}
            for row in rows
        ],
        "rng": RNG_ALGORITHM,
        "seed": params["seed"],
    }
    flags = {"exact_error_decays": errors_decay(errors)}
    if rows[-1].n_total >= 64000:
        flags["exact_error_below_1e-3_at_largest_n"] = errors[-1] < 1e-3
    if params.get("mc_n") is not None:
        chains = [_chain(params, n) for n in _sizes(params["mc_n"])]
        out["mc"] = chains
        flags["mc_within_3se"] = all(c["within_3se"] for c in chains)
    out["checks"] = flags
    out["pass"] = all(flags.values())
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="condcw", description="Conditional Curie-Weiss model solver and checks.")
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", type=Path, help="JSON file with the same keys as the long flags")
    parser.add_argument("--beta", type=float)
    parser.add_argument("--s", type=float)
    parser.add_argument("--r", type=float)
    parser.add_argument("--h", type=float)
    parser.add_argument("--h-min", type=float)
    parser.add_argument("--h-max", type=float)
    parser.add_argument("--beta-min", type=float)
    parser.add_argument("--beta-max", type=float)
    parser.add_argument("--beta-factor", type=float, help="diagram: use beta = factor * beta_star per cell")
    parser.add_argument("--points", type=int)
    parser.add_argument("--n", help="system size(s), comma separated")
    parser.add_argument("--mc-n", help="compare: sizes for Monte Carlo, comma separated")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--sweeps", type=int)
    parser.add_argument("--burn-in", type=int)
    parser.add_argument("--dynamics", choices=DYNAMICS)
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--out", type=Path, help="output file (default: stdout)")
    return parser


def resolve_params(args: argparse.Namespace) -> dict:
    params = dict(DEFAULTS)
    if args.config is not None:
        config = json.loads(args.config.read_text())
        unknown = set(config) - set(DEFAULTS)
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        params.update(config)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    if params["out"] is not None:
        params["out"] = str(params["out"])
    return params


def render(mode: str, params: dict) -> str:
    record = {k: params[k] for k in MODE_KEYS[mode]}
    record["format"] = params["format"]
    if mode in ("mc", "compare"):
        record["rng"] = RNG_ALGORITHM
    if mode in ("sweep-h", "sweep-beta", "diagram", "exact"):
        columns, rows = {"sweep-h": sweep_h, "sweep-beta": sweep_beta, "diagram": diagram, "exact": exact}[mode](params)
        return _table(mode, record, columns, rows, params["format"])
    payload = {"solve": solve, "limits": limits, "mc": mc, "compare": compare}[mode](params)
    if params["format"] == "csv" and mode in ("solve", "limits"):
        flat = {k: v for k, v in payload.items() if not isinstance(v, list)}
        return _csv(mode, record, list(flat), [list(flat.values())])
    return _json(mode, record, payload)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        params = resolve_params(args)
        text = render(args.mode, params)
    except (ParameterError, ValueError, OSError, json.JSONDecodeError) as exc:
        code = 1 if isinstance(exc, OSError) else 2
        print(f"condcw: error: {exc}", file=sys.stderr)
        return code
    except Exception as exc:  # noqa: BLE001
        print(f"condcw: internal error: {exc!r}", file=sys.stderr)
        return 1
    try:
        if params["out"] is None:
            sys.stdout.write(text)
        else:
            with open(params["out"], "w", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"condcw: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
