"""Command-line interface.

Subcommands: ``solve`` (run the scheme, write CSV snapshots plus a metadata
JSON that can be re-fed as a config to reproduce the run bit for bit),
``convergence`` (Barenblatt error table with observed order),
``consistency`` (discrete operator against the exact p-Laplacian on
``|x|^2``), ``properties`` (randomized structural checks, JSON report), and
``constants`` (mollifier constants table).

Configuration comes from one JSON file via ``--config``; every field can
be overridden on the command line as ``--key=value`` with dotted paths for
nested fields (``--cfl.mode=theoretical``). Unknown keys are rejected.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 I/O
failure, 4 numerical failure (blow-up, quadrature), 5 property violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from .analysis import (
    consistency_table,
    convergence_study,
    observed_order,
    run_property_suite,
)
from .errors import BlowUpError, ConfigurationError, QuadratureError
from .exact import barenblatt_data
from .mollifier import REFERENCE_BOUNDS, mollifier_constants
from .operators import _check_p, grid_radius
from .stepping import (
    HolderData,
    cfl_report,
    constant_data,
    iter_levels,
    plan_config,
)

DEFAULTS = {
    "p": 4.0,
    "d": 1,
    "T": 1.0,
    "half_width": 2.0,
    "h": 0.01,
    "r": None,
    "coupling_c": 0.1,
    "tau": None,
    "num_steps": None,
    "cfl": {"mode": "practical", "c": 0.2},
    "extension": "zero",
    "data": {"kind": "barenblatt", "t_shift": 1.0},
    "snapshot_times": [1.0],
    "levels": [0.04, 0.02, 0.01, 0.005],
    "r_levels": [0.4, 0.2, 0.1, 0.05],
    "window": 0.15,
    "samples": 1000,
    "seed": 20260817,
    "output_dir": ".",
    "threads": 0,
}

_NUMBER = (int, float)

# key -> (accepted types, nullable); nested dicts hold their own tables
_SCHEMA = {
    "p": (_NUMBER, False),
    "d": ((int,), False),
    "T": (_NUMBER, False),
    "half_width": (_NUMBER, False),
    "h": (_NUMBER, True),
    "r": (_NUMBER, True),
    "coupling_c": (_NUMBER, False),
    "tau": (_NUMBER, True),
    "num_steps": ((int,), True),
    "cfl": {
        "mode": ((str,), False),
        "c": (_NUMBER, False),
    },
    "extension": ((str,), False),
    "data": {
        "kind": ((str,), False),
        "t_shift": (_NUMBER, False),
        "u0": (_NUMBER, False),
        "f": (_NUMBER, False),
        "u0_table": ((list,), False),
        "f_table": ((list,), False),
        "a": (_NUMBER, False),
        "L_u0": (_NUMBER, False),
        "L_f": (_NUMBER, False),
        "sup_u0": (_NUMBER, False),
        "sup_f": (_NUMBER, False),
        "support_radius": (_NUMBER, True),
    },
    "snapshot_times": ((list,), False),
    "levels": ((list,), False),
    "r_levels": ((list,), False),
    "window": (_NUMBER, False),
    "samples": ((int,), False),
    "seed": ((int,), False),
    "output_dir": ((str,), False),
    "threads": ((int,), False),
}


def _validate(cfg: dict, schema=None, path="") -> None:
    schema = _SCHEMA if schema is None else schema
    for key, val in cfg.items():
        where = f"{path}{key}"
        if key not in schema:
            raise ConfigurationError(f"unknown config key: {where}")
        rule = schema[key]
        if isinstance(rule, dict):
            if not isinstance(val, dict):
                raise ConfigurationError(f"{where} must be an object")
            _validate(val, rule, where + ".")
            continue
        types, nullable = rule
        if val is None:
            if not nullable:
                raise ConfigurationError(f"{where} must not be null")
            continue
        if isinstance(val, bool) or not isinstance(val, types):
            raise ConfigurationError(
                f"{where} has type {type(val).__name__}, expected "
                + " or ".join(t.__name__ for t in types)
            )


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _parse_overrides(tokens) -> dict:
    out: dict = {}
    for tok in tokens:
        if not tok.startswith("--") or "=" not in tok:
            raise ConfigurationError(
                f"unrecognized argument {tok!r}; overrides look like --key=value"
            )
        key, _, raw = tok[2:].partition("=")
        if not key:
            raise ConfigurationError(f"empty key in override {tok!r}")
        try:
            val = json.loads(raw)
        except json.JSONDecodeError:
            val = raw
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigurationError(f"conflicting overrides at {key!r}")
        node[parts[-1]] = val
    return out


def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ConfigurationError("config file must hold a JSON object")
    if "config" in obj and "derived" in obj:
        # a solve metadata file; its config block reproduces the run
        obj = obj["config"]
        if not isinstance(obj, dict):
            raise ConfigurationError("metadata config block must be an object")
    return obj


def _resolve(args, extra_defaults=None) -> dict:
    cfg = DEFAULTS
    if extra_defaults:
        cfg = _merge(cfg, extra_defaults)
    if args.config is not None:
        cfg = _merge(cfg, _load_config_file(args.config))
    cfg = _merge(cfg, _parse_overrides(args.overrides))
    _validate(cfg)
    _check_p(cfg["p"])
    return cfg


def _resolve_threads(args, cfg) -> int:
    if args.threads is not None:
        t = args.threads
    else:
        env = os.environ.get("PLAPFD_THREADS")
        if env is not None:
            try:
                t = int(env)
            except ValueError:
                raise ConfigurationError(f"PLAPFD_THREADS must be an integer (got {env!r})")
        else:
            t = cfg["threads"]
    if t < 0:
        raise ConfigurationError(f"threads must be >= 0 (got {t})")
    # kernels are vectorized single-threaded; the value is validated and
    # recorded so configs stay portable, and results never depend on it
    return int(t)


def _interp_table(table, name):
    try:
        xs = np.array([float(row[0]) for row in table])
        vs = np.array([float(row[1]) for row in table])
    except (TypeError, ValueError, IndexError):
        raise ConfigurationError(f"{name} must be a list of [x, value] pairs")
    if len(xs) < 2 or np.any(np.diff(xs) <= 0):
        raise ConfigurationError(f"{name} needs at least 2 rows with increasing x")

    def fn(x):
        return np.interp(x, xs, vs)

    return fn


def _build_data(cfg: dict) -> HolderData:
    spec = cfg["data"]
    kind = spec["kind"]
    if kind == "barenblatt":
        return barenblatt_data(
            cfg["p"], horizon=cfg["T"], d=cfg["d"], t_shift=spec.get("t_shift", 1.0)
        )
    if kind == "constant":
        return constant_data(spec.get("u0", 0.0), spec.get("f", 0.0))
    if kind == "tabulated":
        if cfg["d"] != 1:
            raise ConfigurationError("tabulated data is one-dimensional")
        missing = [k for k in ("a", "L_u0", "L_f", "sup_u0", "sup_f") if k not in spec]
        if missing:
            raise ConfigurationError(
                "tabulated data needs explicit regularity constants: missing "
                + ", ".join(missing)
            )
        u0 = (
            _interp_table(spec["u0_table"], "data.u0_table")
            if "u0_table" in spec
            else (lambda x: np.zeros_like(x))
        )
        f = (
            _interp_table(spec["f_table"], "data.f_table")
            if "f_table" in spec
            else (lambda x: np.zeros_like(x))
        )
        return HolderData(
            u0=u0,
            f=f,
            a=spec["a"],
            L_u0=spec["L_u0"],
            L_f=spec["L_f"],
            sup_u0=spec["sup_u0"],
            sup_f=spec["sup_f"],
            support_radius=spec.get("support_radius"),
        )
    raise ConfigurationError(f"unknown data kind {kind!r}")


def _plan(cfg: dict, data: HolderData):
    return plan_config(
        cfg["p"],
        cfg["d"],
        cfg["T"],
        cfg["half_width"],
        data,
        h=cfg["h"],
        r=cfg["r"],
        cfl_mode=cfg["cfl"]["mode"],
        c_practical=cfg["cfl"]["c"],
        coupling_c=cfg["coupling_c"],
        tau=cfg["tau"],
        num_steps=cfg["num_steps"],
        extension=cfg["extension"],
    )


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _require_dir(path: str) -> None:
    if not os.path.isdir(path):
        raise FileNotFoundError(f"output directory does not exist: {path}")


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _write_snapshot(path: str, field) -> None:
    ax = field.axis()
    if field.d == 1:
        header = ["x", "u"]
    else:
        header = [f"x{i + 1}" for i in range(field.d)] + ["u"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for idx in np.ndindex(field.values.shape):
            row = [_fmt(ax[i]) for i in idx]
            row.append(_fmt(field.values[idx]))
            writer.writerow(row)


def cmd_solve(cfg: dict, threads: int) -> int:
    _require_dir(cfg["output_dir"])
    data = _build_data(cfg)
    config = _plan(cfg, data)
    snap_times = [float(t) for t in cfg["snapshot_times"]]
    for t in snap_times:
        if t < 0.0 or t > config.T * (1.0 + 1e-12):
            raise ConfigurationError(f"snapshot time {t} outside [0, {config.T}]")
    target = {}
    for k, t in enumerate(snap_times):
        j = min(config.N, max(0, int(round(t / config.tau))))
        target.setdefault(j, []).append(k)
    outputs = [None] * len(snap_times)
    for j, lvl in enumerate(iter_levels(config, data)):
        if j in target:
            for k in target[j]:
                name = f"snapshot_{k:02d}.csv"
                _write_snapshot(os.path.join(cfg["output_dir"], name), lvl)
                outputs[k] = {
                    "file": name,
                    "requested_t": snap_times[k],
                    "level": j,
                    "t": j * config.tau,
                }
    resolved = _merge(
        cfg,
        {
            "h": config.h,
            "r": config.r,
            "tau": config.tau,
            "num_steps": config.N,
            "threads": threads,
        },
    )
    report = cfl_report(config, data)
    metadata = {
        "config": resolved,
        "derived": {
            "N": config.N,
            "tau": config.tau,
            "nodes_per_axis": 2 * grid_radius(config.h, config.half_width) + 1,
            "cfl_mode": config.cfl_mode,
            "Ktilde": _json_safe(report["Ktilde"]),
            "C": _json_safe(report["C"]),
            "tau_max_theoretical": _json_safe(report["tau_max_theoretical"]),
            "M_bound": report["M_bound"],
            "stencil_size": report["stencil_size"],
            "seed": cfg["seed"],
        },
        "outputs": {"snapshots": outputs},
    }
    meta_path = os.path.join(cfg["output_dir"], "metadata.json")
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for entry in outputs:
        print(f"wrote {entry['file']} (level {entry['level']}, t = {entry['t']:.6g})")
    print(f"wrote metadata.json (N = {config.N}, tau = {config.tau:.6g})")
    return 0


def cmd_convergence(cfg: dict, threads: int) -> int:
    _require_dir(cfg["output_dir"])
    if cfg["d"] != 1:
        raise ConfigurationError("the convergence benchmark is one-dimensional")
    if cfg["cfl"]["mode"] != "practical":
        raise ConfigurationError("the convergence benchmark uses the practical step rule")
    hs = [float(h) for h in cfg["levels"]]
    if len(set(hs)) < 3:
        raise ConfigurationError("need at least 3 distinct mesh sizes in 'levels'")
    rows = convergence_study(
        cfg["p"],
        hs,
        T=cfg["T"],
        half_width=cfg["half_width"],
        t_shift=cfg["data"].get("t_shift", 1.0),
        c_practical=cfg["cfl"]["c"],
    )
    csv_path = os.path.join(cfg["output_dir"], "errors.csv")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(["h", "r", "tau", "sup_error", "runtime_seconds"])
        for row in rows:
            writer.writerow(
                [_fmt(row.h), _fmt(row.r), _fmt(row.tau), _fmt(row.sup_error), _fmt(row.runtime_seconds)]
            )
    dat_path = os.path.join(cfg["output_dir"], "convergence_loglog.dat")
    with open(dat_path, "w", encoding="utf-8") as fh:
        fh.write("# log10(h) log10(sup_error)\n")
        for row in rows:
            fh.write(f"{math.log10(row.h):.17g} {math.log10(row.sup_error):.17g}\n")
    order = observed_order(rows)
    for row in rows:
        print(f"h = {row.h:<10.6g} sup_error = {row.sup_error:.6e} ({row.runtime_seconds:.2f} s)")
    print(f"observed order: {order:.4f}")
    print(f"wrote {csv_path} and {dat_path}")
    return 0


def cmd_consistency(cfg: dict, threads: int) -> int:
    rows = consistency_table(
        cfg["p"],
        cfg["d"],
        [float(r) for r in cfg["r_levels"]],
        window=cfg["window"],
        coupling_c=cfg["coupling_c"],
    )
    print(f"{'r':>12} {'h':>12} {'offsets':>8} {'max_error':>14} {'off_origin':>14}")
    for row in rows:
        print(
            f"{row.r:>12.6g} {row.h:>12.6g} {row.stencil_size:>8d} "
            f"{row.max_error:>14.6e} {row.max_error_off_origin:>14.6e}"
        )
    return 0


def cmd_properties(cfg: dict, threads: int) -> int:
    _require_dir(cfg["output_dir"])
    data = _build_data(cfg)
    config = _plan(cfg, data)
    report = run_property_suite(config, data, samples=cfg["samples"], seed=cfg["seed"])
    path = os.path.join(cfg["output_dir"], "properties.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    for res in report.results:
        line = f"{res.name}: {'PASS' if res.passed else 'FAIL'}"
        line += f" (checked {res.checked}, worst margin {res.worst_margin:.3e})"
        if res.detail:
            line += f" [{res.detail}]"
        print(line)
    print(f"wrote {path}")
    if not report.passed:
        print("property violations detected", file=sys.stderr)
        return 5
    return 0


def cmd_constants(cfg: dict, threads: int) -> int:
    print(f"{'d':>2} {'M':>12} {'K1':>12} {'K2':>12} {'quad_error':>12}  reference bounds")
    for d in (1, 2, 3):
        mc = mollifier_constants(d)
        bm, b1, b2 = REFERENCE_BOUNDS[d]
        print(
            f"{d:>2} {mc.M:>12.6f} {mc.K1:>12.6f} {mc.K2:>12.6f} {mc.quad_error:>12.3e}"
            f"  M <= {bm}, K1 <= {b1}, K2 <= {b2}"
        )
    return 0


_COMMANDS = {
    "solve": (cmd_solve, None),
    "convergence": (cmd_convergence, None),
    "consistency": (cmd_consistency, None),
    "properties": (
        cmd_properties,
        {"h": 0.1, "T": 0.25, "cfl": {"mode": "theoretical"}},
    ),
    "constants": (cmd_constants, None),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plapfd",
        description="Explicit finite differences for the parabolic p-Laplace equation.",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (fn, _extra) in _COMMANDS.items():
        sp = sub.add_parser(name, help=fn.__doc__, allow_abbrev=False)
        sp.add_argument("--config", default=None, help="JSON configuration file")
        sp.add_argument(
            "--threads",
            type=int,
            default=None,
            help="worker threads (0 = auto); falls back to PLAPFD_THREADS",
        )
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args, extra = parser.parse_known_args(argv)
    args.overrides = extra
    fn, extra_defaults = _COMMANDS[args.command]
    try:
        cfg = _resolve(args, extra_defaults)
        threads = _resolve_threads(args, cfg)
        return fn(cfg, threads)
    except BlowUpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except QuadratureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
