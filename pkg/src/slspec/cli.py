"""Command-line front end.

Every subcommand is turned into a :class:`RunConfig`; ``slspec run --config``
reads the same structure from JSON.  Grid points are independent work items;
with ``--threads > 1`` they go to a process pool and results are merged in
input order, so output bytes do not depend on the thread count.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .core import CoefficientSet
from .errors import NumericalError, SLSpecError, ValidationError
from .qtree import TreeSpec, band_spectrum, decomposition_multiplicities, tree_ac_scan, tree_policy, tree_to_sl
from .subordinacy import ClassifyPolicy, classify_lambda, growth_checks
from .weidmann import QSplit, weidmann_report
from .weyl import m_function

log = logging.getLogger("slspec")

SCHEMA_VERSION = 1
COMMANDS = ("mfun", "scan", "weidmann", "tree-bands", "tree-scan", "tree-decompose")
OPERATOR_COMMANDS = ("mfun", "scan", "weidmann")
_POLICY_KEYS = {
    "tol", "delta", "delta_sub", "m_tol", "X_max", "trunc_factor", "stabilization", "eps_floor", "jl_slack", "x_grid",
}
_POSITIVE_KEYS = _POLICY_KEYS - {"x_grid"}

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


@dataclass
class Diagnostic:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass
class RunConfig:
    command: str
    operator: Any = None
    tree: Any = None
    grid: dict = field(default_factory=dict)
    policy: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Optional[Path] = None) -> "RunConfig":
        return cls(
            command=doc.get("command", ""),
            operator=doc.get("operator"),
            tree=doc.get("tree"),
            grid=doc.get("grid") or {},
            policy=doc.get("policy") or {},
            output=doc.get("output") or {},
            options=doc.get("options") or {},
            base_dir=base_dir or Path.cwd(),
        )

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "operator": self.operator,
            "tree": self.tree,
            "grid": self.grid,
            "policy": self.policy,
            "output": self.output,
            "options": self.options,
        }


# ----------------------------------------------------------------------------
# loading and validation
# ----------------------------------------------------------------------------


def _load_json_ref(ref, base_dir: Path):
    """Inline dict, inline JSON text or a path to a JSON file."""
    if isinstance(ref, dict):
        return ref
    if not isinstance(ref, str):
        raise ValidationError("expected an object or a file path")
    if ref.lstrip().startswith("{"):
        return json.loads(ref)
    path = Path(ref)
    if not path.is_absolute():
        path = base_dir / path
    if not path.is_file():
        raise ValidationError(f"file not found: {path}")
    with open(path) as fh:
        return json.load(fh)


def load_operator(cfg: RunConfig) -> CoefficientSet:
    return CoefficientSet.from_dict(_load_json_ref(cfg.operator, cfg.base_dir))


def load_tree(cfg: RunConfig) -> TreeSpec:
    doc = _load_json_ref(cfg.tree, cfg.base_dir)
    if "t" not in doc and "b" in doc and "c" in doc:
        doc = {"homogeneous": doc}
    return TreeSpec.from_dict(doc)


def _tree_diagnostics(doc) -> list[Diagnostic]:
    if "homogeneous" in doc or ("c" in doc and "t" not in doc):
        h = doc.get("homogeneous", doc)
        out = []
        if not isinstance(h.get("b"), int) or h["b"] < 1:
            out.append(Diagnostic("/tree/b", "homogeneous b must be an integer >= 1"))
        elif h["b"] == 1:
            out.append(Diagnostic("/tree/b", "regularity requires b_k >= 2 for k >= 1 (b = 1 is the degenerate half-line)"))
        c = h.get("c")
        if not isinstance(c, (int, float)) or c <= 0:
            out.append(Diagnostic("/tree/c", "edge length c must be positive"))
        return out
    if "t" not in doc or "b" not in doc:
        return [Diagnostic("/tree", "tree needs 't' and 'b' arrays or homogeneous {b, c}")]
    spec = TreeSpec.__new__(TreeSpec)
    object.__setattr__(spec, "t", tuple(float(v) for v in doc["t"]))
    object.__setattr__(spec, "b", tuple(int(v) for v in doc["b"]))
    object.__setattr__(spec, "allow_degenerate", False)
    return [Diagnostic("/tree" + p, m) for p, m in spec.diagnostics()]


def _grid_diagnostics(grid: dict, positive: bool) -> list[Diagnostic]:
    out = []
    if "values" in grid:
        vals = grid["values"]
        if not isinstance(vals, list) or not vals:
            out.append(Diagnostic("/grid/values", "need a non-empty list"))
        elif positive and any(not isinstance(v, (int, float)) or v <= 0 for v in vals):
            out.append(Diagnostic("/grid/values", "this command takes positive lambdas only"))
        return out
    for key in ("lo", "hi", "count"):
        if key not in grid:
            out.append(Diagnostic(f"/grid/{key}", "missing"))
    if out:
        return out
    count = grid["count"]
    if not isinstance(count, int) or count < 1:
        out.append(Diagnostic("/grid/count", "count must be an integer >= 1"))
    lo, hi = grid["lo"], grid["hi"]
    if not (lo < hi or (count == 1 and lo == hi)):
        out.append(Diagnostic("/grid", f"need lo < hi, got lo={lo}, hi={hi}"))
    spacing = grid.get("spacing", "linear")
    if spacing not in ("linear", "geometric"):
        out.append(Diagnostic("/grid/spacing", "spacing must be linear or geometric"))
    elif spacing == "geometric" and lo <= 0:
        out.append(Diagnostic("/grid/lo", "geometric spacing needs lo > 0"))
    if positive and lo <= 0:
        out.append(Diagnostic("/grid/lo", "this command takes positive lambdas only"))
    return out


def validate(config) -> list[Diagnostic]:
    """One :class:`Diagnostic` per violated invariant; empty when valid."""
    if isinstance(config, RunConfig):
        cfg = config
    elif isinstance(config, dict):
        cfg = RunConfig.from_dict(config)
    else:
        return [Diagnostic("", "config must be a JSON object")]
    out: list[Diagnostic] = []
    if cfg.command not in COMMANDS:
        out.append(Diagnostic("/command", f"unknown command {cfg.command!r}; expected one of {', '.join(COMMANDS)}"))
        return out
    if cfg.command in OPERATOR_COMMANDS:
        if cfg.operator is None:
            out.append(Diagnostic("/operator", "missing operator"))
        else:
            try:
                load_operator(cfg)
            except (SLSpecError, ValueError, OSError) as exc:
                out.append(Diagnostic("/operator", str(exc)))
    else:
        if cfg.tree is None:
            out.append(Diagnostic("/tree", "missing tree"))
        else:
            try:
                doc = _load_json_ref(cfg.tree, cfg.base_dir)
                out.extend(_tree_diagnostics(doc))
            except (SLSpecError, ValueError, OSError) as exc:
                out.append(Diagnostic("/tree", str(exc)))
    if cfg.command in ("mfun", "scan", "weidmann", "tree-scan"):
        out.extend(_grid_diagnostics(cfg.grid, positive=cfg.command == "weidmann"))
    if cfg.command == "mfun":
        eta = cfg.options.get("eta", 1.0)
        if "z" not in cfg.options and not (isinstance(eta, (int, float)) and eta > 0):
            out.append(Diagnostic("/options/eta", "imaginary part must be positive"))
    for key, val in cfg.policy.items():
        if key not in _POLICY_KEYS:
            out.append(Diagnostic(f"/policy/{key}", "unknown policy key"))
        elif key in _POSITIVE_KEYS and val is not None and not (isinstance(val, (int, float)) and val > 0):
            out.append(Diagnostic(f"/policy/{key}", "must be a positive number"))
    fmt = cfg.output.get("format", "csv")
    if fmt not in ("csv", "json"):
        out.append(Diagnostic("/output/format", "format must be csv or json"))
    threads = cfg.options.get("threads", 1)
    if not isinstance(threads, int) or threads < 1:
        out.append(Diagnostic("/options/threads", "threads must be an integer >= 1"))
    return out


def grid_values(grid: dict) -> list[float]:
    if "values" in grid:
        return [float(v) for v in grid["values"]]
    lo, hi, n = float(grid["lo"]), float(grid["hi"]), int(grid["count"])
    if n == 1:
        return [lo]
    if grid.get("spacing", "linear") == "geometric":
        return [float(v) for v in np.geomspace(lo, hi, n)]
    return [float(v) for v in np.linspace(lo, hi, n)]


# ----------------------------------------------------------------------------
# work items (top level so they pickle)
# ----------------------------------------------------------------------------


def _classify_policy(policy: dict) -> ClassifyPolicy:
    kw = dict(policy)
    if kw.get("x_grid") is not None:
        kw["x_grid"] = tuple(float(v) for v in kw["x_grid"])
    return ClassifyPolicy(**kw)


def _mfun_item(coeffs, z, X, tol):
    est = m_function(coeffs, z, X, tol)
    return {"z_re": z.real, "z_im": z.imag, "m_re": est.m.real, "m_im": est.m.imag, "X": est.X, "radius": est.radius}


def _scan_item(coeffs, lam, policy):
    pol = _classify_policy(policy)
    ver = classify_lambda(coeffs, lam, pol)
    X = coeffs.a + min(64.0, (min(coeffs.b, 1e300) - coeffs.a) / 2)
    gr = growth_checks(coeffs, lam, X, pol.tol)
    return {
        "lambda": lam,
        "verdict": ver.kind.value,
        "im_m_extrapolated": ver.im_m_extrapolated,
        "jl_min": ver.jl_min,
        "jl_max": ver.jl_max,
        "c3_slope": gr.linear_growth_c3,
    }


def _tree_scan_item(tree, V, lam, policy):
    coeffs = tree_to_sl(tree, V)
    kw = dict(policy)
    if kw.get("x_grid") is not None:
        kw["x_grid"] = tuple(float(v) for v in kw["x_grid"])
    pol = tree_policy(coeffs, **kw)
    tv = tree_ac_scan(tree, V, [lam], pol, tol=pol.tol)[0]
    return {
        "lambda": lam,
        "verdict": tv.verdict.kind.value,
        "im_m_extrapolated": tv.verdict.im_m_extrapolated,
        "jl_min": tv.verdict.jl_min,
        "jl_max": tv.verdict.jl_max,
        "c3_slope": tv.growth.linear_growth_c3,
        "bounded_u": tv.growth.bounded_u,
    }


def _map(fn, items, threads: int):
    """Yield results in input order; a failure stops the stream at that item."""
    if threads <= 1 or len(items) <= 1:
        for args in items:
            yield fn(*args)
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, *args) for args in items]
        for fut in futures:
            yield fut.result()


# ----------------------------------------------------------------------------
# output
# ----------------------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.16e}"
    return str(v)


def _json_safe(v):
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        if not math.isfinite(v):
            return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return v
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(rows: list[dict], fmt: str, command: str, status: str = "ok", meta: Optional[dict] = None) -> str:
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "status": status,
            "meta": _json_safe(meta or {}),
            "rows": _json_safe(rows),
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    cols = ["schema_version"]
    for row in rows:
        for k in row:
            if k not in cols and k != "status":
                cols.append(k)
    cols.append("status")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        rec = dict(row, schema_version=SCHEMA_VERSION)
        rec.setdefault("status", "ok")
        w.writerow([_fmt(rec.get(c)) for c in cols])
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig) -> None:
    path = cfg.output.get("path")
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------------
# orchestration
# ----------------------------------------------------------------------------


def _collect(fn, items, threads, rows, labels):
    """Append results to ``rows``; on failure append a marked row and re-raise."""
    it = _map(fn, items, threads)
    for label in labels:
        try:
            rows.append(next(it))
        except NumericalError as exc:
            rows.append(dict(label, status=f"failed: {type(exc).__name__}: {exc}"))
            raise


def _execute(cfg: RunConfig, rows: list[dict], meta: dict) -> None:
    threads = int(cfg.options.get("threads", 1))
    policy = dict(cfg.policy)
    cmd = cfg.command
    if cmd == "mfun":
        coeffs = load_operator(cfg)
        tol = float(policy.get("tol", 1e-10))
        X = float(cfg.options.get("X") or policy.get("X_max") or coeffs.a + 40.0)
        if "z" in cfg.options:
            zs = [complex(str(v).replace(" ", "").replace("i", "j")) for v in cfg.options["z"]]
        else:
            eta = float(cfg.options.get("eta", 1.0))
            zs = [complex(lam, eta) for lam in grid_values(cfg.grid)]
        _collect(_mfun_item, [(coeffs, z, X, tol) for z in zs], threads, rows,
                 [{"z_re": z.real, "z_im": z.imag} for z in zs])
    elif cmd == "scan":
        coeffs = load_operator(cfg)
        lams = grid_values(cfg.grid)
        _collect(_scan_item, [(coeffs, lam, policy) for lam in lams], threads, rows, [{"lambda": l} for l in lams])
    elif cmd == "weidmann":
        coeffs = load_operator(cfg)
        pol = _classify_policy(policy) if policy else None
        rep = weidmann_report(coeffs, QSplit(), grid_values(cfg.grid), pol)
        rows.extend(rep.rows())
        meta.update(passed=rep.passed, fraction_in_n=rep.fraction_in_n, hypothesis_sets=rep.hypothesis_sets)
    elif cmd == "tree-bands":
        doc = _load_json_ref(cfg.tree, cfg.base_dir)
        h = doc.get("homogeneous", doc)
        bs = band_spectrum(int(h["b"]), float(h["c"]), int(cfg.options.get("lmax", 3)))
        for row in bs.rows():
            rows.append(dict(row, theta=bs.theta))
        meta.update(theta=bs.theta, b=bs.b, c=bs.c)
    elif cmd == "tree-scan":
        tree = load_tree(cfg)
        V = cfg.options.get("potential")
        lams = grid_values(cfg.grid)
        _collect(_tree_scan_item, [(tree, V, lam, policy) for lam in lams], threads, rows, [{"lambda": l} for l in lams])
    elif cmd == "tree-decompose":
        tree = load_tree(cfg)
        k_max = int(cfg.options.get("kmax", min(10, tree.truncation_N)))
        for k, t_k, mult in decomposition_multiplicities(tree, k_max):
            rows.append({"k": k, "t_k": t_k, "multiplicity": mult})


def run(config) -> int:
    """Validate, execute and emit; returns the process exit status."""
    cfg = config if isinstance(config, RunConfig) else RunConfig.from_dict(config)
    problems = validate(cfg)
    if problems:
        for d in problems:
            print(f"slspec: invalid config: {d}", file=sys.stderr)
        return EXIT_VALIDATION
    fmt = cfg.output.get("format", "csv")
    rows: list[dict] = []
    meta: dict = {}
    try:
        _execute(cfg, rows, meta)
    except NumericalError as exc:
        print(f"slspec: numerical failure: {exc}", file=sys.stderr)
        _emit(render(rows, fmt, cfg.command, status="partial", meta=meta), cfg)
        return EXIT_NUMERICAL
    except (ValidationError, ValueError) as exc:
        print(f"slspec: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _emit(render(rows, fmt, cfg.command, meta=meta), cfg)
    return EXIT_OK


# ----------------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, operator: bool, tree: bool, grid: bool) -> None:
    if operator:
        p.add_argument("--operator", metavar="FILE", help="coefficient JSON file (or inline JSON)")
    if tree:
        p.add_argument("--tree", metavar="FILE", help="tree JSON file")
        p.add_argument("--b", type=int, help="branching number of a homogeneous tree")
        p.add_argument("--c", type=float, help="edge length of a homogeneous tree")
    if grid:
        p.add_argument("--lambda", dest="lam", type=float, action="append", help="grid point (repeatable)")
        p.add_argument("--lambda-lo", type=float)
        p.add_argument("--lambda-hi", type=float)
        p.add_argument("--lambda-count", type=int, default=1)
        p.add_argument("--lambda-spacing", choices=("linear", "geometric"), default="linear")
    p.add_argument("--tol", type=float, help="propagation tolerance")
    p.add_argument("--xmax", type=float, help="truncation point")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker processes (default: all cores)")
    p.add_argument("--output", metavar="FILE", help="write here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slspec", description="Spectral diagnostics for Sturm-Liouville operators.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mfun", help="m-function on a grid")
    _common(p, operator=True, tree=False, grid=True)
    p.add_argument("--z", action="append", help="complex point such as 1+1j (repeatable)")
    p.add_argument("--eta", type=float, default=1.0, help="Im z for grid points")

    p = sub.add_parser("scan", help="classify lambda values")
    _common(p, operator=True, tree=False, grid=True)

    p = sub.add_parser("weidmann", help="asymptotic-form report")
    _common(p, operator=True, tree=False, grid=True)

    p = sub.add_parser("tree-bands", help="closed-form bands of a homogeneous tree")
    _common(p, operator=False, tree=True, grid=False)
    p.add_argument("--lmax", type=int, default=3)

    p = sub.add_parser("tree-scan", help="classify lambda values on a tree")
    _common(p, operator=False, tree=True, grid=True)
    p.add_argument("--potential", help="radial potential expression in x")

    p = sub.add_parser("tree-decompose", help="decomposition multiplicities")
    _common(p, operator=False, tree=True, grid=False)
    p.add_argument("--kmax", type=int)

    p = sub.add_parser("tree", help="tree subcommands: bands, scan, decompose")
    p.add_argument("action", choices=("bands", "scan", "decompose"))
    _common(p, operator=False, tree=True, grid=True)
    p.add_argument("--lmax", type=int, default=3)
    p.add_argument("--potential")
    p.add_argument("--kmax", type=int)

    p = sub.add_parser("run", help="execute a JSON run configuration")
    p.add_argument("--config", required=True, metavar="FILE")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    command = args.command if args.command != "tree" else f"tree-{args.action}"
    cfg = RunConfig(command=command)
    if getattr(args, "operator", None):
        cfg.operator = args.operator
    if getattr(args, "tree", None):
        cfg.tree = args.tree
    elif getattr(args, "b", None) is not None or getattr(args, "c", None) is not None:
        cfg.tree = {"homogeneous": {"b": args.b, "c": args.c}}
    if getattr(args, "lam", None):
        cfg.grid = {"values": args.lam}
    elif getattr(args, "lambda_lo", None) is not None:
        hi = args.lambda_hi if args.lambda_hi is not None else args.lambda_lo
        cfg.grid = {"lo": args.lambda_lo, "hi": hi, "count": args.lambda_count, "spacing": args.lambda_spacing}
    if args.tol is not None:
        cfg.policy["tol"] = args.tol
    if args.xmax is not None:
        if command == "mfun":
            cfg.options["X"] = args.xmax
        else:
            cfg.policy["X_max"] = args.xmax
    cfg.options["threads"] = args.threads
    for key in ("lmax", "kmax", "potential", "eta"):
        val = getattr(args, key, None)
        if val is not None:
            cfg.options[key] = val
    if getattr(args, "z", None):
        cfg.options["z"] = args.z
        cfg.grid = cfg.grid or {"values": [0.0]}
    cfg.output = {"format": args.format}
    if args.output:
        cfg.output["path"] = args.output
    return cfg


def _setup_logging() -> None:
    level = os.environ.get("SLSPEC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[list[str]] = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    if args.command == "run":
        path = Path(args.config)
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"slspec: cannot read config {path}: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        if not isinstance(doc, dict):
            print("slspec: invalid config: config must be a JSON object", file=sys.stderr)
            return EXIT_VALIDATION
        return run(RunConfig.from_dict(doc, base_dir=path.parent))
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
