"""Command-line front end: ``eval``, ``verify`` and ``suite``.

Exit codes: 0 pass, 1 identity failure, 2 domain or usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import complexfn as cf
from . import identities as ids
from . import kernels as kn
from . import quad as q
from .errors import DomainError, IndexKernelError
from .series import CharacterSpec, parse_character, parse_complex

EXIT_PASS, EXIT_FAIL, EXIT_DOMAIN, EXIT_NUMERICAL = 0, 1, 2, 3
CSV_COLUMNS = (
    "case", "params", "lhs", "rhs", "abs_err", "rel_err", "lhs_tail_bound", "rhs_tail_bound", "pass", "wall_ms",
)


class UsageError(DomainError):
    """Malformed command line."""


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = q.DEFAULT_IDENTITY_TOL
    quad_tolerance: float = q.DEFAULT_KERNEL_TOL
    n_max: int = 10000
    parallel: bool = True
    workers: int | None = None
    output_format: str = "json"
    out: str | None = None
    timing: bool = False

    def __post_init__(self):
        if not (self.tolerance > 0 and self.quad_tolerance > 0):
            raise UsageError("tolerances must be positive")
        if not self.tolerance > self.quad_tolerance:
            raise UsageError("--tol must exceed --quad-tol")
        if self.n_max < 1:
            raise UsageError("--nmax must be at least 1")
        if self.output_format not in ("json", "csv", "text"):
            raise UsageError("--format must be json, csv or text")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def format_number(v) -> str:
    """17 significant digits, so every binary64 value round-trips."""
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if not math.isfinite(v):
        return "null"
    return format(v, ".17g")


def _json_value(v, indent: int) -> str:
    pad = "  " * indent
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f'{pad}  "{k}": {_json_value(x, indent + 1)}' for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        items = [pad + "  " + _json_value(x, indent + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return format_number(v)


def to_json(rows: list[dict]) -> str:
    return _json_value(rows, 0) + "\n"


def _params_text(params: dict) -> str:
    return ";".join(f"{k}={format_number(v)}" for k, v in params.items())


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([
            r["case"], _params_text(r["params"]),
            *(format_number(r[k]) for k in CSV_COLUMNS[2:8]),
            "true" if r["pass"] else "false",
            "" if r["wall_ms"] is None else format_number(r["wall_ms"]),
        ])
    return buf.getvalue()


def summary_text(rows: list[dict]) -> str:
    fam: dict[str, list[int]] = {}
    for r in rows:
        c = fam.setdefault(r["case"], [0, 0])
        c[0] += bool(r["pass"])
        c[1] += 1
    lines = [f"{'case':<16} {'pass':>5} {'total':>6}  worst rel_err"]
    for cid, (ok, tot) in fam.items():
        worst = max((r["rel_err"] for r in rows if r["case"] == cid and r["rel_err"] is not None), default=None)
        lines.append(f"{cid:<16} {ok:>5} {tot:>6}  {'-' if worst is None else format(worst, '.2e')}")
    ok = sum(v[0] for v in fam.values())
    tot = sum(v[1] for v in fam.values())
    lines.append(f"{'all':<16} {ok:>5} {tot:>6}")
    return "\n".join(lines) + "\n"


def render_report(rep: ids.IdentityReport) -> str:
    p = rep.case.params.as_dict()
    lines = [
        f"case            {rep.case.id} ({_params_text(p)})",
        f"lhs             {format_number(rep.lhs)}",
        f"rhs             {format_number(rep.rhs)}",
    ]
    if rep.diagnostics.get("lhs_imag") is not None:
        lines.append(f"lhs imag        {format_number(rep.diagnostics['lhs_imag'])}")
        lines.append(f"rhs imag        {format_number(rep.diagnostics['rhs_imag'])}")
    lines += [
        f"abs_err         {rep.abs_err:.3e}",
        f"rel_err         {rep.rel_err:.3e}",
        f"lhs_tail_bound  {rep.lhs_tail_bound:.3e}  ({rep.lhs_terms} terms)",
        f"rhs_tail_bound  {rep.rhs_tail_bound:.3e}  ({rep.rhs_terms} terms)",
        f"result          {'PASS' if rep.passed else 'FAIL'} at tol {rep.tol:g}",
    ]
    if rep.note:
        lines.append(f"note            {rep.note}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parameter parsing
# ---------------------------------------------------------------------------


def parse_params(items: list[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key or not value:
            raise UsageError(f"expected key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _real(params: dict, key: str, default=None) -> float:
    if key not in params:
        if default is None:
            raise UsageError(f"missing parameter {key}")
        return default
    text = params[key]
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"parameter {key} must be a real number, got {text!r}") from exc


def _check_keys(params: dict, allowed: set, usage: str):
    extra = set(params) - allowed
    if extra:
        raise UsageError(f"unknown parameter(s) {', '.join(sorted(extra))}; usage: {usage}")


EVAL_USAGE = {
    "K": "K tau=<real> x=<positive> [sigma=<real>]",
    "W": "W mu=<real> tau=<real> x=<positive>",
    "D": "D order=<real> z=<positive>",
    "S_weighted": "S_weighted mu=<real < 1> tau=<real> x=<positive>",
    "erfc": "erfc x=<real>",
    "E1": "E1 x=<positive>",
    "gamma_abs2": "gamma_abs2 a=<real> tau=<real>",
    "hyp2f1": "hyp2f1 a=<complex> b=<complex> c=<complex> z=<real <= 0>",
}


def evaluate(function: str, params: dict, quad_tol: float) -> tuple:
    """``(value, error estimate, route)`` for one ``eval`` call."""
    if function not in EVAL_USAGE:
        raise UsageError(f"unknown function {function!r}; choose from {', '.join(EVAL_USAGE)}")
    usage = EVAL_USAGE[function]
    tol = ids.kernel_tolerance(quad_tol)
    if function == "K":
        _check_keys(params, {"tau", "x", "sigma"}, usage)
        tau, x = _real(params, "tau"), _real(params, "x")
        if "sigma" in params:
            r = kn.macdonald_complex_order(_real(params, "sigma"), tau, x, tol=tol, full_output=True)
        else:
            r = kn.macdonald_imag(tau, x, tol=tol, full_output=True)
        return r.value, r.abs_error_estimate, r.route
    if function == "W":
        _check_keys(params, {"mu", "tau", "x"}, usage)
        r = kn.whittaker_imag(_real(params, "mu"), _real(params, "tau"), _real(params, "x"), full_output=True)
        return r.value, r.abs_error_estimate, r.route
    if function == "D":
        _check_keys(params, {"order", "z"}, usage)
        r = kn.parabolic_d(_real(params, "order"), _real(params, "z"), full_output=True)
        return r.value, r.abs_error_estimate, r.route
    if function == "S_weighted":
        _check_keys(params, {"mu", "tau", "x"}, usage)
        r = kn.lommel_weighted(_real(params, "mu"), _real(params, "tau"), _real(params, "x"), full_output=True)
        return r.value, r.abs_error_estimate, r.route
    if function == "erfc":
        _check_keys(params, {"x"}, usage)
        v = float(cf.erfc(_real(params, "x")))
        return v, 1e-15 * abs(v), "scipy erfc"
    if function == "E1":
        _check_keys(params, {"x"}, usage)
        v = float(cf.exp_integral_e1(_real(params, "x")))
        return v, 1e-15 * abs(v), "scipy exp1"
    if function == "gamma_abs2":
        _check_keys(params, {"a", "tau"}, usage)
        v = float(cf.gamma_modulus_sq(_real(params, "a"), _real(params, "tau")))
        return v, 1e-14 * abs(v), "log-gamma"
    _check_keys(params, {"a", "b", "c", "z"}, usage)
    for k in ("a", "b", "c"):
        if k not in params:
            raise UsageError(f"missing parameter {k}")
    a, b, c = (parse_complex(params[k]) for k in ("a", "b", "c"))
    v = cf.hyp2f1(a, b, c, _real(params, "z"))
    return v, 1e-14 * abs(v), "Gauss series"


def case_from_params(case_id: str, params: dict, char: CharacterSpec | None) -> ids.IdentityCase:
    if case_id not in ids.REGISTRY:
        raise UsageError(f"unknown case {case_id!r}; choose from {', '.join(ids.CASE_IDS)}")
    fields = ids.LatticeCase.__dataclass_fields__
    values = {}
    for k in params:
        if k not in fields:
            raise UsageError(f"unknown parameter {k!r} for {case_id}")
        values[k] = _real(params, k)
    return ids.make_case(case_id, char=char, **values)


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------


def _run_case(args) -> dict:
    case, tol, quad_tol, n_max, timing = args
    try:
        rep = ids.verify(case, tol, quad_tol=quad_tol, n_max=n_max)
        return rep.to_dict(timing)
    except IndexKernelError as exc:
        return {
            "case": case.id, "params": case.params.as_dict(), "lhs": None, "rhs": None, "abs_err": None,
            "rel_err": None, "lhs_tail_bound": None, "rhs_tail_bound": None, "pass": False, "wall_ms": None,
            "error": f"{type(exc).__name__}: {exc.args[0] if exc.args else exc}",
        }


def run_suite(config: RunConfig, cases: list[ids.IdentityCase] | None = None) -> list[dict]:
    """Verify every case of the default grid; rows come back in grid order."""
    cases = ids.default_grid() if cases is None else cases
    jobs = [(c, config.tolerance, config.quad_tolerance, config.n_max, config.timing) for c in cases]
    if config.parallel and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_run_case, jobs, chunksize=1))
    return [_run_case(j) for j in jobs]


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError("expected true or false")


def _default_tol() -> float:
    env = os.environ.get("INDEXKERNEL_TOL")
    if env is None:
        return q.DEFAULT_IDENTITY_TOL
    try:
        return float(env)
    except ValueError:
        raise UsageError(f"INDEXKERNEL_TOL must be a number, got {env!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage().strip()}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="identity tolerance (default 1e-8 or INDEXKERNEL_TOL)")
    common.add_argument("--quad-tol", type=float, default=q.DEFAULT_KERNEL_TOL, help="quadrature tolerance")
    common.add_argument("--nmax", type=int, default=10000, help="cap on series terms")
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)
    common.add_argument("--parallel", type=_bool, default=True, help="true or false")
    common.add_argument("--workers", type=int, default=None, help="worker processes for the suite")
    common.add_argument("--out", default=None, help="write the report to this path")
    common.add_argument("--char-file", default=None, help="character table (first line 'q parity')")
    common.add_argument("--timing", action="store_true", help="record wall_ms (breaks byte-identical output)")

    parser = _Parser(prog="indexkernel", description="Index-transform kernels and lattice identity checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p_eval = sub.add_parser("eval", parents=[common], help="evaluate one function")
    p_eval.add_argument("function")
    p_eval.add_argument("params", nargs="*")
    p_ver = sub.add_parser("verify", parents=[common], help="verify one identity instance")
    p_ver.add_argument("case_id")
    p_ver.add_argument("params", nargs="*")
    sub.add_parser("suite", parents=[common], help="run the default identity grid")
    sub.add_parser("list", parents=[common], help="list registered identities")
    return parser


def _config(ns, default_format: str) -> RunConfig:
    tol = ns.tol if ns.tol is not None else _default_tol()
    return RunConfig(
        tolerance=tol, quad_tolerance=ns.quad_tol, n_max=ns.nmax, parallel=ns.parallel,
        workers=ns.workers, output_format=ns.format or default_format, out=ns.out, timing=ns.timing,
    )


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _main(argv) -> int:
    ns = build_parser().parse_args(argv)
    if ns.command == "eval":
        cfg = _config(ns, "text")
        value, err, route = evaluate(ns.function, parse_params(ns.params), cfg.quad_tolerance)
        if cfg.output_format == "json":
            v = complex(value)
            row = {"function": ns.function, "value": v.real, "error_estimate": float(err), "route": route}
            if v.imag != 0:
                row["value_imag"] = v.imag
            _emit(_json_value(row, 0) + "\n", cfg.out)
        else:
            shown = format_number(value) if not isinstance(value, complex) else (
                f"{format_number(value.real)}{'+' if value.imag >= 0 else '-'}{format_number(abs(value.imag))}i"
            )
            _emit(f"value           {shown}\nerror_estimate  {float(err):.3e}\nroute           {route}\n", cfg.out)
        return EXIT_PASS
    if ns.command == "list":
        lines = [f"{cid:<16} {dom:<45} {_params_text(p.as_dict())}"
                 for cid, dom, p in ids.list_cases()]
        _emit("\n".join(lines) + "\n", ns.out)
        return EXIT_PASS
    if ns.command == "verify":
        cfg = _config(ns, "text")
        char = None
        if ns.char_file:
            try:
                with open(ns.char_file, encoding="utf-8") as fh:
                    char = parse_character(fh.read())
            except OSError as exc:
                raise UsageError(f"cannot read character file: {exc}") from exc
        case = case_from_params(ns.case_id, parse_params(ns.params), char)
        rep = ids.verify(case, cfg.tolerance, quad_tol=cfg.quad_tolerance, n_max=cfg.n_max)
        row = rep.to_dict(cfg.timing)
        if cfg.output_format == "json":
            _emit(to_json([row]), cfg.out)
        elif cfg.output_format == "csv":
            _emit(to_csv([row]), cfg.out)
        else:
            _emit(render_report(rep), cfg.out)
        return EXIT_PASS if rep.passed else EXIT_FAIL
    cfg = _config(ns, "json")
    rows = run_suite(cfg)
    summary = summary_text(rows)
    if cfg.output_format == "text":
        _emit(summary, cfg.out)
    else:
        _emit(to_json(rows) if cfg.output_format == "json" else to_csv(rows), cfg.out)
        (sys.stdout if cfg.out else sys.stderr).write(summary)
    return EXIT_PASS if all(r["pass"] for r in rows) else EXIT_FAIL


def main(argv=None) -> int:
    """Run the CLI and return its exit code."""
    argv = sys.argv[1:] if argv is None else argv
    try:
        return _main(argv)
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except IndexKernelError as exc:
        sys.stderr.write(f"numerical failure: {exc.args[0] if exc.args else exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
