"""Batch front-end: run one JSON scenario and write a machine-readable report.

Exit status: 0 when every asserted tolerance passes, 1 on a tolerance
failure, 2 on an input or validation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import catalog
from .errors import (
    BochnerLiftError,
    DivergentKernel,
    EmptyK0,
    MissingNormalDerivative,
    NegativeKernel,
    NonIntegrable,
    PositivityFailure,
    UnsupportedOrder,
)
from .harnack import (
    Box,
    CompactSetSpec,
    SchroedingerProblem,
    half_ball_samples,
    local_boundedness_report,
    manufacture_solution,
    verify_theorem_odd_harnack,
    weak_harnack_report,
)
from .kernels import fractional_kernel, kernel_from_json, kernel_to_json, lift_kernel
from .lift import (
    Field,
    WeightedMeasureSpec,
    lift_field,
    mollifier_convergence_report,
    restrict_field,
    weighted_norm_As,
    weighted_norm_Ls,
)
from .operators import (
    bochner_report,
    cylindrical_identity_residual,
    odd_identity_residual,
    sphere_kernel_identity,
    weak_pairing_report,
)
from .quadrature import QuadratureSpec
from .symbols import hankel_symbol

SPEC_VERSION = "1"
EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

# raised when the scenario itself describes an invalid problem
INPUT_ERRORS = (
    ValueError,
    UnsupportedOrder,
    DivergentKernel,
    NegativeKernel,
    NonIntegrable,
    PositivityFailure,
    EmptyK0,
    MissingNormalDerivative,
)

COMMANDS = (
    "symbol",
    "lift-check",
    "verify-identity",
    "harnack",
    "weak-harnack",
    "local-boundedness",
    "mollifier",
)

CSV_COLUMNS = {
    "symbol": "tau, psi_n, psi_n_plus_2, residual",
    "lift-check": "radius, lifted, reference, rel_err (kernel part)",
    "verify-identity": "sphere: alpha, beta, r, gamma, lhs, rhs; bochner: xi, lhs, rhs; "
                       "odd/cylindrical: x_1..x_n",
    "harnack": "x_1..x_n, quotient (u/x_1, or d_1 u on the hyperplane)",
    "weak-harnack": "x_1..x_n, u/x_1 over the half ball B_{rho/2}^+",
    "local-boundedness": "x_1..x_n, u/x_1 over the half ball B_{rho/2}^+",
    "mollifier": "eps, weighted_l1_error",
}

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_ORDER = {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}
_DIM = {"type": "integer", "minimum": 1, "maximum": 6}
_VEC = {"type": "array", "items": _NUM, "minItems": 1}
_POINTS = {"type": "array", "items": _VEC, "minItems": 1}
_KERNEL = {
    "type": "object",
    "properties": {
        "family": {"enum": ["fractional", "gaussian", "rational", "table"]},
        "n": {"type": "integer", "minimum": 1},
        "s": _ORDER,
        "power": _POS,
        "amplitude": _POS,
        "samples": {"type": "array", "items": {"type": "array", "items": _NUM,
                                               "minItems": 2, "maxItems": 2}},
    },
    "required": ["family", "n"],
    "additionalProperties": False,
}
_BOX = {
    "type": "object",
    "properties": {"lows": _VEC, "highs": _VEC},
    "required": ["lows", "highs"],
    "additionalProperties": False,
}
_QUAD = {
    "type": "object",
    "properties": {
        name: ({"type": "integer", "minimum": 1} if isinstance(default, int) else _POS)
        for name, default in QuadratureSpec().to_dict().items()
    },
    "additionalProperties": False,
}
_OUTPUT = {
    "type": "object",
    "properties": {"path": {"type": "string"}, "format": {"enum": ["json", "csv"]}},
    "additionalProperties": False,
}
_COMMON = {
    "command": {"enum": list(COMMANDS)},
    "spec_version": {"const": SPEC_VERSION},
    "quadrature": _QUAD,
    "output": _OUTPUT,
    "tolerance": _POS,
}

_OPERATOR = {"s": _ORDER, "kernel": _KERNEL}

SCHEMAS = {
    "symbol": {"kernel": _KERNEL, "tau": _VEC},
    "lift-check": {"field": {"enum": sorted(catalog.ODD_FIELDS)}, "n": _DIM, "s": _ORDER,
                   "kernel": _KERNEL, "reference": _KERNEL, "radii": _VEC},
    "verify-identity:sphere": {"alpha": _POS, "beta": _POS, "r": _POS, "gamma": _POS},
    "verify-identity:bochner": {"profile": {"enum": sorted(catalog.EVEN_PROFILES)},
                                "xi": _VEC},
    "verify-identity:odd": {"n": _DIM, "field": {"enum": sorted(catalog.ODD_FIELDS)},
                            "points": _POINTS, **_OPERATOR},
    "verify-identity:norm": {"n": _DIM, "field": {"enum": sorted(catalog.ODD_FIELDS)}, "s": _ORDER},
    "verify-identity:pairing": {"n": _DIM, "s": _ORDER, "reverse": {"type": "boolean"}},
    "verify-identity:cylindrical": {"k": {"type": "integer", "minimum": 2}, "lam": _NUM,
                                    "points": _POINTS, "h": _POS},
    "harnack": {"vtilde": {"enum": sorted(catalog.ISO_PROFILES)}, "n": _DIM, **_OPERATOR,
                "omega": _BOX, "K": _BOX, "exclusion": {"type": "number", "minimum": 0},
                "sample_density": {"type": "integer", "minimum": 2},
                "residual_density": {"type": "integer", "minimum": 1},
                "C_budget": _NUM},
    "weak-harnack": {"vtilde": {"enum": sorted(catalog.ISO_PROFILES) + ["zero"]}, "n": _DIM,
                     "s": _ORDER, "M": {"type": "number", "minimum": 0}, "rho": _POS,
                     "scale": _POS, "density": {"type": "integer", "minimum": 2}},
    "mollifier": {"d": _DIM, "radius": _POS, "alpha": _POS, "eps": _VEC,
                  "max_final_ratio": _POS},
}
SCHEMAS["local-boundedness"] = SCHEMAS["weak-harnack"]

REQUIRED = {
    "symbol": ["kernel", "tau"],
    "lift-check": [],
    "verify-identity:sphere": ["alpha", "beta", "r", "gamma"],
    "verify-identity:bochner": ["profile"],
    "verify-identity:odd": ["n", "points"],
    "verify-identity:norm": ["n"],
    "verify-identity:pairing": ["n", "s"],
    "verify-identity:cylindrical": ["k", "lam", "points"],
    "harnack": ["vtilde", "C_budget"],
    "weak-harnack": ["vtilde", "rho", "s"],
    "local-boundedness": ["vtilde", "rho", "s"],
    "mollifier": ["eps"],
}

IDENTITIES = ("sphere", "bochner", "odd", "norm", "pairing", "cylindrical")

DEFAULT_TOL = {
    "symbol": 1e-6,
    "lift-check": 1e-6,
    "verify-identity:sphere": 1e-8,
    "verify-identity:bochner": 1e-6,
    "verify-identity:odd": 1e-4,
    "verify-identity:norm": 1e-6,
    "verify-identity:pairing": 1e-4,
    "verify-identity:cylindrical": 1e-4,
    "harnack": 1.0,
    "weak-harnack": 1.0,
    "local-boundedness": 1.0,
    "mollifier": 1.0,
}


class ScenarioError(Exception):
    """Malformed or invalid scenario input (exit status 2)."""


def _schema_key(data: dict) -> str:
    cmd = data.get("command")
    if cmd not in COMMANDS:
        raise ScenarioError(f"field 'command': expected one of {list(COMMANDS)}, got {cmd!r}")
    if cmd != "verify-identity":
        return cmd
    ident = data.get("identity")
    if ident not in IDENTITIES:
        raise ScenarioError(f"field 'identity': expected one of {list(IDENTITIES)}, got {ident!r}")
    return f"{cmd}:{ident}"


def validate_scenario(data) -> str:
    """Validate a parsed scenario and return its schema key; raises ScenarioError."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    key = _schema_key(data)
    props = dict(_COMMON, **SCHEMAS[key])
    if key.startswith("verify-identity"):
        props["identity"] = {"enum": list(IDENTITIES)}
    schema = {
        "type": "object",
        "properties": props,
        "required": ["command"] + REQUIRED[key],
        "additionalProperties": False,
    }
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        where = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"field '{where}': {exc.message}") from None
    return key


def _operator(data: dict, n: int):
    if "kernel" in data:
        K = kernel_from_json(data["kernel"])
        if K.dimension != n:
            raise ValueError("field 'kernel': dimension must equal n")
        return K
    return float(data.get("s", 0.5))


def _op_json(op) -> dict:
    return kernel_to_json(op) if not isinstance(op, float) else {"family": "fractional", "s": op}


def _run_symbol(data, spec, threads):
    K = kernel_from_json(data["kernel"])
    K2 = lift_kernel(K)
    taus = [float(t) for t in data["tau"]]
    if any(t < 0 for t in taus):
        raise ValueError("field 'tau': values must be nonnegative")
    rows = []
    for t in taus:
        a, b = hankel_symbol(K, t), hankel_symbol(K2, t)
        rows.append((t, a, b, abs(a - b) / max(1.0, abs(a))))
    residual = max(row[3] for row in rows)
    result = {"kernel": kernel_to_json(K), "invariance_residual": residual}
    return result, residual, ["tau", "psi_n", "psi_n_plus_2", "residual"], rows


def _run_lift_check(data, spec, threads):
    result, rows, worst = {}, [], 0.0
    if "field" in data:
        n, s_ord = int(data.get("n", 1)), float(data.get("s", 0.5))
        u = catalog.ODD_FIELDS[data["field"]](n)
        v = lift_field(u)
        probes = u.probe_points(32)
        probes = probes[np.abs(probes[:, 0]) > 1e-3]
        back = restrict_field(v)(probes)
        roundtrip = float(np.max(np.abs(back - u(probes))))
        a, b = weighted_norm_As(u, s_ord), weighted_norm_Ls(v, s_ord)
        gap = abs(a - b) / abs(b)
        result.update(roundtrip_residual=roundtrip, norm_As=a, norm_Ls=b, rel_gap=gap)
        worst = max(worst, gap, roundtrip)
    if "kernel" in data:
        K = kernel_from_json(data["kernel"])
        lifted = lift_kernel(K)
        if "reference" in data:
            ref = kernel_from_json(data["reference"])
        elif K.family == "fractional":
            ref = fractional_kernel(K.dimension + 2, K.params["s"])
        else:
            raise ValueError("field 'reference': required for non-fractional kernels")
        if ref.dimension != K.dimension + 2:
            raise ValueError("field 'reference': dimension must be kernel n + 2")
        for r in data.get("radii", [0.1, 1.0, 10.0]):
            r = float(r)
            if r <= 0:
                raise ValueError("field 'radii': radii must be positive")
            a, b = float(lifted(r)), float(ref(r))
            rows.append((r, a, b, abs(a - b) / abs(b)))
        kernel_err = max(row[3] for row in rows)
        result.update(kernel=kernel_to_json(K), kernel_max_rel_err=kernel_err)
        worst = max(worst, kernel_err)
    if not result:
        raise ValueError("lift-check needs 'field' or 'kernel'")
    return result, worst, ["radius", "lifted", "reference", "rel_err"], rows


def _run_identity(key, data, spec, threads):
    ident = key.split(":")[1]
    if ident == "sphere":
        a, b, r, g = (float(data[k]) for k in ("alpha", "beta", "r", "gamma"))
        lhs, rhs = sphere_kernel_identity(a, b, r, g)
        gap = abs(lhs - rhs) / abs(rhs)
        return {"lhs": lhs, "rhs": rhs, "rel_gap": gap}, gap, \
            ["alpha", "beta", "r", "gamma", "lhs", "rhs"], [(a, b, r, g, lhs, rhs)]
    if ident == "bochner":
        f, decay = catalog.even_profile(data["profile"])
        xi = data.get("xi", list(np.linspace(-4.0, 4.0, 33)))
        rep = bochner_report(f, xi, decay)
        return {"residual": rep.residual, "spectral_gap": rep.spectral_gap}, rep.residual, \
            ["xi", "lhs", "rhs"], list(zip(rep.xi, rep.lhs, rep.rhs))
    n = int(data.get("n", 1))
    if ident == "odd":
        u = catalog.ODD_FIELDS[data.get("field", "odd-gaussian")](n)
        pts = np.asarray(data["points"], dtype=float)
        if pts.shape[1] != n:
            raise ValueError("field 'points': each point needs n coordinates")
        op = _operator(data, n)
        res = odd_identity_residual(op, u, pts, spec, threads)
        return {"operator": _op_json(op), "residual": res}, res, \
            [f"x_{i + 1}" for i in range(n)], [tuple(p) for p in pts]
    if ident == "norm":
        u = catalog.ODD_FIELDS[data.get("field", "odd-gaussian")](n)
        s = float(data.get("s", 0.5))
        a = weighted_norm_As(u, s)
        b = weighted_norm_Ls(lift_field(u), s)
        gap = abs(a - b) / abs(b)
        return {"norm_As": a, "norm_Ls": b, "rel_gap": gap}, gap, ["norm_As", "norm_Ls"], [(a, b)]
    if ident == "pairing":
        s = float(data["s"])
        u = catalog.odd_gaussian(n)
        g = catalog.odd_bump(n)
        reverse = catalog.bump(n + 2, 1.2, [0.3, 0.2, -0.1] + [0.0] * (n - 1)) \
            if data.get("reverse", True) else None
        rep = weak_pairing_report(u, g, s, reverse, spec=spec, threads=threads)
        res = rep.forward if rep.reverse is None else max(rep.forward, rep.reverse)
        return {"forward": rep.forward, "reverse": rep.reverse, "lhs": rep.lhs,
                "rhs": rep.rhs, "residual": res}, res, ["lhs", "rhs"], [(rep.lhs, rep.rhs)]
    k, lam = int(data["k"]), float(data["lam"])
    pts = np.asarray(data["points"], dtype=float)
    m = pts.shape[1] - 1
    u = Field(m + 1, lambda p: np.exp(-0.5 * np.sum(p * p, axis=-1)) * np.cos(p[..., 0]),
              name="gauss-cos")
    res = cylindrical_identity_residual(k, lam, u, pts, float(data.get("h", 1e-3)))
    return {"residual": res}, res, [f"p_{i}" for i in range(m + 1)], [tuple(p) for p in pts]


def _box(obj, default: float, n: int) -> Box:
    if obj is None:
        return Box((-default,) * n, (default,) * n)
    if len(obj["lows"]) != n or len(obj["highs"]) != n:
        raise ValueError("box bounds must have n entries")
    return Box(tuple(map(float, obj["lows"])), tuple(map(float, obj["highs"])))


def _run_harnack(data, spec, threads):
    n = int(data.get("n", 1))
    op = _operator(data, n)
    v = catalog.iso_profile(data["vtilde"], n + 2)
    omega = _box(data.get("omega"), 1.2, n)
    K = CompactSetSpec(_box(data.get("K"), 1.0, n), float(data.get("exclusion", 0.0)),
                       int(data.get("sample_density", 17)))
    p = manufacture_solution(v, op, omega, int(data.get("residual_density", 7)), spec, threads)
    ok, rep = verify_theorem_odd_harnack(p, K, float(data["C_budget"]))
    result = dict(rep.as_dict(), c_sup=p.c_sup, residual_tol=p.residual_tol,
                  C_budget=float(data["C_budget"]))
    rows = [tuple(x) + (q,) for x, q in zip(rep.points, rep.quotients)]
    return result, ok, [f"x_{i + 1}" for i in range(n)] + ["quotient"], rows


def _zero_problem(n: int, s: float, omega: Box, spec) -> SchroedingerProblem:
    zero = Field(n, lambda p: np.zeros(p.shape[:-1]), "antisymmetric", decay_bound=(1.0, 50.0),
                 first_normal_derivative=lambda q: np.zeros(np.shape(q)[:-1]), name="zero")
    c = Field(n, lambda p: np.zeros(p.shape[:-1]), "symmetric", name="c")
    return SchroedingerProblem(s, omega, c, zero, None, spec=spec)


def _run_half_ball(cmd, data, spec, threads):
    n = int(data.get("n", 1))
    s, rho, M = float(data["s"]), float(data["rho"]), float(data.get("M", 0.0))
    omega = _box(None, max(1.2, rho), n)
    if data["vtilde"] == "zero":
        p = _zero_problem(n, s, omega, spec)
    else:
        v = catalog.iso_profile(data["vtilde"], n + 2)
        p = manufacture_solution(v, s, omega, 5, spec, threads)
    if "scale" in data:
        p = p.scaled(float(data["scale"]))
    density = int(data.get("density", 9))
    if cmd == "weak-harnack":
        norm, inf_q, ratio = weak_harnack_report(p, M, rho, s, density, threads)
        result = {"norm_As": norm, "inf_quotient": inf_q, "ratio": ratio}
    else:
        sup_q, norm, ratio = local_boundedness_report(p, M, rho, s, density, threads)
        result = {"sup_quotient": sup_q, "norm_As": norm, "ratio": ratio}
    inner = half_ball_samples(n, 0.5 * rho, density)
    q = p.solution(inner) / inner[:, 0]
    rows = [tuple(x) + (v,) for x, v in zip(inner, q)]
    return result, math.isfinite(ratio), [f"x_{i + 1}" for i in range(n)] + ["quotient"], rows


def _run_mollifier(data, spec, threads):
    d, radius = int(data.get("d", 3)), float(data.get("radius", 1.0))
    alpha = float(data.get("alpha", d + 2.0))
    measure = WeightedMeasureSpec(d, alpha)
    measure.ensure_finite()
    eps = [float(e) for e in data["eps"]]
    seq = mollifier_convergence_report(catalog.truncated_gaussian(d, radius), measure, eps,
                                       breaks=(radius,))
    decreasing = all(b < a for a, b in zip(seq, seq[1:]))
    final_ratio = seq[-1] / seq[0] if seq[0] > 0 else 0.0
    ok = decreasing and final_ratio <= float(data.get("max_final_ratio", math.inf))
    result = {"errors": seq, "strictly_decreasing": decreasing, "final_ratio": final_ratio}
    return result, ok, ["eps", "weighted_l1_error"], list(zip(eps, seq))


def execute(data: dict, spec: QuadratureSpec, tolerance_scale: float = 1.0, threads: int = 1):
    """Run a validated scenario; returns (report dict, passed, columns, rows)."""
    key = _schema_key(data)
    cmd = data["command"]
    if cmd == "symbol":
        result, measure, cols, rows = _run_symbol(data, spec, threads)
    elif cmd == "lift-check":
        result, measure, cols, rows = _run_lift_check(data, spec, threads)
    elif cmd == "verify-identity":
        result, measure, cols, rows = _run_identity(key, data, spec, threads)
    elif cmd == "harnack":
        result, measure, cols, rows = _run_harnack(data, spec, threads)
    elif cmd == "mollifier":
        result, measure, cols, rows = _run_mollifier(data, spec, threads)
    else:
        result, measure, cols, rows = _run_half_ball(cmd, data, spec, threads)
    tol = None
    if isinstance(measure, bool):
        passed = measure
    else:
        tol = float(data.get("tolerance", DEFAULT_TOL[key])) * tolerance_scale
        passed = bool(measure <= tol)
    report = {
        "spec_version": SPEC_VERSION,
        "command": cmd,
        "quadrature": spec.to_dict(),
        "tolerance": tol,
        "tolerance_scale": tolerance_scale,
        "result": result,
        "residual": None if isinstance(measure, bool) else float(measure),
        "pass": passed,
    }
    if "identity" in data:
        report["identity"] = data["identity"]
    return report, passed, cols, rows


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def dumps(obj, indent: int = 0) -> str:
    """JSON text with every float printed to 17 significant digits."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    return json.dumps(obj)


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return _fmt(float(v))
    return str(v)


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in _flatten(report):
        w.writerow([k, _cell(v)])
    return buf.getvalue()


def table_csv(cols, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([_cell(float(v)) if isinstance(v, (int, float, np.number)) else _cell(v)
                    for v in row])
    return buf.getvalue()


def run_scenario(path, output=None, fmt=None, tolerance_scale: float = 1.0, threads: int = 1,
                 dump_samples=None, stdout=None) -> int:
    """Validate and execute a scenario file; returns the process exit status."""
    stdout = stdout or sys.stdout
    try:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"malformed JSON: {exc}") from None
        validate_scenario(data)
        if tolerance_scale <= 0 or threads < 1:
            raise ScenarioError("--tolerance-scale must be positive and --threads at least 1")
        try:
            spec = QuadratureSpec.from_dict(data.get("quadrature"))
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"field 'quadrature': {exc}") from None
        out_opts = data.get("output", {})
        fmt = fmt or out_opts.get("format", "json")
        output = output or out_opts.get("path")
        try:
            report, passed, cols, rows = execute(data, spec, tolerance_scale, threads)
        except INPUT_ERRORS as exc:
            raise ScenarioError(f"{type(exc).__name__}: {exc}") from None
    except ScenarioError as exc:
        print(f"bochnerlift: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BochnerLiftError as exc:
        print(f"bochnerlift: check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = dumps(report) + "\n" if fmt == "json" else to_csv(report)
    if output:
        Path(output).write_text(text)
    else:
        stdout.write(text)
    if dump_samples:
        Path(dump_samples).write_text(table_csv(cols, rows))
    return EXIT_PASS if passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    epilog = "commands and sample CSV columns (--dump-samples):\n" + "\n".join(
        f"  {cmd:<18} {cols}" for cmd, cols in CSV_COLUMNS.items()
    ) + "\n\n--format csv writes the report itself as flattened key,value rows."
    ap = argparse.ArgumentParser(
        prog="bochnerlift",
        description="Run a JSON scenario (symbol, lift-check, verify-identity, harnack, "
                    "weak-harnack, local-boundedness, mollifier) and write a report.",
        epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--scenario", required=True, help="path to the scenario JSON file")
    ap.add_argument("--output", help="report path (default: stdout)")
    ap.add_argument("--format", choices=["json", "csv"], help="report format (default json)")
    ap.add_argument("--tolerance-scale", type=float, default=1.0,
                    help="multiply every asserted tolerance by this factor")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for sample lattices")
    ap.add_argument("--dump-samples", help="write the per-sample table as CSV to this path")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run_scenario(args.scenario, args.output, args.format, args.tolerance_scale,
                        args.threads, args.dump_samples)


if __name__ == "__main__":
    sys.exit(main())
