"""Batch front end: declarative problem files in, machine-readable reports out.

A problem file is a JSON document (schema shipped as
``problem_schema.json``) holding a space model, named piecewise-polynomial
functions, one task tag and its parameters.  ``run_task`` dispatches to the
library and wraps the outcome in a :class:`RunReport`; ``emit`` renders a
report either as a stable structured record or as delimiter-separated
convergence-trace tables suitable for plotting.

Exit codes: 0 success, 2 schema violation (with the offending location),
3 task-level numerical error (nonexistence, enumeration caps, incompatible
operands).  Nothing is written to the output target on an error path.
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from .errors import ArgumentError, EnumerationLimitError, ExistenceError, \
    SchemaError
from .functions import PiecewiseFunction
from .integrals import integrate_g_dx, integrate_x_dg, per_partes
from .representation import StieltjesOperator, additivity_check, \
    measure_from_function, measure_of_interval, roundtrip, \
    weakly_compact_image_check
from .semivariation import e_set, semivariation, wcs_check
from .spaces import Seminorm, SpaceModel

__all__ = ["RunReport", "load_problem", "run_task", "emit", "main"]

_TASKS = (
    "integrate-gdx", "integrate-xdg", "perpartes", "semivariation", "eset",
    "wcs-check", "represent-apply", "image-check", "roundtrip", "measure",
)

_REQUIRED_PARAMS = {
    "integrate-gdx": ("integrand", "integrator"),
    "integrate-xdg": ("integrand", "integrator"),
    "perpartes": ("integrand", "integrator"),
    "semivariation": ("function",),
    "eset": ("function",),
    "wcs-check": ("function",),
    "represent-apply": ("integrator", "argument"),
    "image-check": ("integrator",),
    "roundtrip": ("integrator",),
    "measure": ("integrator", "interval"),
}

_NEEDS_SPACE = ("semivariation", "wcs-check", "represent-apply",
                "image-check")

_SCHEMA = None


@dataclass
class RunReport:
    """Task echo, result payload, diagnostics and convergence traces.

    ``traces`` is a list of ``{"label", "columns", "rows"}`` records; the
    wall time is kept for interactive use but excluded from every emitted
    format so that identical problem files produce identical bytes.
    """

    task: str
    payload: dict
    diagnostics: dict = field(default_factory=dict)
    traces: list = field(default_factory=list)
    wall_time: float = 0.0


# -- problem file loading ---------------------------------------------------


def _schema():
    global _SCHEMA
    if _SCHEMA is None:
        text = resources.files("stieltjes").joinpath(
            "problem_schema.json").read_text(encoding="utf-8")
        _SCHEMA = json.loads(text)
    return _SCHEMA


def load_problem(path):
    """Read and validate a problem file, returning the problem dict."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read problem file: {exc}", str(path))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}", str(path))
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(doc),
                    key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        loc = ".".join(str(p) for p in best.absolute_path)
        raise SchemaError(best.message, loc or "<root>")
    return doc


def _scalar_value(node):
    if isinstance(node, dict):
        return complex(node["re"], node["im"])
    return float(node)


def _num_array(node, loc):
    def walk(n):
        if isinstance(n, list):
            return [walk(v) for v in n]
        return _scalar_value(n)

    try:
        arr = np.asarray(walk(node))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"ragged or non-numeric array ({exc})", loc)
    if arr.dtype == object:
        raise SchemaError("ragged numeric array", loc)
    return arr


def _build_function(name, desc):
    loc = f"functions.{name}"
    dom = desc["domain"]
    bps = np.asarray(desc["breakpoints"], dtype=float)
    if bps[0] != dom[0] or bps[-1] != dom[1]:
        raise SchemaError("breakpoints must start and end at the domain "
                          "endpoints", loc + ".breakpoints")
    coeffs = _num_array(desc["coefficients"], loc + ".coefficients")
    values = None
    if "values" in desc:
        values = _num_array(desc["values"], loc + ".values")
    try:
        return PiecewiseFunction(bps, coeffs, values)
    except ArgumentError as exc:
        raise SchemaError(str(exc), loc)


def _build_seminorm(desc, loc):
    kind = desc["kind"]
    need = {"weighted-sup": "weights", "weighted-one": "weights",
            "quadratic": "matrix", "max": "parts"}[kind]
    if need not in desc:
        raise SchemaError(f"kind {kind!r} requires the field {need!r}", loc)
    try:
        if kind == "weighted-sup":
            return Seminorm.weighted_sup(np.asarray(desc["weights"], float))
        if kind == "weighted-one":
            return Seminorm.weighted_one(np.asarray(desc["weights"], float))
        if kind == "quadratic":
            return Seminorm.quadratic(
                _num_array(desc["matrix"], loc + ".matrix"))
        parts = [_build_seminorm(p, f"{loc}.parts.{i}")
                 for i, p in enumerate(desc["parts"])]
        return Seminorm.max_of(*parts)
    except ArgumentError as exc:
        raise SchemaError(str(exc), loc)


def _build_space(desc):
    sems = tuple(_build_seminorm(s, f"space.seminorms.{i}")
                 for i, s in enumerate(desc["seminorms"]))
    try:
        return SpaceModel(desc["dimension"], desc["field"], sems)
    except ArgumentError as exc:
        raise SchemaError(str(exc), "space")


def _resolve(funcs, params, key):
    name = params[key]
    if name not in funcs:
        raise SchemaError(f"unknown function {name!r}", f"parameters.{key}")
    return funcs[name]


# -- task dispatch ----------------------------------------------------------


def _components(value, prefix="value"):
    """Flatten a scalar/vector, real/complex value into named columns."""
    arr = np.atleast_1d(np.asarray(value))
    cx = np.iscomplexobj(arr)
    names, comps = [], []
    for i, z in enumerate(arr):
        tag = prefix if arr.size == 1 else f"{prefix}_{i}"
        if cx:
            names += [tag + "_re", tag + "_im"]
            comps += [float(z.real), float(z.imag)]
        else:
            names += [tag]
            comps += [float(z)]
    return names, comps


def _integral_trace(label, result, est_count):
    columns = None
    rows = []
    for rec in result.trace:
        names, comps = _components(rec.value)
        columns = (["level", "mesh"] + names
                   + [f"estimate_{j}" for j in range(est_count)])
        rows.append([rec.level, float(rec.mesh)] + comps
                    + [float(e) for e in np.atleast_1d(rec.estimates)])
    if columns is None:
        columns = ["level", "mesh", "value", "estimates"]
    return {"label": label, "columns": columns, "rows": rows}


def _integral_payload(result):
    return {"value": result.value, "converged": result.converged,
            "levels": result.levels}


def _run_integrate(task, funcs, space, params):
    f = _resolve(funcs, params, "integrand")
    x = _resolve(funcs, params, "integrator")
    tol = params.get("tolerance", 1e-8)
    levels = params.get("max_levels", 20)
    sems = space.seminorms if space is not None else None
    if task == "integrate-gdx":
        res = integrate_g_dx(f, x, seminorms=sems, tol=tol, max_levels=levels)
    else:
        res = integrate_x_dg(f, x, seminorms=sems, tol=tol, max_levels=levels)
    count = len(sems) if sems is not None else 1
    return (_integral_payload(res),
            {"error_estimates": res.error_estimates},
            [_integral_trace("integral", res, count)])


def _run_perpartes(funcs, space, params):
    x = _resolve(funcs, params, "integrand")
    g = _resolve(funcs, params, "integrator")
    sems = space.seminorms if space is not None else None
    res = per_partes(x, g, seminorms=sems,
                     tol=params.get("tolerance", 1e-8),
                     max_levels=params.get("max_levels", 20))
    count = len(sems) if sems is not None else 1
    payload = {"x_dg": res.x_dg.value, "g_dx": res.g_dx.value,
               "boundary": res.boundary, "max_gap": res.max_gap,
               "converged": res.converged}
    diagnostics = {"gaps": res.gaps,
                   "estimates_x_dg": res.x_dg.error_estimates,
                   "estimates_g_dx": res.g_dx.error_estimates}
    traces = [_integral_trace("x-dg", res.x_dg, count),
              _integral_trace("g-dx", res.g_dx, count)]
    return payload, diagnostics, traces


def _run_semivariation(funcs, space, params):
    x = _resolve(funcs, params, "function")
    sel = params.get("seminorm", 0)
    if sel >= len(space.seminorms):
        raise SchemaError(f"seminorm index {sel} out of range "
                          f"(family has {len(space.seminorms)})",
                          "parameters.seminorm")
    mesh0 = float(np.max(np.diff(x.breakpoints)))
    reports, traces = [], []
    for i, p in enumerate(space.seminorms):
        rep = semivariation(x, p, tol=params.get("tolerance", 1e-8),
                            max_levels=params.get("max_levels", 20),
                            phase_count=params.get("phase_count", 16))
        rep.seminorm_index = i
        reports.append(rep)
        rows = [[lvl, mesh0 / (1 << lvl), float(v)]
                for lvl, v in enumerate(rep.trace)]
        traces.append({"label": f"seminorm-{i}",
                       "columns": ["level", "mesh", "value"], "rows": rows})
    main_rep = reports[sel]
    payload = {"value": main_rep.value, "exact": main_rep.exact,
               "lower_bound_only": main_rep.lower_bound_only,
               "converged": main_rep.converged, "levels": main_rep.levels,
               "seminorm_index": sel}
    diagnostics = {"values": [r.value for r in reports],
                   "exact": [r.exact for r in reports]}
    return payload, diagnostics, traces


def _run_eset(funcs, params):
    x = _resolve(funcs, params, "function")
    if not x.is_step and "resolution" not in params:
        raise SchemaError("non-step functions need a grid resolution",
                          "parameters.resolution")
    pts = e_set(x, params.get("resolution"))
    payload = {"count": int(pts.shape[0]), "exact": bool(x.is_step),
               "points": pts}
    return payload, {}, []


def _run_wcs_check(funcs, space, params):
    x = _resolve(funcs, params, "function")
    ok, bounds = wcs_check(x, space.seminorms,
                           resolution=params.get("resolution", 12))
    return {"bounded": bool(ok)}, {"bounds": bounds}, []


def _run_represent_apply(funcs, space, params):
    x = _resolve(funcs, params, "integrator")
    g = _resolve(funcs, params, "argument")
    T = StieltjesOperator(space, x)
    value = T.apply(g, tol=params.get("tolerance", 1e-8))
    return ({"value": value}, {"wcs_bounds": T.wcs_bounds}, [])


def _run_image_check(funcs, space, params):
    x = _resolve(funcs, params, "integrator")
    T = StieltjesOperator(space, x)
    rep = weakly_compact_image_check(
        T, sample_count=params.get("sample_count", 10),
        seed=params.get("seed", 0), tol=params.get("tolerance", 1e-9))
    payload = {"ok": bool(rep.ok), "worst_distance": rep.worst_distance,
               "checked": rep.checked, "resolutions": list(rep.resolutions),
               "witness": rep.witness}
    return payload, {"wcs_bounds": T.wcs_bounds}, []


def _run_roundtrip(funcs, space, params):
    x = _resolve(funcs, params, "integrator")
    sems = space.seminorms if space is not None else None
    rep = roundtrip(x, probe_count=params.get("probe_count", 20),
                    tol=params.get("tolerance", 1e-8),
                    dual_count=params.get("dual_count", 20),
                    function_count=params.get("function_count", 20),
                    seed=params.get("seed", 0), seminorms=sems)
    payload = {"identity_gap": rep.identity_gap,
               "pairing_gap": rep.pairing_gap,
               "probe_count": rep.probe_count,
               "dual_count": rep.dual_count,
               "function_count": rep.function_count,
               "worst_pair": list(rep.worst_pair)
                             if rep.worst_pair is not None else None}
    return payload, {}, []


def _run_measure(funcs, params):
    x = _resolve(funcs, params, "integrator")
    m = measure_from_function(x)
    c, d = params["interval"]
    payload = {"interval": [float(c), float(d)],
               "value": measure_of_interval(m, c, d)}
    if "cuts" in params:
        payload["additivity_gap"] = additivity_check(
            m, np.asarray(params["cuts"], dtype=float))
    return payload, {}, []


def run_task(problem):
    """Dispatch a validated problem dict and return the :class:`RunReport`."""
    t0 = time.perf_counter()
    task = problem["task"]
    params = problem.get("parameters", {})
    for key in _REQUIRED_PARAMS[task]:
        if key not in params:
            raise SchemaError(f"task {task!r} requires the parameter "
                              f"{key!r}", f"parameters.{key}")
    if task in _NEEDS_SPACE and "space" not in problem:
        raise SchemaError(f"task {task!r} requires a space descriptor",
                          "space")
    space = _build_space(problem["space"]) if "space" in problem else None
    funcs = {name: _build_function(name, desc)
             for name, desc in problem["functions"].items()}

    if task in ("integrate-gdx", "integrate-xdg"):
        payload, diagnostics, traces = _run_integrate(task, funcs, space,
                                                      params)
    elif task == "perpartes":
        payload, diagnostics, traces = _run_perpartes(funcs, space, params)
    elif task == "semivariation":
        payload, diagnostics, traces = _run_semivariation(funcs, space,
                                                          params)
    elif task == "eset":
        payload, diagnostics, traces = _run_eset(funcs, params)
    elif task == "wcs-check":
        payload, diagnostics, traces = _run_wcs_check(funcs, space, params)
    elif task == "represent-apply":
        payload, diagnostics, traces = _run_represent_apply(funcs, space,
                                                            params)
    elif task == "image-check":
        payload, diagnostics, traces = _run_image_check(funcs, space, params)
    elif task == "roundtrip":
        payload, diagnostics, traces = _run_roundtrip(funcs, space, params)
    else:
        payload, diagnostics, traces = _run_measure(funcs, params)

    return RunReport(task=task, payload=payload, diagnostics=diagnostics,
                     traces=traces, wall_time=time.perf_counter() - t0)


# -- emission ---------------------------------------------------------------


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.complexfloating):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _cell(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def emit(report, format="structured"):
    """Render a report as bytes; wall time is excluded from both formats."""
    if format == "structured":
        doc = {"task": report.task,
               "payload": _jsonify(report.payload),
               "diagnostics": _jsonify(report.diagnostics),
               "traces": _jsonify(report.traces)}
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode()
    if format != "table":
        raise ArgumentError(f"unknown format {format!r}")
    traces = report.traces or [{"columns": ["level", "mesh", "value",
                                            "estimates"], "rows": []}]
    blocks = []
    for tr in traces:
        lines = ["\t".join(tr["columns"])]
        lines += ["\t".join(_cell(v) for v in row) for row in tr["rows"]]
        blocks.append("\n".join(lines))
    return ("\n\n".join(blocks) + "\n").encode()


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="stieltjes",
        description="Run one declarative problem file and emit its report.")
    parser.add_argument("--input", required=True,
                        help="path of the JSON problem file")
    parser.add_argument("--format", choices=("structured", "table"),
                        default="structured",
                        help="structured record or plot-ready trace table")
    parser.add_argument("--output", default="stdout",
                        help="output path, or 'stdout' (the default)")
    args = parser.parse_args(argv)
    try:
        report = run_task(load_problem(args.input))
        data = emit(report, args.format)
    except SchemaError as exc:
        print(f"schema violation at {exc.location or '<root>'}: {exc}",
              file=sys.stderr)
        return 2
    except (ExistenceError, EnumerationLimitError, ArgumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if args.output == "stdout":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(args.output, "wb") as fh:
            fh.write(data)
    return 0


if __name__ == "__main__":
    sys.exit(main())
