"""File formats: measure descriptions, coefficient files, rules, CSV tables.

All CSV output uses '.' decimals, '\\n' line endings, a mandatory header row,
and shortest round-trip float formatting, so identical runs produce
byte-identical files on every platform.  JSON documents carry a "version"
field and validate against the schemas shipped in ``cdkit/schemas``.
"""

from __future__ import annotations

import json
from importlib import resources

import jsonschema
import numpy as np

from .errors import MeasureError
from .measures import AtomicMeasure, NamedMeasure, SupportKind
from .oprl import JacobiParams
from .opuc import VerblunskyParams
from .quadrature import QuadratureRule

FORMAT_VERSION = "1"


def format_float(x):
    """Shortest decimal that round-trips to the same binary64 value."""
    return repr(float(x))


def _format_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_csv(path, header, rows):
    """Deterministic CSV: header row, '\\n' endings, round-trip floats."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path, obj):
    """Deterministic JSON artifact: sorted keys, round-trip floats."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_schema(name):
    text = resources.files("cdkit.schemas").joinpath(name).read_text("utf-8")
    return json.loads(text)


def validate_against_schema(doc, schema_name, where="document"):
    """Schema-validate with a field-path error message."""
    schema = load_schema(schema_name)
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        err = errors[0]
        path = "".join("[%r]" % p for p in err.path) or "(top level)"
        raise MeasureError("%s: field %s: %s" % (where, path, err.message))


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

def _parse_point(raw):
    if isinstance(raw, (list, tuple)):
        return complex(raw[0], raw[1])
    return float(raw)


def measure_from_dict(doc, where="measure"):
    """Measure description -> NamedMeasure or AtomicMeasure (atomic_* kinds).

    Returns (measure, resolution or None).
    """
    validate_against_schema(doc, "measure.schema.json", where)
    kind = doc["kind"]
    params = doc.get("params", {})
    atoms = [( _parse_point(p), float(w)) for p, w in doc.get("atoms", [])]
    resolution = doc.get("resolution")
    if kind == "atomic_real":
        if not atoms:
            raise MeasureError("%s: atomic_real needs a nonempty atoms list"
                               % where)
        pts = np.array([float(np.real(p)) for p, _ in atoms])
        wts = np.array([w for _, w in atoms])
        return AtomicMeasure(SupportKind.REAL_LINE, pts, wts), resolution
    if kind == "atomic_circle":
        if not atoms:
            raise MeasureError("%s: atomic_circle needs a nonempty atoms list"
                               % where)
        pts = np.array([complex(p) for p, _ in atoms])
        wts = np.array([w for _, w in atoms])
        return AtomicMeasure(SupportKind.UNIT_CIRCLE, pts, wts), resolution
    if kind == "uniform":
        nm = NamedMeasure.uniform(params.get("lo", -1.0), params.get("hi", 1.0))
    elif kind == "chebyshev2":
        nm = NamedMeasure.chebyshev2()
    elif kind == "jacobi":
        try:
            nm = NamedMeasure.jacobi(params["a"], params["b"])
        except KeyError as exc:
            raise MeasureError("%s: field ['params']: jacobi needs %s"
                               % (where, exc)) from None
    elif kind == "lebesgue_circle":
        nm = NamedMeasure.lebesgue_circle()
    elif kind == "szego":
        coeffs = params.get("coeffs")
        if not coeffs:
            raise MeasureError("%s: field ['params']['coeffs']: required for "
                               "szego" % where)
        nm = NamedMeasure.szego(*[_parse_point(c) for c in coeffs])
    else:
        raise MeasureError("%s: unsupported kind %r" % (where, kind))
    if atoms:
        nm = nm.with_atoms(*atoms)
    return nm, resolution


def measure_from_file(path):
    """Load and validate a UTF-8 JSON measure-description file.

    Syntax errors report line/column; schema violations report the offending
    field path.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeasureError("%s: line %d column %d: %s"
                           % (path, exc.lineno, exc.colno, exc.msg)) from None
    return measure_from_dict(doc, where=str(path))


def measure_from_spec(spec):
    """Inline CLI measure spec -> (measure, resolution or None).

    Forms: 'uniform', 'uniform:lo,hi', 'chebyshev2', 'jacobi:a,b',
    'lebesgue-circle', 'szego:c0,c1,...', or a path to a measure JSON file.
    """
    name, _, argstr = spec.partition(":")
    args = [float(s) for s in argstr.split(",")] if argstr else []
    key = name.replace("-", "_")
    if key == "uniform":
        nm = NamedMeasure.uniform(*args) if args else NamedMeasure.uniform()
        return nm, None
    if key == "chebyshev2":
        return NamedMeasure.chebyshev2(), None
    if key == "jacobi":
        if len(args) != 2:
            raise MeasureError("jacobi spec needs two parameters: jacobi:a,b")
        return NamedMeasure.jacobi(*args), None
    if key == "lebesgue_circle":
        return NamedMeasure.lebesgue_circle(), None
    if key == "szego":
        if not args:
            raise MeasureError("szego spec needs coefficients: szego:c0,c1,..")
        return NamedMeasure.szego(*args), None
    return measure_from_file(spec)


def measure_to_dict(measure, resolution=None):
    """Provenance record for manifests."""
    if isinstance(measure, NamedMeasure):
        doc = {"version": FORMAT_VERSION, "kind": measure.kind}
        if measure.kind == "uniform":
            doc["params"] = {"lo": measure.params[0], "hi": measure.params[1]}
        elif measure.kind == "jacobi":
            doc["params"] = {"a": measure.params[0], "b": measure.params[1]}
        elif measure.kind == "szego":
            doc["params"] = {"coeffs": [[c.real, c.imag]
                                        for c in measure.params]}
        if measure.extra_atoms:
            doc["atoms"] = [[_point_to_json(p), w]
                            for p, w in measure.extra_atoms]
        if resolution is not None:
            doc["resolution"] = int(resolution)
        return doc
    kind = ("atomic_real" if measure.support is SupportKind.REAL_LINE
            else "atomic_circle")
    return {"version": FORMAT_VERSION, "kind": kind,
            "atoms": [[_point_to_json(p), float(w)]
                      for p, w in zip(measure.points, measure.weights)]}


def _point_to_json(p):
    if isinstance(p, complex) or np.iscomplexobj(np.asarray(p)):
        p = complex(p)
        return [p.real, p.imag]
    return float(p)


# ---------------------------------------------------------------------------
# Coefficient families
# ---------------------------------------------------------------------------

def jacobi_to_dict(jp):
    return {"version": FORMAT_VERSION, "a": [float(v) for v in jp.a],
            "b": [float(v) for v in jp.b], "mass0": jp.mass0,
            "maxDegree": jp.max_degree}


def jacobi_from_dict(doc, where="jacobi params"):
    validate_against_schema(doc, "jacobi-params.schema.json", where)
    return JacobiParams(np.asarray(doc["a"], dtype=float),
                        np.asarray(doc["b"], dtype=float),
                        float(doc["mass0"]), int(doc["maxDegree"]))


def write_jacobi_csv(path, jp):
    """One row per n: n, a_n, b_n (1-indexed coefficients)."""
    rows = [(i + 1, jp.a[i], jp.b[i]) for i in range(jp.max_degree)]
    write_csv(path, ["n", "a_n", "b_n"], rows)


def verblunsky_to_dict(vp):
    return {"version": FORMAT_VERSION,
            "alpha": [[float(a.real), float(a.imag)] for a in vp.alpha],
            "mass0": vp.mass0, "maxDegree": vp.max_degree}


def verblunsky_from_dict(doc, where="verblunsky params"):
    validate_against_schema(doc, "verblunsky-params.schema.json", where)
    alpha = np.array([complex(re, im) for re, im in doc["alpha"]])
    return VerblunskyParams(alpha, float(doc["mass0"]), int(doc["maxDegree"]))


def write_verblunsky_csv(path, vp):
    """One row per n: n, Re alpha_n, Im alpha_n, rho_n (0-indexed alpha)."""
    rho = vp.rho
    rows = [(i, vp.alpha[i].real, vp.alpha[i].imag, rho[i])
            for i in range(vp.max_degree)]
    write_csv(path, ["n", "alpha_re", "alpha_im", "rho"], rows)


# ---------------------------------------------------------------------------
# Quadrature rules and kernel scans
# ---------------------------------------------------------------------------

def rule_to_dict(rule):
    return {"version": FORMAT_VERSION,
            "nodes": [float(x) for x in rule.nodes],
            "weights": [float(w) for w in rule.weights],
            "exactDegree": int(rule.exact_degree),
            "provenance": rule.provenance}


def rule_from_dict(doc, where="quadrature rule"):
    validate_against_schema(doc, "quadrature-rule.schema.json", where)
    return QuadratureRule(nodes=np.asarray(doc["nodes"], dtype=float),
                          weights=np.asarray(doc["weights"], dtype=float),
                          exact_degree=int(doc["exactDegree"]),
                          provenance=dict(doc["provenance"]))


def write_rule_csv(path, rule):
    write_csv(path, ["node", "weight"], zip(rule.nodes, rule.weights))


def write_kernel_scan_csv(path, rows):
    """Kernel scan rows: (n, z, zeta, route, K) flattened to spec columns."""
    header = ["n", "z_re", "z_im", "zeta_re", "zeta_im", "route", "K_re",
              "K_im"]
    flat = [(kv.n, np.real(kv.z), np.imag(kv.z), np.real(kv.zeta),
             np.imag(kv.zeta), kv.route.value, np.real(kv.value),
             np.imag(kv.value)) for kv in rows]
    write_csv(path, header, flat)
