"""Command-line workbench: every computation with file-based inputs/outputs.

Exit codes: 0 all contracted tolerances passed; 2 configuration error;
3 tolerance failure; 4 numeric breakdown (overflow, ill-conditioning,
exhausted discretization).

Determinism contract: identical config + seed produce byte-identical CSV and
JSON artifacts, independent of ``--threads`` (artifacts never contain
timestamps and all atom reductions are fixed-order).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import io as cio
from .asymptotics import clock_spacing, density_at, universality_scan
from .errors import (CdkitError, CoarseMeasureError, ConfluentPointsError,
                     DegreeError, IllConditionedError, MeasureError)
from .kernels import (kernel_cd_circle, kernel_cd_real, kernel_diag_real,
                      kernel_direct)
from .measures import NamedMeasure, SupportKind, cdf, moments
from .oprl import eval_polys, orthonormal_values, stieltjes_recurrence
from .opuc import eval_circle_polys, szego_recurrence
from .quadrature import (exactness_check, gauss_rule, interlacing_check,
                         markov_stieltjes)
from .updates import geronimus_update, wong_update

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_NUMERIC = 4

_COMMANDS = ("moments", "recurrence", "kernel", "quadrature", "bounds",
             "universality", "clock", "update", "verify")


def experiment_config():
    text = resources.files("cdkit").joinpath("experiment_config.json") \
        .read_text("utf-8")
    return json.loads(text)


def parallel_map(fn, items, threads):
    """Order-preserving map; results are independent of the thread count."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cdkit",
        description="Christoffel-Darboux kernel workbench")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run-config file; explicit "
                       "flags override its values")
        p.add_argument("--measure", help="inline spec (uniform, uniform:lo,hi"
                       ", chebyshev2, jacobi:a,b, lebesgue-circle, "
                       "szego:c0,c1,..) or measure JSON path")
        p.add_argument("--n", type=int)
        p.add_argument("--x0", type=float)
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--z0", help="real number, or re,im for the circle")
        p.add_argument("--corner-shift", dest="corner_shift", type=float)
        p.add_argument("--grid", help="lo:hi:step")
        p.add_argument("--j-window", dest="j_window", type=int)
        p.add_argument("--resolution", type=int)
        p.add_argument("--output", help="artifact directory")
        p.add_argument("--threads", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--skip-oracle", dest="skip_oracle",
                       action="store_const", const=True)
    return parser


_CONFIG_KEYS = ("measure", "n", "x0", "lambda", "z0", "corner_shift", "grid",
                "j_window", "resolution", "output", "threads", "seed",
                "skip_oracle")


def _resolve_config(args):
    """Config file fills in flags the user did not pass explicitly."""
    cfg = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise MeasureError("%s: line %d column %d: %s" % (
                    args.config, exc.lineno, exc.colno, exc.msg)) from None
        cio.validate_against_schema(doc, "run-config.schema.json", args.config)
        if doc.get("command") not in (None, args.command):
            raise MeasureError("config file is for command %r, not %r"
                               % (doc["command"], args.command))
        cfg.update({k: v for k, v in doc.items() if k in _CONFIG_KEYS})
    flag_values = {
        "measure": args.measure, "n": args.n, "x0": args.x0, "lambda": args.lam,
        "z0": args.z0, "corner_shift": args.corner_shift, "grid": args.grid,
        "j_window": args.j_window, "resolution": args.resolution,
        "output": args.output, "threads": args.threads, "seed": args.seed,
        "skip_oracle": args.skip_oracle,
    }
    cfg.update({k: v for k, v in flag_values.items() if v is not None})
    cfg.setdefault("threads", 1)
    cfg.setdefault("seed", 0)
    cfg.setdefault("skip_oracle", False)
    cfg["command"] = args.command
    return cfg


def _parse_grid(spec, default=None):
    if spec is None:
        if default is None:
            raise MeasureError("--grid is required for this command")
        return default
    if isinstance(spec, dict):
        lo, hi = float(spec["lo"]), float(spec["hi"])
        if "count" in spec:
            return np.linspace(lo, hi, int(spec["count"]))
        step = float(spec["step"])
        return np.arange(lo, hi + 0.5 * step, step)
    parts = str(spec).split(":")
    if len(parts) != 3:
        raise MeasureError("grid must be lo:hi:step, got %r" % (spec,))
    lo, hi, step = (float(p) for p in parts)
    if step <= 0:
        raise MeasureError("grid step must be positive")
    return np.arange(lo, hi + 0.5 * step, step)


def _parse_z0(spec, support):
    if spec is None:
        raise MeasureError("--z0 is required for this command")
    if isinstance(spec, (list, tuple)):
        return complex(spec[0], spec[1])
    text = str(spec)
    if "," in text:
        re_s, im_s = text.split(",", 1)
        return complex(float(re_s), float(im_s))
    value = float(text)
    if support is SupportKind.UNIT_CIRCLE:
        return complex(value, 0.0)
    return value


def _default_resolution(named, n):
    factor = 8 if named.support is SupportKind.UNIT_CIRCLE else 4
    need = max(64, factor * (n + 2))
    return 1 << (need - 1).bit_length()


def _prepare_measure(cfg, n_needed):
    if not cfg.get("measure"):
        raise MeasureError("--measure is required")
    measure, file_res = cio.measure_from_spec(cfg["measure"])
    resolution = cfg.get("resolution") or file_res
    if isinstance(measure, NamedMeasure):
        if resolution is None:
            resolution = _default_resolution(measure, n_needed)
        mu = measure.discretize(resolution)
    else:
        mu = measure
        resolution = None
    return mu, resolution


def _require_n(cfg, minimum=1):
    n = cfg.get("n")
    if n is None or n < minimum:
        raise MeasureError("--n (>= %d) is required" % minimum)
    return int(n)


# ---------------------------------------------------------------------------
# Command handlers: return (exit_code, pass_flag, artifact names)
# ---------------------------------------------------------------------------

def _cmd_moments(cfg, out):
    n = _require_n(cfg, minimum=0)
    mu, cfg["resolution"] = _prepare_measure(cfg, n)
    mm = moments(mu, n)
    rows = [(j, k, np.real(mm.matrix[j, k]), np.imag(mm.matrix[j, k]))
            for j in range(n + 1) for k in range(n + 1)]
    cio.write_csv(out / "moments.csv", ["j", "k", "m_re", "m_im"], rows)
    cio.write_json(out / "moments.json",
                   {"version": cio.FORMAT_VERSION, "n": n,
                    "structure": mm.structure})
    return EXIT_OK, True, ["moments.csv", "moments.json"]


def _cmd_recurrence(cfg, out):
    n = _require_n(cfg)
    mu, cfg["resolution"] = _prepare_measure(cfg, n)
    if mu.support is SupportKind.REAL_LINE:
        jp = stieltjes_recurrence(mu, n)
        cio.write_json(out / "jacobi.json", cio.jacobi_to_dict(jp))
        cio.write_jacobi_csv(out / "jacobi.csv", jp)
        return EXIT_OK, True, ["jacobi.json", "jacobi.csv"]
    vp = szego_recurrence(mu, n)
    cio.write_json(out / "verblunsky.json", cio.verblunsky_to_dict(vp))
    cio.write_verblunsky_csv(out / "verblunsky.csv", vp)
    return EXIT_OK, True, ["verblunsky.json", "verblunsky.csv"]


def _cmd_kernel(cfg, out):
    n = _require_n(cfg)
    mu, cfg["resolution"] = _prepare_measure(cfg, n + 1)
    grid = _parse_grid(cfg.get("grid"))
    threads = cfg["threads"]
    rows = []
    worst = 0.0
    if mu.support is SupportKind.REAL_LINE:
        jp = stieltjes_recurrence(mu, n + 1)
        evals = {x: eval_polys(jp, n, x) for x in grid}

        def do_pair(pair):
            x, y = pair
            out_rows = []
            direct = kernel_direct(evals[x], evals[y], n)
            out_rows.append(direct)
            if x == y:
                out_rows.append(kernel_diag_real(jp, n, x))
            else:
                try:
                    out_rows.append(kernel_cd_real(jp, n, x, y))
                except ConfluentPointsError:
                    pass
            return out_rows

        pairs = [(x, y) for x in grid for y in grid]
        for chunk in parallel_map(do_pair, pairs, threads):
            direct = chunk[0]
            for kv in chunk[1:]:
                scale = max(abs(direct.value), 1e-300)
                worst = max(worst, abs(kv.value - direct.value) / scale)
            rows.extend(chunk)
    else:
        vp = szego_recurrence(mu, n + 1)
        zs = np.exp(1j * grid)
        evals = {i: eval_circle_polys(vp, n, z) for i, z in enumerate(zs)}

        def do_pair(pair):
            i, j = pair
            z, zeta = zs[i], zs[j]
            out_rows = [kernel_direct(evals[i], evals[j], n)]
            try:
                out_rows.append(kernel_cd_circle(vp, n, z, zeta))
                out_rows.append(kernel_cd_circle(vp, n, z, zeta, alt=True))
            except ConfluentPointsError:
                pass
            return out_rows

        pairs = [(i, j) for i in range(len(zs)) for j in range(len(zs))]
        for chunk in parallel_map(do_pair, pairs, threads):
            direct = chunk[0]
            for kv in chunk[1:]:
                scale = max(abs(direct.value), 1e-300)
                worst = max(worst, abs(kv.value - direct.value) / scale)
            rows.extend(chunk)
    cio.write_kernel_scan_csv(out / "kernel_scan.csv", rows)
    tol = 1e-10
    ok = worst <= tol
    cio.write_json(out / "kernel.json",
                   {"version": cio.FORMAT_VERSION, "experiment": "kernel_scan",
                    "params": {"n": n}, "maxError": worst, "tolerance": tol,
                    "pass": ok})
    return (EXIT_OK if ok else EXIT_TOLERANCE), ok, ["kernel_scan.csv",
                                                     "kernel.json"]


def _cmd_quadrature(cfg, out):
    n = _require_n(cfg)
    mu, cfg["resolution"] = _prepare_measure(cfg, n)
    if mu.support is not SupportKind.REAL_LINE:
        raise MeasureError("quadrature needs a real-line measure")
    jp = stieltjes_recurrence(mu, n)
    if cfg.get("x0") is not None:
        rule = gauss_rule(jp, n, x0=cfg["x0"])
    else:
        rule = gauss_rule(jp, n, corner_shift=cfg.get("corner_shift", 0.0))
    degrees = list(range(rule.exact_degree + 3))
    errors = exactness_check(rule, mu, degrees)
    certified = errors[:rule.exact_degree + 1]
    ok = bool(np.max(certified) <= 1e-10)
    beyond = [d for d in range(rule.exact_degree + 1, len(degrees))
              if errors[d] > max(1e-13, 50 * float(np.max(certified)))]
    cio.write_rule_csv(out / "rule.csv", rule)
    cio.write_json(out / "rule.json", cio.rule_to_dict(rule))
    cio.write_csv(out / "exactness.csv", ["degree", "rel_error"],
                  zip(degrees, errors))
    cio.write_json(out / "quadrature.json", {
        "version": cio.FORMAT_VERSION, "experiment": "gauss_exactness",
        "params": {"n": n, "exactDegree": rule.exact_degree},
        "maxError": float(np.max(certified)), "tolerance": 1e-10, "pass": ok,
        "firstObservedFailure": beyond[0] if beyond else None})
    arts = ["rule.csv", "rule.json", "exactness.csv", "quadrature.json"]
    return (EXIT_OK if ok else EXIT_TOLERANCE), ok, arts


def _cmd_bounds(cfg, out):
    n = _require_n(cfg)
    mu, cfg["resolution"] = _prepare_measure(cfg, n)
    if mu.support is not SupportKind.REAL_LINE:
        raise MeasureError("bounds need a real-line measure")
    grid = _parse_grid(cfg.get("grid"))
    jp = stieltjes_recurrence(mu, n)

    def one(x0):
        b = markov_stieltjes(jp, n, x0)
        true_cdf = (mu.named.cdf(x0) if mu.named is not None
                    else cdf(mu, x0, closed=True))
        ok = (b.upper + 1e-9 >= cdf(mu, x0, closed=True)
              >= cdf(mu, x0, closed=False) >= b.lower - 1e-9)
        return (x0, b.lower, b.upper, true_cdf, ok)

    results = parallel_map(one, [float(x) for x in grid], cfg["threads"])
    cio.write_csv(out / "bounds.csv", ["x0", "lower", "upper", "trueCDF"],
                  [r[:4] for r in results])
    ok = all(r[4] for r in results)
    cio.write_json(out / "bounds.json", {
        "version": cio.FORMAT_VERSION, "experiment": "markov_stieltjes",
        "params": {"n": n}, "maxError": 0.0 if ok else 1.0,
        "tolerance": 0.0, "pass": ok})
    return (EXIT_OK if ok else EXIT_TOLERANCE), ok, ["bounds.csv",
                                                     "bounds.json"]


def _cmd_universality(cfg, out):
    conf = experiment_config()["universality"]
    n = cfg.get("n") or conf["n"]
    x0 = cfg.get("x0", 0.0) or 0.0
    mu, cfg["resolution"] = _prepare_measure(cfg, n)
    grid = _parse_grid(cfg.get("grid"), _parse_grid(conf["grid"]))
    jp = stieltjes_recurrence(mu, n)
    report = universality_scan(jp, mu, x0, n, grid, grid)
    tol = conf["tolerance_center"] if abs(x0) < 1e-12 \
        else conf["tolerance_off_center"]
    ok = report.max_abs_error <= tol
    rows = [(a, b, report.measured[i, j], report.reference[i, j],
             abs(report.measured[i, j] - report.reference[i, j]))
            for i, a in enumerate(grid) for j, b in enumerate(grid)]
    cio.write_csv(out / "universality.csv",
                  ["a", "b", "measured", "reference", "abs_error"], rows)
    cio.write_json(out / "universality.json", {
        "version": cio.FORMAT_VERSION, "experiment": "bulk_universality",
        "params": {"n": n, "x0": x0, "rho_n": report.rho_n,
                   "rho_e": report.rho_e, "rescale": report.rescale},
        "maxError": report.max_abs_error, "tolerance": tol, "pass": bool(ok)})
    return (EXIT_OK if ok else EXIT_TOLERANCE), ok, ["universality.csv",
                                                     "universality.json"]


def _cmd_clock(cfg, out):
    conf = experiment_config()["clock"]
    n = cfg.get("n") or conf["n"]
    x0 = cfg.get("x0", 0.0) or 0.0
    j_window = cfg.get("j_window") or conf["j_window"]
    mu, cfg["resolution"] = _prepare_measure(cfg, n)
    jp = stieltjes_recurrence(mu, n)
    table = clock_spacing(jp, mu, x0, n, j_window)
    tol = conf["tolerance"]
    err = float(np.max(np.abs(table.scaled_spacings - 1.0)))
    first_ok = table.first_zero_scaled <= 1.0 + tol
    ok = bool(err <= tol and first_ok)
    cio.write_csv(out / "clock.csv", ["j", "scaled_spacing"],
                  zip(table.j_values, table.scaled_spacings))
    cio.write_json(out / "clock.json", {
        "version": cio.FORMAT_VERSION, "experiment": "clock_spacing",
        "params": {"n": n, "x0": x0, "c_n": table.c_n,
                   "first_zero_scaled": table.first_zero_scaled},
        "maxError": err, "tolerance": tol, "pass": ok})
    return (EXIT_OK if ok else EXIT_TOLERANCE), ok, ["clock.csv", "clock.json"]


def _cmd_update(cfg, out):
    n = _require_n(cfg)
    lam = cfg.get("lambda")
    if lam is None:
        raise MeasureError("--lambda is required for update")
    mu, cfg["resolution"] = _prepare_measure(cfg, n)
    check = not cfg["skip_oracle"]
    tol = experiment_config()["update"]["oracle_rtol"]
    if mu.support is SupportKind.UNIT_CIRCLE:
        z0 = _parse_z0(cfg.get("z0"), mu.support)
        vp = szego_recurrence(mu, n)
        result = wong_update(vp, mu, z0, lam, check_oracle=check)
        rows = [(i, vp.alpha[i].real, vp.alpha[i].imag,
                 result.params.alpha[i].real, result.params.alpha[i].imag)
                for i in range(n)]
        cio.write_csv(out / "update.csv",
                      ["n", "alpha_re_before", "alpha_im_before",
                       "alpha_re_after", "alpha_im_after"], rows)
        residual = result.oracle_residual
    else:
        z0 = _parse_z0(cfg.get("z0"), mu.support)
        result = geronimus_update(mu, float(np.real(z0)), lam, n,
                                  check_oracle=check)
        before = geronimus_update(mu, float(np.real(z0)), 0.0, n,
                                  check_oracle=False)
        rows = [(k, np.real(before.coefficients[k]),
                 np.real(result.coefficients[k]))
                for k in range(n + 1)]
        cio.write_csv(out / "update.csv",
                      ["k", "monic_coeff_before", "monic_coeff_after"], rows)
        residual = result.oracle_residual
    ok = residual is None or residual <= tol
    cio.write_json(out / "update.json", {
        "version": cio.FORMAT_VERSION, "experiment": "point_mass_update",
        "params": {"n": n, "lambda": lam, "z0": cio._point_to_json(z0),
                   "oracle": check},
        "maxError": -1.0 if residual is None else residual,
        "tolerance": tol, "pass": bool(ok)})
    return (EXIT_OK if ok else EXIT_TOLERANCE), ok, ["update.csv",
                                                     "update.json"]


def _cmd_verify(cfg, out):
    conf = experiment_config()["verify"]
    n = cfg.get("n") or 50
    mu, cfg["resolution"] = _prepare_measure(cfg, n + 1)
    rng = np.random.default_rng(cfg["seed"])
    checks = {}
    if mu.support is SupportKind.REAL_LINE:
        jp = stieltjes_recurrence(mu, n + 1)
        try:
            interlacing_check(jp, n)
            checks["interlacing"] = {"pass": True, "maxError": 0.0}
        except CdkitError as exc:
            checks["interlacing"] = {"pass": False, "error": str(exc)}
        lo, hi = float(np.min(mu.points.real)), float(np.max(mu.points.real))
        span = hi - lo
        worst = 0.0
        for _ in range(conf["route_agreement_pairs"]):
            x, y = rng.uniform(lo + 0.05 * span, hi - 0.05 * span, size=2)
            if abs(x - y) < 1e-3 * span:
                continue
            direct = kernel_direct(eval_polys(jp, n, x), eval_polys(jp, n, y),
                                   n)
            cd = kernel_cd_real(jp, n, x, y)
            worst = max(worst, abs(cd.value - direct.value)
                        / max(abs(direct.value), 1e-300))
        checks["cd_route_agreement"] = {
            "pass": bool(worst <= conf["route_agreement_rtol"]),
            "maxError": worst}
        worst_rep = _reproducing_residual(jp, mu, n, rng,
                                          conf["reproducing_pairs"])
        checks["reproducing_property"] = {
            "pass": bool(worst_rep <= conf["reproducing_rtol"]),
            "maxError": worst_rep}
    else:
        vp = szego_recurrence(mu, n + 1)
        worst = 0.0
        for _ in range(conf["route_agreement_pairs"]):
            r1, r2 = rng.uniform(0.3, 1.25, size=2)
            t1, t2 = rng.uniform(0.0, 2 * np.pi, size=2)
            z, zeta = r1 * np.exp(1j * t1), r2 * np.exp(1j * t2)
            if abs(1.0 - np.conjugate(z) * zeta) < 1e-3:
                continue
            direct = kernel_direct(eval_circle_polys(vp, n, z),
                                   eval_circle_polys(vp, n, zeta), n)
            for alt in (False, True):
                kv = kernel_cd_circle(vp, n, z, zeta, alt=alt)
                worst = max(worst, abs(kv.value - direct.value)
                            / max(abs(direct.value), 1e-300))
        checks["cd_route_agreement"] = {
            "pass": bool(worst <= conf["route_agreement_rtol"]),
            "maxError": worst}
    ok = all(c["pass"] for c in checks.values())
    cio.write_json(out / "verify.json", {
        "version": cio.FORMAT_VERSION, "experiment": "verify",
        "params": {"n": n, "seed": cfg["seed"]},
        "maxError": max((c.get("maxError", 0.0) for c in checks.values()),
                        default=0.0),
        "tolerance": conf["route_agreement_rtol"],
        "pass": bool(ok), "checks": checks})
    return (EXIT_OK if ok else EXIT_TOLERANCE), ok, ["verify.json"]


def _reproducing_residual(jp, mu, n, rng, pairs):
    basis = orthonormal_values(jp, n, mu.points.real)  # p_j at the atoms
    lo, hi = float(np.min(mu.points.real)), float(np.max(mu.points.real))
    worst = 0.0
    for _ in range(pairs):
        z, wpt = rng.uniform(lo, hi, size=2)
        pz = orthonormal_values(jp, n, np.asarray([z]))[:, 0]
        pw = orthonormal_values(jp, n, np.asarray([wpt]))[:, 0]
        k_z_atoms = pz @ basis          # K_n(z, x_i)
        k_atoms_w = basis.T @ pw        # K_n(x_i, w)
        integral = float(np.sum(mu.weights * k_z_atoms * k_atoms_w))
        direct = float(pz @ pw)
        worst = max(worst, abs(integral - direct) / max(abs(direct), 1e-300))
    return worst


_HANDLERS = {
    "moments": _cmd_moments,
    "recurrence": _cmd_recurrence,
    "kernel": _cmd_kernel,
    "quadrature": _cmd_quadrature,
    "bounds": _cmd_bounds,
    "universality": _cmd_universality,
    "clock": _cmd_clock,
    "update": _cmd_update,
    "verify": _cmd_verify,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        out = Path(cfg.get("output") or ("cdkit-out/" + cfg["command"]))
        out.mkdir(parents=True, exist_ok=True)
        code, ok, artifacts = _HANDLERS[cfg["command"]](cfg, out)
    except (MeasureError, DegreeError, FileNotFoundError, ValueError) as exc:
        print("cdkit: config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (CoarseMeasureError, IllConditionedError, ConfluentPointsError,
            CdkitError) as exc:
        print("cdkit: numeric breakdown: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    manifest = {
        "version": cio.FORMAT_VERSION,
        "command": cfg["command"],
        "config": {k: cfg.get(k) for k in _CONFIG_KEYS},
        "artifacts": sorted(artifacts),
        "pass": bool(ok),
        "exit_code": code,
    }
    cio.write_json(out / "manifest.json", manifest)
    return code


if __name__ == "__main__":
    sys.exit(main())
