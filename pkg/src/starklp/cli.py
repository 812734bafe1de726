"""Batch front end.

    starklp <pole|survival|smatrix|scan|profile|selftest> CONFIG.json

Each run writes one data file into ``output.directory`` plus a sidecar
``<name>.meta.json`` holding the config echo, the conventions in force and the
library version. Data files contain no timestamps, so identical configs give
byte-identical files. Exit codes: 0 success, 1 config error, 2 computation error.
"""
import argparse
import csv
import io
import json
import math
import pathlib
import sys

import numpy as np

from . import __version__, evolution, laxphillips, ledger, poles
from .errors import ConfigurationError, StarkError
from .model import GridSpec, ModelParams

SIDECAR_KEYS = ("phi-normalization", "f-branch", "s-matrix-sign", "pole-convention")
REFERENCE_POLE = ledger.REFERENCE_POLE
METHOD_COLUMNS = {
    "Contour": ("re_contour", "im_contour", "abs_contour"),
    "PoleApprox": ("re_pole", "im_pole", "abs_pole"),
    "Oracle": ("re_oracle", "im_oracle", "abs_oracle"),
}
SURVIVAL_HEADER = ("t", "re_contour", "im_contour", "re_pole", "im_pole", "re_oracle", "im_oracle",
                   "abs_contour", "abs_pole", "abs_oracle")

DEFAULTS = {
    "pole": {"seed": None, "window": [[-15.0, -1.0], [15.0, 0.25]]},
    "survival": {"t_max": 10.0, "t_steps": 201, "methods": ["Contour", "PoleApprox", "Oracle"],
                 "contour_height": evolution.CONTOUR_HEIGHT},
    "smatrix": {"x_min": -20.0, "x_max": 20.0, "samples": 2001},
    "scan": {"E_values": [0.5, 0.75, 1.0, 1.5, 2.0]},
    "profile": {"x_min": None, "x_max": None, "samples": 4001, "norm_constant": 1.0},
    "output": {"directory": ".", "format": "csv"},
}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# config

def load_config(path):
    try:
        text = pathlib.Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return cfg


def _block(cfg, name):
    blk = dict(DEFAULTS.get(name, {}))
    given = cfg.get(name, {})
    if not isinstance(given, dict):
        raise ConfigError(f"field '{name}' must be an object")
    unknown = set(given) - set(blk) if blk else set()
    if unknown:
        raise ConfigError(f"field '{name}': unknown keys {sorted(unknown)}")
    blk.update(given)
    return blk


def _number(blk, name, key, positive=False, integer=False):
    v = blk.get(key)
    ok = isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
    if integer:
        ok = ok and float(v).is_integer()
    if not ok or (positive and v <= 0):
        kind = "positive " if positive else ""
        raise ConfigError(f"field '{name}.{key}': expected a finite {kind}{'integer' if integer else 'number'}, "
                          f"got {v!r}")
    return int(v) if integer else float(v)


def model_params(cfg):
    if "model" not in cfg:
        raise ConfigError("missing field 'model'")
    m = cfg["model"]
    if not isinstance(m, dict):
        raise ConfigError("field 'model' must be an object")
    for key in ("field_strength", "coupling"):
        if key not in m:
            raise ConfigError(f"missing field 'model.{key}'")
    E = _number(m, "model", "field_strength", positive=True)
    lam = _number(m, "model", "coupling")
    try:
        return ModelParams(E, lam)
    except ConfigurationError as exc:
        raise ConfigError(f"field 'model': {exc}") from None


def oracle_grid(cfg, params, z0=None):
    if "oracle" not in cfg:
        return evolution.default_grid(params, z0)
    blk = cfg["oracle"]
    if not isinstance(blk, dict):
        raise ConfigError("field 'oracle' must be an object")
    L = _number(blk, "oracle", "half_width", positive=True)
    n = _number(blk, "oracle", "points", positive=True, integer=True)
    try:
        return GridSpec(L, n)
    except StarkError as exc:
        raise ConfigError(f"field 'oracle': {exc}") from None


def _complex_field(v, where):
    if v is None:
        return None
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)):
        return complex(v[0], v[1])
    raise ConfigError(f"field '{where}': expected [re, im], got {v!r}")


# ---------------------------------------------------------------------------
# output

def fmt(x):
    return f"{float(x):.17g}"


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    path.write_text(buf.getvalue())


def write_json(path, payload):
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


def write_sidecar(path, cfg, command, extra=None):
    entries = {e.key: e for e in ledger.ledger()}
    meta = {
        "command": command,
        "config": cfg,
        "conventions": {k: {"adopted": entries[k].adopted, "evidence": entries[k].evidence}
                        for k in SIDECAR_KEYS if k in entries},
        "version": __version__,
        "backend": evolution.kernels.BACKEND,
    }
    if extra:
        meta["diagnostics"] = extra
    write_json(path.with_name(path.stem + ".meta.json"), meta)


def _outdir(cfg):
    out = _block(cfg, "output")
    if out["format"] not in ("csv", "json"):
        raise ConfigError(f"field 'output.format': expected 'csv' or 'json', got {out['format']!r}")
    d = pathlib.Path(out["directory"])
    d.mkdir(parents=True, exist_ok=True)
    return d, out["format"]


def _emit(cfg, command, name, header, rows, extra=None):
    rows = [list(r) for r in rows]
    d, kind = _outdir(cfg)
    if kind == "csv":
        path = d / f"{name}.csv"
        write_csv(path, header, rows)
    else:
        path = d / f"{name}.json"
        write_json(path, {h: [float(r[i]) for r in rows] for i, h in enumerate(header)})
    write_sidecar(path, cfg, command, extra)
    return path


def _cpair(z):
    return None if z is None else [float(z.real), float(z.imag)]


# ---------------------------------------------------------------------------
# commands

def cmd_pole(cfg):
    params = model_params(cfg)
    blk = _block(cfg, "pole")
    seed = _complex_field(blk["seed"], "pole.seed")
    win = blk["window"]
    try:
        a, b = _complex_field(win[0], "pole.window"), _complex_field(win[1], "pole.window")
    except (TypeError, IndexError):
        raise ConfigError(f"field 'pole.window': expected [[re, im], [re, im]], got {win!r}") from None
    if seed is None:
        roots, total = poles.enumerate_roots(params, a, b)
        try:
            spec = evolution.oracle_spectrum(params, oracle_grid(cfg, params))
            peak = evolution.spectral_peak(spec)[0]
        except StarkError:
            peak = None
        pole = poles.select_resonance(roots, peak) if roots else poles.find_pole(params)
    else:
        pole = poles.find_pole(params, seed)
        roots, total, peak = [pole], None, None
    report = laxphillips.smatrix_pole_check(pole, params)
    record = {
        "model": {"field_strength": params.field_strength, "coupling": params.coupling,
                  "kappa": params.kappa},
        "pole": pole.as_dict(),
        "certificate": {"enclosing_count": poles.certify(pole, params), "window_count": total,
                        "window": [_cpair(a), _cpair(b)]},
        "roots": [r.as_dict() for r in roots],
        "spectral_peak": peak,
        "residue": {"formula": _cpair(report.get("residue_formula")),
                    "contour": _cpair(report.get("residue_contour")),
                    "relative_discrepancy": report.get("residue_relative_discrepancy")},
        "smatrix_zero": _cpair(report.get("smatrix_zero")),
        "reference_comparison": {
            "reference_z0": _cpair(REFERENCE_POLE),
            "delta_re": float(pole.z0.real - REFERENCE_POLE.real),
            "within_1e-3": bool(abs(pole.z0.real - REFERENCE_POLE.real) <= 1e-3),
            "nearest_root": _cpair(min(roots, key=lambda r: abs(r.z0 - REFERENCE_POLE)).z0),
        },
    }
    d, _ = _outdir(cfg)
    path = d / "pole.json"
    write_json(path, record)
    write_sidecar(path, cfg, "pole")
    return path


def cmd_survival(cfg):
    params = model_params(cfg)
    blk = _block(cfg, "survival")
    t_max = _number(blk, "survival", "t_max")
    steps = _number(blk, "survival", "t_steps", positive=True, integer=True)
    methods = blk["methods"]
    if not isinstance(methods, list) or not methods or any(m not in METHOD_COLUMNS for m in methods):
        raise ConfigError(f"field 'survival.methods': expected a subset of {list(METHOD_COLUMNS)}, got {methods!r}")
    if t_max < 0:
        raise ConfigError("field 'survival.t_max': must be >= 0")
    t = np.linspace(0.0, t_max, steps) if steps > 1 else np.array([0.0])
    cols = {"t": t}
    extra = {}
    if "Contour" in methods:
        s = evolution.survival_contour(params, t, _number(blk, "survival", "contour_height", positive=True))
        cols["Contour"] = s.values
        extra["contour"] = s.diagnostics
    if "PoleApprox" in methods:
        pole = poles.find_pole(params)
        s = evolution.survival_pole(pole, params, t)
        cols["PoleApprox"] = s.values
        extra["pole"] = {"z0": _cpair(pole.z0), **s.diagnostics}
    if "Oracle" in methods:
        grid = oracle_grid(cfg, params)
        cols["Oracle"] = evolution.survival_oracle(evolution.oracle_spectrum(params, grid), t).values
        extra["oracle"] = {"half_width": grid.half_width, "points": grid.points}
    header = [h for h in SURVIVAL_HEADER
              if h == "t" or any(h in METHOD_COLUMNS[m] for m in methods)]
    rows = []
    for i, ti in enumerate(t):
        row = []
        for h in header:
            if h == "t":
                row.append(ti)
                continue
            m = next(k for k, v in METHOD_COLUMNS.items() if h in v)
            v = cols[m][i]
            row.append(v.real if h.startswith("re_") else v.imag if h.startswith("im_") else abs(v))
        rows.append(row)
    return _emit(cfg, "survival", "survival", header, rows, extra)


def cmd_smatrix(cfg):
    params = model_params(cfg)
    blk = _block(cfg, "smatrix")
    x = np.linspace(_number(blk, "smatrix", "x_min"), _number(blk, "smatrix", "x_max"),
                    _number(blk, "smatrix", "samples", positive=True, integer=True))
    s = laxphillips.smatrix(x, params)
    rows = zip(s.x, s.value.real, s.value.imag, np.abs(s.value), s.phase)
    return _emit(cfg, "smatrix", "smatrix", ("x", "re_S", "im_S", "abs_S", "phase_unwrapped"), rows,
                 {"max_modulus_defect": float(np.max(s.modulus_defect))})


def cmd_scan(cfg):
    blk = _block(cfg, "scan")
    E_values = blk["E_values"]
    if not isinstance(E_values, list) or not E_values:
        raise ConfigError("field 'scan.E_values': expected a non-empty list")
    for i in range(len(E_values)):
        _number({"v": E_values[i]}, "scan.E_values", "v", positive=True)
    if any(b <= a for a, b in zip(E_values, E_values[1:])):
        raise ConfigError("field 'scan.E_values': must be strictly increasing")
    params = model_params(cfg)
    first = poles.find_pole(ModelParams(E_values[0], params.coupling))
    results = poles.field_scan(params.coupling, E_values, seed=first.z0)
    rows = []
    for E, r in zip(E_values, results):
        res = r.residue if r.residue is not None else complex("nan")
        rows.append((E, r.z0.real, r.z0.imag, res.real, res.imag))
    return _emit(cfg, "scan", "scan", ("E", "re_z0", "im_z0", "re_residue", "im_residue"), rows,
                 poles.scan_monotonicity(results))


def cmd_profile(cfg):
    params = model_params(cfg)
    blk = _block(cfg, "profile")
    pole = poles.find_pole(params)
    prof = laxphillips.resonance_profile(pole, _number(blk, "profile", "norm_constant", positive=True))
    span = prof.half_width * math.sinh(12.0)
    lo = prof.center - span if blk["x_min"] is None else _number(blk, "profile", "x_min")
    hi = prof.center + span if blk["x_max"] is None else _number(blk, "profile", "x_max")
    if not lo < hi:
        raise ConfigError("field 'profile': x_min must be below x_max")
    x = prof.sample_grid(lo, hi, _number(blk, "profile", "samples", positive=True, integer=True))
    if np.any(np.diff(x) <= 0):
        raise StarkError("profile width is below the floating-point resolution of its center")
    inten = prof.intensity(x)
    return _emit(cfg, "profile", "profile", ("x", "intensity"), zip(x, inten),
                 {"center": prof.center, "half_width": prof.half_width, "fwhm": prof.fwhm,
                  "mass_closed_form": prof.mass, "mass_trapezoid": float(np.trapezoid(inten, x))})


def cmd_selftest(cfg):
    tests_dir = cfg.get("selftest", {}).get("tests_dir")
    entries, problems = ledger.regenerate(tests_dir=tests_dir)
    d, _ = _outdir(cfg)
    path = d / "selftest.json"
    write_json(path, {"entries": [e.key for e in entries], "problems": problems,
                      "mandatory": list(ledger.MANDATORY)})
    write_sidecar(path, cfg, "selftest")
    if problems:
        raise StarkError("; ".join(problems))
    return path


COMMANDS = {"pole": cmd_pole, "survival": cmd_survival, "smatrix": cmd_smatrix,
            "scan": cmd_scan, "profile": cmd_profile, "selftest": cmd_selftest}


def main(argv=None):
    ap = argparse.ArgumentParser(prog="starklp", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("config", nargs="?", help="JSON run configuration")
    args = ap.parse_args(argv)
    try:
        if args.config is None:
            if args.command != "selftest":
                raise ConfigError("a config file is required")
            cfg = {}
        else:
            cfg = load_config(args.config)
        path = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except StarkError as exc:
        print(f"{args.command} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
