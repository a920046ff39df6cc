"""Batch front-end: ``translab <command> --config cfg.json [--out DIR]``.

Exit status is 0 on success, 2 when the config cannot be parsed or
validated, and 1 when an engine fails. Failures print a one-line JSON error
to stdout; engine failures also leave ``error.json`` in the output directory.
"""

import argparse
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import completeness, lambda_sets, reduction
from .core import Grid, Interval, PolyGaussian, TabulatedGenerator

SCHEMA_VERSION = "1"
COMMANDS = ("classify", "approx", "reduce", "polys")

_num = {"type": "number"}
_complex = {"oneOf": [_num, {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}]}
_int = {"type": "integer"}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


CONFIG_SCHEMA = _obj({
    "schema_version": {"const": SCHEMA_VERSION},
    "command": {"enum": list(COMMANDS)},
    "generator": {"oneOf": [
        _obj({"kind": {"const": "polygauss"}, "alpha": {"type": "array", "items": _complex, "minItems": 1},
              "c": _num}, ["alpha", "c"]),
        _obj({"kind": {"const": "tabulated"}, "xs": {"type": "array", "items": _num},
              "values": {"type": "array", "items": _complex}}, ["kind", "xs", "values"]),
    ]},
    "interval": _obj({"lo": _num, "hi": _num, "points": _int}, ["lo", "hi"]),
    "lambda": {"oneOf": [
        _obj({"family": {"const": "explicit"}, "values": {"type": "array", "items": _num}},
             ["family", "values"]),
        _obj({"family": {"const": "arithmetic"}, "a": _num, "b": _num, "k_min": _int, "k_max": _int},
             ["family", "a", "k_min", "k_max"]),
        _obj({"family": {"const": "lacunary"}, "ratio": _num, "count": _int, "scale": _num},
             ["family", "ratio", "count"]),
        _obj({"family": {"const": "power"}, "exponent": _num, "count": _int, "scale": _num},
             ["family", "exponent", "count"]),
    ]},
    "params": {"type": "object"},
}, ["schema_version", "command"])

PARAM_SCHEMAS = {
    "classify": _obj({}),
    "approx": _obj({
        "sizes": {"type": "array", "items": _int, "minItems": 1},
        "targets": {"type": "array", "items": {"enum": ["sin3t", "t2", "bump", "member"]}},
        "cutoff": _num, "p": _num,
        "probes": {"type": "array", "items": _num},
    }, ["sizes"]),
    "reduce": _obj({"a": _num, "b": _num, "d": {"type": "array", "items": _complex, "minItems": 2},
                    "m0": _int, "ell_max": _int, "tol": _num}, ["a", "d", "ell_max"]),
    "polys": _obj({"n": _int, "ell": _int}, ["n", "ell"]),
}

NEEDS = {
    "classify": ("lambda",),
    "approx": ("generator", "interval", "lambda"),
    "reduce": ("generator", "interval"),
    "polys": (),
}


class ConfigError(ValueError):
    pass


def _to_complex(v):
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def validate_config(cfg, command=None):
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
        cmd = cfg["command"]
        jsonschema.validate(cfg.get("params", {}), PARAM_SCHEMAS[cmd])
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ConfigError(f"{path or '<root>'}: {exc.message}") from None
    if command is not None and command != cmd:
        raise ConfigError(f"config is for {cmd!r}, invoked as {command!r}")
    missing = [k for k in NEEDS[cmd] if k not in cfg]
    if missing:
        raise ConfigError(f"{cmd} requires {', '.join(missing)}")
    # build every object once so downstream invariants fail here, not mid-run
    try:
        return _materialize(cfg)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _materialize(cfg):
    out = {"command": cfg["command"], "params": cfg.get("params", {})}
    if "generator" in cfg:
        g = cfg["generator"]
        if g.get("kind", "polygauss") == "polygauss":
            out["generator"] = PolyGaussian(tuple(_to_complex(a) for a in g["alpha"]), g["c"])
        else:
            out["generator"] = TabulatedGenerator(np.array(g["xs"], dtype=float),
                                                  np.array([_to_complex(v) for v in g["values"]]))
    if "interval" in cfg:
        iv = cfg["interval"]
        out["grid"] = Grid.uniform(Interval(iv["lo"], iv["hi"]), iv.get("points", completeness.DEFAULT_POINTS))
    if "lambda" in cfg:
        spec = dict(cfg["lambda"])
        fam = spec.pop("family")
        ts = lambda_sets.TranslationSet
        if fam == "explicit":
            out["lambda"] = ts.explicit(spec["values"])
        elif fam == "arithmetic":
            out["lambda"] = ts.arithmetic(spec["a"], spec.get("b", 0.0), spec["k_min"], spec["k_max"])
        elif fam == "lacunary":
            out["lambda"] = ts.lacunary(spec["ratio"], spec["count"], spec.get("scale", 1.0))
        else:
            out["lambda"] = ts.power(spec["exponent"], spec["count"], spec.get("scale", 1.0))
    p = out["params"]
    if cfg["command"] == "reduce":
        out["problem"] = reduction.ReductionProblem(
            out["generator"], p["a"], p.get("b", 0.0), tuple(_to_complex(v) for v in p["d"]), p.get("m0", 0))
        if p["ell_max"] < 1:
            raise ValueError("ell_max must be >= 1")
    if cfg["command"] == "polys" and (p["n"] < 1 or p["ell"] < 1):
        raise ValueError("polys needs n >= 1 and ell >= 1")
    if cfg["command"] == "approx":
        cutoff = p.get("cutoff", completeness.DEFAULT_CUTOFF)
        if not 0 < cutoff < 1:
            raise ValueError("cutoff must lie in (0, 1)")
        if p.get("p", 2.0) < 1:
            raise ValueError("p must be >= 1")
    return out


def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(out_dir, name, text):
    path = out_dir / name
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def run_classify(job, out_dir):
    report = lambda_sets.classify(job["lambda"])
    d = {"schema_version": SCHEMA_VERSION, **report.to_dict()}
    return [_write(out_dir, "classify.json", _dump_json(d))]


def run_approx(job, out_dir):
    p = job["params"]
    g, grid, lam = job["generator"], job["grid"], job["lambda"]
    targets = completeness.default_targets(g, grid, lam.with_count(1).values[0])
    if "targets" in p:
        targets = {k: targets[k] for k in p["targets"]}
    rows = completeness.completeness_sweep(
        g, grid, lam, p["sizes"], targets, p.get("cutoff", completeness.DEFAULT_CUTOFF), p.get("p", 2.0))
    written = [_write(out_dir, "sweep.csv", completeness.sweep_to_csv(rows))]
    summary = {
        "schema_version": SCHEMA_VERSION,
        "family": lam.family,
        "verdict": lambda_sets.tail_verdict(lam),
        "note": "residuals are numerical evidence about the span, not a proof of (in)completeness",
        "rows": len(rows),
        "skipped": sum(r.status != "ok" for r in rows),
    }
    if "probes" in p:
        d = completeness.build_dictionary(g, grid, lam.with_count(max(p["sizes"])))
        res = completeness.annihilator_margin(d, p["probes"])
        written.append(_write(out_dir, "annihilator.json",
                              _dump_json({"schema_version": SCHEMA_VERSION, **res.to_dict()})))
    written.append(_write(out_dir, "approx.json", _dump_json(summary)))
    return written


def run_reduce(job, out_dir):
    p = job["params"]
    table = reduction.convergence_run(job["problem"], job["grid"], p["ell_max"],
                                      p.get("tol", reduction.DEFAULT_TOL))
    return [_write(out_dir, "convergence.csv", table.to_csv())]


def run_polys(job, out_dir):
    n, ell = job["params"]["n"], job["params"]["ell"]
    polys = reduction.reduction_polys(n, ell)
    lines = [f"p[{ell},{j}] = {poly.to_text()}" for j, poly in enumerate(polys, start=1)]
    meta = {
        "schema_version": SCHEMA_VERSION, "n": n, "ell": ell,
        "polys": [{"j": j, "degree": poly.degree, "max_abs_coeff": poly.max_abs_coeff,
                   "terms": len(poly), "text": poly.to_text()}
                  for j, poly in enumerate(polys, start=1)],
        "coeff_bound": 2 ** (ell - 1),
    }
    return [_write(out_dir, "polys.txt", "\n".join(lines) + "\n"),
            _write(out_dir, "polys.json", _dump_json(meta))]


RUNNERS = {"classify": run_classify, "approx": run_approx, "reduce": run_reduce, "polys": run_polys}


def run(config, out_dir, command=None):
    """Validate ``config`` (a parsed dict), run it, return ``(exit_code, paths)``."""
    out_dir = Path(out_dir)
    try:
        job = validate_config(config, command)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}))
        return 2, []
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        return 0, RUNNERS[job["command"]](job, out_dir)
    except Exception as exc:  # engine failure is reported, not raised
        err = {"error": "engine", "type": type(exc).__name__, "message": str(exc)}
        _write(out_dir, "error.json", _dump_json(err))
        print(json.dumps(err))
        return 1, []


def main(argv=None):
    parser = argparse.ArgumentParser(prog="translab", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--out", default=Path("."), type=Path)
    args = parser.parse_args(argv)
    try:
        cfg = json.loads(args.config.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": "config", "message": str(exc)}))
        return 2
    code, paths = run(cfg, args.out, args.command)
    for pth in paths:
        print(pth)
    return code


if __name__ == "__main__":
    sys.exit(main())
