"""Command-line front end.

Subcommands: build, potential, sector, spectrum, verify, oracle-compare.
Configs are JSON documents (schema 1, strictly validated, unknown keys
rejected); reports are JSON with sorted keys and shortest round-trip float
formatting, so identical (config, seed) pairs produce byte-identical
output. Tables are emitted as JSON or CSV. Exit codes: 0 success,
2 config error, 3 build error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import builder, oracle, typea, verify
from .errors import (BadParams, CaseSingularity, LatticePole,
                     NotHermitianInput, PdmSusyError, SchemaError,
                     SingularJet, SingularTurningPoint)
from .exprparse import parse_expression
from .scalarfn import MassProfile, builtin_mass_profile

SCHEMA_VERSION = 1

_TOP_KEYS = {"schema", "seed", "system", "mass", "window", "tolerances"}
_TYPEA_KEYS = {"type", "case", "N", "b", "R", "nu", "g2", "g3"}
_GENERIC_KEYS = {"type", "N", "A", "B", "C", "basis", "z_anchor", "branch"}
_MASS_KEYS = {"profile", "params", "expr"}
_WINDOW_KEYS = {"qmin", "qmax", "samples", "anchor"}
_PROFILES = {"constant", "exp_scale", "cauchy_sq", "sech_like", "custom"}
_TOL_KEYS = set(verify.DEFAULT_TOL)


def _reject_unknown(d: dict, allowed: set, where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise SchemaError(f"unknown keys in {where}: {sorted(unknown)}")


def _number(x, where: str) -> complex:
    if isinstance(x, bool):
        raise SchemaError(f"{where} must be a number")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and \
            all(isinstance(v, (int, float)) and not isinstance(v, bool)
                for v in x):
        return complex(x[0], x[1])
    raise SchemaError(f"{where} must be a number or [re, im] pair")


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError("config must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "config")
    if raw.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"config schema must be {SCHEMA_VERSION}")
    if "system" not in raw or "mass" not in raw:
        raise SchemaError("config needs 'system' and 'mass' blocks")
    if not isinstance(raw.get("seed", 0), int):
        raise SchemaError("seed must be an integer")
    return raw


def _mass_from_config(block: dict) -> MassProfile:
    if not isinstance(block, dict):
        raise SchemaError("mass block must be an object")
    _reject_unknown(block, _MASS_KEYS, "mass")
    profile = block.get("profile")
    if profile not in _PROFILES:
        raise SchemaError(f"mass profile must be one of {sorted(_PROFILES)}")
    params = block.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("mass params must be an object")
    kwargs = {k: _number(v, f"mass.params.{k}") for k, v in params.items()}
    if profile == "custom":
        if "expr" not in block:
            raise SchemaError("custom mass needs an 'expr' string")
        m = parse_expression(block["expr"], "q")
        anchor = kwargs.pop("anchor", 0.0)
        return builtin_mass_profile("custom", m=m, anchor=anchor, **kwargs)
    if "expr" in block:
        raise SchemaError("'expr' is only valid for the custom profile")
    return builtin_mass_profile(profile, **kwargs)


def _window_from_config(raw: dict):
    block = raw.get("window")
    if block is None:
        return None, None
    if not isinstance(block, dict):
        raise SchemaError("window block must be an object")
    _reject_unknown(block, _WINDOW_KEYS, "window")
    samples = block.get("samples", 33)
    if not isinstance(samples, int) or samples < 3:
        raise SchemaError("window samples must be an integer >= 3")
    if ("qmin" in block) != ("qmax" in block):
        raise SchemaError("window needs both qmin and qmax (or neither)")
    if "qmin" not in block:
        return None, samples
    qmin = _number(block["qmin"], "window.qmin")
    qmax = _number(block["qmax"], "window.qmax")
    if not qmax.real > qmin.real:
        raise SchemaError("window needs qmax > qmin")
    return (qmin, qmax), samples


def build_from_config(raw: dict):
    """System + (window samples) from a validated config dict."""
    system_block = raw["system"]
    if not isinstance(system_block, dict):
        raise SchemaError("system block must be an object")
    kind = system_block.get("type")
    mass = _mass_from_config(raw["mass"])
    window, samples = _window_from_config(raw)
    tol = raw.get("tolerances", {})
    if not isinstance(tol, dict):
        raise SchemaError("tolerances block must be an object")
    _reject_unknown(tol, _TOL_KEYS, "tolerances")
    tolerances = {k: float(_number(v, f"tolerances.{k}").real)
                  for k, v in tol.items()}

    if kind == "typeA":
        _reject_unknown(system_block, _TYPEA_KEYS, "system")
        case = system_block.get("case")
        if case not in typea.CASES:
            raise SchemaError(f"case must be one of {typea.CASES}")
        n = system_block.get("N")
        if not isinstance(n, int) or n < 1:
            raise SchemaError("N must be a positive integer")
        b = system_block.get("b", [0, 0, 0])
        if not isinstance(b, list) or len(b) != 3:
            raise SchemaError("b must be a list [b2, b1, b0]")
        kwargs = {}
        for key in ("nu", "g2", "g3"):
            if key in system_block:
                kwargs[key] = _number(system_block[key], f"system.{key}")
        config = typea.TypeAConfig(
            N=n, b=tuple(_number(x, "system.b") for x in b),
            R=_number(system_block.get("R", 0.0), "system.R"),
            case=case, **kwargs)
        system = typea.build_type_a(config, mass, window=window)
        return system, samples or 33, tolerances

    if kind == "generic":
        _reject_unknown(system_block, _GENERIC_KEYS, "system")
        n = system_block.get("N")
        basis_txt = system_block.get("basis")
        if not isinstance(basis_txt, list) or not basis_txt:
            raise SchemaError("generic system needs a basis list")
        if not isinstance(n, int) or n != len(basis_txt):
            raise SchemaError("generic system needs N = len(basis)")
        for key in ("A", "B", "C"):
            if key not in system_block:
                raise SchemaError(f"generic system needs expression {key!r}")
        if window is None:
            raise SchemaError("generic system needs an explicit window")
        data = builder.GaugedData(
            A=parse_expression(system_block["A"], "z"),
            B=parse_expression(system_block["B"], "z"),
            C=parse_expression(system_block["C"], "z"),
            basis=[parse_expression(t, "z") for t in basis_txt],
            N=n)
        q0 = 0.5 * (window[0] + window[1])
        z0 = _number(system_block.get("z_anchor", 0.0), "system.z_anchor")
        branch = system_block.get("branch", 1)
        if branch not in (1, -1):
            raise SchemaError("branch must be 1 or -1")
        anchors = builder.Anchors(q_anchor=q0, z_anchor=z0, branch=branch)
        system = builder.build(data, mass, anchors, window)
        return system, samples or 33, tolerances

    raise SchemaError("system type must be 'typeA' or 'generic'")


# -- serialization -------------------------------------------------------------

def jsonable(obj):
    """Recursive conversion to JSON-safe types (complex -> [re, im])."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, str, int)) or obj is None:
        return obj
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.complexfloating, complex)):
        c = complex(obj)
        return [c.real, c.imag]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit(payload, out: str | None) -> None:
    text = json.dumps(jsonable(payload), sort_keys=True, indent=1)
    _write(text + "\n", out)


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------

def cmd_build(args) -> int:
    raw = load_config(args.config)
    system, _, _ = build_from_config(raw)
    qs = system.grid(3)
    summary = {
        "N": system.N,
        "window": [complex(system.window[0]), complex(system.window[1])],
        "anchors": {
            "q_anchor": complex(system.anchors.q_anchor),
            "z_anchor": complex(system.anchors.z_anchor),
            "branch": system.anchors.branch,
        },
        "mass_profile": system.mass.name,
        "w_top_samples": [{"q": q, "value": system.w_top.eval_jet(q, 0).value}
                          for q in qs],
    }
    if hasattr(system, "config") and system.config is not None:
        summary["case"] = system.config.case
        summary["is_solvable"] = system.is_solvable
        summary["b"] = list(system.config.b)
        summary["R"] = system.config.R
    emit(summary, args.out)
    return 0


def _table(system, samples: int, columns) -> list:
    qs = system.grid(samples, margin=0.0)
    rows = []
    for q in qs:
        row = {"q": complex(q)}
        for name, fn in columns:
            row[name] = fn(q)
        rows.append(row)
    return rows


def _emit_table(rows, header: list, args) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            flat = []
            for name in header:
                if name.endswith("_re"):
                    flat.append(repr(complex(row[name[:-3]]).real))
                elif name.endswith("_im"):
                    flat.append(repr(complex(row[name[:-3]]).imag))
                else:
                    flat.append(repr(complex(row[name]).real))
            writer.writerow(flat)
        _write(buf.getvalue(), args.out)
    else:
        emit(rows, args.out)


def cmd_potential(args) -> int:
    raw = load_config(args.config)
    system, samples, _ = build_from_config(raw)
    rows = _table(system, samples, [
        ("U_minus", lambda q: system.U_minus.eval_jet(q, 0).value),
        ("U_plus", lambda q: system.U_plus.eval_jet(q, 0).value),
    ])
    header = ["q", "U_minus_re", "U_minus_im", "U_plus_re", "U_plus_im"]
    _emit_table(rows, header, args)
    return 0


def cmd_sector(args) -> int:
    raw = load_config(args.config)
    system, samples, _ = build_from_config(raw)
    columns = []
    names = []
    for i, fn in enumerate(system.sector_minus):
        columns.append((f"phi_minus_{i}",
                        (lambda f: lambda q: f.eval_jet(q, 0).value)(fn)))
        names += [f"phi_minus_{i}_re", f"phi_minus_{i}_im"]
    for i, fn in enumerate(system.sector_plus):
        columns.append((f"phi_plus_{i}",
                        (lambda f: lambda q: f.eval_jet(q, 0).value)(fn)))
        names += [f"phi_plus_{i}_re", f"phi_plus_{i}_im"]
    rows = _table(system, samples, columns)
    _emit_table(rows, ["q"] + names, args)
    return 0


def cmd_spectrum(args) -> int:
    raw = load_config(args.config)
    system, _, _ = build_from_config(raw)
    grid = verify.make_grid(system)
    report = {
        "minus": verify.extract_matrix(system, "minus", grid).to_dict(),
        "plus": verify.extract_matrix(system, "plus", grid).to_dict(),
    }
    emit(report, args.out)
    return 0


def _comparison_system(raw: dict, system, name: str):
    if name not in _PROFILES or name == "custom":
        raise SchemaError(f"--compare-mass must name a builtin profile")
    other = builtin_mass_profile(name)
    if hasattr(system, "config") and system.config is not None:
        qa, qb = system.window
        ua = system.u_of_q.eval_jet(qa, 0).value
        ub = system.u_of_q.eval_jet(qb, 0).value
        if ua.real > ub.real:
            ua, ub = ub, ua
        return typea.build_type_a(system.config, other,
                                  u_window=(ua.real, ub.real))
    return builder.build(system.data, other, system.anchors, system.window)


def cmd_verify(args) -> int:
    raw = load_config(args.config)
    system, _, tolerances = build_from_config(raw)
    seed = args.seed if args.seed is not None else raw.get("seed", 0)
    compare = None
    if args.compare_mass:
        compare = _comparison_system(raw, system, args.compare_mass)
    report = verify.run_all(system, seed=seed, tolerances=tolerances,
                            compare_system=compare)
    emit(report, args.out)
    return 0 if report["passed"] else 4


def cmd_oracle_compare(args) -> int:
    raw = load_config(args.config)
    system, _, _ = build_from_config(raw)
    grid = verify.make_grid(system)
    rep = verify.extract_matrix(system, "minus", grid)
    result = oracle.oracle_compare(system, rep.eigenvalues,
                                   grid_size=args.grid_size)
    result["algebraic"] = [complex(e) for e in rep.eigenvalues]
    emit(result, args.out)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pdmsusy",
        description="Build and certify supersymmetric partner pairs with "
                    "position-dependent mass.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=None, help="write output to a file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")

    p = sub.add_parser("build", help="build a system and print a summary")
    common(p)
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("potential", help="table of effective potentials")
    common(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(fn=cmd_potential)

    p = sub.add_parser("sector", help="table of sector function values")
    common(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(fn=cmd_sector)

    p = sub.add_parser("spectrum", help="sector matrices and eigenvalues")
    common(p)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("verify", help="run all certificates")
    common(p)
    p.add_argument("--compare-mass", default=None,
                   help="builtin profile for the mass-independence check")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("oracle-compare",
                       help="match algebraic eigenvalues against the "
                            "finite-difference spectrum")
    common(p)
    p.add_argument("--grid-size", type=int, default=2000)
    p.set_defaults(fn=cmd_oracle_compare)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as exc:
        emit({"error": {"type": "SchemaError", "message": str(exc)}},
             args.out)
        return 2
    except (BadParams, CaseSingularity, LatticePole, SingularJet,
            SingularTurningPoint, NotHermitianInput, PdmSusyError) as exc:
        emit({"error": {"type": type(exc).__name__, "message": str(exc)}},
             args.out)
        return 3


if __name__ == "__main__":
    sys.exit(main())
