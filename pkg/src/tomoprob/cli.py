"""Command-line front end.

    tomoprob [--config PATH] [--out PATH] [--seed N] [--tol-override k=v ...] COMMAND ...

Commands: qudit (encode, decode, check, random), triad (render, stats),
tomogram (spin, optical, symplectic), oscillator (evolve, fc, tomogram),
entropy (shannon, mutual, qubit, fc).

Exit codes: 0 success, 1 usage / I/O / schema error, 2 physics-check failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import cv_tomography as cv
from . import infotheory as info
from . import parosc
from . import qudit_prob as qp
from . import spin_tomography as spin
from . import suprematism as sup
from .statespace import (
    DEFAULT_TOL,
    InvalidDensityMatrix,
    StateError,
    ToleranceConfig,
    diagnose_density,
    matrix_from_json,
    matrix_to_json,
    random_density,
    validate_density,
)

EXIT_OK, EXIT_USAGE, EXIT_PHYSICS = 0, 1, 2


class UsageError(Exception):
    pass


class PhysicsFailure(Exception):
    def __init__(self, message: str, payload: Optional[str] = None):
        super().__init__(message)
        self.payload = payload


# Schemas.

_NUM = {"type": "number"}
_PROB = {"type": "number", "minimum": 0, "maximum": 1}
_GRID = {
    "type": "object",
    "properties": {"start": _NUM, "stop": _NUM, "n": {"type": "integer", "minimum": 2}},
    "required": ["start", "stop", "n"],
    "additionalProperties": False,
}
_ROWS = {"type": "array", "items": {"type": "array", "items": _NUM}}

MATRIX_SCHEMA = {
    "type": "object",
    "properties": {"dim": {"type": "integer", "minimum": 2}, "re": _ROWS, "im": _ROWS},
    "required": ["dim", "re", "im"],
    "additionalProperties": False,
}

TABLE_SCHEMA = {
    "type": "object",
    "properties": {
        "dim": {"type": "integer", "minimum": 2},
        "offdiag": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"j": {"type": "integer"}, "k": {"type": "integer"}, "p1": _PROB, "p2": _PROB},
                "required": ["j", "k", "p1", "p2"],
                "additionalProperties": False,
            },
        },
        "diag": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"j": {"type": "integer"}, "p3": _PROB},
                "required": ["j", "p3"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["dim", "offdiag", "diag"],
    "additionalProperties": False,
}

PROFILE_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["constant", "sudden-jump", "smooth-tabulated"]},
        "times": {"type": "array", "items": _NUM},
        "values": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "interpolation": {"enum": ["linear", "cubic"]},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

CV_STATE_SCHEMA = {
    "type": "object",
    "oneOf": [
        {
            "properties": {"kind": {"const": "hermite"}, "n": {"type": "integer", "minimum": 0}},
            "required": ["kind", "n"],
            "additionalProperties": False,
        },
        {
            "properties": {"kind": {"const": "coherent"}, "q0": _NUM, "p0": _NUM},
            "required": ["kind", "q0", "p0"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "kind": {"const": "wavefunction"},
                "x_min": _NUM,
                "x_max": _NUM,
                "re": {"type": "array", "items": _NUM},
                "im": {"type": "array", "items": _NUM},
            },
            "required": ["kind", "x_min", "x_max", "re", "im"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "kind": {"const": "mixture"},
                "weights": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "states": {"type": "array", "items": {"type": "object"}},
            },
            "required": ["kind", "weights", "states"],
            "additionalProperties": False,
        },
    ],
}

STYLE_SCHEMA = {
    "type": "object",
    "properties": {
        "unit_px": {"type": "number", "exclusiveMinimum": 0},
        "gap_px": {"type": "number", "minimum": 0},
        "background": {"type": "string"},
        "outline_width": {"type": "number", "minimum": 0},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "seed": {"type": "integer"},
        "tolerances": {
            "type": "object",
            "properties": {k: {"type": "number", "exclusiveMinimum": 0} for k in
                           ("tol_herm", "tol_trace", "tol_psd", "tol_norm")},
            "additionalProperties": False,
        },
        "cv": {
            "type": "object",
            "properties": {
                "x_grid": _GRID,
                "q_grid": _GRID,
                "p_grid": _GRID,
                "n_theta": {"type": "integer", "minimum": 1},
                "nu_eps": {"type": "number", "exclusiveMinimum": 0},
                "quad_tol": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "oscillator": {
            "type": "object",
            "properties": {
                "x_grid": _GRID,
                "n_max": {"type": "integer", "minimum": 0},
                "wronskian_tol": {"type": "number", "exclusiveMinimum": 0},
                "fc_trunc_tol": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "style": STYLE_SCHEMA,
    },
    "additionalProperties": False,
}


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "/"


def check_schema(obj, schema, what: str):
    errors = sorted(jsonschema.Draft7Validator(schema).iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        raise UsageError(f"{what}: schema violation at {_pointer(first.absolute_path)}: {first.message}")
    return obj


# Run configuration.

@dataclass(frozen=True)
class OscillatorConfig:
    x_grid: cv.UniformGrid = parosc.STATE_GRID
    n_max: int = parosc.FC_N_MAX
    wronskian_tol: float = parosc.WRONSKIAN_TOL
    fc_trunc_tol: float = parosc.FC_TRUNC_TOL


@dataclass(frozen=True)
class RunConfig:
    tolerances: ToleranceConfig = DEFAULT_TOL
    cv: cv.CVConfig = cv.DEFAULT_CV
    oscillator: OscillatorConfig = OscillatorConfig()
    style: dict = field(default_factory=dict)
    seed: int = 0


_OVERRIDES = {
    "tol_herm": "tolerances", "tol_trace": "tolerances", "tol_psd": "tolerances", "tol_norm": "tolerances",
    "nu_eps": "cv", "quad_tol": "cv", "wronskian_tol": "oscillator", "fc_trunc_tol": "oscillator",
}


def _grid(obj) -> cv.UniformGrid:
    return cv.UniformGrid(float(obj["start"]), float(obj["stop"]), int(obj["n"]))


def build_config(path: Optional[str], seed: Optional[int], overrides) -> RunConfig:
    raw = {}
    if path:
        raw = check_schema(read_json(path), CONFIG_SCHEMA, path)
    cfg = RunConfig()
    tol = cfg.tolerances.replace(**raw.get("tolerances", {}))
    cvd = dict(raw.get("cv", {}))
    for key in ("x_grid", "q_grid", "p_grid"):
        if key in cvd:
            cvd[key] = _grid(cvd[key])
    osd = dict(raw.get("oscillator", {}))
    if "x_grid" in osd:
        osd["x_grid"] = _grid(osd["x_grid"])
    cvc = replace(cfg.cv, **cvd)
    osc = replace(cfg.oscillator, **osd)
    for item in overrides or []:
        key, sep, value = item.partition("=")
        if not sep or key not in _OVERRIDES:
            raise UsageError(f"--tol-override expects k=v with k in {sorted(_OVERRIDES)}, got {item!r}")
        try:
            val = float(value)
        except ValueError:
            raise UsageError(f"--tol-override {key}: {value!r} is not a number") from None
        if not (math.isfinite(val) and val > 0):
            raise UsageError(f"--tol-override {key} must be positive")
        section = _OVERRIDES[key]
        if section == "tolerances":
            tol = tol.replace(**{key: val})
        elif section == "cv":
            cvc = replace(cvc, **{key: val})
        else:
            osc = replace(osc, **{key: val})
    style = sup.resolve_style(raw.get("style"))
    s = seed if seed is not None else raw.get("seed", 0)
    return RunConfig(tol, cvc, osc, style, int(s))


# Canonical output.

def canonical_float(x: float):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.15g}") + 0.0


def _canon(obj):
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return canonical_float(obj)
    return obj


def dumps(obj) -> str:
    """Sorted keys, floats rounded to 15 significant digits and printed in
    shortest round-trip form."""
    return json.dumps(_canon(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(canonical_float(v))


def csv_text(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def emit(text: str, out: Optional[str]):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def sidecar(out: Optional[str]) -> Optional[str]:
    if out is None or out == "-":
        return None
    p = Path(out)
    return str(p.with_suffix(".json")) if p.suffix != ".json" else str(p.with_suffix(".meta.json"))


# Loaders.

def load_matrix(path: str) -> np.ndarray:
    return matrix_from_json(check_schema(read_json(path), MATRIX_SCHEMA, path))


def load_table(path: str) -> qp.QuditProbabilityTable:
    return qp.QuditProbabilityTable.from_json(check_schema(read_json(path), TABLE_SCHEMA, path))


def load_state(path: str, cfg: RunConfig):
    """Density matrix from either a matrix file or a probability table file."""
    obj = read_json(path)
    if isinstance(obj, dict) and "offdiag" in obj:
        table = qp.QuditProbabilityTable.from_json(check_schema(obj, TABLE_SCHEMA, path))
        return qp.table_to_matrix(table)
    return matrix_from_json(check_schema(obj, MATRIX_SCHEMA, path))


def require_density(m, cfg: RunConfig):
    problem = diagnose_density(m, cfg.tolerances)
    if problem is not None:
        raise PhysicsFailure(f"not a density matrix: {problem}")
    return validate_density(m, cfg.tolerances)


def _wave_functions(obj, grid: cv.UniformGrid):
    """[(weight, WaveFunction)] for a CV state description."""
    check_schema(obj, CV_STATE_SCHEMA, "state")
    kind = obj["kind"]
    if kind == "hermite":
        return [(1.0, cv.hermite_state(obj["n"], grid))]
    if kind == "coherent":
        return [(1.0, cv.coherent_state(obj["q0"], obj["p0"], grid))]
    if kind == "wavefunction":
        amps = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
        return [(1.0, cv.WaveFunction(obj["x_min"], obj["x_max"], amps))]
    if len(obj["weights"]) != len(obj["states"]) or not obj["states"]:
        raise UsageError("mixture needs one weight per state")
    out = []
    for w, sub in zip(obj["weights"], obj["states"]):
        if sub.get("kind") == "mixture":
            raise UsageError("nested mixtures are not supported")
        (_, psi), = _wave_functions(sub, grid)
        out.append((float(w), psi))
    return out


def load_profile(path: str) -> parosc.FrequencyProfile:
    return parosc.FrequencyProfile.from_json(check_schema(read_json(path), PROFILE_SCHEMA, path))


# Commands.

def cmd_qudit(args, cfg: RunConfig) -> int:
    if args.action == "encode":
        table = load_table(args.input)
        rho = require_density(qp.table_to_matrix(table), cfg)
        emit(dumps(matrix_to_json(rho.entries)), args.out)
        return EXIT_OK
    if args.action == "decode":
        rho = require_density(load_matrix(args.input), cfg)
        emit(dumps(qp.density_to_table(rho).to_json()), args.out)
        return EXIT_OK
    if args.action == "random":
        rng = np.random.default_rng(cfg.seed)
        rho = random_density(args.dim, rng, args.rank)
        emit(dumps(matrix_to_json(rho.entries)), args.out)
        return EXIT_OK
    # check
    m = load_state(args.input, cfg)
    report = {"dim": int(m.shape[0])}
    problem = diagnose_density(m, cfg.tolerances)
    report["density"] = (
        {"valid": True} if problem is None
        else {"valid": False, "invariant": problem.invariant, "magnitude": problem.magnitude}
    )
    ok = problem is None
    if m.shape[0] == 2 and ok:
        # raw triple: a loose tol_psd can admit entries outside [0, 1]
        p = (m[1, 0].real + 0.5, m[1, 0].imag + 0.5, m[0, 0].real)
        margin = float(qp.ball_margin(p))
        admissible = margin <= 0.25 + cfg.tolerances.tol_psd
        report["qubit_ball"] = {"admissible": admissible, "margin": margin}
        ok &= admissible
    if problem is None:
        reports = info.qudit_entry_inequalities(validate_density(m, cfg.tolerances))
        report["inequalities"] = reports
        report["failed"] = len(info.failed(reports))
        ok &= report["failed"] == 0
    report["pass"] = ok
    text = dumps(report)
    if not ok:
        raise PhysicsFailure(
            f"check failed: {report['density'].get('invariant', 'inequality')} violated", text
        )
    emit(text, args.out)
    return EXIT_OK


def cmd_triad(args, cfg: RunConfig) -> int:
    rho = require_density(load_state(args.input, cfg), cfg)
    mosaic = sup.triads_from_density(rho, args.mode)
    meta = sup.mosaic_metadata(mosaic, cfg.style)
    if args.action == "stats":
        emit(dumps(meta), args.out)
        return EXIT_OK
    emit(sup.render_svg(mosaic, cfg.style), args.out)
    meta_path = args.meta or sidecar(args.out)
    if meta_path:
        emit(dumps(meta), meta_path)
    return EXIT_OK


def _x_values(args):
    start, stop, n = args.x_grid
    return cv.UniformGrid(float(start), float(stop), int(n)).points


def _pairs(a, b, names):
    if len(a) != len(b):
        raise UsageError(f"{names[0]} and {names[1]} need the same number of values")
    return list(zip(a, b))


def cmd_tomogram(args, cfg: RunConfig) -> int:
    if args.action == "spin":
        rho = require_density(load_state(args.input, cfg), cfg)
        if args.random_directions:
            rng = np.random.default_rng(cfg.seed)
            dirs = [spin.Direction.from_vector(v) for v in rng.normal(size=(args.random_directions, 3))]
        else:
            dirs = [spin.Direction(t, f) for t, f in _pairs(args.theta, args.phi, ("--theta", "--phi"))]
        n = rho.dim
        ms = [f"w({m})" for m in _m_labels(n)]
        rows = [["j", "theta", "phi", *ms]]
        for d in dirs:
            tomo = spin.spin_tomogram(rho, d)
            tomo.w.check(cfg.tolerances)
            rows.append(spin.tomogram_csv_row(tomo))
        emit(csv_text(rows), args.out)
        return EXIT_OK

    states = _wave_functions(read_json(args.input), cfg.cv.x_grid)
    X = _x_values(args)
    if args.action == "optical":
        params = [(math.cos(t), math.sin(t)) for t in args.theta]
    else:
        params = _pairs(args.mu, args.nu, ("--mu", "--nu"))
    rows = [["mu", "nu", "X", "value"]]
    meta = []
    for mu, nu in params:
        parts = [(w, cv.symplectic_tomogram_pure(psi, mu, nu, X, cfg.cv.nu_eps)) for w, psi in states]
        tomo = parts[0][1] if len(parts) == 1 else cv.mix_tomograms([w for w, _ in parts], [t for _, t in parts])
        tomo.check(cfg.cv.quad_tol)
        rows.extend([mu, nu, x, v] for x, v in zip(tomo.X.tolist(), tomo.values.tolist()))
        entry = cv.tomogram_metadata(tomo)
        entry.update(mean=tomo.mean, variance=tomo.variance)
        meta.append(entry)
    emit(csv_text(rows), args.out)
    meta_path = args.meta or sidecar(args.out)
    if meta_path:
        emit(dumps({"tomograms": meta, "x_grid": cfg.cv.x_grid.to_json()}), meta_path)
    return EXIT_OK


def _m_labels(n: int):
    from fractions import Fraction

    j = Fraction(n - 1, 2)
    return [str(j - i) for i in range(n)]


def _trajectory(profile, t_end, cfg: RunConfig, dt: float):
    return parosc.integrate_epsilon(profile, t_end, dt, cfg.oscillator.wronskian_tol)


def cmd_oscillator(args, cfg: RunConfig) -> int:
    profile = load_profile(args.profile)
    if args.action == "evolve":
        traj = _trajectory(profile, args.t_end, cfg, args.dt)
        emit(csv_text(traj.rows()), args.out)
        return EXIT_OK
    if args.action == "fc":
        traj = _trajectory(profile, args.t, cfg, args.dt)
        osc = cfg.oscillator
        n_max = args.n_max if args.n_max is not None else osc.n_max
        table = parosc.franck_condon(traj, args.m, args.t, n_max, osc.x_grid, osc.fc_trunc_tol)
        rows = table.rows()
        rows.append([table.m, "information", table.t, info.fc_information(table, osc.fc_trunc_tol)])
        emit(csv_text(rows), args.out)
        return EXIT_OK
    # tomogram
    traj = _trajectory(profile, args.t, cfg, args.dt)
    rows = [["t", "mu", "nu", "mean", "variance"]]
    for mu, nu in _pairs(args.mu, args.nu, ("--mu", "--nu")):
        mean, var = parosc.gaussian_tomogram(traj, args.t, mu, nu)
        rows.append([args.t, mu, nu, mean, var])
    emit(csv_text(rows), args.out)
    return EXIT_OK


def cmd_entropy(args, cfg: RunConfig) -> int:
    if args.action == "shannon":
        p = np.asarray(read_json(args.input), dtype=float)
        emit(dumps({"entropy": info.shannon_entropy(p, cfg.tolerances)}), args.out)
    elif args.action == "mutual":
        p = np.asarray(read_json(args.input), dtype=float)
        spec = info.PartitionSpec(tuple(args.factors)) if args.factors else None
        jd = info.partition(p.ravel(), spec) if spec else info.JointDistribution(p)
        emit(dumps({"mutual_information": info.mutual_information(jd), "shape": list(jd.shape)}), args.out)
    elif args.action == "qubit":
        t = qp.QubitTriple(*args.p)
        admissible, margin = qp.check_qubit_ball(t, cfg.tolerances)
        out = {"coin_entropy": info.qubit_coin_entropy(t), "margin": margin, "admissible": admissible}
        if admissible:
            out["von_neumann"] = info.qubit_von_neumann(t, cfg.tolerances)
        emit(dumps(out), args.out)
        if not admissible:
            return EXIT_PHYSICS
    else:
        profile = load_profile(args.profile)
        traj = _trajectory(profile, args.t, cfg, args.dt)
        osc = cfg.oscillator
        table = parosc.franck_condon(traj, args.m, args.t, osc.n_max, osc.x_grid, osc.fc_trunc_tol)
        value = info.fc_information(table, osc.fc_trunc_tol)
        emit(dumps({"m": args.m, "t": args.t, "information": value, "pass": value >= -info.INEQ_TOL}), args.out)
    return EXIT_OK


# Parser.

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _globals(parser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, help="JSON run configuration (tolerances, grids, style, seed)")
    parser.add_argument("--out", default=default, help="output file (default: stdout)")
    parser.add_argument("--seed", type=int, default=default, help="seed for sampling commands (default 0)")
    parser.add_argument("--tol-override", action="append", default=default, metavar="K=V",
                        help="override one tolerance: " + ", ".join(sorted(_OVERRIDES)))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tomoprob", description="Tomographic-probability toolkit.")
    _globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def leaf(group, name, help_text):
        p = group.add_parser(name, help=help_text)
        _globals(p, suppress=True)
        return p

    q = sub.add_parser("qudit", help="density matrix <-> coin probabilities").add_subparsers(dest="action", required=True)
    p = leaf(q, "encode", "probability table JSON -> density matrix JSON")
    p.add_argument("input")
    p = leaf(q, "decode", "density matrix JSON -> probability table JSON")
    p.add_argument("input")
    p = leaf(q, "check", "admissibility and entry-wise inequality report (matrix or table file)")
    p.add_argument("input")
    p = leaf(q, "random", "random density matrix (Hilbert-Schmidt measure)")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--rank", type=int, default=None)

    t = sub.add_parser("triad", help="Malevich-square mosaics").add_subparsers(dest="action", required=True)
    for name, text in (("render", "SVG mosaic plus metadata sidecar"), ("stats", "sides, areas and area entropy as JSON")):
        p = leaf(t, name, text)
        p.add_argument("input")
        p.add_argument("--mode", choices=["pairwise", "disjoint"], default="pairwise")
        if name == "render":
            p.add_argument("--meta", default=None, help="metadata path (default: --out with .json suffix)")

    tg = sub.add_parser("tomogram", help="spin and continuous-variable tomograms").add_subparsers(dest="action", required=True)
    p = leaf(tg, "spin", "spin tomogram CSV rows j, theta, phi, w(+j)..w(-j)")
    p.add_argument("input")
    p.add_argument("--theta", type=float, nargs="+", default=[0.0])
    p.add_argument("--phi", type=float, nargs="+", default=[0.0])
    p.add_argument("--random-directions", type=int, default=0, metavar="K", help="use K seeded random directions")
    for name, text in (("optical", "optical tomogram at angles --theta"), ("symplectic", "symplectic tomogram at (--mu, --nu) pairs")):
        p = leaf(tg, name, text)
        p.add_argument("input", help="state JSON: hermite, coherent, wavefunction or mixture")
        p.add_argument("--x-grid", type=float, nargs=3, default=[-8.0, 8.0, 321], metavar=("START", "STOP", "N"))
        p.add_argument("--meta", default=None)
        if name == "optical":
            p.add_argument("--theta", type=float, nargs="+", default=[0.0])
        else:
            p.add_argument("--mu", type=float, nargs="+", required=True)
            p.add_argument("--nu", type=float, nargs="+", required=True)

    o = sub.add_parser("oscillator", help="parametric oscillator").add_subparsers(dest="action", required=True)
    p = leaf(o, "evolve", "trajectory CSV t, Re eps, Im eps, Re eps', Im eps', Wronskian residual")
    p.add_argument("profile")
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--dt", type=float, default=0.05)
    p = leaf(o, "fc", "Franck-Condon CSV m, n, t, P with the even/odd information row appended")
    p.add_argument("profile")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--dt", type=float, default=0.05)
    p = leaf(o, "tomogram", "mean and variance of the ground-like state tomogram")
    p.add_argument("profile")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--mu", type=float, nargs="+", required=True)
    p.add_argument("--nu", type=float, nargs="+", required=True)
    p.add_argument("--dt", type=float, default=0.05)

    e = sub.add_parser("entropy", help="entropies and information").add_subparsers(dest="action", required=True)
    p = leaf(e, "shannon", "Shannon entropy of a JSON probability list")
    p.add_argument("input")
    p = leaf(e, "mutual", "mutual information of a JSON 2-D array, or of a flat list with --factors")
    p.add_argument("input")
    p.add_argument("--factors", type=int, nargs=2, default=None)
    p = leaf(e, "qubit", "coin and von Neumann entropies of a probability triple")
    p.add_argument("--p", type=float, nargs=3, required=True, metavar=("P1", "P2", "P3"))
    p = leaf(e, "fc", "Franck-Condon even/odd information")
    p.add_argument("profile")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--dt", type=float, default=0.05)
    return parser


COMMANDS = {
    "qudit": cmd_qudit,
    "triad": cmd_triad,
    "tomogram": cmd_tomogram,
    "oscillator": cmd_oscillator,
    "entropy": cmd_entropy,
}

_PHYSICS_ERRORS = (
    InvalidDensityMatrix,
    cv.GridError,
    parosc.IntegrationError,
    parosc.BranchTrackingError,
)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(args.config, args.seed, args.tol_override)
        return COMMANDS[args.command](args, cfg)
    except PhysicsFailure as exc:
        if exc.payload is not None:
            emit(exc.payload, args.out)
        print(f"tomoprob: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except _PHYSICS_ERRORS as exc:
        print(f"tomoprob: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except (UsageError, StateError) as exc:
        print(f"tomoprob: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
