"""Scenario configuration: JSON schema, validation, and object builders."""

import copy
import math

import jsonschema
import numpy as np

from ..germs import BosonicUM, HeisenbergGauss, Plane, Ray, SemiclassicalSchedule, Sphere, SpinSU2
from ..meanfield import CollectiveAlgebra
from ..numerics import ValidationError
from ..polynomial import PolynomialSpec
from ..projective import PureState

STUDIES = ("germ_delta", "germ_equiv", "residuals", "funnel", "meanfield", "ground_state")
FORMATS = ("csv", "json", "png")
DEFAULT_KAPPA = 0.5

_complex = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_vector = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_point = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"theta": {"type": "number"}, "phi": {"type": "number"}},
            "required": ["theta"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"p": _vector, "q": _vector},
            "required": ["p", "q"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"psi": {"type": "array", "items": _complex, "minItems": 1}},
            "required": ["psi"],
            "additionalProperties": False,
        },
    ]
}
_polynomial = {
    "type": "object",
    "properties": {
        "terms": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [
                    {"type": "number"},
                    {"type": "array", "items": {"type": "integer", "minimum": 0}},
                ],
                "minItems": 2,
                "maxItems": 2,
            },
        }
    },
    "required": ["terms"],
    "additionalProperties": False,
}
_matrix = {"type": "array", "items": {"type": "array", "items": _complex, "minItems": 1}, "minItems": 1}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "germflow scenario",
    "type": "object",
    "properties": {
        "study": {"enum": list(STUDIES)},
        "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "seed": {"type": "integer", "minimum": 0},
        "family": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["spin_su2", "bosonic_um", "heisenberg"]},
                "M": {"type": "integer"},
                "n": {"type": "integer", "minimum": 1},
                "generators": {
                    "oneOf": [
                        {"enum": ["spin-half", "gell-mann"]},
                        {"type": "array", "items": _matrix, "minItems": 1},
                    ]
                },
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "schedule": {
            "type": "object",
            "properties": {"L_values": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}},
            "required": ["L_values"],
            "additionalProperties": False,
        },
        "points": {"type": "array", "items": _point, "minItems": 1},
        "point": _point,
        "transform": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["identity", "phase", "rotation", "shift"]},
                "phase": {"type": "number"},
                "axis": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
                "generator": {"type": "integer", "minimum": 0},
                "angle": {"type": "number"},
                "dp": _vector,
                "dq": _vector,
                "hbar_power": {"type": "number", "minimum": 0},
                "tolerance": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "kind": {"enum": ["dirac", "von_neumann"]},
        "f": _polynomial,
        "g": _polynomial,
        "funnel": _polynomial,
        "bracket": {
            "type": "object",
            "properties": {"with": _polynomial, "grid_size": {"type": "integer", "minimum": 1}},
            "required": ["with"],
            "additionalProperties": False,
        },
        "hamiltonian": _polynomial,
        "kappa": {"type": "number"},
        "psi0": _point,
        "t_grid": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {
                        "t_max": {"type": "number", "exclusiveMinimum": 0},
                        "n_points": {"type": "integer", "minimum": 2},
                    },
                    "required": ["t_max"],
                    "additionalProperties": False,
                },
                {"type": "array", "items": {"type": "number"}, "minItems": 1},
            ]
        },
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "output": {
            "type": "object",
            "properties": {
                "directory": {"type": "string"},
                "formats": {"type": "array", "items": {"enum": list(FORMATS)}, "uniqueItems": True},
            },
            "additionalProperties": False,
        },
    },
    "required": ["study", "family", "schedule"],
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"study": {"const": "germ_delta"}}}, "then": {"required": ["points"]}},
        {"if": {"properties": {"study": {"const": "germ_equiv"}}}, "then": {"required": ["points"]}},
        {"if": {"properties": {"study": {"const": "residuals"}}}, "then": {"required": ["kind", "f", "g"]}},
        {"if": {"properties": {"study": {"const": "funnel"}}}, "then": {"required": ["funnel", "point"]}},
    ],
}


def _path(error):
    parts = [str(p) for p in error.absolute_path]
    return ".".join(parts) if parts else "<root>"


def _schema_errors(config):
    validator = jsonschema.Draft202012Validator(SCHEMA)
    out = []
    for err in sorted(validator.iter_errors(config), key=lambda e: (_path(e), e.message)):
        path = _path(err)
        if path == "schedule.L_values" and err.validator == "minItems":
            out.append(f"{path}: schedule must be non-empty")
        else:
            out.append(f"{path}: {err.message}")
    return out


def validate(config):
    """Return a list of ``"field.path: message"`` strings; empty means valid.

    Never raises on malformed input.
    """
    if not isinstance(config, dict):
        return ["<root>: config must be a JSON object"]
    try:
        errors = _schema_errors(config)
    except Exception as exc:  # malformed beyond what the schema machinery handles
        return [f"<root>: {exc}"]
    if errors:
        return errors
    try:
        return _semantic_errors(config)
    except Exception as exc:
        return [f"<root>: {exc}"]


def _semantic_errors(cfg):
    errs = []
    fam = cfg["family"]
    kind = fam["kind"]
    study = cfg["study"]
    L_values = cfg["schedule"]["L_values"]
    if any(b <= a for a, b in zip(L_values, L_values[1:])):
        errs.append("schedule.L_values: must be strictly increasing")

    if kind == "bosonic_um":
        if "M" not in fam:
            errs.append("family.M: required for bosonic_um")
            return errs
        if fam["M"] < 2:
            errs.append("family.M: M must be ≥ 2")
            return errs
    fam_n = fam.get("n", 1)

    try:
        g = build_family(cfg)
    except ValidationError as exc:
        errs.append(f"family: {exc}")
        return errs

    point_kind = {"spin_su2": "theta", "heisenberg": "p", "bosonic_um": "psi"}[kind]

    def check_point(pt, path):
        if point_kind not in pt:
            errs.append(f"{path}: point does not match family {kind}")
            return
        try:
            p = build_point(pt, g)
        except ValidationError as exc:
            errs.append(f"{path}: {exc}")
            return
        if kind == "heisenberg" and p.n != fam_n:
            errs.append(f"{path}: plane point has n={p.n}, family has n={fam_n}")

    for k, pt in enumerate(cfg.get("points", [])):
        check_point(pt, f"points.{k}")
    if "point" in cfg:
        check_point(cfg["point"], "point")
    if "psi0" in cfg:
        check_point(cfg["psi0"], "psi0")

    if study == "germ_delta" and len(cfg.get("points", [])) != 2:
        errs.append("points: germ_delta needs exactly two points")
    if study == "residuals" and kind != "spin_su2":
        errs.append("family.kind: residuals are computed on the sphere (spin_su2)")
    if study in ("meanfield", "ground_state") and kind != "bosonic_um":
        errs.append(f"family.kind: {study} requires bosonic_um")

    nvars = 3 if study == "residuals" else g.nvars()
    for key in ("f", "g", "funnel", "hamiltonian"):
        if key in cfg:
            _check_poly(cfg[key], nvars, key, errs)
    if "bracket" in cfg:
        _check_poly(cfg["bracket"]["with"], nvars, "bracket.with", errs)
        if not (kind == "spin_su2" or (kind == "bosonic_um" and g.M == 2 and len(g.algebra) == 3)):
            errs.append("bracket: pullback brackets need spin_su2 or bosonic_um with M = 2 and three generators")
    if study in ("meanfield", "ground_state") and "hamiltonian" not in cfg:
        if not (kind == "bosonic_um" and fam["M"] == 2 and fam.get("generators", "spin-half") == "spin-half"):
            errs.append("hamiltonian: required unless M = 2 with spin-half generators (default LMG)")
    if study == "meanfield":
        try:
            build_t_grid(cfg)
        except ValidationError as exc:
            errs.append(f"t_grid: {exc}")
    if "transform" in cfg:
        errs.extend(_transform_errors(cfg["transform"], kind, g))
    return errs


def _check_poly(obj, nvars, path, errs):
    try:
        PolynomialSpec.from_json(obj, nvars)
    except ValidationError as exc:
        errs.append(f"{path}: {exc}")


def _transform_errors(t, kind, g):
    errs = []
    k = t["kind"]
    if k == "rotation":
        if kind == "spin_su2" and "axis" not in t:
            errs.append("transform.axis: required for spin_su2 rotations")
        if kind == "bosonic_um" and "generator" not in t:
            errs.append("transform.generator: required for bosonic_um rotations")
        if kind == "bosonic_um" and "generator" in t and t["generator"] >= len(g.algebra):
            errs.append("transform.generator: index out of range")
        if kind == "heisenberg":
            errs.append("transform.kind: use 'shift' for the heisenberg family")
        if "angle" not in t:
            errs.append("transform.angle: required for rotations")
    if k == "shift":
        if kind != "heisenberg":
            errs.append("transform.kind: 'shift' applies to the heisenberg family")
        elif len(t.get("dp", [])) != g.n or len(t.get("dq", [])) != g.n:
            errs.append(f"transform: dp and dq need length {g.n}")
    return errs


# -- builders -----------------------------------------------------------------

def parse_complex(c):
    return complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)


def build_family(cfg):
    fam = cfg["family"]
    kind = fam["kind"]
    if kind == "spin_su2":
        return SpinSU2()
    if kind == "heisenberg":
        return HeisenbergGauss(fam.get("n", 1))
    M = fam["M"]
    if M < 2:
        raise ValidationError("M must be ≥ 2")
    gens = fam.get("generators")
    if gens is None:
        alg = CollectiveAlgebra.default(M)
    elif isinstance(gens, str):
        alg = CollectiveAlgebra.named(gens, M)
    else:
        alg = CollectiveAlgebra([np.array([[parse_complex(c) for c in row] for row in mat]) for mat in gens])
    return BosonicUM(M, alg)


def build_point(pt, g):
    if "theta" in pt:
        return Sphere(pt["theta"], pt.get("phi", 0.0))
    if "p" in pt:
        return Plane(tuple(pt["p"]), tuple(pt["q"]))
    amps = np.array([parse_complex(c) for c in pt["psi"]])
    if isinstance(g, BosonicUM) and len(amps) != g.M:
        raise ValidationError(f"psi has {len(amps)} amplitudes, family has M={g.M}")
    return Ray(PureState.from_vector(amps))


def build_schedule(cfg):
    return SemiclassicalSchedule(tuple(cfg["schedule"]["L_values"]))


def build_polynomial(obj, nvars):
    return PolynomialSpec.from_json(obj, nvars)


def lmg_hamiltonian(kappa):
    """``x_z + kappa x_x^2`` in the spin-half generator order ``(x, y, z)``."""
    return PolynomialSpec([(1.0, (2,)), (kappa, (0, 0))], 3)


def build_hamiltonian(cfg, g):
    if "hamiltonian" in cfg:
        return build_polynomial(cfg["hamiltonian"], g.nvars())
    return lmg_hamiltonian(cfg.get("kappa", DEFAULT_KAPPA))


def build_t_grid(cfg):
    tg = cfg.get("t_grid", {"t_max": 2.0, "n_points": 41})
    if isinstance(tg, dict):
        n = tg.get("n_points", 41)
        grid = np.linspace(0.0, float(tg["t_max"]), n)
    else:
        grid = np.array(tg, dtype=float)
    if grid.size < 1 or np.any(np.diff(grid) <= 0) or not np.all(np.isfinite(grid)):
        raise ValidationError("times must be finite and strictly increasing")
    return grid


def with_defaults(cfg):
    """Copy of ``cfg`` with every defaulted field filled in explicitly."""
    out = copy.deepcopy(cfg)
    out.setdefault("name", out["study"])
    out.setdefault("seed", 0)
    outp = out.setdefault("output", {})
    outp.setdefault("directory", "germflow_out")
    outp.setdefault("formats", ["csv", "json"])
    if out["study"] in ("meanfield", "ground_state") and "hamiltonian" not in out:
        out["kappa"] = out.get("kappa", DEFAULT_KAPPA)
        out["hamiltonian"] = lmg_hamiltonian(out["kappa"]).to_json()
    if out["study"] == "meanfield":
        out.setdefault("psi0", {"psi": [math.cos(math.pi / 6), math.sin(math.pi / 6)]})
        out.setdefault("t_grid", {"t_max": 2.0, "n_points": 41})
        out.setdefault("dt", 1e-3)
    if out["study"] == "germ_equiv":
        out.setdefault("transform", {"kind": "identity"})
    if out["study"] == "funnel" and "bracket" in out:
        out["bracket"].setdefault("grid_size", 20)
    return out
