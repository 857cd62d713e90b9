"""Model files in, report files out.

Models are JSON validated against ``schemas/model.schema.json``. Reports are
JSON written by a small emitter with sorted keys and every float printed to
17 significant digits, so equal inputs give byte-identical files.
"""

import dataclasses
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from .analysis import AnalysisOptions
from .exceptions import DimensionMismatch, SchemaError
from .groups import Reals, group_from_json
from .kernels import GridSpec, dirichlet_heat_generator, heat_kernel, sample_kernel
from .lattice import LatticeSpace
from .operators import StructuredOperator, Transport
from .semigroup import ContinuousTimeRepresentation, GeneratedRepresentation

REPORT_VERSION = "posconv-report/1"
MODEL_VERSION = "posconv-model/1"


@lru_cache(maxsize=1)
def model_schema():
    text = resources.files("posconv").joinpath("schemas/model.schema.json").read_text()
    return json.loads(text)


@dataclass
class Model:
    """A parsed model file."""

    name: str
    rep: object
    options: AnalysisOptions
    dt: float = 1.0
    grid: GridSpec = None
    raw: dict = None


# parsing ---------------------------------------------------------------------

def _where(path):
    parts = [f"[{p}]" if isinstance(p, int) else f".{p}" for p in path]
    return "".join(parts).lstrip(".") or "<root>"


def validate_model(obj):
    """Raise SchemaError naming the offending field."""
    validator = jsonschema.Draft202012Validator(model_schema())
    error = jsonschema.exceptions.best_match(validator.iter_errors(obj))
    if error is not None:
        raise SchemaError(f"at {_where(error.absolute_path)}: {error.message}")


def _rational(v):
    return Fraction(v) if isinstance(v, int) else Fraction(v.replace(" ", ""))


def _space(obj):
    p = math.inf if obj["p"] == "inf" else float(obj["p"])
    if "grid" in obj:
        a, b = obj["grid"]["window"]
        grid = GridSpec(float(a), float(b), obj["grid"]["n"])
        return grid.space(p), grid
    atoms = tuple(obj["atoms"])
    weights = obj.get("weights")
    if weights is not None and len(weights) != len(atoms):
        raise DimensionMismatch(f"space has {len(atoms)} atoms but {len(weights)} weights")
    return LatticeSpace(atoms, None if weights is None else tuple(weights), p), None


def _need_grid(grid, what):
    if grid is None:
        raise SchemaError(f"builtin {what} needs a grid space")
    return grid


def _kernel(obj, space, grid):
    if obj is None:
        return None
    if isinstance(obj, list):
        return np.asarray(obj, dtype=float)
    kind = obj["builtin"]
    grid = _need_grid(grid, kind)
    if kind == "gaussian":
        if "t" not in obj:
            raise SchemaError("builtin gaussian needs 't'")
        return sample_kernel(heat_kernel(obj["t"]), grid)
    if kind == "constant":
        c = float(obj.get("value", 1.0))
        return sample_kernel(lambda x, y: np.full_like(x, c), grid)
    left = np.asarray(obj.get("left", ()), dtype=float)
    right = np.asarray(obj.get("right", ()), dtype=float)
    if left.size != grid.n or right.size != grid.n:
        raise DimensionMismatch(f"separable kernel tables need {grid.n} entries each")
    # k(x_i, y_j) = right_j * left_i
    return sample_kernel(lambda x, y: np.outer(right, left), grid)


def _operator(obj, space, grid):
    K = _kernel(obj.get("kernel"), space, grid)
    terms = [Transport(t["coef"], tuple(t["map"]),
                       None if t.get("scale") is None else tuple(t["scale"]))
             for t in obj.get("singular", ())]
    return StructuredOperator(space, K, terms)


def _options(obj):
    obj = dict(obj or {})
    dt = float(obj.pop("dt", 1.0))
    dom = obj.pop("dominated", None)
    if dom is not None:
        s = dom["s"]
        s = _rational(s) if isinstance(s, (int, str)) else float(s)
        obj["dominated"] = (s, np.asarray(dom["kernel"], dtype=float))
    return AnalysisOptions(**obj), dt


def model_from_dict(obj):
    """Build a :class:`Model` from already-decoded JSON."""
    validate_model(obj)
    space, grid = _space(obj["space"])
    rep_obj = obj["representation"]
    index = group_from_json(obj["index_class"]) if "index_class" in obj else None
    if rep_obj["kind"] == "generated":
        gens = [_rational(g) for g in rep_obj["generators"]]
        ops = [_operator(o, space, grid) for o in rep_obj["operators"]]
        if len(gens) != len(ops):
            raise DimensionMismatch(f"{len(gens)} generators but {len(ops)} operators")
        if isinstance(index, Reals):
            raise SchemaError("at index_class: generated representations need a subgroup of Q")
        rep = GeneratedRepresentation(space, gens, ops, index)
    else:
        if index is not None and not isinstance(index, Reals):
            raise SchemaError("at index_class: continuous-time representations are indexed by reals")
        jump = rep_obj["jump"]
        killing = rep_obj.get("killing")
        if isinstance(jump, dict):
            B, builtin_kill = dirichlet_heat_generator(_need_grid(grid, jump["builtin"]))
            if killing is None:
                killing = builtin_kill
        else:
            B = np.asarray(jump, dtype=float)
        flow = rep_obj.get("flow")
        flow = None if flow is None else (flow["rate"], flow["map"])
        rep = ContinuousTimeRepresentation(space, B, flow, killing)
    options, dt = _options(obj.get("options"))
    return Model(obj.get("name", ""), rep, options, dt, grid, obj)


def loads_model(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return model_from_dict(obj)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())


# serialisation ---------------------------------------------------------------

def to_jsonable(obj):
    """Plain JSON data: Fractions become ``"k/m"`` strings, complex numbers
    ``{"re", "im"}`` objects, non-finite floats strings."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()] if obj.ndim else to_jsonable(obj.item())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if f.repr}
    return repr(obj)


def _emit(v, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None:
        out.append("null")
    elif v is True:
        out.append("true")
    elif v is False:
        out.append("false")
    elif isinstance(v, int):
        out.append(str(v))
    elif isinstance(v, float):
        out.append(format(v, ".17g"))
    elif isinstance(v, str):
        out.append(json.dumps(v, ensure_ascii=False))
    elif isinstance(v, list):
        if not v:
            out.append("[]")
            return
        out.append("[\n")
        for k, item in enumerate(v):
            out.append(pad)
            _emit(item, indent, level + 1, out)
            out.append(",\n" if k < len(v) - 1 else "\n")
        out.append(end + "]")
    else:
        if not v:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(v)
        for k, key in enumerate(keys):
            out.append(pad + json.dumps(key, ensure_ascii=False) + ": ")
            _emit(v[key], indent, level + 1, out)
            out.append(",\n" if k < len(keys) - 1 else "\n")
        out.append(end + "}")


def dumps(obj, indent=2):
    """Deterministic JSON text (sorted keys, ``.17g`` floats)."""
    out = []
    _emit(to_jsonable(obj), indent, 0, out)
    return "".join(out) + "\n"


def report_to_dict(report, model_name=""):
    return {
        "version": REPORT_VERSION,
        "model": model_name,
        "conclusion": report.conclusion,
        "convergence": report.convergence,
        "spectral": report.spectral,
        "hypotheses": [{"name": h.name, "status": h.status, "witness": h.witness}
                       for h in report.hypotheses],
        "verdicts": [{"id": v.id, "applicable": v.applicable, "conclusion": v.conclusion,
                      "consumed": v.consumed, "witness": v.witness} for v in report.verdicts],
        "limit_projection": report.limit_projection,
        "eigenvalues": [{"values": e.values, "is_trivial": e.is_trivial, "mu": e.mu,
                         "vector_real": e.vector_real, "vector_imag": e.vector_imag}
                        for e in report.eigenvalues],
        "simulation": report.simulation,
        "notes": report.notes,
        "details": report.details,
    }


def dumps_report(report, model_name=""):
    return dumps(report_to_dict(report, model_name))


def operator_to_dict(op):
    return {
        "kernel": op.kernel,
        "singular": [{"coef": t.coef, "map": list(t.cell_map),
                      "scale": None if t.scale is None else list(t.scale)}
                     for t in op.singular],
    }


def space_to_dict(space):
    return {"atoms": list(space.atoms), "weights": list(space.w),
            "p": "inf" if math.isinf(space.p) else space.p}


def rep_to_dict(rep):
    """Model-file ``space``/``representation``/``index_class`` fragment of a
    representation built in code."""
    if rep.kind == "continuous":
        r = {"kind": "continuous", "jump": rep.jump,
             "flow": None if rep.flow is None else {"rate": rep.flow[0], "map": list(rep.flow[1])},
             "killing": rep.killing}
    else:
        r = {"kind": "generated", "generators": [str(g) for g in rep.generators],
             "operators": [operator_to_dict(op) for op in rep.operators]}
    return {"space": space_to_dict(rep.space), "representation": r,
            "index_class": rep.group.to_json()}


__all__ = [
    "Model", "REPORT_VERSION", "model_schema", "validate_model", "model_from_dict",
    "loads_model", "load_model", "to_jsonable", "dumps", "report_to_dict", "dumps_report",
    "operator_to_dict", "space_to_dict", "rep_to_dict",
]
