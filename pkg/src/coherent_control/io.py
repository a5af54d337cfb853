"""JSON file formats and deterministic report serialization.

Matrices are lists of rows, each entry a ``[re, im]`` pair::

    {"dims": [3, 2], "matrix": [[[0.25, 0.0], ...], ...]}

Bases: ``{"dim": d, "vectors": [vector, ...]}`` with vectors as lists of pairs.
Channels: ``{"in_dims": [...], "out_dims": [...], "kraus": [matrix, ...]}``.
Programs: ``{"in_dims": [...], "basis": basis-or-null, "steps": [step, ...]}``
where each step is an object tagged by ``"kind"``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .channels import (AddAncillaB, ControlledFromA, GoiaProgram, IncoherentOnA, KrausChannel,
                       MeasureB, Povm, TraceB, make_channel)
from .errors import ParseError
from .states import DensityMatrix, OrthonormalBasis

__all__ = [
    "encode_matrix", "decode_matrix", "state_to_json", "state_from_json", "load_state",
    "save_state", "load_matrix", "basis_to_json", "basis_from_json", "load_basis",
    "channel_to_json", "channel_from_json", "program_to_json", "program_from_json",
    "dumps", "read_json",
]


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def encode_vector(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def _decode_entry(z, where):
    if (not isinstance(z, (list, tuple)) or len(z) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z)):
        raise ParseError("expected a [re, im] pair of numbers", where)
    return complex(z[0], z[1])


def decode_vector(obj, where="vector") -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ParseError("expected a nonempty list", where)
    return np.array([_decode_entry(z, f"{where}[{i}]") for i, z in enumerate(obj)])


def decode_matrix(obj, where="matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ParseError("expected a nonempty list of rows", where)
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise ParseError("expected a row list", f"{where}[{i}]")
        rows.append([_decode_entry(z, f"{where}[{i}][{j}]") for j, z in enumerate(row)])
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"row has {len(row)} entries, expected {width}", f"{where}[{i}]")
    return np.array(rows, dtype=complex)


def _field(obj, key, where):
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", where)
    if key not in obj:
        raise ParseError(f"missing field {key!r}", where)
    return obj[key]


def _dims(obj, where):
    if not isinstance(obj, list) or not obj or not all(
            isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in obj):
        raise ParseError("expected a nonempty list of positive integers", where)
    return tuple(obj)


def read_json(path) -> object:
    """Load JSON, converting decoder errors into ``ParseError`` with line/column."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from exc


def state_to_json(rho: DensityMatrix) -> dict:
    return {"dims": list(rho.dims), "matrix": encode_matrix(rho.mat)}


def state_from_json(obj, where="state") -> DensityMatrix:
    """Parse a state object; shape problems are ``ParseError``, invariants ``ValidationError``."""
    dims = _dims(_field(obj, "dims", where), f"{where}.dims")
    m = decode_matrix(_field(obj, "matrix", where), f"{where}.matrix")
    if m.shape[0] != m.shape[1]:
        raise ParseError(f"matrix is not square ({m.shape[0]}x{m.shape[1]})", f"{where}.matrix")
    if m.shape[0] != math.prod(dims):
        raise ParseError(f"matrix side {m.shape[0]} does not match dims {list(dims)}",
                         f"{where}.matrix")
    return DensityMatrix(dims, m)


def load_state(path) -> DensityMatrix:
    return state_from_json(read_json(path), where=str(path))


def save_state(rho: DensityMatrix, path) -> None:
    Path(path).write_text(dumps(state_to_json(rho)) + "\n")


def load_matrix(path) -> np.ndarray:
    """Unitary files share the state layout; ``dims`` is optional there."""
    obj = read_json(path)
    m = decode_matrix(_field(obj, "matrix", str(path)), f"{path}.matrix")
    if m.shape[0] != m.shape[1]:
        raise ParseError("matrix is not square", f"{path}.matrix")
    if isinstance(obj, dict) and "dims" in obj:
        dims = _dims(obj["dims"], f"{path}.dims")
        if math.prod(dims) != m.shape[0]:
            raise ParseError(f"matrix side {m.shape[0]} does not match dims {list(dims)}",
                             f"{path}.matrix")
    return m


def basis_to_json(basis: OrthonormalBasis) -> dict:
    return {"dim": basis.dim, "vectors": [encode_vector(v) for v in basis.vectors]}


def basis_from_json(obj, where="basis") -> OrthonormalBasis:
    dim = _field(obj, "dim", where)
    vecs = _field(obj, "vectors", where)
    if not isinstance(vecs, list) or len(vecs) != dim:
        raise ParseError(f"expected {dim} vectors", f"{where}.vectors")
    cols = [decode_vector(v, f"{where}.vectors[{i}]") for i, v in enumerate(vecs)]
    if any(len(c) != dim for c in cols):
        raise ParseError(f"every vector needs {dim} entries", f"{where}.vectors")
    return OrthonormalBasis(np.array(cols).T)


def load_basis(path) -> OrthonormalBasis:
    return basis_from_json(read_json(path), where=str(path))


def channel_to_json(ch: KrausChannel) -> dict:
    return {"in_dims": list(ch.in_dims), "out_dims": list(ch.out_dims),
            "kraus": [encode_matrix(k) for k in ch.kraus]}


def channel_from_json(obj, where="channel") -> KrausChannel:
    in_dims = _dims(_field(obj, "in_dims", where), f"{where}.in_dims")
    out_dims = _dims(_field(obj, "out_dims", where), f"{where}.out_dims")
    kraus = _field(obj, "kraus", where)
    if not isinstance(kraus, list) or not kraus:
        raise ParseError("expected a nonempty list of matrices", f"{where}.kraus")
    mats = [decode_matrix(k, f"{where}.kraus[{i}]") for i, k in enumerate(kraus)]
    return make_channel(mats, in_dims, out_dims)


def _step_to_json(step) -> dict:
    if isinstance(step, IncoherentOnA):
        return {"kind": step.kind, "channel": channel_to_json(step.channel)}
    if isinstance(step, ControlledFromA):
        return {"kind": step.kind, "targets": list(step.targets),
                "blocks": [encode_matrix(b) for b in step.blocks]}
    if isinstance(step, AddAncillaB):
        return {"kind": step.kind, "dim": step.dim}
    if isinstance(step, TraceB):
        return {"kind": step.kind, "index": step.index}
    return {"kind": step.kind, "index": step.index, "register": step.register,
            "povm": [encode_matrix(e) for e in step.povm.elements]}


def _step_from_json(obj, where):
    kind = _field(obj, "kind", where)
    if kind == "IncoherentOnA":
        return IncoherentOnA(channel_from_json(_field(obj, "channel", where), f"{where}.channel"))
    if kind == "ControlledFromA":
        blocks = _field(obj, "blocks", where)
        if not isinstance(blocks, list):
            raise ParseError("expected a list of matrices", f"{where}.blocks")
        return ControlledFromA(tuple(decode_matrix(b, f"{where}.blocks[{i}]")
                                     for i, b in enumerate(blocks)),
                               tuple(obj.get("targets", [1])))
    if kind == "AddAncillaB":
        return AddAncillaB(int(_field(obj, "dim", where)))
    if kind == "TraceB":
        return TraceB(int(_field(obj, "index", where)))
    if kind == "MeasureB":
        els = _field(obj, "povm", where)
        if not isinstance(els, list):
            raise ParseError("expected a list of matrices", f"{where}.povm")
        povm = Povm([decode_matrix(e, f"{where}.povm[{i}]") for i, e in enumerate(els)])
        return MeasureB(int(_field(obj, "index", where)), povm, bool(obj.get("register", False)))
    raise ParseError(f"unknown step kind {kind!r}", f"{where}.kind")


def program_to_json(program: GoiaProgram) -> dict:
    return {"in_dims": list(program.in_dims), "basis": basis_to_json(program.basis),
            "steps": [_step_to_json(s) for s in program.steps]}


def program_from_json(obj, where="program") -> GoiaProgram:
    in_dims = _dims(_field(obj, "in_dims", where), f"{where}.in_dims")
    basis = obj.get("basis")
    basis = basis_from_json(basis, f"{where}.basis") if basis is not None else None
    steps = _field(obj, "steps", where)
    if not isinstance(steps, list):
        raise ParseError("expected a list of steps", f"{where}.steps")
    return GoiaProgram(in_dims, tuple(_step_from_json(s, f"{where}.steps[{i}]")
                                      for i, s in enumerate(steps)), basis)


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"im": obj.imag, "re": obj.real}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _encode(obj, indent, level) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    return _encode(_plain(obj), indent, 0)
