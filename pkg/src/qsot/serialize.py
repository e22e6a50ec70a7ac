"""JSON/CSV formats shared by the library and the CLI.

Operator:  {"dims": [...], "re": [[...]], "im": [[...]]}   (row-major)
Channel:   {"in_dim": d, "out_dim": d', "kraus": [{"re": ..., "im": ...}, ...]}
Chain:     {"channels": [channel, ...]}
POVM:      {"dim": d, "elements": [operator, ...]}
QSOT:      operator fields plus "kind" and "policy"
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .channels import ChannelChain, QuantumChannel
from .linalg import Operator
from .quasiprob import Povm, QuasiDistribution
from .star import ExtensionPolicy, QsotOperator, StarKind


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + pad if indent else ", "
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{" + pad + sep.join(items) + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # keep numeric rows on one line
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, 0, 0) for v in obj) + "]"
        return "[" + pad + sep.join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON with floats written to 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def complex_json(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float) if obj.get("im") is not None else np.zeros_like(re)
    if re.shape != im.shape:
        raise ValueError("re and im parts have different shapes")
    return re + 1j * im


def operator_to_json(op: Operator) -> dict:
    return {"dims": list(op.dims), **matrix_to_json(op.data)}


def operator_from_json(obj) -> Operator:
    return Operator(matrix_from_json(obj), obj.get("dims"))


def channel_to_json(e: QuantumChannel) -> dict:
    return {"in_dim": e.in_dim, "out_dim": e.out_dim, "kraus": [matrix_to_json(k) for k in e.kraus]}


def channel_from_json(obj) -> QuantumChannel:
    return QuantumChannel([matrix_from_json(k) for k in obj["kraus"]], obj.get("in_dim"), obj.get("out_dim"))


def chain_to_json(chain: ChannelChain) -> dict:
    return {"channels": [channel_to_json(e) for e in chain]}


def chain_from_json(obj) -> ChannelChain:
    if isinstance(obj, list):
        obj = {"channels": obj}
    return ChannelChain(channel_from_json(c) for c in obj["channels"])


def povm_to_json(p: Povm) -> dict:
    return {"dim": p.dim, "elements": [operator_to_json(Operator(e)) for e in p.elements]}


def povm_from_json(obj) -> Povm:
    p = Povm(matrix_from_json(e) for e in obj["elements"])
    if "dim" in obj and int(obj["dim"]) != p.dim:
        raise ValueError(f"POVM declares dim {obj['dim']} but elements are {p.dim}-dimensional")
    return p


def qsot_to_json(q: QsotOperator) -> dict:
    return {"kind": q.kind.value, "policy": q.policy.to_json(), **operator_to_json(q.op)}


def qsot_from_json(obj) -> QsotOperator:
    return QsotOperator(operator_from_json(obj), StarKind.parse(obj["kind"]), ExtensionPolicy.from_json(obj.get("policy")))


def distribution_to_json(qd: QuasiDistribution) -> dict:
    """Row-major flattening over outcome tuples, like the CSV export."""
    flat = qd.values.reshape(-1)
    return {"axes": list(qd.axes), "re": flat.real.tolist(), "im": flat.imag.tolist()}


def load_json(path: str | Path):
    with open(path) as fh:
        return json.load(fh)
