"""JSON forms of chains, families and reports, plus the canonical hash of a payload."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any, Dict

import numpy as np

from chains.one import OneChain
from chains.zero import ZeroChain
from cubical.complex import CubicalComplex
from cubical.family import VertexMap
from core.errors import BadSpec

DIGITS = 12


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types, floats rounded so that hashes ignore last-bit noise."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return float(f"{value:.{DIGITS}g}")
    if isinstance(obj, (ZeroChain, OneChain)):
        return chain_to_dict(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def canonical_bytes(payload: Any) -> bytes:
    return json.dumps(to_jsonable(payload), ensure_ascii=True, sort_keys=True,
                      separators=(",", ":")).encode("utf-8")


def payload_hash(payload: Any) -> str:
    return hashlib.sha256(canonical_bytes(payload)).hexdigest()


def chain_to_dict(chain) -> Dict[str, Any]:
    """Chain JSON: ``{"dim": n, "zero": [points]}`` or ``{"dim": n, "one": [segments]}``."""
    if isinstance(chain, ZeroChain):
        return {"dim": chain.dim, "zero": chain.to_list()}
    if isinstance(chain, OneChain):
        return {"dim": chain.dim, "one": chain.to_list()}
    raise TypeError(f"cannot serialize {type(chain).__name__}")


def chain_from_dict(data: Dict[str, Any]):
    """Reads chain JSON; with both keys present the non-empty part decides the degree."""
    try:
        dim = int(data["dim"])
        zero, one = data.get("zero"), data.get("one")
        if zero is None and one is None:
            raise BadSpec("chain JSON needs a \"zero\" or a \"one\" part")
        if zero and one:
            raise BadSpec("chain JSON mixes points and segments")
        if one or zero is None:
            return OneChain(one, dim=dim)
        return ZeroChain(zero, dim=dim)
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise BadSpec(f"malformed chain JSON: {e}") from e


def vertex_key(vertex) -> str:
    return ",".join(str(int(x)) for x in vertex)


def family_to_dict(F: VertexMap) -> Dict[str, Any]:
    return {
        "provenance": F.provenance,
        "complex": F.complex.to_dict(),
        "values": {vertex_key(v): chain_to_dict(F[v]) for v in F.vertices()},
    }


def family_from_dict(data: Dict[str, Any]) -> VertexMap:
    try:
        complex = CubicalComplex.from_dict(data["complex"])
        values = {tuple(int(x) for x in k.split(",")): chain_from_dict(v)
                  for k, v in data["values"].items()}
    except (KeyError, AttributeError, ValueError) as e:
        raise BadSpec(f"malformed family JSON: {e}") from e
    missing = [v for v in complex.vertices() if v not in values]
    if missing:
        raise BadSpec(f"family JSON misses {len(missing)} vertices, first {missing[0]}")
    return VertexMap(complex, values, data.get("provenance", "input"))


def write_family(F: VertexMap, path: Path) -> None:
    path.write_bytes(canonical_bytes(family_to_dict(F)))


def read_family(path: Path) -> VertexMap:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise BadSpec(f"cannot read family from {path}: {e}") from e
    return family_from_dict(data)
