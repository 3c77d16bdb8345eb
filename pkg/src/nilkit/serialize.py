"""JSON artifact files: {"kind", "version", "payload"} envelopes.

Serialization is canonical (sorted keys, fixed separators, newline at EOF)
so artifacts round-trip bit-exactly.  Multiplication tables are row-major
integer arrays; cube sets are arrays of integer-encoded configurations in
ascending vertex order.
"""

from __future__ import annotations

import json

import numpy as np

from . import __version__
from .constructions import GroupAction
from .cubespace import CubeSet, FiniteCubespace
from .fibrations import CubespaceMap
from .groups import (
    FiniteAbelianGroup,
    FiniteGroup,
    Filtration,
    abelian_invariants,
    validate_filtration,
    validate_group,
)
from .relations import EquivRelation

FORMAT_VERSION = 1

KINDS = (
    "group",
    "filtration",
    "cubespace",
    "map",
    "action",
    "cocycle",
    "function",
    "relation",
    "certificate",
)


class SchemaError(ValueError):
    def __init__(self, path, detail):
        super().__init__(f"schema error at {path}: {detail}")
        self.path = path
        self.detail = detail


def envelope(kind, payload, meta=None):
    if kind not in KINDS:
        raise SchemaError("$.kind", f"unknown kind {kind}")
    out = {"kind": kind, "version": FORMAT_VERSION, "payload": payload}
    if meta is not None:
        out["payload"] = dict(payload)
        out["payload"]["meta"] = meta
    return out


def provenance(construction, **params):
    return {
        "construction": construction,
        "parameters": params,
        "tool_version": __version__,
    }


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def loads(text) -> dict:
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise SchemaError("$", "document must be an object")
    for key in ("kind", "version", "payload"):
        if key not in doc:
            raise SchemaError(f"$.{key}", "missing")
    if doc["kind"] not in KINDS:
        raise SchemaError("$.kind", f"unknown kind {doc['kind']}")
    if doc["version"] != FORMAT_VERSION:
        raise SchemaError("$.version", f"unsupported version {doc['version']}")
    return doc


def save(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))


def load(path, expect_kind=None) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = loads(fh.read())
    if expect_kind and doc["kind"] != expect_kind:
        raise SchemaError("$.kind", f"expected {expect_kind}, found {doc['kind']}")
    return doc


def _require(payload, key, typ, path):
    if key not in payload:
        raise SchemaError(f"{path}.{key}", "missing")
    val = payload[key]
    if typ is int and isinstance(val, bool):
        raise SchemaError(f"{path}.{key}", "expected integer")
    if not isinstance(val, typ):
        raise SchemaError(f"{path}.{key}", f"expected {typ.__name__}")
    return val


# --- groups ----------------------------------------------------------------


def group_doc(group: FiniteGroup, meta=None) -> dict:
    payload = {
        "order": group.order,
        "mult": [int(v) for v in group.mult.ravel()],
    }
    return envelope("group", payload, meta)


def group_from_doc(doc) -> FiniteGroup:
    payload = doc["payload"]
    n = _require(payload, "order", int, "$.payload")
    flat = _require(payload, "mult", list, "$.payload")
    if len(flat) != n * n:
        raise SchemaError("$.payload.mult", f"length {len(flat)} != {n}*{n}")
    return validate_group(np.array(flat, dtype=np.int64).reshape(n, n))


def abelian_doc(fab: FiniteAbelianGroup, meta=None) -> dict:
    return group_doc(fab.group, meta)


def abelian_from_doc(doc) -> FiniteAbelianGroup:
    return abelian_invariants(group_from_doc(doc))


def filtration_doc(filt: Filtration, meta=None) -> dict:
    payload = {
        "group": group_doc(filt.group)["payload"],
        "chain": [[int(x) for x in sub.elements] for sub in filt.chain],
    }
    return envelope("filtration", payload, meta)


def filtration_from_doc(doc) -> Filtration:
    payload = doc["payload"]
    gpayload = _require(payload, "group", dict, "$.payload")
    group = group_from_doc({"kind": "group", "version": FORMAT_VERSION, "payload": gpayload})
    chain = _require(payload, "chain", list, "$.payload")
    return validate_filtration(group, [tuple(level) for level in chain])


# --- cubespaces and maps ----------------------------------------------------


def cubespace_doc(space: FiniteCubespace, meta=None) -> dict:
    payload = {
        "points": space.npoints,
        "lmax": space.lmax,
        "cubes": {
            str(ell): [int(v) for v in space.cube_set(ell).enc]
            for ell in range(space.lmax + 1)
        },
    }
    return envelope("cubespace", payload, meta)


def cubespace_from_doc(doc) -> FiniteCubespace:
    payload = doc["payload"]
    n = _require(payload, "points", int, "$.payload")
    lmax = _require(payload, "lmax", int, "$.payload")
    cubes_json = _require(payload, "cubes", dict, "$.payload")
    cubes = {}
    for ell in range(lmax + 1):
        key = str(ell)
        if key not in cubes_json:
            raise SchemaError(f"$.payload.cubes.{key}", "missing level")
        cubes[ell] = CubeSet(n, ell, np.array(cubes_json[key], dtype=np.uint64))
    return FiniteCubespace(n, lmax, cubes)


def map_doc(f: CubespaceMap, meta=None) -> dict:
    payload = {
        "source": cubespace_doc(f.source)["payload"],
        "target": cubespace_doc(f.target)["payload"],
        "mapping": list(f.mapping),
    }
    return envelope("map", payload, meta)


def map_from_doc(doc) -> CubespaceMap:
    payload = doc["payload"]
    src = cubespace_from_doc({"kind": "cubespace", "version": FORMAT_VERSION,
                              "payload": _require(payload, "source", dict, "$.payload")})
    tgt = cubespace_from_doc({"kind": "cubespace", "version": FORMAT_VERSION,
                              "payload": _require(payload, "target", dict, "$.payload")})
    mapping = _require(payload, "mapping", list, "$.payload")
    return CubespaceMap(src, tgt, tuple(mapping))


def action_doc(action: GroupAction, meta=None) -> dict:
    payload = {
        "group": group_doc(action.group)["payload"],
        "points": action.npoints,
        "table": [int(v) for v in action.table.ravel()],
    }
    return envelope("action", payload, meta)


def action_from_doc(doc) -> GroupAction:
    payload = doc["payload"]
    group = group_from_doc({"kind": "group", "version": FORMAT_VERSION,
                            "payload": _require(payload, "group", dict, "$.payload")})
    n = _require(payload, "points", int, "$.payload")
    flat = _require(payload, "table", list, "$.payload")
    if len(flat) != group.order * n:
        raise SchemaError("$.payload.table", "length mismatch")
    return GroupAction(group, n, np.array(flat, dtype=np.int64).reshape(group.order, n))


# --- functions, cocycles, relations ------------------------------------------


def function_doc(space: FiniteCubespace, abelian: FiniteAbelianGroup, values, meta=None) -> dict:
    payload = {
        "cubespace": cubespace_doc(space)["payload"],
        "abelian": group_doc(abelian.group)["payload"],
        "values": [int(v) for v in values],
    }
    return envelope("function", payload, meta)


def function_from_doc(doc):
    from .cocycles import GroupValuedFunction

    payload = doc["payload"]
    space = cubespace_from_doc({"kind": "cubespace", "version": FORMAT_VERSION,
                                "payload": _require(payload, "cubespace", dict, "$.payload")})
    fab = abelian_invariants(
        group_from_doc({"kind": "group", "version": FORMAT_VERSION,
                        "payload": _require(payload, "abelian", dict, "$.payload")})
    )
    return GroupValuedFunction(space, fab, tuple(payload["values"]))


def cocycle_doc(rho, meta=None) -> dict:
    payload = {
        "cubespace": cubespace_doc(rho.space)["payload"],
        "abelian": group_doc(rho.abelian.group)["payload"],
        "level": rho.level,
        "values": [int(v) for v in rho.values],
    }
    return envelope("cocycle", payload, meta)


def cocycle_from_doc(doc):
    from .cocycles import Cocycle

    payload = doc["payload"]
    space = cubespace_from_doc({"kind": "cubespace", "version": FORMAT_VERSION,
                                "payload": _require(payload, "cubespace", dict, "$.payload")})
    fab = abelian_invariants(
        group_from_doc({"kind": "group", "version": FORMAT_VERSION,
                        "payload": _require(payload, "abelian", dict, "$.payload")})
    )
    level = _require(payload, "level", int, "$.payload")
    return Cocycle(space, fab, level, np.array(payload["values"], dtype=np.int64))


def relation_doc(rel: EquivRelation, meta=None) -> dict:
    payload = {
        "size": rel.size,
        "classes": [[int(x) for x in cls] for cls in rel.classes],
    }
    return envelope("relation", payload, meta)


def relation_from_doc(doc) -> EquivRelation:
    payload = doc["payload"]
    return EquivRelation(
        _require(payload, "size", int, "$.payload"),
        _require(payload, "classes", list, "$.payload"),
    )


def certificate_doc(payload, meta=None) -> dict:
    return envelope("certificate", payload, meta)
