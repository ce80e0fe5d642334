"""JSON interchange for instances, cost functions, schemes, and reports.

Instance format:
    {"actions": [{"id": "g", "cost": 0.35, "prob": 1.0}, ...],
     "null_id": "bot",
     "cost_fn": {...}}

Scheme format:
    {"suggested": "g", "alpha": 0.35,
     "distribution": [{"set": ["g"], "prob": 0.42857}, ...]}

Cost function formats (weights keyed by action id; "table" values indexed by
bitmask over the instance's action-list order, bit i = actions[i]):
    {"type": "additive", "weights": {"g": 0.1, ...}}
    {"type": "budget_additive", "weights": {...}, "cap": 1.5}
    {"type": "coverage", "universe": 4, "element_weights": [...],
     "covers": {"g": [0, 2], ...}}
    {"type": "concave_cardinality", "table": [0, 1, 1.5, ...]}
    {"type": "table", "values": [...]}
    {"type": "xos", "clauses": [{"g": 0.1, ...}, ...]}
    {"type": "xos_hard", "k": 7, "T": [1, 2, 4, 5, 6, 7], "m": null}
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from . import costfn
from .model import Action, ActionId, InspectionScheme, Instance


class ParseError(ValueError):
    """Raised on malformed JSON structure (missing keys, bad types)."""


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def instance_digest(doc: dict) -> str:
    return hashlib.sha256(canonical_dumps(doc).encode()).hexdigest()


def _require(doc: dict, key: str):
    if key not in doc:
        raise ParseError(f"missing key {key!r}")
    return doc[key]


def _weights_vector(weights: dict, ids: list[ActionId]) -> list[float]:
    unknown = set(weights) - set(ids)
    if unknown:
        raise ParseError(f"weights reference unknown actions {sorted(unknown)}")
    return [float(weights.get(j, 0.0)) for j in ids]


def cost_fn_from_json(doc: dict, ids: list[ActionId]) -> costfn.SetFunction:
    kind = _require(doc, "type")
    if kind == "additive":
        return costfn.Additive(_weights_vector(_require(doc, "weights"), ids))
    if kind == "budget_additive":
        return costfn.BudgetAdditive(
            _weights_vector(_require(doc, "weights"), ids), float(_require(doc, "cap")))
    if kind == "coverage":
        universe = int(_require(doc, "universe"))
        covers_doc = _require(doc, "covers")
        covers = []
        for j in ids:
            mask = 0
            for e in covers_doc.get(j, []):
                mask |= 1 << int(e)
            covers.append(mask)
        return costfn.WeightedCoverage(universe, covers, _require(doc, "element_weights"))
    if kind == "concave_cardinality":
        return costfn.ConcaveCardinality(_require(doc, "table"))
    if kind == "table":
        values = _require(doc, "values")
        if len(values) != 1 << len(ids):
            raise ParseError("table length must be 2^n for n actions")
        return costfn.ExplicitTable(values)
    if kind == "xos":
        clauses = [_weights_vector(c, ids) for c in _require(doc, "clauses")]
        return costfn.XOSClauses(clauses)
    if kind == "xos_hard":
        from .families import HardParams, VTCost
        params = HardParams(int(_require(doc, "k")),
                            frozenset(int(t) for t in _require(doc, "T")),
                            doc.get("m"))
        return VTCost(params)
    raise ParseError(f"unknown cost_fn type {kind!r}")


def cost_fn_to_json(fn: costfn.SetFunction, ids: list[ActionId]) -> dict:
    def weights_doc(w):
        return {j: w[i] for i, j in enumerate(ids) if w[i] != 0.0}

    if isinstance(fn, costfn.Additive):
        return {"type": "additive", "weights": weights_doc(fn.weights)}
    if isinstance(fn, costfn.BudgetAdditive):
        return {"type": "budget_additive", "weights": weights_doc(fn.weights), "cap": fn.cap}
    if isinstance(fn, costfn.WeightedCoverage):
        return {
            "type": "coverage",
            "universe": fn.universe,
            "element_weights": list(fn.element_weights),
            "covers": {j: sorted(costfn.bits(fn.covers[i])) for i, j in enumerate(ids)
                       if fn.covers[i]},
        }
    if isinstance(fn, costfn.ConcaveCardinality):
        return {"type": "concave_cardinality", "table": list(fn.g)}
    if isinstance(fn, costfn.ExplicitTable):
        return {"type": "table", "values": list(fn.values)}
    if isinstance(fn, costfn.XOSClauses):
        return {"type": "xos", "clauses": [weights_doc(c) for c in fn.clauses]}
    from .families import VTCost
    if isinstance(fn, VTCost):
        return {"type": "xos_hard", "k": fn.params.k, "T": sorted(fn.params.T),
                "m": fn.params.m_override}
    raise ParseError(f"cost function {type(fn).__name__} has no JSON form")


def instance_from_json(doc: dict) -> Instance:
    try:
        actions_doc = _require(doc, "actions")
        actions = tuple(
            Action(str(_require(a, "id")), float(_require(a, "cost")), float(_require(a, "prob")))
            for a in actions_doc
        )
        ids = [a.id for a in actions]
        fn = cost_fn_from_json(_require(doc, "cost_fn"), ids)
        null_id = str(_require(doc, "null_id"))
    except (TypeError, KeyError) as exc:
        raise ParseError(str(exc)) from exc
    return Instance(actions, null_id, fn)


def instance_to_json(inst: Instance) -> dict:
    return {
        "actions": [{"id": a.id, "cost": a.cost, "prob": a.prob} for a in inst.actions],
        "null_id": inst.null_id,
        "cost_fn": cost_fn_to_json(inst.cost_fn, list(inst.ids)),
    }


def scheme_from_json(doc: dict) -> InspectionScheme:
    try:
        dist = [(frozenset(str(j) for j in _require(e, "set")), float(_require(e, "prob")))
                for e in _require(doc, "distribution")]
        return InspectionScheme(str(_require(doc, "suggested")),
                                float(_require(doc, "alpha")), dist)
    except (TypeError, KeyError) as exc:
        raise ParseError(str(exc)) from exc


def scheme_to_json(scheme: InspectionScheme) -> dict:
    return {
        "suggested": scheme.suggested,
        "alpha": scheme.alpha,
        "distribution": [{"set": sorted(s), "prob": p} for s, p in scheme.distribution],
    }


def load_instance(path: str) -> Instance:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    return instance_from_json(doc)


def load_scheme(path: str) -> InspectionScheme:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    return scheme_from_json(doc)
