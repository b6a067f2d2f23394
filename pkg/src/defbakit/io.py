"""Model documents (JSON), trajectory output and the built-in toy model."""
from __future__ import annotations

import csv
import io as _io
import json
from typing import Iterable, Mapping, Optional

import jsonschema
import numpy as np

from .collocation import Trajectory
from .errors import ModelError, SchemaError, ValidationError
from .network import (BIOMASS, EXCHANGE, EXTERNAL, MACROMOLECULE, METABOLITE, REACTION_CLASSES,
                      SPECIES_CLASSES, STORAGE, STORAGE_RXN, CompositionRule, MetabolicModel,
                      Reaction, Species, SystemState)

FORMAT_VERSION = "1.0"

UNLIMITED = 1e9
"""Amount standing in for an unlimited external species."""

MODEL_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["format_version", "species", "reactions"],
    "additionalProperties": False,
    "properties": {
        "format_version": {"type": "string"},
        "name": {"type": "string"},
        "species": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "class"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "class": {"enum": list(SPECIES_CLASSES)},
                    "mol_weight": {"type": "number"},
                    "obj_weight": {"type": "number"},
                },
            },
        },
        "reactions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "class", "stoich"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "class": {"enum": list(REACTION_CLASSES)},
                    "stoich": {"type": "object", "additionalProperties": {"type": "number"}},
                    "reversible": {"type": "boolean"},
                    "kcat_fwd": {"type": "number"},
                    "kcat_bwd": {"type": "number"},
                    "enzyme": {"type": "string"},
                    "maintenance_phi": {"type": "number"},
                },
            },
        },
        "composition_rules": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["species", "fraction"],
                "additionalProperties": False,
                "properties": {"species": {"type": "string"}, "fraction": {"type": "number"}},
            },
        },
        "initial_state": {"type": "object", "additionalProperties": {"type": "number"}},
        "defaults": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t_end": {"type": "number"},
                "dt": {"type": "number"},
                "safety_factor": {"type": "number"},
            },
        },
    },
}


def toy_model(nutrient: float = UNLIMITED) -> tuple:
    """Three-reaction enzyme/storage model with its standard initial state.

    Nutrient ``N`` is taken up into metabolite ``A``, which is turned either
    into enzyme ``E`` (10 g/mol) or storage ``M`` (15 g/mol). ``E``
    catalyses all three reactions with turnover numbers 1.5, 1 and 2 1/h.
    Returns ``(model, state)`` with ``E = M = 0.1`` mol and ``N = nutrient``.
    """
    species = [
        Species("N", EXTERNAL),
        Species("A", METABOLITE),
        Species("E", MACROMOLECULE, mol_weight=10.0),
        Species("M", STORAGE, mol_weight=15.0),
    ]
    reactions = [
        Reaction("v_A", EXCHANGE, {"N": -1, "A": 1}, kcat_fwd=1.5, enzyme="E"),
        Reaction("v_E", BIOMASS, {"N": -1, "A": -1, "E": 1}, kcat_fwd=1.0, enzyme="E"),
        Reaction("v_M", STORAGE_RXN, {"N": -1, "A": -1, "M": 1}, kcat_fwd=2.0, enzyme="E"),
    ]
    model = MetabolicModel(species, reactions, name="toy")
    state = SystemState.from_amounts(model, {"N": nutrient, "E": 0.1, "M": 0.1})
    return model, state


# -- model documents ---------------------------------------------------------------

def _path(err) -> str:
    return "/" + "/".join(str(p) for p in err.absolute_path)


def model_from_dict(doc: Mapping) -> tuple:
    """Validate a decoded model document; return ``(model, state, defaults)``."""
    validator = jsonschema.Draft202012Validator(MODEL_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        if err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            raise SchemaError(f"{_path(err)}: unknown field {extra[0]!r}")
        raise SchemaError(f"{_path(err)}: {err.message}")
    if doc["format_version"] != FORMAT_VERSION:
        raise SchemaError(f"/format_version: unsupported version {doc['format_version']!r}")
    try:
        species = [Species(s["id"], s["class"], s.get("mol_weight", 0.0), s.get("obj_weight"))
                   for s in doc["species"]]
        reactions = [Reaction(r["id"], r["class"], r["stoich"], r.get("reversible", False),
                              r.get("kcat_fwd"), r.get("kcat_bwd"), r.get("enzyme"),
                              r.get("maintenance_phi")) for r in doc["reactions"]]
        rules = [CompositionRule(c["species"], c["fraction"]) for c in doc.get("composition_rules", [])]
        model = MetabolicModel(species, reactions, rules, name=doc.get("name", "model"))
        state = SystemState.from_amounts(model, doc.get("initial_state", {}))
    except (ModelError, ValueError) as exc:
        raise ValidationError(str(exc)) from exc
    return model, state, dict(doc.get("defaults", {}))


def parse_model(text: str) -> tuple:
    """Parse a JSON model document; return ``(model, initial_state)``."""
    model, state, _ = parse_model_document(text)
    return model, state


def parse_model_document(text: str) -> tuple:
    """Like :func:`parse_model` but also returns the ``defaults`` mapping."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return model_from_dict(doc)


def model_to_dict(model: MetabolicModel, state: Optional[SystemState] = None,
                  defaults: Optional[Mapping] = None) -> dict:
    species = []
    for s in model.species:
        rec = {"id": s.id, "class": s.kind}
        if s.accumulates or s.mol_weight:
            rec["mol_weight"] = s.mol_weight
        if s.accumulates or s.obj_weight != s.mol_weight:
            rec["obj_weight"] = s.obj_weight
        species.append(rec)
    reactions = []
    for r in model.reactions:
        rec = {"id": r.id, "class": r.kind, "stoich": dict(r.stoich), "reversible": r.reversible}
        for key in ("kcat_fwd", "kcat_bwd", "enzyme", "maintenance_phi"):
            if getattr(r, key) is not None:
                rec[key] = getattr(r, key)
        reactions.append(rec)
    doc = {"format_version": FORMAT_VERSION, "name": model.name, "species": species,
           "reactions": reactions,
           "composition_rules": [{"species": c.species, "fraction": c.fraction}
                                 for c in model.composition_rules]}
    if state is not None:
        doc["initial_state"] = state.amounts(model)
    if defaults:
        doc["defaults"] = dict(defaults)
    return doc


def serialize_model(model: MetabolicModel, state: Optional[SystemState] = None,
                    defaults: Optional[Mapping] = None) -> str:
    return json.dumps(model_to_dict(model, state, defaults), indent=2) + "\n"


def load_model(path) -> tuple:
    with open(path, encoding="utf-8") as fh:
        return parse_model_document(fh.read())


# -- trajectories --------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_trajectory(traj: Trajectory, fmt: str = "csv") -> str:
    """Serialise a trajectory as CSV or JSON text.

    CSV has one row per grid time: ``time``, species amounts, the fluxes of
    the interval starting at that time (empty on the last row), ``B``, ``B_o``.
    """
    if fmt == "json":
        doc = {
            "species_ids": list(traj.species_ids),
            "reaction_ids": list(traj.reaction_ids),
            "times": traj.times.tolist(),
            "Y": traj.Y.tolist(), "C": traj.C.tolist(), "P": traj.P.tolist(),
            "v": traj.v.tolist(), "B": traj.B.tolist(), "B_o": traj.B_o.tolist(),
            "objective_value": traj.objective_value,
        }
        return json.dumps(doc) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time", *traj.species_ids, *traj.reaction_ids, "B", "B_o"])
    Z = np.hstack([traj.Y, traj.C, traj.P])
    for k, t in enumerate(traj.times):
        flux = [_fmt(v) for v in traj.v[k]] if k < len(traj.v) else [""] * len(traj.reaction_ids)
        w.writerow([_fmt(t), *map(_fmt, Z[k]), *flux, _fmt(traj.B[k]), _fmt(traj.B_o[k])])
    return buf.getvalue()


def read_trajectory_json(text: str) -> Trajectory:
    doc = json.loads(text)
    times = np.asarray(doc["times"], dtype=float)
    block = lambda key: np.asarray(doc[key], dtype=float).reshape(times.size, -1) if times.size else None
    v = np.asarray(doc["v"], dtype=float).reshape(max(times.size - 1, 0), len(doc["reaction_ids"]))
    return Trajectory(times, block("Y"), block("C"), block("P"), v,
                      np.asarray(doc["B"], dtype=float), np.asarray(doc["B_o"], dtype=float),
                      float(doc["objective_value"]), tuple(doc["species_ids"]),
                      tuple(doc["reaction_ids"]))


def iteration_log_lines(records: Iterable[Mapping]) -> str:
    """JSON-lines text, one object per sdeFBA iteration."""
    return "".join(json.dumps(dict(r)) + "\n" for r in records)
