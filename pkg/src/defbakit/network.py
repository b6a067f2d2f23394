"""Metabolic network description and constraint-matrix assembly.

Species are partitioned into external (Y), metabolite (X), storage (C) and
macromolecule (P) blocks; reactions into exchange, metabolic, storage and
biomass blocks. :func:`assemble_matrices` turns a model into the dense
matrices the LP builders consume.

Fluxes enter every LP in *split* form: one nonnegative forward column per
reaction followed by one nonnegative backward column per reversible
reaction, so that the net flux vector is ``v = T @ u``.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import (BlockViolation, DimensionMismatch, MissingKcat, ModelError,
                     UnknownSpeciesRef)

EXTERNAL, METABOLITE, STORAGE, MACROMOLECULE = "external", "metabolite", "storage", "macromolecule"
SPECIES_CLASSES = (EXTERNAL, METABOLITE, STORAGE, MACROMOLECULE)

EXCHANGE, METABOLIC, STORAGE_RXN, BIOMASS = "exchange", "metabolic", "storage", "biomass"
REACTION_CLASSES = (EXCHANGE, METABOLIC, STORAGE_RXN, BIOMASS)


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Species:
    """A chemical species.

    ``mol_weight`` (g/mol) is required for storage species and
    macromolecules; ``obj_weight`` defaults to ``mol_weight`` and may be 0.
    """

    id: str
    kind: str
    mol_weight: float = 0.0
    obj_weight: Optional[float] = None

    def __post_init__(self):
        if self.kind not in SPECIES_CLASSES:
            raise ModelError(f"species {self.id!r}: unknown class {self.kind!r}")
        accumulates = self.kind in (STORAGE, MACROMOLECULE)
        if accumulates and not self.mol_weight > 0:
            raise ModelError(f"species {self.id!r}: mol_weight must be > 0")
        if self.obj_weight is None:
            object.__setattr__(self, "obj_weight", float(self.mol_weight))
        if self.obj_weight < 0:
            raise ModelError(f"species {self.id!r}: obj_weight must be >= 0")

    @property
    def accumulates(self) -> bool:
        return self.kind in (STORAGE, MACROMOLECULE)


@dataclass(frozen=True)
class Reaction:
    """A reaction with optional enzyme catalysis and maintenance demand.

    ``reversible=False`` means the flux is confined to ``[0, inf)``,
    otherwise it is free. Turnover numbers are in 1/h.
    """

    id: str
    kind: str
    stoich: Mapping[str, float]
    reversible: bool = False
    kcat_fwd: Optional[float] = None
    kcat_bwd: Optional[float] = None
    enzyme: Optional[str] = None
    maintenance_phi: Optional[float] = None

    def __post_init__(self):
        if self.kind not in REACTION_CLASSES:
            raise ModelError(f"reaction {self.id!r}: unknown class {self.kind!r}")
        object.__setattr__(self, "stoich", MappingProxyType(
            {k: float(v) for k, v in self.stoich.items()}))
        for name in ("kcat_fwd", "kcat_bwd"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ModelError(f"reaction {self.id!r}: {name} must be > 0")
        if self.enzyme is not None:
            if self.kcat_fwd is None:
                raise MissingKcat(f"reaction {self.id!r}: catalyzed but kcat_fwd missing")
            if self.reversible and self.kcat_bwd is None:
                raise MissingKcat(f"reaction {self.id!r}: reversible and catalyzed but kcat_bwd missing")
        phi = self.maintenance_phi
        if phi is not None and not 0 <= phi < 1:
            raise ModelError(f"reaction {self.id!r}: maintenance_phi must lie in [0, 1)")

    def __eq__(self, other):
        if not isinstance(other, Reaction):
            return NotImplemented
        return (self.id, self.kind, dict(self.stoich), self.reversible, self.kcat_fwd,
                self.kcat_bwd, self.enzyme, self.maintenance_phi) == (
            other.id, other.kind, dict(other.stoich), other.reversible, other.kcat_fwd,
            other.kcat_bwd, other.enzyme, other.maintenance_phi)

    __hash__ = None


@dataclass(frozen=True)
class CompositionRule:
    """Species ``species`` must make up at least ``fraction`` of total biomass."""

    species: str
    fraction: float

    def __post_init__(self):
        if not 0 <= self.fraction < 1:
            raise ModelError(f"composition rule for {self.species!r}: fraction must lie in [0, 1)")


class MetabolicModel:
    """Immutable metabolic network.

    Species and reactions are reordered stably into their class blocks
    (Y, X, C, P and exchange, metabolic, storage, biomass); declaration
    order is kept inside each block.
    """

    def __init__(self, species: Iterable[Species], reactions: Iterable[Reaction],
                 composition_rules: Iterable[CompositionRule] = (), name: str = "model"):
        species = list(species)
        reactions = list(reactions)
        self.name = name
        self.species = tuple(sorted(species, key=lambda s: SPECIES_CLASSES.index(s.kind)))
        self.reactions = tuple(sorted(reactions, key=lambda r: REACTION_CLASSES.index(r.kind)))
        self.composition_rules = tuple(composition_rules)
        self._validate()

        ids = [s.id for s in self.species]
        self.species_index = MappingProxyType({sid: i for i, sid in enumerate(ids)})
        self.reaction_index = MappingProxyType({r.id: j for j, r in enumerate(self.reactions)})
        counts = [sum(s.kind == k for s in self.species) for k in SPECIES_CLASSES]
        self.n_y, self.n_x, self.n_c, self.n_p = counts
        self.m_y, self.m_x, self.m_c, self.m_p = [
            sum(r.kind == k for r in self.reactions) for k in REACTION_CLASSES]
        bounds = np.cumsum([0] + counts)
        self.slices = {k: slice(int(bounds[i]), int(bounds[i + 1])) for i, k in enumerate(SPECIES_CLASSES)}

        acc = [s for s in self.species if s.accumulates]
        self.w = _readonly([s.mol_weight for s in acc])
        self.b = _readonly([s.obj_weight for s in acc])
        cat = {}
        for r in self.reactions:
            if r.enzyme is not None:
                cat.setdefault(r.enzyme, []).append(r.id)
        self.catalysis = MappingProxyType({k: tuple(v) for k, v in cat.items()})
        self._matrices = None

    def _validate(self):
        seen = set()
        for s in self.species:
            if s.id in seen:
                raise ModelError(f"duplicate species id {s.id!r}")
            seen.add(s.id)
        if not any(s.kind == MACROMOLECULE for s in self.species):
            raise ModelError("a model must contain at least one macromolecule")
        kinds = {s.id: s.kind for s in self.species}
        rseen = set()
        for r in self.reactions:
            if r.id in rseen:
                raise ModelError(f"duplicate reaction id {r.id!r}")
            rseen.add(r.id)
            for sid in r.stoich:
                if sid not in kinds:
                    raise UnknownSpeciesRef(f"reaction {r.id!r} references unknown species {sid!r}")
            if r.enzyme is not None:
                if r.enzyme not in kinds:
                    raise UnknownSpeciesRef(f"reaction {r.id!r} references unknown enzyme {r.enzyme!r}")
                if kinds[r.enzyme] != MACROMOLECULE:
                    raise ModelError(f"reaction {r.id!r}: enzyme {r.enzyme!r} is not a macromolecule")
            for sid, coef in r.stoich.items():
                if coef == 0:
                    continue
                if kinds[sid] == STORAGE and r.kind != STORAGE_RXN:
                    raise BlockViolation(
                        f"{r.kind} reaction {r.id!r} changes storage species {sid!r}")
                if kinds[sid] == MACROMOLECULE and r.kind != BIOMASS:
                    raise BlockViolation(
                        f"{r.kind} reaction {r.id!r} changes macromolecule {sid!r}")
        for rule in self.composition_rules:
            if rule.species not in kinds:
                raise UnknownSpeciesRef(f"composition rule references unknown species {rule.species!r}")
            if kinds[rule.species] not in (STORAGE, MACROMOLECULE):
                raise ModelError(f"composition rule species {rule.species!r} must be storage or macromolecule")

    # -- convenience -----------------------------------------------------

    def ids(self, kind: str) -> tuple:
        return tuple(s.id for s in self.species if s.kind == kind)

    @property
    def n(self) -> int:
        return len(self.species)

    @property
    def m(self) -> int:
        return len(self.reactions)

    @property
    def state_ids(self) -> tuple:
        """Ids of species carrying a state: Y, then C, then P."""
        return self.ids(EXTERNAL) + self.ids(STORAGE) + self.ids(MACROMOLECULE)

    @property
    def reaction_ids(self) -> tuple:
        return tuple(r.id for r in self.reactions)

    @property
    def matrices(self) -> "ConstraintMatrices":
        if self._matrices is None:
            self._matrices = assemble_matrices(self)
        return self._matrices

    def __eq__(self, other):
        if not isinstance(other, MetabolicModel):
            return NotImplemented
        return (self.species, self.reactions, self.composition_rules) == (
            other.species, other.reactions, other.composition_rules)

    __hash__ = None

    def __repr__(self):
        return (f"MetabolicModel({self.name!r}, species={self.n}, reactions={self.m}, "
                f"rules={len(self.composition_rules)})")


@dataclass(frozen=True, eq=False)
class ConstraintMatrices:
    """Dense matrices for one model.

    Attributes
    ----------
    S : (n, m) stoichiometric matrix; ``S_Y``, ``S_X``, ``S_C``, ``S_P`` are its row blocks.
    T : (m, m_split) map from split fluxes to net fluxes.
    split_labels : tuple of (reaction id, +1 or -1) per split column.
    H_c : (n_cap, m_split) capacity coefficients ``1/kcat``.
    H_e : (n_cap, n_p) enzyme filter; ``capacity_enzymes`` names the rows.
    H_b : (n_rules, n_c + n_p) composition rows.
    H_m : (n_maint, n_c + n_p) maintenance rows for reactions ``maintenance_reactions``.
    """

    S: np.ndarray
    S_Y: np.ndarray
    S_X: np.ndarray
    S_C: np.ndarray
    S_P: np.ndarray
    T: np.ndarray
    split_labels: tuple
    H_c: np.ndarray
    H_e: np.ndarray
    capacity_enzymes: tuple
    H_b: np.ndarray
    H_m: np.ndarray
    maintenance_reactions: tuple

    @property
    def m_split(self) -> int:
        return self.T.shape[1]


def assemble_matrices(model: MetabolicModel) -> ConstraintMatrices:
    """Build the stoichiometric and constraint matrices of ``model``."""
    n, m = model.n, model.m
    S = np.zeros((n, m))
    for j, r in enumerate(model.reactions):
        for sid, coef in r.stoich.items():
            S[model.species_index[sid], j] += coef
    sl = model.slices

    rev = [j for j, r in enumerate(model.reactions) if r.reversible]
    T = np.hstack([np.eye(m), -np.eye(m)[:, rev]])
    labels = tuple((r.id, 1) for r in model.reactions) + tuple((model.reactions[j].id, -1) for j in rev)
    split_col = {(rid, sgn): k for k, (rid, sgn) in enumerate(labels)}

    P_ids = model.ids(MACROMOLECULE)
    enzymes = tuple(p for p in P_ids if p in model.catalysis)
    H_c = np.zeros((len(enzymes), T.shape[1]))
    H_e = np.zeros((len(enzymes), len(P_ids)))
    for i, enz in enumerate(enzymes):
        H_e[i, P_ids.index(enz)] = 1.0
        for rid in model.catalysis[enz]:
            r = model.reactions[model.reaction_index[rid]]
            H_c[i, split_col[(rid, 1)]] = 1.0 / r.kcat_fwd
            if r.reversible:
                H_c[i, split_col[(rid, -1)]] = 1.0 / r.kcat_bwd

    acc_ids = model.ids(STORAGE) + P_ids
    H_b = np.zeros((len(model.composition_rules), len(acc_ids)))
    for i, rule in enumerate(model.composition_rules):
        H_b[i] = rule.fraction * model.w
        H_b[i, acc_ids.index(rule.species)] -= 1.0

    maint = tuple(j for j, r in enumerate(model.reactions) if r.maintenance_phi is not None)
    H_m = np.zeros((len(maint), len(acc_ids)))
    for i, j in enumerate(maint):
        H_m[i] = model.reactions[j].maintenance_phi * model.w

    return ConstraintMatrices(
        S=_readonly(S), S_Y=_readonly(S[sl[EXTERNAL]]), S_X=_readonly(S[sl[METABOLITE]]),
        S_C=_readonly(S[sl[STORAGE]]), S_P=_readonly(S[sl[MACROMOLECULE]]),
        T=_readonly(T), split_labels=labels, H_c=_readonly(H_c), H_e=_readonly(H_e),
        capacity_enzymes=enzymes, H_b=_readonly(H_b), H_m=_readonly(H_m),
        maintenance_reactions=maint)


@dataclass(frozen=True, eq=False)
class SystemState:
    """Amounts (mol) of external, storage and macromolecule species at ``time`` (h)."""

    time: float
    Y: np.ndarray
    C: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        for name in ("Y", "C", "P"):
            arr = _readonly(np.atleast_1d(getattr(self, name)).reshape(-1))
            object.__setattr__(self, name, arr)
            if np.any(~np.isfinite(arr)):
                raise ValueError(f"state block {name} has non-finite amounts")
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def from_amounts(cls, model: MetabolicModel, amounts: Mapping[str, float], time: float = 0.0):
        """Build a state from a species-id map; missing species default to 0."""
        for sid in amounts:
            if sid not in model.species_index:
                raise UnknownSpeciesRef(f"unknown species {sid!r} in state")
            if model.species[model.species_index[sid]].kind == METABOLITE:
                raise ValueError(f"metabolite {sid!r} carries no state")
        vals = {k: float(v) for k, v in amounts.items()}
        if any(v < 0 for v in vals.values()):
            raise ValueError("amounts must be nonnegative")
        get = lambda kind: [vals.get(s, 0.0) for s in model.ids(kind)]
        return cls(time, get(EXTERNAL), get(STORAGE), get(MACROMOLECULE))

    def amounts(self, model: MetabolicModel) -> dict:
        return dict(zip(model.state_ids, np.concatenate([self.Y, self.C, self.P]).tolist()))

    @property
    def CP(self) -> np.ndarray:
        return np.concatenate([self.C, self.P])

    def check(self, model: MetabolicModel) -> None:
        if (self.Y.size, self.C.size, self.P.size) != (model.n_y, model.n_c, model.n_p):
            raise DimensionMismatch(
                f"state sizes {(self.Y.size, self.C.size, self.P.size)} do not match "
                f"model blocks {(model.n_y, model.n_c, model.n_p)}")


def total_biomass(model: MetabolicModel, state: SystemState) -> float:
    """Molecular-weight biomass ``w_C @ C + w_P @ P`` in grams."""
    state.check(model)
    return float(model.w @ state.CP)


def objective_biomass(model: MetabolicModel, state: SystemState) -> float:
    """Objective-weight biomass ``b_C @ C + b_P @ P`` in grams."""
    state.check(model)
    return float(model.b @ state.CP)
