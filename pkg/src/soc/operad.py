"""Finite colored operads over the complex numbers.

An operad is stored as a list of operation spaces, each carrying a basis of
symbolic labels.  Labels are unique across the whole operad, so a basis
label determines its signature.

Composition is a *partial* sparse table keyed by ``(outer, (inner, ...))``.
A recorded entry fixes the composite as a linear combination of basis
labels of the composite signature; an empty combination means the composite
is zero.  Keys that are not recorded are left underived: they impose no
constraint, which is how composites landing in signatures that are not
materialized (paths of length two in a network, iterated composites of
higher arity) are handled.  Composites with a unit are always recorded by
the built-in constructors.
"""
from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyGraph
from .linalg import (
    as_matrix,
    complex_from_json,
    complex_to_json,
    matrix_from_json,
    matrix_to_json,
)

COEFF_TOL = 1e-12
ASSOC_LIMIT = 100_000


@dataclass(frozen=True)
class Signature:
    inputs: tuple
    output: str

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(str(c) for c in self.inputs))
        object.__setattr__(self, "output", str(self.output))

    @property
    def arity(self) -> int:
        return len(self.inputs)

    @property
    def is_endo(self) -> bool:
        return self.arity == 1 and self.inputs[0] == self.output

    def permuted(self, perm: Sequence[int]) -> Signature:
        return Signature(tuple(self.inputs[i] for i in perm), self.output)

    def __str__(self):
        return f"P({','.join(self.inputs)};{self.output})"


@dataclass(frozen=True)
class OperationSpace:
    signature: Signature
    basis: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(str(b) for b in self.basis))
        if len(set(self.basis)) != len(self.basis):
            raise ValueError(f"duplicate basis labels in {self.signature}")

    @property
    def dimension(self) -> int:
        return len(self.basis)


Combination = Mapping[str, complex]


def _combo(d) -> dict:
    return {str(k): complex(v) for k, v in dict(d).items()}


@dataclass(frozen=True, eq=False)
class ColoredOperad:
    colors: tuple
    spaces: tuple
    composition: Mapping = field(default_factory=dict)
    units: Mapping = field(default_factory=dict)
    symmetric_actions: Mapping = field(default_factory=dict)
    name: str = ""
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        colors = tuple(str(c) for c in self.colors)
        if len(set(colors)) != len(colors):
            raise ValueError("color ids must be unique")
        object.__setattr__(self, "colors", colors)

        merged: dict = {}
        for sp in self.spaces:
            if sp.signature in merged:
                raise ValueError(f"signature {sp.signature} listed twice")
            merged[sp.signature] = sp
        object.__setattr__(self, "spaces", tuple(merged.values()))
        index = {}
        for sp in self.spaces:
            for lab in sp.basis:
                if lab in index:
                    raise ValueError(f"basis label {lab!r} used twice")
                index[lab] = sp.signature
        object.__setattr__(self, "_by_sig", merged)
        object.__setattr__(self, "_by_label", index)

        comp = {(str(o), tuple(str(i) for i in inner)): _combo(r)
                for (o, inner), r in dict(self.composition).items()}
        object.__setattr__(self, "composition", comp)
        object.__setattr__(self, "units", {str(c): _combo(u) for c, u in dict(self.units).items()})
        acts = {(sig, tuple(int(i) for i in perm)): as_matrix(m)
                for (sig, perm), m in dict(self.symmetric_actions).items()}
        object.__setattr__(self, "symmetric_actions", acts)

    # lookup ---------------------------------------------------------------
    def space(self, sig: Signature) -> OperationSpace:
        return self._by_sig.get(sig) or OperationSpace(sig, ())

    def dim(self, sig: Signature) -> int:
        return self.space(sig).dimension

    def endo_dim(self, color: str) -> int:
        return self.dim(Signature((color,), color))

    def signature_of(self, label: str) -> Signature:
        return self._by_label[label]

    def has_label(self, label: str) -> bool:
        return label in self._by_label

    def basis_ops(self) -> list:
        """All (label, signature) pairs in declaration order."""
        return [(lab, sp.signature) for sp in self.spaces for lab in sp.basis]

    def nonzero_spaces(self) -> list:
        return [sp for sp in self.spaces if sp.dimension > 0]

    def unit_vector(self, color: str) -> np.ndarray | None:
        u = self.units.get(color)
        if u is None:
            return None
        basis = self.space(Signature((color,), color)).basis
        return np.array([u.get(b, 0) for b in basis], dtype=np.complex128)

    # composition ----------------------------------------------------------
    def composite_signature(self, outer: str, inner: Sequence[str]) -> Signature:
        sig = self.signature_of(outer)
        if len(inner) != sig.arity:
            raise ValueError(f"{outer} has arity {sig.arity}, got {len(inner)} inputs")
        ins: list = []
        for slot, lab in zip(sig.inputs, inner):
            s = self.signature_of(lab)
            if s.output != slot:
                raise ValueError(f"{lab} outputs {s.output}, slot expects {slot}")
            ins.extend(s.inputs)
        return Signature(tuple(ins), sig.output)

    def compose_basis(self, outer: str, inner: Sequence[str]) -> dict | None:
        """Recorded composite of basis elements, or None when underived."""
        sig = self.signature_of(outer)
        if sig.arity == 0:
            return {outer: 1 + 0j}
        return self.composition.get((outer, tuple(inner)))

    def compose(self, outer: Combination, inner: Sequence[Combination]) -> dict | None:
        """Multilinear extension of ``compose_basis``; None if any needed entry is underived."""
        out: dict = {}
        for o, co in outer.items():
            if co == 0:
                continue
            arity = self.signature_of(o).arity
            if arity != len(inner):
                raise ValueError(f"{o} has arity {arity}, got {len(inner)} inputs")
            for combo in itertools.product(*(list(c.items()) for c in inner)):
                coeff = co
                for _, ci in combo:
                    coeff *= ci
                if coeff == 0:
                    continue
                r = self.compose_basis(o, tuple(lab for lab, _ in combo))
                if r is None:
                    return None
                for lab, v in r.items():
                    out[lab] = out.get(lab, 0) + coeff * v
        return out


def unit_composites(ops: Iterable[tuple], unit_label: Mapping[str, str]) -> dict:
    """Table entries phi o (units) = phi and unit o phi = phi for basis units."""
    table = {}
    for lab, sig in ops:
        if all(c in unit_label for c in sig.inputs) and sig.arity > 0:
            table[(lab, tuple(unit_label[c] for c in sig.inputs))] = {lab: 1}
        if sig.output in unit_label:
            table[(unit_label[sig.output], (lab,))] = {lab: 1}
    return table


def _build(colors, spaces, name, extra_comp=None, meta=None) -> ColoredOperad:
    spaces = [OperationSpace(Signature(tuple(i), o), tuple(b)) for i, o, b in spaces]
    units = {}
    unit_label = {}
    for sp in spaces:
        if sp.signature.is_endo and sp.dimension:
            unit_label[sp.signature.output] = sp.basis[0]
            units[sp.signature.output] = {sp.basis[0]: 1}
    ops = [(lab, sp.signature) for sp in spaces for lab in sp.basis]
    comp = unit_composites(ops, unit_label)
    comp.update(extra_comp or {})
    return ColoredOperad(tuple(colors), tuple(spaces), comp, units, {}, name, meta or {})


def trivial_operad() -> ColoredOperad:
    """One color ``*`` whose only operation is the unit."""
    return _build(["*"], [(["*"], "*", ["id"])], "trivial")


def matrix_block_operad() -> ColoredOperad:
    """Two colors with diagonal, binary and cross-color unary operations.

    Spaces (each one-dimensional): the units ``id1``, ``id2``; the
    same-color products ``mu1`` in P(1,1;1) and ``mu2`` in P(2,2;2); the
    mixed products ``theta12`` in P(1,2;1) and ``theta21`` in P(2,1;2); and
    the cross-color maps ``alpha`` in P(2;1) and ``beta`` in P(1;2).
    """
    spaces = [
        (["1"], "1", ["id1"]),
        (["2"], "2", ["id2"]),
        (["1", "1"], "1", ["mu1"]),
        (["2", "2"], "2", ["mu2"]),
        (["1", "2"], "1", ["theta12"]),
        (["2", "1"], "2", ["theta21"]),
        (["2"], "1", ["alpha"]),
        (["1"], "2", ["beta"]),
    ]
    return _build(["1", "2"], spaces, "matrix_block")


# ---------------------------------------------------------------------------
# weighted digraphs

@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    weight: complex = 1.0
    label: str = ""

    @property
    def is_loop(self) -> bool:
        return self.source == self.target


@dataclass(frozen=True, eq=False)
class Digraph:
    vertices: tuple
    edges: tuple = ()
    pair_weights: Mapping = field(default_factory=dict)

    def __post_init__(self):
        verts = tuple(str(v) for v in self.vertices)
        if len(set(verts)) != len(verts):
            raise ValueError("vertex ids must be unique")
        edges = []
        for i, e in enumerate(self.edges):
            e = Edge(str(e.source), str(e.target), complex(e.weight), e.label or f"e{i}")
            if e.source not in verts or e.target not in verts:
                raise ValueError(f"edge {e.label} references an unknown vertex")
            edges.append(e)
        labels = [e.label for e in edges]
        if len(set(labels)) != len(labels):
            raise ValueError("edge labels must be unique")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "pair_weights",
                           {(str(a), str(b)): complex(w) for (a, b), w in dict(self.pair_weights).items()})

    def converging_pairs(self) -> list:
        """Unordered pairs of distinct non-loop edges sharing a target, in edge order."""
        plain = [e for e in self.edges if not e.is_loop]
        return [(e, f) for e, f in itertools.combinations(plain, 2) if e.target == f.target]

    @classmethod
    def from_json(cls, d) -> Digraph:
        edges = [Edge(e["from"], e["to"], complex_from_json(e.get("weight", [1.0, 0.0])), e.get("label", ""))
                 for e in d.get("edges", [])]
        pw = {(p["edges"][0], p["edges"][1]): complex_from_json(p["weight"])
              for p in d.get("pair_weights", [])}
        return cls(tuple(d["vertices"]), tuple(edges), pw)

    def to_json(self) -> dict:
        out = {
            "vertices": list(self.vertices),
            "edges": [{"from": e.source, "to": e.target, "weight": complex_to_json(e.weight),
                       "label": e.label} for e in self.edges],
        }
        if self.pair_weights:
            out["pair_weights"] = [{"edges": [a, b], "weight": complex_to_json(w)}
                                   for (a, b), w in sorted(self.pair_weights.items())]
        return out


def pair_label(e: Edge, f: Edge) -> str:
    return f"theta_{e.label}_{f.label}"


def network_operad(graph: Digraph) -> ColoredOperad:
    """Path operad of a weighted digraph.

    Each vertex is a color with ``P(v;v)`` spanned by its identity ``id_v``.
    Each edge ``u -> v`` with ``u != v`` is a basis element of ``P(u;v)`` and
    each unordered pair of distinct edges converging on a vertex spans a
    binary operation.  Self-loops are not operations; the algebra
    constructor turns them into distinguished endomorphisms.
    """
    if not graph.vertices:
        raise EmptyGraph("graph has no vertices")
    loops: dict = {}
    for e in graph.edges:
        if e.is_loop:
            if e.source in loops:
                raise ValueError(f"vertex {e.source} has more than one self-loop")
            loops[e.source] = e.label
    grouped: dict = {}
    for v in graph.vertices:
        grouped[((v,), v)] = [f"id_{v}"]
    for e in graph.edges:
        if not e.is_loop:
            grouped.setdefault(((e.source,), e.target), []).append(e.label)
    for e, f in graph.converging_pairs():
        grouped.setdefault(((e.source, f.source), e.target), []).append(pair_label(e, f))
    spaces = [(list(i), o, b) for (i, o), b in grouped.items()]
    meta = {"self_loops": loops, "pair_ops": [pair_label(e, f) for e, f in graph.converging_pairs()]}
    return _build(graph.vertices, spaces, "network", meta=meta)


def cycle_signature(p: ColoredOperad, labels: Sequence[str]) -> Signature:
    """Signature of the composite of unary operations applied in ``labels`` order."""
    sig = p.signature_of(labels[0])
    for lab in labels[1:]:
        nxt = p.signature_of(lab)
        if nxt.arity != 1 or sig.arity != 1 or nxt.inputs[0] != sig.output:
            raise ValueError(f"{lab} does not compose after {sig}")
        sig = Signature(sig.inputs, nxt.output)
    return sig


# ---------------------------------------------------------------------------
# validation

@dataclass
class Violation:
    kind: str
    where: str
    discrepancy: float

    def to_json(self) -> dict:
        return {"kind": self.kind, "where": self.where, "discrepancy": self.discrepancy}


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    checked: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self):
        return len(self.violations)

    def add(self, kind, where, discrepancy=float("inf")):
        self.violations.append(Violation(kind, where, float(discrepancy)))

    def to_json(self) -> dict:
        return {
            "valid": self.ok,
            "violations": [v.to_json() for v in self.violations],
            "warnings": list(self.warnings),
            "checked": dict(self.checked),
        }


def _combo_gap(a: Mapping, b: Mapping) -> float:
    keys = set(a) | set(b)
    return max((abs(a.get(k, 0) - b.get(k, 0)) for k in keys), default=0.0)


def validate_operad(p: ColoredOperad) -> ValidationReport:
    """Check structure, units, associativity of recorded entries and supplied symmetric actions."""
    rep = ValidationReport()
    colors = set(p.colors)

    for sp in p.spaces:
        bad = [c for c in (*sp.signature.inputs, sp.signature.output) if c not in colors]
        if bad:
            rep.add("structure", f"{sp.signature} uses unknown colors {bad}")

    # composition table well-formedness
    for (o, inner), res in p.composition.items():
        where = f"{o}∘({','.join(inner)})"
        if not p.has_label(o) or not all(p.has_label(i) for i in inner):
            rep.add("structure", f"{where}: unknown label")
            continue
        try:
            sig = p.composite_signature(o, inner)
        except ValueError as exc:
            rep.add("structure", f"{where}: {exc}")
            continue
        allowed = set(p.space(sig).basis)
        stray = [lab for lab, v in res.items() if v != 0 and lab not in allowed]
        if stray:
            rep.add("structure", f"{where}: result labels {stray} not in {sig}")

    # units
    for c in p.colors:
        u = p.units.get(c)
        d = p.endo_dim(c)
        if u is None:
            if d:
                rep.add("unit", f"color {c} has P({c};{c}) of dim {d} but no unit")
            continue
        allowed = set(p.space(Signature((c,), c)).basis)
        if any(lab not in allowed for lab in u):
            rep.add("unit", f"unit of {c} is not in P({c};{c})")
    n_unit = 0
    for lab, sig in p.basis_ops():
        e = {lab: 1}
        if sig.arity and all(c in p.units for c in sig.inputs):
            r = p.compose(e, [p.units[c] for c in sig.inputs])
            n_unit += 1
            if r is None:
                rep.add("unit", f"{lab}∘(units) is not recorded")
            else:
                gap = _combo_gap(r, e)
                if gap > COEFF_TOL:
                    rep.add("unit", f"{lab}∘(units)", gap)
        elif sig.arity:
            rep.warnings.append(f"{lab}: an input color has no unit; right unit law unchecked")
        if sig.output in p.units:
            try:
                r = p.compose(p.units[sig.output], [e])
            except (KeyError, ValueError):
                continue  # malformed unit, already reported
            n_unit += 1
            if r is None:
                rep.add("unit", f"unit∘{lab} is not recorded")
            else:
                gap = _combo_gap(r, e)
                if gap > COEFF_TOL:
                    rep.add("unit", f"unit∘{lab}", gap)
    rep.checked["unit_pairs"] = n_unit

    _check_associativity(p, rep)
    _check_actions(p, rep)
    return rep


def _assoc_candidates(p: ColoredOperad):
    by_outer: dict = {}
    for (o, inner), res in p.composition.items():
        by_outer.setdefault(o, []).append((inner, res))
    return by_outer


def _check_associativity(p: ColoredOperad, rep: ValidationReport) -> None:
    by_outer = _assoc_candidates(p)
    triples = []
    for (o, inner), res in p.composition.items():
        if not p.has_label(o) or not all(p.has_label(i) for i in inner):
            continue
        groups = []
        for psi in inner:
            if p.signature_of(psi).arity == 0:
                groups.append([((), {psi: 1})])
            else:
                groups.append(by_outer.get(psi, []))
        for choice in itertools.product(*groups):
            triples.append((o, inner, res, choice))
            if len(triples) > 10 * ASSOC_LIMIT:
                break
    if len(triples) > ASSOC_LIMIT:
        rep.warnings.append(f"associativity: sampled {ASSOC_LIMIT} of {len(triples)} triples")
        triples = random.Random(0).sample(triples, ASSOC_LIMIT)
    checked = skipped = 0
    for o, inner, res, choice in triples:
        flat = tuple(lab for chi, _ in choice for lab in chi)
        try:
            lhs = p.compose(res, [{lab: 1} for lab in flat])
            rhs = p.compose({o: 1}, [dict(r) for _, r in choice])
        except (KeyError, ValueError):
            continue  # malformed entry, already reported

        if lhs is None or rhs is None:
            skipped += 1
            continue
        checked += 1
        gap = _combo_gap(lhs, rhs)
        if gap > COEFF_TOL:
            rep.add("associativity", f"{o}∘({','.join(inner)})∘({','.join(flat)})", gap)
    rep.checked["associativity_triples"] = checked
    rep.checked["associativity_underived"] = skipped


def _check_actions(p: ColoredOperad, rep: ValidationReport) -> None:
    acts = p.symmetric_actions
    for (sig, perm), m in acts.items():
        where = f"{sig} under {list(perm)}"
        if sorted(perm) != list(range(sig.arity)):
            rep.add("equivariance", f"{where}: not a permutation")
            continue
        tgt = sig.permuted(perm)
        if m.shape != (p.dim(tgt), p.dim(sig)):
            rep.add("equivariance", f"{where}: matrix shape {m.shape}")
            continue
        if list(perm) == list(range(sig.arity)):
            gap = float(np.abs(m - np.eye(m.shape[0])).max()) if m.size else 0.0
            if gap > COEFF_TOL:
                rep.add("equivariance", f"{where}: identity acts nontrivially", gap)
        # homomorphism on supplied generators: act(q) act(perm) = act(perm then q)
        for (sig2, q), m2 in acts.items():
            if sig2 != tgt or len(q) != len(perm):
                continue
            both = tuple(perm[i] for i in q)
            m3 = acts.get((sig, both))
            if m3 is None or m2.shape[1] != m.shape[0]:
                continue
            gap = float(np.abs(m2 @ m - m3).max()) if m3.size else 0.0
            if gap > COEFF_TOL:
                rep.add("equivariance", f"{where} then {list(q)}", gap)


# ---------------------------------------------------------------------------
# JSON

def operad_to_json(p: ColoredOperad) -> dict:
    out = {
        "colors": list(p.colors),
        "spaces": [{"inputs": list(sp.signature.inputs), "output": sp.signature.output,
                    "basis": list(sp.basis)} for sp in p.spaces],
        "composition": [
            {"outer": o, "inner": list(inner),
             "result": [{"label": lab, "coeff": complex_to_json(v)} for lab, v in res.items()]}
            for (o, inner), res in p.composition.items()
        ],
        "units": {c: [{"label": lab, "coeff": complex_to_json(v)} for lab, v in u.items()]
                  for c, u in p.units.items()},
    }
    if p.symmetric_actions:
        out["symmetric_actions"] = [
            {"inputs": list(sig.inputs), "output": sig.output, "perm": list(perm),
             "matrix": matrix_to_json(m)}
            for (sig, perm), m in p.symmetric_actions.items()
        ]
    if p.name:
        out["name"] = p.name
    return out


def _combo_from_json(v) -> dict:
    if isinstance(v, str):
        return {v: 1}
    return {e["label"]: complex_from_json(e.get("coeff", [1.0, 0.0])) for e in v}


def operad_from_json(d) -> ColoredOperad:
    spaces = tuple(OperationSpace(Signature(tuple(s["inputs"]), s["output"]), tuple(s.get("basis", ())))
                   for s in d.get("spaces", []))
    comp = {(c["outer"], tuple(c["inner"])): _combo_from_json(c.get("result", []))
            for c in d.get("composition", [])}
    units = {c: _combo_from_json(u) for c, u in d.get("units", {}).items()}
    acts = {(Signature(tuple(a["inputs"]), a["output"]), tuple(a["perm"])): matrix_from_json(a["matrix"])
            for a in d.get("symmetric_actions", [])}
    return ColoredOperad(tuple(d["colors"]), spaces, comp, units, acts, d.get("name", ""))


BUILTIN_OPERADS = {
    "trivial": trivial_operad,
    "matrix_block": matrix_block_operad,
}


def pushforward_operad(p: ColoredOperad, f) -> ColoredOperad:
    """Transport ``p`` along a registered functor; see :mod:`soc.basechange`."""
    from .basechange import transport_operad
    return transport_operad(p, f)
