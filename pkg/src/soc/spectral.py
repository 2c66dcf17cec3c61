"""Residue, balanced tensor products, bar levels, Hochschild objects and spectra.

Realization of the bar object
-----------------------------
Level 0 of the bar object is the coproduct of the components ``A_c``; level 1
has one summand ``phi (x) A_c1 (x) ... (x) A_cn`` per basis operation.  Both
faces at level 1 apply the single operation, so ``d0 = d1``.

The Hochschild object is the reflexive coequalizer of the cylinder
``Bar0 (+) Bar1`` by two kinds of relations:

* a simplex on an endomorphism of a color (``P(c;c)``) is identified with
  its face ``phi_A(x)``; for the unit this is the degeneracy relation;
* a simplex on a *cross* operation (arity other than one, or distinct input
  and output colors) is kept modulo the kernel of its face, so it survives
  as a copy of ``im(phi_A)``.

The result is graded by output color, with
``dim Hoch_c = dim A_c + sum of rank(phi_A)`` over cross operations into c.
Balancing against the residue along the color idempotents then gives
``sum_c dim Hoch_c * dim P(c;c)``, which is what ``decompose`` predicts
from local terms plus images of interaction maps.
"""
from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraMorphism, PAlgebra, require_valid
from .errors import (
    DimensionMismatch,
    InconsistentDecomposition,
    IndexMismatch,
    MissingDistinguished,
    UnsupportedLevel,
)
from .linalg import (
    DEFAULT_TOL,
    SpectrumSet,
    eigenvalues,
    kron_all,
    nullspace,
    poly_apply,
    quotient_projection,
    rank,
)
from .operad import ColoredOperad, Signature

# ---------------------------------------------------------------------------
# residue

@dataclass(frozen=True, eq=False)
class ResidueObject:
    operad: ColoredOperad
    summands: Mapping
    total_dimension: int
    inclusion_offsets: Mapping

    def inclusion(self, color: str) -> np.ndarray:
        out = np.zeros((self.total_dimension, self.summands[color]), dtype=np.complex128)
        o = self.inclusion_offsets[color]
        out[o:o + self.summands[color], :] = np.eye(self.summands[color])
        return out

    def block_projector(self, color: str) -> np.ndarray:
        inc = self.inclusion(color)
        return inc @ inc.T

    def unit_vector(self, color: str) -> np.ndarray:
        """The unit of ``color`` placed in its block (zero when the block is zero)."""
        v = np.zeros(self.total_dimension, dtype=np.complex128)
        u = self.operad.unit_vector(color)
        if u is not None and u.size:
            o = self.inclusion_offsets[color]
            v[o:o + u.size] = u
        return v

    def to_json(self) -> dict:
        return {"summands": dict(self.summands), "total_dimension": self.total_dimension,
                "inclusion_offsets": dict(self.inclusion_offsets)}


def residue(p: ColoredOperad) -> ResidueObject:
    """Coproduct of the endomorphism spaces P(c;c)."""
    summands, offsets = {}, {}
    o = 0
    for c in p.colors:
        summands[c] = p.endo_dim(c)
        offsets[c] = o
        o += summands[c]
    return ResidueObject(p, summands, o, offsets)


def residue_universal_map(p: ColoredOperad, corrector: Mapping) -> np.ndarray:
    """The map out of the residue restricting to ``corrector[c]`` on each summand."""
    res = residue(p)
    rows = set()
    blocks = []
    for c in p.colors:
        d = res.summands[c]
        if c not in corrector:
            if d:
                raise DimensionMismatch(f"no corrector given for color {c}")
            continue
        m = np.atleast_2d(np.asarray(corrector[c], dtype=np.complex128))
        if m.shape[1] != d:
            raise DimensionMismatch(f"corrector for {c} has {m.shape[1]} columns, expected {d}")
        rows.add(m.shape[0])
    if len(rows) > 1:
        raise DimensionMismatch(f"corrector row counts differ: {sorted(rows)}")
    r = rows.pop() if rows else 0
    for c in p.colors:
        if c in corrector:
            blocks.append(np.atleast_2d(np.asarray(corrector[c], dtype=np.complex128)).reshape(r, -1))
    if not blocks:
        return np.zeros((r, 0), dtype=np.complex128)
    return np.hstack(blocks)


# ---------------------------------------------------------------------------
# balanced tensor product

@dataclass(frozen=True, eq=False)
class BalancedTensor:
    x_dim: int
    y_dim: int
    ambient_dimension: int
    relation_generators: np.ndarray
    quotient_dimension: int
    projection: np.ndarray

    def lift(self) -> np.ndarray:
        """A right inverse of the projection."""
        return np.linalg.pinv(self.projection)

    def to_json(self) -> dict:
        return {"ambient_dimension": self.ambient_dimension,
                "generator_count": int(self.relation_generators.shape[1]),
                "quotient_dimension": self.quotient_dimension}


def balanced_tensor(x_dim: int, y_dim: int, right_action: Sequence, left_action: Sequence) -> BalancedTensor:
    """Quotient of X (x) Y by (x.p) (x) y - x (x) (p.y) for every action index p."""
    if len(right_action) != len(left_action):
        raise IndexMismatch(f"{len(right_action)} right actions vs {len(left_action)} left actions")
    n = x_dim * y_dim
    gens = []
    for r, l in zip(right_action, left_action):
        r = np.asarray(r, dtype=np.complex128).reshape(x_dim, x_dim)
        l = np.asarray(l, dtype=np.complex128).reshape(y_dim, y_dim)
        gens.append(np.kron(r, np.eye(y_dim)) - np.kron(np.eye(x_dim), l))
    g = np.hstack(gens) if gens else np.zeros((n, 0), dtype=np.complex128)
    q = quotient_projection(g, n)
    return BalancedTensor(x_dim, y_dim, n, g, q.shape[0], q)


# ---------------------------------------------------------------------------
# bar levels and the Hochschild object

@dataclass(frozen=True)
class Summand:
    kind: str       # "vertex" or "op"
    key: str        # color or operation label
    color: str      # output color
    dim: int
    offset: int


@dataclass(frozen=True, eq=False)
class BarLevel:
    level: int
    summands: tuple
    dimension: int
    faces: Mapping = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"level": self.level, "dimension": self.dimension,
                "summands": [{"kind": s.kind, "key": s.key, "color": s.color, "dim": s.dim}
                             for s in self.summands]}


def _level0(a: PAlgebra) -> BarLevel:
    out, o = [], 0
    for c in a.operad.colors:
        out.append(Summand("vertex", c, c, a.dim(c), o))
        o += a.dim(c)
    return BarLevel(0, tuple(out), o)


def _level1(a: PAlgebra, b0: BarLevel) -> BarLevel:
    out, o = [], 0
    for lab, sig in a.operad.basis_ops():
        d = a.input_dim(sig)
        out.append(Summand("op", lab, sig.output, d, o))
        o += d
    face = np.zeros((b0.dimension, o), dtype=np.complex128)
    start = {s.key: s.offset for s in b0.summands}
    for s in out:
        r0 = start[s.color]
        face[r0:r0 + a.dim(s.color), s.offset:s.offset + s.dim] = a.structure[s.key]
    return BarLevel(1, tuple(out), o, {"d0": face, "d1": face.copy()})


def bar_level(a: PAlgebra, n: int) -> BarLevel:
    """Level ``n`` (0 or 1) of the bar object, with face matrices at level 1."""
    if n not in (0, 1):
        raise UnsupportedLevel(f"bar level {n} is not supported (only 0 and 1)")
    require_valid(a)
    b0 = _level0(a)
    return b0 if n == 0 else _level1(a, b0)


def is_cross(sig: Signature) -> bool:
    return not sig.is_endo


@dataclass(frozen=True, eq=False)
class HochschildObject:
    algebra: PAlgebra
    bar0: BarLevel
    bar1: BarLevel
    per_color: Mapping
    dimension: int
    generators: np.ndarray     # cylinder x k
    projection: np.ndarray     # dimension x cylinder
    row_colors: tuple          # color of each Hochschild coordinate

    @property
    def cylinder_dimension(self) -> int:
        return self.bar0.dimension + self.bar1.dimension

    def vertex_map(self) -> np.ndarray:
        """A = Bar0 -> Hoch."""
        return self.projection[:, :self.bar0.dimension]

    def color_projector(self, color: str) -> np.ndarray:
        return np.diag([1.0 if c == color else 0.0 for c in self.row_colors]).astype(np.complex128)

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "per_color": dict(self.per_color),
                "cylinder_dimension": self.cylinder_dimension}


def _relations(a: PAlgebra, b0: BarLevel, b1: BarLevel) -> dict:
    """Relation generators of the cylinder, grouped by color, as (indices, matrix)."""
    n0 = b0.dimension
    start0 = {s.key: s for s in b0.summands}
    out = {}
    for c in a.operad.colors:
        v = start0[c]
        idx = list(range(v.offset, v.offset + v.dim))
        cols = []
        for s in b1.summands:
            if s.color != c:
                continue
            local = len(idx)
            idx.extend(range(n0 + s.offset, n0 + s.offset + s.dim))
            sig = a.operad.signature_of(s.key)
            m = a.structure[s.key]
            if s.dim == 0:
                continue
            if not is_cross(sig):
                cols.append(("endo", local, -m, np.eye(s.dim)))
            else:
                k = nullspace(m) if m.shape[0] else np.eye(s.dim, dtype=np.complex128)
                cols.append(("cross", local, None, k))
        n = len(idx)
        blocks = []
        for kind, local, face, body in cols:
            g = np.zeros((n, body.shape[1]), dtype=np.complex128)
            g[local:local + body.shape[0], :] = body
            if kind == "endo":
                g[:v.dim, :] = face
            blocks.append(g)
        g = np.hstack(blocks) if blocks else np.zeros((n, 0), dtype=np.complex128)
        out[c] = (idx, g)
    return out


def hochschild(a: PAlgebra) -> HochschildObject:
    """Reflexive coequalizer realization of the 1-truncated bar object."""
    require_valid(a)
    b0 = _level0(a)
    b1 = _level1(a, b0)
    ncyl = b0.dimension + b1.dimension
    rels = _relations(a, b0, b1)
    rows, row_colors, per_color, gens = [], [], {}, []
    for c in a.operad.colors:
        idx, g = rels[c]
        q = quotient_projection(g, len(idx)) if idx else np.zeros((0, 0))
        per_color[c] = q.shape[0]
        full = np.zeros((q.shape[0], ncyl), dtype=np.complex128)
        full[:, idx] = q
        rows.append(full)
        row_colors.extend([c] * q.shape[0])
        gfull = np.zeros((ncyl, g.shape[1]), dtype=np.complex128)
        gfull[idx, :] = g
        gens.append(gfull)
    proj = np.vstack(rows) if rows else np.zeros((0, ncyl))
    gen = np.hstack(gens) if gens else np.zeros((ncyl, 0))
    return HochschildObject(a, b0, b1, per_color, proj.shape[0], gen, proj, tuple(row_colors))


# ---------------------------------------------------------------------------
# decomposition

@dataclass(frozen=True)
class InteractionRecord:
    op: str
    inputs: tuple
    output_color: str
    rank: int
    image_dim: int
    provenance: tuple
    flags: tuple = ()

    def to_json(self) -> dict:
        out = {"op": self.op, "inputs": list(self.inputs), "output_color": self.output_color,
               "rank": self.rank, "image_dim": self.image_dim, "provenance": list(self.provenance)}
        if self.flags:
            out["flags"] = list(self.flags)
        return out


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    local: Mapping
    cross: tuple
    cross_dimension: int
    local_dimension: int
    total: int

    def to_json(self) -> dict:
        return {
            "local": dict(self.local),
            "cross": [r.to_json() for r in self.cross],
            "totals": {"local": self.local_dimension, "cross": self.cross_dimension, "total": self.total},
        }


def decompose(a: PAlgebra) -> SpectralDecomposition:
    """Local summands A_c (x) P(c;c) plus images of the interaction maps."""
    require_valid(a)
    p = a.operad
    res = residue(p)
    local = {c: a.dim(c) * res.summands[c] for c in p.colors}
    pair_ops = set(p.meta.get("pair_ops", ()))
    cross = []
    for lab, sig in p.basis_ops():
        if not is_cross(sig):
            continue
        m = a.structure[lab]
        r = rank(m) if m.size else 0
        flags = ("pair weight is optional data",) if lab in pair_ops else ()
        prov = (f"{lab} in {sig}", f"rank {r} x dim P({sig.output};{sig.output}) = {res.summands[sig.output]}")
        cross.append(InteractionRecord(lab, sig.inputs, sig.output, r, r * res.summands[sig.output], prov, flags))
    cd = sum(r.image_dim for r in cross)
    ld = sum(local.values())
    return SpectralDecomposition(local, tuple(cross), cd, ld, ld + cd)


# ---------------------------------------------------------------------------
# operadic spectrum

@dataclass(frozen=True, eq=False)
class OperadicSpectrumObject:
    algebra: PAlgebra
    decomposition: SpectralDecomposition
    hochschild: HochschildObject
    residue: ResidueObject
    balanced: BalancedTensor
    witness: Mapping

    @property
    def total_dimension(self) -> int:
        return self.balanced.quotient_dimension

    @property
    def hochschild_dimension(self) -> int:
        return self.hochschild.dimension

    def to_json(self) -> dict:
        return {
            "total_dimension": self.total_dimension,
            "hochschild_dimension": self.hochschild_dimension,
            "hochschild_per_color": dict(self.hochschild.per_color),
            "residue": self.residue.to_json(),
            "balanced": self.balanced.to_json(),
            "decomposition": self.decomposition.to_json(),
        }


def color_actions(h: HochschildObject, res: ResidueObject) -> tuple:
    """Right action on Hoch and left action on the residue of each color idempotent."""
    colors = res.operad.colors
    right = [h.color_projector(c) for c in colors]
    left = [res.block_projector(c) for c in colors]
    return right, left


def recovery_witness(h: HochschildObject, res: ResidueObject, bal: BalancedTensor) -> np.ndarray:
    """x in A_c  ->  class of [x] (x) unit_c in the balanced tensor product."""
    vm = h.vertex_map()
    cols = []
    for s in h.bar0.summands:
        eta = res.unit_vector(s.key)[:, None]
        for j in range(s.dim):
            cols.append(np.kron(vm[:, s.offset + j][:, None], eta))
    if not cols:
        return np.zeros((bal.quotient_dimension, 0), dtype=np.complex128)
    return bal.projection @ np.hstack(cols)


def operadic_spectrum(a: PAlgebra) -> OperadicSpectrumObject:
    """Hoch(A) balanced against the residue, cross-checked against ``decompose``."""
    dec = decompose(a)
    h = hochschild(a)
    res = residue(a.operad)
    right, left = color_actions(h, res)
    bal = balanced_tensor(h.dimension, res.total_dimension, right, left)
    if bal.quotient_dimension != dec.total:
        raise InconsistentDecomposition(
            f"coequalizer path gives {bal.quotient_dimension}, decomposition gives {dec.total}")
    witness = {"hochschild": h.projection, "balanced": bal.projection,
               "recovery": recovery_witness(h, res, bal)}
    return OperadicSpectrumObject(a, dec, h, res, bal, witness)


def witness_quality(w: np.ndarray) -> tuple:
    """(condition number, residual of w @ inv(w) - I) for a square witness."""
    if w.shape[0] != w.shape[1]:
        return float("inf"), float("inf")
    if w.size == 0:
        return 1.0, 0.0
    cond = float(np.linalg.cond(w))
    if not np.isfinite(cond) or cond > 1e14:
        return float("inf"), float("inf")
    resid = float(np.linalg.norm(w @ np.linalg.inv(w) - np.eye(w.shape[0])))
    return cond, resid


def cylinder_transport(a: PAlgebra, b: PAlgebra, maps: Mapping) -> np.ndarray:
    """Map induced on cylinders by componentwise maps A_c -> B_c."""
    b0a, b0b = _level0(a), _level0(b)
    b1a, b1b = _level1(a, b0a), _level1(b, b0b)
    na, nb = b0a.dimension + b1a.dimension, b0b.dimension + b1b.dimension
    t = np.zeros((nb, na), dtype=np.complex128)
    for sa, sb in zip(b0a.summands, b0b.summands):
        t[sb.offset:sb.offset + sb.dim, sa.offset:sa.offset + sa.dim] = maps[sa.key]
    for sa, sb in zip(b1a.summands, b1b.summands):
        sig = a.operad.signature_of(sa.key)
        blk = kron_all(maps[c] for c in sig.inputs)
        t[b0b.dimension + sb.offset:b0b.dimension + sb.offset + sb.dim,
          b0a.dimension + sa.offset:b0a.dimension + sa.offset + sa.dim] = blk
    return t


@dataclass(frozen=True)
class InducedMap:
    hochschild: np.ndarray
    spectrum: np.ndarray
    defect: float


def induced_map(f: AlgebraMorphism) -> InducedMap:
    """Maps induced on Hoch and on the operadic spectrum by an algebra morphism.

    ``defect`` measures how far the cylinder map is from respecting the
    relations (zero for genuine morphisms).
    """
    sa, sb = operadic_spectrum(f.source), operadic_spectrum(f.target)
    t = cylinder_transport(f.source, f.target, f.maps)
    qa, qb = sa.hochschild.projection, sb.hochschild.projection
    ga = sa.hochschild.generators
    defect = float(np.linalg.norm(qb @ t @ ga)) if ga.size else 0.0
    mh = qb @ t @ np.linalg.pinv(qa) if qa.size else np.zeros((qb.shape[0], qa.shape[0]))
    d = sa.residue.total_dimension
    ms = sb.balanced.projection @ np.kron(mh, np.eye(d)) @ sa.balanced.lift()
    return InducedMap(mh, ms, defect)


# ---------------------------------------------------------------------------
# analytic realization

def naive_spectrum(a: PAlgebra, tol: float = DEFAULT_TOL) -> dict:
    """Componentwise spectra of the distinguished endomorphisms."""
    missing = [c for c in a.operad.colors if c not in a.distinguished]
    if missing:
        raise MissingDistinguished(f"colors without distinguished endomorphism: {missing}")
    return {c: _spec(a.distinguished[c], tol) for c in a.operad.colors}


def _spec(t: np.ndarray, tol: float) -> SpectrumSet:
    if t.size == 0:
        return SpectrumSet((), tol)
    return eigenvalues(t, tol)


@dataclass(frozen=True)
class LoopRecord:
    start: str
    ops: tuple          # labels in application order
    colors: tuple       # visited colors, start first
    spectrum: SpectrumSet

    def to_json(self) -> dict:
        return {"start": self.start, "ops": list(self.ops), "colors": list(self.colors),
                "spectrum": self.spectrum.to_json()}


@dataclass(frozen=True, eq=False)
class AnalyticSpectrum:
    per_color: Mapping
    loops: tuple
    interaction: SpectrumSet
    provenance: tuple           # (value, loop index) per interaction value
    union: SpectrumSet
    missing_distinguished: tuple = ()
    unrealized: tuple = ()

    def interaction_at(self, color: str) -> SpectrumSet:
        vals = [v for lp in self.loops if lp.start == color for v in lp.spectrum.values]
        return SpectrumSet(tuple(vals), self.interaction.tolerance)

    def to_json(self) -> dict:
        return {
            "per_color": {c: s.to_json() for c, s in self.per_color.items()},
            "interaction": self.interaction.to_json(),
            "provenance": [{"value": [v.real, v.imag], "loop": i} for v, i in self.provenance],
            "loops": [lp.to_json() for lp in self.loops],
            "union": self.union.to_json(),
            "missing_distinguished": list(self.missing_distinguished),
            "unrealized": list(self.unrealized),
        }


def cross_edges(a: PAlgebra) -> list:
    """Nonzero unary cross-color structure maps as (label, source, target)."""
    out = []
    for lab, sig in a.operad.basis_ops():
        if sig.arity == 1 and sig.inputs[0] != sig.output:
            m = a.structure[lab]
            if m.size and np.any(m != 0):
                out.append((lab, sig.inputs[0], sig.output))
    return out


def simple_loops(colors: Sequence[str], edges: Sequence[tuple], max_length: int) -> list:
    """Directed simple cycles up to ``max_length`` edges, one per rotation class.

    Each cycle starts at its color of smallest index; returns
    ``(start, [labels], [colors])`` tuples in a deterministic order.
    """
    order = {c: i for i, c in enumerate(colors)}
    out_edges: dict = {}
    for lab, s, t in edges:
        out_edges.setdefault(s, []).append((lab, t))
    found = []

    def walk(start, node, labels, path):
        for lab, t in out_edges.get(node, []):
            if t == start:
                found.append((start, tuple(labels + [lab]), tuple(path)))
            elif order[t] > order[start] and t not in path and len(labels) + 1 < max_length:
                walk(start, t, labels + [lab], path + [t])

    for c in colors:
        walk(c, c, [], [c])
    return found


def analytic_spectrum(a: PAlgebra, max_loop_length: int | None = None,
                      tol: float = DEFAULT_TOL) -> AnalyticSpectrum:
    """Per-color spectra plus spectra of loop composites of cross-color maps."""
    require_valid(a)
    p = a.operad
    if max_loop_length is None:
        max_loop_length = 2 * len(p.colors)
    if max_loop_length < 2:
        raise ValueError("max_loop_length must be at least 2")
    per_color = {c: (_spec(a.distinguished[c], tol) if c in a.distinguished else SpectrumSet((), tol))
                 for c in p.colors}
    missing = tuple(c for c in p.colors if c not in a.distinguished)

    loops = []
    for start, labels, path in simple_loops(p.colors, cross_edges(a), max_loop_length):
        if a.dim(start) == 0:
            continue
        comp = np.eye(a.dim(start), dtype=np.complex128)
        for lab in labels:
            comp = a.structure[lab] @ comp
        if a.loop_polynomial is not None:
            comp = poly_apply(comp, a.loop_polynomial)
        loops.append(LoopRecord(start, labels, path, eigenvalues(comp, tol)))

    distinct: list = []
    prov = []
    for i, lp in enumerate(loops):
        if any(lp.spectrum.matches(loops[j].spectrum) for j in distinct):
            continue
        distinct.append(i)
        prov.extend((v, i) for v in lp.spectrum.values)
    prov.sort(key=lambda t: (round(t[0].real, 12), round(t[0].imag, 12), t[1]))
    interaction = SpectrumSet(tuple(v for v, _ in prov), tol)

    allvals = tuple(v for s in per_color.values() for v in s.values) + interaction.values
    union = SpectrumSet(allvals, tol).dedup()

    unrealized = []
    for lab, sig in p.basis_ops():
        if sig.arity != 1:
            m = a.structure[lab]
            if m.size and np.any(m != 0):
                unrealized.append(lab)
    return AnalyticSpectrum(per_color, tuple(loops), interaction, tuple(prov), union,
                            missing, tuple(unrealized))
