"""Algebras over colored operads.

A structure map for an operation with inputs ``(c1, ..., cn)`` and output
``c`` is a ``dim(A_c) x prod(dim(A_ci))`` matrix.  Columns follow the
lexicographic basis of ``A_c1 (x) ... (x) A_cn`` with the first slot most
significant, i.e. the ordering produced by ``numpy.kron``.
"""
from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from math import prod

import numpy as np

from .errors import DimensionMismatch, MissingDistinguished, ValidationFailure
from .linalg import (
    complex_from_json,
    complex_to_json,
    kron_all,
    matrix_from_json,
    matrix_to_json,
    poly_apply,
    poly_compose,
)
from .operad import (
    BUILTIN_OPERADS,
    ColoredOperad,
    Digraph,
    Signature,
    ValidationReport,
    _build,
    network_operad,
    operad_from_json,
    operad_to_json,
    pair_label,
)

MAP_TOL = 1e-10


def _frozen(a, shape=None) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {a.shape}")
    if shape is not None and a.shape != shape:
        raise DimensionMismatch(f"expected shape {shape}, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PAlgebra:
    operad: ColoredOperad
    components: Mapping
    structure: Mapping = field(default_factory=dict)
    distinguished: Mapping = field(default_factory=dict)
    loop_polynomial: tuple | None = None
    name: str = ""

    def __post_init__(self):
        p = self.operad
        comps = {}
        for c in p.colors:
            n = int(self.components.get(c, 0))
            if n < 0:
                raise DimensionMismatch(f"negative dimension for color {c}")
            comps[c] = n
        extra = set(map(str, self.components)) - set(p.colors)
        if extra:
            raise DimensionMismatch(f"components for unknown colors {sorted(extra)}")
        object.__setattr__(self, "components", comps)

        given = {str(k): v for k, v in dict(self.structure).items()}
        unknown = set(given) - {lab for lab, _ in p.basis_ops()}
        if unknown:
            raise DimensionMismatch(f"structure maps for unknown operations {sorted(unknown)}")
        maps = {}
        for lab, sig in p.basis_ops():
            shape = self.shape_of(sig)
            if lab in given:
                maps[lab] = _frozen(given[lab], shape)
            else:
                maps[lab] = _frozen(self._default_map(lab, sig), shape)
        object.__setattr__(self, "structure", maps)

        dist = {}
        for c, m in dict(self.distinguished).items():
            c = str(c)
            if c not in comps:
                raise DimensionMismatch(f"distinguished endomorphism for unknown color {c}")
            dist[c] = _frozen(m, (comps[c], comps[c]))
        object.__setattr__(self, "distinguished", dist)
        if self.loop_polynomial is not None:
            object.__setattr__(self, "loop_polynomial", tuple(complex(v) for v in self.loop_polynomial))

    def _default_map(self, lab, sig):
        # unit spaces spanned by a single label default to the identity
        shape = self.shape_of(sig)
        if sig.is_endo and self.operad.endo_dim(sig.output) == 1:
            u = self.operad.units.get(sig.output, {}).get(lab)
            if u:
                return np.eye(shape[0], dtype=np.complex128) / u
        return np.zeros(shape, dtype=np.complex128)

    def dim(self, color: str) -> int:
        return self.components[color]

    def input_dim(self, sig: Signature) -> int:
        return prod(self.components[c] for c in sig.inputs)

    def shape_of(self, sig: Signature) -> tuple:
        return (self.components[sig.output], self.input_dim(sig))

    def map_of(self, combo: Mapping, sig: Signature) -> np.ndarray:
        """Structure map of a linear combination of basis operations of ``sig``."""
        out = np.zeros(self.shape_of(sig), dtype=np.complex128)
        for lab, v in combo.items():
            if v:
                out = out + v * self.structure[lab]
        return out

    @property
    def total_dimension(self) -> int:
        return sum(self.components.values())

    def replace(self, **kw) -> PAlgebra:
        args = {"operad": self.operad, "components": self.components, "structure": self.structure,
                "distinguished": self.distinguished, "loop_polynomial": self.loop_polynomial,
                "name": self.name}
        args.update(kw)
        return PAlgebra(**args)


def _gap(a, b) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a - b))


def validate_algebra(a: PAlgebra) -> ValidationReport:
    """Unit, composition and equivariance compatibility, reported with Frobenius discrepancies."""
    p = a.operad
    rep = ValidationReport()
    for lab, sig in p.basis_ops():
        if a.structure[lab].shape != a.shape_of(sig):
            rep.add("shape", f"{lab}: {a.structure[lab].shape} vs {a.shape_of(sig)}")
    for c, u in p.units.items():
        sig = Signature((c,), c)
        try:
            m = a.map_of(u, sig)
        except KeyError:
            rep.add("unit", f"unit of {c} references unknown labels")
            continue
        gap = _gap(m, np.eye(a.dim(c)))
        if gap > MAP_TOL * max(1.0, np.sqrt(a.dim(c))):
            rep.add("unit", f"unit map of color {c}", gap)
    n = 0
    for (o, inner), res in p.composition.items():
        try:
            sig = p.composite_signature(o, inner)
            lhs = a.map_of(res, sig)
        except (KeyError, ValueError):
            rep.add("structure", f"{o}∘({','.join(inner)}) is malformed")
            continue
        rhs = a.structure[o] @ kron_all(a.structure[i] for i in inner)
        n += 1
        gap = _gap(lhs, rhs)
        if gap > MAP_TOL * max(1.0, float(np.linalg.norm(rhs))):
            rep.add("composition", f"{o}∘({','.join(inner)})", gap)
    rep.checked["composites"] = n
    for (sig, perm), m in p.symmetric_actions.items():
        # (phi.s)_A = phi_A composed with the permutation of tensor factors
        tgt = sig.permuted(perm)
        if m.shape != (p.dim(tgt), p.dim(sig)):
            continue
        pmat = tensor_permutation([a.dim(c) for c in tgt.inputs], perm)
        for j, lab in enumerate(p.space(sig).basis):
            image = {b: m[i, j] for i, b in enumerate(p.space(tgt).basis)}
            gap = _gap(a.map_of(image, tgt) @ pmat, a.structure[lab])
            if gap > MAP_TOL * max(1.0, float(np.linalg.norm(a.structure[lab]))):
                rep.add("equivariance", f"{lab} under {list(perm)}", gap)
    for c, t in a.distinguished.items():
        if t.shape != (a.dim(c), a.dim(c)):
            rep.add("shape", f"distinguished endomorphism of {c}")
    return rep


def tensor_permutation(target_dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Matrix sending the source tensor basis to the target ordering.

    Target slot ``i`` holds source slot ``perm[i]``; the source tensor is
    ``(x) source_dims`` with ``source_dims[perm[i]] = target_dims[i]``.
    """
    k = len(perm)
    src_dims = [0] * k
    for i, s in enumerate(perm):
        src_dims[s] = target_dims[i]
    n = prod(target_dims)
    out = np.zeros((n, n), dtype=np.complex128)
    for idx in itertools.product(*(range(d) for d in src_dims)):
        src = np.ravel_multi_index(idx, src_dims) if k else 0
        tgt = np.ravel_multi_index(tuple(idx[perm[i]] for i in range(k)), target_dims) if k else 0
        out[tgt, src] = 1
    return out


def require_valid(a: PAlgebra) -> None:
    rep = validate_algebra(a)
    if not rep.ok:
        raise ValidationFailure(f"algebra fails validation: {rep.violations[0].where}", rep)


# ---------------------------------------------------------------------------
# morphisms

@dataclass(frozen=True, eq=False)
class AlgebraMorphism:
    source: PAlgebra
    target: PAlgebra
    maps: Mapping

    def __post_init__(self):
        if self.source.operad is not self.target.operad:
            raise ValueError("morphisms need a common operad")
        maps = {}
        for c in self.source.operad.colors:
            maps[c] = _frozen(self.maps[c], (self.target.dim(c), self.source.dim(c)))
        object.__setattr__(self, "maps", maps)

    def defect(self) -> float:
        """Largest intertwining discrepancy over all basis operations."""
        worst = 0.0
        for lab, sig in self.source.operad.basis_ops():
            lhs = self.maps[sig.output] @ self.source.structure[lab]
            rhs = self.target.structure[lab] @ kron_all(self.maps[c] for c in sig.inputs)
            worst = max(worst, _gap(lhs, rhs))
        return worst

    def is_valid(self, tol: float = MAP_TOL) -> bool:
        return self.defect() < tol

    def then(self, other: AlgebraMorphism) -> AlgebraMorphism:
        """``other`` after ``self``."""
        if other.source is not self.target:
            raise ValueError("morphisms do not compose")
        return AlgebraMorphism(self.source, other.target,
                               {c: other.maps[c] @ self.maps[c] for c in self.maps})

    @classmethod
    def identity(cls, a: PAlgebra) -> AlgebraMorphism:
        return cls(a, a, {c: np.eye(n) for c, n in a.components.items()})


def conjugate(a: PAlgebra, g: Mapping) -> tuple:
    """Transport ``a`` along invertible maps ``g[c]``; returns (b, morphism a -> b)."""
    inv = {c: np.linalg.inv(g[c]) if a.dim(c) else np.zeros((0, 0)) for c in a.operad.colors}
    structure = {}
    for lab, sig in a.operad.basis_ops():
        structure[lab] = g[sig.output] @ a.structure[lab] @ kron_all(inv[c] for c in sig.inputs)
    dist = {c: g[c] @ t @ inv[c] for c, t in a.distinguished.items()}
    b = a.replace(structure=structure, distinguished=dist)
    return b, AlgebraMorphism(a, b, g)


# ---------------------------------------------------------------------------
# constructors

def trivial_algebra(endomorphism=None, dim: int | None = None) -> PAlgebra:
    """Algebra over the trivial operad; the endomorphism (if any) is the distinguished one."""
    from .operad import trivial_operad
    p = trivial_operad()
    if endomorphism is not None:
        t = np.array(endomorphism, dtype=np.complex128)
        return PAlgebra(p, {"*": t.shape[0]}, {}, {"*": t})
    return PAlgebra(p, {"*": int(dim or 1)})


def block_algebra(a11, a12, a21, a22) -> PAlgebra:
    """Algebra over the matrix-block operad realizing the operator [[a11, a12], [a21, a22]].

    ``a12`` (V2 -> V1) acts as ``alpha`` and ``a21`` (V1 -> V2) as ``beta``.
    The mixed binary operations project the first factor onto the all-ones
    covector and then apply the cross map: ``theta12(x, y) = (1.x) a12 y``.
    """
    from .operad import matrix_block_operad
    a11, a12, a21, a22 = (np.atleast_2d(np.array(m, dtype=np.complex128)) for m in (a11, a12, a21, a22))
    n1, n2 = a11.shape[0], a22.shape[0]
    if a11.shape != (n1, n1) or a22.shape != (n2, n2):
        raise DimensionMismatch("diagonal blocks must be square")
    if a12.shape != (n1, n2) or a21.shape != (n2, n1):
        raise DimensionMismatch(f"off-diagonal blocks must be {n1}x{n2} and {n2}x{n1}")
    structure = {
        "mu1": np.zeros((n1, n1 * n1)),
        "mu2": np.zeros((n2, n2 * n2)),
        "alpha": a12,
        "beta": a21,
        "theta12": np.kron(np.ones((1, n1)), a12),
        "theta21": np.kron(np.ones((1, n2)), a21),
    }
    return PAlgebra(matrix_block_operad(), {"1": n1, "2": n2}, structure,
                    {"1": a11, "2": a22}, name="block")


def block_operator(a: PAlgebra) -> np.ndarray:
    """Assemble the 2x2 block matrix of a matrix-block algebra (missing diagonals read as zero)."""
    n1, n2 = a.dim("1"), a.dim("2")
    a11 = a.distinguished.get("1", np.zeros((n1, n1)))
    a22 = a.distinguished.get("2", np.zeros((n2, n2)))
    return np.block([[a11, a.structure["alpha"]], [a.structure["beta"], a22]])


def network_algebra(graph: Digraph) -> PAlgebra:
    """One-dimensional components; every edge acts as multiplication by its weight.

    Converging edge pairs act by their pair weight (zero unless supplied).
    A self-loop becomes the distinguished endomorphism of its vertex.
    """
    p = network_operad(graph)
    structure = {}
    dist = {}
    for e in graph.edges:
        if e.is_loop:
            dist[e.source] = [[e.weight]]
        else:
            structure[e.label] = [[e.weight]]
    for e, f in graph.converging_pairs():
        structure[pair_label(e, f)] = [[graph.pair_weights.get((e.label, f.label), 0)]]
    return PAlgebra(p, {v: 1 for v in graph.vertices}, structure, dist, name="network")


def nogo_operad() -> ColoredOperad:
    """Two colors, units, and one mixed binary operation ``theta`` in P(1,2;1)."""
    return _build(["1", "2"], [(["1"], "1", ["id1"]), (["2"], "2", ["id2"]),
                               (["1", "2"], "1", ["theta"])], "nogo")


def nogo_witness_pair() -> tuple:
    """Two algebras with equal componentwise spectra that differ in how they couple.

    Both have components C^2 with identity distinguished endomorphisms.  In
    ``A`` the operation ``theta`` acts by zero; in ``B`` it is the
    projection x (x) y -> x.
    """
    p = nogo_operad()
    eye = np.eye(2)
    pi = np.kron(eye, np.ones((1, 2)))
    a = PAlgebra(p, {"1": 2, "2": 2}, {"theta": np.zeros((2, 4))}, {"1": eye, "2": eye}, name="nogo_A")
    b = PAlgebra(p, {"1": 2, "2": 2}, {"theta": pi}, {"1": eye, "2": eye}, name="nogo_B")
    return a, b


# ---------------------------------------------------------------------------
# polynomial calculus

def poly_calculus(a: PAlgebra, coeffs: Sequence) -> PAlgebra:
    """The algebra p(A) for a polynomial p.

    Distinguished endomorphisms become ``p(T_c)``.  Expanding the monomial
    rule ``phi(T^k1 x1, ..., T^kn xn) -> a_k1...a_kn phi(T^k1 x1, ...)``
    multilinearly gives ``phi_A(p(T1) x1, ..., p(Tn) xn)``, so on the
    evaluated inputs the structure maps of ``A`` are kept unchanged.  Loop
    composites are evaluated through ``p`` (composed with any earlier
    polynomial).
    """
    missing = [c for c in a.operad.colors if c not in a.distinguished]
    if missing:
        raise MissingDistinguished(f"colors without distinguished endomorphism: {missing}")
    require_valid(a)
    cs = tuple(complex(c) for c in coeffs) or (0j,)
    dist = {c: (poly_apply(t, cs) if t.size else t) for c, t in a.distinguished.items()}
    loop = cs if a.loop_polynomial is None else poly_compose(cs, a.loop_polynomial)
    return a.replace(distinguished=dist, loop_polynomial=loop)


def calculus_square_defect(a: PAlgebra, fa: PAlgebra, coeffs: Sequence, rng=None) -> float:
    """Largest relative gap between ``phi_{p(A)}(p(T)x ...)`` and the monomial expansion.

    The expansion sums ``a_k1...a_kn phi_A(T1^k1 x1, ..., Tn^kn xn)`` over all
    degree tuples, on one random vector per input slot.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    cs = [complex(c) for c in coeffs] or [0j]
    worst = 0.0
    for lab, sig in a.operad.basis_ops():
        xs = []
        for c in sig.inputs:
            n = a.dim(c)
            xs.append(rng.normal(size=n) + 1j * rng.normal(size=n))
        ts = [a.distinguished[c] for c in sig.inputs]
        evaluated = [fa.distinguished[c] @ x for c, x in zip(sig.inputs, xs)]
        lhs = fa.structure[lab] @ kron_all(v[:, None] for v in evaluated)
        powers = [[np.linalg.matrix_power(t, k) @ x for k in range(len(cs))] for t, x in zip(ts, xs)]
        rhs = np.zeros_like(lhs)
        for ks in itertools.product(range(len(cs)), repeat=len(xs)):
            w = prod((cs[k] for k in ks), start=1 + 0j)
            if w:
                rhs = rhs + w * (a.structure[lab] @ kron_all(powers[i][k][:, None] for i, k in enumerate(ks)))
        scale = max(1.0, float(np.linalg.norm(rhs)))
        worst = max(worst, float(np.linalg.norm(lhs - rhs)) / scale)
    return worst


# ---------------------------------------------------------------------------
# JSON

def algebra_to_json(a: PAlgebra, operad_ref: str | None = None) -> dict:
    out = {
        "operad_ref": operad_ref if operad_ref else operad_to_json(a.operad),
        "components": dict(a.components),
        "structure": {lab: matrix_to_json(m) for lab, m in a.structure.items() if m.size},
        "distinguished": {c: matrix_to_json(m) for c, m in a.distinguished.items() if m.size},
    }
    if a.loop_polynomial is not None:
        out["loop_polynomial"] = [complex_to_json(v) for v in a.loop_polynomial]
    if a.name:
        out["name"] = a.name
    return out


def resolve_operad(ref) -> ColoredOperad:
    if isinstance(ref, str):
        builders = dict(BUILTIN_OPERADS, nogo=nogo_operad)
        if ref not in builders:
            raise KeyError(f"unknown built-in operad {ref!r}")
        return builders[ref]()
    return operad_from_json(ref)


def algebra_from_json(d) -> PAlgebra:
    p = resolve_operad(d["operad_ref"])
    comps = {str(c): int(n) for c, n in d["components"].items()}
    structure = {lab: matrix_from_json(m) for lab, m in d.get("structure", {}).items()}
    dist = {c: matrix_from_json(m) for c, m in d.get("distinguished", {}).items()}
    loop = d.get("loop_polynomial")
    if loop is not None:
        loop = tuple(complex_from_json(v) for v in loop)
    return PAlgebra(p, comps, structure, dist, loop, d.get("name", ""))
