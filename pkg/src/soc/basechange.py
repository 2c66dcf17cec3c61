"""Strong monoidal functors as explicit matrix witnesses.

A functor handle acts on finite-dimensional spaces by keeping the dimension
and acting on coordinates by ``x -> S_n s(x)``, where ``s`` is either the
identity or complex conjugation (a field embedding of C into C) and ``S_n``
is an invertible change of basis.  A linear map ``m: C^n -> C^k`` becomes
``S_k s(m) S_n^-1``.  The monoidal witness ``F(X) (x) F(Y) (x) ... -> F(X (x) Y (x) ...)``
is ``S_N (S_x (x) S_y (x) ...)^-1`` and the unit witness is ``S_1``.  Every
transport goes through these witnesses explicitly, so a corrupted witness
shows up in the checks below instead of being silently bypassed.
"""
from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from math import prod

import numpy as np

from .algebra import PAlgebra, calculus_square_defect, poly_calculus, require_valid
from .errors import MissingDistinguished, NonRealData, SOCError, UnregisteredFunctor
from .linalg import DEFAULT_TOL, kron_all, poly_eval
from .operad import ColoredOperad, OperationSpace, Signature, validate_operad
from .spectral import analytic_spectrum, hochschild, operadic_spectrum, residue

REAL_TOL = 1e-12
CHECK_TOL = 1e-9
COND_LIMIT = 1e12


def _eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class FunctorHandle:
    """Executable strong monoidal endofunctor of finite-dimensional complex spaces."""

    name: str
    conjugate: bool = False
    real_only: bool = False
    basis: Callable[[int], np.ndarray] | None = None
    monoidal_override: Callable[[tuple], np.ndarray] | None = None
    unit_override: np.ndarray | None = None
    description: str = ""
    parts: tuple = field(default=())

    # object map -------------------------------------------------------------
    def scalar(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=np.complex128)
        if self.real_only and m.size and float(np.abs(m.imag).max()) >= REAL_TOL:
            raise NonRealData(f"{self.name}: data is not certified real")
        return m.conj() if self.conjugate else m.copy()

    def scalar_value(self, z) -> complex:
        return complex(self.scalar(np.array([[z]]))[0, 0])

    def basis_matrix(self, n: int) -> np.ndarray:
        if self.basis is None or n == 0:
            return _eye(n)
        return np.asarray(self.basis(n), dtype=np.complex128)

    def on_vector(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.complex128)
        return self.basis_matrix(v.shape[0]) @ self.scalar(v)

    def on_matrix(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=np.complex128)
        k, n = m.shape
        return self.basis_matrix(k) @ self.scalar(m) @ np.linalg.inv(self.basis_matrix(n)) if n else \
            np.zeros((k, 0), dtype=np.complex128)

    # witnesses --------------------------------------------------------------
    def monoidal_witness(self, dims: Sequence[int]) -> np.ndarray:
        """F(X1) (x) ... (x) F(Xk) -> F(X1 (x) ... (x) Xk) in coordinates."""
        dims = tuple(int(d) for d in dims)
        if self.monoidal_override is not None:
            return np.asarray(self.monoidal_override(dims), dtype=np.complex128)
        n = prod(dims)
        if n == 0:
            return _eye(0)
        parts = kron_all(self.basis_matrix(d) for d in dims)
        return self.basis_matrix(n) @ np.linalg.inv(parts)

    def unit_witness(self) -> np.ndarray:
        if self.unit_override is not None:
            return np.atleast_2d(np.asarray(self.unit_override, dtype=np.complex128))
        return self.basis_matrix(1)


_REGISTRY: dict = {}


def register(f: FunctorHandle) -> FunctorHandle:
    _REGISTRY[f.name] = f
    return f


def get_functor(name: str) -> FunctorHandle:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnregisteredFunctor(f"no functor registered as {name!r}") from None


def registered_names() -> list:
    return sorted(_REGISTRY)


def _require_registered(f: FunctorHandle) -> None:
    if _REGISTRY.get(f.name) is not f:
        raise UnregisteredFunctor(f"functor {f.name!r} is not registered")


def _shear(n: int) -> np.ndarray:
    return _eye(n) + 0.25 * np.eye(n, k=1)


IDENTITY = register(FunctorHandle("identity", description="identity functor"))
COMPLEXIFICATION = register(FunctorHandle(
    "complexification", real_only=True,
    description="extension of scalars along R -> C on data certified real"))
FIELD_EMBEDDING = register(FunctorHandle(
    "field_embedding", conjugate=True,
    description="scalar extension along the conjugation embedding C -> C"))
FORGETFUL = register(FunctorHandle(
    "forgetful", description="forgets extra structure; identity on the underlying data"))
REBASING = register(FunctorHandle(
    "rebasing", basis=_shear,
    description="identity functor presented through a fixed non-orthogonal basis change"))

BUILTIN_FUNCTORS = ("identity", "complexification", "field_embedding", "forgetful", "rebasing")


def compose(f: FunctorHandle, g: FunctorHandle, register_result: bool = True) -> FunctorHandle:
    """The composite ``g after f`` with witnesses composed from those of f and g."""
    if f.monoidal_override or g.monoidal_override or f.unit_override is not None \
            or g.unit_override is not None:
        raise ValueError("functors with overridden witnesses cannot be composed")

    def basis(n):
        return g.basis_matrix(n) @ g.scalar(f.basis_matrix(n)) if n else _eye(0)

    h = FunctorHandle(f"{g.name}∘{f.name}", conjugate=f.conjugate != g.conjugate,
                      real_only=f.real_only or g.real_only, basis=basis,
                      description=f"{g.name} after {f.name}", parts=(f.name, g.name))
    return register(h) if register_result else h


# ---------------------------------------------------------------------------
# transport

def transport_operad(p: ColoredOperad, f: FunctorHandle) -> ColoredOperad:
    """F*P: same labels, composition tables carried through the witnesses."""
    _require_registered(f)
    groups: dict = {}
    for (o, inner), res in p.composition.items():
        try:
            sig_o = p.signature_of(o)
            sigs = tuple(p.signature_of(i) for i in inner)
        except KeyError:
            continue
        groups.setdefault((sig_o, sigs), {})[(o, inner)] = res

    comp = {}
    for (sig_o, sigs), entries in groups.items():
        spaces = [p.space(sig_o)] + [p.space(s) for s in sigs]
        dims = [sp.dimension for sp in spaces]
        n = prod(dims)
        tuples = list(np.ndindex(*dims)) if n else []
        keys = [(spaces[0].basis[t[0]], tuple(sp.basis[i] for sp, i in zip(spaces[1:], t[1:])))
                for t in tuples]
        first = next(iter(entries))
        target = p.space(p.composite_signature(*first))
        gamma = np.zeros((target.dimension, n), dtype=np.complex128)
        known = np.zeros(n, dtype=bool)
        for j, key in enumerate(keys):
            if key in entries:
                known[j] = True
                for lab, v in entries[key].items():
                    if lab in target.basis:
                        gamma[target.basis.index(lab), j] = v
        w = f.monoidal_witness(dims)
        pre = np.linalg.inv(f.basis_matrix(n)) @ w
        new = f.basis_matrix(target.dimension) @ f.scalar(gamma) @ pre
        for j, key in enumerate(keys):
            support = np.abs(pre[:, j]) > 1e-14 * max(1.0, float(np.abs(pre).max()))
            if np.all(known[support]):
                comp[key] = {lab: complex(new[i, j]) for i, lab in enumerate(target.basis)
                             if abs(new[i, j]) > 1e-15}

    units = {}
    psi = f.unit_witness()
    for c, u in p.units.items():
        sp = p.space(Signature((c,), c))
        vec = np.array([[u.get(b, 0)] for b in sp.basis], dtype=np.complex128)
        img = f.basis_matrix(sp.dimension) @ f.scalar(vec) @ np.linalg.inv(f.basis_matrix(1)) @ psi
        units[c] = {b: complex(img[i, 0]) for i, b in enumerate(sp.basis) if abs(img[i, 0]) > 1e-15}

    acts = {}
    for (sig, perm), m in p.symmetric_actions.items():
        acts[(sig, perm)] = f.on_matrix(m)

    spaces = tuple(OperationSpace(sp.signature, sp.basis) for sp in p.spaces)
    name = f"{f.name}*{p.name}" if p.name else f.name
    return ColoredOperad(p.colors, spaces, comp, units, acts, name, dict(p.meta))


def _structure_block(a: PAlgebra, sig: Signature) -> np.ndarray:
    """All structure maps of ``sig`` side by side: P(sig) (x) inputs -> output."""
    labels = a.operad.space(sig).basis
    return np.hstack([a.structure[lab] for lab in labels])


def pushforward_algebra(a: PAlgebra, f: FunctorHandle) -> PAlgebra:
    """F(A) over F*P."""
    _require_registered(f)
    require_valid(a)
    fp = transport_operad(a.operad, f)
    structure = {}
    for sp in a.operad.spaces:
        sig = sp.signature
        if sp.dimension == 0:
            continue
        n_in = a.input_dim(sig)
        dims = [sp.dimension] + [a.dim(c) for c in sig.inputs]
        big = _structure_block(a, sig)
        n_out = a.dim(sig.output)
        if big.size:
            new = (f.basis_matrix(n_out) @ f.scalar(big) @ np.linalg.inv(f.basis_matrix(prod(dims)))
                   @ f.monoidal_witness(dims))
        else:
            new = np.zeros((n_out, prod(dims)), dtype=np.complex128)
        for j, lab in enumerate(sp.basis):
            structure[lab] = new[:, j * n_in:(j + 1) * n_in]
    dist = {c: (f.on_matrix(t) if t.size else t) for c, t in a.distinguished.items()}
    loop = None
    if a.loop_polynomial is not None:
        loop = tuple(f.scalar_value(v) for v in a.loop_polynomial)
    return PAlgebra(fp, a.components, structure, dist, loop, f"{f.name}*{a.name}" if a.name else "")


# ---------------------------------------------------------------------------
# reports

@dataclass
class CheckReport:
    check: str
    passed: bool
    dimensions: dict = field(default_factory=dict)
    max_deviation: float = 0.0
    details: list = field(default_factory=list)

    def to_json(self) -> dict:
        dev = self.max_deviation
        return {"check": self.check, "pass": bool(self.passed), "dimensions": dict(self.dimensions),
                "max_deviation": dev if np.isfinite(dev) else None, "details": list(self.details)}


class _Tracker:
    def __init__(self, name):
        self.report = CheckReport(name, True)

    def dev(self, label: str, value: float, tol: float = CHECK_TOL):
        value = float(value)
        self.report.max_deviation = max(self.report.max_deviation, value)
        if not value < tol:
            self.fail(f"{label}: deviation {value:.3e}")

    def invertible(self, label: str, m: np.ndarray):
        if m.shape[0] != m.shape[1]:
            self.fail(f"{label}: not square {m.shape}")
            return
        if m.size == 0:
            return
        cond = float(np.linalg.cond(m))
        if not np.isfinite(cond) or cond > COND_LIMIT:
            self.fail(f"{label}: not invertible (condition {cond:.3e})")

    def fail(self, msg: str):
        self.report.passed = False
        self.report.details.append(msg)

    def note(self, msg: str):
        self.report.details.append(msg)


def _rel(x: np.ndarray, scale: float = 1.0) -> float:
    if x.size == 0:
        return 0.0
    return float(np.linalg.norm(x)) / max(1.0, scale)


def _blockdiag(mats: Sequence[np.ndarray]) -> np.ndarray:
    r = sum(m.shape[0] for m in mats)
    c = sum(m.shape[1] for m in mats)
    out = np.zeros((r, c), dtype=np.complex128)
    i = j = 0
    for m in mats:
        out[i:i + m.shape[0], j:j + m.shape[1]] = m
        i += m.shape[0]
        j += m.shape[1]
    return out


def check_residue_transport(p: ColoredOperad, f: FunctorHandle) -> CheckReport:
    """F(O_res) against the residue of F*P, with the block isomorphism made explicit."""
    tr = _Tracker("residue_transport")
    try:
        fp = transport_operad(p, f)
    except SOCError as exc:
        tr.fail(f"transport failed: {exc}")
        return tr.report
    res, resf = residue(p), residue(fp)
    tr.report.dimensions = {"F(residue)": res.total_dimension, "residue(F*P)": resf.total_dimension}
    if res.total_dimension != resf.total_dimension:
        tr.fail("dimensions differ")
        return tr.report
    tr.invertible("unit witness", f.unit_witness())
    for c in p.colors:
        d = res.summands[c]
        if d:
            tr.invertible(f"monoidal witness on P({c};{c})^2", f.monoidal_witness((d, d)))
    big = f.basis_matrix(res.total_dimension)
    iso = _blockdiag([f.basis_matrix(res.summands[c]) for c in p.colors]) @ np.linalg.inv(big)
    tr.invertible("block isomorphism", iso)
    for c in p.colors:
        d = res.summands[c]
        if not d:
            continue
        f_inc = big @ f.scalar(res.inclusion(c)) @ np.linalg.inv(f.basis_matrix(d))
        tr.dev(f"inclusion of {c}", _rel(iso @ f_inc - resf.inclusion(c)))
        u = p.unit_vector(c)
        if u is not None:
            expect = f.on_vector(u)
            got = fp.unit_vector(c)
            tr.dev(f"unit of {c}", _rel(got - expect, float(np.linalg.norm(expect))))
    rep = validate_operad(fp)
    if validate_operad(p).ok and not rep.ok:
        tr.fail(f"F*P fails validation: {rep.violations[0].kind} at {rep.violations[0].where}")
    return tr.report


def _level_transport(a: PAlgebra, fa: PAlgebra, f: FunctorHandle, tr: _Tracker):
    """Cylinder map F(Bar0 (+) Bar1) -> Bar0(FA) (+) Bar1(FA), after scalars."""
    blocks0 = [f.basis_matrix(a.dim(c)) for c in a.operad.colors]
    blocks1 = []
    for sp in a.operad.spaces:
        if sp.dimension == 0:
            continue
        dims = [sp.dimension] + [a.dim(c) for c in sp.signature.inputs]
        n = prod(dims)
        w = f.monoidal_witness(dims)
        tr.invertible(f"monoidal witness for {sp.signature}", w)
        if n:
            blocks1.append(np.linalg.solve(w, f.basis_matrix(n)) if np.linalg.cond(w) < COND_LIMIT
                           else np.zeros((n, n)))
    t0 = _blockdiag(blocks0)
    t1 = _blockdiag(blocks1) if blocks1 else np.zeros((0, 0))
    return t0, t1


def _hochschild_iso(a, fa, f, tr):
    h, hf = hochschild(a), hochschild(fa)
    tr.report.dimensions.update({"F(Hoch)": h.dimension, "Hoch(F A)": hf.dimension})
    if h.dimension != hf.dimension:
        tr.fail("Hochschild dimensions differ")
    t0, t1 = _level_transport(a, fa, f, tr)
    d0, d0f = h.bar1.faces["d0"], hf.bar1.faces["d0"]
    scale = max(1.0, float(np.linalg.norm(d0)))
    tr.dev("face d0 commutes", _rel(d0f @ t1 - t0 @ f.scalar(d0), scale))
    tcyl = _blockdiag([t0, t1])
    g = h.generators
    qf = hf.projection
    if g.size:
        tr.dev("relations preserved", _rel(qf @ tcyl @ f.scalar(g), float(np.linalg.norm(g))))
    lift = np.linalg.pinv(h.projection) if h.projection.size else np.zeros((tcyl.shape[1], 0))
    m = qf @ tcyl @ f.scalar(lift)
    if h.projection.size:
        tr.dev("quotient map well defined",
               _rel(qf @ tcyl - m @ f.scalar(h.projection), float(np.linalg.norm(qf @ tcyl))))
    tr.invertible("induced Hochschild map", m)
    return h, hf, m


def check_hochschild_transport(a: PAlgebra, f: FunctorHandle) -> CheckReport:
    """F(Hoch A) against Hoch(F A) through level-wise witnesses."""
    tr = _Tracker("hochschild_transport")
    try:
        fa = pushforward_algebra(a, f)
        _hochschild_iso(a, fa, f, tr)
    except SOCError as exc:
        tr.fail(f"computation failed: {exc}")
    return tr.report


def check_spectrum_transport(a: PAlgebra, f: FunctorHandle) -> CheckReport:
    """Operadic spectrum of F(A) against F of the operadic spectrum of A."""
    tr = _Tracker("spectrum_transport")
    try:
        fa = pushforward_algebra(a, f)
        s, sf = operadic_spectrum(a), operadic_spectrum(fa)
    except SOCError as exc:
        tr.fail(f"computation failed: {exc}")
        return tr.report
    tr.report.dimensions = {"F(sigma)": s.total_dimension, "sigma(F A)": sf.total_dimension}
    if s.total_dimension != sf.total_dimension:
        tr.fail("total dimensions differ")
    _, _, mh = _hochschild_iso(a, fa, f, tr)
    tres = _blockdiag([f.basis_matrix(s.residue.summands[c]) for c in a.operad.colors])
    k = np.kron(mh, tres)
    qa, qf = s.balanced.projection, sf.balanced.projection
    g = s.balanced.relation_generators
    if g.size:
        tr.dev("balancing relations preserved", _rel(qf @ k @ f.scalar(g), float(np.linalg.norm(g))))
    ms = qf @ k @ f.scalar(s.balanced.lift()) if qa.size else np.zeros((qf.shape[0], 0))
    if qa.size:
        tr.dev("spectrum witnesses commute", _rel(qf @ k - ms @ f.scalar(qa), float(np.linalg.norm(qf @ k))))
    tr.invertible("induced spectrum map", ms)
    # the decomposition view must agree as well
    if s.decomposition.total != sf.decomposition.total:
        tr.fail("decomposition totals differ")
    return tr.report


def check_spectral_mapping(a: PAlgebra, coeffs: Sequence, tol: float = DEFAULT_TOL,
                           max_loop_length: int | None = None,
                           functor: FunctorHandle | None = None, seed: int = 0) -> CheckReport:
    """Analytic spectrum of p(A) against p applied to the analytic spectrum of A.

    With ``functor`` given, additionally compares F(p(A)) with p'(F(A)),
    where p' carries the coefficients through the functor's scalars.
    """
    missing = [c for c in a.operad.colors if c not in a.distinguished]
    if missing:
        raise MissingDistinguished(f"colors without distinguished endomorphism: {missing}")
    cs = tuple(complex(c) for c in coeffs) or (0j,)
    tr = _Tracker("spectral_mapping")
    fa = poly_calculus(a, cs)
    an = analytic_spectrum(a, max_loop_length, tol)
    fn = analytic_spectrum(fa, max_loop_length, tol)
    pmap = lambda z: poly_eval(cs, z)
    tr.report.dimensions = {"loops": len(an.loops), "union": len(an.union)}

    def compare(label, got, expect):
        d = got.distance(expect.with_tolerance(tol))
        if np.isfinite(d):
            tr.report.max_deviation = max(tr.report.max_deviation, d)
        if not got.matches(expect, tol):
            tr.fail(f"{label}: {got!r} vs {expect!r}")

    for c in a.operad.colors:
        compare(f"color {c}", fn.per_color[c], an.per_color[c].map(pmap))
    if len(fn.loops) != len(an.loops):
        tr.fail("loop sets differ")
    for la, lf in zip(an.loops, fn.loops):
        compare(f"loop {'→'.join(la.ops)}", lf.spectrum, la.spectrum.map(pmap))
    if not fn.union.set_equal(an.union.map(pmap).dedup(), tol):
        tr.fail("union differs")
    tr.dev("calculus square", calculus_square_defect(a, fa, cs, np.random.default_rng(seed)))

    if functor is not None:
        try:
            left = pushforward_algebra(fa, functor)
            right = poly_calculus(pushforward_algebra(a, functor), [functor.scalar_value(c) for c in cs])
            ln, rn = analytic_spectrum(left, max_loop_length, tol), analytic_spectrum(right, max_loop_length, tol)
            for c in a.operad.colors:
                compare(f"F commutes with calculus at {c}", ln.per_color[c], rn.per_color[c])
            for x, y in zip(ln.loops, rn.loops):
                compare("F commutes with calculus on loops", x.spectrum, y.spectrum)
        except SOCError as exc:
            tr.fail(f"base change failed: {exc}")
    return tr.report


def check_functor_coherence(f: FunctorHandle, dims: Sequence[int], tol: float = 1e-10) -> CheckReport:
    """Associativity and unit squares for the witnesses on spaces of the given dimensions."""
    tr = _Tracker("functor_coherence")
    x, y, z = (int(d) for d in dims)
    w = f.monoidal_witness
    lhs = w((x * y, z)) @ np.kron(w((x, y)), _eye(z))
    rhs = w((x, y * z)) @ np.kron(_eye(x), w((y, z)))
    tr.dev("associativity", _rel(lhs - rhs), tol)
    tr.dev("three-fold witness", _rel(lhs - w((x, y, z))), tol)
    psi = f.unit_witness()
    tr.dev("left unit", _rel(w((1, x)) @ np.kron(psi, _eye(x)) - _eye(x)), tol)
    tr.dev("right unit", _rel(w((x, 1)) @ np.kron(_eye(x), psi) - _eye(x)), tol)
    for d in (x, y, z, x * y * z):
        tr.invertible(f"witness on dims ({d},{d})", w((d, d)))
    return tr.report
