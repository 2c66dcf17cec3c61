"""Dense complex linear algebra: eigenvalues, resolvents, functional calculus.

The eigensolver is a self-contained complex Schur decomposition (Householder
reduction to Hessenberg form followed by single-shift QR sweeps with
Wilkinson shifts).  Matrix functions use the block Schur-Parlett scheme:
eigenvalues are clustered, the Schur form is reordered so every cluster is
contiguous, diagonal blocks are evaluated by a trapezoidal Cauchy integral on
a circle around the cluster and off-diagonal blocks come from the block
Parlett recurrence (one Sylvester solve per block pair).

Matrices are plain ``numpy`` arrays of dtype ``complex128``.
"""
from __future__ import annotations

import cmath
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter

import numpy as np
from scipy.linalg import solve_sylvester, solve_triangular
from scipy.optimize import linear_sum_assignment

from .errors import ConvergenceFailure, DomainViolation, NonSquare, SpectralPoint

EPS = np.finfo(float).eps
DEFAULT_TOL = 1e-8
# Pivot threshold for Gaussian elimination, relative to the largest entry.
RANK_TOL = 1e-10
# Eigenvalues closer than this land in the same Schur-Parlett cluster.
CLUSTER_DELTA = 0.1


# ---------------------------------------------------------------------------
# validation and serialization

def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a fresh 2-d complex128 array, rejecting empty or non-finite input."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim == 1 and a.size == 0:
        raise ValueError(f"{name}: empty matrix")
    if a.ndim != 2:
        raise ValueError(f"{name}: expected a 2-d array, got shape {a.shape}")
    if a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError(f"{name}: 0-sized matrices are not allowed")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name}: entries must be finite")
    return a


def as_square(m, name: str = "matrix") -> np.ndarray:
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"{name}: shape {a.shape} is not square")
    return a


def frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


def complex_to_json(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_from_json(v) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ValueError(f"expected [re, im], got {v!r}")


def matrix_to_json(m) -> dict:
    a = np.asarray(m, dtype=np.complex128)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [complex_to_json(z) for z in a.ravel()],
    }


def matrix_from_json(d) -> np.ndarray:
    rows, cols, entries = int(d["rows"]), int(d["cols"]), d["entries"]
    if len(entries) != rows * cols:
        raise ValueError(f"matrix has {len(entries)} entries, expected {rows}x{cols}")
    data = [complex_from_json(e) for e in entries]
    return as_matrix(np.array(data, dtype=np.complex128).reshape(rows, cols))


# ---------------------------------------------------------------------------
# spectrum sets

def _sort_key(z: complex):
    return (round(z.real, 12), round(z.imag, 12), z.real, z.imag)


@dataclass(frozen=True, eq=False)
class SpectrumSet:
    """Finite multiset of complex numbers compared up to an absolute tolerance.

    Equality is a perfect matching in which matched values lie within
    ``tolerance`` of each other.  The matching is built greedily (nearest
    unused neighbour, after sorting by real then imaginary part); when the
    greedy pass fails and ``fallback`` is on, an optimal assignment decides.
    """

    values: tuple = ()
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        vals = tuple(sorted((complex(v) for v in self.values), key=_sort_key))
        if not all(cmath.isfinite(v) for v in vals):
            raise ValueError("spectrum values must be finite")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __repr__(self):
        body = ", ".join(_fmt(v) for v in self.values)
        return f"SpectrumSet({{{body}}}, tol={self.tolerance:g})"

    def __eq__(self, other):
        if not isinstance(other, SpectrumSet):
            return NotImplemented
        return self.matches(other)

    __hash__ = None

    def _tol(self, other, tol):
        if tol is not None:
            return tol
        return max(self.tolerance, other.tolerance)

    def matches(self, other: SpectrumSet, tol: float | None = None,
                fallback: bool = True) -> bool:
        """Multiset equality within tolerance."""
        if len(self) != len(other):
            return False
        return _match(self.values, other.values, self._tol(other, tol), fallback)

    def contains(self, other: SpectrumSet, tol: float | None = None,
                 fallback: bool = True) -> bool:
        """True when ``other`` embeds into ``self`` as a sub-multiset."""
        if len(other) > len(self):
            return False
        return _match(other.values, self.values, self._tol(other, tol), fallback)

    def distance(self, other: SpectrumSet) -> float:
        """Largest matched distance under the optimal assignment (inf if sizes differ)."""
        if len(self) != len(other):
            return math.inf
        if not self.values:
            return 0.0
        cost = np.abs(np.subtract.outer(np.array(self.values), np.array(other.values)))
        r, c = linear_sum_assignment(cost)
        return float(cost[r, c].max())

    def dedup(self) -> SpectrumSet:
        """Collapse values within tolerance of an already kept value."""
        kept: list[complex] = []
        for v in self.values:
            if not any(abs(v - k) <= self.tolerance for k in kept):
                kept.append(v)
        return SpectrumSet(tuple(kept), self.tolerance)

    def set_equal(self, other: SpectrumSet, tol: float | None = None) -> bool:
        """Equality ignoring multiplicity."""
        t = self._tol(other, tol)
        a, b = self.values, other.values
        return (all(any(abs(x - y) <= t for y in b) for x in a)
                and all(any(abs(x - y) <= t for y in a) for x in b))

    def union(self, other: SpectrumSet) -> SpectrumSet:
        return SpectrumSet(self.values + other.values, max(self.tolerance, other.tolerance))

    def map(self, f: Callable[[complex], complex]) -> SpectrumSet:
        return SpectrumSet(tuple(complex(f(v)) for v in self.values), self.tolerance)

    def with_tolerance(self, tol: float) -> SpectrumSet:
        return SpectrumSet(self.values, tol)

    def to_json(self) -> dict:
        return {"values": [complex_to_json(v) for v in self.values],
                "tolerance": self.tolerance}

    @classmethod
    def from_json(cls, d) -> SpectrumSet:
        return cls(tuple(complex_from_json(v) for v in d["values"]), float(d["tolerance"]))


def _fmt(z: complex) -> str:
    if abs(z.imag) < 1e-12:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}j"


def _match(small, big, tol, fallback) -> bool:
    used = [False] * len(big)
    ok = True
    for v in small:
        best, best_d = -1, math.inf
        for j, w in enumerate(big):
            if not used[j]:
                d = abs(v - w)
                if d < best_d:
                    best, best_d = j, d
        if best < 0 or best_d > tol:
            ok = False
            break
        used[best] = True
    if ok or not fallback or not small:
        return ok or not small
    cost = np.abs(np.subtract.outer(np.array(small), np.array(big)))
    r, c = linear_sum_assignment(cost)
    return bool(np.all(cost[r, c] <= tol))


# ---------------------------------------------------------------------------
# Schur decomposition

def _givens(a: complex, b: complex) -> np.ndarray:
    """Unitary G with G @ [a, b] = [r, 0]."""
    if b == 0:
        return np.eye(2, dtype=np.complex128)
    if a == 0:
        return np.array([[0, np.conj(b) / abs(b)], [-1, 0]], dtype=np.complex128)
    r = math.hypot(abs(a), abs(b))
    phase = a / abs(a)
    c = abs(a) / r
    s = phase * np.conj(b) / r
    return np.array([[c, s], [-np.conj(s), c]], dtype=np.complex128)


def _balance(a: np.ndarray):
    """Diagonal scaling by powers of two; returns (d, b) with a = diag(d) b diag(d)^-1."""
    b = a.copy()
    n = b.shape[0]
    d = np.ones(n)
    for _ in range(100):
        done = True
        for i in range(n):
            c = np.abs(np.delete(b[:, i], i)).sum()
            r = np.abs(np.delete(b[i, :], i)).sum()
            if c == 0 or r == 0:
                continue
            s = c + r
            f = 1.0
            g = r / 2
            while c < g:
                f *= 2
                c *= 4
            g = r * 2
            while c > g:
                f /= 2
                c /= 4
            if (c + r) / f < 0.95 * s:
                done = False
                d[i] *= f
                b[i, :] /= f
                b[:, i] *= f
        if done:
            break
    return d, b


def _hessenberg(a: np.ndarray):
    """Householder reduction a = q h q^H."""
    h = a.copy()
    n = h.shape[0]
    q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        if np.linalg.norm(x[1:]) == 0:
            continue
        alpha = np.linalg.norm(x)
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0
    return h, q


def _wilkinson(h, hi) -> complex:
    a, b = h[hi - 1, hi - 1], h[hi - 1, hi]
    c, d = h[hi, hi - 1], h[hi, hi]
    half = (a - d) / 2
    disc = cmath.sqrt(half * half + b * c)
    mid = (a + d) / 2
    l1, l2 = mid + disc, mid - disc
    return l1 if abs(l1 - d) <= abs(l2 - d) else l2


def _triangular_order(a: np.ndarray):
    """Permutation making ``a`` upper triangular, or None when its sparsity graph has a cycle."""
    n = a.shape[0]
    ts = TopologicalSorter({j: [i for i in range(n) if i != j and a[i, j] != 0] for j in range(n)})
    try:
        return list(ts.static_order())
    except CycleError:
        return None


def _schur_core(a: np.ndarray, max_sweeps: int | None = None):
    n = a.shape[0]
    perm = _triangular_order(a)
    if perm is not None:
        # already triangular up to a permutation: the diagonal is exact
        return a[np.ix_(perm, perm)].copy(), np.eye(n, dtype=np.complex128)[:, perm]
    # power-of-two prescale keeps tiny and huge inputs away from under/overflow
    e = math.frexp(float(np.abs(a).max()))[1]
    t, z = _qr_sweeps(np.ldexp(a.real, -e) + 1j * np.ldexp(a.imag, -e), max_sweeps)
    return np.ldexp(t.real, e) + 1j * np.ldexp(t.imag, e), z


def _qr_sweeps(a: np.ndarray, max_sweeps: int | None):
    n = a.shape[0]
    h, z = _hessenberg(a)
    tiny = EPS * np.linalg.norm(h)
    cap = max_sweeps if max_sweeps is not None else 100 * n
    sweeps = 0
    stall = 0
    hi = n - 1
    while hi > 0:
        lo = hi
        while lo > 0:
            s = abs(h[lo, lo - 1])
            if s <= EPS * (abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])) or s <= tiny:
                h[lo, lo - 1] = 0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            stall = 0
            continue
        sweeps += 1
        stall += 1
        if sweeps > cap:
            raise ConvergenceFailure(f"QR iteration did not converge in {cap} sweeps")
        if stall % 11 == 10:
            # exceptional shift to break cycling
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * cmath.exp(1j * stall)
        else:
            mu = _wilkinson(h, hi)
        idx = np.arange(lo, hi + 1)
        h[idx, idx] -= mu
        rots = []
        for k in range(lo, hi):
            g = _givens(h[k, k], h[k + 1, k])
            h[k:k + 2, k:] = g @ h[k:k + 2, k:]
            rots.append(g)
        for k, g in zip(range(lo, hi), rots):
            gh = g.conj().T
            h[:k + 2, k:k + 2] = h[:k + 2, k:k + 2] @ gh
            z[:, k:k + 2] = z[:, k:k + 2] @ gh
        h[idx, idx] += mu
    return np.triu(h), z


def schur(m, max_sweeps: int | None = None):
    """Complex Schur form: returns (t, z) with m = z t z^H, t upper triangular, z unitary."""
    a = as_square(m)
    return _schur_core(a, max_sweeps)


def _balanced_schur(a: np.ndarray):
    d, b = _balance(a)
    t, z = _schur_core(b)
    return d, t, z


def eigenvalues(m, tol: float = DEFAULT_TOL) -> SpectrumSet:
    """All eigenvalues with algebraic multiplicity.

    >>> eigenvalues([[0, 1], [1, 0]]) == SpectrumSet((-1, 1))
    True
    """
    a = as_square(m)
    _, t, _ = _balanced_schur(a)
    return SpectrumSet(tuple(np.diag(t)), tol)


def min_singular_shift(m, lam: complex) -> float:
    """Smallest singular value of m - lam*I; vanishes exactly at eigenvalues."""
    a = as_square(m)
    return float(np.linalg.svd(a - lam * np.eye(a.shape[0]), compute_uv=False)[-1])


# ---------------------------------------------------------------------------
# resolvent

def resolvent(m, z: complex, tol: float = 1e-10) -> np.ndarray:
    """(zI - m)^-1; raises SpectralPoint when z is within ``tol``*max(1, |m|) of the spectrum."""
    a = as_square(m)
    n = a.shape[0]
    scale = max(1.0, float(np.linalg.norm(a)))
    spec = eigenvalues(a)
    if spec.values and min(abs(z - v) for v in spec.values) <= tol * scale:
        raise SpectralPoint(f"z={z} lies in the spectrum")
    return np.linalg.solve(z * np.eye(n) - a, np.eye(n, dtype=np.complex128))


def resolvent_identity_check(m, z: complex, w: complex, tol: float = 1e-8) -> bool:
    """Whether R(z) - R(w) = (w - z) R(z) R(w) holds within ``tol`` (Frobenius norm)."""
    rz = resolvent(m, z)
    rw = resolvent(m, w)
    return resolvent_identity_residual(rz, rw, z, w) < tol


def resolvent_identity_residual(rz, rw, z, w) -> float:
    return float(np.linalg.norm(rz - rw - (w - z) * rz @ rw))


# ---------------------------------------------------------------------------
# functional calculus

def poly_apply(m, coeffs: Sequence) -> np.ndarray:
    """Horner evaluation of sum(coeffs[k] * m**k)."""
    a = as_square(m)
    n = a.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    out = np.zeros((n, n), dtype=np.complex128)
    for c in reversed(list(coeffs)):
        out = out @ a + complex(c) * eye
    return out


def poly_eval(coeffs: Sequence, z: complex) -> complex:
    out = 0j
    for c in reversed(list(coeffs)):
        out = out * z + complex(c)
    return out


def poly_compose(outer: Sequence, inner: Sequence) -> tuple:
    """Coefficients of outer(inner(z))."""
    out = np.zeros(1, dtype=np.complex128)
    for c in reversed(list(outer)):
        out = np.convolve(out, np.asarray(list(inner) or [0], dtype=np.complex128))
        out[0] += complex(c)
    out = np.trim_zeros(out, "b")
    return tuple(complex(v) for v in out) or (0j,)


def _ray_distance(z: complex) -> float:
    # distance to the closed negative real half-axis
    if z.real > 0:
        return abs(z)
    return abs(z.imag)


@dataclass(frozen=True)
class HoloFunction:
    """A holomorphic function together with its domain.

    ``distance(z)`` is the distance from ``z`` to the nearest point where the
    function stops being holomorphic; ``None`` marks an entire function.
    """

    name: str
    fn: Callable[[complex], complex]
    distance: Callable[[complex], float] | None = None
    coeffs: tuple | None = field(default=None)

    def __call__(self, z):
        return self.fn(complex(z))

    def in_domain(self, z) -> bool:
        return self.distance is None or self.distance(complex(z)) > 0


def polynomial(coeffs: Sequence) -> HoloFunction:
    cs = tuple(complex(c) for c in coeffs)
    return HoloFunction(f"poly{list(cs)}", lambda z: poly_eval(cs, z), None, cs)


BUILTIN_FUNCTIONS = {
    "exp": HoloFunction("exp", cmath.exp),
    "sin": HoloFunction("sin", cmath.sin),
    "cos": HoloFunction("cos", cmath.cos),
    "log": HoloFunction("log", cmath.log, _ray_distance),
    "sqrt": HoloFunction("sqrt", cmath.sqrt, _ray_distance),
    "inv": HoloFunction("inv", lambda z: 1 / z, abs),
}


def _clusters(lams: np.ndarray, delta: float) -> list:
    """Single-linkage clustering; returns a cluster id per eigenvalue, ids in order of first appearance."""
    n = len(lams)
    ids = [-1] * n
    nxt = 0
    for i in range(n):
        if ids[i] >= 0:
            continue
        ids[i] = nxt
        stack = [i]
        while stack:
            p = stack.pop()
            for j in range(n):
                if ids[j] < 0 and abs(lams[p] - lams[j]) <= delta:
                    ids[j] = nxt
                    stack.append(j)
        nxt += 1
    return ids


def _swap(t: np.ndarray, z: np.ndarray, k: int) -> None:
    """Exchange diagonal entries k and k+1 of upper-triangular t in place."""
    a, b = t[k, k], t[k + 1, k + 1]
    g = _givens(t[k, k + 1], b - a)
    gh = g.conj().T
    t[k:k + 2, :] = g @ t[k:k + 2, :]
    t[:, k:k + 2] = t[:, k:k + 2] @ gh
    z[:, k:k + 2] = z[:, k:k + 2] @ gh
    t[k + 1, k] = 0
    t[k, k], t[k + 1, k + 1] = b, a


def _contour_block(tb: np.ndarray, f: HoloFunction) -> np.ndarray:
    """f(tb) for a triangular block with clustered spectrum via a trapezoidal Cauchy integral."""
    k = tb.shape[0]
    lams = np.diag(tb)
    mu = complex(lams.mean())
    rho = float(np.max(np.abs(lams - mu)))
    big_r = math.inf if f.distance is None else f.distance(mu)
    r = max(2 * rho, CLUSTER_DELTA)
    if math.isfinite(big_r) and r > big_r / 2:
        r = big_r / 2 if 4 * rho <= big_r else math.sqrt(rho * big_r)
    if not rho < r or not r < big_r:
        raise ConvergenceFailure("eigenvalue cluster too wide for the function's domain")
    q = rho / r
    if math.isfinite(big_r):
        q = max(q, r / big_r)
    nodes = 64 if q == 0 else math.ceil(-37.0 / math.log(q))
    if not math.isfinite(big_r):
        nodes = max(nodes, math.ceil(1.5 * math.e * r) + 40)
    nodes = min(max(nodes, 64), 1 << 14)
    eye = np.eye(k, dtype=np.complex128)
    acc = np.zeros((k, k), dtype=np.complex128)
    for j in range(nodes):
        zeta = r * cmath.exp(2j * math.pi * (j + 0.5) / nodes)
        zj = mu + zeta
        acc += f(zj) * zeta * solve_triangular(zj * eye - tb, eye)
    return acc / nodes


def holo_apply(m, f: HoloFunction) -> np.ndarray:
    """f(m) by block Schur-Parlett."""
    a = as_square(m)
    n = a.shape[0]
    d, t, z = _balanced_schur(a)
    lams = np.diag(t).copy()
    bad = [v for v in lams if not f.in_domain(v)]
    if bad:
        raise DomainViolation(f"{f.name}: eigenvalue {bad[0]} outside the domain")

    ids = _clusters(lams, CLUSTER_DELTA)
    # bubble sort by cluster id with adjacent Schur swaps
    order = list(ids)
    for i in range(n):
        for k in range(n - 1 - i):
            if order[k] > order[k + 1]:
                _swap(t, z, k)
                order[k], order[k + 1] = order[k + 1], order[k]
    t = np.triu(t)
    bounds = []
    start = 0
    for k in range(1, n + 1):
        if k == n or order[k] != order[start]:
            bounds.append((start, k))
            start = k

    ft = np.zeros_like(t)
    for j, (j0, j1) in enumerate(bounds):
        if j1 - j0 == 1:
            ft[j0, j0] = f(t[j0, j0])
        else:
            ft[j0:j1, j0:j1] = _contour_block(t[j0:j1, j0:j1], f)
        for i in range(j - 1, -1, -1):
            i0, i1 = bounds[i]
            rhs = ft[i0:i1, i0:i1] @ t[i0:i1, j0:j1] - t[i0:i1, j0:j1] @ ft[j0:j1, j0:j1]
            for kk in range(i + 1, j):
                k0, k1 = bounds[kk]
                rhs += ft[i0:i1, k0:k1] @ t[k0:k1, j0:j1] - t[i0:i1, k0:k1] @ ft[k0:k1, j0:j1]
            ft[i0:i1, j0:j1] = solve_sylvester(t[i0:i1, i0:i1], -t[j0:j1, j0:j1], rhs)
    fb = z @ ft @ z.conj().T
    out = (d[:, None] * fb) / d[None, :]
    if not np.all(np.isfinite(out)):
        raise ConvergenceFailure(f"{f.name}: non-finite result")
    return out


def classical_spectral_mapping_check(m, f: HoloFunction, tol: float = DEFAULT_TOL) -> bool:
    """Whether the spectrum of f(m) equals f applied to the spectrum of m."""
    a = as_square(m)
    lhs = eigenvalues(holo_apply(a, f), tol)
    rhs = eigenvalues(a, tol).map(f)
    return lhs.matches(rhs)


# ---------------------------------------------------------------------------
# Gaussian elimination

def row_reduce(a, rtol: float = RANK_TOL):
    """Reduced row echelon form with partial pivoting.

    Returns ``(r, pivots)`` where ``r`` holds the nonzero rows.  Candidate
    pivots below ``rtol`` times the largest entry of ``a`` count as zero.
    """
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError("row_reduce expects a 2-d array")
    rows, cols = m.shape
    scale = float(np.abs(m).max()) if m.size else 0.0
    pivots: list[int] = []
    if scale == 0.0:
        return m[:0], pivots
    thresh = rtol * scale
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(m[r:, c])))
        if abs(m[p, c]) <= thresh:
            m[r:, c] = 0
            continue
        if p != r:
            m[[r, p]] = m[[p, r]]
        m[r] /= m[r, c]
        col = m[:, c].copy()
        col[r] = 0
        m -= np.outer(col, m[r])
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(a, rtol: float = RANK_TOL) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(row_reduce(a, rtol)[1])


def nullspace(a, rtol: float = RANK_TOL) -> np.ndarray:
    """Columns spanning {v : a v = 0}, one per free variable."""
    a = np.asarray(a, dtype=np.complex128)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=np.complex128)
    r, piv = row_reduce(a, rtol)
    free = [c for c in range(cols) if c not in set(piv)]
    out = np.zeros((cols, len(free)), dtype=np.complex128)
    for j, fcol in enumerate(free):
        out[fcol, j] = 1
        for i, pc in enumerate(piv):
            out[pc, j] = -r[i, fcol]
    return out


def quotient_projection(generators, ambient: int, rtol: float = RANK_TOL) -> np.ndarray:
    """Full-row-rank q with q @ g = 0 for every generator column g.

    ``generators`` has shape (ambient, k); the rows of the result form a
    basis of the dual of the quotient ambient / span(generators).
    """
    g = np.asarray(generators, dtype=np.complex128)
    if ambient == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    g = g.reshape(ambient, -1)
    if g.shape[1] == 0:
        return np.eye(ambient, dtype=np.complex128)
    return nullspace(g.T, rtol).T


def kron_all(mats: Iterable) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out
