"""Truncated moment data, atomic measures and localized sequences."""
from dataclasses import dataclass, field

import numpy as np

from . import multiindex as mi
from .errors import (
    DimensionMismatchError,
    PositivityError,
    RealityError,
    TruncationDepthError,
)

REAL = "real"
COMPLEX = "complex"
KINDS = (REAL, COMPLEX)

MERGE_RTOL = 1e-12
REALITY_TOL = 1e-10


def _check_kind(kind):
    if kind not in KINDS:
        raise ValueError(f"kind must be 'real' or 'complex', got {kind!r}")


# --------------------------------------------------------------------------- #
# coefficient vectors
# --------------------------------------------------------------------------- #


class CoefficientVector:
    """Finitely supported map multi-index -> complex, i.e. the polynomial sum_k xi_k x^k.

    Instances are immutable and hash by exact coefficient values, so they can
    key a measure family.
    """

    __slots__ = ("dim", "coeffs", "_hash")

    def __init__(self, dim, coeffs=None):
        if dim < 1:
            raise DimensionMismatchError(f"dimension must be >= 1, got {dim}")
        clean = {}
        for idx, c in (coeffs or {}).items():
            idx = mi.multi_index(idx)
            if len(idx) != dim:
                raise DimensionMismatchError(f"index {idx} in a {dim}-dimensional vector")
            c = complex(c)
            if c != 0:
                clean[idx] = clean.get(idx, 0j) + c
        clean = {k: v for k, v in clean.items() if v != 0}
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "coeffs", dict(sorted(clean.items(), key=lambda kv: mi.graded_lex_key(kv[0]))))
        object.__setattr__(self, "_hash", hash((dim, frozenset(self.coeffs.items()))))

    def __setattr__(self, name, value):
        raise AttributeError("CoefficientVector is immutable")

    @classmethod
    def from_dense(cls, values, dim=1):
        """Coefficients listed in graded-lex order of the monomials."""
        values = list(values)
        D = 0
        while len(mi.indices_up_to(dim, D)) < len(values):
            D += 1
        idx = mi.indices_up_to(dim, D)
        return cls(dim, dict(zip(idx, values)))

    @classmethod
    def monomial(cls, n, coef=1.0):
        n = mi.multi_index(n)
        return cls(len(n), {n: coef})

    @classmethod
    def zero(cls, dim):
        return cls(dim)

    @property
    def deg(self):
        return max((mi.degree(k) for k in self.coeffs), default=0)

    def is_zero(self):
        return not self.coeffs

    def get(self, n):
        return self.coeffs.get(tuple(n), 0j)

    def dense(self, indices):
        """Coefficients over an ordered index list; raises if the support escapes it."""
        pos = {n: a for a, n in enumerate(indices)}
        out = np.zeros(len(indices), dtype=complex)
        for k, c in self.coeffs.items():
            if k not in pos:
                raise TruncationDepthError(f"support index {k} outside the index list")
            out[pos[k]] = c
        return out

    def shifted(self, m):
        """Multiply the polynomial by the monomial x**m."""
        return CoefficientVector(self.dim, {mi.add(k, m): c for k, c in self.coeffs.items()})

    def conj(self):
        return CoefficientVector(self.dim, {k: c.conjugate() for k, c in self.coeffs.items()})

    def _combine(self, other, sign):
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dimensions {self.dim} and {other.dim}")
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0j) + sign * c
        return CoefficientVector(self.dim, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return CoefficientVector(self.dim, {k: -c for k, c in self.coeffs.items()})

    def __mul__(self, z):
        z = complex(z)
        return CoefficientVector(self.dim, {k: z * c for k, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return self.dim == other.dim and self.coeffs == other.coeffs

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self.coeffs:
            return f"xi[d={self.dim}](0)"
        terms = []
        for k, c in self.coeffs.items():
            cs = f"{c.real:g}" if c.imag == 0 else f"({c.real:g}{c.imag:+g}j)"
            terms.append(f"{cs}*x^{list(k)}")
        return f"xi[d={self.dim}](" + " + ".join(terms) + ")"

    def to_json(self):
        return [{"idx": mi.to_json(k), "re": c.real, "im": c.imag} for k, c in self.coeffs.items()]

    @classmethod
    def from_json(cls, obj, dim=None):
        coeffs = {}
        for term in obj:
            idx = mi.from_json(term["idx"])
            coeffs[idx] = coeffs.get(idx, 0j) + complex(term.get("re", 0.0), term.get("im", 0.0))
        if dim is None:
            if not coeffs:
                raise ValueError("cannot infer the dimension of an empty coefficient vector")
            dim = len(next(iter(coeffs)))
        return cls(dim, coeffs)


def poly_eval(xi, x):
    """Value of the polynomial sum_k xi_k x^k at ``x``."""
    x = np.atleast_1d(np.asarray(x))
    if len(x) != xi.dim:
        raise DimensionMismatchError(f"point of dimension {len(x)} vs {xi.dim}")
    return sum((c * mi.monomial_eval(x, k) for k, c in xi.coeffs.items()), 0j)


def poly_values(xi, points):
    """Vectorised poly_eval over an (s, d) array of points."""
    points = np.asarray(points)
    if points.shape[1] != xi.dim:
        raise DimensionMismatchError(f"points of dimension {points.shape[1]} vs {xi.dim}")
    if xi.is_zero():
        return np.zeros(len(points), dtype=complex)
    idx = list(xi.coeffs)
    table = mi.monomial_table(points, idx)
    return table @ np.array([xi.coeffs[k] for k in idx])


# --------------------------------------------------------------------------- #
# atomic measures
# --------------------------------------------------------------------------- #


def _as_points(points, dim, kind):
    dtype = float if kind == REAL else complex
    if kind == REAL and np.iscomplexobj(points):
        points = np.asarray(points)
        if np.any(np.abs(points.imag) > 0):
            raise RealityError("real measure with complex atom coordinates")
        points = points.real
    arr = np.asarray(points, dtype=dtype)
    if arr.size == 0:
        return np.zeros((0, dim), dtype=dtype)
    arr = arr.reshape(len(arr), -1) if arr.ndim != 1 or dim == 1 else arr.reshape(1, -1)
    if arr.shape[1] != dim:
        raise DimensionMismatchError(f"atoms of dimension {arr.shape[1]}, expected {dim}")
    return arr


def _same_point(p, q):
    scale = max(1.0, float(np.max(np.abs(p), initial=0.0)), float(np.max(np.abs(q), initial=0.0)))
    return float(np.linalg.norm(p - q)) <= MERGE_RTOL * scale


def _merge(points, weights):
    keep_pts, keep_w = [], []
    for p, w in zip(points, weights):
        for j, q in enumerate(keep_pts):
            if _same_point(p, q):
                keep_w[j] += w
                break
        else:
            keep_pts.append(p)
            keep_w.append(w)
    return keep_pts, keep_w


class SignedAtomicMeasure:
    """Finitely supported measure with complex weights on R^d or C^d."""

    def __init__(self, dim, kind, points=(), weights=()):
        _check_kind(kind)
        self.dim = int(dim)
        self.kind = kind
        pts = _as_points(points, self.dim, kind)
        w = np.asarray(weights, dtype=complex).reshape(-1)
        if len(w) != len(pts):
            raise DimensionMismatchError(f"{len(pts)} atoms but {len(w)} weights")
        pts, w = _merge(pts, list(w))
        nz = [j for j, x in enumerate(w) if x != 0]
        self.points = np.array([pts[j] for j in nz], dtype=pts[0].dtype if pts else float).reshape(len(nz), self.dim)
        if kind == COMPLEX:
            self.points = self.points.astype(complex)
        self.weights = self._coerce_weights(np.array([w[j] for j in nz], dtype=complex))

    def _coerce_weights(self, w):
        return w

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        return iter(zip(self.points, self.weights))

    def __repr__(self):
        atoms = ", ".join(f"{p.tolist()}: {w}" for p, w in self)
        return f"{type(self).__name__}(d={self.dim}, {self.kind}, {{{atoms}}})"

    def total_mass(self):
        return self.weights.sum()

    def index_of(self, point):
        point = np.atleast_1d(np.asarray(point, dtype=self.points.dtype))
        for j, p in enumerate(self.points):
            if _same_point(p, point):
                return j
        return None

    def weight_at(self, point):
        j = self.index_of(point)
        return self.weights[j] if j is not None else 0 * self.weights.sum()

    def region_mask(self, region):
        """Boolean mask of atoms in ``region``: None (everything), a predicate, or a list of points."""
        if region is None:
            return np.ones(len(self), dtype=bool)
        if callable(region):
            return np.array([bool(region(p)) for p in self.points], dtype=bool)
        region = [np.atleast_1d(np.asarray(q)) for q in region]
        return np.array([any(_same_point(p, q) for q in region) for p in self.points], dtype=bool)

    def mass(self, region=None):
        return self.weights[self.region_mask(region)].sum()

    def scaled(self, c):
        return linear_combination([(c, self)])

    def integrate(self, phi):
        return sum((w * phi(p) for p, w in self), 0 * self.weights.sum())

    def support(self):
        return [p for p in self.points]

    def allclose(self, other, atol):
        """Atom-by-atom comparison on the merged support."""
        diff = linear_combination([(1, self), (-1, other)])
        return bool(np.all(np.abs(diff.weights) <= atol))

    def to_json(self):
        atoms = []
        for p, w in self:
            atoms.append({"point": _point_json(p, self.kind), "weight": _scalar_json(w)})
        return {"dim": self.dim, "kind": self.kind, "atoms": atoms}


class AtomicMeasure(SignedAtomicMeasure):
    """Positive finitely supported measure; weights are non-negative reals."""

    def _coerce_weights(self, w):
        if np.any(np.abs(w.imag) > 0):
            raise RealityError("positive measure with complex weights")
        w = w.real.astype(float)
        if np.any(w < 0):
            raise PositivityError(f"negative atom weight {w.min()}")
        return w

    @classmethod
    def from_json(cls, obj):
        kind = obj.get("kind", REAL)
        dim = int(obj["dim"])
        pts, ws = [], []
        for atom in obj["atoms"]:
            pts.append(_point_from_json(atom["point"], kind))
            ws.append(float(atom["weight"]))
        return cls(dim, kind, np.array(pts).reshape(len(pts), dim) if pts else (), ws)


def _point_json(p, kind):
    if kind == REAL:
        return [float(x) for x in p]
    return [[float(x.real), float(x.imag)] for x in p]


def _point_from_json(obj, kind):
    if kind == REAL:
        return [float(x) for x in obj]
    return [complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x) for x in obj]


def _scalar_json(w):
    w = complex(w)
    return w.real if w.imag == 0 else {"re": w.real, "im": w.imag}


def linear_combination(terms):
    """sum_t coef_t * measure_t on the merged atom set, as a SignedAtomicMeasure."""
    terms = list(terms)
    if not terms:
        raise ValueError("empty combination")
    dim, kind = terms[0][1].dim, terms[0][1].kind
    pts, ws = [], []
    for coef, m in terms:
        if m.dim != dim or m.kind != kind:
            raise DimensionMismatchError("combining measures of different dimension or kind")
        pts.extend(m.points)
        ws.extend(complex(coef) * np.asarray(m.weights, dtype=complex))
    return SignedAtomicMeasure(dim, kind, np.array(pts).reshape(len(pts), dim) if pts else (), ws)


def zero_measure(dim, kind=REAL):
    return AtomicMeasure(dim, kind)


def dirac(point, weight=1.0, kind=REAL):
    point = np.atleast_1d(np.asarray(point))
    return AtomicMeasure(len(point), kind, [point], [weight])


# --------------------------------------------------------------------------- #
# truncated sequences
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class TruncatedSequence:
    """Moment data dense up to ``max_degree``.

    Real kind keys entries by a multi-index ``n``; complex kind by a pair
    ``(m, n)`` standing for ``c_{m,n}`` with ``degree(m), degree(n) <= max_degree``.
    """

    dim: int
    kind: str
    max_degree: int
    entries: dict = field(repr=False)

    def __post_init__(self):
        _check_kind(self.kind)
        if self.max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        idx = self.indices()
        ent = {}
        if self.kind == REAL:
            for n in idx:
                if n not in self.entries:
                    raise ValueError(f"missing entry for index {n}")
                v = complex(self.entries[n])
                if abs(v.imag) > REALITY_TOL * max(1.0, abs(v.real)):
                    raise RealityError(f"real sequence entry {n} = {v}")
                ent[n] = float(v.real)
        else:
            for m in idx:
                for n in idx:
                    if (m, n) not in self.entries:
                        raise ValueError(f"missing entry for index pair {(m, n)}")
                    ent[m, n] = complex(self.entries[m, n])
            for m in idx:
                for n in idx:
                    a, b = ent[m, n], ent[n, m].conjugate()
                    if abs(a - b) > REALITY_TOL * max(1.0, abs(a), abs(b)):
                        raise ValueError(f"entries {(m, n)} and {(n, m)} are not conjugate")
        object.__setattr__(self, "entries", ent)

    def indices(self):
        return mi.indices_up_to(self.dim, self.max_degree)

    def __getitem__(self, key):
        try:
            return self.entries[key]
        except KeyError:
            raise TruncationDepthError(f"entry {key} outside the degree bound {self.max_degree}") from None

    def scale(self):
        return max([1.0] + [abs(v) for v in self.entries.values()])

    def values(self):
        """Entries as an array: graded-lex vector (real) or matrix ``C[m, n]`` (complex)."""
        idx = self.indices()
        if self.kind == REAL:
            return np.array([self.entries[n] for n in idx])
        return np.array([[self.entries[m, n] for n in idx] for m in idx])

    def to_json(self):
        out = {"dim": self.dim, "kind": self.kind, "max_degree": self.max_degree}
        if self.kind == REAL:
            out["entries"] = [{"idx": mi.to_json(n), "value": v} for n, v in self.entries.items()]
        else:
            out["entries"] = [
                {"idx_m": mi.to_json(m), "idx_n": mi.to_json(n), "re": v.real, "im": v.imag}
                for (m, n), v in self.entries.items()
            ]
        return out

    @classmethod
    def from_json(cls, obj):
        kind = obj.get("kind", REAL)
        entries = {}
        for e in obj["entries"]:
            if kind == REAL:
                entries[mi.from_json(e["idx"])] = float(e["value"])
            else:
                key = (mi.from_json(e["idx_m"]), mi.from_json(e["idx_n"]))
                entries[key] = complex(e.get("re", 0.0), e.get("im", 0.0))
        return cls(int(obj["dim"]), kind, int(obj["max_degree"]), entries)

    @classmethod
    def from_dense(cls, values, dim=1):
        """Real sequence from values listed in graded-lex order, e.g. ``(a0, a1, a2)`` for d=1."""
        values = list(values)
        D = 0
        while len(mi.indices_up_to(dim, D)) < len(values):
            D += 1
        idx = mi.indices_up_to(dim, D)
        if len(idx) != len(values):
            raise ValueError(f"{len(values)} values do not fill a degree bound in dimension {dim}")
        return cls(dim, REAL, D, dict(zip(idx, values)))


def moments_of(mu, D):
    """Truncated moment sequence of an atomic measure up to degree ``D``."""
    if D < 0:
        raise ValueError("degree bound must be >= 0")
    idx = mi.indices_up_to(mu.dim, D)
    w = np.asarray(mu.weights)
    table = mi.monomial_table(mu.points, idx)
    if mu.kind == REAL:
        vals = table.T @ w
        return TruncatedSequence(mu.dim, REAL, D, dict(zip(idx, vals.tolist())))
    C = table.T @ (w[:, None] * table.conj())
    C = (C + C.conj().T) / 2
    entries = {(m, n): C[a, b] for a, m in enumerate(idx) for b, n in enumerate(idx)}
    return TruncatedSequence(mu.dim, COMPLEX, D, entries)


def localized_value(seq, xi, n, conj_n=None):
    """One entry of the localized sequence: a^xi_n (real) or c^xi_{n, conj_n} (complex)."""
    if xi.dim != seq.dim:
        raise DimensionMismatchError(f"sequence dimension {seq.dim} vs xi dimension {xi.dim}")
    items = list(xi.coeffs.items())
    total = 0j
    try:
        if seq.kind == REAL:
            for k, ck in items:
                nk = mi.add(n, k)
                for l, cl in items:
                    total += seq[mi.add(nk, l)] * ck * cl.conjugate()
        else:
            for k, ck in items:
                mk = mi.add(n, k)
                for l, cl in items:
                    total += seq[mk, mi.add(conj_n, l)] * ck * cl.conjugate()
    except TruncationDepthError as exc:
        raise TruncationDepthError(f"localizing by a degree-{xi.deg} vector: {exc}") from None
    return total


def localize(seq, xi):
    """Localized sequence a^xi_n = sum_{k,l} a_{n+k+l} xi_k conj(xi_l) (and its complex twin)."""
    if xi.dim != seq.dim:
        raise DimensionMismatchError(f"sequence dimension {seq.dim} vs xi dimension {xi.dim}")
    budget = seq.max_degree - (2 * xi.deg if seq.kind == REAL else xi.deg)
    if budget < 0:
        raise TruncationDepthError(
            f"degree bound {seq.max_degree} too small to localize by a degree-{xi.deg} vector"
        )
    idx = mi.indices_up_to(seq.dim, budget)
    entries = {}
    if seq.kind == REAL:
        for n in idx:
            v = localized_value(seq, xi, n)
            if abs(v.imag) > REALITY_TOL * max(1.0, abs(v.real)):
                raise RealityError(f"localized entry {n} has imaginary part {v.imag}")
            entries[n] = v.real
    else:
        for m in idx:
            for n in idx:
                entries[m, n] = localized_value(seq, xi, m, n)
        for m in idx:
            for n in idx:
                avg = (entries[m, n] + entries[n, m].conjugate()) / 2
                entries[m, n], entries[n, m] = avg, avg.conjugate()
    return TruncatedSequence(seq.dim, seq.kind, budget, entries)
