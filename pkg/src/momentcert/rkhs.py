"""Gram (moment) matrices, positive definiteness, the seminorm, its null space and shifts.

The Hilbert space is spanned by the vectors a_(n) with <a_(m), a_(n)> = a_{m+n}
(real kind) or c_{m,n} (complex kind, holomorphic monomials). A coefficient
vector xi maps to h(xi) = sum_k xi_k a_(k), so <h(xi), h(eta)> = xi^T G conj(eta).
"""
from dataclasses import dataclass, field

import numpy as np

from . import multiindex as mi
from .errors import DimensionMismatchError, PositivityError, TruncationDepthError
from .sequences import REAL, CoefficientVector

DEFAULT_TOL = 1e-9


def inner(seq, p, q):
    """<a_(p), a_(q)>."""
    if seq.kind == REAL:
        return seq[mi.add(p, q)]
    return seq[p, q]


def _order_budget(seq, k):
    # real: <a_(m), a_(n)> needs degree 2k; holomorphic complex Gram needs k
    return 2 * k if seq.kind == REAL else k


@dataclass
class GramMatrix:
    index_list: list
    matrix: np.ndarray = field(repr=False)
    kind: str = REAL
    order: int = 0
    pairs: bool = False

    @property
    def size(self):
        return self.matrix.shape[0]

    def hermitian_defect(self):
        if self.size == 0:
            return 0.0
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def eigvalsh(self):
        if self.size == 0:
            return np.zeros(0)
        return np.linalg.eigvalsh(self.matrix)


def cross_gram(seq, rows, cols):
    """Rectangular block [<a_(p), a_(q)>] for p in rows, q in cols."""
    dtype = float if seq.kind == REAL else complex
    out = np.empty((len(rows), len(cols)), dtype=dtype)
    for a, p in enumerate(rows):
        for b, q in enumerate(cols):
            out[a, b] = inner(seq, p, q)
    return out


def gram_matrix(seq, k, pairs=False):
    """Order-``k`` Gram matrix over monomials of degree <= k.

    With ``pairs=True`` (complex kind only) returns the matrix of the complex
    positive-definiteness form, indexed by pairs (m, n) with entry c_{m+l, n+k}
    at row (m, n), column (k, l).
    """
    if k < 0:
        raise ValueError("order must be >= 0")
    idx = mi.indices_up_to(seq.dim, k)
    if pairs:
        if seq.kind == REAL:
            raise ValueError("pair-indexed Gram matrices are for complex sequences")
        if 2 * k > seq.max_degree:
            raise TruncationDepthError(f"order {k} needs degree bound {2 * k}, have {seq.max_degree}")
        plist = [(m, n) for m in idx for n in idx]
        G = np.empty((len(plist), len(plist)), dtype=complex)
        for a, (m, n) in enumerate(plist):
            for b, (kk, l) in enumerate(plist):
                G[a, b] = seq[mi.add(m, l), mi.add(n, kk)]
        return GramMatrix(plist, G, seq.kind, k, True)
    if _order_budget(seq, k) > seq.max_degree:
        raise TruncationDepthError(
            f"order {k} needs degree bound {_order_budget(seq, k)}, have {seq.max_degree}"
        )
    return GramMatrix(idx, cross_gram(seq, idx, idx), seq.kind, k, False)


@dataclass
class PDReport:
    min_eigenvalue: float
    verdict: str
    order: int
    eigenvalues: np.ndarray = field(default=None, repr=False)

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_json(self):
        return {"min_eigenvalue": self.min_eigenvalue, "verdict": self.verdict, "order": self.order}


def check_positive_definite(seq, k, tol=DEFAULT_TOL):
    """Positive semidefiniteness of the order-k moment form; failure is a verdict."""
    G = gram_matrix(seq, k, pairs=seq.kind != REAL)
    ev = G.eigvalsh()
    lam_min = float(ev.min()) if len(ev) else 0.0
    norm = float(np.max(np.abs(ev))) if len(ev) else 0.0
    verdict = "pass" if lam_min >= -tol * max(1.0, norm) else "fail"
    return PDReport(lam_min, verdict, k, ev)


def _require_dim(seq, xi):
    if xi.dim != seq.dim:
        raise DimensionMismatchError(f"sequence dimension {seq.dim} vs xi dimension {xi.dim}")


def gram_form(seq, xi, eta, m=None, n=None):
    """<sum_k xi_k a_(m+k), sum_l eta_l a_(n+l)> evaluated through a Gram block."""
    _require_dim(seq, xi)
    _require_dim(seq, eta)
    u = xi.shifted(m) if m is not None else xi
    v = eta.shifted(n) if n is not None else eta
    rows = mi.indices_up_to(seq.dim, u.deg)
    cols = mi.indices_up_to(seq.dim, v.deg)
    block = cross_gram(seq, rows, cols)
    return complex(u.dense(rows) @ block @ v.dense(cols).conj())


def basis_gram(seq, basis):
    """Matrix M[a, b] = <h(basis[a]), h(basis[b])>."""
    n = len(basis)
    out = np.empty((n, n), dtype=complex)
    for a in range(n):
        for b in range(a, n):
            out[a, b] = gram_form(seq, basis[a], basis[b])
            out[b, a] = out[a, b].conjugate()
    return out


def seminorm(seq, xi, tol=DEFAULT_TOL):
    """p(xi) = ||sum_k xi_k a_(k)||."""
    _require_dim(seq, xi)
    G = gram_matrix(seq, xi.deg)
    ev = G.eigvalsh()
    scale = max(1.0, float(np.max(np.abs(ev))) if len(ev) else 0.0)
    if len(ev) and ev.min() < -tol * scale:
        raise PositivityError(
            f"moment form of order {xi.deg} is not positive (min eigenvalue {ev.min():.3e})"
        )
    v = xi.dense(G.index_list)
    q = complex(v @ G.matrix @ v.conj())
    if q.real < -tol * scale * max(1.0, float(np.vdot(v, v).real)):
        raise PositivityError(f"negative squared seminorm {q.real:.3e}")
    return float(np.sqrt(max(q.real, 0.0)))


@dataclass
class QuotientBasis:
    """Rank-revealing data for the quotient by the null space of the seminorm.

    ``coordinate_map`` is an (r, N) matrix W with h(xi) represented by W @ xi in
    an orthonormal basis of the span; column n are the coordinates of a_(n).
    """

    gram: GramMatrix
    null_basis: list
    coordinate_map: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    tol: float = DEFAULT_TOL

    @property
    def quotient_dim(self):
        return self.coordinate_map.shape[0]

    @property
    def index_list(self):
        return self.gram.index_list

    def coordinates(self, xi):
        return self.coordinate_map @ xi.dense(self.index_list)

    def contains(self, xi, tol=None):
        """True when xi lies in the null space (seminorm zero at tolerance)."""
        tol = self.tol if tol is None else tol
        c = self.coordinates(xi)
        scale = max(1.0, float(np.max(np.abs(self.eigenvalues), initial=0.0)))
        v = xi.dense(self.index_list)
        return float(np.vdot(c, c).real) <= tol * scale * max(1.0, float(np.vdot(v, v).real))


def null_space(seq, k, tol=DEFAULT_TOL):
    G = gram_matrix(seq, k)
    idx = G.index_list
    if G.size == 0:
        return QuotientBasis(G, [], np.zeros((0, 0)), np.zeros(0), tol)
    lam, U = np.linalg.eigh(G.matrix)
    cut = tol * max(1.0, float(np.max(np.abs(lam))))
    keep = lam > cut
    W = np.sqrt(lam[keep])[:, None] * U[:, keep].T
    null = []
    for col in U[:, ~keep].T:
        # xi in the null space iff conj(xi) is in ker G
        col = col.conj()
        null.append(CoefficientVector(seq.dim, dict(zip(idx, col))))
    return QuotientBasis(G, null, W, lam, tol)


@dataclass
class ShiftReport:
    order: int
    coordinate: int
    symmetry_defect: float
    commutator_defects: dict
    tol: float

    @property
    def passed(self):
        vals = [self.symmetry_defect] + list(self.commutator_defects.values())
        return all(v <= self.tol for v in vals)


def shift_forms(seq, k, i, tol=DEFAULT_TOL):
    """Symmetry and commutation defects of the shifts A_i a_(m) = a_(m + e_i).

    Shifts never act as matrices; every inner product is read off Gram entries.
    """
    d = seq.dim
    e_i = mi.unit_index(i, d)
    need = 2 * k + 2 if seq.kind == REAL else k + 1
    if need > seq.max_degree:
        raise TruncationDepthError(f"shift audit at order {k} needs degree bound {need}")
    idx = mi.indices_up_to(d, k)
    sym = 0.0
    for m in idx:
        for n in idx:
            if seq.kind == REAL:
                lhs, rhs = inner(seq, mi.add(m, e_i), n), inner(seq, m, mi.add(n, e_i))
            else:
                lhs = inner(seq, mi.add(m, e_i), n)
                rhs = np.conj(inner(seq, n, mi.add(m, e_i)))
            sym = max(sym, abs(lhs - rhs))
    comm = {}
    for j in range(1, d + 1):
        if j == i:
            continue
        e_j = mi.unit_index(j, d)
        worst = 0.0
        for m in mi.indices_up_to(d, k - 1) if k >= 1 else []:
            p = mi.add(mi.add(m, e_j), e_i)  # A_i A_j a_(m)
            q = mi.add(mi.add(m, e_i), e_j)  # A_j A_i a_(m)
            sq = inner(seq, p, p) - inner(seq, p, q) - inner(seq, q, p) + inner(seq, q, q)
            worst = max(worst, float(np.sqrt(max(np.real(sq), 0.0))))
        comm[(min(i, j), max(i, j))] = worst
    return ShiftReport(k, i, float(sym), comm, tol)


def shift_form_matrix(seq, basis, i):
    """S with S[b, a] = <A_i h(basis[a]), h(basis[b])>, so that <A_i f, g> = g^H S f."""
    e_i = mi.unit_index(i, seq.dim)
    n = len(basis)
    S = np.empty((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            S[b, a] = gram_form(seq, basis[a], basis[b], m=e_i)
    return S
