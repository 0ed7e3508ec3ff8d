"""Finite semispectral measures, their Naimark dilation and moment reconstruction.

Blocks are written in the coordinates of a chosen basis xi^(1..N) of
coefficient vectors, with the convention

    <F({x}) f, g> = g^H F_x f = mu_{f, g}({x}),   i.e.  F_x[b, a] = mu_{xi^a, xi^b}({x}),

so the total sum_x F_x is the (transposed) Gram matrix of the basis.
"""
from dataclasses import dataclass, field

import numpy as np

from . import multiindex as mi
from .errors import DimensionMismatchError, PSDDefectError
from .families import generate_certificate, polar_keys, polarization_closure, polarize
from .rkhs import DEFAULT_TOL, null_space, shift_form_matrix
from .sequences import REAL, CoefficientVector, SignedAtomicMeasure, TruncatedSequence, moments_of


@dataclass
class SemispectralMeasure:
    points: np.ndarray
    blocks: list = field(repr=False)
    kind: str = REAL
    basis: list = field(default=None, repr=False)

    def __post_init__(self):
        self.points = np.asarray(self.points)
        self.blocks = [np.asarray(b, dtype=complex) for b in self.blocks]
        if len(self.points) != len(self.blocks):
            raise DimensionMismatchError(f"{len(self.points)} points but {len(self.blocks)} blocks")
        if self.blocks and len({b.shape for b in self.blocks}) != 1:
            raise DimensionMismatchError("blocks must share one shape")

    @property
    def rank(self):
        return self.blocks[0].shape[0] if self.blocks else 0

    @property
    def total(self):
        return sum(self.blocks, np.zeros((self.rank, self.rank), dtype=complex))

    @property
    def operators(self):
        return self.blocks

    def min_eigenvalues(self):
        return [float(np.linalg.eigvalsh((b + b.conj().T) / 2).min()) for b in self.blocks]

    def normalized(self, quotient):
        """Blocks moved to orthonormal quotient coordinates; the total becomes the identity."""
        C = np.column_stack([quotient.coordinates(xi) for xi in self.basis])
        left = np.linalg.pinv(C.conj().T)
        right = np.linalg.pinv(C)
        return SemispectralMeasure(self.points, [left @ b @ right for b in self.blocks], self.kind)

    def to_json(self):
        return {
            "kind": self.kind,
            "points": [_point_json(p) for p in self.points],
            "blocks": [_matrix_json(b) for b in self.blocks],
        }

    @classmethod
    def from_json(cls, obj):
        kind = obj.get("kind", REAL)
        pts = [[complex(c[0], c[1]) if isinstance(c, list) else c for c in p] for p in obj["points"]]
        pts = np.array(pts, dtype=float if kind == REAL else complex)
        return cls(pts, [_matrix_from_json(b) for b in obj["blocks"]], kind)


def _point_json(p):
    return [[float(np.real(c)), float(np.imag(c))] if np.iscomplexobj(p) else float(c) for c in p]


def _matrix_json(M):
    return [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in np.asarray(M, dtype=complex)]


def _matrix_from_json(obj):
    return np.array([[complex(z["re"], z.get("im", 0.0)) for z in row] for row in obj], dtype=complex)


def semispectral_from_family(family, basis, quotient=None, tol=DEFAULT_TOL):
    """Assemble F_x from polarized members over ``basis``.

    With a ``quotient`` the blocks are compressed onto the complement of the
    null space of the seminorm. A non-PSD block raises PSDDefectError.
    """
    basis = list(basis)
    family.require(k for a in basis for b in basis for k in polar_keys(a, b))
    forms = [[polarize(family, a, b).measure for b in basis] for a in basis]
    pts = [p for row in forms for m in row for p in m.points]
    merged = SignedAtomicMeasure(family.dim, family.kind, np.array(pts).reshape(len(pts), family.dim) if pts else (),
                                 np.ones(len(pts)))
    N = len(basis)
    blocks = []
    for x in merged.points:
        M = np.array([[forms[a][b].weight_at(x) for b in range(N)] for a in range(N)], dtype=complex)
        blocks.append(M.T)
    F = SemispectralMeasure(merged.points, blocks, family.kind, basis)
    if quotient is not None:
        C = np.column_stack([quotient.coordinates(xi) for xi in basis]) if N else np.zeros((0, 0))
        P = np.linalg.pinv(C) @ C if C.size else np.zeros((N, N))
        F.blocks = [P @ b @ P for b in F.blocks]
    scale = max(1.0, float(np.linalg.norm(F.total, 2)) if N else 0.0)
    for x, lam in zip(F.points, F.min_eigenvalues()):
        if lam < -tol * scale:
            raise PSDDefectError(f"block at {x.tolist()} has eigenvalue {lam:.3e}", x.tolist(), lam)
    return F


@dataclass
class SpectralDilation:
    """Isometry V (K x r) and coordinate projections E_j on C^K with V^H E_j V = F_j."""

    V: np.ndarray = field(repr=False)
    projections: list = field(repr=False)
    points: np.ndarray = None
    ranks: list = None
    kind: str = REAL

    @property
    def dimension(self):
        return self.V.shape[0]

    @property
    def operators(self):
        return self.projections

    def compressed(self):
        return [self.V.conj().T @ E @ self.V for E in self.projections]

    def projection_defects(self):
        """Max of ||E_j^2 - E_j||, ||E_j - E_j^H|| and ||E_j E_k|| (j != k)."""
        if self.dimension == 0:
            return 0.0
        worst = 0.0
        for j, E in enumerate(self.projections):
            worst = max(worst, np.linalg.norm(E @ E - E, 2), np.linalg.norm(E - E.conj().T, 2))
            for k in range(j + 1, len(self.projections)):
                worst = max(worst, np.linalg.norm(E @ self.projections[k], 2))
        worst = max(worst, np.linalg.norm(sum(self.projections) - np.eye(self.dimension), 2))
        return float(worst)


def _psd_root(block, tol, scale, point):
    H = (block + block.conj().T) / 2
    lam, Q = np.linalg.eigh(H)
    if lam.size and lam[0] < -tol * scale:
        raise PSDDefectError(f"block at {point} has eigenvalue {lam[0]:.3e}", point, float(lam[0]))
    cut = tol * max(float(lam[-1]) if lam.size else 0.0, 0.0)
    keep = lam > cut
    return np.sqrt(lam[keep])[:, None] * Q[:, keep].conj().T


def naimark_dilate(F, tol=DEFAULT_TOL):
    """Minimal finite Naimark dilation: the direct sum of the ranges of the F_j^{1/2}."""
    scale = max(1.0, float(np.linalg.norm(F.total, 2)) if F.rank else 0.0)
    roots = [_psd_root(b, tol, scale, np.asarray(x).tolist()) for x, b in zip(F.points, F.blocks)]
    ranks = [R.shape[0] for R in roots]
    K = sum(ranks)
    V = np.vstack(roots) if roots else np.zeros((0, F.rank))
    V = V.reshape(K, F.rank)
    projections, start = [], 0
    for rk in ranks:
        E = np.zeros((K, K))
        E[start:start + rk, start:start + rk] = np.eye(rk)
        projections.append(E)
        start += rk
    return SpectralDilation(V, projections, np.asarray(F.points), ranks, F.kind)


def _phi_values(measure, phi, points):
    pts = measure.points if points is None else np.asarray(points)
    return [complex(phi(np.atleast_1d(p))) for p in pts]


def spectral_operator(measure, phi, points=None):
    """sum_j phi(x_j) Op_j for a SemispectralMeasure (Op = F) or SpectralDilation (Op = E)."""
    ops = measure.operators
    vals = _phi_values(measure, phi, points)
    if len(vals) != len(ops):
        raise DimensionMismatchError("points and operators disagree in number")
    n = ops[0].shape[0] if ops else 0
    return sum((v * E for v, E in zip(vals, ops)), np.zeros((n, n), dtype=complex))


def spectral_integral(measure, phi, f, g, points=None):
    """sum_j phi(x_j) <Op_j f, g>."""
    T = spectral_operator(measure, phi, points)
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    return complex(g.conj() @ T @ f)


def multiplicativity_defect(measure, psi1, psi2, points=None):
    """||int psi1*psi2 - (int psi1)(int psi2)||; zero for projection-valued measures."""
    prod = spectral_operator(measure, lambda x: psi1(x) * psi2(x), points)
    comp = spectral_operator(measure, psi1, points) @ spectral_operator(measure, psi2, points)
    return float(np.linalg.norm(prod - comp, 2)) if prod.size else 0.0


def dilated_multiplication(dilation, i, points=None):
    """B_i = sum_j (x_j)_i E_j (coordinate ``i`` is 1-based)."""
    pts = dilation.points if points is None else np.asarray(points)
    d = pts.shape[1]
    mi.unit_index(i, d)
    return spectral_operator(dilation, lambda x: x[i - 1], pts)


def compression_defect(dilation, seq, basis, i):
    """max |<B_i V f, V g> - <A_i f, g>| over basis coordinates f, g."""
    B = dilated_multiplication(dilation, i)
    lhs = dilation.V.conj().T @ B @ dilation.V
    return float(np.max(np.abs(lhs - shift_form_matrix(seq, basis, i)), initial=0.0))


def vacuum_coordinates(basis, quotient=None):
    """Basis coordinates f with sum_a f_a xi^a equal to the constant 1 modulo the null space."""
    dim = basis[0].dim
    one = CoefficientVector.monomial(mi.zero_index(dim))
    f = np.zeros(len(basis), dtype=complex)
    for a, xi in enumerate(basis):
        if xi == one:
            f[a] = 1.0
            return f
    if quotient is None:
        raise ValueError("the constant polynomial is not a basis vector; pass a quotient basis")
    C = np.column_stack([quotient.coordinates(xi) for xi in basis])
    f, *_ = np.linalg.lstsq(C, quotient.coordinates(one), rcond=None)
    return f


def reconstruct_moments(dilation, vacuum, D_max, points=None):
    """a_n = sum_j x_j^n <E_j v, v> (or c_{m,n} with z^m conj(z)^n) up to degree D_max."""
    pts = dilation.points if points is None else np.asarray(points)
    v = np.asarray(vacuum, dtype=complex)
    w = np.array([float(np.real(v.conj() @ E @ v)) for E in dilation.projections])
    idx = mi.indices_up_to(pts.shape[1], D_max)
    table = mi.monomial_table(pts, idx)
    if dilation.kind == REAL:
        vals = table.T @ w
        return TruncatedSequence(pts.shape[1], REAL, D_max, dict(zip(idx, np.real(vals).tolist())))
    C = table.T @ (w[:, None] * table.conj())
    C = (C + C.conj().T) / 2
    return TruncatedSequence(pts.shape[1], dilation.kind, D_max,
                             {(m, n): C[a, b] for a, m in enumerate(idx) for b, n in enumerate(idx)})


@dataclass
class Pipeline:
    sequence: TruncatedSequence
    basis: list
    family: object
    quotient: object
    semispectral: SemispectralMeasure
    dilation: SpectralDilation
    vacuum: np.ndarray

    def reconstruct(self, D_max):
        return reconstruct_moments(self.dilation, self.vacuum, D_max)


def certificate_pipeline(mu, order=1, tol=DEFAULT_TOL):
    """Measure -> certificate family over monomials of degree <= order -> F -> dilation."""
    basis = [CoefficientVector.monomial(n) for n in mi.indices_up_to(mu.dim, order)]
    seq = moments_of(mu, 2 * order + 2)
    family = generate_certificate(mu, polarization_closure(basis))
    quotient = null_space(seq, order, tol)
    F = semispectral_from_family(family, basis, quotient, tol)
    dil = naimark_dilate(F, tol)
    vacuum = dil.V @ vacuum_coordinates(basis, quotient)
    return Pipeline(seq, basis, family, quotient, F, dil, vacuum)
