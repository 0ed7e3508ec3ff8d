"""Per-xi solver for the initial truncations (moments of order <= 2) in atomic measures.

Real targets are mass, first moments and pure second moments; mixed second
moments are deliberately not matched. Complex targets are mass, means
c_{e_i,0} and the full correlation matrix c_{e_i,e_j}.
"""
from dataclasses import dataclass, field

import numpy as np

from . import multiindex as mi
from .errors import InconsistencyError, InfeasibleError, TruncationDepthError
from .families import MeasureFamily, parallelogram_keys, verify_parallelogram_positivity
from .rkhs import DEFAULT_TOL
from .sequences import COMPLEX, REAL, AtomicMeasure, localized_value, moments_of


@dataclass
class TruncationTargets:
    dim: int
    kind: str
    mass: float
    first: np.ndarray
    second: np.ndarray  # pure second moments (real) or correlation matrix (complex)

    def __post_init__(self):
        if self.kind == REAL:
            self.mass = float(np.real_if_close(self.mass))
            self.first = np.asarray(self.first, dtype=float).reshape(self.dim)
            self.second = np.asarray(self.second, dtype=float).reshape(self.dim)
        else:
            self.mass = float(np.real(self.mass))
            self.first = np.asarray(self.first, dtype=complex).reshape(self.dim)
            self.second = np.asarray(self.second, dtype=complex).reshape(self.dim, self.dim)

    @property
    def scale(self):
        return max(1.0, abs(self.mass), float(np.max(np.abs(self.first), initial=0.0)),
                   float(np.max(np.abs(self.second), initial=0.0)))

    def to_json(self):
        if self.kind == REAL:
            return {"kind": REAL, "mass": self.mass, "first": self.first.tolist(),
                    "second_diag": self.second.tolist()}
        return {
            "kind": COMPLEX,
            "mass": self.mass,
            "means": [[z.real, z.imag] for z in self.first],
            "corr": [[[z.real, z.imag] for z in row] for row in self.second],
        }

    @classmethod
    def from_json(cls, obj):
        if obj.get("kind", REAL) == REAL:
            first = obj["first"]
            return cls(len(first), REAL, obj["mass"], first, obj["second_diag"])
        means = [complex(*z) for z in obj["means"]]
        corr = [[complex(*z) for z in row] for row in obj["corr"]]
        return cls(len(means), COMPLEX, obj["mass"], means, corr)


def targets_of_measure(mu):
    """Initial-truncation targets of a measure (used by tests and the CLI)."""
    return targets_from_sequence(moments_of(mu, 2))


def targets_from_sequence(seq, xi=None):
    """Targets read off the localized sequence a^xi (xi=None means the sequence itself)."""
    d = seq.dim
    units = [mi.unit_index(i, d) for i in range(1, d + 1)]
    zero = mi.zero_index(d)

    def val(*key):
        if xi is None:
            return seq[key[0]] if seq.kind == REAL else seq[key]
        return localized_value(seq, xi, *key)

    if seq.kind == REAL:
        mass = np.real(val(zero))
        first = [np.real(val(u)) for u in units]
        second = [np.real(val(tuple(2 * e for e in u))) for u in units]
        return TruncationTargets(d, REAL, mass, first, second)
    mass = np.real(val(zero, zero))
    means = [val(u, zero) for u in units]
    corr = [[val(u, v) for v in units] for u in units]
    return TruncationTargets(d, COMPLEX, mass, means, corr)


@dataclass
class Witness:
    kind: str  # negative_mass | zero_mass | cauchy_schwarz | not_hermitian | psd
    coordinate: int = None
    value: float = 0.0
    vector: list = None

    def to_json(self):
        out = {"kind": self.kind, "value": self.value}
        if self.coordinate is not None:
            out["coordinate"] = self.coordinate
        if self.vector is not None:
            out["vector"] = [[complex(z).real, complex(z).imag] for z in self.vector]
        return out

    def __str__(self):
        if self.kind == "cauchy_schwarz":
            return (f"Cauchy-Schwarz violated in coordinate {self.coordinate}: "
                    f"mass * second - first^2 = {self.value:.6g}")
        if self.kind == "psd":
            return f"centered correlation matrix has eigenvalue {self.value:.6g}"
        if self.kind == "zero_mass":
            return f"zero mass with a non-vanishing moment of size {self.value:.6g}"
        return f"{self.kind}: {self.value:.6g}"


@dataclass
class Feasibility:
    feasible: bool
    witness: Witness = None

    def __bool__(self):
        return self.feasible

    def to_json(self):
        out = {"feasible": self.feasible}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def feasibility(targets, tol=DEFAULT_TOL):
    """Decide whether the initial truncation has a positive representing measure."""
    t = targets
    if t.mass < -tol:
        return Feasibility(False, Witness("negative_mass", value=t.mass))
    if t.kind == COMPLEX:
        herm = float(np.max(np.abs(t.second - t.second.conj().T), initial=0.0))
        if herm > tol * t.scale:
            return Feasibility(False, Witness("not_hermitian", value=herm))
    if t.mass <= tol:
        rest = max(float(np.max(np.abs(t.first), initial=0.0)), float(np.max(np.abs(t.second), initial=0.0)))
        if rest > tol:
            return Feasibility(False, Witness("zero_mass", value=rest))
        return Feasibility(True)
    if t.kind == REAL:
        gaps = t.mass * t.second - t.first**2
        scales = np.maximum(1.0, np.maximum(np.abs(t.mass * t.second), t.first**2))
        bad = np.flatnonzero(gaps < -tol * scales)
        if len(bad):
            i = int(bad[np.argmin(gaps[bad] / scales[bad])])
            return Feasibility(False, Witness("cauchy_schwarz", coordinate=i + 1, value=float(gaps[i])))
        return Feasibility(True)
    C = _centered(t)
    lam, U = np.linalg.eigh(C)
    if lam[0] < -tol * max(1.0, float(np.max(np.abs(lam)))):
        return Feasibility(False, Witness("psd", value=float(lam[0]), vector=U[:, 0].tolist()))
    return Feasibility(True)


def _centered(t):
    H = (t.second + t.second.conj().T) / 2
    return H - np.outer(t.first, t.first.conj()) / t.mass


def solve_initial_truncation(targets, tol=DEFAULT_TOL):
    """Deterministic atomic solution: 2d axis atoms (real) or 2R eigen-direction atoms (complex)."""
    t = targets
    verdict = feasibility(t, tol)
    if not verdict:
        cls = InconsistencyError if verdict.witness.kind == "zero_mass" else InfeasibleError
        raise cls(f"infeasible targets: {verdict.witness}", verdict.witness)
    d = t.dim
    if t.mass <= tol:
        return AtomicMeasure(d, t.kind)
    if t.kind == REAL:
        mean = t.first / t.mass
        ratio = t.second / t.mass
        var = ratio - mean**2
        var[var < tol * np.maximum(1.0, ratio)] = 0.0
        sd = np.sqrt(var)
        pts, ws = [], []
        for i in range(d):
            for sign in (1.0, -1.0):
                p = mean.copy()
                p[i] += sign * np.sqrt(d) * sd[i]
                pts.append(p)
                ws.append(t.mass / (2 * d))
        mu = AtomicMeasure(d, REAL, np.array(pts), ws)
    else:
        mean = t.first / t.mass
        lam, U = np.linalg.eigh(_centered(t))
        keep = lam > tol * max(1.0, float(np.max(np.abs(lam))))
        R = int(keep.sum())
        if R == 0:
            mu = AtomicMeasure(d, COMPLEX, [mean], [t.mass])
        else:
            pts, ws = [], []
            for lam_r, u in zip(lam[keep], U[:, keep].T):
                step = np.sqrt(R * lam_r / t.mass) * u
                pts += [mean + step, mean - step]
                ws += [t.mass / (2 * R)] * 2
            mu = AtomicMeasure(d, COMPLEX, np.array(pts), ws)
    got = targets_of_measure(mu)
    err = max(abs(got.mass - t.mass), float(np.max(np.abs(got.first - t.first))),
              float(np.max(np.abs(got.second - t.second))))
    if err > max(tol, 1e-12) * t.scale * 10:
        raise InfeasibleError(f"post-verification failed: residual {err:.3e}")
    return mu


@dataclass
class FamilySolution:
    family: MeasureFamily
    report: object
    pairs: list = field(default_factory=list)

    @property
    def consistent(self):
        return self.report.passed


def solve_family(seq, xi_set, tol=DEFAULT_TOL):
    """Solve each initial truncation independently, then report parallelogram positivity.

    Raises InfeasibleError naming every xi whose targets have no solution; such
    a xi certifies that ``seq`` is not a moment sequence.
    """
    xi_set = list(dict.fromkeys(xi_set))
    budget = max((2 + 2 * xi.deg if seq.kind == REAL else 1 + xi.deg for xi in xi_set), default=0)
    if budget > seq.max_degree:
        raise TruncationDepthError(f"solving needs degree bound {budget}, have {seq.max_degree}")
    members, bad = {}, {}
    for xi in xi_set:
        targets = targets_from_sequence(seq, xi)
        verdict = feasibility(targets, tol)
        if not verdict:
            bad[xi] = verdict.witness
            continue
        members[xi] = solve_initial_truncation(targets, tol)
    if bad:
        detail = "; ".join(f"{xi}: {w}" for xi, w in bad.items())
        err = InfeasibleError(f"not a moment sequence, infeasible truncations for {detail}",
                              next(iter(bad.values())))
        err.infeasible = bad
        raise err
    family = MeasureFamily(seq.dim, seq.kind, members)
    pairs = [(a, b) for a in xi_set for b in xi_set
             if all(k in family for k in parallelogram_keys(a, b))]
    return FamilySolution(family, verify_parallelogram_positivity(family, pairs, tol), pairs)
