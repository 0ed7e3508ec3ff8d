"""Measure families indexed by coefficient vectors, and their certification checks."""
from dataclasses import dataclass, field

import numpy as np

from . import multiindex as mi
from .errors import DimensionMismatchError, IncompletenessError
from .rkhs import DEFAULT_TOL, seminorm
from .sequences import (
    REAL,
    AtomicMeasure,
    CoefficientVector,
    SignedAtomicMeasure,
    linear_combination,
    localized_value,
    poly_values,
)

GENERATED = "generated_from_measure"
USER_SUPPLIED = "user_supplied"
DEFAULT_SCALINGS = (-1, 1j, 2)


def polar_keys(xi, eta):
    """Members entering mu_{xi,eta}, in the order (xi+eta, xi-eta, xi+i*eta, xi-i*eta)."""
    ieta = eta * 1j
    return (xi + eta, xi - eta, xi + ieta, xi - ieta)


def parallelogram_keys(xi, eta):
    return (xi + eta, xi - eta, eta)


def polarization_closure(basis):
    """Basis, zero, and every combination polarize() needs over ordered basis pairs."""
    out = {CoefficientVector.zero(basis[0].dim): None} if basis else {}
    for xi in basis:
        out[xi] = None
    for xi in basis:
        for eta in basis:
            for key in polar_keys(xi, eta):
                out[key] = None
    return list(out)


def parallelogram_closure(xis):
    out = dict.fromkeys(xis)
    for xi in xis:
        for eta in xis:
            for key in parallelogram_keys(xi, eta):
                out[key] = None
    return list(out)


def scaling_closure(basis, scalings=DEFAULT_SCALINGS):
    out = dict.fromkeys(basis)
    for xi in basis:
        for z in scalings:
            out[xi * z] = None
    return list(out)


class MeasureFamily:
    """Finite collection {mu_xi} keyed by exact coefficient vectors."""

    def __init__(self, dim, kind, members, provenance=USER_SUPPLIED):
        self.dim = dim
        self.kind = kind
        self.provenance = provenance
        self.members = {}
        for xi, mu in dict(members).items():
            if xi.dim != dim or mu.dim != dim:
                raise DimensionMismatchError(f"member {xi} does not live in dimension {dim}")
            if mu.kind != kind:
                raise DimensionMismatchError(f"member {xi} is a {mu.kind} measure in a {kind} family")
            if not isinstance(mu, AtomicMeasure):
                mu = AtomicMeasure(mu.dim, mu.kind, mu.points, mu.weights)
            self.members[xi] = mu

    def __len__(self):
        return len(self.members)

    def __contains__(self, xi):
        return xi in self.members

    def __iter__(self):
        return iter(self.members.items())

    def require(self, keys):
        missing = [k for k in dict.fromkeys(keys) if k not in self.members]
        if missing:
            raise IncompletenessError(missing)

    def __getitem__(self, xi):
        try:
            return self.members[xi]
        except KeyError:
            raise IncompletenessError([xi]) from None

    def replace(self, xi, mu):
        members = dict(self.members)
        members[xi] = mu
        return MeasureFamily(self.dim, self.kind, members, USER_SUPPLIED)

    def to_json(self):
        return {
            "dim": self.dim,
            "kind": self.kind,
            "provenance": self.provenance,
            "members": [{"xi": xi.to_json(), "measure": mu.to_json()} for xi, mu in self.members.items()],
        }

    @classmethod
    def from_json(cls, obj):
        dim = int(obj["dim"])
        kind = obj.get("kind", REAL)
        members = {}
        for entry in obj["members"]:
            xi = CoefficientVector.from_json(entry["xi"], dim)
            members[xi] = AtomicMeasure.from_json(entry["measure"])
        return cls(dim, kind, members, obj.get("provenance", USER_SUPPLIED))


def generate_certificate(mu, xi_set):
    """The family mu_xi = |p_xi|^2 mu, which satisfies every moment and positivity condition."""
    members = {}
    for xi in xi_set:
        if xi.dim != mu.dim:
            raise DimensionMismatchError(f"xi of dimension {xi.dim} for a {mu.dim}-dimensional measure")
        w = np.abs(poly_values(xi, mu.points)) ** 2 * mu.weights if len(mu) else np.zeros(0)
        members[xi] = AtomicMeasure(mu.dim, mu.kind, mu.points, w)
    return MeasureFamily(mu.dim, mu.kind, members, GENERATED)


# --------------------------------------------------------------------------- #
# moment conditions
# --------------------------------------------------------------------------- #


@dataclass
class Residual:
    xi: CoefficientVector
    index: tuple
    target: complex
    value: complex
    residual: float
    scale: float
    ok: bool

    def to_json(self):
        idx = self.index
        return {
            "xi": self.xi.to_json(),
            "index": [mi.to_json(n) for n in idx] if isinstance(idx[0], tuple) else mi.to_json(idx),
            "target": _cjson(self.target),
            "value": _cjson(self.value),
            "residual": self.residual,
            "ok": self.ok,
        }


def _cjson(z):
    z = complex(z)
    return z.real if z.imag == 0 else {"re": z.real, "im": z.imag}


@dataclass
class MomentConditionReport:
    records: list = field(default_factory=list)
    tol: float = DEFAULT_TOL

    @property
    def passed(self):
        return all(r.ok for r in self.records)

    @property
    def max_relative_residual(self):
        return max((r.residual / r.scale for r in self.records), default=0.0)

    def failures(self):
        return [r for r in self.records if not r.ok]

    def to_json(self):
        return {
            "check": "moment_conditions",
            "verdict": "pass" if self.passed else "fail",
            "max_relative_residual": self.max_relative_residual,
            "records": [r.to_json() for r in self.records],
        }


def _condition_indices(kind, d):
    if kind == REAL:
        return [(n,) for n in mi.truncation_set(d, mi.N1_UNION_2N1)]
    n1 = mi.truncation_set(d, mi.N1)
    return [(m, n) for m in n1 for n in n1]


def verify_moment_conditions(family, seq, tol=DEFAULT_TOL, xis=None):
    """Check a^xi_n = int x^n dmu_xi on {0, e_i, 2e_i} (real) or c^xi_{m,n} on N1 x N1 (complex)."""
    if seq.dim != family.dim or seq.kind != family.kind:
        raise DimensionMismatchError("sequence and family disagree in dimension or kind")
    xis = list(family.members) if xis is None else list(xis)
    family.require(xis)
    conds = _condition_indices(family.kind, family.dim)
    report = MomentConditionReport(tol=tol)
    for xi in xis:
        mu = family[xi]
        for key in conds:
            target = localized_value(seq, xi, *key)
            if family.kind == REAL:
                integrand = mi.monomial_table(mu.points, [key[0]])[:, 0] if len(mu) else np.zeros(0)
            else:
                integrand = np.array([mi.monomial_eval(p, key[0], key[1]) for p in mu.points])
            value = complex(np.sum(mu.weights * integrand))
            if family.kind == REAL:
                target = complex(target.real)
            res = abs(target - value)
            scale = max(1.0, abs(target), float(np.sum(mu.weights * np.abs(integrand))))
            idx = key[0] if family.kind == REAL else key
            report.records.append(Residual(xi, idx, target, value, res, scale, res <= tol * scale))
    return report


# --------------------------------------------------------------------------- #
# parallelogram positivity
# --------------------------------------------------------------------------- #


@dataclass
class ParallelogramRecord:
    xi: CoefficientVector
    eta: CoefficientVector
    residual: SignedAtomicMeasure
    min_weight: float
    threshold: float
    ok: bool

    def to_json(self):
        return {
            "xi": self.xi.to_json(),
            "eta": self.eta.to_json(),
            "min_weight": self.min_weight,
            "ok": self.ok,
        }


@dataclass
class ParallelogramReport:
    records: list = field(default_factory=list)
    zero_member_ok: bool = True
    zero_member_mass: float = 0.0
    tol: float = DEFAULT_TOL

    @property
    def passed(self):
        return self.zero_member_ok and all(r.ok for r in self.records)

    def failures(self):
        return [r for r in self.records if not r.ok]

    def to_json(self):
        return {
            "check": "parallelogram_positivity",
            "verdict": "pass" if self.passed else "fail",
            "zero_member_ok": self.zero_member_ok,
            "records": [r.to_json() for r in self.records],
        }


def verify_parallelogram_positivity(family, pairs, tol=DEFAULT_TOL):
    """mu_0 = 0 and mu_{xi+eta} + mu_{xi-eta} - 2 mu_eta >= 0 atom by atom, for every pair."""
    pairs = list(pairs)
    family.require(k for xi, eta in pairs for k in parallelogram_keys(xi, eta))
    report = ParallelogramReport(tol=tol)
    zero = CoefficientVector.zero(family.dim)
    if zero in family:
        m0 = family[zero]
        report.zero_member_mass = float(np.sum(np.abs(m0.weights)))
        report.zero_member_ok = report.zero_member_mass <= tol
    for xi, eta in pairs:
        plus, minus, base = (family[k] for k in parallelogram_keys(xi, eta))
        res = linear_combination([(1, plus), (1, minus), (-2, base)])
        total = float(plus.total_mass() + minus.total_mass() + 2 * base.total_mass())
        thresh = -tol * max(1.0, total)
        w = res.weights.real
        min_w = float(w.min()) if len(w) else 0.0
        ok = min_w >= thresh and bool(np.all(np.abs(res.weights.imag) <= tol * max(1.0, total)))
        report.records.append(ParallelogramRecord(xi, eta, res, min_w, thresh, ok))
    return report


# --------------------------------------------------------------------------- #
# polarization and the sesquilinear audit
# --------------------------------------------------------------------------- #


@dataclass
class PolarizedForm:
    xi: CoefficientVector
    eta: CoefficientVector
    measure: SignedAtomicMeasure

    def __call__(self, region=None):
        return complex(self.measure.mass(region))


def polarize(family, xi, eta):
    """mu_{xi,eta} = (mu_{xi+eta} - mu_{xi-eta} + i mu_{xi+i eta} - i mu_{xi-i eta}) / 4."""
    keys = polar_keys(xi, eta)
    family.require(keys)
    pp, pm, ip, im = (family[k] for k in keys)
    m = linear_combination([(0.25, pp), (-0.25, pm), (0.25j, ip), (-0.25j, im)])
    return PolarizedForm(xi, eta, m)


@dataclass
class RegionRecord:
    label: str
    matrix: np.ndarray
    min_eigenvalue: float
    hermitian_defect: float
    schwarz_excess: float
    ok: bool


@dataclass
class SesquilinearReport:
    regions: list = field(default_factory=list)
    total_mass_residuals: list = field(default_factory=list)
    homogeneity_residuals: list = field(default_factory=list)
    tol: float = DEFAULT_TOL
    scale: float = 1.0

    @property
    def passed(self):
        bound = self.tol * self.scale
        return (
            all(r.ok for r in self.regions)
            and all(v <= bound for _, v in self.total_mass_residuals)
            and all(v <= bound for _, _, v in self.homogeneity_residuals)
        )

    def to_json(self):
        return {
            "check": "sesquilinear_audit",
            "verdict": "pass" if self.passed else "fail",
            "regions": [
                {
                    "region": r.label,
                    "min_eigenvalue": r.min_eigenvalue,
                    "hermitian_defect": r.hermitian_defect,
                    "schwarz_excess": r.schwarz_excess,
                    "ok": r.ok,
                }
                for r in self.regions
            ],
            "total_mass_residuals": [v for _, v in self.total_mass_residuals],
            "homogeneity_residuals": [v for _, _, v in self.homogeneity_residuals],
        }


def _region_label(region):
    if region is None:
        return "X"
    if callable(region):
        return getattr(region, "__name__", "predicate")
    return str([np.atleast_1d(np.asarray(q)).tolist() for q in region])


def sesquilinear_audit(family, basis, regions, seq=None, tol=DEFAULT_TOL,
                       check_homogeneity=False, scalings=DEFAULT_SCALINGS):
    """Audit positivity and Hermitian symmetry of sigma -> [mu_{xi_a, xi_b}(sigma)],
    the Schwarz bound, mu_{xi,xi}(X) = p(xi)^2 (when ``seq`` is given) and,
    optionally, mu_{z xi} = |z|^2 mu_xi.
    """
    basis = list(basis)
    needed = [k for a in basis for b in basis for k in polar_keys(a, b)]
    if check_homogeneity:
        needed += list(basis) + [xi * z for xi in basis for z in scalings]
    family.require(needed)

    forms = [[polarize(family, a, b) for b in basis] for a in basis]
    if seq is not None:
        p = np.array([seminorm(seq, xi) for xi in basis])
    else:
        p = np.array([np.sqrt(max(forms[a][a]().real, 0.0)) for a in range(len(basis))])
    scale = max([1.0] + [float(abs(forms[a][a]())) for a in range(len(basis))] + list(p**2))
    report = SesquilinearReport(tol=tol, scale=scale)
    bound = tol * scale

    for region in regions:
        M = np.array([[f(region) for f in row] for row in forms], dtype=complex).reshape(len(basis), len(basis))
        herm = float(np.max(np.abs(M - M.conj().T), initial=0.0))
        lam = float(np.linalg.eigvalsh((M + M.conj().T) / 2).min()) if len(basis) else 0.0
        excess = float(np.max(np.abs(M) - np.outer(p, p), initial=-np.inf)) if len(basis) else 0.0
        ok = herm <= bound and lam >= -bound and excess <= bound
        report.regions.append(RegionRecord(_region_label(region), M, lam, herm, excess, ok))

    if seq is not None:
        for a, xi in enumerate(basis):
            report.total_mass_residuals.append((xi, abs(forms[a][a]() - p[a] ** 2)))

    if check_homogeneity:
        for xi in basis:
            for z in scalings:
                diff = linear_combination([(1, family[xi * z]), (-abs(z) ** 2, family[xi])])
                report.homogeneity_residuals.append((xi, z, float(np.max(np.abs(diff.weights), initial=0.0))))
    return report
