"""Numerical harness for passing moment functionals to weak limits of atomic probability measures.

Part 1: with phi >= 0 and int phi dmu_k <= c for all k, weak convergence against
compactly supported test functions gives int phi dmu <= c.
Part 2: with int |phi|^2 dmu_k <= c uniformly and int phi dmu_k -> a, weak
convergence against bounded test functions gives int phi dmu = a.

Weak convergence is audited on a finite prefix of the sequence, not proven.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import PositivityError
from .sequences import REAL, AtomicMeasure

MASS_TOL = 1e-12
DEFAULT_TOL = 1e-9


def integrate(mu, phi):
    """sum_j w_j phi(x_j)."""
    total = 0.0
    for p, w in mu:
        total = total + w * phi(p)
    return total


@dataclass
class TestFunction:
    """A black-box test function; ``support_radius`` is None for bounded, non-compact ones."""

    func: object
    support_radius: float = None
    name: str = ""

    __test__ = False

    def __call__(self, x):
        return self.func(x)


class MeasureSequence:
    """Finite prefix mu_{k_1}, mu_{k_2}, ... of a sequence of probability measures."""

    def __init__(self, terms, indices=None):
        self.terms = list(terms)
        self.indices = list(indices) if indices is not None else list(range(1, len(self.terms) + 1))
        if len(self.indices) != len(self.terms):
            raise ValueError("indices and terms differ in length")
        for k, mu in zip(self.indices, self.terms):
            if abs(float(mu.total_mass()) - 1.0) > MASS_TOL:
                raise ValueError(f"term {k} has mass {mu.total_mass()}, expected 1")

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def _weak_convergence(seq, limit, test_functions, tol):
    """Residuals |int psi dmu_k - int psi dlimit| must end below tol and not grow over the tail."""
    out = {}
    for n, psi in enumerate(test_functions):
        target = integrate(limit, psi)
        res = [abs(integrate(mu, psi) - target) for mu in seq]
        tail = res[-3:]
        monotone = all(b <= a + tol for a, b in zip(tail, tail[1:]))
        out[psi.name or f"psi{n}"] = (res, bool(res[-1] <= tol and monotone))
    return out


@dataclass
class LemmaReport:
    part: int
    weak_convergence: bool
    hypotheses: dict
    conclusion: bool
    values: dict = field(default_factory=dict)

    @property
    def hypotheses_hold(self):
        return self.weak_convergence and all(self.hypotheses.values())

    @property
    def falsification(self):
        return self.hypotheses_hold and not self.conclusion

    def to_json(self):
        return {
            "part": self.part,
            "weak_convergence": self.weak_convergence,
            "hypotheses": dict(self.hypotheses),
            "conclusion": self.conclusion,
            "falsification": self.falsification,
            "values": {k: _jsonable(v) for k, v in self.values.items()},
        }


def _jsonable(v):
    if isinstance(v, complex):
        return v.real if v.imag == 0 else {"re": v.real, "im": v.imag}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def audit_part1(seq, limit, phi_nonneg, c, test_functions, tol=DEFAULT_TOL):
    """Part 1 check; (a) weak convergence, (b) int phi dmu_k <= c, (c) int phi dlimit <= c."""
    for mu in list(seq) + [limit]:
        for p, _ in mu:
            v = complex(phi_nonneg(p))
            if v.imag != 0 or v.real < 0:
                raise PositivityError(f"phi is not non-negative at {p.tolist()}: {v}")
    weak = _weak_convergence(seq, limit, test_functions, tol)
    ints = [float(np.real(integrate(mu, phi_nonneg))) for mu in seq]
    lim = float(np.real(integrate(limit, phi_nonneg)))
    return LemmaReport(
        part=1,
        weak_convergence=all(ok for _, ok in weak.values()),
        hypotheses={"bounded": max(ints) <= c + tol},
        conclusion=lim <= c + tol,
        values={"sup_integral": max(ints), "limit_integral": lim, "c": c},
    )


def audit_part2(seq, limit, phi, a, c, test_functions, tol=DEFAULT_TOL):
    """Part 2 check; (a) weak convergence, (b) int phi dmu_k -> a, (c) int |phi|^2 dmu_k <= c,
    (d) int phi dlimit = a."""
    weak = _weak_convergence(seq, limit, test_functions, tol)
    ints = [complex(integrate(mu, phi)) for mu in seq]
    squares = [float(np.real(integrate(mu, lambda x: abs(phi(x)) ** 2))) for mu in seq]
    converges = abs(ints[-1] - a) <= tol and (len(ints) < 2 or abs(ints[-1] - ints[-2]) <= tol)
    lim = complex(integrate(limit, phi))
    return LemmaReport(
        part=2,
        weak_convergence=all(ok for _, ok in weak.values()),
        hypotheses={"converges_to_a": converges, "square_bounded": max(squares) <= c + tol},
        conclusion=abs(lim - a) <= tol,
        values={"last_integral": ints[-1], "sup_square_integral": max(squares), "limit_integral": lim, "a": a},
    )


# --------------------------------------------------------------------------- #
# bundled suites
# --------------------------------------------------------------------------- #

# k = 4**j keeps 1/k, 1/sqrt(k) and k * (1/k) exact in binary floating point
INDICES = [4.0**j for j in range(41)]


def _mix(k, far):
    return AtomicMeasure(1, REAL, [0.0, far], [1 - 1 / k, 1 / k])


def _bump(radius):
    return TestFunction(lambda x: max(0.0, 1.0 - abs(x[0]) / radius) ** 2, radius, f"bump{radius:g}")


COMPACT_TESTS = [_bump(1.0), _bump(5.0), TestFunction(lambda x: max(0.0, 1.0 - (x[0] - 0.5) ** 2), 1.5, "shifted")]
BOUNDED_TESTS = COMPACT_TESTS + [
    TestFunction(lambda x: 1.0 / (1.0 + x[0] ** 2), None, "lorentz"),
    TestFunction(lambda x: 1.0, None, "one"),
]


@dataclass
class Suite:
    name: str
    part: int
    expected: dict
    build: object = field(repr=False)

    def run(self, tol=DEFAULT_TOL):
        return self.build(tol)

    def matches(self, report):
        got = {"weak_convergence": report.weak_convergence, "conclusion": report.conclusion,
               **report.hypotheses}
        return all(got[k] == v for k, v in self.expected.items()) and not report.falsification


def _shrinking_dirac(tol):
    seq = MeasureSequence([AtomicMeasure(1, REAL, [1 / k], [1.0]) for k in INDICES], INDICES)
    return audit_part1(seq, AtomicMeasure(1, REAL, [0.0], [1.0]), lambda x: x[0] ** 2, 1.0, COMPACT_TESTS, tol)


def _escaping_mass_p1(tol):
    seq = MeasureSequence([_mix(k, float(k)) for k in INDICES], INDICES)
    return audit_part1(seq, AtomicMeasure(1, REAL, [0.0], [1.0]), lambda x: x[0] ** 2, 1.0, COMPACT_TESTS, tol)


def _stationary(tol):
    mu = AtomicMeasure(1, REAL, [-1.0, 1.0], [0.5, 0.5])
    seq = MeasureSequence([mu] * 5)
    return audit_part1(seq, mu, lambda x: x[0] ** 2, 1.0, COMPACT_TESTS, tol)


def _sqrt_escape(tol):
    seq = MeasureSequence([_mix(k, float(np.sqrt(k))) for k in INDICES], INDICES)
    return audit_part2(seq, AtomicMeasure(1, REAL, [0.0], [1.0]), lambda x: x[0], 0.0, 1.0, BOUNDED_TESTS, tol)


def _necessity(tol):
    seq = MeasureSequence([_mix(k, float(k)) for k in INDICES], INDICES)
    return audit_part2(seq, AtomicMeasure(1, REAL, [0.0], [1.0]), lambda x: x[0], 1.0, 1.0, BOUNDED_TESTS, tol)


def _constant_phi(tol):
    seq = MeasureSequence([AtomicMeasure(1, REAL, [1 / k], [1.0]) for k in INDICES], INDICES)
    return audit_part2(seq, AtomicMeasure(1, REAL, [0.0], [1.0]), lambda x: 3.0, 3.0, 9.0, BOUNDED_TESTS, tol)


SUITES = [
    Suite("part1-shrinking-dirac", 1,
          {"weak_convergence": True, "bounded": True, "conclusion": True}, _shrinking_dirac),
    Suite("part1-escaping-mass", 1,
          {"weak_convergence": True, "bounded": False}, _escaping_mass_p1),
    Suite("part1-stationary", 1,
          {"weak_convergence": True, "bounded": True, "conclusion": True}, _stationary),
    Suite("part2-sqrt-escape", 2,
          {"weak_convergence": True, "converges_to_a": True, "square_bounded": True, "conclusion": True},
          _sqrt_escape),
    Suite("part2-necessity", 2,
          {"weak_convergence": True, "converges_to_a": True, "square_bounded": False, "conclusion": False},
          _necessity),
    Suite("part2-constant-phi", 2,
          {"weak_convergence": True, "converges_to_a": True, "square_bounded": True, "conclusion": True},
          _constant_phi),
]


def run_suites(tol=DEFAULT_TOL):
    """Run every bundled suite; returns a list of (suite, report, matches_expected)."""
    out = []
    for suite in SUITES:
        report = suite.run(tol)
        out.append((suite, report, suite.matches(report)))
    return out
