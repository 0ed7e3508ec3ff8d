import numpy as np
import pytest

from momentcert.errors import PositivityError
from momentcert.sequences import AtomicMeasure
from momentcert.weaklimits import (
    COMPACT_TESTS,
    SUITES,
    MeasureSequence,
    audit_part1,
    audit_part2,
    integrate,
    run_suites,
)


def mix(k, far):
    return AtomicMeasure(1, "real", [0.0, far], [1 - 1 / k, 1 / k])


def test_integrate_examples():
    sq = lambda x: x[0] ** 2  # noqa: E731
    assert integrate(AtomicMeasure(1, "real", [0.0], [1.0]), sq) == 0
    for k in (2, 4, 16):
        assert integrate(mix(k, float(k)), sq) == pytest.approx(k)
        assert integrate(AtomicMeasure(1, "real", [1 / k], [1.0]), sq) == pytest.approx(1 / k**2)


def test_integrate_linear():
    a = AtomicMeasure(1, "real", [0.5, 2.0], [0.25, 0.75])
    f, g = (lambda x: x[0]), (lambda x: np.sin(x[0]))
    assert integrate(a, lambda x: 2 * f(x) - 3 * g(x)) == pytest.approx(2 * integrate(a, f) - 3 * integrate(a, g))


def test_masses_checked():
    with pytest.raises(ValueError):
        MeasureSequence([AtomicMeasure(1, "real", [0.0], [0.5])])


def test_part1_rejects_negative_phi():
    seq = MeasureSequence([AtomicMeasure(1, "real", [1.0], [1.0])])
    with pytest.raises(PositivityError):
        audit_part1(seq, seq.terms[0], lambda x: x[0] - 2, 1.0, COMPACT_TESTS)


def test_part1_stationary_bound_equals_hypothesis():
    mu = AtomicMeasure(1, "real", [-1.0, 1.0], [0.5, 0.5])
    rep = audit_part1(MeasureSequence([mu] * 3), mu, lambda x: x[0] ** 2, 1.0, COMPACT_TESTS)
    assert rep.values["limit_integral"] == rep.values["sup_integral"]


def test_non_convergent_sequence_is_detected():
    seq = MeasureSequence([AtomicMeasure(1, "real", [(-1.0) ** k], [1.0]) for k in range(1, 9)])
    rep = audit_part2(seq, AtomicMeasure(1, "real", [1.0], [1.0]), lambda x: 1.0, 1.0, 1.0, COMPACT_TESTS)
    assert not rep.weak_convergence and not rep.falsification


@pytest.mark.parametrize("suite", SUITES, ids=lambda s: s.name)
def test_bundled_suite(suite):
    rep = suite.run()
    assert suite.matches(rep)
    assert not rep.falsification


def test_necessity_example():
    rep = next(s for s in SUITES if s.name == "part2-necessity").run()
    assert rep.hypotheses["square_bounded"] is False
    assert rep.conclusion is False
    assert rep.hypotheses["converges_to_a"] is True


def test_run_suites_all_match():
    assert all(m for _, _, m in run_suites())
