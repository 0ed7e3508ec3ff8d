import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import measure_from_atoms, xi1
from momentcert import multiindex as mi
from momentcert.errors import PositivityError, TruncationDepthError
from momentcert.rkhs import (
    check_positive_definite,
    gram_form,
    gram_matrix,
    null_space,
    seminorm,
    shift_forms,
)
from momentcert.sequences import AtomicMeasure, CoefficientVector, TruncatedSequence, localize, moments_of
from oracles import random_atoms, random_coeffs, two_by_two_eigenvalues

ONES = TruncatedSequence.from_dense([1] * 7)
TWO_POINT = TruncatedSequence.from_dense([1, 0, 1, 0, 1])
ZERO = TruncatedSequence.from_dense([0] * 5)


def test_gram_examples():
    assert gram_matrix(ONES, 1).matrix.tolist() == [[1, 1], [1, 1]]
    assert gram_matrix(TWO_POINT, 1).matrix.tolist() == [[1, 0], [0, 1]]
    assert gram_matrix(TWO_POINT, 0).matrix.tolist() == [[1]]
    with pytest.raises(TruncationDepthError):
        gram_matrix(TWO_POINT, 3)


def test_gram_complex_pairs_dimension():
    mu = AtomicMeasure(1, "complex", [1j, 2.0], [0.5, 0.5])
    G = gram_matrix(moments_of(mu, 2), 1, pairs=True)
    assert G.size == 4 and G.hermitian_defect() == 0


def test_check_psd_examples():
    ones = check_positive_definite(ONES, 2)
    # all-ones 3x3 has eigenvalues {0, 0, 3}
    assert ones.passed and abs(ones.min_eigenvalue) < 1e-12
    bad = check_positive_definite(TruncatedSequence.from_dense([1, 0, -1]), 1)
    assert bad.verdict == "fail" and bad.min_eigenvalue == pytest.approx(-1.0)
    assert check_positive_definite(ZERO, 2).passed
    assert bad.to_json() == {"min_eigenvalue": bad.min_eigenvalue, "verdict": "fail", "order": 1}


def test_check_psd_against_closed_form():
    seq = TruncatedSequence.from_dense([1, 2, 1])
    lo, hi = two_by_two_eigenvalues(1, 2, 1)
    rep = check_positive_definite(seq, 1)
    assert rep.min_eigenvalue == pytest.approx(lo) == pytest.approx(-1.0)
    assert not rep.passed


def test_seminorm_examples():
    assert seminorm(ONES, xi1(1, 1)) == pytest.approx(2.0)
    assert seminorm(ONES, xi1(1, -1)) == pytest.approx(0.0, abs=1e-12)
    assert seminorm(ONES, CoefficientVector.zero(1)) == 0.0
    with pytest.raises(PositivityError):
        seminorm(TruncatedSequence.from_dense([1, 0, -1]), xi1(0, 1))


def test_null_space_examples():
    q = null_space(ONES, 2)
    assert q.quotient_dim == 1 and len(q.null_basis) == 2
    assert q.contains(xi1(1, -1, 0))
    assert not q.contains(xi1(1, 1, 0))
    for delta in q.null_basis:
        assert seminorm(ONES, delta) <= 1e-6
    q2 = null_space(TWO_POINT, 1)
    assert q2.quotient_dim == 2 and q2.null_basis == []
    q0 = null_space(ZERO, 2)
    assert q0.quotient_dim == 0 and len(q0.null_basis) == 3


def test_quotient_coordinates_are_isometric(rng):
    mu = measure_from_atoms(random_atoms(rng, 2, max_atoms=3), 2)
    seq = moments_of(mu, 4)
    q = null_space(seq, 2)
    assert q.quotient_dim <= len(mu)
    for _ in range(5):
        a = CoefficientVector(2, random_coeffs(rng, 2, 2))
        b = CoefficientVector(2, random_coeffs(rng, 2, 2))
        lhs = np.vdot(q.coordinates(b), q.coordinates(a))
        assert lhs == pytest.approx(gram_form(seq, a, b), abs=1e-9 * seq.scale())


def test_shift_forms_examples():
    rep = shift_forms(ONES, 1, 1)
    assert rep.symmetry_defect == 0 and rep.passed
    seq = moments_of(AtomicMeasure(2, "real", [[1.0, 2.0]], [1.0]), 4)
    rep = shift_forms(seq, 1, 1)
    assert rep.commutator_defects == {(1, 2): 0.0}
    zero = TruncatedSequence(2, "real", 4, {n: 0.0 for n in mi.indices_up_to(2, 4)})
    rep = shift_forms(zero, 1, 2)
    assert rep.symmetry_defect == 0 and all(v == 0 for v in rep.commutator_defects.values())
    with pytest.raises(TruncationDepthError):
        shift_forms(ONES, 3, 1)


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_seminorm_squared_is_localized_mass(seed):
    rng = np.random.default_rng(seed)
    seq = moments_of(measure_from_atoms(random_atoms(rng, 2), 2), 4)
    xi = CoefficientVector(2, random_coeffs(rng, 2, 2))
    assert seminorm(seq, xi) ** 2 == pytest.approx(localize(seq, xi)[(0, 0)], abs=1e-9 * seq.scale())


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_parallelogram_law(seed):
    rng = np.random.default_rng(seed)
    seq = moments_of(measure_from_atoms(random_atoms(rng, 2), 2), 4)
    xi = CoefficientVector(2, random_coeffs(rng, 2, 2))
    eta = CoefficientVector(2, random_coeffs(rng, 2, 2))
    p = lambda v: seminorm(seq, v)  # noqa: E731
    lhs = p(xi + eta) ** 2 + p(xi - eta) ** 2
    rhs = 2 * p(xi) ** 2 + 2 * p(eta) ** 2
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, lhs, rhs)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_gram_localization_identity(seed):
    rng = np.random.default_rng(seed)
    d = 2
    seq = moments_of(measure_from_atoms(random_atoms(rng, d), d), 6)
    xi = CoefficientVector(d, random_coeffs(rng, d, 1))
    loc = localize(seq, xi)
    for m in mi.indices_up_to(d, 2):
        for n in mi.indices_up_to(d, 2):
            if mi.degree(m) + mi.degree(n) > loc.max_degree:
                continue
            assert gram_form(seq, xi, xi, m, n) == pytest.approx(loc[mi.add(m, n)], abs=1e-10 * seq.scale())


def test_moment_sequences_are_positive(rng):
    for _ in range(20):
        d = int(rng.integers(1, 4))
        seq = moments_of(measure_from_atoms(random_atoms(rng, d), d), 4)
        for k in range(3):
            assert check_positive_definite(seq, k).passed


def test_complex_moment_sequences_are_positive(rng):
    for _ in range(10):
        mu = measure_from_atoms(random_atoms(rng, 2, complex_points=True), 2, "complex")
        assert check_positive_definite(moments_of(mu, 2), 1).passed
