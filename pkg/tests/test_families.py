import numpy as np
import pytest

from conftest import measure_from_atoms, xi1
from momentcert.errors import IncompletenessError
from momentcert.families import (
    MeasureFamily,
    generate_certificate,
    parallelogram_closure,
    polarization_closure,
    polarize,
    scaling_closure,
    sesquilinear_audit,
    verify_moment_conditions,
    verify_parallelogram_positivity,
)
from momentcert.rkhs import basis_gram, gram_matrix
from momentcert.sequences import AtomicMeasure, CoefficientVector, moments_of, poly_values
from oracles import brute_poly, random_atoms, random_coeffs

ONE, X = xi1(1), xi1(0, 1)
ZERO = CoefficientVector.zero(1)


def test_generate_examples(dirac_one):
    fam = generate_certificate(dirac_one, [xi1(1, 1), xi1(1, -1), ZERO])
    assert fam[xi1(1, 1)].weight_at([1.0]) == pytest.approx(4.0)
    assert len(fam[xi1(1, -1)]) == 0
    assert len(fam[ZERO]) == 0


def test_verify_moment_conditions_examples(two_point):
    fam = generate_certificate(two_point, [ONE, X])
    seq = moments_of(two_point, 4)
    rep = verify_moment_conditions(fam, seq)
    assert rep.passed and rep.max_relative_residual == 0
    bad = fam.replace(X, fam[X].scaled(2))
    bad = bad.replace(X, AtomicMeasure(1, "real", bad[X].points, bad[X].weights.real))
    rep = verify_moment_conditions(bad, seq)
    assert not rep.passed
    assert any(r.xi == X and r.index == (0,) for r in rep.failures())
    assert verify_moment_conditions(fam, seq, xis=[]).passed


def test_mixed_indices_not_checked():
    mu = AtomicMeasure(2, "real", [[1.0, 1.0], [-1.0, -1.0]], [0.5, 0.5])
    one = CoefficientVector.monomial((0, 0))
    # same marginals on the axes, opposite mixed moment
    other = AtomicMeasure(2, "real", [[1.0, -1.0], [-1.0, 1.0]], [0.5, 0.5])
    fam = MeasureFamily(2, "real", {one: other})
    rep = verify_moment_conditions(fam, moments_of(mu, 2))
    assert rep.passed and len(rep.records) == 5


def test_missing_member_named(two_point):
    fam = generate_certificate(two_point, [ONE])
    with pytest.raises(IncompletenessError) as err:
        verify_moment_conditions(fam, moments_of(two_point, 4), xis=[ONE, X])
    assert X in err.value.missing


def test_parallelogram_examples(dirac_one):
    xi, eta = xi1(1, 0), xi1(0, 1)
    fam = generate_certificate(dirac_one, parallelogram_closure([xi, eta]) + [ZERO])
    rep = verify_parallelogram_positivity(fam, [(xi, eta)])
    assert rep.passed
    assert rep.records[0].residual.weight_at([1.0]) == pytest.approx(2.0)
    # doubling mu_eta lands exactly on the boundary: 4 + 0 - 2*2 = 0
    doubled = fam.replace(eta, AtomicMeasure(1, "real", [1.0], [2.0]))
    assert verify_parallelogram_positivity(doubled, [(xi, eta)]).passed
    tripled = fam.replace(eta, AtomicMeasure(1, "real", [1.0], [3.0]))
    rep = verify_parallelogram_positivity(tripled, [(xi, eta)])
    assert not rep.passed and rep.records[0].min_weight == pytest.approx(-2.0)
    rep = verify_parallelogram_positivity(fam, [(ZERO, ZERO)])
    assert rep.passed and rep.zero_member_ok


def test_parallelogram_missing_lists_all(dirac_one):
    fam = generate_certificate(dirac_one, [ONE, X])
    with pytest.raises(IncompletenessError) as err:
        verify_parallelogram_positivity(fam, [(ONE, X)])
    assert set(err.value.missing) == {ONE + X, ONE - X}


def test_nonzero_zero_member_fails(dirac_one):
    fam = MeasureFamily(1, "real", {ZERO: dirac_one})
    assert not verify_parallelogram_positivity(fam, []).passed


def test_polarize_examples(dirac_one):
    xi, eta = xi1(1, 0), xi1(0, 1)
    fam = generate_certificate(dirac_one, polarization_closure([xi, eta, ZERO]))
    assert polarize(fam, xi, eta)() == pytest.approx(1.0)
    assert polarize(fam, xi, xi).measure.allclose(fam[xi], 1e-15)
    assert len(polarize(fam, xi, ZERO).measure) == 0


def test_parallelogram_residual_is_twice_member(rng):
    for _ in range(10):
        mu = measure_from_atoms(random_atoms(rng, 2), 2)
        xi = CoefficientVector(2, random_coeffs(rng, 2, 2))
        eta = CoefficientVector(2, random_coeffs(rng, 2, 2))
        fam = generate_certificate(mu, parallelogram_closure([xi, eta]))
        res = verify_parallelogram_positivity(fam, [(xi, eta)]).records[0].residual
        for p, w in fam[xi]:
            assert res.weight_at(p) == pytest.approx(2 * w, abs=1e-12 * max(1, w))


def test_polarize_matches_oracle_and_is_hermitian(rng):
    mu = measure_from_atoms(random_atoms(rng, 2), 2)
    xi_c = random_coeffs(rng, 2, 2)
    eta_c = random_coeffs(rng, 2, 2)
    xi, eta = CoefficientVector(2, xi_c), CoefficientVector(2, eta_c)
    fam = generate_certificate(mu, polarization_closure([xi, eta]))
    form = polarize(fam, xi, eta).measure
    back = polarize(fam, eta, xi).measure
    for p, w in mu:
        oracle = brute_poly(xi_c, p) * np.conj(brute_poly(eta_c, p)) * w
        assert form.weight_at(p) == pytest.approx(oracle, abs=1e-10)
        assert back.weight_at(p) == pytest.approx(np.conj(oracle), abs=1e-10)


def test_audit_examples(two_point):
    basis = [ONE, X]
    fam = generate_certificate(two_point, polarization_closure(basis))
    seq = moments_of(two_point, 4)
    rep = sesquilinear_audit(fam, basis, [[[1.0]], None], seq)
    assert rep.passed
    assert np.allclose(rep.regions[0].matrix, 0.5 * np.ones((2, 2)))
    assert np.allclose(rep.regions[1].matrix, gram_matrix(seq, 1).matrix)
    assert rep.regions[0].schwarz_excess <= 1e-12
    single = sesquilinear_audit(fam, [ONE], [None], seq)
    assert single.passed and single.regions[0].matrix.shape == (1, 1)


def test_audit_homogeneity(rng):
    mu = measure_from_atoms(random_atoms(rng, 2), 2)
    basis = [CoefficientVector(2, random_coeffs(rng, 2, 1)) for _ in range(2)]
    xis = polarization_closure(basis) + scaling_closure(basis)
    fam = generate_certificate(mu, xis)
    rep = sesquilinear_audit(fam, basis, [None], moments_of(mu, 4), check_homogeneity=True)
    assert rep.passed and len(rep.homogeneity_residuals) == 6


def test_audit_flags_non_psd_form(two_point):
    basis = [ONE, X]
    fam = generate_certificate(two_point, polarization_closure(basis))
    # a negative mass on one combination breaks positivity of the form at x = 1
    tampered = fam.replace(ONE + X * 1j, AtomicMeasure(1, "real", [1.0, -1.0], [0.0, 1.0]))
    rep = sesquilinear_audit(tampered, basis, [[[1.0]]])
    assert not rep.passed


def test_form_regions_sum_to_gram(rng):
    mu = measure_from_atoms(random_atoms(rng, 2), 2)
    basis = [CoefficientVector(2, random_coeffs(rng, 2, 1)) for _ in range(3)]
    fam = generate_certificate(mu, polarization_closure(basis))
    seq = moments_of(mu, 4)
    regions = [[p] for p in mu.points]
    rep = sesquilinear_audit(fam, basis, regions, seq)
    total = sum(r.matrix for r in rep.regions)
    assert np.allclose(total, basis_gram(seq, basis), atol=1e-10 * seq.scale())


def test_family_json_roundtrip(two_point):
    fam = generate_certificate(two_point, polarization_closure([ONE, X]))
    back = MeasureFamily.from_json(fam.to_json())
    assert set(back.members) == set(fam.members)
    for xi, mu in fam:
        assert back[xi].allclose(mu, 0)


def test_generated_weights_match_poly(rng):
    mu = measure_from_atoms(random_atoms(rng, 3), 3)
    coeffs = random_coeffs(rng, 3, 2)
    xi = CoefficientVector(3, coeffs)
    fam = generate_certificate(mu, [xi])
    vals = poly_values(xi, mu.points)
    for (p, w), v in zip(mu, vals):
        assert fam[xi].weight_at(p) == pytest.approx(abs(v) ** 2 * w, rel=1e-12, abs=1e-15)
