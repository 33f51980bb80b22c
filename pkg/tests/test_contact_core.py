from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kappamu.contact_core import (
    PANG_PAIRS,
    boeckx_invariant,
    classify,
    compute_h,
    contact_metric_ok,
    fit_kappa_mu,
    h_identities,
    is_sasakian,
    label_from_boeckx,
    nijenhuis,
    nijenhuis_identities,
    verify_contact_metric,
)
from kappamu.errors import NotNullity, SasakianUndefined
from kappamu.exact_scalar import sqrt_exact
from kappamu.frame_model import ContactStructure, milnor_model
from kappamu.linalg import Matrix
from kappamu.tensor_engine import d_eta

EXPECTED = {
    # name: (kappa, mu, lambda, I_M, label)
    "class-I": (Fraction(-5, 4), -3, Fraction(3, 2), Fraction(5, 3), "I"),
    "class-II": (Fraction(-21, 4), 5, Fraction(5, 2), Fraction(-3, 5), "II"),
    "class-III": (Fraction(-5, 4), 7, Fraction(3, 2), Fraction(-5, 3), "III"),
    "class-IV": (0, 0, 1, 1, "IV"),
    "class-V": (0, 4, 1, -1, "V"),
}


def test_catalog_axioms_pass(models):
    for m in models.values():
        results = verify_contact_metric(m)
        assert results and all(r.passed for r in results), [r for r in results if not r.passed]
        assert all(r.passed for r in h_identities(m))
        assert all(r.passed for r in nijenhuis_identities(m))


def test_broken_phi_square_is_named(models):
    m = models["class-I"]
    bad_phi = Matrix([[0, 0, 0], [0, 0, -2], [0, 1, 0]])
    broken = m.with_structure(ContactStructure(bad_phi, m.xi, m.eta, m.metric))
    failed = [r.name for r in verify_contact_metric(broken) if not r.passed]
    assert "phi^2 = -I + eta(x)xi" in failed
    assert not contact_metric_ok(broken)


def test_h_of_milnor_models():
    m = milnor_model(4, 1)
    h = compute_h(m)
    assert h == Matrix([[0, 0, 0], [0, Fraction(-3, 2), 0], [0, 0, Fraction(3, 2)]])


@pytest.mark.parametrize("name", list(EXPECTED))
def test_fit_table(models, name):
    rep = fit_kappa_mu(models[name])
    kappa, mu, lam, I, label = EXPECTED[name]
    assert (rep.kappa, rep.mu, rep.lam, rep.boeckx, rep.class_label) == (kappa, mu, lam, I, label)
    assert classify(rep, models[name]) == label


def test_heisenberg_is_sasakian(models):
    m = models["heisenberg"]
    rep = fit_kappa_mu(m)
    assert rep.sasakian and rep.kappa == 1 and rep.mu is None and rep.boeckx is None
    ev = is_sasakian(m)
    assert ev.nijenhuis_zero and ev.covariant_phi and ev.curvature and bool(ev)
    assert nijenhuis(m).is_zero()
    with pytest.raises(SasakianUndefined):
        classify(rep)


def test_non_sasakian_criteria_all_false(models):
    ev = is_sasakian(models["class-II"])
    assert not (ev.nijenhuis_zero or ev.covariant_phi or ev.curvature)


def test_five_dimensional_heisenberg(heis5):
    assert contact_metric_ok(heis5)
    assert fit_kappa_mu(heis5).sasakian
    assert bool(is_sasakian(heis5))


def test_non_nullity_model_is_rejected(non_nullity):
    assert contact_metric_ok(non_nullity)
    with pytest.raises(NotNullity):
        fit_kappa_mu(non_nullity)


def test_irrational_lambda_fit():
    # compatible non-diagonal metric on the class-I brackets; lambda = sqrt(65)/2
    m = milnor_model(4, 1)
    g = Matrix([[1, 0, 0], [0, 2, 1], [0, 1, 1]])
    m2 = m.with_structure(ContactStructure(g.inverse() @ d_eta(m), m.xi, m.eta, g))
    rep = fit_kappa_mu(m2)
    assert rep.lam == sqrt_exact(65) / 2
    assert rep.kappa == Fraction(-61, 4) and rep.mu == -7
    assert classify(rep, m2) == "I"


small_q = st.fractions(min_value=-5, max_value=5, max_denominator=3)


@settings(max_examples=25, deadline=None)
@given(small_q, small_q)
def test_kappa_at_most_one_and_closed_forms(c2, c3):
    rep = fit_kappa_mu(milnor_model(c2, c3))
    assert rep.kappa <= 1
    assert rep.kappa == 1 - (c2 - c3) ** 2 / 4
    if not rep.sasakian:
        assert rep.mu == 2 - (c2 + c3)


@pytest.mark.parametrize("c", [Fraction(-2), Fraction(-1, 2), Fraction(1, 2), Fraction(3)])
def test_tangent_sphere_bundle_invariant(c):
    kappa, mu = c * (2 - c), -2 * c
    I = boeckx_invariant(kappa, mu)
    assert I == (1 + c) / abs(1 - c)
    assert (I < 1) == (c < 0)


def test_boeckx_thresholds():
    assert [label_from_boeckx(x) for x in (2, 1, 0, -1, -2)] == ["I", "IV", "II", "V", "III"]
    with pytest.raises(SasakianUndefined):
        boeckx_invariant(1, 0)
    assert set(PANG_PAIRS) == {"I", "II", "III", "IV", "V"}
