from fractions import Fraction

import pytest

from kappamu.contact_core import compute_h, fit_kappa_mu, is_sasakian, verify_contact_metric
from kappamu.errors import (
    InvariantTooLarge,
    InvariantTooSmall,
    ParameterOutOfRange,
    PreconditionFailed,
    SasakianInput,
    SignCaseMismatch,
)
from kappamu.exact_scalar import sqrt_exact
from kappamu.frame_model import ContactStructure as CS, dumps_model, frame_vectors, loads_model, milnor_model
from kappamu.linalg import Matrix
from kappamu.legendre import foliation_data
from kappamu.synthesis import (
    TW_AMBIGUITY_WARNING,
    SynthesisParams,
    admissible_params,
    roundtrip_params,
    sasakianize,
    synthesize,
    synthesize_ab,
    synthesize_c,
    tw_parallelize,
)
from kappamu.tensor_engine import curvature, d_eta, levi_civita


def pair(model):
    rep = fit_kappa_mu(model)
    return rep, foliation_data(model, rep.d_plus_basis), foliation_data(model, rep.d_minus_basis)


def test_roundtrip_params_examples(models):
    assert roundtrip_params(fit_kappa_mu(models["class-I"])) == SynthesisParams("ab", a=8, b=2)
    assert roundtrip_params(fit_kappa_mu(models["class-IV"])) == SynthesisParams("c", c=4)
    assert roundtrip_params(fit_kappa_mu(models["class-V"])) == SynthesisParams("c", c=-4)
    with pytest.raises(SasakianInput):
        roundtrip_params(fit_kappa_mu(models["heisenberg"]))


@pytest.mark.parametrize("name", ["class-I", "class-II", "class-III", "class-IV", "class-V"])
def test_roundtrip_reproduces_structure(models, name):
    m = models[name]
    res = synthesize(m, roundtrip_params(fit_kappa_mu(m)))
    assert res.passed
    assert res.structure.phi == m.phi and res.structure.metric == m.metric
    assert res.structure.eta == m.eta


def test_admissible_params(models):
    a1 = admissible_params(fit_kappa_mu(models["class-I"]))
    assert (a1.mode, a1.product, a1.sign_case) == ("ab", 16, "I")
    a2 = admissible_params(fit_kappa_mu(models["class-II"]))
    assert (a2.product, a2.sign_case) == (-16, "II")
    a4 = admissible_params(fit_kappa_mu(models["class-IV"]))
    assert a4.describe() == "c in (0, 4]"
    assert a4.contains(SynthesisParams("c", c=4)) and not a4.contains(SynthesisParams("c", c=0))
    assert a1.contains(SynthesisParams("ab", a=16, b=1))
    assert not a1.contains(SynthesisParams("ab", a=-16, b=-1))
    with pytest.raises(SasakianInput):
        admissible_params(fit_kappa_mu(models["heisenberg"]))


def test_ab_internal_laws(models):
    m = models["class-I"]
    _, F1, F2 = pair(m)
    a, b = Fraction(16), Fraction(1)
    res = synthesize_ab(m, F1, F2, a, b)
    assert res.passed, [c for c in res.checks if not c.passed]
    h = compute_h(res.model)
    for u in F1.bundle.basis:
        assert h @ u == tuple((a - b) / 4 * x for x in u)
    assert res.report.kappa == 1 - (a - b) ** 2 / 16 and res.report.mu == 2 - (a + b) / 2
    assert res.report.boeckx == (a + b) / abs(a - b)


def test_swapped_parameters_swap_eigen_foliations(models):
    m = models["class-I"]
    rep, F1, F2 = pair(m)
    res = synthesize_ab(m, F1, F2, 2, 8)
    assert res.passed
    assert res.report.d_plus_basis == rep.d_minus_basis
    assert any(c.name == "eigen-foliations match (F2, F1)" for c in res.checks)


def test_sasakian_choice(models):
    m = models["class-I"]
    res = synthesize(m, SynthesisParams("ab", a=4, b=4))
    assert res.passed and bool(is_sasakian(res.model))
    R = curvature(levi_civita(res.model), res.model)
    E = frame_vectors(m)
    for X in E:
        for Y in E:
            # eta(Y) X - eta(X) Y, with eta = e1*
            assert R.apply(X, Y, m.xi) == tuple(Y[0] * x - X[0] * y for x, y in zip(X, Y))


def test_sasakianize(models):
    for name, a in (("class-I", 4), ("class-III", -4)):
        res = sasakianize(models[name])
        assert res.params == SynthesisParams("ab", a=a, b=a)
        assert res.model.eta == models[name].eta
        ev = is_sasakian(res.model)
        assert ev.nijenhuis_zero and ev.covariant_phi and ev.curvature
    with pytest.raises(InvariantTooSmall):
        sasakianize(models["class-II"])
    with pytest.raises(InvariantTooSmall):
        sasakianize(models["class-IV"])


def test_sasakianize_irrational_root_stays_exact():
    res = sasakianize(milnor_model(3, 1))
    assert res.params.a == 2 * sqrt_exact(3)
    assert res.passed and not res.warnings and bool(is_sasakian(res.model))


def test_sasakianize_falls_back_to_float_when_field_changes():
    m = milnor_model(5, 1)
    g = Matrix([[1, 0, 0], [0, 2, 1], [0, 1, 1]])
    m2 = m.with_structure(CS(g.inverse() @ d_eta(m), m.xi, m.eta, g))
    rep = fit_kappa_mu(m2)
    assert rep.class_label == "I" and not rep.lam.is_rational()
    res = sasakianize(m2, rep)
    assert res.model.is_float()
    assert res.warnings and res.passed
    assert bool(is_sasakian(res.model))


def test_tw_parallelize(models):
    res = tw_parallelize(models["class-II"])
    assert (res.report.kappa, res.report.mu, res.report.boeckx) == (-3, 2, 0)
    assert TW_AMBIGUITY_WARNING in res.warnings
    assert res.params == SynthesisParams("ab", a=4, b=-4)
    with pytest.raises(InvariantTooLarge):
        tw_parallelize(models["class-I"])


def test_c_mode(models):
    m = models["class-IV"]
    res = synthesize(m, SynthesisParams("c", c=2))
    assert res.passed
    assert (res.report.kappa, res.report.mu, res.report.boeckx) == (Fraction(3, 4), 1, 1)
    flat = synthesize(m, SynthesisParams("c", c=4))
    R = curvature(levi_civita(flat.model), flat.model)
    E = frame_vectors(m)
    assert all(all(x == 0 for x in R.apply(X, Y, m.xi)) for X in E for Y in E)
    for c in (0, Fraction(9, 2), -1):
        with pytest.raises(ParameterOutOfRange):
            synthesize(m, SynthesisParams("c", c=c))
    v = synthesize(models["class-V"], SynthesisParams("c", c=Fraction(-3))).report
    assert v.kappa == 1 - Fraction(9, 16) and v.mu == 2 * (1 + Fraction(3, 4)) and v.boeckx == -1
    with pytest.raises(ParameterOutOfRange):
        synthesize(models["class-V"], SynthesisParams("c", c=1))


def test_precondition_failures(models):
    m = models["class-I"]
    rep, F1, F2 = pair(m)
    with pytest.raises(SignCaseMismatch):
        synthesize_ab(m, F1, F2, -8, -2)
    with pytest.raises(SignCaseMismatch):
        synthesize_ab(m, F1, F2, -8, 2)
    with pytest.raises(PreconditionFailed, match="Pi_bar proportionality") as exc:
        synthesize_ab(m, F1, F2, 4, 2)
    assert exc.value.hypothesis.startswith("Pi_bar proportionality")
    with pytest.raises(SignCaseMismatch, match="requires \\|I_M\\| = 1"):
        synthesize_c(m, F1, F2, 2)
    # a tilted pair fails the parallelism hypothesis
    G1, G2 = foliation_data(m, [(0, 0, 1)]), foliation_data(m, [(0, 1, 1)])
    with pytest.raises(PreconditionFailed, match="nabla\\^bl pi_F1"):
        synthesize_ab(m, G1, G2, 1, 1)


def test_output_serializes_and_reverifies(models):
    res = synthesize(models["class-III"], SynthesisParams("ab", a=-1, b=-16))
    back = loads_model(dumps_model(res.model))
    assert all(r.passed for r in verify_contact_metric(back))
    assert fit_kappa_mu(back).class_label == "III"
