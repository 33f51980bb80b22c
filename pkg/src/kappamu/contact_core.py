"""Contact metric axioms, the operator h, N_phi, Sasakian tests and the
(kappa, mu) nullity fit with its Boeckx classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    ClassMismatch,
    CriteriaDisagreement,
    IdentityViolation,
    NonConstantFit,
    NotNullity,
    SasakianUndefined,
)
from .exact_scalar import is_zero, serialize, sign, sqrt
from .frame_model import ContactStructure, FrameModel, frame_vectors
from .linalg import Matrix, bilinear, dot, vadd, vec_is_zero, vscale, vsub
from .tensor_engine import bracket, curvature, d_eta, levi_civita, lie_derivative_phi

__all__ = [
    "ContactStructure",
    "AxiomResult",
    "KappaMuReport",
    "SasakianEvidence",
    "verify_contact_metric",
    "compute_h",
    "h_identities",
    "nijenhuis",
    "nijenhuis_identities",
    "is_sasakian",
    "eigen_frames",
    "fit_kappa_mu",
    "boeckx_invariant",
    "classify",
    "label_from_boeckx",
    "PANG_PAIRS",
]


@dataclass(frozen=True)
class AxiomResult:
    name: str
    passed: bool
    witness: str = ""


def _on(model: FrameModel, structure: ContactStructure | None) -> FrameModel:
    return model if structure is None else model.with_structure(structure)


def _first_failure(pairs, check):
    for label, args in pairs:
        bad = check(*args)
        if bad:
            return label if isinstance(bad, bool) else f"{label}: {bad}"
    return ""


def _pairs(model):
    E = frame_vectors(model)
    names = model.frame_names
    return [(f"({names[i]}, {names[j]})", (E[i], E[j])) for i in range(len(E)) for j in range(len(E))]


def _singles(model):
    return [(f"{n}", (e,)) for n, e in zip(model.frame_names, frame_vectors(model))]


def verify_contact_metric(model: FrameModel, structure: ContactStructure | None = None) -> list[AxiomResult]:
    """Check every contact metric axiom on all frame vectors / pairs.

    Failures are report entries carrying the first violating frame pair.
    """
    m = _on(model, structure)
    phi, xi, eta, g = m.phi, m.xi, m.eta, m.metric
    D = d_eta(m)
    eta_of = lambda v: dot(eta, v)  # noqa: E731

    checks = []

    def add(name, items, pred):
        w = _first_failure(items, pred)
        checks.append(AxiomResult(name, not w, w))

    add("eta(xi) = 1", [("xi", ())], lambda: not is_zero(eta_of(xi) - 1))
    add("phi(xi) = 0", [("xi", ())], lambda: not vec_is_zero(phi @ xi))
    add("eta o phi = 0", _singles(m), lambda X: not is_zero(eta_of(phi @ X)))
    add("phi^2 = -I + eta(x)xi", _singles(m),
        lambda X: not vec_is_zero(vadd(phi @ (phi @ X), vsub(X, vscale(eta_of(X), xi)))))
    add("g(phi X, phi Y) = g(X, Y) - eta(X) eta(Y)", _pairs(m),
        lambda X, Y: not is_zero(bilinear(g, phi @ X, phi @ Y) - bilinear(g, X, Y) + eta_of(X) * eta_of(Y)))
    add("d_eta = g(., phi .)", _pairs(m),
        lambda X, Y: not is_zero(bilinear(D, X, Y) - bilinear(g, X, phi @ Y)))
    add("eta = g(., xi)", _singles(m), lambda X: not is_zero(eta_of(X) - bilinear(g, X, xi)))
    add("i_xi d_eta = 0", _singles(m), lambda X: not is_zero(bilinear(D, xi, X)))
    add("metric positive definite", [("g", ())], lambda: not g.is_positive_definite())
    return checks


def contact_metric_ok(model: FrameModel) -> bool:
    return all(r.passed for r in verify_contact_metric(model))


# -- h ----------------------------------------------------------------------------


def h_identities(model: FrameModel, h: Matrix | None = None) -> list[AxiomResult]:
    h = compute_h(model, check=False) if h is None else h
    phi, xi, eta, g = model.phi, model.xi, model.eta, model.metric
    N = model.dim
    out = []

    def add(name, ok, witness=""):
        out.append(AxiomResult(name, bool(ok), "" if ok else witness))

    add("h symmetric", (g @ h).is_symmetric(), "g(hX, Y) != g(X, hY)")
    add("h xi = 0", vec_is_zero(h @ xi))
    add("eta o h = 0", all(is_zero(dot(eta, h.col(j))) for j in range(N)))
    add("h phi + phi h = 0", ((h @ phi) + (phi @ h)).is_zero())
    add("tr(h) = 0", is_zero(h.trace()), serialize(h.trace()))
    add("tr(phi h) = 0", is_zero((phi @ h).trace()), serialize((phi @ h).trace()))
    conn = levi_civita(model)
    rhs = -(phi + phi @ h)
    grad_xi = Matrix.from_columns([conn.nabla(e, xi) for e in frame_vectors(model)])
    add("nabla xi = -phi - phi h", (grad_xi - rhs).is_zero())
    return out


def compute_h(model: FrameModel, structure: ContactStructure | None = None, *, check: bool = True) -> Matrix:
    """``h = 1/2 L_xi phi``, with its standard identities verified."""
    m = _on(model, structure)
    h = lie_derivative_phi(m) * (0.5 if m.is_float() else Fraction(1, 2))
    if check:
        for r in h_identities(m, h):
            if not r.passed:
                raise IdentityViolation(r.name, r.witness)
    return h


# -- Nijenhuis ----------------------------------------------------------------------


@dataclass(frozen=True)
class NijenhuisTensor:
    """``N[i][j] = N_phi(e_i, e_j)`` as a frame vector."""

    N: tuple
    model: FrameModel = field(repr=False, compare=False)

    def apply(self, X: Sequence, Y: Sequence) -> tuple:
        dim = len(self.N)
        out = (0,) * dim
        for i in range(dim):
            for j in range(dim):
                c = X[i] * Y[j]
                if not is_zero(c):
                    out = vadd(out, vscale(c, self.N[i][j]))
        return out

    def is_zero(self) -> bool:
        return all(vec_is_zero(v) for row in self.N for v in row)


def _nij(model: FrameModel, D: Matrix, X, Y) -> tuple:
    phi, xi = model.phi, model.xi
    b = lambda u, v: bracket(model, u, v)  # noqa: E731
    out = phi @ (phi @ b(X, Y))
    out = vadd(out, b(phi @ X, phi @ Y))
    out = vsub(out, phi @ b(phi @ X, Y))
    out = vsub(out, phi @ b(X, phi @ Y))
    return vadd(out, vscale(2 * bilinear(D, X, Y), xi))


def nijenhuis(model: FrameModel, structure: ContactStructure | None = None, *, check: bool = True) -> NijenhuisTensor:
    m = _on(model, structure)
    D = d_eta(m)
    E = frame_vectors(m)
    N = NijenhuisTensor(tuple(tuple(_nij(m, D, X, Y) for Y in E) for X in E), m)
    if check:
        for r in nijenhuis_identities(m, N):
            if not r.passed:
                raise IdentityViolation(r.name, r.witness)
    return N


def nijenhuis_identities(model: FrameModel, N: NijenhuisTensor | None = None) -> list[AxiomResult]:
    N = nijenhuis(model, check=False) if N is None else N
    h = compute_h(model, check=False)
    phi, eta = model.phi, model.eta
    pairs = _pairs(model)

    def eq23(X, Y):
        lhs = vadd(phi @ N.apply(X, Y), N.apply(phi @ X, Y))
        return not vec_is_zero(vsub(lhs, vscale(2 * dot(eta, X), h @ Y)))

    def eq24(X, Y):
        return not is_zero(dot(eta, N.apply(phi @ X, Y)))

    out = []
    for name, pred in (("phi N(X,Y) + N(phi X, Y) = 2 eta(X) h Y", eq23),
                       ("eta(N(phi X, Y)) = 0", eq24)):
        w = _first_failure(pairs, pred)
        out.append(AxiomResult(name, not w, w))
    return out


# -- Sasakian --------------------------------------------------------------------------


@dataclass(frozen=True)
class SasakianEvidence:
    nijenhuis_zero: bool
    covariant_phi: bool
    curvature: bool

    @property
    def sasakian(self) -> bool:
        return self.nijenhuis_zero

    def __bool__(self):
        return self.sasakian


def _sasakian_curvature_residual(model, R):
    xi, eta = model.xi, model.eta
    E = frame_vectors(model)
    for X in E:
        for Y in E:
            expected = vsub(vscale(dot(eta, Y), X), vscale(dot(eta, X), Y))
            if not vec_is_zero(vsub(R.apply(X, Y, xi), expected)):
                return False
    return True


def is_sasakian(model: FrameModel, structure: ContactStructure | None = None) -> SasakianEvidence:
    """N_phi == 0, cross-checked against the nabla-phi and curvature criteria."""
    m = _on(model, structure)
    xi, eta, g, phi = m.xi, m.eta, m.metric, m.phi
    conn = levi_civita(m)
    E = frame_vectors(m)
    n_zero = nijenhuis(m, check=False).is_zero()

    cov = True
    for X in E:
        dphi = conn.of_endomorphism(phi, X)
        for Y in E:
            expected = vsub(vscale(bilinear(g, X, Y), xi), vscale(dot(eta, Y), X))
            if not vec_is_zero(vsub(dphi @ Y, expected)):
                cov = False
    curv = _sasakian_curvature_residual(m, curvature(conn, m))
    ev = SasakianEvidence(n_zero, cov, curv)
    if not (n_zero == cov == curv):
        raise CriteriaDisagreement(
            f"Sasakian criteria disagree: N_phi=0 {n_zero}, nabla phi {cov}, curvature {curv}")
    return ev


# -- (kappa, mu) --------------------------------------------------------------------------


@dataclass(frozen=True)
class KappaMuReport:
    kappa: object
    mu: object
    lam: object
    boeckx: object
    class_label: str
    d_plus_basis: tuple
    d_minus_basis: tuple

    @property
    def sasakian(self) -> bool:
        return self.class_label == "Sasakian"


def _normalize_sign(v):
    for x in v:
        s = sign(x)
        if s:
            return v if s > 0 else tuple(-a for a in v)
    return v


def _orthogonalize(basis, g):
    """Gram-Schmidt with respect to g, without normalisation (stays in the field)."""
    out = []
    for v in basis:
        w = v
        for u in out:
            w = vsub(w, vscale(bilinear(g, u, w) / bilinear(g, u, u), u))
        out.append(_normalize_sign(w))
    return out


def eigen_frames(model: FrameModel, h: Matrix | None = None):
    """``(lambda, D(lambda) basis, D(-lambda) basis)`` computed exactly.

    Uses ``h^2 = lambda^2 (I - eta (x) xi)`` on the contact distribution; a
    model where ``h^2`` is not of that form is not a (kappa, mu)-space.
    """
    h = compute_h(model) if h is None else h
    N = model.dim
    n = model.n
    proj = Matrix.identity(N) - Matrix.outer(model.xi, model.eta)
    h2 = h @ h
    lam2 = h2.trace() / (2 * n)
    if not (h2 - proj * lam2).is_zero():
        raise NotNullity("h^2 is not a multiple of the identity on the contact distribution")
    if is_zero(lam2):
        return lam2 * 0, [], []
    lam = sqrt(lam2)
    one = Matrix.identity(N)
    plus = (h - one * lam).nullspace()
    minus = (h + one * lam).nullspace()
    if len(plus) != n or len(minus) != n:
        raise NotNullity(f"eigenspaces of h have dimensions {len(plus)}, {len(minus)}; expected {n}")
    g = model.metric
    return lam, _orthogonalize(plus, g), _orthogonalize(minus, g)


def _ratio(v, X):
    """The scalar c with v = c X (X non-zero), or None."""
    k = next(i for i, x in enumerate(X) if not is_zero(x))
    c = v[k] / X[k]
    return c if vec_is_zero(vsub(v, vscale(c, X))) else None


def nullity_residual(model, R, kappa, mu, h):
    """First frame pair violating the nullity identity, or None."""
    xi, eta = model.xi, model.eta
    E = frame_vectors(model)
    names = model.frame_names
    for a, X in enumerate(E):
        for b, Y in enumerate(E):
            ey, ex = dot(eta, Y), dot(eta, X)
            expected = vscale(kappa, vsub(vscale(ey, X), vscale(ex, Y)))
            if mu is not None:
                expected = vadd(expected, vscale(mu, vsub(vscale(ey, h @ X), vscale(ex, h @ Y))))
            if not vec_is_zero(vsub(R.apply(X, Y, xi), expected)):
                return f"({names[a]}, {names[b]})"
    return None


def fit_kappa_mu(model: FrameModel, structure: ContactStructure | None = None) -> KappaMuReport:
    """Extract (kappa, mu) from ``R_{X xi} xi`` on the eigenvectors of h.

    The fit is then checked against the nullity identity on every frame pair.
    """
    m = _on(model, structure)
    h = compute_h(m)
    xi = m.xi
    R = curvature(levi_civita(m), m)
    lam, plus, minus = eigen_frames(m, h)

    if not plus:
        kappa = 1 + 0 * lam
        bad = nullity_residual(m, R, kappa, None, h)
        if bad:
            raise NotNullity(f"h = 0 but R_XY xi != eta(Y)X - eta(X)Y at {bad}")
        return KappaMuReport(kappa, None, lam, None, "Sasakian", (), ())

    rates = []
    for basis in (plus, minus):
        vals = [_ratio(R.apply(X, xi, xi), X) for X in basis]
        if any(v is None for v in vals) or any(not is_zero(v - vals[0]) for v in vals):
            raise NonConstantFit("R_{X xi} xi is not a constant multiple of X on an eigenspace of h")
        rates.append(vals[0])
    alpha, beta = rates
    kappa = (alpha + beta) / 2
    mu = (alpha - beta) / (2 * lam)
    if not is_zero(lam * lam - (1 - kappa)):
        raise NotNullity(f"lambda^2 = {serialize(lam * lam)} but 1 - kappa = {serialize(1 - kappa)}")
    bad = nullity_residual(m, R, kappa, mu, h)
    if bad:
        raise NotNullity(f"nullity identity fails at {bad}")
    if sign(kappa - 1) > 0:
        raise NotNullity("kappa > 1")
    I = boeckx_invariant(kappa, mu, lam)
    return KappaMuReport(kappa, mu, lam, I, label_from_boeckx(I), tuple(plus), tuple(minus))


def boeckx_invariant(kappa, mu, lam=None):
    """``I = (1 - mu/2) / sqrt(1 - kappa)``."""
    if is_zero(1 - kappa):
        raise SasakianUndefined("the Boeckx invariant is undefined for kappa = 1")
    if sign(1 - kappa) < 0:
        raise SasakianUndefined("kappa > 1 has no nullity realisation")
    lam = sqrt(1 - kappa) if lam is None else lam
    return (1 - mu / 2) / lam


def label_from_boeckx(I) -> str:
    s_hi, s_lo = sign(I - 1), sign(I + 1)
    if s_hi > 0:
        return "I"
    if s_hi == 0:
        return "IV"
    if s_lo > 0:
        return "II"
    if s_lo == 0:
        return "V"
    return "III"


PANG_PAIRS = {
    "I": ("positive_definite", "positive_definite"),
    "II": ("positive_definite", "negative_definite"),
    "III": ("negative_definite", "negative_definite"),
    "IV": ("positive_definite", "flat"),
    "V": ("flat", "negative_definite"),
}


def classify(report: KappaMuReport, model: FrameModel | None = None) -> str:
    """Class label from the Boeckx invariant, cross-checked against the Pang
    classes of ``D(lambda)`` and ``D(-lambda)`` when the model is given."""
    if report.sasakian:
        raise SasakianUndefined("classification applies to non-Sasakian reports")
    label = label_from_boeckx(report.boeckx)
    if model is not None:
        from .legendre import foliation_data

        pair = (foliation_data(model, report.d_plus_basis).pang_class,
                foliation_data(model, report.d_minus_basis).pang_class)
        if PANG_PAIRS[label] != pair:
            raise ClassMismatch(f"I_M gives class {label} but the Pang classes are {pair}")
    return label
