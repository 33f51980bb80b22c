"""Construction of new compatible contact metric structures on a bi-Legendrian
model, either from a pair ``(a, b)`` or from a single parameter ``c``.

Every hypothesis is checked before anything is built, and every claimed
property of the output is re-verified afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass

from .contact_core import (
    AxiomResult,
    KappaMuReport,
    compute_h,
    fit_kappa_mu,
    is_sasakian,
    verify_contact_metric,
)
from .errors import (
    IncompatibleDiscriminants,
    InvariantTooLarge,
    InvariantTooSmall,
    NestedRadical,
    ParameterOutOfRange,
    PreconditionFailed,
    SasakianInput,
    SignCaseMismatch,
)
from .exact_scalar import as_scalar, is_zero, serialize, sign, sqrt
from .frame_model import ContactStructure, FrameModel
from .legendre import (
    FoliationData,
    Splitting,
    bilegendrian_connection,
    check_parallel,
    foliation_data,
)
from .linalg import Matrix, combination, span_equal, vec_is_zero, vscale, vsub
from .tensor_engine import bracket

TW_AMBIGUITY_WARNING = (
    "tw_parallelize: the parameter formula a = -b = sqrt((1 - mu/2)^2 - (1 - kappa)) "
    "has a negative radicand when |I_M| < 1; a = sqrt(4(1 - kappa) - (2 - mu)^2), b = -a was used"
)


@dataclass(frozen=True)
class SynthesisParams:
    mode: str  # "ab" or "c"
    a: object = None
    b: object = None
    c: object = None

    def __post_init__(self):
        if self.mode == "ab":
            if self.a is None or self.b is None or self.c is not None:
                raise ValueError("mode 'ab' takes a and b only")
        elif self.mode == "c":
            if self.c is None or self.a is not None or self.b is not None:
                raise ValueError("mode 'c' takes c only")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")

    def as_dict(self) -> dict:
        if self.mode == "ab":
            return {"mode": "ab", "a": serialize(self.a), "b": serialize(self.b)}
        return {"mode": "c", "c": serialize(self.c)}


@dataclass(frozen=True)
class SynthesisResult:
    params: SynthesisParams
    structure: ContactStructure
    model: FrameModel
    checks: tuple = ()  # AxiomResult entries for the claimed properties
    report: KappaMuReport | None = None
    warnings: tuple = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


# -- helpers ---------------------------------------------------------------------------


def _num(model: FrameModel, x):
    return float(x) if model.is_float() else as_scalar(x)


def _foliation(model: FrameModel, F) -> FoliationData:
    return F if isinstance(F, FoliationData) else foliation_data(model, F)


def _assemble(model: FrameModel, F1: FoliationData, F2: FoliationData, phi_images, g_blocks):
    """Frame matrices of phi and g from their values on the adapted basis
    ``[xi | F1 | F2]``.  ``g_blocks`` holds the Gram matrices on F1 and F2."""
    basis = [model.xi, *F1.bundle.basis, *F2.bundle.basis]
    B = Matrix.from_columns(basis)
    Binv = B.inverse()
    n = model.n
    zero_vec = tuple(0 * x for x in model.xi)
    phi = Matrix.from_columns([zero_vec, *phi_images]) @ Binv
    one = _num(model, 1)
    G1, G2 = g_blocks
    rows = []
    for i in range(2 * n + 1):
        row = []
        for j in range(2 * n + 1):
            if i == 0 or j == 0:
                v = one if i == j else 0 * one
            elif i <= n and j <= n:
                v = G1[i - 1, j - 1]
            elif i > n and j > n:
                v = G2[i - 1 - n, j - 1 - n]
            else:
                v = 0 * one
            row.append(v)
        rows.append(row)
    g = Binv.T @ Matrix(rows) @ Binv
    return ContactStructure(phi, model.xi, model.eta, g)


def _require_parallel(model, F1, F2, which):
    blc = bilegendrian_connection(model, F1.bundle, F2.bundle)
    for tid in which:
        chk = check_parallel(blc, tid)
        if not chk:
            raise PreconditionFailed(f"nabla^bl {tid} = 0", chk.worst)
    return blc


def _pi_bar_on(F: FoliationData, vectors):
    return F.pi_bar.gram(vectors)


def _restricted_inverse(lam_coords: Matrix, source) -> Matrix:
    """Inverse of ``Lambda`` restricted to ``source``, as an n x n matrix from
    bundle coordinates back to ``source`` coordinates."""
    A = Matrix.from_columns([lam_coords @ v for v in source])
    return A.inverse()


# -- (a, b) construction ---------------------------------------------------------------


def _sign_case(a, b):
    sa, sb = sign(a), sign(b)
    if sa > 0 and sb > 0:
        return "I", ("positive_definite", "positive_definite")
    if sa > 0 and sb < 0:
        return "II", ("positive_definite", "negative_definite")
    if sa < 0 and sb < 0:
        return "III", ("negative_definite", "negative_definite")
    return None, None


def synthesize_ab(model: FrameModel, F1, F2, a, b) -> SynthesisResult:
    """Metric ``Pi_F1 / a`` on F1, ``Pi_F2 / b`` on F2 and ``eta (x) eta``
    elsewhere; ``phi = -b Lambda_F2`` on F1 and ``-a Lambda_F1`` on F2."""
    a, b = _num(model, a), _num(model, b)
    params = SynthesisParams("ab", a=a, b=b)
    F1, F2 = _foliation(model, F1), _foliation(model, F2)
    case, expected = _sign_case(a, b)
    if case is None:
        raise SignCaseMismatch("sign case", f"(a, b) = ({serialize(a)}, {serialize(b)}) matches none of I, II, III")
    if (F1.pang_class, F2.pang_class) != expected:
        raise SignCaseMismatch(
            "sign case", f"case {case} needs Pang classes {expected}, got {(F1.pang_class, F2.pang_class)}")
    _require_parallel(model, F1, F2, ("pi_F1", "pi_F2"))
    ab = a * b
    for name, Fa, Fb in (("F1", F1, F2), ("F2", F2, F1)):
        lhs = _pi_bar_on(Fa, Fa.bundle.basis)
        rhs = _pi_bar_on(Fb, Fa.bundle.basis) * ab
        if not (lhs - rhs).is_zero():
            raise PreconditionFailed(
                f"Pi_bar proportionality on T{name}",
                f"Pi_bar_{name} != ab * Pi_bar_other on T{name} with ab = {serialize(ab)}")

    phi_images = ([vscale(-b, F2.lambda_op @ u) for u in F1.bundle.basis]
                  + [vscale(-a, F1.lambda_op @ v) for v in F2.bundle.basis])
    structure = _assemble(model, F1, F2, phi_images, (F1.pi * (1 / a), F2.pi * (1 / b)))
    out = model.with_structure(structure, name=f"{model.name}-ab" if model.name else "")
    checks, report = _verify_ab(out, F1, F2, a, b)
    return SynthesisResult(params, structure, out, tuple(checks), report)


def _verify_ab(out: FrameModel, F1, F2, a, b):
    checks = [AxiomResult(f"contact metric: {r.name}", r.passed, r.witness)
              for r in verify_contact_metric(out)]
    report = None
    if not all(c.passed for c in checks):
        return checks, report
    h = compute_h(out)
    quarter = (a - b) / 4
    checks.append(AxiomResult("h = (a-b)/4 on F1", all(
        vec_is_zero(vsub(h @ u, vscale(quarter, u))) for u in F1.bundle.basis)))
    checks.append(AxiomResult("h = -(a-b)/4 on F2", all(
        vec_is_zero(vsub(h @ v, vscale(-quarter, v))) for v in F2.bundle.basis)))
    split = Splitting.of(out, F1.bundle.basis, F2.bundle.basis)
    checks.append(AxiomResult("phi X = (2/a)[xi, X]_F2 on F1", all(
        vec_is_zero(vsub(out.phi @ u, vscale(2 / a, split.part(bracket(out, out.xi, u), "L2"))))
        for u in F1.bundle.basis)))
    if is_zero(a - b):
        checks.append(AxiomResult("Sasakian (a = b)", bool(is_sasakian(out))))
        report = fit_kappa_mu(out)
        return checks, report
    report = fit_kappa_mu(out)
    kappa = 1 - (a - b) * (a - b) / 16
    mu = 2 - (a + b) / 2
    checks.append(AxiomResult("kappa = 1 - (a-b)^2/16", is_zero(report.kappa - kappa),
                              f"fitted {serialize(report.kappa)}, expected {serialize(kappa)}"))
    checks.append(AxiomResult("mu = 2 - (a+b)/2", is_zero(report.mu - mu),
                              f"fitted {serialize(report.mu)}, expected {serialize(mu)}"))
    I = (a + b) / abs(a - b)
    checks.append(AxiomResult("I_M = (a+b)/|a-b|", is_zero(report.boeckx - I),
                              f"fitted {serialize(report.boeckx)}, expected {serialize(I)}"))
    first, second = (F1, F2) if sign(a - b) > 0 else (F2, F1)
    checks.append(AxiomResult(
        "eigen-foliations match (F1, F2)" if first is F1 else "eigen-foliations match (F2, F1)",
        span_equal(report.d_plus_basis, first.bundle.basis)
        and span_equal(report.d_minus_basis, second.bundle.basis)))
    return checks, report


# -- c construction ------------------------------------------------------------------------


def synthesize_c(model: FrameModel, F1, F2, c) -> SynthesisResult:
    """One-parameter construction for a flat member of the pair.

    Case IV (F1 positive definite, F2 flat, ``0 < c <= 4``):
    ``phi = (1/c)(Lambda_F1|F2)^-1`` on F1, ``-c Lambda_F1`` on F2, metric
    ``Pi_F1 / c`` on F1 and ``c Pi_bar_F1`` on F2.  Case V mirrors it.
    """
    c = _num(model, c)
    params = SynthesisParams("c", c=c)
    F1, F2 = _foliation(model, F1), _foliation(model, F2)
    pair = (F1.pang_class, F2.pang_class)
    if pair == ("positive_definite", "flat"):
        case = "IV"
        if not (sign(c) > 0 and sign(c - 4) <= 0):
            raise ParameterOutOfRange("0 < c <= 4", f"c = {serialize(c)}")
        _require_parallel(model, F1, F2, ("pi_F1",))
        own, other = F1, F2
    elif pair == ("flat", "negative_definite"):
        case = "V"
        if not (sign(c) < 0 and sign(c + 4) >= 0):
            raise ParameterOutOfRange("-4 <= c < 0", f"c = {serialize(c)}")
        _require_parallel(model, F1, F2, ("pi_F2",))
        own, other = F2, F1
    else:
        raise SignCaseMismatch("requires |I_M| = 1",
                               f"needs (positive_definite, flat) or (flat, negative_definite), got {pair}")

    # own: the non-degenerate foliation; other: the flat one.
    inv = _restricted_inverse(own.pi_bar.coords, other.bundle.basis)
    one_over_c = 1 / c
    on_own = [vscale(one_over_c, combination(inv.col(k), other.bundle.basis))
              for k in range(own.bundle.rank)]
    on_other = [vscale(-c, own.lambda_op @ v) for v in other.bundle.basis]
    g_own = own.pi * one_over_c
    g_other = _pi_bar_on(own, other.bundle.basis) * c
    if case == "IV":
        structure = _assemble(model, F1, F2, on_own + on_other, (g_own, g_other))
    else:
        structure = _assemble(model, F1, F2, on_other + on_own, (g_other, g_own))
    out = model.with_structure(structure, name=f"{model.name}-c" if model.name else "")

    checks = [AxiomResult(f"contact metric: {r.name}", r.passed, r.witness)
              for r in verify_contact_metric(out)]
    report = None
    if all(ch.passed for ch in checks):
        report = fit_kappa_mu(out)
        kappa = 1 - c * c / 16
        mu = 2 * (1 - c / 4)
        checks.append(AxiomResult("kappa = 1 - c^2/16", is_zero(report.kappa - kappa),
                                  f"fitted {serialize(report.kappa)}, expected {serialize(kappa)}"))
        checks.append(AxiomResult("mu = 2(1 - c/4)", is_zero(report.mu - mu),
                                  f"fitted {serialize(report.mu)}, expected {serialize(mu)}"))
        checks.append(AxiomResult("eigen-foliations match (F1, F2)",
                                  span_equal(report.d_plus_basis, F1.bundle.basis)
                                  and span_equal(report.d_minus_basis, F2.bundle.basis)))
    return SynthesisResult(params, structure, out, tuple(checks), report)


# -- parameter choices ---------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibleParams:
    mode: str
    product: object = None  # required value of ab in mode "ab"
    sign_case: str = ""
    c_range: tuple = ()  # (low, high, low_inclusive, high_inclusive)

    def describe(self) -> str:
        if self.mode == "ab":
            signs = {"I": "a > 0, b > 0", "II": "a > 0, b < 0", "III": "a < 0, b < 0"}[self.sign_case]
            return f"ab = {serialize(self.product)}, {signs}"
        lo, hi, lo_in, hi_in = self.c_range
        return f"c in {'[' if lo_in else '('}{serialize(lo)}, {serialize(hi)}{']' if hi_in else ')'}"

    def contains(self, params: SynthesisParams) -> bool:
        if self.mode != params.mode:
            return False
        if self.mode == "ab":
            case, _ = _sign_case(params.a, params.b)
            return case == self.sign_case and is_zero(params.a * params.b - self.product)
        lo, hi, lo_in, hi_in = self.c_range
        c = params.c
        return ((sign(c - lo) > 0 or (lo_in and is_zero(c - lo)))
                and (sign(hi - c) > 0 or (hi_in and is_zero(c - hi))))


def _non_sasakian(report: KappaMuReport):
    if report.sasakian:
        raise SasakianInput("non-Sasakian input", "the structure is Sasakian (kappa = 1)")


def admissible_params(report: KappaMuReport) -> AdmissibleParams:
    _non_sasakian(report)
    label = report.class_label
    if label == "IV":
        return AdmissibleParams("c", c_range=(0, 4, False, True))
    if label == "V":
        return AdmissibleParams("c", c_range=(-4, 0, True, False))
    product = (2 - report.mu) ** 2 - 4 * (1 - report.kappa)
    return AdmissibleParams("ab", product=product, sign_case=label)


def roundtrip_params(report: KappaMuReport) -> SynthesisParams:
    """Parameters reproducing the structure itself (with F1 = D(lambda))."""
    _non_sasakian(report)
    lam, mu = report.lam, report.mu
    if report.class_label == "IV":
        return SynthesisParams("c", c=2 * lam - mu + 2)
    if report.class_label == "V":
        return SynthesisParams("c", c=-2 * lam - mu + 2)
    return SynthesisParams("ab", a=2 * lam - mu + 2, b=-2 * lam - mu + 2)


def synthesize(model: FrameModel, params: SynthesisParams, report: KappaMuReport | None = None) -> SynthesisResult:
    """Run the construction on the eigen-foliation pair ``(D(lambda), D(-lambda))``."""
    report = fit_kappa_mu(model) if report is None else report
    _non_sasakian(report)
    F1 = foliation_data(model, report.d_plus_basis)
    F2 = foliation_data(model, report.d_minus_basis)
    if params.mode == "ab":
        return synthesize_ab(model, F1, F2, params.a, params.b)
    return synthesize_c(model, F1, F2, params.c)


FLOAT_FALLBACK_WARNING = "exact square root leaves the scalar field; float backend used"


def _exact_or_float(model: FrameModel, report: KappaMuReport, build) -> SynthesisResult:
    """Run ``build`` exactly; if the parameter root leaves the scalar field
    of the model, redo it on the float backend."""
    try:
        return build(model, report)
    except (NestedRadical, IncompatibleDiscriminants):
        fm = model.to_float()
        return _with_warnings(build(fm, fit_kappa_mu(fm)), (FLOAT_FALLBACK_WARNING,))


def sasakianize(model: FrameModel, report: KappaMuReport | None = None) -> SynthesisResult:
    """``a = b = +-sqrt((2 - mu)^2 - 4(1 - kappa))``, negative root in class III."""
    report = fit_kappa_mu(model) if report is None else report
    _non_sasakian(report)
    if report.class_label not in ("I", "III"):
        raise InvariantTooSmall("|I_M| > 1", f"class {report.class_label}, I_M = {serialize(report.boeckx)}")

    def build(m, rep):
        root = sqrt((2 - rep.mu) ** 2 - 4 * (1 - rep.kappa))
        a = root if rep.class_label == "I" else -root
        return synthesize(m, SynthesisParams("ab", a=a, b=a), rep)

    return _exact_or_float(model, report, build)


def tw_parallelize(model: FrameModel, report: KappaMuReport | None = None) -> SynthesisResult:
    """``a = -b = sqrt(4(1 - kappa) - (2 - mu)^2)``; the output is a (kappa', 2)-space."""
    report = fit_kappa_mu(model) if report is None else report
    _non_sasakian(report)
    if report.class_label != "II":
        raise InvariantTooLarge("|I_M| < 1", f"class {report.class_label}, I_M = {serialize(report.boeckx)}")

    def build(m, rep):
        root = sqrt(4 * (1 - rep.kappa) - (2 - rep.mu) ** 2)
        res = synthesize(m, SynthesisParams("ab", a=root, b=-root), rep)
        checks = list(res.checks)
        if res.report is not None:
            checks.append(AxiomResult("mu' = 2", is_zero(res.report.mu - 2), serialize(res.report.mu)))
            checks.append(AxiomResult("kappa' < 1", sign(1 - res.report.kappa) > 0,
                                      serialize(res.report.kappa)))
        return SynthesisResult(res.params, res.structure, res.model, tuple(checks), res.report)

    return _with_warnings(_exact_or_float(model, report, build), (TW_AMBIGUITY_WARNING,))


def _with_warnings(res: SynthesisResult, warn) -> SynthesisResult:
    if not warn:
        return res
    return SynthesisResult(res.params, res.structure, res.model, res.checks, res.report,
                           tuple(res.warnings) + tuple(warn))
