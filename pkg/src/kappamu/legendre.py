"""Legendre foliations: Pang forms, Libermann operators, the extended form
and the bi-Legendrian connection of a pair of transverse Legendre bundles."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .contact_core import KappaMuReport, compute_h
from .errors import (
    AsymmetryDetected,
    DegenerateForm,
    EquivalenceViolation,
    FlatCriteriaDisagree,
    IdentityViolation,
    InconsistentSystem,
    InvariantViolation,
    NoSolution,
    NonUniqueSolution,
)
from .exact_scalar import is_zero, serialize, sign
from .frame_model import FrameModel, coerce_vector, frame_vectors
from .linalg import (
    Matrix,
    bilinear,
    combination,
    dot,
    in_span,
    solve_system,
    vadd,
    vec_is_zero,
    vscale,
    vsub,
)
from .tensor_engine import Connection, bracket, d_eta, torsion

PANG_CLASSES = ("positive_definite", "negative_definite", "degenerate", "flat", "indefinite")
TENSOR_IDS = ("eta", "d_eta", "g", "phi", "h", "pi_F1", "pi_F2")


def _half(model):
    return 0.5 if model.is_float() else Fraction(1, 2)


# -- bundles --------------------------------------------------------------------------


@dataclass(frozen=True)
class LegendreBundle:
    basis: tuple

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        return in_span(v, self.basis)


def legendre_bundle(model: FrameModel, basis) -> LegendreBundle:
    """Validate and wrap a basis of a Legendre subbundle."""
    if isinstance(basis, LegendreBundle):
        basis = basis.basis
    basis = tuple(coerce_vector(v) if not model.is_float() else tuple(map(float, v)) for v in basis)
    n = model.n
    if len(basis) != n:
        raise InvariantViolation("Legendre dimension", f"expected {n} vectors, got {len(basis)}")
    if any(len(v) != model.dim for v in basis):
        raise InvariantViolation("Legendre dimension", "basis vectors have the wrong length")
    if Matrix.from_columns(basis).rank() != n:
        raise InvariantViolation("Legendre dimension", "basis vectors are linearly dependent")
    for v in basis:
        if not is_zero(dot(model.eta, v)):
            raise InvariantViolation("eta vanishes on L", f"eta = {serialize(dot(model.eta, v))}")
    D = d_eta(model)
    for u in basis:
        for v in basis:
            if not is_zero(bilinear(D, u, v)):
                raise InvariantViolation("d_eta vanishes on L")
    return LegendreBundle(basis)


def is_integrable(model: FrameModel, F: LegendreBundle) -> bool:
    return all(F.contains(bracket(model, u, v)) for u in F.basis for v in F.basis)


# -- Pang form ---------------------------------------------------------------------------


def pang_form(model: FrameModel, F) -> Matrix:
    """``Pi(X, X') = 2 d_eta([xi, X], X')`` in the bundle basis."""
    F = legendre_bundle(model, F)
    D = d_eta(model)
    xi = model.xi
    pi = Matrix([[2 * bilinear(D, bracket(model, xi, u), v) for v in F.basis] for u in F.basis])
    if not pi.is_symmetric():
        raise AsymmetryDetected("Pang form is not symmetric")
    return pi


def inertia(S: Matrix) -> tuple[int, int, int]:
    """``(positive, negative, zero)`` counts of a symmetric matrix, exactly.

    Symmetric Gaussian elimination (congruence); a zero diagonal with a
    non-zero off-diagonal entry is fixed by the substitution e_i <- e_i + e_j.
    """
    A = [list(r) for r in S.rows]
    pos = neg = 0
    while A:
        m = len(A)
        p = next((i for i in range(m) if not is_zero(A[i][i])), None)
        if p is None:
            hit = next(((i, j) for i in range(m) for j in range(m) if not is_zero(A[i][j])), None)
            if hit is None:
                break
            i, j = hit
            # congruence by I + E_ij: row i += row j, then column i += column j
            A[i] = [a + b for a, b in zip(A[i], A[j])]
            for r in A:
                r[i] = r[i] + r[j]
            if is_zero(A[i][i]):  # 2 A_ij + A_jj with A_jj = 0 cannot vanish
                raise ArithmeticError("congruence step failed")
            p = i
        d = A[p][p]
        if sign(d) > 0:
            pos += 1
        else:
            neg += 1
        rest = [k for k in range(m) if k != p]
        A = [[A[a][b] - A[a][p] * A[p][b] / d for b in rest] for a in rest]
    return pos, neg, S.nrows - pos - neg


def definiteness(pi: Matrix) -> str:
    if pi.is_zero():
        return "flat"
    pos, neg, zero = inertia(pi)
    if zero:
        return "degenerate"
    if pos == pi.nrows:
        return "positive_definite"
    if neg == pi.nrows:
        return "negative_definite"
    return "indefinite"


def pang_classify(pi: Matrix, model: FrameModel, F) -> str:
    """Pang class of ``F``; flatness is confirmed by ``[xi, X] in TF``."""
    F = legendre_bundle(model, F)
    if not pi.is_symmetric():
        raise AsymmetryDetected("Pang form is not symmetric")
    cls = definiteness(pi)
    bracket_flat = all(F.contains(bracket(model, model.xi, u)) for u in F.basis)
    if bracket_flat != (cls == "flat"):
        raise FlatCriteriaDisagree(f"Pi = 0 is {cls == 'flat'} but [xi, X] in TF is {bracket_flat}")
    return cls


# -- Libermann operator ------------------------------------------------------------------------


def _libermann_coords(model: FrameModel, F: LegendreBundle, pi: Matrix) -> Matrix:
    """n x N matrix sending Z to the F-coordinates of Lambda Z."""
    if is_zero(pi.det()):
        raise DegenerateForm("the Pang form is degenerate; Lambda is undefined")
    U = Matrix.from_columns(F.basis)
    W = U.T @ d_eta(model).T  # (W Z)_b = d_eta(Z, u_b)
    sol = solve_system(pi, W)
    return sol.particular


def libermann_operator(model: FrameModel, F, pi: Matrix | None = None) -> Matrix:
    """Solve ``Pi(Lambda Z, X) = d_eta(Z, X)`` for every frame vector Z.

    The result is verified to satisfy ``Lambda^2 = 0``,
    ``Lambda [xi, X] = X/2`` on TF, ``TF + R xi`` inside the kernel and
    surjectivity onto TF.
    """
    F = legendre_bundle(model, F)
    pi = pang_form(model, F) if pi is None else pi
    coords = _libermann_coords(model, F, pi)
    U = Matrix.from_columns(F.basis)
    lam = U @ coords
    for name, ok in _libermann_identities(model, F, lam):
        if not ok:
            raise IdentityViolation(name)
    return lam


def _libermann_identities(model, F, lam):
    half = _half(model)
    yield "Lambda^2 = 0", (lam @ lam).is_zero()
    yield "Lambda xi = 0", vec_is_zero(lam @ model.xi)
    yield "TF in ker Lambda", all(vec_is_zero(lam @ u) for u in F.basis)
    yield "Lambda [xi, X] = X/2", all(
        vec_is_zero(vsub(lam @ bracket(model, model.xi, u), vscale(half, u))) for u in F.basis)
    yield "Lambda onto TF", lam.rank() == F.rank


@dataclass(frozen=True)
class ExtendedPang:
    """The extension of Pi to TM, evaluated branch by branch as defined:
    ``Pi(Z, Z')`` when both arguments lie in TF, ``Pi(Lambda Z, Lambda Z')``
    otherwise."""

    bundle: LegendreBundle
    pi: Matrix
    coords: Matrix  # Z -> F-coordinates of Lambda Z

    def _in_coords(self, Z):
        U = Matrix.from_columns(self.bundle.basis)
        sol = solve_system(U, Z)
        return sol.particular.col(0)

    def __call__(self, Z: Sequence, Zp: Sequence):
        if self.bundle.contains(Z) and self.bundle.contains(Zp):
            a, b = self._in_coords(Z), self._in_coords(Zp)
        else:
            a, b = self.coords @ Z, self.coords @ Zp
        return bilinear(self.pi, a, b)

    def gram(self, vectors: Sequence[Sequence]) -> Matrix:
        return Matrix([[self(u, v) for v in vectors] for u in vectors])


def extended_pang(model: FrameModel, F, pi: Matrix | None = None) -> ExtendedPang:
    F = legendre_bundle(model, F)
    pi = pang_form(model, F) if pi is None else pi
    return ExtendedPang(F, pi, _libermann_coords(model, F, pi))


@dataclass(frozen=True)
class FoliationData:
    bundle: LegendreBundle
    pi: Matrix
    pang_class: str
    lambda_op: Matrix | None = None
    pi_bar: ExtendedPang | None = None
    pi_bar_frame: Matrix | None = None
    integrable: bool = True

    @property
    def non_degenerate(self) -> bool:
        return self.lambda_op is not None


def foliation_data(model: FrameModel, basis) -> FoliationData:
    F = legendre_bundle(model, basis)
    pi = pang_form(model, F)
    cls = pang_classify(pi, model, F)
    integrable = is_integrable(model, F)
    if cls in ("positive_definite", "negative_definite", "indefinite"):
        lam = libermann_operator(model, F, pi)
        pbar = extended_pang(model, F, pi)
        return FoliationData(F, pi, cls, lam, pbar, pbar.gram(frame_vectors(model)), integrable)
    return FoliationData(F, pi, cls, integrable=integrable)


# closed forms on a fitted (kappa, mu)-space


def pang_closed_form(model: FrameModel, report: KappaMuReport, plus: bool = True) -> Matrix:
    """``(+-2 lambda - mu + 2) g`` restricted to ``D(+-lambda)``."""
    basis = report.d_plus_basis if plus else report.d_minus_basis
    coef = (report.lam if plus else -report.lam) * 2 - report.mu + 2
    return Matrix([[coef * bilinear(model.metric, u, v) for v in basis] for u in basis])


def libermann_closed_form(model: FrameModel, report: KappaMuReport, plus: bool = True) -> Matrix:
    """``Lambda_{D(lambda)} = phi / (mu - 2 - 2 lambda)`` on ``D(-lambda)`` (zero on
    ``D(lambda) + R xi``), and symmetrically for ``D(-lambda)``."""
    lam, mu = report.lam, report.mu
    denom = mu - 2 - 2 * lam if plus else mu - 2 + 2 * lam
    if is_zero(denom):
        raise DegenerateForm("closed form needs |I_M| != 1")
    own, other = (report.d_plus_basis, report.d_minus_basis) if plus else (
        report.d_minus_basis, report.d_plus_basis)
    B = [model.xi, *own, *other]
    zero = tuple(0 * x for x in model.xi)
    images = [zero] * (1 + len(own)) + [vscale(1 / denom, model.phi @ v) for v in other]
    return Matrix.from_columns(images) @ Matrix.from_columns(B).inverse()


# -- bi-Legendrian connection ---------------------------------------------------------------


@dataclass(frozen=True)
class Splitting:
    """``TM = L1 + L2 + R xi`` with projections."""

    model: FrameModel
    L1: tuple
    L2: tuple
    inverse: Matrix = field(repr=False)

    @classmethod
    def of(cls, model: FrameModel, L1, L2) -> "Splitting":
        B = Matrix.from_columns([model.xi, *L1, *L2])
        if is_zero(B.det()):
            raise InvariantViolation("transversality", "L1 + L2 + R xi does not span TM")
        return cls(model, tuple(L1), tuple(L2), B.inverse())

    def coords(self, v):
        return self.inverse @ v

    def part(self, v, which: str) -> tuple:
        c = self.coords(v)
        n = len(self.L1)
        if which == "xi":
            return vscale(c[0], self.model.xi)
        if which == "L1":
            return combination(c[1:1 + n], self.L1)
        if which == "L2":
            return combination(c[1 + n:], self.L2)
        raise ValueError(which)

    def annihilators(self, keep: str) -> list[tuple]:
        """Covectors vanishing exactly on the given summand."""
        n = len(self.L1)
        rows = {"xi": [0], "L1": list(range(1, 1 + n)), "L2": list(range(1 + n, 1 + 2 * n))}
        return [self.inverse.row(r) for name, idx in rows.items() if name != keep for r in idx]


@dataclass(frozen=True)
class BiLegendrianConnection:
    conn: Connection
    torsion: tuple  # torsion[i][j] = T(e_i, e_j)
    model: FrameModel = field(repr=False)
    F1: LegendreBundle = field(repr=False)
    F2: LegendreBundle = field(repr=False)
    splitting: Splitting = field(repr=False)
    solution_dimension: int = 0


def _nabla_rows(N, X, Y):
    """Row k is the linear form Gamma -> (nabla_X Y)_k over unknowns (i, j, k)."""
    rows = [[0] * N ** 3 for _ in range(N)]
    for i in range(N):
        if is_zero(X[i]):
            continue
        for j in range(N):
            if is_zero(Y[j]):
                continue
            c = X[i] * Y[j]
            for k in range(N):
                rows[k][(i * N + j) * N + k] = c
    return rows


def _lin(coeffs, rows):
    out = [0] * len(rows[0])
    for c, r in zip(coeffs, rows):
        if is_zero(c):
            continue
        out = [a + c * b for a, b in zip(out, r)]
    return out


def _xi_torsion_target(split: Splitting, model: FrameModel, X):
    """``[xi, X_L1]_L2 + [xi, X_L2]_L1``."""
    xi = model.xi
    a = split.part(bracket(model, xi, split.part(X, "L1")), "L2")
    b = split.part(bracket(model, xi, split.part(X, "L2")), "L1")
    return vadd(a, b)


def torsion_formula(split: Splitting, model: FrameModel, X, Y) -> tuple:
    """Closed expression of the bi-Legendrian torsion on arbitrary X, Y."""
    eta, xi = model.eta, model.xi
    D = d_eta(model)
    p = split.part
    X1, Y1, X2, Y2 = p(X, "L1"), p(Y, "L1"), p(X, "L2"), p(Y, "L2")
    b11 = bracket(model, X1, Y1)
    b22 = bracket(model, X2, Y2)
    out = vscale(-1, vadd(p(b11, "L2"), p(b11, "xi")))
    out = vsub(out, vadd(p(b22, "L1"), p(b22, "xi")))
    out = vadd(out, vscale(2 * bilinear(D, X, Y), xi))
    out = vadd(out, vscale(dot(eta, Y), _xi_torsion_target(split, model, X)))
    return vsub(out, vscale(dot(eta, X), _xi_torsion_target(split, model, Y)))


def bilegendrian_connection(model: FrameModel, F1, F2) -> BiLegendrianConnection:
    """Solve the defining axioms of the bi-Legendrian connection exactly.

    Unknowns are the frame coefficients ``Gamma[i][j][k]``; the axioms
    (parallel subbundles, ``nabla xi = 0``, ``nabla d_eta = 0`` and the
    prescribed torsion) are all linear in them.  The solution must exist and
    be unique.
    """
    F1, F2 = legendre_bundle(model, F1), legendre_bundle(model, F2)
    split = Splitting.of(model, F1.basis, F2.basis)
    N = model.dim
    E = frame_vectors(model)
    xi = model.xi
    D = d_eta(model)
    zero = 0.0 if model.is_float() else 0
    rows: list[list] = []
    rhs: list = []

    def eq(row, value=zero):
        rows.append(row)
        rhs.append(value)

    for keep, F in (("L1", F1), ("L2", F2)):
        annih = split.annihilators(keep)
        for e in E:
            for u in F.basis:
                nr = _nabla_rows(N, e, u)
                for theta in annih:
                    eq(_lin(theta, nr))
    for e in E:
        for r in _nabla_rows(N, e, xi):
            eq(r)
        for j in range(N):
            for k in range(j + 1, N):
                # (nabla_e d_eta)(e_j, e_k) = -d_eta(nabla_e e_j, e_k) - d_eta(e_j, nabla_e e_k)
                r1 = _lin(D.col(k), _nabla_rows(N, e, E[j]))
                r2 = _lin(D.row(j), _nabla_rows(N, e, E[k]))
                eq([a + b for a, b in zip(r1, r2)])
    for u in F1.basis:
        for v in F2.basis:
            target = vadd(bracket(model, u, v), vscale(2 * bilinear(D, u, v), xi))
            ruv, rvu = _nabla_rows(N, u, v), _nabla_rows(N, v, u)
            for k in range(N):
                eq([a - b for a, b in zip(ruv[k], rvu[k])], target[k])
    for e in E:
        target = vadd(bracket(model, e, xi), _xi_torsion_target(split, model, e))
        rex, rxe = _nabla_rows(N, e, xi), _nabla_rows(N, xi, e)
        for k in range(N):
            eq([a - b for a, b in zip(rex[k], rxe[k])], target[k])

    try:
        sol = solve_system(Matrix(rows), list(rhs))
    except InconsistentSystem as exc:
        raise NoSolution(f"bi-Legendrian axioms are inconsistent: {exc}") from None
    if sol.nullity:
        raise NonUniqueSolution(f"bi-Legendrian axioms leave {sol.nullity} free parameters")
    x = sol.particular.col(0)
    gamma = tuple(tuple(tuple(x[(i * N + j) * N + k] for k in range(N)) for j in range(N))
                  for i in range(N))
    conn = Connection(gamma, "bi_legendrian")

    T = tuple(tuple(torsion(conn, model, a, b) for b in E) for a in E)
    for i, a in enumerate(E):
        for j, b in enumerate(E):
            if not vec_is_zero(vsub(T[i][j], torsion_formula(split, model, a, b))):
                raise IdentityViolation("bi-Legendrian torsion formula",
                                        f"mismatch at ({model.frame_names[i]}, {model.frame_names[j]})")
    for a in E:
        if not vec_is_zero(conn.nabla(a, xi)) or not conn.of_bilinear(D, a).is_zero():
            raise IdentityViolation("nabla xi = 0, nabla d_eta = 0")
    return BiLegendrianConnection(conn, T, model, F1, F2, split, sol.nullity)


# -- parallelism --------------------------------------------------------------------------------


@dataclass(frozen=True)
class ParallelCheck:
    tensor: str
    passed: bool
    worst: str = ""  # location and value of the largest residual entry

    def __bool__(self):
        return self.passed


def _pi_derivative(blc: BiLegendrianConnection, F: LegendreBundle, which: str, X):
    model = blc.model
    pi = pang_form(model, F)
    n = F.rank
    offset = 1 if which == "L1" else 1 + n

    def coords(v):
        return blc.splitting.coords(v)[offset:offset + n]

    nab = [coords(blc.conn.nabla(X, u)) for u in F.basis]
    return Matrix([[-(bilinear(pi, nab[a], _e(n, b, model)) + bilinear(pi, _e(n, a, model), nab[b]))
                    for b in range(n)] for a in range(n)])


def _e(n, i, model):
    one = 1.0 if model.is_float() else 1
    return tuple(one if k == i else 0 * one for k in range(n))


def check_parallel(blc: BiLegendrianConnection, tensor_id: str, h: Matrix | None = None) -> ParallelCheck:
    """Does the covariant derivative of the named tensor vanish identically?"""
    model = blc.model
    conn = blc.conn
    E = frame_vectors(model)
    names = model.frame_names
    entries = []
    for name, X in zip(names, E):
        if tensor_id == "eta":
            res = Matrix([conn.of_form(model.eta, X)])
        elif tensor_id == "d_eta":
            res = conn.of_bilinear(d_eta(model), X)
        elif tensor_id == "g":
            res = conn.of_bilinear(model.metric, X)
        elif tensor_id == "phi":
            res = conn.of_endomorphism(model.phi, X)
        elif tensor_id == "h":
            res = conn.of_endomorphism(compute_h(model, check=False) if h is None else h, X)
        elif tensor_id == "pi_F1":
            res = _pi_derivative(blc, blc.F1, "L1", X)
        elif tensor_id == "pi_F2":
            res = _pi_derivative(blc, blc.F2, "L2", X)
        else:
            raise ValueError(f"unknown tensor {tensor_id!r}; expected one of {TENSOR_IDS}")
        for i, r in enumerate(res.rows):
            for j, v in enumerate(r):
                entries.append((abs(float(v)), f"nabla_{name}[{i + 1},{j + 1}] = {serialize(v)}", v))
    passed = all(is_zero(v) for _, _, v in entries)
    worst = "" if passed else max(entries, key=lambda t: t[0])[1]
    return ParallelCheck(tensor_id, passed, worst)


# -- conjugate pairs ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LemmaReport:
    metric_parallel: bool
    phi_parallel: bool
    connection_formula: bool

    @property
    def agree(self) -> bool:
        return self.metric_parallel == self.phi_parallel == self.connection_formula


def lemmarocky_check(model: FrameModel, L, structure=None) -> LemmaReport:
    """Evaluate, independently, for ``L`` and its conjugate ``Q = phi L``:
    (i) nabla^bl g = 0, (ii) nabla^bl phi = 0, (iii) the connection formula
    on L and Q together with h(L) in L, h(Q) in Q.  The three must agree.

    ``structure`` replaces the model's own contact metric structure when given."""
    if structure is not None:
        model = model.with_structure(structure)
    L = legendre_bundle(model, L)
    Q = legendre_bundle(model, [model.phi @ u for u in L.basis])
    blc = bilegendrian_connection(model, L, Q)
    split = blc.splitting
    phi = model.phi
    h = compute_h(model, check=False)

    def formula_holds(F, which):
        for X in F.basis:
            for Xp in F.basis:
                rhs = vscale(-1, split.part(phi @ bracket(model, X, phi @ Xp), which))
                if not vec_is_zero(vsub(blc.conn.nabla(X, Xp), rhs)):
                    return False
        return True

    iii = (formula_holds(L, "L1") and formula_holds(Q, "L2")
           and all(L.contains(h @ u) for u in L.basis) and all(Q.contains(h @ u) for u in Q.basis))
    rep = LemmaReport(bool(check_parallel(blc, "g", h)), bool(check_parallel(blc, "phi", h)), iii)
    if not rep.agree:
        raise EquivalenceViolation(f"conditions disagree: {rep}")
    return rep
