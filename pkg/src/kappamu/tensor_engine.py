"""Tensor calculus on a frame with constant structure constants.

All vector fields handled here have constant coefficients in the frame, so
brackets, connections and curvature reduce to finite sums over structure
constants.  Conventions:

* ``d eta(X, Y) = 1/2 (X eta(Y) - Y eta(X) - eta([X, Y]))``;
* ``R_{XY} = nabla_X nabla_Y - nabla_Y nabla_X - nabla_{[X,Y]}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import IdentityViolation
from .exact_scalar import is_zero
from .frame_model import FrameModel, frame_vectors
from .linalg import Matrix, dot, solve_linear, vsub

__all__ = [
    "Connection",
    "CurvatureTensor",
    "bracket",
    "d_eta",
    "levi_civita",
    "curvature",
    "lie_derivative_phi",
    "torsion",
]


def _zero_like(model: FrameModel):
    return 0.0 if model.is_float() else 0


def bracket(model: FrameModel, X: Sequence, Y: Sequence) -> tuple:
    """Lie bracket of two constant-coefficient vector fields."""
    N = model.dim
    C = model.structure_constants
    out = [_zero_like(model)] * N
    for i in range(N):
        if is_zero(X[i]):
            continue
        for j in range(N):
            if is_zero(Y[j]):
                continue
            c = X[i] * Y[j]
            row = C[i][j]
            for k in range(N):
                out[k] = out[k] + c * row[k]
    return tuple(out)


def d_eta(model: FrameModel) -> Matrix:
    """Matrix of ``d eta`` in the frame: ``d eta(e_i, e_j) = -eta([e_i, e_j]) / 2``."""
    C, eta = model.structure_constants, model.eta
    N = model.dim
    return Matrix([[-dot(eta, C[i][j]) / 2 for j in range(N)] for i in range(N)])


@dataclass(frozen=True)
class Connection:
    """Affine connection with ``nabla_{e_i} e_j = sum_k gamma[i][j][k] e_k``."""

    gamma: tuple
    source: str = "levi_civita"

    @property
    def dim(self) -> int:
        return len(self.gamma)

    def nabla(self, X: Sequence, Y: Sequence) -> tuple:
        N = self.dim
        G = self.gamma
        out = [0] * N
        for i in range(N):
            if is_zero(X[i]):
                continue
            for j in range(N):
                if is_zero(Y[j]):
                    continue
                c = X[i] * Y[j]
                row = G[i][j]
                for k in range(N):
                    out[k] = out[k] + c * row[k]
        return tuple(out)

    # Covariant derivatives of constant-coefficient tensors along X.
    def of_form(self, w: Sequence, X: Sequence) -> tuple:
        """``(nabla_X w)(e_j) = -w(nabla_X e_j)``."""
        return tuple(-dot(w, self.nabla(X, e)) for e in _basis(self.dim, w))

    def of_bilinear(self, B: Matrix, X: Sequence) -> Matrix:
        """``(nabla_X B)(e_j, e_k) = -B(nabla_X e_j, e_k) - B(e_j, nabla_X e_k)``."""
        E = _basis(self.dim, B.rows[0])
        NX = Matrix.from_columns([self.nabla(X, e) for e in E])
        # B(nabla_X e_j, e_k) = (NX^T B)_{jk}
        return -(NX.T @ B) - (B @ NX)

    def of_endomorphism(self, A: Matrix, X: Sequence) -> Matrix:
        """``(nabla_X A) e_j = nabla_X (A e_j) - A nabla_X e_j``."""
        E = _basis(self.dim, A.rows[0])
        cols = [vsub(self.nabla(X, A @ e), A @ self.nabla(X, e)) for e in E]
        return Matrix.from_columns(cols)


def _basis(N, sample):
    one = 1.0 if any(isinstance(x, float) for x in sample) else 1
    return [tuple(one if a == b else 0 * one for a in range(N)) for b in range(N)]


def torsion(conn: Connection, model: FrameModel, X: Sequence, Y: Sequence) -> tuple:
    return vsub(vsub(conn.nabla(X, Y), conn.nabla(Y, X)), bracket(model, X, Y))


def levi_civita(model: FrameModel) -> Connection:
    """Levi-Civita connection from the Koszul formula on the frame.

    ``2 g(nabla_{e_i} e_j, e_k) = g([e_i,e_j],e_k) - g([e_j,e_k],e_i) + g([e_k,e_i],e_j)``
    is solved for ``nabla_{e_i} e_j`` with the metric as coefficient matrix.
    Metric compatibility and torsion-freeness are re-checked afterwards.
    """
    N = model.dim
    g = model.metric
    E = frame_vectors(model)
    C = model.structure_constants

    def gC(a, b, c):  # g([e_a, e_b], e_c)
        return dot(C[a][b], g.col(c))

    rhs = Matrix([[(gC(i, j, k) - gC(j, k, i) + gC(k, i, j)) / 2 for k in range(N)]
                  for i in range(N) for j in range(N)])
    # rows of rhs indexed by (i, j); solve g gamma_ij = rhs_ij for every pair at once
    sol = solve_linear(g, rhs.T)
    gamma = tuple(tuple(sol.col(i * N + j) for j in range(N)) for i in range(N))
    conn = Connection(gamma, "levi_civita")

    for a in E:
        if not conn.of_bilinear(g, a).is_zero():
            raise IdentityViolation("metric compatibility", "nabla g != 0")
        for b in E:
            if any(not is_zero(x) for x in torsion(conn, model, a, b)):
                raise IdentityViolation("torsion-free", "Levi-Civita torsion non-zero")
    return conn


@dataclass(frozen=True)
class CurvatureTensor:
    """``R_{e_i e_j} e_k = sum_l R[i][j][k][l] e_l``."""

    R: tuple

    @property
    def dim(self) -> int:
        return len(self.R)

    def apply(self, X: Sequence, Y: Sequence, Z: Sequence) -> tuple:
        N = self.dim
        out = [0] * N
        for i in range(N):
            if is_zero(X[i]):
                continue
            for j in range(N):
                if is_zero(Y[j]):
                    continue
                for k in range(N):
                    if is_zero(Z[k]):
                        continue
                    c = X[i] * Y[j] * Z[k]
                    row = self.R[i][j][k]
                    for m in range(N):
                        out[m] = out[m] + c * row[m]
        return tuple(out)

    def first_bianchi_holds(self) -> bool:
        N = self.dim
        R = self.R
        return all(
            is_zero(R[i][j][k][m] + R[j][k][i][m] + R[k][i][j][m])
            for i in range(N) for j in range(N) for k in range(N) for m in range(N)
        )

    def is_antisymmetric(self) -> bool:
        N = self.dim
        R = self.R
        return all(
            is_zero(R[i][j][k][m] + R[j][i][k][m])
            for i in range(N) for j in range(N) for k in range(N) for m in range(N)
        )


def curvature(conn: Connection, model: FrameModel) -> CurvatureTensor:
    """Curvature with ``R_{XY} = [nabla_X, nabla_Y] - nabla_{[X,Y]}``.

    For constant Christoffel symbols
    ``R_ijkl = sum_m G_jkm G_iml - G_ikm G_jml - C_ijm G_mkl``.
    """
    N = model.dim
    G = conn.gamma
    C = model.structure_constants
    z = _zero_like(model)
    R = []
    for i in range(N):
        Ri = []
        for j in range(N):
            Rij = []
            for k in range(N):
                comp = []
                for l in range(N):
                    s = z
                    for m in range(N):
                        s = s + G[j][k][m] * G[i][m][l] - G[i][k][m] * G[j][m][l] - C[i][j][m] * G[m][k][l]
                    comp.append(s)
                Rij.append(tuple(comp))
            Ri.append(tuple(Rij))
        R.append(tuple(Ri))
    return CurvatureTensor(tuple(R))


def lie_derivative_phi(model: FrameModel, phi: Matrix | None = None) -> Matrix:
    """Matrix of ``L_xi phi``: ``(L_xi phi) X = [xi, phi X] - phi [xi, X]`` (this is ``2h``)."""
    phi = model.phi if phi is None else phi
    xi = model.xi
    cols = [vsub(bracket(model, xi, phi @ e), phi @ bracket(model, xi, e)) for e in frame_vectors(model)]
    return Matrix.from_columns(cols)
