"""Homogeneous contact metric manifolds presented by a global frame.

A model fixes a frame ``e_1..e_{2n+1}`` with constant structure constants
``[e_i, e_j] = sum_k C[i][j][k] e_k`` together with the frame components of
``eta``, ``xi``, ``phi`` and ``g``.  Matrices act on column vectors:
``(phi X)_i = sum_j phi[i][j] X_j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .errors import InvariantViolation, ParseError
from .exact_scalar import as_scalar, is_zero, parse_scalar, serialize
from .linalg import Matrix, dot

SCHEMA_VERSION = "1"


def _entry(x):
    return x if isinstance(x, float) else as_scalar(x)


@dataclass(frozen=True)
class ContactStructure:
    """The tensors ``(phi, xi, eta, g)`` in the frame of a host model."""

    phi: Matrix
    xi: tuple
    eta: tuple
    metric: Matrix

    def __post_init__(self):
        object.__setattr__(self, "phi", self.phi.map(_entry))
        object.__setattr__(self, "metric", self.metric.map(_entry))
        object.__setattr__(self, "xi", tuple(_entry(x) for x in self.xi))
        object.__setattr__(self, "eta", tuple(_entry(x) for x in self.eta))
        n = len(self.xi)
        if self.phi.shape != (n, n) or self.metric.shape != (n, n) or len(self.eta) != n:
            raise ValueError("structure tensors have inconsistent dimensions")

    def to_float(self) -> "ContactStructure":
        return ContactStructure(
            self.phi.map(float),
            tuple(map(float, self.xi)),
            tuple(map(float, self.eta)),
            self.metric.map(float),
        )


@dataclass(frozen=True)
class FrameModel:
    structure_constants: tuple
    structure: ContactStructure
    frame_names: tuple = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        C = tuple(
            tuple(tuple(_entry(x) for x in row) for row in plane)
            for plane in self.structure_constants
        )
        n = len(C)
        if any(len(p) != n or any(len(r) != n for r in p) for p in C):
            raise ValueError("structure constants must be an n x n x n array")
        object.__setattr__(self, "structure_constants", C)
        if not self.frame_names:
            object.__setattr__(self, "frame_names", tuple(f"e{i + 1}" for i in range(n)))
        elif len(self.frame_names) != n:
            raise ValueError("one frame name per frame vector")
        else:
            object.__setattr__(self, "frame_names", tuple(self.frame_names))
        if len(self.structure.xi) != n:
            raise ValueError("structure dimension does not match the frame")

    @property
    def dim(self) -> int:
        return len(self.structure_constants)

    @property
    def n(self) -> int:
        return (self.dim - 1) // 2

    phi = property(lambda self: self.structure.phi)
    xi = property(lambda self: self.structure.xi)
    eta = property(lambda self: self.structure.eta)
    metric = property(lambda self: self.structure.metric)

    def frame_bracket(self, i: int, j: int) -> tuple:
        return self.structure_constants[i][j]

    def with_structure(self, structure: ContactStructure, name: str | None = None) -> "FrameModel":
        return replace(self, structure=structure, name=self.name if name is None else name)

    def is_float(self) -> bool:
        return isinstance(self.xi[0], float)

    def to_float(self) -> "FrameModel":
        C = tuple(tuple(tuple(float(x) for x in r) for r in p) for p in self.structure_constants)
        return FrameModel(C, self.structure.to_float(), self.frame_names, self.name)


# -- invariants -----------------------------------------------------------------


def _d_eta_matrix(model: FrameModel) -> Matrix:
    C, eta = model.structure_constants, model.eta
    return Matrix([[-dot(eta, C[i][j]) / 2 for j in range(model.dim)] for i in range(model.dim)])


def model_invariants(model: FrameModel) -> list[tuple[str, bool, str]]:
    """Evaluate every FrameModel invariant; returns ``(identity, ok, detail)``."""
    out: list[tuple[str, bool, str]] = []
    N = model.dim
    C = model.structure_constants
    out.append(("odd dimension", N % 2 == 1, f"dim = {N}"))

    bad = next(
        ((i, j, k) for i in range(N) for j in range(N) for k in range(N)
         if not is_zero(C[i][j][k] + C[j][i][k])),
        None,
    )
    out.append(("antisymmetry", bad is None,
                "" if bad is None else "C[%d][%d][%d] != -C[%d][%d][%d]" % (
                    bad[0] + 1, bad[1] + 1, bad[2] + 1, bad[1] + 1, bad[0] + 1, bad[2] + 1)))

    def br(u, v):
        return tuple(sum((u[i] * v[j] * C[i][j][k] for i in range(N) for j in range(N)
                          if not is_zero(u[i]) and not is_zero(v[j])), 0) for k in range(N))

    e = [tuple(1 if a == b else 0 for a in range(N)) for b in range(N)]
    jac_bad = None
    for i in range(N):
        for j in range(i + 1, N):
            for k in range(j + 1, N):
                s = [a + b + c for a, b, c in zip(
                    br(e[i], br(e[j], e[k])), br(e[j], br(e[k], e[i])), br(e[k], br(e[i], e[j])))]
                if any(not is_zero(x) for x in s):
                    jac_bad = jac_bad or (i + 1, j + 1, k + 1)
    out.append((f"Jacobi{jac_bad}".replace(" ", "") if jac_bad else "Jacobi", jac_bad is None, ""))

    g = model.metric
    out.append(("metric symmetric", g.is_symmetric(), ""))
    out.append(("metric positive definite", g.is_positive_definite(),
                "leading principal minors " + ", ".join(serialize(m) for m in g.leading_minors())))

    out.append(("eta(xi) = 1", is_zero(dot(model.eta, model.xi) - 1), serialize(dot(model.eta, model.xi))))
    D = _d_eta_matrix(model)
    ixi = D.T @ model.xi
    out.append(("i_xi d_eta = 0", all(is_zero(x) for x in ixi), ""))

    ker = Matrix([model.eta]).nullspace()
    if len(ker) == N - 1 and ker:
        K = Matrix.from_columns(ker)
        det = (K.T @ D @ K).det()
        ok = not is_zero(det)
    else:
        ok = False
    out.append(("contact condition", ok, "eta ^ (d eta)^n vanishes" if not ok else ""))
    return out


def validate_model(model: FrameModel) -> FrameModel:
    for identity, ok, detail in model_invariants(model):
        if not ok:
            raise InvariantViolation(identity, detail)
    return model


# -- catalog -----------------------------------------------------------------------


def milnor_model(c2, c3, name: str = "") -> FrameModel:
    """Unimodular 3-dimensional Lie group with ``[e2,e3]=2e1, [e3,e1]=c2 e2, [e1,e2]=c3 e3``.

    ``xi = e1``, ``eta = e1^*``, ``g`` is the identity and ``phi e2 = e3``,
    ``phi e3 = -e2``.
    """
    c2, c3 = as_scalar(c2), as_scalar(c3)
    C = [[[0] * 3 for _ in range(3)] for _ in range(3)]

    def put(i, j, k, v):
        C[i][j][k] = v
        C[j][i][k] = -v

    put(1, 2, 0, 2)
    put(2, 0, 1, c2)
    put(0, 1, 2, c3)
    phi = Matrix([[0, 0, 0], [0, 0, -1], [0, 1, 0]])
    structure = ContactStructure(phi, (1, 0, 0), (1, 0, 0), Matrix.identity(3))
    model = FrameModel(C, structure, ("e1", "e2", "e3"), name or f"milnor({c2},{c3})")
    return validate_model(model)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    model: FrameModel
    expected_class: str
    params: tuple


_CATALOG = [
    ("heisenberg", 0, 0, "Sasakian"),
    ("class-I", 4, 1, "I"),
    ("class-II", 1, -4, "II"),
    ("class-III", -1, -4, "III"),
    ("class-IV", 2, 0, "IV"),
    ("class-V", 0, -2, "V"),
]


def catalog() -> list[CatalogEntry]:
    """One model per class of the Boeckx classification, plus Heisenberg."""
    return [
        CatalogEntry(name, milnor_model(c2, c3, name), label, (as_scalar(c2), as_scalar(c3)))
        for name, c2, c3, label in _CATALOG
    ]


def catalog_model(name: str) -> FrameModel:
    for entry in catalog():
        if entry.name == name:
            return entry.model
    raise KeyError(name)


# -- file format -------------------------------------------------------------------


def model_to_dict(model: FrameModel) -> dict:
    N = model.dim
    brackets = []
    for i in range(N):
        for j in range(i + 1, N):
            coeffs = model.structure_constants[i][j]
            if any(not is_zero(x) for x in coeffs):
                brackets.append({"i": i + 1, "j": j + 1, "coeffs": [serialize(x) for x in coeffs]})
    mat = lambda M: [[serialize(x) for x in r] for r in M.rows]  # noqa: E731
    out = {
        "schema_version": SCHEMA_VERSION,
        "dim": N,
        "frame_names": list(model.frame_names),
        "brackets": brackets,
        "metric": mat(model.metric),
        "eta": [serialize(x) for x in model.eta],
        "xi": [serialize(x) for x in model.xi],
        "phi": mat(model.phi),
    }
    if model.name:
        out["name"] = model.name
    if model.is_float():
        out["backend"] = "float"
    return out


def _scalar_at(value, path: str, floaty: bool = False):
    try:
        if floaty:
            if isinstance(value, bool) or not isinstance(value, (str, int, float)):
                raise ParseError(f"scalar must be a number or string, got {type(value).__name__}")
            try:
                return float(value)
            except ValueError:
                raise ParseError(f"malformed float {value!r}") from None
        return parse_scalar(value)
    except ParseError as exc:
        raise ParseError(str(exc), field=path) from None


def _vector_at(value, n: int, path: str, floaty: bool = False) -> tuple:
    if not isinstance(value, list) or len(value) != n:
        raise ParseError(f"expected a list of {n} scalars", field=path)
    return tuple(_scalar_at(v, f"{path}[{k}]", floaty) for k, v in enumerate(value))


def _matrix_at(value, n: int, path: str, floaty: bool = False) -> Matrix:
    if not isinstance(value, list) or len(value) != n:
        raise ParseError(f"expected {n} rows", field=path)
    return Matrix([_vector_at(r, n, f"{path}[{i}]", floaty) for i, r in enumerate(value)])


def model_from_dict(data: dict, *, validate: bool = True) -> FrameModel:
    if not isinstance(data, dict):
        raise ParseError("model file must contain a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version!r}", field="schema_version")
    N = data.get("dim")
    if not isinstance(N, int) or isinstance(N, bool) or N < 1:
        raise ParseError("dim must be a positive integer", field="dim")
    for key in ("brackets", "metric", "eta", "xi", "phi"):
        if key not in data:
            raise ParseError("missing required field", field=key)
    backend = data.get("backend", "exact")
    if backend not in ("exact", "float"):
        raise ParseError(f"unknown backend {backend!r}", field="backend")
    floaty = backend == "float"
    names = data.get("frame_names") or [f"e{i + 1}" for i in range(N)]
    if len(names) != N or not all(isinstance(s, str) for s in names):
        raise ParseError(f"expected {N} frame names", field="frame_names")

    C = [[[0.0 if floaty else parse_scalar(0)] * N for _ in range(N)] for _ in range(N)]
    given: dict[tuple[int, int], tuple] = {}
    if not isinstance(data["brackets"], list):
        raise ParseError("brackets must be a list", field="brackets")
    for pos, entry in enumerate(data["brackets"]):
        path = f"brackets[{pos}]"
        if not isinstance(entry, dict):
            raise ParseError("bracket entry must be an object", field=path)
        i, j = entry.get("i"), entry.get("j")
        if not all(isinstance(x, int) and not isinstance(x, bool) and 1 <= x <= N for x in (i, j)):
            raise ParseError(f"bracket indices must be integers in 1..{N}", field=path)
        if (i, j) in given:
            raise ParseError(f"duplicate bracket [{i},{j}]", field=path)
        given[(i, j)] = _vector_at(entry.get("coeffs"), N, f"{path}.coeffs", floaty)

    for (i, j), coeffs in given.items():
        if i == j and any(not is_zero(x) for x in coeffs):
            raise InvariantViolation("antisymmetry", f"[e{i}, e{i}] must vanish")
        other = given.get((j, i))
        if other is not None:
            for k in range(N):
                if not is_zero(coeffs[k] + other[k]):
                    raise InvariantViolation(
                        "antisymmetry", f"C[{i}][{j}][{k + 1}] != -C[{j}][{i}][{k + 1}]")
        C[i - 1][j - 1] = list(coeffs)
        if other is None:
            C[j - 1][i - 1] = [-x for x in coeffs]

    structure = ContactStructure(
        _matrix_at(data["phi"], N, "phi", floaty),
        _vector_at(data["xi"], N, "xi", floaty),
        _vector_at(data["eta"], N, "eta", floaty),
        _matrix_at(data["metric"], N, "metric", floaty),
    )
    model = FrameModel(C, structure, tuple(names), data.get("name", ""))
    return validate_model(model) if validate else model


def dumps_model(model: FrameModel) -> str:
    return json.dumps(model_to_dict(model), indent=2) + "\n"


def loads_model(text: str, *, validate: bool = True) -> FrameModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return model_from_dict(data, validate=validate)


def save_model(model: FrameModel, path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def load_model(path, *, validate: bool = True) -> FrameModel:
    """Read a model file and re-validate every invariant.

    Raises :class:`ParseError` on malformed input (with line or field) and
    :class:`InvariantViolation` naming the failed identity.
    """
    text = Path(path).read_text(encoding="utf-8")
    return loads_model(text, validate=validate)


def frame_vectors(model: FrameModel) -> list[tuple]:
    one = 1.0 if model.is_float() else 1
    return [tuple(one if a == b else 0 * one for a in range(model.dim)) for b in range(model.dim)]


def coerce_vector(v: Sequence) -> tuple:
    return tuple(_entry(x) for x in v)
