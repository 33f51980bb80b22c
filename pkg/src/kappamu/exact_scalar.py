"""Numbers of the form ``p + q*sqrt(d)`` with ``p, q`` rational.

One quadratic extension is enough for everything the engine computes once
the model constants are rational: ``sqrt(1 - kappa)`` and the parameter
square roots are the only radicals that appear.  Mixing two different
radicands raises :class:`IncompatibleDiscriminants` instead of silently
degrading to floating point.

The module also hosts the small set of backend-generic helpers
(:func:`is_zero`, :func:`sign`, :func:`sqrt`, ...) that let the rest of the
engine run unchanged on plain Python floats.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from sympy import factorint

from .errors import (
    DivisionByZero,
    IncompatibleDiscriminants,
    NegativeRadicand,
    NestedRadical,
    ParseError,
)

__all__ = [
    "Scalar",
    "parse_scalar",
    "sqrt_exact",
    "scalar_arith",
    "as_scalar",
    "is_zero",
    "sign",
    "sqrt",
    "to_float",
    "approx_equal",
    "float_tolerance",
    "serialize",
]

_FLOAT_TOL = contextvars.ContextVar("kappamu_float_tolerance", default=1e-9)


@contextlib.contextmanager
def float_tolerance(tol: float):
    """Set the zero-test tolerance used by the float backend."""
    token = _FLOAT_TOL.set(float(tol))
    try:
        yield
    finally:
        _FLOAT_TOL.reset(token)


def current_tolerance() -> float:
    return _FLOAT_TOL.get()


@lru_cache(maxsize=4096)
def _split_square(n: int) -> tuple[int, int]:
    """Write ``n = s**2 * d`` with ``d`` squarefree; return ``(s, d)``."""
    if n == 0:
        return 0, 0
    s = d = 1
    for p, e in factorint(n).items():
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return s, d


class Scalar:
    """Immutable element of Q(sqrt d)."""

    __slots__ = ("_r", "_s", "_d")

    def __init__(self, rational=0, radical=0, d=0):
        r = Fraction(rational)
        s = Fraction(radical)
        d = int(d)
        if d < 0:
            raise NegativeRadicand(f"discriminant must be non-negative, got {d}")
        if s and d:
            k, d = _split_square(d)
            s *= k
        if d == 1:
            r, s, d = r + s, Fraction(0), 0
        if s == 0 or d == 0:
            s, d = Fraction(0), 0
        self._r = r
        self._s = s
        self._d = d

    # -- accessors ---------------------------------------------------------
    @property
    def rational_part(self) -> Fraction:
        return self._r

    @property
    def radical_part(self) -> Fraction:
        return self._s

    @property
    def discriminant(self) -> int:
        return self._d

    def is_rational(self) -> bool:
        return self._s == 0

    def conjugate(self) -> "Scalar":
        return _make(self._r, -self._s, self._d)

    def norm(self) -> Fraction:
        return self._r * self._r - self._s * self._s * self._d

    # -- arithmetic --------------------------------------------------------
    # Operands are either Scalars or plain ints/Fractions; the latter skip
    # coercion entirely, which keeps elimination loops cheap.
    @staticmethod
    def _coerce(other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Rational)):
            return _make(Fraction(other), _ZERO, 0)
        return None

    def _joint_d(self, other: "Scalar") -> int:
        if not self._s:
            return other._d
        if not other._s:
            return self._d
        if self._d != other._d:
            raise IncompatibleDiscriminants(
                f"cannot combine sqrt({self._d}) and sqrt({other._d})"
            )
        return self._d

    def __add__(self, other):
        if isinstance(other, Scalar):
            if not other._s:
                return _make(self._r + other._r, self._s, self._d)
            if not self._s:
                return _make(self._r + other._r, other._s, other._d)
            return _make(self._r + other._r, self._s + other._s, self._joint_d(other))
        if isinstance(other, (int, Rational)):
            return _make(self._r + other, self._s, self._d) if other else self
        if isinstance(other, float):
            return float(self) + other
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return _make(-self._r, -self._s, self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, Scalar):
            if not other._s:
                return _make(self._r - other._r, self._s, self._d)
            if not self._s:
                return _make(self._r - other._r, -other._s, other._d)
            return _make(self._r - other._r, self._s - other._s, self._joint_d(other))
        if isinstance(other, (int, Rational)):
            return _make(self._r - other, self._s, self._d) if other else self
        if isinstance(other, float):
            return float(self) - other
        return NotImplemented

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return other - float(self)
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, Scalar):
            if not other._s:
                r = other._r
                return _make(self._r * r, self._s * r, self._d)
            if not self._s:
                r = self._r
                return _make(r * other._r, r * other._s, other._d)
            d = self._joint_d(other)
            return _make(
                self._r * other._r + self._s * other._s * d,
                self._r * other._s + self._s * other._r,
                d,
            )
        if isinstance(other, (int, Rational)):
            if not other:
                return _ZERO_SCALAR
            return _make(self._r * other, self._s * other, self._d)
        if isinstance(other, float):
            return float(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) / other
            return NotImplemented
        if not o:
            raise DivisionByZero("division by an exact zero")
        if not o._s:
            return _make(self._r / o._r, self._s / o._r, self._d)
        n = o.norm()  # nonzero: d is squarefree and o != 0
        return self * _make(o._r / n, -o._s / n, o._d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return other / float(self)
            return NotImplemented
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return Scalar(1) / (self ** -n)
        out, base = Scalar(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- order -------------------------------------------------------------
    def sign(self) -> int:
        r, s = self._r, self._s
        if not s:
            return (r > 0) - (r < 0)
        sr = (r > 0) - (r < 0)
        ss = (s > 0) - (s < 0)
        if sr == 0 or sr == ss:
            return ss if sr == 0 else sr
        # opposite signs: compare r**2 against s**2 * d
        diff = r * r - s * s * self._d
        return sr if diff > 0 else -sr

    def __bool__(self):
        return bool(self._r) or bool(self._s)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) == other
            return NotImplemented
        return self._r == o._r and self._s == o._s and self._d == o._d

    def __hash__(self):
        if not self._s:
            return hash(self._r)
        return hash((self._r, self._s, self._d))

    def _cmp(self, other):
        o = self._coerce(other)
        if o is None:
            return None
        return (self - o).sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- conversion --------------------------------------------------------
    def __float__(self):
        return float(self._r) + float(self._s) * math.sqrt(self._d)

    def __str__(self):
        return serialize(self)

    def __repr__(self):
        return f"Scalar('{serialize(self)}')"

    def __reduce__(self):
        return (Scalar, (self._r, self._s, self._d))


_ZERO = Fraction(0)


def _make(r: Fraction, s: Fraction, d: int) -> Scalar:
    """Trusted constructor: ``d`` is already squarefree and not 1."""
    x = object.__new__(Scalar)
    x._r = r if type(r) is Fraction else Fraction(r)
    if s:
        x._s = s if type(s) is Fraction else Fraction(s)
        x._d = d
    else:
        x._s = _ZERO
        x._d = 0
    return x


_ZERO_SCALAR = _make(_ZERO, _ZERO, 0)

_RAT = r"\d+(?:/\d+)?"
_FULL = re.compile(
    rf"^(?P<r>[+-]?{_RAT})(?:(?P<sg>[+-])(?P<s>{_RAT})\*sqrt\((?P<d>\d+)\))?$"
)
_RAD_ONLY = re.compile(rf"^(?P<sg>[+-]?)(?:(?P<s>{_RAT})\*)?sqrt\((?P<d>\d+)\)$")


def serialize(x) -> str:
    """Canonical string: ``"p/q"`` or ``"p/q+r/s*sqrt(d)"`` (floats use repr)."""
    if isinstance(x, float):
        return repr(x)
    if not isinstance(x, Scalar):
        x = Scalar(x)
    if x.is_rational():
        return str(x.rational_part)
    s = x.radical_part
    op = "+" if s > 0 else "-"
    return f"{x.rational_part}{op}{abs(s)}*sqrt({x.discriminant})"


def parse_scalar(text) -> Scalar:
    """Parse the serialized form; also accepts ``sqrt(d)`` and ``q*sqrt(d)``."""
    if isinstance(text, Scalar):
        return text
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ParseError(f"scalar must be a string, got {type(text).__name__}")
    t = str(text).replace(" ", "")
    try:
        m = _FULL.match(t)
        if m:
            r = Fraction(m["r"])
            if m["s"] is None:
                return Scalar(r)
            s = Fraction(m["s"]) * (1 if m["sg"] == "+" else -1)
            return Scalar(r, s, int(m["d"]))
        m = _RAD_ONLY.match(t)
        if m:
            s = Fraction(m["s"]) if m["s"] else Fraction(1)
            if m["sg"] == "-":
                s = -s
            return Scalar(0, s, int(m["d"]))
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in scalar {text!r}") from None
    raise ParseError(f"malformed scalar {text!r}")


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, (int, Rational)):
        return Scalar(x)
    raise TypeError(f"cannot interpret {x!r} as an exact scalar")


def scalar_arith(x, y, op: str):
    """Apply ``op`` in {'add', 'sub', 'mul', 'div'} to two numbers."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        if is_zero(y) and not isinstance(y, float):
            raise DivisionByZero("division by an exact zero")
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def sqrt_exact(x) -> Scalar:
    """Exact square root of a non-negative rational.

    The result is ``p/q`` or ``(p/q)*sqrt(d)`` with ``d`` squarefree.
    """
    x = as_scalar(x)
    if not x.is_rational():
        raise NestedRadical(f"sqrt of {serialize(x)} would need a second radical")
    r = x.rational_part
    if r < 0:
        raise NegativeRadicand(f"sqrt of negative number {r}")
    s, d = _split_square(r.numerator * r.denominator)
    return Scalar(0, Fraction(s, r.denominator), d)


# -- backend-generic helpers ------------------------------------------------


def is_zero(x) -> bool:
    if isinstance(x, float):
        return abs(x) <= _FLOAT_TOL.get()
    return x == 0


def sign(x) -> int:
    if isinstance(x, float):
        if abs(x) <= _FLOAT_TOL.get():
            return 0
        return 1 if x > 0 else -1
    if isinstance(x, Scalar):
        return x.sign()
    return (x > 0) - (x < 0)


def sqrt(x):
    if isinstance(x, float):
        if x < -_FLOAT_TOL.get():
            raise NegativeRadicand(f"sqrt of negative number {x}")
        return math.sqrt(max(x, 0.0))
    return sqrt_exact(x)


def to_float(x) -> float:
    return float(x)


def approx_equal(x, y, rel: float | None = None) -> bool:
    """Exact equality for exact inputs; relative tolerance otherwise."""
    if isinstance(x, float) or isinstance(y, float):
        tol = _FLOAT_TOL.get() if rel is None else rel
        fx, fy = float(x), float(y)
        return abs(fx - fy) <= tol * max(1.0, abs(fx), abs(fy))
    return x == y
