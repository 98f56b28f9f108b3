"""Exact and numeric scalar arithmetic for coefficients in the Hecke parameter q.

Exact scalars are rational functions in a single formal variable v = q^(1/D),
where the denominator scale D is a positive integer fixed per computation.
Coefficients are exact rationals. Numeric scalars are complex doubles, used
when q is specialized (for instance at a root of unity).
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from math import lcm

from .errors import DivisionByZero, PoleAtSpecialization, ScaleMismatch

# Tolerances for the numeric backend.
EQ_TOL = 1e-9
POLE_TOL = 1e-12

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# polynomial helpers on ascending-coefficient tuples of Fractions
# ---------------------------------------------------------------------------

def _ptrim(c: list[Fraction]) -> tuple[Fraction, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else _ZERO) + (b[i] if i < len(b) else _ZERO)
           for i in range(n)]
    return _ptrim(out)


def _pneg(a):
    return tuple(-x for x in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y != 0:
                out[i + j] += x * y
    return _ptrim(out)


def _pdivmod(a, b):
    # long division; b must be nonzero
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [_ZERO] * max(0, len(a) - len(b) + 1)
    inv_lead = 1 / b[-1]
    while len(a) >= len(b):
        if a[-1] == 0:
            a.pop()
            continue
        coef = a[-1] * inv_lead
        shift = len(a) - len(b)
        q[shift] = coef
        for i, y in enumerate(b):
            a[shift + i] -= coef * y
        a.pop()
    return _ptrim(q), _ptrim(a)


def _pgcd(a, b):
    # monic Euclid; degrees stay small at desk scale
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    if not a:
        return ()
    inv = 1 / a[-1]
    return tuple(x * inv for x in a)


def _pmonic_factor(a):
    """Return (leading coefficient, monic polynomial)."""
    if not a:
        return _ONE, ()
    lead = a[-1]
    return lead, tuple(x / lead for x in a)


def _pstretch(a, k: int):
    """Substitute v -> v^k."""
    if k == 1 or not a:
        return tuple(a)
    out = [_ZERO] * ((len(a) - 1) * k + 1)
    for i, x in enumerate(a):
        out[i * k] = x
    return _ptrim(out)


def _peval(a, z: complex) -> complex:
    acc = 0j
    for c in reversed(a):
        acc = acc * z + complex(c)
    return acc


# ---------------------------------------------------------------------------
# ExactScalar
# ---------------------------------------------------------------------------

class ExactScalar:
    """A rational function in v = q^(1/scale) with exact rational coefficients.

    Normal form: numerator and denominator are coprime, the denominator is
    monic, and zero is stored as 0/1. Instances are immutable and hashable.
    """

    __slots__ = ("num", "den", "scale", "_hash")

    def __init__(self, num, den=(_ONE,), scale: int = 1, _normalized=False):
        if scale < 1:
            raise ValueError("scale must be a positive integer")
        num = tuple(num)
        den = tuple(den)
        if not _normalized:
            num = _ptrim([Fraction(c) for c in num])
            den = _ptrim([Fraction(c) for c in den])
            if not den:
                raise DivisionByZero("zero denominator")
            if not num:
                den = (_ONE,)
            else:
                g = _pgcd(num, den)
                if len(g) > 1:
                    num, _ = _pdivmod(num, g)
                    den, _ = _pdivmod(den, g)
                lead, den = _pmonic_factor(den)
                num = tuple(x / lead for x in num)
        self.num = num
        self.den = den
        self.scale = scale
        self._hash = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_rational(a, scale: int = 1) -> "ExactScalar":
        a = Fraction(a)
        if a == 0:
            return ExactScalar((), (_ONE,), scale, _normalized=True)
        return ExactScalar((a,), (_ONE,), scale, _normalized=True)

    @staticmethod
    def zero(scale: int = 1) -> "ExactScalar":
        return ExactScalar((), (_ONE,), scale, _normalized=True)

    @staticmethod
    def one(scale: int = 1) -> "ExactScalar":
        return ExactScalar((_ONE,), (_ONE,), scale, _normalized=True)

    @staticmethod
    def v_power(k: int, scale: int = 1) -> "ExactScalar":
        """The monomial v^k (k may be negative)."""
        if k >= 0:
            num = tuple([_ZERO] * k) + (_ONE,)
            return ExactScalar(num, (_ONE,), scale, _normalized=True)
        den = tuple([_ZERO] * (-k)) + (_ONE,)
        return ExactScalar((_ONE,), den, scale, _normalized=True)

    @staticmethod
    def q_power(r, scale: int | None = None) -> "ExactScalar":
        """q^r for rational r, as the monomial v^(r*scale)."""
        r = Fraction(r)
        if scale is None:
            scale = r.denominator
        k = r * scale
        if k.denominator != 1:
            raise ScaleMismatch(
                f"scale {scale} does not clear exponent denominator of {r}")
        return ExactScalar.v_power(int(k), scale)

    # -- scale handling -----------------------------------------------------

    def rescaled(self, scale: int) -> "ExactScalar":
        if scale == self.scale:
            return self
        if scale % self.scale != 0:
            raise ScaleMismatch(f"cannot rescale {self.scale} -> {scale}")
        k = scale // self.scale
        return ExactScalar(_pstretch(self.num, k), _pstretch(self.den, k),
                           scale, _normalized=True)

    def _coerce(self, other):
        if isinstance(other, ExactScalar):
            if other.scale == self.scale:
                return self, other
            s = lcm(self.scale, other.scale)
            return self.rescaled(s), other.rescaled(s)
        if isinstance(other, (int, Fraction)):
            return self, ExactScalar.from_rational(other, self.scale)
        return self, NotImplemented

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        a, b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        num = _padd(_pmul(a.num, b.den), _pmul(b.num, a.den))
        return ExactScalar(num, _pmul(a.den, b.den), a.scale)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(_pneg(self.num), self.den, self.scale,
                           _normalized=True)

    def __sub__(self, other):
        a, b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        num = _padd(_pmul(a.num, b.den), _pneg(_pmul(b.num, a.den)))
        return ExactScalar(num, _pmul(a.den, b.den), a.scale)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return ExactScalar(_pmul(a.num, b.num), _pmul(a.den, b.den), a.scale)

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        if not self.num:
            raise DivisionByZero("inverse of zero")
        return ExactScalar(self.den, self.num, self.scale)

    def __truediv__(self, other):
        a, b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        if not b.num:
            raise DivisionByZero("division by zero")
        return ExactScalar(_pmul(a.num, b.den), _pmul(a.den, b.num), a.scale)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k == 0:
            return ExactScalar.one(self.scale)
        base = self if k > 0 else self.inverse()
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == (_ONE,) and self.den == (_ONE,)

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExactScalar.from_rational(other, self.scale)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        if self.scale != other.scale:
            s = lcm(self.scale, other.scale)
            return self.rescaled(s) == other.rescaled(s)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            # hash is scale-independent on constants; that is enough here
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- conversions --------------------------------------------------------

    def as_rational(self) -> Fraction:
        """The value as a rational, when the function is constant."""
        if not self.num:
            return Fraction(0)
        if len(self.num) == 1 and self.den == (_ONE,):
            return self.num[0]
        raise ValueError("not a constant")

    def specialize(self, q0: complex) -> complex:
        """Evaluate at q = q0 via the principal branch of q0^(1/scale)."""
        v0 = complex(q0) ** (1.0 / self.scale)
        den = _peval(self.den, v0)
        if abs(den) <= POLE_TOL:
            raise PoleAtSpecialization(f"denominator vanishes at q={q0!r}")
        num = _peval(self.num, v0)
        value = num / den
        if not (cmath.isfinite(value)):
            raise PoleAtSpecialization(f"non-finite value at q={q0!r}")
        return value

    def serialize(self) -> dict:
        return {
            "num": [f"{c.numerator}/{c.denominator}" for c in self.num],
            "den": [f"{c.numerator}/{c.denominator}" for c in self.den],
            "scale": self.scale,
        }

    @staticmethod
    def parse(doc: dict) -> "ExactScalar":
        num = tuple(Fraction(s) for s in doc["num"])
        den = tuple(Fraction(s) for s in doc["den"])
        return ExactScalar(num, den, int(doc.get("scale", 1)))

    def __repr__(self):
        return f"ExactScalar({self._poly_str(self.num)!r}/{self._poly_str(self.den)!r}, scale={self.scale})"

    def __str__(self):
        n = self._poly_str(self.num)
        if self.den == (_ONE,):
            return n
        return f"({n})/({self._poly_str(self.den)})"

    @staticmethod
    def _poly_str(coeffs) -> str:
        if not coeffs:
            return "0"
        parts = []
        for i, c in enumerate(coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*v" if c != 1 else "v")
            else:
                parts.append(f"{c}*v^{i}" if c != 1 else f"v^{i}")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def common_scale(*rationals) -> int:
    """Least D such that v = q^(1/D) expresses all given exponents."""
    d = 1
    for r in rationals:
        d = lcm(d, Fraction(r).denominator)
    return d


def field_ops(a, b, op: str):
    """Apply add | sub | mul | div over either scalar backend."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if isinstance(b, ExactScalar):
            if b.is_zero():
                raise DivisionByZero("division by zero")
        elif abs(b) <= POLE_TOL:
            raise DivisionByZero("division by (numerically) zero")
        return a / b
    raise ValueError(f"unknown op {op!r}")


def near(a: complex, b: complex, tol: float = EQ_TOL) -> bool:
    """Approximate equality with a relative-absolute mixed tolerance."""
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))
