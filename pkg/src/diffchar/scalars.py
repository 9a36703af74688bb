"""Exact coefficient arithmetic.

``ScalarK`` is the ring Q(i)[tau, tau^-1] where the formal symbol ``tau``
stands for 2*pi*i.  Because pi is transcendental the monomials
``tau^k`` and ``i*tau^k`` are linearly independent over Q, so reduction
modulo the integers only ever touches the rational real part of the
``tau^0`` coefficient.  ``CircleValue`` is that quotient.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache, reduce
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping, Union

from diffchar.errors import PreconditionError

Rational = Fraction

ScalarLike = Union["ScalarK", int, Fraction]

_ZERO = Fraction(0)


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` (or an integer string) into a reduced Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text).strip())


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


class ScalarK:
    """Laurent polynomial in ``tau`` with Gaussian rational coefficients.

    Immutable.  ``terms`` maps a tau-exponent to a pair ``(re, im)`` of
    Fractions; zero pairs are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, tuple] | None = None):
        clean = {}
        if terms:
            for k, (re, im) in terms.items():
                re = Fraction(re)
                im = Fraction(im)
                if re or im:
                    clean[int(k)] = (re, im)
        self._terms = clean
        self._hash = None

    # construction helpers -------------------------------------------------

    @classmethod
    def _raw(cls, terms: dict) -> "ScalarK":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def coerce(cls, x) -> "ScalarK":
        if isinstance(x, ScalarK):
            return x
        if isinstance(x, bool):
            raise TypeError("bool is not a scalar")
        if isinstance(x, (int, Fraction)) or isinstance(x, _RationalABC):
            x = Fraction(x)
            return cls._raw({0: (x, _ZERO)} if x else {})
        if isinstance(x, str):
            return cls.coerce(parse_rational(x))
        raise TypeError(f"cannot coerce {type(x).__name__} to ScalarK")

    @classmethod
    def gauss(cls, re, im=0, tau_power: int = 0) -> "ScalarK":
        return cls({tau_power: (Fraction(re), Fraction(im))})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    # ring structure -------------------------------------------------------

    def __add__(self, other):
        try:
            other = ScalarK.coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for k, (re, im) in other._terms.items():
            if k in out:
                r0, i0 = out[k]
                r, i = r0 + re, i0 + im
                if r or i:
                    out[k] = (r, i)
                else:
                    del out[k]
            else:
                out[k] = (re, im)
        return ScalarK._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return ScalarK._raw({k: (-re, -im) for k, (re, im) in self._terms.items()})

    def __sub__(self, other):
        try:
            other = ScalarK.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return ScalarK.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return ZERO
            if other == 1:
                return self
            return ScalarK._raw(
                {k: (re * other, im * other) for k, (re, im) in self._terms.items()}
            )
        try:
            other = ScalarK.coerce(other)
        except TypeError:
            return NotImplemented
        out: dict = {}
        for k1, (a, b) in self._terms.items():
            for k2, (c, d) in other._terms.items():
                k = k1 + k2
                re = a * c - b * d
                im = a * d + b * c
                if k in out:
                    r0, i0 = out[k]
                    out[k] = (r0 + re, i0 + im)
                else:
                    out[k] = (re, im)
        return ScalarK._raw({k: v for k, v in out.items() if v[0] or v[1]})

    __rmul__ = __mul__

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def inverse(self) -> "ScalarK":
        """Inverse of a single-term element ``c * tau^k``.

        General Laurent polynomials are not units, so anything with more
        than one term is rejected.
        """
        if len(self._terms) != 1:
            raise PreconditionError(f"only monomials in tau are invertible, got {self}")
        ((k, (a, b)),) = self._terms.items()
        n = a * a + b * b
        return ScalarK._raw({-k: (a / n, -b / n)})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                raise ZeroDivisionError("division of ScalarK by zero")
            return self * (Fraction(1) / Fraction(other))
        try:
            other = ScalarK.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "ScalarK":
        """Complex conjugation; note conj(tau) = -tau."""
        return ScalarK._raw(
            {k: ((-1) ** (k % 2) * re, -((-1) ** (k % 2)) * im) for k, (re, im) in self._terms.items()}
        )

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        try:
            other = ScalarK.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # accessors -----------------------------------------------------------

    def coeff(self, k: int = 0) -> tuple:
        return self._terms.get(k, (_ZERO, _ZERO))

    def is_rational(self) -> bool:
        """True when the value lies in Q (tau-free and real)."""
        return not self._terms or (set(self._terms) == {0} and not self._terms[0][1])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise PreconditionError(f"{self} is not rational")
        return self.coeff(0)[0]

    def evaluate(self, digits: int | None = None):
        """Numerical value with ``tau -> 2*pi*i``.

        Returns a Python complex, or an mpmath ``mpc`` when ``digits`` is given.
        """
        if digits is None:
            tau = 2j * math.pi
            return sum(
                (complex(float(re), float(im)) * tau**k for k, (re, im) in self._terms.items()),
                0j,
            )
        import mpmath

        with mpmath.workdps(digits + 5):
            tau = 2j * mpmath.pi
            total = mpmath.mpc(0)
            for k, (re, im) in self._terms.items():
                c = mpmath.mpc(mpmath.mpf(re.numerator) / re.denominator,
                               mpmath.mpf(im.numerator) / im.denominator)
                total += c * tau**k
            return total

    # text / json ------------------------------------------------------------

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k in sorted(self._terms):
            re, im = self._terms[k]
            if re and im:
                c = f"({re}{'+' if im > 0 else '-'}{_unit(abs(im))}i)"
            elif im:
                c = f"{'-' if im < 0 else ''}{_unit(abs(im))}i"
            else:
                c = str(re)
            if k == 0:
                parts.append(c)
            else:
                t = "τ" if k == 1 else f"τ^{k}"
                if c == "1":
                    parts.append(t)
                elif c == "-1":
                    parts.append("-" + t)
                else:
                    parts.append(f"{c}*{t}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"ScalarK({self})"

    def to_json(self) -> dict:
        return {
            f"τ^{k}": {"re": format_rational(re), "im": format_rational(im)}
            for k, (re, im) in sorted(self._terms.items())
        }

    @classmethod
    def from_json(cls, data) -> "ScalarK":
        if isinstance(data, (str, int)):
            return cls.coerce(parse_rational(data))
        terms = {}
        for key, val in data.items():
            k = int(key.split("^", 1)[1]) if "^" in key else 0
            terms[k] = (parse_rational(val.get("re", "0")), parse_rational(val.get("im", "0")))
        return cls(terms)


def _unit(q: Fraction) -> str:
    return "" if q == 1 else str(q)


ZERO = ScalarK()
ONE = ScalarK({0: (1, 0)})
I = ScalarK({0: (0, 1)})
TAU = ScalarK({1: (1, 0)})
TAU_INV = ScalarK({-1: (1, 0)})


def tau_power(k: int) -> ScalarK:
    return ScalarK({k: (1, 0)})


class CircleValue:
    """Element of C/Z with exact canonical representative.

    The rational real part of the ``tau^0`` coefficient is reduced into
    ``[0, 1)``; every other component is kept verbatim.
    """

    __slots__ = ("rep",)

    def __init__(self, x: ScalarLike = 0):
        rep = ScalarK.coerce(x)
        re, im = rep.coeff(0)
        frac = re - math.floor(re)
        if frac != re:
            terms = rep.terms
            if frac or im:
                terms[0] = (frac, im)
            else:
                terms.pop(0, None)
            rep = ScalarK._raw(terms)
        self.rep = rep

    def __add__(self, other):
        if not isinstance(other, CircleValue):
            try:
                other = CircleValue(other)
            except TypeError:
                return NotImplemented
        return CircleValue(self.rep + other.rep)

    __radd__ = __add__

    def __neg__(self):
        return CircleValue(-self.rep)

    def __sub__(self, other):
        if not isinstance(other, CircleValue):
            other = CircleValue(other)
        return CircleValue(self.rep - other.rep)

    def __mul__(self, n):
        if isinstance(n, bool) or not isinstance(n, int):
            return NotImplemented
        return CircleValue(self.rep * n)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, CircleValue):
            try:
                other = CircleValue(other)
            except TypeError:
                return NotImplemented
        return self.rep == other.rep

    def __hash__(self):
        return hash(("CircleValue", self.rep))

    def is_zero(self) -> bool:
        return not self.rep

    def is_rational(self) -> bool:
        return self.rep.is_rational()

    def as_rational(self) -> Fraction:
        return self.rep.as_rational()

    def evaluate(self, digits: int | None = None):
        return self.rep.evaluate(digits)

    def __str__(self):
        return f"[{self.rep}]"

    def __repr__(self):
        return f"CircleValue({self.rep})"

    def to_json(self):
        return self.rep.to_json()

    @classmethod
    def from_json(cls, data) -> "CircleValue":
        return cls(ScalarK.from_json(data))


def circle_reduce(x: ScalarLike) -> CircleValue:
    return CircleValue(x)


def torsion_order(v: CircleValue | ScalarLike | Iterable) -> int | None:
    """Least ``m > 0`` with ``m * v = 0`` in C/Z, or None if v is not torsion.

    A sequence of values is treated as a vector in a product of circles;
    its order is the lcm of the component orders.
    """
    if isinstance(v, (list, tuple)):
        orders = [torsion_order(c) for c in v]
        if any(o is None for o in orders):
            return None
        return reduce(math.lcm, orders, 1)
    if not isinstance(v, CircleValue):
        v = CircleValue(v)
    if not v.is_rational():
        return None
    return v.as_rational().denominator


@lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> tuple:
    # sum_{k=0}^{m} C(m+1, k) B_k = 0 for m >= 1
    table = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum(math.comb(m + 1, k) * table[k] for k in range(m))
        table.append(-s / (m + 1))
    return tuple(table)


def bernoulli(n: int) -> Fraction:
    """n-th Bernoulli number with the convention B_1 = -1/2."""
    if n < 0:
        raise PreconditionError(f"bernoulli index must be nonnegative, got {n}")
    return _bernoulli_table(n)[n]


def evaluate_tau(x: ScalarLike, digits: int | None = None):
    return ScalarK.coerce(x).evaluate(digits)


def phase_quarter(k: int) -> ScalarK:
    """exp(2*pi*i*k/4) = i^k as an exact scalar."""
    return (ONE, I, -ONE, -I)[k % 4]


__all__ = [
    "Rational",
    "ScalarK",
    "CircleValue",
    "ZERO",
    "ONE",
    "I",
    "TAU",
    "TAU_INV",
    "tau_power",
    "bernoulli",
    "circle_reduce",
    "torsion_order",
    "parse_rational",
    "format_rational",
    "phase_quarter",
    "evaluate_tau",
]
