"""Truncated univariate power series over Q and the named genus series.

The grading variable ``b`` of the K-theory formulas is set to 1; a series
is just its list of coefficients ``c_0 .. c_N`` together with ``N``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

from diffchar.errors import PreconditionError
from diffchar.scalars import bernoulli, format_rational, parse_rational

DEFAULT_ORDER = 16


class PowerSeries:
    """Coefficients ``c_0 .. c_N`` of a series known modulo ``x^(N+1)``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable, trunc: int | None = None):
        cs = [Fraction(c) for c in coeffs]
        if trunc is not None:
            if trunc < 0:
                raise PreconditionError(f"truncation order must be >= 0, got {trunc}")
            cs = (cs + [Fraction(0)] * (trunc + 1))[: trunc + 1]
        if not cs:
            raise PreconditionError("a power series needs at least one coefficient")
        self.coeffs = tuple(cs)

    @property
    def trunc(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c, trunc: int) -> "PowerSeries":
        return cls([c], trunc)

    @classmethod
    def x(cls, trunc: int) -> "PowerSeries":
        return cls([0, 1], trunc)

    @classmethod
    def exp_scaled(cls, a, trunc: int) -> "PowerSeries":
        """exp(a*x)."""
        a = Fraction(a)
        return cls([a**k / math.factorial(k) for k in range(trunc + 1)])

    def __getitem__(self, k: int) -> Fraction:
        if k < 0 or k > self.trunc:
            return Fraction(0)
        return self.coeffs[k]

    def truncate(self, n: int) -> "PowerSeries":
        if n > self.trunc:
            raise PreconditionError(f"cannot extend a series known to order {self.trunc} to {n}")
        return PowerSeries(self.coeffs[: n + 1])

    # arithmetic -------------------------------------------------------------

    def _pair(self, other):
        if not isinstance(other, PowerSeries):
            other = PowerSeries.constant(other, self.trunc)
        n = min(self.trunc, other.trunc)
        return self.coeffs[: n + 1], other.coeffs[: n + 1], n

    def __add__(self, other):
        a, b, _ = self._pair(other)
        return PowerSeries(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-c for c in self.coeffs)

    def __sub__(self, other):
        a, b, _ = self._pair(other)
        return PowerSeries(x - y for x, y in zip(a, b))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return PowerSeries(c * other for c in self.coeffs)
        a, b, n = self._pair(other)
        out = [Fraction(0)] * (n + 1)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j in range(n + 1 - i):
                if b[j]:
                    out[i + j] += ai * b[j]
        return PowerSeries(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return PowerSeries(c / Fraction(other) for c in self.coeffs)
        a, b, n = self._pair(other)
        if not b[0]:
            raise PreconditionError(f"division needs a nonzero constant term in the divisor, got {b[0]}")
        q: list[Fraction] = []
        for k in range(n + 1):
            s = a[k] - sum(q[j] * b[k - j] for j in range(k))
            q.append(s / b[0])
        return PowerSeries(q)

    def __pow__(self, m: int):
        if m < 0:
            return PowerSeries.constant(1, self.trunc) / (self ** (-m))
        result = PowerSeries.constant(1, self.trunc)
        base = self
        while m:
            if m & 1:
                result = result * base
            base = base * base
            m >>= 1
        return result

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """self(inner(x)); inner must have zero constant term."""
        if inner[0]:
            raise PreconditionError(f"composition needs an inner series with constant term 0, got {inner[0]}")
        n = min(self.trunc, inner.trunc)
        out = PowerSeries.constant(self.coeffs[n], n)
        inner = inner.truncate(n)
        for c in reversed(self.coeffs[:n]):
            out = out * inner + c
        return out

    def scale(self, a) -> "PowerSeries":
        """x -> a*x."""
        a = Fraction(a)
        return PowerSeries(c * a**k for k, c in enumerate(self.coeffs))

    def shift_down(self, k: int = 1) -> "PowerSeries":
        """Divide by x^k; the first k coefficients must vanish."""
        for j in range(k):
            if self[j]:
                raise PreconditionError(f"coefficient of x^{j} is {self[j]}, cannot divide by x^{k}")
        if self.trunc < k:
            raise PreconditionError(f"series of order {self.trunc} has nothing left after dividing by x^{k}")
        return PowerSeries(self.coeffs[k:])

    def derivative(self) -> "PowerSeries":
        if self.trunc == 0:
            return PowerSeries([0])
        return PowerSeries(k * c for k, c in enumerate(self.coeffs) if k)

    def integral(self) -> "PowerSeries":
        """Antiderivative with zero constant term (order grows by one)."""
        return PowerSeries([0] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    # comparison & io ----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, PowerSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def agrees_with(self, other: "PowerSeries", order: int | None = None) -> bool:
        n = min(self.trunc, other.trunc) if order is None else order
        return all(self[k] == other[k] for k in range(n + 1))

    def __repr__(self):
        return f"PowerSeries({[str(c) for c in self.coeffs]})"

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' + mono if mono else ''}"
            parts.append(("- " if c < 0 else "+ ") + body)
        if not parts:
            return f"0 + O(x^{self.trunc + 1})"
        text = " ".join(parts)
        text = text[2:] if text.startswith("+ ") else "-" + text[2:]
        return f"{text} + O(x^{self.trunc + 1})"

    def to_json(self) -> dict:
        return {"coeffs": [format_rational(c) for c in self.coeffs], "trunc": self.trunc}

    @classmethod
    def from_json(cls, data) -> "PowerSeries":
        if isinstance(data, list):
            return cls(parse_rational(c) for c in data)
        return cls((parse_rational(c) for c in data["coeffs"]), int(data["trunc"]))


def ps_arith(a: PowerSeries, b: PowerSeries, op: str) -> PowerSeries:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "compose":
        return a.compose(b)
    raise PreconditionError(f"unknown series operation {op!r}")


def ps_exp(a: PowerSeries) -> PowerSeries:
    """exp(a) for a series with zero constant term."""
    if a[0]:
        raise PreconditionError(f"exp needs constant term 0 (split it off first), got {a[0]}")
    # f' = a' f
    n = a.trunc
    da = a.derivative()
    f = [Fraction(1)]
    for k in range(1, n + 1):
        f.append(sum(da[j] * f[k - 1 - j] for j in range(k)) / k)
    return PowerSeries(f)


def ps_log(one_plus_a: PowerSeries) -> PowerSeries:
    """log of a series with constant term 1."""
    if one_plus_a[0] != 1:
        raise PreconditionError(f"log needs constant term 1, got {one_plus_a[0]}")
    if one_plus_a.trunc == 0:
        return PowerSeries([0])
    quotient = one_plus_a.derivative() / one_plus_a.truncate(one_plus_a.trunc - 1)
    return quotient.integral()


def _exp_minus_one_over_x(a, n: int) -> PowerSeries:
    """(exp(a*x) - 1)/x to order n."""
    a = Fraction(a)
    return PowerSeries([a ** (k + 1) / math.factorial(k + 1) for k in range(n + 1)])


def todd_series(N: int = DEFAULT_ORDER) -> PowerSeries:
    """x/(e^x - 1); coefficient k is B_k/k!."""
    if N < 0:
        raise PreconditionError(f"order must be >= 0, got {N}")
    return PowerSeries(bernoulli(k) / math.factorial(k) for k in range(N + 1))


def todd_genus_series(N: int = DEFAULT_ORDER) -> PowerSeries:
    """x/(1 - e^-x), the multiplicative series of the Todd genus."""
    return todd_series(N).scale(-1)


def ahat_factor(N: int = DEFAULT_ORDER) -> PowerSeries:
    """(x/2)/sinh(x/2)."""
    if N < 0:
        raise PreconditionError(f"order must be >= 0, got {N}")
    sinh_over = PowerSeries(
        Fraction(1, 2**k * math.factorial(k + 1)) if k % 2 == 0 else 0 for k in range(N + 1)
    )
    return PowerSeries.constant(1, N) / sinh_over


def l_genus_series(N: int = DEFAULT_ORDER) -> PowerSeries:
    """x/tanh(x), whose genus is the signature."""
    cosh = PowerSeries(Fraction(1, math.factorial(k)) if k % 2 == 0 else 0 for k in range(N + 1))
    sinh_over = PowerSeries(Fraction(1, math.factorial(k + 1)) if k % 2 == 0 else 0 for k in range(N + 1))
    return cosh / sinh_over


def euler_series(N: int = DEFAULT_ORDER) -> PowerSeries:
    return PowerSeries([1, 1], N)


def even_part(a: PowerSeries) -> PowerSeries:
    return PowerSeries(c if k % 2 == 0 else 0 for k, c in enumerate(a.coeffs))


def cp1_fiber_integrate(a: PowerSeries) -> PowerSeries:
    """Integration along the CP^1 fibre of BS^1 -> BSU(2).

    Linear, with x^(2n+1) -> x^(2n) and even powers killed.  The output is
    known to one order less than the input.
    """
    if a.trunc == 0:
        raise PreconditionError("fibre integration needs a series of order >= 1")
    return PowerSeries((a[k + 1] if k % 2 == 0 else 0) for k in range(a.trunc))


def e_series(group: str, N: int = DEFAULT_ORDER) -> PowerSeries:
    """Higher e-invariant series of the universal bundle for S1, SU2 or SO3."""
    if N < 0:
        raise PreconditionError(f"order must be >= 0, got {N}")
    g = group.upper().replace("(", "").replace(")", "")
    if g == "S1":
        td = todd_series(N + 1)
        return (1 - td).shift_down(1)
    if g in ("SU2", "SO3"):
        td = todd_series(N + 2)
        second = td.scale(2) if g == "SU2" else td
        # (1/x)(1 - prod) then integrate out the CP^1 fibre
        per_torus = (1 - td * second).shift_down(1)
        return cp1_fiber_integrate(per_torus)
    raise PreconditionError(f"unknown group {group!r}; expected S1, SU2 or SO3")


def rho_ch(k: int, N: int = DEFAULT_ORDER) -> PowerSeries:
    """Chern character of the cannibalistic class: (1/k)(e^(kx)-1)/(e^x-1)."""
    if k < 1:
        raise PreconditionError(f"rho_ch needs k >= 1, got {k}")
    return (_exp_minus_one_over_x(k, N) / _exp_minus_one_over_x(1, N)) * Fraction(1, k)


def su2_rep_ch(n: int, N: int = DEFAULT_ORDER) -> PowerSeries:
    """sinh((n+1/2)x)/sinh(x/2).

    The value at 0 is 2n+1, the dimension of the representation with
    weights -n..n in integer steps.
    """
    if n < 0:
        raise PreconditionError(f"su2_rep_ch needs n >= 0, got {n}")
    a = Fraction(2 * n + 1, 2)

    def sinh_over_x(c):
        return PowerSeries(c ** (j + 1) / math.factorial(j + 1) if j % 2 == 0 else 0 for j in range(N + 1))

    return sinh_over_x(a) / sinh_over_x(Fraction(1, 2))


def genus_cpn(Q: PowerSeries, n: int) -> Fraction:
    """Multiplicative genus of CP^n: coefficient of x^n in Q(x)^(n+1)."""
    if n < 0:
        raise PreconditionError(f"n must be >= 0, got {n}")
    if Q[0] != 1:
        raise PreconditionError(f"genus series needs constant term 1, got {Q[0]}")
    if Q.trunc < n:
        raise PreconditionError(f"series known to order {Q.trunc}, need at least {n} for CP^{n}")
    return (Q.truncate(n) ** (n + 1))[n]


