"""Differential (Deligne) cohomology of S^1 and T^2.

Classes are stored in the presentation (integer part, form part): on S^1 a
degree-1 class is ``n*e + a(f)`` where ``e`` is the canonical class with
curvature ``dt``; on T^2 = S^1_s x S^1_t the degree-1 classes are
``n1*pr1^*e + n2*pr2^*e + a(f)`` and the degree-2 classes are
``k*P + a(alpha)`` with ``P = pr1^*e  cup  pr2^*e``. Top-degree classes are
identified with C/Z by integration.

Smooth functions are finite Fourier polynomials with ``ScalarK``
coefficients, so every operation here is exact.

Cup-product conventions (fixed once, checked by the tests):

* ``e cup e = a(dt/2)`` on S^1, pulled back to ``pr_i^*e cup pr_i^*e``;
* ``pr2^*e cup pr1^*e = -P``;
* ``a(w) cup y = a(w ^ R(y))`` and ``x cup a(w) = (-1)^|x| a(R(x) ^ w)``.

Fibre integration over a circle factor puts the fibre last:
``int_F (beta ^ du) = beta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from diffchar.errors import PreconditionError
from diffchar.forms import AlgebraPresentation, Form
from diffchar.models import circle, torus
from diffchar.scalars import TAU, TAU_INV, ZERO, CircleValue, ScalarK, phase_quarter

_S1 = circle("t")
_T2 = torus(("s", "t"))


def _mode_key(mode, dim: int) -> tuple:
    if isinstance(mode, int):
        mode = (mode,)
    mode = tuple(int(m) for m in mode)
    if len(mode) != dim:
        raise PreconditionError(f"mode {mode} does not match dimension {dim}")
    return mode


class FourierFn:
    """Finite Fourier polynomial ``sum_k c_k exp(2 pi i <k, x>)`` on the d-torus."""

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs: Mapping | None = None):
        if dim not in (1, 2):
            raise PreconditionError(f"FourierFn dimension must be 1 or 2, got {dim}")
        self.dim = dim
        clean = {}
        for mode, c in (coeffs or {}).items():
            c = ScalarK.coerce(c)
            if c:
                key = _mode_key(mode, dim)
                c = clean.get(key, ZERO) + c
                if c:
                    clean[key] = c
                else:
                    clean.pop(key, None)
        self.coeffs = clean

    @classmethod
    def constant(cls, dim: int, c) -> "FourierFn":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def mode(cls, dim: int, k, c=1) -> "FourierFn":
        return cls(dim, {k: c})

    def __getitem__(self, mode) -> ScalarK:
        return self.coeffs.get(_mode_key(mode, self.dim), ZERO)

    def _check(self, other: "FourierFn"):
        if other.dim != self.dim:
            raise PreconditionError("Fourier functions of different dimension")

    def __add__(self, other):
        if not isinstance(other, FourierFn):
            other = FourierFn.constant(self.dim, other)
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, ZERO) + c
        return FourierFn(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return FourierFn(self.dim, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, FourierFn):
            c = ScalarK.coerce(other)
            return FourierFn(self.dim, {k: v * c for k, v in self.coeffs.items()})
        self._check(other)
        out: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, ZERO) + c1 * c2
        return FourierFn(self.dim, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FourierFn):
            return NotImplemented
        return self.dim == other.dim and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.dim, frozenset(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def mean(self) -> ScalarK:
        """Integral over the torus: the constant mode."""
        return self[(0,) * self.dim]

    def derivative(self, axis: int = 0) -> "FourierFn":
        return FourierFn(self.dim, {k: c * TAU * k[axis] for k, c in self.coeffs.items()})

    def antiderivative(self, axis: int = 0) -> "FourierFn":
        """Primitive in one coordinate; requires no modes constant in that coordinate."""
        out = {}
        for k, c in self.coeffs.items():
            if k[axis] == 0:
                raise PreconditionError("function has a mode independent of the integration variable")
            out[k] = c * TAU_INV / k[axis]
        return FourierFn(self.dim, out)

    def integrate_axis(self, axis: int) -> "FourierFn":
        """Integrate out one coordinate of a 2-variable function."""
        if self.dim != 2:
            raise PreconditionError("integrate_axis needs a function on T^2")
        keep = 1 - axis
        return FourierFn(1, {(k[keep],): c for k, c in self.coeffs.items() if k[axis] == 0})

    def restrict(self, axis: int, quarter: int) -> "FourierFn":
        """Restrict a 2-variable function to the slice ``x_axis = quarter/4``."""
        if self.dim != 2:
            raise PreconditionError("restrict needs a function on T^2")
        keep = 1 - axis
        out: dict = {}
        for k, c in self.coeffs.items():
            key = (k[keep],)
            out[key] = out.get(key, ZERO) + c * phase_quarter(k[axis] * quarter)
        return FourierFn(1, out)

    def at(self, quarters: Iterable[int]) -> ScalarK:
        """Value at a point with coordinates in (1/4)Z."""
        qs = tuple(quarters)
        total = ZERO
        for k, c in self.coeffs.items():
            total = total + c * phase_quarter(sum(a * q for a, q in zip(k, qs)))
        return total

    def rotate(self, quarter: int, axis: int = 0) -> "FourierFn":
        """Pullback along the translation ``x_axis -> x_axis + quarter/4``."""
        return FourierFn(self.dim, {k: c * phase_quarter(k[axis] * quarter) for k, c in self.coeffs.items()})

    def pullback(self, factor: int) -> "FourierFn":
        """Pull a function on S^1 back to T^2 along the projection to ``factor``."""
        if self.dim != 1:
            raise PreconditionError("pullback needs a function on S^1")
        return FourierFn(2, {((k[0], 0) if factor == 1 else (0, k[0])): c for k, c in self.coeffs.items()})

    def with_mean(self, c) -> "FourierFn":
        out = dict(self.coeffs)
        out[(0,) * self.dim] = ScalarK.coerce(c)
        return FourierFn(self.dim, out)

    def to_form(self, pres: AlgebraPresentation | None = None) -> Form:
        pres = pres or (_S1 if self.dim == 1 else _T2)
        names = [g.name for g in pres.generators if g.laurent]
        out = pres.zero()
        for k, c in self.coeffs.items():
            out = out + pres.monomial(dict(zip(names, k)), c)
        return out

    def to_json(self) -> dict:
        return {",".join(map(str, k)): _scalar_json(c) for k, c in sorted(self.coeffs.items())}

    @classmethod
    def from_json(cls, data: Mapping, dim: int | None = None) -> "FourierFn":
        items = {tuple(int(p) for p in str(k).split(",")): ScalarK.from_json(v) for k, v in data.items()}
        if dim is None:
            dim = len(next(iter(items))) if items else 1
        return cls(dim, items)

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})e{list(k)}" for k, c in sorted(self.coeffs.items()))

    __repr__ = __str__


def _scalar_json(c: ScalarK):
    return str(c.as_rational()) if c.is_rational() else c.to_json()


def _coerce_fn(f, dim: int) -> FourierFn:
    if f is None:
        return FourierFn(dim)
    if isinstance(f, FourierFn):
        if f.dim != dim:
            raise PreconditionError(f"expected a function on a {dim}-torus")
        return f
    if isinstance(f, Mapping):
        return FourierFn(dim, f)
    return FourierFn.constant(dim, f)


def _reduce_mean(f: FourierFn) -> FourierFn:
    m = f.mean()
    r = CircleValue(m).rep
    return f if r == m else f.with_mean(r)


# -- top degree ----------------------------------------------------------------


@dataclass(frozen=True)
class DCTop:
    """Top-degree class, identified with C/Z by integration."""

    value: CircleValue
    dim: int = 1

    def __add__(self, other: "DCTop"):
        return DCTop(self.value + other.value, self.dim)

    def __neg__(self):
        return DCTop(-self.value, self.dim)

    def __sub__(self, other: "DCTop"):
        return self + (-other)

    def R(self) -> Form:
        return (_S1 if self.dim == 1 else _T2).zero()

    def to_json(self):
        return self.value.to_json()


# -- degree 1 on S^1 -----------------------------------------------------------


class DC1_S1:
    """The class ``n*e + a(f)`` on S^1 (coordinate t)."""

    __slots__ = ("n", "f")

    def __init__(self, n: int = 0, f=None):
        self.n = int(n)
        self.f = _reduce_mean(_coerce_fn(f, 1))

    @classmethod
    def e(cls) -> "DC1_S1":
        return cls(1)

    def __add__(self, other: "DC1_S1"):
        return DC1_S1(self.n + other.n, self.f + other.f)

    def __neg__(self):
        return DC1_S1(-self.n, -self.f)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, m: int):
        return DC1_S1(m * self.n, self.f * m)

    def __eq__(self, other):
        return isinstance(other, DC1_S1) and self.n == other.n and self.f == other.f

    def __hash__(self):
        return hash((self.n, self.f))

    def R(self) -> Form:
        dt = _S1.gen("dt")
        return dt * self.n + d_fn(self.f)

    def I(self) -> int:
        return self.n

    def rotate(self, quarter: int) -> "DC1_S1":
        """Pullback along rotation by quarter/4 turns."""
        return DC1_S1(self.n, self.f.rotate(quarter) + Fraction(self.n * quarter, 4))

    def to_json(self) -> dict:
        return {"n": self.n, "f": self.f.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "DC1_S1":
        return cls(data.get("n", 0), FourierFn.from_json(data.get("f", {}), 1))

    def __repr__(self):
        return f"DC1_S1(n={self.n}, f={self.f})"


# -- degree 1 and 2 on T^2 -------------------------------------------------------


class DC1_T2:
    """The class ``n1*pr1^*e + n2*pr2^*e + a(f)`` on T^2 (coordinates s, t)."""

    __slots__ = ("n1", "n2", "f")

    def __init__(self, n1: int = 0, n2: int = 0, f=None):
        self.n1 = int(n1)
        self.n2 = int(n2)
        self.f = _reduce_mean(_coerce_fn(f, 2))

    def __add__(self, other: "DC1_T2"):
        return DC1_T2(self.n1 + other.n1, self.n2 + other.n2, self.f + other.f)

    def __neg__(self):
        return DC1_T2(-self.n1, -self.n2, -self.f)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, m: int):
        return DC1_T2(m * self.n1, m * self.n2, self.f * m)

    def __eq__(self, other):
        return isinstance(other, DC1_T2) and (self.n1, self.n2, self.f) == (other.n1, other.n2, other.f)

    def __hash__(self):
        return hash((self.n1, self.n2, self.f))

    def R_components(self) -> tuple:
        fs = self.f.derivative(0)
        ft = self.f.derivative(1)
        return (fs + self.n1, ft + self.n2)

    def R(self) -> Form:
        return one_form(*self.R_components())

    def I(self) -> tuple:
        return (self.n1, self.n2)

    def to_json(self) -> dict:
        return {"n": [self.n1, self.n2], "f": self.f.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "DC1_T2":
        n1, n2 = data.get("n", [0, 0])
        return cls(n1, n2, FourierFn.from_json(data.get("f", {}), 2))

    def __repr__(self):
        return f"DC1_T2(n=({self.n1}, {self.n2}), f={self.f})"


def _canonical_one_form(a: FourierFn, b: FourierFn) -> tuple:
    """Representative of ``a ds + b dt`` modulo exact forms and integral periods."""
    out_a, out_b = {}, {}
    modes = set(a.coeffs) | set(b.coeffs)
    for q in modes:
        ca, cb = a[q], b[q]
        if q == (0, 0):
            out_a[q] = CircleValue(ca).rep
            out_b[q] = CircleValue(cb).rep
            continue
        # keep the part orthogonal to the gradient direction (q1, q2)
        norm = q[0] * q[0] + q[1] * q[1]
        c = cb * q[0] - ca * q[1]
        out_a[q] = c * Fraction(-q[1], norm)
        out_b[q] = c * Fraction(q[0], norm)
    return FourierFn(2, out_a), FourierFn(2, out_b)


class DC2_T2:
    """The class ``k*P + a(alpha_s ds + alpha_t dt)`` on T^2, stored canonically."""

    __slots__ = ("k", "alpha_s", "alpha_t")

    def __init__(self, k: int = 0, alpha_s=None, alpha_t=None):
        self.k = int(k)
        self.alpha_s, self.alpha_t = _canonical_one_form(_coerce_fn(alpha_s, 2), _coerce_fn(alpha_t, 2))

    @classmethod
    def P(cls) -> "DC2_T2":
        return cls(1)

    def __add__(self, other: "DC2_T2"):
        return DC2_T2(self.k + other.k, self.alpha_s + other.alpha_s, self.alpha_t + other.alpha_t)

    def __neg__(self):
        return DC2_T2(-self.k, -self.alpha_s, -self.alpha_t)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, m: int):
        return DC2_T2(m * self.k, self.alpha_s * m, self.alpha_t * m)

    def __eq__(self, other):
        return isinstance(other, DC2_T2) and (self.k, self.alpha_s, self.alpha_t) == (
            other.k,
            other.alpha_s,
            other.alpha_t,
        )

    def __hash__(self):
        return hash((self.k, self.alpha_s, self.alpha_t))

    def R_density(self) -> FourierFn:
        """Coefficient of ds^dt in the curvature."""
        return self.alpha_t.derivative(0) - self.alpha_s.derivative(1) + self.k

    def R(self) -> Form:
        return self.R_density().to_form() * _T2.gen("ds") * _T2.gen("dt")

    def I(self) -> int:
        return self.k

    def to_json(self) -> dict:
        return {"k": self.k, "alpha": {"s": self.alpha_s.to_json(), "t": self.alpha_t.to_json()}}

    @classmethod
    def from_json(cls, data: Mapping) -> "DC2_T2":
        alpha = data.get("alpha", {})
        return cls(data.get("k", 0), FourierFn.from_json(alpha.get("s", {}), 2), FourierFn.from_json(alpha.get("t", {}), 2))

    def __repr__(self):
        return f"DC2_T2(k={self.k}, alpha=({self.alpha_s}) ds + ({self.alpha_t}) dt)"


# -- forms helpers -----------------------------------------------------------------


def d_fn(f: FourierFn) -> Form:
    if f.dim == 1:
        return f.derivative(0).to_form() * _S1.gen("dt")
    return one_form(f.derivative(0), f.derivative(1))


def one_form(a: FourierFn, b: FourierFn) -> Form:
    return a.to_form() * _T2.gen("ds") + b.to_form() * _T2.gen("dt")


# -- structure maps ---------------------------------------------------------------


def R_map(x) -> Form:
    return x.R()


def I_map(x):
    if isinstance(x, DCTop):
        return 0
    return x.I()


def a_map(w, dim: int | None = None):
    """The map a from forms (modulo exact ones) to differential classes.

    Accepts a FourierFn (degree 0), a pair of FourierFn on T^2 (a 1-form
    ``a ds + b dt``), or a top-degree density given as ``("top", f)``.
    """
    if isinstance(w, tuple) and len(w) == 2 and w[0] == "top":
        f = w[1]
        return DCTop(CircleValue(f.mean()), f.dim)
    if isinstance(w, tuple) and len(w) == 2:
        a, b = (_coerce_fn(v, 2) for v in w)
        return DC2_T2(0, a, b)
    if isinstance(w, FourierFn):
        return DC1_S1(0, w) if w.dim == 1 else DC1_T2(0, 0, w)
    if dim is not None:
        return a_map(FourierFn.constant(dim, w))
    raise PreconditionError(f"cannot apply a to {w!r}")


def ev_top(x) -> CircleValue:
    """Evaluate a top-degree class on the fundamental cycle."""
    if isinstance(x, DCTop):
        return x.value
    raise PreconditionError(f"ev_top expects a top-degree class, got {type(x).__name__}")


# -- products --------------------------------------------------------------------


def _int_f_dg(f: FourierFn, g: FourierFn) -> ScalarK:
    """Integral over S^1 of f dg."""
    total = ZERO
    for (k,), c in g.coeffs.items():
        if k:
            total = total + f[(-k,)] * c * TAU * k
    return total


def cup_s1(x: DC1_S1, y: DC1_S1) -> DCTop:
    n, f, m, g = x.n, x.f, y.n, y.f
    val = Fraction(n * m, 2) + f.mean() * m - g.mean() * n + _int_f_dg(f, g)
    return DCTop(CircleValue(val), 1)


def cup_t2_11(x: DC1_T2, y: DC1_T2) -> DC2_T2:
    n1, n2, f = x.n1, x.n2, x.f
    m1, m2, g = y.n1, y.n2, y.f
    rs, rt = y.R_components()
    a = f * rs - g * n1 + Fraction(n1 * m1, 2)
    b = f * rt - g * n2 + Fraction(n2 * m2, 2)
    return DC2_T2(n1 * m2 - n2 * m1, a, b)


def cup_t2_21(x: DC2_T2, y: DC1_T2) -> DCTop:
    rs, rt = y.R_components()
    density = x.alpha_s * rt - x.alpha_t * rs
    val = Fraction(-x.k * (y.n1 + y.n2), 2) + y.f.mean() * x.k + density.mean()
    return DCTop(CircleValue(val), 2)


def cup_t2_12(x: DC1_T2, y: DC2_T2) -> DCTop:
    # degrees 1 and 2: graded commutativity has sign +1
    return cup_t2_21(y, x)


def cup(x, y):
    """Cup product dispatching on the class types."""
    if isinstance(x, DC1_S1) and isinstance(y, DC1_S1):
        return cup_s1(x, y)
    if isinstance(x, DC1_T2) and isinstance(y, DC1_T2):
        return cup_t2_11(x, y)
    if isinstance(x, DC2_T2) and isinstance(y, DC1_T2):
        return cup_t2_21(x, y)
    if isinstance(x, DC1_T2) and isinstance(y, DC2_T2):
        return cup_t2_12(x, y)
    if isinstance(x, DCTop) or isinstance(y, DCTop):
        return DCTop(CircleValue(0), x.dim if isinstance(x, DCTop) else y.dim)
    raise PreconditionError(f"no cup product for {type(x).__name__} x {type(y).__name__}")


# -- functoriality ----------------------------------------------------------------


def pullback(x, factor: int):
    """Pull a class on S^1 back to T^2 along the projection onto ``factor``."""
    if factor not in (1, 2):
        raise PreconditionError("factor must be 1 or 2")
    if isinstance(x, DC1_S1):
        n1, n2 = (x.n, 0) if factor == 1 else (0, x.n)
        return DC1_T2(n1, n2, x.f.pullback(factor))
    if isinstance(x, DCTop):
        # a(v du) for the top class [v]
        v = FourierFn.constant(2, x.value.rep)
        zero = FourierFn(2)
        return DC2_T2(0, v, zero) if factor == 1 else DC2_T2(0, zero, v)
    raise PreconditionError(f"cannot pull back {type(x).__name__}")


def fiber_int_s1(x, factor: int):
    """Integrate a class on T^2 over the circle ``factor``; the result lives on the other circle."""
    if factor not in (1, 2):
        raise PreconditionError("factor must be 1 or 2")
    if isinstance(x, DC2_T2):
        if factor == 2:
            return DC1_S1(x.k, x.alpha_t.integrate_axis(1))
        return DC1_S1(-x.k, x.alpha_s.integrate_axis(0))
    if isinstance(x, DC1_T2):
        return x.n2 if factor == 2 else x.n1
    if isinstance(x, DCTop):
        return x.value
    raise PreconditionError(f"cannot integrate {type(x).__name__}")


def restrict_slice(x, quarter: int):
    """Restrict a class on T^2 to the circle ``{s = quarter/4} x S^1_t``."""
    s0 = Fraction(quarter, 4)
    if isinstance(x, DC1_T2):
        return DC1_S1(x.n2, x.f.restrict(0, quarter) + x.n1 * s0)
    if isinstance(x, DC2_T2):
        return DCTop(CircleValue(x.alpha_t.restrict(0, quarter).mean() + x.k * s0), 1)
    raise PreconditionError(f"cannot restrict {type(x).__name__}")


def holonomy_exponent(alpha) -> ScalarK:
    """Exponent of the holonomy of d + alpha dt around S^1, i.e. ``-int alpha``."""
    return -_coerce_fn(alpha, 1).mean()


def c1_hat(alpha) -> DCTop:
    """Differential first Chern class of the line bundle with connection d + alpha dt on S^1."""
    return DCTop(CircleValue(-_coerce_fn(alpha, 1).mean() * TAU_INV), 1)


def from_json(data: Mapping):
    """Decode any of the class types from its JSON form."""
    if "k" in data:
        return DC2_T2.from_json(data)
    n = data.get("n", 0)
    if isinstance(n, list):
        return DC1_T2.from_json(data)
    return DC1_S1.from_json(data)
