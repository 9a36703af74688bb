"""Sparse graded-commutative algebras of differential forms.

A presentation lists generators with degrees; odd generators anticommute
and square to zero, even ones may carry a nilpotency exponent, and degree-0
generators may be Laurent (used for Fourier modes ``e(x) = exp(2 pi i x)``).
Every form also lives over ``[0,1] x M`` through an auxiliary path
parameter ``t`` (degree 0) and its differential ``dt``.  Monomials above
the presentation's top degree (``dt`` not counted) vanish.

Connections are square matrices ``A`` of 1-forms with ``nabla = d + A``;
the curvature is kept raw, ``R = dA + A^A``, and the factor ``1/(2 pi i)``
enters Chern-Weil forms only through ``tau^-1``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from diffchar.errors import PreconditionError, TransgressionCheckError
from diffchar.scalars import ONE, TAU_INV, ZERO, ScalarK

# Form term key: (generator exponents, dt flag, power of t)
Key = tuple


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    nilpotency: int | None = None
    laurent: bool = False

    def __post_init__(self):
        if self.degree < 0:
            raise PreconditionError(f"generator {self.name} has negative degree")
        if self.laurent and self.degree != 0:
            raise PreconditionError(f"Laurent generator {self.name} must have degree 0")
        if self.degree % 2 == 1:
            object.__setattr__(self, "nilpotency", 2)
        if self.nilpotency is not None and self.nilpotency < 1:
            raise PreconditionError(f"nilpotency exponent of {self.name} must be >= 1")


class AlgebraPresentation:
    """Generators, top degree and the differential on generators.

    ``differential`` maps a generator name to a list of terms
    ``(coefficient, {generator: exponent})``; generators not listed are
    closed.  ``d(d(g)) == 0`` is checked for every generator.
    """

    def __init__(
        self,
        generators: Sequence[Generator | tuple],
        top_degree: int,
        differential: Mapping[str, Iterable] | None = None,
        name: str = "",
    ):
        gens = [g if isinstance(g, Generator) else Generator(*g) for g in generators]
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise PreconditionError("generator names must be distinct")
        self.name = name
        self.generators = tuple(gens)
        self.top_degree = int(top_degree)
        self.index = {g.name: i for i, g in enumerate(gens)}
        self.degrees = tuple(g.degree for g in gens)
        self.odd = tuple(i for i, g in enumerate(gens) if g.degree % 2)
        self._n = len(gens)
        self._mul_cache: dict = {}
        self._d_cache: dict = {}
        self._diff_terms = {k: list(v) for k, v in (differential or {}).items()}
        for k in self._diff_terms:
            if k not in self.index:
                raise PreconditionError(f"differential given for unknown generator {k!r}")
        self._dgen: list[Form] = [self.zero()] * self._n
        for gname, terms in self._diff_terms.items():
            i = self.index[gname]
            f = self.terms_form(terms)
            if not f.is_homogeneous(self.degrees[i] + 1):
                raise PreconditionError(f"d({gname}) must be homogeneous of degree {self.degrees[i] + 1}")
            self._dgen[i] = f
        for g in gens:
            if not self.gen(g.name).d().d().is_zero():
                raise PreconditionError(f"d(d({g.name})) != 0 in presentation {name!r}")

    # building forms -------------------------------------------------------

    def zero(self) -> "Form":
        return Form(self, {})

    def one(self) -> "Form":
        return self.const(ONE)

    def const(self, c) -> "Form":
        c = ScalarK.coerce(c)
        return Form(self, {(self._unit_exps(), 0, 0): c} if c else {})

    def _unit_exps(self) -> tuple:
        return (0,) * self._n

    def monomial(self, exps: Mapping[str, int] | None = None, coeff=1, t_power: int = 0, dt: bool = False) -> "Form":
        e = [0] * self._n
        for k, v in (exps or {}).items():
            if k not in self.index:
                raise PreconditionError(f"unknown generator {k!r}")
            e[self.index[k]] = int(v)
        key = self._normalize((tuple(e), int(bool(dt)), t_power))
        c = ScalarK.coerce(coeff)
        if key is None or not c:
            return self.zero()
        return Form(self, {key: c})

    def gen(self, name: str) -> "Form":
        return self.monomial({name: 1})

    def t(self) -> "Form":
        return self.monomial(t_power=1)

    def dt(self) -> "Form":
        return self.monomial(dt=True)

    def terms_form(self, terms: Iterable) -> "Form":
        out = self.zero()
        for term in terms:
            if isinstance(term, Mapping):
                coeff = ScalarK.from_json(term.get("coeff", "1"))
                mono = term.get("mono", {})
            else:
                coeff, mono = term
            out = out + self.monomial(mono, coeff)
        return out

    # monomial arithmetic -------------------------------------------------------

    def mono_degree(self, exps: tuple) -> int:
        return sum(e * d for e, d in zip(exps, self.degrees))

    def _normalize(self, key: Key) -> Key | None:
        exps, dt, tp = key
        if tp < 0:
            raise PreconditionError("negative power of the path parameter t")
        for i, e in enumerate(exps):
            g = self.generators[i]
            if e < 0 and not g.laurent:
                raise PreconditionError(f"negative exponent of non-Laurent generator {g.name}")
            if g.nilpotency is not None and e >= g.nilpotency:
                return None
        if self.mono_degree(exps) > self.top_degree:
            return None
        return key

    def mono_mul(self, e1: tuple, d1: int, e2: tuple, d2: int):
        """(sign, exps, dt) of the product of two monomials, or None if zero."""
        ck = (e1, d1, e2, d2)
        if ck in self._mul_cache:
            return self._mul_cache[ck]
        res = None
        if not (d1 and d2):
            exps = tuple(a + b for a, b in zip(e1, e2))
            ok = self.mono_degree(exps) <= self.top_degree
            if ok:
                for i, e in enumerate(exps):
                    nil = self.generators[i].nilpotency
                    if nil is not None and e >= nil:
                        ok = False
                        break
            if ok:
                # reorder the odd factors of the right monomial past those of the left
                inv = 0
                o1 = [i for i in self.odd if e1[i]]
                o2 = [i for i in self.odd if e2[i]]
                if d2:
                    inv += len(o1)
                for a in o1:
                    for b in o2:
                        if a > b:
                            inv += 1
                res = (-1 if inv % 2 else 1, exps, d1 | d2)
        self._mul_cache[ck] = res
        return res

    def d_monomial(self, exps: tuple) -> "Form":
        """d of a dt-free, t-free monomial (cached)."""
        if exps in self._d_cache:
            return self._d_cache[exps]
        out = self.zero()
        prefix = self.one()
        prefix_deg = 0
        for i, e in enumerate(exps):
            if e == 0:
                continue
            single = [0] * self._n
            single[i] = e
            factor = Form(self, {(tuple(single), 0, 0): ONE})
            lower = list(single)
            lower[i] = e - 1
            dfac = Form(self, {(tuple(lower), 0, 0): ScalarK.coerce(e)}) * self._dgen[i]
            rest = [0] * self._n
            for j in range(i + 1, self._n):
                rest[j] = exps[j]
            suffix = Form(self, {(tuple(rest), 0, 0): ONE})
            term = prefix * dfac * suffix
            out = out + (term if prefix_deg % 2 == 0 else -term)
            prefix = prefix * factor
            prefix_deg += e * self.degrees[i]
        self._d_cache[exps] = out
        return out

    # serialization ---------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "top_degree": self.top_degree,
            "generators": [
                {"name": g.name, "degree": g.degree, "nilpotency": g.nilpotency, "laurent": g.laurent}
                for g in self.generators
            ],
            "differential": {
                self.generators[i].name: _form_terms_json(f)
                for i, f in enumerate(self._dgen)
                if not f.is_zero()
            },
        }

    @classmethod
    def from_json(cls, data: Mapping | str) -> "AlgebraPresentation":
        if isinstance(data, str):
            data = json.loads(data)
        gens = [
            Generator(g["name"], int(g["degree"]), g.get("nilpotency"), bool(g.get("laurent", False)))
            for g in data["generators"]
        ]
        return cls(gens, data["top_degree"], data.get("differential", {}), data.get("name", ""))

    def __repr__(self):
        return f"AlgebraPresentation({self.name or [g.name for g in self.generators]}, top={self.top_degree})"


def _form_terms_json(f: "Form") -> list:
    out = []
    for (exps, dt, tp), c in f.sorted_terms():
        if dt or tp:
            raise PreconditionError("differentials on generators cannot involve t or dt")
        mono = {f.pres.generators[i].name: e for i, e in enumerate(exps) if e}
        out.append({"coeff": c.to_json(), "mono": mono})
    return out


class Form:
    """An element of the form algebra; immutable value."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres: AlgebraPresentation, terms: dict):
        self.pres = pres
        self.terms = terms

    # arithmetic ---------------------------------------------------------------

    def _check(self, other: "Form"):
        if other.pres is not self.pres:
            raise PreconditionError("forms live on different presentations")

    def __add__(self, other):
        if not isinstance(other, Form):
            other = self.pres.const(other)
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            if k in out:
                s = out[k] + c
                if s:
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = c
        return Form(self.pres, out)

    __radd__ = __add__

    def __neg__(self):
        return Form(self.pres, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Form):
            other = self.pres.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Form):
            c = ScalarK.coerce(other)
            if not c:
                return self.pres.zero()
            return Form(self.pres, {k: v * c for k, v in self.terms.items()})
        self._check(other)
        pres = self.pres
        out: dict = {}
        for (e1, d1, t1), c1 in self.terms.items():
            for (e2, d2, t2), c2 in other.terms.items():
                r = pres.mono_mul(e1, d1, e2, d2)
                if r is None:
                    continue
                sign, e, dd = r
                key = (e, dd, t1 + t2)
                c = c1 * c2
                if sign < 0:
                    c = -c
                if key in out:
                    out[key] = out[key] + c
                else:
                    out[key] = c
        return Form(pres, {k: v for k, v in out.items() if v})

    def __rmul__(self, other):
        return self * other

    def __pow__(self, n: int):
        if n < 0:
            raise PreconditionError("negative powers of forms are undefined")
        out = self.pres.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Form):
            return self.pres is other.pres and self.terms == other.terms
        if isinstance(other, (int, Fraction, ScalarK)):
            return self == self.pres.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # structure ------------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree_of(self, key: Key) -> int:
        exps, dt, _ = key
        return self.pres.mono_degree(exps) + dt

    def degrees(self) -> set:
        return {self.degree_of(k) for k in self.terms}

    def is_homogeneous(self, deg: int) -> bool:
        return all(self.degree_of(k) == deg for k in self.terms)

    def part(self, deg: int) -> "Form":
        return Form(self.pres, {k: c for k, c in self.terms.items() if self.degree_of(k) == deg})

    def d(self) -> "Form":
        pres = self.pres
        out = pres.zero()
        for (exps, dt, tp), c in self.terms.items():
            if tp and not dt:
                out = out + Form(pres, {(exps, 1, tp - 1): c * tp})
            dm = pres.d_monomial(exps)
            if dm.terms:
                shifted = {}
                for (e2, d2, t2), c2 in dm.terms.items():
                    if dt:
                        if d2:
                            continue
                        shifted[(e2, 1, tp)] = -(c * c2)
                    else:
                        shifted[(e2, d2, tp)] = c * c2
                out = out + Form(pres, shifted)
        return out

    def is_closed(self) -> bool:
        return self.d().is_zero()

    def has_path_dependence(self) -> bool:
        return any(dt or tp for (_, dt, tp) in self.terms)

    def at_t(self, value) -> "Form":
        """Restrict to the slice {t = value}: t -> value, dt -> 0."""
        value = Fraction(value)
        out: dict = {}
        for (exps, dt, tp), c in self.terms.items():
            if dt:
                continue
            key = (exps, 0, 0)
            v = c * (value**tp)
            out[key] = out[key] + v if key in out else v
        return Form(self.pres, {k: v for k, v in out.items() if v})

    def dt_coefficient(self) -> "Form":
        """Q in the decomposition self = P + dt^Q (dt is leftmost)."""
        return Form(self.pres, {(e, 0, tp): c for (e, dt, tp), c in self.terms.items() if dt})

    def integrate_path(self) -> "Form":
        """Fibre integral over [0,1]: the integral of Q dt for self = P + dt^Q."""
        out: dict = {}
        for (e, dt, tp), c in self.terms.items():
            if not dt:
                continue
            key = (e, 0, 0)
            v = c * Fraction(1, tp + 1)
            out[key] = out[key] + v if key in out else v
        return Form(self.pres, {k: v for k, v in out.items() if v})

    def coeff(self, exps: Mapping[str, int] | None = None, t_power: int = 0, dt: bool = False) -> ScalarK:
        e = [0] * len(self.pres.generators)
        for k, v in (exps or {}).items():
            e[self.pres.index[k]] = v
        return self.terms.get((tuple(e), int(dt), t_power), ZERO)

    # display -----------------------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (self.degree_of(kv[0]), -kv[0][1], kv[0][2], kv[0][0]))

    def _mono_str(self, key: Key) -> str:
        exps, dt, tp = key
        parts = []
        if tp:
            parts.append("t" if tp == 1 else f"t^{tp}")
        if dt:
            parts.append("dt")
        for i, e in enumerate(exps):
            if e:
                n = self.pres.generators[i].name
                parts.append(n if e == 1 else f"{n}^{e}")
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for key, c in self.sorted_terms():
            m = self._mono_str(key)
            cs = str(c)
            if not m:
                out.append(cs)
            elif cs == "1":
                out.append(m)
            elif cs == "-1":
                out.append("-" + m)
            else:
                if " " in cs:
                    cs = f"({cs})"
                out.append(f"{cs}*{m}")
        return " + ".join(out).replace("+ -", "- ")

    def __repr__(self):
        return f"Form({self})"


def d(x: Form) -> Form:
    return x.d()


# matrices -----------------------------------------------------------------------


class FormMatrix:
    """Square matrix with Form entries; products use the wedge product."""

    def __init__(self, pres: AlgebraPresentation, entries: Sequence[Sequence[Form]]):
        rows = [list(r) for r in entries]
        r = len(rows)
        if r == 0 or any(len(row) != r for row in rows):
            raise PreconditionError("form matrices must be square and nonempty")
        for row in rows:
            for x in row:
                if x.pres is not pres:
                    raise PreconditionError("matrix entry lives on a different presentation")
        self.pres = pres
        self.entries = rows

    @property
    def size(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, pres: AlgebraPresentation, r: int) -> "FormMatrix":
        return cls(pres, [[pres.one() if i == j else pres.zero() for j in range(r)] for i in range(r)])

    @classmethod
    def zeros(cls, pres: AlgebraPresentation, r: int) -> "FormMatrix":
        return cls(pres, [[pres.zero()] * r for _ in range(r)])

    @classmethod
    def diagonal(cls, pres: AlgebraPresentation, diag: Sequence[Form]) -> "FormMatrix":
        r = len(diag)
        return cls(pres, [[diag[i] if i == j else pres.zero() for j in range(r)] for i in range(r)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def _like(self, entries):
        return FormMatrix(self.pres, entries)

    def __add__(self, other: "FormMatrix"):
        return self._like([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other: "FormMatrix"):
        return self._like([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __neg__(self):
        return self._like([[-a for a in row] for row in self.entries])

    def scale(self, c) -> "FormMatrix":
        """Entrywise multiplication by a scalar or by a Form placed on the left."""
        return self._like([[c * a if isinstance(c, Form) else a * c for a in row] for row in self.entries])

    def __matmul__(self, other: "FormMatrix"):
        if other.size != self.size:
            raise PreconditionError("matrix sizes differ")
        r = self.size
        out = []
        for i in range(r):
            row = []
            for j in range(r):
                acc = self.pres.zero()
                for k in range(r):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return self._like(out)

    def d(self) -> "FormMatrix":
        return self._like([[a.d() for a in row] for row in self.entries])

    def trace(self) -> Form:
        out = self.pres.zero()
        for i in range(self.size):
            out = out + self.entries[i][i]
        return out

    def is_zero(self) -> bool:
        return all(a.is_zero() for row in self.entries for a in row)

    def block_sum(self, other: "FormMatrix") -> "FormMatrix":
        r, s = self.size, other.size
        z = self.pres.zero()
        rows = [list(row) + [z] * s for row in self.entries]
        rows += [[z] * r + list(row) for row in other.entries]
        return FormMatrix(self.pres, rows)

    def kron(self, other: "FormMatrix") -> "FormMatrix":
        r, s = self.size, other.size
        rows = []
        for i in range(r):
            for k in range(s):
                rows.append([self.entries[i][j] * other.entries[k][l] for j in range(r) for l in range(s)])
        return FormMatrix(self.pres, rows)

    def __eq__(self, other):
        if not isinstance(other, FormMatrix):
            return NotImplemented
        return self.pres is other.pres and self.entries == other.entries

    def __str__(self):
        return "[" + "; ".join("[" + ", ".join(str(a) for a in row) + "]" for row in self.entries) + "]"

    __repr__ = __str__


class ConnectionMatrix(FormMatrix):
    """Connection 1-form matrix ``A`` of ``nabla = d + A`` on a trivial bundle."""

    def __init__(self, pres: AlgebraPresentation, entries: Sequence[Sequence[Form]]):
        super().__init__(pres, entries)
        for row in self.entries:
            for a in row:
                if not a.is_homogeneous(1):
                    raise PreconditionError(f"connection entries must be 1-forms, got {a}")

    @classmethod
    def trivial(cls, pres: AlgebraPresentation, r: int) -> "ConnectionMatrix":
        return cls(pres, FormMatrix.zeros(pres, r).entries)

    @classmethod
    def from_matrix(cls, m: FormMatrix) -> "ConnectionMatrix":
        return cls(m.pres, m.entries)


def curvature(A: FormMatrix) -> FormMatrix:
    """R = dA + A^A."""
    return A.d() + A @ A


def bianchi_defect(A: FormMatrix, R: FormMatrix | None = None) -> FormMatrix:
    """dR + A^R - R^A, which vanishes identically."""
    if R is None:
        R = curvature(A)
    return R.d() + A @ R - R @ A


def gauge_transform(A: FormMatrix, F: FormMatrix, F_inv: FormMatrix) -> ConnectionMatrix:
    """Connection matrix of the same connection in the frame changed by F."""
    if not (F @ F_inv == FormMatrix.identity(A.pres, A.size)):
        raise PreconditionError("F_inv is not an inverse of F")
    return ConnectionMatrix.from_matrix(F_inv @ A @ F + F_inv @ F.d())


def _check_even_nilpotent(phi: FormMatrix):
    for row in phi.entries:
        for a in row:
            for key in a.terms:
                deg = a.degree_of(key)
                if deg == 0 or deg % 2:
                    raise PreconditionError(
                        f"det(1+Phi) needs entries of positive even degree; found a degree-{deg} term in {a}"
                    )


def det_one_plus(phi: FormMatrix) -> Form:
    """det(1 + Phi) computed as exp(Tr log(1 + Phi)).

    Entries must have positive even degree, so they commute and are
    nilpotent; both series are finite sums.
    """
    _check_even_nilpotent(phi)
    pres = phi.pres
    limit = pres.top_degree + 1
    log_m = phi
    power = phi
    k = 1
    while True:
        k += 1
        if 2 * k > limit:
            break
        power = power @ phi
        if power.is_zero():
            break
        coef = Fraction((-1) ** (k + 1), k)
        log_m = log_m + power.scale(coef)
    tr = log_m.trace()
    return _exp_nilpotent(tr, limit)


def _exp_nilpotent(x: Form, limit: int) -> Form:
    out = x.pres.one()
    term = x.pres.one()
    j = 0
    while True:
        j += 1
        if 2 * j > limit:
            break
        term = term * x
        if term.is_zero():
            break
        out = out + term * Fraction(1, math.factorial(j))
    return out


def _normalized(R: FormMatrix) -> FormMatrix:
    return R.scale(-TAU_INV)


def chern_total(R: FormMatrix) -> Form:
    """det(1 - R/(2 pi i))."""
    return det_one_plus(_normalized(R))


def chern_k(R: FormMatrix, k: int) -> Form:
    return chern_total(R).part(2 * k)


def ch_form(R: FormMatrix) -> Form:
    """Tr exp(-R/(2 pi i))."""
    phi = _normalized(R)
    _check_even_nilpotent(phi)
    limit = R.pres.top_degree + 1
    total = FormMatrix.identity(R.pres, R.size)
    term = FormMatrix.identity(R.pres, R.size)
    j = 0
    while True:
        j += 1
        if 2 * j > limit:
            break
        term = term @ phi
        if term.is_zero():
            break
        total = total + term.scale(Fraction(1, math.factorial(j)))
    return total.trace()


def newton_class(R: FormMatrix, n: int) -> Form:
    """s_n = n! ch_n, with ch_n the degree-2n component of the Chern character."""
    return ch_form(R).part(2 * n) * math.factorial(n)


def pontryagin(R_complexified: FormMatrix, k: int) -> Form:
    """(-1)^k c_2k of the complexified curvature."""
    return chern_k(R_complexified, 2 * k) * ((-1) ** k)


_SELECTOR = re.compile(r"^(c1\^(\d+)|c(\d+)|ch(\d+)|p(\d+))$")


def characteristic_form(selector: str | Callable[[FormMatrix], Form]) -> Callable[[FormMatrix], Form]:
    """Resolve a selector: ``c{k}``, ``ch{k}`` (degree 2k part), ``p{k}`` or ``c1^{n}``."""
    if callable(selector):
        return selector
    m = _SELECTOR.match(selector.strip().replace(" ", ""))
    if not m:
        raise PreconditionError(f"unknown characteristic form selector {selector!r}")
    if m.group(2):
        n = int(m.group(2))
        return lambda R: chern_k(R, 1) ** n
    if m.group(3):
        k = int(m.group(3))
        return lambda R: chern_k(R, k)
    if m.group(4):
        k = int(m.group(4))
        return lambda R: ch_form(R).part(2 * k)
    k = int(m.group(5))
    return lambda R: pontryagin(R, k)


def transgress(A0: FormMatrix, A1: FormMatrix, selector, check: bool = True) -> Form:
    """Transgression form along the affine path (1-t) A0 + t A1.

    The result w~ satisfies d(w~) = w(A1) - w(A0); with ``check`` the
    identity is verified exactly and a failure raises.
    """
    if A0.pres is not A1.pres or A0.size != A1.size:
        raise PreconditionError("transgression needs connections of equal rank on one presentation")
    omega = characteristic_form(selector)
    pres = A0.pres
    t = pres.t()
    path = A0.scale(1 - t) + A1.scale(t)
    w_path = omega(curvature(path))
    result = w_path.integrate_path()
    if check:
        lhs = result.d()
        rhs = omega(curvature(A1)) - omega(curvature(A0))
        if lhs != rhs:
            raise TransgressionCheckError(f"d(transgression) = {lhs} but w(A1) - w(A0) = {rhs}")
    return result
