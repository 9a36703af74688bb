"""Secondary invariants: Chern-Simons values, flat classes, e-invariant constants.

The rational values are recomputed along their derivations (disc-bundle
extension plus covering trick for lens spaces, transgression along the
straight path for circle bundles) rather than stored as constants.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from diffchar.errors import PreconditionError
from diffchar.forms import transgress
from diffchar.models import catalog, cpn, disc_transgression, integrate_fund
from diffchar.scalars import TAU_INV, ZERO, CircleValue, ScalarK, circle_reduce, torsion_order
from diffchar.series import e_series


@dataclass
class InvariantRecord:
    name: str
    parameters: dict
    value: Any
    note: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        v = self.value
        if isinstance(v, CircleValue):
            v = str(v.as_rational()) if v.is_rational() else v.to_json()
        elif hasattr(v, "to_json"):
            v = v.to_json()
        out = {"name": self.name, "parameters": dict(self.parameters), "value": v}
        if self.note:
            out["note"] = self.note
        out.update(self.extra)
        return out


# -- lens spaces L^3_k -----------------------------------------------------------


def _signature_s4() -> int:
    return 0


def lens3_route(k: int) -> dict:
    """Intermediate quantities of the disc-bundle computation for L^3_k = S^3/Z_k."""
    if k < 1:
        raise PreconditionError(f"lens space needs k >= 1, got {k}")
    # L^3_k bounds the disc bundle D of L^k over CP^1; p1 of TD splits as
    # q^*c1(T CP^1)^2 + c1^2 of the vertical line bundle.
    base = cpn(1)
    horizontal = integrate_fund((base.gen("h") * 2) ** 2, base)
    vertical = disc_transgression(k, 2).integrate(1)
    p1_disc = horizontal.as_rational() + vertical
    # k copies of the hemisphere extension glue with the Hopf disc bundle to S^4
    hopf_disc = disc_transgression(1, 2).integrate(1)
    cover = Fraction(3 * _signature_s4() - hopf_disc, k)
    return {"p1_disc": p1_disc, "cover_correction": cover, "total": p1_disc + cover}


def cs_lens3(k: int) -> CircleValue:
    """Chern-Simons invariant of the round lens space L^3_k."""
    return circle_reduce(lens3_route(k)["total"])


def cs_lens3_refined(k: int) -> CircleValue:
    """Refined invariant [(1/3) * (integral of p1)], well defined using the framing."""
    return circle_reduce(lens3_route(k)["total"] / 3)


# -- circle bundles over CP^n --------------------------------------------------------


def cs_unit_circle_bundle(n: int, k: int, r: int = 1, tautological: bool = False) -> CircleValue:
    """cs of c1^(n+1) for the flat connection on the r-th power over S(L^k) -> CP^n.

    Integrates the transgression from the flat connection to the pullback
    of the r-th power of the line bundle with connection.
    """
    if n < 0:
        raise PreconditionError(f"base CP^n needs n >= 0, got {n}")
    m = catalog("lens_circle", n, k, tautological=tautological)
    A1 = m.connection.scale(r)
    w = transgress(m.flat_connection, A1, f"c1^{n + 1}")
    return circle_reduce(integrate_fund(w, m))


def cs_flat_lens_line(p: int, j: int, n: int) -> CircleValue:
    """cs of c1^n for the flat line bundle with holonomy exp(2 pi i j/p) on L^(2n-1)_p."""
    if p < 1 or n < 1:
        raise PreconditionError(f"need p >= 1 and n >= 1, got p={p}, n={n}")
    return cs_unit_circle_bundle(n - 1, p, j)


# -- flat line bundles on S^1 ---------------------------------------------------------

_EXP = re.compile(r"^\s*e(?:\s*\^\s*\(?\s*([-+0-9/ ]+?)\s*\)?)?\s*$")


def flat_c1_bar(modulus=None, *, log=None, digits: int = 50):
    """(i/pi) log m for the flat bundle with holonomy of modulus m.

    Exact (in ScalarK, as -2 s tau^-1) when ``log = s`` is given, when the
    modulus is written ``"e^s"``, or when m = 1; otherwise an mpmath
    complex with ``digits`` significant digits.
    """
    if log is None and isinstance(modulus, str):
        m = _EXP.match(modulus)
        if m:
            log = Fraction(m.group(1).replace(" ", "")) if m.group(1) else Fraction(1)
        else:
            modulus = Fraction(modulus)
    if log is not None:
        return ScalarK.coerce(Fraction(log)) * TAU_INV * (-2)
    if modulus is None:
        raise PreconditionError("flat_c1_bar needs a modulus or its logarithm")
    value = Fraction(modulus) if not isinstance(modulus, float) else modulus
    if value <= 0:
        raise PreconditionError(f"modulus must be positive, got {modulus}")
    if value == 1:
        return ZERO
    import mpmath

    with mpmath.workdps(digits):
        if isinstance(value, Fraction):
            x = mpmath.mpf(value.numerator) / value.denominator
        else:
            x = mpmath.mpf(value)
        return mpmath.mpc(0, mpmath.log(x) / mpmath.pi)


# -- e-invariants ---------------------------------------------------------------------

_ORDER_CASES = {
    "S1": ("S1", (0,)),
    "SU2": ("SU2", (0,)),
    "SO3": ("SO3", (0,)),
    "SU2_S4": ("SU2", (0, 2)),
}


def e_framed_const(group: str) -> CircleValue:
    """Constant term of the e-invariant series, as an element of C/Z."""
    return circle_reduce(e_series(group, 0)[0])


def e_invariant_vector(case: str) -> tuple:
    key = case.upper().replace("(", "").replace(")", "")
    if key not in _ORDER_CASES:
        raise PreconditionError(f"unknown case {case!r}; expected one of {', '.join(_ORDER_CASES)}")
    group, idx = _ORDER_CASES[key]
    s = e_series(group, max(idx))
    return tuple(circle_reduce(s[i]) for i in idx)


def e_order(case) -> int:
    """Order in C/Z (or in a product of circles) of an e-invariant."""
    if isinstance(case, str):
        vec = e_invariant_vector(case)
    else:
        vec = tuple(case)
    order = torsion_order(list(vec))
    if order is None:
        raise PreconditionError("value is not torsion")
    return order


def records_lens3(ks) -> list:
    out = []
    for k in ks:
        route = lens3_route(k)
        out.append(
            InvariantRecord(
                "cs_lens3",
                {"k": k},
                cs_lens3(k),
                extra={"refined": str(cs_lens3_refined(k).as_rational()), "p1_disc": str(route["p1_disc"])},
            )
        )
    return out


def lcm_orders(*orders: int) -> int:
    return math.lcm(*orders)
