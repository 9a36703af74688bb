"""Ready-made model manifolds and bundles with connection.

Volume monomials are normalized so that ``integrate_fund(vol) == 1``.
Torus models use Fourier generators ``e(x) = exp(2 pi i x)`` with
``d e(x) = tau e(x) dx``; on them a closed form is exact iff its
constant-coefficient (harmonic) part vanishes, which makes "equal modulo
exact forms" decidable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from diffchar.errors import PreconditionError
from diffchar.forms import (
    AlgebraPresentation,
    ConnectionMatrix,
    Form,
    FormMatrix,
    Generator,
    chern_total,
    curvature,
)
from diffchar.scalars import TAU, ScalarK


def fourier_gen(coord: str) -> str:
    return f"e({coord})"


def torus(coords: Sequence[str] = ("x", "y")) -> AlgebraPresentation:
    """Fourier-polynomial forms on the flat torus with the given coordinates."""
    gens = [Generator(fourier_gen(c), 0, laurent=True) for c in coords]
    gens += [Generator(f"d{c}", 1) for c in coords]
    diff = {fourier_gen(c): [(TAU, {fourier_gen(c): 1, f"d{c}": 1})] for c in coords}
    return AlgebraPresentation(gens, len(coords), diff, name=f"T{len(coords)}" if len(coords) > 1 else "S1")


def circle(coord: str = "x") -> AlgebraPresentation:
    return torus((coord,))


def polynomial_space(coords: Sequence[str] = ("x", "y")) -> AlgebraPresentation:
    """Polynomial forms on R^n."""
    gens = [Generator(c, 0) for c in coords] + [Generator(f"d{c}", 1) for c in coords]
    diff = {c: [(1, {f"d{c}": 1})] for c in coords}
    return AlgebraPresentation(gens, len(coords), diff, name=f"R{len(coords)}")


def exterior(coords: Sequence[str]) -> AlgebraPresentation:
    """Constant-coefficient forms: the exterior algebra on dx_1, ..., dx_n."""
    gens = [Generator(f"d{c}", 1) for c in coords]
    return AlgebraPresentation(gens, len(coords), {}, name=f"Lambda{len(coords)}")


def cpn(n: int) -> AlgebraPresentation:
    """Class-level model of CP^n: one closed 2-form h with h^(n+1) = 0, normalized."""
    if n < 0:
        raise PreconditionError(f"CP^n needs n >= 0, got {n}")
    return AlgebraPresentation([Generator("h", 2, n + 1)], 2 * n, {}, name=f"CP{n}")


def sphere4() -> AlgebraPresentation:
    return AlgebraPresentation([Generator("vol", 4, 2)], 4, {}, name="S4")


def circle_bundle_cpn(n: int, k: int, c1_sign: int = 1) -> AlgebraPresentation:
    """Unit circle bundle of the k-th power of a line bundle over CP^n.

    Generators: the normalized angular form theta (fibre integral 1) and
    h; d(theta) = -c1_sign * k * h, so that the connection form
    (tau/k) theta of the pulled-back line bundle has curvature
    -c1_sign * tau * h, i.e. first Chern form c1_sign * h.
    """
    if k < 1:
        raise PreconditionError(f"circle bundle needs k >= 1, got {k}")
    gens = [Generator("theta", 1), Generator("h", 2, n + 1)]
    diff = {"theta": [(-c1_sign * k, {"h": 1})]}
    return AlgebraPresentation(gens, 2 * n + 1, diff, name=f"S(L^{k})->CP{n}")


def harmonic_part(x: Form) -> Form:
    """Constant-coefficient part of a form on a torus model."""
    pres = x.pres
    fourier = [i for i, g in enumerate(pres.generators) if g.laurent]
    if any(g.degree == 0 and not g.laurent for g in pres.generators):
        raise PreconditionError("harmonic part is only defined on Fourier torus models")
    return Form(pres, {k: c for k, c in x.terms.items() if all(k[0][i] == 0 for i in fourier) and not k[1] and not k[2]})


def is_exact_on_torus(x: Form) -> bool:
    """Decide exactness of a form on a torus model (closed with zero harmonic part)."""
    if x.has_path_dependence():
        raise PreconditionError("exactness test expects a form on the torus itself (no t, dt)")
    return x.is_closed() and harmonic_part(x).is_zero()


@dataclass
class ModelBundle:
    name: str
    base: AlgebraPresentation
    volume: dict
    connection: ConnectionMatrix | None = None
    curvature: FormMatrix | None = None
    characteristic: dict = field(default_factory=dict)
    flat_connection: ConnectionMatrix | None = None
    notes: str = ""

    def __post_init__(self):
        if self.curvature is None and self.connection is not None:
            self.curvature = curvature(self.connection)
        if self.curvature is not None:
            for row in self.curvature.entries:
                for a in row:
                    if not a.is_closed() and self.curvature.size == 1:
                        raise PreconditionError(f"curvature entry {a} of {self.name} is not closed")

    def volume_form(self) -> Form:
        return self.base.monomial(self.volume)

    def chern_total(self) -> Form:
        if self.curvature is not None:
            return chern_total(self.curvature)
        total = self.base.one()
        for k in sorted(self.characteristic):
            if re.fullmatch(r"c\d+", k):
                total = total + self.characteristic[k]
        return total

    def chern(self, k: int) -> Form:
        if self.curvature is None and f"c{k}" in self.characteristic:
            return self.characteristic[f"c{k}"]
        return self.chern_total().part(2 * k)

    def to_json(self) -> dict:
        out = {"name": self.name, "presentation": self.base.to_json(), "volume": dict(self.volume)}
        if self.connection is not None:
            out["connection"] = [[str(a) for a in row] for row in self.connection.entries]
        if self.curvature is not None:
            out["curvature"] = [[str(a) for a in row] for row in self.curvature.entries]
        if self.characteristic:
            out["characteristic"] = {k: str(v) for k, v in sorted(self.characteristic.items())}
        if self.notes:
            out["notes"] = self.notes
        return out


def integrate_fund(x: Form, m: ModelBundle | AlgebraPresentation, volume: Mapping | None = None) -> ScalarK:
    """Pairing with the fundamental class: coefficient of the normalized volume monomial."""
    if isinstance(m, ModelBundle):
        volume = m.volume
        pres = m.base
    else:
        pres = m
        if volume is None:
            volume = default_volume(pres)
    if x.pres is not pres and x.pres.to_json() != pres.to_json():
        raise PreconditionError("form and model live on different presentations")
    return x.coeff(volume)


def default_volume(pres: AlgebraPresentation) -> dict:
    """Volume monomial for the presentations built in this module."""
    names = [g.name for g in pres.generators]
    if "theta" in names:
        n = pres.top_degree // 2
        return {"theta": 1, "h": n} if n else {"theta": 1}
    if names == ["h"]:
        return {"h": pres.top_degree // 2} if pres.top_degree else {}
    if names == ["vol"]:
        return {"vol": 1}
    return {g.name: 1 for g in pres.generators if g.degree == 1}


def cpn_tangent_curvature(n: int, base: AlgebraPresentation | None = None, complexified: bool = False) -> FormMatrix:
    """Split curvature of T CP^n (+ trivial line), total Chern form (1+h)^(n+1).

    With ``complexified`` the conjugate summand is appended, giving
    the curvature of (T CP^n) (x) C used for Pontryagin forms.
    """
    base = base or cpn(n)
    h = base.gen("h")
    diag = [h * (-TAU)] * (n + 1)
    if complexified:
        diag = diag + [h * TAU] * (n + 1)
    return FormMatrix.diagonal(base, diag)


def _alpha_on_circle(pres: AlgebraPresentation, alpha) -> Form:
    if isinstance(alpha, Form):
        return alpha
    coord = pres.generators[-1].name[1:]
    g = fourier_gen(coord)
    out = pres.zero()
    for mode, c in dict(alpha).items():
        out = out + pres.monomial({g: int(mode), f"d{coord}": 1}, ScalarK.coerce(c))
    return out


def catalog(name: str, *args, **kwargs) -> ModelBundle:
    """Look up a model by name, e.g. ``catalog("cpn_taut(2)")`` or ``catalog("lens_circle", 1, 3)``."""
    m = re.fullmatch(r"\s*([a-z0-9_]+)\s*(?:\((.*)\))?\s*", name)
    if not m:
        raise PreconditionError(f"cannot parse model name {name!r}")
    key = m.group(1)
    if m.group(2):
        args = tuple(int(a) for a in m.group(2).split(",") if a.strip()) + args
    if key not in _CATALOG:
        raise PreconditionError(f"unknown model {key!r}; known: {', '.join(sorted(_CATALOG))}")
    return _CATALOG[key](*args, **kwargs)


def _cpn_taut(n: int = 1) -> ModelBundle:
    base = cpn(n)
    R = FormMatrix(base, [[base.gen("h") * TAU]])
    note = "R = tau*h with h the normalized SU(n+1)-invariant volume class; c1 = -h"
    return ModelBundle(f"cpn_taut({n})", base, default_volume(base), curvature=R, notes=note)


def _poincare_t2() -> ModelBundle:
    base = torus(("y", "x"))
    R = FormMatrix(base, [[base.gen("dy") * base.gen("dx") * (-TAU)]])
    note = "Poincare bundle on J(S^1) x S^1 with coordinates (y, x); c1 = dy^dx"
    return ModelBundle("poincare_t2", base, {"dy": 1, "dx": 1}, curvature=R, notes=note)


def _hopf_su2_s4() -> ModelBundle:
    base = sphere4()
    data = {"c1": base.zero(), "c2": base.gen("vol")}
    note = "SU(2) instanton bundle; only the characteristic forms are stored"
    return ModelBundle("hopf_su2_s4", base, {"vol": 1}, characteristic=data, notes=note)


def _flat_s1(alpha=None) -> ModelBundle:
    base = circle("x")
    a = _alpha_on_circle(base, {0: 1} if alpha is None else alpha)
    A = ConnectionMatrix(base, [[a]])
    return ModelBundle("flat_s1", base, {"dx": 1}, connection=A, flat_connection=ConnectionMatrix.trivial(base, 1))


def _lens_circle(n: int = 1, k: int = 1, tautological: bool = False) -> ModelBundle:
    sign = -1 if tautological else 1
    base = circle_bundle_cpn(n, k, sign)
    alpha = base.gen("theta") * (TAU / k)
    A = ConnectionMatrix(base, [[alpha]])
    note = (
        "unit circle bundle of L^k over CP^n; connection = pullback of the line bundle L "
        f"({'tautological, c1 = -h' if tautological else 'c1 = h'}), flat connection = 0"
    )
    return ModelBundle(
        f"lens_circle({n},{k})",
        base,
        default_volume(base),
        connection=A,
        flat_connection=ConnectionMatrix.trivial(base, 1),
        notes=note,
    )


def _cpn_tangent(n: int = 1, complexified: bool = False) -> ModelBundle:
    base = cpn(n)
    R = cpn_tangent_curvature(n, base, complexified)
    note = "T CP^n + trivial line split as (n+1) copies of the hyperplane bundle"
    if complexified:
        note += ", tensored with C"
    return ModelBundle(f"cpn_tangent({n})", base, default_volume(base), curvature=R, notes=note)


def _cpn_tangent_c(n: int = 1) -> ModelBundle:
    return _cpn_tangent(n, complexified=True)


_CATALOG = {
    "cpn_taut": _cpn_taut,
    "cpn_tangent": _cpn_tangent,
    "cpn_tangent_c": _cpn_tangent_c,
    "poincare_t2": _poincare_t2,
    "hopf_su2_s4": _hopf_su2_s4,
    "flat_s1": _flat_s1,
    "lens_circle": _lens_circle,
}

CATALOG_NAMES = tuple(sorted(_CATALOG))


@dataclass(frozen=True)
class C1Power:
    """The class ``coeff * c1^power`` of a line bundle on the base."""

    coeff: int
    power: int

    def integrate(self, c1_power_integral: int = 1) -> int:
        return self.coeff * c1_power_integral

    def __str__(self):
        if self.power == 0:
            return str(self.coeff)
        mono = "c1" if self.power == 1 else f"c1^{self.power}"
        if self.coeff == 1:
            return mono
        if self.coeff == -1:
            return "-" + mono
        return f"{self.coeff}*{mono}"


def disc_transgression(kappa: int, n: int) -> C1Power:
    """Fibre integral of c1^n over the disc bundle of E^kappa, rel. boundary trivialization.

    Returned as the class -kappa^n c1(E)^(n-1) on the base.
    """
    if n < 1:
        raise PreconditionError(f"disc transgression needs n >= 1, got {n}")
    return C1Power(-(kappa**n), n - 1)
