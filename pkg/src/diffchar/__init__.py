"""Exact computations with characteristic classes, Chern-Simons invariants
and differential cohomology on small model manifolds."""

from diffchar.errors import PreconditionError, TransgressionCheckError
from diffchar.scalars import (
    I,
    ONE,
    TAU,
    TAU_INV,
    ZERO,
    CircleValue,
    ScalarK,
    bernoulli,
    circle_reduce,
    torsion_order,
)
from diffchar.series import PowerSeries, e_series, genus_cpn, rho_ch, su2_rep_ch, todd_series

__version__ = "0.1.0"

__all__ = [
    "PreconditionError",
    "TransgressionCheckError",
    "I",
    "ONE",
    "TAU",
    "TAU_INV",
    "ZERO",
    "CircleValue",
    "ScalarK",
    "bernoulli",
    "circle_reduce",
    "torsion_order",
    "PowerSeries",
    "e_series",
    "genus_cpn",
    "rho_ch",
    "su2_rep_ch",
    "todd_series",
]
