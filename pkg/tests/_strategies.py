"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from diffchar.scalars import ScalarK

small_int = st.integers(-6, 6)
fractions = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 12))


@st.composite
def scalars(draw, max_terms=3, tau_range=2):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        k = draw(st.integers(-tau_range, tau_range))
        terms[k] = (draw(fractions), draw(fractions))
    return ScalarK(terms)


def degree_one_monomials(pres, max_laurent=1, max_poly=1):
    """Monomial exponent dicts of total degree 1 with small degree-0 exponents."""
    zero_gens = [g for g in pres.generators if g.degree == 0]
    one_gens = [g for g in pres.generators if g.degree == 1]
    base = [{}]
    for g in zero_gens:
        rng = range(-max_laurent, max_laurent + 1) if g.laurent else range(0, max_poly + 1)
        base = [dict(b, **({g.name: e} if e else {})) for b in base for e in rng]
    return [dict(b, **{g.name: 1}) for b in base for g in one_gens]


@st.composite
def one_forms(draw, pres, max_terms=2):
    monos = degree_one_monomials(pres)
    k = draw(st.integers(0, max_terms))
    out = pres.zero()
    for _ in range(k):
        m = draw(st.sampled_from(monos))
        c = draw(st.builds(lambda a, b: ScalarK({0: (a, b)}), st.integers(-3, 3), st.integers(-2, 2)))
        out = out + pres.monomial(m, c)
    return out


@st.composite
def connections(draw, pres, max_rank=3, density=0.5):
    from diffchar.forms import ConnectionMatrix

    r = draw(st.integers(1, max_rank))
    rows = []
    for _ in range(r):
        row = []
        for _ in range(r):
            if draw(st.floats(0, 1)) < density:
                row.append(draw(one_forms(pres)))
            else:
                row.append(pres.zero())
        rows.append(row)
    return ConnectionMatrix(pres, rows)
