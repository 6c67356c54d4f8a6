"""
Brute-force reference computations and input strategies used by the tests.
"""
import random

import numpy as np
from hypothesis import strategies as st

from mixedmult import filtration, monomial
from mixedmult.filtration import SurdScalar


def brute_colength(I):
    """Count the monomials outside I inside the box of its pure powers."""
    box = monomial.pure_power_bounds(I)
    if any(b is None for b in box):
        raise ValueError("brute force needs an m-primary ideal")
    grid = np.indices(tuple(box)).reshape(I.dim, -1).T
    if not len(grid):
        return 0
    gens = np.array(I.gens, dtype=np.int64)
    inside = np.all(grid[:, None, :] >= gens[None, :, :], axis=2).any(axis=1)
    return int((~inside).sum())


def primary_ideal(dim, pure, extra=()):
    """The ideal generated by x_i^pure[i] and the exponents in ``extra``."""
    gens = [tuple(p if j == i else 0 for j in range(dim)) for i, p in enumerate(pure)]
    gens.extend(tuple(e) for e in extra)
    return monomial.MonomialIdeal(dim, tuple(gens))


@st.composite
def primary_ideals(draw, dim, max_exp=4, max_extra=3):
    pure = draw(st.lists(st.integers(1, max_exp), min_size=dim, max_size=dim))
    extra = draw(
        st.lists(
            st.lists(st.integers(0, max_exp), min_size=dim, max_size=dim),
            max_size=max_extra,
        )
    )
    return primary_ideal(dim, pure, extra)


def random_primary_ideal(rng, dim, max_exp=6, max_extra=4):
    pure = [rng.randint(1, max_exp) for _ in range(dim)]
    extra = [
        [rng.randint(0, max_exp) for _ in range(dim)]
        for _ in range(rng.randint(0, max_extra))
    ]
    return primary_ideal(dim, pure, extra)


def seeded(seed=0):
    return random.Random(seed)


FILTRATION_KINDS = (
    "adic",
    "fixed-plus-adic",
    "rounded-valuation",
    "truncated",
    "rescaled",
)

scalars = st.one_of(
    st.builds(SurdScalar.rational, st.integers(1, 3), st.integers(1, 2)),
    st.builds(SurdScalar.sqrt, st.sampled_from([2, 3, 5])),
)


@st.composite
def filtrations(draw, dim, kinds=FILTRATION_KINDS, max_exp=3):
    """A random m-primary filtration of one of ``kinds``."""
    kind = draw(st.sampled_from(kinds))
    ideals = primary_ideals(dim, max_exp=max_exp, max_extra=2).filter(
        lambda I: not I.is_unit
    )
    if kind == "adic":
        return filtration.adic(draw(ideals))
    if kind == "fixed-plus-adic":
        fixed = draw(
            st.lists(st.integers(0, max_exp), min_size=dim, max_size=dim).filter(any)
        )
        return filtration.fixed_plus_adic(
            monomial.MonomialIdeal(dim, (tuple(fixed),)), draw(ideals)
        )
    if kind == "rounded-valuation":
        weights = draw(st.lists(st.integers(1, 2), min_size=dim, max_size=dim))
        return filtration.rounded_valuation(weights, draw(scalars))
    base = draw(filtrations(dim, kinds=FILTRATION_KINDS[:3], max_exp=max_exp))
    if kind == "truncated":
        return filtration.truncate(base, draw(st.integers(1, 3)))
    return filtration.rescale(base, 2)
