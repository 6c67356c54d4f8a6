"""
Monomial ideals of k[[x_1, ..., x_d]] stored by their minimal generators.

Every length in this package is a count of standard monomials, so the base
field never enters a computation.
"""
import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from mixedmult.exceptions import (
    DimensionMismatchError,
    NotPrimaryError,
    ZeroIdealError,
)
from mixedmult.polytope import NewtonPolyhedron, point, volume

logger = logging.getLogger(__name__)


def exponent(coords, dim=None):
    """
    Validate an exponent vector

    Parameters
    ----------
    coords : sequence of int
        exponent of each variable
    dim : int, optional
        expected ambient dimension

    Returns
    -------
    tuple of int
    """
    exp = tuple(int(c) for c in coords)
    if dim is not None and len(exp) != dim:
        raise DimensionMismatchError(dim, len(exp))
    if any(c < 0 for c in exp):
        raise ValueError(f"negative exponent in {exp}")
    return exp


def _minimal_2d(gens):
    out = []
    best = None
    for g in sorted(gens):
        if best is None or g[1] < best:
            out.append(g)
            best = g[1]
    return out


def _minimal_3d(gens):
    # staircase of the (x, y) shadows of kept generators: x up, y strictly down
    xs, ys = [], []
    out = []
    for g in sorted(gens, key=lambda g: (g[2], g[0], g[1])):
        x, y = g[0], g[1]
        i = bisect_right(xs, x)
        if i and ys[i - 1] <= y:
            continue
        out.append(g)
        if i and xs[i - 1] == x:
            i -= 1
        j = i
        while j < len(xs) and ys[j] >= y:
            j += 1
        xs[i:j] = [x]
        ys[i:j] = [y]
    return out


def _minimal_general(gens, dim):
    ordered = sorted(gens, key=lambda g: (sum(g), g))
    kept = np.empty((len(ordered), dim), dtype=np.int64)
    count = 0
    out = []
    for g in ordered:
        if count and np.any(np.all(kept[:count] <= np.asarray(g), axis=1)):
            continue
        kept[count] = g
        count += 1
        out.append(g)
    return out


def _minimal(gens, dim):
    gens = set(gens)
    zero = (0,) * dim
    if zero in gens:
        return [zero]
    if dim == 1:
        return [min(gens)]
    if dim == 2:
        return _minimal_2d(gens)
    if dim == 3:
        return _minimal_3d(gens)
    return _minimal_general(gens, dim)


@dataclass(frozen=True)
class MonomialIdeal:
    """
    A nonzero monomial ideal in d variables

    The generator tuple is always the sorted antichain of minimal exponents;
    the unit ideal is the single generator (0, ..., 0).
    """

    dim: int
    gens: tuple

    def __post_init__(self):
        if not self.gens:
            raise ZeroIdealError()
        gens = [exponent(g, self.dim) for g in self.gens]
        object.__setattr__(self, "gens", tuple(sorted(_minimal(gens, self.dim))))

    @classmethod
    def unit(cls, dim):
        return cls(dim, ((0,) * dim,))

    @classmethod
    def maximal(cls, dim):
        return cls(dim, variables(dim))

    def __contains__(self, a):
        return contains(self, a)

    @property
    def is_unit(self):
        return self.gens == ((0,) * self.dim,)

    def to_json(self):
        return {"dim": self.dim, "gens": [list(g) for g in self.gens]}

    @classmethod
    def from_json(cls, data):
        return cls(int(data["dim"]), tuple(tuple(g) for g in data["gens"]))

    def __str__(self):
        names = "xyzw" if self.dim <= 4 else None

        def mono(g):
            if not any(g):
                return "1"
            parts = []
            for i, e in enumerate(g):
                if e:
                    var = names[i] if names else f"x{i + 1}"
                    parts.append(var if e == 1 else f"{var}^{e}")
            return "*".join(parts)

        return "(" + ", ".join(mono(g) for g in self.gens) + ")"


def variables(dim):
    return tuple(tuple(1 if j == i else 0 for j in range(dim)) for i in range(dim))


def minimalize(gens, dim):
    """
    The ideal generated by a set of exponents

    Parameters
    ----------
    gens : iterable of sequence of int
        generating exponents, possibly redundant
    dim : int
        ambient dimension d

    Returns
    -------
    MonomialIdeal
        ideal with the antichain of minimal generators

    Raises
    ------
    ZeroIdealError
        if ``gens`` is empty
    """
    gens = tuple(gens)
    if not gens:
        raise ZeroIdealError()
    return MonomialIdeal(dim, gens)


def _same_dim(I, J):
    if I.dim != J.dim:
        raise DimensionMismatchError(I.dim, J.dim)


def contains(I, a):
    a = exponent(a)
    if len(a) != I.dim:
        raise DimensionMismatchError(I.dim, len(a))
    return any(all(gi <= ai for gi, ai in zip(g, a)) for g in I.gens)


def is_subideal(I, J):
    """True when I is contained in J."""
    _same_dim(I, J)
    return all(contains(J, g) for g in I.gens)


def ideal_sum(I, J):
    _same_dim(I, J)
    return MonomialIdeal(I.dim, I.gens + J.gens)


def _maximal_degree(I):
    """k when I is m^k, else None."""
    k = sum(I.gens[0])
    if len(I.gens) != math.comb(k + I.dim - 1, I.dim - 1):
        return None
    if any(sum(g) != k for g in I.gens):
        return None
    return k


def product(I, J):
    _same_dim(I, J)
    if I.is_unit:
        return J
    if J.is_unit:
        return I
    a, b = _maximal_degree(I), _maximal_degree(J)
    if a is not None and b is not None:
        return maximal_power(I.dim, a + b)
    return MonomialIdeal(
        I.dim,
        tuple(tuple(x + y for x, y in zip(g, h)) for g in I.gens for h in J.gens),
    )


def power(I, k):
    """
    I^k by repeated multiplication, minimalizing after each step

    ``k = 0`` gives the unit ideal.
    """
    if k < 0:
        raise ValueError("power must be nonnegative")
    result = MonomialIdeal.unit(I.dim)
    for _ in range(k):
        result = product(result, I)
    return result


def maximal_power(dim, k):
    """m^k, generated by all exponents of total degree k."""
    if k == 0:
        return MonomialIdeal.unit(dim)
    return MonomialIdeal(dim, tuple(_compositions(k, dim)))


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def pure_power_bounds(I):
    """
    Smallest pure-power exponent of each variable, or None where absent.
    """
    bounds = []
    for i in range(I.dim):
        pure = [
            g[i] for g in I.gens if all(c == 0 for j, c in enumerate(g) if j != i)
        ]
        bounds.append(min(pure) if pure else None)
    return bounds


def is_primary(I):
    return all(b is not None for b in pure_power_bounds(I))


def _require_primary(I):
    if not is_primary(I):
        raise NotPrimaryError()


@lru_cache(maxsize=65536)
def _slice_colength(gens, dim):
    if gens == ((0,) * dim,):
        return 0
    if dim == 1:
        return gens[0][0]
    levels = sorted({g[-1] for g in gens})
    total = 0
    active = []
    for idx, t in enumerate(levels):
        active.extend(g[:-1] for g in gens if g[-1] == t)
        section = tuple(sorted(_minimal(active, dim - 1)))
        active = list(section)
        if section == ((0,) * (dim - 1),):
            break
        width = levels[idx + 1] - t
        total += width * _slice_colength(section, dim - 1)
    return total


def colength(I):
    """
    Length of R/I: the number of monomials outside I

    Sums the colengths of the (d-1)-dimensional sections at each height of
    the last coordinate; sections only change at generator heights.

    Raises
    ------
    NotPrimaryError
        if I is not m-primary ("infinite colength")
    """
    _require_primary(I)
    return _slice_colength(I.gens, I.dim)


def newton_polyhedron(I):
    return NewtonPolyhedron.from_points(I.gens, I.dim)


def covolume(I):
    """
    Exact volume of the region between the coordinate hyperplanes and NP(I)

    Returns
    -------
    Fraction
        lim colength(I^n) / n^d; the multiplicity e(I) is d! times this
    """
    _require_primary(I)
    if I.is_unit:
        return Fraction(0)
    box = pure_power_bounds(I)
    if I.dim == 1:
        return Fraction(box[0])
    inner = NewtonPolyhedron(I.dim, frozenset(point(g) for g in I.gens)).truncated(box)
    logger.debug("covolume of %s from %d hull vertices", I, len(inner.vertices))
    return Fraction(math.prod(box)) - volume(inner)


def order(I):
    """Largest c with I inside m^c: the least total degree of a generator."""
    return min(sum(g) for g in I.gens)


def mixed_covolume(ideals):
    """
    Mixed covolume of d m-primary monomial ideals

    MCV(I_1, ..., I_d) = 1/d! sum over nonempty S of (-1)^(d-|S|) covol(prod_S I),
    so that e(I_1, ..., I_d) = d! MCV and MCV(I, ..., I) = covolume(I).
    """
    d = len(ideals)
    for I in ideals:
        _same_dim(I, ideals[0])
    if ideals[0].dim != d:
        raise DimensionMismatchError(ideals[0].dim, d)
    total = Fraction(0)
    for size in range(1, d + 1):
        for subset in combinations(ideals, size):
            prod = subset[0]
            for I in subset[1:]:
                prod = product(prod, I)
            total += (-1) ** (d - size) * covolume(prod)
    return total / math.factorial(d)
