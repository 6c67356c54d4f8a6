import math
from fractions import Fraction
from functools import reduce

import mpmath
import sympy

mpmath.mp.dps = 50


def as_fraction(value):
    """
    Coerce an int, Fraction, sympy Rational or "p/q" string to a Fraction

    Parameters
    ----------
    value : int, str, Fraction or sympy.Rational
        value to convert

    Returns
    -------
    Fraction
        exact rational value

    Raises
    ------
    ValueError
        if the value is a float or cannot be parsed
    """
    if isinstance(value, bool):
        raise ValueError(f"cannot read {value!r} as a rational")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot read {value!r} as an exact rational")


def fraction_str(value):
    """Render an exact rational as "p/q", or "p" when integral."""
    value = as_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def to_mpf(value):
    value = as_fraction(value)
    return mpmath.mpf(value.numerator) / value.denominator


def ceil_div(a, b):
    return -((-a) // b)


def lcm_all(values):
    return reduce(math.lcm, values, 1)


def lcm_range(a):
    """lcm(1, ..., a)"""
    return lcm_all(range(1, a + 1))


def ceil_sqrt_scaled(n, p, q):
    """
    Smallest integer k >= 0 with k^2 q >= n^2 p, i.e. ceil(n sqrt(p/q))

    Parameters
    ----------
    n : int
        nonnegative multiplier
    p, q : int
        positive numerator and denominator of the radicand

    Returns
    -------
    int
        the exact ceiling, computed with integer arithmetic only
    """
    target = n * n * p
    k = math.isqrt(ceil_div(target, q))
    while k * k * q < target:
        k += 1
    while k > 0 and (k - 1) * (k - 1) * q >= target:
        k -= 1
    return k


def is_rational_square(p, q):
    g = math.gcd(p, q)
    p, q = p // g, q // g
    return math.isqrt(p) ** 2 == p and math.isqrt(q) ** 2 == q


def type_vectors(total, parts):
    """
    All vectors of `parts` nonnegative integers summing to `total`

    Ordered lexicographically from (total, 0, ..., 0) down to (0, ..., total).
    """
    if parts == 1:
        return [(total,)]
    vectors = []
    for head in range(total, -1, -1):
        for tail in type_vectors(total - head, parts - 1):
            vectors.append((head,) + tail)
    return vectors


def type_key(vector):
    return ",".join(str(v) for v in vector)


def monomial_value(n, alpha):
    return math.prod(ni**ai for ni, ai in zip(n, alpha))


def _rational(x):
    x = as_fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def _to_sympy(rows):
    return sympy.Matrix([[_rational(x) for x in row] for row in rows])


def matrix_rank(rows):
    if not rows:
        return 0
    return _to_sympy(rows).rank()


def solve_exact(rows, rhs):
    """
    Solve the square system rows . x = rhs over the rationals

    Parameters
    ----------
    rows : list of list
        coefficient matrix entries (exact)
    rhs : list
        right hand side (exact)

    Returns
    -------
    list of Fraction
        the unique solution

    Raises
    ------
    ValueError
        if the matrix is singular
    """
    A = _to_sympy(rows)
    b = _to_sympy([[v] for v in rhs])
    if A.det() == 0:
        raise ValueError("singular system")
    x = A.LUsolve(b)
    return [as_fraction(v) for v in x]


def least_squares_poly(xs, ys, degree):
    """
    Exact least-squares fit of y = c0 + c1 x + ... + c_k x^k

    With ``degree + 1`` points this is the interpolating polynomial.

    Returns
    -------
    list of Fraction
        coefficients c0, ..., c_k
    """
    if degree < 0 or degree >= len(xs):
        raise ValueError(f"cannot fit degree {degree} to {len(xs)} points")
    A = _to_sympy([[x**i for i in range(degree + 1)] for x in xs])
    b = _to_sympy([[y] for y in ys])
    c = (A.T * A).LUsolve(A.T * b)
    return [as_fraction(v) for v in c]
