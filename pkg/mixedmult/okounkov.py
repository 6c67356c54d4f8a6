"""
Semigroups of monomial valuations and their Newton-Okounkov bodies.

The valuation gives each variable a weight 1 + sqrt(p) for a distinct prime
p. These weights are linearly independent over Q, so a value determines its
exponent vector and every graded piece is spanned by one monomial. Membership
of (a, i) in the semigroup of sigma therefore reduces to x^a lying in
prod_j I(j)_{i sigma_j} with |a| <= beta i, and no irrational number is ever
evaluated.

Bodies built from finitely many levels are inner approximations.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from mixedmult import monomial
from mixedmult.exceptions import NotPrimaryError
from mixedmult.multiplicity import (
    Check,
    length_sequence,
    limit_estimate,
    product_at,
)
from mixedmult.polytope import (
    clip,
    contains_point,
    degree_halfspace,
    hull,
    linf_vertex_gap,
    minkowski_sum,
    polytope_to_json,
    simplex,
    volume,
)
from mixedmult.utils import fraction_str

logger = logging.getLogger(__name__)

LEMMA1_MAX_B = 64


@dataclass(frozen=True)
class MonomialValuation:
    """
    Valuation with nu(x_i) = 1 + sqrt(p_i); only the prime tags are stored.
    """

    primes: tuple

    def __post_init__(self):
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("valuation weights need distinct primes")
        if not all(sympy.isprime(p) for p in self.primes):
            raise ValueError(f"weight tags must be primes: {self.primes}")

    @classmethod
    def standard(cls, dim):
        return cls(tuple(int(sympy.prime(k)) for k in range(1, dim + 1)))

    @property
    def dim(self):
        return len(self.primes)

    def weights(self):
        """Symbolic weights 1 + sqrt(p_i), for display only."""
        return tuple(1 + sympy.sqrt(p) for p in self.primes)

    def value(self, a):
        return sum(k * w for k, w in zip(a, self.weights()))


def beta_for(Fs, sigma):
    """
    Smallest c >= 1 with m^c inside prod_j I(j)_{sigma_j}

    For sigma = 0 the product is R and 1 is returned. Every standard monomial
    of the level-i product then has total degree below c i.
    """
    d = Fs[0].dim
    ideal = product_at(Fs, sigma)
    if ideal.is_unit:
        return 1
    if not monomial.is_primary(ideal):
        raise NotPrimaryError("not m-primary")
    bound = sum(b - 1 for b in monomial.pure_power_bounds(ideal)) + 1
    for c in range(1, bound + 1):
        if monomial.is_subideal(monomial.maximal_power(d, c), ideal):
            return c
    return bound


def common_beta(Fs, sigmas):
    """Twice the largest beta_for over the given sigmas."""
    return 2 * max(beta_for(Fs, s) for s in sigmas)


@lru_cache(maxsize=64)
def _simplex_points(dim, bound):
    grid = np.indices((bound + 1,) * dim).reshape(dim, -1).T
    return grid[grid.sum(axis=1) <= bound]


def _level_points(ideal, dim, bound):
    pts = _simplex_points(dim, bound)
    gens = np.array(ideal.gens, dtype=np.int64)
    inside = np.all(pts[:, None, :] >= gens[None, :, :], axis=2).any(axis=1)
    return pts[inside]


@dataclass
class GammaSemigroup:
    """
    Points (a, i), 1 <= i <= cutoff, of the semigroup of ``sigma``

    ``levels[i]`` is an integer array whose rows are the exponents a at
    level i; ``extremal[i]`` keeps only the rows that can be hull vertices
    (minimal generators and points of the top face |a| = beta i).
    """

    sigma: tuple
    beta: int
    cutoff: int
    dim: int
    levels: dict = field(default_factory=dict)
    extremal: dict = field(default_factory=dict)
    valuation: MonomialValuation = None

    def contains(self, a, i):
        if not 1 <= i <= self.cutoff:
            raise ValueError(f"level {i} outside 1..{self.cutoff}")
        pts = self.levels[i]
        return bool(np.any(np.all(pts == np.asarray(a), axis=1)))

    def size(self):
        return sum(len(p) for p in self.levels.values())


def gamma(Fs, sigma, beta, cutoff, workers=None):
    """
    Enumerate the semigroup of ``sigma`` up to level ``cutoff``

    Parameters
    ----------
    Fs : list of Filtration
    sigma : sequence of int
        nonnegative weight per filtration
    beta : int
        degree cap factor: only |a| <= beta i is kept at level i
    cutoff : int
        largest level N
    workers : int, optional
        enumerate levels in a thread pool

    Returns
    -------
    GammaSemigroup
    """
    if cutoff < 1:
        raise ValueError("cutoff must be positive")
    sigma = tuple(int(s) for s in sigma)
    d = Fs[0].dim

    def level(i):
        ideal = product_at(Fs, [i * s for s in sigma])
        pts = _level_points(ideal, d, beta * i)
        gens = {tuple(g) for g in ideal.gens}
        keep = [
            k
            for k, row in enumerate(pts.tolist())
            if sum(row) == beta * i or tuple(row) in gens
        ]
        return pts, pts[keep]

    indices = range(1, cutoff + 1)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(level, indices))
    else:
        results = [level(i) for i in indices]
    semigroup = GammaSemigroup(sigma, beta, cutoff, d)
    semigroup.valuation = MonomialValuation.standard(d)
    for i, (pts, ext) in zip(indices, results):
        semigroup.levels[i] = pts
        semigroup.extremal[i] = ext
    logger.debug(
        "gamma sigma=%s beta=%d N=%d: %d points", sigma, beta, cutoff, semigroup.size()
    )
    return semigroup


@dataclass(frozen=True)
class OkounkovBody:
    body: object
    sigma: tuple
    beta: int
    cutoff: int
    inner: bool = True

    @property
    def volume(self):
        return volume(self.body)

    def to_json(self):
        return {
            "sigma": list(self.sigma),
            "beta": self.beta,
            "cutoff": self.cutoff,
            "inner": self.inner,
            "volume": fraction_str(self.volume),
            "body": polytope_to_json(self.body),
        }


def body(G):
    """
    Hull of the points a / i over all stored levels

    The result is an inner approximation of the body of the full semigroup,
    nondecreasing in the cutoff.
    """
    points = []
    for i, ext in G.extremal.items():
        if len(ext):
            level = hull(
                (tuple(Fraction(int(c), i) for c in row) for row in ext.tolist()),
                G.dim,
            )
            points.extend(level.vertices)
    return OkounkovBody(hull(points, G.dim), G.sigma, G.beta, G.cutoff)


def body_of(Fs, sigma, beta, cutoff, workers=None):
    return body(gamma(Fs, sigma, beta, cutoff, workers))


def default_ladder(dim):
    """Ladder used for independent limit estimates in the body checks."""
    return (256, 512, 1024) if dim == 1 else (32, 64, 128)


@dataclass
class Theorem1Report:
    cutoff: int
    beta: int
    hat_volume: Fraction
    gamma_volume: Fraction
    limit: object
    discrepancy: Fraction

    @property
    def difference(self):
        return self.hat_volume - self.gamma_volume

    def to_json(self):
        return {
            "cutoff": self.cutoff,
            "beta": self.beta,
            "hat_volume": fraction_str(self.hat_volume),
            "gamma_volume": fraction_str(self.gamma_volume),
            "difference": fraction_str(self.difference),
            "limit": self.limit.to_json(),
            "discrepancy": fraction_str(self.discrepancy),
        }


def theorem1_check(F, cutoff, ladder=None, limit=None):
    """
    Compare lim l(R/I_n)/n^d with vol(hat body) - vol(body at the cutoff)

    Parameters
    ----------
    F : Filtration
    cutoff : int
        number of levels N used for the body
    ladder : sequence of int, optional
        m values for the independent limit estimate
    limit : LimitEstimate, optional
        precomputed limit estimate; overrides ``ladder``

    Returns
    -------
    Theorem1Report
    """
    d = F.dim
    beta = beta_for([F], (1,))
    if limit is None:
        seq = length_sequence([F], (1,), ladder or default_ladder(d))
        limit = limit_estimate(seq, degree=d)
    hat = simplex(d, beta)
    inner = body_of([F], (1,), beta, cutoff)
    hat_vol = volume(hat)
    gamma_vol = inner.volume
    discrepancy = abs(limit.value - (hat_vol - gamma_vol))
    return Theorem1Report(cutoff, beta, hat_vol, gamma_vol, limit, discrepancy)


@dataclass
class Theorem1Ladder:
    rows: list

    @property
    def non_increasing(self):
        values = [r.discrepancy for r in self.rows]
        return all(b <= a for a, b in zip(values, values[1:]))

    def to_json(self):
        return {
            "rows": [r.to_json() for r in self.rows],
            "non_increasing": self.non_increasing,
        }


def theorem1_ladder(F, cutoffs, ladder=None):
    """theorem1_check at several cutoffs against one shared limit estimate."""
    seq = length_sequence([F], (1,), ladder or default_ladder(F.dim))
    limit = limit_estimate(seq, degree=F.dim)
    return Theorem1Ladder([theorem1_check(F, N, limit=limit) for N in cutoffs])


@dataclass
class Prop1Report:
    cutoff: int
    tolerance: Fraction
    triggered: bool
    witness: tuple = None
    difference: Fraction = None
    epsilon: Fraction = None

    @property
    def passed(self):
        return not self.triggered or self.difference <= self.epsilon

    def to_json(self):
        out = {
            "cutoff": self.cutoff,
            "tolerance": fraction_str(self.tolerance),
            "tolerance_kind": "heuristic",
            "triggered": self.triggered,
            "passed": self.passed,
        }
        if self.triggered:
            out["witness"] = [fraction_str(c) for c in self.witness]
            out["difference"] = fraction_str(self.difference)
            out["epsilon"] = fraction_str(self.epsilon)
        return out


def prop1_check(F, cutoff, tol=None):
    """
    If the body comes within ``tol`` of the origin, its volume must approach
    that of the hat body

    The allowed gap eps(N) = d beta^d / N is a heuristic rate.

    Raises
    ------
    NotPrimaryError
        if I_1 is not a proper m-primary ideal
    """
    first = F.ideal_at(1)
    if first.is_unit or not monomial.is_primary(first):
        raise NotPrimaryError("not m-primary")
    tol = Fraction(1, cutoff) if tol is None else Fraction(tol)
    d = F.dim
    beta = beta_for([F], (1,))
    G = gamma([F], (1,), beta, cutoff)
    witness = None
    for i, pts in G.levels.items():
        if not len(pts):
            continue
        top = pts.max(axis=1)
        k = int(np.argmin(top))
        if Fraction(int(top[k]), i) <= tol:
            witness = tuple(Fraction(int(c), i) for c in pts[k].tolist())
            break
    if witness is None:
        return Prop1Report(cutoff, tol, False)
    diff = volume(simplex(d, beta)) - body(G).volume
    eps = Fraction(d * beta**d, cutoff)
    return Prop1Report(cutoff, tol, True, witness, diff, eps)


@dataclass
class Lemma1Report:
    b: int
    beta: int
    verified_bound: int

    @property
    def found(self):
        return self.b is not None

    def to_json(self):
        return {
            "b": self.b,
            "beta": self.beta,
            "verified_bound": self.verified_bound,
            "found": self.found,
        }


def lemma1_search(F, i_bound, beta=None, max_b=LEMMA1_MAX_B):
    """
    Smallest b <= max_b with I_{i b beta} inside m^i for every i <= i_bound

    A miss is reported with ``b = None``; it only bounds the search.
    """
    if beta is None:
        beta = beta_for([F], (1,))
    for b in range(1, max_b + 1):
        if all(
            monomial.order(F.ideal_at(i * b * beta)) >= i for i in range(1, i_bound + 1)
        ):
            return Lemma1Report(b, beta, i_bound)
    logger.info("no b <= %d found for i <= %d", max_b, i_bound)
    return Lemma1Report(None, beta, i_bound)


@dataclass
class MinkowskiReport:
    """Sum-containment and equal-body checks for a pair of sigmas."""

    sigma: tuple
    tau: tuple
    beta: int
    cutoff: int
    contained: list
    unresolved: list
    x2_triggered: bool
    hausdorff_bound: Fraction
    volume_gap: Fraction
    volume_tol: Fraction
    levelwise_failure: int = None

    @property
    def x1_status(self):
        return "pass" if not self.unresolved else "unresolved"

    @property
    def checks(self):
        checks = [
            Check(
                "sum-containment",
                self.levelwise_failure is None,
                f"{len(self.contained)} vertices contained, "
                f"{len(self.unresolved)} unresolved, "
                f"level products {self._levelwise_note}",
            )
        ]
        if self.x2_triggered:
            checks.append(
                Check(
                    "equal-volume",
                    self.volume_gap <= self.volume_tol,
                    f"gap {fraction_str(self.volume_gap)} vs tolerance "
                    f"{fraction_str(self.volume_tol)}",
                )
            )
        return checks

    @property
    def _levelwise_note(self):
        if self.levelwise_failure is None:
            return f"contained up to level {self.cutoff}"
        return f"not contained at level {self.levelwise_failure}"

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_json(self):
        def pts(vs):
            return [[fraction_str(c) for c in v] for v in sorted(vs)]

        gap = self.hausdorff_bound
        return {
            "sigma": list(self.sigma),
            "tau": list(self.tau),
            "beta": self.beta,
            "cutoff": self.cutoff,
            "x1_status": self.x1_status,
            "unresolved": pts(self.unresolved),
            "x2_triggered": self.x2_triggered,
            "levelwise_failure": self.levelwise_failure,
            "hausdorff_bound": None if gap is None else fraction_str(gap),
            "volume_gap": fraction_str(self.volume_gap),
            "volume_tol": fraction_str(self.volume_tol),
            "tolerance_kind": "heuristic",
            "checks": [c.to_json() for c in self.checks],
        }


def levelwise_failure(Fs, sigma, tau, cutoff):
    """
    First level i <= cutoff where I_{i sigma} I_{i tau} is not inside
    I_{i (sigma + tau)}, or None when every level up to the cutoff is

    Each inclusion puts the sum of the level-i points of the sigma and tau
    semigroups inside the sigma + tau semigroup.
    """
    both = tuple(s + t for s, t in zip(sigma, tau))
    for i in range(1, cutoff + 1):
        left = monomial.product(
            product_at(Fs, [i * s for s in sigma]), product_at(Fs, [i * t for t in tau])
        )
        if not monomial.is_subideal(left, product_at(Fs, [i * b for b in both])):
            logger.warning("level %d products are not contained in the sum level", i)
            return i
    return None


def minkowski_checks(Fs, sigma, tau, beta=None, cutoff=16, tol=None, volume_tol=None):
    """
    Check [body(sigma) + body(tau)] cut by HF inside body(sigma + tau), and
    equal volumes of body(sigma + tau) and body(tau) when body(sigma) is close
    to the hat body

    The sum is cut by HF = {|x| <= beta} and compared against the
    sigma + tau body at cutoff 2N. A vertex outside that inner body is
    unresolved rather than failed.

    Parameters
    ----------
    Fs : list of Filtration
    sigma, tau : sequence of int
    beta : int, optional
        defaults to twice the largest beta_for over sigma, tau and sigma + tau
    cutoff : int
        N
    tol : Fraction, optional
        closeness tolerance for body(sigma) and the hat body, default 1/N
    volume_tol : Fraction, optional
        volume agreement tolerance, default 2/N

    Returns
    -------
    MinkowskiReport
    """
    sigma = tuple(sigma)
    tau = tuple(tau)
    both = tuple(s + t for s, t in zip(sigma, tau))
    d = Fs[0].dim
    if beta is None:
        beta = common_beta(Fs, [sigma, tau, both])
    tol = Fraction(1, cutoff) if tol is None else Fraction(tol)
    volume_tol = Fraction(2, cutoff) if volume_tol is None else Fraction(volume_tol)

    body_s = body_of(Fs, sigma, beta, cutoff).body
    body_t = body_of(Fs, tau, beta, cutoff).body
    target = body_of(Fs, both, beta, 2 * cutoff).body
    failure = levelwise_failure(Fs, sigma, tau, cutoff)
    summed = clip(minkowski_sum(body_s, body_t), degree_halfspace(d, beta))
    contained, unresolved = [], []
    for v in summed.sorted_vertices():
        (contained if contains_point(target, v) else unresolved).append(v)
    if unresolved:
        logger.warning(
            "%d sum vertices not yet inside the sigma+tau body at cutoff %d",
            len(unresolved),
            2 * cutoff,
        )

    gap = linf_vertex_gap(body_s, simplex(d, beta))
    triggered = gap is not None and gap <= tol
    both_body = body_of(Fs, both, beta, cutoff).body
    volume_gap = abs(volume(both_body) - volume(body_t))
    return MinkowskiReport(
        sigma,
        tau,
        beta,
        cutoff,
        contained,
        unresolved,
        triggered,
        gap,
        volume_gap,
        volume_tol,
        failure,
    )
