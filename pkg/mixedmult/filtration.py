"""
Filtrations n -> I_n of monomial ideals.

A ``FiltrationSpec`` is the immutable, serializable description; ``build``
turns it into a ``Filtration`` that produces I_n on demand and memoizes it.

Memo tables are guarded by a per-filtration reentrant lock: one writer fills
an entry while readers only ever observe complete entries, so a Filtration
may be shared between threads.
"""
import itertools
import logging
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from mixedmult import monomial
from mixedmult.exceptions import ConfigError, MixedMultError, PeriodSearchError
from mixedmult.monomial import MonomialIdeal
from mixedmult.utils import (
    as_fraction,
    ceil_div,
    ceil_sqrt_scaled,
    fraction_str,
    is_rational_square,
    lcm_range,
    to_mpf,
)

logger = logging.getLogger(__name__)

KINDS = (
    "adic",
    "fixed-plus-adic",
    "rounded-valuation",
    "truncated",
    "rescaled",
    "product",
)


@dataclass(frozen=True)
class SurdScalar:
    """
    A positive threshold p/q or sqrt(p/q)

    ``sqrt`` scalars whose radicand is the square of a rational are
    normalized to the rational kind on construction.
    """

    kind: str
    p: int
    q: int

    def __post_init__(self):
        if self.kind not in ("rational", "sqrt"):
            raise ValueError(f"unknown scalar kind {self.kind!r}")
        if self.p <= 0 or self.q <= 0:
            raise ValueError("scalar numerator and denominator must be positive")
        g = math.gcd(self.p, self.q)
        p, q = self.p // g, self.q // g
        kind = self.kind
        if kind == "sqrt" and is_rational_square(p, q):
            kind, p, q = "rational", math.isqrt(p), math.isqrt(q)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def rational(cls, p, q=1):
        return cls("rational", p, q)

    @classmethod
    def sqrt(cls, p, q=1):
        return cls("sqrt", p, q)

    @property
    def is_rational(self):
        return self.kind == "rational"

    def reached(self, value, n):
        """Exact test of value >= n * self."""
        value = as_fraction(value)
        if self.is_rational:
            return value * self.q >= n * self.p
        if value < 0:
            return False
        return value.numerator**2 * self.q >= n * n * self.p * value.denominator**2

    def ceil_times(self, c):
        """ceil(c * self) for a nonnegative rational c."""
        c = as_fraction(c)
        if self.is_rational:
            return ceil_div(c.numerator * self.p, c.denominator * self.q)
        return ceil_sqrt_scaled(c.numerator, self.p, self.q * c.denominator**2)

    def min_completion(self, n, partial, weight):
        """Smallest k >= 0 with partial + weight * k >= n * self."""
        if self.reached(partial, n):
            return 0
        lo, hi = 0, self.ceil_times(Fraction(n) / weight)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.reached(partial + weight * mid, n):
                hi = mid
            else:
                lo = mid + 1
        return lo

    def approx(self):
        value = to_mpf(Fraction(self.p, self.q))
        if self.is_rational:
            return value
        return mpmath.sqrt(value)

    def to_json(self):
        key = "rat" if self.is_rational else "sqrt"
        return {key: [self.p, self.q]}

    @classmethod
    def from_json(cls, data):
        if "rat" in data:
            return cls.rational(*[int(v) for v in data["rat"]])
        if "sqrt" in data:
            return cls.sqrt(*[int(v) for v in data["sqrt"]])
        raise ConfigError(
            f"scalar must be {{'rat': [p, q]}} or {{'sqrt': [p, q]}}: {data}"
        )

    def __str__(self):
        frac = f"{self.p}/{self.q}" if self.q != 1 else str(self.p)
        return frac if self.is_rational else f"sqrt({frac})"


@dataclass(frozen=True)
class FiltrationSpec:
    """
    Serializable description of a filtration

    Only the fields relevant to ``kind`` are set; use the classmethod
    constructors, which validate the kind's invariants.
    """

    kind: str
    dim: int
    ideal: MonomialIdeal = None
    fixed: MonomialIdeal = None
    weights: tuple = None
    scale: SurdScalar = None
    base: "FiltrationSpec" = None
    level: int = None
    bases: tuple = ()
    sigma: tuple = ()

    @classmethod
    def adic(cls, ideal):
        if not monomial.is_primary(ideal) or ideal.is_unit:
            raise ConfigError(f"adic filtration: {ideal} is not m-primary")
        return cls("adic", ideal.dim, ideal=ideal)

    @classmethod
    def fixed_plus_adic(cls, fixed, ideal):
        if fixed.dim != ideal.dim:
            raise ConfigError("fixed and adic ideals must share the dimension")
        if fixed.is_unit:
            raise ConfigError("fixed ideal must be proper")
        if not monomial.is_primary(ideal) or ideal.is_unit:
            raise ConfigError(f"fixed-plus-adic filtration: {ideal} is not m-primary")
        return cls("fixed-plus-adic", ideal.dim, ideal=ideal, fixed=fixed)

    @classmethod
    def rounded_valuation(cls, weights, scale):
        weights = tuple(as_fraction(w) for w in weights)
        if not weights or any(w <= 0 for w in weights):
            raise ConfigError("rounded-valuation weights must be positive")
        return cls("rounded-valuation", len(weights), weights=weights, scale=scale)

    @classmethod
    def truncated(cls, base, level):
        if level < 1:
            raise ConfigError("truncation level must be >= 1")
        return cls("truncated", base.dim, base=base, level=level)

    @classmethod
    def rescaled(cls, base, factor):
        if factor < 1:
            raise ConfigError("rescaling factor must be >= 1")
        return cls("rescaled", base.dim, base=base, level=factor)

    @classmethod
    def product(cls, bases, sigma):
        bases = tuple(bases)
        sigma = tuple(int(s) for s in sigma)
        if not bases or len(bases) != len(sigma):
            raise ConfigError("product needs one sigma entry per filtration")
        if any(s < 0 for s in sigma):
            raise ConfigError("sigma entries must be nonnegative")
        if len({b.dim for b in bases}) != 1:
            raise ConfigError("product filtrations must share the dimension")
        return cls("product", bases[0].dim, bases=bases, sigma=sigma)

    def to_json(self):
        out = {"kind": self.kind}
        if self.kind == "adic":
            out["ideal"] = self.ideal.to_json()
        elif self.kind == "fixed-plus-adic":
            out["fixed"] = self.fixed.to_json()
            out["ideal"] = self.ideal.to_json()
        elif self.kind == "rounded-valuation":
            out["weights"] = [fraction_str(w) for w in self.weights]
            out["scale"] = self.scale.to_json()
        elif self.kind == "truncated":
            out["base"] = self.base.to_json()
            out["level"] = self.level
        elif self.kind == "rescaled":
            out["base"] = self.base.to_json()
            out["factor"] = self.level
        else:
            out["bases"] = [b.to_json() for b in self.bases]
            out["sigma"] = list(self.sigma)
        return out


def spec_from_json(data):
    """
    Parse a filtration spec from its JSON form

    Raises
    ------
    ConfigError
        on any schema or invariant violation
    """
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError(f"filtration spec needs a 'kind': {data!r}")
    kind = data["kind"]
    try:
        if kind == "adic":
            return FiltrationSpec.adic(MonomialIdeal.from_json(data["ideal"]))
        if kind == "fixed-plus-adic":
            return FiltrationSpec.fixed_plus_adic(
                MonomialIdeal.from_json(data["fixed"]),
                MonomialIdeal.from_json(data["ideal"]),
            )
        if kind == "rounded-valuation":
            return FiltrationSpec.rounded_valuation(
                data["weights"], SurdScalar.from_json(data["scale"])
            )
        if kind == "truncated":
            return FiltrationSpec.truncated(
                spec_from_json(data["base"]), int(data["level"])
            )
        if kind == "rescaled":
            return FiltrationSpec.rescaled(
                spec_from_json(data["base"]), int(data["factor"])
            )
        if kind == "product":
            return FiltrationSpec.product(
                [spec_from_json(b) for b in data["bases"]], data["sigma"]
            )
    except KeyError as err:
        raise ConfigError(f"{kind} filtration is missing field {err}") from err
    except (MixedMultError, ValueError, TypeError) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"invalid {kind} filtration: {err}") from err
    raise ConfigError(f"unknown filtration kind {kind!r}; expected one of {KINDS}")


class Filtration:
    """
    A memoized filtration of m-primary monomial ideals

    I_0 is always the unit ideal. Subclasses implement ``_compute``; kinds
    whose levels depend on all lower levels fill the table in increasing
    order.
    """

    sequential = False

    def __init__(self, spec):
        self.spec = spec
        self.dim = spec.dim
        self._cache = {0: MonomialIdeal.unit(spec.dim)}
        self._lock = threading.RLock()

    def ideal_at(self, n):
        if n < 0:
            raise ValueError("filtration index must be nonnegative")
        ideal = self._cache.get(n)
        if ideal is not None:
            return ideal
        with self._lock:
            ideal = self._cache.get(n)
            if ideal is not None:
                return ideal
            if self.sequential:
                start = max(k for k in self._cache if k < n) + 1
                for k in range(start, n + 1):
                    self._cache[k] = self._compute(k)
            else:
                self._cache[n] = self._compute(n)
            logger.debug("%s: filled level %d", self.spec.kind, n)
            return self._cache[n]

    def _compute(self, n):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.spec.to_json()})"


class AdicFiltration(Filtration):
    def __init__(self, spec):
        super().__init__(spec)
        self._maximal = spec.ideal == MonomialIdeal.maximal(spec.dim)
        self.sequential = not self._maximal

    def _compute(self, n):
        if self._maximal:
            return monomial.maximal_power(self.dim, n)
        return monomial.product(self._cache[n - 1], self.spec.ideal)


class FixedPlusAdicFiltration(Filtration):
    def __init__(self, spec):
        super().__init__(spec)
        self._adic = AdicFiltration(FiltrationSpec.adic(spec.ideal))

    def _compute(self, n):
        return monomial.ideal_sum(self.spec.fixed, self._adic.ideal_at(n))


class RoundedValuationFiltration(Filtration):
    """I_n generated by the monomials with sum w_i a_i >= n * scale."""

    def _compute(self, n):
        weights, scale = self.spec.weights, self.spec.scale
        bounds = [scale.ceil_times(Fraction(n) / w) for w in weights[:-1]]
        gens = []
        for head in itertools.product(*(range(b + 1) for b in bounds)):
            partial = sum((w * a for w, a in zip(weights, head)), Fraction(0))
            gens.append(head + (scale.min_completion(n, partial, weights[-1]),))
        return MonomialIdeal(self.dim, tuple(gens))


class TruncatedFiltration(Filtration):
    """
    The a-th truncation: I_{a,n} = I_n for n <= a, and for n > a
    I_{a,n} = sum over 1 <= i <= a of I_i * I_{a,n-i}.
    """

    sequential = True

    def __init__(self, base, level):
        super().__init__(FiltrationSpec.truncated(base.spec, level))
        self.base = base
        self.level = level
        self.certificate = None

    def _compute(self, n):
        if n <= self.level:
            return self.base.ideal_at(n)
        gens = []
        for i in range(1, self.level + 1):
            gens.extend(
                monomial.product(self.base.ideal_at(i), self._cache[n - i]).gens
            )
        return MonomialIdeal(self.dim, tuple(gens))


class RescaledFiltration(Filtration):
    def __init__(self, base, factor):
        super().__init__(FiltrationSpec.rescaled(base.spec, factor))
        self.base = base
        self.factor = factor

    def _compute(self, n):
        return self.base.ideal_at(self.factor * n)


class ProductFiltration(Filtration):
    """n -> product over j of I(j)_{n sigma_j}."""

    def __init__(self, bases, sigma):
        super().__init__(FiltrationSpec.product([b.spec for b in bases], sigma))
        self.bases = tuple(bases)
        self.sigma = tuple(sigma)

    def _compute(self, n):
        ideal = MonomialIdeal.unit(self.dim)
        for base, s in zip(self.bases, self.sigma):
            ideal = monomial.product(ideal, base.ideal_at(n * s))
        return ideal


def build(spec):
    """Instantiate the filtration described by ``spec``."""
    if spec.kind == "adic":
        return AdicFiltration(spec)
    if spec.kind == "fixed-plus-adic":
        return FixedPlusAdicFiltration(spec)
    if spec.kind == "rounded-valuation":
        return RoundedValuationFiltration(spec)
    if spec.kind == "truncated":
        return TruncatedFiltration(build(spec.base), spec.level)
    if spec.kind == "rescaled":
        return RescaledFiltration(build(spec.base), spec.level)
    if spec.kind == "product":
        return ProductFiltration([build(b) for b in spec.bases], spec.sigma)
    raise ConfigError(f"unknown filtration kind {spec.kind!r}")


def adic(ideal):
    return build(FiltrationSpec.adic(ideal))


def fixed_plus_adic(fixed, ideal):
    return build(FiltrationSpec.fixed_plus_adic(fixed, ideal))


def rounded_valuation(weights, scale):
    return build(FiltrationSpec.rounded_valuation(weights, scale))


def ideal_at(F, n):
    return F.ideal_at(n)


def truncate(F, a):
    """The a-th truncated filtration of F, sharing F's memo table."""
    return TruncatedFiltration(F, a)


def rescale(F, s):
    """The filtration n -> I_{s n}."""
    return RescaledFiltration(F, s)


def product_filtration(Fs, sigma):
    return ProductFiltration(Fs, sigma)


@dataclass(frozen=True)
class PeriodCertificate:
    """
    A period s with I_{a, s i} = (I_{a, s})^i verified for 1 <= i <= check_bound.
    """

    period: int
    level: int
    check_bound: int


def noetherian_period(F, check_bound=None, max_period=None):
    """
    Search-and-verify a Veronese period of a truncated filtration

    Candidates are the divisors of lcm(1, ..., a) in increasing order; the
    first one whose Veronese equality holds for every i up to
    ``check_bound`` is returned and stored on the filtration.

    Parameters
    ----------
    F : TruncatedFiltration
        a truncation at level a
    check_bound : int, optional
        largest i for which the equality is checked; defaults to max(6, a),
        which rejects every candidate s whose level ratio is not minimal
        for one-variable truncations
    max_period : int, optional
        stop the search after this candidate

    Returns
    -------
    PeriodCertificate

    Raises
    ------
    PeriodSearchError
        if no candidate verifies; carries the best candidate and the first i
        at which it failed
    """
    if not isinstance(F, TruncatedFiltration):
        raise TypeError("noetherian_period needs a truncated filtration")
    if check_bound is None:
        check_bound = max(6, F.level)
    if check_bound < 1:
        raise ValueError("check_bound must be positive")
    cert = F.certificate
    if cert is not None and cert.check_bound >= check_bound:
        return cert
    lcm = lcm_range(F.level)
    bound = lcm if max_period is None else min(lcm, max_period)
    best, best_fail = None, 0
    for s in range(1, bound + 1):
        if lcm % s:
            continue
        generator = F.ideal_at(s)
        power = generator
        failed = None
        for i in range(2, check_bound + 1):
            power = monomial.product(power, generator)
            if F.ideal_at(s * i) != power:
                failed = i
                break
        if failed is None:
            cert = PeriodCertificate(s, F.level, check_bound)
            F.certificate = cert
            logger.debug(
                "truncation at %d: period %d verified to %d", F.level, s, check_bound
            )
            return cert
        if failed > best_fail:
            best, best_fail = s, failed
    raise PeriodSearchError(best, best_fail, check_bound)


@dataclass(frozen=True)
class SubmultiplicativityReport:
    bound: int
    violation: tuple = None

    @property
    def ok(self):
        return self.violation is None


def check_submultiplicative(F, bound):
    """
    Check I_i I_j inside I_{i+j} for all i + j <= bound

    Violations are reported, never raised. The first violating pair (i, j)
    is recorded.
    """
    for total in range(2, bound + 1):
        target = F.ideal_at(total)
        for i in range(1, total // 2 + 1):
            prod = monomial.product(F.ideal_at(i), F.ideal_at(total - i))
            if not monomial.is_subideal(prod, target):
                return SubmultiplicativityReport(bound, (i, total - i))
    return SubmultiplicativityReport(bound)
