"""
Asymptotic lengths of products of filtrations and their mixed multiplicities.

G(n_1, ..., n_r) = lim_m l(R / I(1)_{m n_1} ... I(r)_{m n_r}) / m^d is a
homogeneous polynomial of degree d; its coefficients, scaled by d_1! ... d_r!,
are the mixed multiplicities. G is evaluated either from a ladder of exact
length ratios (``direct``) or exactly from verified Noetherian truncations
(``truncation-exact``).
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath

from mixedmult import monomial
from mixedmult.exceptions import (
    DimensionMismatchError,
    InsufficientTermsError,
    SingularSampleError,
    UnverifiedPeriodError,
)
from mixedmult.filtration import TruncatedFiltration, noetherian_period, truncate
from mixedmult.monomial import MonomialIdeal
from mixedmult.utils import (
    fraction_str,
    lcm_all,
    least_squares_poly,
    matrix_rank,
    monomial_value,
    solve_exact,
    to_mpf,
    type_key,
    type_vectors,
)

logger = logging.getLogger(__name__)

DIRECT = "direct"
TRUNCATION_EXACT = "truncation-exact"
BACKENDS = (DIRECT, TRUNCATION_EXACT)

DEFAULT_LADDER = (8, 16, 32)
DEFAULT_LEVEL = 8
ZERO_THRESHOLD = Fraction(1, 1000)


@dataclass(frozen=True)
class LimitEstimate:
    """
    Estimate of a limit of length ratios

    ``value`` is always an exact rational. With the truncation-exact method
    it is the limit itself; with the direct method it is the Richardson
    refinement of the last three ladder terms and ``last_term`` is the raw
    evidence.
    """

    value: Fraction
    method: str
    last_term: Fraction = None
    tail: tuple = ()
    error_note: str = ""

    @property
    def exact(self):
        return self.method == TRUNCATION_EXACT

    def approx(self):
        return to_mpf(self.value)

    def scaled(self, factor):
        factor = Fraction(factor)
        last = None if self.last_term is None else self.last_term * factor
        return LimitEstimate(
            self.value * factor, self.method, last, self.tail, self.error_note
        )

    def to_json(self):
        if self.exact:
            return {"exact": fraction_str(self.value)}
        out = {"approx": float(self.approx()), "method": self.method}
        if self.last_term is not None:
            out["last_term"] = fraction_str(self.last_term)
        if self.error_note:
            out["note"] = self.error_note
        return out

    def __str__(self):
        if self.exact:
            return fraction_str(self.value)
        return mpmath.nstr(self.approx(), 10)


def _common_dim(Fs):
    dims = {F.dim for F in Fs}
    if len(dims) != 1:
        first = Fs[0].dim
        raise DimensionMismatchError(first, next(d for d in dims if d != first))
    return dims.pop()


def product_at(Fs, n):
    """The ideal I(1)_{n_1} ... I(r)_{n_r}."""
    if len(n) != len(Fs):
        raise ValueError("need one index per filtration")
    ideal = MonomialIdeal.unit(Fs[0].dim)
    for F, k in zip(Fs, n):
        ideal = monomial.product(ideal, F.ideal_at(k))
    return ideal


def length_sequence(Fs, n, ladder):
    """
    Exact terms l(R / prod_j I(j)_{m n_j}) / m^d along a ladder of m values

    Parameters
    ----------
    Fs : list of Filtration
        filtrations of a common dimension d
    n : sequence of int
        nonnegative weight per filtration
    ladder : sequence of int
        strictly increasing positive m values

    Returns
    -------
    list of (int, Fraction)
    """
    d = _common_dim(Fs)
    ladder = list(ladder)
    if any(m <= 0 for m in ladder) or any(a >= b for a, b in zip(ladder, ladder[1:])):
        raise ValueError(f"ladder must be strictly increasing and positive: {ladder}")
    terms = []
    for m in ladder:
        ideal = product_at(Fs, [m * k for k in n])
        terms.append((m, Fraction(monomial.colength(ideal), m**d)))
    return terms


def limit_estimate(seq, degree=1):
    """
    Estimate the limit of a length-ratio sequence

    The refined value fits a polynomial in 1/m to the tail by exact least
    squares. The tail has the last ``max(3, degree + 1)`` terms available and
    the fit degree is ``degree`` capped at one less than the tail length. The
    terms of a d-dimensional product of powers are polynomials of degree d in
    1/m once the Hilbert function is polynomial, so ``degree=d`` makes the
    estimate exact there. Lengths are nonnegative, so a negative intercept is
    clamped to 0.

    Raises
    ------
    InsufficientTermsError
        with fewer than three terms
    """
    if len(seq) < 3:
        raise InsufficientTermsError(
            f"need at least 3 terms for an estimate, got {len(seq)}"
        )
    tail = tuple(seq[-max(3, degree + 1) :])
    k = max(1, min(degree, len(tail) - 1))
    xs = [Fraction(1, m) for m, _ in tail]
    c0 = least_squares_poly(xs, [t for _, t in tail], k)[0]
    if c0 < 0:
        logger.warning("extrapolated limit %s is negative; clamping to 0", c0)
        c0 = Fraction(0)
    ms = ", ".join(str(m) for m, _ in tail)
    return LimitEstimate(
        value=c0,
        method=DIRECT,
        last_term=tail[-1][1],
        tail=tail,
        error_note=f"degree {k} fit in 1/m over m in ({ms}); no certified bound",
    )


def _truncations(Fs, level):
    out = []
    for F in Fs:
        if isinstance(F, TruncatedFiltration) and (level is None or F.level == level):
            out.append(F)
        else:
            out.append(truncate(F, level or DEFAULT_LEVEL))
    return out


def common_period(Ts, check_bound=None):
    """Verify each truncation's period and return their lcm."""
    periods = [noetherian_period(T, check_bound).period for T in Ts]
    return lcm_all(periods)


def G_exact_truncated(Ts, n, period=None):
    """
    Exact G of truncated filtrations: covolume(prod_j (I(j)_{a,s})^{n_j}) / s^d

    Parameters
    ----------
    Ts : list of TruncatedFiltration
        truncations whose periods have been verified
    n : sequence of int
        nonnegative weights
    period : int, optional
        common period s; must be a multiple of every verified period.
        Defaults to the lcm of the verified periods.

    Raises
    ------
    UnverifiedPeriodError
        if a truncation has no verified period dividing ``period``
    """
    d = _common_dim(Ts)
    verified = []
    for T in Ts:
        cert = getattr(T, "certificate", None)
        if cert is None:
            raise UnverifiedPeriodError(period, None)
        verified.append(cert.period)
    s = period or lcm_all(verified)
    for v in verified:
        if s % v:
            raise UnverifiedPeriodError(s, v)
    ideal = MonomialIdeal.unit(d)
    for T, k in zip(Ts, n):
        ideal = monomial.product(ideal, monomial.power(T.ideal_at(s), k))
    return monomial.covolume(ideal) / Fraction(s**d)


def g_evaluator(
    Fs,
    backend=DIRECT,
    level=None,
    ladder=DEFAULT_LADDER,
    check_bound=None,
):
    """
    Build n -> LimitEstimate for the G of a list of filtrations

    With ``truncation-exact`` every filtration is replaced by its truncation
    at ``level`` (filtrations that already are truncations are kept) and the
    common period is verified once up front.
    """
    d = _common_dim(Fs)
    if backend == DIRECT:

        def evaluate(n):
            return limit_estimate(length_sequence(Fs, n, ladder), degree=d)

        return evaluate
    if backend != TRUNCATION_EXACT:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    Ts = _truncations(Fs, level)
    s = common_period(Ts, check_bound)
    logger.debug("truncation-exact backend: common period %d", s)

    def evaluate(n):
        value = G_exact_truncated(Ts, n, s)
        return LimitEstimate(value, TRUNCATION_EXACT, error_note=f"period {s}")

    return evaluate


@lru_cache(maxsize=None)
def sample_grid(r, d):
    """
    Sample points for recovering a homogeneous degree-d polynomial in r variables

    Candidates n with n_i >= 1 and sum(n_i - 1) <= d are taken in order of
    (sum, lexicographic) and accepted while the rows of the monomial matrix
    stay independent.

    Returns
    -------
    tuple of tuple of int
        exactly C(d + r - 1, r - 1) points
    """
    alphas = type_vectors(d, r)
    candidates = []
    for extra in range(d + 1):
        for k in type_vectors(extra, r):
            candidates.append(tuple(1 + ki for ki in k))
    candidates.sort(key=lambda n: (sum(n), n))
    points, rows = [], []
    for n in candidates:
        row = [monomial_value(n, a) for a in alphas]
        if matrix_rank(rows + [row]) > len(rows):
            points.append(n)
            rows.append(row)
        if len(points) == len(alphas):
            return tuple(points)
    raise SingularSampleError(f"no nonsingular sample grid for r={r}, d={d}")


def fit_mixed(evaluate, r, d, workers=None):
    """
    Evaluate G on the sample grid and solve for the mixed multiplicities

    Parameters
    ----------
    evaluate : callable
        n -> LimitEstimate
    r, d : int
        number of filtrations and dimension
    workers : int, optional
        evaluate sample points in a thread pool of this size

    Returns
    -------
    (dict, list)
        e-values keyed by type vector, and the (n, LimitEstimate) samples
    """
    points = sample_grid(r, d)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(evaluate, points))
    else:
        values = [evaluate(n) for n in points]
    alphas = type_vectors(d, r)
    rows = [[monomial_value(n, a) for a in alphas] for n in points]
    try:
        coeffs = solve_exact(rows, [v.value for v in values])
    except ValueError as err:
        raise SingularSampleError(str(err)) from err
    evalues = {
        a: c * math.prod(math.factorial(k) for k in a) for a, c in zip(alphas, coeffs)
    }
    return evalues, list(zip(points, values))


@dataclass
class MixedMultiplicityReport:
    r: int
    d: int
    backend: str
    coeffs: dict
    samples: list = field(default_factory=list)
    difference: dict = None

    @property
    def exact(self):
        return all(v.exact for v in self.coeffs.values())

    def value(self, alpha):
        return self.coeffs[tuple(alpha)].value

    def to_json(self):
        out = {
            "r": self.r,
            "d": self.d,
            "backend": self.backend,
            "coefficients": {
                type_key(a): est.to_json() for a, est in self.coeffs.items()
            },
            "samples": [
                {"n": list(n), "G": est.to_json()} for n, est in self.samples
            ],
        }
        if self.difference is not None:
            out["difference"] = {
                type_key(a): fraction_str(v) for a, v in self.difference.items()
            }
        return out


def report_from_fit(evalues, samples, r, d, backend):
    method = TRUNCATION_EXACT if all(v.exact for _, v in samples) else DIRECT
    note = "" if method == TRUNCATION_EXACT else "fitted from direct estimates"
    coeffs = {a: LimitEstimate(v, method, error_note=note) for a, v in evalues.items()}
    return MixedMultiplicityReport(r, d, backend, coeffs, samples)


def mixed_multiplicities(
    Fs,
    backend=DIRECT,
    level=None,
    ladder=DEFAULT_LADDER,
    check_bound=None,
    workers=None,
):
    """
    All mixed multiplicities e(I(1)^[d_1], ..., I(r)^[d_r])

    Parameters
    ----------
    Fs : list of Filtration
        r filtrations of a common dimension d
    backend : {"direct", "truncation-exact"}
        how G is evaluated at the sample points
    level : int, optional
        truncation level a for the exact backend
    ladder : sequence of int
        m values for the direct backend
    check_bound : int, optional
        period verification bound for the exact backend
    workers : int, optional
        thread pool size for sample evaluation

    Returns
    -------
    MixedMultiplicityReport
        keyed by every type vector (d_1, ..., d_r) with sum d
    """
    d = _common_dim(Fs)
    evaluate = g_evaluator(Fs, backend, level, ladder, check_bound)
    evalues, samples = fit_mixed(evaluate, len(Fs), d, workers)
    return report_from_fit(evalues, samples, len(Fs), d, backend)


def multiplicity(F, **kwargs):
    """e(F) as a LimitEstimate; d! times the limit of l(R/I_n)/n^d."""
    report = mixed_multiplicities([F], **kwargs)
    return report.coeffs[(F.dim,)]


def truncation_ladder(Fs, levels, check_bound=None, workers=None):
    """
    Exact mixed multiplicities of the a-truncations for increasing a

    Each report after the first carries the differences to its predecessor.

    Returns
    -------
    list of (int, MixedMultiplicityReport)
    """
    levels = list(levels)
    if any(a >= b for a, b in zip(levels, levels[1:])):
        raise ValueError(f"levels must be increasing: {levels}")
    rows = []
    previous = None
    for a in levels:
        Ts = [truncate(F, a) for F in Fs]
        report = mixed_multiplicities(
            Ts, TRUNCATION_EXACT, a, check_bound=check_bound, workers=workers
        )
        if previous is not None:
            report.difference = {
                k: report.value(k) - previous.value(k) for k in report.coeffs
            }
        rows.append((a, report))
        previous = report
    return rows


@dataclass(frozen=True)
class Check:
    """Outcome of one verified assertion."""

    name: str
    passed: bool
    detail: str = ""

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _is_zero(est, threshold):
    if est.exact:
        return est.value == 0
    return abs(est.value) <= threshold


def _is_positive(est, threshold):
    if est.exact:
        return est.value > 0
    return est.value > threshold


@dataclass
class PositivityReport:
    report: MixedMultiplicityReport
    singles: list
    s: int
    order: tuple
    checks: list
    threshold: Fraction
    single_component: bool

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_json(self):
        return {
            "mixed": self.report.to_json(),
            "singles": [e.to_json() for e in self.singles],
            "s": self.s,
            "order": list(self.order),
            "threshold": fraction_str(self.threshold),
            "single_component": self.single_component,
            "checks": [c.to_json() for c in self.checks],
            "passed": self.passed,
        }


def positivity_report(
    Fs,
    threshold=ZERO_THRESHOLD,
    single_component=True,
    report=None,
    singles=None,
    **kwargs,
):
    """
    Classify mixed multiplicities as positive or zero and check the
    positivity and vanishing statements against them

    Nonnegativity and the pure-coefficient identity are checked on every
    model. Positivity of all coefficients (when every e(I(j)) > 0) and the
    vanishing of coefficients touching filtrations with e(I(j)) = 0 are only
    checked for single-component models.

    Parameters
    ----------
    Fs : list of Filtration
    threshold : Fraction
        zero threshold for values that are not exact
    single_component : bool
        whether the model is analytically irreducible
    report : MixedMultiplicityReport, optional
        precomputed coefficients for ``Fs``
    singles : list of LimitEstimate, optional
        precomputed e(I(j))
    **kwargs
        forwarded to ``mixed_multiplicities``

    Returns
    -------
    PositivityReport
    """
    threshold = Fraction(threshold)
    if report is None:
        report = mixed_multiplicities(Fs, **kwargs)
    if singles is None:
        singles = [multiplicity(F, **kwargs) for F in Fs]
    r, d = report.r, report.d
    positive = [_is_positive(e, threshold) for e in singles]
    order = tuple(sorted(range(r), key=lambda j: (not positive[j], j)))
    s = sum(positive)
    checks = []

    negative = [
        type_key(a)
        for a, est in report.coeffs.items()
        if (est.value < 0 if est.exact else est.value < -threshold)
    ]
    checks.append(Check("nonnegative", not negative, _listing("negative", negative)))

    for j, single in enumerate(singles):
        pure = tuple(d if i == j else 0 for i in range(r))
        coeff = report.coeffs[pure]
        if coeff.exact and single.exact:
            ok = coeff.value == single.value
        else:
            ok = abs(coeff.value - single.value) <= threshold
        checks.append(
            Check(
                f"pure-coefficient[{j}]",
                ok,
                f"coefficient {coeff} vs e = {single}",
            )
        )

    if single_component:
        if s == r:
            bad = [
                type_key(a)
                for a, est in report.coeffs.items()
                if not _is_positive(est, threshold)
            ]
            checks.append(Check("all-positive", not bad, _listing("not positive", bad)))
        elif s < r:
            zero_idx = [j for j in range(r) if not positive[j]]
            bad = [
                type_key(a)
                for a, est in report.coeffs.items()
                if any(a[j] for j in zero_idx) and not _is_zero(est, threshold)
            ]
            checks.append(Check("vanishing", not bad, _listing("nonzero", bad)))
            if s:
                checks.extend(
                    _reduced_checks(Fs, report, positive, threshold, kwargs)
                )
    logger.debug("positivity: s=%d of r=%d, %d checks", s, r, len(checks))
    return PositivityReport(
        report, list(singles), s, order, checks, threshold, single_component
    )


def _listing(label, keys):
    return f"{label} at {keys}" if keys else ""


def _reduced_checks(Fs, report, positive, threshold, kwargs):
    keep = [j for j, p in enumerate(positive) if p]
    reduced = mixed_multiplicities([Fs[j] for j in keep], **kwargs)
    checks = []
    for alpha, est in reduced.coeffs.items():
        full = [0] * report.r
        for j, k in zip(keep, alpha):
            full[j] = k
        coeff = report.coeffs[tuple(full)]
        if coeff.exact and est.exact:
            same = coeff.value == est.value
        else:
            same = abs(coeff.value - est.value) <= threshold
        checks.append(
            Check(
                f"reduced[{type_key(full)}]",
                same and _is_positive(coeff, threshold),
                f"full {coeff} vs reduced {est}",
            )
        )
    return checks


def minkowski_spot_checks(report):
    """
    Spot checks of e(d-k, k)^2 <= e(d-k+1, k-1) e(d-k-1, k+1) for r = 2

    These are evaluated on the computed numbers only; they hold for
    single-component models and may fail for reducible ones.
    """
    if report.r != 2:
        return []
    d = report.d
    checks = []
    for k in range(1, d):
        mid = report.value((d - k, k))
        lo = report.value((d - k + 1, k - 1))
        hi = report.value((d - k - 1, k + 1))
        checks.append(
            Check(
                f"minkowski[{k}]",
                mid * mid <= lo * hi,
                f"{fraction_str(mid)}^2 vs {fraction_str(lo)}*{fraction_str(hi)}",
            )
        )
    return checks
