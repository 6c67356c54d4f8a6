import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixedmult import catalog, filtration, monomial
from mixedmult.exceptions import ConfigError, PeriodSearchError
from mixedmult.filtration import Filtration, FiltrationSpec, SurdScalar
from mixedmult.monomial import MonomialIdeal
from mixedmult.tests.oracles import filtrations


def ceil_sqrt2(k):
    return math.isqrt(2 * k * k) + 1


def truncated_ratio(a):
    return min(Fraction(ceil_sqrt2(k), k) for k in range(1, a + 1))


class SquareIndexFiltration(Filtration):
    """n -> m^(n^2), which is not submultiplicative."""

    def _compute(self, n):
        return monomial.maximal_power(self.dim, n * n)


def test_surd_scalar_normalization():
    assert SurdScalar.sqrt(4) == SurdScalar.rational(2)
    assert SurdScalar.sqrt(8, 2) == SurdScalar.rational(2)
    assert SurdScalar.sqrt(9, 4) == SurdScalar.rational(3, 2)
    assert not SurdScalar.sqrt(2).is_rational
    assert SurdScalar.rational(6, 4) == SurdScalar.rational(3, 2)
    with pytest.raises(ValueError):
        SurdScalar.rational(0)


def test_surd_scalar_arithmetic():
    root2 = SurdScalar.sqrt(2)
    assert root2.ceil_times(1) == 2
    assert root2.ceil_times(5) == 8
    assert root2.ceil_times(Fraction(1, 2)) == 1
    assert root2.reached(Fraction(3, 2), 1)
    assert not root2.reached(Fraction(7, 5), 1)
    assert root2.min_completion(3, Fraction(0), 1) == 5
    assert SurdScalar.rational(3, 2).ceil_times(3) == 5
    assert str(root2) == "sqrt(2)"
    assert SurdScalar.from_json(root2.to_json()) == root2


def test_ideal_zero_is_unit(maximal, sqrt2):
    assert maximal.ideal_at(0).is_unit
    assert sqrt2.ideal_at(0).is_unit
    with pytest.raises(ValueError):
        maximal.ideal_at(-1)


def test_adic_levels(maximal, x2_y_adic, x2_y):
    assert maximal.ideal_at(4) == monomial.maximal_power(2, 4)
    assert x2_y_adic.ideal_at(3) == monomial.power(x2_y, 3)
    assert maximal.ideal_at(3) is maximal.ideal_at(3)


def test_sqrt2_levels(sqrt2):
    for n in (1, 5, 10, 41):
        assert sqrt2.ideal_at(n).gens == ((ceil_sqrt2(n),),)


def test_fixed_plus_adic_levels(fixed_plus_adic):
    assert fixed_plus_adic.ideal_at(1) == MonomialIdeal.maximal(2)
    assert fixed_plus_adic.ideal_at(3) == MonomialIdeal(2, ((1, 0), (0, 3)))


def test_weighted_levels(weighted):
    assert weighted.ideal_at(1) == MonomialIdeal.maximal(2)
    assert weighted.ideal_at(2) == MonomialIdeal(2, ((2, 0), (0, 1)))
    assert weighted.ideal_at(3) == MonomialIdeal(2, ((3, 0), (1, 1), (0, 2)))


def test_rescale_and_product(maximal, x2_y_adic, m2, x2_y):
    assert filtration.rescale(maximal, 2).ideal_at(3) == maximal.ideal_at(6)
    P = filtration.product_filtration([maximal, x2_y_adic], (1, 1))
    assert P.ideal_at(1) == monomial.product(m2, x2_y)
    Q = filtration.product_filtration([maximal, x2_y_adic], (2, 0))
    assert Q.ideal_at(2) == monomial.maximal_power(2, 4)


def test_truncation_agrees_below_level(sqrt2):
    T = filtration.truncate(sqrt2, 8)
    for n in range(9):
        assert T.ideal_at(n) == sqrt2.ideal_at(n)
    assert T.ideal_at(14) == MonomialIdeal(1, ((20,),))


def test_submultiplicative(maximal, sqrt2, weighted):
    for F in (maximal, sqrt2, weighted, filtration.truncate(sqrt2, 4)):
        assert filtration.check_submultiplicative(F, 12).ok


def test_submultiplicativity_violation_reported():
    F = SquareIndexFiltration(FiltrationSpec.adic(MonomialIdeal.maximal(2)))
    report = filtration.check_submultiplicative(F, 6)
    assert not report.ok
    assert report.violation == (1, 1)


@pytest.mark.parametrize("a, period", [(1, 1), (2, 2), (4, 2), (8, 7)])
def test_sqrt2_truncation_periods(sqrt2, a, period):
    cert = filtration.noetherian_period(filtration.truncate(sqrt2, a))
    assert cert.period == period
    assert cert.check_bound == max(6, a)


def test_period_of_fixed_plus_adic_truncation(fixed_plus_adic):
    T = filtration.truncate(fixed_plus_adic, 3)
    cert = filtration.noetherian_period(T)
    assert cert.period == 3
    assert T.ideal_at(3) == MonomialIdeal(2, ((1, 0), (0, 3)))
    assert T.certificate is cert


def test_period_search_failure(sqrt2):
    with pytest.raises(PeriodSearchError) as info:
        filtration.noetherian_period(filtration.truncate(sqrt2, 8), max_period=6)
    assert info.value.best_candidate is not None
    assert info.value.first_failure >= 2


def test_period_needs_truncation(sqrt2):
    with pytest.raises(TypeError):
        filtration.noetherian_period(sqrt2)


def test_truncated_ratio_formula():
    assert truncated_ratio(8) == Fraction(10, 7)
    assert truncated_ratio(16) == Fraction(17, 12)
    assert truncated_ratio(64) == Fraction(58, 41)


def test_concurrent_reads_share_one_table(x2_y):
    F = filtration.adic(x2_y)
    with ThreadPoolExecutor(max_workers=8) as pool:
        ideals = list(pool.map(F.ideal_at, [12, 3, 9, 12, 1, 7, 12, 5] * 4))
    assert ideals[0] == monomial.power(x2_y, 12)
    assert all(I is F.ideal_at(12) for I in ideals[::8])
    assert sorted(F._cache) == list(range(13))


def test_spec_json_round_trip():
    for spec in catalog.filtrations.values():
        assert filtration.spec_from_json(spec.to_json()) == spec
    nested = FiltrationSpec.product(
        [FiltrationSpec.truncated(catalog.filtrations["sqrt2"], 4)] * 2, (1, 2)
    )
    assert filtration.spec_from_json(nested.to_json()) == nested


def test_spec_errors():
    with pytest.raises(ConfigError, match="not m-primary"):
        filtration.spec_from_json(
            {"kind": "adic", "ideal": {"dim": 2, "gens": [[1, 1]]}}
        )
    with pytest.raises(ConfigError, match="unknown filtration kind"):
        filtration.spec_from_json({"kind": "graded"})
    with pytest.raises(ConfigError, match="missing field"):
        filtration.spec_from_json({"kind": "truncated", "level": 2})
    with pytest.raises(ConfigError):
        filtration.spec_from_json(
            {"kind": "rounded-valuation", "weights": [1, 0], "scale": {"rat": [1, 1]}}
        )
    with pytest.raises(ConfigError):
        FiltrationSpec.truncated(catalog.filtrations["sqrt2"], 0)


@given(
    st.sampled_from(sorted(catalog.filtrations)),
    st.integers(1, 4),
    st.integers(1, 3),
    st.integers(0, 4),
)
@settings(max_examples=60, deadline=None)
def test_rescaling_a_truncation_reads_it_at_multiples(name, a, s, n):
    T = filtration.truncate(catalog.load_filtration(name), a)
    assert filtration.rescale(T, s).ideal_at(n) == T.ideal_at(s * n)


@pytest.mark.parametrize("name", sorted(catalog.filtrations))
def test_catalog_filtrations_are_descending_chains(name):
    F = catalog.load_filtration(name)
    assert F.ideal_at(0).is_unit
    for n in range(12):
        assert monomial.is_subideal(F.ideal_at(n + 1), F.ideal_at(n))


@given(st.integers(1, 3).flatmap(filtrations))
@settings(max_examples=60, deadline=None)
def test_random_filtrations_are_descending_and_submultiplicative(F):
    assert F.ideal_at(0).is_unit
    for n in range(6):
        assert monomial.is_subideal(F.ideal_at(n + 1), F.ideal_at(n))
    assert filtration.check_submultiplicative(F, 6).ok


def test_fixed_plus_adic_is_submultiplicative(fixed_plus_adic):
    report = filtration.check_submultiplicative(fixed_plus_adic, 16)
    assert report.ok
    assert report.violation is None
    T = filtration.truncate(fixed_plus_adic, 3)
    assert filtration.check_submultiplicative(T, 12).ok
