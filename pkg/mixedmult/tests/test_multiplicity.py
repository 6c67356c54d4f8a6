import inspect
import logging
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mixedmult import filtration, monomial, multiplicity
from mixedmult.exceptions import (
    DimensionMismatchError,
    InsufficientTermsError,
    UnverifiedPeriodError,
)
from mixedmult.multiplicity import DIRECT, TRUNCATION_EXACT
from mixedmult.tests.oracles import brute_colength, primary_ideals
from mixedmult.utils import solve_exact


def test_length_sequence(maximal):
    seq = multiplicity.length_sequence([maximal], (1,), [4, 8])
    assert seq == [(4, Fraction(10, 16)), (8, Fraction(36, 64))]
    assert multiplicity.length_sequence([maximal], (0,), [4]) == [(4, 0)]
    with pytest.raises(ValueError):
        multiplicity.length_sequence([maximal], (1,), [8, 4])


def test_length_sequence_dimension_mismatch(maximal, sqrt2):
    with pytest.raises(DimensionMismatchError):
        multiplicity.length_sequence([maximal, sqrt2], (1, 1), [2])


def test_limit_estimate_needs_three_terms():
    with pytest.raises(InsufficientTermsError):
        multiplicity.limit_estimate([(1, Fraction(1)), (2, Fraction(1))])


def test_limit_estimate_is_exact_on_first_order_sequences(maximal):
    est = multiplicity.limit_estimate(
        multiplicity.length_sequence([maximal], (1,), multiplicity.DEFAULT_LADDER)
    )
    assert est.value == Fraction(1, 2)
    assert est.method == DIRECT
    assert not est.exact
    assert est.last_term == Fraction(33, 64)


def test_negative_extrapolation_clamped(caplog):
    seq = [
        (1, Fraction(9, 10)),
        (2, Fraction(2, 5)),
        (4, Fraction(3, 20)),
    ]
    with caplog.at_level(logging.WARNING, logger="mixedmult.multiplicity"):
        est = multiplicity.limit_estimate(seq)
    assert est.value == 0
    assert "clamping" in caplog.text


def test_direct_sqrt2_multiplicity(sqrt2):
    est = multiplicity.multiplicity(sqrt2, ladder=(256, 512, 1024))
    assert abs(float(est.value) - math.sqrt(2)) < 1e-3
    assert est.method == DIRECT


def test_direct_fixed_plus_adic_vanishes(fixed_plus_adic):
    seq = multiplicity.length_sequence([fixed_plus_adic], (1,), (32, 64, 128))
    assert [t for _, t in seq] == [Fraction(1, m) for m in (32, 64, 128)]
    assert multiplicity.multiplicity(fixed_plus_adic, ladder=(32, 64, 128)).value == 0


def test_exact_truncated_G(maximal):
    T = filtration.truncate(maximal, 1)
    with pytest.raises(UnverifiedPeriodError):
        multiplicity.G_exact_truncated([T], (1,))
    assert filtration.noetherian_period(T).period == 1
    assert multiplicity.G_exact_truncated([T], (1,)) == Fraction(1, 2)
    assert multiplicity.G_exact_truncated([T], (1,), period=2) == Fraction(1, 2)
    assert multiplicity.G_exact_truncated([T], (3,)) == Fraction(9, 2)


def test_exact_truncated_G_of_a_pair(maximal, x2_y_adic):
    Ts = [filtration.truncate(maximal, 1), filtration.truncate(x2_y_adic, 1)]
    assert multiplicity.common_period(Ts) == 1
    assert multiplicity.G_exact_truncated(Ts, (1, 1)) == Fraction(5, 2)


def test_sample_grid():
    assert multiplicity.sample_grid(2, 2) == ((1, 1), (1, 2), (2, 1))
    assert len(multiplicity.sample_grid(3, 3)) == math.comb(5, 2)
    assert multiplicity.sample_grid(1, 3) == ((1,),)


def test_mixed_pair_exact(maximal, x2_y_adic):
    report = multiplicity.mixed_multiplicities(
        [maximal, x2_y_adic], TRUNCATION_EXACT, level=1
    )
    assert report.exact
    assert report.value((2, 0)) == 1
    assert report.value((1, 1)) == 1
    assert report.value((0, 2)) == 2


def test_mixed_pair_direct_matches_exact(maximal, x2_y_adic):
    report = multiplicity.mixed_multiplicities([maximal, x2_y_adic], DIRECT)
    assert not report.exact
    assert report.value((2, 0)) == 1
    assert report.value((1, 1)) == 1
    assert report.value((0, 2)) == 2


def test_mixed_pair_against_brute_force_lengths(m2, x2_y):
    # l(R / m^a (x^2, y)^b) is a polynomial in (a, b); its quadratic part
    # carries the mixed multiplicities.
    def length(a, b):
        ideal = monomial.product(monomial.power(m2, a), monomial.power(x2_y, b))
        return brute_colength(ideal)

    basis = [
        lambda a, b: a * a,
        lambda a, b: a * b,
        lambda a, b: b * b,
        lambda a, b: a,
        lambda a, b: b,
        lambda a, b: 1,
    ]
    points = [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (1, 3)]
    coeffs = solve_exact(
        [[f(a, b) for f in basis] for a, b in points],
        [length(a, b) for a, b in points],
    )
    for a in range(1, 8):
        for b in range(1, 8):
            assert sum(c * f(a, b) for c, f in zip(coeffs, basis)) == length(a, b)
    assert [2 * coeffs[0], coeffs[1], 2 * coeffs[2]] == [1, 1, 2]


def test_mixed_is_symmetric(maximal, x2_y_adic):
    forward = multiplicity.mixed_multiplicities(
        [maximal, x2_y_adic], TRUNCATION_EXACT, level=1
    )
    backward = multiplicity.mixed_multiplicities(
        [filtration.truncate(x2_y_adic, 1), filtration.truncate(maximal, 1)],
        TRUNCATION_EXACT,
        level=1,
    )
    for (i, j), est in forward.coeffs.items():
        assert backward.value((j, i)) == est.value


def test_workers_give_the_same_report(maximal, x2_y_adic):
    serial = multiplicity.mixed_multiplicities([maximal, x2_y_adic])
    pooled = multiplicity.mixed_multiplicities([maximal, x2_y_adic], workers=4)
    assert serial.to_json() == pooled.to_json()


def test_truncation_ladder_of_sqrt2(sqrt2):
    ladder = multiplicity.truncation_ladder([sqrt2], [1, 2, 4, 8, 16])
    values = [rep.value((1,)) for _, rep in ladder]
    assert values == [
        2,
        Fraction(3, 2),
        Fraction(3, 2),
        Fraction(10, 7),
        Fraction(17, 12),
    ]
    assert ladder[0][1].difference is None
    assert ladder[3][1].difference[(1,)] == Fraction(10, 7) - Fraction(3, 2)


def test_truncation_ladder_of_adic_is_constant(maximal):
    ladder = multiplicity.truncation_ladder([maximal], [1, 2, 4])
    assert all(rep.value((2,)) == 1 for _, rep in ladder)
    assert all(d == 0 for _, rep in ladder[1:] for d in rep.difference.values())


def test_fixed_plus_adic_truncations(fixed_plus_adic):
    ladder = multiplicity.truncation_ladder([fixed_plus_adic], [1, 2, 3, 4])
    assert [rep.value((2,)) for _, rep in ladder] == [
        1,
        Fraction(1, 2),
        Fraction(1, 3),
        Fraction(1, 4),
    ]


def test_positivity_all_positive(maximal, x2_y_adic):
    report = multiplicity.positivity_report(
        [maximal, x2_y_adic], backend=TRUNCATION_EXACT, level=1
    )
    assert report.passed
    assert report.s == 2
    names = [c.name for c in report.checks]
    assert "all-positive" in names
    assert "pure-coefficient[1]" in names


def test_positivity_vanishing(fixed_plus_adic, maximal):
    report = multiplicity.positivity_report([fixed_plus_adic, maximal])
    assert report.passed
    assert report.s == 1
    assert report.order == (1, 0)
    assert report.report.value((2, 0)) == 0
    assert report.report.value((1, 1)) == 0
    assert report.report.value((0, 2)) == 1
    names = [c.name for c in report.checks]
    assert "vanishing" in names
    assert "reduced[0,2]" in names


def test_positivity_flags_a_wrong_pure_coefficient(maximal, x2_y_adic):
    good = multiplicity.mixed_multiplicities(
        [maximal, x2_y_adic], TRUNCATION_EXACT, level=1
    )
    wrong = [
        multiplicity.LimitEstimate(Fraction(3), TRUNCATION_EXACT),
        multiplicity.LimitEstimate(Fraction(2), TRUNCATION_EXACT),
    ]
    report = multiplicity.positivity_report(
        [maximal, x2_y_adic], report=good, singles=wrong
    )
    assert [c.name for c in report.failures()] == ["pure-coefficient[0]"]


def test_minkowski_spot_checks(maximal, x2_y_adic):
    report = multiplicity.mixed_multiplicities(
        [maximal, x2_y_adic], TRUNCATION_EXACT, level=1
    )
    checks = multiplicity.minkowski_spot_checks(report)
    assert [c.name for c in checks] == ["minkowski[1]"]
    assert checks[0].passed


def test_estimate_json():
    exact = multiplicity.LimitEstimate(Fraction(5, 2), TRUNCATION_EXACT)
    assert exact.to_json() == {"exact": "5/2"}
    assert str(exact) == "5/2"
    direct = multiplicity.LimitEstimate(Fraction(1, 2), DIRECT, Fraction(17, 32))
    out = direct.to_json()
    assert out["approx"] == 0.5
    assert out["last_term"] == "17/32"


@given(
    st.lists(primary_ideals(2, max_exp=3, max_extra=2), min_size=1, max_size=2),
    st.integers(2, 3),
)
@settings(max_examples=30, deadline=None)
def test_exact_G_is_homogeneous(ideals, k):
    Ts = [filtration.truncate(filtration.adic(I), 1) for I in ideals if not I.is_unit]
    if not Ts:
        return
    multiplicity.common_period(Ts)
    n = tuple(1 for _ in Ts)
    kn = tuple(k for _ in Ts)
    G = multiplicity.G_exact_truncated(Ts, n)
    assert multiplicity.G_exact_truncated(Ts, kn) == k * k * G


def test_package_import_keeps_the_multiplicity_module():
    import mixedmult
    from mixedmult import catalog
    from mixedmult import multiplicity as module

    assert inspect.ismodule(module)
    assert mixedmult.filtration_multiplicity is multiplicity.multiplicity
    F = catalog.load_filtration("sqrt2")
    rows = module.truncation_ladder([F], [1, 2])
    assert [(a, report.value((1,))) for a, report in rows] == [
        (1, 2),
        (2, Fraction(3, 2)),
    ]


def test_fit_degree_removes_second_order_terms():
    seq = [
        (m, Fraction(1, 6) + Fraction(2, m) + Fraction(5, m * m)) for m in (8, 16, 32)
    ]
    assert multiplicity.limit_estimate(seq, degree=2).value == Fraction(1, 6)
    assert multiplicity.limit_estimate(seq).value != Fraction(1, 6)
    assert "degree 2" in multiplicity.limit_estimate(seq, degree=3).error_note


def test_direct_fixed_plus_adic_vanishes_in_three_variables():
    m3 = monomial.MonomialIdeal.maximal(3)
    x = monomial.MonomialIdeal(3, ((1, 0, 0),))
    F = filtration.fixed_plus_adic(x, m3)
    seq = multiplicity.length_sequence([F], (1,), multiplicity.DEFAULT_LADDER)
    assert [t for _, t in seq] == [
        Fraction(m * (m + 1), 2 * m**3) for m in multiplicity.DEFAULT_LADDER
    ]
    assert multiplicity.multiplicity(F).value == 0
    assert multiplicity.multiplicity(filtration.adic(m3)).value == 1


@given(primary_ideals(2, max_exp=3), primary_ideals(2, max_exp=3))
@settings(max_examples=30, deadline=None)
def test_exact_mixed_term_is_twice_the_mixed_covolume(I, J):
    assume(not I.is_unit and not J.is_unit)
    Fs = [filtration.adic(I), filtration.adic(J)]
    report = multiplicity.mixed_multiplicities(Fs, TRUNCATION_EXACT, level=1)
    assert report.value((1, 1)) == 2 * monomial.mixed_covolume([I, J])
    assert report.value((2, 0)) == 2 * monomial.covolume(I)
