"""
End-to-end checks on the built-in filtrations at the documented scales.
"""
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mixedmult import (
    catalog,
    cli,
    components,
    filtration,
    monomial,
    multiplicity,
    okounkov,
)
from mixedmult.components import Component, ComponentModel
from mixedmult.multiplicity import TRUNCATION_EXACT
from mixedmult.tests.oracles import (
    brute_colength,
    filtrations,
    primary_ideals,
    random_primary_ideal,
    seeded,
)

LEVELS = [1, 2, 4, 8, 16, 32, 64]


def truncated_ratio(a):
    return min(Fraction(math.isqrt(2 * k * k) + 1, k) for k in range(1, a + 1))


@pytest.mark.slow
def test_sqrt2_truncations_decrease_to_the_limit():
    F = catalog.load_filtration("sqrt2")
    ladder = multiplicity.truncation_ladder([F], LEVELS)
    values = [rep.value((1,)) for _, rep in ladder]
    assert values == [truncated_ratio(a) for a in LEVELS]
    assert all(b <= a for a, b in zip(values, values[1:]))
    assert values[-1] == Fraction(58, 41)
    assert all(v > Fraction(1414, 1000) for v in values)
    direct = multiplicity.multiplicity(F, ladder=(256, 512, 1024))
    assert abs(float(direct.value) - math.sqrt(2)) < 1e-3


def test_fixed_plus_adic_lengths_are_linear():
    F = catalog.load_filtration("fixed_plus_adic")
    for m in range(1, 129):
        assert monomial.colength(F.ideal_at(m)) == m
    seq = multiplicity.length_sequence([F], (1,), [32, 64, 128])
    assert all(2 * t == Fraction(2, m) for m, t in seq)
    assert multiplicity.multiplicity(F, ladder=(32, 64, 128)).value == 0


def test_example1_job():
    config = cli.create_config(test_config={"command": "example1"})
    assert cli.validate(config) == []
    result = cli.run(config).result
    assert result["e"] == {"2,0": "1", "1,1": "0", "0,2": "1"}
    assert result["G"]["1,1"]["approx"] == 1.0
    assert result["G"]["1,0"]["approx"] == 0.5


@pytest.mark.slow
@pytest.mark.parametrize("name", ["maximal", "x2_y", "sqrt2", "fixed_plus_adic"])
def test_body_volumes_approach_the_limit(name):
    F = catalog.load_filtration(name)
    ladder = okounkov.theorem1_ladder(F, [16, 32, 64])
    assert ladder.non_increasing
    assert ladder.rows[-1].discrepancy <= max(Fraction(1, 100), Fraction(4, 64))


def test_pair_exact_and_direct_agree():
    Fs = [catalog.load_filtration("maximal"), catalog.load_filtration("x2_y")]
    exact = multiplicity.mixed_multiplicities(Fs, TRUNCATION_EXACT, level=1)
    direct = multiplicity.mixed_multiplicities(Fs)
    expected = {(2, 0): 1, (1, 1): 1, (0, 2): 2}
    assert {a: e.value for a, e in exact.coeffs.items()} == expected
    for alpha, value in expected.items():
        assert abs(direct.value(alpha) - value) <= Fraction(1, 100)


@pytest.mark.slow
@given(st.data())
@settings(max_examples=60, deadline=None)
def test_positivity_on_random_single_component_models(data):
    d = data.draw(st.integers(1, 3))
    r = data.draw(st.integers(1, 3 if d < 3 else 1))
    Fs = data.draw(st.lists(filtrations(d), min_size=r, max_size=r))
    level = data.draw(st.integers(1, 2))
    report = multiplicity.positivity_report(Fs, backend=TRUNCATION_EXACT, level=level)
    assert report.passed
    assert report.s == r
    assert "all-positive" in [c.name for c in report.checks]


@pytest.mark.slow
@given(st.lists(primary_ideals(2, max_exp=3, max_extra=2), min_size=2, max_size=2))
@settings(max_examples=30, deadline=None)
def test_positivity_of_adic_models_matches_the_covolume(ideals):
    assume(not any(I.is_unit for I in ideals))
    Fs = [filtration.adic(I) for I in ideals]
    report = multiplicity.positivity_report(Fs, backend=TRUNCATION_EXACT, level=1)
    assert report.passed
    for j, I in enumerate(ideals):
        pure = tuple(2 if i == j else 0 for i in range(2))
        assert report.report.value(pure) == 2 * monomial.covolume(I)


@pytest.mark.slow
@given(
    st.lists(
        st.tuples(
            st.integers(1, 3),
            st.lists(primary_ideals(2, max_exp=3, max_extra=1), min_size=2, max_size=2),
        ),
        min_size=2,
        max_size=3,
    )
)
@settings(max_examples=25, deadline=None)
def test_multi_component_mixed_multiplicities_are_positive(parts):
    assume(not any(I.is_unit for _, ideals in parts for I in ideals))
    model = ComponentModel(
        tuple(
            Component(w, tuple(filtration.adic(I) for I in ideals))
            for w, ideals in parts
        )
    )
    args = {"backend": TRUNCATION_EXACT, "level": 1}
    mixed = components.component_mixed(model, **args)
    singles = [
        components.component_mixed(components.restrict(model, [j]), **args).coeffs[
            (2,)
        ]
        for j in range(2)
    ]
    report = multiplicity.positivity_report(
        None, single_component=False, report=mixed, singles=singles
    )
    assert report.passed
    assert not report.single_component
    assert all(est.value > 0 for est in mixed.coeffs.values())
    for alpha, est in mixed.coeffs.items():
        per_component = [
            multiplicity.mixed_multiplicities(list(c.filtrations), **args).value(alpha)
            for c in model.components
        ]
        weights = [c.weight for c in model.components]
        assert est.value == sum(w * v for w, v in zip(weights, per_component))


@pytest.mark.slow
def test_vanishing_in_three_variables():
    m3 = monomial.MonomialIdeal.maximal(3)
    x = monomial.MonomialIdeal(3, ((1, 0, 0),))
    Fs = [filtration.fixed_plus_adic(x, m3), filtration.adic(m3)]
    report = multiplicity.positivity_report(Fs)
    assert report.passed
    assert report.s == 1
    assert report.order == (1, 0)
    assert {a: e.value for a, e in report.report.coeffs.items()} == {
        (3, 0): 0,
        (2, 1): 0,
        (1, 2): 0,
        (0, 3): 1,
    }


@pytest.mark.slow
@given(st.integers(1, 2), primary_ideals(2, max_exp=2, max_extra=1))
@settings(max_examples=15, deadline=None)
def test_vanishing_against_random_adic_partners(k, I):
    assume(not I.is_unit)
    m2 = monomial.MonomialIdeal.maximal(2)
    fixed = monomial.MonomialIdeal(2, ((k, 0),))
    Fs = [filtration.fixed_plus_adic(fixed, m2), filtration.adic(I)]
    report = multiplicity.positivity_report(Fs)
    assert report.passed
    assert report.s == 1
    for alpha in ((2, 0), (1, 1)):
        assert abs(report.report.value(alpha)) <= multiplicity.ZERO_THRESHOLD


def test_vanishing_with_a_zero_multiplicity_filtration():
    Fs = [
        catalog.load_filtration("fixed_plus_adic"),
        catalog.load_filtration("maximal"),
    ]
    report = multiplicity.positivity_report(Fs)
    assert report.passed
    assert report.s == 1


@pytest.mark.slow
@pytest.mark.parametrize("name", ["maximal", "x2_y", "sqrt2", "weighted_1_2"])
def test_lemma_bound_found(name):
    report = okounkov.lemma1_search(catalog.load_filtration(name), 32)
    assert report.found


@pytest.mark.slow
def test_body_checks_on_pairs():
    maximal = catalog.load_filtration("maximal")
    pair = [maximal, catalog.load_filtration("x2_y")]
    report = okounkov.minkowski_checks(pair, (1, 0), (0, 1), cutoff=16)
    assert report.x1_status == "pass"
    degenerate = [catalog.load_filtration("fixed_plus_adic"), maximal]
    report = okounkov.minkowski_checks(degenerate, (1, 0), (0, 1), cutoff=16)
    assert report.x2_triggered
    assert report.volume_gap == Fraction(3, 2 * 16)
    assert report.volume_gap <= Fraction(2, 16)


def test_colength_oracle_on_random_ideals():
    rng = seeded(2024)
    for _ in range(500):
        I = random_primary_ideal(rng, rng.randint(1, 3))
        assert monomial.colength(I) == brute_colength(I)
