"""
Models with several d-dimensional monomial components.

Lengths are additive over the components of the completion, weighted by the
length of the module at each minimal prime, so G and every mixed
multiplicity of the model are the weighted sums of the per-component values.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

from mixedmult import filtration
from mixedmult.exceptions import ConfigError, DimensionMismatchError
from mixedmult.monomial import MonomialIdeal
from mixedmult.multiplicity import (
    DIRECT,
    DEFAULT_LADDER,
    TRUNCATION_EXACT,
    LimitEstimate,
    fit_mixed,
    g_evaluator,
    report_from_fit,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Component:
    weight: int
    filtrations: tuple

    def __post_init__(self):
        if self.weight < 1:
            raise ConfigError("component weights must be >= 1")
        if not self.filtrations:
            raise ConfigError("a component needs at least one filtration")

    @property
    def dim(self):
        return self.filtrations[0].dim


@dataclass(frozen=True)
class ComponentModel:
    """
    Components sharing the dimension d and the number r of filtrations

    Filtration j of every component is the image of the same global
    filtration on that component.
    """

    components: tuple

    def __post_init__(self):
        if not self.components:
            raise ConfigError("a model needs at least one component")
        d, r = self.dim, self.r
        for comp in self.components:
            if len(comp.filtrations) != r:
                raise ConfigError("components differ in their number of filtrations")
            for F in comp.filtrations:
                if F.dim != d:
                    raise DimensionMismatchError(d, F.dim)

    @property
    def dim(self):
        return self.components[0].dim

    @property
    def r(self):
        return len(self.components[0].filtrations)

    @property
    def single_component(self):
        return len(self.components) == 1

    def scaled(self, k):
        """The same model with every weight multiplied by k."""
        return ComponentModel(
            tuple(Component(c.weight * k, c.filtrations) for c in self.components)
        )

    def to_json(self):
        return {
            "components": [
                {
                    "weight": c.weight,
                    "filtrations": [F.spec.to_json() for F in c.filtrations],
                }
                for c in self.components
            ]
        }


def model_from_json(data):
    """
    Parse a component model

    Raises
    ------
    ConfigError
        on a malformed model or a filtration spec error
    """
    try:
        comps = data["components"]
    except (KeyError, TypeError) as err:
        raise ConfigError("component model needs a 'components' list") from err
    components = []
    for k, comp in enumerate(comps):
        try:
            weight = int(comp.get("weight", 1))
            specs = comp["filtrations"]
        except (KeyError, AttributeError, TypeError, ValueError) as err:
            raise ConfigError(f"component {k}: needs 'filtrations'") from err
        Fs = tuple(filtration.build(filtration.spec_from_json(s)) for s in specs)
        components.append(Component(weight, Fs))
    try:
        return ComponentModel(tuple(components))
    except DimensionMismatchError as err:
        raise ConfigError(str(err)) from err


def single(Fs, weight=1):
    """A one-component model."""
    return ComponentModel((Component(weight, tuple(Fs)),))


def example1_model():
    """
    Two plane components where I = m-adic on the first and (x) + m^n on the
    second, and J the other way round
    """
    m = MonomialIdeal.maximal(2)
    x = MonomialIdeal(2, ((1, 0),))
    first = (filtration.adic(m), filtration.fixed_plus_adic(x, m))
    second = (filtration.fixed_plus_adic(x, m), filtration.adic(m))
    return ComponentModel((Component(1, first), Component(1, second)))


def _evaluators(model, backend, level, ladder, check_bound):
    return [
        (c.weight, g_evaluator(c.filtrations, backend, level, ladder, check_bound))
        for c in model.components
    ]


def _combine(parts):
    values = list(parts)
    method = TRUNCATION_EXACT if all(est.exact for _, est in values) else DIRECT
    total = sum((w * est.value for w, est in values), Fraction(0))
    last = None
    if all(est.last_term is not None for _, est in values):
        last = sum((w * est.last_term for w, est in values), Fraction(0))
    return LimitEstimate(total, method, last, error_note="weighted component sum")


def component_G(
    model,
    n,
    backend=DIRECT,
    level=None,
    ladder=DEFAULT_LADDER,
    check_bound=None,
):
    """Weighted sum over the components of the per-component G(n)."""
    evaluators = _evaluators(model, backend, level, ladder, check_bound)
    return _combine((w, evaluate(tuple(n))) for w, evaluate in evaluators)


def component_parts(model, n, backend=DIRECT, ladder=DEFAULT_LADDER, **kwargs):
    """Per-component G(n) values, unweighted."""
    return [
        g_evaluator(c.filtrations, backend, ladder=ladder, **kwargs)(tuple(n))
        for c in model.components
    ]


def component_mixed(
    model,
    backend=DIRECT,
    level=None,
    ladder=DEFAULT_LADDER,
    check_bound=None,
    workers=None,
):
    """
    Mixed multiplicities of a component model

    Returns
    -------
    MixedMultiplicityReport
        exact when every component is evaluated with the exact backend
    """
    evaluators = _evaluators(model, backend, level, ladder, check_bound)

    def evaluate(n):
        return _combine((w, ev(n)) for w, ev in evaluators)

    logger.debug(
        "component model: %d components, r=%d, d=%d",
        len(model.components),
        model.r,
        model.dim,
    )
    evalues, samples = fit_mixed(evaluate, model.r, model.dim, workers)
    return report_from_fit(evalues, samples, model.r, model.dim, backend)


def restrict(model, indices):
    """The model keeping only the filtrations at ``indices`` on every component."""
    return ComponentModel(
        tuple(
            Component(c.weight, tuple(c.filtrations[j] for j in indices))
            for c in model.components
        )
    )
