from mixedmult import components, filtration
from mixedmult.exceptions import ConfigError
from mixedmult.filtration import FiltrationSpec, SurdScalar
from mixedmult.monomial import MonomialIdeal

m2 = MonomialIdeal.maximal(2)
x2_y = MonomialIdeal(2, ((2, 0), (0, 1)))
x_only = MonomialIdeal(2, ((1, 0),))

# Named built-in filtrations, stored as specs so every lookup builds a
# filtration with a fresh memo table.
filtrations = {
    "maximal": FiltrationSpec.adic(m2),
    "x2_y": FiltrationSpec.adic(x2_y),
    "sqrt2": FiltrationSpec.rounded_valuation([1], SurdScalar.sqrt(2)),
    "fixed_plus_adic": FiltrationSpec.fixed_plus_adic(x_only, m2),
    "weighted_1_2": FiltrationSpec.rounded_valuation([1, 2], SurdScalar.rational(1)),
}

models = {
    "example1": components.example1_model,
}


def load_filtration(name):
    try:
        spec = filtrations[name]
    except KeyError as err:
        raise ConfigError(
            f"unknown catalog filtration {name!r}; known: {sorted(filtrations)}"
        ) from err
    return filtration.build(spec)


def load_model(name):
    try:
        return models[name]()
    except KeyError as err:
        raise ConfigError(
            f"unknown catalog model {name!r}; known: {sorted(models)}"
        ) from err


def load_filtration_entry(entry):
    """A filtration from a config entry: a catalog name or a spec mapping."""
    if isinstance(entry, str):
        return load_filtration(entry)
    if isinstance(entry, dict) and "catalog" in entry:
        return load_filtration(entry["catalog"])
    return filtration.build(filtration.spec_from_json(entry))


def load_model_entry(entry):
    if isinstance(entry, str):
        return load_model(entry)
    return components.model_from_json(entry)
