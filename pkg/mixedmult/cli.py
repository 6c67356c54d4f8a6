"""
Config-driven command line front end.

A job is one JSON file naming a command, the model (a list of filtrations
or a component model) and the command's parameters. Parameters are layered:
built-in defaults, then the file, then an optional ``test_config`` mapping.
"""
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import click

from mixedmult import JobForm, catalog, components, monomial, reports, tables
from mixedmult.exceptions import ConfigError, MixedMultError
from mixedmult.multiplicity import (
    Check,
    length_sequence,
    minkowski_spot_checks,
    mixed_multiplicities,
    multiplicity,
    positivity_report,
    product_at,
    truncation_ladder,
)
from mixedmult.okounkov import (
    beta_for,
    body_of,
    lemma1_search,
    minkowski_checks,
    prop1_check,
    theorem1_ladder,
)
from mixedmult.utils import as_fraction, fraction_str, type_key

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFY = 2

DEFAULTS = {
    "backend": "direct",
    "level": 8,
    "ladder": [8, 16, 32],
    "levels": [1, 2, 4, 8],
    "cutoffs": [16, 32, 64],
    "check_bound": None,
    "i_bound": 32,
    "tolerance": None,
    "volume_tolerance": None,
    "threshold": "1/1000",
    "format": "json",
    "n": None,
    "sigma": None,
    "tau": None,
    "suites": ["positivity"],
    "expected": {},
}

FORM_KEYS = (
    "command",
    "backend",
    "format",
    "level",
    "check_bound",
    "i_bound",
    "ladder",
    "levels",
    "cutoffs",
    "tolerance",
    "volume_tolerance",
    "threshold",
)


class JobConfig(dict):
    """A dict with mapping-layering loaders."""

    def from_mapping(self, mapping=None, **kwargs):
        if mapping:
            self.update(mapping)
        self.update(kwargs)
        return True

    def from_file(self, path, silent=False):
        try:
            with open(path, encoding="utf8") as f:
                data = json.load(f)
        except OSError as err:
            if silent:
                return False
            raise ConfigError(f"unable to read config {path}: {err.strerror}") from err
        except json.JSONDecodeError as err:
            raise ConfigError(f"config {path} is not valid JSON: {err}") from err
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        return self.from_mapping(data)


def create_config(path=None, test_config=None):
    config = JobConfig()
    config.from_mapping(DEFAULTS)
    if path is not None:
        config.from_file(path)
    if test_config is not None:
        config.from_mapping(test_config)
    return config


def load_model(config):
    """
    The job's model as a ComponentModel

    ``model`` (catalog name or component JSON) wins over ``filtrations``;
    the example1 command falls back to the built-in model.
    """
    if config.get("model") is not None:
        return catalog.load_model_entry(config["model"])
    if config.get("filtrations"):
        entries = config["filtrations"]
        if not isinstance(entries, list):
            raise ConfigError("'filtrations' must be a list")
        Fs = [catalog.load_filtration_entry(e) for e in entries]
        dims = {F.dim for F in Fs}
        if len(dims) != 1:
            raise ConfigError(f"dimension mismatch across filtrations: {sorted(dims)}")
        return components.single(Fs)
    if config.get("command") == "example1":
        return catalog.load_model("example1")
    raise ConfigError("provide 'filtrations' or 'model'")


def _vector(config, key, r):
    value = config.get(key)
    if value is None:
        return None
    if not isinstance(value, list) or len(value) != r:
        raise ConfigError(f"{key} needs {r} nonnegative integers")
    if any(not isinstance(v, int) or v < 0 for v in value):
        raise ConfigError(f"{key} needs {r} nonnegative integers")
    return tuple(value)


def validate(config):
    """
    Schema and invariant diagnostics for a job; never computes anything
    beyond the first level of each filtration.
    """
    diagnostics = []
    form = JobForm.JobForm(data={k: config.get(k) for k in FORM_KEYS})
    if not form.validate():
        diagnostics.extend(JobForm.form_errors(form))
    suites = config.get("suites") or []
    unknown = [s for s in suites if s not in JobForm.SUITES]
    if unknown:
        diagnostics.append(f"suites: unknown {unknown}")
    try:
        model = load_model(config)
    except MixedMultError as err:
        diagnostics.append(f"model: {err}")
        return diagnostics
    for k, comp in enumerate(model.components):
        for j, F in enumerate(comp.filtrations):
            first = F.ideal_at(1)
            if not monomial.is_primary(first):
                diagnostics.append(f"component {k} filtration {j}: not m-primary")
    for key in ("n", "sigma", "tau"):
        try:
            _vector(config, key, model.r)
        except ConfigError as err:
            diagnostics.append(f"{key}: {err}")
    expected = config.get("expected") or {}
    for key, value in expected.items():
        try:
            as_fraction(str(value))
        except (ValueError, ZeroDivisionError):
            diagnostics.append(f"expected[{key}]: not an exact rational")
    return diagnostics


@dataclass
class Outcome:
    result: dict
    rows: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    @property
    def status(self):
        return EXIT_VERIFY if self.failures else EXIT_OK


def _backend_args(config, workers):
    return {
        "backend": config["backend"],
        "level": config["level"],
        "ladder": tuple(config["ladder"]),
        "check_bound": config["check_bound"],
        "workers": workers,
    }


def _fraction_or_none(value):
    return None if value in (None, "") else as_fraction(str(value))


def _only(model):
    if not model.single_component:
        raise ConfigError("this command needs a single-component model")
    return list(model.components[0].filtrations)


def run_colength(config, model, workers):
    Fs = _only(model)
    n = _vector(config, "n", len(Fs)) or (1,) * len(Fs)
    ideal = product_at(Fs, n)
    seq = length_sequence(Fs, n, config["ladder"])
    result = {
        "n": list(n),
        "ideal": str(ideal),
        "colength": monomial.colength(ideal),
        "covolume": fraction_str(monomial.covolume(ideal)),
        "sequence": [[m, fraction_str(t)] for m, t in seq],
    }
    return Outcome(result, tables.sequence_table(seq))


def run_multiplicity(config, model, workers):
    args = _backend_args(config, workers)
    results, rows = [], []
    for j, F in enumerate(_only(model)):
        seq = length_sequence([F], (1,), config["ladder"])
        estimate = multiplicity(F, **args)
        ladder = truncation_ladder([F], config["levels"], config["check_bound"])
        results.append(
            {
                "filtration": F.spec.to_json(),
                "multiplicity": estimate.to_json(),
                "sequence": [[m, fraction_str(t)] for m, t in seq],
                "truncation_ladder": [
                    {"level": a, "e": fraction_str(rep.value((F.dim,)))}
                    for a, rep in ladder
                ],
            }
        )
        for row in tables.ladder_table(ladder):
            rows.append({"filtration": j, **row})
    return Outcome({"filtrations": results}, rows)


def _mixed_report(model, args):
    if model.single_component:
        return mixed_multiplicities(list(model.components[0].filtrations), **args)
    return components.component_mixed(model, **args)


def run_mixed(config, model, workers):
    report = _mixed_report(model, _backend_args(config, workers))
    result = report.to_json()
    spot = minkowski_spot_checks(report)
    if spot:
        result["minkowski_spot_checks"] = [c.to_json() for c in spot]
    return Outcome(result, tables.coefficient_table(report))


def _theorem1_checks(ladder, j):
    last = ladder.rows[-1]
    allowed = max(Fraction(1, 100), Fraction(4, last.cutoff))
    return [
        Check(f"theorem1[{j}]-non-increasing", ladder.non_increasing),
        Check(
            f"theorem1[{j}]-agreement",
            last.discrepancy <= allowed,
            f"discrepancy {fraction_str(last.discrepancy)} vs {fraction_str(allowed)}",
        ),
    ]


def run_okounkov(config, model, workers):
    Fs = _only(model)
    cutoffs = config["cutoffs"]
    checks, per_filtration = [], []
    for j, F in enumerate(Fs):
        ladder = theorem1_ladder(F, cutoffs)
        checks.extend(_theorem1_checks(ladder, j))
        per_filtration.append(
            {"filtration": F.spec.to_json(), "theorem1": ladder.to_json()}
        )
    result = {"filtrations": per_filtration}
    sigma = _vector(config, "sigma", len(Fs))
    tau = _vector(config, "tau", len(Fs))
    if sigma is None:
        sigma = (1,) + (0,) * (len(Fs) - 1)
    beta = beta_for(Fs, sigma)
    okb = body_of(Fs, sigma, beta, cutoffs[-1], workers)
    result["body"] = okb.to_json()
    if tau is not None:
        report = minkowski_checks(
            Fs,
            sigma,
            tau,
            cutoff=cutoffs[0],
            tol=_fraction_or_none(config["tolerance"]),
            volume_tol=_fraction_or_none(config["volume_tolerance"]),
        )
        result["minkowski"] = report.to_json()
        checks.extend(report.checks)
    return Outcome(result, tables.body_table(okb), checks)


def _expected_checks(report, expected, threshold):
    checks = []
    for key, value in sorted(expected.items()):
        want = as_fraction(str(value))
        alpha = tuple(int(k) for k in key.split(","))
        if alpha not in report.coeffs:
            checks.append(Check(f"expected[{key}]", False, "no such coefficient"))
            continue
        est = report.coeffs[alpha]
        ok = est.value == want if est.exact else abs(est.value - want) <= threshold
        checks.append(
            Check(f"expected[{key}]", ok, f"got {est} want {fraction_str(want)}")
        )
    return checks


def _positivity(model, args, threshold):
    if model.single_component:
        Fs = list(model.components[0].filtrations)
        return positivity_report(Fs, threshold=threshold, **args)
    report = components.component_mixed(model, **args)
    singles = [
        components.component_mixed(components.restrict(model, [j]), **args).coeffs[
            (model.dim,)
        ]
        for j in range(model.r)
    ]
    return positivity_report(
        None, threshold, single_component=False, report=report, singles=singles
    )


def run_verify(config, model, workers):
    args = _backend_args(config, workers)
    threshold = as_fraction(str(config["threshold"]))
    suites = config.get("suites") or []
    result, checks = {}, []
    if "positivity" in suites:
        pos = _positivity(model, args, threshold)
        result["positivity"] = pos.to_json()
        checks.extend(pos.checks)
    if "expected" in suites:
        report = _mixed_report(model, args)
        result["mixed"] = report.to_json()
        checks.extend(_expected_checks(report, config["expected"], threshold))
    single = {"theorem1", "prop1", "lemma1", "minkowski"} & set(suites)
    Fs = _only(model) if single else []
    for j, F in enumerate(Fs):
        if "theorem1" in suites:
            ladder = theorem1_ladder(F, config["cutoffs"])
            result[f"theorem1[{j}]"] = ladder.to_json()
            checks.extend(_theorem1_checks(ladder, j))
        if "prop1" in suites:
            prop = prop1_check(
                F, config["cutoffs"][-1], _fraction_or_none(config["tolerance"])
            )
            result[f"prop1[{j}]"] = prop.to_json()
            checks.append(Check(f"prop1[{j}]", prop.passed))
        if "lemma1" in suites:
            lemma = lemma1_search(F, config["i_bound"])
            result[f"lemma1[{j}]"] = lemma.to_json()
            checks.append(Check(f"lemma1[{j}]", lemma.found, f"b={lemma.b}"))
    if "minkowski" in suites:
        sigma = _vector(config, "sigma", len(Fs))
        tau = _vector(config, "tau", len(Fs))
        if sigma is None or tau is None:
            raise ConfigError("the minkowski suite needs 'sigma' and 'tau'")
        report = minkowski_checks(
            Fs,
            sigma,
            tau,
            cutoff=config["cutoffs"][0],
            tol=_fraction_or_none(config["tolerance"]),
            volume_tol=_fraction_or_none(config["volume_tolerance"]),
        )
        result["minkowski"] = report.to_json()
        checks.extend(report.checks)
    result["checks"] = [c.to_json() for c in checks]
    return Outcome(result, tables.check_table(checks), checks)


def run_example1(config, model, workers):
    args = _backend_args(config, workers)
    report = components.component_mixed(model, **args)
    del args["workers"]
    points = {"1,0": (1, 0), "0,1": (0, 1), "1,1": (1, 1)}
    G = {
        key: components.component_G(model, n, **args).to_json()
        for key, n in points.items()
    }
    per_component = {
        key: [est.to_json() for est in components.component_parts(model, n, **args)]
        for key, n in points.items()
    }
    result = {
        "mixed": report.to_json(),
        "e": {type_key(a): fraction_str(est.value) for a, est in report.coeffs.items()},
        "G": G,
        "components": per_component,
    }
    return Outcome(result, tables.coefficient_table(report))


COMMANDS = {
    "colength": run_colength,
    "multiplicity": run_multiplicity,
    "mixed": run_mixed,
    "okounkov": run_okounkov,
    "verify": run_verify,
    "example1": run_example1,
}


def run(config, workers=None):
    """
    Execute a validated job

    Returns
    -------
    Outcome
        result payload, CSV rows and verification checks

    Raises
    ------
    MixedMultError
        on input errors found while computing
    """
    model = load_model(config)
    logger.info(
        "running %s on a %d-component model", config["command"], len(model.components)
    )
    return COMMANDS[config["command"]](config, model, workers)


def _configure_logging(verbose):
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@click.command("mixedmult")
@click.option(
    "--config", "config_path", required=True, type=click.Path(dir_okay=False)
)
@click.option("--out", type=click.Path(dir_okay=False), help="Write the report here.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default=None)
@click.option("--no-timestamp", is_flag=True, help="Omit the generation time.")
@click.option("--threads", type=click.IntRange(min=1), default=None)
@click.option("-v", "--verbose", count=True)
@click.option("--validate-only", is_flag=True, help="Check the config and stop.")
def main(config_path, out, fmt, no_timestamp, threads, verbose, validate_only):
    """Compute multiplicities of filtrations described by a JSON job file."""
    _configure_logging(verbose)
    try:
        config = create_config(config_path)
    except ConfigError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_INPUT)
    if fmt is not None:
        config["format"] = fmt
    diagnostics = validate(config)
    if diagnostics:
        for line in diagnostics:
            click.echo(f"error: {line}", err=True)
        sys.exit(EXIT_INPUT)
    if validate_only:
        click.echo("config OK")
        sys.exit(EXIT_OK)
    try:
        outcome = run(config, threads)
    except MixedMultError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_INPUT)
    if config["format"] == "csv":
        text = reports.csv_text(outcome.rows)
    else:
        payload = dict(outcome.result)
        report = reports.envelope(config["command"], payload, not no_timestamp)
        text = reports.dumps(report)
    if out:
        reports.write(text, out)
    else:
        click.echo(text, nl=False)
    for check in outcome.failures:
        message = f"verification failed: {check.name} {check.detail}"
        click.echo(message.rstrip(), err=True)
    sys.exit(outcome.status)


if __name__ == "__main__":
    main()
