from wtforms import (
    Form,
    validators,
    FieldList,
    IntegerField,
    SelectField,
    StringField,
    ValidationError,
)

from mixedmult.utils import as_fraction

COMMANDS = [
    ("colength", "Colength of a product ideal"),
    ("multiplicity", "Multiplicity of each filtration"),
    ("mixed", "Mixed multiplicities"),
    ("okounkov", "Okounkov body checks"),
    ("verify", "Verification suites"),
    ("example1", "Two-component example"),
]

SUITES = ("positivity", "theorem1", "prop1", "lemma1", "minkowski", "expected")


def _increasing(form, field):
    values = [v for v in field.data if v is not None]
    if any(a >= b for a, b in zip(values, values[1:])):
        raise ValidationError("must be strictly increasing")


def _in_range(minimum, maximum=None):
    def check(form, field):
        if field.data is None:
            return
        if field.data < minimum or (maximum is not None and field.data > maximum):
            upper = "" if maximum is None else f" and at most {maximum}"
            raise ValidationError(f"must be at least {minimum}{upper}")

    return check


def _positive_fraction(form, field):
    if field.data in (None, ""):
        return
    try:
        value = as_fraction(str(field.data))
    except (ValueError, ZeroDivisionError) as err:
        raise ValidationError(f"not an exact rational: {field.data!r}") from err
    if value <= 0:
        raise ValidationError("must be positive")


class JobForm(Form):
    command = SelectField(
        label="Command",
        choices=COMMANDS,
        validators=[validators.DataRequired("Please provide a command.")],
    )
    backend = SelectField(
        label="Backend",
        choices=[
            ("direct", "Ladder of exact length ratios"),
            ("truncation-exact", "Exact from verified truncations"),
        ],
        default="direct",
    )
    format = SelectField(
        label="Output format",
        choices=[("json", "JSON"), ("csv", "CSV")],
        default="json",
    )

    level = IntegerField(
        label="Truncation level",
        default=8,
        validators=[_in_range(1, 256)],
    )
    check_bound = IntegerField(
        label="Period check bound",
        validators=[_in_range(1)],
    )
    i_bound = IntegerField(
        label="Lemma search bound",
        default=32,
        validators=[_in_range(1)],
    )
    ladder = FieldList(
        IntegerField("m", [validators.NumberRange(min=1)]),
        label="Ladder",
        validators=[_increasing],
    )
    levels = FieldList(
        IntegerField("a", [validators.NumberRange(min=1)]),
        label="Truncation levels",
        validators=[_increasing],
    )
    cutoffs = FieldList(
        IntegerField("N", [validators.NumberRange(min=1)]),
        label="Cutoffs",
        validators=[_increasing],
    )
    tolerance = StringField(label="Tolerance", validators=[_positive_fraction])
    volume_tolerance = StringField(
        label="Volume tolerance", validators=[_positive_fraction]
    )
    threshold = StringField(
        label="Zero threshold", default="1/1000", validators=[_positive_fraction]
    )

    def validate_ladder(self, field):
        if field.data and len(field.data) < 3:
            raise ValidationError("needs at least 3 values")


def form_errors(form):
    """Flatten form errors into 'field: message' diagnostics."""
    out = []
    for name, errors in sorted(form.errors.items()):
        for err in errors:
            if isinstance(err, list):
                out.extend(f"{name}: {e}" for e in err if e)
            else:
                out.append(f"{name}: {err}")
    return out
