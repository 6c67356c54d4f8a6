"""
Row tables for CSV output.
"""
import mpmath

from mixedmult.utils import fraction_str, to_mpf, type_key


def _approx(value):
    return mpmath.nstr(to_mpf(value), 12)


def sequence_table(seq):
    """Rows (m, exact term, approximation) of a length-ratio sequence."""
    return [
        {"m": m, "term": fraction_str(t), "approx": _approx(t)} for m, t in seq
    ]


def coefficient_table(report):
    rows = []
    for alpha, est in report.coeffs.items():
        rows.append(
            {
                "type": type_key(alpha),
                "value": fraction_str(est.value),
                "approx": _approx(est.value),
                "exact": est.exact,
            }
        )
    return rows


def ladder_table(ladder):
    """
    One row per truncation level: every coefficient and its change from the
    previous level.
    """
    rows = []
    for a, report in ladder:
        row = {"level": a}
        for alpha, est in report.coeffs.items():
            key = type_key(alpha)
            row[f"e[{key}]"] = fraction_str(est.value)
            row[f"approx[{key}]"] = _approx(est.value)
            if report.difference is not None:
                row[f"delta[{key}]"] = fraction_str(report.difference[alpha])
            else:
                row[f"delta[{key}]"] = ""
        rows.append(row)
    return rows


def body_table(okb):
    """
    Plot-ready vertices of a plane body in boundary order

    Bodies of other dimensions are listed in lexicographic vertex order.
    """
    P = okb.body
    if P.is_empty:
        return []
    verts = P.frame.cycle if P.dim == 2 and P.frame.cycle else P.sorted_vertices()
    rows = []
    for k, v in enumerate(verts):
        row = {"index": k}
        for i, c in enumerate(v):
            row[f"x{i + 1}"] = _approx(c)
            row[f"x{i + 1}_exact"] = fraction_str(c)
        rows.append(row)
    return rows


def check_table(checks):
    return [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]
