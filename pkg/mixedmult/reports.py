"""
Deterministic JSON and CSV report files.
"""
import csv
import io
import json
import logging
from datetime import datetime, timezone

from mixedmult.exceptions import ConfigError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def envelope(command, payload, timestamp=True):
    report = {"schema_version": SCHEMA_VERSION, "command": command, "result": payload}
    if timestamp:
        report["generated"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return report


def dumps(report):
    """Stable serialization: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def loads(text):
    """
    Parse a report and check its schema version

    Raises
    ------
    ConfigError
        on malformed JSON or an unknown schema version
    """
    try:
        report = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"report is not valid JSON: {err}") from err
    if not isinstance(report, dict):
        raise ConfigError("report must be a JSON object")
    if report.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {report.get('schema_version')!r}"
        )
    for key in ("command", "result"):
        if key not in report:
            raise ConfigError(f"report is missing {key!r}")
    return report


def lod_to_dol(rows):
    """
    Converts a list of row dicts to a single dict of columns
    """
    if not rows:
        return {}
    keys = list(rows[0].keys())
    for row in rows[1:]:
        keys.extend(k for k in row if k not in keys)
    return {k: [row.get(k, "") for row in rows] for k in keys}


def dol_to_lod(columns):
    """
    Converts a dict of columns back to a list of row dicts
    """
    if not columns:
        return []
    length = len(next(iter(columns.values())))
    return [{k: v[i] for k, v in columns.items()} for i in range(length)]


def csv_text(rows):
    columns = lod_to_dol(rows)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def write(text, path):
    with open(path, "w", encoding="utf8", newline="") as f:
        f.write(text)
    logger.info("wrote %s", path)
