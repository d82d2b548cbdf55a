"""Plot-ready CSV tables with a ``#``-prefixed provenance header.

Column layouts are fixed:

* variance curves: ``protocol,n,n_p,variance``
* scaling points: ``protocol,n,repetitions,measurements``
* error budgets: ``n,source,fraction``
"""

from __future__ import annotations

import csv
import io
import json

VARIANCE_COLUMNS = ("protocol", "n", "n_p", "variance")
SCALING_COLUMNS = ("protocol", "n", "repetitions", "measurements")
BUDGET_COLUMNS = ("n", "source", "fraction")


def _fmt(value) -> str:
    # repr keeps full float precision, so tables roundtrip bit-for-bit
    return repr(float(value)) if isinstance(value, float) else str(value)


def render_table(columns, rows, header: dict | None = None) -> str:
    out = io.StringIO()
    for key, value in (header or {}).items():
        out.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row {row!r} does not match columns {columns}")
        writer.writerow([_fmt(v) for v in row])
    return out.getvalue()


def read_table(text: str) -> tuple[dict, list[dict]]:
    """Parse a table written by :func:`render_table` into (header, rows as dicts)."""
    header = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            header[key] = json.loads(value)
        elif line:
            body.append(line)
    return header, list(csv.DictReader(body))


def variance_rows(points) -> list[tuple]:
    """Rows from scaling points (anything with ``protocol``, ``n`` and ``curve``)."""
    rows = []
    for p in points:
        rows += [(p.protocol, p.n, int(m), float(v)) for m, v in zip(p.curve.n_p, p.curve.variance)]
    return rows


def scaling_rows(points) -> list[tuple]:
    return [(p.protocol, p.n, p.repetitions, p.measurements) for p in points]


def budget_rows(budgets) -> list[tuple]:
    return [row for b in budgets for row in b.rows()]


def write_table(path, columns, rows, header=None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_table(columns, rows, header))
