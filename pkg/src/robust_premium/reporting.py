"""CSV / JSON serialisation of simulation reports and loss-file parsing."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, fields

from .montecarlo import Cell, SimulationReport

CSV_COLUMNS = ("n", "eps", "estimator", "k_star_mean", "bias", "rmse", "failures")


class InputError(ValueError):
    """A loss file that cannot be parsed; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _fmt(x: float) -> str:
    # 17 significant digits round-trip any double; %-formatting ignores locale
    return "%.17g" % x


def report_to_csv(report: SimulationReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for c in report.cells:
        writer.writerow([c.n, _fmt(c.eps), c.estimator, _fmt(c.k_star_mean), _fmt(c.bias),
                         _fmt(c.rmse), c.failures])
    return buf.getvalue()


def report_from_csv(text: str, replications: int) -> SimulationReport:
    rows = csv.DictReader(io.StringIO(text))
    cells = [
        Cell(int(r["n"]), float(r["eps"]), r["estimator"], float(r["k_star_mean"]),
             float(r["bias"]), float(r["rmse"]), int(r["failures"]), replications)
        for r in rows
    ]
    return SimulationReport(cells)


def _nan_to_none(x):
    return None if isinstance(x, float) and math.isnan(x) else x


def report_to_json(report: SimulationReport, meta: dict | None = None) -> str:
    payload = {
        "meta": meta or {},
        "cells": [{k: _nan_to_none(v) for k, v in asdict(c).items()} for c in report.cells],
    }
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def report_from_json(text: str) -> SimulationReport:
    payload = json.loads(text)
    cells = []
    for raw in payload["cells"]:
        kw = {}
        for f in fields(Cell):
            v = raw[f.name]
            kw[f.name] = math.nan if v is None else v
        kw["eps"] = float(kw["eps"])
        cells.append(Cell(**kw))
    return SimulationReport(cells)


def read_losses(text: str) -> list[float]:
    """One nonnegative loss per line; an optional header on the first line; blanks skipped."""
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            x = float(line)
        except ValueError:
            if lineno == 1 and not values:
                continue  # header
            raise InputError(f"not a number: {line!r}", lineno) from None
        if not math.isfinite(x):
            raise InputError(f"non-finite value {line!r}", lineno)
        if x < 0:
            raise InputError(f"negative loss {line!r}", lineno)
        values.append(x)
    if len(values) < 2:
        raise InputError(f"need at least 2 losses, found {len(values)}")
    return values
