"""Order-of-magnitude comparison of computed g, C0, C3, C6 with tabulated reference values."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .params import PhysicalParams, cavity_coupling, validate_perturbative
from .potential import coefficients
from .units import TWO_PI

__all__ = ["Table1Row", "TABLE1_QUANTITIES", "reference_rows", "parse_table1_rows",
           "emit_table1_crosscheck", "ratio_status", "flatten_report"]

TABLE1_QUANTITIES = ("g", "C0", "C3", "C6")
_DIMS = {"g": "frequency", "C0": "frequency", "C3": "C3", "C6": "C6"}
_REPORT_UNITS = {"g": "MHz", "C0": "MHz", "C3": "MHz*um3", "C6": "MHz*um6"}


@dataclass(frozen=True)
class Table1Row:
    """A parameter set plus optional reference values (internal units, keyed by quantity)."""

    label: str
    params: PhysicalParams
    reference: dict = field(default_factory=dict)


def ratio_status(computed: float, reference: float | None, low: float = 0.1, high: float = 10.0):
    """(ratio, status) with status PASS/FAIL, or NA when either side is zero or missing."""
    if reference is None or reference == 0 or computed == 0:
        return None, "NA"
    ratio = computed / reference
    return ratio, "PASS" if low <= ratio <= high else "FAIL"


def _row_values(p: PhysicalParams) -> dict:
    g = cavity_coupling(p, "a")
    if p.mu_a == 0 and p.mu_b == 0:
        return {"g": 0.0, "C0": 0.0, "C3": 0.0, "C6": 0.0}
    c = coefficients(p)
    return {"g": g, "C0": c.C0, "C3": c.C3, "C6": c.C6}


def emit_table1_crosscheck(rows, low: float = 0.1, high: float = 10.0, threshold: float = 10.0) -> dict:
    """Compute g and the C coefficients for each row and compare with its reference.

    ``rows`` holds :class:`Table1Row` or bare :class:`PhysicalParams`.  Values are
    reported as ordinary frequencies (MHz, MHz um^3, MHz um^6).  A row passes
    when every available ratio lies in [low, high]; rows without any
    comparable quantity are NA.
    """
    report = {"units": dict(_REPORT_UNITS), "band": [low, high], "rows": []}
    for i, row in enumerate(rows):
        if isinstance(row, PhysicalParams):
            row = Table1Row(f"row{i}", row)
        vals = _row_values(row.params)
        entry = {"label": row.label}
        statuses = []
        for q in TABLE1_QUANTITIES:
            entry[q] = vals[q] / TWO_PI
            ref = row.reference.get(q)
            ratio, status = ratio_status(vals[q], ref, low, high)
            entry[f"{q}_ref"] = None if ref is None else ref / TWO_PI
            entry[f"{q}_ratio"] = ratio
            entry[f"{q}_status"] = status
            statuses.append(status)
        gate = validate_perturbative(row.params, threshold=threshold)
        entry["delta_over_g"] = gate.ratios["delta/g"]
        entry["Delta_over_g"] = gate.ratios["Delta/g"]
        entry["perturbative"] = gate.passed
        if all(s == "NA" for s in statuses):
            entry["status"] = "NA"
        else:
            entry["status"] = "FAIL" if "FAIL" in statuses else "PASS"
        report["rows"].append(entry)
    return report


def parse_table1_rows(raw) -> list:
    """Rows from a scenario: ``[{"label", "params": {...}, "reference": {"g": "1.4e3 MHz", ...}}]``."""
    from .config import parse_params, parse_quantity

    if not isinstance(raw, list):
        raise ConfigError("expected a list", field="rows")
    out = []
    for i, item in enumerate(raw):
        pre = f"rows[{i}]"
        if not isinstance(item, dict) or "params" not in item:
            raise ConfigError("each row needs 'params'", field=pre)
        params = parse_params(item["params"], prefix=f"{pre}.params.")
        ref = {}
        for q, v in item.get("reference", {}).items():
            if q not in _DIMS:
                raise ConfigError("unknown quantity", field=f"{pre}.reference.{q}")
            ref[q] = parse_quantity(v, _DIMS[q], f"{pre}.reference.{q}")
        out.append(Table1Row(item.get("label", f"row{i}"), params, ref))
    return out


def reference_rows() -> list:
    """The three 87Rb nD5/2 rows with V = (lambda/2)^3 and their tabulated values."""
    mhz = TWO_PI
    ghz = TWO_PI * 1e3
    thz = TWO_PI * 1e6
    table = [
        ("5D5/2", 57 * thz, 14 * ghz, 2.4e4 * ghz, 10.0, (1.4e3, 1.3, 1e-3, 4e-10)),
        ("12D5/2", 1.7 * thz, 0.12 * ghz, 31 * ghz, 100.0, (12.3, 1.3e-2, 0.1, 3e-3)),
        ("35D5/2", 0.12 * thz, 0.01 * ghz, 1.5 * ghz, 560.0, (0.34, 3.8e-4, 0.35, 63.1)),
    ]
    rows = []
    for label, wd, d, D, mu, vals in table:
        p = PhysicalParams.from_detunings(wd, d, D, mu)
        rows.append(Table1Row(label, p, {q: v * mhz for q, v in zip(TABLE1_QUANTITIES, vals)}))
    return rows


def _finite(x):
    return x if x is None or math.isfinite(x) else None


def flatten_report(report: dict) -> list:
    """One flat dict per row with JSON-safe numbers (inf becomes None)."""
    return [{k: _finite(v) if isinstance(v, float) else v for k, v in r.items()} for r in report["rows"]]

