"""JSON scenario files with explicit unit tags.

Every dimensional number is tagged, either as ``"14 GHz"`` or as
``{"value": 14, "unit": "GHz"}``; a bare number in a dimensional field is
rejected.  Ordinary-frequency tags (Hz ... THz) are converted with 2*pi.
Example::

    {
      "name": "demo",
      "params": {"omega_d": "57 THz", "delta": "14 GHz", "Delta": "24000 GHz",
                 "mu": "10 a0e", "mode_volume": "lambda_half_cubed"},
      "ramsey": {"p_d": 0.05, "N": 1000, "density": "0.35 um^-3",
                 "tau": {"start": "0 us", "stop": "20 us", "num": 201},
                 "realizations": 20, "seed": 1, "mode": "full"},
      "outputs": [{"kind": "ramsey", "path": "demo.csv"}]
    }
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, RydCavityError
from .params import PhysicalParams
from .potential import PotentialCoefficients, coefficients
from .ramsey.ensemble import RamseyConfig
from .units import to_internal

__all__ = ["Scenario", "OutputSpec", "load_scenario", "parse_scenario", "parse_quantity",
           "parse_params", "parse_coefficients", "parse_ramsey", "parse_tau", "OUTPUT_KINDS"]

OUTPUT_KINDS = ("coeffs", "potential", "spectrum", "ramsey", "ramsey-exact", "table1")
HALF_WAVELENGTH_TAG = "lambda_half_cubed"


@dataclass(frozen=True)
class OutputSpec:
    kind: str
    path: str
    options: dict = field(default_factory=dict)


@dataclass
class Scenario:
    name: str
    params: PhysicalParams | None
    coeffs: PotentialCoefficients
    ramsey: RamseyConfig | None
    outputs: list
    emit_format: str = "csv"
    raw: dict = field(default_factory=dict)
    digest: str = ""
    extra: dict = field(default_factory=dict)


def parse_quantity(value, dimension: str, name: str) -> float:
    """Tagged quantity to internal units; raises ConfigError naming ``name``."""
    if isinstance(value, bool) or isinstance(value, (int, float)):
        raise ConfigError("missing unit tag", field=name)
    if isinstance(value, str):
        parts = value.split(None, 1)
        if len(parts) != 2:
            raise ConfigError(f"expected '<number> <unit>', got {value!r}", field=name)
        number, unit = parts
    elif isinstance(value, dict):
        if "value" not in value or "unit" not in value:
            raise ConfigError("tagged quantity needs 'value' and 'unit'", field=name)
        number, unit = value["value"], value["unit"]
    else:
        raise ConfigError(f"cannot read quantity from {type(value).__name__}", field=name)
    try:
        number = float(number)
    except (TypeError, ValueError):
        raise ConfigError(f"not a number: {number!r}", field=name) from None
    if not math.isfinite(number):
        raise ConfigError("value must be finite", field=name)
    try:
        return to_internal(number, unit.strip(), dimension)
    except ConfigError as exc:
        raise ConfigError(str(exc), field=name) from None


def _plain(section: dict, key: str, kind=float, default=None, prefix=""):
    name = f"{prefix}{key}"
    if key not in section:
        if default is None:
            raise ConfigError("required field missing", field=name)
        return default
    v = section[key]
    if kind is int:
        if isinstance(v, bool) or not isinstance(v, int):
            if isinstance(v, float) and v.is_integer():
                return int(v)
            raise ConfigError(f"expected an integer, got {v!r}", field=name)
        return v
    if kind is str:
        if not isinstance(v, str):
            raise ConfigError(f"expected a string, got {v!r}", field=name)
        return v
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a dimensionless number, got {v!r}", field=name)
    return float(v)


def _check_keys(section: dict, allowed: set, prefix: str):
    for key in section:
        if key not in allowed:
            raise ConfigError("unknown field", field=f"{prefix}{key}")


def parse_params(sec: dict, prefix: str = "params.") -> PhysicalParams:
    """PhysicalParams from absolute level energies or from (delta, Delta)."""
    if not isinstance(sec, dict):
        raise ConfigError("expected an object", field=prefix.rstrip("."))
    _check_keys(sec, {"omega_d", "omega_p", "omega_cav", "delta", "Delta", "mu", "mu_a", "mu_b",
                      "mode_volume", "mode_amplitude", "omega_g"}, prefix)

    def q(key, dim):
        if key not in sec:
            raise ConfigError("required field missing", field=prefix + key)
        return parse_quantity(sec[key], dim, prefix + key)

    omega_d = q("omega_d", "frequency")
    if "mu" in sec:
        if "mu_a" in sec:
            raise ConfigError("give either mu or mu_a/mu_b", field=prefix + "mu")
        mu_a = q("mu", "dipole")
        mu_b = q("mu_b", "dipole") if "mu_b" in sec else mu_a
    else:
        mu_a = q("mu_a", "dipole")
        mu_b = q("mu_b", "dipole") if "mu_b" in sec else mu_a
    amp = _plain(sec, "mode_amplitude", default=1.0, prefix=prefix)
    omega_g = q("omega_g", "frequency") if "omega_g" in sec else 0.0
    relative = "delta" in sec or "Delta" in sec
    exact = None
    if relative:
        if "omega_cav" in sec or "omega_p" in sec:
            raise ConfigError("mixes detunings with absolute frequencies", field=prefix + "delta")
        delta, Delta = q("delta", "frequency"), q("Delta", "frequency")
        omega_cav = omega_d - delta
        omega_p = 2.0 * omega_d - Delta
        exact = (delta, Delta)
    else:
        omega_cav, omega_p = q("omega_cav", "frequency"), q("omega_p", "frequency")
    vol = sec.get("mode_volume", HALF_WAVELENGTH_TAG)
    try:
        if vol == HALF_WAVELENGTH_TAG:
            if not omega_cav > 0:
                raise ConfigError("cavity frequency must be positive", field=prefix + "mode_volume")
            from .units import UNITS
            V = UNITS.half_wavelength_volume(omega_cav)
        else:
            V = parse_quantity(vol, "volume", prefix + "mode_volume")
        return PhysicalParams(omega_d=omega_d, omega_p=omega_p, omega_cav=omega_cav, mu_a=mu_a,
                              mu_b=mu_b, mode_volume=V, mode_amplitude=amp, omega_g=omega_g,
                              exact_detunings=exact)
    except ConfigError:
        raise
    except RydCavityError as exc:
        raise ConfigError(str(exc), field=prefix.rstrip(".")) from None


def parse_coefficients(sec: dict, prefix: str = "coefficients.") -> PotentialCoefficients:
    if not isinstance(sec, dict):
        raise ConfigError("expected an object", field=prefix.rstrip("."))
    _check_keys(sec, {"C0", "C3", "C6"}, prefix)
    vals = {}
    for key, dim in (("C0", "frequency"), ("C3", "C3"), ("C6", "C6")):
        vals[key] = parse_quantity(sec[key], dim, prefix + key) if key in sec else 0.0
    return PotentialCoefficients(**vals)


def parse_tau(spec, coeffs: PotentialCoefficients | None = None, name: str = "ramsey.tau") -> np.ndarray:
    """tau grid from ``{start, stop, num}``, ``{values, unit}`` or ``{revivals: [k...]}``.

    Revival times are 2 pi k / C0 and need a nonzero C0.
    """
    if not isinstance(spec, dict):
        raise ConfigError("expected an object with start/stop/num, values or revivals", field=name)
    if "revivals" in spec:
        if coeffs is None or coeffs.C0 == 0:
            raise ConfigError("revival grid needs a nonzero C0", field=name)
        try:
            ks = np.asarray(spec["revivals"], dtype=float)
        except (TypeError, ValueError):
            raise ConfigError("revivals must be numbers", field=name + ".revivals") from None
        return 2.0 * math.pi * ks / abs(coeffs.C0)
    if "values" in spec:
        unit = spec.get("unit")
        if not isinstance(unit, str):
            raise ConfigError("missing unit tag", field=name + ".unit")
        try:
            return np.array([to_internal(float(v), unit, "time") for v in spec["values"]])
        except (TypeError, ValueError):
            raise ConfigError("values must be numbers", field=name + ".values") from None
    if {"start", "stop", "num"} <= set(spec):
        start = parse_quantity(spec["start"], "time", name + ".start")
        stop = parse_quantity(spec["stop"], "time", name + ".stop")
        num = _plain(spec, "num", int, prefix=name + ".")
        if num < 1:
            raise ConfigError("num must be >= 1", field=name + ".num")
        return np.linspace(start, stop, num)
    raise ConfigError("expected start/stop/num, values or revivals", field=name)


def parse_ramsey(sec: dict, coeffs: PotentialCoefficients, prefix: str = "ramsey.") -> RamseyConfig:
    if not isinstance(sec, dict):
        raise ConfigError("expected an object", field=prefix.rstrip("."))
    _check_keys(sec, {"p_d", "p_g", "N", "density", "blockade_radius", "tau", "realizations", "seed",
                      "mode", "probe", "workers"}, prefix)
    if "tau" not in sec:
        raise ConfigError("required field missing", field=prefix + "tau")
    kwargs = dict(
        p_d=_plain(sec, "p_d", prefix=prefix),
        N=_plain(sec, "N", int, prefix=prefix),
        density=parse_quantity(sec.get("density"), "density", prefix + "density")
        if "density" in sec else _plain(sec, "density", prefix=prefix),
        tau=tuple(parse_tau(sec["tau"], coeffs, prefix + "tau")),
        realizations=_plain(sec, "realizations", int, default=1, prefix=prefix),
        seed=_plain(sec, "seed", int, default=0, prefix=prefix),
        mode=_plain(sec, "mode", str, default="full", prefix=prefix),
        blockade_radius=parse_quantity(sec["blockade_radius"], "length", prefix + "blockade_radius")
        if "blockade_radius" in sec else 0.0,
        probe=_plain(sec, "probe", str, default="all", prefix=prefix),
        workers=_plain(sec, "workers", int, default=1, prefix=prefix),
    )
    if "p_g" in sec:
        kwargs["p_g"] = _plain(sec, "p_g", prefix=prefix)
    try:
        return RamseyConfig(**kwargs)
    except RydCavityError as exc:
        raise ConfigError(str(exc), field=prefix.rstrip(".")) from None


def _parse_outputs(raw, prefix="outputs"):
    if not isinstance(raw, list):
        raise ConfigError("expected a list", field=prefix)
    out = []
    for i, item in enumerate(raw):
        name = f"{prefix}[{i}]"
        if not isinstance(item, dict) or "kind" not in item or "path" not in item:
            raise ConfigError("each output needs 'kind' and 'path'", field=name)
        if item["kind"] not in OUTPUT_KINDS:
            raise ConfigError(f"kind must be one of {OUTPUT_KINDS}", field=name + ".kind")
        opts = {k: v for k, v in item.items() if k not in ("kind", "path")}
        out.append(OutputSpec(item["kind"], str(item["path"]), opts))
    return out


def parse_scenario(raw: dict) -> Scenario:
    """Validate a decoded scenario document."""
    if not isinstance(raw, dict):
        raise ConfigError("scenario must be a JSON object")
    _check_keys(raw, {"name", "params", "coefficients", "ramsey", "outputs", "format", "rows",
                      "description"}, "")
    name = raw.get("name", "scenario")
    has_p, has_c = "params" in raw, "coefficients" in raw
    params = None
    outputs = _parse_outputs(raw.get("outputs", []))
    rows = raw.get("rows")
    if has_p and has_c:
        raise ConfigError("give exactly one of params or coefficients", field="params")
    if has_p:
        params = parse_params(raw["params"])
        try:
            coeffs = coefficients(params)
        except RydCavityError as exc:
            raise ConfigError(str(exc), field="params") from None
    elif has_c:
        coeffs = parse_coefficients(raw["coefficients"])
    elif rows is not None:
        coeffs = PotentialCoefficients(0.0, 0.0, 0.0)
    else:
        raise ConfigError("give exactly one of params or coefficients", field="params")
    ramsey = parse_ramsey(raw["ramsey"], coeffs) if "ramsey" in raw else None
    fmt = raw.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("must be 'csv' or 'json'", field="format")
    extra = {}
    if rows is not None:
        from .crosscheck import parse_table1_rows
        extra["rows"] = parse_table1_rows(rows)
    digest = hashlib.sha256(json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()).hexdigest()
    return Scenario(name=name, params=params, coeffs=coeffs, ramsey=ramsey, outputs=outputs,
                    emit_format=fmt, raw=raw, digest=digest, extra=extra)


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file; JSON syntax errors become ConfigError."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return parse_scenario(raw)
