"""Command-line entry point: ``rydcavity <command> ...``.

Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical error.
Without ``--output`` results go to ``$RYDCAVITY_OUTPUT_DIR/<name>_<command>.<ext>``
when that variable is set and to stdout otherwise.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import traceback
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from . import io as rio
from .config import Scenario, load_scenario, parse_quantity
from .crosscheck import emit_table1_crosscheck, flatten_report, reference_rows
from .errors import ConfigError, RydCavityError
from .pairham import build_full, dressed_shift, eigenvalues_sym, perturbation_closed_form, perturbation_generic
from .params import cavity_coupling, validate_perturbative
from .potential import PotentialCoefficients, classify_regime, coefficients, crossover_radii, u_tilde
from .ramsey.analytic import contrast_all_to_all, contrast_asymptotic, free_space_contrast, gamma_continuum
from .ramsey.ensemble import MODES, RamseyConfig, g_exact, monte_carlo_contrast, sample_positions
from .units import UNITS

__all__ = ["main", "run_scenario", "build_parser", "OUTPUT_ENV"]

OUTPUT_ENV = "RYDCAVITY_OUTPUT_DIR"
EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
PRESETS = {"5D": 0, "12D": 1, "35D": 2}

RAMSEY_COLUMNS = [("tau", "us"), ("contrast", "1"), ("contrast_stderr", "1"), ("phase", "rad"),
                  ("re_G", "1"), ("im_G", "1")]


# ------------------------------------------------------------------ helpers --

def bundled_scenario(name: str) -> Path:
    """Path of a scenario shipped with the package (``fig4d.json``, ``table1_check.json``, ...)."""
    ref = resources.files("rydcavity") / "scenarios" / name
    return Path(str(ref))


def _load(args) -> Scenario:
    if getattr(args, "preset", None):
        row = reference_rows()[PRESETS[args.preset]]
        return Scenario(name=args.preset, params=row.params, coeffs=coefficients(row.params),
                        ramsey=None, outputs=[], digest=f"preset:{args.preset}")
    if not args.config:
        raise ConfigError("no configuration given (use --config or --preset)", field="config")
    path = Path(args.config)
    if not path.exists():
        candidate = bundled_scenario(args.config)
        if candidate.exists():
            path = candidate
    return load_scenario(path)


def _destination(args, scenario_name: str, command: str, ext: str) -> str:
    if args.output:
        return args.output
    out_dir = os.environ.get(OUTPUT_ENV)
    if out_dir:
        return str(Path(out_dir) / f"{scenario_name}_{command}.{ext}")
    return "-"


def _emit(args, name, command, fmt, columns=None, data=None, obj=None) -> str:
    if fmt == "json":
        text = rio.json_text(obj if obj is not None else {k: np.asarray(v).tolist() for k, v in data.items()})
    else:
        text = rio.csv_text(columns, data)
    dest = _destination(args, name, command, fmt)
    rio.write_text(dest, text)
    return dest


def _ramsey_from(args, sc: Scenario) -> RamseyConfig:
    cfg = sc.ramsey
    if cfg is None:
        raise ConfigError("scenario has no ramsey section", field="ramsey")
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "realizations", None) is not None:
        changes["realizations"] = args.realizations
    if getattr(args, "mode", None) is not None:
        changes["mode"] = args.mode
    if getattr(args, "workers", None) is not None:
        changes["workers"] = args.workers
    if getattr(args, "probe", None) is not None:
        changes["probe"] = args.probe
    if not changes:
        return cfg
    fields = {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
    fields.update(changes)
    try:
        return RamseyConfig(**fields)
    except RydCavityError as exc:
        raise ConfigError(str(exc), field="ramsey") from None


# ---------------------------------------------------------------- commands --

def coeffs_table(sc: Scenario) -> dict:
    c = sc.coeffs
    radii = crossover_radii(c)
    out = {"C0": c.C0, "C3": c.C3, "C6": c.C6, "eta": c.eta, "r0": radii.r0, "r1": radii.r1,
           "r2": radii.r2, "r2_star": radii.r2_star, "R": c.R if c.R is not None else math.nan}
    if sc.params is not None:
        p = sc.params
        out.update(g_a=cavity_coupling(p, "a"), g_b=cavity_coupling(p, "b"), delta=p.delta, Delta=p.Delta)
        rep = validate_perturbative(p)
        out["delta_over_g"] = rep.ratios["delta/g"]
        out["Delta_over_g"] = rep.ratios["Delta/g"]
        out["perturbative"] = rep.passed
    return out


_COEFF_UNITS = {"C0": "rad/us", "C3": "rad/us*um3", "C6": "rad/us*um6", "eta": "us/rad", "r0": "um",
                "r1": "um", "r2": "um", "r2_star": "um", "R": "um", "g_a": "rad/us", "g_b": "rad/us",
                "delta": "rad/us", "Delta": "rad/us", "delta_over_g": "1", "Delta_over_g": "1",
                "perturbative": "bool"}


def cmd_coeffs(args) -> int:
    sc = _load(args)
    tab = coeffs_table(sc)
    cols = [(k, _COEFF_UNITS[k]) for k in tab]
    _emit(args, sc.name, "coeffs", args.format, cols, {k: [v] for k, v in tab.items()}, tab)
    return EXIT_OK


def potential_table(c: PotentialCoefficients, r, theta=math.pi / 2, mode="isotropic") -> dict:
    radii = crossover_radii(c)
    U = np.atleast_1d(u_tilde(r, theta, c, mode))
    regimes = [classify_regime(c, float(x), radii) for x in np.atleast_1d(r)]
    return {"r": np.atleast_1d(r), "U": U, "regime": regimes}


def cmd_potential(args) -> int:
    sc = _load(args)
    rmin = parse_quantity(args.r_min, "length", "--r-min")
    rmax = parse_quantity(args.r_max, "length", "--r-max")
    if not 0 < rmin < rmax:
        raise ConfigError("need 0 < r-min < r-max", field="--r-min")
    r = np.geomspace(rmin, rmax, args.num)
    theta = parse_quantity(args.theta, "angle", "--theta")
    tab = potential_table(sc.coeffs, r, theta, args.angular_mode)
    cols = [("r", "um"), ("U", "rad/us"), ("regime", "label")]
    _emit(args, sc.name, "potential", args.format, cols, tab, {k: list(v) for k, v in tab.items()})
    return EXIT_OK


def spectrum_table(sc: Scenario, r: float) -> dict:
    p = sc.params
    if p is None:
        raise ConfigError("ham-spectrum needs physical params", field="params")
    U = p.mu_a * p.mu_b * UNITS.dipole_coupling / r**3
    J = p.mu_a**2 * UNITS.dipole_coupling / r**3
    ga, gb = cavity_coupling(p, "a"), cavity_coupling(p, "b")
    H = build_full(p, U, J, ga, gb, ga, gb)
    evals = eigenvalues_sym(H.matrix)
    shift, overlap = dressed_shift(H)
    gen = perturbation_generic(H)
    cf = perturbation_closed_form(p, U, J, ga, gb, ga, gb)
    return {"r": r, "U": U, "J": J, "eigenvalues": list(evals), "dd0_shift_exact": shift,
            "dd0_overlap": overlap, "dE2": cf.dE2, "dE3": cf.dE3, "dE4": cf.dE4,
            "dE_total": cf.dE_total, "dE_total_generic": gen.dE_total,
            "pair_interaction": cf.pair_interaction, "stark_shift": cf.stark_shift,
            "perturbative": validate_perturbative(p, U, J).passed}


def cmd_ham_spectrum(args) -> int:
    sc = _load(args)
    r = parse_quantity(args.r, "length", "--r")
    if not r > 0:
        raise ConfigError("must be positive", field="--r")
    tab = spectrum_table(sc, r)
    if args.format == "json":
        _emit(args, sc.name, "ham-spectrum", "json", obj=tab)
        return EXIT_OK
    flat = {k: [v] for k, v in tab.items() if k not in ("eigenvalues", "stark_shift")}
    flat["stark_shift_a"], flat["stark_shift_b"] = [tab["stark_shift"][0]], [tab["stark_shift"][1]]
    for i, e in enumerate(tab["eigenvalues"]):
        flat[f"E{i}"] = [e]
    cols = [(k, "um" if k == "r" else "1" if k in ("dd0_overlap", "perturbative") else "rad/us") for k in flat]
    _emit(args, sc.name, "ham-spectrum", "csv", cols, flat)
    return EXIT_OK


def series_table(series) -> dict:
    return {"tau": series.tau, "contrast": series.contrast, "contrast_stderr": series.contrast_stderr,
            "phase": series.phase, "re_G": series.G.real, "im_G": series.G.imag,
            "mean_contrast": series.mean_contrast, "phase_flag": series.phase_flags.astype(int)}


def revival_mask(tau, C0: float, tol: float = 1e-9):
    """1 where tau is a revival time 2 pi k / |C0| (k >= 1), the only points where the
    asymptotic contrast is validated; all zeros when C0 = 0."""
    tau = np.asarray(tau, dtype=float)
    if C0 == 0:
        return np.zeros(tau.size, dtype=int)
    k = tau * abs(C0) / (2.0 * math.pi)
    return ((np.abs(k - np.round(k)) <= tol * np.maximum(1.0, k)) & (np.round(k) >= 1)).astype(int)


def analytic_table(cfg: RamseyConfig, c: PotentialCoefficients, model: str) -> dict:
    """Analytic contrast on the config's tau grid for one of the closed-form models."""
    tau = np.asarray(cfg.tau)
    nan = np.full(tau.size, math.nan)
    kappa = c.kappa(cfg.density)
    if model == "all_to_all":
        con, ph = contrast_all_to_all(cfg.N, cfg.p_g, cfg.p_d, c.C0, tau)
        G = con * np.exp(1j * np.asarray(ph))
        return {"tau": tau, "contrast": con, "contrast_stderr": nan, "phase": ph, "re_G": G.real, "im_G": G.imag}
    if model == "asymptotic":
        con = contrast_asymptotic(tau, kappa, c.eta, cfg.p_d)
        return {"tau": tau, "contrast": con, "contrast_stderr": nan, "phase": nan, "re_G": nan, "im_G": nan}
    if model == "free_space":
        # only kappa * sqrt(eta) = 4 pi n sqrt(C6) / 3 enters, so no C3 is needed
        con = free_space_contrast(tau, 4.0 * math.pi * cfg.density / 3.0, c.C6, cfg.p_d)
        return {"tau": tau, "contrast": con, "contrast_stderr": nan, "phase": nan, "re_G": nan, "im_G": nan}
    if model == "continuum":
        Rs = cfg.sphere_radius
        w0 = c.C3 / Rs**3
        wB = math.inf if cfg.blockade_radius == 0 else c.C3 / cfg.blockade_radius**3
        gam = gamma_continuum(tau, w0, wB, c.eta, c.C0)
        base = cfg.p_g + cfg.p_d * np.atleast_1d(gam)
        G = base ** (cfg.N - 1)
        phase = np.unwrap((cfg.N - 1) * np.angle(base))
        return {"tau": tau, "contrast": np.abs(G), "contrast_stderr": nan, "phase": phase,
                "re_G": G.real, "im_G": G.imag}
    raise ConfigError(f"unknown model {model!r}", field="--model")


def cmd_ramsey_mc(args) -> int:
    sc = _load(args)
    cfg = _ramsey_from(args, sc)
    series = monte_carlo_contrast(cfg, sc.coeffs)
    tab = series_table(series)
    cols = RAMSEY_COLUMNS + [("mean_contrast", "1"), ("phase_flag", "bool")]
    _emit(args, sc.name, "ramsey-mc", args.format, cols, tab)
    return EXIT_OK


def cmd_ramsey_analytic(args) -> int:
    sc = _load(args)
    cfg = _ramsey_from(args, sc)
    tab = analytic_table(cfg, sc.coeffs, args.model)
    tab["at_revival"] = revival_mask(cfg.tau, sc.coeffs.C0)
    _emit(args, sc.name, "ramsey-analytic", args.format, RAMSEY_COLUMNS + [("at_revival", "bool")], tab)
    return EXIT_OK


def _read_positions(path) -> np.ndarray:
    try:
        pos = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except ValueError:
        pos = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if pos.shape[1] != 3:
        raise ConfigError("positions file needs three columns x,y,z in um", field="--positions")
    return pos


def cmd_ramsey_exact(args) -> int:
    sc = _load(args)
    cfg = _ramsey_from(args, sc)
    if args.positions:
        pos = _read_positions(args.positions)
    else:
        pos = sample_positions(cfg.N, cfg.density, cfg.seed, 0, cfg.blockade_radius,
                               center_first=cfg.probe == "center").positions
    tau = np.asarray(cfg.tau)
    G = np.atleast_1d(g_exact(pos, sc.coeffs, cfg.p_g, cfg.p_d, tau, cfg.mode, cfg.probe))
    tab = {"tau": tau, "contrast": np.abs(G), "contrast_stderr": np.zeros(tau.size),
           "phase": np.unwrap(np.angle(G)), "re_G": G.real, "im_G": G.imag}
    _emit(args, sc.name, "ramsey-exact", args.format, RAMSEY_COLUMNS, tab)
    return EXIT_OK



def table1_report(sc: Scenario | None = None) -> dict:
    rows = reference_rows() if sc is None or "rows" not in sc.extra else sc.extra["rows"]
    return emit_table1_crosscheck(rows)


def _table1_csv(report) -> tuple[list, dict]:
    flat = flatten_report(report)
    keys = list(flat[0].keys()) if flat else ["label"]
    data = {k: [row[k] if row[k] is not None else math.nan for row in flat] for k in keys}
    units = report["units"]
    cols = []
    for k in keys:
        if k in units:
            unit = units[k]
        elif k.endswith("_ref"):
            unit = units[k[:-4]]
        elif k == "label" or k.endswith("status"):
            unit = "label"
        else:
            unit = "1"
        cols.append((k, unit))
    return cols, data


def cmd_table1(args) -> int:
    sc = _load(args) if args.config else None
    report = table1_report(sc)
    name = sc.name if sc else "table1"
    if args.format == "json":
        _emit(args, name, "table1-check", "json", obj={"units": report["units"], "band": report["band"],
                                                        "rows": flatten_report(report)})
    else:
        cols, data = _table1_csv(report)
        _emit(args, name, "table1-check", "csv", cols, data)
    return EXIT_OK


def _output_dir(path: Path, base: Path) -> Path:
    return path if path.is_absolute() else base / path


def run_scenario(path, output_dir=None, seed=None) -> int:
    """Execute every declared output of a scenario and write ``<name>_manifest.json``.

    Relative output paths resolve against ``output_dir``, then
    ``$RYDCAVITY_OUTPUT_DIR``, then the current directory.
    """
    sc = load_scenario(path)
    base = Path(output_dir or os.environ.get(OUTPUT_ENV) or ".")
    cfg = sc.ramsey
    if cfg is not None and seed is not None:
        fields = {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
        fields["seed"] = seed
        cfg = RamseyConfig(**fields)
    written = {}
    for out in sc.outputs:
        dest = _output_dir(Path(out.path), base)
        fmt = out.options.get("format", sc.emit_format)
        if out.kind == "coeffs":
            tab = coeffs_table(sc)
            text = rio.json_text(tab) if fmt == "json" else rio.csv_text(
                [(k, _COEFF_UNITS[k]) for k in tab], {k: [v] for k, v in tab.items()})
        elif out.kind == "potential":
            rmin = parse_quantity(out.options.get("r_min", "0.1 um"), "length", "outputs.r_min")
            rmax = parse_quantity(out.options.get("r_max", "100 um"), "length", "outputs.r_max")
            r = np.geomspace(rmin, rmax, int(out.options.get("num", 200)))
            tab = potential_table(sc.coeffs, r)
            text = rio.json_text({k: list(v) for k, v in tab.items()}) if fmt == "json" else rio.csv_text(
                [("r", "um"), ("U", "rad/us"), ("regime", "label")], tab)
        elif out.kind == "spectrum":
            r = parse_quantity(out.options.get("r", "1 um"), "length", "outputs.r")
            text = rio.json_text(spectrum_table(sc, r))
        elif out.kind in ("ramsey", "ramsey-exact"):
            if cfg is None:
                raise ConfigError("output needs a ramsey section", field="ramsey")
            if out.kind == "ramsey":
                tab = series_table(monte_carlo_contrast(cfg, sc.coeffs))
                cols = RAMSEY_COLUMNS + [("mean_contrast", "1"), ("phase_flag", "bool")]
            else:
                pos = sample_positions(cfg.N, cfg.density, cfg.seed, 0, cfg.blockade_radius,
                                       center_first=cfg.probe == "center").positions
                G = np.atleast_1d(g_exact(pos, sc.coeffs, cfg.p_g, cfg.p_d, np.asarray(cfg.tau),
                                          cfg.mode, cfg.probe))
                tab = {"tau": np.asarray(cfg.tau), "contrast": np.abs(G), "contrast_stderr": np.zeros(G.size),
                       "phase": np.unwrap(np.angle(G)), "re_G": G.real, "im_G": G.imag}
                cols = list(RAMSEY_COLUMNS)
            for model in out.options.get("analytic", []):
                tab[f"{model}_contrast"] = analytic_table(cfg, sc.coeffs, model)["contrast"]
                cols.append((f"{model}_contrast", "1"))
            if "asymptotic" in out.options.get("analytic", []):
                tab["at_revival"] = revival_mask(cfg.tau, sc.coeffs.C0)
                cols.append(("at_revival", "bool"))
            text = rio.json_text({k: np.asarray(v).tolist() for k, v in tab.items()}) if fmt == "json" \
                else rio.csv_text(cols, tab)
        elif out.kind == "table1":
            report = table1_report(sc)
            if fmt == "json":
                text = rio.json_text({"units": report["units"], "band": report["band"],
                                      "rows": flatten_report(report)})
            else:
                text = rio.csv_text(*_table1_csv(report))
        else:  # pragma: no cover - rejected at parse time
            raise ConfigError("unknown output kind", field="outputs")
        written[str(out.path)] = rio.write_text(dest, text)
    man = rio.manifest(sc.digest, None if cfg is None else cfg.seed, written)
    man["scenario"] = sc.name
    rio.write_text(base / f"{sc.name}_manifest.json", rio.json_text(man))
    return EXIT_OK


def cmd_run(args) -> int:
    path = Path(args.scenario)
    if not path.exists():
        candidate = bundled_scenario(args.scenario)
        if candidate.exists():
            path = candidate
    return run_scenario(path, args.output_dir, args.seed)


# ------------------------------------------------------------------ parser --

def _common(p, fmt="csv", preset=True):
    p.add_argument("--config", "-c", help="scenario JSON (a bundled name such as fig4d.json also works)")
    if preset:
        p.add_argument("--preset", choices=sorted(PRESETS), help="use a built-in 87Rb nD5/2 parameter set")
    p.add_argument("--output", "-o", help="output file ('-' for stdout); default from $%s" % OUTPUT_ENV)
    p.add_argument("--format", choices=("csv", "json"), default=fmt, help="output format (default %(default)s)")


def _ramsey_flags(p):
    p.add_argument("--seed", type=int, help="override the 64-bit seed")
    p.add_argument("--realizations", type=int, help="override the number of realizations")
    p.add_argument("--mode", choices=MODES, help="interaction terms to keep")
    p.add_argument("--probe", choices=("all", "center"), help="average over all atoms or use a central probe")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rydcavity",
        description="Cavity-mediated Rydberg pair interactions and Ramsey contrast.",
        epilog=f"Exit codes: 0 ok, 1 I/O, 2 config, 3 numerical. Default output dir: ${OUTPUT_ENV}.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="couplings, C0/C3/C6 and crossover radii")
    _common(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("potential", help="U~(r) on a log-spaced grid with regime labels")
    _common(p)
    p.add_argument("--r-min", default="0.1 um", help="smallest distance, tagged (default %(default)s)")
    p.add_argument("--r-max", default="100 um", help="largest distance, tagged (default %(default)s)")
    p.add_argument("--num", type=int, default=200, help="grid points (default %(default)s)")
    p.add_argument("--theta", default="90 deg", help="dipole angle for --angular-mode angular")
    p.add_argument("--angular-mode", choices=("isotropic", "angular"), default="isotropic")
    p.set_defaults(func=cmd_potential)

    p = sub.add_parser("ham-spectrum", help="two-atom spectrum and perturbative shifts at distance r")
    _common(p)
    p.add_argument("--r", default="1 um", help="pair distance, tagged (default %(default)s)")
    p.set_defaults(func=cmd_ham_spectrum)

    p = sub.add_parser("ramsey-mc", help="Monte-Carlo ensemble contrast")
    _common(p, preset=False)
    _ramsey_flags(p)
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    p.set_defaults(func=cmd_ramsey_mc)

    p = sub.add_parser("ramsey-analytic", help="closed-form contrast models")
    _common(p, preset=False)
    _ramsey_flags(p)
    p.add_argument("--model", choices=("asymptotic", "free_space", "all_to_all", "continuum"),
                   default="asymptotic", help="analytic model (default %(default)s)")
    p.set_defaults(func=cmd_ramsey_analytic)

    p = sub.add_parser("ramsey-exact", help="exact pair product for one set of positions")
    _common(p, preset=False)
    _ramsey_flags(p)
    p.add_argument("--positions", help="CSV of x,y,z in um; default: one sampled realization")
    p.set_defaults(func=cmd_ramsey_exact)

    p = sub.add_parser("table1-check", help="compare computed g, C0, C3, C6 with reference rows")
    _common(p, fmt="json", preset=False)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("run", help="execute a scenario file and write its manifest")
    p.add_argument("scenario", help="scenario JSON or bundled scenario name")
    p.add_argument("--output-dir", help=f"base directory for outputs (default ${OUTPUT_ENV} or .)")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.set_defaults(func=cmd_run)
    return ap


def _origin(exc) -> str:
    """Innermost package module on the traceback of ``exc``."""
    where = "rydcavity"
    for frame in traceback.extract_tb(exc.__traceback__):
        parts = Path(frame.filename).with_suffix("").parts
        if "rydcavity" in parts:
            where = ".".join(parts[parts.index("rydcavity"):])
    return where


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RydCavityError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical error in {_origin(exc)}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
