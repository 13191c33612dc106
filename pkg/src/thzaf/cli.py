"""Command-line sweeps over the exact, asymptotic and Monte Carlo metrics.

Usage::

    thzaf op --config fig2.toml --sweep 100:170:29 --asymptotic --mc 1e6 --out op.csv

Every run writes a CSV (axis, exact, asymptotic, mc, mc_stderr) and, when
``--out`` names a file, a JSON sidecar next to it holding the fully
resolved parameter set.  Passing that sidecar back as ``--config``
reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .channel import ABSORPTION_ENV, AbsorptionTable, default_absorption_table, kappa_of_f
from .errors import ConvergenceError, ThzafError
from .mcsim import SimConfig, simulate
from .metrics import (
    ModulationCoeffs,
    asep,
    asep_asymptotic,
    capacity,
    capacity_asymptotic,
    outage,
    outage_asymptotic,
)
from .snrstats import build_model, link_config, snr_cdf, snr_mgf, snr_moment, snr_pdf

COMMANDS = ("op", "asep", "capacity", "pdf", "cdf", "mgf", "moment", "mc")
AXES = ("snr_db", "ratio_db", "frequency", "frequency_ghz")
COLUMNS = ("axis", "exact", "asymptotic", "mc", "mc_stderr")
_ASYMPTOTIC = {"op", "asep", "capacity"}

# defaults of the reference scenario; anything here can be overridden by config or flags
DEFAULTS: dict = {
    "link": {
        "frequency_ghz": 300.0,
        "d0": 1.0,
        "delta": 2.0,
        "R_M": 50.0,
        "topology": "1D",
        "gamma_bar_db": 120.0,
    },
    "fading": {"alpha": 3.0, "mu": 3.0, "m": 1.5},
    "misalignment": {"beta": 3.0},
    "metric": {
        "gamma_th_db": 0.0,
        "modulation": [1.0, 2.0],
        "moment_order": 1.0,
        "mgf_s": 1.0,
        "mc_metric": "op",
    },
    "quadrature": {"N": 30},
    "absorption": {"table": None},
    "sweep": {"axis": "snr_db", "start": 100.0, "stop": 160.0, "points": 13},
    "mc": {"samples": 0, "seed": 0, "workers": 1},
}


class ConfigError(Exception):
    """Bad configuration or command line; maps to exit status 1."""


class PointFailure(Exception):
    def __init__(self, axis_value: float, cause: Exception):
        super().__init__(f"{type(cause).__name__} at axis value {axis_value!r}: {cause}")
        self.axis_value = axis_value
        self.cause = cause


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"sweep axis must be one of {AXES}, got {self.axis!r}")
        if not self.start < self.stop:
            raise ConfigError(f"sweep start {self.start} must be below stop {self.stop}")
        if self.points < 2:
            raise ConfigError("a sweep needs at least 2 points")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


# --- configuration ---------------------------------------------------------------

def _merge(base: dict, extra: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        if key not in out:
            raise ConfigError(f"unknown config key {where}{key!r}")
        if isinstance(out[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"config key {where}{key!r} must be a table")
            out[key] = _merge(out[key], val, f"{where}{key}.")
        else:
            out[key] = val
    return out


def load_config(path: str | None) -> dict:
    """Read a TOML config (or a JSON sidecar) and merge it over the defaults."""
    if path is None:
        return copy.deepcopy(DEFAULTS)
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror}") from exc
    try:
        if p.suffix == ".json":
            data = json.loads(raw)
            data = data.get("params", data)
        else:
            data = tomllib.loads(raw.decode())
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {p}: {exc}") from exc
    cfg = _merge(DEFAULTS, data)
    table = cfg["absorption"]["table"]
    if table and not os.path.isabs(table):
        cfg["absorption"]["table"] = str((p.parent / table).resolve())
    return cfg


def _parse_sweep(text: str) -> tuple[float, float, int]:
    try:
        a, b, n = text.split(":")
        return float(a), float(b), int(float(n))
    except ValueError:
        raise ConfigError(f"--sweep expects start:stop:points, got {text!r}") from None


def _parse_count(text: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v != int(v) or v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return int(v)


def apply_overrides(cfg: dict, args: argparse.Namespace) -> dict:
    cfg = copy.deepcopy(cfg)
    flag_map = {
        "frequency_ghz": ("link", "frequency_ghz"),
        "d0": ("link", "d0"),
        "delta": ("link", "delta"),
        "R_M": ("link", "R_M"),
        "topology": ("link", "topology"),
        "gamma_bar_db": ("link", "gamma_bar_db"),
        "alpha": ("fading", "alpha"),
        "mu": ("fading", "mu"),
        "m": ("fading", "m"),
        "beta": ("misalignment", "beta"),
        "gamma_th_db": ("metric", "gamma_th_db"),
        "order": ("metric", "moment_order"),
        "s": ("metric", "mgf_s"),
        "metric": ("metric", "mc_metric"),
        "N": ("quadrature", "N"),
        "absorption_table": ("absorption", "table"),
        "axis": ("sweep", "axis"),
        "mc": ("mc", "samples"),
        "seed": ("mc", "seed"),
        "workers": ("mc", "workers"),
    }
    for attr, (sec, key) in flag_map.items():
        val = getattr(args, attr, None)
        if val is not None:
            cfg[sec][key] = val
    if args.modulation is not None:
        cfg["metric"]["modulation"] = list(args.modulation)
    if args.sweep is not None:
        a, b, n = _parse_sweep(args.sweep)
        cfg["sweep"].update(start=a, stop=b, points=n)
    tbl = cfg["absorption"]["table"]
    if tbl:
        cfg["absorption"]["table"] = str(Path(tbl).resolve())
    elif os.environ.get(ABSORPTION_ENV):
        # pin the env override into the echo so a replay does not depend on the environment
        cfg["absorption"]["table"] = str(Path(os.environ[ABSORPTION_ENV]).resolve())
    return cfg


def _load_table(cfg: dict) -> AbsorptionTable:
    path = cfg["absorption"]["table"]
    try:
        if path:
            if not Path(path).is_file():
                raise ConfigError(f"absorption table not found: {path}")
            return AbsorptionTable.from_csv(path)
        return default_absorption_table()
    except OSError as exc:
        raise ConfigError(f"absorption table not readable: {exc.filename or path}") from exc


# --- evaluation ------------------------------------------------------------------

def _model_at(cfg: dict, axis: str, x: float, table: AbsorptionTable):
    link, fad = cfg["link"], cfg["fading"]
    freq = link["frequency_ghz"] * 1e9
    gbar_db = link["gamma_bar_db"]
    if axis == "snr_db":
        gbar_db = x
    elif axis == "ratio_db":
        gbar_db = x + cfg["metric"]["gamma_th_db"]
    else:
        freq = x * 1e9
    config = link_config(
        fad["alpha"], fad["mu"], fad["m"], cfg["misalignment"]["beta"],
        link["delta"], link["R_M"], link["topology"],
        gamma_bar=10.0 ** (gbar_db / 10.0), frequency=freq, d0=link["d0"],
    )
    return build_model(config, N=int(cfg["quadrature"]["N"]), kappa=kappa_of_f(table, freq))


def _mc_kernel(command: str, cfg: dict, coeffs: ModulationCoeffs):
    met = cfg["metric"]
    g_th = 10.0 ** (met["gamma_th_db"] / 10.0)
    if command == "mc":
        command = met["mc_metric"]
    if command in ("op", "cdf"):
        return lambda g: (g < g_th).astype(float)
    if command == "asep":
        from scipy.special import erfc
        return lambda g: 0.5 * coeffs.a * erfc(np.sqrt(coeffs.b * g / 2.0))
    if command == "capacity":
        return lambda g: np.log1p(g) / math.log(2.0)
    if command == "mgf":
        return lambda g: np.exp(-met["mgf_s"] * g)
    if command == "moment":
        return lambda g: g ** met["moment_order"]
    return None


def evaluate_point(command: str, cfg: dict, x: float, table: AbsorptionTable, want_asym: bool) -> dict:
    """One CSV row.  Missing values are None."""
    model = _model_at(cfg, cfg["sweep"]["axis"], x, table)
    met = cfg["metric"]
    g_th = 10.0 ** (met["gamma_th_db"] / 10.0)
    coeffs = ModulationCoeffs(*met["modulation"])
    row = {"axis": x, "exact": None, "asymptotic": None, "mc": None, "mc_stderr": None}
    if command == "op":
        if want_asym:
            r = outage_asymptotic(model, g_th)
            row.update(exact=r.exact, asymptotic=r.asymptotic)
        else:
            row["exact"] = outage(model, g_th)
    elif command == "asep":
        if want_asym:
            r = asep_asymptotic(model, coeffs)
            row.update(exact=r.exact, asymptotic=r.asymptotic)
        else:
            row["exact"] = asep(model, coeffs)
    elif command == "capacity":
        row["exact"] = capacity(model)
        if want_asym:
            row["asymptotic"] = capacity_asymptotic(model)
    elif command == "pdf":
        row["exact"] = snr_pdf(model, g_th)
    elif command == "cdf":
        row["exact"] = snr_cdf(model, g_th)
    elif command == "mgf":
        row["exact"] = snr_mgf(model, met["mgf_s"])
    elif command == "moment":
        row["exact"] = snr_moment(model, met["moment_order"])

    mc = cfg["mc"]
    kernel = _mc_kernel(command, cfg, coeffs)
    if mc["samples"] and kernel is not None:
        batch = simulate(model, SimConfig(int(mc["samples"]), int(mc["seed"]), int(mc["workers"])))
        v = kernel(batch.snr)
        row["mc"] = float(v.mean())
        row["mc_stderr"] = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else None
    return row


def run_sweep(command: str, cfg: dict, want_asym: bool, jobs: int = 1) -> list[dict]:
    table = _load_table(cfg)
    sw = cfg["sweep"]
    spec = SweepSpec(sw["axis"], float(sw["start"]), float(sw["stop"]), int(sw["points"]))

    def one(x):
        try:
            return evaluate_point(command, cfg, float(x), table, want_asym)
        except ConvergenceError as exc:
            raise PointFailure(float(x), exc) from exc

    xs = spec.values()
    if jobs <= 1:
        rows = [one(x) for x in xs]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(one, xs))
    return sorted(rows, key=lambda r: r["axis"])


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in COLUMNS])
    return buf.getvalue()


def sidecar(command: str, cfg: dict, want_asym: bool) -> dict:
    return {"command": command, "asymptotic": want_asym, "version": __version__, "params": cfg}


# --- argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thzaf", description="THz link metrics over alpha-F fading.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"sweep the {name} surface")
        p.add_argument("--config", help="TOML config or JSON sidecar from an earlier run")
        p.add_argument("--sweep", help="start:stop:points")
        p.add_argument("--axis", choices=AXES)
        p.add_argument("--asymptotic", action="store_true", help="add the high-SNR asymptote column")
        p.add_argument("--mc", type=_parse_count, help="Monte Carlo samples per point (0 disables)")
        p.add_argument("--seed", type=_parse_count)
        p.add_argument("--workers", type=_parse_count, help="Monte Carlo worker substreams")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="concurrent sweep points")
        p.add_argument("--out", default="-", help="CSV path ('-' for stdout); sidecar goes next to it")
        g = p.add_argument_group("parameter overrides")
        g.add_argument("--frequency-ghz", dest="frequency_ghz", type=float)
        g.add_argument("--d0", type=float)
        g.add_argument("--delta", type=float)
        g.add_argument("--R-M", "--rm", dest="R_M", type=float)
        g.add_argument("--topology", choices=("1D", "2D", "3D"), type=str.upper)
        g.add_argument("--gamma-bar-db", dest="gamma_bar_db", type=float)
        g.add_argument("--alpha", type=float)
        g.add_argument("--mu", type=float)
        g.add_argument("-m", dest="m", type=float)
        g.add_argument("--beta", type=float)
        g.add_argument("--gamma-th-db", dest="gamma_th_db", type=float)
        g.add_argument("--modulation", nargs=2, type=float, metavar=("A", "B"))
        g.add_argument("--order", type=float, help="moment order n")
        g.add_argument("-s", dest="s", type=float, help="MGF argument (linear)")
        g.add_argument("--metric", choices=("op", "asep", "capacity"), help="metric estimated by 'mc'")
        g.add_argument("-N", dest="N", type=int, help="Gauss-Legendre order")
        g.add_argument("--absorption-table", dest="absorption_table")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cmd = args.command
    try:
        base = load_config(args.config)
        want_asym = bool(args.asymptotic)
        if args.config and args.config.endswith(".json"):
            echo = json.loads(Path(args.config).read_text())
            want_asym = want_asym or bool(echo.get("asymptotic", False))
        cfg = apply_overrides(base, args)
        if want_asym and cmd not in _ASYMPTOTIC:
            raise ConfigError(f"no asymptotic form for '{cmd}'; only {sorted(_ASYMPTOTIC)}")
        if cmd == "mc" and not cfg["mc"]["samples"]:
            raise ConfigError("'mc' needs a positive sample count (--mc N)")
        rows = run_sweep(cmd, cfg, want_asym, jobs=args.jobs)
    except ConfigError as exc:
        print(f"thzaf: error: {exc}", file=sys.stderr)
        return 1
    except PointFailure as exc:
        print(f"thzaf: convergence failure: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"thzaf: convergence failure: {exc}", file=sys.stderr)
        return 2
    except (ThzafError, ValueError, TypeError) as exc:
        print(f"thzaf: error: {exc}", file=sys.stderr)
        return 1

    text = render_csv(rows)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        out = Path(args.out)
        out.write_text(text)
        out.with_suffix(".json").write_text(json.dumps(sidecar(cmd, cfg, want_asym), indent=2, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
