"""Command-line front end: SNR sweeps, parameter optimization, Monte Carlo
validation, figure-data reproduction.

Outputs are deterministic: identical command lines (including the seed)
produce byte-identical CSV and JSON files. Rows are sorted before writing so
worker scheduling can never change bytes. The environment variable
``UOFDM_THREADS`` caps the sweep worker pool.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from uofdm import __version__, optim, rates, sim
from uofdm.core import (
    ACO,
    ADO,
    ASCO,
    DCO,
    EU_OFDM,
    FDM_UOFDM,
    FLIP,
    HACO,
    PAM_DMT,
    PM,
    SCHEMES,
    ChannelSpec,
    ParameterError,
    SchemeConfig,
    snr_db_to_channel,
)
from uofdm.optim import NotFoundError

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_VALIDATION = 3

_ALIASES = {
    "pam-dmt": PAM_DMT,
    "pam": PAM_DMT,
    "fdm": FDM_UOFDM,
    "fdm-uofdm": FDM_UOFDM,
    "eu": EU_OFDM,
    "eu-ofdm": EU_OFDM,
}


@dataclass(frozen=True)
class SweepSpec:
    """An SNR grid plus the scheme templates swept over it."""

    snr_db_start: float
    snr_db_stop: float
    snr_db_step: float
    schemes: tuple[str, ...]
    optimize: bool = False

    def grid(self) -> np.ndarray:
        if self.snr_db_step <= 0:
            raise ParameterError("SNR step must be positive")
        if self.snr_db_start > self.snr_db_stop:
            raise ParameterError("SNR start must not exceed stop")
        if not self.schemes:
            raise ParameterError("at least one scheme is required")
        count = int(round((self.snr_db_stop - self.snr_db_start) / self.snr_db_step)) + 1
        return self.snr_db_start + self.snr_db_step * np.arange(count)


def _parse_snr_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ParameterError(f"--snr-db expects A:B:S, got {text!r}")
    return float(parts[0]), float(parts[1]), float(parts[2])


def _normalize_scheme(token: str) -> str:
    name = token.strip().lower().replace("-", "_")
    name = _ALIASES.get(token.strip().lower(), name)
    if name not in SCHEMES:
        raise ParameterError(f"unknown scheme {token!r}")
    return name


def _threads() -> int:
    raw = os.environ.get("UOFDM_THREADS", "")
    try:
        cap = int(raw) if raw else 0
    except ValueError:
        cap = 0
    return max(1, min(cap, os.cpu_count() or 1)) if cap else 1


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, columns, rows, command, seed):
    with open(path, "w", newline="") as fh:
        fh.write(f"# uofdm {__version__} | command: {command} | seed: {seed}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _json_num(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return value


def _print_json(payload):
    print(json.dumps(payload, indent=2, sort_keys=True))


def _compact_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Per-scheme evaluation shared by `rates` and the figure builders
# ---------------------------------------------------------------------------


def _fixed_params(scheme: str, args) -> dict:
    if scheme == DCO:
        if args.nu is None:
            raise ParameterError("dco without --optimize requires --nu")
        return {"nu": args.nu}
    if scheme == ADO:
        if args.nu is None or args.lam is None:
            raise ParameterError("ado without --optimize requires --lambda and --nu")
        return {"lam": args.lam, "nu": args.nu}
    if scheme in (HACO, ASCO):
        if args.lam is None:
            raise ParameterError(f"{scheme} without --optimize requires --lambda")
        return {"lam": args.lam}
    if scheme in (FDM_UOFDM, EU_OFDM):
        return {"lambdas": list(_allocation(args, args.layers))}
    return {}


def _allocation(args, layers: int) -> tuple[float, ...]:
    alloc = args.alloc or "geometric"
    if alloc == "geometric":
        return rates.geometric_allocation(layers, fill_last=True)
    if alloc == "equal":
        return rates.equal_allocation(layers)
    if alloc.startswith("custom="):
        vals = tuple(float(v) for v in alloc[len("custom=") :].split(","))
        return vals
    if alloc == "optimize":
        raise ParameterError("alloc=optimize is handled by --optimize")
    raise ParameterError(f"unknown allocation {alloc!r}")


def _eval_point(scheme: str, ch: ChannelSpec, args) -> tuple[dict, rates.RateBreakdown]:
    free = {"dco", "ado", "haco", "asco", "fdm_uofdm", "eu_ofdm"}
    optimize = args.optimize or (args.alloc == "optimize" and scheme in (FDM_UOFDM, EU_OFDM))
    if optimize and scheme in free:
        layers = args.layers if scheme in (FDM_UOFDM, EU_OFDM) else None
        res = optim.optimize_scheme(scheme, ch, layers=layers)
        params = res.params
    else:
        params = _fixed_params(scheme, args)
    cfg = SchemeConfig(scheme, **{k: (tuple(v) if k == "lambdas" else v) for k, v in params.items()})
    return params, rates.scheme_rate(cfg, ch)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_rates(args, command: str) -> int:
    start, stop, step = _parse_snr_range(args.snr_db)
    schemes = tuple(_normalize_scheme(t) for t in args.scheme.split(","))
    sweep = SweepSpec(start, stop, step, schemes, optimize=args.optimize)
    grid = sweep.grid()

    def point(snr_db):
        ch = snr_db_to_channel(float(snr_db))
        out = []
        for scheme in sweep.schemes:
            params, breakdown = _eval_point(scheme, ch, args)
            out.append(
                (
                    float(snr_db),
                    scheme,
                    _compact_json(params),
                    breakdown.total,
                    _compact_json(list(breakdown.per_component)),
                )
            )
        if args.bounds:
            lower, upper = rates.capacity_bounds(ch)
            out.append((float(snr_db), "cap_lb", "{}", lower, _compact_json([lower])))
            out.append((float(snr_db), "cap_ub", "{}", upper, _compact_json([upper])))
        return out

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        chunks = list(pool.map(point, grid))
    rows = sorted((r for chunk in chunks for r in chunk), key=lambda r: (r[0], r[1]))
    _write_csv(
        args.out,
        ["snr_db", "scheme", "param_json", "rate_bits", "component_rates_json"],
        rows,
        command,
        args.seed,
    )
    return EXIT_OK


def cmd_optimize(args) -> int:
    scheme = _normalize_scheme(args.scheme)
    ch = snr_db_to_channel(args.snr_db)
    layers = args.layers if scheme in (FDM_UOFDM, EU_OFDM) else None
    res = optim.optimize_scheme(scheme, ch, layers=layers)
    _print_json(
        {
            "scheme": scheme,
            "snr_db": args.snr_db,
            "params": res.params,
            "rate_bits": res.rate,
            "evaluations": res.evaluations,
        }
    )
    return EXIT_OK


def _build_config(scheme: str, args, ch: ChannelSpec) -> SchemeConfig:
    if scheme == DCO:
        nu = args.nu if args.nu is not None else optim.optimize_dco(ch).params["nu"]
        return SchemeConfig.dco(nu)
    if scheme == ADO:
        if args.nu is not None and args.lam is not None:
            return SchemeConfig.ado(args.lam, args.nu)
        res = optim.optimize_ado(ch)
        return SchemeConfig.ado(
            args.lam if args.lam is not None else res.params["lam"],
            args.nu if args.nu is not None else res.params["nu"],
        )
    if scheme in (HACO, ASCO):
        lam = args.lam if args.lam is not None else optim.optimize_double_lambda(ch).params["lam"]
        return SchemeConfig(scheme, lam=lam)
    if scheme in (FDM_UOFDM, EU_OFDM):
        return SchemeConfig(scheme, lambdas=_allocation(args, args.layers))
    return SchemeConfig(scheme)


def cmd_validate(args) -> int:
    scheme = _normalize_scheme(args.scheme)
    ch = snr_db_to_channel(args.snr_db)
    params = sim.SimParams(n=args.n, frames=args.frames, seed=args.seed)
    cfg = _build_config(scheme, args, ch)
    report = sim.validation_report(cfg, ch, params)
    payload = dict(report)
    payload["checks"] = [
        {
            "name": c.name,
            "predicted": _json_num(c.predicted),
            "estimated": _json_num(c.estimated),
            "tolerance": c.tolerance,
            "kind": c.kind,
            "stderr": _json_num(c.stderr),
            "passed": c.passed,
        }
        for c in report["checks"]
    ]
    _print_json(payload)
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def cmd_constants() -> int:
    consts = rates.asymptotic_constants()
    lines = [f'  "{k}": {consts[k]:.10g}' for k in sorted(consts)]
    print("{\n" + ",\n".join(lines) + "\n}")
    return EXIT_OK


def cmd_figure(args, command: str) -> int:
    from uofdm import figures

    manifest = figures.emit(args.id, args.out_dir, args, command)
    if not args.no_plot:
        from uofdm import plotting

        plotting.render_figure(manifest, args.out_dir)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    p.add_argument("--config", type=str, default=None, help="JSON file with option defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uofdm",
        description=(
            "Information rates of unipolar OFDM schemes on the Gaussian optical "
            "intensity channel under an average power constraint. Optical SNR "
            "convention: dB = 10*log10(eps/sigma_z); rates are in bits per "
            "time-domain channel use."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rates", help="sweep closed-form rates over an SNR grid to CSV")
    p.add_argument("--snr-db", type=str, default=None, help="grid as start:stop:step (dB)")
    p.add_argument("--scheme", type=str, default=None, help="comma-separated scheme names")
    p.add_argument("--optimize", action="store_true", help="re-optimize free parameters per point")
    p.add_argument("--bounds", action="store_true", help="append capacity bound pseudo-schemes")
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--layers", type=int, default=None)
    p.add_argument("--alloc", type=str, default=None, help="geometric|equal|optimize|custom=a,b,...")
    p.add_argument("--out", type=str, default=None, help="output CSV path")
    _add_common(p)

    p = sub.add_parser("optimize", help="optimize a scheme's free parameters at one SNR")
    p.add_argument("--scheme", type=str, required=True)
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--layers", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("validate", help="Monte Carlo validation of the analytic predictions")
    p.add_argument("--scheme", type=str, required=True)
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--layers", type=int, default=None)
    p.add_argument("--alloc", type=str, default=None)
    _add_common(p)

    p = sub.add_parser("figure", help="emit plot-ready CSV data (and a rendered PNG) for a report figure")
    p.add_argument("--id", type=int, required=True, choices=range(1, 10))
    p.add_argument("--out-dir", type=str, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--no-plot", action="store_true", help="skip PNG rendering")
    _add_common(p)

    sub.add_parser("constants", help="print the named asymptotic constants as JSON")

    return parser


_CONFIG_KEYS = ("snr_db", "scheme", "nu", "lam", "layers", "alloc", "out", "n", "frames", "seed")

_DEFAULTS = {"layers": 4, "n": 256, "frames": 10000, "seed": 0}


def _apply_config(args):
    config = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            config = json.load(fh)
    for key in _CONFIG_KEYS:
        if not hasattr(args, key):
            continue
        if getattr(args, key) is None and key in config:
            setattr(args, key, config[key])
    for key, value in _DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    command = "uofdm " + " ".join(argv)
    try:
        args = _apply_config(args)
        if args.command == "rates":
            if args.snr_db is None or args.scheme is None or args.out is None:
                raise ParameterError("rates requires --snr-db, --scheme and --out")
            return cmd_rates(args, command)
        if args.command == "optimize":
            return cmd_optimize(args)
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "figure":
            return cmd_figure(args, command)
        if args.command == "constants":
            return cmd_constants()
        raise ParameterError(f"unknown command {args.command!r}")
    except (ParameterError, NotFoundError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER


if __name__ == "__main__":
    raise SystemExit(main())
