"""Figure-data builders: each report figure is emitted as one CSV per curve
plus a JSON manifest describing the axes and the claim the data supports."""

from __future__ import annotations

import json
import math
import os

import numpy as np

from uofdm import optim, rates, sim
from uofdm.cli import _write_csv  # shared deterministic writer
from uofdm.core import ACO, ParameterError, SchemeConfig, snr_db_to_channel

__all__ = ["emit"]


def _grid(start, stop, step):
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)


def _curve_rows(snr_grid, fn):
    return [(float(db),) + tuple(fn(snr_db_to_channel(float(db)))) for db in snr_grid]


def emit(fig_id: int, out_dir: str, args, command: str) -> dict:
    builders = {
        1: _figure_1,
        2: _figure_2,
        3: _figure_3,
        4: _figure_4,
        5: _figure_5,
        6: _figure_6,
        7: _figure_7,
        8: _figure_8,
        9: _figure_9,
    }
    if fig_id not in builders:
        raise ParameterError(f"unknown figure id {fig_id}")
    os.makedirs(out_dir, exist_ok=True)
    manifest = builders[fig_id](out_dir, args, command)
    manifest["figure"] = fig_id
    path = os.path.join(out_dir, f"manifest_fig{fig_id}.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _emit_curves(out_dir, prefix, columns, curves, command, seed):
    files = []
    for label, rows in curves:
        name = f"{prefix}_{label}.csv"
        _write_csv(os.path.join(out_dir, name), columns, rows, command, seed)
        files.append({"file": name, "label": label, "columns": list(columns)})
    return files


def _figure_1(out_dir, args, command):
    snr = _grid(0.0, 30.0, 0.5)
    curves = [
        ("aco_family", _curve_rows(snr, lambda ch: (rates.rate_aco_family(ch), "{}"))),
        ("dco_opt", _curve_rows(snr, lambda ch: _opt_row(optim.optimize_dco(ch)))),
        ("ado_opt", _curve_rows(snr, lambda ch: _opt_row(optim.optimize_ado(ch)))),
        ("haco_opt", _curve_rows(snr, lambda ch: _opt_row(optim.optimize_double_lambda(ch)))),
        ("multi4_opt", _curve_rows(snr, lambda ch: _opt_row(optim.optimize_multi(ch, 4)))),
        ("cap_lb", _curve_rows(snr, lambda ch: (rates.capacity_bounds(ch)[0], "{}"))),
        ("cap_ub", _curve_rows(snr, lambda ch: (rates.capacity_bounds(ch)[1], "{}"))),
    ]
    files = _emit_curves(
        out_dir, "fig1", ["snr_db", "rate_bits", "param_json"], curves, command, args.seed
    )
    return {
        "title": "Information rates of the unipolar OFDM schemes vs optical SNR",
        "x": "snr_db",
        "y": "rate_bits",
        "files": files,
        "claims": [
            "below the crossover near 9 dB the quarter-DoF family beats the optimized DC-biased scheme",
            "double-component schemes match the quarter-DoF family at low SNR and beat it at high SNR",
            "optimized four-layer multiplexing tracks the capacity bounds closely over the sweep",
        ],
    }


def _opt_row(res):
    return (res.rate, json.dumps(res.params, sort_keys=True, separators=(",", ":")))


def _figure_2(out_dir, args, command):
    snr = _grid(0.0, 30.0, 3.0)
    frames = max(int(args.frames or 2000), 1000)
    curves = [
        ("asymptote", [(float(db), rates.rate_aco_family(snr_db_to_channel(float(db))), 0.0) for db in snr])
    ]
    for n in (64, 256, 1024):
        rows = []
        for db in snr:
            ch = snr_db_to_channel(float(db))
            est = sim.estimate_moments(
                SchemeConfig.aco(), ch, sim.SimParams(n=n, frames=frames, seed=args.seed)
            )
            snr_e = est.snr_e_hat["odd"]
            rate = 0.25 * math.log2(1.0 + snr_e)
            se = est.snr_e_se["odd"] / (4.0 * math.log(2.0) * (1.0 + snr_e))
            rows.append((float(db), rate, se))
        curves.append((f"measured_n{n}", rows))
    files = _emit_curves(
        out_dir, "fig2", ["snr_db", "rate_bits", "stderr"], curves, command, args.seed
    )
    return {
        "title": "Measured rate of the asymmetrically clipped scheme vs block size",
        "x": "snr_db",
        "y": "rate_bits",
        "files": files,
        "claims": [
            "the closed-form rate is accurate for practical block sizes (N >= 64 within 2 percent)",
        ],
    }


def _figure_3(out_dir, args, command):
    snr = _grid(-5.0, 50.0, 1.0)
    rows = []
    for db in snr:
        ch = snr_db_to_channel(float(db))
        res = optim.optimize_dco(ch)
        nu = res.params["nu"]
        rows.append((float(db), 1.0 / (math.sqrt(2.0) * nu), nu, res.rate))
    files = _emit_curves(
        out_dir,
        "fig3",
        ["snr_db", "sigma_x_star", "nu_star", "rate_bits"],
        [("dco", rows)],
        command,
        args.seed,
    )
    return {
        "title": "Rate-maximizing symbol scale of the DC-biased scheme",
        "x": "snr_db",
        "y": "sigma_x_star",
        "files": files,
        "claims": [
            "neither a fixed scale nor a scale proportional to SNR is optimal at both ends of the range",
        ],
    }


def _figure_4(out_dir, args, command):
    snr = _grid(-5.0, 20.0, 0.25)
    ado_rows, haco_rows = [], []
    for db in snr:
        ch = snr_db_to_channel(float(db))
        res_a = optim.optimize_ado(ch)
        ado_rows.append((float(db), res_a.params["lam"], res_a.params["nu"], res_a.rate))
        res_h = optim.optimize_double_lambda(ch)
        haco_rows.append((float(db), res_h.params["lam"], res_h.rate))
    files = _emit_curves(
        out_dir, "fig4", ["snr_db", "lambda_star", "nu_star", "rate_bits"], [("ado", ado_rows)], command, args.seed
    )
    files += _emit_curves(
        out_dir, "fig4", ["snr_db", "lambda_star", "rate_bits"], [("haco_asco", haco_rows)], command, args.seed
    )
    return {
        "title": "Optimal power split of the double-component schemes",
        "x": "snr_db",
        "y": "lambda_star",
        "files": files,
        "claims": [
            "the optimal split jumps from zero to a macroscopic value near 5.71 dB (two-band scheme)",
            "the optimal split jumps near 3.36 dB (hybrid schemes) and tends to 1/3 at high SNR",
        ],
    }


def _figure_5(out_dir, args, command):
    snr = _grid(0.0, 40.0, 1.0)
    curves = [("optimal", [(float(db), optim.optimize_dco(snr_db_to_channel(float(db))).rate) for db in snr])]
    for sigma in (1.0, 4.0, 16.0, 64.0):
        nu = 1.0 / (math.sqrt(2.0) * sigma)
        curves.append(
            (
                f"fixed_sigma_{sigma:g}",
                [(float(db), rates.rate_dco(snr_db_to_channel(float(db)), nu)) for db in snr],
            )
        )
    for ratio in (0.0625, 0.25, 1.0):
        rows = []
        for db in snr:
            ch = snr_db_to_channel(float(db))
            nu = 1.0 / (math.sqrt(2.0) * ratio * ch.eps)
            rows.append((float(db), rates.rate_dco(ch, nu)))
        curves.append((f"sigma_prop_snr_{ratio:g}", rows))
    files = _emit_curves(out_dir, "fig5", ["snr_db", "rate_bits"], curves, command, args.seed)
    return {
        "title": "DC-biased scheme under suboptimal scale strategies",
        "x": "snr_db",
        "y": "rate_bits",
        "files": files,
        "claims": [
            "a small fixed scale is near-optimal below 10 dB but loses increasingly at high SNR",
            "a scale proportional to SNR cannot match the optimum at both ends either",
        ],
    }


def _figure_6(out_dir, args, command):
    snr = _grid(0.0, 30.0, 0.5)
    opt_rows, lam_fixed_rows, all_fixed_rows = [], [], []
    nu_ref = optim.optimize_ado(snr_db_to_channel(20.0)).params["nu"]
    for db in snr:
        ch = snr_db_to_channel(float(db))
        res = optim.optimize_ado(ch)
        opt_rows.append((float(db), res.rate))
        lam_fixed_rows.append((float(db), _best_nu_rate(ch, 0.5)))
        all_fixed_rows.append((float(db), rates.rate_ado(ch, 0.5, nu_ref).total))
    curves = [
        ("optimal", opt_rows),
        ("lambda_half_nu_opt", lam_fixed_rows),
        ("lambda_half_nu_fixed", all_fixed_rows),
    ]
    files = _emit_curves(out_dir, "fig6", ["snr_db", "rate_bits"], curves, command, args.seed)
    return {
        "title": "Two-band scheme with and without optimal parameters",
        "x": "snr_db",
        "y": "rate_bits",
        "files": files,
        "claims": [
            "power allocation matters most at low SNR; the biased component's scale matters at high SNR",
        ],
    }


def _best_nu_rate(ch, lam):
    nu = optim._nu_grid(ch.eps)
    r1, r2 = rates.ado_component_rates(ch.eps, ch.sigma_z, lam, nu)
    return float(np.max(r1 + r2))


def _figure_7(out_dir, args, command):
    snr = _grid(0.0, 30.0, 0.5)
    curves = [
        ("optimal", [(float(db), optim.optimize_double_lambda(snr_db_to_channel(float(db))).rate) for db in snr]),
        ("lambda_third", [(float(db), rates.rate_haco(snr_db_to_channel(float(db)), 1.0 / 3.0).total) for db in snr]),
        ("lambda_half", [(float(db), rates.rate_haco(snr_db_to_channel(float(db)), 0.5).total) for db in snr]),
    ]
    files = _emit_curves(out_dir, "fig7", ["snr_db", "rate_bits"], curves, command, args.seed)
    return {
        "title": "Hybrid double-component schemes with and without optimal power split",
        "x": "snr_db",
        "y": "rate_bits",
        "files": files,
        "claims": [
            "the penalty of a fixed split is smaller than for the two-band scheme but considerable at low SNR",
        ],
    }


def _figure_8(out_dir, args, command):
    snr = _grid(0.0, 40.0, 1.0)
    curves = []
    for layers in range(1, 6):
        alloc = rates.geometric_allocation(layers, fill_last=True)
        curves.append(
            (
                f"layers_{layers}",
                [(float(db), rates.rate_multi(snr_db_to_channel(float(db)), alloc).total) for db in snr],
            )
        )
    curves.append(("cap_lb", [(float(db), rates.capacity_bounds(snr_db_to_channel(float(db)))[0]) for db in snr]))
    curves.append(("cap_ub", [(float(db), rates.capacity_bounds(snr_db_to_channel(float(db)))[1]) for db in snr]))
    files = _emit_curves(out_dir, "fig8", ["snr_db", "rate_bits"], curves, command, args.seed)
    return {
        "title": "Multi-component schemes with halving power allocation, by layer count",
        "x": "snr_db",
        "y": "rate_bits",
        "files": files,
        "claims": [
            "a small number of layers already captures most of the multiplexing gain in this range",
        ],
    }


def _figure_9(out_dir, args, command):
    snr = _grid(0.0, 40.0, 1.0)
    geo4 = rates.geometric_allocation(4, fill_last=True)
    curves = [
        ("geometric_L4", [(float(db), rates.rate_multi(snr_db_to_channel(float(db)), geo4).total) for db in snr]),
        ("equal_L4", [(float(db), rates.rate_multi(snr_db_to_channel(float(db)), rates.equal_allocation(4)).total) for db in snr]),
        ("equal_L8", [(float(db), rates.rate_multi(snr_db_to_channel(float(db)), rates.equal_allocation(8)).total) for db in snr]),
        ("optimized_L4", [(float(db), optim.optimize_multi(snr_db_to_channel(float(db)), 4).rate) for db in snr]),
    ]
    files = _emit_curves(out_dir, "fig9", ["snr_db", "rate_bits"], curves, command, args.seed)
    return {
        "title": "Multi-component power allocation strategies",
        "x": "snr_db",
        "y": "rate_bits",
        "files": files,
        "claims": [
            "halving allocation beats equal allocation, whose rate degrades as layers are added",
        ],
    }
