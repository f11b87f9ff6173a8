"""Maximization of the rate expressions over their free parameters.

The one- and two-parameter objectives are not concave (the optimal power
split of the double-component schemes jumps as SNR grows), so every search
here starts from a global grid and only then refines locally; pure local
search is deliberately not offered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from uofdm.core import ADO, HACO, ChannelSpec, ParameterError, snr_db_to_channel
from uofdm.rates import (
    ado_component_rates,
    dco_sndr,
    haco_component_rates,
    multi_layer_rates,
    rate_aco_family,
)

__all__ = [
    "NotFoundError",
    "OptResult",
    "optimize_dco",
    "optimize_ado",
    "optimize_double_lambda",
    "optimize_multi",
    "optimize_scheme",
    "find_lambda_jump",
    "find_crossover",
]

# nu depends on the objective only through nu*eps and nu*sigma_z, so the
# global grid is logarithmic around 1/eps.
NU_GRID_POINTS = 200
NU_GRID_DECADES = 3.0
ADO_LAMBDA_STEP = 0.005
DOUBLE_LAMBDA_STEP = 0.002

_LN2 = math.log(2.0)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class NotFoundError(RuntimeError):
    """A bracketing search did not find the requested feature."""


@dataclass(frozen=True)
class OptResult:
    """Optimal parameters, the rate there, and the objective-call count."""

    params: dict
    rate: float
    evaluations: int


def _nu_grid(eps: float, points: int = NU_GRID_POINTS, decades: float = NU_GRID_DECADES):
    return np.logspace(
        math.log10(1.0 / eps) - decades, math.log10(1.0 / eps) + decades, points
    )


def _golden_max(f, lo: float, hi: float, tol: float):
    """Golden-section maximization on [lo, hi]; returns (x, f(x), evaluations)."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        evals += 1
    x = c if fc > fd else d
    return x, max(fc, fd), evals


def optimize_dco(ch: ChannelSpec) -> OptResult:
    """Best scale parameter nu for the DC-biased scheme.

    Global log-grid in nu followed by golden-section refinement of log(nu)
    inside the best bracket.
    """
    grid = _nu_grid(ch.eps)
    rates = 0.5 * np.log1p(dco_sndr(ch.eps, ch.sigma_z, grid)) / _LN2
    i = int(np.argmax(rates))
    evals = grid.size

    def f(log_nu):
        return 0.5 * math.log1p(float(dco_sndr(ch.eps, ch.sigma_z, math.exp(log_nu)))) / _LN2

    lo = math.log(grid[max(i - 1, 0)])
    hi = math.log(grid[min(i + 1, grid.size - 1)])
    x, fx, e = _golden_max(f, lo, hi, tol=1e-9)
    evals += e
    if rates[i] >= fx:
        return OptResult(params={"nu": float(grid[i])}, rate=float(rates[i]), evaluations=evals)
    return OptResult(params={"nu": math.exp(x)}, rate=fx, evaluations=evals)


def optimize_ado(ch: ChannelSpec) -> OptResult:
    """Best (lam, nu) for the two-band scheme.

    Coarse global grid (lam step 0.005 crossed with a 200-point log grid in
    nu), then three zoomed grid refinements around the running optimum. The
    boundary specializations lam = 0 and lam = 1 sit on the grid, so the
    returned rate dominates both.
    """
    lam = np.arange(0.0, 1.0 + 0.5 * ADO_LAMBDA_STEP, ADO_LAMBDA_STEP)
    nu = _nu_grid(ch.eps)
    evals = 0
    best = (-math.inf, 0.0, nu[0])
    lam_step = ADO_LAMBDA_STEP
    for round_idx in range(4):
        lam_mesh, nu_mesh = np.meshgrid(lam, nu, indexing="ij")
        r1, r2 = ado_component_rates(ch.eps, ch.sigma_z, lam_mesh, nu_mesh)
        total = r1 + r2
        evals += total.size
        i, j = np.unravel_index(int(np.argmax(total)), total.shape)
        if total[i, j] > best[0]:
            best = (float(total[i, j]), float(lam[i]), float(nu[j]))
        lam_lo = max(float(lam[max(i - 1, 0)]), 0.0)
        lam_hi = min(float(lam[min(i + 1, lam.size - 1)]), 1.0)
        nu_lo = float(nu[max(j - 1, 0)])
        nu_hi = float(nu[min(j + 1, nu.size - 1)])
        lam = np.linspace(lam_lo, lam_hi, 41)
        nu = np.logspace(math.log10(nu_lo), math.log10(nu_hi), 41)
        lam_step = (lam_hi - lam_lo) / 40 if lam_hi > lam_lo else lam_step

    rate, lam_star, nu_star = best
    # Explicit boundary comparison: lam = 0 reduces to the asymmetric-clipping
    # scheme (nu-independent), lam = 1 to the biased component alone.
    aco_rate = rate_aco_family(ch)
    if aco_rate > rate:
        rate, lam_star = aco_rate, 0.0
    lam_star = min(max(lam_star, 0.0), 1.0)
    return OptResult(
        params={"lam": lam_star, "nu": nu_star}, rate=rate, evaluations=evals + 1
    )


def optimize_double_lambda(ch: ChannelSpec) -> OptResult:
    """Best power split for the hybrid two-component schemes.

    Global grid with step 0.002 plus golden-section refinement on the best
    bracket; the objective is bimodal near the split threshold, so the grid
    stage is never skipped.
    """
    lam = np.arange(0.0, 1.0 + 0.5 * DOUBLE_LAMBDA_STEP, DOUBLE_LAMBDA_STEP)
    r1, r2 = haco_component_rates(ch.eps, ch.sigma_z, lam)
    total = r1 + r2
    evals = lam.size
    i = int(np.argmax(total))

    def f(x):
        a, b = haco_component_rates(ch.eps, ch.sigma_z, x)
        return float(a + b)

    lo = max(float(lam[max(i - 1, 0)]), 0.0)
    hi = min(float(lam[min(i + 1, lam.size - 1)]), 1.0)
    x, fx, e = _golden_max(f, lo, hi, tol=1e-10)
    evals += e
    if total[i] >= fx:
        x, fx = float(lam[i]), float(total[i])
    return OptResult(params={"lam": min(max(x, 0.0), 1.0)}, rate=fx, evaluations=evals)


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u + (1.0 - css) / np.arange(1, v.size + 1) > 0)[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def optimize_multi(ch: ChannelSpec, layers: int) -> OptResult:
    """Best power fractions for the L-layer multiplexed schemes.

    Multi-start projected gradient ascent on the simplex {lam >= 0,
    sum lam = 1}. The per-layer terms are convex near zero, so mass can lock
    into a subset of layers; eight starts (geometric, filled-geometric,
    equal, single-layer, and seeded random points) guard against that. The
    returned rate dominates the objective at every start.
    """
    if not 1 <= layers <= 12:
        raise ParameterError(f"layers must lie in 1..12, got {layers}")
    s2 = (ch.eps / ch.sigma_z) ** 2
    coeff = 2.0 ** (np.arange(1, layers + 1) - 1.0) * math.pi * s2
    weight = 2.0 ** (-(np.arange(1, layers + 1) + 1.0))

    evals = 0

    def f(lam):
        nonlocal evals
        evals += 1
        return float(np.sum(weight * np.log1p(coeff * lam * lam) / _LN2))

    def grad(lam):
        return weight * 2.0 * coeff * lam / ((1.0 + coeff * lam * lam) * _LN2)

    geo = np.array([2.0 ** (-l) for l in range(1, layers + 1)])
    starts = [
        geo / geo.sum(),
        np.full(layers, 1.0 / layers),
        np.eye(layers)[0],
    ]
    filled = geo.copy()
    if layers > 1:
        filled[-1] = 2.0 ** (-(layers - 1))
    starts.append(filled / filled.sum())
    rng = np.random.default_rng(20240 + layers)
    while len(starts) < 8:
        starts.append(rng.dirichlet(np.ones(layers)))

    best_lam, best_rate = None, -math.inf
    for start in starts:
        lam = _project_simplex(np.asarray(start, dtype=float))
        val = f(lam)
        if val > best_rate:
            best_rate, best_lam = val, lam.copy()
        step = 1.0
        for _ in range(400):
            g = grad(lam)
            cand = _project_simplex(lam + step * g)
            cand_val = f(cand)
            while cand_val < val and step > 1e-14:
                step *= 0.5
                cand = _project_simplex(lam + step * g)
                cand_val = f(cand)
            if cand_val <= val + 1e-14:
                break
            lam, val = cand, cand_val
            step = min(step * 2.0, 1e6)
        if val > best_rate:
            best_rate, best_lam = val, lam.copy()

    best_lam = np.maximum(best_lam, 0.0)
    return OptResult(
        params={"lambdas": [float(v) for v in best_lam]},
        rate=best_rate,
        evaluations=evals,
    )


def optimize_scheme(scheme: str, ch: ChannelSpec, layers: int | None = None) -> OptResult:
    """Dispatch to the optimizer owning the scheme's free parameters."""
    from uofdm import core

    if scheme == core.DCO:
        return optimize_dco(ch)
    if scheme == core.ADO:
        return optimize_ado(ch)
    if scheme in (core.HACO, core.ASCO):
        return optimize_double_lambda(ch)
    if scheme in (core.FDM_UOFDM, core.EU_OFDM):
        if layers is None:
            raise ParameterError("multi-component optimization requires layers")
        return optimize_multi(ch, layers)
    raise ParameterError(f"scheme {scheme!r} has no free parameters")


def _lambda_star(scheme: str, snr_db: float, sigma_z: float) -> float:
    ch = snr_db_to_channel(snr_db, sigma_z)
    if scheme == ADO:
        return optimize_ado(ch).params["lam"]
    if scheme == HACO:
        return optimize_double_lambda(ch).params["lam"]
    raise ParameterError(f"lambda jump is defined for {ADO!r} and {HACO!r}, got {scheme!r}")


def find_lambda_jump(
    scheme: str,
    tol_db: float = 0.01,
    threshold: float = 0.05,
    lo_db: float = -10.0,
    hi_db: float = 30.0,
    sigma_z: float = 1.0,
) -> float:
    """SNR (dB) where the optimal power split jumps away from zero.

    Bisection on SNR for the first crossing of ``lambda_star`` above
    ``threshold``; the optimum moves discontinuously from ~0 to a macroscopic
    value, so the threshold choice is uncritical (configurable regardless).
    """
    if not tol_db > 0:
        raise ParameterError(f"tol_db must be positive, got {tol_db}")
    lo, hi = float(lo_db), float(hi_db)
    if _lambda_star(scheme, lo, sigma_z) > threshold or _lambda_star(scheme, hi, sigma_z) <= threshold:
        raise NotFoundError(
            f"no lambda jump through {threshold} for {scheme} in [{lo_db}, {hi_db}] dB"
        )
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if _lambda_star(scheme, mid, sigma_z) > threshold:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def find_crossover(rate_a, rate_b, lo_db: float, hi_db: float, tol_db: float = 0.01) -> float:
    """SNR (dB) where two rate-versus-SNR functions cross.

    ``rate_a`` and ``rate_b`` map SNR in dB to a rate; their difference must
    change sign on [lo_db, hi_db].
    """
    lo, hi = float(lo_db), float(hi_db)
    f_lo = rate_a(lo) - rate_b(lo)
    f_hi = rate_a(hi) - rate_b(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise NotFoundError(f"no sign change on [{lo_db}, {hi_db}] dB")
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        f_mid = rate_a(mid) - rate_b(mid)
        if f_mid == 0.0:
            return mid
        if math.copysign(1.0, f_mid) == math.copysign(1.0, f_lo):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
