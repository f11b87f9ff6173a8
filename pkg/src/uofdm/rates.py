"""Closed-form information rates of the unipolar OFDM schemes, in bits per
time-domain channel use, plus capacity bounds and asymptotic constants.

Every rate here is the inner (per-parameter) expression; maximization over
the free parameters lives in :mod:`uofdm.optim` so that objective and search
are testable separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from uofdm import clipstats
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
    ChannelSpec,
    ParameterError,
    SchemeConfig,
    erf,
    erfc,
)

__all__ = [
    "RateBreakdown",
    "dco_sndr",
    "rate_dco",
    "dco_finite_n_sndr",
    "rate_dco_finite_n",
    "rate_aco_family",
    "ado_component_rates",
    "rate_ado",
    "haco_component_rates",
    "rate_haco",
    "multi_layer_rates",
    "rate_multi",
    "capacity_bounds",
    "asymptotic_constants",
    "geometric_allocation",
    "equal_allocation",
    "scheme_rate",
]

_LN2 = math.log(2.0)
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def _log2p1(x):
    """log2(1 + x), stable for small x."""
    return np.log1p(x) / _LN2


@dataclass(frozen=True)
class RateBreakdown:
    """Total rate of a multiplexed scheme and its per-component split."""

    per_component: tuple[float, ...]

    @property
    def total(self) -> float:
        return float(sum(self.per_component))


def _clip_denominator(t):
    """erf(t) - erf(t)^2 - (2/sqrt(pi)) t e^{-t^2} + 2 t^2 erfc(t).

    The normalized clipping-noise power of a DC-biased component; the first
    difference is evaluated as erf*erfc to avoid cancellation.
    """
    e = erf(t)
    ec = erfc(t)
    return e * ec - _TWO_OVER_SQRT_PI * t * np.exp(-t * t) + 2.0 * t * t * ec


def dco_sndr(eps, sigma_z, nu):
    """Signal-to-noise-and-distortion ratio of the DC-biased scheme.

    erf^2(nu*eps) / (erf(nu*eps) - erf^2(nu*eps)
                     - 2 pi^{-1/2} nu*eps exp(-(nu*eps)^2)
                     + 2 (nu*eps)^2 erfc(nu*eps) + 2 nu^2 sigma_z^2)

    Array-friendly in ``nu`` (and ``eps``).
    """
    nu = np.asarray(nu, dtype=float)
    t = nu * eps
    den = _clip_denominator(t) + 2.0 * nu * nu * sigma_z * sigma_z
    return erf(t) ** 2 / den


def rate_dco(ch: ChannelSpec, nu: float) -> float:
    """Rate of the DC-biased scheme at bias-to-scale parameter ``nu > 0``."""
    if not np.all(np.asarray(nu) > 0):
        raise ParameterError(f"nu must be positive, got {nu}")
    out = 0.5 * _log2p1(dco_sndr(ch.eps, ch.sigma_z, nu))
    return float(out) if np.isscalar(nu) or np.ndim(nu) == 0 else out


def dco_finite_n_sndr(ch: ChannelSpec, nu: float, n: int) -> float:
    """SNDR of the DC-biased scheme at block size ``n``.

    The time-domain scale is sigma_x^2 = ((n-2)/n) sigma_X^2 with
    sigma_X = 1/(sqrt(2) nu); clip moments are evaluated at sigma_x while the
    useful signal power stays alpha^2 sigma_X^2.
    """
    _check_finite_n(n)
    if not nu > 0:
        raise ParameterError(f"nu must be positive, got {nu}")
    sigma_big2 = 1.0 / (2.0 * nu * nu)
    sigma_x = math.sqrt((n - 2) / n * sigma_big2)
    m = clipstats.symmetric_clip_moments(sigma_x, ch.eps)
    return m.alpha**2 * sigma_big2 / (m.d2 + ch.sigma_z**2)


def rate_dco_finite_n(ch: ChannelSpec, nu: float, n: int) -> float:
    """Block-size-``n`` rate ((n-2)/(2n)) log2(1 + SNDR_n); converges to
    :func:`rate_dco` as ``n`` grows."""
    return (n - 2) / (2.0 * n) * float(_log2p1(dco_finite_n_sndr(ch, nu, n)))


def _check_finite_n(n: int):
    if n < 8 or n % 2 != 0:
        raise ParameterError(f"block size must be even and >= 8, got {n}")


def rate_aco_family(ch: ChannelSpec) -> float:
    """Shared rate (1/4) log2(1 + pi eps^2 / sigma_z^2) of the four
    half-DoF schemes (asymmetric clipping, imaginary-only loading, flipped
    block pair, four-block position resolution)."""
    s = ch.snr_linear()
    return 0.25 * float(_log2p1(math.pi * s * s))


def ado_component_rates(eps, sigma_z, lam, nu):
    """Per-component rates of the two-band scheme (asymmetrically clipped
    component on odd subcarriers + DC-biased component on even subcarriers).

    With t = nu*lam*eps and D the normalized clipping-noise power of the
    biased component,

        r_odd  = (1/4) log2(1 + pi (1-lam)^2 eps^2 / (D/(2 nu^2) + sigma_z^2))
        r_even = (1/4) log2(1 + 2 erf^2(t) / (D + 2 nu^2 sigma_z^2))

    ``nu`` is the inverse time-domain scale of the biased component,
    nu = 1/(sqrt(2) sigma_x2). Array-friendly in ``lam`` and ``nu``.
    """
    lam = np.asarray(lam, dtype=float)
    nu = np.asarray(nu, dtype=float)
    t = nu * lam * eps
    d = _clip_denominator(t)
    r_odd = 0.25 * _log2p1(
        math.pi * (1.0 - lam) ** 2 * eps * eps / (d / (2.0 * nu * nu) + sigma_z * sigma_z)
    )
    r_even = 0.25 * _log2p1(2.0 * erf(t) ** 2 / (d + 2.0 * nu * nu * sigma_z * sigma_z))
    return r_odd, r_even


def rate_ado(ch: ChannelSpec, lam: float, nu: float) -> RateBreakdown:
    """Rate split of the two-band scheme at power fraction ``lam`` for the
    DC-biased component and scale parameter ``nu``."""
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lam must lie in [0, 1], got {lam}")
    if not nu > 0:
        raise ParameterError(f"nu must be positive, got {nu}")
    r_odd, r_even = ado_component_rates(ch.eps, ch.sigma_z, lam, nu)
    return RateBreakdown(per_component=(float(r_odd), float(r_even)))


def haco_component_rates(eps, sigma_z, lam):
    """Per-component rates of the clipping-noise-orthogonal two-component
    schemes:

        r1 = (1/4) log2(1 + pi (1-lam)^2 eps^2 / sigma_z^2)
        r2 = (1/8) log2(1 + 2 pi lam^2 eps^2 / sigma_z^2)

    Array-friendly in ``lam``.
    """
    lam = np.asarray(lam, dtype=float)
    s2 = (eps / sigma_z) ** 2
    r1 = 0.25 * _log2p1(math.pi * (1.0 - lam) ** 2 * s2)
    r2 = 0.125 * _log2p1(2.0 * math.pi * lam * lam * s2)
    return r1, r2


def rate_haco(ch: ChannelSpec, lam: float) -> RateBreakdown:
    """Rate split of the hybrid two-component schemes; the same expression
    serves both the odd-ACO + even-imaginary variant and the odd-ACO +
    even-flipped variant."""
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lam must lie in [0, 1], got {lam}")
    r1, r2 = haco_component_rates(ch.eps, ch.sigma_z, lam)
    return RateBreakdown(per_component=(float(r1), float(r2)))


def multi_layer_rates(eps, sigma_z, lambdas):
    """Per-layer rates 2^{-(l+1)} log2(1 + 2^{l-1} pi lam_l^2 eps^2/sigma_z^2)
    of the L-layer multiplexed schemes (layer index l = 1..L on the last
    axis)."""
    lam = np.asarray(lambdas, dtype=float)
    ell = np.arange(1, lam.shape[-1] + 1, dtype=float)
    s2 = (eps / sigma_z) ** 2
    return 2.0 ** (-(ell + 1)) * _log2p1(2.0 ** (ell - 1) * math.pi * lam * lam * s2)


def rate_multi(ch: ChannelSpec, lambdas) -> RateBreakdown:
    """Rate split of the L-layer multiplexed schemes (frequency-interleaved
    and spread variants coincide); requires lam_l >= 0 and sum <= 1."""
    lam = tuple(float(v) for v in lambdas)
    if len(lam) < 1:
        raise ParameterError("lambdas must contain at least one entry")
    if any(v < 0 for v in lam):
        raise ParameterError(f"lambdas must be nonnegative, got {lam}")
    if sum(lam) > 1.0 + 1e-12:
        raise ParameterError(f"sum of lambdas exceeds 1: {sum(lam)}")
    per = multi_layer_rates(ch.eps, ch.sigma_z, lam)
    return RateBreakdown(per_component=tuple(float(v) for v in per))


def capacity_bounds(ch: ChannelSpec) -> tuple[float, float]:
    """Capacity bounds of the average-power-constrained intensity channel:

        (1/2) log2(1 + e/(2 pi) eps^2/sigma_z^2)
            <= C <= (1/2) log2(e/(2 pi) (eps/sigma_z + 2)^2)
    """
    s = ch.snr_linear()
    lower = 0.5 * float(_log2p1(math.e / (2.0 * math.pi) * s * s))
    upper = 0.5 * math.log2(math.e / (2.0 * math.pi) * (s + 2.0) ** 2)
    return lower, upper


def asymptotic_constants() -> dict[str, float]:
    """Named high-SNR constants of the rate family.

    haco_asym_coeff    -- pi 2^{5/3} / 9, coefficient of the optimized
                          two-component asymptote (3/8) log2(coeff * SNR^2)
    multi_lb_coeff     -- pi / 8, coefficient of the many-layer lower bound
                          (1/2) log2(coeff * SNR^2)
    dco_nu0_limit_bits -- (1/2) log2(pi / (pi - 2)), rate of the DC-biased
                          scheme as its scale parameter tends to zero at
                          high SNR
    gap_db             -- 10 log10(2 sqrt(e) / pi), SNR gap between the
                          many-layer lower bound and the capacity upper bound
    gap_bits           -- (1/2) log2(4 e / pi^2), the same gap in bits
    """
    return {
        "haco_asym_coeff": math.pi * 2.0 ** (5.0 / 3.0) / 9.0,
        "multi_lb_coeff": math.pi / 8.0,
        "dco_nu0_limit_bits": 0.5 * math.log2(math.pi / (math.pi - 2.0)),
        "gap_db": 10.0 * math.log10(2.0 * math.sqrt(math.e) / math.pi),
        "gap_bits": 0.5 * math.log2(4.0 * math.e / math.pi**2),
    }


def geometric_allocation(layers: int, fill_last: bool = False) -> tuple[float, ...]:
    """Power fractions lam_l = 2^{-l}.

    With ``fill_last`` the last layer takes 2^{-(L-1)} so the fractions sum to
    one; without it the residual 2^{-L} of the budget is deliberately unused.
    """
    if layers < 1:
        raise ParameterError(f"layers must be >= 1, got {layers}")
    lam = [2.0 ** (-l) for l in range(1, layers + 1)]
    if fill_last and layers >= 1:
        lam[-1] = 2.0 ** (-(layers - 1)) if layers > 1 else 1.0
    return tuple(lam)


def equal_allocation(layers: int) -> tuple[float, ...]:
    """Power fractions lam_l = 1/L."""
    if layers < 1:
        raise ParameterError(f"layers must be >= 1, got {layers}")
    return tuple(1.0 / layers for _ in range(layers))


def scheme_rate(cfg: SchemeConfig, ch: ChannelSpec) -> RateBreakdown:
    """Rate breakdown of any configured scheme.

    The four half-DoF single-component schemes share one expression, as do
    the two hybrid double-component schemes and the two multi-component
    schemes.
    """
    if cfg.scheme == DCO:
        return RateBreakdown(per_component=(rate_dco(ch, cfg.nu),))
    if cfg.scheme in (ACO, PAM_DMT, FLIP, PM):
        return RateBreakdown(per_component=(rate_aco_family(ch),))
    if cfg.scheme == ADO:
        return rate_ado(ch, cfg.lam, cfg.nu)
    if cfg.scheme in (HACO, ASCO):
        return rate_haco(ch, cfg.lam)
    if cfg.scheme in (FDM_UOFDM, EU_OFDM):
        return rate_multi(ch, cfg.lambdas)
    raise ParameterError(f"unknown scheme {cfg.scheme!r}")
