"""Closed-form second-order statistics of hard-clipped Gaussian signals.

A clipped zero-mean Gaussian splits as ``c = alpha * x + d`` with ``d``
uncorrelated with ``x``; the functions here give the gain ``alpha`` and the
powers ``E[c^2]`` and ``E[d^2]`` of that decomposition for the two clippers
used by the unipolar OFDM schemes (symmetric peak clipping at +-A, and
asymmetric clipping of the negative half to zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from uofdm.core import ParameterError, erf, erfc

__all__ = [
    "ClipMoments",
    "symmetric_clip_moments",
    "ado_dco_distortion",
    "asymmetric_clip_stats",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class ClipMoments:
    """Second-order description of a symmetrically clipped Gaussian.

    alpha -- correlation gain of the clipper (0 <= alpha <= 1)
    c2    -- output power E[c^2]
    d2    -- power E[d^2] of the residual uncorrelated with the input;
             satisfies c2 == alpha^2 * sigma_x^2 + d2.
    """

    alpha: float
    c2: float
    d2: float


def symmetric_clip_moments(sigma_x: float, clip_level: float) -> ClipMoments:
    """Moments of ``c = clip(x, -A, A)`` for ``x ~ N(0, sigma_x^2)``.

    alpha = erf(A / (sqrt(2) sigma_x))
    E[c^2] = sigma_x^2 (erf(u) - sqrt(2/pi) (A/sigma_x) exp(-A^2/(2 sigma_x^2)))
             + A^2 erfc(u),          u = A / (sqrt(2) sigma_x)
    E[d^2] = E[c^2] - alpha^2 sigma_x^2

    ``clip_level = 0`` degenerates to all-zero moments so that optimizers may
    probe the boundary.
    """
    if not sigma_x > 0:
        raise ParameterError(f"sigma_x must be positive, got {sigma_x}")
    if clip_level < 0:
        raise ParameterError(f"clip_level must be nonnegative, got {clip_level}")
    if clip_level == 0.0:
        return ClipMoments(alpha=0.0, c2=0.0, d2=0.0)
    u = clip_level / (_SQRT2 * sigma_x)
    alpha = float(erf(u))
    var = sigma_x * sigma_x
    c2 = var * (alpha - _SQRT_2_OVER_PI * (clip_level / sigma_x) * math.exp(-u * u)) + (
        clip_level * clip_level
    ) * float(erfc(u))
    d2 = max(c2 - alpha * alpha * var, 0.0)
    return ClipMoments(alpha=alpha, c2=c2, d2=d2)


def ado_dco_distortion(sigma_x2, lambda_eps):
    """Residual clipping-noise power of a DC-biased component clipped at
    ``+-lambda_eps`` whose pre-clip signal has scale ``sigma_x2``.

    sigma_x2^2 (erf(u) - erf(u)^2 - sqrt(2/pi) (A/sigma_x2) exp(-A^2/(2 sigma_x2^2)))
    + A^2 erfc(u),    u = A / (sqrt(2) sigma_x2),  A = lambda_eps

    ``erf - erf^2`` is evaluated as ``erf * erfc`` to avoid cancellation.
    Accepts scalars or arrays (broadcast).
    """
    s = np.asarray(sigma_x2, dtype=float)
    a = np.asarray(lambda_eps, dtype=float)
    if np.any(s <= 0):
        raise ParameterError("sigma_x2 must be positive")
    if np.any(a < 0):
        raise ParameterError("lambda_eps must be nonnegative")
    u = a / (_SQRT2 * s)
    e = erf(u)
    ec = erfc(u)
    out = s * s * (e * ec - _SQRT_2_OVER_PI * (a / s) * np.exp(-u * u)) + a * a * ec
    out = np.maximum(out, 0.0)
    if np.isscalar(sigma_x2) and np.isscalar(lambda_eps):
        return float(out)
    return out


def asymmetric_clip_stats(sigma_x: float) -> tuple[float, float]:
    """Mean and power of ``s = max(x, 0)`` for ``x ~ N(0, sigma_x^2)``.

    Returns ``(sigma_x / sqrt(2 pi), sigma_x^2 / 2)``.
    """
    if sigma_x < 0:
        raise ParameterError(f"sigma_x must be nonnegative, got {sigma_x}")
    return sigma_x / math.sqrt(2.0 * math.pi), 0.5 * sigma_x * sigma_x
