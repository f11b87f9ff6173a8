"""Channel and scheme parameterization, truncated-Gaussian facts, special functions.

Conventions used throughout the package:

* ``eps`` is the average optical power budget (an amplitude-like quantity in
  the discrete-time channel ``r = s + z``, ``s >= 0``, ``E[s] <= eps``).
* Optical SNR is ``eps / sigma_z`` and its decibel value is
  ``10 * log10(eps / sigma_z)``.
* All information rates are in bits per time-domain channel use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ParameterError",
    "Rate",
    "erf",
    "erfc",
    "ChannelSpec",
    "snr_db_to_channel",
    "tg_mean",
    "TruncGauss",
    "SchemeConfig",
    "DCO",
    "ACO",
    "PAM_DMT",
    "FLIP",
    "PM",
    "ADO",
    "HACO",
    "ASCO",
    "FDM_UOFDM",
    "EU_OFDM",
    "SCHEMES",
    "SINGLE_COMPONENT_SCHEMES",
    "MULTIPLEXED_SCHEMES",
]


class ParameterError(ValueError):
    """An argument is outside its documented domain."""


# Information rate in bits per time-domain channel use (always >= 0).
Rate = float

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_SQRT_PI = math.sqrt(math.pi)

# Branch point between the power series and the tail continued fraction.
_ERF_CUTOFF = 2.5
_SERIES_TERMS = 72
_CF_DEPTH = 120


def _erf_series(x):
    """erf via the positive-term series 2x e^{-x^2}/sqrt(pi) * sum (2x^2)^n/(2n+1)!!.

    All terms are positive, so there is no cancellation; converges to double
    precision within ``_SERIES_TERMS`` iterations for |x| <= 2.5.
    """
    x2 = 2.0 * x * x
    term = np.ones_like(x)
    acc = np.ones_like(x)
    for n in range(1, _SERIES_TERMS):
        term = term * (x2 / (2 * n + 1))
        acc += term
    return _TWO_OVER_SQRT_PI * x * np.exp(-x * x) * acc


def _erfc_cf(x):
    """erfc for x >= _ERF_CUTOFF via the Laplace continued fraction.

    sqrt(pi) e^{x^2} erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
    evaluated bottom-up with fixed depth.
    """
    f = x.copy()
    for k in range(_CF_DEPTH, 0, -1):
        f = x + (0.5 * k) / f
    return np.exp(-x * x) / (_SQRT_PI * f)


def erf(x):
    """Error function, accurate to better than 1e-14 absolute.

    Accepts scalars or numpy arrays and preserves the input shape.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    a = np.atleast_1d(arr)
    out = np.empty_like(a)
    mag = np.abs(a)

    small = mag <= _ERF_CUTOFF
    if small.any():
        out[small] = _erf_series(a[small])
    large = ~small
    if large.any():
        finite = large & np.isfinite(a)
        out[large] = np.sign(a[large])
        if finite.any():
            out[finite] = np.sign(a[finite]) * (1.0 - _erfc_cf(mag[finite]))
    return float(out[0]) if scalar else out.reshape(arr.shape)


def erfc(x):
    """Complementary error function, 1 - erf(x), with full relative accuracy
    in the positive tail (computed there by continued fraction, not by
    subtraction)."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    a = np.atleast_1d(arr)
    out = np.empty_like(a)
    mag = np.abs(a)

    small = mag <= _ERF_CUTOFF
    if small.any():
        out[small] = 1.0 - _erf_series(a[small])
    large = ~small
    if large.any():
        finite = large & np.isfinite(a)
        out[large] = np.where(a[large] > 0, 0.0, 2.0)
        if finite.any():
            tail = _erfc_cf(mag[finite])
            out[finite] = np.where(a[finite] > 0, tail, 2.0 - tail)
    return float(out[0]) if scalar else out.reshape(arr.shape)


@dataclass(frozen=True)
class ChannelSpec:
    """Average optical power budget and noise level of the intensity channel.

    ``eps`` is the mean-power budget ``E[s] <= eps``; ``sigma_z`` the noise
    standard deviation, in the same amplitude units.
    """

    eps: float
    sigma_z: float = 1.0

    def __post_init__(self):
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise ParameterError(f"eps must be positive and finite, got {self.eps}")
        if not (self.sigma_z > 0 and math.isfinite(self.sigma_z)):
            raise ParameterError(f"sigma_z must be positive and finite, got {self.sigma_z}")

    def snr_linear(self) -> float:
        return self.eps / self.sigma_z

    def snr_db(self) -> float:
        return 10.0 * math.log10(self.eps / self.sigma_z)


def snr_db_to_channel(snr_db: float, sigma_z: float = 1.0) -> ChannelSpec:
    """Channel with the requested optical SNR, ``10*log10(eps/sigma_z) == snr_db``."""
    if not sigma_z > 0:
        raise ParameterError(f"sigma_z must be positive, got {sigma_z}")
    return ChannelSpec(eps=sigma_z * 10.0 ** (snr_db / 10.0), sigma_z=sigma_z)


def tg_mean(sigma: float) -> float:
    """Mean ``sigma / sqrt(2 pi)`` of the zero-truncated Gaussian."""
    if sigma < 0:
        raise ParameterError(f"sigma must be nonnegative, got {sigma}")
    return sigma / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class TruncGauss:
    """Half-Gaussian density on x > 0 plus a point mass of 1/2 at zero.

    The distribution of max(x, 0) for x ~ N(0, sigma^2).
    """

    sigma: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ParameterError(f"sigma must be nonnegative, got {self.sigma}")

    def mean(self) -> float:
        return tg_mean(self.sigma)

    def second_moment(self) -> float:
        return 0.5 * self.sigma * self.sigma


# Scheme identifiers.
DCO = "dco"
ACO = "aco"
PAM_DMT = "pam_dmt"
FLIP = "flip"
PM = "pm"
ADO = "ado"
HACO = "haco"
ASCO = "asco"
FDM_UOFDM = "fdm_uofdm"
EU_OFDM = "eu_ofdm"

SINGLE_COMPONENT_SCHEMES = (DCO, ACO, PAM_DMT, FLIP, PM)
MULTIPLEXED_SCHEMES = (ADO, HACO, ASCO, FDM_UOFDM, EU_OFDM)
SCHEMES = SINGLE_COMPONENT_SCHEMES + MULTIPLEXED_SCHEMES

# Free parameters per scheme: nu is an inverse-amplitude scale of a
# DC-biased (symmetrically clipped) component, lam / lambdas are optical
# power fractions.
_SCHEME_PARAMS = {
    DCO: ("nu",),
    ACO: (),
    PAM_DMT: (),
    FLIP: (),
    PM: (),
    ADO: ("lam", "nu"),
    HACO: ("lam",),
    ASCO: ("lam",),
    FDM_UOFDM: ("lambdas",),
    EU_OFDM: ("lambdas",),
}


@dataclass(frozen=True)
class SchemeConfig:
    """A scheme identity plus its free parameters.

    ``nu`` applies to the DC-biased component of DCO / ADO, ``lam`` to the
    two-component power split of ADO / HACO / ASCO, and ``lambdas`` to the
    per-layer power fractions of the multi-component schemes.
    """

    scheme: str
    nu: float | None = None
    lam: float | None = None
    lambdas: tuple[float, ...] | None = field(default=None)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        wanted = _SCHEME_PARAMS[self.scheme]
        for name in ("nu", "lam", "lambdas"):
            value = getattr(self, name)
            if name in wanted:
                if value is None:
                    raise ParameterError(f"{self.scheme} requires parameter {name}")
            elif value is not None:
                raise ParameterError(f"{self.scheme} takes no parameter {name}")
        if self.nu is not None and not self.nu > 0:
            raise ParameterError(f"nu must be positive, got {self.nu}")
        if self.lam is not None and not 0.0 <= self.lam <= 1.0:
            raise ParameterError(f"lam must lie in [0, 1], got {self.lam}")
        if self.lambdas is not None:
            lams = tuple(float(v) for v in self.lambdas)
            object.__setattr__(self, "lambdas", lams)
            if len(lams) < 1:
                raise ParameterError("lambdas must contain at least one entry")
            if any(v < 0 for v in lams):
                raise ParameterError(f"lambdas must be nonnegative, got {lams}")
            if sum(lams) > 1.0 + 1e-12:
                raise ParameterError(f"sum of lambdas exceeds 1: {sum(lams)}")

    @property
    def layers(self) -> int:
        if self.lambdas is None:
            raise ParameterError(f"{self.scheme} has no layers")
        return len(self.lambdas)

    def free_parameters(self) -> tuple[str, ...]:
        return _SCHEME_PARAMS[self.scheme]

    @classmethod
    def dco(cls, nu: float) -> "SchemeConfig":
        return cls(DCO, nu=nu)

    @classmethod
    def aco(cls) -> "SchemeConfig":
        return cls(ACO)

    @classmethod
    def pam_dmt(cls) -> "SchemeConfig":
        return cls(PAM_DMT)

    @classmethod
    def flip(cls) -> "SchemeConfig":
        return cls(FLIP)

    @classmethod
    def pm(cls) -> "SchemeConfig":
        return cls(PM)

    @classmethod
    def ado(cls, lam: float, nu: float) -> "SchemeConfig":
        return cls(ADO, lam=lam, nu=nu)

    @classmethod
    def haco(cls, lam: float) -> "SchemeConfig":
        return cls(HACO, lam=lam)

    @classmethod
    def asco(cls, lam: float) -> "SchemeConfig":
        return cls(ASCO, lam=lam)

    @classmethod
    def fdm_uofdm(cls, lambdas) -> "SchemeConfig":
        return cls(FDM_UOFDM, lambdas=tuple(lambdas))

    @classmethod
    def eu_ofdm(cls, lambdas) -> "SchemeConfig":
        return cls(EU_OFDM, lambdas=tuple(lambdas))
