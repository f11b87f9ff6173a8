"""Monte Carlo signal chains for the unipolar OFDM schemes.

Builds real frames for every scheme, applies the additive-Gaussian intensity
channel, runs the per-scheme receiver transforms (with genie-aided
cancellation of already-decoded components for the multiplexed schemes), and
estimates the second-order statistics that the closed-form rate expressions
predict.

Conventions:

* The DFT is unitary, ``[F]_{n,k} = N^{-1/2} exp(-j 2 pi k n / N)``, so norms
  are preserved between domains.
* Frequency blocks are Hermitian (``X[N-k] = conj(X[k])``, ``X[0] = X[N/2] =
  0``) whenever the time signal must be real.
* Per-symbol scales are chosen so the mean optical power of a frame equals
  the budget exactly at the configured block size (the asymptotic
  scale-versus-power relations are recovered as N grows).
* Estimators pool sample moments across frames (ratio of means, not mean of
  ratios) and are deterministic given (seed, frames): chunk c of the fixed
  block partition draws from an independent counter-based stream
  ``Philox(seed).jumped(c)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from uofdm import clipstats, rates
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
    SINGLE_COMPONENT_SCHEMES,
)

__all__ = [
    "SimParams",
    "Frame",
    "SpectrumBlock",
    "SubcarrierObservations",
    "MomentEstimate",
    "Component",
    "Check",
    "AutocorrReport",
    "unitary_dft",
    "unitary_idft",
    "frame_length",
    "rate_prefactor",
    "modulate",
    "demodulate_single",
    "genie_sic_demodulate",
    "estimate_moments",
    "check_autocorrelation",
    "validation_report",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimParams:
    """Subcarrier count (power of two, >= 64), Monte Carlo frame count, seed."""

    n: int = 256
    frames: int = 10000
    seed: int = 0

    def __post_init__(self):
        if self.n < 64 or (self.n & (self.n - 1)) != 0:
            raise ParameterError(f"n must be a power of two >= 64, got {self.n}")
        if self.frames < 1:
            raise ParameterError(f"frames must be positive, got {self.frames}")


@dataclass(frozen=True)
class Frame:
    """A time-domain transmit frame; ``nonneg`` asserts unipolarity."""

    samples: np.ndarray
    nonneg: bool = True


@dataclass(frozen=True)
class SpectrumBlock:
    """A length-N frequency block; ``hermitian`` marks conjugate symmetry."""

    symbols: np.ndarray
    hermitian: bool

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        x = self.symbols
        n = x.shape[-1]
        mirrored = np.conj(x[..., (n - np.arange(n)) % n])
        scale = max(float(np.max(np.abs(x))), 1.0)
        return bool(np.max(np.abs(x - mirrored)) <= tol * scale)


@dataclass(frozen=True)
class SubcarrierObservations:
    """Receiver output restricted to the information-bearing subcarrier set."""

    subcarriers: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class MomentEstimate:
    """Pooled sample-moment estimates for a single-component scheme.

    ``alpha_hat`` is the scaled cross-moment estimate of the effective channel
    gain, ``d2_hat`` the residual (clipping) power per time sample,
    ``delta_hat`` the normalized cross/auto moment ratio whose odds
    ``delta/(1-delta)`` estimate the equivalent-channel SNDR, and
    ``snr_e_hat`` the regression-based equivalent SNR per subcarrier class.
    """

    alpha_hat: float
    d2_hat: float
    delta_hat: float
    snr_e_hat: dict[str, float]
    frames: int
    seed: int
    alpha_se: float = float("nan")
    d2_se: float = float("nan")
    delta_se: float = float("nan")
    snr_e_se: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Component:
    """One multiplexed component of a generated frame batch.

    ``spectrum`` holds the information symbols on ``subcarriers`` (leading
    axes: frame, and inner-symbol index for spread layers), ``time`` the
    zero-mean pre-clip signal, and ``unipolar`` the component's nonnegative
    contribution to the frame.
    """

    name: str
    subcarriers: np.ndarray
    spectrum: np.ndarray
    time: np.ndarray
    unipolar: np.ndarray
    sigma_sym: float
    sigma_x: float
    power: float
    clip_level: float | None = None
    imag_only: bool = False
    spread: int = 1


@dataclass(frozen=True)
class Check:
    """One validated invariant: prediction, estimate, and a pass verdict."""

    name: str
    predicted: float
    estimated: float
    tolerance: float
    kind: str  # "rel" | "abs" | "z" | "le"
    passed: bool
    stderr: float = float("nan")


@dataclass(frozen=True)
class AutocorrReport:
    """Three-case autocorrelation check of the biased scheme's pre-clip signal."""

    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


# ---------------------------------------------------------------------------
# RNG and transforms
# ---------------------------------------------------------------------------


def _stream(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)).jumped(chunk))


def unitary_dft(x) -> SpectrumBlock:
    """Unitary DFT of a time block; flags Hermitian symmetry for real input."""
    arr = np.asarray(x)
    return SpectrumBlock(
        symbols=np.fft.fft(arr, norm="ortho"), hermitian=bool(np.isrealobj(arr))
    )


def unitary_idft(block) -> np.ndarray:
    """Unitary inverse DFT; returns a real array when the block is Hermitian.

    Raises if a Hermitian-flagged block produces an imaginary residue above
    1e-10 (relative to the signal scale).
    """
    if isinstance(block, SpectrumBlock):
        symbols, hermitian = block.symbols, block.hermitian
    else:
        symbols, hermitian = np.asarray(block), False
    y = np.fft.ifft(symbols, norm="ortho")
    if not hermitian:
        return y
    scale = max(float(np.max(np.abs(y))), 1.0)
    residue = float(np.max(np.abs(y.imag)))
    if residue > 1e-10 * scale:
        raise ParameterError(f"hermitian block has imaginary residue {residue:.3e}")
    return y.real


def _real_idft(X: np.ndarray) -> np.ndarray:
    # Internal fast path; callers guarantee Hermitian symmetry.
    return np.fft.ifft(X, norm="ortho").real


def _dft(x: np.ndarray) -> np.ndarray:
    return np.fft.fft(x, norm="ortho")


# ---------------------------------------------------------------------------
# Subcarrier sets and frame geometry
# ---------------------------------------------------------------------------


def _full_set(n: int) -> np.ndarray:
    return np.arange(1, n // 2)


def _odd_set(n: int) -> np.ndarray:
    return np.arange(1, n // 2, 2)


def _even_set(n: int) -> np.ndarray:
    return np.arange(2, n // 2, 2)


def _layer_set(layer: int, n: int) -> np.ndarray:
    m = np.arange(1, n // 2 ** (layer + 1) + 1)
    return (2 * m - 1) * 2 ** (layer - 1)


def frame_length(cfg: SchemeConfig, n: int) -> int:
    """Number of time-domain channel uses in one frame."""
    if cfg.scheme in (DCO, ACO, PAM_DMT, ADO, HACO, FDM_UOFDM):
        return n
    if cfg.scheme in (FLIP, ASCO):
        return 2 * n
    if cfg.scheme == PM:
        return 4 * n
    if cfg.scheme == EU_OFDM:
        return 2**cfg.layers * n
    raise ParameterError(f"unknown scheme {cfg.scheme!r}")


def rate_prefactor(cfg: SchemeConfig, n: int) -> float:
    """Bits-per-channel-use prefactor on log2(1 + SNR_e): the number of
    independent complex information dimensions per frame, over the frame
    length (halved for real-only loading)."""
    if cfg.scheme == DCO:
        return (n / 2 - 1) / n
    if cfg.scheme == ACO:
        return 0.25
    if cfg.scheme == PAM_DMT:
        return (n / 2 - 1) / (2 * n)
    if cfg.scheme == FLIP:
        return (n / 2 - 1) / (2 * n)
    if cfg.scheme == PM:
        return 0.25
    raise ParameterError(f"no single-channel prefactor for {cfg.scheme!r}")


def _check_divisibility(cfg: SchemeConfig, n: int):
    if cfg.scheme in (ADO, HACO, ASCO) and n % 4 != 0:
        raise ParameterError(f"{cfg.scheme} requires 4 | n, got n={n}")
    if cfg.scheme == FDM_UOFDM:
        need = 2 ** (cfg.layers + 1)
        if n % need != 0:
            raise ParameterError(
                f"{cfg.scheme} with {cfg.layers} layers requires {need} | n, got n={n}"
            )


# ---------------------------------------------------------------------------
# Frame generation (batched: leading axis = frames)
# ---------------------------------------------------------------------------


def _hermitian_block(rng, f, n, sigma_sym, loaded, imag_only=False):
    """(f, n) Hermitian spectrum with iid symbols of power sigma_sym^2 on
    ``loaded`` (indices within 1..n/2-1); pure imaginary when ``imag_only``."""
    X = np.zeros((f, n), dtype=complex)
    k = np.asarray(loaded)
    if sigma_sym > 0 and k.size:
        if imag_only:
            X[:, k] = 1j * rng.normal(0.0, sigma_sym, (f, k.size))
        else:
            half = sigma_sym / math.sqrt(2.0)
            X[:, k] = rng.normal(0.0, half, (f, k.size)) + 1j * rng.normal(
                0.0, half, (f, k.size)
            )
        X[:, n - k] = np.conj(X[:, k])
    return X


def _aco_component(rng, f, n, loaded, power, name):
    """Asymmetrically clipped component on ``loaded``: every time sample is
    marginally N(0, sigma_x^2) with sigma_x = sqrt(2 pi) * power, so the
    component's mean optical power is exactly ``power``."""
    sigma_x = _SQRT_2PI * power
    k2 = 2 * len(loaded)
    sigma_sym = sigma_x * math.sqrt(n / k2) if k2 else 0.0
    X = _hermitian_block(rng, f, n, sigma_sym, loaded)
    x = _real_idft(X)
    s = np.maximum(x, 0.0)
    return Component(
        name=name,
        subcarriers=np.asarray(loaded),
        spectrum=X[:, loaded],
        time=x,
        unipolar=s,
        sigma_sym=sigma_sym,
        sigma_x=sigma_x,
        power=power,
    )


def _biased_component(rng, f, n, loaded, sigma_x, clip_level, name):
    """Symmetrically clipped, DC-biased component: c = clip(x, +-A) + A with
    mean power exactly A."""
    k2 = 2 * len(loaded)
    sigma_sym = sigma_x * math.sqrt(n / k2)
    X = _hermitian_block(rng, f, n, sigma_sym, loaded)
    x = _real_idft(X)
    c = np.clip(x, -clip_level, clip_level)
    s = c + clip_level
    return Component(
        name=name,
        subcarriers=np.asarray(loaded),
        spectrum=X[:, loaded],
        time=x,
        unipolar=s,
        sigma_sym=sigma_sym,
        sigma_x=sigma_x,
        power=clip_level,
        clip_level=clip_level,
    )


def _generate(cfg: SchemeConfig, n: int, f: int, eps: float, rng):
    """Batch of f frames; returns (s, components) with s of shape
    (f, frame_length)."""
    _check_divisibility(cfg, n)
    scheme = cfg.scheme

    if scheme == DCO:
        sigma_big = 1.0 / (math.sqrt(2.0) * cfg.nu)
        sigma_x = sigma_big * math.sqrt((n - 2) / n)
        comp = _biased_component(rng, f, n, _full_set(n), sigma_x, eps, "dco")
        return comp.unipolar, [comp]

    if scheme == ACO:
        comp = _aco_component(rng, f, n, _odd_set(n), eps, "aco")
        return comp.unipolar, [comp]

    if scheme == PAM_DMT:
        # Imaginary-only loading: n-2 nonzero time samples of variance
        # sigma_sym^2 each (samples 0 and n/2 vanish identically).
        sigma_sym = _SQRT_2PI * eps * n / (n - 2)
        X = _hermitian_block(rng, f, n, sigma_sym, _full_set(n), imag_only=True)
        x = _real_idft(X)
        s = np.maximum(x, 0.0)
        comp = Component(
            name="pam",
            subcarriers=_full_set(n),
            spectrum=X[:, _full_set(n)],
            time=x,
            unipolar=s,
            sigma_sym=sigma_sym,
            sigma_x=sigma_sym,
            power=eps,
            imag_only=True,
        )
        return s, [comp]

    if scheme == FLIP:
        sigma_x = _SQRT_2PI * eps
        sigma_sym = sigma_x * math.sqrt(n / (n - 2))
        X = _hermitian_block(rng, f, n, sigma_sym, _full_set(n))
        x = _real_idft(X)
        s = np.concatenate([np.maximum(x, 0.0), np.maximum(-x, 0.0)], axis=1)
        comp = Component(
            name="flip",
            subcarriers=_full_set(n),
            spectrum=X[:, _full_set(n)],
            time=x,
            unipolar=s,
            sigma_sym=sigma_sym,
            sigma_x=sigma_x,
            power=eps,
        )
        return s, [comp]

    if scheme == PM:
        # Full complex loading, no Hermitian symmetry; the four blocks carry
        # the rectified parts of Re(x) and Im(x).
        sigma_sym = 2.0 * math.sqrt(math.pi) * eps
        half = sigma_sym / math.sqrt(2.0)
        X = rng.normal(0.0, half, (f, n)) + 1j * rng.normal(0.0, half, (f, n))
        x = np.fft.ifft(X, norm="ortho")
        s = np.concatenate(
            [
                np.maximum(x.real, 0.0),
                np.maximum(-x.real, 0.0),
                np.maximum(x.imag, 0.0),
                np.maximum(-x.imag, 0.0),
            ],
            axis=1,
        )
        comp = Component(
            name="pm",
            subcarriers=np.arange(n),
            spectrum=X,
            time=x,
            unipolar=s,
            sigma_sym=sigma_sym,
            sigma_x=half,
            power=eps,
        )
        return s, [comp]

    if scheme == ADO:
        lam = cfg.lam
        aco = _aco_component(rng, f, n, _odd_set(n), (1.0 - lam) * eps, "aco")
        sigma_x2 = 1.0 / (math.sqrt(2.0) * cfg.nu)
        dco = _biased_component(rng, f, n, _even_set(n), sigma_x2, lam * eps, "dco")
        return aco.unipolar + dco.unipolar, [aco, dco]

    if scheme == HACO:
        lam = cfg.lam
        aco = _aco_component(rng, f, n, _odd_set(n), (1.0 - lam) * eps, "aco")
        # Even-subcarrier imaginary-only component: n-4 nonzero samples of
        # variance sigma_sym^2 / 2 (samples at multiples of n/4 vanish).
        sigma_sym = 2.0 * math.sqrt(math.pi) * lam * eps * n / (n - 4)
        X = _hermitian_block(rng, f, n, sigma_sym, _even_set(n), imag_only=True)
        x = _real_idft(X)
        pam = Component(
            name="pam",
            subcarriers=_even_set(n),
            spectrum=X[:, _even_set(n)],
            time=x,
            unipolar=np.maximum(x, 0.0),
            sigma_sym=sigma_sym,
            sigma_x=sigma_sym / math.sqrt(2.0),
            power=lam * eps,
            imag_only=True,
        )
        return aco.unipolar + pam.unipolar, [aco, pam]

    if scheme == ASCO:
        lam = cfg.lam
        aco1 = _aco_component(rng, f, n, _odd_set(n), (1.0 - lam) * eps, "aco_1")
        aco2 = _aco_component(rng, f, n, _odd_set(n), (1.0 - lam) * eps, "aco_2")
        sigma_x2 = _SQRT_2PI * lam * eps
        sigma_sym = sigma_x2 * math.sqrt(2.0 * n / (n - 4)) if lam > 0 else 0.0
        X = _hermitian_block(rng, f, n, sigma_sym, _even_set(n))
        x2 = _real_idft(X)
        flip_part = np.concatenate([np.maximum(x2, 0.0), np.maximum(-x2, 0.0)], axis=1)
        flip = Component(
            name="flip",
            subcarriers=_even_set(n),
            spectrum=X[:, _even_set(n)],
            time=x2,
            unipolar=flip_part,
            sigma_sym=sigma_sym,
            sigma_x=sigma_x2,
            power=lam * eps,
        )
        s = np.concatenate([aco1.unipolar, aco2.unipolar], axis=1) + flip_part
        comps = [aco1, aco2, flip]
        return s, comps

    if scheme == FDM_UOFDM:
        comps = []
        total = np.zeros((f, n))
        for layer, lam in enumerate(cfg.lambdas, start=1):
            comp = _aco_component(
                rng, f, n, _layer_set(layer, n), lam * eps, f"layer_{layer}"
            )
            comps.append(comp)
            total = total + comp.unipolar
        return total, comps

    if scheme == EU_OFDM:
        layers = cfg.layers
        total_len = 2**layers * n
        total = np.zeros((f, total_len))
        comps = []
        for layer, lam in enumerate(cfg.lambdas, start=1):
            m = 2 ** (layers - layer)
            rep = 2 ** (layer - 1)
            sigma_x = _SQRT_2PI * lam * eps
            sigma_sym = sigma_x * math.sqrt(n / (n - 2))
            X = np.zeros((f, m, n), dtype=complex)
            for sym in range(m):
                X[:, sym, :] = _hermitian_block(rng, f, n, sigma_sym, _full_set(n))
            x = _real_idft(X)
            blocks = np.stack([np.maximum(x, 0.0), np.maximum(-x, 0.0)], axis=2)
            spread = np.broadcast_to(
                blocks[:, :, :, None, :], (f, m, 2, rep, n)
            ).reshape(f, total_len)
            comp = Component(
                name=f"layer_{layer}",
                subcarriers=_full_set(n),
                spectrum=X[:, :, _full_set(n)],
                time=x,
                unipolar=spread,
                sigma_sym=sigma_sym,
                sigma_x=sigma_x,
                power=lam * eps,
                spread=rep,
            )
            comps.append(comp)
            total = total + spread
        return total, comps

    raise ParameterError(f"unknown scheme {cfg.scheme!r}")


def modulate(cfg: SchemeConfig, params: SimParams, rng=None, eps: float = 1.0):
    """One unipolar frame plus the recorded per-component draws.

    ``eps`` is the optical power budget the frame is scaled to (1 by
    default; everything scales linearly in it).
    """
    if rng is None:
        rng = _stream(params.seed, 0)
    s, comps = _generate(cfg, params.n, 1, eps, rng)
    frame = Frame(samples=s[0], nonneg=True)
    sliced = [
        Component(
            name=c.name,
            subcarriers=c.subcarriers,
            spectrum=c.spectrum[0],
            time=c.time[0],
            unipolar=c.unipolar[0],
            sigma_sym=c.sigma_sym,
            sigma_x=c.sigma_x,
            power=c.power,
            clip_level=c.clip_level,
            imag_only=c.imag_only,
            spread=c.spread,
        )
        for c in comps
    ]
    return frame, sliced


# ---------------------------------------------------------------------------
# Receivers
# ---------------------------------------------------------------------------


def _receive_single(cfg: SchemeConfig, n: int, eps: float, r: np.ndarray):
    """Observations of a single-component scheme on its information set.

    ``r`` has shape (f, frame_length); returns (subcarriers, values)."""
    scheme = cfg.scheme
    if scheme == DCO:
        k = _full_set(n)
        return k, _dft(r - eps)[:, k]
    if scheme == ACO:
        k = _odd_set(n)
        return k, _dft(r)[:, k]
    if scheme == PAM_DMT:
        k = _full_set(n)
        return k, _dft(r)[:, k].imag
    if scheme == FLIP:
        k = _full_set(n)
        return k, _dft(r[:, :n] - r[:, n:])[:, k]
    if scheme == PM:
        y = (r[:, :n] - r[:, n : 2 * n]) + 1j * (r[:, 2 * n : 3 * n] - r[:, 3 * n :])
        return np.arange(n), np.fft.fft(y, norm="ortho")
    raise ParameterError(f"{scheme} is multiplexed; use genie_sic_demodulate")


def demodulate_single(
    cfg: SchemeConfig, params: SimParams, received, eps: float = 1.0
) -> SubcarrierObservations:
    """Receiver transform of a single-component scheme, restricted to its
    information-bearing subcarriers."""
    r = received.samples if isinstance(received, Frame) else np.asarray(received)
    r = np.atleast_2d(r)
    if r.shape[1] != frame_length(cfg, params.n):
        raise ParameterError(
            f"frame length {r.shape[1]} does not match {cfg.scheme} at n={params.n}"
        )
    k, values = _receive_single(cfg, params.n, eps, r)
    return SubcarrierObservations(subcarriers=k, values=values[0] if values.shape[0] == 1 else values)


def _genie_receive(cfg: SchemeConfig, n: int, eps: float, r: np.ndarray, comps):
    """Per-component observations after subtracting the true earlier
    components (genie-aided stand-in for error-free successive decoding)."""
    scheme = cfg.scheme
    by_name = {c.name: c for c in comps}
    out: dict[str, tuple[np.ndarray, np.ndarray]] = {}

    if scheme == ADO:
        lam = cfg.lam
        odd = _odd_set(n)
        even = _even_set(n)
        out["aco"] = (odd, _dft(r - lam * eps)[:, odd])
        y2 = r - by_name["aco"].unipolar - lam * eps
        out["dco"] = (even, _dft(y2)[:, even])
        return out

    if scheme == HACO:
        odd = _odd_set(n)
        even = _even_set(n)
        out["aco"] = (odd, _dft(r)[:, odd])
        y2 = r - by_name["aco"].unipolar
        out["pam"] = (even, _dft(y2)[:, even].imag)
        return out

    if scheme == ASCO:
        odd = _odd_set(n)
        even = _even_set(n)
        out["aco_1"] = (odd, _dft(r[:, :n])[:, odd])
        out["aco_2"] = (odd, _dft(r[:, n:])[:, odd])
        y = (r[:, :n] - by_name["aco_1"].unipolar) - (r[:, n:] - by_name["aco_2"].unipolar)
        out["flip"] = (even, _dft(y)[:, even])
        return out

    if scheme == FDM_UOFDM:
        y = r.astype(float, copy=True)
        for layer in range(1, cfg.layers + 1):
            k = _layer_set(layer, n)
            out[f"layer_{layer}"] = (k, _dft(y)[:, k])
            y = y - by_name[f"layer_{layer}"].unipolar
        return out

    if scheme == EU_OFDM:
        layers = cfg.layers
        k = _full_set(n)
        y = r.astype(float, copy=True)
        for layer in range(1, layers + 1):
            comp = by_name[f"layer_{layer}"]
            m = 2 ** (layers - layer)
            rep = comp.spread
            grouped = y.reshape(y.shape[0], m, 2, rep, n)
            combined = grouped[:, :, 0].mean(axis=2) - grouped[:, :, 1].mean(axis=2)
            out[f"layer_{layer}"] = (k, _dft(combined)[:, :, k])
            y = y - comp.unipolar
        return out

    raise ParameterError(f"{scheme} is single-component; use demodulate_single")


def genie_sic_demodulate(
    cfg: SchemeConfig, params: SimParams, received, components, eps: float = 1.0
) -> dict[str, SubcarrierObservations]:
    """Observations per multiplexed component, cancelling earlier components
    with their true transmitted signals."""
    r = received.samples if isinstance(received, Frame) else np.asarray(received)
    r = np.atleast_2d(r)
    comps = [
        Component(
            name=c.name,
            subcarriers=c.subcarriers,
            spectrum=c.spectrum,
            time=c.time,
            unipolar=np.atleast_2d(c.unipolar),
            sigma_sym=c.sigma_sym,
            sigma_x=c.sigma_x,
            power=c.power,
            clip_level=c.clip_level,
            imag_only=c.imag_only,
            spread=c.spread,
        )
        for c in components
    ]
    if not comps:
        raise ParameterError("genie demodulation requires the true component signals")
    raw = _genie_receive(cfg, params.n, eps, r, comps)
    return {
        name: SubcarrierObservations(subcarriers=k, values=v[0] if v.shape[0] == 1 else v)
        for name, (k, v) in raw.items()
    }


# ---------------------------------------------------------------------------
# Moment estimation
# ---------------------------------------------------------------------------


def _chunk_sizes(frames: int) -> list[int]:
    # Fixed block partition: pure function of the frame count, so estimates
    # do not depend on scheduling.
    chunk = max(256, min(2048, -(-frames // 16)))
    sizes = [chunk] * (frames // chunk)
    if frames % chunk:
        sizes.append(frames % chunk)
    return sizes


def _single_component_refs(cfg, n, eps, comp, s, z):
    """(X, C, W) on the information set: transmitted symbols, noiseless
    received symbols, and the noise that actually entered the observation."""
    scheme = cfg.scheme
    if scheme == DCO:
        k = _full_set(n)
        return comp.spectrum, _dft(s - eps)[:, k], _dft(z)[:, k]
    if scheme == ACO:
        k = _odd_set(n)
        return comp.spectrum, _dft(s)[:, k], _dft(z)[:, k]
    if scheme == PAM_DMT:
        k = _full_set(n)
        return comp.spectrum.imag, _dft(s)[:, k].imag, _dft(z)[:, k].imag
    if scheme == FLIP:
        k = _full_set(n)
        return (
            comp.spectrum,
            _dft(s[:, :n] - s[:, n:])[:, k],
            _dft(z[:, :n] - z[:, n:])[:, k],
        )
    if scheme == PM:
        zc = (z[:, :n] - z[:, n : 2 * n]) + 1j * (z[:, 2 * n : 3 * n] - z[:, 3 * n :])
        sc = (s[:, :n] - s[:, n : 2 * n]) + 1j * (s[:, 2 * n : 3 * n] - s[:, 3 * n :])
        return comp.spectrum, np.fft.fft(sc, norm="ortho"), np.fft.fft(zc, norm="ortho")
    raise ParameterError(f"moment estimation handles single-component schemes, not {scheme}")


_SNR_CLASS = {DCO: "data", ACO: "odd", PAM_DMT: "imag", FLIP: "data", PM: "data"}


def estimate_moments(cfg: SchemeConfig, ch: ChannelSpec, params: SimParams) -> MomentEstimate:
    """Pooled sample moments of a single-component scheme's equivalent channel.

    delta_hat is the exact cross/auto moment ratio
    |E[Y^H X]|^2 / (K sigma_X^2 (E||C||^2 + E||W||^2)) pooled over frames, so
    delta/(1-delta) estimates the equivalent-channel SNDR. alpha_hat is the
    matching scaled cross moment Re E[Y^H X] / (K sigma_X^2); d2_hat the
    time-domain regression residual power of the scheme's clipper.
    """
    if cfg.scheme not in SINGLE_COMPONENT_SCHEMES:
        raise ParameterError(f"moment estimation handles single-component schemes, not {cfg.scheme}")
    if params.frames < 1000:
        raise ParameterError(f"need at least 1000 frames, got {params.frames}")

    n, eps, sz = params.n, ch.eps, ch.sigma_z
    per_chunk = []
    tot = dict(yx=0.0 + 0.0j, xx=0.0, yy=0.0, cc=0.0, ww=0.0, t_cx=0.0, t_xx=0.0, t_cc=0.0)
    n_obs = 0
    n_time = 0
    sigma_sym = None

    for idx, f in enumerate(_chunk_sizes(params.frames)):
        rng = _stream(params.seed, idx)
        s, comps = _generate(cfg, n, f, eps, rng)
        comp = comps[0]
        sigma_sym = comp.sigma_sym
        z = rng.normal(0.0, sz, s.shape)
        _, y = _receive_single(cfg, n, eps, s + z)
        x_ref, c_ref, w_ref = _single_component_refs(cfg, n, eps, comp, s, z)

        yx = complex(np.sum(np.conj(y) * x_ref))
        xx = float(np.sum(np.abs(x_ref) ** 2))
        yy = float(np.sum(np.abs(y) ** 2))
        cc = float(np.sum(np.abs(c_ref) ** 2))
        ww = float(np.sum(np.abs(w_ref) ** 2))

        # Time-domain clipper moments: c is the scheme's noiseless zero-mean
        # transmit distortion reference (clip output or rectified signal).
        if cfg.scheme == DCO:
            c_time = s - eps
            x_time = comp.time
        elif cfg.scheme in (ACO, PAM_DMT):
            c_time = s
            x_time = comp.time
        else:  # FLIP / PM carry the signal losslessly; the residual is zero.
            c_time = comp.time
            x_time = comp.time
        if np.iscomplexobj(x_time):
            t_cx = float(np.sum(c_time.real * x_time.real + c_time.imag * x_time.imag))
            t_xx = float(np.sum(np.abs(x_time) ** 2))
            t_cc = float(np.sum(np.abs(c_time) ** 2))
        else:
            t_cx = float(np.sum(c_time * x_time))
            t_xx = float(np.sum(x_time * x_time))
            t_cc = float(np.sum(c_time * c_time))

        k_count = y.shape[1]
        n_obs += f * k_count
        n_time += x_time.size
        for key, val in zip(
            ("yx", "xx", "yy", "cc", "ww", "t_cx", "t_xx", "t_cc"),
            (yx, xx, yy, cc, ww, t_cx, t_xx, t_cc),
        ):
            tot[key] += val

        per_chunk.append(
            _moment_stats(
                yx, xx, yy, cc, ww, t_cx, t_xx, t_cc, f, k_count, sigma_sym, x_time.size
            )
        )

    k_count = n_obs // params.frames
    stats = _moment_stats(
        tot["yx"], tot["xx"], tot["yy"], tot["cc"], tot["ww"],
        tot["t_cx"], tot["t_xx"], tot["t_cc"],
        params.frames, k_count, sigma_sym, n_time,
    )
    ses = _chunk_se(per_chunk)
    cls = _SNR_CLASS[cfg.scheme]
    return MomentEstimate(
        alpha_hat=stats["alpha"],
        d2_hat=stats["d2"],
        delta_hat=stats["delta"],
        snr_e_hat={cls: stats["snr_e"]},
        frames=params.frames,
        seed=params.seed,
        alpha_se=ses["alpha"],
        d2_se=ses["d2"],
        delta_se=ses["delta"],
        snr_e_se={cls: ses["snr_e"]},
    )


def _moment_stats(yx, xx, yy, cc, ww, t_cx, t_xx, t_cc, f, k_count, sigma_sym, n_time):
    mean_yx = yx / f
    delta = abs(mean_yx) ** 2 / (k_count * sigma_sym**2 * (cc + ww) / f)
    alpha = (yx.real / f) / (k_count * sigma_sym**2)
    a_hat = yx / xx
    noise = (yy - abs(yx) ** 2 / xx) / (f * k_count)
    snr_e = abs(a_hat) ** 2 * sigma_sym**2 / noise
    # Regression residual power of the clipper, per time sample.
    d2 = (t_cc - t_cx * t_cx / t_xx) / n_time if t_xx > 0 else 0.0
    return {
        "alpha": float(alpha),
        "delta": float(delta),
        "snr_e": float(snr_e),
        "d2": float(d2),
    }


def _chunk_se(per_chunk: list[dict]) -> dict[str, float]:
    out = {}
    m = len(per_chunk)
    for key in ("alpha", "d2", "delta", "snr_e"):
        vals = np.array([c[key] for c in per_chunk])
        out[key] = float(vals.std(ddof=1) / math.sqrt(m)) if m >= 2 else float("nan")
    return out


# ---------------------------------------------------------------------------
# Autocorrelation check
# ---------------------------------------------------------------------------


def check_autocorrelation(params: SimParams, sigma_sym: float = 1.0) -> AutocorrReport:
    """Three-case circular autocorrelation check of the Hermitian-ICG time
    signal (the biased scheme's pre-clip input):

        lag 0            -> ((n-2)/n) sigma_sym^2
        odd lags         -> 0
        even lags != 0   -> -(2/n) sigma_sym^2

    Each case must agree with its prediction within five standard errors.
    """
    n = params.n
    acc = np.zeros(n)
    acc2 = np.zeros(n)
    total = 0
    for idx, f in enumerate(_chunk_sizes(params.frames)):
        rng = _stream(params.seed, idx)
        X = _hermitian_block(rng, f, n, sigma_sym, _full_set(n))
        x = _real_idft(X)
        spec = np.abs(np.fft.fft(x, axis=1)) ** 2
        corr = np.fft.ifft(spec, axis=1).real / n
        acc += corr.sum(axis=0)
        acc2 += (corr**2).sum(axis=0)
        total += f
    mean = acc / total
    se = np.sqrt(np.maximum(acc2 / total - mean**2, 0.0) / total)
    se = np.maximum(se, 1e-300)

    var = sigma_sym * sigma_sym
    z0 = (mean[0] - (n - 2) / n * var) / se[0]
    odd = np.arange(1, n, 2)
    even = np.arange(2, n, 2)
    z_odd = np.max(np.abs(mean[odd] / se[odd]))
    z_even = np.max(np.abs((mean[even] + 2.0 / n * var) / se[even]))

    worst_even = mean[even][np.argmax(np.abs((mean[even] + 2.0 / n * var) / se[even]))]
    checks = (
        Check("lag0", (n - 2) / n * var, float(mean[0]), 5.0, "z", bool(abs(z0) <= 5.0), float(se[0])),
        Check("odd_lags", 0.0, float(np.max(np.abs(mean[odd]))), 5.0, "z", bool(z_odd <= 5.0), float(np.max(se[odd]))),
        Check("even_lags", -2.0 / n * var, float(worst_even), 5.0, "z", bool(z_even <= 5.0), float(np.max(se[even]))),
    )
    return AutocorrReport(checks=checks)


# ---------------------------------------------------------------------------
# Validation report
# ---------------------------------------------------------------------------


def _rel_check(name, predicted, estimated, tol, stderr=float("nan")) -> Check:
    predicted, estimated = float(predicted), float(estimated)
    rel = abs(estimated - predicted) / abs(predicted) if predicted != 0 else abs(estimated)
    return Check(name, predicted, estimated, float(tol), "rel", bool(rel <= tol), float(stderr))


def _le_check(name, bound, estimated) -> Check:
    return Check(name, float(bound), float(estimated), float(bound), "le", bool(estimated <= bound))


def _structural_checks(cfg, ch, n, s, comps) -> list[Check]:
    checks = [
        Check("unipolar_min", 0.0, float(s.min()), 0.0, "le", bool(s.min() >= 0.0)),
        _rel_check("mean_power", ch.eps, float(s.mean()), 0.01),
    ]
    for comp in comps:
        if comp.power > 0:
            checks.append(
                _rel_check(f"power_{comp.name}", comp.power, float(comp.unipolar.mean()), 0.01)
            )
    # Distortion orthogonality for every clipped component, with the analytic
    # clipper gain (a fitted gain would zero the correlation by construction).
    for comp in comps:
        d, x = _clip_residual(comp)
        if d is None:
            continue
        f = d.shape[0]
        per_frame = (d * x).reshape(f, -1).sum(axis=1)
        checks.append(_mean_zero_check(f"orthogonality_time_{comp.name}", per_frame))
        d_spec = _dft(d)[..., comp.subcarriers]
        x_spec = comp.spectrum
        cross = (np.conj(d_spec) * x_spec).reshape(f, -1).sum(axis=1)
        checks.append(_mean_zero_check(f"orthogonality_freq_{comp.name}", cross))
    return checks


def _mean_zero_check(name: str, per_frame: np.ndarray) -> Check:
    """z-test that the mean of per-frame statistics is zero within 5 SE
    (real and imaginary parts tested jointly for complex statistics)."""
    f = per_frame.shape[0]
    parts = [per_frame.real]
    if np.iscomplexobj(per_frame):
        parts.append(per_frame.imag)
    z_max, worst_mean, worst_se = 0.0, 0.0, 0.0
    for part in parts:
        se = float(part.std(ddof=1)) / math.sqrt(f)
        se = max(se, 1e-300)
        z = abs(float(part.mean())) / se
        if z >= z_max:
            z_max, worst_mean, worst_se = z, float(part.mean()), se
    return Check(name, 0.0, worst_mean, 5.0, "z", bool(z_max <= 5.0), worst_se)


def _clip_residual(comp: Component):
    """Bussgang residual d = c - alpha x of a clipped component (None when
    the component's transform is lossless)."""
    if comp.clip_level is not None:
        if comp.clip_level == 0.0 or comp.sigma_x == 0.0:
            return None, None
        m = clipstats.symmetric_clip_moments(comp.sigma_x, comp.clip_level)
        c = comp.unipolar - comp.clip_level
        return c - m.alpha * comp.time, comp.time
    if comp.name.startswith(("aco", "pam", "layer")) and comp.spread == 1 and comp.unipolar.shape == comp.time.shape:
        if comp.sigma_x == 0.0:
            return None, None
        return comp.unipolar - 0.5 * comp.time, comp.time
    return None, None


def _distortion_confinement(cfg, n, comps) -> list[Check]:
    checks = []
    if cfg.scheme == ACO:
        comp = comps[0]
        d = comp.unipolar - 0.5 * comp.time
        p = np.mean(np.abs(_dft(d)) ** 2, axis=0)
        odd_power = p[1::2].sum()
        even_power = p[0::2].sum()
        checks.append(_le_check("confinement_odd_leakage", 1e-3, odd_power / even_power))
    if cfg.scheme == FDM_UOFDM:
        for layer, comp in enumerate(comps, start=1):
            if comp.sigma_x == 0:
                continue
            d = comp.unipolar - 0.5 * comp.time
            p = np.mean(np.abs(_dft(d)) ** 2, axis=0)
            own_and_earlier = np.concatenate(
                [_layer_set(j, n) for j in range(1, layer + 1)]
            )
            mirror = (n - own_and_earlier) % n
            leak = p[own_and_earlier].sum() + p[mirror].sum()
            checks.append(
                _le_check(f"confinement_layer_{layer}", 1e-3, leak / p.sum())
            )
    return checks


def validation_report(cfg: SchemeConfig, ch: ChannelSpec, params: SimParams) -> dict:
    """Predicted-versus-estimated report for every invariant the scheme is
    expected to satisfy; drives the ``validate`` CLI command."""
    n = params.n
    _check_divisibility(cfg, n)
    checks: list[Check] = []

    struct_frames = min(params.frames, 4000)
    rng = _stream(params.seed, 10_000)
    s, comps = _generate(cfg, n, struct_frames, ch.eps, rng)
    checks.extend(_structural_checks(cfg, ch, n, s, comps))
    checks.extend(_distortion_confinement(cfg, n, comps))

    if cfg.scheme in SINGLE_COMPONENT_SCHEMES:
        checks.extend(_single_component_checks(cfg, ch, params))
    else:
        checks.extend(_multiplexed_checks(cfg, ch, params, s, comps, rng))

    if cfg.scheme == DCO:
        rep = check_autocorrelation(SimParams(n=n, frames=struct_frames, seed=params.seed + 1))
        checks.extend(rep.checks)

    return {
        "scheme": cfg.scheme,
        "snr_db": ch.snr_db(),
        "n": n,
        "frames": params.frames,
        "seed": params.seed,
        "checks": checks,
        "passed": all(c.passed for c in checks),
    }


def _single_component_checks(cfg, ch, params) -> list[Check]:
    n, eps, sz = params.n, ch.eps, ch.sigma_z
    est = estimate_moments(cfg, ch, params)
    checks = []
    cls = _SNR_CLASS[cfg.scheme]
    snr_e = est.snr_e_hat[cls]

    if cfg.scheme == DCO:
        sigma_big2 = 1.0 / (2.0 * cfg.nu**2)
        sigma_x = math.sqrt((n - 2) / n * sigma_big2)
        m = clipstats.symmetric_clip_moments(sigma_x, eps)
        checks.append(_rel_check("alpha", m.alpha, est.alpha_hat, 0.005, est.alpha_se))
        checks.append(_rel_check("d2", m.d2, est.d2_hat, 0.01, est.d2_se))
        sndr_pred = m.alpha**2 * sigma_big2 / (m.d2 + sz**2)
        sndr_hat = est.delta_hat / (1.0 - est.delta_hat)
        checks.append(_rel_check("sndr_identity", sndr_pred, sndr_hat, 0.02, est.delta_se))
        rate_hat = 0.5 * math.log2(1.0 + sndr_hat)
        checks.append(_rel_check("rate_proxy", rates.rate_dco(ch, cfg.nu), rate_hat, 0.02))
    else:
        table = {
            ACO: lambda c: c.sigma_sym**2 / (4 * sz**2),
            PAM_DMT: lambda c: c.sigma_sym**2 / (2 * sz**2),
            FLIP: lambda c: c.sigma_sym**2 / (2 * sz**2),
            PM: lambda c: c.sigma_sym**2 / (4 * sz**2),
        }
        rng = _stream(params.seed, 0)
        _, comps = _generate(cfg, n, 1, eps, rng)
        pred = table[cfg.scheme](comps[0])
        checks.append(_rel_check("snr_e", pred, snr_e, 0.015, est.snr_e_se[cls]))
        rate_hat = rate_prefactor(cfg, n) * math.log2(1.0 + snr_e)
        checks.append(_rel_check("rate_vs_family", rates.rate_aco_family(ch), rate_hat, 0.015))
    return checks


def _multiplexed_checks(cfg, ch, params, s, comps, rng) -> list[Check]:
    n, eps, sz = params.n, ch.eps, ch.sigma_z
    f = s.shape[0]
    checks = []
    z = rng.normal(0.0, sz, s.shape)
    raw = _genie_receive(cfg, n, eps, s + z, comps)
    by_name = {c.name: c for c in comps}

    if cfg.scheme == ADO:
        dco = by_name["dco"]
        k, y = raw["dco"]
        if dco.clip_level > 0:
            m = clipstats.symmetric_clip_moments(dco.sigma_x, dco.clip_level)
            resid = y - m.alpha * dco.spectrum
            # The biased component is n/2-periodic, so its distortion lives on
            # the n/2 even bins only: per-bin power is twice the per-sample
            # power.
            d2_hat = (float(np.mean(np.abs(resid) ** 2)) - sz**2) / 2.0
            d2_pred = clipstats.ado_dco_distortion(dco.sigma_x, dco.clip_level)
            checks.append(_rel_check("even_residual_distortion", d2_pred, d2_hat, 0.02))
        # The biased component is n/2-periodic, so none of its energy lands
        # on odd subcarriers.
        p = np.mean(np.abs(_dft(dco.unipolar - dco.power)) ** 2, axis=0)
        checks.append(_le_check("dco_odd_leakage", 1e-3, p[1::2].sum() / max(p.sum(), 1e-300)))

    if cfg.scheme in (HACO, ASCO):
        second = "pam" if cfg.scheme == HACO else "flip"
        comp = by_name[second]
        if comp.sigma_sym > 0:
            # Odd-subcarrier observations are clipping-noise-free: check the
            # noiseless residual against the halved first component.
            aco = by_name["aco" if cfg.scheme == HACO else "aco_1"]
            block = s[:, :n] if cfg.scheme == ASCO else s
            noiseless = _dft(block)[:, _odd_set(n)]
            resid = noiseless - 0.5 * aco.spectrum
            rel = float(np.mean(np.abs(resid) ** 2) / np.mean(np.abs(0.5 * aco.spectrum) ** 2)) if aco.sigma_sym > 0 else 0.0
            checks.append(_le_check("odd_clipping_noise", 1e-3, rel))
            k, y = raw[second]
            ref = comp.spectrum.imag if comp.imag_only else comp.spectrum
            a_hat = np.sum(np.conj(y) * ref).real / np.sum(np.abs(ref) ** 2)
            noise = float(np.mean(np.abs(y - a_hat * ref) ** 2))
            snr_hat = abs(a_hat) ** 2 * comp.sigma_sym**2 / noise
            pred = comp.sigma_sym**2 / (2 * sz**2)
            checks.append(_rel_check(f"snr_e_{second}", pred, snr_hat, 0.02))

    if cfg.scheme == FDM_UOFDM:
        for layer in range(1, cfg.layers + 1):
            comp = by_name[f"layer_{layer}"]
            if comp.sigma_sym == 0:
                continue
            k, y = raw[f"layer_{layer}"]
            a_hat = np.sum(np.conj(y) * comp.spectrum).real / np.sum(np.abs(comp.spectrum) ** 2)
            noise = float(np.mean(np.abs(y - a_hat * comp.spectrum) ** 2))
            snr_hat = abs(a_hat) ** 2 * comp.sigma_sym**2 / noise
            checks.append(
                _rel_check(f"snr_e_layer_{layer}", comp.sigma_sym**2 / (4 * sz**2), snr_hat, 0.02)
            )

    if cfg.scheme == EU_OFDM:
        for layer in range(1, cfg.layers + 1):
            comp = by_name[f"layer_{layer}"]
            if comp.sigma_sym == 0:
                continue
            k, y = raw[f"layer_{layer}"]
            ref = comp.spectrum
            a_hat = np.sum(np.conj(y) * ref).real / np.sum(np.abs(ref) ** 2)
            noise = float(np.mean(np.abs(y - a_hat * ref) ** 2))
            pred_noise = 2.0 * sz**2 / comp.spread
            checks.append(_rel_check(f"despread_noise_layer_{layer}", pred_noise, noise, 0.03))
    return checks
