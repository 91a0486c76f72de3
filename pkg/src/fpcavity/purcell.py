"""Vibration-averaged Purcell enhancement for a length-fluctuating cavity.

The bare Purcell factor F_P = 3/(4 pi^2) (c/(n nu))^3 Q/V is degraded when
the cavity resonance jitters against the emitter. For Gaussian length
fluctuations of RMS sigma and a mode dispersion slope s, the frequency
jitter is sigma_nu = |s|*sigma and the vibration-averaged factor has the
closed form

    F_P,vib = F_P * sqrt(pi) * t * erfcx(t),   t = nu / (2*sqrt(2)*Q*sigma_nu)

where erfcx(t) = exp(t^2)*erfc(t) is the scaled complementary error
function. Because erfcx is monotone decreasing with erfcx(0) = 1, F_P,vib
grows monotonically with Q towards the supremum

    F_P,max = 3/(4 pi^2) (c/(n nu))^3 (1/V) sqrt(pi/(2 sigma_nu^2)) nu/2

which no finite Q attains. erfcx must never be expanded into its two
overflowing factors; scipy's implementation is accurate to ~1e-15 over
the full range (validated against an arbitrary-precision oracle in the
test suite).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.special import erfcx

from .errors import ConfigError, DomainError

_PRESET_RESOURCE = "presets.json"


@dataclass(frozen=True)
class PurcellParams:
    """Everything the vibration-averaged Purcell formulas need.

    frequency [Hz], mode_volume [m^3], dispersion_slope [Hz/m] (sign
    irrelevant, only |s| enters), rms_length_fluctuation [m].
    ``quality_factor`` may be None for the Q-independent bound.
    """

    frequency: float
    refractive_index: float
    mode_volume: float
    quality_factor: float | None = None
    dispersion_slope: float = 0.0
    rms_length_fluctuation: float = 0.0

    def __post_init__(self):
        if self.frequency <= 0:
            raise DomainError("frequency must be positive")
        if self.refractive_index < 1:
            raise DomainError("refractive index must be >= 1")
        if self.mode_volume <= 0:
            raise DomainError("mode volume must be positive")
        if self.quality_factor is not None and self.quality_factor <= 0:
            raise DomainError("quality factor must be positive")
        if self.rms_length_fluctuation < 0:
            raise DomainError("RMS length fluctuation must be non-negative")

    @property
    def sigma_nu(self) -> float:
        """RMS resonance-frequency fluctuation |s|*sigma in Hz."""
        return abs(self.dispersion_slope) * self.rms_length_fluctuation

    @property
    def wavelength(self) -> float:
        return C_LIGHT / self.frequency


@dataclass(frozen=True)
class PurcellResult:
    bare: float
    effective: float
    bound: float


def purcell_factor(params: PurcellParams) -> float:
    """Bare Purcell factor 3/(4 pi^2) (c/(n nu))^3 Q/V."""
    if params.quality_factor is None:
        raise DomainError("bare Purcell factor requires a quality factor")
    scale = (C_LIGHT / (params.refractive_index * params.frequency)) ** 3
    return 3.0 / (4.0 * np.pi**2) * scale * params.quality_factor / params.mode_volume


def spectral_overlap(frequency: float, quality_factor: float, detuning) -> float:
    """Lorentzian emitter-cavity overlap 1/(1 + 4 Q^2 detuning^2 / nu^2)."""
    if frequency <= 0 or quality_factor <= 0:
        raise DomainError("frequency and quality factor must be positive")
    x = 2.0 * quality_factor * np.asarray(detuning, dtype=float) / frequency
    out = 1.0 / (1.0 + x * x)
    return float(out) if np.isscalar(detuning) else out


def vibration_pdf(sigma_nu: float, detuning):
    """Gaussian probability density of the resonance-frequency detuning [1/Hz]."""
    if sigma_nu <= 0:
        raise DomainError("sigma_nu must be positive (sigma=0 is the delta limit)")
    d = np.asarray(detuning, dtype=float)
    out = np.exp(-(d * d) / (2.0 * sigma_nu**2)) / np.sqrt(2.0 * np.pi * sigma_nu**2)
    return float(out) if np.isscalar(detuning) else out


def effective_purcell(params: PurcellParams) -> float:
    """Vibration-averaged Purcell factor (closed form of the overlap integral)."""
    bare = purcell_factor(params)
    sigma_nu = params.sigma_nu
    if sigma_nu == 0.0:
        return bare
    t = params.frequency / (2.0 * np.sqrt(2.0) * params.quality_factor * sigma_nu)
    return bare * np.sqrt(np.pi) * t * erfcx(t)


def max_purcell(params: PurcellParams) -> float:
    """Q-independent supremum of the vibration-averaged Purcell factor.

    Approached monotonically as Q grows without bound; exposed as a closed
    form because no finite Q maximizes it.
    """
    sigma_nu = params.sigma_nu
    if sigma_nu <= 0:
        raise DomainError(
            "the vibration bound diverges for sigma*|s| = 0; use purcell_factor instead"
        )
    scale = (C_LIGHT / (params.refractive_index * params.frequency)) ** 3
    return (
        3.0 / (4.0 * np.pi**2)
        * scale / params.mode_volume
        * np.sqrt(np.pi / (2.0 * sigma_nu**2))
        * params.frequency / 2.0
    )


def design_curve(params: PurcellParams, sigma_range: tuple[float, float], points: int = 50):
    """Log-spaced sweep of the attainable-Purcell bound over RMS fluctuation.

    Returns (sigmas, bounds) arrays; ``params.rms_length_fluctuation`` is
    ignored in favor of the sweep values.
    """
    lo, hi = float(sigma_range[0]), float(sigma_range[1])
    if lo <= 0 or hi <= lo:
        raise DomainError("sigma range must be positive and non-empty")
    if points < 2:
        raise DomainError("need at least two sweep points")
    sigmas = np.logspace(np.log10(lo), np.log10(hi), points)
    bounds = np.array([
        max_purcell(
            PurcellParams(
                frequency=params.frequency,
                refractive_index=params.refractive_index,
                mode_volume=params.mode_volume,
                dispersion_slope=params.dispersion_slope,
                rms_length_fluctuation=s,
            )
        )
        for s in sigmas
    ])
    return sigmas, bounds


def load_presets() -> dict:
    """The published cavity parameter sets shipped with the package."""
    raw = resources.files("fpcavity").joinpath("data", _PRESET_RESOURCE).read_text()
    doc = json.loads(raw)
    if doc.get("version") != 1:
        raise ConfigError(f"unsupported preset registry version {doc.get('version')!r}")
    return doc["presets"]


def preset_params(name: str, sigma: float = 0.0) -> PurcellParams:
    """Build PurcellParams from a named preset at RMS fluctuation ``sigma``."""
    presets = load_presets()
    if name not in presets:
        known = ", ".join(sorted(presets))
        raise ConfigError(f"unknown preset {name!r} (known: {known})")
    p = presets[name]
    nu = C_LIGHT / p["wavelength_m"]
    lam = p["wavelength_m"]
    return PurcellParams(
        frequency=nu,
        refractive_index=p["refractive_index"],
        mode_volume=p["mode_volume_lambda3"] * lam**3,
        dispersion_slope=p["dispersion_slope_hz_per_m"],
        rms_length_fluctuation=sigma,
    )
