"""Transmission-to-displacement conversion and vibration statistics.

The cavity is parked on one flank of its Lorentzian resonance; inverting

    T(x) = bg + T0 / (1 + (2x/kappa_x)^2)

maps each transmission sample onto the instantaneous cavity-length offset
from resonance. Overshooting past the resonance peak or into the far wing
cannot be inverted and is clipped (and counted) instead - too much of it
means the vibration level would be underestimated, which is flagged as a
quality error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal, stats

from .errors import DomainError, QualityError
from .traces import DisplacementTrace, LorentzianResonance, SpectrumResult, TransmissionTrace

#: fraction of clipped samples above which the conversion refuses to pass
CLIP_FRACTION_LIMIT = 0.01

#: default displacement assigned to samples in the untrustworthy far wing,
#: in units of the spatial linewidth
MAX_EXCURSION_LINEWIDTHS = 5.0


def transmission_to_displacement(
    trace: TransmissionTrace,
    cal: LorentzianResonance,
    side: str = "right",
    *,
    floor_fraction: float = 1e-3,
    max_excursion: float | None = None,
    clip_fraction_limit: float = CLIP_FRACTION_LIMIT,
) -> DisplacementTrace:
    """Invert the Lorentzian flank into a mean-subtracted displacement trace.

    ``cal`` must carry the spatial linewidth. ``side`` declares which flank
    of the resonance the cavity sits on ('right' = larger length). Samples
    at or above the peak map to zero displacement; samples within
    ``floor_fraction * T0`` of the background are clipped to
    ``max_excursion`` (default 5 spatial linewidths). Both counts land in
    the output meta; only the far-wing clips trip the quality gate, since
    resonance crossings are what the gaussianity check is for.
    """
    if cal.fwhm_spatial is None:
        raise DomainError("calibration must include the spatial linewidth")
    if side not in ("left", "right"):
        raise DomainError("side must be 'left' or 'right'")
    kx = cal.fwhm_spatial
    if max_excursion is None:
        max_excursion = MAX_EXCURSION_LINEWIDTHS * kx
    sgn = 1.0 if side == "right" else -1.0

    above = trace.samples - cal.background
    floor = floor_fraction * cal.amplitude
    overshoot_high = above >= cal.amplitude
    clipped_low = above <= floor

    ratio = np.empty_like(above)
    ok = ~(overshoot_high | clipped_low)
    ratio[ok] = cal.amplitude / above[ok] - 1.0
    x = np.zeros_like(above)
    x[ok] = sgn * (kx / 2.0) * np.sqrt(ratio[ok])
    x[clipped_low] = sgn * max_excursion

    n_high = int(np.count_nonzero(overshoot_high))
    n_low = int(np.count_nonzero(clipped_low))
    frac = n_low / above.size
    if frac > clip_fraction_limit:
        raise QualityError(
            f"{frac:.1%} of samples clipped in the far wing; "
            "the vibration level would be underestimated"
        )
    x -= x.mean()
    meta = dict(trace.meta)
    meta.update(
        side=side,
        clipped_low=n_low,
        overshoot_high=n_high,
        clipped_fraction=frac,
        spatial_linewidth=kx,
    )
    return DisplacementTrace(samples=x, sample_rate=trace.sample_rate, meta=meta)


@dataclass
class GaussianityResult:
    n_samples: int
    ks_distance: float
    excess_kurtosis: float
    threshold: float
    passed: bool
    histogram_counts: np.ndarray
    histogram_edges: np.ndarray


def gaussianity_check(
    disp: DisplacementTrace, *, ks_threshold: float = 0.05, bins: int = 60
) -> GaussianityResult:
    """Compare the displacement histogram against a matched Gaussian.

    Returns the Kolmogorov-Smirnov distance to a normal distribution with
    the trace's mean and standard deviation plus the excess kurtosis.
    Passing means the trace stayed on the invertible half of the fringe.
    """
    x = disp.samples
    if x.size < 1000:
        raise DomainError("gaussianity check needs at least 1000 samples")
    mu = float(np.mean(x))
    sd = float(np.std(x))
    if sd == 0:
        raise DomainError("constant trace has no distribution to test")
    ks = float(stats.kstest(x, "norm", args=(mu, sd)).statistic)
    kurt = float(stats.kurtosis(x, fisher=True))
    counts, edges = np.histogram(x, bins=bins)
    return GaussianityResult(
        n_samples=x.size,
        ks_distance=ks,
        excess_kurtosis=kurt,
        threshold=ks_threshold,
        passed=ks < ks_threshold,
        histogram_counts=counts,
        histogram_edges=edges,
    )


def amplitude_spectrum(disp: DisplacementTrace, *, target_averages: int = 8) -> SpectrumResult:
    """Hann-windowed, segment-averaged amplitude spectral density [m/sqrt(Hz)].

    Welch's method with 50% overlap; the segment length is chosen to give
    ``target_averages`` averages when the trace allows it. The density
    normalization divides out the window power, so summing PSD * df
    recovers the time-domain variance (Parseval, to within windowing
    effects). ``integrated_rms`` cumulates from low to high frequency.
    """
    x = disp.samples - np.mean(disp.samples)
    n = x.size
    nperseg = int(min(n, max(2, 2 * n // (target_averages + 1))))
    # the global mean is already removed; per-segment detrending would eat
    # real noise power below the segment length
    freqs, psd = signal.welch(
        x,
        fs=disp.sample_rate,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg // 2,
        detrend=False,
        scaling="density",
    )
    df = freqs[1] - freqs[0] if freqs.size > 1 else 1.0
    integrated = np.sqrt(np.cumsum(psd) * df)
    return SpectrumResult(frequencies=freqs, asd=np.sqrt(psd), integrated_rms=integrated)


@dataclass
class CyclePhaseRms:
    phase: np.ndarray  # bin centers, fraction of the cycle in [0, 1)
    rms: np.ndarray  # per-bin RMS displacement [m]
    counts: np.ndarray
    cycle_period: float


def cycle_phase_rms(
    disp: DisplacementTrace, cycle_period: float, *, n_bins: int = 50
) -> CyclePhaseRms:
    """RMS vibration level resolved over the phase of a periodic disturbance.

    Samples are folded by (t mod cycle_period)/cycle_period into ``n_bins``
    bins; localized 'kicks' within e.g. a cryocooler cold-head cycle show
    up as phase-localized RMS peaks.
    """
    if cycle_period <= 0:
        raise DomainError("cycle period must be positive")
    if disp.duration < 3.0 * cycle_period:
        raise DomainError(
            f"trace ({disp.duration:g} s) must cover at least three cycles "
            f"of {cycle_period:g} s"
        )
    if n_bins < 2:
        raise DomainError("need at least two phase bins")
    x = disp.samples - np.mean(disp.samples)
    phase = np.mod(disp.times, cycle_period) / cycle_period
    idx = np.minimum((phase * n_bins).astype(int), n_bins - 1)
    sums = np.bincount(idx, weights=x * x, minlength=n_bins)
    counts = np.bincount(idx, minlength=n_bins)
    rms = np.sqrt(np.divide(sums, counts, out=np.zeros(n_bins), where=counts > 0))
    centers = (np.arange(n_bins) + 0.5) / n_bins
    return CyclePhaseRms(phase=centers, rms=rms, counts=counts, cycle_period=cycle_period)
