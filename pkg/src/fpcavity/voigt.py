"""Vibration extraction from slowly swept resonance scans via Voigt fits.

A swept-laser scan across a vibrating cavity resonance averages the
intrinsic Lorentzian line over the Gaussian jitter of its center, i.e. a
Voigt profile. With the Lorentzian width frozen to the separately measured
cavity linewidth, the fitted Gaussian standard deviation divided by the
dispersion slope is the RMS cavity length fluctuation.

The profile is evaluated through the scaled complex error function
(scipy's Faddeeva-based ``voigt_profile``), never by naive convolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import voigt_profile
from scipy.stats import chi2

from .errors import DomainError
from .peaks import _solve_least_squares
from .traces import CalibratedScan

#: minimum scan span in units of the frozen Lorentzian linewidth
MIN_SPAN_LINEWIDTHS = 5.0

#: false-detection probability of the Gaussian-component significance test
DETECTION_ALPHA = 1e-3


def voigt_peak(x, amplitude, center, sigma, gamma, background=0.0):
    """Voigt profile normalized to ``amplitude`` at its center.

    ``sigma`` is the Gaussian standard deviation, ``gamma`` the Lorentzian
    half width at half maximum. ``sigma = 0`` degrades gracefully to a pure
    Lorentzian.
    """
    peak = voigt_profile(0.0, sigma, gamma)
    return background + amplitude * voigt_profile(
        np.asarray(x, dtype=float) - center, sigma, gamma
    ) / peak


@dataclass
class VoigtScanFit:
    sigma_freq: float  # Gaussian standard deviation [Hz]
    sigma_freq_err: float
    center: float
    amplitude: float
    background: float
    residual_rms: float
    is_upper_bound: bool
    significance: float  # chi^2(1)-distributed under a zero Gaussian width


@dataclass
class VibrationFromScans:
    """Combined result of one or more Voigt scan fits."""

    sigma_freq: float  # [Hz]
    sigma_freq_err: float
    sigma_length: float  # [m]
    sigma_length_err: float
    is_upper_bound: bool
    scans: list[VoigtScanFit]


def _fit_single(scan: CalibratedScan, gamma: float, resolution: float) -> VoigtScanFit:
    """Voigt fit with frozen gamma, plus a zero-width significance test.

    The Gaussian width is a boundary-constrained parameter, so its
    significance comes from a likelihood-ratio comparison against a pure
    Lorentzian refit of the same scan: the residual improvement, scaled by
    the noise variance, is chi^2(1)-distributed when the true width is zero.
    """
    axis, y = scan.axis, scan.samples
    bg0 = float(np.median(y))
    i0 = int(np.argmax(y))
    span = scan.span
    vrange = float(np.max(y) - np.min(y))

    def fit(freeze_sigma):
        if freeze_sigma:
            p0 = np.array([max(y[i0] - bg0, 1e-12), axis[i0], bg0])
            lo = np.array([0.0, axis[0], -np.inf])
            hi = np.array([np.inf, axis[-1], np.inf])
            scales = np.array([vrange, span, vrange])
            res = lambda p: voigt_peak(axis, p[0], p[1], 0.0, gamma, p[2]) - y
        else:
            p0 = np.array([max(y[i0] - bg0, 1e-12), axis[i0], 2.0 * gamma, bg0])
            lo = np.array([0.0, axis[0], 0.0, -np.inf])
            hi = np.array([np.inf, axis[-1], span, np.inf])
            scales = np.array([vrange, span, span, vrange])
            res = lambda p: voigt_peak(axis, p[0], p[1], p[2], gamma, p[3]) - y
        return _solve_least_squares(res, p0, (lo, hi), scales)

    popt, perr, rms = fit(freeze_sigma=False)
    _, _, rms0 = fit(freeze_sigma=True)
    n = y.size
    rss, rss0 = rms**2 * n, rms0**2 * n
    noise_var = rss / max(n - 4, 1)
    if noise_var > 0:
        significance = max(rss0 - rss, 0.0) / noise_var
    else:
        significance = np.inf if rss0 > 0 else 0.0

    sigma, sigma_err = float(popt[2]), float(perr[2])
    upper = bool(significance < chi2.ppf(1.0 - DETECTION_ALPHA, df=1))
    if upper:
        # quote a bound covering the confidence region, floored at the
        # axis resolution (an unconstrained width has infinite error)
        if np.isfinite(sigma_err):
            sigma = max(resolution, sigma + 2.0 * sigma_err)
        else:
            sigma = max(resolution, sigma)
    return VoigtScanFit(
        sigma_freq=sigma,
        sigma_freq_err=sigma_err,
        center=float(popt[1]),
        amplitude=float(popt[0]),
        background=float(popt[3]),
        residual_rms=rms,
        is_upper_bound=upper,
        significance=float(significance),
    )


def voigt_scan_fit(
    scans: CalibratedScan | list[CalibratedScan],
    lorentzian_fwhm: float,
    dispersion_slope: float,
) -> VibrationFromScans:
    """RMS vibration level from Voigt fits with a frozen Lorentzian width.

    For several scans the per-scan Gaussian widths are combined as an
    inverse-variance weighted mean; its quoted standard error includes the
    scan-to-scan scatter. When the Gaussian component is indistinguishable
    from zero (below the axis resolution or its own uncertainty) the result
    is flagged as an upper bound rather than a measured value.
    """
    if lorentzian_fwhm <= 0:
        raise DomainError("the frozen Lorentzian linewidth must be positive")
    if dispersion_slope == 0:
        raise DomainError("dispersion slope must be non-zero")
    if isinstance(scans, CalibratedScan):
        scans = [scans]
    if not scans:
        raise DomainError("need at least one scan")
    for sc in scans:
        if sc.span < MIN_SPAN_LINEWIDTHS * lorentzian_fwhm:
            raise DomainError(
                f"scan span {sc.span:.3g} Hz must cover at least "
                f"{MIN_SPAN_LINEWIDTHS:g} linewidths ({lorentzian_fwhm:.3g} Hz each)"
            )

    gamma = lorentzian_fwhm / 2.0
    fits = []
    for sc in scans:
        resolution = float(np.median(np.diff(sc.axis)))
        fits.append(_fit_single(sc, gamma, resolution))

    # pooled likelihood-ratio statistic: chi^2(M) under a zero true width
    total_significance = float(sum(f.significance for f in fits))
    detected = bool(total_significance > chi2.ppf(1.0 - DETECTION_ALPHA, df=len(fits)))
    if not detected:
        bound = max(f.sigma_freq for f in fits)
        finite_errs = [f.sigma_freq_err for f in fits if np.isfinite(f.sigma_freq_err)]
        return VibrationFromScans(
            sigma_freq=bound,
            sigma_freq_err=float(np.median(finite_errs)) if finite_errs else 0.0,
            sigma_length=bound / abs(dispersion_slope),
            sigma_length_err=0.0,
            is_upper_bound=True,
            scans=fits,
        )

    usable = [f for f in fits
              if np.isfinite(f.sigma_freq_err) and f.sigma_freq_err > 0]
    if not usable:
        usable = fits
    vals = np.array([f.sigma_freq for f in usable])
    errs = np.array([max(f.sigma_freq_err, 1e-300) for f in usable])
    w = 1.0 / errs**2
    mean = float(np.sum(w * vals) / np.sum(w))
    if len(usable) > 1:
        # scatter-aware standard error of the weighted mean
        se = float(np.sqrt(np.sum(w * (vals - mean) ** 2) / ((len(usable) - 1) * np.sum(w))))
        se = max(se, float(np.sqrt(1.0 / np.sum(w))))
    else:
        se = float(np.sqrt(1.0 / np.sum(w)))
    s = abs(dispersion_slope)
    return VibrationFromScans(
        sigma_freq=mean,
        sigma_freq_err=se,
        sigma_length=mean / s,
        sigma_length_err=se / s,
        is_upper_bound=False,
        scans=fits,
    )
