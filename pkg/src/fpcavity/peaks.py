"""Lorentzian peak fitting, scan-axis calibration and FSR length extraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.optimize import least_squares
from scipy.signal import find_peaks

from .cavity import length_from_fsr
from .errors import (
    CalibrationError,
    DetectionError,
    DomainError,
    FitError,
    InsufficientDataError,
)
from .traces import CalibratedScan, LorentzianResonance, TransmissionTrace

#: peak prominence threshold in units of the robust noise estimate
PROMINENCE_FACTOR = 5.0


def lorentzian(x, amplitude, center, fwhm):
    """Peak-normalized Lorentzian: amplitude at center, FWHM as named."""
    u = 2.0 * (np.asarray(x, dtype=float) - center) / fwhm
    return amplitude / (1.0 + u * u)


def robust_noise(values) -> float:
    """Scaled median absolute deviation, a peak-insensitive noise estimate."""
    v = np.asarray(values, dtype=float)
    return 1.4826 * float(np.median(np.abs(v - np.median(v))))


def detect_peaks(values, *, prominence_factor=PROMINENCE_FACTOR, n_peaks=None):
    """Indices of peaks with prominence >= prominence_factor * robust noise.

    Falls back to a small fraction of the signal range for noise-free data
    (where the MAD estimate collapses to zero). With ``n_peaks`` given, the
    most prominent ones are returned in axis order.
    """
    v = np.asarray(values, dtype=float)
    vrange = float(np.max(v) - np.min(v))
    if vrange == 0.0:
        return np.array([], dtype=int)
    threshold = max(prominence_factor * robust_noise(v), 1e-3 * vrange)
    idx, props = find_peaks(v, prominence=threshold)
    if n_peaks is not None and idx.size > n_peaks:
        order = np.argsort(props["prominences"])[::-1][:n_peaks]
        idx = np.sort(idx[order])
    return idx


def _refine_center(axis, values, i):
    """Sub-sample peak center by a 3-point parabola through the maximum."""
    if i == 0 or i == len(values) - 1:
        return float(axis[i])
    y0, y1, y2 = values[i - 1], values[i], values[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0:
        return float(axis[i])
    shift = 0.5 * (y0 - y2) / denom
    shift = np.clip(shift, -1.0, 1.0)
    if shift >= 0:
        return float(axis[i] + shift * (axis[min(i + 1, len(axis) - 1)] - axis[i]))
    return float(axis[i] + shift * (axis[i] - axis[i - 1]))


def _solve_least_squares(residual, p0, bounds, scales, max_nfev=20000):
    """Bounded damped least squares with scale-aware standard errors.

    ``scales`` carries a characteristic magnitude per parameter (volt-level
    amplitudes live many orders below Hz-level centers); it conditions the
    optimizer and sets the finite-difference steps for the covariance, which
    scipy's internal Jacobian gets wrong for near-zero Hz-scale parameters.
    """
    scales = np.asarray(scales, dtype=float)
    res = least_squares(
        residual, p0, bounds=bounds, method="trf", x_scale=scales,
        ftol=1e-12, xtol=1e-12, gtol=1e-12, max_nfev=max_nfev,
    )
    rms = float(np.sqrt(np.mean(res.fun**2)))
    if not res.success:
        raise FitError("least-squares fit did not converge", residual_rms=rms)
    # central-difference Jacobian at the solution, stepped by parameter
    # scale and clamped inside the bounds (one-sided at a bound)
    x = res.x
    lo_b, hi_b = bounds
    jac = np.empty((res.fun.size, x.size))
    for i in range(x.size):
        h = 6e-6 * max(abs(x[i]), 1e-2 * scales[i])
        xp, xm = x.copy(), x.copy()
        xp[i] = min(x[i] + h, hi_b[i])
        xm[i] = max(x[i] - h, lo_b[i])
        jac[:, i] = (residual(xp) - residual(xm)) / (xp[i] - xm[i])
    # standard errors by SVD; directions the data does not constrain get
    # infinite (not zero) variance
    dof = max(res.fun.size - x.size, 1)
    s_sq = 2.0 * res.cost / dof
    _, sv, vt = np.linalg.svd(jac, full_matrices=False)
    threshold = np.finfo(float).eps * max(jac.shape) * sv[0]
    constrained = sv > threshold
    var = np.sum((vt[constrained].T / sv[constrained]) ** 2, axis=1) * s_sq
    unconstrained = np.any(np.abs(vt[~constrained]) > 1e-10, axis=0)
    var[unconstrained] = np.inf
    perr = np.sqrt(var)
    return x, perr, rms


@dataclass
class PeakFitResult:
    peaks: list[LorentzianResonance]
    background: float
    background_err: float
    residual_rms: float


def fit_lorentzian_peaks(axis, values, n_peaks: int, *,
                         prominence_factor=PROMINENCE_FACTOR) -> PeakFitResult:
    """Fit a sum of ``n_peaks`` Lorentzians plus a constant background.

    Initial guesses come from prominence-based detection; a detection error
    is raised when fewer than ``n_peaks`` candidates are found.
    """
    if n_peaks < 1:
        raise DomainError("n_peaks must be >= 1")
    axis = np.asarray(axis, dtype=float)
    values = np.asarray(values, dtype=float)
    if axis.shape != values.shape or axis.size < 4 * n_peaks:
        raise DomainError("axis and values must match and resolve every peak")
    idx = detect_peaks(values, prominence_factor=prominence_factor, n_peaks=n_peaks)
    if idx.size < n_peaks:
        raise DetectionError(f"found {idx.size} peak(s), expected {n_peaks}")

    bg0 = float(np.median(values))
    vrange = float(np.max(values) - np.min(values))
    span = float(axis[-1] - axis[0])
    step = span / (axis.size - 1)
    p0 = [max(bg0, 0.0)]
    lo = [0.0]
    hi = [np.inf]
    scales = [vrange]
    for i in idx:
        amp0 = max(values[i] - bg0, 1e-12 * (np.max(values) - np.min(values) + 1e-300))
        # half-maximum crossing distance as the width guess
        half = bg0 + 0.5 * (values[i] - bg0)
        left = i
        while left > 0 and values[left] > half:
            left -= 1
        right = i
        while right < values.size - 1 and values[right] > half:
            right += 1
        w0 = max((right - left) * step, step)
        p0 += [amp0, _refine_center(axis, values, i), w0]
        lo += [0.0, axis[0] - span, step * 1e-3]
        hi += [np.inf, axis[-1] + span, 10.0 * span]
        scales += [vrange, span, span]

    def model(p):
        out = np.full_like(values, p[0])
        for j in range(n_peaks):
            a, ce, w = p[1 + 3 * j: 4 + 3 * j]
            out += lorentzian(axis, a, ce, w)
        return out

    popt, perr, rms = _solve_least_squares(
        lambda p: model(p) - values, np.asarray(p0),
        (np.asarray(lo), np.asarray(hi)), scales,
    )
    peaks = []
    for j in range(n_peaks):
        a, ce, w = popt[1 + 3 * j: 4 + 3 * j]
        ea, ec, ew = perr[1 + 3 * j: 4 + 3 * j]
        peaks.append(
            LorentzianResonance(
                amplitude=a, center=ce, fwhm=w, background=popt[0],
                amplitude_err=ea, center_err=ec, fwhm_err=ew, background_err=perr[0],
            )
        )
    peaks.sort(key=lambda pk: pk.center)
    return PeakFitResult(
        peaks=peaks, background=float(popt[0]), background_err=float(perr[0]),
        residual_rms=rms,
    )


@dataclass
class ScanCalibration:
    """Voltage-to-frequency calibration from a two-laser transmission scan."""

    scan: CalibratedScan
    peaks: list[LorentzianResonance]  # fitted, frequency axis
    raw_peaks: list[LorentzianResonance]  # fitted, original scan axis
    hz_per_unit: float
    residual_rms: float


def calibrate_scan_axis(axis, values, laser_detuning: float) -> ScanCalibration:
    """Map a raw scan axis onto frequency using two known-detuning lasers.

    The two transmission peaks must be resolved (separation larger than the
    sum of their widths); their fitted centers are pinned to 0 and
    ``laser_detuning`` on the output axis.
    """
    if isinstance(axis, TransmissionTrace):
        raise TypeError("pass (axis, values); e.g. (trace.times, trace.samples)")
    if laser_detuning <= 0:
        raise DomainError("laser detuning must be positive")
    axis = np.asarray(axis, dtype=float)
    values = np.asarray(values, dtype=float)

    idx = detect_peaks(values)
    if idx.size != 2:
        raise CalibrationError(
            f"scan-axis calibration needs exactly two peaks, found {idx.size}"
        )
    fit = fit_lorentzian_peaks(axis, values, 2)
    p1, p2 = fit.peaks
    if abs(p2.center - p1.center) < (p1.fwhm + p2.fwhm):
        raise CalibrationError("calibration peaks overlap (separation < sum of widths)")

    scale = laser_detuning / (p2.center - p1.center)
    freq_axis = (axis - p1.center) * scale
    freq_peaks = [
        LorentzianResonance(
            amplitude=pk.amplitude,
            center=(pk.center - p1.center) * scale,
            fwhm=pk.fwhm * abs(scale),
            background=pk.background,
            amplitude_err=pk.amplitude_err,
            center_err=None if pk.center_err is None else pk.center_err * abs(scale),
            fwhm_err=None if pk.fwhm_err is None else pk.fwhm_err * abs(scale),
            background_err=pk.background_err,
        )
        for pk in (p1, p2)
    ]
    return ScanCalibration(
        scan=CalibratedScan(axis=freq_axis, samples=values),
        peaks=freq_peaks,
        raw_peaks=[p1, p2],
        hz_per_unit=float(scale),
        residual_rms=fit.residual_rms,
    )


@dataclass
class WhiteLightResult:
    length: float
    fsr: float
    peak_frequencies: np.ndarray
    peak_wavelengths: np.ndarray
    accepted_spacings: np.ndarray
    rejected_spacings: int


def length_from_white_light(wavelengths, transmission) -> WhiteLightResult:
    """Cavity length from the fundamental-mode spacing of a broadband spectrum.

    Peaks are detected on the wavelength axis, converted to frequency and
    their adjacent spacings cleaned with a median-absolute-deviation filter
    before the median spacing is taken as the FSR. Spurious (e.g. higher
    order transverse) peaks split individual gaps and are rejected by the
    filter as long as fewer than about a third of the gaps are affected.
    """
    lam = np.asarray(wavelengths, dtype=float)
    tr = np.asarray(transmission, dtype=float)
    if lam.shape != tr.shape or lam.size < 8:
        raise DomainError("wavelength and transmission arrays must match")
    dlam = np.diff(lam)
    if not (np.all(dlam > 0) or np.all(dlam < 0)):
        raise DomainError("wavelength axis must be strictly monotone")

    idx = detect_peaks(tr)
    if idx.size < 2:
        raise InsufficientDataError(
            f"need at least two fundamental peaks, found {idx.size}"
        )
    centers_lam = np.array([_refine_center(lam, tr, i) for i in idx])
    freqs = np.sort(C_LIGHT / centers_lam)
    spacings = np.diff(freqs)

    med = np.median(spacings)
    mad = np.median(np.abs(spacings - med))
    if mad > 0:
        keep = np.abs(spacings - med) <= 3.0 * 1.4826 * mad
    else:
        keep = np.abs(spacings - med) <= 1e-3 * med
    accepted = spacings[keep]
    if accepted.size < 1:
        raise InsufficientDataError("no consistent mode spacings after outlier rejection")
    fsr = float(np.median(accepted))
    return WhiteLightResult(
        length=length_from_fsr(fsr),
        fsr=fsr,
        peak_frequencies=freqs,
        peak_wavelengths=np.sort(centers_lam),
        accepted_spacings=accepted,
        rejected_spacings=int(np.count_nonzero(~keep)),
    )
