"""Optically detected magnetic resonance: dip fitting and field extraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import DetectionError, DomainError
from .peaks import _solve_least_squares, lorentzian, robust_noise

#: electron spin gyromagnetic ratio, Hz per tesla (2.8025 MHz/G)
GYROMAGNETIC_RATIO = 2.8025e6 / 1e-4

#: Zeeman splittings below this are not attributed to a magnetic field:
#: small zero-field doublets can equally stem from strain or a nearby
#: nuclear spin, so the origin is ambiguous.
MIN_ZEEMAN_SPLITTING = 20e6

#: minimum fitted dip contrast to count as detected
CONTRAST_THRESHOLD = 2e-3


@dataclass
class OdmrResult:
    dip_centers: list[float]  # [Hz], ascending
    dip_center_errs: list[float]
    contrasts: list[float]
    fwhms: list[float]
    baseline: float
    splitting: float | None  # [Hz], None for a single dip
    splitting_err: float | None
    field_tesla: float | None  # None when no field is attributed
    residual_rms: float

    @property
    def field_gauss(self) -> float | None:
        return None if self.field_tesla is None else self.field_tesla * 1e4


def odmr_fit(
    frequencies,
    signal,
    n_dips: int = 2,
    *,
    contrast_threshold: float = CONTRAST_THRESHOLD,
    min_zeeman_splitting: float = MIN_ZEEMAN_SPLITTING,
) -> OdmrResult:
    """Fit inverted Lorentzian dips on a flat baseline.

    With two dips the Zeeman field B_z = splitting / (2 * gamma_e) is
    attributed only when the splitting exceeds ``min_zeeman_splitting``.
    """
    if n_dips not in (1, 2):
        raise DomainError("n_dips must be 1 or 2")
    freq = np.asarray(frequencies, dtype=float)
    y = np.asarray(signal, dtype=float)
    if freq.shape != y.shape or freq.size < 8:
        raise DomainError("frequency and signal arrays must match")

    base0 = float(np.median(y))
    depth = base0 - np.min(y)
    vrange = float(np.max(y) - np.min(y))
    if vrange == 0 or depth < contrast_threshold * max(base0, 1e-300):
        raise DetectionError("no dips above the contrast threshold")
    prominence = max(5.0 * robust_noise(y), contrast_threshold * base0)
    idx, props = find_peaks(-y, prominence=prominence)
    if idx.size < n_dips:
        raise DetectionError(f"found {idx.size} dip(s), expected {n_dips}")
    order = np.argsort(props["prominences"])[::-1][:n_dips]
    idx = np.sort(idx[order])

    span = float(freq[-1] - freq[0])
    step = span / (freq.size - 1)
    # parameters: baseline, then per dip (contrast, center, fwhm)
    p0 = [base0]
    lo = [0.0]
    hi = [np.inf]
    scales = [base0]
    for i in idx:
        c0 = min(max((base0 - y[i]) / base0, 1e-4), 0.999)
        p0 += [c0, float(freq[i]), max(5 * step, span / 100.0)]
        lo += [0.0, freq[0] - span, step]
        hi += [1.0, freq[-1] + span, 2.0 * span]
        scales += [1.0, span, span]

    def model(p):
        out = np.ones_like(y)
        for j in range(n_dips):
            c, ce, w = p[1 + 3 * j: 4 + 3 * j]
            out -= c * lorentzian(freq, 1.0, ce, w)
        return p[0] * out

    popt, perr, rms = _solve_least_squares(
        lambda p: model(p) - y, np.asarray(p0), (np.asarray(lo), np.asarray(hi)), scales
    )
    dips = []
    for j in range(n_dips):
        c, ce, w = popt[1 + 3 * j: 4 + 3 * j]
        if c < contrast_threshold:
            raise DetectionError(
                f"fitted dip contrast {c:.2e} below threshold {contrast_threshold:.2e}"
            )
        dips.append((float(ce), float(perr[2 + 3 * j]), float(c), float(w)))
    dips.sort(key=lambda d: d[0])

    splitting = splitting_err = field = None
    if n_dips == 2:
        splitting = dips[1][0] - dips[0][0]
        splitting_err = float(np.hypot(dips[0][1], dips[1][1]))
        if splitting >= min_zeeman_splitting:
            field = splitting / (2.0 * GYROMAGNETIC_RATIO)
    return OdmrResult(
        dip_centers=[d[0] for d in dips],
        dip_center_errs=[d[1] for d in dips],
        contrasts=[d[2] for d in dips],
        fwhms=[d[3] for d in dips],
        baseline=float(popt[0]),
        splitting=splitting,
        splitting_err=splitting_err,
        field_tesla=field,
        residual_rms=rms,
    )
