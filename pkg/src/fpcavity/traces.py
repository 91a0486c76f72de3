"""Trace containers and the CSV / JSON-envelope interchange formats.

CSV files are two columns with a mandatory header row (comma separator,
dot decimal). The JSON envelope is self-describing:

    {"version": 1, "axis_unit": "s", "value_unit": "V",
     "sample_rate": 200000.0, "meta": {...}, "values": [...], "axis": [...]}

``axis`` may be omitted for uniformly sampled time traces (implied by
``sample_rate``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

#: relative tolerance on axis-step jitter before a time axis counts as non-uniform
_UNIFORMITY_RTOL = 1e-6


def _as_finite_array(samples, what: str) -> np.ndarray:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise DomainError(f"{what} needs at least two samples in a 1-d array")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} contains non-finite samples")
    return arr


@dataclass
class TransmissionTrace:
    """Uniformly sampled detector signal [V]."""

    samples: np.ndarray
    sample_rate: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = _as_finite_array(self.samples, "transmission trace")
        if self.sample_rate <= 0:
            raise DomainError("sample rate must be positive")

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass
class DisplacementTrace:
    """Uniformly sampled cavity length displacement [m]."""

    samples: np.ndarray
    sample_rate: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = _as_finite_array(self.samples, "displacement trace")
        if self.sample_rate <= 0:
            raise DomainError("sample rate must be positive")

    @property
    def rms(self) -> float:
        """RMS of the mean-subtracted samples."""
        return float(np.std(self.samples))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass
class CalibratedScan:
    """Signal on a calibrated frequency axis [Hz], e.g. a swept-laser scan."""

    axis: np.ndarray
    samples: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axis = np.asarray(self.axis, dtype=float)
        self.samples = _as_finite_array(self.samples, "scan")
        if self.axis.shape != self.samples.shape:
            raise DomainError("scan axis and samples must have equal length")
        if not np.all(np.diff(self.axis) > 0):
            raise DomainError("scan axis must be strictly increasing")

    @property
    def span(self) -> float:
        return float(self.axis[-1] - self.axis[0])


@dataclass
class SpectrumResult:
    """One-sided amplitude spectral density with cumulative integrated RMS."""

    frequencies: np.ndarray
    asd: np.ndarray  # m/sqrt(Hz)
    integrated_rms: np.ndarray  # m, cumulative low -> high frequency

    @property
    def total_rms(self) -> float:
        return float(self.integrated_rms[-1])


@dataclass
class LorentzianResonance:
    """Fitted Lorentzian peak; the calibration object linking signal to length.

    ``center`` and ``fwhm`` are in the units of the fitted axis (Hz for
    frequency-calibrated scans). ``fwhm_spatial`` is the linewidth mapped
    into cavity length via the dispersion slope.
    """

    amplitude: float
    center: float
    fwhm: float
    background: float = 0.0
    fwhm_spatial: float | None = None
    amplitude_err: float | None = None
    center_err: float | None = None
    fwhm_err: float | None = None
    background_err: float | None = None

    def __post_init__(self):
        if self.amplitude <= 0:
            raise DomainError("peak amplitude must be positive")
        if self.fwhm <= 0:
            raise DomainError("linewidth must be positive")
        if self.background < 0:
            raise DomainError("background must be non-negative")
        if self.fwhm_spatial is not None and self.fwhm_spatial <= 0:
            raise DomainError("spatial linewidth must be positive")

    def with_spatial(self, dispersion_slope_hz_per_m: float) -> "LorentzianResonance":
        """Attach the spatial linewidth kappa_x = kappa/|s|."""
        if dispersion_slope_hz_per_m == 0:
            raise DomainError("dispersion slope must be non-zero")
        return LorentzianResonance(
            amplitude=self.amplitude,
            center=self.center,
            fwhm=self.fwhm,
            background=self.background,
            fwhm_spatial=self.fwhm / abs(dispersion_slope_hz_per_m),
            amplitude_err=self.amplitude_err,
            center_err=self.center_err,
            fwhm_err=self.fwhm_err,
            background_err=self.background_err,
        )


# ---------------------------------------------------------------------------
# file formats


def write_csv(path_or_file, axis, values, header=("axis", "value")):
    """Write a two-column CSV with header row."""
    axis = np.asarray(axis, dtype=float)
    values = np.asarray(values, dtype=float)
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w") if own else path_or_file
    try:
        fh.write(f"{header[0]},{header[1]}\n")
        for a, v in zip(axis, values):
            fh.write(f"{float(a)!r},{float(v)!r}\n")
    finally:
        if own:
            fh.close()


def read_csv(path_or_file):
    """Read a two-column CSV, returning (axis, values, header_tuple)."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "r") if own else path_or_file
    try:
        first = fh.readline()
        cols = [c.strip() for c in first.strip().split(",")]
        if len(cols) != 2:
            raise DomainError("CSV must have exactly two columns")
        try:
            float(cols[0])
        except ValueError:
            pass
        else:
            raise DomainError("CSV header row is required (first line is numeric)")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    finally:
        if own:
            fh.close()
    if data.shape[1] != 2:
        raise DomainError("CSV must have exactly two columns")
    return data[:, 0], data[:, 1], (cols[0], cols[1])


def _uniform_rate(axis: np.ndarray) -> float:
    steps = np.diff(axis)
    if steps.size == 0 or np.any(steps <= 0):
        raise DomainError("time axis must be strictly increasing")
    step = float(np.mean(steps))
    if np.max(np.abs(steps - step)) > _UNIFORMITY_RTOL * step:
        raise DomainError("trace is not uniformly sampled")
    return 1.0 / step


def transmission_trace_from_csv(path_or_file, meta=None) -> TransmissionTrace:
    """Load a time,signal CSV as a TransmissionTrace (uniform sampling enforced)."""
    axis, values, header = read_csv(path_or_file)
    rate = _uniform_rate(axis)
    meta = dict(meta or {})
    meta.setdefault("columns", list(header))
    return TransmissionTrace(samples=values, sample_rate=rate, meta=meta)


def displacement_trace_from_csv(path_or_file, meta=None) -> DisplacementTrace:
    axis, values, header = read_csv(path_or_file)
    rate = _uniform_rate(axis)
    meta = dict(meta or {})
    meta.setdefault("columns", list(header))
    return DisplacementTrace(samples=values, sample_rate=rate, meta=meta)


def scan_from_csv(path_or_file, meta=None) -> CalibratedScan:
    axis, values, header = read_csv(path_or_file)
    meta = dict(meta or {})
    meta.setdefault("columns", list(header))
    return CalibratedScan(axis=axis, samples=values, meta=meta)


def write_envelope(path_or_file, values, *, axis=None, sample_rate=None,
                   axis_unit="s", value_unit="V", meta=None):
    """Write the self-describing JSON trace envelope."""
    doc = {
        "version": 1,
        "axis_unit": axis_unit,
        "value_unit": value_unit,
        "sample_rate": sample_rate,
        "meta": dict(meta or {}),
        "values": np.asarray(values, dtype=float).tolist(),
    }
    if axis is not None:
        doc["axis"] = np.asarray(axis, dtype=float).tolist()
    text = json.dumps(doc)
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w") as fh:
            fh.write(text)
    else:
        path_or_file.write(text)


def read_envelope(path_or_file) -> dict:
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file) as fh:
            doc = json.load(fh)
    else:
        doc = json.load(path_or_file)
    if doc.get("version") != 1:
        raise DomainError(f"unsupported trace envelope version {doc.get('version')!r}")
    if "values" not in doc:
        raise DomainError("trace envelope is missing 'values'")
    if doc.get("axis") is None and not doc.get("sample_rate"):
        raise DomainError("trace envelope needs either an axis or a sample_rate")
    return doc
