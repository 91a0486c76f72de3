"""Synthetic signals with known ground truth, for round-trip testing.

Everything random comes from numpy's PCG64 generator seeded through a
``SeedSequence``. Each noise component (and each scan of an ensemble) draws
from its own child stream, spawned by position, so output is bit-identical
for a fixed seed regardless of evaluation order and components can be
rendered in parallel without losing determinism.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.constants import c as C_LIGHT

from .cavity import CavityGeometry, resonance_frequencies
from .errors import ConfigError, DomainError
from .peaks import lorentzian
from .traces import CalibratedScan, DisplacementTrace, LorentzianResonance, TransmissionTrace
from .units import parse_quantity

_COMPONENT_KINDS = ("sine", "white", "burst", "harmonic_comb")


@dataclass(frozen=True)
class NoiseComponent:
    """One additive term of a displacement noise model.

    kind 'sine': amplitude [m] at ``frequency`` with fixed ``phase`` [rad].
    kind 'white': Gaussian white noise of RMS ``amplitude``.
    kind 'harmonic_comb': ``n_harmonics`` sines at multiples of
        ``frequency`` with amplitudes amplitude/m and seeded random phases.
    kind 'burst': a Gaussian-enveloped tone burst repeating once per
        ``cycle_period``, centered at cycle fraction ``phase``; the envelope
        sigma is ``width`` (default cycle_period/50).
    """

    kind: str
    amplitude: float
    frequency: float = 0.0
    phase: float = 0.0
    cycle_period: float = 0.0
    n_harmonics: int = 10
    width: float | None = None

    def __post_init__(self):
        if self.kind not in _COMPONENT_KINDS:
            raise DomainError(f"unknown noise component kind {self.kind!r}")
        if self.amplitude < 0:
            raise DomainError("component amplitude must be non-negative")
        if self.kind in ("sine", "harmonic_comb") and self.frequency <= 0:
            raise DomainError(f"{self.kind} component needs a positive frequency")
        if self.kind == "burst":
            if self.cycle_period <= 0:
                raise DomainError("burst component needs a positive cycle_period")
            if self.frequency <= 0:
                raise DomainError("burst component needs a positive carrier frequency")
        if self.kind == "harmonic_comb" and self.n_harmonics < 1:
            raise DomainError("harmonic comb needs at least one harmonic")

    @property
    def max_frequency(self) -> float:
        if self.kind == "harmonic_comb":
            return self.frequency * self.n_harmonics
        if self.kind in ("sine", "burst"):
            return self.frequency
        return 0.0

    def analytic_variance(self) -> float:
        """Exact variance for sine/white/comb; envelope estimate for bursts."""
        if self.kind == "sine":
            return self.amplitude**2 / 2.0
        if self.kind == "white":
            return self.amplitude**2
        if self.kind == "harmonic_comb":
            return self.amplitude**2 / 2.0 * sum(
                1.0 / m**2 for m in range(1, self.n_harmonics + 1)
            )
        # burst: mean square of a Gaussian-enveloped tone over one cycle
        tau = self.width if self.width is not None else self.cycle_period / 50.0
        return self.amplitude**2 / 2.0 * np.sqrt(np.pi) * tau / self.cycle_period


@dataclass(frozen=True)
class NoiseModel:
    components: tuple[NoiseComponent, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    def analytic_rms(self) -> float:
        """Component-wise RMS; exact except for the burst envelope estimate."""
        return float(np.sqrt(sum(c.analytic_variance() for c in self.components)))


@dataclass(frozen=True)
class ScanConfig:
    """Swept-laser scan parameters; duration follows from span and rate."""

    span: float  # [Hz]
    scan_rate: float = 10e9  # [Hz/s]
    sample_rate: float = 20e3  # [1/s]
    detector_noise_rms: float = 0.0  # [V]
    jitter_correlation_time: float = 1e-3  # [s]

    def __post_init__(self):
        if self.span <= 0 or self.scan_rate <= 0:
            raise DomainError("scan span and rate must be positive")
        if self.sample_rate <= 0 or self.jitter_correlation_time <= 0:
            raise DomainError("sample rate and correlation time must be positive")
        if self.detector_noise_rms < 0:
            raise DomainError("detector noise must be non-negative")

    @property
    def duration(self) -> float:
        return self.span / self.scan_rate


def synth_displacement(model: NoiseModel, duration: float, sample_rate: float) -> DisplacementTrace:
    """Render the noise model onto a uniform time grid."""
    n = int(round(duration * sample_rate))
    if n < 2:
        raise DomainError("duration * sample_rate must give at least two samples")
    for comp in model.components:
        if comp.max_frequency > sample_rate / 2.0:
            raise DomainError(
                f"{comp.kind} component at {comp.max_frequency:g} Hz would alias "
                f"(Nyquist {sample_rate / 2.0:g} Hz)"
            )
    t = np.arange(n) / sample_rate
    x = np.zeros(n)
    streams = np.random.SeedSequence(model.seed).spawn(len(model.components))
    for comp, ss in zip(model.components, streams):
        rng = np.random.default_rng(ss)
        if comp.kind == "sine":
            x += comp.amplitude * np.sin(2 * np.pi * comp.frequency * t + comp.phase)
        elif comp.kind == "white":
            x += rng.normal(0.0, comp.amplitude, n)
        elif comp.kind == "harmonic_comb":
            phases = rng.uniform(0.0, 2 * np.pi, comp.n_harmonics)
            for m in range(1, comp.n_harmonics + 1):
                x += (comp.amplitude / m) * np.sin(
                    2 * np.pi * m * comp.frequency * t + phases[m - 1]
                )
        elif comp.kind == "burst":
            tau = comp.width if comp.width is not None else comp.cycle_period / 50.0
            n_cycles = int(np.ceil(duration / comp.cycle_period)) + 1
            carrier = np.sin(2 * np.pi * comp.frequency * t)
            for k in range(n_cycles):
                t0 = (k + comp.phase) * comp.cycle_period
                x += comp.amplitude * np.exp(-((t - t0) ** 2) / (2 * tau**2)) * carrier
    return DisplacementTrace(
        samples=x,
        sample_rate=sample_rate,
        meta={"analytic_rms": model.analytic_rms(), "seed": model.seed},
    )


def synth_transmission_trace(
    disp: DisplacementTrace,
    cal: LorentzianResonance,
    detector_noise_rms: float = 0.0,
    *,
    side: str = "right",
    operating_fraction: float = 0.5,
    seed: int = 0,
) -> TransmissionTrace:
    """Map a displacement trace through the Lorentzian fringe, plus noise.

    The cavity is parked on the declared flank at ``operating_fraction`` of
    the peak transmission (default: half maximum). This is the exact
    forward model inverted by ``transmission_to_displacement``.
    """
    if cal.fwhm_spatial is None:
        raise DomainError("calibration must include the spatial linewidth")
    if side not in ("left", "right"):
        raise DomainError("side must be 'left' or 'right'")
    if not 0.0 < operating_fraction < 1.0:
        raise DomainError("operating fraction must be in (0, 1)")
    kx = cal.fwhm_spatial
    sgn = 1.0 if side == "right" else -1.0
    offset = sgn * (kx / 2.0) * np.sqrt(1.0 / operating_fraction - 1.0)
    x = offset + disp.samples
    T = cal.background + cal.amplitude / (1.0 + (2.0 * x / kx) ** 2)
    if detector_noise_rms > 0:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        T = T + rng.normal(0.0, detector_noise_rms, T.size)
    meta = dict(disp.meta)
    meta.update(side=side, operating_fraction=operating_fraction)
    return TransmissionTrace(samples=T, sample_rate=disp.sample_rate, meta=meta)


def synth_swept_scan(
    cal: LorentzianResonance,
    sigma_freq: float,
    config: ScanConfig,
    *,
    seed: int | np.random.SeedSequence = 0,
) -> CalibratedScan:
    """One swept-laser scan over a resonance jittering with Gaussian statistics.

    The resonance center is redrawn once per correlation time (slow-jitter
    limit), so the ensemble average over scans converges to a Voigt profile
    of Gaussian width ``sigma_freq``.
    """
    if sigma_freq < 0:
        raise DomainError("sigma_freq must be non-negative")
    if config.span < 5.0 * (cal.fwhm + 4.0 * sigma_freq):
        raise DomainError(
            f"scan span {config.span:.3g} Hz too small for linewidth "
            f"{cal.fwhm:.3g} Hz with jitter {sigma_freq:.3g} Hz"
        )
    n = int(round(config.duration * config.sample_rate))
    if n < 16:
        raise DomainError("scan would have fewer than 16 samples")
    axis = (np.arange(n) / config.sample_rate) * config.scan_rate - config.span / 2.0
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    rng = np.random.default_rng(seed)
    if sigma_freq > 0:
        block = max(1, int(round(config.jitter_correlation_time * config.sample_rate)))
        n_blocks = -(-n // block)
        jitter = np.repeat(rng.normal(0.0, sigma_freq, n_blocks), block)[:n]
    else:
        jitter = 0.0
    y = cal.background + lorentzian(axis - jitter, cal.amplitude, 0.0, cal.fwhm)
    if config.detector_noise_rms > 0:
        y = y + rng.normal(0.0, config.detector_noise_rms, n)
    return CalibratedScan(axis=axis, samples=y, meta={"sigma_freq": sigma_freq})


def synth_scan_ensemble(
    cal: LorentzianResonance,
    sigma_freq: float,
    config: ScanConfig,
    n_scans: int,
    *,
    seed: int = 0,
) -> list[CalibratedScan]:
    """Consecutive scans with independent jitter streams (deterministic)."""
    if n_scans < 1:
        raise DomainError("need at least one scan")
    seeds = np.random.SeedSequence(seed).spawn(n_scans)
    return [synth_swept_scan(cal, sigma_freq, config, seed=s) for s in seeds]


def synth_white_light_spectrum(
    geometry: CavityGeometry,
    band: tuple[float, float],
    linewidth: float,
    *,
    n_points: int = 4000,
    extra_peaks: list[tuple[float, float]] | None = None,
    noise_rms: float = 0.0,
    seed: int = 0,
):
    """Wavelength-resolved transmission of a broadband source through the cavity.

    Unit-amplitude Lorentzian lines (width ``linewidth`` in Hz) sit at the
    cavity resonances inside ``band``; ``extra_peaks`` are (frequency,
    amplitude) pairs for spurious features such as transverse modes. The
    wavelength axis ascends (descending frequency). Returns
    (wavelengths, transmission, mode_frequencies).
    """
    if linewidth <= 0:
        raise DomainError("linewidth must be positive")
    modes = resonance_frequencies(geometry, band)
    freqs = np.linspace(band[0], band[1], n_points)
    tr = np.zeros(n_points)
    for m in modes:
        tr += lorentzian(freqs, 1.0, m.frequency, linewidth)
    for f0, amp in extra_peaks or []:
        tr += lorentzian(freqs, amp, f0, linewidth)
    if noise_rms > 0:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        tr = tr + rng.normal(0.0, noise_rms, n_points)
    wavelengths = C_LIGHT / freqs[::-1]
    return wavelengths, tr[::-1], np.array([m.frequency for m in modes])


def synth_odmr(
    centers,
    contrasts,
    linewidths,
    *,
    baseline: float = 1.0,
    noise_rms: float = 0.0,
    band: tuple[float, float] | None = None,
    n_points: int = 1500,
    seed: int = 0,
):
    """Photoluminescence spectrum with inverted Lorentzian dips.

    Returns (frequencies, signal) with signal = baseline * (1 - sum of
    contrast-weighted dips) plus seeded Gaussian noise.
    """
    centers = np.atleast_1d(np.asarray(centers, dtype=float))
    contrasts = np.atleast_1d(np.asarray(contrasts, dtype=float))
    linewidths = np.atleast_1d(np.asarray(linewidths, dtype=float))
    if not (centers.size == contrasts.size == linewidths.size):
        raise DomainError("centers, contrasts and linewidths must have equal length")
    if np.any((contrasts < 0) | (contrasts >= 1)):
        # zero is allowed as the degenerate flat-spectrum case
        raise DomainError("contrasts must lie in [0, 1)")
    if np.any(linewidths <= 0):
        raise DomainError("linewidths must be positive")
    if baseline <= 0:
        raise DomainError("baseline must be positive")
    if band is None:
        pad = 12.0 * float(np.max(linewidths))
        band = (float(np.min(centers)) - pad, float(np.max(centers)) + pad)
    freqs = np.linspace(band[0], band[1], n_points)
    dips = np.zeros(n_points)
    for ce, co, w in zip(centers, contrasts, linewidths):
        dips += co * lorentzian(freqs, 1.0, ce, w)
    y = baseline * (1.0 - dips)
    if noise_rms > 0:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        y = y + rng.normal(0.0, noise_rms, n_points)
    return freqs, y


# ---------------------------------------------------------------------------
# scenario files


@dataclass
class Scenario:
    """A named, fully specified synthetic measurement setup."""

    name: str
    kind: str  # 'displacement' or 'transmission'
    noise: NoiseModel
    sample_rate: float
    duration: float
    transduction: dict = field(default_factory=dict)

    @property
    def ground_truth_rms(self) -> float:
        return self.noise.analytic_rms()

    def calibration(self) -> LorentzianResonance:
        tr = self.transduction
        if not tr:
            raise DomainError(f"scenario {self.name!r} has no transduction block")
        return LorentzianResonance(
            amplitude=tr["t0"],
            center=0.0,
            fwhm=1.0,  # spectral width is irrelevant for the length mapping
            background=tr["background"],
            fwhm_spatial=tr["kappa_x"],
        )

    def render(self, duration: float | None = None, seed: int | None = None):
        """Produce the displacement trace and, if configured, its transmission."""
        dur = self.duration if duration is None else duration
        noise = self.noise if seed is None else NoiseModel(self.noise.components, seed)
        disp = synth_displacement(noise, dur, self.sample_rate)
        if self.kind == "displacement":
            return disp, None
        tr = self.transduction
        trans = synth_transmission_trace(
            disp,
            self.calibration(),
            tr.get("detector_noise_rms", 0.0),
            side=tr.get("side", "right"),
            seed=(self.noise.seed if seed is None else seed) + 1,
        )
        return disp, trans


_SCENARIO_FIELD_DIMENSIONS = {
    "amplitude": "length",
    "frequency": "frequency",
    "cycle_period": "time",
    "width": "time",
    "t0": "voltage",
    "background": "voltage",
    "kappa_x": "length",
    "detector_noise_rms": "voltage",
    "sample_rate": "frequency",
    "duration": "time",
    "phase": "dimensionless",
}


def _resolve(doc: dict, key: str, default=None):
    if key not in doc:
        if default is None:
            raise ConfigError(f"scenario is missing required key {key!r}")
        return default
    return parse_quantity(doc[key], _SCENARIO_FIELD_DIMENSIONS.get(key))


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a Scenario from a parsed scenario document (units resolved here)."""
    if doc.get("version") != 1:
        raise ConfigError(f"unsupported scenario version {doc.get('version')!r}")
    kind = doc.get("kind", "displacement")
    if kind not in ("displacement", "transmission"):
        raise ConfigError(f"unknown scenario kind {kind!r}")
    noise_doc = doc.get("noise", {})
    comps = []
    for comp in noise_doc.get("components", []):
        comps.append(
            NoiseComponent(
                kind=comp["kind"],
                amplitude=_resolve(comp, "amplitude"),
                frequency=_resolve(comp, "frequency", 0.0),
                phase=_resolve(comp, "phase", 0.0),
                cycle_period=_resolve(comp, "cycle_period", 0.0),
                n_harmonics=int(comp.get("n_harmonics", 10)),
                width=None if "width" not in comp else _resolve(comp, "width"),
            )
        )
    if not comps:
        raise ConfigError("scenario noise model has no components")
    noise = NoiseModel(components=tuple(comps), seed=int(noise_doc.get("seed", 0)))
    transduction = {}
    if "transduction" in doc:
        tr = doc["transduction"]
        transduction = {
            "t0": _resolve(tr, "t0"),
            "background": _resolve(tr, "background", 0.0),
            "kappa_x": _resolve(tr, "kappa_x"),
            "side": tr.get("side", "right"),
            "detector_noise_rms": _resolve(tr, "detector_noise_rms", 0.0),
        }
        if transduction["side"] not in ("left", "right"):
            raise ConfigError(f"unknown side {transduction['side']!r}")
    elif kind == "transmission":
        raise ConfigError("transmission scenarios need a transduction block")
    return Scenario(
        name=doc.get("name", "unnamed"),
        kind=kind,
        noise=noise,
        sample_rate=_resolve(doc, "sample_rate"),
        duration=_resolve(doc, "duration"),
        transduction=transduction,
    )


def builtin_scenario_names() -> list[str]:
    root = resources.files("fpcavity").joinpath("data", "scenarios")
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_scenario(name_or_path: str) -> Scenario:
    """Load a scenario by built-in name or from a JSON file path."""
    root = resources.files("fpcavity").joinpath("data", "scenarios")
    builtin = root.joinpath(f"{name_or_path}.json")
    try:
        text = builtin.read_text()
    except (FileNotFoundError, NotADirectoryError):
        try:
            with open(name_or_path) as fh:
                text = fh.read()
        except FileNotFoundError:
            raise ConfigError(
                f"unknown scenario {name_or_path!r} "
                f"(built-in: {', '.join(builtin_scenario_names())})"
            ) from None
    return scenario_from_dict(json.loads(text))
