"""Fiber Fabry-Perot microcavity toolkit.

Hybrid diamond-air mode model, vibration-limited Purcell bounds, the
measurement-analysis pipeline (linewidth, length, vibration, Voigt, ODMR)
and a seedable synthetic-signal oracle.
"""

from .cavity import (
    CavityGeometry,
    CavityMode,
    DispersionSlope,
    ModeCharacter,
    ModeVolume,
    dispersion_slope,
    length_from_fsr,
    mode_character,
    mode_volume,
    resonance_frequencies,
)
from .errors import (
    CalibrationError,
    ConfigError,
    DetectionError,
    DomainError,
    FitError,
    FpCavityError,
    InsufficientDataError,
    NumericalError,
    QualityError,
    UnitError,
)
from .odmr import GYROMAGNETIC_RATIO, OdmrResult, odmr_fit
from .peaks import (
    PeakFitResult,
    ScanCalibration,
    WhiteLightResult,
    calibrate_scan_axis,
    fit_lorentzian_peaks,
    length_from_white_light,
    lorentzian,
)
from .purcell import (
    PurcellParams,
    PurcellResult,
    design_curve,
    effective_purcell,
    load_presets,
    max_purcell,
    preset_params,
    purcell_factor,
    spectral_overlap,
    vibration_pdf,
)
from .synth import (
    NoiseComponent,
    NoiseModel,
    ScanConfig,
    Scenario,
    load_scenario,
    synth_displacement,
    synth_odmr,
    synth_scan_ensemble,
    synth_swept_scan,
    synth_transmission_trace,
    synth_white_light_spectrum,
)
from .traces import (
    CalibratedScan,
    DisplacementTrace,
    LorentzianResonance,
    SpectrumResult,
    TransmissionTrace,
)
from .vibration import (
    CyclePhaseRms,
    GaussianityResult,
    amplitude_spectrum,
    cycle_phase_rms,
    gaussianity_check,
    transmission_to_displacement,
)
from .voigt import VibrationFromScans, VoigtScanFit, voigt_peak, voigt_scan_fit

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
