import numpy as np
import pytest
from scipy.constants import c as C_LIGHT

from fpcavity import (
    CalibrationError,
    CavityGeometry,
    DetectionError,
    DomainError,
    InsufficientDataError,
    calibrate_scan_axis,
    fit_lorentzian_peaks,
    length_from_white_light,
    lorentzian,
    synth_white_light_spectrum,
)


def two_peak_scan(n=2000, c1=0.30, c2=0.70, w1=0.02, w2=0.02, a1=1.0, a2=0.8, bg=0.05):
    axis = np.linspace(0.0, 1.0, n)
    y = bg + lorentzian(axis, a1, c1, w1) + lorentzian(axis, a2, c2, w2)
    return axis, y


class TestLorentzianFit:
    def test_noise_free_single_peak_exact(self):
        axis = np.linspace(-5e9, 5e9, 2001)
        y = lorentzian(axis, 1.0, 0.0, 1e9)
        fit = fit_lorentzian_peaks(axis, y, 1)
        pk = fit.peaks[0]
        assert pk.amplitude == pytest.approx(1.0, rel=1e-8)
        assert abs(pk.center) < 1e9 * 1e-8
        assert pk.fwhm == pytest.approx(1e9, rel=1e-8)
        assert abs(pk.background) < 1e-8
        assert fit.residual_rms < 1e-9

    def test_two_peaks_with_noise_monte_carlo(self):
        """Centers stay within kappa/20 under 5% additive white noise."""
        kappa = 0.02
        worst = 0.0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            axis, clean = two_peak_scan(w1=kappa, w2=kappa)
            y = clean + rng.normal(0.0, 0.05, clean.size)
            fit = fit_lorentzian_peaks(axis, y, 2)
            worst = max(
                worst,
                abs(fit.peaks[0].center - 0.30),
                abs(fit.peaks[1].center - 0.70),
            )
        assert worst < kappa / 20

    def test_flat_trace_is_detection_error(self):
        axis = np.linspace(0, 1, 500)
        with pytest.raises(DetectionError):
            fit_lorentzian_peaks(axis, np.ones_like(axis), 1)

    def test_missing_second_peak(self):
        axis = np.linspace(-5, 5, 1000)
        y = lorentzian(axis, 1.0, 0.0, 0.5)
        with pytest.raises(DetectionError):
            fit_lorentzian_peaks(axis, y, 2)

    def test_amplitude_rescale_invariance(self):
        axis, y = two_peak_scan()
        ref = fit_lorentzian_peaks(axis, y, 2)
        for alpha in (0.2, 7.0, 1234.5):
            fit = fit_lorentzian_peaks(axis, alpha * y, 2)
            for pk, pk0 in zip(fit.peaks, ref.peaks):
                assert pk.center == pytest.approx(pk0.center, abs=1e-9)
                assert pk.fwhm == pytest.approx(pk0.fwhm, rel=1e-6)
                assert pk.amplitude == pytest.approx(alpha * pk0.amplitude, rel=1e-6)
            assert fit.background == pytest.approx(alpha * ref.background, rel=1e-6)

    def test_reports_standard_errors(self):
        rng = np.random.default_rng(3)
        axis, clean = two_peak_scan()
        y = clean + rng.normal(0, 0.02, clean.size)
        fit = fit_lorentzian_peaks(axis, y, 2)
        for pk in fit.peaks:
            assert pk.center_err is not None and pk.center_err > 0
            assert pk.fwhm_err is not None and pk.fwhm_err > 0


class TestScanCalibration:
    def test_synthetic_two_peak_scale(self):
        axis, y = two_peak_scan()
        cal = calibrate_scan_axis(axis, y, 60e9)
        assert cal.hz_per_unit == pytest.approx(150e9, rel=1e-6)
        # injected widths recover exactly on noise-free data
        assert cal.raw_peaks[0].fwhm == pytest.approx(0.02, rel=1e-6)
        assert cal.raw_peaks[1].fwhm == pytest.approx(0.02, rel=1e-6)
        assert cal.peaks[0].center == pytest.approx(0.0, abs=1.0)
        assert cal.peaks[1].center == pytest.approx(60e9, rel=1e-9)
        # calibrated widths are the raw widths times the axis scale
        assert cal.peaks[0].fwhm == pytest.approx(0.02 * 150e9, rel=1e-6)

    def test_noisy_widths_within_two_percent(self):
        rng = np.random.default_rng(11)
        axis, clean = two_peak_scan(n=4000, w1=0.02, w2=0.02)
        y = clean + rng.normal(0, 0.01, clean.size)
        cal = calibrate_scan_axis(axis, y, 60e9)
        for pk, injected in zip(cal.raw_peaks, (0.02, 0.02)):
            assert pk.fwhm == pytest.approx(injected, rel=0.02)

    def test_zero_detuning_rejected(self):
        axis, y = two_peak_scan()
        with pytest.raises(DomainError):
            calibrate_scan_axis(axis, y, 0.0)

    def test_wrong_peak_count(self):
        axis = np.linspace(0, 1, 1000)
        y = lorentzian(axis, 1.0, 0.5, 0.02)
        with pytest.raises(CalibrationError):
            calibrate_scan_axis(axis, y, 60e9)
        y3 = (y + lorentzian(axis, 1.0, 0.2, 0.02)
              + lorentzian(axis, 1.0, 0.8, 0.02))
        with pytest.raises(CalibrationError):
            calibrate_scan_axis(axis, y3, 60e9)

    def test_overlapping_peaks_rejected(self):
        axis, y = two_peak_scan(c1=0.48, c2=0.52, w1=0.03, w2=0.03)
        with pytest.raises(CalibrationError):
            calibrate_scan_axis(axis, y, 60e9)


class TestWhiteLightLength:
    BAND_600_700 = (C_LIGHT / 700e-9, C_LIGHT / 600e-9)

    def test_bare_20um_within_half_percent(self):
        geo = CavityGeometry(diamond_thickness=0.0, air_gap=20e-6)
        lam, tr, modes = synth_white_light_spectrum(
            geo, self.BAND_600_700, linewidth=0.3e12, n_points=6000
        )
        assert 9 <= modes.size <= 10
        res = length_from_white_light(lam, tr)
        assert res.length == pytest.approx(20e-6, rel=5e-3)

    def test_two_line_arithmetic(self):
        # frozen: FSR = c/600nm - c/650nm = 38.435 THz -> L = 3.9 um exactly
        lam = np.linspace(580e-9, 670e-9, 4000)
        freqs = C_LIGHT / lam
        tr = (lorentzian(freqs, 1.0, C_LIGHT / 600e-9, 0.3e12)
              + lorentzian(freqs, 1.0, C_LIGHT / 650e-9, 0.3e12))
        res = length_from_white_light(lam, tr)
        assert res.fsr == pytest.approx(38.4349305e12, rel=1e-4)
        assert res.length == pytest.approx(3.9e-6, rel=1e-4)

    def test_spurious_transverse_peaks_rejected(self):
        geo = CavityGeometry(diamond_thickness=0.0, air_gap=20e-6)
        lam0, tr0, modes = synth_white_light_spectrum(
            geo, self.BAND_600_700, linewidth=0.3e12, n_points=6000
        )
        # spurious peaks at 30% amplitude inside two of the gaps
        spurious = [
            ((modes[1] + modes[2]) / 2.0 + 0.8e12, 0.3),
            ((modes[5] + modes[6]) / 2.0 - 0.5e12, 0.3),
        ]
        lam, tr, _ = synth_white_light_spectrum(
            geo, self.BAND_600_700, linewidth=0.3e12, n_points=6000,
            extra_peaks=spurious,
        )
        clean = length_from_white_light(lam0, tr0)
        res = length_from_white_light(lam, tr)
        assert res.rejected_spacings >= 2
        assert res.length == pytest.approx(clean.length, rel=2e-3)
        assert res.length == pytest.approx(20e-6, rel=5e-3)

    def test_too_few_peaks(self):
        lam = np.linspace(600e-9, 700e-9, 1000)
        tr = lorentzian(C_LIGHT / lam, 1.0, C_LIGHT / 650e-9, 0.3e12)
        with pytest.raises(InsufficientDataError):
            length_from_white_light(lam, tr)

    def test_non_monotone_axis_rejected(self):
        lam = np.array([600e-9, 610e-9, 605e-9, 620e-9] * 3)
        with pytest.raises(DomainError):
            length_from_white_light(lam, np.ones_like(lam))
