import numpy as np
import pytest
from scipy.constants import c as C_LIGHT

from fpcavity import (
    CavityGeometry,
    ConfigError,
    DetectionError,
    DomainError,
    LorentzianResonance,
    NoiseComponent,
    NoiseModel,
    ScanConfig,
    fit_lorentzian_peaks,
    load_scenario,
    lorentzian,
    odmr_fit,
    synth_displacement,
    synth_odmr,
    synth_scan_ensemble,
    synth_swept_scan,
    synth_white_light_spectrum,
)

CAL = LorentzianResonance(
    amplitude=1.0, center=0.0, fwhm=1e9, background=0.0, fwhm_spatial=500e-12
)


class TestDeterminism:
    def test_displacement_bit_identical_for_same_seed(self):
        model = NoiseModel(
            components=(
                NoiseComponent(kind="white", amplitude=10e-12),
                NoiseComponent(kind="harmonic_comb", amplitude=5e-12, frequency=1.4),
            ),
            seed=42,
        )
        a = synth_displacement(model, 1.0, 50e3)
        b = synth_displacement(model, 1.0, 50e3)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_different_seeds_differ(self):
        mk = lambda seed: NoiseModel(
            components=(NoiseComponent(kind="white", amplitude=10e-12),), seed=seed
        )
        a = synth_displacement(mk(1), 0.1, 50e3)
        b = synth_displacement(mk(2), 0.1, 50e3)
        assert not np.array_equal(a.samples, b.samples)

    def test_scan_ensemble_deterministic_and_mutually_independent(self):
        cfg = ScanConfig(span=16e9, detector_noise_rms=0.0)
        scans1 = synth_scan_ensemble(CAL, 502e6, cfg, 3, seed=5)
        scans2 = synth_scan_ensemble(CAL, 502e6, cfg, 3, seed=5)
        for s1, s2 in zip(scans1, scans2):
            np.testing.assert_array_equal(s1.samples, s2.samples)
        assert not np.array_equal(scans1[0].samples, scans1[1].samples)


class TestAnalyticRms:
    def test_sine_and_white_composition(self):
        model = NoiseModel(
            components=(
                NoiseComponent(kind="sine", amplitude=10e-12, frequency=1e3),
                NoiseComponent(kind="white", amplitude=5e-12),
            ),
            seed=0,
        )
        expected = np.sqrt((10e-12) ** 2 / 2 + (5e-12) ** 2)
        assert model.analytic_rms() == pytest.approx(expected, rel=1e-12)
        disp = synth_displacement(model, 10.0, 100e3)  # 1e6 samples
        assert disp.rms == pytest.approx(expected, rel=5e-3)

    def test_comb_variance(self):
        comb = NoiseComponent(kind="harmonic_comb", amplitude=12e-12, frequency=10.0,
                              n_harmonics=10)
        expected = (12e-12) ** 2 / 2 * sum(1 / m**2 for m in range(1, 11))
        assert comb.analytic_variance() == pytest.approx(expected, rel=1e-12)
        model = NoiseModel(components=(comb,), seed=7)
        disp = synth_displacement(model, 100.0, 10e3)  # 1e6 samples, 1000 cycles
        assert disp.rms == pytest.approx(np.sqrt(expected), rel=5e-3)

    def test_aliasing_guard(self):
        model = NoiseModel(
            components=(NoiseComponent(kind="sine", amplitude=1e-12, frequency=30e3),),
            seed=0,
        )
        with pytest.raises(DomainError, match="alias"):
            synth_displacement(model, 1.0, 50e3)
        comb = NoiseModel(
            components=(
                NoiseComponent(kind="harmonic_comb", amplitude=1e-12, frequency=3e3),
            ),
            seed=0,
        )
        with pytest.raises(DomainError, match="alias"):
            synth_displacement(comb, 1.0, 50e3)  # 10th harmonic at 30 kHz


class TestSweptScan:
    def test_zero_jitter_noise_free_is_exact_lorentzian(self):
        cfg = ScanConfig(span=10e9, detector_noise_rms=0.0)
        scan = synth_swept_scan(CAL, 0.0, cfg, seed=0)
        np.testing.assert_allclose(
            scan.samples, lorentzian(scan.axis, 1.0, 0.0, 1e9), rtol=1e-12
        )

    def test_span_guard(self):
        with pytest.raises(DomainError):
            synth_swept_scan(CAL, 502e6, ScanConfig(span=5e9))

    def test_scan_speed_invariance_of_fitted_width(self):
        """Doubling the scan rate at fixed span leaves fitted widths unchanged."""
        widths = []
        for rate in (10e9, 20e9):
            cfg = ScanConfig(span=10e9, scan_rate=rate, detector_noise_rms=0.0)
            scan = synth_swept_scan(CAL, 0.0, cfg, seed=0)
            fit = fit_lorentzian_peaks(scan.axis, scan.samples, 1)
            widths.append(fit.peaks[0].fwhm)
        assert widths[0] == pytest.approx(widths[1], rel=1e-9)
        assert widths[0] == pytest.approx(1e9, rel=1e-9)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            ScanConfig(span=-1e9)
        with pytest.raises(DomainError):
            ScanConfig(span=1e9, scan_rate=0.0)


class TestWhiteLight:
    def test_bare_cavity_spacing(self):
        geo = CavityGeometry(diamond_thickness=0.0, air_gap=20e-6)
        band = (C_LIGHT / 700e-9, C_LIGHT / 600e-9)
        lam, tr, modes = synth_white_light_spectrum(geo, band, linewidth=0.3e12)
        fsr = C_LIGHT / (2 * 20e-6)
        np.testing.assert_allclose(np.diff(modes), fsr, rtol=1e-9)
        assert np.all(np.diff(lam) > 0)  # ascending wavelength axis

    def test_peaks_sit_on_cavity_roots(self):
        geo = CavityGeometry(diamond_thickness=0.8e-6, air_gap=2.6e-6)
        band = (440e12, 500e12)
        lam, tr, modes = synth_white_light_spectrum(geo, band, linewidth=0.2e12,
                                                    n_points=8000)
        freqs = C_LIGHT / lam[::-1]
        tr_f = tr[::-1]
        grid_step = freqs[1] - freqs[0]
        for nu in modes:
            i = np.argmin(np.abs(freqs - nu))
            window = tr_f[max(i - 3, 0): i + 4]
            assert tr_f[i] == pytest.approx(np.max(window), rel=1e-9)
            assert tr_f[i] > 0.5  # unit amplitude lines
            assert abs(freqs[i] - nu) <= grid_step


class TestSynthOdmr:
    def test_dips_round_trip(self):
        freqs, y = synth_odmr(
            [2.7695e9, 2.9705e9], [0.2, 0.12], [8e6, 8e6],
            baseline=1000.0, noise_rms=4.0, seed=3,
        )
        res = odmr_fit(freqs, y, n_dips=2)
        assert res.splitting == pytest.approx(201e6, abs=1e6)

    def test_zero_contrast_gives_flat_spectrum_and_detection_error(self):
        freqs, y = synth_odmr([2.87e9], [0.0], [8e6], baseline=100.0)
        assert np.all(y == 100.0)
        with pytest.raises(DetectionError):
            odmr_fit(freqs, y, n_dips=1)

    def test_contrast_validation(self):
        with pytest.raises(DomainError):
            synth_odmr([2.87e9], [1.2], [8e6])
        with pytest.raises(DomainError):
            synth_odmr([2.87e9], [0.5], [-1.0])


class TestScenarios:
    def test_hila_default_contents(self):
        sc = load_scenario("hila-default")
        assert sc.kind == "transmission"
        assert sc.sample_rate == pytest.approx(200e3)
        assert sc.duration == pytest.approx(10.0)
        kinds = [c.kind for c in sc.noise.components]
        assert kinds.count("sine") == 3
        assert "harmonic_comb" in kinds and "white" in kinds
        comb = next(c for c in sc.noise.components if c.kind == "harmonic_comb")
        assert comb.frequency == pytest.approx(1.4)
        sine_freqs = sorted(c.frequency for c in sc.noise.components if c.kind == "sine")
        assert all(2e3 <= f <= 4e3 for f in sine_freqs)
        assert sc.ground_truth_rms == pytest.approx(25e-12, rel=0.01)
        assert sc.transduction["kappa_x"] == pytest.approx(500e-12)

    def test_render_kind(self):
        sc = load_scenario("hila-default")
        disp, trans = sc.render(duration=0.05)
        assert trans is not None
        assert trans.sample_rate == disp.sample_rate == pytest.approx(200e3)

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError):
            load_scenario("definitely-not-a-scenario")

    def test_scenario_file_round_trip(self, tmp_path):
        path = tmp_path / "custom.json"
        path.write_text(
            '{"version": 1, "name": "custom", "kind": "displacement", '
            '"sample_rate": "10kHz", "duration": "1s", '
            '"noise": {"seed": 5, "components": ['
            '{"kind": "white", "amplitude": "3pm"}]}}'
        )
        sc = load_scenario(str(path))
        assert sc.noise.components[0].amplitude == pytest.approx(3e-12)
        disp, trans = sc.render()
        assert trans is None
        assert disp.samples.size == 10_000
