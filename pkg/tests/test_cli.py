import io
import json

import numpy as np
import pytest

from fpcavity import lorentzian, synth_odmr
from fpcavity.cli import main
from fpcavity.traces import write_csv


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestSimpleCommands:
    def test_length_from_fsr(self, capsys):
        doc = run_json(capsys, "length", "--fsr", "5THz")
        assert doc["result"]["length_um"] == pytest.approx(29.979, abs=0.01)
        assert doc["command"] == "length"
        assert doc["config"]["fsr_hz"] == 5e12

    def test_design_curve_point(self, capsys):
        doc = run_json(capsys, "design-curve", "--preset", "herrmann-air",
                       "--sigma", "25pm")
        point = doc["result"]["points"][0]
        assert 22.0 <= point["f_p_max"] <= 29.0
        assert point["sigma_pm"] == pytest.approx(25.0)

    def test_design_curve_sweep_csv(self, capsys, tmp_path):
        csv_path = tmp_path / "curve.csv"
        doc = run_json(capsys, "design-curve", "--preset", "riedel-air",
                       "--sigma-range", "1pm:1000pm", "--points", "13",
                       "--csv", str(csv_path))
        points = doc["result"]["points"]
        assert len(points) == 13
        vals = [p["f_p_max"] for p in points]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        header = csv_path.read_text().splitlines()[0]
        assert header == "sigma_m,f_p_max"

    def test_modes_and_dispersion(self, capsys):
        doc = run_json(capsys, "modes", "--diamond", "0.8um", "--air", "2.6um",
                       "--band", "450THz:480THz")
        assert doc["result"]["n_modes"] == 1
        mode = doc["result"]["modes"][0]
        assert mode["character"] == "air-like"
        doc2 = run_json(capsys, "dispersion", "--diamond", "0.8um", "--air", "2.6um",
                        "--frequency", f"{mode['frequency_thz']}THz")
        assert doc2["result"]["magnitude_mhz_per_pm"] == pytest.approx(135.3, abs=1.0)

    def test_purcell_explicit_matches_preset(self, capsys):
        a = run_json(capsys, "purcell", "--preset", "herrmann-air", "--sigma", "25pm")
        b = run_json(capsys, "purcell", "--wavelength", "619nm",
                     "--mode-volume-lambda3", "55", "--slope", "46MHz/pm",
                     "--sigma", "25pm")
        assert a["result"]["f_p_max"] == pytest.approx(b["result"]["f_p_max"], rel=1e-12)


class TestTraceCommands:
    def test_linewidth_two_laser_scan(self, capsys, tmp_path):
        axis = np.linspace(0.0, 1.0, 3000)
        y = (0.02 + lorentzian(axis, 1.0, 0.30, 0.02)
             + lorentzian(axis, 0.7, 0.70, 0.025))
        path = tmp_path / "scan.csv"
        write_csv(path, axis, y, header=("piezo_scan", "signal_V"))
        doc = run_json(capsys, "linewidth", str(path), "--detuning", "60GHz",
                       "--slope", "20MHz/pm")
        res = doc["result"]
        assert res["hz_per_unit"] == pytest.approx(150e9, rel=1e-6)
        assert res["peaks"][0]["fwhm_ghz"] == pytest.approx(3.0, rel=1e-4)
        assert res["peaks"][0]["fwhm_spatial_pm"] == pytest.approx(150.0, rel=1e-4)

    def test_simulate_then_vibration_roundtrip(self, capsys, tmp_path):
        trace_path = tmp_path / "trace.csv"
        doc = run_json(capsys, "simulate", "--scenario", "hila-default",
                       "--duration", "2s", "--output", str(trace_path))
        truth = doc["result"]["ground_truth_rms_pm"]
        doc2 = run_json(capsys, "vibration", str(trace_path), "--linewidth-pm", "500",
                        "--spectrum-csv", str(tmp_path / "spec.csv"))
        res = doc2["result"]
        assert res["rms_pm"] == pytest.approx(truth, rel=0.05)
        assert res["gaussianity"]["passed"] is True
        assert (tmp_path / "spec.csv").exists()
        # defaults are recorded so the analysis is reproducible
        assert doc2["config"]["t0_v"] == 1.0
        assert doc2["config"]["side"] == "right"

    def test_vibration_reads_stdin(self, capsys, tmp_path, monkeypatch):
        trace_path = tmp_path / "trace.csv"
        run_json(capsys, "simulate", "--scenario", "hila-default",
                 "--duration", "1s", "--output", str(trace_path))
        monkeypatch.setattr("sys.stdin", io.StringIO(trace_path.read_text()))
        doc = run_json(capsys, "vibration", "-", "--kappa-x", "500pm")
        assert 20.0 < doc["result"]["rms_pm"] < 30.0

    def test_vibration_reads_json_envelope(self, capsys, tmp_path):
        from fpcavity import load_scenario
        from fpcavity.traces import write_envelope

        scenario = load_scenario("hila-default")
        _, trans = scenario.render(duration=1.0)
        path = tmp_path / "trace.json"
        write_envelope(path, trans.samples, sample_rate=trans.sample_rate,
                       axis_unit="s", value_unit="V")
        doc = run_json(capsys, "vibration", str(path), "--kappa-x", "500pm")
        assert 20.0 < doc["result"]["rms_pm"] < 30.0

    def test_voigt_multi_scan(self, capsys, tmp_path):
        from fpcavity import LorentzianResonance, ScanConfig, synth_scan_ensemble

        cal = LorentzianResonance(amplitude=1.0, center=0.0, fwhm=1e9,
                                  background=0.0, fwhm_spatial=500e-12)
        scans = synth_scan_ensemble(
            cal, 502e6, ScanConfig(span=16e9, detector_noise_rms=0.01), 5, seed=3
        )
        paths = []
        for i, sc in enumerate(scans):
            p = tmp_path / f"scan{i}.csv"
            write_csv(p, sc.axis, sc.samples, header=("frequency_hz", "signal_V"))
            paths.append(str(p))
        doc = run_json(capsys, "voigt", *paths, "--kappa", "1GHz",
                       "--slope", "20MHz/pm")
        assert doc["result"]["sigma_pm"] == pytest.approx(25.1, rel=0.10)
        assert doc["result"]["n_scans"] == 5

    def test_cycle_rms(self, capsys, tmp_path):
        from fpcavity import NoiseComponent, NoiseModel, synth_displacement

        model = NoiseModel(
            components=(
                NoiseComponent(kind="white", amplitude=3e-12),
                NoiseComponent(kind="burst", amplitude=40e-12, frequency=2e3,
                               phase=0.25, cycle_period=0.7),
            ),
            seed=12,
        )
        disp = synth_displacement(model, 7.0, 50e3)
        path = tmp_path / "disp.csv"
        write_csv(path, disp.times, disp.samples, header=("time_s", "displacement_m"))
        doc = run_json(capsys, "cycle-rms", str(path), "--period", "0.7s")
        bins = doc["result"]["bins"]
        top = max(bins, key=lambda b: b["rms_pm"])
        assert abs(top["phase"] - 0.25) < 0.05

    def test_odmr_field_extraction(self, capsys, tmp_path):
        freqs, y = synth_odmr(
            [2.7695e9, 2.9705e9], [0.2, 0.12], [9e6, 9e6],
            baseline=1000.0, noise_rms=5.0, seed=2,
        )
        path = tmp_path / "odmr.csv"
        write_csv(path, freqs, y, header=("frequency_hz", "counts"))
        doc = run_json(capsys, "odmr", str(path), "--dips", "2")
        assert doc["result"]["field_gauss"] == pytest.approx(35.86, abs=1.0)
        assert doc["result"]["splitting_mhz"] == pytest.approx(201.0, abs=1.5)


class TestSimulateReproducibility:
    def test_same_seed_same_bytes(self, capsys, tmp_path):
        a = run_json(capsys, "simulate", "--scenario", "hila-default",
                     "--duration", "0.5s", "--output", str(tmp_path / "a.csv"))
        b = run_json(capsys, "simulate", "--scenario", "hila-default",
                     "--duration", "0.5s", "--output", str(tmp_path / "b.csv"))
        assert a["result"]["csv_sha256"] == b["result"]["csv_sha256"]
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_seed_override_changes_output(self, capsys, tmp_path):
        a = run_json(capsys, "simulate", "--scenario", "hila-default",
                     "--duration", "0.5s", "--seed", "1",
                     "--output", str(tmp_path / "a.csv"))
        b = run_json(capsys, "simulate", "--scenario", "hila-default",
                     "--duration", "0.5s", "--seed", "2",
                     "--output", str(tmp_path / "b.csv"))
        assert a["result"]["csv_sha256"] != b["result"]["csv_sha256"]

    def test_rerun_from_result_document(self, capsys, tmp_path):
        doc_path = tmp_path / "result.json"
        doc = run_json(capsys, "simulate", "--scenario", "hila-default",
                       "--duration", "0.5s", "--output", str(tmp_path / "a.csv"))
        doc_path.write_text(json.dumps(doc))
        redo = run_json(capsys, "rerun", str(doc_path),
                        "--output", str(tmp_path / "b.csv"))
        assert redo["result"]["csv_sha256"] == doc["result"]["csv_sha256"]
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_csv_to_stdout_when_no_output(self, capsys):
        code, out, err = run_cli(capsys, "simulate", "--scenario", "hila-default",
                                 "--duration", "0.1s")
        assert code == 0
        assert out.startswith("time_s,signal_V\n")


class TestValidate:
    GOOD = {
        "version": 1,
        "name": "test",
        "kind": "displacement",
        "sample_rate": "10kHz",
        "duration": "1s",
        "noise": {"components": [{"kind": "white", "amplitude": "3pm"}]},
    }

    def test_valid_scenario_empty_diagnostics(self, capsys, tmp_path):
        path = tmp_path / "ok.json"
        path.write_text(json.dumps(self.GOOD))
        doc = run_json(capsys, "validate", str(path))
        assert doc["result"]["diagnostics"] == []
        assert doc["result"]["valid"] is True
        # defaulted parameters are listed for reproducibility
        fields = {d["field"] for d in doc["result"]["defaults"]}
        assert "noise.seed" in fields

    def test_unknown_unit_names_field_and_line(self, capsys, tmp_path):
        bad = json.loads(json.dumps(self.GOOD))
        bad["noise"]["components"][0]["amplitude"] = "3pF"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad, indent=2))
        code, out, err = run_cli(capsys, "validate", str(path))
        assert code == 3
        diags = json.loads(out)["result"]["diagnostics"]
        assert len(diags) == 1
        assert "pF" in diags[0]["message"]
        assert diags[0]["line"] is not None

    def test_unknown_key_rejected(self, capsys, tmp_path):
        bad = json.loads(json.dumps(self.GOOD))
        bad["unexpected"] = 1
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        code, out, _ = run_cli(capsys, "validate", str(path))
        assert code == 3
        assert json.loads(out)["result"]["diagnostics"]

    def test_missing_file_diagnostic(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "validate", str(tmp_path / "nope.json"))
        assert code == 3
        diags = json.loads(out)["result"]["diagnostics"]
        assert any("exist" in d["message"] for d in diags)


class TestErrorMapping:
    def test_unit_error_exit_code(self, capsys):
        code, out, err = run_cli(capsys, "length", "--fsr", "5parsec")
        assert code == 4
        assert json.loads(err)["error"]["class"] == "UnitError"

    def test_domain_error_exit_code(self, capsys):
        code, out, err = run_cli(capsys, "length", "--fsr=-5THz")
        assert code == 5
        assert json.loads(err)["error"]["class"] == "DomainError"

    def test_config_error_exit_code(self, capsys):
        code, out, err = run_cli(capsys, "length")
        assert code == 3

    def test_missing_input_file(self, capsys, tmp_path):
        code, out, err = run_cli(capsys, "odmr", str(tmp_path / "nothing.csv"))
        assert code == 10
        assert json.loads(err)["error"]["class"] == "IoError"

    def test_calibration_error_exit_code(self, capsys, tmp_path):
        axis = np.linspace(0, 1, 500)
        y = lorentzian(axis, 1.0, 0.5, 0.02)  # only one peak
        path = tmp_path / "scan.csv"
        write_csv(path, axis, y, header=("axis", "signal"))
        code, out, err = run_cli(capsys, "linewidth", str(path), "--detuning", "60GHz")
        assert code == 8
        assert json.loads(err)["error"]["class"] == "CalibrationError"
