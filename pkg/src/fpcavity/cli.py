"""Batch-analysis command line: file ingestion, unit parsing, JSON results.

Every command emits a result document embedding its full effective
configuration (defaults included, all values SI) so any seeded analysis
can be reproduced bit-exactly with ``fpcavity rerun``. Trace commands read
two-column CSV from a path or stdin (``-``); file outputs are written
atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
import tempfile
from importlib import resources

import numpy as np
from scipy.constants import c as C_LIGHT

from . import __version__, cavity, odmr, peaks, purcell, synth, traces, vibration, voigt
from .errors import ConfigError, DomainError, FpCavityError
from .units import parse_band, parse_quantity

_EXIT_IO = 10


# ---------------------------------------------------------------------------
# small helpers


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_doc(doc: dict, output: str | None, stream=None):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if output:
        _atomic_write(output, text)
    else:
        (stream or sys.stdout).write(text)


def _result_doc(command: str, config: dict, result: dict) -> dict:
    return {
        "tool": "fpcavity",
        "version": __version__,
        "command": command,
        "config": config,
        "result": result,
    }


def _read_two_column(path: str):
    """Load (axis, values) from CSV, stdin, or a JSON trace envelope."""
    if path == "-":
        text = sys.stdin.read()
        if text.lstrip().startswith("{"):
            return _envelope_axes(traces.read_envelope(io.StringIO(text)))
        return traces.read_csv(io.StringIO(text))
    if path.endswith(".json"):
        return _envelope_axes(traces.read_envelope(path))
    return traces.read_csv(path)


def _envelope_axes(doc: dict):
    values = np.asarray(doc["values"], dtype=float)
    if doc.get("axis") is not None:
        axis = np.asarray(doc["axis"], dtype=float)
    else:
        axis = np.arange(values.size) / float(doc["sample_rate"])
    return axis, values, (doc.get("axis_unit", ""), doc.get("value_unit", ""))


def _csv_text(axis, values, header) -> str:
    buf = io.StringIO()
    traces.write_csv(buf, axis, values, header=header)
    return buf.getvalue()


def _geometry_from_config(cfg: dict) -> cavity.CavityGeometry:
    return cavity.CavityGeometry(
        diamond_thickness=cfg["diamond_thickness_m"],
        air_gap=cfg["air_gap_m"],
        refractive_index=cfg["refractive_index"],
        radius_of_curvature=cfg.get("radius_of_curvature_m"),
    )


def _purcell_params_from_config(cfg: dict, sigma: float) -> purcell.PurcellParams:
    if cfg.get("preset"):
        pp = purcell.preset_params(cfg["preset"], sigma)
        if cfg.get("quality_factor"):
            pp = purcell.PurcellParams(
                frequency=pp.frequency,
                refractive_index=pp.refractive_index,
                mode_volume=pp.mode_volume,
                quality_factor=cfg["quality_factor"],
                dispersion_slope=pp.dispersion_slope,
                rms_length_fluctuation=sigma,
            )
        return pp
    missing = [k for k in ("wavelength_m", "mode_volume_lambda3", "dispersion_slope_hz_per_m")
               if not cfg.get(k)]
    if missing:
        raise ConfigError(f"give --preset or explicit parameters (missing: {', '.join(missing)})")
    lam = cfg["wavelength_m"]
    return purcell.PurcellParams(
        frequency=C_LIGHT / lam,
        refractive_index=cfg["refractive_index"],
        mode_volume=cfg["mode_volume_lambda3"] * lam**3,
        quality_factor=cfg.get("quality_factor"),
        dispersion_slope=cfg["dispersion_slope_hz_per_m"],
        rms_length_fluctuation=sigma,
    )


def _mode_dict(m: cavity.CavityMode) -> dict:
    return {
        "frequency_hz": m.frequency,
        "frequency_thz": m.frequency / 1e12,
        "wavelength_nm": m.wavelength * 1e9,
        "mode_order": m.mode_order,
        "character": m.character.value,
    }


def _peak_dict(pk: traces.LorentzianResonance) -> dict:
    out = {
        "amplitude": pk.amplitude,
        "center": pk.center,
        "fwhm": pk.fwhm,
        "background": pk.background,
    }
    for name in ("amplitude_err", "center_err", "fwhm_err", "background_err"):
        val = getattr(pk, name)
        if val is not None:
            out[name] = val
    if pk.fwhm_spatial is not None:
        out["fwhm_spatial_m"] = pk.fwhm_spatial
        out["fwhm_spatial_pm"] = pk.fwhm_spatial * 1e12
    return out


# ---------------------------------------------------------------------------
# command implementations (config in, result out)


def _cmd_modes(cfg: dict) -> dict:
    geo = _geometry_from_config(cfg)
    modes = cavity.resonance_frequencies(geo, (cfg["band_lo_hz"], cfg["band_hi_hz"]))
    out = []
    for m in modes:
        d = _mode_dict(m)
        if geo.radius_of_curvature is not None:
            vol = cavity.mode_volume(geo, m)
            d["mode_volume_m3"] = vol.volume
            d["mode_volume_lambda3"] = vol.per_lambda_cubed
        out.append(d)
    return {"n_modes": len(out), "modes": out}


def _cmd_dispersion(cfg: dict) -> dict:
    geo = _geometry_from_config(cfg)
    target = cfg["frequency_hz"]
    half_fsr = geo.bare_fsr
    modes = cavity.resonance_frequencies(geo, (max(target - half_fsr, 1e9), target + half_fsr))
    if not modes:
        raise DomainError(f"no cavity mode within one FSR of {target:.4g} Hz")
    mode = min(modes, key=lambda m: abs(m.frequency - target))
    slope = cavity.dispersion_slope(geo, mode)
    return {
        "mode": _mode_dict(mode),
        "slope_hz_per_m": slope.s,
        "slope_mhz_per_pm": slope.s / 1e18,
        "magnitude_mhz_per_pm": slope.magnitude_mhz_per_pm,
        "effective_length_um": mode.frequency / abs(slope.s) * 1e6,
    }


def _cmd_purcell(cfg: dict) -> dict:
    sigma = cfg["sigma_m"]
    pp = _purcell_params_from_config(cfg, sigma)
    result = {
        "frequency_hz": pp.frequency,
        "wavelength_nm": pp.wavelength * 1e9,
        "refractive_index": pp.refractive_index,
        "mode_volume_m3": pp.mode_volume,
        "mode_volume_lambda3": pp.mode_volume / pp.wavelength**3,
        "dispersion_slope_hz_per_m": pp.dispersion_slope,
        "sigma_m": sigma,
        "sigma_nu_hz": pp.sigma_nu,
    }
    if pp.quality_factor:
        result["quality_factor"] = pp.quality_factor
        result["f_p"] = purcell.purcell_factor(pp)
        result["f_p_vib"] = purcell.effective_purcell(pp)
    if pp.sigma_nu > 0:
        result["f_p_max"] = purcell.max_purcell(pp)
    return result


def _cmd_design_curve(cfg: dict) -> dict:
    if cfg.get("sigma_m"):
        sigmas = np.array([cfg["sigma_m"]])
        pp = _purcell_params_from_config(cfg, cfg["sigma_m"])
        bounds = np.array([purcell.max_purcell(pp)])
    else:
        pp = _purcell_params_from_config(cfg, 1e-12)
        sigmas, bounds = purcell.design_curve(
            pp, (cfg["sigma_lo_m"], cfg["sigma_hi_m"]), cfg["points"]
        )
    if cfg.get("csv"):
        _atomic_write(cfg["csv"], _csv_text(sigmas, bounds, ("sigma_m", "f_p_max")))
    return {
        "preset": cfg.get("preset"),
        "points": [
            {"sigma_m": float(s), "sigma_pm": float(s) * 1e12, "f_p_max": float(b)}
            for s, b in zip(sigmas, bounds)
        ],
    }


def _cmd_linewidth(cfg: dict) -> dict:
    axis, values, _ = _read_two_column(cfg["input"])
    calres = peaks.calibrate_scan_axis(axis, values, cfg["detuning_hz"])
    pks = calres.peaks
    if cfg.get("dispersion_slope_hz_per_m"):
        pks = [pk.with_spatial(cfg["dispersion_slope_hz_per_m"]) for pk in pks]
    return {
        "hz_per_unit": calres.hz_per_unit,
        "residual_rms": calres.residual_rms,
        "peaks": [dict(_peak_dict(pk), fwhm_ghz=pk.fwhm / 1e9) for pk in pks],
    }


def _cmd_length(cfg: dict) -> dict:
    if cfg.get("fsr_hz"):
        L = cavity.length_from_fsr(cfg["fsr_hz"])
        return {"fsr_hz": cfg["fsr_hz"], "length_m": L, "length_um": L * 1e6}
    lam, tr, _ = _read_two_column(cfg["input"])
    res = peaks.length_from_white_light(lam, tr)
    return {
        "length_m": res.length,
        "length_um": res.length * 1e6,
        "fsr_hz": res.fsr,
        "fsr_thz": res.fsr / 1e12,
        "n_peaks": int(res.peak_frequencies.size),
        "peak_wavelengths_nm": (res.peak_wavelengths * 1e9).tolist(),
        "rejected_spacings": res.rejected_spacings,
    }


def _cmd_vibration(cfg: dict) -> dict:
    axis, values, _ = _read_two_column(cfg["input"])
    rate = traces._uniform_rate(np.asarray(axis))
    trace = traces.TransmissionTrace(samples=values, sample_rate=rate)
    cal = traces.LorentzianResonance(
        amplitude=cfg["t0_v"],
        center=0.0,
        fwhm=1.0,
        background=cfg["background_v"],
        fwhm_spatial=cfg["kappa_x_m"],
    )
    disp = vibration.transmission_to_displacement(trace, cal, side=cfg["side"])
    gauss = vibration.gaussianity_check(disp, ks_threshold=cfg["ks_threshold"])
    spec = vibration.amplitude_spectrum(disp)
    if cfg.get("spectrum_csv"):
        buf = io.StringIO()
        buf.write("frequency_hz,asd_m_per_sqrt_hz,integrated_rms_m\n")
        for f, a, r in zip(spec.frequencies, spec.asd, spec.integrated_rms):
            buf.write(f"{float(f)!r},{float(a)!r},{float(r)!r}\n")
        _atomic_write(cfg["spectrum_csv"], buf.getvalue())
    return {
        "rms_m": disp.rms,
        "rms_pm": disp.rms * 1e12,
        "n_samples": int(disp.samples.size),
        "sample_rate_hz": rate,
        "clipped_low": disp.meta["clipped_low"],
        "overshoot_high": disp.meta["overshoot_high"],
        "gaussianity": {
            "ks_distance": gauss.ks_distance,
            "excess_kurtosis": gauss.excess_kurtosis,
            "threshold": gauss.threshold,
            "passed": gauss.passed,
        },
        "spectrum": {
            "total_integrated_rms_m": spec.total_rms,
            "total_integrated_rms_pm": spec.total_rms * 1e12,
            "parseval_ratio": spec.total_rms / disp.rms if disp.rms else None,
            "frequency_resolution_hz": float(spec.frequencies[1] - spec.frequencies[0])
            if spec.frequencies.size > 1 else None,
        },
    }


def _cmd_voigt(cfg: dict) -> dict:
    scans = []
    for path in cfg["inputs"]:
        axis, values, _ = _read_two_column(path)
        scans.append(traces.CalibratedScan(axis=axis, samples=values))
    res = voigt.voigt_scan_fit(scans, cfg["kappa_hz"], cfg["dispersion_slope_hz_per_m"])
    return {
        "sigma_freq_hz": res.sigma_freq,
        "sigma_freq_err_hz": res.sigma_freq_err,
        "sigma_length_m": res.sigma_length,
        "sigma_length_err_m": res.sigma_length_err,
        "sigma_pm": res.sigma_length * 1e12,
        "sigma_err_pm": res.sigma_length_err * 1e12,
        "is_upper_bound": res.is_upper_bound,
        "n_scans": len(res.scans),
        "scans": [
            {
                "sigma_freq_hz": f.sigma_freq,
                "sigma_freq_err_hz": f.sigma_freq_err,
                "is_upper_bound": f.is_upper_bound,
                "residual_rms": f.residual_rms,
            }
            for f in res.scans
        ],
    }


def _cmd_cycle_rms(cfg: dict) -> dict:
    axis, values, _ = _read_two_column(cfg["input"])
    rate = traces._uniform_rate(np.asarray(axis))
    disp = traces.DisplacementTrace(samples=values, sample_rate=rate)
    res = vibration.cycle_phase_rms(disp, cfg["period_s"], n_bins=cfg["bins"])
    if cfg.get("csv"):
        _atomic_write(cfg["csv"], _csv_text(res.phase, res.rms, ("phase_fraction", "rms_m")))
    return {
        "cycle_period_s": res.cycle_period,
        "bins": [
            {"phase": float(p), "rms_m": float(r), "rms_pm": float(r) * 1e12, "count": int(c)}
            for p, r, c in zip(res.phase, res.rms, res.counts)
        ],
    }


def _cmd_odmr(cfg: dict) -> dict:
    freq, sig, _ = _read_two_column(cfg["input"])
    res = odmr.odmr_fit(
        freq, sig, n_dips=cfg["dips"], min_zeeman_splitting=cfg["min_zeeman_hz"]
    )
    return {
        "dip_centers_hz": res.dip_centers,
        "dip_center_errs_hz": res.dip_center_errs,
        "contrasts": res.contrasts,
        "fwhms_hz": res.fwhms,
        "baseline": res.baseline,
        "splitting_hz": res.splitting,
        "splitting_mhz": None if res.splitting is None else res.splitting / 1e6,
        "splitting_err_hz": res.splitting_err,
        "field_tesla": res.field_tesla,
        "field_gauss": res.field_gauss,
        "residual_rms": res.residual_rms,
    }


def _cmd_simulate(cfg: dict) -> dict:
    scenario = synth.load_scenario(cfg["scenario"])
    disp, trans = scenario.render(duration=cfg.get("duration_s"), seed=cfg.get("seed"))
    if trans is not None:
        axis, values = trans.times, trans.samples
        header = ("time_s", "signal_V")
        kind = "transmission"
    else:
        axis, values = disp.times, disp.samples
        header = ("time_s", "displacement_m")
        kind = "displacement"
    csv_text = _csv_text(axis, values, header)
    if cfg.get("output"):
        _atomic_write(cfg["output"], csv_text)
    else:
        sys.stdout.write(csv_text)
    return {
        "scenario": scenario.name,
        "kind": kind,
        "ground_truth_rms_m": scenario.ground_truth_rms,
        "ground_truth_rms_pm": scenario.ground_truth_rms * 1e12,
        "realized_rms_m": disp.rms,
        "sample_rate_hz": scenario.sample_rate,
        "duration_s": cfg.get("duration_s") or scenario.duration,
        "n_samples": int(values.size),
        "seed": cfg.get("seed") if cfg.get("seed") is not None else scenario.noise.seed,
        "csv_sha256": hashlib.sha256(csv_text.encode()).hexdigest(),
        "csv_path": cfg.get("output"),
    }


# --- validate -----------------------------------------------------------


_SCENARIO_DEFAULTS = {
    "kind": "displacement",
    "noise.seed": 0,
    "transduction.side": "right",
    "transduction.background": 0.0,
    "transduction.detector_noise_rms": 0.0,
}


def _line_of(raw: str, needle: str) -> int | None:
    for i, line in enumerate(raw.splitlines(), start=1):
        if needle in line:
            return i
    return None


def _load_schema(name: str) -> dict:
    text = resources.files("fpcavity").joinpath("data", "schemas", name).read_text()
    return json.loads(text)


def _validate_scenario(doc: dict, raw: str) -> tuple[list[dict], list[dict]]:
    import jsonschema

    schema = _load_schema("scenario-v1.schema.json")
    validator = jsonschema.Draft202012Validator(schema)
    diagnostics = []
    for err in validator.iter_errors(doc):
        path = ".".join(str(p) for p in err.absolute_path) or "<root>"
        needle = str(err.absolute_path[-1]) if err.absolute_path else ""
        diagnostics.append({
            "field": path,
            "line": _line_of(raw, f'"{needle}"') if needle else None,
            "message": err.message,
        })
    if not diagnostics:
        # schema is clean; resolve units field by field
        try:
            synth.scenario_from_dict(doc)
        except FpCavityError as exc:
            token = None
            msg = str(exc)
            if "'" in msg:
                token = msg.split("'")[1]
            diagnostics.append({
                "field": "unit",
                "line": _line_of(raw, token) if token else None,
                "message": msg,
            })
    defaults = []
    for dotted, value in _SCENARIO_DEFAULTS.items():
        node = doc
        *parents, leaf = dotted.split(".")
        for p in parents:
            node = node.get(p, {}) if isinstance(node, dict) else {}
        if isinstance(node, dict) and leaf not in node:
            if parents and parents[0] == "transduction" and "transduction" not in doc:
                continue
            defaults.append({"field": dotted, "value": value})
    return diagnostics, defaults


def _cmd_validate(cfg: dict) -> dict:
    path = cfg["input"]
    try:
        with open(path) as fh:
            raw = fh.read()
    except FileNotFoundError:
        return {
            "diagnostics": [{"field": "<file>", "line": None,
                             "message": f"input file does not exist: {path}"}],
            "defaults": [],
            "valid": False,
        }
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        return {
            "diagnostics": [{"field": "<json>", "line": exc.lineno, "message": exc.msg}],
            "defaults": [],
            "valid": False,
        }
    kind = cfg.get("schema") or ("envelope" if "values" in doc else "scenario")
    if kind == "envelope":
        import jsonschema

        validator = jsonschema.Draft202012Validator(
            _load_schema("trace-envelope-v1.schema.json")
        )
        diagnostics = [
            {
                "field": ".".join(str(p) for p in err.absolute_path) or "<root>",
                "line": None,
                "message": err.message,
            }
            for err in validator.iter_errors(doc)
        ]
        defaults = []
    else:
        diagnostics, defaults = _validate_scenario(doc, raw)
    return {"diagnostics": diagnostics, "defaults": defaults, "valid": not diagnostics}


_COMMANDS = {
    "modes": _cmd_modes,
    "dispersion": _cmd_dispersion,
    "purcell": _cmd_purcell,
    "design-curve": _cmd_design_curve,
    "linewidth": _cmd_linewidth,
    "length": _cmd_length,
    "vibration": _cmd_vibration,
    "voigt": _cmd_voigt,
    "cycle-rms": _cmd_cycle_rms,
    "odmr": _cmd_odmr,
    "simulate": _cmd_simulate,
    "validate": _cmd_validate,
}


# ---------------------------------------------------------------------------
# argument parsing


def _add_geometry_args(p: argparse.ArgumentParser):
    p.add_argument("--diamond", default="0m", help="diamond thickness, e.g. 0.8um")
    p.add_argument("--air", default="0m", help="air gap, e.g. 2.6um")
    p.add_argument("--index", type=float, default=cavity.DEFAULT_DIAMOND_INDEX,
                   help="diamond refractive index")
    p.add_argument("--roc", default=None, help="mirror radius of curvature, e.g. 16um")


def _add_purcell_args(p: argparse.ArgumentParser):
    p.add_argument("--preset", default=None,
                   help="named parameter set (riedel-air, flagan-diamond, "
                        "herrmann-air, herrmann-diamond)")
    p.add_argument("--wavelength", default=None, help="e.g. 619nm")
    p.add_argument("--index", type=float, default=cavity.DEFAULT_DIAMOND_INDEX)
    p.add_argument("--mode-volume-lambda3", type=float, default=None,
                   help="mode volume in units of wavelength cubed")
    p.add_argument("--slope", default=None, help="dispersion slope, e.g. 46MHz/pm")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fpcavity",
        description="Fiber Fabry-Perot microcavity analysis and design toolkit",
    )
    ap.add_argument("--version", action="version", version=f"fpcavity {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modes", help="cavity resonances in a frequency band")
    _add_geometry_args(p)
    p.add_argument("--band", required=True, help="frequency interval, e.g. 400THz:700THz")
    p.add_argument("--output", default=None)

    p = sub.add_parser("dispersion", help="dispersion slope of the mode nearest a frequency")
    _add_geometry_args(p)
    p.add_argument("--frequency", required=True, help="e.g. 470THz or 637nm light: use THz")
    p.add_argument("--output", default=None)

    p = sub.add_parser("purcell", help="bare/effective/maximum Purcell factors")
    _add_purcell_args(p)
    p.add_argument("--sigma", default="0pm", help="RMS length fluctuation, e.g. 25pm")
    p.add_argument("--quality-factor", type=float, default=None)
    p.add_argument("--output", default=None)

    p = sub.add_parser("design-curve", help="attainable Purcell bound vs RMS fluctuation")
    _add_purcell_args(p)
    p.add_argument("--sigma", default=None, help="single point, e.g. 25pm")
    p.add_argument("--sigma-range", default="1pm:1000pm")
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--csv", default=None, help="write the curve as CSV here")
    p.add_argument("--output", default=None)

    p = sub.add_parser("linewidth", help="two-laser scan calibration and linewidth fit")
    p.add_argument("input", help="CSV scan (axis,signal) or - for stdin")
    p.add_argument("--detuning", required=True, help="laser detuning, e.g. 60GHz")
    p.add_argument("--slope", default=None, help="optional dispersion to add spatial widths")
    p.add_argument("--output", default=None)

    p = sub.add_parser("length", help="cavity length from FSR or white-light spectrum")
    p.add_argument("input", nargs="?", default=None,
                   help="CSV white-light spectrum (wavelength_m,transmission)")
    p.add_argument("--fsr", default=None, help="free spectral range, e.g. 5THz")
    p.add_argument("--output", default=None)

    p = sub.add_parser("vibration", help="transmission trace -> RMS displacement + spectrum")
    p.add_argument("input", nargs="?", default="-", help="CSV trace (time_s,signal_V) or stdin")
    p.add_argument("--linewidth-pm", type=float, default=None,
                   help="spatial linewidth kappa_x in picometers")
    p.add_argument("--kappa-x", default=None, help="spatial linewidth as quantity, e.g. 500pm")
    p.add_argument("--t0", type=float, default=1.0, help="peak transmission [V]")
    p.add_argument("--background", type=float, default=0.0, help="background level [V]")
    p.add_argument("--side", choices=("left", "right"), default="right")
    p.add_argument("--ks-threshold", type=float, default=0.05)
    p.add_argument("--spectrum-csv", default=None)
    p.add_argument("--output", default=None)

    p = sub.add_parser("voigt", help="vibration level from Voigt fits of swept scans")
    p.add_argument("inputs", nargs="+", help="CSV scans (frequency_hz,signal)")
    p.add_argument("--kappa", required=True, help="frozen Lorentzian linewidth, e.g. 1GHz")
    p.add_argument("--slope", required=True, help="dispersion slope, e.g. 20MHz/pm")
    p.add_argument("--output", default=None)

    p = sub.add_parser("cycle-rms", help="RMS vs phase of a periodic disturbance")
    p.add_argument("input", help="CSV displacement trace (time_s,displacement_m) or -")
    p.add_argument("--period", required=True, help="cycle period, e.g. 0.7s")
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--csv", default=None)
    p.add_argument("--output", default=None)

    p = sub.add_parser("odmr", help="fit photoluminescence dips and extract the field")
    p.add_argument("input", help="CSV spectrum (frequency_hz,signal)")
    p.add_argument("--dips", type=int, default=2, choices=(1, 2))
    p.add_argument("--min-zeeman", default="20MHz",
                   help="smallest splitting attributed to a magnetic field")
    p.add_argument("--output", default=None)

    p = sub.add_parser("simulate", help="render a synthetic scenario to CSV")
    p.add_argument("--scenario", required=True, help="built-in name or JSON path")
    p.add_argument("--duration", default=None, help="override duration, e.g. 10s")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--output", default=None, help="CSV path (default: stdout)")
    p.add_argument("--json", dest="json_path", default=None,
                   help="write the result document here")

    p = sub.add_parser("validate", help="check a scenario/envelope file without running")
    p.add_argument("input")
    p.add_argument("--schema", choices=("scenario", "envelope"), default=None)
    p.add_argument("--output", default=None)

    p = sub.add_parser("rerun", help="re-execute the config embedded in a result document")
    p.add_argument("input", help="result document JSON")
    p.add_argument("--output", default=None)
    p.add_argument("--json", dest="json_path", default=None)

    return ap


def _config_from_args(args: argparse.Namespace) -> dict:
    """Resolve CLI tokens into the SI effective config (defaults included)."""
    cmd = args.command
    if cmd == "modes":
        return {
            "diamond_thickness_m": parse_quantity(args.diamond, "length"),
            "air_gap_m": parse_quantity(args.air, "length"),
            "refractive_index": args.index,
            "radius_of_curvature_m": None if args.roc is None
            else parse_quantity(args.roc, "length"),
            "band_lo_hz": parse_band(args.band)[0],
            "band_hi_hz": parse_band(args.band)[1],
        }
    if cmd == "dispersion":
        return {
            "diamond_thickness_m": parse_quantity(args.diamond, "length"),
            "air_gap_m": parse_quantity(args.air, "length"),
            "refractive_index": args.index,
            "radius_of_curvature_m": None if args.roc is None
            else parse_quantity(args.roc, "length"),
            "frequency_hz": parse_quantity(args.frequency, "frequency"),
        }
    if cmd == "purcell":
        return {
            "preset": args.preset,
            "wavelength_m": None if args.wavelength is None
            else parse_quantity(args.wavelength, "length"),
            "refractive_index": args.index,
            "mode_volume_lambda3": args.mode_volume_lambda3,
            "dispersion_slope_hz_per_m": None if args.slope is None
            else parse_quantity(args.slope, "frequency/length"),
            "sigma_m": parse_quantity(args.sigma, "length"),
            "quality_factor": args.quality_factor,
        }
    if cmd == "design-curve":
        lo, hi = parse_band(args.sigma_range, "length") if args.sigma is None else (None, None)
        return {
            "preset": args.preset,
            "wavelength_m": None if args.wavelength is None
            else parse_quantity(args.wavelength, "length"),
            "refractive_index": args.index,
            "mode_volume_lambda3": args.mode_volume_lambda3,
            "dispersion_slope_hz_per_m": None if args.slope is None
            else parse_quantity(args.slope, "frequency/length"),
            "sigma_m": None if args.sigma is None else parse_quantity(args.sigma, "length"),
            "sigma_lo_m": lo,
            "sigma_hi_m": hi,
            "points": args.points,
            "csv": args.csv,
        }
    if cmd == "linewidth":
        return {
            "input": args.input,
            "detuning_hz": parse_quantity(args.detuning, "frequency"),
            "dispersion_slope_hz_per_m": None if args.slope is None
            else parse_quantity(args.slope, "frequency/length"),
        }
    if cmd == "length":
        if (args.fsr is None) == (args.input is None):
            raise ConfigError("give either --fsr or a white-light spectrum CSV")
        return {
            "fsr_hz": None if args.fsr is None else parse_quantity(args.fsr, "frequency"),
            "input": args.input,
        }
    if cmd == "vibration":
        if (args.linewidth_pm is None) == (args.kappa_x is None):
            raise ConfigError("give exactly one of --linewidth-pm or --kappa-x")
        kx = (args.linewidth_pm * 1e-12 if args.linewidth_pm is not None
              else parse_quantity(args.kappa_x, "length"))
        return {
            "input": args.input,
            "kappa_x_m": kx,
            "t0_v": args.t0,
            "background_v": args.background,
            "side": args.side,
            "ks_threshold": args.ks_threshold,
            "spectrum_csv": args.spectrum_csv,
        }
    if cmd == "voigt":
        return {
            "inputs": list(args.inputs),
            "kappa_hz": parse_quantity(args.kappa, "frequency"),
            "dispersion_slope_hz_per_m": parse_quantity(args.slope, "frequency/length"),
        }
    if cmd == "cycle-rms":
        return {
            "input": args.input,
            "period_s": parse_quantity(args.period, "time"),
            "bins": args.bins,
            "csv": args.csv,
        }
    if cmd == "odmr":
        return {
            "input": args.input,
            "dips": args.dips,
            "min_zeeman_hz": parse_quantity(args.min_zeeman, "frequency"),
        }
    if cmd == "simulate":
        return {
            "scenario": args.scenario,
            "duration_s": None if args.duration is None
            else parse_quantity(args.duration, "time"),
            "seed": args.seed,
            "output": args.output,
        }
    if cmd == "validate":
        return {"input": args.input, "schema": args.schema}
    raise ConfigError(f"unknown command {cmd!r}")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "rerun":
            with open(args.input) as fh:
                doc = json.load(fh)
            command = doc.get("command")
            config = dict(doc.get("config") or {})
            if command not in _COMMANDS:
                raise ConfigError(f"result document has no runnable command: {command!r}")
            if command == "simulate" and args.output is not None:
                config["output"] = args.output
            result = _COMMANDS[command](config)
            out_doc = _result_doc(command, config, result)
            if command == "simulate" and not config.get("output"):
                # CSV owns stdout; document only when a path was given
                if args.json_path:
                    _emit_doc(out_doc, args.json_path)
            else:
                _emit_doc(out_doc, args.json_path)
            return 0

        config = _config_from_args(args)
        result = _COMMANDS[args.command](config)
        doc = _result_doc(args.command, config, result)
        if args.command == "simulate":
            # CSV may own stdout; the document goes to --json (or stdout when
            # the CSV was redirected to a file)
            if config.get("output"):
                _emit_doc(doc, args.json_path)
            elif args.json_path:
                _emit_doc(doc, args.json_path)
            # else: CSV on stdout, document dropped unless --json was given
        else:
            _emit_doc(doc, getattr(args, "output", None))
        if args.command == "validate" and not result["valid"]:
            return ConfigError.exit_code
        return 0
    except FpCavityError as exc:
        _emit_doc(
            {"error": {"class": exc.error_class, "message": str(exc),
                       "exit_code": exc.exit_code}},
            None, stream=sys.stderr,
        )
        return exc.exit_code
    except FileNotFoundError as exc:
        _emit_doc(
            {"error": {"class": "IoError", "message": str(exc), "exit_code": _EXIT_IO}},
            None, stream=sys.stderr,
        )
        return _EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
