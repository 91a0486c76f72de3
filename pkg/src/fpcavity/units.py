"""Quantity tokens of the form value+suffix (``25pm``, ``20MHz/pm``, ``10GHz/s``).

Everything internal is SI; this module is the only place unit suffixes are
interpreted. Compound units are a single slash between two known suffixes,
so a dispersion slope parses as frequency/length and a scan speed as
frequency/time.
"""

from __future__ import annotations

import re

from .errors import UnitError

# suffix -> (dimension, factor to SI)
_UNITS = {
    # length
    "m": ("length", 1.0),
    "cm": ("length", 1e-2),
    "mm": ("length", 1e-3),
    "um": ("length", 1e-6),
    "µm": ("length", 1e-6),
    "nm": ("length", 1e-9),
    "pm": ("length", 1e-12),
    "fm": ("length", 1e-15),
    # frequency
    "Hz": ("frequency", 1.0),
    "kHz": ("frequency", 1e3),
    "MHz": ("frequency", 1e6),
    "GHz": ("frequency", 1e9),
    "THz": ("frequency", 1e12),
    # time
    "s": ("time", 1.0),
    "ms": ("time", 1e-3),
    "us": ("time", 1e-6),
    "µs": ("time", 1e-6),
    "ns": ("time", 1e-9),
    # voltage
    "V": ("voltage", 1.0),
    "mV": ("voltage", 1e-3),
    "uV": ("voltage", 1e-6),
    # magnetic field
    "T": ("field", 1.0),
    "mT": ("field", 1e-3),
    "uT": ("field", 1e-6),
    "G": ("field", 1e-4),
    # bare number
    "": ("dimensionless", 1.0),
}

_TOKEN_RE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([^\s]*)\s*$")


def _lookup(suffix: str) -> tuple[str, float]:
    if suffix in _UNITS:
        return _UNITS[suffix]
    if "/" in suffix:
        num, _, den = suffix.partition("/")
        if num in _UNITS and den in _UNITS and num and den:
            dim_n, f_n = _UNITS[num]
            dim_d, f_d = _UNITS[den]
            return f"{dim_n}/{dim_d}", f_n / f_d
    raise UnitError(f"unknown unit {suffix!r}")


def parse_quantity(token, dimension: str | None = None) -> float:
    """Parse ``token`` into an SI float, checking its dimension if given.

    Bare numbers are accepted for any dimension (assumed SI already).
    """
    if isinstance(token, (int, float)) and not isinstance(token, bool):
        return float(token)
    if not isinstance(token, str):
        raise UnitError(f"cannot parse quantity from {type(token).__name__}")
    m = _TOKEN_RE.match(token)
    if not m:
        raise UnitError(f"malformed quantity token {token!r}")
    value, suffix = float(m.group(1)), m.group(2)
    dim, factor = _lookup(suffix)
    if dimension is not None and dim != "dimensionless" and dim != dimension:
        raise UnitError(
            f"unit {suffix!r} has dimension {dim}, expected {dimension} (in {token!r})"
        )
    return value * factor


def parse_band(token: str, dimension: str = "frequency") -> tuple[float, float]:
    """Parse an interval token like ``400THz:700THz`` into (lo, hi) in SI."""
    if not isinstance(token, str) or ":" not in token:
        raise UnitError(f"expected an interval like '400THz:700THz', got {token!r}")
    lo_tok, _, hi_tok = token.partition(":")
    lo = parse_quantity(lo_tok, dimension)
    hi = parse_quantity(hi_tok, dimension)
    if not lo < hi:
        raise UnitError(f"interval {token!r} is empty or reversed")
    return lo, hi


# conversion factors for reporting (SI value / factor = value in unit)
MHZ_PER_PM = 1e6 / 1e-12  # dispersion slope, Hz/m per MHz/pm
GHZ_PER_S = 1e9  # scan speed, Hz/s per GHz/s
