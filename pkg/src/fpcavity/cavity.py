"""One-dimensional two-layer (diamond + air) Fabry-Perot mode model.

The cavity is bounded by perfect mirrors and filled with an air gap of
length ``t_a`` and a diamond membrane of thickness ``t_d`` and index ``n``.
Requiring the field to vanish on both mirrors and to be continuous (value
and derivative) at the air-diamond interface gives the mode condition

    n*sin(k*t_a)*cos(n*k*t_d) + cos(k*t_a)*sin(n*k*t_d) = 0,  k = 2*pi*nu/c

which is the pole-free form of tan(k*t_a) = -(1/n)*tan(n*k*t_d). Roots are
located by a dense sign-change scan followed by bisection.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.optimize import brentq

from .errors import DomainError, NumericalError

#: default refractive index of the diamond membrane (dispersionless)
DEFAULT_DIAMOND_INDEX = 2.41

#: grid points per bare-cavity free spectral range in the root pre-scan
_POINTS_PER_FSR = 64

#: residual |mode condition| below which a frequency counts as a resonance
_RESIDUAL_TOL = 1e-6


class ModeCharacter(str, enum.Enum):
    AIR_LIKE = "air-like"
    DIAMOND_LIKE = "diamond-like"


@dataclass(frozen=True)
class CavityGeometry:
    """Two-layer cavity geometry, all lengths in meters.

    ``radius_of_curvature`` is only needed for the mode volume; when given
    it must satisfy the stable-resonator condition R > t_a + t_d/n.
    """

    diamond_thickness: float
    air_gap: float
    refractive_index: float = DEFAULT_DIAMOND_INDEX
    radius_of_curvature: float | None = None

    def __post_init__(self):
        if self.diamond_thickness < 0 or self.air_gap < 0:
            raise DomainError("layer thicknesses must be non-negative")
        if self.diamond_thickness + self.air_gap <= 0:
            raise DomainError("cavity must have non-zero total length")
        if self.refractive_index < 1:
            raise DomainError("refractive index must be >= 1")
        if self.radius_of_curvature is not None:
            if self.radius_of_curvature <= self.geometric_length:
                raise DomainError(
                    "unstable resonator: radius of curvature must exceed "
                    f"geometric length {self.geometric_length:.3e} m"
                )

    @property
    def geometric_length(self) -> float:
        """t_a + t_d/n, the length governing the Gaussian waist."""
        return self.air_gap + self.diamond_thickness / self.refractive_index

    @property
    def optical_length(self) -> float:
        """t_a + n*t_d, the length governing the mode spacing."""
        return self.air_gap + self.refractive_index * self.diamond_thickness

    @property
    def bare_fsr(self) -> float:
        """Free spectral range of a bare cavity of the same optical length."""
        return C_LIGHT / (2.0 * self.optical_length)


@dataclass(frozen=True)
class CavityMode:
    """A single longitudinal resonance.

    ``mode_order`` is the 1-based index of the root counted up from zero
    frequency, so for a bare cavity it equals the usual longitudinal mode
    number m with nu = m*c/(2L).
    """

    frequency: float
    mode_order: int
    character: ModeCharacter

    def __post_init__(self):
        if self.frequency <= 0:
            raise DomainError("mode frequency must be positive")

    @property
    def wavelength(self) -> float:
        return C_LIGHT / self.frequency


@dataclass(frozen=True)
class DispersionSlope:
    """Resonance-frequency change per unit air-gap change, in Hz/m.

    The sign is negative: lengthening the cavity lowers the frequency.
    """

    s: float

    @property
    def magnitude_mhz_per_pm(self) -> float:
        return abs(self.s) / 1e18


@dataclass(frozen=True)
class ModeVolume:
    volume: float  # m^3
    per_lambda_cubed: float


def _mode_condition(nu, geometry: CavityGeometry):
    """Pole-free resonance function; zero exactly at the cavity modes."""
    n = geometry.refractive_index
    k = 2.0 * np.pi * np.asarray(nu, dtype=float) / C_LIGHT
    a = k * geometry.air_gap
    b = n * k * geometry.diamond_thickness
    return n * np.sin(a) * np.cos(b) + np.cos(a) * np.sin(b)


def _implicit_partials(geometry: CavityGeometry, nu: float):
    """(d nu/d t_a, d nu/d t_d) at a resonance, via the implicit function theorem.

    The partial derivatives of the mode condition are analytic, so this is
    exact up to rounding and independent of any re-solving.
    """
    n = geometry.refractive_index
    k = 2.0 * np.pi * nu / C_LIGHT
    a = k * geometry.air_gap
    b = n * k * geometry.diamond_thickness
    ga = n * np.cos(a) * np.cos(b) - np.sin(a) * np.sin(b)  # dG/da
    gb = np.cos(a) * np.cos(b) - n * np.sin(a) * np.sin(b)  # dG/db
    dG_dta = k * ga
    dG_dtd = n * k * gb
    dG_dnu = (2.0 * np.pi / C_LIGHT) * (geometry.air_gap * ga + n * geometry.diamond_thickness * gb)
    if dG_dnu == 0.0:
        raise NumericalError(f"degenerate mode condition derivative at {nu:.6e} Hz")
    return -dG_dta / dG_dnu, -dG_dtd / dG_dnu


def _scan_roots(geometry: CavityGeometry, lo: float, hi: float, xtol: float = 1e-3):
    """All roots of the mode condition in (lo, hi], by grid scan + bisection."""
    if hi <= lo:
        return []
    step = geometry.bare_fsr / _POINTS_PER_FSR
    ngrid = max(int(np.ceil((hi - lo) / step)) + 1, 3)
    grid = np.linspace(lo, hi, ngrid)
    vals = _mode_condition(grid, geometry)
    roots = []
    sign = np.sign(vals)
    crossings = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    for i in crossings:
        try:
            r = brentq(
                _mode_condition, grid[i], grid[i + 1], args=(geometry,),
                xtol=xtol, rtol=8.9e-16, maxiter=200,
            )
        except (RuntimeError, ValueError) as exc:
            raise NumericalError(
                f"root bracket [{grid[i]:.6e}, {grid[i + 1]:.6e}] Hz failed to converge"
            ) from exc
        roots.append(r)
    # exact grid hits (sign == 0) are modes too
    for i in np.flatnonzero(sign == 0):
        if lo < grid[i] <= hi:
            roots.append(float(grid[i]))
    roots.sort()
    deduped = []
    for r in roots:
        if not deduped or r - deduped[-1] > 10 * xtol:
            deduped.append(r)
    return deduped


def _count_roots_below(geometry: CavityGeometry, nu: float) -> int:
    """Number of resonances in (0, nu), counted on the standard scan grid."""
    if nu <= 0:
        return 0
    step = geometry.bare_fsr / _POINTS_PER_FSR
    ngrid = max(int(np.ceil(nu / step)) + 1, 3)
    grid = np.linspace(0.0, nu, ngrid)[1:]  # the trivial root at nu=0 is not a mode
    vals = _mode_condition(grid, geometry)
    sign = np.sign(vals)
    return int(np.count_nonzero(sign[:-1] * sign[1:] < 0) + np.count_nonzero(sign[:-1] == 0))


def resonance_frequencies(geometry: CavityGeometry, band: tuple[float, float]) -> list[CavityMode]:
    """All cavity modes with frequency inside ``band = (lo, hi)``, ascending.

    Each mode carries its global longitudinal order and its air-like /
    diamond-like character. An empty band yields an empty list.
    """
    lo, hi = float(band[0]), float(band[1])
    if lo <= 0 or hi <= lo:
        raise DomainError(f"band must be positive and non-empty, got ({lo:g}, {hi:g})")
    roots = _scan_roots(geometry, lo, hi)
    order0 = _count_roots_below(geometry, lo)
    modes = []
    for i, nu in enumerate(roots):
        modes.append(
            CavityMode(
                frequency=nu,
                mode_order=order0 + i + 1,
                character=_classify(geometry, nu),
            )
        )
    return modes


def _classify(geometry: CavityGeometry, nu: float) -> ModeCharacter:
    # Bare layers are classified by construction: with only one medium the
    # derivative rule degenerates (both partials coincide at t_a = 0).
    if geometry.diamond_thickness == 0.0:
        return ModeCharacter.AIR_LIKE
    if geometry.air_gap == 0.0:
        return ModeCharacter.DIAMOND_LIKE
    d_ta, d_td = _implicit_partials(geometry, nu)
    if abs(d_ta) >= abs(d_td) / geometry.refractive_index:
        return ModeCharacter.AIR_LIKE
    return ModeCharacter.DIAMOND_LIKE


def mode_character(geometry: CavityGeometry, mode: CavityMode | float) -> ModeCharacter:
    """Air-like iff |d nu/d t_a| >= |d nu/d t_d|/n at the mode (ties: air-like)."""
    nu = mode.frequency if isinstance(mode, CavityMode) else float(mode)
    _require_resonance(geometry, nu)
    return _classify(geometry, nu)


def _require_resonance(geometry: CavityGeometry, nu: float):
    if nu <= 0:
        raise DomainError("mode frequency must be positive")
    if abs(_mode_condition(nu, geometry)) > _RESIDUAL_TOL:
        raise DomainError(f"{nu:.9e} Hz is not a resonance of this geometry")


def _nearest_root(geometry: CavityGeometry, nu0: float) -> float:
    """The resonance of ``geometry`` closest to ``nu0`` (branch tracking)."""
    half = geometry.bare_fsr * 0.75
    roots = _scan_roots(geometry, max(nu0 - half, geometry.bare_fsr * 1e-3), nu0 + half)
    if not roots:
        raise NumericalError(f"lost mode branch near {nu0:.6e} Hz")
    return min(roots, key=lambda r: abs(r - nu0))


def dispersion_slope(geometry: CavityGeometry, mode: CavityMode | float) -> DispersionSlope:
    """d nu/d t_a at fixed diamond thickness, by re-solving at t_a +- delta.

    Central difference with adaptive delta = max(1 pm, t_a * 1e-6); the
    perturbed root is tracked as the one nearest the unperturbed frequency.
    """
    nu = mode.frequency if isinstance(mode, CavityMode) else float(mode)
    _require_resonance(geometry, nu)
    if geometry.air_gap == 0.0:
        raise DomainError("dispersion slope is defined for cavities with an air gap")
    delta = max(1e-12, geometry.air_gap * 1e-6)
    geo_plus = CavityGeometry(
        geometry.diamond_thickness, geometry.air_gap + delta,
        geometry.refractive_index, geometry.radius_of_curvature,
    )
    geo_minus = CavityGeometry(
        geometry.diamond_thickness, geometry.air_gap - delta,
        geometry.refractive_index, geometry.radius_of_curvature,
    )
    nu_plus = _nearest_root(geo_plus, nu)
    nu_minus = _nearest_root(geo_minus, nu)
    if abs(nu_plus - nu) > geometry.bare_fsr / 2 or abs(nu_minus - nu) > geometry.bare_fsr / 2:
        raise NumericalError(f"mode branch tracking failed near {nu:.6e} Hz")
    return DispersionSlope(s=(nu_plus - nu_minus) / (2.0 * delta))


def mode_volume(geometry: CavityGeometry, mode: CavityMode | float) -> ModeVolume:
    """Gaussian plano-concave mode volume V = (pi/4) * w0^2 * L_opt.

    The waist uses the geometric length t_a + t_d/n, the longitudinal
    integral the optical length t_a + n*t_d:

        w0^2 = (lambda/pi) * sqrt(L_geo * (R - L_geo))
    """
    nu = mode.frequency if isinstance(mode, CavityMode) else float(mode)
    if nu <= 0:
        raise DomainError("mode frequency must be positive")
    R = geometry.radius_of_curvature
    if R is None:
        raise DomainError("mode volume requires a mirror radius of curvature")
    lam = C_LIGHT / nu
    l_geo = geometry.geometric_length
    w0_sq = (lam / np.pi) * np.sqrt(l_geo * (R - l_geo))
    volume = (np.pi / 4.0) * w0_sq * geometry.optical_length
    return ModeVolume(volume=volume, per_lambda_cubed=volume / lam**3)


def length_from_fsr(fsr: float) -> float:
    """Optical cavity length L = c/(2*FSR).

    For hybrid cavities this is t_a + n*t_d to first order; the air and
    diamond contributions are not separable from the FSR alone.
    """
    if fsr <= 0:
        raise DomainError("free spectral range must be positive")
    return C_LIGHT / (2.0 * fsr)
