"""Shared independent oracles for round-trip and cross-validation tests.

These deliberately re-derive results through brute-force paths (dense
scans, bisection, quadrature) so they stay independent of the library's
production algorithms.
"""

import numpy as np
import pytest
from scipy.constants import c as C_LIGHT
from scipy.integrate import quad
from scipy.optimize import bisect


def oracle_mode_condition(nu, t_a, t_d, n):
    """Two-layer resonance determinant, written out locally."""
    k = 2.0 * np.pi * np.asarray(nu, dtype=float) / C_LIGHT
    return n * np.sin(k * t_a) * np.cos(n * k * t_d) + np.cos(k * t_a) * np.sin(n * k * t_d)


def oracle_roots(t_a, t_d, n, lo, hi, n_grid=100_000, xtol=1.0):
    """Brute-force dense sign-change scan plus bisection."""
    grid = np.linspace(lo, hi, n_grid)
    vals = oracle_mode_condition(grid, t_a, t_d, n)
    sign = np.sign(vals)
    roots = []
    for i in np.flatnonzero(sign[:-1] * sign[1:] < 0):
        roots.append(
            bisect(
                oracle_mode_condition, grid[i], grid[i + 1],
                args=(t_a, t_d, n), xtol=xtol,
            )
        )
    return np.array(roots)


def oracle_nearest_root(t_a, t_d, n, nu0, window):
    roots = oracle_roots(t_a, t_d, n, nu0 - window, nu0 + window, n_grid=20_000, xtol=1e-3)
    assert roots.size, "oracle lost the mode branch"
    return roots[np.argmin(np.abs(roots - nu0))]


def oracle_dnu_dta(t_a, t_d, n, nu, delta=1e-12):
    """Finite-difference dispersion derivative via brute-force re-solving."""
    window = C_LIGHT / (2.0 * (t_a + n * t_d)) * 0.6
    hi = oracle_nearest_root(t_a + delta, t_d, n, nu, window)
    lo = oracle_nearest_root(t_a - delta, t_d, n, nu, window)
    return (hi - lo) / (2.0 * delta)


def oracle_dnu_dtd(t_a, t_d, n, nu, delta=1e-12):
    window = C_LIGHT / (2.0 * (t_a + n * t_d)) * 0.6
    hi = oracle_nearest_root(t_a, t_d + delta, n, nu, window)
    lo = oracle_nearest_root(t_a, t_d - delta, n, nu, window)
    return (hi - lo) / (2.0 * delta)


def oracle_effective_purcell(frequency, refractive_index, mode_volume, quality_factor,
                             sigma_nu):
    """Adaptive quadrature of the overlap-weighted Gaussian detuning average."""
    fp = (
        3.0 / (4.0 * np.pi**2)
        * (C_LIGHT / (refractive_index * frequency)) ** 3
        * quality_factor / mode_volume
    )
    if sigma_nu == 0.0:
        return fp
    A = 4.0 * quality_factor**2 / frequency**2

    def integrand(d):
        return (
            1.0 / (1.0 + A * d * d)
            * np.exp(-(d * d) / (2.0 * sigma_nu**2))
            / np.sqrt(2.0 * np.pi * sigma_nu**2)
        )

    half_line = frequency / (2.0 * quality_factor)
    interior = min(half_line, 9.9 * sigma_nu)
    val, _ = quad(
        integrand, -10.0 * sigma_nu, 10.0 * sigma_nu,
        points=[-interior, 0.0, interior], limit=400, epsabs=0.0, epsrel=1e-12,
    )
    return fp * val


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
