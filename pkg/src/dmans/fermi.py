"""Closed-form zero-temperature Fermi-gas integrals (spin-1/2, degeneracy 2).

All functions take the Fermi momentum and mass in the same energy unit and
return number/scalar densities in unit^3 and energy density / pressure in
unit^4.  Small-k/m arguments switch to series expansions to avoid the
catastrophic cancellation of the closed forms.
"""

import numpy as np

_PI2 = np.pi**2
_SERIES_X = 0.05


def number_density(kf):
    """n = kf^3 / 3 pi^2."""
    return kf**3 / (3.0 * _PI2)


def fermi_momentum(n):
    """Inverse of number_density; n may be a scalar or array."""
    return np.cbrt(3.0 * _PI2 * np.asarray(n, dtype=float))


def energy_density(kf, m):
    """Kinetic energy density of a cold Fermi gas with mass m."""
    if kf <= 0.0:
        return 0.0
    if m <= 0.0:
        return kf**4 / (4.0 * _PI2)
    x = kf / m
    if x < _SERIES_X:
        return (m**4 / _PI2) * (x**3 / 3.0 + x**5 / 10.0 - x**7 / 56.0
                                + x**9 / 144.0)
    ef = np.hypot(kf, m)
    return (kf * ef * (2.0 * kf**2 + m**2) - m**4 * np.arcsinh(x)) / (8.0 * _PI2)


def pressure(kf, m):
    """Kinetic pressure of a cold Fermi gas with mass m."""
    if kf <= 0.0:
        return 0.0
    if m <= 0.0:
        return kf**4 / (12.0 * _PI2)
    x = kf / m
    if x < _SERIES_X:
        return (m**4 / (3.0 * _PI2)) * (x**5 / 5.0 - x**7 / 14.0 + x**9 / 24.0
                                        - 5.0 * x**11 / 176.0)
    ef = np.hypot(kf, m)
    return (kf * (2.0 * kf**2 - 3.0 * m**2) * ef
            + 3.0 * m**4 * np.arcsinh(x)) / (24.0 * _PI2)


def scalar_density(kf, m):
    """Scalar density m <psi-bar psi>-like integral (sigma-field source)."""
    if kf <= 0.0 or m <= 0.0:
        return 0.0
    x = kf / m
    if x < _SERIES_X:
        return (m**3 / _PI2) * (x**3 / 3.0 - x**5 / 10.0 + 3.0 * x**7 / 56.0
                                - 5.0 * x**9 / 144.0)
    ef = np.hypot(kf, m)
    return (m / (2.0 * _PI2)) * (kf * ef - m**2 * np.arcsinh(x))
