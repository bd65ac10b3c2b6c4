"""Link geometry: scenario container and closed-form geometric quantities."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

#: Default carrier wavelength in meters (3 GHz).
DEFAULT_WAVELENGTH = 0.1


@dataclass(frozen=True)
class Scenario:
    """Geometry of one transmit/receive disk pair.

    Two parallel coaxial disks: the transmitter of radius ``radius_tx`` and
    the receiver of radius ``radius_rx``, separated by ``distance`` along
    the propagation axis.  All lengths in meters.  The normalized values
    T = R_T/lambda, R = R_R/lambda, D = z/lambda are what configs and all
    experiment parameters use, since the physics depends on lengths only
    through these ratios.
    """

    wavelength: float = DEFAULT_WAVELENGTH
    radius_tx: float = 10 * DEFAULT_WAVELENGTH
    radius_rx: float = 10 * DEFAULT_WAVELENGTH
    distance: float = 50 * DEFAULT_WAVELENGTH

    def __post_init__(self) -> None:
        for name in ("wavelength", "radius_tx", "radius_rx", "distance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.distance < max(self.radius_tx, self.radius_rx):
            warnings.warn(
                "link distance is smaller than the largest disk radius; "
                "the paraxial mode-count formula and the quadratic phase "
                "approximation are unreliable in this regime",
                stacklevel=2,
            )

    @classmethod
    def normalized(
        cls, T: float, R: float, D: float, wavelength: float = DEFAULT_WAVELENGTH
    ) -> "Scenario":
        """Build a scenario from wavelength-normalized radii and distance."""
        return cls(
            wavelength=wavelength,
            radius_tx=T * wavelength,
            radius_rx=R * wavelength,
            distance=D * wavelength,
        )

    @property
    def kappa(self) -> float:
        """Wavenumber 2*pi/lambda in rad/m."""
        return 2 * np.pi / self.wavelength

    @property
    def T(self) -> float:
        return self.radius_tx / self.wavelength

    @property
    def R(self) -> float:
        return self.radius_rx / self.wavelength

    @property
    def D(self) -> float:
        return self.distance / self.wavelength


def point_distance(rho_t, phi_t, rho_r, phi_r, z):
    """Exact distance between a transmit and a receive surface point.

    Points are given in polar coordinates on their respective disks, the
    disks being parallel and z apart:

        r = sqrt(rho_t^2 + rho_r^2 - 2 rho_t rho_r cos(phi_r - phi_t) + z^2)

    Accepts scalars or broadcastable arrays.
    """
    rho_t = np.asarray(rho_t)
    rho_r = np.asarray(rho_r)
    if np.any(rho_t < 0) or np.any(rho_r < 0):
        raise ValueError("radial coordinates must be non-negative")
    if not np.all(np.asarray(z) > 0):
        raise ValueError("separation z must be positive")
    sq = rho_t**2 + rho_r**2 - 2 * rho_t * rho_r * np.cos(np.asarray(phi_r) - np.asarray(phi_t)) + np.asarray(z) ** 2
    return np.sqrt(sq)


def fresnel_distance_approx(rho_t, phi_t, rho_r, phi_r, z):
    """Quadratic (Fresnel-zone) approximation of :func:`point_distance`.

        r ~= z + rho_t^2/(2z) + rho_r^2/(2z) - rho_t rho_r cos(phi_r-phi_t)/z

    Error relative to the exact distance is O(rho^4 / z^3).
    """
    rho_t = np.asarray(rho_t)
    rho_r = np.asarray(rho_r)
    z = np.asarray(z)
    return (
        z
        + rho_t**2 / (2 * z)
        + rho_r**2 / (2 * z)
        - rho_t * rho_r * np.cos(np.asarray(phi_r) - np.asarray(phi_t)) / z
    )


def analytic_dof(scenario: Scenario) -> float:
    """Closed-form degrees-of-freedom estimate pi^2 T^2 R^2 / D^2.

    Returns the raw real value; callers that need an integer mode count
    round down.
    """
    return np.pi**2 * scenario.T**2 * scenario.R**2 / scenario.D**2


def fraunhofer_distance(scenario: Scenario) -> float:
    """Conventional near/far-field boundary 8 R_T^2 / lambda, in meters.

    Normalized form: D_ff = fraunhofer_distance(s)/s.wavelength = 8 T^2.
    """
    return 8 * scenario.radius_tx**2 / scenario.wavelength
