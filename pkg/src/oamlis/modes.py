"""Optimum communication modes of the two-disk link.

The continuous coupling operator between the transmit and receive apertures
is discretized on regular lattices over both disks; the singular values of
the weighted Green matrix approximate the coupling strengths of the optimum
communication modes, and counting the values above a threshold relative to
the strongest one gives the number of usable spatial channels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Scenario
from .numerics import svd_spectrum

#: Area-weight consistency bound for SurfaceGrid (fraction of pi R^2).
_AREA_TOLERANCE = 0.005
#: Pair-distance guard: the scalar Green function used here neglects the
#: reactive near-field terms, which is fine a few wavelengths out but not
#: at essentially zero separation.
_MIN_SEPARATION_WAVELENGTHS = 0.01


@dataclass(frozen=True)
class SurfaceGrid:
    """Discretization of one disk aperture.

    ``points`` holds the transverse (x, y) sample coordinates in meters,
    ``weights`` the per-sample area weights.  Weights are uniform and are
    normalized so that they sum exactly to the disk area pi R^2; this keeps
    the discrete operator's scale right regardless of how many lattice cells
    straddle the rim.
    """

    points: np.ndarray
    weights: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
            raise ValueError("points must be a non-empty (N, 2) array")
        if w.shape != (len(pts),):
            raise ValueError("weights must be one scalar per sample point")
        radii = np.hypot(pts[:, 0], pts[:, 1])
        if np.any(radii > self.radius * (1 + 1e-12)):
            raise ValueError("grid contains points outside the disk")
        area = np.pi * self.radius**2
        if abs(w.sum() - area) > _AREA_TOLERANCE * area:
            raise ValueError("area weights do not sum to the disk area")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.points)


def disk_grid(radius: float, spacing: float) -> SurfaceGrid:
    """Square lattice clipped to a disk.

    Lattice sites sit at half-integer multiples of ``spacing`` (no site at
    the center, fourfold symmetry); a site belongs to the grid when its
    center lies inside the disk.  Use spacing = lambda/2 for the spatially
    Nyquist-sampled default.

    Args:
        radius: disk radius in meters.
        spacing: lattice pitch in meters.

    Returns:
        SurfaceGrid with uniform weights summing to pi * radius^2.
    """
    if radius <= 0 or spacing <= 0:
        raise ValueError("radius and spacing must be positive")
    n = int(np.floor(radius / spacing)) + 1
    coords = (np.arange(-n, n + 1) + 0.5) * spacing
    xx, yy = np.meshgrid(coords, coords)
    inside = xx**2 + yy**2 <= radius**2
    pts = np.column_stack([xx[inside], yy[inside]])
    if len(pts) == 0:
        raise ValueError("spacing too coarse: no lattice site falls inside the disk")
    weights = np.full(len(pts), np.pi * radius**2 / len(pts))
    return SurfaceGrid(points=pts, weights=weights, radius=radius)


def green(point_t, point_r, kappa: float) -> complex:
    """Scalar free-space Green function between two 3-D points.

        G(r1, r2) = exp(-j kappa |r1 - r2|) / (4 pi |r1 - r2|)

    Args:
        point_t, point_r: 3-component coordinate sequences in meters.
        kappa: wavenumber in rad/m.

    Returns:
        Complex field coupling value.
    """
    delta = np.asarray(point_r, dtype=float) - np.asarray(point_t, dtype=float)
    r = float(np.sqrt(np.dot(delta, delta)))
    if r == 0.0:
        raise ValueError("Green function is singular at zero separation")
    return complex(np.exp(-1j * kappa * r) / (4 * np.pi * r))


def coupling_matrix(
    grid_t: SurfaceGrid,
    grid_r: SurfaceGrid,
    kappa: float,
    separation: float,
) -> np.ndarray:
    """Weighted Green coupling matrix between two discretized disks.

    Entry (i, j) couples transmit sample j to receive sample i:
    G(r_i, s_j) * sqrt(w_i w_j).  The symmetric square-root weighting makes
    the singular values of the matrix approximate those of the continuous
    operator.

    Args:
        grid_t: transmit-disk grid.
        grid_r: receive-disk grid.
        kappa: wavenumber in rad/m.
        separation: axial distance between the disk planes in meters.

    Returns:
        Complex matrix of shape (len(grid_r), len(grid_t)).
    """
    if separation <= 0:
        raise ValueError("separation must be positive")
    wavelength = 2 * np.pi / kappa
    if separation < _MIN_SEPARATION_WAVELENGTHS * wavelength:
        raise ValueError(
            "grids closer than lambda/100: scalar Green kernel not applicable"
        )
    dx = grid_r.points[:, 0][:, None] - grid_t.points[:, 0][None, :]
    dy = grid_r.points[:, 1][:, None] - grid_t.points[:, 1][None, :]
    dist = np.sqrt(dx**2 + dy**2 + separation**2)
    g = np.exp(-1j * kappa * dist) / (4 * np.pi * dist)
    return g * np.sqrt(grid_r.weights[:, None] * grid_t.weights[None, :])


@dataclass(frozen=True)
class ModeSpectrum:
    """Ordered coupling intensities with labels and a dB scale tag.

    ``scale`` records whether entries are amplitude-like (singular values,
    dB via 20 log10) or energy-like (mode energies, dB via 10 log10), so a
    threshold in dB means the same physical thing for both.  ``reference``
    is the normalization value and always equals the first (largest) entry.
    """

    values: np.ndarray
    scale: str
    labels: tuple = field(default=())

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or len(v) == 0:
            raise ValueError("spectrum must be a non-empty 1-D array")
        if np.any(v < 0):
            raise ValueError("spectrum entries must be non-negative")
        if np.any(np.diff(v) > 0):
            raise ValueError("spectrum entries must be sorted descending")
        if self.scale not in ("amplitude", "energy"):
            raise ValueError(f"unknown spectrum scale {self.scale!r}")
        labels = tuple(self.labels) if self.labels else tuple(range(1, len(v) + 1))
        if len(labels) != len(v):
            raise ValueError("one label per spectrum entry required")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "labels", labels)

    @property
    def reference(self) -> float:
        return float(self.values[0])

    def db(self, reference: float | None = None) -> np.ndarray:
        """Energy-scale dB values relative to ``reference`` (default: own peak)."""
        ref = self.reference if reference is None else float(reference)
        factor = 20.0 if self.scale == "amplitude" else 10.0
        with np.errstate(divide="ignore"):
            return factor * np.log10(self.values / ref)


def count_modes(
    spectrum: ModeSpectrum,
    threshold_db: float,
    reference: float | None = None,
) -> int:
    """Number of spectrum entries within ``threshold_db`` of the reference.

    Args:
        spectrum: ordered coupling intensities.
        threshold_db: non-positive threshold; -5 dB counts entries whose
            energy is at least 10^-0.5 of the reference.
        reference: optional override in the spectrum's own linear scale.
            By default the spectrum's first entry is used; pass the peak
            intensity of a *different* strategy to count all strategies
            against one common best-connected mode.

    Returns:
        Integer count.
    """
    if threshold_db > 0:
        raise ValueError("threshold_db must be <= 0")
    return int(np.sum(spectrum.db(reference) >= threshold_db))


def svd_mode_spectrum(scenario: Scenario, spacing: float | None = None) -> ModeSpectrum:
    """Amplitude-scale singular spectrum of the discretized link.

    Args:
        scenario: link geometry.
        spacing: lattice pitch in meters; defaults to lambda/2.

    Returns:
        ModeSpectrum of singular values, labeled by mode index.
    """
    if spacing is None:
        spacing = scenario.wavelength / 2
    grid_t = disk_grid(scenario.radius_tx, spacing)
    grid_r = disk_grid(scenario.radius_rx, spacing)
    matrix = coupling_matrix(grid_t, grid_r, scenario.kappa, scenario.distance)
    return ModeSpectrum(values=svd_spectrum(matrix), scale="amplitude")
