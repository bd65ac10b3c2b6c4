"""Simulator for line-of-sight near-field links between two circular apertures.

The library models a link between a transmitting and a receiving large
intelligent surface (LIS), both circular disks facing each other on a common
axis.  It provides:

* the optimum communication modes of the link, obtained by discretizing both
  surfaces and taking the SVD of the scalar Green coupling matrix
  (:mod:`oamlis.modes`),
* synthesis and Fresnel-zone propagation of orbital-angular-momentum (OAM)
  beams with optional transmit focusing (:mod:`oamlis.oam`),
* matched-filter, integrate-and-dump and energy-detection receivers on the
  demultiplexed radial signal, with Monte Carlo BER evaluation
  (:mod:`oamlis.detect`),
* CSV experiment runners and a command line front end
  (:mod:`oamlis.experiments`, :mod:`oamlis.cli`).

All simulator quantities are expressed in SI units internally; configuration
uses radii and distances normalized by the wavelength because every quantity
of interest (mode counts, energy ratios, BER) depends only on those ratios.
"""

from .geometry import Scenario, analytic_dof, fraunhofer_distance
from .modes import SurfaceGrid, ModeSpectrum, disk_grid, coupling_matrix, count_modes
from .numerics import Quadrature, bessel_j, integrate_radial, svd_spectrum
from .oam import (
    RadialField,
    TxProfile,
    mode_energy,
    path_gain,
    rx_field_radial,
    topological_charge,
    tx_profile,
)
from .detect import (
    BerCurve,
    DetectorConfig,
    NoiseModel,
    ber_monte_carlo,
    demultiplex,
    smart_window,
    tnr_sweep,
)
from .experiments import ExperimentConfig, default_config, parse_config, serialize_config, run

__version__ = "0.1.0"

__all__ = [
    "Scenario",
    "analytic_dof",
    "fraunhofer_distance",
    "SurfaceGrid",
    "ModeSpectrum",
    "disk_grid",
    "coupling_matrix",
    "count_modes",
    "Quadrature",
    "bessel_j",
    "integrate_radial",
    "svd_spectrum",
    "RadialField",
    "TxProfile",
    "mode_energy",
    "path_gain",
    "rx_field_radial",
    "topological_charge",
    "tx_profile",
    "BerCurve",
    "DetectorConfig",
    "NoiseModel",
    "ber_monte_carlo",
    "demultiplex",
    "smart_window",
    "tnr_sweep",
    "ExperimentConfig",
    "default_config",
    "parse_config",
    "serialize_config",
    "run",
    "__version__",
]
