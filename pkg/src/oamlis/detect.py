"""Receiver chain: demultiplexing, decision statistics, noise, BER sweeps.

The receive processing acts on the radial signal left after angular
demultiplexing, y_n(rho) = 2 pi x_n psi_n^rho(rho) + n_n(rho).  Noise is
synthesized directly on a radial slot grid with the per-slot variance law
sigma_i^2 = 2 pi N0 / (rho_i delta), which reproduces the variances of all
linear statistics of the underlying white 2-D field while giving the energy
detector a finite slot count M.  Three decision strategies are provided:

* MF: correlate against the mode's own radial profile.
* ID: integrate over a radial window after compensating the deterministic
  propagation phase, optionally closing the loop with a single-tap phase
  equalizer.
* ED: accumulate energy over the window and compare with a threshold
  (OOK signaling); the threshold can be optimized in closed form through
  the central/noncentral chi-square statistics of the slot model.

Monte Carlo sweeps are chunked and seeded per chunk, so results are
reproducible for a given master seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc
from scipy.stats import chi2, ncx2

from .geometry import Scenario
from .oam import default_radial_grid, mode_energy, mode_index, rx_field_radial, topological_charge

#: Default radial slot width for noise synthesis, as a wavelength fraction.
SLOT_WAVELENGTH_FRACTION = 0.25
#: Trials per Monte Carlo chunk; fixed so runs are seed-reproducible.
CHUNK_TRIALS = 25000
#: OOK "one" amplitude; average symbol energy then matches unit-amplitude BPSK.
OOK_ONE_AMPLITUDE = math.sqrt(2.0)
#: Default multiplexed charge set for link-level SNR bookkeeping.
DEFAULT_MODE_SET = (0, 1, 2, 3, 4)

_STRATEGIES = ("mf", "id", "ed")


def slot_grid(radius: float, slot: float | None = None, wavelength: float = 0.1):
    """Radial slot midpoints tiling [0, radius].

    The requested slot width (default lambda/4) is rounded so an integer
    number of slots covers the radius exactly; midpoints start at delta/2.

    Returns:
        (radii, delta) with radii of shape (M,).
    """
    if slot is None:
        slot = SLOT_WAVELENGTH_FRACTION * wavelength
    if slot <= 0 or slot > radius:
        raise ValueError("slot width must be positive and at most the radius")
    count = math.ceil(radius / slot)
    delta = radius / count
    radii = (np.arange(count) + 0.5) * delta
    return radii, delta


@dataclass(frozen=True)
class NoiseModel:
    """Post-demultiplexing noise on a radial slot grid.

    Each slot carries circular complex noise with variance
    2 pi N0 / (rho_i delta); the slot-weighted energy sum then has mean
    2 pi N0 per slot regardless of the slot layout.
    """

    n0: float
    radii: np.ndarray
    delta: float

    def __post_init__(self) -> None:
        if self.n0 <= 0:
            raise ValueError("noise spectral density must be positive")
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or len(r) == 0 or r[0] <= 0 or np.any(np.diff(r) <= 0):
            raise ValueError("slot radii must be positive and strictly increasing")
        if self.delta <= 0:
            raise ValueError("slot width must be positive")
        object.__setattr__(self, "radii", r)

    @classmethod
    def for_scenario(cls, scenario: Scenario, n0: float, slot: float | None = None) -> "NoiseModel":
        radii, delta = slot_grid(scenario.radius_rx, slot, scenario.wavelength)
        return cls(n0=n0, radii=radii, delta=delta)

    @property
    def n_slots(self) -> int:
        return len(self.radii)

    def variances(self) -> np.ndarray:
        """Per-slot complex noise variance 2 pi N0 / (rho_i delta)."""
        return 2 * np.pi * self.n0 / (self.radii * self.delta)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Draw (count, M) circular complex noise samples."""
        scale = np.sqrt(self.variances() / 2)
        real = rng.standard_normal((count, self.n_slots))
        imag = rng.standard_normal((count, self.n_slots))
        return (real + 1j * imag) * scale[None, :]


@dataclass(frozen=True)
class DetectorConfig:
    """Receiver strategy and its knobs.

    The modulation is tied to the strategy: the energy detector is
    non-coherent and uses OOK, the coherent MF/ID statistics use BPSK.
    Leave ``modulation`` empty to derive it.
    """

    strategy: str
    smart: bool = False
    drop_db: float = 10.0
    equalize: bool = True
    threshold: float | None = None
    modulation: str = ""

    def __post_init__(self) -> None:
        strategy = self.strategy.lower()
        if strategy not in _STRATEGIES:
            raise ValueError(f"strategy must be one of {_STRATEGIES}")
        object.__setattr__(self, "strategy", strategy)
        if self.drop_db <= 0:
            raise ValueError("window drop level must be positive dB")
        expected = "ook" if strategy == "ed" else "bpsk"
        modulation = (self.modulation or expected).lower()
        if modulation != expected:
            raise ValueError(f"{strategy} requires {expected} modulation, got {modulation}")
        object.__setattr__(self, "modulation", modulation)
        if self.threshold is not None:
            if strategy != "ed":
                raise ValueError("a decision threshold applies to the energy detector only")
            if self.threshold < 0:
                raise ValueError("threshold must be non-negative")


@dataclass(frozen=True)
class BerCurve:
    """BER estimates over an SNR or TNR axis with binomial error bars."""

    axis_db: np.ndarray
    ber: np.ndarray
    trials: np.ndarray
    ci95: np.ndarray

    def __post_init__(self) -> None:
        axis = np.asarray(self.axis_db, dtype=float)
        ber = np.asarray(self.ber, dtype=float)
        trials = np.asarray(self.trials, dtype=int)
        ci95 = np.asarray(self.ci95, dtype=float)
        if not (axis.shape == ber.shape == trials.shape == ci95.shape) or axis.ndim != 1:
            raise ValueError("curve fields must be matching 1-D arrays")
        if np.any(ber < 0) or np.any(ber > 1):
            raise ValueError("BER estimates must lie in [0, 1]")
        if np.any(trials < 1):
            raise ValueError("trial counts must be positive")
        expected = 1.96 * np.sqrt(ber * (1 - ber) / trials)
        if not np.allclose(ci95, expected, atol=1e-12):
            raise ValueError("confidence half-widths inconsistent with trial counts")
        object.__setattr__(self, "axis_db", axis)
        object.__setattr__(self, "ber", ber)
        object.__setattr__(self, "trials", trials)
        object.__setattr__(self, "ci95", ci95)

    @classmethod
    def from_counts(cls, axis_db, errors, trials) -> "BerCurve":
        errors = np.asarray(errors, dtype=float)
        trials = np.asarray(trials, dtype=int)
        if np.any(errors < 0) or np.any(errors > trials):
            raise ValueError("error counts must lie in [0, trials]")
        ber = errors / trials
        ci95 = 1.96 * np.sqrt(ber * (1 - ber) / trials)
        return cls(axis_db=np.asarray(axis_db, float), ber=ber, trials=trials, ci95=ci95)


def demultiplex(field, n: int, radii: np.ndarray, angular_samples: int = 256) -> np.ndarray:
    """Angular correlation of a 2-D field against mode n's helical phase.

        y_n(rho_i) = int_0^{2pi} field(rho_i, phi) e^{-j l_n phi} d phi

    evaluated with the uniform angular rule, which is exact for any field
    whose azimuthal content stays below the sample count.  A pure mode n
    of radial profile psi yields 2 pi psi; other charges cancel.

    Args:
        field: callable (rho, phi) -> complex samples, broadcastable.
        n: mode index of the extraction branch.
        radii: radial evaluation points.
        angular_samples: azimuth sample count (>= 256 keeps leakage at
            the numerical floor for |l| <= 10).
    """
    if angular_samples < 4:
        raise ValueError("need at least 4 angular samples")
    ell = topological_charge(n).ell
    radii = np.asarray(radii, dtype=float)
    phi = np.arange(angular_samples) * (2 * np.pi / angular_samples)
    values = field(radii[:, None], phi[None, :])
    weights = np.exp(-1j * ell * phi) * (2 * np.pi / angular_samples)
    return values @ weights


def mf_statistic(y: np.ndarray, template: np.ndarray, radii: np.ndarray, delta: float) -> complex:
    """Matched-filter correlation sum_i y_i template_i^* rho_i delta."""
    y = np.asarray(y)
    template = np.asarray(template)
    radii = np.asarray(radii, dtype=float)
    if y.shape[-1] != template.shape[-1] or template.shape[-1] != radii.shape[-1]:
        raise ValueError("signal, template and grid lengths must match")
    return (y * np.conj(template) * radii * delta).sum(axis=-1)


def id_statistic(
    y: np.ndarray,
    window: np.ndarray,
    radii: np.ndarray,
    delta: float,
    compensation: np.ndarray | None = None,
) -> complex:
    """Windowed intensity integration sum_{i in w} y_i c_i^* rho_i delta.

    The optional unit-modulus compensation c removes a known deterministic
    phase (the propagation chirp) before integrating; it leaves the noise
    variance of the statistic unchanged.
    """
    window = np.asarray(window, dtype=bool)
    radii = np.asarray(radii, dtype=float)
    if window.shape != radii.shape:
        raise ValueError("window mask and grid lengths must match")
    if not window.any():
        raise ValueError("integration window is empty")
    y = np.asarray(y)[..., window]
    kernel = radii[window] * delta
    if compensation is not None:
        kernel = kernel * np.conj(np.asarray(compensation)[window])
    return (y * kernel).sum(axis=-1)


def ed_statistic(y: np.ndarray, window: np.ndarray, radii: np.ndarray, delta: float) -> float:
    """Windowed energy sum_{i in w} |y_i|^2 rho_i delta (non-negative)."""
    window = np.asarray(window, dtype=bool)
    radii = np.asarray(radii, dtype=float)
    if window.shape != radii.shape:
        raise ValueError("window mask and grid lengths must match")
    if not window.any():
        raise ValueError("integration window is empty")
    y = np.asarray(y)[..., window]
    return (np.abs(y) ** 2 * radii[window] * delta).sum(axis=-1)


def smart_window(n: int, scenario: Scenario, focused: bool, drop_db: float = 10.0, field=None):
    """Radial interval around the mode's intensity peak.

    Returns the smallest contiguous interval that contains the peak of
    |psi_n^rho| and on which the magnitude stays within ``drop_db`` of the
    peak.

    Args:
        n: mode index.
        scenario: link geometry.
        focused: transmit focusing flag.
        drop_db: window edge level below the peak, in dB (> 0).
        field: optional precomputed RadialField to window instead of
            synthesizing mode n.

    Returns:
        (rho_lo, rho_hi) in meters.
    """
    if drop_db <= 0:
        raise ValueError("drop level must be positive dB")
    if field is None:
        field = rx_field_radial(n, scenario, focused)
    magnitude = np.abs(field.samples)
    peak = magnitude.max()
    if peak == 0:
        raise ValueError("degenerate field: flat zero profile has no window")
    above = magnitude >= peak * 10 ** (-drop_db / 20)
    index = int(magnitude.argmax())
    lo = index
    while lo > 0 and above[lo - 1]:
        lo -= 1
    hi = index
    while hi < len(above) - 1 and above[hi + 1]:
        hi += 1
    return float(field.radii[lo]), float(field.radii[hi])


def interval_mask(interval, radii: np.ndarray) -> np.ndarray:
    """Boolean mask of grid points inside a closed radial interval."""
    lo, hi = interval
    radii = np.asarray(radii, dtype=float)
    return (radii >= lo) & (radii <= hi)


def ook_decide(energy, threshold: float):
    """OOK decision: 1 when energy >= threshold (boundary inclusive)."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return np.asarray(energy) >= threshold


def gaussian_ber(gain: float, variance: float) -> float:
    """BPSK error probability of a real sign decision.

    Args:
        gain: noiseless statistic magnitude for a unit symbol.
        variance: total complex noise variance of the statistic (the real
            decision axis carries half of it).

    Returns:
        Q(gain / sqrt(variance/2)).
    """
    if variance <= 0:
        raise ValueError("variance must be positive")
    return 0.5 * erfc(gain / math.sqrt(variance))


def ed_ber(
    threshold: float,
    n0: float,
    n_slots: int,
    window_energy: float,
    amplitude: float = OOK_ONE_AMPLITUDE,
) -> float:
    """Closed-form OOK error probability of the windowed energy detector.

    Over a window of M slots the normalized statistic Y/(pi N0) is central
    chi-square with 2M degrees of freedom for a "0" and noncentral with
    parameter 4 pi a^2 E_w / N0 for a "1", where E_w is the window's radial
    template energy int_w |psi|^2 rho d rho.

    Args:
        threshold: decision level in the statistic's energy units.
        n0: noise spectral density.
        n_slots: slot count M of the window.
        window_energy: E_w, radial template energy over the window.
        amplitude: transmitted "1" amplitude.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    dof = 2 * n_slots
    nc = 4 * np.pi * amplitude**2 * window_energy / n0
    normalized = threshold / (np.pi * n0)
    return 0.5 * (chi2.sf(normalized, dof) + ncx2.cdf(normalized, dof, nc))


def optimize_threshold(
    n0: float,
    n_slots: int,
    window_energy: float,
    amplitude: float = OOK_ONE_AMPLITUDE,
    iterations: int = 80,
):
    """Golden-section minimizer of the closed-form energy-detector BER.

    The error probability is unimodal in the threshold (monotone likelihood
    ratio of the two chi-square hypotheses), so a golden-section search over
    [0, 4 x mean received symbol-plus-noise energy] converges to the global
    optimum.

    Returns:
        (threshold, ber) at the optimum.
    """
    mean_energy = 2 * np.pi * n0 * n_slots + 0.5 * (2 * np.pi * amplitude) ** 2 * window_energy
    lo, hi = 0.0, 4 * mean_energy
    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = ed_ber(c, n0, n_slots, window_energy, amplitude)
    fd = ed_ber(d, n0, n_slots, window_energy, amplitude)
    for _ in range(iterations):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = ed_ber(c, n0, n_slots, window_energy, amplitude)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = ed_ber(d, n0, n_slots, window_energy, amplitude)
    zeta = (a + b) / 2
    return zeta, ed_ber(zeta, n0, n_slots, window_energy, amplitude)


def link_symbol_energy(
    scenario: Scenario,
    focused: bool,
    mode_set=DEFAULT_MODE_SET,
) -> float:
    """Total received symbol energy E_s of the multiplexed charge set.

    Each charge carries a unit-energy transmit profile (equal power
    allocation), so E_s is the sum of the per-mode received energies.  The
    link SNR is E_s/N0.
    """
    cache: dict[int, float] = {}
    total = 0.0
    for ell in mode_set:
        key = abs(int(ell))
        if key not in cache:
            cache[key] = mode_energy(mode_index(key), scenario, focused)
        total += cache[key]
    return total


@dataclass(frozen=True)
class _Branch:
    """Per-mode receive pipeline on the slot grid, shared by the sweeps."""

    config: DetectorConfig
    radii: np.ndarray
    delta: float
    psi: np.ndarray
    mask: np.ndarray
    compensation: np.ndarray
    gain: complex = field(init=False)

    def __post_init__(self) -> None:
        if self.config.strategy == "mf":
            gain = 2 * np.pi * mf_statistic(self.psi, self.psi, self.radii, self.delta)
        else:
            gain = 2 * np.pi * id_statistic(
                self.psi, self.mask, self.radii, self.delta, self.compensation
            )
        object.__setattr__(self, "gain", complex(gain))

    @property
    def window_energy(self) -> float:
        """Radial template energy over the active window."""
        w = self.mask
        return float((np.abs(self.psi[w]) ** 2 * self.radii[w] * self.delta).sum())

    def coherent_statistic(self, y: np.ndarray) -> np.ndarray:
        if self.config.strategy == "mf":
            stat = mf_statistic(y, self.psi, self.radii, self.delta)
        else:
            stat = id_statistic(y, self.mask, self.radii, self.delta, self.compensation)
            if self.config.equalize:
                if self.gain == 0:
                    raise ValueError("degenerate window: zero integrated profile")
                stat = stat * (np.conj(self.gain) / abs(self.gain))
        return stat

    def energy_statistic(self, y: np.ndarray) -> np.ndarray:
        return ed_statistic(y, self.mask, self.radii, self.delta)


def _make_branch(
    scenario: Scenario,
    charge: int,
    config: DetectorConfig,
    focused: bool,
    radii: np.ndarray,
    delta: float,
) -> _Branch:
    n = mode_index(int(charge))
    psi = rx_field_radial(n, scenario, focused, grid=radii).samples
    if config.smart:
        mask = interval_mask(smart_window(n, scenario, focused, config.drop_db), radii)
        if not mask.any():
            raise ValueError("smart window narrower than the slot grid")
    else:
        mask = np.ones(len(radii), dtype=bool)
    kappa = scenario.kappa
    z = scenario.distance
    compensation = np.exp(-1j * kappa * radii**2 / (2 * z)) * np.exp(-1j * kappa * z)
    return _Branch(
        config=config, radii=radii, delta=delta, psi=psi, mask=mask, compensation=compensation
    )


def _check_trials(trials: int) -> int:
    trials = int(trials)
    if trials < 10000:
        raise ValueError("at least 10^4 trials per point are required")
    return trials


def _chunk_sizes(trials: int):
    sizes = [CHUNK_TRIALS] * (trials // CHUNK_TRIALS)
    if trials % CHUNK_TRIALS:
        sizes.append(trials % CHUNK_TRIALS)
    return sizes


def ber_monte_carlo(
    scenario: Scenario,
    charge: int,
    config: DetectorConfig,
    snr_db_list,
    trials: int,
    seed: int = 0,
    focused: bool = True,
    mode_set=DEFAULT_MODE_SET,
    slot: float | None = None,
) -> BerCurve:
    """Monte Carlo BER of one demultiplexed branch over an SNR sweep.

    The SNR axis is the link-level E_s/N0 of the full multiplexed set with
    equal power allocation; each point sets N0 = E_s / snr.  Per trial a
    symbol is drawn, the branch's post-demultiplexing signal
    2 pi x psi + noise is synthesized on the slot grid and the configured
    statistic decides.  For the energy detector without an explicit
    threshold, the closed-form optimum threshold is used at each point.

    Args:
        scenario: link geometry.
        charge: topological charge of the branch under test (must be in
            ``mode_set``).
        config: receiver strategy and knobs.
        snr_db_list: link SNR axis in dB.
        trials: Monte Carlo symbols per point (>= 10^4).
        seed: master seed; chunk streams are spawned from it.
        focused: transmit focusing of the whole mode set.
        mode_set: multiplexed charges defining E_s.
        slot: radial slot width override (default lambda/4).

    Returns:
        BerCurve over the SNR axis.
    """
    trials = _check_trials(trials)
    if int(charge) not in {int(m) for m in mode_set}:
        raise ValueError("branch charge must belong to the multiplexed set")
    snr_db = np.atleast_1d(np.asarray(snr_db_list, dtype=float))
    radii, delta = slot_grid(scenario.radius_rx, slot, scenario.wavelength)
    branch = _make_branch(scenario, charge, config, focused, radii, delta)
    e_s = link_symbol_energy(scenario, focused, mode_set)

    point_seeds = np.random.SeedSequence(seed).spawn(len(snr_db))
    sizes = _chunk_sizes(trials)
    errors = np.zeros(len(snr_db))
    for k, (snr, point_seed) in enumerate(zip(snr_db, point_seeds)):
        n0 = e_s / 10 ** (snr / 10)
        model = NoiseModel(n0=n0, radii=radii, delta=delta)
        if config.strategy == "ed":
            if config.threshold is not None:
                zeta = config.threshold
            else:
                zeta, _ = optimize_threshold(n0, int(branch.mask.sum()), branch.window_energy)
        for chunk, chunk_seed in zip(sizes, point_seed.spawn(len(sizes))):
            rng = np.random.default_rng(chunk_seed)
            bits = rng.integers(0, 2, chunk)
            noise = model.sample(rng, chunk)
            if config.strategy == "ed":
                symbols = bits * OOK_ONE_AMPLITUDE
                y = 2 * np.pi * symbols[:, None] * branch.psi[None, :] + noise
                decided = ook_decide(branch.energy_statistic(y), zeta)
                errors[k] += int(np.count_nonzero(decided != (bits == 1)))
            else:
                symbols = 2.0 * bits - 1.0
                y = 2 * np.pi * symbols[:, None] * branch.psi[None, :] + noise
                decided = branch.coherent_statistic(y).real >= 0
                errors[k] += int(np.count_nonzero(decided != (bits == 1)))
    return BerCurve.from_counts(snr_db, errors, np.full(len(snr_db), trials))


def tnr_sweep(
    scenario: Scenario,
    charge: int,
    snr_db: float,
    tnr_db_list,
    smart: bool,
    trials: int,
    seed: int = 0,
    focused: bool = True,
    mode_set=DEFAULT_MODE_SET,
    drop_db: float = 10.0,
    slot: float | None = None,
) -> BerCurve:
    """Monte Carlo energy-detector BER over a threshold-to-noise sweep.

    The link SNR is held fixed; the threshold is swept as
    zeta = N0 * 10^(TNR/10).  All thresholds reuse the same symbol and
    noise draws, so the shape of the curve is not blurred by independent
    sampling noise.

    Returns:
        BerCurve over the TNR axis.
    """
    trials = _check_trials(trials)
    config = DetectorConfig(strategy="ed", smart=smart, drop_db=drop_db)
    tnr_db = np.atleast_1d(np.asarray(tnr_db_list, dtype=float))
    radii, delta = slot_grid(scenario.radius_rx, slot, scenario.wavelength)
    branch = _make_branch(scenario, charge, config, focused, radii, delta)
    e_s = link_symbol_energy(scenario, focused, mode_set)
    n0 = e_s / 10 ** (snr_db / 10)
    model = NoiseModel(n0=n0, radii=radii, delta=delta)
    thresholds = n0 * 10 ** (tnr_db / 10)

    errors = np.zeros(len(tnr_db))
    sizes = _chunk_sizes(trials)
    for chunk, chunk_seed in zip(sizes, np.random.SeedSequence(seed).spawn(len(sizes))):
        rng = np.random.default_rng(chunk_seed)
        bits = rng.integers(0, 2, chunk)
        noise = model.sample(rng, chunk)
        symbols = bits * OOK_ONE_AMPLITUDE
        y = 2 * np.pi * symbols[:, None] * branch.psi[None, :] + noise
        energy = branch.energy_statistic(y)
        decided = energy[:, None] >= thresholds[None, :]
        errors += np.count_nonzero(decided != (bits == 1)[:, None], axis=0)
    return BerCurve.from_counts(tnr_db, errors, np.full(len(tnr_db), trials))
