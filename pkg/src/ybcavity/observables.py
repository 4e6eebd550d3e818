"""Derived quantities: spectra, SNR curves, correlations, dark-count
bookkeeping, and the trap-loss dip used to locate the 1539-nm line.

The deterministic ensemble averages here use the same trajectory model as
the Monte Carlo sampler (uniform impact disc, 1-us rate grid) but replace
sampling with quadrature: Gauss-Legendre in the squared radial coordinate
(the same u = (r/R)^2 variable the sampler inverts) and a uniform
azimuthal rule, which together integrate the uniform-disc measure
exactly in the smooth-integrand limit.  Along each fall line the
two-state spin occupation obeys
    dP_up/dt = -f_up P_up + f_dn P_dn,
which for the y-polarized drive is symmetric (f_up = f_dn = f), so the
polarization imbalance decays as exp(-2 int f dt) and every segment
integral has a closed form -- no ODE stepping error on top of the shared
piecewise-constant rate grid.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import c, h

from . import constants
from .errors import ConfigError
from .transit import TransitConfig, make_trajectory, transit_rate_table

SPECTRUM_FORMAT_TAG = "ybcavity.spectrum.v1"
SNR_FORMAT_TAG = "ybcavity.snr.v1"
DIP_FORMAT_TAG = "ybcavity.dip.v1"


# ---------------------------------------------------------------------------
# simple record types


@dataclass(frozen=True)
class SpectrumPoint:
    """One spectrum sample: probe detuning (MHz) and the per-atom mean
    detected counts (both polarizations, ensemble-averaged)."""

    excitation_detuning: float
    mean_counts: float

    def __post_init__(self):
        if self.mean_counts < 0:
            raise ValueError("mean_counts must be >= 0")


@dataclass(frozen=True)
class MotParams:
    """Rate-equation parameters of the trap-loss spectroscopy.

    Steady-state atom number N = R / (Gamma0 + eta * Gamma1(detuning)),
    with Gamma1 the saturated scattering rate on the 16-kHz line and
    eta = p1_population * branching the probability that one scattering
    event removes the atom (shelved outside the cooling cycle).
    """

    R: float = 1.0e6
    Gamma0: float = 0.5
    probe_power_density: float = 30.0
    natural_linewidth_D1: float = 16e3
    branching: float = constants.BRANCHING_D1_TO_P0
    p1_population: float = 0.46

    def validate(self) -> "MotParams":
        for name in ("R", "Gamma0", "probe_power_density",
                     "natural_linewidth_D1", "p1_population"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, "
                                  f"got {getattr(self, name)}")
        if not 0.0 <= self.branching <= 1.0:
            raise ConfigError(f"branching must be in [0, 1], "
                              f"got {self.branching}")
        return self

    @property
    def eta(self) -> float:
        return self.p1_population * self.branching

    @property
    def saturation_intensity(self) -> float:
        """I_sat (W/m^2) of the 1539-nm line."""
        gamma_ang = constants.TWO_PI * self.natural_linewidth_D1
        return math.pi * h * c * gamma_ang \
            / (3.0 * constants.WAVELENGTH_IR ** 3)


# ---------------------------------------------------------------------------
# trap-loss dip


def _scattering_rate(detuning_mhz, mot: MotParams):
    gamma_ang = constants.TWO_PI * mot.natural_linewidth_D1
    s0 = mot.probe_power_density / mot.saturation_intensity
    delta_ang = constants.TWO_PI * np.asarray(detuning_mhz, dtype=float) * 1e6
    return (0.5 * gamma_ang * s0
            / (1.0 + s0 + (2.0 * delta_ang / gamma_ang) ** 2))


def mot_dip_profile(detuning_grid, mot: MotParams):
    """Normalized steady-state atom number N(detuning)/N(far detuned) on a
    MHz grid.  eta = 0 gives exactly 1 everywhere."""
    mot.validate()
    grid = np.asarray(detuning_grid, dtype=float)
    if not np.all(np.isfinite(grid)):
        raise ConfigError("detuning grid must be finite")
    if mot.eta == 0.0:
        return np.ones_like(grid)
    return mot.Gamma0 / (mot.Gamma0 + mot.eta * _scattering_rate(grid, mot))


def dip_half_width(mot: MotParams) -> float:
    """Detuning (MHz) where the trap loss reaches half depth, i.e. where
    eta * Gamma1 = Gamma0; NaN when the dip never gets that deep."""
    mot.validate()
    gamma_ang = constants.TWO_PI * mot.natural_linewidth_D1
    s0 = mot.probe_power_density / mot.saturation_intensity
    if mot.eta == 0.0 or mot.Gamma0 == 0.0:
        return float("nan")
    arg = mot.eta * 0.5 * gamma_ang * s0 / mot.Gamma0 - (1.0 + s0)
    if arg <= 0.0:
        return float("nan")
    return 0.5 * gamma_ang * math.sqrt(arg) / (constants.TWO_PI * 1e6)


# ---------------------------------------------------------------------------
# deterministic transit ensemble


def disc_quadrature(geometry, n_radial: int = 10, n_azimuthal: int = 8):
    """Nodes (x0, y0) and weights averaging over the uniform impact disc."""
    radius = geometry.impact_radius_factor * geometry.mode_waist
    u, w_u = np.polynomial.legendre.leggauss(n_radial)
    u = 0.5 * (u + 1.0)          # map to (0, 1); measure du is uniform
    w_u = 0.5 * w_u
    nodes = []
    for ui, wi in zip(u, w_u):
        r = radius * math.sqrt(float(ui))
        for k in range(n_azimuthal):
            theta = 2.0 * math.pi * (k + 0.5) / n_azimuthal
            nodes.append((r * math.cos(theta), r * math.sin(theta),
                          float(wi) / n_azimuthal))
    return nodes


def expected_transit_counts(x0: float, y0: float, config: TransitConfig,
                            p_up_initial: float = 0.5):
    """Expected cavity emissions (sigma+, sigma-) for one fall line,
    before detection thinning, with the spin occupation evolved through
    the flip rates.  Exact per-segment integrals for the symmetric flip
    problem; a stepwise fallback covers asymmetric rate tables."""
    if not 0.0 <= p_up_initial <= 1.0:
        raise ConfigError(f"p_up_initial must be in [0, 1], "
                          f"got {p_up_initial}")
    traj = make_trajectory(x0, y0, config.geometry)
    rates = transit_rate_table(traj, config)
    dt = traj.time_step
    up, dn = rates["up"], rates["down"]

    if np.array_equal(up.flip, dn.flip):
        f = up.flip
        decay = np.exp(-2.0 * f * dt)
        hazard2 = np.concatenate(([0.0], np.cumsum(2.0 * f * dt)))[:-1]
        amp = (p_up_initial - 0.5) * np.exp(-hazard2)
        with np.errstate(divide="ignore", invalid="ignore"):
            seg_mean = np.where(f > 0.0, (1.0 - decay) / (2.0 * f * dt), 1.0)
        mean_p_up = 0.5 + amp * seg_mean
    else:
        mean_p_up = np.empty_like(up.flip)
        p = p_up_initial
        for i, (fu, fd) in enumerate(zip(up.flip, dn.flip)):
            s = fu + fd
            if s > 0.0:
                p_eq = fd / s
                e = math.exp(-s * dt)
                mean_p_up[i] = p_eq + (p - p_eq) * (1.0 - e) / (s * dt)
                p = p_eq + (p - p_eq) * e
            else:
                mean_p_up[i] = p

    mean_p_dn = 1.0 - mean_p_up
    exp_plus = float(np.sum(dt * (mean_p_up * up.sigma_plus
                                  + mean_p_dn * dn.sigma_plus)))
    exp_minus = float(np.sum(dt * (mean_p_up * up.sigma_minus
                                   + mean_p_dn * dn.sigma_minus)))
    return exp_plus, exp_minus


def _ensemble_expected_counts(config: TransitConfig, p_up_initial: float,
                              n_radial: int, n_azimuthal: int):
    total_plus = total_minus = 0.0
    for x0, y0, w in disc_quadrature(config.geometry, n_radial, n_azimuthal):
        ep, em = expected_transit_counts(x0, y0, config, p_up_initial)
        total_plus += w * ep
        total_minus += w * em
    return total_plus, total_minus


# ---------------------------------------------------------------------------
# spectra


def fluorescence_spectrum(detuning_grid, config: TransitConfig,
                          light_shift_on: bool, n_radial: int = 10,
                          n_azimuthal: int = 8):
    """Per-atom mean detected counts vs probe detuning (MHz grid), for an
    unpolarized atom ensemble."""
    grid = np.asarray(detuning_grid, dtype=float)
    if grid.size and np.any(np.diff(grid) < 0):
        raise ConfigError("detuning grid must be sorted ascending")
    base = replace(config, light_shift_on=light_shift_on)
    eta = config.cavity.detection_efficiency
    points = []
    for det in grid:
        cfg = replace(base, excitation_detuning=float(det) * 1e6)
        ep, em = _ensemble_expected_counts(cfg, 0.5, n_radial, n_azimuthal)
        points.append(SpectrumPoint(excitation_detuning=float(det),
                                    mean_counts=eta * (ep + em)))
    return points


def spectrum_peak(points) -> float:
    """Detuning (MHz) of the largest mean count."""
    if not points:
        raise ConfigError("empty spectrum")
    best = max(points, key=lambda p: p.mean_counts)
    return best.excitation_detuning


def count_weighted_skewness(points) -> float:
    """Third standardized moment of the detuning distribution weighted by
    mean counts; NaN for a flat or empty spectrum."""
    if not points:
        return float("nan")
    det = np.array([p.excitation_detuning for p in points])
    wts = np.array([p.mean_counts for p in points])
    total = wts.sum()
    if total <= 0.0:
        return float("nan")
    mu = np.sum(wts * det) / total
    var = np.sum(wts * (det - mu) ** 2) / total
    if var <= 0.0:
        return float("nan")
    return float(np.sum(wts * (det - mu) ** 3) / total / var ** 1.5)


# ---------------------------------------------------------------------------
# SNR


def snr_from_counts(records, initial_spin: str) -> float:
    """Total desired-polarization counts over total undesired counts
    (sigma+/sigma- for spin up, swapped for down).  Returns math.inf when
    the undesired channel recorded nothing."""
    records = list(records)
    if not records:
        raise ConfigError("records must be nonempty")
    if initial_spin not in ("up", "down"):
        raise ConfigError(f"initial_spin must be 'up' or 'down', "
                          f"got {initial_spin!r}")
    plus = sum(r.counts_sigma_plus for r in records)
    minus = sum(r.counts_sigma_minus for r in records)
    desired, undesired = (plus, minus) if initial_spin == "up" \
        else (minus, plus)
    if undesired == 0:
        return math.inf
    return desired / undesired


@dataclass(frozen=True)
class CorrectedCounts:
    """Dark-count-subtracted counts; clamped marks any channel that went
    negative and was floored at zero."""

    counts_sigma_plus: float
    counts_sigma_minus: float
    clamped: bool


def dark_count_correct(counts_pair, dark_rates_per_ms,
                       total_exposure: float) -> CorrectedCounts:
    """Subtract the expected dark counts (per-ms rates x exposure in
    seconds) from a (sigma+, sigma-) pair."""
    if not total_exposure > 0:
        raise ConfigError(f"total_exposure must be > 0, "
                          f"got {total_exposure}")
    expected = [r * 1e3 * total_exposure for r in dark_rates_per_ms]
    raw = [counts_pair[0] - expected[0], counts_pair[1] - expected[1]]
    clamped = any(v < 0.0 for v in raw)
    return CorrectedCounts(counts_sigma_plus=max(0.0, raw[0]),
                           counts_sigma_minus=max(0.0, raw[1]),
                           clamped=clamped)


def predicted_snr(values, config: TransitConfig, vary: str = "power",
                  n_radial: int = 10, n_azimuthal: int = 8):
    """Deterministic (rate-based, dark-count-free) SNR for a known
    initial spin, swept over light-shift beam power (W) or waist (m).

    The waist sweep holds the peak intensity at the reference beam's
    value, so power scales as (waist/reference waist)^2.  The probe is
    retuned to the engineered resonance at every grid point, as in the
    measurement.  Detection efficiency cancels exactly in the ratio.
    The drive's mirror symmetry makes the result spin-independent.
    """
    if vary not in ("power", "waist"):
        raise ConfigError(f"vary must be 'power' or 'waist', got {vary!r}")
    reference = config.shift_beam
    curve = []
    for v in values:
        if (vary == "power" and v < 0) or (vary == "waist" and not v > 0):
            raise ConfigError(f"swept {vary} values out of range: {v}")
        if vary == "power":
            beam = replace(reference, power=float(v))
        else:
            scale = (float(v) / reference.waist) ** 2
            beam = replace(reference, waist=float(v),
                           power=reference.power * scale)
        cfg = replace(config, shift_beam=beam, light_shift_on=True,
                      excitation_detuning=None)
        desired, undesired = _ensemble_expected_counts(
            cfg, 1.0, n_radial, n_azimuthal)
        curve.append((float(v),
                      math.inf if undesired == 0.0 else desired / undesired))
    return curve


# ---------------------------------------------------------------------------
# correlation


def pearson_correlation(records) -> float:
    """Pearson r between the sigma+ and sigma- counts of a record set;
    NaN when either channel has zero variance."""
    records = list(records)
    if len(records) < 2:
        raise ConfigError("need at least two records for a correlation")
    plus = np.array([r.counts_sigma_plus for r in records], dtype=float)
    minus = np.array([r.counts_sigma_minus for r in records], dtype=float)
    dp = plus - plus.mean()
    dm = minus - minus.mean()
    var_p = np.sum(dp ** 2)
    var_m = np.sum(dm ** 2)
    if var_p == 0.0 or var_m == 0.0:
        return float("nan")
    return float(np.sum(dp * dm) / math.sqrt(var_p * var_m))


# ---------------------------------------------------------------------------
# emitters


def _write_tagged_csv(path, tag, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(f"# format={tag}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_spectrum_csv(path, points):
    _write_tagged_csv(path, SPECTRUM_FORMAT_TAG,
                      ("detuning_MHz", "mean_counts"),
                      ((repr(float(p.excitation_detuning)),
                        repr(float(p.mean_counts))) for p in points))


def write_snr_csv(path, curve, x_label: str):
    if x_label not in ("power_mW", "waist_um"):
        raise ConfigError(f"unknown snr sweep label {x_label!r}")
    _write_tagged_csv(path, SNR_FORMAT_TAG, (x_label, "snr"),
                      ((repr(float(x)), repr(float(s))) for x, s in curve))


def write_dip_csv(path, detuning_grid, values):
    _write_tagged_csv(path, DIP_FORMAT_TAG, ("detuning_MHz", "normalized_N"),
                      ((repr(float(d)), repr(float(v)))
                       for d, v in zip(detuning_grid, values)))


def write_stats_json(path, stats: dict):
    with open(path, "w") as fh:
        json.dump(stats, fh, indent=2, sort_keys=True)
        fh.write("\n")
