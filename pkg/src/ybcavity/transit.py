"""Monte Carlo transits of falling atoms through the cavity mode.

An atom released from the trap falls along z, crosses the mode with a
transverse impact parameter (x0, y0), and scatters photons at the
position- and spin-dependent rates supplied by the adiabatic model.  A
transit is simulated as a time-inhomogeneous jump process on the two
ground spin states: rates are held piecewise-constant on a fixed time
grid, spin-flip times are drawn by inverting the cumulative hazard, and
the detected photon numbers per polarization are Poisson with mean
(detection efficiency) x (integrated emission rate) -- Poisson thinning
is exact, so the detector never needs per-photon sampling.

Reproducibility: every run owns a counter-based Philox stream keyed on
(master_seed, run_index), so ensembles are bit-identical for any worker
count.  Within one run the draw order is fixed and documented in
`sample_trajectory`, `simulate_transit` and `simulate_window`.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import g as FREE_FALL_G

from . import constants
from .atomic import LevelScheme, Polarization, build_level_scheme
from .dynamics import CavityParams, EmissionRates, adiabatic_rates, coupling_at
from .errors import ConfigError
from .lightshift import (BeamParams, ShiftResult, default_shift_beam,
                         stark_shift)

SPINS = ("up", "down")
_OTHER_SPIN = {"up": "down", "down": "up"}

TRANSIT_FORMAT_TAG = "ybcavity.transit.v1"
WINDOW_FORMAT_TAG = "ybcavity.window.v1"

_TRANSIT_COLUMNS = ("initial_spin", "final_spin", "counts_sigma_plus",
                    "counts_sigma_minus", "transit_duration_s",
                    "peak_coupling_rad_s")
_WINDOW_COLUMNS = ("window_s", "counts_sigma_plus", "counts_sigma_minus",
                   "atom_count")


# ---------------------------------------------------------------------------
# geometry and trajectories


@dataclass(frozen=True)
class TransitGeometry:
    """Where atoms come from and how they cross the mode.

    The fall speed at the cavity follows from the drop height; the
    mean_transit_time field is the crossing time of the 1/e^2 mode
    diameter at that speed and is derived automatically when left None.
    Impact parameters are drawn uniformly from a transverse disc of
    radius impact_radius_factor x mode_waist; atoms outside couple
    negligibly.  The simulated path spans +/- simulation_halfspan in z
    around the mode center, resolved in time_step slices.
    """

    drop_height: float = constants.DROP_HEIGHT
    mode_waist: float = constants.MODE_WAIST
    mean_transit_time: float = None
    impact_parameter_distribution: str = "uniform-disc"
    impact_radius_factor: float = 2.0
    simulation_halfspan: float = 125e-6
    time_step: float = 1e-6

    def __post_init__(self):
        if self.mean_transit_time is None:
            # derivable only for a physical drop; validate() rejects the rest
            derived = (2.0 * self.mode_waist / self.fall_speed
                       if self.drop_height > 0 else math.nan)
            object.__setattr__(self, "mean_transit_time", derived)

    def validate(self) -> "TransitGeometry":
        for name in ("drop_height", "mode_waist", "mean_transit_time",
                     "impact_radius_factor", "simulation_halfspan",
                     "time_step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, "
                                  f"got {getattr(self, name)}")
        if self.impact_parameter_distribution != "uniform-disc":
            raise ConfigError(
                "unknown impact parameter distribution "
                f"{self.impact_parameter_distribution!r}; "
                "only 'uniform-disc' is implemented")
        return self

    @property
    def fall_speed(self) -> float:
        """Speed (m/s) at the cavity after free fall from the trap."""
        return math.sqrt(2.0 * FREE_FALL_G * self.drop_height)


@dataclass(frozen=True)
class Trajectory:
    """A straight vertical fall line sampled on the time grid.

    x0, y0 are the (fixed) transverse coordinates, z the vertical offset
    from the mode center at each grid time; speed is the value at z = 0.
    """

    x0: float
    y0: float
    speed: float
    times: np.ndarray
    z: np.ndarray
    time_step: float

    def positions(self):
        return (np.full_like(self.z, self.x0),
                np.full_like(self.z, self.y0), self.z)


def make_trajectory(x0: float, y0: float, geometry: TransitGeometry
                    ) -> Trajectory:
    """Deterministic fall line through transverse point (x0, y0)."""
    v0 = _speed_at(geometry, geometry.simulation_halfspan)
    span = 2.0 * geometry.simulation_halfspan
    total = (math.sqrt(v0 ** 2 + 2.0 * FREE_FALL_G * span) - v0) / FREE_FALL_G
    n_seg = max(1, math.ceil(total / geometry.time_step))
    times = np.arange(n_seg) * geometry.time_step
    z = (geometry.simulation_halfspan - v0 * times
         - 0.5 * FREE_FALL_G * times ** 2)
    return Trajectory(x0=x0, y0=y0, speed=geometry.fall_speed, times=times,
                      z=z, time_step=geometry.time_step)


def sample_trajectory(rng, geometry: TransitGeometry) -> Trajectory:
    """Draw one fall line.  Draw order: impact radius, then azimuth."""
    radius = geometry.impact_radius_factor * geometry.mode_waist
    r = radius * math.sqrt(rng.random())
    theta = 2.0 * math.pi * rng.random()
    return make_trajectory(r * math.cos(theta), r * math.sin(theta), geometry)


def _speed_at(geometry: TransitGeometry, height_above_center: float) -> float:
    drop = geometry.drop_height - height_above_center
    return math.sqrt(2.0 * FREE_FALL_G * drop)


def crossing_duration(geometry: TransitGeometry, half_width: float = None
                      ) -> float:
    """Exact time (s) a falling atom spends with |z| <= half_width
    (default: one mode waist)."""
    w = geometry.mode_waist if half_width is None else half_width
    v0 = _speed_at(geometry, geometry.simulation_halfspan)
    h = geometry.simulation_halfspan

    def t_at(z):
        drop = h - z
        return (math.sqrt(v0 ** 2 + 2.0 * FREE_FALL_G * drop) - v0) \
            / FREE_FALL_G

    return t_at(-w) - t_at(+w)


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class TransitConfig:
    """Everything a stochastic run needs, beams through bookkeeping.

    excitation_detuning is in Hz relative to the unshifted cyclic line;
    None means "track the engineered resonance": the m'=+/-3/2 shift at
    the mode center when the shift beam is on, zero otherwise.
    initial_spin is the per-atom preparation policy: 'up', 'down', or
    'random' (fair coin per atom).
    """

    scheme: LevelScheme
    cavity: CavityParams
    drive: BeamParams
    shift_beam: BeamParams
    geometry: TransitGeometry
    light_shift_on: bool = True
    excitation_detuning: float = None
    atom_rate: float = constants.ATOM_RATE
    window: float = constants.MEASUREMENT_WINDOW
    initial_spin: str = "random"

    def validate(self) -> "TransitConfig":
        self.scheme.validate()
        self.cavity.validate()
        self.geometry.validate()
        if self.initial_spin not in SPINS + ("random",):
            raise ConfigError("initial_spin must be 'up', 'down' or "
                              f"'random', got {self.initial_spin!r}")
        if self.atom_rate < 0:
            raise ConfigError(f"atom_rate must be >= 0, "
                              f"got {self.atom_rate}")
        if not self.window > 0:
            raise ConfigError(f"window must be > 0, got {self.window}")
        if self.excitation_detuning is not None \
                and not math.isfinite(self.excitation_detuning):
            raise ConfigError("excitation_detuning must be finite")
        return self


def default_transit_config(light_shift_on: bool = True,
                           **overrides) -> TransitConfig:
    """Reference operating point: all defaults at their published values."""
    base = TransitConfig(
        scheme=build_level_scheme(),
        cavity=CavityParams(),
        drive=BeamParams(power=constants.DRIVE_POWER,
                         waist=constants.DRIVE_WAIST,
                         polarization=Polarization.LINEAR_Y),
        shift_beam=default_shift_beam(),
        geometry=TransitGeometry(),
        light_shift_on=light_shift_on,
    )
    return replace(base, **overrides).validate()


def probe_detuning(config: TransitConfig) -> float:
    """Excitation detuning (Hz) actually applied in a run."""
    if config.excitation_detuning is not None:
        return config.excitation_detuning
    if not config.light_shift_on or config.shift_beam.power == 0:
        return 0.0
    return stark_shift(+1.5, config.shift_beam, config.scheme)


def shift_profile(trajectory: Trajectory, config: TransitConfig):
    """Sublevel shifts (Hz) along the path as arrays matching the grid.

    The shift is linear in the local beam intensity, so the center values
    scale exactly with the Gaussian envelope of the shift beam (transverse
    coordinates x and z for a beam running along y).
    """
    if not config.light_shift_on or config.shift_beam.power == 0:
        zeros = np.zeros_like(trajectory.z)
        return zeros, zeros
    beam = config.shift_beam
    d32 = stark_shift(+1.5, beam, config.scheme)
    d12 = stark_shift(+0.5, beam, config.scheme)
    r_sq = (trajectory.x0 - beam.axis_offset) ** 2 + trajectory.z ** 2
    envelope = np.exp(-2.0 * r_sq / beam.waist ** 2)
    return d32 * envelope, d12 * envelope


@dataclass(frozen=True)
class _RateView:
    """Per-grid-segment rates for one spin."""

    sigma_plus: np.ndarray
    sigma_minus: np.ndarray
    flip: np.ndarray


def transit_rate_table(trajectory: Trajectory, config: TransitConfig):
    """Emission/flip rates along the path for both spin states."""
    pos = trajectory.positions()
    det = probe_detuning(config)
    d32, d12 = shift_profile(trajectory, config)
    shifts = ShiftResult(delta_32=d32, delta_12=d12)

    table = {}
    for spin in SPINS:
        r = adiabatic_rates(spin, det, pos, shifts, config.scheme,
                            config.cavity, config.drive)
        table[spin] = _RateView(
            sigma_plus=np.asarray(r.rate_sigma_plus, dtype=float),
            sigma_minus=np.asarray(r.rate_sigma_minus, dtype=float),
            flip=np.asarray(r.spin_flip_rate, dtype=float))
    return table


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class TransitRecord:
    """One atom through the cavity: detected counts per polarization,
    spin before and after, crossing time of the mode waist, and the
    coupling (rad/s) at closest approach."""

    counts_sigma_plus: int
    counts_sigma_minus: int
    initial_spin: str
    final_spin: str
    transit_duration: float
    peak_coupling: float

    def __post_init__(self):
        if self.counts_sigma_plus < 0 or self.counts_sigma_minus < 0:
            raise ValueError("photon counts must be >= 0")
        if not self.transit_duration > 0:
            raise ValueError("transit duration must be > 0")


@dataclass(frozen=True)
class CountRecord:
    """One measurement window: summed detected counts over every atom
    that arrived, plus detector dark counts."""

    window: float
    counts_sigma_plus: int
    counts_sigma_minus: int
    atom_count: int

    def __post_init__(self):
        if self.counts_sigma_plus < 0 or self.counts_sigma_minus < 0:
            raise ValueError("photon counts must be >= 0")


# ---------------------------------------------------------------------------
# single-transit jump process


def simulate_transit(rng, initial_spin: str, config: TransitConfig
                     ) -> TransitRecord:
    """Simulate one atom.  Draw order: trajectory (2 uniforms), one
    exponential per spin-flip attempt, then the two Poisson counts."""
    if initial_spin not in SPINS:
        raise ConfigError(f"initial_spin must be 'up' or 'down', "
                          f"got {initial_spin!r}")
    traj = sample_trajectory(rng, config.geometry)
    rates = transit_rate_table(traj, config)
    dt = traj.time_step
    n_seg = len(traj.times)

    spin = initial_spin
    lam_plus = 0.0
    lam_minus = 0.0
    # Inhomogeneous jump times by hazard inversion: the flip rate is
    # constant within a segment, so the remaining exponential budget
    # `target` depletes linearly and the flip lands mid-segment when the
    # budget runs out there.
    target = rng.exponential()
    i, frac = 0, 0.0
    while i < n_seg:
        f = rates[spin].flip[i]
        seg = dt * (1.0 - frac)
        hazard = f * seg
        if hazard >= target and hazard > 0.0:
            tau = target / f
            lam_plus += rates[spin].sigma_plus[i] * tau
            lam_minus += rates[spin].sigma_minus[i] * tau
            frac += tau / dt
            spin = _OTHER_SPIN[spin]
            target = rng.exponential()
            if frac >= 1.0:
                i, frac = i + 1, 0.0
        else:
            target -= hazard
            lam_plus += rates[spin].sigma_plus[i] * seg
            lam_minus += rates[spin].sigma_minus[i] * seg
            i, frac = i + 1, 0.0

    eta = config.cavity.detection_efficiency
    counts_plus = int(rng.poisson(eta * lam_plus))
    counts_minus = int(rng.poisson(eta * lam_minus))
    peak = float(coupling_at((traj.x0, traj.y0, 0.0), config.cavity))
    return TransitRecord(counts_sigma_plus=counts_plus,
                         counts_sigma_minus=counts_minus,
                         initial_spin=initial_spin, final_spin=spin,
                         transit_duration=crossing_duration(config.geometry),
                         peak_coupling=peak)


def _draw_spin(rng, config: TransitConfig) -> str:
    if config.initial_spin in SPINS:
        return config.initial_spin
    return "up" if rng.random() < 0.5 else "down"


def simulate_window(rng, atom_rate: float, window: float,
                    config: TransitConfig) -> CountRecord:
    """One measurement window.  Draw order: atom number, dark counts
    (sigma+ then sigma-), then per-atom (spin if random, transit)."""
    if atom_rate < 0:
        raise ConfigError(f"atom_rate must be >= 0, got {atom_rate}")
    if not window > 0:
        raise ConfigError(f"window must be > 0, got {window}")
    n_atoms = int(rng.poisson(atom_rate * window))
    dark_plus, dark_minus = config.cavity.dark_rates_per_s
    counts_plus = int(rng.poisson(dark_plus * window))
    counts_minus = int(rng.poisson(dark_minus * window))
    for _ in range(n_atoms):
        rec = simulate_transit(rng, _draw_spin(rng, config), config)
        counts_plus += rec.counts_sigma_plus
        counts_minus += rec.counts_sigma_minus
    return CountRecord(window=window, counts_sigma_plus=counts_plus,
                       counts_sigma_minus=counts_minus, atom_count=n_atoms)


# ---------------------------------------------------------------------------
# ensembles


def child_rng(master_seed: int, run_index: int):
    """Counter-based stream for one run: Philox keyed on
    (master_seed, run_index), independent of worker scheduling."""
    if master_seed < 0 or run_index < 0:
        raise ConfigError("seeds and run indices must be >= 0")
    key = np.array([master_seed, run_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _run_indexed(task, n_runs: int, n_workers: int):
    if n_runs < 1:
        raise ConfigError(f"n_runs must be >= 1, got {n_runs}")
    if n_workers <= 1:
        return [task(i) for i in range(n_runs)]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(task, range(n_runs)))


def run_ensemble(n_runs: int, master_seed: int, config: TransitConfig,
                 n_workers: int = 1):
    """n_runs measurement windows, one Philox child stream per run.
    Output order is by run index regardless of scheduling."""
    config.validate()

    def task(i):
        return simulate_window(child_rng(master_seed, i), config.atom_rate,
                               config.window, config)

    return _run_indexed(task, n_runs, n_workers)


def run_transit_ensemble(n_runs: int, master_seed: int,
                         config: TransitConfig, n_workers: int = 1):
    """n_runs single-atom transits with the same stream-splitting rule as
    run_ensemble; the per-run draw order is spin (if random) then
    transit."""
    config.validate()

    def task(i):
        rng = child_rng(master_seed, i)
        return simulate_transit(rng, _draw_spin(rng, config), config)

    return _run_indexed(task, n_runs, n_workers)


# ---------------------------------------------------------------------------
# serialization (CSV and JSON-lines, versioned header)


def _transit_row(rec: TransitRecord):
    return (rec.initial_spin, rec.final_spin, rec.counts_sigma_plus,
            rec.counts_sigma_minus, repr(rec.transit_duration),
            repr(rec.peak_coupling))


def _window_row(rec: CountRecord):
    return (repr(rec.window), rec.counts_sigma_plus, rec.counts_sigma_minus,
            rec.atom_count)


def _write_csv(stream, tag, columns, rows):
    stream.write(f"# format={tag}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)


def _write_jsonl(stream, tag, dicts):
    stream.write(json.dumps({"format": tag}, sort_keys=True) + "\n")
    for d in dicts:
        stream.write(json.dumps(d, sort_keys=True) + "\n")


def write_transit_records(path, records, emit_format: str = "csv"):
    with open(path, "w", newline="") as fh:
        if emit_format == "csv":
            _write_csv(fh, TRANSIT_FORMAT_TAG, _TRANSIT_COLUMNS,
                       (_transit_row(r) for r in records))
        elif emit_format == "jsonl":
            _write_jsonl(fh, TRANSIT_FORMAT_TAG,
                         (dict(zip(_TRANSIT_COLUMNS, _transit_row(r)))
                          for r in records))
        else:
            raise ConfigError(f"unknown format {emit_format!r}")


def write_count_records(path, records, emit_format: str = "csv"):
    with open(path, "w", newline="") as fh:
        if emit_format == "csv":
            _write_csv(fh, WINDOW_FORMAT_TAG, _WINDOW_COLUMNS,
                       (_window_row(r) for r in records))
        elif emit_format == "jsonl":
            _write_jsonl(fh, WINDOW_FORMAT_TAG,
                         (dict(zip(_WINDOW_COLUMNS, _window_row(r)))
                          for r in records))
        else:
            raise ConfigError(f"unknown format {emit_format!r}")


def _read_tagged(path, expected_tag):
    with open(path, "r", newline="") as fh:
        first = fh.readline().strip()
        if first.startswith("#"):
            tag = first.split("format=", 1)[-1].strip()
            if tag != expected_tag:
                raise ConfigError(f"expected {expected_tag}, found {tag!r}")
            reader = csv.DictReader(fh)
            return list(reader)
        header = json.loads(first)
        if header.get("format") != expected_tag:
            raise ConfigError(f"expected {expected_tag}, "
                              f"found {header.get('format')!r}")
        return [json.loads(line) for line in fh if line.strip()]


def read_transit_records(path):
    out = []
    for row in _read_tagged(path, TRANSIT_FORMAT_TAG):
        out.append(TransitRecord(
            counts_sigma_plus=int(row["counts_sigma_plus"]),
            counts_sigma_minus=int(row["counts_sigma_minus"]),
            initial_spin=row["initial_spin"],
            final_spin=row["final_spin"],
            transit_duration=float(row["transit_duration_s"]),
            peak_coupling=float(row["peak_coupling_rad_s"])))
    return out


def read_count_records(path):
    out = []
    for row in _read_tagged(path, WINDOW_FORMAT_TAG):
        out.append(CountRecord(
            window=float(row["window_s"]),
            counts_sigma_plus=int(row["counts_sigma_plus"]),
            counts_sigma_minus=int(row["counts_sigma_minus"]),
            atom_count=int(row["atom_count"])))
    return out
