"""AC Stark shifts of the 3P1(F'=3/2) sublevels from the 1539-nm beam.

The pi-polarized infrared beam couples each 3P1(F'=3/2, m') sublevel to the
3D1 hyperfine components it can reach: m' = +/-3/2 talk only to F'' = 3/2,
m' = +/-1/2 to both F'' = 1/2 and 3/2.  In second-order perturbation theory
each coupled component k contributes Omega_k^2 / (4 Delta_k) to the level
shift, with Omega_k^2 proportional to the local beam intensity times the
squared coupling weight.  Because the F'' = 3/2 component lies *below*
F'' = 1/2, a beam red-detuned from F'' = 1/2 is blue of F'' = 3/2, which
pushes m' = +/-3/2 up and m' = +/-1/2 down: the two shifts have opposite
signs and their difference is the engineered sublevel splitting.

Geometry: beams propagate along the y axis (perpendicular to both the
cavity axis x and the fall axis z), so the transverse beam coordinate at a
point (x, y, z) is r^2 = (x - axis_offset)^2 + z^2.

Units: powers in W, lengths in m, `BeamParams.detuning` in rad/s (angular,
relative to the D1 F=1/2 component for the shift beam); returned shifts are
plain frequencies in Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import c, epsilon_0, hbar

from . import constants
from .atomic import LevelScheme, Polarization, _as_m2
from .errors import ConfigError, ResonanceError

TWO_PI = constants.TWO_PI


@dataclass(frozen=True)
class BeamParams:
    """A Gaussian beam: power (W), 1/e^2 intensity waist (m), detuning
    (rad/s, relative to the transition named by its role), polarization,
    and transverse misalignment along x (m)."""

    power: float
    waist: float
    detuning: float = 0.0
    polarization: Polarization = Polarization.PI
    axis_offset: float = 0.0

    def __post_init__(self):
        if self.power < 0:
            raise ConfigError(f"beam power must be >= 0, got {self.power}")
        if not self.waist > 0:
            raise ConfigError(f"beam waist must be > 0, got {self.waist}")

    @property
    def peak_intensity(self) -> float:
        return 2.0 * self.power / (math.pi * self.waist ** 2)


@dataclass(frozen=True)
class ShiftResult:
    """Shifts (Hz) of the m'=+/-3/2 and m'=+/-1/2 sublevels and their
    difference.  splitting is always delta_32 - delta_12 exactly."""

    delta_32: float
    delta_12: float
    splitting: float = None  # filled from the other two when omitted

    def __post_init__(self):
        if self.splitting is None:
            object.__setattr__(self, "splitting",
                               self.delta_32 - self.delta_12)
        elif self.splitting != self.delta_32 - self.delta_12:
            raise ValueError("splitting must equal delta_32 - delta_12")


ZERO_SHIFT = ShiftResult(0.0, 0.0)


def default_shift_beam(power: float = constants.SHIFT_POWER,
                       waist: float = constants.SHIFT_WAIST,
                       detuning: float = constants.SHIFT_DETUNING,
                       axis_offset: float = 0.0) -> BeamParams:
    """Shift beam at the reference operating point (9 mW, 50 um, -300 MHz)."""
    return BeamParams(power=power, waist=waist, detuning=detuning,
                      polarization=Polarization.PI, axis_offset=axis_offset)


def beam_intensity(radial_offset: float, beam: BeamParams) -> float:
    """I(r) = (2P / pi w^2) exp(-2 r^2 / w^2) in W/m^2."""
    return beam.peak_intensity * math.exp(
        -2.0 * radial_offset ** 2 / beam.waist ** 2)


def beam_radius_at(position, beam: BeamParams) -> float:
    """Transverse distance from the beam axis for a point (x, y, z)."""
    x, _, z = position
    return math.hypot(x - beam.axis_offset, z)


def _rabi_sq_unit(intensity: float, scheme: LevelScheme) -> float:
    """Squared Rabi frequency (rad^2/s^2) for unit coupling weight.

    The dipole scale comes from the partial decay rate of the line: in the
    weight normalization used here the squared matrix elements from any 3D1
    sublevel sum to one, so d^2 = 3 pi eps0 hbar c^3 Gamma / omega^3 exactly.
    A single frozen calibration factor absorbs the remaining convention
    spread in the published strength of this line.
    """
    omega = TWO_PI * c / constants.WAVELENGTH_IR
    d_sq = 3.0 * math.pi * epsilon_0 * hbar * c ** 3 \
        * scheme.gamma_D1_line / omega ** 3
    return (2.0 * intensity * d_sq / (c * epsilon_0 * hbar ** 2)
            * constants.D1_SHIFT_CALIBRATION)


def _component_detunings(beam: BeamParams, scheme: LevelScheme):
    """Angular detunings from the F''=1/2 and F''=3/2 components (keyed 2F'')."""
    return {
        1: beam.detuning,
        3: beam.detuning + TWO_PI * scheme.d1_hyperfine_splitting,
    }


def stark_shift(sublevel_m: float, beam: BeamParams, scheme: LevelScheme,
                position=(0.0, 0.0, 0.0),
                resonance_floor: float = 10.0) -> float:
    """Shift (Hz) of a 3P1(F'=3/2) sublevel at `position`.

    Raises ResonanceError when the beam sits within `resonance_floor`
    linewidths of any hyperfine component the sublevel actually couples to;
    the perturbative formula is meaningless there.
    """
    m2 = _as_m2(sublevel_m, "sublevel_m")
    if abs(m2) not in (1, 3):
        raise ValueError(f"sublevel_m must be one of +/-1/2, +/-3/2, "
                         f"got {sublevel_m}")
    if beam.polarization is not Polarization.PI:
        raise ConfigError("the light-shift model covers a pi-polarized beam; "
                          f"got {beam.polarization}")
    detunings = _component_detunings(beam, scheme)
    intensity = beam_intensity(beam_radius_at(position, beam), beam)
    omega_sq = _rabi_sq_unit(intensity, scheme)
    shift_rad = 0.0
    for f2, delta_k in detunings.items():
        weight = constants.D1_PI_WEIGHTS[(abs(m2), f2)]
        if weight == 0:
            continue
        if abs(delta_k) < resonance_floor * scheme.gamma_D1_line:
            raise ResonanceError(
                f"shift beam within {resonance_floor} linewidths of the "
                f"F''={f2}/2 component (detuning {delta_k:.3g} rad/s)")
        shift_rad += float(weight) * omega_sq / (4.0 * delta_k)
    return shift_rad / TWO_PI


def sublevel_splitting(delta_32_measured: float, scheme: LevelScheme,
                       detuning: float = constants.SHIFT_DETUNING
                       ) -> ShiftResult:
    """Infer the m'=+/-1/2 shift (and the splitting) from a known m'=+/-3/2
    shift, using the fixed ratio of summed weights over detunings.

    The ratio is evaluated at the given operating detuning (default: the
    reference -300 MHz point) and is independent of intensity, so a measured
    delta_32 pins everything else.  Input and outputs in Hz.
    """
    detunings = _component_detunings(
        BeamParams(power=0.0, waist=1.0, detuning=detuning), scheme)
    w = constants.D1_PI_WEIGHTS
    resp_32 = float(w[(3, 3)]) / detunings[3]
    resp_12 = (float(w[(1, 1)]) / detunings[1]
               + float(w[(1, 3)]) / detunings[3])
    delta_12 = delta_32_measured * resp_12 / resp_32
    return ShiftResult(delta_32=delta_32_measured, delta_12=delta_12)


def shift_field(grid, beam: BeamParams, scheme: LevelScheme,
                resonance_floor: float = 10.0):
    """Pointwise ShiftResult for every 3-vector in `grid` (same order)."""
    out = []
    for position in grid:
        d32 = stark_shift(+1.5, beam, scheme, position, resonance_floor)
        d12 = stark_shift(+0.5, beam, scheme, position, resonance_floor)
        out.append(ShiftResult(delta_32=d32, delta_12=d12))
    return out
