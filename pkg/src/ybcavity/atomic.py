"""Level structure of the I = 1/2 ytterbium isotope used throughout.

The model keeps three electronic terms: the 1S0 ground state (F = 1/2, the
nuclear-spin qubit), the 3P1 F' = 3/2 excited manifold reached by the 556-nm
light, and the 3D1 level (F'' = 1/2 and 3/2) that the 1539-nm beam couples to.
Magnetic quantum numbers are stored as twice-the-value integers (m2 = 2m) so
that all bookkeeping stays exact; the public helpers accept ordinary
half-integer floats.

The two stretch transitions |m = +1/2> <-> |m' = +3/2> (sigma+) and
|m = -1/2> <-> |m' = -3/2> (sigma-) are cyclic: their excited states have a
single decay path back to the original ground sublevel.  Everything the rest
of the package does rests on that structure plus the 3:2:1 weight ratio of
the sigma-stretch : pi : sigma-cross couplings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from . import constants
from .errors import ConfigError


class Term(Enum):
    S0 = "1S0"
    P1 = "3P1"
    D1 = "3D1"


class Polarization(Enum):
    """Spherical photon polarizations, plus the linear drive combination.

    The q value is oriented as q = m_excited - m_ground for both absorption
    and emission labels, so a sigma_plus decay photon lowers the atomic m.
    """

    SIGMA_PLUS = +1
    PI = 0
    SIGMA_MINUS = -1
    LINEAR_Y = "linear_y"   # equal sigma+ / sigma- superposition, no pi part

    @property
    def q(self) -> int:
        if self is Polarization.LINEAR_Y:
            raise ValueError("linear_y has no single spherical component q")
        return self.value


def _as_m2(m: float, name: str = "m") -> int:
    m2 = round(2.0 * m)
    if abs(2.0 * m - m2) > 1e-9:
        raise ValueError(f"{name} = {m} is not a half-integer")
    return int(m2)


_ALLOWED_F2 = {Term.S0: (1,), Term.P1: (3,), Term.D1: (1, 3)}


@dataclass(frozen=True)
class Sublevel:
    """A single |term, F, m> state; F and m stored as 2F and 2m integers."""

    term: Term
    f2: int
    m2: int

    def __post_init__(self):
        if self.f2 not in _ALLOWED_F2[self.term]:
            raise ValueError(f"F = {self.f2}/2 not allowed for {self.term}")
        if abs(self.m2) > self.f2 or (self.m2 - self.f2) % 2 != 0:
            raise ValueError(f"m = {self.m2}/2 invalid for F = {self.f2}/2")

    @property
    def f(self) -> float:
        return self.f2 / 2.0

    @property
    def m(self) -> float:
        return self.m2 / 2.0

    def __repr__(self):
        return f"Sublevel({self.term.value}, F={self.f2}/2, m={self.m2:+d}/2)"


SPIN_UP = Sublevel(Term.S0, 1, +1)
SPIN_DOWN = Sublevel(Term.S0, 1, -1)


def _all_sublevels() -> tuple[Sublevel, ...]:
    out = [SPIN_UP, SPIN_DOWN]
    out += [Sublevel(Term.P1, 3, m2) for m2 in (-3, -1, +1, +3)]
    out += [Sublevel(Term.D1, 1, m2) for m2 in (-1, +1)]
    out += [Sublevel(Term.D1, 3, m2) for m2 in (-3, -1, +1, +3)]
    return tuple(out)


@dataclass(frozen=True)
class LevelScheme:
    """Immutable container for the rates and intervals of the level model.

    gamma_P1 and gamma_D1_line are angular rates (rad/s); gamma_P1 is the
    HWHM-convention half linewidth (population decay is 2*gamma_P1), while
    gamma_D1_line is the full 3P1-3D1 partial decay rate.  The hyperfine
    splitting is a plain frequency in Hz.
    """

    gamma_P1: float = constants.GAMMA_P1
    gamma_D1_line: float = constants.GAMMA_D1_LINE
    branching_D1_to_P0: float = constants.BRANCHING_D1_TO_P0
    d1_hyperfine_splitting: float = constants.D1_HYPERFINE_SPLITTING_HZ
    sublevels: tuple[Sublevel, ...] = field(default_factory=_all_sublevels)

    def validate(self) -> "LevelScheme":
        if not self.gamma_P1 > 0:
            raise ConfigError(f"gamma_P1 must be positive, got {self.gamma_P1}")
        if not self.gamma_D1_line > 0:
            raise ConfigError(
                f"gamma_D1_line must be positive, got {self.gamma_D1_line}")
        if not 0.0 <= self.branching_D1_to_P0 <= 1.0:
            raise ConfigError(
                f"branching_D1_to_P0 must lie in [0, 1], got "
                f"{self.branching_D1_to_P0}")
        if not self.d1_hyperfine_splitting > 0:
            raise ConfigError("d1_hyperfine_splitting must be positive")
        return self


def build_level_scheme(**overrides) -> LevelScheme:
    """Assemble and validate a LevelScheme; kwargs override the defaults."""
    known = {"gamma_P1", "gamma_D1_line", "branching_D1_to_P0",
             "d1_hyperfine_splitting"}
    bad = set(overrides) - known
    if bad:
        raise ConfigError(f"unknown level-scheme parameters: {sorted(bad)}")
    return LevelScheme(**overrides).validate()


def transition_weight(ground_m: float, polarization: Polarization) -> float:
    """Squared coupling of |1S0, m> to the 3P1(F'=3/2) sublevel reached by
    the given polarization, normalized so the cyclic transitions are 1.

    Weights from one ground state come out in the ratio 3:2:1 for
    sigma-stretch : pi : sigma-cross.
    """
    m2 = _as_m2(ground_m, "ground_m")
    if abs(m2) != 1:
        raise ValueError(f"ground_m must be +/-1/2, got {ground_m}")
    if polarization is Polarization.LINEAR_Y:
        raise ValueError("transition_weight needs a spherical polarization; "
                         "decompose linear_y into sigma+/sigma- first")
    return float(constants.EXCITATION_WEIGHTS[(m2, polarization.q)])


def transition_weight_exact(ground_m2: int, q: int) -> Fraction:
    """Exact-Fraction version of transition_weight, keyed by 2m and q."""
    return constants.EXCITATION_WEIGHTS[(ground_m2, q)]


def decay_branching(excited_m: float):
    """Decay table of a 3P1(F'=3/2) sublevel.

    Returns a list of (ground_m, Polarization, fraction); the fractions are
    exact squared couplings renormalized to sum to 1, which for this level
    structure they already do.
    """
    m2 = _as_m2(excited_m, "excited_m")
    if m2 not in constants.DECAY_BRANCHES:
        raise ValueError(f"excited_m must be one of +/-1/2, +/-3/2, "
                         f"got {excited_m}")
    return [(g2 / 2.0, Polarization(q), float(frac))
            for (g2, q, frac) in constants.DECAY_BRANCHES[m2]]
