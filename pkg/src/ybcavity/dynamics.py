"""Two-mode atom-cavity dynamics: full Lindblad model and effective rates.

The Hilbert space is {|up>, |down>, four 3P1(F'=3/2) sublevels} tensor
Fock(sigma+ mode) tensor Fock(sigma- mode).  The sigma+ cavity mode couples
every q = +1 transition with its coupling weight, the sigma- mode every
q = -1 transition; the classical side drive enters with its polarization
decomposed into spherical components.  kappa and gamma are HWHM-convention
rates, so Lindblad collapse channels carry 2*kappa and 2*gamma.

In the bad-cavity regime (kappa > g) the cavity can be eliminated: each
excited sublevel decays into a coupled mode at the enhanced rate
2 g^2 w / kappa and its steady excitation follows a saturated Lorentzian in
the local detuning (excitation detuning minus that sublevel's light shift).
`adiabatic_rates` packages those closed forms; the full model is kept
around precisely to validate them (see the steady-state flux cross-check
in the tests).

Conventions: positions are (x, y, z) with x the cavity axis, y the beam
axis and z the fall axis; `excitation_detuning` is a plain frequency in Hz
(the rest of the package's "user-facing" surfaces are Hz), all internal
rates rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.constants import c, epsilon_0, hbar

from . import constants
from .atomic import LevelScheme, Polarization
from .errors import ConfigError, ModelError, NumericalError
from .lightshift import BeamParams, ShiftResult, beam_intensity, beam_radius_at

TWO_PI = constants.TWO_PI

# atom basis order: ground up, ground down, then excited by descending m'
GROUND_INDEX = {+1: 0, -1: 1}
EXCITED_INDEX = {+3: 2, +1: 3, -1: 4, -3: 5}
N_ATOM = 6


@dataclass(frozen=True)
class CavityParams:
    """Cavity and detection parameters.

    g0, kappa, gamma are angular rates (rad/s); kappa and gamma are HWHM
    convention.  gamma duplicates LevelScheme.gamma_P1 on purpose (it is
    the third member of the (g0, kappa, gamma) triple); keep them equal
    unless deliberately exploring.  Dark rates are counts per millisecond
    per detector, matching how such detectors are usually quoted.
    """

    g0: float = constants.G0
    kappa: float = constants.KAPPA
    gamma: float = constants.GAMMA_P1
    mode_waist: float = constants.MODE_WAIST
    detection_efficiency: float = constants.DETECTION_EFFICIENCY
    dark_rate_sigma_plus_per_ms: float = constants.DARK_RATE_SIGMA_PLUS_PER_MS
    dark_rate_sigma_minus_per_ms: float = constants.DARK_RATE_SIGMA_MINUS_PER_MS
    axial_rms_factor: float = constants.AXIAL_RMS_FACTOR

    def validate(self) -> "CavityParams":
        for name in ("g0", "kappa", "gamma", "mode_waist"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not 0.0 <= self.detection_efficiency <= 1.0:
            raise ConfigError("detection_efficiency must lie in [0, 1]")
        if (self.dark_rate_sigma_plus_per_ms < 0
                or self.dark_rate_sigma_minus_per_ms < 0):
            raise ConfigError("dark rates must be >= 0")
        if not 0.0 < self.axial_rms_factor <= 1.0:
            raise ConfigError("axial_rms_factor must lie in (0, 1]")
        return self

    @property
    def dark_rates_per_s(self):
        return (self.dark_rate_sigma_plus_per_ms * 1e3,
                self.dark_rate_sigma_minus_per_ms * 1e3)


@dataclass
class EmissionRates:
    """Effective emission/loss rates (photons/s or events/s).

    Cavity rates are photons emitted *into* each mode; detector-side counts
    are thinned by the detection efficiency downstream.  bad_cavity_ok goes
    False when the local coupling exceeds kappa and the elimination is
    suspect.
    """

    rate_sigma_plus: float
    rate_sigma_minus: float
    spin_flip_rate: float
    free_space_rate: float
    bad_cavity_ok: bool = True


def coupling_at(position, cavity: CavityParams) -> float:
    """Atom-cavity coupling g (rad/s) at (x, y, z): Gaussian in the
    transverse (y, z) plane, axial standing wave replaced by its RMS."""
    _, y, z = position
    return (cavity.g0 * cavity.axial_rms_factor
            * np.exp(-(np.asarray(y) ** 2 + np.asarray(z) ** 2)
                     / cavity.mode_waist ** 2))


def drive_rabi_sq(position, drive: BeamParams, scheme: LevelScheme) -> float:
    """Total squared Rabi frequency (rad^2/s^2) of the excitation beam at a
    point, before polarization decomposition and coupling weights.

    The dipole scale comes from the 3P1 natural width (2*gamma_P1), i.e. the
    cyclic weight-1 transition; each P1 sublevel decays at that same total
    rate, so no extra multiplicity factor appears.
    """
    x, _, z = position
    r_sq = (np.asarray(x) - drive.axis_offset) ** 2 + np.asarray(z) ** 2
    intensity = drive.peak_intensity * np.exp(-2.0 * r_sq / drive.waist ** 2)
    omega = TWO_PI * c / constants.WAVELENGTH_GREEN
    d_sq = (3.0 * math.pi * epsilon_0 * hbar * c ** 3
            * 2.0 * scheme.gamma_P1 / omega ** 3)
    return 2.0 * intensity * d_sq / (c * epsilon_0 * hbar ** 2)


def _drive_fractions(polarization: Polarization):
    """Intensity fraction of the drive in each spherical component q."""
    if polarization is Polarization.LINEAR_Y:
        return {+1: 0.5, -1: 0.5}
    return {polarization.q: 1.0}


def _cavity_couplings(e2: int):
    """Cavity-coupled transitions of an excited sublevel: a list of
    (mode q, squared weight, ground m2)."""
    out = []
    for q in (+1, -1):
        g2 = e2 - 2 * q
        if abs(g2) == 1:
            out.append((q, float(constants.EXCITATION_WEIGHTS[(g2, q)]), g2))
    return out


# ---------------------------------------------------------------------------
# full model


def _fock_ops(n_max: int):
    n_ph = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, n_ph)), k=1)
    return a, np.eye(n_ph)


def _embed(atom_op, plus_op, minus_op):
    return np.kron(atom_op, np.kron(plus_op, minus_op))


def _atom_proj(i, j):
    op = np.zeros((N_ATOM, N_ATOM))
    op[i, j] = 1.0
    return op


def build_hamiltonian(scheme: LevelScheme, cavity: CavityParams,
                      drive: BeamParams, shifts: ShiftResult,
                      excitation_detuning: float, position=(0.0, 0.0, 0.0),
                      n_max: int = 2) -> np.ndarray:
    """Rotating-frame Hamiltonian (rad/s) on the atom x Fock^2 space.

    Terms: diagonal light shifts minus the common excitation detuning on
    the excited sublevels, weighted Jaynes-Cummings coupling of each
    sigma+/- transition to its cavity mode evaluated at `position`, and the
    classical drive split into its spherical components.  The cavity modes
    are taken resonant with the drive frequency (the experiment locks them
    together), so no bare photon term appears.
    """
    if n_max < 1:
        raise ModelError(f"Fock truncation n_max must be >= 1, got {n_max}")
    a, i_ph = _fock_ops(n_max)
    dim = N_ATOM * (n_max + 1) ** 2
    h = np.zeros((dim, dim), dtype=complex)

    delta_rad = TWO_PI * excitation_detuning
    shift_rad = {3: TWO_PI * shifts.delta_32, 1: TWO_PI * shifts.delta_12}
    for e2, idx in EXCITED_INDEX.items():
        h += (shift_rad[abs(e2)] - delta_rad) * _embed(
            _atom_proj(idx, idx), i_ph, i_ph)

    g_here = float(coupling_at(position, cavity))
    for e2, e_idx in EXCITED_INDEX.items():
        for q, w, g2 in _cavity_couplings(e2):
            raise_op = _atom_proj(e_idx, GROUND_INDEX[g2])
            amp = g_here * math.sqrt(w)
            if q == +1:
                term = _embed(raise_op, a, i_ph)
            else:
                term = _embed(raise_op, i_ph, a)
            h += amp * (term + term.conj().T)

    om_sq = float(drive_rabi_sq(position, drive, scheme))
    for q, frac in _drive_fractions(drive.polarization).items():
        om_q = math.sqrt(frac * om_sq)
        for g2, g_idx in GROUND_INDEX.items():
            e2 = g2 + 2 * q
            if abs(e2) > 3:
                continue
            w = float(constants.EXCITATION_WEIGHTS[(g2, q)])
            term = 0.5 * om_q * math.sqrt(w) * _embed(
                _atom_proj(EXCITED_INDEX[e2], g_idx), i_ph, i_ph)
            h += term + term.conj().T
    return h


@dataclass
class LindbladGenerator:
    """Sparse Liouvillian acting on column-stacked density matrices."""

    h: np.ndarray
    collapse_ops: tuple
    n_max: int
    liouvillian: sp.csr_matrix = field(repr=False, default=None)

    @classmethod
    def from_operators(cls, h, collapse_ops, n_max):
        gen = cls(h=np.asarray(h, dtype=complex),
                  collapse_ops=tuple(collapse_ops), n_max=n_max)
        gen._assemble()
        return gen

    def _assemble(self):
        dim = self.h.shape[0]
        if self.h.shape != (dim, dim):
            raise ModelError("Hamiltonian must be square")
        ident = sp.identity(dim, format="csr")
        h_s = sp.csr_matrix(self.h)
        lio = -1j * (sp.kron(ident, h_s) - sp.kron(h_s.T, ident))
        for _, op in self.collapse_ops:
            c_s = sp.csr_matrix(op)
            cdc = (c_s.conj().T @ c_s).tocsr()
            lio = lio + sp.kron(c_s.conj(), c_s) \
                - 0.5 * sp.kron(ident, cdc) \
                - 0.5 * sp.kron(cdc.T, ident)
        self.liouvillian = lio.tocsr()

    @property
    def dim(self):
        return self.h.shape[0]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """d rho / dt for a density matrix given as a square array."""
        vec = self.liouvillian @ rho.flatten(order="F")
        return vec.reshape(rho.shape, order="F")


def build_lindblad(h: np.ndarray, scheme: LevelScheme,
                   cavity: CavityParams) -> LindbladGenerator:
    """Attach the dissipative channels to a Hamiltonian.

    Channels: photon loss of each cavity mode at 2*kappa, and free-space
    decay of every excited sublevel at 2*gamma split across its branching
    table.  The Fock truncation is inferred from the Hamiltonian dimension.
    """
    dim = h.shape[0]
    n_ph_sq, rem = divmod(dim, N_ATOM)
    n_ph = int(round(math.sqrt(n_ph_sq)))
    if rem or n_ph * n_ph != n_ph_sq or n_ph < 2:
        raise ModelError(f"Hamiltonian dimension {dim} is not 6 * n_ph^2")
    n_max = n_ph - 1
    a, i_ph = _fock_ops(n_max)

    collapse = [
        ("cavity_sigma_plus", math.sqrt(2.0 * cavity.kappa)
         * _embed(np.eye(N_ATOM), a, i_ph)),
        ("cavity_sigma_minus", math.sqrt(2.0 * cavity.kappa)
         * _embed(np.eye(N_ATOM), i_ph, a)),
    ]
    for e2, branches in constants.DECAY_BRANCHES.items():
        e_idx = EXCITED_INDEX[e2]
        for g2, q, frac in branches:
            op = _embed(_atom_proj(GROUND_INDEX[g2], e_idx), i_ph, i_ph)
            rate = 2.0 * cavity.gamma * float(frac)
            collapse.append((f"decay_m{e2:+d}_q{q:+d}", math.sqrt(rate) * op))
    return LindbladGenerator.from_operators(h, collapse, n_max)


@dataclass
class SystemState:
    """Density matrix plus the dimension metadata needed to interpret it."""

    rho: np.ndarray
    n_max: int

    @property
    def dims(self):
        return (N_ATOM, self.n_max + 1, self.n_max + 1)

    @property
    def dim(self):
        return N_ATOM * (self.n_max + 1) ** 2

    def validate(self, herm_tol=1e-10, trace_tol=1e-10, eig_floor=-1e-8):
        if self.rho.shape != (self.dim, self.dim):
            raise ModelError("density matrix shape does not match metadata")
        herm = np.max(np.abs(self.rho - self.rho.conj().T))
        if herm > herm_tol:
            raise NumericalError(f"Hermiticity violation {herm:.2e}")
        tr = np.trace(self.rho).real
        if abs(tr - 1.0) > trace_tol:
            raise NumericalError(f"trace deviates from 1 by {tr - 1.0:.2e}")
        min_eig = float(np.linalg.eigvalsh(self.rho)[0])
        if min_eig < eig_floor:
            raise NumericalError(f"negative eigenvalue {min_eig:.2e}")
        return self

    def _mode_number_op(self, mode: int):
        n_ph = self.n_max + 1
        n_op = np.diag(np.arange(n_ph, dtype=float))
        i_ph = np.eye(n_ph)
        ops = [n_op, i_ph] if mode == 0 else [i_ph, n_op]
        return _embed(np.eye(N_ATOM), *ops)

    def photon_number(self, mode: int) -> float:
        """<a^dag a> of mode 0 (sigma+) or 1 (sigma-)."""
        return float(np.trace(self._mode_number_op(mode) @ self.rho).real)

    def atom_populations(self) -> np.ndarray:
        """Populations of the six atomic levels, traced over the field."""
        n_ph_sq = (self.n_max + 1) ** 2
        blocks = self.rho.reshape(N_ATOM, n_ph_sq, N_ATOM, n_ph_sq)
        return np.einsum("ikik->i", blocks).real

    def ground_populations(self):
        pops = self.atom_populations()
        return float(pops[GROUND_INDEX[+1]]), float(pops[GROUND_INDEX[-1]])


def ground_vacuum_state(n_max: int, p_up: float = 0.5) -> SystemState:
    """Spin mixture in the ground state with both modes in vacuum."""
    dim = N_ATOM * (n_max + 1) ** 2
    rho = np.zeros((dim, dim), dtype=complex)
    n_ph_sq = (n_max + 1) ** 2
    rho[GROUND_INDEX[+1] * n_ph_sq, GROUND_INDEX[+1] * n_ph_sq] = p_up
    rho[GROUND_INDEX[-1] * n_ph_sq, GROUND_INDEX[-1] * n_ph_sq] = 1.0 - p_up
    return SystemState(rho=rho, n_max=n_max)


def steady_state(generator: LindbladGenerator,
                 initial_state: SystemState | None = None,
                 residual_tol: float = 1e-9) -> SystemState:
    """Stationary state of the generator.

    Without light there is no process connecting the two ground spin
    states, the stationary manifold is degenerate, and the physical answer
    depends on history: in that case the ground-sector populations of
    `initial_state` (default: an even mixture) are preserved.  Otherwise
    the unique null vector is found by a direct sparse solve with the trace
    constraint replacing one row.
    """
    lio = generator.liouvillian
    dim = generator.dim
    n_max = generator.n_max

    # degenerate dark manifold: both ground-vacuum states stationary
    scale = max(abs(lio).max(), 1.0)
    dark_resid = []
    for p_up in (1.0, 0.0):
        cand = ground_vacuum_state(n_max, p_up=p_up).rho.flatten(order="F")
        dark_resid.append(np.max(np.abs(lio @ cand)))
    if max(dark_resid) < 1e-12 * scale:
        if initial_state is None:
            return ground_vacuum_state(n_max)
        p_up, p_dn = initial_state.ground_populations()
        total = p_up + p_dn
        p = 0.5 if total <= 0 else p_up / total
        return ground_vacuum_state(n_max, p_up=p)

    a_mat = lio.tolil(copy=True)
    trace_row = np.zeros(dim * dim)
    trace_row[(np.arange(dim)) * (dim + 1)] = 1.0
    a_mat[0, :] = trace_row
    b = np.zeros(dim * dim, dtype=complex)
    b[0] = 1.0
    try:
        x = spla.spsolve(a_mat.tocsc(), b)
    except Exception as exc:  # singular factorization and friends
        raise NumericalError(f"steady-state solve failed: {exc}") from exc

    rho = x.reshape((dim, dim), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if not np.isfinite(tr) or abs(tr) < 1e-12:
        raise NumericalError("steady-state solve returned an unusable state")
    rho = rho / tr
    residual = np.max(np.abs(lio @ rho.flatten(order="F"))) / scale
    if not residual < residual_tol:
        raise NumericalError(
            f"steady-state residual {residual:.3e} exceeds {residual_tol:.1e}")
    return SystemState(rho=rho, n_max=n_max)


def evolve(rho0: SystemState, generator: LindbladGenerator,
           t: float) -> SystemState:
    """Propagate rho0 for a time t (s) under the generator."""
    if t < 0:
        raise ConfigError(f"evolution time must be >= 0, got {t}")
    if rho0.rho.shape[0] != generator.dim:
        raise ModelError("state and generator dimensions differ")
    if t == 0.0:
        return SystemState(rho=rho0.rho.copy(), n_max=rho0.n_max)
    vec = rho0.rho.flatten(order="F").astype(complex)
    try:
        out = spla.expm_multiply(generator.liouvillian * t, vec)
    except Exception as exc:
        raise NumericalError(f"time propagation failed: {exc}") from exc
    if not np.all(np.isfinite(out)):
        raise NumericalError("time propagation produced non-finite entries")
    return SystemState(rho=out.reshape((generator.dim,) * 2, order="F"),
                       n_max=generator.n_max)


# ---------------------------------------------------------------------------
# adiabatic elimination


def adiabatic_rates(spin: str, excitation_detuning: float, position,
                    shifts: ShiftResult, scheme: LevelScheme,
                    cavity: CavityParams, drive: BeamParams) -> EmissionRates:
    """Closed-form polarization-resolved rates for one ground spin state.

    Per driven channel e the excited population is the saturated Lorentzian
        p_e = (Omega_e^2/4) / (Delta_e^2 + gamma_tot^2 + Omega_e^2/2),
    with Delta_e the drive detuning from the *shifted* sublevel and
    gamma_tot = gamma + sum over coupled modes of g^2 w / kappa (the cavity
    back-action that also produces the Purcell-enhanced emission
    2 g^2 w / kappa * p_e into each mode).  At weak drive this reduces to
    the linear Lorentzian used in the steady-state cross-check; the
    saturation term is what keeps p_e physical at the reference drive
    power, which is far above saturation.

    Accepts numpy arrays in `position` and in the ShiftResult fields, in
    which case the returned rate fields are arrays (used by the transit
    sampler); scalars in, scalars out.
    """
    if spin not in ("up", "down"):
        raise ValueError(f"spin must be 'up' or 'down', got {spin!r}")
    g2_spin = +1 if spin == "up" else -1

    g_sq = coupling_at(position, cavity) ** 2
    om_tot_sq = drive_rabi_sq(position, drive, scheme)
    delta_rad = TWO_PI * excitation_detuning
    shift_rad = {3: TWO_PI * np.asarray(shifts.delta_32),
                 1: TWO_PI * np.asarray(shifts.delta_12)}
    gamma = cavity.gamma
    kappa = cavity.kappa

    zeros = np.zeros_like(g_sq + om_tot_sq, dtype=float)
    rate_plus, rate_minus = zeros.copy(), zeros.copy()
    flip, free = zeros.copy(), zeros.copy()

    for q, frac_q in _drive_fractions(drive.polarization).items():
        e2 = g2_spin + 2 * q
        if abs(e2) > 3:
            continue
        w_exc = float(constants.EXCITATION_WEIGHTS[(g2_spin, q)])
        om_e_sq = om_tot_sq * frac_q * w_exc
        cav = _cavity_couplings(e2)
        gamma_tot = gamma + g_sq * sum(w for (_, w, _) in cav) / kappa
        det_e = delta_rad - shift_rad[abs(e2)]
        p_e = (0.25 * om_e_sq) / (det_e ** 2 + gamma_tot ** 2
                                  + 0.5 * om_e_sq)
        for q_mode, w_cav, g2_final in cav:
            r = 2.0 * g_sq * w_cav / kappa * p_e
            if q_mode == +1:
                rate_plus = rate_plus + r
            else:
                rate_minus = rate_minus + r
            if g2_final != g2_spin:
                flip = flip + r
        free = free + 2.0 * gamma * p_e
        for g2_final, _, b_frac in constants.DECAY_BRANCHES[e2]:
            if g2_final != g2_spin:
                flip = flip + 2.0 * gamma * float(b_frac) * p_e

    ok = bool(np.all(np.sqrt(g_sq) < kappa))
    if np.ndim(rate_plus) == 0:
        return EmissionRates(float(rate_plus), float(rate_minus),
                             float(flip), float(free), ok)
    return EmissionRates(rate_plus, rate_minus, flip, free, ok)
