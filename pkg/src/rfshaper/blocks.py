"""Complex transfer functions of the passive building blocks.

Conventions used throughout the package:

* Phase delays multiply the field by ``exp(-1j*phi)``; a positive phase
  setting therefore retards the wave.
* Frequencies are offsets from the optical carrier in GHz.  A delay
  element of equivalent free spectral range ``fsr`` contributes
  ``exp(-1j*2*pi*offset/fsr)``; the enormous absolute carrier phase is a
  common factor on every path and is dropped.
* Loss figures are power dB, so field amplitudes use a ``/20`` exponent.

All functions are pure and accept either scalar offsets or NumPy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT_M_PER_S
from .errors import ConfigurationError, DomainError, SingularityError

_TWO_PI = 2.0 * math.pi


def _require_finite(name: str, *values) -> None:
    for v in values:
        if not np.all(np.isfinite(v)):
            raise DomainError(f"{name}: non-finite value {v!r}")


# ---------------------------------------------------------------------------
# parameter records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WaveguideParams:
    """A piece of bus waveguide.

    ``optical_path_length`` is the group path n_g*L in metres and fixes the
    frequency dependence of the phase; the two loss fields fix the
    amplitude factor ``gamma = 10**(-loss_db_per_cm*physical_length_cm/20)``.
    """

    optical_path_length: float
    loss_db_per_cm: float = 0.0
    physical_length_cm: float = 0.0

    def __post_init__(self):
        _require_finite("WaveguideParams", self.optical_path_length,
                        self.loss_db_per_cm, self.physical_length_cm)
        if self.optical_path_length <= 0:
            raise DomainError("optical_path_length must be > 0")
        if self.loss_db_per_cm < 0 or self.physical_length_cm < 0:
            raise DomainError("loss and length must be >= 0")

    @property
    def gamma(self) -> float:
        return amplitude_from_db_loss(self.loss_db_per_cm, self.physical_length_cm)

    @property
    def fsr_equivalent_ghz(self) -> float:
        """FSR of a unit delay with this group path (GHz)."""
        return SPEED_OF_LIGHT_M_PER_S / self.optical_path_length / 1e9

    @classmethod
    def from_fsr(cls, fsr_ghz: float, loss_db_per_cm: float = 0.0,
                 physical_length_cm: float = 0.0) -> "WaveguideParams":
        """Build the waveguide whose delay has the given equivalent FSR."""
        if not (fsr_ghz > 0):
            raise DomainError("fsr_ghz must be > 0")
        return cls(SPEED_OF_LIGHT_M_PER_S / (fsr_ghz * 1e9),
                   loss_db_per_cm, physical_length_cm)


@dataclass(frozen=True)
class PhaseShifterState:
    """A thermo-optic phase shifter setting.

    When built from a heater power the phase follows the linear model
    ``phase = pi * power / p_pi`` (see :func:`heater_phase_from_power`).
    """

    phase_rad: float
    heater_power_mw: float | None = None

    def __post_init__(self):
        _require_finite("PhaseShifterState", self.phase_rad)

    @classmethod
    def from_power(cls, power_mw: float, p_pi_mw: float) -> "PhaseShifterState":
        return cls(heater_phase_from_power(power_mw, p_pi_mw), power_mw)


@dataclass(frozen=True)
class RingParams:
    """A ring resonator, parametrised by FSR rather than physical length.

    ``kappa`` is the power coupling of the bus coupler; ``kappa_drop``
    (add-drop rings only) that of the second coupler.  The round-trip
    field amplitude and the resonance offset from the grid origin complete
    the description.
    """

    fsr_ghz: float
    kappa: float
    kappa_drop: float | None = None
    round_trip_amplitude: float = 1.0
    detune_ghz: float = 0.0

    def __post_init__(self):
        _require_finite("RingParams", self.fsr_ghz, self.kappa,
                        self.round_trip_amplitude, self.detune_ghz)
        if not (self.fsr_ghz > 0):
            raise DomainError("fsr_ghz must be > 0")
        if not (0.0 <= self.kappa <= 1.0):
            raise DomainError(f"kappa out of range [0,1]: {self.kappa}")
        if self.kappa_drop is not None and not (0.0 <= self.kappa_drop <= 1.0):
            raise DomainError(f"kappa_drop out of range [0,1]: {self.kappa_drop}")
        if not (0.0 < self.round_trip_amplitude <= 1.0):
            raise DomainError("round_trip_amplitude must be in (0,1]")

    @property
    def self_coupling(self) -> float:
        return math.sqrt(1.0 - self.kappa)

    @property
    def self_coupling_drop(self) -> float:
        if self.kappa_drop is None:
            raise ConfigurationError("ring has no drop coupler (kappa_drop unset)")
        return math.sqrt(1.0 - self.kappa_drop)


@dataclass(frozen=True)
class TransferMatrix2x2:
    """Transfer matrix of a 2-input/2-output element.

    Entry ``mij`` maps input port j to output port i.
    """

    m00: complex
    m01: complex
    m10: complex
    m11: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.m00, self.m01], [self.m10, self.m11]])

    def unitarity_defect(self) -> float:
        m = self.as_array()
        return float(np.max(np.abs(m @ m.conj().T - np.eye(2))))


@dataclass(frozen=True)
class FrequencyGrid:
    """Optical frequency grid: a carrier plus sorted offsets in GHz."""

    center_thz: float
    offsets_ghz: np.ndarray

    def __post_init__(self):
        offs = np.asarray(self.offsets_ghz, dtype=float)
        object.__setattr__(self, "offsets_ghz", offs)
        _require_finite("FrequencyGrid", self.center_thz)
        if offs.ndim != 1 or offs.size == 0:
            raise DomainError("offsets_ghz must be a non-empty 1-D array")
        if not np.all(np.isfinite(offs)):
            raise DomainError("offsets_ghz must be finite")
        if offs.size > 1 and not np.all(np.diff(offs) > 0):
            raise DomainError("offsets_ghz must be strictly increasing")

    @classmethod
    def sweep(cls, lo_ghz: float, hi_ghz: float, step_ghz: float,
              center_thz: float = 193.4) -> "FrequencyGrid":
        """Uniform grid from lo to hi inclusive (within half a step)."""
        if not (step_ghz > 0 and hi_ghz > lo_ghz):
            raise DomainError("need step > 0 and hi > lo")
        n = int(round((hi_ghz - lo_ghz) / step_ghz))
        offs = lo_ghz + step_ghz * np.arange(n + 1)
        return cls(center_thz, offs)

    def __len__(self) -> int:
        return int(self.offsets_ghz.size)


# ---------------------------------------------------------------------------
# scalar building-block responses
# ---------------------------------------------------------------------------


def z_inverse(offset_ghz, fsr_ghz: float):
    """Unit delay phasor ``exp(-1j*2*pi*offset/fsr)`` (built from its angle)."""
    _require_finite("z_inverse", offset_ghz, fsr_ghz)
    if not (fsr_ghz > 0):
        raise DomainError("fsr_ghz must be > 0")
    ang = _TWO_PI * np.asarray(offset_ghz, dtype=float) / fsr_ghz
    out = np.cos(ang) - 1j * np.sin(ang)
    return complex(out) if np.isscalar(offset_ghz) else out


def amplitude_from_db_loss(loss_db_per_cm: float, length_cm: float) -> float:
    """Field amplitude factor for a power loss quoted in dB/cm."""
    _require_finite("amplitude_from_db_loss", loss_db_per_cm, length_cm)
    if loss_db_per_cm < 0 or length_cm < 0:
        raise DomainError("loss and length must be >= 0")
    return 10.0 ** (-loss_db_per_cm * length_cm / 20.0)


def h_waveguide(offset_ghz, params: WaveguideParams,
                fsr_equivalent_ghz: float | None = None):
    """Bus waveguide response ``gamma * z^-1``.

    The delay's equivalent FSR defaults to the one implied by the
    parameters' group path; passing it explicitly overrides that.
    """
    fsr = params.fsr_equivalent_ghz if fsr_equivalent_ghz is None else fsr_equivalent_ghz
    return params.gamma * z_inverse(offset_ghz, fsr)


def h_phase_shifter(phase_rad: float) -> complex:
    """Pure phase delay ``exp(-1j*phi)``."""
    _require_finite("h_phase_shifter", phase_rad)
    return complex(math.cos(phase_rad), -math.sin(phase_rad))


def h_coupler_3db() -> TransferMatrix2x2:
    """Ideal 3-dB directional coupler."""
    a = math.sqrt(0.5)
    return TransferMatrix2x2(a, -1j * a, -1j * a, a)


def h_tunable_coupler(phase_rad: float) -> TransferMatrix2x2:
    """Balanced-MZI tunable coupler: two 3-dB couplers around a phase arm.

    Bar amplitude is ``0.5*(1 - exp(-1j*phi))`` (power ``sin^2(phi/2)``)
    and carries a phase ``pi/2 - phi/2`` that rotates with the setting;
    this parasitic rotation is deliberate and must be compensated
    downstream when pure amplitude control is wanted.
    """
    _require_finite("h_tunable_coupler", phase_rad)
    e = complex(math.cos(phase_rad), -math.sin(phase_rad))
    bar = 0.5 * (1.0 - e)
    cross = -0.5j * (1.0 + e)
    return TransferMatrix2x2(bar, cross, cross, -bar)


def _round_trip_phasor(offset_ghz, params: RingParams):
    ang = _TWO_PI * (np.asarray(offset_ghz, dtype=float) - params.detune_ghz) / params.fsr_ghz
    return params.round_trip_amplitude * (np.cos(ang) - 1j * np.sin(ang))


def h_ring_allpass(offset_ghz, params: RingParams):
    """All-pass ring through-port response ``(c - p)/(1 - c*p)``.

    ``p`` is the full round-trip phasor (loss times delay) and ``c`` the
    bus self-coupling.
    """
    _require_finite("h_ring_allpass", offset_ghz)
    c = params.self_coupling
    if c * params.round_trip_amplitude >= 1.0 - 1e-15:
        raise SingularityError(
            "c * round_trip_amplitude == 1: lossless uncoupled ring is singular")
    p = _round_trip_phasor(offset_ghz, params)
    out = (c - p) / (1.0 - c * p)
    return complex(out) if np.isscalar(offset_ghz) else out


def h_ring_adddrop(offset_ghz, params: RingParams):
    """Add-drop ring (through, drop) responses.

    Symmetric two-coupler form; the drop path crosses half the ring, so it
    carries half the round-trip loss and phase.
    """
    _require_finite("h_ring_adddrop", offset_ghz)
    if params.kappa_drop is None:
        raise ConfigurationError("add-drop ring requires kappa_drop")
    c1 = params.self_coupling
    c2 = params.self_coupling_drop
    s1 = math.sqrt(params.kappa)
    s2 = math.sqrt(params.kappa_drop)
    g = params.round_trip_amplitude
    if c1 * c2 * g >= 1.0 - 1e-15:
        raise SingularityError("c1 * c2 * round_trip_amplitude == 1 is singular")
    p = _round_trip_phasor(offset_ghz, params)
    half_ang = math.pi / params.fsr_ghz
    ang = half_ang * (np.asarray(offset_ghz, dtype=float) - params.detune_ghz)
    p_half = math.sqrt(g) * (np.cos(ang) - 1j * np.sin(ang))
    den = 1.0 - c1 * c2 * p
    through = (c1 - c2 * p) / den
    drop = (-s1 * s2 * p_half) / den
    if np.isscalar(offset_ghz):
        return complex(through), complex(drop)
    return through, drop


def heater_phase_from_power(power_mw: float, p_pi_mw: float) -> float:
    """Linear heater model: ``pi`` phase per ``p_pi_mw`` of heater power."""
    _require_finite("heater_phase_from_power", power_mw, p_pi_mw)
    if p_pi_mw <= 0:
        raise ConfigurationError("p_pi_mw must be > 0")
    if power_mw < 0:
        raise DomainError("power_mw must be >= 0")
    return math.pi * power_mw / p_pi_mw


def critical_coupling_kappa(round_trip_amplitude: float) -> float:
    """Power coupling that makes an all-pass ring critically coupled."""
    _require_finite("critical_coupling_kappa", round_trip_amplitude)
    if not (0.0 < round_trip_amplitude <= 1.0):
        raise DomainError("round_trip_amplitude must be in (0,1]")
    return 1.0 - round_trip_amplitude ** 2
