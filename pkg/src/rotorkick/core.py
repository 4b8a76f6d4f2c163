"""Dimensionless data model and operator matrices for a pulsed polar rigid rotor.

Everything downstream works in reduced units: pulse strength P, reduced
duration sigma, and the orienting parameter eta = P / sigma.  Physical
quantities (dipole moment, field strength, rotational constant, pulse
length) enter only through :func:`dimensionless_from_physical`.

The rotor is a polar linear rigid rotor restricted to the m = 0 manifold,
expanded in the free-rotor states |J, 0> for 0 <= J <= j_max.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

# Reduced Planck constant in J*s (CODATA 2018). Used only by the
# physical-units conversion; all simulation code is dimensionless.
HBAR_SI = 1.054571817e-34


@dataclass(frozen=True)
class PulseSpec:
    """Rectangular pulse in reduced units.

    strength : P >= 0, the kick strength (time-integrated coupling).
    sigma    : pulse duration in units of the rotational time scale, > 0.
    eta      : derived coupling P / sigma, never stored independently.
    """

    strength: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"pulse duration sigma must be > 0, got {self.sigma}")
        if self.strength < 0:
            raise ValueError(f"pulse strength P must be >= 0, got {self.strength}")

    @property
    def eta(self) -> float:
        return self.strength / self.sigma

    @classmethod
    def from_eta(cls, eta: float, sigma: float) -> "PulseSpec":
        return cls(strength=eta * sigma, sigma=sigma)


@dataclass(frozen=True)
class RotorBasis:
    """Truncated free-rotor basis {|J, 0> : 0 <= J <= j_max}."""

    j_max: int

    def __post_init__(self):
        if self.j_max < 1:
            raise ValueError(f"j_max must be >= 1, got {self.j_max}")

    @property
    def dim(self) -> int:
        return self.j_max + 1

    def j_values(self) -> np.ndarray:
        return np.arange(self.dim)


@dataclass
class Wavepacket:
    """Complex expansion coefficients C_J over a truncated rotor basis."""

    basis: RotorBasis
    coefficients: np.ndarray
    j0: int

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=np.complex128)
        if self.coefficients.shape != (self.basis.dim,):
            raise ValueError(
                f"coefficient vector has shape {self.coefficients.shape}, "
                f"expected ({self.basis.dim},)"
            )
        if not 0 <= self.j0 <= self.basis.j_max:
            raise ValueError(f"initial state J0={self.j0} outside basis (j_max={self.basis.j_max})")

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    @classmethod
    def pure(cls, basis: RotorBasis, j0: int) -> "Wavepacket":
        if not 0 <= j0 <= basis.j_max:
            raise ValueError(f"j0={j0} outside basis 0..{basis.j_max}")
        c = np.zeros(basis.dim, dtype=np.complex128)
        c[j0] = 1.0
        return cls(basis=basis, coefficients=c, j0=j0)


class MatrixKind(Enum):
    ANGULAR_MOMENTUM_SQUARED = "j2"
    COS_THETA = "cos"
    COS2_THETA = "cos2"
    HAMILTONIAN = "hamiltonian"


# Half-bandwidth of each operator in the |J,0> basis.
_BANDWIDTH = {
    MatrixKind.ANGULAR_MOMENTUM_SQUARED: 0,
    MatrixKind.COS_THETA: 1,
    MatrixKind.COS2_THETA: 2,
    MatrixKind.HAMILTONIAN: 1,
}


@dataclass(frozen=True)
class OperatorMatrix:
    """Real symmetric banded operator in the free-rotor basis.

    Stored dense (basis sizes stay small); the band structure is checked
    on construction, not exploited.
    """

    basis: RotorBasis
    kind: MatrixKind
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.float64)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"matrix shape {m.shape} does not match basis dim {self.basis.dim}")
        if not np.array_equal(m, m.T):
            raise ValueError("operator matrix must be exactly symmetric")
        bw = _BANDWIDTH[self.kind]
        i, j = np.indices(m.shape)
        if np.any(m[np.abs(i - j) > bw] != 0.0):
            raise ValueError(f"{self.kind.value} matrix has entries outside bandwidth {bw}")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def bandwidth(self) -> int:
        return _BANDWIDTH[self.kind]


def dimensionless_from_physical(dipole: float, field_strength: float,
                                rot_const: float, duration: float,
                                hbar: float = HBAR_SI) -> PulseSpec:
    """Convert physical pulse parameters to the reduced (P, sigma) pair.

    Units must be consistent: ``dipole * field_strength`` and ``rot_const``
    in the same energy unit, ``duration`` in the matching time unit, and
    ``hbar`` in (energy * time).  The default ``hbar`` assumes SI (joules
    and seconds); pass ``hbar=1`` for units where it is absorbed.

    Returns PulseSpec with sigma = rot_const * duration / hbar and
    P = eta * sigma where eta = dipole * field_strength / rot_const.
    """
    if field_strength <= 0 or rot_const <= 0 or duration <= 0 or hbar <= 0:
        raise ValueError("field strength, rotational constant, duration and hbar must be > 0")
    if dipole < 0:
        raise ValueError("dipole magnitude must be >= 0")
    sigma = rot_const * duration / hbar
    eta = dipole * field_strength / rot_const
    return PulseSpec(strength=eta * sigma, sigma=sigma)


def build_j2_matrix(basis: RotorBasis) -> OperatorMatrix:
    """Angular momentum squared: diagonal J(J+1)."""
    j = basis.j_values().astype(np.float64)
    return OperatorMatrix(basis=basis, kind=MatrixKind.ANGULAR_MOMENTUM_SQUARED,
                          entries=np.diag(j * (j + 1)))


def _cos_superdiagonal(j_max: int) -> np.ndarray:
    """<J,0|cos(theta)|J+1,0> for J = 0 .. j_max-1."""
    j = np.arange(j_max, dtype=np.float64)
    return np.sqrt((j + 1) ** 2 / ((2 * j + 3) * (2 * j + 1)))


def _cos_dense(j_max: int) -> np.ndarray:
    band = _cos_superdiagonal(j_max)
    return np.diag(band, 1) + np.diag(band, -1)


def build_cos_matrix(basis: RotorBasis) -> OperatorMatrix:
    """cos(theta): symmetric tridiagonal with zero diagonal (Delta J = +-1)."""
    return OperatorMatrix(basis=basis, kind=MatrixKind.COS_THETA,
                          entries=_cos_dense(basis.j_max))


def build_cos2_matrix(basis: RotorBasis) -> OperatorMatrix:
    """cos^2(theta): symmetric pentadiagonal (Delta J = 0, +-2).

    Built by squaring the cos(theta) matrix on a basis enlarged by one
    level and truncating back, so the (j_max, j_max) diagonal entry is not
    corrupted by truncation.  Exact in the m = 0 manifold.
    """
    padded = _cos_dense(basis.j_max + 1)
    sq = (padded @ padded)[: basis.dim, : basis.dim]
    sq = 0.5 * (sq + sq.T)  # symmetrize away rounding asymmetry
    # The product of tridiagonals is exactly pentadiagonal; zero the
    # round-off outside the band so the band invariant holds bit-exactly.
    i, j = np.indices(sq.shape)
    sq[np.abs(i - j) > 2] = 0.0
    return OperatorMatrix(basis=basis, kind=MatrixKind.COS2_THETA, entries=sq)


def build_hamiltonian(basis: RotorBasis, pulse: PulseSpec) -> OperatorMatrix:
    """During-pulse Hamiltonian in reduced time: sigma * J^2 - P * cos(theta).

    (eta * sigma = P, so the off-diagonal band is P times the cos band.)
    """
    j = basis.j_values().astype(np.float64)
    h = np.diag(pulse.sigma * j * (j + 1)) - pulse.strength * _cos_dense(basis.j_max)
    return OperatorMatrix(basis=basis, kind=MatrixKind.HAMILTONIAN, entries=h)
