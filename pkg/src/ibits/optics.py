"""Two-mode linear optics on the fixed-photon-number Fock block.

A beam splitter conserves the total photon number N, so its action on the
two-mode Fock space splits into (N+1)-dimensional blocks.  Basis state i of a
block is |i, N-i> with i photons in mode a (the mode the phase shifter acts
on), i ascending.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import QuantumChannel, channel_from_kraus
from .errors import CapacityError, ValidationError
from .gates import pauli_z
from .matrixcore import is_unitary

__all__ = [
    "PHOTON_LIMIT",
    "FockUnitary",
    "bs_unitary",
    "phase_shifter",
    "mz_unitary",
    "mz_phase_error_channel",
]

# Binomial factors are evaluated through log-Gamma in double precision; the
# cap keeps their roundoff well below the 1e-9 comparisons used everywhere.
PHOTON_LIMIT = 30


@dataclass(frozen=True, eq=False)
class FockUnitary:
    """Unitary on the total-photon-number-N block, dimension N+1."""

    photons: int
    matrix: np.ndarray


def _make_fock(photons: int, matrix: np.ndarray) -> FockUnitary:
    if not is_unitary(matrix, 1e-9):
        raise ValidationError("constructed Fock-block operator failed the unitarity check")
    return FockUnitary(photons=photons, matrix=matrix)


def _check_photons(photons: int) -> None:
    if photons < 1:
        raise ValidationError(f"photon count must be >= 1, got {photons}")
    if photons > PHOTON_LIMIT:
        raise CapacityError(f"photon count {photons} exceeds the cap {PHOTON_LIMIT}")


def bs_unitary(photons: int, theta: float) -> FockUnitary:
    """Beam splitter of mixing angle theta on the N-photon block.

    Matrix element (i, m):

        sqrt(i! (N-i)! / (m! (N-m)!)) *
        sum_l  C(m, l) C(N-m, N-i-l) (-1)^l cos^(m+N-i-2l) sin^(i-m+2l)

    with l running from max(m-i, 0) to min(N-i, m).  For one photon this is
    the plane rotation [[cos, -sin], [sin, cos]].
    """
    _check_photons(photons)
    n = photons
    c, s = math.cos(theta), math.sin(theta)
    lg = math.lgamma
    m = np.zeros((n + 1, n + 1), dtype=np.complex128)
    for i in range(n + 1):
        for col in range(n + 1):
            pref = 0.5 * (lg(i + 1) + lg(n - i + 1) - lg(col + 1) - lg(n - col + 1))
            total = 0.0
            for l in range(max(col - i, 0), min(n - i, col) + 1):
                log_binoms = (
                    lg(col + 1) - lg(l + 1) - lg(col - l + 1)
                    + lg(n - col + 1) - lg(n - i - l + 1) - lg(i - col + l + 1)
                )
                total += (
                    (-1.0) ** l
                    * math.exp(pref + log_binoms)
                    * c ** (col + n - i - 2 * l)
                    * s ** (i - col + 2 * l)
                )
            m[i, col] = total
    return _make_fock(n, m)


def phase_shifter(photons: int, phi: float) -> FockUnitary:
    """Mode-a phase shift: basis state i (i photons in mode a) gains e^{i phi i}."""
    _check_photons(photons)
    d = np.exp(1j * phi * np.arange(photons + 1))
    return _make_fock(photons, np.diag(d))


def mz_unitary(photons: int, theta: float, phi: float) -> FockUnitary:
    """Mach-Zehnder interferometer: bs(theta) . phase(phi) . bs(theta)^dag."""
    bs = bs_unitary(photons, theta).matrix
    ps = phase_shifter(photons, phi).matrix
    return _make_fock(photons, bs @ ps @ bs.conj().T)


def mz_phase_error_channel(theta: float, phi: float, p: float) -> QuantumChannel:
    """Single-photon Mach-Zehnder with a phase error inside the interferometer.

    With probability 1-p a sign flip hits the dual-rail qubit right after the
    phase shifter: Kraus set {sqrt(p) B P B^dag, sqrt(1-p) B Z P B^dag}.
    """
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"error probability must be in [0, 1], got {p}")
    bs = bs_unitary(1, theta).matrix
    ps = phase_shifter(1, phi).matrix
    bsd = bs.conj().T
    return channel_from_kraus(
        (
            math.sqrt(p) * (bs @ ps @ bsd),
            math.sqrt(1.0 - p) * (bs @ pauli_z() @ ps @ bsd),
        )
    )
