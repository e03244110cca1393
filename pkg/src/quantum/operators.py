"""Single-qubit matrices used by honest provers and the extraction circuit."""

import numpy as np

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def xz_plane_observable(angle: float) -> np.ndarray:
    """cos(angle)·X + sin(angle)·Z: X at 0, (X+Z)/√2 at π/4, Z at π/2, (X−Z)/√2 at −π/4."""
    return np.cos(angle) * PAULI_X + np.sin(angle) * PAULI_Z


for _matrix in (IDENTITY, PAULI_X, PAULI_Z, HADAMARD):
    _matrix.setflags(write=False)
