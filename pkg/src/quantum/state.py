"""
Exact dense pure-state simulation over a tensor product of local spaces.

Amplitude ordering: site 0 is the most significant index, i.e. the
amplitude vector is the C-order flattening of a tensor with shape
`local_dims`. All operations return new states; PureState is immutable.

Usage:
    from src.quantum.state import make_graph_state, measure, LocalObservable

    psi = make_graph_state(g)
    outcome, psi = measure(psi, LocalObservable(0, PAULI_X), rng)
"""

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence
import logging
import math

import numpy as np
import numpy.typing as npt

from src.core.config import (
    ALGEBRAIC_TOL,
    COLLAPSE_TOL,
    DIMENSION_CAP,
    PHYSICAL_TOL,
    QUBIT_CAP,
)
from src.core.errors import CapacityExceeded
from src.graph.lattice import Graph

logger = logging.getLogger(__name__)

ComplexVector = npt.NDArray[np.complex128]
ComplexMatrix = npt.NDArray[np.complex128]


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector over sites with dimensions `local_dims`."""

    local_dims: tuple[int, ...]
    amplitudes: ComplexVector

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.local_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"Local dimensions must be positive, got {dims}")
        amplitudes = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amplitudes.size != math.prod(dims):
            raise ValueError(
                f"Amplitude vector has length {amplitudes.size}, expected {math.prod(dims)}"
            )
        norm_sq = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm_sq - 1.0) > ALGEBRAIC_TOL:
            raise ValueError(f"State is not normalized (squared norm {norm_sq!r})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "local_dims", dims)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_vector(cls, local_dims: Sequence[int], vector: npt.ArrayLike) -> "PureState":
        """Normalize an arbitrary nonzero vector into a PureState."""
        vec = np.asarray(vector, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm < COLLAPSE_TOL:
            raise ValueError("Cannot normalize a zero vector")
        return cls(tuple(local_dims), vec / norm)

    @classmethod
    def product(cls, local_states: Sequence[npt.ArrayLike]) -> "PureState":
        """Tensor product of normalized local vectors, site 0 first."""
        vec = np.ones(1, dtype=np.complex128)
        dims = []
        for local in local_states:
            local = np.asarray(local, dtype=np.complex128).reshape(-1)
            vec = np.kron(vec, local)
            dims.append(local.size)
        return cls(tuple(dims), vec)

    @property
    def num_sites(self) -> int:
        return len(self.local_dims)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.local_dims)

    def __repr__(self) -> str:
        return f"PureState(local_dims={self.local_dims})"


@dataclass(frozen=True, eq=False)
class LocalObservable:
    """A ±1-valued observable (Hermitian involution) acting on one site."""

    site: int
    matrix: ComplexMatrix

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Observable on site {self.site} must be square, got {matrix.shape}")
        if not np.allclose(matrix, matrix.conj().T, atol=ALGEBRAIC_TOL, rtol=0):
            raise ValueError(f"Observable on site {self.site} is not Hermitian")
        if not np.allclose(matrix @ matrix, np.eye(matrix.shape[0]), atol=ALGEBRAIC_TOL, rtol=0):
            raise ValueError(f"Observable on site {self.site} does not square to identity")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalue_signs(self) -> set[int]:
        """Which of ±1 actually occur in the spectrum."""
        eigs = np.linalg.eigvalsh(self.matrix)
        return {1 if e > 0 else -1 for e in eigs}


@dataclass(frozen=True)
class SettingOperator:
    """sign · ⊗_v factors[v]; vertices without a factor act as identity."""

    factors: Mapping[int, LocalObservable]
    sign: int = 1

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"Sign must be ±1, got {self.sign}")
        for site, obs in self.factors.items():
            if obs.site != site:
                raise ValueError(f"Factor keyed by {site} acts on site {obs.site}")


def _check_site(state: PureState, site: int) -> None:
    if not 0 <= site < state.num_sites:
        raise ValueError(f"Site {site} out of range for state with {state.num_sites} sites")


def apply_local(
    local_dims: Sequence[int], vector: ComplexVector, site: int, matrix: npt.ArrayLike
) -> ComplexVector:
    """Apply `matrix` on `site` of a raw (not necessarily normalized) vector."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.shape != (local_dims[site], local_dims[site]):
        raise ValueError(
            f"Matrix shape {matrix.shape} does not match site {site} of dimension {local_dims[site]}"
        )
    psi = vector.reshape(local_dims)
    moved = np.tensordot(matrix, psi, axes=([1], [site]))
    return np.moveaxis(moved, 0, site).reshape(-1)


def apply_operator(
    state: PureState, factors: Mapping[int, npt.ArrayLike], sign: complex = 1
) -> ComplexVector:
    """Raw vector sign · ⊗factors |ψ⟩; factors need not be Hermitian or unitary."""
    vec = np.array(state.amplitudes)
    for site, matrix in factors.items():
        _check_site(state, site)
        vec = apply_local(state.local_dims, vec, site, matrix)
    return sign * vec


def apply_word(state: PureState, word: Sequence[tuple[int, npt.ArrayLike]]) -> ComplexVector:
    """
    Apply an operator product written left to right, e.g. [(0, X), (0, Z)] is X0·Z0.

    The rightmost factor acts first.
    """
    vec = np.array(state.amplitudes)
    for site, matrix in reversed(word):
        _check_site(state, site)
        vec = apply_local(state.local_dims, vec, site, matrix)
    return vec


def make_graph_state(g: Graph, qubit_cap: int = QUBIT_CAP) -> PureState:
    """
    |G⟩ with amplitude 2^{-n/2}(-1)^{x·Ax/2} on basis string x.

    Raises:
        CapacityExceeded: If g has more vertices than the qubit cap
    """
    if g.n > qubit_cap:
        raise CapacityExceeded(f"Graph has {g.n} vertices, qubit cap is {qubit_cap}")

    index = np.arange(2**g.n, dtype=np.int64)
    parity = np.zeros_like(index)
    for u, v in g.edges:
        parity ^= (index >> (g.n - 1 - u)) & (index >> (g.n - 1 - v)) & 1
    amplitudes = np.where(parity == 1, -1.0, 1.0).astype(np.complex128) / np.sqrt(2.0**g.n)
    logger.debug(f"Prepared graph state for {g}")
    return PureState((2,) * g.n, amplitudes)


def expectation(state: PureState, op: SettingOperator) -> float:
    """
    sign · ⟨ψ| ⊗factors |ψ⟩ as a real number.

    Raises:
        ValueError: On dimension mismatch or a non-negligible imaginary part
    """
    matrices = {site: obs.matrix for site, obs in op.factors.items()}
    value = complex(np.vdot(state.amplitudes, apply_operator(state, matrices, op.sign)))
    if abs(value.imag) > PHYSICAL_TOL:
        raise ValueError(f"Expectation has imaginary part {value.imag!r}")
    return value.real


def project(state: PureState, obs: LocalObservable, outcome: int) -> tuple[float, Optional[PureState]]:
    """
    Probability of `outcome` and the collapsed state (I + outcome·M)/2 |ψ⟩.

    Returns (0.0, None) when the branch is empty.
    """
    if outcome not in (1, -1):
        raise ValueError(f"Outcome must be ±1, got {outcome}")
    _check_site(state, obs.site)
    flipped = apply_local(state.local_dims, np.array(state.amplitudes), obs.site, obs.matrix)
    branch = (state.amplitudes + outcome * flipped) / 2
    probability = float(np.vdot(branch, branch).real)
    if probability < COLLAPSE_TOL:
        return 0.0, None
    return min(probability, 1.0), PureState(state.local_dims, branch / np.sqrt(probability))


def measure(state: PureState, obs: LocalObservable, rng: np.random.Generator) -> tuple[int, PureState]:
    """
    Projective ±1 measurement of `obs`, returning (outcome, collapsed state).

    Raises:
        ValueError: If the drawn branch has (numerically) zero norm
    """
    p_plus, collapsed_plus = project(state, obs, 1)
    outcome = 1 if rng.random() < p_plus else -1
    if outcome == 1:
        collapsed = collapsed_plus
    else:
        _, collapsed = project(state, obs, -1)
    if collapsed is None:
        raise ValueError(f"Attempted collapse onto an empty branch (outcome {outcome})")
    return outcome, collapsed


def apply_unitary(state: PureState, site: int, unitary: npt.ArrayLike) -> PureState:
    """Apply a local unitary; the result is renormalized against rounding."""
    _check_site(state, site)
    return PureState.from_vector(
        state.local_dims, apply_local(state.local_dims, np.array(state.amplitudes), site, unitary)
    )


def apply_controlled(state: PureState, control: int, obs: LocalObservable) -> PureState:
    """
    Apply obs on its site when `control` (a qubit) is |1⟩.

    Raises:
        ValueError: If the control is not 2-dimensional or coincides with the target
    """
    _check_site(state, control)
    _check_site(state, obs.site)
    if state.local_dims[control] != 2:
        raise ValueError(f"Control site {control} has dimension {state.local_dims[control]}, expected 2")
    if control == obs.site:
        raise ValueError("Control and target must be different sites")
    if obs.dim != state.local_dims[obs.site]:
        raise ValueError(
            f"Observable dimension {obs.dim} does not match site {obs.site} "
            f"of dimension {state.local_dims[obs.site]}"
        )

    psi = np.array(state.tensor())
    selector: list = [slice(None)] * state.num_sites
    selector[control] = 1
    sub = psi[tuple(selector)]
    sub_dims = tuple(d for i, d in enumerate(state.local_dims) if i != control)
    target = obs.site - (1 if obs.site > control else 0)
    psi[tuple(selector)] = apply_local(sub_dims, sub.reshape(-1), target, obs.matrix).reshape(sub_dims)
    return PureState.from_vector(state.local_dims, psi)


def tensor_product(first: PureState, second: PureState, dimension_cap: int = DIMENSION_CAP) -> PureState:
    """first ⊗ second, sites of `first` numbered before those of `second`."""
    total = first.dimension * second.dimension
    if total > dimension_cap:
        raise CapacityExceeded(f"Joint dimension {total} exceeds cap {dimension_cap}")
    return PureState(first.local_dims + second.local_dims, np.kron(first.amplitudes, second.amplitudes))


def fidelity(a: PureState, b: PureState) -> float:
    """|⟨a|b⟩|²."""
    if a.local_dims != b.local_dims:
        raise ValueError(f"Dimension mismatch: {a.local_dims} vs {b.local_dims}")
    return float(min(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2, 1.0))
