"""Simulated compact variational solver for spin-form objectives.

The ansatz is a uniform-magnitude state whose entries are +1/-1 phases set
by thresholding one angle per variable; auxiliary and padded coordinates
stay at +1.  Expectations of the coupling matrix are evaluated either
exactly from the statevector or by shot sampling each term of the
matrix's Pauli-string decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np

from .qubo import SpinQubo

__all__ = [
    "PauliTermList",
    "threshold",
    "theta_to_spins",
    "build_state",
    "pauli_decompose",
    "pauli_string_matrix",
    "reconstruct",
    "expectation_exact",
    "expectation_sampled",
    "objective_sigma",
    "decode_theta",
]

TWO_PI = 2.0 * np.pi
PRUNE_TOL = 1e-12

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PAULI_LABELS = "IXYZ"


def threshold(angle: float) -> int:
    """0 on [0, pi), 1 on [pi, 2*pi); rejects angles outside [0, 2*pi)."""
    if not 0.0 <= angle < TWO_PI:
        raise ValueError(f"angle {angle} outside [0, 2*pi)")
    return 0 if angle < np.pi else 1


def _check_theta(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1:
        raise ValueError("theta must be a flat vector of angles")
    if np.any((theta < 0.0) | (theta >= TWO_PI)):
        raise ValueError("all angles must lie in [0, 2*pi)")
    return theta


def theta_to_spins(theta, dim: int) -> np.ndarray:
    """Spin vector of the ansatz: thresholded phases on the variable
    coordinates, +1 on the rest."""
    theta = _check_theta(theta)
    if dim < 1 or dim & (dim - 1):
        raise ValueError(f"dim must be a power of two, got {dim}")
    if dim < 2 * theta.size:
        raise ValueError(f"dim {dim} too small for {theta.size} variables")
    z = np.ones(dim)
    z[: theta.size] = np.where(theta < np.pi, 1.0, -1.0)
    return z


def build_state(theta, dim: int) -> np.ndarray:
    """Normalized statevector; entries are +-1/sqrt(dim)."""
    return theta_to_spins(theta, dim) / np.sqrt(dim)


def decode_theta(theta) -> np.ndarray:
    """Binary solution read off the angles: 0 below pi, 1 at or above."""
    theta = _check_theta(theta)
    return (theta >= np.pi).astype(int)


@dataclass
class PauliTermList:
    """Real coefficients and I/X/Y/Z words of a matrix decomposition."""

    n_qubits: int
    terms: list[tuple[float, str]]

    def __len__(self) -> int:
        return len(self.terms)


def pauli_string_matrix(label: str) -> np.ndarray:
    """Dense matrix of a tensor product of single-qubit Pauli operators."""
    return reduce(np.kron, (PAULI_MATRICES[ch] for ch in label))


def pauli_decompose(matrix, n_qubits: int, *, prune: float = PRUNE_TOL) -> PauliTermList:
    """Expand a matrix over all 4^N Pauli words via the trace inner product.

    Coefficients are Tr(word . matrix) / 2^N; words with coefficient
    magnitude at or below ``prune`` are dropped.  The input must be real
    and symmetric so that all coefficients come out real.
    """
    matrix = np.asarray(matrix)
    dim = 1 << n_qubits
    if matrix.shape != (dim, dim):
        raise ValueError(
            f"matrix shape {matrix.shape} does not match {n_qubits} qubits (dim {dim})"
        )
    transposed = matrix.T.astype(complex)
    terms: list[tuple[float, str]] = []
    for word in product(PAULI_LABELS, repeat=n_qubits):
        label = "".join(word)
        j = pauli_string_matrix(label)
        coefficient = complex(np.sum(j * transposed)) / dim
        if abs(coefficient) <= prune:
            continue
        if abs(coefficient.imag) > 1e-9 * max(1.0, abs(coefficient)):
            raise ValueError(
                "decomposition produced a complex coefficient; input must be real symmetric"
            )
        terms.append((float(coefficient.real), label))
    return PauliTermList(n_qubits=n_qubits, terms=terms)


def reconstruct(terms: PauliTermList) -> np.ndarray:
    """Sum the weighted Pauli words back into a dense matrix."""
    dim = 1 << terms.n_qubits
    total = np.zeros((dim, dim), dtype=complex)
    for coefficient, label in terms.terms:
        total += coefficient * pauli_string_matrix(label)
    return total


def _apply_pauli_word(label: str, vector: np.ndarray) -> np.ndarray:
    """Apply a Pauli word to a statevector one qubit axis at a time."""
    n = len(label)
    psi = vector.astype(complex).reshape((2,) * n)
    for axis, op in enumerate(label):
        if op == "I":
            continue
        if op in ("X", "Y"):
            psi = np.flip(psi, axis=axis)
        if op in ("Y", "Z"):
            factor = np.array([-1j, 1j]) if op == "Y" else np.array([1.0, -1.0])
            shape = [1] * n
            shape[axis] = 2
            psi = psi * factor.reshape(shape)
    return psi.reshape(-1)


def term_expectation(label: str, state: np.ndarray) -> float:
    """Expectation of one Pauli word in the given state."""
    return float(np.real(np.vdot(state, _apply_pauli_word(label, state))))


def expectation_exact(squbo: SpinQubo, theta) -> float:
    """Exact expectation of the coupling matrix in the ansatz state."""
    theta = _check_theta(theta)
    if theta.size != squbo.n:
        raise ValueError(f"theta has {theta.size} angles, expected {squbo.n}")
    z = theta_to_spins(theta, squbo.dim)
    return float(z @ squbo.matrix @ z) / squbo.dim


def expectation_sampled(terms: PauliTermList, theta, shots: int, seed=None) -> float:
    """Unbiased shot-sampled expectation, term by term.

    Each Pauli word has +-1 outcomes; the state fixes the outcome
    probabilities analytically and the per-term mean over ``shots`` draws
    replaces the exact expectation.  ``seed`` accepts anything accepted by
    ``numpy.random.default_rng``, including an existing Generator.
    """
    if shots < 1:
        raise ValueError(f"shots must be at least 1, got {shots}")
    rng = np.random.default_rng(seed)
    dim = 1 << terms.n_qubits
    state = build_state(theta, dim)
    estimate = 0.0
    for coefficient, label in terms.terms:
        mean = term_expectation(label, state)
        p_plus = min(1.0, max(0.0, (1.0 + mean) / 2.0))
        hits = rng.binomial(shots, p_plus)
        estimate += coefficient * (2.0 * hits / shots - 1.0)
    return estimate


def objective_sigma(
    squbo: SpinQubo,
    theta,
    mode: str = "exact",
    shots: int = 1,
    seed=None,
    terms: PauliTermList | None = None,
) -> float:
    """Worker score of an angle vector: scaled expectation plus constant.

    In exact mode this equals the binary objective of the decoded
    assignment; the optimizer minimizes its negation.
    """
    if mode == "exact":
        expectation = expectation_exact(squbo, theta)
    elif mode == "sampled":
        if terms is None:
            terms = pauli_decompose(squbo.matrix, squbo.dim.bit_length() - 1)
        if (1 << terms.n_qubits) != squbo.dim:
            raise ValueError("term list dimension does not match the spin matrix")
        expectation = expectation_sampled(terms, theta, shots, seed)
    else:
        raise ValueError(f"unknown expectation mode {mode!r}")
    return squbo.dim * expectation + squbo.constant
