"""Dense statevector with in-place gate kernels and Schmidt-spectrum entropy.

Conventions used throughout the package:

* Basis index bit q is the state of qubit q, with qubit 0 the least
  significant bit: index = sum_q s_q * 2**q.
* Amplitudes are stored complex even though the Ry/CZ gate set is real,
  so the same state type serves the perturbation harness, which applies
  exp(-i*eps*A) with genuinely complex phases.
* Entropies are natural-log (nats) everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 20
ENTROPY_CUTOFF = 1e-14


class SizeError(ValueError):
    """Qubit count outside the supported range."""


@dataclass
class StateVector:
    """Normalized wavefunction over 2**n basis states."""

    n: int
    amps: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)


@dataclass
class BipartitionSpectrum:
    """Squared Schmidt coefficients of a contiguous bipartition.

    ``schmidt_coeffs`` holds the eigenvalues of the block's reduced density
    matrix (squared Schmidt coefficients), descending, summing to 1.
    """

    cut: list[int]
    schmidt_coeffs: np.ndarray = field(repr=False)


def init_zero(n: int) -> StateVector:
    """Product state |0...0> on n qubits."""
    if not isinstance(n, (int, np.integer)) or n < 1 or n > MAX_QUBITS:
        raise SizeError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(int(n), amps)


def _check_qubit(state: StateVector, q: int) -> None:
    if not 0 <= q < state.n:
        raise IndexError(f"qubit {q} out of range for n={state.n}")


def apply_2x2_real(amps: np.ndarray, q: int, m00: float, m01: float,
                   m10: float, m11: float) -> None:
    """In-place real 2x2 kernel on qubit q of a C-contiguous amplitude array."""
    v = amps.reshape(-1, 2, 1 << q)
    lo = v[:, 0, :].copy()
    hi = v[:, 1, :]
    v[:, 0, :] = m00 * lo + m01 * hi
    v[:, 1, :] = m10 * lo + m11 * hi


def apply_ry(state: StateVector, q: int, theta: float) -> None:
    """In-place rotation e^{-i*theta*Y/2}: [[cos, -sin], [sin, cos]] of theta/2."""
    _check_qubit(state, q)
    c = np.cos(0.5 * theta)
    s = np.sin(0.5 * theta)
    apply_2x2_real(state.amps, q, c, -s, s, c)


def apply_cz(state: StateVector, q1: int, q2: int) -> None:
    """In-place controlled-Z: negate amplitudes with bits q1 = q2 = 1."""
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise IndexError(f"CZ needs distinct qubits, got ({q1}, {q2})")
    cz_negate(state.amps, q1, q2)


def cz_negate(amps: np.ndarray, q1: int, q2: int) -> None:
    hi, lo = (q1, q2) if q1 > q2 else (q2, q1)
    v = amps.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)
    v[:, 1, :, 1, :] *= -1.0


def schmidt_spectrum(state: StateVector, block_size: int, start: int = 0) -> BipartitionSpectrum:
    """Squared Schmidt coefficients across block A = qubits start..start+block_size-1.

    Reshapes the amplitude vector into a 2^|B| x 2^|A| matrix and takes
    singular values; blocks not starting at qubit 0 get a qubit-permutation
    pass first. Cost O(2^n * 2^min(|A|,|B|)), exact.
    """
    n = state.n
    if not 1 <= block_size < n:
        raise ValueError(f"block_size must be in [1, {n - 1}], got {block_size}")
    if start < 0 or start + block_size > n:
        raise ValueError(f"block [{start}, {start + block_size}) not contained in 0..{n - 1}")
    amps = state.amps
    if start != 0:
        # numpy axis k of amps.reshape([2]*n) is qubit n-1-k; move the block
        # qubits to the low end before the matrix reshape.
        block = set(range(start, start + block_size))
        order = [q for q in range(n - 1, -1, -1) if q not in block] + \
                sorted(block, reverse=True)
        amps = np.transpose(amps.reshape([2] * n), [n - 1 - q for q in order]).reshape(-1)
    mat = amps.reshape(1 << (n - block_size), 1 << block_size)
    sv = np.linalg.svd(mat, compute_uv=False)
    lam = np.sort(sv * sv)[::-1]
    return BipartitionSpectrum(cut=list(range(start, start + block_size)), schmidt_coeffs=lam)


def von_neumann_entropy(spectrum: BipartitionSpectrum) -> float:
    """S = -sum(lam * ln(lam)) in nats, skipping lam <= cutoff; S >= 0."""
    lam = spectrum.schmidt_coeffs
    lam = lam[lam > ENTROPY_CUTOFF]
    return max(float(-np.sum(lam * np.log(lam))), 0.0)


def half_chain_entropy(state: StateVector) -> float:
    """Entropy of the contiguous half chain (qubits 0..n/2-1), in nats."""
    return von_neumann_entropy(schmidt_spectrum(state, state.n // 2))
