"""Layered Ry/CZ brick ansatz: geometry, parameter layout, state preparation.

One layer = Ry on every qubit, CZ on even pairs (0,1),(2,3),...; then Ry on
every qubit, CZ on odd pairs (1,2),(3,4),... (plus the ring-closing pair
(n-1,0) when ``wrap_cz`` is set). A final Ry sweep follows the last layer,
so a circuit of ``layers`` layers carries 2*n*layers + n angles.

Angle layout is layer-major, half-layer-major, qubit-major, final sweep
last, which makes per-layer parameter slices contiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .statevector import StateVector, apply_2x2_real, cz_negate, init_zero


@dataclass(frozen=True)
class CircuitSpec:
    """Ansatz geometry: qubit count (even, >= 4), layer count, ring closure."""

    n: int
    layers: int
    wrap_cz: bool = False

    def __post_init__(self):
        if self.n < 4 or self.n % 2 != 0:
            raise ValueError(f"pairing pattern needs even n >= 4, got n={self.n}")
        if self.layers < 0:
            raise ValueError(f"layers must be >= 0, got {self.layers}")


def param_count(spec: CircuitSpec) -> int:
    """2n angles per layer plus the final Ry sweep."""
    return 2 * spec.n * spec.layers + spec.n


def cz_pairs(spec: CircuitSpec, half: int) -> list[tuple[int, int]]:
    """CZ pairs of the even (half=0) or odd (half=1) half-layer."""
    n = spec.n
    if half == 0:
        return [(q, q + 1) for q in range(0, n - 1, 2)]
    pairs = [(q, q + 1) for q in range(1, n - 2, 2)]
    if spec.wrap_cz:
        pairs.append((n - 1, 0))
    return pairs


@lru_cache(maxsize=None)
def gate_sequence(spec: CircuitSpec) -> tuple[tuple, ...]:
    """Ordered gate list: ("ry", qubit, param_index) and ("cz", q1, q2)."""
    gates = []
    k = 0
    for _layer in range(spec.layers):
        for half in (0, 1):
            for q in range(spec.n):
                gates.append(("ry", q, k))
                k += 1
            for a, b in cz_pairs(spec, half):
                gates.append(("cz", a, b))
    for q in range(spec.n):
        gates.append(("ry", q, k))
        k += 1
    assert k == param_count(spec)
    return tuple(gates)


def apply_gates(amps: np.ndarray, spec: CircuitSpec, angles: np.ndarray) -> None:
    """Run the full circuit in place on a raw amplitude array."""
    for gate in gate_sequence(spec):
        if gate[0] == "ry":
            _, q, k = gate
            c = np.cos(0.5 * angles[k])
            s = np.sin(0.5 * angles[k])
            apply_2x2_real(amps, q, c, -s, s, c)
        else:
            _, a, b = gate
            cz_negate(amps, a, b)


def check_angles(spec: CircuitSpec, angles: np.ndarray) -> np.ndarray:
    angles = np.asarray(angles, dtype=np.float64)
    expected = param_count(spec)
    if angles.shape != (expected,):
        raise ValueError(
            f"expected {expected} angles for n={spec.n}, layers={spec.layers}, "
            f"got shape {angles.shape}")
    return angles


def prepare_state(spec: CircuitSpec, angles: np.ndarray) -> StateVector:
    """Apply the ansatz to |0...0> and return the resulting state."""
    angles = check_angles(spec, angles)
    state = init_zero(spec.n)
    apply_gates(state.amps, spec, angles)
    return state


def cut_crossing_count(spec: CircuitSpec, block_size: int) -> int:
    """CZ gates with endpoints on opposite sides of the block 0..block_size-1.

    Both block boundaries count: on a ring the wrap pair (n-1,0) straddles
    the second boundary of the block.
    """
    if not 1 <= block_size < spec.n:
        raise ValueError(f"block_size must be in [1, {spec.n - 1}], got {block_size}")
    per_layer = 0
    for half in (0, 1):
        for a, b in cz_pairs(spec, half):
            if (a < block_size) != (b < block_size):
                per_layer += 1
    return per_layer * spec.layers


def parameter_block(spec: CircuitSpec, block: int) -> slice:
    """Angle slice of layer ``block`` (2n angles); the last block is the final sweep."""
    n = spec.n
    if block < spec.layers:
        return slice(2 * n * block, 2 * n * (block + 1))
    if block == spec.layers:
        return slice(2 * n * spec.layers, 2 * n * spec.layers + n)
    raise IndexError(f"block {block} out of range for {spec.layers} layers")


def num_parameter_blocks(spec: CircuitSpec) -> int:
    return spec.layers + 1


def embed_shallower(spec: CircuitSpec, shallow_angles: np.ndarray) -> np.ndarray:
    """Lift optimized angles of an (layers-1)-deep circuit into this spec.

    A prepended all-zero layer acts as the identity on |0...0> (Ry(0) = I and
    CZ is trivial on the all-zero state), so the lifted circuit reproduces the
    shallow optimum exactly.
    """
    if spec.layers < 1:
        raise ValueError("cannot embed into a zero-layer circuit")
    shallow = CircuitSpec(spec.n, spec.layers - 1, spec.wrap_cz)
    shallow_angles = check_angles(shallow, shallow_angles)
    return np.concatenate([np.zeros(2 * spec.n), shallow_angles])


def circuit_record(spec: CircuitSpec, angles: np.ndarray) -> dict:
    """JSON-ready record of an ansatz and its angles."""
    angles = check_angles(spec, angles)
    return {
        "n": spec.n,
        "layers": spec.layers,
        "wrap_cz": spec.wrap_cz,
        "angles": angles.tolist(),
    }


def circuit_from_record(record: dict) -> tuple[CircuitSpec, np.ndarray]:
    spec = CircuitSpec(int(record["n"]), int(record["layers"]), bool(record["wrap_cz"]))
    return spec, check_angles(spec, np.array(record["angles"], dtype=np.float64))
