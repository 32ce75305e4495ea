"""Ising and XXZ chain Hamiltonians: matrix-free action, expectations, exact ground states.

Models (sigma^z is diag(+1,-1); basis bit 0 means spin up):

* ising:  H = -sum_j sz_j sz_{j+1} + coupling * sum_j sx_j
* xxz:    H = sum_j (sx_j sx_{j+1} + sy_j sy_{j+1}) + coupling * sz_j sz_{j+1}

The bond sum runs j = 0..n-2 on open chains and j = 0..n-1 (mod n) on rings;
periodic n=2 keeps the literal sum and double-counts the single bond.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .statevector import StateVector

MODELS = ("ising", "xxz")
DENSE_LIMIT = 10        # exact_ground switches to Lanczos above this
MAX_GROUND_QUBITS = 16


class ConvergenceError(RuntimeError):
    """Iterative eigensolver hit its iteration cap before converging."""


@dataclass(frozen=True)
class HamiltonianSpec:
    """Model selector plus coupling (lambda for ising, Delta for xxz)."""

    model: str
    coupling: float
    n: int
    periodic: bool = True

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.n < 2:
            raise ValueError(f"need n >= 2 sites, got {self.n}")


@dataclass
class GroundTruth:
    """Exact ground energy, optional state, and a gap estimate to level 1."""

    e0: float
    state: StateVector | None
    degenerate_within: float


def bonds(n: int, periodic: bool) -> list[tuple[int, int]]:
    out = [(j, j + 1) for j in range(n - 1)]
    if periodic:
        out.append((n - 1, 0))
    return out


@lru_cache(maxsize=None)
def _zz_bond_sum(n: int, periodic: bool) -> np.ndarray:
    """Diagonal of sum_j sz_j sz_{j+1} over the basis, as float64."""
    idx = np.arange(1 << n)
    z = [1.0 - 2.0 * ((idx >> q) & 1) for q in range(n)]
    diag = np.zeros(1 << n)
    for a, b in bonds(n, periodic):
        diag += z[a] * z[b]
    return diag


def _add_x_flips(out: np.ndarray, psi: np.ndarray, n: int, coeff: float) -> None:
    """out += coeff * sum_j sx_j psi."""
    for q in range(n):
        o = out.reshape(-1, 2, 1 << q)
        p = psi.reshape(-1, 2, 1 << q)
        o[:, 0, :] += coeff * p[:, 1, :]
        o[:, 1, :] += coeff * p[:, 0, :]


def _add_xxyy(out: np.ndarray, psi: np.ndarray, n: int, coeff: float) -> None:
    """out += coeff * sum_bonds (sx sx + sy sy) psi: 2x the antiparallel swap."""
    for a, b in bonds(n, True):
        if b == a + 1:
            o = out.reshape(-1, 2, 2, 1 << a)
            p = psi.reshape(-1, 2, 2, 1 << a)
            o[:, 0, 1, :] += 2.0 * coeff * p[:, 1, 0, :]
            o[:, 1, 0, :] += 2.0 * coeff * p[:, 0, 1, :]
        else:                      # wrap bond (n-1, 0)
            o = out.reshape(2, -1, 2)
            p = psi.reshape(2, -1, 2)
            o[0, :, 1] += 2.0 * coeff * p[1, :, 0]
            o[1, :, 0] += 2.0 * coeff * p[0, :, 1]


def _add_xxyy_open(out: np.ndarray, psi: np.ndarray, n: int, coeff: float) -> None:
    for a in range(n - 1):
        o = out.reshape(-1, 2, 2, 1 << a)
        p = psi.reshape(-1, 2, 2, 1 << a)
        o[:, 0, 1, :] += 2.0 * coeff * p[:, 1, 0, :]
        o[:, 1, 0, :] += 2.0 * coeff * p[:, 0, 1, :]


def apply_raw(spec: HamiltonianSpec, psi: np.ndarray) -> np.ndarray:
    """H @ psi on a raw amplitude array, dtype-preserving, term by term."""
    zz = _zz_bond_sum(spec.n, spec.periodic)
    if spec.model == "ising":
        out = -zz * psi
        _add_x_flips(out, psi, spec.n, spec.coupling)
    else:
        out = spec.coupling * zz * psi
        if spec.periodic:
            _add_xxyy(out, psi, spec.n, 1.0)
        else:
            _add_xxyy_open(out, psi, spec.n, 1.0)
    return out


def apply_h(spec: HamiltonianSpec, state: StateVector) -> StateVector:
    """H |psi> without materializing H."""
    if spec.n != state.n:
        raise ValueError(f"size mismatch: spec has n={spec.n}, state has n={state.n}")
    return StateVector(state.n, apply_raw(spec, state.amps))


def energy_expectation(spec: HamiltonianSpec, state: StateVector) -> float:
    """Re <psi|H|psi>; warns if the imaginary residual exceeds 1e-10."""
    if spec.n != state.n:
        raise ValueError(f"size mismatch: spec has n={spec.n}, state has n={state.n}")
    val = np.vdot(state.amps, apply_raw(spec, state.amps))
    if abs(val.imag) > 1e-10:
        warnings.warn(f"energy expectation has imaginary residual {val.imag:.3e}",
                      stacklevel=2)
    return float(val.real)


_PAULI = {
    "i": np.eye(2),
    "x": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "y_im": np.array([[0.0, -1.0], [1.0, 0.0]]),   # sigma^y = i * this
    "z": np.array([[1.0, 0.0], [0.0, -1.0]]),
}


def _site_op(op: np.ndarray, q: int, n: int) -> np.ndarray:
    return np.kron(np.eye(1 << (n - 1 - q)), np.kron(op, np.eye(1 << q)))


def dense_matrix(spec: HamiltonianSpec) -> np.ndarray:
    """Full 2^n x 2^n matrix built from Kronecker products (n <= 12)."""
    if spec.n > 12:
        raise ValueError(f"dense matrix limited to n <= 12, got n={spec.n}")
    n = spec.n
    dim = 1 << n
    h = np.zeros((dim, dim))
    for a, b in bonds(n, spec.periodic):
        zz = _site_op(_PAULI["z"], a, n) @ _site_op(_PAULI["z"], b, n)
        if spec.model == "ising":
            h -= zz
        else:
            xx = _site_op(_PAULI["x"], a, n) @ _site_op(_PAULI["x"], b, n)
            # sy_a sy_b = (i Ya)(i Yb) = -(Ya_im Yb_im) with real Ya_im
            yy = -_site_op(_PAULI["y_im"], a, n) @ _site_op(_PAULI["y_im"], b, n)
            h += xx + yy + spec.coupling * zz
    if spec.model == "ising":
        for q in range(n):
            h += spec.coupling * _site_op(_PAULI["x"], q, n)
    return h


def lanczos_ground(matvec, dim: int, seed: int, tol: float = 1e-12,
                   max_iter: int = 400, want_state: bool = False):
    """Lanczos with full reorthogonalization on a real symmetric matvec.

    Converges when the lowest Ritz value changes by less than ``tol`` between
    iterations; raises ConvergenceError at the iteration cap.

    Returns (e0, gap_estimate, ground_vector_or_None).
    """
    rng = np.random.default_rng(seed)
    steps = min(max_iter, dim)
    basis = np.empty((steps + 1, dim))
    v = rng.standard_normal(dim)
    basis[0] = v / np.linalg.norm(v)
    alphas: list[float] = []
    betas: list[float] = []
    e_prev = np.inf
    last_change = np.inf
    for it in range(steps):
        w = matvec(basis[it])
        a = float(np.dot(basis[it], w))
        alphas.append(a)
        w = w - a * basis[it]
        if it > 0:
            w -= betas[-1] * basis[it - 1]
        # full reorthogonalization, twice, kills ghost eigenvalues
        vmat = basis[:it + 1]
        for _ in range(2):
            w -= vmat.T @ (vmat @ w)
        ritz = eigh_tridiagonal(np.array(alphas), np.array(betas),
                                eigvals_only=True)
        e0 = float(ritz[0])
        last_change = abs(e0 - e_prev)
        if last_change < tol and it >= 2:
            break
        e_prev = e0
        b = float(np.linalg.norm(w))
        if b < 1e-13:       # exact invariant subspace
            break
        betas.append(b)
        basis[it + 1] = w / b
    else:
        raise ConvergenceError(
            f"Lanczos did not converge to {tol} within {max_iter} iterations "
            f"(last Ritz change {last_change:.3e})")
    vals, vecs = eigh_tridiagonal(np.array(alphas), np.array(betas))
    e0 = float(vals[0])
    gap = float(vals[1] - vals[0]) if len(vals) > 1 else 0.0
    vec = None
    if want_state:
        vec = basis[:len(alphas)].T @ vecs[:, 0]
        vec /= np.linalg.norm(vec)
    return e0, gap, vec


def exact_ground(spec: HamiltonianSpec, want_state: bool = False,
                 method: str = "auto", seed: int = 7) -> GroundTruth:
    """Exact ground energy: dense diagonalization for small n, Lanczos above.

    ``method`` may force "dense" or "krylov"; "auto" picks dense for
    n <= 10. The gap estimate is e1 - e0 (Ritz estimate on the Krylov path).
    """
    if spec.n > MAX_GROUND_QUBITS:
        raise ValueError(f"exact ground limited to n <= {MAX_GROUND_QUBITS}, got {spec.n}")
    if method == "auto":
        method = "dense" if spec.n <= DENSE_LIMIT else "krylov"
    if method == "dense":
        h = dense_matrix(spec)
        if want_state:
            vals, vecs = np.linalg.eigh(h)
            state = StateVector(spec.n, vecs[:, 0].astype(np.complex128))
        else:
            vals = np.linalg.eigvalsh(h)
            state = None
        return GroundTruth(float(vals[0]), state, float(vals[1] - vals[0]))
    if method == "krylov":
        e0, gap, vec = lanczos_ground(lambda v: apply_raw(spec, v), 1 << spec.n,
                                      seed=seed, want_state=want_state)
        state = StateVector(spec.n, vec.astype(np.complex128)) if vec is not None else None
        return GroundTruth(e0, state, gap)
    raise ValueError(f"unknown method {method!r}")
