"""Energy objective, exact gradients, quasi-Newton + sweep minimization, and
adiabatic continuation.

The optimizer runs outer cycles of (a) a full L-BFGS-B pass over all angles
and (b) coordinate sweeps (per-layer blocks by default, exact single-angle
updates in "param" mode), stopping when one outer cycle lowers the energy by
less than ``convergence_threshold``.

Gradients: the public :func:`gradient` is the two-point shift rule
(E(theta + pi/2 e_k) - E(theta - pi/2 e_k)) / 2, which is exact for Ry
generators. Inside the optimizer the same values are produced by
reverse-mode (adjoint) sweeps at ~4 circuit costs per full gradient instead
of 2 * param_count; :func:`gradient_adjoint` is tested to agree with
:func:`gradient` to 1e-10.

Evaluation accounting: ``evaluations`` counts energy computations, with each
adjoint gradient charged as 4 energy-equivalents, so continuation runs can be
budget-matched against cold starts.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize as scipy_minimize

from . import hamiltonian
from .circuit import (CircuitSpec, apply_gates, check_angles, circuit_from_record,
                      circuit_record, gate_sequence, num_parameter_blocks,
                      param_count, parameter_block, prepare_state)
from .hamiltonian import HamiltonianSpec, _add_x_flips
from .statevector import apply_2x2_real, cz_negate, half_chain_entropy

SWEEP_MODES = ("layer", "param")


@dataclass(frozen=True)
class XFieldSpec:
    """Transverse field H = coupling * sum_j sx_j; the continuation start
    Hamiltonian (coupling=-1 has the trivially preparable ground |+...+>)."""

    n: int
    coupling: float = -1.0

    @property
    def e0(self) -> float:
        return -abs(self.coupling) * self.n


@dataclass(frozen=True)
class OptimizerConfig:
    convergence_threshold: float = 1e-12    # energy decrease per outer cycle
    max_outer_cycles: int = 8
    max_quasi_newton_iters: int = 2000
    max_sweep_iters: int = 150              # per-block cap inside coordinate sweeps
    restarts: int = 1
    init_scale: float = 0.1                 # std-dev of initial angles, radians
    seed: int = 0
    sweep_mode: str = "layer"

    def validate(self) -> None:
        problems = []
        if not self.convergence_threshold > 0:
            problems.append(f"convergence_threshold must be > 0, got {self.convergence_threshold}")
        if self.restarts < 1:
            problems.append(f"restarts must be >= 1, got {self.restarts}")
        if self.max_outer_cycles < 1:
            problems.append(f"max_outer_cycles must be >= 1, got {self.max_outer_cycles}")
        if self.max_quasi_newton_iters < 1:
            problems.append(f"max_quasi_newton_iters must be >= 1, got {self.max_quasi_newton_iters}")
        if self.max_sweep_iters < 1:
            problems.append(f"max_sweep_iters must be >= 1, got {self.max_sweep_iters}")
        if self.init_scale < 0:
            problems.append(f"init_scale must be >= 0, got {self.init_scale}")
        if self.sweep_mode not in SWEEP_MODES:
            problems.append(f"sweep_mode must be one of {SWEEP_MODES}, got {self.sweep_mode!r}")
        if problems:
            raise ValueError("invalid optimizer config: " + "; ".join(problems))


@dataclass
class VqeResult:
    energy: float
    epsilon: float | None
    theta_opt: np.ndarray = field(repr=False)
    entropy_half: float
    cycles_used: int
    converged: bool
    seed_used: int
    evaluations: int


@dataclass(frozen=True)
class AavqeSchedule:
    """Interpolation steps s in [0, 1], strictly increasing, ending at 1."""

    steps: tuple[float, ...]
    step_configs: tuple[OptimizerConfig | None, ...] | None = None

    def __post_init__(self):
        steps = self.steps
        if len(steps) == 0:
            raise ValueError("schedule needs at least one step")
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise ValueError(f"steps must be strictly increasing, got {steps}")
        if steps[0] < 0 or steps[-1] != 1.0:
            raise ValueError(f"steps must start >= 0 and end at exactly 1, got {steps}")
        if self.step_configs is not None and len(self.step_configs) != len(steps):
            raise ValueError("step_configs must match steps in length")

    def config_for(self, i: int, default: OptimizerConfig) -> OptimizerConfig:
        if self.step_configs is None or self.step_configs[i] is None:
            return default
        return self.step_configs[i]


def linear_schedule(num_steps: int, include_zero: bool = False) -> AavqeSchedule:
    start = 0.0 if include_zero else 1.0 / num_steps
    return AavqeSchedule(tuple(np.linspace(start, 1.0, num_steps)))


# --- raw energy / gradient machinery (real float64 fast path) ---------------

Terms = list  # [(weight, HamiltonianSpec | XFieldSpec), ...]


def _apply_one(h, psi: np.ndarray) -> np.ndarray:
    if isinstance(h, HamiltonianSpec):
        return hamiltonian.apply_raw(h, psi)
    out = np.zeros_like(psi)
    _add_x_flips(out, psi, h.n, h.coupling)
    return out


def _apply_terms(terms: Terms, psi: np.ndarray) -> np.ndarray:
    out = None
    for w, h in terms:
        if w == 0.0:
            continue
        part = _apply_one(h, psi)
        out = w * part if out is None else out + w * part
    if out is None:
        out = np.zeros_like(psi)
    return out


def _prepare_raw(spec: CircuitSpec, angles: np.ndarray) -> np.ndarray:
    psi = np.zeros(1 << spec.n)
    psi[0] = 1.0
    apply_gates(psi, spec, angles)
    return psi


def _energy_raw(spec: CircuitSpec, terms: Terms, angles: np.ndarray) -> float:
    psi = _prepare_raw(spec, angles)
    return float(np.dot(psi, _apply_terms(terms, psi)))


def _energy_and_grad_raw(spec: CircuitSpec, terms: Terms,
                         angles: np.ndarray) -> tuple[float, np.ndarray]:
    """Reverse-mode sweep: unapply gates from both the state and H|psi>,
    collecting 2*Re<phi|dU|psi> per Ry angle."""
    psi = _prepare_raw(spec, angles)
    phi = _apply_terms(terms, psi)
    energy = float(np.dot(psi, phi))
    grad = np.empty(param_count(spec))
    for gate in reversed(gate_sequence(spec)):
        if gate[0] == "ry":
            _, q, k = gate
            c = np.cos(0.5 * angles[k])
            s = np.sin(0.5 * angles[k])
            apply_2x2_real(psi, q, c, s, -s, c)          # R(-theta)
            dpsi = psi.copy()
            apply_2x2_real(dpsi, q, -0.5 * s, -0.5 * c, 0.5 * c, -0.5 * s)
            grad[k] = 2.0 * float(np.dot(phi, dpsi))
            apply_2x2_real(phi, q, c, s, -s, c)
        else:
            _, a, b = gate
            cz_negate(psi, a, b)
            cz_negate(phi, a, b)
    return energy, grad


# --- public ops --------------------------------------------------------------

def objective(spec: CircuitSpec, h: HamiltonianSpec, angles: np.ndarray) -> float:
    """E(theta) = <psi(theta)| H |psi(theta)>."""
    state = prepare_state(spec, angles)
    return hamiltonian.energy_expectation(h, state)


def gradient(spec: CircuitSpec, h, angles: np.ndarray) -> np.ndarray:
    """Two-point shift-rule gradient, component by component."""
    angles = check_angles(spec, angles)
    terms = [(1.0, h)]
    grad = np.empty(angles.size)
    shifted = angles.copy()
    for k in range(angles.size):
        shifted[k] = angles[k] + 0.5 * np.pi
        e_plus = _energy_raw(spec, terms, shifted)
        shifted[k] = angles[k] - 0.5 * np.pi
        e_minus = _energy_raw(spec, terms, shifted)
        shifted[k] = angles[k]
        grad[k] = 0.5 * (e_plus - e_minus)
    return grad


def gradient_adjoint(spec: CircuitSpec, h, angles: np.ndarray) -> np.ndarray:
    """Reverse-mode gradient; agrees with :func:`gradient` to 1e-10."""
    angles = check_angles(spec, angles)
    return _energy_and_grad_raw(spec, [(1.0, h)], angles)[1]


# --- optimizer ----------------------------------------------------------------

class _Objective:
    """Energy / energy+gradient callables with evaluation accounting."""

    def __init__(self, spec: CircuitSpec, terms: Terms):
        self.spec = spec
        self.terms = terms
        self.nfev = 0
        self.nvg = 0

    def energy(self, x: np.ndarray) -> float:
        self.nfev += 1
        return _energy_raw(self.spec, self.terms, x)

    def value_and_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        self.nvg += 1
        return _energy_and_grad_raw(self.spec, self.terms, x)

    @property
    def evaluations(self) -> int:
        # a reverse-mode pass costs about four plain energy evaluations
        return self.nfev + 4 * self.nvg


def _lbfgs_over(obj: _Objective, theta: np.ndarray, e_in: float,
                indices: slice | None, maxiter: int) -> tuple[np.ndarray, float]:
    """L-BFGS-B over all angles, or over one contiguous block with the rest held."""
    if indices is None:
        def fun(x):
            return obj.value_and_grad(x)

        x0 = theta
    else:
        base = theta.copy()

        def fun(x):
            base[indices] = x
            e, g = obj.value_and_grad(base)
            return e, g[indices]

        x0 = theta[indices].copy()
    res = scipy_minimize(fun, x0, jac=True, method="L-BFGS-B",
                         options={"maxiter": maxiter, "maxfun": 50 * maxiter,
                                  "ftol": 1e-17, "gtol": 1e-12})
    if float(res.fun) > e_in:        # never accept an uphill "optimum"
        return theta.copy(), e_in
    out = theta.copy()
    if indices is None:
        out[:] = res.x
    else:
        out[indices] = res.x
    return out, float(res.fun)


def _coordinate_sweep(obj: _Objective, theta: np.ndarray,
                      e_current: float) -> tuple[np.ndarray, float]:
    """Exact single-angle updates: E(theta_k) = a + r*cos(theta_k - delta)."""
    theta = theta.copy()
    shifted = theta.copy()
    for k in range(theta.size):
        phi0 = theta[k]
        shifted[k] = phi0 + 0.5 * np.pi
        e_plus = obj.energy(shifted)
        shifted[k] = phi0 - 0.5 * np.pi
        e_minus = obj.energy(shifted)
        a = 0.5 * (e_plus + e_minus)
        u = np.arctan2(e_minus - e_plus, 2.0 * (e_current - a))
        theta[k] = phi0 - u + np.pi
        shifted[k] = theta[k]
        e_current = a - float(np.hypot(e_current - a, 0.5 * (e_minus - e_plus)))
    e_actual = obj.energy(theta)
    return theta, e_actual


def _optimize_one(spec: CircuitSpec, terms: Terms, theta0: np.ndarray,
                  cfg: OptimizerConfig) -> tuple[np.ndarray, float, int, bool, int]:
    obj = _Objective(spec, terms)
    theta = theta0.copy()
    energy = obj.energy(theta)
    e_cycle_start = energy
    converged = False
    cycles = 0
    for _cycle in range(cfg.max_outer_cycles):
        theta, energy = _lbfgs_over(obj, theta, energy, None, cfg.max_quasi_newton_iters)
        if cfg.sweep_mode == "layer":
            for b in range(num_parameter_blocks(spec)):
                theta, energy = _lbfgs_over(obj, theta, energy, parameter_block(spec, b),
                                            cfg.max_quasi_newton_iters)
        else:
            theta, energy = _coordinate_sweep(obj, theta, energy)
        cycles += 1
        if e_cycle_start - energy < cfg.convergence_threshold:
            converged = True
            break
        e_cycle_start = energy
    return theta, energy, cycles, converged, obj.evaluations


def _minimize_terms(spec: CircuitSpec, terms: Terms, cfg: OptimizerConfig,
                    theta_init: np.ndarray | None = None,
                    e0: float | None = None) -> VqeResult:
    cfg.validate()
    for _w, h in terms:
        if h.n != spec.n:
            raise ValueError(f"size mismatch: circuit n={spec.n}, hamiltonian n={h.n}")
    rng = np.random.default_rng(cfg.seed)
    best: tuple[np.ndarray, float, int, bool] | None = None
    total_evals = 0
    for restart in range(cfg.restarts):
        if restart == 0 and theta_init is not None:
            theta0 = check_angles(spec, theta_init).copy()
        else:
            theta0 = rng.normal(0.0, cfg.init_scale, param_count(spec))
        theta, energy, cycles, converged, evals = _optimize_one(spec, terms, theta0, cfg)
        total_evals += evals
        if best is None or energy < best[1]:
            best = (theta, energy, cycles, converged)
    theta, energy, cycles, converged = best
    entropy = half_chain_entropy(prepare_state(spec, theta))
    epsilon = abs(energy - e0) if e0 is not None else None
    return VqeResult(energy=energy, epsilon=epsilon, theta_opt=theta,
                     entropy_half=entropy, cycles_used=cycles, converged=converged,
                     seed_used=cfg.seed, evaluations=total_evals)


def minimize(spec: CircuitSpec, h: HamiltonianSpec, cfg: OptimizerConfig,
             theta_init: np.ndarray | None = None,
             e0: float | None = None) -> VqeResult:
    """Full VQE run; over restarts >= 2 the best-energy result is returned."""
    return _minimize_terms(spec, [(1.0, h)], cfg, theta_init, e0)


def aavqe(spec: CircuitSpec, h_problem: HamiltonianSpec, schedule: AavqeSchedule,
          cfg: OptimizerConfig, h0: XFieldSpec | HamiltonianSpec | None = None,
          e0: float | None = None) -> VqeResult:
    """Continuation along H(s) = (1-s) H0 + s HP with warm-started angles.

    Each step minimizes the interpolated energy starting from the previous
    step's optimum; the returned result is the final s=1 run, with epsilon
    measured against ``e0`` of the problem Hamiltonian when supplied.
    """
    if h0 is None:
        h0 = XFieldSpec(h_problem.n)
    if h0.n != h_problem.n:
        raise ValueError(f"H0 and HP disagree on n: {h0.n} != {h_problem.n}")
    theta = None
    total_evals = 0
    result = None
    for i, s in enumerate(schedule.steps):
        step_cfg = schedule.config_for(i, cfg)
        terms = [(1.0 - s, h0), (s, h_problem)]
        result = _minimize_terms(spec, terms, step_cfg, theta_init=theta,
                                 e0=e0 if s == 1.0 else None)
        theta = result.theta_opt
        total_evals += result.evaluations
    result.evaluations = total_evals
    return result


# --- checkpointing -----------------------------------------------------------

def save_checkpoint(path, spec: CircuitSpec, angles: np.ndarray, energy: float,
                    seed: int, extra: dict | None = None) -> None:
    """Atomically write an optimized-run record (circuit + angles + metadata)."""
    record = circuit_record(spec, angles)
    record.update({"energy": float(energy), "seed": int(seed)})
    if extra:
        record.update(extra)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        json.dump(record, fh)
    os.replace(tmp, path)


def load_checkpoint(path) -> tuple[CircuitSpec, np.ndarray, dict]:
    with open(path) as fh:
        record = json.load(fh)
    spec, angles = circuit_from_record(record)
    return spec, angles, record
