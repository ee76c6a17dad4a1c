"""Time evolution under a piecewise-constant-controlled Lindblad generator.

States live on grid points, control samples on interval midpoints.  Within an
interval the generator is constant, so each step evaluates the exact interval
exponential through a truncated Taylor expansion with automatic sub-stepping
(matrix-free: only applications of the generator to the current matrix).  The
backward propagation of co-states uses the adjoint generator over backward
time, which makes every backward step the exact discrete adjoint of the
corresponding forward step and conserves the pairing <chi(t), rho(t)>.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NonConvergenceError, PropagationAccuracyError
from .operators import check_density_matrix, check_hermitian

DEFAULT_STEP_TOL = 1e-12

TRAJECTORY_HERMITICITY_TOL = 1e-10
TRAJECTORY_TRACE_TOL = 1e-8
TRAJECTORY_EIGENVALUE_TOL = 1e-8


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, t_final] with n_steps intervals."""

    t_final: float
    n_steps: int

    def __post_init__(self):
        if self.t_final <= 0:
            raise ValueError(f"t_final must be positive, got {self.t_final}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be at least 1, got {self.n_steps}")

    @property
    def dt(self) -> float:
        return self.t_final / self.n_steps

    @cached_property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_final, self.n_steps + 1)

    @cached_property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n_steps) + 0.5) * self.dt


@dataclass
class ControlSet:
    """Piecewise-constant control tracks, one sample per interval midpoint.

    Coupling-type samples are in rad/s, rate-type samples in 1/s.
    """

    names: tuple[str, ...]
    samples: np.ndarray  # shape (n_tracks, n_steps)

    def __post_init__(self):
        self.names = tuple(self.names)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate track names: {self.names}")
        self.samples = np.atleast_2d(np.asarray(self.samples, dtype=float))
        if self.samples.shape[0] != len(self.names):
            raise ValueError(
                f"{len(self.names)} track names but samples shape {self.samples.shape}"
            )

    @classmethod
    def constant(cls, names, values, n_steps: int) -> "ControlSet":
        names = tuple(names)
        samples = np.empty((len(names), n_steps))
        for i, v in enumerate(values):
            samples[i, :] = v
        return cls(names, samples)

    @property
    def n_steps(self) -> int:
        return self.samples.shape[1]

    def values_at(self, j: int) -> np.ndarray:
        return self.samples[:, j]

    def track(self, name: str) -> np.ndarray:
        return self.samples[self.names.index(name)]

    def copy(self) -> "ControlSet":
        return ControlSet(self.names, self.samples.copy())


@dataclass(eq=False)
class SystemModel:
    """Drift Hamiltonian, linearly-coupled control Hamiltonians and collapse ops.

    ``collapse_ops`` carry their rates already folded in (operators are the
    full sqrt(rate) * op).  ``control_collapse`` lists bare collapse operators
    whose rate is a control track (one track per operator, appended after the
    coupling tracks in ``control_names``).
    """

    dim: int
    drift_hamiltonian: np.ndarray | None = None
    control_hamiltonians: tuple[np.ndarray, ...] = ()
    coupling_names: tuple[str, ...] = ()
    collapse_ops: tuple[np.ndarray, ...] = ()
    control_collapse: tuple[np.ndarray, ...] = ()
    rate_names: tuple[str, ...] = ()
    initial_state: np.ndarray | None = None
    subsystem_dims: tuple[int, int] | None = None

    def __post_init__(self):
        self.control_hamiltonians = tuple(self.control_hamiltonians)
        self.coupling_names = tuple(self.coupling_names)
        self.collapse_ops = tuple(self.collapse_ops)
        self.control_collapse = tuple(self.control_collapse)
        self.rate_names = tuple(self.rate_names)
        if len(self.control_hamiltonians) != len(self.coupling_names):
            raise ValueError("coupling_names must match control_hamiltonians one to one")
        if len(self.control_collapse) != len(self.rate_names):
            raise ValueError("rate_names must match control_collapse one to one")
        shape = (self.dim, self.dim)
        for what, op in self._all_operators():
            if op.shape != shape:
                raise ValueError(f"{what} has shape {op.shape}, expected {shape}")
        if self.drift_hamiltonian is not None:
            check_hermitian(self.drift_hamiltonian, 1e-12, "drift Hamiltonian")
        for name, h in zip(self.coupling_names, self.control_hamiltonians):
            check_hermitian(h, 1e-12, f"control Hamiltonian '{name}'")

    def _all_operators(self):
        if self.drift_hamiltonian is not None:
            yield "drift Hamiltonian", self.drift_hamiltonian
        for name, h in zip(self.coupling_names, self.control_hamiltonians):
            yield f"control Hamiltonian '{name}'", h
        for i, op in enumerate(self.collapse_ops):
            yield f"collapse operator {i}", op
        for name, op in zip(self.rate_names, self.control_collapse):
            yield f"controlled collapse operator '{name}'", op

    @property
    def control_names(self) -> tuple[str, ...]:
        return self.coupling_names + self.rate_names

    @property
    def n_controls(self) -> int:
        return len(self.control_names)

    @cached_property
    def _static_pairs(self):
        return tuple((op, op.conj().T) for op in self.collapse_ops)

    @cached_property
    def _static_csum(self):
        if not self.collapse_ops:
            return None
        return sum(ld @ op for op, ld in self._static_pairs)

    @cached_property
    def _rate_parts(self):
        parts = []
        for op in self.control_collapse:
            opd = op.conj().T
            parts.append((op, opd, opd @ op))
        return tuple(parts)


def _control_values(model: SystemModel, values) -> np.ndarray:
    names = model.control_names
    if isinstance(values, dict):
        missing = [n for n in names if n not in values]
        if missing:
            raise ValueError(f"missing control values for {missing}")
        return np.array([float(values[n]) for n in names])
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size != len(names):
        raise ValueError(f"expected {len(names)} control values, got {arr.size}")
    return arr


def _interval_parts(model: SystemModel, values: np.ndarray):
    """Constant-generator pieces for one interval: (H, weighted pairs, csum)."""
    n_coupling = len(model.control_hamiltonians)
    h = model.drift_hamiltonian
    if n_coupling:
        h = np.zeros((model.dim, model.dim), dtype=complex) if h is None else h.astype(complex)
        for eps, hk in zip(values[:n_coupling], model.control_hamiltonians):
            if eps != 0.0:
                h = h + eps * hk
    pairs = [(op, opd, 1.0) for op, opd in model._static_pairs]
    csum = model._static_csum
    for u, (op, opd, opdop) in zip(values[n_coupling:], model._rate_parts):
        if u != 0.0:
            pairs.append((op, opd, u))
            csum = u * opdop if csum is None else csum + u * opdop
    return h, pairs, csum


def _forward_generator(model: SystemModel, values: np.ndarray):
    h, pairs, csum = _interval_parts(model, values)

    def apply(y):
        if h is not None:
            out = -1j * (h @ y - y @ h)
        else:
            out = np.zeros_like(y)
        for op, opd, w in pairs:
            out += w * (op @ y @ opd)
        if csum is not None:
            out -= 0.5 * (csum @ y + y @ csum)
        return out

    return apply

def _adjoint_generator(model: SystemModel, values: np.ndarray):
    h, pairs, csum = _interval_parts(model, values)

    def apply(y):
        if h is not None:
            out = 1j * (h @ y - y @ h)
        else:
            out = np.zeros_like(y)
        for op, opd, w in pairs:
            out += w * (opd @ y @ op)
        if csum is not None:
            out -= 0.5 * (csum @ y + y @ csum)
        return out

    return apply


def liouville_apply(model: SystemModel, control_values, state: np.ndarray) -> np.ndarray:
    """Instantaneous time derivative of ``state`` under the Lindblad generator."""
    if state.shape != (model.dim, model.dim):
        raise ValueError(f"state shape {state.shape} does not match model dim {model.dim}")
    values = _control_values(model, control_values)
    return _forward_generator(model, values)(np.asarray(state, dtype=complex))


def adjoint_apply(model: SystemModel, control_values, costate: np.ndarray) -> np.ndarray:
    """Adjoint generator applied to a co-state: <adjoint(A), B> = <A, liouville(B)>."""
    if costate.shape != (model.dim, model.dim):
        raise ValueError(f"co-state shape {costate.shape} does not match model dim {model.dim}")
    values = _control_values(model, control_values)
    return _adjoint_generator(model, values)(np.asarray(costate, dtype=complex))


class _TaylorStepper:
    """Exact interval exponential via truncated Taylor series with sub-stepping.

    The series of exp(dt*L) applied to y converges quickly once ||dt*L|| per
    substep is of order one; the number of substeps adapts between intervals
    (controls change slowly, so the previous interval's count is a good hint).
    """

    def __init__(self, tol: float = DEFAULT_STEP_TOL, max_terms: int = 25):
        self.tol = tol
        self.max_terms = max_terms
        self.hint = 1

    def step(self, apply, y: np.ndarray, dt: float) -> np.ndarray:
        m = self.hint
        while True:
            result, deepest = self._attempt(apply, y, dt, m)
            if result is not None:
                if deepest <= 8 and m > 1:
                    self.hint = m // 2
                else:
                    self.hint = m
                return result
            m *= 2
            if m > 2**22:
                raise PropagationAccuracyError(
                    "interval exponential did not converge; generator magnitude "
                    "is far beyond the grid resolution"
                )

    def _attempt(self, apply, y, dt, m):
        h = dt / m
        cur = np.asarray(y, dtype=complex)
        deepest = 0
        for _ in range(m):
            scale = max(1.0, float(np.max(np.abs(cur))))
            acc = cur.copy()
            term = cur
            small_run = 0
            converged = False
            for k in range(1, self.max_terms + 1):
                term = apply(term) * (h / k)
                acc += term
                tn = float(np.max(np.abs(term)))
                if tn > 1e3 * scale:
                    return None, k
                if tn <= 0.5 * self.tol * scale:
                    small_run += 1
                    if small_run == 2:
                        converged = True
                        break
                else:
                    small_run = 0
            if not converged:
                return None, self.max_terms
            deepest = max(deepest, k)
            cur = acc
        return cur, deepest


@dataclass
class Trajectory:
    """Snapshots at every grid point, time ordered (states[j] at times[j]).

    Forward runs place the boundary condition at index 0, backward runs at
    index n_steps.
    """

    grid: TimeGrid
    states: np.ndarray  # (n_steps + 1, dim, dim)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def initial(self) -> np.ndarray:
        return self.states[0]


def _check_controls(model: SystemModel, controls: ControlSet, grid: TimeGrid):
    if controls.names != model.control_names:
        raise ValueError(
            f"control tracks {controls.names} do not match model controls {model.control_names}"
        )
    if controls.n_steps != grid.n_steps:
        raise ValueError(
            f"controls have {controls.n_steps} samples but grid has {grid.n_steps} intervals"
        )


def _check_forward_snapshot(y: np.ndarray, step: int):
    herm = float(np.max(np.abs(y - y.conj().T)))
    if herm > TRAJECTORY_HERMITICITY_TOL:
        raise PropagationAccuracyError(
            f"hermiticity defect {herm:.3e} at step {step}", step_index=step
        )
    tr = complex(np.trace(y))
    if abs(tr - 1.0) > TRAJECTORY_TRACE_TOL:
        raise PropagationAccuracyError(
            f"trace drift {abs(tr - 1.0):.3e} at step {step}", step_index=step
        )
    lowest = np.linalg.eigvalsh(y)[0]
    if lowest < -TRAJECTORY_EIGENVALUE_TOL:
        raise PropagationAccuracyError(
            f"negative eigenvalue {lowest:.3e} at step {step}", step_index=step
        )


def propagate_forward(
    model: SystemModel,
    controls: ControlSet,
    rho0: np.ndarray,
    grid: TimeGrid,
    step_tol: float = DEFAULT_STEP_TOL,
    validate: bool = True,
) -> Trajectory:
    """Propagate a density matrix through all intervals, storing every snapshot."""
    _check_controls(model, controls, grid)
    if validate:
        check_density_matrix(rho0)
    n = grid.n_steps
    states = np.empty((n + 1, model.dim, model.dim), dtype=complex)
    y = np.asarray(rho0, dtype=complex)
    states[0] = y
    stepper = _TaylorStepper(step_tol)
    dt = grid.dt
    for j in range(n):
        apply = _forward_generator(model, controls.values_at(j))
        y = stepper.step(apply, y, dt)
        if validate:
            _check_forward_snapshot(y, j + 1)
        states[j + 1] = y
    return Trajectory(grid, states)


def propagate_backward(
    model: SystemModel,
    controls: ControlSet,
    chi_final: np.ndarray,
    grid: TimeGrid,
    step_tol: float = DEFAULT_STEP_TOL,
    validate: bool = True,
) -> Trajectory:
    """Propagate a co-state from t = T down to 0 under the adjoint generator.

    The returned trajectory is time ordered; ``states[-1]`` is ``chi_final``.
    """
    _check_controls(model, controls, grid)
    if validate:
        check_hermitian(chi_final, 1e-12, "final co-state")
    n = grid.n_steps
    states = np.empty((n + 1, model.dim, model.dim), dtype=complex)
    y = np.asarray(chi_final, dtype=complex)
    states[n] = y
    stepper = _TaylorStepper(step_tol)
    dt = grid.dt
    for j in range(n - 1, -1, -1):
        apply = _adjoint_generator(model, controls.values_at(j))
        y = stepper.step(apply, y, dt)
        if validate:
            herm = float(np.max(np.abs(y - y.conj().T)))
            if herm > TRAJECTORY_HERMITICITY_TOL:
                raise PropagationAccuracyError(
                    f"co-state hermiticity defect {herm:.3e} at step {j}", step_index=j
                )
        states[j] = y
    return Trajectory(grid, states)


@dataclass
class SteadyStateResult:
    state: np.ndarray
    residual: float
    t_elapsed: float
    n_steps_taken: int


def steady_state(
    model: SystemModel,
    control_values,
    tol: float,
    t_max: float,
    dt: float,
    step_tol: float = DEFAULT_STEP_TOL,
    check_every: int = 50,
) -> SteadyStateResult:
    """Propagate the model's default initial state until ||drho/dt||_max < tol."""
    if tol <= 0:
        raise ValueError(f"steady-state tolerance must be positive, got {tol}")
    if model.initial_state is None:
        raise ValueError("model has no default initial state")
    values = _control_values(model, control_values)
    apply = _forward_generator(model, values)
    y = np.asarray(model.initial_state, dtype=complex)
    residual = float(np.max(np.abs(apply(y))))
    if residual < tol:
        return SteadyStateResult(y, residual, 0.0, 0)
    stepper = _TaylorStepper(step_tol)
    n_max = int(np.ceil(t_max / dt))
    for j in range(1, n_max + 1):
        y = stepper.step(apply, y, dt)
        residual = float(np.max(np.abs(apply(y))))
        if j % check_every == 0 or residual < tol:
            _check_forward_snapshot(y, j)
        if residual < tol:
            return SteadyStateResult(y, residual, j * dt, j)
    raise NonConvergenceError(
        f"steady state not reached within t_max = {t_max}: residual {residual:.3e} > {tol:.1e}",
        residual=residual,
    )
