"""Sequential Krotov optimization of piecewise-constant control tracks.

One iteration: seed the co-state from the functional gradient at the previous
final state, propagate it backward (storing every grid point), then sweep
forward interval by interval, updating each sample from the stored co-state
and the freshly propagated state before stepping across the interval.

The monitored objective for the monotonicity guard and the stopping rule is
the final-time functional value D.  The total objective including the
quadratic move penalty g (reference field = previous iteration) is logged
alongside; with that reference, g vanishes at convergence, but its guess
record carries no penalty, so D + g cannot be non-increasing from the first
record for curved functionals and is reported rather than guarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MonotonicityError
from .functionals import (
    FunctionalSpec,
    DistanceReport,
    costate_seed,
    distance_report,
    evaluate_functional,
)
from .propagation import (
    ControlSet,
    SystemModel,
    TimeGrid,
    Trajectory,
    _TaylorStepper,
    _forward_generator,
    propagate_backward,
    propagate_forward,
)

SHAPE_FLOOR = 1e-8


@dataclass(frozen=True)
class KrotovSettings:
    """Step sizes and iteration control for one optimization run.

    ``lam`` is the per-track step-size parameter (larger means smaller
    updates); a scalar applies to every track.
    """

    lam: float | dict[str, float]
    ramp_fraction: float = 0.05
    max_iters: int = 100
    j_tol: float = 0.0
    adaptive_weights: bool = False
    step_tol: float = 1e-12
    monotonic_slack: float = 1e-10

    def __post_init__(self):
        if isinstance(self.lam, dict):
            bad = {k: v for k, v in self.lam.items() if v <= 0}
        else:
            bad = {} if self.lam > 0 else {"lam": self.lam}
        if bad:
            raise ValueError(f"step-size parameters must be positive, got {bad}")
        if not 0.0 < self.ramp_fraction < 0.5:
            raise ValueError(f"ramp_fraction must be in (0, 0.5), got {self.ramp_fraction}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")
        if self.j_tol < 0:
            raise ValueError(f"j_tol must be nonnegative, got {self.j_tol}")

    def lam_for(self, name: str) -> float:
        if isinstance(self.lam, dict):
            if name not in self.lam:
                raise ValueError(f"no step-size parameter for track {name!r}")
            return self.lam[name]
        return self.lam


@dataclass
class IterationRecord:
    iteration: int
    j_value: float
    d_value: float
    g_value: float
    report: DistanceReport
    max_updates: dict[str, float]
    alpha1: float
    alpha2: float


@dataclass
class OptimizationResult:
    controls: ControlSet
    records: list[IterationRecord]
    trajectory: Trajectory

    @property
    def final_state(self) -> np.ndarray:
        return self.trajectory.final


def shape_function(t: float, t_final: float, ramp_fraction: float) -> float:
    """Sine-squared switch-on/off window with a strictly positive floor."""
    t_ramp = ramp_fraction * t_final
    if t < t_ramp:
        value = math.sin(0.5 * math.pi * t / t_ramp) ** 2
    elif t > t_final - t_ramp:
        value = math.sin(0.5 * math.pi * (t_final - t) / t_ramp) ** 2
    else:
        value = 1.0
    return max(value, SHAPE_FLOOR)


def _update_overlap(chi, rho, control_op, kind):
    if kind == "coupling":
        deriv = -1j * (control_op @ rho - rho @ control_op)
    elif kind == "rate":
        opd = control_op.conj().T
        opdop = opd @ control_op
        deriv = control_op @ rho @ opd - 0.5 * (opdop @ rho + rho @ opdop)
    else:
        raise ValueError(f"unknown control kind {kind!r}")
    return float(np.real(np.sum(chi.conj() * deriv)))


def field_update(chi, rho, control_op, shape, lam, ref_value, kind="coupling"):
    """One sample of the Krotov update equation.

    For a linearly coupled control Hamiltonian the generator derivative is the
    commutator map; for a controlled decay rate it is the bare dissipator.
    """
    return ref_value + (shape / lam) * _update_overlap(chi, rho, control_op, kind)


def _adaptive_weights(report: DistanceReport, previous: tuple[float, float]):
    """Renormalized angle/length weights from the current mismatch values."""
    angle = report.d_angle if report.d_angle is not None else 0.0
    length = report.d_length
    total = angle + length
    if total <= 0.0:
        return previous
    return angle / total, length / total


def _sweep(model, controls, chi_traj, rho0, grid, settings):
    """Sequential forward update; returns new controls, final state, penalty."""
    n_coupling = len(model.control_hamiltonians)
    track_ops = list(model.control_hamiltonians) + list(model.control_collapse)
    track_kinds = ["coupling"] * n_coupling + ["rate"] * len(model.control_collapse)
    names = model.control_names
    lams = [settings.lam_for(name) for name in names]

    new = controls.copy()
    dt = grid.dt
    stepper = _TaylorStepper(settings.step_tol)
    rho = np.asarray(rho0, dtype=complex)
    g_value = 0.0
    max_updates = {name: 0.0 for name in names}
    for j in range(grid.n_steps):
        shape = shape_function(grid.midpoints[j], grid.t_final, settings.ramp_fraction)
        chi = chi_traj.states[j]
        for k, name in enumerate(names):
            ref = new.samples[k, j]
            value = field_update(
                chi, rho, track_ops[k], shape, lams[k], ref, kind=track_kinds[k]
            )
            if track_kinds[k] == "rate" and value < 0.0:
                value = 0.0
            delta = value - ref
            new.samples[k, j] = value
            g_value += (lams[k] / shape) * delta * delta * dt
            if abs(delta) > max_updates[name]:
                max_updates[name] = abs(delta)
        rho = stepper.step(_forward_generator(model, new.values_at(j)), rho, dt)
    return new, rho, g_value, max_updates


def krotov_optimize(
    model: SystemModel,
    guess: ControlSet,
    spec: FunctionalSpec,
    rho0: np.ndarray,
    grid: TimeGrid,
    settings: KrotovSettings,
    stop_condition=None,
) -> OptimizationResult:
    """Iterate Krotov updates until max_iters, j_tol, or stop_condition.

    ``stop_condition(record, rho_final)`` may terminate the run early.  With
    fixed weights an increase of the monitored objective beyond
    ``monotonic_slack`` raises :class:`MonotonicityError`.
    """
    adaptive = settings.adaptive_weights or spec.kind == "split-adaptive"
    controls = guess.copy()
    forward = propagate_forward(model, controls, rho0, grid, step_tol=settings.step_tol)
    rho_final = forward.final

    weights = (spec.alpha1, spec.alpha2)
    report = distance_report(rho_final, spec.target, *weights)
    if adaptive:
        weights = _adaptive_weights(report, weights)
    eff_spec = spec.with_weights(*weights)
    d_value = evaluate_functional(eff_spec, rho_final)
    records = [
        IterationRecord(
            0, d_value, d_value, 0.0, report, {n: 0.0 for n in model.control_names}, *weights
        )
    ]

    for iteration in range(1, settings.max_iters + 1):
        if adaptive:
            weights = _adaptive_weights(report, weights)
            eff_spec = spec.with_weights(*weights)
        d_prev = evaluate_functional(eff_spec, rho_final)
        chi_final = costate_seed(eff_spec, rho_final)
        chi_traj = propagate_backward(
            model, controls, chi_final, grid, step_tol=settings.step_tol
        )
        controls, rho_final, g_value, max_updates = _sweep(
            model, controls, chi_traj, rho0, grid, settings
        )
        d_value = evaluate_functional(eff_spec, rho_final)
        if not adaptive and d_value > d_prev + settings.monotonic_slack:
            raise MonotonicityError(
                f"objective increased from {d_prev!r} to {d_value!r} at iteration {iteration}",
                j_previous=d_prev,
                j_current=d_value,
            )
        report = distance_report(rho_final, spec.target, *weights)
        records.append(
            IterationRecord(
                iteration, d_value + g_value, d_value, g_value, report, max_updates, *weights
            )
        )
        if stop_condition is not None and stop_condition(records[-1], rho_final):
            break
        if settings.j_tol > 0 and d_prev - d_value < settings.j_tol:
            break

    trajectory = propagate_forward(model, controls, rho0, grid, step_tol=settings.step_tol)
    return OptimizationResult(controls, records, trajectory)
