"""Concrete systems: controllable-decay qubit and the driven optomechanical pair.

All rates and couplings are angular frequencies (rad/s); configuration layers
convert ordinary-frequency inputs by 2*pi before building parameters here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalConsistencyError
from .operators import (
    annihilation,
    basis_projector,
    expectation,
    identity,
    partial_trace,
    tensor,
    thermal_state,
)
from .propagation import SystemModel

ZERO_POINT_VARIANCE = 0.5


def qubit_decay_model() -> SystemModel:
    """Qubit with a controllable decay rate u(t) >= 0 on the lowering channel.

    No Hamiltonian; default initial state is the excited state, so the ground
    population alpha(t) is fully determined by the accumulated decay.
    """
    sigma_minus = annihilation(2)
    return SystemModel(
        dim=2,
        drift_hamiltonian=None,
        control_collapse=(sigma_minus,),
        rate_names=("u",),
        initial_state=basis_projector(2, 1),
    )


@dataclass(frozen=True)
class OptomechParams:
    """Cavity-resonator parameters; kappa and gamma_m in rad/s."""

    kappa: float
    gamma_m: float
    n_th: float
    n_cav: int
    n_res: int
    g_minus: float
    g_plus: float

    def __post_init__(self):
        if self.kappa <= 0 or self.gamma_m <= 0:
            raise ValueError("kappa and gamma_m must be positive")
        if self.n_th < 0:
            raise ValueError(f"n_th must be nonnegative, got {self.n_th}")
        if self.n_cav < 2 or self.n_res < 2:
            raise ValueError("need at least 2 levels per mode")
        if self.g_minus <= 0:
            raise ValueError(f"g_minus must be positive, got {self.g_minus}")
        ratio = self.g_plus / self.g_minus
        if not 0.0 <= ratio < 1.0:
            raise ValueError(
                f"g_plus/g_minus = {ratio} outside [0, 1); no damped steady state"
            )

    @classmethod
    def from_cooperativity(
        cls, cooperativity, g_ratio, kappa, gamma_m, n_th, n_cav, n_res
    ) -> "OptomechParams":
        g_minus = g_from_cooperativity(cooperativity, kappa, gamma_m)
        return cls(kappa, gamma_m, n_th, n_cav, n_res, g_minus, g_ratio * g_minus)

    @property
    def cooperativity(self) -> float:
        return cooperativity(self.g_minus, self.kappa, self.gamma_m)

    @property
    def dim(self) -> int:
        return self.n_cav * self.n_res


def cooperativity(g_minus: float, kappa: float, gamma_m: float) -> float:
    """4 g_minus^2 / (kappa gamma_m)."""
    return 4.0 * g_minus**2 / (kappa * gamma_m)


def g_from_cooperativity(coop: float, kappa: float, gamma_m: float) -> float:
    return math.sqrt(coop * kappa * gamma_m) / 2.0


def desk_scale_params() -> OptomechParams:
    """Small-truncation parameter set that thermalizes within ~1e4 steps.

    The phonon decay rate is rescaled (300 Hz instead of 3 Hz) so that CI-size
    runs resolve the full approach to the steady state.
    """
    return OptomechParams.from_cooperativity(
        cooperativity=10.0,
        g_ratio=0.5,
        kappa=2 * math.pi * 450e3,
        gamma_m=2 * math.pi * 300.0,
        n_th=0.5,
        n_cav=3,
        n_res=12,
    )


def paper_scale_params() -> OptomechParams:
    """Full-size parameter set of the squeezing study (hours-scale runs)."""
    return OptomechParams.from_cooperativity(
        cooperativity=100.0,
        g_ratio=0.7,
        kappa=2 * math.pi * 450e3,
        gamma_m=2 * math.pi * 3.0,
        n_th=2.0,
        n_cav=4,
        n_res=40,
    )


def optomech_model(p: OptomechParams) -> SystemModel:
    """Two-tone driven cavity-resonator system on the joint truncated space.

    Control tracks are the effective coupling rates G_-(t) (beam-splitter
    term) and G_+(t) (two-mode squeezing term); the counter-rotating terms
    are dropped.  Collapse channels: photon decay and thermal phonon
    decay/excitation.
    """
    id_cav = identity(p.n_cav)
    id_res = identity(p.n_res)
    d = tensor(annihilation(p.n_cav), id_res)
    b = tensor(id_cav, annihilation(p.n_res))
    dd = d.conj().T
    bd = b.conj().T

    h_minus = -(dd @ b + bd @ d)
    h_plus = -(dd @ bd + b @ d)

    collapse = [math.sqrt(p.kappa) * d, math.sqrt(p.gamma_m * (p.n_th + 1.0)) * b]
    if p.n_th > 0:
        collapse.append(math.sqrt(p.gamma_m * p.n_th) * bd)

    initial = tensor(basis_projector(p.n_cav, 0), thermal_state(p.n_res, p.n_th))
    return SystemModel(
        dim=p.dim,
        drift_hamiltonian=None,
        control_hamiltonians=(h_minus, h_plus),
        coupling_names=("g_minus", "g_plus"),
        collapse_ops=tuple(collapse),
        initial_state=initial,
        subsystem_dims=(p.n_cav, p.n_res),
    )


def x1_squared_operator(n_levels: int) -> np.ndarray:
    """Square of the quadrature (b + b^dag)/sqrt(2) on a single mode."""
    b = annihilation(n_levels)
    x1 = (b + b.conj().T) / math.sqrt(2.0)
    return x1 @ x1


def x1_variance(rho_joint: np.ndarray, subsystem_dims) -> float:
    """Mechanical quadrature variance <X1^2> of the reduced resonator state."""
    if subsystem_dims is None:
        rho_res = rho_joint
    else:
        rho_res = partial_trace(rho_joint, list(subsystem_dims), keep=1)
    return expectation(rho_res, x1_squared_operator(rho_res.shape[0]))


def squeezing_db(variance: float) -> float:
    """Squeezing relative to the zero-point variance, in dB (positive = squeezed)."""
    if variance <= 0:
        raise NumericalConsistencyError(f"nonpositive quadrature variance {variance}")
    return 10.0 * math.log10(ZERO_POINT_VARIANCE / variance)
