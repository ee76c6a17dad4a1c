"""Final-time target functionals, their gradients, and distance diagnostics.

The optimizable functionals (re, sm, hs, split) come with closed-form
gradients used to seed the backward co-state.  The remaining measures (trace,
Bures, Hellinger, Jensen-Shannon) are diagnostics only: they are reliable
indicators of state mismatch but have no practical closed-form derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateStateError,
    NumericalConsistencyError,
    UndefinedAngleError,
)
from .operators import (
    bloch_dot,
    check_hermitian,
    hermitian_sqrt,
    hs_overlap,
    von_neumann_entropy,
)

FUNCTIONAL_KINDS = ("re", "sm", "hs", "split", "split-adaptive")

# Below this squared Bloch length a state counts as maximally mixed and its
# Bloch direction is undefined.
MIXED_CUTOFF = 1e-14

# Guard for the angle gradient: when d11*d22 - d12^2 falls below this the
# states are (anti)parallel and the analytic gradient limit is zero.
PARALLEL_CUTOFF = 1e-24

ARCCOS_SLACK = 1e-12


@dataclass(frozen=True)
class FunctionalSpec:
    """Target functional selection with weights for the split variant."""

    kind: str
    target: np.ndarray
    alpha1: float = 0.5
    alpha2: float = 0.5

    def __post_init__(self):
        if self.kind not in FUNCTIONAL_KINDS:
            raise ValueError(f"unknown functional kind {self.kind!r}; expected {FUNCTIONAL_KINDS}")
        check_hermitian(self.target, 1e-10, "target state")
        if self.alpha1 < 0 or self.alpha2 < 0:
            raise ValueError("functional weights must be nonnegative")
        if self.kind.startswith("split") and self.alpha1 + self.alpha2 <= 0:
            raise ValueError("split functional needs alpha1 + alpha2 > 0")

    def with_weights(self, alpha1: float, alpha2: float) -> "FunctionalSpec":
        return replace(self, alpha1=alpha1, alpha2=alpha2)


def tau(rho: np.ndarray, target: np.ndarray) -> float:
    """Mixed-state overlap: the (real) Hilbert-Schmidt overlap of the states."""
    return float(np.real(hs_overlap(rho, target)))


def d_re(rho: np.ndarray, target: np.ndarray) -> float:
    return 1.0 - tau(rho, target)


def d_sm(rho: np.ndarray, target: np.ndarray) -> float:
    return 1.0 - tau(rho, target) ** 2


def d_hs(rho: np.ndarray, target: np.ndarray) -> float:
    """Half the squared Hilbert-Schmidt norm of the difference."""
    diff = rho - target
    return 0.5 * float(np.real(np.sum(diff.conj() * diff)))


def _angle_cosine(d11: float, d22: float, d12: float) -> float:
    arg = d12 / math.sqrt(d11 * d22)
    # The overlaps carry absolute rounding error of order eps, which the
    # division amplifies by 1/min(d11, d22) near the maximally mixed point;
    # the permitted slack tracks that conditioning.
    slack = ARCCOS_SLACK + 64.0 * np.finfo(float).eps / min(d11, d22, 1.0)
    if arg > 1.0 + slack or arg < -1.0 - slack:
        raise NumericalConsistencyError(
            f"Bloch angle cosine {arg!r} outside [-1, 1] beyond slack {slack:.1e}"
        )
    return min(1.0, max(-1.0, arg))


def d_angle(rho: np.ndarray, target: np.ndarray) -> float:
    """Squared Bloch-vector angle, normalized to [0, 1]."""
    d11 = bloch_dot(rho, rho)
    d22 = bloch_dot(target, target)
    if d11 <= MIXED_CUTOFF or d22 <= MIXED_CUTOFF:
        raise UndefinedAngleError(
            "Bloch angle undefined: at least one state is maximally mixed"
        )
    theta = math.acos(_angle_cosine(d11, d22, bloch_dot(rho, target)))
    return theta**2 / math.pi**2


def d_length(rho: np.ndarray, target: np.ndarray) -> float:
    """Squared Bloch-length mismatch, normalized to [0, 1]."""
    n = rho.shape[0]
    d11 = max(bloch_dot(rho, rho), 0.0)
    d22 = max(bloch_dot(target, target), 0.0)
    return n / (n - 1) * (math.sqrt(d11) - math.sqrt(d22)) ** 2


def d_split(spec: FunctionalSpec, rho: np.ndarray) -> float:
    """Weighted sum of angle and length mismatch against spec.target."""
    return spec.alpha1 * d_angle(rho, spec.target) + spec.alpha2 * d_length(rho, spec.target)


def evaluate_functional(spec: FunctionalSpec, rho: np.ndarray) -> float:
    """Value of the selected functional for the forward state ``rho``."""
    if spec.kind == "re":
        return d_re(rho, spec.target)
    if spec.kind == "sm":
        return d_sm(rho, spec.target)
    if spec.kind == "hs":
        return d_hs(rho, spec.target)
    # split / split-adaptive; a maximally mixed target drops the angle term
    target = spec.target
    d22 = bloch_dot(target, target)
    if d22 <= MIXED_CUTOFF:
        return spec.alpha2 * d_length(rho, target)
    return d_split(spec, rho)


def costate_seed(spec: FunctionalSpec, rho_final: np.ndarray) -> np.ndarray:
    """Boundary co-state chi(T) = -grad_rho D at the forward final state."""
    target = spec.target
    if spec.kind == "re":
        return target.astype(complex)
    if spec.kind == "sm":
        return 2.0 * tau(rho_final, target) * target.astype(complex)
    if spec.kind == "hs":
        return (target - rho_final).astype(complex)

    d11 = bloch_dot(rho_final, rho_final)
    d22 = bloch_dot(target, target)
    d12 = bloch_dot(rho_final, target)
    if d11 <= MIXED_CUTOFF:
        raise DegenerateStateError(
            "forward state is maximally mixed; split-functional gradient undefined"
        )
    n = rho_final.shape[0]
    grad = (
        spec.alpha2
        * 2.0
        * n
        / (n - 1)
        * (math.sqrt(d11) - math.sqrt(max(d22, 0.0)))
        / math.sqrt(d11)
        * rho_final
    )
    if d22 > MIXED_CUTOFF:
        disc = d11 * d22 - d12**2
        if disc >= PARALLEL_CUTOFF:
            theta = math.acos(_angle_cosine(d11, d22, d12))
            grad_angle = (
                -2.0
                / math.pi**2
                * theta
                * (target - (d12 / d11) * rho_final)
                / math.sqrt(disc)
            )
            grad = grad + spec.alpha1 * grad_angle
    return -np.asarray(grad, dtype=complex)


def d_trace(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Trace distance, half the sum of absolute eigenvalues of the difference."""
    if rho1.shape != rho2.shape:
        raise ValueError(f"state shapes differ: {rho1.shape} vs {rho2.shape}")
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(rho1 - rho2))))


def _clamped_sqrt(value: float, what: str) -> float:
    if value < -1e-9:
        raise NumericalConsistencyError(f"{what} radicand {value:.3e} below -1e-9")
    return math.sqrt(max(value, 0.0))


def d_bures(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Bures distance from the Uhlmann fidelity."""
    s1 = hermitian_sqrt(rho1)
    inner = hermitian_sqrt(s1 @ rho2 @ s1)
    fidelity = float(np.real(np.trace(inner)))
    return _clamped_sqrt(1.0 - fidelity, "Bures")


def d_hellinger(rho1: np.ndarray, rho2: np.ndarray) -> float:
    overlap = float(np.real(hs_overlap(hermitian_sqrt(rho1), hermitian_sqrt(rho2))))
    return _clamped_sqrt(1.0 - overlap, "Hellinger")


def d_js(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Jensen-Shannon divergence built from E(rho) = Tr{rho ln rho}.

    Signs are arranged so the radicand is the (nonnegative) entropy of the
    mixture minus the mean entropy.
    """
    e_mix = von_neumann_entropy(0.5 * (rho1 + rho2))
    radicand = 0.5 * von_neumann_entropy(rho1) + 0.5 * von_neumann_entropy(rho2) - e_mix
    return _clamped_sqrt(radicand, "Jensen-Shannon")


@dataclass
class DistanceReport:
    """All distance measures between a state and a target in one pass.

    ``d_angle``/``d_split`` are None when the angle is undefined (a maximally
    mixed state on either side).
    """

    d_re: float
    d_sm: float
    d_hs: float
    d_angle: float | None
    d_length: float
    d_split: float | None
    d_trace: float
    d_bures: float
    d_hellinger: float
    d_js: float


def distance_report(
    rho: np.ndarray,
    target: np.ndarray,
    alpha1: float = 0.5,
    alpha2: float = 0.5,
) -> DistanceReport:
    if rho.shape != target.shape:
        raise ValueError(f"state shapes differ: {rho.shape} vs {target.shape}")
    length = d_length(rho, target)
    try:
        angle = d_angle(rho, target)
        split = alpha1 * angle + alpha2 * length
    except UndefinedAngleError:
        angle = None
        split = None
    return DistanceReport(
        d_re=d_re(rho, target),
        d_sm=d_sm(rho, target),
        d_hs=d_hs(rho, target),
        d_angle=angle,
        d_length=length,
        d_split=split,
        d_trace=d_trace(rho, target),
        d_bures=d_bures(rho, target),
        d_hellinger=d_hellinger(rho, target),
        d_js=d_js(rho, target),
    )
