"""Three-tangle, fidelity witnesses and the local filters that move states between SLOCC representatives."""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .errors import DomainError, NotRetargetableError
from .symstate import (
    G3_PLUS,
    HADAMARD,
    LocalOperator,
    ProjectorSpec,
    PureState,
    apply_local,
    delta5,
    dicke,
    fidelity_pure,
    project_qubit,
)

TANGLE_ZERO = 1e-9


def hyperdeterminant(state: PureState) -> complex:
    """Cayley hyperdeterminant of the 2x2x2 amplitude tensor."""
    if state.n != 3:
        raise DomainError(f"three-tangle needs exactly three qubits, got {state.n}")
    a = state.tensor()
    d1 = (a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2 + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
          + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2 + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2)
    d2 = (a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
          + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1])
    d3 = (a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
          + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0])
    return complex(d1 - 2 * d2 + 4 * d3)


def three_tangle(state: PureState) -> float:
    return float(4 * abs(hyperdeterminant(state)))


def is_ghz_class(state: PureState) -> bool:
    return three_tangle(state) >= TANGLE_ZERO


def _conjugated(inner: np.ndarray) -> LocalOperator:
    h = HADAMARD.matrix
    return LocalOperator(h @ inner @ h)


_S3 = 1 / sqrt(3)
T_PLUS = _conjugated(((_S3 + 1j) * np.eye(2) + (_S3 - 1j) * np.diag([1, -1])) / 2)
T_MINUS = _conjugated(((_S3 + 1j) * np.array([[0, 1], [1, 0]])
                       + 1j * (_S3 - 1j) * np.array([[0, -1j], [1j, 0]])) / 2)


def t_r(r: complex) -> LocalOperator:
    """``[(1 + 1/r) 1 + (1 - 1/r) sigma_z] / 2``, i.e. ``diag(1, 1/r)``."""
    if r == 0:
        raise DomainError("T_r needs r != 0")
    inv = 1 / complex(r)
    return LocalOperator(((1 + inv) * np.eye(2) + (1 - inv) * np.diag([1, -1])) / 2)


def slocc_filter(kind: str, r: complex | None = None) -> LocalOperator:
    """Filter by name: ``"T+"``, ``"T-"`` or ``"Tr"`` (needs ``r``)."""
    if kind in ("T+", "plus"):
        return T_PLUS
    if kind in ("T-", "minus"):
        return T_MINUS
    if kind in ("Tr", "r"):
        if r is None:
            raise DomainError("T_r needs a value for r")
        return t_r(r)
    raise DomainError(f"unknown filter {kind!r}")


def eq1_state(theta: float, eps: float = 0.0) -> PureState:
    """Three-qubit state left by projecting one qubit of D4^(2) onto ``cos(theta)|H> + sin(theta)e^{i eps}|V>``."""
    return project_qubit(dicke(4, 2), 4, ProjectorSpec(float(np.clip(np.cos(theta), 0.0, 1.0)), eps))[0]


def tangle_curve(samples: int, filtered: bool = False) -> list[tuple[float, float]]:
    """Three-tangle along ``theta in [0, pi/2]``, optionally after a successful ``T+`` on every qubit."""
    if samples < 2:
        raise DomainError("need at least two samples")
    out = []
    for theta in np.linspace(0.0, pi / 2, samples):
        state = eq1_state(theta)
        if filtered:
            state = apply_local(state, [T_PLUS] * 3)[0]
        out.append((float(theta), three_tangle(state)))
    return out


def retarget_r(source: tuple[float, float], target: tuple[float, float]) -> complex:
    """Parameter ``r`` such that ``T_r`` on all five qubits maps ``delta5(*source)`` onto ``delta5(*target)``.

    ``source`` and ``target`` are ``(alpha, eps)`` pairs.
    """
    alpha, eps = source
    alpha_t, eps_t = target
    beta, beta_t = sqrt(max(0.0, 1 - alpha**2)), sqrt(max(0.0, 1 - alpha_t**2))
    if min(alpha, beta, alpha_t, beta_t) < 1e-12:
        raise NotRetargetableError("pure Dicke components cannot be reweighted into a superposition or back")
    r = beta * alpha_t * np.exp(1j * eps) / (beta_t * alpha * np.exp(1j * eps_t))
    r = complex(r)
    filtered = apply_local(delta5(alpha, eps), [t_r(r)] * 5)[0]
    if 1 - fidelity_pure(filtered, delta5(alpha_t, eps_t)) > 1e-10:
        raise NotRetargetableError("filter check failed; phase conventions inconsistent")
    return r


@dataclass(frozen=True, eq=False)
class WitnessSpec:
    """Fidelity witness ``offset * 1 - |target><target|``."""

    target: PureState
    offset: float

    def __post_init__(self):
        if not (0 < self.offset < 1):
            raise DomainError(f"witness offset must lie in (0, 1), got {self.offset}")

    def operator(self) -> np.ndarray:
        psi = self.target.amp
        return self.offset * np.eye(psi.size) - np.outer(psi, psi.conj())


def fidelity(target: PureState, state: PureState | np.ndarray) -> float:
    """``<target|rho|target>`` for a pure state or density matrix."""
    if isinstance(state, PureState):
        return fidelity_pure(target, state)
    rho = np.asarray(state, dtype=complex)
    if rho.shape != (target.amp.size,) * 2:
        raise DomainError(f"density matrix shape {rho.shape} does not match {target.n} qubits")
    return float(np.vdot(target.amp, rho @ target.amp).real)


def witness_value(w: WitnessSpec, state: PureState | np.ndarray) -> float:
    return w.offset - fidelity(w.target, state)


def witness_report(w: WitnessSpec, state: PureState | np.ndarray, target_name: str = "") -> dict:
    value = witness_value(w, state)
    return {"target": target_name, "offset": w.offset, "value": value, "entangled": value < 0}


def filtered_g3() -> tuple[PureState, float]:
    """``T+`` on each qubit of ``G3+``: the renormalized output and its success probability."""
    return apply_local(G3_PLUS, [T_PLUS] * 3)

