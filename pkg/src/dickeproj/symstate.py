"""Pure states of a few polarization qubits.

Amplitudes are stored densely over the computational basis. Qubit 1 is the
most significant bit of the basis index; bit value 0 is ``|H>`` and 1 is
``|V>``, so ``|HHV>`` sits at index ``0b001``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import comb, sqrt, pi
from typing import Iterable, Sequence

import numpy as np

from .errors import AnnihilationError, DegenerateError, DomainError, NotInFamilyError

MAX_QUBITS = 8
ZERO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized ket over ``n`` qubits."""

    amp: np.ndarray = field(repr=False)

    def __post_init__(self):
        amp = np.array(self.amp, dtype=np.complex128).ravel()
        n = amp.size.bit_length() - 1
        if amp.size < 2 or 1 << n != amp.size:
            raise DomainError(f"amplitude vector length {amp.size} is not 2**n with n >= 1")
        if n > MAX_QUBITS:
            raise DomainError(f"at most {MAX_QUBITS} qubits are supported, got {n}")
        norm = np.linalg.norm(amp)
        if norm < ZERO_TOL:
            raise DegenerateError("zero vector cannot be normalized")
        amp = amp / norm
        amp.setflags(write=False)
        object.__setattr__(self, "amp", amp)

    @property
    def n(self) -> int:
        return self.amp.size.bit_length() - 1

    def tensor(self) -> np.ndarray:
        return self.amp.reshape((2,) * self.n)

    def canonical(self) -> "PureState":
        """Same ray with the first nonzero amplitude made real and positive."""
        k = int(np.flatnonzero(np.abs(self.amp) > ZERO_TOL)[0])
        phase = self.amp[k] / abs(self.amp[k])
        return PureState(self.amp / phase)

    def to_dict(self) -> dict:
        return {"n": self.n, "amp": [[float(a.real), float(a.imag)] for a in self.amp]}

    @classmethod
    def from_dict(cls, data: dict) -> "PureState":
        amp = np.array([complex(re, im) for re, im in data["amp"]])
        state = cls(amp)
        if state.n != data["n"]:
            raise DomainError(f"declared n={data['n']} does not match {amp.size} amplitudes")
        return state

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PureState":
        return cls.from_dict(json.loads(text))

    def ket_string(self, digits: int = 6) -> str:
        parts = []
        for k in np.flatnonzero(np.abs(self.amp) > 1e-10):
            a = self.amp[k]
            label = format(int(k), f"0{self.n}b").replace("0", "H").replace("1", "V")
            parts.append(f"({_fmt_complex(a, digits)})|{label}>")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"PureState(n={self.n}, {self.ket_string(4)})"


def _fmt_complex(a: complex, digits: int) -> str:
    re = float(np.round(a.real, 12)) + 0.0
    im = float(np.round(a.imag, 12)) + 0.0
    if im == 0:
        return f"{re:.{digits}g}"
    if re == 0:
        return f"{im:.{digits}g}j"
    return f"{re:.{digits}g}{im:+.{digits}g}j"


@dataclass(frozen=True)
class ProjectorSpec:
    """Projection onto ``alpha|H> + beta e^{i eps}|V>`` with ``beta = sqrt(1 - alpha**2)``."""

    alpha: float
    eps: float = 0.0
    # exact V amplitude when known, e.g. for an orthogonal partner of alpha ~ 0
    _beta: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0 + 1e-12):
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        object.__setattr__(self, "alpha", min(float(self.alpha), 1.0))
        object.__setattr__(self, "eps", float(self.eps) % (2 * pi))

    @property
    def beta(self) -> float:
        if self._beta is not None:
            return self._beta
        return sqrt(max(0.0, 1.0 - self.alpha**2))

    @property
    def ket(self) -> np.ndarray:
        return np.array([self.alpha, self.beta * np.exp(1j * self.eps)])

    def orthogonal(self) -> "ProjectorSpec":
        return ProjectorSpec(self.beta, self.eps + pi, self.alpha)


HV_BASIS = ProjectorSpec(1.0)


@dataclass(frozen=True, eq=False)
class LocalOperator:
    matrix: np.ndarray
    unitary: bool = False

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise DomainError(f"local operator must be 2x2, got shape {m.shape}")
        if self.unitary and not np.allclose(m.conj().T @ m, np.eye(2), atol=1e-12, rtol=0):
            raise DomainError("operator flagged unitary is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


IDENTITY = LocalOperator(np.eye(2), unitary=True)
SIGMA_X = LocalOperator([[0, 1], [1, 0]], unitary=True)
SIGMA_Y = LocalOperator([[0, -1j], [1j, 0]], unitary=True)
SIGMA_Z = LocalOperator([[1, 0], [0, -1]], unitary=True)
HADAMARD = LocalOperator(np.array([[1, 1], [1, -1]]) / sqrt(2), unitary=True)


def basis_state(label: str) -> PureState:
    """Product state from a string of ``H``/``V`` (or ``0``/``1``) characters."""
    bits = label.upper().replace("H", "0").replace("V", "1")
    if not bits or set(bits) - {"0", "1"}:
        raise DomainError(f"invalid basis label {label!r}")
    amp = np.zeros(1 << len(bits), dtype=complex)
    amp[int(bits, 2)] = 1.0
    return PureState(amp)


def dicke(N: int, m: int) -> PureState:
    """Symmetric ``N``-qubit Dicke state with ``m`` vertical photons."""
    if not (1 <= N <= MAX_QUBITS):
        raise DomainError(f"N must lie in [1, {MAX_QUBITS}], got {N}")
    if not (0 <= m <= N):
        raise DomainError(f"excitation count m={m} out of range for N={N}")
    amp = np.zeros(1 << N, dtype=complex)
    for ones in itertools.combinations(range(N), m):
        amp[sum(1 << (N - 1 - q) for q in ones)] = 1.0
    return PureState(amp)


def superpose(terms: Iterable[tuple[complex, PureState]]) -> PureState:
    terms = list(terms)
    if not terms:
        raise DomainError("superposition needs at least one term")
    n = terms[0][1].n
    total = np.zeros(1 << n, dtype=complex)
    for coeff, state in terms:
        if state.n != n:
            raise DomainError(f"cannot superpose {state.n}-qubit and {n}-qubit states")
        total += coeff * state.amp
    if np.linalg.norm(total) < ZERO_TOL:
        raise DegenerateError("superposition has zero norm")
    return PureState(total)


def project_qubit(state: PureState, qubit: int, proj: ProjectorSpec) -> tuple[PureState, float]:
    """Measure ``qubit`` (1-based) with outcome ``proj``.

    Returns the normalized post-measurement state of the remaining qubits and
    the outcome probability.
    """
    if state.n < 2:
        raise DomainError("projection needs at least two qubits")
    if not (1 <= qubit <= state.n):
        raise DomainError(f"qubit index {qubit} out of range 1..{state.n}")
    rest = np.tensordot(proj.ket.conj(), state.tensor(), axes=([0], [qubit - 1])).ravel()
    prob = float(np.vdot(rest, rest).real)
    if prob < ZERO_TOL:
        raise AnnihilationError(f"projection on qubit {qubit} annihilates the state")
    return PureState(rest), prob


def apply_local(state: PureState, ops: Sequence[LocalOperator | np.ndarray]) -> tuple[PureState, float]:
    """Apply one 2x2 operator per qubit; returns the renormalized state and success probability."""
    if len(ops) != state.n:
        raise DomainError(f"need {state.n} local operators, got {len(ops)}")
    psi = state.tensor()
    for q, op in enumerate(ops):
        m = op.matrix if isinstance(op, LocalOperator) else np.asarray(op, dtype=complex)
        psi = np.moveaxis(np.tensordot(m, psi, axes=([1], [q])), 0, q)
    out = psi.ravel()
    prob = float(np.vdot(out, out).real)
    if prob < ZERO_TOL:
        raise AnnihilationError("local operation annihilates the state")
    return PureState(out), prob


def spin_flip(state: PureState) -> PureState:
    return apply_local(state, [SIGMA_X] * state.n)[0]


def fidelity_pure(a: PureState, b: PureState) -> float:
    if a.n != b.n:
        raise DomainError(f"qubit numbers differ: {a.n} vs {b.n}")
    return float(min(1.0, abs(np.vdot(a.amp, b.amp)) ** 2))


def equal_up_to_phase(a: PureState, b: PureState, tol: float = 1e-10) -> bool:
    return a.n == b.n and 1.0 - fidelity_pure(a, b) <= tol


def _check_alpha(alpha: float, name: str = "alpha") -> float:
    if not (0.0 <= alpha <= 1.0 + 1e-12):
        raise DomainError(f"{name} must lie in [0, 1], got {alpha}")
    return min(float(alpha), 1.0)


def delta5(alpha: float, eps: float) -> PureState:
    """``alpha|D5^(2)> + beta e^{i eps}|D5^(3)>``."""
    alpha = _check_alpha(alpha)
    beta = sqrt(max(0.0, 1.0 - alpha**2))
    return superpose([(alpha, dicke(5, 2)), (beta * np.exp(1j * eps), dicke(5, 3))])


def delta4_coefficients(alpha: float, eps: float, alpha_p: float, eps_p: float) -> tuple[complex, complex, complex]:
    """Unnormalized weights of ``|D4^(1)>, |D4^(2)>, |D4^(3)>`` after projecting the fifth qubit."""
    alpha, alpha_p = _check_alpha(alpha), _check_alpha(alpha_p, "alpha_p")
    beta, beta_p = sqrt(max(0.0, 1 - alpha**2)), sqrt(max(0.0, 1 - alpha_p**2))
    c1 = alpha * beta_p * np.exp(-1j * eps_p)
    c3 = alpha_p * beta * np.exp(1j * eps)
    c2 = (alpha * alpha_p + beta * beta_p * np.exp(1j * (eps - eps_p))) * sqrt(6 / 4)
    return complex(c1), complex(c2), complex(c3)


def delta4_formula(alpha: float, eps: float, alpha_p: float, eps_p: float) -> PureState:
    c1, c2, c3 = delta4_coefficients(alpha, eps, alpha_p, eps_p)
    if abs(c1) + abs(c2) + abs(c3) < ZERO_TOL:
        raise AnnihilationError("all Dicke components vanish")
    return superpose([(c1, dicke(4, 1)), (c2, dicke(4, 2)), (c3, dicke(4, 3))])


def delta3(alpha: float, eps: float, alpha_p: float, eps_p: float,
           alpha_pp: float, eps_pp: float) -> PureState:
    """Symmetric three-qubit state left after two single-qubit projections of ``delta5``.

    The D3^(1) and D3^(2) brackets carry the four-qubit D4^(2) weight without
    an extra sqrt(6/4): that factor is already inside ``delta4_coefficients``.
    """
    alpha_pp = _check_alpha(alpha_pp, "alpha_pp")
    beta_pp = sqrt(max(0.0, 1 - alpha_pp**2))
    c1, c2, c3 = delta4_coefficients(alpha, eps, alpha_p, eps_p)
    mix = c2 / sqrt(6 / 4)
    down = beta_pp * np.exp(-1j * eps_pp)
    d0 = c1 * down
    d3 = c3 * alpha_pp
    d1 = (c1 * alpha_pp + mix * down) * sqrt(3)
    d2 = (c3 * down + mix * alpha_pp) * sqrt(3)
    if abs(d0) + abs(d1) + abs(d2) + abs(d3) < ZERO_TOL:
        raise AnnihilationError("all Dicke components vanish")
    return superpose([(d0, dicke(3, 0)), (d1, dicke(3, 1)), (d2, dicke(3, 2)), (d3, dicke(3, 3))])


def decompose_ghz_dicke(state: PureState, tol: float = 1e-9) -> tuple[complex, complex]:
    """Coefficients ``(mu, nu)`` with ``state = mu|GHZ4+> + nu|D4^(2)>``."""
    if state.n != 4:
        raise DomainError(f"expected a four-qubit state, got n={state.n}")
    mu = complex(np.vdot(GHZ4_PLUS.amp, state.amp))
    nu = complex(np.vdot(D4_2.amp, state.amp))
    residual = np.linalg.norm(state.amp - mu * GHZ4_PLUS.amp - nu * D4_2.amp)
    if residual > tol:
        raise NotInFamilyError(f"state leaves span(GHZ4+, D4^(2)) by {residual:.3g}")
    return mu, nu


H = basis_state("H")
V = basis_state("V")
D4_2 = dicke(4, 2)
W3 = dicke(3, 1)
WBAR3 = dicke(3, 2)
W4 = dicke(4, 1)
WBAR4 = dicke(4, 3)
GHZ3 = superpose([(1, basis_state("HHH")), (1, basis_state("VVV"))])
GHZ3_MINUS = superpose([(1, basis_state("HHH")), (-1, basis_state("VVV"))])
GHZ3_PLUS = apply_local(GHZ3_MINUS, [HADAMARD] * 3)[0]
G3_PLUS = superpose([(1, W3), (1, WBAR3)])
G3_MINUS = superpose([(1, WBAR3), (-1, W3)])
GHZ4 = superpose([(1, basis_state("HHHH")), (1, basis_state("VVVV"))])
GHZ4_MINUS = superpose([(1, basis_state("HHHH")), (-1, basis_state("VVVV"))])
GHZ4_PLUS = superpose([(1, W4), (1, WBAR4)])

NAMED_STATES: dict[str, PureState] = {
    "GHZ3": GHZ3,
    "GHZ3-": GHZ3_MINUS,
    "GHZ3+": GHZ3_PLUS,
    "W3": W3,
    "Wbar3": WBAR3,
    "G3+": G3_PLUS,
    "G3-": G3_MINUS,
    "GHZ4": GHZ4,
    "GHZ4-": GHZ4_MINUS,
    "GHZ4+": GHZ4_PLUS,
    "W4": W4,
    "Wbar4": WBAR4,
}


def named_state(name: str) -> PureState:
    """Resolve a state name.

    Accepts the registry keys above, ``D<N>_<m>`` Dicke labels, strings of
    ``H``/``V`` and ``delta5:<alpha>,<eps>``.
    """
    if name in NAMED_STATES:
        return NAMED_STATES[name]
    if name.lower().startswith("delta5:"):
        try:
            alpha, eps = (float(x) for x in name.split(":", 1)[1].split(","))
        except ValueError:
            raise DomainError(f"delta5 needs two numbers, got {name!r}") from None
        return delta5(alpha, eps)
    if name[:1] in "Dd" and "_" in name:
        try:
            N, m = (int(x) for x in name[1:].split("_"))
        except ValueError:
            raise DomainError(f"bad Dicke label {name!r}") from None
        return dicke(N, m)
    if name and set(name.upper()) <= {"H", "V"}:
        return basis_state(name)
    raise DomainError(f"unknown state {name!r}")
