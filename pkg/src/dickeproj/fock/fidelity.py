"""Fidelity of the engineered four-qubit states under a weak-coherent-beam source.

The sweep exploits linearity: the source product is a sum of monomials
``(w_j^+)^a (s_H^+ s_V^+)^b`` whose weights are the only parameter-dependent
part. Each monomial goes through the optical pipeline once; every grid point
then reduces to small quadratic forms in the monomial weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import cos, pi
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ..errors import DomainError, EmptyPostselectionError
from ..symstate import GHZ4_PLUS, W4, ProjectorSpec, PureState
from .detection import CoincidencePattern, branches, postselect
from .expansion import FockExpansion
from .network import LossModel, apply_loss, distribute
from .sources import (
    SourceParams,
    merge_wcb,
    pair_monomial,
    photon_sector,
    polarization_vector,
    sector_coefficient,
    sector_monomials,
    source_state,
)

OUTPUTS = ("a", "b", "c", "d", "e")
DEFAULT_Z_DC = 0.17


@dataclass(frozen=True)
class TargetSetting:
    """Coherent-beam polarization, projector on mode ``e`` and the ideal four-qubit state."""

    name: str
    wcb_alpha: float
    wcb_eps: float
    proj: ProjectorSpec
    state: PureState

    @property
    def polarization(self) -> tuple[complex, complex]:
        p = polarization_vector(self.wcb_alpha, self.wcb_eps)
        return complex(p[0]), complex(p[1])


TARGETS = {
    "W4": TargetSetting("W4", 1.0, 0.0, ProjectorSpec(0.0), W4),
    # second of the two GHZ4+ solutions (eps = -pi/2, projector phase +pi/2)
    "GHZ4+": TargetSetting("GHZ4+", 2**-0.5, -pi / 2, ProjectorSpec(2**-0.5, pi / 2), GHZ4_PLUS),
}


def target_setting(target: str | TargetSetting) -> TargetSetting:
    if isinstance(target, TargetSetting):
        return target
    try:
        return TARGETS[target]
    except KeyError:
        raise DomainError(f"unknown target {target!r}; choose from {sorted(TARGETS)}") from None


def f_w4_analytic(z_dc: float, z_w: float) -> float:
    """Five-photon-only W4 fidelity, ``1 / (1 + |z_w|^4 / (9 |z_dc|^2))``."""
    if abs(z_dc) == 0:
        raise DomainError("F_W4 needs z_dc != 0")
    return 1.0 / (1.0 + abs(z_w) ** 4 / (9 * abs(z_dc) ** 2))


def f_ghz4_analytic(z_dc: float, z_w: float, phi_w: float) -> float:
    """Five-photon-only GHZ4+ fidelity; largest at ``phi_w = pi/2``."""
    zd, zw = abs(z_dc), abs(z_w)
    if zd == 0 or zw == 0:
        raise DomainError("F_GHZ4+ needs nonzero z_dc and z_w")
    denom = 2 + 36 * zd**2 / zw**4 - 12 * zd / zw**2 * cos(2 * phi_w)
    if denom == 0:
        raise DomainError("degenerate denominator")
    return 1.0 - 1.0 / denom


def coincidence_pattern(setting: TargetSetting) -> CoincidencePattern:
    return CoincidencePattern.build(OUTPUTS[:4], {OUTPUTS[4]: setting.proj})


def optical_pipeline(state: FockExpansion, loss: LossModel | None = None,
                     weights: Sequence[complex] | None = None) -> FockExpansion:
    """Coherent overlap, symmetric five-way split and per-mode loss."""
    out = distribute(merge_wcb(state), OUTPUTS, weights)
    if loss is not None:
        out = apply_loss(out, loss)
    return out


def simulate_point(target: str | TargetSetting, params: SourceParams, loss: LossModel | None = None,
                   sectors: Iterable[int] | None = None, weights: Sequence[complex] | None = None
                   ) -> tuple[float, float, np.ndarray]:
    """Direct pipeline for one parameter point: ``(fidelity, probability, rho)``.

    ``sectors`` restricts the source to the listed total photon numbers;
    ``None`` uses the full source state truncated at ``params.n_max``.
    """
    setting = target_setting(target)
    if sectors is None:
        state = source_state(params)
        out = distribute(state, OUTPUTS, weights)
        if loss is not None:
            out = apply_loss(out, loss)
    else:
        parts = [photon_sector(params, n) for n in sectors]
        state = parts[0]
        for p in parts[1:]:
            state = state + p
        out = optical_pipeline(state, loss, weights)
    rho, prob = postselect(out, coincidence_pattern(setting))
    psi = setting.state.amp
    return float(np.vdot(psi, rho @ psi).real), prob, rho


class _Monomials(NamedTuple):
    keys: tuple[tuple[int, int], ...]
    norm: np.ndarray     # sum_env <v_t|v_t'>
    overlap: np.ndarray  # sum_env <v_t|psi><psi|v_t'>


@lru_cache(maxsize=32)
def _monomial_forms(setting: TargetSetting, eta: float, totals: tuple[int, ...]) -> _Monomials:
    keys = tuple(k for n in totals for k in sector_monomials(n))
    loss = None if eta == 1.0 else eta
    pattern = coincidence_pattern(setting)
    per_key = []
    for a, b in keys:
        state = optical_pipeline(pair_monomial(a, b, setting.polarization))
        if loss is not None:
            state = apply_loss(state, loss)
        per_key.append(branches(state, pattern))
    envs = sorted(set().union(*per_key), key=repr)
    dim = 16
    mats = np.zeros((len(keys), len(envs), dim), dtype=complex)
    index = {e: i for i, e in enumerate(envs)}
    for t, br in enumerate(per_key):
        for env, vec in br.items():
            mats[t, index[env]] = vec
    proj = mats @ setting.state.amp.conj()  # <psi|v>
    norm = np.einsum("sei,tei->st", mats.conj(), mats)
    overlap = np.einsum("se,te->st", proj.conj(), proj)
    return _Monomials(keys, norm, overlap)


class SweepPoint(NamedTuple):
    z_w: float
    phi_w: float
    fidelity: float
    probability: float


def fidelity_sweep(target: str | TargetSetting, z_w_values: Iterable[float], phi_values: Iterable[float],
                   z_dc: float = DEFAULT_Z_DC, loss: LossModel | None = None,
                   include_six_photons: bool = True, n_max: int | None = None,
                   phase_average: bool = False) -> list[SweepPoint]:
    """Fidelity to the target over a ``(|z_w|, phi_w)`` grid.

    Only source terms with at least five photons can fire five detectors, so
    the photon-number sectors ``5..n_max`` are simulated (``n_max`` defaults
    to 6, or 5 without six-photon terms). ``phase_average`` replaces each
    ``phi_w`` by a uniform average over the coherent-beam phase.
    """
    setting = target_setting(target)
    if n_max is None:
        n_max = 6 if include_six_photons else 5
    if n_max < 5:
        raise DomainError("five-fold coincidences need n_max >= 5")
    eta = 1.0 if loss is None else loss.eta
    forms = _monomial_forms(setting, eta, tuple(range(5, n_max + 1)))
    a_of = np.array([a for a, _ in forms.keys])
    same_a = a_of[:, None] == a_of[None, :]
    rows = []
    phis = list(phi_values)
    for z_w in z_w_values:
        for phi in phis:
            params = SourceParams(z_dc, float(z_w), float(phi), setting.polarization, n_max)
            c = np.array([sector_coefficient(params, a, b) for a, b in forms.keys])
            norm_form, overlap_form = forms.norm, forms.overlap
            if phase_average:
                norm_form, overlap_form = norm_form * same_a, overlap_form * same_a
            prob = float(np.real(c.conj() @ norm_form @ c))
            num = float(np.real(c.conj() @ overlap_form @ c))
            fid = num / prob if prob > 0 else float("nan")
            rows.append(SweepPoint(float(z_w), float(phi), fid, prob))
    return rows


def best_point(rows: Sequence[SweepPoint]) -> SweepPoint:
    return max(rows, key=lambda r: r.fidelity)


def enhancement_ratio(z_dc: float, z_w: float, n_max: int = 3, loss: LossModel | None = None,
                      outputs: Sequence[str] = ("a", "b", "c")) -> float:
    """Coherent over incoherent ``HHV`` three-fold rate for an H-polarized coherent beam.

    In the incoherent case the beam photons stay distinguishable from the
    down-converted ones while sharing modes and detectors.
    """
    if z_w == 0 or z_dc == 0:
        raise DomainError("bosonic enhancement needs both sources switched on")
    if len(outputs) < 3:
        raise DomainError("three-fold coincidence needs three output modes")
    params = SourceParams(z_dc, z_w, 0.0, (1.0, 0.0), n_max)
    h, v = ProjectorSpec(1.0), ProjectorSpec(0.0)
    pattern = CoincidencePattern.build((), {outputs[0]: h, outputs[1]: h, outputs[2]: v})
    rates = []
    for coherent in (True, False):
        state = distribute(source_state(params, coherent=coherent), outputs)
        if loss is not None:
            state = apply_loss(state, loss)
        rates.append(postselect(state, pattern)[1])
    return rates[0] / rates[1]


def hv_rate(z_dc: float, z_w: float, phi_w: float, n_max: int = 2, polarization=None) -> float:
    """``HV`` two-fold coincidence probability behind a 50:50 split; left-circular beam by default."""
    if polarization is None:
        polarization = (2**-0.5, -1j * 2**-0.5)
    params = SourceParams(z_dc, z_w, phi_w, polarization, n_max)
    state = distribute(source_state(params), ("a", "b"))
    pattern = CoincidencePattern.build((), {"a": ProjectorSpec(1.0), "b": ProjectorSpec(0.0)})
    try:
        return postselect(state, pattern)[1]
    except EmptyPostselectionError:
        return 0.0
