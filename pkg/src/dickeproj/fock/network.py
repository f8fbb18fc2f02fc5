"""Passive linear optics: symmetric distribution onto output modes and loss beam splitters."""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Sequence

import numpy as np

from ..errors import DomainError
from .expansion import FockExpansion, ModeId, transform
from .sources import SPDC_MODE


@dataclass(frozen=True)
class LossModel:
    """Fiber coupling and detector efficiencies; both act as one transmission ``eta_c * eta_d``."""

    eta_c: float = 1.0
    eta_d: float = 1.0

    def __post_init__(self):
        for name in ("eta_c", "eta_d"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise DomainError(f"{name} must lie in [0, 1], got {value}")

    @property
    def eta(self) -> float:
        return self.eta_c * self.eta_d


def distribute(state: FockExpansion, outputs: Sequence[str], weights: Sequence[complex] | None = None,
               source: str = SPDC_MODE) -> FockExpansion:
    """Split spatial mode ``source`` onto ``outputs``: ``s_j^+ -> sum_k w_k out_{k,j}^+``.

    Polarization and tags are preserved. Default weights are ``1/sqrt(k)``.
    """
    outputs = list(outputs)
    if not outputs:
        raise DomainError("need at least one output mode")
    if weights is None:
        weights = [1 / sqrt(len(outputs))] * len(outputs)
    weights = [complex(w) for w in weights]
    if len(weights) != len(outputs):
        raise DomainError("one weight per output mode required")
    if abs(sum(abs(w) ** 2 for w in weights) - 1) > 1e-12:
        raise DomainError("splitting weights must satisfy sum |w|^2 = 1")
    mapping = {}
    for m in state.modes:
        if m.spatial == source:
            mapping[m] = [(ModeId(out, m.pol, m.tag), w) for out, w in zip(outputs, weights)]
    return transform(state, mapping)


def loss_mode(mode: ModeId) -> ModeId:
    return ModeId(f"loss:{mode.spatial}", mode.pol, mode.tag)


def apply_loss(state: FockExpansion, loss: LossModel | float, spatial: Sequence[str] | None = None) -> FockExpansion:
    """Beam splitter on every detectable mode (or those in ``spatial``).

    Transmission ``sqrt(eta)`` keeps a photon; reflection ``sqrt(1-eta)`` sends
    it into a fresh ``loss:<spatial>`` ancilla that is never detected.
    """
    eta = loss.eta if isinstance(loss, LossModel) else float(loss)
    if not (0.0 <= eta <= 1.0):
        raise DomainError(f"transmission must lie in [0, 1], got {eta}")
    if eta == 1.0:
        return state
    t, r = sqrt(eta), sqrt(1 - eta)
    mapping = {}
    for m in state.modes:
        if m.is_loss or (spatial is not None and m.spatial not in spatial):
            continue
        mapping[m] = [(m, t), (loss_mode(m), r)]
    return transform(state, mapping)


def phase_shift(state: FockExpansion, phases: dict[str, float]) -> FockExpansion:
    """Phase ``e^{i phi}`` per photon in each listed spatial mode."""
    mapping = {m: [(m, np.exp(1j * phases[m.spatial]))] for m in state.modes if m.spatial in phases}
    return transform(state, mapping)
