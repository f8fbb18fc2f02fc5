"""Coincidence postselection with polarization-resolving threshold detectors.

Every analyzed spatial mode ends in a polarizing beam splitter with one
threshold detector per output. A mode is either *kept* (it becomes a qubit,
any single detector may fire) or *conditioned* (only the detector behind a
prescribed projector may fire). An event is accepted when exactly one
detector fires in each analyzed mode.

A photon bunch that lands entirely behind one output is read as that qubit
value, but classically: coherence between a bunch behind one port and a
bunch behind the other does not survive a rotated analysis, so the port of
every bunch joins the environment. Photon numbers, tags, loss ancillas and
unanalyzed modes also form the environment, which is traced out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import DomainError, EmptyPostselectionError
from ..symstate import HV_BASIS, ProjectorSpec
from .expansion import FockExpansion, ModeId, transform


@dataclass(frozen=True)
class CoincidencePattern:
    """Ordered requirements ``(spatial mode, outcome)``.

    ``outcome`` is ``None`` for a kept mode (qubits follow the order of kept
    modes) or the ``ProjectorSpec`` whose detector must fire.
    """

    requirements: tuple[tuple[str, ProjectorSpec | None], ...]

    def __post_init__(self):
        reqs = tuple((str(s), o) for s, o in self.requirements)
        names = [s for s, _ in reqs]
        if len(set(names)) != len(names):
            raise DomainError("one requirement per spatial mode")
        object.__setattr__(self, "requirements", reqs)

    @classmethod
    def build(cls, kept: Sequence[str] = (), conditioned: Mapping[str, ProjectorSpec] | None = None) -> "CoincidencePattern":
        conditioned = dict(conditioned or {})
        return cls(tuple((s, None) for s in kept) + tuple(conditioned.items()))

    @property
    def kept(self) -> tuple[str, ...]:
        return tuple(s for s, o in self.requirements if o is None)

    @property
    def spatial(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.requirements)


def _basis_columns(spec: ProjectorSpec) -> np.ndarray:
    """Columns: the analysis direction and its orthogonal partner, in H/V coordinates."""
    a, b, e = spec.alpha, spec.beta, spec.eps
    return np.array([[a, -b * np.exp(-1j * e)],
                     [b * np.exp(1j * e), a]])


def branches(state: FockExpansion, pattern: CoincidencePattern,
             analysis_bases: Mapping[str, ProjectorSpec] | None = None) -> dict[tuple, np.ndarray]:
    """Unnormalized conditional qubit vectors, one per orthogonal environment record.

    The conditional density matrix is ``sum_env v v^dagger``; vectors are in
    H/V coordinates of the kept modes.
    """
    analysis_bases = dict(analysis_bases or {})
    present = {m.spatial for m in state.modes}
    missing = set(pattern.spatial) - present
    if missing:
        raise DomainError(f"pattern refers to absent modes {sorted(missing)}")
    if set(analysis_bases) - set(pattern.kept):
        raise DomainError("analysis bases given for modes that are not kept")
    if any(m.is_loss for m in state.modes if m.spatial in pattern.spatial):
        raise DomainError("loss ancillas cannot be analyzed")

    bases = {s: (o if o is not None else analysis_bases.get(s, HV_BASIS)) for s, o in pattern.requirements}
    cols = {s: _basis_columns(spec) for s, spec in bases.items()}
    mapping = {}
    for m in state.modes:
        if m.spatial in bases:
            row = 0 if m.pol == "H" else 1
            if m.pol not in ("H", "V"):
                raise DomainError(f"unexpected polarization label {m.pol!r}")
            u = cols[m.spatial]
            # <x|pol> for x in (direction, orthogonal partner)
            mapping[m] = [(ModeId(m.spatial, "0", m.tag), np.conj(u[row, 0])),
                          (ModeId(m.spatial, "1", m.tag), np.conj(u[row, 1]))]
    rotated = transform(state, mapping)

    analyzed = {s: [] for s in pattern.spatial}
    tags: dict[str, list[str]] = {s: [] for s in pattern.spatial}
    env_idx = []
    for i, m in enumerate(rotated.modes):
        if m.spatial in analyzed:
            analyzed[m.spatial].append(i)
            if m.tag not in tags[m.spatial]:
                tags[m.spatial].append(m.tag)
        else:
            env_idx.append(i)
    slots = []
    for s, outcome in pattern.requirements:
        idx = analyzed[s]
        zero = [i for i in idx if rotated.modes[i].pol == "0"]
        one = [i for i in idx if rotated.modes[i].pol == "1"]
        tag_of = {i: tags[s].index(rotated.modes[i].tag) for i in idx}
        slots.append((zero, one, tag_of, len(tags[s]), outcome is None))

    k = len(pattern.kept)
    dim = 1 << k
    out: dict[tuple, np.ndarray] = {}
    for occ, amp in rotated.terms.items():
        bits = 0
        record = []
        ok = True
        for zero, one, tag_of, ntags, is_kept in slots:
            n0 = sum(occ[i] for i in zero)
            n1 = sum(occ[i] for i in one)
            if (n0 == 0) == (n1 == 0) or (not is_kept and n1):
                ok = False
                break
            per_tag = [0] * ntags
            for i in (zero if n0 else one):
                per_tag[tag_of[i]] += occ[i]
            # a bunch reveals its port: no qubit coherence across bunched outcomes
            bunch_port = (1 if n1 else 0) if n0 + n1 > 1 else None
            record.append((tuple(per_tag), bunch_port))
            if is_kept:
                bits = (bits << 1) | (1 if n1 else 0)
        if not ok:
            continue
        key = (tuple(occ[i] for i in env_idx), tuple(record))
        vec = out.get(key)
        if vec is None:
            vec = out[key] = np.zeros(dim, dtype=complex)
        vec[bits] += amp

    kept_cols = [cols[s] for s in pattern.kept]
    if any(not np.allclose(u, np.eye(2)) for u in kept_cols):
        full = np.ones((1, 1), dtype=complex)
        for u in kept_cols:
            full = np.kron(full, u)
        out = {key: full @ v for key, v in out.items()}
    return out


def density_from_branches(vectors) -> tuple[np.ndarray, float]:
    vectors = list(vectors)
    if not vectors:
        raise EmptyPostselectionError("no term satisfies the coincidence pattern")
    mat = np.array(vectors)
    rho = mat.T @ mat.conj()
    prob = float(np.trace(rho).real)
    if prob <= 1e-300:
        raise EmptyPostselectionError("coincidence probability vanishes")
    return rho / prob, prob


def postselect(state: FockExpansion, pattern: CoincidencePattern,
               analysis_bases: Mapping[str, ProjectorSpec] | None = None) -> tuple[np.ndarray, float]:
    """Conditional density matrix of the kept modes and the raw event probability.

    The probability is the squared norm of all accepted components, measured
    with the amplitudes of ``state`` as given.
    """
    return density_from_branches(branches(state, pattern, analysis_bases).values())
