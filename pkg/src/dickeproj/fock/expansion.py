"""Sparse multimode Fock expansions and linear mode substitutions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial, sqrt
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

from ..errors import DomainError

PRUNE_TOL = 1e-15


class ModeId(NamedTuple):
    """Bosonic mode: spatial label, polarization and an optional tag.

    Tags mark internal degrees of freedom (e.g. an arrival time) that
    detectors cannot resolve; photons differing only in tag never interfere
    but click the same detector.
    """

    spatial: str
    pol: str
    tag: str = ""

    def __str__(self) -> str:
        return f"{self.spatial}_{self.pol}" + (f"[{self.tag}]" if self.tag else "")

    @property
    def is_loss(self) -> bool:
        return self.spatial.startswith("loss")


def modes_of(spatial: str, tag: str = "") -> tuple[ModeId, ModeId]:
    return ModeId(spatial, "H", tag), ModeId(spatial, "V", tag)


_SQRT_FACT = [sqrt(factorial(k)) for k in range(64)]


@dataclass(frozen=True, eq=False)
class FockExpansion:
    """Immutable sparse state ``sum_occ amp |occ>`` over an ordered mode list."""

    modes: tuple[ModeId, ...]
    terms: Mapping[tuple[int, ...], complex]
    n_max: int

    def __post_init__(self):
        modes = tuple(ModeId(*m) for m in self.modes)
        if len(set(modes)) != len(modes):
            raise DomainError("duplicate mode labels")
        if self.n_max < 0:
            raise DomainError("n_max must be non-negative")
        clean: dict[tuple[int, ...], complex] = {}
        for occ, amp in self.terms.items():
            if len(occ) != len(modes):
                raise DomainError(f"occupation {occ} does not match {len(modes)} modes")
            if sum(occ) > self.n_max or abs(amp) < PRUNE_TOL:
                continue
            clean[tuple(occ)] = complex(amp)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "terms", MappingProxyType(clean))

    @classmethod
    def vacuum(cls, modes: Sequence[ModeId], n_max: int) -> "FockExpansion":
        return cls(tuple(modes), {(0,) * len(modes): 1.0}, n_max)

    def __len__(self) -> int:
        return len(self.terms)

    def index(self, mode: ModeId) -> int:
        return self.modes.index(mode)

    def amplitude(self, occupation: Mapping[ModeId, int]) -> complex:
        """Amplitude of the term with the given nonzero occupations (unlisted modes empty)."""
        occ = [0] * len(self.modes)
        for mode, n in occupation.items():
            occ[self.index(ModeId(*mode))] = n
        return self.terms.get(tuple(occ), 0j)

    def norm2(self) -> float:
        return sum(abs(a) ** 2 for a in self.terms.values())

    def photon_numbers(self) -> dict[int, float]:
        """Probability weight per total photon number."""
        out: dict[int, float] = {}
        for occ, amp in self.terms.items():
            n = sum(occ)
            out[n] = out.get(n, 0.0) + abs(amp) ** 2
        return dict(sorted(out.items()))

    def sector(self, total: int) -> "FockExpansion":
        return FockExpansion(self.modes, {o: a for o, a in self.terms.items() if sum(o) == total}, self.n_max)

    def scaled(self, c: complex) -> "FockExpansion":
        return FockExpansion(self.modes, {o: c * a for o, a in self.terms.items()}, self.n_max)

    def with_n_max(self, n_max: int) -> "FockExpansion":
        return FockExpansion(self.modes, self.terms, n_max)

    def __add__(self, other: "FockExpansion") -> "FockExpansion":
        other = other.reordered(self.modes)
        terms = dict(self.terms)
        for occ, amp in other.terms.items():
            terms[occ] = terms.get(occ, 0j) + amp
        return FockExpansion(self.modes, terms, max(self.n_max, other.n_max))

    def reordered(self, modes: Sequence[ModeId]) -> "FockExpansion":
        """Same state over ``modes``, which must contain every occupied mode."""
        modes = tuple(ModeId(*m) for m in modes)
        if modes == self.modes:
            return self
        pos = {m: i for i, m in enumerate(modes)}
        occupied = {m for o in self.terms for m, n in zip(self.modes, o) if n}
        missing = occupied - set(pos)
        if missing:
            raise DomainError(f"target mode list lacks occupied modes {sorted(map(str, missing))}")
        terms = {}
        for occ, amp in self.terms.items():
            new = [0] * len(modes)
            for m, n in zip(self.modes, occ):
                if n:
                    new[pos[m]] = n
            terms[tuple(new)] = amp
        return FockExpansion(modes, terms, self.n_max)

    def allclose(self, other: "FockExpansion", atol: float = 1e-12) -> bool:
        modes = tuple(dict.fromkeys(self.modes + other.modes))
        a, b = self.reordered(modes).terms, other.reordered(modes).terms
        return all(abs(a.get(k, 0j) - b.get(k, 0j)) <= atol for k in set(a) | set(b))

    def __repr__(self) -> str:
        shown = []
        for occ, amp in list(self.terms.items())[:6]:
            label = ",".join(f"{m}:{n}" for m, n in zip(self.modes, occ) if n) or "vac"
            shown.append(f"{amp:.4g}|{label}>")
        more = "" if len(self.terms) <= 6 else f" + ... ({len(self.terms)} terms)"
        return f"FockExpansion({' + '.join(shown)}{more})"


def monomial(modes: Sequence[ModeId], powers: Mapping[ModeId, int], coeff: complex = 1.0,
             n_max: int | None = None) -> FockExpansion:
    """``coeff * prod (a_m^dagger)^p |vac>``."""
    modes = tuple(ModeId(*m) for m in modes)
    occ = [0] * len(modes)
    amp = complex(coeff)
    for mode, p in powers.items():
        occ[modes.index(ModeId(*mode))] = p
        amp *= _SQRT_FACT[p]
    total = sum(occ)
    return FockExpansion(modes, {tuple(occ): amp}, total if n_max is None else n_max)


def tensor(a: FockExpansion, b: FockExpansion, n_max: int | None = None) -> FockExpansion:
    """Product state on the disjoint union of both mode lists, truncated at ``n_max``."""
    if set(a.modes) & set(b.modes):
        raise DomainError("tensor product needs disjoint modes")
    cap = max(a.n_max, b.n_max) if n_max is None else n_max
    terms = {}
    for oa, xa in a.terms.items():
        na = sum(oa)
        for ob, xb in b.terms.items():
            if na + sum(ob) <= cap:
                terms[oa + ob] = xa * xb
    return FockExpansion(a.modes + b.modes, terms, cap)


Substitution = Mapping[ModeId, Sequence[tuple[ModeId, complex]]]


def _power_expansion(targets: Sequence[tuple[int, complex]], n: int) -> list[tuple[tuple[tuple[int, int], ...], complex]]:
    """Multinomial expansion of ``(sum_k c_k b_k)^n`` as sparse exponent patterns."""
    out = []
    for combo in itertools.combinations_with_replacement(range(len(targets)), n):
        counts: dict[int, int] = {}
        for k in combo:
            counts[k] = counts.get(k, 0) + 1
        coeff = complex(factorial(n))
        pattern = []
        for k, p in counts.items():
            idx, c = targets[k]
            coeff *= c**p / factorial(p)
            pattern.append((idx, p))
        out.append((tuple(pattern), coeff))
    return out


def transform(state: FockExpansion, substitution: Substitution) -> FockExpansion:
    """Apply the linear creation-operator substitution ``a_m^dagger -> sum_k c_k b_k^dagger``.

    Modes absent from ``substitution`` map to themselves. Every term keeps its
    photon number, so no re-truncation happens.
    """
    subst = {ModeId(*m): [(ModeId(*t), complex(c)) for t, c in targets if c != 0]
             for m, targets in substitution.items()}
    out_modes: list[ModeId] = []
    for m in state.modes:
        for t in (subst[m] if m in subst else [(m, 1.0)]):
            if t[0] not in out_modes:
                out_modes.append(t[0])
    pos = {m: i for i, m in enumerate(out_modes)}
    targets = [[(pos[t], c) for t, c in subst[m]] if m in subst else [(pos[m], 1.0)] for m in state.modes]
    width = len(out_modes)
    cache: dict[tuple[int, int], list] = {}
    terms: dict[tuple[int, ...], complex] = {}
    for occ, amp in state.terms.items():
        poly: dict[tuple[int, ...], complex] = {(0,) * width: amp}
        for i, n in enumerate(occ):
            if not n:
                continue
            amp_norm = 1 / _SQRT_FACT[n]
            key = (i, n)
            if key not in cache:
                cache[key] = _power_expansion(targets[i], n)
            nxt: dict[tuple[int, ...], complex] = {}
            for base, val in poly.items():
                val = val * amp_norm
                for pattern, c in cache[key]:
                    new = list(base)
                    for idx, p in pattern:
                        new[idx] += p
                    new = tuple(new)
                    nxt[new] = nxt.get(new, 0j) + val * c
            poly = nxt
        for out_occ, val in poly.items():
            for p in out_occ:
                if p > 1:
                    val *= _SQRT_FACT[p]
            terms[out_occ] = terms.get(out_occ, 0j) + val
    return FockExpansion(tuple(out_modes), terms, state.n_max)


def relabel(state: FockExpansion, mapping: Mapping[ModeId, ModeId]) -> FockExpansion:
    """Rename modes; several modes may merge into one (coherent identification)."""
    return transform(state, {m: [(t, 1.0)] for m, t in mapping.items()})


def drop_empty_modes(state: FockExpansion, keep: Iterable[ModeId] = ()) -> FockExpansion:
    keep = set(keep)
    used = [i for i, m in enumerate(state.modes) if m in keep or any(o[i] for o in state.terms)]
    modes = tuple(state.modes[i] for i in used)
    terms = {tuple(o[i] for i in used): a for o, a in state.terms.items()}
    return FockExpansion(modes, terms, state.n_max)
