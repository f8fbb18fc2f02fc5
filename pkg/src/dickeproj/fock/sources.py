"""Photon sources: collinear type-II down-conversion and a weak coherent beam."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, factorial, sqrt

import numpy as np

from ..errors import DomainError
from .expansion import FockExpansion, ModeId, modes_of, monomial, tensor, transform

SPDC_MODE = "s"
WCB_MODE = "w"


def _normalized_polarization(polarization) -> np.ndarray:
    pol = np.asarray(polarization, dtype=complex).ravel()
    if pol.shape != (2,) or abs(np.linalg.norm(pol) - 1) > 1e-12:
        raise DomainError(f"polarization must be a normalized 2-vector, got {polarization!r}")
    return pol


def polarization_vector(alpha: float, eps: float = 0.0) -> np.ndarray:
    """Jones vector ``alpha|H> + sqrt(1 - alpha^2) e^{i eps}|V>``."""
    if not (0.0 <= alpha <= 1.0 + 1e-12):
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    alpha = min(alpha, 1.0)
    return np.array([alpha, sqrt(max(0.0, 1 - alpha**2)) * np.exp(1j * eps)])


@dataclass(frozen=True)
class SourceParams:
    """Down-conversion strength ``|z_dc|``, coherent amplitude ``|z_w| e^{i phi_w}`` and truncation."""

    z_dc: float
    z_w: float
    phi_w: float = 0.0
    wcb_polarization: tuple[complex, complex] = field(default=(1.0, 0.0))
    n_max: int = 6

    def __post_init__(self):
        if not (0 <= self.z_dc < 1):
            raise DomainError(f"|z_dc| must lie in [0, 1), got {self.z_dc}")
        if self.z_w < 0:
            raise DomainError(f"|z_w| must be non-negative, got {self.z_w}")
        if self.n_max < 1:
            raise DomainError(f"n_max must be at least 1, got {self.n_max}")
        pol = _normalized_polarization(self.wcb_polarization)
        object.__setattr__(self, "wcb_polarization", (complex(pol[0]), complex(pol[1])))

    @property
    def z_w_complex(self) -> complex:
        return self.z_w * np.exp(1j * self.phi_w)


def spdc_state(z_dc: complex, n_max: int, mode: str = SPDC_MODE) -> FockExpansion:
    """``sqrt(1-|z|^2) sum_n (i z)^n / n! (s_H^+ s_V^+)^n |vac>`` up to ``n_max`` photons.

    The pair operator power yields ``n!|n_H, n_V>``, so the Fock amplitude of
    the n-pair term is ``sqrt(1-|z|^2) (i z)^n``.
    """
    if abs(z_dc) >= 1:
        raise DomainError(f"|z_dc| must be < 1, got {abs(z_dc)}")
    pref = sqrt(1 - abs(z_dc) ** 2)
    terms = {(n, n): pref * (1j * z_dc) ** n for n in range(n_max // 2 + 1)}
    return FockExpansion(modes_of(mode), terms, n_max)


def wcb_state(z_w: complex, polarization=(1.0, 0.0), n_max: int = 6, mode: str = WCB_MODE) -> FockExpansion:
    """Coherent state ``e^{-|z|^2/2} sum_n z^n / n! (w_j^+)^n |vac>`` in polarization ``j``."""
    pol = _normalized_polarization(polarization)
    jmode = ModeId(mode, "j")
    pref = exp(-abs(z_w) ** 2 / 2)
    terms = {(n,): pref * z_w**n / sqrt(factorial(n)) for n in range(n_max + 1)}
    single = FockExpansion((jmode,), terms, n_max)
    h, v = modes_of(mode)
    return transform(single, {jmode: [(h, pol[0]), (v, pol[1])]})


def merge_wcb(state: FockExpansion, coherent: bool = True, wcb: str = WCB_MODE,
              target: str = SPDC_MODE) -> FockExpansion:
    """Couple the coherent-beam modes into the down-conversion mode.

    Coherent overlap identifies ``w_j^+ -> s_j^+``. Without overlap the photons
    keep a ``wcb`` tag: same spatial mode and detectors, but distinguishable.
    """
    tag = "" if coherent else wcb
    mapping = {}
    for m in state.modes:
        if m.spatial == wcb:
            mapping[m] = [(ModeId(target, m.pol, tag or m.tag), 1.0)]
    return transform(state, mapping)


def combine(spdc: FockExpansion, wcb: FockExpansion, coherent: bool = True, n_max: int | None = None) -> FockExpansion:
    """Product of both sources, with the coherent beam fed into the down-conversion mode."""
    return merge_wcb(tensor(spdc, wcb, n_max), coherent=coherent)


def source_state(params: SourceParams, coherent: bool = True) -> FockExpansion:
    return combine(spdc_state(params.z_dc, params.n_max),
                   wcb_state(params.z_w_complex, params.wcb_polarization, params.n_max),
                   coherent=coherent, n_max=params.n_max)


def pair_monomial(a: int, b: int, polarization=(1.0, 0.0)) -> FockExpansion:
    """``(w_j^+)^a (s_H^+ s_V^+)^b |vac>`` on modes ``w_H, w_V, s_H, s_V``."""
    pol = _normalized_polarization(polarization)
    jmode = ModeId(WCB_MODE, "j")
    sh, sv = modes_of(SPDC_MODE)
    base = monomial((jmode, sh, sv), {jmode: a, sh: b, sv: b})
    wh, wv = modes_of(WCB_MODE)
    out = transform(base, {jmode: [(wh, pol[0]), (wv, pol[1])]})
    return out.reordered((wh, wv, sh, sv))


def sector_coefficient(params: SourceParams, a: int, b: int, prefactor: bool = True) -> complex:
    """Weight of ``(w_j^+)^a (s_H^+ s_V^+)^b`` in the product of both source states."""
    c = (1j * params.z_dc) ** b / factorial(b) * params.z_w_complex**a / factorial(a)
    if prefactor:
        c *= sqrt(1 - params.z_dc**2) * exp(-params.z_w**2 / 2)
    return complex(c)


def sector_monomials(total: int) -> list[tuple[int, int]]:
    """``(a, b)`` with ``a + 2b = total``: coherent-beam photons and down-converted pairs."""
    return [(total - 2 * b, b) for b in range(total // 2, -1, -1)]


def photon_sector(params: SourceParams, total: int, prefactor: bool = True) -> FockExpansion:
    """All terms of the source product with exactly ``total`` photons (modes unmerged)."""
    out = None
    for a, b in sector_monomials(total):
        term = pair_monomial(a, b, params.wcb_polarization).scaled(sector_coefficient(params, a, b, prefactor))
        out = term if out is None else out + term
    return out.with_n_max(max(total, params.n_max))


def five_photon_terms(params: SourceParams, prefactor: bool = False) -> FockExpansion:
    """The three five-photon contributions of the unmerged source product.

    Coefficients: ``-|z_dc|^2 z_w / 2`` for ``w_j (s_H s_V)^2``,
    ``i |z_dc| z_w^3 / 6`` for ``w_j^3 s_H s_V`` and ``z_w^5 / 120`` for ``w_j^5``.
    """
    if params.n_max < 5:
        raise DomainError("five-photon terms need n_max >= 5")
    return photon_sector(params, 5, prefactor)
