from math import exp, factorial, sqrt

import numpy as np
import pytest

from dickeproj.errors import DomainError
from dickeproj.fock import (
    ModeId,
    SourceParams,
    five_photon_terms,
    merge_wcb,
    polarization_vector,
    source_state,
    spdc_state,
    wcb_state,
)
from dickeproj.fock.sources import pair_monomial, sector_coefficient, sector_monomials

SH, SV = ModeId("s", "H"), ModeId("s", "V")
WH, WV = ModeId("w", "H"), ModeId("w", "V")


def test_spdc_pair_distribution():
    z = 0.3
    state = spdc_state(z, n_max=6)
    for n in range(4):
        assert abs(state.amplitude({SH: n, SV: n})) ** 2 == pytest.approx((1 - z**2) * z ** (2 * n))
    assert state.amplitude({SH: 1, SV: 1}) == pytest.approx(1j * z * sqrt(1 - z**2))
    assert state.amplitude({SH: 1}) == 0


def test_spdc_rejects_unphysical_gain():
    with pytest.raises(DomainError):
        spdc_state(1.0, 4)


def test_wcb_is_poissonian():
    z = 0.7 * np.exp(0.4j)
    state = wcb_state(z, (1.0, 0.0), n_max=10)
    probs = state.photon_numbers()
    for n in range(6):
        assert probs[n] == pytest.approx(exp(-abs(z) ** 2) * abs(z) ** (2 * n) / factorial(n), rel=1e-12)


def test_wcb_polarization_split():
    pol = polarization_vector(2**-0.5, 0.5)
    state = wcb_state(0.2, pol, n_max=2)
    ratio = state.amplitude({WV: 1}) / state.amplitude({WH: 1})
    assert ratio == pytest.approx(np.exp(0.5j))


def test_polarization_vector_validation():
    with pytest.raises(DomainError):
        polarization_vector(1.5)
    with pytest.raises(DomainError):
        wcb_state(0.1, (1.0, 1.0))


def test_coherent_merge_enhances_hhv_amplitude():
    params = SourceParams(0.17, 0.2, 0.0, (1.0, 0.0), n_max=3)
    coherent = source_state(params, coherent=True)
    incoherent = source_state(params, coherent=False)
    bunched = coherent.amplitude({SH: 2, SV: 1})
    separate = incoherent.amplitude({SH: 1, SV: 1, ModeId("s", "H", "w"): 1})
    assert bunched / separate == pytest.approx(sqrt(2), rel=1e-12)


def test_merge_without_wcb_modes_is_noop():
    state = spdc_state(0.1, 2)
    assert merge_wcb(state).allclose(state)


def test_two_photon_term_left_circular():
    # pair term i z_dc s_H s_V plus coherent two-photon term (z_w^2/2) w_L^2 with w_L = (w_H - i w_V)/sqrt(2)
    zdc, zw, phi = 0.17, 0.3, 0.8
    params = SourceParams(zdc, zw, phi, (2**-0.5, -1j * 2**-0.5), n_max=2)
    state = source_state(params)
    pref = sqrt(1 - zdc**2) * exp(-zw**2 / 2)
    z = zw * np.exp(1j * phi)
    expected_hv = pref * (1j * zdc + (z**2 / 2) * 2 * (-1j) / 2)
    assert state.amplitude({SH: 1, SV: 1}) == pytest.approx(expected_hv, abs=1e-14)
    assert state.amplitude({SH: 2}) == pytest.approx(pref * z**2 / 2 * sqrt(2) / 2, abs=1e-14)


def test_sector_monomials():
    assert sector_monomials(5) == [(1, 2), (3, 1), (5, 0)]
    assert sector_monomials(6) == [(0, 3), (2, 2), (4, 1), (6, 0)]


def test_five_photon_terms_coefficients():
    zdc, zw = 0.17, 0.4
    params = SourceParams(zdc, zw, 0.0, (1.0, 0.0), n_max=5)
    terms = five_photon_terms(params)
    assert len(terms) == 3
    expected = {
        (1, 2): -zdc**2 * zw / 2,
        (3, 1): 1j * zdc * zw**3 / 6,
        (5, 0): zw**5 / 120,
    }
    for (a, b), coeff in expected.items():
        fock_norm = sqrt(factorial(a)) * factorial(b)
        assert terms.amplitude({WH: a, SH: b, SV: b}) == pytest.approx(coeff * fock_norm, abs=1e-15)
        assert sector_coefficient(params, a, b, prefactor=False) == pytest.approx(coeff)


def test_five_photon_terms_vanish_without_beam():
    params = SourceParams(0.17, 0.0, 0.0, (1.0, 0.0), n_max=5)
    assert len(five_photon_terms(params)) == 0


def test_five_photon_terms_need_truncation():
    with pytest.raises(DomainError):
        five_photon_terms(SourceParams(0.17, 0.3, n_max=4))


def test_pair_monomial_mode_order():
    m = pair_monomial(1, 1, (0.0, 1.0))
    assert [str(x) for x in m.modes] == ["w_H", "w_V", "s_H", "s_V"]
    assert m.amplitude({WV: 1, SH: 1, SV: 1}) == pytest.approx(1.0)


@pytest.mark.parametrize("kwargs", [dict(z_dc=1.0, z_w=0.1), dict(z_dc=0.1, z_w=-0.1), dict(z_dc=0.1, z_w=0.1, n_max=0)])
def test_source_params_validation(kwargs):
    with pytest.raises(DomainError):
        SourceParams(**kwargs)
