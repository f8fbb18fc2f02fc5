import itertools
from math import pi, sqrt

import numpy as np
import pytest

from dickeproj import symstate as ss
from dickeproj.errors import AnnihilationError, DegenerateError, DomainError, NotInFamilyError

from oracles import dicke_amplitudes, project_loop


def ket(label):
    return ss.basis_state(label).amp


@pytest.mark.parametrize("N,m", [(N, m) for N in range(1, 7) for m in range(N + 1)])
def test_dicke_matches_enumeration(N, m):
    assert np.allclose(ss.dicke(N, m).amp, dicke_amplitudes(N, m), atol=1e-15)


def test_dicke_examples():
    w3 = (ket("HHV") + ket("HVH") + ket("VHH")) / sqrt(3)
    assert np.allclose(ss.dicke(3, 1).amp, w3)
    d42 = sum(ket(s) for s in ["HHVV", "HVHV", "VHHV", "HVVH", "VHVH", "VVHH"]) / sqrt(6)
    assert np.allclose(ss.dicke(4, 2).amp, d42)
    assert np.allclose(ss.dicke(2, 0).amp, ket("HH"))


@pytest.mark.parametrize("N,m", [(3, 4), (3, -1), (9, 2), (0, 0)])
def test_dicke_rejects_bad_range(N, m):
    with pytest.raises(DomainError):
        ss.dicke(N, m)


def test_superpose():
    ghz_minus = ss.superpose([(1 / sqrt(2), ss.basis_state("HHH")), (-1 / sqrt(2), ss.basis_state("VVV"))])
    assert np.allclose(ghz_minus.amp, (ket("HHH") - ket("VVV")) / sqrt(2))
    psi = ss.dicke(3, 1)
    assert np.allclose(ss.superpose([(1, psi)]).amp, psi.amp)
    g3 = ss.superpose([(1 / sqrt(2), ss.W3), (1 / sqrt(2), ss.WBAR3)])
    assert ss.equal_up_to_phase(g3, ss.G3_PLUS, 1e-14)


def test_superpose_errors():
    with pytest.raises(DomainError):
        ss.superpose([(1, ss.W3), (1, ss.W4)])
    with pytest.raises(DegenerateError):
        ss.superpose([(1, ss.W3), (-1, ss.W3)])


def test_project_d42_computational():
    state, p = ss.project_qubit(ss.D4_2, 4, ss.ProjectorSpec(0.0))
    assert ss.equal_up_to_phase(state, ss.W3, 1e-14)
    # three of the six D4^(2) terms end in V
    assert p == pytest.approx(3 / 6, abs=1e-14)


def test_project_d42_plus_basis():
    proj = ss.ProjectorSpec(1 / sqrt(2), 0.0)
    state, p = ss.project_qubit(ss.D4_2, 4, proj)
    raw = project_loop(ss.D4_2.amp, 4, 4, proj.ket)
    assert p == pytest.approx(np.vdot(raw, raw).real, abs=1e-14)
    assert p == pytest.approx(0.5, abs=1e-14)
    assert ss.equal_up_to_phase(state, ss.G3_PLUS, 1e-14)


def test_project_product_state():
    state, p = ss.project_qubit(ss.basis_state("HH"), 2, ss.ProjectorSpec(1.0))
    assert np.allclose(state.amp, ket("H"))
    assert p == pytest.approx(1.0)


def test_project_annihilation_and_range():
    with pytest.raises(AnnihilationError):
        ss.project_qubit(ss.basis_state("HH"), 2, ss.ProjectorSpec(0.0))
    with pytest.raises(DomainError):
        ss.project_qubit(ss.W3, 4, ss.ProjectorSpec(1.0))
    with pytest.raises(DomainError):
        ss.project_qubit(ss.H, 1, ss.ProjectorSpec(1.0))


@pytest.mark.parametrize("qubit", [1, 2, 3, 4, 5])
def test_project_matches_index_loop(qubit, rng):
    amp = rng.normal(size=32) + 1j * rng.normal(size=32)
    state = ss.PureState(amp)
    proj = ss.ProjectorSpec(rng.uniform(), rng.uniform(0, 2 * pi))
    out, p = ss.project_qubit(state, qubit, proj)
    raw = project_loop(state.amp, 5, qubit, proj.ket)
    assert p == pytest.approx(np.vdot(raw, raw).real, abs=1e-13)
    assert np.allclose(out.amp, raw / np.linalg.norm(raw), atol=1e-13)


def test_apply_local_examples():
    s, p = ss.apply_local(ss.W4, [ss.IDENTITY] * 4)
    assert np.allclose(s.amp, ss.W4.amp) and p == pytest.approx(1.0)
    s, p = ss.apply_local(ss.GHZ4_MINUS, [ss.HADAMARD] * 4)
    target = (ss.dicke(4, 1).amp + ss.dicke(4, 3).amp) / sqrt(2)
    assert np.allclose(s.amp, target, atol=1e-14)
    assert p == pytest.approx(1.0, abs=1e-12)


def test_apply_local_errors():
    with pytest.raises(DomainError):
        ss.apply_local(ss.W3, [ss.IDENTITY] * 2)
    with pytest.raises(AnnihilationError):
        ss.apply_local(ss.basis_state("HV"), [np.diag([1, 0]), np.diag([1, 0])])


def test_ghz3_plus_is_hadamard_image():
    expected = sqrt(3 / 4) * ss.dicke(3, 1).amp + sqrt(1 / 4) * ss.dicke(3, 3).amp
    assert np.allclose(ss.GHZ3_PLUS.amp, expected, atol=1e-14)


def test_delta5_limits():
    assert ss.equal_up_to_phase(ss.delta5(1.0, 0.3), ss.dicke(5, 2), 1e-14)
    assert ss.equal_up_to_phase(ss.delta5(0.0, 0.3), ss.dicke(5, 3), 1e-14)
    s = ss.delta5(1 / sqrt(2), pi / 2)
    expected = (ss.dicke(5, 2).amp + 1j * ss.dicke(5, 3).amp) / sqrt(2)
    assert np.allclose(s.amp, expected, atol=1e-14)
    with pytest.raises(DomainError):
        ss.delta5(1.2, 0.0)


def test_delta5_precursor_projects_to_ghz4_plus():
    s4, _ = ss.project_qubit(ss.delta5(1 / sqrt(2), pi / 2), 5, ss.ProjectorSpec(1 / sqrt(2), -pi / 2))
    assert ss.fidelity_pure(s4, ss.GHZ4_PLUS) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("args,target", [
    ((1 / sqrt(2), pi / 2, 1 / sqrt(2), -pi / 2), ss.GHZ4_PLUS),
    ((1.0, 0.0, 0.0, 0.0), ss.W4),
    ((1.0, 0.0, 1.0, 0.0), ss.D4_2),
])
def test_delta4_formula_examples(args, target):
    assert ss.fidelity_pure(ss.delta4_formula(*args), target) == pytest.approx(1.0, abs=1e-12)


def test_delta4_formula_matches_projection(rng):
    for _ in range(20):
        a, e, ap, ep = rng.uniform(0, 1), rng.uniform(0, 2 * pi), rng.uniform(0, 1), rng.uniform(0, 2 * pi)
        direct, _ = ss.project_qubit(ss.delta5(a, e), 5, ss.ProjectorSpec(ap, ep))
        assert ss.equal_up_to_phase(ss.delta4_formula(a, e, ap, ep), direct, 1e-12)


def test_delta3_ghz3_plus():
    s = ss.delta3(1 / sqrt(2), pi / 2, 1 / sqrt(2), -pi / 2, 1.0, 0.0)
    assert ss.fidelity_pure(s, ss.GHZ3_PLUS) == pytest.approx(1.0, abs=1e-12)


def test_delta3_matches_two_projections_example():
    s4, _ = ss.project_qubit(ss.delta5(1.0, 0.0), 5, ss.ProjectorSpec(0.0))
    s3, _ = ss.project_qubit(s4, 4, ss.ProjectorSpec(0.0))
    formula = ss.delta3(1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    assert ss.equal_up_to_phase(formula, s3, 1e-12)
    assert ss.fidelity_pure(formula, ss.dicke(3, 0)) == pytest.approx(1.0)


def test_delta3_permutation_symmetric(rng):
    s = ss.delta3(*rng.uniform(0, 1, 6))
    t = s.tensor()
    for perm in itertools.permutations(range(3)):
        assert np.allclose(np.transpose(t, perm), t, atol=1e-13)


def test_decompose_examples():
    mu, nu = ss.decompose_ghz_dicke(ss.GHZ4_PLUS)
    assert (abs(mu), abs(nu)) == pytest.approx((1.0, 0.0), abs=1e-12)
    mu, nu = ss.decompose_ghz_dicke(ss.D4_2)
    assert (abs(mu), abs(nu)) == pytest.approx((0.0, 1.0), abs=1e-12)


def test_decompose_family_member():
    # alpha = alpha_p, eps = -eps_p gives equal D4^(1) and D4^(3) weights
    state = ss.delta4_formula(0.6, 0.4, 0.6, -0.4)
    mu, nu = ss.decompose_ghz_dicke(state)
    rebuilt = mu * ss.GHZ4_PLUS.amp + nu * ss.D4_2.amp
    assert np.allclose(rebuilt, state.amp, atol=1e-12)
    assert abs(mu) ** 2 + abs(nu) ** 2 == pytest.approx(1.0, abs=1e-12)
    # oracle: inner products computed from the explicit Dicke vectors
    ghz = (dicke_amplitudes(4, 1) + dicke_amplitudes(4, 3)) / sqrt(2)
    assert mu == pytest.approx(np.vdot(ghz, state.amp), abs=1e-12)


def test_decompose_rejects_outsiders():
    with pytest.raises(NotInFamilyError):
        ss.decompose_ghz_dicke(ss.W4)
    with pytest.raises(DomainError):
        ss.decompose_ghz_dicke(ss.W3)


def test_fidelity_pure_examples():
    assert ss.fidelity_pure(ss.W3, ss.W3) == pytest.approx(1.0)
    assert ss.fidelity_pure(ss.basis_state("HH"), ss.basis_state("VV")) == 0.0
    g3 = (dicke_amplitudes(3, 1) + dicke_amplitudes(3, 2)) / sqrt(2)
    ghz3p = sqrt(3 / 4) * dicke_amplitudes(3, 1) + sqrt(1 / 4) * dicke_amplitudes(3, 3)
    expected = abs(np.vdot(g3, ghz3p)) ** 2
    assert expected == pytest.approx(3 / 8)
    assert ss.fidelity_pure(ss.G3_PLUS, ss.GHZ3_PLUS) == pytest.approx(expected, abs=1e-14)


def test_spin_flip_maps_dicke():
    for N in range(2, 6):
        for m in range(N + 1):
            assert ss.equal_up_to_phase(ss.spin_flip(ss.dicke(N, m)), ss.dicke(N, N - m), 1e-14)


def test_canonical_form_and_json_roundtrip():
    s = ss.PureState(np.exp(1.3j) * ss.W3.amp)
    c = s.canonical()
    first = c.amp[np.flatnonzero(np.abs(c.amp) > 1e-12)[0]]
    assert first.imag == pytest.approx(0.0, abs=1e-15) and first.real > 0
    back = ss.PureState.from_json(s.to_json())
    assert np.allclose(back.amp, s.amp)
    assert s.to_dict()["n"] == 3 and len(s.to_dict()["amp"]) == 8


def test_pure_state_validation():
    with pytest.raises(DomainError):
        ss.PureState(np.ones(3))
    with pytest.raises(DomainError):
        ss.PureState(np.ones(2**9))
    with pytest.raises(DomainError):
        ss.PureState.from_dict({"n": 2, "amp": [[1, 0], [0, 0]]})
    with pytest.raises(DegenerateError):
        ss.PureState(np.zeros(4))


def test_projector_spec():
    p = ss.ProjectorSpec(0.6, -pi / 2)
    assert p.alpha**2 + p.beta**2 == pytest.approx(1.0, abs=1e-15)
    assert p.eps == pytest.approx(3 * pi / 2)
    assert abs(np.vdot(p.ket, p.orthogonal().ket)) < 1e-15
    with pytest.raises(DomainError):
        ss.ProjectorSpec(1.5)


def test_local_operator_unitary_flag():
    with pytest.raises(DomainError):
        ss.LocalOperator(np.diag([1, 2]), unitary=True)
    ss.LocalOperator(np.diag([1, 2]))


def test_named_states():
    assert ss.named_state("D4_2") is ss.D4_2 or ss.equal_up_to_phase(ss.named_state("D4_2"), ss.D4_2)
    assert ss.equal_up_to_phase(ss.named_state("delta5:1,0"), ss.dicke(5, 2))
    assert ss.named_state("HHV").n == 3
    with pytest.raises(DomainError):
        ss.named_state("nonsense")
