import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from cvhide.errors import InfeasibleCutoff, InvalidParameter, InvalidState, TruncationWarning
from cvhide.fock_core import (StateSpec, TruncatedOperator, coherent_amplitudes,
                              displacement_matrix, ladder_matrices, make_state,
                              mean_photon_number, partial_trace, schmidt_robustness,
                              squeezed_amplitudes, tmsv_vector, trace_norm,
                              truncation_dim_for)


def _ladder(d):
    L = ladder_matrices(d)
    return L.a.entries, L.adag.entries, L.N.entries


def test_ladder_commutator_and_number():
    a, adag, n = _ladder(12)
    comm = a @ adag - adag @ a
    np.testing.assert_allclose(np.diag(comm)[:-1], 1.0)
    np.testing.assert_allclose(np.diag(n), np.arange(12))


def test_displacement_matches_expm_block():
    d, alpha = 120, 0.8 - 0.5j
    a, adag, _ = _ladder(d)
    ref = expm(alpha * adag - np.conj(alpha) * a)
    got = displacement_matrix(alpha, d).entries
    np.testing.assert_allclose(got[:40, :40], ref[:40, :40], atol=1e-12)


def test_displacement_large_amplitude_stays_finite():
    with pytest.warns(TruncationWarning):
        D = displacement_matrix(30.0, 200).entries
    assert np.all(np.isfinite(D))
    assert np.max(np.abs(D)) <= 1 + 1e-12


def test_coherent_amplitudes_poisson():
    c = coherent_amplitudes(1.3j, 60)
    n = np.arange(60)
    p = np.exp(-1.69) * 1.69 ** n / np.array([math.factorial(k) for k in n], dtype=float)
    np.testing.assert_allclose(np.abs(c) ** 2, p, atol=1e-14)


def test_squeezed_amplitudes_sign_convention():
    d, r = 160, 0.6
    a, adag, _ = _ladder(d)
    S = expm(0.5 * r * (adag @ adag - a @ a))
    np.testing.assert_allclose(squeezed_amplitudes(r, d)[:40], S[:40, 0], atol=1e-12)


def test_truncation_dim_thermal_tail():
    nu = 2.0
    d = truncation_dim_for(StateSpec.thermal(nu))
    q = nu / (nu + 1)
    assert q ** d < 1e-12 <= q ** (d - 1) or d == 8


def test_make_state_trace_and_renorm():
    rho = make_state(StateSpec.coherent(2.0))
    assert abs(rho.trace() - 1) < 1e-12
    assert rho.renorm_delta < 1e-12
    with pytest.warns(TruncationWarning):
        small = make_state(StateSpec.coherent(2.0), dim=8)
    assert small.renorm_delta > 1e-6
    np.testing.assert_allclose(small.trace(), 1.0)


def test_even_odd_cutoff_parity():
    assert truncation_dim_for(StateSpec.even_thermal(0.5)) % 2 == 1
    assert truncation_dim_for(StateSpec.odd_thermal(0.5)) % 2 == 0
    odd0 = make_state(StateSpec.odd_thermal(0.0))
    np.testing.assert_allclose(np.real(np.diag(odd0.entries))[:3], [0, 1, 0])


def test_state_spec_validation():
    with pytest.raises(InvalidParameter):
        StateSpec.thermal(-1)
    with pytest.raises(InvalidParameter):
        StateSpec.even_thermal(1.0)
    with pytest.raises(InvalidParameter):
        StateSpec("cat", (1.0,))
    with pytest.raises(InfeasibleCutoff):
        truncation_dim_for(StateSpec.thermal(1e6))


def test_trace_norm_paths():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
    svd = np.linalg.svd(X, compute_uv=False).sum()
    assert trace_norm(X) == pytest.approx(svd, rel=1e-12)
    H = X + X.conj().T
    assert trace_norm(H) == pytest.approx(np.abs(np.linalg.eigvalsh(H)).sum(), rel=1e-12)
    assert trace_norm(np.diag([0.5, -0.25, 0.0])) == pytest.approx(0.75)


def test_tmsv_marginal_energy_and_robustness():
    r = 0.7
    psi = tmsv_vector(r, 60)
    op = TruncatedOperator.from_matrix(np.outer(psi, psi.conj()), modes=2)
    red = partial_trace(op, keep=0)
    th = make_state(StateSpec.thermal(math.sinh(r) ** 2), dim=60)
    np.testing.assert_allclose(red.entries, th.entries, atol=1e-12)
    assert mean_photon_number(op) == pytest.approx(2 * math.sinh(r) ** 2, rel=1e-10)
    assert schmidt_robustness(psi / np.linalg.norm(psi)) == pytest.approx(math.exp(2 * r), rel=1e-9)
    with pytest.raises(InvalidState):
        schmidt_robustness(2 * psi)


def test_operator_arithmetic_pads():
    a = make_state(StateSpec.fock(0), dim=8)
    b = make_state(StateSpec.fock(3), dim=12)
    z = a - b
    assert z.dim == 12
    assert trace_norm(z) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        a.entries[0, 0] = 2


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 4.0), st.floats(0.0, 4.0))
def test_thermal_trace_distance_triangle(nu, mu):
    d = max(truncation_dim_for(StateSpec.thermal(nu)), truncation_dim_for(StateSpec.thermal(mu)))
    a = make_state(StateSpec.thermal(nu), d)
    b = make_state(StateSpec.thermal(mu), d)
    c = make_state(StateSpec.thermal(0.5 * (nu + mu)), d)
    assert trace_norm(a - b) <= trace_norm(a - c) + trace_norm(c - b) + 1e-12
    assert 0 <= trace_norm(a - b) <= 2 + 1e-12
