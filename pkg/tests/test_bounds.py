import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvhide import bounds
from cvhide.errors import InfeasibleBudget, InvalidParameter
from cvhide.fock_core import StateSpec, make_state


def test_c_m_values():
    assert bounds.c_m(1) == pytest.approx(2 / (27 * math.pi), abs=1e-15)
    # Frozen from the Gamma-function form at 30 digits.
    assert bounds.c_m(2) == pytest.approx(0.0008197759371832405172, rel=1e-13)
    assert all(bounds.c_m(m + 1) < bounds.c_m(m) for m in range(1, 12))


def test_locc_bound_and_energy_plan_round_trip():
    E = bounds.plan_energy_for_hiding(1e-4, 2, 1.0)
    assert bounds.locc_bound(1.0, E, 2) == pytest.approx(1e-4, rel=1e-10)
    with pytest.raises(InvalidParameter):
        bounds.plan_energy_for_hiding(1.0, 1, 1.0)
    with pytest.raises(InvalidParameter):
        bounds.locc_bound(1.5, 1.0, 1)


def test_linear_bound_single_mode():
    assert bounds.bk_error_bound_linear(0.0, 1, 0.04) == pytest.approx(math.sqrt(math.pi) * 0.2)
    assert bounds.bk_error_bound_linear(10.0, 1, 1.0) == 2.0
    assert bounds.bk_error_bound_linear(10.0, 1, 1.0, cap=False) > 2.0


def test_refined_bound_reference_values():
    # Frozen from an arbitrary-precision chi-square expectation.
    assert bounds.bk_error_bound_refined(1.0, 2, 0.1) == pytest.approx(1.5893352075423799348,
                                                                      abs=1e-11)
    assert bounds.bk_error_bound_refined(0.0, 1, 0.0) == 0.0
    assert bounds.bk_error_bound_refined(0.0, 1, 1e10) == pytest.approx(2.0, abs=1e-9)
    assert bounds.bk_error_bound_refined_reference(0.0, 1, 0.01) == pytest.approx(
        bounds.bk_error_bound_refined(0.0, 1, 0.01), abs=1e-10)


def test_noise_pair_bound_reduces():
    assert bounds.noise_pair_bound(1.0, 1, 0.2, 0.0) == bounds.bk_error_bound_refined(1.0, 1, 0.2)
    assert bounds.noise_pair_bound(1.0, 1, 0.2, 0.05) == pytest.approx(
        bounds.noise_pair_bound(1.0, 1, 0.05, 0.2))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 20.0), st.integers(1, 6), st.floats(1e-8, 3.0))
def test_refined_never_exceeds_linear(E, m, lam):
    ref = bounds.bk_error_bound_refined(E, m, lam)
    assert 0 <= ref <= bounds.bk_error_bound_linear(E, m, lam) + 1e-12
    assert ref <= bounds.bk_error_bound_refined(E + 1.0, m, lam) + 1e-12


def test_plan_teleport_budget_fixed_eta():
    out = bounds.plan_teleport_budget(bounds.BudgetQuery(0.1, 0.0, 1, eta=1.0))
    assert out["lambda_star"] == pytest.approx(0.01 / math.pi, rel=1e-12)
    assert out["r"] == pytest.approx(-0.5 * math.log(0.01 / math.pi), rel=1e-12)
    assert out["s_db"] == pytest.approx(24.97, abs=0.01)
    ref = bounds.plan_teleport_budget(bounds.BudgetQuery(0.1, 0.0, 1, eta=1.0, bound="refined"))
    assert ref["lambda_star"] >= out["lambda_star"]
    assert bounds.bk_error_bound_refined(0.0, 1, ref["lambda_star"]) == pytest.approx(0.1)


def test_plan_teleport_budget_fixed_r_and_infeasible():
    out = bounds.plan_teleport_budget(bounds.BudgetQuery(0.1, 0.0, 1, r=3.0))
    lam = math.exp(-6) + 1 / out["eta"] ** 2 - 1
    assert lam == pytest.approx(out["lambda_star"], rel=1e-10)
    with pytest.raises(InfeasibleBudget) as exc:
        bounds.plan_teleport_budget(bounds.BudgetQuery(0.01, 0.0, 1, r=0.5))
    assert exc.value.limiting_value == pytest.approx(math.sqrt(math.pi) * math.exp(-0.5))
    with pytest.raises(InvalidParameter):
        bounds.BudgetQuery(0.1, 0.0, 1, eta=1.0, r=1.0)


def test_dimension_count():
    assert bounds.dimension_count(2, 3) == (10, Fraction(9, 2))
    assert bounds.dimension_count(1, 0) == (1, Fraction(0))


def test_displacement_diamond_bound():
    assert bounds.displacement_diamond_bound(0.1, 0.0, 0.0) == pytest.approx(2 * math.sin(0.1))
    assert bounds.displacement_diamond_bound([3.0, 0], [0, 0], 1.0) == pytest.approx(2.0)


def test_squeezed_lower_bounds_ordered():
    res = bounds.squeezed_noise_lower_bound(1.0, 0.1)
    assert res["analytic"] <= res["overlap"] <= res["numeric"] + 1e-9
    assert bounds.squeezed_analytic_bound(0.0, 0.1) == pytest.approx(2 - 2 / 1.05)


def test_locc_numeric_lower_bound_sane():
    z = make_state(StateSpec.fock(0), dim=8) - make_state(StateSpec.fock(1), dim=8)
    res = bounds.locc_lower_bound_numeric(z, np.linspace(0.1, 1.0, 10))
    assert 0 < res["value"] <= 2
    assert res["argmax"] in np.linspace(0.1, 1.0, 10)
    with pytest.raises(InvalidParameter):
        bounds.locc_lower_bound_numeric(z, [0.0])
