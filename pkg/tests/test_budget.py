import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdfiber import budget
from qdfiber.budget import Component, ComponentChain, RateModel
from qdfiber.errors import DomainError, InconsistencyError

EFF = st.floats(1e-3, 1.0)


def test_system_efficiency_examples():
    assert budget.system_efficiency(ComponentChain([])) == 1.0
    assert budget.system_efficiency(ComponentChain([("system", 0.356)])) == 0.356
    assert budget.system_efficiency(ComponentChain([("a", 0.9), ("b", 0.8), ("c", 0.5)])) == pytest.approx(0.36, rel=1e-15)


def test_system_efficiency_rejects_unknown():
    with pytest.raises(DomainError):
        budget.system_efficiency(ComponentChain([("a", 0.9), ("b", None)]))


def test_chain_invariants():
    with pytest.raises(DomainError):
        ComponentChain([("a", 1.2)])
    with pytest.raises(DomainError):
        ComponentChain([("a", None), ("b", None)])


@given(st.lists(EFF, min_size=1, max_size=6))
def test_system_efficiency_permutation_invariant(ts):
    ref = budget.system_efficiency(ComponentChain([(f"c{i}", t) for i, t in enumerate(ts)]))
    for perm in itertools.islice(itertools.permutations(ts), 24):
        got = budget.system_efficiency(ComponentChain([(f"c{i}", t) for i, t in enumerate(perm)]))
        assert got == pytest.approx(ref, rel=1e-14)


def test_countrate_examples():
    assert budget.countrate(RateModel(80.0, 1.0, 0.0902, 0.356)) == pytest.approx(2.57, abs=5e-3)
    assert budget.countrate(RateModel(80.0, 1.0, 0.0, 0.356)) == 0.0
    assert budget.countrate(RateModel(80.0, 1.0, 0.065, 0.356)) == pytest.approx(1.851, abs=5e-4)


def test_coupling_from_countrate_examples():
    eta = budget.coupling_from_countrate(80.0, 1.0, 0.356, 2.57)
    assert eta == pytest.approx(0.0902, abs=5e-5)
    assert eta == pytest.approx(2.57 / (80.0 * 0.356), rel=1e-15)
    assert budget.coupling_from_countrate(80.0, 1.0, 0.356, 0.0) == 0.0


def test_coupling_above_one_is_inconsistent():
    with pytest.raises(InconsistencyError, match="gamma=30"):
        budget.coupling_from_countrate(80.0, 1.0, 0.356, 30.0)
    with pytest.raises(DomainError):
        budget.coupling_from_countrate(0.0, 1.0, 0.356, 1.0)
    with pytest.raises(DomainError):
        budget.coupling_from_countrate(80.0, 1.0, 0.356, -1.0)


def test_solve_unknown_examples():
    assert budget.solve_unknown(ComponentChain([("a", 0.5), ("x", None)]), 0.25) == 0.5
    assert budget.solve_unknown(ComponentChain([("x", None)]), 0.356) == 0.356
    with pytest.raises(InconsistencyError):
        budget.solve_unknown(ComponentChain([("a", 0.9), ("b", 0.9), ("x", None)]), 0.9)
    with pytest.raises(DomainError):
        budget.solve_unknown(ComponentChain([("a", 0.9)]), 0.5)
    with pytest.raises(DomainError):
        budget.solve_unknown(ComponentChain([("a", 0.0), ("x", None)]), 0.5)
    with pytest.raises(DomainError):
        budget.solve_unknown(ComponentChain([("x", None)]), 1.5)


@given(st.floats(1.0, 200.0), EFF, EFF, EFF)
def test_countrate_inversion_identity(rep, eta_int, eta_c, eta_sys):
    gamma = budget.countrate(RateModel(rep, eta_int, eta_c, eta_sys))
    back = budget.coupling_from_countrate(rep, eta_int, eta_sys, gamma)
    assert budget.countrate(RateModel(rep, eta_int, back, eta_sys)) == pytest.approx(gamma, rel=1e-12)


@given(st.floats(1.0, 200.0), EFF, st.floats(1e-3, 0.5), EFF)
def test_countrate_increasing_in_each_factor(rep, eta_int, eta_c, eta_sys):
    base = budget.countrate(RateModel(rep, eta_int, eta_c, eta_sys))
    assert budget.countrate(RateModel(rep * 1.01, eta_int, eta_c, eta_sys)) > base
    assert budget.countrate(RateModel(rep, eta_int, eta_c * 1.01, eta_sys)) > base
    if eta_int < 0.99:
        assert budget.countrate(RateModel(rep, eta_int + 0.01, eta_c, eta_sys)) > base
    if eta_sys < 0.99:
        assert budget.countrate(RateModel(rep, eta_int, eta_c, eta_sys + 0.01)) > base


def test_rate_model_invariants():
    with pytest.raises(DomainError):
        RateModel(80.0, 1.2)
    with pytest.raises(DomainError):
        RateModel(-1.0)
    assert isinstance(Component("a", 0.5).transmission, float)
    assert math.isclose(ComponentChain([Component("a", 0.5)]).known_product(), 0.5)
