import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsverify.exactfield import Coeff, TrigPoly, divergence, laplacian, tp_eval, tp_subst_phases
from nsverify.flows import (
    ANTUONO_SCALE_SQ, FLOW_NAMES, SOLUTION_PHASES, FlowConstructionError, FlowSpec,
    compact_profiles, general_family_symbolic, make_abc, make_antuono, make_flow,
    make_general_family, make_phase_locked, make_taylor,
)
from nsverify.exactfield import DecayField

F = Fraction


def test_phase_locked_forms_agree():
    flow = make_phase_locked()
    subst = tuple(tp_subst_phases(v, SOLUTION_PHASES) for v in general_family_symbolic())
    assert subst == compact_profiles() == flow.profiles
    assert flow.rate == 3
    assert flow.pressure_reference.rate == 6


def test_general_family_at_zero_phases():
    v1 = make_general_family((0, 0, 0)).profiles[0]
    s, c = TrigPoly.sin, TrigPoly.cos
    want = s((1, 0, 0)) * c((0, 1, 0)) * s((0, 0, 1)) - s((1, 0, 0)) * c((0, 0, 1)) * s((0, 1, 0))
    assert v1 == want


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.integers(-5, 6)] * 3))
def test_general_family_divergence_free(n):
    flow = make_general_family(tuple(F(k, 6) for k in n))
    assert not divergence(flow.profiles)


def test_general_family_rejects_off_lattice():
    with pytest.raises(ValueError):
        make_general_family((F(1, 4), 0, 0))


def test_taylor():
    flow = make_taylor()
    assert flow.alpha == math.pi and flow.rate == 2
    v = flow.profiles
    assert not v[2]
    pt = (0.21, 0.63, 0.0)
    assert math.isclose(tp_eval(v[0], pt, math.pi), math.sin(math.pi * 0.21) * math.cos(math.pi * 0.63))
    assert math.isclose(tp_eval(v[1], pt, math.pi), -math.cos(math.pi * 0.21) * math.sin(math.pi * 0.63))
    assert flow.pressure_reference.rate == 4


def test_abc_zero_field():
    flow = make_abc(0, 0, 0)
    assert not any(flow.profiles)
    assert flow.expect_beltrami is False


def test_antuono_scale():
    flow = make_antuono()
    assert flow.velocity_scale_sq == ANTUONO_SCALE_SQ == Coeff(F(32, 27))
    assert math.isclose(flow.velocity_scale ** 2, 32 / 27, rel_tol=1e-15)
    assert flow.profiles == make_phase_locked().profiles


@pytest.mark.parametrize("name", FLOW_NAMES)
def test_catalog_eigenstructure(name):
    flow = make_flow(name)
    v = flow.profiles
    assert not divergence(v)
    # every term is a Laplacian eigenfunction with one shared eigenvalue
    for vi in v:
        assert laplacian(vi) == vi.scale(-flow.rate, alpha_power=2)
    if flow.pressure_reference is not None:
        assert flow.pressure_reference.rate == 2 * flow.rate


@pytest.mark.parametrize("name, exponent", [
    ("paper_solution", 3.0), ("taylor", 2 * math.pi ** 2), ("abc", math.pi ** 2),
])
def test_decay_exponents(name, exponent):
    flow = make_flow(name)
    kappa, t = 0.05, 1.3
    got = flow.velocity.factor(t, flow.alpha_value(), kappa)
    assert math.isclose(got, math.exp(-exponent * kappa * t), rel_tol=1e-14)


def test_unknown_flow():
    with pytest.raises(KeyError):
        make_flow("no_such_flow")


def test_construction_guards():
    bad = (TrigPoly.sin((1, 0, 0)), TrigPoly.zero(), TrigPoly.zero())
    with pytest.raises(FlowConstructionError):
        FlowSpec("x", {}, DecayField(bad, 1))
    v = compact_profiles()
    with pytest.raises(FlowConstructionError):
        FlowSpec("x", {}, DecayField(v, 3), pressure_reference=DecayField((TrigPoly.zero(),), 5))
