import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from folrank.errors import BudgetExceededError, InputError
from folrank.groups import (
    GroupSpec,
    boundary_ratio,
    dilate,
    finite_cyclic,
    finite_times_zd,
    folner_set,
    heisenberg,
    inverse_set,
    translate_set,
    unit_ball,
    zd,
)

SPECS = [
    zd(1),
    zd(2),
    finite_cyclic(4),
    finite_cyclic(2, 3),
    finite_times_zd((2,), 1),
    heisenberg(),
]
SPEC_IDS = ["Z", "Z2", "C4", "C2xC3", "C2xZ", "H3"]

coord = st.integers(-6, 6)


def elem(spec, data):
    return spec.reduce(tuple(data.draw(coord) for _ in range(spec.coord_len)))


# -- worked examples ---------------------------------------------------------


def test_mul_examples():
    assert zd(2).mul((1, 2), (3, 4)) == (4, 6)
    assert finite_cyclic(4).mul((3,), (2,)) == (1,)
    assert heisenberg().mul((1, 0, 0), (0, 1, 0)) == (1, 1, 1)


def test_inverse_examples():
    assert zd(1).inverse((5,)) == (-5,)
    assert finite_cyclic(4).inverse((3,)) == (1,)
    assert heisenberg().inverse((1, 1, 1)) == (-1, -1, 0)


def test_folner_examples():
    F = folner_set(zd(1), 3)
    assert F.elements == ((0,), (1,), (2,))
    assert len(folner_set(zd(2), 2)) == 4
    assert len(folner_set(heisenberg(), 1)) == 27


def test_finite_window_is_whole_group():
    G = finite_cyclic(2, 3)
    for L in (1, 2, 5):
        assert len(folner_set(G, L)) == 6


def test_boundary_ratio_examples():
    F = folner_set(zd(1), 8)
    assert boundary_ratio(F, [(-1,), (0,), (1,)]) == Fraction(2, 8)
    assert boundary_ratio(F, [(0,)]) == 0
    F2 = folner_set(zd(2), 4)
    assert boundary_ratio(F2, [(1, 0), (0, 1)]) == Fraction(8, 16)


def test_translate_examples():
    Z = zd(1)
    F = folner_set(Z, 3)
    assert translate_set(Z, F, (5,), side="right") == ((5,), (6,), (7,))
    assert inverse_set(Z, F) == ((-2,), (-1,), (0,))
    H = heisenberg()
    assert translate_set(H, [(0, 0, 0)], (1, 0, 0), side="right") == ((1, 0, 0),)


def test_window_budget():
    with pytest.raises(BudgetExceededError):
        folner_set(zd(2), 100, max_elements=50)


def test_bad_inputs():
    with pytest.raises(InputError):
        GroupSpec("Banana")
    with pytest.raises(InputError):
        zd(2).mul((1,), (2, 3))
    with pytest.raises(InputError):
        folner_set(zd(1), 0)
    with pytest.raises(InputError):
        finite_cyclic()


def test_finite_subgroup_lcm():
    assert zd(3).finite_subgroup_lcm == 1
    assert heisenberg().finite_subgroup_lcm == 1
    assert finite_cyclic(2, 3).finite_subgroup_lcm == 6
    assert finite_times_zd((4,), 2).finite_subgroup_lcm == 4


def _element_order(spec, g, cap=64):
    acc = g
    for k in range(1, cap + 1):
        if acc == spec.identity():
            return k
        acc = spec.mul(acc, g)
    raise AssertionError("order cap hit")


@pytest.mark.parametrize("spec", [finite_cyclic(2), finite_cyclic(4), finite_cyclic(2, 3)])
def test_finite_subgroup_lcm_by_enumeration(spec):
    # Every subgroup order divides the lcm (Lagrange), and the whole group is
    # itself a subgroup realizing it.
    lcm_value = spec.finite_subgroup_lcm
    elements = folner_set(spec, 1).elements
    assert len(elements) == lcm_value
    for g in elements:
        assert lcm_value % _element_order(spec, g) == 0


@pytest.mark.parametrize("spec", [zd(1), zd(2), heisenberg()], ids=["Z", "Z2", "H3"])
def test_torsion_free_families_have_trivial_torsion(spec):
    # No nonidentity element of small word length has finite order <= 12.
    ball = [g for g in unit_ball(spec) if g != spec.identity()]
    for g in ball:
        acc = g
        for _ in range(12):
            assert acc != spec.identity()
            acc = spec.mul(acc, g)
    assert spec.finite_subgroup_lcm == 1


# -- group axioms ------------------------------------------------------------


@pytest.mark.parametrize("spec", SPECS, ids=SPEC_IDS)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_group_axioms(spec, data):
    g, h, k = (elem(spec, data) for _ in range(3))
    e = spec.identity()
    assert spec.mul(spec.mul(g, h), k) == spec.mul(g, spec.mul(h, k))
    assert spec.mul(g, e) == g
    assert spec.mul(e, g) == g
    assert spec.mul(g, spec.inverse(g)) == e
    assert spec.mul(spec.inverse(g), g) == e


# -- Folner behavior ---------------------------------------------------------


@pytest.mark.parametrize("spec", SPECS, ids=SPEC_IDS)
def test_folner_deterministic_order(spec):
    a = folner_set(spec, 3)
    b = folner_set(spec, 3)
    assert a.elements == b.elements
    assert list(a.index.items()) == list(b.index.items())
    assert len(set(a.elements)) == len(a.elements)


@pytest.mark.parametrize("spec", SPECS, ids=SPEC_IDS)
def test_folner_condition_reached_under_cap(spec):
    # For each small K and delta there is an L0 under the cap past which the
    # boundary ratio stays below delta.
    K = [spec.identity(), spec.reduce((1,) + (0,) * (spec.coord_len - 1))]
    cap = 24
    for delta in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 10)):
        L0 = None
        for L in range(1, cap + 1):
            if boundary_ratio(folner_set(spec, L, max_elements=10**6), K) < delta:
                L0 = L
                break
        assert L0 is not None, f"no L0 <= {cap} for delta {delta}"
        for L in (L0, L0 + 1, 2 * L0):
            assert boundary_ratio(folner_set(spec, L, max_elements=10**6), K) < delta


@pytest.mark.parametrize("d", [1, 2])
def test_zd_boundary_scaling_law(d):
    # c_K computed by enumeration at L=8 bounds the ratio by c_K / L at 16, 32.
    spec = zd(d)
    cross = [spec.identity()] + [
        tuple(s if i == j else 0 for i in range(d)) for j in range(d) for s in (1, -1)
    ]
    box = [t for t in folner_set(zd(d), 3, max_elements=10**6).elements]
    shifted_box = [tuple(x - 1 for x in t) for t in box]  # [-1,1]^d
    for K in (cross, shifted_box):
        c_K = 8 * boundary_ratio(folner_set(spec, 8), K)
        for L in (16, 32):
            assert boundary_ratio(folner_set(spec, L), K) <= Fraction(c_K, L)


def test_unit_ball_and_dilate():
    Z2 = zd(2)
    E = ((0, 0),)
    grown = dilate(Z2, E)
    assert len(grown) == 9
    G = finite_cyclic(3)
    assert set(dilate(G, [(0,)])) == {(0,), (1,), (2,)}
    assert len(unit_ball(heisenberg())) == 27


# -- serialization -----------------------------------------------------------


@pytest.mark.parametrize("spec", SPECS, ids=SPEC_IDS)
def test_spec_json_roundtrip(spec):
    blob = json.dumps(spec.to_json())
    assert GroupSpec.from_json(json.loads(blob)) == spec


def test_spec_json_examples():
    assert GroupSpec.from_json({"family": "Zd", "d": 2}) == zd(2)
    assert GroupSpec.from_json({"family": "FiniteCyclicProduct", "orders": [2, 3]}) == finite_cyclic(2, 3)
    assert GroupSpec.from_json({"family": "FiniteTimesZd", "orders": [2], "d": 1}) == finite_times_zd((2,), 1)
    assert GroupSpec.from_json({"family": "Heisenberg"}) == heisenberg()
    with pytest.raises(InputError):
        GroupSpec.from_json({"family": 3})
    with pytest.raises(InputError):
        GroupSpec.from_json("Zd")
