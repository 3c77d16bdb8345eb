import numpy as np
import pytest

from nilkit.constructions import (
    GroupAction,
    coset_action,
    dynamical_cubespace,
    left_translation_action,
    rp_relation,
)
from nilkit.corpus import mod2_rotation_action
from nilkit.dynamics import (
    DynamicalSystem,
    NotEquivariant,
    NotMinimal,
    descend_action,
    maximality_check,
    rp_quotient,
    rp_quotient_components,
)
from nilkit.factors import canonical_relation
from nilkit.groups import (
    alternating_group,
    cyclic_group,
    dihedral_group,
    subgroup_closure,
)
from nilkit.translations import is_translation


@pytest.fixture(scope="module")
def z6_system():
    return DynamicalSystem(left_translation_action(cyclic_group(6)))


@pytest.fixture(scope="module")
def d4_system():
    d4 = dihedral_group(4)
    return DynamicalSystem(coset_action(d4, subgroup_closure(d4, [2])))


def test_rp_quotient_z6(z6_system):
    res = rp_quotient(z6_system, 1)
    assert res.quotient.npoints == 6
    assert res.certificate.degree == 1
    assert all(v.ok for v in res.verdicts.values())


def test_rp_quotient_d4_on_cosets(d4_system):
    res = rp_quotient(d4_system, 1)
    assert res.quotient.npoints == 4
    assert res.certificate.degree == 1
    assert all(v.ok for v in res.verdicts.values())
    # every element acts as a verified 1-translation downstairs
    for h in range(d4_system.action.group.order):
        perm = tuple(int(v) for v in res.quotient_action.table[h])
        assert is_translation(res.quotient, perm, 1).ok


def test_rp_quotient_a5_point():
    sys5 = DynamicalSystem(left_translation_action(alternating_group(5)))
    res = rp_quotient(sys5, 1)
    assert res.quotient.npoints == 1
    assert res.certificate.degree == 0


def test_rp_quotient_requires_minimality():
    z2 = cyclic_group(2)
    table = np.array([[0, 1, 2, 3], [1, 0, 3, 2]])
    system = DynamicalSystem(GroupAction(z2, 4, table))
    with pytest.raises(NotMinimal):
        rp_quotient(system, 1)
    comps = rp_quotient_components(system, 1)
    assert len(comps) == 2
    assert all(c["result"].certificate.degree <= 1 for c in comps)


def test_rp_nesting(z6_system, d4_system):
    # RP^{s+1} refines RP^s
    for system in (z6_system, d4_system):
        r1 = rp_relation(system.action, 1, system.cubespace(2))
        r2 = rp_relation(system.action, 2, system.cubespace(3))
        assert r2.relation.refines(r1.relation)


def test_abelian_actions_are_translations(z6_system):
    dyn = z6_system.cubespace(2)
    for h in range(6):
        perm = tuple(int(v) for v in z6_system.action.table[h])
        assert is_translation(dyn.space, perm, 1).ok


def test_canonical_equals_rp_on_dynamical(d4_system):
    dyn = d4_system.cubespace(2)
    rp = rp_relation(d4_system.action, 1, dyn)
    assert canonical_relation(dyn.space, 1).relation == rp.relation


def test_descend_through_rp_projection(d4_system):
    res = rp_quotient(d4_system, 1)
    descended = descend_action(d4_system.action, d4_system.cubespace(2).space, res.projection)
    assert descended.verdicts["commutes"].ok
    assert np.array_equal(descended.action.table, res.quotient_action.table)


def test_descend_no_descent_witness(d4_system):
    # collapse two points that are not in a common invariant class
    from nilkit.fibrations import CubespaceMap
    from nilkit.translations import NoDescent
    from nilkit.factors import quotient_cubespace
    from nilkit.relations import EquivRelation

    space = d4_system.cubespace(2).space
    rel = EquivRelation(4, [[0, 1], [2], [3]])
    small, proj = quotient_cubespace(space, rel)
    with pytest.raises((NoDescent, ValueError)):
        descend_action(d4_system.action, space, proj)


def test_maximality(d4_system):
    res = rp_quotient(d4_system, 1)
    ok = maximality_check(
        d4_system, 1, DynamicalSystem(res.quotient_action), res.projection.mapping
    )
    assert ok.ok
    pt = DynamicalSystem(
        GroupAction(d4_system.action.group, 1,
                    np.zeros((d4_system.action.group.order, 1), dtype=np.int64))
    )
    assert maximality_check(d4_system, 1, pt, (0,) * 4).ok


def test_maximality_lower_level(d4_system):
    # Z = X/RP^0 tested against s = 1: RP^1 refines the kernel
    r0 = rp_relation(d4_system.action, 0, d4_system.cubespace(1))
    from nilkit.factors import quotient_cubespace

    q, proj = quotient_cubespace(d4_system.cubespace(1).space, r0.relation)
    class_of = r0.relation.class_of
    table = np.zeros((8, q.npoints), dtype=np.int64)
    reps = [cls[0] for cls in r0.relation.classes]
    for h in range(8):
        table[h] = class_of[d4_system.action.table[h, reps]]
    target = DynamicalSystem(GroupAction(d4_system.action.group, q.npoints, table))
    report = maximality_check(d4_system, 1, target, tuple(int(c) for c in class_of))
    assert report.verdicts["rp_refines_kernel"].ok


def test_maximality_not_equivariant(d4_system):
    res = rp_quotient(d4_system, 1)
    bad_map = (0, 0, 0, 1)  # breaks equivariance
    with pytest.raises(NotEquivariant):
        maximality_check(d4_system, 1, DynamicalSystem(res.quotient_action), bad_map)


def test_rp_quotient_self_consistency(d4_system):
    # RP^s of the quotient system is trivial
    res = rp_quotient(d4_system, 1)
    target = DynamicalSystem(res.quotient_action)
    rp_q = rp_relation(target.action, 1, target.cubespace(2))
    assert rp_q.relation.is_discrete()


def test_mod2_rotation_rp():
    system = DynamicalSystem(mod2_rotation_action())
    res = rp_quotient(system, 1)
    assert res.quotient.npoints == 2
    assert res.rp.relation.is_discrete()
