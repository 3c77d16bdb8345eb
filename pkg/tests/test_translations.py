import numpy as np
import pytest

from nilkit.constructions import hk_nilspace, standard_nilspace
from nilkit.corpus import z4_deg2_filtration
from nilkit.cubespace import point_cubespace
from nilkit.fibrations import CubespaceMap
from nilkit.groups import (
    abelian_from_factors,
    dihedral_group,
    lower_central_series,
    subgroup_closure,
)
from nilkit.translations import (
    NoDescent,
    NotBijection,
    Translation,
    aut_filtration,
    is_translation,
    pull_translation,
    push_translation,
    translation_group,
)


@pytest.fixture(scope="module")
def d1z2():
    return standard_nilspace(abelian_from_factors([2]), 1, 3)


@pytest.fixture(scope="module")
def d1z4():
    return standard_nilspace(abelian_from_factors([4]), 1, 3)


@pytest.fixture(scope="module")
def mod2(d1z4, d1z2):
    return CubespaceMap(d1z4, d1z2, (0, 1, 0, 1))


def test_is_translation_basics(d1z2):
    assert is_translation(d1z2, (0, 1), 1).ok
    assert is_translation(d1z2, (0, 1), 2).ok
    assert is_translation(d1z2, (1, 0), 1).ok
    v = is_translation(d1z2, (1, 0), 2)
    assert not v.ok and v.witness["level"] == 2
    with pytest.raises(NotBijection):
        is_translation(d1z2, (0, 0), 1)


def test_brute_force_groups(d1z2, d1z4):
    g1 = translation_group(d1z2, 1)
    assert g1.elements == ((0, 1), (1, 0))
    assert translation_group(d1z2, 2).elements == ((0, 1),)
    g1z4 = translation_group(d1z4, 1)
    # structure-group prediction: translations by Z/4 and nothing else
    assert len(g1z4) == 4
    for a in range(4):
        assert tuple((x + a) % 4 for x in range(4)) in g1z4.elements
    assert len(translation_group(d1z4, 2)) == 1


def test_generated_mode(d1z4):
    grp = translation_group(d1z4, 1, generators=[(1, 2, 3, 0)])
    assert grp.mode == "generated" and not grp.complete
    assert len(grp) == 4


def test_aut_filtration_laws(d1z4):
    groups, verdicts = aut_filtration(d1z4, 3)
    assert verdicts["nested"].ok and verdicts["bracket"].ok
    assert [len(groups[i]) for i in (1, 2, 3)] == [4, 1, 1]


def test_hk_d4_group_elements_are_translations():
    lcs = lower_central_series(dihedral_group(4))
    hkn = hk_nilspace(lcs, subgroup_closure(lcs.group, []), 3)
    space = hkn.space
    d4 = lcs.group
    # left multiplication by g permutes the points (cosets = elements here)
    reps = hkn.coset_reps
    for level, sub in [(1, lcs.level(1)), (2, lcs.level(2))]:
        for g in sub.elements:
            perm = tuple(int(np.searchsorted(np.array(reps), d4.op(g, x))) for x in reps)
            assert is_translation(space, perm, level).ok, (level, g)


def test_push_through_vertical(mod2):
    f = Translation(mod2.source, (1, 2, 3, 0), 1, 3)
    down = push_translation(mod2, f)
    assert down.perm == (1, 0)
    # structure-group action inside a collapsed fiber descends to identity
    g = Translation(mod2.source, (2, 3, 0, 1), 1, 3)
    down = push_translation(mod2, g)
    assert down.perm == (0, 1)


def test_push_identity_map(d1z4):
    ident = CubespaceMap(d1z4, d1z4, (0, 1, 2, 3))
    f = Translation(d1z4, (1, 2, 3, 0), 1, 3)
    assert push_translation(ident, f).perm == f.perm


def test_push_no_descent(d1z4):
    # collapse {0,1} vs {2,3}: +1 does not map fibers onto fibers
    two = standard_nilspace(abelian_from_factors([2]), 1, 3)
    phi = CubespaceMap(d1z4, two, (0, 0, 1, 1))
    f = Translation(d1z4, (1, 2, 3, 0), 1, 3)
    with pytest.raises(NoDescent):
        push_translation(phi, f)


def test_pull_translations(mod2, d1z2):
    lifts = pull_translation(mod2, Translation(d1z2, (1, 0), 1, 3))
    assert sorted(l.perm for l in lifts) == [(1, 2, 3, 0), (3, 0, 1, 2)]
    lifts_id = pull_translation(mod2, Translation(d1z2, (0, 1), 1, 3))
    assert sorted(l.perm for l in lifts_id) == [(0, 1, 2, 3), (2, 3, 0, 1)]
    ident = CubespaceMap(d1z2, d1z2, (0, 1))
    only = pull_translation(ident, Translation(d1z2, (1, 0), 1, 3))
    assert [l.perm for l in only] == [(1, 0)]


def test_push_pull_roundtrip(mod2, d1z2):
    f = Translation(mod2.source, (1, 2, 3, 0), 1, 3)
    down = push_translation(mod2, f)
    lifts = pull_translation(mod2, down)
    assert f.perm in [l.perm for l in lifts]
    up = pull_translation(mod2, Translation(d1z2, (1, 0), 1, 3))
    for lift in up:
        assert push_translation(mod2, lift).perm == (1, 0)


def test_brute_force_cap():
    big = point_cubespace(1)
    from nilkit.constructions import dynamical_cubespace, left_translation_action
    from nilkit.groups import cyclic_group

    dyn = dynamical_cubespace(left_translation_action(cyclic_group(9)), 2)
    with pytest.raises(ValueError):
        translation_group(dyn.space, 1)
    grp = translation_group(dyn.space, 1, generators=[tuple((x + 1) % 9 for x in range(9))])
    assert len(grp) == 9 and not grp.complete
