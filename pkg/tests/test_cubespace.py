import itertools

import numpy as np
import pytest

from nilkit.cubes import Configuration, Corner
from nilkit.cubespace import (
    FiniteCubespace,
    InvalidCorner,
    NotACubespace,
    check_cube_invariance,
    check_ergodic,
    check_fibrant,
    check_glueing,
    check_uniqueness,
    complete_corner,
    full_cubespace,
    induced_subcubespace,
    invariance_closure,
    nilspace_degree,
    point_cubespace,
    replay_verdict,
)
from nilkit.groups import abelian_from_factors
from nilkit.constructions import standard_nilspace


@pytest.fixture(scope="module")
def d1z2():
    return standard_nilspace(abelian_from_factors([2]), 1, 3)


@pytest.fixture(scope="module")
def d2z2():
    return standard_nilspace(abelian_from_factors([2]), 2, 4)


def test_invariance_pass_on_construction(d1z2):
    assert check_cube_invariance(d1z2).ok


def test_full_cubespace_invariant():
    assert check_cube_invariance(full_cubespace(3, 2)).ok


def test_invariance_failure_and_witness_replay():
    # C^1 = {(0,1)} only: the reflection (1,0) is missing
    space = FiniteCubespace(
        2, 1, {0: np.array([[0], [1]]), 1: np.array([[0, 1]])}
    )
    v = check_cube_invariance(space)
    assert not v.ok
    assert replay_verdict(space, v.to_json())


def test_elementary_matches_exhaustive(d1z2):
    # the elementary generating set decides invariance exactly
    assert check_cube_invariance(d1z2, exhaustive=True).ok
    bad = FiniteCubespace(2, 1, {0: np.array([[0], [1]]), 1: np.array([[0, 1]])})
    assert not check_cube_invariance(bad, exhaustive=True).ok
    assert not check_cube_invariance(bad).ok


def test_invariance_closure_seed():
    space = invariance_closure(2, 2, {1: np.array([[0, 1]])})
    c1 = space.cube_set(1).matrix().tolist()
    for pair in ([0, 1], [1, 0], [0, 0], [1, 1]):
        assert pair in c1
    # closure is idempotent
    again = invariance_closure(2, 2, {ell: space.cube_set(ell).matrix() for ell in range(3)})
    assert again == space
    # and monotone in the seed
    smaller = invariance_closure(2, 2, {})
    for ell in range(3):
        assert set(smaller.cube_set(ell).enc.tolist()) <= set(space.cube_set(ell).enc.tolist())


def test_invariance_closure_empty_seed_gives_constants():
    space = invariance_closure(3, 2, {})
    for ell in range(3):
        mats = space.cube_set(ell).matrix()
        assert len(mats) == 3
        assert all(len(set(row)) == 1 for row in mats.tolist())


def test_ergodicity(d1z2, d2z2):
    assert check_ergodic(d2z2, 2).ok
    v = check_ergodic(d1z2, 2)
    assert not v.ok and len(d1z2.cube_set(2)) == 8
    assert replay_verdict(d1z2, v.to_json())
    assert check_ergodic(point_cubespace(2), 2).ok


def test_complete_corner(d1z2, d2z2):
    assert complete_corner(d1z2, Corner(2, (0, 0, 0))) == [0]
    assert complete_corner(d2z2, Corner(2, (0, 0, 0))) == [0, 1]
    # a corner with a non-cube face must be rejected
    space = FiniteCubespace(
        2, 2, {0: np.array([[0], [1]]),
               1: np.array([[0, 0], [1, 1]]),
               2: np.array([[0, 0, 0, 0], [1, 1, 1, 1]])}
    )
    with pytest.raises(InvalidCorner):
        complete_corner(space, Corner(2, (0, 1, 0)))


def test_fibrant_and_witnesses(d1z2, d2z2):
    assert check_fibrant(d1z2, 3).ok
    assert check_fibrant(d2z2, 4).ok
    # drop one cube from C^2 of D_1(Z/2): a corner loses its completion
    keep = d1z2.cube_set(2).enc[1:]
    broken = FiniteCubespace(
        2, 2, {0: np.arange(2)[:, None], 1: d1z2.cube_set(1).matrix(),
               2: np.stack([v for v in d1z2.cube_set(2).matrix()[1:]])}
    )
    v = check_fibrant(broken, 2)
    assert not v.ok
    assert replay_verdict(broken, v.to_json())


def test_uniqueness(d1z2, d2z2):
    assert not check_uniqueness(d1z2, 1).ok  # 1-ergodic contradicts 1-uniqueness
    assert check_uniqueness(d1z2, 2).ok
    assert check_uniqueness(d1z2, 3).ok
    assert not check_uniqueness(d2z2, 2).ok
    assert check_uniqueness(d2z2, 3).ok
    v = check_uniqueness(d1z2, 1)
    assert replay_verdict(d1z2, v.to_json())


def test_uniqueness_monotone_above_first_pass(d1z2, d2z2):
    for space in (d1z2, d2z2):
        passed = [s for s in range(1, space.lmax + 1) if check_uniqueness(space, s).ok]
        assert passed == list(range(min(passed), space.lmax + 1))


def test_glueing(d1z2, d2z2):
    assert check_glueing(d1z2, 3).ok
    assert check_glueing(d2z2, 4).ok


def test_glueing_failure_witness():
    # an invariant but non-fibrant family where glueing fails:
    # start from pairs {(0,1),(1,2)} and close under invariance; the
    # composite (0,2) never appears
    space = invariance_closure(3, 1, {1: np.array([[0, 1], [1, 2]])})
    v = check_glueing(space, 1)
    assert not v.ok
    assert replay_verdict(space, v.to_json())


def test_nilspace_degree(d1z2, d2z2):
    cert = nilspace_degree(d1z2)
    assert cert.is_nilspace and cert.degree == 1 and cert.ergodic_level == 1
    cert = nilspace_degree(d2z2)
    assert cert.is_nilspace and cert.degree == 2 and cert.ergodic_level == 2
    cert = nilspace_degree(point_cubespace(3))
    assert cert.is_nilspace and cert.degree == 0
    assert cert.uniqueness_monotone


def test_nilspace_degree_d1z4():
    space = standard_nilspace(abelian_from_factors([4]), 1, 3)
    cert = nilspace_degree(space)
    assert cert.degree == 1


def test_not_nilspace_reported():
    space = invariance_closure(3, 2, {1: np.array([[0, 1], [1, 2]])})
    cert = nilspace_degree(space)
    assert not cert.is_nilspace
    assert cert.reason


def test_degenerate_inputs():
    with pytest.raises(NotACubespace):
        FiniteCubespace(0, 1, {})
    pt = point_cubespace(2)
    assert pt.npoints == 1 and nilspace_degree(pt).degree == 0


def test_induced_subcubespace(d1z2):
    d1z4 = standard_nilspace(abelian_from_factors([4]), 1, 3)
    sub, points = induced_subcubespace(d1z4, [0, 1])
    assert points == [0, 1]
    assert sub.npoints == 2
    # the induced family keeps cube invariance
    assert check_cube_invariance(sub).ok
    # but corner completion fails: (0,1,1,?) needs the point 2
    assert not check_fibrant(sub, 2).ok


def test_counts_example_affine(d1z2):
    # 3-cubes of D_1(Z/2) are the 16 affine maps
    assert len(d1z2.cube_set(3)) == 16
