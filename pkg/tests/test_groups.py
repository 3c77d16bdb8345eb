import itertools

import numpy as np
import pytest

from nilkit.groups import (
    BracketViolation,
    NotAbelian,
    NotAGroup,
    NotNilpotent,
    NotNormal,
    Subgroup,
    abelian_invariants,
    alternating_group,
    commutator_subgroup,
    cyclic_group,
    dihedral_group,
    direct_product,
    find_isomorphism,
    group_from_permutations,
    lower_central_series,
    quotient_group,
    subgroup_closure,
    symmetric_group,
    trivial_group,
    validate_filtration,
    validate_group,
)


def full(g):
    return Subgroup(g, tuple(range(g.order)))


def test_validate_z3():
    g = cyclic_group(3)
    assert g.order == 3 and g.identity == 0
    assert g.inverse(1) == 2


def test_validate_corrupted_table():
    table = np.array(cyclic_group(3).mult)
    table[1, 2] = 1  # breaks the latin-square/group structure
    with pytest.raises(NotAGroup) as err:
        validate_group(table)
    assert err.value.reason in ("associativity fails", "missing inverse", "missing identity")


def test_s3_from_permutation_composition():
    # oracle: compose permutations directly and compare against the table
    s3 = symmetric_group(3)
    assert s3.order == 6
    assert not s3.is_abelian()
    perms = sorted(itertools.permutations(range(3)))
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            composed = tuple(p[q[k]] for k in range(3))
            assert perms[s3.op(i, j)] == composed


def test_subgroup_closure_empty_and_rotation():
    d4 = dihedral_group(4)
    assert subgroup_closure(d4, []).elements == (0,)
    rot = subgroup_closure(d4, [1])  # r has order 4
    assert rot.elements == (0, 1, 2, 3)


def test_closure_of_transpositions_is_s3():
    s3 = symmetric_group(3)
    perms = sorted(itertools.permutations(range(3)))
    transpositions = [i for i, p in enumerate(perms) if sorted(p) == [0, 1, 2] and sum(p[k] != k for k in range(3)) == 2]
    assert len(subgroup_closure(s3, transpositions)) == 6


def test_commutators():
    z6 = cyclic_group(6)
    assert commutator_subgroup(z6, full(z6), full(z6)).elements == (0,)
    s3 = symmetric_group(3)
    derived = commutator_subgroup(s3, full(s3), full(s3))
    assert len(derived) == 3  # A3
    d4 = dihedral_group(4)
    derived = commutator_subgroup(d4, full(d4), full(d4))
    assert derived.elements == (0, 2)  # <r^2>


def test_lower_central_series():
    z4 = cyclic_group(4)
    filt = lower_central_series(z4)
    assert filt.degree == 1 and filt.proper
    assert [len(s) for s in filt.chain] == [4, 4, 1]

    d4 = dihedral_group(4)
    filt = lower_central_series(d4)
    assert filt.degree == 2
    assert [len(s) for s in filt.chain] == [8, 8, 2, 1]

    with pytest.raises(NotNilpotent):
        lower_central_series(symmetric_group(3))


def test_validate_filtration_z4():
    z4 = cyclic_group(4)
    filt = validate_filtration(z4, [(0, 1, 2, 3), (0, 1, 2, 3), (0, 2), (0,)])
    assert filt.degree == 2 and filt.proper


def test_central_series_that_is_not_a_filtration():
    # degree-2 nilpotent group with the padded central series
    # G = G_0 = G_1 = G_2, G_3 = [G,G], G_4 = 1: [G_2,G_2] escapes G_4
    d4 = dihedral_group(4)
    everyone = tuple(range(8))
    with pytest.raises(BracketViolation):
        validate_filtration(d4, [everyone, everyone, everyone, (0, 2), (0,)])


def test_nonabelian_g_g_1_chain_violates():
    s3 = symmetric_group(3)
    everyone = tuple(range(6))
    with pytest.raises(BracketViolation) as err:
        validate_filtration(s3, [everyone, everyone, (0,)])
    assert err.value.witness[:2] == (1, 1)


def test_quotients():
    d4 = dihedral_group(4)
    q, proj = quotient_group(d4, subgroup_closure(d4, [2]))
    assert q.order == 4
    fab = abelian_invariants(q)
    assert fab.factors == (2, 2)

    z4 = cyclic_group(4)
    q, proj = quotient_group(z4, subgroup_closure(z4, [2]))
    assert q.order == 2

    g, proj = quotient_group(d4, full(d4))
    assert g.order == 1


def test_quotient_not_normal():
    s3 = symmetric_group(3)
    # a 2-element subgroup generated by a transposition is not normal
    perms = sorted(itertools.permutations(range(3)))
    t = perms.index((1, 0, 2))
    with pytest.raises(NotNormal):
        quotient_group(s3, subgroup_closure(s3, [t]))


def test_abelian_invariants():
    assert abelian_invariants(cyclic_group(6)).factors == (6,)
    z2xz4 = direct_product(cyclic_group(2), cyclic_group(4))
    assert abelian_invariants(z2xz4).factors == (2, 4)
    assert abelian_invariants(trivial_group()).factors == ()
    z2cubed = direct_product(cyclic_group(2), direct_product(cyclic_group(2), cyclic_group(2)))
    assert abelian_invariants(z2cubed).factors == (2, 2, 2)


def test_abelian_invariants_element_order_oracle():
    # the largest invariant factor must equal the maximal element order
    for g in [cyclic_group(12), direct_product(cyclic_group(2), cyclic_group(6))]:
        fab = abelian_invariants(g)
        assert fab.factors[-1] == max(g.element_order(x) for x in range(g.order))
        assert int(np.prod(fab.factors)) == g.order if fab.factors else g.order == 1


def test_abelian_invariants_rejects_nonabelian():
    with pytest.raises(NotAbelian):
        abelian_invariants(symmetric_group(3))


def test_tuple_roundtrip():
    fab = abelian_invariants(direct_product(cyclic_group(2), cyclic_group(4)))
    for x in range(8):
        assert fab.elem_of(fab.tuple_of(x)) == x
    a, b = 3, 5
    ta = fab.tuple_of(a)
    tb = fab.tuple_of(b)
    s = tuple((u + v) % f for u, v, f in zip(ta, tb, fab.factors))
    assert fab.elem_of(s) == fab.add(a, b)


def test_lcs_passes_validate_filtration():
    d4 = dihedral_group(4)
    filt = lower_central_series(d4)
    again = validate_filtration(d4, [s.elements for s in filt.chain])
    assert again.degree == filt.degree


def test_alternating_group_order():
    a4 = alternating_group(4)
    assert a4.order == 12


def test_find_isomorphism():
    z2z2 = direct_product(cyclic_group(2), cyclic_group(2))
    d4q = quotient_group(dihedral_group(4), subgroup_closure(dihedral_group(4), [2]))[0]
    iso = find_isomorphism(d4q, z2z2)
    assert iso is not None
    assert find_isomorphism(cyclic_group(4), z2z2) is None
