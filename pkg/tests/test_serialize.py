import numpy as np
import pytest

from nilkit import serialize as ser
from nilkit.cocycles import Cocycle, GroupValuedFunction, derivative
from nilkit.constructions import left_translation_action, standard_nilspace
from nilkit.corpus import z4_deg2_filtration
from nilkit.cubespace import (
    check_cube_invariance,
    check_fibrant,
    nilspace_degree,
)
from nilkit.fibrations import CubespaceMap
from nilkit.groups import abelian_from_factors, cyclic_group, dihedral_group, lower_central_series
from nilkit.relations import EquivRelation


@pytest.fixture(scope="module")
def d1z4():
    return standard_nilspace(abelian_from_factors([4]), 1, 3)


def roundtrip(doc):
    text = ser.dumps(doc)
    again = ser.loads(text)
    assert ser.dumps(again) == text  # bit-exact
    return again


def test_group_roundtrip():
    g = dihedral_group(4)
    doc = roundtrip(ser.group_doc(g))
    g2 = ser.group_from_doc(doc)
    assert g2 == g


def test_filtration_roundtrip():
    filt = z4_deg2_filtration()
    doc = roundtrip(ser.filtration_doc(filt))
    filt2 = ser.filtration_from_doc(doc)
    assert filt2.degree == filt.degree
    assert [s.elements for s in filt2.chain] == [s.elements for s in filt.chain]


def test_cubespace_roundtrip(d1z4):
    doc = roundtrip(ser.cubespace_doc(d1z4, meta=ser.provenance("ds", degree=1)))
    space = ser.cubespace_from_doc(doc)
    assert space == d1z4


def test_verdicts_survive_roundtrip(d1z4):
    # every passing verdict re-verifies on the reparsed space
    doc = ser.loads(ser.dumps(ser.cubespace_doc(d1z4)))
    space = ser.cubespace_from_doc(doc)
    assert check_cube_invariance(space).ok
    assert check_fibrant(space, 3).ok
    assert nilspace_degree(space).degree == 1


def test_map_roundtrip(d1z4):
    d1z2 = standard_nilspace(abelian_from_factors([2]), 1, 3)
    f = CubespaceMap(d1z4, d1z2, (0, 1, 0, 1))
    doc = roundtrip(ser.map_doc(f))
    f2 = ser.map_from_doc(doc)
    assert f2.mapping == f.mapping
    assert f2.source == f.source and f2.target == f.target


def test_action_roundtrip():
    act = left_translation_action(cyclic_group(6))
    doc = roundtrip(ser.action_doc(act))
    act2 = ser.action_from_doc(doc)
    assert np.array_equal(act2.table, act.table)


def test_function_and_cocycle_roundtrip(d1z4):
    fab = abelian_from_factors([4])
    g = GroupValuedFunction(d1z4, fab, (0, 1, 2, 3))
    doc = roundtrip(ser.function_doc(d1z4, fab, g.values))
    g2 = ser.function_from_doc(doc)
    assert g2.values == g.values
    rho = derivative(g, 2)
    doc = roundtrip(ser.cocycle_doc(rho))
    rho2 = ser.cocycle_from_doc(doc)
    assert np.array_equal(rho2.values, rho.values)
    assert rho2.level == 2


def test_relation_roundtrip():
    rel = EquivRelation(4, [[0, 2], [1], [3]])
    doc = roundtrip(ser.relation_doc(rel))
    assert ser.relation_from_doc(doc) == rel


def test_schema_errors():
    with pytest.raises(ser.SchemaError):
        ser.loads("{}")
    with pytest.raises(ser.SchemaError):
        ser.loads('{"kind":"alien","version":1,"payload":{}}')
    with pytest.raises(ser.SchemaError):
        ser.loads('{"kind":"group","version":99,"payload":{}}')
    doc = ser.loads('{"kind":"group","version":1,"payload":{"order":2}}')
    with pytest.raises(ser.SchemaError) as err:
        ser.group_from_doc(doc)
    assert "mult" in str(err.value)


def test_mult_length_schema_error():
    doc = {"kind": "group", "version": 1, "payload": {"order": 2, "mult": [0, 1, 1]}}
    with pytest.raises(ser.SchemaError):
        ser.group_from_doc(doc)
