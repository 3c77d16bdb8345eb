import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilkit.linalg import (
    ModularInfeasible,
    egcd,
    kernel_modular,
    modinv,
    smith_normal_form,
    solve_modular,
)


def brute_solutions(rows, rhs, n, ncols):
    """Oracle: try every vector in (Z/n)^ncols."""
    rows = np.asarray(rows).reshape(-1, ncols)
    out = []
    for x in itertools.product(range(n), repeat=ncols):
        xv = np.array(x)
        if ((rows @ xv - rhs) % n == 0).all():
            out.append(x)
    return sorted(out)


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_egcd(a, b):
    g, x, y = egcd(a, b)
    assert g == a * x + b * y
    assert g >= 0
    if a or b:
        assert a % g == 0 and b % g == 0


def test_modinv():
    assert (3 * modinv(3, 7)) % 7 == 1
    with pytest.raises(ValueError):
        modinv(2, 4)


def test_snf_diagonalizes():
    m = [[2, 4, 4], [-6, 6, 12], [10, 4, 16]]
    diag, u, v = smith_normal_form(m)
    um = np.array(u, dtype=object) @ np.array(m, dtype=object) @ np.array(v, dtype=object)
    for i in range(3):
        for j in range(3):
            assert um[i][j] == (diag[i] if i == j else 0)
    for i in range(len(diag) - 1):
        if diag[i]:
            assert diag[i + 1] % diag[i] == 0


matrix_case = st.tuples(
    st.integers(1, 3),  # rows
    st.integers(1, 3),  # cols
    st.sampled_from([2, 3, 4, 6, 8]),
)


@given(matrix_case, st.data())
@settings(max_examples=60, deadline=None)
def test_solver_matches_bruteforce(case, data):
    nrows, ncols, n = case
    rows = [
        [data.draw(st.integers(-4, 4)) for _ in range(ncols)] for _ in range(nrows)
    ]
    rhs = [data.draw(st.integers(-4, 4)) for _ in range(nrows)]
    expected = brute_solutions(rows, rhs, n, ncols)
    try:
        sol = solve_modular(rows, rhs, n, ncols)
    except ModularInfeasible:
        assert expected == []
        return
    got = sorted(tuple(int(v) for v in s) for s in sol.enumerate())
    assert got == expected
    assert sol.count() == len(expected)


def test_solution_array_matches_enumerate():
    rows = [[2, 0, 2], [0, 4, 4]]
    rhs = [0, 0]
    sol = kernel_modular(rows, 8, 3)
    listed = sorted(tuple(int(v) for v in s) for s in sol.enumerate())
    arr = sol.all_solutions_array()
    from_arr = sorted(tuple(int(v) for v in row) for row in arr)
    assert listed == from_arr
    assert len(set(from_arr)) == sol.count()


def test_infeasible_witness():
    with pytest.raises(ModularInfeasible) as err:
        solve_modular([[2], [2]], [1, 0], 4, 1)
    assert err.value.witness["modulus"] == 4


def test_tall_system_compression():
    # many redundant rows: x + y = 1 (mod 5) repeated, plus x - y = 2
    rows = [[1, 1]] * 500 + [[1, -1]]
    rhs = [1] * 500 + [2]
    sol = solve_modular(rows, rhs, 5, 2)
    sols = sol.enumerate()
    assert len(sols) == 1
    x, y = sols[0]
    assert (x + y) % 5 == 1 and (x - y) % 5 == 2


def test_kernel_count_powers():
    # rank-1 system over Z/4: kernel of [2, 0] has 2 * 4 elements
    sol = kernel_modular([[2, 0]], 4, 2)
    assert sol.count() == 8
    for s in sol.enumerate():
        assert (2 * s[0]) % 4 == 0
