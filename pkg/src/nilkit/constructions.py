"""Canonical cubespace constructions.

Host-Kra cube groups from filtered finite groups, Host-Kra nilspaces on
coset spaces, the standard abelian spaces cut out by vanishing alternating
sums, and dynamical cubespaces of finite group actions (orbit = closure at
finite scale).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import arrays as ar
from .cubes import Face, enumerate_faces, enumerate_morphisms, sign
from .cubespace import CubeSet, FiniteCubespace, Verdict, point_cubespace
from .groups import (
    FiniteAbelianGroup,
    FiniteGroup,
    Filtration,
    Subgroup,
    lcs_chain,
)
from .guards import check_guard
from .linalg import kernel_modular
from .relations import EquivRelation, NotEquivalence, check_equivalence_matrix


@dataclass
class HKCubeGroup:
    """Subgroup of G^(2^ell) generated by face-supported filtration elements."""

    base: FiniteGroup
    dim: int
    element_codes: np.ndarray  # sorted uint64, base |G|, identity included
    generator_log: tuple  # ((face.fixed, level, g), ...)
    full: bool

    def __len__(self):
        return int(self.element_codes.size)

    def matrices(self):
        return ar.decode_rows(self.element_codes, self.base.order, 1 << self.dim)

    def contains_codes(self, codes):
        return ar.isin_sorted(np.asarray(codes, dtype=np.uint64), self.element_codes)


def face_code(group: FiniteGroup, face: Face, g: int) -> int:
    """Encoded [g]_F: g on the face, identity elsewhere."""
    vals = [
        g if face.contains(v) else group.identity for v in range(1 << face.ambient_dim)
    ]
    return int(ar.encode_rows(np.array([vals]), group.order)[0])


def _levels_from_filtration(filtration: Filtration):
    def levels(i):
        return filtration.level(i)

    return levels


def _stabilized_levels(group: FiniteGroup):
    chain, tail = lcs_chain(group)

    def levels(i):
        if i == 0:
            return chain[0]
        return chain[min(i - 1, len(chain) - 1)]

    return levels, tail


def _hk_generators(group: FiniteGroup, levels, ell):
    gens = []
    for codim in range(0, ell + 1):
        sub = levels(codim)
        elems = [g for g in sub.elements if g != group.identity]
        if not elems:
            continue
        for face in enumerate_faces(ell, codim):
            for g in elems:
                gens.append((face, codim, g))
    return gens


def _tuple_order(group: FiniteGroup, mat_row):
    order = 1
    cur = mat_row.copy()
    ident = np.full_like(mat_row, group.identity)
    while not np.array_equal(cur, ident):
        cur = group.mult[cur, mat_row]
        order += 1
    return order


def _abelian_span(group: FiniteGroup, gen_codes, nverts, what):
    """Span of generators in an abelian product group, grown cyclically."""
    n = group.order
    ident = np.full(nverts, group.identity, dtype=np.int64)
    span = np.unique(ar.encode_rows(ident[None, :], n))
    for code in gen_codes:
        gm = ar.decode_rows(np.array([code], dtype=np.uint64), n, nverts)[0].astype(np.int64)
        if bool(ar.isin_sorted(np.array([code], dtype=np.uint64), span)[0]):
            continue
        order = _tuple_order(group, gm)
        multiples = np.empty((order, nverts), dtype=np.int64)
        multiples[0] = group.identity
        for t in range(1, order):
            multiples[t] = group.mult[multiples[t - 1], gm]
        out = [span]
        chunk = max(1, (1 << 21) // max(order, 1))
        for lo in range(0, span.size, chunk):
            block = ar.decode_rows(span[lo : lo + chunk], n, nverts).astype(np.int64)
            prod = group.mult[block[:, None, :], multiples[None, :, :]]
            out.append(ar.encode_rows(prod.reshape(-1, nverts), n))
        span = np.unique(np.concatenate(out))
        check_guard(what, span.size)
    return span


def _bfs_closure(group: FiniteGroup, gen_codes, nverts, full_size, what):
    n = group.order
    ident = np.full(nverts, group.identity, dtype=np.int64)
    gen_codes = np.unique(np.asarray(gen_codes, dtype=np.uint64))
    gen_mats = ar.decode_rows(gen_codes, n, nverts).astype(np.int64)
    known = np.union1d(gen_codes, ar.encode_rows(ident[None, :], n))
    frontier = known
    while frontier.size:
        fmat = ar.decode_rows(frontier, n, nverts).astype(np.int64)
        outs = []
        for gm in gen_mats:
            outs.append(ar.encode_rows(group.mult[fmat, gm[None, :]], n))
        cand = np.unique(np.concatenate(outs))
        fresh = cand[~ar.isin_sorted(cand, known)]
        known = np.union1d(known, fresh)
        check_guard(what, known.size)
        if known.size == full_size:
            break
        frontier = fresh
    return known


def _hk_elements(group: FiniteGroup, levels, ell):
    """(codes, generator_log, full_flag) of the cube group at dimension ell."""
    nverts = 1 << ell
    full_size = group.order**nverts
    gens = _hk_generators(group, levels, ell)
    log = tuple((face.fixed, codim, g) for face, codim, g in gens)
    if levels(ell).is_full() and ell >= 1:
        # single-vertex faces carry every group element: the cube group is
        # the whole product, no closure needed
        check_guard(f"HK cube group at dimension {ell}", full_size)
        return np.arange(full_size, dtype=np.uint64), log, True
    codes = [face_code(group, face, g) for face, _, g in gens]
    what = f"HK cube group at dimension {ell}"
    if group.is_abelian():
        elems = _abelian_span(group, codes, nverts, what)
    else:
        elems = _bfs_closure(group, codes, nverts, full_size, what)
    return elems, log, elems.size == full_size


def hk_cube_group(filtration: Filtration, ell: int) -> HKCubeGroup:
    """Closure of the [g]_F generators, g in G_codim(F); deterministic order."""
    if not filtration.proper:
        raise ValueError("Host-Kra cube groups need a proper filtration")
    elems, log, full = _hk_elements(
        filtration.group, _levels_from_filtration(filtration), ell
    )
    return HKCubeGroup(filtration.group, ell, elems, log, full)


@dataclass
class HKNilspace:
    space: FiniteCubespace
    filtration: Filtration
    gamma: Subgroup
    coset_reps: tuple  # point id -> representative group element
    gamma_level_orders: tuple  # |Gamma cap G_i| per filtration level

    @property
    def npoints(self):
        return self.space.npoints


def hk_nilspace(filtration: Filtration, gamma: Subgroup, lmax: int) -> HKNilspace:
    """Points G/Gamma, cubes {w -> g(w).x Gamma : g in HK^l, x in G}.

    Finite Gamma-compatibility is automatic; the orders |Gamma cap G_i| are
    recorded rather than enforced.
    """
    group = filtration.group
    garr = np.array(gamma.elements, dtype=np.int64)
    coset_min = np.min(group.mult[:, garr], axis=1)
    reps = np.unique(coset_min)
    point_of = np.searchsorted(reps, coset_min)
    npts = reps.size

    levels = _levels_from_filtration(filtration)
    cubes = {}
    for ell in range(lmax + 1):
        elems, _, _ = _hk_elements(group, levels, ell)
        nverts = 1 << ell
        mats = ar.decode_rows(elems, group.order, nverts).astype(np.int64)
        check_guard(f"HK nilspace cubes at dimension {ell}", mats.shape[0] * npts)
        outs = []
        for x in reps:
            vals = point_of[group.mult[mats, int(x)]]
            outs.append(ar.encode_rows(vals, npts))
        cubes[ell] = CubeSet(npts, ell, np.unique(np.concatenate(outs)))
    space = FiniteCubespace(npts, lmax, cubes)
    gamma_orders = tuple(
        len(set(gamma.elements) & set(filtration.level(i).elements))
        for i in range(len(filtration.chain))
    )
    return HKNilspace(space, filtration, gamma, tuple(int(r) for r in reps), gamma_orders)


def standard_nilspace(abelian: FiniteAbelianGroup, s: int, lmax: int) -> FiniteCubespace:
    """The degree-s space on A: configurations whose alternating sums over
    every (s+1)-dimensional sub-cube image vanish."""
    if s < 0:
        raise ValueError("degree must be non-negative")
    n = abelian.order
    if n == 1:
        return point_cubespace(lmax)

    cubes = {}
    for ell in range(lmax + 1):
        nverts = 1 << ell
        rows = []
        for phi in enumerate_morphisms(s + 1, ell):
            row = np.zeros(nverts, dtype=np.int64)
            for v, w in enumerate(phi.vertex_map()):
                row[w] += sign(v)
            rows.append(row)
        rows = np.unique(np.array(rows), axis=0)
        rows = rows[np.any(rows != 0, axis=1)]

        total = 1
        factor_codes = []
        stride = 1
        for f in abelian.factors:
            sol = kernel_modular(rows * 1, f, nverts) if rows.size else kernel_modular(
                np.zeros((0, nverts), dtype=np.int64), f, nverts
            )
            arr = sol.all_solutions_array()
            total *= arr.shape[0]
            check_guard(f"standard nilspace cubes at dimension {ell}", total)
            factor_codes.append((ar.encode_rows(arr, n), stride))
            stride *= f

        combined = None
        for codes, stridek in factor_codes:
            scaled = codes * np.uint64(stridek)
            if combined is None:
                combined = scaled
            else:
                combined = (combined[:, None] + scaled[None, :]).ravel()
        # combined holds mixed-radix tuple codes; relabel into element ids
        out = np.empty_like(combined)
        chunk = 1 << 20
        t2e = abelian.tuple_to_elem
        for lo in range(0, combined.size, chunk):
            mat = ar.decode_rows(combined[lo : lo + chunk], n, nverts).astype(np.int64)
            out[lo : lo + chunk] = ar.encode_rows(t2e[mat], n)
        cubes[ell] = CubeSet(n, ell, out)
    return FiniteCubespace(n, lmax, cubes)


class NotAnAction(ValueError):
    pass


class GroupAction:
    """A verified action table H x X -> X with orbit bookkeeping."""

    def __init__(self, group: FiniteGroup, npoints: int, table):
        table = np.asarray(table, dtype=np.int64)
        if table.shape != (group.order, npoints):
            raise NotAnAction(f"table shape {table.shape} != ({group.order}, {npoints})")
        if table.min() < 0 or table.max() >= npoints:
            raise NotAnAction("action values out of range")
        if not np.array_equal(table[group.identity], np.arange(npoints)):
            raise NotAnAction("identity must act trivially")
        for g in range(group.order):
            lhs = table[group.mult[g]]  # (H, n): (g*h).x
            rhs = table[g][table]  # (H, n): g.(h.x)
            if not np.array_equal(lhs, rhs):
                h = int(np.argmax(np.any(lhs != rhs, axis=1)))
                raise NotAnAction(f"compatibility fails at g={g}, h={h}")
        self.group = group
        self.npoints = npoints
        self.table = table

    def act(self, h, x):
        return int(self.table[h, x])

    def orbits(self):
        seen = np.zeros(self.npoints, dtype=bool)
        out = []
        for x in range(self.npoints):
            if not seen[x]:
                orb = np.unique(self.table[:, x])
                seen[orb] = True
                out.append([int(v) for v in orb])
        return out

    @property
    def transitive(self):
        return len(self.orbits()) == 1


def left_translation_action(group: FiniteGroup) -> GroupAction:
    return GroupAction(group, group.order, group.mult)


def coset_action(group: FiniteGroup, sub: Subgroup) -> GroupAction:
    """Left translation on left cosets g(H); H need not be normal."""
    harr = np.array(sub.elements, dtype=np.int64)
    coset_min = np.min(group.mult[:, harr], axis=1)
    reps = np.unique(coset_min)
    point_of = np.searchsorted(reps, coset_min)
    table = point_of[group.mult[:, reps]]
    return GroupAction(group, reps.size, table)


@dataclass
class DynamicalCubespace:
    space: FiniteCubespace
    action: GroupAction
    stabilized_tail_order: int  # 1 iff the acting group is nilpotent
    hk_full: dict = field(default_factory=dict)


def dynamical_cubespace(action: GroupAction, lmax: int) -> DynamicalCubespace:
    """C^l_H(X) = {gamma . constant : gamma in HK^l(H)}; finite orbits are
    closed, so the orbit itself is the orbit closure.

    Non-nilpotent H uses the stabilized lower central series as its chain,
    which matches the hyperface generation of the cube group at every level.
    """
    group = action.group
    levels, tail = _stabilized_levels(group)
    n = action.npoints
    hk_full = {}
    cubes = {}
    for ell in range(lmax + 1):
        nverts = 1 << ell
        if levels(ell).is_full() and ell >= 1:
            hk_full[ell] = True
            orbs = action.orbits()
            total = sum(len(o) ** nverts for o in orbs)
            check_guard(f"dynamical cube set at dimension {ell}", total)
            outs = []
            for orb in orbs:
                arr = np.array(orb, dtype=np.int64)
                prods = arr[
                    np.stack(
                        np.meshgrid(*([np.arange(len(orb))] * nverts), indexing="ij"),
                        axis=-1,
                    ).reshape(-1, nverts)
                ]
                outs.append(ar.encode_rows(prods, n))
            cubes[ell] = CubeSet(n, ell, np.concatenate(outs))
            continue
        hk_full[ell] = False
        elems, _, full = _hk_elements(group, levels, ell)
        hk_full[ell] = full
        mats = ar.decode_rows(elems, group.order, nverts).astype(np.int64)
        check_guard(f"dynamical cube set at dimension {ell}", mats.shape[0] * n)
        outs = []
        for x in range(n):
            outs.append(ar.encode_rows(action.table[mats, x], n))
        cubes[ell] = CubeSet(n, ell, np.unique(np.concatenate(outs)))
    space = FiniteCubespace(n, lmax, cubes)
    return DynamicalCubespace(space, action, len(tail))


@dataclass
class RPResult:
    relation: EquivRelation
    matrix: np.ndarray
    equivalence_verdict: Verdict
    invariance_verdict: Verdict


def rp_relation(action: GroupAction, s: int, dyn: DynamicalCubespace | None = None) -> RPResult:
    """(x, y) related iff the corner configuration with base x and top y is a
    dynamical (s+1)-cube; verified an H-invariant equivalence relation."""
    if dyn is None:
        dyn = dynamical_cubespace(action, s + 1)
    space = dyn.space
    n = space.npoints
    cs = space.cube_set(s + 1)
    nverts = 1 << (s + 1)
    base_weight = np.uint64(0)
    pw = ar.powers_of(n, nverts)
    for v in range(nverts - 1):
        base_weight += pw[v]
    xs, ys = np.meshgrid(np.arange(n, dtype=np.uint64), np.arange(n, dtype=np.uint64), indexing="ij")
    codes = xs.ravel() * base_weight + ys.ravel() * pw[nverts - 1]
    rel = cs.contains_enc(codes).reshape(n, n)

    bad = check_equivalence_matrix(rel)
    if bad is not None:
        reason, witness = bad
        detail = f"{reason} on a transitive action" if action.transitive else reason
        raise NotEquivalence(witness, detail)
    eq_verdict = Verdict(True, "rp_equivalence", f"RP^{s} is an equivalence relation")

    inv_witness = None
    for h in range(action.group.order):
        perm = action.table[h]
        if not np.array_equal(rel[np.ix_(perm, perm)], rel):
            a, b = np.unravel_index(
                int(np.argmax(rel[np.ix_(perm, perm)] != rel)), rel.shape
            )
            inv_witness = {"h": int(h), "pair": [int(a), int(b)]}
            break
    inv_verdict = (
        Verdict(True, "rp_invariance", "relation is H-invariant")
        if inv_witness is None
        else Verdict(False, "rp_invariance", "relation moves under H", inv_witness)
    )
    relation = EquivRelation.from_matrix(rel)
    return RPResult(relation, rel, eq_verdict, inv_verdict)
