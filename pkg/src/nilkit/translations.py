"""i-translations: membership checking, brute-force and generated groups,
the nested Aut filtration, and descent / lifting along fibrations.

A bijection f is an i-translation when applying f on any codimension-i face
of any cube yields a cube.  Brute force over all bijections is capped at 8
points; above the cap only generator-closure mode is available and results
carry an explicit "possibly proper subgroup" flag.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import arrays as ar
from .cubes import enumerate_faces
from .cubespace import FiniteCubespace, Verdict
from .fibrations import CubespaceMap
from .groups import FiniteGroup, validate_group
from .guards import check_guard

BRUTE_FORCE_CAP = 8


class NotBijection(ValueError):
    pass


class NoDescent(ValueError):
    def __init__(self, witness, detail=""):
        super().__init__(f"translation does not descend: {detail} (witness {witness})")
        self.witness = witness


@dataclass(frozen=True)
class Translation:
    space: FiniteCubespace
    perm: tuple
    level: int  # i
    verified_up_to: int

    def arr(self):
        return np.array(self.perm, dtype=np.int64)

    def __call__(self, x):
        return self.perm[x]


def is_translation(space: FiniteCubespace, perm, i: int, up_to: int | None = None) -> Verdict:
    """[f]_F . c stays a cube for all cubes c and codimension-i faces F."""
    perm = tuple(int(v) for v in perm)
    if sorted(perm) != list(range(space.npoints)):
        raise NotBijection(f"{perm} is not a bijection of 0..{space.npoints - 1}")
    if i < 1:
        raise ValueError("translation level must be >= 1")
    up_to = space.lmax if up_to is None else min(up_to, space.lmax)
    parr = np.array(perm, dtype=np.int64)
    for ell in range(i, up_to + 1):
        cs = space.cube_set(ell)
        if len(cs) == 0:
            continue
        mat = cs.matrix().astype(np.int64)
        for face in enumerate_faces(ell, i):
            members = list(face.members())
            moved = mat.copy()
            moved[:, members] = parr[mat[:, members]]
            codes = ar.encode_rows(moved, space.npoints)
            ok = cs.contains_enc(codes)
            if not ok.all():
                bad = int(np.argmin(ok))
                return Verdict(
                    False,
                    "translation",
                    f"face action breaks a {ell}-cube",
                    {
                        "dim": ell,
                        "cube": [int(v) for v in mat[bad]],
                        "face": [list(p) for p in face.fixed],
                        "perm": list(perm),
                        "level": i,
                    },
                )
    return Verdict(True, "translation", f"level-{i} translation up to dimension {up_to}")


@dataclass
class TranslationGroup:
    space: FiniteCubespace
    level: int
    elements: tuple  # permutation tuples, sorted
    group: FiniteGroup  # abstract copy via the composition table
    mode: str  # "brute_force" | "generated"
    complete: bool  # False when only a (possibly proper) subgroup was built

    def __len__(self):
        return len(self.elements)

    def index_of(self, perm):
        return self.elements.index(tuple(int(v) for v in perm))


def _table_from_perms(perms):
    index = {p: i for i, p in enumerate(perms)}
    size = len(perms)
    table = np.zeros((size, size), dtype=np.int64)
    for a, pa in enumerate(perms):
        for b, pb in enumerate(perms):
            comp = tuple(pa[pb[i]] for i in range(len(pa)))
            table[a, b] = index[comp]
    return validate_group(table)


def translation_group(
    space: FiniteCubespace, i: int, generators=None, up_to: int | None = None
) -> TranslationGroup:
    """All i-translations by brute force (n <= 8), or the subgroup generated
    by the supplied candidate permutations, flagged as possibly proper."""
    n = space.npoints
    if generators is None:
        if n > BRUTE_FORCE_CAP:
            raise ValueError(
                f"brute force over {n}! bijections exceeds the cap {BRUTE_FORCE_CAP}; "
                "pass generators for closure mode"
            )
        found = []
        for perm in itertools.permutations(range(n)):
            if is_translation(space, perm, i, up_to).ok:
                found.append(perm)
        perms = sorted(found)
        mode, complete = "brute_force", True
    else:
        gens = []
        for g in generators:
            g = tuple(int(v) for v in g)
            v = is_translation(space, g, i, up_to)
            if not v.ok:
                raise ValueError(f"candidate {g} is not a level-{i} translation: {v.detail}")
            gens.append(g)
        ident = tuple(range(n))
        elems = {ident}
        frontier = [ident]
        while frontier:
            new = []
            for g in gens:
                for h in frontier:
                    comp = tuple(g[h[k]] for k in range(n))
                    if comp not in elems:
                        elems.add(comp)
                        new.append(comp)
            frontier = new
            check_guard("translation closure", len(elems))
        perms = sorted(elems)
        mode, complete = "generated", False

    group = _table_from_perms(perms)
    # closure under composition and inverse is verified by the table build;
    # membership of every element is re-verified
    for p in perms:
        v = is_translation(space, p, i, up_to)
        if not v.ok:
            raise AssertionError("closure left the translation group")
    return TranslationGroup(space, i, tuple(perms), group, mode, complete)


def aut_filtration(space: FiniteCubespace, max_level: int | None = None):
    """Aut_1 >= Aut_2 >= ... with nesting and the bracket law verified.

    Returns (groups, verdicts); brute-force only, so n <= 8.
    """
    max_level = space.lmax if max_level is None else max_level
    groups = {}
    for i in range(1, max_level + 1):
        groups[i] = translation_group(space, i)
    verdicts = {}
    ok_nested = True
    for i in range(1, max_level):
        if not set(groups[i + 1].elements) <= set(groups[i].elements):
            ok_nested = False
    verdicts["nested"] = Verdict(ok_nested, "aut_nested", "Aut_{i+1} inside Aut_i")
    # bracket law, restricted to i + j within the computed range (the finite
    # truncation cannot see deeper levels)
    ok_bracket = True
    witness = None
    for i in range(1, max_level + 1):
        for j in range(1, max_level + 1 - i):
            target_set = set(groups[i + j].elements)
            for pa in groups[i].elements:
                inv_a = tuple(int(v) for v in np.argsort(np.array(pa)))
                for pb in groups[j].elements:
                    inv_b = tuple(int(v) for v in np.argsort(np.array(pb)))
                    comm = tuple(
                        inv_a[inv_b[pa[pb[k]]]] for k in range(space.npoints)
                    )
                    if comm not in target_set:
                        ok_bracket = False
                        witness = {"i": i, "j": j, "a": list(pa), "b": list(pb)}
    verdicts["bracket"] = Verdict(
        ok_bracket, "aut_bracket", "[Aut_i, Aut_j] inside Aut_{i+j} within the checked range", witness
    )
    return groups, verdicts


def push_translation(phi: CubespaceMap, f: Translation) -> Translation:
    """The unique translation downstairs with f' o phi = phi o f, provided f
    maps phi-fibers onto phi-fibers; NoDescent with a witness fiber otherwise."""
    fibers = phi.fibers()
    fiber_sets = {y: frozenset(xs) for y, xs in fibers.items()}
    by_set = {v: k for k, v in fiber_sets.items()}
    mapping = {}
    for y, xs in fibers.items():
        image = frozenset(f.perm[x] for x in xs)
        if image not in by_set:
            raise NoDescent(y, "image of the fiber is not a fiber")
        mapping[y] = by_set[image]
    perm = tuple(mapping[y] for y in range(phi.target.npoints))
    v = is_translation(phi.target, perm, f.level)
    if not v.ok:
        raise NoDescent(None, f"descended map is not a translation: {v.detail}")
    for x in range(phi.source.npoints):
        assert perm[phi.mapping[x]] == phi.mapping[f.perm[x]]
    return Translation(phi.target, perm, f.level, phi.target.lmax)


def pull_translation(phi: CubespaceMap, f_down: Translation, cap: int = 100_000) -> list:
    """All lifts f with phi o f = f_down o phi that are translations of the
    source; possibly empty, which is a reportable outcome."""
    fibers = phi.fibers()
    blocks = []
    for y in sorted(fibers):
        src = fibers[y]
        dst = fibers.get(f_down.perm[y], [])
        if len(src) != len(dst):
            return []
        blocks.append((src, list(itertools.permutations(dst))))
    total = 1
    for _, perms in blocks:
        total *= len(perms)
    check_guard("translation lift search", total)
    if total > cap:
        raise ValueError(f"lift search space {total} exceeds cap {cap}")
    lifts = []
    n = phi.source.npoints
    for combo in itertools.product(*(perms for _, perms in blocks)):
        perm = [None] * n
        for (src, _), assigned in zip(blocks, combo):
            for x, fx in zip(src, assigned):
                perm[x] = fx
        perm = tuple(perm)
        if is_translation(phi.source, perm, f_down.level).ok:
            lifts.append(Translation(phi.source, perm, f_down.level, phi.source.lmax))
    return lifts
