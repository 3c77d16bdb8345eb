"""FiniteCubespace and the nilspace axiom verifiers.

Cube sets are stored explicitly as sorted arrays of integer-encoded
configurations; membership is binary search.  Verifiers return Verdict
objects whose failure witnesses replay: feeding a witness back into the
space reproduces the failure.

Cube invariance is checked against the elementary morphisms (face
insertions, coordinate swaps, reflections, adjacent diagonals and
duplication), which generate every morphism of discrete cubes under
composition; an exhaustive mode over all morphisms exists for
cross-validation on small spaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import arrays as ar
from .cubes import (
    Configuration,
    Corner,
    CubeMorphism,
    diagonal_morphism,
    drop_last_morphism,
    enumerate_morphisms,
    face_insert_morphism,
    flip_morphism,
    swap_morphism,
)
from .guards import check_guard


class NotACubespace(ValueError):
    pass


class InvalidCorner(ValueError):
    def __init__(self, axis):
        super().__init__(f"corner face at omega_{axis} = 0 is not a cube")
        self.axis = axis


@dataclass
class Verdict:
    ok: bool
    check: str
    detail: str = ""
    witness: dict | None = None

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {
            "ok": self.ok,
            "check": self.check,
            "detail": self.detail,
            "witness": self.witness,
        }


class CubeSet:
    """Sorted unique configuration codes at a fixed dimension."""

    def __init__(self, npoints, dim, enc):
        self.npoints = npoints
        self.dim = dim
        self.nverts = 1 << dim
        enc = np.asarray(enc, dtype=np.uint64)
        self.enc = np.unique(enc)
        check_guard(f"cube set at dimension {dim}", self.enc.size)
        self._proj_cache = None
        self._mat_cache = None

    @classmethod
    def from_matrix(cls, npoints, dim, mat):
        mat = np.asarray(mat)
        if mat.size == 0:
            return cls(npoints, dim, np.zeros(0, dtype=np.uint64))
        if mat.ndim != 2 or mat.shape[1] != 1 << dim:
            raise NotACubespace(f"matrix shape {mat.shape} does not match dimension {dim}")
        if mat.min() < 0 or mat.max() >= npoints:
            raise NotACubespace("point ids out of range")
        return cls(npoints, dim, ar.encode_rows(mat, npoints))

    def __len__(self):
        return int(self.enc.size)

    def matrix(self):
        # cache small decodes; the multi-million-row sets stay on demand
        if self._mat_cache is not None:
            return self._mat_cache
        mat = ar.decode_rows(self.enc, self.npoints, self.nverts)
        if mat.size <= (1 << 22):
            mat.flags.writeable = False
            self._mat_cache = mat
        return mat

    def is_full(self):
        return len(self) == self.npoints**self.nverts

    def contains_enc(self, enc):
        return ar.isin_sorted(np.asarray(enc, dtype=np.uint64), self.enc)

    def contains(self, config: Configuration) -> bool:
        if config.dim != self.dim:
            return False
        code = ar.encode_rows(np.array([config.values]), self.npoints)
        return bool(self.contains_enc(code)[0])

    def _proj_index(self):
        # cubes grouped by their restriction away from the top vertex
        if self._proj_cache is None:
            low, top = ar.split_top(self.enc, self.npoints, self.nverts)
            order = np.argsort(low, kind="stable")
            self._proj_cache = (low[order], top[order])
        return self._proj_cache

    def completions_of(self, corner_code):
        """All top-vertex values completing the encoded corner to a cube."""
        lows, tops = self._proj_index()
        lo = np.searchsorted(lows, np.uint64(corner_code), side="left")
        hi = np.searchsorted(lows, np.uint64(corner_code), side="right")
        return sorted(int(t) for t in tops[lo:hi])

    def __eq__(self, other):
        return (
            isinstance(other, CubeSet)
            and self.npoints == other.npoints
            and self.dim == other.dim
            and np.array_equal(self.enc, other.enc)
        )


class FiniteCubespace:
    """Point set 0..n-1 with explicit cube sets C^0..C^lmax."""

    def __init__(self, npoints, lmax, cubes):
        if npoints < 1:
            raise NotACubespace("a cubespace needs at least one point")
        if lmax < 0:
            raise NotACubespace("lmax must be non-negative")
        self.npoints = npoints
        self.lmax = lmax
        self.cubes = {}
        for ell in range(lmax + 1):
            if ell not in cubes:
                raise NotACubespace(f"missing cube set at dimension {ell}")
            cs = cubes[ell]
            if not isinstance(cs, CubeSet):
                cs = CubeSet.from_matrix(npoints, ell, np.asarray(cs))
            if cs.dim != ell or cs.npoints != npoints:
                raise NotACubespace(f"cube set mismatch at dimension {ell}")
            self.cubes[ell] = cs
        c0 = self.cubes[0].enc
        if not np.array_equal(c0, np.arange(npoints, dtype=np.uint64)):
            raise NotACubespace("C^0 must consist of every point")
        self._verdicts = {}

    def cube_set(self, ell) -> CubeSet:
        if ell > self.lmax:
            raise NotACubespace(f"dimension {ell} above lmax {self.lmax}")
        return self.cubes[ell]

    def contains(self, config: Configuration) -> bool:
        return self.cube_set(config.dim).contains(config)

    def counts(self):
        return [len(self.cubes[ell]) for ell in range(self.lmax + 1)]

    def cached(self, key, compute):
        if key not in self._verdicts:
            self._verdicts[key] = compute()
        return self._verdicts[key]

    def __eq__(self, other):
        return (
            isinstance(other, FiniteCubespace)
            and self.npoints == other.npoints
            and self.lmax == other.lmax
            and all(self.cubes[l] == other.cubes[l] for l in range(self.lmax + 1))
        )

    def __repr__(self):
        return f"FiniteCubespace(n={self.npoints}, lmax={self.lmax}, counts={self.counts()})"


def full_cubespace(npoints, lmax):
    """Every configuration is a cube at every dimension."""
    cubes = {}
    for ell in range(lmax + 1):
        total = npoints ** (1 << ell)
        check_guard(f"full cube set at dimension {ell}", total)
        cubes[ell] = CubeSet(npoints, ell, np.arange(total, dtype=np.uint64))
    return FiniteCubespace(npoints, lmax, cubes)


def point_cubespace(lmax=4):
    return full_cubespace(1, lmax)


def _elementary_into(k, lmax, full=False):
    """Elementary morphisms applicable to a k-cube.

    The default reduced set still generates every discrete-cube morphism
    under composition: remaining faces and flips are swap-conjugates of the
    kept ones (face at the last coordinate, flip of the last coordinate).
    `full` lists every face/flip position, which the closure builder uses.
    """
    out = []
    if k >= 1:
        positions = range(1, k + 1) if full else (k,)
        for i in positions:
            out.append(face_insert_morphism(k, i, 0))
            out.append(face_insert_morphism(k, i, 1))
            out.append(flip_morphism(k, i))
    for i in range(1, k):
        out.append(swap_morphism(k, i))
        out.append(diagonal_morphism(k, i))
    if k + 1 <= lmax:
        out.append(drop_last_morphism(k))
    return out


def check_cube_invariance(space: FiniteCubespace, exhaustive=False) -> Verdict:
    """Closure of the cube family under discrete-cube morphisms.

    The default checks the elementary generating set; `exhaustive` ranges
    over every morphism between dimensions <= lmax (small spaces only).
    """

    def compute():
        for k in range(space.lmax + 1):
            cs = space.cube_set(k)
            if len(cs) == 0:
                continue
            if exhaustive:
                morphs = []
                for ell in range(space.lmax + 1):
                    morphs.extend(enumerate_morphisms(ell, k))
            else:
                morphs = _elementary_into(k, space.lmax)
            mat = cs.matrix()
            for phi in morphs:
                if phi.source_dim > space.lmax:
                    continue
                out = ar.encode_rows(mat[:, list(phi.vertex_map())], space.npoints)
                good = space.cube_set(phi.source_dim).contains_enc(out)
                if not good.all():
                    bad = int(np.argmin(good))
                    cube = [int(v) for v in mat[bad]]
                    return Verdict(
                        False,
                        "cube_invariance",
                        f"c o phi escapes C^{phi.source_dim}",
                        {
                            "cube_dim": k,
                            "cube": cube,
                            "morphism": [list(t) for t in phi.coords],
                            "source_dim": phi.source_dim,
                        },
                    )
            del mat
        return Verdict(True, "cube_invariance", "closed under elementary generators")

    return space.cached(("invariance", exhaustive), compute)


def invariance_closure(npoints, lmax, seeds) -> FiniteCubespace:
    """Smallest cube-invariant family over 0..lmax containing the seeds.

    `seeds` maps dimensions to configuration matrices; C^0 is always all
    points.  Idempotent and monotone in the seed.
    """
    sets = {ell: set() for ell in range(lmax + 1)}
    sets[0] = set(range(npoints))
    for ell, mat in seeds.items():
        mat = np.asarray(mat)
        if mat.size:
            if ell > lmax:
                raise NotACubespace(f"seed dimension {ell} above lmax")
            for code in ar.encode_rows(mat, npoints):
                sets[ell].add(int(code))

    dirty = True
    while dirty:
        dirty = False
        for k in range(lmax + 1):
            if not sets[k]:
                continue
            enc = np.fromiter(sets[k], dtype=np.uint64)
            for phi in _elementary_into(k, lmax, full=True):
                out = ar.apply_vertex_map(enc, npoints, 1 << k, phi.vertex_map())
                target = sets[phi.source_dim]
                before = len(target)
                target.update(int(c) for c in out)
                check_guard(f"invariance closure at dimension {phi.source_dim}", len(target))
                if len(target) != before:
                    dirty = True
    cubes = {
        ell: CubeSet(npoints, ell, np.fromiter(sets[ell], dtype=np.uint64))
        for ell in range(lmax + 1)
    }
    return FiniteCubespace(npoints, lmax, cubes)


def check_ergodic(space: FiniteCubespace, s: int) -> Verdict:
    """C^s must be every configuration."""

    def compute():
        cs = space.cube_set(s)
        total = space.npoints ** (1 << s)
        if len(cs) == total:
            return Verdict(True, "ergodic", f"all {total} configurations at dimension {s}")
        probe = np.arange(min(len(cs) + 1, total), dtype=np.uint64)
        present = cs.contains_enc(probe)
        missing = int(probe[np.argmin(present)]) if not present.all() else len(cs)
        config = [int(v) for v in ar.decode_rows(np.array([missing], dtype=np.uint64), space.npoints, 1 << s)[0]]
        return Verdict(
            False,
            "ergodic",
            f"{len(cs)} of {total} configurations at dimension {s}",
            {"dim": s, "missing_configuration": config},
        )

    return space.cached(("ergodic", s), compute)


def ergodic_level(space: FiniteCubespace) -> int:
    level = 0
    for s in range(1, space.lmax + 1):
        if check_ergodic(space, s).ok:
            level = s
        else:
            break
    return level


def _corner_codes(space: FiniteCubespace, ell: int):
    """Codes of every valid ell-corner (all lower faces are cubes)."""
    n = space.npoints
    if ell == 0:
        return np.zeros(0, dtype=np.uint64)
    lower = space.cube_set(ell - 1)
    if ell == 1:
        return np.arange(n, dtype=np.uint64)  # any point, lower face is C^0
    faces = [
        [v for v in range(1 << ell) if not (v >> (i - 1)) & 1] for i in range(1, ell + 1)
    ]
    mat = lower.matrix()
    partial = mat
    acquired = list(faces[0])
    for verts in faces[1:]:
        overlap = sorted(set(acquired) & set(verts))
        new = [v for v in verts if v not in acquired]
        pos_partial = [acquired.index(v) for v in overlap]
        pos_face = [verts.index(v) for v in overlap]
        key_a = ar.encode_rows(partial[:, pos_partial], n)
        key_b = ar.encode_rows(mat[:, pos_face], n)
        ia, ib = ar.merge_join(key_a, key_b, what=f"corner join at dimension {ell}")
        new_pos = [verts.index(v) for v in new]
        partial = np.hstack([partial[ia], mat[ib][:, new_pos]])
        acquired.extend(new)
    order = np.argsort(acquired)
    codes = ar.encode_rows(partial[:, order], n)
    return np.unique(codes)


def corner_from_code(space: FiniteCubespace, ell: int, code) -> Corner:
    vals = ar.decode_rows(np.array([code], dtype=np.uint64), space.npoints, (1 << ell) - 1)[0]
    return Corner(ell, tuple(int(v) for v in vals))


def complete_corner(space: FiniteCubespace, corner: Corner):
    """All points completing the corner; InvalidCorner if a lower face is not a cube."""
    ell = corner.dim
    cs = space.cube_set(ell)
    for i in range(1, ell + 1):
        if not space.contains(corner.restrict_lower(i)):
            raise InvalidCorner(i)
    code = ar.encode_rows(np.array([corner.values]), space.npoints)[0]
    return cs.completions_of(code)


def check_fibrant(space: FiniteCubespace, up_to: int) -> Verdict:
    """Every valid corner at dimensions 1..up_to has a completion."""

    def level(ell):
        def compute():
            corners = _corner_codes(space, ell)
            completable, _ = ar.split_top(space.cube_set(ell).enc, space.npoints, 1 << ell)
            missing = np.setdiff1d(corners, np.unique(completable))
            if missing.size == 0:
                return Verdict(True, "fibrant", f"all {corners.size} corners complete at dimension {ell}")
            corner = corner_from_code(space, ell, missing[0])
            return Verdict(
                False,
                "fibrant",
                f"{missing.size} corners without completion at dimension {ell}",
                {"dim": ell, "corner": list(corner.values)},
            )

        return space.cached(("fibrant", ell), compute)

    for ell in range(1, min(up_to, space.lmax) + 1):
        v = level(ell)
        if not v.ok:
            return v
    return Verdict(True, "fibrant", f"corner completion holds up to dimension {min(up_to, space.lmax)}")


def check_uniqueness(space: FiniteCubespace, s: int) -> Verdict:
    """Two s-cubes agreeing away from the top vertex must be equal."""

    def compute():
        cs = space.cube_set(s)
        low, top = ar.split_top(cs.enc, space.npoints, cs.nverts)
        order = np.argsort(low, kind="stable")
        lo = low[order]
        dup = np.nonzero(lo[1:] == lo[:-1])[0]
        if dup.size == 0:
            return Verdict(True, "uniqueness", f"{s}-uniqueness holds")
        i = int(dup[0])
        c1 = cs.enc[order[i]]
        c2 = cs.enc[order[i + 1]]
        m = ar.decode_rows(np.array([c1, c2], dtype=np.uint64), space.npoints, cs.nverts)
        return Verdict(
            False,
            "uniqueness",
            f"two {s}-cubes agree away from the top vertex",
            {"dim": s, "cube1": [int(v) for v in m[0]], "cube2": [int(v) for v in m[1]]},
        )

    return space.cached(("uniqueness", s), compute)


def _transitivity_witness(edges_lo, edges_hi, labels, bad_component):
    """(a, b, c) with a->b, b->c edges but no a->c, inside the bad component."""
    adjacency = {}
    for a, b in zip(edges_lo, edges_hi):
        if labels[a] == bad_component:
            adjacency.setdefault(int(a), set()).add(int(b))
    comp_nodes = {int(x) for x in np.nonzero(labels == bad_component)[0]}
    for u in sorted(adjacency):
        reach_u = adjacency.get(u, set())
        if reach_u >= comp_nodes:
            continue
        prev = {u: None}
        queue = [u]
        target = None
        while queue and target is None:
            x = queue.pop(0)
            for y in sorted(adjacency.get(x, ())):
                if y not in prev:
                    prev[y] = x
                    if y not in reach_u:
                        target = y
                        break
                    queue.append(y)
        if target is None:
            continue
        path = [target]
        while prev[path[-1]] is not None:
            path.append(prev[path[-1]])
        path.reverse()
        for k in range(2, len(path)):
            if path[k] not in reach_u:
                return u, path[k - 1], path[k]
    return None


def check_glueing(space: FiniteCubespace, up_to: int) -> Verdict:
    """[c1,c2], [c2,c3] cubes forces [c1,c3] to be one, for concatenations
    of dimension <= up_to."""

    def level(m):
        def compute():
            n = space.npoints
            cs = space.cube_set(m)
            lo, hi = ar.split_halves(cs.enc, n, cs.nverts)
            nodes = np.unique(np.concatenate([lo, hi]))
            li = ar.index_sorted(lo, nodes)
            hi_i = ar.index_sorted(hi, nodes)
            k = nodes.size
            if k == 0:
                return Verdict(True, "glueing", f"no concatenations at dimension {m}")
            pair_codes = np.sort(li.astype(np.uint64) * np.uint64(k) + hi_i.astype(np.uint64))
            swapped = np.sort(hi_i.astype(np.uint64) * np.uint64(k) + li.astype(np.uint64))
            symmetric = np.array_equal(pair_codes, swapped)
            diag = np.arange(k, dtype=np.uint64) * np.uint64(k) + np.arange(k, dtype=np.uint64)
            reflexive = bool(ar.isin_sorted(diag, pair_codes).all())
            if symmetric and reflexive:
                graph = coo_matrix(
                    (np.ones(li.size, dtype=np.int8), (li, hi_i)), shape=(k, k)
                )
                ncomp, labels = connected_components(graph, directed=False)
                sizes = np.bincount(labels, minlength=ncomp).astype(np.int64)
                per_comp = np.bincount(labels[li], minlength=ncomp).astype(np.int64)
                bad = np.nonzero(per_comp != sizes**2)[0]
                if bad.size == 0:
                    return Verdict(True, "glueing", f"dimension {m}: relation is transitive")
                trip = _transitivity_witness(li, hi_i, labels, int(bad[0]))
            else:
                # directed fallback: out-sets composed pairwise, guarded
                outs, ins = {}, {}
                for a, b in zip(li.tolist(), hi_i.tolist()):
                    outs.setdefault(a, set()).add(b)
                    ins.setdefault(b, set()).add(a)
                work = sum(len(ins.get(b, ())) * len(outs.get(b, ())) for b in range(k))
                check_guard(f"glueing triple scan at dimension {m}", work)
                trip = None
                for b in range(k):
                    for a in ins.get(b, ()):
                        missing = outs.get(b, set()) - outs.get(a, set())
                        if missing:
                            trip = (a, b, min(missing))
                            break
                    if trip:
                        break
                if trip is None:
                    return Verdict(True, "glueing", f"dimension {m}: relation is transitive")
            a, b, c = trip
            half = cs.nverts // 2
            dec = ar.decode_rows(nodes[[a, b, c]], n, half)
            return Verdict(
                False,
                "glueing",
                f"glueing fails for concatenations of dimension {m}",
                {
                    "dim": m - 1,
                    "c1": [int(v) for v in dec[0]],
                    "c2": [int(v) for v in dec[1]],
                    "c3": [int(v) for v in dec[2]],
                },
            )

        return space.cached(("glueing", m), compute)

    for m in range(1, min(up_to, space.lmax) + 1):
        v = level(m)
        if not v.ok:
            return v
    return Verdict(True, "glueing", f"glueing holds for concatenations up to dimension {min(up_to, space.lmax)}")


@dataclass
class NilspaceCertificate:
    npoints: int
    lmax_checked: int
    is_nilspace: bool
    degree: int | None
    ergodic_level: int
    uniqueness_monotone: bool
    verdicts: dict = field(default_factory=dict)
    reason: str = ""

    def to_json(self):
        return {
            "npoints": self.npoints,
            "lmax_checked": self.lmax_checked,
            "is_nilspace": self.is_nilspace,
            "degree": self.degree,
            "ergodic_level": self.ergodic_level,
            "uniqueness_monotone": self.uniqueness_monotone,
            "verdicts": {k: v.to_json() for k, v in self.verdicts.items()},
            "reason": self.reason,
        }


def nilspace_degree(space: FiniteCubespace) -> NilspaceCertificate:
    """Invariance + fibrancy up to lmax + uniqueness scan.

    The degree is the least s with (s+1)-uniqueness; fibrancy beyond lmax is
    a finite truncation and the certificate records the level checked.
    """
    verdicts = {}
    verdicts["invariance"] = check_cube_invariance(space)
    verdicts["fibrant"] = check_fibrant(space, space.lmax)
    erg = ergodic_level(space)

    uniq = {}
    for s in range(1, space.lmax + 1):
        uniq[s] = check_uniqueness(space, s)
        verdicts[f"uniqueness_{s}"] = uniq[s]
    monotone = True
    seen_pass = False
    for s in range(1, space.lmax + 1):
        if uniq[s].ok:
            seen_pass = True
        elif seen_pass:
            monotone = False

    if not verdicts["invariance"].ok:
        return NilspaceCertificate(
            space.npoints, space.lmax, False, None, erg, monotone, verdicts,
            "cube invariance fails",
        )
    if not verdicts["fibrant"].ok:
        return NilspaceCertificate(
            space.npoints, space.lmax, False, None, erg, monotone, verdicts,
            "corner completion fails",
        )
    degree = None
    for s in range(0, space.lmax):
        if uniq[s + 1].ok:
            degree = s
            break
    if degree is None:
        return NilspaceCertificate(
            space.npoints, space.lmax, False, None, erg, monotone, verdicts,
            f"no (s+1)-uniqueness for any s < {space.lmax}",
        )
    return NilspaceCertificate(space.npoints, space.lmax, True, degree, erg, monotone, verdicts)


def induced_subcubespace(space: FiniteCubespace, points):
    """The subcubespace on a point subset, relabeled 0..k-1; returns
    (subspace, inclusion list mapping new ids to old)."""
    points = sorted(set(int(p) for p in points))
    if not points:
        raise NotACubespace("induced subcubespace needs at least one point")
    relabel = np.full(space.npoints, -1, dtype=np.int64)
    for i, p in enumerate(points):
        relabel[p] = i
    cubes = {}
    for ell in range(space.lmax + 1):
        mat = space.cube_set(ell).matrix()
        keep = np.isin(mat, points).all(axis=1)
        cubes[ell] = CubeSet.from_matrix(len(points), ell, relabel[mat[keep].astype(np.int64)])
    return FiniteCubespace(len(points), space.lmax, cubes), points


def replay_verdict(space: FiniteCubespace, verdict_json) -> bool:
    """Re-run a failure witness; True when the failure reproduces."""
    if verdict_json.get("ok"):
        return True
    check = verdict_json["check"]
    w = verdict_json.get("witness") or {}
    if check == "cube_invariance":
        phi = CubeMorphism(
            int(w["source_dim"]), int(w["cube_dim"]),
            tuple((kind, int(arg)) for kind, arg in w["morphism"]),
        )
        cube = Configuration(int(w["cube_dim"]), tuple(w["cube"]))
        if not space.contains(cube):
            return False
        from .cubes import apply_morphism

        return not space.contains(apply_morphism(cube, phi))
    if check == "ergodic":
        return not space.contains(Configuration(int(w["dim"]), tuple(w["missing_configuration"])))
    if check == "fibrant":
        corner = Corner(int(w["dim"]), tuple(w["corner"]))
        try:
            return complete_corner(space, corner) == []
        except InvalidCorner:
            return False
    if check == "uniqueness":
        c1 = Configuration(int(w["dim"]), tuple(w["cube1"]))
        c2 = Configuration(int(w["dim"]), tuple(w["cube2"]))
        return (
            c1 != c2
            and c1.values[:-1] == c2.values[:-1]
            and space.contains(c1)
            and space.contains(c2)
        )
    if check == "glueing":
        from .cubes import concatenate

        d = int(w["dim"])
        c1 = Configuration(d, tuple(w["c1"]))
        c2 = Configuration(d, tuple(w["c2"]))
        c3 = Configuration(d, tuple(w["c3"]))
        return (
            space.contains(concatenate(c1, c2))
            and space.contains(concatenate(c2, c3))
            and not space.contains(concatenate(c1, c3))
        )
    raise ValueError(f"unknown check {check}")
