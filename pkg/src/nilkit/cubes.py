"""Discrete-cube combinatorics: vertices, morphisms, faces, configurations.

Vertices of {0,1}^d are encoded as integers v < 2^d with bit (i-1) of v
holding coordinate i.  All canonical orders are ascending integer order.
Point ids are opaque non-negative integers; nothing here interprets them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from .guards import check_guard

CONST0 = ("const", 0)
CONST1 = ("const", 1)


def proj(i: int):
    return ("proj", i)


def flip(i: int):
    return ("flip", i)


def popcount(v: int) -> int:
    return bin(v).count("1")


def sign(v: int) -> int:
    """(-1)**|omega| for the vertex v."""
    return -1 if popcount(v) & 1 else 1


def vertex_bits(v: int, dim: int):
    return tuple((v >> i) & 1 for i in range(dim))


@dataclass(frozen=True)
class CubeMorphism:
    """A map {0,1}^source_dim -> {0,1}^target_dim, one token per target coord.

    Tokens are ("const", 0|1), ("proj", i) or ("flip", i) with 1 <= i <=
    source_dim; ("flip", i) stands for 1 - omega_i.
    """

    source_dim: int
    target_dim: int
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.target_dim:
            raise ValueError("coords length must equal target_dim")
        for kind, arg in self.coords:
            if kind == "const":
                if arg not in (0, 1):
                    raise ValueError(f"bad constant {arg}")
            elif kind in ("proj", "flip"):
                if not 1 <= arg <= self.source_dim:
                    raise ValueError(f"coordinate index {arg} out of range")
            else:
                raise ValueError(f"unknown token kind {kind}")

    def apply_vertex(self, v: int) -> int:
        w = 0
        for j, (kind, arg) in enumerate(self.coords):
            if kind == "const":
                bit = arg
            else:
                bit = (v >> (arg - 1)) & 1
                if kind == "flip":
                    bit ^= 1
            w |= bit << j
        return w

    def vertex_map(self) -> tuple:
        """Image vertex for every source vertex, in ascending order."""
        return tuple(self.apply_vertex(v) for v in range(1 << self.source_dim))

    def compose(self, inner: "CubeMorphism") -> "CubeMorphism":
        """self o inner, requiring inner.target_dim == self.source_dim."""
        if inner.target_dim != self.source_dim:
            raise ValueError("dimension mismatch in composition")
        out = []
        for kind, arg in self.coords:
            if kind == "const":
                out.append((kind, arg))
                continue
            k2, a2 = inner.coords[arg - 1]
            if kind == "proj":
                out.append((k2, a2))
            elif k2 == "const":
                out.append(("const", 1 - a2))
            else:
                out.append(("flip" if k2 == "proj" else "proj", a2))
        return CubeMorphism(inner.source_dim, self.target_dim, tuple(out))


def identity_morphism(dim: int) -> CubeMorphism:
    return CubeMorphism(dim, dim, tuple(proj(i) for i in range(1, dim + 1)))


def face_insert_morphism(k: int, pos: int, val: int) -> CubeMorphism:
    """{0,1}^(k-1) -> {0,1}^k fixing target coordinate pos to val."""
    coords = []
    src = 1
    for j in range(1, k + 1):
        if j == pos:
            coords.append(("const", val))
        else:
            coords.append(proj(src))
            src += 1
    return CubeMorphism(k - 1, k, tuple(coords))


def drop_last_morphism(k: int) -> CubeMorphism:
    """{0,1}^(k+1) -> {0,1}^k ignoring the last source coordinate."""
    return CubeMorphism(k + 1, k, tuple(proj(i) for i in range(1, k + 1)))


def swap_morphism(k: int, i: int) -> CubeMorphism:
    """{0,1}^k -> {0,1}^k exchanging coordinates i and i+1."""
    coords = list(range(1, k + 1))
    coords[i - 1], coords[i] = coords[i], coords[i - 1]
    return CubeMorphism(k, k, tuple(proj(c) for c in coords))


def flip_morphism(k: int, i: int) -> CubeMorphism:
    coords = [flip(j) if j == i else proj(j) for j in range(1, k + 1)]
    return CubeMorphism(k, k, tuple(coords))


def diagonal_morphism(k: int, i: int) -> CubeMorphism:
    """{0,1}^(k-1) -> {0,1}^k repeating source coordinate i at targets i, i+1."""
    coords = []
    for j in range(1, k + 1):
        if j <= i:
            coords.append(proj(j))
        else:
            coords.append(proj(j - 1))
    return CubeMorphism(k - 1, k, tuple(coords))


def enumerate_morphisms(source_dim: int, target_dim: int) -> list:
    """All (2 + 2*source_dim)^target_dim morphisms in lexicographic coord order."""
    if source_dim < 0 or target_dim < 0:
        raise ValueError("dimensions must be non-negative")
    tokens = [CONST0, CONST1]
    for i in range(1, source_dim + 1):
        tokens.append(proj(i))
        tokens.append(flip(i))
    check_guard("enumerate_morphisms", len(tokens) ** target_dim)
    return [
        CubeMorphism(source_dim, target_dim, coords)
        for coords in itertools.product(tokens, repeat=target_dim)
    ]


@dataclass(frozen=True)
class Face:
    """A face of {0,1}^ambient_dim given by fixed (coordinate, value) pairs."""

    ambient_dim: int
    fixed: tuple  # sorted ((index, value), ...), indices distinct, 1-based

    def __post_init__(self):
        idxs = [i for i, _ in self.fixed]
        if len(set(idxs)) != len(idxs):
            raise ValueError("fixed coordinate indices must be distinct")
        if any(not 1 <= i <= self.ambient_dim for i in idxs):
            raise ValueError("fixed coordinate index out of range")
        if tuple(sorted(self.fixed)) != self.fixed:
            raise ValueError("fixed pairs must be sorted by index")

    @property
    def codim(self) -> int:
        return len(self.fixed)

    def contains(self, v: int) -> bool:
        return all((v >> (i - 1)) & 1 == val for i, val in self.fixed)

    def members(self) -> tuple:
        return tuple(v for v in range(1 << self.ambient_dim) if self.contains(v))


def hyperface(dim: int, i: int, val: int) -> Face:
    return Face(dim, ((i, val),))


def whole_cube_face(dim: int) -> Face:
    return Face(dim, ())


def enumerate_faces(dim: int, codim: int) -> list:
    """All C(dim, codim) * 2^codim faces, ordered by index tuple then values."""
    if not 0 <= codim <= dim:
        raise ValueError("codim out of range")
    out = []
    for idxs in itertools.combinations(range(1, dim + 1), codim):
        for vals in itertools.product((0, 1), repeat=codim):
            out.append(Face(dim, tuple(zip(idxs, vals))))
    return out


@dataclass(frozen=True)
class Configuration:
    """A total map {0,1}^dim -> point ids, as a tuple in vertex order."""

    dim: int
    values: tuple

    def __post_init__(self):
        if len(self.values) != 1 << self.dim:
            raise ValueError("values must cover all 2^dim vertices")
        if any(p < 0 for p in self.values):
            raise ValueError("point ids must be non-negative")

    def __call__(self, v: int) -> int:
        return self.values[v]

    def vertices(self) -> tuple:
        return self.values

    def is_constant(self) -> bool:
        return len(set(self.values)) <= 1

    def restrict(self, i: int, val: int) -> "Configuration":
        """The face omega_i = val as a configuration of dimension dim-1."""
        return apply_morphism(self, face_insert_morphism(self.dim, i, val))

    def drop_top(self) -> "Corner":
        return Corner(self.dim, self.values[:-1])


@dataclass(frozen=True)
class Corner:
    """A configuration defined on all vertices except the top vertex."""

    dim: int
    values: tuple  # vertex order, 2^dim - 1 entries

    def __post_init__(self):
        if len(self.values) != (1 << self.dim) - 1:
            raise ValueError("corner must cover exactly 2^dim - 1 vertices")

    def complete_with(self, y: int) -> Configuration:
        return Configuration(self.dim, self.values + (y,))

    def restrict_lower(self, i: int) -> Configuration:
        """The full face omega_i = 0, which a valid corner must map to a cube."""
        vmap = face_insert_morphism(self.dim, i, 0).vertex_map()
        return Configuration(self.dim - 1, tuple(self.values[v] for v in vmap))


def apply_morphism(c: Configuration, phi: CubeMorphism) -> Configuration:
    """c o phi; requires phi.target_dim == c.dim."""
    if phi.target_dim != c.dim:
        raise ValueError(
            f"morphism targets dimension {phi.target_dim}, configuration has {c.dim}"
        )
    return Configuration(
        phi.source_dim, tuple(c.values[w] for w in phi.vertex_map())
    )


def concatenate(c0: Configuration, c1: Configuration, axis: int | None = None) -> Configuration:
    """[c0, c1]: new coordinate at position axis, 0-slice c0 and 1-slice c1."""
    if c0.dim != c1.dim:
        raise ValueError("concatenate needs equal dimensions")
    dim = c0.dim + 1
    if axis is None:
        axis = dim
    if not 1 <= axis <= dim:
        raise ValueError("axis out of range")
    vals = []
    for w in range(1 << dim):
        bit = (w >> (axis - 1)) & 1
        low = w & ((1 << (axis - 1)) - 1)
        v = low | ((w >> axis) << (axis - 1))
        vals.append((c1 if bit else c0).values[v])
    return Configuration(dim, tuple(vals))


def constant_pattern(dim: int, x: int) -> Configuration:
    """The constant configuration with every vertex x."""
    return Configuration(dim, ((x,) * (1 << dim)))


def corner_pattern(dim: int, x: int, y: int) -> Configuration:
    """x at every vertex except the top vertex, which is y."""
    return Configuration(dim, ((x,) * ((1 << dim) - 1)) + (y,))
