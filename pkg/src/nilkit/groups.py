"""Finite group algebra on explicit multiplication tables.

Elements are indices 0..n-1; the table is validated as a group law on
construction.  Subgroup closures, commutators, lower central series,
filtration validation, quotients and abelian invariant factors all work on
these tables.  Order is capped at 10**4.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

ORDER_CAP = 10_000


class NotAGroup(ValueError):
    def __init__(self, reason, witness=None):
        super().__init__(f"not a group: {reason} (witness {witness})")
        self.reason = reason
        self.witness = witness


class NotNilpotent(ValueError):
    pass


class NotSubgroup(ValueError):
    pass


class NotDescending(ValueError):
    pass


class BracketViolation(ValueError):
    def __init__(self, i, j, a, b):
        super().__init__(f"[G_{i}, G_{j}] not inside G_{i + j}: commutator of ({a}, {b})")
        self.witness = (i, j, a, b)


class NotNormal(ValueError):
    def __init__(self, g, n):
        super().__init__(f"subgroup not normal: conjugate of {n} by {g} escapes")
        self.witness = (g, n)


class NotAbelian(ValueError):
    def __init__(self, a, b):
        super().__init__(f"not abelian: {a} and {b} do not commute")
        self.witness = (a, b)


class FiniteGroup:
    """A verified finite group: order, multiplication table, identity, inverses."""

    def __init__(self, mult, identity, inv):
        self.mult = mult
        self.order = mult.shape[0]
        self.identity = int(identity)
        self.inv = inv

    def op(self, a, b):
        return int(self.mult[a, b])

    def inverse(self, a):
        return int(self.inv[a])

    def conjugate(self, g, x):
        """g x g^-1."""
        return int(self.mult[self.mult[g, x], self.inv[g]])

    def commutator(self, a, b):
        """a^-1 b^-1 a b."""
        m = self.mult
        return int(m[m[self.inv[a], self.inv[b]], m[a, b]])

    def element_order(self, a):
        x, k = a, 1
        while x != self.identity:
            x = self.op(x, a)
            k += 1
        return k

    def is_abelian(self):
        return bool(np.array_equal(self.mult, self.mult.T))

    def power(self, a, k):
        x = self.identity
        for _ in range(k):
            x = self.op(x, a)
        return x

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and np.array_equal(self.mult, other.mult)

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


def validate_group(table) -> FiniteGroup:
    """Verify a square table is a group law; raise NotAGroup with a witness."""
    mult = np.asarray(table, dtype=np.int64)
    if mult.ndim != 2 or mult.shape[0] != mult.shape[1]:
        raise NotAGroup("table is not square")
    n = mult.shape[0]
    if n == 0:
        raise NotAGroup("empty table")
    if n > ORDER_CAP:
        raise NotAGroup(f"order {n} exceeds cap {ORDER_CAP}")
    if mult.min() < 0 or mult.max() >= n:
        raise NotAGroup("entries outside 0..n-1")

    idx = np.arange(n)
    identity = None
    for e in range(n):
        if np.array_equal(mult[e], idx) and np.array_equal(mult[:, e], idx):
            identity = e
            break
    if identity is None:
        raise NotAGroup("missing identity")

    inv = np.full(n, -1, dtype=np.int64)
    rows, cols = np.nonzero(mult == identity)
    for a, b in zip(rows, cols):
        if mult[b, a] == identity:
            inv[a] = b
    if (inv < 0).any():
        raise NotAGroup("missing inverse", witness=int(np.nonzero(inv < 0)[0][0]))

    # associativity, chunked over the left argument
    for a in range(n):
        left = mult[mult[a], :]
        right = mult[a][mult]
        if not np.array_equal(left, right):
            b, c = np.unravel_index(int(np.argmax(left != right)), left.shape)
            raise NotAGroup("associativity fails", witness=(a, int(b), int(c)))
    return FiniteGroup(mult, identity, inv)


@dataclass(frozen=True)
class Subgroup:
    group: FiniteGroup
    elements: tuple  # sorted

    def __contains__(self, x):
        # elements are sorted; fine at desk scale
        return x in self.elements

    def __len__(self):
        return len(self.elements)

    def is_trivial(self):
        return self.elements == (self.group.identity,)

    def is_full(self):
        return len(self.elements) == self.group.order


def _closure(group: FiniteGroup, seed) -> tuple:
    elems = set(int(x) for x in seed)
    elems.add(group.identity)
    gens = np.fromiter(elems, dtype=np.int64)
    frontier = gens
    while frontier.size:
        prods = np.unique(group.mult[np.ix_(frontier, gens)])
        fresh = np.array([p for p in prods if int(p) not in elems], dtype=np.int64)
        elems.update(int(p) for p in fresh)
        frontier = fresh
    return tuple(sorted(elems))


def subgroup_closure(group: FiniteGroup, generators) -> Subgroup:
    """Smallest subgroup containing the generators (breadth-first closure)."""
    return Subgroup(group, _closure(group, generators))


def check_subgroup(group: FiniteGroup, elements) -> Subgroup:
    """Verify a set is closed under product and inverse and contains identity."""
    elems = tuple(sorted(set(int(x) for x in elements)))
    if group.identity not in elems:
        raise NotSubgroup("identity missing")
    arr = np.array(elems, dtype=np.int64)
    prods = group.mult[np.ix_(arr, arr)]
    if not np.isin(prods, arr).all():
        bad = np.argwhere(~np.isin(prods, arr))[0]
        raise NotSubgroup(f"not closed: {elems[bad[0]]} * {elems[bad[1]]}")
    if not np.isin(group.inv[arr], arr).all():
        raise NotSubgroup("not closed under inverses")
    return Subgroup(group, elems)


def commutator_subgroup(group: FiniteGroup, a_sub: Subgroup, b_sub: Subgroup) -> Subgroup:
    """Closure of {[a,b] : a in A, b in B}."""
    a = np.array(a_sub.elements, dtype=np.int64)
    b = np.array(b_sub.elements, dtype=np.int64)
    m = group.mult
    ia = group.inv[a][:, None]
    ib = group.inv[b][None, :]
    comms = m[m[ia, ib], m[a[:, None], b[None, :]]]
    return subgroup_closure(group, np.unique(comms))


def lcs_chain(group: FiniteGroup):
    """Lower central series G_1 = G, G_{i+1} = [G, G_i] until it stabilizes.

    Returns (chain, stabilized_tail); the tail is trivial iff G is nilpotent.
    """
    full = Subgroup(group, tuple(range(group.order)))
    chain = [full]
    while True:
        nxt = commutator_subgroup(group, full, chain[-1])
        if nxt.elements == chain[-1].elements:
            return chain, chain[-1]
        chain.append(nxt)


@dataclass(frozen=True)
class Filtration:
    """A verified descending chain G_0 >= G_1 >= ... >= G_{s+1} = 1 with
    [G_i, G_j] <= G_{i+j}."""

    group: FiniteGroup
    chain: tuple  # Subgroup per index 0..s+1
    degree: int
    proper: bool

    def level(self, i: int) -> Subgroup:
        """G_i with the convention G_i = 1 for i beyond the chain."""
        if i < len(self.chain):
            return self.chain[i]
        return Subgroup(self.group, (self.group.identity,))


def validate_filtration(group: FiniteGroup, chain) -> Filtration:
    """Check subgroup-hood, descent and the bracket condition, with witnesses."""
    subs = [check_subgroup(group, level) for level in chain]
    if not subs or not subs[0].is_full():
        raise NotDescending("chain must start at the full group G_0 = G")
    if not subs[-1].is_trivial():
        raise NotDescending("chain must end at the trivial group")
    for i in range(len(subs) - 1):
        if not set(subs[i + 1].elements) <= set(subs[i].elements):
            raise NotDescending(f"G_{i + 1} not contained in G_{i}")

    def level_elems(i):
        if i < len(subs):
            return subs[i].elements
        return (group.identity,)

    for i in range(len(subs)):
        for j in range(i, len(subs)):
            target = set(level_elems(i + j))
            for a in level_elems(i):
                for b in level_elems(j):
                    if group.commutator(a, b) not in target:
                        raise BracketViolation(i, j, a, b)
    degree = len(subs) - 2
    proper = subs[0].elements == subs[1].elements
    return Filtration(group, tuple(subs), degree, proper)


def lower_central_series(group: FiniteGroup) -> Filtration:
    """The filtration G_0 = G_1 = G, G_{i+1} = [G, G_i]; error if not nilpotent."""
    chain, tail = lcs_chain(group)
    if not tail.is_trivial():
        raise NotNilpotent(
            f"lower central series stabilizes at order {len(tail)} != 1"
        )
    full = chain[0]
    return validate_filtration(group, [full.elements] + [s.elements for s in chain])


def quotient_group(group: FiniteGroup, normal: Subgroup):
    """(G/N, projection array); verifies normality first."""
    nset = set(normal.elements)
    narr = np.array(normal.elements, dtype=np.int64)
    for g in range(group.order):
        conj = group.mult[group.mult[g, narr], group.inv[g]]
        if not all(int(c) in nset for c in conj):
            bad = next(int(x) for x in narr if group.conjugate(g, int(x)) not in nset)
            raise NotNormal(g, bad)

    coset_rep = np.min(group.mult[:, narr], axis=1)
    reps = np.unique(coset_rep)
    rep_index = {int(r): i for i, r in enumerate(reps)}
    proj = np.array([rep_index[int(coset_rep[x])] for x in range(group.order)])
    table = proj[group.mult[np.ix_(reps, reps)]]
    quot = validate_group(table)

    if not np.array_equal(proj[group.mult], quot.mult[proj[:, None], proj[None, :]]):
        raise AssertionError("quotient projection is not a homomorphism")
    kernel = tuple(int(x) for x in np.nonzero(proj == proj[group.identity])[0])
    if kernel != normal.elements:
        raise AssertionError("quotient kernel differs from N")
    return quot, proj


class FiniteAbelianGroup:
    """An abelian group with invariant factors n_1 | ... | n_r and an explicit
    isomorphism element <-> tuple in prod Z/n_i."""

    def __init__(self, group: FiniteGroup, factors, elem_to_tuple, tuple_to_elem):
        self.group = group
        self.factors = tuple(int(f) for f in factors)
        self.elem_to_tuple = elem_to_tuple  # (n, r) array
        self.tuple_to_elem = tuple_to_elem  # flat array indexed mixed-radix
        self.order = group.order
        self.zero = group.identity

    def add(self, a, b):
        return int(self.group.mult[a, b])

    def neg(self, a):
        return int(self.group.inv[a])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def tuple_of(self, a):
        return tuple(int(t) for t in self.elem_to_tuple[a])

    def elem_of(self, tup):
        idx = 0
        for t, f in zip(reversed(tup), reversed(self.factors)):
            idx = idx * f + (t % f)
        return int(self.tuple_to_elem[idx])

    def __repr__(self):
        return f"FiniteAbelianGroup{self.factors}"


def _p_group_basis(group: FiniteGroup, elements):
    """Basis of an abelian p-group given as a subset of `group`."""
    basis, spans = [], [group.identity]
    span_set = {group.identity}
    while len(span_set) < len(elements):
        best, best_ord = None, 0
        for x in elements:
            if x in span_set:
                continue
            k, y = 1, x
            while y not in span_set:
                y = group.op(y, x)
                k += 1
            if k > best_ord:
                best, best_ord = x, k
        # adjust so the order in the group matches the order modulo the span
        pick = None
        for s in spans:
            cand = group.op(best, s)
            if group.element_order(cand) == best_ord:
                pick = cand
                break
        if pick is None:
            raise AssertionError("p-group basis adjustment failed")
        basis.append((pick, best_ord))
        spans = sorted(
            {group.op(s, group.power(pick, k)) for s in spans for k in range(best_ord)}
        )
        span_set = set(spans)
    return basis


def abelian_invariants(group: FiniteGroup) -> FiniteAbelianGroup:
    """Invariant factors n_1 | ... | n_r plus a verified explicit isomorphism."""
    sym = np.array_equal(group.mult, group.mult.T)
    if not sym:
        a, b = np.unravel_index(int(np.argmax(group.mult != group.mult.T)), group.mult.shape)
        raise NotAbelian(int(a), int(b))

    n = group.order
    if n == 1:
        e2t = np.zeros((1, 0), dtype=np.int64)
        t2e = np.zeros(1, dtype=np.int64)
        return FiniteAbelianGroup(group, (), e2t, t2e)

    orders = [group.element_order(x) for x in range(n)]
    primes = set()
    for o in orders:
        d, q = 2, o
        while q > 1:
            if q % d == 0:
                primes.add(d)
                while q % d == 0:
                    q //= d
            d += 1

    per_prime = {}
    for p in sorted(primes):
        p_elems = [x for x in range(n) if _is_p_power(orders[x], p)]
        per_prime[p] = _p_group_basis(group, p_elems)

    rank = max(len(b) for b in per_prime.values())
    factors, gens = [], []
    for pos in range(rank):
        depth = rank - 1 - pos  # largest per-prime orders land in the last factor
        f, g = 1, group.identity
        for basis in per_prime.values():
            if depth < len(basis):
                bg, bo = basis[depth]
                f *= bo
                g = group.op(g, bg)
        factors.append(f)
        gens.append(g)

    elem_to_tuple = np.full((n, rank), -1, dtype=np.int64)
    tuple_to_elem = np.full(n, -1, dtype=np.int64)
    for tup in itertools.product(*(range(f) for f in factors)):
        x = group.identity
        for g, t in zip(gens, tup):
            x = group.op(x, group.power(g, t))
        idx = 0
        for t, f in zip(reversed(tup), reversed(factors)):
            idx = idx * f + t
        if tuple_to_elem[idx] != -1:
            raise AssertionError("invariant factor decomposition is not a bijection")
        tuple_to_elem[idx] = x
        elem_to_tuple[x] = tup
    if (tuple_to_elem < 0).any() or (elem_to_tuple < 0).any():
        raise AssertionError("invariant factor decomposition does not cover the group")

    fab = FiniteAbelianGroup(group, factors, elem_to_tuple, tuple_to_elem)
    _verify_abelian_iso(fab)
    return fab


def _is_p_power(o, p):
    while o % p == 0:
        o //= p
    return o == 1


def _verify_abelian_iso(fab: FiniteAbelianGroup):
    """phi(ab) = phi(a) + phi(b) for all pairs, exhaustively."""
    n = fab.order
    if n > 1000:
        raise AssertionError("exhaustive isomorphism check capped at order 1000")
    for a in range(n):
        ta = fab.elem_to_tuple[a]
        prods = fab.group.mult[a]
        want = (ta[None, :] + fab.elem_to_tuple) % np.array(fab.factors)
        got = fab.elem_to_tuple[prods]
        if not np.array_equal(want, got):
            raise AssertionError("explicit isomorphism is not a homomorphism")


# ---------------------------------------------------------------------------
# constructors used by the corpus, tests and the CLI import path


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return validate_group((idx[:, None] + idx[None, :]) % n)


def abelian_from_factors(factors) -> FiniteAbelianGroup:
    """Z/f1 x ... x Z/fr with its invariant-factor structure attached."""
    g = trivial_group()
    for f in factors:
        g = direct_product(g, cyclic_group(int(f)))
    return abelian_invariants(g)


def trivial_group() -> FiniteGroup:
    return cyclic_group(1)


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Element (x, y) encoded as x + a.order * y."""
    na, nb = a.order, b.order
    table = np.zeros((na * nb, na * nb), dtype=np.int64)
    for x1 in range(na):
        for y1 in range(nb):
            for x2 in range(na):
                for y2 in range(nb):
                    table[x1 + na * y1, x2 + na * y2] = int(a.mult[x1, x2]) + na * int(
                        b.mult[y1, y2]
                    )
    return validate_group(table)


def group_from_permutations(generators) -> FiniteGroup:
    """Closure of permutation tuples under composition, as a table."""
    degree = len(generators[0])
    ident = tuple(range(degree))
    gens = [tuple(g) for g in generators]
    elems = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for g in gens:
            for h in frontier:
                c = tuple(g[h[i]] for i in range(degree))
                if c not in elems:
                    elems.add(c)
                    new.append(c)
        frontier = new
    ordered = sorted(elems)
    index = {p: i for i, p in enumerate(ordered)}
    n = len(ordered)
    table = np.zeros((n, n), dtype=np.int64)
    for i, g in enumerate(ordered):
        for j, h in enumerate(ordered):
            table[i, j] = index[tuple(g[h[k]] for k in range(degree))]
    return validate_group(table)


def symmetric_group(n: int) -> FiniteGroup:
    gens = []
    for i in range(n - 1):
        p = list(range(n))
        p[i], p[i + 1] = p[i + 1], p[i]
        gens.append(tuple(p))
    return group_from_permutations(gens or [tuple(range(n))])


def alternating_group(n: int) -> FiniteGroup:
    gens = []
    for i in range(n - 2):
        p = list(range(n))
        p[i], p[i + 1], p[i + 2] = p[i + 1], p[i + 2], p[i]
        gens.append(tuple(p))
    return group_from_permutations(gens or [tuple(range(n))])


def dihedral_group(n: int) -> FiniteGroup:
    """Order 2n; element r^a f^b encoded as a + n*b, with f r f = r^-1."""
    size = 2 * n
    table = np.zeros((size, size), dtype=np.int64)
    for a1 in range(n):
        for b1 in range(2):
            for a2 in range(n):
                for b2 in range(2):
                    a = (a1 - a2) % n if b1 else (a1 + a2) % n
                    table[a1 + n * b1, a2 + n * b2] = a + n * ((b1 + b2) % 2)
    return validate_group(table)


def find_isomorphism(g: FiniteGroup, h: FiniteGroup):
    """An isomorphism g -> h as an index array, or None (backtracking search)."""
    if g.order != h.order:
        return None
    g_orders = [g.element_order(x) for x in range(g.order)]
    h_orders = [h.element_order(x) for x in range(h.order)]
    if sorted(g_orders) != sorted(h_orders):
        return None

    # small generating set of g, greedily
    gens = []
    span = {g.identity}
    for x in sorted(range(g.order), key=lambda t: -g_orders[t]):
        if x not in span:
            gens.append(x)
            span = set(subgroup_closure(g, gens).elements)
            if len(span) == g.order:
                break

    h_by_order = {}
    for y in range(h.order):
        h_by_order.setdefault(h_orders[y], []).append(y)

    def words(mapping):
        """Extend a generator assignment to the whole group, or None."""
        table = {g.identity: h.identity}
        frontier = [g.identity]
        while frontier:
            new = []
            for x in frontier:
                for ggen, hgen in mapping.items():
                    gx = g.op(x, ggen)
                    hx = h.op(table[x], hgen)
                    if gx in table:
                        if table[gx] != hx:
                            return None
                    else:
                        table[gx] = hx
                        new.append(gx)
            frontier = new
        if len(table) != g.order or len(set(table.values())) != g.order:
            return None
        return table

    def backtrack(i, mapping):
        if i == len(gens):
            table = words(mapping)
            if table is None:
                return None
            arr = np.array([table[x] for x in range(g.order)], dtype=np.int64)
            if np.array_equal(arr[g.mult], h.mult[arr[:, None], arr[None, :]]):
                return arr
            return None
        for y in h_by_order.get(g_orders[gens[i]], []):
            mapping[gens[i]] = y
            got = backtrack(i + 1, mapping)
            if got is not None:
                return got
            del mapping[gens[i]]
        return None

    return backtrack(0, {})
