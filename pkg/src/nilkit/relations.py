"""Equivalence relations on 0..n-1 as partitions, with generation from pairs."""

from __future__ import annotations

import numpy as np


class NotEquivalence(ValueError):
    def __init__(self, witness, detail=""):
        super().__init__(f"relation is not an equivalence: {detail} (witness {witness})")
        self.witness = witness


class EquivRelation:
    """A partition of 0..n-1 into classes, canonically sorted."""

    def __init__(self, size, classes):
        self.size = size
        self.classes = tuple(sorted(tuple(sorted(int(x) for x in c)) for c in classes))
        self.class_of = np.full(size, -1, dtype=np.int64)
        for i, cls in enumerate(self.classes):
            for x in cls:
                if self.class_of[x] != -1:
                    raise ValueError(f"point {x} in two classes")
                self.class_of[x] = i
        if (self.class_of < 0).any():
            raise ValueError("classes do not cover the ground set")

    @classmethod
    def discrete(cls, size):
        return cls(size, [[x] for x in range(size)])

    @classmethod
    def full(cls, size):
        return cls(size, [list(range(size))])

    @classmethod
    def from_pairs(cls, size, pairs):
        """Equivalence generated by the pairs (union-find closure)."""
        parent = list(range(size))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in pairs:
            ra, rb = find(int(a)), find(int(b))
            if ra != rb:
                parent[ra] = rb
        groups = {}
        for x in range(size):
            groups.setdefault(find(x), []).append(x)
        return cls(size, groups.values())

    @classmethod
    def from_matrix(cls, rel):
        """From a boolean relation matrix; raises NotEquivalence with witness."""
        rel = np.asarray(rel, dtype=bool)
        n = rel.shape[0]
        w = check_equivalence_matrix(rel)
        if w is not None:
            raise NotEquivalence(w[1], w[0])
        groups = {}
        for x in range(n):
            key = int(np.nonzero(rel[x])[0][0])
            groups.setdefault(key, []).append(x)
        return cls(n, groups.values())

    def related(self, a, b):
        return self.class_of[a] == self.class_of[b]

    def matrix(self):
        return self.class_of[:, None] == self.class_of[None, :]

    def is_discrete(self):
        return len(self.classes) == self.size

    def is_full(self):
        return len(self.classes) == 1

    def refines(self, other: "EquivRelation"):
        """Every class of self lies inside one class of other."""
        return all(
            len({int(other.class_of[x]) for x in cls}) == 1 for cls in self.classes
        )

    def __eq__(self, other):
        return isinstance(other, EquivRelation) and self.classes == other.classes

    def __hash__(self):
        return hash(self.classes)

    def __repr__(self):
        return f"EquivRelation(n={self.size}, classes={len(self.classes)})"


def check_equivalence_matrix(rel):
    """None if the boolean matrix is an equivalence; else (reason, witness)."""
    rel = np.asarray(rel, dtype=bool)
    n = rel.shape[0]
    if not rel.diagonal().all():
        return ("not reflexive", (int(np.argmin(rel.diagonal())),))
    if not np.array_equal(rel, rel.T):
        a, b = np.unravel_index(int(np.argmax(rel != rel.T)), rel.shape)
        return ("not symmetric", (int(a), int(b)))
    closure = (rel.astype(np.int64) @ rel.astype(np.int64)) > 0
    if not np.array_equal(closure & ~rel, np.zeros_like(rel)):
        a, c = np.unravel_index(int(np.argmax(closure & ~rel)), rel.shape)
        b = int(np.nonzero(rel[a] & rel[:, c])[0][0])
        return ("not transitive", (int(a), b, int(c)))
    return None


def pairs_already_transitive(size, pairs):
    """Whether a reflexive-symmetric pair set is already transitive.

    Returns (flag, witness_triple_or_none); used to report when a generated
    relation needed closure.
    """
    rel = np.zeros((size, size), dtype=bool)
    rel[np.arange(size), np.arange(size)] = True
    for a, b in pairs:
        rel[int(a), int(b)] = True
        rel[int(b), int(a)] = True
    w = check_equivalence_matrix(rel)
    if w is None:
        return True, None
    return False, w[1]
