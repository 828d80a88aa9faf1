"""Permutations of {0, ..., n-1} in one-line notation.

Products are read left to right: ``(a * b)(x) == b(a(x))``.  The same
convention is used by every group in the package, including the JSON
serialization, where a permutation is the list of its images.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from .errors import AmbientMismatch, DegreeMismatch, NotTransitive, StructureCheckFailed


@dataclass(frozen=True, slots=True)
class Perm:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation: {self.images}")

    @classmethod
    def identity(cls, n: int) -> Perm:
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> Perm:
        img = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a] = b
        return cls(tuple(img))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: Perm) -> Perm:
        return compose(self, other)

    def inverse(self) -> Perm:
        return invert(self)

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def moved_points(self) -> list[int]:
        return [i for i, x in enumerate(self.images) if i != x]

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for i in range(self.degree):
            if i in seen or self.images[i] == i:
                continue
            cyc = [i]
            seen.add(i)
            j = self.images[i]
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def key(self) -> int:
        """Lexicographic rank of the image list among all n! permutations."""
        return perm_rank(self.images)

    @staticmethod
    def key_space(n: int) -> int:
        return factorial(n)

    def __repr__(self):
        cyc = self.cycles()
        if not cyc:
            return f"Perm(id, n={self.degree})"
        return "Perm(" + "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) + f", n={self.degree})"


def perm_rank(images: Sequence[int]) -> int:
    n = len(images)
    rank = 0
    for i in range(n):
        smaller = sum(1 for j in range(i + 1, n) if images[j] < images[i])
        rank += smaller * factorial(n - 1 - i)
    return rank


def perm_unrank(rank: int, n: int) -> Perm:
    pool = list(range(n))
    out = []
    for i in range(n):
        f = factorial(n - 1 - i)
        q, rank = divmod(rank, f)
        out.append(pool.pop(q))
    return Perm(tuple(out))


def compose(a: Perm, b: Perm) -> Perm:
    if a.degree != b.degree:
        raise DegreeMismatch(f"degrees {a.degree} and {b.degree}")
    bi = b.images
    return Perm(tuple(bi[x] for x in a.images))


def invert(a: Perm) -> Perm:
    out = [0] * a.degree
    for i, x in enumerate(a.images):
        out[x] = i
    return Perm(tuple(out))


def _degree_of(perms: Iterable[Perm], n: int | None) -> tuple[list[Perm], int]:
    perms = list(perms)
    degrees = {p.degree for p in perms}
    if n is not None:
        degrees.add(n)
    if len(degrees) > 1:
        raise DegreeMismatch(f"mixed degrees {sorted(degrees)}")
    if not degrees:
        raise ValueError("degree unknown for an empty generating set")
    return perms, degrees.pop()


def orbit(perms: Iterable[Perm], point: int, n: int | None = None) -> set[int]:
    perms, n = _degree_of(perms, n)
    seen = {point}
    stack = [point]
    while stack:
        x = stack.pop()
        for p in perms:
            y = p.images[x]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def orbits(perms: Iterable[Perm], n: int | None = None) -> list[set[int]]:
    perms, n = _degree_of(perms, n)
    out = []
    covered: set[int] = set()
    for x in range(n):
        if x not in covered:
            o = orbit(perms, x, n)
            covered |= o
            out.append(o)
    return out


def is_transitive(H: Iterable[Perm], n: int | None = None) -> bool:
    H, n = _degree_of(H, n)
    return len(orbit(H, 0, n)) == n


def _minimal_block(perms: list[Perm], n: int, x: int) -> list[int]:
    """Smallest block of imprimitivity containing 0 and x (union-find closure)."""
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    pending = [(0, x)]
    parent[find(x)] = find(0)
    while pending:
        a, b = pending.pop()
        for p in perms:
            ra, rb = find(p.images[a]), find(p.images[b])
            if ra != rb:
                parent[rb] = ra
                pending.append((p.images[a], p.images[b]))
    root = find(0)
    return [i for i in range(n) if find(i) == root]


def is_primitive(H: Iterable[Perm], n: int | None = None) -> bool:
    H, n = _degree_of(H, n)
    if not is_transitive(H, n):
        raise NotTransitive("primitivity needs a transitive group")
    for x in range(1, n):
        if len(_minimal_block(H, n, x)) < n:
            return False
    return True


def block_system(H: Iterable[Perm], n: int | None = None) -> list[int] | None:
    """A nontrivial block containing 0, or None for a primitive group."""
    H, n = _degree_of(H, n)
    if not is_transitive(H, n):
        raise NotTransitive("blocks are only defined for transitive groups")
    for x in range(1, n):
        blk = _minimal_block(H, n, x)
        if len(blk) < n:
            return blk
    return None


def contains_transposition(H: Iterable[Perm], n: int | None = None) -> bool:
    from .group import closure

    H, n = _degree_of(H, n)
    if not H:
        return False
    G = closure(H)
    moved = (G.perms != np.arange(n)).sum(axis=1)
    return bool((moved == 2).any())


def fixed_points(H: Iterable[Perm], n: int | None = None) -> set[int]:
    H, n = _degree_of(H, n)
    return {x for x in range(n) if all(p.images[x] == x for p in H)}


class CosetAction:
    """Right-multiplication action of G on the right cosets of K.

    ``images[i, c]`` is the coset ``K x_c g`` where ``g`` is the ambient
    element with index ``G.indices[i]`` and ``x_c`` the c-th coset
    representative (representatives are minimal in canonical order).
    """

    def __init__(self, G, K):
        from .group import as_subgroup, coset_table

        G = as_subgroup(G)
        if K.ambient is not G.ambient or not K.issubset(G):
            raise AmbientMismatch("K must be a subgroup of G")
        self.G = G
        self.K = K
        amb = G.ambient
        self.reps, self.coset_of = coset_table(G, K)
        self.degree = len(self.reps)
        reps = np.asarray(self.reps)
        imgs = np.empty((G.order, self.degree), dtype=np.int64)
        for c, r in enumerate(reps):
            prods = amb.mul(np.full(G.order, r), G.indices)
            imgs[:, c] = self.coset_of[prods]
        self.images = imgs
        self._pos = {int(g): i for i, g in enumerate(G.indices)}

    def perm_of_index(self, g: int) -> Perm:
        return Perm(tuple(int(x) for x in self.images[self._pos[int(g)]]))

    def __call__(self, elem) -> Perm:
        return self.perm_of_index(self.G.ambient.index(elem))

    def image_rows(self, indices) -> np.ndarray:
        return self.images[[self._pos[int(g)] for g in indices]]


def coset_action(G, K) -> CosetAction:
    act = CosetAction(G, K)
    amb = act.G.ambient
    for a in act.G.gens:
        for b in act.G.gens:
            ab = int(amb.mul(a, b))
            pa, pb, pab = act.perm_of_index(a), act.perm_of_index(b), act.perm_of_index(ab)
            if pa * pb != pab:
                raise StructureCheckFailed("coset action is not a homomorphism")
    return act
