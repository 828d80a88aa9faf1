"""Materialized finite groups and subgroup algebra.

Every group is stored as a faithful permutation representation: ``perms``
is an ``(order, degree)`` array whose rows are sorted by the canonical
integer encoding of the native elements (``Domain.key``).  Row ``i`` is
element ``i``; subgroups are sorted arrays of such indices inside one
ambient group.  All bulk work (normalizer scans, coset enumeration,
conjugation) is vectorized over these rows.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import factorial, gcd
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import (
    AmbientMismatch,
    BudgetExceeded,
    CapExceeded,
    ElementNotInAmbient,
    IncompatiblePayloads,
    NotNormal,
)
from .perm import Perm, perm_rank

DEFAULT_CAP = 1 << 21
DEFAULT_BUDGET = 1 << 17


def _row_dtype(degree: int):
    if degree <= 0xFF:
        return np.uint8
    if degree <= 0xFFFF:
        return np.uint16
    return np.int32


# --------------------------------------------------------------------------
# element families


class Domain:
    """Faithful permutation model for one family of group elements.

    Subclasses convert native elements to and from image rows on
    ``degree`` points and define the canonical encoding.  ``sort_columns``
    must return integer columns whose lexicographic order agrees with
    ``key``.
    """

    degree: int
    key_space: int

    def to_perm(self, x) -> Sequence[int]:
        raise NotImplementedError

    def from_perm(self, row) -> Any:
        raise NotImplementedError

    def key(self, x) -> int:
        raise NotImplementedError

    def sort_columns(self, perms: np.ndarray) -> list[np.ndarray]:
        raise NotImplementedError

    def accepts(self, x) -> bool:
        raise NotImplementedError

    def to_json(self, x) -> Any:
        raise NotImplementedError

    def from_json(self, obj) -> Any:
        raise NotImplementedError


class PermDomain(Domain):
    def __init__(self, n: int):
        self.degree = n
        self.key_space = factorial(n)

    def to_perm(self, x: Perm):
        return x.images

    def from_perm(self, row) -> Perm:
        return Perm(tuple(int(v) for v in row))

    def key(self, x: Perm) -> int:
        return perm_rank(x.images)

    def sort_columns(self, perms):
        return [perms[:, i] for i in range(self.degree)]

    def accepts(self, x) -> bool:
        return isinstance(x, Perm) and x.degree == self.degree

    def to_json(self, x: Perm):
        return list(x.images)

    def from_json(self, obj) -> Perm:
        return Perm(tuple(int(v) for v in obj))

    def __eq__(self, other):
        return isinstance(other, PermDomain) and other.degree == self.degree

    def __hash__(self):
        return hash(("perm", self.degree))


def domain_of(x) -> Domain:
    if isinstance(x, Perm):
        return PermDomain(x.degree)
    dom = getattr(x, "domain", None)
    if dom is None:
        raise IncompatiblePayloads(f"no permutation model for {type(x).__name__}")
    return dom()


@dataclass(frozen=True, slots=True)
class ProductElem:
    """Tuple of component elements, multiplied componentwise."""

    components: tuple

    def __mul__(self, other: ProductElem) -> ProductElem:
        if len(self.components) != len(other.components):
            raise IncompatiblePayloads("product elements of different length")
        return ProductElem(tuple(a * b for a, b in zip(self.components, other.components)))

    def inverse(self) -> ProductElem:
        return ProductElem(tuple(c.inverse() for c in self.components))

    def domain(self) -> ProductDomain:
        return ProductDomain(tuple(domain_of(c) for c in self.components))

    def key(self) -> int:
        return self.domain().key(self)

    def __getitem__(self, i):
        return self.components[i]

    def __len__(self):
        return len(self.components)


class ProductDomain(Domain):
    def __init__(self, components: Sequence[Domain]):
        self.components = tuple(components)
        self.offsets = np.cumsum([0] + [c.degree for c in self.components])
        self.degree = int(self.offsets[-1])
        self.key_space = 1
        for c in self.components:
            self.key_space *= c.key_space

    def to_perm(self, x: ProductElem):
        out = []
        for c, off, e in zip(self.components, self.offsets, x.components):
            out.extend(int(v) + int(off) for v in c.to_perm(e))
        return out

    def from_perm(self, row) -> ProductElem:
        row = np.asarray(row)
        parts = []
        for j, c in enumerate(self.components):
            lo, hi = self.offsets[j], self.offsets[j + 1]
            parts.append(c.from_perm(row[lo:hi] - lo))
        return ProductElem(tuple(parts))

    def key(self, x: ProductElem) -> int:
        k = 0
        for c, e in zip(self.components, x.components):
            k = k * c.key_space + c.key(e)
        return k

    def sort_columns(self, perms):
        cols = []
        for j, c in enumerate(self.components):
            lo, hi = self.offsets[j], self.offsets[j + 1]
            cols.extend(c.sort_columns(perms[:, lo:hi].astype(np.int64) - lo))
        return cols

    def accepts(self, x) -> bool:
        return (
            isinstance(x, ProductElem)
            and len(x.components) == len(self.components)
            and all(c.accepts(e) for c, e in zip(self.components, x.components))
        )

    def to_json(self, x):
        return [c.to_json(e) for c, e in zip(self.components, x.components)]

    def from_json(self, obj):
        if len(obj) != len(self.components):
            raise IncompatiblePayloads("wrong number of product components")
        return ProductElem(tuple(c.from_json(o) for c, o in zip(self.components, obj)))

    def __eq__(self, other):
        return isinstance(other, ProductDomain) and other.components == self.components

    def __hash__(self):
        return hash(("product", self.components))


# --------------------------------------------------------------------------
# groups


class Group:
    """A finite group with all elements materialized in canonical order."""

    def __init__(self, domain: Domain, perms, gens: Iterable[int] | None = None,
                 name: str | None = None, *, presorted: bool = False):
        perms = np.asarray(perms)
        if perms.ndim != 2 or perms.shape[1] != domain.degree:
            raise IncompatiblePayloads("permutation rows do not match the domain degree")
        if not presorted and len(perms) > 1:
            cols = [np.asarray(c, dtype=np.int64) for c in domain.sort_columns(perms)]
            perms = perms[np.lexsort(cols[::-1])]
        self.domain = domain
        self.perms = np.ascontiguousarray(perms, dtype=_row_dtype(domain.degree))
        self.order = len(self.perms)
        self.degree = domain.degree
        self.name = name
        self._build_lookup()
        self.identity_index = int(self.index_of(np.arange(self.degree), check=True))
        self._gens = None if gens is None else [int(g) for g in gens]
        self.ambient = self

    # lookup -----------------------------------------------------------------

    def _build_lookup(self):
        P = self.perms.astype(np.int64)
        N, d = P.shape
        radix = max(d, 2)
        key = np.zeros(N, dtype=np.int64)
        base, weights = [], []
        distinct, mult = 1, 1
        for pt in range(d):
            if distinct == N:
                break
            if mult * radix >= (1 << 62):
                base = None
                break
            cand = key + P[:, pt] * mult
            nd = len(np.unique(cand))
            if nd > distinct:
                key, distinct = cand, nd
                base.append(pt)
                weights.append(mult)
                mult *= radix
        if base is None or distinct != N:
            self._base = None
            self._table = {row.tobytes(): i for i, row in enumerate(P)}
            return
        self._base = np.array(base, dtype=np.intp)
        self._weights = np.array(weights, dtype=np.int64)
        order = np.argsort(key, kind="stable")
        self._sorted_keys = key[order]
        self._sorted_idx = order.astype(np.int64)

    def index_of(self, rows, check: bool = False):
        """Indices of elements given by permutation rows (any leading shape)."""
        rows = np.asarray(rows)
        shape = rows.shape[:-1]
        flat = rows.reshape(-1, self.degree).astype(np.int64)
        if self._base is None:
            try:
                idx = np.array([self._table[r.tobytes()] for r in flat], dtype=np.int64)
            except KeyError:
                raise ElementNotInAmbient("permutation is not an element of the group") from None
        else:
            k = flat[:, self._base] @ self._weights if len(self._base) else np.zeros(len(flat), np.int64)
            pos = np.searchsorted(self._sorted_keys, k)
            pos = np.minimum(pos, self.order - 1)
            if check and not np.array_equal(self._sorted_keys[pos], k):
                raise ElementNotInAmbient("permutation is not an element of the group")
            idx = self._sorted_idx[pos]
            if check and not np.array_equal(self.perms[idx].astype(np.int64), flat):
                raise ElementNotInAmbient("permutation is not an element of the group")
        if shape == ():
            return int(idx[0])
        return idx.reshape(shape)

    def index(self, elem) -> int:
        if not self.domain.accepts(elem):
            raise IncompatiblePayloads(f"{elem!r} does not belong to this family")
        return self.index_of(np.asarray(self.domain.to_perm(elem)), check=True)

    def __contains__(self, elem) -> bool:
        try:
            self.index(elem)
        except (ElementNotInAmbient, IncompatiblePayloads):
            return False
        return True

    # arithmetic ---------------------------------------------------------------

    def mul(self, a, b):
        """Index of a*b (left to right); broadcasts over index arrays."""
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        rows = np.take_along_axis(self.perms[b], self.perms[a], axis=-1)
        return self.index_of(rows)

    @cached_property
    def inv(self) -> np.ndarray:
        inv_rows = np.empty_like(self.perms)
        ar = np.broadcast_to(np.arange(self.degree, dtype=self.perms.dtype), self.perms.shape)
        np.put_along_axis(inv_rows, self.perms.astype(np.intp), ar, axis=1)
        return self.index_of(inv_rows)

    def conj(self, h, g):
        """Index of g^-1 h g."""
        return self.mul(self.mul(self.inv[g], h), g)

    def power(self, i: int, e: int) -> int:
        result = self.identity_index
        base = int(i)
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return int(result)

    @cached_property
    def element_orders(self) -> np.ndarray:
        P = self.perms.astype(np.intp)
        N, d = P.shape
        pts = np.arange(d)
        cyc = np.zeros((N, d), dtype=np.int64)
        Q = P.copy()
        for k in range(1, d + 1):
            hit = (Q == pts) & (cyc == 0)
            cyc[hit] = k
            if (cyc > 0).all():
                break
            Q = np.take_along_axis(P, Q, axis=1)
        cyc[cyc == 0] = 1
        return np.lcm.reduce(cyc, axis=1) if d else np.ones(N, np.int64)

    # native elements -----------------------------------------------------------

    def element(self, i: int):
        return self.domain.from_perm(self.perms[int(i)].astype(np.int64))

    @cached_property
    def elements(self) -> list:
        return [self.element(i) for i in range(self.order)]

    def key(self, i: int) -> int:
        return self.domain.key(self.element(i))

    @property
    def identity(self):
        return self.element(self.identity_index)

    # subgroup view -------------------------------------------------------------

    @cached_property
    def whole(self) -> Subgroup:
        return Subgroup(self, np.arange(self.order), self._gens)

    @property
    def indices(self) -> np.ndarray:
        return self.whole.indices

    @property
    def gens(self) -> list[int]:
        return self.whole.gens

    @property
    def generators(self) -> list:
        return [self.element(g) for g in self.gens]

    def trivial(self) -> Subgroup:
        return Subgroup(self, [self.identity_index], [])

    def subgroup(self, elems: Iterable) -> Subgroup:
        """Subgroup generated by native elements."""
        return generate(self, [self.index(e) for e in elems])

    def __len__(self):
        return self.order

    def __repr__(self):
        label = self.name or type(self).__name__
        return f"<{label} order={self.order} degree={self.degree}>"


class Subgroup:
    """A subgroup of an ambient group, stored as sorted element indices."""

    def __init__(self, ambient: Group, indices, gens: Iterable[int] | None = None):
        self.ambient = ambient
        self.indices = np.unique(np.asarray(indices, dtype=np.int64))
        self._gens = None if gens is None else [int(g) for g in gens]

    @property
    def order(self) -> int:
        return len(self.indices)

    def __len__(self):
        return self.order

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.ambient.order, dtype=bool)
        m[self.indices] = True
        return m

    @cached_property
    def key(self) -> bytes:
        return self.indices.tobytes()

    @property
    def gens(self) -> list[int]:
        if self._gens is None:
            self._gens = _greedy_gens(self.ambient, self.indices)
        return self._gens

    @property
    def generators(self) -> list:
        return [self.ambient.element(g) for g in self.gens]

    @property
    def elements(self) -> list:
        return [self.ambient.element(i) for i in self.indices]

    def contains_index(self, i) -> bool:
        return bool(self.mask[int(i)])

    def __contains__(self, elem) -> bool:
        try:
            return self.contains_index(self.ambient.index(elem))
        except (ElementNotInAmbient, IncompatiblePayloads):
            return False

    def issubset(self, other) -> bool:
        other = as_subgroup(other)
        if other.ambient is not self.ambient:
            return False
        return bool(other.mask[self.indices].all())

    def __le__(self, other):
        return self.issubset(other)

    def __eq__(self, other):
        if isinstance(other, Group):
            other = other.whole
        if not isinstance(other, Subgroup):
            return NotImplemented
        return other.ambient is self.ambient and np.array_equal(self.indices, other.indices)

    def __hash__(self):
        return hash((id(self.ambient), self.key))

    def sort_key(self):
        return (self.order, tuple(self.indices.tolist()))

    def __repr__(self):
        return f"<Subgroup order={self.order} of {self.ambient!r}>"


def as_subgroup(G) -> Subgroup:
    return G.whole if isinstance(G, Group) else G


def _same_ambient(*subs: Subgroup) -> Group:
    amb = subs[0].ambient
    for s in subs[1:]:
        if s.ambient is not amb:
            raise AmbientMismatch("subgroups live in different ambient groups")
    return amb


# --------------------------------------------------------------------------
# generation


def _close_rows(gen_rows: np.ndarray, cap: int) -> np.ndarray:
    d = gen_rows.shape[1]
    ident = np.arange(d, dtype=np.int64)
    void = np.dtype((np.void, 8 * d))
    seen = {ident.tobytes()}
    blocks = [ident[None, :]]
    frontier = ident[None, :]
    while len(frontier):
        cand = np.concatenate([g[frontier] for g in gen_rows])
        keys = np.ascontiguousarray(cand).view(void).ravel().tolist()
        fresh = []
        for i, k in enumerate(keys):
            if k not in seen:
                seen.add(k)
                fresh.append(i)
        if len(seen) > cap:
            raise CapExceeded(f"closure exceeds cap of {cap} elements")
        frontier = cand[fresh]
        blocks.append(frontier)
    return np.concatenate(blocks)


def closure(gens: Iterable, cap: int = DEFAULT_CAP, domain: Domain | None = None,
            name: str | None = None) -> Group:
    """Smallest group containing ``gens``, with canonically ordered elements."""
    gens = list(gens)
    if not gens:
        raise ValueError("closure needs at least one generator")
    if domain is None:
        domain = domain_of(gens[0])
    for g in gens:
        if not domain.accepts(g):
            raise IncompatiblePayloads(f"{g!r} is not compatible with {gens[0]!r}")
    rows = np.array([list(domain.to_perm(g)) for g in gens], dtype=np.int64)
    G = Group(domain, _close_rows(rows, cap), name=name)
    G._gens = [G.index_of(r) for r in rows]
    return G


def _extend(G: Group, elems: np.ndarray, gens: list[int], new: int, mask: np.ndarray) -> np.ndarray:
    """Elements of <elems, new>, where elems is the subgroup generated by gens.

    The result is built as a union of right cosets elems*x; ``mask`` is
    updated in place.
    """
    all_gens = list(gens) + [int(new)]
    base_rows = G.perms[elems]
    chunks = [elems]
    reps = [G.identity_index]
    i = 0
    while i < len(reps):
        r = reps[i]
        i += 1
        for s in all_gens:
            x = G.mul(r, s)
            if not mask[x]:
                coset = G.index_of(G.perms[x][base_rows])
                mask[coset] = True
                chunks.append(coset)
                reps.append(x)
    return np.sort(np.concatenate(chunks))


def generate(G, gens: Iterable[int], start: Subgroup | None = None) -> Subgroup:
    """Subgroup of the ambient of ``G`` generated by indices (and ``start``)."""
    amb = G.ambient
    if start is None:
        elems = np.array([amb.identity_index], dtype=np.int64)
        cur: list[int] = []
    else:
        elems = start.indices
        cur = list(start.gens)
    mask = np.zeros(amb.order, dtype=bool)
    mask[elems] = True
    for g in gens:
        g = int(g)
        if mask[g]:
            continue
        elems = _extend(amb, elems, cur, g, mask)
        cur.append(g)
    return Subgroup(amb, elems, cur)


def _greedy_gens(G: Group, indices: np.ndarray) -> list[int]:
    elems = np.array([G.identity_index], dtype=np.int64)
    mask = np.zeros(G.order, dtype=bool)
    mask[elems] = True
    gens: list[int] = []
    for i in indices:
        if len(elems) == len(indices):
            break
        if not mask[i]:
            elems = _extend(G, elems, gens, int(i), mask)
            gens.append(int(i))
    return gens


# --------------------------------------------------------------------------
# subgroup algebra


def conjugate_rows(G: Group, indices: np.ndarray, x: int) -> np.ndarray:
    xinv_row = G.perms[G.inv[x]]
    return G.perms[x][G.perms[indices][:, xinv_row]]


def conjugate_subgroup(H: Subgroup, g) -> Subgroup:
    """H^g = {g^-1 h g}; ``g`` may be an ambient index or a native element."""
    amb = H.ambient
    if not isinstance(g, (int, np.integer)):
        try:
            g = amb.index(g)
        except IncompatiblePayloads:
            raise ElementNotInAmbient(f"{g!r} is not in the ambient group") from None
    g = int(g)
    idx = amb.index_of(conjugate_rows(amb, H.indices, g))
    gens = None
    if H._gens:
        gen_rows = conjugate_rows(amb, np.array(H._gens, dtype=np.int64), g)
        gens = [int(v) for v in amb.index_of(gen_rows)]
    elif H._gens is not None:
        gens = []
    return Subgroup(amb, idx, gens)


def join(H1: Subgroup, H2: Subgroup) -> Subgroup:
    _same_ambient(H1, H2)
    if H2.issubset(H1):
        return H1
    if H1.issubset(H2):
        return H2
    return generate(H1.ambient, H2.gens, start=H1)


def intersection(H1: Subgroup, H2: Subgroup) -> Subgroup:
    _same_ambient(H1, H2)
    return Subgroup(H1.ambient, H1.indices[H2.mask[H1.indices]])


def normalizer(G, H: Subgroup) -> Subgroup:
    """N_G(H) by a full scan over the elements of G."""
    G = as_subgroup(G)
    amb = _same_ambient(G, H)
    cand = G.indices
    mask = H.mask
    for h in H.gens:
        if len(cand) == 0:
            break
        Pg = amb.perms[cand]
        A = amb.perms[h][amb.perms[amb.inv[cand]]]
        rows = np.take_along_axis(Pg, A, axis=1)
        cand = cand[mask[amb.index_of(rows)]]
    return Subgroup(amb, cand)


def is_normal(N: Subgroup, G) -> bool:
    G = as_subgroup(G)
    amb = _same_ambient(G, N)
    if not N.issubset(G):
        return False
    gens = np.array(G.gens, dtype=np.int64)
    if len(gens) == 0:
        return True
    for n in N.gens:
        if not N.mask[amb.conj(np.full(len(gens), n), gens)].all():
            return False
    return True


def normal_closure(X: Subgroup, G) -> Subgroup:
    """Smallest normal subgroup of G containing X."""
    G = as_subgroup(G)
    amb = _same_ambient(G, X)
    N = X
    changed = True
    while changed:
        changed = False
        for g in G.gens:
            imgs = amb.index_of(conjugate_rows(amb, np.array(N.gens, dtype=np.int64), g)) if N.gens else []
            new = [int(i) for i in np.atleast_1d(imgs) if not N.mask[int(i)]]
            if new:
                N = generate(amb, new, start=N)
                changed = True
    return N


def commutator_subgroup(X: Subgroup, Y: Subgroup) -> Subgroup:
    """[X, Y] generated by all commutators x^-1 y^-1 x y."""
    amb = _same_ambient(X, Y)
    if X.order * Y.order > 4_000_000:
        # [X, Y] is the normal closure in <X, Y> of the generator commutators
        comm = [amb.mul(amb.mul(amb.inv[x], amb.inv[y]), amb.mul(x, y)) for x in X.gens for y in Y.gens]
        start = generate(amb, comm)
        return normal_closure(start, join(X, Y))
    small, big, swap = (X, Y, False) if X.order <= Y.order else (Y, X, True)
    found = np.zeros(amb.order, dtype=bool)
    binv = amb.inv[big.indices]
    for s in small.indices:
        sinv = amb.inv[s]
        if not swap:  # s = x, big = Y
            c = amb.mul(amb.mul(sinv, binv), amb.mul(s, big.indices))
        else:  # s = y, big = X
            c = amb.mul(amb.mul(binv, sinv), amb.mul(big.indices, s))
        found[c] = True
    return generate(amb, np.flatnonzero(found))


def coset_table(G, K: Subgroup) -> tuple[list[int], np.ndarray]:
    """Right cosets K*x of K in G.

    Returns the list of minimal representatives (ascending) and an array
    over the ambient mapping each element of G to its coset number
    (-1 outside G).
    """
    G = as_subgroup(G)
    amb = _same_ambient(G, K)
    coset_of = np.full(amb.order, -1, dtype=np.int64)
    reps: list[int] = []
    krows = amb.perms[K.indices]
    for x in G.indices:
        if coset_of[x] >= 0:
            continue
        members = amb.index_of(amb.perms[x][krows])
        coset_of[members] = len(reps)
        reps.append(int(x))
    return reps, coset_of


def double_coset_reps(G, K: Subgroup) -> list[int]:
    """Minimal representatives of the double cosets K x K in G, other than K."""
    G = as_subgroup(G)
    amb = _same_ambient(G, K)
    covered = K.mask.copy()
    reps = []
    krows = amb.perms[K.indices]
    kgens = K.gens
    for x in G.indices:
        if covered[x]:
            continue
        reps.append(int(x))
        first = amb.index_of(amb.perms[x][krows])
        covered[first] = True
        stack = [first]
        while stack:
            C = stack.pop()
            for k in kgens:
                D = amb.mul(C, k)
                if not covered[D[0]]:
                    covered[D] = True
                    stack.append(D)
    return reps


def p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def _is_power_of(n: np.ndarray, p: int) -> np.ndarray:
    n = np.array(n, dtype=np.int64)
    while True:
        div = (n % p == 0) & (n > 1)
        if not div.any():
            return n == 1
        n[div] //= p


def sylow_p(G, p: int) -> Subgroup:
    """A Sylow p-subgroup, built by deterministic normalizer climbing."""
    G = as_subgroup(G)
    amb = G.ambient
    target = p_part(G.order, p)
    if target == 1:
        return amb.trivial()
    orders = amb.element_orders
    idx = G.indices
    pel = idx[(orders[idx] > 1) & _is_power_of(orders[idx], p)]
    P = generate(amb, [int(pel[0])])
    while P.order < target:
        N = normalizer(G, P)
        chosen = None
        for y in N.indices:
            if P.mask[y]:
                continue
            e = p_part(int(orders[y]), p)
            if P.mask[amb.power(int(y), e)]:
                chosen = int(y)
                break
        if chosen is None:
            raise AssertionError("normalizer climb stalled; not a group?")
        P = generate(amb, [chosen], start=P)
    return P


def p_core(G, p: int) -> Subgroup:
    """O_p(G): intersection of the conjugates of one Sylow p-subgroup."""
    G = as_subgroup(G)
    amb = G.ambient
    S = sylow_p(G, p)
    if S.order == 1:
        return S
    reps, _ = coset_table(G, normalizer(G, S))
    mask = S.mask.copy()
    for g in reps:
        conj = amb.index_of(conjugate_rows(amb, S.indices, g))
        m = np.zeros(amb.order, dtype=bool)
        m[conj] = True
        mask &= m
    core = Subgroup(amb, np.flatnonzero(mask))
    assert is_normal(core, G)
    return core


def has_odd_index(G, H: Subgroup) -> bool:
    G = as_subgroup(G)
    _same_ambient(G, H)
    if not H.issubset(G):
        raise AmbientMismatch("H is not contained in G")
    return (G.order // H.order) % 2 == 1


def overgroups_of(S: Subgroup, G, budget: int = DEFAULT_BUDGET) -> list[Subgroup]:
    """All H with S <= H <= G, by saturating joins <K, g>.

    ``<K, g>`` only depends on the double coset KgK, so each candidate is
    joined with one representative per double coset.
    """
    G = as_subgroup(G)
    amb = _same_ambient(G, S)
    if not S.issubset(G):
        raise AmbientMismatch("S is not contained in G")
    if G.order > budget:
        raise BudgetExceeded(f"group of order {G.order} exceeds enumeration budget {budget}")
    found = {S.key: S}
    queue = [S]
    while queue:
        K = queue.pop()
        for g in double_coset_reps(G, K):
            J = generate(amb, [g], start=K)
            if J.key not in found:
                found[J.key] = J
                queue.append(J)
    return sorted(found.values(), key=Subgroup.sort_key)


def all_subgroups(G, budget: int = DEFAULT_BUDGET) -> list[Subgroup]:
    G = as_subgroup(G)
    return overgroups_of(G.ambient.trivial(), G, budget)


def normal_subgroups(G, budget: int = DEFAULT_BUDGET) -> list[Subgroup]:
    G = as_subgroup(G)
    return [N for N in all_subgroups(G, budget) if is_normal(N, G)]


def in_class_Xp(G, p: int) -> bool:
    """True iff the Sylow p-subgroups of G are self-normalizing."""
    S = sylow_p(G, p)
    return normalizer(G, S).order == S.order


# --------------------------------------------------------------------------
# quotients


class CosetLabel:
    """A coset of the kernel, labelled by its minimal element."""

    __slots__ = ("quotient", "index")

    def __init__(self, quotient: QuotientGroup, index: int):
        self.quotient = quotient
        self.index = int(index)

    @property
    def rep(self):
        return self.quotient.numerator.ambient.element(self.quotient.reps[self.index])

    def __mul__(self, other: CosetLabel) -> CosetLabel:
        if other.quotient is not self.quotient:
            raise IncompatiblePayloads("cosets of different quotients")
        return CosetLabel(self.quotient, self.quotient.mul(self.index, other.index))

    def inverse(self) -> CosetLabel:
        return CosetLabel(self.quotient, self.quotient.inv[self.index])

    def domain(self):
        return self.quotient.domain

    def key(self) -> int:
        return self.quotient.domain.key(self)

    def __eq__(self, other):
        return isinstance(other, CosetLabel) and other.quotient is self.quotient and other.index == self.index

    def __hash__(self):
        return hash((id(self.quotient), self.index))

    def __repr__(self):
        return f"CosetLabel({self.rep!r})"


class QuotientDomain(Domain):
    def __init__(self, q: QuotientGroup, size: int, identity_coset: int):
        self.q = q
        self.degree = size
        self.identity_coset = identity_coset
        self.key_space = q.numerator.ambient.domain.key_space

    def to_perm(self, x: CosetLabel):
        return self.q.perms[x.index]

    def from_perm(self, row) -> CosetLabel:
        return CosetLabel(self.q, int(row[self.identity_coset]))

    def key(self, x: CosetLabel) -> int:
        amb = self.q.numerator.ambient
        return amb.domain.key(amb.element(self.q.reps[x.index]))

    def sort_columns(self, perms):
        return [perms[:, self.identity_coset]]

    def accepts(self, x) -> bool:
        return isinstance(x, CosetLabel) and x.quotient is self.q

    def to_json(self, x: CosetLabel):
        amb = self.q.numerator.ambient
        return {"coset_of": amb.domain.to_json(amb.element(self.q.reps[x.index]))}

    def from_json(self, obj):
        amb = self.q.numerator.ambient
        i = amb.index(amb.domain.from_json(obj["coset_of"]))
        return CosetLabel(self.q, int(self.q.coset_of[i]))


class QuotientGroup(Group):
    """G/N with coset labels; ``coset_of`` is the natural projection."""

    def __init__(self, numerator, kernel: Subgroup):
        numerator = as_subgroup(numerator)
        amb = _same_ambient(numerator, kernel)
        if not is_normal(kernel, numerator):
            raise NotNormal("kernel is not a normal subgroup")
        self.numerator = numerator
        self.kernel = kernel
        self.reps, self.coset_of = coset_table(numerator, kernel)
        m = len(self.reps)
        reps = np.asarray(self.reps, dtype=np.int64)
        perms = np.empty((m, m), dtype=np.int64)
        for c in range(m):
            perms[c] = self.coset_of[amb.mul(reps, reps[c])]
        ident = int(self.coset_of[amb.identity_index])
        # rows are already in label order: coset c has the c-th smallest minimum
        self.perms = perms
        dom = QuotientDomain(self, m, ident)
        super().__init__(dom, perms, presorted=True,
                         name=f"quotient {numerator.order}/{kernel.order}")
        gen_idx = [int(self.coset_of[g]) for g in numerator.gens]
        self._gens = gen_idx

    def project_index(self, idx):
        return self.coset_of[idx]

    def project(self, H: Subgroup) -> Subgroup:
        """Image HN/N of a subgroup of the numerator."""
        if H.ambient is not self.numerator.ambient or not H.issubset(self.numerator):
            raise AmbientMismatch("subgroup is not inside the numerator")
        gens = [int(self.coset_of[g]) for g in H.gens]
        return Subgroup(self, np.unique(self.coset_of[H.indices]), gens)

    def preimage(self, Q: Subgroup) -> Subgroup:
        if Q.ambient is not self:
            raise AmbientMismatch("subgroup of a different quotient")
        num = self.numerator.indices
        keep = Q.mask[self.coset_of[num]]
        return Subgroup(self.numerator.ambient, num[keep])

    def verify_projection(self) -> bool:
        amb = self.numerator.ambient
        gens = self.numerator.gens
        for a in gens:
            for b in gens:
                ab = amb.mul(a, b)
                if self.coset_of[ab] != self.mul(int(self.coset_of[a]), int(self.coset_of[b])):
                    return False
        return True


def quotient(G, N: Subgroup) -> QuotientGroup:
    return QuotientGroup(G, N)


# --------------------------------------------------------------------------
# direct products


class ProductGroup(Group):
    """Direct product of materialized groups; elements are ProductElem tuples."""

    def __init__(self, components: Sequence[Group], name: str | None = None, cap: int = DEFAULT_CAP):
        components = list(components)
        self.components = components
        self.sizes = tuple(c.order for c in components)
        total = 1
        for s in self.sizes:
            total *= s
        if total > cap:
            raise CapExceeded(f"direct product of order {total} exceeds cap {cap}")
        grid = np.indices(self.sizes).reshape(len(components), -1)
        dom = ProductDomain([c.domain for c in components])
        parts = []
        for j, c in enumerate(components):
            parts.append(c.perms[grid[j]].astype(np.int64) + int(dom.offsets[j]))
        perms = np.concatenate(parts, axis=1)
        super().__init__(dom, perms, presorted=True, name=name)
        gens = []
        for j, c in enumerate(components):
            for g in c.gens:
                coords = [comp.identity_index for comp in components]
                coords[j] = g
                gens.append(int(np.ravel_multi_index(coords, self.sizes)))
        self._gens = gens

    def element(self, i: int):
        coords = np.unravel_index(int(i), self.sizes)
        return ProductElem(tuple(c.element(k) for c, k in zip(self.components, coords)))

    def coords(self, idx) -> tuple[np.ndarray, ...]:
        return np.unravel_index(np.asarray(idx), self.sizes)

    def component_index(self, j: int, idx) -> np.ndarray:
        return self.coords(idx)[j]

    def compose_index(self, coords) -> np.ndarray:
        return np.ravel_multi_index(tuple(np.asarray(c) for c in coords), self.sizes)

    def project(self, j: int, H: Subgroup) -> Subgroup:
        """pi_j(H) as a subgroup of component j."""
        if H.ambient is not self:
            raise AmbientMismatch("subgroup of a different group")
        comp = self.components[j]
        gens = [int(self.component_index(j, g)) for g in H.gens]
        return Subgroup(comp, np.unique(self.component_index(j, H.indices)), gens)

    def embed(self, j: int, Hj) -> Subgroup:
        """The copy of a component subgroup sitting in factor j."""
        Hj = as_subgroup(Hj)
        coords = [np.full(Hj.order, c.identity_index) for c in self.components]
        coords[j] = Hj.indices
        gens = []
        for g in Hj.gens:
            cg = [c.identity_index for c in self.components]
            cg[j] = g
            gens.append(int(np.ravel_multi_index(cg, self.sizes)))
        return Subgroup(self, self.compose_index(coords), gens)

    def factor(self, j: int) -> Subgroup:
        return self.embed(j, self.components[j].whole)

    def product_of(self, subs: Sequence) -> Subgroup:
        """Subgroup H_1 x ... x H_k from component subgroups."""
        subs = [as_subgroup(s) for s in subs]
        grids = np.meshgrid(*[s.indices for s in subs], indexing="ij")
        idx = self.compose_index([g.ravel() for g in grids])
        gens = []
        for j, s in enumerate(subs):
            for g in s.gens:
                cg = [c.identity_index for c in self.components]
                cg[j] = g
                gens.append(int(np.ravel_multi_index(cg, self.sizes)))
        return Subgroup(self, idx, gens)


def direct_product(Gs: Sequence[Group], cap: int = DEFAULT_CAP, name: str | None = None) -> Group:
    Gs = list(Gs)
    if len(Gs) == 1:
        return Gs[0]
    return ProductGroup(Gs, name=name, cap=cap)


@lru_cache(maxsize=None)
def symmetric_group(n: int) -> Group:
    if n == 1:
        return closure([Perm.identity(1)], name="Sym1")
    gens = [Perm.from_cycles(n, (0, 1))]
    if n > 2:
        gens.append(Perm.from_cycles(n, tuple(range(n))))
    return closure(gens, name=f"Sym{n}")


@lru_cache(maxsize=None)
def alternating_group(n: int) -> Group:
    if n < 3:
        return closure([Perm.identity(n)], name=f"Alt{n}")
    gens = [Perm.from_cycles(n, (0, 1, k)) for k in range(2, n)]
    return closure(gens, name=f"Alt{n}")


def gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g
