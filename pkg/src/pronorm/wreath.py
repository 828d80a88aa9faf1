"""Wreath products Z_p wr Sym_n, generic L wr Sym_n, and their direct products.

Multiplication is (v, s)(w, t) = (v + s.w, st) with (s.w)_i = w_{s(i)},
which is the associative rule for left-to-right permutation products.
An element (v, s) acts faithfully on the points i*p + a by
(i, a) -> (s(i), a + v_i).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import Sequence

import numpy as np
from sympy import isprime

from .errors import BadFactorIndex, CapExceeded, IncompatiblePayloads, ShapeMismatch
from .group import (
    DEFAULT_BUDGET,
    DEFAULT_CAP,
    Domain,
    Group,
    ProductGroup,
    Subgroup,
    all_subgroups,
    as_subgroup,
    domain_of,
    generate,
    symmetric_group,
)
from .perm import Perm, perm_rank


@dataclass(frozen=True, slots=True)
class WreathElem:
    v: tuple[int, ...]
    s: Perm
    p: int

    def __post_init__(self):
        if len(self.v) != self.s.degree:
            raise ShapeMismatch(f"vector length {len(self.v)} but top degree {self.s.degree}")
        if any(not 0 <= x < self.p for x in self.v):
            raise ShapeMismatch(f"residues {self.v} not in [0, {self.p})")

    @classmethod
    def identity(cls, p: int, n: int) -> WreathElem:
        return cls((0,) * n, Perm.identity(n), p)

    @property
    def n(self) -> int:
        return len(self.v)

    def __mul__(self, other: WreathElem) -> WreathElem:
        return w_mul(self, other, self.p)

    def inverse(self) -> WreathElem:
        sinv = self.s.inverse()
        return WreathElem(tuple((-self.v[sinv(j)]) % self.p for j in range(self.n)), sinv, self.p)

    def domain(self) -> WreathDomain:
        return WreathDomain(self.p, self.n)

    def key(self) -> int:
        return self.domain().key(self)

    def __repr__(self):
        return f"WreathElem(v={list(self.v)}, s={list(self.s.images)}, p={self.p})"


def w_mul(a: WreathElem, b: WreathElem, p: int | None = None) -> WreathElem:
    p = a.p if p is None else p
    if a.p != p or b.p != p or a.n != b.n:
        raise ShapeMismatch("wreath elements of different shape")
    v = tuple((a.v[i] + b.v[a.s(i)]) % p for i in range(a.n))
    return WreathElem(v, a.s * b.s, p)


class WreathDomain(Domain):
    def __init__(self, p: int, n: int):
        self.p, self.n = p, n
        self.degree = p * n
        self.key_space = p**n * factorial(n)

    def to_perm(self, x: WreathElem):
        p = self.p
        return [x.s(i) * p + (a + x.v[i]) % p for i in range(self.n) for a in range(p)]

    def from_perm(self, row) -> WreathElem:
        p = self.p
        heads = [int(row[i * p]) for i in range(self.n)]
        return WreathElem(tuple(h % p for h in heads), Perm(tuple(h // p for h in heads)), p)

    def key(self, x: WreathElem) -> int:
        code = 0
        for r in x.v:
            code = code * self.p + r
        return code * factorial(self.n) + perm_rank(x.s.images)

    def sort_columns(self, perms):
        heads = np.asarray(perms, dtype=np.int64)[:, :: self.p]
        return [heads[:, i] % self.p for i in range(self.n)] + [heads[:, i] // self.p for i in range(self.n)]

    def accepts(self, x) -> bool:
        return isinstance(x, WreathElem) and x.p == self.p and x.n == self.n

    def to_json(self, x: WreathElem):
        return {"v": list(x.v), "s": list(x.s.images)}

    def from_json(self, obj) -> WreathElem:
        try:
            return WreathElem(tuple(int(r) for r in obj["v"]), Perm(tuple(int(i) for i in obj["s"])), self.p)
        except (KeyError, TypeError, ValueError) as exc:
            raise IncompatiblePayloads(f"bad wreath element {obj!r}: {exc}") from None

    def __eq__(self, other):
        return isinstance(other, WreathDomain) and (other.p, other.n) == (self.p, self.n)

    def __hash__(self):
        return hash(("wreath", self.p, self.n))


def _check_factor(p: int, n: int):
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError(f"degree {n} must be positive")


class WreathProduct(Group):
    """Z_p wr Sym_n; element index = (vector code) * n! + (rank of s)."""

    def __init__(self, p: int, n: int, cap: int = DEFAULT_CAP):
        _check_factor(p, n)
        self.p, self.n = p, n
        self.top = symmetric_group(n)
        self.nfact = factorial(n)
        order = p**n * self.nfact
        if order > cap:
            raise CapExceeded(f"Z_{p} wr Sym_{n} has order {order} > cap {cap}")
        vecs = np.indices((p,) * n).reshape(n, -1).T if n else np.zeros((1, 0), np.int64)
        S = self.top.perms.astype(np.int64)
        a = np.arange(p)
        # rows[v, s, i, a] = s(i) * p + (a + v_i) % p
        rows = S[None, :, :, None] * p + (a[None, None, None, :] + vecs[:, None, :, None]) % p
        perms = rows.reshape(order, n * p)
        super().__init__(WreathDomain(p, n), perms, presorted=True, name=f"Z{p} wr Sym{n}")
        gens = [self.pair_index(0, g) for g in self.top.gens]
        gens.append(self.pair_index(self.vec_code([1] + [0] * (n - 1)), self.top.identity_index))
        self._gens = [g for g in gens if g != self.identity_index]

    # index arithmetic --------------------------------------------------------

    def vec_code(self, v: Sequence[int]) -> int:
        code = 0
        for r in v:
            code = code * self.p + int(r) % self.p
        return code

    def pair_index(self, vcode: int, sidx: int) -> int:
        return int(vcode) * self.nfact + int(sidx)

    def bar_index(self, idx):
        return np.asarray(idx) % self.nfact

    def base_code(self, idx):
        return np.asarray(idx) // self.nfact

    def element(self, i: int) -> WreathElem:
        code, sidx = divmod(int(i), self.nfact)
        v = np.unravel_index(code, (self.p,) * self.n) if self.n else ()
        return WreathElem(tuple(int(x) for x in v), self.top.element(sidx), self.p)

    def vector(self, v: Sequence[int]) -> int:
        return self.pair_index(self.vec_code(v), self.top.identity_index)

    # distinguished subgroups -------------------------------------------------

    @cached_property
    def V(self) -> Subgroup:
        gens = [self.vector([1 if j == i else 0 for j in range(self.n)]) for i in range(self.n)]
        return Subgroup(self, np.arange(self.p**self.n) * self.nfact, gens)

    @cached_property
    def B(self) -> Subgroup:
        return Subgroup(self, np.arange(self.nfact), [self.pair_index(0, g) for g in self.top.gens])

    @cached_property
    def v_plus(self) -> Subgroup:
        return Subgroup(self, [self.vector([c] * self.n) for c in range(self.p)], [self.vector([1] * self.n)])

    def w(self, i: int, j: int, a: int = 1) -> int:
        """Index of the vector with a at slot i and -a at slot j."""
        v = [0] * self.n
        v[i] = a % self.p
        v[j] = (-a) % self.p
        return self.vector(v)

    @cached_property
    def v_minus_gens(self) -> list[int]:
        return [self.w(0, j) for j in range(1, self.n)]

    @cached_property
    def v_minus(self) -> Subgroup:
        vecs = np.indices((self.p,) * self.n).reshape(self.n, -1).T
        keep = np.flatnonzero(vecs.sum(axis=1) % self.p == 0)
        return Subgroup(self, keep * self.nfact, self.v_minus_gens)

    def bar(self, H: Subgroup) -> Subgroup:
        """Image of H in Sym_n under (v, s) -> s."""
        return Subgroup(self.top, np.unique(self.bar_index(H.indices)), [int(self.bar_index(g)) for g in H.gens])

    def lift(self, sidx, vcode=0):
        """Index of (v, s); accepts scalars or arrays of top indices."""
        if np.ndim(sidx) == 0 and np.ndim(vcode) == 0:
            return self.pair_index(vcode, sidx)
        return np.asarray(vcode, dtype=np.int64) * self.nfact + np.asarray(sidx, dtype=np.int64)


def wreath_product(p: int, n: int, cap: int = DEFAULT_CAP) -> WreathProduct:
    return WreathProduct(p, n, cap)


class WreathGroup(ProductGroup):
    """Direct product of wreath factors G_i = Z_{p_i} wr Sym_{n_i}."""

    def __init__(self, factors: Sequence[tuple[int, int]], cap: int = DEFAULT_CAP):
        factors = [(int(p), int(n)) for p, n in factors]
        if not factors:
            raise ValueError("at least one wreath factor is required")
        for p, n in factors:
            _check_factor(p, n)
        self.spec = factors
        comps = [WreathProduct(p, n, cap) for p, n in factors]
        label = " x ".join(f"Z{p} wr Sym{n}" for p, n in factors)
        super().__init__(comps, name=label, cap=cap)

    @property
    def k(self) -> int:
        return len(self.spec)

    def _factor(self, i: int) -> WreathProduct:
        if not 0 <= i < self.k:
            raise BadFactorIndex(f"factor {i} out of range 0..{self.k - 1}")
        return self.components[i]

    def G_i(self, i: int) -> WreathProduct:
        return self._factor(i)

    def pi(self, i: int, H: Subgroup) -> Subgroup:
        self._factor(i)
        return self.project(i, H)

    @cached_property
    def V(self) -> Subgroup:
        return self.product_of([c.V for c in self.components])

    @cached_property
    def B(self) -> Subgroup:
        return self.product_of([c.B for c in self.components])

    def V_i(self, i: int) -> Subgroup:
        return self.embed(i, self._factor(i).V)

    def v_plus(self, i: int) -> Subgroup:
        return self.embed(i, self._factor(i).v_plus)

    def v_minus(self, i: int) -> Subgroup:
        return self.embed(i, self._factor(i).v_minus)

    @cached_property
    def top(self) -> ProductGroup:
        return ProductGroup([c.top for c in self.components], name="B")

    def bar_index(self, idx):
        coords = self.coords(idx)
        return self.top.compose_index([c.bar_index(x) for c, x in zip(self.components, coords)])

    def bar(self, H: Subgroup) -> Subgroup:
        """Image of H in B = prod Sym_{n_i}."""
        gens = [int(self.bar_index(g)) for g in H.gens]
        return Subgroup(self.top, np.unique(self.bar_index(H.indices)), gens)

    def sigma(self, i: int, idx) -> np.ndarray:
        """Projection of elements of V onto V_i (as indices of G)."""
        self._factor(i)
        coords = list(self.coords(idx))
        for j, c in enumerate(self.components):
            if j != i:
                coords[j] = np.full_like(coords[j], c.identity_index)
        return self.compose_index(coords)


def build_product(spec: Sequence[tuple[int, int]], cap: int = DEFAULT_CAP) -> WreathGroup:
    return WreathGroup(spec, cap)


def bar(g):
    """Top permutation(s) of a wreath element or tuple of them."""
    from .group import ProductElem

    if isinstance(g, WreathElem):
        return g.s
    if isinstance(g, ProductElem):
        return tuple(c.s for c in g.components)
    raise IncompatiblePayloads(f"no top component for {g!r}")


def v_plus(p: int, n: int) -> Subgroup:
    return wreath_product(p, n).v_plus


def v_minus(p: int, n: int) -> Subgroup:
    return wreath_product(p, n).v_minus


def v_minus_contained(H: Subgroup, factor: int = 0) -> bool:
    """True iff V_i^- (embedded in factor i) lies inside H."""
    G = H.ambient
    if isinstance(G, WreathProduct):
        if factor != 0:
            raise BadFactorIndex(f"factor {factor} of a single wreath product")
        gens = G.v_minus_gens
    elif isinstance(G, WreathGroup):
        W = G._factor(factor)
        gens = [int(i) for i in G.embed(factor, Subgroup(W, [W.identity_index] + W.v_minus_gens, W.v_minus_gens)).gens]
    else:
        raise BadFactorIndex("H does not live in a wreath product")
    return all(H.contains_index(g) for g in gens)


# --------------------------------------------------------------------------
# generic L wr Sym_n


@dataclass(frozen=True, slots=True)
class GenericWreathElem:
    base: tuple
    s: Perm

    def __mul__(self, other: GenericWreathElem) -> GenericWreathElem:
        if len(self.base) != len(other.base):
            raise ShapeMismatch("generic wreath elements of different degree")
        return GenericWreathElem(tuple(self.base[i] * other.base[self.s(i)] for i in range(len(self.base))),
                                 self.s * other.s)

    def inverse(self) -> GenericWreathElem:
        sinv = self.s.inverse()
        return GenericWreathElem(tuple(self.base[sinv(j)].inverse() for j in range(len(self.base))), sinv)

    def domain(self) -> GenericWreathDomain:
        return GenericWreathDomain(domain_of(self.base[0]), len(self.base))

    def key(self) -> int:
        return self.domain().key(self)


class GenericWreathDomain(Domain):
    """Point (i, x) of n copies of the base domain; (l, s) sends it to (s(i), l_i(x))."""

    def __init__(self, base: Domain, n: int):
        self.base, self.n = base, n
        self.d = base.degree
        self.degree = self.d * n
        self.key_space = base.key_space**n * factorial(n)

    def to_perm(self, x: GenericWreathElem):
        d = self.d
        out = []
        for i, l in enumerate(x.base):
            out.extend(x.s(i) * d + int(y) for y in self.base.to_perm(l))
        return out

    def from_perm(self, row) -> GenericWreathElem:
        row = np.asarray(row, dtype=np.int64)
        d = self.d
        base = tuple(self.base.from_perm(row[i * d:(i + 1) * d] % d) for i in range(self.n))
        return GenericWreathElem(base, Perm(tuple(int(row[i * d]) // d for i in range(self.n))))

    def key(self, x: GenericWreathElem) -> int:
        code = 0
        for l in x.base:
            code = code * self.base.key_space + self.base.key(l)
        return code * factorial(self.n) + perm_rank(x.s.images)

    def sort_columns(self, perms):
        P = np.asarray(perms, dtype=np.int64)
        d = self.d
        cols = []
        for i in range(self.n):
            cols.extend(self.base.sort_columns(P[:, i * d:(i + 1) * d] % d))
        cols.extend(P[:, i * d] // d for i in range(self.n))
        return cols

    def accepts(self, x) -> bool:
        return (isinstance(x, GenericWreathElem) and len(x.base) == self.n
                and all(self.base.accepts(l) for l in x.base))

    def to_json(self, x: GenericWreathElem):
        return {"base": [self.base.to_json(l) for l in x.base], "s": list(x.s.images)}

    def from_json(self, obj):
        try:
            return GenericWreathElem(tuple(self.base.from_json(o) for o in obj["base"]),
                                     Perm(tuple(int(i) for i in obj["s"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise IncompatiblePayloads(f"bad wreath element {obj!r}: {exc}") from None

    def __eq__(self, other):
        return isinstance(other, GenericWreathDomain) and (other.base, other.n) == (self.base, self.n)

    def __hash__(self):
        return hash(("gwreath", self.base, self.n))


class GenericWreath(Group):
    """L wr Sym_n; index = ravel(base indices, rank of s)."""

    def __init__(self, L: Group, n: int, cap: int = DEFAULT_CAP):
        if n < 1:
            raise ValueError("degree must be positive")
        self.L, self.n = L, n
        self.top = symmetric_group(n)
        self.nfact = factorial(n)
        self.shape = (L.order,) * n + (self.nfact,)
        order = L.order**n * self.nfact
        if order > cap:
            raise CapExceeded(f"wreath product of order {order} exceeds cap {cap}")
        d = L.degree
        grid = np.indices(self.shape).reshape(n + 1, -1)
        S = self.top.perms.astype(np.int64)[grid[n]]
        LP = L.perms.astype(np.int64)
        perms = np.empty((order, n * d), dtype=np.int64)
        for i in range(n):
            perms[:, i * d:(i + 1) * d] = S[:, i:i + 1] * d + LP[grid[i]]
        super().__init__(GenericWreathDomain(L.domain, n), perms, presorted=True,
                         name=f"({L.name or 'L'}) wr Sym{n}")
        e = L.identity_index
        gens = [self.compose((e,) * n, g) for g in self.top.gens]
        for g in L.gens:
            gens.append(self.compose((g,) + (e,) * (n - 1), self.top.identity_index))
        self._gens = [g for g in gens if g != self.identity_index]

    def compose(self, base_idx: Sequence[int], sidx: int) -> int:
        return int(np.ravel_multi_index(tuple(base_idx) + (sidx,), self.shape))

    def coords(self, idx):
        return np.unravel_index(np.asarray(idx), self.shape)

    def element(self, i: int) -> GenericWreathElem:
        c = self.coords(int(i))
        return GenericWreathElem(tuple(self.L.element(int(x)) for x in c[:-1]), self.top.element(int(c[-1])))

    def bar_index(self, idx):
        return self.coords(idx)[-1]

    @cached_property
    def K(self) -> Subgroup:
        """Base subgroup L^n."""
        base = np.arange(self.L.order**self.n) * self.nfact + self.top.identity_index
        return Subgroup(self, base)

    def K_i(self, i: int, sub=None) -> Subgroup:
        """Copy of ``sub`` (default: all of L) in coordinate i of the base."""
        sub = self.L.whole if sub is None else as_subgroup(sub)
        coords = [np.full(sub.order, self.L.identity_index) for _ in range(self.n)]
        coords[i] = sub.indices
        coords.append(np.full(sub.order, self.top.identity_index))
        return Subgroup(self, np.ravel_multi_index(tuple(coords), self.shape))

    def base_product(self, subs: Sequence) -> Subgroup:
        """prod_i sub_i inside the base."""
        subs = [as_subgroup(s) for s in subs]
        grids = np.meshgrid(*[s.indices for s in subs], indexing="ij")
        coords = [g.ravel() for g in grids]
        coords.append(np.full(len(coords[0]), self.top.identity_index))
        return Subgroup(self, np.ravel_multi_index(tuple(coords), self.shape))

    @cached_property
    def B(self) -> Subgroup:
        e = self.L.identity_index
        return Subgroup(self, [self.compose((e,) * self.n, s) for s in range(self.nfact)])


def generic_wreath(base: Group, n: int, cap: int = DEFAULT_CAP) -> GenericWreath:
    return GenericWreath(base, n, cap)


# --------------------------------------------------------------------------
# subgroups with full top image


def invariant_subgroups_of_V(W: WreathProduct, acting: Subgroup, budget: int = DEFAULT_BUDGET) -> list[Subgroup]:
    """Subgroups of V normalized by ``acting``, by filtering every subgroup of V."""
    V = W.V
    out = []
    for U in all_subgroups(V, budget):
        if all(U.mask[W.conj(u, g)] for g in acting.gens for u in U.gens):
            out.append(U)
    return out


def full_top_subgroups(W: WreathProduct, budget: int = DEFAULT_BUDGET) -> list[Subgroup]:
    """Every H <= Z_p wr Sym_n whose image in Sym_n is all of Sym_n.

    With U = H meet V (necessarily Sym_n-invariant), H is the union of the
    cosets l(w)U where l lifts Sym_n through fixed lifts of its generators.
    A tuple of lifts (taken modulo U) yields such an H exactly when
    l(w) l(g) = l(wg) modulo U on every edge of the Cayley graph; all
    tuples are tested at once.
    """
    n, p = W.n, W.p
    S = W.top
    e = S.identity_index
    top_gens = [g for g in S.gens if g != e]
    k = len(top_gens)
    # spanning tree of the Cayley graph of Sym_n
    tree: list[tuple[int, int, int]] = []
    seen = {e}
    queue = [e]
    for w in queue:
        for j, g in enumerate(top_gens):
            x = int(S.mul(w, g))
            if x not in seen:
                seen.add(x)
                queue.append(x)
                tree.append((x, w, j))
    found: dict[bytes, Subgroup] = {}
    nvec = p**n
    for U in invariant_subgroups_of_V(W, W.B, budget):
        coset_id = np.full(nvec, -1, dtype=np.int64)
        reps: list[int] = []
        for code in range(nvec):
            if coset_id[code] < 0:
                coset_id[W.base_code(W.mul(U.indices, W.pair_index(code, e)))] = len(reps)
                reps.append(code)
        reps_arr = np.asarray(reps, dtype=np.int64)
        combos = np.indices((len(reps),) * k).reshape(k, -1) if k else np.zeros((0, 1), np.int64)
        lifts = [reps_arr[combos[j]] * W.nfact + top_gens[j] for j in range(k)]
        ell = {e: np.full(combos.shape[1], W.identity_index, dtype=np.int64)}
        for x, w, j in tree:
            ell[x] = W.mul(ell[w], lifts[j])
        ok = np.ones(combos.shape[1], dtype=bool)
        for w in queue:
            for j, g in enumerate(top_gens):
                target = ell[int(S.mul(w, g))]
                ok &= U.mask[W.mul(W.mul(ell[w], lifts[j]), W.inv[target])]
        table = np.stack([ell[w] for w in queue])
        for c in np.flatnonzero(ok):
            elems = W.mul(U.indices[:, None], table[:, c][None, :]).ravel()
            H = Subgroup(W, elems, list(U.gens) + [int(l[c]) for l in lifts])
            found.setdefault(H.key, H)
    return sorted(found.values(), key=Subgroup.sort_key)
