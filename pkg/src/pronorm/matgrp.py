"""Small matrix groups over GF(p) and the Sp_2(3) wr Sym_3 pipeline.

Matrices act on row vectors from the right, x -> xA, so the matrix
product AB is "A first, then B", matching the permutation convention.
A matrix is modelled as a permutation of the nonzero vectors of GF(p)^d,
numbered by their base-p code (first coordinate most significant) minus 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np
from sympy import isprime

from .criteria import Decision, Reason, Verdict, thm2_decide
from .errors import BudgetExceeded, HypothesisViolated, IncompatiblePayloads, ShapeMismatch, StructureCheckFailed
from .group import (
    DEFAULT_BUDGET,
    Domain,
    Group,
    QuotientGroup,
    Subgroup,
    closure,
    coset_table,
    has_odd_index,
    normalizer,
    p_core,
    quotient,
    sylow_p,
)
from .wreath import GenericWreath, WreathProduct, generic_wreath, wreath_product


@dataclass(frozen=True, slots=True)
class GFMatrix:
    p: int
    d: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.d or any(len(r) != self.d for r in self.entries):
            raise ShapeMismatch(f"expected a {self.d}x{self.d} matrix")
        if any(not 0 <= x < self.p for r in self.entries for x in r):
            raise ShapeMismatch("entries must be residues mod p")

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]], p: int) -> GFMatrix:
        rows = [tuple(int(x) % p for x in r) for r in rows]
        return cls(p, len(rows), tuple(rows))

    @classmethod
    def identity(cls, p: int, d: int) -> GFMatrix:
        return cls(p, d, tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.d, self.d)

    def __mul__(self, other: GFMatrix) -> GFMatrix:
        return mat_mul(self, other)

    def det(self) -> int:
        return _rank_det(self.array(), self.p)[1]

    def inverse(self) -> GFMatrix:
        p, d = self.p, self.d
        M = np.concatenate([self.array(), np.eye(d, dtype=np.int64)], axis=1)
        for c in range(d):
            piv = next((r for r in range(c, d) if M[r, c] % p), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            M[[c, piv]] = M[[piv, c]]
            M[c] = M[c] * pow(int(M[c, c]), -1, p) % p
            for r in range(d):
                if r != c and M[r, c]:
                    M[r] = (M[r] - M[r, c] * M[c]) % p
        return GFMatrix.of(M[:, d:].tolist(), p)

    def domain(self) -> MatrixDomain:
        return MatrixDomain(self.p, self.d)

    def key(self) -> int:
        return self.domain().key(self)

    def __repr__(self):
        return f"GFMatrix(p={self.p}, {[list(r) for r in self.entries]})"


def _rank_det(A: np.ndarray, p: int) -> tuple[int, int]:
    A = A.copy() % p
    d = len(A)
    det = 1
    for c in range(d):
        piv = next((r for r in range(c, d) if A[r, c]), None)
        if piv is None:
            return c, 0
        if piv != c:
            A[[c, piv]] = A[[piv, c]]
            det = -det
        det = det * int(A[c, c]) % p
        inv = pow(int(A[c, c]), -1, p)
        for r in range(c + 1, d):
            A[r] = (A[r] - A[r, c] * inv * A[c]) % p
    return d, det % p


def mat_mul(a: GFMatrix, b: GFMatrix) -> GFMatrix:
    if (a.p, a.d) != (b.p, b.d):
        raise ShapeMismatch("matrices of different shape or field")
    return GFMatrix.of((a.array() @ b.array()) % a.p, a.p)


@lru_cache(maxsize=None)
def _vectors(p: int, d: int) -> np.ndarray:
    """Nonzero vectors of GF(p)^d in code order."""
    return np.indices((p,) * d).reshape(d, -1).T[1:]


class MatrixDomain(Domain):
    def __init__(self, p: int, d: int):
        self.p, self.d = p, d
        self.degree = p**d - 1
        self.key_space = p ** (d * d)
        self._weights = p ** np.arange(d - 1, -1, -1, dtype=np.int64)

    def to_perm(self, x: GFMatrix):
        imgs = (_vectors(self.p, self.d) @ x.array()) % self.p
        return (imgs @ self._weights - 1).tolist()

    def from_perm(self, row) -> GFMatrix:
        rows = []
        for r in range(self.d):
            code = int(row[int(self._weights[r]) - 1]) + 1
            rows.append(tuple(int(c) for c in np.unravel_index(code, (self.p,) * self.d)))
        return GFMatrix(self.p, self.d, tuple(rows))

    def key(self, x: GFMatrix) -> int:
        k = 0
        for r in x.entries:
            for e in r:
                k = k * self.p + e
        return k

    def sort_columns(self, perms):
        return [np.asarray(perms)[:, int(w) - 1] for w in self._weights]

    def accepts(self, x) -> bool:
        return isinstance(x, GFMatrix) and (x.p, x.d) == (self.p, self.d)

    def to_json(self, x: GFMatrix):
        return {"p": x.p, "d": x.d, "entries": [e for r in x.entries for e in r]}

    def from_json(self, obj) -> GFMatrix:
        try:
            p, d, flat = int(obj["p"]), int(obj["d"]), [int(e) for e in obj["entries"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise IncompatiblePayloads(f"bad matrix {obj!r}: {exc}") from None
        if (p, d) != (self.p, self.d) or len(flat) != d * d:
            raise IncompatiblePayloads(f"matrix shape does not match GF({self.p})^{self.d}")
        return GFMatrix.of([flat[i * d:(i + 1) * d] for i in range(d)], p)

    def __eq__(self, other):
        return isinstance(other, MatrixDomain) and (other.p, other.d) == (self.p, self.d)

    def __hash__(self):
        return hash(("matrix", self.p, self.d))


@dataclass(frozen=True)
class SymplecticForm:
    """Block-diagonal form with blocks [[0, 1], [-1, 0]]."""

    p: int
    dim: int

    def __post_init__(self):
        if self.dim % 2:
            raise ShapeMismatch("symplectic forms need even dimension")

    @cached_property
    def J(self) -> np.ndarray:
        J = np.zeros((self.dim, self.dim), dtype=np.int64)
        for b in range(0, self.dim, 2):
            J[b, b + 1] = 1
            J[b + 1, b] = self.p - 1
        return J


def preserves_form(a: GFMatrix, J: SymplecticForm) -> bool:
    if (a.p, a.d) != (J.p, J.dim):
        raise ShapeMismatch("matrix and form have different shape or field")
    A = a.array()
    return bool(np.array_equal((A.T @ J.J @ A) % a.p, J.J))


def sp2_generators(q: int) -> list[GFMatrix]:
    return [GFMatrix.of([[1, 1], [0, 1]], q), GFMatrix.of([[1, 0], [1, 1]], q)]


@lru_cache(maxsize=None)
def build_sp2(q: int = 3, budget: int = DEFAULT_BUDGET) -> Group:
    """Sp_2(q) = SL_2(q), generated by the two elementary transvections."""
    if not isprime(q):
        raise ValueError("only prime fields are supported")
    if q * (q * q - 1) > budget:
        raise BudgetExceeded(f"Sp_2({q}) has order {q * (q * q - 1)} > budget {budget}")
    return closure(sp2_generators(q), name=f"Sp2({q})")


@lru_cache(maxsize=None)
def sp2_3_wr_sym3() -> GenericWreath:
    M = generic_wreath(build_sp2(3), 3)
    M.name = "Sp2(3) wr Sym3"
    return M


# --------------------------------------------------------------------------
# labelled quotients L/P = Z_m and the induced map on wreath products


def cyclic_labels(L: Group, P: Subgroup, within: Subgroup | None = None) -> tuple[np.ndarray, int]:
    """Labels 0..m-1 for the cosets of P in ``within`` (default L), an isomorphism onto Z_m.

    The identity coset gets 0, the remaining coset with the smallest
    minimal representative is the generator and gets 1, and label k goes
    to its k-th power.  Fails unless the quotient is cyclic of prime order.
    """
    within = L.whole if within is None else within
    Q = quotient(within, P)
    m = Q.order
    lab = np.full(L.order, -1, dtype=np.int64)
    if m == 1:
        lab[within.indices] = 0
        return lab, 1
    if not isprime(m):
        raise StructureCheckFailed(f"quotient of order {m} is not of prime order")
    e = Q.identity_index
    c = min(i for i in range(m) if i != e)
    power = e
    coset_label = np.empty(m, dtype=np.int64)
    for k in range(m):
        coset_label[power] = k
        power = Q.mul(power, c)
    if power != e:
        raise StructureCheckFailed("chosen coset generator does not have prime order")
    if len(set(coset_label.tolist())) != m:
        raise StructureCheckFailed("labels are not a bijection onto Z_m")
    lab[within.indices] = coset_label[Q.coset_of[within.indices]]
    return lab, m


@dataclass
class WreathLabelMap:
    """Map from (N_L(P) wr Sym_n) onto Z_m wr Sym_n with kernel P^n."""

    source: GenericWreath
    target: WreathProduct
    domain_indices: np.ndarray
    images: np.ndarray  # images[k] = target index of source element domain_indices[k]
    kernel: Subgroup

    def __call__(self, idx):
        pos = np.searchsorted(self.domain_indices, idx)
        return self.images[pos]

    def image(self, H: Subgroup) -> Subgroup:
        gens = [int(x) for x in np.atleast_1d(self(np.asarray(H.gens, dtype=np.int64)))] if H.gens else []
        return Subgroup(self.target, np.unique(self(H.indices)), gens)

    def preimage(self, X: Subgroup) -> Subgroup:
        return Subgroup(self.source, self.domain_indices[X.mask[self.images]])


def wreath_label_map(G: GenericWreath, NL: Subgroup, P: Subgroup) -> WreathLabelMap:
    """Label coordinates through N_L(P)/P = Z_m, giving a map to Z_m wr Sym_n.

    The map is checked to be a homomorphism on all pairs of generators of
    its domain and to have kernel exactly P^n.
    """
    L = G.L
    lab, m = cyclic_labels(L, P, NL)
    W = wreath_product(m, G.n) if m > 1 else None
    dom = G.base_product([NL] * G.n)
    # base indices have top coordinate 0 (the identity); add every top permutation
    dom = Subgroup(G, (dom.indices[:, None] + np.arange(G.nfact)[None, :]).ravel())
    coords = G.coords(dom.indices)
    labels = np.stack([lab[c] for c in coords[:-1]], axis=1)
    if (labels < 0).any():
        raise StructureCheckFailed("domain element outside the labelled subgroup")
    if W is None:
        raise StructureCheckFailed("N_L(P) = P: nothing to label")
    codes = labels @ (m ** np.arange(G.n - 1, -1, -1, dtype=np.int64))
    images = codes * W.nfact + coords[-1]
    kernel = G.base_product([P] * G.n)
    fmap = WreathLabelMap(G, W, dom.indices, images, kernel)
    gens = dom.gens
    for a in gens:
        for b in gens:
            if fmap(G.mul(a, b)) != W.mul(fmap(a), fmap(b)):
                raise StructureCheckFailed("coordinate labelling is not a homomorphism")
    if not np.array_equal(np.sort(dom.indices[images == W.identity_index]), kernel.indices):
        raise StructureCheckFailed("kernel of the labelling is not P^n")
    if len(np.unique(images)) != W.order:
        raise StructureCheckFailed("labelling is not onto Z_m wr Sym_n")
    return fmap


@dataclass
class O2Epimorphism:
    M: GenericWreath
    O2: Subgroup
    quotient: QuotientGroup
    target: WreathProduct
    label_map: WreathLabelMap
    quotient_to_target: np.ndarray  # coset index -> target index

    def transport(self, H: Subgroup) -> Subgroup:
        return self.label_map.image(H)

    def preimage(self, X: Subgroup) -> Subgroup:
        return self.label_map.preimage(X)


def o2_epimorphism(M: GenericWreath | None = None) -> O2Epimorphism:
    """M / O_2(M) for M = Sp_2(3) wr Sym_3, identified with Z_3 wr Sym_3."""
    M = sp2_3_wr_sym3() if M is None else M
    L = M.L
    O2L = p_core(L, 2)
    O2 = p_core(M, 2)
    if O2 != M.base_product([O2L] * M.n):
        raise StructureCheckFailed("O_2(M) is not the cube of O_2 of the base factor")
    Q = quotient(M, O2)
    fmap = wreath_label_map(M, L.whole, O2L)
    if not np.array_equal(fmap.domain_indices, M.indices):
        raise StructureCheckFailed("labelling does not cover M")
    # the induced map on cosets must be well defined and bijective
    per_coset = np.full(Q.order, -1, dtype=np.int64)
    per_coset[Q.coset_of[M.indices]] = fmap.images
    if not np.array_equal(per_coset[Q.coset_of[M.indices]], fmap.images):
        raise StructureCheckFailed("labelling is not constant on cosets of O_2(M)")
    if len(np.unique(per_coset)) != Q.order or Q.order != fmap.target.order:
        raise StructureCheckFailed("induced map on M/O_2(M) is not a bijection")
    W = fmap.target
    for a in Q.gens:
        for b in Q.gens:
            if per_coset[Q.mul(a, b)] != W.mul(per_coset[a], per_coset[b]):
                raise StructureCheckFailed("induced map on M/O_2(M) is not a homomorphism")
    return O2Epimorphism(M, O2, Q, W, fmap, per_coset)


AMBIENT_NOTE = Reason("ambient-maximal-subgroup", None,
                      "decided in M = Sp2(3) wr Sym3; the step from PSp6(3) to M is taken as given")


def example1_pipeline(H: Subgroup, epi: O2Epimorphism | None = None,
                      allow_reducible: bool = False) -> Decision:
    """Decide pronormality of an odd-index H <= Sp_2(3) wr Sym_3 via Z_3 wr Sym_3."""
    epi = o2_epimorphism() if epi is None else epi
    M = epi.M
    if H.ambient is not M:
        raise HypothesisViolated("H is not a subgroup of Sp2(3) wr Sym3")
    if not has_odd_index(M, H):
        raise HypothesisViolated("H does not have odd index in M")
    top = len(np.unique(M.bar_index(H.indices)))
    if top != M.nfact:
        if not allow_reducible:
            raise HypothesisViolated("H does not project onto Sym3")
        return Decision(Verdict.PRONORMAL, [
            AMBIENT_NOTE,
            Reason("reducible-branch", None,
                   "H stabilizes a nondegenerate 2-space; pronormal in PSp6(3) by citation, not verified here"),
        ])
    image = epi.transport(H)
    d = thm2_decide(epi.target, epi.target.whole, image)
    return Decision(d.verdict, [AMBIENT_NOTE, Reason("o2-quotient", None, f"image of order {image.order} in Z3 wr Sym3")] + d.reasons)


# --------------------------------------------------------------------------
# Sylow normalizers in L wr Sym_n


@dataclass
class WreathNormalizerReport:
    n: int
    p: int
    order_G: int
    order_T: int
    order_N: int
    order_quotient: int
    order_P: int
    order_NL: int
    expected_quotient: int
    T_is_product: bool
    NK_is_product: bool
    N_is_wreath: bool
    isomorphism_verified: bool | None

    @property
    def ok(self) -> bool:
        return (self.order_quotient == self.expected_quotient and self.T_is_product and self.NK_is_product
                and self.N_is_wreath and self.isomorphism_verified is not False)


def lemma13_structure(L: Group, n: int, p: int, budget: int = DEFAULT_BUDGET,
                      build_isomorphism: bool | None = None) -> WreathNormalizerReport:
    """N_G(T)/T for G = L wr Sym_n and T the Sylow p-subgroup of the base."""
    G = generic_wreath(L, n)
    if G.order > budget:
        raise BudgetExceeded(f"L wr Sym_{n} has order {G.order} > budget {budget}")
    S = sylow_p(G, p)
    K = G.K
    T = Subgroup(G, S.indices[K.mask[S.indices]])
    N = normalizer(G, T)
    Q = quotient(N, T)
    P = sylow_p(L, p)
    NL = normalizer(L, P)
    # T is a product of Sylow subgroups of the coordinates
    coords = G.coords(T.indices)
    Ts = [Subgroup(L, np.unique(c)) for c in coords[:-1]]
    T_prod = all(t.order == P.order for t in Ts) and G.base_product(Ts) == T
    NK = Subgroup(G, N.indices[K.mask[N.indices]])
    NK_prod = NK == G.base_product([normalizer(L, t) for t in Ts])
    # N_G(T) = (prod N_L(T_i)) . (a top complement) has the wreath order
    N_is_wreath = N.order == NK.order * G.nfact
    expected = (NL.order // P.order) ** n * G.nfact
    iso = None
    if build_isomorphism is None:
        build_isomorphism = NL.order > P.order and all(t == Ts[0] for t in Ts)
    if build_isomorphism:
        try:
            fmap = wreath_label_map(G, normalizer(L, Ts[0]), Ts[0])
            iso = bool(np.array_equal(np.sort(fmap.domain_indices), N.indices)) and Q.order == fmap.target.order
        except StructureCheckFailed:
            iso = False
    return WreathNormalizerReport(n, p, G.order, T.order, N.order, Q.order, P.order, NL.order, expected,
                         bool(T_prod), bool(NK_prod), bool(N_is_wreath), iso)
