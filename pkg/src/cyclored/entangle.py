"""Exact computations in subgroups of products of 2x2 matrix groups.

Elements are tuples of invertible 2x2 matrices over prime fields,
packed into integers (base l per entry, components big-endian) so that
integer order equals lexicographic order of the serialized matrices and
deduplication is exact.  Products small enough for 64-bit codes use
numpy arrays; everything else falls back to Python integers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod

import numpy as np

from .modmath import is_prime, primitive_root

DEFAULT_CLOSURE_CAP = 10**7
_INT64_SAFE = 1 << 62

Mat = tuple[int, int, int, int]  # row-major (a, b, c, d)


class ClosureCapExceeded(Exception):
    """Subgroup generation left the configured element budget."""


class NotOrderTwo(Exception):
    """A supplied component element is not an involution."""


class NotCentral(Exception):
    """A supplied component element fails to commute with the ambient."""


class CharacterNotSurjective(Exception):
    """A factor's quadratic character does not reach both signs."""


def _mat_mul(m: Mat, n: Mat, l: int) -> Mat:
    a, b, c, d = m
    e, f, g, h = n
    return (
        (a * e + b * g) % l,
        (a * f + b * h) % l,
        (c * e + d * g) % l,
        (c * f + d * h) % l,
    )


def _mat_det(m: Mat, l: int) -> int:
    return (m[0] * m[3] - m[1] * m[2]) % l


_ID: Mat = (1, 0, 0, 1)


def _pack_mat(m: Mat, l: int) -> int:
    return ((m[0] * l + m[1]) * l + m[2]) * l + m[3]


def _unpack_mat(code: int, l: int) -> Mat:
    code, d = divmod(code, l)
    code, c = divmod(code, l)
    a, b = divmod(code, l)
    return (a, b, c, d)


@dataclass(frozen=True)
class MatrixTuple:
    """One element of a product of matrix groups over prime fields."""

    moduli: tuple[int, ...]
    mats: tuple[Mat, ...]

    def __post_init__(self):
        object.__setattr__(self, "moduli", tuple(self.moduli))
        object.__setattr__(
            self, "mats", tuple(tuple(int(x) % l for x in m) for m, l in zip(self.mats, self.moduli))
        )
        if len(self.mats) != len(self.moduli):
            raise ValueError("one matrix per modulus required")
        for m, l in zip(self.mats, self.moduli):
            if len(m) != 4:
                raise ValueError("matrices are quadruples (a, b, c, d)")
            if _mat_det(m, l) == 0:
                raise ValueError(f"singular component modulo {l}")

    def code(self) -> int:
        c = 0
        for m, l in zip(self.mats, self.moduli):
            c = c * l**4 + _pack_mat(m, l)
        return c


def _decode(code: int, moduli: tuple[int, ...]) -> tuple[Mat, ...]:
    mats: list[Mat] = []
    for l in reversed(moduli):
        code, comp = divmod(code, l**4)
        mats.append(_unpack_mat(comp, l))
    return tuple(reversed(mats))


class MatrixTupleGroup:
    """Immutable enumerated subgroup of a product of matrix groups.

    elements is the full sorted list of packed codes; a numpy int64
    array when the total code space fits 64-bit arithmetic, otherwise a
    tuple of Python integers.
    """

    def __init__(self, moduli, generators, element_codes):
        self.moduli = tuple(moduli)
        if len(set(self.moduli)) != len(self.moduli):
            raise ValueError("moduli must be distinct")
        for l in self.moduli:
            if not is_prime(l):
                raise ValueError(f"modulus {l} is not prime")
        self.generators = tuple(generators)
        for g in self.generators:
            if g.moduli != self.moduli:
                raise ValueError("generator moduli mismatch")
        space = prod(l**4 for l in self.moduli)
        if isinstance(element_codes, np.ndarray):
            if len(element_codes) > 1 and np.any(np.diff(element_codes) < 0):
                element_codes = np.sort(element_codes)
            self.elements = element_codes
        elif space < _INT64_SAFE:
            self.elements = np.array(sorted(element_codes), dtype=np.int64)
        else:
            self.elements = tuple(sorted(element_codes))
        n = len(self.elements)
        if n == 0:
            raise ValueError("a group cannot be empty")
        full = prod(_gl2_size(l) for l in self.moduli)
        if full % n != 0:
            raise AssertionError("element count violates the subgroup constraint")

    @property
    def order(self) -> int:
        return len(self.elements)

    def identity_code(self) -> int:
        c = 0
        for l in self.moduli:
            c = c * l**4 + _pack_mat(_ID, l)
        return c

    def decode(self, code: int) -> tuple[Mat, ...]:
        return _decode(int(code), self.moduli)

    def element_tuples(self) -> list[MatrixTuple]:
        return [MatrixTuple(self.moduli, self.decode(c)) for c in self.elements]


def _gl2_size(l: int) -> int:
    return (l * l - 1) * (l * l - l)


def standard_gl2_generators(l: int) -> list[Mat]:
    """A generating set for the invertible 2x2 matrices modulo l: a
    maximal-order diagonal, the upper transvection, and the swap.
    Row reduction writes any invertible matrix in terms of these."""
    if not is_prime(l):
        raise ValueError(f"{l} is not prime")
    gens: list[Mat] = [(1, 1, 0, 1), (0, 1, 1, 0)]
    z = primitive_root(l)
    if z != 1:
        gens.insert(0, (z, 0, 0, 1))
    return gens


def generate_closure(moduli, generators, cap: int = DEFAULT_CLOSURE_CAP) -> MatrixTupleGroup:
    """Enumerate the subgroup generated by the given tuples.

    Breadth-first multiplication by the generators; in a finite group
    the multiplicative closure of a set containing the identity is the
    generated subgroup, so inverses need no separate handling.
    """
    moduli = tuple(moduli)
    gens = [g if isinstance(g, MatrixTuple) else MatrixTuple(moduli, g) for g in generators]
    id_mats = tuple(_ID for _ in moduli)
    id_code = MatrixTuple(moduli, id_mats).code()
    seen = {id_code}
    frontier = [id_mats]
    while frontier:
        fresh = []
        for mats in frontier:
            for g in gens:
                nxt = tuple(
                    _mat_mul(m, gm, l) for m, gm, l in zip(mats, g.mats, moduli)
                )
                code = MatrixTuple(moduli, nxt).code()
                if code not in seen:
                    if len(seen) >= cap:
                        raise ClosureCapExceeded(f"more than {cap} elements")
                    seen.add(code)
                    fresh.append(nxt)
        frontier = fresh
    return MatrixTupleGroup(moduli, gens, seen)


def full_product_group(moduli, cap: int = DEFAULT_CLOSURE_CAP) -> MatrixTupleGroup:
    """The entire product of the full matrix groups over the moduli,
    materialized directly (no closure walk).  Element count must stay
    within cap."""
    moduli = tuple(moduli)
    total = prod(_gl2_size(l) for l in moduli)
    if total > cap:
        raise ClosureCapExceeded(f"full product has {total} > {cap} elements")
    if prod(l**4 for l in moduli) >= _INT64_SAFE:
        raise ValueError("code space too large for direct materialization")
    codes = np.zeros(1, dtype=np.int64)
    for l in moduli:
        idx = np.arange(l**4, dtype=np.int64)
        a, b = idx // l**3 % l, idx // l**2 % l
        c, d = idx // l % l, idx % l
        comp = idx[(a * d - b * c) % l != 0]
        codes = (codes[:, None] * (l**4) + comp[None, :]).ravel()
    gens = []
    for i, l in enumerate(moduli):
        for gm in standard_gl2_generators(l):
            mats = tuple(gm if j == i else _ID for j in range(len(moduli)))
            gens.append(MatrixTuple(moduli, mats))
    return MatrixTupleGroup(moduli, gens, codes)


def delta_exact(G: MatrixTupleGroup) -> Fraction:
    """Exact fraction of elements whose every component differs from the
    identity matrix: the group-theoretic cyclicity density at the
    group's level."""
    r = len(G.moduli)
    id_codes = [_pack_mat(_ID, l) for l in G.moduli]
    if isinstance(G.elements, np.ndarray):
        x = G.elements.copy()
        mask = np.ones(len(x), dtype=bool)
        for i in range(r - 1, -1, -1):
            l4 = G.moduli[i] ** 4
            mask &= (x % l4) != id_codes[i]
            x //= l4
        hits = int(mask.sum())
    else:
        hits = 0
        for code in G.elements:
            ok = True
            for i in range(r - 1, -1, -1):
                l4 = G.moduli[i] ** 4
                code, comp = divmod(code, l4)
                if comp == id_codes[i]:
                    ok = False
                    break
            hits += ok
    return Fraction(hits, G.order)


def norm_one_construction(component_elements, ambient: MatrixTupleGroup) -> MatrixTupleGroup:
    """Order-4 subgroup of the product of three commuting involutions:
    the tuples with an even number of nontrivial entries.  Any prime
    splitting completely in the fixed field of such a subgroup would
    need every component nontrivial, which no element achieves, so the
    resulting density vanishes while each component factor is 1/2."""
    moduli = ambient.moduli
    if len(moduli) != 3 or len(component_elements) != 3:
        raise ValueError("the construction needs exactly three components")
    invs: list[Mat] = []
    for e, l in zip(component_elements, moduli):
        e = tuple(int(x) % l for x in e)
        if _mat_det(e, l) == 0:
            raise ValueError(f"singular involution modulo {l}")
        if e == _ID or _mat_mul(e, e, l) != _ID:
            raise NotOrderTwo(f"component modulo {l} does not have order 2")
        invs.append(e)
    for g in ambient.generators:
        for i, (e, l) in enumerate(zip(invs, moduli)):
            if _mat_mul(e, g.mats[i], l) != _mat_mul(g.mats[i], e, l):
                raise NotCentral(
                    f"involution modulo {l} does not commute with the ambient"
                )
    members = []
    for pattern in ((0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)):
        mats = tuple(invs[i] if pattern[i] else _ID for i in range(3))
        members.append(MatrixTuple(moduli, mats).code())
    gens = [
        MatrixTuple(moduli, (invs[0], invs[1], _ID)),
        MatrixTuple(moduli, (_ID, invs[1], invs[2])),
    ]
    return MatrixTupleGroup(moduli, gens, members)


@dataclass(frozen=True)
class Index2Model:
    """Abstract model of the kernel of a product quadratic character:
    factors carry only a size and a kernel size, never elements."""

    factor_sizes: tuple[int, ...]
    kernel_sizes: tuple[int, ...]
    group_order: int
    nontrivial_count: int


def index2_character_subgroup(factor_sizes, kernel_sizes) -> tuple[Index2Model, Fraction]:
    """Count, inside the index-2 kernel of a product of surjective
    quadratic characters, the elements nontrivial in every factor.

    The count convolves sign patterns: a factor contributes its
    nontrivial kernel elements on +1 and its full non-kernel on -1, and
    only even numbers of -1 signs land in the kernel of the product
    character.  Returns the abstract model and the exact density.
    """
    sizes = tuple(int(n) for n in factor_sizes)
    kernels = tuple(int(k) for k in kernel_sizes)
    if len(sizes) < 2:
        raise ValueError("need at least two factors")
    if len(kernels) != len(sizes):
        raise ValueError("one kernel size per factor")
    for n, k in zip(sizes, kernels):
        if n < 2 or k < 1:
            raise ValueError("factor and kernel sizes must be positive")
        if 2 * k != n:
            raise CharacterNotSurjective(
                f"kernel of size {k} in a factor of size {n} is not index 2"
            )
    r = len(sizes)
    plus = [k - 1 for k in kernels]  # nontrivial kernel elements
    minus = [n - k for n, k in zip(sizes, kernels)]  # all non-kernel elements
    count = 0
    for pattern in itertools.product((0, 1), repeat=r):
        if sum(pattern) % 2:
            continue
        count += prod(minus[i] if s else plus[i] for i, s in enumerate(pattern))
    order = prod(sizes) // 2
    model = Index2Model(
        factor_sizes=sizes,
        kernel_sizes=kernels,
        group_order=order,
        nontrivial_count=count,
    )
    return model, Fraction(count, order)


def load_group_description(doc: dict):
    """Build a group (or abstract index-2 model) from a JSON document.

    Recognized constructions: "closure" (default; moduli + generators as
    lists of quadruples), "full_product" (moduli only), "norm_one"
    (moduli + three involutions, ambient is the closure of their
    embeddings), and "index2" (factor_sizes + kernel_sizes).  Returns
    ("group", MatrixTupleGroup) or ("index2", (Index2Model, Fraction)).
    """
    if not isinstance(doc, dict):
        raise ValueError("group description must be a JSON object")
    kind = doc.get("construction", "closure")
    cap = int(doc.get("cap", DEFAULT_CLOSURE_CAP))
    if kind == "index2":
        return "index2", index2_character_subgroup(
            doc["factor_sizes"], doc["kernel_sizes"]
        )
    moduli = tuple(int(l) for l in doc["moduli"])
    if kind == "full_product":
        return "group", full_product_group(moduli, cap)
    if kind == "norm_one":
        invs = [tuple(int(x) for x in e) for e in doc["involutions"]]
        if len(invs) != len(moduli):
            raise ValueError("one involution per modulus required")
        emb = [
            MatrixTuple(
                moduli, tuple(invs[i] if j == i else _ID for j in range(len(moduli)))
            )
            for i in range(len(moduli))
        ]
        ambient = generate_closure(moduli, emb, cap)
        return "group", norm_one_construction(invs, ambient)
    if kind == "closure":
        gens = [
            MatrixTuple(moduli, [tuple(int(x) for x in quad) for quad in g])
            for g in doc.get("generators", [])
        ]
        return "group", generate_closure(moduli, gens, cap)
    raise ValueError(f"unknown construction {kind!r}")
